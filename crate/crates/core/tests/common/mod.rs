#![allow(dead_code)]

use grig_core::equation::{Assignment, Atom, Constraint, MixedWord, Variable};
use grig_core::quotient::pi_k;
use grig_core::{Element, Generator};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_element(rng: &mut impl Rng, max_raw: usize) -> Element {
    let n = rng.gen_range(0..=max_raw);
    Element::reduce((0..n).map(|_| Generator::ALL[rng.gen_range(0..4)]))
}

/// A reduced word of exactly `len` letters: `a` alternates with one of
/// `b, c, d`.
pub fn random_reduced(rng: &mut impl Rng, len: usize) -> Element {
    let mut on_a = rng.gen_bool(0.5);
    let letters = (0..len).map(|_| {
        let g = if on_a {
            Generator::A
        } else {
            Generator::ALL[rng.gen_range(1..4)]
        };
        on_a = !on_a;
        g
    });
    let g = Element::reduce(letters.collect::<Vec<_>>());
    debug_assert_eq!(g.len(), len);
    g
}

pub fn var(name: &str) -> Variable {
    Variable::new(name)
}

/// Random quadratic word on `nvars` variables with constants of length at
/// most `max_const` between occurrences.
pub fn random_quadratic(
    rng: &mut impl Rng,
    nvars: usize,
    max_const: usize,
    orientable: Option<bool>,
) -> MixedWord {
    let names = ["x", "y", "z", "u", "v", "w"];
    let mut slots: Vec<(usize, i8)> = Vec::new();
    for (i, _) in names.iter().enumerate().take(nvars) {
        let s1: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let s2 = match orientable {
            Some(true) => -s1,
            Some(false) if i == 0 => s1,
            _ => {
                if rng.gen_bool(0.5) {
                    1
                } else {
                    -1
                }
            }
        };
        slots.push((i, s1));
        slots.push((i, s2));
    }
    slots.shuffle(rng);
    let mut w = MixedWord::empty();
    for (i, s) in slots {
        if max_const > 0 && rng.gen_bool(0.6) {
            let l = rng.gen_range(1..=max_const);
            w.push(Atom::Const(random_reduced(rng, l)));
        }
        w.push(Atom::var(&var(names[i]), s));
    }
    if max_const > 0 && rng.gen_bool(0.5) {
        let l = rng.gen_range(1..=max_const);
        w.push(Atom::Const(random_reduced(rng, l)));
    }
    w
}

pub fn random_assignment(
    rng: &mut impl Rng,
    vars: impl IntoIterator<Item = Variable>,
    max_raw: usize,
) -> Assignment {
    vars.into_iter()
        .map(|v| (v, random_element(rng, max_raw)))
        .collect()
}

pub fn constraint_of(alpha: &Assignment) -> Constraint {
    alpha.iter().map(|(v, g)| (v.clone(), pi_k(g))).collect()
}
