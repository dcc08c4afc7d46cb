//! Acceptance checks, one printed line per criterion.
//!
//! Status `PASS` means every assertion held. `DEVIATION` means the stated
//! value contradicts an independent oracle; the oracle value is asserted
//! instead and the discrepancy is printed. Any `FAIL` makes the run fail.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use common::*;
use grig_core::equation::{
    parse_constraint_lines, Assignment, Constraint, MixedWord, StandardQuadratic, Variable,
};
use grig_core::group::{abelianization, ball, equal, is_trivial, order, reduced_words_up_to};
use grig_core::pipeline::{
    ball_size, brute_force, canonical_equation, contraction_bound, encode, insert_handles,
    steps_to_short, verify, CodeIndex, EquationCode, Ledger, LedgerEntry, Outcome, Solver,
    SolverConfig, Verdict, Via,
};
use grig_core::quotient::{image_of_ball, ordered_classes, pi_k, PsiImageTable, QElement};
use grig_core::split::{
    induced_solution, lift_descendants, matches_k_table, split_reduction, split_standard,
    split_word, SplitOutcome, SplitReduction,
};
use grig_core::width::{stabilization_index, theta_csv, theta_orbits, width_probe, WidthReport};
use grig_core::{Element, Generator};
use itertools::Itertools;
use rand::Rng;

type Criterion = fn() -> Status;

enum Status {
    Pass(String),
    Deviation(String),
    Fail(String),
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Status::Fail(format!($($msg)+));
        }
    };
}

fn el(s: &str) -> Element {
    s.parse().unwrap()
}

fn q(s: &str) -> QElement {
    pi_k(&el(s))
}

fn permutation_order(p: &[u32]) -> u64 {
    let mut seen = vec![false; p.len()];
    let mut lcm = 1u64;
    for start in 0..p.len() {
        let mut len = 0u64;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = p[x] as usize;
            len += 1;
        }
        if len > 0 {
            lcm = num_lcm(lcm, len);
        }
    }
    lcm
}

fn num_lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// All completions of `gamma` to the variables of `w`.
fn completions(w: &MixedWord, gamma: &Constraint) -> Vec<Constraint> {
    let free: Vec<Variable> = w
        .vars()
        .into_iter()
        .filter(|v| !gamma.contains(v))
        .collect();
    free.iter()
        .map(|_| ordered_classes().to_vec())
        .multi_cartesian_product()
        .map(|c| {
            let mut g = gamma.clone();
            for (v, q) in free.iter().zip(c) {
                g.set(v.clone(), q);
            }
            g
        })
        .collect()
}

/// Brute-force solution of both words of a split system with entries of
/// length at most `max_len`.
fn solve_system(words: &[MixedWord; 2], zeta: &Constraint, max_len: usize) -> Option<Assignment> {
    let vars: Vec<Variable> = words[0].vars().union(&words[1].vars()).cloned().collect();
    let b = ball(max_len);
    let candidates: Vec<Vec<Element>> = vars
        .iter()
        .map(|v| {
            b.iter()
                .filter(|g| pi_k(g) == zeta.value_or_identity(v))
                .cloned()
                .collect()
        })
        .collect();
    let check = |a: &Assignment| words.iter().all(|w| is_trivial(&w.eval(a).unwrap()));
    if vars.is_empty() {
        return check(&Assignment::new()).then(Assignment::new);
    }
    candidates
        .into_iter()
        .multi_cartesian_product()
        .find_map(|vals| {
            let a: Assignment = vars.iter().cloned().zip(vals).collect();
            check(&a).then_some(a)
        })
}

struct CorpusEntry {
    expected: bool,
    word: MixedWord,
    gamma: Constraint,
}

fn corpus() -> Vec<CorpusEntry> {
    include_str!("data/corpus.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| {
            let parts: Vec<&str> = l.split('|').map(str::trim).collect();
            let expected = match parts[0] {
                "solvable" => true,
                "unsolvable" => false,
                other => panic!("bad status {other}"),
            };
            let word: MixedWord = parts[1].parse().unwrap();
            let gamma = parse_constraint_lines(parts[2].split(',')).unwrap();
            CorpusEntry {
                expected,
                word,
                gamma,
            }
        })
        .collect()
}

/// Brute-force witness with the largest radius keeping the search small.
fn corpus_witness(e: &CorpusEntry) -> Option<Assignment> {
    let k = e.word.vars().len() as u32;
    let radius = (0..=4)
        .rev()
        .find(|&r| (ball_size(r) as u64).saturating_pow(k) <= 200_000)
        .unwrap_or(0);
    brute_force(&e.word, &e.gamma, radius)
}

fn criterion_1() -> Status {
    ensure!(
        QElement::all().count() == 16,
        "QElement has {} values",
        QElement::all().count()
    );
    let image = image_of_ball(6);
    ensure!(
        image.len() == 16,
        "pi_K image of the 6-ball has {} classes",
        image.len()
    );
    let classes: HashSet<QElement> = image.values().map(pi_k).collect();
    for (&x, &y) in classes.iter().cartesian_product(classes.iter()) {
        ensure!(
            classes.contains(&x.mul(y)),
            "image not closed under multiplication"
        );
    }
    let (a, b, d) = (q("a"), q("b"), q("d"));
    for (name, r) in [
        ("b^2", b.pow(2)),
        ("a^2", a.pow(2)),
        ("d^2", d.pow(2)),
        ("(ab)^2", a.mul(b).pow(2)),
    ] {
        ensure!(r.is_identity(), "relation {name} fails");
    }
    ensure!(
        b.mul(d).pow(2).is_identity() && a.mul(d).pow(4).is_identity(),
        "relations (bd)^2, (ad)^4 fail"
    );
    let table = match PsiImageTable::compute() {
        Ok(t) => t,
        Err(e) => return Status::Fail(format!("omega not well defined: {e}")),
    };
    // Independent enumeration of F over the stabilizer part of a ball.
    let mut f = BTreeSet::new();
    for g in reduced_words_up_to(10).into_iter().filter(|g| g.in_st1()) {
        let (g0, g1) = g.psi().unwrap();
        let pair = (pi_k(&g0).index(), pi_k(&g1).index());
        ensure!(
            table.omega(pi_k(&g0), pi_k(&g1)) == Some(pi_k(&g)),
            "omega disagrees on {g}"
        );
        f.insert(pair);
    }
    ensure!(
        f.len() == table.len(),
        "enumerated |F| = {} but table has {}",
        f.len(),
        table.len()
    );
    let all: Vec<QElement> = QElement::all().collect();
    let defined = all
        .iter()
        .cartesian_product(all.iter())
        .filter(|&(&x, &y)| table.omega(x, y).is_some())
        .count();
    ensure!(
        defined == table.len(),
        "omega defined on {defined} pairs, |F| = {}",
        table.len()
    );
    ensure!(
        table.omega(q("a"), q("c")) == Some(q("b")),
        "omega(a, c) != b"
    );
    let detail = format!(
        "16 classes, relations hold, omega well defined on {} pairs",
        table.len()
    );
    if table.len() == 8 {
        Status::Pass(detail)
    } else {
        Status::Deviation(format!(
            "{detail}; stated |F| = 8 but enumeration gives {} (8 stabilizer classes, fibre size {})",
            table.len(),
            table.len() / 8
        ))
    }
}

fn criterion_2() -> Status {
    let mut r = rng(2);
    let relators = ["adadadad", "acacacacacacacac", "bcd", "dcb"];
    let (mut same, mut differ) = (0, 0);
    for i in 0..1000 {
        let g = random_element(&mut r, 30);
        let h = if i % 2 == 0 {
            // Equal by construction: insert a relator into g.
            let rel = relators[r.gen_range(0..relators.len())];
            let cut = r.gen_range(0..=g.len());
            let inserted = rel.chars().map(|c| Generator::from_symbol(c).unwrap());
            let letters: Vec<Generator> = g.letters()[..cut]
                .iter()
                .copied()
                .chain(inserted)
                .chain(g.letters()[cut..].iter().copied())
                .collect();
            let h = Element::reduce(letters);
            if h.len() > 30 {
                g.clone()
            } else {
                h
            }
        } else {
            random_element(&mut r, 30)
        };
        let by_word = equal(&g, &h);
        let by_portrait = g.level_permutation(10) == h.level_permutation(10);
        ensure!(
            by_word == by_portrait,
            "disagreement on {g} vs {h}: equal={by_word}"
        );
        if by_word {
            same += 1;
        } else {
            differ += 1;
        }
    }
    Status::Pass(format!(
        "1000 pairs agree ({same} equal, {differ} distinct)"
    ))
}

fn criterion_3() -> Status {
    for s in ["a", "b", "c", "d"] {
        ensure!(order(&el(s)) == 2, "order({s}) != 2");
    }
    let mut expected = vec![];
    for s in ["ab", "ac", "ad"] {
        let o = order(&el(s));
        let p = permutation_order(&el(s).level_permutation(10));
        ensure!(
            o == p,
            "order({s}) = {o} but level-10 portrait order is {p}"
        );
        expected.push(o);
    }
    ensure!(expected[0] == 16, "order(ab) = {}", expected[0]);
    let mut r = rng(3);
    for _ in 0..100 {
        let g = random_element(&mut r, 20);
        let o = order(&g);
        ensure!(o.is_power_of_two(), "order({g}) = {o}");
        ensure!(is_trivial(&g.pow(o)), "{g}^{o} is not trivial");
        ensure!(
            o == 1 || !is_trivial(&g.pow(o / 2)),
            "order({g}) is not minimal"
        );
        let p = permutation_order(&g.level_permutation(10));
        ensure!(
            o.is_multiple_of(p),
            "portrait order {p} does not divide order({g}) = {o}"
        );
    }
    let detail = format!(
        "generators 2, ab {}, ac {}, ad {} (portrait-checked), 100 random orders are powers of 2",
        expected[0], expected[1], expected[2]
    );
    if expected[2] == 8 {
        Status::Pass(detail)
    } else {
        Status::Deviation(format!(
            "{detail}; stated order(ad) = 8, computed {}: (ad)^2 = (b, b) by psi",
            expected[2]
        ))
    }
}

fn criterion_4() -> Status {
    let mut r = rng(4);
    for i in 0..500 {
        let n = r.gen_range(1..=4);
        let w = random_quadratic(&mut r, n, 3, None);
        let alpha = random_assignment(&mut r, w.vars(), 16);
        let gamma = constraint_of(&alpha);
        let (w0, w1) = split_word(&w, &gamma).unwrap();
        let star = induced_solution(&alpha);
        let (p0, p1) = w.eval(&alpha).unwrap().bar().psi().unwrap();
        ensure!(
            equal(&p0, &w0.eval(&star).unwrap()),
            "triple {i}: component 0 differs for {w}"
        );
        ensure!(
            equal(&p1, &w1.eval(&star).unwrap()),
            "triple {i}: component 1 differs for {w}"
        );
    }
    Status::Pass("500 triples, both components equal".into())
}

fn criterion_5() -> Status {
    let mut r = rng(5);
    let (mut done, mut literal, mut solvable) = (0, 0, 0);
    let mut longer = Vec::new();
    while done < 50 {
        let n = r.gen_range(1..=2);
        let w = random_quadratic(&mut r, n, 3, None);
        let good: Vec<Constraint> = completions(&w, &Constraint::new())
            .into_iter()
            .filter(|g| w.gamma_eval(g).unwrap().is_identity())
            .collect();
        if good.is_empty() {
            continue;
        }
        let gamma = good[r.gen_range(0..good.len())].clone();
        done += 1;
        let input = brute_force(&w, &gamma, 3);
        let mut lifted = None;
        if let SplitReduction::Systems(s) = split_reduction(&w, &gamma).unwrap() {
            let vars: Vec<Variable> = w.vars().into_iter().collect();
            for z in s.branches() {
                if let Some(beta) = solve_system(&s.words, &z, 3) {
                    let alpha = lift_descendants(&vars, &gamma, &beta, &z).unwrap();
                    ensure!(
                        verify(&w, &gamma, &alpha).is_ok(),
                        "lifted witness fails for {w} {gamma}"
                    );
                    lifted = Some(alpha);
                    break;
                }
            }
        }
        ensure!(
            input.is_none() || lifted.is_some(),
            "{w} {gamma}: input solvable at length 3, no split system is"
        );
        if input.is_some() {
            solvable += 1;
        }
        if input.is_some() == lifted.is_some() {
            literal += 1;
        } else {
            let a = lifted.unwrap();
            let len = a.values().map(Element::len).max().unwrap_or(0);
            longer.push(format!("{w} {gamma} (lifted witness length {len})"));
        }
    }
    let detail = format!(
        "50 equations ({solvable} solvable at length 3): input => split exact, every split solution lifts to a verified input solution"
    );
    if longer.is_empty() {
        Status::Pass(detail)
    } else {
        Status::Deviation(format!(
            "{detail}; literal max_len-3 equality holds on {literal}/50, the other {} have split solutions whose lifts exceed length 3, e.g. {}",
            longer.len(),
            longer[0]
        ))
    }
}

fn random_standard(r: &mut impl Rng) -> StandardQuadratic {
    let var = |s: String| Variable::new(s);
    let ncoef = r.gen_range(1..=3);
    let coefficients: Vec<(Variable, Element)> = (1..=ncoef)
        .map(|i| {
            let c = loop {
                let len = r.gen_range(1..=6);
                let c = random_reduced(r, len);
                if !is_trivial(&c) {
                    break c;
                }
            };
            (var(format!("z{i}")), c)
        })
        .collect();
    if r.gen_bool(0.5) {
        let g = r.gen_range(0..=2);
        StandardQuadratic::orientable(
            (1..=g)
                .map(|i| (var(format!("x{i}")), var(format!("y{i}"))))
                .collect(),
            coefficients,
        )
    } else {
        let g = r.gen_range(1..=3);
        StandardQuadratic::non_orientable(
            (1..=g).map(|i| var(format!("x{i}"))).collect(),
            coefficients,
        )
    }
}

fn criterion_6() -> Status {
    let mut r = rng(6);
    let (mut joined, mut tries, mut flips) = (0, 0, 0);
    while joined < 100 {
        tries += 1;
        ensure!(tries < 100_000, "only {joined} joined cases found");
        let sq = random_standard(&mut r);
        let zeta: Constraint = sq
            .vars()
            .into_iter()
            .map(|v| (v, ordered_classes()[r.gen_range(0..16)]))
            .collect();
        if sq.render().gamma_eval(&zeta).unwrap().st_coset() != 0 {
            continue;
        }
        let split = match split_standard(&sq, &zeta) {
            Ok(s) => s,
            Err(e) => return Status::Fail(format!("split of {sq} {zeta} failed: {e}")),
        };
        let SplitOutcome::Joined {
            standardization, ..
        } = &split.outcome
        else {
            continue;
        };
        joined += 1;
        let out = &standardization.standard;
        let (g, delta) = (sq.genus() as i64, sq.delta() as i64);
        let h = out.genus() as i64;
        if sq.is_orientable() {
            ensure!(
                out.is_orientable(),
                "{sq} {zeta}: orientable input, non-orientable output {out}"
            );
            ensure!(
                h == 2 * g + delta / 2 - 1,
                "{sq} {zeta}: genus {h}, expected 2g + delta/2 - 1"
            );
        } else if out.is_orientable() {
            // The cover is orientable: compare Euler genus 2h.
            flips += 1;
            ensure!(
                2 * h == 2 * g + delta - 2,
                "{sq} {zeta}: orientable genus {h}, expected Euler genus 2g + delta - 2"
            );
        } else {
            ensure!(
                h == 2 * g + delta - 2,
                "{sq} {zeta}: genus {h}, expected 2g + delta - 2"
            );
        }
        ensure!(
            matches_k_table(
                &sq.coefficient_values(),
                &out.coefficient_values(),
                !sq.is_orientable()
            ),
            "{sq} {zeta}: coefficients {:?} do not match the table",
            out.coefficient_values()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
        );
    }
    Status::Pass(format!(
        "100 joined cases ({tries} sampled): genus formulas and coefficient table hold; \
         {flips} non-orientable inputs split to orientable equations, compared by Euler genus"
    ))
}

fn criterion_7() -> Status {
    let mut r = rng(7);
    let (mut worst, mut total) = (0u32, 0u32);
    for _ in 0..100 {
        let len = r.gen_range(0..=60);
        let c = random_reduced(&mut r, len);
        let bound = contraction_bound(c.len());
        match steps_to_short(&c, bound) {
            Some(k) => {
                ensure!(k <= bound, "{c}: {k} steps exceed bound {bound}");
                worst = worst.max(k);
                total += k;
            }
            None => {
                return Status::Fail(format!("{c} does not reach length 3 within {bound} steps"))
            }
        }
    }
    Status::Pass(format!(
        "100 elements reach length <= 3; worst {worst} steps, mean {:.2}",
        total as f64 / 100.0
    ))
}

fn criterion_8() -> Status {
    let solver = Solver::new(SolverConfig::default());
    let (mut definite, mut n) = (0, 0);
    for e in corpus() {
        n += 1;
        // Confirm the recorded status independently.
        if e.expected {
            ensure!(
                corpus_witness(&e).is_some(),
                "no brute-force witness for {}",
                e.word
            );
        } else {
            let any = completions(&e.word, &e.gamma)
                .iter()
                .any(|g| e.word.gamma_eval(g).unwrap().is_identity());
            ensure!(!any, "{} is not ruled out by G/K", e.word);
        }
        let d = match solver.decide(&e.word, &e.gamma) {
            Ok(d) => d,
            Err(err) => return Status::Fail(format!("decide({}) failed: {err}", e.word)),
        };
        match d.verdict {
            Verdict::Solvable => {
                ensure!(e.expected, "{} decided solvable, known unsolvable", e.word);
                let alpha = d.witness.unwrap();
                ensure!(
                    verify(&e.word, &e.gamma, &alpha).is_ok(),
                    "witness for {} fails",
                    e.word
                );
                definite += 1;
            }
            Verdict::Unsolvable => {
                ensure!(!e.expected, "{} decided unsolvable, known solvable", e.word);
                definite += 1;
            }
            Verdict::Unknown => {}
        }
    }
    ensure!(n == 25, "corpus has {n} entries");
    ensure!(definite >= 20, "only {definite}/25 definite");
    Status::Pass(format!("{definite}/25 definite, no contradiction"))
}

fn criterion_9() -> Status {
    // Solve through the splitting pipeline so that solved leaves are recorded.
    let config = SolverConfig {
        presearch: false,
        ..SolverConfig::default()
    };
    let ledger = Arc::new(Ledger::in_memory());
    let solver = Solver::with_ledger(config.clone(), ledger.clone());
    let mut solved = 0;
    for e in corpus().into_iter().filter(|e| e.expected) {
        if solver.decide(&e.word, &e.gamma).unwrap().verdict == Verdict::Solvable {
            solved += 1;
        }
    }
    let leaves: Vec<(EquationCode, Vec<Element>)> = ledger
        .dump()
        .lines()
        .filter_map(|l| l.strip_prefix("S\t"))
        .map(|l| {
            let (code, values) = l.split_once('\t').unwrap();
            (
                code.parse().unwrap(),
                values.split_whitespace().map(el).collect(),
            )
        })
        .collect();
    ensure!(!leaves.is_empty(), "no solved leaves recorded");
    let handles: Vec<CodeIndex> = CodeIndex::all()
        .into_iter()
        .filter(|u| matches!(u, CodeIndex::Handle(..)))
        .collect();
    let mut checked = 0;
    for (code, values) in &leaves {
        // A ledger holding only this leaf: every hit below must come from its cone.
        let single = Arc::new(Ledger::in_memory());
        single
            .insert(code.clone(), LedgerEntry::Solvable(values.clone()))
            .unwrap();
        let solver = Solver::with_ledger(config.clone(), single);
        let (sq, zeta) = canonical_equation(code);
        for &u in &handles {
            let CodeIndex::Handle(g, h) = u else {
                unreachable!()
            };
            let n = u.weight();
            let (sq2, zeta2) = insert_handles(&sq, &zeta, g, h, n as usize);
            let code2 = encode(&sq2, &zeta2).unwrap();
            ensure!(
                code2 == code.plus(u, n as u32),
                "code of {sq2} is {code2}, expected {code} + {n} {u}"
            );
            let before = solver.searches();
            match solver.decide_standard(&sq2, &zeta2) {
                Ok(Outcome::Solvable {
                    witness,
                    via: Via::Cone,
                }) => {
                    ensure!(
                        verify(&sq2.render(), &zeta2, &witness).is_ok(),
                        "cone witness fails for {code2}"
                    );
                }
                Ok(Outcome::Solvable { via, .. }) => {
                    return Status::Fail(format!("{code2} solved via {via:?}"))
                }
                other => return Status::Fail(format!("{code2}: {other:?}")),
            }
            ensure!(solver.searches() == before, "{code2} triggered a search");
            checked += 1;
        }
    }
    Status::Pass(format!(
        "{solved} corpus equations solved by splitting, {} leaves x 256 handle classes = {checked} insertions, all via cone without search",
        leaves.len()
    ))
}

fn criterion_10() -> Status {
    let solver = Solver::new(SolverConfig::default());
    match width_probe(&solver, &el("abab"), 3) {
        Ok(WidthReport::Found {
            width: 1,
            exact: true,
            ..
        }) => {}
        other => return Status::Fail(format!("width([a,b]): {other:?}")),
    }
    match width_probe(&solver, &Element::identity(), 3) {
        Ok(WidthReport::Found {
            width: 0,
            exact: true,
            ..
        }) => {}
        other => return Status::Fail(format!("width(1): {other:?}")),
    }
    // Coefficients of the corpus that lie in the commutator subgroup.
    let mut elements: Vec<Element> = vec![Element::identity()];
    for e in corpus() {
        for c in e.word.constants() {
            let c = if abelianization(&c) == [0, 0, 0] {
                c
            } else {
                continue;
            };
            if !elements.iter().any(|x| equal(x, &c)) {
                elements.push(c);
            }
        }
    }
    let mut widths = Vec::new();
    for g in &elements {
        let report = width_probe(&solver, g, 2).unwrap();
        let WidthReport::Found {
            width, verdicts, ..
        } = report
        else {
            continue;
        };
        ensure!(
            verdicts[..width].iter().all(|v| *v != Verdict::Solvable),
            "{g}: solvable below the width"
        );
        for n in width + 1..=width + 2 {
            let w = grig_core::width::rn_word(n).concat(&MixedWord::constant(g.inverse()));
            let d = solver.decide(&w, &Constraint::new()).unwrap();
            ensure!(
                d.verdict != Verdict::Unsolvable,
                "{g}: solvable at n = {width} but not at n = {n}"
            );
        }
        widths.push(format!("{g}:{width}"));
    }
    Status::Pass(format!(
        "width([a,b]) = 1, width(1) = 0, monotone on {} corpus elements ({})",
        widths.len(),
        widths.join(" ")
    ))
}

fn criterion_11() -> Status {
    let parts = match theta_orbits(8) {
        Ok(p) => p,
        Err(e) => return Status::Fail(format!("theta_orbits failed: {e}")),
    };
    let counts: Vec<usize> = parts.iter().map(|p| p.classes()).collect();
    ensure!(
        counts.windows(2).all(|w| w[1] <= w[0]),
        "counts increase: {counts:?}"
    );
    let csv = theta_csv(&parts)
        .lines()
        .skip(1)
        .collect::<Vec<_>>()
        .join(" ");
    match stabilization_index(&parts) {
        Some(n) => Status::Pass(format!("class counts {csv}; stable from n = {n}")),
        None => Status::Fail(format!("no stabilization observed: {csv}")),
    }
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("relations and quotient", criterion_1),
        ("word problem vs portraits", criterion_2),
        ("orders", criterion_3),
        ("splitting main property", criterion_4),
        ("splitting reduction equivalence", criterion_5),
        ("genus formulas and coefficient table", criterion_6),
        ("coefficient contraction", criterion_7),
        ("pipeline soundness on the corpus", criterion_8),
        ("cone logic", criterion_9),
        ("width probes", criterion_10),
        ("theta saturation", criterion_11),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let status = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Status::Fail(format!("panic: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed().as_secs_f64();
        let (tag, detail) = match status {
            Status::Pass(d) => ("PASS", d),
            Status::Deviation(d) => ("DEVIATION", d),
            Status::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {tag:<9} {name} [{elapsed:.1}s]: {detail}",
            i + 1
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
