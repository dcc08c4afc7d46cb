//! The splitting operator `Psi` on constrained words and the splitting of
//! standard quadratic equations.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;

use crate::equation::{join, Assignment, Atom, Constraint, MixedWord, StandardQuadratic, Variable};
use crate::error::{Error, Result};
use crate::group::{equal, psi_preimage, shorten, Element, Generator};
use crate::quotient::{PsiImageTable, QElement};
use crate::standard::{gamma_ext, to_standard, Standardization};

/// `(Psi_0(W), Psi_1(W))` relative to `gamma`.
pub fn split_word(w: &MixedWord, gamma: &Constraint) -> Result<(MixedWord, MixedWord)> {
    let mut out = [MixedWord::empty(), MixedWord::empty()];
    let mut p = 0u8;
    for atom in w.atoms() {
        match atom {
            Atom::Const(u) => {
                let ub = u.bar();
                for (i, o) in out.iter_mut().enumerate() {
                    o.push(Atom::Const(ub.psi_component(i as u8 ^ p)?));
                }
                p ^= u.a_parity();
            }
            Atom::Var(x, s) => {
                let sx = gamma
                    .get(x)
                    .ok_or_else(|| Error::MissingAssignment(x.to_string()))?
                    .st_coset();
                if *s < 0 {
                    p ^= sx;
                }
                for (i, o) in out.iter_mut().enumerate() {
                    o.push(Atom::var(&x.descendant(i as u8 ^ p), *s));
                }
                if *s > 0 {
                    p ^= sx;
                }
            }
        }
    }
    let [w0, w1] = out;
    Ok((w0, w1))
}

/// `alpha_*(x_i) = psi_i(bar(alpha(x)))`.
pub fn induced_solution(alpha: &Assignment) -> Assignment {
    let mut out = Assignment::new();
    for (x, g) in alpha {
        let (g0, g1) = g.bar().psi().expect("bar lies in the stabilizer");
        out.insert(x.descendant(0), g0);
        out.insert(x.descendant(1), g1);
    }
    out
}

/// The family `V_{W,gamma}` over both descendants of every variable in
/// `vars`, produced lazily.
pub fn constraint_family(
    vars: &[Variable],
    gamma: &Constraint,
) -> Result<Box<dyn Iterator<Item = Constraint>>> {
    let table = PsiImageTable::global();
    let mut fibers = Vec::with_capacity(vars.len());
    for x in vars {
        let q = gamma
            .get(x)
            .ok_or_else(|| Error::MissingAssignment(x.to_string()))?;
        fibers.push((x.clone(), table.fiber(q.bar()).to_vec()));
    }
    if fibers.is_empty() {
        return Ok(Box::new(std::iter::once(Constraint::new())));
    }
    let names: Vec<Variable> = fibers.iter().map(|(x, _)| x.clone()).collect();
    let iter = fibers
        .into_iter()
        .map(|(_, f)| f)
        .multi_cartesian_product()
        .map(move |choice| {
            let mut zeta = Constraint::new();
            for (x, (q0, q1)) in names.iter().zip(choice) {
                zeta.set(x.descendant(0), q0);
                zeta.set(x.descendant(1), q1);
            }
            zeta
        });
    Ok(Box::new(iter))
}

/// The system produced by the splitting reduction.
pub struct SplitSystem {
    pub words: [MixedWord; 2],
    vars: Vec<Variable>,
    gamma: Constraint,
}

impl SplitSystem {
    /// Family members with `zeta(Psi_0 W) = zeta(Psi_1 W) = 1`.
    pub fn branches(&self) -> impl Iterator<Item = Constraint> + '_ {
        constraint_family(&self.vars, &self.gamma)
            .expect("constraint covers the word")
            .filter(move |z| {
                gamma_ext(&self.words[0], z).is_identity()
                    && gamma_ext(&self.words[1], z).is_identity()
            })
    }
}

pub enum SplitReduction {
    /// `sigma_gamma(W) != 1` or `gamma(W) != 1`.
    Pruned(String),
    Systems(SplitSystem),
}

pub fn split_reduction(w: &MixedWord, gamma: &Constraint) -> Result<SplitReduction> {
    let g = w.gamma_eval(gamma)?;
    if g.st_coset() != 0 {
        return Ok(SplitReduction::Pruned(format!("sigma({w}) is nontrivial")));
    }
    if !g.is_identity() {
        return Ok(SplitReduction::Pruned(format!("gamma({w}) = {g}")));
    }
    let (w0, w1) = split_word(w, gamma)?;
    Ok(SplitReduction::Systems(SplitSystem {
        words: [w0.free_reduce(), w1.free_reduce()],
        vars: w.vars().into_iter().collect(),
        gamma: gamma.clone(),
    }))
}

/// Expected coefficient images: both nontrivial `psi_i(c)` for `c` in the
/// stabilizer, otherwise the two orderings of `psi_0(ca) psi_1(ca)`.
pub fn k_table(c: &Element) -> Vec<Element> {
    if c.in_st1() {
        let (c0, c1) = c.psi().expect("stabilizer element");
        vec![c0, c1]
    } else {
        let (c0, c1) = c.bar().psi().expect("bar lies in the stabilizer");
        vec![c0.mul(&c1), c1.mul(&c0)]
    }
}

/// Whether `out` is the nontrivial part of one choice from the table: both
/// images of every stabilizer coefficient and one product per other one.
/// With `up_to_inverse` a coefficient may also appear inverted, as squares
/// allow in non-orientable words.
pub fn matches_k_table(input: &[Element], out: &[Element], up_to_inverse: bool) -> bool {
    let same = |x: &Element, y: &Element| equal(x, y) || (up_to_inverse && equal(x, &y.inverse()));
    let mut expected: Vec<Element> = Vec::new();
    let mut choices: Vec<[Element; 2]> = Vec::new();
    for c in input {
        let k = k_table(c);
        if c.in_st1() {
            expected.extend(k.into_iter().filter(|e| !e.is_empty()));
        } else if !equal(&k[0], &Element::identity()) {
            choices.push([k[0].clone(), k[1].clone()]);
        }
    }
    let mut remaining: Vec<Element> = out.to_vec();
    for e in &expected {
        match remaining.iter().position(|r| same(r, e)) {
            Some(i) => {
                remaining.remove(i);
            }
            None => return false,
        }
    }
    if remaining.len() != choices.len() {
        return false;
    }
    // Match the free choices greedily by trying every assignment order.
    fn assign(
        remaining: &mut Vec<Element>,
        choices: &[[Element; 2]],
        same: &dyn Fn(&Element, &Element) -> bool,
    ) -> bool {
        let Some((first, rest)) = choices.split_first() else {
            return remaining.is_empty();
        };
        for i in 0..remaining.len() {
            if first.iter().any(|opt| same(opt, &remaining[i])) {
                let taken = remaining.remove(i);
                if assign(remaining, rest, same) {
                    return true;
                }
                remaining.insert(i, taken);
            }
        }
        false
    }
    assign(&mut remaining, &choices, &same)
}

#[derive(Clone, Debug)]
pub struct DisjointBranch {
    pub constraints: [Constraint; 2],
    /// The family member this branch was restricted from.
    pub family_member: Constraint,
}

#[derive(Clone, Debug)]
pub struct JoinedBranch {
    pub constraint: Constraint,
    pub family_member: Constraint,
    /// The family member transported along the normalization trail.
    pub transported: Constraint,
}

#[derive(Clone, Debug)]
pub enum SplitOutcome {
    Disjoint {
        parts: [StandardQuadratic; 2],
        branches: Vec<DisjointBranch>,
    },
    Joined {
        join_var: Variable,
        joined: MixedWord,
        standardization: Standardization,
        branches: Vec<JoinedBranch>,
    },
}

/// Human-readable account of one splitting step.
#[derive(Clone, Debug, Default)]
pub struct SplitTrace {
    pub case: String,
    pub rows: Vec<String>,
    pub genus: String,
}

impl fmt::Display for SplitTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case: {}", self.case)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        writeln!(f, "  genus: {}", self.genus)
    }
}

#[derive(Clone, Debug)]
pub struct Split {
    pub input: StandardQuadratic,
    pub gamma: Constraint,
    pub words: [MixedWord; 2],
    pub outcome: SplitOutcome,
    pub trace: SplitTrace,
}

fn sigma_of(gamma: &Constraint, v: &Variable) -> u8 {
    gamma.value_or_identity(v).st_coset()
}

fn block_rows(q: &StandardQuadratic, gamma: &Constraint) -> Result<Vec<String>> {
    let mut rows = Vec::new();
    let mut blocks: Vec<(String, MixedWord)> = Vec::new();
    for (x, y) in &q.handles {
        blocks.push((
            format!(
                "[{x},{y}] sigma=({},{})",
                sigma_of(gamma, x),
                sigma_of(gamma, y)
            ),
            MixedWord::commutator(x, y),
        ));
    }
    for x in &q.squares {
        blocks.push((
            format!("{x}^2 sigma={}", sigma_of(gamma, x)),
            MixedWord::from_atoms([Atom::var(x, 1), Atom::var(x, 1)]),
        ));
    }
    for (z, c) in &q.coefficients {
        blocks.push((
            format!(
                "{z}^-1 {c} {z} sigma={} c in St: {}",
                sigma_of(gamma, z),
                c.in_st1()
            ),
            MixedWord::conjugated(z, c),
        ));
    }
    let mut prefix = 0u8;
    for (label, w) in blocks {
        let (w0, w1) = split_word(&w, gamma)?;
        let (w0, w1) = if prefix == 0 { (w0, w1) } else { (w1, w0) };
        rows.push(format!("{label}: Psi0 -> {w0} | Psi1 -> {w1}"));
        prefix ^= w.sigma(gamma)?;
    }
    Ok(rows)
}

/// Splits a constrained standard quadratic equation with `sigma(Q) = 1`.
pub fn split_standard(q: &StandardQuadratic, gamma: &Constraint) -> Result<Split> {
    let word = q.render();
    if word.sigma(gamma)? != 0 {
        return Err(Error::Split(format!("sigma({q}) is nontrivial")));
    }
    let (w0, w1) = split_word(&word, gamma)?;
    let (w0, w1) = (w0.free_reduce(), w1.free_reduce());
    let vars: Vec<Variable> = word.vars().into_iter().collect();
    let v0 = w0.vars();
    let v1 = w1.vars();
    let shared: BTreeSet<&Variable> = v0.intersection(&v1).collect();
    let mut trace = SplitTrace {
        rows: block_rows(q, gamma)?,
        ..SplitTrace::default()
    };
    let family = || -> Result<Box<dyn Iterator<Item = Constraint>>> {
        let f = constraint_family(&vars, gamma)?;
        let (a, b) = (w0.clone(), w1.clone());
        Ok(Box::new(f.filter(move |z| {
            gamma_ext(&a, z).is_identity() && gamma_ext(&b, z).is_identity()
        })))
    };
    let outcome = if shared.is_empty() {
        let parse = |w: &MixedWord| {
            StandardQuadratic::from_word(w)
                .ok_or_else(|| Error::Internal(format!("split half {w} is not standard")))
        };
        let parts = [parse(&w0)?, parse(&w1)?];
        let mut seen = HashSet::new();
        let mut branches = Vec::new();
        for z in family()? {
            let constraints = [z.restrict(&v0), z.restrict(&v1)];
            if seen.insert(constraints.clone()) {
                branches.push(DisjointBranch {
                    constraints,
                    family_member: z,
                });
            }
        }
        trace.case = "disjoint".into();
        trace.genus = format!(
            "g={} -> two halves of genus {} and {}",
            q.genus(),
            parts[0].genus(),
            parts[1].genus()
        );
        SplitOutcome::Disjoint { parts, branches }
    } else {
        let delta = q.delta();
        if delta % 2 == 1 {
            return Err(Error::Split(format!(
                "delta({q}) = {delta} is odd although sigma(Q) = 1"
            )));
        }
        let x = (*shared.iter().next().expect("non-empty")).clone();
        let joined = join(&w0, &w1, &x)?.free_reduce();
        let standardization = to_standard(&joined)?;
        let r_vars = standardization.standard.vars();
        let mut seen = HashSet::new();
        let mut branches = Vec::new();
        for z in family()? {
            let transported = standardization.automorphism.transport(&z);
            let constraint = transported.restrict(&r_vars);
            if seen.insert(constraint.clone()) {
                branches.push(JoinedBranch {
                    constraint,
                    family_member: z,
                    transported,
                });
            }
        }
        let g = q.genus();
        let h = standardization.standard.genus();
        trace.case = format!("joined on {x}");
        trace.genus = if q.is_orientable() {
            format!(
                "g={g} delta={delta} -> h={h} (2g + delta/2 - 1 = {})",
                (2 * g + delta / 2) as i64 - 1
            )
        } else {
            format!(
                "g={g} delta={delta} -> h={h} (2g + delta - 2 = {})",
                (2 * g + delta) as i64 - 2
            )
        };
        SplitOutcome::Joined {
            join_var: x,
            joined,
            standardization,
            branches,
        }
    };
    Ok(Split {
        input: q.clone(),
        gamma: gamma.clone(),
        words: [w0, w1],
        outcome,
        trace,
    })
}

/// Lifts values of descendants back to the variables of `vars`.
pub fn lift_descendants(
    vars: &[Variable],
    gamma: &Constraint,
    beta: &Assignment,
    family_member: &Constraint,
) -> Result<Assignment> {
    let a = Element::generator(Generator::A);
    let mut out = Assignment::new();
    for x in vars {
        let value = |i: u8| -> Element {
            let d = x.descendant(i);
            beta.get(&d)
                .cloned()
                .unwrap_or_else(|| family_member.value_or_identity(&d).representative().clone())
        };
        let h = psi_preimage(&value(0), &value(1))?;
        let q = gamma
            .get(x)
            .ok_or_else(|| Error::MissingAssignment(x.to_string()))?;
        out.insert(
            x.clone(),
            shorten(&if q.st_coset() == 0 { h } else { h.mul(&a) }),
        );
    }
    Ok(out)
}

impl Split {
    /// Original-variable solution from solutions of the two halves.
    pub fn lift_disjoint(
        &self,
        branch: &DisjointBranch,
        sol: [&Assignment; 2],
    ) -> Result<Assignment> {
        let mut beta = sol[0].clone();
        beta.extend(sol[1].iter().map(|(k, v)| (k.clone(), v.clone())));
        lift_descendants(
            &self.input.vars(),
            &self.gamma,
            &beta,
            &branch.family_member,
        )
    }

    /// Original-variable solution from a solution of the joined standard word.
    pub fn lift_joined(&self, branch: &JoinedBranch, sol: &Assignment) -> Result<Assignment> {
        let SplitOutcome::Joined {
            join_var,
            joined,
            standardization,
            ..
        } = &self.outcome
        else {
            return Err(Error::Invalid("not a joined split".into()));
        };
        let mut beta =
            standardization
                .automorphism
                .pullback(&joined.vars(), sol, &branch.transported)?;
        // x from the second half: U2 x^e V2 = 1 gives x = (V2 U2)^-e.
        let w1 = &self.words[1];
        let (i, e) = w1.occurrences(join_var)[0];
        let u2 = w1.slice(0, i);
        let v2 = w1.slice(i + 1, w1.len());
        let mut vx = v2.concat(&u2).eval(&beta)?;
        if e > 0 {
            vx = vx.inverse();
        }
        beta.insert(join_var.clone(), vx);
        lift_descendants(
            &self.input.vars(),
            &self.gamma,
            &beta,
            &branch.family_member,
        )
    }
}

/// `zeta` values of both descendants, for inspection.
pub fn descendant_pair(zeta: &Constraint, x: &Variable) -> (QElement, QElement) {
    (
        zeta.value_or_identity(&x.descendant(0)),
        zeta.value_or_identity(&x.descendant(1)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::pi_k;

    fn w(s: &str) -> MixedWord {
        s.parse().unwrap()
    }

    fn v(s: &str) -> Variable {
        s.parse().unwrap()
    }

    fn q(s: &str) -> QElement {
        pi_k(&s.parse().unwrap())
    }

    #[test]
    fn constant_split() {
        let (w0, w1) = split_word(&w("b"), &Constraint::new()).unwrap();
        assert_eq!((w0, w1), (w("a"), w("c")));
    }

    #[test]
    fn commutator_block() {
        let gamma: Constraint = [(v("x"), q("b")), (v("y"), q("d"))].into_iter().collect();
        let (w0, _) = split_word(&w("[x,y]"), &gamma).unwrap();
        assert_eq!(w0, w("x_0^-1 y_0^-1 x_0 y_0"));
        let gamma: Constraint = [(v("x"), q("a")), (v("y"), q("b"))].into_iter().collect();
        let (w0, w1) = split_word(&w("[x,y]"), &gamma).unwrap();
        assert_eq!(w0, w("x_1^-1 y_1^-1 x_1 y_0"));
        assert_eq!(w1, w("x_0^-1 y_0^-1 x_0 y_1"));
    }

    #[test]
    fn family_sizes() {
        let gamma: Constraint = [(v("x"), q("b"))].into_iter().collect();
        let fam: Vec<_> = constraint_family(&[v("x")], &gamma).unwrap().collect();
        assert_eq!(fam.len(), PsiImageTable::global().fiber(q("b")).len());
        assert_eq!(constraint_family(&[], &gamma).unwrap().count(), 1);
    }

    #[test]
    fn disjoint_commutator() {
        let q0 = StandardQuadratic::orientable(vec![(v("x"), v("y"))], vec![]);
        let gamma: Constraint = [(v("x"), q("b")), (v("y"), q("1"))].into_iter().collect();
        let s = split_standard(&q0, &gamma).unwrap();
        match s.outcome {
            SplitOutcome::Disjoint { parts, .. } => assert!(parts.iter().all(|p| p.genus() == 1)),
            _ => panic!("expected disjoint case"),
        }
    }

    #[test]
    fn joined_genus() {
        let ab: Element = "ab".parse().unwrap();
        let q0 = StandardQuadratic::orientable(
            vec![(v("x"), v("y"))],
            vec![(v("z1"), ab.clone()), (v("z2"), ab.clone())],
        );
        let gamma: Constraint = [
            (v("x"), q("1")),
            (v("y"), q("1")),
            (v("z1"), q("1")),
            (v("z2"), q("1")),
        ]
        .into_iter()
        .collect();
        let s = split_standard(&q0, &gamma).unwrap();
        match &s.outcome {
            SplitOutcome::Joined {
                standardization, ..
            } => {
                assert_eq!(standardization.standard.genus(), 2);
                assert!(matches_k_table(
                    &[ab.clone(), ab],
                    &standardization.standard.coefficient_values(),
                    false
                ));
            }
            _ => panic!("expected joined case"),
        }
    }
}
