//! Substitution automorphisms of `G * F_X`, reduction of quadratic words to
//! standard form, constraint transport and the factor ordering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::equation::{Assignment, Atom, Constraint, MixedWord, StandardQuadratic, Variable};
use crate::error::{Error, Result};
use crate::group::{shorten, Element};
use crate::quotient::{pi_k, QElement};

/// `v -> A v^e B` where neither `A` nor `B` contains `v`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ElementarySubstitution {
    pub var: Variable,
    pub left: MixedWord,
    pub sign: i8,
    pub right: MixedWord,
}

impl ElementarySubstitution {
    pub fn new(var: Variable, left: MixedWord, sign: i8, right: MixedWord) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::Invalid(format!("exponent {sign} in a substitution")));
        }
        if left.vars().contains(&var) || right.vars().contains(&var) {
            return Err(Error::Invalid(format!(
                "{var} occurs in its own substitution context"
            )));
        }
        Ok(ElementarySubstitution {
            var,
            left,
            sign,
            right,
        })
    }

    fn make(var: &Variable, left: MixedWord, sign: i8, right: MixedWord) -> Self {
        Self::new(var.clone(), left, sign, right).expect("well-formed elementary substitution")
    }

    /// `v -> P^-1 v P`.
    pub fn conjugation(var: &Variable, p: &MixedWord) -> Self {
        Self::make(var, p.inverse(), 1, p.clone())
    }

    /// `v -> v^-1`.
    pub fn inversion(var: &Variable) -> Self {
        Self::make(var, MixedWord::empty(), -1, MixedWord::empty())
    }

    pub fn left_mult(var: &Variable, p: &MixedWord) -> Self {
        Self::make(var, p.clone(), 1, MixedWord::empty())
    }

    pub fn right_mult(var: &Variable, p: &MixedWord) -> Self {
        Self::make(var, MixedWord::empty(), 1, p.clone())
    }

    pub fn image(&self) -> MixedWord {
        self.left
            .concat(&MixedWord::var_pow(&self.var, self.sign))
            .concat(&self.right)
    }

    pub fn inverse(&self) -> Self {
        if self.sign > 0 {
            Self::make(&self.var, self.left.inverse(), 1, self.right.inverse())
        } else {
            Self::make(&self.var, self.right.clone(), -1, self.left.clone())
        }
    }

    pub fn apply(&self, w: &MixedWord) -> MixedWord {
        let images = BTreeMap::from([(self.var.clone(), self.image())]);
        w.substitute(&images).free_reduce()
    }

    /// Updates `gamma` to `gamma . s^-1`, extending by the identity.
    pub fn transport(&self, gamma: &mut Constraint) {
        for u in self.left.vars().into_iter().chain(self.right.vars()) {
            if !gamma.contains(&u) {
                gamma.set(u, QElement::IDENTITY);
            }
        }
        let a = gamma_ext(&self.left, gamma);
        let b = gamma_ext(&self.right, gamma);
        let v = gamma.value_or_identity(&self.var);
        let inner = a.inverse().mul(v).mul(b.inverse());
        gamma.set(
            self.var.clone(),
            if self.sign > 0 {
                inner
            } else {
                inner.inverse()
            },
        );
    }
}

impl fmt::Display for ElementarySubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.var, self.image())
    }
}

/// `gamma` on a word, with unassigned variables sent to the identity.
pub fn gamma_ext(w: &MixedWord, gamma: &Constraint) -> QElement {
    w.atoms().iter().fold(QElement::IDENTITY, |acc, a| {
        let q = match a {
            Atom::Const(g) => pi_k(g),
            Atom::Var(v, 1) => gamma.value_or_identity(v),
            Atom::Var(v, _) => gamma.value_or_identity(v).inverse(),
        };
        acc.mul(q)
    })
}

/// A finitely supported `G`-automorphism stored as elementary substitutions
/// applied left to right.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct SubstitutionAutomorphism {
    steps: Vec<ElementarySubstitution>,
}

impl SubstitutionAutomorphism {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<ElementarySubstitution>) -> Self {
        SubstitutionAutomorphism { steps }
    }

    pub fn push(&mut self, s: ElementarySubstitution) {
        self.steps.push(s);
    }

    pub fn steps(&self) -> &[ElementarySubstitution] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &SubstitutionAutomorphism) -> Self {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        SubstitutionAutomorphism { steps }
    }

    pub fn inverse(&self) -> Self {
        SubstitutionAutomorphism {
            steps: self.steps.iter().rev().map(|s| s.inverse()).collect(),
        }
    }

    pub fn apply(&self, w: &MixedWord) -> MixedWord {
        self.steps
            .iter()
            .fold(w.free_reduce(), |acc, s| s.apply(&acc))
    }

    /// `gamma . phi^-1` on every variable the trail mentions.
    pub fn transport(&self, gamma: &Constraint) -> Constraint {
        let mut out = gamma.clone();
        for s in &self.steps {
            s.transport(&mut out);
        }
        out
    }

    /// Turns a solution `beta` of the image equation into `beta . phi` on
    /// `vars`. Variables `beta` leaves open take the transversal value of
    /// their transported constraint.
    pub fn pullback<'a>(
        &self,
        vars: impl IntoIterator<Item = &'a Variable>,
        beta: &Assignment,
        full_constraint: &Constraint,
    ) -> Result<Assignment> {
        let mut out = Assignment::new();
        for v in vars {
            let img = self.apply(&MixedWord::var(v));
            let mut ext = beta.clone();
            for u in img.vars() {
                ext.entry(u.clone()).or_insert_with(|| {
                    full_constraint
                        .value_or_identity(&u)
                        .representative()
                        .clone()
                });
            }
            out.insert(v.clone(), shorten(&img.eval(&ext)?));
        }
        Ok(out)
    }

    /// One `var -> word` line per step.
    pub fn trace(&self) -> String {
        self.steps.iter().map(|s| format!("{s}\n")).collect()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Block {
    Handle(Variable, Variable),
    Square(Variable),
    Coef(Variable, Element),
}

impl Block {
    fn render(&self) -> MixedWord {
        match self {
            Block::Handle(x, y) => MixedWord::commutator(x, y),
            Block::Square(x) => MixedWord::from_atoms([Atom::var(x, 1), Atom::var(x, 1)]),
            Block::Coef(z, c) => MixedWord::conjugated(z, c),
        }
    }

    fn vars(&self) -> Vec<&Variable> {
        match self {
            Block::Handle(x, y) => vec![x, y],
            Block::Square(x) => vec![x],
            Block::Coef(z, _) => vec![z],
        }
    }
}

/// Output of the standardization: `phi(Q) = T^-1 R T` in the free product.
#[derive(Clone, Debug)]
pub struct Standardization {
    pub standard: StandardQuadratic,
    pub automorphism: SubstitutionAutomorphism,
    pub conjugator: MixedWord,
}

impl Standardization {
    /// `T^-1 R T` as a reduced word.
    pub fn conjugated_render(&self) -> MixedWord {
        self.conjugator
            .inverse()
            .concat(&self.standard.render())
            .concat(&self.conjugator)
            .free_reduce()
    }
}

struct Collector {
    left: Vec<Block>,
    active: MixedWord,
    right: Vec<Block>,
    phi: SubstitutionAutomorphism,
}

impl Collector {
    fn sub(&mut self, s: ElementarySubstitution) {
        self.active = s.apply(&self.active);
        self.phi.push(s);
    }

    /// The block occupying `active[at..at+len]` moves to the end of `left`.
    fn collect_left(&mut self, at: usize, len: usize, block: Block) {
        let u = self.active.slice(0, at);
        let rest = self.active.slice(at + len, self.active.len());
        if !u.is_empty() {
            for v in block.vars() {
                self.phi.push(ElementarySubstitution::conjugation(v, &u));
            }
        }
        self.active = u.concat(&rest).free_reduce();
        self.left.push(block);
    }

    /// The coefficient block at `active[at..at+3]` moves to the front of `right`.
    fn collect_right(&mut self, at: usize, z: Variable, c: Element) {
        let u = self.active.slice(0, at);
        let v = self.active.slice(at + 3, self.active.len());
        if !v.is_empty() {
            self.phi
                .push(ElementarySubstitution::right_mult(&z, &v.inverse()));
        }
        self.active = u.concat(&v).free_reduce();
        self.right.insert(0, Block::Coef(z, c));
    }

    fn positions(&self) -> BTreeMap<Variable, Vec<(usize, i8)>> {
        let mut pos: BTreeMap<Variable, Vec<(usize, i8)>> = BTreeMap::new();
        for (i, a) in self.active.atoms().iter().enumerate() {
            if let Atom::Var(v, s) = a {
                pos.entry(v.clone()).or_default().push((i, *s));
            }
        }
        pos
    }

    fn step(&mut self) -> Result<bool> {
        let pos = self.positions();
        if pos.is_empty() {
            return Ok(false);
        }
        let mut by_first: Vec<(&Variable, &Vec<(usize, i8)>)> = pos.iter().collect();
        by_first.sort_by_key(|(_, occ)| occ[0].0);
        for (v, occ) in &by_first {
            if occ.len() != 2 {
                return Err(Error::NotQuadratic(format!(
                    "{v} occurs {} times",
                    occ.len()
                )));
            }
        }
        if let Some((x, occ)) = by_first.iter().find(|(_, occ)| occ[0].1 == occ[1].1) {
            let x = (*x).clone();
            if occ[0].1 < 0 {
                self.sub(ElementarySubstitution::inversion(&x));
            }
            self.same_sign(&x);
            return Ok(true);
        }
        for (x, ox) in &by_first {
            let (i1, i2) = (ox[0].0, ox[1].0);
            let linked = by_first
                .iter()
                .find(|(_, oy)| i1 < oy[0].0 && oy[0].0 < i2 && oy[1].0 > i2);
            if let Some((y, _)) = linked {
                let (x, y) = ((*x).clone(), (*y).clone());
                self.linked(&x, &y);
                return Ok(true);
            }
        }
        let (x, ox) = by_first
            .iter()
            .filter(|(_, o)| {
                !self.active.atoms()[o[0].0 + 1..o[1].0]
                    .iter()
                    .any(|a| matches!(a, Atom::Var(..)))
            })
            .min_by_key(|(_, o)| o[1].0 - o[0].0)
            .ok_or_else(|| Error::Internal("no innermost pair in an unlinked word".into()))?;
        let x = (*x).clone();
        if ox[0].1 > 0 {
            self.sub(ElementarySubstitution::inversion(&x));
        }
        let at = self.active.occurrences(&x)[0].0;
        let c = match &self.active.atoms()[at + 1] {
            Atom::Const(c) => c.clone(),
            _ => return Err(Error::Internal("free reduction left an empty pair".into())),
        };
        self.collect_right(at, x, c);
        Ok(true)
    }

    /// `U x V x W -> U x x V^-1 W`, then collect `x^2`.
    fn same_sign(&mut self, x: &Variable) {
        let occ = self.active.occurrences(x);
        let v = self.active.slice(occ[0].0 + 1, occ[1].0);
        if !v.is_empty() {
            self.sub(ElementarySubstitution::right_mult(x, &v.inverse()));
        }
        let at = self.active.occurrences(x)[0].0;
        self.collect_left(at, 2, Block::Square(x.clone()));
    }

    /// `A x^-1 B y^-1 C x D y E -> A D' [x,y] E`, then collect `[x,y]`.
    fn linked(&mut self, x: &Variable, y: &Variable) {
        if self.active.occurrences(x)[0].1 > 0 {
            self.sub(ElementarySubstitution::inversion(x));
        }
        if self.active.occurrences(y)[0].1 > 0 {
            self.sub(ElementarySubstitution::inversion(y));
        }
        let ox = self.active.occurrences(x);
        let oy = self.active.occurrences(y);
        let b = self.active.slice(ox[0].0 + 1, oy[0].0);
        if !b.is_empty() {
            self.sub(ElementarySubstitution::left_mult(x, &b));
        }
        let ox = self.active.occurrences(x);
        let oy = self.active.occurrences(y);
        // After the first move: A x^-1 y^-1 C' x D y E.
        let c = self.active.slice(oy[0].0 + 1, ox[1].0);
        if !c.is_empty() {
            self.sub(ElementarySubstitution::left_mult(y, &c));
        }
        let ox = self.active.occurrences(x);
        let oy = self.active.occurrences(y);
        let d = self.active.slice(ox[1].0 + 1, oy[1].0);
        if !d.is_empty() {
            self.sub(ElementarySubstitution::right_mult(x, &d.inverse()));
        }
        let at = self.active.occurrences(x)[0].0;
        debug_assert_eq!(self.active.slice(at, at + 4), MixedWord::commutator(x, y));
        self.collect_left(at, 4, Block::Handle(x.clone(), y.clone()));
    }

    /// Moves the left block at `from` to position `to < from` inside `left`.
    fn move_left_block(&mut self, from: usize, to: usize) {
        let between: MixedWord = self.left[to..from]
            .iter()
            .fold(MixedWord::empty(), |acc, b| acc.concat(&b.render()));
        let block = self.left.remove(from);
        for v in block.vars() {
            self.phi
                .push(ElementarySubstitution::conjugation(v, &between));
        }
        self.left.insert(to, block);
    }

    /// Replaces `x x [y,z]` at `left[i..i+2]` by `x x z z y y`.
    fn handle_to_squares(&mut self, i: usize) {
        let x = match &self.left[i] {
            Block::Square(x) => x.clone(),
            _ => unreachable!("square expected"),
        };
        let (y, z) = match &self.left[i + 1] {
            Block::Handle(y, z) => (y.clone(), z.clone()),
            _ => unreachable!("handle expected"),
        };
        let vx = MixedWord::var(&x);
        let vy = MixedWord::var(&y);
        let vz = MixedWord::var(&z);
        let yyzz = vy.concat(&vy).concat(&vz).concat(&vz);
        let steps = [
            ElementarySubstitution::right_mult(&x, &vy),
            ElementarySubstitution::right_mult(&y, &vz.concat(&vx.inverse())),
            ElementarySubstitution::right_mult(&z, &vx),
            ElementarySubstitution::right_mult(&x, &yyzz.inverse()),
            ElementarySubstitution::inversion(&z),
            ElementarySubstitution::inversion(&y),
        ];
        for s in steps {
            self.phi.push(s);
        }
        self.left.splice(
            i..i + 2,
            [Block::Square(x), Block::Square(z), Block::Square(y)],
        );
    }
}

fn fresh_variable(used: &BTreeSet<String>, base: &str) -> Variable {
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|n| !used.contains(n))
        .map(Variable::new)
        .expect("unbounded supply of names")
}

/// Reduces a quadratic word to standard form with an automorphism trail.
pub fn to_standard(q: &MixedWord) -> Result<Standardization> {
    if !q.is_quadratic() {
        return Err(Error::NotQuadratic(q.to_string()));
    }
    let mut col = Collector {
        left: Vec::new(),
        active: q.free_reduce(),
        right: Vec::new(),
        phi: SubstitutionAutomorphism::identity(),
    };
    while col.step()? {}
    let c0 = col
        .active
        .constants()
        .into_iter()
        .fold(Element::identity(), |a, c| a.mul(&c));

    // Non-orientable: every handle becomes two squares next to a square.
    if col.left.iter().any(|b| matches!(b, Block::Square(_))) {
        while let Some(h) = col.left.iter().position(|b| matches!(b, Block::Handle(..))) {
            let s = col
                .left
                .iter()
                .position(|b| matches!(b, Block::Square(_)))
                .expect("a square exists");
            if s > h {
                col.move_left_block(s, h);
                col.handle_to_squares(h);
            } else {
                col.move_left_block(h, s + 1);
                col.handle_to_squares(s);
            }
        }
    } else {
        debug_assert!(col.left.iter().all(|b| matches!(b, Block::Handle(..))));
    }

    let mut conjugator = MixedWord::empty();
    if !c0.is_empty() {
        let used: BTreeSet<String> = q
            .vars()
            .iter()
            .chain(col.phi.steps().iter().flat_map(|s| std::iter::once(&s.var)))
            .map(|v| v.name().to_string())
            .collect();
        let z1 = fresh_variable(&used, "z");
        let vz = MixedWord::var(&z1);
        for b in &col.left {
            for v in b.vars() {
                col.phi
                    .push(ElementarySubstitution::make(v, vz.clone(), 1, vz.inverse()));
            }
        }
        for b in &col.right {
            for v in b.vars() {
                col.phi
                    .push(ElementarySubstitution::right_mult(v, &vz.inverse()));
            }
        }
        col.right.insert(0, Block::Coef(z1.clone(), c0));
        conjugator = vz.inverse();
    }
    let mut handles = Vec::new();
    let mut squares = Vec::new();
    for b in col.left {
        match b {
            Block::Handle(x, y) => handles.push((x, y)),
            Block::Square(x) => squares.push(x),
            Block::Coef(..) => unreachable!("coefficients are collected on the right"),
        }
    }
    let coefficients = col
        .right
        .into_iter()
        .map(|b| match b {
            Block::Coef(z, c) => (z, c),
            _ => unreachable!("only coefficients are collected on the right"),
        })
        .collect();
    Ok(Standardization {
        standard: StandardQuadratic {
            handles,
            squares,
            coefficients,
        },
        automorphism: col.phi,
        conjugator,
    })
}

/// Sort key of a coefficient: shortlex on its reduced word.
pub fn coefficient_key(c: &Element) -> (usize, String) {
    (c.len(), c.to_string())
}

/// Result of the factor ordering.
#[derive(Clone, Debug)]
pub struct OrderedForm {
    pub standard: StandardQuadratic,
    pub constraint: Constraint,
    pub automorphism: SubstitutionAutomorphism,
    /// Number of adjacent swaps performed.
    pub swaps: usize,
}

/// Applies the swap automorphisms until both chains are non-decreasing.
pub fn ordered_form(q: &StandardQuadratic, gamma: &Constraint) -> Result<OrderedForm> {
    for v in q.vars() {
        if !gamma.contains(&v) {
            return Err(Error::MissingAssignment(v.to_string()));
        }
    }
    let mut q = q.clone();
    let mut zeta = gamma.clone();
    let mut phi = SubstitutionAutomorphism::identity();
    let mut swaps = 0;
    let key_h = |z: &Constraint, (x, y): &(Variable, Variable)| {
        (z.value_or_identity(x), z.value_or_identity(y))
    };
    while let Some(i) = (0..q.handles.len().saturating_sub(1))
        .find(|&i| key_h(&zeta, &q.handles[i + 1]) < key_h(&zeta, &q.handles[i]))
    {
        let (x2, y2) = q.handles[i + 1].clone();
        let c = MixedWord::commutator(&x2, &y2);
        let (x1, y1) = q.handles[i].clone();
        for v in [&x1, &y1] {
            let s = ElementarySubstitution::make(v, c.clone(), 1, c.inverse());
            s.transport(&mut zeta);
            phi.push(s);
        }
        q.handles.swap(i, i + 1);
        swaps += 1;
    }
    while let Some(i) = (0..q.squares.len().saturating_sub(1)).find(|&i| {
        zeta.value_or_identity(&q.squares[i + 1]) < zeta.value_or_identity(&q.squares[i])
    }) {
        let x2 = MixedWord::var(&q.squares[i + 1]);
        let sq = x2.concat(&x2);
        let s = ElementarySubstitution::make(&q.squares[i], sq.clone(), 1, sq.inverse());
        s.transport(&mut zeta);
        phi.push(s);
        q.squares.swap(i, i + 1);
        swaps += 1;
    }
    let key_c =
        |z: &Constraint, (v, c): &(Variable, Element)| (coefficient_key(c), z.value_or_identity(v));
    while let Some(i) = (0..q.coefficients.len().saturating_sub(1))
        .find(|&i| key_c(&zeta, &q.coefficients[i + 1]) < key_c(&zeta, &q.coefficients[i]))
    {
        let (z2, c2) = q.coefficients[i + 1].clone();
        let tail = MixedWord::conjugated(&z2, &c2.inverse());
        let s = ElementarySubstitution::right_mult(&q.coefficients[i].0, &tail);
        s.transport(&mut zeta);
        phi.push(s);
        q.coefficients.swap(i, i + 1);
        swaps += 1;
    }
    let constraint = zeta.restrict(&q.vars());
    Ok(OrderedForm {
        standard: q,
        constraint,
        automorphism: phi,
        swaps,
    })
}

/// Whether both ordering chains hold literally.
pub fn is_ordered(q: &StandardQuadratic, zeta: &Constraint) -> bool {
    let hk: Vec<_> = q
        .handles
        .iter()
        .map(|(x, y)| (zeta.value_or_identity(x), zeta.value_or_identity(y)))
        .collect();
    let sk: Vec<_> = q
        .squares
        .iter()
        .map(|x| zeta.value_or_identity(x))
        .collect();
    let ck: Vec<_> = q
        .coefficients
        .iter()
        .map(|(z, c)| (coefficient_key(c), zeta.value_or_identity(z)))
        .collect();
    hk.windows(2).all(|w| w[0] <= w[1])
        && sk.windows(2).all(|w| w[0] <= w[1])
        && ck.windows(2).all(|w| w[0] <= w[1])
}

/// Standardization of a constrained quadratic equation.
#[derive(Clone, Debug)]
pub struct ConstrainedStandard {
    pub standardization: Standardization,
    /// Constraint on the variables of the standard word.
    pub constraint: Constraint,
    /// Transported constraint on every variable the trail mentions.
    pub full_constraint: Constraint,
}

pub fn standardize_constrained(q: &MixedWord, gamma: &Constraint) -> Result<ConstrainedStandard> {
    let st = to_standard(q)?;
    let full = st.automorphism.transport(gamma);
    let constraint = full.restrict(&st.standard.vars());
    Ok(ConstrainedStandard {
        standardization: st,
        constraint,
        full_constraint: full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> MixedWord {
        s.parse().unwrap()
    }

    fn v(s: &str) -> Variable {
        s.parse().unwrap()
    }

    fn check(q: &str) -> Standardization {
        let q = w(q);
        let st = to_standard(&q).unwrap();
        assert_eq!(
            st.automorphism.apply(&q),
            st.conjugated_render(),
            "invariant for {q}"
        );
        st
    }

    #[test]
    fn elementary_inverse() {
        let s = ElementarySubstitution::new(v("x"), w("y b"), -1, w("z")).unwrap();
        let word = w("x c x^-1 y");
        assert_eq!(s.inverse().apply(&s.apply(&word)), word.free_reduce());
        assert!(ElementarySubstitution::new(v("x"), w("x"), 1, w("")).is_err());
    }

    #[test]
    fn move_coefficient_right() {
        let s = ElementarySubstitution::right_mult(&v("z"), &w("y b").inverse());
        assert_eq!(s.apply(&w("x z^-1 ab z y b")), w("x y b z^-1 ab z"));
    }

    #[test]
    fn transport_of_right_mult() {
        let s = ElementarySubstitution::right_mult(&v("z"), &w("ab").inverse());
        let mut g: Constraint = [(v("z"), pi_k(&"b".parse().unwrap()))]
            .into_iter()
            .collect();
        s.transport(&mut g);
        let expect = pi_k(&"b".parse().unwrap()).mul(pi_k(&"ab".parse().unwrap()));
        assert_eq!(g.get(&v("z")), Some(expect));
    }

    #[test]
    fn standard_examples() {
        let st = check("[x,y]");
        assert_eq!(st.standard.genus(), 1);
        assert!(st.automorphism.is_empty());
        let st = check("x x y y z z");
        assert_eq!(
            (st.standard.genus(), st.standard.is_orientable()),
            (3, false)
        );
        let st = check("x x [y,z]");
        assert_eq!(
            (st.standard.genus(), st.standard.is_orientable()),
            (3, false)
        );
        let st = check("x ab y x^-1 c y^-1 d");
        assert!(st.standard.is_orientable());
        let st = check("x b x^-1 y c y^-1 ada");
        assert_eq!(st.standard.coefficients.len(), 3);
        check("x y x y");
        check("x a y^-1 b x^-1 c y d");
        check("abc");
        check("1");
    }

    #[test]
    fn ordering_sorts_coefficients() {
        let q = StandardQuadratic::orientable(
            vec![],
            vec![
                (v("z1"), "ab".parse().unwrap()),
                (v("z2"), "b".parse().unwrap()),
            ],
        );
        let g: Constraint = [(v("z1"), QElement::IDENTITY), (v("z2"), QElement::IDENTITY)]
            .into_iter()
            .collect();
        let o = ordered_form(&q, &g).unwrap();
        assert_eq!(o.swaps, 1);
        assert!(is_ordered(&o.standard, &o.constraint));
        assert_eq!(o.automorphism.apply(&q.render()), o.standard.render());
    }
}
