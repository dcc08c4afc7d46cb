//! Words in `G * F_X`, quadratic classification, constraints modulo `K`,
//! and the join operation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::group::Element;
use crate::quotient::{pi_k, QElement};

/// A variable identified by a base name and a descendant path.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    name: String,
    path: String,
}

impl Variable {
    pub fn new(name: impl Into<String>) -> Variable {
        Variable {
            name: name.into(),
            path: String::new(),
        }
    }

    pub fn with_path(name: impl Into<String>, path: impl Into<String>) -> Variable {
        let path = path.into();
        assert!(
            path.bytes().all(|b| b == b'0' || b == b'1'),
            "descendant path must be binary"
        );
        Variable {
            name: name.into(),
            path,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    /// The descendant `x_i`.
    pub fn descendant(&self, i: u8) -> Variable {
        let mut path = self.path.clone();
        path.push(if i == 0 { '0' } else { '1' });
        Variable {
            name: self.name.clone(),
            path,
        }
    }

    /// The variable this one descends from, if any.
    pub fn parent(&self) -> Option<Variable> {
        if self.path.is_empty() {
            None
        } else {
            Some(Variable {
                name: self.name.clone(),
                path: self.path[..self.path.len() - 1].to_string(),
            })
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}_{}", self.name, self.path)
        }
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn is_constant_token(s: &str) -> bool {
    s == "1" || (!s.is_empty() && s.bytes().all(|b| matches!(b, b'a'..=b'd')))
}

impl FromStr for Variable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variable> {
        let bad = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let mut chars = s.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return Err(bad("a variable must start with a letter")),
        }
        if !s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(bad("a variable may contain only letters, digits and '_'"));
        }
        if is_constant_token(s) {
            return Err(bad("words over a, b, c, d denote group constants"));
        }
        if let Some((name, path)) = s.rsplit_once('_') {
            if !name.is_empty() && !path.is_empty() && path.bytes().all(|b| b == b'0' || b == b'1')
            {
                return Ok(Variable::with_path(name, path));
            }
        }
        Ok(Variable::new(s))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Atom {
    Const(Element),
    Var(Variable, i8),
}

impl Atom {
    pub fn var(v: &Variable, sign: i8) -> Atom {
        debug_assert!(sign == 1 || sign == -1);
        Atom::Var(v.clone(), sign)
    }

    pub fn inverse(&self) -> Atom {
        match self {
            Atom::Const(g) => Atom::Const(g.inverse()),
            Atom::Var(v, s) => Atom::Var(v.clone(), -s),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Const(g) => write!(f, "{g}"),
            Atom::Var(v, 1) => write!(f, "{v}"),
            Atom::Var(v, _) => write!(f, "{v}^-1"),
        }
    }
}

/// A word over `G` and `X^{+-1}` with adjacent constants merged and trivial
/// constants dropped.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MixedWord {
    atoms: Vec<Atom>,
}

impl MixedWord {
    pub fn empty() -> MixedWord {
        MixedWord::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> MixedWord {
        let mut w = MixedWord::empty();
        for a in atoms {
            w.push(a);
        }
        w
    }

    pub fn constant(g: Element) -> MixedWord {
        MixedWord::from_atoms([Atom::Const(g)])
    }

    pub fn var(v: &Variable) -> MixedWord {
        MixedWord::from_atoms([Atom::var(v, 1)])
    }

    pub fn var_pow(v: &Variable, sign: i8) -> MixedWord {
        MixedWord::from_atoms([Atom::var(v, sign)])
    }

    /// `x^-1 y^-1 x y`.
    pub fn commutator(x: &Variable, y: &Variable) -> MixedWord {
        MixedWord::from_atoms([
            Atom::var(x, -1),
            Atom::var(y, -1),
            Atom::var(x, 1),
            Atom::var(y, 1),
        ])
    }

    /// `z^-1 c z`.
    pub fn conjugated(z: &Variable, c: &Element) -> MixedWord {
        MixedWord::from_atoms([Atom::var(z, -1), Atom::Const(c.clone()), Atom::var(z, 1)])
    }

    pub fn push(&mut self, atom: Atom) {
        match atom {
            Atom::Const(g) => {
                if let Some(Atom::Const(last)) = self.atoms.last_mut() {
                    *last = last.mul(&g);
                    if last.is_empty() {
                        self.atoms.pop();
                    }
                } else if !g.is_empty() {
                    self.atoms.push(Atom::Const(g));
                }
            }
            v => self.atoms.push(v),
        }
    }

    /// Pushes with free cancellation against the last atom.
    fn push_reduced(&mut self, atom: Atom) {
        if let Atom::Var(v, s) = &atom {
            if let Some(Atom::Var(w, t)) = self.atoms.last() {
                if v == w && *s == -t {
                    self.atoms.pop();
                    return;
                }
            }
        }
        self.push(atom);
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn concat(&self, other: &MixedWord) -> MixedWord {
        let mut w = self.clone();
        for a in &other.atoms {
            w.push(a.clone());
        }
        w
    }

    pub fn inverse(&self) -> MixedWord {
        MixedWord::from_atoms(self.atoms.iter().rev().map(Atom::inverse))
    }

    /// Cancels adjacent `x x^-1` pairs (merging the constants that meet).
    pub fn free_reduce(&self) -> MixedWord {
        let mut w = MixedWord::empty();
        for a in &self.atoms {
            w.push_reduced(a.clone());
            // A merge may have exposed a new cancellation.
            while w.atoms.len() >= 2 {
                let n = w.atoms.len();
                match (&w.atoms[n - 2], &w.atoms[n - 1]) {
                    (Atom::Var(v, s), Atom::Var(u, t)) if v == u && *s == -t => {
                        w.atoms.truncate(n - 2);
                    }
                    _ => break,
                }
            }
        }
        w
    }

    pub fn is_freely_trivial(&self) -> bool {
        self.free_reduce().is_empty()
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Var(v, _) => Some(v.clone()),
                Atom::Const(_) => None,
            })
            .collect()
    }

    /// Variables in order of first occurrence.
    pub fn vars_in_order(&self) -> Vec<Variable> {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Var(v, _) => Some(v.clone()),
                Atom::Const(_) => None,
            })
            .unique()
            .collect()
    }

    pub fn occurrences(&self, x: &Variable) -> Vec<(usize, i8)> {
        self.atoms
            .iter()
            .enumerate()
            .filter_map(|(i, a)| match a {
                Atom::Var(v, s) if v == x => Some((i, *s)),
                _ => None,
            })
            .collect()
    }

    pub fn occurrence_counts(&self) -> BTreeMap<Variable, (usize, usize)> {
        let mut counts: BTreeMap<Variable, (usize, usize)> = BTreeMap::new();
        for a in &self.atoms {
            if let Atom::Var(v, s) = a {
                let e = counts.entry(v.clone()).or_default();
                if *s > 0 {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        counts
    }

    pub fn is_quadratic(&self) -> bool {
        self.occurrence_counts().values().all(|&(p, n)| p + n == 2)
    }

    pub fn orientability(&self) -> Result<Orientability> {
        let counts = self.occurrence_counts();
        if let Some((v, _)) = counts.iter().find(|(_, &(p, n))| p + n != 2) {
            return Err(Error::NotQuadratic(format!(
                "{v} does not occur exactly twice in {self}"
            )));
        }
        if counts.values().all(|&(p, n)| p == 1 && n == 1) {
            Ok(Orientability::Orientable)
        } else {
            Ok(Orientability::NonOrientable)
        }
    }

    pub fn constants(&self) -> Vec<Element> {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Const(g) => Some(g.clone()),
                Atom::Var(..) => None,
            })
            .collect()
    }

    pub fn eval(&self, alpha: &Assignment) -> Result<Element> {
        let mut acc = Element::identity();
        for a in &self.atoms {
            match a {
                Atom::Const(g) => acc = acc.mul(g),
                Atom::Var(v, s) => {
                    let val = alpha
                        .get(v)
                        .ok_or_else(|| Error::MissingAssignment(v.to_string()))?;
                    acc = if *s > 0 {
                        acc.mul(val)
                    } else {
                        acc.mul(&val.inverse())
                    };
                }
            }
        }
        Ok(acc)
    }

    pub fn gamma_eval(&self, gamma: &Constraint) -> Result<QElement> {
        let mut acc = QElement::IDENTITY;
        for a in &self.atoms {
            let q = match a {
                Atom::Const(g) => pi_k(g),
                Atom::Var(v, s) => {
                    let q = gamma
                        .get(v)
                        .ok_or_else(|| Error::MissingAssignment(v.to_string()))?;
                    if *s > 0 {
                        q
                    } else {
                        q.inverse()
                    }
                }
            };
            acc = acc.mul(q);
        }
        Ok(acc)
    }

    /// `sigma_gamma(W)` as `0` (stabilizer) or `1`.
    pub fn sigma(&self, gamma: &Constraint) -> Result<u8> {
        Ok(self.gamma_eval(gamma)?.st_coset())
    }

    /// Replaces every variable by a word (missing variables are kept).
    pub fn substitute(&self, images: &BTreeMap<Variable, MixedWord>) -> MixedWord {
        let mut out = MixedWord::empty();
        for a in &self.atoms {
            match a {
                Atom::Var(v, s) => match images.get(v) {
                    Some(img) => {
                        let img = if *s > 0 { img.clone() } else { img.inverse() };
                        for b in img.atoms {
                            out.push(b);
                        }
                    }
                    None => out.push(a.clone()),
                },
                c => out.push(c.clone()),
            }
        }
        out
    }

    pub fn slice(&self, from: usize, to: usize) -> MixedWord {
        MixedWord::from_atoms(self.atoms[from..to].iter().cloned())
    }
}

impl fmt::Display for MixedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("1");
        }
        write!(f, "{}", self.atoms.iter().join(" "))
    }
}

impl fmt::Debug for MixedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MixedWord({self})")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Orientability {
    Orientable,
    NonOrientable,
}

pub type Assignment = BTreeMap<Variable, Element>;

/// A finite map from variables to `G/K`.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Constraint {
    map: BTreeMap<Variable, QElement>,
}

impl Constraint {
    pub fn new() -> Constraint {
        Constraint::default()
    }

    pub fn get(&self, v: &Variable) -> Option<QElement> {
        self.map.get(v).copied()
    }

    pub fn set(&mut self, v: Variable, q: QElement) {
        self.map.insert(v, q);
    }

    pub fn contains(&self, v: &Variable) -> bool {
        self.map.contains_key(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &QElement)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Variable>) -> Constraint {
        vars.into_iter()
            .filter_map(|v| self.get(v).map(|q| (v.clone(), q)))
            .collect()
    }

    pub fn covers(&self, w: &MixedWord) -> bool {
        w.vars().iter().all(|v| self.contains(v))
    }

    /// Value with the identity as default.
    pub fn value_or_identity(&self, v: &Variable) -> QElement {
        self.get(v).unwrap_or(QElement::IDENTITY)
    }

    pub fn satisfied_by(&self, alpha: &Assignment) -> bool {
        self.map
            .iter()
            .all(|(v, &q)| alpha.get(v).is_some_and(|g| pi_k(g) == q))
    }

    pub fn merged(&self, other: &Constraint) -> Result<Constraint> {
        let mut out = self.clone();
        for (v, &q) in &other.map {
            match out.get(v) {
                Some(p) if p != q => {
                    return Err(Error::Constraint(format!(
                        "conflicting values for {v}: {p} and {q}"
                    )));
                }
                _ => out.set(v.clone(), q),
            }
        }
        Ok(out)
    }
}

impl FromIterator<(Variable, QElement)> for Constraint {
    fn from_iter<I: IntoIterator<Item = (Variable, QElement)>>(iter: I) -> Self {
        Constraint {
            map: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{{}}}",
            self.map.iter().map(|(v, q)| format!("{v}={q}")).join(", ")
        )
    }
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `W1 #_x W2 = U1 (V2 U2)^(-e1 e2) V1`.
pub fn join(w1: &MixedWord, w2: &MixedWord, x: &Variable) -> Result<MixedWord> {
    let single = |w: &MixedWord, which: &str| -> Result<(usize, i8)> {
        match w.occurrences(x).as_slice() {
            [occ] => Ok(*occ),
            occ => Err(Error::Join {
                var: x.to_string(),
                reason: format!("occurs {} times in the {which} word", occ.len()),
            }),
        }
    };
    let (i1, e1) = single(w1, "first")?;
    let (i2, e2) = single(w2, "second")?;
    let u1 = w1.slice(0, i1);
    let v1 = w1.slice(i1 + 1, w1.len());
    let u2 = w2.slice(0, i2);
    let v2 = w2.slice(i2 + 1, w2.len());
    let mid = v2.concat(&u2);
    let mid = if e1 * e2 > 0 { mid.inverse() } else { mid };
    Ok(u1.concat(&mid).concat(&v1))
}

/// Join of constrained equations; requires `gamma(W1) = gamma(W2) = 1`.
pub fn join_constrained(
    w1: &MixedWord,
    w2: &MixedWord,
    x: &Variable,
    gamma: &Constraint,
) -> Result<(MixedWord, Constraint)> {
    for w in [w1, w2] {
        let g = w.gamma_eval(gamma)?;
        if !g.is_identity() {
            return Err(Error::Constraint(format!(
                "gamma({w}) = {g} is not trivial"
            )));
        }
    }
    let joined = join(w1, w2, x)?;
    let restricted = gamma.restrict(&joined.vars());
    Ok((joined, restricted))
}

/// A standard quadratic word
/// `[x1,y1]...[xg,yg] z1^-1 c1 z1 ... zm^-1 cm zm` or
/// `x1^2...xg^2 z1^-1 c1 z1 ... zm^-1 cm zm`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StandardQuadratic {
    pub handles: Vec<(Variable, Variable)>,
    pub squares: Vec<Variable>,
    pub coefficients: Vec<(Variable, Element)>,
}

impl StandardQuadratic {
    pub fn orientable(
        handles: Vec<(Variable, Variable)>,
        coefficients: Vec<(Variable, Element)>,
    ) -> Self {
        StandardQuadratic {
            handles,
            squares: Vec::new(),
            coefficients,
        }
    }

    pub fn non_orientable(squares: Vec<Variable>, coefficients: Vec<(Variable, Element)>) -> Self {
        assert!(
            !squares.is_empty(),
            "a non-orientable standard word has positive genus"
        );
        StandardQuadratic {
            handles: Vec::new(),
            squares,
            coefficients,
        }
    }

    pub fn is_orientable(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn genus(&self) -> usize {
        if self.is_orientable() {
            self.handles.len()
        } else {
            self.squares.len()
        }
    }

    pub fn coefficient_values(&self) -> Vec<Element> {
        self.coefficients.iter().map(|(_, c)| c.clone()).collect()
    }

    /// Number of coefficients outside `St(1)`.
    pub fn delta(&self) -> usize {
        self.coefficients
            .iter()
            .filter(|(_, c)| !c.in_st1())
            .count()
    }

    pub fn vars(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        for (x, y) in &self.handles {
            out.push(x.clone());
            out.push(y.clone());
        }
        out.extend(self.squares.iter().cloned());
        out.extend(self.coefficients.iter().map(|(z, _)| z.clone()));
        out
    }

    pub fn render(&self) -> MixedWord {
        let mut w = MixedWord::empty();
        for (x, y) in &self.handles {
            w = w.concat(&MixedWord::commutator(x, y));
        }
        for x in &self.squares {
            w.push(Atom::var(x, 1));
            w.push(Atom::var(x, 1));
        }
        for (z, c) in &self.coefficients {
            w = w.concat(&MixedWord::conjugated(z, c));
        }
        w
    }

    /// Recognizes a word that already has the standard shape.
    pub fn from_word(w: &MixedWord) -> Option<StandardQuadratic> {
        let atoms = w.atoms();
        let mut i = 0;
        let mut handles = Vec::new();
        let mut squares = Vec::new();
        let mut coefficients = Vec::new();
        let var_at = |j: usize, sign: i8| -> Option<&Variable> {
            match atoms.get(j) {
                Some(Atom::Var(v, s)) if *s == sign => Some(v),
                _ => None,
            }
        };
        loop {
            if let (Some(x), Some(y), Some(x2), Some(y2)) = (
                var_at(i, -1),
                var_at(i + 1, -1),
                var_at(i + 2, 1),
                var_at(i + 3, 1),
            ) {
                if x == x2 && y == y2 && x != y && squares.is_empty() {
                    handles.push((x.clone(), y.clone()));
                    i += 4;
                    continue;
                }
            }
            if let (Some(x), Some(x2)) = (var_at(i, 1), var_at(i + 1, 1)) {
                if x == x2 && handles.is_empty() {
                    squares.push(x.clone());
                    i += 2;
                    continue;
                }
            }
            break;
        }
        while i < atoms.len() {
            match (var_at(i, -1), atoms.get(i + 1), var_at(i + 2, 1)) {
                (Some(z), Some(Atom::Const(c)), Some(z2)) if z == z2 => {
                    coefficients.push((z.clone(), c.clone()));
                    i += 3;
                }
                _ => return None,
            }
        }
        let q = StandardQuadratic {
            handles,
            squares,
            coefficients,
        };
        let vars = q.vars();
        if vars.iter().unique().count() != vars.len() {
            return None;
        }
        Some(q)
    }
}

impl fmt::Display for StandardQuadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (x, y) in &self.handles {
            parts.push(format!("[{x},{y}]"));
        }
        for x in &self.squares {
            parts.push(format!("{x}^2"));
        }
        for (z, c) in &self.coefficients {
            parts.push(format!("{z}^-1 {c} {z}"));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

fn parse_factor(tok: &str) -> Result<MixedWord> {
    let bad = |reason: &str| Error::Parse {
        input: tok.to_string(),
        reason: reason.to_string(),
    };
    let (base, exp) = match tok.rfind('^') {
        Some(p) if !tok[p..].contains(']') => {
            let e: i32 = tok[p + 1..]
                .parse()
                .map_err(|_| bad("exponent must be an integer"))?;
            (&tok[..p], e)
        }
        _ => (tok, 1),
    };
    if base.is_empty() {
        return Err(bad("empty factor"));
    }
    let w = if let Some(inner) = base.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| bad("unbalanced commutator bracket"))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(bad("a commutator has exactly two entries"));
        }
        let u = parse_factor(parts[0].trim())?;
        let v = parse_factor(parts[1].trim())?;
        u.inverse().concat(&v.inverse()).concat(&u).concat(&v)
    } else if is_constant_token(base) {
        MixedWord::constant(base.parse()?)
    } else {
        MixedWord::var(&base.parse()?)
    };
    let unit = if exp < 0 { w.inverse() } else { w };
    let mut out = MixedWord::empty();
    for _ in 0..exp.unsigned_abs() {
        out = out.concat(&unit);
    }
    Ok(out)
}

/// Splits on whitespace except inside brackets.
fn tokens(s: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse {
                input: s.to_string(),
                reason: "unbalanced ']'".into(),
            });
        }
        if ch.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else if !ch.is_whitespace() {
            cur.push(ch);
        }
    }
    if depth != 0 {
        return Err(Error::Parse {
            input: s.to_string(),
            reason: "unbalanced '['".into(),
        });
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

impl FromStr for MixedWord {
    type Err = Error;

    /// Accepts `lhs` or `lhs = rhs` (read as `lhs rhs^-1`).
    fn from_str(s: &str) -> Result<MixedWord> {
        let sides: Vec<&str> = s.split('=').collect();
        let side = |t: &str| -> Result<MixedWord> {
            tokens(t)?.iter().try_fold(MixedWord::empty(), |acc, tok| {
                Ok(acc.concat(&parse_factor(tok)?))
            })
        };
        match sides.as_slice() {
            [lhs] => side(lhs),
            [lhs, rhs] => Ok(side(lhs)?.concat(&side(rhs)?.inverse())),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "more than one '='".into(),
            }),
        }
    }
}

/// Parses `var = element` lines (comments start with `#`).
pub fn parse_constraint_lines<'a>(lines: impl IntoIterator<Item = &'a str>) -> Result<Constraint> {
    let mut gamma = Constraint::new();
    for line in lines {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (v, q) = line.split_once('=').ok_or_else(|| Error::Parse {
            input: line.to_string(),
            reason: "expected 'var = element'".into(),
        })?;
        let v: Variable = v.trim().parse()?;
        let q = QElement::parse_name(q.trim())?;
        if gamma.get(&v).is_some_and(|p| p != q) {
            return Err(Error::Parse {
                input: line.to_string(),
                reason: format!("{v} constrained twice"),
            });
        }
        gamma.set(v, q);
    }
    Ok(gamma)
}

/// An equation file: the first non-comment line is the equation, the
/// remaining lines are constraints.
pub fn parse_equation_file(text: &str) -> Result<(MixedWord, Constraint)> {
    let mut lines = text.lines().filter(|l| {
        let t = l.split('#').next().unwrap_or("").trim();
        !t.is_empty()
    });
    let first = lines.next().ok_or_else(|| Error::Parse {
        input: text.to_string(),
        reason: "no equation".into(),
    })?;
    let w: MixedWord = first.split('#').next().unwrap_or("").trim().parse()?;
    let gamma = parse_constraint_lines(lines)?;
    let vars = w.vars();
    if let Some(v) = gamma.iter().map(|(v, _)| v).find(|v| !vars.contains(*v)) {
        return Err(Error::Parse {
            input: v.to_string(),
            reason: "constrained variable does not occur".into(),
        });
    }
    Ok((w, gamma))
}
