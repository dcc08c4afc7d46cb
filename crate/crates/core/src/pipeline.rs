//! Equation codes, the solvability ledger and the decision procedure for
//! constrained quadratic equations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use rayon::prelude::*;

use crate::equation::{Assignment, Constraint, MixedWord, StandardQuadratic, Variable};
use crate::error::{Error, Result};
use crate::group::{ball, equal, is_trivial, order, Element};
use crate::quotient::{pi_k, QElement};
use crate::split::{k_table, split_standard, SplitOutcome};
use crate::standard::{ordered_form, to_standard, OrderedForm};

/// Coefficients of reduced length at most this are short.
pub const SHORT_LEN: usize = 3;

/// `M(n) = 200 + ceil(log_1.22 max(1, n - 200))` for a coefficient of length `n`.
pub fn contraction_bound(len: usize) -> u32 {
    let excess = len.saturating_sub(200).max(1) as f64;
    200 + (excess.ln() / 1.22f64.ln()).ceil() as u32
}

/// Worst case, over all branches of the coefficient map, of the number of
/// steps until `c` becomes short. `None` if some branch exceeds `cap`.
pub fn steps_to_short(c: &Element, cap: u32) -> Option<u32> {
    fn go(c: &Element, cap: u32, memo: &mut HashMap<Element, Option<u32>>) -> Option<u32> {
        if ShortSet::global().index_of(c).is_some() {
            return Some(0);
        }
        if cap == 0 {
            return None;
        }
        if let Some(&hit) = memo.get(c) {
            return hit;
        }
        let mut worst = 0;
        let mut result = None;
        for next in k_table(c) {
            match go(&next, cap - 1, memo) {
                Some(s) => worst = worst.max(s + 1),
                None => {
                    worst = u32::MAX;
                    break;
                }
            }
        }
        if worst != u32::MAX {
            result = Some(worst);
        }
        memo.insert(c.clone(), result);
        result
    }
    go(c, cap, &mut HashMap::new())
}

/// The 23 elements of reduced length at most 3, in shortlex order.
pub struct ShortSet {
    elements: Vec<Element>,
}

impl ShortSet {
    pub fn global() -> &'static ShortSet {
        static SET: OnceLock<ShortSet> = OnceLock::new();
        SET.get_or_init(|| ShortSet {
            elements: ball(SHORT_LEN),
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    /// Index of the member equal to `g` in the group.
    pub fn index_of(&self, g: &Element) -> Option<usize> {
        if g.len() <= SHORT_LEN {
            if let Some(i) = self.elements.iter().position(|s| s == g) {
                return Some(i);
            }
        }
        let q = pi_k(g);
        self.elements
            .iter()
            .position(|s| pi_k(s) == q && equal(s, g))
    }
}

/// Coordinates of the code of an ordered equation. The derived order matches
/// the block order of ordered equations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CodeIndex {
    Handle(QElement, QElement),
    Square(QElement),
    /// Short coefficient (index into [`ShortSet`]) and the class of its conjugator.
    Coefficient(usize, QElement),
}

impl CodeIndex {
    /// Number of variables in one block.
    pub fn arity(self) -> usize {
        match self {
            CodeIndex::Handle(..) => 2,
            _ => 1,
        }
    }

    /// Transversal values of one padding block.
    pub fn padding(self) -> Vec<Element> {
        match self {
            CodeIndex::Handle(g, h) => vec![g.representative().clone(), h.representative().clone()],
            CodeIndex::Square(g) | CodeIndex::Coefficient(_, g) => vec![g.representative().clone()],
        }
    }

    /// Cone weight `n_u`: the number of padding blocks whose product is trivial.
    pub fn weight(self) -> u64 {
        static WEIGHTS: OnceLock<Mutex<HashMap<CodeIndex, u64>>> = OnceLock::new();
        let cache = WEIGHTS.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(&w) = cache.lock().unwrap().get(&self) {
            return w;
        }
        let w = match self {
            CodeIndex::Handle(g, h) => {
                let (g, h) = (g.representative(), h.representative());
                order(&g.inverse().mul(&h.inverse()).mul(g).mul(h))
            }
            CodeIndex::Square(g) => order(&g.representative().pow(2)),
            CodeIndex::Coefficient(s, _) => order(ShortSet::global().get(s)),
        };
        cache.lock().unwrap().insert(self, w);
        w
    }

    /// Every coordinate: 256 handles, 16 squares, 23 * 16 coefficients.
    pub fn all() -> Vec<CodeIndex> {
        let classes: Vec<QElement> = QElement::all().collect();
        let mut out = Vec::new();
        for (&g, &h) in classes.iter().cartesian_product(classes.iter()) {
            out.push(CodeIndex::Handle(g, h));
        }
        out.extend(classes.iter().map(|&g| CodeIndex::Square(g)));
        for s in 0..ShortSet::global().len() {
            out.extend(classes.iter().map(|&g| CodeIndex::Coefficient(s, g)));
        }
        out
    }
}

impl fmt::Display for CodeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeIndex::Handle(g, h) => write!(f, "h:{},{}", g.name(), h.name()),
            CodeIndex::Square(g) => write!(f, "x:{}", g.name()),
            CodeIndex::Coefficient(s, g) => {
                write!(f, "c:{},{}", ShortSet::global().get(*s), g.name())
            }
        }
    }
}

impl FromStr for CodeIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let parts: Vec<&str> = rest.split(',').collect();
        match (kind, parts.as_slice()) {
            ("h", [g, h]) => Ok(CodeIndex::Handle(
                QElement::parse_name(g)?,
                QElement::parse_name(h)?,
            )),
            ("x", [g]) => Ok(CodeIndex::Square(QElement::parse_name(g)?)),
            ("c", [c, g]) => {
                let c: Element = c.parse()?;
                let i = ShortSet::global()
                    .index_of(&c)
                    .ok_or_else(|| bad("coefficient is not short"))?;
                Ok(CodeIndex::Coefficient(i, QElement::parse_name(g)?))
            }
            _ => Err(bad("unknown coordinate")),
        }
    }
}

/// Sparse multiplicity vector of an ordered equation.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct EquationCode {
    counts: BTreeMap<CodeIndex, u32>,
}

impl EquationCode {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, u: CodeIndex) -> u32 {
        self.counts.get(&u).copied().unwrap_or(0)
    }

    pub fn add(&mut self, u: CodeIndex, n: u32) {
        if n > 0 {
            *self.counts.entry(u).or_insert(0) += n;
        }
    }

    pub fn plus(&self, u: CodeIndex, n: u32) -> EquationCode {
        let mut out = self.clone();
        out.add(u, n);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (CodeIndex, u32)> + '_ {
        self.counts.iter().map(|(&u, &n)| (u, n))
    }

    /// Number of coordinates with nonzero count.
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    /// Whether `self - other` is a non-negative combination of cone weights.
    pub fn dominates(&self, other: &EquationCode) -> bool {
        other.counts.keys().all(|u| self.counts.contains_key(u))
            && self.iter().all(|(u, n)| {
                let m = other.get(u);
                m <= n && ((n - m) as u64).is_multiple_of(u.weight())
            })
    }
}

impl fmt::Display for EquationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return write!(f, "0");
        }
        write!(
            f,
            "{}",
            self.iter().map(|(u, n)| format!("{u}={n}")).join(" ")
        )
    }
}

impl FromStr for EquationCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut code = EquationCode::new();
        let s = s.trim();
        if s == "0" {
            return Ok(code);
        }
        for tok in s.split_whitespace() {
            let (u, n) = tok.rsplit_once('=').ok_or_else(|| Error::Parse {
                input: tok.to_string(),
                reason: "expected coordinate=count".into(),
            })?;
            let n: u32 = n.parse().map_err(|_| Error::Parse {
                input: tok.to_string(),
                reason: "bad count".into(),
            })?;
            code.add(u.parse()?, n);
        }
        Ok(code)
    }
}

/// Code of an ordered equation whose coefficients are literal members of
/// the short set.
pub fn encode(q: &StandardQuadratic, zeta: &Constraint) -> Result<EquationCode> {
    let mut code = EquationCode::new();
    let get = |v: &Variable| {
        zeta.get(v)
            .ok_or_else(|| Error::MissingAssignment(v.to_string()))
    };
    for (x, y) in &q.handles {
        code.add(CodeIndex::Handle(get(x)?, get(y)?), 1);
    }
    for x in &q.squares {
        code.add(CodeIndex::Square(get(x)?), 1);
    }
    let short = ShortSet::global();
    for (z, c) in &q.coefficients {
        let i = short
            .elements()
            .iter()
            .position(|s| s == c)
            .ok_or_else(|| Error::Invalid(format!("coefficient {c} is not a short word")))?;
        code.add(CodeIndex::Coefficient(i, get(z)?), 1);
    }
    Ok(code)
}

/// The ordered equation with variables `x_i, y_i, z_i` whose code is `code`.
pub fn canonical_equation(code: &EquationCode) -> (StandardQuadratic, Constraint) {
    let mut q = StandardQuadratic {
        handles: Vec::new(),
        squares: Vec::new(),
        coefficients: Vec::new(),
    };
    let mut zeta = Constraint::new();
    let (mut nh, mut nz) = (0, 0);
    for (u, n) in code.iter() {
        for _ in 0..n {
            match u {
                CodeIndex::Handle(g, h) => {
                    nh += 1;
                    let (x, y) = (
                        Variable::new(format!("x{nh}")),
                        Variable::new(format!("y{nh}")),
                    );
                    zeta.set(x.clone(), g);
                    zeta.set(y.clone(), h);
                    q.handles.push((x, y));
                }
                CodeIndex::Square(g) => {
                    nh += 1;
                    let x = Variable::new(format!("x{nh}"));
                    zeta.set(x.clone(), g);
                    q.squares.push(x);
                }
                CodeIndex::Coefficient(s, g) => {
                    nz += 1;
                    let z = Variable::new(format!("z{nz}"));
                    zeta.set(z.clone(), g);
                    q.coefficients.push((z, ShortSet::global().get(s).clone()));
                }
            }
        }
    }
    (q, zeta)
}

/// Witness of `code` obtained from a witness of `ancestor` by appending
/// padding blocks after the ancestor's blocks of each coordinate.
pub fn expand_witness(
    ancestor: &EquationCode,
    witness: &[Element],
    code: &EquationCode,
) -> Result<Vec<Element>> {
    if !code.dominates(ancestor) {
        return Err(Error::Invalid(format!(
            "{code} is not in the cone of {ancestor}"
        )));
    }
    let mut source = witness.iter();
    let mut out = Vec::new();
    for (u, n) in code.iter() {
        let keep = ancestor.get(u);
        for _ in 0..keep * u.arity() as u32 {
            out.push(
                source
                    .next()
                    .ok_or_else(|| Error::Invalid("ancestor witness is too short".into()))?
                    .clone(),
            );
        }
        for _ in keep..n {
            out.extend(u.padding());
        }
    }
    Ok(out)
}

/// Inserts `r` handles with classes `(g, h)` at the position that keeps the
/// handle chain ordered. New variables are named `p{k}`, `q{k}`.
pub fn insert_handles(
    q: &StandardQuadratic,
    zeta: &Constraint,
    g: QElement,
    h: QElement,
    r: usize,
) -> (StandardQuadratic, Constraint) {
    let mut q = q.clone();
    let mut zeta = zeta.clone();
    let at = q
        .handles
        .iter()
        .position(|(x, y)| (zeta.value_or_identity(x), zeta.value_or_identity(y)) > (g, h))
        .unwrap_or(q.handles.len());
    let used: Vec<String> = q.vars().iter().map(|v| v.to_string()).collect();
    let mut k = 0;
    let mut fresh = |base: &str| loop {
        k += 1;
        let name = format!("{base}{k}");
        if !used.contains(&name) {
            return Variable::new(name);
        }
    };
    let mut new = Vec::new();
    for _ in 0..r {
        let (x, y) = (fresh("p"), fresh("q"));
        zeta.set(x.clone(), g);
        zeta.set(y.clone(), h);
        new.push((x, y));
    }
    q.handles.splice(at..at, new);
    (q, zeta)
}

/// An upward-closed subset of `N^k`, stored by its minimal elements.
#[derive(Clone, Debug, Default)]
pub struct UpwardClosedSet {
    minimal: Vec<Vec<u32>>,
}

fn leq(a: &[u32], b: &[u32]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y)
}

impl UpwardClosedSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.minimal.iter().any(|m| leq(m, v))
    }

    /// Adds the up-set of `v`; returns whether the set grew.
    pub fn insert(&mut self, v: Vec<u32>) -> bool {
        if self.contains(&v) {
            return false;
        }
        self.minimal.retain(|m| !leq(&v, m));
        self.minimal.push(v);
        true
    }

    pub fn minimal(&self) -> &[Vec<u32>] {
        &self.minimal
    }
}

fn cached_ball(max_len: usize) -> Arc<Vec<Element>> {
    static BALLS: OnceLock<Mutex<HashMap<usize, Arc<Vec<Element>>>>> = OnceLock::new();
    let cache = BALLS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&max_len) {
        return b.clone();
    }
    let b = Arc::new(ball(max_len));
    cache.lock().unwrap().insert(max_len, b.clone());
    b
}

/// Number of distinct elements of reduced length at most `max_len`.
pub fn ball_size(max_len: usize) -> usize {
    cached_ball(max_len).len()
}

/// First solution (in shortlex order of the value tuples) with every value
/// of reduced length at most `max_len` and satisfying `gamma` where defined.
pub fn brute_force(w: &MixedWord, gamma: &Constraint, max_len: usize) -> Option<Assignment> {
    let ball = cached_ball(max_len);
    let vars: Vec<Variable> = w.vars().into_iter().collect();
    let candidates: Vec<Vec<&Element>> = vars
        .iter()
        .map(|v| match gamma.get(v) {
            Some(q) => ball.iter().filter(|g| pi_k(g) == q).collect(),
            None => ball.iter().collect(),
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    if vars.is_empty() {
        return is_trivial(&w.eval(&Assignment::new()).ok()?).then(Assignment::new);
    }
    candidates
        .into_iter()
        .multi_cartesian_product()
        .find_map(|choice| {
            let alpha: Assignment = vars
                .iter()
                .cloned()
                .zip(choice.into_iter().cloned())
                .collect();
            let value = w.eval(&alpha).ok()?;
            is_trivial(&value).then_some(alpha)
        })
}

/// Ledger record for one code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LedgerEntry {
    /// Values of the canonical equation's variables in block order.
    Solvable(Vec<Element>),
    /// Brute force found nothing up to this length.
    Unknown(usize),
}

/// Result of a ledger query.
#[derive(Clone, Debug)]
pub enum Lookup {
    Exact(Vec<Element>),
    Cone {
        ancestor: EquationCode,
        witness: Vec<Element>,
    },
    Unknown(usize),
    Miss,
}

/// Candidate limit for the enumerative cone lookup before falling back to
/// a scan of the solvable entries.
const CONE_ENUMERATION_LIMIT: u64 = 1 << 16;

/// Thread-safe store of classified codes with optional line-oriented
/// persistence (`S<TAB>code<TAB>values` or `U<TAB>code<TAB>max_len`).
#[derive(Default)]
pub struct Ledger {
    entries: Mutex<HashMap<EquationCode, LedgerEntry>>,
    path: Option<PathBuf>,
}

impl Ledger {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads `path` if it exists; later inserts are appended to it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        if path.exists() {
            let text = std::fs::read_to_string(&path)?;
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                let (code, entry) = parse_ledger_line(line)?;
                merge_entry(&mut entries, code, entry);
            }
        }
        Ok(Ledger {
            entries: Mutex::new(entries),
            path: Some(path),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, code: &EquationCode) -> Option<LedgerEntry> {
        self.entries.lock().unwrap().get(code).cloned()
    }

    /// Exact hit, then a solvable code in the lattice cone below `code`.
    pub fn lookup(&self, code: &EquationCode) -> Lookup {
        let entries = self.entries.lock().unwrap();
        match entries.get(code) {
            Some(LedgerEntry::Solvable(w)) => return Lookup::Exact(w.clone()),
            Some(LedgerEntry::Unknown(n)) => {
                return match cone_search(&entries, code) {
                    Some((ancestor, witness)) => Lookup::Cone { ancestor, witness },
                    None => Lookup::Unknown(*n),
                }
            }
            None => {}
        }
        match cone_search(&entries, code) {
            Some((ancestor, witness)) => Lookup::Cone { ancestor, witness },
            None => Lookup::Miss,
        }
    }

    /// Records a classification. Solvable entries are checked against the
    /// canonical equation and the upward closure along every cone generator
    /// is asserted.
    pub fn insert(&self, code: EquationCode, entry: LedgerEntry) -> Result<()> {
        if let LedgerEntry::Solvable(w) = &entry {
            let (q, zeta) = canonical_equation(&code);
            let vars = q.vars();
            if vars.len() != w.len() {
                return Err(Error::Internal(format!(
                    "witness for {code} has {} values",
                    w.len()
                )));
            }
            let alpha: Assignment = vars.into_iter().zip(w.iter().cloned()).collect();
            if !is_trivial(&q.render().eval(&alpha)?) || !zeta.satisfied_by(&alpha) {
                return Err(Error::Internal(format!(
                    "rejected ledger witness for {code}"
                )));
            }
        }
        {
            let mut entries = self.entries.lock().unwrap();
            merge_entry(&mut entries, code.clone(), entry.clone());
            if matches!(entry, LedgerEntry::Solvable(_)) {
                for u in CodeIndex::all() {
                    let up = code.plus(u, u.weight() as u32);
                    assert!(
                        cone_search(&entries, &up).is_some(),
                        "ledger is not upward closed at {up}"
                    );
                }
            }
        }
        if let Some(path) = &self.path {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(f, "{}", ledger_line(&code, &entry))?;
        }
        Ok(())
    }

    /// All entries as persistence lines, sorted.
    pub fn dump(&self) -> String {
        let entries = self.entries.lock().unwrap();
        entries
            .iter()
            .map(|(c, e)| ledger_line(c, e))
            .sorted()
            .map(|l| l + "\n")
            .collect()
    }
}

fn merge_entry(
    entries: &mut HashMap<EquationCode, LedgerEntry>,
    code: EquationCode,
    entry: LedgerEntry,
) {
    match (entries.get(&code), &entry) {
        (Some(LedgerEntry::Solvable(_)), _) => {}
        (Some(LedgerEntry::Unknown(old)), LedgerEntry::Unknown(new)) if old >= new => {}
        _ => {
            entries.insert(code, entry);
        }
    }
}

fn ledger_line(code: &EquationCode, entry: &LedgerEntry) -> String {
    match entry {
        LedgerEntry::Solvable(w) => format!("S\t{code}\t{}", w.iter().join(" ")),
        LedgerEntry::Unknown(n) => format!("U\t{code}\t{n}"),
    }
}

fn parse_ledger_line(line: &str) -> Result<(EquationCode, LedgerEntry)> {
    let bad = |reason: &str| Error::Parse {
        input: line.to_string(),
        reason: reason.to_string(),
    };
    let fields: Vec<&str> = line.split('\t').collect();
    let [kind, code, rest] = fields.as_slice() else {
        return Err(bad("expected three tab-separated fields"));
    };
    let code: EquationCode = code.parse()?;
    let entry = match *kind {
        "S" => LedgerEntry::Solvable(
            rest.split_whitespace()
                .map(str::parse)
                .collect::<Result<_>>()?,
        ),
        "U" => LedgerEntry::Unknown(rest.trim().parse().map_err(|_| bad("bad length"))?),
        _ => return Err(bad("unknown entry kind")),
    };
    Ok((code, entry))
}

/// Looks for a solvable `c - sum k_u n_u e_u`.
fn cone_search(
    entries: &HashMap<EquationCode, LedgerEntry>,
    code: &EquationCode,
) -> Option<(EquationCode, Vec<Element>)> {
    let steps: Vec<(CodeIndex, u32, u32)> = code
        .iter()
        .map(|(u, n)| (u, n, u.weight().min(u32::MAX as u64) as u32))
        .collect();
    let count: u64 = steps.iter().map(|&(_, n, w)| (n / w) as u64 + 1).product();
    if count > CONE_ENUMERATION_LIMIT {
        return entries.iter().find_map(|(c, e)| match e {
            LedgerEntry::Solvable(w) if code.dominates(c) => Some((c.clone(), w.clone())),
            _ => None,
        });
    }
    steps
        .iter()
        .map(|&(u, n, w)| (0..=n / w).map(move |k| (u, n - k * w)))
        .multi_cartesian_product()
        .find_map(|choice| {
            let mut cand = EquationCode::new();
            for (u, n) in choice {
                cand.add(u, n);
            }
            match entries.get(&cand) {
                Some(LedgerEntry::Solvable(w)) => Some((cand, w.clone())),
                _ => None,
            }
        })
}

/// How a solution was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Via {
    Search,
    Ledger,
    Cone,
    Split,
}

/// Result for one constrained standard equation.
#[derive(Clone, Debug)]
pub enum Outcome {
    Solvable {
        witness: Assignment,
        via: Via,
    },
    /// No solution exists; the reason is a sound certificate.
    Pruned(String),
    Unknown(String),
}

impl Outcome {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Outcome::Solvable { .. })
    }

    pub fn is_pruned(&self) -> bool {
        matches!(self, Outcome::Pruned(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Solvable,
    Unknown,
    /// Every constraint was pruned.
    Unsolvable,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Solvable => 0,
            Verdict::Unknown => 2,
            Verdict::Unsolvable => 3,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Solvable => "SOLVABLE",
            Verdict::Unknown => "UNKNOWN",
            Verdict::Unsolvable => "UNSOLVABLE",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: Verdict,
    pub witness: Option<Assignment>,
    pub via: Option<Via>,
    pub standard: StandardQuadratic,
    /// Constraints on the original variables that were examined.
    pub constraints_tried: usize,
    pub pruned: usize,
    pub unknown: usize,
    /// The constraint enumeration stopped at `max_constraints`.
    pub truncated: bool,
    pub trace: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Radius of the brute-force search at the leaves.
    pub max_len: usize,
    /// Splitting depth; `None` uses the contraction bound of the longest coefficient.
    pub max_rounds: Option<u32>,
    /// Cap on the number of constraints of the original variables.
    pub max_constraints: usize,
    /// Cap on the number of equations and split branches visited per decision.
    pub max_nodes: usize,
    /// Try a direct brute-force search on the input before splitting.
    pub presearch: bool,
    /// Radius of that search; `None` picks the largest radius in `0..=2`
    /// with at most 50 000 tuples.
    pub presearch_len: Option<usize>,
    pub parallel: bool,
    pub trace: bool,
    pub trace_split: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_len: SHORT_LEN,
            max_rounds: None,
            max_constraints: 1 << 16,
            max_nodes: 200_000,
            presearch: true,
            presearch_len: None,
            parallel: false,
            trace: false,
            trace_split: false,
        }
    }
}

#[derive(Clone, Debug)]
struct MemoEntry {
    outcome: Outcome,
    rounds: u32,
}

/// Splitting search over constrained standard equations backed by a ledger.
pub struct Solver {
    pub config: SolverConfig,
    ledger: Arc<Ledger>,
    memo: Mutex<HashMap<String, MemoEntry>>,
    searches: AtomicUsize,
    nodes: AtomicUsize,
    trace: Mutex<Vec<String>>,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Self::with_ledger(config, Arc::new(Ledger::in_memory()))
    }

    pub fn with_ledger(config: SolverConfig, ledger: Arc<Ledger>) -> Self {
        Solver {
            config,
            ledger,
            memo: Mutex::new(HashMap::new()),
            searches: AtomicUsize::new(0),
            nodes: AtomicUsize::new(0),
            trace: Mutex::new(Vec::new()),
        }
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    /// Number of leaf brute-force searches run so far.
    pub fn searches(&self) -> usize {
        self.searches.load(Ordering::SeqCst)
    }

    fn log(&self, enabled: bool, line: impl FnOnce() -> String) {
        if enabled {
            self.trace.lock().unwrap().push(line());
        }
    }

    fn take_trace(&self) -> Vec<String> {
        std::mem::take(&mut *self.trace.lock().unwrap())
    }

    fn rounds_for(&self, q: &StandardQuadratic) -> u32 {
        self.config.max_rounds.unwrap_or_else(|| {
            contraction_bound(
                q.coefficients
                    .iter()
                    .map(|(_, c)| c.len())
                    .max()
                    .unwrap_or(0),
            )
        })
    }

    /// Decides a constrained standard equation. `zeta` must cover its variables.
    pub fn decide_standard(&self, q: &StandardQuadratic, zeta: &Constraint) -> Result<Outcome> {
        self.nodes.store(0, Ordering::SeqCst);
        self.solve(q, zeta, self.rounds_for(q))
    }

    fn solve(&self, q: &StandardQuadratic, zeta: &Constraint, rounds: u32) -> Result<Outcome> {
        let (q, dropped) = canonicalize(q);
        let zeta = zeta.restrict(
            &q.vars()
                .into_iter()
                .chain(dropped.iter().cloned())
                .collect::<Vec<_>>(),
        );
        let key = format!("{q}|{}", zeta.restrict(&q.vars()));
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            if !matches!(hit.outcome, Outcome::Unknown(_)) || hit.rounds >= rounds {
                return Ok(with_dropped(hit.outcome.clone(), &dropped, &zeta));
            }
        }
        let outcome = self.solve_uncached(&q, &zeta, rounds)?;
        if let Outcome::Solvable { witness, .. } = &outcome {
            verify(&q.render(), &zeta, witness)?;
        }
        self.memo.lock().unwrap().insert(
            key,
            MemoEntry {
                outcome: outcome.clone(),
                rounds,
            },
        );
        Ok(with_dropped(outcome, &dropped, &zeta))
    }

    fn solve_uncached(
        &self,
        q: &StandardQuadratic,
        zeta: &Constraint,
        rounds: u32,
    ) -> Result<Outcome> {
        let word = q.render();
        let value = word.gamma_eval(zeta)?;
        if !value.is_identity() {
            return Ok(Outcome::Pruned(format!("gamma({q}) = {value}")));
        }
        if self.nodes.fetch_add(1, Ordering::SeqCst) >= self.config.max_nodes {
            return Ok(Outcome::Unknown("node budget exhausted".into()));
        }
        if q.coefficients.iter().all(|(_, c)| c.len() <= SHORT_LEN) {
            return self.leaf(q, zeta);
        }
        if rounds == 0 {
            return Ok(Outcome::Unknown(format!("round limit reached at {q}")));
        }
        // Splitting enumerates 4 descendant pairs per variable; charge them
        // before doing so.
        let family = 4usize.saturating_pow(q.vars().len() as u32);
        if self
            .nodes
            .fetch_add(family, Ordering::SeqCst)
            .saturating_add(family)
            > self.config.max_nodes
        {
            return Ok(Outcome::Unknown(format!(
                "node budget exhausted before splitting {q}"
            )));
        }
        let split = split_standard(q, zeta)?;
        self.log(self.config.trace_split, || {
            format!("split {q} under {zeta}\n{}", split.trace)
        });
        match &split.outcome {
            SplitOutcome::Disjoint { parts, branches } => {
                let mut unknown = None;
                for b in branches {
                    let o0 = self.solve(&parts[0], &b.constraints[0], rounds - 1)?;
                    if o0.is_pruned() {
                        continue;
                    }
                    let o1 = self.solve(&parts[1], &b.constraints[1], rounds - 1)?;
                    match (o0, o1) {
                        (
                            Outcome::Solvable { witness: s0, .. },
                            Outcome::Solvable { witness: s1, .. },
                        ) => {
                            let witness = split.lift_disjoint(b, [&s0, &s1])?;
                            return Ok(Outcome::Solvable {
                                witness,
                                via: Via::Split,
                            });
                        }
                        (_, Outcome::Pruned(_)) => {}
                        (Outcome::Unknown(r), _) | (_, Outcome::Unknown(r)) => {
                            unknown = unknown.or(Some(r))
                        }
                        _ => {}
                    }
                }
                Ok(match unknown {
                    Some(r) => Outcome::Unknown(r),
                    None => Outcome::Pruned(format!("every descendant branch of {q} is pruned")),
                })
            }
            SplitOutcome::Joined {
                standardization,
                branches,
                ..
            } => {
                let mut unknown = None;
                for b in branches {
                    match self.solve(&standardization.standard, &b.constraint, rounds - 1)? {
                        Outcome::Solvable { witness, .. } => {
                            let witness = split.lift_joined(b, &witness)?;
                            return Ok(Outcome::Solvable {
                                witness,
                                via: Via::Split,
                            });
                        }
                        Outcome::Pruned(_) => {}
                        Outcome::Unknown(r) => unknown = unknown.or(Some(r)),
                    }
                }
                Ok(match unknown {
                    Some(r) => Outcome::Unknown(r),
                    None => Outcome::Pruned(format!("every joined branch of {q} is pruned")),
                })
            }
        }
    }

    fn leaf(&self, q: &StandardQuadratic, zeta: &Constraint) -> Result<Outcome> {
        let of = ordered_form(q, zeta)?;
        let code = encode(&of.standard, &of.constraint)?;
        self.log(self.config.trace, || {
            format!(
                "leaf {} under {} -> code {code}",
                of.standard, of.constraint
            )
        });
        let vars = of.standard.vars();
        let from_values =
            |values: Vec<Element>| -> Assignment { vars.iter().cloned().zip(values).collect() };
        match self.ledger.lookup(&code) {
            Lookup::Exact(w) => return pull_ordered(q, &of, &from_values(w), Via::Ledger),
            Lookup::Cone { ancestor, witness } => {
                self.log(self.config.trace, || {
                    format!("cone hit: {code} over {ancestor}")
                });
                let values = expand_witness(&ancestor, &witness, &code)?;
                return pull_ordered(q, &of, &from_values(values), Via::Cone);
            }
            Lookup::Unknown(n) if n >= self.config.max_len => {
                return Ok(Outcome::Unknown(format!(
                    "code {code} unresolved up to length {n}"
                )));
            }
            _ => {}
        }
        self.searches.fetch_add(1, Ordering::SeqCst);
        match brute_force(&of.standard.render(), &of.constraint, self.config.max_len) {
            Some(beta) => {
                let values = vars.iter().map(|v| beta[v].clone()).collect();
                self.ledger.insert(code, LedgerEntry::Solvable(values))?;
                pull_ordered(q, &of, &beta, Via::Search)
            }
            None => {
                self.ledger
                    .insert(code.clone(), LedgerEntry::Unknown(self.config.max_len))?;
                Ok(Outcome::Unknown(format!(
                    "no solution of length <= {} for code {code}",
                    self.config.max_len
                )))
            }
        }
    }

    /// Full decision for a quadratic word with a partial constraint on its
    /// variables.
    pub fn decide(&self, w: &MixedWord, user: &Constraint) -> Result<Decision> {
        if !w.is_quadratic() {
            return Err(Error::NotQuadratic(w.to_string()));
        }
        let vars: Vec<Variable> = w.vars().into_iter().collect();
        for (v, _) in user.iter() {
            if !vars.contains(v) {
                return Err(Error::Constraint(format!(
                    "variable {v} does not occur in {w}"
                )));
            }
        }
        self.nodes.store(0, Ordering::SeqCst);
        let st = to_standard(w)?;
        let r = st.standard.clone();
        let r_vars = r.vars();
        let rounds = self.rounds_for(&r);
        self.log(self.config.trace, || {
            format!(
                "standard form: {r}\nautomorphism:\n{}",
                st.automorphism.trace()
            )
        });
        let free: Vec<Variable> = vars.iter().filter(|v| !user.contains(v)).cloned().collect();
        if let Some(alpha) = self.presearch(w, user, &vars) {
            verify(w, user, &alpha)?;
            self.log(self.config.trace, || {
                "short witness found by brute force".to_string()
            });
            return Ok(Decision {
                verdict: Verdict::Solvable,
                witness: Some(alpha),
                via: Some(Via::Search),
                standard: r,
                constraints_tried: 0,
                pruned: 0,
                unknown: 0,
                truncated: false,
                trace: self.take_trace(),
            });
        }
        let classes: Vec<QElement> = crate::quotient::ordered_classes().to_vec();
        let all = free
            .iter()
            .map(|_| classes.clone())
            .multi_cartesian_product()
            .map(|choice| free.iter().cloned().zip(choice).collect::<Constraint>());
        let ordered = all;
        let total = 16u64.saturating_pow(free.len() as u32);
        let truncated = total > self.config.max_constraints as u64;
        let candidates = ordered
            .take(self.config.max_constraints)
            .map(|g| user.merged(&g));

        let pruned = AtomicUsize::new(0);
        let unknown = AtomicUsize::new(0);
        let tried = AtomicUsize::new(0);
        let attempt = |gamma: Result<Constraint>| -> Result<Option<(Assignment, Via)>> {
            let gamma = gamma?;
            tried.fetch_add(1, Ordering::SeqCst);
            if !w.gamma_eval(&gamma)?.is_identity() {
                pruned.fetch_add(1, Ordering::SeqCst);
                return Ok(None);
            }
            let full = st.automorphism.transport(&gamma);
            let zeta: Constraint = r_vars
                .iter()
                .map(|v| (v.clone(), full.value_or_identity(v)))
                .collect();
            match self.solve(&r, &zeta, rounds)? {
                Outcome::Solvable { witness, via } => {
                    let alpha = st.automorphism.pullback(&vars, &witness, &full)?;
                    verify(w, &gamma, &alpha)?;
                    Ok(Some((alpha, via)))
                }
                Outcome::Pruned(_) => {
                    pruned.fetch_add(1, Ordering::SeqCst);
                    Ok(None)
                }
                Outcome::Unknown(_) => {
                    unknown.fetch_add(1, Ordering::SeqCst);
                    Ok(None)
                }
            }
        };
        let found = if self.config.parallel {
            let list: Vec<Result<Constraint>> = candidates.collect();
            list.into_par_iter()
                .map(attempt)
                .find_map_first(|r| r.transpose())
                .transpose()?
        } else {
            let mut found = None;
            for g in candidates {
                if let Some(hit) = attempt(g)? {
                    found = Some(hit);
                    break;
                }
            }
            found
        };
        let (pruned, unknown, tried) = (
            pruned.into_inner(),
            unknown.into_inner(),
            tried.into_inner(),
        );
        let verdict = match &found {
            Some(_) => Verdict::Solvable,
            None if !truncated && unknown == 0 => Verdict::Unsolvable,
            None => Verdict::Unknown,
        };
        let (witness, via) = found
            .map(|(a, v)| (Some(a), Some(v)))
            .unwrap_or((None, None));
        Ok(Decision {
            verdict,
            witness,
            via,
            standard: r,
            constraints_tried: tried,
            pruned,
            unknown,
            truncated,
            trace: self.take_trace(),
        })
    }

    fn presearch(&self, w: &MixedWord, user: &Constraint, vars: &[Variable]) -> Option<Assignment> {
        if !self.config.presearch {
            return None;
        }
        let radius = self.config.presearch_len.unwrap_or_else(|| {
            (0..=2)
                .rev()
                .find(|&r| (ball_size(r) as u64).saturating_pow(vars.len() as u32) <= 50_000)
                .unwrap_or(0)
        });
        brute_force(w, user, radius)
    }
}

/// Rewrites coefficients equal to short elements as their short words and
/// drops blocks with trivial coefficient.
fn canonicalize(q: &StandardQuadratic) -> (StandardQuadratic, Vec<Variable>) {
    let short = ShortSet::global();
    let mut out = q.clone();
    let mut dropped = Vec::new();
    out.coefficients.clear();
    for (z, c) in &q.coefficients {
        let c = match short.index_of(c) {
            Some(i) => short.get(i).clone(),
            None => c.clone(),
        };
        if c.is_empty() {
            dropped.push(z.clone());
        } else {
            out.coefficients.push((z.clone(), c));
        }
    }
    (out, dropped)
}

fn with_dropped(outcome: Outcome, dropped: &[Variable], zeta: &Constraint) -> Outcome {
    match outcome {
        Outcome::Solvable { mut witness, via } => {
            for z in dropped {
                witness.insert(
                    z.clone(),
                    zeta.value_or_identity(z).representative().clone(),
                );
            }
            Outcome::Solvable { witness, via }
        }
        other => other,
    }
}

fn pull_ordered(
    q: &StandardQuadratic,
    of: &OrderedForm,
    beta: &Assignment,
    via: Via,
) -> Result<Outcome> {
    let witness = of.automorphism.pullback(&q.vars(), beta, &of.constraint)?;
    Ok(Outcome::Solvable { witness, via })
}

/// Checks `alpha(w) = 1` and that `alpha` respects `gamma`.
pub fn verify(w: &MixedWord, gamma: &Constraint, alpha: &Assignment) -> Result<()> {
    let value = w.eval(alpha)?;
    if !is_trivial(&value) {
        return Err(Error::Internal(format!("witness evaluates {w} to {value}")));
    }
    for v in w.vars() {
        if let Some(q) = gamma.get(&v) {
            if pi_k(&alpha[&v]) != q {
                return Err(Error::Internal(format!(
                    "witness violates the constraint on {v}"
                )));
            }
        }
    }
    Ok(())
}

/// Tree of equations produced by splitting until all coefficients are short.
#[derive(Clone, Debug)]
pub enum SplitTree {
    Leaf {
        equation: StandardQuadratic,
        constraint: Constraint,
    },
    Pruned(String),
    /// Round limit reached with long coefficients left.
    Cutoff {
        equation: StandardQuadratic,
        constraint: Constraint,
    },
    /// Alternatives over descendant constraints.
    Or(Vec<Arc<SplitTree>>),
    /// Both halves of a disjoint split.
    And(Vec<Arc<SplitTree>>),
}

impl SplitTree {
    pub fn leaves(&self) -> Vec<(&StandardQuadratic, &Constraint)> {
        match self {
            SplitTree::Leaf {
                equation,
                constraint,
            } => vec![(equation, constraint)],
            SplitTree::Or(v) | SplitTree::And(v) => v.iter().flat_map(|t| t.leaves()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn has_cutoff(&self) -> bool {
        match self {
            SplitTree::Cutoff { .. } => true,
            SplitTree::Or(v) | SplitTree::And(v) => v.iter().any(|t| t.has_cutoff()),
            _ => false,
        }
    }

    /// Number of splitting rounds along the longest path.
    pub fn depth(&self) -> usize {
        match self {
            SplitTree::Or(v) => v.iter().map(|t| t.depth()).max().unwrap_or(0) + 1,
            SplitTree::And(v) => v.iter().map(|t| t.depth()).max().unwrap_or(0),
            _ => 0,
        }
    }
}

/// Splits `q` under `zeta` until every coefficient is short, sharing
/// identical subproblems.
pub fn split_until_short(
    q: &StandardQuadratic,
    zeta: &Constraint,
    max_rounds: u32,
) -> Result<Arc<SplitTree>> {
    fn go(
        q: &StandardQuadratic,
        zeta: &Constraint,
        rounds: u32,
        memo: &mut HashMap<String, Arc<SplitTree>>,
    ) -> Result<Arc<SplitTree>> {
        let (q, _) = canonicalize(q);
        let zeta = zeta.restrict(&q.vars());
        let key = format!("{q}|{zeta}|{rounds}");
        if let Some(t) = memo.get(&key) {
            return Ok(t.clone());
        }
        let value = q.render().gamma_eval(&zeta)?;
        let tree = if !value.is_identity() {
            SplitTree::Pruned(format!("gamma({q}) = {value}"))
        } else if q.coefficients.iter().all(|(_, c)| c.len() <= SHORT_LEN) {
            SplitTree::Leaf {
                equation: q.clone(),
                constraint: zeta.clone(),
            }
        } else if rounds == 0 {
            SplitTree::Cutoff {
                equation: q.clone(),
                constraint: zeta.clone(),
            }
        } else {
            let split = split_standard(&q, &zeta)?;
            match &split.outcome {
                SplitOutcome::Disjoint { parts, branches } => SplitTree::Or(
                    branches
                        .iter()
                        .map(|b| {
                            Ok(Arc::new(SplitTree::And(vec![
                                go(&parts[0], &b.constraints[0], rounds - 1, memo)?,
                                go(&parts[1], &b.constraints[1], rounds - 1, memo)?,
                            ])))
                        })
                        .collect::<Result<_>>()?,
                ),
                SplitOutcome::Joined {
                    standardization,
                    branches,
                    ..
                } => SplitTree::Or(
                    branches
                        .iter()
                        .map(|b| go(&standardization.standard, &b.constraint, rounds - 1, memo))
                        .collect::<Result<_>>()?,
                ),
            }
        };
        let tree = Arc::new(tree);
        memo.insert(key, tree.clone());
        Ok(tree)
    }
    go(q, zeta, max_rounds, &mut HashMap::new())
}
