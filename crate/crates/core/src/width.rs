//! Experiments on the commutator part `R_n = [x1,y1] ... [xn,yn]`: reduced
//! constraints, generator-closure classes of window tuples and
//! commutator-width probes.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::equation::{Assignment, Atom, Constraint, MixedWord, Variable};
use crate::error::{Error, Result};
use crate::group::{abelianization, is_trivial, Element};
use crate::pipeline::{Solver, Verdict};
use crate::quotient::QElement;
use crate::standard::{ElementarySubstitution, SubstitutionAutomorphism};

pub fn x_var(i: usize) -> Variable {
    Variable::new(format!("x{i}"))
}

pub fn y_var(i: usize) -> Variable {
    Variable::new(format!("y{i}"))
}

/// `x1, y1, ..., xn, yn`.
pub fn rn_variables(n: usize) -> Vec<Variable> {
    (1..=n).flat_map(|i| [x_var(i), y_var(i)]).collect()
}

pub fn rn_word(n: usize) -> MixedWord {
    (1..=n).fold(MixedWord::empty(), |w, i| {
        w.concat(&MixedWord::commutator(&x_var(i), &y_var(i)))
    })
}

/// Generators of the stabilizer of `R_n`. Handles are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StabMove {
    /// `x_i -> y_i^s x_i`.
    TransvectX { handle: usize, sign: i8 },
    /// `y_i -> x_i^s y_i`.
    TransvectY { handle: usize, sign: i8 },
    /// Exchanges handles `i` and `i+1`, conjugating the moved handle by `[x_{i+1}, y_{i+1}]`.
    Swap { handle: usize, inverse: bool },
    /// Twist along `C = y_i x_{i+1}^-1`: `x_i -> C x_i`, `y_i -> C y_i C^-1`,
    /// `x_{i+1} -> C x_{i+1} C^-1`, `y_{i+1} -> C y_{i+1}`.
    Twist { handle: usize, inverse: bool },
}

fn word(atoms: &[(&Variable, i8)]) -> MixedWord {
    MixedWord::from_atoms(atoms.iter().map(|(v, s)| Atom::var(v, *s)))
}

/// `u <-> v` as four elementary steps.
fn relabel(u: &Variable, v: &Variable) -> [ElementarySubstitution; 4] {
    [
        ElementarySubstitution::inversion(u),
        ElementarySubstitution::right_mult(u, &word(&[(v, -1)])),
        ElementarySubstitution::right_mult(v, &word(&[(u, 1)])),
        ElementarySubstitution::left_mult(u, &word(&[(v, -1)])),
    ]
}

impl StabMove {
    /// Every generator and inverse for `R_n`.
    pub fn all(n: usize) -> Vec<StabMove> {
        let mut out = Vec::new();
        for handle in 1..=n {
            for sign in [1, -1] {
                out.push(StabMove::TransvectX { handle, sign });
                out.push(StabMove::TransvectY { handle, sign });
            }
        }
        for handle in 1..n {
            for inverse in [false, true] {
                out.push(StabMove::Swap { handle, inverse });
                out.push(StabMove::Twist { handle, inverse });
            }
        }
        out
    }

    /// Largest handle the move touches.
    pub fn top_handle(self) -> usize {
        match self {
            StabMove::TransvectX { handle, .. } | StabMove::TransvectY { handle, .. } => handle,
            StabMove::Swap { handle, .. } | StabMove::Twist { handle, .. } => handle + 1,
        }
    }

    pub fn low_handle(self) -> usize {
        match self {
            StabMove::TransvectX { handle, .. }
            | StabMove::TransvectY { handle, .. }
            | StabMove::Swap { handle, .. }
            | StabMove::Twist { handle, .. } => handle,
        }
    }

    /// The same move on handles shifted by `offset`.
    pub fn shifted(self, offset: usize) -> StabMove {
        match self {
            StabMove::TransvectX { handle, sign } => StabMove::TransvectX {
                handle: handle + offset,
                sign,
            },
            StabMove::TransvectY { handle, sign } => StabMove::TransvectY {
                handle: handle + offset,
                sign,
            },
            StabMove::Swap { handle, inverse } => StabMove::Swap {
                handle: handle + offset,
                inverse,
            },
            StabMove::Twist { handle, inverse } => StabMove::Twist {
                handle: handle + offset,
                inverse,
            },
        }
    }

    pub fn automorphism(self) -> SubstitutionAutomorphism {
        let forward = |m: StabMove| -> SubstitutionAutomorphism {
            match m {
                StabMove::TransvectX { handle: i, sign } => {
                    SubstitutionAutomorphism::from_steps(vec![ElementarySubstitution::left_mult(
                        &x_var(i),
                        &word(&[(&y_var(i), sign)]),
                    )])
                }
                StabMove::TransvectY { handle: i, sign } => {
                    SubstitutionAutomorphism::from_steps(vec![ElementarySubstitution::left_mult(
                        &y_var(i),
                        &word(&[(&x_var(i), sign)]),
                    )])
                }
                StabMove::Swap { handle: i, .. } => {
                    let (x1, y1, x2, y2) = (x_var(i), y_var(i), x_var(i + 1), y_var(i + 1));
                    let mut steps: Vec<ElementarySubstitution> = relabel(&x1, &x2).into();
                    steps.extend(relabel(&y1, &y2));
                    let c = MixedWord::commutator(&x2, &y2);
                    steps.push(ElementarySubstitution::conjugation(&x1, &c));
                    steps.push(ElementarySubstitution::conjugation(&y1, &c));
                    SubstitutionAutomorphism::from_steps(steps)
                }
                StabMove::Twist { handle: i, .. } => {
                    let (x1, y1, x2, y2) = (x_var(i), y_var(i), x_var(i + 1), y_var(i + 1));
                    let c = word(&[(&y1, 1), (&x2, -1)]);
                    SubstitutionAutomorphism::from_steps(vec![
                        ElementarySubstitution::conjugation(&y1, &word(&[(&x2, 1)])),
                        ElementarySubstitution::conjugation(&x2, &word(&[(&y1, -1)])),
                        ElementarySubstitution::left_mult(&x1, &c),
                        ElementarySubstitution::left_mult(&y2, &c),
                    ])
                }
            }
        };
        match self {
            StabMove::Swap {
                inverse: true,
                handle,
            } => forward(StabMove::Swap {
                handle,
                inverse: false,
            })
            .inverse(),
            StabMove::Twist {
                inverse: true,
                handle,
            } => forward(StabMove::Twist {
                handle,
                inverse: false,
            })
            .inverse(),
            m => forward(m),
        }
    }
}

impl fmt::Display for StabMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabMove::TransvectX { handle, sign } => {
                write!(f, "x{handle} -> y{handle}^{sign} x{handle}")
            }
            StabMove::TransvectY { handle, sign } => {
                write!(f, "y{handle} -> x{handle}^{sign} y{handle}")
            }
            StabMove::Swap { handle, inverse } => {
                write!(
                    f,
                    "swap({handle},{}){}",
                    handle + 1,
                    if *inverse { "^-1" } else { "" }
                )
            }
            StabMove::Twist { handle, inverse } => {
                write!(
                    f,
                    "twist(y{handle} x{}^-1){}",
                    handle + 1,
                    if *inverse { "^-1" } else { "" }
                )
            }
        }
    }
}

struct Tables {
    mul: [[u8; 16]; 16],
    inv: [u8; 16],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut mul = [[0u8; 16]; 16];
        let mut inv = [0u8; 16];
        for i in 0..16 {
            let g = QElement::from_index(i);
            inv[i] = g.inverse().index() as u8;
            for (j, slot) in mul[i].iter_mut().enumerate() {
                *slot = g.mul(QElement::from_index(j)).index() as u8;
            }
        }
        Tables { mul, inv }
    })
}

/// A move compiled to its action `gamma -> gamma . phi^-1` on tuples of
/// class indices, ordered `x1, y1, x2, y2, ...`.
#[derive(Clone, Debug)]
pub struct CompiledMove {
    pub mv: StabMove,
    images: Vec<(usize, Vec<(usize, bool)>)>,
    lo: usize,
    width: usize,
    table: Vec<u16>,
}

fn var_slot(v: &Variable) -> usize {
    let name = v.name();
    let i: usize = name[1..].parse().expect("variable of R_n");
    2 * (i - 1) + usize::from(name.starts_with('y'))
}

impl CompiledMove {
    pub fn new(mv: StabMove) -> Self {
        let inv = mv.automorphism().inverse();
        let mut images = Vec::new();
        for h in mv.low_handle()..=mv.top_handle() {
            for v in [x_var(h), y_var(h)] {
                let img = inv.apply(&MixedWord::var(&v));
                let terms: Vec<_> = img
                    .atoms()
                    .iter()
                    .map(|a| match a {
                        Atom::Var(u, s) => (var_slot(u), *s < 0),
                        Atom::Const(_) => unreachable!("stabilizer moves have no constants"),
                    })
                    .collect();
                images.push((var_slot(&v), terms));
            }
        }
        let lo = 2 * (mv.low_handle() - 1);
        let width = 2 * (mv.top_handle() - mv.low_handle() + 1);
        debug_assert!(images
            .iter()
            .all(|(_, ts)| ts.iter().all(|&(u, _)| (lo..lo + width).contains(&u))));
        let mut m = CompiledMove {
            mv,
            images,
            lo,
            width,
            table: Vec::new(),
        };
        let mut t = vec![0u8; lo + width];
        let mut out = t.clone();
        m.table = (0..1usize << (4 * width))
            .map(|k| {
                for j in 0..width {
                    t[lo + j] = ((k >> (4 * j)) & 15) as u8;
                }
                out.copy_from_slice(&t);
                m.apply_into(&t, &mut out);
                out[lo..]
                    .iter()
                    .rev()
                    .fold(0u16, |acc, &g| (acc << 4) | g as u16)
            })
            .collect();
        m
    }

    /// The action on a tuple packed four bits per entry, first entry lowest.
    #[inline]
    pub fn apply_packed(&self, key: u128) -> u128 {
        let shift = 4 * self.lo as u32;
        let mask = (1u128 << (4 * self.width)) - 1;
        let part = ((key >> shift) & mask) as usize;
        (key & !(mask << shift)) | (self.table[part] as u128) << shift
    }

    /// Writes the image of `t` into `out` (which must start as a copy of `t`).
    pub fn apply_into(&self, t: &[u8], out: &mut [u8]) {
        let tb = tables();
        for (slot, terms) in &self.images {
            let mut acc = 0u8;
            for &(u, inverse) in terms {
                let g = if inverse { tb.inv[t[u] as usize] } else { t[u] };
                acc = tb.mul[acc as usize][g as usize];
            }
            out[*slot] = acc;
        }
    }

    pub fn apply(&self, t: &[u8]) -> Vec<u8> {
        let mut out = t.to_vec();
        self.apply_into(t, &mut out);
        out
    }
}

fn compiled_moves(n: usize) -> Vec<CompiledMove> {
    StabMove::all(n)
        .into_iter()
        .map(CompiledMove::new)
        .collect()
}

fn pack(t: &[u8]) -> u128 {
    t.iter().rev().fold(0u128, |acc, &g| (acc << 4) | g as u128)
}

fn unpack(mut key: u128, len: usize) -> Vec<u8> {
    (0..len)
        .map(|_| {
            let g = (key & 15) as u8;
            key >>= 4;
            g
        })
        .collect()
}

/// Breadth-first search from `start` for a tuple satisfying `goal`, using
/// `moves`. Returns the move sequence.
fn bfs_path(
    start: &[u8],
    moves: &[CompiledMove],
    goal: impl Fn(&[u8]) -> bool,
    limit: usize,
) -> Option<Vec<usize>> {
    if goal(start) {
        return Some(Vec::new());
    }
    let len = start.len();
    let mut parent: HashMap<u128, (u128, u16)> = HashMap::new();
    let start_key = pack(start);
    parent.insert(start_key, (start_key, u16::MAX));
    let mut queue = VecDeque::from([start_key]);
    while let Some(key) = queue.pop_front() {
        for (mi, m) in moves.iter().enumerate() {
            let next = m.apply_packed(key);
            if parent.contains_key(&next) {
                continue;
            }
            parent.insert(next, (key, mi as u16));
            if goal(&unpack(next, len)) {
                let mut path = Vec::new();
                let mut cur = next;
                while cur != start_key {
                    let (p, mv) = parent[&cur];
                    path.push(mv as usize);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            if parent.len() > limit {
                return None;
            }
            queue.push_back(next);
        }
    }
    None
}

const REDUCTION_LIMIT: usize = 20_000_000;

/// Class-index tuple of `gamma` on `x1, y1, ..., xn, yn`.
pub fn tuple_of(n: usize, gamma: &Constraint) -> Result<Vec<u8>> {
    rn_variables(n)
        .iter()
        .map(|v| {
            gamma
                .get(v)
                .map(|q| q.index() as u8)
                .ok_or_else(|| Error::MissingAssignment(v.to_string()))
        })
        .collect()
}

pub fn constraint_of_tuple(t: &[u8]) -> Constraint {
    rn_variables(t.len() / 2)
        .into_iter()
        .zip(t.iter().map(|&g| QElement::from_index(g as usize)))
        .collect()
}

/// Whether the tuple is trivial on `y3` and on every handle after the third.
pub fn is_window_form(t: &[u8]) -> bool {
    let id = QElement::IDENTITY.index() as u8;
    t.iter().skip(5).all(|&g| g == id)
}

/// Moves `gamma` on `R_n` (`n >= 3`) to an equivalent constraint that is
/// trivial outside `x1, y1, x2, y2, x3`. The handles are cleared from the
/// right; each step searches the stabilizer of the last four handles.
pub fn reduce_commutator_constraint(
    n: usize,
    gamma: &Constraint,
) -> Result<(Constraint, SubstitutionAutomorphism)> {
    if n < 3 {
        return Err(Error::Invalid(format!(
            "reduction needs at least three handles, got {n}"
        )));
    }
    let mut t = tuple_of(n, gamma)?;
    let id = QElement::IDENTITY.index() as u8;
    let mut trail: Vec<StabMove> = Vec::new();
    for j in (3..=n).rev() {
        let lo = j.saturating_sub(3).max(1);
        let width = j - lo + 1;
        let local_moves = compiled_moves(width);
        let window = t[2 * (lo - 1)..2 * j].to_vec();
        let goal = |s: &[u8]| {
            let k = 2 * (width - 1);
            if j == 3 {
                s[k + 1] == id
            } else {
                s[k] == id && s[k + 1] == id
            }
        };
        let path = bfs_path(&window, &local_moves, goal, REDUCTION_LIMIT)
            .ok_or_else(|| Error::Internal(format!("no reduction of handle {j} found")))?;
        for mi in path {
            let mv = local_moves[mi].mv.shifted(lo - 1);
            t = CompiledMove::new(mv).apply(&t);
            trail.push(mv);
        }
    }
    let mut phi = SubstitutionAutomorphism::identity();
    for mv in &trail {
        phi = phi.then(&mv.automorphism());
    }
    let reduced = constraint_of_tuple(&t);
    if phi.transport(gamma).restrict(&rn_variables(n)) != reduced || !is_window_form(&t) {
        return Err(Error::Internal(
            "replayed reduction disagrees with the tuple action".into(),
        ));
    }
    Ok((reduced, phi))
}

/// Number of window tuples `(x1, y1, x2, y2, x3)`.
pub const WINDOW_SIZE: usize = 1 << 20;

fn window_tuple(index: usize) -> [u8; 5] {
    let mut out = [0u8; 5];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = ((index >> (4 * k)) & 15) as u8;
    }
    out
}

fn window_index(t: &[u8]) -> usize {
    t.iter()
        .take(5)
        .enumerate()
        .fold(0, |acc, (k, &g)| acc | (g as usize) << (4 * k))
}

/// Order on window tuples: lexicographic in the fixed order of `G/K`.
fn window_key(t: &[u8; 5]) -> [usize; 5] {
    t.map(|g| QElement::from_index(g as usize).rank())
}

/// Classes of window tuples for one `n`.
#[derive(Clone, Debug)]
pub struct ThetaPartition {
    pub n: usize,
    /// Class id of every window tuple.
    class_of: Vec<u32>,
    /// Minimal member of every class, sorted.
    pub representatives: Vec<[QElement; 5]>,
}

impl ThetaPartition {
    pub fn classes(&self) -> usize {
        self.representatives.len()
    }

    /// Class id of a window tuple given on `x1, y1, x2, y2, x3`.
    pub fn class(&self, t: &[QElement; 5]) -> u32 {
        let idx: Vec<u8> = t.iter().map(|g| g.index() as u8).collect();
        self.class_of[window_index(&idx)]
    }

    pub fn same_class(&self, a: &[QElement; 5], b: &[QElement; 5]) -> bool {
        self.class(a) == self.class(b)
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }
}

fn finish(n: usize, uf: &mut UnionFind) -> ThetaPartition {
    let mut best: HashMap<u32, usize> = HashMap::new();
    for i in 0..WINDOW_SIZE {
        let r = uf.find(i as u32);
        let cand = window_tuple(i);
        best.entry(r)
            .and_modify(|b| {
                if window_key(&cand) < window_key(&window_tuple(*b)) {
                    *b = i;
                }
            })
            .or_insert(i);
    }
    let mut reps: Vec<usize> = best.values().copied().collect();
    reps.sort_by_key(|&i| window_key(&window_tuple(i)));
    let id_of: HashMap<u32, u32> = reps
        .iter()
        .enumerate()
        .map(|(k, &i)| (uf.find(i as u32), k as u32))
        .collect();
    let class_of = (0..WINDOW_SIZE)
        .map(|i| id_of[&uf.find(i as u32)])
        .collect();
    let representatives = reps
        .iter()
        .map(|&i| window_tuple(i).map(|g| QElement::from_index(g as usize)))
        .collect();
    ThetaPartition {
        n,
        class_of,
        representatives,
    }
}

/// Exact classes for `R_3`: connected components of the move graph on
/// all of `(G/K)^6`, restricted to window tuples.
fn theta_three() -> UnionFind {
    const STATES: usize = 1 << 24;
    let moves = compiled_moves(3);
    let mut label = vec![u32::MAX; STATES];
    let mut queue = VecDeque::new();
    for start in 0..WINDOW_SIZE {
        if label[start] != u32::MAX {
            continue;
        }
        label[start] = start as u32;
        queue.push_back(start);
        while let Some(s) = queue.pop_front() {
            for m in &moves {
                let next = m.apply_packed(s as u128) as usize;
                if label[next] == u32::MAX {
                    label[next] = start as u32;
                    queue.push_back(next);
                }
            }
        }
    }
    let mut uf = UnionFind::new(WINDOW_SIZE);
    for (i, &l) in label.iter().enumerate().take(WINDOW_SIZE) {
        uf.union(i as u32, l);
    }
    uf
}

/// States explored from each class representative when extending the
/// partition from `n - 1` to `n` handles.
pub const THETA_EXCURSION_LIMIT: usize = 20_000;

/// Generator-closure classes for `n = 3..=n_max`. The classes for `n` start
/// from those for `n - 1`, so the counts are non-increasing; merges for
/// `n >= 4` come from bounded searches in `(G/K)^(2n)` started at the
/// class representatives.
pub fn theta_orbits(n_max: usize) -> Result<Vec<ThetaPartition>> {
    if n_max < 3 {
        return Err(Error::Invalid(format!(
            "theta classes need n >= 3, got {n_max}"
        )));
    }
    let mut uf = theta_three();
    let mut out = vec![finish(3, &mut uf)];
    for n in 4..=n_max {
        let moves = compiled_moves(n);
        let reps: Vec<usize> = {
            let prev = out.last().expect("non-empty");
            prev.representatives
                .iter()
                .map(|r| window_index(&r.iter().map(|g| g.index() as u8).collect::<Vec<_>>()))
                .collect()
        };
        let merges: Vec<(usize, Vec<usize>)> = reps
            .par_iter()
            .map(|&i| {
                let mut start = vec![QElement::IDENTITY.index() as u8; 2 * n];
                start[..5].copy_from_slice(&window_tuple(i));
                (i, excursion(&start, &moves, THETA_EXCURSION_LIMIT))
            })
            .collect();
        for (i, found) in merges {
            for j in found {
                uf.union(i as u32, j as u32);
            }
        }
        out.push(finish(n, &mut uf));
    }
    Ok(out)
}

/// Window tuples reached by a bounded breadth-first search.
fn excursion(start: &[u8], moves: &[CompiledMove], limit: usize) -> Vec<usize> {
    let mut seen: HashSet<u128> = HashSet::new();
    let mut queue = VecDeque::from([pack(start)]);
    seen.insert(pack(start));
    let mut found = Vec::new();
    while let Some(key) = queue.pop_front() {
        for m in moves {
            let next = m.apply_packed(key);
            if !seen.insert(next) {
                continue;
            }
            if next >> 20 == 0 {
                found.push(next as usize);
            }
            if seen.len() < limit {
                queue.push_back(next);
            }
        }
    }
    found
}

/// First `n` with equal class counts for `n` and `n + 1`.
pub fn stabilization_index(parts: &[ThetaPartition]) -> Option<usize> {
    parts
        .windows(2)
        .find(|w| w[0].classes() == w[1].classes())
        .map(|w| w[0].n)
}

/// CSV lines `n,classes`.
pub fn theta_csv(parts: &[ThetaPartition]) -> String {
    let mut out = String::from("n,classes\n");
    for p in parts {
        out.push_str(&format!("{},{}\n", p.n, p.classes()));
    }
    out
}

/// Outcome of a commutator-width probe.
#[derive(Clone, Debug)]
pub enum WidthReport {
    /// `g` is not in the commutator subgroup.
    NotInCommutator([u8; 3]),
    /// `R_n g^-1 = 1` is solvable for `n = width`. `exact` holds when every
    /// smaller `n` was refuted.
    Found {
        width: usize,
        exact: bool,
        witness: Assignment,
        verdicts: Vec<Verdict>,
    },
    Unknown {
        verdicts: Vec<Verdict>,
    },
}

/// Least `n <= n_max` with `R_n g^-1 = 1` solvable, decided by the pipeline.
pub fn width_probe(solver: &Solver, g: &Element, n_max: usize) -> Result<WidthReport> {
    let ab = abelianization(g);
    if ab != [0, 0, 0] {
        return Ok(WidthReport::NotInCommutator(ab));
    }
    let mut verdicts = Vec::new();
    for n in 0..=n_max {
        let w = rn_word(n).concat(&MixedWord::constant(g.inverse()));
        let d = solver.decide(&w, &Constraint::new())?;
        verdicts.push(d.verdict);
        if let Some(witness) = d.witness {
            let padded = pad_witness(n, &witness);
            let next = rn_word(n + 1).concat(&MixedWord::constant(g.inverse()));
            if !is_trivial(&next.eval(&padded)?) {
                return Err(Error::Internal(format!(
                    "padded witness fails for n = {}",
                    n + 1
                )));
            }
            let exact = verdicts[..n].iter().all(|v| *v == Verdict::Unsolvable);
            return Ok(WidthReport::Found {
                width: n,
                exact,
                witness,
                verdicts,
            });
        }
    }
    Ok(WidthReport::Unknown { verdicts })
}

/// Witness for `R_{n+1} g^-1` from one for `R_n g^-1`: the new handle is trivial.
pub fn pad_witness(n: usize, witness: &Assignment) -> Assignment {
    let mut out = witness.clone();
    out.insert(x_var(n + 1), Element::identity());
    out.insert(y_var(n + 1), Element::identity());
    out
}
