//! Exact arithmetic in the Grigorchuk group.
//!
//! Elements are stored as reduced words `[a]x1 a x2 a ... a xn[a]` with
//! `xi` in `{b, c, d}`. Two different reduced words may still denote the
//! same tree automorphism (for example `adadadad` is trivial), so the derived
//! `PartialEq` is syntactic. Use [`equal`] for group equality.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    A,
    B,
    C,
    D,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::A, Generator::B, Generator::C, Generator::D];

    pub fn symbol(self) -> char {
        match self {
            Generator::A => 'a',
            Generator::B => 'b',
            Generator::C => 'c',
            Generator::D => 'd',
        }
    }

    pub fn from_symbol(ch: char) -> Option<Self> {
        match ch {
            'a' => Some(Generator::A),
            'b' => Some(Generator::B),
            'c' => Some(Generator::C),
            'd' => Some(Generator::D),
            _ => None,
        }
    }

    fn is_klein(self) -> bool {
        self != Generator::A
    }

    /// Product of two distinct non-identity elements of `{1, b, c, d}`.
    fn klein_product(self, other: Generator) -> Generator {
        debug_assert!(self.is_klein() && other.is_klein() && self != other);
        match (self, other) {
            (Generator::B, Generator::C) | (Generator::C, Generator::B) => Generator::D,
            (Generator::B, Generator::D) | (Generator::D, Generator::B) => Generator::C,
            _ => Generator::B,
        }
    }

    /// Sections at the vertices 0 and 1 of the stabilizing generators.
    fn sections(self) -> (Option<Generator>, Option<Generator>) {
        match self {
            Generator::B => (Some(Generator::A), Some(Generator::C)),
            Generator::C => (Some(Generator::A), Some(Generator::D)),
            Generator::D => (None, Some(Generator::B)),
            Generator::A => unreachable!("a does not stabilize the first level"),
        }
    }
}

/// A reduced word over `{a, b, c, d}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Element {
    letters: Vec<Generator>,
}

impl Element {
    pub fn identity() -> Self {
        Element {
            letters: Vec::new(),
        }
    }

    pub fn generator(g: Generator) -> Self {
        Element { letters: vec![g] }
    }

    /// Reduces an arbitrary sequence of generators.
    pub fn reduce<I: IntoIterator<Item = Generator>>(raw: I) -> Self {
        let mut out = Element::identity();
        for g in raw {
            out.push(g);
        }
        out
    }

    /// Appends one generator, keeping the word reduced.
    fn push(&mut self, g: Generator) {
        match self.letters.last().copied() {
            Some(top) if top == g => {
                self.letters.pop();
            }
            Some(top) if top.is_klein() && g.is_klein() => {
                self.letters.pop();
                // the letter below `top` is `a` (or nothing), so no further merge
                self.letters.push(top.klein_product(g));
            }
            _ => self.letters.push(g),
        }
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn is_identity_word(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for &g in &other.letters {
            out.push(g);
        }
        out
    }

    /// Every generator is an involution, so the inverse is the reversed word.
    pub fn inverse(&self) -> Element {
        Element {
            letters: self.letters.iter().rev().copied().collect(),
        }
    }

    pub fn pow(&self, n: u64) -> Element {
        let mut acc = Element::identity();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// Count of the letter `a` modulo two.
    pub fn a_parity(&self) -> u8 {
        (self.letters.iter().filter(|&&g| g == Generator::A).count() % 2) as u8
    }

    pub fn in_st1(&self) -> bool {
        self.a_parity() == 0
    }

    /// The closest element of `St(1)`: `g` itself or `g a`.
    pub fn bar(&self) -> Element {
        if self.in_st1() {
            self.clone()
        } else {
            self.mul(&Element::generator(Generator::A))
        }
    }

    /// The splitting homomorphism `St(1) -> G x G`.
    ///
    /// The word is read as a product of `b, c, d` (even position) and
    /// `aba, aca, ada` (odd position); conjugation by `a` swaps the sections.
    pub fn psi(&self) -> Result<(Element, Element)> {
        if !self.in_st1() {
            return Err(Error::NotInStabilizer(self.to_string()));
        }
        Ok(self.psi_unchecked())
    }

    fn psi_unchecked(&self) -> (Element, Element) {
        let mut left = Element::identity();
        let mut right = Element::identity();
        let mut swapped = false;
        for &g in &self.letters {
            if g == Generator::A {
                swapped = !swapped;
                continue;
            }
            let (s0, s1) = g.sections();
            let (s0, s1) = if swapped { (s1, s0) } else { (s0, s1) };
            if let Some(s) = s0 {
                left.push(s);
            }
            if let Some(s) = s1 {
                right.push(s);
            }
        }
        (left, right)
    }

    pub fn psi_component(&self, i: u8) -> Result<Element> {
        let (g0, g1) = self.psi()?;
        Ok(if i == 0 { g0 } else { g1 })
    }

    /// Action on a vertex of the binary tree (left action: the rightmost
    /// letter acts first).
    pub fn act(&self, vertex: &Vertex) -> Vertex {
        let mut bits = vertex.bits.clone();
        for &g in self.letters.iter().rev() {
            act_letter(g, &mut bits);
        }
        Vertex { bits }
    }

    /// Permutation induced on level `level`, with vertices packed as integers
    /// (bit `i` of the index is the `i`-th letter of the vertex).
    pub fn level_permutation(&self, level: u32) -> Vec<u32> {
        (0..(1u32 << level))
            .map(|v| {
                let mut x = v;
                for &g in self.letters.iter().rev() {
                    x = act_letter_packed(g, x, level);
                }
                x
            })
            .collect()
    }
}

fn act_letter(g: Generator, bits: &mut [u8]) {
    let mut current = g;
    for bit in bits.iter_mut() {
        match current {
            Generator::A => {
                *bit ^= 1;
                return;
            }
            _ => {
                let (s0, s1) = current.sections();
                match if *bit == 0 { s0 } else { s1 } {
                    Some(next) => current = next,
                    None => return,
                }
            }
        }
    }
}

fn act_letter_packed(g: Generator, mut x: u32, level: u32) -> u32 {
    let mut current = g;
    for pos in 0..level {
        let bit = (x >> pos) & 1;
        match current {
            Generator::A => {
                x ^= 1 << pos;
                return x;
            }
            _ => {
                let (s0, s1) = current.sections();
                match if bit == 0 { s0 } else { s1 } {
                    Some(next) => current = next,
                    None => return x,
                }
            }
        }
    }
    x
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for g in &self.letters {
            write!(f, "{}", g.symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

impl FromStr for Element {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Element::identity());
        }
        let mut raw = Vec::with_capacity(s.len());
        for ch in s.chars() {
            raw.push(Generator::from_symbol(ch).ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: format!("unexpected character {ch:?} in group element"),
            })?);
        }
        Ok(Element::reduce(raw))
    }
}

/// A vertex of the rooted binary tree, as a string over `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    bits: Vec<u8>,
}

impl Vertex {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parse {
                input: format!("{bits:?}"),
                reason: "vertex letters must be 0 or 1".into(),
            });
        }
        Ok(Vertex { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse {
                    input: s.to_string(),
                    reason: "vertex must be binary".into(),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Vertex { bits })
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

pub fn reduce(raw: &[Generator]) -> Element {
    Element::reduce(raw.iter().copied())
}

pub fn multiply(g: &Element, h: &Element) -> Element {
    g.mul(h)
}

pub fn length(g: &Element) -> usize {
    g.len()
}

// Word problem.

const DEFAULT_CACHE_LIMIT: usize = 1 << 22;

struct TrivialityCache {
    map: RwLock<HashMap<Element, bool>>,
    limit: RwLock<usize>,
}

fn cache() -> &'static TrivialityCache {
    static CACHE: OnceLock<TrivialityCache> = OnceLock::new();
    CACHE.get_or_init(|| TrivialityCache {
        map: RwLock::new(HashMap::new()),
        limit: RwLock::new(DEFAULT_CACHE_LIMIT),
    })
}

/// Caps the number of memoized triviality results; `0` disables memoization.
pub fn set_cache_limit(limit: usize) {
    let c = cache();
    *c.limit.write().unwrap() = limit;
    let mut map = c.map.write().unwrap();
    if map.len() > limit {
        map.clear();
    }
}

pub fn cache_len() -> usize {
    cache().map.read().unwrap().len()
}

/// Decides whether `g` acts trivially on the tree.
///
/// A word is trivial iff it stabilizes the first level and both sections are
/// trivial. Sections of a reduced word of length `n >= 2` have length at most
/// `(n + 1) / 2`, so the recursion terminates.
pub fn is_trivial(g: &Element) -> bool {
    if g.is_empty() {
        return true;
    }
    if !g.in_st1() || g.len() <= 1 {
        return false;
    }
    let c = cache();
    if let Some(&hit) = c.map.read().unwrap().get(g) {
        return hit;
    }
    let (g0, g1) = g.psi_unchecked();
    let result = is_trivial(&g0) && is_trivial(&g1);
    let limit = *c.limit.read().unwrap();
    if limit > 0 {
        let mut map = c.map.write().unwrap();
        if map.len() >= limit {
            map.clear();
        }
        map.insert(g.clone(), result);
    }
    result
}

pub fn equal(g: &Element, h: &Element) -> bool {
    g == h || is_trivial(&g.mul(&h.inverse()))
}

pub const DEFAULT_ORDER_CAP: u32 = 40;

/// Least `n >= 1` with `g^n = 1`, found by repeated squaring (the group is a
/// 2-group, so the order is `2^k`). `max_doublings` bounds `k`.
pub fn order_with_cap(g: &Element, max_doublings: u32) -> Result<u64> {
    let mut power = g.clone();
    let mut order: u64 = 1;
    for _ in 0..=max_doublings {
        if is_trivial(&power) {
            return Ok(order);
        }
        power = power.mul(&power);
        order *= 2;
    }
    Err(Error::OrderCapExceeded {
        element: g.to_string(),
        cap: max_doublings,
    })
}

pub fn order(g: &Element) -> u64 {
    order_with_cap(g, DEFAULT_ORDER_CAP).expect("element order exceeded the doubling cap")
}

/// Exponent parities of the image in the abelianization `(Z/2)^3` on
/// `a, b, d` (with `c = bd`).
pub fn abelianization(g: &Element) -> [u8; 3] {
    let mut v = [0u8; 3];
    for &l in g.letters() {
        match l {
            Generator::A => v[0] ^= 1,
            Generator::B => v[1] ^= 1,
            Generator::C => {
                v[1] ^= 1;
                v[2] ^= 1
            }
            Generator::D => v[2] ^= 1,
        }
    }
    v
}

/// All reduced words of length at most `max_len`, in shortlex order.
pub fn reduced_words_up_to(max_len: usize) -> Vec<Element> {
    let mut out = vec![Element::identity()];
    let mut frontier = vec![Element::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in Generator::ALL {
                let last = w.letters.last().copied();
                let ok = match last {
                    None => true,
                    Some(Generator::A) => g != Generator::A,
                    Some(_) => g == Generator::A,
                };
                if ok {
                    let mut letters = w.letters.clone();
                    letters.push(g);
                    next.push(Element { letters });
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Ball of radius `max_len` with group-equal words removed (first word kept).
pub fn ball(max_len: usize) -> Vec<Element> {
    let mut out: Vec<Element> = Vec::new();
    for w in reduced_words_up_to(max_len) {
        if !out.iter().any(|u| equal(u, &w)) {
            out.push(w);
        }
    }
    out
}

/// Words `h` in `St(1)` with `psi(h) = (j, 1)` for the elements `j` of the
/// dihedral group `<a, c>` that admit one.
fn left_factor_lifts() -> &'static [(Element, Element)] {
    static TABLE: OnceLock<Vec<(Element, Element)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let ac: Element = "ac".parse().expect("static word");
        let a = Element::generator(Generator::A);
        let dihedral: Vec<Element> = (0..8)
            .flat_map(|k| [ac.pow(k), ac.pow(k).mul(&a)])
            .collect();
        let mut found: Vec<Option<Element>> = vec![None; dihedral.len()];
        for h in reduced_words_up_to(16).into_iter().filter(Element::in_st1) {
            let (h0, h1) = h.psi().expect("stabilizer element");
            if !is_trivial(&h1) {
                continue;
            }
            if let Some(i) = dihedral.iter().position(|j| equal(j, &h0)) {
                if found[i].is_none() {
                    found[i] = Some(h);
                }
            }
            if found.iter().all(Option::is_some) {
                break;
            }
        }
        dihedral
            .into_iter()
            .zip(found)
            .filter_map(|(j, h)| h.map(|h| (j, h)))
            .collect()
    })
}

/// Letterwise lift of the first coordinate: `psi(first_lift(g)) = (g, j)`
/// with `j` in `<a, c>`.
fn first_lift(g: &Element) -> Element {
    let raw = g.letters().iter().flat_map(|l| {
        let w: &[Generator] = match l {
            Generator::A => &[Generator::B],
            Generator::B => &[Generator::A, Generator::D, Generator::A],
            Generator::C => &[Generator::A, Generator::B, Generator::A],
            Generator::D => &[Generator::A, Generator::C, Generator::A],
        };
        w.iter().copied()
    });
    Element::reduce(raw)
}

/// Inverse of `psi`: the unique `h` in `St(1)` with `psi(h) = (g0, g1)`.
pub fn psi_preimage(g0: &Element, g1: &Element) -> Result<Element> {
    let a = Element::generator(Generator::A);
    let not_in_image = || Error::Invalid(format!("({g0}, {g1}) is not in the image of psi"));
    // psi(h0) = (g0, j0); then (1, t) with t = j0^-1 g1 remains.
    let h0 = first_lift(g0);
    let j0 = h0.psi_component(1)?;
    let t = j0.inverse().mul(g1);
    // psi(a lift(t) a) = (j, t), so (1, t) = (j^-1, 1)(j, t).
    let ht = a.mul(&first_lift(&t)).mul(&a);
    let j = ht.psi_component(0)?;
    let jinv = j.inverse();
    let fix = left_factor_lifts()
        .iter()
        .find(|(d, _)| equal(d, &jinv))
        .map(|(_, h)| h.clone())
        .ok_or_else(not_in_image)?;
    let h = h0.mul(&fix).mul(&ht);
    let (p0, p1) = h.psi()?;
    if equal(&p0, g0) && equal(&p1, g1) {
        Ok(h)
    } else {
        Err(not_in_image())
    }
}

/// Words up to this length are looked up among the shortest representatives.
const SHORTEN_BASE: usize = 24;

/// Shortest word of length at most 7 for each element, keyed by the action
/// on level 10. The key is faithful for words of length at most 60: every
/// level-6 section of such a word has length at most 1, and no single letter
/// fixes level 4.
fn short_representatives() -> &'static HashMap<Vec<u32>, Element> {
    static TABLE: OnceLock<HashMap<Vec<u32>, Element>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut map = HashMap::new();
        for w in reduced_words_up_to(7) {
            map.entry(w.level_permutation(10)).or_insert(w);
        }
        map
    })
}

/// An equal element whose word is no longer than `g`, rebuilt from
/// shortened sections.
pub fn shorten(g: &Element) -> Element {
    if g.len() <= SHORTEN_BASE {
        return match short_representatives().get(&g.level_permutation(10)) {
            Some(u) if u.len() < g.len() => u.clone(),
            _ => g.clone(),
        };
    }
    let a = Element::generator(Generator::A);
    let odd = !g.in_st1();
    let core = if odd { g.mul(&a) } else { g.clone() };
    let (g0, g1) = core.psi().expect("stabilizer element");
    let Ok(mut rebuilt) = psi_preimage(&shorten(&g0), &shorten(&g1)) else {
        return g.clone();
    };
    if odd {
        rebuilt = rebuilt.mul(&a);
    }
    if rebuilt.len() >= g.len() {
        return g.clone();
    }
    if rebuilt.len() <= SHORTEN_BASE {
        shorten(&rebuilt)
    } else {
        rebuilt
    }
}
