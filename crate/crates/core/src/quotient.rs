//! The order-16 quotient `G/K` where `K` is the normal closure of `abab`.
//!
//! `G/K` is `Z/2 x D8`: the `Z/2` factor is generated by the image of `b`,
//! the dihedral factor by the images of `a` (reflection `s`) and `d`
//! (reflection `rs`). An element is stored as `(b, r^k s^f)`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::group::{reduced_words_up_to, Element, Generator};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct QElement {
    b: u8,
    rot: u8,
    refl: u8,
}

impl QElement {
    pub const IDENTITY: QElement = QElement {
        b: 0,
        rot: 0,
        refl: 0,
    };

    /// Dense index in `0..16`.
    pub fn index(self) -> usize {
        (self.b as usize) * 8 + (self.refl as usize) * 4 + self.rot as usize
    }

    pub fn from_index(i: usize) -> QElement {
        assert!(i < 16);
        QElement {
            b: (i / 8) as u8,
            refl: ((i / 4) % 2) as u8,
            rot: (i % 4) as u8,
        }
    }

    pub fn all() -> impl Iterator<Item = QElement> {
        (0..16).map(QElement::from_index)
    }

    pub fn mul(self, o: QElement) -> QElement {
        let rot = if self.refl == 0 {
            self.rot + o.rot
        } else {
            self.rot + 4 - o.rot
        };
        QElement {
            b: self.b ^ o.b,
            rot: rot % 4,
            refl: self.refl ^ o.refl,
        }
    }

    pub fn inverse(self) -> QElement {
        if self.refl == 1 {
            self
        } else {
            QElement {
                b: self.b,
                rot: (4 - self.rot) % 4,
                refl: 0,
            }
        }
    }

    pub fn is_identity(self) -> bool {
        self == Self::IDENTITY
    }

    pub fn pow(self, n: u32) -> QElement {
        (0..n).fold(Self::IDENTITY, |acc, _| acc.mul(self))
    }

    pub fn commutator(g: QElement, h: QElement) -> QElement {
        g.inverse().mul(h.inverse()).mul(g).mul(h)
    }

    /// The `St(1)`-coset: `0` for the stabilizer, `1` otherwise.
    pub fn st_coset(self) -> u8 {
        (self.rot + self.refl) % 2
    }

    pub fn bar(self) -> QElement {
        if self.st_coset() == 0 {
            self
        } else {
            self.mul(pi_generator(Generator::A))
        }
    }

    /// Components used by the polycyclic series `G/K > <K,b,ad> > <K,ad> > 1`.
    pub fn reflection_bit(self) -> u8 {
        self.refl
    }

    pub fn b_bit(self) -> u8 {
        self.b
    }

    pub fn rotation(self) -> u8 {
        self.rot
    }

    /// Canonical witness word for this class (shortlex-least reduced word).
    pub fn name(self) -> &'static str {
        &quotient_data().names[self.index()]
    }

    /// Position in the fixed linear order on `G/K` (shortlex on names).
    pub fn rank(self) -> usize {
        quotient_data().rank[self.index()]
    }

    /// The canonical witness word as an element.
    pub fn representative(self) -> &'static Element {
        &quotient_data().reps[self.index()]
    }

    pub fn parse_name(s: &str) -> Result<QElement> {
        let e: Element = s.parse()?;
        Ok(pi_k(&e))
    }
}

impl PartialOrd for QElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for QElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn pi_generator(g: Generator) -> QElement {
    match g {
        Generator::A => QElement {
            b: 0,
            rot: 0,
            refl: 1,
        },
        Generator::B => QElement {
            b: 1,
            rot: 0,
            refl: 0,
        },
        Generator::C => QElement {
            b: 1,
            rot: 1,
            refl: 1,
        },
        Generator::D => QElement {
            b: 0,
            rot: 1,
            refl: 1,
        },
    }
}

pub fn pi_k(g: &Element) -> QElement {
    g.letters()
        .iter()
        .fold(QElement::IDENTITY, |acc, &l| acc.mul(pi_generator(l)))
}

pub fn st_coset(q: QElement) -> u8 {
    q.st_coset()
}

pub fn bar_q(q: QElement) -> QElement {
    q.bar()
}

struct QuotientData {
    names: Vec<String>,
    reps: Vec<Element>,
    rank: Vec<usize>,
    by_rank: Vec<QElement>,
}

fn quotient_data() -> &'static QuotientData {
    static DATA: OnceLock<QuotientData> = OnceLock::new();
    DATA.get_or_init(|| {
        let mut reps: Vec<Option<Element>> = vec![None; 16];
        for w in reduced_words_up_to(6) {
            let slot = &mut reps[pi_k(&w).index()];
            if slot.is_none() {
                *slot = Some(w);
            }
        }
        let reps: Vec<Element> = reps
            .into_iter()
            .map(|r| r.expect("every class of G/K has a word of length <= 6"))
            .collect();
        let names: Vec<String> = reps.iter().map(|r| r.to_string()).collect();
        let mut order: Vec<usize> = (0..16).collect();
        order.sort_by(|&i, &j| {
            reps[i]
                .len()
                .cmp(&reps[j].len())
                .then(names[i].cmp(&names[j]))
        });
        let mut rank = vec![0; 16];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let by_rank = order.iter().map(|&i| QElement::from_index(i)).collect();
        QuotientData {
            names,
            reps,
            rank,
            by_rank,
        }
    })
}

/// Classes of `G/K` listed in the fixed linear order.
pub fn ordered_classes() -> &'static [QElement] {
    &quotient_data().by_rank
}

/// The image set `F` of `St(1)` under `(pi_K x pi_K) . psi` together with
/// the map `omega: F -> G/K`.
#[derive(Clone, Debug)]
pub struct PsiImageTable {
    omega: HashMap<(QElement, QElement), QElement>,
    fibers: HashMap<QElement, Vec<(QElement, QElement)>>,
}

impl PsiImageTable {
    /// Closure of the images of the generators `b, c, d, aba, aca, ada` of
    /// `St(1)` inside `(G/K)^2`, carrying `pi_K` of the preimage along. A
    /// pair reached with two different `pi_K` values is an error.
    pub fn compute() -> Result<Self> {
        let gens: Vec<Element> = ["b", "c", "d", "aba", "aca", "ada"]
            .iter()
            .map(|s| s.parse().expect("static generator"))
            .collect();
        let gen_images: Vec<((QElement, QElement), QElement)> = gens
            .iter()
            .map(|g| {
                let (g0, g1) = g.psi().expect("generators of St(1)");
                ((pi_k(&g0), pi_k(&g1)), pi_k(g))
            })
            .collect();
        let start = ((QElement::IDENTITY, QElement::IDENTITY), QElement::IDENTITY);
        let mut omega = HashMap::new();
        omega.insert(start.0, start.1);
        let mut queue = VecDeque::from([start]);
        while let Some(((p0, p1), w)) = queue.pop_front() {
            for &((g0, g1), gw) in &gen_images {
                let pair = (p0.mul(g0), p1.mul(g1));
                let value = w.mul(gw);
                match omega.get(&pair) {
                    Some(&existing) if existing != value => {
                        return Err(Error::Internal(format!(
                            "omega is not well defined at ({}, {}): {} vs {}",
                            pair.0, pair.1, existing, value
                        )));
                    }
                    Some(_) => {}
                    None => {
                        omega.insert(pair, value);
                        queue.push_back((pair, value));
                    }
                }
            }
        }
        let mut fibers: HashMap<QElement, Vec<(QElement, QElement)>> = HashMap::new();
        for (&pair, &w) in &omega {
            fibers.entry(w).or_default().push(pair);
        }
        for fiber in fibers.values_mut() {
            fiber.sort_by_key(|&(x, y)| (x.rank(), y.rank()));
        }
        Ok(PsiImageTable { omega, fibers })
    }

    pub fn global() -> &'static PsiImageTable {
        static TABLE: OnceLock<PsiImageTable> = OnceLock::new();
        TABLE.get_or_init(|| PsiImageTable::compute().expect("psi image table"))
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn contains(&self, q0: QElement, q1: QElement) -> bool {
        self.omega.contains_key(&(q0, q1))
    }

    pub fn omega(&self, q0: QElement, q1: QElement) -> Option<QElement> {
        self.omega.get(&(q0, q1)).copied()
    }

    /// All pairs of `F` with `omega = target`.
    pub fn fiber(&self, target: QElement) -> &[(QElement, QElement)] {
        self.fibers.get(&target).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn pairs(&self) -> Vec<((QElement, QElement), QElement)> {
        let mut v: Vec<_> = self.omega.iter().map(|(&p, &w)| (p, w)).collect();
        v.sort_by_key(|&((x, y), w)| (w.rank(), x.rank(), y.rank()));
        v
    }

    /// Plain-text dump, one `q0 q1 -> omega` row per pair.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for ((x, y), w) in self.pairs() {
            let _ = writeln!(out, "{:>6} {:>6} -> {}", x.name(), y.name(), w.name());
        }
        out
    }
}

pub fn in_psi_image(q0: QElement, q1: QElement) -> bool {
    PsiImageTable::global().contains(q0, q1)
}

/// Multiplication table of `G/K` in the fixed order, with canonical names.
pub fn multiplication_table_dump() -> String {
    let classes = ordered_classes();
    let width = classes.iter().map(|q| q.name().len()).max().unwrap_or(1) + 1;
    let mut out = String::new();
    let _ = write!(out, "{:>width$} |", "*");
    for q in classes {
        let _ = write!(out, "{:>width$}", q.name());
    }
    out.push('\n');
    for p in classes {
        let _ = write!(out, "{:>width$} |", p.name());
        for q in classes {
            let _ = write!(out, "{:>width$}", p.mul(*q).name());
        }
        out.push('\n');
    }
    out
}

/// Distinct `pi_K` values over all reduced words up to `max_len`.
pub fn image_of_ball(max_len: usize) -> BTreeMap<usize, Element> {
    let mut seen = BTreeMap::new();
    for w in reduced_words_up_to(max_len) {
        seen.entry(pi_k(&w).index()).or_insert(w);
    }
    seen
}
