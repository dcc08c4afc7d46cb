//! Arithmetic in the Grigorchuk group and a decision pipeline for quadratic
//! equations with constraints modulo the normal subgroup `K = <<abab>>`.

pub mod equation;
pub mod error;
pub mod group;
pub mod pipeline;
pub mod quotient;
pub mod split;
pub mod standard;
pub mod width;

pub use equation::{Atom, Constraint, MixedWord, StandardQuadratic, Variable};
pub use error::{Error, Result};
pub use group::{equal, is_trivial, order, psi_preimage, Element, Generator, Vertex};
pub use quotient::{pi_k, PsiImageTable, QElement};
pub use split::{split_standard, split_word, Split, SplitOutcome};
pub use standard::{to_standard, ElementarySubstitution, SubstitutionAutomorphism};
