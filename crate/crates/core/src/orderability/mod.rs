//! Sign calculus for actions of the filled group on the line, and a bounded
//! search for fixed-point obstructions.
//!
//! A fact `w: Positive` reads "every point moves up under `w`" in global mode
//! and "the base point moves up under `w`" in at-point mode.  Points are acted
//! on from the right, `x·(uv) = (x·u)·v`, by order-preserving bijections.

mod certificate;
mod cone;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::freegroup::Word;
use crate::presentation::conjugate_of;

pub use certificate::{
    replay_certificate, BranchRecord, Certificate, CertificateParams, CertificateReplay, ContradictionRecord,
    JournalLine, CERTIFICATE_VERSION, ENGINE_VERSION,
};
pub use cone::{ConeState, Contradiction, ContradictionKind, Entry, Limits, Rule, Saturation, Universe};
pub use search::{
    branch_hints, case_tree, nlo_search, peripheral_relators, replay_lemma_l_positive, BranchSpec, NloOutcome, SearchOptions,
    DEFAULT_BUDGET, DEFAULT_DEPTH,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
    Identity,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
            Sign::Identity => Sign::Identity,
        }
    }

    pub fn is_strict(self) -> bool {
        self != Sign::Identity
    }

    /// Sign of `uv` from the signs of `u` and `v`; `None` when undetermined.
    pub fn product(self, o: Sign) -> Option<Sign> {
        match (self, o) {
            (a, Sign::Identity) => Some(a),
            (Sign::Identity, b) => Some(b),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "Positive",
            Sign::Negative => "Negative",
            Sign::Identity => "Identity",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Signs hold at every point; closed under conjugation.
    Global,
    /// Signs hold at one fixed base point.
    AtPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fact {
    pub word: Word,
    pub sign: Sign,
}

impl Fact {
    pub fn new(word: Word, sign: Sign) -> Self {
        Fact { word, sign }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.word, self.sign)
    }
}

/// `(∀x: x·u > x·v)` holds iff the returned word is globally Positive.
pub fn pointwise_compare(u: &Word, v: &Word) -> Word {
    &v.inverse() * u
}

/// How `w` is a consequence of a relator: `w = g · rotate(r^±, k) · g⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatorUse {
    pub relator: String,
    pub inverted: bool,
    pub rotation: usize,
    pub conjugator: Word,
}

/// `Some` when `w` is a conjugate of a rotation of `relator` or its inverse.
pub fn relator_rotation_consequence(w: &Word, label: &str, relator: &Word) -> Option<RelatorUse> {
    conjugate_of(w, relator).map(|(inverted, rotation, conjugator)| RelatorUse {
        relator: label.to_string(),
        inverted,
        rotation,
        conjugator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(t: &str) -> Word {
        Word::parse(t).unwrap()
    }

    #[test]
    fn sign_table() {
        use Sign::*;
        assert_eq!(Positive.product(Positive), Some(Positive));
        assert_eq!(Positive.product(Identity), Some(Positive));
        assert_eq!(Identity.product(Negative), Some(Negative));
        assert_eq!(Positive.product(Negative), None);
        assert_eq!(Negative.flip(), Positive);
    }

    #[test]
    fn compare_and_consequence() {
        assert_eq!(pointwise_compare(&w("c l^3"), &w("c l^2")), w("l"));
        let r = w("c l c L C L^3 C L c l c l^2");
        let u = relator_rotation_consequence(&w("a L C L^3 C L c l c l^2 c l c A"), "r", &r).unwrap();
        assert!(!u.inverted);
        assert_eq!(u.conjugator, w("a"));
        assert!(relator_rotation_consequence(&w("c l"), "r", &r).is_none());
    }
}
