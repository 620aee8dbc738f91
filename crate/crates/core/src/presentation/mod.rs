//! Finitely presented groups, Tietze moves, traces and abelianization.

mod snf;
mod tietze;
mod trace;

pub use snf::{smith_normal_form, AbelianInvariants, SmithForm};
pub use tietze::{apply_move, conjugate_of, InsertStep, SideConditionViolated, SlotTarget, TietzeMove};
pub use trace::{replay_trace, DerivationTrace, ReplayReport, StepOutcome, TraceError, TraceStep, TRACE_SCHEMA_VERSION};

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freegroup::{Generator, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("duplicate generator {0}")]
    DuplicateGenerator(String),
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("{label} uses undeclared generator {gen}")]
    UndeclaredInRelator { label: String, gen: String },
    #[error("invalid label {0:?}")]
    InvalidLabel(String),
}

/// A labeled word: a relator, or a tracked element such as the longitude.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeled {
    pub label: String,
    pub word: Word,
}

impl Labeled {
    pub fn new(label: &str, word: Word) -> Self {
        Labeled {
            label: label.to_string(),
            word,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<Generator>,
    pub relators: Vec<Labeled>,
    /// Group elements rewritten alongside the relators by every move.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tracked: Vec<Labeled>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

pub(crate) fn valid_label(label: &str) -> bool {
    !label.is_empty() && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Presentation {
    pub fn new(generators: Vec<Generator>, relators: Vec<Labeled>) -> Result<Self, PresentationError> {
        let p = Presentation {
            generators,
            relators,
            tracked: Vec::new(),
            provenance: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_provenance(mut self, step: &str) -> Self {
        self.provenance = Some(step.to_string());
        self
    }

    pub fn with_tracked(mut self, label: &str, word: Word) -> Result<Self, PresentationError> {
        self.tracked.push(Labeled::new(label, word));
        self.validate()?;
        Ok(self)
    }

    /// Checks the declared-alphabet, uniqueness and label invariants.
    pub fn validate(&self) -> Result<(), PresentationError> {
        let mut seen = BTreeSet::new();
        for g in &self.generators {
            if !seen.insert(g.clone()) {
                return Err(PresentationError::DuplicateGenerator(g.to_string()));
            }
        }
        let mut labels = BTreeSet::new();
        for r in self.relators.iter().chain(&self.tracked) {
            if !valid_label(&r.label) {
                return Err(PresentationError::InvalidLabel(r.label.clone()));
            }
            if !labels.insert(r.label.as_str()) {
                return Err(PresentationError::DuplicateLabel(r.label.clone()));
            }
            if let Some(g) = r.word.generators().into_iter().find(|g| !seen.contains(g)) {
                return Err(PresentationError::UndeclaredInRelator {
                    label: r.label.clone(),
                    gen: g.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn relator(&self, label: &str) -> Option<&Word> {
        self.relators.iter().find(|r| r.label == label).map(|r| &r.word)
    }

    pub fn tracked_word(&self, label: &str) -> Option<&Word> {
        self.tracked.iter().find(|r| r.label == label).map(|r| &r.word)
    }

    pub fn has_generator(&self, g: &Generator) -> bool {
        self.generators.contains(g)
    }

    /// Relator rows by generator columns of exponent sums.
    pub fn exponent_matrix(&self) -> Vec<Vec<BigInt>> {
        self.relators
            .iter()
            .map(|r| self.exponent_vector(&r.word))
            .collect()
    }

    fn exponent_vector(&self, w: &Word) -> Vec<BigInt> {
        self.generators.iter().map(|g| BigInt::from(w.exponent_sum(g))).collect()
    }

    pub fn abelianization(&self) -> AbelianInvariants {
        smith_normal_form(&self.exponent_matrix(), self.generators.len()).invariants()
    }

    /// Image of `w` in `ℤⁿ / relator lattice`, in Smith coordinates.
    pub fn abel_image(&self, w: &Word) -> Result<AbelImage, PresentationError> {
        if let Some(g) = w.generators().into_iter().find(|g| !self.has_generator(g)) {
            return Err(PresentationError::Word(WordError::Undeclared(g.to_string())));
        }
        let snf = smith_normal_form(&self.exponent_matrix(), self.generators.len());
        let x = self.exponent_vector(w);
        let n = self.generators.len();
        let mut coords = Vec::new();
        let mut moduli = Vec::new();
        for j in 0..n {
            let y: BigInt = (0..n).map(|i| &x[i] * &snf.col_transform[i][j]).sum();
            let d = snf.diagonal.get(j).cloned().unwrap_or_else(BigInt::zero);
            if d.is_one() {
                continue;
            }
            coords.push(if d.is_zero() { y } else { y.mod_floor(&d) });
            moduli.push(d);
        }
        Ok(AbelImage { coords, moduli })
    }

    /// Structural comparison: same generator set, same labeled relators and
    /// tracked words. Returns the first difference.
    pub fn difference(&self, other: &Presentation) -> Option<String> {
        let a: BTreeSet<_> = self.generators.iter().collect();
        let b: BTreeSet<_> = other.generators.iter().collect();
        if a != b {
            return Some(format!("generators differ: {:?} vs {:?}", a, b));
        }
        for (mine, theirs, what) in [
            (&self.relators, &other.relators, "relator"),
            (&self.tracked, &other.tracked, "tracked word"),
        ] {
            if mine.len() != theirs.len() {
                return Some(format!("{what} count differs: {} vs {}", mine.len(), theirs.len()));
            }
            for r in mine {
                match theirs.iter().find(|t| t.label == r.label) {
                    None => return Some(format!("{what} {} missing", r.label)),
                    Some(t) if t.word != r.word => {
                        return Some(format!("{what} {}: {} vs {}", r.label, r.word, t.word))
                    }
                    _ => {}
                }
            }
        }
        None
    }

    /// Parses the text format: `gens:` line, `rel <label>:` lines, optional
    /// `track <label>:` and `step:` lines, `#` comments.
    pub fn parse(text: &str) -> Result<Self, PresentationError> {
        let mut gens: Option<Vec<Generator>> = None;
        let mut rels = Vec::new();
        let mut tracked = Vec::new();
        let mut provenance = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |reason: &str| PresentationError::Syntax {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (head, body) = line.split_once(':').ok_or_else(|| syntax("expected ':'"))?;
            let head = head.trim();
            if head == "gens" {
                if gens.is_some() {
                    return Err(syntax("repeated gens line"));
                }
                gens = Some(
                    body.split_whitespace()
                        .map(Generator::new)
                        .collect::<Result<Vec<_>, _>>()?,
                );
            } else if head == "step" {
                provenance = Some(body.trim().to_string());
            } else if let Some((kind, label)) = head.split_once(char::is_whitespace) {
                let label = label.trim();
                if !valid_label(label) {
                    return Err(PresentationError::InvalidLabel(label.to_string()));
                }
                let alphabet = gens.as_deref().ok_or_else(|| syntax("gens must come first"))?;
                let word = Word::parse_in(body, alphabet)?;
                match kind {
                    "rel" => rels.push(Labeled::new(label, word)),
                    "track" => tracked.push(Labeled::new(label, word)),
                    _ => return Err(syntax("expected 'rel' or 'track'")),
                }
            } else {
                return Err(syntax("unknown line"));
            }
        }
        let p = Presentation {
            generators: gens.ok_or(PresentationError::Syntax {
                line: 0,
                reason: "missing gens line".into(),
            })?,
            relators: rels,
            tracked,
            provenance,
        };
        p.validate()?;
        Ok(p)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.provenance {
            writeln!(f, "step: {p}")?;
        }
        let names: Vec<&str> = self.generators.iter().map(Generator::name).collect();
        writeln!(f, "gens: {}", names.join(" "))?;
        for r in &self.relators {
            writeln!(f, "rel {}: {}", r.label, r.word)?;
        }
        for t in &self.tracked {
            writeln!(f, "track {}: {}", t.label, t.word)?;
        }
        Ok(())
    }
}

/// An element of the abelianization: one coordinate per non-trivial
/// invariant factor, reduced modulo that factor (`0` modulus = free).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelImage {
    pub coords: Vec<BigInt>,
    pub moduli: Vec<BigInt>,
}

impl AbelImage {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// True when the image generates a cyclic abelianization.
    pub fn generates_cyclic(&self) -> bool {
        match (self.coords.as_slice(), self.moduli.as_slice()) {
            ([x], [m]) if m.is_zero() => x.magnitude().is_one(),
            ([x], [m]) => x.gcd(m).is_one(),
            _ => false,
        }
    }
}

impl fmt::Display for AbelImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .zip(&self.moduli)
            .map(|(x, m)| if m.is_zero() { x.to_string() } else { format!("{x} mod {m}") })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}
