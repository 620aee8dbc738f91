//! Tietze moves with checked side conditions.
//!
//! Every move maps a presentation to one of an isomorphic group, and every
//! tracked word to the image of the same element. Moves that rewrite a word
//! carry an explicit justification which is re-checked when applied.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{valid_label, Labeled, Presentation};
use crate::freegroup::{CyclicWord, Generator, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}: {reason}")]
pub struct SideConditionViolated {
    pub kind: &'static str,
    pub reason: String,
}

/// Inserts `conjugator · rotate(relator^±, rotation) · conjugator⁻¹` at `position`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsertStep {
    pub relator: String,
    #[serde(default)]
    pub inverse: bool,
    #[serde(default)]
    pub rotation: usize,
    #[serde(default)]
    pub conjugator: Word,
    #[serde(default)]
    pub position: usize,
}

impl InsertStep {
    pub fn piece(&self, relator: &Word) -> Word {
        let cyc = CyclicWord::new(relator);
        let cyc = if self.inverse { cyc.inverse() } else { cyc };
        cyc.rotate_left(self.rotation).conjugate_by(&self.conjugator)
    }

    /// The step inserting exactly `x` at the front, if `x` is a conjugate of
    /// a rotation of `relator` or its inverse.
    pub fn for_consequence(label: &str, relator: &Word, x: &Word) -> Option<InsertStep> {
        let (inverse, rotation, conjugator) = conjugate_of(x, relator)?;
        Some(InsertStep {
            relator: label.to_string(),
            inverse,
            rotation,
            conjugator,
            position: 0,
        })
    }
}

/// Decomposes `x = conj · rotate(cyc(r)^±, k) · conj⁻¹` as `(inverse, k, conj)`.
pub fn conjugate_of(x: &Word, r: &Word) -> Option<(bool, usize, Word)> {
    let (cx, conj) = x.cyclic_reduce();
    let cr = CyclicWord::new(r);
    if cr.is_empty() || cx.len() != cr.len() {
        return None;
    }
    if let Some(k) = cr.rotation_to(cx.representative()) {
        return Some((false, k, conj));
    }
    cr.inverse().rotation_to(cx.representative()).map(|k| (true, k, conj))
}

/// Which word a substitution touches; `None` occurrences means all of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotTarget {
    pub slot: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occurrences: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TietzeMove {
    /// New generator `gen` with defining relator `gen · definition⁻¹`.
    AddGenerator { gen: Generator, definition: Word, label: String },
    /// Drops `gen` together with the only relator mentioning it.
    RemoveGenerator { gen: Generator, via: String },
    /// Replaces occurrences of `gen` by `by`, where `by · gen⁻¹` is a
    /// consequence of `justification` (conjugate of a rotation, either sign).
    /// Empty `targets` means every relator but the justification and every
    /// tracked word.
    SubstituteEverywhere {
        gen: Generator,
        by: Word,
        justification: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        targets: Vec<SlotTarget>,
    },
    /// Replaces each non-overlapping occurrence of `pattern` in `slot`.
    ReplaceSubword {
        slot: String,
        pattern: Word,
        replacement: Word,
        justification: String,
        #[serde(default)]
        with_inverse: bool,
    },
    AddRelator { label: String, word: Word, derivation: Vec<InsertStep> },
    RemoveRelator {
        label: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        duplicate_of: Option<String>,
        #[serde(default)]
        derivation: Vec<InsertStep>,
    },
    /// Rewrites a relator or tracked word; a relator may not justify itself.
    RewriteSlot { slot: String, word: Word, derivation: Vec<InsertStep> },
    RotateRelator { label: String, k: i64 },
    InvertRelator { label: String },
    RenameRelator { from: String, to: String },
}

impl TietzeMove {
    pub fn kind(&self) -> &'static str {
        match self {
            TietzeMove::AddGenerator { .. } => "add_generator",
            TietzeMove::RemoveGenerator { .. } => "remove_generator",
            TietzeMove::SubstituteEverywhere { .. } => "substitute_everywhere",
            TietzeMove::ReplaceSubword { .. } => "replace_subword",
            TietzeMove::AddRelator { .. } => "add_relator",
            TietzeMove::RemoveRelator { .. } => "remove_relator",
            TietzeMove::RewriteSlot { .. } => "rewrite_slot",
            TietzeMove::RotateRelator { .. } => "rotate_relator",
            TietzeMove::InvertRelator { .. } => "invert_relator",
            TietzeMove::RenameRelator { .. } => "rename_relator",
        }
    }

    pub fn substitute(gen: &Generator, by: Word, justification: &str) -> Self {
        TietzeMove::SubstituteEverywhere {
            gen: gen.clone(),
            by,
            justification: justification.to_string(),
            targets: Vec::new(),
        }
    }

    pub fn remove_generator(gen: &Generator, via: &str) -> Self {
        TietzeMove::RemoveGenerator {
            gen: gen.clone(),
            via: via.to_string(),
        }
    }

    pub fn replace(slot: &str, pattern: Word, replacement: Word, justification: &str, with_inverse: bool) -> Self {
        TietzeMove::ReplaceSubword {
            slot: slot.to_string(),
            pattern,
            replacement,
            justification: justification.to_string(),
            with_inverse,
        }
    }

    pub fn rotate(label: &str, k: i64) -> Self {
        TietzeMove::RotateRelator {
            label: label.to_string(),
            k,
        }
    }

    pub fn invert(label: &str) -> Self {
        TietzeMove::InvertRelator {
            label: label.to_string(),
        }
    }

    pub fn rename(from: &str, to: &str) -> Self {
        TietzeMove::RenameRelator {
            from: from.to_string(),
            to: to.to_string(),
        }
    }
}

/// Applies one move, or reports the violated side condition.
pub fn apply_move(p: &Presentation, mv: &TietzeMove) -> Result<Presentation, SideConditionViolated> {
    let kind = mv.kind();
    let fail = |reason: String| SideConditionViolated { kind, reason };
    let mut out = p.clone();
    out.provenance = None;
    match mv {
        TietzeMove::AddGenerator { gen, definition, label } => {
            if p.has_generator(gen) {
                return Err(fail(format!("generator {gen} already declared")));
            }
            check_declared(p, definition).map_err(fail)?;
            check_fresh_label(p, label).map_err(fail)?;
            out.generators.push(gen.clone());
            out.relators
                .push(Labeled::new(label, &Word::gen(gen) * &definition.inverse()));
        }
        TietzeMove::RemoveGenerator { gen, via } => {
            let w = p.relator(via).ok_or_else(|| fail(format!("no relator {via}")))?;
            if w.occurrences(gen) != 1 {
                return Err(fail(format!("{gen} occurs {} times in {via}", w.occurrences(gen))));
            }
            if let Some(other) = p
                .relators
                .iter()
                .chain(&p.tracked)
                .find(|r| r.label != *via && r.word.contains_gen(gen))
            {
                return Err(fail(format!("{gen} still occurs in {}", other.label)));
            }
            out.generators.retain(|g| g != gen);
            out.relators.retain(|r| r.label != *via);
        }
        TietzeMove::SubstituteEverywhere {
            gen,
            by,
            justification,
            targets,
        } => {
            if !p.has_generator(gen) {
                return Err(fail(format!("undeclared generator {gen}")));
            }
            check_declared(p, by).map_err(fail)?;
            if by.contains_gen(gen) {
                return Err(fail(format!("replacement mentions {gen}")));
            }
            let j = p
                .relator(justification)
                .ok_or_else(|| fail(format!("no relator {justification}")))?;
            let x = by * &Word::gen(gen).inverse();
            if conjugate_of(&x, j).is_none() {
                return Err(fail(format!("{x} is not a conjugate of {justification}^±1")));
            }
            let default_targets: Vec<SlotTarget>;
            let targets = if targets.is_empty() {
                default_targets = p
                    .relators
                    .iter()
                    .chain(&p.tracked)
                    .filter(|r| r.label != *justification)
                    .map(|r| SlotTarget {
                        slot: r.label.clone(),
                        occurrences: None,
                    })
                    .collect();
                &default_targets
            } else {
                targets
            };
            for t in targets {
                if t.slot == *justification {
                    return Err(fail("the justification cannot be rewritten by itself".into()));
                }
                let slot = slot_mut(&mut out, &t.slot).ok_or_else(|| fail(format!("no slot {}", t.slot)))?;
                slot.word = match &t.occurrences {
                    None => slot.word.substitute(gen, by),
                    Some(idx) => {
                        if let Some(bad) = idx.iter().find(|&&i| i >= slot.word.occurrences(gen)) {
                            return Err(fail(format!("{} has no occurrence {bad} of {gen}", t.slot)));
                        }
                        slot.word.substitute_selected(gen, by, |i| idx.contains(&i))
                    }
                };
            }
        }
        TietzeMove::ReplaceSubword {
            slot,
            pattern,
            replacement,
            justification,
            with_inverse,
        } => {
            if pattern.is_empty() {
                return Err(fail("empty pattern".into()));
            }
            if slot == justification {
                return Err(fail("the justification cannot be rewritten by itself".into()));
            }
            check_declared(p, replacement).map_err(fail)?;
            let j = p
                .relator(justification)
                .ok_or_else(|| fail(format!("no relator {justification}")))?;
            let x = replacement * &pattern.inverse();
            if conjugate_of(&x, j).is_none() {
                return Err(fail(format!("{x} is not a conjugate of {justification}^±1")));
            }
            let target = slot_mut(&mut out, slot).ok_or_else(|| fail(format!("no slot {slot}")))?;
            let (word, hits) = replace_all(&target.word, pattern, replacement, *with_inverse);
            if hits == 0 {
                return Err(fail(format!("{pattern} does not occur in {slot}")));
            }
            target.word = word;
        }
        TietzeMove::AddRelator { label, word, derivation } => {
            check_fresh_label(p, label).map_err(fail)?;
            check_declared(p, word).map_err(fail)?;
            let got = run_derivation(p, Word::empty(), derivation, None).map_err(fail)?;
            if got != *word {
                return Err(fail(format!("derivation yields {got}, not {word}")));
            }
            out.relators.push(Labeled::new(label, word.clone()));
        }
        TietzeMove::RemoveRelator {
            label,
            duplicate_of,
            derivation,
        } => {
            let w = p.relator(label).ok_or_else(|| fail(format!("no relator {label}")))?;
            match duplicate_of {
                Some(other) => {
                    if other == label {
                        return Err(fail("a relator cannot duplicate itself".into()));
                    }
                    let o = p.relator(other).ok_or_else(|| fail(format!("no relator {other}")))?;
                    if conjugate_of(w, o).is_none() && !(w.is_empty() && o.is_empty()) {
                        return Err(fail(format!("{label} is not a conjugate of {other}^±1")));
                    }
                }
                None => {
                    let got = run_derivation(p, Word::empty(), derivation, Some(label)).map_err(fail)?;
                    if got != *w {
                        return Err(fail(format!("derivation yields {got}, not {w}")));
                    }
                }
            }
            out.relators.retain(|r| r.label != *label);
        }
        TietzeMove::RewriteSlot { slot, word, derivation } => {
            check_declared(p, word).map_err(fail)?;
            let start = slot_ref(p, slot).ok_or_else(|| fail(format!("no slot {slot}")))?.clone();
            let got = run_derivation(p, start, derivation, Some(slot)).map_err(fail)?;
            if got != *word {
                return Err(fail(format!("derivation yields {got}, not {word}")));
            }
            slot_mut(&mut out, slot).expect("slot checked").word = word.clone();
        }
        TietzeMove::RotateRelator { label, k } => {
            let r = out
                .relators
                .iter_mut()
                .find(|r| r.label == *label)
                .ok_or_else(|| fail(format!("no relator {label}")))?;
            if !r.word.is_empty() {
                let n = r.word.len() as i64;
                r.word = r.word.rotate_left(k.rem_euclid(n) as usize);
            }
        }
        TietzeMove::InvertRelator { label } => {
            let r = out
                .relators
                .iter_mut()
                .find(|r| r.label == *label)
                .ok_or_else(|| fail(format!("no relator {label}")))?;
            r.word = r.word.inverse();
        }
        TietzeMove::RenameRelator { from, to } => {
            check_fresh_label(p, to).map_err(fail)?;
            let r = out
                .relators
                .iter_mut()
                .find(|r| r.label == *from)
                .ok_or_else(|| fail(format!("no relator {from}")))?;
            r.label = to.clone();
        }
    }
    Ok(out)
}

fn check_declared(p: &Presentation, w: &Word) -> Result<(), String> {
    match w.generators().into_iter().find(|g| !p.has_generator(g)) {
        Some(g) => Err(format!("undeclared generator {g}")),
        None => Ok(()),
    }
}

fn check_fresh_label(p: &Presentation, label: &str) -> Result<(), String> {
    if !valid_label(label) {
        return Err(format!("invalid label {label:?}"));
    }
    if p.relators.iter().chain(&p.tracked).any(|r| r.label == label) {
        return Err(format!("label {label} already in use"));
    }
    Ok(())
}

fn slot_ref<'a>(p: &'a Presentation, label: &str) -> Option<&'a Word> {
    p.relator(label).or_else(|| p.tracked_word(label))
}

fn slot_mut<'a>(p: &'a mut Presentation, label: &str) -> Option<&'a mut Labeled> {
    p.relators
        .iter_mut()
        .chain(p.tracked.iter_mut())
        .find(|r| r.label == label)
}

/// Left-to-right non-overlapping replacement; returns the word and hit count.
pub(crate) fn replace_all(w: &Word, pattern: &Word, replacement: &Word, with_inverse: bool) -> (Word, usize) {
    let letters = w.letters();
    let pat = pattern.letters();
    let inv = pattern.inverse();
    let inv_rep = replacement.inverse();
    let mut out = Vec::with_capacity(letters.len());
    let mut hits = 0;
    let mut i = 0;
    while i < letters.len() {
        let rest = &letters[i..];
        if rest.starts_with(pat) {
            out.extend_from_slice(replacement.letters());
            i += pat.len();
            hits += 1;
        } else if with_inverse && rest.starts_with(inv.letters()) {
            out.extend_from_slice(inv_rep.letters());
            i += pat.len();
            hits += 1;
        } else {
            out.push(letters[i].clone());
            i += 1;
        }
    }
    (Word::from_letters(out), hits)
}

fn run_derivation(
    p: &Presentation,
    start: Word,
    steps: &[InsertStep],
    forbidden: Option<&str>,
) -> Result<Word, String> {
    let mut w = start;
    for (n, st) in steps.iter().enumerate() {
        if Some(st.relator.as_str()) == forbidden {
            return Err(format!("step {n} uses {} to justify itself", st.relator));
        }
        let r = p
            .relator(&st.relator)
            .ok_or_else(|| format!("step {n}: no relator {}", st.relator))?;
        check_declared(p, &st.conjugator)?;
        if st.position > w.len() {
            return Err(format!("step {n}: position {} beyond length {}", st.position, w.len()));
        }
        w = w.insert_at(st.position, &st.piece(r));
    }
    Ok(w)
}
