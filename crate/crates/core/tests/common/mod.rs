//! Random Tietze move sequences shared by the integration tests.
#![allow(dead_code)]

use pretzel_pi1::freegroup::{Generator, Letter, Word};
use pretzel_pi1::knot::{tunnel_collapse, wirtinger_presentation, PretzelSpec};
use pretzel_pi1::presentation::{apply_move, InsertStep, Presentation, TietzeMove};
use pretzel_pi1::surgery::{surgered_presentation, Slope};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn starts() -> Vec<Presentation> {
    let k = |s| PretzelSpec::new(s).unwrap();
    vec![
        wirtinger_presentation(k(3)),
        tunnel_collapse(k(4)),
        surgered_presentation(3, Slope::new(19, 1).unwrap()).unwrap().presentation,
        surgered_presentation(4, Slope::new(-5, 2).unwrap()).unwrap().presentation,
        Presentation::parse("gens: a b\nrel t: a b A B").unwrap(),
        Presentation::parse("gens: x y\nrel u: x x x\nrel w: y y X X").unwrap(),
    ]
}

fn random_word(rng: &mut ChaCha8Rng, gens: &[Generator], max: usize) -> Word {
    let n = rng.gen_range(0..=max);
    Word::from_letters((0..n).map(|_| {
        let g = gens.choose(rng).unwrap().clone();
        Letter::new(g, if rng.gen_bool(0.5) { 1 } else { -1 })
    }))
}

fn step(rng: &mut ChaCha8Rng, p: &Presentation, label: &str, into: &Word) -> InsertStep {
    let r = p.relator(label).unwrap();
    InsertStep {
        relator: label.to_string(),
        inverse: rng.gen_bool(0.5),
        rotation: rng.gen_range(0..r.len().max(1)),
        conjugator: random_word(rng, &p.generators, 3),
        position: rng.gen_range(0..=into.len()),
    }
}

/// A move that is usually valid by construction; about one in eight is junk
/// that must be rejected.
pub fn random_move(rng: &mut ChaCha8Rng, p: &Presentation, fresh: &mut usize) -> TietzeMove {
    *fresh += 1;
    let n = *fresh;
    let labels: Vec<String> = p.relators.iter().map(|r| r.label.clone()).collect();
    let Some(label) = labels.choose(rng).cloned() else {
        return TietzeMove::AddGenerator {
            gen: Generator::named(&format!("x{n}")),
            definition: Word::empty(),
            label: format!("d{n}"),
        };
    };
    let r = p.relator(&label).unwrap().clone();
    match rng.gen_range(0..9) {
        0 => TietzeMove::AddGenerator {
            gen: Generator::named(&format!("x{n}")),
            definition: random_word(rng, &p.generators, 4),
            label: format!("d{n}"),
        },
        1 => {
            let first = step(rng, p, &label, &Word::empty());
            let w0 = first.piece(&r);
            let other = labels.choose(rng).unwrap().clone();
            let second = step(rng, p, &other, &w0);
            let word = w0.insert_at(second.position, &second.piece(p.relator(&other).unwrap()));
            TietzeMove::AddRelator {
                label: format!("a{n}"),
                word,
                derivation: vec![first, second],
            }
        }
        2 => TietzeMove::RemoveRelator {
            label: label.clone(),
            duplicate_of: labels.choose(rng).cloned(),
            derivation: vec![],
        },
        3 => TietzeMove::rotate(&label, rng.gen_range(-20..20)),
        4 => TietzeMove::invert(&label),
        5 => TietzeMove::rename(&label, &format!("n{n}")),
        6 => {
            // eliminate a generator occurring once in `label`
            let once: Vec<Generator> = r.generators().into_iter().filter(|g| r.occurrences(g) == 1).collect();
            match once.choose(rng) {
                Some(g) => {
                    let i = r.letters().iter().position(|l| &l.gen == g).unwrap();
                    let (a, b) = (r.prefix(i), Word::from_letters(r.letters()[i + 1..].iter().cloned()));
                    let mut by = &a.inverse() * &b.inverse();
                    if r.letters()[i].sign() < 0 {
                        by = by.inverse();
                    }
                    if rng.gen_bool(0.5) {
                        TietzeMove::substitute(g, by, &label)
                    } else {
                        TietzeMove::remove_generator(g, &label)
                    }
                }
                None => TietzeMove::remove_generator(&p.generators[0], &label),
            }
        }
        7 => {
            let slot = labels.choose(rng).unwrap().clone();
            let w = p.relator(&slot).unwrap().clone();
            if slot == label || w.is_empty() {
                return TietzeMove::invert(&slot);
            }
            let st = step(rng, p, &label, &Word::empty());
            if rng.gen_bool(0.5) {
                let i = rng.gen_range(0..w.len());
                let j = rng.gen_range(i + 1..=w.len().min(i + 3));
                let pattern = Word::from_letters(w.letters()[i..j].iter().cloned());
                TietzeMove::replace(&slot, pattern.clone(), &st.piece(&r) * &pattern, &label, false)
            } else {
                let st = InsertStep {
                    position: rng.gen_range(0..=w.len()),
                    ..st
                };
                TietzeMove::RewriteSlot {
                    slot: slot.clone(),
                    word: w.insert_at(st.position, &st.piece(&r)),
                    derivation: vec![st],
                }
            }
        }
        _ => TietzeMove::AddRelator {
            label: format!("j{n}"),
            word: random_word(rng, &p.generators, 5),
            derivation: vec![],
        },
    }
}

pub struct SequenceStats {
    pub applied: usize,
    pub rejected: usize,
    /// Index of the first accepted move that changed the abelianization.
    pub broken_at: Option<usize>,
}

/// Applies `len` random moves, checking the Smith form after every accepted one.
pub fn random_sequence(rng: &mut ChaCha8Rng, len: usize) -> SequenceStats {
    let mut p = starts().choose(rng).unwrap().clone();
    let inv = p.abelianization();
    let mut fresh = 0;
    let mut stats = SequenceStats {
        applied: 0,
        rejected: 0,
        broken_at: None,
    };
    for i in 0..len {
        let mv = random_move(rng, &p, &mut fresh);
        match apply_move(&p, &mv) {
            Ok(next) => {
                stats.applied += 1;
                if next.abelianization() != inv && stats.broken_at.is_none() {
                    stats.broken_at = Some(i);
                }
                p = next;
            }
            Err(_) => stats.rejected += 1,
        }
    }
    stats
}
