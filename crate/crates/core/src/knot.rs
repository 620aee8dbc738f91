//! Starting data for the (-2, 3, 2s+1) pretzel knot: Wirtinger presentation,
//! the one-tunnel collapse and the longitude read off the diagram.

use serde::Serialize;
use thiserror::Error;

use crate::freegroup::{Generator, Word};
use crate::presentation::{apply_move, Labeled, Presentation, SlotTarget, TietzeMove};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnotError {
    #[error("s must be at least 3, got {0}")]
    SmallS(i64),
}

/// The knot K_s, `s ≥ 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PretzelSpec {
    s: i64,
}

impl PretzelSpec {
    pub fn new(s: i64) -> Result<Self, KnotError> {
        if s < 3 {
            return Err(KnotError::SmallS(s));
        }
        Ok(PretzelSpec { s })
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    /// Arc `F(n)` of the twist region: `f_n` for `n < 2s`, then `g`, then `b`.
    pub fn arc(&self, n: i64) -> Generator {
        assert!((0..=2 * self.s + 1).contains(&n), "arc index {n} out of range");
        if n == 2 * self.s {
            gen("g")
        } else if n == 2 * self.s + 1 {
            gen("b")
        } else {
            gen(&format!("f{n}"))
        }
    }

    /// `f_n`; panics past `f_{2s-1}`.
    pub fn f(&self, n: i64) -> Generator {
        assert!((0..2 * self.s).contains(&n), "f{n} is not an arc of K_{}", self.s);
        gen(&format!("f{n}"))
    }
}

pub(crate) fn gen(name: &str) -> Generator {
    Generator::named(name)
}

pub(crate) fn word(text: &str) -> Word {
    Word::parse(text).expect("static word")
}

pub(crate) fn letters(gens: &[&Generator]) -> Word {
    Word::from_runs(gens.iter().map(|g| (*g, 1)))
}

/// `x y X Y`-style relator `lhs · rhs⁻¹` for the crossing `x y = z w`.
fn crossing(lhs: [&Generator; 2], rhs: [&Generator; 2]) -> Word {
    Word::from_runs([(lhs[0], 1), (lhs[1], 1), (rhs[1], -1), (rhs[0], -1)])
}

pub const R_INF: &str = "r_inf";
pub const LONGITUDE: &str = "L";

pub fn relator_label(n: i64) -> String {
    format!("r{n}")
}

pub fn wirtinger_presentation(spec: PretzelSpec) -> Presentation {
    let s = spec.s;
    let [a, b, c, d, e, f, g] = ["a", "b", "c", "d", "e", "f", "g"].map(gen);
    let mut gens = vec![a.clone(), b.clone(), c.clone(), d.clone(), e.clone(), f.clone()];
    gens.extend((1..2 * s).map(|n| spec.f(n)));
    gens.push(g.clone());

    let mut rels = vec![
        crossing([&c, &a], [&a, &d]),
        crossing([&a, &c], [&c, &b]),
        crossing([&d, &f], [&f, &e]),
        crossing([&f, &e], [&e, &c]),
        crossing([&e, &c], [&c, &g]),
        crossing([&spec.f(1), &a], [&a, &f]),
        crossing([&spec.f(2), &spec.f(1)], [&spec.f(1), &a]),
    ];
    for n in 8..=2 * s + 4 {
        let (x, y, z) = (spec.f(n - 5), spec.f(n - 6), spec.f(n - 7));
        rels.push(crossing([&x, &y], [&y, &z]));
    }
    let top = spec.f(2 * s - 1);
    rels.push(crossing([&g, &top], [&top, &spec.f(2 * s - 2)]));
    rels.push(crossing([&b, &g], [&g, &top]));

    let relators = rels
        .into_iter()
        .enumerate()
        .map(|(i, w)| Labeled::new(&relator_label(i as i64 + 1), w))
        .collect();
    Presentation::new(gens, relators)
        .expect("Wirtinger schema is well formed")
        .with_provenance("G1")
}

/// Moves taking G₁ to G₂: add `f0 = a`, then use it in r6 and r7.
pub fn tunnel_collapse_moves(_spec: PretzelSpec) -> Vec<TietzeMove> {
    let f0 = gen("f0");
    let first_a = |slot: &str| SlotTarget {
        slot: slot.to_string(),
        occurrences: Some(vec![0]),
    };
    vec![
        TietzeMove::AddGenerator {
            gen: f0.clone(),
            definition: word("a"),
            label: R_INF.to_string(),
        },
        TietzeMove::SubstituteEverywhere {
            gen: gen("a"),
            by: word("f0"),
            justification: R_INF.to_string(),
            targets: vec![first_a("r6")],
        },
        TietzeMove::SubstituteEverywhere {
            gen: gen("a"),
            by: word("f0"),
            justification: R_INF.to_string(),
            targets: vec![first_a("r7")],
        },
    ]
}

pub fn tunnel_collapse(spec: PretzelSpec) -> Presentation {
    let mut p = wirtinger_presentation(spec);
    for mv in tunnel_collapse_moves(spec) {
        p = apply_move(&p, &mv).expect("tunnel collapse moves are valid");
    }
    p.with_provenance("G2")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LongitudeReading {
    pub word: Word,
    /// Power of `c` appended to cancel the crossing signs read.
    pub alpha: i64,
    pub letters_read: usize,
}

/// `a f c f_{2s-1} f_{2s-3} … f_1 c g f_{2s-2} … f_2 a e c^{-(2s+6)}`; every
/// crossing sign is read as +1.
pub fn initial_longitude(spec: PretzelSpec) -> LongitudeReading {
    let s = spec.s;
    let mut read: Vec<Generator> = vec![gen("a"), gen("f"), gen("c")];
    read.extend((1..=s).rev().map(|n| spec.f(2 * n - 1)));
    read.extend([gen("c"), gen("g")]);
    read.extend((1..s).rev().map(|n| spec.f(2 * n)));
    read.extend([gen("a"), gen("e")]);
    let alpha = -(read.len() as i64);
    let refs: Vec<&Generator> = read.iter().collect();
    let word = &letters(&refs) * &Word::power(&gen("c"), alpha);
    LongitudeReading {
        word,
        alpha,
        letters_read: read.len(),
    }
}
