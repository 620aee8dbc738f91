//! The scripted simplification G₁ → G_K: closed forms, induction oracles,
//! the full move trace and the longitude rewrite.

use serde::Serialize;
use thiserror::Error;

use crate::freegroup::{Generator, Word};
use crate::knot::{self, gen, initial_longitude, word, PretzelSpec, LONGITUDE, R_INF};
use crate::presentation::{
    apply_move, conjugate_of, DerivationTrace, InsertStep, Presentation, SlotTarget, TietzeMove, TraceStep,
    TRACE_SCHEMA_VERSION,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: i64, max: i64 },
    #[error("ascending product {from}..{to} is not allowed")]
    AscendingProduct { from: i64, to: i64 },
    #[error(transparent)]
    Knot(#[from] knot::KnotError),
    #[error("move {index} ({tag}) failed: {reason}")]
    Move { index: usize, tag: String, reason: String },
    #[error("checkpoint {name}: expected {expected}, got {got}")]
    Checkpoint { name: String, expected: String, got: String },
    #[error("no justification: {0}")]
    Justification(String),
}

fn pw(name: &str, n: i64) -> Word {
    Word::power(&gen(name), n)
}

fn g1(g: &Generator) -> Word {
    Word::gen(g)
}

fn inv(g: &Generator) -> Word {
    Word::power(g, -1)
}

fn cat(parts: &[&Word]) -> Word {
    Word::concat(parts.iter().copied())
}

/// `∏_{n=from}^{to} term(n)` with the index running downwards. `from = to - 1`
/// is the empty product; anything lower is rejected.
pub fn descending_product(from: i64, to: i64, term: impl Fn(i64) -> Word) -> Result<Word, DerivationError> {
    if from < to - 1 {
        return Err(DerivationError::AscendingProduct { from, to });
    }
    let terms: Vec<Word> = (to..=from).rev().map(term).collect();
    Ok(Word::concat(&terms))
}

/// Relator `R_i` of G_{3,i}.
pub fn closed_form_r(i: i64, s: i64) -> Result<Word, DerivationError> {
    let spec = PretzelSpec::new(s)?;
    if !(1..=2 * s).contains(&i) {
        return Err(DerivationError::IndexOutOfRange { index: i, max: 2 * s });
    }
    let x = |n: i64| spec.arc(n);
    let a_bar = pw("a", -1);
    let j = (i + 1) / 2;
    Ok(if i % 2 == 1 {
        let (p, q) = (x(2 * j - 1), x(2 * j));
        cat(&[
            &cat(&[&inv(&p), &inv(&q)]).pow(j - 1),
            &inv(&p),
            &cat(&[&g1(&q), &g1(&p)]).pow(j),
            &a_bar,
        ])
    } else {
        let (p, q) = (x(2 * j), x(2 * j + 1));
        cat(&[
            &cat(&[&inv(&p), &inv(&q)]).pow(j),
            &g1(&p),
            &cat(&[&g1(&q), &g1(&p)]).pow(j),
            &a_bar,
        ])
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LongitudeFragments {
    pub index: i64,
    pub left: Word,
    pub right: Word,
}

impl LongitudeFragments {
    /// `a f c 𝔏 c g 𝔕 a e c^{-(2s+6)}`.
    pub fn assemble(&self, s: i64) -> Word {
        cat(&[
            &word("a f c"),
            &self.left,
            &word("c g"),
            &self.right,
            &word("a e"),
            &pw("c", -(2 * s + 6)),
        ])
    }
}

/// Left/right pieces of the longitude after corkscrew step `i`.
pub fn closed_form_l_fragments(i: i64, s: i64) -> Result<LongitudeFragments, DerivationError> {
    let spec = PretzelSpec::new(s)?;
    if !(1..=2 * s - 2).contains(&i) {
        return Err(DerivationError::IndexOutOfRange { index: i, max: 2 * s - 2 });
    }
    let f = |n: i64| spec.f(n);
    let j = (i + 1) / 2;
    let (left, right) = if i % 2 == 1 {
        let odd_tail = descending_product(s, j + 1, |n| g1(&f(2 * n - 1)))?;
        let even_tail = descending_product(s - 1, j, |n| g1(&f(2 * n)))?;
        let pair = cat(&[&g1(&f(2 * j)), &g1(&f(2 * j - 1))]).pow(j - 1);
        (
            cat(&[&odd_tail, &Word::power(&f(2 * j), -(j - 1)), &g1(&f(2 * j - 1)), &pair]),
            cat(&[&even_tail, &Word::power(&f(2 * j - 1), -(j - 1)), &pair]),
        )
    } else {
        let odd_tail = descending_product(s, j + 1, |n| g1(&f(2 * n - 1)))?;
        let even_tail = descending_product(s - 1, j + 1, |n| g1(&f(2 * n)))?;
        let pair = cat(&[&g1(&f(2 * j + 1)), &g1(&f(2 * j))]);
        (
            cat(&[&odd_tail, &Word::power(&f(2 * j), -j), &pair.pow(j)]),
            cat(&[&even_tail, &Word::power(&f(2 * j + 1), -(j - 1)), &g1(&f(2 * j)), &pair.pow(j - 1)]),
        )
    };
    Ok(LongitudeFragments { index: i, left, right })
}

/// Longitude after corkscrew step `i`, `1 ≤ i ≤ 2s`.
pub fn longitude_after_corkscrew(i: i64, s: i64) -> Result<Word, DerivationError> {
    if i <= 2 * s - 2 {
        return Ok(closed_form_l_fragments(i, s)?.assemble(s));
    }
    let spec = PretzelSpec::new(s)?;
    let top = g1(&spec.f(2 * s - 1));
    let tail = cat(&[&word("a e"), &pw("c", -(2 * s + 6))]);
    if i == 2 * s - 1 {
        let gt = cat(&[&word("g"), &top]);
        Ok(cat(&[
            &word("a f c"),
            &pw("g", -(s - 1)),
            &top,
            &gt.pow(s - 1),
            &word("c g"),
            &top.pow(-(s - 1)),
            &gt.pow(s - 1),
            &tail,
        ]))
    } else if i == 2 * s {
        let bg = word("b g");
        Ok(cat(&[
            &word("a f c"),
            &pw("g", -s),
            &bg.pow(s),
            &word("c"),
            &pw("b", -(s - 1)),
            &word("g"),
            &bg.pow(s - 1),
            &tail,
        ]))
    } else {
        Err(DerivationError::IndexOutOfRange { index: i, max: 2 * s })
    }
}

/// The final relator `c l c L C L^s C L c l c l^{s-1}`.
pub fn knot_relator(s: i64) -> Word {
    cat(&[&word("c l c L C"), &pw("l", -s), &word("C L c l c"), &pw("l", s - 1)])
}

/// `c^{-(2s-2)} l c l^s c l^s c l c^{-(2s+9)}`.
pub fn simplified_longitude(s: i64) -> Word {
    cat(&[
        &pw("c", -(2 * s - 2)),
        &word("l c"),
        &pw("l", s),
        &word("c"),
        &pw("l", s),
        &word("c l"),
        &pw("c", -(2 * s + 9)),
    ])
}

/// Longitudes displayed for the later stages (`"G3_2s"`, `"G4"`, …, `"G12"`).
pub fn stage_longitude(stage: &str, s: i64) -> Option<Word> {
    let c = |n: i64| pw("c", n);
    let l = |n: i64| pw("l", n);
    let h = |n: i64| pw("h", n);
    let head = || cat(&[&word("h c"), &pw("g", -s), &h(s), &word("c")]);
    Some(match stage {
        "G3_2s" => longitude_after_corkscrew(2 * s, s).ok()?,
        "G4" | "G5" => cat(&[&head(), &pw("b", -(s - 1)), &word("g"), &h(s - 1), &word("a e"), &c(-(2 * s + 6))]),
        "G6" => cat(&[&head(), &pw("b", -(s - 1)), &word("g"), &h(s), &word("F e"), &c(-(2 * s + 6))]),
        "G7" => cat(&[&head(), &word("k L").pow(s - 1), &word("g"), &h(s), &word("F e"), &c(-(2 * s + 6))]),
        "G8" => cat(&[&head(), &word("k L").pow(s - 1), &word("g"), &h(s), &word("e"), &c(-(2 * s + 7))]),
        "G9" => cat(&[&head(), &word("g c G L").pow(s - 1), &word("g"), &h(s), &word("e"), &c(-(2 * s + 7))]),
        "G10" => cat(&[
            &word("h"),
            &pw("e", -s),
            &word("c"),
            &h(s),
            &word("c"),
            &word("C e c E c L").pow(s - 1),
            &word("C e c"),
            &h(s),
            &word("e"),
            &c(-(2 * s + 7)),
        ]),
        "G11" => cat(&[
            &c(-s),
            &word("h c"),
            &h(s),
            &word("c"),
            &word("C H c h c H C h c L").pow(s - 1),
            &word("C H c h c"),
            &h(s - 1),
            &word("c h"),
            &c(-(2 * s + 7)),
        ]),
        "G12" | "GK" => cat(&[
            &c(-(s - 1)),
            &word("l c"),
            &l(s),
            &word("L c l c L C").pow(s - 1),
            &word("L c l c"),
            &l(s - 1),
            &word("c l"),
            &c(-(2 * s + 8)),
        ]),
        _ => return None,
    })
}

// --- induction oracles -------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct InductionStep {
    /// Index of the closed form reached by this step.
    pub index: i64,
    pub relator: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InductionReport {
    pub s: i64,
    pub family: &'static str,
    pub steps: Vec<InductionStep>,
    pub pass: bool,
}

impl InductionReport {
    pub fn first_failure(&self) -> Option<i64> {
        self.steps.iter().find(|st| !st.ok).map(|st| st.index)
    }
}

/// Substitution used by corkscrew step `i`: `F(i-1) = F(i)⁻¹ F(i+1) F(i)`.
fn corkscrew_substitution(spec: PretzelSpec, i: i64) -> (Generator, Word, String) {
    let (p, q) = (spec.arc(i), spec.arc(i + 1));
    (spec.arc(i - 1), cat(&[&inv(&p), &g1(&q), &g1(&p)]), knot::relator_label(i + 6))
}

fn induction(
    s: i64,
    family: &'static str,
    start: Word,
    last: i64,
    expected: impl Fn(i64) -> Result<Word, DerivationError>,
) -> Result<InductionReport, DerivationError> {
    let spec = PretzelSpec::new(s)?;
    let mut cur = start;
    let mut steps = Vec::new();
    let first = if family == "R" { 1 } else { 2 };
    for i in first..=last {
        let (g, by, label) = corkscrew_substitution(spec, i);
        cur = cur.substitute(&g, &by);
        let want = expected(i)?;
        let ok = cur == want;
        steps.push(InductionStep {
            index: i,
            relator: label,
            ok,
            detail: (!ok).then(|| format!("expected {want}, got {cur}")),
        });
    }
    let pass = steps.iter().all(|st| st.ok);
    Ok(InductionReport { s, family, steps, pass })
}

/// Iterative substitution from `f0 ā` against `R_i` for every `i ≤ 2s`.
pub fn verify_r_induction(s: i64) -> Result<InductionReport, DerivationError> {
    verify_r_induction_with(s, closed_form_r)
}

pub fn verify_r_induction_with(
    s: i64,
    closed: impl Fn(i64, i64) -> Result<Word, DerivationError>,
) -> Result<InductionReport, DerivationError> {
    induction(s, "R", word("f0 A"), 2 * s, |i| closed(i, s))
}

/// Iterative substitution from `L₁` against the fragment formulas, then the
/// last two eliminations against `L_{3,2s-1}` and `L_{3,2s}`.
pub fn verify_l_induction(s: i64) -> Result<InductionReport, DerivationError> {
    verify_l_induction_with(s, closed_form_l_fragments)
}

pub fn verify_l_induction_with(
    s: i64,
    fragments: impl Fn(i64, i64) -> Result<LongitudeFragments, DerivationError>,
) -> Result<InductionReport, DerivationError> {
    let spec = PretzelSpec::new(s)?;
    let l1 = initial_longitude(spec).word;
    let base = fragments(1, s)?.assemble(s);
    let mut report = induction(s, "L", l1.clone(), 2 * s, |i| {
        if i <= 2 * s - 2 {
            Ok(fragments(i, s)?.assemble(s))
        } else {
            longitude_after_corkscrew(i, s)
        }
    })?;
    let ok = base == l1;
    report.steps.insert(
        0,
        InductionStep {
            index: 1,
            relator: "-".into(),
            ok,
            detail: (!ok).then(|| format!("expected {l1}, got {base}")),
        },
    );
    report.pass &= ok;
    Ok(report)
}

// --- pipeline -----------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub trace: DerivationTrace,
    pub presentation: Presentation,
    /// Longitude as tracked at G₁₂, before simplification.
    pub longitude_raw: Word,
    pub longitude: Word,
    pub checkpoints: Vec<(String, Presentation)>,
}

struct Script {
    cur: Presentation,
    steps: Vec<TraceStep>,
    checkpoints: Vec<(String, Presentation)>,
}

impl Script {
    fn apply(&mut self, tag: &str, mv: TietzeMove) -> Result<(), DerivationError> {
        self.cur = apply_move(&self.cur, &mv).map_err(|e| DerivationError::Move {
            index: self.steps.len(),
            tag: tag.to_string(),
            reason: e.to_string(),
        })?;
        self.steps.push(TraceStep::new(mv, tag));
        Ok(())
    }

    fn eliminate(&mut self, tag: &str, g: &str, by: &str, via: &str) -> Result<(), DerivationError> {
        self.apply(tag, TietzeMove::substitute(&gen(g), word(by), via))?;
        self.apply(tag, TietzeMove::remove_generator(&gen(g), via))
    }

    fn checkpoint(&mut self, name: &str) {
        if let Some(last) = self.steps.last_mut() {
            last.checkpoint = Some(name.to_string());
        }
        self.checkpoints
            .push((name.to_string(), self.cur.clone().with_provenance(name)));
    }

    fn expect(&self, name: &str, slot: &str, want: &Word) -> Result<(), DerivationError> {
        let got = self
            .cur
            .relator(slot)
            .or_else(|| self.cur.tracked_word(slot))
            .cloned()
            .unwrap_or_default();
        if &got != want {
            return Err(DerivationError::Checkpoint {
                name: format!("{name}/{slot}"),
                expected: want.to_string(),
                got: got.to_string(),
            });
        }
        Ok(())
    }
}

/// Runs STEPs 2–12, the cyclic normalization of `r_inf` and the longitude
/// rewrite, checking every displayed intermediate form on the way.
pub fn run_pipeline(s: i64) -> Result<PipelineResult, DerivationError> {
    let spec = PretzelSpec::new(s)?;
    let start = knot::wirtinger_presentation(spec)
        .with_tracked(LONGITUDE, initial_longitude(spec).word)
        .expect("longitude uses Wirtinger generators");
    let mut sc = Script {
        cur: start.clone(),
        steps: Vec::new(),
        checkpoints: Vec::new(),
    };

    for mv in knot::tunnel_collapse_moves(spec) {
        sc.apply("tunnel", mv)?;
    }
    sc.checkpoint("G2");

    for i in 1..=2 * s {
        let (g, by, label) = corkscrew_substitution(spec, i);
        sc.apply("corkscrew", TietzeMove::substitute(&g, by, &label))?;
        sc.apply("corkscrew", TietzeMove::remove_generator(&g, &label))?;
        sc.expect(&format!("G3_{i}"), R_INF, &closed_form_r(i, s)?)?;
        sc.expect(&format!("G3_{i}"), LONGITUDE, &longitude_after_corkscrew(i, s)?)?;
        sc.checkpoint(&format!("G3_{i}"));
    }

    // STEP 4: h = af
    let t = "opening";
    sc.apply(
        t,
        TietzeMove::AddGenerator {
            gen: gen("h"),
            definition: word("a f"),
            label: "r7".into(),
        },
    )?;
    sc.apply(t, TietzeMove::replace("r6", word("F A"), word("H"), "r7", false))?;
    sc.apply(t, TietzeMove::replace(R_INF, word("b g"), word("h"), "r6", true))?;
    sc.apply(t, TietzeMove::replace(LONGITUDE, word("a f"), word("h"), "r7", false))?;
    sc.apply(t, TietzeMove::replace(LONGITUDE, word("b g"), word("h"), "r6", true))?;
    sc.checkpoint("G4");

    // STEP 5: d = ā c a
    let t = "upper_sliding";
    sc.eliminate(t, "d", "A c a", "r1")?;
    sc.apply(t, TietzeMove::rotate("r3", 1))?;
    sc.apply(t, TietzeMove::replace("r3", word("a f"), word("h"), "r7", true))?;
    sc.checkpoint("G5");

    // STEP 6: a = h f̄, then fc = ck and hc = cl
    let t = "under_sliding";
    sc.eliminate(t, "a", "h F", "r7")?;
    for (g, def, label) in [("k", "C f c", "r8"), ("l", "C h c", "r9")] {
        sc.apply(
            t,
            TietzeMove::AddGenerator {
                gen: gen(g),
                definition: word(def),
                label: label.into(),
            },
        )?;
        sc.apply(t, TietzeMove::invert(label))?;
        sc.apply(t, TietzeMove::rotate(label, 1))?;
    }
    sc.apply(t, TietzeMove::replace("r2", word("F c"), word("c K"), "r8", false))?;
    sc.apply(t, TietzeMove::replace("r2", word("h c"), word("c l"), "r9", false))?;
    sc.apply(t, TietzeMove::rotate("r2", 1))?;
    sc.apply(t, TietzeMove::rename("r2", "r10"))?;
    sc.checkpoint("G6");

    // STEP 7: b = l k̄
    let t = "collapsing";
    sc.eliminate(t, "b", "l K", "r10")?;
    sc.apply(t, TietzeMove::invert("r6"))?;
    sc.checkpoint("G7");

    // STEP 8: f = e c ē, then e = c g c̄ inside r8 only
    let t = "turning";
    sc.eliminate(t, "f", "e c E", "r4")?;
    sc.apply(
        t,
        TietzeMove::SubstituteEverywhere {
            gen: gen("e"),
            by: word("c g C"),
            justification: "r5".into(),
            targets: vec![SlotTarget {
                slot: "r8".into(),
                occurrences: None,
            }],
        },
    )?;
    sc.apply(t, TietzeMove::rotate("r8", 1))?;
    sc.apply(t, TietzeMove::rename("r8", "r11"))?;
    sc.checkpoint("G8");

    let t = "corkscrew";
    sc.eliminate(t, "k", "g c G", "r11")?;
    sc.checkpoint("G9");
    sc.eliminate(t, "g", "C e c", "r5")?;
    sc.checkpoint("G10");
    sc.eliminate(t, "e", "H c h", "r3")?;
    sc.apply(t, TietzeMove::rotate("r6", 1))?;
    sc.apply(
        t,
        TietzeMove::RemoveRelator {
            label: "r6".into(),
            duplicate_of: Some("r9".into()),
            derivation: vec![],
        },
    )?;
    sc.checkpoint("G11");
    sc.eliminate(t, "h", "c l C", "r9")?;
    sc.checkpoint("G12");

    for stage in ["G3_2s", "G4", "G6", "G7", "G8", "G9", "G10", "G11", "G12"] {
        let want = stage_longitude(stage, s).expect("known stage");
        let name = if stage == "G3_2s" { format!("G3_{}", 2 * s) } else { stage.to_string() };
        let got = sc
            .checkpoints
            .iter()
            .find(|(n, _)| *n == name)
            .and_then(|(_, p)| p.tracked_word(LONGITUDE))
            .cloned()
            .unwrap_or_default();
        if got != want {
            return Err(DerivationError::Checkpoint {
                name: format!("{name}/{LONGITUDE}"),
                expected: want.to_string(),
                got: got.to_string(),
            });
        }
    }
    let longitude_raw = sc.cur.tracked_word(LONGITUDE).cloned().unwrap_or_default();

    // cyclic normalization of r_inf
    let t = "cyclic";
    sc.apply(t, TietzeMove::rotate(R_INF, 1))?;
    let target = knot_relator(s);
    let current = sc.cur.relator(R_INF).cloned().unwrap_or_default();
    let k = crate::freegroup::CyclicWord::new(&current)
        .rotation_to(&target)
        .filter(|_| current.is_cyclically_reduced())
        .ok_or_else(|| DerivationError::Checkpoint {
            name: "GK/r_inf".into(),
            expected: target.to_string(),
            got: current.to_string(),
        })?;
    sc.apply(t, TietzeMove::rotate(R_INF, k as i64))?;
    sc.checkpoint("GK");

    for mv in simplify_longitude(s, &longitude_raw)?.moves {
        sc.apply("longitude", mv)?;
    }
    sc.expect("L'", LONGITUDE, &simplified_longitude(s))?;
    sc.checkpoint("GK_L'");

    let end = sc.cur.clone();
    let longitude = end.tracked_word(LONGITUDE).cloned().unwrap_or_default();
    Ok(PipelineResult {
        trace: DerivationTrace {
            v: TRACE_SCHEMA_VERSION,
            start,
            moves: sc.steps,
            end: end.clone(),
        },
        presentation: end.with_provenance("GK"),
        longitude_raw,
        longitude,
        checkpoints: sc.checkpoints,
    })
}

#[derive(Debug, Clone)]
pub struct SimplifiedLongitude {
    pub word: Word,
    /// `RewriteSlot` moves on the tracked longitude, one per replacement.
    pub moves: Vec<TietzeMove>,
}

/// Justified insertion turning `prefix · u · rest` into `prefix · v · rest`,
/// valid whenever `v u⁻¹` is a conjugate of a rotation of `relator^±1`.
pub fn replacement_step(prefix: &Word, u: &Word, v: &Word, label: &str, relator: &Word) -> Option<InsertStep> {
    let (inverse, rotation, conj) = conjugate_of(&(v * &u.inverse()), relator)?;
    Some(InsertStep {
        relator: label.to_string(),
        inverse,
        rotation,
        conjugator: prefix * &conj,
        position: 0,
    })
}

/// Rewrites `L₁₂` into `L′` using rotations of the final relator: first the
/// tail `l̄ c l c l^{s-1} c l → c l^s c l c̄`, then each of the `s-1` blocks
/// `l̄ c l c l̄ c̄ → l̄^s c̄ l̄ c̄ l c l^s`.
pub fn simplify_longitude(s: i64, l12: &Word) -> Result<SimplifiedLongitude, DerivationError> {
    let r = knot_relator(s);
    let mut cur = l12.clone();
    let mut moves = Vec::new();
    let mut rewrite = |cur: &mut Word, prefix: &Word, u: &Word, v: &Word| -> Result<(), DerivationError> {
        let step = replacement_step(prefix, u, v, R_INF, &r)
            .ok_or_else(|| DerivationError::Justification(format!("{v} = {u} is not a rotation of r_inf")))?;
        *cur = cur.insert_at(0, &step.piece(&r));
        moves.push(TietzeMove::RewriteSlot {
            slot: LONGITUDE.into(),
            word: cur.clone(),
            derivation: vec![step],
        });
        Ok(())
    };

    let tail_u = cat(&[&word("L c l c"), &pw("l", s - 1), &word("c l")]);
    let tail_v = cat(&[&word("c"), &pw("l", s), &word("c l C")]);
    let at = cur
        .find(&tail_u, 0)
        .ok_or_else(|| DerivationError::Justification(format!("{tail_u} does not occur in {cur}")))?;
    let prefix = cur.prefix(at);
    rewrite(&mut cur, &prefix, &tail_u, &tail_v)?;

    let head = cat(&[&pw("c", -(s - 1)), &word("l c"), &pw("l", s)]);
    let block_u = word("L c l c L C");
    let block_v = cat(&[&pw("l", -s), &word("C L C l c"), &pw("l", s)]);
    for t in 0..s - 1 {
        let prefix = &head * &block_v.pow(t);
        rewrite(&mut cur, &prefix, &block_u, &block_v)?;
    }
    Ok(SimplifiedLongitude { word: cur, moves })
}
