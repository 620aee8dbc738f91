//! The case tree and hint words for the filled groups.
//!
//! Given an action on the line without a global fixed point, the root `k`
//! either fixes some point, or moves every point up, or every point down.
//! The first case splits further on what `l` does to that point.

use super::certificate::{build_certificate, Certificate};
use super::cone::{ConeState, Limits, Saturation, Universe};
use super::{Fact, JournalLine, Mode, Sign};
use crate::derivation::knot_relator;
use crate::exec::par_map;
use crate::freegroup::{Generator, Word};
use crate::knot::{PretzelSpec, R_INF};
use crate::surgery::{fact_exponent, fact_word, Slope, SurgeryError};

pub const DEFAULT_DEPTH: u32 = 100_000;
pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum saturation rounds per branch.
    pub depth: u32,
    /// Maximum derived facts per branch.
    pub budget: u64,
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            depth: DEFAULT_DEPTH,
            budget: DEFAULT_BUDGET,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub enum NloOutcome {
    Certificate(Certificate),
    /// Some branch stayed open; `partial` still records what was derived.
    Inconclusive { reason: String, partial: Certificate },
}

impl NloOutcome {
    pub fn certificate(&self) -> &Certificate {
        match self {
            NloOutcome::Certificate(c) => c,
            NloOutcome::Inconclusive { partial, .. } => partial,
        }
    }

    pub fn is_certificate(&self) -> bool {
        matches!(self, NloOutcome::Certificate(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchSpec {
    pub name: &'static str,
    pub mode: Mode,
    pub assumptions: Vec<Fact>,
}

fn g(name: &str) -> Generator {
    Generator::named(name)
}

fn pw(name: &str, n: i64) -> Word {
    Word::power(&g(name), n)
}

/// The root split: `k` fixes the base point (three sub-cases on `l`), or
/// `k` moves every point up, or every point down.
pub fn case_tree() -> Vec<BranchSpec> {
    let fact = |n: &str, s| Fact::new(pw(n, 1), s);
    let fixed = |name, s| BranchSpec {
        name,
        mode: Mode::AtPoint,
        assumptions: vec![fact("k", Sign::Identity), fact("l", s)],
    };
    let global = |name, s| BranchSpec {
        name,
        mode: Mode::Global,
        assumptions: vec![fact("k", s)],
    };
    vec![
        fixed("k_fixes_point/l_fixes", Sign::Identity),
        fixed("k_fixes_point/l_up", Sign::Positive),
        fixed("k_fixes_point/l_down", Sign::Negative),
        global("k_up", Sign::Positive),
        global("k_down", Sign::Negative),
    ]
}

/// `r_inf`, `c = k^q` and `W = k^m` over the alphabet `{c, l, k}`.
pub fn peripheral_relators(s: i64, slope: Slope) -> Vec<(String, Word)> {
    let m = fact_exponent(s, slope);
    vec![
        (R_INF.to_string(), knot_relator(s)),
        ("root_of_meridian".to_string(), &pw("c", 1) * &pw("k", -slope.q())),
        ("fact".to_string(), &fact_word(s) * &pw("k", -m)),
    ]
}

/// Words the search may mention (closed under prefixes and inverses later).
pub fn branch_hints(s: i64, slope: Slope) -> Vec<Word> {
    let m = fact_exponent(s, slope);
    let w = |t: &str| Word::parse(t).expect("static word");
    let a = Word::concat(&[w("c l c"), pw("l", s - 1), w("c l c")]);
    let b = Word::concat(&[w("l c"), pw("l", s), w("c l")]);
    let conj_c = Word::concat(&[b.inverse(), w("c"), b.clone()]);
    let fw = fact_word(s);
    vec![
        w("c"),
        w("l"),
        w("k"),
        pw("k", slope.q()),
        &pw("k", m) * &w("l"),
        a,
        b,
        &conj_c * &w("c"),
        w("C L C l c l c"),
        &fw * &w("l"),
        fw,
    ]
}

pub(crate) struct BranchRun {
    pub spec: BranchSpec,
    pub state: ConeState,
    pub result: Saturation,
}

fn run_branch(spec: &BranchSpec, hints: &[Word], relators: &[(String, Word)], limits: Limits) -> BranchRun {
    let universe = Universe::from_hints(hints);
    let mut state = ConeState::new(spec.mode, universe, relators);
    state.forbid_fixed_point(&[pw("c", 1), pw("l", 1)]);
    let mut early = None;
    for f in &spec.assumptions {
        if let Err(c) = state.assume(f.clone()) {
            early = Some(Saturation::Contradiction(c));
            break;
        }
    }
    let result = early.unwrap_or_else(|| state.saturate(limits));
    BranchRun {
        spec: spec.clone(),
        state,
        result,
    }
}

fn check_params(s: i64) -> Result<(), SurgeryError> {
    PretzelSpec::new(s)?;
    Ok(())
}

/// Searches for a certificate that every action of the filled group on the
/// line has a global fixed point; with `|p| > 1` the group is then not
/// left-orderable.
pub fn nlo_search(s: i64, slope: Slope, opts: SearchOptions) -> Result<NloOutcome, SurgeryError> {
    check_params(s)?;
    let hints = branch_hints(s, slope);
    let relators = peripheral_relators(s, slope);
    let limits = Limits {
        depth: opts.depth,
        budget: opts.budget,
    };
    let runs = par_map(&case_tree(), opts.parallel, |b| run_branch(b, &hints, &relators, limits));
    let cert = build_certificate(s, slope, &relators, &runs);
    if cert.verdict == super::certificate::VERDICT_NLO {
        return Ok(NloOutcome::Certificate(cert));
    }
    let open: Vec<String> = cert
        .branches
        .iter()
        .filter(|b| b.contradiction.is_none())
        .map(|b| format!("{} ({})", b.name, b.outcome))
        .collect();
    let reason = if open.is_empty() {
        format!("H1 has order {}, so the group may be trivial", cert.params.h1_order)
    } else {
        format!("open branches: {}", open.join(", "))
    };
    Ok(NloOutcome::Inconclusive { reason, partial: cert })
}

/// Journal, in the `k` moves every point up branch, ending in `l: Positive`.
pub fn replay_lemma_l_positive(s: i64, slope: Slope) -> Result<Option<Vec<JournalLine>>, SurgeryError> {
    check_params(s)?;
    let spec = case_tree().into_iter().find(|b| b.name == "k_up").expect("branch exists");
    let limits = Limits {
        depth: DEFAULT_DEPTH,
        budget: DEFAULT_BUDGET,
    };
    let run = run_branch(&spec, &branch_hints(s, slope), &peripheral_relators(s, slope), limits);
    Ok(run
        .state
        .fact_id(&pw("l", 1))
        .filter(|&id| run.state.journal()[id].conclusion.sign == Sign::Positive)
        .map(|id| super::certificate::renumber(&run.state, &run.state.slice(&[id])).0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orderability::Certificate;

    fn slope(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn certificates_where_expected() {
        for (s, p, q) in [(3, 19, 1), (3, 39, 2), (4, 23, 1), (5, 27, 1)] {
            let out = nlo_search(s, slope(p, q), SearchOptions::default()).unwrap();
            assert!(out.is_certificate(), "{s} {p}/{q}: {out:?}");
        }
        for p in [17, 18] {
            let out = nlo_search(3, slope(p, 1), SearchOptions::default()).unwrap();
            assert!(!out.is_certificate(), "3 {p}/1");
        }
    }

    #[test]
    fn lemma_l_journal_is_short() {
        let j = replay_lemma_l_positive(3, slope(19, 1)).unwrap().unwrap();
        assert!(j.len() <= 12, "{j:?}");
        let last = j.last().unwrap();
        assert_eq!(last.conclusion, Fact::new(pw("l", 1), Sign::Positive));
    }

    #[test]
    fn certificate_replays_and_tampering_fails() {
        let out = nlo_search(3, slope(19, 1), SearchOptions::default()).unwrap();
        let cert = out.certificate().clone();
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert!(super::super::replay_certificate(&back).pass);

        let mut bad = cert.clone();
        let line = bad.branches[3].journal.iter_mut().find(|l| l.rule == super::super::Rule::Conjugation).unwrap();
        line.conclusion.word = pw("c", 1);
        assert!(!super::super::replay_certificate(&bad).pass);

        let mut bad = cert.clone();
        bad.branches.pop();
        assert!(!super::super::replay_certificate(&bad).pass);

        let mut bad = cert;
        bad.params.p = 17;
        assert!(!super::super::replay_certificate(&bad).pass);
    }

    #[test]
    fn mirrored_branches_have_the_same_shape() {
        let out = nlo_search(4, slope(23, 1), SearchOptions::default()).unwrap();
        let b = &out.certificate().branches;
        let flip = |l: &JournalLine| {
            let mut l = l.clone();
            l.conclusion.sign = l.conclusion.sign.flip();
            l
        };
        let up: Vec<JournalLine> = b[3].journal.iter().map(flip).collect();
        assert_eq!(up, b[4].journal);
        let up: Vec<JournalLine> = b[1].journal.iter().map(flip).collect();
        assert_eq!(up, b[2].journal);
    }

    #[test]
    fn sequential_matches_parallel() {
        let par = nlo_search(3, slope(39, 2), SearchOptions::default()).unwrap();
        let seq = nlo_search(3, slope(39, 2), SearchOptions { parallel: false, ..Default::default() }).unwrap();
        assert_eq!(par.certificate(), seq.certificate());
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let opts = SearchOptions { budget: 5, ..Default::default() };
        let out = nlo_search(3, slope(19, 1), opts).unwrap();
        assert!(!out.is_certificate());
        assert!(out.certificate().branches.iter().any(|b| b.outcome == "budget_exhausted"));
    }
}
