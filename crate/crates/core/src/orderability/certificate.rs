//! Certificates and their replay.  The replayer re-derives every journal
//! line from scratch and never calls into the saturation engine.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cone::{ConeState, ContradictionKind, Rule, Saturation};
use super::search::{case_tree, BranchRun};
use super::{relator_rotation_consequence, Fact, Mode, RelatorUse, Sign};
use crate::freegroup::{Generator, Word};
use crate::surgery::{bezout_k, fact_exponent, fact_word, h1_order, verify_fact, verify_lemma_k, Slope};

pub const ENGINE_VERSION: &str = "pointwise-cone/1";
pub const CERTIFICATE_VERSION: u32 = 1;
pub(crate) const VERDICT_NLO: &str = "not_left_orderable";
pub(crate) const VERDICT_INCONCLUSIVE: &str = "inconclusive";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub s: i64,
    pub p: i64,
    pub q: i64,
    /// Exponent `p − (4s+7)q` in `W = k^m`.
    pub m: i64,
    pub bezout_r: i64,
    pub bezout_b: i64,
    pub h1_order: String,
    pub p_odd: bool,
    pub q_odd: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalLine {
    pub id: usize,
    pub rule: Rule,
    pub premises: Vec<usize>,
    pub conclusion: Fact,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relator: Option<RelatorUse>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContradictionRecord {
    pub kind: ContradictionKind,
    pub premises: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub name: String,
    pub mode: Mode,
    pub assumptions: Vec<Fact>,
    pub journal: Vec<JournalLine>,
    /// `contradiction`, `fixpoint`, `depth_reached` or `budget_exhausted`.
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contradiction: Option<ContradictionRecord>,
    pub rounds: u32,
    pub rules_applied: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub v: u32,
    pub engine_version: String,
    pub params: CertificateParams,
    pub relators: BTreeMap<String, Word>,
    pub branches: Vec<BranchRecord>,
    pub verdict: String,
    /// What the verdict does and does not claim.
    pub interpretation: String,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn is_closed(&self) -> bool {
        self.branches.iter().all(|b| b.contradiction.is_some())
    }
}

fn params(s: i64, slope: Slope) -> CertificateParams {
    let bz = bezout_k(slope);
    CertificateParams {
        s,
        p: slope.p(),
        q: slope.q(),
        m: fact_exponent(s, slope),
        bezout_r: bz.r,
        bezout_b: bz.b,
        h1_order: h1_order(s, slope).map(|n| n.to_string()).unwrap_or_default(),
        p_odd: slope.p() % 2 != 0,
        q_odd: slope.q() % 2 != 0,
    }
}

/// Keeps the journal lines `ids` and renumbers them `0..`.
pub(crate) fn renumber(state: &ConeState, ids: &[usize]) -> (Vec<JournalLine>, BTreeMap<usize, usize>) {
    let map: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(n, &i)| (i, n)).collect();
    let lines = ids
        .iter()
        .enumerate()
        .map(|(n, &i)| {
            let e = &state.journal()[i];
            JournalLine {
                id: n,
                rule: e.rule,
                premises: e.premises.iter().map(|p| map[p]).collect(),
                conclusion: e.conclusion.clone(),
                relator: e.relator.clone(),
                conjugator: e.conjugator.clone(),
            }
        })
        .collect();
    (lines, map)
}

pub(crate) fn build_certificate(
    s: i64,
    slope: Slope,
    relators: &[(String, Word)],
    runs: &[BranchRun],
) -> Certificate {
    let params = params(s, slope);
    let branches: Vec<BranchRecord> = runs
        .iter()
        .map(|run| {
            let (outcome, roots, contra) = match &run.result {
                Saturation::Contradiction(c) => ("contradiction", c.premises.clone(), Some(c)),
                Saturation::Fixpoint => ("fixpoint", vec![], None),
                Saturation::DepthReached => ("depth_reached", vec![], None),
                Saturation::BudgetExhausted => ("budget_exhausted", vec![], None),
            };
            // open branches keep their whole journal for diagnosis
            let ids = if contra.is_some() {
                run.state.slice(&roots)
            } else {
                (0..run.state.journal().len()).collect()
            };
            let (journal, map) = renumber(&run.state, &ids);
            BranchRecord {
                name: run.spec.name.to_string(),
                mode: run.spec.mode,
                assumptions: run.spec.assumptions.clone(),
                journal,
                outcome: outcome.to_string(),
                contradiction: contra.map(|c| ContradictionRecord {
                    kind: c.kind,
                    premises: c.premises.iter().map(|p| map[p]).collect(),
                }),
                rounds: run.state.rounds(),
                rules_applied: run.state.rules_applied(),
            }
        })
        .collect();
    let closed = branches.iter().all(|b| b.contradiction.is_some());
    let nontrivial = params.h1_order.parse::<i128>().map(|n| n != 1).unwrap_or(false);
    let interpretation = if closed && nontrivial {
        format!(
            "every order-preserving action of the filled group on the line has a global fixed point; \
             H1 has order {} so the group is nontrivial, hence not left-orderable. Ruling out R-covered \
             foliations further needs the cited result on orientation-preserving actions, whose parity \
             hypothesis is recorded in p_odd / q_odd and not checked here",
            params.h1_order
        )
    } else {
        "no claim: some branch stayed open or the group may be trivial".to_string()
    };
    Certificate {
        v: CERTIFICATE_VERSION,
        engine_version: ENGINE_VERSION.to_string(),
        params,
        relators: relators.iter().cloned().collect(),
        branches,
        verdict: if closed && nontrivial { VERDICT_NLO } else { VERDICT_INCONCLUSIVE }.to_string(),
        interpretation,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReplay {
    pub errors: Vec<String>,
    pub branches_closed: usize,
    pub branches_total: usize,
    /// Every line and every contradiction re-checks, all branches are closed,
    /// the parameters recompute and `H₁` is nontrivial.
    pub pass: bool,
}

fn expected_relators(s: i64, slope: Slope) -> Result<BTreeMap<String, Word>, String> {
    let c = Word::gen(&Generator::named("c"));
    let k = Generator::named("k");
    let r_inf = crate::derivation::knot_relator(s);
    let mut out = BTreeMap::new();
    out.insert("r_inf".to_string(), r_inf);
    out.insert("root_of_meridian".to_string(), &c * &Word::power(&k, -slope.q()));
    out.insert(
        "fact".to_string(),
        &fact_word(s) * &Word::power(&k, -fact_exponent(s, slope)),
    );
    Ok(out)
}

pub fn replay_certificate(cert: &Certificate) -> CertificateReplay {
    let mut errors = Vec::new();
    let pr = &cert.params;
    let slope = match Slope::new(pr.p, pr.q) {
        Ok(sl) => Some(sl),
        Err(e) => {
            errors.push(format!("params: {e}"));
            None
        }
    };
    if cert.v != CERTIFICATE_VERSION {
        errors.push(format!("unsupported certificate version {}", cert.v));
    }
    if let Some(slope) = slope {
        if pr.s < 3 {
            errors.push(format!("params: s = {} < 3", pr.s));
        } else {
            if *pr != params(pr.s, slope) {
                errors.push("params do not recompute".into());
            }
            if !verify_lemma_k(slope).pass {
                errors.push("root of the meridian does not check".into());
            }
            match verify_fact(pr.s) {
                Ok(f) if f.pass => {}
                _ => errors.push("fact identity does not check".into()),
            }
            match h1_order(pr.s, slope) {
                Ok(n) if n != num_bigint::BigInt::from(pr.p.abs()) => errors.push(format!("H1 order {n} ≠ |p|")),
                Ok(_) if pr.p.abs() <= 1 => errors.push("H1 is trivial".into()),
                Ok(_) => {}
                Err(e) => errors.push(e.to_string()),
            }
            match expected_relators(pr.s, slope) {
                Ok(rel) if rel == cert.relators => {}
                _ => errors.push("relators differ from the recomputed ones".into()),
            }
        }
    }

    let tree = case_tree();
    if tree.len() != cert.branches.len() {
        errors.push(format!("expected {} branches, found {}", tree.len(), cert.branches.len()));
    }
    let mut closed = 0;
    for (spec, b) in tree.iter().zip(&cert.branches) {
        if b.name != spec.name || b.mode != spec.mode || b.assumptions != spec.assumptions {
            errors.push(format!("branch {}: does not match the case split", b.name));
            continue;
        }
        match check_branch(b, &cert.relators) {
            Ok(true) => closed += 1,
            Ok(false) => errors.push(format!("branch {}: open ({})", b.name, b.outcome)),
            Err(e) => errors.push(format!("branch {}: {e}", b.name)),
        }
    }
    if cert.verdict != VERDICT_NLO {
        errors.push(format!("verdict is {}", cert.verdict));
    }
    CertificateReplay {
        pass: errors.is_empty() && closed == tree.len(),
        errors,
        branches_closed: closed,
        branches_total: tree.len(),
    }
}

/// `Ok(true)` when every line checks and the branch ends in a contradiction.
fn check_branch(b: &BranchRecord, relators: &BTreeMap<String, Word>) -> Result<bool, String> {
    let consequence = |w: &Word, u: &Option<RelatorUse>| -> Result<(), String> {
        let u = u.as_ref().ok_or("missing relator reference")?;
        let r = relators.get(&u.relator).ok_or_else(|| format!("unknown relator {}", u.relator))?;
        relator_rotation_consequence(w, &u.relator, r)
            .map(|_| ())
            .ok_or_else(|| format!("{w} is not a consequence of {}", u.relator))
    };
    for (n, line) in b.journal.iter().enumerate() {
        let err = |m: String| format!("line {n}: {m}");
        if line.id != n {
            return Err(err("ids out of order".into()));
        }
        if line.premises.iter().any(|&p| p >= n) {
            return Err(err("premise does not precede".into()));
        }
        let prem: Vec<&Fact> = line.premises.iter().map(|&p| &b.journal[p].conclusion).collect();
        let c = &line.conclusion;
        let arity = |k: usize| {
            if prem.len() == k {
                Ok(())
            } else {
                Err(err(format!("expected {k} premises")))
            }
        };
        match line.rule {
            Rule::Assume => {
                arity(0)?;
                if !b.assumptions.contains(c) {
                    return Err(err(format!("{c} is not an assumption")));
                }
            }
            Rule::Empty => {
                arity(0)?;
                if !c.word.is_empty() || c.sign != Sign::Identity {
                    return Err(err("only 1 is trivially Identity".into()));
                }
            }
            Rule::RelatorTrivial => {
                arity(0)?;
                if c.sign != Sign::Identity {
                    return Err(err("relator consequences are Identity".into()));
                }
                consequence(&c.word, &line.relator).map_err(err)?;
            }
            Rule::Inverse => {
                arity(1)?;
                if c.word != prem[0].word.inverse() || c.sign != prem[0].sign.flip() {
                    return Err(err("bad inverse".into()));
                }
            }
            Rule::Product => {
                arity(2)?;
                if c.word != &prem[0].word * &prem[1].word || Some(c.sign) != prem[0].sign.product(prem[1].sign) {
                    return Err(err("bad product".into()));
                }
            }
            Rule::Conjugation => {
                arity(1)?;
                if b.mode != Mode::Global {
                    return Err(err("conjugation needs global signs".into()));
                }
                let g = line.conjugator.as_ref().ok_or_else(|| err("missing conjugator".into()))?;
                if c.word != prem[0].word.conjugate_by(g) || c.sign != prem[0].sign {
                    return Err(err("bad conjugation".into()));
                }
            }
            Rule::RelatorRewrite => {
                arity(1)?;
                if c.sign != prem[0].sign {
                    return Err(err("rewrite changed the sign".into()));
                }
                consequence(&(&prem[0].word.inverse() * &c.word), &line.relator).map_err(err)?;
            }
        }
    }
    let Some(con) = &b.contradiction else { return Ok(false) };
    let facts: Vec<&Fact> = con
        .premises
        .iter()
        .map(|&p| b.journal.get(p).map(|l| &l.conclusion).ok_or("contradiction premise out of range"))
        .collect::<Result<_, _>>()?;
    let ok = match con.kind {
        ContradictionKind::OppositeSigns => {
            facts.len() == 2
                && facts[0].word == facts[1].word
                && facts[0].sign.is_strict()
                && facts[1].sign == facts[0].sign.flip()
        }
        ContradictionKind::IdentityVsStrict => {
            facts.len() == 2
                && facts[0].word == facts[1].word
                && (facts[0].sign == Sign::Identity) != (facts[1].sign == Sign::Identity)
        }
        ContradictionKind::GlobalFixedPoint => {
            let mut words: Vec<String> = facts
                .iter()
                .filter(|f| f.sign == Sign::Identity)
                .map(|f| f.word.to_string())
                .collect();
            words.sort();
            words == ["c", "l"]
        }
    };
    if ok {
        Ok(true)
    } else {
        Err("contradiction does not check".into())
    }
}
