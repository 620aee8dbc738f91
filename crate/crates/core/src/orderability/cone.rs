//! Saturation of sign facts over a finite universe of words.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{relator_rotation_consequence, Fact, Mode, RelatorUse, Sign};
use crate::freegroup::{CyclicWord, Generator, Word};

/// Finite word set the rules are allowed to talk about: closed under
/// prefixes and inverses, always containing the empty word.
#[derive(Debug, Clone)]
pub struct Universe {
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl Universe {
    pub fn from_hints<'a, I: IntoIterator<Item = &'a Word>>(hints: I) -> Self {
        let mut set = BTreeSet::new();
        set.insert(Word::empty());
        for h in hints {
            for w in [h.clone(), h.inverse()] {
                for n in 1..=w.len() {
                    set.insert(w.prefix(n));
                }
            }
        }
        // prefixes of inverses are inverses of suffixes; close once more
        let extra: Vec<Word> = set.iter().map(Word::inverse).collect();
        set.extend(extra);
        let mut words: Vec<Word> = set.into_iter().collect();
        words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        Universe { words, index }
    }

    /// Every reduced word of length at most `radius`.
    pub fn ball(gens: &[Generator], radius: usize) -> Self {
        let mut layer = vec![Word::empty()];
        let mut all = vec![Word::empty()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for w in &layer {
                for g in gens {
                    for e in [1, -1] {
                        let x = w * &Word::power(g, e);
                        if x.len() == w.len() + 1 {
                            next.push(x);
                        }
                    }
                }
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        Universe::from_hints(&all)
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Assume,
    /// The empty word acts trivially.
    Empty,
    /// A consequence of a relator acts trivially.
    RelatorTrivial,
    Inverse,
    Product,
    /// Global mode only: `w` and `g w g⁻¹` share a sign.
    Conjugation,
    /// Words equal in the group share a sign.
    RelatorRewrite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub rule: Rule,
    pub premises: Vec<usize>,
    pub conclusion: Fact,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relator: Option<RelatorUse>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<Word>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContradictionKind {
    /// One word both Positive and Negative.
    OppositeSigns,
    /// One word both Identity and strict.
    IdentityVsStrict,
    /// Every generator fixes the base point (or acts trivially).
    GlobalFixedPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contradiction {
    pub kind: ContradictionKind,
    /// Journal ids of the clashing facts.
    pub premises: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Saturation {
    Contradiction(Contradiction),
    Fixpoint,
    DepthReached,
    BudgetExhausted,
}

/// `depth` bounds saturation rounds, `budget` bounds derived facts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub depth: u32,
    pub budget: u64,
}

enum Stop {
    Contra(Contradiction),
    Budget,
}

pub struct ConeState {
    mode: Mode,
    universe: Universe,
    inverse: Vec<usize>,
    splits: Vec<Vec<(usize, usize)>>,
    conj_peers: Vec<Vec<(usize, Word)>>,
    equal_peers: Vec<Vec<(usize, RelatorUse)>>,
    trivial: Vec<Option<RelatorUse>>,
    fixed_point: Vec<usize>,
    signs: Vec<Option<(Sign, usize)>>,
    journal: Vec<Entry>,
    rules_applied: u64,
    rounds: u32,
    seeded: bool,
    budget: u64,
}

impl ConeState {
    pub fn new(mode: Mode, universe: Universe, relators: &[(String, Word)]) -> Self {
        let n = universe.len();
        let words = universe.words().to_vec();
        let idx = |w: &Word| universe.index_of(w);
        let inverse = words.iter().map(|w| idx(&w.inverse()).expect("closed under inverses")).collect();
        let splits = words
            .iter()
            .map(|w| {
                (1..w.len())
                    .filter_map(|i| {
                        let (u, v) = (w.prefix(i), Word::from_letters(w.letters()[i..].iter().cloned()));
                        Some((idx(&u)?, idx(&v)?))
                    })
                    .collect()
            })
            .collect();

        let mut conj_peers = vec![Vec::new(); n];
        if mode == Mode::Global {
            let mut classes: BTreeMap<Word, Vec<usize>> = BTreeMap::new();
            for (i, w) in words.iter().enumerate().filter(|(_, w)| !w.is_empty()) {
                classes.entry(CyclicWord::new(w).canonical()).or_default().push(i);
            }
            for members in classes.values() {
                for &a in members {
                    for &b in members {
                        if a != b {
                            conj_peers[a].push((b, conjugator(&words[a], &words[b])));
                        }
                    }
                }
            }
        }

        let profile = |w: &Word| -> (usize, BTreeMap<Generator, i64>) {
            let gens = w.generators();
            let sums = gens.into_iter().map(|g| {
                let e = w.exponent_sum(&g);
                (g, e)
            });
            (CyclicWord::new(w).len(), sums.filter(|(_, e)| *e != 0).collect())
        };
        let rel_profiles: Vec<_> = relators
            .iter()
            .map(|(_, r)| {
                let (len, sums) = profile(r);
                let neg = sums.iter().map(|(g, e)| (g.clone(), -e)).collect::<BTreeMap<_, _>>();
                (len, sums, neg)
            })
            .collect();
        let consequence = |x: &Word| -> Option<RelatorUse> {
            let (len, sums) = profile(x);
            relators.iter().zip(&rel_profiles).find_map(|((label, r), (rl, rs, rn))| {
                if len != *rl || (sums != *rs && sums != *rn) {
                    return None;
                }
                relator_rotation_consequence(x, label, r)
            })
        };
        let trivial: Vec<_> = words.iter().map(|w| if w.is_empty() { None } else { consequence(w) }).collect();
        let mut equal_peers = vec![Vec::new(); n];
        for a in 0..n {
            let ia = words[a].inverse();
            for (b, wb) in words.iter().enumerate() {
                if a != b {
                    if let Some(u) = consequence(&(&ia * wb)) {
                        equal_peers[a].push((b, u));
                    }
                }
            }
        }

        ConeState {
            mode,
            inverse,
            splits,
            conj_peers,
            equal_peers,
            trivial,
            fixed_point: Vec::new(),
            signs: vec![None; n],
            journal: Vec::new(),
            rules_applied: 0,
            rounds: 0,
            seeded: false,
            budget: u64::MAX,
            universe,
        }
    }

    /// Declares that all of `gens` acting trivially (at the base point in
    /// at-point mode) is absurd: the action has no global fixed point.
    pub fn forbid_fixed_point(&mut self, gens: &[Word]) {
        self.fixed_point = gens
            .iter()
            .map(|g| self.universe.index_of(g).expect("generator in universe"))
            .collect();
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn journal(&self) -> &[Entry] {
        &self.journal
    }

    pub fn rules_applied(&self) -> u64 {
        self.rules_applied
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn sign_of(&self, w: &Word) -> Option<Sign> {
        self.fact_id(w).map(|id| self.journal[id].conclusion.sign)
    }

    /// Journal id of the fact currently recorded for `w`.
    pub fn fact_id(&self, w: &Word) -> Option<usize> {
        self.universe.index_of(w).and_then(|i| self.signs[i]).map(|(_, id)| id)
    }

    /// # Panics
    /// If the word is outside the universe.
    pub fn assume(&mut self, fact: Fact) -> Result<(), Contradiction> {
        let i = self.universe.index_of(&fact.word).expect("assumed word lies in the universe");
        match self.derive(i, fact.sign, Rule::Assume, vec![], None, None) {
            Err(Stop::Contra(c)) => Err(c),
            _ => Ok(()),
        }
    }

    pub fn saturate(&mut self, limits: Limits) -> Saturation {
        self.budget = limits.budget;
        match self.run(limits.depth) {
            Ok(true) => Saturation::Fixpoint,
            Ok(false) => Saturation::DepthReached,
            Err(Stop::Contra(c)) => Saturation::Contradiction(c),
            Err(Stop::Budget) => Saturation::BudgetExhausted,
        }
    }

    /// Ancestors of `roots`, ascending.
    pub fn slice(&self, roots: &[usize]) -> Vec<usize> {
        let mut keep = BTreeSet::new();
        let mut stack = roots.to_vec();
        while let Some(i) = stack.pop() {
            if keep.insert(i) {
                stack.extend(&self.journal[i].premises);
            }
        }
        keep.into_iter().collect()
    }

    fn run(&mut self, depth: u32) -> Result<bool, Stop> {
        if !self.seeded {
            self.seeded = true;
            let e = self.universe.index_of(&Word::empty()).expect("empty word");
            self.derive(e, Sign::Identity, Rule::Empty, vec![], None, None)?;
            for i in 0..self.trivial.len() {
                if let Some(u) = self.trivial[i].clone() {
                    self.derive(i, Sign::Identity, Rule::RelatorTrivial, vec![], Some(u), None)?;
                }
            }
        }
        while self.rounds < depth {
            self.rounds += 1;
            if !self.round()? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn round(&mut self) -> Result<bool, Stop> {
        let mut changed = false;
        for w in 0..self.signs.len() {
            for k in 0..self.splits[w].len() {
                let (u, v) = self.splits[w][k];
                if let (Some((su, iu)), Some((sv, iv))) = (self.signs[u], self.signs[v]) {
                    if let Some(s) = su.product(sv) {
                        changed |= self.derive(w, s, Rule::Product, vec![iu, iv], None, None)?;
                    }
                }
            }
            let Some((s, id)) = self.signs[w] else { continue };
            changed |= self.derive(self.inverse[w], s.flip(), Rule::Inverse, vec![id], None, None)?;
            for k in 0..self.conj_peers[w].len() {
                let (b, g) = self.conj_peers[w][k].clone();
                changed |= self.derive(b, s, Rule::Conjugation, vec![id], None, Some(g))?;
            }
            for k in 0..self.equal_peers[w].len() {
                let (b, u) = self.equal_peers[w][k].clone();
                changed |= self.derive(b, s, Rule::RelatorRewrite, vec![id], Some(u), None)?;
            }
        }
        Ok(changed)
    }

    fn derive(
        &mut self,
        target: usize,
        sign: Sign,
        rule: Rule,
        premises: Vec<usize>,
        relator: Option<RelatorUse>,
        conjugator: Option<Word>,
    ) -> Result<bool, Stop> {
        let prior = self.signs[target];
        if matches!(prior, Some((s, _)) if s == sign) {
            return Ok(false);
        }
        let id = self.journal.len();
        self.journal.push(Entry {
            rule,
            premises,
            conclusion: Fact::new(self.universe.words[target].clone(), sign),
            relator,
            conjugator,
        });
        self.rules_applied += 1;
        if let Some((old, oid)) = prior {
            let kind = if old.is_strict() && sign.is_strict() {
                ContradictionKind::OppositeSigns
            } else {
                ContradictionKind::IdentityVsStrict
            };
            return Err(Stop::Contra(Contradiction {
                kind,
                premises: vec![oid, id],
            }));
        }
        self.signs[target] = Some((sign, id));
        if sign == Sign::Identity && !self.fixed_point.is_empty() {
            let ids: Option<Vec<usize>> = self
                .fixed_point
                .iter()
                .map(|&g| match self.signs[g] {
                    Some((Sign::Identity, i)) => Some(i),
                    _ => None,
                })
                .collect();
            if let Some(premises) = ids {
                return Err(Stop::Contra(Contradiction {
                    kind: ContradictionKind::GlobalFixedPoint,
                    premises,
                }));
            }
        }
        if self.rules_applied > self.budget {
            return Err(Stop::Budget);
        }
        Ok(true)
    }
}

/// `g` with `b = g a g⁻¹`, for `a`, `b` in one conjugacy class.
fn conjugator(a: &Word, b: &Word) -> Word {
    let (ca, ga) = a.cyclic_reduce();
    let (cb, gb) = b.cyclic_reduce();
    let k = ca.rotation_to(cb.representative()).expect("same conjugacy class");
    let p = ca.representative().prefix(k);
    let g = Word::concat(&[gb, p.inverse(), ga.inverse()]);
    debug_assert_eq!(&a.conjugate_by(&g), b);
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(t: &str) -> Word {
        Word::parse(t).unwrap()
    }

    const L: Limits = Limits {
        depth: 50,
        budget: 100_000,
    };

    #[test]
    fn inverse_clash_is_immediate() {
        let u = Universe::from_hints([&w("c l")]);
        let mut st = ConeState::new(Mode::Global, u, &[]);
        st.assume(Fact::new(w("c l"), Sign::Positive)).unwrap();
        st.assume(Fact::new(w("L C"), Sign::Positive)).unwrap();
        match st.saturate(L) {
            Saturation::Contradiction(c) => assert_eq!(c.kind, ContradictionKind::OppositeSigns),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn conjugator_matches() {
        let a = w("c l c L");
        let b = w("x L c l c X");
        assert_eq!(a.conjugate_by(&conjugator(&a, &b)), b);
    }

    #[test]
    fn free_group_is_consistent() {
        let gens = [Generator::named("c"), Generator::named("l")];
        let mut st = ConeState::new(Mode::Global, Universe::ball(&gens, 4), &[]);
        st.assume(Fact::new(w("c"), Sign::Positive)).unwrap();
        st.assume(Fact::new(w("l"), Sign::Positive)).unwrap();
        assert_eq!(st.saturate(L), Saturation::Fixpoint);
        assert_eq!(st.sign_of(&w("c l C")), Some(Sign::Positive));
        assert_eq!(st.sign_of(&w("L C")), Some(Sign::Negative));
        assert_eq!(st.sign_of(&w("c L")), None);
    }

    #[test]
    fn relator_makes_words_trivial() {
        let rel = vec![("r".to_string(), w("c L"))];
        let mut st = ConeState::new(Mode::AtPoint, Universe::from_hints([&w("c"), &w("l")]), &rel);
        st.forbid_fixed_point(&[w("c"), w("l")]);
        st.assume(Fact::new(w("c"), Sign::Identity)).unwrap();
        match st.saturate(L) {
            Saturation::Contradiction(c) => assert_eq!(c.kind, ContradictionKind::GlobalFixedPoint),
            other => panic!("{other:?}"),
        }
    }
}
