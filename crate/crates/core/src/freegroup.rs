//! Words in a free group.
//!
//! A [`Word`] is always stored freely reduced; every constructor and every
//! operation returning a word reduces eagerly, so structural equality is
//! equality in the free group.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Mul;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("invalid generator name {0:?} (expected [a-z][a-z0-9]*)")]
    InvalidGenerator(String),
    #[error("cannot parse token {token:?}: {reason}")]
    BadToken { token: String, reason: String },
    #[error("undeclared generator {0}")]
    Undeclared(String),
}

/// A generator name matching `[a-z][a-z0-9]*`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator(Arc<str>);

impl Generator {
    pub fn new(name: &str) -> Result<Self, WordError> {
        if is_valid_name(name) {
            Ok(Generator(Arc::from(name)))
        } else {
            Err(WordError::InvalidGenerator(name.to_string()))
        }
    }

    /// Panics on an invalid name; for literals known at compile time.
    pub fn named(name: &str) -> Self {
        Self::new(name).expect("valid generator literal")
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Name with the first character upper-cased, the inverse-letter spelling.
    fn inverse_spelling(&self) -> String {
        let mut chars = self.0.chars();
        let first = chars.next().expect("non-empty name").to_ascii_uppercase();
        std::iter::once(first).chain(chars).collect()
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

/// A signed generator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: Generator,
    pub inverted: bool,
}

impl Letter {
    pub fn new(gen: Generator, sign: i64) -> Self {
        assert!(sign == 1 || sign == -1, "letter sign must be +1 or -1");
        Letter { gen, inverted: sign < 0 }
    }

    pub fn sign(&self) -> i64 {
        if self.inverted {
            -1
        } else {
            1
        }
    }

    pub fn inverse(&self) -> Self {
        Letter {
            gen: self.gen.clone(),
            inverted: !self.inverted,
        }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.gen == other.gen && self.inverted != other.inverted
    }
}

/// A freely reduced word.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|last| last.cancels(&l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    /// `g^n` as a word.
    pub fn power(gen: &Generator, n: i64) -> Self {
        let l = Letter {
            gen: gen.clone(),
            inverted: n < 0,
        };
        Word {
            letters: vec![l; n.unsigned_abs() as usize],
        }
    }

    pub fn gen(gen: &Generator) -> Self {
        Word::power(gen, 1)
    }

    /// Builds a word from `(generator, exponent)` runs.
    pub fn from_runs<'a, I: IntoIterator<Item = (&'a Generator, i64)>>(runs: I) -> Self {
        Word::from_letters(runs.into_iter().flat_map(|(g, n)| Word::power(g, n).letters))
    }

    /// Parses the tokenized or compact grammar with no declared alphabet.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        parse_word(text, None)
    }

    /// Parses against a declared alphabet: a whitespace-free token that is not
    /// a declared name is read in compact form, and undeclared letters fail.
    pub fn parse_in(text: &str, alphabet: &[Generator]) -> Result<Self, WordError> {
        parse_word(text, Some(alphabet))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word {
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
        }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..n.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    pub fn concat<'a, I: IntoIterator<Item = &'a Word>>(parts: I) -> Self {
        Word::from_letters(parts.into_iter().flat_map(|w| w.letters.iter().cloned()))
    }

    /// `self · g · self⁻¹`.
    pub fn conjugate_by(&self, g: &Word) -> Self {
        Word::concat([g, self, &g.inverse()])
    }

    pub fn exponent_sum(&self, gen: &Generator) -> i64 {
        self.letters
            .iter()
            .filter(|l| &l.gen == gen)
            .map(Letter::sign)
            .sum()
    }

    /// Number of letters (either sign) on `gen`.
    pub fn occurrences(&self, gen: &Generator) -> usize {
        self.letters.iter().filter(|l| &l.gen == gen).count()
    }

    pub fn contains_gen(&self, gen: &Generator) -> bool {
        self.letters.iter().any(|l| &l.gen == gen)
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        self.letters.iter().map(|l| l.gen.clone()).collect()
    }

    /// Replaces `gen` by `by` and `gen⁻¹` by `by⁻¹`.
    pub fn substitute(&self, gen: &Generator, by: &Word) -> Self {
        self.substitute_selected(gen, by, |_| true)
    }

    /// Like [`Word::substitute`] but only at the occurrences (counted from 0
    /// over letters on `gen` of either sign) accepted by `keep`.
    pub fn substitute_selected(&self, gen: &Generator, by: &Word, keep: impl Fn(usize) -> bool) -> Self {
        let inv = by.inverse();
        let mut idx = 0;
        let mut out = Vec::with_capacity(self.len());
        for l in &self.letters {
            if &l.gen == gen {
                let hit = keep(idx);
                idx += 1;
                if hit {
                    let r = if l.inverted { &inv } else { by };
                    out.extend(r.letters.iter().cloned());
                    continue;
                }
            }
            out.push(l.clone());
        }
        Word::from_letters(out)
    }

    /// Left rotation of the letter sequence by `k` (mod length), reduced.
    pub fn rotate_left(&self, k: usize) -> Self {
        if self.is_empty() {
            return Word::empty();
        }
        let k = k % self.len();
        Word::from_letters(self.letters[k..].iter().chain(&self.letters[..k]).cloned())
    }

    /// Reverses letter order keeping each letter's sign.
    pub fn reversed(&self) -> Self {
        Word::from_letters(self.letters.iter().rev().cloned())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(a), Some(b)) if self.len() > 1 => !a.cancels(b),
            _ => true,
        }
    }

    /// Splits `self = conjugator · rep · conjugator⁻¹` with `rep` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (CyclicWord, Word) {
        let n = self.len();
        let mut i = 0;
        while 2 * i + 1 < n && self.letters[i].cancels(&self.letters[n - 1 - i]) {
            i += 1;
        }
        let rep = Word {
            letters: self.letters[i..n - i].to_vec(),
        };
        let conj = Word {
            letters: self.letters[..i].to_vec(),
        };
        (CyclicWord { rep }, conj)
    }

    /// Run-length view `(generator, exponent)`.
    pub fn runs(&self) -> Vec<(Generator, i64)> {
        let mut out: Vec<(Generator, i64)> = Vec::new();
        for l in &self.letters {
            match out.last_mut() {
                Some((g, n)) if *g == l.gen && n.signum() == l.sign() => *n += l.sign(),
                _ => out.push((l.gen.clone(), l.sign())),
            }
        }
        out
    }

    /// Compact spelling (`clcLC^-3`); `None` unless every name is one letter.
    pub fn to_compact(&self) -> Option<String> {
        if self.is_empty() {
            return Some("1".into());
        }
        if self.letters.iter().any(|l| l.gen.name().len() != 1) {
            return None;
        }
        Some(self.runs().iter().map(|(g, n)| render_run(g, *n)).collect())
    }

    /// Index of the first occurrence of `pattern` at or after `from`.
    pub fn find(&self, pattern: &Word, from: usize) -> Option<usize> {
        if pattern.is_empty() || pattern.len() > self.len() {
            return None;
        }
        (from..=self.len() - pattern.len()).find(|&i| self.letters[i..i + pattern.len()] == pattern.letters[..])
    }

    /// `self[..at] · insert · self[at..]`, reduced.
    pub fn insert_at(&self, at: usize, insert: &Word) -> Self {
        let at = at.min(self.len());
        Word::from_letters(
            self.letters[..at]
                .iter()
                .chain(&insert.letters)
                .chain(&self.letters[at..])
                .cloned(),
        )
    }

    pub fn prefix(&self, n: usize) -> Self {
        Word {
            letters: self.letters[..n.min(self.len())].to_vec(),
        }
    }
}

fn render_run(g: &Generator, n: i64) -> String {
    match n {
        1 => g.name().to_string(),
        -1 => g.inverse_spelling(),
        n if n > 0 => format!("{}^{}", g.name(), n),
        n => format!("{}^{}", g.inverse_spelling(), n),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        let runs = self.runs();
        for (i, (g, n)) in runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&render_run(g, *n))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Mul<&Word> for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        Word::concat([self, rhs])
    }
}

impl Mul for Word {
    type Output = Word;

    fn mul(self, rhs: Word) -> Word {
        &self * &rhs
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Generator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> serde::Deserialize<'de> for Generator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Generator::new(&s).map_err(serde::de::Error::custom)
    }
}

/// A cyclically reduced word; equality is equality up to rotation.
#[derive(Clone)]
pub struct CyclicWord {
    rep: Word,
}

impl CyclicWord {
    /// Cyclically reduces `w` and keeps the representative.
    pub fn new(w: &Word) -> Self {
        w.cyclic_reduce().0
    }

    pub fn representative(&self) -> &Word {
        &self.rep
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    pub fn rotate_left(&self, k: usize) -> Word {
        self.rep.rotate_left(k)
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord {
            rep: self.rep.inverse(),
        }
    }

    /// Smallest `k` with `rotate_left(k) == other`.
    pub fn rotation_to(&self, other: &Word) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        if self.is_empty() {
            return Some(0);
        }
        (0..self.len()).find(|&k| &self.rep.rotate_left(k) == other)
    }

    /// Smallest rotation, a canonical key for the conjugacy class.
    pub fn canonical(&self) -> Word {
        (0..self.len().max(1))
            .map(|k| self.rep.rotate_left(k))
            .min()
            .unwrap_or_default()
    }
}

impl PartialEq for CyclicWord {
    fn eq(&self, other: &Self) -> bool {
        self.rotation_to(&other.rep).is_some()
    }
}

impl Eq for CyclicWord {}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.rep)
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclicWord({})", self.rep)
    }
}

/// Smallest `k` such that rotating left by `k` equals the letter reversal.
pub fn palindrome_rotation(w: &CyclicWord) -> Option<usize> {
    let rev = w.representative().reversed();
    w.rotation_to(&rev)
}

pub fn reduce(letters: &[Letter]) -> Word {
    Word::from_letters(letters.iter().cloned())
}

// --- parsing ---------------------------------------------------------------

fn parse_word(text: &str, alphabet: Option<&[Generator]>) -> Result<Word, WordError> {
    let text = text.trim();
    if text.is_empty() || text == "1" {
        return Ok(Word::empty());
    }
    let mut letters = Vec::new();
    for token in text.split_whitespace() {
        if token == "1" {
            continue;
        }
        let runs = match parse_token(token) {
            Some(run) if alphabet.is_none_or(|a| a.contains(&run.0)) => vec![run],
            tokenized => match parse_compact(token) {
                Some(runs) if alphabet.is_none_or(|a| runs.iter().all(|(g, _)| a.contains(g))) => runs,
                _ => match tokenized {
                    Some((g, _)) => return Err(WordError::Undeclared(g.name().to_string())),
                    None => {
                        return Err(WordError::BadToken {
                            token: token.to_string(),
                            reason: match parse_compact(token) {
                                Some(runs) => format!(
                                    "undeclared letter {}",
                                    runs.iter()
                                        .find(|(g, _)| !alphabet.is_some_and(|a| a.contains(g)))
                                        .map(|(g, _)| g.name().to_string())
                                        .unwrap_or_default()
                                ),
                                None => "expected name, name^k, or compact letters".into(),
                            },
                        })
                    }
                },
            },
        };
        for (g, n) in runs {
            letters.extend(Word::power(&g, n).letters);
        }
    }
    Ok(Word::from_letters(letters))
}

/// Reads `name`, `Name`, `name^k` or `Name^k`. An upper-case initial marks an
/// inverse unless the exponent is already negative.
fn parse_token(token: &str) -> Option<(Generator, i64)> {
    let (base, exp) = match token.split_once('^') {
        Some((b, e)) => (b, Some(e)),
        None => (token, None),
    };
    let mut chars = base.chars();
    let first = chars.next()?;
    let upper = first.is_ascii_uppercase();
    let name: String = std::iter::once(first.to_ascii_lowercase()).chain(chars).collect();
    let gen = Generator::new(&name).ok()?;
    let n = match exp {
        None => 1,
        Some(e) => parse_exponent(e)?,
    };
    let n = if upper && n > 0 { -n } else { n };
    Some((gen, n))
}

fn parse_exponent(e: &str) -> Option<i64> {
    let n: i64 = e.parse().ok()?;
    (n != 0).then_some(n)
}

fn parse_compact(token: &str) -> Option<Vec<(Generator, i64)>> {
    let bytes = token.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < bytes.len() {
        let c = bytes[i] as char;
        if !c.is_ascii_alphabetic() {
            return None;
        }
        i += 1;
        let mut n = 1i64;
        if i < bytes.len() && bytes[i] == b'^' {
            let start = i + 1;
            let mut end = start;
            if end < bytes.len() && bytes[end] == b'-' {
                end += 1;
            }
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            n = parse_exponent(&token[start..end])?;
            i = end;
        }
        let gen = Generator::new(&c.to_ascii_lowercase().to_string()).ok()?;
        if c.is_ascii_uppercase() && n > 0 {
            n = -n;
        }
        out.push((gen, n));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert!(w("c C").is_empty());
        assert_eq!(w("c l C c L"), w("c"));
        let r = w("c l c L C L^3 C L c l c l^2");
        assert_eq!(Word::from_letters(r.letters().iter().cloned()), r);
    }

    #[test]
    fn invert_examples() {
        assert_eq!(Word::empty().inverse(), Word::empty());
        assert_eq!(w("c l").inverse(), w("L C"));
        let lp = w("c^-4 l c l^3 c l^3 c l c^-15");
        assert_eq!(lp.inverse(), w("c^15 L C L^-3 C L^-3 C L c^4"));
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (rep, conj) = w("c l C").cyclic_reduce();
        assert_eq!(rep.representative(), &w("l"));
        assert_eq!(conj, w("c"));
        let x = w("c l c L");
        let (rep, conj) = x.cyclic_reduce();
        assert_eq!(rep.representative(), &x);
        assert!(conj.is_empty());
    }

    #[test]
    fn cyclic_reduce_recomposes() {
        let x = w("a b c a B A");
        let (rep, conj) = x.cyclic_reduce();
        assert_eq!(rep.representative().conjugate_by(&conj), x);
    }

    #[test]
    fn substitute_examples() {
        let f0 = Generator::named("f0");
        assert_eq!(w("f0 A").substitute(&f0, &w("F1 f2 f1")), w("F1 f2 f1 A"));
        let f1 = Generator::named("f1");
        assert_eq!(
            w("F1 f2 f1 A").substitute(&f1, &w("F2 f3 f2")),
            w("F2 F3 f2 f3 f2 A")
        );
        let g = Generator::named("g");
        let x = w("g a G b");
        assert_eq!(x.substitute(&g, &w("g")), x);
    }

    #[test]
    fn exponent_sums() {
        let c = Generator::named("c");
        assert_eq!(Word::empty().exponent_sum(&c), 0);
        assert_eq!(w("c l c L C").exponent_sum(&c), 1);
    }

    #[test]
    fn palindrome_examples() {
        let r = CyclicWord::new(&w("clcLCLLLCLclcll"));
        assert_eq!(palindrome_rotation(&r), Some(13));
        assert_eq!(palindrome_rotation(&CyclicWord::new(&w("c l C L"))), None);
        assert_eq!(palindrome_rotation(&CyclicWord::new(&w("c"))), Some(0));
    }

    #[test]
    fn grammar_forms_agree() {
        let compact = w("clcLCL^-3CLclcl^2");
        let tokens = w("c l c L C L^-3 C L c l c l^2");
        assert_eq!(compact, tokens);
        assert_eq!(compact.to_compact().unwrap(), "clcLCL^-3CLclcl^2");
        assert_eq!(w("L^3"), w("l^-3"));
        assert_eq!(w("F12"), Word::power(&Generator::named("f12"), -1));
        assert_eq!(w("1"), Word::empty());
        assert_eq!(Word::empty().to_string(), "1");
    }

    #[test]
    fn parse_in_alphabet() {
        let abc: Vec<Generator> = ["c", "l"].iter().map(|n| Generator::named(n)).collect();
        assert_eq!(Word::parse_in("clc", &abc).unwrap(), w("c l c"));
        assert!(Word::parse_in("cxc", &abc).is_err());
        assert!(Word::parse("c^0").is_err());
        assert!(Word::parse("3c").is_err());
    }

    #[test]
    fn display_round_trip() {
        let x = w("f1 f1 F2 a^-3 b");
        assert_eq!(x.to_string(), "f1^2 F2 A^-3 b");
        assert_eq!(w(&x.to_string()), x);
    }
}
