//! Dehn fillings of the knot group and peripheral ℤ² bookkeeping.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::derivation::{knot_relator, simplified_longitude};
use crate::freegroup::{Generator, Word};
use crate::knot::{KnotError, PretzelSpec, R_INF};
use crate::presentation::{Labeled, Presentation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("invalid slope {0:?}: expected P/Q")]
    Syntax(String),
    #[error("slope {p}/{q}: q must be positive")]
    NonPositiveQ { p: i64, q: i64 },
    #[error("slope {p}/{q}: gcd(p, q) = {g}, not 1")]
    NotCoprime { p: i64, q: i64, g: i64 },
    #[error(transparent)]
    Knot(#[from] KnotError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Self, SurgeryError> {
        if q <= 0 {
            return Err(SurgeryError::NonPositiveQ { p, q });
        }
        let g = p.gcd(&q);
        if g != 1 {
            return Err(SurgeryError::NotCoprime { p, q, g });
        }
        Ok(Slope { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `p/q ≥ 4s + 7`.
    pub fn at_least(&self, bound: i64) -> bool {
        self.p >= bound * self.q
    }
}

impl FromStr for Slope {
    type Err = SurgeryError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || SurgeryError::Syntax(text.to_string());
        let (p, q) = text.trim().split_once('/').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        Slope::new(p, q)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `M^m L^l` in the peripheral ℤ².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PeripheralVector {
    pub m: i64,
    pub l: i64,
}

impl PeripheralVector {
    pub const fn new(m: i64, l: i64) -> Self {
        PeripheralVector { m, l }
    }

    pub fn scale(self, n: i64) -> Self {
        PeripheralVector::new(self.m * n, self.l * n)
    }

    /// Equality after filling, i.e. modulo `ℤ·(p, q)`.
    pub fn congruent(self, o: Self, slope: Slope) -> bool {
        let d = self - o;
        d.m as i128 * slope.q as i128 == d.l as i128 * slope.p as i128
    }
}

impl std::ops::Sub for PeripheralVector {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        PeripheralVector::new(self.m - o.m, self.l - o.l)
    }
}

impl fmt::Display for PeripheralVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M^{} L^{}", self.m, self.l)
    }
}

#[derive(Debug, Clone)]
pub struct SurgeredPresentation {
    pub s: i64,
    pub slope: Slope,
    pub presentation: Presentation,
    pub meridian: Word,
    pub longitude: Word,
}

pub const R_FILL: &str = "r_fill";

pub fn surgered_presentation(s: i64, slope: Slope) -> Result<SurgeredPresentation, SurgeryError> {
    PretzelSpec::new(s)?;
    let meridian = Word::gen(&Generator::named("c"));
    let longitude = simplified_longitude(s);
    let filling = &meridian.pow(slope.p) * &longitude.pow(slope.q);
    let presentation = Presentation::new(
        vec![Generator::named("c"), Generator::named("l")],
        vec![Labeled::new(R_INF, knot_relator(s)), Labeled::new(R_FILL, filling)],
    )
    .expect("two-generator presentation")
    .with_provenance(&format!("GK({})", slope));
    Ok(SurgeredPresentation {
        s,
        slope,
        presentation,
        meridian,
        longitude,
    })
}

/// `k = M^b L^{-r}` from `r p + b q = 1`, with `0 ≤ r < q` (`r = 0` when `q = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BezoutK {
    pub r: i64,
    pub b: i64,
    pub k: PeripheralVector,
}

pub fn bezout_k(slope: Slope) -> BezoutK {
    let (p, q) = (slope.p, slope.q);
    let r = if q == 1 {
        0
    } else {
        let e = p.rem_euclid(q).extended_gcd(&q);
        e.x.rem_euclid(q)
    };
    let b = (1 - r as i128 * p as i128) / q as i128;
    let b = b.to_i64().expect("Bezout coefficient fits");
    BezoutK {
        r,
        b,
        k: PeripheralVector::new(b, -r),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaKReport {
    pub slope: Slope,
    pub bezout: BezoutK,
    /// `k^q ≡ M`
    pub root_of_meridian: bool,
    /// `k^{-p} ≡ L`
    pub root_of_longitude: bool,
    pub pass: bool,
}

pub fn verify_lemma_k(slope: Slope) -> LemmaKReport {
    let bz = bezout_k(slope);
    let root_of_meridian = bz.k.scale(slope.q).congruent(PeripheralVector::new(1, 0), slope);
    let root_of_longitude = bz.k.scale(-slope.p).congruent(PeripheralVector::new(0, 1), slope);
    LemmaKReport {
        slope,
        bezout: bz,
        root_of_meridian,
        root_of_longitude,
        pass: bz.r * slope.p + bz.b * slope.q == 1 && root_of_meridian && root_of_longitude,
    }
}

/// `W(s) = l̄ c̄ l̄^s c̄ l̄^s c̄ l̄`.
pub fn fact_word(s: i64) -> Word {
    let l = |n| Word::power(&Generator::named("l"), n);
    let c = |n| Word::power(&Generator::named("c"), n);
    Word::concat(&[l(-1), c(-1), l(-s), c(-1), l(-s), c(-1), l(-1)])
}

/// Exponent `p − (4s+7) q` of `k` in the fact identity.
pub fn fact_exponent(s: i64, slope: Slope) -> i64 {
    slope.p - (4 * s + 7) * slope.q
}

#[derive(Debug, Clone, Serialize)]
pub struct FactReport {
    pub s: i64,
    /// `L′⁻¹` after free reduction.
    pub inverse_longitude: Word,
    pub leading_c: i64,
    pub trailing_c: i64,
    /// `reduce(L′⁻¹) = c^{2s+9} W c^{2s-2}` exactly.
    pub free_identity: bool,
    /// Leading plus trailing meridian power equals `4s + 7`.
    pub exponent_bookkeeping: bool,
    /// `W ≡ k^{p-(4s+7)q}` in the filled peripheral lattice, on sample slopes.
    pub lattice_check: bool,
    pub pass: bool,
}

pub fn verify_fact(s: i64) -> Result<FactReport, SurgeryError> {
    PretzelSpec::new(s)?;
    let inv = simplified_longitude(s).inverse();
    let c = Generator::named("c");
    let runs = inv.runs();
    let run_of = |i: Option<&(Generator, i64)>| match i {
        Some((g, n)) if *g == c => *n,
        _ => 0,
    };
    let (leading_c, trailing_c) = (run_of(runs.first()), run_of(runs.last()));
    let expected = Word::concat(&[
        Word::power(&c, 2 * s + 9),
        fact_word(s),
        Word::power(&c, 2 * s - 2),
    ]);
    let free_identity = inv == expected;
    let exponent_bookkeeping = leading_c + trailing_c == 4 * s + 7;
    // W = M^{-(leading + trailing)} L^{-1} since M and L commute
    let w = PeripheralVector::new(-(leading_c + trailing_c), -1);
    let lattice_check = sample_slopes().all(|slope| {
        let k = bezout_k(slope).k;
        k.scale(fact_exponent(s, slope)).congruent(w, slope)
    });
    Ok(FactReport {
        s,
        inverse_longitude: inv,
        leading_c,
        trailing_c,
        free_identity,
        exponent_bookkeeping,
        lattice_check,
        pass: free_identity && exponent_bookkeeping && lattice_check,
    })
}

fn sample_slopes() -> impl Iterator<Item = Slope> {
    (1..=5).flat_map(|q| (-60..=60).filter_map(move |p| Slope::new(p, q).ok()))
}

/// `|H₁|` of the filled manifold, `0` when infinite.
pub fn h1_order(s: i64, slope: Slope) -> Result<num_bigint::BigInt, SurgeryError> {
    Ok(surgered_presentation(s, slope)?.presentation.abelianization().order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn slope_parsing() {
        assert_eq!("19/1".parse::<Slope>().unwrap(), Slope::new(19, 1).unwrap());
        assert_eq!("-7/3".parse::<Slope>().unwrap().p(), -7);
        assert!(matches!("38/2".parse::<Slope>(), Err(SurgeryError::NotCoprime { .. })));
        assert!(matches!("3/0".parse::<Slope>(), Err(SurgeryError::NonPositiveQ { .. })));
        assert!(matches!("3".parse::<Slope>(), Err(SurgeryError::Syntax(_))));
    }

    #[test]
    fn bezout_examples() {
        let k = bezout_k(Slope::new(19, 1).unwrap());
        assert_eq!((k.r, k.b, k.k), (0, 1, PeripheralVector::new(1, 0)));
        let k = bezout_k(Slope::new(39, 2).unwrap());
        assert_eq!((k.r, k.b, k.k), (1, -19, PeripheralVector::new(-19, -1)));
        let k = bezout_k(Slope::new(-7, 3).unwrap());
        assert_eq!(k.r * -7 + k.b * 3, 1);
        assert!((0..3).contains(&k.r));
    }

    #[test]
    fn other_bezout_pair_is_congruent() {
        let slope = Slope::new(39, 2).unwrap();
        let k = bezout_k(slope);
        let other = PeripheralVector::new(k.b - slope.p(), -(k.r + slope.q()));
        assert!(other.congruent(k.k, slope));
    }

    #[test]
    fn lemma_and_fact() {
        assert!(verify_lemma_k(Slope::new(19, 1).unwrap()).pass);
        assert!(verify_lemma_k(Slope::new(39, 2).unwrap()).pass);
        let f = verify_fact(3).unwrap();
        assert!(f.pass, "{f:?}");
        assert_eq!(f.inverse_longitude, Word::parse("c^15 L C L^-3 C L^-3 C L c^4").unwrap());
        assert_eq!(fact_exponent(3, Slope::new(19, 1).unwrap()), 0);
    }

    #[test]
    fn homology() {
        assert_eq!(h1_order(3, Slope::new(19, 1).unwrap()).unwrap(), BigInt::from(19));
        assert_eq!(h1_order(3, Slope::new(39, 2).unwrap()).unwrap(), BigInt::from(39));
        assert_eq!(h1_order(4, Slope::new(23, 1).unwrap()).unwrap(), BigInt::from(23));
        assert_eq!(h1_order(3, Slope::new(0, 1).unwrap()).unwrap(), BigInt::from(0));
    }
}
