//! Exact Smith normal form over arbitrary-precision integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Diagonal form of an integer matrix together with the column transform.
#[derive(Debug, Clone)]
pub struct SmithForm {
    /// Non-zero diagonal entries, positive, each dividing the next.
    pub diagonal: Vec<BigInt>,
    pub cols: usize,
    /// Unimodular `V` with `U · A · V = D`.
    pub col_transform: Vec<Vec<BigInt>>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Invariant factors of the cokernel `ℤⁿ / rowspace(A)`: the entries
    /// above one, then one zero per free summand.
    pub fn invariants(&self) -> AbelianInvariants {
        let mut factors: Vec<BigInt> = self.diagonal.iter().filter(|d| !d.is_one()).cloned().collect();
        factors.extend(std::iter::repeat_n(BigInt::zero(), self.cols - self.rank()));
        AbelianInvariants { factors }
    }
}

#[allow(clippy::needless_range_loop)]
pub fn smith_normal_form(matrix: &[Vec<BigInt>], cols: usize) -> SmithForm {
    let mut a: Vec<Vec<BigInt>> = matrix.to_vec();
    let rows = a.len();
    let mut v: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();

    let mut t = 0;
    while t < rows.min(cols) {
        // smallest non-zero entry of the trailing block
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()));
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);

        let mut clean = true;
        for i in t + 1..rows {
            if a[i][t].is_zero() {
                continue;
            }
            let q = a[i][t].div_floor(&a[t][t]);
            for j in t..cols {
                let d = &q * &a[t][j];
                a[i][j] -= d;
            }
            clean &= a[i][t].is_zero();
        }
        for j in t + 1..cols {
            if a[t][j].is_zero() {
                continue;
            }
            let q = a[t][j].div_floor(&a[t][t]);
            col_axpy(&mut a, j, t, &q);
            col_axpy(&mut v, j, t, &q);
            clean &= a[t][j].is_zero();
        }
        if !clean {
            continue;
        }
        // divisibility: fold an offending row into row t and retry
        let offending = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
        if let Some(i) = offending {
            for j in t..cols {
                let x = a[i][j].clone();
                a[t][j] += x;
            }
            continue;
        }
        if a[t][t].is_negative() {
            for j in t..cols {
                a[t][j] = -a[t][j].clone();
            }
        }
        t += 1;
    }
    SmithForm {
        diagonal: (0..t).map(|i| a[i][i].clone()).collect(),
        cols,
        col_transform: v,
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// column `dst -= q · column src`
fn col_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let d = q * &row[src];
        row[dst] -= d;
    }
}

/// Invariant factors of a finitely generated abelian group; `0` is a `ℤ` summand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub factors: Vec<BigInt>,
}

impl AbelianInvariants {
    pub fn from_u64s(fs: &[u64]) -> Self {
        AbelianInvariants {
            factors: fs.iter().map(|&f| BigInt::from(f)).collect(),
        }
    }

    /// Group order, `0` when infinite.
    pub fn order(&self) -> BigInt {
        if self.factors.iter().any(Zero::is_zero) {
            BigInt::zero()
        } else {
            self.factors.iter().product()
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl serde::Serialize for AbelianInvariants {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.factors.len()))?;
        for f in &self.factors {
            match f.to_u64() {
                Some(x) => seq.serialize_element(&x)?,
                None => seq.serialize_element(&f.to_string())?,
            }
        }
        seq.end()
    }
}
