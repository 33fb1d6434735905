//! Square matrices of arbitrary-precision integers.
//!
//! Row-major storage. Matrices act on row vectors from the right, so the
//! image of the i-th basis vector is row i and `A * B` means "A, then B".

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    dim: usize,
    data: Vec<BigInt>,
}

impl ExactMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = BigInt::one();
        }
        m
    }

    /// Build from rows of machine integers; panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), dim, "matrix must be square");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self { dim, data }
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at zero-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: BigInt) {
        self.data[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[BigInt] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.data.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.data[k * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Ordered product `ms[0] * ms[1] * ...`; identity of `dim` for an empty list.
    pub fn product<'a, I>(dim: usize, ms: I) -> Result<ExactMatrix>
    where
        I: IntoIterator<Item = &'a ExactMatrix>,
    {
        ms.into_iter()
            .try_fold(Self::identity(dim), |acc, m| acc.mul(m))
    }

    pub fn pow(&self, mut e: u32) -> ExactMatrix {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same dim");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same dim");
            }
        }
        acc
    }

    pub fn add(&self, rhs: &ExactMatrix) -> Result<ExactMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn transpose(&self) -> ExactMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].clone();
            }
        }
        out
    }

    /// Entrywise absolute value.
    pub fn abs(&self) -> ExactMatrix {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x.abs()).collect(),
        }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| &self.data[i * self.dim + i]).sum()
    }

    /// Column sums `c_j = sum_i M_ij` as a row vector.
    pub fn column_sums(&self) -> Vec<BigInt> {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| &self.data[i * n + j]).sum())
            .collect()
    }

    /// Induced 1-norm: maximum absolute column sum.
    pub fn norm_one(&self) -> BigInt {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].abs()).sum::<BigInt>())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Induced infinity-norm: maximum absolute row sum.
    pub fn norm_inf(&self) -> BigInt {
        self.rows()
            .map(|r| r.iter().map(|x| x.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Delete the last row and column.
    pub fn truncate_last(&self) -> ExactMatrix {
        let n = self.dim.saturating_sub(1);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[i * self.dim + j].clone();
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        let n = self.dim;
        assert_eq!(v.len(), n);
        (0..n)
            .map(|j| (0..n).map(|i| &v[i] * &self.data[i * n + j]).sum())
            .collect()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| big_to_f64(self.get(i, j)))
    }

    /// Row-major rows of decimal strings, used by text and CSV output.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        self.rows()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect()
    }

    /// CSV, one matrix row per record, no header.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(Vec::new());
        for r in self.to_string_rows() {
            w.write_record(&r)
                .map_err(|e| Error::Serialization(e.to_string()))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Serialization(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// Nearest `f64` to a big integer, saturating to infinity.
pub fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// Natural logarithm of `|x|` that stays finite for integers beyond `f64` range.
pub fn big_ln_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return big_to_f64(x).abs().ln();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub(crate) fn big_to_json(x: &BigInt) -> serde_json::Number {
    x.to_string()
        .parse()
        .expect("decimal integer is a JSON number")
}

impl Serialize for ExactMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<serde_json::Number>> = self
            .rows()
            .map(|r| r.iter().map(big_to_json).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<serde_json::Number>> = Vec::deserialize(d)?;
        let rows = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| x.to_string().parse::<BigInt>().map_err(D::Error::custom))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        ExactMatrix::from_big_rows(rows).map_err(D::Error::custom)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.to_string_rows();
        let width = cells.iter().flatten().map(|s| s.len()).max().unwrap_or(1);
        for r in cells {
            let line: Vec<String> = r.iter().map(|s| format!("{s:>width$}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}
