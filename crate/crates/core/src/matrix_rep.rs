//! Integer representations of the point-push group.
//!
//! `E(k) = I + T(k)` represents `a_k`, where `T(k)` is zero off row `k`, and
//! `A(k) = |E(k)|` is the reduced incidence matrix of `a_k^{+-1}`.
//! `H(N) = E(1)...E(N)` and `Hhat(N) = A(1)...A(N)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::laurent::{phi, Cover};
use crate::protocol::ProtocolWord;

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::IndexOutOfRange { index: k, rank: n })
    } else {
        Ok(())
    }
}

fn pow3(e: usize) -> BigInt {
    num_traits::pow(BigInt::from(3), e)
}

/// Entry `T(k)_{kj}` for `j != k`.
fn t_entry(k: usize, j: usize) -> i64 {
    let e = if j < k { k - j + 1 } else { j - k };
    if e % 2 == 0 {
        2
    } else {
        -2
    }
}

pub fn gen_t(k: usize, n: usize) -> Result<ExactMatrix> {
    check_k(k, n)?;
    let mut m = ExactMatrix::zeros(n);
    for j in (1..=n).filter(|&j| j != k) {
        m.set(k - 1, j - 1, t_entry(k, j).into());
    }
    Ok(m)
}

pub fn gen_e(k: usize, n: usize) -> Result<ExactMatrix> {
    ExactMatrix::identity(n).add(&gen_t(k, n)?)
}

/// `I - T(k)`, the inverse of `E(k)` since `T(k)^2 = 0`.
pub fn gen_e_inverse(k: usize, n: usize) -> Result<ExactMatrix> {
    let t = gen_t(k, n)?;
    let neg = ExactMatrix::from_big_rows(t.rows().map(|r| r.iter().map(|x| -x).collect()).collect())?;
    ExactMatrix::identity(n).add(&neg)
}

/// `A(k) = I + S(k)` with `S(k)_{kj} = 2` for `j != k`.
pub fn gen_a(k: usize, n: usize) -> Result<ExactMatrix> {
    check_k(k, n)?;
    let mut m = ExactMatrix::identity(n);
    for j in (1..=n).filter(|&j| j != k) {
        m.set(k - 1, j - 1, 2.into());
    }
    Ok(m)
}

/// Unreduced incidence matrix on all `N + 1` loops; the last row is `e(N+1)`.
pub fn gen_a_bar(k: usize, n: usize) -> Result<ExactMatrix> {
    check_k(k, n)?;
    let mut m = ExactMatrix::identity(n + 1);
    for j in (1..=n + 1).filter(|&j| j != k) {
        m.set(k - 1, j - 1, 2.into());
    }
    Ok(m)
}

/// Generator matrices `[E(k), E(k)^-1]` for `k = 1..=n`.
fn e_table(n: usize) -> Vec<[ExactMatrix; 2]> {
    (1..=n)
        .map(|k| {
            [
                gen_e(k, n).expect("k in range"),
                gen_e_inverse(k, n).expect("k in range"),
            ]
        })
        .collect()
}

pub fn psi(p: &ProtocolWord) -> ExactMatrix {
    let n = p.n_obstacles();
    let table = e_table(n);
    ExactMatrix::product(
        n,
        p.letters()
            .iter()
            .map(|l| &table[l.index() - 1][usize::from(!l.is_positive())]),
    )
    .expect("matching dimensions")
}

/// `H(k) = E(1) ... E(k)` as an `n x n` matrix.
pub fn h_partial(k: usize, n: usize) -> Result<ExactMatrix> {
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, rank: n });
    }
    let es = (1..=k).map(|j| gen_e(j, n)).collect::<Result<Vec<_>>>()?;
    ExactMatrix::product(n, es.iter())
}

pub fn h_matrix(n: usize) -> Result<ExactMatrix> {
    check_n(n)?;
    h_partial(n, n)
}

pub fn hhat_matrix(n: usize) -> Result<ExactMatrix> {
    check_n(n)?;
    let a = (1..=n).map(|j| gen_a(j, n)).collect::<Result<Vec<_>>>()?;
    ExactMatrix::product(n, a.iter())
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::TooFewObstacles { min: 2, found: n })
    } else {
        Ok(())
    }
}

/// `-3^N + 3N + 1`.
pub fn h_trace_formula(n: usize) -> BigInt {
    BigInt::from(3 * n + 1) - pow3(n)
}

/// `-3^k + 2k + N + 1`, the trace of `H(k)`.
pub fn h_partial_trace_formula(k: usize, n: usize) -> BigInt {
    BigInt::from(2 * k + n + 1) - pow3(k)
}

/// `3^N - 2 * 3^(j-1)`.
pub fn hhat_column_sum_formula(j: usize, n: usize) -> BigInt {
    pow3(n) - BigInt::from(2) * pow3(j - 1)
}

/// `3^N - N - 1`.
pub fn hhat_trace_formula(n: usize) -> BigInt {
    pow3(n) - BigInt::from(n + 1)
}

/// Closed form for the entries `H(k)_{i, k+m}`, `1 <= m <= N - k` (1-based).
pub fn h_partial_entry_formula(k: usize, i: usize, col: usize) -> BigInt {
    debug_assert!(col > k);
    if i <= k {
        let sign = if (i + col).is_multiple_of(2) { 1 } else { -1 };
        BigInt::from(2 * sign) * pow3(k - i)
    } else if i == col {
        BigInt::one()
    } else {
        BigInt::zero()
    }
}

/// One step of the recursion `H(k+1)_{ab} = H(k)_{ab} + H(k)_{a,k+1} T(k+1)_{k+1,b}`.
pub fn h_recursion_step(h: &ExactMatrix, k: usize) -> Result<ExactMatrix> {
    let n = h.dim();
    check_k(k + 1, n)?;
    let mut out = h.clone();
    for a in 0..n {
        let pivot = h.get(a, k);
        if pivot.is_zero() {
            continue;
        }
        for b in (0..n).filter(|&b| b != k) {
            let v = h.get(a, b) + pivot * t_entry(k + 1, b + 1);
            out.set(a, b, v);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellMismatch {
    /// 1-based row.
    pub row: usize,
    /// 1-based column.
    pub col: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntermediateReport {
    pub n: usize,
    pub k: usize,
    pub cells_checked: usize,
    pub first_mismatch: Option<CellMismatch>,
    pub trace_expected: String,
    pub trace_found: String,
    pub recursion_ok: bool,
}

impl IntermediateReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none() && self.trace_expected == self.trace_found && self.recursion_ok
    }
}

/// Check a candidate for `H(k)` against the closed forms for columns
/// `k+1..=N` and the trace. `prev`, if given, is `H(k-1)` and the recursion
/// step from it must reproduce `h`.
pub fn check_intermediate(h: &ExactMatrix, prev: Option<&ExactMatrix>, k: usize, n: usize) -> IntermediateReport {
    let mut cells = 0;
    let mut first = None;
    'outer: for i in 1..=n {
        for col in k + 1..=n {
            cells += 1;
            let want = h_partial_entry_formula(k, i, col);
            let got = h.get(i - 1, col - 1);
            if *got != want {
                first = Some(CellMismatch {
                    row: i,
                    col,
                    expected: want.to_string(),
                    found: got.to_string(),
                });
                break 'outer;
            }
        }
    }
    let recursion_ok = match prev {
        Some(p) if k >= 1 => h_recursion_step(p, k - 1).is_ok_and(|s| s == *h),
        _ => true,
    };
    IntermediateReport {
        n,
        k,
        cells_checked: cells,
        first_mismatch: first,
        trace_expected: h_partial_trace_formula(k, n).to_string(),
        trace_found: h.trace().to_string(),
        recursion_ok,
    }
}

/// Verify the closed forms for `H(k)`, `1 <= k < N`.
pub fn verify_intermediate(k: usize, n: usize) -> Result<IntermediateReport> {
    if k == 0 || k >= n {
        return Err(Error::InvalidRange(format!("need 1 <= k < N, got k = {k}, N = {n}")));
    }
    let h = h_partial(k, n)?;
    let prev = h_partial(k - 1, n)?;
    Ok(check_intermediate(&h, Some(&prev), k, n))
}

/// Check `c(M A(k))` against `c_j(M) + 2 c_k(M)` (`j != k`) and `c_k(M)`, and
/// the trace step `trace(M A(k)) = trace(M) + 2 c_k(M) - 2 M_kk`.
pub fn column_sum_step_holds(m: &ExactMatrix, k: usize) -> Result<bool> {
    let n = m.dim();
    let c = m.column_sums();
    let ma = m.mul(&gen_a(k, n)?)?;
    let got = ma.column_sums();
    let ck = &c[k - 1];
    let cols_ok = (0..n).all(|j| {
        if j == k - 1 {
            got[j] == *ck
        } else {
            got[j] == &c[j] + BigInt::from(2) * ck
        }
    });
    let trace_ok = ma.trace() == m.trace() + BigInt::from(2) * (ck - m.get(k - 1, k - 1));
    Ok(cols_ok && trace_ok)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub n: usize,
    pub cover: Cover,
    pub equal: bool,
    /// Last row of the untruncated matrix at `t = -1` is `(0, ..., 0, +-1)`.
    pub last_row_ok: bool,
    pub last_entry: String,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.equal && self.last_row_ok
    }
}

/// Cover whose value at `t = -1` truncates to `Psi`: full for even `N`,
/// prime for odd `N`.
pub fn psi_cover(n: usize) -> Cover {
    if n.is_multiple_of(2) {
        Cover::Full
    } else {
        Cover::Prime
    }
}

/// Compare `Psi(p)` with the truncation of `Phi(p)(-1)` or `Phi'(p)(-1)`.
pub fn psi_phi_consistency(p: &ProtocolWord) -> Result<ConsistencyReport> {
    let n = p.n_obstacles();
    let cover = psi_cover(n);
    let c = phi(p, cover).eval_sign(-1)?;
    let last = c.row(n);
    let last_entry = &last[n];
    let last_row_ok =
        last[..n].iter().all(Zero::is_zero) && (last_entry.is_one() || (-last_entry).is_one());
    Ok(ConsistencyReport {
        n,
        cover,
        equal: c.truncate_last() == psi(p),
        last_row_ok,
        last_entry: last_entry.to_string(),
    })
}
