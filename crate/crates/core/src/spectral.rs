//! Characteristic polynomials, determinants, roots and spectral radii.
//!
//! Polynomials and determinants are exact. Roots come from a companion-matrix
//! eigensolve of each square-free factor, polished by Aberth iteration against
//! the integer coefficients; every root carries an a-posteriori error bound.

use std::fmt;

use nalgebra::{DMatrix, Schur};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::exact::{big_ln_abs, big_to_f64, ExactMatrix};

const SCHUR_ITERS: usize = 10_000;
// Deflation thresholds for the QR iteration, tried in order. Plain machine
// epsilon stalls on matrices with clustered or defective eigenvalues.
const SCHUR_EPS: [f64; 3] = [8.0 * f64::EPSILON, 64.0 * f64::EPSILON, 512.0 * f64::EPSILON];

fn schur(m: DMatrix<f64>) -> Result<Schur<f64, nalgebra::Dyn>> {
    SCHUR_EPS
        .iter()
        .find_map(|&eps| Schur::try_new(m.clone(), eps, SCHUR_ITERS))
        .ok_or(Error::NoConvergence { bracket: f64::NAN })
}

/// Integer polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + big_to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigInt::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) - other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Pseudo-remainder of `self` by `d`.
    fn prem(&self, d: &Self) -> Self {
        let mut r = self.coeffs.clone();
        let dl = d.leading();
        let dd = d.degree();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let lc = r.last().cloned().unwrap();
            for c in r.iter_mut() {
                *c *= &dl;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &lc * dc;
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Primitive greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.prem(&b).primitive_part();
            a = b;
            b = r;
        }
        a.primitive_part()
    }

    /// Exact quotient; `None` if `d` does not divide `self` in `Z[x]`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let dl = d.leading();
        if r.len() < d.coeffs.len() {
            return r.is_empty().then(Self::zero);
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let (qk, rem) = r[k + dd].div_rem(&dl);
            if !rem.is_zero() {
                return None;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &qk * dc;
            }
            q[k] = qk;
        }
        r.iter().all(|c| c.is_zero()).then(|| Self::new(q))
    }

    /// Yun's square-free decomposition: `(factor, multiplicity)` pairs with
    /// primitive, pairwise coprime, square-free factors of positive degree.
    pub fn square_free_factors(&self) -> Vec<(IntPolynomial, usize)> {
        let f = self.primitive_part();
        if f.degree() == 0 {
            return Vec::new();
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact(&a0).expect("gcd divides");
        let c = fp.div_exact(&a0).expect("gcd divides derivative");
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            let nb = b.div_exact(&a).expect("gcd divides");
            let nc = d.div_exact(&a).expect("gcd divides");
            if a.degree() > 0 {
                out.push((a, i));
            }
            d = nc.sub(&nb.derivative());
            b = nb;
            i += 1;
        }
        out
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<serde_json::Number> = self.coeffs.iter().map(crate::exact::big_to_json).collect();
        v.serialize(s)
    }
}

/// `det(xI - M)` by Berkowitz's division-free algorithm.
pub fn char_poly(m: &ExactMatrix) -> IntPolynomial {
    let n = m.dim();
    // Descending coefficients of the characteristic polynomial of the leading
    // principal submatrix processed so far.
    let mut v: Vec<BigInt> = vec![BigInt::one()];
    for r in 0..n {
        let col: Vec<BigInt> = (0..r).map(|i| m.get(i, r).clone()).collect();
        let row: Vec<&BigInt> = (0..r).map(|j| m.get(r, j)).collect();
        let mut t = Vec::with_capacity(r + 2);
        t.push(BigInt::one());
        t.push(-m.get(r, r));
        let mut x = col;
        for _ in 0..r {
            let s: BigInt = row.iter().zip(&x).map(|(a, b)| *a * b).sum();
            t.push(-s);
            x = (0..r)
                .map(|i| (0..r).map(|j| m.get(i, j) * &x[j]).sum())
                .collect();
        }
        let mut nv = vec![BigInt::zero(); r + 2];
        for (i, out) in nv.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                if i >= j {
                    *out += &t[i - j] * vj;
                }
            }
        }
        v = nv;
    }
    v.reverse();
    IntPolynomial::new(v)
}

/// Exact determinant by fraction-free Bareiss elimination.
pub fn det(m: &ExactMatrix) -> BigInt {
    let n = m.dim();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.rows().map(|r| r.to_vec()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// A root with its multiplicity and an upper bound on its distance to the
/// true root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub error_bound: f64,
}

impl Root {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(&self) -> f64 {
        self.value().norm()
    }
}

/// Evaluation data for Aberth/Newton steps, safe for large `|z|`: for
/// `|z| > 1` the reversed polynomial is evaluated at `1/z`.
struct Eval {
    ratio: Complex64,
    bound: f64,
}

fn eval_ratio(c: &[f64], z: Complex64) -> Eval {
    let d = c.len() - 1;
    let u = f64::EPSILON;
    if z.norm() <= 1.0 {
        let (mut p, mut dp, mut b) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
        let r = z.norm();
        for &a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
            b = b * r + a.abs();
        }
        let err = 4.0 * (d as f64 + 1.0) * u * b;
        Eval {
            ratio: p / dp,
            bound: (d as f64) * (p.norm() + err) / dp.norm(),
        }
    } else {
        let w = z.inv();
        let r = w.norm();
        let (mut q, mut dq, mut b) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
        for &a in c.iter() {
            dq = dq * w + q;
            q = q * w + a;
            b = b * r + a.abs();
        }
        let err = 4.0 * (d as f64 + 1.0) * u * b;
        let den = q * d as f64 - w * dq;
        Eval {
            ratio: z * q / den,
            bound: (d as f64) * z.norm() * (q.norm() + err) / den.norm(),
        }
    }
}

/// Eigenvalues read off the quasi-triangular real Schur factor. The 2x2
/// blocks are solved with a complex square root, which stays finite when the
/// discriminant is a tiny negative number.
fn real_schur_eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let (_, t) = schur(m)?.unpack();
    let n = t.nrows();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half = (a + d) / 2.0;
            let disc = Complex64::new(((a - d) / 2.0).powi(2) + b * c, 0.0).sqrt();
            out.push(half + disc);
            out.push(half - disc);
            i += 2;
        } else {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    Ok(out)
}

fn companion_roots(c: &[f64]) -> Result<Vec<Complex64>> {
    let d = c.len() - 1;
    let lead = c[d];
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i] / lead;
    }
    real_schur_eigenvalues(m)
}

/// Roots of a square-free polynomial with error bounds.
fn simple_roots(p: &IntPolynomial) -> Result<Vec<(Complex64, f64)>> {
    let c: Vec<f64> = p.coeffs.iter().map(big_to_f64).collect();
    let d = p.degree();
    if d == 0 {
        return Ok(Vec::new());
    }
    if d == 1 {
        let z = Complex64::new(-c[0] / c[1], 0.0);
        let e = eval_ratio(&c, z);
        return Ok(vec![(z, e.bound)]);
    }
    let mut z = companion_roots(&c)?;
    for _ in 0..200 {
        let mut done = true;
        for k in 0..d {
            let e = eval_ratio(&c, z[k]);
            if !e.ratio.is_finite() {
                continue;
            }
            let s: Complex64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let w = e.ratio / (Complex64::new(1.0, 0.0) - e.ratio * s);
            if w.is_finite() {
                z[k] -= w;
                if w.norm() > 4.0 * f64::EPSILON * z[k].norm().max(1.0) {
                    done = false;
                }
            }
        }
        if done {
            break;
        }
    }
    let mut out: Vec<(Complex64, f64)> = z
        .into_iter()
        .map(|z| {
            // Real polynomials: snap roots whose imaginary part is within the
            // error bound onto the real axis.
            let e = eval_ratio(&c, z);
            let zr = Complex64::new(z.re, 0.0);
            let er = eval_ratio(&c, zr);
            if z.im.abs() <= e.bound && er.bound.is_finite() && er.bound <= e.bound + z.im.abs() {
                (zr, er.bound)
            } else {
                (z, e.bound)
            }
        })
        .collect();
    out.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()).then(b.0.im.total_cmp(&a.0.im)));
    Ok(out)
}

/// All roots of `p` with multiplicity, sorted by decreasing modulus.
pub fn roots(p: &IntPolynomial) -> Result<Vec<Root>> {
    let mut out = Vec::new();
    for (f, mult) in p.square_free_factors() {
        for (z, eb) in simple_roots(&f)? {
            out.push(Root {
                re: z.re,
                im: z.im,
                multiplicity: mult,
                error_bound: eb,
            });
        }
    }
    out.sort_by(|a, b| b.modulus().total_cmp(&a.modulus()).then(b.im.total_cmp(&a.im)));
    Ok(out)
}

/// Eigenvalues of an integer matrix with multiplicity, from its
/// characteristic polynomial.
pub fn eigenvalues(m: &ExactMatrix) -> Result<Vec<Complex64>> {
    Ok(roots(&char_poly(m))?
        .into_iter()
        .flat_map(|r| std::iter::repeat_n(r.value(), r.multiplicity))
        .collect())
}

/// Eigenvalues from a direct Schur decomposition of the floating-point matrix.
pub fn eigenvalues_direct(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    real_schur_eigenvalues(m.clone())
}

/// Replace each cluster of eigenvalues (single linkage within
/// `radius * max(1, |z|)`) by copies of its centroid. A Jordan block of size
/// `k` scatters computed eigenvalues by about `eps^(1/k)`, while the centroid
/// stays accurate to working precision.
pub fn consolidate_clusters(values: &[Complex64], radius: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = values[i].norm().max(values[j].norm()).max(1.0);
            if (values[i] - values[j]).norm() <= radius * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut label, i)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for &r in &roots {
        let members: Vec<usize> = (0..n).filter(|&i| roots[i] == r).collect();
        let mean = members.iter().map(|&i| values[i]).sum::<Complex64>() / members.len() as f64;
        for i in members {
            out[i] = mean;
        }
    }
    out
}

pub fn complex_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let s = SCHUR_EPS
        .iter()
        .find_map(|&eps| Schur::try_new(m.clone(), eps, SCHUR_ITERS))
        .ok_or(Error::NoConvergence { bracket: f64::NAN })?;
    s.eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or(Error::NoConvergence { bracket: f64::NAN })
}

/// Spectral radius of a complex matrix.
pub fn complex_spectral_radius(m: &DMatrix<Complex64>) -> Result<f64> {
    Ok(complex_eigenvalues(m)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Match two eigenvalue multisets within `tol * max(1, |z|)`. Returns the
/// first unmatched value of `a` on failure.
pub fn multiset_match(a: &[Complex64], b: &[Complex64], tol: f64) -> std::result::Result<(), Complex64> {
    if a.len() != b.len() {
        return Err(Complex64::new(f64::NAN, f64::NAN));
    }
    let mut used = vec![false; b.len()];
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[j].norm().total_cmp(&a[i].norm()));
    for i in order {
        let best = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&x, &y| (a[i] - b[x]).norm().total_cmp(&(a[i] - b[y]).norm()));
        match best {
            Some(j) if (a[i] - b[j]).norm() <= tol * a[i].norm().max(1.0) => used[j] = true,
            _ => return Err(a[i]),
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Pisot,
    Salem,
    Other,
    NotApplicable,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Pisot => "Pisot",
            Self::Salem => "Salem",
            Self::Other => "Other",
            Self::NotApplicable => "NotApplicable",
        };
        f.write_str(s)
    }
}

/// Root-pattern classification of a characteristic polynomial. This is a
/// statement about the root pattern, not about the minimal polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub classification: Classification,
    pub eps_unit: f64,
    /// Roots within `10 * eps_unit` of the unit circle but farther than `eps_unit`.
    pub marginal_roots: Vec<Root>,
    pub label: &'static str,
}

pub const PATTERN_LABEL: &str = "pattern classification";

fn classify_roots(rs: &[Root], lambda: f64, eps: f64) -> ClassificationReport {
    let marginal_roots: Vec<Root> = rs
        .iter()
        .filter(|r| {
            let d = (r.modulus() - 1.0).abs();
            d > eps && d <= 10.0 * eps
        })
        .copied()
        .collect();
    let report = |classification| ClassificationReport {
        classification,
        eps_unit: eps,
        marginal_roots: marginal_roots.clone(),
        label: PATTERN_LABEL,
    };
    if lambda <= 1.0 + eps {
        return report(Classification::NotApplicable);
    }
    // Remove one copy of the root nearest lambda.
    let mut others: Vec<(Complex64, f64)> = rs
        .iter()
        .flat_map(|r| std::iter::repeat_n((r.value(), r.error_bound), r.multiplicity))
        .collect();
    let k = (0..others.len())
        .min_by(|&i, &j| {
            (others[i].0 - lambda)
                .norm()
                .total_cmp(&(others[j].0 - lambda).norm())
        })
        .expect("nonempty root list");
    others.remove(k);
    if others.iter().all(|(z, _)| z.norm() < 1.0 - eps) {
        return report(Classification::Pisot);
    }
    let all_closed = others.iter().all(|(z, _)| z.norm() <= 1.0 + eps);
    let on_circle = others.iter().any(|(z, _)| (z.norm() - 1.0).abs() <= eps);
    let inside: Vec<&(Complex64, f64)> = others.iter().filter(|(z, _)| z.norm() < 1.0 - eps).collect();
    let reciprocal = inside.len() == 1 && {
        let (z, eb) = inside[0];
        (z - lambda.recip()).norm() <= eps.max(*eb)
    };
    if all_closed && on_circle && reciprocal {
        report(Classification::Salem)
    } else {
        report(Classification::Other)
    }
}

/// Classify `lambda`, which must be a root of `p`.
pub fn classify_number(p: &IntPolynomial, lambda: f64, eps_unit: f64) -> Result<ClassificationReport> {
    let rs = roots(p)?;
    let (dist, eb) = rs
        .iter()
        .map(|r| ((r.value() - lambda).norm(), r.error_bound))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or(Error::NotARoot {
            lambda,
            distance: f64::INFINITY,
        })?;
    if dist > eb.max(1e-9 * lambda.abs().max(1.0)) {
        return Err(Error::NotARoot { lambda, distance: dist });
    }
    Ok(classify_roots(&rs, lambda, eps_unit))
}

// If `-rho` is the nearer root, classify `rho` as a root of `p(-x)`, whose
// roots are the negated roots of `p`.
fn classify_radius_roots(rs: &[Root], rho: f64, eps: f64) -> (ClassificationReport, f64) {
    let dist = |target: f64| {
        rs.iter()
            .map(|r| ((r.value() - target).norm(), r.error_bound))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap_or((f64::INFINITY, 0.0))
    };
    let (plus, minus) = (dist(rho), dist(-rho));
    if minus.0 < plus.0 {
        let negated: Vec<Root> = rs
            .iter()
            .map(|r| Root {
                re: -r.re,
                im: -r.im,
                ..*r
            })
            .collect();
        (classify_roots(&negated, rho, eps), minus.0.max(0.0) - minus.1)
    } else {
        (classify_roots(rs, rho, eps), plus.0.max(0.0) - plus.1)
    }
}

/// Classify the spectral radius `rho` of a matrix with characteristic
/// polynomial `p`. The dominant eigenvalue may be `rho` or `-rho`; in the
/// latter case `rho` is a root of `p(-x)` with the same conjugate moduli.
pub fn classify_radius(p: &IntPolynomial, rho: f64, eps_unit: f64) -> Result<ClassificationReport> {
    let rs = roots(p)?;
    let (report, excess) = classify_radius_roots(&rs, rho, eps_unit);
    if excess > 1e-9 * rho.abs().max(1.0) {
        return Err(Error::NotARoot {
            lambda: rho,
            distance: excess,
        });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub radius: f64,
    pub tolerance: f64,
    /// Certified upper bracket `||M^n||_1^(1/n)`.
    pub gelfand_upper: f64,
    pub gelfand_power: u32,
    /// Exact lower bracket `|trace(M)| / dim`.
    pub trace_lower: f64,
    pub char_poly: IntPolynomial,
    pub roots: Vec<Root>,
    pub classification: ClassificationReport,
}

fn gelfand_bracket(m: &ExactMatrix, max_log2: u32) -> (f64, u32) {
    let mut best = (big_ln_abs(&m.norm_one()), 1u32);
    let mut p = m.clone();
    let mut n = 1u32;
    for _ in 0..max_log2 {
        p = p.mul(&p).expect("square");
        n *= 2;
        let v = big_ln_abs(&p.norm_one()) / n as f64;
        if v < best.0 {
            best = (v, n);
        }
    }
    (best.0.exp(), best.1)
}

/// Spectral radius of an integer matrix with roots, brackets and
/// classification.
pub fn spectral_radius(m: &ExactMatrix, cfg: &Config) -> Result<SpectralReport> {
    let cp = char_poly(m);
    let rs = roots(&cp)?;
    let radius = rs.iter().map(Root::modulus).fold(0.0, f64::max);
    let eb = rs
        .iter()
        .filter(|r| r.modulus() >= radius - 1e-6 * radius.max(1.0))
        .map(|r| r.error_bound)
        .fold(0.0, f64::max);
    let tolerance = eb.max(cfg.spectral_tol * radius.max(1.0));
    let (gelfand_upper, gelfand_power) = gelfand_bracket(m, 6);
    if radius > gelfand_upper * (1.0 + 1e-12) + tolerance {
        return Err(Error::NoConvergence { bracket: gelfand_upper });
    }
    let trace_lower = if m.dim() == 0 {
        0.0
    } else {
        (big_ln_abs(&m.trace()) - (m.dim() as f64).ln()).exp()
    };
    let (classification, _) = classify_radius_roots(&rs, radius, cfg.eps_unit);
    Ok(SpectralReport {
        radius,
        tolerance,
        gelfand_upper,
        gelfand_power,
        trace_lower,
        char_poly: cp,
        roots: rs,
        classification,
    })
}

/// Spectral radius without the report.
pub fn rho(m: &ExactMatrix) -> Result<f64> {
    if m.dim() == 2 {
        return Ok(rho_two(m));
    }
    Ok(roots(&char_poly(m))?
        .iter()
        .map(Root::modulus)
        .fold(0.0, f64::max))
}

/// Closed form for 2x2 matrices from trace and determinant.
pub fn rho_two(m: &ExactMatrix) -> f64 {
    let t = big_to_f64(&m.trace());
    let d = big_to_f64(&det(m));
    let disc = t * t - 4.0 * d;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // Avoid cancellation in the smaller root; only the larger is needed.
        (t.abs() + s) / 2.0
    } else {
        d.abs().sqrt()
    }
}

/// `sqrt(rho(M M^T))`.
pub fn two_norm(m: &ExactMatrix) -> Result<f64> {
    Ok(rho(&m.mul(&m.transpose())?)?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows)
    }

    #[test]
    fn char_polys() {
        assert_eq!(char_poly(&ExactMatrix::identity(2)), IntPolynomial::from_i64(&[1, -2, 1]));
        assert_eq!(char_poly(&m(&[&[-3, -2], &[2, 1]])), IntPolynomial::from_i64(&[1, 2, 1]));
        assert_eq!(char_poly(&m(&[&[5, 2], &[2, 1]])), IntPolynomial::from_i64(&[1, -6, 1]));
        assert_eq!(char_poly(&ExactMatrix::zeros(0)), IntPolynomial::from_i64(&[1]));
        assert_eq!(IntPolynomial::from_i64(&[1, -6, 1]).to_string(), "x^2 - 6x + 1");
    }

    #[test]
    fn determinants() {
        assert_eq!(det(&m(&[&[5, 2], &[2, 1]])), BigInt::from(1));
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det(&m(&[&[1, 2], &[2, 4]])), BigInt::from(0));
        assert_eq!(
            det(&m(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]])),
            BigInt::from(4)
        );
    }

    #[test]
    fn square_free() {
        // (x - 1)^3 (x + 2)
        let p = IntPolynomial::from_i64(&[-1, 3, -3, 1])
            .mul(&IntPolynomial::from_i64(&[2, 1]));
        let f = p.square_free_factors();
        assert_eq!(f, vec![
            (IntPolynomial::from_i64(&[2, 1]), 1),
            (IntPolynomial::from_i64(&[-1, 1]), 3)
        ]);
        let rs = roots(&p).unwrap();
        assert_eq!(rs.len(), 2);
        assert!((rs[0].re + 2.0).abs() < 1e-14 && rs[0].multiplicity == 1);
        assert!((rs[1].re - 1.0).abs() < 1e-14 && rs[1].multiplicity == 3);
    }

    #[test]
    fn radii() {
        let cfg = Config::default();
        let r = spectral_radius(&m(&[&[5, 2], &[2, 1]]), &cfg).unwrap();
        assert!((r.radius - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-10);
        assert!(r.gelfand_upper >= r.radius);
        assert_eq!(r.classification.classification, Classification::Pisot);
        let r = spectral_radius(&ExactMatrix::identity(3), &cfg).unwrap();
        assert!((r.radius - 1.0).abs() < 1e-12);
        let n1 = m(&[&[1, -2], &[0, 1]]);
        assert!((two_norm(&n1).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((two_norm(&n1.abs().transpose()).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((two_norm(&ExactMatrix::identity(4)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classification_fixtures() {
        let lehmer4 = IntPolynomial::from_i64(&[1, -1, -1, -1, 1]);
        let rs = roots(&lehmer4).unwrap();
        let lam = rs[0].re;
        assert!((lam - 1.722_083_805_739_043).abs() < 1e-12);
        assert_eq!(
            classify_number(&lehmer4, lam, 1e-6).unwrap().classification,
            Classification::Salem
        );
        let p = IntPolynomial::from_i64(&[1, -6, 1]);
        assert_eq!(
            classify_number(&p, 3.0 + 8f64.sqrt(), 1e-6).unwrap().classification,
            Classification::Pisot
        );
        let p = IntPolynomial::from_i64(&[1, -2, 1]);
        assert_eq!(
            classify_number(&p, 1.0, 1e-6).unwrap().classification,
            Classification::NotApplicable
        );
        assert!(matches!(
            classify_number(&p, 2.0, 1e-6),
            Err(Error::NotARoot { .. })
        ));
        // x^3 - 3x - 1 has two roots outside the unit circle.
        let p = IntPolynomial::from_i64(&[-1, -3, 0, 1]);
        let lam = roots(&p).unwrap()[0].modulus();
        assert_eq!(
            classify_number(&p, lam, 1e-6).unwrap().classification,
            Classification::Other
        );
    }

    #[test]
    fn negative_dominant_root() {
        // x^3 + 17x^2 - 17x - 1 has dominant root -(9 + 4 sqrt 5); reflected,
        // it is (x + 1)(x^2 - 18x + 1).
        let p = IntPolynomial::from_i64(&[-1, -17, 17, 1]);
        let rho = 9.0 + 4.0 * 5f64.sqrt();
        let reflected = IntPolynomial::from_i64(&[1, -17, -17, 1]);
        assert_eq!(
            reflected,
            IntPolynomial::from_i64(&[1, 1]).mul(&IntPolynomial::from_i64(&[1, -18, 1]))
        );
        let direct = classify_number(&reflected, rho, 1e-6).unwrap().classification;
        assert_eq!(direct, Classification::Salem);
        assert_eq!(classify_radius(&p, rho, 1e-6).unwrap().classification, direct);
        assert!(matches!(classify_radius(&p, 5.0, 1e-6), Err(Error::NotARoot { .. })));
        let r = spectral_radius(&m(&[&[0, 1, 0], &[0, 0, 1], &[1, 17, -17]]), &Config::default()).unwrap();
        assert_eq!(r.classification.classification, Classification::Salem);
    }

    #[test]
    fn clusters_collapse_to_centroid() {
        // Companion matrix of (x + 1)^4, a single Jordan block.
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0, -4.0, -6.0, -4.0],
        );
        let raw = eigenvalues_direct(&m).unwrap();
        let merged = consolidate_clusters(&raw, 1e-2);
        for z in merged {
            assert!((z + 1.0).norm() < 1e-10, "{z}");
        }
        let apart = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        assert_eq!(consolidate_clusters(&apart, 1e-2), apart.to_vec());
    }

    #[test]
    fn multiset_matching() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        let b = [Complex64::new(2.0, 1e-9), Complex64::new(1.0, 0.0)];
        assert!(multiset_match(&a, &b, 1e-6).is_ok());
        let c = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(multiset_match(&a, &c, 1e-6).is_err());
    }

    fn small_matrix(dim: usize) -> impl Strategy<Value = ExactMatrix> {
        proptest::collection::vec(-4i64..=4, dim * dim).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(dim).map(|c| c.to_vec()).collect();
            ExactMatrix::from_rows(&rows)
        })
    }

    fn shifted(mat: &ExactMatrix, x: i64) -> ExactMatrix {
        let n = mat.dim();
        let mut out = ExactMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let v = if i == j { BigInt::from(x) } else { BigInt::zero() } - mat.get(i, j);
                out.set(i, j, v);
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn char_poly_matches_bareiss(mat in (1usize..=5).prop_flat_map(small_matrix)) {
            let cp = char_poly(&mat);
            prop_assert!(cp.is_monic());
            prop_assert_eq!(cp.degree(), mat.dim());
            for x in -3..=(mat.dim() as i64 + 3) {
                prop_assert_eq!(cp.eval(&BigInt::from(x)), det(&shifted(&mat, x)));
            }
        }

        #[test]
        fn root_product_is_determinant(mat in (1usize..=5).prop_flat_map(small_matrix)) {
            let ev = eigenvalues(&mat).unwrap();
            let prod: Complex64 = ev.iter().product();
            let d = big_to_f64(&det(&mat));
            prop_assert!((prod - d).norm() <= 1e-6 * d.abs().max(1.0), "{} vs {}", prod, d);
        }

        #[test]
        fn radius_brackets(mat in (1usize..=5).prop_flat_map(small_matrix)) {
            let r = spectral_radius(&mat, &Config::default()).unwrap();
            prop_assert!(r.radius <= big_to_f64(&mat.norm_one()) + r.tolerance);
            prop_assert!(r.radius + r.tolerance >= r.trace_lower * (1.0 - 1e-12));
            for k in 2..=4u32 {
                let rk = rho(&mat.pow(k)).unwrap();
                prop_assert!((rk - r.radius.powi(k as i32)).abs() <= 1e-6 * rk.max(1.0));
            }
        }
    }
}
