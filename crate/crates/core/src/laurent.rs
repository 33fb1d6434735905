//! Laurent polynomial matrices from lifting point-push automorphisms to the
//! infinite cyclic covers of the punctured disk.
//!
//! The cover is fixed by a weight functional on the loops `d_i`. Each image
//! word is scanned once, tracking the deck exponent; a positive letter `d_i`
//! contributes `+t^cur k_i` and then moves `cur` up by the weight of `d_i`, a
//! negative letter first moves down and then contributes `-t^cur k_i`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::exact::{big_to_f64, ExactMatrix};
use crate::freegroup::Automorphism;
use crate::protocol::{alpha_automorphism, ProtocolWord};
use crate::spectral;

/// Element of `Z[t, 1/t]`, exponent to nonzero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(exp: i64, coeff: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff.into());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn add_term(&mut self, exp: i64, coeff: BigInt) {
        let e = self.terms.entry(exp).or_default();
        *e += coeff;
        if e.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// Exact value at `t = 1` or `t = -1`.
    pub fn eval_sign(&self, sign: i64) -> Result<BigInt> {
        match sign {
            1 => Ok(self.terms.values().sum()),
            -1 => Ok(self
                .terms()
                .map(|(e, c)| if e.is_odd() { -c } else { c.clone() })
                .sum()),
            s => Err(Error::BadSign(s)),
        }
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.terms()
            .map(|(e, c)| z.powi(e as i32) * big_to_f64(c))
            .sum()
    }

    /// Coefficients in `Z[t]/(t^q - 1)`, index `m` holding `t^m`.
    pub fn fold(&self, q: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); q];
        for (e, c) in self.terms() {
            out[e.rem_euclid(q as i64) as usize] += c;
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms().rev().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if e == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            match e {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in self.terms() {
            seq.serialize_element(&(e, crate::exact::big_to_json(c)))?;
        }
        seq.end()
    }
}

/// Square matrix over `Z[t, 1/t]`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    dim: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![LaurentPoly::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = LaurentPoly::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &LaurentPoly {
        &self.entries[row * self.dim + col]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut LaurentPoly {
        &mut self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[LaurentPoly] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn mul(&self, rhs: &LaurentMatrix) -> Result<LaurentMatrix> {
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
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).add(&a.mul(b));
                        *out.get_mut(i, j) = v;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &LaurentMatrix) -> Result<LaurentMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    /// Exact integer matrix at `t = 1` or `t = -1`.
    pub fn eval_sign(&self, sign: i64) -> Result<ExactMatrix> {
        let rows = (0..self.dim)
            .map(|i| self.row(i).iter().map(|p| p.eval_sign(sign)).collect())
            .collect::<Result<Vec<Vec<BigInt>>>>()?;
        ExactMatrix::from_big_rows(rows)
    }

    pub fn eval_complex(&self, z: Complex64) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).eval_complex(z))
    }

    /// Fold exponents modulo `q`.
    pub fn mod_reduce(&self, q: usize) -> Result<CyclicMatrix> {
        if q == 0 {
            return Err(Error::InvalidRange("modulus q must be at least 1".into()));
        }
        Ok(CyclicMatrix {
            q,
            dim: self.dim,
            entries: self.entries.iter().map(|p| p.fold(q)).collect(),
        })
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let cells: Vec<String> = self.row(i).iter().map(|p| p.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for LaurentMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[LaurentPoly]> = (0..self.dim).map(|i| self.row(i)).collect();
        rows.serialize(s)
    }
}

/// Matrix over `Z[t]/(t^q - 1)`; entry `(i, j)` holds the `q` coefficients of
/// `t^0 .. t^(q-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicMatrix {
    q: usize,
    dim: usize,
    entries: Vec<Vec<BigInt>>,
}

impl CyclicMatrix {
    pub fn modulus(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &[BigInt] {
        &self.entries[row * self.dim + col]
    }

    /// Exact value at a `q`-th root of unity that is `+1`, or `-1` when `q` is
    /// even.
    pub fn eval_sign(&self, sign: i64) -> Result<ExactMatrix> {
        if sign == -1 && self.q % 2 == 1 {
            return Err(Error::BadSign(sign));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::BadSign(sign));
        }
        let rows = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        self.get(i, j)
                            .iter()
                            .enumerate()
                            .map(|(m, c)| if sign == -1 && m % 2 == 1 { -c } else { c.clone() })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        ExactMatrix::from_big_rows(rows)
    }

    /// Integer matrix of the deck-group-equivariant action on the chain basis
    /// `t^m k_i`, indexed `m * dim + i`.
    pub fn expand(&self) -> ExactMatrix {
        let n = self.dim;
        let q = self.q;
        let mut out = ExactMatrix::zeros(q * n);
        for m in 0..q {
            for i in 0..n {
                for j in 0..n {
                    for (e, c) in self.get(i, j).iter().enumerate() {
                        if !c.is_zero() {
                            let col = ((m + e) % q) * n + j;
                            out.set(m * n + i, col, c.clone());
                        }
                    }
                }
            }
        }
        out
    }
}

/// Expansion of `M mod (t^q - 1)` to an integer matrix of dimension `q * dim`.
pub fn expand_mod_q(m: &LaurentMatrix, q: usize) -> Result<ExactMatrix> {
    Ok(m.mod_reduce(q)?.expand())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cover {
    /// Every loop `d_i` has weight 1.
    Full,
    /// The outer loop `d(N+1)` has weight 0.
    Prime,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightFunctional {
    weights: Vec<i64>,
}

impl WeightFunctional {
    pub fn new(weights: Vec<i64>) -> Self {
        Self { weights }
    }

    /// Weights on `d1..d(N+1)` for the given cover.
    pub fn for_cover(cover: Cover, n_obstacles: usize) -> Self {
        let mut weights = vec![1; n_obstacles + 1];
        if cover == Cover::Prime {
            weights[n_obstacles] = 0;
        }
        Self { weights }
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Weight of generator `index` (1-based).
    pub fn weight(&self, index: usize) -> i64 {
        self.weights[index - 1]
    }
}

/// Lift an automorphism acting trivially on homology to the cover.
///
/// Row `j` is the lifted one-chain of the image of `d_j`.
pub fn lift_automorphism(a: &Automorphism, iota: &WeightFunctional) -> Result<LaurentMatrix> {
    let n = a.rank();
    if iota.weights.len() != n {
        return Err(Error::RankMismatch {
            expected: n,
            found: iota.weights.len(),
        });
    }
    let mut out = LaurentMatrix::zeros(n);
    for j in 1..=n {
        let img = a.image(j);
        let counts = img.signed_counts();
        if counts
            .iter()
            .enumerate()
            .any(|(i, &c)| c != i64::from(i + 1 == j))
        {
            return Err(Error::HomologyNotFixed { generator: j });
        }
        let mut cur = 0i64;
        for l in img.letters() {
            let i = l.index();
            if l.is_positive() {
                out.get_mut(j - 1, i - 1).add_term(cur, BigInt::one());
                cur += iota.weight(i);
            } else {
                cur -= iota.weight(i);
                out.get_mut(j - 1, i - 1).add_term(cur, -BigInt::one());
            }
        }
        debug_assert_eq!(cur, iota.weight(j), "terminal exponent");
    }
    Ok(out)
}

/// Terminal exponent of the scan of each image word; equals the weight of the
/// source generator for automorphisms that fix homology.
pub fn terminal_exponents(a: &Automorphism, iota: &WeightFunctional) -> Vec<i64> {
    a.images()
        .iter()
        .map(|w| {
            w.letters()
                .iter()
                .map(|l| l.sign() * iota.weight(l.index()))
                .sum()
        })
        .collect()
}

/// Lifts of `a_j^{+1}` and `a_j^{-1}` for every `j`.
pub struct GeneratorLifts {
    n_obstacles: usize,
    lifts: Vec<[LaurentMatrix; 2]>,
}

impl GeneratorLifts {
    pub fn new(n_obstacles: usize, cover: Cover) -> Result<Self> {
        let iota = WeightFunctional::for_cover(cover, n_obstacles);
        let lifts = (1..=n_obstacles)
            .map(|j| {
                Ok([
                    lift_automorphism(&alpha_automorphism(j, 1, n_obstacles)?, &iota)?,
                    lift_automorphism(&alpha_automorphism(j, -1, n_obstacles)?, &iota)?,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n_obstacles, lifts })
    }

    pub fn get(&self, j: usize, sign: i64) -> &LaurentMatrix {
        &self.lifts[j - 1][usize::from(sign < 0)]
    }

    pub fn phi(&self, p: &ProtocolWord) -> Result<LaurentMatrix> {
        if p.n_obstacles() != self.n_obstacles {
            return Err(Error::RankMismatch {
                expected: self.n_obstacles,
                found: p.n_obstacles(),
            });
        }
        p.letters()
            .iter()
            .try_fold(LaurentMatrix::identity(self.n_obstacles + 1), |acc, l| {
                acc.mul(self.get(l.index(), l.sign()))
            })
    }
}

/// `Phi(p)` for the full cover, `Phi'(p)` for the prime cover.
pub fn phi(p: &ProtocolWord, cover: Cover) -> LaurentMatrix {
    GeneratorLifts::new(p.n_obstacles(), cover)
        .and_then(|g| g.phi(p))
        .expect("generator lifts are well formed")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitySample {
    pub p: usize,
    pub q: usize,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnityScan {
    pub cover: Cover,
    pub q_max: usize,
    pub best: UnitySample,
    pub samples: Vec<UnitySample>,
}

/// Largest spectral radius of `Phi(p)` over `t = exp(2 pi i p/q)`, `q <= q_max`,
/// `gcd(p, q) = 1`. The cases `t = 1` and `t = -1` are evaluated exactly.
pub fn unity_scan(p: &ProtocolWord, cover: Cover, q_max: usize, cfg: &Config) -> Result<UnityScan> {
    if q_max == 0 {
        return Err(Error::InvalidRange("q_max must be at least 1".into()));
    }
    let m = phi(p, cover);
    let mut samples = Vec::new();
    for q in 1..=q_max {
        for pp in 0..q {
            if pp.gcd(&q) != 1 {
                continue;
            }
            let radius = match (pp, q) {
                (0, 1) => spectral::spectral_radius(&m.eval_sign(1)?, cfg)?.radius,
                (1, 2) => spectral::spectral_radius(&m.eval_sign(-1)?, cfg)?.radius,
                _ => {
                    let z = Complex64::from_polar(1.0, 2.0 * PI * pp as f64 / q as f64);
                    spectral::complex_spectral_radius(&m.eval_complex(z))?
                }
            };
            samples.push(UnitySample { p: pp, q, radius });
        }
    }
    let best = samples
        .iter()
        .fold(None::<&UnitySample>, |b, s| match b {
            Some(b) if b.radius >= s.radius => Some(b),
            _ => Some(s),
        })
        .cloned()
        .expect("q = 1 always sampled");
    Ok(UnityScan {
        cover,
        q_max,
        best,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{hsp, protocol_automorphism};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    fn row_at(m: &ExactMatrix, r: usize) -> Vec<i64> {
        m.row(r).iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    #[test]
    fn arithmetic() {
        let a = lp(&[(0, 1), (-1, -1)]);
        assert_eq!(a.eval_sign(-1).unwrap(), BigInt::from(2));
        assert_eq!(lp(&[(-3, 1), (-4, -1)]).eval_sign(1).unwrap(), BigInt::zero());
        let b = lp(&[(0, 1), (-1, 1)]);
        assert_eq!(a.mul(&b), lp(&[(0, 1), (-2, -1)]));
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.to_string(), "1 - t^-1");
        assert_eq!(a.fold(2), vec![BigInt::from(1), BigInt::from(-1)]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[[-1,-1],[0,1]]");
        let z = Complex64::new(0.0, 1.0);
        assert!((a.eval_complex(z) - Complex64::new(1.0, 1.0)).norm() < 1e-15);
        assert!(a.eval_sign(2).is_err());
    }

    #[test]
    fn alpha_three_full_cover() {
        let a = alpha_automorphism(3, 1, 4).unwrap();
        let m = lift_automorphism(&a, &WeightFunctional::for_cover(Cover::Full, 4)).unwrap();
        let r = m.row(2);
        assert_eq!(r[2], lp(&[(-4, 1)]));
        assert_eq!(r[1], lp(&[(0, 1), (-1, -1)]));
        assert_eq!(r[0], lp(&[(-1, 1), (-2, -1)]));
        assert_eq!(r[4], lp(&[(-2, 1), (-3, -1)]));
        assert_eq!(r[3], lp(&[(-3, 1), (-4, -1)]));
        for i in [0, 1, 3, 4] {
            for j in 0..5 {
                assert_eq!(m.get(i, j).is_one(), i == j);
                assert!(i == j || m.get(i, j).is_zero());
            }
        }
        assert_eq!(m, phi(&ProtocolWord::parse("a3", 4).unwrap(), Cover::Full));
    }

    #[test]
    fn alpha_three_prime_cover() {
        let a = alpha_automorphism(3, 1, 4).unwrap();
        let m = lift_automorphism(&a, &WeightFunctional::for_cover(Cover::Prime, 4)).unwrap();
        let r = m.row(2);
        assert_eq!(r[1], lp(&[(0, 1), (-1, -1)]));
        assert_eq!(r[0], lp(&[(-1, 1), (-2, -1)]));
        assert_eq!(r[4], lp(&[(-1, 1), (-2, -1)]));
        assert_eq!(r[3], lp(&[(-2, 1), (-3, -1)]));
        assert_eq!(r[2], lp(&[(-3, 1)]));
    }

    #[test]
    fn double_cover_rows() {
        let p = ProtocolWord::parse("a3", 4).unwrap();
        let full = phi(&p, Cover::Full).mod_reduce(2).unwrap().eval_sign(-1).unwrap();
        assert_eq!(row_at(&full, 2), vec![-2, 2, 1, -2, 2]);
        let prime = phi(&p, Cover::Prime).mod_reduce(2).unwrap().eval_sign(-1).unwrap();
        assert_eq!(row_at(&prime, 2), vec![-2, 2, -1, 2, -2]);
        assert_eq!(full, phi(&p, Cover::Full).eval_sign(-1).unwrap());
        let id = LaurentMatrix::identity(3);
        assert!(id.mod_reduce(5).unwrap().expand().is_identity());
        assert_eq!(id.mod_reduce(2).unwrap().expand(), ExactMatrix::identity(6));
        assert!(id.mod_reduce(0).is_err());
    }

    #[test]
    fn expand_q_one_is_evaluation_at_one() {
        let p = ProtocolWord::parse("a1 a2^-1 a3", 3).unwrap();
        let m = phi(&p, Cover::Full);
        assert_eq!(expand_mod_q(&m, 1).unwrap(), m.eval_sign(1).unwrap());
    }

    #[test]
    fn identity_lifts() {
        for cover in [Cover::Full, Cover::Prime] {
            let iota = WeightFunctional::for_cover(cover, 3);
            assert!(lift_automorphism(&Automorphism::identity(4), &iota).unwrap().is_identity());
            assert!(phi(&ProtocolWord::parse("a1 a1^-1", 3).unwrap(), cover).is_identity());
            assert!(phi(&ProtocolWord::empty(3).unwrap(), cover).is_identity());
        }
    }

    #[test]
    fn homology_precondition() {
        use crate::freegroup::FreeWord;
        let swap = Automorphism::from_images(vec![
            FreeWord::generator(2, 2).unwrap(),
            FreeWord::generator(2, 1).unwrap(),
        ])
        .unwrap();
        let iota = WeightFunctional::new(vec![1, 1]);
        assert_eq!(
            lift_automorphism(&swap, &iota),
            Err(Error::HomologyNotFixed { generator: 1 })
        );
        assert!(matches!(
            lift_automorphism(&Automorphism::identity(3), &iota),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn hsp_at_one_is_identity() {
        for n in 2..=6 {
            let m = phi(&hsp(n).unwrap(), Cover::Full);
            assert!(m.eval_sign(1).unwrap().is_identity());
        }
    }

    #[test]
    fn unity_scans() {
        let cfg = Config::default();
        let s = unity_scan(&ProtocolWord::parse("a1 a2^-1", 2).unwrap(), Cover::Full, 2, &cfg).unwrap();
        assert_eq!((s.best.p, s.best.q), (1, 2));
        assert!((s.best.radius - (3.0 + 8f64.sqrt())).abs() < 1e-9);
        let s = unity_scan(&hsp(2).unwrap(), Cover::Full, 2, &cfg).unwrap();
        assert!(s.best.radius >= 1.0 - 1e-9);
        let s = unity_scan(&ProtocolWord::empty(3).unwrap(), Cover::Full, 6, &cfg).unwrap();
        assert!(s.samples.iter().all(|x| (x.radius - 1.0).abs() < 1e-9));
        assert_eq!(s.samples.len(), 1 + 1 + 2 + 2 + 4 + 2);
    }

    #[test]
    fn lift_of_composite_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            for cover in [Cover::Full, Cover::Prime] {
                let iota = WeightFunctional::for_cover(cover, n);
                for _ in 0..5 {
                    let p = ProtocolWord::random(n, 4, &mut rng).unwrap();
                    let a = protocol_automorphism(&p);
                    assert_eq!(terminal_exponents(&a, &iota), iota.weights().to_vec());
                    assert_eq!(lift_automorphism(&a, &iota).unwrap(), phi(&p, cover));
                }
            }
        }
    }

    fn word(n: usize) -> impl Strategy<Value = ProtocolWord> {
        proptest::collection::vec((1..=n, prop_oneof![Just(1i64), Just(-1i64)]), 0..10)
            .prop_map(move |ls| ProtocolWord::new(n, ls).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn phi_is_a_homomorphism((u, v) in (2usize..=6).prop_flat_map(|n| (word(n), word(n)))) {
            for cover in [Cover::Full, Cover::Prime] {
                let lhs = phi(&u.concat(&v).unwrap(), cover);
                let rhs = phi(&u, cover).mul(&phi(&v, cover)).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn trivial_at_one_unimodular_at_minus_one(p in (2usize..=6).prop_flat_map(word)) {
            for cover in [Cover::Full, Cover::Prime] {
                let m = phi(&p, cover);
                prop_assert!(m.eval_sign(1).unwrap().is_identity());
                let d = spectral::det(&m.eval_sign(-1).unwrap());
                prop_assert!(d == BigInt::one() || d == -BigInt::one());
            }
        }

        #[test]
        fn double_cover_radius(p in (3usize..=4).prop_flat_map(word)) {
            let m = phi(&p, Cover::Full);
            let big = spectral::rho(&expand_mod_q(&m, 2).unwrap()).unwrap();
            let minus = spectral::rho(&m.eval_sign(-1).unwrap()).unwrap();
            prop_assert!((big - minus.max(1.0)).abs() <= 1e-8 * big.max(1.0));
        }
    }
}
