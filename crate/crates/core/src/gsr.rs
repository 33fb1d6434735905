//! Generalized spectral radius of finite matrix sets.
//!
//! `rho_k` is the largest `rho(P)^(1/k)` over ordered products `P` of `k`
//! matrices from the set. For the incidence matrices `A(1)..A(N)` the sorted
//! column-sum dynamics `W_j` identify the maximizing products.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{big_ln_abs, ExactMatrix};
use crate::matrix_rep::{gen_a, gen_e, gen_e_inverse, hhat_matrix};
use crate::spectral;

/// Relative tolerance for two products to count as tied.
pub const TIE_TOL: f64 = 1e-9;
/// Relative slack used when pruning on norm bounds; larger than `TIE_TOL` so
/// near-maximal products are never discarded.
const PRUNE_SLACK: f64 = 1e-6;

fn check_set(matrices: &[ExactMatrix], k: usize, budget: u128) -> Result<usize> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::InvalidRange("matrix set is empty".into()))?;
    if k == 0 {
        return Err(Error::InvalidRange("product length k must be at least 1".into()));
    }
    let dim = first.dim();
    if let Some(m) = matrices.iter().find(|m| m.dim() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: m.dim(),
        });
    }
    let total = u32::try_from(k)
        .ok()
        .and_then(|k| (matrices.len() as u128).checked_pow(k))
        .unwrap_or(u128::MAX);
    if total > budget {
        return Err(Error::BudgetExceeded {
            requested: total,
            budget,
        });
    }
    Ok(dim)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForceReport {
    pub k: usize,
    /// `max rho(P)^(1/k)`.
    pub value: f64,
    /// Achieving index tuples (1-based), lexicographically sorted.
    pub achieving: Vec<Vec<usize>>,
    pub total_products: u128,
    pub evaluated: u64,
    pub pruned_prefixes: u64,
}

struct Search<'a> {
    mats: &'a [ExactMatrix],
    k: usize,
    ln_max_norm: f64,
    best_bits: &'a AtomicU64,
}

impl Search<'_> {
    fn best(&self) -> f64 {
        f64::from_bits(self.best_bits.load(Ordering::Relaxed))
    }

    fn dfs(
        &self,
        prefix: &mut Vec<usize>,
        prod: &ExactMatrix,
        out: &mut Vec<(Vec<usize>, f64)>,
        stats: &mut (u64, u64),
    ) -> Result<()> {
        if prefix.len() == self.k {
            let v = spectral::rho(prod)?.powf(1.0 / self.k as f64);
            stats.0 += 1;
            self.best_bits.fetch_max(v.to_bits(), Ordering::Relaxed);
            if v >= self.best() * (1.0 - PRUNE_SLACK) {
                out.push((prefix.clone(), v));
            }
            return Ok(());
        }
        let remaining = (self.k - prefix.len()) as f64;
        let bound = (big_ln_abs(&prod.norm_one()) + remaining * self.ln_max_norm) / self.k as f64;
        let best = self.best();
        if best > 0.0 && bound.exp() < best * (1.0 - PRUNE_SLACK) {
            stats.1 += 1;
            return Ok(());
        }
        for (i, m) in self.mats.iter().enumerate() {
            prefix.push(i);
            let next = prod.mul(m)?;
            self.dfs(prefix, &next, out, stats)?;
            prefix.pop();
        }
        Ok(())
    }
}

/// Candidates `(order, rho)` and `(evaluated, pruned)` counts for one first letter.
type Branch = (Vec<(Vec<usize>, f64)>, (u64, u64));

/// Exhaustive `rho_k` with norm pruning. Results are independent of thread
/// scheduling.
pub fn rho_k_bruteforce(matrices: &[ExactMatrix], k: usize, budget: u128) -> Result<BruteForceReport> {
    let dim = check_set(matrices, k, budget)?;
    let total = (matrices.len() as u128).pow(k as u32);
    let ln_max_norm = matrices
        .iter()
        .map(|m| big_ln_abs(&m.norm_one()))
        .fold(f64::NEG_INFINITY, f64::max);
    let best_bits = AtomicU64::new(0f64.to_bits());
    let search = Search {
        mats: matrices,
        k,
        ln_max_norm,
        best_bits: &best_bits,
    };
    let branches: Vec<Result<Branch>> = (0..matrices.len())
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            let mut stats = (0, 0);
            let mut prefix = vec![i];
            let start = ExactMatrix::identity(dim).mul(&matrices[i])?;
            search.dfs(&mut prefix, &start, &mut out, &mut stats)?;
            Ok((out, stats))
        })
        .collect();
    let mut cands = Vec::new();
    let (mut evaluated, mut pruned) = (0, 0);
    for b in branches {
        let (c, (e, p)) = b?;
        cands.extend(c);
        evaluated += e;
        pruned += p;
    }
    let value = cands.iter().map(|c| c.1).fold(0.0, f64::max);
    let mut achieving: Vec<Vec<usize>> = cands
        .into_iter()
        .filter(|(_, v)| *v >= value - TIE_TOL * value.max(1.0))
        .map(|(t, _)| t.into_iter().map(|i| i + 1).collect())
        .collect();
    achieving.sort();
    Ok(BruteForceReport {
        k,
        value,
        achieving,
        total_products: total,
        evaluated,
        pruned_prefixes: pruned,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GsrEstimate {
    pub rho_k: Vec<f64>,
    pub reports: Vec<BruteForceReport>,
    pub sup: f64,
    pub sup_k: usize,
    /// `min(max ||M||_1, max ||M||_inf)`.
    pub ceiling: f64,
    pub ceiling_norm: &'static str,
    pub multiplicativity_ok: bool,
    pub ceiling_ok: bool,
}

/// `rho_1 .. rho_K`, their supremum, and the norm ceiling.
pub fn gsr_estimate(matrices: &[ExactMatrix], max_k: usize, budget: u128) -> Result<GsrEstimate> {
    if max_k == 0 {
        return Err(Error::InvalidRange("K must be at least 1".into()));
    }
    let reports = (1..=max_k)
        .map(|k| rho_k_bruteforce(matrices, k, budget))
        .collect::<Result<Vec<_>>>()?;
    let rho_k: Vec<f64> = reports.iter().map(|r| r.value).collect();
    let (sup_k, sup) = rho_k
        .iter()
        .enumerate()
        .fold((1, f64::NEG_INFINITY), |(bk, bv), (i, &v)| {
            if v > bv * (1.0 + TIE_TOL) {
                (i + 1, v)
            } else {
                (bk, bv)
            }
        });
    let max_of = |f: fn(&ExactMatrix) -> BigInt| {
        matrices
            .iter()
            .map(|m| f(m).to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    };
    let n1 = max_of(ExactMatrix::norm_one);
    let ninf = max_of(ExactMatrix::norm_inf);
    let (ceiling, ceiling_norm) = if n1 <= ninf { (n1, "1") } else { (ninf, "inf") };
    let mut multiplicativity_ok = true;
    for k in 1..=max_k {
        for nk in (2 * k..=max_k).step_by(k) {
            if rho_k[nk - 1] < rho_k[k - 1] * (1.0 - TIE_TOL) {
                multiplicativity_ok = false;
            }
        }
    }
    let ceiling_ok = rho_k.iter().all(|&v| v <= ceiling * (1.0 + TIE_TOL));
    Ok(GsrEstimate {
        rho_k,
        reports,
        sup,
        sup_k,
        ceiling,
        ceiling_norm,
        multiplicativity_ok,
        ceiling_ok,
    })
}

/// The reduced incidence matrices `A(1)..A(N)`.
pub fn incidence_set(n: usize) -> Result<Vec<ExactMatrix>> {
    (1..=n).map(|k| gen_a(k, n)).collect()
}

/// Nonincreasing vector of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedVector {
    entries: Vec<BigUint>,
}

impl Serialize for OrderedVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<serde_json::Number> = self
            .entries
            .iter()
            .map(|x| crate::exact::big_to_json(&BigInt::from(x.clone())))
            .collect();
        v.serialize(s)
    }
}

impl OrderedVector {
    pub fn new(entries: Vec<BigUint>) -> Result<Self> {
        if entries.iter().any(Zero::is_zero) {
            return Err(Error::NonPositiveEntry);
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidRange("entries must be nonincreasing".into()));
        }
        Ok(Self { entries })
    }

    pub fn from_u64(entries: &[u64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| BigUint::from(x)).collect())
    }

    pub fn ones(n: usize) -> Self {
        Self {
            entries: vec![BigUint::from(1u32); n],
        }
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Componentwise `>=`.
    pub fn dominates(&self, other: &Self) -> bool {
        self.len() == other.len() && self.entries.iter().zip(&other.entries).all(|(a, b)| a >= b)
    }

    /// Componentwise `>=` and not equal.
    pub fn strictly_dominates(&self, other: &Self) -> bool {
        self.dominates(other) && self != other
    }
}

/// Sort positive integers into nonincreasing order.
pub fn sort_vec(v: &[BigUint]) -> Result<OrderedVector> {
    let mut e = v.to_vec();
    e.sort_by(|a, b| b.cmp(a));
    OrderedVector::new(e)
}

/// `v A(j)` for an arbitrary positive vector, without sorting.
pub fn mul_incidence(v: &[BigUint], j: usize) -> Vec<BigUint> {
    let twice = &v[j - 1] * 2u32;
    v.iter()
        .enumerate()
        .map(|(m, x)| if m == j - 1 { x.clone() } else { x + &twice })
        .collect()
}

/// `W_j(a)`: `a A(j)`, sorted.
pub fn w_apply(j: usize, a: &OrderedVector) -> Result<OrderedVector> {
    if j == 0 || j > a.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            rank: a.len(),
        });
    }
    sort_vec(&mul_incidence(&a.entries, j))
}

/// Index sequence driving the `W_j` dynamics.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Strategy {
    indices: Vec<usize>,
}

impl Strategy {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&s| s == 0 || s > n) {
            return Err(Error::IndexOutOfRange { index: bad, rank: n });
        }
        Ok(Self { indices })
    }

    /// `(1, 1, ..., 1)` of length `k`.
    pub fn ones(k: usize) -> Self {
        Self {
            indices: vec![1; k],
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn apply(&self, a: &OrderedVector) -> Result<OrderedVector> {
        self.indices.iter().try_fold(a.clone(), |v, &j| w_apply(j, &v))
    }
}

/// Replace each step by the smallest index holding the same value.
pub fn standardize(s: &Strategy, a: &OrderedVector) -> Result<Strategy> {
    let mut b = a.clone();
    let mut out = Vec::with_capacity(s.len());
    for &j in s.indices() {
        if j == 0 || j > b.len() {
            return Err(Error::IndexOutOfRange { index: j, rank: b.len() });
        }
        let v = &b.entries[j - 1];
        let jm = b.entries.iter().position(|x| x == v).expect("value present") + 1;
        out.push(jm);
        b = w_apply(jm, &b)?;
    }
    Ok(Strategy { indices: out })
}

pub fn is_standard(s: &Strategy, a: &OrderedVector) -> Result<bool> {
    Ok(standardize(s, a)? == *s)
}

/// A strategy `s` with `sort(a A(l1) ... A(lk)) = W_s(a)`, built step by step
/// from the position of the multiplied entry in the sorted running vector.
pub fn strategy_for_tuple(ell: &[usize], a: &OrderedVector) -> Result<Strategy> {
    let n = a.len();
    let mut d = a.entries.clone();
    let mut s = Vec::with_capacity(ell.len());
    for &l in ell {
        if l == 0 || l > n {
            return Err(Error::IndexOutOfRange { index: l, rank: n });
        }
        let sorted = sort_vec(&d)?;
        let jp = sorted.entries.iter().position(|x| *x == d[l - 1]).expect("value present") + 1;
        s.push(jp);
        d = mul_incidence(&d, l);
    }
    Ok(Strategy { indices: s })
}

/// `a A(l1) ... A(lk)` computed with the integer matrices.
pub fn row_times_product(a: &OrderedVector, ell: &[usize]) -> Result<Vec<BigUint>> {
    let n = a.len();
    let mut v: Vec<BigInt> = a.entries.iter().map(|x| BigInt::from(x.clone())).collect();
    for &l in ell {
        v = gen_a(l, n)?.left_mul_vec(&v);
    }
    v.into_iter()
        .map(|x| x.to_biguint().ok_or(Error::NonPositiveEntry))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaTrialReport {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl LemmaTrialReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }
}

struct Trials {
    report: LemmaTrialReport,
}

impl Trials {
    fn new(name: &'static str) -> Self {
        Self {
            report: LemmaTrialReport {
                name,
                trials: 0,
                failures: 0,
                first_failure: None,
            },
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.report.trials += 1;
        if !ok {
            self.report.failures += 1;
            if self.report.first_failure.is_none() {
                self.report.first_failure = Some(detail());
            }
        }
    }
}

fn random_ordered<R: Rng>(rng: &mut R, n: usize, max: u64) -> OrderedVector {
    let v: Vec<BigUint> = (0..n).map(|_| BigUint::from(rng.random_range(1..=max))).collect();
    sort_vec(&v).expect("positive")
}

/// An ordered vector below `a` componentwise and different from it; `None`
/// when `a` is all ones.
fn random_below<R: Rng>(rng: &mut R, a: &OrderedVector) -> Option<OrderedVector> {
    let one = BigUint::from(1u32);
    if a.entries.iter().all(|x| *x == one) {
        return None;
    }
    loop {
        let v: Vec<BigUint> = a
            .entries
            .iter()
            .map(|x| BigUint::from(rng.random_range(1..=x.to_u64().expect("small"))))
            .collect();
        let b = sort_vec(&v).expect("positive");
        if b != *a {
            return Some(b);
        }
    }
}

fn random_strategy<R: Rng>(rng: &mut R, n: usize, k: usize) -> Strategy {
    Strategy {
        indices: (0..k).map(|_| rng.random_range(1..=n)).collect(),
    }
}

fn fmt_v(v: &OrderedVector) -> String {
    let e: Vec<String> = v.entries.iter().map(|x| x.to_string()).collect();
    format!("({})", e.join(","))
}

/// Randomized checks of the `W_j` comparison rules and the strategy facts.
/// Each check runs `trials` times on vectors of length `3..=8`.
pub fn run_lemma_trials(trials: usize, seed: u64) -> Vec<LemmaTrialReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rel = [
        Trials::new("rel_a"),
        Trials::new("rel_b"),
        Trials::new("rel_c"),
        Trials::new("rel_d"),
        Trials::new("rel_e"),
    ];
    let mut ord = [
        Trials::new("order_a"),
        Trials::new("order_b"),
        Trials::new("order_c"),
        Trials::new("order_d"),
    ];
    let w = |j: usize, a: &OrderedVector| w_apply(j, a).expect("index in range");

    while rel[0].report.trials < trials {
        let n = rng.random_range(3..=8);
        let a = random_ordered(&mut rng, n, 30);
        let j = rng.random_range(1..=n);
        let b = random_below(&mut rng, &a).unwrap_or_else(|| a.clone());
        rel[0].record(w(j, &a).dominates(&w(j, &b)), || format!("a={} b={} j={j}", fmt_v(&a), fmt_v(&b)));
    }
    while rel[1].report.trials < trials {
        let n = rng.random_range(3..=8);
        let a = random_ordered(&mut rng, n, 30);
        let Some(b) = random_below(&mut rng, &a) else { continue };
        let j = rng.random_range(1..=n);
        rel[1].record(w(j, &a).strictly_dominates(&w(j, &b)), || {
            format!("a={} b={} j={j}", fmt_v(&a), fmt_v(&b))
        });
    }
    while rel[2].report.trials < trials {
        let n = rng.random_range(3..=8);
        let mut e: Vec<BigUint> = (0..n).map(|_| BigUint::from(rng.random_range(1..=30u64))).collect();
        let i = rng.random_range(1..n);
        e[i] = e[0].clone();
        let a = sort_vec(&e).expect("positive");
        let pos: Vec<usize> = (1..=n).filter(|&p| a.entries[p - 1] == e[0]).collect();
        let x = rng.random_range(0..pos.len() - 1);
        let y = rng.random_range(x + 1..pos.len());
        let (j, k) = (pos[x], pos[y]);
        rel[2].record(w(j, &a) == w(k, &a), || format!("a={} j={j} k={k}", fmt_v(&a)));
    }
    while rel[3].report.trials < trials {
        let n = rng.random_range(3..=8);
        let a = random_ordered(&mut rng, n, 30);
        let j = rng.random_range(1..n);
        let k = rng.random_range(j + 1..=n);
        if a.entries[j - 1] == a.entries[k - 1] {
            continue;
        }
        rel[3].record(w(j, &a).strictly_dominates(&w(k, &a)), || {
            format!("a={} j={j} k={k}", fmt_v(&a))
        });
    }
    while rel[4].report.trials < trials {
        let n = rng.random_range(3..=8);
        let a = random_ordered(&mut rng, n, 30);
        let Some(b) = random_below(&mut rng, &a) else { continue };
        let j = rng.random_range(1..=n);
        let k = rng.random_range(j..=n);
        rel[4].record(w(j, &a).strictly_dominates(&w(k, &b)), || {
            format!("a={} b={} j={j} k={k}", fmt_v(&a), fmt_v(&b))
        });
    }

    while ord[0].report.trials < trials {
        let n = rng.random_range(3..=8);
        let a = random_ordered(&mut rng, n, 30);
        let k = rng.random_range(1..=8);
        let s = standardize(&random_strategy(&mut rng, n, k), &a).expect("in range");
        if s == Strategy::ones(k) {
            continue;
        }
        let best = Strategy::ones(k).apply(&a).expect("in range");
        let got = s.apply(&a).expect("in range");
        ord[0].record(best.strictly_dominates(&got), || {
            format!("a={} s={:?}", fmt_v(&a), s.indices())
        });
    }
    while ord[1].report.trials < trials {
        let n = rng.random_range(3..=8);
        let a = random_ordered(&mut rng, n, 30);
        let k = rng.random_range(1..=8);
        let s = random_strategy(&mut rng, n, k);
        let best = Strategy::ones(k).apply(&a).expect("in range");
        let got = s.apply(&a).expect("in range");
        let std_ok = standardize(&s, &a).and_then(|t| t.apply(&a)).is_ok_and(|v| v == got);
        ord[1].record(best.dominates(&got) && std_ok, || {
            format!("a={} s={:?}", fmt_v(&a), s.indices())
        });
    }
    while ord[2].report.trials < trials {
        let n = rng.random_range(3..=8);
        let a = random_ordered(&mut rng, n, 30);
        let k = rng.random_range(1..=8);
        let ell: Vec<usize> = (0..k).map(|_| rng.random_range(1..=n)).collect();
        let s = strategy_for_tuple(&ell, &a).expect("in range");
        let lhs = row_times_product(&a, &ell).and_then(|v| sort_vec(&v)).expect("positive");
        let rhs = s.apply(&a).expect("in range");
        ord[2].record(lhs == rhs, || format!("a={} ell={ell:?}", fmt_v(&a)));
    }
    while ord[3].report.trials < trials {
        let n = rng.random_range(3..=8);
        let k = rng.random_range(1..=n);
        let a = OrderedVector::ones(n);
        let mut ell: Vec<usize> = (1..=k).collect();
        if k == n {
            let shift = rng.random_range(0..n);
            ell.rotate_left(shift);
        }
        let lhs = row_times_product(&a, &ell).and_then(|v| sort_vec(&v)).expect("positive");
        let rhs = Strategy::ones(k).apply(&a).expect("in range");
        ord[3].record(lhs == rhs, || format!("n={n} ell={ell:?}"));
    }

    rel.into_iter().chain(ord).map(|t| t.report).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GsrRealizedReport {
    pub n: usize,
    pub brute_force: BruteForceReport,
    /// `rho(Hhat(N))^(1/N)` from the exact characteristic polynomial.
    pub hhat_value: f64,
    pub difference: f64,
    pub cyclic_shifts_attain: bool,
    pub norm_dominance_samples: usize,
    pub norm_dominance_ok: bool,
}

impl GsrRealizedReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.difference <= tol && self.cyclic_shifts_attain && self.norm_dominance_ok
    }
}

/// `Hhat(N)^m A(1) ... A(j)` with `k = m N + j`.
pub fn best_product(k: usize, n: usize) -> Result<ExactMatrix> {
    let hh = hhat_matrix(n)?;
    let a = incidence_set(n)?;
    let head = hh.pow((k / n) as u32);
    ExactMatrix::product(n, std::iter::once(&head).chain(a.iter().take(k % n)))
}

/// Exhaustive check that `Hhat(N)` realizes the generalized spectral radius of
/// `{A(1), .., A(N)}`, with random one-norm dominance samples.
pub fn verify_gsr_realized(n: usize, budget: u128, seed: u64) -> Result<GsrRealizedReport> {
    let set = incidence_set(n)?;
    let brute_force = rho_k_bruteforce(&set, n, budget)?;
    let hhat_value = spectral::rho(&hhat_matrix(n)?)?.powf(1.0 / n as f64);
    let difference = (brute_force.value - hhat_value).abs();
    let cyclic_shifts_attain = (0..n).all(|s| {
        let mut t: Vec<usize> = (1..=n).collect();
        t.rotate_left(s);
        brute_force.achieving.contains(&t)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = 50;
    let mut norm_dominance_ok = true;
    for _ in 0..samples {
        let k = rng.random_range(1..=2 * n);
        let mut idx: Vec<usize> = (0..k).map(|_| rng.random_range(0..n)).collect();
        idx.shuffle(&mut rng);
        let p = ExactMatrix::product(n, idx.iter().map(|&i| &set[i]))?;
        if best_product(k, n)?.norm_one() < p.norm_one() {
            norm_dominance_ok = false;
        }
    }
    Ok(GsrRealizedReport {
        n,
        brute_force,
        hhat_value,
        difference,
        cyclic_shifts_attain,
        norm_dominance_samples: samples,
        norm_dominance_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoObstacleReport {
    pub labels: Vec<&'static str>,
    pub transpose_closed: bool,
    pub two_norms: Vec<f64>,
    pub rho_2: BruteForceReport,
    pub value: f64,
}

pub const TWO_OBSTACLE_LABELS: [&str; 4] = ["N1", "N1^-1", "N2", "N2^-1"];

/// `{N1^{+-1}, N2^{+-1}}` with `N_k = Psi(a_k)` for two obstacles.
pub fn two_obstacle_set() -> Vec<ExactMatrix> {
    vec![
        gen_e(1, 2).expect("k in range"),
        gen_e_inverse(1, 2).expect("k in range"),
        gen_e(2, 2).expect("k in range"),
        gen_e_inverse(2, 2).expect("k in range"),
    ]
}

/// For a transpose-closed set of equal two-norm matrices the generalized
/// spectral radius is `rho_2`, which equals the common two-norm.
pub fn gsr_two_obstacles() -> Result<TwoObstacleReport> {
    let set = two_obstacle_set();
    let transpose_closed = set.iter().all(|m| set.contains(&m.transpose()));
    if !transpose_closed {
        return Err(Error::NotTransposeClosed);
    }
    let two_norms = set.iter().map(spectral::two_norm).collect::<Result<Vec<_>>>()?;
    let rho_2 = rho_k_bruteforce(&set, 2, u128::MAX)?;
    let value = rho_2.value;
    Ok(TwoObstacleReport {
        labels: TWO_OBSTACLE_LABELS.to_vec(),
        transpose_closed,
        two_norms,
        rho_2,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_rep::psi;
    use crate::protocol::ProtocolWord;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};
    use proptest::strategy::Strategy as _;

    fn ov(v: &[u64]) -> OrderedVector {
        OrderedVector::from_u64(v).unwrap()
    }

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    const SQRT2P1: f64 = 2.414_213_562_373_095;

    #[test]
    fn brute_force_two_obstacles() {
        let set = incidence_set(2).unwrap();
        let r1 = rho_k_bruteforce(&set, 1, 100).unwrap();
        assert!((r1.value - 1.0).abs() < 1e-12);
        let r2 = rho_k_bruteforce(&set, 2, 100).unwrap();
        assert!((r2.value - SQRT2P1).abs() < 1e-10);
        assert!(r2.achieving.contains(&vec![1, 2]));
        assert_eq!(r2.achieving, vec![vec![1, 2], vec![2, 1]]);
        assert!(matches!(
            rho_k_bruteforce(&set, 30, 1_000_000),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(rho_k_bruteforce(&[], 1, 10).is_err());
        assert!(rho_k_bruteforce(&set, 0, 10).is_err());
    }

    #[test]
    fn two_obstacle_shortcut() {
        let r = gsr_two_obstacles().unwrap();
        assert!(r.transpose_closed);
        assert!((r.value - SQRT2P1).abs() < 1e-10);
        assert!(r.two_norms.iter().all(|v| (v - SQRT2P1).abs() < 1e-10));
        // Psi(a1 a2^-1) = N1 N2^-1.
        assert!(r.rho_2.achieving.contains(&vec![1, 4]));
        let set = two_obstacle_set();
        let p = psi(&ProtocolWord::parse("a1 a2^-1", 2).unwrap());
        assert_eq!(set[0].mul(&set[3]).unwrap(), p);
        assert!(set.contains(&set[0].transpose()));
    }

    #[test]
    fn singleton_is_multiplicative() {
        let m = crate::matrix_rep::hhat_matrix(3).unwrap();
        let rho = spectral::rho(&m).unwrap();
        let est = gsr_estimate(std::slice::from_ref(&m), 4, 100).unwrap();
        for v in &est.rho_k {
            assert!((v - rho).abs() < 1e-9 * rho);
        }
        assert!(est.multiplicativity_ok && est.ceiling_ok);
    }

    #[test]
    fn estimate_three_obstacles() {
        let set = incidence_set(3).unwrap();
        let est = gsr_estimate(&set, 3, 1_000_000).unwrap();
        let target = spectral::rho(&crate::matrix_rep::hhat_matrix(3).unwrap()).unwrap().cbrt();
        assert_eq!(est.sup_k, 3);
        assert!((est.sup - target).abs() < 1e-9);
        assert_eq!(est.ceiling, 3.0);
        assert_eq!(est.ceiling_norm, "1");
        assert!(est.ceiling_ok && est.multiplicativity_ok);
    }

    #[test]
    fn realized_small() {
        for n in [2, 3, 4] {
            let r = verify_gsr_realized(n, 1_000_000, 5).unwrap();
            assert!(r.passed(1e-8), "{r:?}");
        }
        let r = verify_gsr_realized(3, 1_000_000, 5).unwrap();
        assert_eq!(r.brute_force.total_products, 27);
        // Reversing the index order conjugates A(k) to A(N+1-k), so the
        // reversed cyclic orders attain the maximum as well.
        assert_eq!(r.brute_force.achieving.len(), 6);
    }

    #[test]
    fn sorting_and_w() {
        assert_eq!(sort_vec(&big(&[1, 3, 2])).unwrap(), ov(&[3, 2, 1]));
        assert_eq!(sort_vec(&big(&[1, 1, 1])).unwrap(), ov(&[1, 1, 1]));
        assert_eq!(sort_vec(&big(&[7, 3, 9])).unwrap(), ov(&[9, 7, 3]));
        assert_eq!(sort_vec(&big(&[1, 0])), Err(Error::NonPositiveEntry));
        assert!(OrderedVector::from_u64(&[1, 2]).is_err());
        assert_eq!(w_apply(1, &ov(&[1, 1, 1])).unwrap(), ov(&[3, 3, 1]));
        assert_eq!(w_apply(2, &ov(&[3, 3, 1])).unwrap(), ov(&[9, 7, 3]));
        assert_eq!(w_apply(1, &ov(&[3, 3, 1])).unwrap(), w_apply(2, &ov(&[3, 3, 1])).unwrap());
        assert!(w_apply(4, &ov(&[3, 3, 1])).is_err());
    }

    #[test]
    fn standardization() {
        let a = ov(&[1, 1, 1]);
        let s = standardize(&Strategy::new(vec![2], 3).unwrap(), &a).unwrap();
        assert_eq!(s.indices(), &[1]);
        let s = standardize(&Strategy::ones(2), &ov(&[5, 2, 1])).unwrap();
        assert_eq!(s, Strategy::ones(2));
        assert!(Strategy::new(vec![0], 3).is_err());
    }

    #[test]
    fn lemma_trials_pass() {
        for r in run_lemma_trials(200, 42) {
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.trials, 200);
        }
    }

    /// Closed form of `W_j(a)`: entries before `j` and after `j` shifted by
    /// `2 a_j` in order, then `a_j`.
    fn w_closed(j: usize, a: &[u64]) -> Vec<u64> {
        let aj = a[j - 1];
        let mut out: Vec<u64> = a
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != j - 1)
            .map(|(_, &x)| x + 2 * aj)
            .collect();
        out.push(aj);
        out
    }

    proptest! {
        #[test]
        fn w_matches_closed_form((v, j) in (2usize..=9).prop_flat_map(|n| (proptest::collection::vec(1u64..1000, n), 1..=n))) {
            let a = sort_vec(&big(&v)).unwrap();
            let au: Vec<u64> = a.entries().iter().map(|x| x.to_u64().unwrap()).collect();
            let closed = w_closed(j, &au);
            prop_assert!(closed.windows(2).all(|w| w[0] >= w[1]));
            prop_assert_eq!(w_apply(j, &a).unwrap(), ov(&closed));
        }

        #[test]
        fn standardization_preserves_output((v, s) in (2usize..=7).prop_flat_map(|n| (
            proptest::collection::vec(1u64..6, n),
            proptest::collection::vec(1..=n, 0..8),
        ))) {
            let n = v.len();
            let a = sort_vec(&big(&v)).unwrap();
            let s = Strategy::new(s, n).unwrap();
            let t = standardize(&s, &a).unwrap();
            prop_assert_eq!(s.apply(&a).unwrap(), t.apply(&a).unwrap());
            prop_assert!(is_standard(&t, &a).unwrap());
        }
    }
}
