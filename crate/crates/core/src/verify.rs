//! The identity suite run by `pointpush verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::eff_bounds;
use crate::config::Config;
use crate::error::Result;
use crate::exact::ExactMatrix;
use crate::gsr::{run_lemma_trials, verify_gsr_realized};
use crate::matrix_rep::{
    check_intermediate, column_sum_step_holds, h_matrix, h_partial, h_trace_formula, hhat_column_sum_formula,
    hhat_matrix, hhat_trace_formula, psi_phi_consistency,
};
use crate::protocol::ProtocolWord;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n_max: usize,
    pub seed: u64,
    pub fault_injected: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Check {
    r: CheckResult,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self {
            r: CheckResult {
                name,
                passed: true,
                cases: 0,
                detail: None,
            },
        }
    }

    fn case(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.r.cases += 1;
        if !ok && self.r.passed {
            self.r.passed = false;
            self.r.detail = Some(detail());
        }
    }
}

/// Run every identity for `N = 2..=n_max`. With `inject_fault` the sign of
/// one cell of an intermediate product is flipped before checking, which the
/// suite must detect and locate.
pub fn run_suite(n_max: usize, seed: u64, inject_fault: bool, cfg: &Config) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let mut c = Check::new("trace_H");
    for n in 2..=n_max {
        let t = h_matrix(n)?.trace();
        c.case(t == h_trace_formula(n), || format!("N={n}: trace {t}"));
    }
    checks.push(c.r);

    let mut c = Check::new("column_sums_Hhat");
    for n in 2..=n_max {
        let hh = hhat_matrix(n)?;
        let t = hh.trace();
        c.case(t == hhat_trace_formula(n), || format!("N={n}: trace {t}"));
        for (j, s) in hh.column_sums().iter().enumerate() {
            c.case(*s == hhat_column_sum_formula(j + 1, n), || format!("N={n}, j={}: {s}", j + 1));
        }
    }
    checks.push(c.r);

    let mut c = Check::new("intermediate_products");
    for n in 2..=n_max {
        for k in 1..n {
            let mut h = h_partial(k, n)?;
            let prev = h_partial(k - 1, n)?;
            if inject_fault && n == n_max && k == 1 {
                flip_first_nonzero(&mut h, k);
            }
            let r = check_intermediate(&h, Some(&prev), k, n);
            c.case(r.passed(), || match &r.first_mismatch {
                Some(m) => format!(
                    "N={n}, k={k}: cell ({}, {}) expected {} found {}",
                    m.row, m.col, m.expected, m.found
                ),
                None => format!(
                    "N={n}, k={k}: trace expected {} found {}, recursion {}",
                    r.trace_expected, r.trace_found, r.recursion_ok
                ),
            });
        }
    }
    checks.push(c.r);

    let mut c = Check::new("column_sum_step");
    for n in 2..=n_max {
        for _ in 0..5 {
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(-20..=20)).collect())
                .collect();
            let m = ExactMatrix::from_rows(&rows);
            for k in 1..=n {
                c.case(column_sum_step_holds(&m, k)?, || format!("N={n}, k={k}, M={rows:?}"));
            }
        }
    }
    checks.push(c.r);

    let mut c = Check::new("psi_phi_consistency");
    for n in 2..=n_max.min(6) {
        for _ in 0..20 {
            let len = rng.random_range(0..=12);
            let p = ProtocolWord::random(n, len, &mut rng)?;
            let r = psi_phi_consistency(&p)?;
            c.case(r.passed(), || format!("N={n}, protocol `{p}`: {r:?}"));
        }
    }
    checks.push(c.r);

    let mut c = Check::new("strategy_lemmas");
    for r in run_lemma_trials(100, rng.random()) {
        c.case(r.passed(), || format!("{}: {:?}", r.name, r.first_failure));
    }
    checks.push(c.r);

    let mut c = Check::new("gsr_realized");
    for n in 2..=n_max.min(4) {
        let r = verify_gsr_realized(n, cfg.product_budget, rng.random())?;
        c.case(r.passed(1e-8), || format!("N={n}: {r:?}"));
    }
    checks.push(c.r);

    let mut c = Check::new("bound_chain");
    for n in 2..=n_max {
        match eff_bounds(n, cfg) {
            Ok(_) => c.case(true, String::new),
            Err(e) => c.case(false, || e.to_string()),
        }
    }
    checks.push(c.r);

    Ok(VerifyReport {
        n_max,
        seed,
        fault_injected: inject_fault,
        checks,
    })
}

// Negate the first nonzero cell among the columns the closed form covers.
fn flip_first_nonzero(h: &mut ExactMatrix, k: usize) {
    let n = h.dim();
    for i in 0..n {
        for c in k..n {
            if h.get(i, c).sign() != num_bigint::Sign::NoSign {
                let v = -h.get(i, c);
                h.set(i, c, v);
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_detects_faults() {
        let cfg = Config::default();
        let r = run_suite(6, 3, false, &cfg).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = run_suite(6, 3, true, &cfg).unwrap();
        assert!(!r.passed());
        let bad: Vec<&CheckResult> = r.checks.iter().filter(|c| !c.passed).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].name, "intermediate_products");
        assert!(bad[0].detail.as_deref().unwrap().contains("cell (1, 2)"));
    }
}
