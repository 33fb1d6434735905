//! The bound chain for the maximal entropy efficiency `Eff(N)`:
//!
//! ```text
//! log((3^N - 3N - 1)/N)/N <= log rho(H(N))/N <= Eff(N) <= log rho(Hhat(N))/N <= log(3^N - 2)/N
//! ```
//!
//! `Eff(N)` itself is known only for `N = 2`. For larger `N` the value
//! `log rho(H(N))/N` of the hypotrochoid protocol is reported as a conjecture.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::exact::big_ln_abs;
use crate::matrix_rep::{h_matrix, hhat_matrix};
use crate::spectral::{spectral_radius, Classification};

/// Slack allowed between consecutive terms of the chain beyond the declared
/// spectral tolerances.
pub const ORDER_SLACK: f64 = 1e-9;

pub const DEFAULT_TABLE_MAX: usize = 20;

pub const EFF_TWO_REALIZER: &str = "a1 a2^-1";

pub fn log3() -> f64 {
    3f64.ln()
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::TooFewObstacles { min: 2, found: n })
    } else {
        Ok(())
    }
}

/// `(log(3^N - 3N - 1) - log N)/N`, clamped to 0 when `3^N - 3N - 1 <= N`.
/// The flag reports whether the clamp applied.
pub fn closed_lower(n: usize) -> (f64, bool) {
    let x = num_traits::pow(BigInt::from(3), n) - BigInt::from(3 * n + 1);
    if x <= BigInt::from(n) {
        (0.0, true)
    } else {
        ((big_ln_abs(&x) - (n as f64).ln()) / n as f64, false)
    }
}

/// `log(3^N - 2)/N`.
pub fn closed_upper(n: usize) -> f64 {
    let nf = n as f64;
    (nf * log3() + (-2.0 * (-nf * log3()).exp()).ln_1p()) / nf
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conjecture {
    pub value: f64,
    pub statement: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTolerances {
    pub spectral_lower: f64,
    pub spectral_upper: f64,
    pub order_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EfficiencyBounds {
    pub n_obstacles: usize,
    pub closed_lower: f64,
    pub closed_lower_clamped: bool,
    pub spectral_lower: f64,
    pub spectral_upper: f64,
    pub closed_upper: f64,
    pub rho_h: f64,
    pub rho_hhat: f64,
    pub tolerances: BoundTolerances,
    pub classification_h: Classification,
    pub classification_hhat: Classification,
    pub conjecture: Conjecture,
}

impl EfficiencyBounds {
    pub fn chain(&self) -> [f64; 4] {
        [self.closed_lower, self.spectral_lower, self.spectral_upper, self.closed_upper]
    }

    pub fn gap_to_log3_lower(&self) -> f64 {
        (self.closed_lower - log3()).abs()
    }

    pub fn gap_to_log3_upper(&self) -> f64 {
        (self.closed_upper - log3()).abs()
    }

    fn check_order(&self) -> Result<()> {
        let t = &self.tolerances;
        let c = self.chain();
        let slack = [
            t.spectral_lower + t.order_slack,
            t.spectral_lower + t.spectral_upper + t.order_slack,
            t.spectral_upper + t.order_slack,
        ];
        let names = ["closed_lower", "spectral_lower", "spectral_upper", "closed_upper"];
        for i in 0..3 {
            if c[i] > c[i + 1] + slack[i] {
                return Err(Error::OrderingViolation {
                    n: self.n_obstacles,
                    detail: format!("{} = {} > {} = {}", names[i], c[i], names[i + 1], c[i + 1]),
                });
            }
        }
        if c[3] > log3() + t.order_slack {
            return Err(Error::OrderingViolation {
                n: self.n_obstacles,
                detail: format!("closed_upper = {} exceeds log 3", c[3]),
            });
        }
        Ok(())
    }
}

/// Assemble and check the bound chain for `N` obstacles.
pub fn eff_bounds(n: usize, cfg: &Config) -> Result<EfficiencyBounds> {
    check_n(n)?;
    let h = spectral_radius(&h_matrix(n)?, cfg)?;
    let hh = spectral_radius(&hhat_matrix(n)?, cfg)?;
    let nf = n as f64;
    let (cl, clamped) = closed_lower(n);
    let spectral_lower = h.radius.ln() / nf;
    let b = EfficiencyBounds {
        n_obstacles: n,
        closed_lower: cl,
        closed_lower_clamped: clamped,
        spectral_lower,
        spectral_upper: hh.radius.ln() / nf,
        closed_upper: closed_upper(n),
        rho_h: h.radius,
        rho_hhat: hh.radius,
        tolerances: BoundTolerances {
            spectral_lower: h.tolerance / h.radius / nf,
            spectral_upper: hh.tolerance / hh.radius / nf,
            order_slack: ORDER_SLACK,
        },
        classification_h: h.classification.classification,
        classification_hhat: hh.classification.classification,
        conjecture: Conjecture {
            value: spectral_lower,
            statement: "conjectured, not proven: the hypotrochoid protocol attains Eff(N), so Eff(N) = spectral_lower",
        },
    };
    b.check_order()?;
    Ok(b)
}

/// `Eff(2) = log(1 + sqrt 2)`, attained by `a1 a2^-1`.
pub fn eff_exact_two() -> f64 {
    (1.0 + 2f64.sqrt()).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub closed_lower: f64,
    pub spectral_lower: f64,
    pub spectral_upper: f64,
    pub closed_upper: f64,
    pub gap_to_log3_lower: f64,
    pub gap_to_log3_upper: f64,
    #[serde(rename = "classification_H")]
    pub classification_h: Classification,
    #[serde(rename = "classification_Hhat")]
    pub classification_hhat: Classification,
}

impl From<&EfficiencyBounds> for TableRow {
    fn from(b: &EfficiencyBounds) -> Self {
        Self {
            n: b.n_obstacles,
            closed_lower: b.closed_lower,
            spectral_lower: b.spectral_lower,
            spectral_upper: b.spectral_upper,
            closed_upper: b.closed_upper,
            gap_to_log3_lower: b.gap_to_log3_lower(),
            gap_to_log3_upper: b.gap_to_log3_upper(),
            classification_h: b.classification_h,
            classification_hhat: b.classification_hhat,
        }
    }
}

pub const TABLE_HEADER: [&str; 9] = [
    "N",
    "closed_lower",
    "spectral_lower",
    "spectral_upper",
    "closed_upper",
    "gap_to_log3_lower",
    "gap_to_log3_upper",
    "classification_H",
    "classification_Hhat",
];

/// Bound chains for `from..=to`, computed in parallel.
pub fn eff_table(from: usize, to: usize, max_n: usize, cfg: &Config) -> Result<Vec<EfficiencyBounds>> {
    if from < 2 || from > to || to > max_n {
        return Err(Error::InvalidRange(format!(
            "need 2 <= from <= to <= {max_n}, got from = {from}, to = {to}"
        )));
    }
    (from..=to).into_par_iter().map(|n| eff_bounds(n, cfg)).collect()
}

/// Both closed-form gaps to `log 3` strictly decrease from `N = 3` on.
pub fn convergence_monotone(rows: &[EfficiencyBounds]) -> bool {
    rows.windows(2)
        .filter(|w| w[0].n_obstacles >= 3)
        .all(|w| {
            w[1].gap_to_log3_lower() < w[0].gap_to_log3_lower()
                && w[1].gap_to_log3_upper() < w[0].gap_to_log3_upper()
        })
}

/// Round to 10 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().unwrap_or(x)
}

/// Format with 10 significant digits, fixed notation for moderate magnitudes.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..10).contains(&mag) {
        let decimals = (9 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.9e}")
    }
}

pub fn table_to_csv(rows: &[EfficiencyBounds]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    w.write_record(TABLE_HEADER).map_err(ser)?;
    for b in rows {
        let r = TableRow::from(b);
        w.write_record([
            r.n.to_string(),
            format_sig(r.closed_lower),
            format_sig(r.spectral_lower),
            format_sig(r.spectral_upper),
            format_sig(r.closed_upper),
            format_sig(r.gap_to_log3_lower),
            format_sig(r.gap_to_log3_upper),
            r.classification_h.to_string(),
            r.classification_hhat.to_string(),
        ])
        .map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn table_to_json(rows: &[EfficiencyBounds]) -> Result<serde_json::Value> {
    let rows: Vec<TableRow> = rows
        .iter()
        .map(|b| {
            let mut r = TableRow::from(b);
            for v in [
                &mut r.closed_lower,
                &mut r.spectral_lower,
                &mut r.spectral_upper,
                &mut r.closed_upper,
                &mut r.gap_to_log3_lower,
                &mut r.gap_to_log3_upper,
            ] {
                *v = round_sig(*v);
            }
            r
        })
        .collect();
    serde_json::to_value(rows).map_err(|e| Error::Serialization(e.to_string()))
}
