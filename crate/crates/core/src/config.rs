use serde::{Deserialize, Serialize};

/// Numerical tolerances and work budgets shared by the library entry points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Relative tolerance for spectral radii (absolute when the radius is below 1).
    pub spectral_tol: f64,
    /// Distance from the unit circle below which a root counts as lying on it.
    pub eps_unit: f64,
    /// Maximum number of ordered products a brute-force enumeration may visit.
    pub product_budget: u128,
    /// Maximum reduced word length during word-growth iteration.
    pub length_cap: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            spectral_tol: 1e-10,
            eps_unit: 1e-6,
            product_budget: 1_000_000,
            length_cap: 100_000_000,
        }
    }
}

/// Environment variable that overrides [`Config::product_budget`].
pub const BUDGET_ENV: &str = "POINTPUSH_BUDGET";

impl Config {
    /// Default configuration with `POINTPUSH_BUDGET` applied when set and parseable.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Some(b) = std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()) {
            cfg.product_budget = b;
        }
        cfg
    }
}
