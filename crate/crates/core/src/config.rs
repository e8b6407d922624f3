use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_HORIZON: u64 = 100_000;
pub const DEFAULT_EPSILON_GRID: [f64; 4] = [1.0, 0.5, 0.1, 0.01];
pub const DEFAULT_LAMBDA_GRID: [f64; 5] = [2.0, 1.5, 1.2, 1.1, 1.05];
pub const DEFAULT_PASS_TOLERANCE: f64 = 0.02;
pub const DEFAULT_FAIL_THRESHOLD: f64 = 0.2;
pub const DEFAULT_CHECKPOINT_COUNT: usize = 24;
/// Smallest checkpoint of a density trace.
pub const FIRST_CHECKPOINT: u64 = 16;

/// Parameters shared by every finite-horizon verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisConfig {
    pub horizon: u64,
    pub checkpoint_count: usize,
    /// Sorted descending, strictly positive.
    pub epsilon_grid: Vec<f64>,
    pub pass_tolerance: f64,
    pub fail_threshold: f64,
    /// Sorted descending, each in `(1, 2]`.
    pub lambda_grid: Vec<f64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            horizon: DEFAULT_HORIZON,
            checkpoint_count: DEFAULT_CHECKPOINT_COUNT,
            epsilon_grid: DEFAULT_EPSILON_GRID.to_vec(),
            pass_tolerance: DEFAULT_PASS_TOLERANCE,
            fail_threshold: DEFAULT_FAIL_THRESHOLD,
            lambda_grid: DEFAULT_LAMBDA_GRID.to_vec(),
        }
    }
}

impl AnalysisConfig {
    pub fn with_horizon(horizon: u64) -> Self {
        Self {
            horizon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.checkpoint_count == 0 {
            return Err(Error::Config("checkpoint count must be at least 1".into()));
        }
        if !(self.pass_tolerance > 0.0 && self.pass_tolerance.is_finite()) {
            return Err(Error::Config("pass tolerance must be positive".into()));
        }
        if !(self.fail_threshold.is_finite() && self.pass_tolerance < self.fail_threshold) {
            return Err(Error::Config(
                "pass tolerance must be strictly below the fail threshold".into(),
            ));
        }
        if self.epsilon_grid.is_empty() {
            return Err(Error::Config("epsilon grid is empty".into()));
        }
        if self.epsilon_grid.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::Config("epsilon values must be positive and finite".into()));
        }
        if self.epsilon_grid.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("epsilon grid must be strictly descending".into()));
        }
        if self.lambda_grid.iter().any(|l| !(*l > 1.0 && *l <= 2.0)) {
            return Err(Error::Config("lambda values must lie in (1, 2]".into()));
        }
        if self.lambda_grid.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("lambda grid must be strictly descending".into()));
        }
        Ok(())
    }

    /// Smallest epsilon of the grid.
    pub fn finest_epsilon(&self) -> f64 {
        self.epsilon_grid.last().copied().unwrap_or(self.pass_tolerance)
    }

    /// A sup-type statistic passes when it is within the pass tolerance and
    /// strictly below every epsilon of the grid, so that a passing sup-norm
    /// verdict leaves no exceptional index in the tail for any density verdict
    /// at the same configuration.
    pub fn sup_passes(&self, statistic: f64) -> bool {
        statistic <= self.pass_tolerance && statistic < self.finest_epsilon()
    }

    pub fn sup_fails(&self, statistic: f64) -> bool {
        statistic >= self.fail_threshold
    }
}

/// First index of the tail window `[ceil(n/2), n]`.
pub fn tail_start(n: u64) -> u64 {
    n.div_ceil(2).max(1)
}
