//! Convex and heuristic optimizers: witness coefficients under a linear
//! matrix inequality, maxima over PPT states, and seesaw searches over
//! biseparable and symmetric product states.

mod ppt;
mod qscan;
mod seesaw;
mod witness_opt;

pub use ppt::{max_ppt, max_ppt_all, PptProblem, PptSolution};
pub use qscan::{moment_observable, q_scan, QScan, QScanRow};
pub use seesaw::{max_bisep_all, max_bisep_seesaw, max_symmetric_product, BisepMax};
pub use witness_opt::{optimize_witness, setting_basis, WitnessOptimizationProblem};

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerances and seeds shared by the optimizers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Final barrier parameter of the PPT interior-point method.
    pub barrier_tol: f64,
    /// Model gap at which the cutting-plane method stops.
    pub cut_tol: f64,
    pub cut_max_iter: usize,
    pub seesaw_restarts: usize,
    /// Seesaw stops when an iteration improves the objective by less.
    pub seesaw_tol: f64,
    pub seesaw_max_iter: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            barrier_tol: 1e-9,
            cut_tol: 1e-6,
            cut_max_iter: 5000,
            seesaw_restarts: 50,
            seesaw_tol: 1e-12,
            seesaw_max_iter: 2000,
            seed: 0,
        }
    }
}

impl SolverConfig {
    /// Sets `key` from its text value. Returns `Ok(false)` for keys this
    /// struct does not own.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad value `{value}` for `{key}`")))
        }
        match key {
            "barrier_tol" => self.barrier_tol = num(key, value)?,
            "cut_tol" => self.cut_tol = num(key, value)?,
            "cut_max_iter" => self.cut_max_iter = num(key, value)?,
            "seesaw_restarts" => self.seesaw_restarts = num(key, value)?,
            "seesaw_tol" => self.seesaw_tol = num(key, value)?,
            "seesaw_max_iter" => self.seesaw_max_iter = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }
}

/// Outcome and certificate of a solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverReport {
    pub method: &'static str,
    pub optimum: f64,
    /// Upper bound minus lower bound on the optimum.
    pub gap: f64,
    /// Largest violation of the equality constraints.
    pub primal_residual: f64,
    /// Smallest eigenvalue over the PSD constraints at the returned point.
    pub min_eigenvalue_slack: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SolverReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_keys() {
        let mut c = SolverConfig::default();
        assert!(c.set("seed", "17").unwrap());
        assert!(c.set("cut_tol", "1e-7").unwrap());
        assert!(!c.set("sign_map", "+-").unwrap());
        assert!(c.set("seesaw_restarts", "x").is_err());
        assert_eq!((c.seed, c.cut_tol), (17, 1e-7));
    }
}
