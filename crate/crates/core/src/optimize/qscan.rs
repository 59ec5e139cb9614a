//! Noise tolerance of `c_q − (J_x² + J_y²) + q (J_z − ⟨J_z⟩)²` as a function
//! of `q`, with `c_q` the PPT maximum of `J_x² + J_y² − q (J_z − ⟨J_z⟩)²`.

use serde::Serialize;

use super::{max_ppt_all, SolverConfig};
use crate::compiler::Coeff;
use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::symmetric::{collective_power, CollectiveAxis, DickeLabel};
use crate::witness::{independent_witness, noise_tolerance, NoiseModel};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QScanRow {
    pub q: f64,
    pub c_q: f64,
    /// White-noise tolerance of the witness built from `c_q`; zero when it
    /// does not detect the target.
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QScan {
    pub num_qubits: usize,
    pub m: usize,
    pub rows: Vec<QScanRow>,
    /// Index of the largest tolerance; ties keep the smallest `q`.
    pub argmax: usize,
}

impl QScan {
    pub fn best(&self) -> &QScanRow {
        &self.rows[self.argmax]
    }

    /// Rises to the maximum and falls after it, up to `slack`.
    pub fn is_unimodal(&self, slack: f64) -> bool {
        let t: Vec<f64> = self.rows.iter().map(|r| r.tolerance).collect();
        t[..=self.argmax].windows(2).all(|w| w[1] >= w[0] - slack)
            && t[self.argmax..].windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

/// `J_x² + J_y² − q (J_z − ⟨J_z⟩)²` for the Dicke target `(N, m)`.
pub fn moment_observable(num_qubits: usize, m: usize, q: f64) -> Result<DenseOperator> {
    let label = DickeLabel::new(num_qubits, m)?;
    let mut out = collective_power(num_qubits, CollectiveAxis::X, 2, 0.0)?;
    out.add_scaled(1.0, &collective_power(num_qubits, CollectiveAxis::Y, 2, 0.0)?)?;
    if q != 0.0 {
        let z = collective_power(num_qubits, CollectiveAxis::Z, 2, label.jz_expectation())?;
        out.add_scaled(-q, &z)?;
    }
    Ok(out)
}

pub fn q_scan(num_qubits: usize, m: usize, grid: &[f64], config: &SolverConfig) -> Result<QScan> {
    if grid.is_empty() || grid.iter().any(|q| !(q.is_finite() && *q >= 0.0)) {
        return Err(Error::InvalidArgument("the q grid must be nonempty and nonnegative".into()));
    }
    let label = DickeLabel::new(num_qubits, m)?;
    let rho = DenseOperator::projector(&label.state()?);
    let noise = NoiseModel::white(num_qubits);
    let mut rows = Vec::with_capacity(grid.len());
    for &q in grid {
        let c_q = max_ppt_all(&moment_observable(num_qubits, m, q)?, config)?.value;
        let w = independent_witness(&format!("WI3_q{q}"), num_qubits, m, Coeff::Float(q), Coeff::Float(c_q))?;
        let tolerance = match noise_tolerance(&w, &noise, &rho) {
            Err(Error::WitnessNotNegative { .. }) => 0.0,
            other => other?,
        };
        rows.push(QScanRow { q, c_q, tolerance });
    }
    let argmax = rows
        .iter()
        .enumerate()
        .fold(0, |best, (i, r)| if r.tolerance > rows[best].tolerance { i } else { best });
    Ok(QScan {
        num_qubits,
        m,
        rows,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_zero_row_is_the_plain_bound() {
        let config = SolverConfig::default();
        let scan = q_scan(4, 1, &[0.0, 1.5], &config).unwrap();
        let c0 = max_ppt_all(&moment_observable(4, 1, 0.0).unwrap(), &config).unwrap().value;
        assert!((scan.rows[0].c_q - c0).abs() < 1e-12);
        assert_eq!(scan.argmax, 1);
        assert!(q_scan(4, 1, &[-1.0], &config).is_err());
    }
}
