//! Noise models mixed into a target state.

use serde::Serialize;

use super::TRACE_TOL;
use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::symmetric::dicke_projector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    White,
    Custom,
}

/// The state `ρ_noise` of `ρ(p) = (1 − p) ρ + p ρ_noise`.
#[derive(Clone, Debug)]
pub struct NoiseModel {
    kind: NoiseKind,
    name: String,
    rho: DenseOperator,
}

impl NoiseModel {
    /// `𝟙/2^N`.
    pub fn white(num_qubits: usize) -> Self {
        Self {
            kind: NoiseKind::White,
            name: "white".into(),
            rho: DenseOperator::identity(num_qubits).scale(1.0 / (1u64 << num_qubits) as f64),
        }
    }

    /// An arbitrary noise state, checked to be a density matrix.
    pub fn custom(name: impl Into<String>, rho: DenseOperator) -> Result<Self> {
        rho.check_density(TRACE_TOL)?;
        Ok(Self {
            kind: NoiseKind::Custom,
            name: name.into(),
            rho: rho.to_hermitian()?,
        })
    }

    /// `(|D_6^{(2)}⟩⟨D_6^{(2)}| + |D_6^{(4)}⟩⟨D_6^{(4)}|)/2`, the noise that
    /// replaces one excitation too many or too few in a six-qubit Dicke
    /// experiment.
    pub fn nonwhite() -> Self {
        let rho = &dicke_projector(6, 2).expect("valid label") + &dicke_projector(6, 4).expect("valid label");
        Self {
            kind: NoiseKind::Custom,
            name: "nw".into(),
            rho: rho.scale(0.5),
        }
    }

    /// `"white"` on any register or `"nw"` on six qubits.
    pub fn by_name(name: &str, num_qubits: usize) -> Result<Self> {
        match name {
            "white" => Ok(Self::white(num_qubits)),
            "nw" if num_qubits == 6 => Ok(Self::nonwhite()),
            "nw" => Err(Error::InvalidArgument(format!(
                "noise `nw` is defined for 6 qubits, not {num_qubits}"
            ))),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rho(&self) -> &DenseOperator {
        &self.rho
    }

    pub fn num_qubits(&self) -> usize {
        self.rho.num_qubits()
    }
}

/// `p |D_6^{(3)}⟩⟨D_6^{(3)}| + (1 − p)/2 (|D_6^{(2)}⟩⟨D_6^{(2)}| + |D_6^{(4)}⟩⟨D_6^{(4)}|)`.
pub fn nonwhite_noise_state(p: f64) -> Result<DenseOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("weight {p} outside [0, 1]")));
    }
    let mut rho = dicke_projector(6, 3)?.scale(p);
    rho.add_scaled(1.0 - p, NoiseModel::nonwhite().rho())?;
    Ok(rho)
}
