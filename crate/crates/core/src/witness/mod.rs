//! Entanglement witnesses built from collective observables, their noise
//! tolerance and the fidelity bounds they imply.

mod alpha;
mod catalog;
mod noise;

pub use alpha::LmiSpectrum;
pub use catalog::{catalog, independent_witness, CATALOG_NAMES};
pub use noise::{nonwhite_noise_state, NoiseKind, NoiseModel};

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::compiler::{compile, Coeff, LocalTerm, Schedule};
use crate::error::{Error, Result};
use crate::linalg::{bloch_operator, DenseOperator, StateVector};
use crate::symmetric::{collective_power, CollectiveAxis, DickeLabel};

/// Allowed violation of `W − αW^(P) ≥ 0`.
pub const LMI_TOL: f64 = 1e-9;

/// Allowed deviation of `Tr ρ` from one.
pub const TRACE_TOL: f64 = 1e-10;

/// One operator in the linear span a witness is built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisOp {
    Identity,
    /// `(J_axis − shift)^power`.
    CollectivePower {
        axis: CollectiveAxis,
        power: u32,
        #[serde(default)]
        shift: f64,
    },
    /// `(σ_axis + shift·𝟙)^{⊗N}`.
    TensorPower {
        axis: CollectiveAxis,
        #[serde(default)]
        shift: f64,
    },
    /// `|Ψ⟩⟨Ψ|` for the witness target.
    Projector,
}

impl BasisOp {
    pub fn power(axis: CollectiveAxis, power: u32) -> Self {
        BasisOp::CollectivePower { axis, power, shift: 0.0 }
    }

    /// Dense operator on `num_qubits` qubits; `target` realizes `Projector`.
    pub fn realize(&self, num_qubits: usize, target: &StateVector) -> Result<DenseOperator> {
        match *self {
            BasisOp::Identity => Ok(DenseOperator::identity(num_qubits)),
            BasisOp::CollectivePower { axis, power, shift } => collective_power(num_qubits, axis, power, shift),
            BasisOp::TensorPower { axis, shift } => {
                Ok(DenseOperator::tensor_power(&bloch_operator(axis.unit()?, shift), num_qubits))
            }
            BasisOp::Projector => Ok(DenseOperator::projector(target)),
        }
    }

    /// Measurement schedule of the operator.
    pub fn schedule(&self, num_qubits: usize, target: &StateVector) -> Result<Schedule> {
        match *self {
            BasisOp::Identity => Ok(Schedule::new(num_qubits, [LocalTerm::identity(Coeff::int(1))])),
            BasisOp::TensorPower { axis, shift } => Ok(Schedule::new(
                num_qubits,
                [LocalTerm::from_vector(num_qubits, Coeff::int(1), axis.unit()?, shift)],
            )),
            _ => compile(&self.realize(num_qubits, target)?),
        }
    }
}

impl fmt::Display for BasisOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let signed = |s: f64| if s < 0.0 { format!(" - {}", -s) } else { format!(" + {s}") };
        match *self {
            BasisOp::Identity => write!(f, "1"),
            BasisOp::CollectivePower { axis, power, shift: 0.0 } => {
                write!(f, "J_{}^{power}", axis.label())
            }
            BasisOp::CollectivePower { axis, power, shift } => {
                write!(f, "(J_{}{})^{power}", axis.label(), signed(-shift))
            }
            BasisOp::TensorPower { axis, shift } => write!(f, "(s_{}{})^N", axis.label(), signed(shift)),
            BasisOp::Projector => write!(f, "|psi><psi|"),
        }
    }
}

/// The state a witness is designed to detect.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Dicke(DickeLabel),
    /// Amplitudes as `[re, im]` pairs.
    Amplitudes(Vec<[f64; 2]>),
}

impl Target {
    pub fn state(&self) -> Result<StateVector> {
        match self {
            Target::Dicke(label) => label.state(),
            Target::Amplitudes(a) => {
                let dim = a.len();
                if dim < 2 || !dim.is_power_of_two() {
                    return Err(Error::InvalidArgument(format!(
                        "target has {dim} amplitudes, not a power of two"
                    )));
                }
                let amps = a.iter().map(|&[re, im]| C64::new(re, im)).collect();
                StateVector::new(dim.trailing_zeros() as usize, amps)
            }
        }
    }

    pub fn from_state(psi: &StateVector) -> Self {
        Target::Amplitudes(psi.amplitudes().iter().map(|a| [a.re, a.im]).collect())
    }
}

/// How a witness obtains the `α` of `W − αW^(P) ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaChoice {
    None,
    /// A given value, checked at construction.
    Given(f64),
    /// Largest `α ∈ (0, 10]` satisfying the inequality, if any.
    Derive,
}

/// A witness `W = Σ_k c_k B_k` together with its target and fidelity data.
#[derive(Clone, Debug)]
pub struct WitnessSpec {
    name: String,
    basis: Vec<BasisOp>,
    coefficients: Vec<Coeff>,
    alpha: Option<f64>,
    alpha_derived: bool,
    lambda_sq: f64,
    target: Target,
    target_state: StateVector,
    dense: DenseOperator,
}

impl WitnessSpec {
    pub fn new(
        name: impl Into<String>,
        target: Target,
        basis: Vec<BasisOp>,
        coefficients: Vec<Coeff>,
        alpha: AlphaChoice,
    ) -> Result<Self> {
        if basis.len() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: coefficients.len(),
            });
        }
        if basis.is_empty() {
            return Err(Error::InvalidArgument("a witness needs at least one basis operator".into()));
        }
        let target_state = target.state()?;
        let n = target_state.num_qubits();
        let mut dense = DenseOperator::zeros(n);
        for (b, c) in basis.iter().zip(&coefficients) {
            dense.add_scaled(c.value(), &b.realize(n, &target_state)?)?;
        }
        let dense = dense.to_hermitian()?;
        let lambda_sq = target_state.schmidt_max_sq();
        let mut spec = Self {
            name: name.into(),
            basis,
            coefficients,
            alpha: None,
            alpha_derived: false,
            lambda_sq,
            target,
            target_state,
            dense,
        };
        match alpha {
            AlphaChoice::None => {}
            AlphaChoice::Given(a) => {
                if !(a > 0.0) || !a.is_finite() {
                    return Err(Error::InvalidArgument(format!("alpha must be positive, got {a}")));
                }
                let slack = spec.lmi_min_eigenvalue(a)?;
                if slack < -LMI_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "W − {a}·W^(P) has minimum eigenvalue {slack:e}"
                    )));
                }
                spec.alpha = Some(a);
            }
            AlphaChoice::Derive => {
                let spectrum = LmiSpectrum::new(&spec.dense, &spec.target_state)?;
                spec.alpha = spectrum.largest_alpha(lambda_sq, 10.0);
                spec.alpha_derived = true;
            }
        }
        Ok(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.target_state.num_qubits()
    }

    pub fn basis(&self) -> &[BasisOp] {
        &self.basis
    }

    pub fn coefficients(&self) -> &[Coeff] {
        &self.coefficients
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    /// True if `α` was found by search rather than given.
    pub fn alpha_derived(&self) -> bool {
        self.alpha_derived
    }

    /// `λ_Ψ²` of the projector witness for the target.
    pub fn lambda_sq(&self) -> f64 {
        self.lambda_sq
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn target_state(&self) -> &StateVector {
        &self.target_state
    }

    /// Dense realization of `W`.
    pub fn operator(&self) -> &DenseOperator {
        &self.dense
    }

    /// `W^(P) = λ_Ψ² 𝟙 − |Ψ⟩⟨Ψ|`.
    pub fn projector_witness_operator(&self) -> DenseOperator {
        let mut wp = DenseOperator::projector(&self.target_state).scale(-1.0);
        wp.add_identity(self.lambda_sq);
        wp
    }

    /// Minimum eigenvalue of `W − αW^(P)`.
    pub fn lmi_min_eigenvalue(&self, alpha: f64) -> Result<f64> {
        let mut m = self.dense.clone();
        m.add_scaled(-alpha, &self.projector_witness_operator())?;
        m.min_eigenvalue()
    }

    /// Measurement schedule of `W`, combining the schedules of the basis
    /// operators.
    pub fn schedule(&self) -> Result<Schedule> {
        let n = self.num_qubits();
        let parts = self
            .basis
            .iter()
            .map(|b| b.schedule(n, &self.target_state))
            .collect::<Result<Vec<_>>>()?;
        let weighted: Vec<(Coeff, &Schedule)> = self.coefficients.iter().copied().zip(&parts).collect();
        Schedule::combine(&weighted)
    }

    /// `Σ_k c_k B_k` in readable form.
    pub fn formula(&self) -> String {
        let mut out = String::new();
        for (k, (b, c)) in self.basis.iter().zip(&self.coefficients).enumerate() {
            let v = c.to_string();
            let (sign, mag) = match v.strip_prefix('-') {
                Some(m) => ("-", m.to_string()),
                None => ("+", v),
            };
            match (k, sign) {
                (0, "-") => out.push('-'),
                (0, _) => {}
                _ => out.push_str(&format!(" {sign} ")),
            }
            if matches!(b, BasisOp::Identity) {
                out.push_str(&mag);
            } else {
                out.push_str(&format!("{mag}*{b}"));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&WitnessFile {
            name: self.name.clone(),
            num_qubits: self.num_qubits(),
            basis_terms: self.basis.clone(),
            coefficients: self.coefficients.clone(),
            alpha: self.alpha,
            alpha_derived: self.alpha_derived,
            lambda_sq: Some(self.lambda_sq),
            target: self.target.clone(),
        })
        .expect("witnesses serialize")
    }

    /// Reads a witness written by [`to_json`](Self::to_json); a stored `α` is
    /// re-validated.
    pub fn from_json(s: &str) -> Result<Self> {
        let f: WitnessFile = serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        let alpha = f.alpha.map_or(AlphaChoice::None, AlphaChoice::Given);
        let mut spec = Self::new(f.name, f.target, f.basis_terms, f.coefficients, alpha)?;
        if spec.num_qubits() != f.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: f.num_qubits,
                found: spec.num_qubits(),
            });
        }
        spec.alpha_derived = f.alpha_derived;
        Ok(spec)
    }
}

#[derive(Serialize, Deserialize)]
struct WitnessFile {
    name: String,
    #[serde(rename = "N")]
    num_qubits: usize,
    basis_terms: Vec<BasisOp>,
    coefficients: Vec<Coeff>,
    alpha: Option<f64>,
    #[serde(default)]
    alpha_derived: bool,
    lambda_sq: Option<f64>,
    target: Target,
}

/// `W^(P) = λ_Ψ² 𝟙 − |Ψ⟩⟨Ψ|`, with `α = 1`.
pub fn projector_witness(target: &StateVector) -> Result<WitnessSpec> {
    projector_witness_for(format!("WP_{}q", target.num_qubits()), Target::from_state(target))
}

pub(crate) fn projector_witness_for(name: String, target: Target) -> Result<WitnessSpec> {
    let lambda_sq = target.state()?.schmidt_max_sq();
    WitnessSpec::new(
        name,
        target,
        vec![BasisOp::Identity, BasisOp::Projector],
        vec![Coeff::Float(lambda_sq), Coeff::int(-1)],
        AlphaChoice::Given(1.0),
    )
}

fn check_register(w: &WitnessSpec, rho: &DenseOperator) -> Result<()> {
    if rho.num_qubits() != w.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: w.num_qubits(),
            found: rho.num_qubits(),
        });
    }
    Ok(())
}

/// `Tr(W ρ)` for a unit-trace `ρ`.
pub fn expectation(w: &WitnessSpec, rho: &DenseOperator) -> Result<f64> {
    check_register(w, rho)?;
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(Error::InvalidTrace { trace: trace.re });
    }
    Ok(w.operator().trace_product(rho)?.re)
}

/// Largest noise fraction `p*` for which `(1 − p)ρ + p ρ_noise` keeps a
/// negative expectation, `Tr(Wρ)/(Tr(Wρ) − Tr(Wρ_noise))`, capped at 1.
pub fn noise_tolerance(w: &WitnessSpec, noise: &NoiseModel, rho: &DenseOperator) -> Result<f64> {
    let a = expectation(w, rho)?;
    if a >= 0.0 {
        return Err(Error::WitnessNotNegative { value: a });
    }
    let b = expectation(w, noise.rho())?;
    if b <= 0.0 {
        return Ok(1.0);
    }
    Ok(a / (a - b))
}

/// `F ≥ λ_Ψ² − ⟨W⟩/α`.
pub fn fidelity_bound(w: &WitnessSpec, value: f64) -> Result<f64> {
    let alpha = w.alpha().ok_or_else(|| Error::MissingAlpha(w.name().to_string()))?;
    Ok(w.lambda_sq() - value / alpha)
}

/// One row of a fidelity curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityPoint {
    /// Noise fraction.
    pub p: f64,
    /// `⟨Ψ|ρ(p)|Ψ⟩`.
    pub fidelity: f64,
    /// `Tr(W ρ(p))`.
    pub witness_value: f64,
    /// Lower bound from the witness value.
    pub bound: f64,
}

/// Fidelity and its witness bound along `ρ(p) = (1 − p)|Ψ⟩⟨Ψ| + p ρ_noise`.
pub fn fidelity_curves(w: &WitnessSpec, noise: &NoiseModel, grid: &[f64]) -> Result<Vec<FidelityPoint>> {
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("noise fraction {p} outside [0, 1]")));
    }
    let target = DenseOperator::projector(w.target_state());
    let a = expectation(w, &target)?;
    let b = expectation(w, noise.rho())?;
    let f_noise = noise.rho().expectation(w.target_state())?.re;
    grid.iter()
        .map(|&p| {
            let value = (1.0 - p) * a + p * b;
            Ok(FidelityPoint {
                p,
                fidelity: (1.0 - p) + p * f_noise,
                witness_value: value,
                bound: fidelity_bound(w, value)?,
            })
        })
        .collect()
}

/// `points` evenly spaced values on `[0, 1]`.
pub fn unit_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|k| k as f64 / (points - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::{dicke, dicke_projector, symmetrize};

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn projector_witness_constants() {
        for (n, m, c) in [(6, 3, 0.6), (4, 1, 0.75), (4, 2, 2.0 / 3.0), (5, 1, 0.8)] {
            let w = projector_witness(&dicke(n, m).unwrap()).unwrap();
            assert!(approx(w.coefficients()[0].value(), c, 1e-12), "D({n},{m})");
        }
    }

    #[test]
    fn expectation_on_mixed_state() {
        let w = catalog("WP_D63").unwrap();
        let mixed = DenseOperator::identity(6).scale(1.0 / 64.0);
        assert!(approx(expectation(&w, &mixed).unwrap(), 0.584375, 1e-12));
        assert!(matches!(
            expectation(&w, &DenseOperator::identity(6)),
            Err(Error::InvalidTrace { .. })
        ));
    }

    #[test]
    fn tolerance_threshold_is_sharp() {
        let w = catalog("WI2_D63").unwrap();
        let noise = NoiseModel::white(6);
        let rho = dicke_projector(6, 3).unwrap();
        let p = noise_tolerance(&w, &noise, &rho).unwrap();
        assert!(approx(p, 0.9821 / 9.0, 1e-12));
        let mix = |q: f64| {
            let mut r = rho.scale(1.0 - q);
            r.add_scaled(q, noise.rho()).unwrap();
            expectation(&w, &r).unwrap()
        };
        assert!(mix(p * (1.0 - 1e-6)) < 0.0);
        assert!(mix(p * (1.0 + 1e-6)) > 0.0);
        let sep = DenseOperator::projector(&StateVector::basis(6, 0).unwrap());
        assert!(matches!(
            noise_tolerance(&w, &noise, &sep),
            Err(Error::WitnessNotNegative { .. })
        ));
    }

    #[test]
    fn symmetrized_witness_has_same_tolerance() {
        let n = 4;
        let target = dicke_projector(n, 1).unwrap();
        let psi = dicke(n, 1).unwrap();
        // A non-invariant witness: the projector witness plus a traceless
        // term that vanishes on invariant states.
        let z_last = DenseOperator::from_diagonal(n, &[1.0, -1.0].repeat(8));
        let skew = &z_last - &symmetrize(&z_last);
        let base = projector_witness(&psi).unwrap();
        let mut raw = base.operator().clone();
        raw.add_scaled(0.3, &skew).unwrap();
        let noise = NoiseModel::white(n);
        let tol = |w: &DenseOperator| {
            let a = w.trace_product(&target).unwrap().re;
            let b = w.trace_product(noise.rho()).unwrap().re;
            a / (a - b)
        };
        assert!(approx(tol(&raw), tol(&symmetrize(&raw)), 1e-10));
    }

    #[test]
    fn fidelity_bound_values() {
        let w = catalog("WP3_D63").unwrap();
        let pure = dicke_projector(6, 3).unwrap();
        let v = expectation(&w, &pure).unwrap();
        assert!(approx(v, -1.0, 1e-12));
        assert!(approx(fidelity_bound(&w, v).unwrap(), 1.0, 1e-12));
        assert!(approx(fidelity_bound(&w, 0.0).unwrap(), 0.6, 1e-12));
        let d42 = catalog("WP3_D42").unwrap();
        assert!(approx(fidelity_bound(&d42, 0.0).unwrap(), 2.0 / 3.0, 1e-12));
        let wi = catalog("WI2_D63").unwrap();
        assert!(matches!(fidelity_bound(&wi, -1.0), Err(Error::MissingAlpha(_))));
    }

    #[test]
    fn curves_are_ordered() {
        let w = catalog("WP3_D63").unwrap();
        let grid = unit_grid(101);
        for noise in [NoiseModel::white(6), NoiseModel::nonwhite()] {
            let rows = fidelity_curves(&w, &noise, &grid).unwrap();
            assert!(approx(rows[0].fidelity, 1.0, 1e-12));
            assert!(approx(rows[0].bound, 1.0, 1e-9));
            assert!(rows.iter().all(|r| r.bound <= r.fidelity + 1e-10));
        }
        assert!(fidelity_curves(&w, &NoiseModel::white(6), &[1.5]).is_err());
    }

    #[test]
    fn json_round_trip() {
        for name in ["WP3_D42", "WI3_D41", "WP_D41"] {
            let w = catalog(name).unwrap();
            let back = WitnessSpec::from_json(&w.to_json()).unwrap();
            assert_eq!(back.coefficients(), w.coefficients());
            assert_eq!(back.basis(), w.basis());
            assert_eq!(back.alpha(), w.alpha());
            assert!(back.operator().max_abs_diff(w.operator()).unwrap() < 1e-15);
        }
    }

    #[test]
    fn schedule_matches_operator() {
        for name in ["WP3_D42", "WI3_D41", "WP2_D63"] {
            let w = catalog(name).unwrap();
            let s = w.schedule().unwrap();
            let err = s.reconstruct().max_abs_diff(w.operator()).unwrap();
            assert!(err < 1e-9 * w.operator().max_abs().max(1.0), "{name}: {err}");
        }
        let s = catalog("WP3_D63").unwrap().schedule().unwrap();
        assert_eq!(s.settings().len(), 3);
    }
}
