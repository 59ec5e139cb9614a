//! Witness coefficients with the largest noise tolerance in a given span.
//!
//! Minimize `Σ_k c_k Tr(B_k ρ_noise)` subject to `Σ_k c_k Tr(B_k ρ) = −1` and
//! `Σ_k c_k B_k − α W^(P) ⪰ 0`. The matrix inequality is replaced by linear
//! cuts `Σ_k c_k ⟨v|B_k|v⟩ − α ⟨v|W^(P)|v⟩ ≥ 0` at the negative eigenvectors
//! `v` of the current iterate (Kelley's method). Any iterate becomes feasible
//! by adding its eigenvalue deficit to the identity coefficient and
//! renormalizing, which gives the upper end of the model gap.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use num_complex::Complex64 as C64;

use super::{SolverConfig, SolverReport};
use crate::compiler::Coeff;
use crate::error::{Error, Result};
use crate::linalg::{eigen, DenseOperator};
use crate::symmetric::CollectiveAxis;
use crate::witness::{AlphaChoice, BasisOp, NoiseModel, Target, WitnessSpec};

/// Bound on the normalized coefficients and on `α`.
const BOX: f64 = 1e4;

/// Most negative eigenvectors turned into cuts per iteration.
const CUTS_PER_ITER: usize = 16;

/// Input of [`optimize_witness`]. The state to detect is the target of
/// the projector witness.
#[derive(Clone, Debug)]
pub struct WitnessOptimizationProblem {
    pub name: String,
    pub target: Target,
    pub noise: NoiseModel,
    /// Must contain [`BasisOp::Identity`].
    pub basis: Vec<BasisOp>,
}

/// `𝟙` and the powers `J_l^p`, `p ≤ N`, for every axis; even powers only
/// unless `odd_powers`.
pub fn setting_basis(num_qubits: usize, axes: &[CollectiveAxis], odd_powers: bool) -> Vec<BasisOp> {
    let step = if odd_powers { 1 } else { 2 };
    let first = if odd_powers { 1 } else { 2 };
    let mut basis = vec![BasisOp::Identity];
    for axis in axes {
        for p in (first..=num_qubits as u32).step_by(step) {
            basis.push(BasisOp::power(*axis, p));
        }
    }
    basis
}

fn real_dot(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

/// `⟨v|A|v⟩`.
fn quad(a: &DenseOperator, v: &[C64]) -> f64 {
    a.quadratic_form(v).expect("same dimension").re
}

/// Solves the witness program; the returned witness carries the optimal
/// `α`, and its noise tolerance is `1/(1 + optimum)`.
pub fn optimize_witness(
    problem: &WitnessOptimizationProblem,
    config: &SolverConfig,
) -> Result<(WitnessSpec, SolverReport)> {
    let psi = problem.target.state()?;
    let n = psi.num_qubits();
    if problem.noise.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: problem.noise.num_qubits(),
        });
    }
    let id_index = problem
        .basis
        .iter()
        .position(|b| matches!(b, BasisOp::Identity))
        .ok_or_else(|| Error::InvalidArgument("the basis must contain the identity".into()))?;
    let rho = DenseOperator::projector(&psi);
    let lambda_sq = psi.schmidt_max_sq();
    let mut wp = rho.scale(-1.0);
    wp.add_identity(lambda_sq);

    // Basis operators scaled to unit spectral norm.
    let mut ops = Vec::with_capacity(problem.basis.len());
    let mut scales = Vec::with_capacity(problem.basis.len());
    for b in &problem.basis {
        let op = b.realize(n, &psi)?;
        let vals = op.eigenvalues()?;
        let s = vals[0].abs().max(vals[vals.len() - 1].abs());
        if s == 0.0 {
            return Err(Error::InvalidArgument(format!("basis operator {b} vanishes")));
        }
        ops.push(op.scale(1.0 / s));
        scales.push(s);
    }
    check_independent(&ops)?;
    let on_target: Vec<f64> = ops.iter().map(|b| b.trace_product(&rho).map(|z| z.re)).collect::<Result<_>>()?;
    let on_noise: Vec<f64> = ops
        .iter()
        .map(|b| b.trace_product(problem.noise.rho()).map(|z| z.re))
        .collect::<Result<_>>()?;

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Variable> = on_noise.iter().map(|&b| lp.add_var(b, (-BOX, BOX))).collect();
    let alpha_var = lp.add_var(0.0, (0.0, BOX));
    let normalization: Vec<(Variable, f64)> = vars.iter().copied().zip(on_target.iter().copied()).collect();
    lp.add_constraint(normalization.as_slice(), ComparisonOp::Eq, -1.0);
    let mut solution = lp
        .solve()
        .map_err(lp_error)?
        .into_solution()
        .map_err(|_| Error::Infeasible("the linear program was interrupted".into()))?;

    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    let mut lower = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.cut_max_iter {
        iterations += 1;
        lower = solution.objective();
        let x: Vec<f64> = vars.iter().map(|v| solution.var_value(*v)).collect();
        let alpha = solution.var_value(alpha_var);
        let mut m = wp.scale(-alpha);
        for (op, c) in ops.iter().zip(&x) {
            m.add_scaled(*c, op)?;
        }
        let eig = m.eig()?;
        let deficit = (-eig.min_value()).max(0.0);
        if deficit < 1.0 {
            let mut xr: Vec<f64> = x.iter().map(|c| c / (1.0 - deficit)).collect();
            xr[id_index] += deficit / (1.0 - deficit);
            let objective = (lower + deficit) / (1.0 - deficit);
            if best.as_ref().is_none_or(|b| objective < b.2) {
                best = Some((xr, alpha / (1.0 - deficit), objective));
            }
        }
        if let Some((_, _, upper)) = &best {
            if upper - lower <= config.cut_tol {
                converged = true;
                break;
            }
        }
        let cuts: Vec<usize> = (0..eig.dim())
            .take_while(|&k| eig.values[k] < 0.0)
            .take(CUTS_PER_ITER)
            .collect();
        for k in cuts {
            let v = eig.vector(k);
            let mut row: Vec<(Variable, f64)> = vars.iter().zip(&ops).map(|(var, op)| (*var, quad(op, v))).collect();
            row.push((alpha_var, -quad(&wp, v)));
            solution = solution
                .add_constraint(row.as_slice(), ComparisonOp::Ge, 0.0)
                .map_err(lp_error)?
                .into_solution()
                .map_err(|_| Error::Infeasible("the linear program was interrupted".into()))?;
        }
    }
    let (x, alpha, upper) = best.ok_or_else(|| Error::Infeasible("no feasible witness was found in the span".into()))?;
    if alpha <= 1e-12 {
        return Err(Error::Infeasible("no α > 0 admits the matrix inequality in this span".into()));
    }
    if x.iter().any(|c| c.abs() >= 0.999 * BOX) {
        return Err(Error::Infeasible("coefficients reached the search box; the span is degenerate".into()));
    }
    let coefficients: Vec<Coeff> = x.iter().zip(&scales).map(|(c, s)| Coeff::Float(c / s)).collect();
    let witness = WitnessSpec::new(
        problem.name.clone(),
        problem.target.clone(),
        problem.basis.clone(),
        coefficients,
        AlphaChoice::Given(alpha),
    )?;
    let value = witness.operator().trace_product(&rho)?.re;
    let slack = witness.lmi_min_eigenvalue(alpha)?;
    let report = SolverReport {
        method: "cutting-plane",
        optimum: upper,
        gap: (upper - lower).max(0.0),
        primal_residual: (value + 1.0).abs(),
        min_eigenvalue_slack: slack,
        iterations,
        converged,
    };
    Ok((witness, report))
}

fn lp_error(e: microlp::Error) -> Error {
    match e {
        microlp::Error::Infeasible => Error::Infeasible("the normalization cannot be met in this span".into()),
        other => Error::Infeasible(format!("linear program failed: {other}")),
    }
}

/// Rejects bases whose Gram matrix `Tr(B_k B_l)/2^N` is singular.
fn check_independent(ops: &[DenseOperator]) -> Result<()> {
    let k = ops.len();
    let mut gram = vec![C64::new(0.0, 0.0); k * k];
    for i in 0..k {
        for j in 0..=i {
            let g = real_dot(ops[i].as_slice(), ops[j].as_slice()) / ops[i].dim() as f64;
            gram[i * k + j] = C64::new(g, 0.0);
            gram[j * k + i] = C64::new(g, 0.0);
        }
    }
    let d: Vec<f64> = (0..k).map(|i| gram[i * k + i].re.sqrt()).collect();
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] /= d[i] * d[j];
        }
    }
    let min = eigen::eigvalsh(k, &gram)?[0];
    if min < 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "basis operators are linearly dependent (Gram eigenvalue {min:e})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::DickeLabel;
    use crate::witness::noise_tolerance;

    fn problem(n: usize, m: usize, basis: Vec<BasisOp>) -> WitnessOptimizationProblem {
        WitnessOptimizationProblem {
            name: "opt".into(),
            target: Target::Dicke(DickeLabel { num_qubits: n, m }),
            noise: NoiseModel::white(n),
            basis,
        }
    }

    #[test]
    fn projector_span_recovers_projector_witness() {
        let p = problem(4, 2, vec![BasisOp::Identity, BasisOp::Projector]);
        let (w, report) = optimize_witness(&p, &SolverConfig::default()).unwrap();
        assert!(report.converged && report.gap < 1e-6);
        let rho = DenseOperator::projector(w.target_state());
        let tol = noise_tolerance(&w, &NoiseModel::white(4), &rho).unwrap();
        assert!((tol - 0.355_555_6).abs() < 1e-6, "{tol}");
    }

    #[test]
    fn d42_three_settings() {
        let basis = setting_basis(4, &[CollectiveAxis::X, CollectiveAxis::Y, CollectiveAxis::Z], false);
        let (w, report) = optimize_witness(&problem(4, 2, basis), &SolverConfig::default()).unwrap();
        assert!(report.converged, "{report:?}");
        assert!(report.primal_residual < 1e-9);
        assert!(report.min_eigenvalue_slack >= -1e-9);
        let rho = DenseOperator::projector(w.target_state());
        let tol = noise_tolerance(&w, &NoiseModel::white(4), &rho).unwrap();
        // The catalog witness is feasible for this program.
        assert!(tol >= 0.2759 - 1e-3, "{tol}");
    }

    #[test]
    fn dependent_basis_rejected() {
        let basis = vec![BasisOp::Identity, BasisOp::power(CollectiveAxis::Z, 2), BasisOp::power(CollectiveAxis::Z, 2)];
        assert!(optimize_witness(&problem(3, 1, basis), &SolverConfig::default()).is_err());
        let no_identity = vec![BasisOp::Projector];
        assert!(optimize_witness(&problem(3, 1, no_identity), &SolverConfig::default()).is_err());
    }

    #[test]
    fn basis_builder() {
        let b = setting_basis(6, &[CollectiveAxis::X, CollectiveAxis::Y], false);
        assert_eq!(b.len(), 7);
        assert_eq!(setting_basis(3, &[CollectiveAxis::Z], true).len(), 4);
    }
}
