//! Maximum of `Tr(Mρ)` over states with a positive partial transpose.
//!
//! The program is solved by a log-barrier path-following method on
//! `t·Tr(Mρ) + log det ρ + log det ρ^{T_A}` with `Tr ρ = 1`, using damped
//! Newton steps. The state is restricted to the operators that share the
//! symmetries of the problem: permutations inside each side when `M` is
//! permutation invariant, rotations about `z` when `M` commutes with `J_z`,
//! and complex conjugation when `M` is real. Averaging any feasible state
//! over these symmetries keeps it feasible and leaves the objective
//! unchanged, so the restricted optimum is the full optimum.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{SolverConfig, SolverReport};
use crate::compiler::class_operator;
use crate::error::{Error, Result};
use crate::linalg::eigen::{cholesky, cholesky_logdet, cholesky_real, cholesky_solve_real, eigvalsh};
use crate::linalg::operator::check_qubits;
use crate::linalg::{bipartition_masks, qubit_mask, DenseOperator, Pauli};
use crate::symmetric::{is_permutation_invariant, permute_qubits};

/// Largest register handled.
const MAX_QUBITS: usize = 8;

/// Largest register handled for observables without permutation symmetry.
const MAX_QUBITS_GENERIC: usize = 5;

const NEWTON_MAX: usize = 200;

/// `max Tr(Mρ)` over states that are PPT across `bipartition | rest`.
#[derive(Clone, Debug)]
pub struct PptProblem {
    pub observable: DenseOperator,
    /// Qubits on one side of the cut.
    pub bipartition: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PptSolution {
    /// `Tr(Mρ)` at the returned state.
    pub value: f64,
    /// Upper bound on the PPT maximum from the central-path gap.
    pub upper_bound: f64,
    pub bipartition: Vec<usize>,
    #[serde(skip)]
    pub rho: DenseOperator,
    pub report: SolverReport,
}

struct Symmetries {
    real: bool,
    u1: bool,
}

fn detect_symmetries(m: &DenseOperator) -> Symmetries {
    let scale = m.max_abs().max(1.0);
    let d = m.dim();
    let data = m.as_slice();
    let real = data.iter().all(|z| z.im.abs() <= 1e-12 * scale);
    let u1 = (0..d).all(|r| {
        (0..d).all(|c| (r.count_ones() == c.count_ones()) || data[r * d + c].norm() <= 1e-12 * scale)
    });
    Symmetries { real, u1 }
}

/// Zeroes the entries between different excitation numbers, i.e. averages
/// over rotations about `z`.
fn twirl_u1(a: &DenseOperator) -> DenseOperator {
    let d = a.dim();
    let mut out = a.clone();
    let data = out.as_mut_slice();
    for r in 0..d {
        for c in 0..d {
            if r.count_ones() != c.count_ones() {
                data[r * d + c] = C64::new(0.0, 0.0);
            }
        }
    }
    out
}

fn hs_real(a: &DenseOperator, b: &DenseOperator) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Orthonormal Hermitian basis of the span of `ops` after the `z` twirl.
/// Operators in different groups must stay orthogonal after twirling.
fn orthonormal_span(ops: Vec<DenseOperator>, u1: bool, out: &mut Vec<DenseOperator>) -> Result<()> {
    let ops: Vec<DenseOperator> = if u1 { ops.iter().map(twirl_u1).collect() } else { ops };
    let k = ops.len();
    let mut gram = vec![C64::new(0.0, 0.0); k * k];
    for i in 0..k {
        for j in 0..=i {
            let g = hs_real(&ops[i], &ops[j]);
            gram[i * k + j] = C64::new(g, 0.0);
            gram[j * k + i] = C64::new(g, 0.0);
        }
    }
    let scale = (0..k).map(|i| gram[i * k + i].re).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(());
    }
    let eig = crate::linalg::eigen::eigh(k, &gram)?;
    for (idx, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 1e-10 * scale {
            continue;
        }
        let v = eig.vector(idx);
        let mut op = DenseOperator::zeros(ops[0].num_qubits());
        for (c, o) in v.iter().zip(&ops) {
            op.add_scaled(c.re / lambda.sqrt(), o)?;
        }
        out.push(op);
    }
    Ok(())
}

/// `((x + y count, z count), y count, operator)`.
type SideClass = ((usize, usize), usize, DenseOperator);

/// Class operators on `s` qubits, with their `y` counts.
fn side_classes(s: usize) -> Result<Vec<SideClass>> {
    let mut out = Vec::new();
    for i in 0..=s {
        for j in 0..=s - i {
            for m in 0..=s - i - j {
                out.push(((i + j, m), j, class_operator(s, i, j, m)?));
            }
        }
    }
    Ok(out)
}

/// Traceless basis for a permutation-invariant observable with side `A`
/// made of the first `k` qubits.
fn invariant_basis(n: usize, k: usize, sym: &Symmetries) -> Result<Vec<DenseOperator>> {
    let a = side_classes(k)?;
    let b = side_classes(n - k)?;
    let mut keys: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for (ka, _, _) in &a {
        for (kb, _, _) in &b {
            if !keys.contains(&(*ka, *kb)) {
                keys.push((*ka, *kb));
            }
        }
    }
    let mut basis = Vec::new();
    for key in keys {
        if key == ((0, 0), (0, 0)) {
            continue;
        }
        let mut group = Vec::new();
        for (ka, ja, opa) in a.iter().filter(|c| c.0 == key.0) {
            for (_, jb, opb) in b.iter().filter(|c| c.0 == key.1) {
                let _ = ka;
                if sym.real && (ja + jb) % 2 == 1 {
                    continue;
                }
                group.push(opa.kron(opb));
            }
        }
        if !group.is_empty() {
            orthonormal_span(group, sym.u1, &mut basis)?;
        }
    }
    Ok(basis)
}

/// Traceless basis of Pauli strings, grouped by the positions of transverse
/// and `z` factors.
fn pauli_basis(n: usize, sym: &Symmetries) -> Result<Vec<DenseOperator>> {
    let mut basis = Vec::new();
    for transverse in 0..1usize << n {
        for zs in 0..1usize << n {
            if transverse & zs != 0 || (transverse | zs) == 0 {
                continue;
            }
            let t = transverse.count_ones();
            let mut group = Vec::new();
            for ys in 0..1usize << t {
                if sym.real && ys.count_ones() % 2 == 1 {
                    continue;
                }
                let mut op = DenseOperator::identity(0);
                let mut tcount = 0;
                for q in 0..n {
                    let bit = 1 << (n - 1 - q);
                    let p = if transverse & bit != 0 {
                        tcount += 1;
                        if ys >> (tcount - 1) & 1 == 1 {
                            Pauli::Y
                        } else {
                            Pauli::X
                        }
                    } else if zs & bit != 0 {
                        Pauli::Z
                    } else {
                        Pauli::I
                    };
                    op = op.kron(&DenseOperator::single_qubit(&p.matrix()));
                }
                group.push(op);
            }
            if !group.is_empty() {
                orthonormal_span(group, sym.u1, &mut basis)?;
            }
        }
    }
    Ok(basis)
}

/// `L^{-1} B` for lower triangular `L`.
fn forward_solve(d: usize, l: &[C64], b: &[C64]) -> Vec<C64> {
    let mut y = b.to_vec();
    for i in 0..d {
        for k in 0..i {
            let lik = l[i * d + k];
            if lik == C64::new(0.0, 0.0) {
                continue;
            }
            let (head, tail) = y.split_at_mut(i * d);
            let row_k = &head[k * d..k * d + d];
            for (yi, yk) in tail[..d].iter_mut().zip(row_k) {
                *yi -= lik * yk;
            }
        }
        let inv = 1.0 / l[i * d + i].re;
        y[i * d..i * d + d].iter_mut().for_each(|v| *v *= inv);
    }
    y
}

/// `L^{-1} A L^{-†}` for Hermitian `A`.
fn whiten(d: usize, l: &[C64], a: &[C64]) -> Vec<C64> {
    let y = forward_solve(d, l, a);
    let mut yt = vec![C64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            yt[c * d + r] = y[r * d + c].conj();
        }
    }
    forward_solve(d, l, &yt)
}

struct Barrier<'a> {
    d: usize,
    objective: Vec<f64>,
    basis: &'a [DenseOperator],
    transposed: Vec<DenseOperator>,
}

impl Barrier<'_> {
    fn assemble(&self, x: &[f64], ops: &[DenseOperator]) -> Vec<C64> {
        let d = self.d;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for k in 0..d {
            out[k * d + k] = C64::new(1.0 / d as f64, 0.0);
        }
        for (xi, op) in x.iter().zip(ops) {
            if *xi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(op.as_slice()) {
                *o += a * *xi;
            }
        }
        out
    }

    fn linear(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.objective).map(|(a, b)| a * b).sum()
    }

    /// Cholesky factors of `ρ(x)` and `ρ(x)^{T_A}`, if both are positive
    /// definite.
    fn factors(&self, x: &[f64]) -> Option<(Vec<C64>, Vec<C64>)> {
        let l1 = cholesky(self.d, &self.assemble(x, self.basis)).ok()?;
        let l2 = cholesky(self.d, &self.assemble(x, &self.transposed)).ok()?;
        Some((l1, l2))
    }

    /// `log det ρ + log det ρ^{T_A}`; the linear part is kept apart so that
    /// line searches compare it as a difference.
    fn logdets(&self, x: &[f64]) -> Option<f64> {
        let (l1, l2) = self.factors(x)?;
        Some(cholesky_logdet(self.d, &l1) + cholesky_logdet(self.d, &l2))
    }

    /// Gradient and negated Hessian of the barrier objective.
    fn derivatives(&self, t: f64, l1: &[C64], l2: &[C64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.basis.len();
        let d = self.d;
        let mut grad: Vec<f64> = self.objective.iter().map(|m| t * m).collect();
        let mut hess = vec![0.0; n * n];
        for (l, ops) in [(l1, self.basis), (l2, self.transposed.as_slice())] {
            let xs: Vec<Vec<C64>> = ops.iter().map(|a| whiten(d, l, a.as_slice())).collect();
            for i in 0..n {
                grad[i] += (0..d).map(|k| xs[i][k * d + k].re).sum::<f64>();
                for j in 0..=i {
                    let h: f64 = xs[i].iter().zip(&xs[j]).map(|(a, b)| (a.conj() * b).re).sum();
                    hess[i * n + j] += h;
                    if i != j {
                        hess[j * n + i] += h;
                    }
                }
            }
        }
        (grad, hess)
    }
}

/// Solves `H dx = g` for positive definite `H` after diagonal scaling.
fn newton_direction(n: usize, hess: &[f64], grad: &[f64]) -> Option<Vec<f64>> {
    let s: Vec<f64> = (0..n).map(|i| 1.0 / hess[i * n + i].max(f64::MIN_POSITIVE).sqrt()).collect();
    let mut h: Vec<f64> = (0..n * n).map(|k| hess[k] * s[k / n] * s[k % n]).collect();
    let g: Vec<f64> = grad.iter().zip(&s).map(|(a, b)| a * b).collect();
    let mut ridge = 0.0;
    for _ in 0..8 {
        if let Some(l) = cholesky_real(n, &h) {
            let y = cholesky_solve_real(n, &l, &g);
            return Some(y.iter().zip(&s).map(|(a, b)| a * b).collect());
        }
        ridge = if ridge == 0.0 { 1e-14 } else { ridge * 100.0 };
        for i in 0..n {
            h[i * n + i] = 1.0 + ridge;
        }
    }
    None
}

struct Reduced {
    value: f64,
    upper_bound: f64,
    rho: DenseOperator,
    iterations: usize,
    converged: bool,
}

fn solve_reduced(m: &DenseOperator, basis: &[DenseOperator], mask: usize, config: &SolverConfig) -> Result<Reduced> {
    let d = m.dim();
    let objective: Vec<f64> = basis.iter().map(|a| hs_real(m, a)).collect();
    let transposed: Vec<DenseOperator> = basis.iter().map(|a| a.partial_transpose_mask(mask)).collect();
    let barrier = Barrier {
        d,
        objective,
        basis,
        transposed,
    };
    let n = basis.len();
    let mut x = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = true;
    let mut mu = 1.0;
    let offset = m.trace().re / d as f64;
    loop {
        let t = 1.0 / mu;
        let mut centered = false;
        for _ in 0..NEWTON_MAX {
            iterations += 1;
            let (l1, l2) = barrier
                .factors(&x)
                .ok_or_else(|| Error::InvalidDensityMatrix("barrier iterate left the feasible set".into()))?;
            let (grad, hess) = barrier.derivatives(t, &l1, &l2);
            let Some(dx) = newton_direction(n, &hess, &grad) else {
                break;
            };
            let decrement: f64 = grad.iter().zip(&dx).map(|(a, b)| a * b).sum();
            if decrement.abs() < 1e-10 {
                centered = true;
                break;
            }
            let ld0 = cholesky_logdet(d, &l1) + cholesky_logdet(d, &l2);
            let slope = t * barrier.linear(&dx);
            let mut step = if decrement > 0.25 { 1.0 / (1.0 + decrement.sqrt()) } else { 1.0 };
            let mut moved = false;
            for _ in 0..60 {
                let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + step * b).collect();
                if let Some(ld) = barrier.logdets(&trial) {
                    if step * slope + (ld - ld0) >= 0.25 * step * decrement {
                        x = trial;
                        moved = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !moved {
                // Roundoff floor: the iterate is as central as it gets.
                centered = decrement < 1e-6;
                break;
            }
        }
        converged &= centered;
        if mu <= config.barrier_tol * (1.0 + 1e-12) {
            break;
        }
        mu = (mu / 10.0).max(config.barrier_tol);
    }
    let value = offset + barrier.linear(&x);
    let rho = DenseOperator::new(m.num_qubits(), barrier.assemble(&x, basis))?;
    Ok(Reduced {
        value,
        upper_bound: value + 2.0 * d as f64 * mu,
        rho,
        iterations,
        converged,
    })
}

fn solve(m: &DenseOperator, bipartition: &[usize], config: &SolverConfig) -> Result<PptSolution> {
    let n = m.num_qubits();
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "PPT maximization supports 2 ≤ N ≤ {MAX_QUBITS}, got {n}"
        )));
    }
    let mask = check_qubits(n, bipartition)?;
    let k = bipartition.len();
    if k == 0 || k == n || mask.count_ones() as usize != k {
        return Err(Error::InvalidArgument("the bipartition must be a proper nonempty subset of distinct qubits".into()));
    }
    let m = m.to_hermitian()?;
    let sym = detect_symmetries(&m);
    let (reduced, rho) = if is_permutation_invariant(&m) {
        // Solve with the first k qubits on side A, then relabel.
        let first: usize = (0..k).map(|q| qubit_mask(n, q)).sum();
        let basis = invariant_basis(n, k, &sym)?;
        let r = solve_reduced(&m, &basis, first, config)?;
        let rest: Vec<usize> = (0..n).filter(|q| !bipartition.contains(q)).collect();
        let perm: Vec<usize> = bipartition.iter().chain(&rest).copied().collect();
        let rho = permute_qubits(&r.rho, &perm)?;
        (r, rho)
    } else {
        if n > MAX_QUBITS_GENERIC {
            return Err(Error::InvalidArgument(format!(
                "observables without permutation symmetry are limited to N ≤ {MAX_QUBITS_GENERIC}"
            )));
        }
        let basis = pauli_basis(n, &sym)?;
        let r = solve_reduced(&m, &basis, mask, config)?;
        let rho = r.rho.clone();
        (r, rho)
    };
    let pt = rho.partial_transpose_mask(mask);
    let slack = eigvalsh(rho.dim(), rho.as_slice())?[0].min(eigvalsh(pt.dim(), pt.as_slice())?[0]);
    let trace = rho.trace().re;
    let report = SolverReport {
        method: "log-barrier",
        optimum: reduced.value,
        gap: reduced.upper_bound - reduced.value,
        primal_residual: (trace - 1.0).abs(),
        min_eigenvalue_slack: slack,
        iterations: reduced.iterations,
        converged: reduced.converged && slack >= -1e-8,
    };
    Ok(PptSolution {
        value: reduced.value,
        upper_bound: reduced.upper_bound,
        bipartition: bipartition.to_vec(),
        rho,
        report,
    })
}

/// Maximizes `Tr(Mρ)` over states PPT across the given cut.
pub fn max_ppt(problem: &PptProblem, config: &SolverConfig) -> Result<PptSolution> {
    let sol = solve(&problem.observable, &problem.bipartition, config)?;
    if !sol.report.converged {
        return Err(Error::NoConvergence {
            method: "log-barrier",
            iterations: sol.report.iterations,
            residual: sol.report.gap,
        });
    }
    Ok(sol)
}

/// Maximum over every bipartition; for permutation-invariant `M` only the
/// cuts `{0..k} | rest` with `k ≤ N/2` are solved. Ties keep the first cut.
pub fn max_ppt_all(m: &DenseOperator, config: &SolverConfig) -> Result<PptSolution> {
    let n = m.num_qubits();
    let cuts: Vec<Vec<usize>> = if is_permutation_invariant(m) {
        (1..=n / 2).map(|k| (0..k).collect()).collect()
    } else {
        bipartition_masks(n)
            .map(|mask| (0..n).filter(|&q| mask & qubit_mask(n, q) != 0).collect())
            .collect()
    };
    let mut best: Option<PptSolution> = None;
    for cut in cuts {
        let sol = max_ppt(
            &PptProblem {
                observable: m.clone(),
                bipartition: cut,
            },
            config,
        )?;
        if best.as_ref().is_none_or(|b| sol.value > b.value + 1e-12) {
            best = Some(sol);
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("PPT maximization needs at least two qubits".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::{collective_power, dicke_projector, CollectiveAxis};

    fn jxy2(n: usize) -> DenseOperator {
        &collective_power(n, CollectiveAxis::X, 2, 0.0).unwrap() + &collective_power(n, CollectiveAxis::Y, 2, 0.0).unwrap()
    }

    #[test]
    fn identity_gives_one() {
        let p = PptProblem {
            observable: DenseOperator::identity(3),
            bipartition: vec![1],
        };
        let s = max_ppt(&p, &SolverConfig::default()).unwrap();
        assert!((s.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn projector_overlap_bound() {
        // PPT states across 1|3 overlap |D_4^(1)⟩ by at most 3/4.
        let p = PptProblem {
            observable: dicke_projector(4, 1).unwrap(),
            bipartition: vec![2],
        };
        let s = max_ppt(&p, &SolverConfig::default()).unwrap();
        assert!((s.value - 0.75).abs() < 1e-6, "{}", s.value);
        assert!(s.report.min_eigenvalue_slack >= -1e-8);
        let pt = s.rho.partial_transpose(&[2]).unwrap();
        assert!(pt.min_eigenvalue().unwrap() >= -1e-8);
    }

    #[test]
    fn non_invariant_observable() {
        // Singlet overlap on qubits 0,1 of three: PPT across {0} gives 1/2.
        let mut a = vec![C64::new(0.0, 0.0); 16];
        let s = 0.5f64;
        for (r, c, v) in [(1, 1, s), (2, 2, s), (1, 2, -s), (2, 1, -s)] {
            a[r * 4 + c] = C64::new(v, 0.0);
        }
        let singlet = DenseOperator::new(2, a).unwrap();
        let m = singlet.kron(&DenseOperator::identity(1));
        let sol = max_ppt(
            &PptProblem {
                observable: m,
                bipartition: vec![0],
            },
            &SolverConfig::default(),
        )
        .unwrap();
        assert!((sol.value - 0.5).abs() < 1e-6, "{}", sol.value);
    }

    #[test]
    fn collective_moment_small() {
        // For N = 2 the PPT maximum of Jx² + Jy² is attained by separable
        // states: 1 + max ⟨σxσx + σyσy⟩/2 = 1.5.
        let s = max_ppt_all(&jxy2(2), &SolverConfig::default()).unwrap();
        assert!((s.value - 1.5).abs() < 1e-6, "{}", s.value);
    }
}
