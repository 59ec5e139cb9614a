//! Fast evaluation of `λ_min(W − αW^(P))` as a function of `α`.
//!
//! With `W = V diag(w) V†` and `z = V†|Ψ⟩`,
//! `W − αW^(P) = V (diag(w) + α z z†) V† − αλ²𝟙`, a rank-one update whose
//! smallest eigenvalue solves the secular equation
//! `1 + α Σ_i |z_i|²/(w_i − μ) = 0` below the second coupled pole.

use crate::error::Result;
use crate::linalg::{DenseOperator, StateVector};

use super::LMI_TOL;

/// Weight below which an eigenvector is treated as orthogonal to `Ψ`.
const WEIGHT_FLOOR: f64 = 1e-14;

/// Spectrum of `W` in the form needed for the rank-one update.
#[derive(Clone, Debug)]
pub struct LmiSpectrum {
    /// Smallest eigenvalue of `W` left unchanged by the update.
    free_min: f64,
    /// Distinct eigenvalues with nonzero overlap and the overlap weights.
    poles: Vec<(f64, f64)>,
}

impl LmiSpectrum {
    pub fn new(w: &DenseOperator, psi: &StateVector) -> Result<Self> {
        let eig = w.eig()?;
        let scale = eig.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let cluster_tol = 1e-10 * scale;
        let mut free_min = f64::INFINITY;
        let mut poles: Vec<(f64, f64)> = Vec::new();
        let mut k = 0;
        while k < eig.values.len() {
            let start = k;
            let mut weight = 0.0;
            while k < eig.values.len() && eig.values[k] - eig.values[start] <= cluster_tol {
                let v = eig.vector(k);
                let overlap: num_complex::Complex64 =
                    v.iter().zip(psi.amplitudes()).map(|(a, b)| a.conj() * b).sum();
                weight += overlap.norm_sqr();
                k += 1;
            }
            let value = eig.values[start];
            // A rank-one update moves at most one direction of a cluster.
            if k - start > 1 || weight < WEIGHT_FLOOR {
                free_min = free_min.min(value);
            }
            if weight >= WEIGHT_FLOOR {
                poles.push((value, weight));
            }
        }
        Ok(Self { free_min, poles })
    }

    /// `λ_min(W + α|Ψ⟩⟨Ψ|)` for `α ≥ 0`.
    pub fn updated_min(&self, alpha: f64) -> f64 {
        let Some(&(w0, _)) = self.poles.first() else {
            return self.free_min;
        };
        if alpha <= 0.0 {
            return self.free_min.min(w0);
        }
        let total: f64 = self.poles.iter().map(|p| p.1).sum();
        let mut lo = w0;
        let mut hi = w0 + alpha * total;
        if let Some(&(w1, _)) = self.poles.get(1) {
            hi = hi.min(w1);
        }
        let secular = |mu: f64| 1.0 + alpha * self.poles.iter().map(|&(w, z)| z / (w - mu)).sum::<f64>();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if secular(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.free_min.min(0.5 * (lo + hi))
    }

    /// `λ_min(W − α(λ²𝟙 − |Ψ⟩⟨Ψ|))`.
    pub fn lmi_min(&self, alpha: f64, lambda_sq: f64) -> f64 {
        self.updated_min(alpha) - alpha * lambda_sq
    }

    /// Largest `α ∈ (0, alpha_max]` with `λ_min(W − αW^(P)) ≥ −LMI_TOL`.
    ///
    /// The objective is concave in `α`, so a golden-section search locates
    /// its maximum and a bisection walks out to the upper end of the
    /// feasible interval.
    pub fn largest_alpha(&self, lambda_sq: f64, alpha_max: f64) -> Option<f64> {
        let g = |a: f64| self.lmi_min(a, lambda_sq);
        let ok = |a: f64| g(a) >= -LMI_TOL;
        if ok(alpha_max) {
            return Some(alpha_max);
        }
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (0.0, alpha_max);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut gc, mut gd) = (g(c), g(d));
        while b - a > 1e-10 * alpha_max {
            if gc >= gd {
                b = d;
                d = c;
                gd = gc;
                c = b - inv_phi * (b - a);
                gc = g(c);
            } else {
                a = c;
                c = d;
                gc = gd;
                d = a + inv_phi * (b - a);
                gd = g(d);
            }
        }
        let peak = if gc >= gd { c } else { d };
        if !ok(peak) || peak <= 0.0 {
            return None;
        }
        let (mut lo, mut hi) = (peak, alpha_max);
        while hi - lo > 1e-12 * alpha_max {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::dicke;
    use crate::witness::catalog;

    #[test]
    fn secular_matches_dense() {
        let w = catalog("WP3_D42").unwrap();
        let s = LmiSpectrum::new(w.operator(), w.target_state()).unwrap();
        for alpha in [0.0, 0.5, 1.7, 3.0, 4.2, 9.0] {
            let dense = w.lmi_min_eigenvalue(alpha).unwrap();
            assert!((s.lmi_min(alpha, w.lambda_sq()) - dense).abs() < 1e-10, "alpha {alpha}");
        }
    }

    #[test]
    fn degenerate_clusters() {
        // W = 𝟙 on two qubits: every eigenvalue is degenerate, so the
        // minimum never moves.
        let psi = dicke(2, 1).unwrap();
        let s = LmiSpectrum::new(&DenseOperator::identity(2), &psi).unwrap();
        assert_eq!(s.updated_min(5.0), 1.0);
    }

    #[test]
    fn largest_alpha_for_known_witnesses() {
        let w = catalog("WP3_D42").unwrap();
        let s = LmiSpectrum::new(w.operator(), w.target_state()).unwrap();
        let a = s.largest_alpha(w.lambda_sq(), 10.0).unwrap();
        assert!(a >= 3.0 - 1e-9);
        assert!(w.lmi_min_eigenvalue(a).unwrap() >= -1e-8);
        assert!(w.lmi_min_eigenvalue(a * 1.01).unwrap() < 0.0);
    }
}
