//! Heuristic maxima of `⟨M⟩` over pure product states.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::linalg::eigen::eigh;
use crate::linalg::operator::check_qubits;
use crate::linalg::{bipartition_masks, qubit_mask, DenseOperator, StateVector};
use crate::symmetric::is_permutation_invariant;

/// Largest register handled by [`max_bisep_all`].
const MAX_QUBITS: usize = 8;

/// Best product state found across one cut.
#[derive(Clone, Debug, Serialize)]
pub struct BisepMax {
    pub value: f64,
    /// Qubits on the side of the cut that does not contain qubit 0.
    pub side: Vec<usize>,
    #[serde(skip)]
    pub state: StateVector,
    /// Objective after each sweep of the best restart.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

fn haar_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Full-register index of `(a, b)` for every pair of subsystem indices.
struct Split {
    da: usize,
    db: usize,
    index: Vec<usize>,
}

impl Split {
    fn new(n: usize, side_mask: usize) -> Self {
        let a_bits: Vec<usize> = (0..n).map(|q| qubit_mask(n, q)).filter(|b| b & side_mask == 0).collect();
        let b_bits: Vec<usize> = (0..n).map(|q| qubit_mask(n, q)).filter(|b| b & side_mask != 0).collect();
        // Bits are listed from the most significant qubit down.
        let spread = |bits: &[usize], k: usize| {
            bits.iter()
                .enumerate()
                .filter(|(i, _)| k >> (bits.len() - 1 - i) & 1 == 1)
                .map(|(_, b)| b)
                .sum::<usize>()
        };
        let (da, db) = (1 << a_bits.len(), 1 << b_bits.len());
        let mut index = vec![0; da * db];
        for a in 0..da {
            for b in 0..db {
                index[a * db + b] = spread(&a_bits, a) | spread(&b_bits, b);
            }
        }
        Self { da, db, index }
    }

    /// `⟨·|⊗⟨b| M |·⟩⊗|b⟩` when `on_a`, otherwise the contraction with `a`.
    fn contract(&self, m: &DenseOperator, fixed: &[C64], on_a: bool) -> Vec<C64> {
        let d = m.dim();
        let data = m.as_slice();
        let (keep, other) = if on_a { (self.da, self.db) } else { (self.db, self.da) };
        let idx = |k: usize, o: usize| {
            if on_a {
                self.index[k * self.db + o]
            } else {
                self.index[o * self.db + k]
            }
        };
        let mut out = vec![C64::new(0.0, 0.0); keep * keep];
        for r in 0..keep {
            for c in 0..keep {
                let mut acc = C64::new(0.0, 0.0);
                for o1 in 0..other {
                    let row = idx(r, o1) * d;
                    let f1 = fixed[o1].conj();
                    for o2 in 0..other {
                        acc += f1 * data[row + idx(c, o2)] * fixed[o2];
                    }
                }
                out[r * keep + c] = acc;
            }
        }
        out
    }

    fn product(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.da * self.db];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[self.index[i * self.db + j]] = x * y;
            }
        }
        out
    }
}

fn top_eigenvector(dim: usize, a: &[C64]) -> Result<(f64, Vec<C64>)> {
    let eig = eigh(dim, a)?;
    Ok((eig.max_value(), eig.vector(dim - 1).to_vec()))
}

/// One seesaw run from `b`; returns the objective after each sweep and
/// the final factors.
fn run(m: &DenseOperator, split: &Split, mut b: Vec<C64>, config: &SolverConfig) -> Result<(Vec<f64>, Vec<C64>, Vec<C64>)> {
    let mut trace = Vec::new();
    let mut a = Vec::new();
    for _ in 0..config.seesaw_max_iter {
        let (_, va) = top_eigenvector(split.da, &split.contract(m, &b, true))?;
        a = va;
        let (value, vb) = top_eigenvector(split.db, &split.contract(m, &a, false))?;
        b = vb;
        let done = trace.last().is_some_and(|&prev: &f64| value - prev < config.seesaw_tol);
        trace.push(value);
        if done {
            break;
        }
    }
    Ok((trace, a, b))
}

/// Best `⟨a|⟨b| M |a⟩|b⟩` found by alternating principal eigenvectors,
/// where `side` lists the qubits of `b`.
pub fn max_bisep_seesaw(m: &DenseOperator, side: &[usize], config: &SolverConfig) -> Result<BisepMax> {
    let m = m.to_hermitian()?;
    let n = m.num_qubits();
    let mask = check_qubits(n, side)?;
    if side.is_empty() || side.len() >= n || mask.count_ones() as usize != side.len() {
        return Err(Error::InvalidArgument("the bipartition must be a proper nonempty subset of distinct qubits".into()));
    }
    let split = Split::new(n, mask);
    let mut best: Option<BisepMax> = None;
    for restart in 0..config.seesaw_restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(restart as u64));
        let b = haar_vector(split.db, &mut rng);
        let (trace, a, b) = run(&m, &split, b, config)?;
        let value = *trace.last().expect("at least one sweep");
        if best.as_ref().is_none_or(|x| value > x.value) {
            let mut sorted = side.to_vec();
            sorted.sort_unstable();
            best = Some(BisepMax {
                value,
                side: sorted,
                state: StateVector::normalized(n, split.product(&a, &b))?,
                trace,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Best seesaw value over every bipartition. For permutation-invariant `M`
/// one cut per size `1..=N/2` is enough. Ties keep the first cut tried.
pub fn max_bisep_all(m: &DenseOperator, config: &SolverConfig) -> Result<BisepMax> {
    let n = m.num_qubits();
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "biseparable search supports 2 ≤ N ≤ {MAX_QUBITS}, got {n}"
        )));
    }
    let sides: Vec<Vec<usize>> = if is_permutation_invariant(m) {
        (1..=n / 2).map(|k| (n - k..n).collect()).collect()
    } else {
        bipartition_masks(n)
            .map(|mask| (0..n).filter(|&q| mask & qubit_mask(n, q) != 0).collect())
            .collect()
    };
    let mut best: Option<BisepMax> = None;
    for side in sides {
        let r = max_bisep_seesaw(m, &side, config)?;
        if best.as_ref().is_none_or(|b| r.value > b.value + 1e-12) {
            best = Some(r);
        }
    }
    Ok(best.expect("N ≥ 2 has a bipartition"))
}

/// Single-qubit state with Bloch angles `(θ, φ)`.
fn bloch_state(theta: f64, phi: f64) -> [C64; 2] {
    [
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]
}

fn symmetric_value(m: &DenseOperator, theta: f64, phi: f64) -> f64 {
    let n = m.num_qubits();
    let psi = StateVector::product(&vec![bloch_state(theta, phi); n]).expect("unit factors");
    m.expectation(&psi).expect("same dimension").re
}

/// Best `⟨a|^{⊗N} M |a⟩^{⊗N}` over single-qubit `|a⟩`, by compass search on
/// the Bloch angles from `restarts` random points.
pub fn max_symmetric_product(m: &DenseOperator, restarts: usize, tol: f64, seed: u64) -> Result<(f64, [f64; 2])> {
    let m = m.to_hermitian()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
    for _ in 0..restarts.max(1) {
        let v = haar_vector(2, &mut rng);
        let theta = 2.0 * v[0].norm().acos();
        let phi = (v[1] * v[0].conj()).arg();
        let mut x = [theta, phi];
        let mut fx = symmetric_value(&m, x[0], x[1]);
        let mut step = 0.5;
        while step > tol.max(1e-15) {
            let mut improved = false;
            for (dim, sign) in [(0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0)] {
                let mut y = x;
                y[dim] += sign * step;
                let fy = symmetric_value(&m, y[0], y[1]);
                if fy > fx {
                    (x, fx, improved) = (y, fy, true);
                    break;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if fx > best.0 {
            best = (fx, x);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::{collective_power, dicke_projector, CollectiveAxis};

    #[test]
    fn w_state_overlap() {
        let r = max_bisep_all(&dicke_projector(4, 1).unwrap(), &SolverConfig::default()).unwrap();
        assert!((r.value - 0.75).abs() < 1e-9, "{}", r.value);
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn diagonal_observable() {
        let diag = [0.3, -1.0, 2.5, 0.0, 1.0, 0.7, -0.2, 1.1];
        let m = DenseOperator::from_diagonal(3, &diag);
        let r = max_bisep_seesaw(&m, &[1], &SolverConfig::default()).unwrap();
        assert!((r.value - 2.5).abs() < 1e-9);
    }

    #[test]
    fn symmetric_products() {
        let n = 6;
        let jz2 = collective_power(n, CollectiveAxis::Z, 2, 0.0).unwrap();
        let (v, _) = max_symmetric_product(&jz2, 5, 1e-10, 1).unwrap();
        assert!((v - 9.0).abs() < 1e-8);
        let xy = &collective_power(n, CollectiveAxis::X, 2, 0.0).unwrap()
            + &collective_power(n, CollectiveAxis::Y, 2, 0.0).unwrap();
        let (v, _) = max_symmetric_product(&xy, 5, 1e-10, 1).unwrap();
        assert!((v - 10.5).abs() < 1e-8, "{v}");
        let (v, _) = max_symmetric_product(&DenseOperator::identity(3), 2, 1e-8, 0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }
}
