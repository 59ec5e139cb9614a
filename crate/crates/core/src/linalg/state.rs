//! Pure states of `N` qubits.

use num_complex::Complex64 as C64;

use super::eigen;
use super::operator::qubit_mask;
use crate::error::{Error, Result};

/// Allowed deviation of `‖ψ‖` from one.
pub const NORM_TOL: f64 = 1e-12;

/// A normalized amplitude vector of length `2^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Wraps `amplitudes`, which must have unit norm.
    pub fn new(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(num_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Self::new(num_qubits, amplitudes)
    }

    /// Computational basis state with the given index.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut a = vec![C64::new(0.0, 0.0); dim];
        a[index] = C64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes: a,
        })
    }

    /// `|a_0⟩ ⊗ |a_1⟩ ⊗ …`, each factor normalized on the way in.
    pub fn product(factors: &[[C64; 2]]) -> Result<Self> {
        let mut amps = vec![C64::new(1.0, 0.0)];
        for f in factors {
            let n = (f[0].norm_sqr() + f[1].norm_sqr()).sqrt();
            if n == 0.0 {
                return Err(Error::NotNormalized { norm: 0.0 });
            }
            amps = amps
                .iter()
                .flat_map(|a| [a * f[0] / n, a * f[1] / n])
                .collect();
        }
        Self::normalized(factors.len(), amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies the single-qubit unitary `u` to qubit `k`.
    pub fn apply_local(&self, k: usize, u: &[[C64; 2]; 2]) -> Result<Self> {
        if k >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: k,
                num_qubits: self.num_qubits,
            });
        }
        let bit = qubit_mask(self.num_qubits, k);
        let mut out = self.amplitudes.clone();
        for i0 in (0..self.dim()).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
            out[i0] = u[0][0] * a0 + u[0][1] * a1;
            out[i1] = u[1][0] * a0 + u[1][1] * a1;
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            amplitudes: out,
        })
    }

    /// Largest squared singular value of the amplitude matrix reshaped so
    /// that the qubits in `mask` index the columns.
    pub fn schmidt_max_sq_across(&self, mask: usize) -> f64 {
        let n = self.num_qubits;
        let a_qubits: Vec<usize> = (0..n).filter(|&q| mask & qubit_mask(n, q) == 0).collect();
        let b_qubits: Vec<usize> = (0..n).filter(|&q| mask & qubit_mask(n, q) != 0).collect();
        if a_qubits.is_empty() || b_qubits.is_empty() {
            return 1.0;
        }
        let split = |idx: usize, qs: &[usize]| -> usize {
            qs.iter()
                .fold(0, |acc, &q| (acc << 1) | usize::from(idx & qubit_mask(n, q) != 0))
        };
        let (da, db) = (1usize << a_qubits.len(), 1usize << b_qubits.len());
        let mut m = vec![C64::new(0.0, 0.0); da * db];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            m[split(idx, &a_qubits) * db + split(idx, &b_qubits)] = *amp;
        }
        // Gram matrix of the smaller side.
        let (small, big, rows_small) = if da <= db { (da, db, true) } else { (db, da, false) };
        let at = |s: usize, b: usize| if rows_small { m[s * db + b] } else { m[b * db + s] };
        let mut g = vec![C64::new(0.0, 0.0); small * small];
        for i in 0..small {
            for j in 0..=i {
                let v: C64 = (0..big).map(|b| at(i, b) * at(j, b).conj()).sum();
                g[i * small + j] = v;
                g[j * small + i] = v.conj();
            }
        }
        let vals = eigen::eigvalsh(small, &g).expect("Gram matrices are small and Hermitian");
        vals[small - 1]
    }

    /// Maximum squared Schmidt coefficient over all `2^{N−1} − 1` bipartitions.
    pub fn schmidt_max_sq(&self) -> f64 {
        bipartition_masks(self.num_qubits)
            .map(|mask| self.schmidt_max_sq_across(mask))
            .fold(0.0, f64::max)
            .min(1.0)
    }
}

/// Masks of the nontrivial bipartitions; each mask marks the side that does
/// not contain qubit 0, so every unordered cut appears once.
pub fn bipartition_masks(num_qubits: usize) -> impl Iterator<Item = usize> {
    let rest = if num_qubits == 0 { 0 } else { num_qubits - 1 };
    1..(1usize << rest)
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
