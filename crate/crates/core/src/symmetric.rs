//! Dicke states, collective spin operators and qubit permutations.
//!
//! An excitation is a qubit in `|1⟩`, the `−1` eigenstate of `σ_z`, so
//! `⟨D_N^{(m)}| J_z |D_N^{(m)}⟩ = N/2 − m`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{qubit_mask, rotation_to, DenseOperator, StateVector};

/// Relative tolerance of [`is_permutation_invariant`].
pub const PERMUTATION_TOL: f64 = 1e-10;

/// `N` qubits with `m` excitations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DickeLabel {
    #[serde(rename = "N")]
    pub num_qubits: usize,
    pub m: usize,
}

impl DickeLabel {
    pub fn new(num_qubits: usize, m: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidArgument("a Dicke state needs at least one qubit".into()));
        }
        if m > num_qubits {
            return Err(Error::InvalidArgument(format!(
                "excitation number {m} exceeds qubit count {num_qubits}"
            )));
        }
        Ok(Self { num_qubits, m })
    }

    pub fn state(&self) -> Result<StateVector> {
        dicke(self.num_qubits, self.m)
    }

    /// `⟨J_z⟩` on the state.
    pub fn jz_expectation(&self) -> f64 {
        self.num_qubits as f64 / 2.0 - self.m as f64
    }
}

/// The symmetric Dicke state `|D_N^{(m)}⟩`.
pub fn dicke(num_qubits: usize, m: usize) -> Result<StateVector> {
    DickeLabel::new(num_qubits, m)?;
    let dim = 1usize << num_qubits;
    let count = (0..dim).filter(|i| i.count_ones() as usize == m).count();
    let amp = C64::new(1.0 / (count as f64).sqrt(), 0.0);
    let amps = (0..dim)
        .map(|i| {
            if i.count_ones() as usize == m {
                amp
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    StateVector::new(num_qubits, amps)
}

/// `|D_N^{(m)}⟩⟨D_N^{(m)}|`.
pub fn dicke_projector(num_qubits: usize, m: usize) -> Result<DenseOperator> {
    Ok(DenseOperator::projector(&dicke(num_qubits, m)?))
}

/// Axis of a collective spin component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollectiveAxis {
    X,
    Y,
    Z,
    /// Arbitrary direction; normalized before use.
    Direction([f64; 3]),
}

impl CollectiveAxis {
    /// Unit vector of the axis.
    pub fn unit(&self) -> Result<[f64; 3]> {
        let v = match *self {
            CollectiveAxis::X => [1.0, 0.0, 0.0],
            CollectiveAxis::Y => [0.0, 1.0, 0.0],
            CollectiveAxis::Z => [0.0, 0.0, 1.0],
            CollectiveAxis::Direction(v) => v,
        };
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument("collective axis direction is zero".into()));
        }
        Ok([v[0] / norm, v[1] / norm, v[2] / norm])
    }

    pub fn label(&self) -> String {
        match self {
            CollectiveAxis::X => "x".into(),
            CollectiveAxis::Y => "y".into(),
            CollectiveAxis::Z => "z".into(),
            CollectiveAxis::Direction(v) => format!("[{}, {}, {}]", v[0], v[1], v[2]),
        }
    }
}

/// Diagonal of `J_z` in the computational basis.
pub fn jz_diagonal(num_qubits: usize) -> Vec<f64> {
    (0..1usize << num_qubits)
        .map(|i| num_qubits as f64 / 2.0 - i.count_ones() as f64)
        .collect()
}

/// `J_l = ½ Σ_k σ_l^{(k)}`.
pub fn collective_j(num_qubits: usize, axis: CollectiveAxis) -> Result<DenseOperator> {
    collective_power(num_qubits, axis, 1, 0.0)
}

/// `(J_l − shift)^power`, built from the diagonal `J_z` case by a local
/// rotation.
pub fn collective_power(
    num_qubits: usize,
    axis: CollectiveAxis,
    power: u32,
    shift: f64,
) -> Result<DenseOperator> {
    if num_qubits == 0 {
        return Err(Error::InvalidArgument("collective operators need at least one qubit".into()));
    }
    let unit = axis.unit()?;
    let diag: Vec<f64> = jz_diagonal(num_qubits)
        .into_iter()
        .map(|j| (j - shift).powi(power as i32))
        .collect();
    let d = DenseOperator::from_diagonal(num_qubits, &diag);
    if unit == [0.0, 0.0, 1.0] {
        return Ok(d);
    }
    Ok(d.conjugate_local(&rotation_to(unit)))
}

fn check_permutation(num_qubits: usize, perm: &[usize]) -> Result<()> {
    if perm.len() != num_qubits {
        return Err(Error::InvalidPermutation(format!(
            "expected {num_qubits} entries, found {}",
            perm.len()
        )));
    }
    let mut seen = vec![false; num_qubits];
    for &p in perm {
        if p >= num_qubits || seen[p] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Relabels qubits: qubit `k` of the input becomes qubit `perm[k]` of the
/// output, i.e. the result is `P A P†` for the permutation unitary `P`.
pub fn permute_qubits(a: &DenseOperator, perm: &[usize]) -> Result<DenseOperator> {
    let n = a.num_qubits();
    check_permutation(n, perm)?;
    let dim = a.dim();
    let map: Vec<usize> = (0..dim)
        .map(|idx| {
            (0..n).fold(0, |acc, k| {
                if idx & qubit_mask(n, k) != 0 {
                    acc | qubit_mask(n, perm[k])
                } else {
                    acc
                }
            })
        })
        .collect();
    let src = a.as_slice();
    let mut out = DenseOperator::zeros(n);
    let dst = out.as_mut_slice();
    for r in 0..dim {
        for c in 0..dim {
            dst[map[r] * dim + map[c]] = src[r * dim + c];
        }
    }
    Ok(out)
}

/// Index map of the transposition of qubits `i` and `j`.
fn swap_map(num_qubits: usize, i: usize, j: usize) -> Vec<usize> {
    let (bi, bj) = (qubit_mask(num_qubits, i), qubit_mask(num_qubits, j));
    (0..1usize << num_qubits)
        .map(|idx| {
            if ((idx & bi) != 0) != ((idx & bj) != 0) {
                idx ^ bi ^ bj
            } else {
                idx
            }
        })
        .collect()
}

/// Average of `P A P†` over all `N!` qubit permutations.
///
/// Computed as a product of coset averages: after symmetrizing over the first
/// `k − 1` qubits, averaging over the `k` transpositions `(j k)` (identity
/// included) symmetrizes over the first `k`. The cost is `O(N² 4^N)`.
pub fn symmetrize(a: &DenseOperator) -> DenseOperator {
    let n = a.num_qubits();
    let dim = a.dim();
    let mut cur = a.as_slice().to_vec();
    for k in 1..n {
        let mut acc = cur.clone();
        for j in 0..k {
            let map = swap_map(n, j, k);
            for r in 0..dim {
                let mr = map[r] * dim;
                let row = &mut acc[r * dim..(r + 1) * dim];
                for (c, v) in row.iter_mut().enumerate() {
                    *v += cur[mr + map[c]];
                }
            }
        }
        let inv = 1.0 / (k + 1) as f64;
        acc.iter_mut().for_each(|v| *v *= inv);
        cur = acc;
    }
    DenseOperator::new(n, cur).expect("dimension unchanged")
}

/// Largest entrywise change of `A` under an adjacent transposition.
pub fn permutation_defect(a: &DenseOperator) -> f64 {
    let n = a.num_qubits();
    let dim = a.dim();
    let src = a.as_slice();
    let mut worst: f64 = 0.0;
    for k in 0..n.saturating_sub(1) {
        let map = swap_map(n, k, k + 1);
        for r in 0..dim {
            for c in 0..dim {
                worst = worst.max((src[map[r] * dim + map[c]] - src[r * dim + c]).norm());
            }
        }
    }
    worst
}

/// True iff `A` commutes with every qubit permutation, within
/// [`PERMUTATION_TOL`] relative to `max(1, max |A|)`.
pub fn is_permutation_invariant(a: &DenseOperator) -> bool {
    permutation_defect(a) <= PERMUTATION_TOL * a.max_abs().max(1.0)
}

pub(crate) fn require_permutation_invariant(a: &DenseOperator) -> Result<()> {
    let defect = permutation_defect(a);
    if defect > PERMUTATION_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotPermutationInvariant { defect });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Pauli;

    fn pauli(p: Pauli) -> DenseOperator {
        DenseOperator::single_qubit(&p.matrix())
    }

    #[test]
    fn two_qubit_dicke() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let d = dicke(2, 1).unwrap();
        let expect = [0.0, s, s, 0.0];
        for (a, e) in d.amplitudes().iter().zip(expect) {
            assert!((a - C64::new(e, 0.0)).norm() < 1e-15);
        }
        assert_eq!(dicke(3, 0).unwrap(), StateVector::basis(3, 0).unwrap());
        assert!(dicke(3, 4).is_err());
    }

    #[test]
    fn six_qubit_dicke_support() {
        let d = dicke(6, 3).unwrap();
        let nonzero: Vec<_> = d.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 20);
        for a in nonzero {
            assert!((a.re - 1.0 / 20f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn collective_moments() {
        let n = 6;
        let jx2 = collective_power(n, CollectiveAxis::X, 2, 0.0).unwrap();
        let jy2 = collective_power(n, CollectiveAxis::Y, 2, 0.0).unwrap();
        let d = dicke(n, 3).unwrap();
        let v = (&jx2 + &jy2).expectation(&d).unwrap();
        assert!((v.re - 12.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        for n in 4..=6 {
            let jx2 = collective_power(n, CollectiveAxis::X, 2, 0.0).unwrap();
            let t = jx2.trace().re / (1 << n) as f64;
            assert!((t - n as f64 / 4.0).abs() < 1e-12);
        }
        let jz = collective_j(4, CollectiveAxis::Z).unwrap();
        assert!((jz.expectation(&dicke(4, 1).unwrap()).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spin_commutator() {
        let n = 3;
        let jx = collective_j(n, CollectiveAxis::X).unwrap();
        let jy = collective_j(n, CollectiveAxis::Y).unwrap();
        let jz = collective_j(n, CollectiveAxis::Z).unwrap();
        let comm = &(&jx * &jy) - &(&jy * &jx);
        let target = DenseOperator::from_fn(n, |r, c| jz.get(r, c) * C64::new(0.0, 1.0));
        assert!(comm.max_abs_diff(&target).unwrap() < 1e-12);
        let vals = jz.eigenvalues().unwrap();
        assert_eq!(vals.first(), Some(&-1.5));
        assert_eq!(vals.last(), Some(&1.5));
        assert!(collective_j(2, CollectiveAxis::Direction([0.0; 3])).is_err());
    }

    #[test]
    fn direction_axis_matches_combination() {
        let n = 3;
        let v = [1.0, -2.0, 2.0];
        let j = collective_j(n, CollectiveAxis::Direction(v)).unwrap();
        let mut expect = DenseOperator::zeros(n);
        for (axis, w) in [CollectiveAxis::X, CollectiveAxis::Y, CollectiveAxis::Z].into_iter().zip(v) {
            expect.add_scaled(w / 3.0, &collective_j(n, axis).unwrap()).unwrap();
        }
        assert!(j.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn permutation_cases() {
        let xz = pauli(Pauli::X).kron(&pauli(Pauli::Z));
        let zx = pauli(Pauli::Z).kron(&pauli(Pauli::X));
        assert_eq!(permute_qubits(&xz, &[0, 1]).unwrap(), xz);
        assert_eq!(permute_qubits(&xz, &[1, 0]).unwrap(), zx);
        assert!(permute_qubits(&xz, &[0, 0]).is_err());
        assert!(permute_qubits(&xz, &[0]).is_err());
        let p = dicke_projector(4, 2).unwrap();
        assert!(permute_qubits(&p, &[2, 0, 3, 1]).unwrap().max_abs_diff(&p).unwrap() < 1e-15);
    }

    #[test]
    fn symmetrize_examples() {
        let x = pauli(Pauli::X);
        let id = DenseOperator::identity(1);
        let sum = &x.kron(&id) + &id.kron(&x);
        assert!(symmetrize(&sum).max_abs_diff(&sum).unwrap() < 1e-15);
        let xy = x.kron(&pauli(Pauli::Y));
        let yx = pauli(Pauli::Y).kron(&x);
        let avg = (&xy + &yx).scale(0.5);
        assert!(symmetrize(&xy).max_abs_diff(&avg).unwrap() < 1e-15);
    }

    #[test]
    fn invariance_checks() {
        assert!(is_permutation_invariant(&collective_power(3, CollectiveAxis::Z, 2, 0.0).unwrap()));
        let x1 = pauli(Pauli::X).kron(&DenseOperator::identity(2));
        assert!(!is_permutation_invariant(&x1));
        assert!(is_permutation_invariant(&symmetrize(&x1)));
    }
}
