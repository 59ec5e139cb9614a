//! Permutationally invariant Pauli content of an operator.
//!
//! A class `(i, j, m)` stands for the sum of all distinct arrangements of
//! `i` copies of `σx`, `j` of `σy`, `m` of `σz` and identities elsewhere.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{qubit_mask, DenseOperator, Pauli};
use crate::symmetric::require_permutation_invariant;

/// One symmetrized Pauli class with its coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliClass {
    pub i: usize,
    pub j: usize,
    pub m: usize,
    pub coeff: f64,
}

impl PauliClass {
    /// Number of identity factors in an `N`-qubit arrangement.
    pub fn identities(&self, num_qubits: usize) -> usize {
        num_qubits - self.i - self.j - self.m
    }

    /// Number of distinct arrangements, `N!/(i! j! m! r!)`.
    pub fn multiplicity(&self, num_qubits: usize) -> f64 {
        multinomial(&[self.i, self.j, self.m, self.identities(num_qubits)])
    }
}

/// A sum of Pauli classes with distinct keys and nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliPolynomial {
    #[serde(rename = "N")]
    pub num_qubits: usize,
    pub classes: Vec<PauliClass>,
}

impl PauliPolynomial {
    pub fn coeff(&self, i: usize, j: usize, m: usize) -> f64 {
        self.classes
            .iter()
            .find(|c| (c.i, c.j, c.m) == (i, j, m))
            .map_or(0.0, |c| c.coeff)
    }

    /// Dense operator `Σ c_ijm · class(i, j, m)`.
    pub fn realize(&self) -> Result<DenseOperator> {
        let mut out = DenseOperator::zeros(self.num_qubits);
        for c in &self.classes {
            out.add_scaled(c.coeff, &class_operator(self.num_qubits, c.i, c.j, c.m)?)?;
        }
        Ok(out)
    }
}

pub(crate) fn multinomial(parts: &[usize]) -> f64 {
    let mut result = 1.0;
    let mut total = 0usize;
    for &p in parts {
        for k in 1..=p {
            total += 1;
            result *= total as f64 / k as f64;
        }
    }
    result.round()
}

fn check_class(num_qubits: usize, i: usize, j: usize, m: usize) -> Result<()> {
    if i + j + m > num_qubits {
        return Err(Error::InvalidArgument(format!(
            "class ({i}, {j}, {m}) has more than {num_qubits} Pauli factors"
        )));
    }
    Ok(())
}

/// Pauli string as a signed permutation: column of the nonzero entry in row
/// `r` is `r ^ flip`, and the entry is `value(r)`.
struct PauliString {
    flip: usize,
    y_mask: usize,
    phase_mask: usize,
    y_count: u32,
}

impl PauliString {
    fn new(num_qubits: usize, labels: &[Pauli]) -> Self {
        let (mut flip, mut y_mask, mut phase_mask) = (0, 0, 0);
        for (k, p) in labels.iter().enumerate() {
            let b = qubit_mask(num_qubits, k);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= b,
                Pauli::Y => {
                    flip |= b;
                    y_mask |= b;
                }
                Pauli::Z => phase_mask |= b,
            }
        }
        Self {
            flip,
            y_mask,
            phase_mask,
            y_count: y_mask.count_ones(),
        }
    }

    /// Entry `P[r][r ^ flip]`. `σy` has `⟨0|σy|1⟩ = −i` and `⟨1|σy|0⟩ = i`,
    /// so each `σy` contributes `−i·(−1)^{r_k}`.
    #[inline]
    fn value(&self, r: usize) -> C64 {
        let sign_bits = (r & (self.y_mask | self.phase_mask)).count_ones();
        let base = match self.y_count % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        };
        if sign_bits.is_multiple_of(2) {
            base
        } else {
            -base
        }
    }
}

fn representative(num_qubits: usize, i: usize, j: usize, m: usize) -> Vec<Pauli> {
    let mut labels = vec![Pauli::I; num_qubits];
    labels[..i].fill(Pauli::X);
    labels[i..i + j].fill(Pauli::Y);
    labels[i + j..i + j + m].fill(Pauli::Z);
    labels
}

/// Dense realization of class `(i, j, m)`, built by enumerating the distinct
/// arrangements of the label multiset.
pub fn class_operator(num_qubits: usize, i: usize, j: usize, m: usize) -> Result<DenseOperator> {
    check_class(num_qubits, i, j, m)?;
    let mut labels = representative(num_qubits, i, j, m);
    labels.sort();
    let mut out = DenseOperator::zeros(num_qubits);
    let dim = out.dim();
    let data = out.as_mut_slice();
    loop {
        let p = PauliString::new(num_qubits, &labels);
        for r in 0..dim {
            data[r * dim + (r ^ p.flip)] += p.value(r);
        }
        if !next_permutation(&mut labels) {
            break;
        }
    }
    Ok(out)
}

/// Lexicographic successor; returns false at the last arrangement.
fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Decomposes a Hermitian permutationally invariant operator into Pauli
/// classes; `c_ijm = Tr(A P)/2^N` for any string `P` of the class.
pub fn pauli_decompose(a: &DenseOperator) -> Result<PauliPolynomial> {
    let a = a.to_hermitian()?;
    require_permutation_invariant(&a)?;
    let n = a.num_qubits();
    let dim = a.dim();
    let data = a.as_slice();
    let prune = 1e-13 * a.max_abs().max(f64::MIN_POSITIVE);
    let mut classes = Vec::new();
    for i in 0..=n {
        for j in 0..=(n - i) {
            for m in 0..=(n - i - j) {
                let p = PauliString::new(n, &representative(n, i, j, m));
                // Tr(A P) = Σ_r A[r][r^f] P[r^f][r].
                let tr: C64 = (0..dim)
                    .map(|r| data[r * dim + (r ^ p.flip)] * p.value(r ^ p.flip))
                    .sum();
                let coeff = tr.re / dim as f64;
                if coeff.abs() > prune {
                    classes.push(PauliClass { i, j, m, coeff });
                }
            }
        }
    }
    Ok(PauliPolynomial {
        num_qubits: n,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::{collective_j, dicke_projector, CollectiveAxis};

    #[test]
    fn pauli_string_values_match_kron() {
        let labels = [Pauli::Y, Pauli::Z, Pauli::X];
        let dense = labels
            .iter()
            .fold(DenseOperator::identity(0), |acc, p| acc.kron(&DenseOperator::single_qubit(&p.matrix())));
        let p = PauliString::new(3, &labels);
        for r in 0..8 {
            for c in 0..8 {
                let expect = if c == r ^ p.flip { p.value(r) } else { C64::new(0.0, 0.0) };
                assert_eq!(dense.get(r, c), expect);
            }
        }
    }

    #[test]
    fn identity_and_jz() {
        let poly = pauli_decompose(&DenseOperator::identity(3)).unwrap();
        assert_eq!(poly.classes, vec![PauliClass { i: 0, j: 0, m: 0, coeff: 1.0 }]);
        let jz = collective_j(2, CollectiveAxis::Z).unwrap();
        let poly = pauli_decompose(&jz).unwrap();
        assert_eq!(poly.classes.len(), 1);
        assert_eq!((poly.classes[0].m, poly.classes[0].coeff), (1, 0.5));
    }

    #[test]
    fn dicke_projector_has_even_classes_and_reconstructs() {
        let p = dicke_projector(6, 3).unwrap();
        let poly = pauli_decompose(&p).unwrap();
        assert!(poly.classes.iter().all(|c| c.i % 2 == 0 && c.j % 2 == 0 && c.m % 2 == 0));
        assert!(poly.realize().unwrap().max_abs_diff(&p).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_non_invariant() {
        let x1 = DenseOperator::single_qubit(&Pauli::X.matrix()).kron(&DenseOperator::identity(1));
        assert!(matches!(pauli_decompose(&x1), Err(Error::NotPermutationInvariant { .. })));
    }

    #[test]
    fn multiplicities() {
        let c = PauliClass { i: 1, j: 2, m: 0, coeff: 1.0 };
        assert_eq!(c.multiplicity(4), 12.0);
        let op = class_operator(4, 1, 2, 0).unwrap();
        // Each arrangement is a distinct Pauli string with Tr(P²) = 2^N.
        assert!((op.hs_inner(&op).unwrap().re - 12.0 * 16.0).abs() < 1e-9);
    }
}
