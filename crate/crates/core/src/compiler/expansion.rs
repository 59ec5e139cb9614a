//! Symmetrized products as sums of tensor powers.
//!
//! For single-qubit operators `B_1 … B_N`, the sum over all `N!` qubit
//! permutations of `B_1 ⊗ … ⊗ B_N` equals
//!
//! * odd `N`: `2^{−(N−1)} Σ_s (s_1 B_1 + … + s_N B_N)^{⊗N}`,
//! * even `N`: `2^{−(N−1)} Σ_s s_1 (B_1 + s_2 B_2 + … + s_N B_N)^{⊗N}`,
//!
//! where `s ∈ {±1}^N` runs over sign vectors with `s_1 s_2 ⋯ s_N = +1`.

use std::collections::BTreeMap;

use super::coeff::Coeff;
use super::pauli_poly::PauliClass;
use super::schedule::LocalTerm;
use crate::error::{Error, Result};
use crate::linalg::pauli::{mat2_add, mat2_scale, Mat2};
use crate::linalg::DenseOperator;
use crate::symmetric::permute_qubits;

/// One term of the expansion: `sign · (Σ_k s_k B_k)^{⊗N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignPattern {
    pub sign: f64,
    pub s: Vec<f64>,
}

/// The `2^{N−1}` sign patterns for `N` factors.
pub fn sign_patterns(num_qubits: usize) -> Vec<SignPattern> {
    assert!(num_qubits >= 1);
    let rest = num_qubits - 1;
    (0..1usize << rest)
        .map(|bits| {
            let tail: Vec<f64> = (0..rest)
                .map(|k| if bits & (1 << k) != 0 { -1.0 } else { 1.0 })
                .collect();
            let parity: f64 = tail.iter().product();
            let (sign, s1) = if num_qubits.is_multiple_of(2) { (parity, 1.0) } else { (1.0, parity) };
            let mut s = Vec::with_capacity(num_qubits);
            s.push(s1);
            s.extend(tail);
            SignPattern { sign, s }
        })
        .collect()
}

/// Right-hand side of the identity, as a dense operator.
pub fn sign_expansion(ops: &[Mat2]) -> DenseOperator {
    let n = ops.len();
    let mut out = DenseOperator::zeros(n);
    let norm = 0.5f64.powi(n as i32 - 1);
    for p in sign_patterns(n) {
        let zero = [[num_complex::Complex64::new(0.0, 0.0); 2]; 2];
        let a = ops
            .iter()
            .zip(&p.s)
            .fold(zero, |acc, (b, &s)| mat2_add(&acc, &mat2_scale(b, s.into())));
        out.add_scaled(p.sign * norm, &DenseOperator::tensor_power(&a, n))
            .expect("same register");
    }
    out
}

/// Left-hand side of the identity: the sum over all `N!` permutations.
pub fn permutation_sum(ops: &[Mat2]) -> Result<DenseOperator> {
    let n = ops.len();
    if n > 8 {
        return Err(Error::InvalidArgument(format!(
            "brute-force permutation sum is limited to 8 qubits, got {n}"
        )));
    }
    let product = ops
        .iter()
        .fold(DenseOperator::identity(0), |acc, b| acc.kron(&DenseOperator::single_qubit(b)));
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = DenseOperator::zeros(n);
    loop {
        out.add_scaled(1.0, &permute_qubits(&product, &perm)?)?;
        if !next_perm(&mut perm) {
            break;
        }
    }
    Ok(out)
}

fn next_perm(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Tensor-power terms whose sum is `coeff · class(i, j, m)`.
///
/// The class sums distinct arrangements, which is the full permutation sum
/// divided by `i! j! m! r!`. Sign patterns giving the same single-qubit
/// operator are merged.
pub fn symmetrized_product_to_powers(num_qubits: usize, class: &PauliClass) -> Vec<LocalTerm> {
    let n = num_qubits;
    // Sum over patterns of the sign, keyed by (n_x, n_y, n_z, w).
    let mut acc: BTreeMap<[i64; 4], f64> = BTreeMap::new();
    for p in sign_patterns(n) {
        let mut key = [0i64; 4];
        for (k, &s) in p.s.iter().enumerate() {
            let slot = if k < class.i {
                0
            } else if k < class.i + class.j {
                1
            } else if k < class.i + class.j + class.m {
                2
            } else {
                3
            };
            key[slot] += s as i64;
        }
        *acc.entry(key).or_insert(0.0) += p.sign;
    }
    // i! j! m! r!
    let stabilizer: f64 = [class.i, class.j, class.m, class.identities(n)]
        .iter()
        .map(|&k| (1..=k).map(|x| x as f64).product::<f64>())
        .product();
    let norm = class.coeff / (2f64.powi(n as i32 - 1) * stabilizer);
    acc.into_iter()
        .filter(|(_, s)| *s != 0.0)
        .map(|(key, s)| {
            LocalTerm::from_vector(
                n,
                Coeff::Float(norm * s),
                [key[0] as f64, key[1] as f64, key[2] as f64],
                key[3] as f64,
            )
        })
        .collect()
}
