//! Dense operators on the `2^N`-dimensional space of `N` qubits.
//!
//! Basis index convention: qubit `0` is the most significant bit, so the
//! basis state `|b_0 b_1 … b_{N-1}⟩` has index `Σ b_k 2^{N-1-k}`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use super::eigen::{self, HermitianEigen};
use super::pauli::Mat2;
use super::state::StateVector;
use crate::error::{Error, Result};

/// Absolute tolerance on `max |A − A†|`, scaled by `max(1, max |A|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);

/// A complex `2^N × 2^N` matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    num_qubits: usize,
    dim: usize,
    data: Vec<C64>,
}

/// Bit mask of qubit `k` in a basis index.
#[inline]
pub fn qubit_mask(num_qubits: usize, k: usize) -> usize {
    1 << (num_qubits - 1 - k)
}

pub(crate) fn check_qubits(num_qubits: usize, qubits: &[usize]) -> Result<usize> {
    let mut mask = 0;
    for &q in qubits {
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits,
            });
        }
        mask |= qubit_mask(num_qubits, q);
    }
    Ok(mask)
}

impl DenseOperator {
    /// Wraps row-major `data`, which must have `4^N` entries.
    pub fn new(num_qubits: usize, data: Vec<C64>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self {
            num_qubits,
            dim,
            data,
        })
    }

    pub fn zeros(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        Self {
            num_qubits,
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self::from_diagonal(num_qubits, &vec![1.0; 1 << num_qubits])
    }

    /// Real diagonal operator. Panics if `diag.len() != 2^N`.
    pub fn from_diagonal(num_qubits: usize, diag: &[f64]) -> Self {
        let mut out = Self::zeros(num_qubits);
        assert_eq!(diag.len(), out.dim);
        for (i, &d) in diag.iter().enumerate() {
            out.data[i * out.dim + i] = C64::new(d, 0.0);
        }
        out
    }

    pub fn from_fn(num_qubits: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut out = Self::zeros(num_qubits);
        let dim = out.dim;
        for r in 0..dim {
            for c in 0..dim {
                out.data[r * dim + c] = f(r, c);
            }
        }
        out
    }

    pub fn single_qubit(m: &Mat2) -> Self {
        Self {
            num_qubits: 1,
            dim: 2,
            data: vec![m[0][0], m[0][1], m[1][0], m[1][1]],
        }
    }

    /// `m^{⊗N}`.
    pub fn tensor_power(m: &Mat2, num_qubits: usize) -> Self {
        let one = Self::single_qubit(m);
        let mut out = Self::identity(0);
        for _ in 0..num_qubits {
            out = out.kron(&one);
        }
        out
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        Self::from_fn(psi.num_qubits(), |r, c| a[r] * a[c].conj())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let dim = da * db;
        let mut data = vec![ZERO; dim * dim];
        for ra in 0..da {
            for ca in 0..da {
                let a = self.data[ra * da + ca];
                if a == ZERO {
                    continue;
                }
                for rb in 0..db {
                    let row = (ra * db + rb) * dim + ca * db;
                    let src = &other.data[rb * db..(rb + 1) * db];
                    for (dst, b) in data[row..row + db].iter_mut().zip(src) {
                        *dst = a * b;
                    }
                }
            }
        }
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            dim,
            data,
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            dim: n,
            data,
        })
    }

    /// `A^p` by repeated squaring; `p = 0` gives the identity.
    pub fn pow(&self, p: u32) -> Self {
        let mut result = Self::identity(self.num_qubits);
        let mut base = self.clone();
        let mut e = p;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first {
                    base.clone()
                } else {
                    result.matmul(&base).expect("same shape")
                };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base).expect("same shape");
            }
        }
        result
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(self.num_qubits, |r, c| self.data[c * n + r].conj())
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        Self::from_fn(self.num_qubits, |r, c| self.data[c * n + r])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            num_qubits: self.num_qubits,
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `self += s · other`.
    pub fn add_scaled(&mut self, s: f64, other: &Self) -> Result<()> {
        self.check_same(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
        Ok(())
    }

    pub fn add_identity(&mut self, s: f64) {
        for i in 0..self.dim {
            self.data[i * self.dim + i] += s;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        self.check_same(other)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        Ok(acc)
    }

    /// Hilbert–Schmidt inner product `Tr(A† B)`.
    pub fn hs_inner(&self, other: &Self) -> Result<C64> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `max |A − B|` entrywise.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max |A − A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.data[r * n + c] - self.data[c * n + r].conj()).norm());
            }
        }
        worst
    }

    /// Checks Hermiticity and returns `(A + A†)/2`.
    pub fn to_hermitian(&self) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
        let n = self.dim;
        Ok(Self::from_fn(self.num_qubits, |r, c| {
            (self.data[r * n + c] + self.data[c * n + r].conj()) * 0.5
        }))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    /// Full eigen-decomposition, eigenvalues ascending.
    pub fn eig(&self) -> Result<HermitianEigen> {
        let h = self.to_hermitian()?;
        eigen::eigh(self.dim, &h.data)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let h = self.to_hermitian()?;
        eigen::eigvalsh(self.dim, &h.data)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("dimension ≥ 1"))
    }

    /// `A v`.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        let n = self.dim;
        Ok((0..n)
            .map(|r| {
                self.data[r * n..(r + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// `⟨v|A|v⟩` for an arbitrary (not necessarily normalized) vector.
    pub fn quadratic_form(&self, v: &[C64]) -> Result<C64> {
        let av = self.apply(v)?;
        Ok(v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum())
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<C64> {
        self.quadratic_form(psi.amplitudes())
    }

    /// `U^{⊗N} A U^{†⊗N}` in `O(N 4^N)`.
    pub fn conjugate_local(&self, u: &Mat2) -> Self {
        let mut out = self.clone();
        let n = self.dim;
        let uc = [
            [u[0][0].conj(), u[0][1].conj()],
            [u[1][0].conj(), u[1][1].conj()],
        ];
        for k in 0..self.num_qubits {
            let bit = qubit_mask(self.num_qubits, k);
            // Rows: A ← (U on qubit k) A.
            for r0 in (0..n).filter(|r| r & bit == 0) {
                let r1 = r0 | bit;
                for c in 0..n {
                    let a0 = out.data[r0 * n + c];
                    let a1 = out.data[r1 * n + c];
                    out.data[r0 * n + c] = u[0][0] * a0 + u[0][1] * a1;
                    out.data[r1 * n + c] = u[1][0] * a0 + u[1][1] * a1;
                }
            }
            // Columns: A ← A (U† on qubit k).
            for r in 0..n {
                let row = &mut out.data[r * n..(r + 1) * n];
                for c0 in (0..n).filter(|c| c & bit == 0) {
                    let c1 = c0 | bit;
                    let (a0, a1) = (row[c0], row[c1]);
                    row[c0] = a0 * uc[0][0] + a1 * uc[0][1];
                    row[c1] = a0 * uc[1][0] + a1 * uc[1][1];
                }
            }
        }
        out
    }

    /// Partial transpose on the listed qubits.
    pub fn partial_transpose(&self, qubits: &[usize]) -> Result<Self> {
        let mask = check_qubits(self.num_qubits, qubits)?;
        Ok(self.partial_transpose_mask(mask))
    }

    pub(crate) fn partial_transpose_mask(&self, mask: usize) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for r in 0..n {
            for c in 0..n {
                let swap = (r ^ c) & mask;
                out.data[r * n + c] = self.data[(r ^ swap) * n + (c ^ swap)];
            }
        }
        out
    }

    /// Traces out every qubit not listed in `keep`; kept qubits retain their
    /// relative order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let keep_mask = check_qubits(self.num_qubits, keep)?;
        let mut kept: Vec<usize> = (0..self.num_qubits)
            .filter(|&q| keep_mask & qubit_mask(self.num_qubits, q) != 0)
            .collect();
        kept.sort_unstable();
        let traced: Vec<usize> = (0..self.num_qubits)
            .filter(|&q| keep_mask & qubit_mask(self.num_qubits, q) == 0)
            .collect();
        let nk = kept.len();
        let embed = |sub: usize, qubits: &[usize]| -> usize {
            let m = qubits.len();
            qubits.iter().enumerate().fold(0, |acc, (j, &q)| {
                if sub & (1 << (m - 1 - j)) != 0 {
                    acc | qubit_mask(self.num_qubits, q)
                } else {
                    acc
                }
            })
        };
        let kept_idx: Vec<usize> = (0..1usize << nk).map(|s| embed(s, &kept)).collect();
        let traced_idx: Vec<usize> = (0..1usize << traced.len())
            .map(|s| embed(s, &traced))
            .collect();
        let n = self.dim;
        let mut out = Self::zeros(nk);
        let dk = out.dim;
        for (i, &ri) in kept_idx.iter().enumerate() {
            for (j, &cj) in kept_idx.iter().enumerate() {
                out.data[i * dk + j] = traced_idx
                    .iter()
                    .map(|&t| self.data[(ri | t) * n + (cj | t)])
                    .sum();
            }
        }
        Ok(out)
    }

    /// Checks that the operator is a density matrix: Hermitian, unit trace
    /// and positive semidefinite, each within `tol`.
    pub fn check_density(&self, tol: f64) -> Result<()> {
        let trace = self.trace();
        if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
            return Err(Error::InvalidTrace { trace: trace.re });
        }
        let min = self.min_eigenvalue()?;
        if min < -tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "minimum eigenvalue {min:e} is negative"
            )));
        }
        Ok(())
    }
}

/// `a ⊗ b`.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    a.kron(b)
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs).expect("operator dimensions differ");
        out
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs).expect("operator dimensions differ");
        out
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        self.matmul(rhs).expect("operator dimensions differ")
    }
}

impl Mul<&DenseOperator> for f64 {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        rhs.scale(self)
    }
}

impl Neg for &DenseOperator {
    type Output = DenseOperator;
    fn neg(self) -> DenseOperator {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::{mat2_adjoint, rotation_to, Pauli};

    fn pauli(p: Pauli) -> DenseOperator {
        DenseOperator::single_qubit(&p.matrix())
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_xx_flips_both_qubits() {
        let xx = pauli(Pauli::X).kron(&pauli(Pauli::X));
        let v = xx.apply(&[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        assert_eq!(v, vec![c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
    }

    #[test]
    fn kron_identity_is_block_diagonal() {
        let a = DenseOperator::from_fn(1, |r, c| C64::new((r * 2 + c) as f64, 1.0));
        let big = DenseOperator::identity(1).kron(&a);
        for r in 0..4 {
            for cc in 0..4 {
                let expect = if r / 2 == cc / 2 { a.get(r % 2, cc % 2) } else { ZERO };
                assert_eq!(big.get(r, cc), expect);
            }
        }
        let one = DenseOperator::identity(0);
        assert_eq!(one.kron(&a), a);
        assert_eq!(a.kron(&one), a);
    }

    #[test]
    fn kron_xy_table() {
        // σx ⊗ σy = [[0, σy], [σy, 0]] with σy = [[0, −i], [i, 0]].
        let xy = pauli(Pauli::X).kron(&pauli(Pauli::Y));
        let mut expect = vec![ZERO; 16];
        expect[3] = c(0., -1.);
        expect[6] = c(0., 1.);
        expect[9] = c(0., -1.);
        expect[12] = c(0., 1.);
        assert_eq!(xy.as_slice(), expect.as_slice());
    }

    #[test]
    fn single_qubit_spectra() {
        let z = pauli(Pauli::Z).eig().unwrap();
        assert_eq!(z.values, vec![-1.0, 1.0]);
        let x = pauli(Pauli::X).eig().unwrap();
        assert!((x.values[0] + 1.0).abs() < 1e-15 && (x.values[1] - 1.0).abs() < 1e-15);
        let v = x.vector(0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // (|0⟩ − |1⟩)/√2 up to a global phase.
        let phase = v[0] / s;
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!((v[1] + phase * s).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut a = DenseOperator::identity(1);
        a.set(0, 1, c(1.0, 0.0));
        assert!(matches!(a.eig(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn partial_transpose_edge_cases() {
        let a = DenseOperator::from_fn(2, |r, c| C64::new((r * 4 + c) as f64, (r as f64) - (c as f64)));
        assert_eq!(a.partial_transpose(&[]).unwrap(), a);
        assert_eq!(a.partial_transpose(&[0, 1]).unwrap(), a.transpose());
        assert!(matches!(
            a.partial_transpose(&[2]),
            Err(Error::QubitOutOfRange { index: 2, .. })
        ));
    }

    #[test]
    fn singlet_partial_transpose_is_negative() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::new(1 + 1, vec![ZERO, c(s, 0.), c(-s, 0.), ZERO]).unwrap();
        let pt = DenseOperator::projector(&psi).partial_transpose(&[1]).unwrap();
        assert!((pt.min_eigenvalue().unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_cases() {
        let a = DenseOperator::from_fn(1, |r, c| C64::new(1.0 + r as f64, c as f64));
        let b = DenseOperator::from_fn(1, |r, c| C64::new(2.0 * r as f64 + 0.5, -(c as f64)));
        let ab = a.kron(&b);
        let ra = ab.partial_trace(&[0]).unwrap();
        assert!(ra.max_abs_diff(&a.scale(1.0)).is_ok());
        let tr_b = b.trace();
        for r in 0..2 {
            for cc in 0..2 {
                assert!((ra.get(r, cc) - a.get(r, cc) * tr_b).norm() < 1e-14);
            }
        }
        let all = ab.partial_trace(&[]).unwrap();
        assert_eq!(all.dim(), 1);
        assert!((all.get(0, 0) - ab.trace()).norm() < 1e-14);
        assert!(ab.partial_trace(&[5]).is_err());
    }

    #[test]
    fn reduced_state_of_two_qubit_dicke() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::new(2, vec![ZERO, c(s, 0.), c(s, 0.), ZERO]).unwrap();
        let r = DenseOperator::projector(&psi).partial_trace(&[1]).unwrap();
        let half = DenseOperator::identity(1).scale(0.5);
        assert!(r.max_abs_diff(&half).unwrap() < 1e-15);
    }

    #[test]
    fn conjugate_local_matches_dense_product() {
        let u = rotation_to([0.3, -0.4, 0.8]);
        let a = DenseOperator::from_fn(3, |r, c| C64::new((r + 2 * c) as f64 % 5.0, (r * c) as f64 % 3.0));
        let uu = DenseOperator::tensor_power(&u, 3);
        let udag = DenseOperator::tensor_power(&mat2_adjoint(&u), 3);
        let expect = &(&uu * &a) * &udag;
        assert!(a.conjugate_local(&u).max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn pow_matches_products() {
        let z = pauli(Pauli::Z).kron(&DenseOperator::identity(1));
        let j = &z + &pauli(Pauli::X).kron(&pauli(Pauli::Y));
        let j3 = &(&j * &j) * &j;
        assert!(j.pow(3).max_abs_diff(&j3).unwrap() < 1e-12);
        assert_eq!(j.pow(0), DenseOperator::identity(2));
    }
}
