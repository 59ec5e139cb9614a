//! Dense Hermitian eigensolver and Cholesky factorizations.
//!
//! The eigensolver reduces the matrix to Hermitian tridiagonal form with
//! Householder reflectors, rotates the off-diagonal phases away so the
//! tridiagonal matrix is real symmetric, and then runs the implicit QL
//! iteration with Wilkinson-style shifts (the `tql2` scheme). Eigenvectors are
//! accumulated with real Givens rotations applied to complex vectors.
//!
//! All routines work on square row-major slices of any size, so they also
//! serve the small Gram and Hessian systems of the optimizers.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    dim: usize,
    /// Eigenvector `k` occupies `vectors[k * dim..(k + 1) * dim]`.
    vectors: Vec<C64>,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, k: usize) -> &[C64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.dim - 1]
    }

    /// `V diag(λ) V†` as a row-major slice.
    pub fn reconstruct(&self) -> Vec<C64> {
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vector(k);
            for i in 0..n {
                let vi = v[i] * lambda;
                if vi == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &mut out[i * n..(i + 1) * n];
                for (o, vj) in row.iter_mut().zip(v) {
                    *o += vi * vj.conj();
                }
            }
        }
        out
    }
}

/// Eigenvalues and eigenvectors of the Hermitian matrix `a` (`n × n`,
/// row-major). Hermiticity is assumed, only the lower triangle is trusted.
pub fn eigh(n: usize, a: &[C64]) -> Result<HermitianEigen> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(HermitianEigen {
            values: vec![],
            dim: 0,
            vectors: vec![],
        });
    }
    let (mut d, mut e, mut vt) = tridiagonalize(n, a, true);
    tql2(&mut d, &mut e, vt.as_deref_mut(), n)?;
    let vt = vt.unwrap();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &i in &order {
        vectors.extend_from_slice(&vt[i * n..(i + 1) * n]);
    }
    Ok(HermitianEigen {
        values,
        dim: n,
        vectors,
    })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(n: usize, a: &[C64]) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(vec![]);
    }
    let (mut d, mut e, _) = tridiagonalize(n, a, false);
    tql2(&mut d, &mut e, None, n)?;
    d.sort_by(|x, y| x.total_cmp(y));
    Ok(d)
}

/// Householder reduction to real symmetric tridiagonal form.
///
/// Returns the diagonal, the subdiagonal padded with a trailing zero, and,
/// when requested, the transposed transformation: row `j` of the returned
/// buffer is column `j` of the unitary `Q` with `Q† A Q` tridiagonal and real.
fn tridiagonalize(n: usize, a: &[C64], want_vectors: bool) -> (Vec<f64>, Vec<f64>, Option<Vec<C64>>) {
    let zero = C64::new(0.0, 0.0);
    let mut m = a.to_vec();
    // Make the working copy exactly Hermitian from the lower triangle.
    for i in 0..n {
        m[i * n + i] = C64::new(m[i * n + i].re, 0.0);
        for j in 0..i {
            m[j * n + i] = m[i * n + j].conj();
        }
    }
    let anorm = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    // Columns whose tail is below roundoff of the whole matrix are treated as
    // reduced; reflecting them would square denormals into zero.
    let negligible = (f64::EPSILON * 1e-3 * anorm).powi(2);
    let mut sub = vec![zero; n.saturating_sub(1)];
    let mut reflectors: Vec<(usize, Vec<C64>, f64)> = Vec::new();
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(2) {
        let alpha = m[(k + 1) * n + k];
        let tail: f64 = ((k + 2)..n).map(|i| m[i * n + k].norm_sqr()).sum();
        if tail <= negligible {
            sub[k] = alpha;
            for i in (k + 2)..n {
                m[i * n + k] = zero;
                m[k * n + i] = zero;
            }
            continue;
        }
        let xnorm = (alpha.norm_sqr() + tail).sqrt();
        let phase = if alpha.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            alpha / alpha.norm()
        };
        let len = n - k - 1;
        let mut u: Vec<C64> = ((k + 1)..n).map(|i| m[i * n + k]).collect();
        u[0] += phase * xnorm;
        let unorm2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        let beta = 2.0 / unorm2;
        sub[k] = -phase * xnorm;

        // p = beta * A22 u
        let off = k + 1;
        for i in 0..len {
            let row = &m[(off + i) * n + off..(off + i) * n + n];
            let mut acc = zero;
            for (x, y) in row.iter().zip(&u) {
                acc += x * y;
            }
            p[i] = acc * beta;
        }
        // K = beta/2 * u^H p, q = p - K u
        let mut uhp = zero;
        for i in 0..len {
            uhp += u[i].conj() * p[i];
        }
        let kk = 0.5 * beta * uhp.re;
        for i in 0..len {
            p[i] -= u[i] * kk;
        }
        // A22 -= u q^H + q u^H
        for i in 0..len {
            let ui = u[i];
            let qi = p[i];
            let row = &mut m[(off + i) * n + off..(off + i) * n + n];
            for j in 0..len {
                row[j] -= ui * p[j].conj() + qi * u[j].conj();
            }
        }
        // Column k below the subdiagonal is now annihilated.
        m[(k + 1) * n + k] = sub[k];
        m[k * n + k + 1] = sub[k].conj();
        for i in (k + 2)..n {
            m[i * n + k] = zero;
            m[k * n + i] = zero;
        }
        if want_vectors {
            reflectors.push((k + 1, u, beta));
        }
    }
    if n >= 2 {
        sub[n - 2] = m[(n - 1) * n + n - 2];
    }

    let d: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    // Diagonal phase similarity making the subdiagonal real and non-negative.
    let mut phases = vec![C64::new(1.0, 0.0); n];
    let mut e = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let r = sub[k].norm();
        e[k] = r;
        phases[k + 1] = if r == 0.0 {
            phases[k]
        } else {
            phases[k] * sub[k] / r
        };
    }

    let vt = if want_vectors {
        // Q = P_0 P_1 ... ; accumulate backwards, Q := P_k Q.
        let mut q = vec![zero; n * n];
        for i in 0..n {
            q[i * n + i] = C64::new(1.0, 0.0);
        }
        let mut w = vec![zero; n];
        for (start, u, beta) in reflectors.iter().rev() {
            let start = *start;
            // w = u^H Q[start.., :]
            w.iter_mut().for_each(|x| *x = zero);
            for (i, ui) in u.iter().enumerate() {
                let uc = ui.conj();
                let row = &q[(start + i) * n..(start + i + 1) * n];
                for (wj, qj) in w.iter_mut().zip(row) {
                    *wj += uc * qj;
                }
            }
            for (i, ui) in u.iter().enumerate() {
                let f = ui * *beta;
                let row = &mut q[(start + i) * n..(start + i + 1) * n];
                for (qj, wj) in row.iter_mut().zip(&w) {
                    *qj -= f * wj;
                }
            }
        }
        // vt[j][i] = Q[i][j] * phase_j
        let mut vt = vec![zero; n * n];
        for i in 0..n {
            for j in 0..n {
                vt[j * n + i] = q[i * n + j] * phases[j];
            }
        }
        Some(vt)
    } else {
        None
    };
    (d, e, vt)
}

/// Implicit QL on a real symmetric tridiagonal matrix. `e[i]` couples rows
/// `i` and `i + 1`; `e[n - 1]` must be zero. Rotations are applied to the rows
/// of `vt` when present.
fn tql2(d: &mut [f64], e: &mut [f64], mut vt: Option<&mut [C64]>, n: usize) -> Result<()> {
    let eps = f64::EPSILON;
    let mut f = 0.0;
    // Deflate against the norm of the whole matrix; a running maximum lets
    // roundoff-sized couplings under leading zero rows trigger overflow.
    let tst1 = (0..n).map(|i| d[i].abs() + e[i].abs()).fold(0.0, f64::max);
    let max_iter = 60 * n.max(1);
    let mut total_iter = 0usize;
    for l in 0..n {
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            loop {
                total_iter += 1;
                if total_iter > max_iter {
                    return Err(Error::NoConvergence {
                        method: "tridiagonal QL",
                        iterations: total_iter,
                        residual: e[l].abs(),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = vt.as_deref_mut() {
                        let (lo, hi) = v.split_at_mut((i + 1) * n);
                        let row_i = &mut lo[i * n..];
                        let row_i1 = &mut hi[..n];
                        for (a, b) in row_i.iter_mut().zip(row_i1.iter_mut()) {
                            let hh = *b;
                            *b = *a * s + hh * c;
                            *a = *a * c - hh * s;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky(n: usize, a: &[C64]) -> Result<Vec<C64>> {
    let mut l = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut diag = a[j * n + j].re;
        for k in 0..j {
            diag -= l[j * n + k].norm_sqr();
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let ljj = diag.sqrt();
        l[j * n + j] = C64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
            for (x, y) in ri.iter().zip(rj) {
                s -= x * y.conj();
            }
            l[i * n + j] = s / ljj;
        }
    }
    Ok(l)
}

/// `log det A` from a Cholesky factor.
pub fn cholesky_logdet(n: usize, l: &[C64]) -> f64 {
    (0..n).map(|i| 2.0 * l[i * n + i].re.ln()).sum()
}

/// `A⁻¹` from a Cholesky factor of `A`.
pub fn cholesky_inverse(n: usize, l: &[C64]) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    // Invert L (lower triangular) column by column.
    let mut linv = vec![zero; n * n];
    for j in 0..n {
        linv[j * n + j] = C64::new(1.0, 0.0) / l[j * n + j];
        for i in (j + 1)..n {
            let mut s = zero;
            for k in j..i {
                s += l[i * n + k] * linv[k * n + j];
            }
            linv[i * n + j] = -s / l[i * n + i];
        }
    }
    // A⁻¹ = L⁻† L⁻¹
    let mut out = vec![zero; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = zero;
            for k in i..n {
                s += linv[k * n + i].conj() * linv[k * n + j];
            }
            out[i * n + j] = s;
            out[j * n + i] = s.conj();
        }
    }
    out
}

/// Real symmetric positive definite Cholesky; `None` if not positive definite.
pub fn cholesky_real(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            diag -= l[j * n + k] * l[j * n + k];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return None;
        }
        let ljj = diag.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b`.
pub fn cholesky_solve_real(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}
