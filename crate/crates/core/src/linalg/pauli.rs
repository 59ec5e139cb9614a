//! Single-qubit operators as plain 2×2 arrays.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// A single-qubit operator, row-major.
pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// The four Pauli matrices, identity included.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    /// Unit Bloch vector of the axis; zero for the identity.
    pub fn direction(self) -> [f64; 3] {
        match self {
            Pauli::I => [0.0; 3],
            Pauli::X => [1.0, 0.0, 0.0],
            Pauli::Y => [0.0, 1.0, 0.0],
            Pauli::Z => [0.0, 0.0, 1.0],
        }
    }
}

/// `n·σ + w·𝟙` for a real (not necessarily unit) vector `n`.
pub fn bloch_operator(n: [f64; 3], w: f64) -> Mat2 {
    [
        [C64::new(w + n[2], 0.0), C64::new(n[0], -n[1])],
        [C64::new(n[0], n[1]), C64::new(w - n[2], 0.0)],
    ]
}

/// Unitary whose first column is the +1 eigenvector of `n̂·σ` and whose
/// second column is the −1 eigenvector, so that `U σ_z U† = n̂·σ`.
pub fn rotation_to(n: [f64; 3]) -> Mat2 {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let (x, y, z) = (n[0] / norm, n[1] / norm, n[2] / norm);
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    [[C64::new(c, 0.0), -e.conj() * s], [e * s, C64::new(c, 0.0)]]
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

pub fn mat2_scale(a: &Mat2, s: C64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < 1e-12))
    }

    #[test]
    fn rotation_diagonalizes_axis() {
        for n in [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, -1.0],
            [1.0, -2.0, 0.5],
        ] {
            let u = rotation_to(n);
            let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            let unit = [n[0] / norm, n[1] / norm, n[2] / norm];
            let lhs = mat2_mul(&mat2_mul(&u, &Pauli::Z.matrix()), &mat2_adjoint(&u));
            assert!(close(&lhs, &bloch_operator(unit, 0.0)), "axis {n:?}");
        }
    }

    #[test]
    fn pauli_algebra() {
        let xy = mat2_mul(&Pauli::X.matrix(), &Pauli::Y.matrix());
        let iz = mat2_scale(&Pauli::Z.matrix(), I);
        assert!(close(&xy, &iz));
    }
}
