//! Mermin operators and their `N`-setting decomposition.
//!
//! `Mermin_{a,b}` sums all arrangements with an even number `k` of `σ_a`
//! factors and `σ_b` on the remaining qubits, with sign `(−1)^{k/2}`. The
//! axis `a` may be absent, in which case `σ_a = 𝟙`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::coeff::Coeff;
use super::schedule::{LocalTerm, Schedule};
use crate::error::{Error, Result};
use crate::linalg::pauli::{mat2_add, mat2_scale};
use crate::linalg::{bloch_operator, DenseOperator};
use crate::symmetric::CollectiveAxis;

fn axis_vector(axis: Option<CollectiveAxis>) -> Result<Option<[f64; 3]>> {
    axis.map(|a| a.unit()).transpose()
}

/// Dense `Mermin_{a,b}` from its definition, computed as
/// `½[(σ_b + iσ_a)^{⊗N} + (σ_b − iσ_a)^{⊗N}]`.
pub fn mermin_operator(num_qubits: usize, a: Option<CollectiveAxis>, b: CollectiveAxis) -> Result<DenseOperator> {
    if num_qubits == 0 {
        return Err(Error::InvalidArgument("Mermin operators need at least one qubit".into()));
    }
    let sa = match axis_vector(a)? {
        Some(v) => bloch_operator(v, 0.0),
        None => bloch_operator([0.0; 3], 1.0),
    };
    let sb = bloch_operator(b.unit()?, 0.0);
    let plus = mat2_add(&sb, &mat2_scale(&sa, C64::new(0.0, 1.0)));
    let minus = mat2_add(&sb, &mat2_scale(&sa, C64::new(0.0, -1.0)));
    let mut out = DenseOperator::tensor_power(&plus, num_qubits);
    out.add_scaled(1.0, &DenseOperator::tensor_power(&minus, num_qubits))?;
    out.scale(0.5).to_hermitian()
}

/// Terms `coeff·(2^{N−1}/N)(−1)^k [cos(kπ/N) u + sin(kπ/N) v]^{⊗N}` for
/// `k = 1..N`, where `u`, `v` are Pauli directions or the identity (`None`).
pub(crate) fn trig_terms(
    num_qubits: usize,
    coeff: Coeff,
    u: Option<[f64; 3]>,
    v: Option<[f64; 3]>,
) -> Vec<LocalTerm> {
    let n = num_qubits;
    let prefactor = coeff * Coeff::ratio(1i64 << (n - 1), n as i64);
    (1..=n)
        .map(|k| {
            let theta = k as f64 * PI / n as f64;
            let (c, s) = (clean(theta.cos()), clean(theta.sin()));
            let mut dir = [0.0; 3];
            let mut w = 0.0;
            for (weight, axis) in [(c, u), (s, v)] {
                match axis {
                    Some(e) => (0..3).for_each(|t| dir[t] += weight * e[t]),
                    None => w += weight,
                }
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            LocalTerm::from_vector(n, prefactor.mul_f64(sign), dir, w)
        })
        .collect()
}

/// Rounds trigonometric values that are zero or `±1` up to roundoff.
fn clean(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else if (x.abs() - 1.0).abs() < 1e-15 {
        x.signum()
    } else {
        x
    }
}

/// `N`-setting schedule of `Mermin_{a,b}`:
/// `(2^{N−1}/N) Σ_{k=1}^{N} (−1)^k [cos(kπ/N) σ_b + sin(kπ/N) σ_a]^{⊗N}`.
pub fn mermin_decomposition(num_qubits: usize, a: Option<CollectiveAxis>, b: CollectiveAxis) -> Result<Schedule> {
    if num_qubits < 2 {
        return Err(Error::InvalidArgument("the Mermin decomposition needs N ≥ 2".into()));
    }
    let terms = trig_terms(num_qubits, Coeff::int(1), Some(b.unit()?), axis_vector(a)?);
    Ok(Schedule::new(num_qubits, terms))
}
