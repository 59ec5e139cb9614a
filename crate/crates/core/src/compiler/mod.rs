//! Compilation of permutationally invariant operators into collective local
//! measurement settings.

pub mod canned;
pub mod coeff;
pub mod expansion;
pub mod mermin;
pub mod pauli_poly;
pub mod schedule;
pub mod setting;

pub use canned::{canned_decomposition, CANNED_NAMES};
pub use coeff::Coeff;
pub use expansion::{permutation_sum, sign_expansion, sign_patterns, symmetrized_product_to_powers};
pub use mermin::{mermin_decomposition, mermin_operator};
pub use pauli_poly::{class_operator, pauli_decompose, PauliClass, PauliPolynomial};
pub use schedule::{setting_probabilities, LocalTerm, Schedule};
pub use setting::{enumerate_integer_settings, Setting};

use crate::error::{Error, Result};
use crate::linalg::DenseOperator;

/// Decomposes `a` into Pauli classes and expands every class into tensor
/// powers; terms with equal setting, scale and identity weight are merged.
pub fn compile(a: &DenseOperator) -> Result<Schedule> {
    let poly = pauli_decompose(a)?;
    let n = poly.num_qubits;
    let terms = poly
        .classes
        .iter()
        .flat_map(|c| symmetrized_product_to_powers(n, c));
    Ok(Schedule::new(n, terms))
}

/// Setting-count bounds for `N` qubits: the closed form
/// `L_N = (2N³ + 3N² + 4N)/3` and the enumerated count `L′_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SettingsBound {
    #[serde(rename = "N")]
    pub num_qubits: usize,
    #[serde(rename = "L")]
    pub closed_form: usize,
    #[serde(rename = "L_prime")]
    pub enumerated: usize,
}

pub fn settings_upper_bound(num_qubits: usize) -> Result<SettingsBound> {
    if !(2..=12).contains(&num_qubits) {
        return Err(Error::InvalidArgument(format!(
            "setting bounds are defined for 2 ≤ N ≤ 12, got {num_qubits}"
        )));
    }
    let n = num_qubits;
    Ok(SettingsBound {
        num_qubits: n,
        closed_form: (2 * n * n * n + 3 * n * n + 4 * n) / 3,
        enumerated: enumerate_integer_settings(n).len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::{collective_power, dicke_projector, CollectiveAxis};

    #[test]
    fn bounds_sequence() {
        let expect = [9, 25, 49, 97, 145, 241, 337, 481, 625];
        for (n, e) in (2..=10).zip(expect) {
            assert_eq!(settings_upper_bound(n).unwrap().enumerated, e);
        }
        assert_eq!(settings_upper_bound(2).unwrap().closed_form, 12);
        assert!(settings_upper_bound(1).is_err());
        assert!(settings_upper_bound(13).is_err());
    }

    #[test]
    fn compile_collective_moments() {
        let n = 4;
        let a = &collective_power(n, CollectiveAxis::X, 2, 0.0).unwrap()
            + &collective_power(n, CollectiveAxis::Y, 2, 0.0).unwrap();
        let s = compile(&a).unwrap();
        let mut ints: Vec<_> = s.settings().iter().map(|x| x.as_ints().unwrap()).collect();
        ints.sort();
        assert_eq!(ints, vec![[0, 1, 0], [1, 0, 0]]);
        assert!(s.reconstruct().max_abs_diff(&a).unwrap() < 1e-12);
    }

    #[test]
    fn compile_identity_and_projector() {
        let s = compile(&DenseOperator::identity(3).scale(2.0)).unwrap();
        assert_eq!(s.terms().len(), 1);
        assert!(s.settings().is_empty());
        let p = dicke_projector(6, 3).unwrap();
        let s = compile(&p).unwrap();
        assert!(s.settings().len() <= 25, "{} settings", s.settings().len());
        assert!(s.reconstruct().max_abs_diff(&p).unwrap() < 1e-12);
    }
}
