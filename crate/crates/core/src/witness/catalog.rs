//! Named witnesses for Dicke and W states.
//!
//! Naming: `WP` is a projector witness, `WP2`/`WP3` approximate it with two
//! or three collective settings, and `WI2`/`WI3` are built independently of
//! it from a biseparable bound `c`.

use super::{projector_witness_for, AlphaChoice, BasisOp, Target, WitnessSpec};
use crate::compiler::Coeff;
use crate::error::{Error, Result};
use crate::symmetric::{CollectiveAxis, DickeLabel};

use CollectiveAxis::{X, Y, Z};

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 13] = [
    "WP_D63", "WP_D41", "WP_D42", "WP2_D63", "WP3_D63", "WI2_D63", "WI2_D5", "WI3_D41", "WP3_D42", "WP3_D84",
    "WP3_D10", "WI3_W5", "WI3_W6",
];

fn dicke(n: usize, m: usize) -> Target {
    Target::Dicke(DickeLabel { num_qubits: n, m })
}

struct Terms {
    basis: Vec<BasisOp>,
    coefficients: Vec<Coeff>,
}

impl Terms {
    fn constant(c: Coeff) -> Self {
        Self {
            basis: vec![BasisOp::Identity],
            coefficients: vec![c],
        }
    }

    fn add(&mut self, c: Coeff, b: BasisOp) -> &mut Self {
        self.basis.push(b);
        self.coefficients.push(c);
        self
    }

    /// `c (J_x^p + J_y^p)`.
    fn xy(&mut self, c: Coeff, power: u32) -> &mut Self {
        self.add(c, BasisOp::power(X, power)).add(c, BasisOp::power(Y, power))
    }

    fn build(&mut self, name: &str, target: Target, alpha: AlphaChoice) -> Result<WitnessSpec> {
        WitnessSpec::new(
            name,
            target,
            std::mem::take(&mut self.basis),
            std::mem::take(&mut self.coefficients),
            alpha,
        )
    }
}

/// `c − (J_x² + J_y²) + q (J_z − ⟨J_z⟩_Ψ)²` for the Dicke target `(N, m)`.
pub fn independent_witness(name: &str, num_qubits: usize, m: usize, q: Coeff, c: Coeff) -> Result<WitnessSpec> {
    let label = DickeLabel::new(num_qubits, m)?;
    let shift = label.jz_expectation();
    let mut t = Terms::constant(c);
    t.xy(Coeff::int(-1), 2);
    if !q.is_zero() {
        t.add(q, BasisOp::CollectivePower { axis: Z, power: 2, shift });
    }
    t.build(name, Target::Dicke(label), AlphaChoice::None)
}

fn wp2_d63() -> Result<WitnessSpec> {
    let r = Coeff::ratio;
    Terms::constant(r(31, 4))
        .xy(r(-35, 18), 2)
        .xy(r(55, 72), 4)
        .xy(r(-5, 72), 6)
        .build("WP2_D63", dicke(6, 3), AlphaChoice::Given(2.5))
}

fn wp3_d63() -> Result<WitnessSpec> {
    let r = Coeff::ratio;
    Terms::constant(r(3, 2))
        .xy(r(-1, 45), 2)
        .xy(r(1, 36), 4)
        .xy(r(-1, 180), 6)
        .add(r(1007, 360), BasisOp::power(Z, 2))
        .add(r(-31, 36), BasisOp::power(Z, 4))
        .add(r(23, 360), BasisOp::power(Z, 6))
        .build("WP3_D63", dicke(6, 3), AlphaChoice::Given(2.5))
}

fn wi2(name: &str, n: usize, m: usize, c: &str) -> Result<WitnessSpec> {
    independent_witness(name, n, m, Coeff::int(0), Coeff::decimal(c))
}

fn wp3_d42() -> Result<WitnessSpec> {
    let r = Coeff::ratio;
    Terms::constant(Coeff::int(2))
        .xy(r(1, 6), 2)
        .xy(r(-1, 6), 4)
        .add(r(31, 12), BasisOp::power(Z, 2))
        .add(r(-7, 12), BasisOp::power(Z, 4))
        .build("WP3_D42", dicke(4, 2), AlphaChoice::Given(3.0))
}

fn wp3_d84() -> Result<WitnessSpec> {
    let table: [(CollectiveAxis, [&str; 4]); 3] = [
        (X, ["0.0038612", "-0.0052555", "0.0015016", "-0.00010726"]),
        (Y, ["0.0038612", "-0.0052555", "0.0015016", "-0.000107266"]),
        (Z, ["3.124", "-1.07699", "0.11916", "-0.0038992"]),
    ];
    let mut t = Terms::constant(Coeff::decimal("1.3652"));
    for (axis, row) in table {
        for (k, c) in row.iter().enumerate() {
            t.add(Coeff::decimal(c), BasisOp::power(axis, 2 * (k as u32 + 1)));
        }
    }
    t.build("WP3_D84", dicke(8, 4), AlphaChoice::Derive)
}

fn wp3_d10() -> Result<WitnessSpec> {
    let cxy = Coeff::decimal("-0.0023069");
    let mut t = Terms::constant(Coeff::decimal("1.3115"));
    for axis in [X, Y] {
        for shift in [1.0, -1.0] {
            t.add(cxy, BasisOp::TensorPower { axis, shift });
        }
    }
    for (k, c) in ["3.4681", "-1.2624", "0.16494", "-0.0084574", "0.000146551"].iter().enumerate() {
        t.add(Coeff::decimal(c), BasisOp::power(Z, 2 * (k as u32 + 1)));
    }
    t.build("WP3_D10", dicke(10, 5), AlphaChoice::Derive)
}

/// A catalog witness by name; see [`CATALOG_NAMES`].
pub fn catalog(name: &str) -> Result<WitnessSpec> {
    match name {
        "WP_D63" => projector_witness_for(name.into(), dicke(6, 3)),
        "WP_D41" => projector_witness_for(name.into(), dicke(4, 1)),
        "WP_D42" => projector_witness_for(name.into(), dicke(4, 2)),
        "WP2_D63" => wp2_d63(),
        "WP3_D63" => wp3_d63(),
        "WI2_D63" => wi2(name, 6, 3, "11.0179"),
        "WI2_D5" => wi2(name, 5, 2, "7.8723"),
        "WI3_D41" => independent_witness(name, 4, 1, Coeff::decimal("1.47"), Coeff::decimal("4.1234")),
        "WP3_D42" => wp3_d42(),
        "WP3_D84" => wp3_d84(),
        "WP3_D10" => wp3_d10(),
        "WI3_W5" => independent_witness(name, 5, 1, Coeff::decimal("2.22"), Coeff::decimal("5.6242")),
        "WI3_W6" => independent_witness(name, 6, 1, Coeff::decimal("3.13"), Coeff::decimal("7.1095")),
        other => Err(Error::UnknownName(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseOperator;
    use crate::symmetric::{collective_power, dicke_projector};
    use crate::witness::{expectation, noise_tolerance, NoiseModel};

    #[test]
    fn every_name_builds() {
        for name in CATALOG_NAMES.iter().filter(|n| !n.ends_with("D10")) {
            let w = catalog(name).unwrap();
            assert_eq!(w.name(), *name);
            let v = expectation(&w, &DenseOperator::projector(w.target_state())).unwrap();
            assert!(v < 0.0, "{name}: {v}");
        }
        assert!(matches!(catalog("WP_D99"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn wp2_printed_coefficients() {
        let w = catalog("WP2_D63").unwrap();
        let c: Vec<String> = w.coefficients().iter().map(|c| c.to_string()).collect();
        assert_eq!(c, ["31/4", "-35/18", "-35/18", "55/72", "55/72", "-5/72", "-5/72"]);
        assert_eq!(w.alpha(), Some(2.5));
    }

    #[test]
    fn wi2_on_target() {
        let w = catalog("WI2_D63").unwrap();
        let v = expectation(&w, &dicke_projector(6, 3).unwrap()).unwrap();
        assert!((v + 0.9821).abs() < 1e-12);
    }

    #[test]
    fn q_zero_drops_the_z_term() {
        let w = independent_witness("q0", 4, 1, Coeff::int(0), Coeff::decimal("4.1234")).unwrap();
        assert_eq!(w.basis().len(), 3);
        let mut expect = &collective_power(4, X, 2, 0.0).unwrap() + &collective_power(4, Y, 2, 0.0).unwrap();
        expect = expect.scale(-1.0);
        expect.add_identity(4.1234);
        assert!(w.operator().max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn d84_tolerance_and_alpha() {
        let w = catalog("WP3_D84").unwrap();
        assert!(w.alpha_derived());
        let rho = dicke_projector(8, 4).unwrap();
        let p = noise_tolerance(&w, &NoiseModel::white(8), &rho).unwrap();
        assert!((p - 0.2578).abs() < 5e-4, "{p}");
        if let Some(a) = w.alpha() {
            assert!(w.lmi_min_eigenvalue(a).unwrap() >= -1e-8);
        }
    }
}
