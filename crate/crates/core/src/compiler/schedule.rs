//! Tensor-power terms and the measurement schedules built from them.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::coeff::Coeff;
use super::setting::Setting;
use crate::error::{Error, Result};
use crate::linalg::{rotation_to, DenseOperator};

/// Relative tolerance for merging terms and for dropping cancelled ones.
const MERGE_TOL: f64 = 1e-12;

/// `coeff · (scale·n̂·σ + w·𝟙)^{⊗N}`, with `n̂` the unit vector of `setting`.
///
/// `scale ≥ 0` always. A term without a setting is a multiple of the
/// identity; it then has `scale = 0` and `w = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTerm {
    pub coeff: Coeff,
    pub setting: Option<Setting>,
    pub scale: f64,
    pub identity_weight: f64,
}

impl LocalTerm {
    /// Term `coeff · (v·σ + w·𝟙)^{⊗N}` for an arbitrary real vector `v`.
    pub fn from_vector(num_qubits: usize, coeff: Coeff, v: [f64; 3], w: f64) -> Self {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm <= 1e-14 * w.abs().max(1.0) {
            return Self::identity(coeff.mul_f64(w.powi(num_qubits as i32)));
        }
        let setting = Setting::new(v).expect("nonzero direction");
        let (coeff, w) = if setting.orientation(v) < 0.0 {
            let sign = if num_qubits.is_multiple_of(2) { 1.0 } else { -1.0 };
            (coeff.mul_f64(sign), -w)
        } else {
            (coeff, w)
        };
        Self {
            coeff,
            setting: Some(setting),
            scale: norm,
            identity_weight: w,
        }
    }

    /// `coeff · 𝟙`.
    pub fn identity(coeff: Coeff) -> Self {
        Self {
            coeff,
            setting: None,
            scale: 0.0,
            identity_weight: 1.0,
        }
    }

    /// The single-qubit factor `scale·n̂·σ + w·𝟙` as a Bloch vector.
    pub fn vector(&self) -> [f64; 3] {
        match &self.setting {
            Some(s) => {
                let u = s.unit();
                [self.scale * u[0], self.scale * u[1], self.scale * u[2]]
            }
            None => [0.0; 3],
        }
    }

    /// Eigenvalue of the single-qubit factor for outcome `±1` of `n̂·σ`.
    #[inline]
    pub fn local_eigenvalue(&self, outcome: f64) -> f64 {
        self.identity_weight + outcome * self.scale
    }

    /// Value of the tensor power on a basis outcome with `minus` outcomes
    /// equal to `−1` among `num_qubits`.
    pub fn product_value(&self, num_qubits: usize, minus: usize) -> f64 {
        let plus = num_qubits - minus;
        self.local_eigenvalue(1.0).powi(plus as i32) * self.local_eigenvalue(-1.0).powi(minus as i32)
    }

    fn mergeable(&self, other: &LocalTerm) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= MERGE_TOL * a.abs().max(b.abs()).max(1.0);
        match (&self.setting, &other.setting) {
            (None, None) => true,
            (Some(a), Some(b)) => {
                a.approx_eq(b, MERGE_TOL)
                    && close(self.scale, other.scale)
                    && close(self.identity_weight, other.identity_weight)
            }
            _ => false,
        }
    }
}

/// A compiled measurement plan: terms grouped by collective setting.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    num_qubits: usize,
    terms: Vec<LocalTerm>,
    settings: Vec<Setting>,
}

impl Schedule {
    /// Merges equal terms, drops cancelled ones and collects the settings in
    /// order of first appearance.
    pub fn new(num_qubits: usize, terms: impl IntoIterator<Item = LocalTerm>) -> Self {
        let mut merged: Vec<LocalTerm> = Vec::new();
        for t in terms {
            match merged.iter_mut().find(|m| m.mergeable(&t)) {
                Some(m) => m.coeff = m.coeff + t.coeff,
                None => merged.push(t),
            }
        }
        let largest = merged
            .iter()
            .map(|t| t.coeff.value().abs())
            .fold(0.0, f64::max);
        merged.retain(|t| match t.coeff {
            Coeff::Exact(r) => *r.numer() != 0,
            Coeff::Float(v) => v.abs() > 10.0 * MERGE_TOL * largest,
        });
        let mut settings: Vec<Setting> = Vec::new();
        for t in &merged {
            if let Some(s) = &t.setting {
                if !settings.iter().any(|x| x.approx_eq(s, MERGE_TOL)) {
                    settings.push(*s);
                }
            }
        }
        Self {
            num_qubits,
            terms: merged,
            settings,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn settings(&self) -> &[Setting] {
        &self.settings
    }

    /// Terms measured with `setting`.
    pub fn terms_for<'a>(&'a self, setting: &'a Setting) -> impl Iterator<Item = &'a LocalTerm> + 'a {
        self.terms
            .iter()
            .filter(move |t| t.setting.as_ref().is_some_and(|s| s.approx_eq(setting, MERGE_TOL)))
    }

    /// Sum of the identity terms.
    pub fn constant(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.setting.is_none())
            .map(|t| t.coeff.value())
            .sum()
    }

    /// Every coefficient multiplied by `c`.
    pub fn scaled(&self, c: Coeff) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| LocalTerm {
                coeff: t.coeff * c,
                ..t.clone()
            })
            .collect();
        Self {
            num_qubits: self.num_qubits,
            terms,
            settings: self.settings.clone(),
        }
    }

    /// `Σ_k c_k S_k` over schedules on the same register.
    pub fn combine(parts: &[(Coeff, &Schedule)]) -> Result<Self> {
        let n = parts.first().map_or(0, |p| p.1.num_qubits);
        let mut terms = Vec::new();
        for (c, s) in parts {
            if s.num_qubits != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.num_qubits,
                });
            }
            terms.extend(s.scaled(*c).terms);
        }
        Ok(Self::new(n, terms))
    }

    /// Diagonal, in the eigenbasis of `n̂·σ` on every qubit, of the part of
    /// the operator measured with `setting`. Basis bit `0` is outcome `+1`.
    pub fn setting_diagonal(&self, setting: &Setting) -> Vec<f64> {
        let n = self.num_qubits;
        let by_weight: Vec<f64> = (0..=n)
            .map(|h| {
                self.terms_for(setting)
                    .map(|t| t.coeff.value() * t.product_value(n, h))
                    .sum()
            })
            .collect();
        (0..1usize << n)
            .map(|b| by_weight[b.count_ones() as usize])
            .collect()
    }

    /// Dense operator `Σ coeff · (scale·n̂·σ + w𝟙)^{⊗N}`.
    pub fn reconstruct(&self) -> DenseOperator {
        let n = self.num_qubits;
        let mut out = DenseOperator::zeros(n);
        for s in &self.settings {
            let diag = DenseOperator::from_diagonal(n, &self.setting_diagonal(s));
            let rotated = diag.conjugate_local(&rotation_to(s.unit()));
            out.add_scaled(1.0, &rotated).expect("same register");
        }
        out.add_identity(self.constant());
        out
    }

    /// Exact `Tr(A ρ)` evaluated setting by setting from Born probabilities.
    pub fn expectation(&self, rho: &DenseOperator) -> Result<f64> {
        if rho.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: rho.num_qubits(),
            });
        }
        let trace = rho.trace().re;
        let mut total = self.constant() * trace;
        for s in &self.settings {
            let probs = setting_probabilities(rho, s);
            total += probs
                .iter()
                .zip(self.setting_diagonal(s))
                .map(|(p, d)| p * d)
                .sum::<f64>();
        }
        Ok(total)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedules serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// Outcome probabilities `⟨b|U†^{⊗N} ρ U^{⊗N}|b⟩` for the setting, where bit
/// `0` of qubit `k` means outcome `+1` of `n̂·σ` on that qubit.
pub fn setting_probabilities(rho: &DenseOperator, setting: &Setting) -> Vec<f64> {
    let u = rotation_to(setting.unit());
    let udag = crate::linalg::pauli::mat2_adjoint(&u);
    let rotated = rho.conjugate_local(&udag);
    (0..rho.dim()).map(|b| rotated.get(b, b).re).collect()
}

#[derive(Deserialize)]
struct TermRepr {
    coeff: Coeff,
    n: [f64; 3],
    scale: f64,
    identity_weight: f64,
}

#[derive(Serialize)]
struct TermOut<'a> {
    coeff: Coeff,
    n: NOut<'a>,
    scale: f64,
    identity_weight: f64,
}

enum NOut<'a> {
    Trivial,
    Setting(&'a Setting),
}

impl Serialize for NOut<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NOut::Trivial => [0i64; 3].serialize(serializer),
            NOut::Setting(s) => s.serialize(serializer),
        }
    }
}

#[derive(Serialize)]
struct ScheduleOut<'a> {
    #[serde(rename = "N")]
    num_qubits: usize,
    terms: Vec<TermOut<'a>>,
    settings: &'a [Setting],
}

#[derive(Deserialize)]
struct ScheduleIn {
    #[serde(rename = "N")]
    num_qubits: usize,
    terms: Vec<TermRepr>,
    #[serde(default)]
    settings: Option<Vec<Setting>>,
}

impl Serialize for Schedule {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|t| TermOut {
                coeff: t.coeff,
                n: t.setting.as_ref().map_or(NOut::Trivial, NOut::Setting),
                scale: t.scale,
                identity_weight: t.identity_weight,
            })
            .collect();
        ScheduleOut {
            num_qubits: self.num_qubits,
            terms,
            settings: &self.settings,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Schedule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ScheduleIn::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            if !(t.scale >= 0.0) {
                return Err(D::Error::custom(format!("term scale {} must be non-negative", t.scale)));
            }
            let trivial = t.n == [0.0; 3];
            if trivial != (t.scale == 0.0) {
                return Err(D::Error::custom("a term has a zero direction or a zero scale, but not both"));
            }
            let setting = if trivial {
                None
            } else {
                Some(Setting::new(t.n).map_err(D::Error::custom)?)
            };
            terms.push(LocalTerm {
                coeff: t.coeff,
                setting,
                scale: t.scale,
                identity_weight: t.identity_weight,
            });
        }
        let schedule = Schedule::new(raw.num_qubits, terms);
        if let Some(listed) = raw.settings {
            let same = listed.len() == schedule.settings.len()
                && listed
                    .iter()
                    .all(|a| schedule.settings.iter().any(|b| a.approx_eq(b, MERGE_TOL)));
            if !same {
                return Err(D::Error::custom("listed settings do not match the terms"));
            }
        }
        Ok(schedule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{bloch_operator, Pauli};

    #[test]
    fn orientation_flip_changes_sign_and_weight() {
        let t = LocalTerm::from_vector(3, Coeff::int(2), [-1.0, 0.0, 0.0], 0.5);
        assert_eq!(t.setting.unwrap().as_ints(), Some([1, 0, 0]));
        assert_eq!(t.coeff, Coeff::int(-2));
        assert_eq!(t.identity_weight, -0.5);
        let direct = DenseOperator::tensor_power(&bloch_operator([-1.0, 0.0, 0.0], 0.5), 3).scale(2.0);
        let s = Schedule::new(3, [t]);
        assert!(s.reconstruct().max_abs_diff(&direct).unwrap() < 1e-14);
    }

    #[test]
    fn trivial_terms_fold_weight() {
        let t = LocalTerm::from_vector(4, Coeff::ratio(1, 3), [0.0; 3], 2.0);
        assert_eq!(t.setting, None);
        assert_eq!(t.coeff, Coeff::ratio(16, 3));
        let s = Schedule::new(4, [t]);
        assert!(s.settings().is_empty());
        assert!((s.constant() - 16.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn merging_and_cancellation() {
        let a = LocalTerm::from_vector(2, Coeff::Float(1.0), [0.0, 0.0, 1.0], 1.0);
        let b = LocalTerm::from_vector(2, Coeff::Float(-1.0), [0.0, 0.0, -1.0], -1.0);
        let c = LocalTerm::from_vector(2, Coeff::Float(1.0), [0.0, 0.0, 1.0], -1.0);
        let s = Schedule::new(2, [a, b, c]);
        assert_eq!(s.terms().len(), 1);
        assert_eq!(s.settings().len(), 1);
    }

    #[test]
    fn z_plus_identity_on_all_plus_outcomes() {
        let t = LocalTerm::from_vector(2, Coeff::int(1), [0.0, 0.0, 1.0], 1.0);
        assert_eq!(t.product_value(2, 0), 4.0);
        let s = Schedule::new(2, [t]);
        let rho = DenseOperator::projector(&crate::linalg::StateVector::basis(2, 0).unwrap());
        assert!((s.expectation(&rho).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn expectation_matches_dense_trace() {
        let s3 = 3f64.sqrt();
        let terms = vec![
            LocalTerm::from_vector(3, Coeff::ratio(3, 10), [1.0, 1.0, 0.0], -1.0),
            LocalTerm::from_vector(3, Coeff::Float(-0.7), [s3, 0.0, -1.0], 0.0),
            LocalTerm::identity(Coeff::int(2)),
        ];
        let s = Schedule::new(3, terms);
        let dense = s.reconstruct();
        let y = DenseOperator::single_qubit(&Pauli::Y.matrix());
        let mut rho = DenseOperator::identity(3).scale(1.0 / 8.0);
        rho.add_scaled(0.05, &y.kron(&y).kron(&y)).unwrap();
        let exact = dense.trace_product(&rho).unwrap().re;
        assert!((s.expectation(&rho).unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let s3 = 3f64.sqrt();
        let terms = vec![
            LocalTerm::from_vector(4, Coeff::ratio(-55, 72), [1.0, -1.0, 0.0], 1.0),
            LocalTerm::from_vector(4, Coeff::Float(0.1 + 0.2), [s3, 0.0, 1.0], 0.0),
            LocalTerm::identity(Coeff::Float(1.0 / 3.0)),
        ];
        let s = Schedule::new(4, terms);
        let json = s.to_json();
        let back = Schedule::from_json(&json).unwrap();
        assert_eq!(back, s);
        assert!(json.contains("\"-55/72\""));
        assert!(Schedule::from_json("{\"N\":2,\"terms\":[{\"coeff\":1,\"n\":[1,0,0],\"scale\":-1,\"identity_weight\":0}]}").is_err());
    }
}
