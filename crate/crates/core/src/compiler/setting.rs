//! Collective measurement settings `{a, a, …, a}` with `a = n·σ`.

use std::fmt;

use serde::de::Deserializer;
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest denominator tried when recognizing a rational direction.
const MAX_DENOMINATOR: i64 = 64;

/// A measurement direction up to sign and positive rescaling.
///
/// Directions with rational component ratios are stored as the primitive
/// integer vector whose first nonzero component is positive. Other
/// directions (e.g. `√3 x + z`) are stored as unit vectors with the same
/// sign rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Setting {
    n: [f64; 3],
    integer: bool,
}

impl Setting {
    /// Canonical setting of the direction `v`.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !(max > 0.0) || !max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "setting direction {v:?} must be nonzero and finite"
            )));
        }
        let mut v = v;
        for x in v.iter_mut() {
            if x.abs() < 1e-12 * max {
                *x = 0.0;
            }
        }
        if let Some(ints) = rational_direction(v, max) {
            return Ok(Self::from_primitive(ints));
        }
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let mut u = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            v
        } else {
            [v[0] / norm, v[1] / norm, v[2] / norm]
        };
        if first_nonzero(&u) < 0.0 {
            u = [-u[0], -u[1], -u[2]];
        }
        Ok(Self { n: u, integer: false })
    }

    /// Canonical setting of an integer direction.
    pub fn from_ints(v: [i64; 3]) -> Result<Self> {
        if v == [0, 0, 0] {
            return Err(Error::InvalidArgument("setting direction must be nonzero".into()));
        }
        let g = num_integer::gcd(num_integer::gcd(v[0], v[1]), v[2]);
        let mut p = [v[0] / g, v[1] / g, v[2] / g];
        if p.iter().find(|&&x| x != 0).copied().unwrap_or(0) < 0 {
            p = [-p[0], -p[1], -p[2]];
        }
        Ok(Self::from_primitive(p))
    }

    fn from_primitive(p: [i64; 3]) -> Self {
        Self {
            n: [p[0] as f64, p[1] as f64, p[2] as f64],
            integer: true,
        }
    }

    /// Stored components: the primitive integer vector or the unit vector.
    pub fn components(&self) -> [f64; 3] {
        self.n
    }

    pub fn as_ints(&self) -> Option<[i64; 3]> {
        self.integer
            .then(|| [self.n[0] as i64, self.n[1] as i64, self.n[2] as i64])
    }

    pub fn norm(&self) -> f64 {
        (self.n[0] * self.n[0] + self.n[1] * self.n[1] + self.n[2] * self.n[2]).sqrt()
    }

    pub fn unit(&self) -> [f64; 3] {
        let r = self.norm();
        [self.n[0] / r, self.n[1] / r, self.n[2] / r]
    }

    /// Same setting within `tol` on the unit vectors.
    pub fn approx_eq(&self, other: &Setting, tol: f64) -> bool {
        if self.integer && other.integer {
            return self.n == other.n;
        }
        let (a, b) = (self.unit(), other.unit());
        (0..3).all(|k| (a[k] - b[k]).abs() <= tol)
    }

    /// Sign `±1` with `v = sign·|v|·unit()`, for `v` parallel to the setting.
    pub fn orientation(&self, v: [f64; 3]) -> f64 {
        let u = self.unit();
        let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        if dot < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Total order used for deterministic output.
    pub fn sort_key(&self) -> (u8, [u64; 3]) {
        let key = |x: f64| {
            let bits = x.to_bits();
            if x.is_sign_negative() {
                !bits
            } else {
                bits | (1 << 63)
            }
        };
        (u8::from(!self.integer), [key(self.n[0]), key(self.n[1]), key(self.n[2])])
    }
}

fn first_nonzero(v: &[f64; 3]) -> f64 {
    v.iter().copied().find(|x| *x != 0.0).unwrap_or(0.0)
}

/// Primitive integer vector parallel to `v` if the component ratios are
/// rational with denominator at most [`MAX_DENOMINATOR`].
fn rational_direction(v: [f64; 3], max: f64) -> Option<[i64; 3]> {
    let r = [v[0] / max, v[1] / max, v[2] / max];
    for q in 1..=MAX_DENOMINATOR {
        let qf = q as f64;
        let scaled = [r[0] * qf, r[1] * qf, r[2] * qf];
        let ok = scaled
            .iter()
            .all(|x| (x - x.round()).abs() <= 1e-9 * qf);
        if ok {
            let ints = [scaled[0].round() as i64, scaled[1].round() as i64, scaled[2].round() as i64];
            return Setting::from_ints(ints).ok().and_then(|s| s.as_ints());
        }
    }
    None
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_ints() {
            Some(p) => write!(f, "[{},{},{}]", p[0], p[1], p[2]),
            None => write!(f, "[{},{},{}]", self.n[0], self.n[1], self.n[2]),
        }
    }
}

impl Serialize for Setting {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(3)?;
        match self.as_ints() {
            Some(p) => {
                for x in p {
                    t.serialize_element(&x)?;
                }
            }
            None => {
                for x in self.n {
                    t.serialize_element(&x)?;
                }
            }
        }
        t.end()
    }
}

impl<'de> Deserialize<'de> for Setting {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = <[f64; 3]>::deserialize(deserializer)?;
        Setting::new(v).map_err(serde::de::Error::custom)
    }
}

/// All settings `n` with integer components and `1 ≤ |n_x|+|n_y|+|n_z| ≤ N`,
/// deduplicated up to sign and rescaling.
pub fn enumerate_integer_settings(num_qubits: usize) -> Vec<Setting> {
    let n = num_qubits as i64;
    let mut out: Vec<Setting> = Vec::new();
    for x in -n..=n {
        for y in -n..=n {
            for z in -n..=n {
                let l1 = x.abs() + y.abs() + z.abs();
                if l1 == 0 || l1 > n {
                    continue;
                }
                let s = Setting::from_ints([x, y, z]).expect("nonzero");
                if s.as_ints() == Some([x, y, z]) {
                    out.push(s);
                }
            }
        }
    }
    out.sort_by_key(|s| s.sort_key());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let a = Setting::from_ints([2, -4, 6]).unwrap();
        assert_eq!(a.as_ints(), Some([1, -2, 3]));
        assert_eq!(Setting::from_ints([-1, 2, -3]).unwrap(), a);
        assert_eq!(Setting::new([0.5, -1.0, 1.5]).unwrap(), a);
        assert_eq!(Setting::from_ints([0, -3, 0]).unwrap().as_ints(), Some([0, 1, 0]));
        assert!(Setting::from_ints([0, 0, 0]).is_err());
        assert!(Setting::new([0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn irrational_directions_become_unit_vectors() {
        let s3 = 3f64.sqrt();
        let a = Setting::new([-s3, 0.0, -1.0]).unwrap();
        assert!(a.as_ints().is_none());
        let u = a.components();
        assert!((u[0] - s3 / 2.0).abs() < 1e-15 && (u[2] - 0.5).abs() < 1e-15);
        assert_eq!(Setting::new(u).unwrap(), a);
        assert!(a.approx_eq(&Setting::new([s3 * 7.0, 0.0, 7.0]).unwrap(), 1e-12));
        assert_eq!(a.orientation([-s3, 0.0, -1.0]), -1.0);
    }

    #[test]
    fn tiny_components_are_cleaned() {
        let a = Setting::new([1.0, 1e-17, -6.123e-17]).unwrap();
        assert_eq!(a.as_ints(), Some([1, 0, 0]));
    }

    #[test]
    fn serde_keeps_integers() {
        let a = Setting::from_ints([1, -1, 0]).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), "[1,-1,0]");
        let back: Setting = serde_json::from_str("[-2,2,0]").unwrap();
        assert_eq!(back, a);
        let b = Setting::new([3f64.sqrt(), 0.0, 1.0]).unwrap();
        let back: Setting = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn small_enumeration() {
        assert_eq!(enumerate_integer_settings(1).len(), 3);
        assert_eq!(enumerate_integer_settings(2).len(), 9);
    }
}
