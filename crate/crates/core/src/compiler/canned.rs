//! Hand-optimized decompositions of two Dicke projectors.
//!
//! `[v + w]` denotes `(v·σ + w𝟙)^{⊗N}` and `±` sums over both signs.

use super::coeff::Coeff;
use super::mermin::trig_terms;
use super::schedule::{LocalTerm, Schedule};
use crate::error::{Error, Result};

const X: [f64; 3] = [1.0, 0.0, 0.0];
const Y: [f64; 3] = [0.0, 1.0, 0.0];
const Z: [f64; 3] = [0.0, 0.0, 1.0];

/// Names accepted by [`canned_decomposition`].
pub const CANNED_NAMES: [&str; 2] = ["D63", "D42"];

struct Builder {
    n: usize,
    terms: Vec<LocalTerm>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    /// `c [Σ parts + w]`.
    fn term(&mut self, c: Coeff, parts: &[[f64; 3]], w: f64) {
        let mut v = [0.0; 3];
        for p in parts {
            (0..3).for_each(|k| v[k] += p[k]);
        }
        self.terms.push(LocalTerm::from_vector(self.n, c, v, w));
    }

    /// `c [a ± 𝟙]`.
    fn pm_identity(&mut self, c: Coeff, parts: &[[f64; 3]]) {
        self.term(c, parts, 1.0);
        self.term(c, parts, -1.0);
    }

    /// `c [a ± b]`, optionally with `± 𝟙` on top.
    fn pm(&mut self, c: Coeff, a: [f64; 3], b: [f64; 3], with_identity: bool) {
        for s in [1.0, -1.0] {
            let sb = [s * b[0], s * b[1], s * b[2]];
            if with_identity {
                self.pm_identity(c, &[a, sb]);
            } else {
                self.term(c, &[a, sb], 0.0);
            }
        }
    }

    fn build(self) -> Schedule {
        Schedule::new(self.n, self.terms)
    }
}

/// `64 |D_6^{(3)}⟩⟨D_6^{(3)}|` with 21 settings.
///
/// The Mermin parts use `(2^{N−1}/N) Σ_k (−1)^k [cos(kπ/N) a + sin(kπ/N) b]^{⊗N}`
/// with `a ∈ {𝟙, x, y}` and `b = z`, which at `N = 6` is minus the
/// combinatorial `Mermin_{a,z}`.
fn dicke_6_3() -> Schedule {
    let r = Coeff::ratio;
    let mut b = Builder::new(6);
    b.term(r(-3, 5), &[], 1.0);
    b.pm_identity(r(3, 10), &[X]);
    b.term(r(-3, 5), &[X], 0.0);
    b.pm_identity(r(3, 10), &[Y]);
    b.term(r(-3, 5), &[Y], 0.0);
    b.pm_identity(r(1, 5), &[Z]);
    b.term(r(-1, 5), &[Z], 0.0);
    b.terms.extend(trig_terms(6, r(1, 5), None, Some(Z)));
    b.pm(r(1, 20), X, Y, true);
    b.pm(r(-1, 20), X, Z, true);
    b.pm(r(-1, 20), Y, Z, true);
    for sy in [1.0, -1.0] {
        for sz in [1.0, -1.0] {
            b.term(r(-1, 20), &[X, [0.0, sy, 0.0], [0.0, 0.0, sz]], 0.0);
        }
    }
    b.pm(r(1, 5), X, Z, false);
    b.pm(r(1, 5), Y, Z, false);
    b.pm(r(1, 10), X, Y, false);
    b.terms.extend(trig_terms(6, r(3, 5), Some(X), Some(Z)));
    b.terms.extend(trig_terms(6, r(3, 5), Some(Y), Some(Z)));
    b.build()
}

/// `16 |D_4^{(2)}⟩⟨D_4^{(2)}|` with 9 settings.
fn dicke_4_2() -> Schedule {
    let r = Coeff::ratio;
    let mut b = Builder::new(4);
    b.term(r(2, 3), &[X], 0.0);
    b.pm_identity(r(1, 3), &[X]);
    b.term(r(2, 3), &[Y], 0.0);
    b.pm_identity(r(1, 3), &[Y]);
    b.term(r(8, 3), &[Z], 0.0);
    b.pm_identity(r(-1, 6), &[Z]);
    b.pm(r(-1, 3), X, Z, false);
    b.pm(r(-1, 3), Y, Z, false);
    b.pm(r(1, 6), X, Y, false);
    b.build()
}

/// A canned schedule by name: `"D63"` or `"D42"`.
pub fn canned_decomposition(name: &str) -> Result<Schedule> {
    match name {
        "D63" => Ok(dicke_6_3()),
        "D42" => Ok(dicke_4_2()),
        other => Err(Error::UnknownName(other.to_string())),
    }
}
