//! Witness values from per-setting measurement counts.
//!
//! Each record holds a collective setting, one `±` outcome per qubit in
//! qubit order, and a count. `+` is the `+1` eigenvalue of `n̂·σ` for the
//! direction as logged; directions are matched to schedule settings after
//! canonicalization, and outcomes logged along `−n̂` are flipped.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::compiler::{setting_probabilities, Coeff, Schedule, Setting};
use crate::error::{Error, Result};
use crate::linalg::DenseOperator;
use crate::witness::WitnessSpec;

/// Default number of bootstrap resamples.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Tolerance when matching logged directions to schedule settings.
const MATCH_TOL: f64 = 1e-9;

/// Outcomes of one product measurement and how often they occurred.
#[derive(Clone, Debug, PartialEq)]
pub struct CountRecord {
    pub setting: [f64; 3],
    /// `true` for outcome `−1`.
    pub minus: Vec<bool>,
    pub count: u64,
}

impl CountRecord {
    pub fn outcome_string(&self) -> String {
        self.minus.iter().map(|&m| if m { '-' } else { '+' }).collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Direction {
    Ints([i64; 3]),
    Floats([f64; 3]),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordRepr {
    setting: Direction,
    outcomes: String,
    count: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CountsDataset {
    num_qubits: usize,
    records: Vec<CountRecord>,
}

impl CountsDataset {
    pub fn new(num_qubits: usize, records: Vec<CountRecord>) -> Result<Self> {
        for r in &records {
            if r.minus.len() != num_qubits {
                return Err(Error::DimensionMismatch {
                    expected: num_qubits,
                    found: r.minus.len(),
                });
            }
            Setting::new(r.setting)?;
        }
        Ok(Self { num_qubits, records })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn records(&self) -> &[CountRecord] {
        &self.records
    }

    pub fn total_counts(&self) -> u64 {
        self.records.iter().map(|r| r.count).sum()
    }

    /// Parses newline-delimited JSON; blank lines are skipped.
    pub fn from_ndjson(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        let mut num_qubits = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: i + 1, message };
            let repr: RecordRepr = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
            let minus = repr
                .outcomes
                .chars()
                .map(|c| match c {
                    '+' => Ok(false),
                    '-' => Ok(true),
                    other => Err(parse_err(format!("outcome `{other}` is not `+` or `-`"))),
                })
                .collect::<Result<Vec<bool>>>()?;
            match num_qubits {
                None => num_qubits = Some(minus.len()),
                Some(n) if n != minus.len() => {
                    return Err(parse_err(format!("expected {n} outcomes, found {}", minus.len())))
                }
                _ => {}
            }
            let setting = match repr.setting {
                Direction::Ints(v) => v.map(|x| x as f64),
                Direction::Floats(v) => v,
            };
            Setting::new(setting).map_err(|e| parse_err(e.to_string()))?;
            records.push(CountRecord {
                setting,
                minus,
                count: repr.count,
            });
        }
        let num_qubits = num_qubits.ok_or_else(|| Error::Parse {
            line: 0,
            message: "no records".into(),
        })?;
        Self::new(num_qubits, records)
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let ints = r.setting.map(|x| x as i64);
            let setting = if ints.iter().zip(&r.setting).all(|(i, x)| *i as f64 == *x) {
                Direction::Ints(ints)
            } else {
                Direction::Floats(r.setting)
            };
            let repr = RecordRepr {
                setting,
                outcomes: r.outcome_string(),
                count: r.count,
            };
            out.push_str(&serde_json::to_string(&repr).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

/// Per-qubit relabeling of detector outcomes: `true` swaps `+` and `−`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignMap(pub Vec<bool>);

impl std::str::FromStr for SignMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(false),
                '-' => Ok(true),
                other => Err(Error::InvalidArgument(format!("sign map entry `{other}` is not `+` or `-`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignMap)
    }
}

impl fmt::Display for SignMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|&m| f.write_str(if m { "-" } else { "+" }))
    }
}

/// Counts per setting binned by the number of `−1` outcomes, which is all
/// a collective tensor-power term depends on.
#[derive(Clone, Debug)]
struct Histograms {
    num_qubits: usize,
    /// `bins[s][h]` for schedule setting `s`.
    bins: Vec<Vec<u64>>,
}

impl Histograms {
    fn new(schedule: &Schedule, data: &CountsDataset, signs: Option<&SignMap>) -> Result<Self> {
        let n = schedule.num_qubits();
        if data.num_qubits != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: data.num_qubits,
            });
        }
        if let Some(s) = signs {
            if s.0.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.0.len(),
                });
            }
        }
        let settings = schedule.settings();
        let mut bins = vec![vec![0u64; n + 1]; settings.len()];
        for r in &data.records {
            let logged = Setting::new(r.setting)?;
            let idx = settings
                .iter()
                .position(|s| s.approx_eq(&logged, MATCH_TOL))
                .ok_or_else(|| Error::UnexpectedSetting(logged.to_string()))?;
            let flip = logged.orientation(r.setting) < 0.0;
            let minus = r
                .minus
                .iter()
                .enumerate()
                .filter(|(k, &m)| m ^ flip ^ signs.is_some_and(|s| s.0[*k]))
                .count();
            bins[idx][minus] += r.count;
        }
        for (s, b) in settings.iter().zip(&bins) {
            if b.iter().sum::<u64>() == 0 {
                let present = data.records.iter().any(|r| Setting::new(r.setting).is_ok_and(|x| x.approx_eq(s, MATCH_TOL)));
                return Err(if present {
                    Error::ZeroCounts(s.to_string())
                } else {
                    Error::MissingSetting(s.to_string())
                });
            }
        }
        Ok(Self { num_qubits: n, bins })
    }

    /// Estimate of every term, identity terms included.
    fn term_estimates(&self, schedule: &Schedule) -> Vec<f64> {
        let settings = schedule.settings();
        let n = self.num_qubits;
        schedule
            .terms()
            .iter()
            .map(|t| match &t.setting {
                None => 1.0,
                Some(s) => {
                    let idx = settings.iter().position(|x| x.approx_eq(s, 1e-12)).expect("schedule setting");
                    let b = &self.bins[idx];
                    let total: u64 = b.iter().sum();
                    b.iter()
                        .enumerate()
                        .map(|(h, &c)| c as f64 * t.product_value(n, h))
                        .sum::<f64>()
                        / total as f64
                }
            })
            .collect()
    }

    fn value(&self, schedule: &Schedule) -> f64 {
        schedule
            .terms()
            .iter()
            .zip(self.term_estimates(schedule))
            .map(|(t, e)| t.coeff.value() * e)
            .sum()
    }

    /// Multinomial resample of every setting with its observed frequencies.
    fn resample(&self, rng: &mut ChaCha8Rng) -> Self {
        let bins = self
            .bins
            .iter()
            .map(|b| {
                let total: u64 = b.iter().sum();
                multinomial(total, &b.iter().map(|&c| c as f64 / total as f64).collect::<Vec<_>>(), rng)
            })
            .collect();
        Self {
            num_qubits: self.num_qubits,
            bins,
        }
    }
}

/// Multinomial draw by conditional binomials.
fn multinomial(trials: u64, probs: &[f64], rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut out = vec![0; probs.len()];
    let mut left = trials;
    let mut mass = 1.0;
    for (k, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if k + 1 == probs.len() || mass <= p {
            out[k] = left;
            break;
        }
        let q = (p.max(0.0) / mass).clamp(0.0, 1.0);
        let draw = Binomial::new(left, q).expect("probability in [0, 1]").sample(rng);
        out[k] = draw;
        left -= draw;
        mass -= p.max(0.0);
    }
    out
}

/// One term of the breakdown in [`EvaluationResult`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermEstimate {
    /// `None` for multiples of the identity.
    pub setting: Option<Setting>,
    pub coeff: Coeff,
    pub scale: f64,
    pub identity_weight: f64,
    /// Empirical mean of `Π_k (w + o_k·scale)`.
    pub estimator: f64,
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationResult {
    pub witness_value: f64,
    pub standard_error: f64,
    pub fidelity_bound: Option<f64>,
    pub fidelity_bound_error: Option<f64>,
    pub per_term: Vec<TermEstimate>,
}

/// Estimates `Σ coeff · (scale·n̂·σ + w𝟙)^{⊗N}` from counts, with the
/// bootstrap standard error over `resamples` resamples.
pub fn evaluate_counts(
    schedule: &Schedule,
    data: &CountsDataset,
    signs: Option<&SignMap>,
    resamples: usize,
    seed: u64,
) -> Result<EvaluationResult> {
    let hist = Histograms::new(schedule, data, signs)?;
    let per_term: Vec<TermEstimate> = schedule
        .terms()
        .iter()
        .zip(hist.term_estimates(schedule))
        .map(|(t, estimator)| TermEstimate {
            setting: t.setting,
            coeff: t.coeff,
            scale: t.scale,
            identity_weight: t.identity_weight,
            estimator,
            contribution: t.coeff.value() * estimator,
        })
        .collect();
    let witness_value = per_term.iter().map(|t| t.contribution).sum();
    let standard_error = if resamples == 0 {
        0.0
    } else {
        bootstrap_histograms(&hist, schedule, resamples, seed)
    };
    Ok(EvaluationResult {
        witness_value,
        standard_error,
        fidelity_bound: None,
        fidelity_bound_error: None,
        per_term,
    })
}

/// [`evaluate_counts`] on the schedule of `w`, adding the fidelity bound
/// `λ² − ⟨W⟩/α` when the witness has an `α`.
pub fn evaluate_witness_counts(
    w: &WitnessSpec,
    data: &CountsDataset,
    signs: Option<&SignMap>,
    resamples: usize,
    seed: u64,
) -> Result<EvaluationResult> {
    let mut result = evaluate_counts(&w.schedule()?, data, signs, resamples, seed)?;
    if let Some(alpha) = w.alpha() {
        result.fidelity_bound = Some(w.lambda_sq() - result.witness_value / alpha);
        result.fidelity_bound_error = Some(result.standard_error / alpha);
    }
    Ok(result)
}

fn bootstrap_histograms(hist: &Histograms, schedule: &Schedule, resamples: usize, seed: u64) -> f64 {
    let values: Vec<f64> = (0..resamples)
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(b as u64));
            hist.resample(&mut rng).value(schedule)
        })
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (values.len().max(2) - 1) as f64;
    var.sqrt()
}

/// Standard deviation of the estimate over `resamples` multinomial
/// resamples per setting; resample `b` uses seed `seed + b`.
pub fn bootstrap_error(
    data: &CountsDataset,
    schedule: &Schedule,
    signs: Option<&SignMap>,
    resamples: usize,
    seed: u64,
) -> Result<f64> {
    if resamples < 100 {
        return Err(Error::InvalidArgument(format!("bootstrap needs at least 100 resamples, got {resamples}")));
    }
    let hist = Histograms::new(schedule, data, signs)?;
    Ok(bootstrap_histograms(&hist, schedule, resamples, seed))
}

/// Samples `shots` outcomes per schedule setting from the Born
/// distribution of `rho`; setting `i` uses seed `seed + i`.
pub fn simulate_counts(rho: &DenseOperator, schedule: &Schedule, shots: u64, seed: u64) -> Result<CountsDataset> {
    let n = schedule.num_qubits();
    if rho.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho.num_qubits(),
        });
    }
    rho.check_density(1e-8)?;
    let mut records = Vec::new();
    for (i, setting) in schedule.settings().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let mut probs: Vec<f64> = setting_probabilities(rho, setting).iter().map(|p| p.max(0.0)).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        let draws = multinomial(shots, &probs, &mut rng);
        for (pattern, &count) in draws.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let minus = (0..n).map(|k| pattern >> (n - 1 - k) & 1 == 1).collect();
            records.push(CountRecord {
                setting: setting.components(),
                minus,
                count,
            });
        }
    }
    CountsDataset::new(n, records)
}
