//! The `--config` file: one `key = value` per line, `#` starts a comment.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use symwit::counts::{SignMap, BOOTSTRAP_RESAMPLES};
use symwit::optimize::SolverConfig;

use crate::UsageError;

#[derive(Clone, Debug)]
pub struct Settings {
    pub solver: SolverConfig,
    pub sign_map: Option<SignMap>,
    pub bootstrap_resamples: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            sign_map: None,
            bootstrap_resamples: BOOTSTRAP_RESAMPLES,
        }
    }
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {}: expected `key = value`", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "sign_map" => s.sign_map = Some(value.parse()?),
                "bootstrap_resamples" => {
                    s.bootstrap_resamples = value
                        .parse()
                        .map_err(|_| UsageError(format!("config line {}: bad count `{value}`", i + 1)))?
                }
                _ => {
                    if !s.solver.set(key, value)? {
                        return Err(UsageError(format!("config line {}: unknown key `{key}`", i + 1)).into());
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn load(path: Option<&Path>, seed: Option<u64>) -> Result<Self> {
        let mut s = match path {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
                Self::parse(&text)?
            }
            None => Self::default(),
        };
        if let Some(seed) = seed {
            s.solver.seed = seed;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_and_comments() {
        let s = Settings::parse("# solver\nseed = 4\ncut_tol=1e-7\nsign_map = +-+\n\nbootstrap_resamples = 200 # fewer\n").unwrap();
        assert_eq!(s.solver.seed, 4);
        assert_eq!(s.solver.cut_tol, 1e-7);
        assert_eq!(s.sign_map.unwrap().to_string(), "+-+");
        assert_eq!(s.bootstrap_resamples, 200);
        assert!(Settings::parse("colour = blue").is_err());
        assert!(Settings::parse("seed").is_err());
    }
}
