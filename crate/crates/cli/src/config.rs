//! Experiment configuration in a plain `key = value` text format.
//!
//! ```text
//! # comments start with '#'
//! experiment = family-verify
//! seed = 7
//! k_min = 12
//! k_max = 14
//! lambda = 3/12
//! out = family.json
//! plot = family.svg
//! ```
//!
//! `experiment` is required. `seed` defaults to 0, and `out` and `plot` are
//! optional paths. Every other key is an experiment parameter. Keys are
//! case-sensitive, `-` and `_` are interchangeable, and duplicate or unknown
//! keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    FamilyVerify,
    KapovichSeparate,
    BsCompare,
    WreathEmbed,
    PhiXi,
    LinealAntichain,
    DeltaScan,
    IsospecBs,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::FamilyVerify,
        Experiment::KapovichSeparate,
        Experiment::BsCompare,
        Experiment::WreathEmbed,
        Experiment::PhiXi,
        Experiment::LinealAntichain,
        Experiment::DeltaScan,
        Experiment::IsospecBs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::FamilyVerify => "family-verify",
            Experiment::KapovichSeparate => "kapovich-separate",
            Experiment::BsCompare => "bs-compare",
            Experiment::WreathEmbed => "wreath-embed",
            Experiment::PhiXi => "phi-xi",
            Experiment::LinealAntichain => "lineal-antichain",
            Experiment::DeltaScan => "delta-scan",
            Experiment::IsospecBs => "isospec-bs",
        }
    }

    /// Accepted parameters and their defaults.
    pub fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Experiment::FamilyVerify => &[("k_min", "12"), ("k_max", "14"), ("lambda", "3/12"), ("f_max", "8")],
            Experiment::KapovichSeparate => &[("s", "12"), ("t", "13"), ("probes", "4"), ("ratio", "2")],
            Experiment::BsCompare => &[("samples", "1000"), ("max_len", "20"), ("n_max", "16"), ("witnesses", "12")],
            Experiment::WreathEmbed => &[("m", "4"), ("n", "2"), ("samples", "500"), ("witnesses", "10"), ("radius", "4")],
            Experiment::PhiXi => &[("xi", "sqrt(2)"), ("eta", "sqrt(3)"), ("n_max", "10000"), ("probe_n", "1000")],
            Experiment::LinealAntichain => &[("lambda", "3/10"), ("mu", "7/10"), ("c", "3"), ("i_max", "100")],
            Experiment::DeltaScan => &[("source", "random-trees"), ("cells", "20"), ("points", "50")],
            Experiment::IsospecBs => &[("length", "12"), ("n_max", "8")],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
                CliError::validation(format!("unknown experiment {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Resolved parameters, defaults filled in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    fn raw(&self, key: &str) -> &str {
        // every key read by an experiment has a default
        self.0.get(key).map(String::as_str).unwrap_or_default()
    }

    fn bad(key: &str, value: &str, what: &str) -> CliError {
        CliError::validation(format!("parameter {key} = {value:?} is not {what}"))
    }

    pub fn string(&self, key: &str) -> String {
        self.raw(key).to_string()
    }

    pub fn usize(&self, key: &str) -> CliResult<usize> {
        let v = self.raw(key);
        v.parse().map_err(|_| Self::bad(key, v, "a non-negative integer"))
    }

    pub fn u64(&self, key: &str) -> CliResult<u64> {
        let v = self.raw(key);
        v.parse().map_err(|_| Self::bad(key, v, "a non-negative integer"))
    }

    pub fn i64(&self, key: &str) -> CliResult<i64> {
        let v = self.raw(key);
        v.parse().map_err(|_| Self::bad(key, v, "an integer"))
    }

    pub fn rational(&self, key: &str) -> CliResult<Rational64> {
        let v = self.raw(key);
        hypstruct::real::parse_rational(v).map_err(|_| Self::bad(key, v, "a rational"))
    }

    pub fn real(&self, key: &str) -> CliResult<f64> {
        let v = self.raw(key);
        parse_real(v).ok_or_else(|| Self::bad(key, v, "a real number"))
    }

    pub fn usize_list(&self, key: &str) -> CliResult<Vec<usize>> {
        parse_usize_list(self.raw(key)).ok_or_else(|| Self::bad(key, self.raw(key), "a comma-separated list of integers"))
    }
}

/// A decimal, `p/q`, or `sqrt(x)`.
pub fn parse_real(text: &str) -> Option<f64> {
    let t = text.trim();
    let x = if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        parse_real(inner)?.sqrt()
    } else if let Ok(r) = hypstruct::real::parse_rational(t) {
        hypstruct::real::rational_to_f64(&r)
    } else {
        t.parse::<f64>().ok()?
    };
    x.is_finite().then_some(x)
}

pub fn parse_usize_list(text: &str) -> Option<Vec<usize>> {
    let items: Option<Vec<usize>> = text.split(',').map(|s| s.trim().parse().ok()).collect();
    items.filter(|v| !v.is_empty())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub params: Params,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub plot: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Validates `params` against the experiment and fills in defaults.
    pub fn new(experiment: Experiment, seed: u64, params: impl IntoIterator<Item = (String, String)>) -> CliResult<Self> {
        let defaults = experiment.defaults();
        let mut resolved: BTreeMap<String, String> =
            defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        for (key, value) in params {
            let key = key.replace('-', "_");
            if !resolved.contains_key(&key) {
                let allowed: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
                return Err(CliError::validation(format!(
                    "unknown parameter {key:?} for {experiment}; accepted: {}",
                    allowed.join(", ")
                )));
            }
            resolved.insert(key, value.trim().to_string());
        }
        Ok(ExperimentConfig {
            experiment,
            seed,
            params: Params(resolved),
            out: None,
            plot: None,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut seen = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::validation(format!("line {}: expected `key = value`", no + 1)))?;
            let key = key.trim().replace('-', "_");
            if key.is_empty() {
                return Err(CliError::validation(format!("line {}: empty key", no + 1)));
            }
            if seen.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::validation(format!("line {}: duplicate key {key:?}", no + 1)));
            }
        }
        let experiment: Experiment = seen
            .remove("experiment")
            .ok_or_else(|| CliError::validation("missing `experiment`"))?
            .parse()?;
        let seed = match seen.remove("seed") {
            Some(s) => s.parse().map_err(|_| CliError::validation(format!("seed {s:?} is not a 64-bit unsigned integer")))?,
            None => 0,
        };
        let out = seen.remove("out").map(PathBuf::from);
        let plot = seen.remove("plot").map(PathBuf::from);
        let mut cfg = ExperimentConfig::new(experiment, seed, seen)?;
        cfg.out = out;
        cfg.plot = plot;
        Ok(cfg)
    }
}
