//! Experiment description: a `key = value` file merged with flag overrides.
//!
//! ```text
//! # scenario 1, medium RT load
//! lambda_rt = 12
//! lambda_nrt = 6
//! mu_rt = 20
//! mu_nrt = 10
//! total = 20
//! r_threshold = 3          # solve / simulate / validate
//! r_values = 2..16         # sweep / optimize (or a list: 2, 3, 5)
//! vary = lambda_rt: 2, 12, 18
//! cl_rt = 300
//! cl_nrt = 50
//! cd_rt = 1000
//! cd_nrt = 1
//! mode = both              # literal | strict | both
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use splitbuf_core::model::{BufferConfig, GeneratorMode, TrafficParams};
use splitbuf_core::sim::{default_horizon, Discipline, SimConfig, DEFAULT_REPLICATIONS, DEFAULT_SEED};
use splitbuf_core::wgos::CostWeights;

use crate::error::{CliError, Result};

const KNOWN_KEYS: &[&str] = &[
    "lambda_rt",
    "lambda_nrt",
    "mu_rt",
    "mu_nrt",
    "total",
    "r_threshold",
    "r_values",
    "vary",
    "cl_rt",
    "cl_nrt",
    "cd_rt",
    "cd_nrt",
    "mode",
    "discipline",
    "seed",
    "replications",
    "horizon",
    "warmup",
];

/// Raw key/value pairs, later keys never silently replacing earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1))
            })?;
            let key = key.trim().to_ascii_lowercase();
            let key = if key == "total_t" { "total".to_string() } else { key };
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown key '{key}'", lineno + 1)));
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn number<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::Config(format!("{key}: cannot parse '{v}'")))
            })
            .transpose()
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.number(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key '{key}'")))
    }
}

/// Which traffic parameter a curve family varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VaryTarget {
    LambdaRt,
    LambdaNrt,
}

impl VaryTarget {
    pub fn name(&self) -> &'static str {
        match self {
            VaryTarget::LambdaRt => "lambda_rt",
            VaryTarget::LambdaNrt => "lambda_nrt",
        }
    }

    pub fn apply(&self, params: &TrafficParams, value: f64) -> TrafficParams {
        let mut p = *params;
        match self {
            VaryTarget::LambdaRt => p.lambda_rt = value,
            VaryTarget::LambdaNrt => p.lambda_nrt = value,
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub params: TrafficParams,
    pub total: usize,
    pub r_threshold: Option<usize>,
    pub r_values: Vec<usize>,
    pub vary: Option<(VaryTarget, Vec<f64>)>,
    pub costs: Option<CostWeights>,
    /// `None` when no mode was given; most commands then use `literal`.
    pub modes: Option<Vec<GeneratorMode>>,
    pub discipline: Option<Discipline>,
    pub seed: u64,
    pub replications: usize,
    pub horizon: Option<f64>,
    pub warmup: Option<f64>,
}

impl ExperimentSpec {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let params = TrafficParams::new(
            raw.required("lambda_rt")?,
            raw.required("lambda_nrt")?,
            raw.required("mu_rt")?,
            raw.required("mu_nrt")?,
        )?;
        let total: usize = raw.required("total")?;
        if total < 2 {
            return Err(CliError::Config(format!("total capacity T must be >= 2, got {total}")));
        }
        let r_threshold: Option<usize> = raw.number("r_threshold")?;
        if let Some(r) = r_threshold {
            check_threshold(r, total)?;
        }
        let r_values = match raw.get("r_values") {
            Some(v) => parse_thresholds(v)?,
            None => (1..total).collect(),
        };
        for &r in &r_values {
            check_threshold(r, total)?;
        }
        let vary = raw.get("vary").map(parse_vary).transpose()?;

        let cost_keys = ["cl_rt", "cl_nrt", "cd_rt", "cd_nrt"];
        let given: Vec<Option<f64>> = cost_keys
            .iter()
            .map(|k| raw.number(k))
            .collect::<Result<_>>()?;
        let costs = match given.as_slice() {
            [Some(a), Some(b), Some(c), Some(d)] => Some(CostWeights::new(*a, *b, *c, *d)?),
            [None, None, None, None] => None,
            _ => {
                return Err(CliError::Config(
                    "cost weights need all of cl_rt, cl_nrt, cd_rt, cd_nrt".into(),
                ))
            }
        };

        let modes = raw.get("mode").map(parse_modes).transpose()?;
        let discipline = raw
            .get("discipline")
            .map(|d| d.parse::<Discipline>())
            .transpose()?;
        let seed = raw.number("seed")?.unwrap_or(DEFAULT_SEED);
        let replications = raw.number("replications")?.unwrap_or(DEFAULT_REPLICATIONS);

        Ok(Self {
            params,
            total,
            r_threshold,
            r_values,
            vary,
            costs,
            modes,
            discipline,
            seed,
            replications,
            horizon: raw.number("horizon")?,
            warmup: raw.number("warmup")?,
        })
    }

    /// The single configuration used by `solve`, `simulate` and `validate`.
    pub fn single_buffer(&self) -> Result<BufferConfig> {
        let r = self
            .r_threshold
            .ok_or_else(|| CliError::Config("missing required key 'r_threshold'".into()))?;
        Ok(BufferConfig::from_total(self.total, r)?)
    }

    pub fn modes(&self) -> Vec<GeneratorMode> {
        self.modes.clone().unwrap_or_else(|| vec![GeneratorMode::PaperLiteral])
    }

    pub fn single_mode(&self) -> Result<GeneratorMode> {
        match self.modes().as_slice() {
            [mode] => Ok(*mode),
            _ => Err(CliError::Config("this command needs a single mode (literal or strict)".into())),
        }
    }

    pub fn sim_config(&self, buffer: BufferConfig, discipline: Discipline) -> Result<SimConfig> {
        let horizon = self.horizon.unwrap_or_else(|| default_horizon(&self.params));
        let config = SimConfig {
            params: self.params,
            buffer,
            discipline,
            horizon,
            warmup: self.warmup.unwrap_or(0.1 * horizon),
            replications: self.replications,
            master_seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

fn check_threshold(r: usize, total: usize) -> Result<()> {
    if r < 1 || r >= total {
        return Err(CliError::Config(format!(
            "threshold R = {r} violates 1 <= R <= T - 1 (T = {total})"
        )));
    }
    Ok(())
}

pub fn parse_modes(s: &str) -> Result<Vec<GeneratorMode>> {
    if s.trim().eq_ignore_ascii_case("both") {
        return Ok(GeneratorMode::ALL.to_vec());
    }
    Ok(vec![s.parse()?])
}

/// `"2..16"` (inclusive), `"2..=16"`, or a comma/space separated list.
fn parse_thresholds(s: &str) -> Result<Vec<usize>> {
    let bad = || CliError::Config(format!("r_values: cannot parse '{s}'"));
    let values: Vec<usize> = if let Some((lo, hi)) = s.split_once("..") {
        let hi = hi.trim_start_matches('=');
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        (lo..=hi).collect()
    } else {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(CliError::Config("r_values is empty".into()));
    }
    Ok(values)
}

/// `"lambda_rt: 2, 12, 18"`.
fn parse_vary(s: &str) -> Result<(VaryTarget, Vec<f64>)> {
    let (name, list) = s
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("vary: expected 'parameter: v1, v2, ..', got '{s}'")))?;
    let target = match name.trim() {
        "lambda_rt" => VaryTarget::LambdaRt,
        "lambda_nrt" => VaryTarget::LambdaNrt,
        other => {
            return Err(CliError::Config(format!(
                "vary: can only vary lambda_rt or lambda_nrt, got '{other}'"
            )))
        }
    };
    let values = list
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x >= 0.0)
                .ok_or_else(|| CliError::Config(format!("vary: bad value '{}'", v.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((target, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "lambda_rt = 12\nlambda_nrt = 6\nmu_rt = 20\nmu_nrt = 10\ntotal = 20\n";

    #[test]
    fn parses_full_file() {
        let text = format!(
            "{BASE}# comment\nr_threshold = 3  # trailing\nr_values = 2..16\nvary = lambda_rt: 2, 12, 18\n\
             cl_rt = 300\ncl_nrt = 50\ncd_rt = 1000\ncd_nrt = 1\nmode = both\ndiscipline = preemptive\nseed = 9\n"
        );
        let spec = ExperimentSpec::from_raw(&RawConfig::parse(&text).unwrap()).unwrap();
        assert_eq!(spec.r_threshold, Some(3));
        assert_eq!(spec.r_values, (2..=16).collect::<Vec<_>>());
        assert_eq!(spec.vary, Some((VaryTarget::LambdaRt, vec![2.0, 12.0, 18.0])));
        assert_eq!(spec.modes().len(), 2);
        assert_eq!(spec.discipline, Some(Discipline::PreemptiveResume));
        assert_eq!(spec.seed, 9);
        assert_eq!(spec.costs.unwrap().cd_rt, 1000.0);
        assert_eq!(spec.single_buffer().unwrap().n_capacity(), 17);
    }

    #[test]
    fn threshold_list_forms() {
        assert_eq!(parse_thresholds("2..=4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_thresholds("5, 3 9").unwrap(), vec![5, 3, 9]);
        assert!(parse_thresholds("a..b").is_err());
    }

    #[test]
    fn rejects_threshold_at_capacity() {
        let text = format!("{BASE}r_threshold = 20\n");
        let err = ExperimentSpec::from_raw(&RawConfig::parse(&text).unwrap()).unwrap_err();
        assert!(err.to_string().contains("1 <= R <= T - 1"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(RawConfig::parse("lambda_rt 12").is_err());
        assert!(RawConfig::parse("speed = 3").is_err());
        assert!(RawConfig::parse("total = 3\ntotal = 4").is_err());
        let partial_costs = format!("{BASE}cl_rt = 1\n");
        assert!(ExperimentSpec::from_raw(&RawConfig::parse(&partial_costs).unwrap()).is_err());
        let bad_vary = format!("{BASE}vary = mu_rt: 1, 2\n");
        assert!(ExperimentSpec::from_raw(&RawConfig::parse(&bad_vary).unwrap()).is_err());
        assert!(ExperimentSpec::from_raw(&RawConfig::parse("lambda_rt = 1").unwrap()).is_err());
    }
}
