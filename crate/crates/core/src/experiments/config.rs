//! Experiment configuration files.
//!
//! Grammar, one item per line:
//!
//! ```text
//! # comment
//! [section]
//! key = value   # trailing comment
//! ```
//!
//! `#` starts a comment anywhere on a line. Keys are scoped to the most recent section header. Order does not matter,
//! duplicate and unknown keys are rejected, and every key the file omits takes
//! its default. Lists are comma separated; commas inside parentheses do not
//! split. The resolved configuration echoes as `# `-prefixed lines that parse
//! back to the same value.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use super::Experiment;
use crate::analysis::CurvatureDist;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::optimize::Optimizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Text,
    Count,
    Seed,
    Real,
    RealList,
    TextList,
    ModelList,
    Optimizer,
    Curvature,
}

struct Key {
    section: &'static str,
    name: &'static str,
    default: &'static str,
    kind: Kind,
}

const fn key(section: &'static str, name: &'static str, default: &'static str, kind: Kind) -> Key {
    Key {
        section,
        name,
        default,
        kind,
    }
}

const COMMON: &[Key] = &[
    key("experiment", "seed", "0", Kind::Seed),
    key("experiment", "output", "-", Kind::Text),
];

const SPARSITY: &[Key] = &[
    key("experiment", "replicates", "3", Kind::Count),
    key("model", "models", "linear(d=50), hadamard(d=50)", Kind::ModelList),
    key("data", "noise_sd", "1", Kind::Real),
    key("trainer", "optimizer", "sgd", Kind::Optimizer),
    key("trainer", "batch_size", "1", Kind::Count),
    key("trainer", "steps", "20000", Kind::Count),
    key("trainer", "weight_decay", "0", Kind::Real),
    key("trainer", "momentum", "0", Kind::Real),
    key("trainer", "grad_noise_sd", "0", Kind::Real),
    key(
        "sweep",
        "learning_rate",
        "0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08",
        Kind::RealList,
    ),
    key("metrics", "eval_size", "1000", Kind::Count),
];

const RANK: &[Key] = &[
    key("experiment", "replicates", "1", Kind::Count),
    key("model", "d", "50", Kind::Count),
    key("model", "variants", "plain", Kind::TextList),
    key("data", "source", "fixed", Kind::Text),
    key("data", "n", "200", Kind::Count),
    key("data", "mu", "0.5", Kind::RealList),
    key("trainer", "optimizer", "gd", Kind::Optimizer),
    key("trainer", "batch_size", "200", Kind::Count),
    key("trainer", "steps", "4000", Kind::Count),
    key("trainer", "momentum", "0", Kind::Real),
    key("trainer", "grad_noise_sd", "0", Kind::Real),
    key("sweep", "learning_rate", "0.2", Kind::RealList),
    key("sweep", "weight_decay", "0, 0.05, 0.1, 0.2, 0.3", Kind::RealList),
    key("metrics", "rank_tol", "1e-6", Kind::Real),
    key("metrics", "eval_size", "1000", Kind::Count),
];

const CONTINUAL: &[Key] = &[
    key("model", "d", "100", Kind::Count),
    key(
        "model",
        "variants",
        "vanilla, symmetric, symmetric+noise, symmetric+bias",
        Kind::TextList,
    ),
    key("data", "n_per_task", "100", Kind::Count),
    key("data", "tasks", "10", Kind::Count),
    key("data", "noise_sd", "1", Kind::Real),
    key("trainer", "optimizer", "adaptive", Kind::Optimizer),
    key("trainer", "learning_rate", "0.01", Kind::Real),
    key("trainer", "weight_decay", "0.01", Kind::Real),
    key("trainer", "batch_size", "16", Kind::Count),
    key("trainer", "steps", "25000", Kind::Count),
    key("fixes", "grad_noise_sd", "0.01", Kind::Real),
    key("fixes", "bias_sd", "0.01", Kind::Real),
    key("metrics", "dead_threshold", "1e-8", Kind::Real),
];

const LYAPUNOV: &[Key] = &[
    key("distribution", "h", "two_point(2, 0)", Kind::Curvature),
    key("distribution", "samples", "100000", Kind::Count),
    key(
        "sweep",
        "learning_rate",
        "0.25, 0.5, 0.75, 0.9, 1.1, 1.25, 1.5",
        Kind::RealList,
    ),
    key("sweep", "gamma", "0", Kind::RealList),
    key("simulation", "steps", "20000", Kind::Count),
    key("simulation", "z0", "1", Kind::Real),
];

const VERIFY: &[Key] = &[
    key("verify", "inject_fault", "none", Kind::Text),
    key("verify", "samples", "100", Kind::Count),
];

fn schema(exp: Experiment) -> impl Iterator<Item = &'static Key> {
    let own = match exp {
        Experiment::SweepSparsity => SPARSITY,
        Experiment::SweepRank => RANK,
        Experiment::Continual => CONTINUAL,
        Experiment::Lyapunov => LYAPUNOV,
        Experiment::Verify => VERIFY,
    };
    COMMON.iter().chain(own)
}

/// Splits on commas outside parentheses and trims each item.
pub fn split_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn real(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite number, got {s:?}")),
    }
}

/// Parses `point(h)`, `two_point(a, b)`, `gaussian(mean, sd)` or
/// `discrete(v1:p1, v2:p2, ...)`.
pub fn parse_curvature(s: &str) -> Result<CurvatureDist> {
    let bad = || Error::contract(format!("cannot parse curvature distribution {s:?}"));
    let s = s.trim();
    let open = s.find('(').ok_or_else(bad)?;
    let body = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
    let args = split_list(body);
    let nums = || -> Result<Vec<f64>> {
        args.iter().map(|a| real(a).map_err(|_| bad())).collect()
    };
    let dist = match &s[..open] {
        "point" => match nums()?[..] {
            [h] => CurvatureDist::point(h),
            _ => return Err(bad()),
        },
        "two_point" => match nums()?[..] {
            [a, b] => CurvatureDist::two_point(a, b),
            _ => return Err(bad()),
        },
        "gaussian" => match nums()?[..] {
            [mean, sd] => CurvatureDist::Gaussian { mean, sd },
            _ => return Err(bad()),
        },
        "discrete" => {
            let mut values = Vec::new();
            let mut probs = Vec::new();
            for a in &args {
                let (v, p) = a.split_once(':').ok_or_else(bad)?;
                values.push(real(v.trim()).map_err(|_| bad())?);
                probs.push(real(p.trim()).map_err(|_| bad())?);
            }
            CurvatureDist::Discrete { values, probs }
        }
        _ => return Err(bad()),
    };
    dist.validate()?;
    Ok(dist)
}

/// Canonical text for a value of `kind`, or a message saying why it is
/// invalid.
fn canonical(kind: Kind, raw: &str) -> std::result::Result<String, String> {
    let raw = raw.trim();
    let join = |v: Vec<String>| v.join(", ");
    match kind {
        Kind::Text => {
            if raw.is_empty() {
                Err("empty value".into())
            } else {
                Ok(raw.to_string())
            }
        }
        Kind::Count => raw
            .parse::<usize>()
            .map(|v| v.to_string())
            .map_err(|_| format!("expected a non-negative integer, got {raw:?}")),
        Kind::Seed => raw
            .parse::<u64>()
            .map(|v| v.to_string())
            .map_err(|_| format!("expected an unsigned 64-bit seed, got {raw:?}")),
        Kind::Real => real(raw).map(|v| v.to_string()),
        Kind::RealList => {
            let items = split_list(raw);
            if items.is_empty() {
                return Err("empty list".into());
            }
            items
                .iter()
                .map(|s| real(s).map(|v| v.to_string()))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(join)
        }
        Kind::TextList => {
            let items = split_list(raw);
            if items.is_empty() || items.iter().any(String::is_empty) {
                return Err("empty list item".into());
            }
            Ok(join(items))
        }
        Kind::ModelList => {
            let items = split_list(raw);
            if items.is_empty() {
                return Err("empty list".into());
            }
            items
                .iter()
                .map(|s| ModelSpec::from_str(s).map(|m| m.to_string()))
                .collect::<Result<Vec<_>>>()
                .map(join)
                .map_err(|e| e.to_string())
        }
        Kind::Optimizer => Optimizer::from_str(raw)
            .map(|o| o.to_string())
            .map_err(|e| e.to_string()),
        Kind::Curvature => parse_curvature(raw)
            .map(|_| raw.to_string())
            .map_err(|e| e.to_string()),
    }
}

/// A fully resolved configuration for one experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    experiment: Experiment,
    /// `section → key → canonical value`
    values: BTreeMap<String, BTreeMap<String, String>>,
}

impl ExperimentConfig {
    /// Every key at its default.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut values: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        values
            .entry("experiment".into())
            .or_default()
            .insert("name".into(), experiment.name().into());
        for k in schema(experiment) {
            let v = canonical(k.kind, k.default).expect("defaults are valid");
            values
                .entry(k.section.into())
                .or_default()
                .insert(k.name.into(), v);
        }
        ExperimentConfig { experiment, values }
    }

    /// Parses a config file for `experiment`. Errors carry 1-based line
    /// numbers.
    pub fn parse(text: &str, experiment: Experiment) -> Result<Self> {
        let mut cfg = Self::defaults(experiment);
        let mut seen: BTreeMap<(String, String), usize> = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::config(line_no, "unterminated section header"))?
                    .trim();
                if name.is_empty() {
                    return Err(Error::config(line_no, "empty section name"));
                }
                section = name.to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(line_no, format!("expected key = value, got {line:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            if section.is_empty() {
                return Err(Error::config(line_no, format!("key {k:?} appears before any [section]")));
            }
            if let Some(first) = seen.insert((section.clone(), k.to_string()), line_no) {
                return Err(Error::config(
                    line_no,
                    format!("duplicate key {section}.{k} (first set on line {first})"),
                ));
            }
            if section == "experiment" && k == "name" {
                if v != experiment.name() {
                    return Err(Error::config(
                        line_no,
                        format!("config is for {v:?}, not {:?}", experiment.name()),
                    ));
                }
                continue;
            }
            let spec = schema(experiment)
                .find(|s| s.section == section && s.name == k)
                .ok_or_else(|| {
                    Error::config(
                        line_no,
                        format!("unknown key {section}.{k} for {}", experiment.name()),
                    )
                })?;
            let value = canonical(spec.kind, v)
                .map_err(|m| Error::config(line_no, format!("{section}.{k}: {m}")))?;
            cfg.values
                .get_mut(&section)
                .expect("schema sections exist")
                .insert(k.to_string(), value);
        }
        Ok(cfg)
    }

    /// Parses the leading `# `-prefixed block written by [`echo`](Self::echo).
    pub fn parse_echo(text: &str, experiment: Experiment) -> Result<Self> {
        let body: String = text
            .lines()
            .map_while(|l| l.strip_prefix("# "))
            .map(|l| format!("{l}\n"))
            .collect();
        Self::parse(&body, experiment)
    }

    pub fn experiment(&self) -> Experiment {
        self.experiment
    }

    /// The resolved configuration as `# `-prefixed lines.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (section, keys) in &self.values {
            let _ = writeln!(out, "# [{section}]");
            for (k, v) in keys {
                let _ = writeln!(out, "# {k} = {v}");
            }
        }
        out
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.set("experiment", "seed", &seed.to_string());
    }

    pub fn set_output(&mut self, path: &str) {
        self.set("experiment", "output", path);
    }

    /// Overrides one key, validating the value. Unknown keys are an error.
    pub fn set(&mut self, section: &str, name: &str, value: &str) {
        self.try_set(section, name, value)
            .unwrap_or_else(|e| panic!("{e}"));
    }

    pub fn try_set(&mut self, section: &str, name: &str, value: &str) -> Result<()> {
        let spec = schema(self.experiment)
            .find(|s| s.section == section && s.name == name)
            .ok_or_else(|| Error::contract(format!("unknown key {section}.{name}")))?;
        let v = canonical(spec.kind, value)
            .map_err(|m| Error::contract(format!("{section}.{name}: {m}")))?;
        self.values
            .get_mut(section)
            .expect("schema sections exist")
            .insert(name.into(), v);
        Ok(())
    }

    fn raw(&self, section: &str, name: &str) -> &str {
        self.values
            .get(section)
            .and_then(|s| s.get(name))
            .unwrap_or_else(|| panic!("{section}.{name} is not a key of {}", self.experiment.name()))
    }

    pub fn text(&self, section: &str, name: &str) -> String {
        self.raw(section, name).to_string()
    }

    pub fn texts(&self, section: &str, name: &str) -> Vec<String> {
        split_list(self.raw(section, name))
    }

    pub fn count(&self, section: &str, name: &str) -> usize {
        self.raw(section, name).parse().expect("validated")
    }

    pub fn real(&self, section: &str, name: &str) -> f64 {
        self.raw(section, name).parse().expect("validated")
    }

    pub fn reals(&self, section: &str, name: &str) -> Vec<f64> {
        self.texts(section, name)
            .iter()
            .map(|s| s.parse().expect("validated"))
            .collect()
    }

    pub fn models(&self, section: &str, name: &str) -> Vec<ModelSpec> {
        self.texts(section, name)
            .iter()
            .map(|s| s.parse().expect("validated"))
            .collect()
    }

    pub fn optimizer(&self, section: &str, name: &str) -> Optimizer {
        self.raw(section, name).parse().expect("validated")
    }

    pub fn curvature(&self, section: &str, name: &str) -> CurvatureDist {
        parse_curvature(self.raw(section, name)).expect("validated")
    }

    pub fn seed(&self) -> u64 {
        self.raw("experiment", "seed").parse().expect("validated")
    }

    /// `-` means standard output.
    pub fn output(&self) -> Option<String> {
        match self.raw("experiment", "output") {
            "-" => None,
            p => Some(p.to_string()),
        }
    }
}
