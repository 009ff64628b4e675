use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    /// Full dataset every step.
    Gd,
    /// Minibatches drawn with replacement (or fresh from a stream).
    Sgd,
    /// RMS-normalized steps without first-moment averaging.
    AdaptiveNoMomentum,
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Optimizer::Gd => "gd",
            Optimizer::Sgd => "sgd",
            Optimizer::AdaptiveNoMomentum => "adaptive",
        })
    }
}

impl FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gd" => Ok(Optimizer::Gd),
            "sgd" => Ok(Optimizer::Sgd),
            "adaptive" => Ok(Optimizer::AdaptiveNoMomentum),
            other => Err(Error::contract(format!(
                "unknown optimizer {other:?} (expected gd, sgd or adaptive)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// `N(0, scale²)` per coordinate; `None` means `0.1/√d` with d the length
    /// of the coordinate's block.
    Gaussian(Option<f64>),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainerConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub steps: usize,
    pub optimizer: Optimizer,
    pub momentum: f64,
    /// Standard deviation of the injected gradient noise.
    pub grad_noise_sd: f64,
    pub seed: u64,
    pub stream_id: u64,
    pub record_every: usize,
    pub init: Init,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            learning_rate: 0.01,
            weight_decay: 0.0,
            batch_size: 1,
            steps: 1000,
            optimizer: Optimizer::Sgd,
            momentum: 0.0,
            grad_noise_sd: 0.0,
            seed: 0,
            stream_id: 0,
            record_every: 100,
            init: Init::Gaussian(None),
        }
    }
}

impl TrainerConfig {
    pub fn rng_stream(&self) -> RngStream {
        RngStream::new(self.seed, self.stream_id)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.learning_rate,
            self.weight_decay,
            self.momentum,
            self.grad_noise_sd,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::contract("trainer config values must be finite"));
        }
        if self.learning_rate < 0.0 {
            return Err(Error::contract("learning_rate must be >= 0"));
        }
        if self.weight_decay < 0.0 {
            return Err(Error::contract("weight_decay must be >= 0"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::contract("momentum must lie in [0, 1)"));
        }
        if self.optimizer == Optimizer::AdaptiveNoMomentum && self.momentum != 0.0 {
            return Err(Error::contract("the adaptive optimizer takes no momentum"));
        }
        if self.grad_noise_sd < 0.0 {
            return Err(Error::contract("grad_noise_sd must be >= 0"));
        }
        if self.batch_size == 0 {
            return Err(Error::contract("batch_size must be >= 1"));
        }
        if self.record_every == 0 {
            return Err(Error::contract("record_every must be >= 1"));
        }
        if let Init::Gaussian(Some(s)) = self.init {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::contract("init scale must be >= 0"));
            }
        }
        Ok(())
    }

    /// Flat `key = value` echo, in a fixed order.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let init = match &self.init {
            Init::Gaussian(None) => "gaussian".to_string(),
            Init::Gaussian(Some(s)) => format!("gaussian({s})"),
            Init::Explicit(v) => format!("explicit({} values)", v.len()),
        };
        [
            ("learning_rate", self.learning_rate.to_string()),
            ("weight_decay", self.weight_decay.to_string()),
            ("batch_size", self.batch_size.to_string()),
            ("steps", self.steps.to_string()),
            ("optimizer", self.optimizer.to_string()),
            ("momentum", self.momentum.to_string()),
            ("grad_noise_sd", self.grad_noise_sd.to_string()),
            ("seed", self.seed.to_string()),
            ("stream_id", self.stream_id.to_string()),
            ("record_every", self.record_every.to_string()),
            ("init", init),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}
