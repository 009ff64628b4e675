use std::fmt;
use std::str::FromStr;

use super::{
    apply_symmetry_removal, swap_quadratic, hadamard_regression, linear_regression,
    matrix_factorization, permutation_mlp, two_layer_tanh, PerSampleLoss, SymmetryRemoval,
};
use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Textual model identity, e.g. `hadamard(d=50)`, `matfac_residual(d=10)`,
/// `perm_mlp(width=32,in=4)`, `tanh(d=8)+bias(0.01)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Linear { d: usize },
    Hadamard { d: usize },
    MatFac { d: usize, residual: bool },
    Tanh { d: usize },
    PermutationMlp { width: usize, in_dim: usize },
    SwapQuadratic,
    Biased { base: Box<ModelSpec>, scale: f64 },
}

impl ModelSpec {
    pub fn build(&self, rng: RngStream) -> Result<Box<dyn PerSampleLoss>> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::contract(format!("{what} in model spec {self}")))
            }
        };
        Ok(match self {
            ModelSpec::Linear { d } => {
                need(*d >= 1, "d must be >= 1")?;
                Box::new(linear_regression(*d))
            }
            ModelSpec::Hadamard { d } => {
                need(*d >= 1, "d must be >= 1")?;
                Box::new(hadamard_regression(*d))
            }
            ModelSpec::MatFac { d, residual } => {
                need(*d >= 1, "d must be >= 1")?;
                Box::new(matrix_factorization(*d, *residual))
            }
            ModelSpec::Tanh { d } => {
                need(*d >= 1, "d must be >= 1")?;
                Box::new(two_layer_tanh(*d))
            }
            ModelSpec::PermutationMlp { width, in_dim } => {
                need(
                    *width >= 2 && *in_dim >= 1,
                    "width must be >= 2 and in >= 1",
                )?;
                Box::new(permutation_mlp(*width, *in_dim))
            }
            ModelSpec::SwapQuadratic => Box::new(swap_quadratic()),
            ModelSpec::Biased { base, scale } => apply_symmetry_removal(
                base.build(rng.derive(1))?,
                SymmetryRemoval::RandomBias(*scale),
                rng,
            )?,
        })
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Linear { d } => write!(f, "linear(d={d})"),
            ModelSpec::Hadamard { d } => write!(f, "hadamard(d={d})"),
            ModelSpec::MatFac { d, residual: false } => write!(f, "matfac(d={d})"),
            ModelSpec::MatFac { d, residual: true } => write!(f, "matfac_residual(d={d})"),
            ModelSpec::Tanh { d } => write!(f, "tanh(d={d})"),
            ModelSpec::PermutationMlp { width, in_dim } => {
                write!(f, "perm_mlp(width={width},in={in_dim})")
            }
            ModelSpec::SwapQuadratic => write!(f, "swap_quadratic"),
            ModelSpec::Biased { base, scale } => write!(f, "{base}+bias({scale})"),
        }
    }
}

fn parse_call(s: &str) -> Result<(&str, Vec<(&str, &str)>)> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return Ok((s, Vec::new()));
    };
    let inner = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::contract(format!("unbalanced parentheses in {s:?}")))?;
    let mut args = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('=') {
            Some((k, v)) => args.push((k.trim(), v.trim())),
            None => args.push(("", part)),
        }
    }
    Ok((s[..open].trim(), args))
}

fn arg<T: FromStr>(args: &[(&str, &str)], key: &str, model: &str) -> Result<T> {
    let (_, v) = args
        .iter()
        .find(|(k, _)| *k == key)
        .ok_or_else(|| Error::contract(format!("{model} needs argument {key}")))?;
    v.parse()
        .map_err(|_| Error::contract(format!("bad value {v:?} for {model}.{key}")))
}

fn check_keys(args: &[(&str, &str)], allowed: &[&str], model: &str) -> Result<()> {
    match args.iter().find(|(k, _)| !allowed.contains(k)) {
        Some((k, _)) => Err(Error::contract(format!(
            "unknown argument {k:?} for {model}"
        ))),
        None => Ok(()),
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some((base, suffix)) = s.rsplit_once('+') {
            let (name, args) = parse_call(suffix)?;
            if name != "bias" || args.len() != 1 {
                return Err(Error::contract(format!(
                    "expected +bias(scale), got {suffix:?}"
                )));
            }
            let scale: f64 = args[0]
                .1
                .parse()
                .map_err(|_| Error::contract(format!("bad bias scale {:?}", args[0].1)))?;
            return Ok(ModelSpec::Biased {
                base: Box::new(base.parse()?),
                scale,
            });
        }
        let (name, args) = parse_call(s)?;
        let spec = match name {
            "linear" | "hadamard" | "matfac" | "matfac_residual" | "tanh" => {
                check_keys(&args, &["d"], name)?;
                let d = arg(&args, "d", name)?;
                match name {
                    "linear" => ModelSpec::Linear { d },
                    "hadamard" => ModelSpec::Hadamard { d },
                    "matfac" => ModelSpec::MatFac { d, residual: false },
                    "matfac_residual" => ModelSpec::MatFac { d, residual: true },
                    _ => ModelSpec::Tanh { d },
                }
            }
            "perm_mlp" => {
                check_keys(&args, &["width", "in"], name)?;
                ModelSpec::PermutationMlp {
                    width: arg(&args, "width", name)?,
                    in_dim: arg(&args, "in", name)?,
                }
            }
            "swap_quadratic" => {
                check_keys(&args, &[], name)?;
                ModelSpec::SwapQuadratic
            }
            other => return Err(Error::contract(format!("unknown model {other:?}"))),
        };
        Ok(spec)
    }
}
