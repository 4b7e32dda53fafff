//! JSON run configuration: every field optional, flags override the file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use signguard_core::evaluate::Sweep;
use signguard_core::galois_rs::CODEBOOK_ENUMERATION_BOUND;
use signguard_core::game::FULLSPACE_ENUMERATION_BOUND;
use signguard_core::{CodeParams, GameWeights, Instance, RhoMethod, SignPrior};

use crate::error::CliError;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub code: Option<CodeSpec>,
    pub channel: Option<ChannelSpec>,
    pub weights: Option<WeightSpec>,
    pub prior: Option<PriorSpec>,
    pub attack_probability: Option<f64>,
    pub mc: Option<McSpec>,
    pub bounds: Option<BoundSpec>,
    pub rho_method: Option<RhoChoice>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub q: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub pe: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
    pub g4: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Named(String),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSpec {
    pub codebook_max: Option<u64>,
    pub fullspace_max: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoChoice {
    Analytic,
    Mc,
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub pe: Option<f64>,
    pub code: Option<CodeSpec>,
}

/// Fully resolved configuration, echoed into every artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub code: CodeSpec,
    pub channel: ChannelSpec,
    pub weights: GameWeights,
    pub prior: PriorSpec,
    pub attack_probability: Option<f64>,
    pub mc: ResolvedMc,
    pub bounds: ResolvedBounds,
    pub rho_method: RhoChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedMc {
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedBounds {
    pub codebook_max: u64,
    pub fullspace_max: u64,
}

pub fn parse_code(s: &str) -> Result<CodeSpec, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let nums: Vec<usize> = parts
        .iter()
        .map(|p| p.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("--code: expected n,k,d,q as integers, got {s:?}")))?;
    match nums[..] {
        [n, k, d, q] => Ok(CodeSpec { n, k, d, q }),
        _ => Err(CliError::Config(format!("--code: expected four values n,k,d,q, got {}", nums.len()))),
    }
}

pub fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(file: FileConfig, overrides: &Overrides) -> Result<Self, CliError> {
        let code_spec = overrides.code.or(file.code).unwrap_or(CodeSpec { n: 7, k: 3, d: 5, q: 8 });
        let code = CodeParams::new(code_spec.n, code_spec.k, code_spec.d, code_spec.q).map_err(|e| CliError::Config(format!("code: {e}")))?;
        code.check_reed_solomon().map_err(|e| CliError::Config(format!("code: {e}")))?;

        let pe = overrides.pe.or(file.channel.map(|c| c.pe)).unwrap_or(0.05);
        if !(0.0..=1.0).contains(&pe) {
            return Err(CliError::Config(format!("channel.pe: {pe} is not in [0, 1]")));
        }

        let defaults = GameWeights::reference_defaults(&code);
        let w = file.weights.unwrap_or(WeightSpec { g1: None, g2: None, g3: None, g4: None });
        let weights = GameWeights {
            g1: w.g1.unwrap_or(defaults.g1),
            g2: w.g2.unwrap_or(defaults.g2),
            g3: w.g3.unwrap_or(defaults.g3),
            g4: w.g4.unwrap_or(defaults.g4),
        };
        weights.validate().map_err(|e| CliError::Config(format!("weights: {e}")))?;

        let prior = file.prior.unwrap_or(PriorSpec::Named("uniform".into()));
        match &prior {
            PriorSpec::Named(name) if name == "uniform" => {}
            PriorSpec::Named(name) => return Err(CliError::Config(format!("prior: unknown prior {name:?}, expected \"uniform\" or a list"))),
            PriorSpec::Explicit(p) => SignPrior::Explicit(p.clone()).validate(code.tau()).map_err(|e| CliError::Config(format!("prior: {e}")))?,
        }

        if let Some(p_a) = file.attack_probability {
            if !(0.0..=1.0).contains(&p_a) {
                return Err(CliError::Config(format!("attack_probability: {p_a} is not in [0, 1]")));
            }
        }

        let mc = file.mc.unwrap_or(McSpec { trials: None, seed: None });
        let mc = ResolvedMc { trials: mc.trials.unwrap_or(DEFAULT_TRIALS), seed: overrides.seed.or(mc.seed).unwrap_or(DEFAULT_SEED) };
        if mc.trials == 0 {
            return Err(CliError::Config("mc.trials: must be at least 1".into()));
        }

        let b = file.bounds.unwrap_or(BoundSpec { codebook_max: None, fullspace_max: None });
        let bounds = ResolvedBounds {
            codebook_max: b.codebook_max.unwrap_or(CODEBOOK_ENUMERATION_BOUND as u64),
            fullspace_max: b.fullspace_max.unwrap_or(FULLSPACE_ENUMERATION_BOUND as u64),
        };

        Ok(Self {
            code: code_spec,
            channel: ChannelSpec { pe },
            weights,
            prior,
            attack_probability: file.attack_probability,
            mc,
            bounds,
            rho_method: file.rho_method.unwrap_or(RhoChoice::Analytic),
        })
    }

    pub fn code(&self) -> CodeParams {
        CodeParams::new(self.code.n, self.code.k, self.code.d, self.code.q).expect("validated at resolve time")
    }

    pub fn rho_method(&self) -> RhoMethod {
        match self.rho_method {
            RhoChoice::Analytic => RhoMethod::Analytic,
            RhoChoice::Mc => RhoMethod::MonteCarlo { trials: self.mc.trials, seed: self.mc.seed },
        }
    }

    pub fn sign_prior(&self) -> SignPrior {
        match &self.prior {
            PriorSpec::Named(_) => SignPrior::Uniform,
            PriorSpec::Explicit(p) => SignPrior::Explicit(p.clone()),
        }
    }

    pub fn instance(&self) -> Instance {
        Instance {
            code: self.code(),
            p_e: self.channel.pe,
            weights: Some(self.weights),
            prior: self.sign_prior(),
            attack_probability: self.attack_probability,
            rho_method: self.rho_method(),
            codebook_bound: self.bounds.codebook_max as u128,
        }
    }

    pub fn sweep(&self) -> Sweep {
        Sweep { rho_method: self.rho_method(), codebook_bound: self.bounds.codebook_max as u128 }
    }
}
