//! Channel, game construction and LP solve for one (code, p_e) instance.

use serde::{Deserialize, Serialize};

use crate::channel::{build_r, ChannelModel, RhoMatrix, RhoMethod};
use crate::error::Result;
use crate::galois_rs::{weight_distribution, CodeParams, WeightDistribution, CODEBOOK_ENUMERATION_BOUND};
use crate::game::{GameWeights, RelaxedGame, SignPrior};
use crate::lp::{solve_equilibrium, Equilibrium};

/// Everything needed to solve one game instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub code: CodeParams,
    pub p_e: f64,
    /// Defaults to [`GameWeights::reference_defaults`].
    pub weights: Option<GameWeights>,
    pub prior: SignPrior,
    /// Folds a prior attack probability into the weights when set.
    pub attack_probability: Option<f64>,
    pub rho_method: RhoMethod,
    pub codebook_bound: u128,
}

impl Instance {
    pub fn new(code: CodeParams, p_e: f64) -> Self {
        Self {
            code,
            p_e,
            weights: None,
            prior: SignPrior::Uniform,
            attack_probability: None,
            rho_method: RhoMethod::Analytic,
            codebook_bound: CODEBOOK_ENUMERATION_BOUND,
        }
    }

    pub fn with_weights(mut self, w: GameWeights) -> Self {
        self.weights = Some(w);
        self
    }

    pub fn resolved_weights(&self) -> Result<GameWeights> {
        let w = self.weights.unwrap_or_else(|| GameWeights::reference_defaults(&self.code));
        w.validate()?;
        match self.attack_probability {
            Some(p_a) => w.with_attack_probability(p_a),
            None => Ok(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedInstance {
    pub instance: Instance,
    pub channel: ChannelModel,
    pub rho: RhoMatrix,
    pub weight_distribution: WeightDistribution,
    pub game: RelaxedGame,
    pub equilibrium: Equilibrium,
}

pub fn solve_instance(instance: &Instance) -> Result<SolvedInstance> {
    let code = instance.code;
    let weights = instance.resolved_weights()?;
    let channel = ChannelModel::for_code(&code, instance.p_e)?;
    let rho = build_r(&code, &channel, instance.rho_method)?;
    let distribution = weight_distribution(&code, instance.codebook_bound)?;
    let game = RelaxedGame::build(&code, &rho, &weights, &instance.prior, &distribution)?;
    let equilibrium = solve_equilibrium(&game.xi, &game.xi_plus, game.shift, &game.pi)?;
    Ok(SolvedInstance { instance: instance.clone(), channel, rho, weight_distribution: distribution, game, equilibrium })
}
