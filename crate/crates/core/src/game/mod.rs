//! Game construction: objective weights, the attacker's reward, the relaxed
//! attack space and the game matrix, plus the exact quotient used as an oracle.

mod quotient;
mod relaxed;

pub use quotient::{distance_histograms, exact_quotient, DistanceHistograms, ExactQuotient, QuotientClass, FULLSPACE_ENUMERATION_BOUND};
pub use relaxed::{
    build_lambda, build_pi, build_s, build_xi, false_alarm_row, Lambda, LambdaGroup, RelaxedGame, XiParts, POSITIVITY_EPSILON,
};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelModel, RhoMatrix};
use crate::error::{Error, Result};
use crate::galois_rs::CodeParams;

/// Multiplicative factors of the four detector objectives:
/// missed detection (`g1`), attacker-induced decoding loss (`g2`),
/// false alarms (`g3`) and attack effort (`g4`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameWeights {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

impl GameWeights {
    pub fn new(g1: f64, g2: f64, g3: f64, g4: f64) -> Result<Self> {
        let w = Self { g1, g2, g3, g4 };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g1", self.g1), ("g2", self.g2), ("g3", self.g3), ("g4", self.g4)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidWeights(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    /// `g1 = g2 = g4 = 100`, `g3 = tau`.
    pub fn reference_defaults(code: &CodeParams) -> Self {
        Self { g1: 100.0, g2: 100.0, g3: code.tau() as f64, g4: 100.0 }
    }

    pub fn zero() -> Self {
        Self { g1: 0.0, g2: 0.0, g3: 0.0, g4: 0.0 }
    }

    /// Fold a prior attack probability `p_a` into the weights: the attack-side
    /// objectives scale by `p_a`, the false-alarm objective by `1 - p_a`.
    pub fn with_attack_probability(self, p_a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_a) {
            return Err(Error::InvalidWeights(format!("attack probability {p_a} not in [0, 1]")));
        }
        Ok(Self { g1: self.g1 * p_a, g2: self.g2 * p_a, g3: self.g3 * (1.0 - p_a), g4: self.g4 * p_a })
    }
}

/// Prior over the encoded codewords.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SignPrior {
    #[default]
    Uniform,
    Explicit(Vec<f64>),
}

impl SignPrior {
    pub fn validate(&self, tau: u64) -> Result<()> {
        match self {
            SignPrior::Uniform => Ok(()),
            SignPrior::Explicit(p) => {
                if p.len() as u64 != tau {
                    return Err(Error::InvalidPrior(format!("{} probabilities for {tau} codewords", p.len())));
                }
                if let Some(i) = p.iter().position(|&v| !v.is_finite() || v < 0.0) {
                    return Err(Error::InvalidPrior(format!("entry {i} = {} is negative or not finite", p[i])));
                }
                let s: f64 = p.iter().sum();
                if (s - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidPrior(format!("probabilities sum to {s}")));
                }
                Ok(())
            }
        }
    }
}

/// Attacker's gain from crafting a word `hbar` symbols away from the attacked codeword.
#[inline]
pub fn reward_at(hbar: usize, rho: &RhoMatrix, w: &GameWeights) -> f64 {
    w.g2 - w.g4 * hbar as f64 - w.g2 * rho.within_radius(hbar)
}

/// Reward of a crafted word whose distances to the codebook form `distances`:
/// the attacker picks the attacked codeword that maximizes its gain.
pub fn reward_exact(distances: &[usize], rho: &RhoMatrix, w: &GameWeights) -> Result<f64> {
    if distances.is_empty() {
        return Err(Error::EmptyDistanceSet);
    }
    distances
        .iter()
        .map(|&h| {
            if h > rho.n() {
                Err(Error::DistanceOutOfRange { value: h, max: rho.n() })
            } else {
                Ok(reward_at(h, rho, w))
            }
        })
        .try_fold(f64::NEG_INFINITY, |acc, r| Ok(acc.max(r?)))
}

/// Candidate distances when the closest codeword is `i` away:
/// `{i} ∪ {max(d - i, i + 1), ..., n}`.
pub fn reward_candidates(code: &CodeParams, i: usize) -> Vec<usize> {
    let lo = code.d().saturating_sub(i).max(i + 1);
    std::iter::once(i).chain(lo..=code.n()).collect()
}

/// `s_i` for `i = 0..=n-k`: reward when the crafted word's nearest codeword is `i` away.
pub fn reward_vector_s(code: &CodeParams, rho: &RhoMatrix, w: &GameWeights) -> Vec<f64> {
    (0..=code.n() - code.k())
        .map(|i| {
            reward_candidates(code, i)
                .into_iter()
                .map(|h| reward_at(h, rho, w))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// [`reward_vector_s`] from a channel, using the analytic `rho`.
pub fn reward_vector_s_for_channel(code: &CodeParams, ch: &ChannelModel, w: &GameWeights) -> Result<Vec<f64>> {
    let rho = crate::channel::build_r(code, ch, crate::channel::RhoMethod::Analytic)?;
    Ok(reward_vector_s(code, &rho, w))
}
