use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{reward_exact, GameWeights};
use crate::channel::RhoMatrix;
use crate::error::{Error, Result};
use crate::galois_rs::{enumerate_codebook_default, CodeParams, Codeword, PackedSpace};

/// Largest `q^n` scanned word by word.
pub const FULLSPACE_ENUMERATION_BOUND: u128 = 1 << 22;

const CHUNK: u64 = 1 << 12;

/// Distinct distance histograms over `Sigma^n`, each with the number of words producing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceHistograms {
    pub code: CodeParams,
    /// Sorted by histogram for a deterministic order.
    pub classes: Vec<(Vec<u64>, u64)>,
}

impl DistanceHistograms {
    pub fn kappa(&self) -> usize {
        self.classes.len()
    }

    pub fn words(&self) -> u64 {
        self.classes.iter().map(|(_, m)| m).sum()
    }
}

/// Scan every word of `Sigma^n` and collect its distance histogram to `codebook`.
pub fn distance_histograms(code: &CodeParams, codebook: &[Codeword], bound: u128) -> Result<DistanceHistograms> {
    let size = (code.q() as u128).pow(code.n() as u32);
    if size > bound {
        return Err(Error::BoundExceeded { size, bound });
    }
    if codebook.len() as u64 != code.tau() {
        return Err(Error::DimensionMismatch(format!("{} codewords for {code}", codebook.len())));
    }
    let space = PackedSpace::new(code.n(), code.q())?;
    let packed: Vec<u64> = codebook.iter().map(|c| space.pack(c)).collect();
    let n = code.n();
    let size = size as u64;
    let chunks = size.div_ceil(CHUNK);

    let merged = (0..chunks)
        .into_par_iter()
        .fold(HashMap::<Vec<u64>, u64>::new, |mut acc, chunk| {
            let mut hist = vec![0u64; n + 1];
            for index in chunk * CHUNK..((chunk + 1) * CHUNK).min(size) {
                let word = space.word_at(index);
                hist.iter_mut().for_each(|h| *h = 0);
                for &c in &packed {
                    hist[space.distance(word, c) as usize] += 1;
                }
                match acc.get_mut(&hist) {
                    Some(m) => *m += 1,
                    None => {
                        acc.insert(hist.clone(), 1);
                    }
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (h, m) in b {
                *a.entry(h).or_insert(0) += m;
            }
            a
        });
    let classes: BTreeMap<Vec<u64>, u64> = merged.into_iter().collect();
    Ok(DistanceHistograms { code: *code, classes: classes.into_iter().collect() })
}

/// One equivalence class of crafted words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientClass {
    pub histogram: Vec<u64>,
    pub multiplicity: u64,
    pub reward: f64,
    /// `sum_m delta_m rho(m, j)` for `j = 0..=d_o`.
    pub o1_row: Vec<f64>,
}

impl QuotientClass {
    /// Distance to the nearest codeword.
    pub fn min_distance(&self) -> usize {
        self.histogram.iter().position(|&h| h > 0).expect("histogram sums to tau")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactQuotient {
    pub representatives: Vec<QuotientClass>,
    pub kappa: usize,
}

impl ExactQuotient {
    pub fn from_histograms(hist: &DistanceHistograms, rho: &RhoMatrix, w: &GameWeights) -> Result<Self> {
        let code = &hist.code;
        if rho.n() != code.n() {
            return Err(Error::DimensionMismatch(format!("rho table for n={} does not match {code}", rho.n())));
        }
        let radius = code.error_correction_radius();
        let representatives = hist
            .classes
            .iter()
            .map(|(h, multiplicity)| {
                let multiplicity = *multiplicity;
                let distances: Vec<usize> = (0..h.len()).filter(|&m| h[m] > 0).collect();
                let reward = reward_exact(&distances, rho, w)?;
                let o1_row = (0..=radius).map(|j| distances.iter().map(|&m| h[m] as f64 * rho.get(m, j)).sum()).collect();
                Ok(QuotientClass { histogram: h.clone(), multiplicity, reward, o1_row })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kappa: representatives.len(), representatives })
    }
}

/// Exhaustive quotient of the attacker's space, bounded by [`FULLSPACE_ENUMERATION_BOUND`].
pub fn exact_quotient(code: &CodeParams, rho: &RhoMatrix, w: &GameWeights) -> Result<ExactQuotient> {
    let size = (code.q() as u128).pow(code.n() as u32);
    if size > FULLSPACE_ENUMERATION_BOUND {
        return Err(Error::BoundExceeded { size, bound: FULLSPACE_ENUMERATION_BOUND });
    }
    let codebook = enumerate_codebook_default(code)?;
    let hist = distance_histograms(code, &codebook, FULLSPACE_ENUMERATION_BOUND)?;
    ExactQuotient::from_histograms(&hist, rho, w)
}
