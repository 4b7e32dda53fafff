//! Simulation, the exact best-response oracle, contiguousness audits, and
//! reproduction of the reference tables and figure data.

mod figures;
mod reference;
mod tables;

pub use figures::{figure_data, FigureData, FigureId, FigureRow};
pub use reference::{ReferenceCell, ReferenceCode, ReferenceRowI, ReferenceTables};
pub use tables::{reference_instances, reproduce_from_grid, reproduce_tables, solve_reference_grid, TableCell, TableId, TableReport, Sweep};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{perturb_with, substream, ChannelModel};
use crate::error::{Error, Result};
use crate::galois_rs::{CodeParams, DecodeResult, ReedSolomon};
use crate::game::{ExactQuotient, GameWeights};

/// Stream label for no-attack simulations.
const SIMULATION_LABEL: u64 = 0x5349_4d00;
const TRIAL_CHUNK: u64 = 4096;

fn check_rule(pi: &[f64], len: usize) -> Result<()> {
    if pi.len() != len {
        return Err(Error::DimensionMismatch(format!("detection rule has {} entries, expected {len}", pi.len())));
    }
    if let Some(v) = pi.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidPrior(format!("detection probability {v} outside [0, 1]")));
    }
    Ok(())
}

/// `sum_j pi_j fa_j`: probability that an unattacked sign raises an alert.
pub fn false_alarm_probability(pi: &[f64], fa_row: &[f64]) -> Result<f64> {
    check_rule(pi, fa_row.len())?;
    Ok(pi.iter().zip(fa_row).map(|(p, f)| p * f).sum())
}

/// Frequency of an event with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub count: u64,
    pub rate: f64,
    pub std_error: f64,
}

impl Rate {
    fn new(count: u64, trials: u64) -> Self {
        let rate = count as f64 / trials as f64;
        Self { count, rate, std_error: (rate * (1.0 - rate) / trials as f64).sqrt() }
    }

    /// Whether `expected` lies within `k` standard errors, using the expected
    /// value's own variance so that a zero count is not infinitely precise.
    pub fn agrees_with(&self, expected: f64, trials: u64, k: f64) -> bool {
        let sd = (expected * (1.0 - expected) / trials as f64).sqrt();
        (self.rate - expected).abs() <= k * sd + 1.0 / trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub code: CodeParams,
    pub p_e: f64,
    pub trials: u64,
    pub seed: u64,
    /// Decoded to a codeword other than the one sent.
    pub decode_error: Rate,
    pub decode_failure: Rate,
    /// Alerts over all trials.
    pub false_alarm: Rate,
    /// Alerts over successfully decoded trials.
    pub alert_rate: Rate,
    /// Symbol-error histogram, `0..=n`.
    pub symbol_errors: Vec<u64>,
    /// `g3` times the false-alarm rate: the only cost term active without an attacker.
    pub empirical_cost: f64,
}

#[derive(Default)]
struct Counts {
    error: u64,
    failure: u64,
    alerts: u64,
    decoded: u64,
    symbol_errors: Vec<u64>,
}

impl Counts {
    fn merge(mut self, other: Counts) -> Counts {
        self.error += other.error;
        self.failure += other.failure;
        self.alerts += other.alerts;
        self.decoded += other.decoded;
        if self.symbol_errors.is_empty() {
            self.symbol_errors = other.symbol_errors;
        } else {
            for (a, b) in self.symbol_errors.iter_mut().zip(other.symbol_errors) {
                *a += b;
            }
        }
        self
    }
}

/// Send uniformly drawn signs through the channel and the decoder, applying the
/// randomized alert rule `pi` to each decoded word. Deterministic in `seed`.
pub fn simulate_no_attack(code: &CodeParams, ch: &ChannelModel, pi: &[f64], w: &GameWeights, trials: u64, seed: u64) -> Result<SimulationReport> {
    check_rule(pi, code.error_correction_radius() + 1)?;
    if trials == 0 {
        return Err(Error::InvalidChannel("at least one trial is required".into()));
    }
    if ch.n() != code.n() || ch.q() != code.q() {
        return Err(Error::InvalidChannel(format!("channel (n={}, q={}) does not match {code}", ch.n(), ch.q())));
    }
    let rs = ReedSolomon::new(*code)?;
    let (k, q, n) = (code.k(), code.q(), code.n());
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<Counts> {
            let mut c = Counts { symbol_errors: vec![0; n + 1], ..Counts::default() };
            for t in chunk * TRIAL_CHUNK..((chunk + 1) * TRIAL_CHUNK).min(trials) {
                let mut rng = substream(seed, SIMULATION_LABEL, t);
                let message: Vec<u8> = (0..k).map(|_| rng.gen_range(0..q) as u8).collect();
                let sent = rs.encode(&message)?;
                let received = perturb_with(&sent, ch, &mut rng);
                let flips = sent.symbols().iter().zip(received.symbols()).filter(|(a, b)| a != b).count();
                c.symbol_errors[flips] += 1;
                match rs.decode(&received)? {
                    DecodeResult::Failure => c.failure += 1,
                    DecodeResult::Decoded { codeword, error_count } => {
                        c.decoded += 1;
                        if codeword != sent {
                            c.error += 1;
                        }
                        if rng.gen::<f64>() < pi[error_count] {
                            c.alerts += 1;
                        }
                    }
                }
            }
            Ok(c)
        })
        .try_reduce(Counts::default, |a, b| Ok(a.merge(b)))?;
    let false_alarm = Rate::new(counts.alerts, trials);
    Ok(SimulationReport {
        code: *code,
        p_e: ch.p_e(),
        trials,
        seed,
        decode_error: Rate::new(counts.error, trials),
        decode_failure: Rate::new(counts.failure, trials),
        false_alarm,
        alert_rate: Rate::new(counts.alerts, counts.decoded.max(1)),
        symbol_errors: counts.symbol_errors,
        empirical_cost: w.g3 * false_alarm.rate,
    })
}

/// The attacker's true best response against a fixed detection rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub cost: f64,
    pub class_index: usize,
    pub histogram: Vec<u64>,
    pub min_distance: usize,
}

/// Detector cost of quotient class `i` under `pi`: missed alerts on crafted
/// words, the attacker's reward, and false alarms on unattacked signs.
pub fn class_cost(xq: &ExactQuotient, i: usize, pi: &[f64], w: &GameWeights, fa_row: &[f64]) -> f64 {
    let class = &xq.representatives[i];
    let missed: f64 = class.o1_row.iter().zip(pi).map(|(o, p)| o * (1.0 - p)).sum();
    let alarms: f64 = fa_row.iter().zip(pi).map(|(f, p)| f * p).sum();
    w.g1 * missed + class.reward + w.g3 * alarms
}

/// Maximize the exact cost over every quotient class; ties keep the first class.
pub fn exact_best_response(xq: &ExactQuotient, pi: &[f64], w: &GameWeights, fa_row: &[f64]) -> Result<BestResponse> {
    check_rule(pi, fa_row.len())?;
    if xq.representatives.is_empty() {
        return Err(Error::EmptyDistanceSet);
    }
    if let Some(c) = xq.representatives.iter().find(|c| c.o1_row.len() != pi.len()) {
        return Err(Error::DimensionMismatch(format!("class row has {} entries, rule {}", c.o1_row.len(), pi.len())));
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 0..xq.representatives.len() {
        let cost = class_cost(xq, i, pi, w, fa_row);
        if cost > best.0 {
            best = (cost, i);
        }
    }
    let class = &xq.representatives[best.1];
    Ok(BestResponse { cost: best.0, class_index: best.1, histogram: class.histogram.clone(), min_distance: class.min_distance() })
}

/// A quotient class whose histogram skips distances the relaxation assumes present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContiguityViolation {
    pub histogram: Vec<u64>,
    pub multiplicity: u64,
    pub min_distance: usize,
    pub missing: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContiguityReport {
    pub classes: usize,
    pub violating_classes: usize,
    pub words: u64,
    pub violating_words: u64,
    pub class_rate: f64,
    pub word_rate: f64,
    /// Violating classes per nearest distance `m = 0..=n`.
    pub by_min_distance: Vec<usize>,
    pub violations: Vec<ContiguityViolation>,
}

/// Count classes whose support misses a distance in `max(d-m, m)..=n`.
pub fn verify_contiguousness(xq: &ExactQuotient, code: &CodeParams) -> ContiguityReport {
    let n = code.n();
    let mut by_min_distance = vec![0; n + 1];
    let mut violations = Vec::new();
    let (mut words, mut violating_words) = (0u64, 0u64);
    for class in &xq.representatives {
        words += class.multiplicity;
        let m = class.min_distance();
        let lo = code.d().saturating_sub(m).max(m);
        let missing: Vec<usize> = (lo..=n).filter(|&h| class.histogram[h] == 0).collect();
        if !missing.is_empty() {
            by_min_distance[m] += 1;
            violating_words += class.multiplicity;
            violations.push(ContiguityViolation {
                histogram: class.histogram.clone(),
                multiplicity: class.multiplicity,
                min_distance: m,
                missing,
            });
        }
    }
    let classes = xq.representatives.len();
    ContiguityReport {
        classes,
        violating_classes: violations.len(),
        words,
        violating_words,
        class_rate: violations.len() as f64 / classes.max(1) as f64,
        word_rate: violating_words as f64 / words.max(1) as f64,
        by_min_distance,
        violations,
    }
}
