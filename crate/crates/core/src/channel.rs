//! Symmetric symbol-error channel and the distance-transition probabilities
//! `rho(n1, n2)` it induces.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois_rs::{hamming, CodeParams, Codeword};

/// Default Monte Carlo trial count per row of `rho`.
pub const DEFAULT_RHO_TRIALS: u64 = 1_000_000;

const TRIAL_CHUNK: u64 = 4096;

/// Each symbol independently turns, with probability `p_e`, into one of the other `q - 1` symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    p_e: f64,
    q: usize,
    n: usize,
}

impl ChannelModel {
    pub fn new(p_e: f64, q: usize, n: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_e) {
            return Err(Error::InvalidChannel(format!("p_e = {p_e} not in [0, 1]")));
        }
        if q < 2 {
            return Err(Error::InvalidChannel(format!("alphabet size q = {q} < 2")));
        }
        if n == 0 {
            return Err(Error::InvalidChannel("codeword length n = 0".into()));
        }
        Ok(Self { p_e, q, n })
    }

    pub fn for_code(code: &CodeParams, p_e: f64) -> Result<Self> {
        Self::new(p_e, code.q(), code.n())
    }

    pub fn p_e(&self) -> f64 {
        self.p_e
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn n(&self) -> usize {
        self.n
    }

    /// Probability that a given wrong symbol is turned into a given other symbol.
    pub fn p_specific(&self) -> f64 {
        self.p_e / (self.q - 1) as f64
    }

    fn check_code(&self, code: &CodeParams) -> Result<()> {
        if code.n() != self.n || code.q() != self.q {
            return Err(Error::InvalidChannel(format!(
                "channel (n={}, q={}) does not match code {code}",
                self.n, self.q
            )));
        }
        Ok(())
    }
}

/// `p(y | x) = (1 - p_e)^(n - H) (p_e / (q - 1))^H`.
pub fn transition_prob(x: &Codeword, y: &Codeword, ch: &ChannelModel) -> Result<f64> {
    if x.len() != ch.n {
        return Err(Error::LengthMismatch { expected: ch.n, actual: x.len() });
    }
    let h = hamming(x, y)?;
    Ok(ln_to_prob(
        pow_ln(1.0 - ch.p_e, (ch.n - h) as u64) + pow_ln(ch.p_specific(), h as u64),
    ))
}

/// Independent RNG for `(label, index)` under a run seed; a clone of one
/// ChaCha stream positioned at a fixed word offset per index.
pub fn substream(seed: u64, label: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label);
    rng.set_word_pos((index as u128) << 20);
    rng
}

/// Pass `x` through the channel using randomness from `rng`.
pub fn perturb_with<R: Rng + ?Sized>(x: &Codeword, ch: &ChannelModel, rng: &mut R) -> Codeword {
    let q = ch.q as u32;
    let symbols = x
        .symbols()
        .iter()
        .map(|&s| {
            if rng.gen_bool(ch.p_e) {
                let r = rng.gen_range(0..q - 1);
                (if r >= s as u32 { r + 1 } else { r }) as u8
            } else {
                s
            }
        })
        .collect();
    Codeword::from_symbols(symbols)
}

/// Deterministic single perturbation under `seed`.
pub fn perturb(x: &Codeword, ch: &ChannelModel, seed: u64) -> Codeword {
    perturb_with(x, ch, &mut substream(seed, 0, 0))
}

fn pow_ln(base: f64, exp: u64) -> f64 {
    if exp == 0 {
        0.0
    } else if base <= 0.0 {
        f64::NEG_INFINITY
    } else {
        exp as f64 * base.ln()
    }
}

fn ln_to_prob(ln: f64) -> f64 {
    if ln == f64::NEG_INFINITY {
        0.0
    } else {
        ln.exp()
    }
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// `C(n, k) p^k (1 - p)^(n - k)`, evaluated in log space.
pub fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let (n, k) = (n as u64, k as u64);
    ln_to_prob(ln_binomial(n, k) + pow_ln(p, k) + pow_ln(1.0 - p, n - k))
}

/// Probability that two words at distance `n1` end up at distance `n2`
/// after one of them passes through the channel.
///
/// Of the `n - n1` agreeing positions, `i` break (probability `p_e` each);
/// of the `n1` disagreeing ones, `j` are repaired (probability `p_e/(q-1)`),
/// and `n2 = n1 + i - j`.
pub fn rho_analytic(n1: usize, n2: usize, ch: &ChannelModel) -> Result<f64> {
    let n = ch.n;
    for v in [n1, n2] {
        if v > n {
            return Err(Error::DistanceOutOfRange { value: v, max: n });
        }
    }
    let matched = n - n1;
    let repair = ch.p_specific();
    let mut total = 0.0;
    for j in 0..=n1 {
        // i = n2 - n1 + j must lie in [0, matched]
        let i = n2 as i64 - n1 as i64 + j as i64;
        if i < 0 || i as usize > matched {
            continue;
        }
        total += binomial_pmf(matched, i as usize, ch.p_e) * binomial_pmf(n1, j, repair);
    }
    Ok(total)
}

/// `rho(n1, n2)` for `n2 = 0..=n`.
pub fn rho_row(n1: usize, ch: &ChannelModel) -> Result<Vec<f64>> {
    (0..=ch.n).map(|n2| rho_analytic(n1, n2, ch)).collect()
}

/// Monte Carlo estimate of one `rho` entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub count: u64,
    pub trials: u64,
}

impl RhoEstimate {
    fn from_count(count: u64, trials: u64) -> Self {
        let p = count as f64 / trials as f64;
        Self { estimate: p, std_error: (p * (1.0 - p) / trials as f64).sqrt(), count, trials }
    }
}

/// Distance histogram over `trials` perturbations of a word at distance `n1` from a reference.
///
/// Trials are split into fixed chunks and each trial draws from its own
/// substream, so the counts do not depend on the thread count.
pub fn rho_mc_row(n1: usize, ch: &ChannelModel, trials: u64, seed: u64) -> Result<Vec<RhoEstimate>> {
    let n = ch.n;
    if n1 > n {
        return Err(Error::DistanceOutOfRange { value: n1, max: n });
    }
    if trials == 0 {
        return Err(Error::InvalidChannel("Monte Carlo needs at least one trial".into()));
    }
    let reference = Codeword::zero(n);
    let start = Codeword::from_symbols((0..n).map(|i| u8::from(i < n1)).collect());
    let base = substream(seed, 1 + n1 as u64, 0);
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut hist = vec![0u64; n + 1];
            for t in c * TRIAL_CHUNK..((c + 1) * TRIAL_CHUNK).min(trials) {
                let mut rng = base.clone();
                rng.set_word_pos((t as u128) << 20);
                let y = perturb_with(&start, ch, &mut rng);
                hist[hamming(&reference, &y).expect("equal lengths")] += 1;
            }
            hist
        })
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts.into_iter().map(|c| RhoEstimate::from_count(c, trials)).collect())
}

/// Monte Carlo estimate of `rho(n1, n2)`.
pub fn rho_mc(n1: usize, n2: usize, ch: &ChannelModel, trials: u64, seed: u64) -> Result<RhoEstimate> {
    if n2 > ch.n {
        return Err(Error::DistanceOutOfRange { value: n2, max: ch.n });
    }
    Ok(rho_mc_row(n1, ch, trials, seed)?[n2])
}

/// How the `rho` table is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum RhoMethod {
    #[default]
    Analytic,
    MonteCarlo { trials: u64, seed: u64 },
}

/// Full `(n+1) x (n+1)` table of `rho(m, j)`; the game only reads columns `j <= d_o`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoMatrix {
    n: usize,
    radius: usize,
    full: Vec<Vec<f64>>,
    method: RhoMethod,
}

impl RhoMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn method(&self) -> RhoMethod {
        self.method
    }

    /// `rho(m, j)` for any `m, j <= n`.
    pub fn get(&self, m: usize, j: usize) -> f64 {
        self.full[m][j]
    }

    pub fn full_row(&self, m: usize) -> &[f64] {
        &self.full[m]
    }

    /// `sum_{t <= d_o} rho(m, t)`: probability a word `m` away stays decodable to the same codeword.
    pub fn within_radius(&self, m: usize) -> f64 {
        self.full[m][..=self.radius].iter().sum()
    }

    /// The matrix `R`, `(n+1) x (d_o+1)`.
    pub fn truncated(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n + 1, self.radius + 1, |m, j| self.full[m][j])
    }
}

/// Build `R` (kept at full width internally) after checking that every full row sums to one.
pub fn build_r(code: &CodeParams, ch: &ChannelModel, method: RhoMethod) -> Result<RhoMatrix> {
    ch.check_code(code)?;
    let n = code.n();
    let full: Vec<Vec<f64>> = match method {
        RhoMethod::Analytic => (0..=n).map(|m| rho_row(m, ch)).collect::<Result<_>>()?,
        RhoMethod::MonteCarlo { trials, seed } => (0..=n)
            .map(|m| Ok(rho_mc_row(m, ch, trials, seed)?.iter().map(|e| e.estimate).collect()))
            .collect::<Result<_>>()?,
    };
    for (m, row) in full.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || row.iter().any(|&v| !(0.0..=1.0 + 1e-12).contains(&v)) {
            return Err(Error::Invariant(format!("rho row {m} sums to {sum}")));
        }
    }
    Ok(RhoMatrix { n, radius: code.error_correction_radius(), full, method })
}

/// Distribution of the number of symbol errors, `Binom(n, p_e)`.
pub fn symbol_error_pmf(code: &CodeParams, ch: &ChannelModel) -> Vec<f64> {
    (0..=code.n()).map(|j| binomial_pmf(code.n(), j, ch.p_e)).collect()
}

/// Probability that more than `d_o` symbols are hit, i.e. decoding error or failure.
pub fn decode_failure_prob(code: &CodeParams, ch: &ChannelModel) -> f64 {
    // upper tail summed directly; 1 - lower tail cancels badly for small p_e
    symbol_error_pmf(code, ch)[code.error_correction_radius() + 1..].iter().sum()
}
