use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{reward_vector_s, GameWeights, SignPrior};
use crate::channel::RhoMatrix;
use crate::error::{Error, Result};
use crate::galois_rs::{CodeParams, WeightDistribution};

/// Offset kept above zero when shifting the game matrix positive.
pub const POSITIVITY_EPSILON: f64 = 1.0;

/// Largest supported `d_o`; `mu = 2^(d_o+1)` columns are materialized.
const MAX_RADIUS: usize = 16;

/// Columns of `Lambda` sharing the same nearest-codeword distance `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaGroup {
    pub min_distance: usize,
    pub start: usize,
    pub width: usize,
    /// Entry placed at one free row per column; the other free rows hold 1.
    pub lambda: u64,
    pub free_rows: RangeInclusive<usize>,
    /// Row pinned to 1 (the nearest codeword) when `m <= d_o`.
    pub pinned_row: Option<usize>,
}

/// Extreme points of the relaxed distance histograms, one column each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lambda {
    columns: Vec<Vec<u64>>,
    groups: Vec<LambdaGroup>,
}

impl Lambda {
    pub fn nu(&self) -> usize {
        self.columns.len()
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, c: usize) -> &[u64] {
        &self.columns[c]
    }

    pub fn groups(&self) -> &[LambdaGroup] {
        &self.groups
    }

    /// Group index of column `c`.
    pub fn group_of(&self, c: usize) -> usize {
        self.groups.iter().position(|g| c < g.start + g.width).expect("column in range")
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows(), self.nu(), |r, c| self.columns[c][r] as f64)
    }
}

/// Build `Lambda` for nearest distances `m = 0..=n-k`.
///
/// For `m <= d_o` row `m` holds 1, rows below `d - m` are otherwise zero and
/// rows `d-m..=n` are free with total `tau - 1`. For `m > d_o` rows below `m`
/// are zero and rows `m..=n` are free with total `tau`. Within a group one
/// column per free row carries `lambda_m` there, in ascending row order.
pub fn build_lambda(code: &CodeParams) -> Result<Lambda> {
    let (n, d, radius) = (code.n(), code.d(), code.error_correction_radius());
    let tau = code.tau();
    let mut columns = Vec::new();
    let mut groups = Vec::new();
    for m in 0..=n - code.k() {
        let (free_rows, pinned_row) = if m <= radius { (d - m..=n, Some(m)) } else { (m..=n, None) };
        let width = free_rows.end() - free_rows.start() + 1;
        // free entries sum to tau - 1 (pinned) or tau
        let free_total = tau - u64::from(pinned_row.is_some());
        let needed = width as u64 - 1;
        if free_total <= needed {
            return Err(Error::RelaxationTooSmall { tau, needed: needed + u64::from(pinned_row.is_some()) });
        }
        let lambda = free_total - needed;
        let start = columns.len();
        for row in free_rows.clone() {
            let mut col = vec![0u64; n + 1];
            if let Some(p) = pinned_row {
                col[p] = 1;
            }
            for r in free_rows.clone() {
                col[r] = if r == row { lambda } else { 1 };
            }
            columns.push(col);
        }
        groups.push(LambdaGroup { min_distance: m, start, width, lambda, free_rows, pinned_row });
    }
    Ok(Lambda { columns, groups })
}

/// Block matrix `S` mapping each `Lambda` column to its group's reward entry.
pub fn build_s(code: &CodeParams) -> Result<DMatrix<f64>> {
    let lambda = build_lambda(code)?;
    Ok(s_from_lambda(&lambda))
}

fn s_from_lambda(lambda: &Lambda) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(lambda.groups().len(), lambda.nu());
    for (i, g) in lambda.groups().iter().enumerate() {
        for c in g.start..g.start + g.width {
            s[(i, c)] = 1.0;
        }
    }
    s
}

/// `Pi`: all binary vectors of length `d_o + 1` as columns, descending
/// lexicographic order (first column all ones, last all zeros). Returns `(Pi, mu)`.
pub fn build_pi(code: &CodeParams) -> Result<(DMatrix<f64>, usize)> {
    let rows = code.error_correction_radius() + 1;
    if rows > MAX_RADIUS + 1 {
        return Err(Error::InvalidCode(format!("d_o = {} too large for the lifted detector space", rows - 1)));
    }
    let mu = 1usize << rows;
    let pi = DMatrix::from_fn(rows, mu, |r, c| {
        let pattern = mu - 1 - c;
        f64::from(((pattern >> (rows - 1 - r)) & 1) as u8)
    });
    Ok((pi, mu))
}

/// Per error count `j <= d_o`, the probability that an unattacked sign is read
/// `j` symbols from some codeword: `sum_w A_w rho(w, j)`.
///
/// For a linear code every codeword sees the same distance distribution, so
/// any normalized prior gives the same row.
pub fn false_alarm_row(code: &CodeParams, rho: &RhoMatrix, prior: &SignPrior, weights: &WeightDistribution) -> Result<Vec<f64>> {
    prior.validate(code.tau())?;
    if weights.counts().len() != code.n() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "weight distribution has {} entries, code length {}",
            weights.counts().len(),
            code.n()
        )));
    }
    Ok((0..=code.error_correction_radius())
        .map(|j| weights.counts().iter().enumerate().map(|(w, &a)| a as f64 * rho.get(w, j)).sum())
        .collect())
}

/// Game matrix and its positive shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiParts {
    pub xi: DMatrix<f64>,
    pub xi_plus: DMatrix<f64>,
    pub shift: f64,
}

/// `Xi = -g1 Λ'RΠ + S's 1' + g1 Λ'R1 1' + g3 1 (fa'Π)`.
///
/// The two `g1` terms are combined as `g1 Λ'R (1 1' - Π)`, which is the same
/// matrix without cancellation between large entries.
pub fn build_xi(
    lambda: &DMatrix<f64>,
    s_block: &DMatrix<f64>,
    s: &[f64],
    pi: &DMatrix<f64>,
    fa_row: &[f64],
    r: &DMatrix<f64>,
    w: &GameWeights,
) -> Result<XiParts> {
    let (rows, nu) = lambda.shape();
    let (radius1, mu) = pi.shape();
    if r.nrows() != rows || r.ncols() != radius1 || fa_row.len() != radius1 || s_block.shape() != (s.len(), nu) {
        return Err(Error::DimensionMismatch(format!(
            "Lambda {:?}, R {:?}, Pi {:?}, S {:?}, s {}, fa {}",
            lambda.shape(),
            r.shape(),
            pi.shape(),
            s_block.shape(),
            s.len(),
            fa_row.len()
        )));
    }
    let lr = lambda.transpose() * r;
    let not_pi = pi.map(|v| 1.0 - v);
    let missed = &lr * &not_pi * w.g1;
    let rewards = s_block.transpose() * DVector::from_column_slice(s);
    let alarms = DVector::from_column_slice(fa_row).transpose() * pi * w.g3;
    let xi = DMatrix::from_fn(nu, mu, |i, c| missed[(i, c)] + rewards[i] + alarms[c]);
    let min = xi.min();
    let (xi_plus, shift) = if min > 0.0 {
        (xi.clone(), 0.0)
    } else {
        let shift = POSITIVITY_EPSILON - min;
        (xi.add_scalar(shift), shift)
    };
    Ok(XiParts { xi, xi_plus, shift })
}

/// Every object of the relaxed game for one code and channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxedGame {
    pub code: CodeParams,
    pub weights: GameWeights,
    pub lambda: Lambda,
    pub nu: usize,
    pub s: Vec<f64>,
    pub s_block: DMatrix<f64>,
    pub pi: DMatrix<f64>,
    pub mu: usize,
    pub fa_row: Vec<f64>,
    pub xi: DMatrix<f64>,
    pub xi_plus: DMatrix<f64>,
    pub shift: f64,
}

impl RelaxedGame {
    pub fn build(
        code: &CodeParams,
        rho: &RhoMatrix,
        weights: &GameWeights,
        prior: &SignPrior,
        distribution: &WeightDistribution,
    ) -> Result<Self> {
        weights.validate()?;
        if rho.n() != code.n() || rho.radius() != code.error_correction_radius() {
            return Err(Error::DimensionMismatch(format!("rho table for n={} does not match {code}", rho.n())));
        }
        let lambda = build_lambda(code)?;
        let s_block = s_from_lambda(&lambda);
        let s = reward_vector_s(code, rho, weights);
        let (pi, mu) = build_pi(code)?;
        let fa_row = false_alarm_row(code, rho, prior, distribution)?;
        let parts = build_xi(&lambda.matrix(), &s_block, &s, &pi, &fa_row, &rho.truncated(), weights)?;
        Ok(Self {
            code: *code,
            weights: *weights,
            nu: lambda.nu(),
            lambda,
            s,
            s_block,
            pi,
            mu,
            fa_row,
            xi: parts.xi,
            xi_plus: parts.xi_plus,
            shift: parts.shift,
        })
    }
}
