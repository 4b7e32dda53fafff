//! Dense two-phase simplex and the equilibrium of the detection game.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const OPTIMALITY_TOL: f64 = 1e-10;
const RAY_TOL: f64 = 1e-6;
const PHASE_ONE_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 200_000;

/// `max c'x` subject to `A x <= b`, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub c: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl LinearProgram {
    pub fn new(c: DVector<f64>, a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.ncols() != c.len() || a.nrows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, c has {} entries, b has {}",
                a.nrows(),
                a.ncols(),
                c.len(),
                b.len()
            )));
        }
        if a.iter().chain(b.iter()).chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite LP data".into()));
        }
        Ok(Self { c, a, b })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub x: DVector<f64>,
    pub objective: f64,
    /// Multipliers of `A x <= b`, optimal for `min b'y, A'y >= c, y >= 0`.
    pub duals: DVector<f64>,
    pub iterations: usize,
}

impl LpSolution {
    /// Largest violation of `A x <= b`.
    pub fn primal_residual(&self, lp: &LinearProgram) -> f64 {
        (&lp.a * &self.x - &lp.b).iter().fold(0.0f64, |m, &v| m.max(v))
    }

    /// Largest violation of `A'y >= c`.
    pub fn dual_residual(&self, lp: &LinearProgram) -> f64 {
        (&lp.c - lp.a.transpose() * &self.duals).iter().fold(0.0f64, |m, &v| m.max(v))
    }

    /// `|y'(b - A x)| + |x'(A'y - c)|`.
    pub fn complementary_slackness(&self, lp: &LinearProgram) -> f64 {
        let slack = &lp.b - &lp.a * &self.x;
        let reduced = lp.a.transpose() * &self.duals - &lp.c;
        self.duals.dot(&slack).abs() + self.x.dot(&reduced).abs()
    }
}

struct Tableau {
    rows: usize,
    width: usize,
    /// `rows` constraint rows followed by the phase-2 and phase-1 objective rows;
    /// the last column is the right-hand side. Objective rows hold reduced costs and `-z`.
    data: Vec<f64>,
    basis: Vec<usize>,
    iterations: usize,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.at(row, col);
        for v in &mut self.data[row * w..(row + 1) * w] {
            *v /= p;
        }
        let pivot_row = self.data[row * w..(row + 1) * w].to_vec();
        for r in 0..self.rows + 2 {
            if r == row {
                continue;
            }
            let f = self.data[r * w + col];
            if f != 0.0 {
                for (v, &pv) in self.data[r * w..(r + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.data[r * w + col] = 0.0;
            }
        }
        self.basis[row] = col;
        self.iterations += 1;
    }

    /// Bland's rule on objective row `obj` over columns `0..allowed`.
    fn optimize(&mut self, obj: usize, allowed: usize) -> Result<()> {
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(Error::IterationLimit(MAX_ITERATIONS));
            }
            let mut step = None;
            for col in (0..allowed).filter(|&j| self.at(obj, j) > OPTIMALITY_TOL) {
                match self.ratio_test(col) {
                    Some(row) => {
                        step = Some((row, col));
                        break;
                    }
                    // a barely positive reduced cost with no pivot is round-off, not a ray
                    None if self.at(obj, col) < RAY_TOL => continue,
                    None => return Err(Error::Unbounded),
                }
            }
            let Some((row, col)) = step else {
                return Ok(());
            };
            self.pivot(row, col);
        }
    }

    /// Minimum-ratio row for entering column `col`, ties to the lowest basic index.
    fn ratio_test(&self, col: usize) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for r in 0..self.rows {
            let a = self.at(r, col);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs(r).max(0.0) / a;
            best = match best {
                Some((br, brow)) => {
                    let slack = 1e-12 * br.abs().max(1.0);
                    if ratio < br - slack || (ratio <= br + slack && self.basis[r] < self.basis[brow]) {
                        Some((ratio, r))
                    } else {
                        Some((br, brow))
                    }
                }
                None => Some((ratio, r)),
            };
        }
        best.map(|(_, r)| r)
    }
}

/// Two-phase dense simplex with Bland's rule.
///
/// The final basis is re-solved directly with an LU factorization, so the
/// returned primal and dual vectors do not carry accumulated pivot error.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution> {
    let (m, n) = lp.a.shape();
    let negative: Vec<usize> = (0..m).filter(|&i| lp.b[i] < 0.0).collect();
    let arts = negative.len();
    let cols = n + m + arts;
    let width = cols + 1;
    let mut data = vec![0.0; (m + 2) * width];
    let mut basis = vec![0usize; m];
    let mut sign = vec![1.0; m];
    for &i in &negative {
        sign[i] = -1.0;
    }
    for i in 0..m {
        let row = &mut data[i * width..(i + 1) * width];
        for (j, r) in row.iter_mut().enumerate().take(n) {
            *r = sign[i] * lp.a[(i, j)];
        }
        row[n + i] = sign[i];
        row[cols] = sign[i] * lp.b[i];
        basis[i] = n + i;
    }
    for (k, &i) in negative.iter().enumerate() {
        data[i * width + n + m + k] = 1.0;
        basis[i] = n + m + k;
    }
    let obj2 = m;
    let obj1 = m + 1;
    for j in 0..n {
        data[obj2 * width + j] = lp.c[j];
    }
    // phase 1 maximizes -sum(artificials); express it in the starting basis
    for &i in &negative {
        for j in 0..width {
            if !(n + m..cols).contains(&j) {
                data[obj1 * width + j] += data[i * width + j];
            }
        }
    }
    let mut t = Tableau { rows: m, width, data, basis, iterations: 0 };

    if arts > 0 {
        t.optimize(obj1, cols)?;
        if -t.rhs(obj1) < -PHASE_ONE_TOL * (1.0 + lp.b.amax()) {
            return Err(Error::Infeasible);
        }
        // drive zero-level artificials out of the basis where possible
        for r in 0..m {
            if t.basis[r] >= n + m {
                if let Some(col) = (0..n + m).find(|&j| t.at(r, j).abs() > PIVOT_TOL) {
                    t.pivot(r, col);
                }
            }
        }
    }
    t.optimize(obj2, n + m)?;

    // refine from the final basis in the original coordinates
    let column = |j: usize| -> DVector<f64> {
        if j < n {
            lp.a.column(j).into_owned()
        } else if j < n + m {
            DVector::from_fn(m, |i, _| if i == j - n { 1.0 } else { 0.0 })
        } else {
            let row = negative[j - n - m];
            DVector::from_fn(m, |i, _| if i == row { sign[row] } else { 0.0 })
        }
    };
    let mut basis_matrix = DMatrix::zeros(m, m);
    for (r, &j) in t.basis.iter().enumerate() {
        basis_matrix.set_column(r, &column(j));
    }
    let cost_b = DVector::from_fn(m, |r, _| if t.basis[r] < n { lp.c[t.basis[r]] } else { 0.0 });
    let lu = basis_matrix.clone().full_piv_lu();
    let (x_b, duals) = match (lu.solve(&lp.b), basis_matrix.transpose().full_piv_lu().solve(&cost_b)) {
        (Some(xb), Some(y)) => (xb, y),
        _ => {
            // singular basis (redundant rows): fall back to the tableau values
            let xb = DVector::from_fn(m, |r, _| t.rhs(r));
            let y = DVector::from_fn(m, |i, _| -t.at(obj2, n + i));
            (xb, y)
        }
    };
    let mut x = DVector::zeros(n);
    for (r, &j) in t.basis.iter().enumerate() {
        if j < n {
            x[j] = x_b[r];
        }
    }
    let objective = lp.c.dot(&x);
    Ok(LpSolution { x, objective, duals, iterations: t.iterations })
}

/// Optimal mixed strategies and value of the game with matrix `Xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub pi_star: Vec<f64>,
    pub sigma_star: Vec<f64>,
    pub beta_star: Vec<f64>,
    /// Value of the un-shifted game.
    pub value: f64,
    pub value_shifted: f64,
    pub shift: f64,
    pub value_no_detector: f64,
    /// `1'omega*` for the shifted matrix.
    pub lp_objective: f64,
    /// `1'theta*` from the dual solved as its own LP.
    pub dual_objective: f64,
    pub duality_gap: f64,
    /// Gap between the primal objective and the final-basis multipliers.
    pub multiplier_gap: f64,
}

/// Solve `max 1'w s.t. Xi_+ w <= 1` and its dual `min 1't s.t. Xi_+' t >= 1`.
///
/// `Xi_+` is scaled by its largest entry before solving; results are reported
/// in the original units.
pub fn solve_equilibrium(xi: &DMatrix<f64>, xi_plus: &DMatrix<f64>, shift: f64, pi: &DMatrix<f64>) -> Result<Equilibrium> {
    let (nu, mu) = xi_plus.shape();
    if xi.shape() != (nu, mu) || pi.ncols() != mu || nu == 0 || mu == 0 {
        return Err(Error::DimensionMismatch(format!(
            "Xi {:?}, Xi_+ {:?}, Pi {:?}",
            xi.shape(),
            xi_plus.shape(),
            pi.shape()
        )));
    }
    let min = xi_plus.min();
    // Also rejects NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(min > 0.0) {
        return Err(Error::NonPositiveGame(min));
    }
    let scale = xi_plus.max();
    let scaled = xi_plus / scale;

    let primal = LinearProgram::new(DVector::from_element(mu, 1.0), scaled.clone(), DVector::from_element(nu, 1.0))?;
    let sol = simplex_solve(&primal)?;
    let dual = LinearProgram::new(DVector::from_element(nu, -1.0), -scaled.transpose(), DVector::from_element(mu, -1.0))?;
    let dsol = simplex_solve(&dual)?;

    let omega_sum = sol.objective;
    let theta_sum = -dsol.objective;
    let multiplier_sum: f64 = sol.duals.sum();
    let sigma = normalize(&sol.x);
    let beta = normalize(&dsol.x);
    let pi_star = (pi * DVector::from_column_slice(&sigma)).iter().map(|v| v.clamp(0.0, 1.0)).collect();

    let value_shifted = scale / omega_sum;
    Ok(Equilibrium {
        pi_star,
        sigma_star: sigma,
        beta_star: beta,
        value: value_shifted - shift,
        value_shifted,
        shift,
        value_no_detector: no_detector_value(xi),
        lp_objective: omega_sum / scale,
        dual_objective: theta_sum / scale,
        duality_gap: (omega_sum - theta_sum).abs() / scale,
        multiplier_gap: (omega_sum - multiplier_sum).abs() / scale,
    })
}

fn normalize(x: &DVector<f64>) -> Vec<f64> {
    let clipped: Vec<f64> = x.iter().map(|&v| v.max(0.0)).collect();
    let s: f64 = clipped.iter().sum();
    clipped.into_iter().map(|v| v / s).collect()
}

/// Attacker's best payoff when the detector never alarms: the largest entry
/// of the last column of `Xi` (the all-zero detector pattern).
pub fn no_detector_value(xi: &DMatrix<f64>) -> f64 {
    xi.column(xi.ncols() - 1).max()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleReport {
    pub value: f64,
    /// `max_i (Xi sigma*)_i`.
    pub upper: f64,
    /// `min_j (beta*' Xi)_j`.
    pub lower: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub const SADDLE_TOLERANCE: f64 = 1e-6;

pub fn saddle_check(xi: &DMatrix<f64>, eq: &Equilibrium) -> SaddleReport {
    saddle_check_with(xi, eq, SADDLE_TOLERANCE)
}

pub fn saddle_check_with(xi: &DMatrix<f64>, eq: &Equilibrium, tolerance: f64) -> SaddleReport {
    let upper = (xi * DVector::from_column_slice(&eq.sigma_star)).max();
    let lower = (DVector::from_column_slice(&eq.beta_star).transpose() * xi).min();
    let passed = upper <= eq.value + tolerance && lower >= eq.value - tolerance;
    SaddleReport { value: eq.value, upper, lower, tolerance, passed }
}
