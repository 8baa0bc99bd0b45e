//! Sample-size schedules, synthetic regression models, and the two
//! experiment drivers: consistency sweeps over an `(n, seed)` grid and
//! regularization-path diagnostics on a fixed sample.

use rand::Rng;
use rayon::prelude::*;

use crate::dict::Dictionary;
use crate::loss::Loss;
use crate::penalty::{ModulusBound, Regularizer};
use crate::rng::derive_rng;
use crate::seq::SeqVector;
use crate::solver::{gauss_solve, solve_primal, ErmProblem};
use crate::{Error, Result};

const TAG_CELL: u64 = 0x6365_6c6c;

/// Regularization schedule `λ_n = λ₀ n^{−γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    lambda0: f64,
    gamma: f64,
    r: f64,
}

/// Consistency flags for a schedule: `weak` asks that `λ_n n^{1/q}` diverge
/// (with `q = max{2, r}`), `strong` additionally divides by `log n`. For
/// power schedules a polynomial gap absorbs the logarithm, so the two flags
/// coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleValidity {
    pub weak: bool,
    pub strong: bool,
}

impl Schedule {
    pub fn new(lambda0: f64, gamma: f64, r: f64) -> Result<Self> {
        if !(lambda0 > 0.0) || !lambda0.is_finite() {
            return Err(Error::invalid(format!("schedule needs lambda0 > 0, got {lambda0}")));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::invalid(format!("schedule needs gamma >= 0, got {gamma}")));
        }
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::invalid(format!("schedule exponent must satisfy r > 1, got {r}")));
        }
        Ok(Self { lambda0, gamma, r })
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn q(&self) -> f64 {
        self.r.max(2.0)
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda0 * (n as f64).powf(-self.gamma)
    }

    /// `γ = 0` keeps `λ_n` bounded away from zero and is rejected outright;
    /// otherwise both flags hold exactly when `0 < γ < 1/q`.
    pub fn validity(&self) -> Result<ScheduleValidity> {
        if self.gamma == 0.0 {
            return Err(Error::invalid("schedule needs gamma > 0: lambda_n must vanish"));
        }
        let weak = self.gamma < 1.0 / self.q();
        Ok(ScheduleValidity { weak, strong: weak })
    }
}

/// Regression truth `y = (Au*)(x) + ν` with `x` uniform on `[0,1]` and noise
/// `ν` uniform on `[−σ, σ]`, so `|y| ≤ sup|Au*| + σ` almost surely.
#[derive(Debug, Clone)]
pub struct SyntheticModel {
    dict: Dictionary,
    true_u: SeqVector,
    noise_sigma: f64,
}

impl SyntheticModel {
    pub fn new(dict: Dictionary, true_u: SeqVector, noise_sigma: f64) -> Result<Self> {
        if true_u.len() != dict.len() {
            return Err(Error::dim(dict.len(), true_u.len()));
        }
        if !crate::seq::same_exponent(true_u.r(), dict.r()) {
            return Err(Error::invalid(format!(
                "coefficient exponent {} does not match dictionary exponent {}",
                true_u.r(),
                dict.r()
            )));
        }
        if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
            return Err(Error::invalid(format!("noise level must be >= 0, got {noise_sigma}")));
        }
        Ok(Self { dict, true_u, noise_sigma })
    }

    pub fn dict(&self) -> &Dictionary {
        &self.dict
    }

    pub fn true_u(&self) -> &SeqVector {
        &self.true_u
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    /// Almost-sure bound on `|y|`.
    pub fn y_bound(&self) -> Result<f64> {
        Ok(self.dict.synthesis_sup_bound(&self.true_u)? + self.noise_sigma)
    }

    /// Draw `n` i.i.d. pairs. Consumes exactly two uniforms per pair so the
    /// stream layout does not depend on `σ`.
    pub fn draw(&self, rng: &mut impl Rng, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let x: f64 = rng.gen();
            let noise = (2.0 * rng.gen::<f64>() - 1.0) * self.noise_sigma;
            ys.push(self.dict.apply(&self.true_u, x)? + noise);
            xs.push(x);
        }
        Ok((xs, ys))
    }

    /// Square-loss risk of the noise alone, `σ²/3`.
    pub fn noise_floor(&self) -> f64 {
        self.noise_sigma * self.noise_sigma / 3.0
    }

    /// Exact excess square-loss risk `∫ (Au − Au*)² dx`, a Gram quadratic
    /// form in `u − u*`.
    pub fn excess_risk(&self, u: &SeqVector) -> Result<f64> {
        let d = u.sub(&self.true_u)?;
        let gram = self.dict.gram();
        let c = d.coeffs();
        let mut acc = 0.0;
        for (i, row) in gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                acc += c[i] * g * c[j];
            }
        }
        Ok(acc)
    }

    /// Exact square-loss risk `excess + σ²/3`.
    pub fn exact_risk(&self, u: &SeqVector) -> Result<f64> {
        Ok(self.excess_risk(u)? + self.noise_floor())
    }

    /// Monte-Carlo risk estimate; cross-checks `exact_risk` and covers
    /// losses without a closed form.
    pub fn monte_carlo_risk(
        &self,
        u: &SeqVector,
        loss: &Loss,
        draws: usize,
        rng: &mut impl Rng,
    ) -> Result<f64> {
        if draws == 0 {
            return Err(Error::invalid("monte_carlo_risk needs draws >= 1"));
        }
        let mut acc = 0.0;
        for _ in 0..draws {
            let x: f64 = rng.gen();
            let noise = (2.0 * rng.gen::<f64>() - 1.0) * self.noise_sigma;
            let y = self.dict.apply(&self.true_u, x)? + noise;
            acc += loss.value(y, self.dict.apply(u, x)?);
        }
        Ok(acc / draws as f64)
    }
}

/// Norm radius every regularized empirical minimizer stays inside:
/// `((loss0_bound + 1) / (ηβλ))^{1/r}`, where `loss0_bound` caps the loss at
/// the zero predictor. Decreasing `λ` widens the radius monotonically.
pub fn radius_bound(lambda: f64, loss0_bound: f64, mb: &ModulusBound) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("radius bound needs lambda > 0, got {lambda}")));
    }
    if !(loss0_bound >= 0.0) || !loss0_bound.is_finite() {
        return Err(Error::invalid(format!("loss bound must be >= 0, got {loss0_bound}")));
    }
    Ok(((loss0_bound + 1.0) / (mb.eta * mb.beta * lambda)).powf(1.0 / mb.r))
}

/// One `(n, seed)` experiment cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub seed: u64,
    pub lambda: f64,
    pub excess_risk: f64,
    pub u_dist: f64,
    pub kkt_residual: f64,
    pub radius_bound: f64,
    pub within_radius: bool,
    pub converged: bool,
    pub objective: f64,
    pub risk_at_zero: f64,
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub schedule: Schedule,
    pub validity: ScheduleValidity,
    pub cells: Vec<Cell>,
}

impl ConsistencyReport {
    pub fn median_excess(&self, n: usize) -> Option<f64> {
        median(self.cells.iter().filter(|c| c.n == n).map(|c| c.excess_risk))
    }

    pub fn median_u_dist(&self, n: usize) -> Option<f64> {
        median(self.cells.iter().filter(|c| c.n == n).map(|c| c.u_dist))
    }
}

fn median(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub master_seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 50_000, master_seed: 0 }
    }
}

/// Square-loss consistency sweep: for every `(n, seed)` cell, draw a sample,
/// set `λ_n`, solve, and record the exact excess risk, the distance to the
/// true coefficients, and the norm-radius check. Cells run in parallel, each
/// on its own random stream derived from `(master_seed, n, seed)`, and the
/// table comes back sorted by `(n, seed)` regardless of thread schedule.
///
/// The model must be well specified (`u*` inside the regularizer domain) so
/// that the risk minimizer over the hypothesis class is `Au*` itself; with
/// the linearly independent dictionaries built here, `u*` is then the unique
/// risk-minimizing coefficient vector and `u_dist` measures against it.
pub fn run_consistency(
    model: &SyntheticModel,
    reg: &Regularizer,
    schedule: Schedule,
    n_grid: &[usize],
    seeds: &[u64],
    opts: RunOptions,
) -> Result<ConsistencyReport> {
    let validity = schedule.validity()?;
    if n_grid.is_empty() || seeds.is_empty() {
        return Err(Error::invalid("consistency run needs at least one n and one seed"));
    }
    if n_grid.contains(&0) {
        return Err(Error::invalid("sample sizes must be >= 1"));
    }
    if !reg.value(model.true_u())?.is_finite() {
        return Err(Error::invalid(
            "true coefficients fall outside the regularizer domain; excess risk would not be exact",
        ));
    }
    let mb = ModulusBound::for_lr(reg.eta_min(), reg.r(), 0.0)?;
    let loss = Loss::power(2.0, model.y_bound()?)?;
    let loss0 = loss.max_value_at_zero()?;

    let keys: Vec<(usize, u64)> =
        n_grid.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    let mut cells = keys
        .into_par_iter()
        .map(|(n, seed)| -> Result<Cell> {
            let mut rng = derive_rng(opts.master_seed, &[TAG_CELL, n as u64, seed]);
            let (xs, ys) = model.draw(&mut rng, n)?;
            let lambda = schedule.lambda(n);
            let prob = ErmProblem::new(
                model.dict().clone(),
                reg.clone(),
                loss.clone(),
                xs,
                ys,
                lambda,
            )?;
            let zero = SeqVector::zeros(model.dict().len(), model.dict().r())?;
            let risk_at_zero = prob.empirical_risk(&zero)?;
            let sol = solve_primal(&prob, opts.tol, opts.max_iter)?;
            let rb = radius_bound(lambda, loss0, &mb)?;
            Ok(Cell {
                n,
                seed,
                lambda,
                excess_risk: model.excess_risk(&sol.u)?,
                u_dist: sol.u.sub(model.true_u())?.norm(),
                kkt_residual: sol.kkt_residual,
                radius_bound: rb,
                within_radius: sol.u.norm() <= rb,
                converged: sol.converged,
                objective: sol.objective,
                risk_at_zero,
            })
        })
        .collect::<Result<Vec<Cell>>>()?;
    cells.sort_by(|a, b| (a.n, a.seed).cmp(&(b.n, b.seed)));
    Ok(ConsistencyReport { schedule, validity, cells })
}

/// One solved point on the regularization path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub lambda: f64,
    /// Empirical risk `F(u_λ)` alone.
    pub risk: f64,
    /// Weighted penalty `λ G(u_λ)`.
    pub penalty: f64,
    pub norm_u: f64,
    /// Cap on `‖u_λ‖`: the total-convexity lower bound `ηβ t^r` inverted at
    /// `(F(0) − inf F + gap) / λ`. Zero is the penalty minimizer, so the
    /// whole path stays inside this radius.
    pub growth_bound: f64,
    pub kkt_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct PathReport {
    pub points: Vec<PathPoint>,
    /// Unregularized least-squares risk, the floor `F` is driven toward.
    pub inf_risk: f64,
    /// Risk never increased along the decreasing-`λ` grid (up to solver
    /// tolerance).
    pub risk_nonincreasing: bool,
}

/// Solve the same sample on a strictly decreasing `λ` grid and report, per
/// point, the risk/penalty split and the norm growth bound. Square loss only:
/// the growth bound needs the unregularized infimum, which least squares
/// supplies in closed form.
pub fn path_diagnostics(
    dict: &Dictionary,
    reg: &Regularizer,
    loss: &Loss,
    xs: &[f64],
    ys: &[f64],
    lambdas: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<PathReport> {
    if lambdas.is_empty() {
        return Err(Error::invalid("path needs at least one lambda"));
    }
    if lambdas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("lambda grid must be strictly decreasing"));
    }
    if loss.p() != 2.0 {
        return Err(Error::invalid("path diagnostics implemented for the square loss only"));
    }
    let probe = ErmProblem::new(
        dict.clone(),
        reg.clone(),
        loss.clone(),
        xs.to_vec(),
        ys.to_vec(),
        lambdas[0],
    )?;
    let inf_risk = inf_square_risk(&probe)?;
    let mb = ModulusBound::for_lr(reg.eta_min(), reg.r(), 0.0)?;
    let zero = SeqVector::zeros(dict.len(), dict.r())?;
    let risk_at_zero = probe.empirical_risk(&zero)?;

    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let prob = ErmProblem::new(
            dict.clone(),
            reg.clone(),
            loss.clone(),
            xs.to_vec(),
            ys.to_vec(),
            lambda,
        )?;
        let sol = solve_primal(&prob, tol, max_iter)?;
        let risk = prob.empirical_risk(&sol.u)?;
        let gap = sol.duality_gap.unwrap_or(0.0).max(0.0);
        let slack = ((risk_at_zero - inf_risk).max(0.0) + gap) / lambda;
        points.push(PathPoint {
            lambda,
            risk,
            penalty: lambda * reg.value(&sol.u)?,
            norm_u: sol.u.norm(),
            growth_bound: mb.lower_bound_inverse(slack)?,
            kkt_residual: sol.kkt_residual,
            converged: sol.converged,
        });
    }
    let risk_nonincreasing = points
        .windows(2)
        .all(|w| w[1].risk <= w[0].risk + tol.max(1e-9) * (1.0 + w[0].risk.abs()));
    Ok(PathReport { points, inf_risk, risk_nonincreasing })
}

/// Minimum of the unregularized empirical square risk via the normal
/// equations; a singular Gram falls back to a tiny ridge jitter, which only
/// lowers the reported floor further within roundoff.
fn inf_square_risk(prob: &ErmProblem) -> Result<f64> {
    let k = prob.dict().len();
    let n = prob.n() as f64;
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for (feat, &y) in prob.features().iter().zip(prob.ys()) {
        let c = feat.coeffs();
        for i in 0..k {
            for j in 0..k {
                a[i][j] += c[i] * c[j] / n;
            }
            b[i] += y * c[i] / n;
        }
    }
    let ls = match gauss_solve(a.clone(), b.clone()) {
        Ok(sol) => sol,
        Err(_) => {
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += 1e-10;
            }
            gauss_solve(a, b)?
        }
    };
    let u = SeqVector::new(ls, prob.dict().r())?;
    prob.empirical_risk(&u)
}
