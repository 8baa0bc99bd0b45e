//! The regularized empirical risk problem
//! `min_u (1/n) Σ_i ℓ(y_i, (Au)(x_i)) + λ G(u)`
//! solved by accelerated proximal gradient with backtracking (smooth losses)
//! or proximal subgradient with diminishing steps (hinge, p = 1). Ships with
//! KKT certificates, the dual objective, dual-to-primal recovery, and the
//! two-sample sensitivity inequality.

use crate::dict::Dictionary;
use crate::loss::Loss;
use crate::penalty::{ModulusBound, Regularizer};
use crate::seq::{norm_with, pairing, SeqVector};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ErmProblem {
    dict: Dictionary,
    reg: Regularizer,
    loss: Loss,
    xs: Vec<f64>,
    ys: Vec<f64>,
    lambda: f64,
    features: Vec<SeqVector>,
}

impl ErmProblem {
    pub fn new(
        dict: Dictionary,
        reg: Regularizer,
        loss: Loss,
        xs: Vec<f64>,
        ys: Vec<f64>,
        lambda: f64,
    ) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::invalid("empirical risk needs at least one sample"));
        }
        if xs.len() != ys.len() {
            return Err(Error::dim(xs.len(), ys.len()));
        }
        if let Some(x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::invalid(format!("inputs must lie in [0,1], got {x}")));
        }
        if let Some(y) = ys.iter().find(|y| !y.is_finite()) {
            return Err(Error::invalid(format!("outputs must be finite, got {y}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(format!("lambda must be finite and > 0, got {lambda}")));
        }
        if reg.len() != dict.len() {
            return Err(Error::dim(dict.len(), reg.len()));
        }
        if !crate::seq::same_exponent(reg.r(), dict.r()) {
            return Err(Error::invalid(format!(
                "regularizer exponent {} does not match dictionary exponent {}",
                reg.r(),
                dict.r()
            )));
        }
        let features = xs.iter().map(|&x| dict.feature_map(x)).collect();
        Ok(Self { dict, reg, loss, xs, ys, lambda, features })
    }

    pub fn dict(&self) -> &Dictionary {
        &self.dict
    }

    pub fn reg(&self) -> &Regularizer {
        &self.reg
    }

    pub fn loss(&self) -> &Loss {
        &self.loss
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn features(&self) -> &[SeqVector] {
        &self.features
    }

    pub fn predictions(&self, u: &SeqVector) -> Result<Vec<f64>> {
        self.features.iter().map(|f| pairing(u, f)).collect()
    }

    pub fn empirical_risk(&self, u: &SeqVector) -> Result<f64> {
        let preds = self.predictions(u)?;
        let n = self.n() as f64;
        Ok(preds.iter().zip(&self.ys).map(|(&w, &y)| self.loss.value(y, w)).sum::<f64>() / n)
    }

    /// Full objective `(1/n) Σ ℓ + λG`; `+∞` outside dom G.
    pub fn objective(&self, u: &SeqVector) -> Result<f64> {
        Ok(self.empirical_risk(u)? + self.lambda * self.reg.value(u)?)
    }

    /// Risk gradient in coefficient space (smooth losses).
    fn risk_grad(&self, preds: &[f64]) -> Vec<f64> {
        let n = self.n() as f64;
        let mut g = vec![0.0; self.dict.len()];
        for (i, f) in self.features.iter().enumerate() {
            let h = self.loss.grad(self.ys[i], preds[i]) / n;
            for (gk, &fk) in g.iter_mut().zip(f.coeffs()) {
                *gk += h * fk;
            }
        }
        g
    }

    /// Risk subgradient using the minimal-absolute-value selection.
    fn risk_subgrad(&self, preds: &[f64]) -> Vec<f64> {
        let n = self.n() as f64;
        let mut g = vec![0.0; self.dict.len()];
        for (i, f) in self.features.iter().enumerate() {
            let h = self.loss.min_abs_subgrad(self.ys[i], preds[i]) / n;
            for (gk, &fk) in g.iter_mut().zip(f.coeffs()) {
                *gk += h * fk;
            }
        }
        g
    }

    /// Stationarity vector `ξ(h) = −(1/(nλ)) Σ_i h_i Λ(x_i)`.
    fn stationarity(&self, h: &[f64]) -> Vec<f64> {
        let scale = -1.0 / (self.n() as f64 * self.lambda);
        let mut xi = vec![0.0; self.dict.len()];
        for (i, f) in self.features.iter().enumerate() {
            for (xk, &fk) in xi.iter_mut().zip(f.coeffs()) {
                *xk += scale * h[i] * fk;
            }
        }
        xi
    }

    /// KKT certificate at u: picks `h_i ∈ ∂ℓ_i` (optimizing over the
    /// intervals when the loss has kinks) and reports
    /// `max_k dist(ξ_k(h), ∂g_k(μ_k))` plus the dual coefficients
    /// `w*_i = −h_i/n`.
    pub fn certificate(&self, u: &SeqVector) -> Result<(f64, Vec<f64>)> {
        let preds = self.predictions(u)?;
        let intervals: Vec<(f64, f64)> =
            preds.iter().zip(&self.ys).map(|(&w, &y)| self.loss.subgrad(y, w)).collect();
        let mut h: Vec<f64> =
            preds.iter().zip(&self.ys).map(|(&w, &y)| self.loss.min_abs_subgrad(y, w)).collect();
        if intervals.iter().any(|(lo, hi)| lo < hi) {
            self.refine_selection(u, &mut h, &intervals)?;
        }
        let residual = self.reg.subdiff_residual(u, &self.stationarity(&h))?;
        let n = self.n() as f64;
        let w_star = h.iter().map(|hi| -hi / n).collect();
        Ok((residual, w_star))
    }

    /// Projected gradient on `Σ_k dist²(ξ_k(h), ∂g_k(μ_k))` over the box of
    /// loss subgradient intervals; tightens the certificate at kinks.
    fn refine_selection(&self, u: &SeqVector, h: &mut [f64], intervals: &[(f64, f64)]) -> Result<()> {
        let scale = 1.0 / (self.n() as f64 * self.lambda);
        let frob: f64 = self.features.iter().map(|f| f.coeffs().iter().map(|c| c * c).sum::<f64>()).sum();
        let step = 1.0 / (2.0 * scale * scale * frob).max(1e-300);
        for _ in 0..300 {
            let xi = self.stationarity(h);
            // signed distance from each ξ_k to ∂g_k(μ_k)
            let mut excess = vec![0.0; xi.len()];
            for (k, (&t, atom)) in u.coeffs().iter().zip(self.reg.atoms()).enumerate() {
                if let Some((lo, hi)) = atom.subdiff(t) {
                    excess[k] = if xi[k] < lo {
                        xi[k] - lo
                    } else if xi[k] > hi {
                        xi[k] - hi
                    } else {
                        0.0
                    };
                } else {
                    return Ok(()); // outside dom G: certificate is +∞ regardless
                }
            }
            if excess.iter().all(|e| e.abs() < 1e-15) {
                return Ok(());
            }
            let mut moved = false;
            for (i, f) in self.features.iter().enumerate() {
                let grad_i: f64 =
                    excess.iter().zip(f.coeffs()).map(|(&e, &fk)| 2.0 * e * (-scale) * fk).sum();
                let next = (h[i] - step * grad_i).clamp(intervals[i].0, intervals[i].1);
                if next != h[i] {
                    h[i] = next;
                    moved = true;
                }
            }
            if !moved {
                return Ok(());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub u: SeqVector,
    pub objective: f64,
    pub kkt_residual: f64,
    pub dual_coeffs: Vec<f64>,
    /// `None` when the loss conjugate is unavailable (hinge, logistic).
    pub duality_gap: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize the regularized empirical risk to KKT residual `tol`.
///
/// Smooth losses run monotone FISTA with backtracking (an accelerated step
/// that would increase the objective is replaced by a plain proximal-gradient
/// step, which backtracking makes a descent step); nonsmooth losses run
/// proximal subgradient with steps `α₀/√(j+1)` and keep the best iterate.
/// Hitting `max_iter` returns the best iterate with `converged = false`.
pub fn solve_primal(prob: &ErmProblem, tol: f64, max_iter: usize) -> Result<Solution> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be > 0, got {tol}")));
    }
    let u0 = SeqVector::zeros(prob.dict().len(), prob.dict().r())?;
    let (u, iterations, converged, kkt_residual, dual_coeffs) = if prob.loss().is_smooth() {
        solve_smooth(prob, u0, tol, max_iter)?
    } else {
        solve_subgrad(prob, u0, tol, max_iter)?
    };
    let objective = prob.objective(&u)?;
    let duality_gap = match dual_objective(prob, &dual_coeffs) {
        Ok(d) if d.is_finite() => Some(objective + d),
        _ => None,
    };
    Ok(Solution { u, objective, kkt_residual, dual_coeffs, duality_gap, iterations, converged })
}

type SolveState = (SeqVector, usize, bool, f64, Vec<f64>);

fn solve_smooth(prob: &ErmProblem, u0: SeqVector, tol: f64, max_iter: usize) -> Result<SolveState> {
    let r = u0.r();
    let mut u = u0;
    let mut f_u = prob.objective(&u)?;
    let mut v = u.clone();
    let mut t = 1.0_f64;
    let mut lip = 1.0_f64;
    let mut iterations = 0;
    let (mut best_res, mut best_w) = prob.certificate(&u)?;
    let mut best_u = u.clone();
    let mut since_best = 0usize;
    if best_res <= tol {
        return Ok((best_u, iterations, true, best_res, best_w));
    }
    while iterations < max_iter {
        iterations += 1;
        let (cand, l_used) = backtracked_step(prob, &v, lip)?;
        lip = l_used;
        let f_cand = prob.objective(&cand)?;
        let accepted = if f_cand <= f_u + 1e-12 * (1.0 + f_u.abs()) {
            cand
        } else {
            // restart momentum and take a guaranteed-descent step from u
            t = 1.0;
            let (plain, l2) = backtracked_step(prob, &u, lip)?;
            lip = l2;
            plain
        };
        let f_accepted = prob.objective(&accepted)?;
        let u_prev = std::mem::replace(&mut u, accepted);
        f_u = f_accepted;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let factor = (t - 1.0) / t_next;
        let coeffs: Vec<f64> = u
            .coeffs()
            .iter()
            .zip(u_prev.coeffs())
            .map(|(&a, &b)| a + factor * (a - b))
            .collect();
        v = SeqVector::new(coeffs, r)?;
        t = t_next;
        lip = (lip * 0.9).max(1e-12);
        if iterations % 5 == 0 || iterations == max_iter {
            let (res, w) = prob.certificate(&u)?;
            if res < best_res {
                best_res = res;
                best_u = u.clone();
                best_w = w;
                since_best = 0;
            } else {
                since_best += 1;
            }
            if best_res <= tol {
                return Ok((best_u, iterations, true, best_res, best_w));
            }
            // 200 consecutive non-improving certificates: the accelerated
            // iterates are cycling within a few ulps of the optimum, where
            // objective comparisons can no longer steer
            if since_best >= 200 {
                break;
            }
        }
    }
    // Fixed-step proximal polishing from the best iterate. Without the
    // momentum and step-size decay the update is a contraction, so instead
    // of oscillating the residual decays to its numerical floor.
    u = best_u.clone();
    since_best = 0;
    while iterations < max_iter && since_best < 500 {
        iterations += 1;
        let (stepped, l2) = backtracked_step(prob, &u, lip)?;
        lip = l2;
        u = stepped;
        let (res, w) = prob.certificate(&u)?;
        if res < best_res {
            best_res = res;
            best_u = u.clone();
            best_w = w;
            since_best = 0;
            if best_res <= tol {
                return Ok((best_u, iterations, true, best_res, best_w));
            }
        } else {
            since_best += 1;
        }
    }
    Ok((best_u, iterations, best_res <= tol, best_res, best_w))
}

/// One proximal-gradient step from `z` with backtracking on the descent
/// lemma `risk(u⁺) ≤ risk(z) + ⟨∇, u⁺−z⟩ + (L/2)‖u⁺−z‖²`.
fn backtracked_step(prob: &ErmProblem, z: &SeqVector, l_start: f64) -> Result<(SeqVector, f64)> {
    let preds = prob.predictions(z)?;
    let n = prob.n() as f64;
    let risk_z: f64 =
        preds.iter().zip(prob.ys()).map(|(&w, &y)| prob.loss().value(y, w)).sum::<f64>() / n;
    let grad = prob.risk_grad(&preds);
    let mut l = l_start.max(1e-12);
    loop {
        let target: Vec<f64> = z.coeffs().iter().zip(&grad).map(|(&zk, &gk)| zk - gk / l).collect();
        let stepped = prob.reg().prox(&target, prob.lambda() / l)?;
        let cand = SeqVector::new(stepped, z.r())?;
        let diff: Vec<f64> = cand.coeffs().iter().zip(z.coeffs()).map(|(&a, &b)| a - b).collect();
        let lin: f64 = grad.iter().zip(&diff).map(|(&g, &d)| g * d).sum();
        let sq: f64 = diff.iter().map(|d| d * d).sum();
        let model = risk_z + lin + 0.5 * l * sq;
        let risk_cand = prob.empirical_risk(&cand)?;
        if risk_cand <= model + 1e-15 * (1.0 + model.abs()) {
            return Ok((cand, l));
        }
        l *= 2.0;
        if l > 1e18 {
            return Err(Error::NonConverged { iterations: 0, residual: risk_cand - model });
        }
    }
}

fn solve_subgrad(prob: &ErmProblem, u0: SeqVector, tol: f64, max_iter: usize) -> Result<SolveState> {
    let r = u0.r();
    // scale α₀ by the subgradient bound lip·max‖Λ_i‖₂
    let feat_norm = prob
        .features()
        .iter()
        .map(|f| norm_with(f.coeffs(), 2.0))
        .fold(0.0_f64, f64::max);
    let lip = prob.loss().lipschitz(1.0).unwrap_or(1.0);
    let alpha0 = 1.0 / (1.0 + lip * feat_norm);
    // λG strongly convex (r = 2, η_min > 0) admits the O(1/j) schedule
    let strong = if prob.reg().r() == 2.0 { 2.0 * prob.lambda() * prob.reg().eta_min() } else { 0.0 };
    let mut u = u0;
    let mut best = u.clone();
    let mut f_best = prob.objective(&best)?;
    let mut iterations = 0;
    for j in 0..max_iter {
        iterations = j + 1;
        let preds = prob.predictions(&u)?;
        let g = prob.risk_subgrad(&preds);
        let alpha = if strong > 0.0 {
            (1.0 / (strong * (j + 1) as f64)).min(alpha0)
        } else {
            alpha0 / ((j + 1) as f64).sqrt()
        };
        let target: Vec<f64> = u.coeffs().iter().zip(&g).map(|(&uk, &gk)| uk - alpha * gk).collect();
        u = SeqVector::new(prob.reg().prox(&target, alpha * prob.lambda())?, r)?;
        let f = prob.objective(&u)?;
        if f < f_best {
            f_best = f;
            best = u.clone();
        }
        if iterations % 25 == 0 {
            let (res, w) = prob.certificate(&best)?;
            if res <= tol {
                return Ok((best, iterations, true, res, w));
            }
        }
    }
    let (res, w) = prob.certificate(&best)?;
    Ok((best, iterations, res <= tol, res, w))
}

/// Dual objective `λ G*((1/λ) Σ_i Λ(x_i) w*_i) + (1/n) Σ_i ℓ*(y_i, −n w*_i)`;
/// the convention makes `gap(u, w*) = primal(u) + dual(w*) ≥ 0` with equality
/// at the saddle point. Infeasible `w*` yields `+∞`; NaN is refused with the
/// offending index.
pub fn dual_objective(prob: &ErmProblem, w_star: &[f64]) -> Result<f64> {
    if w_star.len() != prob.n() {
        return Err(Error::dim(prob.n(), w_star.len()));
    }
    let mut z = vec![0.0; prob.dict().len()];
    for (i, f) in prob.features().iter().enumerate() {
        for (zk, &fk) in z.iter_mut().zip(f.coeffs()) {
            *zk += w_star[i] * fk / prob.lambda();
        }
    }
    let g_star = prob.reg().conjugate(&z)?;
    let n = prob.n() as f64;
    let mut loss_part = 0.0;
    for (i, (&w, &y)) in w_star.iter().zip(prob.ys()).enumerate() {
        let v = prob.loss().conjugate(y, -n * w)?;
        if v.is_nan() {
            return Err(Error::invalid(format!("loss conjugate is NaN at sample {i}")));
        }
        loss_part += v;
    }
    Ok(prob.lambda() * g_star + loss_part / n)
}

/// Primal point from dual coefficients: `u = ∇G*((1/λ) Σ_i Λ(x_i) w*_i)`.
pub fn recover_from_dual(prob: &ErmProblem, w_star: &[f64]) -> Result<SeqVector> {
    if w_star.len() != prob.n() {
        return Err(Error::dim(prob.n(), w_star.len()));
    }
    let mut z = vec![0.0; prob.dict().len()];
    for (i, f) in prob.features().iter().enumerate() {
        for (zk, &fk) in z.iter_mut().zip(f.coeffs()) {
            *zk += w_star[i] * fk / prob.lambda();
        }
    }
    SeqVector::new(prob.reg().conjugate_argmax(&z)?, prob.dict().r())
}

#[derive(Debug, Clone)]
pub struct SensitivityReport {
    /// `ψ̂_lo` evaluated at `‖u_B − u_A‖`.
    pub lhs: f64,
    /// `(‖mean shift of Λh‖_{r*} + ε_A + ε_B)/λ`.
    pub rhs: f64,
    pub distance: f64,
    pub mean_shift: f64,
    pub eps_a: f64,
    pub eps_b: f64,
    pub ok: bool,
}

/// Two-sample sensitivity inequality: with `h` the (fixed, minimal-absolute)
/// subgradient selection at `sol_a`, the distance between solutions is
/// controlled by how much the empirical mean of `Λ(x)·h(x,y)` moves between
/// the two samples, inflated by the optimization accuracies ε and divided
/// by λ. The left side weakens the modulus hat `ψ̂` to its lower bound.
pub fn sensitivity_check(
    prob_a: &ErmProblem,
    prob_b: &ErmProblem,
    sol_a: &Solution,
    sol_b: &Solution,
    mb: &ModulusBound,
) -> Result<SensitivityReport> {
    if prob_a.lambda() != prob_b.lambda() {
        return Err(Error::invalid("sensitivity check needs a shared lambda"));
    }
    if prob_a.dict().len() != prob_b.dict().len() {
        return Err(Error::dim(prob_a.dict().len(), prob_b.dict().len()));
    }
    let norm_a = sol_a.u.norm();
    if norm_a > mb.rho + 1e-12 {
        return Err(Error::invalid(format!(
            "modulus ball radius {} does not contain the base solution (norm {norm_a})",
            mb.rho
        )));
    }
    let mean_of = |prob: &ErmProblem| -> Result<Vec<f64>> {
        // h_λ(x, y) evaluated with the *base* solution's predictor
        let mut m = vec![0.0; prob.dict().len()];
        let n = prob.n() as f64;
        for (&x, &y) in prob.xs().iter().zip(prob.ys()) {
            let w = prob_a.dict().apply(&sol_a.u, x)?;
            let h = prob_a.loss().min_abs_subgrad(y, w);
            let f = prob_a.dict().feature_map(x);
            for (mk, &fk) in m.iter_mut().zip(f.coeffs()) {
                *mk += h * fk / n;
            }
        }
        Ok(m)
    };
    let ma = mean_of(prob_a)?;
    let mb_mean = mean_of(prob_b)?;
    let shift: Vec<f64> = ma.iter().zip(&mb_mean).map(|(a, b)| a - b).collect();
    let mean_shift = norm_with(&shift, prob_a.dict().r_star());
    let eps_a = sol_a.duality_gap.unwrap_or(0.0).max(0.0);
    let eps_b = sol_b.duality_gap.unwrap_or(0.0).max(0.0);
    let rhs = (mean_shift + eps_a + eps_b) / prob_a.lambda();
    let distance = sol_b.u.sub(&sol_a.u)?.norm();
    let lhs = if distance == 0.0 { 0.0 } else { mb.lower_bound(distance) / distance };
    Ok(SensitivityReport {
        lhs,
        rhs,
        distance,
        mean_shift,
        eps_a,
        eps_b,
        ok: lhs <= rhs + 1e-9,
    })
}

/// Closed-form ridge solution (power p = 2 loss, pure `Σ η_k μ_k²`
/// regularizer, r = 2) via the normal equations
/// `[(1/n) Σ Λ_i Λ_iᵀ + λ diag(η)] u = (1/n) Σ y_i Λ_i`.
pub fn ridge_exact(prob: &ErmProblem) -> Result<SeqVector> {
    use crate::loss::LossKind;
    use crate::penalty::AtomKind;
    if prob.loss().kind() != (LossKind::Power { p: 2.0 }) || prob.dict().r() != 2.0 {
        return Err(Error::invalid("ridge closed form needs power p=2 loss and r=2"));
    }
    if prob.reg().atoms().iter().any(|a| a.kind() != AtomKind::Zero) {
        return Err(Error::invalid("ridge closed form needs a pure power regularizer"));
    }
    let k = prob.dict().len();
    let n = prob.n() as f64;
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for (f, &y) in prob.features().iter().zip(prob.ys()) {
        let c = f.coeffs();
        for i in 0..k {
            for j in 0..k {
                a[i][j] += c[i] * c[j] / n;
            }
            b[i] += y * c[i] / n;
        }
    }
    for (i, atom) in prob.reg().atoms().iter().enumerate() {
        a[i][i] += prob.lambda() * atom.eta();
    }
    SeqVector::new(gauss_solve(a, b)?, 2.0)
}

/// Dense Gaussian elimination with partial pivoting.
pub(crate) fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::dim(n, a.len()));
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::invalid("singular linear system"));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[row][j] -= f * a[col][j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dict::Family;
    use crate::loss::LossKind;
    use crate::penalty::{Atom, AtomKind};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn scalar_ridge(lambda: f64, eta: f64, y: f64) -> ErmProblem {
        let dict = Dictionary::new(Family::Monomial, 1, 2.0).unwrap();
        let reg = Regularizer::power(1, eta, 2.0).unwrap();
        let loss = Loss::power(2.0, y.abs().max(1.0)).unwrap();
        ErmProblem::new(dict, reg, loss, vec![0.3], vec![y], lambda).unwrap()
    }

    #[test]
    fn scalar_ridge_closed_form() {
        // minimize (y−μ)² + λημ²  ⇒  μ = y/(1+λη)
        let prob = scalar_ridge(1.0, 1.0, 1.0);
        let sol = solve_primal(&prob, 1e-11, 20_000).unwrap();
        assert!(sol.converged);
        assert_abs_diff_eq!(sol.u.coeffs()[0], 0.5, epsilon = 1e-8);
        assert!(sol.kkt_residual <= 1e-11);
        let exact = ridge_exact(&prob).unwrap();
        assert_abs_diff_eq!(exact.coeffs()[0], 0.5, epsilon = 1e-13);
    }

    #[test]
    fn huge_lambda_kills_the_solution() {
        let prob = scalar_ridge(1e6, 1.0, 1.0);
        let sol = solve_primal(&prob, 1e-10, 20_000).unwrap();
        assert!(sol.u.norm() < 1e-4);
    }

    #[test]
    fn scalar_elastic_net_closed_form() {
        // minimize (1−μ)² + λ(ημ² + w|μ|), λ=1, η=0.5, w=1 ⇒ μ = 1/3
        let dict = Dictionary::new(Family::Monomial, 1, 2.0).unwrap();
        let reg = Regularizer::elastic_net(1, 0.5, 1.0, 2.0).unwrap();
        let loss = Loss::power(2.0, 1.0).unwrap();
        let prob = ErmProblem::new(dict, reg, loss, vec![0.7], vec![1.0], 1.0).unwrap();
        let sol = solve_primal(&prob, 1e-11, 20_000).unwrap();
        assert!(sol.converged);
        assert_abs_diff_eq!(sol.u.coeffs()[0], 1.0 / 3.0, epsilon = 1e-8);
    }

    #[test]
    fn multi_atom_ridge_matches_exact() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for trial in 0..10 {
            let k = 1 + trial % 3;
            let n = 5 + trial;
            let dict = Dictionary::new(Family::Monomial, k, 2.0).unwrap();
            let reg = Regularizer::power(k, 0.8, 2.0).unwrap();
            let loss = Loss::power(2.0, 3.0).unwrap();
            let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect();
            let prob = ErmProblem::new(dict, reg, loss, xs, ys, 0.05).unwrap();
            let sol = solve_primal(&prob, 1e-11, 50_000).unwrap();
            let exact = ridge_exact(&prob).unwrap();
            assert!(sol.converged, "trial {trial}");
            for (a, b) in sol.u.coeffs().iter().zip(exact.coeffs()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-7);
            }
            assert!(sol.duality_gap.unwrap() >= -1e-8);
            assert!(sol.duality_gap.unwrap() <= 1e-6);
        }
    }

    #[test]
    fn weak_duality_for_random_multipliers() {
        let prob = scalar_ridge(0.7, 1.3, 1.5);
        let primal_at_zero = prob.objective(&SeqVector::zeros(1, 2.0).unwrap()).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        for _ in 0..200 {
            let w = vec![rng.gen_range(-2.0..=2.0)];
            let d = dual_objective(&prob, &w).unwrap();
            // gap(u, w*) ≥ 0 for any primal-feasible u
            assert!(primal_at_zero + d >= -1e-10);
        }
        // w* = 0 gives G*(0) + mean of l*(y, 0) = 0 for the square loss
        assert_abs_diff_eq!(dual_objective(&prob, &[0.0]).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dual_recovery_round_trip() {
        let prob = scalar_ridge(1.0, 1.0, 1.0);
        let sol = solve_primal(&prob, 1e-12, 50_000).unwrap();
        let gap = sol.objective + dual_objective(&prob, &sol.dual_coeffs).unwrap();
        assert!(gap.abs() <= 1e-8, "gap {gap}");
        let rec = recover_from_dual(&prob, &sol.dual_coeffs).unwrap();
        assert_abs_diff_eq!(rec.coeffs()[0], sol.u.coeffs()[0], epsilon = 1e-6);
        // w* = 0 recovers the zero vector
        let zero = recover_from_dual(&prob, &[0.0]).unwrap();
        assert_eq!(zero.coeffs(), &[0.0]);
        // eta = 0 coordinates make G* nondifferentiable
        let dict = Dictionary::new(Family::Monomial, 1, 2.0).unwrap();
        let reg = Regularizer::new(vec![Atom::new(AtomKind::Abs { weight: 1.0 }, 0.0, 2.0).unwrap()]).unwrap();
        let lasso = ErmProblem::new(dict, reg, Loss::power(2.0, 1.0).unwrap(), vec![0.5], vec![1.0], 0.1).unwrap();
        assert!(recover_from_dual(&lasso, &[0.2]).is_err());
    }

    #[test]
    fn hinge_instance_reaches_known_minimum() {
        // minimize max(0, 1−μ) + 0.25μ² over the constant dictionary:
        // minimizer μ = 1 with value 0.25
        let dict = Dictionary::new(Family::Monomial, 1, 2.0).unwrap();
        let reg = Regularizer::power(1, 1.0, 2.0).unwrap();
        let prob = ErmProblem::new(dict, reg, Loss::hinge(), vec![0.2, 0.9], vec![1.0, 1.0], 0.25).unwrap();
        let sol = solve_primal(&prob, 1e-6, 60_000).unwrap();
        assert!(sol.objective <= 0.25 + 1e-4);
        assert_abs_diff_eq!(sol.u.coeffs()[0], 1.0, epsilon = 1e-2);
        assert!(sol.duality_gap.is_none());
        // the optimized selection certifies stationarity at the kink
        let (res, _) = prob.certificate(&SeqVector::new(vec![1.0], 2.0).unwrap()).unwrap();
        assert!(res <= 1e-9, "residual {res}");
    }

    #[test]
    fn absolute_loss_instance() {
        // minimize |1−μ| + 0.5μ²: stationarity 0 ∈ −sign(1−μ) + μ ⇒ μ = 1? no:
        // at μ<1: −1 + μ = 0 ⇒ μ = 1 boundary; at μ=1 interval [−1,1]+1 ∋ 0… μ* = 1
        let dict = Dictionary::new(Family::Monomial, 1, 2.0).unwrap();
        let reg = Regularizer::power(1, 0.5, 2.0).unwrap();
        let loss = Loss::power(1.0, 1.0).unwrap();
        let prob = ErmProblem::new(dict, reg, loss, vec![0.4], vec![1.0], 1.0).unwrap();
        let sol = solve_primal(&prob, 1e-6, 60_000).unwrap();
        assert_abs_diff_eq!(sol.u.coeffs()[0], 1.0, epsilon = 1e-2);
        // p = 1 keeps the dual feasible, so the gap is computed
        let gap = sol.duality_gap.expect("p=1 conjugate exists");
        assert!(gap >= -1e-8 && gap <= 1e-2, "gap {gap}");
    }

    #[test]
    fn iteration_cap_flags_nonconvergence() {
        let prob = scalar_ridge(0.001, 1.0, 1.0);
        let sol = solve_primal(&prob, 1e-14, 1).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 1);
    }

    #[test]
    fn objective_monotone_along_solve() {
        // replicate the monotone contract by re-running with increasing caps
        let prob = scalar_ridge(0.3, 0.7, 1.2);
        let mut last = f64::INFINITY;
        for cap in [1, 2, 5, 10, 20, 50] {
            let sol = solve_primal(&prob, 1e-15, cap).unwrap();
            assert!(sol.objective <= last + 1e-12);
            last = sol.objective;
        }
    }

    #[test]
    fn sensitivity_identical_and_loo() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let xs: Vec<f64> = (0..50).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (2.0 * std::f64::consts::PI * x).sin() + rng.gen_range(-0.2..=0.2)).collect();
        let mk = |xs: Vec<f64>, ys: Vec<f64>, lambda: f64| {
            ErmProblem::new(
                Dictionary::new(Family::Trig { decay: 1.0 }, 5, 2.0).unwrap(),
                Regularizer::power(5, 1.0, 2.0).unwrap(),
                Loss::power(2.0, 2.0).unwrap(),
                xs,
                ys,
                lambda,
            )
            .unwrap()
        };
        let prob = mk(xs.clone(), ys.clone(), 0.1);
        let sol = solve_primal(&prob, 1e-10, 50_000).unwrap();
        let mb = ModulusBound::for_lr(1.0, 2.0, sol.u.norm() + 1.0).unwrap();
        let same = sensitivity_check(&prob, &prob, &sol, &sol, &mb).unwrap();
        assert_eq!(same.lhs, 0.0);
        assert!(same.ok);

        let prob_loo = mk(xs[1..].to_vec(), ys[1..].to_vec(), 0.1);
        let sol_loo = solve_primal(&prob_loo, 1e-10, 50_000).unwrap();
        let rep = sensitivity_check(&prob, &prob_loo, &sol, &sol_loo, &mb).unwrap();
        assert!(rep.ok, "lhs {} rhs {}", rep.lhs, rep.rhs);

        // larger λ shrinks the right-hand side on the same pair
        let prob_hi = mk(xs.clone(), ys.clone(), 1.0);
        let sol_hi = solve_primal(&prob_hi, 1e-10, 50_000).unwrap();
        let prob_hi_loo = mk(xs[1..].to_vec(), ys[1..].to_vec(), 1.0);
        let sol_hi_loo = solve_primal(&prob_hi_loo, 1e-10, 50_000).unwrap();
        let mb_hi = ModulusBound::for_lr(1.0, 2.0, sol_hi.u.norm() + 1.0).unwrap();
        let rep_hi = sensitivity_check(&prob_hi, &prob_hi_loo, &sol_hi, &sol_hi_loo, &mb_hi).unwrap();
        assert!(rep_hi.rhs <= rep.rhs);
        // mismatched λ is refused
        assert!(sensitivity_check(&prob, &prob_hi, &sol, &sol_hi, &mb).is_err());
    }

    #[test]
    fn gauss_solve_hand_system() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = gauss_solve(a, vec![3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(x[0], 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], 1.4, epsilon = 1e-12);
        assert!(gauss_solve(vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn logistic_smooth_path() {
        let dict = Dictionary::new(Family::Monomial, 2, 2.0).unwrap();
        let reg = Regularizer::power(2, 0.5, 2.0).unwrap();
        let prob = ErmProblem::new(
            dict,
            reg,
            Loss::logistic(),
            vec![0.1, 0.4, 0.6, 0.9],
            vec![-1.0, -1.0, 1.0, 1.0],
            0.05,
        )
        .unwrap();
        let sol = solve_primal(&prob, 1e-9, 50_000).unwrap();
        assert!(sol.converged);
        assert!(sol.kkt_residual <= 1e-9);
        assert!(sol.duality_gap.is_none());
    }

    #[test]
    fn power_p_loss_kind_checks() {
        assert!(matches!(
            Loss::power(2.0, 1.0).unwrap().kind(),
            LossKind::Power { p } if p == 2.0
        ));
    }
}
