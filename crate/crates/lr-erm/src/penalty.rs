//! Separable regularizers `G(u) = Σ_k g_k(μ_k)` with `g_k = h_k + η_k|·|^r`,
//! where `h_k` is a weighted absolute value, a box indicator, or zero.
//! Provides per-coordinate prox and conjugate operators plus lower bounds on
//! the modulus of total convexity and their closed-form quasi-inverses.

use crate::seq::{signed_power, SeqVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomKind {
    /// `h(t) = w|t|`.
    Abs { weight: f64 },
    /// Indicator of `[lo, hi]` with `lo ≤ 0 ≤ hi`.
    Box { lo: f64, hi: f64 },
    /// `h = 0`.
    Zero,
}

/// One coordinate penalty `g(t) = η|t|^r + h(t)`; convex, `g(0) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct Atom {
    kind: AtomKind,
    eta: f64,
    r: f64,
}

impl Atom {
    pub fn new(kind: AtomKind, eta: f64, r: f64) -> Result<Self> {
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::invalid(format!("atom weight eta must be finite and >= 0, got {eta}")));
        }
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::invalid(format!("penalty exponent must lie in (1, inf), got {r}")));
        }
        match kind {
            AtomKind::Abs { weight } => {
                if !(weight >= 0.0) || !weight.is_finite() {
                    return Err(Error::invalid(format!("abs weight must be finite and >= 0, got {weight}")));
                }
            }
            AtomKind::Box { lo, hi } => {
                if !(lo <= 0.0 && 0.0 <= hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::invalid(format!("box [{lo}, {hi}] must be finite and contain 0")));
                }
            }
            AtomKind::Zero => {}
        }
        Ok(Self { kind, eta, r })
    }

    pub fn kind(&self) -> AtomKind {
        self.kind
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `g(t)`; `+∞` outside a box.
    pub fn value(&self, t: f64) -> f64 {
        let smooth = self.eta * t.abs().powf(self.r);
        match self.kind {
            AtomKind::Abs { weight } => smooth + weight * t.abs(),
            AtomKind::Box { lo, hi } => {
                if t < lo || t > hi {
                    f64::INFINITY
                } else {
                    smooth
                }
            }
            AtomKind::Zero => smooth,
        }
    }

    /// `∂g(t)` as a closed interval (ends may be infinite); `None` outside
    /// the domain.
    pub fn subdiff(&self, t: f64) -> Option<(f64, f64)> {
        let d = self.eta * self.r * signed_power(t, self.r - 1.0);
        match self.kind {
            AtomKind::Abs { weight } => Some(if t > 0.0 {
                (d + weight, d + weight)
            } else if t < 0.0 {
                (d - weight, d - weight)
            } else {
                (-weight, weight)
            }),
            AtomKind::Box { lo, hi } => {
                if t < lo || t > hi {
                    None
                } else if lo == hi {
                    Some((f64::NEG_INFINITY, f64::INFINITY))
                } else if t == lo {
                    Some((f64::NEG_INFINITY, d))
                } else if t == hi {
                    Some((d, f64::INFINITY))
                } else {
                    Some((d, d))
                }
            }
            AtomKind::Zero => Some((d, d)),
        }
    }

    /// `argmin_t (t−v)²/(2·step) + g(t)`.
    ///
    /// The minimizer is 0 exactly when `v/step` lies in `∂g(0)`; otherwise its
    /// magnitude solves the strictly increasing equation
    /// `s + step·η·r·s^{r−1} = |v| − step·w`, handled in closed form for r = 2
    /// and by bracketed Newton otherwise. Boxes clamp the unconstrained
    /// minimizer (valid in one dimension by convexity).
    pub fn prox(&self, v: f64, step: f64) -> f64 {
        debug_assert!(step > 0.0);
        let (w, lo, hi) = match self.kind {
            AtomKind::Abs { weight } => (weight, f64::NEG_INFINITY, f64::INFINITY),
            AtomKind::Box { lo, hi } => (0.0, lo, hi),
            AtomKind::Zero => (0.0, f64::NEG_INFINITY, f64::INFINITY),
        };
        let m = v.abs() - step * w;
        let t = if m <= 0.0 {
            0.0
        } else {
            v.signum() * shrink_magnitude(m, step * self.eta * self.r, self.r)
        };
        t.clamp(lo, hi)
    }

    /// `g*(s) = sup_t { st − g(t) }`; may be `+∞` when η = 0 and the
    /// linear term escapes.
    pub fn conjugate(&self, s: f64) -> f64 {
        match self.kind {
            AtomKind::Abs { weight } => {
                let a = (s.abs() - weight).max(0.0);
                power_conjugate(a, self.eta, self.r)
            }
            AtomKind::Zero => power_conjugate(s.abs(), self.eta, self.r),
            AtomKind::Box { lo, hi } => {
                let t = if self.eta == 0.0 {
                    if s >= 0.0 {
                        hi
                    } else {
                        lo
                    }
                } else {
                    let free = s.signum() * (s.abs() / (self.eta * self.r)).powf(1.0 / (self.r - 1.0));
                    free.clamp(lo, hi)
                };
                s * t - self.eta * t.abs().powf(self.r)
            }
        }
    }

    /// The maximizer in `g*(s)`, i.e. `∇g*(s)`. Unique only when η > 0, so
    /// η = 0 is refused.
    pub fn conjugate_argmax(&self, s: f64) -> Result<f64> {
        if self.eta == 0.0 {
            return Err(Error::invalid("dual recovery needs eta > 0 in every coordinate"));
        }
        let free = |a: f64| (a / (self.eta * self.r)).powf(1.0 / (self.r - 1.0));
        Ok(match self.kind {
            AtomKind::Abs { weight } => {
                let a = (s.abs() - weight).max(0.0);
                if a == 0.0 {
                    0.0
                } else {
                    s.signum() * free(a)
                }
            }
            AtomKind::Zero => {
                if s == 0.0 {
                    0.0
                } else {
                    s.signum() * free(s.abs())
                }
            }
            AtomKind::Box { lo, hi } => (s.signum() * free(s.abs())).clamp(lo, hi),
        })
    }
}

/// `sup_{t≥0} at − ηt^r` for `a ≥ 0`.
fn power_conjugate(a: f64, eta: f64, r: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if eta == 0.0 {
        f64::INFINITY
    } else {
        let t = (a / (eta * r)).powf(1.0 / (r - 1.0));
        a * t - eta * t.powf(r)
    }
}

/// Positive root of `s + c·s^{r−1} = m` for `m > 0`, `c ≥ 0`: bracketed
/// Newton (the left-hand side is strictly increasing, with unbounded slope at
/// 0 when r < 2, so iterates stay inside `[lo, hi]` by construction).
fn shrink_magnitude(m: f64, c: f64, r: f64) -> f64 {
    if c == 0.0 {
        return m;
    }
    if r == 2.0 {
        return m / (1.0 + c);
    }
    let (mut lo, mut hi) = (0.0_f64, m);
    let mut s = m / (1.0 + c);
    for _ in 0..200 {
        let f = s + c * s.powf(r - 1.0) - m;
        if f > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let df = 1.0 + c * (r - 1.0) * s.powf(r - 2.0);
        let mut next = s - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= 1e-16 * (1.0 + s.abs()) {
            return next;
        }
        s = next;
    }
    s
}

/// `G(u) = Σ_k g_k(μ_k)`, all atoms sharing one exponent r.
#[derive(Debug, Clone)]
pub struct Regularizer {
    atoms: Vec<Atom>,
    r: f64,
}

impl Regularizer {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let r = atoms.first().ok_or_else(|| Error::invalid("regularizer needs at least one atom"))?.r;
        if atoms.iter().any(|a| a.r != r) {
            return Err(Error::invalid("all atoms must share one exponent r"));
        }
        Ok(Self { atoms, r })
    }

    /// `Σ_k η|μ_k|^r` — every coordinate a plain power.
    pub fn power(len: usize, eta: f64, r: f64) -> Result<Self> {
        Self::new(vec![Atom::new(AtomKind::Zero, eta, r)?; len])
    }

    /// `Σ_k (η|μ_k|^r + w|μ_k|)`.
    pub fn elastic_net(len: usize, eta: f64, weight: f64, r: f64) -> Result<Self> {
        Self::new(vec![Atom::new(AtomKind::Abs { weight }, eta, r)?; len])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn eta_min(&self) -> f64 {
        self.atoms.iter().map(|a| a.eta).fold(f64::INFINITY, f64::min)
    }

    pub fn value(&self, u: &SeqVector) -> Result<f64> {
        self.check(u)?;
        Ok(u.coeffs().iter().zip(&self.atoms).map(|(&t, a)| a.value(t)).sum())
    }

    pub fn prox(&self, v: &[f64], step: f64) -> Result<Vec<f64>> {
        if v.len() != self.atoms.len() {
            return Err(Error::dim(self.atoms.len(), v.len()));
        }
        Ok(v.iter().zip(&self.atoms).map(|(&x, a)| a.prox(x, step)).collect())
    }

    /// `G*(s) = Σ_k g_k*(s_k)`.
    pub fn conjugate(&self, s: &[f64]) -> Result<f64> {
        if s.len() != self.atoms.len() {
            return Err(Error::dim(self.atoms.len(), s.len()));
        }
        Ok(s.iter().zip(&self.atoms).map(|(&x, a)| a.conjugate(x)).sum())
    }

    /// `∇G*(s)` componentwise; needs η > 0 everywhere.
    pub fn conjugate_argmax(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.atoms.len() {
            return Err(Error::dim(self.atoms.len(), s.len()));
        }
        s.iter().zip(&self.atoms).map(|(&x, a)| a.conjugate_argmax(x)).collect()
    }

    /// `max_k dist(ξ_k, ∂g_k(μ_k))`: zero exactly when ξ ∈ ∂G(u).
    pub fn subdiff_residual(&self, u: &SeqVector, xi: &[f64]) -> Result<f64> {
        self.check(u)?;
        if xi.len() != self.atoms.len() {
            return Err(Error::dim(self.atoms.len(), xi.len()));
        }
        let mut worst = 0.0_f64;
        for ((&t, &s), a) in u.coeffs().iter().zip(xi).zip(&self.atoms) {
            let d = match a.subdiff(t) {
                None => f64::INFINITY,
                Some((lo, hi)) => {
                    if s < lo {
                        lo - s
                    } else if s > hi {
                        s - hi
                    } else {
                        0.0
                    }
                }
            };
            worst = worst.max(d);
        }
        Ok(worst)
    }

    fn check(&self, u: &SeqVector) -> Result<()> {
        if u.len() != self.atoms.len() {
            return Err(Error::dim(self.atoms.len(), u.len()));
        }
        if !crate::seq::same_exponent(u.r(), self.r) {
            return Err(Error::invalid(format!(
                "coefficient exponent {} does not match regularizer exponent {}",
                u.r(),
                self.r
            )));
        }
        Ok(())
    }
}

/// Total-convexity constant for `‖·‖^r` on ℓ^r:
/// for r ∈ (1,2]: `(7/32)·r(r−1)(1−(2/3)^{r−1})`; for r > 2 the sharper
/// `K_r = 4(2+√3)·min{1, (r−1)(2−√3), 1−(2/3)^{r/2}}` combined with the
/// Hanner convexity constant `1/(r·2^r)` of power type r, giving `K_r/(r·4^r)`.
pub fn beta_lr(r: f64) -> Result<f64> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::invalid(format!("exponent must lie in (1, inf), got {r}")));
    }
    let two_thirds = 2.0_f64 / 3.0;
    if r <= 2.0 {
        Ok(7.0 / 32.0 * r * (r - 1.0) * (1.0 - two_thirds.powf(r - 1.0)))
    } else {
        let s3 = 3.0_f64.sqrt();
        let kr = 4.0
            * (2.0 + s3)
            * 1.0_f64.min(((r - 1.0) * (2.0 - s3)).min(1.0 - two_thirds.powf(r / 2.0)));
        Ok(kr / (r * 4.0_f64.powf(r)))
    }
}

/// Lower bound `ψ_lo` on the modulus of total convexity of `G = η‖·‖^r + H`
/// over the ball of radius ρ, and the closed-form upper bound on the
/// quasi-inverse of its hat version `ψ̂_ρ`:
///
/// `ψ_ρ(t) ≥ ηβ t^r` if r ≥ q, else `ηβ t^q/(ρ+t)^{q−r}`, with q = max{2, r}.
#[derive(Debug, Clone, Copy)]
pub struct ModulusBound {
    pub eta: f64,
    pub beta: f64,
    pub r: f64,
    pub q: f64,
    pub rho: f64,
}

impl ModulusBound {
    /// Default β for the ℓ^r norm.
    pub fn for_lr(eta: f64, r: f64, rho: f64) -> Result<Self> {
        Self::with_beta(eta, beta_lr(r)?, r, rho)
    }

    pub fn with_beta(eta: f64, beta: f64, r: f64, rho: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::invalid(format!("modulus bound needs eta > 0, got {eta}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::invalid(format!("modulus bound needs beta > 0, got {beta}")));
        }
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::invalid(format!("exponent must lie in (1, inf), got {r}")));
        }
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::invalid(format!("ball radius must be finite and >= 0, got {rho}")));
        }
        Ok(Self { eta, beta, r, q: r.max(2.0), rho })
    }

    pub fn lower_bound(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let c = self.eta * self.beta;
        if self.r >= self.q {
            c * t.powf(self.r)
        } else {
            c * t.powf(self.q) / (self.rho + t).powf(self.q - self.r)
        }
    }

    /// Upper bound on `(ψ̂_ρ)^♮(s)`. For ρ = 0 both regimes collapse to the
    /// exact quasi-inverse `(s/(ηβ))^{1/(r−1)}` of `ηβ t^{r−1}`.
    pub fn quasi_inverse(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let c = self.eta * self.beta;
        if self.r >= self.q || self.rho == 0.0 {
            (s / c).powf(1.0 / (self.r - 1.0))
        } else {
            let base = s / (c * self.rho.powf(self.r - 1.0));
            let grow = base.powf(1.0 / (self.q - 1.0)).max(base.powf(1.0 / (self.r - 1.0)));
            2.0_f64.powf(self.q) * self.rho * grow
        }
    }

    /// Quasi-inverse of [`lower_bound`](Self::lower_bound) itself — the
    /// largest `t` with `ψ_lo(t) ≤ s` — as opposed to
    /// [`quasi_inverse`](Self::quasi_inverse), which inverts `ψ_lo(t)/t`.
    /// Closed form `(s/(ηβ))^{1/r}` whenever the bound is the plain power
    /// `ηβ t^r`; bisection otherwise.
    pub fn lower_bound_inverse(&self, s: f64) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let c = self.eta * self.beta;
        if self.rho == 0.0 || self.r >= self.q {
            return Ok((s / c).powf(1.0 / self.r));
        }
        // ψ_lo(t) ≥ ηβ t^r / 2^{q−r} once t ≥ ρ, so doubling that crossing
        // point brackets the supremum strictly
        let ub = 2.0 * ((s * 2.0_f64.powf(self.q - self.r) / c).powf(1.0 / self.r) + self.rho) + 1.0;
        crate::seq::quasi_inverse(|t| self.lower_bound(t), s, ub)
    }
}
