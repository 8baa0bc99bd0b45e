//! Scalar convex losses `ℓ(y, w)`: power `|y−w|^p`, hinge, and logistic.
//! Subdifferentials are returned as closed intervals so membership tests can
//! use the full set; Lipschitz constants follow the bounded-output calculus
//! `|ℓ|_ρ ≤ p(ρ+β)^{p−1}` with `β = sup|y|`.

use crate::seq::signed_power;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    Power { p: f64 },
    Hinge,
    Logistic,
}

#[derive(Debug, Clone, Copy)]
pub struct Loss {
    kind: LossKind,
    y_bound: Option<f64>,
}

impl Loss {
    pub fn new(kind: LossKind, y_bound: Option<f64>) -> Result<Self> {
        if let LossKind::Power { p } = kind {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(Error::invalid(format!("power loss exponent must satisfy p >= 1, got {p}")));
            }
        }
        if let Some(b) = y_bound {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::invalid(format!("y_bound must be finite and > 0, got {b}")));
            }
        }
        Ok(Self { kind, y_bound })
    }

    pub fn power(p: f64, y_bound: f64) -> Result<Self> {
        Self::new(LossKind::Power { p }, Some(y_bound))
    }

    /// Margin losses default to labels in [−1, 1].
    pub fn hinge() -> Self {
        Self { kind: LossKind::Hinge, y_bound: Some(1.0) }
    }

    pub fn logistic() -> Self {
        Self { kind: LossKind::Logistic, y_bound: Some(1.0) }
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn y_bound(&self) -> Option<f64> {
        self.y_bound
    }

    /// Growth exponent p (1 for hinge and logistic).
    pub fn p(&self) -> f64 {
        match self.kind {
            LossKind::Power { p } => p,
            LossKind::Hinge | LossKind::Logistic => 1.0,
        }
    }

    pub fn value(&self, y: f64, w: f64) -> f64 {
        match self.kind {
            LossKind::Power { p } => (y - w).abs().powf(p),
            LossKind::Hinge => (1.0 - y * w).max(0.0),
            LossKind::Logistic => softplus(-y * w),
        }
    }

    /// `∂_w ℓ(y, w)` as a closed interval (singleton when differentiable).
    pub fn subgrad(&self, y: f64, w: f64) -> (f64, f64) {
        match self.kind {
            LossKind::Power { p } => {
                if p == 1.0 && w == y {
                    (-1.0, 1.0)
                } else {
                    let d = p * signed_power(w - y, p - 1.0);
                    (d, d)
                }
            }
            LossKind::Hinge => {
                let margin = y * w;
                if margin > 1.0 {
                    (0.0, 0.0)
                } else if margin < 1.0 {
                    (-y, -y)
                } else if y >= 0.0 {
                    (-y, 0.0)
                } else {
                    (0.0, -y)
                }
            }
            LossKind::Logistic => {
                let d = -y / (1.0 + (y * w).exp());
                (d, d)
            }
        }
    }

    /// The subgradient selection of minimal absolute value.
    pub fn min_abs_subgrad(&self, y: f64, w: f64) -> f64 {
        let (lo, hi) = self.subgrad(y, w);
        if lo <= 0.0 && 0.0 <= hi {
            0.0
        } else if lo.abs() <= hi.abs() {
            lo
        } else {
            hi
        }
    }

    /// Derivative where it exists; callers on the accelerated path must have
    /// checked [`Self::is_smooth`] first.
    pub fn grad(&self, y: f64, w: f64) -> f64 {
        let (lo, hi) = self.subgrad(y, w);
        debug_assert_eq!(lo, hi, "grad called at a kink");
        lo
    }

    /// Differentiable with locally Lipschitz gradient (power p ≥ 2, logistic).
    pub fn is_smooth(&self) -> bool {
        match self.kind {
            LossKind::Power { p } => p >= 2.0,
            LossKind::Logistic => true,
            LossKind::Hinge => false,
        }
    }

    /// Lipschitz constant of `w ↦ ℓ(y, w)` over `|w| ≤ ρ`, `|y| ≤ β`.
    pub fn lipschitz(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::invalid(format!("lipschitz radius must be > 0, got {rho}")));
        }
        match self.kind {
            LossKind::Power { p } => {
                if p == 1.0 {
                    Ok(1.0)
                } else {
                    let beta = self.need_y_bound()?;
                    Ok(p * (rho + beta).powf(p - 1.0))
                }
            }
            // subgradients are bounded by |y|
            LossKind::Hinge | LossKind::Logistic => self.need_y_bound(),
        }
    }

    /// `ℓ*(y, s) = sup_w { sw − ℓ(y, w) }`, available for power losses:
    /// `sy + (p−1)(|s|/p)^{p/(p−1)}` for p > 1, and `sy` on `|s| ≤ 1`
    /// (+∞ outside) for p = 1.
    pub fn conjugate(&self, y: f64, s: f64) -> Result<f64> {
        match self.kind {
            LossKind::Power { p } => {
                if p == 1.0 {
                    Ok(if s.abs() <= 1.0 { s * y } else { f64::INFINITY })
                } else {
                    Ok(s * y + (p - 1.0) * (s.abs() / p).powf(p / (p - 1.0)))
                }
            }
            LossKind::Hinge | LossKind::Logistic => Err(Error::invalid(
                "loss conjugate implemented for power losses only",
            )),
        }
    }

    /// `sup_{|y| ≤ β} ℓ(y, 0)`: β^p, 1, and ln 2 respectively.
    pub fn max_value_at_zero(&self) -> Result<f64> {
        match self.kind {
            LossKind::Power { p } => Ok(self.need_y_bound()?.powf(p)),
            LossKind::Hinge => Ok(1.0),
            LossKind::Logistic => Ok(2.0_f64.ln()),
        }
    }

    fn need_y_bound(&self) -> Result<f64> {
        self.y_bound
            .ok_or_else(|| Error::invalid("this bound needs y_bound (sup |y|) on the loss"))
    }
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}
