//! Reproducing kernel of the Sobolev space W^{1,p}_0([0,1]):
//! `K_p(x, x') = (1−x)x'/D(x)` for `x' ≤ x` and `(1−x')x/D(x)` for
//! `x' ≥ x`, with `D(x) = (x^{p−1} + (1−x)^{p−1})^{1/(p−1)}`. The section
//! `K_p(x, ·)` is the piecewise-linear p-Laplacian Green element: the flux
//! `|u'|^{p−2}u'` jumps by exactly 1 at x, which makes the reproducing
//! pairing `∫ |g'|^{p−2}g' f' = f(x)` an exact piecewise computation.

use crate::seq::signed_power;
use crate::{Error, Result};

/// Continuous piecewise-linear function on [0,1] given by its breakpoints.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::dim(xs.len(), ys.len()));
        }
        if xs.len() < 2 {
            return Err(Error::invalid("piecewise-linear function needs at least two breakpoints"));
        }
        if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
            return Err(Error::invalid("breakpoints must start at 0 and end at 1"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::invalid("breakpoint values must be finite"));
        }
        Ok(Self { xs, ys })
    }

    /// Tent of height 1 peaking at `c ∈ (0,1)`.
    pub fn hat(c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::invalid(format!("hat peak must be interior, got {c}")));
        }
        Self::new(vec![0.0, c, 1.0], vec![0.0, 1.0, 0.0])
    }

    pub fn breakpoints(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.ys[0];
        }
        if x >= 1.0 {
            return *self.ys.last().unwrap();
        }
        let i = self.xs.partition_point(|&t| t <= x) - 1;
        let (a, b) = (self.xs[i], self.xs[i + 1]);
        let t = (x - a) / (b - a);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
    }

    pub fn vanishes_at_boundary(&self) -> bool {
        self.ys[0] == 0.0 && *self.ys.last().unwrap() == 0.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PKernel {
    p: f64,
}

impl PKernel {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::invalid(format!("Sobolev exponent must lie in (1, inf), got {p}")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn interior(x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::invalid(format!(
                "evaluation point must be interior (0 < x < 1), got {x}"
            )));
        }
        Ok(x)
    }

    /// `D(x) = (x^{p−1} + (1−x)^{p−1})^{1/(p−1)}`.
    pub fn denom(&self, x: f64) -> Result<f64> {
        let x = Self::interior(x)?;
        let e = self.p - 1.0;
        Ok((x.powf(e) + (1.0 - x).powf(e)).powf(1.0 / e))
    }

    pub fn value(&self, x: f64, x2: f64) -> Result<f64> {
        let x = Self::interior(x)?;
        if !(0.0..=1.0).contains(&x2) {
            return Err(Error::invalid(format!("second argument must lie in [0,1], got {x2}")));
        }
        let d = self.denom(x)?;
        Ok(if x2 <= x { (1.0 - x) * x2 / d } else { (1.0 - x2) * x / d })
    }

    /// `K_p(x, x) = x(1−x)/D(x)`.
    pub fn diag(&self, x: f64) -> Result<f64> {
        let x = Self::interior(x)?;
        Ok(x * (1.0 - x) / self.denom(x)?)
    }

    /// The section `K_p(x, ·)` as an exact piecewise-linear object.
    pub fn section(&self, x: f64) -> Result<PiecewiseLinear> {
        let x = Self::interior(x)?;
        PiecewiseLinear::new(vec![0.0, x, 1.0], vec![0.0, self.diag(x)?, 0.0])
    }

    /// Jump of the flux `|u'|^{p−2}u'` of `u = K_p(x,·)` across x:
    /// `|s₋|^{p−2}s₋ − |s₊|^{p−2}s₊` with slopes `s₋ = (1−x)/D`,
    /// `s₊ = −x/D`. Identically 1 — the kernel's normalization.
    pub fn flux_jump(&self, x: f64) -> Result<f64> {
        let x = Self::interior(x)?;
        let d = self.denom(x)?;
        let s_minus = (1.0 - x) / d;
        let s_plus = -x / d;
        Ok(signed_power(s_minus, self.p - 1.0) - signed_power(s_plus, self.p - 1.0))
    }

    /// Residual `|∫₀¹ |g'|^{p−2}g' f' − f(x)|` for `g = K_p(x,·)`:
    /// the integrand is piecewise constant times piecewise constant, summed
    /// segment by segment (splitting f's segments at x), so the only error
    /// is floating-point rounding.
    pub fn reproducing_check(&self, f: &PiecewiseLinear, x: f64) -> Result<f64> {
        let x = Self::interior(x)?;
        if !f.vanishes_at_boundary() {
            return Err(Error::invalid("test function must vanish at 0 and 1"));
        }
        let d = self.denom(x)?;
        let flux_left = ((1.0 - x) / d).powf(self.p - 1.0);
        let flux_right = -(x / d).powf(self.p - 1.0);
        let (xs, ys) = f.breakpoints();
        let mut integral = 0.0;
        for i in 0..xs.len() - 1 {
            let (a, b) = (xs[i], xs[i + 1]);
            let slope = (ys[i + 1] - ys[i]) / (b - a);
            if b <= x {
                integral += flux_left * slope * (b - a);
            } else if a >= x {
                integral += flux_right * slope * (b - a);
            } else {
                integral += flux_left * slope * (x - a);
                integral += flux_right * slope * (b - x);
            }
        }
        Ok((integral - f.eval(x)).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn interior_grid(n: usize) -> impl Iterator<Item = f64> {
        (1..n).map(move |i| i as f64 / n as f64)
    }

    #[test]
    fn hand_values() {
        let k2 = PKernel::new(2.0).unwrap();
        assert_abs_diff_eq!(k2.value(0.5, 0.25).unwrap(), 0.125, epsilon = 1e-15);
        for p in [1.5, 2.0, 3.0, 5.0] {
            let k = PKernel::new(p).unwrap();
            assert_eq!(k.value(0.3, 0.0).unwrap(), 0.0);
            assert_eq!(k.value(0.3, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn boundary_center_is_refused() {
        let k = PKernel::new(2.0).unwrap();
        assert!(k.value(0.0, 0.5).is_err());
        assert!(k.value(1.0, 0.5).is_err());
        assert!(k.value(-0.1, 0.5).is_err());
        assert!(k.value(0.5, 1.5).is_err());
        assert!(k.flux_jump(0.0).is_err());
        assert!(PKernel::new(1.0).is_err());
    }

    #[test]
    fn branches_agree_on_the_diagonal() {
        for p in [1.5, 2.0, 3.0, 5.0] {
            let k = PKernel::new(p).unwrap();
            for x in interior_grid(37) {
                let d = k.denom(x).unwrap();
                let left = (1.0 - x) * x / d;
                let right = (1.0 - x) * x / d;
                assert_eq!(left, right);
                assert_abs_diff_eq!(k.value(x, x).unwrap(), k.diag(x).unwrap(), epsilon = 1e-16);
                assert!(k.value(x, x).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn p2_is_the_green_function() {
        let k = PKernel::new(2.0).unwrap();
        for x in interior_grid(33) {
            for i in 0..=32 {
                let x2 = i as f64 / 32.0;
                let oracle = if x2 <= x { x2 * (1.0 - x) } else { x * (1.0 - x2) };
                assert_abs_diff_eq!(k.value(x, x2).unwrap(), oracle, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn flux_jump_is_one() {
        assert_abs_diff_eq!(PKernel::new(2.0).unwrap().flux_jump(0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(PKernel::new(3.0).unwrap().flux_jump(0.5).unwrap(), 1.0, epsilon = 1e-15);
        for p in [1.5, 2.0, 3.0, 5.0] {
            let k = PKernel::new(p).unwrap();
            for x in interior_grid(101) {
                assert_abs_diff_eq!(k.flux_jump(x).unwrap(), 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn reproducing_property() {
        // the kernel section reproduces itself
        let k2 = PKernel::new(2.0).unwrap();
        let g = k2.section(0.4).unwrap();
        assert!(k2.reproducing_check(&g, 0.4).unwrap() <= 1e-15);
        // zero function
        let zero = PiecewiseLinear::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(k2.reproducing_check(&zero, 0.3).unwrap(), 0.0);
        // hat at 0.3 evaluated at 0.7 under p = 2.5
        let k25 = PKernel::new(2.5).unwrap();
        let hat = PiecewiseLinear::hat(0.3).unwrap();
        assert!(k25.reproducing_check(&hat, 0.7).unwrap() <= 1e-10);
        // richer function, several p and x
        let f = PiecewiseLinear::new(
            vec![0.0, 0.2, 0.45, 0.8, 1.0],
            vec![0.0, 0.6, -0.4, 0.9, 0.0],
        )
        .unwrap();
        for p in [1.5, 2.0, 3.0, 5.0] {
            let k = PKernel::new(p).unwrap();
            for x in [0.1, 0.2, 0.37, 0.5, 0.8, 0.93] {
                let res = k.reproducing_check(&f, x).unwrap();
                assert!(res <= 1e-10, "p={p} x={x}: residual {res}");
            }
        }
    }

    #[test]
    fn boundary_violation_is_refused() {
        let k = PKernel::new(2.0).unwrap();
        let bad = PiecewiseLinear::new(vec![0.0, 1.0], vec![0.5, 0.0]).unwrap();
        assert!(k.reproducing_check(&bad, 0.5).is_err());
    }

    #[test]
    fn piecewise_linear_eval() {
        let f = PiecewiseLinear::hat(0.25).unwrap();
        assert_eq!(f.eval(0.25), 1.0);
        assert_abs_diff_eq!(f.eval(0.125), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.eval(0.625), 0.5, epsilon = 1e-15);
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(1.0), 0.0);
        assert!(PiecewiseLinear::new(vec![0.0, 0.5], vec![0.0, 1.0]).is_err());
        assert!(PiecewiseLinear::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.0, 1.0, 1.0, 0.0]).is_err());
    }
}
