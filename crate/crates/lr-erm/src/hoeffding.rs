//! Hoeffding-type concentration for bounded i.i.d. sums in ℓ^q (q ∈ (1,2]):
//! the deviation bound
//! `4βT_q/n^{1−1/q} + 2β√(2τ/n) + 4τβ/(3n)`
//! holds with probability at least `1 − e^{−τ}`, and a Monte-Carlo verifier
//! measures the empirical violation rate.

use crate::rng::derive_rng;
use crate::seq::norm_with;
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;

const TAG_TRIAL: u64 = 0x4843; // "HC"

#[derive(Debug, Clone, Copy)]
pub struct ConcentrationSpec {
    pub q: f64,
    pub t_const: f64,
    pub beta: f64,
    pub n: usize,
    pub tau: f64,
}

impl ConcentrationSpec {
    pub fn new(q: f64, t_const: f64, beta: f64, n: usize, tau: f64) -> Result<Self> {
        if !(q > 1.0 && q <= 2.0) {
            return Err(Error::invalid(format!("Rademacher type q must lie in (1,2], got {q}")));
        }
        if !(t_const >= 1.0) || !t_const.is_finite() {
            return Err(Error::invalid(format!("type constant must be >= 1, got {t_const}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::invalid(format!("a.s. bound beta must be > 0, got {beta}")));
        }
        if n == 0 {
            return Err(Error::invalid("sample count must be >= 1"));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::invalid(format!("tau must be > 0, got {tau}")));
        }
        Ok(Self { q, t_const, beta, n, tau })
    }

    /// The three-term deviation bound.
    pub fn bound(&self) -> f64 {
        let n = self.n as f64;
        4.0 * self.beta * self.t_const / n.powf(1.0 - 1.0 / self.q)
            + 2.0 * self.beta * (2.0 * self.tau / n).sqrt()
            + 4.0 * self.tau * self.beta / (3.0 * n)
    }
}

/// Bounded vector sources for the verifier; the exact mean is known by
/// construction so centering introduces no estimation error.
#[derive(Debug, Clone)]
pub enum Sampler {
    /// Independent signs on `dim` coordinates, each `±β/dim^{1/q}`, so the
    /// ℓ^q norm is exactly β. Mean zero.
    RademacherCoords { dim: usize },
    /// Emits the same vector every draw; the centered sum is identically 0.
    Constant { coeffs: Vec<f64> },
}

impl Sampler {
    fn draw(&self, rng: &mut impl Rng, q: f64, beta: f64) -> Vec<f64> {
        match self {
            Sampler::RademacherCoords { dim } => {
                let scale = beta / (*dim as f64).powf(1.0 / q);
                (0..*dim).map(|_| if rng.gen::<bool>() { scale } else { -scale }).collect()
            }
            Sampler::Constant { coeffs } => coeffs.clone(),
        }
    }

    fn mean(&self, _q: f64) -> Vec<f64> {
        match self {
            Sampler::RademacherCoords { dim } => vec![0.0; *dim],
            Sampler::Constant { coeffs } => coeffs.clone(),
        }
    }
}

/// Fraction of trials in which `‖(1/n) Σ (U_i − E U_i)‖_q` meets or exceeds
/// the bound. Draws with norm above β abort with an error — the bound's
/// almost-sure hypothesis would be violated. Trials run in parallel on
/// per-trial derived streams; the exceedance count is order-independent.
pub fn violation_rate(
    spec: &ConcentrationSpec,
    sampler: &Sampler,
    trials: usize,
    master_seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let bound = spec.bound();
    let mean = sampler.mean(spec.q);
    let exceed: u64 = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let mut rng = derive_rng(master_seed, &[TAG_TRIAL, t]);
            let mut acc = vec![0.0; mean.len()];
            for _ in 0..spec.n {
                let u = sampler.draw(&mut rng, spec.q, spec.beta);
                let norm = norm_with(&u, spec.q);
                if norm > spec.beta + 1e-12 {
                    return Err(Error::invalid(format!(
                        "sampler emitted norm {norm} above the declared bound {}",
                        spec.beta
                    )));
                }
                for ((a, &ui), &mi) in acc.iter_mut().zip(&u).zip(&mean) {
                    *a += ui - mi;
                }
            }
            let dev = norm_with(&acc, spec.q) / spec.n as f64;
            Ok(u64::from(dev >= bound))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(exceed as f64 / trials as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Space {
    Hilbert,
    Lq(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct TypeConstant {
    pub q: f64,
    pub t_const: f64,
    /// False when the constant is a configurable default rather than a
    /// value this library asserts (ℓ^q with q ≠ 2).
    pub verified: bool,
}

/// Rademacher type of the space: Hilbert and ℓ² have type (2, 1) exactly;
/// ℓ^q with q ∈ (1,2) has type q with an unasserted default constant 1;
/// q > 2 has type 2 with the classical √(q−1) estimate, likewise flagged.
pub fn type_constant(space: Space) -> Result<TypeConstant> {
    match space {
        Space::Hilbert => Ok(TypeConstant { q: 2.0, t_const: 1.0, verified: true }),
        Space::Lq(q) => {
            if !(q > 1.0) || !q.is_finite() {
                return Err(Error::invalid(format!("type exponent must lie in (1, inf), got {q}")));
            }
            if q == 2.0 {
                Ok(TypeConstant { q: 2.0, t_const: 1.0, verified: true })
            } else if q < 2.0 {
                Ok(TypeConstant { q, t_const: 1.0, verified: false })
            } else {
                Ok(TypeConstant { q: 2.0, t_const: (q - 1.0).sqrt(), verified: false })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bound_hand_value() {
        let spec = ConcentrationSpec::new(2.0, 1.0, 1.0, 100, 1.0).unwrap();
        let expect = 0.4 + 2.0 * 0.02_f64.sqrt() + 4.0 / 300.0;
        assert_abs_diff_eq!(spec.bound(), expect, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.bound(), 0.696176, epsilon = 1e-6);
    }

    #[test]
    fn bound_monotonicity() {
        let base = ConcentrationSpec::new(1.8, 1.2, 0.9, 64, 1.5).unwrap();
        for n in [128usize, 256, 1024, 1 << 20] {
            let bigger_n = ConcentrationSpec::new(1.8, 1.2, 0.9, n, 1.5).unwrap();
            assert!(bigger_n.bound() < base.bound());
        }
        assert!(ConcentrationSpec::new(1.8, 1.2, 0.9, 64, 3.0).unwrap().bound() > base.bound());
        assert!(ConcentrationSpec::new(1.8, 1.2, 1.8, 64, 1.5).unwrap().bound() > base.bound());
        // n → ∞ drives the bound to 0
        assert!(ConcentrationSpec::new(1.8, 1.2, 0.9, usize::MAX, 1.5).unwrap().bound() < 1e-3);
    }

    #[test]
    fn spec_validation() {
        assert!(ConcentrationSpec::new(2.5, 1.0, 1.0, 10, 1.0).is_err());
        assert!(ConcentrationSpec::new(1.0, 1.0, 1.0, 10, 1.0).is_err());
        assert!(ConcentrationSpec::new(2.0, 0.5, 1.0, 10, 1.0).is_err());
        assert!(ConcentrationSpec::new(2.0, 1.0, 0.0, 10, 1.0).is_err());
        assert!(ConcentrationSpec::new(2.0, 1.0, 1.0, 0, 1.0).is_err());
        assert!(ConcentrationSpec::new(2.0, 1.0, 1.0, 10, 0.0).is_err());
    }

    #[test]
    fn degenerate_sampler_never_violates() {
        let spec = ConcentrationSpec::new(2.0, 1.0, 1.0, 20, 1.0).unwrap();
        let sampler = Sampler::Constant { coeffs: vec![0.5, 0.5] };
        assert_eq!(violation_rate(&spec, &sampler, 500, 1).unwrap(), 0.0);
    }

    #[test]
    fn unbounded_sampler_is_refused() {
        let spec = ConcentrationSpec::new(2.0, 1.0, 1.0, 5, 1.0).unwrap();
        let sampler = Sampler::Constant { coeffs: vec![1.0, 1.0] }; // l2 norm √2 > 1
        assert!(violation_rate(&spec, &sampler, 10, 1).is_err());
    }

    #[test]
    fn rademacher_rate_within_band() {
        let trials = 2000;
        for tau in [1.0, 2.0] {
            let spec = ConcentrationSpec::new(2.0, 1.0, 1.0, 50, tau).unwrap();
            let sampler = Sampler::RademacherCoords { dim: 8 };
            let rate = violation_rate(&spec, &sampler, trials, 42).unwrap();
            let p = (-tau).exp();
            let band = p + 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
            assert!(rate <= band, "tau={tau}: rate {rate} > band {band}");
        }
    }

    #[test]
    fn rate_nonincreasing_in_tau() {
        let sampler = Sampler::RademacherCoords { dim: 4 };
        let mut last = f64::INFINITY;
        for tau in [0.01, 0.5, 1.0, 2.0, 3.0] {
            let spec = ConcentrationSpec::new(2.0, 1.0, 1.0, 10, tau).unwrap();
            let rate = violation_rate(&spec, &sampler, 1000, 9).unwrap();
            assert!(rate <= last);
            last = rate;
        }
    }

    #[test]
    fn violation_rate_deterministic() {
        let spec = ConcentrationSpec::new(2.0, 1.0, 1.0, 30, 0.05).unwrap();
        let sampler = Sampler::RademacherCoords { dim : 3 };
        let a = violation_rate(&spec, &sampler, 3000, 11).unwrap();
        let b = violation_rate(&spec, &sampler, 3000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn type_constants() {
        let h = type_constant(Space::Hilbert).unwrap();
        assert_eq!((h.q, h.t_const, h.verified), (2.0, 1.0, true));
        let l2 = type_constant(Space::Lq(2.0)).unwrap();
        assert_eq!((l2.q, l2.t_const, l2.verified), (2.0, 1.0, true));
        let l15 = type_constant(Space::Lq(1.5)).unwrap();
        assert_eq!((l15.q, l15.t_const, l15.verified), (1.5, 1.0, false));
        let l4 = type_constant(Space::Lq(4.0)).unwrap();
        assert_eq!(l4.q, 2.0);
        assert_abs_diff_eq!(l4.t_const, 3.0_f64.sqrt(), epsilon = 1e-15);
        assert!(!l4.verified);
        assert!(type_constant(Space::Lq(1.0)).is_err());
    }
}
