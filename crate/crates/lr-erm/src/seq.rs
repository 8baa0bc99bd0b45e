//! Finite sections of the sequence spaces ℓ^r: coefficient vectors, norms,
//! duality maps, conjugate exponents, and the upper quasi-inverse of an
//! increasing scalar function.
//!
//! Everything here is componentwise and pure. The index set is always a
//! finite truncation `0..len`; exponents live in `(1, ∞)` except for
//! [`conjugate_exponent`], which accepts the full range `[1, ∞]`.

use crate::{Error, Result};

/// Absolute tolerance of the bisection in [`quasi_inverse`].
pub const QUASI_INVERSE_TOL: f64 = 1e-10;

/// `|t|^e * sign(t)` with an explicit branch at zero so that negative zeros
/// and `0^e` for fractional exponents never produce `-0.0` or NaN.
pub fn signed_power(t: f64, e: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else if t > 0.0 {
        t.powf(e)
    } else {
        -(-t).powf(e)
    }
}

/// Exponents agree up to conjugate-arithmetic roundoff (`r ↦ r* ↦ r` is not
/// exactly involutive in floating point).
pub(crate) fn same_exponent(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

/// Conjugate exponent: `1 ↦ ∞`, `p ↦ p/(p−1)`, `∞ ↦ 1`.
///
/// Involutive on `[1, ∞]`; `p < 1` is a domain error.
pub fn conjugate_exponent(p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("conjugate exponent needs p >= 1, got {p}")));
    }
    if p == 1.0 {
        Ok(f64::INFINITY)
    } else if p.is_infinite() {
        Ok(1.0)
    } else {
        Ok(p / (p - 1.0))
    }
}

/// Finitely supported element of ℓ^r: coefficients plus the exponent r > 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqVector {
    coeffs: Vec<f64>,
    r: f64,
}

impl SeqVector {
    pub fn new(coeffs: Vec<f64>, r: f64) -> Result<Self> {
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::invalid(format!("sequence exponent must lie in (1, inf), got {r}")));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("non-finite coefficient {bad}")));
        }
        Ok(Self { coeffs, r })
    }

    pub fn zeros(len: usize, r: f64) -> Result<Self> {
        Self::new(vec![0.0; len], r)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(Σ_k |μ_k|^r)^{1/r}`.
    pub fn norm(&self) -> f64 {
        norm_with(&self.coeffs, self.r)
    }

    /// Componentwise difference; both vectors must share length and exponent.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if !same_exponent(self.r, other.r) {
            return Err(Error::invalid(format!("exponent mismatch: {} vs {}", self.r, other.r)));
        }
        if self.len() != other.len() {
            return Err(Error::dim(self.len(), other.len()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Self::new(coeffs, self.r)
    }

    /// The r-duality map `J_r`, acting componentwise as
    /// `μ_k ↦ |μ_k|^{r−1} sign(μ_k)`; the result carries the conjugate
    /// exponent r*.
    ///
    /// The image `w = J_r(u)` satisfies `⟨u, w⟩ = ‖u‖_r^r` and
    /// `‖w‖_{r*} = ‖u‖_r^{r−1}`.
    pub fn duality_map(&self) -> Self {
        let rs = self.r / (self.r - 1.0);
        let coeffs = self.coeffs.iter().map(|&m| signed_power(m, self.r - 1.0)).collect();
        Self { coeffs, r: rs }
    }
}

/// Norm of a raw coefficient slice in the exponent-`e` sequence norm.
pub fn norm_with(coeffs: &[f64], e: f64) -> f64 {
    debug_assert!(e > 1.0 && e.is_finite());
    coeffs.iter().map(|c| c.abs().powf(e)).sum::<f64>().powf(1.0 / e)
}

/// Canonical pairing `⟨u, w⟩ = Σ_k μ_k w_k` between a vector and a dual
/// vector of equal length. Summation order is ascending in k, which callers
/// rely on for bitwise reproducibility.
pub fn pairing(u: &SeqVector, w: &SeqVector) -> Result<f64> {
    if u.len() != w.len() {
        return Err(Error::dim(u.len(), w.len()));
    }
    Ok(u.coeffs.iter().zip(&w.coeffs).map(|(a, b)| a * b).sum())
}

/// Inverse of the r-duality map: the r*-duality map of the dual space, so it
/// is the same componentwise power map evaluated at the conjugate exponent.
/// `inverse_duality_map(duality_map(u)) == u` up to roundoff.
pub fn inverse_duality_map(w: &SeqVector) -> SeqVector {
    w.duality_map()
}

/// Upper quasi-inverse `φ^♮(s) = sup{t ∈ [0, search_ub] : φ(t) ≤ s}` of an
/// increasing function with `φ(0) = 0`, `φ > 0` on `(0, ∞)`, computed by
/// bisection to absolute tolerance [`QUASI_INVERSE_TOL`].
///
/// `s < 0` returns `+∞` (the quasi-inverse of an ℝ₊-valued function is +∞
/// below zero). If `φ(search_ub) ≤ s` the supremum is not bracketed and an
/// error reports the range as insufficient.
pub fn quasi_inverse(phi: impl Fn(f64) -> f64, s: f64, search_ub: f64) -> Result<f64> {
    if s.is_nan() {
        return Err(Error::invalid("quasi_inverse: NaN threshold"));
    }
    if s < 0.0 {
        return Ok(f64::INFINITY);
    }
    if !(search_ub > 0.0) || !search_ub.is_finite() {
        return Err(Error::invalid(format!("quasi_inverse: bad search bound {search_ub}")));
    }
    if phi(search_ub) <= s {
        return Err(Error::QuasiInverseUnbounded { bound: search_ub });
    }
    let (mut lo, mut hi) = (0.0_f64, search_ub);
    while hi - lo > QUASI_INVERSE_TOL {
        let mid = 0.5 * (lo + hi);
        if phi(mid) <= s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
