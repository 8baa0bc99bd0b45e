//! Dictionaries of scalar functions on [0,1], the synthesis operator
//! `(Au)(x) = Σ_k μ_k φ_k(x)`, the feature map `Λ(x) = (φ_k(x))_k ∈ ℓ^{r*}`,
//! and the associated non-symmetric scalar kernel
//! `K_r(x,x') = Σ_k |φ_k(x)|^{r*−1} sign(φ_k(x)) φ_k(x')`.

use crate::seq::{conjugate_exponent, pairing, signed_power, SeqVector};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Built-in families. All are linearly independent on [0,1], so the
/// synthesis operator is injective and least-squares Gram matrices are
/// positive definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `φ_0 = 1`, `φ_{2j−1}(x) = cos(2πjx)/j^s`, `φ_{2j}(x) = sin(2πjx)/j^s`.
    Trig { decay: f64 },
    /// `φ_k(x) = x^k`.
    Monomial,
    /// Piecewise-linear bumps peaking at the interior nodes `(k+1)/(K+1)`,
    /// vanishing at 0 and 1.
    Hat,
}

#[derive(Debug, Clone)]
pub struct Dictionary {
    family: Family,
    size: usize,
    r: f64,
    r_star: f64,
    feature_bound: f64,
}

impl Dictionary {
    pub fn new(family: Family, size: usize, r: f64) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("dictionary needs at least one atom"));
        }
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::invalid(format!("feature exponent must lie in (1, inf), got {r}")));
        }
        if let Family::Trig { decay } = family {
            if !decay.is_finite() || decay < 0.0 {
                return Err(Error::invalid(format!("trig decay must be finite and >= 0, got {decay}")));
            }
        }
        let r_star = conjugate_exponent(r)?;
        let feature_bound = analytic_feature_bound(family, size, r_star);
        Ok(Self { family, size, r, r_star, feature_bound })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn r_star(&self) -> f64 {
        self.r_star
    }

    /// Closed-form bound ς with `‖Λ(x)‖_{r*} ≤ ς` for every x in [0,1]
    /// (not just on a sample grid).
    pub fn feature_bound(&self) -> f64 {
        self.feature_bound
    }

    /// Value of the k-th atom.
    pub fn atom(&self, k: usize, x: f64) -> f64 {
        debug_assert!(k < self.size);
        match self.family {
            Family::Trig { decay } => {
                if k == 0 {
                    1.0
                } else {
                    let j = ((k + 1) / 2) as f64;
                    let scale = j.powf(-decay);
                    let phase = 2.0 * PI * j * x;
                    if k % 2 == 1 {
                        phase.cos() * scale
                    } else {
                        phase.sin() * scale
                    }
                }
            }
            Family::Monomial => x.powi(k as i32),
            Family::Hat => {
                let h = 1.0 / (self.size as f64 + 1.0);
                let c = (k as f64 + 1.0) * h;
                (1.0 - (x - c).abs() / h).max(0.0)
            }
        }
    }

    /// Sup norm of the k-th atom on [0,1].
    pub fn atom_sup(&self, k: usize) -> f64 {
        match self.family {
            Family::Trig { decay } => {
                if k == 0 {
                    1.0
                } else {
                    (((k + 1) / 2) as f64).powf(-decay)
                }
            }
            Family::Monomial | Family::Hat => 1.0,
        }
    }

    /// `Λ(x) = (φ_k(x))_k` as an element of ℓ^{r*}.
    pub fn feature_map(&self, x: f64) -> SeqVector {
        let coeffs = (0..self.size).map(|k| self.atom(k, x)).collect();
        SeqVector::new(coeffs, self.r_star).expect("finite atom values")
    }

    /// `(Au)(x) = ⟨u, Λ(x)⟩`. Shares the arithmetic path of
    /// [`pairing`] with [`Self::feature_map`], so the reproducing identity
    /// holds bitwise.
    pub fn apply(&self, u: &SeqVector, x: f64) -> Result<f64> {
        if !crate::seq::same_exponent(u.r(), self.r) {
            return Err(Error::invalid(format!(
                "coefficient exponent {} does not match dictionary exponent {}",
                u.r(),
                self.r
            )));
        }
        pairing(u, &self.feature_map(x))
    }

    /// Scalar kernel `K_r(x,x') = ⟨J_{r*}(Λ(x)), Λ(x')⟩`.
    ///
    /// Diagonal: `K_r(x,x) = ‖Λ(x)‖_{r*}^{r*}`. Off-diagonal it obeys the
    /// Hölder bound `|K_r(x,x')| ≤ K_r(x,x)^{1/r} K_r(x',x')^{1/r*}` and is
    /// generally not symmetric unless r = 2.
    pub fn kernel(&self, x: f64, x2: f64) -> f64 {
        let e = self.r_star - 1.0;
        (0..self.size)
            .map(|k| signed_power(self.atom(k, x), e) * self.atom(k, x2))
            .sum()
    }

    /// Pointwise upper bound on `|Au|` over [0,1]: `Σ_k |μ_k| ‖φ_k‖_∞`.
    pub fn synthesis_sup_bound(&self, u: &SeqVector) -> Result<f64> {
        if u.len() != self.size {
            return Err(Error::dim(self.size, u.len()));
        }
        Ok(u.coeffs()
            .iter()
            .enumerate()
            .map(|(k, m)| m.abs() * self.atom_sup(k))
            .sum())
    }

    /// Exact L²([0,1]) Gram matrix `∫ φ_i φ_j` (closed forms per family).
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let k = self.size;
        let mut g = vec![vec![0.0; k]; k];
        match self.family {
            Family::Trig { decay } => {
                for m in 0..k {
                    g[m][m] = if m == 0 {
                        1.0
                    } else {
                        let j = ((m + 1) / 2) as f64;
                        0.5 * j.powf(-2.0 * decay)
                    };
                }
            }
            Family::Monomial => {
                for (i, row) in g.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = 1.0 / ((i + j + 1) as f64);
                    }
                }
            }
            Family::Hat => {
                let h = 1.0 / (k as f64 + 1.0);
                for i in 0..k {
                    g[i][i] = 2.0 * h / 3.0;
                    if i + 1 < k {
                        g[i][i + 1] = h / 6.0;
                        g[i + 1][i] = h / 6.0;
                    }
                }
            }
        }
        g
    }
}

/// Pointwise bound on `Σ_k |φ_k(x)|^{r*}`, valid for every x:
/// trig pairs use `|cos θ|^e + |sin θ|^e ≤ max(1, 2^{1−e/2})`, monomials are
/// bounded by their count, hats by 1 (at most two overlap, with values
/// `t` and `1−t`).
fn analytic_feature_bound(family: Family, size: usize, r_star: f64) -> f64 {
    let e = r_star;
    let total = match family {
        Family::Trig { decay } => {
            let pair_max = if e < 2.0 { 2.0_f64.powf(1.0 - e / 2.0) } else { 1.0 };
            let full_pairs = (size - 1) / 2;
            let mut sum = 1.0;
            for j in 1..=full_pairs {
                sum += pair_max * (j as f64).powf(-decay * e);
            }
            if (size - 1) % 2 == 1 {
                let j = (full_pairs + 1) as f64;
                sum += j.powf(-decay * e);
            }
            sum
        }
        Family::Monomial => size as f64,
        Family::Hat => 1.0,
    };
    total.powf(1.0 / e)
}
