//! Regularized empirical risk minimization in finite sections of ℓ^r.
//!
//! The pieces: duality maps on ℓ^r ([`seq`]), function dictionaries with
//! their feature maps and reproducing kernels ([`dict`]), separable
//! totally convex regularizers ([`penalty`]), convex losses ([`loss`]), the
//! proximal solver with its duality certificates ([`solver`]), consistency
//! and regularization-path experiments ([`experiment`]), vector-valued
//! Hoeffding concentration ([`hoeffding`]), and the Sobolev p-kernel on
//! [0,1] ([`sobolev`]).
//!
//! Start with the `examples/` directory; each example is a runnable tour of
//! one capability.

pub mod config;
pub mod dict;
pub mod experiment;
pub mod hoeffding;
pub mod loss;
pub mod penalty;
pub mod rng;
pub mod runner;
pub mod seq;
pub mod sobolev;
pub mod solver;

pub use dict::{Dictionary, Family};
pub use experiment::{run_consistency, Schedule, SyntheticModel};
pub use loss::{Loss, LossKind};
pub use penalty::{Atom, AtomKind, ModulusBound, Regularizer};
pub use seq::SeqVector;
pub use solver::{solve_primal, ErmProblem, Solution};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Invalid(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("quasi-inverse unbounded on [0, {bound}]")]
    QuasiInverseUnbounded { bound: f64 },
    #[error("no convergence in {iterations} iterations (residual {residual})")]
    NonConverged { iterations: usize, residual: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{context}: {source}")]
    Json {
        context: String,
        source: serde_json::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn dim(expected: usize, got: usize) -> Self {
        Error::Dimension { expected, got }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
