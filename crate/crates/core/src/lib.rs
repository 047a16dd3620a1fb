//! Accelerated variance-reduced optimistic-gradient solver for `0 ∈ Gx + Tx`
//! with finite-sum `G`, plus baselines, problem generators and certificates.

pub mod baselines;
pub mod certify;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod operator;
pub mod problems;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::RealVec;
pub use operator::{
    fb_residual, natural_residual, AssumptionMeta, FiniteSumOperator, Problem, Resolvent,
    ZeroResolvent,
};
pub use rng::Rng;
