//! Benchmark problem families and their resolvents.

pub mod linear;
pub mod matrix_game;
pub mod mdp;
pub mod norm;
pub mod projection;

pub use linear::{
    build_linear_example1, build_linear_identity, build_linear_random, lipschitz_bound_linear,
    LinearProblem, LinearResolvent,
};
pub use matrix_game::{build_matrix_game, MatrixGame};
pub use mdp::{build_mdp, mdp_dim, BlockNorm, Mdp};
pub use norm::{operator_norm_estimate, NormEstimate};
pub use projection::{project_nonneg_ball, project_simplex, BallSimplex, SimplexProduct};
