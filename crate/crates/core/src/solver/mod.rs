//! The accelerated variance-reduced optimistic-gradient method.

pub mod constants;
pub mod params;
pub mod run;
pub mod vfog;

pub use constants::{
    constants_general, constants_vr, constants_vr_with_offset, rate_bound, rate_c0, rate_r0_sq,
    ConstantsBundle, Regime,
};
pub use params::{stepsize_range, ScheduleParams};
pub use run::{
    build_method, rate_certificate, run, run_method, AlgoConfig, Budget, Method, ProbeCadence,
    RunOptions, RunTrace, TraceRecord,
};
pub use vfog::{vfog_init, vfog_step, SolverState};
