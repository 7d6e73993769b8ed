//! Divergences, discrepancy-bound certification, property probes and the
//! mismatch-coefficient estimate.

pub mod bounds;
pub mod divergence;
pub mod mismatch;
pub mod probes;

pub use bounds::{
    marginalized_dynamics, verify_marginalized_dynamics_bound, verify_value_bound, verify_visitation_bound,
    BoundReport, Instance, PASS_MARGIN,
};
pub use divergence::{distribution_divergences, hellinger, kl_divergence, tv_max, Divergences, FDivergence};
pub use mismatch::{estimate_mismatch, MismatchEstimate, MismatchMode};
pub use probes::{probe_gradient_domination, probe_lipschitz, probe_smoothness};
