//! Two-query synthesis by sorted-amplitude rank matching, and the Rayleigh/Wasserstein
//! machinery behind its error bound.

mod oracle;
mod synth;
mod wasserstein;

pub use oracle::{build_perm_phase_oracle, sorted_abs_distance, PermPhaseOracle, MAX_PHASE_BITS};
pub use synth::{
    simulate_queries, two_query_synthesize, QuerySimulation, TwoQueryConfig, TwoQueryHook, TwoQueryMode,
    TwoQueryOutcome,
};
pub use wasserstein::{empirical_wasserstein2, empirical_wasserstein2_squared, Rayleigh};
