//! Systems and trajectories indexed by a finite chain `0 → 1 → ... → T`:
//! history-typed Moore machines, forward unrolling into joint laws, wiring
//! through deterministic lenses, and diagnostics for time coherence and
//! for the factorization of composite trajectories.

mod diagnose;
mod index;
mod system;
mod trajectory;

pub use diagnose::{
    factorization_check, inner_laws, search_coherence_counterexample, CoherenceCounterexample, FactorizationReport,
    SearchStats,
};
pub use index::{ChainGraph, IndexedObject};
pub use system::{
    clock_system, compose_system_with_lens, open_markov, tensor_systems, GSystem, InputPolicy, StepSystem, Wiring,
};
pub use trajectory::{
    chart_cell, check_time_coherence, clock_lens, lift_trajectory, nabla_trajectory, unroll_trajectory, GTrajectory,
};
