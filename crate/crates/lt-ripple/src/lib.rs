//! LT fountain codes with ripple-targeted degree distribution design.

pub mod cli;
pub mod codec;
pub mod design;
pub mod dist;
pub mod error;
pub mod nnls;
pub mod release;
pub mod rng;
pub mod sim;
pub mod walk;

pub use codec::{
    decode_batch, decode_incremental, decode_incremental_payload, decode_incremental_recorded,
    decode_symbols, encode, n_success_monotone_check, DecoderTrace, Decoder, EncodedSymbol,
    Encoder, RippleDiscipline, TraceRow,
};
pub use design::{design, DesignSolution, RippleTarget};
pub use dist::{
    ideal_soliton, load_distribution, robust_soliton, save_distribution, DegreeDistribution,
    DegreeSampler, RsdParams,
};
pub use error::{Error, Result};
pub use rng::{master_stream, trial_stream, RandomStream, DEFAULT_SEED};
pub use sim::{
    compare, default_overhead_grid, ripple_trajectory, run_experiment, sweep, CompareEntry,
    DistributionSource, ExperimentConfig, ExperimentResult, SweepFamily, SweepResult,
    TrajectoryResult, DEFAULT_CAP_MULTIPLIER,
};
pub use walk::{
    fit_power_law, fit_power_law_fixed, walk_biased, walk_symmetric, BarrierPolicy, BiasedWalk,
    PowerLawFit, SymmetricWalk, WalkConfig,
};
