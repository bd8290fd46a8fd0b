//! Experiment configuration, deterministic parallel Monte Carlo and the
//! commands behind the `uplink-adapt` binary.
//!
//! Trial `t` of a run draws its drop, channels and reconstruction errors
//! from streams keyed by the master seed and `t` only, so results are
//! independent of thread count and every trial reproduces in isolation.

mod bundle;
mod commands;
mod config;
mod scenario;

pub use bundle::{Manifest, ResultBundle, MANIFEST_FILE};
pub use commands::{
    cmd_adapt, cmd_analyze, cmd_extrapolate, cmd_learn, cmd_simulate, learn_campaign, median, run_trial,
    run_trials, trial_drop_seed, validate_outage, AnalyticRecord, LearnedRecord, OutageCounts, SchemeRun,
    TrialOutcome, CDF_CSV_HEADER,
};
pub use config::{
    DensityChoice, ExperimentConfig, SchemeSelection, StatisticsMode, StatsSource, VarianceSelection,
};
pub use scenario::{Scenario, TrialDrop};
