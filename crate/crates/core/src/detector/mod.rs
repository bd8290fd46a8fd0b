//! Block-iterative data-assisted MMSE detection at the target BS.
//!
//! Iteration `i` estimates the target-cell channels from the pilot and the
//! reconstructed blocks `1..=i`. Once the backhaul delay has passed, the
//! detected target-cell signals are cancelled from the first `i - d` blocks
//! and the channels of nearby out-of-cell users, whose symbols arrive over the
//! backhaul, are estimated from the residual. Block `i + 1` is then detected
//! with an MMSE combiner over all estimated channels.

mod combiner;
mod estimation;
mod frame;
mod sinr;

pub use combiner::{alpha_co, alpha_in, detect_block_co, detect_block_in, Combiner, TargetWeights};
pub use estimation::{
    cancel_residual, cooperative_estimator, estimate_in_cell, estimate_interferers,
    in_cell_estimator, CooperativeEstimate, InCellEstimate,
};
pub use frame::{
    run_frame, run_frame_on, sinr_csv_row, Detector, DetectorOptions, DetectorState,
    Reconstruction, StatisticsSource, SINR_CSV_HEADER,
};
pub(crate) use sinr::posterior;
pub use sinr::{sinr_decomposition, BlockSinrRecord, Conditioning, DetectionMode, SINR_CAP};
