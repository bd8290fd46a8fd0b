//! Online learning of the interference statistics from silent symbols, and
//! their extension from three measured users to any user of the same cell.

mod campaign;
mod extrapolate;
mod learner;
mod measure;

pub use campaign::{run_learning_campaign, CampaignResult, CampaignSettings, TraceRow, TRACE_CSV_HEADER};
pub use extrapolate::{extrapolate_stats, UserStat, UserStatsTriple, MAX_CONDITION};
pub use learner::LearnerState;
pub use measure::{measure_silent_interference, state_dagger_len, MeasurementModel, SilentMeasurement};
