//! Frame configuration, Zadoff-Chu pilots and per-frame channel realizations.

mod config;
mod pilots;
mod realization;

pub use config::{dbm_to_watts, noise_power_watts, FrameConfig, Scheme};
pub use pilots::{build_pilot_book, zadoff_chu, PilotBook};
pub use realization::{received_signal, sample_channels, ChannelRealization};
