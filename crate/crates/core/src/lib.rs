//! Cooperative data-assisted uplink detection for massive MIMO networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] builds the hexagonal base-station layout, samples active
//!   users from a spatial Poisson point process and provides the polar
//!   quadrature regions used by the closed-form interference statistics.
//! * [`channel`] holds the frame configuration, Zadoff-Chu pilot books and the
//!   small-scale channel / symbol / noise realisation of one frame.
//! * [`detector`] runs the block-iterative MMSE estimation and detection
//!   (in-cell and cooperative), and decomposes each block's SINR.
//! * [`analysis`] evaluates the asymptotic SINR, the interference mean and
//!   variance integrals, the Gaussian SINR CDF and outage-constrained rates.
//! * [`learning`] tracks interference statistics online from silent-symbol
//!   measurements and extrapolates them across users of a cell.
//! * [`harness`] wires everything into reproducible Monte Carlo experiments
//!   and the `uplink-adapt` command line tool.

pub mod analysis;
pub mod channel;
pub mod detector;
mod error;
pub mod geometry;
pub mod harness;
pub mod learning;
pub mod linalg;
pub mod seeding;

pub use error::{Error, Result};
