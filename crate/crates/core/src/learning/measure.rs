use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, FrameConfig};
use crate::detector::{posterior, DetectionMode, DetectorState};
use crate::geometry::UserDrop;
use crate::linalg::{complex_normal, C64};
use crate::Result;

/// How the silent-symbol output power is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementModel {
    /// Expected output power over the symbols and noise of the silent symbol
    /// and over the unknown channels given the estimates.
    #[default]
    Averaged,
    /// One silent symbol drawn with the realized channels.
    SingleSymbol,
}

/// A silent-symbol measurement and the scale of its frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SilentMeasurement {
    /// Output power `I`, normalized by `‖w‖² M rho_target` and multiplied by
    /// `1 + |Φ¹|/L†`.
    pub power: f64,
    /// `|Φ†|/L† + 1` of the block.
    pub scale: f64,
}

/// Estimation length `L†` of the block detected by `state`.
pub fn state_dagger_len(state: &DetectorState, config: &FrameConfig) -> usize {
    match state.mode {
        DetectionMode::Cooperative => config.coop_len(state.iteration).unwrap_or(config.est_len(state.iteration)),
        DetectionMode::NonCooperative => config.est_len(state.iteration),
    }
}

/// Output power of the target user's combiner on a symbol in which no
/// target-cell user transmits.
///
/// Cooperative users' symbols are known at the target BS, so their
/// contribution is cancelled through their estimates and only the
/// estimation residual remains.
pub fn measure_silent_interference(
    realization: &ChannelRealization,
    drop: &UserDrop,
    config: &FrameConfig,
    state: &DetectorState,
    model: MeasurementModel,
    seed: u64,
) -> Result<SilentMeasurement> {
    let combiner = state.combiner();
    let tw = combiner.target_weights(state.target);
    let w2 = tw.w_norm_sqr;
    let noise = config.noise_to_power();
    let set = state.estimated_users();
    let k_in = state.in_cell.len();
    let mut column = vec![None; drop.num_users()];
    for (k, &u) in set.iter().enumerate() {
        column[u] = Some(k);
    }

    let raw = match model {
        MeasurementModel::Averaged => {
            let rho: Vec<f64> = (0..drop.num_users()).map(|u| drop.rho_target(u)).collect();
            let post = posterior(state, &rho, noise, &tw)?;
            let mut sum = noise * w2;
            for u in 0..drop.num_users() {
                match column[u] {
                    Some(k) if k < k_in => {}
                    Some(k) => sum += (tw.p[k] - post.r[u]).norm_sqr() + post.v[u] * w2,
                    None => sum += post.r[u].norm_sqr() + post.v[u] * w2,
                }
            }
            sum
        }
        MeasurementModel::SingleSymbol => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = realization.h();
            let est = combiner.estimates();
            let w = est * &tw.s;
            let m = h.nrows();
            let mut y: Vec<C64> = (0..m).map(|_| complex_normal(&mut rng, noise)).collect();
            for u in 0..drop.num_users() {
                let x = complex_normal(&mut rng, 1.0);
                match column[u] {
                    Some(k) if k < k_in => {}
                    Some(k) => {
                        for a in 0..m {
                            y[a] += (h[(a, u)] - est[(a, k)]) * x;
                        }
                    }
                    None => {
                        for a in 0..m {
                            y[a] += h[(a, u)] * x;
                        }
                    }
                }
            }
            (0..m).map(|a| w[a].conj() * y[a]).sum::<C64>().norm_sqr()
        }
    };

    let l_dagger = state_dagger_len(state, config) as f64;
    let rho_target = drop.rho_target(state.in_cell[state.target]);
    let normalizer = if w2 > 0.0 {
        w2 * config.antennas as f64 * rho_target
    } else {
        1.0
    };
    Ok(SilentMeasurement {
        power: raw / normalizer * (1.0 + k_in as f64 / l_dagger),
        scale: set.len() as f64 / l_dagger + 1.0,
    })
}
