use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Thermal noise power in watts for a density in dBm/Hz over `bandwidth_hz`.
pub fn noise_power_watts(density_dbm_hz: f64, bandwidth_hz: f64) -> f64 {
    dbm_to_watts(density_dbm_hz + 10.0 * bandwidth_hz.log10())
}

/// Detection scheme run at the target BS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Data-assisted detection with BS cooperation after the backhaul delay.
    Proposed,
    /// Data-assisted detection without cooperation.
    Baseline,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Baseline => "baseline",
        }
    }
}

/// Frame structure and radio constants.
///
/// Blocks are numbered `1..=N`. Iteration `i` (`0..N`) estimates channels from
/// the pilot and blocks `1..=i`, then detects block `i + 1`.
///
/// Symbols are handled at unit power and the transmit power is folded into
/// the noise: the detector works on `Y / sqrt(P)`, whose noise variance is
/// [`FrameConfig::noise_to_power`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    /// Number of BS antennas `M`.
    pub antennas: usize,
    /// Pilot length `L_p`.
    pub pilot_len: usize,
    pub block_lengths: Vec<usize>,
    /// Backhaul delay `d` in blocks.
    pub delay: usize,
    /// Cooperation radius in meters.
    pub coop_radius: f64,
    /// User transmit power in watts.
    pub tx_power: f64,
    /// Noise variance per receive sample in watts.
    pub noise_power: f64,
    pub pathloss_exponent: f64,
    /// Shadowing standard deviation in dB.
    pub shadowing_db: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            antennas: 200,
            pilot_len: 31,
            block_lengths: vec![100; 5],
            delay: 1,
            coop_radius: 700.0,
            tx_power: dbm_to_watts(23.0),
            noise_power: noise_power_watts(-174.0, 5e6),
            pathloss_exponent: 3.76,
            shadowing_db: 3.0,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.antennas == 0 {
            return bad("antenna count must be at least 1".into());
        }
        if self.pilot_len == 0 {
            return bad("pilot length must be positive".into());
        }
        if self.block_lengths.is_empty() {
            return bad("frame needs at least one data block".into());
        }
        if self.delay > self.block_lengths.len() {
            return bad(format!(
                "backhaul delay {} exceeds the {} blocks of the frame",
                self.delay,
                self.block_lengths.len()
            ));
        }
        for (name, v) in [
            ("transmit power", self.tx_power),
            ("noise power", self.noise_power),
            ("cooperation radius", self.coop_radius),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.shadowing_db >= 0.0) {
            return bad(format!("shadowing std {} dB must be non-negative", self.shadowing_db));
        }
        if !(self.pathloss_exponent > 0.0) {
            return bad(format!("pathloss exponent {} must be positive", self.pathloss_exponent));
        }
        Ok(())
    }

    /// Number of data blocks `N`.
    pub fn num_blocks(&self) -> usize {
        self.block_lengths.len()
    }

    /// Total frame length `L_p + L`.
    pub fn frame_len(&self) -> usize {
        self.pilot_len + self.block_lengths.iter().sum::<usize>()
    }

    /// `L_i`: pilot plus the first `i` data blocks.
    pub fn est_len(&self, i: usize) -> usize {
        self.pilot_len + self.block_lengths[..i.min(self.num_blocks())].iter().sum::<usize>()
    }

    /// `L_i'`: symbols of the first `i - d` blocks available through the
    /// backhaul at iteration `i`, or `None` while `i < d`.
    pub fn coop_len(&self, i: usize) -> Option<usize> {
        i.checked_sub(self.delay).map(|k| self.est_len(k))
    }

    /// Column range of block `b` (1-based) within the frame.
    pub fn block_columns(&self, b: usize) -> std::ops::Range<usize> {
        self.est_len(b - 1)..self.est_len(b)
    }

    /// Whether block `b` (1-based) is detected cooperatively under `scheme`.
    pub fn is_cooperative_block(&self, b: usize, scheme: Scheme) -> bool {
        scheme == Scheme::Proposed && b >= 1 && b - 1 >= self.delay
    }

    /// Effective estimation length `L†` for block `b` (1-based).
    pub fn dagger_len(&self, b: usize, scheme: Scheme) -> usize {
        let i = b - 1;
        if self.is_cooperative_block(b, scheme) {
            self.coop_len(i).expect("cooperative block is past the delay")
        } else {
            self.est_len(i)
        }
    }

    /// Noise variance of the power-normalised received signal, `sigma_z^2 / P`.
    pub fn noise_to_power(&self) -> f64 {
        self.noise_power / self.tx_power
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_radio_constants() {
        let c = FrameConfig::default();
        assert!((c.tx_power - 0.199_526_231_496_887_9).abs() < 1e-12);
        assert!((c.noise_power / 1.990_535_852_767_5e-14 - 1.0).abs() < 1e-9);
        c.validate().unwrap();
    }

    #[test]
    fn lengths() {
        let c = FrameConfig::default();
        assert_eq!(c.frame_len(), 531);
        assert_eq!(
            (0..=5).map(|i| c.est_len(i)).collect::<Vec<_>>(),
            vec![31, 131, 231, 331, 431, 531]
        );
        assert_eq!(c.coop_len(0), None);
        assert_eq!(c.coop_len(4), Some(331));
        assert_eq!(c.block_columns(1), 31..131);
        assert!(!c.is_cooperative_block(1, Scheme::Proposed));
        assert!(c.is_cooperative_block(2, Scheme::Proposed));
        assert!(!c.is_cooperative_block(5, Scheme::Baseline));
        assert_eq!(c.dagger_len(5, Scheme::Proposed), 331);
        assert_eq!(c.dagger_len(5, Scheme::Baseline), 431);
        assert_eq!(c.dagger_len(1, Scheme::Proposed), 31);
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = FrameConfig::default();
        c.delay = 6;
        assert!(c.validate().is_err());
        let mut c = FrameConfig::default();
        c.noise_power = 0.0;
        assert!(c.validate().is_err());
        let mut c = FrameConfig::default();
        c.antennas = 0;
        assert!(c.validate().is_err());
    }
}
