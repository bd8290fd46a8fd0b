use crate::analysis::{interference_stats, region_mode_for, shadowing_moment, SinrStats, VarianceForm};
use crate::channel::{FrameConfig, Scheme};
use crate::detector::{DetectorOptions, StatisticsSource};
use crate::geometry::{
    build_hex_layout, gauss_legendre_on, hex_boundary_radius, integration_region, sample_user_drop,
    DensityMap, DropSettings, NetworkLayout, Point, RegionMode, RegionSpec, UserDrop,
};
use crate::seeding::{child_seed, Purpose};
use crate::{Error, Result};

use super::{ExperimentConfig, StatisticsMode};

/// Layout, density and frame derived from an [`ExperimentConfig`].
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ExperimentConfig,
    pub frame: FrameConfig,
    pub layout: NetworkLayout,
    pub density: DensityMap,
    pub drops: DropSettings,
}

/// A drop with the target planted, and how many overloaded draws preceded it.
#[derive(Debug, Clone)]
pub struct TrialDrop {
    pub drop: UserDrop,
    pub resamples: usize,
}

impl Scenario {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let frame = config.frame();
        let layout = build_hex_layout(config.cell_radius, config.rings)?;
        Ok(Scenario {
            config: config.clone(),
            frame,
            layout,
            density: config.density_map()?,
            drops: DropSettings {
                pathloss_exponent: config.pathloss_exponent,
                shadowing_db: config.shadowing_db,
                max_users_per_cell: config.pilot_len,
                window: config.window,
            },
        })
    }

    /// Samples the drop of one trial with the target at `target_distance` on
    /// the positive x-axis. Draws that overload a cell are discarded and
    /// redrawn from the next sub-stream.
    pub fn sample_drop(&self, target_distance: f64, trial_seed: u64) -> Result<TrialDrop> {
        let mut last = None;
        for attempt in 0..=self.config.max_resamples as u64 {
            let seed = child_seed(trial_seed, Purpose::Drop, attempt);
            let planted = sample_user_drop(&self.layout, &self.density, &self.drops, seed).and_then(|d| {
                d.with_planted_target(
                    &self.layout,
                    target_distance,
                    &self.drops,
                    child_seed(trial_seed, Purpose::Synthetic, attempt),
                )
            });
            match planted {
                Ok(drop) => {
                    return Ok(TrialDrop {
                        drop,
                        resamples: attempt as usize,
                    })
                }
                Err(e @ Error::CellOverload { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::Config("no drop attempts allowed".into())))
    }

    pub fn region(&self, block: usize, scheme: Scheme) -> Result<RegionSpec> {
        integration_region(
            &self.layout,
            region_mode_for(&self.frame, block, scheme),
            self.layout.bounding_radius(),
        )
    }

    /// Large-scale gain of a target at `distance` with 0 dB shadowing.
    pub fn target_rho(&self, distance: f64) -> f64 {
        distance.powf(-self.frame.pathloss_exponent)
    }

    pub fn analytic_stats(
        &self,
        target_distance: f64,
        block: usize,
        scheme: Scheme,
        form: VarianceForm,
    ) -> Result<SinrStats> {
        interference_stats(
            self.target_rho(target_distance),
            &self.density,
            &self.region(block, scheme)?,
            &self.frame,
            block,
            scheme,
            form,
        )
    }

    /// Expected `|Φ†|`: the planted target plus the expected number of users
    /// inside the target cell, or inside the target cell and the cooperation
    /// disk for cooperative blocks.
    pub fn expected_set_size(&self, block: usize, scheme: Scheme) -> f64 {
        let r = self.config.cell_radius;
        let coop = self.frame.is_cooperative_block(block, scheme);
        let r_co = self.frame.coop_radius;
        let sector = std::f64::consts::PI / 3.0;
        let radial = gauss_legendre_on(48, 0.0, 1.0);
        let mut total = 0.0;
        for s in 0..6 {
            // sectors span vertex to vertex so the boundary is smooth on each
            let a0 = s as f64 * sector;
            for (phi, wphi) in gauss_legendre_on(32, a0, a0 + sector) {
                let mut edge = hex_boundary_radius(r, phi);
                if coop {
                    edge = edge.max(r_co);
                }
                for &(u, wu) in &radial {
                    let rad = u * edge;
                    let lambda = self.density.evaluate(Point::polar(rad, phi));
                    total += wphi * wu * edge * rad * lambda;
                }
            }
        }
        1.0 + total
    }

    /// Expected sums of large-scale gains toward the target BS outside the
    /// target cell and outside the cooperation disk.
    pub fn expected_outside_sums(&self) -> Result<(f64, f64)> {
        let sigma = self.frame.pathloss_exponent;
        let chi = shadowing_moment(1, self.frame.shadowing_db);
        let r_max = self.layout.bounding_radius();
        let sum = |mode| -> Result<f64> {
            let region = integration_region(&self.layout, mode, r_max)?;
            Ok(region.integrate(|n| self.density.evaluate(n.point) * chi * n.radius.powf(-sigma)))
        };
        Ok((
            sum(RegionMode::OutsideTargetCell)?,
            sum(RegionMode::OutsideRadius {
                r_co: self.frame.coop_radius,
            })?,
        ))
    }

    pub fn detector_options(&self) -> Result<DetectorOptions> {
        let mut opts = self.config.detector_options();
        if self.config.statistics == StatisticsMode::Mismatched {
            let (outside_cell, outside_coop) = self.expected_outside_sums()?;
            opts.statistics = StatisticsSource::Supplied {
                outside_cell,
                outside_coop,
            };
        }
        Ok(opts)
    }
}
