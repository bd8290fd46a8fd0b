use serde::{Deserialize, Serialize};

use crate::channel::{FrameConfig, Scheme};
use crate::geometry::{DensityMap, RegionDescriptor, RegionMode, RegionSpec};
use crate::{Error, Result};

/// Where a pair of interference statistics came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Learned,
    Extrapolated,
    CampbellOracle,
}

/// Form of the variance integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceForm {
    /// Campbell's theorem with exact lognormal moments.
    #[default]
    Campbell,
    /// The squared-bracket integral minus the squared mean, as printed.
    Paper,
}

/// Mean and variance of the interference functional for one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrStats {
    pub block: usize,
    pub mean: f64,
    pub variance: f64,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_form: Option<VarianceForm>,
    /// Bound on the part of the mean integral beyond the truncation radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_tail_bound: Option<f64>,
    /// Bound on the part of the variance integral beyond the truncation radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_tail_bound: Option<f64>,
}

impl SinrStats {
    pub fn new(block: usize, mean: f64, variance: f64, provenance: Provenance) -> Self {
        SinrStats {
            block,
            mean,
            variance,
            provenance,
            region: None,
            variance_form: None,
            mean_tail_bound: None,
            variance_tail_bound: None,
        }
    }
}

/// `E[chi^k] = exp(k² a² theta² / 2)` for lognormal shadowing of std `theta` dB.
pub fn shadowing_moment(k: u32, theta_db: f64) -> f64 {
    let a = std::f64::consts::LN_10 / 10.0;
    let k = k as f64;
    (k * k * a * a * theta_db * theta_db / 2.0).exp()
}

/// Region mode matching block `block` (1-based) under `scheme`.
pub fn region_mode_for(config: &FrameConfig, block: usize, scheme: Scheme) -> RegionMode {
    if config.is_cooperative_block(block, scheme) {
        RegionMode::OutsideRadius {
            r_co: config.coop_radius,
        }
    } else {
        RegionMode::OutsideTargetCell
    }
}

/// Mean and variance of the interference functional over user drops of
/// density `density` outside `region`, for a target of gain `rho_target`.
pub fn interference_stats(
    rho_target: f64,
    density: &DensityMap,
    region: &RegionSpec,
    config: &FrameConfig,
    block: usize,
    scheme: Scheme,
    form: VarianceForm,
) -> Result<SinrStats> {
    let sigma = config.pathloss_exponent;
    if sigma <= 2.0 {
        return Err(Error::DivergentTail(sigma));
    }
    if block == 0 || block > config.num_blocks() {
        return Err(Error::BlockRange {
            start: block,
            end: block,
            blocks: config.num_blocks(),
        });
    }
    let expected = region_mode_for(config, block, scheme);
    if region.mode() != expected {
        return Err(Error::Config(format!(
            "block {block} needs region {expected:?}, got {:?}",
            region.mode()
        )));
    }
    let theta = config.shadowing_db;
    let l_dagger = config.dagger_len(block, scheme) as f64;
    let c1 = 1.0 / (config.antennas as f64 * rho_target);
    let c2 = 1.0 / (l_dagger * rho_target * rho_target);
    let e = |k| shadowing_moment(k, theta);
    let (e1, e2, e3, e4) = (e(1), e(2), e(3), e(4));

    let lambda = |n: &crate::geometry::QuadNode| density.evaluate(n.point);
    let mean = region.integrate(|n| {
        let g = n.radius.powf(-sigma);
        lambda(n) * (c1 * e1 * g + c2 * e2 * g * g)
    });
    let upper = density.upper_bound();
    let mean_tail = region.power_tail(upper, c1 * e1, sigma) + region.power_tail(upper, c2 * e2, 2.0 * sigma);

    let (variance, variance_tail) = match form {
        VarianceForm::Campbell => {
            let v = region.integrate(|n| {
                let g = n.radius.powf(-sigma);
                lambda(n) * (c1 * c1 * e2 * g * g + 2.0 * c1 * c2 * e3 * g * g * g + c2 * c2 * e4 * g.powi(4))
            });
            let tail = region.power_tail(upper, c1 * c1 * e2, 2.0 * sigma)
                + region.power_tail(upper, 2.0 * c1 * c2 * e3, 3.0 * sigma)
                + region.power_tail(upper, c2 * c2 * e4, 4.0 * sigma);
            (v, tail)
        }
        VarianceForm::Paper => {
            let a2t2 = (std::f64::consts::LN_10 / 10.0 * theta).powi(2);
            let second = region.integrate(|n| {
                let g = n.radius.powf(-sigma);
                let bracket = e1 * c1 * g + (2.0 * a2t2 * g * g).exp() * c2;
                lambda(n) * bracket * bracket
            });
            (second - mean * mean, f64::INFINITY)
        }
    };

    Ok(SinrStats {
        block,
        mean,
        variance,
        provenance: Provenance::Analytic,
        region: Some(region.descriptor().clone()),
        variance_form: Some(form),
        mean_tail_bound: Some(mean_tail),
        variance_tail_bound: Some(variance_tail),
    })
}
