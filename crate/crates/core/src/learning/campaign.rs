use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{measure_silent_interference, LearnerState, MeasurementModel, SilentMeasurement};
use crate::analysis::{Provenance, SinrStats};
use crate::channel::{sample_channels, FrameConfig, Scheme};
use crate::detector::{Detector, DetectorOptions};
use crate::geometry::UserDrop;
use crate::seeding::{child_seed, Purpose};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSettings {
    pub config: FrameConfig,
    pub scheme: Scheme,
    pub options: DetectorOptions,
    /// 1-based block indices to learn.
    pub blocks: Vec<usize>,
    pub frames: usize,
    pub model: MeasurementModel,
    pub seed: u64,
}

/// Learner state after update `n` for one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: u64,
    pub block: usize,
    pub mean: f64,
    pub variance: Option<f64>,
}

pub const TRACE_CSV_HEADER: &str = "n,block,mean,variance";

impl TraceRow {
    pub fn csv(&self) -> String {
        let v = self.variance.map(|v| format!("{v:e}")).unwrap_or_default();
        format!("{},{},{:e},{}", self.n, self.block, self.mean, v)
    }
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub blocks: Vec<usize>,
    pub learners: Vec<LearnerState>,
    /// Measurements per frame, in block order.
    pub measurements: Vec<Vec<SilentMeasurement>>,
    pub trace: Vec<TraceRow>,
}

impl CampaignResult {
    /// Learned statistics per block; needs at least two frames.
    pub fn stats(&self) -> Result<Vec<SinrStats>> {
        self.blocks
            .iter()
            .zip(&self.learners)
            .map(|(&b, l)| {
                let mean = l
                    .mean()
                    .ok_or_else(|| Error::Unavailable("no measurements".into()))?;
                Ok(SinrStats::new(b, mean, l.variance()?, Provenance::Learned))
            })
            .collect()
    }
}

/// Runs the silent-symbol learner over `settings.frames` frames, each with a
/// fresh drop from `make_drop(frame)` and fresh channels.
///
/// Frames are measured in parallel; the recursions consume the measurements
/// in frame order, so the result does not depend on scheduling.
pub fn run_learning_campaign<F>(make_drop: F, settings: &CampaignSettings) -> Result<CampaignResult>
where
    F: Fn(u64) -> Result<UserDrop> + Sync,
{
    let cfg = &settings.config;
    cfg.validate()?;
    for &b in &settings.blocks {
        if b == 0 || b > cfg.num_blocks() {
            return Err(Error::BlockRange {
                start: b,
                end: b,
                blocks: cfg.num_blocks(),
            });
        }
    }
    let nb = settings.blocks.len() as u64;
    let measurements = (0..settings.frames as u64)
        .into_par_iter()
        .map(|n| -> Result<Vec<SilentMeasurement>> {
            let drop = make_drop(n)?;
            let real = sample_channels(cfg, &drop, child_seed(settings.seed, Purpose::Channel, n))?;
            let det = Detector::new(
                &real,
                &drop,
                cfg,
                settings.scheme,
                &settings.options,
                child_seed(settings.seed, Purpose::Reconstruction, n),
            )?;
            settings
                .blocks
                .iter()
                .enumerate()
                .map(|(j, &b)| {
                    let state = det.state(b - 1)?;
                    let seed = child_seed(settings.seed, Purpose::Silent, n * nb + j as u64);
                    measure_silent_interference(&real, &drop, cfg, &state, settings.model, seed)
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut learners = vec![LearnerState::new(); settings.blocks.len()];
    let mut trace = Vec::with_capacity(measurements.len() * settings.blocks.len());
    for frame in &measurements {
        for (j, m) in frame.iter().enumerate() {
            let l = &mut learners[j];
            l.update(m.power, m.scale)?;
            trace.push(TraceRow {
                n: l.count(),
                block: settings.blocks[j],
                mean: l.mean().unwrap_or(0.0),
                variance: l.variance().ok(),
            });
        }
    }
    Ok(CampaignResult {
        blocks: settings.blocks.clone(),
        learners,
        measurements,
        trace,
    })
}
