use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::combiner::{alpha_co, alpha_in, Combiner};
use super::estimation::{cooperative_estimator, in_cell_estimator};
use super::sinr::{sinr_decomposition, BlockSinrRecord, Conditioning, DetectionMode};
use crate::channel::{sample_channels, ChannelRealization, FrameConfig, Scheme};
use crate::geometry::UserDrop;
use crate::linalg::{complex_normal, select_rows, CMatrix};
use crate::seeding::{child_seed, Purpose};
use crate::{Error, Result};

/// How detected blocks are turned back into symbols for later estimation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reconstruction {
    /// Detected blocks are decoded without error.
    #[default]
    Genie,
    /// Each reconstructed data symbol is independently replaced by a fresh
    /// `CN(0, 1)` draw with probability `rate`.
    SymbolErrors { rate: f64 },
}

/// Source of the interference constants used by the estimators and combiners.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StatisticsSource {
    /// Sums of the large-scale gains of the actual drop.
    #[default]
    Oracle,
    /// Externally supplied sums of large-scale gains toward the target BS of
    /// the users outside the target cell and outside the cooperative set.
    Supplied {
        outside_cell: f64,
        outside_coop: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectorOptions {
    pub reconstruction: Reconstruction,
    pub statistics: StatisticsSource,
    pub conditioning: Conditioning,
}

/// Estimates and detector of one iteration `i`, which detects block `i + 1`.
pub struct DetectorState {
    pub iteration: usize,
    pub block: usize,
    pub mode: DetectionMode,
    /// Drop indices of the target-cell users, in estimate-column order.
    pub in_cell: Vec<usize>,
    /// Drop indices of the cooperatively estimated users (empty when the
    /// block is detected without cooperation).
    pub cooperative: Vec<usize>,
    /// Estimate column of the target user.
    pub target: usize,
    pub h_in: CMatrix,
    pub h_intf: CMatrix,
    pub delta_in: Vec<f64>,
    pub delta_co: Vec<f64>,
    pub alpha: f64,
    /// Detected target-cell symbols of block `i + 1`.
    pub detected: CMatrix,
    pub(crate) combiner: Combiner,
    /// `Ĥ_all = (Y^{0,i} / sqrt(P)) q_tilde`.
    pub(crate) q_tilde: CMatrix,
    /// `X^{0,i} q_tilde` with the transmitted symbols.
    pub(crate) effective: CMatrix,
}

impl DetectorState {
    /// Drop indices of all estimated users, in estimate-column order.
    pub fn estimated_users(&self) -> Vec<usize> {
        self.in_cell.iter().chain(&self.cooperative).copied().collect()
    }

    pub fn combiner(&self) -> &Combiner {
        &self.combiner
    }
}

/// Runs Scheme iterations on one frame realization.
pub struct Detector<'a> {
    realization: &'a ChannelRealization,
    drop: &'a UserDrop,
    config: &'a FrameConfig,
    scheme: Scheme,
    in_cell: Vec<usize>,
    cooperative: Vec<usize>,
    target: usize,
    /// Reconstructed symbols, target-cell rows then cooperative rows.
    recon: CMatrix,
    outside_cell: f64,
    outside_coop: f64,
    noise: f64,
}

impl<'a> Detector<'a> {
    pub fn new(
        realization: &'a ChannelRealization,
        drop: &'a UserDrop,
        config: &'a FrameConfig,
        scheme: Scheme,
        options: &DetectorOptions,
        reconstruction_seed: u64,
    ) -> Result<Self> {
        config.validate()?;
        if realization.num_users() != drop.num_users()
            || realization.antennas() != config.antennas
            || realization.frame_len() != config.frame_len()
        {
            return Err(Error::Dimension(
                "channel realization does not match the drop and frame".into(),
            ));
        }
        let target_user = drop
            .target_user()
            .ok_or_else(|| Error::Unavailable("target cell has no active user".into()))?;
        let in_cell = drop.cell_members(0);
        let target = in_cell.iter().position(|&u| u == target_user).unwrap_or(0);
        let cooperative = match scheme {
            Scheme::Proposed => drop.cooperative_set(config.coop_radius),
            Scheme::Baseline => Vec::new(),
        };

        let (outside_cell, outside_coop) = match options.statistics {
            StatisticsSource::Oracle => {
                let mut member = vec![false; drop.num_users()];
                let mut cell_sum = 0.0;
                for u in 0..drop.num_users() {
                    if drop.user(u).cell != 0 {
                        cell_sum += drop.rho_target(u);
                    }
                }
                for &u in in_cell.iter().chain(&cooperative) {
                    member[u] = true;
                }
                let coop_sum = (0..drop.num_users())
                    .filter(|&u| !member[u])
                    .map(|u| drop.rho_target(u))
                    .sum::<f64>();
                (cell_sum, if cooperative.is_empty() { cell_sum } else { coop_sum })
            }
            StatisticsSource::Supplied {
                outside_cell,
                outside_coop,
            } => {
                if !(outside_cell >= 0.0 && outside_coop >= 0.0) {
                    return Err(Error::Config("supplied interference sums must be non-negative".into()));
                }
                (outside_cell, outside_coop)
            }
        };

        let rows: Vec<usize> = in_cell.iter().chain(&cooperative).copied().collect();
        let mut recon = select_rows(realization.x(), &rows, config.frame_len());
        if let Reconstruction::SymbolErrors { rate } = options.reconstruction {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!("symbol error rate {rate} outside [0, 1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(reconstruction_seed);
            for n in config.pilot_len..config.frame_len() {
                for r in 0..rows.len() {
                    if rng.random::<f64>() < rate {
                        recon[(r, n)] = complex_normal(&mut rng, 1.0);
                    }
                }
            }
        }

        Ok(Detector {
            realization,
            drop,
            config,
            scheme,
            in_cell,
            cooperative,
            target,
            recon,
            outside_cell,
            outside_coop,
            noise: config.noise_to_power(),
        })
    }

    /// Runs iteration `i` (`0..N`), producing the detector for block `i + 1`.
    ///
    /// Reconstructed symbols are fixed per frame, so iterations do not depend
    /// on each other and may be evaluated individually.
    pub fn state(&self, i: usize) -> Result<DetectorState> {
        let cfg = self.config;
        if i >= cfg.num_blocks() {
            return Err(Error::BlockRange {
                start: i + 1,
                end: i + 1,
                blocks: cfg.num_blocks(),
            });
        }
        let m = cfg.antennas;
        let k_in = self.in_cell.len();
        let len = cfg.est_len(i);
        let x_in = self.recon.view((0, 0), (k_in, len)).into_owned();
        let rho_in: Vec<f64> = self.in_cell.iter().map(|&u| self.drop.rho_target(u)).collect();
        let inc = in_cell_estimator(&x_in, &rho_in, self.outside_cell + self.noise, m)?;

        let cooperate = cfg.is_cooperative_block(i + 1, self.scheme) && !self.cooperative.is_empty();
        let (q_tilde, delta_co, alpha, mode, cooperative) = if cooperate {
            let len_co = cfg.coop_len(i).expect("cooperative block");
            let k_co = self.cooperative.len();
            let x_in_co = x_in.columns(0, len_co).into_owned();
            let x_co = self.recon.view((k_in, 0), (k_co, len_co)).into_owned();
            let rho_co: Vec<f64> = self.cooperative.iter().map(|&u| self.drop.rho_target(u)).collect();
            let co = cooperative_estimator(
                &x_co,
                &rho_co,
                &x_in_co,
                &inc,
                self.outside_coop + self.noise,
                m,
            )?;
            // Ĥ_intf = (Y' - Ĥ_in X_in') Q_co = Y [pad(Q_co) - Q_in X_in' Q_co]
            let correction = &inc.q * (&x_in_co * &co.q);
            let mut q = CMatrix::zeros(len, k_in + k_co);
            q.columns_mut(0, k_in).copy_from(&inc.q);
            q.view_mut((0, k_in), (len_co, k_co)).copy_from(&co.q);
            let mut tail = q.columns_mut(k_in, k_co);
            tail -= correction;
            let alpha = alpha_co(self.outside_coop, &inc.delta, &co.delta, self.noise);
            (q, co.delta, alpha, DetectionMode::Cooperative, self.cooperative.clone())
        } else {
            let alpha = alpha_in(self.outside_cell, &inc.delta, self.noise);
            (inc.q.clone(), Vec::new(), alpha, DetectionMode::NonCooperative, Vec::new())
        };

        let effective = self.realization.symbols_times(len, &q_tilde);
        let h_all = self.realization.project(len, &q_tilde, &effective);
        let combiner = Combiner::new(h_all, alpha)?;
        let rows = combiner.detector_rows();
        let detected = self
            .realization
            .apply_rows(&rows.rows(0, k_in).into_owned(), cfg.block_columns(i + 1));
        let h = combiner.estimates();
        let h_in = h.columns(0, k_in).into_owned();
        let h_intf = h.columns(k_in, h.ncols() - k_in).into_owned();

        Ok(DetectorState {
            iteration: i,
            block: i + 1,
            mode,
            in_cell: self.in_cell.clone(),
            cooperative,
            target: self.target,
            h_in,
            h_intf,
            delta_in: inc.delta,
            delta_co,
            alpha,
            detected,
            combiner,
            q_tilde,
            effective,
        })
    }
}

/// Runs all blocks of one frame on an existing realization.
pub fn run_frame_on(
    realization: &ChannelRealization,
    drop: &UserDrop,
    config: &FrameConfig,
    scheme: Scheme,
    options: &DetectorOptions,
    reconstruction_seed: u64,
) -> Result<Vec<BlockSinrRecord>> {
    let det = Detector::new(realization, drop, config, scheme, options, reconstruction_seed)?;
    (0..config.num_blocks())
        .map(|i| sinr_decomposition(&det.state(i)?, drop, config, options.conditioning))
        .collect()
}

/// Samples a frame from `seed` and runs every block under `scheme`.
pub fn run_frame(
    drop: &UserDrop,
    config: &FrameConfig,
    scheme: Scheme,
    options: &DetectorOptions,
    seed: u64,
) -> Result<Vec<BlockSinrRecord>> {
    let real = sample_channels(config, drop, child_seed(seed, Purpose::Channel, 0))?;
    run_frame_on(
        &real,
        drop,
        config,
        scheme,
        options,
        child_seed(seed, Purpose::Reconstruction, 0),
    )
}

/// CSV header matching [`sinr_csv_row`].
pub const SINR_CSV_HEADER: &str =
    "seed,scheme,block,mode,sinr_db,intra_db,estimation_error_db,inter_db,noise_db,capped";

fn db(v: f64) -> String {
    format!("{:.6}", 10.0 * v.log10())
}

/// One CSV row per block record.
pub fn sinr_csv_row(seed: u64, scheme: Scheme, r: &BlockSinrRecord) -> String {
    format!(
        "{seed},{},{},{},{},{},{},{},{},{}",
        scheme.as_str(),
        r.block,
        r.mode.as_str(),
        db(r.sinr),
        db(r.intra),
        db(r.estimation_error),
        db(r.inter),
        db(r.noise),
        r.capped
    )
}
