use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::VarianceForm;
use crate::channel::{dbm_to_watts, noise_power_watts, FrameConfig, Scheme};
use crate::detector::{Conditioning, DetectorOptions, Reconstruction};
use crate::geometry::{DensityKind, DensityMap, Point, SamplingWindow};
use crate::learning::MeasurementModel;
use crate::{Error, Result};

/// Which detection schemes a command runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeSelection {
    Proposed,
    Baseline,
    Both,
}

impl SchemeSelection {
    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeSelection::Proposed => vec![Scheme::Proposed],
            SchemeSelection::Baseline => vec![Scheme::Baseline],
            SchemeSelection::Both => vec![Scheme::Proposed, Scheme::Baseline],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceSelection {
    Campbell,
    Paper,
    Both,
}

impl VarianceSelection {
    pub fn forms(self) -> Vec<VarianceForm> {
        match self {
            VarianceSelection::Campbell => vec![VarianceForm::Campbell],
            VarianceSelection::Paper => vec![VarianceForm::Paper],
            VarianceSelection::Both => vec![VarianceForm::Campbell, VarianceForm::Paper],
        }
    }
}

/// Interference sums fed to the estimators and combiners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticsMode {
    /// Sums over the actual drop.
    Oracle,
    /// Expected sums over the user density instead of the drop's.
    Mismatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatsSource {
    Analytic,
    Learned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityChoice {
    PerCellMean,
    Constant,
    Hotspot,
    TargetCellOnly,
}

/// Everything an experiment needs, read from a flat `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub antennas: usize,
    pub pilot_len: usize,
    pub block_len: usize,
    pub num_blocks: usize,
    pub delay: usize,
    pub coop_radius: f64,
    pub tx_power_dbm: f64,
    pub noise_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub pathloss_exponent: f64,
    pub shadowing_db: f64,
    pub cell_radius: f64,
    pub rings: usize,
    pub density: DensityChoice,
    pub users_per_cell: f64,
    pub density_lambda: f64,
    pub hotspot_base: f64,
    pub hotspot_peak: f64,
    pub hotspot_x: f64,
    pub hotspot_y: f64,
    pub hotspot_spread: f64,
    pub window: SamplingWindow,
    pub max_resamples: usize,
    pub target_distances: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub mode: SchemeSelection,
    pub variance: VarianceSelection,
    pub statistics: StatisticsMode,
    pub conditioning: Conditioning,
    pub symbol_error_rate: f64,
    pub epsilon: f64,
    pub adapt_stats: StatsSource,
    pub validation_trials: usize,
    pub learn_blocks: Vec<usize>,
    pub measurement: MeasurementModel,
    pub cdf_min_db: f64,
    pub cdf_max_db: f64,
    pub cdf_step_db: f64,
    pub triple_file: Option<PathBuf>,
    pub extrapolate_rho: Vec<f64>,
    pub extrapolate_block: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            antennas: 200,
            pilot_len: 31,
            block_len: 100,
            num_blocks: 5,
            delay: 1,
            coop_radius: 700.0,
            tx_power_dbm: 23.0,
            noise_dbm_hz: -174.0,
            bandwidth_hz: 5e6,
            pathloss_exponent: 3.76,
            shadowing_db: 3.0,
            cell_radius: 500.0,
            rings: 2,
            density: DensityChoice::PerCellMean,
            users_per_cell: 10.0,
            density_lambda: 0.0,
            hotspot_base: 0.0,
            hotspot_peak: 0.0,
            hotspot_x: 0.0,
            hotspot_y: 0.0,
            hotspot_spread: 1.0,
            window: SamplingWindow::BoundingDisk,
            max_resamples: 1000,
            target_distances: vec![100.0, 300.0, 400.0],
            trials: 500,
            seed: 1,
            mode: SchemeSelection::Both,
            variance: VarianceSelection::Campbell,
            statistics: StatisticsMode::Oracle,
            conditioning: Conditioning::Exact,
            symbol_error_rate: 0.0,
            epsilon: 0.05,
            adapt_stats: StatsSource::Analytic,
            validation_trials: 2000,
            learn_blocks: vec![1, 2, 3, 4, 5],
            measurement: MeasurementModel::Averaged,
            cdf_min_db: -10.0,
            cdf_max_db: 60.0,
            cdf_step_db: 0.1,
            triple_file: None,
            extrapolate_rho: Vec::new(),
            extrapolate_block: 5,
            out: PathBuf::from("results"),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

/// Parses a snake_case unit variant through serde.
fn parse_enum<T: for<'de> Deserialize<'de>>(key: &str, value: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(value.to_string()))
        .map_err(|_| Error::Config(format!("{key}: unknown value '{value}'")))
}

fn enum_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Defaults overridden by the entries of a config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Applies one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "antennas" => self.antennas = parse_num(key, value)?,
            "pilot_len" => self.pilot_len = parse_num(key, value)?,
            "block_len" => self.block_len = parse_num(key, value)?,
            "num_blocks" => self.num_blocks = parse_num(key, value)?,
            "delay" => self.delay = parse_num(key, value)?,
            "coop_radius" => self.coop_radius = parse_num(key, value)?,
            "tx_power_dbm" => self.tx_power_dbm = parse_num(key, value)?,
            "noise_dbm_hz" => self.noise_dbm_hz = parse_num(key, value)?,
            "bandwidth_hz" => self.bandwidth_hz = parse_num(key, value)?,
            "pathloss_exponent" => self.pathloss_exponent = parse_num(key, value)?,
            "shadowing_db" => self.shadowing_db = parse_num(key, value)?,
            "cell_radius" => self.cell_radius = parse_num(key, value)?,
            "rings" => self.rings = parse_num(key, value)?,
            "density" => self.density = parse_enum(key, value)?,
            "users_per_cell" => self.users_per_cell = parse_num(key, value)?,
            "density_lambda" => self.density_lambda = parse_num(key, value)?,
            "hotspot_base" => self.hotspot_base = parse_num(key, value)?,
            "hotspot_peak" => self.hotspot_peak = parse_num(key, value)?,
            "hotspot_x" => self.hotspot_x = parse_num(key, value)?,
            "hotspot_y" => self.hotspot_y = parse_num(key, value)?,
            "hotspot_spread" => self.hotspot_spread = parse_num(key, value)?,
            "window" => self.window = parse_enum(key, value)?,
            "max_resamples" => self.max_resamples = parse_num(key, value)?,
            "target_distances" => self.target_distances = parse_list(key, value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "mode" => self.mode = parse_enum(key, value)?,
            "variance" => self.variance = parse_enum(key, value)?,
            "statistics" => self.statistics = parse_enum(key, value)?,
            "conditioning" => self.conditioning = parse_enum(key, value)?,
            "symbol_error_rate" => self.symbol_error_rate = parse_num(key, value)?,
            "epsilon" => self.epsilon = parse_num(key, value)?,
            "adapt_stats" => self.adapt_stats = parse_enum(key, value)?,
            "validation_trials" => self.validation_trials = parse_num(key, value)?,
            "learn_blocks" => self.learn_blocks = parse_list(key, value)?,
            "measurement" => self.measurement = parse_enum(key, value)?,
            "cdf_min_db" => self.cdf_min_db = parse_num(key, value)?,
            "cdf_max_db" => self.cdf_max_db = parse_num(key, value)?,
            "cdf_step_db" => self.cdf_step_db = parse_num(key, value)?,
            "triple_file" => {
                self.triple_file = (!value.is_empty()).then(|| PathBuf::from(value));
            }
            "extrapolate_rho" => self.extrapolate_rho = parse_list(key, value)?,
            "extrapolate_block" => self.extrapolate_block = parse_num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Every key except the output directory, in sorted order.
    pub fn entries(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        m.insert("antennas", self.antennas.to_string());
        m.insert("pilot_len", self.pilot_len.to_string());
        m.insert("block_len", self.block_len.to_string());
        m.insert("num_blocks", self.num_blocks.to_string());
        m.insert("delay", self.delay.to_string());
        m.insert("coop_radius", self.coop_radius.to_string());
        m.insert("tx_power_dbm", self.tx_power_dbm.to_string());
        m.insert("noise_dbm_hz", self.noise_dbm_hz.to_string());
        m.insert("bandwidth_hz", self.bandwidth_hz.to_string());
        m.insert("pathloss_exponent", self.pathloss_exponent.to_string());
        m.insert("shadowing_db", self.shadowing_db.to_string());
        m.insert("cell_radius", self.cell_radius.to_string());
        m.insert("rings", self.rings.to_string());
        m.insert("density", enum_name(&self.density));
        m.insert("users_per_cell", self.users_per_cell.to_string());
        m.insert("density_lambda", self.density_lambda.to_string());
        m.insert("hotspot_base", self.hotspot_base.to_string());
        m.insert("hotspot_peak", self.hotspot_peak.to_string());
        m.insert("hotspot_x", self.hotspot_x.to_string());
        m.insert("hotspot_y", self.hotspot_y.to_string());
        m.insert("hotspot_spread", self.hotspot_spread.to_string());
        m.insert("window", enum_name(&self.window));
        m.insert("max_resamples", self.max_resamples.to_string());
        m.insert("target_distances", join(&self.target_distances));
        m.insert("trials", self.trials.to_string());
        m.insert("seed", self.seed.to_string());
        m.insert("mode", enum_name(&self.mode));
        m.insert("variance", enum_name(&self.variance));
        m.insert("statistics", enum_name(&self.statistics));
        m.insert("conditioning", enum_name(&self.conditioning));
        m.insert("symbol_error_rate", self.symbol_error_rate.to_string());
        m.insert("epsilon", self.epsilon.to_string());
        m.insert("adapt_stats", enum_name(&self.adapt_stats));
        m.insert("validation_trials", self.validation_trials.to_string());
        m.insert("learn_blocks", join(&self.learn_blocks));
        m.insert("measurement", enum_name(&self.measurement));
        m.insert("cdf_min_db", self.cdf_min_db.to_string());
        m.insert("cdf_max_db", self.cdf_max_db.to_string());
        m.insert("cdf_step_db", self.cdf_step_db.to_string());
        m.insert(
            "triple_file",
            self.triple_file
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
        );
        m.insert("extrapolate_rho", join(&self.extrapolate_rho));
        m.insert("extrapolate_block", self.extrapolate_block.to_string());
        m
    }

    /// Canonical text form; parsing it reproduces the configuration.
    pub fn canonical(&self) -> String {
        self.entries()
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// FNV-1a hash of [`Self::canonical`], as 16 hex digits.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.canonical().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    pub fn frame(&self) -> FrameConfig {
        FrameConfig {
            antennas: self.antennas,
            pilot_len: self.pilot_len,
            block_lengths: vec![self.block_len; self.num_blocks],
            delay: self.delay,
            coop_radius: self.coop_radius,
            tx_power: dbm_to_watts(self.tx_power_dbm),
            noise_power: noise_power_watts(self.noise_dbm_hz, self.bandwidth_hz),
            pathloss_exponent: self.pathloss_exponent,
            shadowing_db: self.shadowing_db,
        }
    }

    pub fn density_map(&self) -> Result<DensityMap> {
        match self.density {
            DensityChoice::PerCellMean => DensityMap::per_cell_mean(self.users_per_cell, self.cell_radius),
            DensityChoice::Constant => DensityMap::constant(self.density_lambda),
            DensityChoice::Hotspot => DensityMap::new(DensityKind::Hotspot {
                base: self.hotspot_base,
                peak: self.hotspot_peak,
                center: Point {
                    x: self.hotspot_x,
                    y: self.hotspot_y,
                },
                spread: self.hotspot_spread,
            }),
            DensityChoice::TargetCellOnly => DensityMap::new(DensityKind::TargetCellOnly {
                lambda: self.density_lambda,
                cell_radius: self.cell_radius,
            }),
        }
    }

    /// Detector options; `mismatched` sums come from the caller.
    pub fn detector_options(&self) -> DetectorOptions {
        DetectorOptions {
            reconstruction: if self.symbol_error_rate > 0.0 {
                Reconstruction::SymbolErrors {
                    rate: self.symbol_error_rate,
                }
            } else {
                Reconstruction::Genie
            },
            statistics: Default::default(),
            conditioning: self.conditioning,
        }
    }

    /// Thresholds in dB at which CDFs are tabulated.
    pub fn cdf_grid(&self) -> Vec<f64> {
        let steps = ((self.cdf_max_db - self.cdf_min_db) / self.cdf_step_db).round() as usize;
        (0..=steps)
            .map(|k| self.cdf_min_db + k as f64 * self.cdf_step_db)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.frame().validate()?;
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.trials == 0 {
            return bad("trials must be positive");
        }
        if self.target_distances.iter().any(|&r| !(r > 0.0)) {
            return bad("target distances must be positive");
        }
        if !(self.cdf_step_db > 0.0) || self.cdf_max_db < self.cdf_min_db {
            return bad("CDF grid needs cdf_step_db > 0 and cdf_max_db >= cdf_min_db");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if self.learn_blocks.iter().any(|&b| b == 0 || b > self.num_blocks) {
            return bad("learn_blocks must lie in 1..=num_blocks");
        }
        Ok(())
    }
}
