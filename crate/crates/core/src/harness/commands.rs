use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentConfig, ResultBundle, Scenario, StatsSource, TrialDrop};
use crate::analysis::{
    asymptotic_sinr, cdf_curve, empirical_cdf_curve, lemma_terms, q_inverse, rate_threshold,
    AsymptoticSinr, SinrStats, VarianceForm,
};
use crate::channel::{sample_channels, Scheme};
use crate::detector::{run_frame_on, sinr_csv_row, BlockSinrRecord, DetectorOptions, SINR_CSV_HEADER};
use crate::learning::{
    extrapolate_stats, run_learning_campaign, CampaignResult, CampaignSettings, UserStatsTriple,
};
use crate::seeding::{child_seed, Purpose};
use crate::{Error, Result};

pub const CDF_CSV_HEADER: &str = "config_hash,source,target_distance,scheme,block,threshold_db,probability";

/// One scheme's detector records and large-system SINRs for one trial.
#[derive(Debug, Clone)]
pub struct SchemeRun {
    pub scheme: Scheme,
    pub records: Vec<BlockSinrRecord>,
    pub lemma: Vec<AsymptoticSinr>,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub trial: u64,
    pub channel_seed: u64,
    pub resamples: usize,
    /// One entry per scheme, sharing the drop and channels of the trial.
    pub runs: Vec<SchemeRun>,
}

/// Seed from which the drop of trial `trial` is derived.
pub fn trial_drop_seed(master: u64, trial: u64) -> u64 {
    child_seed(master, Purpose::Drop, trial)
}

/// Samples trial `trial` and runs every scheme on the same drop and channels.
pub fn run_trial(
    scn: &Scenario,
    options: &DetectorOptions,
    target_distance: f64,
    schemes: &[Scheme],
    trial: u64,
) -> Result<TrialOutcome> {
    let seed = scn.config.seed;
    let TrialDrop { drop, resamples } = scn.sample_drop(target_distance, trial_drop_seed(seed, trial))?;
    let channel_seed = child_seed(seed, Purpose::Channel, trial);
    let real = sample_channels(&scn.frame, &drop, channel_seed)?;
    let target = drop
        .target_user()
        .ok_or_else(|| Error::Unavailable("target cell has no active user".into()))?;
    let rho = drop.rho_target(target);
    let runs = schemes
        .iter()
        .map(|&scheme| {
            let records = run_frame_on(
                &real,
                &drop,
                &scn.frame,
                scheme,
                options,
                child_seed(seed, Purpose::Reconstruction, trial),
            )?;
            let lemma = (1..=scn.frame.num_blocks())
                .map(|b| asymptotic_sinr(rho, &drop, &scn.frame, b, scheme))
                .collect();
            Ok(SchemeRun {
                scheme,
                records,
                lemma,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialOutcome {
        trial,
        channel_seed,
        resamples,
        runs,
    })
}

/// Runs `trials` trials in parallel, returned in trial order.
pub fn run_trials(
    scn: &Scenario,
    options: &DetectorOptions,
    target_distance: f64,
    schemes: &[Scheme],
    trials: usize,
) -> Result<Vec<TrialOutcome>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(scn, options, target_distance, schemes, t))
        .collect()
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn push_cdf(out: &mut String, hash: &str, source: &str, r: f64, scheme: Scheme, block: usize, curve: &[(f64, f64)]) {
    for (t, p) in curve {
        let _ = writeln!(out, "{hash},{source},{r},{},{block},{t:.4},{p:.6}", scheme.as_str());
    }
}

/// Monte Carlo SINR of the detector and of the large-system formula, with
/// empirical CDFs per scheme and block.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<ResultBundle> {
    let scn = Scenario::new(cfg)?;
    let options = scn.detector_options()?;
    let hash = cfg.hash();
    let schemes = cfg.mode.schemes();
    let grid = cfg.cdf_grid();
    let mut bundle = ResultBundle::new("simulate", cfg);

    let mut records = format!("config_hash,target_distance,trial,{SINR_CSV_HEADER}\n");
    let mut cdf = format!("{CDF_CSV_HEADER}\n");
    let mut summary =
        String::from("config_hash,target_distance,scheme,block,trials,median_sinr_db,mean_sinr_db,median_lemma_db\n");
    for &r in &cfg.target_distances {
        let outcomes = run_trials(&scn, &options, r, &schemes, cfg.trials)?;
        let resamples = outcomes.iter().map(|o| o.resamples as u64).sum();
        bundle.count_drops(outcomes.len() as u64, resamples);
        for o in &outcomes {
            for run in &o.runs {
                for rec in &run.records {
                    let _ = writeln!(records, "{hash},{r},{},{}", o.trial, sinr_csv_row(o.channel_seed, run.scheme, rec));
                }
            }
        }
        for (s, &scheme) in schemes.iter().enumerate() {
            for b in 0..scn.frame.num_blocks() {
                let det: Vec<f64> = outcomes.iter().map(|o| o.runs[s].records[b].sinr_db()).collect();
                let lem: Vec<f64> = outcomes.iter().map(|o| db(o.runs[s].lemma[b].value)).collect();
                push_cdf(&mut cdf, &hash, "detector", r, scheme, b + 1, &empirical_cdf_curve(&det, &grid));
                push_cdf(&mut cdf, &hash, "lemma1", r, scheme, b + 1, &empirical_cdf_curve(&lem, &grid));
                let mean = det.iter().sum::<f64>() / det.len() as f64;
                let _ = writeln!(
                    summary,
                    "{hash},{r},{},{},{},{:.6},{:.6},{:.6}",
                    scheme.as_str(),
                    b + 1,
                    det.len(),
                    median(&det),
                    mean,
                    median(&lem)
                );
            }
        }
    }
    bundle.add("sinr_records.csv", records);
    bundle.add("empirical_cdf.csv", cdf);
    bundle.add("sinr_summary.csv", summary);
    Ok(bundle)
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticRecord {
    pub target_distance: f64,
    pub scheme: Scheme,
    pub block: usize,
    pub set_size: f64,
    pub l_dagger: usize,
    pub stats: SinrStats,
}

fn form_name(form: VarianceForm) -> &'static str {
    match form {
        VarianceForm::Campbell => "campbell",
        VarianceForm::Paper => "paper",
    }
}

/// Analytic CDFs for every placement, scheme, block and variance form.
pub fn cmd_analyze(cfg: &ExperimentConfig) -> Result<ResultBundle> {
    let scn = Scenario::new(cfg)?;
    let hash = cfg.hash();
    let grid = cfg.cdf_grid();
    let mut bundle = ResultBundle::new("analyze", cfg);
    let mut cdf = format!("{CDF_CSV_HEADER}\n");
    let mut all = Vec::new();
    for &r in &cfg.target_distances {
        for scheme in cfg.mode.schemes() {
            for b in 1..=scn.frame.num_blocks() {
                let set_size = scn.expected_set_size(b, scheme);
                let l_dagger = scn.frame.dagger_len(b, scheme);
                for form in cfg.variance.forms() {
                    let stats = scn.analytic_stats(r, b, scheme, form)?;
                    if !(stats.variance > 0.0 && stats.variance.is_finite()) {
                        bundle.warn(format!(
                            "degenerate distribution at r = {r}, {} block {b}, {} variance: M = {:e}, V = {:e}",
                            scheme.as_str(),
                            form_name(form),
                            stats.mean,
                            stats.variance
                        ));
                    }
                    let source = format!("analytic_{}", form_name(form));
                    let curve = cdf_curve(&stats, set_size, l_dagger as f64, &grid);
                    push_cdf(&mut cdf, &hash, &source, r, scheme, b, &curve);
                    all.push(AnalyticRecord {
                        target_distance: r,
                        scheme,
                        block: b,
                        set_size,
                        l_dagger,
                        stats,
                    });
                }
            }
        }
    }
    bundle.add("analytic_cdf.csv", cdf);
    bundle.add_json("analytic_stats.json", &all)?;
    Ok(bundle)
}

/// Runs a learning campaign with one fresh drop per frame.
pub fn learn_campaign(
    scn: &Scenario,
    options: &DetectorOptions,
    target_distance: f64,
    scheme: Scheme,
    blocks: &[usize],
    frames: usize,
) -> Result<(CampaignResult, u64)> {
    let resamples = AtomicU64::new(0);
    let settings = CampaignSettings {
        config: scn.frame.clone(),
        scheme,
        options: *options,
        blocks: blocks.to_vec(),
        frames,
        model: scn.config.measurement,
        seed: scn.config.seed,
    };
    let result = run_learning_campaign(
        |n| {
            let td = scn.sample_drop(target_distance, trial_drop_seed(scn.config.seed, n))?;
            resamples.fetch_add(td.resamples as u64, Ordering::Relaxed);
            Ok(td.drop)
        },
        &settings,
    )?;
    Ok((result, resamples.into_inner()))
}

#[derive(Debug, Clone, Serialize)]
pub struct LearnedRecord {
    pub target_distance: f64,
    pub scheme: Scheme,
    pub block: usize,
    pub frames: u64,
    pub mean: f64,
    pub variance: Option<f64>,
    pub analytic_mean: f64,
    pub analytic_variance: f64,
}

/// Learns the interference statistics online and traces the recursions
/// against the analytic values.
pub fn cmd_learn(cfg: &ExperimentConfig) -> Result<ResultBundle> {
    let scn = Scenario::new(cfg)?;
    let options = scn.detector_options()?;
    let hash = cfg.hash();
    let mut bundle = ResultBundle::new("learn", cfg);
    let mut trace = String::from("config_hash,target_distance,scheme,n,block,mean,variance\n");
    let mut learned = Vec::new();
    for &r in &cfg.target_distances {
        for scheme in cfg.mode.schemes() {
            let (result, resamples) = learn_campaign(&scn, &options, r, scheme, &cfg.learn_blocks, cfg.trials)?;
            bundle.count_drops(cfg.trials as u64, resamples);
            for row in &result.trace {
                let _ = writeln!(trace, "{hash},{r},{},{}", scheme.as_str(), row.csv());
            }
            for (j, &b) in result.blocks.iter().enumerate() {
                let reference = scn.analytic_stats(r, b, scheme, VarianceForm::Campbell)?;
                let l = &result.learners[j];
                learned.push(LearnedRecord {
                    target_distance: r,
                    scheme,
                    block: b,
                    frames: l.count(),
                    mean: l.mean().unwrap_or(f64::NAN),
                    variance: l.variance().ok(),
                    analytic_mean: reference.mean,
                    analytic_variance: reference.variance,
                });
            }
        }
    }
    bundle.add("learning_trace.csv", trace);
    bundle.add_json("learned_stats.json", &learned)?;
    Ok(bundle)
}

/// Outage-constrained rate plan, optionally validated on fresh drops.
pub fn cmd_adapt(cfg: &ExperimentConfig, validate: bool) -> Result<ResultBundle> {
    let scn = Scenario::new(cfg)?;
    let options = scn.detector_options()?;
    let hash = cfg.hash();
    let blocks: Vec<usize> = (1..=scn.frame.num_blocks()).collect();
    let form = cfg.variance.forms()[0];
    let source = match cfg.adapt_stats {
        StatsSource::Analytic => format!("analytic_{}", form_name(form)),
        StatsSource::Learned => "learned".to_string(),
    };
    let mut bundle = ResultBundle::new("adapt", cfg);
    let mut plan = String::from(
        "config_hash,target_distance,scheme,block,epsilon,source,mean,variance,set_size,l_dagger,threshold_db,rate\n",
    );
    let mut validation = String::from(
        "config_hash,target_distance,scheme,block,epsilon,source,drops,outages,outage_rate\n",
    );
    let schemes = cfg.mode.schemes();
    for &r in &cfg.target_distances {
        // stats[scheme][block]
        let mut stats: Vec<Vec<SinrStats>> = Vec::new();
        for &scheme in &schemes {
            let per_block = match cfg.adapt_stats {
                StatsSource::Analytic => blocks
                    .iter()
                    .map(|&b| scn.analytic_stats(r, b, scheme, form))
                    .collect::<Result<Vec<_>>>()?,
                StatsSource::Learned => {
                    let (result, resamples) = learn_campaign(&scn, &options, r, scheme, &blocks, cfg.trials)?;
                    bundle.count_drops(cfg.trials as u64, resamples);
                    result.stats()?
                }
            };
            for s in &per_block {
                let set_size = scn.expected_set_size(s.block, scheme);
                let l_dagger = scn.frame.dagger_len(s.block, scheme);
                let e = rate_threshold(s, cfg.epsilon, set_size, l_dagger as f64)?;
                let _ = writeln!(
                    plan,
                    "{hash},{r},{},{},{},{source},{:e},{:e},{set_size:.6},{l_dagger},{:.6},{:.6}",
                    scheme.as_str(),
                    s.block,
                    cfg.epsilon,
                    s.mean,
                    s.variance,
                    db(e.threshold),
                    e.rate
                );
            }
            stats.push(per_block);
        }
        if validate {
            let outages = validate_outage(&scn, r, &schemes, &stats, cfg.epsilon, cfg.validation_trials)?;
            bundle.count_drops(cfg.validation_trials as u64, outages.resamples);
            for (s, &scheme) in schemes.iter().enumerate() {
                for (j, &b) in blocks.iter().enumerate() {
                    let k = outages.counts[s][j];
                    let n = cfg.validation_trials;
                    let _ = writeln!(
                        validation,
                        "{hash},{r},{},{b},{},{source},{n},{k},{:.6}",
                        scheme.as_str(),
                        cfg.epsilon,
                        k as f64 / n as f64
                    );
                }
            }
        }
    }
    bundle.add("rate_plan.csv", plan);
    if validate {
        bundle.add("outage_validation.csv", validation);
    }
    Ok(bundle)
}

/// Outage counts of a rate plan over fresh drops.
#[derive(Debug, Clone)]
pub struct OutageCounts {
    /// `counts[scheme][block]`.
    pub counts: Vec<Vec<usize>>,
    pub resamples: u64,
}

/// Counts drops whose large-system SINR falls below the planned threshold.
///
/// With the threshold built from the drop's own `|Φ†|`, `γ < T` reduces to
/// the interference functional exceeding `Q^-1(eps) sqrt(V) + M`.
pub fn validate_outage(
    scn: &Scenario,
    target_distance: f64,
    schemes: &[Scheme],
    stats: &[Vec<SinrStats>],
    epsilon: f64,
    drops: usize,
) -> Result<OutageCounts> {
    let z = q_inverse(epsilon)?;
    let levels: Vec<Vec<f64>> = stats
        .iter()
        .map(|row| row.iter().map(|s| z * s.variance.max(0.0).sqrt() + s.mean).collect())
        .collect();
    let per_drop = (0..drops as u64)
        .into_par_iter()
        .map(|t| -> Result<(Vec<Vec<bool>>, usize)> {
            let seed = child_seed(scn.config.seed, Purpose::Validation, t);
            let td = scn.sample_drop(target_distance, seed)?;
            let rho = td.drop.rho_target(td.drop.target_user().unwrap_or(0));
            let hits = schemes
                .iter()
                .zip(stats)
                .zip(&levels)
                .map(|((&scheme, row), lv)| {
                    row.iter()
                        .zip(lv)
                        .map(|(s, &level)| {
                            let terms = lemma_terms(rho, &td.drop, &scn.frame, s.block, scheme);
                            terms.functional > level
                        })
                        .collect()
                })
                .collect();
            Ok((hits, td.resamples))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts: Vec<Vec<usize>> = stats.iter().map(|row| vec![0; row.len()]).collect();
    let mut resamples = 0;
    for (hits, r) in &per_drop {
        resamples += *r as u64;
        for (c, h) in counts.iter_mut().zip(hits) {
            for (ci, &hi) in c.iter_mut().zip(h) {
                *ci += hi as usize;
            }
        }
    }
    Ok(OutageCounts { counts, resamples })
}

/// Extends the statistics of a user triple to the configured gains.
pub fn cmd_extrapolate(cfg: &ExperimentConfig) -> Result<ResultBundle> {
    let scn = Scenario::new(cfg)?;
    let path = cfg
        .triple_file
        .as_ref()
        .ok_or_else(|| Error::Config("extrapolate needs triple_file".into()))?;
    let triple: UserStatsTriple = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    triple.validate()?;
    if cfg.extrapolate_rho.is_empty() {
        return Err(Error::Config("extrapolate needs at least one extrapolate_rho".into()));
    }
    let hash = cfg.hash();
    let mut bundle = ResultBundle::new("extrapolate", cfg);
    let mut table = String::from("config_hash,cell,block,rho,mean,variance\n");
    let mut out = Vec::new();
    for &rho in &cfg.extrapolate_rho {
        let s = extrapolate_stats(&triple, rho, &scn.frame, cfg.extrapolate_block)?;
        let _ = writeln!(table, "{hash},{},{},{rho:e},{:e},{:e}", triple.cell, s.block, s.mean, s.variance);
        out.push(s);
    }
    bundle.add("extrapolated_stats.csv", table);
    bundle.add_json("extrapolated_stats.json", &out)?;
    Ok(bundle)
}
