//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line
//! before asserting.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use common::{co_direct, e_in_direct, estimates, identity, instance, inv, q_in_direct, scaled, settings, Moments, TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uplink_adapt::analysis::{
    asymptotic_sinr, interference_stats, ks_distance, sinr_cdf, SinrStats, VarianceForm,
};
use uplink_adapt::channel::{build_pilot_book, sample_channels, FrameConfig, Scheme};
use uplink_adapt::detector::{
    cooperative_estimator, detect_block_co, detect_block_in, in_cell_estimator, run_frame_on, DetectorOptions,
};
use uplink_adapt::geometry::{
    build_hex_layout, hex_area, sample_user_drop, DensityMap, Point, RegionMode, RegionSpec, UserDrop,
};
use uplink_adapt::harness::{
    cmd_simulate, learn_campaign, median, run_trials, validate_outage, ExperimentConfig, Scenario,
};
use uplink_adapt::learning::{extrapolate_stats, CampaignResult, UserStat, UserStatsTriple};
use uplink_adapt::linalg::{hermitian_defect, min_eigenvalue, relative_distance, C64};

fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion} [{name}]: {verdict} ({detail})");
}

fn default_scenario() -> Scenario {
    Scenario::new(&ExperimentConfig::default()).unwrap()
}

#[test]
fn criterion_1_analytic_cdf_fits_large_system_sinr() {
    let start = Instant::now();
    let scn = default_scenario();
    let block = 5;
    let scheme = Scheme::Proposed;
    let set_size = scn.expected_set_size(block, scheme);
    let l_dagger = scn.frame.dagger_len(block, scheme) as f64;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for r in [100.0, 300.0, 400.0] {
        let stats = scn.analytic_stats(r, block, scheme, VarianceForm::Campbell).unwrap();
        let samples: Vec<f64> = (0..500)
            .map(|t| {
                let d = scn.sample_drop(r, uplink_adapt::harness::trial_drop_seed(scn.config.seed, t)).unwrap().drop;
                asymptotic_sinr(d.rho_target(0), &d, &scn.frame, block, scheme).value
            })
            .collect();
        let ks = ks_distance(&samples, |g| sinr_cdf(g, &stats, set_size, l_dagger));
        parts.push(format!("r={r}: KS={ks:.4}"));
        worst = worst.max(ks);
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 0.05 && secs <= 600.0;
    report(1, "analytic CDF vs sampled SINR", pass, &format!("{}, {secs:.1} s", parts.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_2_cooperation_dominates_and_gains_grow_toward_the_edge() {
    let mut cfg = ExperimentConfig::default();
    cfg.delay = 1;
    let scn = Scenario::new(&cfg).unwrap();
    let opts = scn.detector_options().unwrap();
    let grid = cfg.cdf_grid();
    let schemes = [Scheme::Proposed, Scheme::Baseline];
    let mut dominance_gap: f64 = f64::NEG_INFINITY;
    let mut gains = Vec::new();
    for r in [100.0, 400.0] {
        let out = run_trials(&scn, &opts, r, &schemes, 500).unwrap();
        for b in 2..=scn.frame.num_blocks() {
            let sinr = |s: usize| -> Vec<f64> { out.iter().map(|o| o.runs[s].records[b - 1].sinr_db()).collect() };
            let (p, q) = (sinr(0), sinr(1));
            for &t in &grid {
                let fp = p.iter().filter(|&&v| v < t).count() as f64 / p.len() as f64;
                let fq = q.iter().filter(|&&v| v < t).count() as f64 / q.len() as f64;
                dominance_gap = dominance_gap.max(fp - fq);
            }
        }
        let paired: Vec<f64> = out
            .iter()
            .map(|o| o.runs[0].records[2].sinr_db() - o.runs[1].records[2].sinr_db())
            .collect();
        gains.push(median(&paired));
    }
    let (center, edge) = (gains[0], gains[1]);
    let pass = dominance_gap <= 0.01 && edge > center && edge >= 2.0 && center >= 0.3;
    report(
        2,
        "cooperative gain ordering",
        pass,
        &format!("max CDF excess {dominance_gap:.4}, block-3 median gain {center:.2} dB at 100 m, {edge:.2} dB at 400 m"),
    );
    assert!(pass);
}

const LEARN_FRAMES: usize = 2000;
const LEARN_DISTANCE: f64 = 50.0;

/// One learning campaign at the near user, shared by the convergence and
/// closed-loop outage checks.
fn learned_campaign() -> &'static (Scenario, CampaignResult) {
    static CAMPAIGN: OnceLock<(Scenario, CampaignResult)> = OnceLock::new();
    CAMPAIGN.get_or_init(|| {
        let scn = default_scenario();
        let opts = scn.detector_options().unwrap();
        let (res, _) = learn_campaign(&scn, &opts, LEARN_DISTANCE, Scheme::Proposed, &[5], LEARN_FRAMES).unwrap();
        (scn, res)
    })
}

#[test]
fn criterion_3_learner_converges_to_the_analytic_statistics() {
    let (scn, res) = learned_campaign();
    let analytic = scn.analytic_stats(LEARN_DISTANCE, 5, Scheme::Proposed, VarianceForm::Campbell).unwrap();
    let at = |n: u64| res.trace.iter().find(|row| row.n == n).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, tol_m, tol_v) in [(200, 0.10, 0.25), (LEARN_FRAMES as u64, 0.03, 0.10)] {
        let row = at(n);
        let em = row.mean / analytic.mean - 1.0;
        let ev = row.variance.unwrap() / analytic.variance - 1.0;
        pass &= em.abs() <= tol_m && ev.abs() <= tol_v;
        parts.push(format!("n={n}: mean {:+.2}%, variance {:+.2}%", 100.0 * em, 100.0 * ev));
    }
    report(3, "learner convergence", pass, &parts.join(", "));
    assert!(pass);
}

fn model_user(index: usize, rho: f64, coef: &[f64; 5], m: f64, l: f64) -> UserStat {
    let (mean, variance) = model_stats(rho, coef, m, l);
    UserStat { index, rho, mean, variance }
}

fn model_stats(rho: f64, coef: &[f64; 5], m: f64, l: f64) -> (f64, f64) {
    let t = 1.0 / rho;
    let mean = coef[0] * t / m + coef[1] * t * t / l;
    let second = coef[2] * t * t + coef[3] * t.powi(3) + coef[4] * t.powi(4);
    (mean, second - mean * mean)
}

#[test]
fn criterion_4_extrapolation_is_exact_on_model_data() {
    let cfg = FrameConfig::default();
    let (m, l) = (cfg.antennas as f64, cfg.dagger_len(5, Scheme::Proposed) as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut accepted = 0;
    let mut skipped = 0;
    while accepted < 1000 {
        let base: f64 = 10f64.powf(rng.random_range(-10.0..-6.0));
        let rhos = [0; 3].map(|_| base * 10f64.powf(rng.random_range(0.0..1.5)));
        // coefficients of order one in units of the smallest gain
        let s = 1.0 / base;
        let coef = [1.0, 2.0, 2.0, 3.0, 4.0].map(|p: f64| rng.random_range(0.1..10.0) / s.powf(p));
        let users = [0, 1, 2].map(|i| model_user(i, rhos[i], &coef, m, l));
        let triple = UserStatsTriple { cell: 1, users };
        if triple.condition_number() > 1e8 {
            skipped += 1;
            continue;
        }
        accepted += 1;
        let target = base * 10f64.powf(rng.random_range(0.0..1.5));
        let got = extrapolate_stats(&triple, target, &cfg, 5).unwrap();
        let (mean, var) = model_stats(target, &coef, m, l);
        worst = worst.max((got.mean / mean - 1.0).abs());
        worst = worst.max((got.variance - var).abs() / var.abs().max(mean * mean));
        for u in triple.users {
            let echo = extrapolate_stats(&triple, u.rho, &cfg, 5).unwrap();
            worst = worst.max((echo.mean / u.mean - 1.0).abs());
            worst = worst.max((echo.variance - u.variance).abs() / u.variance.abs().max(u.mean * u.mean));
        }
    }
    let pass = worst <= 1e-9;
    report(4, "extrapolation exactness", pass, &format!("worst relative error {worst:.2e} over {accepted} sets, {skipped} ill-conditioned skipped"));
    assert!(pass);
}

fn outage_rate(scn: &Scenario, r: f64, scheme: Scheme, stats: Vec<SinrStats>, drops: usize) -> Vec<f64> {
    let counts = validate_outage(scn, r, &[scheme], &[stats], 0.05, drops).unwrap();
    counts.counts[0].iter().map(|&k| k as f64 / drops as f64).collect()
}

#[test]
fn criterion_5_planned_rates_meet_the_outage_target() {
    let drops = 2000;
    let scn = default_scenario();
    let r = 100.0;
    let mut analytic = Vec::new();
    for scheme in [Scheme::Proposed, Scheme::Baseline] {
        let stats = (1..=scn.frame.num_blocks())
            .map(|b| scn.analytic_stats(r, b, scheme, VarianceForm::Campbell).unwrap())
            .collect();
        analytic.extend(outage_rate(&scn, r, scheme, stats, drops));
    }
    let (lo, hi) = analytic.iter().fold((1.0f64, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));

    let (lscn, res) = learned_campaign();
    let learned = outage_rate(lscn, LEARN_DISTANCE, Scheme::Proposed, res.stats().unwrap(), drops)[0];

    let pass = lo >= 0.03 && hi <= 0.07 && (0.025..=0.08).contains(&learned);
    report(
        5,
        "closed-loop outage",
        pass,
        &format!("analytic stats at {r} m: outage in [{lo:.4}, {hi:.4}]; learned stats at {LEARN_DISTANCE} m, block 5: {learned:.4}"),
    );
    assert!(pass);
}

/// Target at 100 m in an otherwise empty cell and one interferer in each of
/// cells 1 to 5.
fn planted_drop() -> UserDrop {
    let layout = build_hex_layout(500.0, 1).unwrap();
    let mut positions = vec![Point::new(100.0, 0.0)];
    for c in 1..=5 {
        let bs = layout.bs_positions()[c];
        positions.push(Point::new(0.8 * bs.x, 0.8 * bs.y));
    }
    let n = positions.len();
    UserDrop::from_parts(&layout, &positions, &vec![vec![0.0; layout.num_cells()]; n], 3.76).unwrap()
}

#[test]
fn criterion_6_detector_approaches_the_large_system_limit() {
    let drop = planted_drop();
    let scheme = Scheme::Baseline;
    let block = 5;
    let mut medians = Vec::new();
    let mut l_dagger = 0;
    for m in [64, 128, 256] {
        let cfg = FrameConfig {
            antennas: m,
            ..FrameConfig::default()
        };
        l_dagger = cfg.dagger_len(block, scheme);
        let lemma = asymptotic_sinr(drop.rho_target(0), &drop, &cfg, block, scheme).value;
        let errs: Vec<f64> = (0..200u64)
            .map(|s| {
                let real = sample_channels(&cfg, &drop, s).unwrap();
                let rec = run_frame_on(&real, &drop, &cfg, scheme, &DetectorOptions::default(), s).unwrap();
                (rec[block - 1].sinr / lemma - 1.0).abs()
            })
            .collect();
        medians.push(median(&errs));
    }
    let pass = medians[0] > medians[1] && medians[1] > medians[2] && medians[2] <= 0.25 && l_dagger >= 431;
    report(
        6,
        "asymptotic consistency",
        pass,
        &format!(
            "median relative gap {:.4} / {:.4} / {:.4} at M = 64 / 128 / 256, L = {l_dagger}",
            medians[0], medians[1], medians[2]
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_estimators_match_direct_inverses() {
    let mut worst: f64 = 0.0;
    let mut pd = true;
    for seed in 0..256 {
        let t = instance(seed);
        let inc = in_cell_estimator(&t.x_in, &t.rho_in, t.load, t.m).unwrap();
        worst = worst.max(relative_distance(&inc.q, &q_in_direct(&t.x_in, &t.rho_in, t.load, t.m)));
        worst = worst.max(relative_distance(&inc.error_cov, &e_in_direct(&t.x_in, &t.rho_in, t.load, t.m)));
        let x1 = t.x_in.columns(0, t.len_co).into_owned();
        let co = cooperative_estimator(&t.x_co, &t.rho_co, &x1, &inc, t.residual_load, t.m).unwrap();
        let (q, e) = co_direct(&t, &inc.error_cov);
        worst = worst.max(relative_distance(&co.q, &q)).max(relative_distance(&co.error_cov, &e));

        let k_in = t.rho_in.len();
        let k_co = t.rho_co.len();
        let (h_in, y) = estimates(seed, t.m, k_in);
        let (h_co, _) = estimates(seed + 7777, t.m, k_co);
        let (outside, noise) = (t.load, 0.01);
        let (_, c_in) = detect_block_in(&h_in, &inc.delta, outside, noise, &y).unwrap();
        let (_, c_co) = detect_block_co(&h_in, &h_co, &inc.delta, &co.delta, outside, noise, &y).unwrap();
        let a_in = outside + inc.delta.iter().sum::<f64>() + noise;
        let a_co = a_in + co.delta.iter().sum::<f64>();
        let psi_in = inv(&(&h_in * h_in.adjoint() + scaled(identity(t.m), a_in)));
        let psi_co = inv(&(&h_in * h_in.adjoint() + &h_co * h_co.adjoint() + scaled(identity(t.m), a_co)));
        worst = worst.max(relative_distance(&c_in.psi(), &psi_in)).max(relative_distance(&c_co.psi(), &psi_co));
        for psi in [c_in.psi(), c_co.psi()] {
            let sym = (&psi + psi.adjoint()) * C64::new(0.5, 0.0);
            pd &= hermitian_defect(&psi) <= 1e-12 && min_eigenvalue(&sym) > 0.0;
        }
    }
    let pass = worst <= TOL && pd;
    report(7, "estimator oracles", pass, &format!("worst relative deviation {worst:.2e} over 256 instances, combiners Hermitian PD: {pd}"));
    assert!(pass);
}

#[test]
fn criterion_8_infrastructure_properties() {
    let layout = build_hex_layout(500.0, 2).unwrap();
    let density = DensityMap::per_cell_mean(10.0, 500.0).unwrap();
    let cfg = FrameConfig::default();

    let mut pilot_defect: f64 = 0.0;
    for s in 0..10 {
        let d = sample_user_drop(&layout, &density, &settings(31), s).unwrap();
        let cells: Vec<usize> = d.users().iter().map(|u| u.cell).collect();
        pilot_defect = pilot_defect.max(build_pilot_book(&cfg, &d).unwrap().correlation_defect(&cells));
    }

    let counts: Vec<f64> = (0..3000)
        .map(|s| sample_user_drop(&layout, &density, &settings(10_000), s).unwrap().num_users() as f64)
        .collect();
    let m = Moments::of(&counts);
    let r = layout.bounding_radius();
    let expect = 10.0 / hex_area(500.0) * std::f64::consts::PI * r * r;
    let poisson = (m.mean() - expect).abs() <= 3.0 * m.mean_se() && (m.var() - expect).abs() <= 3.0 * m.var_se();

    let (lambda, sigma, rho11, r_co, r_max) = (3e-5, 3.76, 1e-7, 700.0, 2500.0);
    let mut flat = FrameConfig::default();
    flat.shadowing_db = 0.0;
    let region = RegionSpec::new(500.0, RegionMode::OutsideRadius { r_co }, r_max).unwrap();
    let s = interference_stats(
        rho11,
        &DensityMap::constant(lambda).unwrap(),
        &region,
        &flat,
        5,
        Scheme::Proposed,
        VarianceForm::Campbell,
    )
    .unwrap();
    let ring = |p: f64| 2.0 * std::f64::consts::PI * lambda * (r_co.powf(2.0 - p) - r_max.powf(2.0 - p)) / (p - 2.0);
    let (c1, c2) = (1.0 / (flat.antennas as f64 * rho11), 1.0 / (331.0 * rho11 * rho11));
    let mean = c1 * ring(sigma) + c2 * ring(2.0 * sigma);
    let var = c1 * c1 * ring(2.0 * sigma) + 2.0 * c1 * c2 * ring(3.0 * sigma) + c2 * c2 * ring(4.0 * sigma);
    let quad = (s.mean / mean - 1.0).abs().max((s.variance / var - 1.0).abs());

    let mut small = ExperimentConfig::default();
    small.antennas = 32;
    small.trials = 6;
    small.target_distances = vec![150.0];
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| cmd_simulate(&small).unwrap())
    };
    let (a, b, c) = (run(1), run(4), run(4));
    let same = |x: &uplink_adapt::harness::ResultBundle, y: &uplink_adapt::harness::ResultBundle| {
        x.files().eq(y.files()) && x.manifest_json().unwrap() == y.manifest_json().unwrap()
    };
    let identical = same(&a, &b) && same(&b, &c);

    let pass = pilot_defect <= 1e-9 && poisson && quad <= 1e-8 && identical;
    report(
        8,
        "infrastructure",
        pass,
        &format!(
            "pilot defect {pilot_defect:.1e}, drop count mean {:.2} var {:.2} vs {expect:.2}, quadrature error {quad:.1e}, identical reruns: {identical}",
            m.mean(),
            m.var()
        ),
    );
    assert!(pass);
}
