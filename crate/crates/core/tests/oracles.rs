use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scansim::capacity::{binary_entropy, info_rate, noisy_factor, optimize_beta, ButtonModel};
use scansim::chain::{build_fast, build_slow, Terminal};
use scansim::experiment::{
    phrase_prediction, run_sweep, split_phrase, to_csv, validate, EngineSelection, ExperimentSpec, ParamSet,
    Perturbation, SweepParam, SweepSpec, PANGRAM,
};
use scansim::layout::{min_scans, FastParams, GridLayout, ScanMode, ScanTiming};
use scansim::montecarlo::{
    compare, histogram, run_phrase, run_word, sample_word_runs, McConfig,
};
use scansim::noise::{
    cell_mean, sample_events, sample_false_positives, Aim, ClickTiming, GaussianMixture, MixtureComponent,
    NoiseParams, SwitchNoise,
};
use scansim::pmf::{analyze, moments, Pmf};

fn table_regime() -> NoiseParams {
    NoiseParams {
        click_timing: ClickTiming::gaussian(0.1, 0.3).unwrap(),
        switch_noise: SwitchNoise { f: 0.1, lambda: 0.01 },
        ..NoiseParams::default()
    }
}

#[test]
fn layout_fixtures_place_symbols() {
    let g = GridLayout::grid_2x2();
    assert_eq!(g.locate('a').unwrap(), (1, 1));
    assert_eq!(g.locate(g.delete_symbol()).unwrap(), (2, 2));
    let a = GridLayout::alphabet();
    let (row, _) = a.locate('h').unwrap();
    assert_eq!(a.rows()[row - 1], vec!['e', 'f', 'g', 'h', '.']);
    assert_eq!(min_scans("standing_", &a, ScanMode::Slow, 1).unwrap(), 77);
}

#[test]
fn noiseless_word_is_a_point_mass() {
    let layout = GridLayout::grid_2x2();
    let params = NoiseParams::noiseless(1.0);
    let slow = analyze(&build_slow("a_", &layout, &params).unwrap());
    assert!(slow.scans.is_point_mass_at(9));
    assert!(slow.clicks.is_point_mass_at(4));
    assert!(slow.errors.is_point_mass_at(0));
    assert_eq!(slow.outcome.p_correct, 1.0);
    let fast = analyze(&build_fast("a_", &layout, &FastParams::new(params.clone(), 0.5).unwrap()).unwrap());
    assert!(fast.scans.is_point_mass_at(12));
    assert!(fast.time_units.is_point_mass_at(16));
    assert_eq!(fast.unit_delay, 0.5);

    for seed in 0..20 {
        let log = run_word("a_", &layout, &McConfig::slow(params.clone()), seed).unwrap();
        assert_eq!((log.totals.scans, log.totals.clicks, log.totals.errors), (9, 4, 0));
        let log = run_word("a_", &layout, &McConfig::fast(params.clone(), 0.5), seed).unwrap();
        assert_eq!((log.totals.scans, log.totals.time_units), (12, 16));
        assert_eq!(log.outcome, Terminal::Correct);
    }
}

#[test]
fn noiseless_pangram_rates_agree_exactly() {
    let layout = GridLayout::alphabet();
    let words = split_phrase(PANGRAM, &layout).unwrap();
    let params = NoiseParams::noiseless(1.0);
    let per_word: Vec<_> = words.iter().map(|w| moments(&build_slow(w, &layout, &params).unwrap())).collect();
    let analytic = phrase_prediction(&per_word).unwrap();
    let mc = run_phrase(&words, &layout, &McConfig::slow(params), &[1, 2, 3]).unwrap();
    assert_eq!(mc.wpm.value, analytic.wpm);
    assert_eq!(mc.cpc.value, 2.0);
    assert_eq!(analytic.cer, 0.0);
}

#[test]
fn single_seed_phrase_equals_word_log() {
    let layout = GridLayout::grid_2x2();
    let config = McConfig::slow(table_regime());
    let words = vec!["at_".to_string()];
    let stats = run_phrase(&words, &layout, &config, &[42]).unwrap();
    let log = run_word("at_", &layout, &config, scansim::montecarlo::derive_seed(42, 0)).unwrap();
    assert_eq!(stats.cpc.value * 3.0, log.totals.clicks as f64);
    assert_eq!(stats.cer.value * 3.0, log.totals.errors as f64);
    assert!((stats.mean_seconds - log.seconds()).abs() < 1e-12);
}

#[test]
fn table_regime_outcomes_match_simulation() {
    let layout = GridLayout::grid_2x2();
    let params = table_regime();
    let a = analyze(&build_slow("a_", &layout, &params).unwrap());
    let runs = sample_word_runs("a_", &layout, &McConfig::slow(params), 9, 100_000).unwrap();
    let n = runs.len() as f64;
    for t in [Terminal::Correct, Terminal::Error, Terminal::Failure] {
        let p = a.outcome.get(t);
        let freq = runs.iter().filter(|r| r.0 == t).count() as f64 / n;
        let se = (p * (1.0 - p) / n).sqrt();
        assert!((freq - p).abs() <= 3.0 * se, "{t:?}: {freq} vs {p}");
    }
    for (hist, pmf) in [
        (histogram(runs.iter().map(|r| r.1.scans)), &a.scans),
        (histogram(runs.iter().map(|r| r.1.time_units)), &a.time_units),
        (histogram(runs.iter().map(|r| r.1.clicks)), &a.clicks),
        (histogram(runs.iter().map(|r| r.1.errors)), &a.errors),
    ] {
        let r = compare(&hist, pmf).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn bimodal_timing_matches_simulation() {
    let layout = GridLayout::grid_2x2();
    let mixture = GaussianMixture::new(vec![
        MixtureComponent { weight: 0.7, offset: -0.1, sigma: 0.12 },
        MixtureComponent { weight: 0.3, offset: 0.35, sigma: 0.2 },
    ])
    .unwrap();
    let params = NoiseParams {
        click_timing: ClickTiming::with_density(0.05, Arc::new(mixture)).unwrap(),
        switch_noise: SwitchNoise { f: 0.05, lambda: 0.02 },
        ..NoiseParams::default()
    };
    let a = analyze(&build_slow("ta_", &layout, &params).unwrap());
    let runs = sample_word_runs("ta_", &layout, &McConfig::slow(params), 3, 100_000).unwrap();
    for (hist, pmf) in [
        (histogram(runs.iter().map(|r| r.1.scans)), &a.scans),
        (histogram(runs.iter().map(|r| r.1.clicks)), &a.clicks),
        (histogram(runs.iter().map(|r| r.1.errors)), &a.errors),
    ] {
        assert!(compare(&hist, pmf).unwrap().pass);
    }
}

#[test]
fn fast_scan_matches_simulation() {
    let layout = GridLayout::alphabet();
    let params = NoiseParams {
        click_timing: ClickTiming::gaussian(0.3, 0.15).unwrap(),
        switch_noise: SwitchNoise { f: 0.1, lambda: 0.0 },
        t_scan: 0.8,
        ..NoiseParams::default()
    };
    let a = analyze(&build_fast("ok.", &layout, &FastParams::new(params.clone(), 0.3).unwrap()).unwrap());
    let runs = sample_word_runs("ok.", &layout, &McConfig::fast(params, 0.3), 21, 100_000).unwrap();
    for (hist, pmf) in [
        (histogram(runs.iter().map(|r| r.1.scans)), &a.scans),
        (histogram(runs.iter().map(|r| r.1.time_units)), &a.time_units),
        (histogram(runs.iter().map(|r| r.1.clicks)), &a.clicks),
        (histogram(runs.iter().map(|r| r.1.errors)), &a.errors),
    ] {
        assert!(compare(&hist, pmf).unwrap().pass);
    }
}

#[test]
fn poisson_false_positive_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 100_000;
    let total: usize = (0..n).map(|_| sample_false_positives(2.0, 10.0, &mut rng).len()).sum();
    let mean = total as f64 / n as f64;
    // Poisson(20): standard error of the mean is sqrt(20 / n).
    assert!((mean - 20.0).abs() <= 3.0 * (20.0 / n as f64).sqrt(), "{mean}");
}

#[test]
fn true_click_times_centre_on_cell_mean() {
    let params = NoiseParams { click_timing: ClickTiming::gaussian(0.2, 0.15).unwrap(), ..NoiseParams::default() };
    let windows = ScanTiming::slow(1.0, true).schedule(4).windows();
    let n = 100_000u64;
    let mut sum = 0.0;
    for seed in 0..n {
        let events = sample_events(Aim::Cell(3), &params, &windows, seed).unwrap();
        assert_eq!(events.len(), 1);
        sum += events[0];
    }
    let mean = sum / n as f64;
    let target = cell_mean(3, &windows, 0.2).unwrap();
    assert!((mean - target).abs() <= 3.0 * 0.15 / (n as f64).sqrt());
}

#[test]
fn compare_detects_shifts() {
    let pmf = Pmf::new(vec![0.0, 0.2, 0.5, 0.3]).unwrap();
    let exact: Vec<u64> = vec![0, 200_000, 500_000, 300_000];
    assert!(compare(&exact, &pmf).unwrap().pass);
    let mut shifted = vec![0];
    shifted.extend(&exact);
    let r = compare(&shifted, &pmf).unwrap();
    assert!(!r.pass);
    assert!(r.impossible > 0);
    let point = compare(&[0, 0, 50], &Pmf::point_mass(2)).unwrap();
    assert!(point.pass);
    assert_eq!(point.max_abs_z, 0.0);
    assert!(compare(&[], &pmf).is_err());
}

fn validation_spec() -> ExperimentSpec {
    ExperimentSpec::from_toml_str(
        r#"
        layout = "grid_2x2"
        phrase = "a_"
        engine = "both"
        runs = 100000
        seed = 4
        [fixed]
        delta = 0.1
        sigma = 0.3
        f = 0.1
        lambda = 0.01
        "#,
    )
    .unwrap()
}

#[test]
fn validation_passes_and_catches_sabotage() {
    let mut spec = validation_spec();
    spec.phrase = "a_ at_".into();
    spec.sweep = Some(SweepSpec { param: SweepParam::Lambda, start: 0.0, stop: 0.02, step: 0.01, descending: false });
    let layout = GridLayout::grid_2x2();
    let ok = validate(&spec, &layout, Perturbation::default()).unwrap();
    assert!(ok.pass, "{}", ok.render());
    let bad = validate(&spec, &layout, Perturbation { scan_offset: 1 }).unwrap();
    assert!(!bad.pass);
    assert!(bad.checks.iter().any(|c| c.report.impossible > 0));
    assert!(bad.render().contains("FAIL"));
}

#[test]
fn sweeps_are_deterministic_and_ordered() {
    let spec = ExperimentSpec::from_toml_str(
        r#"
        mode = "both"
        layout = "grid_2x2"
        phrase = "at_ a_"
        engine = "both"
        runs = 200
        seed = 7
        [sweep]
        param = "delta"
        start = 0.0
        stop = 0.3
        step = 0.1
        descending = true
        [fixed]
        sigma = 0.1
        f = 0.05
        t_fast = 0.5
        "#,
    )
    .unwrap();
    assert_eq!(spec.engine, EngineSelection::Both);
    let layout = GridLayout::grid_2x2();
    let rows = run_sweep(&spec, &layout).unwrap();
    assert_eq!(rows.len(), 4 * 2 * 2);
    assert!((rows[0].value.unwrap() - 0.3).abs() < 1e-12);
    assert!(rows.windows(2).all(|w| w[0].value >= w[1].value));
    let a = to_csv(&spec, &rows).unwrap();
    let b = to_csv(&spec, &run_sweep(&spec, &layout).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.lines().next().unwrap().starts_with('#'));
    assert!(a.contains(&format!("# spec-sha256: {}", spec.fingerprint())));
}

#[test]
fn fast_sweeps_with_false_positives_fall_back_to_simulation() {
    let mut spec = validation_spec();
    spec.mode = scansim::experiment::ModeSelection::Fast;
    spec.runs = 50;
    spec.fixed.t_fast = Some(0.5);
    let rows = run_sweep(&spec, &GridLayout::grid_2x2()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].wpm.is_none() && !rows[0].note.is_empty());
    assert!(rows[1].wpm.is_some());
    spec.engine = EngineSelection::Analytic;
    assert!(run_sweep(&spec, &GridLayout::grid_2x2()).is_err());
}

#[test]
fn capacity_matches_grid_search() {
    let (beta, b) = optimize_beta(0.0, 1.0).unwrap();
    assert!((beta - 0.5).abs() < 1e-6);
    assert!((b - 1.0).abs() < 1e-12);
    assert_eq!(b * noisy_factor(0.0).unwrap(), b);
    assert_eq!(noisy_factor(0.5).unwrap(), 0.0);
    let (beta, b) = optimize_beta(1.0, 0.1).unwrap();
    let (grid_beta, grid_b) = (1..10_000)
        .map(|i| {
            let x = i as f64 / 10_000.0;
            (x, binary_entropy(x) / (x + 0.1))
        })
        .fold((0.0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
    assert!(b >= grid_b);
    assert!((beta - grid_beta).abs() < 2e-4);
    assert!((info_rate(&ButtonModel::new(1.0, 0.1, beta).unwrap()) - b).abs() < 1e-15);
    let h = 1e-5;
    let slope = (info_rate(&ButtonModel::new(1.0, 0.1, beta + h).unwrap())
        - info_rate(&ButtonModel::new(1.0, 0.1, beta - h).unwrap()))
        / (2.0 * h);
    assert!(slope.abs() < 1e-6);
}

#[test]
fn sweep_parameters_reach_the_model() {
    let p = ParamSet { sigma_fraction: Some(1.0 / 6.0), t_scan: 0.6, ..ParamSet::default() };
    assert!((p.noise_params().unwrap().click_timing.sigma - 0.1).abs() < 1e-12);
}
