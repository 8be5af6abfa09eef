//! Parameter sweeps over a phrase, analytic and Monte Carlo, and the
//! analytic-versus-simulation validation report.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chain::{build_fast, build_slow, ScanChain, Terminal};
use crate::error::{Error, Result};
use crate::layout::{FastParams, GridLayout, ScanMode};
use crate::montecarlo::{
    compare, derive_seed, histogram, run_phrase, sample_word_runs, CompareReport, McConfig,
    PASS_FRACTION, RNG_ALGORITHM, Z_LIMIT,
};
use crate::noise::{ClickTiming, GaussianMixture, MixtureComponent, NoiseParams, SwitchNoise};
use crate::pmf::{analyze, moments, Pmf, WordMoments};

/// Serializable θ. Missing fields take the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamSet {
    pub delta: f64,
    pub sigma: f64,
    /// When set, σ = sigma_fraction × t_scan.
    pub sigma_fraction: Option<f64>,
    pub f: f64,
    pub lambda: f64,
    pub t_scan: f64,
    /// Fast-cell dwell time; defaults to t_scan.
    pub t_fast: Option<f64>,
    pub undo_window: usize,
    pub error_limit: usize,
    pub kappa: f64,
    /// Replaces the Gaussian click-time spread.
    pub mixture: Option<Vec<MixtureComponent>>,
}

impl Default for ParamSet {
    fn default() -> Self {
        Self {
            delta: 0.0,
            sigma: 0.1,
            sigma_fraction: None,
            f: 0.0,
            lambda: 0.0,
            t_scan: 1.0,
            t_fast: None,
            undo_window: 2,
            error_limit: 2,
            kappa: 10.0,
            mixture: None,
        }
    }
}

impl ParamSet {
    pub fn sigma_effective(&self) -> f64 {
        self.sigma_fraction.map_or(self.sigma, |frac| frac * self.t_scan)
    }

    pub fn t_fast_effective(&self) -> f64 {
        self.t_fast.unwrap_or(self.t_scan)
    }

    pub fn noise_params(&self) -> Result<NoiseParams> {
        let click_timing = match &self.mixture {
            None => ClickTiming::gaussian(self.delta, self.sigma_effective())?,
            Some(components) => {
                ClickTiming::with_density(self.delta, Arc::new(GaussianMixture::new(components.clone())?))?
            }
        };
        let params = NoiseParams {
            click_timing,
            switch_noise: SwitchNoise { f: self.f, lambda: self.lambda },
            t_scan: self.t_scan,
            undo_window: self.undo_window,
            error_limit: self.error_limit,
            kappa: self.kappa,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn mc_config(&self, mode: ScanMode) -> Result<McConfig> {
        let params = self.noise_params()?;
        Ok(match mode {
            ScanMode::Slow => McConfig::slow(params),
            ScanMode::Fast => McConfig::fast(params, self.t_fast_effective()),
        })
    }

    pub fn build_chain(&self, word: &str, layout: &GridLayout, mode: ScanMode) -> Result<ScanChain> {
        let params = self.noise_params()?;
        match mode {
            ScanMode::Slow => build_slow(word, layout, &params),
            ScanMode::Fast => build_fast(word, layout, &FastParams::new(params, self.t_fast_effective())?),
        }
    }

    fn set(&mut self, param: SweepParam, value: f64) {
        match param {
            SweepParam::Delta => self.delta = value,
            SweepParam::TScan => self.t_scan = value,
            SweepParam::Lambda => self.lambda = value,
            SweepParam::SigmaFraction => self.sigma_fraction = Some(value),
            SweepParam::TFast => self.t_fast = Some(value),
            SweepParam::Sigma => self.sigma = value,
            SweepParam::F => self.f = value,
        }
    }
}

/// Splits a phrase into words, each ending at a terminator. Spaces are
/// typed as `_`.
pub fn split_phrase(phrase: &str, layout: &GridLayout) -> Result<Vec<String>> {
    let text = crate::layout::normalize_text(phrase.trim());
    let mut words = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        cur.push(c);
        if layout.is_terminator(c) {
            words.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() || words.is_empty() {
        return Err(Error::InvalidWord {
            word: phrase.to_string(),
            reason: "phrase must end with a terminator".into(),
        });
    }
    Ok(words)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Delta,
    TScan,
    Lambda,
    SigmaFraction,
    TFast,
    Sigma,
    F,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Emit points from `stop` down to `start`.
    #[serde(default)]
    pub descending: bool,
}

impl SweepSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.step.is_nan() || self.step <= 0.0 || self.start.is_nan() || self.start > self.stop || self.stop.is_nan() {
            return Err(Error::Config(format!(
                "sweep needs start <= stop and step > 0 (got {}..{} step {})",
                self.start, self.stop, self.step
            )));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        let mut v: Vec<f64> = (0..=n).map(|i| self.start + i as f64 * self.step).collect();
        if self.descending {
            v.reverse();
        }
        Ok(v)
    }
}

/// How T_S follows the click-time parameters at each sweep point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayRule {
    #[default]
    Fixed,
    /// T_S = max(0.5, Δ + 3σ).
    AdaptivePlus,
    /// T_S = Δ − 3σ.
    AdaptiveMinus,
    /// T_S = Δ.
    EqualDelta,
}

impl DelayRule {
    pub fn apply(&self, p: &mut ParamSet) -> Result<()> {
        let sigma = p.sigma_effective();
        match self {
            DelayRule::Fixed => {}
            DelayRule::AdaptivePlus => p.t_scan = (p.delta + 3.0 * sigma).max(0.5),
            DelayRule::AdaptiveMinus => {
                if p.delta <= 3.0 * sigma {
                    return Err(Error::Config(format!(
                        "adaptive_minus needs delta > 3 sigma (delta = {}, sigma = {sigma})",
                        p.delta
                    )));
                }
                p.t_scan = p.delta - 3.0 * sigma;
            }
            DelayRule::EqualDelta => {
                if p.delta <= 0.0 {
                    return Err(Error::Config("equal_delta needs delta > 0".into()));
                }
                p.t_scan = p.delta;
            }
        }
        if p.sigma_fraction.is_some() && *self != DelayRule::Fixed {
            return Err(Error::Config("sigma_fraction requires the fixed delay rule".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSelection {
    #[default]
    Slow,
    Fast,
    Both,
}

impl ModeSelection {
    pub fn modes(&self) -> Vec<ScanMode> {
        match self {
            ModeSelection::Slow => vec![ScanMode::Slow],
            ModeSelection::Fast => vec![ScanMode::Fast],
            ModeSelection::Both => vec![ScanMode::Slow, ScanMode::Fast],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineSelection {
    #[default]
    Analytic,
    Montecarlo,
    Both,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Analytic,
    Montecarlo,
}

impl EngineSelection {
    pub fn engines(&self) -> Vec<Engine> {
        match self {
            EngineSelection::Analytic => vec![Engine::Analytic],
            EngineSelection::Montecarlo => vec![Engine::Montecarlo],
            EngineSelection::Both => vec![Engine::Analytic, Engine::Montecarlo],
        }
    }
}

pub const PANGRAM: &str = "the quick brown fox jumps over the lazy dog .";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub mode: ModeSelection,
    /// Built-in layout name or path to a layout file.
    pub layout: String,
    #[serde(default = "default_phrase")]
    pub phrase: String,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub fixed: ParamSet,
    #[serde(default)]
    pub delay_rule: DelayRule,
    #[serde(default)]
    pub engine: EngineSelection,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<String>,
}

fn default_phrase() -> String {
    PANGRAM.to_string()
}

fn default_runs() -> usize {
    1000
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Parameter sets of every sweep point, delay rule applied.
    pub fn points(&self) -> Result<Vec<(Option<f64>, ParamSet)>> {
        let raw: Vec<(Option<f64>, ParamSet)> = match &self.sweep {
            None => vec![(None, self.fixed.clone())],
            Some(sweep) => sweep
                .values()?
                .into_iter()
                .map(|v| {
                    let mut p = self.fixed.clone();
                    p.set(sweep.param, v);
                    (Some(v), p)
                })
                .collect(),
        };
        raw.into_iter()
            .map(|(v, mut p)| {
                self.delay_rule.apply(&mut p)?;
                Ok((v, p))
            })
            .collect()
    }
}

/// Looks a layout up by built-in name, then under `fixture_dir`, then as a
/// path.
pub fn resolve_layout(name: &str, fixture_dir: Option<&Path>) -> Result<GridLayout> {
    if let Some(dir) = fixture_dir {
        let candidate = dir.join(format!("{name}.toml"));
        if candidate.is_file() {
            return GridLayout::from_path(candidate);
        }
    }
    if let Some(layout) = GridLayout::builtin(name) {
        return Ok(layout);
    }
    let path = Path::new(name);
    if path.is_file() {
        return GridLayout::from_path(path);
    }
    Err(Error::Config(format!(
        "layout {name:?} is neither a built-in ({}) nor a readable file",
        crate::layout::BUILTIN_LAYOUTS.join(", ")
    )))
}

/// Expected phrase statistics from per-word chain moments. Rates are
/// ratios of sums over words.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhrasePrediction {
    pub chars: usize,
    pub wpm: f64,
    pub cpc: f64,
    pub cer: f64,
    pub p_failure: f64,
    pub p_correct: f64,
    pub mean_seconds: f64,
    pub seconds_std: f64,
    pub clicks_std: f64,
    pub errors_std: f64,
}

pub fn phrase_prediction(words: &[WordMoments]) -> Result<PhrasePrediction> {
    if words.is_empty() {
        return Err(Error::param("no words"));
    }
    let chars: usize = words.iter().map(|w| w.chars).sum();
    let c = chars as f64;
    let secs: f64 = words.iter().map(WordMoments::mean_seconds).sum();
    if secs <= 0.0 {
        return Err(Error::ZeroMean);
    }
    let var_secs: f64 = words.iter().map(|w| w.time_units.variance * w.unit_delay * w.unit_delay).sum();
    let n = words.len() as f64;
    Ok(PhrasePrediction {
        chars,
        wpm: (c / 5.0) / (secs / 60.0),
        cpc: words.iter().map(|w| w.clicks.mean).sum::<f64>() / c,
        cer: words.iter().map(|w| w.errors.mean).sum::<f64>() / c,
        p_failure: words.iter().map(|w| w.outcome.p_failure).sum::<f64>() / n,
        p_correct: words.iter().map(|w| w.outcome.p_correct).sum::<f64>() / n,
        mean_seconds: secs,
        seconds_std: var_secs.sqrt(),
        clicks_std: words.iter().map(|w| w.clicks.variance).sum::<f64>().sqrt(),
        errors_std: words.iter().map(|w| w.errors.variance).sum::<f64>().sqrt(),
    })
}

/// Analytic phrase prediction for one θ and mode; words run in parallel.
pub fn predict_phrase(
    words: &[String],
    layout: &GridLayout,
    params: &ParamSet,
    mode: ScanMode,
) -> Result<PhrasePrediction> {
    let per_word: Vec<WordMoments> = words
        .par_iter()
        .map(|w| Ok(moments(&params.build_chain(w, layout, mode)?)))
        .collect::<Result<_>>()?;
    phrase_prediction(&per_word)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: Option<SweepParam>,
    pub value: Option<f64>,
    pub mode: ScanMode,
    pub engine: Engine,
    pub t_scan: f64,
    pub t_fast: Option<f64>,
    pub sigma: f64,
    pub wpm: Option<f64>,
    pub wpm_low: Option<f64>,
    pub wpm_high: Option<f64>,
    pub cpc: Option<f64>,
    pub cer: Option<f64>,
    pub p_fail: Option<f64>,
    pub seconds_std: Option<f64>,
    pub clicks_std: Option<f64>,
    pub errors_std: Option<f64>,
    pub note: String,
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    words: &[String],
    layout: &GridLayout,
    spec: &ExperimentSpec,
    index: usize,
    value: Option<f64>,
    params: &ParamSet,
    mode: ScanMode,
    engine: Engine,
) -> Result<SweepRow> {
    let mut row = SweepRow {
        param: spec.sweep.as_ref().map(|s| s.param),
        value,
        mode,
        engine,
        t_scan: params.t_scan,
        t_fast: (mode == ScanMode::Fast).then(|| params.t_fast_effective()),
        sigma: params.sigma_effective(),
        wpm: None,
        wpm_low: None,
        wpm_high: None,
        cpc: None,
        cer: None,
        p_fail: None,
        seconds_std: None,
        clicks_std: None,
        errors_std: None,
        note: String::new(),
    };
    match engine {
        Engine::Analytic => match predict_phrase(words, layout, params, mode) {
            Ok(p) => {
                row.wpm = Some(p.wpm);
                row.cpc = Some(p.cpc);
                row.cer = Some(p.cer);
                row.p_fail = Some(p.p_failure);
                row.seconds_std = Some(p.seconds_std);
                row.clicks_std = Some(p.clicks_std);
                row.errors_std = Some(p.errors_std);
            }
            Err(Error::FastFalsePositives { .. }) if spec.engine == EngineSelection::Both => {
                row.note = "analytic fast-scan chain excludes false positives".into();
            }
            Err(e) => return Err(e),
        },
        Engine::Montecarlo => {
            let config = params.mc_config(mode)?;
            let base = derive_seed(spec.seed, index as u64);
            let seeds: Vec<u64> = (0..spec.runs as u64).map(|r| derive_seed(base, r)).collect();
            let s = run_phrase(words, layout, &config, &seeds)?;
            row.wpm = Some(s.wpm.value);
            row.wpm_low = Some(s.wpm.low);
            row.wpm_high = Some(s.wpm.high);
            row.cpc = Some(s.cpc.value);
            row.cer = Some(s.cer.value);
            row.p_fail = Some(s.p_failure);
            row.seconds_std = Some(s.seconds_std);
            row.clicks_std = Some(s.clicks_std);
            row.errors_std = Some(s.errors_std);
        }
    }
    Ok(row)
}

/// One row per (sweep point, mode, engine), in sweep order.
pub fn run_sweep(spec: &ExperimentSpec, layout: &GridLayout) -> Result<Vec<SweepRow>> {
    if spec.runs == 0 && spec.engine != EngineSelection::Analytic {
        return Err(Error::Config("runs must be positive for the Monte Carlo engine".into()));
    }
    let words = split_phrase(&spec.phrase, layout)?;
    let points = spec.points()?;
    let mut jobs = Vec::new();
    for (i, (value, params)) in points.iter().enumerate() {
        for mode in spec.mode.modes() {
            for engine in spec.engine.engines() {
                jobs.push((i, *value, params, mode, engine));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(i, value, params, mode, engine)| evaluate(&words, layout, spec, i, value, params, mode, engine))
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// CSV with a commented provenance header.
pub fn to_csv(spec: &ExperimentSpec, rows: &[SweepRow]) -> Result<String> {
    let mut out = String::new();
    out.push_str("# scansim sweep\n");
    let _ = writeln!(out, "# spec-sha256: {}", spec.fingerprint());
    let _ = writeln!(out, "# spec: {}", serde_json::to_string(spec).expect("spec serializes"));
    let _ = writeln!(out, "# rng: {RNG_ALGORITHM}");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "param", "value", "mode", "engine", "t_scan", "t_fast", "sigma", "wpm", "wpm_low", "wpm_high",
        "cpc", "cer", "p_fail", "seconds_std", "clicks_std", "errors_std", "note",
    ])
    .map_err(|e| Error::Config(e.to_string()))?;
    for r in rows {
        let param = r.param.map(|p| serde_json::to_value(p).expect("enum").as_str().unwrap_or("").to_string());
        let mode = match r.mode {
            ScanMode::Slow => "slow",
            ScanMode::Fast => "fast",
        };
        let engine = match r.engine {
            Engine::Analytic => "analytic",
            Engine::Montecarlo => "montecarlo",
        };
        w.write_record([
            param.unwrap_or_default(),
            fmt_opt(r.value),
            mode.to_string(),
            engine.to_string(),
            format!("{}", r.t_scan),
            fmt_opt(r.t_fast),
            format!("{}", r.sigma),
            fmt_opt(r.wpm),
            fmt_opt(r.wpm_low),
            fmt_opt(r.wpm_high),
            fmt_opt(r.cpc),
            fmt_opt(r.cer),
            fmt_opt(r.p_fail),
            fmt_opt(r.seconds_std),
            fmt_opt(r.clicks_std),
            fmt_opt(r.errors_std),
            r.note.clone(),
        ])
        .map_err(|e| Error::Config(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    out.push_str(&String::from_utf8(body).expect("utf-8"));
    Ok(out)
}

/// Deliberate model defects used to check that validation can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Perturbation {
    /// Added to every analytic scan count.
    pub scan_offset: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationCheck {
    pub word: String,
    pub value: Option<f64>,
    pub mode: ScanMode,
    pub quantity: String,
    pub report: CompareReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
    /// Fraction of support points, pooled over every check, whose |z| is within the limit.
    pub fraction_within: f64,
    pub pass: bool,
}

impl ValidationReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.report.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{verdict} {:?} {} mode={:?} value={} n={} points={} within={:.4} max|z|={:.3} impossible={}",
                c.word,
                c.quantity,
                c.mode,
                fmt_opt(c.value),
                c.report.samples,
                c.report.points.len(),
                c.report.fraction_within,
                c.report.max_abs_z,
                c.report.impossible,
            );
            if !c.report.pass {
                for p in c.report.points.iter().filter(|p| p.z.abs() > 3.0) {
                    let at = p.value.map_or("pooled".to_string(), |v| v.to_string());
                    let _ = writeln!(
                        out,
                        "    at {at}: observed {} expected {:.2} z {:.2}",
                        p.observed, p.expected, p.z
                    );
                }
            }
        }
        let points: usize = self.checks.iter().map(|c| c.report.points.len()).sum();
        let _ = writeln!(out, "pooled: points={points} within={:.4}", self.fraction_within);
        if points < 100 {
            let _ = writeln!(out, "note: fewer than 100 points, so a single excursion fails the run");
        }
        let _ = writeln!(out, "{}", if self.pass { "overall: PASS" } else { "overall: FAIL" });
        out
    }
}

fn outcome_code(t: Terminal) -> u64 {
    match t {
        Terminal::Error => 0,
        Terminal::Failure => 1,
        Terminal::Correct => 2,
    }
}

/// Compares the scans, clicks, errors and outcome distributions of every
/// word with `spec.runs` simulations.
pub fn validate(spec: &ExperimentSpec, layout: &GridLayout, perturb: Perturbation) -> Result<ValidationReport> {
    if spec.runs == 0 {
        return Err(Error::Config("validation needs runs > 0".into()));
    }
    let words = split_phrase(&spec.phrase, layout)?;
    let mut jobs = Vec::new();
    for (i, (value, params)) in spec.points()?.into_iter().enumerate() {
        for mode in spec.mode.modes() {
            for (j, word) in words.iter().enumerate() {
                jobs.push((i, j, value, params.clone(), mode, word.clone()));
            }
        }
    }
    let groups: Vec<Vec<ValidationCheck>> = jobs
        .into_iter()
        .map(|(i, j, value, params, mode, word)| {
            let chain = params.build_chain(&word, layout, mode)?;
            let analysis = analyze(&chain);
            let config = params.mc_config(mode)?;
            let seed = derive_seed(derive_seed(spec.seed, i as u64), j as u64);
            let runs = sample_word_runs(&word, layout, &config, seed, spec.runs)?;
            let outcome = &analysis.outcome;
            let outcome_pmf = Pmf::new(vec![outcome.p_error, outcome.p_failure, outcome.p_correct])?;
            let scans = analysis.scans.shifted(perturb.scan_offset);
            let checks = [
                ("scans", histogram(runs.iter().map(|r| r.1.scans)), &scans),
                ("clicks", histogram(runs.iter().map(|r| r.1.clicks)), &analysis.clicks),
                ("errors", histogram(runs.iter().map(|r| r.1.errors)), &analysis.errors),
                ("outcome", histogram(runs.iter().map(|r| outcome_code(r.0))), &outcome_pmf),
            ];
            checks
                .into_iter()
                .map(|(quantity, hist, pmf)| {
                    Ok(ValidationCheck {
                        word: word.clone(),
                        value,
                        mode,
                        quantity: quantity.into(),
                        report: compare(&hist, pmf)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let checks: Vec<ValidationCheck> = groups.into_iter().flatten().collect();
    let impossible: u64 = checks.iter().map(|c| c.report.impossible).sum();
    let points: Vec<f64> = checks.iter().flat_map(|c| c.report.points.iter().map(|p| p.z)).collect();
    let within = points.iter().filter(|z| z.abs() <= Z_LIMIT).count();
    let fraction_within = if points.is_empty() { 1.0 } else { within as f64 / points.len() as f64 };
    let pass = impossible == 0 && fraction_within >= PASS_FRACTION;
    Ok(ValidationReport { checks, fraction_within, pass })
}
