//! Click-timing and switch noise, and the per-cell click/miss probabilities
//! that parameterize the chain transitions.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

pub const QUADRATURE_TOL: f64 = 1e-10;
pub const SUPPORT_SIGMAS: f64 = 8.0;
const NORMALIZATION_TOL: f64 = 1e-6;

/// What the user is trying to click while a cell is scanned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aim {
    /// 1-based cell index within the current group.
    Cell(usize),
    Wait,
}

/// A continuous density for the offset of the observed click time from its
/// mean (the latency-shifted cell centre).
pub trait Density: Send + Sync + fmt::Debug {
    fn pdf(&self, x: f64) -> f64;

    /// Finite interval outside of which `pdf` is zero.
    fn support(&self) -> (f64, f64);

    fn ln_pdf(&self, x: f64) -> f64 {
        self.pdf(x).ln()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64;
}

/// Zero-mean Gaussian cut off at ±8σ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedGaussian {
    sigma: f64,
}

impl TruncatedGaussian {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { sigma })
    }
}

impl Density for TruncatedGaussian {
    fn pdf(&self, x: f64) -> f64 {
        if x.abs() > SUPPORT_SIGMAS * self.sigma {
            return 0.0;
        }
        gaussian_pdf(x, self.sigma)
    }

    fn support(&self) -> (f64, f64) {
        let h = SUPPORT_SIGMAS * self.sigma;
        (-h, h)
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        if x.abs() > SUPPORT_SIGMAS * self.sigma {
            return f64::NEG_INFINITY;
        }
        gaussian_ln_pdf(x, self.sigma)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let normal = Normal::new(0.0, self.sigma).expect("validated sigma");
        loop {
            let x = normal.sample(rng);
            if x.abs() <= SUPPORT_SIGMAS * self.sigma {
                return x;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub offset: f64,
    pub sigma: f64,
}

/// Finite mixture of Gaussians, e.g. a bimodal click-time distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture {
    components: Vec<MixtureComponent>,
}

impl GaussianMixture {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::param("mixture needs at least one component"));
        }
        for c in &components {
            if !(c.weight >= 0.0 && c.sigma > 0.0 && c.offset.is_finite()) {
                return Err(Error::param(format!("bad mixture component {c:?}")));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Unnormalized(total));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }
}

impl Density for GaussianMixture {
    fn pdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .filter(|c| (x - c.offset).abs() <= SUPPORT_SIGMAS * c.sigma)
            .map(|c| c.weight * gaussian_pdf(x - c.offset, c.sigma))
            .sum()
    }

    fn support(&self) -> (f64, f64) {
        self.components.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            let h = SUPPORT_SIGMAS * c.sigma;
            (lo.min(c.offset - h), hi.max(c.offset + h))
        })
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = self.components.last().expect("non-empty");
        for c in &self.components {
            acc += c.weight;
            if u < acc {
                chosen = c;
                break;
            }
        }
        let g = TruncatedGaussian::new(chosen.sigma).expect("validated sigma");
        chosen.offset + g.sample(rng)
    }
}

/// Observed click time model: the click lands at the aimed cell's centre plus
/// `delta`, spread by either a Gaussian of width `sigma` or a supplied density.
#[derive(Clone, Debug)]
pub struct ClickTiming {
    pub delta: f64,
    pub sigma: f64,
    pub density: Option<Arc<dyn Density>>,
}

impl ClickTiming {
    pub fn gaussian(delta: f64, sigma: f64) -> Result<Self> {
        let timing = Self { delta, sigma, density: None };
        timing.validate()?;
        Ok(timing)
    }

    /// Uses `density` for the click-time offset. `sigma` is set to the
    /// density's standard deviation.
    pub fn with_density(delta: f64, density: Arc<dyn Density>) -> Result<Self> {
        let (lo, hi) = density.support();
        let panels = 64;
        let mass = adaptive_simpson(|x| density.pdf(x), lo, hi, QUADRATURE_TOL, panels)?;
        let mean = adaptive_simpson(|x| x * density.pdf(x), lo, hi, QUADRATURE_TOL, panels)?;
        let second = adaptive_simpson(|x| x * x * density.pdf(x), lo, hi, QUADRATURE_TOL, panels)?;
        let mean = mean / mass;
        let sigma = (second / mass - mean * mean).max(0.0).sqrt();
        let timing = Self { delta, sigma, density: Some(density) };
        timing.validate()?;
        Ok(timing)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::param(format!("delta must be >= 0, got {}", self.delta)));
        }
        match &self.density {
            None => {
                if !(self.sigma > 0.0 && self.sigma.is_finite()) {
                    return Err(Error::param(format!("sigma must be > 0, got {}", self.sigma)));
                }
            }
            Some(d) => {
                let (lo, hi) = d.support();
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::param("density support must be a finite interval"));
                }
                let mass = adaptive_simpson(|x| d.pdf(x), lo, hi, QUADRATURE_TOL, 64)?;
                if (mass - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::Unnormalized(mass));
                }
            }
        }
        Ok(())
    }

    pub fn is_gaussian(&self) -> bool {
        self.density.is_none()
    }

    pub fn offset_pdf(&self, x: f64) -> f64 {
        match &self.density {
            None => gaussian_pdf(x, self.sigma),
            Some(d) => d.pdf(x),
        }
    }

    pub fn offset_ln_pdf(&self, x: f64) -> f64 {
        match &self.density {
            None => gaussian_ln_pdf(x, self.sigma),
            Some(d) => d.ln_pdf(x),
        }
    }

    /// Offset support used for region finding; Gaussians are cut at ±8σ.
    pub fn offset_support(&self) -> (f64, f64) {
        match &self.density {
            None => (-SUPPORT_SIGMAS * self.sigma, SUPPORT_SIGMAS * self.sigma),
            Some(d) => d.support(),
        }
    }

    pub fn sample_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.density {
            None => Normal::new(0.0, self.sigma).expect("validated sigma").sample(rng),
            Some(d) => d.sample(&mut RngRef(rng)),
        }
    }

    /// Probability that a click with the given mean lands in `[a, b)`.
    pub fn mass_in(&self, mean: f64, a: f64, b: f64) -> Result<f64> {
        match &self.density {
            None => Ok(gaussian_mass(mean, self.sigma, a, b)),
            Some(d) => density_mass(d.as_ref(), mean, a, b),
        }
    }

    /// Same as [`mass_in`](Self::mass_in) but always integrates numerically;
    /// Gaussians go through a ±8σ truncated density.
    pub fn mass_in_by_quadrature(&self, mean: f64, a: f64, b: f64) -> Result<f64> {
        match &self.density {
            None => density_mass(&TruncatedGaussian::new(self.sigma)?, mean, a, b),
            Some(d) => density_mass(d.as_ref(), mean, a, b),
        }
    }
}

struct RngRef<'a, R: ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for RngRef<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

fn density_mass(d: &dyn Density, mean: f64, a: f64, b: f64) -> Result<f64> {
    let (lo, hi) = d.support();
    let from = a.max(mean + lo);
    let to = b.min(mean + hi);
    if to <= from {
        return Ok(0.0);
    }
    let v = adaptive_simpson(|t| d.pdf(t - mean), from, to, QUADRATURE_TOL, 16)?;
    Ok(v.clamp(0.0, 1.0))
}

fn gaussian_pdf(x: f64, sigma: f64) -> f64 {
    let z = x / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
}

fn gaussian_ln_pdf(x: f64, sigma: f64) -> f64 {
    let z = x / sigma;
    -0.5 * z * z - (sigma * (2.0 * PI).sqrt()).ln()
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

fn upper_tail(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

/// P(a ≤ X < b) for X ~ N(mean, sigma), evaluated on the side of the
/// distribution that avoids cancellation.
pub fn gaussian_mass(mean: f64, sigma: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let za = (a - mean) / sigma;
    let zb = (b - mean) / sigma;
    let p = if za >= 0.0 {
        upper_tail(za) - upper_tail(zb)
    } else if zb <= 0.0 {
        normal_cdf(zb) - normal_cdf(za)
    } else {
        1.0 - upper_tail(zb) - normal_cdf(za)
    };
    p.clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchNoise {
    /// Probability that a true switch event is ignored.
    pub f: f64,
    /// False-positive rate, events per second.
    pub lambda: f64,
}

impl SwitchNoise {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.f) {
            return Err(Error::param(format!("f must lie in [0, 1], got {}", self.f)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::param(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        Ok(())
    }
}

impl Default for SwitchNoise {
    fn default() -> Self {
        Self { f: 0.0, lambda: 0.0 }
    }
}

#[derive(Clone, Debug)]
pub struct NoiseParams {
    pub click_timing: ClickTiming,
    pub switch_noise: SwitchNoise,
    /// Scan delay T_S in seconds.
    pub t_scan: f64,
    pub undo_window: usize,
    pub error_limit: usize,
    pub kappa: f64,
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        self.click_timing.validate()?;
        self.switch_noise.validate()?;
        if !(self.t_scan > 0.0 && self.t_scan.is_finite()) {
            return Err(Error::param(format!("t_scan must be > 0, got {}", self.t_scan)));
        }
        if self.undo_window < 1 {
            return Err(Error::param("undo window U must be >= 1"));
        }
        if self.error_limit < 1 {
            return Err(Error::param("error limit E must be >= 1"));
        }
        if !(self.kappa >= 1.0 && self.kappa.is_finite()) {
            return Err(Error::param(format!("kappa must be >= 1, got {}", self.kappa)));
        }
        Ok(())
    }

    /// Near-deterministic user: σ = 1e-6 s, no latency, no switch noise.
    pub fn noiseless(t_scan: f64) -> Self {
        Self {
            click_timing: ClickTiming { delta: 0.0, sigma: 1e-6, density: None },
            t_scan,
            ..Self::default()
        }
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            click_timing: ClickTiming { delta: 0.0, sigma: 0.1, density: None },
            switch_noise: SwitchNoise::default(),
            t_scan: 1.0,
            undo_window: 2,
            error_limit: 2,
            kappa: 10.0,
        }
    }
}

/// Start time (from the beginning of the group scan, tick included) and
/// duration of one scanned cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellWindow {
    pub start: f64,
    pub duration: f64,
}

impl CellWindow {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t < self.end()
    }
}

fn window(v: usize, windows: &[CellWindow]) -> Result<&CellWindow> {
    if v == 0 || v > windows.len() {
        return Err(Error::CellIndex { index: v, len: windows.len() });
    }
    Ok(&windows[v - 1])
}

/// Total duration of a group scan described by `windows`.
pub fn group_duration(windows: &[CellWindow]) -> f64 {
    windows.last().map_or(0.0, CellWindow::end)
}

/// Mean observed click time when aiming at cell `v`.
pub fn cell_mean(v: usize, windows: &[CellWindow], delta: f64) -> Result<f64> {
    let w = window(v, windows)?;
    Ok(w.start + 0.5 * w.duration + delta)
}

/// Probability that a click aimed at `v_aim` is observed while `v_scan` is
/// highlighted.
pub fn overlap_prob(
    v_scan: usize,
    v_aim: usize,
    timing: &ClickTiming,
    windows: &[CellWindow],
) -> Result<f64> {
    let w = window(v_scan, windows)?;
    let mean = cell_mean(v_aim, windows, timing.delta)?;
    timing.mass_in(mean, w.start, w.end())
}

/// [`overlap_prob`] forced through numerical integration.
pub fn overlap_prob_quadrature(
    v_scan: usize,
    v_aim: usize,
    timing: &ClickTiming,
    windows: &[CellWindow],
) -> Result<f64> {
    let w = window(v_scan, windows)?;
    let mean = cell_mean(v_aim, windows, timing.delta)?;
    timing.mass_in_by_quadrature(mean, w.start, w.end())
}

/// Miss probability given the overlap `q` of the true click with a cell of
/// length `duration`. `q` is ignored when the user is waiting.
pub fn miss_prob_from_overlap(q: f64, duration: f64, aiming: bool, noise: &SwitchNoise) -> f64 {
    let no_false_positive = (-noise.lambda * duration).exp();
    if aiming {
        no_false_positive * (1.0 - (1.0 - noise.f) * q)
    } else {
        no_false_positive
    }
}

pub fn miss_prob(
    v_scan: usize,
    aim: Aim,
    params: &NoiseParams,
    windows: &[CellWindow],
) -> Result<f64> {
    let w = window(v_scan, windows)?;
    match aim {
        Aim::Wait => Ok(miss_prob_from_overlap(0.0, w.duration, false, &params.switch_noise)),
        Aim::Cell(v) => {
            let q = overlap_prob(v_scan, v, &params.click_timing, windows)?;
            Ok(miss_prob_from_overlap(q, w.duration, true, &params.switch_noise))
        }
    }
}

pub fn click_prob(
    v_scan: usize,
    aim: Aim,
    params: &NoiseParams,
    windows: &[CellWindow],
) -> Result<f64> {
    Ok(1.0 - miss_prob(v_scan, aim, params, windows)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchEventKind {
    TrueClick,
    RejectedClick,
    FalsePositive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub time: f64,
    pub kind: SwitchEventKind,
}

impl SwitchEvent {
    pub fn accepted(&self) -> bool {
        self.kind != SwitchEventKind::RejectedClick
    }
}

/// Draws the switch events of one group scan, sorted by time. Rejected true
/// clicks are included so that they can be logged.
///
/// Draw order: click offset, acceptance, false-positive count, then one
/// uniform time per false positive.
pub fn sample_group<R: Rng + ?Sized>(
    aim: Aim,
    params: &NoiseParams,
    windows: &[CellWindow],
    rng: &mut R,
) -> Result<Vec<SwitchEvent>> {
    let mut events = Vec::new();
    if let Aim::Cell(v) = aim {
        let mean = cell_mean(v, windows, params.click_timing.delta)?;
        let time = mean + params.click_timing.sample_offset(rng);
        let accepted = rng.random::<f64>() >= params.switch_noise.f;
        let kind = if accepted { SwitchEventKind::TrueClick } else { SwitchEventKind::RejectedClick };
        events.push(SwitchEvent { time, kind });
    }
    let duration = group_duration(windows);
    for time in sample_false_positives(params.switch_noise.lambda, duration, rng) {
        events.push(SwitchEvent { time, kind: SwitchEventKind::FalsePositive });
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok(events)
}

/// Homogeneous Poisson event times on `[0, duration)`, unsorted.
pub fn sample_false_positives<R: Rng + ?Sized>(lambda: f64, duration: f64, rng: &mut R) -> Vec<f64> {
    let rate = lambda * duration;
    if rate <= 0.0 {
        return Vec::new();
    }
    let count = Poisson::new(rate).expect("positive rate").sample(rng) as usize;
    (0..count).map(|_| rng.random::<f64>() * duration).collect()
}

/// Accepted switch-event times of one group scan for a given seed.
pub fn sample_events(
    aim: Aim,
    params: &NoiseParams,
    windows: &[CellWindow],
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_group(aim, params, windows, &mut rng)?
        .into_iter()
        .filter(SwitchEvent::accepted)
        .map(|e| e.time)
        .collect())
}
