//! Forward recursions over a [`ScanChain`]: state occupancy, the exact
//! distributions of scans, time units, clicks and character errors, and
//! their summary statistics.

use serde::{Deserialize, Serialize};

use crate::chain::{ScanChain, Terminal, Transition};
use crate::error::{Error, Result};

const MASS_TOL: f64 = 1e-9;

/// Probability mass function on `0..len`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| p.is_nan() || *p < 0.0) {
            return Err(Error::param("probabilities must be non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Unnormalized(total));
        }
        Ok(Self { probs })
    }

    pub fn point_mass(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    /// One past the largest value with stored mass.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.probs.iter().enumerate().map(|(k, p)| (k as f64 - mean).powi(2) * p).sum()
    }

    pub fn std(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Central moment of order `order`.
    pub fn central_moment(&self, order: i32) -> f64 {
        let mean = self.mean();
        self.probs.iter().enumerate().map(|(k, p)| (k as f64 - mean).powi(order) * p).sum()
    }

    pub fn min_support(&self) -> Option<usize> {
        self.probs.iter().position(|&p| p > 0.0)
    }

    pub fn max_support(&self) -> Option<usize> {
        self.probs.iter().rposition(|&p| p > 0.0)
    }

    pub fn is_point_mass_at(&self, k: usize) -> bool {
        self.min_support() == Some(k) && self.max_support() == Some(k)
    }

    /// The same distribution moved up by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        let mut probs = vec![0.0; offset];
        probs.extend_from_slice(&self.probs);
        Self { probs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSplit {
    pub p_correct: f64,
    pub p_error: f64,
    pub p_failure: f64,
}

impl OutcomeSplit {
    pub fn get(&self, t: Terminal) -> f64 {
        match t {
            Terminal::Correct => self.p_correct,
            Terminal::Error => self.p_error,
            Terminal::Failure => self.p_failure,
        }
    }

    pub fn total(&self) -> f64 {
        self.p_correct + self.p_error + self.p_failure
    }
}

fn step(chain: &ScanChain, cur: &[f64], next: &mut [f64], forced: bool) {
    next.iter_mut().for_each(|x| *x = 0.0);
    let failure = chain.terminal_index(Terminal::Failure);
    for (n, &mass) in cur.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        if forced && chain.is_live(n) {
            next[failure] += mass;
            continue;
        }
        for tr in chain.transitions(n) {
            next[tr.to] += tr.prob * mass;
        }
    }
}

/// Occupancy α_t(n) for t = 0..=T; row `t` is the distribution over states
/// after `t` steps.
pub fn occupancy(chain: &ScanChain) -> Vec<Vec<f64>> {
    let n = chain.state_count();
    let horizon = chain.horizon();
    let mut table = Vec::with_capacity(horizon + 1);
    let mut first = vec![0.0; n];
    first[chain.initial_index()] = 1.0;
    table.push(first);
    for t in 1..=horizon {
        let mut next = vec![0.0; n];
        step(chain, &table[t - 1], &mut next, t == horizon);
        table.push(next);
    }
    table
}

/// Absorption probabilities α_T of the three terminals.
pub fn outcome_split(chain: &ScanChain) -> OutcomeSplit {
    let n = chain.state_count();
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    cur[chain.initial_index()] = 1.0;
    for t in 1..=chain.horizon() {
        step(chain, &cur, &mut next, t == chain.horizon());
        std::mem::swap(&mut cur, &mut next);
    }
    OutcomeSplit {
        p_correct: cur[chain.terminal_index(Terminal::Correct)],
        p_error: cur[chain.terminal_index(Terminal::Error)],
        p_failure: cur[chain.terminal_index(Terminal::Failure)],
    }
}

/// Joint (count, state) mass of one live state: values for counts
/// `lo..lo + vals.len()`.
#[derive(Clone, Debug, Default)]
struct Band {
    lo: usize,
    vals: Vec<f64>,
}

impl Band {
    fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Drops leading and trailing entries too small to be normal floats.
    fn trim(&mut self) {
        let keep = |v: &f64| *v >= f64::MIN_POSITIVE;
        match self.vals.iter().position(keep) {
            None => self.vals.clear(),
            Some(first) => {
                let last = self.vals.iter().rposition(keep).expect("non-empty");
                self.vals.truncate(last + 1);
                self.vals.drain(..first);
                self.lo += first;
            }
        }
    }
}

fn accumulate(out: &mut Vec<f64>, lo: usize, vals: &[f64], p: f64) {
    let hi = lo + vals.len();
    if out.len() < hi {
        out.resize(hi, 0.0);
    }
    for (o, v) in out[lo..hi].iter_mut().zip(vals) {
        *o += p * v;
    }
}

/// Distribution of a count accumulated along the chain's paths. `reward`
/// is added on every transition, `timeout` when a live state reaches the
/// horizon, and the count starts at `init`.
fn reward_pmf<R, O>(chain: &ScanChain, init: usize, reward: R, timeout: O) -> Pmf
where
    R: Fn(usize, &Transition) -> usize,
    O: Fn(usize) -> usize,
{
    Pmf { probs: reward_mass(chain, init, reward, timeout, None) }
}

/// Mass of (count, outcome) pairs, restricted to one outcome when `only` is
/// set. Time-outs count as failures.
fn reward_mass<R, O>(chain: &ScanChain, init: usize, reward: R, timeout: O, only: Option<Terminal>) -> Vec<f64>
where
    R: Fn(usize, &Transition) -> usize,
    O: Fn(usize) -> usize,
{
    let keep = |to: usize| only.is_none_or(|t| chain.terminal_index(t) == to);
    let keep_timeout = only.is_none_or(|t| t == Terminal::Failure);
    let n = chain.live_count();
    let horizon = chain.horizon();
    let mut cur = vec![Band::default(); n];
    let mut next = vec![Band::default(); n];
    let mut ranges = vec![(usize::MAX, 0usize); n];
    cur[chain.initial_index()] = Band { lo: init, vals: vec![1.0] };
    let mut out = Vec::new();

    for t in 1..=horizon {
        if cur.iter().all(Band::is_empty) {
            break;
        }
        if t == horizon {
            for (s, band) in cur.iter().enumerate().filter(|(_, b)| keep_timeout && !b.is_empty()) {
                accumulate(&mut out, band.lo + timeout(s), &band.vals, 1.0);
            }
            break;
        }

        ranges.iter_mut().for_each(|r| *r = (usize::MAX, 0));
        for (s, band) in cur.iter().enumerate().filter(|(_, b)| !b.is_empty()) {
            for tr in chain.transitions(s).iter().filter(|tr| tr.prob > 0.0 && tr.to < n) {
                let r = reward(s, tr);
                let range = &mut ranges[tr.to];
                range.0 = range.0.min(band.lo + r);
                range.1 = range.1.max(band.lo + r + band.vals.len());
            }
        }
        for (band, &(lo, hi)) in next.iter_mut().zip(&ranges) {
            band.vals.clear();
            if lo != usize::MAX {
                band.lo = lo;
                band.vals.resize(hi - lo, 0.0);
            }
        }
        for (s, band) in cur.iter().enumerate().filter(|(_, b)| !b.is_empty()) {
            for tr in chain.transitions(s).iter().filter(|tr| tr.prob > 0.0) {
                let start = band.lo + reward(s, tr);
                if tr.to < n {
                    let dst = &mut next[tr.to];
                    let off = start - dst.lo;
                    for (d, v) in dst.vals[off..off + band.vals.len()].iter_mut().zip(&band.vals) {
                        *d += tr.prob * v;
                    }
                } else if keep(tr.to) {
                    accumulate(&mut out, start, &band.vals, tr.prob);
                }
            }
        }
        next.iter_mut().for_each(Band::trim);
        std::mem::swap(&mut cur, &mut next);
    }
    out
}

/// Distribution of the number of highlighted cells (the tick is counted
/// with the first cell of each group).
pub fn scans_pmf(chain: &ScanChain) -> Pmf {
    let init = chain.weight(chain.initial_index()).scans as usize;
    reward_pmf(chain, init, |_, tr| chain.weight(tr.to).scans as usize, |_| 0)
}

/// Joint mass P(scans = k, outcome) for one outcome; sums to that
/// outcome's probability.
pub fn scans_mass_for(chain: &ScanChain, outcome: Terminal) -> Vec<f64> {
    let init = chain.weight(chain.initial_index()).scans as usize;
    reward_mass(chain, init, |_, tr| chain.weight(tr.to).scans as usize, |_| 0, Some(outcome))
}

/// Distribution of elapsed time in units of the mode's unit delay.
pub fn time_units_pmf(chain: &ScanChain) -> Pmf {
    let init = chain.weight(chain.initial_index()).units as usize;
    reward_pmf(chain, init, |_, tr| chain.weight(tr.to).units as usize, |_| 0)
}

pub fn clicks_pmf(chain: &ScanChain) -> Pmf {
    reward_pmf(chain, 0, |_, tr| usize::from(tr.is_click()), |_| 0)
}

/// Distribution of character errors k = M − m + e on {0, …, M + E}.
pub fn errors_pmf(chain: &ScanChain) -> Pmf {
    let n = chain.live_count();
    reward_pmf(
        chain,
        0,
        |s, tr| if tr.to >= n { chain.absorption_errors(s, tr.to) } else { 0 },
        |s| chain.timeout_errors(s),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn std(&self) -> f64 {
        self.variance.max(0.0).sqrt()
    }
}

/// Mean and variance of an accumulated reward without building the joint
/// table: each state carries its mass and the first two raw moments.
fn reward_moments<R, O>(chain: &ScanChain, init: f64, reward: R, timeout: O) -> Moments
where
    R: Fn(usize, &Transition) -> f64,
    O: Fn(usize) -> f64,
{
    let n = chain.live_count();
    let mut cur = vec![[0.0f64; 3]; n];
    let mut next = vec![[0.0f64; 3]; n];
    cur[chain.initial_index()] = [1.0, init, init * init];
    let mut absorbed = [0.0f64; 3];
    let add = |acc: &mut [f64; 3], src: &[f64; 3], p: f64, r: f64| {
        acc[0] += p * src[0];
        acc[1] += p * (src[1] + r * src[0]);
        acc[2] += p * (src[2] + 2.0 * r * src[1] + r * r * src[0]);
    };
    for t in 1..=chain.horizon() {
        if t == chain.horizon() {
            for (s, m) in cur.iter().enumerate() {
                add(&mut absorbed, m, 1.0, timeout(s));
            }
            break;
        }
        next.iter_mut().for_each(|m| *m = [0.0; 3]);
        for (s, m) in cur.iter().enumerate().filter(|(_, m)| m[0] > 0.0) {
            for tr in chain.transitions(s).iter().filter(|tr| tr.prob > 0.0) {
                let r = reward(s, tr);
                if tr.to < n {
                    add(&mut next[tr.to], m, tr.prob, r);
                } else {
                    add(&mut absorbed, m, tr.prob, r);
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mean = absorbed[1];
    Moments { mean, variance: (absorbed[2] - mean * mean).max(0.0) }
}

/// Means and variances of every count, without full distributions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordMoments {
    pub chars: usize,
    pub unit_delay: f64,
    pub scans: Moments,
    pub time_units: Moments,
    pub clicks: Moments,
    pub errors: Moments,
    pub outcome: OutcomeSplit,
}

impl WordMoments {
    /// Expected seconds spent on the word.
    pub fn mean_seconds(&self) -> f64 {
        self.time_units.mean * self.unit_delay
    }
}

pub fn moments(chain: &ScanChain) -> WordMoments {
    let n = chain.live_count();
    let scans0 = chain.weight(chain.initial_index()).scans as f64;
    let units0 = chain.weight(chain.initial_index()).units as f64;
    WordMoments {
        chars: chain.word_len(),
        unit_delay: chain.unit_delay(),
        scans: reward_moments(chain, scans0, |_, tr| chain.weight(tr.to).scans as f64, |_| 0.0),
        time_units: reward_moments(chain, units0, |_, tr| chain.weight(tr.to).units as f64, |_| 0.0),
        clicks: reward_moments(chain, 0.0, |_, tr| f64::from(u8::from(tr.is_click())), |_| 0.0),
        errors: reward_moments(
            chain,
            0.0,
            |s, tr| if tr.to >= n { chain.absorption_errors(s, tr.to) as f64 } else { 0.0 },
            |s| chain.timeout_errors(s) as f64,
        ),
        outcome: outcome_split(chain),
    }
}

/// Every distribution of one word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordAnalysis {
    pub chars: usize,
    pub unit_delay: f64,
    pub scans: Pmf,
    pub time_units: Pmf,
    pub clicks: Pmf,
    pub errors: Pmf,
    pub outcome: OutcomeSplit,
}

impl WordAnalysis {
    pub fn wpm(&self) -> Result<f64> {
        Ok(summarize(&self.time_units, self.unit_delay, self.chars, Metric::Wpm)?.value)
    }
}

pub fn analyze(chain: &ScanChain) -> WordAnalysis {
    let ((scans, time_units), (clicks, (errors, outcome))) = rayon::join(
        || rayon::join(|| scans_pmf(chain), || time_units_pmf(chain)),
        || rayon::join(|| clicks_pmf(chain), || rayon::join(|| errors_pmf(chain), || outcome_split(chain))),
    );
    WordAnalysis {
        chars: chain.word_len(),
        unit_delay: chain.unit_delay(),
        scans,
        time_units,
        clicks,
        errors,
        outcome,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Wpm,
    Cpc,
    Cer,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub value: f64,
}

/// Mean and spread of `pmf` plus the derived rate. For wpm the pmf counts
/// time in units of `unit_delay` seconds.
pub fn summarize(pmf: &Pmf, unit_delay: f64, chars: usize, metric: Metric) -> Result<Summary> {
    let total = pmf.total();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::Unnormalized(total));
    }
    let mean = pmf.mean();
    let value = match metric {
        Metric::Wpm => {
            if mean == 0.0 {
                return Err(Error::ZeroMean);
            }
            (chars as f64 / 5.0) / (mean * unit_delay / 60.0)
        }
        Metric::Cpc | Metric::Cer => mean / chars as f64,
    };
    Ok(Summary { mean, std: pmf.std(), value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_validation() {
        assert!(Pmf::new(vec![0.5, 0.5]).is_ok());
        assert!(matches!(Pmf::new(vec![0.5, 0.4]), Err(Error::Unnormalized(_))));
        assert!(Pmf::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn pmf_statistics() {
        let p = Pmf::new(vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(p.mean(), 1.0);
        assert_eq!(p.variance(), 0.5);
        assert_eq!(p.min_support(), Some(0));
        assert_eq!(p.shifted(2).min_support(), Some(2));
        assert!(Pmf::point_mass(4).is_point_mass_at(4));
    }

    #[test]
    fn summarize_examples() {
        let s = summarize(&Pmf::point_mass(9), 1.0, 2, Metric::Wpm).unwrap();
        assert!((s.value - (2.0 / 5.0) / (9.0 / 60.0)).abs() < 1e-12);
        assert!((s.value - 2.667).abs() < 1e-3);
        assert_eq!(summarize(&Pmf::point_mass(0), 1.0, 2, Metric::Cer).unwrap().value, 0.0);
        assert!(matches!(summarize(&Pmf::point_mass(0), 1.0, 2, Metric::Wpm), Err(Error::ZeroMean)));
        let c = summarize(&Pmf::point_mass(2), 1.0, 2, Metric::Cpc).unwrap();
        assert_eq!(c.value, 1.0);
    }

    #[test]
    fn band_trim() {
        let mut b = Band { lo: 3, vals: vec![0.0, 1e-320, 0.5, 0.0, 0.5, 0.0] };
        b.trim();
        assert_eq!(b.lo, 5);
        assert_eq!(b.vals, vec![0.5, 0.0, 0.5]);
        let mut z = Band { lo: 0, vals: vec![0.0, 0.0] };
        z.trim();
        assert!(z.is_empty());
    }

    #[test]
    fn outcome_masses_partition_scans() {
        use crate::layout::GridLayout;
        use crate::noise::{NoiseParams, SwitchNoise};
        let params = NoiseParams { switch_noise: SwitchNoise { f: 0.1, lambda: 0.05 }, ..NoiseParams::default() };
        let chain = crate::chain::build_slow("a_", &GridLayout::grid_2x2(), &params).unwrap();
        let all = scans_pmf(&chain);
        let split = outcome_split(&chain);
        let mut sum = vec![0.0; all.len()];
        for t in [Terminal::Error, Terminal::Failure, Terminal::Correct] {
            let mass = scans_mass_for(&chain, t);
            assert!((mass.iter().sum::<f64>() - split.get(t)).abs() < 1e-12);
            accumulate(&mut sum, 0, &mass, 1.0);
        }
        for (a, b) in all.probs().iter().zip(&sum) {
            assert!((a - b).abs() < 1e-15);
        }
        let correct = scans_mass_for(&chain, Terminal::Correct);
        assert_eq!(correct.iter().position(|&p| p > 0.0), Some(9));
    }
}
