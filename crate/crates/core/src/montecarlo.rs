//! Discrete-event simulation of a user typing through the scanner. It shares
//! the noise samplers with the rest of the crate but not the chain: the
//! cursor below tracks the output text directly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::Terminal;
use crate::error::{Error, Result};
use crate::layout::{render_text, GridLayout, ScanMode, ScanTiming};
use crate::noise::{sample_group, Aim, CellWindow, NoiseParams, SwitchEventKind};
use crate::pmf::Pmf;

/// Identifier of the pseudorandom generator and seeding scheme.
pub const RNG_ALGORITHM: &str = "rand_chacha::ChaCha8Rng/seed_from_u64";

#[derive(Clone, Debug)]
pub struct McConfig {
    pub mode: ScanMode,
    pub params: NoiseParams,
    /// Fast-cell dwell time; required in fast mode.
    pub t_fast: Option<f64>,
}

impl McConfig {
    pub fn slow(params: NoiseParams) -> Self {
        Self { mode: ScanMode::Slow, params, t_fast: None }
    }

    pub fn fast(params: NoiseParams, t_fast: f64) -> Self {
        Self { mode: ScanMode::Fast, params, t_fast: Some(t_fast) }
    }

    pub fn timing(&self, layout: &GridLayout) -> Result<ScanTiming> {
        self.params.validate()?;
        Ok(match self.mode {
            ScanMode::Slow => ScanTiming::slow(self.params.t_scan, layout.tick_prefix()),
            ScanMode::Fast => {
                let t_fast = self.t_fast.ok_or(Error::MissingFastParams)?;
                if !(t_fast > 0.0 && t_fast <= self.params.t_scan) {
                    return Err(Error::param(format!("t_fast must lie in (0, t_scan], got {t_fast}")));
                }
                ScanTiming::fast(self.params.t_scan, t_fast, layout.tick_prefix())
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Row,
    Column,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EventKind {
    Scan { group: GroupKind, row: Option<usize>, cell: usize },
    TrueClick,
    FalsePositive,
    RejectedClick,
    /// A trigger selected `cell`; `symbol` is set for column selections.
    Selection { group: GroupKind, cell: usize, symbol: Option<String> },
    Undo,
    Delete,
    Terminal { outcome: Terminal },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    pub time: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub scans: u64,
    pub time_units: u64,
    pub clicks: u64,
    pub errors: u64,
    /// Chain steps taken, one per scanned cell.
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    pub word: String,
    pub seed: u64,
    pub rng: String,
    pub mode: ScanMode,
    pub unit_delay: f64,
    pub events: Vec<LogEvent>,
    pub outcome: Terminal,
    pub output: String,
    pub totals: Totals,
}

impl SessionLog {
    pub fn seconds(&self) -> f64 {
        self.totals.time_units as f64 * self.unit_delay
    }

    /// Header record, one record per event, then a summary record.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        let header = serde_json::json!({
            "record": "header",
            "word": self.word,
            "seed": self.seed,
            "rng": self.rng,
            "mode": self.mode,
            "unit_delay": self.unit_delay,
        });
        out.push_str(&header.to_string());
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        let summary = serde_json::json!({
            "record": "summary",
            "outcome": self.outcome,
            "output": render_text(&self.output),
            "totals": self.totals,
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

/// Where the user is in the scanning cycle, independent of any chain
/// numbering. `m` and `e` are derived from the text written so far.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cursor {
    pub target: Vec<char>,
    pub output: Vec<char>,
    pub group: GroupKind,
    /// Selected row during a column scan.
    pub row: usize,
    /// Column group scans already completed without a selection.
    pub undo: usize,
    pub cell: usize,
}

/// Result of a trigger on the current cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Effect {
    RowSelected(usize),
    Typed(char),
    Deleted,
    NoOp,
    Finished(Terminal),
}

impl Cursor {
    pub fn new(target: &str) -> Self {
        Self {
            target: target.chars().collect(),
            output: Vec::new(),
            group: GroupKind::Row,
            row: 0,
            undo: 0,
            cell: 1,
        }
    }

    /// Length of the common prefix of output and target.
    pub fn m(&self) -> usize {
        self.output.iter().zip(&self.target).take_while(|(a, b)| a == b).count()
    }

    /// Symbols written beyond the common prefix.
    pub fn e(&self) -> usize {
        self.output.len() - self.m()
    }

    /// Character errors of the current output against the target.
    pub fn errors(&self) -> usize {
        self.target.len() + self.output.len() - 2 * self.m()
    }

    pub fn group_len(&self, layout: &GridLayout) -> usize {
        match self.group {
            GroupKind::Row => layout.row_count(),
            GroupKind::Column => layout.row_len(self.row),
        }
    }

    pub fn aim(&self, layout: &GridLayout) -> Result<Aim> {
        let target = if self.e() > 0 {
            layout.delete_symbol()
        } else {
            *self.target.get(self.m()).ok_or_else(|| Error::InvalidWord {
                word: self.target.iter().collect(),
                reason: "nothing left to type".into(),
            })?
        };
        let (row, col) = layout.locate(target)?;
        Ok(match self.group {
            GroupKind::Row => Aim::Cell(row),
            GroupKind::Column if self.row == row => Aim::Cell(col),
            GroupKind::Column => Aim::Wait,
        })
    }

    /// Advances past an unselected cell. Returns true when a column group
    /// ran out of undo steps and the row selection was cancelled.
    pub fn miss(&mut self, layout: &GridLayout, undo_window: usize) -> bool {
        if self.cell < self.group_len(layout) {
            self.cell += 1;
            return false;
        }
        self.cell = 1;
        if self.group == GroupKind::Column {
            self.undo += 1;
            if self.undo >= undo_window {
                self.group = GroupKind::Row;
                self.undo = 0;
                return true;
            }
        }
        false
    }

    /// Applies a trigger on the current cell.
    pub fn click(&mut self, layout: &GridLayout, error_limit: usize) -> Effect {
        if self.group == GroupKind::Row {
            self.row = self.cell;
            self.group = GroupKind::Column;
            self.undo = 0;
            self.cell = 1;
            return Effect::RowSelected(self.row);
        }
        let symbol = layout.symbol_at(self.row, self.cell).expect("cell inside row");
        self.group = GroupKind::Row;
        self.cell = 1;
        self.undo = 0;
        if symbol == layout.delete_symbol() {
            return if self.output.pop().is_some() { Effect::Deleted } else { Effect::NoOp };
        }
        self.output.push(symbol);
        if layout.is_terminator(symbol) {
            let outcome = if self.output == self.target { Terminal::Correct } else { Terminal::Error };
            return Effect::Finished(outcome);
        }
        if self.e() >= error_limit {
            return Effect::Finished(Terminal::Failure);
        }
        Effect::Typed(symbol)
    }
}

/// Maximum a posteriori cell for a latency-corrected click time; ties go to
/// the lower cell and times outside the group span give no decision.
pub fn map_decision(tau: f64, windows: &[CellWindow], params: &NoiseParams) -> Option<usize> {
    let first = windows.first()?;
    let last = windows.last()?;
    if tau < first.start || tau >= last.end() {
        return None;
    }
    let timing = &params.click_timing;
    let mut best: Option<(usize, f64)> = None;
    for (k, w) in windows.iter().enumerate() {
        let l = timing.offset_ln_pdf(tau - (w.start + 0.5 * w.duration));
        if l > f64::NEG_INFINITY && best.is_none_or(|(_, b)| l > b) {
            best = Some((k + 1, l));
        }
    }
    best.map(|(k, _)| k)
}

struct Walker<'a> {
    layout: &'a GridLayout,
    timing: ScanTiming,
    horizon: u64,
    record: bool,
    events: Vec<LogEvent>,
    totals: Totals,
    clock: f64,
}

impl Walker<'_> {
    fn log(&mut self, time: f64, kind: EventKind) {
        if self.record {
            self.events.push(LogEvent { time, kind });
        }
    }

    fn enter(&mut self, cursor: &Cursor, start: f64) {
        let len = cursor.group_len(self.layout);
        let w = self.timing.weight(cursor.cell, len);
        self.totals.scans += u64::from(w.scans);
        self.totals.time_units += u64::from(w.units);
        let row = (cursor.group == GroupKind::Column).then_some(cursor.row);
        self.log(start, EventKind::Scan { group: cursor.group, row, cell: cursor.cell });
    }

    /// Takes one chain step; false once the horizon forces a time-out.
    fn step(&mut self) -> bool {
        if self.totals.steps + 1 >= self.horizon {
            return false;
        }
        self.totals.steps += 1;
        true
    }

    fn selection(&mut self, cursor: &Cursor, time: f64, effect: &Effect) {
        let symbol = match effect {
            Effect::RowSelected(_) => None,
            _ => self.layout.symbol_at(cursor.row, cursor.cell).map(|c| c.to_string()),
        };
        self.log(time, EventKind::Selection { group: cursor.group, cell: cursor.cell, symbol });
        if matches!(effect, Effect::Deleted | Effect::NoOp) {
            self.log(time, EventKind::Delete);
        }
    }
}

/// Simulates one word; `record` keeps the full event list.
pub fn simulate_word<R: Rng + ?Sized>(
    word: &str,
    layout: &GridLayout,
    config: &McConfig,
    rng: &mut R,
    record: bool,
) -> Result<(Terminal, Cursor, Totals, Vec<LogEvent>)> {
    let target = crate::chain::parse_word(word, layout)?;
    let timing = config.timing(layout)?;
    let params = &config.params;
    let horizon =
        (params.kappa * (target.len() * layout.row_count() * layout.max_row_len()) as f64).ceil() as u64;
    let mut w = Walker {
        layout,
        timing,
        horizon,
        record,
        events: Vec::new(),
        totals: Totals::default(),
        clock: 0.0,
    };
    let mut cursor = Cursor::new(word);
    let mut group_start = 0.0;
    w.enter(&cursor, group_start);

    let outcome = 'word: loop {
        let len = cursor.group_len(layout);
        let windows = timing.schedule(len).windows();
        let aim = cursor.aim(layout)?;
        let events = sample_group(aim, params, &windows, rng)?;
        let end = windows[len - 1].end();

        // Cell to trigger and the time of the deciding event.
        let trigger: Option<(usize, f64)> = match timing.mode {
            ScanMode::Slow => events
                .iter()
                .filter(|e| e.accepted() && e.time >= windows[0].start && e.time < end)
                .map(|e| {
                    let k = windows.iter().position(|win| win.contains(e.time)).expect("inside span");
                    (k + 1, e.time)
                })
                .next(),
            ScanMode::Fast => {
                let delta = params.click_timing.delta;
                let mut accepted: Vec<(f64, f64)> = events
                    .iter()
                    .filter(|e| e.accepted())
                    .map(|e| match e.kind {
                        SwitchEventKind::TrueClick => (e.time - delta, e.time),
                        _ => (e.time, e.time + delta),
                    })
                    .collect();
                accepted.sort_by(|a, b| a.1.total_cmp(&b.1));
                accepted
                    .into_iter()
                    .find_map(|(tau, seen)| map_decision(tau, &windows, params).map(|k| (k, seen)))
            }
        };

        let visible_until = match (timing.mode, trigger) {
            (ScanMode::Slow, Some((_, t))) => t,
            _ => f64::INFINITY,
        };
        for e in events.iter().filter(|e| e.time <= visible_until) {
            let kind = match e.kind {
                SwitchEventKind::TrueClick => EventKind::TrueClick,
                SwitchEventKind::RejectedClick => EventKind::RejectedClick,
                SwitchEventKind::FalsePositive => EventKind::FalsePositive,
            };
            w.log(group_start + e.time, kind);
        }

        let mut cell = 1;
        loop {
            let window = windows[cell - 1];
            if !w.step() {
                w.clock = group_start + window.start;
                break 'word Terminal::Failure;
            }
            // (selected cell, selection time, start of the next group)
            let decided = match (timing.mode, trigger) {
                (ScanMode::Slow, Some((k, t))) if k == cell => {
                    Some((k, group_start + t, group_start + window.end()))
                }
                (ScanMode::Fast, Some((k, _))) if cell == len => {
                    Some((k, group_start + end, group_start + end))
                }
                _ => None,
            };
            if let Some((k, at, next_start)) = decided {
                cursor.cell = k;
                w.totals.clicks += 1;
                let before = cursor.clone();
                let effect = cursor.click(layout, params.error_limit);
                w.selection(&before, at, &effect);
                group_start = next_start;
                if let Effect::Finished(outcome) = effect {
                    w.clock = group_start;
                    break 'word outcome;
                }
                w.enter(&cursor, group_start);
                continue 'word;
            }
            let cancelled = cursor.miss(layout, params.undo_window);
            if cell == len {
                group_start += end;
                if cancelled {
                    w.log(group_start, EventKind::Undo);
                }
                w.enter(&cursor, group_start);
                continue 'word;
            }
            cell += 1;
            w.enter(&cursor, group_start + windows[cell - 1].start);
        }
    };
    w.totals.errors = match outcome {
        Terminal::Correct => 0,
        _ => cursor.errors() as u64,
    };
    let clock = w.clock;
    w.log(clock, EventKind::Terminal { outcome });
    w.events.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok((outcome, cursor, w.totals, w.events))
}

/// Simulates one word with a fresh generator seeded by `seed`.
pub fn run_word(word: &str, layout: &GridLayout, config: &McConfig, seed: u64) -> Result<SessionLog> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (outcome, cursor, totals, events) = simulate_word(word, layout, config, &mut rng, true)?;
    Ok(SessionLog {
        word: word.to_string(),
        seed,
        rng: RNG_ALGORITHM.to_string(),
        mode: config.mode,
        unit_delay: config.timing(layout)?.unit_delay(),
        events,
        outcome,
        output: cursor.output.iter().collect(),
        totals,
    })
}

/// Totals of one word without the event list.
pub fn sample_totals(
    word: &str,
    layout: &GridLayout,
    config: &McConfig,
    seed: u64,
) -> Result<(Terminal, Totals)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (outcome, _, totals, _) = simulate_word(word, layout, config, &mut rng, false)?;
    Ok((outcome, totals))
}

/// Seed of word `index` within run `seed` (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Outcomes and totals of `runs` independent simulations of one word.
pub fn sample_word_runs(
    word: &str,
    layout: &GridLayout,
    config: &McConfig,
    base_seed: u64,
    runs: usize,
) -> Result<Vec<(Terminal, Totals)>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|r| sample_totals(word, layout, config, derive_seed(base_seed, r)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub low: f64,
    pub high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhraseStats {
    pub runs: usize,
    pub chars: usize,
    pub wpm: Estimate,
    pub cpc: Estimate,
    pub cer: Estimate,
    pub mean_seconds: f64,
    pub p_failure: f64,
    /// Per-run standard deviations of phrase time, clicks and errors.
    pub seconds_std: f64,
    pub clicks_std: f64,
    pub errors_std: f64,
}

/// Seconds, clicks, errors and failure indicator summed over one run of a phrase.
type RunTotals = (f64, f64, f64, f64);

/// Types every word of the phrase once per seed and reduces the per-run
/// totals to phrase-level rates with 95% normal-approximation intervals.
/// wpm uses mean characters over mean time.
pub fn run_phrase(
    words: &[String],
    layout: &GridLayout,
    config: &McConfig,
    seeds: &[u64],
) -> Result<PhraseStats> {
    if words.is_empty() || seeds.is_empty() {
        return Err(Error::param("need at least one word and one seed"));
    }
    let unit = config.timing(layout)?.unit_delay();
    let chars: usize = words.iter().map(|w| w.chars().count()).sum();
    let per_run: Vec<(f64, f64, f64, f64)> = seeds
        .par_iter()
        .map(|&seed| {
            let mut acc = (0.0, 0.0, 0.0, 0.0);
            for (i, word) in words.iter().enumerate() {
                let (outcome, t) = sample_totals(word, layout, config, derive_seed(seed, i as u64))?;
                acc.0 += t.time_units as f64 * unit;
                acc.1 += t.clicks as f64;
                acc.2 += t.errors as f64;
                acc.3 += f64::from(u8::from(outcome == Terminal::Failure));
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let n = per_run.len() as f64;
    let spread = |f: &dyn Fn(&RunTotals) -> f64| -> (f64, f64) {
        let mean = per_run.iter().map(f).sum::<f64>() / n;
        let var = if per_run.len() > 1 {
            per_run.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        (mean, var.sqrt())
    };
    let mean_sd = |f: &dyn Fn(&RunTotals) -> f64| -> (f64, f64) {
        let (mean, sd) = spread(f);
        (mean, sd / n.sqrt())
    };
    let z = 1.96;
    let c = chars as f64;
    let (secs, secs_se) = mean_sd(&|r| r.0);
    let (clicks, clicks_se) = mean_sd(&|r| r.1);
    let (errors, errors_se) = mean_sd(&|r| r.2);
    let (fails, _) = mean_sd(&|r| r.3);
    let rate = |s: f64| if s > 0.0 { (c / 5.0) / (s / 60.0) } else { f64::INFINITY };
    Ok(PhraseStats {
        runs: seeds.len(),
        chars,
        wpm: Estimate { value: rate(secs), low: rate(secs + z * secs_se), high: rate(secs - z * secs_se) },
        cpc: Estimate { value: clicks / c, low: (clicks - z * clicks_se) / c, high: (clicks + z * clicks_se) / c },
        cer: Estimate { value: errors / c, low: (errors - z * errors_se) / c, high: (errors + z * errors_se) / c },
        mean_seconds: secs,
        p_failure: fails / words.len() as f64,
        seconds_std: spread(&|r| r.0).1,
        clicks_std: spread(&|r| r.1).1,
        errors_std: spread(&|r| r.2).1,
    })
}

/// Counts of each value.
pub fn histogram<I: IntoIterator<Item = u64>>(values: I) -> Vec<u64> {
    let mut h = Vec::new();
    for v in values {
        let v = v as usize;
        if v >= h.len() {
            h.resize(v + 1, 0);
        }
        h[v] += 1;
    }
    h
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCheck {
    /// Support value, or None for the pooled low-expectation bin.
    pub value: Option<usize>,
    pub observed: u64,
    pub expected: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub samples: u64,
    pub points: Vec<PointCheck>,
    pub max_abs_z: f64,
    pub fraction_within: f64,
    /// Observations on values the analytic PMF gives probability zero.
    pub impossible: u64,
    pub pass: bool,
}

pub const MIN_EXPECTED: f64 = 5.0;
pub const Z_LIMIT: f64 = 3.0;
pub const PASS_FRACTION: f64 = 0.99;

/// Per-point binomial z-scores of an empirical histogram against `pmf`.
/// Values expected fewer than five times are pooled into one bin; any
/// observation where the PMF is exactly zero fails the comparison.
pub fn compare(histogram: &[u64], pmf: &Pmf) -> Result<CompareReport> {
    let n: u64 = histogram.iter().sum();
    if n == 0 {
        return Err(Error::SupportMismatch("empty histogram".into()));
    }
    let nf = n as f64;
    let z_of = |obs: u64, p: f64| -> f64 {
        let e = nf * p;
        let var = nf * p * (1.0 - p);
        if var > 0.0 {
            (obs as f64 - e) / var.sqrt()
        } else if (obs as f64 - e).abs() < 0.5 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    let len = histogram.len().max(pmf.len());
    let mut points = Vec::new();
    let mut impossible = 0;
    let (mut pool_obs, mut pool_p) = (0u64, 0.0);
    for k in 0..len {
        let obs = histogram.get(k).copied().unwrap_or(0);
        let p = pmf.get(k);
        if p == 0.0 {
            impossible += obs;
            continue;
        }
        if nf * p >= MIN_EXPECTED {
            points.push(PointCheck { value: Some(k), observed: obs, expected: nf * p, z: z_of(obs, p) });
        } else {
            pool_obs += obs;
            pool_p += p;
        }
    }
    if pool_p > 0.0 {
        points.push(PointCheck {
            value: None,
            observed: pool_obs,
            expected: nf * pool_p,
            z: z_of(pool_obs, pool_p.min(1.0)),
        });
    }
    let within = points.iter().filter(|p| p.z.abs() <= Z_LIMIT).count();
    let fraction_within = if points.is_empty() { 1.0 } else { within as f64 / points.len() as f64 };
    let max_abs_z = points.iter().map(|p| p.z.abs()).fold(0.0, f64::max);
    Ok(CompareReport {
        samples: n,
        points,
        max_abs_z,
        fraction_within,
        impossible,
        pass: impossible == 0 && fraction_within >= PASS_FRACTION,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub analytic_mean: f64,
    pub empirical_mean: f64,
    pub z_mean: f64,
    pub analytic_std: f64,
    pub empirical_std: f64,
    pub z_std: f64,
}

impl MomentCheck {
    pub fn pass(&self) -> bool {
        self.z_mean.abs() <= Z_LIMIT && self.z_std.abs() <= Z_LIMIT
    }
}

/// Compares sample mean and standard deviation with the PMF's, in units of
/// their standard errors (the latter from the fourth central moment).
pub fn compare_moments(histogram: &[u64], pmf: &Pmf) -> MomentCheck {
    let n: u64 = histogram.iter().sum();
    let nf = n as f64;
    let mean = histogram.iter().enumerate().map(|(k, &c)| k as f64 * c as f64).sum::<f64>() / nf;
    let var = histogram.iter().enumerate().map(|(k, &c)| (k as f64 - mean).powi(2) * c as f64).sum::<f64>()
        / (nf - 1.0).max(1.0);
    let mu = pmf.mean();
    let sigma2 = pmf.variance();
    let sigma = sigma2.sqrt();
    let mu4 = pmf.central_moment(4);
    let se_mean = (sigma2 / nf).sqrt();
    let se_std = if sigma > 0.0 { ((mu4 - sigma2 * sigma2) / (4.0 * sigma2 * nf)).max(0.0).sqrt() } else { 0.0 };
    let ratio = |d: f64, se: f64| if se > 0.0 { d / se } else if d.abs() < 1e-12 { 0.0 } else { f64::INFINITY };
    MomentCheck {
        analytic_mean: mu,
        empirical_mean: mean,
        z_mean: ratio(mean - mu, se_mean),
        analytic_std: sigma,
        empirical_std: var.sqrt(),
        z_std: ratio(var.sqrt() - sigma, se_std),
    }
}
