//! A scanner driven by real click timestamps. Click delay, click rejection
//! and false positives are injected from seeded streams, so a transcript
//! of client timestamps replays identically.
//!
//! Scanning starts at t = 0 and runs group after group. The session only
//! moves forward when the client reports a time (a click or a poll). A
//! click whose delayed time falls before the last state change is late and
//! has no effect.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::Terminal;
use crate::error::{Error, Result};
use crate::experiment::{split_phrase, Engine, ParamSet};
use crate::layout::{render_text, GridLayout, ScanMode, ScanTiming};
use crate::montecarlo::{
    derive_seed, map_decision, Cursor, Effect, EventKind, GroupKind, LogEvent, Totals, RNG_ALGORITHM,
};
use crate::noise::{sample_false_positives, CellWindow, NoiseParams};
use crate::pmf::{analyze, Pmf, WordAnalysis};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    #[serde(default = "default_layout")]
    pub layout: String,
    #[serde(default = "default_phrase")]
    pub phrase: String,
    #[serde(default)]
    pub mode: ScanMode,
    #[serde(default)]
    pub params: ParamSet,
    /// `montecarlo` allows configurations without an analytic chain.
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub seed: u64,
}

fn default_layout() -> String {
    "grid_2x2".into()
}

fn default_phrase() -> String {
    "a_".into()
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            layout: default_layout(),
            phrase: default_phrase(),
            mode: ScanMode::Slow,
            params: ParamSet::default(),
            engine: Engine::Analytic,
            seed: 0,
        }
    }
}

/// Highlight schedule of one group, in seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSchedule {
    pub cells: usize,
    pub tick: f64,
    pub cell_durations: Vec<f64>,
    /// Highlight time per cell with the tick folded into the first.
    pub durations: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleView {
    pub mode: ScanMode,
    pub unit_delay: f64,
    pub rows: GroupSchedule,
    /// Column-scan schedule of each row, top to bottom.
    pub columns: Vec<GroupSchedule>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClickStatus {
    Accepted,
    Rejected,
    /// Delayed into a stretch of time that had already been decided.
    Late,
    /// The session finished before the click was registered.
    Ignored,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EffectKind {
    RowSelected { row: usize },
    Typed { symbol: String },
    Deleted,
    NoOp,
    Undo,
    WordFinished { word: String, outcome: Terminal },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectRecord {
    pub time_ms: f64,
    /// Whether a false positive caused this effect.
    pub false_positive: bool,
    #[serde(flatten)]
    pub kind: EffectKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CursorView {
    pub word_index: usize,
    pub target: String,
    pub output: String,
    pub group: GroupKind,
    pub row: Option<usize>,
    pub cell: usize,
    pub undo: usize,
    pub group_start_ms: f64,
    pub settled_ms: f64,
    pub finished: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClickReport {
    pub t_ms: f64,
    pub status: ClickStatus,
    /// Delayed click time as seen by the scanner.
    pub observed_ms: Option<f64>,
    pub false_positives_ms: Vec<f64>,
    pub effects: Vec<EffectRecord>,
    pub cursor: CursorView,
    pub selections: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvanceReport {
    pub false_positives_ms: Vec<f64>,
    pub effects: Vec<EffectRecord>,
    pub cursor: CursorView,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordRecord {
    pub word: String,
    pub output: String,
    pub outcome: Terminal,
    pub scans: u64,
    pub time_units: u64,
    pub clicks: u64,
    pub errors: u64,
    pub start_ms: f64,
    pub end_ms: f64,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmfSummary {
    pub mean: f64,
    pub std: f64,
    pub min: Option<usize>,
    pub max: Option<usize>,
}

impl From<&Pmf> for PmfSummary {
    fn from(p: &Pmf) -> Self {
        Self { mean: p.mean(), std: p.std(), min: p.min_support(), max: p.max_support() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordPrediction {
    pub word: String,
    pub scans: PmfSummary,
    pub time_units: PmfSummary,
    pub clicks: PmfSummary,
    pub errors: PmfSummary,
    pub p_correct: f64,
    pub p_error: f64,
    pub p_failure: f64,
}

impl WordPrediction {
    fn new(word: &str, a: &WordAnalysis) -> Self {
        Self {
            word: word.to_string(),
            scans: (&a.scans).into(),
            time_units: (&a.time_units).into(),
            clicks: (&a.clicks).into(),
            errors: (&a.errors).into(),
            p_correct: a.outcome.p_correct,
            p_error: a.outcome.p_error,
            p_failure: a.outcome.p_failure,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub chars: usize,
    pub seconds: f64,
    pub scans: f64,
    pub clicks: f64,
    pub errors: f64,
    pub wpm: f64,
    pub cpc: f64,
    pub cer: f64,
}

impl Rates {
    fn new(chars: usize, seconds: f64, scans: f64, clicks: f64, errors: f64) -> Self {
        let c = chars as f64;
        let wpm = if seconds > 0.0 { (c / 5.0) / (seconds / 60.0) } else { f64::INFINITY };
        Self { chars, seconds, scans, clicks, errors, wpm, cpc: clicks / c, cer: errors / c }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionStats {
    pub words: Vec<WordRecord>,
    pub empirical: Rates,
    /// Expected totals over the same completed words.
    pub analytic: Option<Rates>,
    pub predictions: Vec<WordPrediction>,
    pub analytic_note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Pending {
    time: f64,
    false_positive: bool,
}

#[derive(Debug)]
pub struct LiveSession {
    config: SessionConfig,
    layout: GridLayout,
    params: NoiseParams,
    timing: ScanTiming,
    words: Vec<String>,
    word: usize,
    cursor: Cursor,
    click_rng: ChaCha8Rng,
    fp_rng: ChaCha8Rng,
    group_start: f64,
    windows: Vec<CellWindow>,
    pending: Vec<Pending>,
    settled: f64,
    last_click: f64,
    horizon: u64,
    word_start: f64,
    totals: Totals,
    log: Vec<LogEvent>,
    completed: Vec<WordRecord>,
    finished: bool,
    analyses: HashMap<String, WordAnalysis>,
}

/// Scratch output of one advance.
#[derive(Default)]
struct Changes {
    false_positives: Vec<f64>,
    effects: Vec<EffectRecord>,
}

impl LiveSession {
    /// Starts a session. With the analytic engine the configuration must
    /// also admit an analytic chain.
    pub fn new(config: SessionConfig, layout: GridLayout) -> Result<Self> {
        let words = split_phrase(&config.phrase, &layout)?;
        let mc = config.params.mc_config(config.mode)?;
        if config.engine == Engine::Analytic {
            config.params.build_chain(&words[0], &layout, config.mode)?;
        }
        let timing = mc.timing(&layout)?;
        let mut s = Self {
            click_rng: ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0)),
            fp_rng: ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 1)),
            cursor: Cursor::new(&words[0]),
            horizon: horizon(&words[0], &layout, mc.params.kappa),
            params: mc.params,
            timing,
            config,
            layout,
            words,
            word: 0,
            group_start: 0.0,
            windows: Vec::new(),
            pending: Vec::new(),
            settled: 0.0,
            last_click: 0.0,
            word_start: 0.0,
            totals: Totals::default(),
            log: Vec::new(),
            completed: Vec::new(),
            finished: false,
            analyses: HashMap::new(),
        };
        s.start_group(0.0);
        Ok(s)
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn layout(&self) -> &GridLayout {
        &self.layout
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn completed(&self) -> &[WordRecord] {
        &self.completed
    }

    pub fn schedule(&self) -> ScheduleView {
        let group = |len: usize| {
            let s = self.timing.schedule(len);
            GroupSchedule { cells: len, tick: s.tick, durations: s.highlight_durations(), cell_durations: s.cells }
        };
        ScheduleView {
            mode: self.timing.mode,
            unit_delay: self.timing.unit_delay(),
            rows: group(self.layout.row_count()),
            columns: (1..=self.layout.row_count()).map(|r| group(self.layout.row_len(r))).collect(),
        }
    }

    pub fn cursor(&self) -> CursorView {
        CursorView {
            word_index: self.word,
            target: render_text(&self.words[self.word]),
            output: render_text(&self.cursor.output.iter().collect::<String>()),
            group: self.cursor.group,
            row: (self.cursor.group == GroupKind::Column).then_some(self.cursor.row),
            cell: self.cursor.cell,
            undo: self.cursor.undo,
            group_start_ms: self.group_start * 1000.0,
            settled_ms: self.settled * 1000.0,
            finished: self.finished,
        }
    }

    /// Text selected so far across all words, spaces rendered.
    pub fn selections(&self) -> String {
        let mut s: String = self.completed.iter().map(|w| w.output.clone()).collect();
        if !self.finished {
            s.push_str(&render_text(&self.cursor.output.iter().collect::<String>()));
        }
        s
    }

    /// Lets scanning run up to `t_ms` without a click.
    pub fn advance(&mut self, t_ms: f64) -> Result<AdvanceReport> {
        check_time(t_ms)?;
        let mut ch = Changes::default();
        self.advance_to(t_ms / 1000.0, &mut ch);
        Ok(AdvanceReport { false_positives_ms: ch.false_positives, effects: ch.effects, cursor: self.cursor() })
    }

    /// Registers a physical click at `t_ms` since the session started.
    pub fn click(&mut self, t_ms: f64) -> Result<ClickReport> {
        check_time(t_ms)?;
        if self.finished {
            return Err(Error::SessionFinished);
        }
        if t_ms < self.last_click * 1000.0 {
            return Err(Error::ClickOutOfOrder { t_ms, last_ms: self.last_click * 1000.0 });
        }
        let t = t_ms / 1000.0;
        self.last_click = t;
        let mut ch = Changes::default();
        self.advance_to(t, &mut ch);

        let (status, observed) = if self.finished {
            (ClickStatus::Ignored, None)
        } else {
            let timing = &self.params.click_timing;
            let observed = t + timing.delta + timing.sample_offset(&mut self.click_rng);
            let accepted = self.click_rng.random::<f64>() >= self.params.switch_noise.f;
            if !accepted {
                self.log.push(LogEvent { time: t, kind: EventKind::RejectedClick });
                (ClickStatus::Rejected, Some(observed))
            } else {
                self.log.push(LogEvent { time: observed, kind: EventKind::TrueClick });
                if observed < self.settled {
                    (ClickStatus::Late, Some(observed))
                } else {
                    self.push_pending(Pending { time: observed, false_positive: false });
                    self.advance_to(t, &mut ch);
                    (ClickStatus::Accepted, Some(observed))
                }
            }
        };
        Ok(ClickReport {
            t_ms,
            status,
            observed_ms: observed.map(|o| o * 1000.0),
            false_positives_ms: ch.false_positives,
            effects: ch.effects,
            cursor: self.cursor(),
            selections: self.selections(),
        })
    }

    fn push_pending(&mut self, p: Pending) {
        let at = self.pending.partition_point(|q| q.time <= p.time);
        self.pending.insert(at, p);
    }

    /// Removes pending events before `before`, logging dropped false
    /// positives.
    fn drop_pending_before(&mut self, before: f64, ch: &mut Changes) {
        while self.pending.first().is_some_and(|p| p.time < before) {
            let p = self.pending.remove(0);
            if p.false_positive {
                self.reveal_false_positive(p.time, ch);
            }
        }
    }

    fn reveal_false_positive(&mut self, time: f64, ch: &mut Changes) {
        self.log.push(LogEvent { time, kind: EventKind::FalsePositive });
        ch.false_positives.push(time * 1000.0);
    }

    fn start_group(&mut self, at: f64) {
        self.group_start = at;
        self.settled = at;
        let len = self.cursor.group_len(&self.layout);
        let schedule = self.timing.schedule(len);
        self.windows = schedule.windows();
        for offset in sample_false_positives(self.params.switch_noise.lambda, schedule.total(), &mut self.fp_rng) {
            self.push_pending(Pending { time: at + offset, false_positive: true });
        }
        self.enter(at);
    }

    fn enter(&mut self, at: f64) {
        let len = self.cursor.group_len(&self.layout);
        let w = self.timing.weight(self.cursor.cell, len);
        self.totals.scans += u64::from(w.scans);
        self.totals.time_units += u64::from(w.units);
        let row = (self.cursor.group == GroupKind::Column).then_some(self.cursor.row);
        self.log.push(LogEvent {
            time: at,
            kind: EventKind::Scan { group: self.cursor.group, row, cell: self.cursor.cell },
        });
    }

    fn window(&self, cell: usize) -> (f64, f64) {
        let w = self.windows[cell - 1];
        (self.group_start + w.start, self.group_start + w.end())
    }

    fn advance_to(&mut self, t: f64, ch: &mut Changes) {
        while !self.finished {
            let len = self.windows.len();
            let cell = self.cursor.cell;
            let (start, end) = self.window(cell);
            match self.timing.mode {
                ScanMode::Slow => {
                    // Events during the tick, or left over from an earlier
                    // cell, cannot trigger anything.
                    self.drop_pending_before(start.min(t), ch);
                    if let Some(&p) = self.pending.first().filter(|p| p.time < end && p.time <= t) {
                        self.pending.remove(0);
                        if p.false_positive {
                            self.reveal_false_positive(p.time, ch);
                        }
                        if self.timed_out(start, ch) {
                            continue;
                        }
                        self.trigger(cell, p.time, end, p.false_positive, ch);
                        // Later events inside the triggered cell are ignored.
                        self.drop_pending_before(end.min(t), ch);
                    } else if end <= t {
                        if !self.timed_out(start, ch) {
                            self.miss(cell, len, end, ch);
                        }
                    } else {
                        break;
                    }
                }
                ScanMode::Fast => {
                    if end > t {
                        break;
                    }
                    if self.timed_out(start, ch) {
                        continue;
                    }
                    if cell < len {
                        self.miss(cell, len, end, ch);
                        continue;
                    }
                    let mut seen = Vec::new();
                    while self.pending.first().is_some_and(|p| p.time < end) {
                        seen.push(self.pending.remove(0));
                    }
                    let mut decision = None;
                    for p in &seen {
                        if p.false_positive {
                            self.reveal_false_positive(p.time, ch);
                        }
                        if decision.is_none() && p.time >= self.group_start {
                            let tau = p.time - self.group_start - self.params.click_timing.delta;
                            decision = map_decision(tau, &self.windows, &self.params).map(|k| (k, p.false_positive));
                        }
                    }
                    match decision {
                        Some((k, fp)) => self.trigger(k, end, end, fp, ch),
                        None => self.miss(cell, len, end, ch),
                    }
                }
            }
        }
    }

    /// Counts a chain step; at the horizon the word fails at `at`.
    fn timed_out(&mut self, at: f64, ch: &mut Changes) -> bool {
        if self.totals.steps + 1 >= self.horizon {
            self.finish_word(Terminal::Failure, at, false, ch);
            return true;
        }
        self.totals.steps += 1;
        false
    }

    fn miss(&mut self, cell: usize, len: usize, end: f64, ch: &mut Changes) {
        let cancelled = self.cursor.miss(&self.layout, self.params.undo_window);
        self.settled = end;
        if cell < len {
            self.enter(end);
            return;
        }
        if cancelled {
            self.log.push(LogEvent { time: end, kind: EventKind::Undo });
            ch.effects.push(EffectRecord { time_ms: end * 1000.0, false_positive: false, kind: EffectKind::Undo });
        }
        self.start_group(end);
    }

    fn trigger(&mut self, cell: usize, at: f64, next: f64, false_positive: bool, ch: &mut Changes) {
        self.cursor.cell = cell;
        self.totals.clicks += 1;
        let before = self.cursor.clone();
        let effect = self.cursor.click(&self.layout, self.params.error_limit);
        let symbol = (before.group == GroupKind::Column)
            .then(|| self.layout.symbol_at(before.row, cell).map(|c| c.to_string()))
            .flatten();
        self.log.push(LogEvent { time: at, kind: EventKind::Selection { group: before.group, cell, symbol } });
        let kind = match &effect {
            Effect::RowSelected(row) => Some(EffectKind::RowSelected { row: *row }),
            Effect::Typed(c) => Some(EffectKind::Typed { symbol: render_text(&c.to_string()) }),
            Effect::Deleted => Some(EffectKind::Deleted),
            Effect::NoOp => Some(EffectKind::NoOp),
            Effect::Finished(_) => None,
        };
        if matches!(effect, Effect::Deleted | Effect::NoOp) {
            self.log.push(LogEvent { time: at, kind: EventKind::Delete });
        }
        if let Some(kind) = kind {
            ch.effects.push(EffectRecord { time_ms: at * 1000.0, false_positive, kind });
        }
        match effect {
            Effect::Finished(outcome) => self.finish_word(outcome, next, false_positive, ch),
            _ => self.start_group(next),
        }
    }

    fn finish_word(&mut self, outcome: Terminal, at: f64, false_positive: bool, ch: &mut Changes) {
        let word = self.words[self.word].clone();
        let errors = match outcome {
            Terminal::Correct => 0,
            _ => self.cursor.errors() as u64,
        };
        self.log.push(LogEvent { time: at, kind: EventKind::Terminal { outcome } });
        ch.effects.push(EffectRecord {
            time_ms: at * 1000.0,
            false_positive,
            kind: EffectKind::WordFinished { word: render_text(&word), outcome },
        });
        self.completed.push(WordRecord {
            word: render_text(&word),
            output: render_text(&self.cursor.output.iter().collect::<String>()),
            outcome,
            scans: self.totals.scans,
            time_units: self.totals.time_units,
            clicks: self.totals.clicks,
            errors,
            start_ms: self.word_start * 1000.0,
            end_ms: at * 1000.0,
            seconds: self.totals.time_units as f64 * self.timing.unit_delay(),
        });
        self.settled = at;
        if self.word + 1 < self.words.len() {
            self.word += 1;
            self.cursor = Cursor::new(&self.words[self.word]);
            self.horizon = horizon(&self.words[self.word], &self.layout, self.params.kappa);
            self.totals = Totals::default();
            self.word_start = at;
            self.start_group(at);
        } else {
            self.finished = true;
            self.pending.clear();
        }
    }

    /// Empirical rates over completed words beside the analytic
    /// expectation for the same words.
    pub fn stats(&mut self) -> Result<SessionStats> {
        if self.completed.is_empty() {
            return Err(Error::NoCompletedWord);
        }
        let chars: usize = self.words[..self.completed.len()].iter().map(|w| w.chars().count()).sum();
        let sum = |f: fn(&WordRecord) -> f64| self.completed.iter().map(f).sum::<f64>();
        let empirical = Rates::new(
            chars,
            sum(|w| w.seconds),
            sum(|w| w.scans as f64),
            sum(|w| w.clicks as f64),
            sum(|w| w.errors as f64),
        );
        let mut predictions = Vec::new();
        let mut note = None;
        for word in &self.words[..self.completed.len()] {
            if !self.analyses.contains_key(word) {
                match self.config.params.build_chain(word, &self.layout, self.config.mode) {
                    Ok(chain) => {
                        self.analyses.insert(word.clone(), analyze(&chain));
                    }
                    Err(e) => {
                        note = Some(e.to_string());
                        break;
                    }
                }
            }
            predictions.push(WordPrediction::new(word, &self.analyses[word]));
        }
        let analytic = if note.is_none() {
            let unit = self.timing.unit_delay();
            let p = &predictions;
            Some(Rates::new(
                chars,
                p.iter().map(|w| w.time_units.mean * unit).sum(),
                p.iter().map(|w| w.scans.mean).sum(),
                p.iter().map(|w| w.clicks.mean).sum(),
                p.iter().map(|w| w.errors.mean).sum(),
            ))
        } else {
            predictions.clear();
            None
        };
        Ok(SessionStats { words: self.completed.clone(), empirical, analytic, predictions, analytic_note: note })
    }

    /// Header, events in time order and one summary line per completed
    /// word, each a JSON object.
    pub fn to_ndjson(&self) -> String {
        let mut events = self.log.clone();
        events.sort_by(|a, b| a.time.total_cmp(&b.time));
        let mut out = String::new();
        let header = serde_json::json!({
            "record": "header",
            "phrase": render_text(&self.config.phrase),
            "layout": self.layout.name(),
            "mode": self.timing.mode,
            "seed": self.config.seed,
            "rng": RNG_ALGORITHM,
            "unit_delay": self.timing.unit_delay(),
        });
        out.push_str(&header.to_string());
        out.push('\n');
        for e in &events {
            let mut v = serde_json::to_value(e).expect("event serializes");
            v["record"] = "event".into();
            v["time_ms"] = (e.time * 1000.0).into();
            out.push_str(&v.to_string());
            out.push('\n');
        }
        for w in &self.completed {
            let mut v = serde_json::to_value(w).expect("record serializes");
            v["record"] = "word".into();
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

fn check_time(t_ms: f64) -> Result<()> {
    if t_ms.is_finite() && t_ms >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("timestamps must be finite and >= 0 ms, got {t_ms}")))
    }
}

fn horizon(word: &str, layout: &GridLayout, kappa: f64) -> u64 {
    (kappa * (word.chars().count() * layout.row_count() * layout.max_row_len()) as f64).ceil() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noiseless(phrase: &str, mode: ScanMode) -> LiveSession {
        let params = ParamSet { sigma: 1e-6, t_fast: Some(0.5), ..ParamSet::default() };
        let config = SessionConfig { phrase: phrase.into(), mode, params, ..SessionConfig::default() };
        LiveSession::new(config, GridLayout::grid_2x2()).unwrap()
    }

    #[test]
    fn slow_schedule_folds_tick() {
        let s = noiseless("a_", ScanMode::Slow);
        assert_eq!(s.schedule().rows.durations, vec![2.0, 1.0]);
        assert_eq!(s.schedule().rows.tick, 1.0);
    }

    #[test]
    fn noiseless_clicks_at_centres_follow_minimum_path() {
        let mut s = noiseless("a_", ScanMode::Slow);
        // Row 1 centre, column 1 centre, row 1 centre, column 2 centre.
        let mut at = 0.0;
        for cell in [1usize, 1, 1, 2] {
            let t = at + 1.0 + (cell as f64 - 1.0) + 0.5;
            let r = s.click(t * 1000.0).unwrap();
            assert_eq!(r.status, ClickStatus::Accepted);
            at = t + 0.5;
        }
        // The last delayed click may land just after its timestamp.
        s.advance(at * 1000.0).unwrap();
        assert!(s.is_finished());
        let w = &s.completed()[0];
        assert_eq!((w.outcome, w.scans, w.clicks, w.errors), (Terminal::Correct, 9, 4, 0));
        let stats = s.stats().unwrap();
        assert_eq!(stats.empirical.scans, 9.0);
        assert!((stats.analytic.unwrap().scans - 9.0).abs() < 1e-9);
        assert!(matches!(s.click(1e6), Err(Error::SessionFinished)));
    }

    #[test]
    fn fast_mode_decides_at_group_end() {
        let mut s = noiseless("a_", ScanMode::Fast);
        // Fast group: tick 0.5, cell 0.5, last cell 1.0.
        let mut at = 0.0;
        for cell in [1usize, 1, 1, 2] {
            let centre = if cell == 1 { 0.75 } else { 1.5 };
            s.click((at + centre) * 1000.0).unwrap();
            at += 2.0;
        }
        s.advance(at * 1000.0).unwrap();
        assert!(s.is_finished());
        let w = &s.completed()[0];
        assert_eq!((w.outcome, w.scans, w.time_units), (Terminal::Correct, 12, 16));
    }

    #[test]
    fn certain_rejection() {
        let params = ParamSet { f: 1.0, ..ParamSet::default() };
        let config = SessionConfig { params, ..SessionConfig::default() };
        let mut s = LiveSession::new(config, GridLayout::grid_2x2()).unwrap();
        for i in 0..20 {
            assert_eq!(s.click(1500.0 + 700.0 * i as f64).unwrap().status, ClickStatus::Rejected);
        }
    }

    #[test]
    fn stats_need_a_completed_word_and_clicks_need_order() {
        let mut s = noiseless("a_", ScanMode::Slow);
        assert!(matches!(s.stats(), Err(Error::NoCompletedWord)));
        s.click(2000.0).unwrap();
        assert!(matches!(s.click(1000.0), Err(Error::ClickOutOfOrder { .. })));
        assert!(s.click(f64::NAN).is_err());
    }

    #[test]
    fn false_positives_replay_from_seed() {
        let run = || {
            let params = ParamSet { lambda: 0.5, ..ParamSet::default() };
            let config = SessionConfig { params, seed: 11, ..SessionConfig::default() };
            let mut s = LiveSession::new(config, GridLayout::grid_2x2()).unwrap();
            let mut fps = Vec::new();
            for t in [2500.0, 7000.0, 15000.0] {
                if let Ok(r) = s.click(t) {
                    fps.extend(r.false_positives_ms);
                }
            }
            (fps, s.to_ndjson())
        };
        let (a, log_a) = run();
        let (b, log_b) = run();
        assert!(!a.is_empty());
        assert_eq!(a, b);
        assert_eq!(log_a, log_b);
    }

    #[test]
    fn fast_false_positives_need_montecarlo_engine() {
        let params = ParamSet { lambda: 0.1, t_fast: Some(0.5), ..ParamSet::default() };
        let config = SessionConfig { mode: ScanMode::Fast, params, ..SessionConfig::default() };
        assert!(matches!(
            LiveSession::new(config.clone(), GridLayout::grid_2x2()),
            Err(Error::FastFalsePositives { .. })
        ));
        let mc = SessionConfig { engine: Engine::Montecarlo, ..config };
        assert!(LiveSession::new(mc, GridLayout::grid_2x2()).is_ok());
    }
}
