//! Word-specific absorbing Markov chains of user/system interaction.
//!
//! Live states are numbered in blocks of `(m, e)`, `m` outer. Inside a block
//! come the row-scan cells, then for every undo step `u` the column-scan cells
//! of every row. The three terminals follow the live states in the order
//! Error, Failure, Correct.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{CellWeight, FastParams, GridLayout, ScanMode, ScanTiming};
use crate::noise::{
    cell_mean, miss_prob_from_overlap, overlap_prob, Aim, CellWindow, ClickTiming, NoiseParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Row,
    /// Column scan of the selected `row`, during undo step `u`.
    Column { row: usize, u: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateId {
    pub phase: Phase,
    /// 1-based cell of the current group being scanned.
    pub cell: usize,
    /// Correct letters written so far.
    pub m: usize,
    /// Spurious letters waiting to be deleted.
    pub e: usize,
}

impl StateId {
    pub fn row_scan(cell: usize, m: usize, e: usize) -> Self {
        Self { phase: Phase::Row, cell, m, e }
    }

    pub fn column_scan(row: usize, u: usize, cell: usize, m: usize, e: usize) -> Self {
        Self { phase: Phase::Column { row, u }, cell, m, e }
    }

    /// 1 during a row scan, 0 during a column scan.
    pub fn r(&self) -> u8 {
        match self.phase {
            Phase::Row => 1,
            Phase::Column { .. } => 0,
        }
    }

    pub fn u(&self) -> Option<usize> {
        match self.phase {
            Phase::Row => None,
            Phase::Column { u, .. } => Some(u),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    Error,
    Failure,
    Correct,
}

/// How a slow-scan cell's click probability is conditioned on earlier cells
/// of the same group scan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerModel {
    /// One click attempt per group scan: the overlap of a cell is conditioned
    /// on the attempt not having triggered an earlier cell.
    #[default]
    SingleAttempt,
    /// Every cell uses its unconditional overlap.
    PerCellIndependent,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainOptions {
    pub trigger: TriggerModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Miss,
    /// A switch event selected 1-based `cell` of the group.
    Click { cell: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub to: usize,
    pub prob: f64,
    pub label: Label,
}

impl Transition {
    pub fn is_click(&self) -> bool {
        matches!(self.label, Label::Click { .. })
    }
}

#[derive(Clone, Debug)]
pub struct ScanChain {
    word: Vec<char>,
    timing: ScanTiming,
    states: Vec<StateId>,
    index: HashMap<StateId, usize>,
    transitions: Vec<Vec<Transition>>,
    weights: Vec<CellWeight>,
    horizon: usize,
}

impl ScanChain {
    pub fn word(&self) -> String {
        self.word.iter().collect()
    }

    /// Word length M, terminator included.
    pub fn word_len(&self) -> usize {
        self.word.len()
    }

    pub fn mode(&self) -> ScanMode {
        self.timing.mode
    }

    pub fn timing(&self) -> &ScanTiming {
        &self.timing
    }

    pub fn unit_delay(&self) -> f64 {
        self.timing.unit_delay()
    }

    pub fn live_count(&self) -> usize {
        self.states.len()
    }

    /// Total number of states, terminals included.
    pub fn state_count(&self) -> usize {
        self.states.len() + 3
    }

    pub fn initial_index(&self) -> usize {
        0
    }

    pub fn terminal_index(&self, t: Terminal) -> usize {
        let base = self.states.len();
        match t {
            Terminal::Error => base,
            Terminal::Failure => base + 1,
            Terminal::Correct => base + 2,
        }
    }

    pub fn terminal(&self, index: usize) -> Option<Terminal> {
        match index.checked_sub(self.states.len())? {
            0 => Some(Terminal::Error),
            1 => Some(Terminal::Failure),
            2 => Some(Terminal::Correct),
            _ => None,
        }
    }

    pub fn is_live(&self, index: usize) -> bool {
        index < self.states.len()
    }

    pub fn state(&self, index: usize) -> Option<&StateId> {
        self.states.get(index)
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn index_of(&self, id: &StateId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Outgoing transitions; a terminal has a single self-loop.
    pub fn transitions(&self, index: usize) -> &[Transition] {
        &self.transitions[index]
    }

    /// Scan weight collected on entering `index`; zero for terminals.
    pub fn weight(&self, index: usize) -> CellWeight {
        self.weights.get(index).copied().unwrap_or(CellWeight { scans: 0, units: 0 })
    }

    /// Horizon T in steps; all live mass is forced into Failure at step T.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Character errors k = M − m + e charged when `from` moves into a
    /// terminal. A terminating click writes one more wrong symbol.
    pub fn absorption_errors(&self, from: usize, to: usize) -> usize {
        let s = &self.states[from];
        match self.terminal(to) {
            Some(Terminal::Correct) => 0,
            Some(_) => self.word.len() - s.m + s.e + 1,
            None => 0,
        }
    }

    /// Errors charged when `from` is still live at the horizon.
    pub fn timeout_errors(&self, from: usize) -> usize {
        let s = &self.states[from];
        self.word.len() - s.m + s.e
    }
}

/// Checks that `word` ends in a terminator and uses only layout letters.
pub fn parse_word(word: &str, layout: &GridLayout) -> Result<Vec<char>> {
    let chars: Vec<char> = word.chars().collect();
    let bad = |reason: &str| Error::InvalidWord { word: word.to_string(), reason: reason.into() };
    let (&last, body) = chars.split_last().ok_or_else(|| bad("empty word"))?;
    if !layout.is_terminator(last) {
        return Err(bad("must end with a terminator"));
    }
    for &c in body {
        if layout.is_terminator(c) || c == layout.delete_symbol() {
            return Err(bad("terminators and delete may only appear at the end"));
        }
    }
    for &c in &chars {
        layout.locate(c)?;
    }
    Ok(chars)
}

/// The cell the user aims at in `state`.
pub fn intended_cell(state: &StateId, word: &str, layout: &GridLayout) -> Result<Aim> {
    let chars: Vec<char> = word.chars().collect();
    aim_for(state, &chars, layout)
}

fn aim_for(state: &StateId, word: &[char], layout: &GridLayout) -> Result<Aim> {
    let target = if state.e > 0 {
        layout.delete_symbol()
    } else {
        *word.get(state.m).ok_or_else(|| Error::InvalidWord {
            word: word.iter().collect(),
            reason: format!("no letter left to aim at with m = {}", state.m),
        })?
    };
    let (row, col) = layout.locate(target)?;
    Ok(match state.phase {
        Phase::Row => Aim::Cell(row),
        Phase::Column { row: r, .. } if r == row => Aim::Cell(col),
        Phase::Column { .. } => Aim::Wait,
    })
}

pub fn build_slow(word: &str, layout: &GridLayout, params: &NoiseParams) -> Result<ScanChain> {
    build_slow_with(word, layout, params, ChainOptions::default())
}

pub fn build_slow_with(
    word: &str,
    layout: &GridLayout,
    params: &NoiseParams,
    options: ChainOptions,
) -> Result<ScanChain> {
    params.validate()?;
    let timing = ScanTiming::slow(params.t_scan, layout.tick_prefix());
    Builder::new(word, layout, params, timing, options)?.build()
}

pub fn build_fast(word: &str, layout: &GridLayout, fast: &FastParams) -> Result<ScanChain> {
    fast.validate()?;
    if fast.base.switch_noise.lambda != 0.0 {
        return Err(Error::FastFalsePositives { lambda: fast.base.switch_noise.lambda });
    }
    let timing = ScanTiming::fast(fast.base.t_scan, fast.t_fast, layout.tick_prefix());
    Builder::new(word, layout, &fast.base, timing, ChainOptions::default())?.build()
}

/// Outcome of selecting a symbol in a column scan.
enum Selection {
    Continue { m: usize, e: usize },
    Terminal(Terminal),
}

struct Builder<'a> {
    word: Vec<char>,
    layout: &'a GridLayout,
    params: &'a NoiseParams,
    timing: ScanTiming,
    options: ChainOptions,
    windows: HashMap<usize, Vec<CellWindow>>,
}

impl<'a> Builder<'a> {
    fn new(
        word: &str,
        layout: &'a GridLayout,
        params: &'a NoiseParams,
        timing: ScanTiming,
        options: ChainOptions,
    ) -> Result<Self> {
        let word = parse_word(word, layout)?;
        let mut windows = HashMap::new();
        let mut lens: Vec<usize> = layout.rows().iter().map(Vec::len).collect();
        lens.push(layout.row_count());
        for len in lens {
            windows.entry(len).or_insert_with(|| timing.schedule(len).windows());
        }
        Ok(Self { word, layout, params, timing, options, windows })
    }

    fn enumerate(&self) -> Vec<StateId> {
        let rows = self.layout.row_count();
        let mut states = Vec::new();
        for m in 0..self.word.len() {
            for e in 0..self.params.error_limit {
                states.extend((1..=rows).map(|c| StateId::row_scan(c, m, e)));
                for u in 0..self.params.undo_window {
                    for row in 1..=rows {
                        for c in 1..=self.layout.row_len(row) {
                            states.push(StateId::column_scan(row, u, c, m, e));
                        }
                    }
                }
            }
        }
        states
    }

    fn group_len(&self, s: &StateId) -> usize {
        match s.phase {
            Phase::Row => self.layout.row_count(),
            Phase::Column { row, .. } => self.layout.row_len(row),
        }
    }

    fn build(self) -> Result<ScanChain> {
        let states = self.enumerate();
        let index: HashMap<StateId, usize> =
            states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let n_live = states.len();
        let terminal = |t: Terminal| -> usize {
            n_live
                + match t {
                    Terminal::Error => 0,
                    Terminal::Failure => 1,
                    Terminal::Correct => 2,
                }
        };

        let mut transitions = Vec::with_capacity(n_live + 3);
        let mut weights = Vec::with_capacity(n_live);
        for s in &states {
            let len = self.group_len(s);
            weights.push(self.timing.weight(s.cell, len));
            let aim = aim_for(s, &self.word, self.layout)?;
            let miss_to = index[&self.after_miss(s, len)];
            let click_to = |cell: usize| -> usize {
                match self.select(s, cell) {
                    Ok(id) => index[&id],
                    Err(t) => terminal(t),
                }
            };
            let mut out = Vec::with_capacity(2);
            match self.timing.mode {
                ScanMode::Slow => {
                    let click = 1.0 - self.slow_miss(s.cell, aim, len)?;
                    out.push(Transition { to: click_to(s.cell), prob: click, label: Label::Click { cell: s.cell } });
                    out.push(Transition { to: miss_to, prob: 1.0 - click, label: Label::Miss });
                }
                ScanMode::Fast if s.cell < len => {
                    out.push(Transition { to: miss_to, prob: 1.0, label: Label::Miss });
                }
                ScanMode::Fast => {
                    let clicks = self.fast_decisions(aim, len)?;
                    let total: f64 = clicks.iter().map(|(_, p)| p).sum();
                    for (cell, p) in clicks {
                        out.push(Transition { to: click_to(cell), prob: p, label: Label::Click { cell } });
                    }
                    out.push(Transition { to: miss_to, prob: (1.0 - total).max(0.0), label: Label::Miss });
                }
            }
            transitions.push(out);
        }
        for t in [Terminal::Error, Terminal::Failure, Terminal::Correct] {
            let i = terminal(t);
            transitions.push(vec![Transition { to: i, prob: 1.0, label: Label::Miss }]);
        }

        let horizon = (self.params.kappa
            * (self.word.len() * self.layout.row_count() * self.layout.max_row_len()) as f64)
            .ceil() as usize;
        Ok(ScanChain {
            word: self.word,
            timing: self.timing,
            states,
            index,
            transitions,
            weights,
            horizon,
        })
    }

    fn after_miss(&self, s: &StateId, len: usize) -> StateId {
        if s.cell < len {
            return StateId { cell: s.cell + 1, ..*s };
        }
        match s.phase {
            Phase::Row => StateId::row_scan(1, s.m, s.e),
            Phase::Column { row, u } if u + 1 < self.params.undo_window => {
                StateId::column_scan(row, u + 1, 1, s.m, s.e)
            }
            Phase::Column { .. } => StateId::row_scan(1, s.m, s.e),
        }
    }

    /// State after a click selects `cell`, or the terminal it ends in.
    fn select(&self, s: &StateId, cell: usize) -> std::result::Result<StateId, Terminal> {
        let row = match s.phase {
            Phase::Row => return Ok(StateId::column_scan(cell, 0, 1, s.m, s.e)),
            Phase::Column { row, .. } => row,
        };
        let symbol = self.layout.symbol_at(row, cell).expect("cell inside row");
        match apply_symbol(symbol, s.m, s.e, &self.word, self.layout, self.params.error_limit) {
            Selection::Continue { m, e } => Ok(StateId::row_scan(1, m, e)),
            Selection::Terminal(t) => Err(t),
        }
    }

    fn slow_miss(&self, cell: usize, aim: Aim, len: usize) -> Result<f64> {
        let windows = &self.windows[&len];
        let duration = windows[cell - 1].duration;
        let noise = &self.params.switch_noise;
        let v = match aim {
            Aim::Wait => return Ok(miss_prob_from_overlap(0.0, duration, false, noise)),
            Aim::Cell(v) => v,
        };
        let timing = &self.params.click_timing;
        let q = overlap_prob(cell, v, timing, windows)?;
        let q = match self.options.trigger {
            TriggerModel::PerCellIndependent => q,
            TriggerModel::SingleAttempt => {
                let mut earlier = 0.0;
                for k in 1..cell {
                    earlier += overlap_prob(k, v, timing, windows)?;
                }
                let remaining = 1.0 - (1.0 - noise.f) * earlier;
                if remaining > 0.0 {
                    (q / remaining).min(1.0)
                } else {
                    0.0
                }
            }
        };
        Ok(miss_prob_from_overlap(q, duration, true, noise))
    }

    /// Probability that the group ends with a decision for each cell.
    fn fast_decisions(&self, aim: Aim, len: usize) -> Result<Vec<(usize, f64)>> {
        let Aim::Cell(v) = aim else {
            return Ok(Vec::new());
        };
        let windows = &self.windows[&len];
        let timing = &self.params.click_timing;
        let accept = 1.0 - self.params.switch_noise.f;
        // Latency-corrected click time is centred on the aimed cell.
        let centre = cell_mean(v, windows, 0.0)?;
        let mut mass = vec![0.0; len];
        for region in map_regions(timing, windows)? {
            mass[region.cell - 1] += timing.mass_in(centre, region.start, region.end)?;
        }
        Ok(mass.into_iter().enumerate().map(|(i, p)| (i + 1, accept * p)).collect())
    }
}

fn apply_symbol(
    symbol: char,
    m: usize,
    e: usize,
    word: &[char],
    layout: &GridLayout,
    error_limit: usize,
) -> Selection {
    let last = word.len() - 1;
    if symbol == layout.delete_symbol() {
        return match (m, e) {
            (m, e) if e > 0 => Selection::Continue { m, e: e - 1 },
            (m, _) if m > 0 => Selection::Continue { m: m - 1, e: 0 },
            _ => Selection::Continue { m, e },
        };
    }
    if layout.is_terminator(symbol) {
        return if e == 0 && m == last && symbol == word[last] {
            Selection::Terminal(Terminal::Correct)
        } else {
            Selection::Terminal(Terminal::Error)
        };
    }
    if e == 0 && m < last && symbol == word[m] {
        Selection::Continue { m: m + 1, e: 0 }
    } else if e + 1 >= error_limit {
        Selection::Terminal(Terminal::Failure)
    } else {
        Selection::Continue { m, e: e + 1 }
    }
}

/// Interval of latency-corrected click times decided as `cell`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapRegion {
    pub cell: usize,
    pub start: f64,
    pub end: f64,
}

/// Splits the span of a fast group scan into maximum a posteriori decision
/// regions. Gaussian timing yields nearest-centre regions; other densities
/// are classified on a grid and the boundaries refined by bisection.
/// Points where every cell has zero density produce no region.
pub fn map_regions(timing: &ClickTiming, windows: &[CellWindow]) -> Result<Vec<MapRegion>> {
    let span_start = windows.first().map_or(0.0, |w| w.start);
    let span_end = windows.last().map_or(0.0, CellWindow::end);
    let centres: Vec<f64> = windows.iter().map(|w| w.start + 0.5 * w.duration).collect();
    if timing.is_gaussian() {
        let mut regions = Vec::with_capacity(centres.len());
        let mut start = span_start;
        for k in 0..centres.len() {
            let end = if k + 1 < centres.len() { 0.5 * (centres[k] + centres[k + 1]) } else { span_end };
            regions.push(MapRegion { cell: k + 1, start, end });
            start = end;
        }
        return Ok(regions);
    }

    let classify = |tau: f64| -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (k, c) in centres.iter().enumerate() {
            let l = timing.offset_ln_pdf(tau - c);
            if l > f64::NEG_INFINITY && best.is_none_or(|(_, b)| l > b) {
                best = Some((k + 1, l));
            }
        }
        best.map(|(k, _)| k)
    };
    let steps = 4096;
    let h = (span_end - span_start) / steps as f64;
    let mut regions: Vec<MapRegion> = Vec::new();
    let mut open: Option<(usize, f64)> = classify(span_start).map(|c| (c, span_start));
    let mut prev_t = span_start;
    let mut prev_c = classify(span_start);
    for i in 1..=steps {
        let t = if i == steps { span_end } else { span_start + h * i as f64 };
        let c = if i == steps { prev_c } else { classify(t) };
        if c != prev_c {
            let (mut lo, mut hi) = (prev_t, t);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if classify(mid) == prev_c {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if let Some((cell, start)) = open.take() {
                regions.push(MapRegion { cell, start, end: hi });
            }
            open = c.map(|cell| (cell, hi));
        }
        prev_t = t;
        prev_c = c;
    }
    if let Some((cell, start)) = open {
        regions.push(MapRegion { cell, start, end: span_end });
    }
    Ok(regions)
}

/// Probability of following `seq` (state indices) from step 0. Live states
/// still present at the horizon move to Failure with probability one.
pub fn sequence_probability(chain: &ScanChain, seq: &[usize]) -> f64 {
    let Some((&first, rest)) = seq.split_first() else {
        return 0.0;
    };
    if first != chain.initial_index() {
        return 0.0;
    }
    let failure = chain.terminal_index(Terminal::Failure);
    let mut p = 1.0;
    let mut from = first;
    for (i, &to) in rest.iter().enumerate() {
        if to >= chain.state_count() {
            return 0.0;
        }
        let t = i + 1;
        let hop = if chain.is_live(from) && t >= chain.horizon() {
            if t == chain.horizon() && to == failure { 1.0 } else { 0.0 }
        } else {
            chain.transitions(from).iter().filter(|tr| tr.to == to).map(|tr| tr.prob).sum()
        };
        p *= hop;
        if p == 0.0 {
            return 0.0;
        }
        from = to;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a_chain(params: &NoiseParams) -> ScanChain {
        build_slow("a_", &GridLayout::grid_2x2(), params).unwrap()
    }

    #[test]
    fn state_numbering_of_two_by_two() {
        let c = a_chain(&NoiseParams::default());
        assert_eq!(c.live_count(), 40);
        assert_eq!(c.state_count(), 43);
        assert_eq!(c.terminal_index(Terminal::Failure) + 1, 42);
        assert_eq!(c.state(0), Some(&StateId::row_scan(1, 0, 0)));
        // State 17 (1-based) is the column scan of row 1, cell 1, e = 1, u = 1.
        assert_eq!(c.state(16), Some(&StateId::column_scan(1, 1, 1, 0, 1)));
        assert_eq!(c.state(10), Some(&StateId::row_scan(1, 0, 1)));
    }

    #[test]
    fn policy_examples() {
        let g = GridLayout::grid_2x2();
        let s17 = StateId::column_scan(1, 1, 1, 0, 1);
        assert_eq!(intended_cell(&s17, "a_", &g).unwrap(), Aim::Wait);
        let s11 = StateId::row_scan(1, 0, 1);
        assert_eq!(intended_cell(&s11, "a_", &g).unwrap(), Aim::Cell(2));
        assert_eq!(intended_cell(&StateId::row_scan(1, 0, 0), "a_", &g).unwrap(), Aim::Cell(1));
        let in_row = StateId::column_scan(1, 0, 2, 1, 0);
        assert_eq!(intended_cell(&in_row, "a_", &g).unwrap(), Aim::Cell(2));
    }

    #[test]
    fn rows_are_stochastic_and_terminals_absorb() {
        let mut p = NoiseParams::default();
        p.switch_noise.f = 0.1;
        p.switch_noise.lambda = 0.3;
        let c = a_chain(&p);
        for i in 0..c.state_count() {
            let total: f64 = c.transitions(i).iter().map(|t| t.prob).sum();
            assert!((total - 1.0).abs() < 1e-12, "state {i}: {total}");
        }
        for t in [Terminal::Error, Terminal::Failure, Terminal::Correct] {
            let i = c.terminal_index(t);
            assert_eq!(c.transitions(i), &[Transition { to: i, prob: 1.0, label: Label::Miss }]);
        }
    }

    #[test]
    fn word_validation() {
        let g = GridLayout::grid_2x2();
        let p = NoiseParams::default();
        assert!(build_slow("a", &g, &p).is_err());
        assert!(build_slow("_a_", &g, &p).is_err());
        assert!(build_slow("", &g, &p).is_err());
        assert!(matches!(build_slow("z_", &g, &p), Err(Error::UnknownSymbol('z'))));
    }

    #[test]
    fn fast_rejects_false_positives() {
        let mut p = NoiseParams::default();
        p.switch_noise.lambda = 0.01;
        let fp = FastParams::new(p, 0.5).unwrap();
        assert!(matches!(
            build_fast("a_", &GridLayout::grid_2x2(), &fp),
            Err(Error::FastFalsePositives { .. })
        ));
    }

    #[test]
    fn sequence_probability_edges() {
        let c = a_chain(&NoiseParams::default());
        assert_eq!(sequence_probability(&c, &[0]), 1.0);
        assert_eq!(sequence_probability(&c, &[1]), 0.0);
        assert_eq!(sequence_probability(&c, &[]), 0.0);
        // Row cell 1 cannot jump to a column scan of row 2.
        let far = c.index_of(&StateId::column_scan(2, 0, 1, 0, 0)).unwrap();
        assert_eq!(sequence_probability(&c, &[0, far]), 0.0);
    }

    #[test]
    fn k_delta_of_fast_chain() {
        let fp = FastParams::new(NoiseParams::noiseless(1.0), 0.5).unwrap();
        let c = build_fast("a_", &GridLayout::grid_2x2(), &fp).unwrap();
        assert_eq!(c.timing().k_delta(), 2);
        let last_row_cell = c.index_of(&StateId::row_scan(2, 0, 0)).unwrap();
        assert_eq!(c.weight(last_row_cell), CellWeight { scans: 1, units: 2 });
    }

    #[test]
    fn gaussian_map_regions_are_midpoints() {
        let t = ClickTiming::gaussian(0.0, 0.1).unwrap();
        let w = ScanTiming::fast(1.0, 0.5, true).schedule(3).windows();
        let r = map_regions(&t, &w).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], MapRegion { cell: 1, start: 0.5, end: 1.0 });
        assert_eq!(r[1], MapRegion { cell: 2, start: 1.0, end: 1.625 });
        assert_eq!(r[2], MapRegion { cell: 3, start: 1.625, end: 2.5 });
    }
}
