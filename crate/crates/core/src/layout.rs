//! Grid layouts, per-cell scan delays and scan weights, and the noiseless
//! scan-count oracle.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{CellWindow, NoiseParams};

pub const GRID_2X2: &str = include_str!("../fixtures/grid_2x2.toml");
pub const ALPHABET_8X5: &str = include_str!("../fixtures/alphabet_8x5.toml");
pub const BUILTIN_LAYOUTS: [&str; 2] = ["grid_2x2", "alphabet_8x5"];

/// On-disk layout description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub rows: Vec<Vec<String>>,
    pub delete: String,
    pub terminators: Vec<String>,
    #[serde(default = "default_tick")]
    pub tick_prefix: bool,
}

fn default_tick() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridLayout {
    name: String,
    rows: Vec<Vec<char>>,
    delete: char,
    terminators: Vec<char>,
    tick_prefix: bool,
    index: HashMap<char, (usize, usize)>,
}

fn single_char(s: &str) -> Result<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::InvalidLayout(format!("symbol {s:?} is not a single character"))),
    }
}

impl GridLayout {
    pub fn new(
        name: impl Into<String>,
        rows: Vec<Vec<char>>,
        delete: char,
        terminators: Vec<char>,
        tick_prefix: bool,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidLayout("layout has no rows".into()));
        }
        let mut index = HashMap::new();
        for (i, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::InvalidLayout(format!("row {} is empty", i + 1)));
            }
            for (j, &c) in row.iter().enumerate() {
                if index.insert(c, (i + 1, j + 1)).is_some() {
                    return Err(Error::InvalidLayout(format!("symbol {c:?} appears twice")));
                }
            }
        }
        if !index.contains_key(&delete) {
            return Err(Error::InvalidLayout(format!("delete symbol {delete:?} is not placed")));
        }
        if terminators.is_empty() {
            return Err(Error::InvalidLayout("no terminator symbols".into()));
        }
        for t in &terminators {
            if !index.contains_key(t) {
                return Err(Error::InvalidLayout(format!("terminator {t:?} is not placed")));
            }
            if *t == delete {
                return Err(Error::InvalidLayout("delete symbol cannot be a terminator".into()));
            }
        }
        Ok(Self { name: name.into(), rows, delete, terminators, tick_prefix, index })
    }

    pub fn from_spec(spec: &LayoutSpec) -> Result<Self> {
        let rows = spec
            .rows
            .iter()
            .map(|r| r.iter().map(|s| single_char(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let terminators =
            spec.terminators.iter().map(|s| single_char(s)).collect::<Result<Vec<_>>>()?;
        Self::new(
            spec.name.clone().unwrap_or_else(|| "layout".into()),
            rows,
            single_char(&spec.delete)?,
            terminators,
            spec.tick_prefix,
        )
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: LayoutSpec =
            toml::from_str(text).map_err(|e| Error::InvalidLayout(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut layout = Self::from_toml_str(&std::fs::read_to_string(path)?)?;
        if layout.name == "layout" {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                layout.name = stem.to_string();
            }
        }
        Ok(layout)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        let text = match name {
            "grid_2x2" => GRID_2X2,
            "alphabet_8x5" => ALPHABET_8X5,
            _ => return None,
        };
        Some(Self::from_toml_str(text).expect("built-in fixture parses"))
    }

    /// The 2×2 layout `[[a, _], [t, ←]]`.
    pub fn grid_2x2() -> Self {
        Self::builtin("grid_2x2").expect("built-in")
    }

    /// Alphabetical eight-row layout on which "standing_" costs 77 scans.
    pub fn alphabet() -> Self {
        Self::builtin("alphabet_8x5").expect("built-in")
    }

    pub fn to_spec(&self) -> LayoutSpec {
        LayoutSpec {
            name: Some(self.name.clone()),
            rows: self.rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect(),
            delete: self.delete.to_string(),
            terminators: self.terminators.iter().map(|c| c.to_string()).collect(),
            tick_prefix: self.tick_prefix,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rows(&self) -> &[Vec<char>] {
        &self.rows
    }

    /// Number of rows, I.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Length of the longest row, J.
    pub fn max_row_len(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Longest group scan, V = max(I, J).
    pub fn max_group_len(&self) -> usize {
        self.row_count().max(self.max_row_len())
    }

    /// Length of 1-based row `row`.
    pub fn row_len(&self, row: usize) -> usize {
        self.rows[row - 1].len()
    }

    pub fn delete_symbol(&self) -> char {
        self.delete
    }

    pub fn terminators(&self) -> &[char] {
        &self.terminators
    }

    pub fn is_terminator(&self, c: char) -> bool {
        self.terminators.contains(&c)
    }

    pub fn tick_prefix(&self) -> bool {
        self.tick_prefix
    }

    pub fn symbol_at(&self, row: usize, col: usize) -> Option<char> {
        self.rows.get(row.checked_sub(1)?)?.get(col.checked_sub(1)?).copied()
    }

    pub fn contains(&self, symbol: char) -> bool {
        self.index.contains_key(&symbol)
    }

    /// 1-based (row, column) address of `symbol`.
    pub fn locate(&self, symbol: char) -> Result<(usize, usize)> {
        self.index.get(&symbol).copied().ok_or(Error::UnknownSymbol(symbol))
    }
}

/// Maps typed text onto layout symbols: spaces become `_`.
pub fn normalize_text(text: &str) -> String {
    text.chars().map(|c| if c == ' ' { '_' } else { c }).collect()
}

/// Inverse of [`normalize_text`] for display.
pub fn render_text(text: &str) -> String {
    text.chars().map(|c| if c == '_' { ' ' } else { c }).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    #[default]
    Slow,
    Fast,
}

#[derive(Clone, Debug)]
pub struct FastParams {
    pub base: NoiseParams,
    /// Dwell time T_S^FAST of the fast cells, seconds.
    pub t_fast: f64,
}

impl FastParams {
    pub fn new(base: NoiseParams, t_fast: f64) -> Result<Self> {
        let p = Self { base, t_fast };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.t_fast > 0.0 && self.t_fast <= self.base.t_scan) {
            return Err(Error::param(format!(
                "t_fast must lie in (0, t_scan = {}], got {}",
                self.base.t_scan, self.t_fast
            )));
        }
        Ok(())
    }

    pub fn k_delta(&self) -> u32 {
        k_delta(self.base.t_scan, self.t_fast)
    }
}

/// ceil(T_S / T_S^FAST), tolerant of representation error in the ratio.
pub fn k_delta(t_scan: f64, t_fast: f64) -> u32 {
    let ratio = t_scan / t_fast;
    let nearest = ratio.round();
    if (ratio - nearest).abs() < 1e-9 {
        nearest as u32
    } else {
        ratio.ceil() as u32
    }
}

/// Durations of one group scan: the tick cell followed by the real cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelaySchedule {
    pub tick: f64,
    pub cells: Vec<f64>,
}

impl DelaySchedule {
    pub fn windows(&self) -> Vec<CellWindow> {
        let mut start = self.tick;
        self.cells
            .iter()
            .map(|&duration| {
                let w = CellWindow { start, duration };
                start += duration;
                w
            })
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.tick + self.cells.iter().sum::<f64>()
    }

    /// How long each cell stays highlighted, the tick counted with the
    /// first cell.
    pub fn highlight_durations(&self) -> Vec<f64> {
        let mut d = self.cells.clone();
        if let Some(first) = d.first_mut() {
            *first += self.tick;
        }
        d
    }
}

/// Scan weight of one cell visit: `scans` counts highlighted cells (the tick
/// is folded into the first cell), `units` counts time in units of the
/// mode's unit delay.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellWeight {
    pub scans: u32,
    pub units: u32,
}

/// Timing rules of one scanning mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanTiming {
    pub mode: ScanMode,
    pub t_scan: f64,
    pub t_fast: f64,
    pub tick: bool,
}

impl ScanTiming {
    pub fn slow(t_scan: f64, tick: bool) -> Self {
        Self { mode: ScanMode::Slow, t_scan, t_fast: t_scan, tick }
    }

    pub fn fast(t_scan: f64, t_fast: f64, tick: bool) -> Self {
        Self { mode: ScanMode::Fast, t_scan, t_fast, tick }
    }

    pub fn k_delta(&self) -> u32 {
        match self.mode {
            ScanMode::Slow => 1,
            ScanMode::Fast => k_delta(self.t_scan, self.t_fast),
        }
    }

    /// Seconds per time unit.
    pub fn unit_delay(&self) -> f64 {
        match self.mode {
            ScanMode::Slow => self.t_scan,
            ScanMode::Fast => self.t_fast,
        }
    }

    /// Schedule of a group scan over `len` cells.
    pub fn schedule(&self, len: usize) -> DelaySchedule {
        match self.mode {
            ScanMode::Slow => DelaySchedule {
                tick: if self.tick { self.t_scan } else { 0.0 },
                cells: vec![self.t_scan; len],
            },
            ScanMode::Fast => {
                let mut cells = vec![self.t_fast; len];
                if let Some(last) = cells.last_mut() {
                    *last = self.t_scan;
                }
                DelaySchedule { tick: if self.tick { self.t_fast } else { 0.0 }, cells }
            }
        }
    }

    /// Weight of visiting 1-based `cell` of a group of `len` cells.
    pub fn weight(&self, cell: usize, len: usize) -> CellWeight {
        let tick = u32::from(self.tick && cell == 1);
        let units = match self.mode {
            ScanMode::Fast if cell == len => self.k_delta(),
            _ => 1,
        };
        CellWeight { scans: 1 + tick, units: units + tick }
    }
}

/// Full-width (V cell) schedule of a mode.
pub fn delay_schedule(
    mode: ScanMode,
    layout: &GridLayout,
    params: &NoiseParams,
    fast_params: Option<&FastParams>,
) -> Result<DelaySchedule> {
    let timing = match (mode, fast_params) {
        (ScanMode::Slow, _) => ScanTiming::slow(params.t_scan, layout.tick_prefix()),
        (ScanMode::Fast, Some(fp)) => {
            fp.validate()?;
            ScanTiming::fast(params.t_scan, fp.t_fast, layout.tick_prefix())
        }
        (ScanMode::Fast, None) => return Err(Error::MissingFastParams),
    };
    Ok(timing.schedule(layout.max_group_len()))
}

/// Scan units needed to write `word` without noise. Row groups in slow mode
/// stop at the target row; fast mode always runs every group to its end,
/// whose last cell weighs `k_delta`.
pub fn min_scans(word: &str, layout: &GridLayout, mode: ScanMode, k_delta: u32) -> Result<u64> {
    let tick = u64::from(layout.tick_prefix());
    let k = u64::from(k_delta);
    let mut total = 0u64;
    for c in word.chars() {
        let (row, col) = layout.locate(c)?;
        total += match mode {
            ScanMode::Slow => (row as u64 + tick) + (col as u64 + tick),
            ScanMode::Fast => {
                let rows = layout.row_count() as u64;
                let cols = layout.row_len(row) as u64;
                (rows + tick + k - 1) + (cols + tick + k - 1)
            }
        };
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_examples() {
        let g = GridLayout::grid_2x2();
        assert_eq!(g.locate('a').unwrap(), (1, 1));
        assert_eq!(g.locate('←').unwrap(), (2, 2));
        assert!(matches!(g.locate('z'), Err(Error::UnknownSymbol('z'))));
        let a = GridLayout::alphabet();
        let (row, _) = a.locate('h').unwrap();
        assert_eq!(a.rows()[row - 1], vec!['e', 'f', 'g', 'h', '.']);
    }

    #[test]
    fn dimensions() {
        let a = GridLayout::alphabet();
        assert_eq!((a.row_count(), a.max_row_len(), a.max_group_len()), (8, 5, 8));
        let g = GridLayout::grid_2x2();
        assert_eq!((g.row_count(), g.max_row_len(), g.max_group_len()), (2, 2, 2));
    }

    #[test]
    fn min_scans_examples() {
        let g = GridLayout::grid_2x2();
        assert_eq!(min_scans("a_", &g, ScanMode::Slow, 1).unwrap(), 9);
        assert_eq!(min_scans("a_", &g, ScanMode::Fast, 1).unwrap(), 12);
        assert_eq!(min_scans("a_", &g, ScanMode::Fast, 2).unwrap(), 16);
        let a = GridLayout::alphabet();
        assert_eq!(min_scans("standing_", &a, ScanMode::Slow, 1).unwrap(), 77);
        assert!(matches!(min_scans("a#", &g, ScanMode::Slow, 1), Err(Error::UnknownSymbol('#'))));
    }

    #[test]
    fn schedules() {
        let g = GridLayout::grid_2x2();
        let p = NoiseParams { t_scan: 1.0, ..NoiseParams::default() };
        let slow = delay_schedule(ScanMode::Slow, &g, &p, None).unwrap();
        assert_eq!(slow, DelaySchedule { tick: 1.0, cells: vec![1.0, 1.0] });
        let fp = FastParams::new(p.clone(), 0.5).unwrap();
        let fast = delay_schedule(ScanMode::Fast, &g, &p, Some(&fp)).unwrap();
        assert_eq!(fast, DelaySchedule { tick: 0.5, cells: vec![0.5, 1.0] });
        assert_eq!(fp.k_delta(), 2);
        let same = FastParams::new(p.clone(), 1.0).unwrap();
        assert_eq!(delay_schedule(ScanMode::Fast, &g, &p, Some(&same)).unwrap(), slow);
        assert!(matches!(
            delay_schedule(ScanMode::Fast, &g, &p, None),
            Err(Error::MissingFastParams)
        ));
        assert!(FastParams::new(p, 1.5).is_err());

        let w = slow.windows();
        assert_eq!(w[0], CellWindow { start: 1.0, duration: 1.0 });
        assert_eq!(w[1], CellWindow { start: 2.0, duration: 1.0 });
    }

    #[test]
    fn k_delta_rounding() {
        assert_eq!(k_delta(1.0, 0.5), 2);
        assert_eq!(k_delta(0.5, 0.05), 10);
        assert_eq!(k_delta(1.0, 0.3), 4);
        assert_eq!(k_delta(1.0, 1.0), 1);
    }

    #[test]
    fn weights() {
        let s = ScanTiming::slow(1.0, true);
        assert_eq!(s.weight(1, 4), CellWeight { scans: 2, units: 2 });
        assert_eq!(s.weight(4, 4), CellWeight { scans: 1, units: 1 });
        let f = ScanTiming::fast(1.0, 0.5, true);
        assert_eq!(f.weight(1, 3), CellWeight { scans: 2, units: 2 });
        assert_eq!(f.weight(2, 3), CellWeight { scans: 1, units: 1 });
        assert_eq!(f.weight(3, 3), CellWeight { scans: 1, units: 2 });
        assert_eq!(f.weight(1, 1), CellWeight { scans: 2, units: 3 });
        let no_tick = ScanTiming::slow(1.0, false);
        assert_eq!(no_tick.weight(1, 2), CellWeight { scans: 1, units: 1 });
        assert_eq!(no_tick.schedule(2).windows()[0].start, 0.0);
    }

    #[test]
    fn layout_validation() {
        assert!(GridLayout::new("x", vec![], '←', vec!['_'], true).is_err());
        assert!(GridLayout::new("x", vec![vec!['a', 'a', '←', '_']], '←', vec!['_'], true).is_err());
        assert!(GridLayout::new("x", vec![vec!['a', '_']], '←', vec!['_'], true).is_err());
        assert!(GridLayout::new("x", vec![vec!['a', '←']], '←', vec!['_'], true).is_err());
        assert!(GridLayout::from_toml_str("rows = [[\"ab\"]]\ndelete=\"x\"\nterminators=[]").is_err());
    }

    #[test]
    fn spec_round_trip() {
        let a = GridLayout::alphabet();
        let text = toml::to_string(&a.to_spec()).unwrap();
        assert_eq!(GridLayout::from_toml_str(&text).unwrap(), a);
    }

    #[test]
    fn text_rendering() {
        assert_eq!(normalize_text("the dog ."), "the_dog_.");
        assert_eq!(render_text("a_"), "a ");
    }
}
