use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use scansim::capacity::{noisy_factor, optimize_beta};
use scansim::experiment::{resolve_layout, to_csv, EngineSelection, ModeSelection, Perturbation, ValidationReport};
use scansim::layout::GridLayout;
use scansim::{run_sweep, validate, ExperimentSpec};

pub const FIXTURES_ENV: &str = "SCANSIM_FIXTURES";

/// Command-line overrides applied on top of a spec file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub out: Option<PathBuf>,
    pub layout: Option<String>,
    pub phrase: Option<String>,
    pub mode: Option<ModeSelection>,
    pub engine: Option<EngineSelection>,
}

pub fn load_spec(path: &Path, overrides: &Overrides) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut spec =
        ExperimentSpec::from_toml_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(seed) = overrides.seed {
        spec.seed = seed;
    }
    if let Some(runs) = overrides.runs {
        spec.runs = runs;
    }
    if let Some(out) = &overrides.out {
        spec.output = Some(out.display().to_string());
    }
    if let Some(layout) = &overrides.layout {
        spec.layout = layout.clone();
    }
    if let Some(phrase) = &overrides.phrase {
        spec.phrase = phrase.clone();
    }
    if let Some(mode) = overrides.mode {
        spec.mode = mode;
    }
    if let Some(engine) = overrides.engine {
        spec.engine = engine;
    }
    Ok(spec)
}

/// Resolves the spec's layout, also trying paths relative to the spec file.
pub fn spec_layout(spec: &ExperimentSpec, spec_path: &Path, fixtures: Option<&Path>) -> Result<GridLayout> {
    match resolve_layout(&spec.layout, fixtures) {
        Ok(layout) => Ok(layout),
        Err(e) => {
            let relative = spec_path.parent().unwrap_or(Path::new(".")).join(&spec.layout);
            if relative.is_file() {
                Ok(GridLayout::from_path(relative)?)
            } else {
                Err(e.into())
            }
        }
    }
}

/// Runs a sweep and returns the CSV text. Writes it to the spec's output
/// path when one is set.
pub fn sweep(spec: &ExperimentSpec, layout: &GridLayout) -> Result<String> {
    let rows = run_sweep(spec, layout)?;
    let csv = to_csv(spec, &rows)?;
    if let Some(out) = &spec.output {
        std::fs::write(out, &csv).with_context(|| format!("writing {out}"))?;
    }
    Ok(csv)
}

pub fn validate_spec(spec: &ExperimentSpec, layout: &GridLayout, scan_offset: usize) -> Result<ValidationReport> {
    if spec.engine != EngineSelection::Both {
        bail!("validate compares both engines; set engine = \"both\" in the spec or pass --engine both");
    }
    Ok(validate(spec, layout, Perturbation { scan_offset })?)
}

/// Capacity table over every (d, g, f) combination.
pub fn capacity_table(d: &[f64], g: &[f64], f: &[f64]) -> Result<String> {
    let mut out = String::from("d,g,f,beta,rate,noisy_rate\n");
    for &dv in d {
        for &gv in g {
            let (beta, rate) = optimize_beta(dv, gv)?;
            for &fv in f {
                let noisy = rate * noisy_factor(fv)?;
                let _ = writeln!(out, "{dv},{gv},{fv},{beta:.6},{rate:.6},{noisy:.6}");
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity_rows() {
        let t = capacity_table(&[0.0], &[1.0], &[0.0, 0.5]).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[1], "0,1,0,0.500000,1.000000,1.000000");
        assert!(lines[2].ends_with(",0.000000"));
        assert!(capacity_table(&[-1.0], &[1.0], &[0.0]).is_err());
    }
}
