//! Adaptive Simpson integration used for user-supplied click-time densities.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The interval is first cut into `panels` equal pieces so that narrow peaks
/// are not stepped over by the initial five-point estimate.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if b <= a {
        return Ok(0.0);
    }
    let eval = |t: f64| -> Result<f64> {
        let y = f(t);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Numeric { t })
        }
    };
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + h * k as f64;
        let hi = if k + 1 == panels { b } else { lo + h };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (eval(lo)?, eval(mid)?, eval(hi)?);
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += refine(&eval, lo, hi, flo, fmid, fhi, whole, panel_tol, MAX_DEPTH)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return Ok(left + right + diff / 15.0);
    }
    Ok(refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}
