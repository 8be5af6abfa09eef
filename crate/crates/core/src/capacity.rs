//! Information-theoretic rates of switch-driven text entry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GOLDEN_TOL: f64 = 1e-9;

/// Shannon entropy in bits; zero-probability entries contribute nothing.
pub fn entropy(dist: &[f64]) -> Result<f64> {
    if dist.iter().any(|p| p.is_nan() || *p < 0.0) {
        return Err(Error::param("probabilities must be non-negative"));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Unnormalized(total));
    }
    Ok(dist.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum())
}

/// Binary entropy H₂(p) in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Probability (1−β)ⁿβ of stopping after exactly `n` extra waits.
pub fn geometric_wait(beta: f64, n: u32) -> f64 {
    (1.0 - beta).powi(n as i32) * beta
}

/// A user who reacts after `d` seconds and can place a click to within `g`
/// seconds, stopping each wait with probability `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ButtonModel {
    pub d: f64,
    pub g: f64,
    pub beta: f64,
}

impl ButtonModel {
    pub fn new(d: f64, g: f64, beta: f64) -> Result<Self> {
        check_dg(d, g)?;
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::param(format!("beta must lie in (0, 1), got {beta}")));
        }
        Ok(Self { d, g, beta })
    }
}

fn check_dg(d: f64, g: f64) -> Result<()> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::param(format!("d must be >= 0, got {d}")));
    }
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::param(format!("g must be > 0, got {g}")));
    }
    Ok(())
}

/// Bits per second H₂(β) / (βD + g).
pub fn info_rate(model: &ButtonModel) -> f64 {
    binary_entropy(model.beta) / (model.beta * model.d + model.g)
}

/// Maximizes [`info_rate`] over β by golden-section search. The rate is a
/// concave function over a positive affine one, hence unimodal.
pub fn optimize_beta(d: f64, g: f64) -> Result<(f64, f64)> {
    check_dg(d, g)?;
    let rate = |beta: f64| binary_entropy(beta) / (beta * d + g);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (rate(x1), rate(x2));
    while b - a > GOLDEN_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = rate(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = rate(x1);
        }
    }
    let beta = 0.5 * (a + b);
    Ok((beta, rate(beta)))
}

/// Rate multiplier 1 − H₂(f) of a switch that drops events with probability f.
pub fn noisy_factor(f: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::param(format!("f must lie in [0, 1], got {f}")));
    }
    Ok(1.0 - binary_entropy(f))
}

/// Information rate of a discrete channel with mean output time `t_y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelRate {
    /// H(x) / T_Y, valid for an error-free channel.
    pub zero_error: f64,
    /// H(x|y), zero without a confusion matrix.
    pub conditional_entropy: f64,
    /// (H(x) − H(x|y)) / T_Y.
    pub mutual_information: f64,
}

/// `confusion[i][j]` is P(y = j | x = i); rows must be normalized.
pub fn channel_rate(prior: &[f64], confusion: Option<&[Vec<f64>]>, t_y: f64) -> Result<ChannelRate> {
    if t_y.is_nan() || t_y <= 0.0 {
        return Err(Error::param(format!("t_y must be > 0, got {t_y}")));
    }
    let hx = entropy(prior)?;
    let hxy = match confusion {
        None => 0.0,
        Some(rows) => {
            if rows.len() != prior.len() {
                return Err(Error::param("confusion matrix needs one row per input symbol"));
            }
            let outputs = rows.first().map_or(0, Vec::len);
            let mut joint = vec![vec![0.0; outputs]; prior.len()];
            for (i, row) in rows.iter().enumerate() {
                if row.len() != outputs {
                    return Err(Error::param("confusion rows differ in length"));
                }
                entropy(row)?;
                for (j, &p) in row.iter().enumerate() {
                    joint[i][j] = prior[i] * p;
                }
            }
            let mut h = 0.0;
            for j in 0..outputs {
                let py: f64 = joint.iter().map(|r| r[j]).sum();
                for r in &joint {
                    if r[j] > 0.0 {
                        h -= r[j] * (r[j] / py).log2();
                    }
                }
            }
            h
        }
    };
    Ok(ChannelRate {
        zero_error: hx / t_y,
        conditional_entropy: hxy,
        mutual_information: (hx - hxy) / t_y,
    })
}
