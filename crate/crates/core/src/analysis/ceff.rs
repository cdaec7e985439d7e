//! Effective central charge from the chord-length scaling
//! `S(ℓ) = (c_eff/3)·ln[(L/π) sin(πℓ/L)] + s0`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use super::line_fit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeffFit {
    pub c_eff: f64,
    pub c_eff_err: f64,
    pub s0: f64,
    /// Root-mean-square deviation of the profile from the fitted curve.
    pub residual: f64,
    pub fit_window: Vec<usize>,
}

/// `ln[(L/π) sin(πℓ/L)]`.
pub fn chord_log(l: usize, ell: usize) -> f64 {
    let l = l as f64;
    ((l / PI) * (PI * ell as f64 / l).sin()).ln()
}

/// Even cuts with `L/4 <= ℓ <= 3L/4`. Even-only removes the parity
/// oscillation of free fermions; the central window keeps away from the edges.
pub fn fit_window(l: usize) -> Vec<usize> {
    (1..l).filter(|&ell| ell % 2 == 0 && 4 * ell >= l && 4 * ell <= 3 * l).collect()
}

/// Fits the profile `S(ℓ)`, `ℓ = 1..L-1` (index `ℓ-1`), with optional
/// standard errors used as weights when all are positive.
pub fn fit_ceff(profile: &[f64], errors: Option<&[f64]>, l: usize) -> Result<CeffFit> {
    if profile.len() + 1 != l {
        return Err(Error::DimensionMismatch {
            expected: l.saturating_sub(1),
            found: profile.len(),
        });
    }
    if let Some(e) = errors {
        if e.len() != profile.len() {
            return Err(Error::DimensionMismatch {
                expected: profile.len(),
                found: e.len(),
            });
        }
    }
    let window = fit_window(l);
    if window.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "c_eff fit window of L = {l} has {} points, need >= 3",
            window.len()
        )));
    }
    let x: Vec<f64> = window.iter().map(|&ell| chord_log(l, ell)).collect();
    let y: Vec<f64> = window.iter().map(|&ell| profile[ell - 1]).collect();
    let sigma: Option<Vec<f64>> = errors
        .map(|e| window.iter().map(|&ell| e[ell - 1]).collect::<Vec<_>>())
        .filter(|s| s.iter().all(|&v| v > 0.0 && v.is_finite()));
    let fit = line_fit(&x, &y, sigma.as_deref())?;
    Ok(CeffFit {
        c_eff: 3.0 * fit.slope,
        c_eff_err: 3.0 * fit.slope_var.sqrt(),
        s0: fit.intercept,
        residual: fit.rms,
        fit_window: window,
    })
}

/// `3·[S_half(2L) - S_half(L)] / ln 2`.
pub fn ceff_two_size(s_half_l: f64, s_half_2l: f64) -> f64 {
    3.0 * (s_half_2l - s_half_l) / LN_2
}

/// Two-size estimate for arbitrary sizes, `3·ΔS / ln(L2/L1)`, with the
/// propagated error of independent inputs.
pub fn ceff_pair(l1: usize, s1: (f64, f64), l2: usize, s2: (f64, f64)) -> Result<(f64, f64)> {
    if l1 == 0 || l2 == 0 || l1 == l2 {
        return Err(Error::InvalidInput(format!("size pair ({l1}, {l2}) is degenerate")));
    }
    let span = (l2 as f64 / l1 as f64).ln();
    Ok((3.0 * (s2.0 - s1.0) / span, 3.0 * s1.1.hypot(s2.1) / span.abs()))
}

/// Where the large-size estimate drops below the small-size one along a scan.
///
/// `delta[i]` is `c_eff(L_large) - c_eff(L_small)` at `x[i]`, with `x`
/// increasing. Returns the linear interpolation of the first sign change from
/// `>= 0` to `< 0`, or `None` if there is none.
pub fn crossing(x: &[f64], delta: &[f64]) -> Result<Option<f64>> {
    if x.len() != delta.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: delta.len(),
        });
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("crossing scan must be strictly increasing".into()));
    }
    for i in 1..x.len() {
        let (d0, d1) = (delta[i - 1], delta[i]);
        if d0 >= 0.0 && d1 < 0.0 {
            return Ok(Some(x[i - 1] + (x[i] - x[i - 1]) * d0 / (d0 - d1)));
        }
    }
    Ok(None)
}
