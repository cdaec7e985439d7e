//! Post-processing of ensemble output: entanglement scaling fits, correlation
//! decay classification, finite-size data collapse and the phenomenological
//! phase boundary.

pub mod boundary;
pub mod ceff;
pub mod collapse;
pub mod decay;
pub mod growth;

pub use boundary::{
    boundary_curve, boundary_value, fit_c0, solve_boundary, BoundaryKind, BoundaryParams, C0Fit,
    BOUNDARY_SUP, NOMINAL_C0,
};
pub use ceff::{ceff_pair, ceff_two_size, chord_log, crossing, fit_ceff, fit_window, CeffFit};
pub use collapse::{
    collapse_objective, fit_collapse, g_factor, CollapseFit, CollapseParams, CollapsePoint,
    SearchBox,
};
pub use decay::{fit_correlation_decay, CorrelationFit, DecayModel};
pub use growth::{growth_regimes, GrowthRegimes};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logarithm used for `log L` in the collapse variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
    Log10,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Log10 => x.log10(),
        }
    }
}

/// Straight-line least-squares result `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_var: f64,
    /// Unweighted root-mean-square residual.
    pub rms: f64,
}

/// Weighted least squares. With `sigma` the slope variance is the absolute
/// `(XᵀWX)⁻¹` entry; without it the residual variance is used.
pub(crate) fn line_fit(x: &[f64], y: &[f64], sigma: Option<&[f64]>) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InvalidInput(format!("line fit needs >= 2 paired points, got {n}")));
    }
    let w: Vec<f64> = match sigma {
        Some(s) => s.iter().map(|&e| 1.0 / (e * e)).collect(),
        None => vec![1.0; n],
    };
    let sw: f64 = w.iter().sum();
    let xm = w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() / sw;
    let ym = w.iter().zip(y).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = (0..n).map(|i| w[i] * (x[i] - xm).powi(2)).sum();
    let sxy: f64 = (0..n).map(|i| w[i] * (x[i] - xm) * (y[i] - ym)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidInput("line fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ssr: f64 = (0..n).map(|i| (y[i] - slope * x[i] - intercept).powi(2)).sum();
    let slope_var = match sigma {
        Some(_) => 1.0 / sxx,
        None if n > 2 => ssr / (n - 2) as f64 / sxx,
        None => 0.0,
    };
    Ok(LineFit {
        slope,
        intercept,
        slope_var,
        rms: (ssr / n as f64).sqrt(),
    })
}
