//! Algebraic versus exponential decay of the density correlator.

use serde::{Deserialize, Serialize};

use super::line_fit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// `C_ℓ ~ ℓ^(-η)`
    Algebraic,
    /// `C_ℓ ~ exp(-ℓ/ξ)`
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationFit {
    pub model: DecayModel,
    pub eta: Option<f64>,
    pub xi: Option<f64>,
    /// Residual of the rejected model minus that of the selected one.
    pub model_selection_score: f64,
    pub algebraic_residual: f64,
    pub exponential_residual: f64,
}

/// Fits `C_ℓ` (index `ℓ`, as produced for a chain of `l` sites) on the
/// positive entries with `2 <= ℓ <= L/4`.
pub fn fit_correlation_decay(c: &[f64], l: usize) -> Result<CorrelationFit> {
    if c.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidInput("correlations are identically zero".into()));
    }
    let pts: Vec<(f64, f64)> = (2..=(l / 4).min(c.len().saturating_sub(1)))
        .filter(|&ell| c[ell] > 0.0 && c[ell].is_finite())
        .map(|ell| (ell as f64, c[ell].ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "need >= 5 positive correlations in 2..=L/4, got {}",
            pts.len()
        )));
    }
    let ell: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let log_ell: Vec<f64> = ell.iter().map(|x| x.ln()).collect();
    let log_c: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let alg = line_fit(&log_ell, &log_c, None)?;
    let exp = line_fit(&ell, &log_c, None)?;
    let eta = -alg.slope;
    let xi = -1.0 / exp.slope;
    let alg_ok = eta > 0.0;
    let exp_ok = exp.slope < 0.0;
    let model = match (alg_ok, exp_ok) {
        (true, true) if alg.rms <= exp.rms => DecayModel::Algebraic,
        (true, true) => DecayModel::Exponential,
        (true, false) => DecayModel::Algebraic,
        (false, true) => DecayModel::Exponential,
        (false, false) => {
            return Err(Error::InvalidInput("correlations do not decay with distance".into()))
        }
    };
    let (eta, xi, score) = match model {
        DecayModel::Algebraic => (Some(eta), None, exp.rms - alg.rms),
        DecayModel::Exponential => (None, Some(xi), alg.rms - exp.rms),
    };
    Ok(CorrelationFit {
        model,
        eta,
        xi,
        model_selection_score: score,
        algebraic_residual: alg.rms,
        exponential_residual: exp.rms,
    })
}
