//! Early-time growth, logarithmic growth and saturation of an entropy series.

use serde::{Deserialize, Serialize};

use super::line_fit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRegimes {
    /// Slope of `S` against `t` on `[0, min(2, t_max/10)]`.
    pub rate: f64,
    /// Slope of `S` against `ln(t+1)` on the middle third.
    pub log_coefficient: f64,
    /// Mean over the trailing quarter.
    pub saturation: f64,
}

pub fn growth_regimes(times: &[f64], entropy: &[f64]) -> Result<GrowthRegimes> {
    if times.len() != entropy.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: entropy.len(),
        });
    }
    if times.len() < 20 {
        return Err(Error::InvalidInput(format!(
            "growth analysis needs >= 20 samples, got {}",
            times.len()
        )));
    }
    let t_max = times[times.len() - 1];
    let select = |lo: f64, hi: f64, f: fn(f64) -> f64| {
        let (x, y): (Vec<f64>, Vec<f64>) = times
            .iter()
            .zip(entropy)
            .filter(|(&t, _)| t >= lo - 1e-12 && t <= hi + 1e-12)
            .map(|(&t, &s)| (f(t), s))
            .unzip();
        (x, y)
    };
    let (x, y) = select(0.0, (t_max / 10.0).min(2.0), |t| t);
    let rate = line_fit(&x, &y, None)
        .map_err(|_| Error::InvalidInput("fewer than 2 samples in the early window".into()))?
        .slope;
    let (x, y) = select(t_max / 3.0, 2.0 * t_max / 3.0, |t| (t + 1.0).ln());
    let log_coefficient = line_fit(&x, &y, None)?.slope;
    let (_, tail) = select(0.75 * t_max, t_max, |t| t);
    let saturation = tail.iter().sum::<f64>() / tail.len() as f64;
    Ok(GrowthRegimes {
        rate,
        log_coefficient,
        saturation,
    })
}
