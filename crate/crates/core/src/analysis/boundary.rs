//! Phenomenological phase boundary: the critical line is the level set
//! `exp(-a·γ^b) + Γ(P) = C0`, with `Γ(Δ) = exp(-c·Δ^d)` for a Stark tilt and
//! `Γ(V) = exp(-e·V)` for quasi-periodic or random potentials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::PotentialSpec;

/// Supremum of the boundary function (both envelopes are at most 1).
pub const BOUNDARY_SUP: f64 = 2.0;

/// The level quoted together with the default envelope constants. It lies
/// above [`BOUNDARY_SUP`] and therefore cannot describe any boundary.
pub const NOMINAL_C0: f64 = 3.0;

/// Reference critical points `(γ_c, Δ_c)` for the Stark tilt.
pub const REFERENCE_SP_POINTS: [(f64, f64); 4] = [(0.3, 0.1), (0.28, 0.16), (0.23, 0.23), (0.16, 0.3)];

/// Reference critical points `(γ_c, V_c)` for the quasi-periodic potential.
pub const REFERENCE_QPP_POINTS: [(f64, f64); 4] = [(0.3, 0.3), (0.24, 0.8), (0.18, 1.3), (0.1, 1.8)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Sp,
    Qpp,
}

impl BoundaryKind {
    /// Stark maps to `Sp`; quasi-periodic and Anderson share the `Qpp` envelope.
    pub fn for_potential(p: &PotentialSpec) -> Option<Self> {
        match p {
            PotentialSpec::Stark { .. } => Some(BoundaryKind::Sp),
            PotentialSpec::Quasiperiodic { .. } | PotentialSpec::Anderson { .. } => Some(BoundaryKind::Qpp),
            PotentialSpec::None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub c0: f64,
    #[serde(default = "unit")]
    pub g0: f64,
}

fn unit() -> f64 {
    1.0
}

impl Default for BoundaryParams {
    /// Envelope constants `(6, 1.5, 8, 2, 0.5)`; `C0` is the pooled fit over the
    /// reference critical points of both potentials.
    fn default() -> Self {
        let mut p = Self::with_level(f64::NAN);
        let values: Vec<f64> = REFERENCE_SP_POINTS
            .iter()
            .map(|&(g, s)| boundary_value(g, s, BoundaryKind::Sp, &p))
            .chain(
                REFERENCE_QPP_POINTS
                    .iter()
                    .map(|&(g, v)| boundary_value(g, v, BoundaryKind::Qpp, &p)),
            )
            .collect();
        p.c0 = values.iter().sum::<f64>() / values.len() as f64;
        p
    }
}

impl BoundaryParams {
    pub fn with_level(c0: f64) -> Self {
        Self {
            a: 6.0,
            b: 1.5,
            c: 8.0,
            d: 2.0,
            e: 0.5,
            c0,
            g0: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d), ("e", self.e), ("g0", self.g0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(format!("boundary.{name}"), "must be positive and finite"));
            }
        }
        Ok(())
    }

    /// `exp(-a·γ^b)`.
    pub fn measurement_envelope(&self, gamma: f64) -> f64 {
        (-self.a * gamma.powf(self.b)).exp()
    }

    /// `exp(-c·Δ^d)` or `exp(-e·V)`.
    pub fn potential_envelope(&self, strength: f64, kind: BoundaryKind) -> f64 {
        match kind {
            BoundaryKind::Sp => (-self.c * strength.powf(self.d)).exp(),
            BoundaryKind::Qpp => (-self.e * strength).exp(),
        }
    }

    /// Renormalized growth rate `G0·exp(-a·γ^b)` due to monitoring alone.
    pub fn measurement_rate(&self, gamma: f64) -> f64 {
        self.g0 * self.measurement_envelope(gamma)
    }

    /// Renormalized growth rate due to the potential alone.
    pub fn potential_rate(&self, strength: f64, kind: BoundaryKind) -> f64 {
        self.g0 * self.potential_envelope(strength, kind)
    }
}

pub fn boundary_value(gamma: f64, strength: f64, kind: BoundaryKind, params: &BoundaryParams) -> f64 {
    params.measurement_envelope(gamma) + params.potential_envelope(strength, kind)
}

/// Critical potential strength at measurement rate `gamma`.
pub fn solve_boundary(gamma: f64, kind: BoundaryKind, params: &BoundaryParams) -> Result<f64> {
    let c0 = params.c0;
    if !(c0.is_finite() && c0 > 0.0) {
        return Err(Error::param("boundary.c0", "must be positive and finite"));
    }
    if c0 >= BOUNDARY_SUP {
        return Err(Error::InfeasibleLevel {
            level: c0,
            max: BOUNDARY_SUP,
        });
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::param("gamma", "must be finite and >= 0"));
    }
    let floor = params.measurement_envelope(gamma);
    if floor >= c0 {
        return Err(Error::NoSolution(format!(
            "at γ = {gamma} the measurement term {floor:.6} alone exceeds C0 = {c0}"
        )));
    }
    let f = |p: f64| boundary_value(gamma, p, kind, params) - c0;
    if f(0.0) < 0.0 {
        return Err(Error::NoSolution(format!(
            "at γ = {gamma} the boundary value at zero potential is below C0 = {c0}"
        )));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Level fitted to critical points `(γ_c, P_c)` with the envelope constants held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C0Fit {
    pub c0: f64,
    pub rms_residual: f64,
    pub values: Vec<f64>,
}

pub fn fit_c0(points: &[(f64, f64)], kind: BoundaryKind, params: &BoundaryParams) -> Result<C0Fit> {
    if points.is_empty() {
        return Err(Error::InvalidInput("no critical points to fit".into()));
    }
    let values: Vec<f64> = points.iter().map(|&(g, p)| boundary_value(g, p, kind, params)).collect();
    let c0 = values.iter().sum::<f64>() / values.len() as f64;
    let rms = (values.iter().map(|v| (v - c0).powi(2)).sum::<f64>() / values.len() as f64).sqrt();
    Ok(C0Fit {
        c0,
        rms_residual: rms,
        values,
    })
}

/// `(γ, P_c(γ))` on the given grid; `None` where the line has terminated.
pub fn boundary_curve(gammas: &[f64], kind: BoundaryKind, params: &BoundaryParams) -> Result<Vec<(f64, Option<f64>)>> {
    gammas
        .iter()
        .map(|&g| match solve_boundary(g, kind, params) {
            Ok(p) => Ok((g, Some(p))),
            Err(Error::NoSolution(_)) => Ok((g, None)),
            Err(e) => Err(e),
        })
        .collect()
}
