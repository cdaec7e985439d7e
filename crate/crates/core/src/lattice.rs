//! On-site potentials, the open-chain hopping Hamiltonian and its one-step
//! propagator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Golden mean (√5 + 1)/2, the default incommensurate wave number.
pub const GOLDEN_MEAN: f64 = 1.618_033_988_749_895;

fn golden_mean() -> f64 {
    GOLDEN_MEAN
}

/// Local potential family and strength, all energies in units of the hopping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    None,
    /// Linear tilt `delta * j / L`.
    Stark { delta: f64 },
    /// Aubry-André-Harper cosine `v * cos(2π beta j + theta)`.
    Quasiperiodic {
        v: f64,
        #[serde(default = "golden_mean")]
        beta: f64,
        #[serde(default)]
        theta: f64,
    },
    /// Independent uniform on-site energies in `[-w, w]`.
    Anderson { w: f64 },
}

impl PotentialSpec {
    pub fn quasiperiodic(v: f64, theta: f64) -> Self {
        PotentialSpec::Quasiperiodic {
            v,
            beta: GOLDEN_MEAN,
            theta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn non_negative(name: &str, x: f64) -> Result<()> {
            if !x.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
            if x < 0.0 {
                return Err(Error::param(name, format!("must be >= 0, got {x}")));
            }
            Ok(())
        }
        match *self {
            PotentialSpec::None => Ok(()),
            PotentialSpec::Stark { delta } => non_negative("delta", delta),
            PotentialSpec::Anderson { w } => non_negative("w", w),
            PotentialSpec::Quasiperiodic { v, beta, theta } => {
                non_negative("v", v)?;
                if !beta.is_finite() || beta <= 0.0 {
                    return Err(Error::param("beta", "must be finite and positive"));
                }
                if !theta.is_finite() || !(0.0..2.0 * PI).contains(&theta) {
                    return Err(Error::param("theta", "must lie in [0, 2π)"));
                }
                Ok(())
            }
        }
    }

    /// Short label used in output tables.
    pub fn kind_name(&self) -> &'static str {
        match self {
            PotentialSpec::None => "none",
            PotentialSpec::Stark { .. } => "stark",
            PotentialSpec::Quasiperiodic { .. } => "quasiperiodic",
            PotentialSpec::Anderson { .. } => "anderson",
        }
    }

    /// The scalar strength (Δ, V or W); zero for the flat chain.
    pub fn strength(&self) -> f64 {
        match *self {
            PotentialSpec::None => 0.0,
            PotentialSpec::Stark { delta } => delta,
            PotentialSpec::Quasiperiodic { v, .. } => v,
            PotentialSpec::Anderson { w } => w,
        }
    }

    /// Same family with a different strength.
    pub fn with_strength(&self, strength: f64) -> Self {
        match *self {
            PotentialSpec::None => PotentialSpec::None,
            PotentialSpec::Stark { .. } => PotentialSpec::Stark { delta: strength },
            PotentialSpec::Quasiperiodic { beta, theta, .. } => PotentialSpec::Quasiperiodic {
                v: strength,
                beta,
                theta,
            },
            PotentialSpec::Anderson { .. } => PotentialSpec::Anderson { w: strength },
        }
    }

    /// True when building the potential consumes random numbers or depends on a
    /// phase that may be redrawn per realization.
    pub fn is_random(&self) -> bool {
        matches!(
            self,
            PotentialSpec::Quasiperiodic { .. } | PotentialSpec::Anderson { .. }
        )
    }
}

/// Evaluates the on-site energies `p_j` for `j = 0..l`.
///
/// Only the Anderson variant draws from `rng`.
pub fn build_potential<R: Rng + ?Sized>(
    spec: &PotentialSpec,
    l: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if l < 2 {
        return Err(Error::param("L", format!("need at least 2 sites, got {l}")));
    }
    spec.validate()?;
    let p = match *spec {
        PotentialSpec::None => vec![0.0; l],
        PotentialSpec::Stark { delta } => (0..l).map(|j| delta * j as f64 / l as f64).collect(),
        PotentialSpec::Quasiperiodic { v, beta, theta } => (0..l)
            .map(|j| v * (2.0 * PI * beta * j as f64 + theta).cos())
            .collect(),
        PotentialSpec::Anderson { w } => {
            // One draw per site regardless of W so streams stay aligned.
            (0..l)
                .map(|_| {
                    let u: f64 = rng.gen();
                    if w == 0.0 {
                        0.0
                    } else {
                        w * (2.0 * u - 1.0)
                    }
                })
                .collect()
        }
    };
    Ok(p)
}

/// `L x L` single-particle matrix of the open tight-binding chain.
#[derive(Debug, Clone)]
pub struct SingleParticleHamiltonian {
    hopping: f64,
    h: DMatrix<Complex64>,
    potential: Vec<f64>,
}

impl SingleParticleHamiltonian {
    pub fn new(hopping: f64, potential: &[f64]) -> Result<Self> {
        let l = potential.len();
        if l < 2 {
            return Err(Error::param("L", format!("need at least 2 sites, got {l}")));
        }
        if !hopping.is_finite() {
            return Err(Error::param("J", "must be finite"));
        }
        if let Some(j) = potential.iter().position(|p| !p.is_finite()) {
            return Err(Error::param("potential", format!("non-finite value at site {j}")));
        }
        let mut h = DMatrix::<Complex64>::zeros(l, l);
        for (j, &p) in potential.iter().enumerate() {
            h[(j, j)] = Complex64::new(p, 0.0);
        }
        let t = Complex64::new(-hopping, 0.0);
        for j in 0..l - 1 {
            h[(j, j + 1)] = t;
            h[(j + 1, j)] = t;
        }
        Ok(Self {
            hopping,
            h,
            potential: potential.to_vec(),
        })
    }

    pub fn size(&self) -> usize {
        self.potential.len()
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.h
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Eigenvalues in ascending order together with the matching eigenvectors
    /// as columns.
    pub fn eigen(&self) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        let eig = crate::linalg::hermitian_eigen(&self.h).map_err(|e| {
            Error::Numerical(format!("{e} (L = {}, J = {})", self.size(), self.hopping))
        })?;
        let mut order: Vec<usize> = (0..self.size()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.size(), self.size(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        Ok((values, vectors))
    }

    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(self.eigen()?.0)
    }
}

/// Convenience: potential and Hamiltonian in one go.
pub fn build_hamiltonian(hopping: f64, potential: &[f64]) -> Result<SingleParticleHamiltonian> {
    SingleParticleHamiltonian::new(hopping, potential)
}

/// One-step evolution operator `exp(-i h dt)`.
#[derive(Debug, Clone)]
pub struct Propagator {
    k: DMatrix<Complex64>,
    dt: f64,
}

impl Propagator {
    pub fn new(h: &SingleParticleHamiltonian, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        let (energies, w) = h.eigen()?;
        Ok(Self {
            k: spectral_exponential(&energies, &w, dt),
            dt,
        })
    }

    /// `exp(-i h t)` for an arbitrary real time; used for multi-step jumps.
    pub fn for_time(energies: &[f64], w: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
        spectral_exponential(energies, w, t)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.k
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn size(&self) -> usize {
        self.k.nrows()
    }

    /// Largest entry of `|k†k - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let g = self.k.adjoint() * &self.k;
        let n = g.nrows();
        let mut worst = 0.0f64;
        for c in 0..n {
            for r in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((g[(r, c)] - target).norm());
            }
        }
        worst
    }
}

fn spectral_exponential(energies: &[f64], w: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let phases = DVector::from_iterator(
        energies.len(),
        energies
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * t)),
    );
    let mut scaled = w.clone();
    for (c, phase) in phases.iter().enumerate() {
        for r in 0..scaled.nrows() {
            scaled[(r, c)] *= phase;
        }
    }
    scaled * w.adjoint()
}

pub fn build_propagator(h: &SingleParticleHamiltonian, dt: f64) -> Result<Propagator> {
    Propagator::new(h, dt)
}
