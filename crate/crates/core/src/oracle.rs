//! Brute-force many-body reference for small chains.
//!
//! States live in the fixed-N sector of the Fock space, basis states are
//! bitmasks (bit `j` = site `j` occupied) in ascending integer order, and
//! fermionic signs follow the Jordan-Wigner ordering with site 0 first.
//! Used to cross-check the Slater-state engine and the monitoring protocol.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gaussian::SlaterState;
use crate::lattice::SingleParticleHamiltonian;
use crate::monitor::{
    draw_firing, measure_sweep, MonitorConfig, Monitored, ObservableSet, Outcome, Snapshot,
    TrajectoryEngine,
};
use crate::observables::antipodal_geometry;
use crate::rng;

pub const MAX_SITES: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Occupation-number basis of `N` fermions on `L` sites.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    sites: usize,
    particles: usize,
    states: Vec<u32>,
    index: HashMap<u32, usize>,
}

impl SectorBasis {
    pub fn new(sites: usize, particles: usize) -> Result<Self> {
        if sites > MAX_SITES {
            return Err(Error::Capacity(format!(
                "exact diagonalization supports at most {MAX_SITES} sites, got {sites}"
            )));
        }
        if particles > sites {
            return Err(Error::param("N", "more particles than sites"));
        }
        let states: Vec<u32> = (0u32..1 << sites)
            .filter(|s| s.count_ones() as usize == particles)
            .collect();
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Self {
            sites,
            particles,
            states,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn position(&self, state: u32) -> Option<usize> {
        self.index.get(&state).copied()
    }
}

/// Parity of the occupied sites strictly below `j`.
fn sign_below(state: u32, j: usize) -> f64 {
    if (state & ((1u32 << j) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `c_i† c_j |state>` as `(sign, new_state)`, or `None` if it vanishes.
fn hop(state: u32, i: usize, j: usize) -> Option<(f64, u32)> {
    if state & (1 << j) == 0 {
        return None;
    }
    let removed = state & !(1 << j);
    if removed & (1 << i) != 0 {
        return None;
    }
    let sign = sign_below(state, j) * sign_below(removed, i);
    Some((sign, removed | (1 << i)))
}

/// Normalized many-body wavefunction in a [`SectorBasis`].
#[derive(Debug, Clone)]
pub struct FockState {
    basis: std::sync::Arc<SectorBasis>,
    amplitudes: DVector<Complex64>,
}

impl FockState {
    pub fn from_amplitudes(basis: std::sync::Arc<SectorBasis>, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Numerical("zero or non-finite Fock vector".into()));
        }
        Ok(Self {
            basis,
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    /// The product state with the given occupied sites.
    pub fn basis_state(basis: std::sync::Arc<SectorBasis>, occupied: &[usize]) -> Result<Self> {
        let mask = occupied.iter().fold(0u32, |m, &s| m | 1 << s);
        let pos = basis
            .position(mask)
            .ok_or_else(|| Error::InvalidInput(format!("{occupied:?} is not in the sector")))?;
        let mut amplitudes = DVector::zeros(basis.dim());
        amplitudes[pos] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes })
    }

    /// Expands a Slater determinant: amplitude of occupied set `{s_1 < ... < s_N}`
    /// is `det U[{s}, :]`.
    pub fn from_slater(state: &SlaterState) -> Result<Self> {
        let basis = std::sync::Arc::new(SectorBasis::new(state.sites(), state.particles())?);
        let u = state.orbitals();
        let amplitudes = DVector::from_iterator(
            basis.dim(),
            basis.states().iter().map(|&s| {
                let rows: Vec<usize> = (0..state.sites()).filter(|&j| s & (1 << j) != 0).collect();
                u.select_rows(&rows).determinant()
            }),
        );
        Self::from_amplitudes(basis, amplitudes)
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn occupation(&self, j: usize) -> f64 {
        self.basis
            .states()
            .iter()
            .zip(self.amplitudes.iter())
            .filter(|(&s, _)| s & (1 << j) != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// `<c_m† c_n>`.
    pub fn correlation(&self, m: usize, n: usize) -> Complex64 {
        let mut acc = ZERO;
        for (k, &s) in self.basis.states().iter().enumerate() {
            if let Some((sign, t)) = hop(s, m, n) {
                let row = self.basis.position(t).expect("hopping stays in sector");
                acc += self.amplitudes[row].conj() * self.amplitudes[k] * sign;
            }
        }
        acc
    }

    pub fn correlation_matrix(&self) -> DMatrix<Complex64> {
        let l = self.basis.sites();
        DMatrix::from_fn(l, l, |m, n| self.correlation(m, n))
    }

    /// `<n_m n_n>`.
    pub fn density_density(&self, m: usize, n: usize) -> f64 {
        let mask = (1u32 << m) | (1u32 << n);
        self.basis
            .states()
            .iter()
            .zip(self.amplitudes.iter())
            .filter(|(&s, _)| s & mask == mask)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects site `j` onto `outcome` and renormalizes.
    pub fn measure(&mut self, j: usize, outcome: Outcome) -> Result<()> {
        let keep_occupied = outcome == Outcome::Occupied;
        let p = self.occupation(j);
        let prob = if keep_occupied { p } else { 1.0 - p };
        if prob <= 1e-12 {
            return Err(Error::ForbiddenOutcome {
                site: j,
                probability: prob,
            });
        }
        for (a, &s) in self.amplitudes.iter_mut().zip(self.basis.states()) {
            if (s & (1 << j) != 0) != keep_occupied {
                *a = ZERO;
            }
        }
        let norm = self.amplitudes.norm();
        self.amplitudes /= Complex64::new(norm, 0.0);
        Ok(())
    }

    /// Entropy of `region` from the explicitly traced-out reduced density matrix.
    ///
    /// Modes of the region are first moved to the front of the Jordan-Wigner
    /// order so non-contiguous regions get the correct fermionic signs.
    pub fn entropy(&self, region: &[usize]) -> f64 {
        let l = self.basis.sites();
        let in_region = |j: usize| region.contains(&j);
        let rest: Vec<usize> = (0..l).filter(|&j| !in_region(j)).collect();
        let split = |s: u32| -> (usize, usize, f64) {
            let mut a = 0usize;
            for (bit, &j) in region.iter().enumerate() {
                if s & (1 << j) != 0 {
                    a |= 1 << bit;
                }
            }
            let mut b = 0usize;
            for (bit, &j) in rest.iter().enumerate() {
                if s & (1 << j) != 0 {
                    b |= 1 << bit;
                }
            }
            // Count (outside, inside) pairs that are out of order.
            let mut swaps = 0u32;
            for &i in region.iter().filter(|&&i| s & (1 << i) != 0) {
                swaps += rest
                    .iter()
                    .filter(|&&o| o < i && s & (1 << o) != 0)
                    .count() as u32;
            }
            (a, b, if swaps % 2 == 0 { 1.0 } else { -1.0 })
        };
        let dim_a = 1usize << region.len();
        let mut columns: HashMap<usize, Vec<(usize, Complex64)>> = HashMap::new();
        for (&s, &amp) in self.basis.states().iter().zip(self.amplitudes.iter()) {
            let (a, b, sign) = split(s);
            columns.entry(b).or_default().push((a, amp * sign));
        }
        let mut rho = DMatrix::<Complex64>::zeros(dim_a, dim_a);
        for entries in columns.values() {
            for &(a1, x) in entries {
                for &(a2, y) in entries {
                    rho[(a1, a2)] += x * y.conj();
                }
            }
        }
        crate::linalg::hermitian_eigenvalues(rho)
            .iter()
            .filter(|&&p| p > 1e-14)
            .map(|&p| -p * p.ln())
            .sum()
    }

    pub fn entropy_profile(&self) -> Vec<f64> {
        let l = self.basis.sites();
        (1..l)
            .map(|cut| self.entropy(&(0..cut).collect::<Vec<_>>()))
            .collect()
    }
}

impl Monitored for FockState {
    fn sites(&self) -> usize {
        self.basis.sites()
    }

    fn occupation(&self, j: usize) -> f64 {
        FockState::occupation(self, j).clamp(0.0, 1.0)
    }

    fn project_occupied(&mut self, j: usize) -> Result<()> {
        self.measure(j, Outcome::Occupied)
    }

    fn project_empty(&mut self, j: usize) -> Result<()> {
        self.measure(j, Outcome::Empty)
    }
}

/// Second-quantized `Σ h_mn c_m† c_n` on one sector, diagonalized once.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    basis: std::sync::Arc<SectorBasis>,
    matrix: DMatrix<Complex64>,
    energies: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl SectorHamiltonian {
    pub fn new(h: &SingleParticleHamiltonian, particles: usize) -> Result<Self> {
        let basis = std::sync::Arc::new(SectorBasis::new(h.size(), particles)?);
        let dim = basis.dim();
        let hm = h.matrix();
        let l = h.size();
        let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
        for (col, &s) in basis.states().iter().enumerate() {
            for m in 0..l {
                for n in 0..l {
                    let t = hm[(m, n)];
                    if t == ZERO {
                        continue;
                    }
                    if let Some((sign, target)) = hop(s, m, n) {
                        let row = basis.position(target).expect("hopping stays in sector");
                        matrix[(row, col)] += t * sign;
                    }
                }
            }
        }
        let eig = crate::linalg::hermitian_eigen(&matrix)?;
        Ok(Self {
            basis,
            matrix,
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn basis(&self) -> std::sync::Arc<SectorBasis> {
        self.basis.clone()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `exp(-i H t)` on the sector.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let mut scaled = self.vectors.clone();
        for (c, &e) in self.energies.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -e * t);
            scaled.column_mut(c).iter_mut().for_each(|z| *z *= phase);
        }
        scaled * self.vectors.adjoint()
    }
}

/// Applies `exp(-i H dt)` to `state`.
pub fn ed_evolve(state: &FockState, hamiltonian: &SectorHamiltonian, dt: f64) -> Result<FockState> {
    if state.basis.dim() != hamiltonian.basis.dim() || state.basis.sites() != hamiltonian.basis.sites() {
        return Err(Error::DimensionMismatch {
            expected: hamiltonian.basis.dim(),
            found: state.basis.dim(),
        });
    }
    Ok(FockState {
        basis: state.basis.clone(),
        amplitudes: hamiltonian.propagator(dt) * &state.amplitudes,
    })
}

/// Largest deviations seen between the two representations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub entropy: f64,
    pub occupation: f64,
    pub mutual_information: f64,
    pub correlation: f64,
}

impl Deviation {
    pub fn max(&self) -> f64 {
        self.entropy
            .max(self.occupation)
            .max(self.mutual_information)
            .max(self.correlation)
    }

    fn merge(&mut self, other: &Deviation) {
        self.entropy = self.entropy.max(other.entropy);
        self.occupation = self.occupation.max(other.occupation);
        self.mutual_information = self.mutual_information.max(other.mutual_information);
        self.correlation = self.correlation.max(other.correlation);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LockstepReport {
    pub seed: u64,
    pub steps: usize,
    pub snapshots: usize,
    pub events: usize,
    pub deviation: Deviation,
    pub max_deviation: f64,
}

/// Compares all snapshot observables of the two representations.
pub fn compare(slater: &SlaterState, fock: &FockState) -> Result<Deviation> {
    let snap = Snapshot::take(slater, 0.0, &ObservableSet::default())?;
    let mut dev = ExactSnapshot::take(fock)?.deviation(&snap);
    for j in 0..slater.sites() {
        dev.occupation = dev
            .occupation
            .max((slater.occupation(j)? - fock.occupation(j)).abs());
    }
    Ok(dev)
}

/// Snapshot observables evaluated directly on the Fock vector.
struct ExactSnapshot {
    entropy: Vec<f64>,
    mutual_information: Option<f64>,
    correlations: Vec<f64>,
}

impl ExactSnapshot {
    fn take(fock: &FockState) -> Result<Self> {
        let l = fock.basis.sites();
        let mutual_information = if l % 8 == 0 {
            let g = antipodal_geometry(l)?;
            let a: Vec<usize> = g.a.clone().collect();
            let b: Vec<usize> = g.b.clone().collect();
            let ab: Vec<usize> = a.iter().chain(&b).copied().collect();
            Some(fock.entropy(&a) + fock.entropy(&b) - fock.entropy(&ab))
        } else {
            None
        };
        let reference = l / 2;
        let n_ref = fock.occupation(reference);
        let correlations = (0..l - reference)
            .map(|ell| {
                if ell == 0 {
                    n_ref * n_ref
                } else {
                    let other = reference + ell;
                    n_ref * fock.occupation(other) - fock.density_density(reference, other)
                }
            })
            .collect();
        Ok(Self {
            entropy: fock.entropy_profile(),
            mutual_information,
            correlations,
        })
    }

    fn deviation(&self, snap: &Snapshot) -> Deviation {
        let max_abs = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        Deviation {
            entropy: max_abs(&snap.entropy, &self.entropy),
            occupation: 0.0,
            mutual_information: match (snap.mutual_information, self.mutual_information) {
                (Some(x), Some(y)) => (x - y).abs(),
                _ => 0.0,
            },
            correlation: snap
                .correlations
                .as_deref()
                .map_or(0.0, |c| max_abs(c, &self.correlations)),
        }
    }
}

/// Runs the monitoring protocol on a Slater state and on its Fock expansion
/// with the same random stream and reports the largest observable deviation.
///
/// Aborts with the first step whose deviation exceeds `1e-6`.
pub fn lockstep_trajectory(
    hamiltonian: &SingleParticleHamiltonian,
    initial: &SlaterState,
    config: &MonitorConfig,
    seed: u64,
) -> Result<LockstepReport> {
    let l = hamiltonian.size();
    if l > MAX_SITES {
        return Err(Error::Capacity(format!(
            "lockstep runs need L <= {MAX_SITES}, got {l}"
        )));
    }
    let (total, every) = config.schedule(l, hamiltonian.hopping())?;
    let k = crate::lattice::Propagator::new(hamiltonian, config.dt)?;
    let sector = SectorHamiltonian::new(hamiltonian, initial.particles())?;
    let k_many = sector.propagator(config.dt);

    let mut slater = initial.clone();
    let mut fock = FockState::from_slater(initial)?;
    let mut fock_rng = rng::stream(seed);
    let mut slater_rng = rng::stream(seed);
    let mut deviation = compare(&slater, &fock)?;
    let mut events = 0;
    let mut snapshots = 1;
    let mut exact_snapshots = vec![ExactSnapshot::take(&fock)?];

    for n in 1..=total {
        let time = n as f64 * config.dt;
        slater.evolve(&k)?;
        if n % crate::monitor::REORTHONORMALIZE_EVERY == 0 {
            slater.reorthonormalize()?;
        }
        let firing = draw_firing(l, &mut slater_rng);
        let ev = measure_sweep(&mut slater, config, &firing, time, &mut slater_rng)?;

        fock.amplitudes = &k_many * &fock.amplitudes;
        let firing = draw_firing(l, &mut fock_rng);
        let ev_fock = measure_sweep(&mut fock, config, &firing, time, &mut fock_rng)?;

        if ev != ev_fock {
            return Err(Error::Numerical(format!(
                "representations diverged at step {n} (t = {time}): measurement records differ"
            )));
        }
        events += ev.len();
        if n % every == 0 || !ev.is_empty() {
            let d = compare(&slater, &fock)?;
            if d.max() > 1e-6 {
                return Err(Error::Numerical(format!(
                    "representations diverged at step {n} (t = {time}): deviation {:e} ({d:?})",
                    d.max()
                )));
            }
            if n % every == 0 {
                snapshots += 1;
                deviation.merge(&d);
                exact_snapshots.push(ExactSnapshot::take(&fock)?);
            }
        }
    }

    // The production engine batches quiet steps; it must see the same history.
    let engine = TrajectoryEngine::new(hamiltonian, *config, ObservableSet::default())?;
    let record = engine.run(initial, seed, 0)?;
    if record.event_count != events || record.snapshots.len() != exact_snapshots.len() {
        return Err(Error::Numerical(format!(
            "trajectory engine diverged from the stepwise run ({} vs {events} events)",
            record.event_count
        )));
    }
    for (snap, exact) in record.snapshots.iter().zip(&exact_snapshots) {
        deviation.merge(&exact.deviation(snap));
    }
    Ok(LockstepReport {
        seed,
        steps: total,
        snapshots,
        events,
        max_deviation: deviation.max(),
        deviation,
    })
}
