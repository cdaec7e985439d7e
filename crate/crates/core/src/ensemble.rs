//! Trajectory ensembles: seeding, potential realizations, parallel execution
//! and schedule-independent aggregation of steady-state observables.
//!
//! Trajectory `i` runs with stream key `trajectory_key(master_seed, i, r)`
//! where `r` is its realization index (`i` under the per-trajectory policy,
//! `0` under the fixed policy). Per-trajectory results are collected in index
//! order and reduced by pairwise summation, so output bytes do not depend on
//! the number of workers.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gaussian::SlaterState;
use crate::lattice::{build_hamiltonian, build_potential, PotentialSpec};
use crate::monitor::{steady_average, MonitorConfig, ObservableSet, TrajectoryEngine};
use crate::rng::{realization_key, stream, trajectory_key};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const ENTROPY_PROFILE_CSV: &str = "entropy_profile.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const CORRELATIONS_CSV: &str = "correlations.csv";
pub const MANIFEST_JSON: &str = "manifest.json";

fn default_hopping() -> f64 {
    1.0
}

fn default_potential() -> PotentialSpec {
    PotentialSpec::None
}

fn default_n_traj() -> usize {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "J", default = "default_hopping")]
    pub hopping: f64,
    #[serde(default = "default_potential")]
    pub potential: PotentialSpec,
}

/// How potential realizations (the quasi-periodic phase or the disorder
/// values) are assigned to trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizationPolicy {
    /// One realization for the whole ensemble. A quasi-periodic potential
    /// keeps its configured phase; Anderson disorder uses realization 0.
    Fixed,
    /// Fresh phase `θ ~ U[0, 2π)` or fresh disorder for every trajectory.
    #[default]
    PerTrajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub model: ModelSpec,
    pub monitor: MonitorConfig,
    pub n_traj: usize,
    pub master_seed: u64,
    pub realization_policy: RealizationPolicy,
    pub observables: ObservableSet,
}

impl EnsembleSpec {
    pub fn new(model: ModelSpec, monitor: MonitorConfig, master_seed: u64) -> Self {
        Self {
            model,
            monitor,
            n_traj: default_n_traj(),
            master_seed,
            realization_policy: RealizationPolicy::default(),
            observables: ObservableSet::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.model.l;
        if l < 2 || l % 2 != 0 {
            return Err(Error::param("model.L", format!("must be even and >= 2, got {l}")));
        }
        if self.observables.mutual_info && l % 8 != 0 {
            return Err(Error::param(
                "model.L",
                format!("must be a multiple of 8 when mutual information is enabled, got {l}"),
            ));
        }
        if !self.model.hopping.is_finite() || self.model.hopping == 0.0 {
            return Err(Error::param("model.J", "must be finite and nonzero"));
        }
        self.model.potential.validate()?;
        if self.n_traj == 0 {
            return Err(Error::param("ensemble.n_traj", "must be >= 1"));
        }
        let (steps, every) = self.monitor.schedule(l, self.model.hopping)?;
        if steps / every < 3 {
            return Err(Error::param(
                "monitor.t_max",
                "must span at least 3 observation intervals for a steady-state window",
            ));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("spec serializes");
        hex::encode(Sha256::digest(bytes))
    }

    /// Realization index used by trajectory `i`.
    pub fn realization_index(&self, i: u64) -> u64 {
        match self.realization_policy {
            RealizationPolicy::Fixed => 0,
            RealizationPolicy::PerTrajectory => i,
        }
    }

    /// True when different realization indices give different Hamiltonians.
    fn realizations_differ(&self) -> bool {
        self.realization_policy == RealizationPolicy::PerTrajectory && self.model.potential.is_random()
    }
}

/// On-site energies seen by trajectory `trajectory_index`.
pub fn realization_draw(spec: &EnsembleSpec, trajectory_index: u64) -> Result<Vec<f64>> {
    let r = spec.realization_index(trajectory_index);
    let mut rng = stream(realization_key(spec.master_seed, r));
    let potential = match (spec.realization_policy, spec.model.potential) {
        (RealizationPolicy::PerTrajectory, PotentialSpec::Quasiperiodic { v, beta, .. }) => {
            PotentialSpec::Quasiperiodic {
                v,
                beta,
                theta: rng.gen::<f64>() * TAU,
            }
        }
        (_, p) => p,
    };
    build_potential(&potential, spec.model.l, &mut rng)
}

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

impl Stat {
    /// Sample statistics with pairwise summation; the error is 0 for one sample.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = pairwise_sum(values) / n;
        if values.len() < 2 {
            return Self { mean, stderr: 0.0 };
        }
        let dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
        let var = pairwise_sum(&dev) / (n - 1.0);
        Self {
            mean,
            stderr: (var / n).sqrt(),
        }
    }
}

fn column_stats(rows: &[&[f64]]) -> Vec<Stat> {
    let width = rows[0].len();
    (0..width)
        .map(|k| Stat::of(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec_hash: String,
    pub master_seed: u64,
    /// Raw stream key of every trajectory, in index order.
    pub trajectory_seeds: Vec<u64>,
    pub code_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    #[serde(rename = "L")]
    pub l: usize,
    pub gamma: f64,
    pub potential_type: String,
    pub potential_param: f64,
    /// Steady-state `S(ℓ)`, `ℓ = 1..L-1`.
    pub entropy: Vec<Stat>,
    pub half_chain: Stat,
    pub mutual_information: Option<Stat>,
    /// Steady-state `C_ℓ`, `ℓ = 0..L/2`.
    pub correlations: Option<Vec<Stat>>,
    /// Snapshot times and the trajectory-averaged half-chain entropy.
    pub half_chain_series: Vec<(f64, f64)>,
    pub n_traj: usize,
    pub total_events: usize,
    pub provenance: Provenance,
}

struct TrajectoryOutput {
    steady: crate::monitor::SteadyState,
    series: Vec<f64>,
    times: Vec<f64>,
    events: usize,
}

/// Runs the ensemble on a pool of `workers` threads (default: available
/// parallelism). The result does not depend on `workers`.
pub fn run_ensemble(spec: &EnsembleSpec, workers: Option<usize>) -> Result<EnsembleResult> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    pool.install(|| run_inner(spec))
}

fn run_inner(spec: &EnsembleSpec) -> Result<EnsembleResult> {
    let l = spec.model.l;
    let initial = SlaterState::neel(l)?;
    let engine_for = |i: u64| -> Result<TrajectoryEngine> {
        let h = build_hamiltonian(spec.model.hopping, &realization_draw(spec, i)?)?;
        TrajectoryEngine::new(&h, spec.monitor, spec.observables)
    };
    let shared = if spec.realizations_differ() {
        None
    } else {
        Some(engine_for(0)?)
    };
    let seeds: Vec<u64> = (0..spec.n_traj as u64)
        .map(|i| trajectory_key(spec.master_seed, i, spec.realization_index(i)))
        .collect();

    let outputs: Vec<TrajectoryOutput> = (0..spec.n_traj)
        .into_par_iter()
        .map(|i| {
            let seed = seeds[i];
            let wrap = |e: Error| Error::Trajectory {
                index: i,
                seed,
                source: Box::new(e),
            };
            let own;
            let engine = match &shared {
                Some(e) => e,
                None => {
                    own = engine_for(i as u64).map_err(wrap)?;
                    &own
                }
            };
            let record = engine
                .run(&initial, seed, spec.realization_index(i as u64))
                .map_err(wrap)?;
            let steady = steady_average(&record, spec.monitor.steady_window_fraction).map_err(wrap)?;
            Ok(TrajectoryOutput {
                steady,
                series: record.snapshots.iter().map(|s| s.half_chain()).collect(),
                times: record.snapshots.iter().map(|s| s.time).collect(),
                events: record.event_count,
            })
        })
        .collect::<Result<_>>()?;

    let entropy_rows: Vec<&[f64]> = outputs.iter().map(|o| o.steady.entropy.as_slice()).collect();
    let half: Vec<f64> = outputs.iter().map(|o| o.steady.half_chain).collect();
    let mi: Option<Vec<f64>> = outputs.iter().map(|o| o.steady.mutual_information).collect();
    let corr: Option<Vec<&[f64]>> = outputs.iter().map(|o| o.steady.correlations.as_deref()).collect();
    let series_rows: Vec<&[f64]> = outputs.iter().map(|o| o.series.as_slice()).collect();
    let half_chain_series = outputs[0]
        .times
        .iter()
        .zip(column_stats(&series_rows))
        .map(|(&t, s)| (t, s.mean))
        .collect();

    Ok(EnsembleResult {
        l,
        gamma: spec.monitor.gamma,
        potential_type: spec.model.potential.kind_name().to_string(),
        potential_param: spec.model.potential.strength(),
        entropy: column_stats(&entropy_rows),
        half_chain: Stat::of(&half),
        mutual_information: mi.map(|v| Stat::of(&v)),
        correlations: corr.map(|rows| column_stats(&rows)),
        half_chain_series,
        n_traj: spec.n_traj,
        total_events: outputs.iter().map(|o| o.events).sum(),
        provenance: Provenance {
            spec_hash: spec.hash(),
            master_seed: spec.master_seed,
            trajectory_seeds: seeds,
            code_version: CODE_VERSION.to_string(),
        },
    })
}

#[derive(Serialize)]
struct ProfileRow<'a> {
    #[serde(rename = "L")]
    l: usize,
    gamma: f64,
    potential_type: &'a str,
    potential_param: f64,
    ell: usize,
    #[serde(rename = "S_mean")]
    mean: f64,
    #[serde(rename = "S_stderr")]
    stderr: f64,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    #[serde(rename = "L")]
    l: usize,
    gamma: f64,
    potential_type: &'a str,
    potential_param: f64,
    #[serde(rename = "S_half_mean")]
    s_half_mean: f64,
    #[serde(rename = "S_half_stderr")]
    s_half_stderr: f64,
    #[serde(rename = "MI_mean")]
    mi_mean: Option<f64>,
    #[serde(rename = "MI_stderr")]
    mi_stderr: Option<f64>,
    n_traj: usize,
    master_seed: u64,
}

#[derive(Serialize)]
struct CorrelationRow<'a> {
    #[serde(rename = "L")]
    l: usize,
    gamma: f64,
    potential_type: &'a str,
    potential_param: f64,
    ell: usize,
    #[serde(rename = "C_mean")]
    mean: f64,
    #[serde(rename = "C_stderr")]
    stderr: f64,
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Header-only CSV (used when an observable was not recorded).
fn write_header(path: &Path, header: &[&str]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    w.flush()?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Writes the three CSV tables of one ensemble into `dir` and returns their
/// checksums keyed by file name. With `profile` off only the half-chain cut
/// is written to the profile table.
pub fn write_tables(result: &EnsembleResult, observables: &ObservableSet, dir: &Path) -> Result<BTreeMap<String, String>> {
    fs::create_dir_all(dir)?;
    let kind = result.potential_type.as_str();
    let half = result.l / 2;
    write_csv(
        &dir.join(ENTROPY_PROFILE_CSV),
        result
            .entropy
            .iter()
            .enumerate()
            .map(|(i, s)| (i + 1, s))
            .filter(|(ell, _)| observables.profile || *ell == half)
            .map(|(ell, s)| ProfileRow {
                l: result.l,
                gamma: result.gamma,
                potential_type: kind,
                potential_param: result.potential_param,
                ell,
                mean: s.mean,
                stderr: s.stderr,
            }),
    )?;
    write_csv(
        &dir.join(SUMMARY_CSV),
        [SummaryRow {
            l: result.l,
            gamma: result.gamma,
            potential_type: kind,
            potential_param: result.potential_param,
            s_half_mean: result.half_chain.mean,
            s_half_stderr: result.half_chain.stderr,
            mi_mean: result.mutual_information.map(|s| s.mean),
            mi_stderr: result.mutual_information.map(|s| s.stderr),
            n_traj: result.n_traj,
            master_seed: result.provenance.master_seed,
        }],
    )?;
    let corr_path = dir.join(CORRELATIONS_CSV);
    match &result.correlations {
        Some(c) => write_csv(
            &corr_path,
            c.iter().enumerate().map(|(ell, s)| CorrelationRow {
                l: result.l,
                gamma: result.gamma,
                potential_type: kind,
                potential_param: result.potential_param,
                ell,
                mean: s.mean,
                stderr: s.stderr,
            }),
        )?,
        None => write_header(
            &corr_path,
            &["L", "gamma", "potential_type", "potential_param", "ell", "C_mean", "C_stderr"],
        )?,
    }
    [ENTROPY_PROFILE_CSV, SUMMARY_CSV, CORRELATIONS_CSV]
        .iter()
        .map(|name| Ok((name.to_string(), sha256_file(&dir.join(name))?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub spec: EnsembleSpec,
    pub spec_hash: String,
    pub code_version: String,
    pub trajectory_seeds: Vec<u64>,
    pub total_events: usize,
    /// SHA-256 of every output table.
    pub files: BTreeMap<String, String>,
}

/// Writes tables plus `manifest.json`; returns the manifest path.
pub fn write_run(spec: &EnsembleSpec, result: &EnsembleResult, dir: &Path) -> Result<PathBuf> {
    let files = write_tables(result, &spec.observables, dir)?;
    let manifest = RunManifest {
        spec: spec.clone(),
        spec_hash: spec.hash(),
        code_version: CODE_VERSION.to_string(),
        trajectory_seeds: result.provenance.trajectory_seeds.clone(),
        total_events: result.total_events,
        files,
    };
    let path = dir.join(MANIFEST_JSON);
    write_json_atomic(&path, &manifest)?;
    Ok(path)
}

/// Serializes to a sibling temporary file and renames it into place.
pub(crate) fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec_pretty(value)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
