//! Parameter sweeps over `(γ, P, L)` with per-point persistence and resume.
//!
//! Every grid point lives in its own directory holding the three ensemble
//! tables and a `point.json` that records the point spec hash, the table
//! checksums and the aggregated result. `point.json` is written last and
//! atomically, so a point counts as complete only if it exists, its hash
//! matches the requested spec and every table still matches its checksum.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{ceff_pair, fit_ceff, CeffFit};
use crate::ensemble::{run_ensemble, sha256_file, write_json_atomic, write_tables, EnsembleResult, EnsembleSpec, CODE_VERSION};
use crate::error::{Error, Result};
use crate::lattice::PotentialSpec;

pub const POINT_JSON: &str = "point.json";
pub const SWEEP_MANIFEST_JSON: &str = "sweep_manifest.json";
pub const SWEEP_SUMMARY_CSV: &str = "sweep_summary.csv";
pub const CEFF_TABLE_CSV: &str = "ceff_table.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    pub gammas: Vec<f64>,
    /// Potential strengths (Δ, V or W) applied to the base potential family.
    pub strengths: Vec<f64>,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: EnsembleSpec,
    pub axes: SweepAxes,
    pub output: PathBuf,
}

fn strictly_increasing<T: PartialOrd>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::param(name, "axis is empty"));
    }
    if v.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::param(name, "axis must be strictly increasing"));
    }
    Ok(())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        strictly_increasing("sweep.gammas", &self.axes.gammas)?;
        strictly_increasing("sweep.strengths", &self.axes.strengths)?;
        strictly_increasing("sweep.sizes", &self.axes.sizes)?;
        if self.base.model.potential == PotentialSpec::None && self.axes.strengths != [0.0] {
            return Err(Error::param(
                "sweep.strengths",
                "the base model has no potential; use strengths = [0]",
            ));
        }
        for p in self.points() {
            p.spec.validate()?;
        }
        Ok(())
    }

    /// Grid points ordered by γ, then strength, then size.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &gamma in &self.axes.gammas {
            for &strength in &self.axes.strengths {
                for &l in &self.axes.sizes {
                    let mut spec = self.base.clone();
                    spec.model.l = l;
                    spec.model.potential = spec.model.potential.with_strength(strength);
                    spec.monitor.gamma = gamma;
                    out.push(GridPoint {
                        gamma,
                        strength,
                        l,
                        dir: self.output.join("points").join(format!("L{l}_gamma{gamma}_p{strength}")),
                        spec,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct GridPoint {
    pub gamma: f64,
    pub strength: f64,
    pub l: usize,
    pub dir: PathBuf,
    pub spec: EnsembleSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub spec: EnsembleSpec,
    pub spec_hash: String,
    pub code_version: String,
    pub files: BTreeMap<String, String>,
    pub result: EnsembleResult,
}

/// Loads a completed point, or explains why it must be recomputed.
pub fn load_point(point: &GridPoint) -> std::result::Result<PointRecord, String> {
    let path = point.dir.join(POINT_JSON);
    let bytes = fs::read(&path).map_err(|_| "not started".to_string())?;
    let rec: PointRecord = serde_json::from_slice(&bytes).map_err(|e| format!("unreadable {POINT_JSON}: {e}"))?;
    if rec.spec_hash != point.spec.hash() {
        return Err("spec changed".into());
    }
    for (name, sum) in &rec.files {
        match sha256_file(&point.dir.join(name)) {
            Ok(s) if &s == sum => {}
            _ => return Err(format!("checksum mismatch in {name}")),
        }
    }
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub gamma: f64,
    pub strength: f64,
    pub l: usize,
    pub result: EnsembleResult,
    pub fit: Option<CeffFit>,
    pub resumed: bool,
}

/// One row per `(γ, P)` and consecutive size pair `(L_small, L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeffRow {
    pub gamma: f64,
    pub potential_type: String,
    pub potential_param: f64,
    #[serde(rename = "L_small")]
    pub l_small: usize,
    #[serde(rename = "L")]
    pub l: usize,
    /// Two-size estimate `3·ΔS_half / ln(L/L_small)`.
    pub c_eff: f64,
    pub c_eff_err: f64,
    /// Profile fit at size `L`.
    pub c_eff_fit: Option<f64>,
    pub c_eff_fit_err: Option<f64>,
    pub s0: Option<f64>,
    pub fit_residual: Option<f64>,
    #[serde(rename = "S_half_mean")]
    pub s_half_mean: f64,
    #[serde(rename = "S_half_stderr")]
    pub s_half_stderr: f64,
}

/// One row per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub gamma: f64,
    pub potential_type: String,
    pub potential_param: f64,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "S_half_mean")]
    pub s_half_mean: f64,
    #[serde(rename = "S_half_stderr")]
    pub s_half_stderr: f64,
    #[serde(rename = "MI_mean")]
    pub mi_mean: Option<f64>,
    #[serde(rename = "MI_stderr")]
    pub mi_stderr: Option<f64>,
    pub c_eff_fit: Option<f64>,
    pub c_eff_fit_err: Option<f64>,
    pub s0: Option<f64>,
    pub fit_residual: Option<f64>,
    pub n_traj: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub ceff: Vec<CeffRow>,
}

impl SweepResult {
    pub fn point(&self, gamma: f64, strength: f64, l: usize) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.gamma == gamma && p.strength == strength && p.l == l)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PointStatus {
    gamma: f64,
    strength: f64,
    #[serde(rename = "L")]
    l: usize,
    dir: String,
    spec_hash: String,
    status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SweepManifest {
    spec: SweepSpec,
    spec_hash: String,
    code_version: String,
    points: Vec<PointStatus>,
}

fn sweep_hash(spec: &SweepSpec) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(serde_json::to_vec(&(&spec.base, &spec.axes)).expect("serializes")))
}

/// Runs (or resumes) every grid point, then writes the summary and c_eff tables.
/// `on_point` is told about each point as it completes.
pub fn sweep_grid(spec: &SweepSpec, workers: Option<usize>, mut on_point: impl FnMut(&SweepPoint)) -> Result<SweepResult> {
    spec.validate()?;
    fs::create_dir_all(&spec.output)?;
    let grid = spec.points();
    let mut manifest = SweepManifest {
        spec: spec.clone(),
        spec_hash: sweep_hash(spec),
        code_version: CODE_VERSION.to_string(),
        points: grid
            .iter()
            .map(|p| PointStatus {
                gamma: p.gamma,
                strength: p.strength,
                l: p.l,
                dir: p.dir.strip_prefix(&spec.output).unwrap_or(&p.dir).display().to_string(),
                spec_hash: p.spec.hash(),
                status: "pending".into(),
            })
            .collect(),
    };
    let manifest_path = spec.output.join(SWEEP_MANIFEST_JSON);
    let mut points = Vec::with_capacity(grid.len());
    for (k, p) in grid.iter().enumerate() {
        let (result, resumed) = match load_point(p) {
            Ok(rec) => (rec.result, true),
            Err(_) => (run_point(p, workers)?, false),
        };
        let fit = fit_ceff(
            &result.entropy.iter().map(|s| s.mean).collect::<Vec<_>>(),
            Some(&result.entropy.iter().map(|s| s.stderr).collect::<Vec<_>>()),
            p.l,
        )
        .ok();
        let sp = SweepPoint {
            gamma: p.gamma,
            strength: p.strength,
            l: p.l,
            result,
            fit,
            resumed,
        };
        on_point(&sp);
        points.push(sp);
        manifest.points[k].status = "complete".into();
        write_json_atomic(&manifest_path, &manifest)?;
    }
    let ceff = ceff_rows(&points, &spec.axes.sizes)?;
    write_summary(&spec.output.join(SWEEP_SUMMARY_CSV), &points)?;
    let mut w = csv::Writer::from_path(spec.output.join(CEFF_TABLE_CSV))?;
    for r in &ceff {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(SweepResult { points, ceff })
}

fn run_point(p: &GridPoint, workers: Option<usize>) -> Result<EnsembleResult> {
    if p.dir.exists() {
        fs::remove_dir_all(&p.dir)?;
    }
    let result = run_ensemble(&p.spec, workers)?;
    let files = write_tables(&result, &p.spec.observables, &p.dir)?;
    let rec = PointRecord {
        spec: p.spec.clone(),
        spec_hash: p.spec.hash(),
        code_version: CODE_VERSION.to_string(),
        files,
        result,
    };
    write_json_atomic(&p.dir.join(POINT_JSON), &rec)?;
    Ok(rec.result)
}

fn ceff_rows(points: &[SweepPoint], sizes: &[usize]) -> Result<Vec<CeffRow>> {
    let mut rows = Vec::new();
    for chunk in points.chunks(sizes.len()) {
        for pair in chunk.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let (c, e) = ceff_pair(
                a.l,
                (a.result.half_chain.mean, a.result.half_chain.stderr),
                b.l,
                (b.result.half_chain.mean, b.result.half_chain.stderr),
            )?;
            rows.push(CeffRow {
                gamma: b.gamma,
                potential_type: b.result.potential_type.clone(),
                potential_param: b.strength,
                l_small: a.l,
                l: b.l,
                c_eff: c,
                c_eff_err: e,
                c_eff_fit: b.fit.as_ref().map(|f| f.c_eff),
                c_eff_fit_err: b.fit.as_ref().map(|f| f.c_eff_err),
                s0: b.fit.as_ref().map(|f| f.s0),
                fit_residual: b.fit.as_ref().map(|f| f.residual),
                s_half_mean: b.result.half_chain.mean,
                s_half_stderr: b.result.half_chain.stderr,
            });
        }
    }
    Ok(rows)
}

fn write_summary(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for p in points {
        let r = &p.result;
        w.serialize(SummaryRow {
            gamma: p.gamma,
            potential_type: r.potential_type.clone(),
            potential_param: p.strength,
            l: p.l,
            s_half_mean: r.half_chain.mean,
            s_half_stderr: r.half_chain.stderr,
            mi_mean: r.mutual_information.map(|s| s.mean),
            mi_stderr: r.mutual_information.map(|s| s.stderr),
            c_eff_fit: p.fit.as_ref().map(|f| f.c_eff),
            c_eff_fit_err: p.fit.as_ref().map(|f| f.c_eff_err),
            s0: p.fit.as_ref().map(|f| f.s0),
            fit_residual: p.fit.as_ref().map(|f| f.residual),
            n_traj: r.n_traj,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `ceff_table.csv`.
pub fn read_ceff_table(path: &Path) -> Result<Vec<CeffRow>> {
    let mut rd = csv::Reader::from_path(path)?;
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}
