//! Density-density correlator in the steady state, classified as algebraic
//! or exponential.
//!
//! `cargo run --release --example correlation_decay -- [L] [gamma] [strength]`

use monitored_fermions::analysis::fit_correlation_decay;
use monitored_fermions::ensemble::{run_ensemble, EnsembleSpec, ModelSpec};
use monitored_fermions::lattice::PotentialSpec;
use monitored_fermions::monitor::MonitorConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let l: usize = arg(0, "64").parse()?;
    let gamma: f64 = arg(1, "0.2").parse()?;
    let strength: f64 = arg(2, "0.5").parse()?;
    let model = ModelSpec {
        l,
        hopping: 1.0,
        potential: PotentialSpec::quasiperiodic(strength, 0.0),
    };
    let mut spec = EnsembleSpec::new(model, MonitorConfig::new(gamma), 5);
    spec.n_traj = 40;
    spec.observables.mutual_info = false;
    let r = run_ensemble(&spec, None)?;
    let c: Vec<f64> = r.correlations.ok_or("correlations were not recorded")?.iter().map(|s| s.mean).collect();
    for (ell, v) in c.iter().enumerate().take(l / 4 + 1) {
        println!("C({ell:>2}) = {v:.3e}");
    }
    let fit = fit_correlation_decay(&c, l)?;
    println!("model {:?}, eta {:?}, xi {:?}, score {:.3}", fit.model, fit.eta, fit.xi, fit.model_selection_score);
    Ok(())
}
