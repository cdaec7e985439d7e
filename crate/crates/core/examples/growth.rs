//! Half-chain entanglement growth after a Néel quench: initial rate,
//! logarithmic coefficient and saturation value.
//!
//! `cargo run --release --example growth -- [L] [gamma] [delta]`

use monitored_fermions::analysis::growth_regimes;
use monitored_fermions::ensemble::{run_ensemble, EnsembleSpec, ModelSpec};
use monitored_fermions::lattice::PotentialSpec;
use monitored_fermions::monitor::MonitorConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let l: usize = arg(0, "32").parse()?;
    let gamma: f64 = arg(1, "0.1").parse()?;
    let delta: f64 = arg(2, "0.0").parse()?;
    let model = ModelSpec {
        l,
        hopping: 1.0,
        potential: PotentialSpec::Stark { delta },
    };
    let mut spec = EnsembleSpec::new(model, MonitorConfig::new(gamma).with_obs_interval(0.1), 3);
    spec.n_traj = 40;
    let r = run_ensemble(&spec, None)?;
    let (t, s): (Vec<f64>, Vec<f64>) = r.half_chain_series.iter().copied().unzip();
    let g = growth_regimes(&t, &s)?;
    println!("L = {l}, gamma = {gamma}, Stark delta = {delta}");
    println!("initial rate      dS/dt      = {:.4}", g.rate);
    println!("log coefficient   dS/dln(t)  = {:.4}", g.log_coefficient);
    println!("saturation        S_sat      = {:.4}", g.saturation);
    Ok(())
}
