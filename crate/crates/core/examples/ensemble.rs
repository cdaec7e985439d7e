//! Trajectory-averaged steady state of one parameter point.
//!
//! `cargo run --release --example ensemble -- [L] [gamma] [delta] [n_traj]`

use monitored_fermions::ensemble::{run_ensemble, EnsembleSpec, ModelSpec};
use monitored_fermions::lattice::PotentialSpec;
use monitored_fermions::monitor::MonitorConfig;
use std::time::Instant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let l: usize = arg(0, "32").parse()?;
    let gamma: f64 = arg(1, "0.3").parse()?;
    let delta: f64 = arg(2, "0.1").parse()?;
    let model = ModelSpec {
        l,
        hopping: 1.0,
        potential: PotentialSpec::Stark { delta },
    };
    let mut spec = EnsembleSpec::new(model, MonitorConfig::new(gamma), 2024);
    spec.n_traj = arg(3, "50").parse()?;
    spec.observables.mutual_info = l % 8 == 0;

    let start = Instant::now();
    let r = run_ensemble(&spec, None)?;
    println!("L = {l}, gamma = {gamma}, Stark delta = {delta}, {} trajectories", r.n_traj);
    println!("S_half = {:.4} ± {:.4}", r.half_chain.mean, r.half_chain.stderr);
    if let Some(mi) = r.mutual_information {
        println!("I(A:B) = {:.4} ± {:.4}", mi.mean, mi.stderr);
    }
    println!("measurement events: {}", r.total_events);
    println!("elapsed: {:.2?}", start.elapsed());
    Ok(())
}
