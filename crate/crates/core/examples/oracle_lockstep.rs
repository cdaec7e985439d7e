//! Gaussian trajectory against exact diagonalization in the fixed-N sector,
//! driven by the same random stream.
//!
//! `cargo run --release --example oracle_lockstep -- [L] [gamma] [seeds]`

use monitored_fermions::gaussian::SlaterState;
use monitored_fermions::lattice::build_hamiltonian;
use monitored_fermions::monitor::{MonitorConfig, Protocol};
use monitored_fermions::oracle::lockstep_trajectory;
use monitored_fermions::rng::trajectory_key;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let l: usize = arg(0, "8").parse()?;
    let gamma: f64 = arg(1, "0.5").parse()?;
    let seeds: u64 = arg(2, "5").parse()?;

    let h = build_hamiltonian(1.0, &vec![0.0; l])?;
    let initial = SlaterState::neel(l)?;
    for protocol in [Protocol::BornProjective, Protocol::LindbladJump] {
        let config = MonitorConfig::new(gamma).with_protocol(protocol);
        for i in 0..seeds {
            let r = lockstep_trajectory(&h, &initial, &config, trajectory_key(7, i, 0))?;
            println!(
                "{protocol:?} seed {i}: {} steps, {} events, max deviation {:.2e}",
                r.steps, r.events, r.max_deviation
            );
        }
    }
    Ok(())
}
