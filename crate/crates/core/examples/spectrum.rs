//! Single-particle spectra of the three potential families.
//!
//! `cargo run --example spectrum -- [L] [strength]`

use monitored_fermions::lattice::{build_hamiltonian, build_potential, PotentialSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let l: usize = args.first().map_or(Ok(16), |s| s.parse())?;
    let w: f64 = args.get(1).map_or(Ok(1.0), |s| s.parse())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for spec in [
        PotentialSpec::Stark { delta: w },
        PotentialSpec::quasiperiodic(w, 0.0),
        PotentialSpec::Anderson { w },
    ] {
        let h = build_hamiltonian(1.0, &build_potential(&spec, l, &mut rng)?)?;
        let (energies, _) = h.eigen()?;
        let shown: Vec<String> = energies.iter().map(|e| format!("{e:.3}")).collect();
        println!("{spec:?}\n  {}", shown.join(" "));
    }
    Ok(())
}
