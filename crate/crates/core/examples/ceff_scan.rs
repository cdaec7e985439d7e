//! Effective central charge across a scan of either the measurement rate (at a
//! fixed potential strength) or the potential strength (at a fixed rate), for
//! several sizes. The c_eff(L) curves cross near the transition.
//!
//! `cargo run --release --example ceff_scan -- [stark|qpp] [gamma|strength] [fixed] [v1,v2,..] [n_traj]`

use monitored_fermions::ensemble::{EnsembleSpec, ModelSpec};
use monitored_fermions::lattice::PotentialSpec;
use monitored_fermions::monitor::MonitorConfig;
use monitored_fermions::sweep::{sweep_grid, SweepAxes, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let family = arg(0, "stark");
    let scan = arg(1, "gamma");
    let fixed: f64 = arg(2, "0.1").parse()?;
    let values: Vec<f64> = arg(3, "0.1,0.2,0.3,0.4,0.5,0.6")
        .split(',')
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    let n_traj: usize = arg(4, "40").parse()?;

    let potential = match family.as_str() {
        "stark" => PotentialSpec::Stark { delta: 0.0 },
        "qpp" => PotentialSpec::quasiperiodic(0.0, 0.0),
        other => return Err(format!("unknown potential family {other}").into()),
    };
    let (gammas, strengths) = match scan.as_str() {
        "gamma" => (values.clone(), vec![fixed]),
        "strength" => (vec![fixed], values.clone()),
        other => return Err(format!("unknown scan axis {other}").into()),
    };
    let out = std::env::temp_dir().join(format!("ceff_scan_{family}_{scan}_{fixed}_{n_traj}"));
    let model = ModelSpec {
        l: 16,
        hopping: 1.0,
        potential,
    };
    let mut base = EnsembleSpec::new(model, MonitorConfig::new(0.0), 11);
    base.n_traj = n_traj;
    let spec = SweepSpec {
        base,
        axes: SweepAxes {
            gammas,
            strengths,
            sizes: vec![16, 32, 48],
        },
        output: out.clone(),
    };
    let result = sweep_grid(&spec, None, |p| {
        let fit = p.fit.as_ref().map_or(f64::NAN, |f| f.c_eff);
        eprintln!(
            "gamma {:.2}  P {:.2}  L {:>3}  S_half {:.4}  c_eff(profile) {:.3}",
            p.gamma, p.strength, p.l, p.result.half_chain.mean, fit
        );
    })?;
    println!("gamma  P     L_small  L   c_eff(pair)  c_eff(profile at L)");
    for r in &result.ceff {
        println!(
            "{:.2}   {:.2}   {:>3}  {:>3}   {:>7.3} ± {:.3}   {:>7.3}",
            r.gamma,
            r.potential_param,
            r.l_small,
            r.l,
            r.c_eff,
            r.c_eff_err,
            r.c_eff_fit.unwrap_or(f64::NAN)
        );
    }
    println!("tables in {}", out.display());
    Ok(())
}
