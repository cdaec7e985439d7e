//! Phenomenological phase boundary: level fits to the reference critical
//! points and the resulting P_c(γ) lines.
//!
//! `cargo run --example boundary`

use monitored_fermions::analysis::boundary::{REFERENCE_QPP_POINTS, REFERENCE_SP_POINTS};
use monitored_fermions::analysis::{boundary_curve, fit_c0, solve_boundary, BoundaryKind, BoundaryParams, NOMINAL_C0};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = BoundaryParams::default();
    for (kind, points) in [(BoundaryKind::Sp, &REFERENCE_SP_POINTS), (BoundaryKind::Qpp, &REFERENCE_QPP_POINTS)] {
        let fit = fit_c0(points, kind, &base)?;
        println!("{kind:?}: c0 = {:.4}, rms residual = {:.4}", fit.c0, fit.rms_residual);
        let params = BoundaryParams::with_level(fit.c0);
        let gammas: Vec<f64> = (0..=10).map(|i| 0.05 * i as f64).collect();
        for (g, p) in boundary_curve(&gammas, kind, &params)? {
            match p {
                Some(p) => println!("  gamma {g:.2}  P_c {p:.4}"),
                None => println!("  gamma {g:.2}  (no transition)"),
            }
        }
    }
    match solve_boundary(0.2, BoundaryKind::Sp, &BoundaryParams::with_level(NOMINAL_C0)) {
        Ok(p) => println!("C0 = {NOMINAL_C0}: P_c = {p}"),
        Err(e) => println!("C0 = {NOMINAL_C0}: {e}"),
    }
    Ok(())
}
