//! BKT data collapse on a synthetic table with known (x_c, ν, α).
//!
//! `cargo run --release --example collapse -- [x_c] [nu] [alpha]`

use monitored_fermions::analysis::{fit_collapse, g_factor, CollapsePoint, LogBase, SearchBox};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let x_c: f64 = arg(0, "0.3").parse()?;
    let nu: f64 = arg(1, "4.0").parse()?;
    let alpha: f64 = arg(2, "6.0").parse()?;

    let mut points = Vec::new();
    for l in [80usize, 96, 112] {
        let lf = l as f64;
        let g = g_factor(lf, alpha, LogBase::Natural)?;
        for i in 0..24 {
            let x = x_c - 0.25 + 0.05 * i as f64;
            let big_x = lf.ln() - nu / (x - x_c).abs().max(1e-9).sqrt();
            let y = big_x.tanh() + 2.0;
            if x > 0.0 {
                points.push(CollapsePoint { x, l, c_eff: y / (g * x) });
            }
        }
    }
    let search = SearchBox::for_points(&points, LogBase::Natural)?;
    let fit = fit_collapse(&points, &search, LogBase::Natural)?;
    let p = fit.params;
    println!("truth:  x_c = {x_c:.4}, nu = {nu:.4}, alpha = {alpha:.4}");
    println!("fitted: x_c = {:.4}, nu = {:.4}, alpha = {:.4} (quality {:.2e})", p.x_c, p.nu, p.alpha, p.quality);
    println!("{} starts, {} ended on a face of the box", fit.starts, fit.starts_at_bound);
    if let Some(w) = fit.warning {
        println!("warning: {w}");
    }
    Ok(())
}
