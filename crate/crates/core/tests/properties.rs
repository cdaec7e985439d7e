//! Randomized invariants across the state, observable and analysis layers.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::LN_2;

use monitored_fermions::analysis::{
    boundary_value, ceff_pair, chord_log, fit_ceff, fit_collapse, g_factor, solve_boundary, BoundaryKind,
    BoundaryParams, CollapsePoint, LogBase, SearchBox,
};
use monitored_fermions::ensemble::{run_ensemble, EnsembleSpec, ModelSpec};
use monitored_fermions::gaussian::SlaterState;
use monitored_fermions::lattice::{build_hamiltonian, build_potential, PotentialSpec, Propagator};
use monitored_fermions::monitor::MonitorConfig;
use monitored_fermions::observables::{
    antipodal_geometry, entanglement_entropy, entropy_profile, mutual_information, region_entropy,
};
use monitored_fermions::Error;

fn random_state(l: usize, n: usize, seed: u64) -> SlaterState {
    SlaterState::random(l, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn random_unitary(n: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.qr().q()
}

/// Even chain length with a particle number in `1..L`.
fn sizes() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=12).prop_flat_map(|h| (Just(2 * h), 1..2 * h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn entropy_bounds((l, n) in sizes(), seed in any::<u64>()) {
        let s = random_state(l, n, seed);
        for (i, &v) in entropy_profile(&s).iter().enumerate() {
            let ell = i + 1;
            prop_assert!(v >= -1e-12, "S({ell}) = {v}");
            prop_assert!(v <= ell.min(l - ell) as f64 * LN_2 + 1e-9, "S({ell}) = {v}");
        }
    }

    #[test]
    fn region_and_complement_agree((l, n) in sizes(), seed in any::<u64>()) {
        let s = random_state(l, n, seed);
        for ell in 1..l {
            let left = entanglement_entropy(&s, 0..ell).unwrap();
            let right = entanglement_entropy(&s, ell..l).unwrap();
            prop_assert!((left - right).abs() < 1e-9, "ℓ = {ell}: {left} vs {right}");
        }
    }

    #[test]
    fn mutual_information_is_nonnegative(h in 1usize..=4, n_frac in 0.1f64..0.9, seed in any::<u64>()) {
        let l = 8 * h;
        let n = ((l as f64 * n_frac) as usize).clamp(1, l - 1);
        let s = random_state(l, n, seed);
        let mi = mutual_information(&s, &antipodal_geometry(l).unwrap()).unwrap();
        prop_assert!(mi >= -1e-9, "I = {mi}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn correlation_spectrum_is_physical((l, n) in sizes(), seed in any::<u64>()) {
        let s = random_state(l, n, seed);
        let c = s.correlation_matrix();
        for e in c.eigenvalues() {
            prop_assert!((-1e-10..=1.0 + 1e-10).contains(&e), "eigenvalue {e}");
        }
        prop_assert!((c.trace() - n as f64).abs() < 1e-9);
    }

    #[test]
    fn particle_number_is_conserved(
        (l, n) in sizes(),
        seed in any::<u64>(),
        ops in proptest::collection::vec((0u8..3, any::<u16>()), 1..40),
    ) {
        let mut s = random_state(l, n, seed);
        let h = build_hamiltonian(1.0, &build_potential(&PotentialSpec::Stark { delta: 0.7 }, l, &mut ChaCha8Rng::seed_from_u64(0)).unwrap()).unwrap();
        let k = Propagator::new(&h, 0.05).unwrap();
        for (op, site) in ops {
            let j = site as usize % l;
            let occ = s.occupation(j).unwrap();
            match op {
                0 => s.evolve(&k).unwrap(),
                1 if occ > 1e-6 => s.project_occupied(j).unwrap(),
                2 if occ < 1.0 - 1e-6 => s.project_empty(j).unwrap(),
                _ => {}
            }
            prop_assert!((s.correlation_matrix().trace() - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn observables_ignore_orbital_basis((l, n) in sizes(), seed in any::<u64>()) {
        let s = random_state(l, n, seed);
        let mut r = s.clone();
        r.rotate_orbitals(&random_unitary(n, seed ^ 0x5555)).unwrap();
        let d = (s.correlation_matrix().matrix() - r.correlation_matrix().matrix()).camax();
        prop_assert!(d < 1e-10, "correlation drift {d}");
        let region: Vec<usize> = (0..l).step_by(3).collect();
        let (a, b) = (region_entropy(&s, &region).unwrap(), region_entropy(&r, &region).unwrap());
        prop_assert!((a - b).abs() < 1e-10);
        for (x, y) in entropy_profile(&s).iter().zip(entropy_profile(&r)) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn projections_pin_the_site((l, n) in sizes(), seed in any::<u64>(), site in any::<u16>()) {
        let j = site as usize % l;
        let s = random_state(l, n, seed);
        let occ = s.occupation(j).unwrap();
        if occ > 1e-6 {
            let mut t = s.clone();
            t.project_occupied(j).unwrap();
            prop_assert!((t.occupation(j).unwrap() - 1.0).abs() < 1e-10);
        }
        if occ < 1.0 - 1e-6 {
            let mut t = s.clone();
            t.project_empty(j).unwrap();
            prop_assert!(t.occupation(j).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn potentials_respect_their_bounds(h in 1usize..=64, strength in 0.0f64..10.0, seed in any::<u64>()) {
        let l = 2 * h;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stark = build_potential(&PotentialSpec::Stark { delta: strength }, l, &mut rng).unwrap();
        prop_assert!(stark.windows(2).all(|w| w[1] >= w[0]));
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let qp = build_potential(&PotentialSpec::quasiperiodic(strength, theta), l, &mut rng).unwrap();
        prop_assert!(qp.iter().all(|p| p.abs() <= strength));
        let w = build_potential(&PotentialSpec::Anderson { w: strength }, l, &mut rng).unwrap();
        prop_assert!(w.iter().all(|p| p.abs() <= strength));
        let ham = build_hamiltonian(1.0, &w).unwrap();
        prop_assert_eq!(ham.matrix(), &ham.matrix().adjoint());
    }

    #[test]
    fn boundary_solution_round_trips(gamma in 0.0f64..1.0, c0 in 0.9f64..1.9, sp in any::<bool>()) {
        let kind = if sp { BoundaryKind::Sp } else { BoundaryKind::Qpp };
        let params = BoundaryParams::with_level(c0);
        match solve_boundary(gamma, kind, &params) {
            Ok(p) => prop_assert!((boundary_value(gamma, p, kind, &params) - c0).abs() < 1e-8),
            Err(Error::NoSolution(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn g_factor_grows_with_size(alpha in -5.0f64..5.0, l in 16.0f64..500.0, step in 1.0f64..100.0) {
        let lo = g_factor(l, alpha, LogBase::Natural);
        let hi = g_factor(l + step, alpha, LogBase::Natural);
        if let (Ok(lo), Ok(hi)) = (lo, hi) {
            prop_assert!(hi > lo);
        }
    }
}

#[test]
fn boundary_is_decreasing_on_a_grid() {
    let params = BoundaryParams::default();
    for kind in [BoundaryKind::Sp, BoundaryKind::Qpp] {
        let axis: Vec<f64> = (0..50).map(|i| i as f64 * 0.04).collect();
        for (i, &g) in axis.iter().enumerate() {
            for (j, &p) in axis.iter().enumerate() {
                let v = boundary_value(g, p, kind, &params);
                assert!(v > 0.0 && v <= 2.0, "{kind:?} ({g}, {p}) -> {v}");
                if i > 0 {
                    assert!(v < boundary_value(axis[i - 1], p, kind, &params));
                }
                if j > 0 {
                    assert!(v < boundary_value(g, axis[j - 1], kind, &params));
                }
            }
        }
    }
}

#[test]
fn profile_fit_and_two_size_estimate_agree_on_noisy_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &c in &[0.5, 1.0, 2.0, 4.0] {
        let mut noisy = |l: usize| -> Vec<f64> {
            (1..l).map(|ell| c / 3.0 * chord_log(l, ell) + 0.4 + 0.01 * rng.gen_range(-1.0..1.0)).collect()
        };
        let (p32, p64) = (noisy(32), noisy(64));
        let fit = fit_ceff(&p64, None, 64).unwrap().c_eff;
        let (two, _) = ceff_pair(32, (p32[15], 0.0), 64, (p64[31], 0.0)).unwrap();
        assert!((fit - two).abs() <= 0.15 * two.abs(), "c = {c}: fit {fit}, two-size {two}");
    }
}

fn bkt_table(x_c: f64, nu: f64, alpha: f64) -> Vec<CollapsePoint> {
    let mut pts = Vec::new();
    for &l in &[80usize, 96, 112] {
        let lf = l as f64;
        for i in 0..20 {
            let x = x_c + (nu / 4.0).powi(2) * 0.3 * (5.0 / 0.3f64).powf(i as f64 / 19.0);
            let big_x = lf.ln() - nu / (x - x_c).sqrt();
            let y = big_x.tanh() + 2.0;
            let g = g_factor(lf, alpha, LogBase::Natural).unwrap();
            pts.push(CollapsePoint { x, l, c_eff: y / (g * x) });
        }
    }
    pts
}

#[test]
fn collapse_scale_consistency() {
    let fit = |nu: f64| {
        let pts = bkt_table(0.3, nu, 6.0);
        let search = SearchBox {
            x_c: (0.0, 0.6),
            nu: (0.5, 10.0),
            alpha: (0.0, 8.0),
        };
        fit_collapse(&pts, &search, LogBase::Natural).unwrap().params.nu
    };
    let (one, two) = (fit(2.0), fit(4.0));
    assert!((two / one - 2.0).abs() < 0.2, "ν = {one} then {two}");
}

#[test]
fn standard_error_halves_with_four_times_the_trajectories() {
    let model = ModelSpec {
        l: 16,
        hopping: 1.0,
        potential: PotentialSpec::Stark { delta: 0.1 },
    };
    let run = |n| {
        let mut spec = EnsembleSpec::new(model, MonitorConfig::new(0.3), 21);
        spec.n_traj = n;
        run_ensemble(&spec, None).unwrap().half_chain.stderr
    };
    let (small, large) = (run(40), run(160));
    let ratio = small / large;
    assert!((ratio - 2.0).abs() < 0.6, "stderr {small} -> {large} (ratio {ratio})");
}
