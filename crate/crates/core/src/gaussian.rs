//! Slater-determinant states stored as an `L x N` matrix of orthonormal orbitals.
//!
//! Observables only depend on the column span of the orbital matrix, so any
//! operation is free to rotate columns among themselves.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::Propagator;

/// Occupations closer than this to 0 or 1 are treated as sharp.
pub const DEGENERATE_OCCUPATION: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SlaterState {
    u: DMatrix<Complex64>,
}

/// Two-point function `d[m, n] = <c_m† c_n>`.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    d: DMatrix<Complex64>,
}

impl CorrelationMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.d
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.d[(m, n)]
    }

    pub fn trace(&self) -> f64 {
        self.d.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        crate::linalg::hermitian_eigenvalues(self.d.clone())
    }
}

impl SlaterState {
    /// Wraps an orbital matrix, restoring orthonormality with a QR step.
    pub fn from_orbitals(u: DMatrix<Complex64>) -> Result<Self> {
        let (l, n) = u.shape();
        if n == 0 || n > l {
            return Err(Error::param(
                "N",
                format!("particle count must satisfy 1 <= N <= L, got N={n}, L={l}"),
            ));
        }
        let mut state = Self { u };
        state.reorthonormalize()?;
        Ok(state)
    }

    /// Alternating occupation starting with site 0 filled, `N = L/2`.
    pub fn neel(l: usize) -> Result<Self> {
        if l < 2 || l % 2 != 0 {
            return Err(Error::param("L", format!("Néel state needs an even L >= 2, got {l}")));
        }
        let n = l / 2;
        let mut u = DMatrix::zeros(l, n);
        for i in 0..n {
            u[(2 * i, i)] = ONE;
        }
        Ok(Self { u })
    }

    /// Orthonormalized matrix of uniform complex entries; test and example helper.
    pub fn random<R: Rng + ?Sized>(l: usize, n: usize, rng: &mut R) -> Result<Self> {
        let u = DMatrix::from_fn(l, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        Self::from_orbitals(u)
    }

    pub fn sites(&self) -> usize {
        self.u.nrows()
    }

    pub fn particles(&self) -> usize {
        self.u.ncols()
    }

    pub fn orbitals(&self) -> &DMatrix<Complex64> {
        &self.u
    }

    /// Right-multiplies the orbitals by an `N x N` matrix (a basis change of the
    /// occupied subspace when the matrix is unitary).
    pub fn rotate_orbitals(&mut self, v: &DMatrix<Complex64>) -> Result<()> {
        if v.shape() != (self.particles(), self.particles()) {
            return Err(Error::DimensionMismatch {
                expected: self.particles(),
                found: v.nrows(),
            });
        }
        self.u = &self.u * v;
        Ok(())
    }

    /// Largest entry of `|u†u - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.u.adjoint() * &self.u;
        let mut worst = 0.0f64;
        for c in 0..g.ncols() {
            for r in 0..g.nrows() {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((g[(r, c)] - target).norm());
            }
        }
        worst
    }

    /// One unitary step `u <- k u`.
    pub fn evolve(&mut self, k: &Propagator) -> Result<()> {
        self.apply(k.matrix())
    }

    /// `u <- k u` for an arbitrary single-particle unitary.
    pub fn apply(&mut self, k: &DMatrix<Complex64>) -> Result<()> {
        if k.nrows() != self.sites() || k.ncols() != self.sites() {
            return Err(Error::DimensionMismatch {
                expected: self.sites(),
                found: k.nrows(),
            });
        }
        self.u = k * &self.u;
        Ok(())
    }

    fn check_site(&self, j: usize) -> Result<()> {
        if j >= self.sites() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.sites(),
            });
        }
        Ok(())
    }

    /// `<n_j>`, clamped to `[0, 1]`.
    pub fn occupation(&self, j: usize) -> Result<f64> {
        self.check_site(j)?;
        Ok(self.occupation_unchecked(j))
    }

    pub(crate) fn occupation_unchecked(&self, j: usize) -> f64 {
        self.u.row(j).iter().map(|z| z.norm_sqr()).sum::<f64>().clamp(0.0, 1.0)
    }

    pub fn occupations(&self) -> Vec<f64> {
        (0..self.sites()).map(|j| self.occupation_unchecked(j)).collect()
    }

    pub fn correlation_matrix(&self) -> CorrelationMatrix {
        let d = self.u.conjugate() * self.u.transpose();
        CorrelationMatrix { d }
    }

    /// `<c_m† c_n>` without forming the full matrix.
    pub fn correlation(&self, m: usize, n: usize) -> Result<Complex64> {
        self.check_site(m)?;
        self.check_site(n)?;
        Ok(self
            .u
            .row(m)
            .iter()
            .zip(self.u.row(n).iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Projects onto `n_j = 1` and renormalizes.
    ///
    /// The orbital with the largest weight on site `j` becomes the site-`j`
    /// basis vector; its weight is eliminated from every other orbital, and
    /// the result is re-orthonormalized.
    pub fn project_occupied(&mut self, j: usize) -> Result<()> {
        let p = self.occupation(j)?;
        if p <= DEGENERATE_OCCUPATION {
            return Err(Error::ForbiddenOutcome {
                site: j,
                probability: p,
            });
        }
        let n = self.particles();
        let pivot = (0..n)
            .max_by(|&a, &b| self.u[(j, a)].norm().total_cmp(&self.u[(j, b)].norm()))
            .expect("N >= 1");
        let pivot_col = self.u.column(pivot).clone_owned();
        let pivot_entry = pivot_col[j];
        for k in (0..n).filter(|&k| k != pivot) {
            let factor = self.u[(j, k)] / pivot_entry;
            if factor != ZERO {
                let mut col = self.u.column_mut(k);
                col.axpy(-factor, &pivot_col, ONE);
                col[j] = ZERO;
            }
        }
        let mut col = self.u.column_mut(pivot);
        col.fill(ZERO);
        col[j] = ONE;
        self.reorthonormalize()
    }

    /// Projects onto `n_j = 0` and renormalizes.
    pub fn project_empty(&mut self, j: usize) -> Result<()> {
        let p = self.occupation(j)?;
        if p >= 1.0 - DEGENERATE_OCCUPATION {
            return Err(Error::ForbiddenOutcome {
                site: j,
                probability: 1.0 - p,
            });
        }
        self.u.row_mut(j).fill(ZERO);
        self.reorthonormalize()
    }

    /// Householder QR of the orbital matrix; keeps the column span.
    pub fn reorthonormalize(&mut self) -> Result<()> {
        let n = self.particles();
        let qr = self.u.clone().qr();
        let r = qr.r();
        let diag: Vec<f64> = (0..n).map(|k| r[(k, k)].norm()).collect();
        let largest = diag.iter().cloned().fold(0.0, f64::max);
        let smallest = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(largest.is_finite() && smallest > 1e-13 * largest.max(1e-300)) {
            return Err(Error::Numerical(format!(
                "orbital matrix is rank deficient (|R| diagonal range {smallest:e}..{largest:e})"
            )));
        }
        self.u = qr.q();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, build_propagator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn superposed_pair() -> SlaterState {
        let s = 0.5f64.sqrt();
        SlaterState::from_orbitals(DMatrix::from_column_slice(
            2,
            1,
            &[Complex64::new(s, 0.0), Complex64::new(0.0, s)],
        ))
        .unwrap()
    }

    fn assert_same_correlations(a: &SlaterState, b: &SlaterState, tol: f64) {
        let diff = a.correlation_matrix().matrix() - b.correlation_matrix().matrix();
        assert!(diff.camax() < tol, "correlation mismatch {}", diff.camax());
    }

    #[test]
    fn neel_occupations() {
        let s = SlaterState::neel(4).unwrap();
        assert_eq!(s.occupations(), vec![1.0, 0.0, 1.0, 0.0]);
        assert_eq!(s.occupation(0).unwrap(), 1.0);
        assert_eq!(s.occupation(1).unwrap(), 0.0);
        let d = s.correlation_matrix();
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == c && r % 2 == 0 { 1.0 } else { 0.0 };
                assert_eq!(d.get(r, c), Complex64::new(want, 0.0));
            }
        }
        assert!((SlaterState::neel(8).unwrap().correlation_matrix().trace() - 4.0).abs() < 1e-12);
        assert!(SlaterState::neel(5).is_err());
    }

    #[test]
    fn identity_evolution_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = SlaterState::random(6, 3, &mut rng).unwrap();
        let before = s.clone();
        s.apply(&DMatrix::identity(6, 6)).unwrap();
        assert_eq!(s, before);
        assert!(matches!(
            s.apply(&DMatrix::identity(5, 5)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn two_site_rabi_oscillation() {
        let h = build_hamiltonian(1.0, &[0.0, 0.0]).unwrap();
        let steps = 100;
        let k = build_propagator(&h, std::f64::consts::FRAC_PI_4 / steps as f64).unwrap();
        let mut s = SlaterState::from_orbitals(DMatrix::from_column_slice(2, 1, &[ONE, ZERO]))
            .unwrap();
        for _ in 0..steps {
            s.evolve(&k).unwrap();
        }
        assert!((s.occupation(0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn uniform_pair_occupations() {
        let s = superposed_pair();
        assert!((s.occupation(0).unwrap() - 0.5).abs() < 1e-15);
        assert!((s.occupation(1).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(s.occupation(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn random_state_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let s = SlaterState::random(10, 4, &mut rng).unwrap();
            assert!(s.orthonormality_error() < 1e-12);
            assert!((s.occupations().iter().sum::<f64>() - 4.0).abs() < 1e-9);
            let d = s.correlation_matrix();
            assert!((d.trace() - 4.0).abs() < 1e-9);
            assert!(d.eigenvalues().iter().all(|&e| (-1e-9..=1.0 + 1e-9).contains(&e)));
        }
    }

    #[test]
    fn project_occupied_on_pair() {
        let mut s = superposed_pair();
        s.project_occupied(0).unwrap();
        assert!((s.occupation(0).unwrap() - 1.0).abs() < 1e-15);
        assert!(s.occupation(1).unwrap() < 1e-15);
    }

    #[test]
    fn project_empty_on_pair() {
        let mut s = superposed_pair();
        s.project_empty(0).unwrap();
        assert!(s.occupation(0).unwrap() < 1e-15);
        assert!((s.occupation(1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn neel_projections_are_noops() {
        let neel = SlaterState::neel(8).unwrap();
        for j in (0..8).step_by(2) {
            let mut s = neel.clone();
            s.project_occupied(j).unwrap();
            assert_same_correlations(&s, &neel, 1e-14);
            assert!(matches!(s.project_empty(j), Err(Error::ForbiddenOutcome { .. })));
        }
        for j in (1..8).step_by(2) {
            let mut s = neel.clone();
            s.project_empty(j).unwrap();
            assert_same_correlations(&s, &neel, 1e-14);
            assert!(matches!(s.project_occupied(j), Err(Error::ForbiddenOutcome { .. })));
        }
    }

    #[test]
    fn projection_postconditions_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = SlaterState::random(12, 5, &mut rng).unwrap();
            let j = rng.gen_range(0..12);
            let mut occ = s.clone();
            occ.project_occupied(j).unwrap();
            assert!((occ.occupation(j).unwrap() - 1.0).abs() < 1e-10);
            assert!(occ.orthonormality_error() < 1e-12);
            assert_eq!(occ.particles(), 5);
            let mut emp = s.clone();
            emp.project_empty(j).unwrap();
            assert!(emp.occupation(j).unwrap() < 1e-10);
            assert!((emp.correlation_matrix().trace() - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn pivot_choice_does_not_change_physics() {
        // Rotating the orbitals changes which column is the pivot but not the state.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = SlaterState::random(8, 4, &mut rng).unwrap();
        let v = SlaterState::random(4, 4, &mut rng).unwrap().orbitals().clone();
        let mut rotated = s.clone();
        rotated.rotate_orbitals(&v).unwrap();
        for j in 0..8 {
            let (mut a, mut b) = (s.clone(), rotated.clone());
            a.project_occupied(j).unwrap();
            b.project_occupied(j).unwrap();
            assert_same_correlations(&a, &b, 1e-10);
        }
    }

    #[test]
    fn reorthonormalize_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = SlaterState::random(10, 4, &mut rng).unwrap();

        let mut again = s.clone();
        again.reorthonormalize().unwrap();
        assert_same_correlations(&again, &s, 1e-12);

        let mut scaled = SlaterState { u: s.u.clone() * Complex64::new(2.0, 0.0) };
        scaled.reorthonormalize().unwrap();
        assert_same_correlations(&scaled, &s, 1e-12);

        let noisy = s.u.map(|z| z + Complex64::new(rng.gen_range(-1e-6..1e-6), 0.0));
        let mut noisy = SlaterState { u: noisy };
        noisy.reorthonormalize().unwrap();
        assert!(noisy.orthonormality_error() < 1e-12);

        let mut degenerate = SlaterState { u: DMatrix::from_element(4, 2, ONE) };
        assert!(matches!(degenerate.reorthonormalize(), Err(Error::Numerical(_))));
    }

    #[test]
    fn born_rule_is_consistent() {
        // Averaging the post-measurement occupation over Born-sampled outcomes
        // reproduces the pre-measurement value.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s = SlaterState::random(6, 3, &mut rng).unwrap();
        let j = 2;
        let p = s.occupation(j).unwrap();
        let samples = 10_000;
        let mut hits = 0usize;
        for _ in 0..samples {
            let mut t = s.clone();
            if rng.gen::<f64>() < p {
                t.project_occupied(j).unwrap();
            } else {
                t.project_empty(j).unwrap();
            }
            if t.occupation(j).unwrap() > 0.5 {
                hits += 1;
            }
        }
        let mean = hits as f64 / samples as f64;
        let stderr = (p * (1.0 - p) / samples as f64).sqrt();
        assert!((mean - p).abs() < 3.0 * stderr, "{mean} vs {p}");
    }
}
