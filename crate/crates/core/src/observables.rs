//! Entanglement entropy, mutual information and density correlations of a
//! Slater state, all derived from subblocks of the two-point function.

use serde::{Deserialize, Serialize};
use std::ops::Range;

use crate::error::{Error, Result};
use crate::gaussian::SlaterState;
use crate::linalg::hermitian_eigenvalues;

/// Eigenvalues within this distance of 0 or 1 contribute nothing to the entropy.
pub const ENTROPY_CLAMP: f64 = 1e-12;

/// `-Σ [ζ ln ζ + (1-ζ) ln(1-ζ)]` over correlation-block eigenvalues, in nats.
pub fn entropy_from_spectrum(spectrum: impl IntoIterator<Item = f64>) -> f64 {
    spectrum
        .into_iter()
        .map(|z| {
            if z <= ENTROPY_CLAMP || z >= 1.0 - ENTROPY_CLAMP {
                0.0
            } else {
                -(z * z.ln() + (1.0 - z) * (1.0 - z).ln())
            }
        })
        .sum()
}

/// Entropy of an arbitrary set of sites.
///
/// Works with whichever of `U_A U_A†` (`|A| x |A|`) and `U_A† U_A` (`N x N`)
/// is smaller; both share their nonzero spectrum with the correlation block.
pub fn region_entropy(state: &SlaterState, sites: &[usize]) -> Result<f64> {
    let l = state.sites();
    if sites.is_empty() {
        return Err(Error::InvalidInput("entanglement region is empty".into()));
    }
    if let Some(&bad) = sites.iter().find(|&&s| s >= l) {
        return Err(Error::IndexOutOfRange { index: bad, len: l });
    }
    let u = state.orbitals();
    let ua = u.select_rows(sites);
    let block = if sites.len() <= state.particles() {
        &ua * ua.adjoint()
    } else {
        ua.adjoint() * &ua
    };
    Ok(entropy_from_spectrum(hermitian_eigenvalues(block)))
}

/// Von Neumann entropy of a contiguous interval of sites.
pub fn entanglement_entropy(state: &SlaterState, region: Range<usize>) -> Result<f64> {
    if region.start >= region.end || region.end > state.sites() {
        return Err(Error::InvalidInput(format!(
            "region {}..{} is not a nonempty interval of 0..{}",
            region.start,
            region.end,
            state.sites()
        )));
    }
    region_entropy(state, &region.collect::<Vec<_>>())
}

/// `S(ℓ)` for the left blocks `[0, ℓ)`, `ℓ = 1..L-1`.
///
/// Cuts beyond the middle are evaluated on the (smaller) right complement,
/// which carries the same entropy for a pure state.
pub fn entropy_profile(state: &SlaterState) -> Vec<f64> {
    let l = state.sites();
    // Single Gram matrix; its diagonal blocks have the spectra of the correlation blocks.
    let u = state.orbitals();
    let gram = u * u.adjoint();
    (1..l)
        .map(|cut| {
            let block = if cut <= l / 2 {
                gram.view((0, 0), (cut, cut)).clone_owned()
            } else {
                gram.view((cut, cut), (l - cut, l - cut)).clone_owned()
            };
            entropy_from_spectrum(hermitian_eigenvalues(block))
        })
        .collect()
}

/// Two disjoint intervals for the mutual information.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionGeometry {
    pub a: Range<usize>,
    pub b: Range<usize>,
}

impl PartitionGeometry {
    pub fn new(a: Range<usize>, b: Range<usize>, l: usize) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidInput("partition intervals must be nonempty".into()));
        }
        if a.end > l || b.end > l {
            return Err(Error::InvalidInput(format!("partition exceeds chain of {l} sites")));
        }
        if a.start < b.end && b.start < a.end {
            return Err(Error::InvalidInput(format!(
                "regions {a:?} and {b:?} overlap"
            )));
        }
        Ok(Self { a, b })
    }

    /// Gaps between the intervals on an open chain of `l` sites: (between, outside).
    pub fn buffers(&self, l: usize) -> (usize, usize) {
        let (first, second) = if self.a.start <= self.b.start {
            (&self.a, &self.b)
        } else {
            (&self.b, &self.a)
        };
        (second.start - first.end, first.start + (l - second.end))
    }
}

/// `A = [0, L/8)`, `B = [L/2, L/2 + L/8)`: two `L/8` blocks separated by
/// `3L/8` of chain on either side.
pub fn antipodal_geometry(l: usize) -> Result<PartitionGeometry> {
    if l == 0 || l % 8 != 0 {
        return Err(Error::param("L", format!("must be a positive multiple of 8, got {l}")));
    }
    let w = l / 8;
    PartitionGeometry::new(0..w, l / 2..l / 2 + w, l)
}

/// `I(A:B) = S_A + S_B - S_{A∪B}`.
pub fn mutual_information(state: &SlaterState, geometry: &PartitionGeometry) -> Result<f64> {
    let a: Vec<usize> = geometry.a.clone().collect();
    let b: Vec<usize> = geometry.b.clone().collect();
    if a.iter().any(|s| geometry.b.contains(s)) {
        return Err(Error::InvalidInput("mutual-information regions overlap".into()));
    }
    let mut ab = a.clone();
    ab.extend(&b);
    ab.sort_unstable();
    Ok(region_entropy(state, &a)? + region_entropy(state, &b)? - region_entropy(state, &ab)?)
}

/// `|<c†_{L/2} c_{L/2+ℓ}>|²`, the Wick-reduced density-density correlator
/// (sign chosen so the result is non-negative).
pub fn connected_correlation(state: &SlaterState, ell: isize) -> Result<f64> {
    let l = state.sites();
    let reference = l / 2;
    let other = reference as isize + ell;
    if other < 0 || other >= l as isize {
        return Err(Error::InvalidInput(format!(
            "offset {ell} leaves the chain (reference site {reference}, L = {l})"
        )));
    }
    Ok(state.correlation(reference, other as usize)?.norm_sqr())
}

/// `C_ℓ` for `ℓ = 0..L/2`.
pub fn correlation_row(state: &SlaterState) -> Vec<f64> {
    let l = state.sites();
    (0..(l - l / 2) as isize)
        .map(|ell| connected_correlation(state, ell).expect("offset within chain"))
        .collect()
}
