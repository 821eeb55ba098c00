//! Synthetic test signals and basic measurement helpers.

use ndarray::{Array1, ArrayView1};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::spectral::SpectralBasis;

/// Signal that is smooth in the graph frequency domain:
/// `f~[i] = exp(-lambda_i / 4)`.
pub fn gen_smooth_signal(basis: &SpectralBasis) -> Array1<f64> {
    let spectrum = basis.eigenvalues().mapv(|l| (-l / 4.0).exp());
    basis
        .igft(spectrum.view())
        .expect("spectrum length matches basis")
}

/// Default index ranges for the band-localized signal, scaled
/// proportionally from the N = 400 reference grid.
pub fn default_localized_ranges(n: usize) -> Vec<(usize, usize)> {
    let scale = |i: usize| -> usize {
        let x = (i * n) as f64 / 400.0;
        (x.round() as usize).min(n - 1)
    };
    [(9, 29), (59, 79), (149, 169), (299, 319)]
        .into_iter()
        .map(|(lo, hi)| (scale(lo), scale(hi)))
        .collect()
}

/// Sum over the eigenvectors whose eigenvalue lies inside the closed band
/// `[lambda[lo], lambda[hi]]`.
fn band_component(basis: &SpectralBasis, lo: usize, hi: usize) -> Result<Array1<f64>> {
    let n = basis.n();
    if lo > hi || hi >= n {
        return Err(Error::RangeOutOfSpectrum { lo, hi, n });
    }
    let lam = basis.eigenvalues();
    let (tau_lo, tau_hi) = (lam[lo], lam[hi]);
    let indicator = lam.mapv(|l| if l >= tau_lo && l <= tau_hi { 1.0 } else { 0.0 });
    basis.igft(indicator.view())
}

/// Signal localized both on the vertex set and in the spectrum: component
/// `j` restricts the band sum `[tau_lo_j, tau_hi_j]` to the vertices of
/// cluster `j`; components are sup-normalized and summed.
pub fn gen_localized_signal(
    basis: &SpectralBasis,
    clusters: &[usize],
    ranges: &[(usize, usize)],
) -> Result<Array1<f64>> {
    let n = basis.n();
    if clusters.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: clusters.len(),
        });
    }
    if let Some(&bad) = clusters.iter().find(|&&c| c >= ranges.len()) {
        return Err(Error::InvalidParameter(format!(
            "cluster id {bad} has no index range"
        )));
    }
    let mut f = Array1::zeros(n);
    for (j, &(lo, hi)) in ranges.iter().enumerate() {
        let band = band_component(basis, lo, hi)?;
        let mut fj = Array1::zeros(n);
        for i in 0..n {
            if clusters[i] == j {
                fj[i] = band[i];
            }
        }
        let sup = fj.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
        if sup == 0.0 {
            return Err(Error::EmptyCluster(j));
        }
        f = f + fj / sup;
    }
    Ok(f)
}

/// Smooth signal plus one sup-normalized band-pass component over the full
/// vertex set.
pub fn gen_mixed_signal(basis: &SpectralBasis, range: (usize, usize)) -> Result<Array1<f64>> {
    let band = band_component(basis, range.0, range.1)?;
    let sup = band.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
    if sup == 0.0 {
        return Err(Error::EmptyCluster(0));
    }
    Ok(gen_smooth_signal(basis) + band / sup)
}

/// Adds i.i.d. Gaussian noise of standard deviation `sigma`, seeded.
pub fn add_noise(f: ArrayView1<f64>, sigma: f64, seed: u64) -> Result<Array1<f64>> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise level must be nonnegative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(f.to_owned());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidParameter(format!("noise level {sigma}: {e}")))?;
    Ok(f.mapv(|x| x + normal.sample(&mut rng)))
}

/// Signal-to-noise ratio in decibels:
/// `20 log10(|reference| / |reference - estimate|)`. Exact equality yields
/// `+inf`.
pub fn snr_db(reference: ArrayView1<f64>, estimate: ArrayView1<f64>) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            actual: estimate.len(),
        });
    }
    let ref_norm = reference.dot(&reference).sqrt();
    if ref_norm == 0.0 {
        return Err(Error::ZeroReference);
    }
    let mut err = 0.0;
    for (a, b) in reference.iter().zip(estimate.iter()) {
        err += (a - b) * (a - b);
    }
    let err_norm = err.sqrt();
    if err_norm == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (ref_norm / err_norm).log10())
}
