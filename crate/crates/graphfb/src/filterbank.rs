//! Two-channel analysis/synthesis with spectral-domain sampling, the
//! octave-band cascade, and the merged single-pass form of the cascade.
//!
//! Subband coefficients live in the graph frequency domain: the cascade
//! never applies an inverse transform between levels, because consecutive
//! inverse/forward transforms cancel. Every step is a diagonal gain plus a
//! fold, so perfect reconstruction holds for any orthonormal basis as long
//! as the gains satisfy the two PR equations.

use ndarray::{aview1, Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{FilterBankSpec, FilterDesign};
use crate::sampling::{spectral_downsample, spectral_upsample, Channel};
use crate::spectral::SpectralBasis;

/// One subband: its path id ("H", "LH", "LLH", ..., "LL...L") and its
/// spectral-domain coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub id: String,
    pub values: Vec<f64>,
}

impl Band {
    pub fn view(&self) -> ArrayView1<'_, f64> {
        aview1(&self.values)
    }
}

/// Output of an L-level octave-band analysis. Total coefficient count is
/// always exactly `n` (critical sampling).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubbandPyramid {
    pub n: usize,
    pub levels: usize,
    pub bands: Vec<Band>,
}

impl SubbandPyramid {
    pub fn coefficient_count(&self) -> usize {
        self.bands.iter().map(|b| b.values.len()).sum()
    }

    /// Index of the deepest low-pass band (the last one).
    pub fn lowpass_index(&self) -> usize {
        self.bands.len() - 1
    }

    /// Structural check used after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.bands.len() != self.levels + 1 {
            return Err(Error::InvalidParameter(format!(
                "pyramid with {} levels must have {} bands, found {}",
                self.levels,
                self.levels + 1,
                self.bands.len()
            )));
        }
        let mut expected = self.n;
        for (depth, band) in self.bands.iter().enumerate() {
            if depth < self.levels {
                if !expected.is_multiple_of(2) {
                    return Err(Error::DepthTooLarge {
                        levels: self.levels,
                        n: self.n,
                    });
                }
                expected /= 2;
            }
            if band.values.len() != expected {
                return Err(Error::InvalidParameter(format!(
                    "band {} has {} coefficients, expected {}",
                    band.id,
                    band.values.len(),
                    expected
                )));
            }
        }
        if self.coefficient_count() != self.n {
            return Err(Error::InvalidParameter(
                "pyramid is not critically sampled".into(),
            ));
        }
        Ok(())
    }
}

fn band_id(depth: usize, channel: Channel) -> String {
    let mut id = "L".repeat(depth);
    if channel == Channel::High {
        id.push('H');
    }
    id
}

/// Builds the per-level specs for an L-level cascade of one design.
pub fn design_specs(design: FilterDesign, n: usize, levels: usize) -> Result<Vec<FilterBankSpec>> {
    if levels == 0 {
        return Err(Error::InvalidParameter("levels must be at least 1".into()));
    }
    let mut specs = Vec::with_capacity(levels);
    let mut len = n;
    for _ in 0..levels {
        if !len.is_multiple_of(2) {
            return Err(Error::DepthTooLarge { levels, n });
        }
        specs.push(FilterBankSpec::for_design(design, len)?);
        len /= 2;
    }
    Ok(specs)
}

/// One analysis split in the spectral domain.
pub fn analyze_spectrum(
    spec: &FilterBankSpec,
    ftilde: ArrayView1<f64>,
) -> Result<(Array1<f64>, Array1<f64>)> {
    if spec.len() != ftilde.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            actual: ftilde.len(),
        });
    }
    let low = spectral_downsample((&spec.h0() * &ftilde).view(), Channel::Low)?;
    let high = spectral_downsample((&spec.h1() * &ftilde).view(), Channel::High)?;
    Ok((low, high))
}

/// One synthesis merge in the spectral domain; divides by `c^2` so a
/// PR spec round-trips to identity regardless of its normalization.
pub fn synthesize_spectrum(
    spec: &FilterBankSpec,
    low: ArrayView1<f64>,
    high: ArrayView1<f64>,
) -> Result<Array1<f64>> {
    let half = spec.len() / 2;
    if low.len() != half {
        return Err(Error::DimensionMismatch {
            expected: half,
            actual: low.len(),
        });
    }
    if high.len() != half {
        return Err(Error::DimensionMismatch {
            expected: half,
            actual: high.len(),
        });
    }
    let up_low = spectral_upsample(low, Channel::Low);
    let up_high = spectral_upsample(high, Channel::High);
    let mixed = &spec.g0() * &up_low + &spec.g1() * &up_high;
    Ok(mixed / spec.c2())
}

/// One-level analysis of a vertex-domain signal: GFT, gains, folds.
pub fn analyze_one_level(
    basis: &SpectralBasis,
    spec: &FilterBankSpec,
    f: ArrayView1<f64>,
) -> Result<(Array1<f64>, Array1<f64>)> {
    let ftilde = basis.gft(f)?;
    analyze_spectrum(spec, ftilde.view())
}

/// One-level synthesis back to the vertex domain.
pub fn synthesize_one_level(
    basis: &SpectralBasis,
    spec: &FilterBankSpec,
    low: ArrayView1<f64>,
    high: ArrayView1<f64>,
) -> Result<Array1<f64>> {
    let ftilde = synthesize_spectrum(spec, low, high)?;
    basis.igft(ftilde.view())
}

/// L-level octave-band analysis of the spectrum; the low band is split
/// recursively and each high band is kept.
pub fn analyze_octave_spectrum(
    specs: &[FilterBankSpec],
    ftilde: ArrayView1<f64>,
    levels: usize,
) -> Result<SubbandPyramid> {
    let n = ftilde.len();
    if levels == 0 {
        return Err(Error::InvalidParameter("levels must be at least 1".into()));
    }
    if !n.is_multiple_of(1 << levels) {
        return Err(Error::DepthTooLarge { levels, n });
    }
    if specs.len() < levels {
        return Err(Error::InvalidParameter(format!(
            "need {levels} specs, got {}",
            specs.len()
        )));
    }
    let mut bands = Vec::with_capacity(levels + 1);
    let mut cur = ftilde.to_owned();
    for (depth, spec) in specs.iter().take(levels).enumerate() {
        let (low, high) = analyze_spectrum(spec, cur.view())?;
        bands.push(Band {
            id: band_id(depth, Channel::High),
            values: high.to_vec(),
        });
        cur = low;
    }
    bands.push(Band {
        id: band_id(levels, Channel::Low),
        values: cur.to_vec(),
    });
    Ok(SubbandPyramid { n, levels, bands })
}

/// L-level octave-band analysis of a vertex-domain signal.
pub fn analyze_octave(
    basis: &SpectralBasis,
    specs: &[FilterBankSpec],
    f: ArrayView1<f64>,
    levels: usize,
) -> Result<SubbandPyramid> {
    let ftilde = basis.gft(f)?;
    analyze_octave_spectrum(specs, ftilde.view(), levels)
}

/// Inverse of [`analyze_octave_spectrum`].
pub fn synthesize_octave_spectrum(
    specs: &[FilterBankSpec],
    pyramid: &SubbandPyramid,
) -> Result<Array1<f64>> {
    pyramid.validate()?;
    let levels = pyramid.levels;
    if specs.len() < levels {
        return Err(Error::InvalidParameter(format!(
            "need {levels} specs, got {}",
            specs.len()
        )));
    }
    let mut cur = pyramid.bands[levels].view().to_owned();
    for depth in (0..levels).rev() {
        let high = pyramid.bands[depth].view();
        cur = synthesize_spectrum(&specs[depth], cur.view(), high)?;
    }
    Ok(cur)
}

/// Inverse of [`analyze_octave`].
pub fn synthesize_octave(
    basis: &SpectralBasis,
    specs: &[FilterBankSpec],
    pyramid: &SubbandPyramid,
) -> Result<Array1<f64>> {
    let ftilde = synthesize_octave_spectrum(specs, pyramid)?;
    basis.igft(ftilde.view())
}

/// Explicit spectral transfer matrix of one analysis/synthesis level:
/// `G0 (I + J) H0 + G1 (I - J) H1`. Equals `c^2 I` exactly when the two PR
/// equations hold: the diagonal carries the identity equation and the
/// anti-diagonal carries the alias equation.
pub fn transfer_matrix(spec: &FilterBankSpec) -> Array2<f64> {
    let n = spec.len();
    let (h0, h1, g0, g1) = (spec.h0(), spec.h1(), spec.g0(), spec.g1());
    let mut t = Array2::zeros((n, n));
    for i in 0..n {
        let j = n - 1 - i;
        t[[i, i]] += g0[i] * h0[i] + g1[i] * h1[i];
        t[[i, j]] += g0[i] * h0[j] - g1[i] * h1[j];
    }
    t
}

/// One subband of the merged analysis operator: a single length-N diagonal
/// gain followed by the band's fold sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedBand {
    pub id: String,
    /// Merged diagonal gain, length N.
    pub gain: Array1<f64>,
    /// Folds applied after the gain, outermost level first.
    pub folds: Vec<Channel>,
}

impl MergedBand {
    /// Applies gain then folds.
    pub fn apply(&self, ftilde: ArrayView1<f64>) -> Result<Array1<f64>> {
        if ftilde.len() != self.gain.len() {
            return Err(Error::DimensionMismatch {
                expected: self.gain.len(),
                actual: ftilde.len(),
            });
        }
        let mut cur = &self.gain * &ftilde;
        for &ch in &self.folds {
            cur = spectral_downsample(cur.view(), ch)?;
        }
        Ok(cur)
    }

    pub fn output_len(&self) -> usize {
        self.gain.len() >> self.folds.len()
    }
}

/// The L-level cascade with all filters commuted in front of all folds.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedBandOperator {
    pub n: usize,
    pub levels: usize,
    pub bands: Vec<MergedBand>,
}

/// Extends a half-length diagonal past one fold: `diag(h) -> diag(h, JhJ)`,
/// i.e. the palindromic doubling `[h; reverse(h)]`.
fn palindromic_extend(gain: &Array1<f64>) -> Array1<f64> {
    let m = gain.len();
    Array1::from_iter((0..2 * m).map(|i| if i < m { gain[i] } else { gain[2 * m - 1 - i] }))
}

/// Merges the cascade filters into one diagonal per band.
pub fn merge_octave(specs: &[FilterBankSpec], n: usize, levels: usize) -> Result<MergedBandOperator> {
    if levels == 0 {
        return Err(Error::InvalidParameter("levels must be at least 1".into()));
    }
    if !n.is_multiple_of(1 << levels) {
        return Err(Error::DepthTooLarge { levels, n });
    }
    if specs.len() < levels {
        return Err(Error::InvalidParameter(format!(
            "need {levels} specs, got {}",
            specs.len()
        )));
    }
    for (depth, spec) in specs.iter().take(levels).enumerate() {
        if spec.len() != n >> depth {
            return Err(Error::DimensionMismatch {
                expected: n >> depth,
                actual: spec.len(),
            });
        }
    }

    // Extend each level's gain up to length N by one palindromic doubling
    // per fold it commutes past.
    let extend_to_full = |gain: ArrayView1<f64>, depth: usize| -> Array1<f64> {
        let mut cur = gain.to_owned();
        for _ in 0..depth {
            cur = palindromic_extend(&cur);
        }
        cur
    };

    let mut low_prefix = Array1::ones(n);
    let mut bands = Vec::with_capacity(levels + 1);
    for (depth, spec) in specs.iter().take(levels).enumerate() {
        let high_gain = &low_prefix * &extend_to_full(spec.h1(), depth);
        let mut folds = vec![Channel::Low; depth];
        folds.push(Channel::High);
        bands.push(MergedBand {
            id: band_id(depth, Channel::High),
            gain: high_gain,
            folds,
        });
        low_prefix = &low_prefix * &extend_to_full(spec.h0(), depth);
    }
    bands.push(MergedBand {
        id: band_id(levels, Channel::Low),
        gain: low_prefix,
        folds: vec![Channel::Low; levels],
    });
    Ok(MergedBandOperator { n, levels, bands })
}

impl MergedBandOperator {
    /// Applies every band to a spectrum, yielding the same pyramid as the
    /// cascaded analysis.
    pub fn apply_spectrum(&self, ftilde: ArrayView1<f64>) -> Result<SubbandPyramid> {
        let bands = self
            .bands
            .iter()
            .map(|b| {
                Ok(Band {
                    id: b.id.clone(),
                    values: b.apply(ftilde)?.to_vec(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubbandPyramid {
            n: self.n,
            levels: self.levels,
            bands,
        })
    }

    /// The stacked N x N spectral-domain analysis matrix, band rows in
    /// pyramid order.
    pub fn stacked_matrix(&self) -> Array2<f64> {
        let n = self.n;
        let mut t = Array2::zeros((n, n));
        let mut row = 0usize;
        for band in &self.bands {
            for col in 0..n {
                let mut e = Array1::zeros(n);
                e[col] = 1.0;
                let out = band.apply(e.view()).expect("unit vector has length n");
                for (k, v) in out.iter().enumerate() {
                    t[[row + k, col]] = *v;
                }
            }
            row += band.output_len();
        }
        t
    }

    /// The stacked analysis operator acting on vertex-domain signals.
    pub fn stacked_vertex_matrix(&self, basis: &SpectralBasis) -> Array2<f64> {
        self.stacked_matrix().dot(&basis.vectors().t())
    }
}
