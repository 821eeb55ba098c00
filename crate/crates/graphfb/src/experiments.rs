//! Evaluation protocols: nonlinear approximation, hard-threshold denoising,
//! Monte Carlo aggregation, and the passband comparison against the
//! value-based ideal low-pass.

use std::io::Write;

use ndarray::{Array1, ArrayView1};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{analyze_octave, synthesize_octave};
use crate::filters::{value_ideal_gains, FilterBankSpec, FilterDesign};
use crate::signals::{add_noise, snr_db};
use crate::spectral::SpectralBasis;

/// Result of one nonlinear approximation.
#[derive(Debug, Clone)]
pub struct NlaOutcome {
    pub reconstruction: Array1<f64>,
    pub snr_db: f64,
    pub kept: usize,
}

/// Keeps the `ceil(fraction * N)` largest-magnitude coefficients across all
/// bands, zeroes the rest, and reconstructs.
pub fn nla(
    f: ArrayView1<f64>,
    basis: &SpectralBasis,
    specs: &[FilterBankSpec],
    levels: usize,
    fraction: f64,
) -> Result<NlaOutcome> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fraction must be in (0, 1], got {fraction}"
        )));
    }
    let mut pyramid = analyze_octave(basis, specs, f, levels)?;
    let n = pyramid.n;
    let keep = ((fraction * n as f64).ceil() as usize).min(n);

    let mut order: Vec<(usize, usize)> = Vec::with_capacity(n);
    for (b, band) in pyramid.bands.iter().enumerate() {
        for i in 0..band.values.len() {
            order.push((b, i));
        }
    }
    order.sort_by(|&(ab, ai), &(bb, bi)| {
        let va = pyramid.bands[ab].values[ai].abs();
        let vb = pyramid.bands[bb].values[bi].abs();
        vb.total_cmp(&va).then(ab.cmp(&bb)).then(ai.cmp(&bi))
    });
    for &(b, i) in order.iter().skip(keep) {
        pyramid.bands[b].values[i] = 0.0;
    }

    let reconstruction = synthesize_octave(basis, specs, &pyramid)?;
    let snr = snr_db(f, reconstruction.view())?;
    Ok(NlaOutcome {
        reconstruction,
        snr_db: snr,
        kept: keep,
    })
}

/// Hard-thresholds every subband except the deepest low-pass one at
/// `3 sigma` (coefficients with `|x| <= 3 sigma` are zeroed) and
/// reconstructs.
pub fn denoise(
    f_noisy: ArrayView1<f64>,
    basis: &SpectralBasis,
    specs: &[FilterBankSpec],
    levels: usize,
    sigma: f64,
) -> Result<Array1<f64>> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise level must be nonnegative, got {sigma}"
        )));
    }
    let mut pyramid = analyze_octave(basis, specs, f_noisy, levels)?;
    let threshold = 3.0 * sigma;
    let lowpass = pyramid.lowpass_index();
    for (b, band) in pyramid.bands.iter_mut().enumerate() {
        if b == lowpass {
            continue;
        }
        for v in band.values.iter_mut() {
            if v.abs() <= threshold {
                *v = 0.0;
            }
        }
    }
    synthesize_octave(basis, specs, &pyramid)
}

/// One seeded denoising trial against a clean reference.
#[derive(Debug, Clone, Copy)]
pub struct DenoiseTrial {
    pub snr_noisy_db: f64,
    pub snr_denoised_db: f64,
}

pub fn denoise_trial(
    clean: ArrayView1<f64>,
    basis: &SpectralBasis,
    specs: &[FilterBankSpec],
    levels: usize,
    sigma: f64,
    seed: u64,
) -> Result<DenoiseTrial> {
    let noisy = add_noise(clean, sigma, seed)?;
    let estimate = denoise(noisy.view(), basis, specs, levels, sigma)?;
    Ok(DenoiseTrial {
        snr_noisy_db: snr_db(clean, noisy.view())?,
        snr_denoised_db: snr_db(clean, estimate.view())?,
    })
}

/// The two Monte Carlo protocols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Protocol {
    Denoise { sigma: f64 },
    Nla { fraction: f64 },
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Denoise { .. } => "denoise",
            Protocol::Nla { .. } => "nla",
        }
    }

    pub fn parameter(&self) -> f64 {
        match self {
            Protocol::Denoise { sigma } => *sigma,
            Protocol::Nla { fraction } => *fraction,
        }
    }
}

/// One run's outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub snr_db: f64,
}

/// Aggregated Monte Carlo outcome with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub method: String,
    pub protocol: String,
    pub parameter: f64,
    pub levels: usize,
    pub base_seed: u64,
    pub runs: Vec<RunRecord>,
    pub mean_snr_db: f64,
}

/// Runs `runs` independent trials with per-run seeds `base_seed + run`.
/// Trials execute in parallel; aggregation is by run index, so the report
/// is identical regardless of scheduling.
pub fn monte_carlo(
    clean: ArrayView1<f64>,
    basis: &SpectralBasis,
    specs: &[FilterBankSpec],
    levels: usize,
    protocol: Protocol,
    runs: usize,
    base_seed: u64,
) -> Result<ExperimentReport> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    let records: Vec<RunRecord> = (0..runs)
        .into_par_iter()
        .map(|run| -> Result<RunRecord> {
            let seed = base_seed.wrapping_add(run as u64);
            let snr = match protocol {
                Protocol::Denoise { sigma } => {
                    denoise_trial(clean, basis, specs, levels, sigma, seed)?.snr_denoised_db
                }
                Protocol::Nla { fraction } => nla(clean, basis, specs, levels, fraction)?.snr_db,
            };
            Ok(RunRecord { run, seed, snr_db: snr })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = records.iter().map(|r| r.snr_db).sum::<f64>() / runs as f64;
    let design = specs
        .first()
        .map(|s| s.design().as_str())
        .unwrap_or("custom");
    Ok(ExperimentReport {
        method: format!("{}({})", design, basis.kind().as_str()),
        protocol: protocol.name().to_string(),
        parameter: protocol.parameter(),
        levels,
        base_seed,
        runs: records,
        mean_snr_db: mean,
    })
}

/// Flat CSV: `method,protocol,parameter,run,snr_db`, one row per run plus a
/// trailing mean row.
pub fn write_report_csv<W: Write>(report: &ExperimentReport, mut writer: W) -> Result<()> {
    writeln!(writer, "method,protocol,parameter,run,snr_db")?;
    for r in &report.runs {
        writeln!(
            writer,
            "{},{},{},{},{}",
            report.method, report.protocol, report.parameter, r.run, r.snr_db
        )?;
    }
    writeln!(
        writer,
        "{},{},{},mean,{}",
        report.method, report.protocol, report.parameter, report.mean_snr_db
    )?;
    Ok(())
}

/// Per-design outcome of the passband comparison.
#[derive(Debug, Clone)]
pub struct PassbandEntry {
    pub design: FilterDesign,
    /// Squared per-index differences against the value-filtered spectrum.
    pub errors: Array1<f64>,
    /// Euclidean distance to the value-filtered spectrum.
    pub distance: f64,
}

/// Compares each design's low-pass filtered spectrum with the value-based
/// ideal low-pass applied to the same spectrum.
pub fn passband_compare_spectrum(
    lambdas: ArrayView1<f64>,
    ftilde: ArrayView1<f64>,
    designs: &[FilterDesign],
) -> Result<Vec<PassbandEntry>> {
    let n = ftilde.len();
    if lambdas.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: lambdas.len(),
        });
    }
    let reference = &value_ideal_gains(lambdas) * &ftilde;
    designs
        .iter()
        .map(|&design| {
            let spec = FilterBankSpec::for_design(design, n)?;
            let filtered = &spec.h0() * &ftilde;
            let errors = (&reference - &filtered).mapv(|d| d * d);
            let distance = errors.sum().sqrt();
            Ok(PassbandEntry {
                design,
                errors,
                distance,
            })
        })
        .collect()
}

/// Vertex-domain entry point of the passband comparison.
pub fn passband_compare(
    basis: &SpectralBasis,
    f: ArrayView1<f64>,
    designs: &[FilterDesign],
) -> Result<Vec<PassbandEntry>> {
    let ftilde = basis.gft(f)?;
    passband_compare_spectrum(basis.eigenvalues().view(), ftilde.view(), designs)
}

/// One seeded passband trial: spectrum `exp(-lambda/4)` plus Gaussian noise
/// of level `sigma` drawn directly in the frequency domain.
pub fn passband_trial(
    basis: &SpectralBasis,
    sigma: f64,
    seed: u64,
    designs: &[FilterDesign],
) -> Result<Vec<PassbandEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidParameter(format!("noise level {sigma}: {e}")))?;
    let ftilde = basis
        .eigenvalues()
        .mapv(|l| (-l / 4.0).exp() + normal.sample(&mut rng));
    passband_compare_spectrum(basis.eigenvalues().view(), ftilde.view(), designs)
}

/// CSV dump of a spectrum: `i,lambda,value`.
pub fn write_spectrum_csv<W: Write>(
    lambdas: ArrayView1<f64>,
    values: ArrayView1<f64>,
    mut writer: W,
) -> Result<()> {
    writeln!(writer, "i,lambda,value")?;
    for i in 0..lambdas.len() {
        writeln!(writer, "{i},{},{}", lambdas[i], values[i])?;
    }
    Ok(())
}
