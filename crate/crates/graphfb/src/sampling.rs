//! The four sampling primitives: vertex-domain keep/place and
//! spectral-domain fold/unfold, each in a low-pass and a modulated
//! high-pass flavor.

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The two branches of the filter bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Channel {
    Low,
    High,
}

impl Channel {
    fn sign(self) -> f64 {
        match self {
            Channel::Low => 1.0,
            Channel::High => -1.0,
        }
    }
}

/// Folds a spectrum of even length M to length M/2:
/// `y[i] = x[i] + x[M-1-i]` (Low) or `y[i] = x[i] - x[M-1-i]` (High).
pub fn spectral_downsample(x: ArrayView1<f64>, ch: Channel) -> Result<Array1<f64>> {
    let m = x.len();
    if !m.is_multiple_of(2) {
        return Err(Error::OddLength(m));
    }
    let s = ch.sign();
    Ok(Array1::from_iter(
        (0..m / 2).map(|i| x[i] + s * x[m - 1 - i]),
    ))
}

/// Unfolds a spectrum of length M to length 2M:
/// `[x; flip(x)]` (Low) or `[x; -flip(x)]` (High).
pub fn spectral_upsample(x: ArrayView1<f64>, ch: Channel) -> Array1<f64> {
    let m = x.len();
    let s = ch.sign();
    Array1::from_iter((0..2 * m).map(|i| if i < m { x[i] } else { s * x[2 * m - 1 - i] }))
}

/// Keeps the samples at `keep`, in that order.
pub fn vertex_downsample(f: ArrayView1<f64>, keep: &[usize]) -> Result<Array1<f64>> {
    let n = f.len();
    let mut seen = vec![false; n];
    for &i in keep {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if seen[i] {
            return Err(Error::InvalidParameter(format!(
                "index {i} repeated in keep list"
            )));
        }
        seen[i] = true;
    }
    Ok(Array1::from_iter(keep.iter().map(|&i| f[i])))
}

/// Places `f[k]` at position `keep[k]` of a zero vector of length `n`.
pub fn vertex_upsample(f: ArrayView1<f64>, keep: &[usize], n: usize) -> Result<Array1<f64>> {
    if f.len() != keep.len() {
        return Err(Error::LengthMismatch {
            values: f.len(),
            slots: keep.len(),
        });
    }
    let mut out = Array1::zeros(n);
    for (k, &i) in keep.iter().enumerate() {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        out[i] = f[k];
    }
    Ok(out)
}
