//! Eigendecomposition of variation operators and the graph Fourier transform.
//!
//! The eigenvector matrix `U` is orthonormal with eigenvalues in ascending
//! order. Each eigenvector is sign-normalized so that its entry of largest
//! absolute value is positive (ties broken by lowest index); within equal
//! eigenvalues the solver's order is kept, so results are deterministic for
//! a fixed input.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{OperatorKind, OperatorMatrix};

const ORTHONORMALITY_TOL: f64 = 1e-9;
const RECONSTRUCTION_TOL_PER_N: f64 = 1e-8;

/// Orthonormal eigenbasis of a variation operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralBasis {
    kind: OperatorKind,
    /// Eigenvalues, ascending.
    lambda: Array1<f64>,
    /// Eigenvectors as columns, matching `lambda`.
    u: Array2<f64>,
}

impl SpectralBasis {
    /// Wraps a precomputed decomposition after validating the invariants.
    pub fn from_parts(kind: OperatorKind, lambda: Array1<f64>, u: Array2<f64>) -> Result<Self> {
        let basis = SpectralBasis { kind, lambda, u };
        basis.check_internal()?;
        Ok(basis)
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.lambda
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.u
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.lambda[self.lambda.len() - 1]
    }

    fn check_internal(&self) -> Result<()> {
        let n = self.lambda.len();
        if self.u.nrows() != n || self.u.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.u.nrows(),
            });
        }
        for i in 1..n {
            if self.lambda[i] < self.lambda[i - 1] {
                return Err(Error::EigensolverFailure(
                    "eigenvalues are not ascending".into(),
                ));
            }
        }
        let gram = self.u.t().dot(&self.u);
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (gram[[i, j]] - expect).abs() > ORTHONORMALITY_TOL {
                    return Err(Error::EigensolverFailure(format!(
                        "columns not orthonormal at ({i}, {j}): {}",
                        gram[[i, j]]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that `U diag(lambda) U^T` rebuilds `op` within `1e-8 * N`.
    pub fn check_against(&self, op: &OperatorMatrix) -> Result<()> {
        if op.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: op.n(),
            });
        }
        if op.kind() != self.kind {
            return Err(Error::InvalidParameter(
                "operator kind does not match basis kind".into(),
            ));
        }
        let n = self.n();
        let scaled = &self.u * &self.lambda;
        let rebuilt = scaled.dot(&self.u.t());
        let tol = RECONSTRUCTION_TOL_PER_N * n as f64;
        let worst = rebuilt
            .iter()
            .zip(op.values().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if worst > tol {
            return Err(Error::EigensolverFailure(format!(
                "reconstruction residual {worst:.3e} exceeds {tol:.3e}"
            )));
        }
        Ok(())
    }

    /// Forward graph Fourier transform: coefficients `U^T f`.
    pub fn gft(&self, f: ArrayView1<f64>) -> Result<Array1<f64>> {
        if f.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: f.len(),
            });
        }
        Ok(self.u.t().dot(&f))
    }

    /// Inverse graph Fourier transform: `U f~`.
    pub fn igft(&self, ftilde: ArrayView1<f64>) -> Result<Array1<f64>> {
        if ftilde.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: ftilde.len(),
            });
        }
        Ok(self.u.dot(&ftilde))
    }

    /// Dumps the basis as JSON. Doubles round-trip exactly.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path)?;
        serde_json::to_writer(BufWriter::new(file), self)?;
        Ok(())
    }

    /// Loads a basis dump and revalidates it against the operator so a stale
    /// or corrupted cache entry can never be used.
    pub fn load(path: &Path, op: &OperatorMatrix) -> Result<Self> {
        let file = File::open(path)?;
        let basis: SpectralBasis = serde_json::from_reader(BufReader::new(file))?;
        basis.check_internal()?;
        basis.check_against(op)?;
        Ok(basis)
    }
}

/// Flips each column so its entry of largest absolute value is positive;
/// ties broken by lowest index.
fn sign_normalize(u: &mut Array2<f64>) {
    let n = u.nrows();
    for mut col in u.columns_mut() {
        let mut best = 0usize;
        let mut best_abs = col[0].abs();
        for i in 1..n {
            let a = col[i].abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|x| -x);
        }
    }
}

/// Dense symmetric eigendecomposition with ascending eigenvalues.
pub fn eigendecompose(op: &OperatorMatrix) -> Result<SpectralBasis> {
    let n = op.n();
    let m = DMatrix::from_fn(n, n, |i, j| op.values()[[i, j]]);
    let eig = m
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| Error::EigensolverFailure("iteration did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let lambda = Array1::from_iter(order.iter().map(|&i| eig.eigenvalues[i]));
    let mut u = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for row in 0..n {
            u[[row, dst]] = eig.eigenvectors[(row, src)];
        }
    }
    sign_normalize(&mut u);

    let basis = SpectralBasis::from_parts(op.kind(), lambda, u)?;
    basis.check_against(op)?;
    Ok(basis)
}
