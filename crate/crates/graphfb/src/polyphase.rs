//! Polyphase form of the one-level bank: sampling moved to the very first
//! (analysis) and very last (synthesis) position, leaving two N x N
//! matrices of diagonal half-size blocks whose product is `c^2 I`.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::filters::FilterBankSpec;
use crate::graph::VertexPartition;

/// Analysis and synthesis polyphase matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyphasePair {
    pub hpoly: Array2<f64>,
    pub gpoly: Array2<f64>,
}

/// Builds both polyphase matrices. Block layout (half size n/2, all
/// diagonal; `'` marks the flipped second half of the spectrum):
///
/// ```text
/// H_poly = | H0(up)  H0(lo') |     G_poly = | G0(up)   G1(up)  |
///          | H1(up) -H1(lo') |              | G0(lo') -G1(lo') |
/// ```
pub fn polyphase_matrices(spec: &FilterBankSpec) -> Result<PolyphasePair> {
    let n = spec.len();
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    let m = n / 2;
    let (h0, h1, g0, g1) = (spec.h0(), spec.h1(), spec.g0(), spec.g1());
    let mut hpoly = Array2::zeros((n, n));
    let mut gpoly = Array2::zeros((n, n));
    for i in 0..m {
        let j = n - 1 - i;
        hpoly[[i, i]] = h0[i];
        hpoly[[i, m + i]] = h0[j];
        hpoly[[m + i, i]] = h1[i];
        hpoly[[m + i, m + i]] = -h1[j];

        gpoly[[i, i]] = g0[i];
        gpoly[[i, m + i]] = g1[i];
        gpoly[[m + i, i]] = g0[j];
        gpoly[[m + i, m + i]] = -g1[j];
    }
    Ok(PolyphasePair { hpoly, gpoly })
}

/// Reorders a spectrum into polyphase input: upper half as is, lower half
/// flipped (`diag(I, J)` applied to the GFT coefficients).
pub fn polyphase_input(ftilde: ArrayView1<f64>) -> Result<Array1<f64>> {
    let n = ftilde.len();
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    let m = n / 2;
    Ok(Array1::from_iter((0..n).map(|i| {
        if i < m {
            ftilde[i]
        } else {
            ftilde[n - 1 - (i - m)]
        }
    })))
}

/// Computes the two polyphase components of a signal on a bipartite graph
/// with equal halves directly from the basis blocks, before any full-size
/// transform: `sum = U_LL^T f_L + U_HL^T f_H` and the flipped difference.
/// Their concatenation equals `diag(I, J) U^T f` for the paired basis
/// `U = [[U_LL, U_LL], [U_HL, -U_HL]]`.
pub fn bipartite_polyphase_split(
    f: ArrayView1<f64>,
    part: &VertexPartition,
    u_ll: ArrayView2<f64>,
    u_hl: ArrayView2<f64>,
) -> Result<(Array1<f64>, Array1<f64>)> {
    let m = part.set_low.len();
    if part.set_high.len() != m {
        return Err(Error::UnequalHalves(m, part.set_high.len()));
    }
    if f.len() != 2 * m {
        return Err(Error::DimensionMismatch {
            expected: 2 * m,
            actual: f.len(),
        });
    }
    for (name, block) in [("U_LL", &u_ll), ("U_HL", &u_hl)] {
        if block.nrows() != m || block.ncols() != m {
            return Err(Error::InvalidParameter(format!(
                "{name} must be {m} x {m}"
            )));
        }
    }
    let f_low = Array1::from_iter(part.set_low.iter().map(|&i| f[i]));
    let f_high = Array1::from_iter(part.set_high.iter().map(|&i| f[i]));
    let a = u_ll.t().dot(&f_low);
    let b = u_hl.t().dot(&f_high);
    let sum = &a + &b;
    let diff = &a - &b;
    let diff_flipped = Array1::from_iter((0..m).map(|i| diff[m - 1 - i]));
    Ok((sum, diff_flipped))
}

/// Upper-left and lower-left basis blocks in partition order, extracted
/// from a full eigenvector matrix whose rows follow original vertex order.
pub fn basis_blocks(
    u: ArrayView2<f64>,
    part: &VertexPartition,
) -> Result<(Array2<f64>, Array2<f64>)> {
    let m = part.set_low.len();
    if part.set_high.len() != m {
        return Err(Error::UnequalHalves(m, part.set_high.len()));
    }
    let mut u_ll = Array2::zeros((m, m));
    let mut u_hl = Array2::zeros((m, m));
    for (row, &v) in part.set_low.iter().enumerate() {
        u_ll.row_mut(row).assign(&u.slice(s![v, ..m]));
    }
    for (row, &v) in part.set_high.iter().enumerate() {
        u_hl.row_mut(row).assign(&u.slice(s![v, ..m]));
    }
    Ok((u_ll, u_hl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::analyze_spectrum;
    use crate::filters::{FilterBankSpec, FilterDesign};
    use ndarray::concatenate;
    use ndarray::Axis;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_vec(n: usize, seed: u64) -> Array1<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array1::from_iter((0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0))
    }

    #[test]
    fn polyphase_identity_for_all_designs() {
        for design in [
            FilterDesign::Ideal,
            FilterDesign::MeyerOrtho,
            FilterDesign::Cdf97Bior,
        ] {
            let spec = FilterBankSpec::for_design(design, 64).unwrap();
            let pair = polyphase_matrices(&spec).unwrap();
            let prod = pair.gpoly.dot(&pair.hpoly);
            let c2 = spec.c2();
            let mut worst = 0.0f64;
            for i in 0..64 {
                for j in 0..64 {
                    let expect = if i == j { c2 } else { 0.0 };
                    worst = worst.max((prod[[i, j]] - expect).abs());
                }
            }
            assert!(worst <= 1e-10, "{}: {worst:e}", design.as_str());
        }
    }

    #[test]
    fn hpoly_applied_to_permuted_spectrum_matches_one_level_analysis() {
        let spec = FilterBankSpec::cdf97_biorthogonal(32).unwrap();
        let pair = polyphase_matrices(&spec).unwrap();
        let ftilde = random_vec(32, 3);
        let stacked = pair.hpoly.dot(&polyphase_input(ftilde.view()).unwrap());
        let (low, high) = analyze_spectrum(&spec, ftilde.view()).unwrap();
        let expect = concatenate![Axis(0), low, high];
        for i in 0..32 {
            assert!((stacked[i] - expect[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn ideal_polyphase_blocks_are_indicator_patterned() {
        let spec = FilterBankSpec::ideal(4).unwrap();
        let pair = polyphase_matrices(&spec).unwrap();
        // upper-left identity, lower-right -(-I) = ... -H1(lo') = -1 on the diagonal
        let expect = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert_eq!(pair.hpoly[[i, j]], *want);
            }
        }
    }

    #[test]
    fn split_agrees_with_direct_permuted_gft_on_k22() {
        use crate::graph::{bipartite_partition, laplacian, Graph, OperatorKind};
        use crate::kron::paired_bipartite_basis;

        let g = Graph::new(4, [(0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0)]).unwrap();
        let part = bipartite_partition(&g).unwrap();
        let op = laplacian(&g, OperatorKind::SymmetricNormalized).unwrap();
        let paired = paired_bipartite_basis(&op, &part).unwrap();
        let (u_ll, u_hl) = (paired.u_ll.clone(), paired.u_hl.clone());

        let f = random_vec(4, 9);
        let (sum, diff_flipped) =
            bipartite_polyphase_split(f.view(), &part, u_ll.view(), u_hl.view()).unwrap();

        // Direct route: diag(I, J) U^T f_perm with U = [[U_LL, U_LL], [U_HL, -U_HL]].
        let m = 2;
        let mut u = Array2::zeros((4, 4));
        for i in 0..m {
            for j in 0..m {
                u[[i, j]] = u_ll[[i, j]];
                u[[i, m + j]] = u_ll[[i, j]];
                u[[m + i, j]] = u_hl[[i, j]];
                u[[m + i, m + j]] = -u_hl[[i, j]];
            }
        }
        let f_perm = Array1::from_iter(
            part.set_low
                .iter()
                .chain(part.set_high.iter())
                .map(|&v| f[v]),
        );
        let coeffs = u.t().dot(&f_perm);
        let direct = polyphase_input(coeffs.view()).unwrap();
        let ours = concatenate![Axis(0), sum, diff_flipped];
        for i in 0..4 {
            assert!((ours[i] - direct[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn split_with_support_on_low_half_makes_sum_equal_diff() {
        use crate::graph::{bipartite_partition, laplacian, Graph, OperatorKind};
        use crate::kron::paired_bipartite_basis;

        let g = Graph::new(4, [(0, 2, 1.0), (0, 3, 2.0), (1, 2, 0.5), (1, 3, 1.0)]).unwrap();
        let part = bipartite_partition(&g).unwrap();
        let op = laplacian(&g, OperatorKind::SymmetricNormalized).unwrap();
        let paired = paired_bipartite_basis(&op, &part).unwrap();

        let mut f = Array1::zeros(4);
        for &v in &part.set_low {
            f[v] = 1.0 + v as f64;
        }
        let (sum, diff_flipped) = bipartite_polyphase_split(
            f.view(),
            &part,
            paired.u_ll.view(),
            paired.u_hl.view(),
        )
        .unwrap();
        let m = sum.len();
        for i in 0..m {
            assert!((sum[i] - diff_flipped[m - 1 - i]).abs() <= 1e-12);
        }

        // zero input maps to zeros
        let z = Array1::zeros(4);
        let (s0, d0) = bipartite_polyphase_split(
            z.view(),
            &part,
            paired.u_ll.view(),
            paired.u_hl.view(),
        )
        .unwrap();
        assert_eq!(s0, Array1::<f64>::zeros(2));
        assert_eq!(d0, Array1::<f64>::zeros(2));
    }
}
