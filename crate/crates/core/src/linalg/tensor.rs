//! Tensor-product plumbing on square matrices over `C^{d1} ⊗ C^{d2} ⊗ …`.
//!
//! Composite indices are row-major: the first factor is the most significant digit.

use super::matrix::{check_cap, ComplexMatrix};
use crate::error::{Error, Result};

/// Which tensor factor of a bipartite space an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    check_cap(rows.max(cols))?;
    let (br, bc) = b.shape();
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let s = a[(i, j)];
            if s.re == 0.0 && s.im == 0.0 {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

fn check_bipartite(m: &ComplexMatrix, (d1, d2): (usize, usize)) -> Result<()> {
    let n = m.ensure_square()?;
    if n != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "matrix of size {n} is not {d1}x{d2} bipartite"
        )));
    }
    Ok(())
}

/// Transpose of one tensor factor. `Γ(Γ(M)) = M` and `‖Γ(M)‖_F = ‖M‖_F`.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: (usize, usize),
    which: Factor,
) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    let (d1, d2) = dims;
    let n = d1 * d2;
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, a) = (r / d2, r % d2);
        let (j, b) = (c / d2, c % d2);
        match which {
            Factor::First => m[(j * d2 + a, i * d2 + b)],
            Factor::Second => m[(i * d2 + b, j * d2 + a)],
        }
    }))
}

/// Trace over one tensor factor; the result lives on the remaining factor.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: (usize, usize),
    which: Factor,
) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    let (d1, d2) = dims;
    Ok(match which {
        Factor::First => ComplexMatrix::from_fn(d2, d2, |a, b| {
            (0..d1).map(|i| m[(i * d2 + a, i * d2 + b)]).sum()
        }),
        Factor::Second => ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|a| m[(i * d2 + a, j * d2 + a)]).sum()
        }),
    })
}

/// Reorders tensor factors: slot `s` of the output carries factor `perm[s]` of the input.
///
/// This is conjugation by the permutation unitary, so the spectrum is preserved.
/// `tensor_permute(A⊗B⊗C⊗D, [a,b,c,d], [2,0,3,1]) = C⊗A⊗D⊗B`.
pub fn tensor_permute(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> Result<ComplexMatrix> {
    let n = m.ensure_square()?;
    let total: usize = dims.iter().product();
    if total != n {
        return Err(Error::DimensionMismatch(format!(
            "factor dims {dims:?} multiply to {total}, matrix size is {n}"
        )));
    }
    if perm.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "permutation of length {} for {} factors",
            perm.len(),
            dims.len()
        )));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::DimensionMismatch(format!(
                "{perm:?} is not a permutation"
            )));
        }
    }
    let map = permutation_index_map(dims, perm);
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    Ok(out)
}

/// For every input flat index, the flat index it moves to under `perm`.
pub(crate) fn permutation_index_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let k = dims.len();
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    // stride of each input factor inside the output ordering
    let mut out_stride = vec![0usize; k];
    let mut acc = 1;
    for s in (0..k).rev() {
        out_stride[perm[s]] = acc;
        acc *= out_dims[s];
    }
    let total: usize = dims.iter().product();
    let mut map = Vec::with_capacity(total);
    let mut digits = vec![0usize; k];
    for _ in 0..total {
        map.push(digits.iter().zip(&out_stride).map(|(d, s)| d * s).sum());
        for f in (0..k).rev() {
            digits[f] += 1;
            if digits[f] < dims[f] {
                break;
            }
            digits[f] = 0;
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh::eigvalsh;
    use crate::linalg::matrix::{ONE, ZERO};
    use crate::linalg::random::{random_ginibre, random_hermitian, rng_from_seed};
    use num_complex::Complex64;

    fn kron_all(ms: &[&ComplexMatrix]) -> ComplexMatrix {
        ms[1..]
            .iter()
            .fold(ms[0].clone(), |acc, m| kron(&acc, m).unwrap())
    }

    #[test]
    fn kron_identities_and_units() {
        let i4 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4));
        // e_12 ⊗ e_21: block (0,1) holds e_21, i.e. a single 1 at row 1, column 2.
        let k = kron(&ComplexMatrix::unit(2, 0, 1), &ComplexMatrix::unit(2, 1, 0)).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expected = if (r, c) == (1, 2) { ONE } else { ZERO };
                assert_eq!(k[(r, c)], expected);
            }
        }
    }

    #[test]
    fn kron_is_multiplicative() {
        let [a, b, c, d] = [1u64, 2, 3, 4].map(|s| random_ginibre(3, 3, &mut rng_from_seed(s)));
        let lhs = kron(&a, &b).unwrap().matmul(&kron(&c, &d).unwrap());
        let rhs = kron(&a.matmul(&c), &b.matmul(&d)).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-12 * rhs.frobenius_norm()));
    }

    #[test]
    fn kron_respects_cap() {
        let prev = crate::linalg::set_dimension_cap(8);
        let r = kron(&ComplexMatrix::identity(3), &ComplexMatrix::identity(3));
        crate::linalg::set_dimension_cap(prev);
        assert!(matches!(
            r,
            Err(Error::DimensionOverflow {
                requested: 9,
                cap: 8
            })
        ));
    }

    #[test]
    fn partial_transpose_of_product() {
        let mut rng = rng_from_seed(21);
        let a = random_ginibre(2, 2, &mut rng);
        let b = random_ginibre(2, 2, &mut rng);
        let ab = kron(&a, &b).unwrap();
        let g2 = partial_transpose(&ab, (2, 2), Factor::Second).unwrap();
        assert!(g2.approx_eq(&kron(&a, &b.transpose()).unwrap(), 1e-15));
        let g1 = partial_transpose(&ab, (2, 2), Factor::First).unwrap();
        assert!(g1.approx_eq(&kron(&a.transpose(), &b).unwrap(), 1e-15));
    }

    #[test]
    fn partial_transpose_of_swap_is_maximally_entangled_projector() {
        // swap = Σ e_ji ⊗ e_ij; oracle: 2|Ω⟩⟨Ω| built entry by entry.
        let swap = ComplexMatrix::from_fn(4, 4, |r, c| {
            let (i, a, j, b) = (r / 2, r % 2, c / 2, c % 2);
            if i == b && a == j {
                ONE
            } else {
                ZERO
            }
        });
        let omega: Vec<Complex64> = (0..4)
            .map(|r| {
                if r / 2 == r % 2 {
                    Complex64::new(0.5f64.sqrt(), 0.0)
                } else {
                    ZERO
                }
            })
            .collect();
        let expected = ComplexMatrix::outer(&omega, &omega).scale(2.0);
        let g = partial_transpose(&swap, (2, 2), Factor::Second).unwrap();
        assert!(g.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn partial_transpose_is_involutive_isometry() {
        let m = random_ginibre(9, 9, &mut rng_from_seed(9));
        for which in [Factor::First, Factor::Second] {
            let g = partial_transpose(&m, (3, 3), which).unwrap();
            assert!((g.frobenius_norm() - m.frobenius_norm()).abs() < 1e-12);
            assert_eq!(partial_transpose(&g, (3, 3), which).unwrap(), m);
        }
        assert!(partial_transpose(&m, (2, 3), Factor::First).is_err());
    }

    #[test]
    fn partial_trace_cases() {
        let mut rng = rng_from_seed(4);
        let a = random_ginibre(2, 2, &mut rng);
        let b = random_ginibre(3, 3, &mut rng);
        let ab = kron(&a, &b).unwrap();
        let tr2 = partial_trace(&ab, (2, 3), Factor::Second).unwrap();
        assert!(tr2.approx_eq(&a.scale_complex(b.trace()), 1e-13));
        let tr1 = partial_trace(&ab, (2, 3), Factor::First).unwrap();
        assert!(tr1.approx_eq(&b.scale_complex(a.trace()), 1e-13));

        let t = partial_trace(&ComplexMatrix::identity(4), (2, 2), Factor::Second).unwrap();
        assert_eq!(t, ComplexMatrix::identity(2).scale(2.0));
    }

    #[test]
    fn partial_trace_preserves_trace_block_sum_oracle() {
        let m = random_ginibre(6, 6, &mut rng_from_seed(6));
        // oracle: sum of the two diagonal 3x3 blocks
        let mut block_sum = ComplexMatrix::zeros(3, 3);
        for i in 0..2 {
            for a in 0..3 {
                for b in 0..3 {
                    block_sum[(a, b)] += m[(i * 3 + a, i * 3 + b)];
                }
            }
        }
        let t1 = partial_trace(&m, (2, 3), Factor::First).unwrap();
        assert!(t1.approx_eq(&block_sum, 1e-14));
        assert!((t1.trace() - m.trace()).norm() < 1e-13);
        let t2 = partial_trace(&m, (2, 3), Factor::Second).unwrap();
        assert!((t2.trace() - m.trace()).norm() < 1e-13);
    }

    #[test]
    fn tensor_permute_identity_and_reordering() {
        let mut rng = rng_from_seed(12);
        let fs: Vec<ComplexMatrix> = (0..4).map(|_| random_ginibre(2, 2, &mut rng)).collect();
        let m = kron_all(&[&fs[0], &fs[1], &fs[2], &fs[3]]);
        let dims = [2, 2, 2, 2];
        assert_eq!(tensor_permute(&m, &dims, &[0, 1, 2, 3]).unwrap(), m);
        let perm = [2, 0, 3, 1];
        let p = tensor_permute(&m, &dims, &perm).unwrap();
        let expected = kron_all(&[&fs[2], &fs[0], &fs[3], &fs[1]]);
        assert!(p.approx_eq(&expected, 1e-13));
    }

    #[test]
    fn tensor_permute_mixed_dims_matches_index_remap() {
        let mut rng = rng_from_seed(13);
        let a = random_ginibre(2, 2, &mut rng);
        let b = random_ginibre(3, 3, &mut rng);
        let c = random_ginibre(1, 1, &mut rng);
        let d = random_ginibre(2, 2, &mut rng);
        let m = kron_all(&[&a, &b, &c, &d]);
        let p = tensor_permute(&m, &[2, 3, 1, 2], &[3, 2, 1, 0]).unwrap();
        assert!(p.approx_eq(&kron_all(&[&d, &c, &b, &a]), 1e-13));
    }

    #[test]
    fn tensor_permute_preserves_spectrum_seed_11() {
        let h = random_hermitian(12, &mut rng_from_seed(11));
        let p = tensor_permute(&h, &[2, 3, 2, 1], &[1, 3, 0, 2]).unwrap();
        let e1 = eigvalsh(&h).unwrap();
        let e2 = eigvalsh(&p).unwrap();
        for (x, y) in e1.iter().zip(&e2) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn tensor_permute_rejects_bad_input() {
        let m = ComplexMatrix::identity(4);
        assert!(tensor_permute(&m, &[2, 3], &[1, 0]).is_err());
        assert!(tensor_permute(&m, &[2, 2], &[0, 0]).is_err());
        assert!(tensor_permute(&m, &[2, 2], &[0]).is_err());
    }
}
