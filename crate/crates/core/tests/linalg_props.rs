use posmap_core::linalg::random::{random_ginibre, random_hermitian, rng_from_seed};
use posmap_core::linalg::{
    eigh, eigvalsh, kron, partial_trace, partial_transpose, psd_project, tensor_permute,
    ComplexMatrix, Factor,
};
use proptest::prelude::*;

fn reconstruction_error(m: &ComplexMatrix) -> f64 {
    let s = eigh(m).unwrap();
    (&s.reconstruct() - m).frobenius_norm() / m.frobenius_norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigh_reconstructs(seed in any::<u64>(), n in 1usize..24) {
        let m = random_hermitian(n, &mut rng_from_seed(seed));
        prop_assert!(reconstruction_error(&m) < 1e-10);
        let s = eigh(&m).unwrap();
        prop_assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
        let gram = s.vectors.adjoint_mul(&s.vectors);
        prop_assert!(gram.approx_eq(&ComplexMatrix::identity(n), 1e-10));
    }

    #[test]
    fn psd_projection_is_idempotent(seed in any::<u64>(), n in 1usize..16) {
        let m = random_hermitian(n, &mut rng_from_seed(seed));
        let p = psd_project(&m).unwrap();
        prop_assert!(eigh(&p).unwrap().min() >= -1e-12);
        let pp = psd_project(&p).unwrap();
        prop_assert!((&pp - &p).frobenius_norm() < 1e-10 * p.frobenius_norm().max(1.0));
    }

    #[test]
    fn partial_transpose_is_isometric_involution(seed in any::<u64>(), d1 in 1usize..5, d2 in 1usize..5) {
        let m = random_ginibre(d1 * d2, d1 * d2, &mut rng_from_seed(seed));
        for which in [Factor::First, Factor::Second] {
            let g = partial_transpose(&m, (d1, d2), which).unwrap();
            prop_assert!((g.frobenius_norm() - m.frobenius_norm()).abs() < 1e-12 * m.frobenius_norm());
            prop_assert_eq!(&partial_transpose(&g, (d1, d2), which).unwrap(), &m);
        }
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), d1 in 1usize..5, d2 in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let a = random_ginibre(d1, d1, &mut rng);
        let b = random_ginibre(d2, d2, &mut rng);
        let ab = kron(&a, &b).unwrap();
        let t2 = partial_trace(&ab, (d1, d2), Factor::Second).unwrap();
        prop_assert!(t2.approx_eq(&a.scale_complex(b.trace()), 1e-13 * (1.0 + ab.max_abs())));
        let t1 = partial_trace(&ab, (d1, d2), Factor::First).unwrap();
        prop_assert!(t1.approx_eq(&b.scale_complex(a.trace()), 1e-13 * (1.0 + ab.max_abs())));
    }

    #[test]
    fn tensor_permute_preserves_spectrum(seed in any::<u64>(), perm_index in 0usize..24) {
        let dims = [2, 1, 3, 2];
        let n: usize = dims.iter().product();
        let m = random_hermitian(n, &mut rng_from_seed(seed));
        let mut perms = Vec::new();
        for a in 0..4 { for b in 0..4 { for c in 0..4 { for d in 0..4 {
            let p = [a, b, c, d];
            let mut seen = [false; 4];
            p.iter().for_each(|&x| seen[x] = true);
            if seen.iter().all(|&s| s) { perms.push(p); }
        }}}}
        let p = perms[perm_index];
        let out = tensor_permute(&m, &dims, &p).unwrap();
        let (e1, e2) = (eigvalsh(&m).unwrap(), eigvalsh(&out).unwrap());
        for (x, y) in e1.iter().zip(&e2) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn eigh_reconstructs_at_largest_size() {
    let m = random_hermitian(256, &mut rng_from_seed(256));
    assert!(reconstruction_error(&m) < 1e-10);
}
