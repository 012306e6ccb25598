use posmap_core::linalg::random::{random_ginibre, random_psd, rng_from_seed};
use posmap_core::linalg::{kron, tensor_permute, ComplexMatrix};
use posmap_core::maps::{choi_to_kraus, compose_transpose, tensor_maps, zoo};
use posmap_core::{LinearMapSpec, MapDims};
use proptest::prelude::*;

fn zoo_corpus() -> Vec<LinearMapSpec> {
    let mut maps = Vec::new();
    for n in 1..=6 {
        let f = n as f64;
        maps.push(zoo("identity", &[f]).unwrap());
        maps.push(zoo("transpose", &[f]).unwrap());
        maps.push(zoo("depolarizing", &[f, 0.3]).unwrap());
        maps.push(zoo("mu_family", &[f, f - 0.5]).unwrap());
    }
    maps.push(zoo("choi75", &[]).unwrap());
    maps
}

fn random_map(m: usize, n: usize, seed: u64) -> LinearMapSpec {
    let mut rng = rng_from_seed(seed);
    LinearMapSpec::from_choi(
        MapDims::new(m, n).unwrap(),
        random_ginibre(m * n, m * n, &mut rng),
    )
    .unwrap()
}

#[test]
fn representations_agree_on_units_for_zoo() {
    for map in zoo_corpus() {
        let m = map.dims().dim_in;
        let via_choi = map.as_choi_spec();
        let via_super = LinearMapSpec::from_super(map.dims(), map.to_super()).unwrap();
        for p in 0..m {
            for q in 0..m {
                let e = ComplexMatrix::unit(m, p, q);
                let reference = map.apply(&e).unwrap();
                assert!(via_choi.apply(&e).unwrap().approx_eq(&reference, 1e-10));
                assert!(via_super.apply(&e).unwrap().approx_eq(&reference, 1e-10));
            }
        }
    }
}

#[test]
fn mu_family_cp_boundary() {
    for n in 1..=5 {
        for &mu in &[0.0, n as f64 - 0.25, n as f64, n as f64 + 1.0] {
            let c = zoo("mu_family", &[n as f64, mu]).unwrap().to_choi();
            let min = posmap_core::linalg::eigh(&c).unwrap().min();
            assert!((min - (mu - n as f64)).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kraus_roundtrip(seed in 0u64..1_000_000, m in 1usize..4, n in 1usize..4, rank in 1usize..5) {
        let dims = MapDims::new(m, n).unwrap();
        let c = random_psd(m * n, rank, &mut rng_from_seed(seed));
        let ks = choi_to_kraus(&c, dims).unwrap();
        prop_assert!(ks.len() <= rank);
        let back = LinearMapSpec::from_kraus(dims, ks).unwrap().to_choi();
        prop_assert!((&back - &c).frobenius_norm() < 1e-9 * c.frobenius_norm().max(1.0));
    }

    #[test]
    fn compose_transpose_is_involution(seed in 0u64..1_000_000, m in 1usize..4, n in 1usize..4) {
        let map = random_map(m, n, seed);
        let twice = compose_transpose(&compose_transpose(&map));
        prop_assert!(twice.to_choi().approx_eq(&map.to_choi(), 1e-12));
    }

    #[test]
    fn tensor_with_identity_is_blockwise(seed in 0u64..1_000_000, k in 1usize..4) {
        let tau = random_map(2, 3, seed);
        let lifted = tensor_maps(&tau, &zoo("identity", &[k as f64]).unwrap()).unwrap();
        let mut rng = rng_from_seed(seed ^ 0xabc);
        let blocks: Vec<Vec<ComplexMatrix>> =
            (0..k).map(|_| (0..k).map(|_| random_ginibre(2, 2, &mut rng)).collect()).collect();
        // block matrix [a_ij] in M_k(M_2) corresponds to Σ a_ij ⊗ e_ij in M_2 ⊗ M_k
        let mut x = ComplexMatrix::zeros(2 * k, 2 * k);
        for (i, row) in blocks.iter().enumerate() {
            for (j, block) in row.iter().enumerate() {
                x = &x + &kron(block, &ComplexMatrix::unit(k, i, j)).unwrap();
            }
        }
        let y = lifted.apply(&x).unwrap();
        for i in 0..k {
            for j in 0..k {
                let img = tau.apply(&blocks[i][j]).unwrap();
                for a in 0..3 {
                    for b in 0..3 {
                        prop_assert!((y[(a * k + i, b * k + j)] - img[(a, b)]).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_maps_is_associative_up_to_order(seed in 0u64..1_000_000) {
        let (a, b, c) = (random_map(2, 1, seed), random_map(1, 2, seed + 1), random_map(2, 2, seed + 2));
        let left = tensor_maps(&tensor_maps(&a, &b).unwrap(), &c).unwrap();
        let right = tensor_maps(&a, &tensor_maps(&b, &c).unwrap()).unwrap();
        // both have Choi slots (in_a, in_b, in_c, out_a, out_b, out_c) after flattening
        prop_assert!(left.to_choi().approx_eq(&right.to_choi(), 1e-12));
        prop_assert_eq!(left.dims(), right.dims());
    }

    #[test]
    fn tensor_maps_agrees_with_permuted_kron(seed in 0u64..1_000_000) {
        let (a, b) = (random_map(2, 3, seed), random_map(3, 2, seed + 7));
        let direct = tensor_permute(&kron(&a.to_choi(), &b.to_choi()).unwrap(), &[2, 3, 3, 2], &[0, 2, 1, 3]).unwrap();
        prop_assert!(tensor_maps(&a, &b).unwrap().to_choi().approx_eq(&direct, 0.0));
    }
}
