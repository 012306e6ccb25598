use posmap_core::cones::{check_dominates, SPECTRAL_TOL};
use posmap_core::factor::{factor_through_identity, factor_through_pure, FACTOR_TOL};
use posmap_core::linalg::random::{random_contraction, random_ginibre, rng_from_seed};
use posmap_core::maps::{tensor_maps, zoo};
use posmap_core::stinespring::{dominated_from_z, minimal_dilation};
use posmap_core::{CommutantElement, LinearMapSpec, MapDims};

fn random_cp(m: usize, n: usize, r: usize, seed: u64) -> LinearMapSpec {
    let mut rng = rng_from_seed(seed);
    let ks = (0..r).map(|_| random_ginibre(n, m, &mut rng)).collect();
    LinearMapSpec::from_kraus(MapDims::new(m, n).unwrap(), ks).unwrap()
}

fn planted_dominated(alpha: &LinearMapSpec, seed: u64) -> LinearMapSpec {
    let r = minimal_dilation(alpha).unwrap().dilation_dim;
    let z1 = random_contraction(r, &mut rng_from_seed(seed));
    dominated_from_z(alpha, &CommutantElement::new(z1)).unwrap()
}

#[test]
fn identity_factorization_roundtrip() {
    let id2 = zoo("identity", &[2.0]).unwrap();
    for s in 0..20 {
        let alpha = random_cp(2, 2, 2, 40 + s);
        let gamma = planted_dominated(&alpha, 80 + s);
        let beta = tensor_maps(&gamma, &id2).unwrap();
        let r = factor_through_identity(&alpha, &beta, 2, FACTOR_TOL).unwrap();
        assert!((&r.factor.to_choi() - &gamma.to_choi()).frobenius_norm() < 1e-8);
        let rebuilt = tensor_maps(&r.factor, &id2).unwrap().to_choi();
        let err = (&rebuilt - &beta.to_choi()).frobenius_norm();
        assert!((err - r.reconstruction_error).abs() < 1e-12);
        assert!(r.reconstruction_error < FACTOR_TOL);
        assert!(r.h_deviation.unwrap() < FACTOR_TOL);
        assert!(!r.positivity.fails());
    }
}

#[test]
fn pure_factorization_roundtrip() {
    for s in 0..20 {
        let alpha1 = random_cp(2, 3, 2, 140 + s);
        let alpha2 = random_cp(2, 2, 1, 160 + s);
        let beta1 = planted_dominated(&alpha1, 180 + s);
        let beta = tensor_maps(&beta1, &alpha2).unwrap();
        let r = factor_through_pure(&alpha1, &alpha2, &beta, FACTOR_TOL).unwrap();
        assert!((&r.factor.to_choi() - &beta1.to_choi()).frobenius_norm() < 1e-8);
        let rebuilt = tensor_maps(&r.factor, &alpha2).unwrap().to_choi();
        assert!((&rebuilt - &beta.to_choi()).frobenius_norm() <= r.reconstruction_error + 1e-12);
        assert!(r.positivity.holds());
        assert!(check_dominates(&alpha1, &r.factor, SPECTRAL_TOL)
            .unwrap()
            .holds());
    }
}

#[test]
fn scaling_beta_scales_factor() {
    let alpha = random_cp(2, 2, 3, 7);
    let gamma = planted_dominated(&alpha, 8);
    let beta = tensor_maps(&gamma, &zoo("identity", &[3.0]).unwrap()).unwrap();
    let base = factor_through_identity(&alpha, &beta, 3, FACTOR_TOL)
        .unwrap()
        .factor
        .to_choi();
    for &c in &[1.0, 0.5, 0.125] {
        let scaled = factor_through_identity(&alpha, &beta.scaled(c), 3, FACTOR_TOL).unwrap();
        assert!((&scaled.factor.to_choi() - &base.scale(c)).frobenius_norm() < 1e-12);
    }
}
