use posmap_core::cones::{check_cp, SPECTRAL_TOL};
use posmap_core::decomp::{
    decide_decomposable, find_decomposition, find_witness, piani_mora_check, Budgets, Consistency,
    PrimalDykstra,
};
use posmap_core::linalg::random::{random_ginibre, rng_from_seed};
use posmap_core::maps::{tensor_maps, zoo};
use posmap_core::{CertTolerances, CertificateKind, LinearMapSpec, MapDims};

fn random_cp(n: usize, r: usize, seed: u64) -> LinearMapSpec {
    let mut rng = rng_from_seed(seed);
    let ks = (0..r).map(|_| random_ginibre(n, n, &mut rng)).collect();
    LinearMapSpec::from_kraus(MapDims::square(n).unwrap(), ks).unwrap()
}

fn corpus() -> Vec<(String, LinearMapSpec)> {
    let mut maps: Vec<(String, LinearMapSpec)> = vec![
        ("identity(2)".into(), zoo("identity", &[2.0]).unwrap()),
        ("transpose(3)".into(), zoo("transpose", &[3.0]).unwrap()),
        ("choi75".into(), zoo("choi75", &[]).unwrap()),
        (
            "mu_family(3,2.5)".into(),
            zoo("mu_family", &[3.0, 2.5]).unwrap(),
        ),
        (
            "mu_family(3,0.5)".into(),
            zoo("mu_family", &[3.0, 0.5]).unwrap(),
        ),
        (
            "depolarizing(2,0.5)".into(),
            zoo("depolarizing", &[2.0, 0.5]).unwrap(),
        ),
        (
            "transpose(2)⊗id_2".into(),
            tensor_maps(
                &zoo("transpose", &[2.0]).unwrap(),
                &zoo("identity", &[2.0]).unwrap(),
            )
            .unwrap(),
        ),
    ];
    for s in 0..3 {
        maps.push((format!("random_cp#{s}"), random_cp(2, 2, 900 + s)));
    }
    maps
}

#[test]
fn certificates_self_verify_and_never_conflict() {
    let tol = CertTolerances::default();
    for (name, map) in corpus() {
        let choi = map.to_choi();
        let primal = find_decomposition(&map, tol.residual, 3000).unwrap();
        let dual = find_witness(&map, None, 500).unwrap();
        let decided = decide_decomposable(&map, &Budgets::default()).unwrap();
        for cert in [&primal, &dual, &decided] {
            assert!(
                cert.verify(&choi, &tol).unwrap(),
                "{name}: certificate fails re-verification"
            );
        }
        let kinds = [primal.kind(), dual.kind(), decided.kind()];
        let has_dec = kinds.contains(&CertificateKind::Decomposition);
        let has_wit = kinds.contains(&CertificateKind::Witness);
        assert!(
            !(has_dec && has_wit),
            "{name}: both a decomposition and a witness"
        );
    }
}

#[test]
fn dykstra_residual_trends_down() {
    let map = zoo("mu_family", &[3.0, 1.5]).unwrap();
    let mut solver = PrimalDykstra::new(map.to_choi(), map.dims());
    for _ in 0..510 {
        solver.step().unwrap();
    }
    let h = &solver.history()[10..];
    let maxima: Vec<f64> = h
        .chunks(50)
        .map(|w| w.iter().copied().fold(f64::MIN, f64::max))
        .collect();
    for w in maxima.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-15, "{maxima:?}");
    }
}

#[test]
fn decomposable_lift_implies_cp() {
    let b = Budgets::default();
    let mut taus: Vec<LinearMapSpec> = (0..4).map(|s| random_cp(2, 2, 950 + s)).collect();
    taus.push(zoo("transpose", &[2.0]).unwrap());
    taus.push(zoo("mu_family", &[2.0, 1.5]).unwrap());
    for tau in taus {
        let report = piani_mora_check(&tau, 2, &b).unwrap();
        assert_ne!(report.consistency, Consistency::Contradiction);
        if report.certificate.kind() == CertificateKind::Decomposition {
            assert!(check_cp(&tau, SPECTRAL_TOL).unwrap().holds());
        }
    }
}
