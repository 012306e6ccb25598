//! Canonical serialization round-trips bit-exactly.

use posmap_cli::document::convert;
use posmap_cli::json::{format_g17, to_canonical_string};
use posmap_cli::MapDocument;
use posmap_core::linalg::random::{random_ginibre, rng_from_seed};
use posmap_core::maps::zoo;
use posmap_core::{LinearMapSpec, MapDims};
use proptest::prelude::*;
use serde_json::Value;

fn bits(doc: &MapDocument) -> Vec<u64> {
    let mut out = Vec::new();
    let mut push = |m: &posmap_core::ComplexMatrix| {
        out.extend(
            m.as_slice()
                .iter()
                .flat_map(|z| [z.re.to_bits(), z.im.to_bits()]),
        );
    };
    match doc.map.representation() {
        posmap_core::maps::Representation::Choi(m)
        | posmap_core::maps::Representation::Super(m) => push(m),
        posmap_core::maps::Representation::Kraus(ks) => ks.iter().for_each(push),
    }
    out
}

#[test]
fn zoo_fixtures_roundtrip() {
    for (name, params) in [
        ("identity", vec![3.0]),
        ("transpose", vec![2.0]),
        ("depolarizing", vec![3.0, 0.1]),
        ("mu_family", vec![4.0, 2.5]),
        ("choi75", vec![]),
    ] {
        let map = zoo(name, &params).unwrap();
        for repr in ["choi", "kraus", "super"] {
            // only completely positive maps have a Kraus form
            let Ok(converted) = convert(&map, repr) else {
                assert_eq!(repr, "kraus");
                continue;
            };
            let doc = MapDocument::new(converted);
            let text = doc.to_canonical_string();
            let back = MapDocument::parse(&text).unwrap();
            assert_eq!(bits(&back), bits(&doc), "{name} {repr}");
            assert_eq!(back.to_canonical_string(), text);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_documents_roundtrip(seed in 0u64..1_000_000, m in 1usize..4, n in 1usize..4, scale in -300i32..300) {
        let mut rng = rng_from_seed(seed);
        let c = random_ginibre(m * n, m * n, &mut rng).scale(10f64.powi(scale / 10));
        let map = LinearMapSpec::from_choi(MapDims::new(m, n).unwrap(), c).unwrap();
        let ks = (0..2).map(|_| random_ginibre(n, m, &mut rng)).collect();
        let kraus = LinearMapSpec::from_kraus(MapDims::new(m, n).unwrap(), ks).unwrap();
        for doc in [MapDocument::new(map), MapDocument::new(kraus)] {
            let text = doc.to_canonical_string();
            let back = MapDocument::parse(&text).unwrap();
            prop_assert_eq!(bits(&back), bits(&doc));
            prop_assert_eq!(back.to_canonical_string(), text);
        }
    }

    #[test]
    fn any_finite_float_roundtrips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let text = to_canonical_string(&serde_json::json!([x]));
        let back: Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back[0].as_f64().unwrap().to_bits(), x.to_bits());
        prop_assert_eq!(text, format!("[{}]", format_g17(x)));
    }
}
