use std::f64::consts::PI;

use cxhyp::deformations::{default_schottky_amalgam, genus_two_hnn};
use cxhyp::groups::GroupPresentation;
use cxhyp::io::*;
use cxhyp::{HoroPoint, Isometry, C64};
use proptest::prelude::*;

fn element() -> impl Strategy<Value = Isometry> {
    (
        (-2.0..2.0f64, -2.0..2.0f64),
        -2.0..2.0f64,
        -PI..PI,
        0.3..3.0f64,
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|((a, b), v, th, r, inv, anti)| {
            let mut g = Isometry::heisenberg_translation(C64::new(a, b), v)
                .compose(&Isometry::unitary_rotation(th))
                .compose(&Isometry::dilation(r).unwrap());
            if inv {
                g = g.compose(&Isometry::heisenberg_inversion());
            }
            if anti {
                g = g.compose(&Isometry::conjugation());
            }
            g
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn group_files_round_trip(gens in proptest::collection::vec(element(), 1..5)) {
        let labels = ["a", "b", "c", "d"];
        let group = GroupPresentation::new(
            gens.iter().enumerate().map(|(i, g)| (labels[i].to_string(), *g)).collect(),
        ).unwrap();
        let text = GroupFile { group, decomposition: None }.serialize();
        let parsed = GroupFile::parse(&text).unwrap();
        prop_assert_eq!(parsed.serialize(), text);
        for (i, g) in gens.iter().enumerate() {
            prop_assert_eq!(parsed.group.generator(i).matrix(), g.matrix());
            prop_assert_eq!(parsed.group.generator(i).is_antiholomorphic(), g.is_antiholomorphic());
        }
    }

    #[test]
    fn point_clouds_round_trip(pts in proptest::collection::vec((-1e6..1e6f64, -1e6..1e6f64, -1e9..1e9f64), 0..50)) {
        let cloud: Vec<HoroPoint> = pts.iter().map(|&(a, b, v)| HoroPoint::boundary(C64::new(a, b), v)).collect();
        let text = write_point_cloud(&cloud);
        prop_assert_eq!(read_point_cloud(&text).unwrap(), cloud);
    }
}

#[test]
fn decompositions_survive_round_trip() {
    for f in [default_schottky_amalgam(), genus_two_hnn()] {
        let file = GroupFile {
            group: f.group.clone(),
            decomposition: Some(f.decomposition.clone()),
        };
        let text = file.serialize();
        let parsed = GroupFile::parse(&text).unwrap();
        assert_eq!(parsed.decomposition, Some(f.decomposition));
        assert_eq!(parsed.serialize(), text);
    }
}
