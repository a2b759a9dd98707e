use std::sync::OnceLock;

use cxhyp::deformations::default_schottky_amalgam;
use cxhyp::groups::*;
use cxhyp::hermitian::bergman_distance_horo;
use cxhyp::{HoroPoint, Isometry, C64};
use proptest::prelude::*;

fn schottky() -> &'static GroupPresentation {
    static G: OnceLock<GroupPresentation> = OnceLock::new();
    G.get_or_init(|| default_schottky_amalgam().group)
}

fn ball() -> &'static WordBall {
    static B: OnceLock<WordBall> = OnceLock::new();
    B.get_or_init(|| word_ball(schottky(), 3).unwrap())
}

fn frame() -> Vec<HoroPoint> {
    [
        (0.0, 0.0, 0.0, 1.0),
        (1.0, 0.0, 0.0, 0.5),
        (0.0, 1.0, 0.5, 2.0),
        (-0.7, 0.2, -1.0, 0.3),
    ]
    .iter()
    .map(|&(a, b, v, u)| HoroPoint::new(C64::new(a, b), v, u).unwrap())
    .collect()
}

fn interior() -> impl Strategy<Value = HoroPoint> {
    (-2.0..2.0f64, -2.0..2.0f64, -3.0..3.0f64, 0.2..3.0f64)
        .prop_map(|(a, b, v, u)| HoroPoint::new(C64::new(a, b), v, u).unwrap())
}

fn nearest_chordal(p: &HoroPoint, set: &[HoroPoint]) -> f64 {
    set.iter()
        .map(|q| chordal_distance(p, q))
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn word_ball_keeps_every_short_word(letters in proptest::collection::vec(0u16..6, 0..7)) {
        let g = schottky();
        let w = g.reduce(&Word(letters));
        prop_assume!(w.len() <= 3);
        let h = g.evaluate(&w);
        let b = ball();
        let i = b.find(&h);
        prop_assert!(i.is_some(), "{} missing", g.format_word(&w));
        let e = &b.elements[i.unwrap()];
        prop_assert!(e.word.len() <= w.len());
        for x in frame() {
            let d = bergman_distance_horo(&h.apply_horo(&x).unwrap(), &e.g.apply_horo(&x).unwrap()).unwrap();
            prop_assert!(d < 1e-6, "{} merged with {}: {d}", g.format_word(&w), g.format_word(&e.word));
        }
    }

    #[test]
    fn collar_check_is_monotone(l in 0.01..10.0f64, d in 0.01..10.0f64, a in 0.01..1.0f64, b in 0.01..1.0f64) {
        if collar_check(l, d).unwrap() {
            prop_assert!(collar_check(a * l, d).unwrap());
            prop_assert!(collar_check(l, b * d).unwrap());
            prop_assert!(collar_check(a * l, b * d).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dirichlet_domains(y in interior(), z in interior()) {
        let g = schottky();
        prop_assert!(dirichlet_membership(&y, &y, g, 2).unwrap());
        if dirichlet_membership(&z, &y, g, 2).unwrap() {
            for l in 0..g.alphabet().len() as u16 {
                let s = g.evaluate(&Word(vec![l]));
                let gz = s.apply_horo(&z).unwrap();
                prop_assert!(!dirichlet_membership(&gz, &y, g, 2).unwrap());
            }
        }
    }
}

#[test]
fn word_ball_elements_are_distinct() {
    let b = ball();
    let o = frame()[0];
    let images: Vec<HoroPoint> = b
        .elements
        .iter()
        .map(|e| e.g.apply_horo(&o).unwrap())
        .collect();
    for i in 0..images.len() {
        for j in 0..i {
            let d = bergman_distance_horo(&images[i], &images[j]).unwrap();
            assert!(
                d > 1e-6,
                "{} and {} act alike",
                schottky().format_word(&b.elements[i].word),
                schottky().format_word(&b.elements[j].word)
            );
        }
    }
}

#[test]
fn limit_set_of_conjugate_group() {
    let g = schottky();
    let a = limit_set_sample(g, 4).unwrap();
    for h in [
        Isometry::similarity((C64::new(0.3, -0.2), 0.7), 1.0, 0.4).unwrap(),
        Isometry::similarity((C64::new(-1.0, 0.5), -2.0), 1.5, -1.1).unwrap(),
    ] {
        let gens = (0..g.len())
            .map(|i| g.generator(i).conjugate_by(&h))
            .collect();
        let b = limit_set_sample(&g.with_generators(gens).unwrap(), 4).unwrap();
        assert_eq!(a.infinity_count, b.infinity_count);
        let ha: Vec<HoroPoint> = a
            .finite_points()
            .iter()
            .map(|p| h.apply_horo(p).unwrap())
            .collect();
        let bp = b.finite_points();
        let there = ha
            .iter()
            .map(|p| nearest_chordal(p, &bp))
            .fold(0.0, f64::max);
        let back = bp
            .iter()
            .map(|p| nearest_chordal(p, &ha))
            .fold(0.0, f64::max);
        assert!(there < 1e-5 && back < 1e-5, "{there} {back}");
    }
}

#[test]
fn floyd_assignment_is_nearly_equivariant() {
    let g = schottky();
    let defects: Vec<f64> = (2..=4)
        .map(|r| floyd_boundary_samples(g, r).unwrap().equivariance_defect)
        .collect();
    assert!(defects.windows(2).all(|w| w[1] < w[0]), "{defects:?}");
    assert!(defects[2] < 0.15, "{defects:?}");
}
