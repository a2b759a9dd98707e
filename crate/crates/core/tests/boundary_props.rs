use std::f64::consts::{FRAC_PI_2, PI};

use cxhyp::boundary::*;
use cxhyp::{HoroPoint, Isometry, C64};
use proptest::prelude::*;

fn cplx(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

fn boundary_point() -> impl Strategy<Value = HoroPoint> {
    (cplx(3.0), -5.0..5.0f64).prop_map(|(xi, v)| HoroPoint::boundary(xi, v))
}

fn horo_point() -> impl Strategy<Value = HoroPoint> {
    (cplx(3.0), -5.0..5.0f64, 0.0..3.0f64).prop_map(|(xi, v, u)| HoroPoint::new(xi, v, u).unwrap())
}

fn holomorphic() -> impl Strategy<Value = Isometry> {
    (cplx(2.0), -2.0..2.0f64, -PI..PI, 0.3..3.0f64, any::<bool>()).prop_map(
        |(xi, v, th, r, inv)| {
            let g = Isometry::heisenberg_translation(xi, v)
                .compose(&Isometry::unitary_rotation(th))
                .compose(&Isometry::dilation(r).unwrap());
            if inv {
                g.compose(&Isometry::heisenberg_inversion())
            } else {
                g
            }
        },
    )
}

fn r_circle() -> impl Strategy<Value = RCircle> {
    prop_oneof![
        (cplx(2.0), -2.0..2.0f64, -PI..PI).prop_map(|(xi, v, a)| RCircle::InfiniteLine {
            point: (xi, v),
            direction: C64::from_polar(1.0, a)
        }),
        (cplx(2.0), -2.0..2.0f64, 0.3..3.0f64, -PI..PI).prop_map(|(xi, v, r, phase)| {
            RCircle::Finite {
                center: (xi, v),
                radius: r,
                phase,
            }
        }),
    ]
}

fn chain() -> impl Strategy<Value = Chain> {
    prop_oneof![
        cplx(2.0).prop_map(Chain::Vertical),
        (cplx(2.0), -2.0..2.0f64, 0.3..3.0f64).prop_map(|(xi, v, r)| Chain::Finite {
            center: (xi, v),
            radius: r
        }),
    ]
}

/// Three distinct indices out of `n`.
fn triple(n: usize) -> impl Strategy<Value = [usize; 3]> {
    proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 3).prop_map(|v| [v[0], v[1], v[2]])
}

fn max_entry_diff(a: &Isometry, b: &Isometry) -> f64 {
    (a.matrix() - b.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cygan_is_invariant_under_translations_and_rotations(
        p in horo_point(), q in horo_point(), xi in cplx(3.0), v in -5.0..5.0f64, th in -PI..PI,
    ) {
        let g = Isometry::heisenberg_translation(xi, v).compose(&Isometry::unitary_rotation(th));
        let d = cygan_distance(&p, &q).unwrap();
        let e = cygan_distance(&g.apply_horo(&p).unwrap(), &g.apply_horo(&q).unwrap()).unwrap();
        prop_assert!((d - e).abs() < 1e-10 * d.max(1.0), "{d} {e}");
    }

    #[test]
    fn cygan_scales_under_dilation(p in horo_point(), q in horo_point(), r in 0.1..10.0f64) {
        let g = Isometry::dilation(r).unwrap();
        let d = cygan_distance(&p, &q).unwrap();
        let e = cygan_distance(&g.apply_horo(&p).unwrap(), &g.apply_horo(&q).unwrap()).unwrap();
        prop_assert!((e - r * d).abs() < 1e-10 * (r * d).max(1.0), "{e} {}", r * d);
    }

    #[test]
    fn inversion_preserves_unit_sphere(psi in -FRAC_PI_2..FRAC_PI_2, theta in -PI..PI) {
        let s = HeisSphere::new((C64::new(0.0, 0.0), 0.0), 1.0).unwrap();
        let p = s.point(psi, theta);
        prop_assert!((cygan_norm(&p).unwrap() - 1.0).abs() < 1e-12);
        let q = Isometry::heisenberg_inversion().apply_horo(&p).unwrap();
        prop_assert!((cygan_norm(&q).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cartan_lies_in_range(a in boundary_point(), b in boundary_point(), c in boundary_point()) {
        if let Ok(x) = cartan_invariant(&a, &b, &c) {
            prop_assert!((-FRAC_PI_2..=FRAC_PI_2).contains(&x));
        }
    }

    #[test]
    fn cartan_vanishes_on_r_circles(c in r_circle(), idx in triple(12)) {
        let pts = c.sample(12, 3.0).unwrap();
        let a = cartan_invariant(&pts[idx[0]], &pts[idx[1]], &pts[idx[2]]).unwrap();
        prop_assert!(a.abs() < 1e-9, "{a}");
    }

    #[test]
    fn cartan_is_extremal_on_chains(c in chain(), idx in triple(12)) {
        let pts = c.sample(12, 3.0).unwrap();
        let a = cartan_invariant(&pts[idx[0]], &pts[idx[1]], &pts[idx[2]]).unwrap();
        prop_assert!((a.abs() - FRAC_PI_2).abs() < 1e-9, "{a}");
    }

    #[test]
    fn cartan_is_invariant(a in boundary_point(), b in boundary_point(), c in boundary_point(), g in holomorphic()) {
        let Ok(x) = cartan_invariant(&a, &b, &c) else { return Ok(()) };
        let im = |p: &HoroPoint| g.apply_horo(p).unwrap();
        let y = cartan_invariant(&im(&a), &im(&b), &im(&c)).unwrap();
        prop_assert!((x - y).abs() < 1e-9, "{x} {y}");
        let k = Isometry::conjugation().compose(&g);
        let im = |p: &HoroPoint| k.apply_horo(p).unwrap();
        let z = cartan_invariant(&im(&a), &im(&b), &im(&c)).unwrap();
        prop_assert!((x + z).abs() < 1e-9, "{x} {z}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn real_involutions_have_order_two(c in r_circle()) {
        let s = real_involution(&c).unwrap();
        prop_assert!(s.is_antiholomorphic());
        let sq = s.compose(&s);
        prop_assert!(max_entry_diff(&sq, &Isometry::identity()) < 1e-10);
        for p in c.sample(16, 3.0).unwrap() {
            let q = s.apply_horo(&p).unwrap();
            match (p.is_infinity(), q.is_infinity()) {
                (true, true) => {}
                (false, false) => {
                    // Cygan distance is a square root of coordinate differences
                    let d = cygan_distance(&p, &q).unwrap();
                    prop_assert!(d < 1e-5 * cygan_norm(&p).unwrap().max(1.0), "{d}");
                }
                _ => prop_assert!(false, "fixed point moved to or from infinity"),
            }
        }
    }
}

#[test]
fn standard_r_circle_projects_to_lemniscate() {
    for p in RCircle::standard().sample(360, 1.0).unwrap() {
        let (xi, _, _) = p.coords().unwrap();
        let (x, y) = (xi.re, xi.im);
        let lhs = (x * x + y * y).powi(2) + x * x - y * y;
        assert!(lhs.abs() < 1e-10, "{xi} {lhs}");
        assert!(on_r_circle(&p, &RCircle::standard(), 1e-10));
    }
}
