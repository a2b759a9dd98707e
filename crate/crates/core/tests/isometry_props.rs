use std::f64::consts::PI;

use cxhyp::{HoroPoint, Isometry, IsometryKind, C64};
use proptest::prelude::*;

fn cplx(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

/// Random holomorphic isometry: translation, rotation, dilation, optional inversion.
fn element() -> impl Strategy<Value = Isometry> {
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

fn boundary_point() -> impl Strategy<Value = HoroPoint> {
    (cplx(3.0), -5.0..5.0f64).prop_map(|(xi, v)| HoroPoint::boundary(xi, v))
}

fn close(a: &HoroPoint, b: &HoroPoint, tol: f64) -> bool {
    match (a.coords(), b.coords()) {
        (Some((x, v, u)), Some((y, w, s))) => {
            (x - y).norm() <= tol && (v - w).abs() <= tol && (u - s).abs() <= tol
        }
        (None, None) => true,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn translations_compose(a in cplx(3.0), va in -5.0..5.0f64, b in cplx(3.0), vb in -5.0..5.0f64) {
        let prod = Isometry::heisenberg_translation(a, va).compose(&Isometry::heisenberg_translation(b, vb));
        let law = Isometry::heisenberg_translation(a + b, va + vb + 2.0 * (a * b.conj()).im);
        let diff = (prod.matrix() - law.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn inversion_is_an_involution(p in boundary_point()) {
        let i = Isometry::heisenberg_inversion();
        let q = i.apply_horo(&i.apply_horo(&p).unwrap()).unwrap();
        let scale = 1.0 + p.coords().map_or(0.0, |(x, v, _)| x.norm() + v.abs());
        prop_assert!(close(&p, &q, 1e-10 * scale));
    }

    #[test]
    fn classification_is_conjugation_invariant(h in element(), k in 0usize..3, t in 0.2..2.0f64) {
        let g = match k {
            0 => Isometry::dilation(1.0 + t).unwrap(),
            1 => Isometry::heisenberg_translation(C64::new(t, 0.0), 0.5).compose(&Isometry::unitary_rotation(t)),
            _ => Isometry::unitary_rotation(t),
        };
        let a = g.classify();
        let b = g.conjugate_by(&h).classify();
        prop_assert_eq!(a.kind, b.kind);
    }

    #[test]
    fn form_survives_long_chains(gs in proptest::collection::vec(element(), 50)) {
        let mut acc = Isometry::identity();
        for (k, g) in gs.iter().enumerate() {
            acc = if k % 3 == 2 { acc.compose(&g.inverse()) } else { acc.compose(g) };
            prop_assert!(acc.form_defect() < 1e-8, "depth {k}: {}", acc.form_defect());
        }
    }

    #[test]
    fn screw_angle_is_invariant_in_the_stabiliser(
        th in -3.0..3.0f64, xi in cplx(2.0), v in -2.0..2.0f64,
        a in cplx(2.0), b in -2.0..2.0f64, phi in -PI..PI, r in 0.3..3.0f64,
    ) {
        let g = Isometry::heisenberg_translation(xi, v).compose(&Isometry::unitary_rotation(th));
        let h = Isometry::similarity((a, b), r, phi).unwrap();
        let nf = g.parabolic_normal_form();
        let nf2 = g.conjugate_by(&h).parabolic_normal_form();
        match (nf, nf2) {
            (Ok(x), Ok(y)) => prop_assert!((x.rotation_angle - y.rotation_angle).abs() < 1e-9),
            (x, y) => prop_assert!(x.is_err() && y.is_err()),
        }
    }
}

#[test]
fn documented_classifications() {
    let d = Isometry::dilation(2.0).unwrap();
    assert_eq!(d.classify().kind, IsometryKind::Loxodromic);
    assert!((d.translation_length().unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
    let t = Isometry::heisenberg_translation(C64::new(0.0, 0.0), 1.0);
    assert_eq!(t.classify().kind, IsometryKind::Parabolic);
    assert_eq!(t.parabolic_normal_form().unwrap().rotation_angle, 0.0);
    let e = Isometry::unitary_rotation(0.7);
    assert_eq!(e.classify().kind, IsometryKind::Elliptic);
    assert!(Isometry::identity().classify().identity);
    assert!(Isometry::identity().fixed_boundary_points().is_err());
    let c = Isometry::conjugation();
    assert!(c.is_antiholomorphic());
    assert!(c.compose(&c).is_identity());
}
