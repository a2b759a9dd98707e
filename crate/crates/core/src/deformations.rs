//! Bending deformations of Fuchsian groups and the quasi-Fuchsian curve of
//! reflection groups.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::boundary::{
    cartan_invariant, cygan_distance, real_involution, sphere_tangency, HeisSphere, RCircle,
    Tangency,
};
use crate::error::{invalid, Error, Result};
use crate::groups::{fit_line, GroupPresentation, LineFit, Word};
use crate::hermitian::HoroPoint;
use crate::isometry::{Isometry, IsometryKind};
use crate::C64;

/// How the generators split into the factors of the decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposition {
    /// `G₁ *_{G₀} G₂`; `g0` lists the edge group, `g1`/`g2` the remaining generators
    Amalgam {
        g0: Vec<usize>,
        g1: Vec<usize>,
        g2: Vec<usize>,
    },
    /// `G₁ *_{G₀}` with stable letter `stable`
    Hnn {
        g0: Vec<usize>,
        g1: Vec<usize>,
        stable: usize,
    },
}

impl Decomposition {
    fn all(&self) -> Vec<usize> {
        match self {
            Decomposition::Amalgam { g0, g1, g2 } => {
                g0.iter().chain(g1).chain(g2).copied().collect()
            }
            Decomposition::Hnn { g0, g1, stable } => g0
                .iter()
                .chain(g1)
                .chain(std::iter::once(stable))
                .copied()
                .collect(),
        }
    }

    pub fn g0(&self) -> &[usize] {
        match self {
            Decomposition::Amalgam { g0, .. } | Decomposition::Hnn { g0, .. } => g0,
        }
    }

    pub fn g1(&self) -> &[usize] {
        match self {
            Decomposition::Amalgam { g1, .. } | Decomposition::Hnn { g1, .. } => g1,
        }
    }

    /// Generators moved by the bending.
    pub fn bent(&self) -> Vec<usize> {
        match self {
            Decomposition::Amalgam { g2, .. } => g2.clone(),
            Decomposition::Hnn { stable, .. } => vec![*stable],
        }
    }
}

/// A Fuchsian group split along the axis `(0, ∞)` of its edge group.
#[derive(Clone, Debug)]
pub struct BendingFamily {
    pub group: GroupPresentation,
    pub decomposition: Decomposition,
    /// admissible parameters are `|η| < eta_max`
    pub eta_max: f64,
}

pub const DEFAULT_ETA_MAX: f64 = FRAC_PI_4;

impl BendingFamily {
    pub fn new(
        group: GroupPresentation,
        decomposition: Decomposition,
        eta_max: f64,
    ) -> Result<Self> {
        let mut all = decomposition.all();
        all.sort_unstable();
        if all != (0..group.len()).collect::<Vec<_>>() {
            return Err(Error::Format(
                "decomposition labels must partition the generators".into(),
            ));
        }
        if decomposition.g0().is_empty() {
            return Err(Error::Format(
                "decomposition needs an edge group generator".into(),
            ));
        }
        for (label, g) in group.generators() {
            if !g.is_real(1e-9) || g.is_antiholomorphic() {
                return invalid(format!("generator {label} is not in PO(2,1)"));
            }
        }
        for &i in decomposition.g0() {
            let g = group.generator(i);
            let fixes_axis = g.classify().kind == IsometryKind::Loxodromic
                && g.fixed_boundary_points().is_ok_and(|f| {
                    f.iter().any(|p| p.is_infinity())
                        && f.iter().any(|p| {
                            cygan_distance(p, &HoroPoint::origin()).is_ok_and(|d| d < 1e-8)
                        })
                });
            if !fixes_axis {
                return invalid(
                    "edge group generator must be loxodromic with fixed points 0 and infinity",
                );
            }
        }
        if !(eta_max > 0.0) {
            return invalid("bending range must be positive");
        }
        Ok(Self {
            group,
            decomposition,
            eta_max,
        })
    }
}

/// `G_η`: conjugate the second factor by `U_η` (amalgam) or replace the stable
/// letter `g₂` by `U_η g₂` (HNN). `η = 0` returns the input unchanged.
pub fn bend(f: &BendingFamily, eta: f64) -> Result<GroupPresentation> {
    if !(eta.abs() < f.eta_max) {
        return Err(Error::Range(format!(
            "bending angle {eta} outside (-{0}, {0})",
            f.eta_max
        )));
    }
    if eta == 0.0 {
        return Ok(f.group.clone());
    }
    let u = Isometry::unitary_rotation(eta);
    let bent = f.decomposition.bent();
    let gens = (0..f.group.len())
        .map(|i| {
            let g = *f.group.generator(i);
            if !bent.contains(&i) {
                g
            } else if matches!(f.decomposition, Decomposition::Amalgam { .. }) {
                g.conjugate_by(&u)
            } else {
                u.compose(&g)
            }
        })
        .collect();
    f.group.with_generators(gens)
}

/// Real loxodromic with attracting point `p`, repelling point `q` on `R` and
/// multiplier `mu > 1`.
pub fn real_loxodromic(p: f64, q: f64, mu: f64) -> Result<Isometry> {
    if p == q {
        return invalid("fixed points must differ");
    }
    // sends 0 to q and infinity to p
    let m = Isometry::heisenberg_translation(C64::new(p, 0.0), 0.0)
        .compose(&Isometry::heisenberg_inversion())
        .compose(&Isometry::heisenberg_translation(
            C64::new(1.0 / (q - p), 0.0),
            0.0,
        ));
    Ok(Isometry::dilation(mu)?.conjugate_by(&m))
}

/// Rank-3 real Schottky amalgam `⟨d, a⟩ *_{⟨d⟩} ⟨d, b⟩`: `d = dilation(λ₀)`,
/// `a` with fixed points on `R₋`, `b` the mirror image of `a` on `R₊`.
pub fn real_schottky_amalgam(lambda0: f64, a_fixed: (f64, f64), mu: f64) -> Result<BendingFamily> {
    let d = Isometry::dilation(lambda0)?;
    let a = real_loxodromic(a_fixed.0, a_fixed.1, mu)?;
    let b = real_loxodromic(-a_fixed.0, -a_fixed.1, mu)?;
    let group = GroupPresentation::new(vec![("d".into(), d), ("a".into(), a), ("b".into(), b)])?;
    BendingFamily::new(
        group,
        Decomposition::Amalgam {
            g0: vec![0],
            g1: vec![1],
            g2: vec![2],
        },
        DEFAULT_ETA_MAX,
    )
}

/// The amalgam used by the demos and the acceptance suite.
pub fn default_schottky_amalgam() -> BendingFamily {
    real_schottky_amalgam(6.0, (-0.6, -1.4), 12.0).expect("valid default amalgam")
}

type Mob = nalgebra::Matrix2<f64>;

/// Real Möbius map `x ↦ (ax+b)/(cx+d)` with `ad − bc > 0`, as a holomorphic
/// isometry preserving the real R-circle. Hyperbolic maps only.
fn mobius_isometry(m: &Mob) -> Result<Isometry> {
    let m = m / m.determinant().sqrt();
    let tr = m[(0, 0)] + m[(1, 1)];
    if tr.abs() <= 2.0 {
        return invalid("Möbius map is not hyperbolic");
    }
    let lam = 0.5 * (tr.abs() + (tr * tr - 4.0).sqrt());
    let mu = lam * lam;
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    if c.abs() < 1e-9 * m.norm() {
        // fixes infinity; an axis through 0 is the only case needed
        if b.abs() > 1e-9 * m.norm() {
            return invalid("Möbius map fixes infinity off the axis (0, inf)");
        }
        return Isometry::dilation((a / d).abs());
    }
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    let roots = [(a - d + disc) / (2.0 * c), (a - d - disc) / (2.0 * c)];
    // derivative at a fixed point is 1/(cx+d)²
    let deriv = |x: f64| 1.0 / (c * x + d).powi(2);
    let (p, q) = if deriv(roots[0]) < deriv(roots[1]) {
        (roots[0], roots[1])
    } else {
        (roots[1], roots[0])
    };
    real_loxodromic(p, q, mu)
}

/// Closed genus-two surface group from the regular octagon with opposite
/// sides paired, cut along a non-separating curve. Generators `c` (edge
/// group, axis `(0, ∞)`), `x2`, `x3` (the rest of the free vertex group) and
/// the stable letter `s` with `s⁻¹cs = x3⁻¹x2⁻¹c x3x2`.
pub fn genus_two_hnn() -> BendingFamily {
    let alpha = 1.0 + 2f64.sqrt();
    let beta = (alpha * alpha - 1.0).sqrt();
    // the disk side pairing conjugated to the upper half plane: translation
    // along the imaginary axis, rotated by kπ/4 about i
    let side = |k: i32| -> Mob {
        let th = k as f64 * PI / 8.0;
        let rot = Mob::new(th.cos(), th.sin(), -th.sin(), th.cos());
        let tr = Mob::new(alpha + beta, 0.0, 0.0, alpha - beta);
        rot * tr * rot.transpose()
    };
    let inv = |m: Mob| m.try_inverse().expect("unimodular");
    let x1 = side(0);
    let x2 = inv(side(1));
    let x3 = side(2);
    let x4 = inv(side(3));
    let c = x2 * x3 * x4;
    let s = inv(x1);
    // move the axis of c onto (0, ∞) with ∞ attracting
    let disc = ((c[(0, 0)] - c[(1, 1)]).powi(2) + 4.0 * c[(0, 1)] * c[(1, 0)]).sqrt();
    let f = [
        (c[(0, 0)] - c[(1, 1)] + disc) / (2.0 * c[(1, 0)]),
        (c[(0, 0)] - c[(1, 1)] - disc) / (2.0 * c[(1, 0)]),
    ];
    let deriv = |x: f64| 1.0 / (c[(1, 0)] * x + c[(1, 1)]).powi(2);
    let (p, q) = if deriv(f[0]) < deriv(f[1]) {
        (f[0], f[1])
    } else {
        (f[1], f[0])
    };
    let conj = Mob::new(p, q, 1.0, 1.0);
    let move_in = |m: Mob| inv(conj) * m * conj;
    let gens = [("c", c), ("x2", x2), ("x3", x3), ("s", s)]
        .into_iter()
        .map(|(l, m)| Ok((l.to_string(), mobius_isometry(&move_in(m))?)))
        .collect::<Result<Vec<_>>>()
        .expect("octagon generators are hyperbolic");
    let group = GroupPresentation::new(gens).expect("distinct labels");
    BendingFamily::new(
        group,
        Decomposition::Hnn {
            g0: vec![0],
            g1: vec![1, 2],
            stable: 3,
        },
        DEFAULT_ETA_MAX,
    )
    .expect("valid genus-two splitting")
}

fn check_phi_domain(eta: f64, zeta: f64) -> Result<()> {
    if !(zeta > 0.0 && zeta < FRAC_PI_2) {
        return invalid(format!("cone angle {zeta} outside (0, pi/2)"));
    }
    let w = PI - 2.0 * zeta;
    if !(eta.abs() < w) {
        return invalid(format!("bending angle {eta} outside (-{w}, {w})"));
    }
    Ok(())
}

/// Angular shift applied by the bending at argument `a ∈ (−π, π]`.
fn phi_shift(a: f64, eta: f64, zeta: f64) -> f64 {
    let w = PI - 2.0 * zeta;
    if a.abs() >= PI - zeta {
        0.0
    } else if a.abs() <= zeta {
        eta
    } else if a > 0.0 {
        eta * (1.0 - (a - zeta) / w)
    } else {
        eta * (1.0 + (a + zeta) / w)
    }
}

/// Bends the real axis at the origin by `η`, interpolating across the two
/// sectors between the `ζ`-cones around `R₊` and `R₋`.
pub fn phi_bend(z: C64, eta: f64, zeta: f64) -> Result<C64> {
    check_phi_domain(eta, zeta)?;
    if z == C64::new(0.0, 0.0) {
        return Ok(z);
    }
    if eta < 0.0 {
        return Ok(phi_bend(z.conj(), -eta, zeta)?.conj());
    }
    Ok(z * C64::from_polar(1.0, phi_shift(z.arg(), eta, zeta)))
}

/// Linear distortion of [`phi_bend`] at `z`.
pub fn phi_distortion(z: C64, eta: f64, zeta: f64) -> Result<f64> {
    check_phi_domain(eta, zeta)?;
    if z == C64::new(0.0, 0.0) {
        return invalid("distortion is undefined at the origin");
    }
    if eta < 0.0 {
        return phi_distortion(z.conj(), -eta, zeta);
    }
    let a = z.arg();
    let w = PI - 2.0 * zeta;
    Ok(if a.abs() >= PI - zeta || a.abs() <= zeta {
        1.0
    } else if a > 0.0 {
        w / (w - eta)
    } else {
        (w + eta) / w
    })
}

/// Direction in which the R-circle arc through `p` (with endpoints on the
/// vertical axis) crosses the plane `v = 0`.
fn arc_direction(xi: C64, v: f64, u: f64) -> f64 {
    let a = xi.arg() + 0.5 * C64::new(xi.norm_sqr() + u, v).arg();
    let a = a.rem_euclid(2.0 * PI);
    if a > PI {
        a - 2.0 * PI
    } else {
        a
    }
}

/// Extension of [`phi_bend`] to `ℋ`: each point is rotated about the vertical
/// axis by the bending shift of its arc direction. Points strictly above the
/// boundary use the same rule with `|ξ|² + u` in place of `|ξ|²`.
pub fn elementary_bending(p: &HoroPoint, eta: f64, zeta: f64) -> Result<HoroPoint> {
    check_phi_domain(eta, zeta)?;
    let Some((xi, v, u)) = p.coords() else {
        return Ok(HoroPoint::Infinity);
    };
    if xi.norm() == 0.0 {
        return Ok(*p);
    }
    let psi = arc_direction(xi, v, u);
    let shift = if eta < 0.0 {
        -phi_shift(-psi, -eta, zeta)
    } else {
        phi_shift(psi, eta, zeta)
    };
    Ok(HoroPoint::Finite {
        xi: xi * C64::from_polar(1.0, shift),
        v,
        u,
    })
}

/// Minimal reflection-group configuration: planes `v = ±s0` and two spheres
/// between them tangent at `(0, s1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QFCurveConfig {
    pub s0: f64,
    pub s1: f64,
    pub spheres: Vec<HeisSphere>,
}

impl Default for QFCurveConfig {
    fn default() -> Self {
        Self {
            s0: 2.0,
            s1: 0.0,
            spheres: vec![
                HeisSphere {
                    center: (C64::new(0.0, 0.0), 1.0),
                    radius: 1.0,
                },
                HeisSphere {
                    center: (C64::new(0.0, 0.0), -1.0),
                    radius: 1.0,
                },
            ],
        }
    }
}

/// Interpretation of the angular parameter, stamped into reports.
pub const QF_PARAMETER_NOTE: &str =
    "p1(t) is the point of m3 at R-circle angle pi/4 + t/4; the screw angle of g1.g2 is 2t";

const TANGENCY_TOL: f64 = 1e-9;

impl QFCurveConfig {
    /// Checks the tangencies; returns the common sphere radius.
    pub fn validate(&self) -> Result<f64> {
        if !(self.s0 > 0.0) || !self.s0.is_finite() {
            return Err(Error::Config(format!(
                "s0 must be positive, got {}",
                self.s0
            )));
        }
        if self.spheres.len() != 2 {
            return Err(Error::Config(format!(
                "only the four-generator configuration is supported, got {} spheres",
                self.spheres.len()
            )));
        }
        let (s3, s4) = (self.spheres[0], self.spheres[1]);
        for (name, s) in [("S3", s3), ("S4", s4)] {
            if s.center.0.norm() > TANGENCY_TOL {
                return Err(Error::Config(format!(
                    "{name} must be centred on the vertical axis"
                )));
            }
        }
        let r3 = s3.radius * s3.radius;
        let r4 = s4.radius * s4.radius;
        if (s3.center.1 + r3 - self.s0).abs() > TANGENCY_TOL {
            return Err(Error::Config(
                "spheres S1 and S3 are not tangent at (0, s0)".into(),
            ));
        }
        if (s4.center.1 - r4 + self.s0).abs() > TANGENCY_TOL {
            return Err(Error::Config(
                "spheres S2 and S4 are not tangent at (0, -s0)".into(),
            ));
        }
        let touch = HoroPoint::boundary(C64::new(0.0, 0.0), self.s1);
        let tangent_at_s1 = (s3.center.1 - r3 - self.s1).abs() <= TANGENCY_TOL
            && (s4.center.1 + r4 - self.s1).abs() <= TANGENCY_TOL
            && matches!(sphere_tangency(&s3, &s4, 1e-7), Tangency::Tangent(p) if cygan_distance(&p, &touch).is_ok_and(|d| d < 1e-3));
        if !tangent_at_s1 {
            return Err(Error::Config(
                "spheres S3 and S4 are not tangent at (0, s1)".into(),
            ));
        }
        if self.s1 != 0.0 {
            return Err(Error::Config(
                "spheres S3 and S4 must be symmetric (s1 = 0)".into(),
            ));
        }
        Ok(s3.radius)
    }
}

/// The four R-circles `m₁ … m₄` of the curve at parameter `t`, for unit spheres.
fn qf_circles(t: f64) -> ([RCircle; 4], Isometry, HoroPoint, HoroPoint) {
    let tau = t / 4.0;
    let p1 = (
        C64::from_polar((2.0 * tau).sin().max(0.0).sqrt(), FRAC_PI_4 + tau),
        1.0 + (2.0 * tau).cos(),
    );
    let p2 = (-p1.0, -p1.1);
    let m1 = RCircle::InfiniteLine {
        point: p1,
        direction: C64::from_polar(1.0, FRAC_PI_4 + 3.0 * tau),
    };
    let m2 = RCircle::InfiniteLine {
        point: p2,
        direction: C64::from_polar(1.0, FRAC_PI_4 - tau),
    };
    let m3 = RCircle::Finite {
        center: (C64::new(0.0, 0.0), 1.0),
        radius: 1.0,
        phase: 0.0,
    };
    let m4 = RCircle::Finite {
        center: (C64::new(0.0, 0.0), -1.0),
        radius: 1.0,
        phase: FRAC_PI_2,
    };
    let a = Isometry::unitary_rotation(2.0 * tau);
    (
        [m1, m2, m3, m4],
        a,
        HoroPoint::boundary(p1.0, p1.1),
        HoroPoint::boundary(p2.0, p2.1),
    )
}

/// Deformed group, its marked points `p₁, p₂` and the scaling to the configured spheres.
#[derive(Clone, Debug)]
pub struct QFCurvePoint {
    pub t: f64,
    pub group: GroupPresentation,
    pub p1: HoroPoint,
    pub p2: HoroPoint,
    /// `(0, s1)`
    pub junction: HoroPoint,
}

fn qf_build(c: &QFCurveConfig, t: f64) -> Result<QFCurvePoint> {
    let rho = c.validate()?;
    let ([m1, m2, m3, m4], a, p1, p2) = qf_circles(t);
    let scale = Isometry::dilation(rho)?;
    let loop_ok = [(&m1, &p1), (&m3, &p1), (&m2, &p2)]
        .iter()
        .all(|(m, p)| m.residual(p).is_ok_and(|r| r < 1e-9))
        && m3.residual(&HoroPoint::origin()).is_ok_and(|r| r < 1e-9)
        && m4.residual(&HoroPoint::origin()).is_ok_and(|r| r < 1e-9)
        && m4
            .residual(&a.inverse().apply_horo(&p2)?)
            .is_ok_and(|r| r < 1e-9);
    if !loop_ok {
        return Err(Error::Config(
            "R-circle arcs do not close up into a loop".into(),
        ));
    }
    let g4 = real_involution(&m4)?;
    let g4 = if t == 0.0 { g4 } else { g4.conjugate_by(&a) };
    let gens = [
        real_involution(&m1)?,
        real_involution(&m2)?,
        real_involution(&m3)?,
        g4,
    ];
    let gens: Vec<(String, Isometry)> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            (
                format!("g{}", i + 1),
                if rho == 1.0 {
                    *g
                } else {
                    g.conjugate_by(&scale)
                },
            )
        })
        .collect();
    let group = GroupPresentation::new(gens)?;
    let to_scale = |p: &HoroPoint| {
        if rho == 1.0 {
            Ok(*p)
        } else {
            scale.apply_horo(p)
        }
    };
    Ok(QFCurvePoint {
        t,
        group,
        p1: to_scale(&p1)?,
        p2: to_scale(&p2)?,
        junction: HoroPoint::boundary(C64::new(0.0, 0.0), c.s1),
    })
}

/// The reflection group `Γ = ⟨γ₁, γ₂, γ₃, γ₄⟩` preserving the vertical chain.
pub fn qf_base(c: &QFCurveConfig) -> Result<GroupPresentation> {
    Ok(qf_build(c, 0.0)?.group)
}

/// `Γ^t`: `γ₁, γ₂` replaced by reflections in the lines tangent to `m₃` at `p₁(t)`
/// and to `A_t(m₄)` at `p₂(t) = −p₁(t)`, `γ₄` conjugated by `A_t`.
pub fn qf_deform(c: &QFCurveConfig, t: f64) -> Result<GroupPresentation> {
    Ok(qf_point(c, t)?.group)
}

pub fn qf_point(c: &QFCurveConfig, t: f64) -> Result<QFCurvePoint> {
    if !(0.0..FRAC_PI_2).contains(&t) {
        return Err(Error::Range(format!(
            "curve parameter {t} outside [0, pi/2)"
        )));
    }
    qf_build(c, t)
}

/// Marked invariants compared by [`nonconjugacy_certificate`].
#[derive(Clone, Debug, Default)]
pub struct Marking {
    /// words of parabolic elements fixing infinity
    pub parabolic_words: Vec<Word>,
    /// boundary triples
    pub triples: Vec<[HoroPoint; 3]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonconjugacyReport {
    pub angles_a: Vec<f64>,
    pub angles_b: Vec<f64>,
    pub cartan_a: Vec<f64>,
    pub cartan_b: Vec<f64>,
    pub differ: bool,
}

pub const INVARIANT_TOL: f64 = 1e-6;

/// Compares rotation angles of marked parabolics and Cartan invariants of
/// marked triples; `differ` certifies that no isometry respects both markings.
pub fn nonconjugacy_certificate(
    ga: &GroupPresentation,
    ma: &Marking,
    gb: &GroupPresentation,
    mb: &Marking,
) -> Result<NonconjugacyReport> {
    if ma.parabolic_words.is_empty() && ma.triples.is_empty() {
        return invalid("no marked invariants supplied");
    }
    if ma.parabolic_words.len() != mb.parabolic_words.len() || ma.triples.len() != mb.triples.len()
    {
        return invalid("markings of the two groups do not match");
    }
    let angles = |g: &GroupPresentation, m: &Marking| -> Result<Vec<f64>> {
        m.parabolic_words
            .iter()
            .map(|w| Ok(g.evaluate(w).parabolic_normal_form()?.rotation_angle))
            .collect()
    };
    let cartan = |m: &Marking| -> Result<Vec<f64>> {
        m.triples
            .iter()
            .map(|[a, b, c]| cartan_invariant(a, b, c))
            .collect()
    };
    let (angles_a, angles_b) = (angles(ga, ma)?, angles(gb, mb)?);
    let (cartan_a, cartan_b) = (cartan(ma)?, cartan(mb)?);
    let differ = angles_a
        .iter()
        .zip(&angles_b)
        .any(|(x, y)| (x - y).abs() > INVARIANT_TOL)
        || cartan_a
            .iter()
            .zip(&cartan_b)
            .any(|(x, y)| (x - y).abs() > INVARIANT_TOL);
    Ok(NonconjugacyReport {
        angles_a,
        angles_b,
        cartan_a,
        cartan_b,
        differ,
    })
}

/// Marking of the curve group: the screw parabolic `γ₁γ₂` and the triple
/// `(p₂, (0, s1), p₁)`.
pub fn qf_marking(point: &QFCurvePoint) -> Result<Marking> {
    Ok(Marking {
        parabolic_words: vec![point.group.parse_word("g1.g2")?],
        triples: vec![[point.p2, point.junction, point.p1]],
    })
}

/// Marking of a bent group: the triple `(x¹, 0, x²)` of attracting fixed points
/// of the first generators of `G₁` and of the bent factor.
pub fn bending_marking(f: &BendingFamily, bent: &GroupPresentation) -> Result<Marking> {
    let first = |ids: &[usize]| -> Result<HoroPoint> {
        let i = *ids
            .first()
            .ok_or_else(|| Error::Format("empty factor in decomposition".into()))?;
        bent.generator(i).attracting_fixed_point()
    };
    let x1 = first(f.decomposition.g1())?;
    let x2 = first(&f.decomposition.bent())?;
    Ok(Marking {
        parabolic_words: Vec::new(),
        triples: vec![[x1, HoroPoint::origin(), x2]],
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct QcRow {
    pub r: f64,
    /// `2r|sin(θ/2)|`
    pub lower_bound: f64,
    /// `ρ_c(x, γ_t x)` at distance `r` from the screw axis
    pub direct: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QcReport {
    pub t: f64,
    pub rotation_angle: f64,
    /// Cygan length of the vertical intervals joining `S₂` to `γ(S₂)` for the base group
    pub source_length: f64,
    pub rows: Vec<QcRow>,
    pub fit: Option<LineFit>,
}

/// Image lengths of the vertical interval family under the screw parabolic
/// `γ_t = γ₁γ₂`, at the given distances from its axis.
pub fn qc_obstruction_diagnostic(c: &QFCurveConfig, t: f64, radii: &[f64]) -> Result<QcReport> {
    let base = qf_base(c)?;
    let w = base.parse_word("g1.g2")?;
    let src = base.evaluate(&w).parabolic_normal_form()?;
    let source_length = src.translation.1.abs().sqrt();
    let g = qf_deform(c, t)?.evaluate(&w);
    let nf = g.parabolic_normal_form()?;
    let theta = nf.rotation_angle;
    let rot = C64::from_polar(1.0, theta);
    let axis = if (C64::new(1.0, 0.0) - rot).norm() > 1e-12 {
        nf.translation.0 / (C64::new(1.0, 0.0) - rot)
    } else {
        C64::new(0.0, 0.0)
    };
    let shift = Isometry::heisenberg_translation(axis, 0.0);
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let x = shift.apply_horo(&HoroPoint::boundary(C64::new(r, 0.0), 0.0))?;
        let direct = cygan_distance(&x, &g.apply_horo(&x)?)?;
        rows.push(QcRow {
            r,
            lower_bound: 2.0 * r * (theta / 2.0).sin().abs(),
            direct,
            ratio: direct / source_length,
        });
    }
    let fit = if theta != 0.0 && rows.len() >= 2 {
        let xs: Vec<f64> = rows.iter().map(|r| r.r).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.lower_bound).collect();
        Some(fit_line(&xs, &ys)?)
    } else {
        None
    };
    Ok(QcReport {
        t,
        rotation_angle: theta,
        source_length,
        rows,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_two_relation() {
        let f = genus_two_hnn();
        for eta in [0.0, 0.2] {
            let g = bend(&f, eta).unwrap();
            let [c, x2, x3, s] = [0, 1, 2, 3].map(|i| *g.generator(i));
            let lhs = s.inverse().compose(&c).compose(&s);
            let rhs = x3
                .inverse()
                .compose(&x2.inverse())
                .compose(&c)
                .compose(&x3)
                .compose(&x2);
            assert!(lhs.projective_distance(&rhs) < 1e-9, "eta {eta}");
        }
    }

    #[test]
    fn phi_examples() {
        let z = phi_bend(C64::new(1.0, 0.0), 0.3, 0.5).unwrap();
        assert!((z - C64::from_polar(1.0, 0.3)).norm() < 1e-15);
        assert_eq!(
            phi_bend(C64::new(-1.0, 0.0), 0.3, 0.5).unwrap(),
            C64::new(-1.0, 0.0)
        );
        assert_eq!(
            phi_bend(C64::new(0.2, 0.7), 0.0, 0.5).unwrap(),
            C64::new(0.2, 0.7)
        );
        assert!(phi_bend(C64::new(1.0, 0.0), 3.0, 0.5).is_err());
        assert!(phi_bend(C64::new(1.0, 0.0), 0.1, 0.0).is_err());
    }

    #[test]
    fn distortion_examples() {
        let k = phi_distortion(C64::new(0.0, 1.0), PI / 6.0, PI / 6.0).unwrap();
        assert!((k - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(phi_distortion(C64::new(1.0, 0.1), 0.2, 0.5).unwrap(), 1.0);
        assert_eq!(phi_distortion(C64::new(-1.0, 0.1), 0.2, 0.5).unwrap(), 1.0);
        assert!(phi_distortion(C64::new(0.0, 0.0), 0.2, 0.5).is_err());
    }

    #[test]
    fn elementary_bending_wedges() {
        let p =
            elementary_bending(&HoroPoint::boundary(C64::new(2.0, 0.0), 0.0), 0.3, 0.5).unwrap();
        assert_eq!(p, HoroPoint::boundary(C64::from_polar(2.0, 0.3), 0.0));
        let q = HoroPoint::boundary(C64::new(-2.0, 0.0), 0.0);
        assert_eq!(elementary_bending(&q, 0.3, 0.5).unwrap(), q);
        assert!(elementary_bending(&HoroPoint::Infinity, 0.3, 0.5)
            .unwrap()
            .is_infinity());
    }

    #[test]
    fn bend_zero_is_verbatim() {
        let f = default_schottky_amalgam();
        let g = bend(&f, 0.0).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.generator(i).matrix(), f.group.generator(i).matrix());
        }
        assert!(matches!(bend(&f, 1.0), Err(Error::Range(_))));
    }

    #[test]
    fn real_loxodromic_fixed_points() {
        let g = real_loxodromic(-0.5, -2.0, 4.0).unwrap();
        assert!(g.is_real(1e-12));
        let f = g.fixed_boundary_points().unwrap();
        let want = [(-0.5, f[0]), (-2.0, f[1])];
        for (x, p) in want {
            assert!(
                cygan_distance(&p, &HoroPoint::boundary(C64::new(x, 0.0), 0.0)).unwrap() < 1e-9,
                "{p:?}"
            );
        }
    }

    #[test]
    fn base_configuration() {
        let c = QFCurveConfig::default();
        let g = qf_base(&c).unwrap();
        assert_eq!(g.len(), 4);
        for i in 0..4 {
            assert!(g.is_involution(i));
        }
        let screw = g
            .evaluate(&g.parse_word("g1.g2").unwrap())
            .parabolic_normal_form()
            .unwrap();
        assert!(screw.rotation_angle.abs() < 1e-12);
        assert!(screw.translation.0.norm() < 1e-12);
    }

    #[test]
    fn config_errors() {
        let mut c = QFCurveConfig::default();
        c.s0 = 3.0;
        assert!(matches!(c.validate(), Err(Error::Config(m)) if m.contains("S1 and S3")));
        let mut c = QFCurveConfig::default();
        c.spheres.pop();
        assert!(c.validate().is_err());
    }
}
