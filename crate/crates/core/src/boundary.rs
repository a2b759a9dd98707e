//! The Heisenberg group at infinity: Cygan metric, chains, R-circles, Heisenberg
//! spheres, real involutions and the Cartan angular invariant.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, Result};
use crate::hermitian::{herm, horo_to_projective, HoroPoint};
use crate::isometry::Isometry;
use crate::C64;

/// A point `(ξ, v)` of the Heisenberg group.
pub type HeisPoint = (C64, f64);

/// Group law `(ξ₀, v₀)·(ξ, v) = (ξ₀ + ξ, v₀ + v + 2 Im(ξ₀ ξ̄))`.
pub fn heis_mul(a: HeisPoint, b: HeisPoint) -> HeisPoint {
    (a.0 + b.0, a.1 + b.1 + 2.0 * (a.0 * b.0.conj()).im)
}

pub fn heis_inverse(a: HeisPoint) -> HeisPoint {
    (-a.0, -a.1)
}

fn finite(p: &HoroPoint) -> Result<(C64, f64, f64)> {
    p.coords()
        .ok_or_else(|| crate::Error::InvalidInput("Cygan metric is undefined at infinity".into()))
}

/// `‖(ξ, v, u)‖_c = ||ξ|² + u − iv|^{1/2}`.
pub fn cygan_norm(p: &HoroPoint) -> Result<f64> {
    let (xi, v, u) = finite(p)?;
    Ok(C64::new(xi.norm_sqr() + u, -v).norm().sqrt())
}

/// Extended Cygan metric, invariant under Heisenberg translations and rotations.
pub fn cygan_distance(p: &HoroPoint, q: &HoroPoint) -> Result<f64> {
    let (xi, v, u) = finite(p)?;
    let (xj, w, s) = finite(q)?;
    let re = (xi - xj).norm_sqr() + (u - s).abs();
    let im = v - w + 2.0 * (xi * xj.conj()).im;
    Ok(C64::new(re, -im).norm().sqrt())
}

/// Point of the standard R-circle at parameter `s ∈ [0, 2π)`.
///
/// The curve is traced as two arcs joined at the poles `(0, ±1)`; `s = π/2`
/// gives `(i, 0)`.
fn standard_r_circle_point(s: f64) -> HeisPoint {
    let s = s.rem_euclid(2.0 * PI);
    let (psi, sign) = if s < PI {
        (s - FRAC_PI_2, 1.0)
    } else {
        (FRAC_PI_2 - (s - PI), -1.0)
    };
    // r² + iv = e^{iψ} = −e^{−2iθ}
    let r = psi.cos().max(0.0).sqrt();
    let theta = 0.5 * (PI - psi);
    (C64::from_polar(sign * r, theta), psi.sin())
}

/// Boundary of a totally real plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RCircle {
    /// Horizontal line through `point` tangent to the contact plane, with unit
    /// `direction` in the ξ-plane.
    InfiniteLine { point: HeisPoint, direction: C64 },
    /// Image of the standard R-circle under `T_center ∘ δ_radius ∘ U_phase`.
    Finite {
        center: HeisPoint,
        radius: f64,
        phase: f64,
    },
}

impl RCircle {
    /// The R-circle `R × {0} ∪ {∞}`.
    pub fn real_line() -> Self {
        RCircle::InfiniteLine {
            point: (C64::new(0.0, 0.0), 0.0),
            direction: C64::new(1.0, 0.0),
        }
    }

    /// The standard finite R-circle on the unit sphere, through `(±i, 0)` and `(0, ±1)`.
    pub fn standard() -> Self {
        RCircle::Finite {
            center: (C64::new(0.0, 0.0), 0.0),
            radius: 1.0,
            phase: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RCircle::InfiniteLine { point, direction } => {
                if (direction.norm() - 1.0).abs() > 1e-9
                    || !point.0.re.is_finite()
                    || !point.1.is_finite()
                {
                    return invalid("line direction must be a unit complex number");
                }
            }
            RCircle::Finite {
                radius,
                phase,
                center,
            } => {
                if !(radius > 0.0)
                    || !radius.is_finite()
                    || !phase.is_finite()
                    || !center.1.is_finite()
                {
                    return invalid(format!("R-circle radius must be positive, got {radius}"));
                }
            }
        }
        Ok(())
    }

    /// Similarity carrying the seed circle (`R × {0}` or the standard circle) onto this one.
    pub fn normalizing_map(&self) -> Result<Isometry> {
        self.validate()?;
        Ok(match *self {
            RCircle::InfiniteLine { point, direction } => {
                Isometry::heisenberg_translation(point.0, point.1)
                    .compose(&Isometry::unitary_rotation(direction.arg()))
            }
            RCircle::Finite {
                center,
                radius,
                phase,
            } => Isometry::similarity(center, radius, phase)?,
        })
    }

    /// `n` boundary points evenly spread in the seed parameter. Lines are sampled
    /// over `x ∈ [−extent, extent]`.
    pub fn sample(&self, n: usize, extent: f64) -> Result<Vec<HoroPoint>> {
        let h = self.normalizing_map()?;
        (0..n)
            .map(|k| {
                let seed = match self {
                    RCircle::InfiniteLine { .. } => {
                        let x = if n > 1 {
                            -extent + 2.0 * extent * k as f64 / (n - 1) as f64
                        } else {
                            0.0
                        };
                        HoroPoint::boundary(C64::new(x, 0.0), 0.0)
                    }
                    RCircle::Finite { .. } => {
                        let (xi, v) = standard_r_circle_point(2.0 * PI * k as f64 / n as f64);
                        HoroPoint::boundary(xi, v)
                    }
                };
                h.apply_horo(&seed)
            })
            .collect()
    }

    /// Residual of the defining equation after pulling back to the seed circle.
    pub fn residual(&self, p: &HoroPoint) -> Result<f64> {
        let h = self.normalizing_map()?;
        let q = h.inverse().apply_horo(p)?;
        let Some((xi, v, _)) = q.coords() else {
            return Ok(match self {
                RCircle::InfiniteLine { .. } => 0.0,
                RCircle::Finite { .. } => f64::INFINITY,
            });
        };
        Ok(match self {
            RCircle::InfiniteLine { .. } => xi.im.abs().max(v.abs()),
            RCircle::Finite { .. } => {
                // r² + iv = −e^{−2iθ}, multiplied through by ξ, plus the sphere equation
                let w = C64::new(xi.norm_sqr(), v);
                let a = (w * xi + xi.conj()).norm();
                let b = (xi.norm_sqr().powi(2) + v * v - 1.0).abs();
                a.max(b)
            }
        })
    }
}

/// Membership of a boundary point in an R-circle, tested on the normalised equation.
pub fn on_r_circle(p: &HoroPoint, c: &RCircle, tol: f64) -> bool {
    if !p.is_boundary() {
        return false;
    }
    matches!(c.residual(p), Ok(r) if r <= tol)
}

/// Antiholomorphic involution whose boundary fixed set is `c`.
pub fn real_involution(c: &RCircle) -> Result<Isometry> {
    let h = c.normalizing_map()?;
    let seed = match c {
        RCircle::InfiniteLine { .. } => Isometry::conjugation(),
        RCircle::Finite { .. } => {
            let mut m = crate::isometry::Mat3::identity();
            m[(2, 2)] = C64::new(-1.0, 0.0);
            Isometry::new(m, true)?
        }
    };
    Ok(seed.conjugate_by(&h))
}

/// Boundary of a complex geodesic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Chain {
    /// `{ξ₀} × R ∪ {∞}`.
    Vertical(C64),
    /// Image of the circle `{|ξ| = 1, v = 0}` under `T_center ∘ δ_radius`.
    Finite { center: HeisPoint, radius: f64 },
}

impl Chain {
    fn normalizing_map(&self) -> Result<Isometry> {
        match *self {
            Chain::Vertical(xi0) => Ok(Isometry::heisenberg_translation(xi0, 0.0)),
            Chain::Finite { center, radius } => {
                if !(radius > 0.0) {
                    return invalid(format!("chain radius must be positive, got {radius}"));
                }
                Isometry::similarity(center, radius, 0.0)
            }
        }
    }

    pub fn sample(&self, n: usize, extent: f64) -> Result<Vec<HoroPoint>> {
        let h = self.normalizing_map()?;
        (0..n)
            .map(|k| {
                let seed = match self {
                    Chain::Vertical(_) => {
                        let v = if n > 1 {
                            -extent + 2.0 * extent * k as f64 / (n - 1) as f64
                        } else {
                            0.0
                        };
                        HoroPoint::boundary(C64::new(0.0, 0.0), v)
                    }
                    Chain::Finite { .. } => HoroPoint::boundary(
                        C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64),
                        0.0,
                    ),
                };
                h.apply_horo(&seed)
            })
            .collect()
    }

    pub fn contains(&self, p: &HoroPoint, tol: f64) -> Result<bool> {
        let q = self.normalizing_map()?.inverse().apply_horo(p)?;
        Ok(match (self, q.coords()) {
            (Chain::Vertical(_), None) => true,
            (Chain::Finite { .. }, None) => false,
            (Chain::Vertical(_), Some((xi, _, u))) => u == 0.0 && xi.norm() <= tol,
            (Chain::Finite { .. }, Some((xi, v, u))) => {
                u == 0.0 && (xi.norm() - 1.0).abs() <= tol && v.abs() <= tol
            }
        })
    }
}

/// Cygan sphere `S_c(center, radius)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeisSphere {
    pub center: HeisPoint,
    pub radius: f64,
}

impl HeisSphere {
    pub fn new(center: HeisPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return invalid(format!("sphere radius must be positive, got {radius}"));
        }
        Ok(Self { center, radius })
    }

    fn center_point(&self) -> HoroPoint {
        HoroPoint::boundary(self.center.0, self.center.1)
    }

    /// The poles `(ξ_c, v_c ± r²)`.
    pub fn poles(&self) -> [HoroPoint; 2] {
        let r2 = self.radius * self.radius;
        [
            HoroPoint::boundary(self.center.0, self.center.1 + r2),
            HoroPoint::boundary(self.center.0, self.center.1 - r2),
        ]
    }

    /// Signed `ρ_c(center, p) − radius`.
    pub fn level(&self, p: &HoroPoint) -> Result<f64> {
        Ok(cygan_distance(&self.center_point(), p)? - self.radius)
    }

    pub fn contains(&self, p: &HoroPoint, tol: f64) -> bool {
        matches!(self.level(p), Ok(d) if d.abs() <= tol)
    }

    /// Point at latitude `ψ ∈ [−π/2, π/2]` and longitude `θ`.
    pub fn point(&self, psi: f64, theta: f64) -> HoroPoint {
        let r = self.radius;
        let xi = C64::from_polar(r * psi.cos().max(0.0).sqrt(), theta);
        let seed = (xi, r * r * psi.sin());
        let (xi, v) = heis_mul(self.center, seed);
        HoroPoint::boundary(xi, v)
    }
}

/// Relative position of two Cygan spheres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tangency {
    Disjoint,
    Tangent(HoroPoint),
    Overlapping,
}

/// Classifies two spheres by the range of `ρ_c(center₁, ·)` over the second sphere.
///
/// The spheres touch when an extremum of that range equals the first radius.
pub fn sphere_tangency(s1: &HeisSphere, s2: &HeisSphere, tol: f64) -> Tangency {
    if cygan_distance(&s1.center_point(), &s2.center_point()).unwrap_or(f64::INFINITY) <= tol
        && (s1.radius - s2.radius).abs() <= tol
    {
        return Tangency::Overlapping;
    }
    let f = |psi: f64, theta: f64| {
        cygan_distance(&s1.center_point(), &s2.point(psi, theta)).unwrap_or(f64::NAN)
    };
    let (np, nt) = (64usize, 96usize);
    let mut best_min = (f64::INFINITY, 0.0, 0.0);
    let mut best_max = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=np {
        let psi = -FRAC_PI_2 + PI * i as f64 / np as f64;
        for j in 0..nt {
            let theta = 2.0 * PI * j as f64 / nt as f64;
            let val = f(psi, theta);
            if val < best_min.0 {
                best_min = (val, psi, theta);
            }
            if val > best_max.0 {
                best_max = (val, psi, theta);
            }
        }
    }
    let refine = |start: (f64, f64, f64), sign: f64| {
        let (mut val, mut psi, mut theta) = start;
        let mut step = PI / np as f64;
        while step > 1e-13 {
            let mut moved = false;
            for (dp, dt) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                let p2 = (psi + dp * step).clamp(-FRAC_PI_2, FRAC_PI_2);
                let t2 = theta + dt * step;
                let v2 = f(p2, t2);
                if sign * v2 < sign * val {
                    (val, psi, theta) = (v2, p2, t2);
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        (val, psi, theta)
    };
    let lo = refine(best_min, 1.0);
    let hi = refine(best_max, -1.0);
    if (lo.0 - s1.radius).abs() <= tol {
        return Tangency::Tangent(s2.point(lo.1, lo.2));
    }
    if (hi.0 - s1.radius).abs() <= tol {
        return Tangency::Tangent(s2.point(hi.1, hi.2));
    }
    if lo.0 < s1.radius && s1.radius < hi.0 {
        Tangency::Overlapping
    } else {
        Tangency::Disjoint
    }
}

/// Cartan angular invariant `arg(−⟨z₀,z₁⟩⟨z₁,z₂⟩⟨z₂,z₀⟩)` of three boundary points.
pub fn cartan_invariant(x0: &HoroPoint, x1: &HoroPoint, x2: &HoroPoint) -> Result<f64> {
    let pts = [x0, x1, x2];
    if pts.iter().any(|p| !p.is_boundary()) {
        return invalid("Cartan invariant needs boundary points");
    }
    let z: Vec<_> = pts.iter().map(|p| horo_to_projective(p)).collect();
    let mut prod = C64::new(-1.0, 0.0);
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        let h = herm(&z[a], &z[b]);
        let scale = (z[a].euclid_norm_sqr() * z[b].euclid_norm_sqr()).sqrt();
        if h.norm() <= 1e-12 * scale {
            return invalid("Cartan invariant needs three distinct points");
        }
        prod *= h / h.norm();
    }
    Ok(prod.arg().clamp(-FRAC_PI_2, FRAC_PI_2))
}
