//! The Hermitian space C^{2,1} and the models of the complex hyperbolic plane.
//!
//! Points of H²_C are negative lines for the form
//! `⟨z, w⟩ = z₁w̄₁ + z₂w̄₂ − z₃w̄₃`; null lines form the boundary sphere. The
//! horospherical coordinates `(ξ, v, u)` based at the null line of
//! `(0, −1, 1)` identify the closure minus that point with `C × R × [0, ∞)`.

use nalgebra::Vector3;

use crate::error::{invalid, Result};
use crate::C64;

/// Relative tolerance for deciding that a vector is null.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Homogeneous coordinates in C^{2,1}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectiveVector(pub Vector3<C64>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    Interior,
    Boundary,
    Exterior,
}

impl ProjectiveVector {
    pub fn new(z1: C64, z2: C64, z3: C64) -> Self {
        Self(Vector3::new(z1, z2, z3))
    }

    pub fn from_real(z1: f64, z2: f64, z3: f64) -> Self {
        Self::new(z1.into(), z2.into(), z3.into())
    }

    /// Null vector representing the point at infinity.
    pub fn infinity() -> Self {
        Self::from_real(0.0, -1.0, 1.0)
    }

    /// Positive-definite squared norm `|z₁|² + |z₂|² + |z₃|²`.
    pub fn euclid_norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.euclid_norm_sqr() == 0.0
    }

    /// Rescales so the largest-modulus component equals 1.
    pub fn normalized(&self) -> Self {
        let mut best = 0;
        for i in 1..3 {
            if self.0[i].norm() > self.0[best].norm() {
                best = i;
            }
        }
        let pivot = self.0[best];
        if pivot.norm() == 0.0 {
            return *self;
        }
        Self(self.0.map(|c| c / pivot))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|c| c.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0 * s)
    }
}

/// The Hermitian form of signature (2,1).
pub fn herm(z: &ProjectiveVector, w: &ProjectiveVector) -> C64 {
    z.0[0] * w.0[0].conj() + z.0[1] * w.0[1].conj() - z.0[2] * w.0[2].conj()
}

pub fn point_class(z: &ProjectiveVector) -> Result<PointClass> {
    let n = z.euclid_norm_sqr();
    if n == 0.0 || !n.is_finite() {
        return invalid("zero or non-finite vector has no projective class");
    }
    let q = herm(z, z).re;
    Ok(if q < -BOUNDARY_TOL * n {
        PointClass::Interior
    } else if q.abs() <= BOUNDARY_TOL * n {
        PointClass::Boundary
    } else {
        PointClass::Exterior
    })
}

/// Horospherical coordinates with respect to the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HoroPoint {
    Finite { xi: C64, v: f64, u: f64 },
    Infinity,
}

impl HoroPoint {
    /// Finite point; `u` must be nonnegative.
    pub fn new(xi: C64, v: f64, u: f64) -> Result<Self> {
        if !(u >= 0.0)
            || !xi.re.is_finite()
            || !xi.im.is_finite()
            || !v.is_finite()
            || !u.is_finite()
        {
            return invalid(format!("bad horospherical coordinates ({xi}, {v}, {u})"));
        }
        Ok(HoroPoint::Finite { xi, v, u })
    }

    /// Boundary point `(ξ, v)` of the Heisenberg group.
    pub fn boundary(xi: C64, v: f64) -> Self {
        HoroPoint::Finite { xi, v, u: 0.0 }
    }

    pub fn origin() -> Self {
        Self::boundary(C64::new(0.0, 0.0), 0.0)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, HoroPoint::Infinity)
    }

    pub fn is_boundary(&self) -> bool {
        match self {
            HoroPoint::Infinity => true,
            HoroPoint::Finite { u, .. } => *u == 0.0,
        }
    }

    /// `(ξ, v, u)` for finite points.
    pub fn coords(&self) -> Option<(C64, f64, f64)> {
        match *self {
            HoroPoint::Finite { xi, v, u } => Some((xi, v, u)),
            HoroPoint::Infinity => None,
        }
    }
}

pub fn horo_to_projective(p: &HoroPoint) -> ProjectiveVector {
    match *p {
        HoroPoint::Infinity => ProjectiveVector::infinity(),
        HoroPoint::Finite { xi, v, u } => {
            // q = |ξ|² + u − iv
            let q = C64::new(xi.norm_sqr() + u, -v);
            ProjectiveVector::new(
                xi,
                (C64::new(1.0, 0.0) - q) * 0.5,
                (C64::new(1.0, 0.0) + q) * 0.5,
            )
        }
    }
}

pub fn projective_to_horo(z: &ProjectiveVector) -> Result<HoroPoint> {
    let class = point_class(z)?;
    if class == PointClass::Exterior {
        return invalid("exterior vector has no horospherical coordinates");
    }
    let scale = z.euclid_norm_sqr().sqrt();
    let a = z.0[1] + z.0[2];
    if a.norm() <= 1e-12 * scale {
        return Ok(HoroPoint::Infinity);
    }
    let xi = z.0[0] / a;
    let b = (z.0[2] - z.0[1]) / a;
    let v = -b.im;
    let u = if class == PointClass::Boundary {
        0.0
    } else {
        (b.re - xi.norm_sqr()).max(0.0)
    };
    Ok(HoroPoint::Finite { xi, v, u })
}

/// Horospherical coordinates of a vector known to be null, without classifying it.
///
/// Used for eigenvectors and images of boundary points, where rounding can push
/// the form value slightly past the classification tolerance.
pub fn null_to_horo(z: &ProjectiveVector) -> HoroPoint {
    let scale = z.euclid_norm_sqr().sqrt();
    let a = z.0[1] + z.0[2];
    if a.norm() <= 1e-12 * scale {
        return HoroPoint::Infinity;
    }
    let xi = z.0[0] / a;
    let b = (z.0[2] - z.0[1]) / a;
    HoroPoint::Finite {
        xi,
        v: -b.im,
        u: 0.0,
    }
}

/// Horospherical coordinates of a negative vector with known `−⟨z,z⟩ = q`,
/// so that `u = q / |z₂ + z₃|²` does not suffer cancellation.
pub(crate) fn negative_to_horo(z: &ProjectiveVector, q: f64) -> Result<HoroPoint> {
    let a = z.0[1] + z.0[2];
    let u = q / a.norm_sqr();
    if !(u > 0.0) || !u.is_finite() {
        return invalid("interior point lost to rounding");
    }
    let xi = z.0[0] / a;
    let b = (z.0[2] - z.0[1]) / a;
    Ok(HoroPoint::Finite { xi, v: -b.im, u })
}

/// Bergman distance, normalised so that `cosh²(d/2) = ⟨z,w⟩⟨w,z⟩ / (⟨z,z⟩⟨w,w⟩)`.
pub fn bergman_distance(z: &ProjectiveVector, w: &ProjectiveVector) -> Result<f64> {
    if point_class(z)? != PointClass::Interior || point_class(w)? != PointClass::Interior {
        return invalid("Bergman distance needs two interior points");
    }
    let c = herm(z, w).norm_sqr() / (herm(z, z).re * herm(w, w).re);
    Ok(2.0 * c.max(1.0).sqrt().acosh())
}

/// Bergman distance between interior points given in horospherical coordinates.
///
/// With `A = |ξ−η|²` and `B = v − w + 2 Im(ξη̄)`,
/// `sinh²(d/2) = ((u−s)² + A² + 2A(u+s) + B²) / 4us`, a sum of nonnegative
/// terms that keeps full precision for nearby and for far apart points.
pub fn bergman_distance_horo(p: &HoroPoint, q: &HoroPoint) -> Result<f64> {
    let (Some((xi, v, u)), Some((eta, w, s))) = (p.coords(), q.coords()) else {
        return invalid("Bergman distance needs two interior points");
    };
    if !(u > 0.0 && s > 0.0) {
        return invalid("Bergman distance needs two interior points");
    }
    let a = (xi - eta).norm_sqr();
    let b = v - w + 2.0 * (xi * eta.conj()).im;
    let sh2 = ((u - s).powi(2) + a * a + 2.0 * a * (u + s) + b * b) / (4.0 * u * s);
    Ok(2.0 * sh2.sqrt().asinh())
}

/// Path metric `d₀` on a horosphere, from `x = (0, 0, u)` to `x' = (ξ, v, u)`.
pub fn horospherical_path_metric(x: &HoroPoint, x2: &HoroPoint) -> Result<f64> {
    let (Some((xi0, v0, u0)), Some((xi, v, u))) = (x.coords(), x2.coords()) else {
        return invalid("path metric needs finite points");
    };
    if u0 <= 0.0 || u <= 0.0 {
        return invalid("path metric needs points strictly inside");
    }
    if (u - u0).abs() > 1e-12 * u0.max(u) {
        return invalid(format!("mismatched heights {u0} and {u}"));
    }
    if xi0.norm() != 0.0 || v0 != 0.0 {
        return invalid("first point must sit at (0, 0, u)");
    }
    Ok((xi.norm_sqr() / u + v * v / (4.0 * u * u)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn form_on_basis_vectors() {
        let e3 = ProjectiveVector::from_real(0.0, 0.0, 1.0);
        assert_eq!(herm(&e3, &e3), c(-1.0, 0.0));
        let null = ProjectiveVector::from_real(1.0, 0.0, 1.0);
        assert_eq!(herm(&null, &null), c(0.0, 0.0));
        let z = ProjectiveVector::from_real(1.0, 2.0, 0.0);
        let w = ProjectiveVector::from_real(0.0, 1.0, 1.0);
        assert_eq!(herm(&z, &w), c(2.0, 0.0));
    }

    #[test]
    fn classes() {
        let cls = |a, b, c| point_class(&ProjectiveVector::from_real(a, b, c)).unwrap();
        assert_eq!(cls(0.0, 0.0, 1.0), PointClass::Interior);
        assert_eq!(cls(1.0, 0.0, 1.0), PointClass::Boundary);
        assert_eq!(cls(1.0, 0.0, 0.0), PointClass::Exterior);
        assert!(point_class(&ProjectiveVector::from_real(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn horospherical_display_values() {
        let o = horo_to_projective(&HoroPoint::origin());
        assert_eq!(o, ProjectiveVector::from_real(0.0, 0.5, 0.5));
        assert_eq!(
            horo_to_projective(&HoroPoint::Infinity),
            ProjectiveVector::from_real(0.0, -1.0, 1.0)
        );
        let base = horo_to_projective(&HoroPoint::new(c(0.0, 0.0), 0.0, 1.0).unwrap());
        assert_eq!(base, ProjectiveVector::from_real(0.0, 0.0, 1.0));
    }

    #[test]
    fn inverse_coordinates() {
        let p = projective_to_horo(&ProjectiveVector::from_real(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(
            p,
            HoroPoint::Finite {
                xi: c(0.0, 0.0),
                v: 0.0,
                u: 1.0
            }
        );
        let inf = projective_to_horo(&ProjectiveVector::from_real(0.0, -1.0, 1.0)).unwrap();
        assert!(inf.is_infinity());
        let q = projective_to_horo(&ProjectiveVector::from_real(1.0, -0.5, 1.5)).unwrap();
        assert_eq!(
            q,
            HoroPoint::Finite {
                xi: c(1.0, 0.0),
                v: 0.0,
                u: 1.0
            }
        );
        // forward oracle for the same candidate
        let back = horo_to_projective(&q);
        assert_eq!(back, ProjectiveVector::from_real(1.0, -0.5, 1.5));
        assert!(projective_to_horo(&ProjectiveVector::from_real(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn distance_values_on_a_horosphere() {
        let x = HoroPoint::new(c(0.0, 0.0), 0.0, 1.0).unwrap();
        let y = HoroPoint::new(c(0.0, 0.0), 4.0, 1.0).unwrap();
        let d = bergman_distance_horo(&x, &y).unwrap();
        assert!((d - 2.0 * 5f64.sqrt().acosh()).abs() < 1e-12);
        let y = HoroPoint::new(c(1.0, 0.0), 0.0, 1.0).unwrap();
        let d = bergman_distance_horo(&x, &y).unwrap();
        assert!(((d / 2.0).cosh().powi(2) - 9.0 / 4.0).abs() < 1e-12);
        assert_eq!(bergman_distance_horo(&x, &x).unwrap(), 0.0);
        assert!(bergman_distance_horo(&x, &HoroPoint::origin()).is_err());
    }

    #[test]
    fn path_metric_values() {
        let x = HoroPoint::new(c(0.0, 0.0), 0.0, 1.0).unwrap();
        let at = |xi, v| HoroPoint::new(xi, v, 1.0).unwrap();
        assert_eq!(
            horospherical_path_metric(&x, &at(c(0.0, 0.0), 0.0)).unwrap(),
            0.0
        );
        assert_eq!(
            horospherical_path_metric(&x, &at(c(0.0, 0.0), 4.0)).unwrap(),
            2.0
        );
        assert_eq!(
            horospherical_path_metric(&x, &at(c(1.0, 0.0), 0.0)).unwrap(),
            1.0
        );
        let off = HoroPoint::new(c(1.0, 0.0), 0.0, 2.0).unwrap();
        assert!(horospherical_path_metric(&x, &off).is_err());
    }

    #[test]
    fn normalization_puts_unit_at_largest_entry() {
        let z = ProjectiveVector::new(c(0.1, 0.0), c(0.0, 2.0), c(1.0, 1.0)).normalized();
        assert_eq!(z.0[1], c(1.0, 0.0));
    }
}
