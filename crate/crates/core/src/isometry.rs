//! Isometries of H²_C as 3×3 complex matrices with an antiholomorphy flag.
//!
//! A holomorphic isometry acts by `z ↦ m·z`; an antiholomorphic one by
//! `z ↦ m·z̄`. Matrices are stored up to positive scale with `|det m| = 1`, and
//! compared up to a unit phase.

use std::f64::consts::PI;

use nalgebra::Matrix3;

use crate::error::{invalid, Result};
use crate::hermitian::{
    herm, horo_to_projective, negative_to_horo, null_to_horo, point_class, HoroPoint, PointClass,
    ProjectiveVector,
};
use crate::C64;

pub type Mat3 = Matrix3<C64>;

/// Tolerance on `m*Jm = λJ` after normalisation.
pub const FORM_TOL: f64 = 1e-9;
/// Relative deviation of an eigenvalue modulus from 1 that marks a loxodromic.
pub const LOX_TOL: f64 = 1e-8;
/// Relative residual below which a minimal-polynomial test is considered zero.
pub const RANK_TOL: f64 = 1e-7;
/// Eigenvalues closer than this (relative) are treated as one cluster.
const CLUSTER_TOL: f64 = 1e-4;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const RENORM_TOL: f64 = 1e-9;

fn j_form() -> Mat3 {
    Mat3::from_diagonal(&nalgebra::Vector3::new(
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(-1.0, 0.0),
    ))
}

fn conj_mat(m: &Mat3) -> Mat3 {
    m.map(|z| z.conj())
}

fn frob(m: &Mat3) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    m: Mat3,
    antiholo: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IsometryKind {
    Elliptic,
    Parabolic,
    Loxodromic,
}

impl std::fmt::Display for IsometryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IsometryKind::Elliptic => "elliptic",
            IsometryKind::Parabolic => "parabolic",
            IsometryKind::Loxodromic => "loxodromic",
        })
    }
}

/// Result of [`Isometry::classify`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub kind: IsometryKind,
    pub identity: bool,
    /// For antiholomorphic input the kind is that of the square.
    pub antiholomorphic: bool,
    /// False when the decision sat within two orders of magnitude of a tolerance.
    pub confident: bool,
}

/// Normal form of a parabolic fixing infinity: `(ξ, v) ↦ T_{(ξ₀,v₀)}(e^{iθ}ξ, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParabolicNormalForm {
    pub rotation_angle: f64,
    pub translation: (C64, f64),
}

struct Spectrum {
    /// det-normalised matrix (det = 1)
    ms: Mat3,
    eig: [C64; 3],
}

impl Isometry {
    /// Validates form preservation and normalises to `|det| = 1`.
    pub fn new(m: Mat3, antiholo: bool) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("non-finite matrix entry");
        }
        let g = Self::from_raw(m, antiholo);
        let defect = g.form_defect();
        if !(defect <= FORM_TOL) {
            return invalid(format!(
                "matrix does not preserve the Hermitian form (defect {defect:.3e})"
            ));
        }
        Ok(g)
    }

    /// Normalises without validating.
    pub(crate) fn from_raw(m: Mat3, antiholo: bool) -> Self {
        // the computed determinant of a product carries rounding of order
        // eps·‖m‖³, so near-unit values are left alone
        let d = m.determinant().norm();
        let m = if d > 0.0 && (d - 1.0).abs() > RENORM_TOL {
            m / c(d.cbrt(), 0.0)
        } else {
            m
        };
        Self { m, antiholo }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn is_antiholomorphic(&self) -> bool {
        self.antiholo
    }

    pub fn identity() -> Self {
        Self {
            m: Mat3::identity(),
            antiholo: false,
        }
    }

    /// Complex conjugation `z ↦ z̄`; fixes the real circle `R × {0}` pointwise.
    pub fn conjugation() -> Self {
        Self {
            m: Mat3::identity(),
            antiholo: true,
        }
    }

    /// Left translation by `(ξ, v)` in the Heisenberg group.
    pub fn heisenberg_translation(xi: C64, v: f64) -> Self {
        let q = c(xi.norm_sqr(), -v) * 0.5;
        let one = c(1.0, 0.0);
        let m = Mat3::new(
            one,
            xi,
            xi, //
            -xi.conj(),
            one - q,
            -q, //
            xi.conj(),
            q,
            one + q,
        );
        Self { m, antiholo: false }
    }

    /// Rotation `(ξ, v) ↦ (e^{iη}ξ, v)` about the vertical chain.
    pub fn unitary_rotation(eta: f64) -> Self {
        let mut m = Mat3::identity();
        m[(0, 0)] = C64::from_polar(1.0, eta);
        Self { m, antiholo: false }
    }

    /// Heisenberg inversion, swapping the origin and infinity.
    pub fn heisenberg_inversion() -> Self {
        let m = Mat3::from_diagonal(&nalgebra::Vector3::new(
            c(-1.0, 0.0),
            c(1.0, 0.0),
            c(-1.0, 0.0),
        ));
        Self { m, antiholo: false }
    }

    /// Loxodromic with axis `(0, ∞)`: `(ξ, v, u) ↦ (rξ, r²v, r²u)`. `r = 1` gives the identity.
    pub fn dilation(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return invalid(format!("dilation factor must be positive, got {r}"));
        }
        if r == 1.0 {
            return Ok(Self::identity());
        }
        let ch = c(0.5 * (r + 1.0 / r), 0.0);
        let sh = c(0.5 * (1.0 / r - r), 0.0);
        let zero = c(0.0, 0.0);
        let m = Mat3::new(
            c(1.0, 0.0),
            zero,
            zero, //
            zero,
            ch,
            sh, //
            zero,
            sh,
            ch,
        );
        Ok(Self { m, antiholo: false })
    }

    /// Heisenberg similarity `T_center ∘ δ_scale ∘ U_phase`.
    pub fn similarity(center: (C64, f64), scale: f64, phase: f64) -> Result<Self> {
        Ok(Self::heisenberg_translation(center.0, center.1)
            .compose(&Self::dilation(scale)?)
            .compose(&Self::unitary_rotation(phase)))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let rhs = if self.antiholo {
            conj_mat(&other.m)
        } else {
            other.m
        };
        Self::from_raw(self.m * rhs, self.antiholo ^ other.antiholo)
    }

    /// `m⁻¹ = J m* J / λ`, exact up to the division by `λ = |det m|^{2/3}`.
    pub fn inverse(&self) -> Isometry {
        let j = j_form();
        let mut inv = j * self.m.adjoint() * j;
        let lambda = self.m.determinant().norm().powf(2.0 / 3.0);
        if (lambda - 1.0).abs() > RENORM_TOL {
            inv /= c(lambda, 0.0);
        }
        let inv = if self.antiholo { conj_mat(&inv) } else { inv };
        Self::from_raw(inv, self.antiholo)
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> Isometry {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = Isometry::identity();
        let mut sq = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&sq);
            }
            sq = sq.compose(&sq);
            k >>= 1;
        }
        acc
    }

    /// `h ∘ self ∘ h⁻¹`.
    pub fn conjugate_by(&self, h: &Isometry) -> Isometry {
        h.compose(self).compose(&h.inverse())
    }

    pub fn apply(&self, z: &ProjectiveVector) -> ProjectiveVector {
        let z = if self.antiholo { z.conj() } else { *z };
        ProjectiveVector(self.m * z.0)
    }

    /// Action in horospherical coordinates; boundary points stay on the boundary.
    pub fn apply_horo(&self, p: &HoroPoint) -> Result<HoroPoint> {
        let w = self.apply(&horo_to_projective(p));
        if p.is_boundary() {
            Ok(null_to_horo(&w))
        } else {
            // the lift of p has ⟨z,z⟩ = −u and m scales the form by |det m|^{2/3}
            let (_, _, u) = p.coords().expect("finite interior point");
            negative_to_horo(&w, u * self.m.determinant().norm().powf(2.0 / 3.0))
        }
    }

    /// Backward error `‖m*Jm − λJ‖ / ‖m‖²` of the form identity, with
    /// `λ = |det m|^{2/3}`; infinite for singular input.
    pub fn form_defect(&self) -> f64 {
        let j = j_form();
        let g = self.m.adjoint() * j * self.m;
        let lambda = self.m.determinant().norm().powf(2.0 / 3.0);
        if !(lambda > 0.0) {
            return f64::INFINITY;
        }
        let n = frob(&self.m);
        frob(&(g - j * c(lambda, 0.0))) / (n * n)
    }

    /// Distance between projective classes, `min_φ ‖Â − e^{iφ}B̂‖` for Frobenius-normalised
    /// matrices. Infinite when the antiholomorphy flags differ.
    pub fn projective_distance(&self, other: &Isometry) -> f64 {
        if self.antiholo != other.antiholo {
            return f64::INFINITY;
        }
        let na = frob(&self.m);
        let nb = frob(&other.m);
        let inner: C64 = self
            .m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| a * b.conj())
            .sum();
        let phase = if inner.norm() > 0.0 {
            inner / inner.norm()
        } else {
            c(1.0, 0.0)
        };
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a / na - b * phase / nb).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// A phase-invariant scalar used to bucket candidate duplicates.
    pub(crate) fn dedup_feature(&self) -> f64 {
        const W: [(f64, f64); 9] = [
            (0.31, 0.77),
            (-0.52, 0.19),
            (0.88, -0.41),
            (0.13, 0.64),
            (-0.71, -0.28),
            (0.45, 0.93),
            (0.27, -0.86),
            (-0.39, 0.58),
            (0.66, 0.11),
        ];
        let l: C64 = self
            .m
            .iter()
            .zip(W.iter())
            .map(|(z, &(a, b))| z * c(a, b))
            .sum();
        l.norm() / frob(&self.m)
    }

    /// True when the matrix is real up to a unit phase (an element of PO(2,1)).
    pub fn is_real(&self, tol: f64) -> bool {
        let (mut best, mut arg) = (0.0, 0.0);
        for z in self.m.iter() {
            if z.norm() > best {
                best = z.norm();
                arg = z.arg();
            }
        }
        let rot = C64::from_polar(1.0, -arg);
        self.m.iter().all(|z| (z * rot).im.abs() <= tol * best)
    }

    fn spectrum(&self) -> Spectrum {
        let m = if self.antiholo {
            self.m * conj_mat(&self.m)
        } else {
            self.m
        };
        let det = m.determinant();
        let ms = m / det.powf(1.0 / 3.0);
        Spectrum {
            ms,
            eig: eigenvalues(&ms),
        }
    }

    /// Eigenvalues of the det-normalised matrix (of the square when antiholomorphic).
    pub fn eigenvalues(&self) -> [C64; 3] {
        self.spectrum().eig
    }

    /// Elliptic / parabolic / loxodromic trichotomy. Antiholomorphic elements are
    /// classified through their square.
    pub fn classify(&self) -> Classification {
        self.classify_with(LOX_TOL)
    }

    pub fn classify_with(&self, lox_tol: f64) -> Classification {
        let sp = self.spectrum();
        let mk = |kind, identity, confident| Classification {
            kind,
            identity,
            antiholomorphic: self.antiholo,
            confident,
        };
        let scale = frob(&sp.ms);
        match cluster(&sp.eig) {
            Clusters::Distinct => {
                let dev = sp
                    .eig
                    .iter()
                    .map(|z| (z.norm() - 1.0).abs())
                    .fold(0.0, f64::max);
                if dev > lox_tol {
                    mk(IsometryKind::Loxodromic, false, dev > 100.0 * lox_tol)
                } else {
                    mk(IsometryKind::Elliptic, false, dev < 0.01 * lox_tol)
                }
            }
            Clusters::Triple(lambda) => {
                let n = sp.ms - Mat3::identity() * lambda;
                let r = frob(&n) / scale;
                let confident = r > 100.0 * RANK_TOL || r < 0.01 * RANK_TOL;
                if r <= RANK_TOL {
                    mk(IsometryKind::Elliptic, true, confident)
                } else {
                    mk(IsometryKind::Parabolic, false, confident)
                }
            }
            Clusters::Double(lambda, mu) => {
                let p = (sp.ms - Mat3::identity() * lambda) * (sp.ms - Mat3::identity() * mu);
                let r = frob(&p) / (scale * scale);
                let confident = r > 100.0 * RANK_TOL || r < 0.01 * RANK_TOL;
                if r <= RANK_TOL {
                    mk(IsometryKind::Elliptic, false, confident)
                } else {
                    mk(IsometryKind::Parabolic, false, confident)
                }
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        !self.antiholo && self.projective_distance(&Isometry::identity()) < 1e-9
    }

    /// Boundary fixed points: two for loxodromics (attracting first), one for
    /// parabolics, none for elliptics. Antiholomorphic input uses its square.
    pub fn fixed_boundary_points(&self) -> Result<Vec<HoroPoint>> {
        let class = self.classify();
        if class.identity {
            return invalid("the identity fixes every point");
        }
        match class.kind {
            IsometryKind::Elliptic => Ok(Vec::new()),
            IsometryKind::Loxodromic => {
                let (a, r) = self.loxodromic_fixed_vectors();
                Ok(vec![null_to_horo(&a), null_to_horo(&r)])
            }
            IsometryKind::Parabolic => Ok(vec![null_to_horo(&self.parabolic_fixed_vector())]),
        }
    }

    /// Attracting and repelling null eigenvectors of a loxodromic (or its square).
    fn loxodromic_fixed_vectors(&self) -> (ProjectiveVector, ProjectiveVector) {
        let sp = self.spectrum();
        // J m* J is proportional to the inverse and avoids cancellation for long words
        let j = j_form();
        let inv = j * sp.ms.adjoint() * j;
        let inv = inv / c(frob(&inv), 0.0);
        let ms = sp.ms / c(frob(&sp.ms), 0.0);
        let mut a = kernel_vector(&(ms - Mat3::identity() * top_eigenvalue(&ms)));
        let mut r = kernel_vector(&(inv - Mat3::identity() * top_eigenvalue(&inv)));
        for _ in 0..4 {
            a = unit(&(ms * a));
            r = unit(&(inv * r));
        }
        (ProjectiveVector(a), ProjectiveVector(r))
    }

    fn parabolic_fixed_vector(&self) -> ProjectiveVector {
        let sp = self.spectrum();
        let id = Mat3::identity();
        let p = match cluster(&sp.eig) {
            Clusters::Triple(lambda) => {
                let n = sp.ms - id * lambda;
                let n2 = n * n;
                if frob(&n2) > 1e-6 * frob(&n) * frob(&n) {
                    n2
                } else {
                    n
                }
            }
            Clusters::Double(lambda, mu) => (sp.ms - id * lambda) * (sp.ms - id * mu),
            // numerically unclustered: fall back on the eigenvector closest to null
            Clusters::Distinct => {
                let mut best = (f64::INFINITY, nalgebra::Vector3::zeros());
                for l in sp.eig {
                    let v = kernel_vector(&(sp.ms - id * l));
                    let q = herm(&ProjectiveVector(v), &ProjectiveVector(v)).norm();
                    if q < best.0 {
                        best = (q, v);
                    }
                }
                return ProjectiveVector(best.1);
            }
        };
        let mut col = p.column(0).into_owned();
        for k in 1..3 {
            if p.column(k).norm() > col.norm() {
                col = p.column(k).into_owned();
            }
        }
        ProjectiveVector(unit(&col))
    }

    /// Attracting fixed point of a loxodromic.
    pub fn attracting_fixed_point(&self) -> Result<HoroPoint> {
        if self.classify().kind != IsometryKind::Loxodromic {
            return invalid("attracting fixed point needs a loxodromic");
        }
        Ok(null_to_horo(&self.loxodromic_fixed_vectors().0))
    }

    /// `inf_x d(x, g x)` of a loxodromic, `2 ln |λ_max|` after det-normalisation.
    pub fn translation_length(&self) -> Result<f64> {
        if self.antiholo {
            return invalid("translation length is defined here for holomorphic elements");
        }
        if self.classify().kind != IsometryKind::Loxodromic {
            return invalid("translation length needs a loxodromic");
        }
        let sp = self.spectrum();
        let top = sp.eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(2.0 * top.ln())
    }

    /// Rotation angle and translation part of a parabolic fixing infinity.
    pub fn parabolic_normal_form(&self) -> Result<ParabolicNormalForm> {
        if self.antiholo {
            return invalid("normal form needs a holomorphic element");
        }
        let class = self.classify();
        if class.kind != IsometryKind::Parabolic {
            return invalid(format!("element is {}, not parabolic", class.kind));
        }
        let w = self.apply(&ProjectiveVector::infinity());
        let n = w.euclid_norm_sqr().sqrt();
        if w.0[0].norm() > 1e-8 * n || (w.0[1] + w.0[2]).norm() > 1e-8 * n {
            return invalid("parabolic does not fix infinity");
        }
        let lambda = w.0[2];
        let theta = (self.m[(0, 0)] / lambda).arg();
        let theta = if theta <= -PI {
            theta + 2.0 * PI
        } else {
            theta
        };
        let o = self.apply_horo(&HoroPoint::origin())?;
        let (xi0, v0, _) = o.coords().expect("finite image of the origin");
        Ok(ParabolicNormalForm {
            rotation_angle: theta,
            translation: (xi0, v0),
        })
    }

    /// Interior point classification helper for callers holding raw vectors.
    pub fn maps_interior_to_interior(&self, z: &ProjectiveVector) -> Result<bool> {
        Ok(point_class(&self.apply(z))? == PointClass::Interior)
    }
}

enum Clusters {
    Distinct,
    /// repeated eigenvalue (mean of the pair) and the remaining one
    Double(C64, C64),
    Triple(C64),
}

fn cluster(e: &[C64; 3]) -> Clusters {
    let close = |a: C64, b: C64| (a - b).norm() <= CLUSTER_TOL * a.norm().max(b.norm()).max(1.0);
    let (c01, c02, c12) = (close(e[0], e[1]), close(e[0], e[2]), close(e[1], e[2]));
    match (c01, c02, c12) {
        (true, true, _) | (true, _, true) | (_, true, true) => {
            Clusters::Triple((e[0] + e[1] + e[2]) / 3.0)
        }
        (true, false, false) => Clusters::Double((e[0] + e[1]) / 2.0, e[2]),
        (false, true, false) => Clusters::Double((e[0] + e[2]) / 2.0, e[1]),
        (false, false, true) => Clusters::Double((e[1] + e[2]) / 2.0, e[0]),
        (false, false, false) => Clusters::Distinct,
    }
}

/// Schur with an iteration cap; the unshifted QR can stall on some long
/// words, in which case the characteristic cubic is solved instead.
fn eigenvalues(m: &Mat3) -> [C64; 3] {
    if let Some(s) = m.try_schur(f64::EPSILON, 500) {
        let t = s.unpack().1;
        return [t[(0, 0)], t[(1, 1)], t[(2, 2)]];
    }
    char_poly_roots(m)
}

fn char_poly_roots(m: &Mat3) -> [C64; 3] {
    let minor = |i: usize, j: usize| m[(i, i)] * m[(j, j)] - m[(i, j)] * m[(j, i)];
    let coef = [
        m.trace(),
        minor(0, 1) + minor(0, 2) + minor(1, 2),
        m.determinant(),
    ];
    let p = |z: C64| ((z - coef[0]) * z + coef[1]) * z - coef[2];
    let scale = 1.0 + coef.iter().map(|z| z.norm()).fold(0.0, f64::max);
    // Durand–Kerner
    let mut r = [0, 1, 2]
        .map(|k| C64::from_polar(scale, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / 3.0));
    for _ in 0..1000 {
        let prev = r;
        for i in 0..3 {
            let mut den = c(1.0, 0.0);
            for j in 0..3 {
                if j != i {
                    den *= r[i] - r[j];
                }
            }
            if den.norm() > 0.0 {
                r[i] -= p(r[i]) / den;
            }
        }
        if (0..3).all(|i| (r[i] - prev[i]).norm() <= 1e-15 * r[i].norm().max(1e-300)) {
            break;
        }
    }
    r
}

fn top_eigenvalue(m: &Mat3) -> C64 {
    eigenvalues(m)
        .into_iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("three eigenvalues")
}

fn unit(v: &nalgebra::Vector3<C64>) -> nalgebra::Vector3<C64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v / c(n, 0.0)
}

/// Vector spanning the (numerical) kernel of a rank-2 matrix: the largest cross
/// product of two rows.
fn kernel_vector(a: &Mat3) -> nalgebra::Vector3<C64> {
    let rows = [
        a.row(0).transpose(),
        a.row(1).transpose(),
        a.row(2).transpose(),
    ];
    let cross = |x: &nalgebra::Vector3<C64>, y: &nalgebra::Vector3<C64>| {
        nalgebra::Vector3::new(
            x[1] * y[2] - x[2] * y[1],
            x[2] * y[0] - x[0] * y[2],
            x[0] * y[1] - x[1] * y[0],
        )
    };
    let cands = [
        cross(&rows[0], &rows[1]),
        cross(&rows[0], &rows[2]),
        cross(&rows[1], &rows[2]),
    ];
    let best = cands
        .iter()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .copied()
        .unwrap();
    unit(&best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bpt(re: f64, im: f64, v: f64) -> HoroPoint {
        HoroPoint::boundary(c(re, im), v)
    }

    fn close_pt(a: &HoroPoint, b: &HoroPoint, tol: f64) -> bool {
        match (a.coords(), b.coords()) {
            (Some((x, v, u)), Some((y, w, s))) => {
                (x - y).norm() < tol && (v - w).abs() < tol && (u - s).abs() < tol
            }
            (None, None) => true,
            _ => false,
        }
    }

    #[test]
    fn cubic_fallback_matches_schur() {
        let g = Isometry::heisenberg_translation(C64::new(0.3, -1.1), 0.7)
            .compose(&Isometry::dilation(3.0).unwrap())
            .compose(&Isometry::unitary_rotation(0.4));
        let mut a = eigenvalues(&g.m);
        let mut b = char_poly_roots(&g.m);
        a.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
        b.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
        for k in 0..3 {
            assert!((a[k] - b[k]).norm() < 1e-10, "{a:?} {b:?}");
        }
    }

    #[test]
    fn translation_law_sign() {
        let t = Isometry::heisenberg_translation(c(1.0, 0.0), 0.0);
        let p = t.apply_horo(&bpt(0.0, 1.0, 0.0)).unwrap();
        // v = 2 Im(1 · conj(i)) = −2
        assert!(close_pt(&p, &bpt(1.0, 1.0, -2.0), 1e-12), "{p:?}");
        assert!(t.apply_horo(&HoroPoint::Infinity).unwrap().is_infinity());
    }

    #[test]
    fn translation_matrix_product_oracle() {
        let a = Isometry::heisenberg_translation(c(1.0, 0.0), 0.0);
        let b = Isometry::heisenberg_translation(c(0.0, 1.0), 0.0);
        // explicit 3×3 product of the embedding matrices
        let mut prod = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    prod[(i, j)] += a.matrix()[(i, k)] * b.matrix()[(k, j)];
                }
            }
        }
        let ab = a.compose(&b);
        assert!(frob(&(ab.matrix() - prod)) < 1e-14);
        // (1,0)·(i,0) = (1+i, 2 Im(1·conj(i))) = (1+i, −2)
        let expect = Isometry::heisenberg_translation(c(1.0, 1.0), -2.0);
        assert!(ab.projective_distance(&expect) < 1e-14);
    }

    #[test]
    fn vertical_translation_entries() {
        let t = Isometry::heisenberg_translation(c(0.0, 0.0), 2.0);
        assert_eq!(t.matrix()[(1, 2)], c(0.0, 1.0));
        assert_eq!(t.matrix()[(2, 1)], c(0.0, -1.0));
        assert!(Isometry::heisenberg_translation(c(0.0, 0.0), 0.0).is_identity());
    }

    #[test]
    fn rotations() {
        assert!(Isometry::unitary_rotation(0.0).is_identity());
        let half = Isometry::unitary_rotation(PI);
        assert!(close_pt(
            &half.apply_horo(&bpt(1.0, 0.0, 0.0)).unwrap(),
            &bpt(-1.0, 0.0, 0.0),
            1e-15
        ));
        let u = Isometry::unitary_rotation(0.7);
        let t = Isometry::heisenberg_translation(c(0.0, 0.0), 1.3);
        let comm = u.compose(&t).matrix() - t.compose(&u).matrix();
        assert!(frob(&comm) < 1e-12);
    }

    #[test]
    fn inversion_formula() {
        let inv = Isometry::heisenberg_inversion();
        let cases = [
            ((1.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
            ((0.0, 0.0, 1.0), (0.0, 0.0, -1.0)),
            ((2.0, 0.0, 0.0), (0.5, 0.0, 0.0)),
        ];
        for ((a, b, v), (x, y, w)) in cases {
            assert!(close_pt(
                &inv.apply_horo(&bpt(a, b, v)).unwrap(),
                &bpt(x, y, w),
                1e-14
            ));
        }
        assert!(inv.apply_horo(&HoroPoint::origin()).unwrap().is_infinity());
        assert!(inv.compose(&inv).is_identity());
    }

    #[test]
    fn dilation_action() {
        let d = Isometry::dilation(2.0).unwrap();
        assert!(close_pt(
            &d.apply_horo(&bpt(1.0, 0.0, 1.0)).unwrap(),
            &bpt(2.0, 0.0, 4.0),
            1e-13
        ));
        assert!(Isometry::dilation(1.0).unwrap().is_identity());
        assert!(Isometry::dilation(0.0).is_err());
        assert!(Isometry::dilation(-2.0).is_err());
    }

    #[test]
    fn classification_examples() {
        let t = Isometry::heisenberg_translation(c(0.0, 0.0), 1.0).classify();
        assert_eq!(t.kind, IsometryKind::Parabolic);
        let t = Isometry::heisenberg_translation(c(1.0, 0.5), 1.0).classify();
        assert_eq!(t.kind, IsometryKind::Parabolic);
        assert_eq!(
            Isometry::unitary_rotation(PI / 3.0).classify().kind,
            IsometryKind::Elliptic
        );
        assert_eq!(
            Isometry::dilation(2.0).unwrap().classify().kind,
            IsometryKind::Loxodromic
        );
        let id = Isometry::identity().classify();
        assert!(id.identity && id.kind == IsometryKind::Elliptic);
        let screw = Isometry::unitary_rotation(0.4)
            .compose(&Isometry::heisenberg_translation(c(0.0, 0.0), 1.0));
        assert_eq!(screw.classify().kind, IsometryKind::Parabolic);
        let anti = Isometry::conjugation().classify();
        assert!(anti.antiholomorphic && anti.identity);
    }

    #[test]
    fn composition_flags() {
        let s = Isometry::conjugation();
        let r = Isometry::unitary_rotation(0.3)
            .conjugate_by(&Isometry::heisenberg_translation(c(0.2, 0.0), 0.0));
        let s2 = s.conjugate_by(&r);
        let prod = s.compose(&s2);
        assert!(!prod.is_antiholomorphic());
        let g = Isometry::heisenberg_translation(c(0.3, -1.0), 2.0)
            .compose(&Isometry::dilation(1.7).unwrap());
        assert!(g.compose(&g.inverse()).is_identity());
    }

    #[test]
    fn fixed_points_of_basic_elements() {
        let d = Isometry::dilation(2.0)
            .unwrap()
            .fixed_boundary_points()
            .unwrap();
        assert_eq!(d.len(), 2);
        assert!(d[0].is_infinity());
        assert!(close_pt(&d[1], &HoroPoint::origin(), 1e-12));
        let t = Isometry::heisenberg_translation(c(1.0, 0.0), 0.0)
            .fixed_boundary_points()
            .unwrap();
        assert_eq!(t.len(), 1);
        assert!(t[0].is_infinity());
        let v = Isometry::heisenberg_translation(c(0.0, 0.0), 1.0)
            .fixed_boundary_points()
            .unwrap();
        assert!(v.len() == 1 && v[0].is_infinity());
        assert!(Isometry::unitary_rotation(1.0)
            .fixed_boundary_points()
            .unwrap()
            .is_empty());
        assert!(Isometry::identity().fixed_boundary_points().is_err());
    }

    #[test]
    fn translation_length_of_dilation() {
        let d = Isometry::dilation(3.0).unwrap();
        let l = d.translation_length().unwrap();
        assert!((l - 2.0 * 3f64.ln()).abs() < 1e-12);
        assert!((d.pow(2).translation_length().unwrap() - 2.0 * l).abs() < 1e-12);
        assert!(Isometry::unitary_rotation(1.0)
            .translation_length()
            .is_err());
    }

    #[test]
    fn normal_forms() {
        let t = Isometry::heisenberg_translation(c(0.0, 0.0), 1.0);
        let nf = t.parabolic_normal_form().unwrap();
        assert_eq!(nf.rotation_angle, 0.0);
        assert!((nf.translation.1 - 1.0).abs() < 1e-14);
        let screw = Isometry::unitary_rotation(0.9).compose(&t);
        assert!((screw.parabolic_normal_form().unwrap().rotation_angle - 0.9).abs() < 1e-12);
        assert!(Isometry::dilation(2.0)
            .unwrap()
            .parabolic_normal_form()
            .is_err());
        let moved = t.conjugate_by(&Isometry::heisenberg_inversion());
        assert!(moved.parabolic_normal_form().is_err());
    }

    #[test]
    fn pow_matches_repeated_composition() {
        let g = Isometry::heisenberg_translation(c(0.5, 0.2), 0.3)
            .compose(&Isometry::unitary_rotation(0.2));
        let mut acc = Isometry::identity();
        for _ in 0..7 {
            acc = acc.compose(&g);
        }
        assert!(acc.projective_distance(&g.pow(7)) < 1e-12);
        assert!(g.pow(-3).compose(&g.pow(3)).is_identity());
    }

    #[test]
    fn invalid_matrix_rejected() {
        let mut m = Mat3::identity();
        m[(0, 1)] = c(3.0, 0.0);
        assert!(Isometry::new(m, false).is_err());
        assert!(Isometry::new(*Isometry::dilation(2.0).unwrap().matrix(), false).is_ok());
    }
}
