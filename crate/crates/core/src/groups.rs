//! Finitely generated groups: word balls, orbits, limit-set samples, finite-radius
//! certificates, growth tables and a Floyd-style boundary map.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::boundary::cygan_distance;
use crate::error::{invalid, Error, Result};
use crate::hermitian::{bergman_distance_horo, horo_to_projective, HoroPoint};
use crate::isometry::{Isometry, IsometryKind};
use crate::C64;

/// Matrix dedup resolution (relative projective distance).
pub const MATRIX_DEDUP: f64 = 1e-8;
/// Bergman resolution for the frame check that confirms a matrix match.
pub const FRAME_DEDUP: f64 = 1e-6;
/// Cygan resolution for boundary samples.
pub const CYGAN_DEDUP: f64 = 1e-6;
/// Hard cap on word-ball size.
pub const DEFAULT_MAX_ELEMENTS: usize = 2_000_000;

#[derive(Clone, Debug)]
struct Generator {
    label: String,
    g: Isometry,
    inv: Isometry,
    involution: bool,
}

/// One letter of the alphabet: a generator or its formal inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

/// A word, stored as alphabet indices so that the derived order is lexicographic
/// in alphabet order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u16>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Generators with labels and stored inverses. Involutions get no separate
/// inverse letter.
#[derive(Clone, Debug)]
pub struct GroupPresentation {
    gens: Vec<Generator>,
    alphabet: Vec<Letter>,
}

impl GroupPresentation {
    pub fn new(generators: Vec<(String, Isometry)>) -> Result<Self> {
        let mut gens = Vec::with_capacity(generators.len());
        for (label, g) in generators {
            if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return invalid(format!("bad generator label {label:?}"));
            }
            if gens.iter().any(|x: &Generator| x.label == label) {
                return invalid(format!("duplicate generator label {label}"));
            }
            let inv = g.inverse();
            if !g.compose(&inv).is_identity() {
                return invalid(format!("generator {label} is numerically singular"));
            }
            let involution = g.compose(&g).is_identity();
            gens.push(Generator {
                label,
                g,
                inv,
                involution,
            });
        }
        let mut alphabet = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            alphabet.push(Letter {
                gen: i,
                inverse: false,
            });
            if !g.involution {
                alphabet.push(Letter {
                    gen: i,
                    inverse: true,
                });
            }
        }
        Ok(Self { gens, alphabet })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.gens.iter().map(|g| g.label.as_str())
    }

    pub fn generator(&self, i: usize) -> &Isometry {
        &self.gens[i].g
    }

    pub fn generators(&self) -> impl Iterator<Item = (&str, &Isometry)> {
        self.gens.iter().map(|g| (g.label.as_str(), &g.g))
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.label == label)
    }

    pub fn is_involution(&self, i: usize) -> bool {
        self.gens[i].involution
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    fn letter_index(&self, l: Letter) -> u16 {
        let l = if self.gens[l.gen].involution {
            Letter {
                gen: l.gen,
                inverse: false,
            }
        } else {
            l
        };
        self.alphabet
            .iter()
            .position(|&a| a == l)
            .expect("letter in alphabet") as u16
    }

    fn inverse_letter(&self, idx: u16) -> u16 {
        let l = self.alphabet[idx as usize];
        self.letter_index(Letter {
            gen: l.gen,
            inverse: !l.inverse,
        })
    }

    fn letter_isometry(&self, idx: u16) -> &Isometry {
        let l = self.alphabet[idx as usize];
        if l.inverse {
            &self.gens[l.gen].inv
        } else {
            &self.gens[l.gen].g
        }
    }

    /// Same labels and decomposition order, new matrices.
    pub fn with_generators(&self, gens: Vec<Isometry>) -> Result<Self> {
        if gens.len() != self.gens.len() {
            return invalid("generator count mismatch");
        }
        GroupPresentation::new(
            self.gens
                .iter()
                .map(|g| g.label.clone())
                .zip(gens)
                .collect(),
        )
    }

    /// Product of the letters, left to right.
    pub fn evaluate(&self, w: &Word) -> Isometry {
        w.0.iter().fold(Isometry::identity(), |acc, &l| {
            acc.compose(self.letter_isometry(l))
        })
    }

    pub fn inverse_word(&self, w: &Word) -> Word {
        Word(w.0.iter().rev().map(|&l| self.inverse_letter(l)).collect())
    }

    /// Free reduction, also cancelling squares of involutions.
    pub fn reduce(&self, w: &Word) -> Word {
        let mut out: Vec<u16> = Vec::with_capacity(w.len());
        for &l in &w.0 {
            if out.last().is_some_and(|&p| p == self.inverse_letter(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn concat(&self, a: &Word, b: &Word) -> Word {
        let mut v = a.0.clone();
        v.extend_from_slice(&b.0);
        self.reduce(&Word(v))
    }

    /// `a.b^-1.c`; the empty word is written `id`.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "id".to_string();
        }
        w.0.iter()
            .map(|&l| {
                let l = self.alphabet[l as usize];
                if l.inverse {
                    format!("{}^-1", self.gens[l.gen].label)
                } else {
                    self.gens[l.gen].label.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(".")
    }

    /// Parses words such as `a.b^-1.a`, `a b^-1 a` or `id`. Errors name the
    /// 1-based character position of the offending token.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let mut out = Vec::new();
        let mut pos = 0usize;
        for tok in s.split(|c: char| c == '.' || c.is_whitespace()) {
            let start = pos;
            pos += tok.len() + 1;
            if tok.is_empty() || tok == "id" {
                continue;
            }
            let (name, inverse) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let Some(gen) = self.index_of(name) else {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("unknown generator label {name:?} at position {}", start + 1),
                });
            };
            out.push(self.letter_index(Letter { gen, inverse }));
        }
        Ok(Word(out))
    }
}

/// A group element together with its shortest word.
#[derive(Clone, Debug)]
pub struct WordElement {
    pub word: Word,
    pub g: Isometry,
}

/// Deduplicated ball in the Cayley graph, canonically ordered by length then
/// lexicographically.
#[derive(Clone, Debug)]
pub struct WordBall {
    pub radius: usize,
    pub elements: Vec<WordElement>,
    layer_start: Vec<usize>,
    index: HashMap<i64, Vec<usize>>,
}

const FEATURE_CELL: f64 = 1e-7;

/// Interior points in general position; only the identity fixes all of them.
const FRAME: [(f64, f64, f64, f64); 3] = [
    (0.0, 0.0, 0.0, 1.0),
    (0.7, -0.2, 0.3, 0.5),
    (-0.4, 0.9, -1.1, 2.0),
];

fn feature_key(g: &Isometry) -> i64 {
    (g.dedup_feature() / FEATURE_CELL).floor() as i64
}

/// Normalised matrices of long loxodromic words approach a rank-one limit, so a
/// small projective distance is confirmed on the frame. Fails once the matrices
/// no longer resolve the frame images.
fn same_element(a: &Isometry, b: &Isometry) -> Result<bool> {
    if a.projective_distance(b) >= MATRIX_DEDUP {
        return Ok(false);
    }
    for &(x, y, v, u) in &FRAME {
        let p = HoroPoint::Finite {
            xi: C64::new(x, y),
            v,
            u,
        };
        let d = a
            .apply_horo(&p)
            .and_then(|pa| bergman_distance_horo(&pa, &b.apply_horo(&p)?))
            .map_err(|_| {
                Error::Resource("group element exceeds double precision; lower the radius".into())
            })?;
        if d >= FRAME_DEDUP {
            return Ok(false);
        }
    }
    Ok(true)
}

impl WordBall {
    /// Index of an element equal to `g` up to the dedup resolution. Elements
    /// beyond double precision match on the matrix test alone.
    pub fn find(&self, g: &Isometry) -> Option<usize> {
        self.try_find(g).unwrap_or_else(|_| {
            self.candidates(g)
                .find(|&i| self.elements[i].g.projective_distance(g) < MATRIX_DEDUP)
        })
    }

    fn candidates<'a>(&'a self, g: &Isometry) -> impl Iterator<Item = usize> + 'a {
        let k = feature_key(g);
        [k - 1, k, k + 1]
            .into_iter()
            .filter_map(|kk| self.index.get(&kk))
            .flatten()
            .copied()
    }

    fn try_find(&self, g: &Isometry) -> Result<Option<usize>> {
        for i in self.candidates(g) {
            if same_element(&self.elements[i].g, g)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Elements of word length exactly `n`.
    pub fn layer(&self, n: usize) -> &[WordElement] {
        if n > self.radius {
            return &[];
        }
        &self.elements[self.layer_start[n]..self.layer_start[n + 1]]
    }

    pub fn length_of(&self, i: usize) -> usize {
        self.layer_start.partition_point(|&s| s <= i) - 1
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// All freely reduced words of length at most `radius`, with duplicate group
/// elements removed in favour of the shortest, lexicographically first word.
pub fn word_ball(g: &GroupPresentation, radius: usize) -> Result<WordBall> {
    word_ball_with_limit(g, radius, DEFAULT_MAX_ELEMENTS)
}

pub fn word_ball_with_limit(
    g: &GroupPresentation,
    radius: usize,
    max_elements: usize,
) -> Result<WordBall> {
    let mut ball = WordBall {
        radius,
        elements: vec![WordElement {
            word: Word::identity(),
            g: Isometry::identity(),
        }],
        layer_start: vec![0, 1],
        index: HashMap::new(),
    };
    ball.index
        .entry(feature_key(&Isometry::identity()))
        .or_default()
        .push(0);
    for n in 1..=radius {
        let prev = ball.layer_start[n - 1]..ball.layer_start[n];
        let mut cands: Vec<(usize, u16)> = Vec::new();
        for i in prev {
            let w = &ball.elements[i].word;
            let last_inv = w.0.last().map(|&l| g.inverse_letter(l));
            for l in 0..g.alphabet.len() as u16 {
                if Some(l) != last_inv {
                    cands.push((i, l));
                }
            }
        }
        if ball.elements.len() + cands.len() > max_elements {
            return Err(Error::Resource(format!(
                "word ball of radius {radius} exceeds {max_elements} elements at length {n}"
            )));
        }
        let products: Vec<Isometry> = cands
            .par_iter()
            .map(|&(i, l)| ball.elements[i].g.compose(g.letter_isometry(l)))
            .collect();
        for ((i, l), prod) in cands.into_iter().zip(products) {
            if ball.try_find(&prod)?.is_some() {
                continue;
            }
            let mut word = ball.elements[i].word.clone();
            word.0.push(l);
            let idx = ball.elements.len();
            ball.index.entry(feature_key(&prod)).or_default().push(idx);
            ball.elements.push(WordElement { word, g: prod });
        }
        ball.layer_start.push(ball.elements.len());
    }
    Ok(ball)
}

/// Orbit of a base point over a word ball.
#[derive(Clone, Debug)]
pub struct OrbitCloud {
    pub base: HoroPoint,
    pub radius: usize,
    pub entries: Vec<(Word, HoroPoint)>,
}

pub fn orbit_cloud(g: &GroupPresentation, radius: usize, base: &HoroPoint) -> Result<OrbitCloud> {
    let ball = word_ball(g, radius)?;
    let images: Vec<Result<HoroPoint>> = ball
        .elements
        .par_iter()
        .map(|e| e.g.apply_horo(base))
        .collect();
    let mut dedup = CyganDedup::new(CYGAN_DEDUP);
    let mut entries = Vec::new();
    let mut seen_infinity = false;
    for (e, p) in ball.elements.iter().zip(images) {
        let p = p?;
        let fresh = if p.is_infinity() {
            !std::mem::replace(&mut seen_infinity, true)
        } else {
            dedup.insert(&p)
        };
        if fresh {
            entries.push((e.word.clone(), p));
        }
    }
    Ok(OrbitCloud {
        base: *base,
        radius,
        entries,
    })
}

/// Grid-hashed dedup in the extended Cygan metric. Cells are `eps`-squares in
/// ξ; within a cell `v* = v − 2 Im(c ξ̄)` (`c` the cell centre) is bucketed at
/// `6 eps²`, which bounds `|Δv*|` for Cygan-close points in adjacent cells.
struct CyganDedup {
    eps: f64,
    cells: HashMap<(i64, i64, i128, i64), Vec<HoroPoint>>,
}

impl CyganDedup {
    fn new(eps: f64) -> Self {
        Self {
            eps,
            cells: HashMap::new(),
        }
    }

    fn v_bucket(&self, xi: C64, v: f64, cell: (i64, i64)) -> i128 {
        let e = self.eps;
        let centre = C64::new((cell.0 as f64 + 0.5) * e, (cell.1 as f64 + 0.5) * e);
        ((v - 2.0 * (centre * xi.conj()).im) / (6.0 * e * e)).floor() as i128
    }

    /// Inserts unless a stored point lies within `eps`; returns whether inserted.
    fn insert(&mut self, p: &HoroPoint) -> bool {
        let (xi, v, u) = p.coords().expect("finite point");
        let e = self.eps;
        let (a, b, d) = (
            (xi.re / e).floor() as i64,
            (xi.im / e).floor() as i64,
            (u / e).floor() as i64,
        );
        for da in -1..=1 {
            for db in -1..=1 {
                let cell = (a + da, b + db);
                let k = self.v_bucket(xi, v, cell);
                for dk in -1..=1 {
                    for dd in -1..=1 {
                        if let Some(list) = self.cells.get(&(cell.0, cell.1, k + dk, d + dd)) {
                            if list
                                .iter()
                                .any(|q| cygan_distance(p, q).is_ok_and(|x| x < e))
                            {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        let k = self.v_bucket(xi, v, (a, b));
        self.cells.entry((a, b, k, d)).or_default().push(*p);
        true
    }
}

/// One sampled limit point and the loxodromic word it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitPoint {
    pub point: HoroPoint,
    pub word: Word,
    pub attracting: bool,
}

/// Loxodromic fixed points from a word ball. Infinity is counted, not stored.
#[derive(Clone, Debug, Default)]
pub struct LimitSample {
    pub radius: usize,
    pub points: Vec<LimitPoint>,
    pub infinity_count: usize,
    pub infinity_word: Option<Word>,
    /// fixed points found before dedup
    pub candidates: usize,
}

impl LimitSample {
    pub fn finite_points(&self) -> Vec<HoroPoint> {
        self.points.iter().map(|p| p.point).collect()
    }

    pub fn contains_infinity(&self) -> bool {
        self.infinity_count > 0
    }
}

/// Fixed points of every (confidently) loxodromic element of the ball,
/// deduplicated in the Cygan metric.
pub fn limit_set_sample(g: &GroupPresentation, radius: usize) -> Result<LimitSample> {
    if radius < 1 {
        return invalid("limit set sampling needs radius at least 1");
    }
    let ball = word_ball(g, radius)?;
    limit_set_from_ball(&ball)
}

pub fn limit_set_from_ball(ball: &WordBall) -> Result<LimitSample> {
    let fixed: Vec<Option<Vec<HoroPoint>>> = ball
        .elements
        .par_iter()
        .map(|e| {
            let c = e.g.classify();
            if c.kind == IsometryKind::Loxodromic && c.confident {
                e.g.fixed_boundary_points().ok()
            } else {
                None
            }
        })
        .collect();
    let mut out = LimitSample {
        radius: ball.radius,
        ..Default::default()
    };
    let mut dedup = CyganDedup::new(CYGAN_DEDUP);
    for (e, pts) in ball.elements.iter().zip(fixed) {
        let Some(pts) = pts else { continue };
        for (k, p) in pts.into_iter().enumerate() {
            out.candidates += 1;
            if p.is_infinity() {
                out.infinity_count += 1;
                if out.infinity_word.is_none() {
                    out.infinity_word = Some(e.word.clone());
                }
            } else if dedup.insert(&p) {
                out.points.push(LimitPoint {
                    point: p,
                    word: e.word.clone(),
                    attracting: k == 0,
                });
            }
        }
    }
    Ok(out)
}

/// Radius-R certificate that `z` lies in the Dirichlet domain centred at `y`.
pub fn dirichlet_membership(
    z: &HoroPoint,
    y: &HoroPoint,
    g: &GroupPresentation,
    radius: usize,
) -> Result<bool> {
    let ball = word_ball(g, radius)?;
    let dzy = bergman_distance_horo(z, y)?;
    for e in &ball.elements[1..] {
        let gy = e.g.apply_horo(y)?;
        if bergman_distance_horo(y, &gy)? < 1e-9 {
            return invalid(format!("center is fixed by {}", g.format_word(&e.word)));
        }
        if !(dzy < bergman_distance_horo(z, &gy)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `sinh(ℓ/4)·sinh(δ/2) ≤ 1/2`, with a relative slack of 1e−12 at equality.
pub fn collar_check(length: f64, delta: f64) -> Result<bool> {
    if !(length > 0.0) || !(delta > 0.0) {
        return invalid(format!(
            "collar parameters must be positive, got {length}, {delta}"
        ));
    }
    Ok((length / 4.0).sinh() * (delta / 2.0).sinh() <= 0.5 * (1.0 + 1e-12))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub length: usize,
    pub count: usize,
    pub min_d: f64,
    pub max_d: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// smallest K with `max_d(n) ≤ K n`
    pub k_upper: f64,
    /// least-squares `min_d(n) ≈ a + c ln n`
    pub log_fit: LineFit,
    /// `min_n (min_d(n) − 2 ln n)`; finite means the shape `2 ln n + a` bounds from below
    pub log_envelope_offset: f64,
}

/// Least-squares line with RMS residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub residual: f64,
    pub r_squared: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return invalid("line fit needs at least two points");
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 {
        return invalid("line fit needs distinct abscissae");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LineFit {
        intercept,
        slope,
        residual: (sse / nf).sqrt(),
        r_squared,
    })
}

/// Per-length displacement table of a base point over the word ball.
pub fn growth_diagnostic(
    g: &GroupPresentation,
    radius: usize,
    base: &HoroPoint,
) -> Result<GrowthReport> {
    if radius < 2 {
        return invalid("growth diagnostic needs radius at least 2");
    }
    let ball = word_ball(g, radius)?;
    let d: Vec<Result<f64>> = ball
        .elements
        .par_iter()
        .map(|e| {
            e.g.apply_horo(base)
                .and_then(|p| bergman_distance_horo(base, &p))
        })
        .collect();
    let mut rows = Vec::new();
    for n in 1..=radius {
        let (s, t) = (ball.layer_start[n], ball.layer_start[n + 1]);
        if s == t {
            continue;
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for r in &d[s..t] {
            let r = *r.as_ref().map_err(Clone::clone)?;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        rows.push(GrowthRow {
            length: n,
            count: t - s,
            min_d: lo,
            max_d: hi,
        });
    }
    let k_upper = rows
        .iter()
        .map(|r| r.max_d / r.length as f64)
        .fold(0.0, f64::max);
    let xs: Vec<f64> = rows.iter().map(|r| (r.length as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.min_d).collect();
    let log_fit = fit_line(&xs, &ys)?;
    let log_envelope_offset = rows
        .iter()
        .map(|r| r.min_d - 2.0 * (r.length as f64).ln())
        .fold(f64::INFINITY, f64::min);
    Ok(GrowthReport {
        rows,
        k_upper,
        log_fit,
        log_envelope_offset,
    })
}

/// The invariant subset `ℋ_∞` of a cusp, in coordinates where the cusp is at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CuspDatum {
    /// `{ξ₀} × R`
    Vertical(C64),
    /// the left translate by `point` of `R·direction × {0}`
    Horizontal { point: (C64, f64), direction: C64 },
    /// all of `ℋ`
    Full,
}

impl CuspDatum {
    /// `ρ_c(x, ℋ_∞)` for a finite point `x`.
    pub fn distance(&self, x: &HoroPoint) -> Result<f64> {
        let Some((xi, v, u)) = x.coords() else {
            return Ok(f64::INFINITY);
        };
        Ok(match *self {
            CuspDatum::Full => u.sqrt(),
            CuspDatum::Vertical(xi0) => ((xi - xi0).norm_sqr() + u).sqrt(),
            CuspDatum::Horizontal { point, direction } => {
                let t = Isometry::unitary_rotation(-direction.arg())
                    .compose(&Isometry::heisenberg_translation(point.0, point.1).inverse());
                let (eta, w, u) = t
                    .apply_horo(&HoroPoint::Finite { xi, v, u })?
                    .coords()
                    .expect("finite");
                // ρ⁴(s) = (|η − s|² + u)² + (w + 2 s Im η)², convex in s
                let f =
                    |s: f64| ((eta - s).norm_sqr() + u).powi(2) + (w + 2.0 * s * eta.im).powi(2);
                let half = f(eta.re).powf(0.25) + 1.0;
                let (mut a, mut b) = (eta.re - half, eta.re + half);
                let g = 0.5 * (5f64.sqrt() - 1.0);
                for _ in 0..200 {
                    let c = b - g * (b - a);
                    let d = a + g * (b - a);
                    if f(c) < f(d) {
                        b = d;
                    } else {
                        a = c;
                    }
                }
                f(0.5 * (a + b)).powf(0.25)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CuspVerdict {
    Inside,
    Outside,
    /// a non-stabilising word mapping the tested point back inside
    Violated(Word),
}

/// Checks the standard cusp neighbourhood of radius `r` at the parabolic point `p`.
pub fn cusp_neighborhood_test(
    p: &HoroPoint,
    x: &HoroPoint,
    r: f64,
    datum: &CuspDatum,
    g: &GroupPresentation,
    radius: usize,
) -> Result<CuspVerdict> {
    if !(r > 0.0) {
        return invalid("cusp radius must be positive");
    }
    if !p.is_boundary() {
        return invalid("cusp point must lie on the boundary");
    }
    let ball = word_ball(g, radius)?;
    let same = |a: &HoroPoint, b: &HoroPoint| match (a.is_infinity(), b.is_infinity()) {
        (true, true) => true,
        (false, false) => cygan_distance(a, b).map_or(false, |d| d < 1e-8),
        _ => false,
    };
    let parabolic = ball.elements.iter().any(|e| {
        e.g.classify().kind == IsometryKind::Parabolic
            && e.g
                .fixed_boundary_points()
                .is_ok_and(|f| f.iter().any(|q| same(q, p)))
    });
    if !parabolic {
        return invalid("cusp point is not fixed by a parabolic word in the ball");
    }
    let ip = match p.coords() {
        None => Isometry::identity(),
        Some((xi, v, _)) => {
            Isometry::heisenberg_inversion().conjugate_by(&Isometry::heisenberg_translation(xi, v))
        }
    };
    let inside =
        |y: &HoroPoint| -> Result<bool> { Ok(datum.distance(&ip.apply_horo(y)?)? >= 1.0 / r) };
    if !inside(x)? {
        return Ok(CuspVerdict::Outside);
    }
    for e in &ball.elements[1..] {
        if same(&e.g.apply_horo(p)?, p) {
            continue;
        }
        if inside(&e.g.apply_horo(x)?)? {
            return Ok(CuspVerdict::Violated(e.word.clone()));
        }
    }
    Ok(CuspVerdict::Inside)
}

/// Non-identity words of the ball moving `x` by less than `eps`.
pub fn margulis_test(
    x: &HoroPoint,
    g: &GroupPresentation,
    radius: usize,
    eps: f64,
) -> Result<Vec<Word>> {
    if !(eps > 0.0) {
        return invalid("epsilon must be positive");
    }
    let ball = word_ball(g, radius)?;
    let mut out = Vec::new();
    for e in &ball.elements[1..] {
        if bergman_distance_horo(x, &e.g.apply_horo(x)?)? < eps {
            out.push(e.word.clone());
        }
    }
    Ok(out)
}

/// Unit vector in `C²` for a boundary point, via the ball model.
pub fn sphere_coordinates(p: &HoroPoint) -> [C64; 2] {
    let z = horo_to_projective(p).0;
    let a = z[0] / z[2];
    let b = z[1] / z[2];
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    [a / n, b / n]
}

/// Euclidean distance on `S³ = ∂B²`.
pub fn chordal_distance(p: &HoroPoint, q: &HoroPoint) -> f64 {
    let a = sphere_coordinates(p);
    let b = sphere_coordinates(q);
    ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt()
}

/// Boundary point closest to an interior point in the ball model.
fn radial_projection(p: &HoroPoint) -> Result<HoroPoint> {
    let z = horo_to_projective(p).0;
    let a = z[0] / z[2];
    let b = z[1] / z[2];
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if n == 0.0 {
        return invalid("the ball centre has no radial projection");
    }
    Ok(crate::hermitian::null_to_horo(
        &crate::ProjectiveVector::new(a / n, b / n, C64::new(1.0, 0.0)),
    ))
}

#[derive(Clone, Debug)]
pub struct FloydCluster {
    /// sphere-R words in the cluster, canonical order
    pub members: Vec<Word>,
    pub representative: Word,
    /// image of the ball centre `(0, 0, 1)` under the representative
    pub orbit_point: HoroPoint,
    pub limit_point: HoroPoint,
}

#[derive(Clone, Debug)]
pub struct FloydSample {
    pub radius: usize,
    pub theta: f64,
    pub clusters: Vec<FloydCluster>,
    /// max chordal distance between `s(Φ(C))` and `Φ` of the translated representative
    pub equivariance_defect: f64,
}

/// `ρ(r) = 1/r²`, with `ρ(0) = 1`.
fn floyd_rho(r: usize) -> f64 {
    if r == 0 {
        1.0
    } else {
        1.0 / (r * r) as f64
    }
}

/// Boundary point assigned to a word: attracting fixed point, parabolic fixed
/// point, or the radial shadow of the orbit point.
fn floyd_point(g: &Isometry, orbit: &HoroPoint) -> Result<HoroPoint> {
    let c = g.classify();
    if !c.identity && c.kind != IsometryKind::Elliptic {
        if let Ok(f) = g.fixed_boundary_points() {
            if let Some(p) = f.first() {
                return Ok(*p);
            }
        }
    }
    radial_projection(orbit)
}

/// Clusters the radius-R sphere of the Cayley graph under the Floyd metric with
/// `ρ(r) = 1/r²` at scale `θ = 4/R²`, and maps each cluster to the boundary.
pub fn floyd_boundary_samples(g: &GroupPresentation, radius: usize) -> Result<FloydSample> {
    if radius < 2 {
        return invalid("Floyd sampling needs radius at least 2");
    }
    let ball = word_ball(g, radius)?;
    let theta = 4.0 * floyd_rho(radius);
    let nb = ball.len();
    // neighbours via right multiplication by letters
    let neighbours: Vec<Vec<usize>> = ball
        .elements
        .par_iter()
        .map(|e| {
            g.alphabet
                .iter()
                .enumerate()
                .filter_map(|(l, _)| ball.find(&e.g.compose(g.letter_isometry(l as u16))))
                .collect()
        })
        .collect();
    let len: Vec<usize> = (0..nb).map(|i| ball.length_of(i)).collect();
    let sphere: Vec<usize> = (ball.layer_start[radius]..ball.layer_start[radius + 1]).collect();
    let mut parent: Vec<usize> = (0..nb).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for &s in &sphere {
        // bounded Dijkstra from s
        let mut dist: BTreeMap<usize, f64> = BTreeMap::new();
        let mut frontier = vec![(s, 0.0)];
        dist.insert(s, 0.0);
        while let Some((v, dv)) = frontier.pop() {
            if dist.get(&v).is_some_and(|&d| d < dv) {
                continue;
            }
            for &w in &neighbours[v] {
                let nd = dv + floyd_rho(len[v]).min(floyd_rho(len[w]));
                if nd < theta && dist.get(&w).map_or(true, |&d| nd < d) {
                    dist.insert(w, nd);
                    frontier.push((w, nd));
                }
            }
        }
        for (&w, _) in dist.iter() {
            if len[w] == radius {
                let (a, b) = (find(&mut parent, s), find(&mut parent, w));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &s in &sphere {
        let r = find(&mut parent, s);
        groups.entry(r).or_default().push(s);
    }
    let centre = HoroPoint::Finite {
        xi: C64::new(0.0, 0.0),
        v: 0.0,
        u: 1.0,
    };
    let mut clusters = Vec::new();
    for (_, members) in groups {
        let rep = members[0];
        let e = &ball.elements[rep];
        let orbit_point = e.g.apply_horo(&centre)?;
        let limit_point = floyd_point(&e.g, &orbit_point)?;
        clusters.push(FloydCluster {
            members: members
                .iter()
                .map(|&i| ball.elements[i].word.clone())
                .collect(),
            representative: e.word.clone(),
            orbit_point,
            limit_point,
        });
    }
    let mut defect = 0.0f64;
    for c in &clusters {
        for l in 0..g.alphabet.len() as u16 {
            let s = g.letter_isometry(l);
            let moved = s.apply_horo(&c.limit_point)?;
            let w = g.concat(&Word(vec![l]), &c.representative);
            let h = g.evaluate(&w);
            let target = floyd_point(&h, &h.apply_horo(&centre)?)?;
            defect = defect.max(chordal_distance(&moved, &target));
        }
    }
    Ok(FloydSample {
        radius,
        theta,
        clusters,
        equivariance_defect: defect,
    })
}

/// Sampled boundary map between two groups paired generator by generator.
#[derive(Clone, Debug)]
pub struct BoundaryMap {
    pub pairs: Vec<(Word, HoroPoint, HoroPoint)>,
    /// `(source distance, image distance)` to the nearest other source sample
    pub modulus: Vec<(f64, f64)>,
}

/// Pairs of attracting fixed points `(fix⁺(g), fix⁺(φ(g)))` over loxodromic words.
pub fn boundary_map_samples(
    g: &GroupPresentation,
    h: &GroupPresentation,
    radius: usize,
) -> Result<BoundaryMap> {
    if g.len() != h.len() || g.alphabet.len() != h.alphabet.len() {
        return invalid("paired groups need matching generator lists");
    }
    let ball = word_ball(g, radius)?;
    let rows: Vec<Result<Option<(Word, HoroPoint, HoroPoint)>>> = ball
        .elements
        .par_iter()
        .map(|e| {
            let c = e.g.classify();
            if c.kind != IsometryKind::Loxodromic || !c.confident {
                return Ok(None);
            }
            let img = h.evaluate(&e.word);
            let ci = img.classify();
            if ci.kind != IsometryKind::Loxodromic {
                return Err(Error::TypeMismatch(format!(
                    "word {} is loxodromic in the source but {} in the target",
                    g.format_word(&e.word),
                    ci.kind
                )));
            }
            Ok(Some((
                e.word.clone(),
                e.g.attracting_fixed_point()?,
                img.attracting_fixed_point()?,
            )))
        })
        .collect();
    let mut pairs = Vec::new();
    for r in rows {
        if let Some(p) = r? {
            pairs.push(p);
        }
    }
    let finite: Vec<usize> = (0..pairs.len())
        .filter(|&i| !pairs[i].1.is_infinity() && !pairs[i].2.is_infinity())
        .collect();
    let modulus = finite
        .iter()
        .take(2000)
        .filter_map(|&i| {
            finite
                .iter()
                .filter(|&&j| j != i)
                .filter_map(|&j| {
                    let d = cygan_distance(&pairs[i].1, &pairs[j].1).ok()?;
                    (d > 0.0).then_some((d, j))
                })
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .and_then(|(d, j)| Some((d, cygan_distance(&pairs[i].2, &pairs[j].2).ok()?)))
        })
        .collect();
    Ok(BoundaryMap { pairs, modulus })
}

/// Box-counting fit in the Cygan metric.
#[derive(Clone, Debug, PartialEq)]
pub struct DimensionFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub counts: Vec<(f64, usize)>,
}

/// Grid offsets in units of the box size, so that lines such as `Im ξ = 0`
/// do not run along cell walls.
const GRID_SHIFT: [f64; 3] = [
    0.381_966_011_250_105,
    0.236_067_977_499_79,
    0.145_898_033_750_315,
];

/// Number of Cygan boxes of scale `r` meeting the sample. Boxes are left
/// translates of `[0, r)² × [0, r²)` centred over a shifted square grid in `ξ`.
pub fn box_count(points: &[HoroPoint], r: f64) -> usize {
    let mut cells = std::collections::HashSet::new();
    for p in points {
        let Some((xi, v, _)) = p.coords() else {
            continue;
        };
        let i = (xi.re / r - GRID_SHIFT[0]).floor();
        let j = (xi.im / r - GRID_SHIFT[1]).floor();
        let centre = C64::new((i + 0.5 + GRID_SHIFT[0]) * r, (j + 0.5 + GRID_SHIFT[1]) * r);
        let vv = v - 2.0 * (centre * xi.conj()).im;
        let k = (vv / (r * r) - GRID_SHIFT[2]).floor();
        cells.insert((i as i64, j as i64, k as i64));
    }
    cells.len()
}

/// Slope of `log N(r)` against `log(1/r)`. A single point has dimension 0.
pub fn box_dimension(points: &[HoroPoint], scales: &[f64]) -> Result<DimensionFit> {
    if scales.len() < 3 {
        return invalid("box dimension needs at least three scales");
    }
    if scales.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return invalid("scales must be positive");
    }
    let finite: Vec<HoroPoint> = points
        .iter()
        .filter(|p| !p.is_infinity())
        .copied()
        .collect();
    if finite.is_empty() {
        return invalid("box dimension needs at least one finite point");
    }
    let counts: Vec<(f64, usize)> = scales.iter().map(|&r| (r, box_count(&finite, r))).collect();
    if finite.len() == 1 {
        return Ok(DimensionFit {
            slope: 0.0,
            intercept: 0.0,
            residual: 0.0,
            counts,
        });
    }
    let first = finite[0];
    if finite
        .iter()
        .all(|p| cygan_distance(p, &first).is_ok_and(|d| d == 0.0))
    {
        return invalid("degenerate sample: all points coincide");
    }
    let xs: Vec<f64> = counts.iter().map(|(r, _)| -r.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|(_, n)| (*n as f64).ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(DimensionFit {
        slope: fit.slope,
        intercept: fit.intercept,
        residual: fit.residual,
        counts,
    })
}

impl fmt::Display for CuspVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CuspVerdict::Inside => f.write_str("inside"),
            CuspVerdict::Outside => f.write_str("outside"),
            CuspVerdict::Violated(_) => f.write_str("violated"),
        }
    }
}
