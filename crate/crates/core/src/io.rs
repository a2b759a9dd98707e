//! Text and binary formats: group files, point clouds, PPM renders and reports.

use std::fmt::Write as _;

use crate::deformations::Decomposition;
use crate::error::{Error, Result};
use crate::groups::GroupPresentation;
use crate::hermitian::HoroPoint;
use crate::isometry::{Isometry, Mat3};
use crate::C64;

pub const GROUP_HEADER: &str = "cxhyp-group v1";
pub const CSV_HEADER: &str = "xi_re,xi_im,v";

/// Shortest round-trip-safe rendering: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    // adding zero turns −0 into +0
    format!("{:.16e}", x + 0.0)
}

/// A group definition with an optional splitting for bending.
#[derive(Clone, Debug)]
pub struct GroupFile {
    pub group: GroupPresentation,
    pub decomposition: Option<Decomposition>,
}

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, GROUP_HEADER)) => {}
            Some((n, other)) => {
                return perr(
                    n,
                    format!("expected header {GROUP_HEADER:?}, found {other:?}"),
                )
            }
            None => return perr(1, "empty group file"),
        }
        let mut gens: Vec<(String, Isometry)> = Vec::new();
        let mut block: Option<(usize, String, Vec<(String, Vec<String>)>)> = None;
        let mut decomposition_raw = None;
        for (n, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if let Some((start, kind, entries)) = block.as_mut() {
                if toks == ["end"] {
                    decomposition_raw =
                        Some((*start, std::mem::take(kind), std::mem::take(entries)));
                    block = None;
                } else {
                    entries.push((
                        toks[0].to_string(),
                        toks[1..].iter().map(|s| s.to_string()).collect(),
                    ));
                }
                continue;
            }
            match toks[0] {
                "gen" => {
                    if decomposition_raw.is_some() {
                        return perr(n, "generator after decomposition block");
                    }
                    if toks.len() != 21 {
                        return perr(
                            n,
                            format!(
                                "gen line needs label, kind and 18 numbers, found {} fields",
                                toks.len()
                            ),
                        );
                    }
                    let label = toks[1].to_string();
                    let anti = match toks[2] {
                        "holo" => false,
                        "anti" => true,
                        k => {
                            return perr(
                                n,
                                format!("generator kind must be holo or anti, found {k:?}"),
                            )
                        }
                    };
                    let mut vals = [0.0f64; 18];
                    for (k, t) in toks[3..].iter().enumerate() {
                        vals[k] = match t.parse::<f64>() {
                            Ok(x) if x.is_finite() => x,
                            _ => return perr(n, format!("bad number {t:?}")),
                        };
                    }
                    let m = Mat3::from_fn(|r, c| {
                        C64::new(vals[6 * r + 2 * c], vals[6 * r + 2 * c + 1])
                    });
                    let g = Isometry::new(m, anti).map_err(|e| {
                        Error::InvalidInput(format!("generator {label}: {}", e.detail()))
                    })?;
                    gens.push((label, g));
                }
                "amalgam" | "hnn" => {
                    if decomposition_raw.is_some() {
                        return perr(n, "second decomposition block");
                    }
                    block = Some((n, toks[0].to_string(), Vec::new()));
                }
                other => return perr(n, format!("unexpected directive {other:?}")),
            }
        }
        if let Some((start, _, _)) = block {
            return perr(start, "decomposition block is not closed by end");
        }
        if gens.is_empty() {
            return Err(Error::InvalidInput(
                "group file declares no generators".into(),
            ));
        }
        let group = GroupPresentation::new(gens).map_err(|e| match e {
            Error::InvalidInput(m) => Error::Format(m),
            e => e,
        })?;
        let decomposition = match decomposition_raw {
            None => None,
            Some((start, kind, entries)) => {
                Some(parse_decomposition(&group, start, &kind, &entries)?)
            }
        };
        Ok(Self {
            group,
            decomposition,
        })
    }

    /// Canonical text: header, generators, decomposition; comments are dropped.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{GROUP_HEADER}").unwrap();
        for (label, g) in self.group.generators() {
            write!(
                s,
                "gen {label} {}",
                if g.is_antiholomorphic() {
                    "anti"
                } else {
                    "holo"
                }
            )
            .unwrap();
            for r in 0..3 {
                for c in 0..3 {
                    let z = g.matrix()[(r, c)];
                    write!(s, " {} {}", fmt_f64(z.re), fmt_f64(z.im)).unwrap();
                }
            }
            s.push('\n');
        }
        if let Some(d) = &self.decomposition {
            let names = |ids: &[usize]| -> String {
                ids.iter()
                    .map(|&i| self.group.labels().nth(i).unwrap_or("?"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            match d {
                Decomposition::Amalgam { g0, g1, g2 } => {
                    writeln!(
                        s,
                        "amalgam\ng0 {}\ng1 {}\ng2 {}\nend",
                        names(g0),
                        names(g1),
                        names(g2)
                    )
                    .unwrap();
                }
                Decomposition::Hnn { g0, g1, stable } => {
                    writeln!(
                        s,
                        "hnn\ng0 {}\ng1 {}\nstable {}\nend",
                        names(g0),
                        names(g1),
                        names(&[*stable])
                    )
                    .unwrap();
                }
            }
        }
        s
    }
}

fn parse_decomposition(
    group: &GroupPresentation,
    start: usize,
    kind: &str,
    entries: &[(String, Vec<String>)],
) -> Result<Decomposition> {
    let lookup = |name: &str| -> Result<Vec<usize>> {
        let Some((_, labels)) = entries.iter().find(|(k, _)| k == name) else {
            return Err(Error::Format(format!(
                "{kind} block starting at line {start} lacks {name}"
            )));
        };
        labels
            .iter()
            .map(|l| {
                group
                    .index_of(l)
                    .ok_or_else(|| Error::Format(format!("unknown label {l} in {name}")))
            })
            .collect()
    };
    let allowed: &[&str] = if kind == "amalgam" {
        &["g0", "g1", "g2"]
    } else {
        &["g0", "g1", "stable"]
    };
    if let Some((k, _)) = entries.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(Error::Format(format!(
            "unexpected entry {k} in {kind} block"
        )));
    }
    let d = if kind == "amalgam" {
        Decomposition::Amalgam {
            g0: lookup("g0")?,
            g1: lookup("g1")?,
            g2: lookup("g2")?,
        }
    } else {
        let stable = lookup("stable")?;
        if stable.len() != 1 {
            return Err(Error::Format(
                "hnn block needs exactly one stable letter".into(),
            ));
        }
        Decomposition::Hnn {
            g0: lookup("g0")?,
            g1: lookup("g1")?,
            stable: stable[0],
        }
    };
    let mut all: Vec<usize> = match &d {
        Decomposition::Amalgam { g0, g1, g2 } => g0.iter().chain(g1).chain(g2).copied().collect(),
        Decomposition::Hnn { g0, g1, stable } => {
            g0.iter().chain(g1).copied().chain([*stable]).collect()
        }
    };
    all.sort_unstable();
    if all != (0..group.len()).collect::<Vec<_>>() {
        return Err(Error::Format(
            "decomposition labels must partition the generators".into(),
        ));
    }
    Ok(d)
}

/// CSV rows for the finite points; infinity is skipped.
pub fn write_point_cloud(points: &[HoroPoint]) -> String {
    let mut s = String::with_capacity(64 * points.len() + 16);
    writeln!(s, "{CSV_HEADER}").unwrap();
    for p in points {
        if let Some((xi, v, _)) = p.coords() {
            writeln!(s, "{},{},{}", fmt_f64(xi.re), fmt_f64(xi.im), fmt_f64(v)).unwrap();
        }
    }
    s
}

pub fn read_point_cloud(text: &str) -> Result<Vec<HoroPoint>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return perr(1, format!("expected CSV header {CSV_HEADER:?}")),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return perr(i + 1, "expected three columns");
        }
        let mut v = [0.0; 3];
        for k in 0..3 {
            v[k] = match f[k].trim().parse::<f64>() {
                Ok(x) if x.is_finite() => x,
                _ => return perr(i + 1, format!("bad number {:?}", f[k])),
            };
        }
        out.push(HoroPoint::boundary(C64::new(v[0], v[1]), v[2]));
    }
    Ok(out)
}

/// The 2-plane a render projects onto.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    /// `(Re ξ, Im ξ)`
    Xi,
    /// `(Re ξ, v)`
    Slice,
}

impl std::str::FromStr for Projection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xi" => Ok(Projection::Xi),
            "slice" => Ok(Projection::Slice),
            _ => Err(Error::InvalidInput(format!(
                "unknown projection {s:?}, expected xi or slice"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// `x0,x1,y0,y1`
pub fn parse_window(s: &str) -> Result<Window> {
    let v = parse_list(s, 4, "window")?;
    if !(v[0] < v[1] && v[2] < v[3]) {
        return Err(Error::InvalidInput(format!("window {s:?} is empty")));
    }
    Ok(Window {
        x0: v[0],
        x1: v[1],
        y0: v[2],
        y1: v[3],
    })
}

/// `WxH`
pub fn parse_size(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidInput(format!("size {s:?} must look like 640x480"));
    let (w, h) = s.split_once('x').ok_or_else(bad)?;
    let (w, h) = (
        w.parse::<usize>().map_err(|_| bad())?,
        h.parse::<usize>().map_err(|_| bad())?,
    );
    if w == 0 || h == 0 || w * h > 1 << 26 {
        return Err(bad());
    }
    Ok((w, h))
}

fn parse_list(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidInput(format!("bad {what} {s:?}")))?;
    if v.len() != n {
        return Err(Error::InvalidInput(format!(
            "{what} needs {n} comma-separated numbers"
        )));
    }
    Ok(v)
}

/// Comma-separated positive numbers.
pub fn parse_scales(s: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| *x > 0.0 && x.is_finite())
        })
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidInput(format!("bad scales {s:?}")))?;
    Ok(v)
}

/// `a:b:n` gives `n` evenly spaced values from `a` to `b` inclusive; a plain
/// number gives itself.
pub fn parse_sweep(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidInput(format!("bad sweep {s:?}, expected a number or a:b:n"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [x] => Ok(vec![x
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(bad)?]),
        [a, b, n] => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            if n == 0 || !a.is_finite() || !b.is_finite() {
                return Err(bad());
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n)
                .map(|k| {
                    if k == n - 1 {
                        b
                    } else {
                        a + (b - a) * k as f64 / (n - 1) as f64
                    }
                })
                .collect())
        }
        _ => Err(bad()),
    }
}

/// Binary PPM (P6): black background, white where at least one point lands.
pub fn render_ppm(
    points: &[HoroPoint],
    proj: Projection,
    window: &Window,
    size: (usize, usize),
) -> Vec<u8> {
    let (w, h) = size;
    let mut mask = vec![false; w * h];
    for p in points {
        let Some((xi, v, _)) = p.coords() else {
            continue;
        };
        let (x, y) = match proj {
            Projection::Xi => (xi.re, xi.im),
            Projection::Slice => (xi.re, v),
        };
        let fx = (x - window.x0) / (window.x1 - window.x0) * w as f64;
        let fy = (window.y1 - y) / (window.y1 - window.y0) * h as f64;
        if fx >= 0.0 && fy >= 0.0 && fx < w as f64 && fy < h as f64 {
            mask[fy as usize * w + fx as usize] = true;
        }
    }
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(3 * w * h);
    for m in mask {
        let c = if m { 255 } else { 0 };
        out.extend_from_slice(&[c, c, c]);
    }
    out
}

/// `key = value` lines with unique keys, in insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, key: &str, value: String) {
        assert!(
            !self.entries.iter().any(|(k, _)| k == key),
            "duplicate report key {key}"
        );
        self.entries.push((key.to_string(), value));
    }

    pub fn float(&mut self, key: &str, x: f64) -> &mut Self {
        self.push(key, fmt_f64(x));
        self
    }

    pub fn int(&mut self, key: &str, n: usize) -> &mut Self {
        self.push(key, n.to_string());
        self
    }

    pub fn text(&mut self, key: &str, s: impl Into<String>) -> &mut Self {
        self.push(key, s.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Report::new();
        for (i, line) in text.lines().enumerate() {
            let Some((k, v)) = line.split_once(" = ") else {
                return perr(i + 1, "expected key = value");
            };
            if r.get(k).is_some() {
                return perr(i + 1, format!("duplicate key {k}"));
            }
            r.push(k, v.to_string());
        }
        Ok(r)
    }
}
