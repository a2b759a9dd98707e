use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cxhyp::boundary::{cartan_invariant, heis_inverse, sphere_tangency, Tangency};
use cxhyp::deformations::{
    bend, bending_marking, qf_marking, qf_point, BendingFamily, QFCurveConfig, DEFAULT_ETA_MAX,
    QF_PARAMETER_NOTE,
};
use cxhyp::groups::{box_dimension, limit_set_sample, GroupPresentation, LimitSample};
use cxhyp::io::{
    fmt_f64, parse_scales, parse_size, parse_sweep, parse_window, read_point_cloud, render_ppm,
    write_point_cloud, GroupFile, Projection, Report, Window,
};
use cxhyp::{Error, HoroPoint, Isometry, IsometryKind, C64};

mod config;

const DEFAULT_MAX_RADIUS: usize = 12;
const MIN_DIMENSION_POINTS: usize = 1000;

#[derive(Parser)]
#[command(
    name = "cxhyp",
    version,
    about = "Complex hyperbolic geometry in dimension two"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the element named by a word in a group file
    Classify {
        group: PathBuf,
        word: String,
        /// loxodromic decision tolerance
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the limit set from loxodromic fixed points of a word ball
    Limitset {
        group: PathBuf,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        /// output prefix for `.csv` and `.report`
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        render: RenderArgs,
    },
    /// Bend a split Fuchsian group
    Bend {
        group: PathBuf,
        /// angle or sweep `a:b:n`
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Points on the quasi-Fuchsian curve of reflection groups
    Qfcurve {
        /// TOML configuration; the default configuration when absent
        #[arg(long)]
        config: Option<PathBuf>,
        /// parameter or sweep `a:b:n`
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cartan angular invariant of three boundary points (`re,im,v` or `inf`)
    Cartan {
        #[arg(allow_hyphen_values = true)]
        p0: String,
        #[arg(allow_hyphen_values = true)]
        p1: String,
        #[arg(allow_hyphen_values = true)]
        p2: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Box-counting dimension of a point cloud in the Cygan metric
    Dimension {
        cloud: PathBuf,
        #[arg(long, default_value = "0.2,0.1,0.05,0.025")]
        scales: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a point cloud to PPM
    Render {
        cloud: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value = "512x512")]
        size: String,
        #[arg(long, default_value = "xi")]
        projection: String,
    },
}

#[derive(Args)]
struct RenderArgs {
    /// also write a PPM here
    #[arg(long)]
    render: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, default_value = "-4,4,-4,4")]
    window: String,
    #[arg(long, default_value = "512x512")]
    size: String,
    #[arg(long, default_value = "xi")]
    projection: String,
}

enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn line(&self) -> String {
        let flat = |s: String| s.replace('\n', " ");
        match self {
            CliError::Core(e) => flat(format!("{}: {}", e.code(), e.detail())),
            CliError::Io(p, e) => flat(format!("io: {}: {e}", p.display())),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Files are assembled in memory and written only once every computation succeeded.
#[derive(Default)]
struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
    stdout: Option<String>,
}

impl Outputs {
    fn add(&mut self, path: PathBuf, bytes: impl Into<Vec<u8>>) {
        self.files.push((path, bytes.into()));
    }

    fn report(&mut self, out: Option<PathBuf>, r: &Report) {
        match out {
            Some(p) => self.add(p, r.render()),
            None => self.stdout = Some(r.render()),
        }
    }

    fn commit(self) -> CliResult<()> {
        for (path, bytes) in &self.files {
            std::fs::write(path, bytes).map_err(|e| CliError::Io(path.clone(), e))?;
        }
        if let Some(s) = self.stdout {
            print!("{s}");
        }
        Ok(())
    }
}

fn read_text(p: &Path) -> CliResult<String> {
    std::fs::read_to_string(p).map_err(|e| CliError::Io(p.to_path_buf(), e))
}

fn max_radius() -> CliResult<usize> {
    match std::env::var("CXHYP_MAX_RADIUS") {
        Err(_) => Ok(DEFAULT_MAX_RADIUS),
        Ok(s) => s.trim().parse().map_err(|_| {
            Error::Config(format!(
                "CXHYP_MAX_RADIUS must be a non-negative integer, got {s:?}"
            ))
            .into()
        }),
    }
}

fn check_radius(r: usize) -> CliResult<()> {
    let cap = max_radius()?;
    if r > cap {
        return Err(Error::Resource(format!(
            "radius {r} exceeds the cap {cap} (set CXHYP_MAX_RADIUS)"
        ))
        .into());
    }
    Ok(())
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// `prefix` for a single parameter value, `prefix_<name><value>` inside a sweep.
fn stamped(prefix: &Path, name: &str, value: f64, sweep: bool) -> PathBuf {
    if !sweep {
        return prefix.to_path_buf();
    }
    let mut s = prefix.as_os_str().to_owned();
    s.push(format!("_{name}{value:.6}"));
    PathBuf::from(s)
}

fn point_text(p: &HoroPoint) -> String {
    match p.coords() {
        None => "infinity".into(),
        Some((xi, v, u)) if u == 0.0 => {
            format!("{},{},{}", fmt_f64(xi.re), fmt_f64(xi.im), fmt_f64(v))
        }
        Some((xi, v, u)) => format!(
            "{},{},{},{}",
            fmt_f64(xi.re),
            fmt_f64(xi.im),
            fmt_f64(v),
            fmt_f64(u)
        ),
    }
}

fn parse_point(s: &str) -> CliResult<HoroPoint> {
    if matches!(s.trim(), "inf" | "infinity") {
        return Ok(HoroPoint::Infinity);
    }
    let v: Option<Vec<f64>> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect();
    match v.as_deref() {
        Some([a, b, c]) => Ok(HoroPoint::boundary(C64::new(*a, *b), *c)),
        _ => Err(Error::InvalidInput(format!("point {s:?} must be re,im,v or inf")).into()),
    }
}

fn limit_report(r: &mut Report, s: &LimitSample) {
    let max_v = s
        .points
        .iter()
        .filter_map(|p| p.point.coords())
        .map(|c| c.1.abs())
        .fold(0.0, f64::max);
    r.int("limit.radius", s.radius)
        .int("limit.candidates", s.candidates)
        .int("limit.count", s.points.len())
        .int(
            "limit.duplicates",
            s.candidates - s.points.len() - s.infinity_count,
        )
        .int("limit.infinity", s.infinity_count)
        .float("limit.max_v", max_v);
}

/// Conjugates a parabolic so that its fixed point is infinity.
fn parabolic_at_infinity(g: &Isometry, fixed: &HoroPoint) -> CliResult<Isometry> {
    let Some((xi, v, _)) = fixed.coords() else {
        return Ok(*g);
    };
    let (nxi, nv) = heis_inverse((xi, v));
    let m = Isometry::heisenberg_inversion().compose(&Isometry::heisenberg_translation(nxi, nv));
    Ok(g.conjugate_by(&m))
}

fn classify(
    group: &Path,
    word: &str,
    tol: Option<f64>,
    out: Option<PathBuf>,
) -> CliResult<Outputs> {
    let f = GroupFile::parse(&read_text(group)?)?;
    let w = f.group.parse_word(word)?;
    let g = f.group.evaluate(&w);
    let c = match tol {
        Some(t) if t > 0.0 && t.is_finite() => g.classify_with(t),
        Some(t) => {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {t}")).into())
        }
        None => g.classify(),
    };
    let mut r = Report::new();
    r.text("word", f.group.format_word(&w))
        .text("class.kind", c.kind.to_string())
        .text("class.identity", c.identity.to_string())
        .text("class.antiholomorphic", c.antiholomorphic.to_string())
        .text("class.confident", c.confident.to_string());
    let eig = g.eigenvalues();
    for (k, z) in eig.iter().enumerate() {
        r.float(&format!("eigen.{k}.modulus"), z.norm())
            .float(&format!("eigen.{k}.arg"), z.arg());
    }
    if c.identity {
        return Ok(single_report(out, r));
    }
    let fixed = g.fixed_boundary_points()?;
    r.int("fixed.count", fixed.len());
    for (k, p) in fixed.iter().enumerate() {
        r.text(&format!("fixed.{k}"), point_text(p));
    }
    match c.kind {
        IsometryKind::Loxodromic => {
            r.float("loxodromic.translation_length", g.translation_length()?);
        }
        IsometryKind::Parabolic if !c.antiholomorphic => {
            let nf = parabolic_at_infinity(&g, &fixed[0])?.parabolic_normal_form()?;
            r.float("parabolic.angle", nf.rotation_angle).text(
                "parabolic.translation",
                point_text(&HoroPoint::boundary(nf.translation.0, nf.translation.1)),
            );
        }
        _ => {}
    }
    Ok(single_report(out, r))
}

fn single_report(out: Option<PathBuf>, r: Report) -> Outputs {
    let mut o = Outputs::default();
    o.report(out, &r);
    o
}

fn render_settings(
    window: &str,
    size: &str,
    projection: &str,
) -> CliResult<(Window, (usize, usize), Projection)> {
    Ok((
        parse_window(window)?,
        parse_size(size)?,
        projection.parse()?,
    ))
}

fn limitset(group: &Path, radius: usize, out: &Path, ra: &RenderArgs) -> CliResult<Outputs> {
    check_radius(radius)?;
    let settings = render_settings(&ra.window, &ra.size, &ra.projection)?;
    let f = GroupFile::parse(&read_text(group)?)?;
    let s = limit_set_sample(&f.group, radius)?;
    let pts = s.finite_points();
    let mut r = Report::new();
    limit_report(&mut r, &s);
    let mut o = Outputs::default();
    o.add(with_suffix(out, "csv"), write_point_cloud(&pts));
    o.add(with_suffix(out, "report"), r.render());
    if let Some(path) = &ra.render {
        let (w, size, proj) = settings;
        o.add(path.clone(), render_ppm(&pts, proj, &w, size));
    }
    Ok(o)
}

fn bend_cmd(group: &Path, eta: &str, radius: usize, out: &Path) -> CliResult<Outputs> {
    check_radius(radius)?;
    let etas = parse_sweep(eta)?;
    let file = GroupFile::parse(&read_text(group)?)?;
    let Some(decomposition) = file.decomposition.clone() else {
        return Err(Error::Format("group file has no amalgam or hnn block".into()).into());
    };
    let family = BendingFamily::new(file.group.clone(), decomposition.clone(), DEFAULT_ETA_MAX)?;
    let base = bending_marking(&family, &family.group)?.triples;
    let base_cartan: Vec<f64> = base
        .iter()
        .map(|t| cartan_invariant(&t[0], &t[1], &t[2]))
        .collect::<Result<_, _>>()?;
    let mut o = Outputs::default();
    for &eta in &etas {
        let g = bend(&family, eta)?;
        let s = limit_set_sample(&g, radius)?;
        let mut r = Report::new();
        r.float("family.eta", eta);
        for (k, t) in bending_marking(&family, &g)?.triples.iter().enumerate() {
            let a = cartan_invariant(&t[0], &t[1], &t[2])?;
            r.float(&format!("cartan.triple{k}"), a)
                .float(&format!("cartan.base{k}"), base_cartan[k])
                .float(&format!("cartan.deviation{k}"), (a - base_cartan[k]).abs());
        }
        limit_report(&mut r, &s);
        let prefix = stamped(out, "eta", eta, etas.len() > 1);
        let gf = GroupFile {
            group: g,
            decomposition: Some(decomposition.clone()),
        };
        o.add(with_suffix(&prefix, "group"), gf.serialize());
        o.add(
            with_suffix(&prefix, "csv"),
            write_point_cloud(&s.finite_points()),
        );
        o.add(with_suffix(&prefix, "report"), r.render());
    }
    Ok(o)
}

fn involution_defect(g: &GroupPresentation) -> f64 {
    g.generators()
        .map(|(_, x)| x.compose(x).projective_distance(&Isometry::identity()))
        .fold(0.0, f64::max)
}

fn qfcurve(config: Option<&Path>, t: &str, radius: usize, out: &Path) -> CliResult<Outputs> {
    check_radius(radius)?;
    let ts = parse_sweep(t)?;
    let cfg = match config {
        Some(p) => config::load(&read_text(p)?)?,
        None => QFCurveConfig::default(),
    };
    let sphere_radius = cfg.validate()?;
    let tangency = match sphere_tangency(&cfg.spheres[0], &cfg.spheres[1], 1e-9) {
        Tangency::Tangent(p) => point_text(&p),
        other => format!("{other:?}"),
    };
    let mut o = Outputs::default();
    for &t in &ts {
        let pt = qf_point(&cfg, t)?;
        let s = limit_set_sample(&pt.group, radius)?;
        let mut r = Report::new();
        r.float("family.t", t)
            .text("family.note", QF_PARAMETER_NOTE)
            .float("config.s0", cfg.s0)
            .float("config.s1", cfg.s1)
            .float("config.sphere_radius", sphere_radius)
            .text("config.tangency", tangency.clone())
            .float("generators.involution_defect", involution_defect(&pt.group));
        let marking = qf_marking(&pt)?;
        for (k, w) in marking.parabolic_words.iter().enumerate() {
            let g = pt.group.evaluate(w);
            let nf = g.parabolic_normal_form()?;
            let key = if k == 0 {
                "parabolic".to_string()
            } else {
                format!("parabolic{k}")
            };
            r.text(&format!("{key}.word"), pt.group.format_word(w))
                .float(&format!("{key}.angle"), nf.rotation_angle);
        }
        for (k, tr) in marking.triples.iter().enumerate() {
            r.float(
                &format!("cartan.triple{k}"),
                cartan_invariant(&tr[0], &tr[1], &tr[2])?,
            );
        }
        limit_report(&mut r, &s);
        let prefix = stamped(out, "t", t, ts.len() > 1);
        o.add(
            with_suffix(&prefix, "group"),
            GroupFile {
                group: pt.group,
                decomposition: None,
            }
            .serialize(),
        );
        o.add(
            with_suffix(&prefix, "csv"),
            write_point_cloud(&s.finite_points()),
        );
        o.add(with_suffix(&prefix, "report"), r.render());
    }
    Ok(o)
}

fn cartan(p: [&str; 3], out: Option<PathBuf>) -> CliResult<Outputs> {
    let [a, b, c] = [parse_point(p[0])?, parse_point(p[1])?, parse_point(p[2])?];
    let mut r = Report::new();
    r.float("cartan.value", cartan_invariant(&a, &b, &c)?);
    Ok(single_report(out, r))
}

fn dimension(cloud: &Path, scales: &str, out: Option<PathBuf>) -> CliResult<Outputs> {
    let scales = parse_scales(scales)?;
    let pts = read_point_cloud(&read_text(cloud)?)?;
    if pts.len() < MIN_DIMENSION_POINTS {
        return Err(Error::InvalidInput(format!(
            "dimension estimate needs at least {MIN_DIMENSION_POINTS} points, got {}",
            pts.len()
        ))
        .into());
    }
    let fit = box_dimension(&pts, &scales)?;
    let mut r = Report::new();
    r.int("dimension.points", pts.len())
        .float("dimension.slope", fit.slope)
        .float("dimension.intercept", fit.intercept)
        .float("dimension.residual", fit.residual);
    for (k, (s, n)) in fit.counts.iter().enumerate() {
        r.float(&format!("dimension.scale{k}"), *s)
            .int(&format!("dimension.count{k}"), *n);
    }
    Ok(single_report(out, r))
}

fn render(
    cloud: &Path,
    out: &Path,
    window: &str,
    size: &str,
    projection: &str,
) -> CliResult<Outputs> {
    let (w, size, proj) = render_settings(window, size, projection)?;
    let pts = read_point_cloud(&read_text(cloud)?)?;
    let mut o = Outputs::default();
    o.add(out.to_path_buf(), render_ppm(&pts, proj, &w, size));
    Ok(o)
}

fn run(cli: Cli) -> CliResult<()> {
    let outputs = match cli.command {
        Command::Classify {
            group,
            word,
            tol,
            out,
        } => classify(&group, &word, tol, out)?,
        Command::Limitset {
            group,
            radius,
            out,
            render,
        } => limitset(&group, radius, &out, &render)?,
        Command::Bend {
            group,
            eta,
            radius,
            out,
        } => bend_cmd(&group, &eta, radius, &out)?,
        Command::Qfcurve {
            config,
            t,
            radius,
            out,
        } => qfcurve(config.as_deref(), &t, radius, &out)?,
        Command::Cartan { p0, p1, p2, out } => cartan([&p0, &p1, &p2], out)?,
        Command::Dimension { cloud, scales, out } => dimension(&cloud, &scales, out)?,
        Command::Render {
            cloud,
            out,
            window,
            size,
            projection,
        } => render(&cloud, &out, &window, &size, &projection)?,
    };
    outputs.commit()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("error: usage: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.line());
            ExitCode::FAILURE
        }
    }
}
