//! Command-line front end: curvature reports, field profiles, flux scans,
//! spectral Poisson runs and the three-radius field comparison.
//!
//! Every command renders its output to a `String` first; [`run`] then sends
//! it to stdout or writes it atomically to `--out`.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use closed_coulomb::fields::{
    field_flat_2d, field_flat_3d, field_sphere2, field_sphere3_within, Charge, FieldLaw,
};
use closed_coulomb::gauss::flux_invariance_scan;
use closed_coulomb::geometry::{ChartKind, DerivativeEngine, MetricChart};
use closed_coulomb::poisson::{expand_pole_pair, solve_poisson, Summation, Synthesis};
use closed_coulomb::table::{sig12, to_csv};
use num_complex::Complex64;

/// Closest approach to a pole for `figure3` rows; far below the default
/// grid, so only explicit `--r-min` values come near it.
const FIGURE3_MARGIN: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error(transparent)]
    NonNeutral(closed_coulomb::Error),
    #[error(transparent)]
    Core(closed_coulomb::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl From<closed_coulomb::Error> for CliError {
    fn from(e: closed_coulomb::Error) -> Self {
        match e {
            closed_coulomb::Error::NonNeutralSource { .. } => CliError::NonNeutral(e),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    /// 2 for physics-constraint violations, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NonNeutral(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "closed-coulomb",
    version,
    about = "Coulomb's law on closed spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Christoffel symbols, Riemann/Ricci components and curvature scalars.
    Curvature(CurvatureArgs),
    /// Radial field profile of a point charge next to the flat-space law.
    Field(FieldArgs),
    /// Gauss-law flux through a family of contours.
    Flux(FluxArgs),
    /// Spectral Poisson solve for a pole pair on the 2-sphere.
    Poisson(PoissonArgs),
    /// Field on S³ against the flat-space law, one CSV per radius.
    Figure3(Figure3Args),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file (directory for figure3); stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Number of grid points.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Grid start; defaults to 0.01·πR.
    #[arg(long)]
    pub r_min: Option<f64>,
    /// Grid end; defaults to 0.99·πR.
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[arg(long, default_value = "sphere2:1")]
    pub chart: String,
    /// Single point, comma separated; otherwise a sweep along the first coordinate.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10)]
    pub grid_n: usize,
    /// Ignore analytic metric derivatives.
    #[arg(long)]
    pub finite_difference: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[arg(long, default_value = "sphere3:1")]
    pub chart: String,
    /// Grid extent for flat charts; must match the chart radius otherwise.
    #[arg(long)]
    pub radius: Option<f64>,
    /// q/(2πε₀) in two dimensions, q/(4πε₀) in three.
    #[arg(long, default_value_t = 1.0)]
    pub q_scale: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct FluxArgs {
    #[arg(long, default_value = "sphere2:1")]
    pub chart: String,
    /// Contour extent for flat charts.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub q_scale: f64,
    /// Number of contours.
    #[arg(long, default_value_t = 50)]
    pub grid_n: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PoissonArgs {
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 512)]
    pub lmax: usize,
    /// q/(2πε₀) of the north-pole charge.
    #[arg(long, default_value_t = 1.0)]
    pub q_scale: f64,
    /// Number of θ samples over [π/4, 3π/4].
    #[arg(long, default_value_t = 201)]
    pub grid_n: usize,
    /// Plain partial sums instead of σ-factor damping.
    #[arg(long)]
    pub truncated: bool,
    /// Add this monopole coefficient to the source before solving.
    #[arg(long, allow_hyphen_values = true)]
    pub inject_monopole: Option<f64>,
    /// Also write the potential spectrum (l,m,re,im) here.
    #[arg(long)]
    pub spectrum_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct Figure3Args {
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,3")]
    pub radius: Vec<f64>,
    #[arg(long, default_value_t = 400)]
    pub grid_n: usize,
    /// Grid start as a fraction of πR.
    #[arg(long, default_value_t = 0.01)]
    pub r_min_frac: f64,
    /// Grid end as a fraction of πR.
    #[arg(long, default_value_t = 0.99)]
    pub r_max_frac: f64,
    /// Output directory; files are named `figure3_R<radius>.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` and executes; the caller maps the error to an exit code.
pub fn run<I, T>(args: I) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    execute(cli.command)
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Curvature(a) => {
            let text = cmd_curvature(&a)?;
            emit(&a.output, &text)
        }
        Command::Field(a) => {
            let text = cmd_field(&a)?;
            emit(&a.output, &text)
        }
        Command::Flux(a) => {
            let text = cmd_flux(&a)?;
            emit(&a.output, &text)
        }
        Command::Poisson(a) => {
            let (text, spectrum) = cmd_poisson(&a)?;
            if let Some(path) = &a.spectrum_out {
                write_atomic(path, &spectrum)?;
            }
            emit(&a.output, &text)
        }
        Command::Figure3(a) => {
            for (path, text) in cmd_figure3(&a)? {
                write_atomic(&path, &text)?;
            }
            Ok(())
        }
    }
}

fn emit(output: &Output, text: &str) -> CliResult<()> {
    match &output.out {
        Some(path) => write_atomic(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, text: &str) -> CliResult<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn chart_from_id(id: &str) -> CliResult<MetricChart> {
    MetricChart::from_id(id).map_err(|e| CliError::Usage(e.to_string()))
}

/// Uniform grid of `n` points on `[lo, hi]`, which must sit strictly inside
/// `(0, upper)`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize, upper: f64) -> CliResult<Vec<f64>> {
    if n < 2 {
        return Err(CliError::BadGrid(format!(
            "need at least 2 points, got {n}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi && hi < upper) {
        return Err(CliError::BadGrid(format!(
            "range [{lo}, {hi}] must lie strictly inside (0, {upper})"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

fn closed_form_ricci_scalar(kind: ChartKind) -> Option<f64> {
    match kind {
        ChartKind::Flat | ChartKind::Polar3 => Some(0.0),
        ChartKind::Sphere2 { radius } => Some(2.0 / (radius * radius)),
        ChartKind::Sphere3 { radius } => Some(6.0 / (radius * radius)),
        ChartKind::Frw { radius, k } => Some(6.0 * k as f64 / (radius * radius)),
        ChartKind::Custom => None,
    }
}

/// Interior reference point: domain midpoints, 1 on half-lines, 0 on the line.
fn reference_point(chart: &MetricChart) -> Vec<f64> {
    chart
        .domain()
        .iter()
        .map(|iv| match (iv.lo.is_finite(), iv.hi.is_finite()) {
            (true, true) => 0.5 * (iv.lo + iv.hi),
            (true, false) => iv.lo + 1.0,
            (false, true) => iv.hi - 1.0,
            (false, false) => 0.0,
        })
        .collect()
}

/// Sweep of the first coordinate, 0.1 inside finite edges.
fn sweep_points(chart: &MetricChart, n: usize) -> CliResult<Vec<Vec<f64>>> {
    let iv = chart.domain()[0];
    let lo = if iv.lo.is_finite() { iv.lo + 0.1 } else { -1.0 };
    let hi = if iv.hi.is_finite() {
        iv.hi - 0.1
    } else {
        lo + 2.0
    };
    if n < 2 {
        return Err(CliError::BadGrid(format!(
            "need at least 2 points, got {n}"
        )));
    }
    let base = reference_point(chart);
    Ok((0..n)
        .map(|i| {
            let mut p = base.clone();
            p[0] = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            p
        })
        .collect())
}

pub fn cmd_curvature(args: &CurvatureArgs) -> CliResult<String> {
    let chart = chart_from_id(&args.chart)?;
    let d = chart.dimension();
    let engine = if args.finite_difference {
        DerivativeEngine::finite_difference()
    } else {
        DerivativeEngine::default()
    };
    let points = match &args.point {
        Some(p) if p.len() != d => {
            return Err(CliError::Usage(format!(
                "--point needs {d} coordinates for {}, got {}",
                chart.id(),
                p.len()
            )))
        }
        Some(p) => vec![p.clone()],
        None => sweep_points(&chart, args.grid_n)?,
    };
    let names = chart.coord_names();
    let expected = closed_form_ricci_scalar(chart.kind());

    // Unique components only: Γ^i_{jk} with j ≤ k, R_{ijkl} with i < j,
    // k < l and (i, j) ≤ (k, l), Ricci with i ≤ j.
    let mut gamma_idx = Vec::new();
    let mut riemann_idx = Vec::new();
    let mut ricci_idx = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for k in j..d {
                gamma_idx.push((i, j, k));
            }
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            for k in 0..d {
                for l in k + 1..d {
                    if (i, j) <= (k, l) {
                        riemann_idx.push((i, j, k, l));
                    }
                }
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            ricci_idx.push((i, j));
        }
    }

    let mut header: Vec<String> = names.to_vec();
    header.extend(
        gamma_idx
            .iter()
            .map(|&(i, j, k)| format!("gamma_{}_{}_{}", names[i], names[j], names[k])),
    );
    header.extend(riemann_idx.iter().map(|&(i, j, k, l)| {
        format!(
            "riemann_{}_{}_{}_{}",
            names[i], names[j], names[k], names[l]
        )
    }));
    header.extend(
        ricci_idx
            .iter()
            .map(|&(i, j)| format!("ricci_{}_{}", names[i], names[j])),
    );
    header.extend(
        [
            "ricci_scalar",
            "gauss_curvature",
            "ricci_scalar_expected",
            "ricci_scalar_delta",
        ]
        .map(String::from),
    );

    let mut rows = Vec::with_capacity(points.len());
    for p in &points {
        let rep = engine.curvature(&chart, p)?;
        let mut row: Vec<f64> = p.clone();
        row.extend(gamma_idx.iter().map(|&ix| rep.gamma_second[ix]));
        row.extend(riemann_idx.iter().map(|&ix| rep.riemann_lowered[ix]));
        row.extend(ricci_idx.iter().map(|&(i, j)| rep.ricci.get(i, j)));
        rows.push((row, rep.ricci_scalar, rep.gauss_curvature));
    }

    let independent = closed_coulomb::geometry::independent_component_count(d as u64);
    match args.output.format {
        Format::Csv => {
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            Ok(to_csv(
                &header,
                rows.iter().map(|(row, scalar, gauss)| {
                    let mut cells: Vec<String> = row.iter().map(|&v| sig12(v)).collect();
                    cells.push(sig12(*scalar));
                    cells.push(gauss.map(sig12).unwrap_or_default());
                    cells.push(expected.map(sig12).unwrap_or_default());
                    cells.push(expected.map(|e| sig12(scalar - e)).unwrap_or_default());
                    cells
                }),
            ))
        }
        Format::Text => {
            let mut out = format!(
                "chart {}  dimension {d}  independent Riemann components {independent}\n",
                chart.id()
            );
            for (row, scalar, gauss) in &rows {
                let coords: Vec<String> = names
                    .iter()
                    .zip(row)
                    .map(|(n, v)| format!("{n}={v:.6}"))
                    .collect();
                out.push_str(&format!("{}  ricci_scalar={scalar:.12}", coords.join(" ")));
                if let Some(k) = gauss {
                    out.push_str(&format!("  gauss_curvature={k:.12}"));
                }
                if let Some(e) = expected {
                    out.push_str(&format!("  delta={:.3e}", scalar - e));
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

/// Radius that sets the grid: the chart's own, or `--radius` for flat charts.
fn grid_radius(chart: &MetricChart, flag: Option<f64>) -> CliResult<f64> {
    match (chart.radius(), flag) {
        (Some(r), None) => Ok(r),
        (Some(r), Some(f)) if f == r => Ok(r),
        (Some(r), Some(f)) => Err(CliError::Usage(format!(
            "--radius {f} conflicts with chart {} (radius {r})",
            chart.id()
        ))),
        (None, Some(f)) if f.is_finite() && f > 0.0 => Ok(f),
        (None, Some(f)) => Err(CliError::Usage(format!(
            "--radius must be positive, got {f}"
        ))),
        (None, None) => Ok(1.0),
    }
}

pub fn cmd_field(args: &FieldArgs) -> CliResult<String> {
    let chart = chart_from_id(&args.chart)?;
    let law = FieldLaw::for_chart(&chart)
        .ok_or_else(|| CliError::Usage(format!("no field law for chart {}", chart.id())))?;
    let radius = grid_radius(&chart, args.radius)?;
    let span = PI * radius;
    let grid = uniform_grid(
        args.grid.r_min.unwrap_or(0.01 * span),
        args.grid.r_max.unwrap_or(0.99 * span),
        args.grid.grid_n.unwrap_or(400),
        span,
    )?;
    let two_d = matches!(law, FieldLaw::Flat2 | FieldLaw::Sphere2 { .. });
    let charge = if two_d {
        Charge::from_scale_2d(args.q_scale)
    } else {
        Charge::from_scale_3d(args.q_scale)
    };
    let rows = grid
        .iter()
        .map(|&r| {
            let modified = law.eval(charge, r)?;
            let coulomb = if two_d {
                field_flat_2d(charge, r)?
            } else {
                field_flat_3d(charge, r)?
            };
            Ok([r, modified, coulomb])
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(render_profile(args.output.format, chart.id(), &rows))
}

fn render_profile(format: Format, label: &str, rows: &[[f64; 3]]) -> String {
    match format {
        Format::Csv => to_csv(
            &["r", "E_modified", "E_coulomb"],
            rows.iter()
                .map(|row| row.iter().map(|&v| sig12(v)).collect()),
        ),
        Format::Text => {
            let mut out = format!("{label}: {} points\n", rows.len());
            out.push_str(&format!(
                "{:>20} {:>20} {:>20}\n",
                "r", "E_modified", "E_coulomb"
            ));
            for [r, m, c] in rows {
                out.push_str(&format!("{r:>20.12} {m:>20.12} {c:>20.12}\n"));
            }
            out
        }
    }
}

pub fn cmd_flux(args: &FluxArgs) -> CliResult<String> {
    let chart = chart_from_id(&args.chart)?;
    let law = FieldLaw::for_chart(&chart)
        .ok_or_else(|| CliError::Usage(format!("no field law for chart {}", chart.id())))?;
    let params = match law {
        FieldLaw::Sphere2 { .. } | FieldLaw::Sphere3 { .. } => {
            uniform_grid(0.05, PI - 0.05, args.grid_n, PI)?
        }
        FieldLaw::Flat2 | FieldLaw::Flat3 => {
            let span = PI * grid_radius(&chart, args.radius)?;
            uniform_grid(0.01 * span, 0.99 * span, args.grid_n, span)?
        }
    };
    let charge = match law {
        FieldLaw::Flat2 | FieldLaw::Sphere2 { .. } => Charge::from_scale_2d(args.q_scale),
        _ => Charge::from_scale_3d(args.q_scale),
    };
    let report = flux_invariance_scan(&chart, charge, &params)?;
    Ok(match args.output.format {
        Format::Csv => report.to_csv(),
        Format::Text => format!(
            "chart {}\ncontours {}\nexpected flux {}\nmax deviation {:e}\nmax relative deviation {:e}\n",
            report.chart,
            report.rows.len(),
            charge.flux(),
            report.max_abs_deviation(),
            report.max_relative_deviation()
        ),
    })
}

/// Returns the profile/summary text and the potential spectrum CSV.
pub fn cmd_poisson(args: &PoissonArgs) -> CliResult<(String, String)> {
    let charge = Charge::from_scale_2d(args.q_scale);
    let radius = args.radius;
    let mut source = expand_pole_pair(charge, radius, args.lmax)?;
    if let Some(m) = args.inject_monopole {
        source.set(0, 0, Complex64::new(m, 0.0))?;
    }
    let potential = solve_poisson(&source)?;
    let synthesis = Synthesis {
        summation: if args.truncated {
            Summation::Truncated
        } else {
            Summation::Lanczos
        },
        tail_tolerance: None,
    };
    let thetas = uniform_grid(PI / 4.0, 3.0 * PI / 4.0, args.grid_n, PI)?;
    let spectral = synthesis.field_theta(&potential, &thetas)?;
    let rows = thetas
        .iter()
        .zip(&spectral)
        .map(|(&t, &e)| {
            let exact = field_sphere2(charge, radius * t, radius)?;
            Ok([radius * t, e, exact, ((e - exact) / exact).abs()])
        })
        .collect::<CliResult<Vec<_>>>()?;
    let max_rel = rows.iter().fold(0.0f64, |m, r| m.max(r[3]));
    let text = match args.output.format {
        Format::Csv => to_csv(
            &["r", "E_spectral", "E_closed", "relative_error"],
            rows.iter().map(|row| row.iter().map(|&v| sig12(v)).collect()),
        ),
        Format::Text => format!(
            "l_max {}\nradius {radius}\nmonopole {:e}\nsummation {:?}\nsamples {}\nmax relative field error {:e}\n",
            args.lmax,
            source.monopole(),
            synthesis.summation,
            rows.len(),
            max_rel
        ),
    };
    Ok((text, potential.to_csv()))
}

/// File name for one radius, e.g. `figure3_R0.5.csv`.
pub fn figure3_file_name(radius: f64) -> String {
    format!("figure3_R{radius}.csv")
}

/// Grid of `n` points over `[lo_frac·πR, hi_frac·πR]`, plus the equator
/// `πR/2` if the grid misses it.
pub fn figure3_grid(radius: f64, n: usize, lo_frac: f64, hi_frac: f64) -> CliResult<Vec<f64>> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(CliError::BadGrid(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let span = PI * radius;
    let mut grid = uniform_grid(lo_frac * span, hi_frac * span, n, span)?;
    let equator = 0.5 * span;
    if !grid.contains(&equator) && grid[0] < equator && equator < grid[n - 1] {
        let at = grid.partition_point(|&r| r < equator);
        grid.insert(at, equator);
    }
    Ok(grid)
}

/// `(path, csv)` per radius, computed with `q/(4πε₀) = 1`.
pub fn cmd_figure3(args: &Figure3Args) -> CliResult<Vec<(PathBuf, String)>> {
    if args.radius.is_empty() {
        return Err(CliError::Usage("--radius needs at least one value".into()));
    }
    let charge = Charge::from_scale_3d(1.0);
    args.radius
        .iter()
        .map(|&radius| {
            let grid = figure3_grid(radius, args.grid_n, args.r_min_frac, args.r_max_frac)?;
            let rows = grid
                .iter()
                .map(|&r| {
                    Ok([
                        r,
                        field_sphere3_within(charge, r, radius, FIGURE3_MARGIN)?,
                        field_flat_3d(charge, r)?,
                    ])
                })
                .collect::<CliResult<Vec<_>>>()?;
            let text = render_profile(Format::Csv, "", &rows);
            Ok((args.out.join(figure3_file_name(radius)), text))
        })
        .collect()
}
