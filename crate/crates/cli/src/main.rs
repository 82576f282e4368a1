//! `cohort`: cohort-effect analysis of mortality surfaces from the command line.
//!
//! Exit codes: 0 success, 2 input/output or usage error, 3 geometry error,
//! 4 analytics error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod svg;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cohort_core::analytics::DEFAULT_TRIM_YEAR;
use cohort_core::export::{
    field_to_csv, field_to_json, peaks_to_csv, report_to_json, series_from_csv, series_from_json, series_to_csv,
    series_to_json, u_shape_to_json, SERIES_CSV_HEADER,
};
use cohort_core::ingest::{parse_json, serialize};
use cohort_core::{
    aice, cei_series, compute_geometry_field, detect_peaks, parse_csv_matrix, parse_hmd, trim_series,
    u_shape_diagnostic, AnalyticSurface, AnalyticsError, CeiSeries, CohortReport, GeometryError, GeometryOptions,
    MortalitySurface, Normalization, PeakParams, Profile, Sex, SurfaceFormat,
};

#[derive(Parser)]
#[command(name = "cohort", version, about = "Cohort-effect analysis of year × age mortality surfaces")]
struct Cli {
    /// Directory against which relative `-o` paths are resolved.
    #[arg(long, global = true, env = "COHORT_OUTPUT_DIR", value_name = "DIR")]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cohort effect index series (CSV, JSON or SVG).
    Cei(CeiArgs),
    /// Mean, sample standard deviation and AICE over a window.
    Aice(ReportArgs),
    /// Elevated-CEI peaks and generation gaps.
    Gaps(ReportArgs),
    /// Young-cohort tail diagnostic of the untrimmed series.
    Ushape(UShapeArgs),
    /// Per-point geometry dump (normals and normal curvatures).
    Surface(SurfaceArgs),
    /// Materialize a smooth test surface on a grid.
    Synthetic(SyntheticArgs),
    /// SVG line chart of one or more CEI series.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    /// HMD `Mx_1x1` text file.
    Hmd,
    /// Headerless year × age CSV matrix; needs `--first-year` and `--first-age`.
    Csv,
    /// Surface JSON document.
    Json,
    /// CEI series written by `cohort cei` (CSV or JSON).
    Series,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Svg,
    Text,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum NormArg {
    Sum,
    Mean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Shape {
    Plane,
    Sphere,
    Ridge,
    Bump,
    Separable,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Input file.
    input: PathBuf,
    /// Input format; inferred from the extension and contents when omitted.
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    /// Calendar year of the first CSV row.
    #[arg(long)]
    first_year: Option<i32>,
    /// Age of the first CSV column.
    #[arg(long)]
    first_age: Option<i32>,
    /// Population to analyse in HMD files (female, male, total).
    #[arg(long, default_value = "total")]
    sex: Sex,
}

#[derive(Args, Clone)]
struct GeometryArgs {
    /// Multiplier applied to rates before computing geometry.
    #[arg(long, default_value_t = 1.0)]
    z_scale: f64,
    /// Work with log death rates.
    #[arg(long)]
    log_rates: bool,
    /// Spacing of years and ages in the embedding.
    #[arg(long, default_value_t = 1.0)]
    grid_step: f64,
    /// Per-cohort aggregation of |NC1 - NC2|.
    #[arg(long, value_enum, default_value = "sum")]
    normalization: NormArg,
}

#[derive(Args, Clone)]
struct TrimArgs {
    /// Drop cohorts born after this year.
    #[arg(long, default_value_t = DEFAULT_TRIM_YEAR)]
    trim: i32,
    /// Keep every cohort.
    #[arg(long, conflicts_with = "trim")]
    no_trim: bool,
}

#[derive(Args, Clone)]
struct PeakArgs {
    /// Birth-year window, `FIRST:LAST`.
    #[arg(long, value_parser = parse_range, default_value = "1922:1970")]
    window: (i32, i32),
    /// Odd width of the rolling-median baseline, in years.
    #[arg(long, default_value_t = PeakParams::default().median_width)]
    median_width: usize,
    /// Elevation threshold relative to the baseline.
    #[arg(long, default_value_t = PeakParams::default().threshold)]
    threshold: f64,
}

#[derive(Args)]
struct CeiArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    trim: TrimArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    trim: TrimArgs,
    #[command(flatten)]
    peaks: PeakArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct UShapeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// The tail starts after this birth year.
    #[arg(long, default_value_t = DEFAULT_TRIM_YEAR)]
    split: i32,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SurfaceArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SyntheticArgs {
    #[arg(long, value_enum, default_value = "plane")]
    shape: Shape,
    /// Full surface definition as JSON, e.g. `{"shape":"plane","a":0,"b":0.001,"c":0}`.
    #[arg(long, conflicts_with = "shape")]
    definition: Option<String>,
    /// Year range `FIRST:LAST`.
    #[arg(long, value_parser = parse_range, default_value = "1900:2000")]
    years: (i32, i32),
    /// Age range `FIRST:LAST`.
    #[arg(long, value_parser = parse_range, default_value = "0:100")]
    ages: (i32, i32),
    /// Coordinate spacing: cell (year, age) is sampled at (year · step, age · step).
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// Sphere radius.
    #[arg(long, default_value_t = 500.0)]
    radius: f64,
    /// Ridge width `w` in `exp(-u² / w)`.
    #[arg(long, default_value_t = 50.0)]
    width: f64,
    /// Birth year on the ridge axis; defaults to the grid centre.
    #[arg(long)]
    ridge_birth_year: Option<f64>,
    /// Bump height.
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// Bump standard deviation.
    #[arg(long, default_value_t = 5.0)]
    sigma: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Surfaces or CEI series; one line per input.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    #[arg(long)]
    first_year: Option<i32>,
    #[arg(long)]
    first_age: Option<i32>,
    #[arg(long, default_value = "total")]
    sex: Sex,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    trim: TrimArgs,
    #[command(flatten)]
    peaks: PeakArgs,
    /// Skip peak annotations.
    #[arg(long)]
    no_peaks: bool,
    /// Chart title.
    #[arg(long, default_value = "Cohort effect index")]
    title: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected FIRST:LAST, got `{s}`"))?;
    let a: i32 = a.trim().parse().map_err(|e| format!("`{a}`: {e}"))?;
    let b: i32 = b.trim().parse().map_err(|e| format!("`{b}`: {e}"))?;
    if a > b {
        return Err(format!("range {a}:{b} is not ordered"));
    }
    Ok((a, b))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        Self { code: 3, message: format!("geometry: {e}") }
    }
}

impl From<AnalyticsError> for Failure {
    fn from(e: AnalyticsError) -> Self {
        Self { code: 4, message: format!("analytics: {e}") }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

enum Loaded {
    Surface(MortalitySurface),
    Series(CeiSeries),
}

fn detect_format(path: &Path, text: &str) -> InputFormat {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let head = text.trim_start();
    match ext.as_str() {
        "json" if head.contains("\"entries\"") => InputFormat::Series,
        "json" => InputFormat::Json,
        "csv" if head.lines().next().map(str::trim) == Some(SERIES_CSV_HEADER) => InputFormat::Series,
        "csv" => InputFormat::Csv,
        _ if head.starts_with('{') => {
            if head.contains("\"entries\"") {
                InputFormat::Series
            } else {
                InputFormat::Json
            }
        }
        _ if head.starts_with(SERIES_CSV_HEADER) => InputFormat::Series,
        _ => InputFormat::Hmd,
    }
}

fn load(input: &InputArgs) -> CliResult<Loaded> {
    let path = &input.input;
    let name = path.display();
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{name}: {e}")))?;
    let format = input.input_format.unwrap_or_else(|| detect_format(path, &text));
    let parse_err = |e: &dyn fmt::Display| Failure::input(format!("{name}: {e}"));
    Ok(match format {
        InputFormat::Hmd => Loaded::Surface(parse_hmd(&text).map_err(|e| parse_err(&e))?.into_sex(input.sex)),
        InputFormat::Json => Loaded::Surface(parse_json(&text).map_err(|e| parse_err(&e))?),
        InputFormat::Csv => {
            let (Some(y), Some(a)) = (input.first_year, input.first_age) else {
                return Err(Failure::input(format!("{name}: CSV input needs --first-year and --first-age")));
            };
            let label = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
            Loaded::Surface(parse_csv_matrix(&text, y, a, input.sex, &label).map_err(|e| parse_err(&e))?)
        }
        InputFormat::Series => {
            let series = if text.trim_start().starts_with('{') {
                series_from_json(&text).map_err(|e| parse_err(&e))?
            } else {
                series_from_csv(&text).map_err(|e| parse_err(&e))?
            };
            Loaded::Series(series)
        }
    })
}

fn load_surface(input: &InputArgs) -> CliResult<MortalitySurface> {
    match load(input)? {
        Loaded::Surface(s) => Ok(s),
        Loaded::Series(_) => {
            Err(Failure::input(format!("{}: expected a mortality surface, found a CEI series", input.input.display())))
        }
    }
}

fn geometry_options(g: &GeometryArgs) -> CliResult<GeometryOptions> {
    let opts = GeometryOptions { z_scale: g.z_scale, log_rates: g.log_rates, grid_step: g.grid_step };
    opts.validate()?;
    Ok(opts)
}

fn normalization(g: &GeometryArgs) -> Normalization {
    match g.normalization {
        NormArg::Sum => Normalization::Sum,
        NormArg::Mean => Normalization::Mean,
    }
}

/// Untrimmed series of a surface or series input.
fn full_series(input: &InputArgs, g: &GeometryArgs) -> CliResult<CeiSeries> {
    let opts = geometry_options(g)?;
    match load(input)? {
        Loaded::Series(s) => Ok(s),
        Loaded::Surface(s) => {
            let field = compute_geometry_field(&s, &opts)?;
            Ok(cei_series(&field, &s, normalization(g))?)
        }
    }
}

fn apply_trim(series: CeiSeries, t: &TrimArgs) -> CliResult<CeiSeries> {
    if t.no_trim {
        Ok(series)
    } else {
        Ok(trim_series(&series, t.trim)?)
    }
}

fn peak_params(p: &PeakArgs) -> PeakParams {
    PeakParams { median_width: p.median_width, threshold: p.threshold }
}

fn unsupported(command: &str, format: OutputFormat) -> Failure {
    Failure::input(format!("`{command}` cannot write {format} output"))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |v| format!("{v:.6e}"))
}

fn fmt_gap(v: Option<u32>) -> String {
    v.map_or_else(|| "NA".into(), |v| v.to_string())
}

fn report_text(r: &CohortReport, with_stats: bool, with_peaks: bool) -> String {
    let mut out = format!("window\t{}:{}\nn\t{}\n", r.window.0, r.window.1, r.n);
    if with_stats {
        out += &format!("mean\t{}\nstdev\t{}\naice\t{}\n", fmt_opt(r.mean), fmt_opt(r.stdev), fmt_opt(r.aice));
    }
    if with_peaks {
        for p in &r.peaks {
            out += &format!(
                "peak\t{}:{}\twidth {}\tmax {:.6e} in {}\n",
                p.start_year, p.end_year, p.width_years, p.max_cei, p.max_year
            );
        }
        out += &format!("min_gap\t{}\nmax_gap\t{}\n", fmt_gap(r.min_gap), fmt_gap(r.max_gap));
    }
    out
}

fn series_title(s: &CeiSeries, fallback: &Path) -> String {
    let label = s.meta.source_label.lines().next().unwrap_or("").trim();
    if label.is_empty() {
        fallback.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
    } else {
        label.to_string()
    }
}

fn cmd_cei(a: &CeiArgs) -> CliResult<String> {
    let series = apply_trim(full_series(&a.input, &a.geometry)?, &a.trim)?;
    match a.format {
        OutputFormat::Csv => Ok(series_to_csv(&series)),
        OutputFormat::Json => Ok(series_to_json(&series)),
        OutputFormat::Svg => {
            let name = series_title(&series, &a.input.input);
            let chart = svg::Chart { title: name.clone(), series: vec![(name, &series)], window: None, peaks: vec![] };
            Ok(chart.render())
        }
        f => Err(unsupported("cei", f)),
    }
}

fn cmd_aice(a: &ReportArgs) -> CliResult<String> {
    let series = apply_trim(full_series(&a.input, &a.geometry)?, &a.trim)?;
    let report = aice(&series, a.peaks.window)?;
    match a.format {
        OutputFormat::Text => Ok(report_text(&report, true, false)),
        OutputFormat::Json => Ok(report_to_json(&report)),
        f => Err(unsupported("aice", f)),
    }
}

fn cmd_gaps(a: &ReportArgs) -> CliResult<String> {
    let series = apply_trim(full_series(&a.input, &a.geometry)?, &a.trim)?;
    let report = detect_peaks(&series, a.peaks.window, &peak_params(&a.peaks))?;
    match a.format {
        OutputFormat::Text => Ok(report_text(&report, false, true)),
        OutputFormat::Json => Ok(report_to_json(&report)),
        OutputFormat::Csv => Ok(peaks_to_csv(&report)),
        f => Err(unsupported("gaps", f)),
    }
}

fn cmd_ushape(a: &UShapeArgs) -> CliResult<String> {
    let series = full_series(&a.input, &a.geometry)?;
    if series.last_year().is_none_or(|y| y <= a.split) {
        return Err(AnalyticsError::EmptySeries(a.split).into());
    }
    let r = u_shape_diagnostic(&series, a.split);
    match a.format {
        OutputFormat::Text => Ok(format!(
            "split_year\t{}\ntail_slope\t{}\ndrop_start\t{}\nrising_tail\t{}\n",
            r.split_year,
            fmt_opt(r.tail_slope),
            r.drop_start.map_or_else(|| "NA".into(), |y| y.to_string()),
            r.rising_tail
        )),
        OutputFormat::Json => Ok(u_shape_to_json(&r)),
        f => Err(unsupported("ushape", f)),
    }
}

fn cmd_surface(a: &SurfaceArgs) -> CliResult<String> {
    let opts = geometry_options(&a.geometry)?;
    let s = load_surface(&a.input)?;
    let field = compute_geometry_field(&s, &opts)?;
    match a.format {
        OutputFormat::Csv => Ok(field_to_csv(&field)),
        OutputFormat::Json => Ok(field_to_json(&field)),
        f => Err(unsupported("surface", f)),
    }
}

fn synthetic_surface(a: &SyntheticArgs) -> CliResult<AnalyticSurface> {
    if let Some(def) = &a.definition {
        return serde_json::from_str(def).map_err(|e| Failure::input(format!("--definition: {e}")));
    }
    let mid_t = (a.years.0 + a.years.1) as f64 / 2.0 * a.step;
    let mid_x = (a.ages.0 + a.ages.1) as f64 / 2.0 * a.step;
    Ok(match a.shape {
        Shape::Plane => AnalyticSurface::plane(1e-4, 1e-3, 0.01),
        Shape::Sphere => AnalyticSurface::sphere_cap(a.radius, mid_t, mid_x),
        Shape::Ridge => {
            let birth = a.ridge_birth_year.unwrap_or((a.years.0 + a.years.1 - a.ages.0 - a.ages.1) as f64 / 2.0);
            AnalyticSurface::gaussian_ridge(a.width, birth * a.step)
        }
        Shape::Bump => AnalyticSurface::gaussian_bump(a.amplitude, a.sigma, mid_t, mid_x),
        Shape::Separable => {
            let span = (a.years.1 - a.years.0 + 1) as f64 * a.step;
            AnalyticSurface::ProductSeparable {
                u: Profile::Gaussian { amplitude: 1.0, center: mid_t, width: span * span },
                v: Profile::Exponential { amplitude: 1e-4 * (-0.09 * a.ages.0 as f64 * a.step).exp(), rate: 0.09 },
            }
        }
    })
}

fn cmd_synthetic(a: &SyntheticArgs) -> CliResult<String> {
    if !(a.step > 0.0 && a.step.is_finite()) {
        return Err(Failure::input(format!("--step must be positive, got {}", a.step)));
    }
    let surface = synthetic_surface(a)?;
    let n_years = (a.years.1 - a.years.0 + 1) as usize;
    let n_ages = (a.ages.1 - a.ages.0 + 1) as usize;
    let s = surface.materialize(a.years.0, a.ages.0, n_years, n_ages, a.step);
    if s.missing_count() > 0 {
        eprintln!("note: {} cells fall outside the surface domain and are missing", s.missing_count());
    }
    match a.format {
        OutputFormat::Csv => {
            eprintln!("note: read back with --first-year {} --first-age {}", a.years.0, a.ages.0);
            Ok(serialize(&s, SurfaceFormat::Csv))
        }
        OutputFormat::Json => Ok(serialize(&s, SurfaceFormat::Json)),
        f => Err(unsupported("synthetic", f)),
    }
}

fn cmd_plot(a: &PlotArgs) -> CliResult<String> {
    let mut all = Vec::new();
    for path in &a.inputs {
        let input = InputArgs {
            input: path.clone(),
            input_format: a.input_format,
            first_year: a.first_year,
            first_age: a.first_age,
            sex: a.sex,
        };
        let s = apply_trim(full_series(&input, &a.geometry)?, &a.trim)?;
        all.push((series_title(&s, path), s));
    }
    let peaks = if a.no_peaks {
        Vec::new()
    } else {
        match detect_peaks(&all[0].1, a.peaks.window, &peak_params(&a.peaks)) {
            Ok(r) => r.peaks,
            Err(e) => {
                eprintln!("note: no peak annotations: {e}");
                Vec::new()
            }
        }
    };
    let chart = svg::Chart {
        title: a.title.clone(),
        series: all.iter().map(|(n, s)| (n.clone(), s)).collect(),
        window: Some(a.peaks.window),
        peaks,
    };
    Ok(chart.render())
}

/// Writes `content` to `output` (or stdout) through a temporary file in the
/// destination directory, so a failed run never leaves a partial file.
fn emit(content: &str, output: Option<&Path>, output_dir: Option<&Path>) -> CliResult<()> {
    let Some(path) = output else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(content.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| Failure::input(format!("stdout: {e}")));
    };
    let path = match output_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    };
    let io_err = |e: &dyn fmt::Display| Failure::input(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| io_err(&e))?;
    tmp.write_all(content.as_bytes()).map_err(|e| io_err(&e))?;
    tmp.as_file().sync_all().map_err(|e| io_err(&e))?;
    tmp.persist(&path).map_err(|e| io_err(&e.error))?;
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let (content, output) = match &cli.command {
        Command::Cei(a) => (cmd_cei(a)?, &a.output),
        Command::Aice(a) => (cmd_aice(a)?, &a.output),
        Command::Gaps(a) => (cmd_gaps(a)?, &a.output),
        Command::Ushape(a) => (cmd_ushape(a)?, &a.output),
        Command::Surface(a) => (cmd_surface(a)?, &a.output),
        Command::Synthetic(a) => (cmd_synthetic(a)?, &a.output),
        Command::Plot(a) => (cmd_plot(a)?, &a.output),
    };
    emit(&content, output.as_deref(), cli.output_dir.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("1922:1970"), Ok((1922, 1970)));
        assert!(parse_range("1970:1922").is_err());
        assert!(parse_range("1970").is_err());
    }

    #[test]
    fn formats_are_detected() {
        assert_eq!(detect_format(Path::new("a.csv"), "birth_year,cei,point_count\n1,0,0\n"), InputFormat::Series);
        assert_eq!(detect_format(Path::new("a.csv"), "0.1,0.2\n"), InputFormat::Csv);
        assert_eq!(detect_format(Path::new("a.json"), "{\"years\":[]}"), InputFormat::Json);
        assert_eq!(detect_format(Path::new("a.json"), "{\"meta\":{},\"entries\":[]}"), InputFormat::Series);
        assert_eq!(detect_format(Path::new("UK.Mx_1x1.txt"), "United Kingdom"), InputFormat::Hmd);
    }
}
