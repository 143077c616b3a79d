//! Command-line frontend: argument parsing, file handling and exit codes.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hullcore::caratheodory::oracle::oracle_fits;
use hullcore::caratheodory::{encode_dataset, Code};
use hullcore::error::Error as CoreError;
use hullcore::eval::{evaluate, HausdorffMode};
use hullcore::geometry::{normalize_to_unit_ball, BallTransform, DotAccess, GramMatrix, PointSet};
use hullcore::greedy_hull::{greedy_cluster, Engine, HullApproximation, RunStats};
use hullcore::io::{read_gram, read_points, write_points_bin, write_points_csv, Format};
use hullcore::shadow_cover::greedy_cover;
use hullcore::synth::{gen_klines, gen_sphere_packing, gen_uniform_ball};
use serde::{Deserialize, Serialize};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("config error: {0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Config(_) => EXIT_CONFIG,
        }
    }

    fn core(context: &str, e: CoreError) -> Self {
        let msg = format!("{context}: {e}");
        match e {
            CoreError::NoApproximation { .. } => CliError::Infeasible(msg),
            CoreError::EpsOutOfRange(_) | CoreError::DeltaOutOfRange(_) | CoreError::InvalidParameter(_) => {
                CliError::Config(msg)
            }
            _ => CliError::Input(msg),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "hullcore", version, about = "Sparse convex hull approximations of point sets")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, Args)]
struct Options {
    /// Point data file.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Destination file; JSON results go to stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Algo::Cluster)]
    algo: Algo,
    #[arg(long, global = true, value_enum, default_value_t = EngineArg::Fast)]
    engine: EngineArg,
    /// Accuracy in normalized units, in (0, 1).
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Cover slack, in (0, 1].
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Gram matrix CSV used instead of coordinates.
    #[arg(long, global = true)]
    gram: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Use the exact oracle in `eval` when the instance is small enough.
    #[arg(long, global = true, value_enum, default_value_t = Switch::On)]
    oracle: Switch,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[arg(long, global = true)]
    skip_header: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic point set.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Map the input into the unit ball.
    Normalize,
    /// Select a small subset whose hull approximates the input hull.
    Compress,
    /// Encode every input point over the subset of a previous result.
    Encode { result: PathBuf },
    /// Measure a previous result against the input.
    Eval { result: PathBuf },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Points near k random segments.
    Klines {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.0)]
        strip: f64,
    },
    /// Random packing on the unit sphere.
    Packing {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        spacing: f64,
    },
    /// Uniform samples from the unit ball.
    Ball {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Cluster,
    Cover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    Naive,
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Bin,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Bin => Format::Bin,
        }
    }
}

/// Machine-readable output of `compress`, read back by `encode` and `eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressOutput {
    pub transform: Option<BallTransform>,
    pub selected: Vec<usize>,
    pub radii: Vec<f64>,
    pub codes: Vec<Code>,
    pub stats: CompressStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressStats {
    pub algo: Algo,
    pub engine: Option<EngineArg>,
    pub n: usize,
    pub eps: f64,
    pub delta: Option<f64>,
    pub iterations: usize,
    /// Guaranteed one-sided Hausdorff bound in normalized units.
    pub bound: f64,
    pub threshold: f64,
    pub diam_estimate: f64,
    pub distance_queries: u64,
    pub descent_steps: u64,
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("hullcore: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let o = &cli.opts;
    match cli.command {
        Command::Gen { kind } => generate(o, kind),
        Command::Normalize => normalize(o),
        Command::Compress => compress(o),
        Command::Encode { result } => encode(o, &result),
        Command::Eval { result } => eval(o, &result),
    }
}

fn check_eps(eps: Option<f64>) -> Result<f64> {
    let eps = eps.ok_or_else(|| CliError::Config("--eps is required".into()))?;
    if eps > 0.0 && eps < 1.0 {
        Ok(eps)
    } else {
        Err(CliError::Config(format!("--eps must lie in (0, 1), got {eps}")))
    }
}

fn check_delta(delta: Option<f64>) -> Result<f64> {
    let delta = delta.ok_or_else(|| CliError::Config("--delta is required with --algo cover".into()))?;
    if delta > 0.0 && delta <= 1.0 {
        Ok(delta)
    } else {
        Err(CliError::Config(format!("--delta must lie in (0, 1], got {delta}")))
    }
}

fn required_output(o: &Options) -> Result<&Path> {
    o.output.as_deref().ok_or_else(|| CliError::Config("--output is required".into()))
}

fn required_input(o: &Options) -> Result<&Path> {
    o.input.as_deref().ok_or_else(|| CliError::Config("--input is required".into()))
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_point_file(path: &Path, format: Format, ps: &PointSet) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_points_csv(&mut buf, ps),
        Format::Bin => write_points_bin(&mut buf, ps),
    }
    .map_err(|e| CliError::Input(format!("cannot encode {}: {e}", path.display())))?;
    write_atomic(path, &buf)
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

fn load_points(o: &Options) -> Result<PointSet> {
    let path = required_input(o)?;
    read_points(path, o.format.into(), o.skip_header).map_err(|e| CliError::core(&path.display().to_string(), e))
}

fn load_gram(path: &Path, skip_header: bool) -> Result<GramMatrix> {
    read_gram(path, skip_header).map_err(|e| CliError::core(&path.display().to_string(), e))
}

fn generate(o: &Options, kind: GenKind) -> Result<()> {
    let out = required_output(o)?;
    let gen = |e| CliError::core("gen", e);
    let (ps, meta) = match kind {
        GenKind::Klines { k, n, d, strip } => {
            let (ps, meta) = gen_klines(k, n, d, strip, o.seed).map_err(gen)?;
            let meta = json!({ "kind": "klines", "n": ps.len(), "d": d, "klines": meta });
            (ps, meta)
        }
        GenKind::Packing { d, spacing } => {
            let ps = gen_sphere_packing(d, spacing, o.seed).map_err(gen)?;
            let meta = json!({ "kind": "packing", "n": ps.len(), "d": d, "spacing": spacing, "seed": o.seed });
            (ps, meta)
        }
        GenKind::Ball { n, d } => {
            let ps = gen_uniform_ball(n, d, o.seed).map_err(gen)?;
            (ps, json!({ "kind": "ball", "n": n, "d": d, "seed": o.seed }))
        }
    };
    write_point_file(out, o.format.into(), &ps)?;
    write_json(Some(&sidecar(out, "meta.json")), &meta)
}

fn normalize(o: &Options) -> Result<()> {
    let out = required_output(o)?;
    let raw = load_points(o)?;
    let (ps, transform) = normalize_to_unit_ball(&raw.to_rows()).map_err(|e| CliError::core("normalize", e))?;
    write_point_file(out, o.format.into(), &ps)?;
    write_json(Some(&sidecar(out, "transform.json")), &transform)
}

fn compress(o: &Options) -> Result<()> {
    let eps = check_eps(o.eps)?;
    let delta = match o.algo {
        Algo::Cover => Some(check_delta(o.delta)?),
        Algo::Cluster => None,
    };
    let (points, gram, transform);
    let acc = match &o.gram {
        Some(path) => {
            gram = load_gram(path, o.skip_header)?;
            transform = None;
            DotAccess::from(&gram)
        }
        None => {
            let raw = load_points(o)?;
            let (ps, t) = normalize_to_unit_ball(&raw.to_rows()).map_err(|e| CliError::core("normalize", e))?;
            points = ps;
            transform = Some(t);
            DotAccess::from(&points)
        }
    };
    let approx = match delta {
        None => {
            let engine = match o.engine {
                EngineArg::Naive => Engine::Naive,
                EngineArg::Fast => Engine::Fast,
            };
            greedy_cluster(&acc, eps, engine)
        }
        Some(delta) => {
            let all: Vec<usize> = (0..acc.len()).collect();
            greedy_cover(&acc, &all, &all, eps, delta)
        }
    }
    .map_err(|e| CliError::core("compress", e))?;
    let codes = match approx.codes.clone() {
        Some(c) => c,
        None => encode_dataset(&acc, &approx.selected, eps).map_err(|e| CliError::core("encode", e))?,
    };
    let out = CompressOutput {
        transform,
        selected: approx.selected,
        radii: approx.radii,
        codes,
        stats: CompressStats {
            algo: o.algo,
            engine: (o.algo == Algo::Cluster).then_some(o.engine),
            n: acc.len(),
            eps,
            delta,
            iterations: approx.stats.iterations,
            bound: approx.achieved_bound,
            threshold: approx.threshold,
            diam_estimate: approx.diam_estimate,
            distance_queries: approx.stats.distance_queries,
            descent_steps: approx.stats.descent_steps,
        },
    };
    write_json(o.output.as_deref(), &out)
}

fn load_result(path: &Path) -> Result<CompressOutput> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Rebuilds the point data a result was computed on, checking it matches.
enum Dataset {
    Points(PointSet),
    Gram(GramMatrix),
}

impl Dataset {
    fn load(o: &Options, result: &CompressOutput) -> Result<Self> {
        let data = match (&o.gram, &result.transform) {
            (Some(path), None) => Dataset::Gram(load_gram(path, o.skip_header)?),
            (Some(_), Some(_)) => {
                return Err(CliError::Config("--gram given, but the result was computed on coordinates".into()))
            }
            (None, transform) => {
                let raw = load_points(o)?;
                let ps = match transform {
                    Some(t) => t.apply_rows(&raw.to_rows()).map_err(|e| CliError::core("input", e))?,
                    None => raw,
                };
                Dataset::Points(ps)
            }
        };
        let n = data.access().len();
        if let Some(&bad) = result.selected.iter().find(|&&s| s >= n) {
            return Err(CliError::Input(format!("selected index {bad} out of range for {n} input points")));
        }
        Ok(data)
    }

    fn access(&self) -> DotAccess<'_> {
        match self {
            Dataset::Points(ps) => DotAccess::from(ps),
            Dataset::Gram(g) => DotAccess::from(g),
        }
    }
}

fn encode(o: &Options, result_path: &Path) -> Result<()> {
    let result = load_result(result_path)?;
    let eps = check_eps(o.eps.or(Some(result.stats.eps)))?;
    let data = Dataset::load(o, &result)?;
    let codes = encode_dataset(&data.access(), &result.selected, eps).map_err(|e| CliError::core("encode", e))?;
    write_json(o.output.as_deref(), &json!({ "eps": eps, "codes": codes }))
}

fn eval(o: &Options, result_path: &Path) -> Result<()> {
    let result = load_result(result_path)?;
    let eps = check_eps(o.eps.or(Some(result.stats.eps)))?;
    let data = Dataset::load(o, &result)?;
    let acc = data.access();
    let use_oracle = o.oracle == Switch::On
        && match &data {
            Dataset::Points(ps) => oracle_fits(result.selected.len(), ps.dim()),
            Dataset::Gram(_) => false,
        };
    let mode = if use_oracle { HausdorffMode::Oracle } else { HausdorffMode::Approximate { eps_fine: eps / 4.0 } };
    let approx = HullApproximation {
        selected: result.selected,
        radii: result.radii,
        threshold: result.stats.threshold,
        achieved_bound: result.stats.bound,
        diam_estimate: result.stats.diam_estimate,
        codes: Some(result.codes),
        stats: RunStats::default(),
    };
    let report = evaluate(&acc, &approx, mode, eps).map_err(|e| CliError::core("eval", e))?;
    let mut value = serde_json::to_value(&report).expect("serializable report");
    value["bound"] = json!(approx.achieved_bound);
    write_json(o.output.as_deref(), &value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_codes() {
        let cases = [
            (CoreError::NoApproximation { point: 3 }, EXIT_INFEASIBLE),
            (CoreError::EpsOutOfRange(2.0), EXIT_CONFIG),
            (CoreError::DeltaOutOfRange(0.0), EXIT_CONFIG),
            (CoreError::Parse { row: 4, msg: "bad float".into() }, EXIT_INPUT),
            (CoreError::DimensionMismatch { expected: 2, found: 3 }, EXIT_INPUT),
        ];
        for (e, want) in cases {
            assert_eq!(CliError::core("x", e).exit_code(), want);
        }
    }

    #[test]
    fn sidecars_replace_the_extension() {
        assert_eq!(sidecar(Path::new("out/data.csv"), "meta.json"), PathBuf::from("out/data.meta.json"));
    }
}
