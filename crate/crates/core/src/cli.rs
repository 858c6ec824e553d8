//! Command-line front end. Everything except argument collection and the
//! process exit lives here so it can be driven from tests.
//!
//! Exit codes: 0 pass, 1 verification or convergence failure, 2 parse or
//! argument error, 3 hypothesis violation, 4 unsupported operation.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::coord::PointSet;
use crate::error::Error;
use crate::poly::{FloatMap, FloatPoly, PolyMap};
use crate::synth::{
    build_saddle_field, synthesize, AuditBundle, SaddleField, BUNDLE_KIND, SADDLE_KIND,
};
use crate::verify::{
    basin_sample, certify_polynomial, hessian_exact, integrate_flow, leading_minors, BoxSpec,
    CertReport, Classification, FlowOptions, FlowProblem, VerifyConfig,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "morseforge", version, about = "Polynomials with prescribed nondegenerate minima")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build P from a point-set file and write the audit bundle.
    Synthesize {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Recompute the certificate for a bundle; exit 0 iff everything passes.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Search interval for one axis; repeat once per axis.
        #[arg(long = "box", value_name = "LO,HI", allow_hyphen_values = true)]
        boxes: Vec<String>,
        #[command(flatten)]
        tol: TolArgs,
        /// Also sample this many flow seeds and record the basin fraction.
        #[arg(long)]
        basin_seeds: Option<usize>,
        #[command(flatten)]
        flow: FlowArgs,
        /// Seed for the basin sample.
        #[arg(long, env = "MORSEFORGE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Integrate one trajectory of a bundle's or saddle field's dynamics.
    Flow {
        #[arg(short, long)]
        input: PathBuf,
        /// Comma-separated start point.
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        /// Trace destination; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Build the saddle-augmented field for a point-set file.
    SaddleField {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a CSV raster `x,y,P,basin_label` over the standard box (n = 2).
    ExportGrid {
        #[arg(short, long)]
        input: PathBuf,
        /// Grid points per axis, at least 8.
        #[arg(long, value_parser = clap::value_parser!(u32).range(8..))]
        resolution: u32,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        flow: FlowArgs,
    },
}

/// Newton search overrides; defaults come from [`VerifyConfig`].
#[derive(Debug, Clone, Default, Args)]
pub struct TolArgs {
    /// Newton seeds per axis of the search grid [default: 10]
    #[arg(long, value_parser = positive_usize)]
    pub seeds_per_axis: Option<usize>,
    /// Float gradient norm that triggers exact confirmation [default: 1e-12]
    #[arg(long, value_parser = positive_f64)]
    pub residual_tol: Option<f64>,
    /// Distance below which converged points are merged [default: 1e-8]
    #[arg(long, value_parser = positive_f64)]
    pub dedup_tol: Option<f64>,
    /// Newton iterations per seed [default: 100]
    #[arg(long, value_parser = positive_usize)]
    pub max_newton_iter: Option<usize>,
    /// Distance within which a converged point matches a point of X [default: 1e-6]
    #[arg(long, value_parser = positive_f64)]
    pub match_tol: Option<f64>,
}

/// Integrator overrides; defaults come from [`FlowOptions`].
#[derive(Debug, Clone, Default, Args)]
pub struct FlowArgs {
    /// RK4 step [default: 1e-3]
    #[arg(long, value_parser = positive_f64)]
    pub dt: Option<f64>,
    /// Integration time limit [default: 200]
    #[arg(long, value_parser = positive_f64)]
    pub t_max: Option<f64>,
    /// Field norm below which a trace may stop [default: 1e-6]
    #[arg(long, value_parser = positive_f64)]
    pub grad_tol: Option<f64>,
    /// Distance to a target that counts as arrival [default: 1e-3]
    #[arg(long, value_parser = positive_f64)]
    pub point_tol: Option<f64>,
}

impl FlowArgs {
    pub fn options(&self) -> FlowOptions {
        let mut o = FlowOptions::default();
        if let Some(v) = self.dt {
            o.dt = v;
        }
        if let Some(v) = self.t_max {
            o.t_max = v;
        }
        if let Some(v) = self.grad_tol {
            o.grad_tol = v;
        }
        if let Some(v) = self.point_tol {
            o.point_tol = v;
        }
        o
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(_) => Err(format!("{s} is not a positive finite number")),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// A failed command: exit code plus a message for stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Failure::new(EXIT_PARSE, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Hypothesis(_)
            | Error::DuplicateNodes(_)
            | Error::EmptyRoots
            | Error::RepeatedRoots { .. }
            | Error::ConstantAlpha => EXIT_HYPOTHESIS,
            Error::Parse(_)
            | Error::LengthMismatch { .. }
            | Error::DimensionMismatch { .. }
            | Error::ArityMismatch { .. }
            | Error::NonFinite => EXIT_PARSE,
            Error::IndexOutOfRange { .. } | Error::Singular => EXIT_FAIL,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = std::result::Result<Outcome, Failure>;

/// What a successful run produced: the exit code (0 or 1) and a summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
}

/// Parses `args` (including the program name) and runs the command,
/// printing summaries to stdout and failures to stderr. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_PASS };
        }
    };
    match run(&cli) {
        Ok(o) => {
            if !o.summary.is_empty() {
                println!("{}", o.summary);
            }
            o.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Synthesize { input, output } => cmd_synthesize(input, output),
        Command::Verify {
            input,
            output,
            boxes,
            tol,
            basin_seeds,
            flow,
            seed,
        } => cmd_verify(
            input,
            output,
            &VerifyArgs {
                boxes,
                tol,
                basin_seeds: *basin_seeds,
                flow,
                seed: *seed,
            },
        ),
        Command::Flow {
            input,
            start,
            output,
            flow,
        } => cmd_flow(input, start, output.as_deref(), &flow.options()),
        Command::SaddleField { input, output } => cmd_saddle_field(input, output),
        Command::ExportGrid {
            input,
            resolution,
            output,
            flow,
        } => cmd_export_grid(input, *resolution as usize, output, &flow.options()),
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> std::result::Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(EXIT_FAIL, format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> std::result::Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))
}

fn read_points(path: &Path) -> std::result::Result<PointSet, Failure> {
    Ok(PointSet::from_json_str(&read(path)?)?)
}

fn document_kind(text: &str) -> std::result::Result<String, Failure> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Failure::parse(e.to_string()))?;
    v.get("kind")
        .and_then(|k| k.as_str())
        .map(str::to_owned)
        .ok_or_else(|| Failure::parse("document has no \"kind\" field"))
}

pub fn read_bundle(path: &Path) -> std::result::Result<AuditBundle, Failure> {
    let text = read(path)?;
    let kind = document_kind(&text)?;
    if kind != BUNDLE_KIND {
        return Err(Failure::parse(format!("expected a {BUNDLE_KIND} bundle, found kind {kind:?}")));
    }
    let b: AuditBundle = serde_json::from_str(&text).map_err(|e| Failure::parse(e.to_string()))?;
    if b.result.input.dimension() != b.result.p_poly.dimension() {
        return Err(Failure::parse("bundle points and P disagree on dimension"));
    }
    Ok(b)
}

pub fn cmd_synthesize(input: &Path, output: &Path) -> CmdResult {
    let xs = read_points(input)?;
    let bundle = synthesize(&xs)?.to_bundle()?;
    write(output, &to_json(&bundle)?)?;
    Ok(Outcome {
        code: EXIT_PASS,
        summary: format!(
            "synthesized P of degree {} with {} terms for {} points in R^{}",
            bundle.degrees.p,
            bundle.result.p_poly.num_terms(),
            xs.len(),
            xs.dimension()
        ),
    })
}

/// Consistency of the stored artifacts with the ones recomputed from `P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Integrity {
    /// Stored `−∇P` equals the recomputed one.
    pub field_matches: bool,
    /// Stored per-point Hessians and minors equal the recomputed ones.
    pub audits_match: bool,
}

impl Integrity {
    pub fn pass(&self) -> bool {
        self.field_matches && self.audits_match
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinSummary {
    pub seed: u64,
    pub num_seeds: usize,
    pub options: FlowOptions,
    pub fraction_converged: f64,
    pub converged_counts: Vec<usize>,
    pub max_time_reached: usize,
    pub diverged: usize,
}

/// The report written by `verify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    #[serde(flatten)]
    pub cert: CertReport,
    pub integrity: Integrity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basin: Option<BasinSummary>,
    /// `overall_pass` and every integrity check.
    pub pass: bool,
}

pub struct VerifyArgs<'a> {
    pub boxes: &'a [String],
    pub tol: &'a TolArgs,
    pub basin_seeds: Option<usize>,
    pub flow: &'a FlowArgs,
    pub seed: u64,
}

fn parse_box(specs: &[String], n: usize) -> std::result::Result<Option<BoxSpec>, Failure> {
    if specs.is_empty() {
        return Ok(None);
    }
    if specs.len() != n {
        return Err(Failure::parse(format!("--box given {} times, need one per axis ({n})", specs.len())));
    }
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for s in specs {
        let v = parse_floats(s)?;
        if v.len() != 2 {
            return Err(Failure::parse(format!("--box expects LO,HI, got {s:?}")));
        }
        lower.push(v[0]);
        upper.push(v[1]);
    }
    Ok(Some(BoxSpec::new(lower, upper, "user override")?))
}

fn parse_floats(s: &str) -> std::result::Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Failure::parse(format!("not a finite number: {t:?}"))),
            }
        })
        .collect()
}

pub fn verify_config(tol: &TolArgs, bounds: Option<BoxSpec>) -> VerifyConfig {
    let mut cfg = VerifyConfig::default();
    if let Some(v) = tol.seeds_per_axis {
        cfg.seeds_per_axis = v;
    }
    if let Some(v) = tol.residual_tol {
        cfg.residual_tol = v;
    }
    if let Some(v) = tol.dedup_tol {
        cfg.dedup_tol = v;
    }
    if let Some(v) = tol.max_newton_iter {
        cfg.max_newton_iter = v;
    }
    if let Some(v) = tol.match_tol {
        cfg.match_tol = v;
    }
    cfg.bounds = bounds;
    cfg
}

/// Checks the stored field and audits against values recomputed from `P`.
pub fn check_integrity(b: &AuditBundle) -> Integrity {
    let p = &b.result.p_poly;
    let field_matches = p.gradient().neg() == b.result.grad_field;
    let pts = b.result.input.points();
    let audits_match = b.per_point.len() == pts.len()
        && b.per_point.iter().zip(pts).all(|(a, x)| {
            a.point == *x
                && hessian_exact(p, x).is_ok_and(|h| {
                    let minors = leading_minors(&h);
                    h == a.hessian && minors == a.minors
                })
        });
    Integrity {
        field_matches,
        audits_match,
    }
}

pub fn cmd_verify(input: &Path, output: &Path, args: &VerifyArgs<'_>) -> CmdResult {
    let b = read_bundle(input)?;
    let n = b.result.p_poly.dimension();
    let cfg = verify_config(args.tol, parse_box(args.boxes, n)?);
    let cert = certify_polynomial(&b.result.p_poly, b.result.input.points(), &cfg);
    let integrity = check_integrity(&b);
    let basin = args.basin_seeds.map(|num_seeds| {
        let field = FloatMap::new(&b.result.p_poly.gradient().neg());
        let potential = FloatPoly::new(&b.result.p_poly);
        let targets = b.result.input.to_f64();
        let bounds = cert.spurious_search.bounds.clone();
        let problem = FlowProblem {
            field: &field,
            targets: &targets,
            bounds: &bounds,
            potential: Some(&potential),
        };
        let options = args.flow.options();
        let s = basin_sample(&problem, num_seeds, args.seed, &options);
        BasinSummary {
            seed: args.seed,
            num_seeds,
            options,
            fraction_converged: s.fraction_converged,
            converged_counts: s.converged_counts,
            max_time_reached: s.max_time_reached,
            diverged: s.diverged,
        }
    });
    let pass = cert.overall_pass && integrity.pass();
    let report = VerifyReport {
        config: cfg,
        cert,
        integrity,
        basin,
        pass,
    };
    write(output, &to_json(&report)?)?;
    let bad_points = report.cert.per_point.iter().filter(|p| !p.pass).count();
    Ok(Outcome {
        code: if pass { EXIT_PASS } else { EXIT_FAIL },
        summary: format!(
            "overall_pass: {pass} (failing points: {bad_points}, newton points: {}, all within tolerance: {}, stored artifacts consistent: {})",
            report.cert.spurious_search.converged_points.len(),
            report.cert.spurious_search.all_within_tol_of_x,
            report.integrity.pass()
        ),
    })
}

/// A flow source: a synthesis bundle (`−∇P` with `P` as Lyapunov function)
/// or a saddle field (its pulled-back dynamics).
pub struct LoadedFlow {
    pub field: PolyMap,
    pub potential: Option<crate::poly::MultiPoly>,
    pub targets: Vec<Vec<f64>>,
    /// Saddles of a saddle field in the input coordinates; empty for bundles.
    pub saddles: Vec<Vec<f64>>,
    pub bounds: BoxSpec,
}

pub fn load_flow(path: &Path) -> std::result::Result<LoadedFlow, Failure> {
    let text = read(path)?;
    let kind = document_kind(&text)?;
    let (field, potential, input, saddles) = if kind == BUNDLE_KIND {
        let b = read_bundle(path)?;
        let p = b.result.p_poly;
        (p.gradient().neg(), Some(p), b.result.input, Vec::new())
    } else if kind == SADDLE_KIND {
        let s: SaddleField = serde_json::from_str(&text).map_err(|e| Failure::parse(e.to_string()))?;
        let n = s.input.dimension();
        if s.pulled_back.domain_dim() != n || s.change.inverse.domain_dim() != n {
            return Err(Failure::parse("saddle field and points disagree on dimension"));
        }
        let saddles = s
            .equilibria()
            .1
            .iter()
            .map(|z| s.change.inverse.eval_rational(z).map(|x| to_f64_vec(&x)))
            .collect::<crate::Result<Vec<_>>>()?;
        (s.pulled_back, None, s.input, saddles)
    } else {
        return Err(Failure::parse(format!("unknown document kind {kind:?}")));
    };
    let targets = input.to_f64();
    let bounds = BoxSpec::around(&targets);
    Ok(LoadedFlow {
        field,
        potential,
        targets,
        saddles,
        bounds,
    })
}

fn to_f64_vec(x: &[crate::poly::Rational]) -> Vec<f64> {
    use num_traits::ToPrimitive;
    x.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
}

pub fn cmd_flow(input: &Path, start: &str, output: Option<&Path>, opts: &FlowOptions) -> CmdResult {
    let loaded = load_flow(input)?;
    let start = parse_floats(start)?;
    let n = loaded.bounds.dim();
    if start.len() != n {
        return Err(Failure::parse(format!("start has {} coordinates, expected {n}", start.len())));
    }
    if !loaded.bounds.inflate(opts.escape_factor).contains(&start) {
        return Err(Failure::new(
            EXIT_HYPOTHESIS,
            "start lies outside the standard box inflated x10",
        ));
    }
    let field = FloatMap::new(&loaded.field);
    let potential = loaded.potential.as_ref().map(FloatPoly::new);
    let problem = FlowProblem {
        field: &field,
        targets: &loaded.targets,
        bounds: &loaded.bounds,
        potential: potential.as_ref(),
    };
    let trace = integrate_flow(&problem, &start, opts);
    let json = to_json(&trace)?;
    let summary = match trace.classified {
        Classification::ConvergedTo(i) => format!("converged_to {i} after {} steps", trace.steps),
        Classification::MaxTimeReached => {
            let near_saddle = loaded.saddles.iter().position(|z| {
                z.iter().zip(&trace.end).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() < opts.point_tol
            });
            let note = match near_saddle {
                Some(j) => format!(" (ended at saddle {j}: {:?})", loaded.saddles[j]),
                None => String::new(),
            };
            format!(
                "max_time_reached after {} steps, |g| = {:e}{note}",
                trace.steps, trace.final_grad_norm
            )
        }
        Classification::Diverged => "diverged".to_owned(),
    };
    let summary = match output {
        Some(path) => {
            write(path, &json)?;
            summary
        }
        None => json,
    };
    Ok(Outcome {
        code: if trace.converged() { EXIT_PASS } else { EXIT_FAIL },
        summary,
    })
}

pub fn cmd_saddle_field(input: &Path, output: &Path) -> CmdResult {
    let xs = read_points(input)?;
    let field = build_saddle_field(&xs)?;
    let census = field.census()?;
    write(output, &to_json(&field)?)?;
    Ok(Outcome {
        code: if census.pass() { EXIT_PASS } else { EXIT_FAIL },
        summary: format!(
            "saddle field with {} stable points and {} saddles, census pass: {}",
            field.stable_set.len(),
            field.saddle_set.len(),
            census.pass()
        ),
    })
}

/// Rows `(x, y, P(x, y), label)` on a `resolution × resolution` grid over
/// the standard box, `y` varying slowest. The label is the index of the
/// point of `X` the flow from the node reaches, or −1.
pub fn basin_grid(b: &AuditBundle, resolution: usize, opts: &FlowOptions) -> std::result::Result<Vec<(f64, f64, f64, i64)>, Failure> {
    let p = &b.result.p_poly;
    if p.dimension() != 2 {
        return Err(Failure::new(
            EXIT_UNSUPPORTED,
            format!("export-grid needs n = 2, the bundle has n = {}", p.dimension()),
        ));
    }
    let targets = b.result.input.to_f64();
    let bounds = BoxSpec::around(&targets);
    let value = FloatPoly::new(p);
    let field = FloatMap::new(&p.gradient().neg());
    let problem = FlowProblem {
        field: &field,
        targets: &targets,
        bounds: &bounds,
        potential: None,
    };
    let r = resolution.max(2);
    let step = |i: usize| i as f64 / (r - 1) as f64;
    let mut rows = Vec::with_capacity(r * r);
    for j in 0..r {
        for i in 0..r {
            let x = bounds.lerp(&[step(i), step(j)]);
            let pv = value.eval(&x)?;
            let label = match integrate_flow(&problem, &x, opts).classified {
                Classification::ConvergedTo(k) => k as i64,
                _ => -1,
            };
            rows.push((x[0], x[1], pv, label));
        }
    }
    Ok(rows)
}

pub fn cmd_export_grid(input: &Path, resolution: usize, output: &Path, opts: &FlowOptions) -> CmdResult {
    let b = read_bundle(input)?;
    let rows = basin_grid(&b, resolution, opts)?;
    let mut csv = String::from("x,y,P,basin_label\n");
    for (x, y, p, l) in &rows {
        let _ = writeln!(csv, "{x},{y},{p},{l}");
    }
    write(output, &csv)?;
    let unresolved = rows.iter().filter(|r| r.3 < 0).count();
    Ok(Outcome {
        code: EXIT_PASS,
        summary: format!("wrote {} grid nodes, {unresolved} unresolved", rows.len()),
    })
}
