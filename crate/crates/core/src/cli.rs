//! Command-line front end.
//!
//! ```text
//! packbound bound --gen cycle:5 --method las --t 2
//! packbound bound --gen petersen --method three-point --t 1 --assume-transitive
//! packbound bound --delsarte --n 8 --theta 60deg --degree 6
//! packbound alpha --gen code:2,5,3
//! packbound export-sdpa --gen petersen --method theta-prime -o petersen.dat-s
//! packbound gen-list
//! ```
//!
//! `bound` prints one report per instance, as a table or as one JSON object
//! per line. Exit status is 0 when every bound is certified, 2 for a
//! configuration error, 3 when a size cap is hit and 4 when the solver fails
//! or a bound cannot be certified.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::basis::DEFAULT_BASIS_CAP;
use crate::graph::generators::{self, DEFAULT_VERTEX_CAP};
use crate::graph::{alpha_exact_with_limit, parse_graph, Graph, GraphError, DEFAULT_ALPHA_LIMIT};
use crate::hierarchy::{
    assemble_lasserre_with, las_bound_with, theta_with, three_point_bound_with, three_point_program,
    two_point_program, BoundOptions, BoundResult, HierarchyError, VERIFY_TOL,
};
use crate::sdp::{export_sdpa, SdpError, SdpProblem, SolveStatus, SolverOptions, DEFAULT_PSD_CAP};
use crate::sphere::{delsarte_lp_bound_with, DelsarteOptions, DelsarteProblem, SphereCertificate, SphereError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

/// Slack allowed when checking `α ≤ bound`.
const SANDWICH_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "packbound", version, about = "Certified upper bounds for independence numbers of packing graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute an upper bound and verify its certificate.
    Bound(BoundArgs),
    /// Exact independence number by branch and bound.
    Alpha(AlphaArgs),
    /// Write the SDP behind a bound in SDPA sparse format.
    ExportSdpa(ExportArgs),
    /// List the instance generators and their parameters.
    GenList,
}

#[derive(Args, Debug, Clone, Default)]
pub struct InstanceArgs {
    /// Generated instance, e.g. `cycle:5`, `code:2,5,3` or `circle:12,60deg`.
    #[arg(long = "gen", value_name = "NAME[:PARAMS]")]
    pub generators: Vec<String>,
    /// Graph file in the edge-list format.
    #[arg(long, value_name = "PATH")]
    pub input: Vec<PathBuf>,
    /// Largest vertex count a generator may produce.
    #[arg(long, default_value_t = DEFAULT_VERTEX_CAP)]
    pub vertex_cap: usize,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// Solver tolerance on relative gap and residuals.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Tolerance of the certificate check.
    #[arg(long, default_value_t = VERIFY_TOL)]
    pub verify_tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Largest number of independent sets in `I_2t`.
    #[arg(long, default_value_t = DEFAULT_BASIS_CAP)]
    pub basis_cap: usize,
    /// Largest total dimension of the PSD blocks.
    #[arg(long, default_value_t = DEFAULT_PSD_CAP)]
    pub psd_cap: usize,
}

impl Default for SolveArgs {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            verify_tol: VERIFY_TOL,
            max_iter: 100,
            basis_cap: DEFAULT_BASIS_CAP,
            psd_cap: DEFAULT_PSD_CAP,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SphereArgs {
    /// Bound spherical codes on S^{n-1} instead of a finite graph.
    #[arg(long)]
    pub delsarte: bool,
    /// Ambient dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Minimal angular distance, in radians or with a `deg` suffix.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Degree of the polynomial certificate.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Sample points per unit of degree on the initial grid.
    #[arg(long, default_value_t = 10)]
    pub grid_density: usize,
}

impl Default for SphereArgs {
    fn default() -> Self {
        Self {
            delsarte: false,
            n: None,
            theta: None,
            degree: None,
            grid_density: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// The moment hierarchy `las_t`.
    Las,
    /// Lovász `ϑ`.
    Theta,
    /// Schrijver `ϑ′`.
    ThetaPrime,
    /// `w(e) + las_t(Gᵉ)` for the vertex given by `--vertex`.
    ThreePoint,
    /// The Delsarte bound for spherical codes.
    Delsarte,
    /// The exact independence number.
    Alpha,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Las => "las",
            Method::Theta => "theta",
            Method::ThetaPrime => "theta-prime",
            Method::ThreePoint => "three-point",
            Method::Delsarte => "delsarte",
            Method::Alpha => "alpha",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct BoundArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[command(flatten)]
    pub sphere: SphereArgs,
    #[arg(long, value_enum, default_value_t = Method::Las)]
    pub method: Method,
    /// Level of the hierarchy.
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    /// Vertex `e` for the three-point bound.
    #[arg(long, default_value_t = 0)]
    pub vertex: usize,
    /// Treat the graph as vertex-transitive so that the three-point value
    /// bounds `α(G)`.
    #[arg(long)]
    pub assume_transitive: bool,
    /// Also compute `α` exactly and print `α ≤ bound`.
    #[arg(long)]
    pub with_alpha: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Worker threads for independent instances.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Write the polynomial certificate of a Delsarte bound as JSON.
    #[arg(long, value_name = "PATH")]
    pub certificate: Option<PathBuf>,
}

impl Default for BoundArgs {
    fn default() -> Self {
        Self {
            instance: InstanceArgs {
                vertex_cap: DEFAULT_VERTEX_CAP,
                ..InstanceArgs::default()
            },
            solve: SolveArgs::default(),
            sphere: SphereArgs::default(),
            method: Method::Las,
            t: 1,
            vertex: 0,
            assume_transitive: false,
            with_alpha: false,
            format: Format::Table,
            jobs: 1,
            certificate: None,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct AlphaArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Ignore vertex weights.
    #[arg(long)]
    pub unweighted: bool,
    /// Largest vertex count the exact search accepts.
    #[arg(long, default_value_t = DEFAULT_ALPHA_LIMIT)]
    pub alpha_limit: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Args, Debug, Clone)]
pub struct ExportArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[command(flatten)]
    pub sphere: SphereArgs,
    /// `three-point` writes the direct program for `t = 1` and
    /// `las_t(Gᵉ)` otherwise; `delsarte` writes the initial-grid LP.
    #[arg(long, value_enum, default_value_t = Method::Las)]
    pub method: Method,
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    #[arg(long, default_value_t = 0)]
    pub vertex: usize,
    /// Output file; standard output when absent.
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Cap(_) => EXIT_CAP,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SdpError> for CliError {
    fn from(e: SdpError) -> Self {
        match e {
            SdpError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            SdpError::Parse { .. } => CliError::Config(e.to_string()),
            SdpError::Malformed(_) => CliError::Solver(e.to_string()),
        }
    }
}

impl From<HierarchyError> for CliError {
    fn from(e: HierarchyError) -> Self {
        match e {
            _ if e.is_cap() => CliError::Cap(e.to_string()),
            HierarchyError::Graph(g) => g.into(),
            HierarchyError::Sdp(s) => s.into(),
            HierarchyError::Basis(_) | HierarchyError::InvalidInput(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<SphereError> for CliError {
    fn from(e: SphereError) -> Self {
        match e {
            SphereError::InvalidParameter(_) => CliError::Config(e.to_string()),
            SphereError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            SphereError::Sdp(s) => s.into(),
        }
    }
}

/// Parses an angle in radians, or in degrees with a `deg` suffix.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (number, degrees) = match s.strip_suffix("deg") {
        Some(rest) => (rest.trim(), true),
        None => (s, false),
    };
    let v: f64 = number.parse().map_err(|_| format!("`{s}` is not an angle"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not a finite angle"));
    }
    Ok(if degrees { v.to_radians() } else { v })
}

/// A graph with the name it was requested by.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub graph: Graph,
    /// A finite piece of an infinite packing graph.
    pub geometric: bool,
}

/// Generators as `(syntax, description)`.
pub const GENERATORS: &[(&str, &str)] = &[
    ("cycle:N", "cycle C_N"),
    ("complete:N", "complete graph K_N"),
    ("edgeless:N", "N isolated vertices"),
    ("petersen", "the Petersen graph"),
    ("code:Q,N,D", "words of F_Q^N, adjacent at Hamming distance in (0, D)"),
    ("circle:M,THETA", "M equally spaced points on S^1, adjacent at angular distance in (0, THETA)"),
    ("cap:M,THETA1,THETA2", "two cap types on M centres of S^1, weighted by arc length"),
    ("random:N,P,SEED", "Erdős–Rényi G(N, P) from a seeded stream"),
];

fn params<T: std::str::FromStr>(spec: &str, raw: &[&str], count: usize) -> Result<Vec<T>, CliError> {
    if raw.len() != count {
        return Err(CliError::Config(format!(
            "`{spec}` takes {count} parameter{}, got {}",
            if count == 1 { "" } else { "s" },
            raw.len()
        )));
    }
    raw.iter()
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("`{spec}`: cannot parse parameter `{}`", p.trim())))
        })
        .collect()
}

fn angle_param(spec: &str, raw: &str) -> Result<f64, CliError> {
    parse_angle(raw).map_err(|e| CliError::Config(format!("`{spec}`: {e}")))
}

/// Builds the graph named by a `NAME[:PARAMS]` generator spec.
pub fn parse_generator(spec: &str, vertex_cap: usize) -> Result<Instance, CliError> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim(), r),
        None => (spec.trim(), ""),
    };
    let raw: Vec<&str> = if rest.trim().is_empty() {
        Vec::new()
    } else {
        rest.split(',').collect()
    };
    let small = |n: usize| -> Result<usize, CliError> {
        if n > vertex_cap {
            Err(GraphError::CapExceeded {
                what: "generated vertex set",
                size: n,
                cap: vertex_cap,
            }
            .into())
        } else {
            Ok(n)
        }
    };
    let (graph, geometric) = match name {
        "cycle" => (generators::cycle(small(params::<usize>(spec, &raw, 1)?[0])?)?, false),
        "complete" => (generators::complete(small(params::<usize>(spec, &raw, 1)?[0])?)?, false),
        "edgeless" => (Graph::edgeless(small(params::<usize>(spec, &raw, 1)?[0])?), false),
        "petersen" => {
            params::<usize>(spec, &raw, 0)?;
            (generators::petersen(), false)
        }
        "code" => {
            let p = params::<usize>(spec, &raw, 3)?;
            (generators::code_graph_capped(p[0], p[1], p[2], vertex_cap)?, false)
        }
        "circle" => {
            let m = params::<usize>(spec, &raw[..raw.len().min(1)], 1)?[0];
            if raw.len() != 2 {
                return Err(CliError::Config(format!("`{spec}` takes 2 parameters, got {}", raw.len())));
            }
            (generators::circle_code_capped(m, angle_param(spec, raw[1])?, vertex_cap)?, true)
        }
        "cap" => {
            if raw.len() != 3 {
                return Err(CliError::Config(format!("`{spec}` takes 3 parameters, got {}", raw.len())));
            }
            let m = params::<usize>(spec, &raw[..1], 1)?[0];
            let (t1, t2) = (angle_param(spec, raw[1])?, angle_param(spec, raw[2])?);
            (generators::cap_graph_capped(m, t1, t2, vertex_cap)?, true)
        }
        "random" => {
            if raw.len() != 3 {
                return Err(CliError::Config(format!("`{spec}` takes 3 parameters, got {}", raw.len())));
            }
            let n = small(params::<usize>(spec, &raw[..1], 1)?[0])?;
            let p = params::<f64>(spec, &raw[1..2], 1)?[0];
            let seed = params::<u64>(spec, &raw[2..], 1)?[0];
            (generators::random(n, p, seed)?, false)
        }
        _ => {
            return Err(CliError::Config(format!(
                "unknown generator `{name}`; run `packbound gen-list` for the list"
            )))
        }
    };
    Ok(Instance {
        name: spec.trim().to_string(),
        graph,
        geometric,
    })
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let graph = parse_graph(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(Instance {
        name: path.display().to_string(),
        graph,
        geometric: false,
    })
}

/// All instances named on the command line, generators first.
pub fn load_instances(args: &InstanceArgs) -> Result<Vec<Instance>, CliError> {
    let mut out = Vec::new();
    for spec in &args.generators {
        out.push(parse_generator(spec, args.vertex_cap)?);
    }
    for path in &args.input {
        out.push(read_instance(path)?);
    }
    Ok(out)
}

/// One line of `bound` output.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRecord {
    pub graph: String,
    pub method: Method,
    /// `t` for the hierarchy, 1 for `ϑ`/`ϑ′`, the degree for Delsarte.
    pub level: Option<usize>,
    pub vertex: Option<usize>,
    pub bound: f64,
    pub dual_bound: f64,
    pub gap: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub certified: bool,
    pub certified_bound: Option<f64>,
    pub verification_margin: Option<f64>,
    pub certificate_digest: Option<String>,
    /// What the number bounds.
    pub bounds: String,
    pub alpha: Option<f64>,
    pub sandwich: Option<String>,
    pub warnings: Vec<String>,
    pub wall_time: f64,
}

impl BoundRecord {
    fn from_result(graph: String, method: Method, level: Option<usize>, r: &BoundResult, bounds: String) -> Self {
        Self {
            graph,
            method,
            level,
            vertex: None,
            bound: r.value,
            dual_bound: r.dual_value,
            gap: r.gap,
            status: r.status,
            iterations: r.iterations,
            certified: r.is_certified(),
            certified_bound: r.certified_bound,
            verification_margin: Some(r.verification_margin),
            certificate_digest: r.certificate_digest(),
            bounds,
            alpha: None,
            sandwich: None,
            warnings: Vec::new(),
            wall_time: 0.0,
        }
    }

    /// Whether this record should make the process exit with a failure.
    pub fn failed(&self) -> bool {
        (self.method != Method::Alpha && !self.certified) || self.warnings.iter().any(|w| w.starts_with("sandwich"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serialises")
    }

    pub fn to_table(&self) -> String {
        let mut rows: Vec<(&str, String)> = vec![("graph", self.graph.clone())];
        let mut method = self.method.name().to_string();
        match (self.method, self.level) {
            (Method::Delsarte, Some(d)) => method += &format!(", degree {d}"),
            (Method::Las | Method::ThreePoint, Some(t)) => method += &format!(", t = {t}"),
            _ => {}
        }
        if let Some(e) = self.vertex {
            method += &format!(", e = {e}");
        }
        rows.push(("method", method));
        rows.push(("bounds", self.bounds.clone()));
        rows.push(("bound", format!("{:.10}", self.bound)));
        if self.method != Method::Alpha {
            rows.push(("dual bound", format!("{:.10}", self.dual_bound)));
            rows.push(("gap", format!("{:.3e}", self.gap)));
            rows.push(("status", format!("{} ({} iterations)", self.status, self.iterations)));
            rows.push((
                "certified",
                match (self.certified_bound, self.verification_margin) {
                    (Some(b), Some(m)) => format!("yes, {b:.10} (margin {m:.3e})"),
                    (_, Some(m)) => format!("no (margin {m:.3e})"),
                    _ => "no".to_string(),
                },
            ));
        }
        if let Some(d) = &self.certificate_digest {
            rows.push(("digest", d.clone()));
        }
        if let Some(s) = &self.sandwich {
            rows.push(("α ≤ bound", s.clone()));
        }
        rows.push(("wall time", format!("{:.3} s", self.wall_time)));
        for w in &self.warnings {
            rows.push(("warning", w.clone()));
        }
        let mut out = String::new();
        for (k, v) in rows {
            out += &format!("{k:<12} {v}\n");
        }
        out
    }
}

/// One line of `alpha` output.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaRecord {
    pub graph: String,
    pub weighted: bool,
    pub alpha: f64,
    pub witness: Vec<usize>,
    pub wall_time: f64,
}

impl AlphaRecord {
    pub fn to_table(&self) -> String {
        let kind = if self.weighted { "α_w" } else { "α" };
        format!(
            "{:<12} {}\n{:<12} {}\n{:<12} {:?}\n{:<12} {:.3} s\n",
            "graph", self.graph, kind, self.alpha, "witness", self.witness, "wall time", self.wall_time
        )
    }
}

fn solver_options(s: &SolveArgs) -> SolverOptions {
    SolverOptions {
        tol: s.tol,
        max_iter: s.max_iter,
        psd_cap: s.psd_cap,
        ..SolverOptions::default()
    }
}

fn bound_options(s: &SolveArgs) -> BoundOptions {
    BoundOptions {
        solver: solver_options(s),
        verify_tol: s.verify_tol,
        basis_cap: s.basis_cap,
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("--{name} must be positive, got {v}")))
    }
}

fn validate_solve(s: &SolveArgs) -> Result<(), CliError> {
    check_positive("tol", s.tol)?;
    check_positive("verify-tol", s.verify_tol)?;
    if s.max_iter == 0 {
        return Err(CliError::Config("--max-iter must be at least 1".into()));
    }
    Ok(())
}

fn validate_jobs(jobs: usize) -> Result<(), CliError> {
    if jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    Ok(())
}

/// `(n, θ, degree)` after checking the sphere flags against the method.
fn sphere_params(method: Method, sphere: &SphereArgs, instances: &InstanceArgs) -> Result<Option<(usize, f64, usize)>, CliError> {
    let wants = sphere.delsarte || method == Method::Delsarte;
    let any_set = sphere.n.is_some() || sphere.theta.is_some() || sphere.degree.is_some();
    if !wants {
        if any_set {
            return Err(CliError::Config("--n, --theta and --degree need --delsarte".into()));
        }
        return Ok(None);
    }
    if sphere.delsarte && method != Method::Delsarte && method != Method::Las {
        return Err(CliError::Config(format!("--delsarte conflicts with --method {}", method.name())));
    }
    if !instances.generators.is_empty() || !instances.input.is_empty() {
        return Err(CliError::Config("the Delsarte bound takes no graph instance".into()));
    }
    let missing: Vec<&str> = [("--n", sphere.n.is_none()), ("--theta", sphere.theta.is_none()), ("--degree", sphere.degree.is_none())]
        .into_iter()
        .filter_map(|(f, m)| m.then_some(f))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Config(format!("the Delsarte bound needs {}", missing.join(", "))));
    }
    let (n, theta, degree) = (sphere.n.unwrap(), sphere.theta.unwrap(), sphere.degree.unwrap());
    if n < 2 {
        return Err(CliError::Config(format!("--n must be at least 2, got {n}")));
    }
    if !(theta > 0.0 && theta <= std::f64::consts::PI) {
        return Err(CliError::Config(format!("--theta must lie in (0, π], got {theta}")));
    }
    if degree == 0 {
        return Err(CliError::Config("--degree must be at least 1".into()));
    }
    Ok(Some((n, theta, degree)))
}

fn check_transitive_plausible(g: &Graph) -> Result<(), CliError> {
    let n = g.n();
    if n == 0 {
        return Ok(());
    }
    let d = g.degree(0);
    if let Some(v) = (0..n).find(|&v| g.degree(v) != d) {
        return Err(CliError::Config(format!(
            "--assume-transitive: vertex {v} has degree {} but vertex 0 has degree {d}, so the graph is not vertex-transitive",
            g.degree(v)
        )));
    }
    let w = g.weight(0);
    if let Some(v) = (0..n).find(|&v| g.weight(v) != w) {
        return Err(CliError::Config(format!(
            "--assume-transitive: vertex {v} has weight {} but vertex 0 has weight {w}",
            g.weight(v)
        )));
    }
    Ok(())
}

fn bound_instance(inst: &Instance, args: &BoundArgs) -> Result<BoundRecord, CliError> {
    let start = Instant::now();
    let g = &inst.graph;
    let opts = bound_options(&args.solve);
    let subject = if inst.geometric {
        "subgraph bound: bounds α of this finite subgraph only, not of the infinite packing graph"
    } else {
        "α(G)"
    };
    let mut record = match args.method {
        Method::Las => {
            let r = las_bound_with(g, args.t, &opts)?;
            BoundRecord::from_result(inst.name.clone(), Method::Las, Some(args.t), &r, subject.into())
        }
        Method::Theta | Method::ThetaPrime => {
            let r = theta_with(g, args.method == Method::ThetaPrime, &opts)?;
            BoundRecord::from_result(inst.name.clone(), args.method, Some(1), &r, subject.into())
        }
        Method::ThreePoint => {
            let r = three_point_bound_with(g, args.vertex, args.t, &opts)?;
            let bounds = if args.assume_transitive {
                format!("{subject} (assuming vertex-transitivity)")
            } else {
                "1 + α(Gᵉ)".into()
            };
            let mut rec = BoundRecord::from_result(inst.name.clone(), Method::ThreePoint, Some(args.t), &r, bounds);
            rec.vertex = Some(args.vertex);
            if !args.assume_transitive {
                rec.warnings.push("bounds 1+α(Gᵉ) only; pass --assume-transitive to bound α(G)".into());
            }
            rec
        }
        Method::Alpha => {
            let a = alpha_exact_with_limit(g, !g.is_unweighted(), DEFAULT_ALPHA_LIMIT)?;
            BoundRecord {
                graph: inst.name.clone(),
                method: Method::Alpha,
                level: None,
                vertex: None,
                bound: a.value,
                dual_bound: a.value,
                gap: 0.0,
                status: SolveStatus::Optimal,
                iterations: 0,
                certified: false,
                certified_bound: None,
                verification_margin: None,
                certificate_digest: None,
                bounds: format!("{subject} (exact value by branch and bound)"),
                alpha: Some(a.value),
                sandwich: None,
                warnings: Vec::new(),
                wall_time: 0.0,
            }
        }
        Method::Delsarte => unreachable!("handled without a graph"),
    };
    if inst.geometric {
        record.warnings.push("subgraph bound".into());
    }
    if args.with_alpha && args.method != Method::Alpha {
        let a = alpha_exact_with_limit(g, !g.is_unweighted(), DEFAULT_ALPHA_LIMIT)?;
        let shown = record.certified_bound.unwrap_or(record.bound);
        record.alpha = Some(a.value);
        let target = if args.method == Method::ThreePoint && !args.assume_transitive {
            let (local, _) = g.local_subgraph(args.vertex)?;
            g.weight(args.vertex) + alpha_exact_with_limit(&local, !g.is_unweighted(), DEFAULT_ALPHA_LIMIT)?.value
        } else {
            a.value
        };
        record.sandwich = Some(format!("{} ≤ {shown:.10}", a.value));
        if target > shown + SANDWICH_TOL {
            record.warnings.push(format!("sandwich violated: {target} > {shown}"));
        }
    }
    record.wall_time = start.elapsed().as_secs_f64();
    Ok(record)
}

fn delsarte_record(n: usize, theta: f64, degree: usize, args: &BoundArgs) -> Result<(BoundRecord, SphereCertificate), CliError> {
    let start = Instant::now();
    let opts = DelsarteOptions {
        grid_density: args.sphere.grid_density,
        solver: solver_options(&args.solve),
        verify_tol: args.solve.verify_tol,
        ..DelsarteOptions::default()
    };
    let (r, report) = delsarte_lp_bound_with(n, theta, degree, &opts)?;
    let name = format!("sphere:n={n},theta={theta}");
    let bounds = format!("size of a spherical code on S^{} with minimal angle θ, bound at degree {degree}", n - 1);
    let mut rec = BoundRecord::from_result(name, Method::Delsarte, Some(degree), &r, bounds);
    rec.wall_time = start.elapsed().as_secs_f64();
    Ok((rec, SphereCertificate::new(n, theta, &report)))
}

fn run_pool<T: Send, R: Send>(jobs: usize, items: Vec<T>, f: impl Fn(T) -> R + Sync + Send) -> Vec<R> {
    if jobs <= 1 {
        return items.into_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool starts");
    pool.install(|| items.into_par_iter().map(f).collect())
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Config(format!("cannot write output: {e}")))
}

/// Runs `bound`, writing reports to `out` and diagnostics to `err`.
pub fn run_bound(args: &BoundArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    validate_solve(&args.solve)?;
    validate_jobs(args.jobs)?;
    if args.t == 0 {
        return Err(CliError::Config("--t must be at least 1".into()));
    }
    if let Some((n, theta, degree)) = sphere_params(args.method, &args.sphere, &args.instance)? {
        let (rec, cert) = delsarte_record(n, theta, degree, args)?;
        if let Some(path) = &args.certificate {
            std::fs::write(path, cert.to_json() + "\n")
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        }
        emit(out, args.format, &rec)?;
        return Ok(if rec.failed() { EXIT_SOLVER } else { EXIT_OK });
    }
    if args.certificate.is_some() {
        return Err(CliError::Config("--certificate applies to the Delsarte bound only".into()));
    }
    let instances = load_instances(&args.instance)?;
    if instances.is_empty() {
        return Err(CliError::Config("no instance given; use --gen or --input".into()));
    }
    for inst in &instances {
        if args.method == Method::ThreePoint && args.vertex >= inst.graph.n() {
            return Err(CliError::Config(format!(
                "{}: --vertex {} is out of range for {} vertices",
                inst.name,
                args.vertex,
                inst.graph.n()
            )));
        }
        if args.assume_transitive {
            check_transitive_plausible(&inst.graph).map_err(|e| CliError::Config(format!("{}: {e}", inst.name)))?;
        }
    }
    let results = run_pool(args.jobs, instances, |inst| {
        let name = inst.name.clone();
        bound_instance(&inst, args).map_err(|e| (name, e))
    });
    let mut code = EXIT_OK;
    for r in results {
        match r {
            Ok(rec) => {
                emit(out, args.format, &rec)?;
                if rec.failed() {
                    code = code.max(EXIT_SOLVER);
                }
            }
            Err((name, e)) => {
                let _ = writeln!(err, "error: {name}: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    Ok(code)
}

fn emit(out: &mut dyn Write, format: Format, rec: &BoundRecord) -> Result<(), CliError> {
    match format {
        Format::Json => write_out(out, &(rec.to_json() + "\n")),
        Format::Table => write_out(out, &(rec.to_table() + "\n")),
    }
}

/// Runs `alpha`.
pub fn run_alpha(args: &AlphaArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    validate_jobs(args.jobs)?;
    let instances = load_instances(&args.instance)?;
    if instances.is_empty() {
        return Err(CliError::Config("no instance given; use --gen or --input".into()));
    }
    let results = run_pool(args.jobs, instances, |inst| {
        let start = Instant::now();
        let weighted = !args.unweighted && !inst.graph.is_unweighted();
        alpha_exact_with_limit(&inst.graph, weighted, args.alpha_limit)
            .map(|a| AlphaRecord {
                graph: inst.name.clone(),
                weighted,
                alpha: a.value,
                witness: a.witness,
                wall_time: start.elapsed().as_secs_f64(),
            })
            .map_err(|e| (inst.name.clone(), CliError::from(e)))
    });
    let mut code = EXIT_OK;
    for r in results {
        match r {
            Ok(rec) => match args.format {
                Format::Json => write_out(out, &(serde_json::to_string(&rec).expect("plain data serialises") + "\n"))?,
                Format::Table => write_out(out, &(rec.to_table() + "\n"))?,
            },
            Err((name, e)) => {
                let _ = writeln!(err, "error: {name}: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    Ok(code)
}

/// The SDP that `bound` would solve for these arguments.
pub fn export_problem(args: &ExportArgs) -> Result<(String, SdpProblem), CliError> {
    validate_solve(&args.solve)?;
    if args.t == 0 {
        return Err(CliError::Config("--t must be at least 1".into()));
    }
    if let Some((n, theta, degree)) = sphere_params(args.method, &args.sphere, &args.instance)? {
        let p = DelsarteProblem::new(n, theta, degree, args.sphere.grid_density)?;
        return Ok((format!("sphere:n={n},theta={theta}"), p.linear_program()));
    }
    let mut instances = load_instances(&args.instance)?;
    if instances.len() != 1 {
        return Err(CliError::Config(format!(
            "export-sdpa takes exactly one instance, got {}",
            instances.len()
        )));
    }
    let inst = instances.remove(0);
    let g = &inst.graph;
    let problem = match args.method {
        Method::Las => assemble_lasserre_with(g, args.t, true, args.solve.basis_cap)?.problem().clone(),
        Method::Theta | Method::ThetaPrime => two_point_program(g, args.method == Method::ThetaPrime).0,
        Method::ThreePoint if args.t == 1 => three_point_program(g, args.vertex)?,
        Method::ThreePoint => {
            let (local, _) = g.local_subgraph(args.vertex)?;
            assemble_lasserre_with(&local, args.t, true, args.solve.basis_cap)?.problem().clone()
        }
        Method::Alpha => return Err(CliError::Config("`alpha` has no SDP to export".into())),
        Method::Delsarte => unreachable!("handled above"),
    };
    let psd = problem.psd_dimension();
    if psd > args.solve.psd_cap {
        return Err(SdpError::CapExceeded {
            size: psd,
            cap: args.solve.psd_cap,
        }
        .into());
    }
    Ok((inst.name, problem))
}

/// Runs `export-sdpa`.
pub fn run_export(args: &ExportArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (_, problem) = export_problem(args)?;
    let text = export_sdpa(&problem);
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => write_out(out, &text)?,
    }
    Ok(EXIT_OK)
}

/// Runs `gen-list`.
pub fn run_gen_list(out: &mut dyn Write) -> Result<i32, CliError> {
    let width = GENERATORS.iter().map(|(s, _)| s.len()).max().unwrap_or(0);
    let mut text = String::new();
    for (syntax, about) in GENERATORS {
        text += &format!("{syntax:<width$}  {about}\n");
    }
    text += "\nAngles are in radians, or in degrees with a `deg` suffix (60deg).\n";
    write_out(out, &text)?;
    Ok(EXIT_OK)
}

/// Runs a parsed command line; returns the exit status.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Bound(a) => run_bound(a, out, err),
        Command::Alpha(a) => run_alpha(a, out, err),
        Command::ExportSdpa(a) => run_export(a, out),
        Command::GenList => run_gen_list(out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (program name first) and runs them.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_CONFIG
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_from(std::iter::once("packbound").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert!((parse_angle("60deg").unwrap() - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
        assert!(parse_angle("sixty").is_err());
    }

    #[test]
    fn generators_parse() {
        assert_eq!(parse_generator("cycle:7", 100).unwrap().graph.n(), 7);
        assert_eq!(parse_generator("code:2,5,3", 100).unwrap().graph.n(), 32);
        assert!(parse_generator("circle:12,60deg", 100).unwrap().geometric);
        assert_eq!(parse_generator("cap:4,45deg,45deg", 100).unwrap().graph.n(), 8);
        assert!(matches!(parse_generator("cycle", 100), Err(CliError::Config(_))));
        assert!(matches!(parse_generator("wheel:5", 100), Err(CliError::Config(_))));
        assert!(matches!(parse_generator("cycle:500", 100), Err(CliError::Cap(_))));
    }

    #[test]
    fn c5_at_level_two() {
        let (code, out, _) = run_args(&["bound", "--gen", "cycle:5", "--method", "las", "--t", "2", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert!((v["bound"].as_f64().unwrap() - 2.0).abs() < 1e-6);
        for key in ["graph", "level", "bound", "dual_bound", "gap", "status", "certificate_digest", "wall_time"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn three_point_warns_without_transitivity() {
        let (code, out, _) = run_args(&["bound", "--gen", "petersen", "--method", "three-point", "--t", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("bounds 1+α(Gᵉ) only"), "{out}");
        let (_, out, _) = run_args(&["bound", "--gen", "petersen", "--method", "three-point", "--assume-transitive"]);
        assert!(!out.contains("bounds 1+α(Gᵉ) only"));
    }

    #[test]
    fn sandwich_and_subgraph_label() {
        let (code, out, _) = run_args(&["bound", "--gen", "circle:9,80deg", "--with-alpha"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("subgraph bound"));
        assert!(out.contains("α ≤ bound"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["bound"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["bound", "--gen", "cycle:5", "--t", "0"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["bound", "--gen", "cycle:5", "--tol", "-1"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["bound", "--gen", "nope"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["bound", "--gen", "code:2,6,3", "--t", "3", "--basis-cap", "50"]).0, EXIT_CAP);
        assert_eq!(run_args(&["bound", "--gen", "cycle:9", "--method", "theta", "--psd-cap", "4"]).0, EXIT_CAP);
        for iters in ["1", "2", "3"] {
            let (code, out, _) = run_args(&["bound", "--gen", "cycle:9", "--max-iter", iters, "--format", "json"]);
            let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
            let certified = v["certified"].as_bool().unwrap();
            assert_eq!(code, if certified { EXIT_OK } else { EXIT_SOLVER });
            assert_eq!(certified, v["certified_bound"].is_number());
        }
        assert_eq!(run_args(&["bound", "--gen", "cycle:5", "--assume-transitive", "--method", "three-point", "--input", "/nonexistent"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["bound", "--delsarte", "--n", "8"]).0, EXIT_CONFIG);
    }

    #[test]
    fn export_round_trips() {
        let args = ExportArgs {
            instance: InstanceArgs {
                generators: vec!["petersen".into()],
                input: Vec::new(),
                vertex_cap: 100,
            },
            solve: SolveArgs::default(),
            sphere: SphereArgs::default(),
            method: Method::ThetaPrime,
            t: 1,
            vertex: 0,
            output: None,
        };
        let (_, p) = export_problem(&args).unwrap();
        let mut out = Vec::new();
        run_export(&args, &mut out).unwrap();
        let back = crate::sdp::import_sdpa(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(back.m(), p.m());
        assert_eq!(back.blocks(), p.blocks());
    }

    #[test]
    fn gen_list_names_every_generator() {
        let (code, out, _) = run_args(&["gen-list"]);
        assert_eq!(code, 0);
        for (syntax, _) in GENERATORS {
            assert!(out.contains(syntax));
        }
    }
}
