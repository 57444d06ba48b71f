//! Command-line front end: argument definitions, dispatch and rendering.
//!
//! Exit codes: 0 ok, 2 unreadable or malformed input, 3 violated
//! precondition, 4 precision exhausted, 5 avoidance exhausted, 6 internal.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::density::{density_sample, DensityError, DensityRequest};
use crate::hensel::{hensel_lift, solve_for_target_traced, HenselError, HenselProblem};
use crate::local_maps::{ImplicitSystem, LocalChart, LocalMapError};
use crate::mvpoly::{PolyError, PolyMap};
use crate::parse::{parse_poly, parse_scalar_list, ParseError};
use crate::scalar::Scalar;
use crate::smoothness::{select_pivot, smooth_check, SmoothnessError, VarietySpec, Verdict};
use crate::system::{parse_system, Role, SystemSpec};
use crate::valued::{elements, format_vector, Valuation, ValuedElement};

#[derive(Parser, Debug)]
#[command(name = "henselian", version, about = "Hensel lifting, local inverses and smooth-point sampling over Z_p and F_p[[t]]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Lift the base point of a square system to its unique nearby root.
    Lift { file: PathBuf },
    /// Solve f(x) = y for x in the maximal ideal.
    Solve {
        file: PathBuf,
        /// Comma-separated target vector.
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Evaluate the scaled local inverse of f at y.
    Invert {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Evaluate the implicit function of an `implicit r=k` system at u.
    Implicit {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
    },
    /// Jacobian smoothness test at the base point.
    Smooth { file: PathBuf },
    /// Sample points of the variety close to the base point.
    Sample {
        file: PathBuf,
        /// Number of points.
        #[arg(long)]
        m: usize,
        /// Minimum valuation of the displacement from the base point.
        #[arg(long)]
        level: u32,
        /// Polynomial that must not vanish at the sampled points.
        #[arg(long, allow_hyphen_values = true)]
        avoid: Option<String>,
        /// Maximum number of candidates examined.
        #[arg(long)]
        budget: Option<usize>,
    },
}

impl Command {
    pub fn file(&self) -> &PathBuf {
        match self {
            Command::Lift { file }
            | Command::Solve { file, .. }
            | Command::Invert { file, .. }
            | Command::Implicit { file, .. }
            | Command::Smooth { file }
            | Command::Sample { file, .. } => file,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid --{flag}: {message}")]
    Argument { flag: &'static str, message: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("avoidance exhausted: {0}")]
    AvoidanceExhausted(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) | CliError::Argument { .. } => 2,
            CliError::Precondition(_) => 3,
            CliError::PrecisionExhausted(_) => 4,
            CliError::AvoidanceExhausted(_) => 5,
            CliError::Internal(_) => 6,
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<HenselError> for CliError {
    fn from(e: HenselError) -> Self {
        match e {
            HenselError::MaxIterationsExceeded(_) => CliError::Internal(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<LocalMapError> for CliError {
    fn from(e: LocalMapError) -> Self {
        match e {
            LocalMapError::Hensel(h) => h.into(),
            LocalMapError::PrecisionExhausted { .. } => CliError::PrecisionExhausted(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<SmoothnessError> for CliError {
    fn from(e: SmoothnessError) -> Self {
        match e {
            SmoothnessError::LocalMap(l) => l.into(),
            SmoothnessError::NoPivotFound => CliError::Internal(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<DensityError> for CliError {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::Smoothness(s) => s.into(),
            DensityError::LocalMap(l) => l.into(),
            DensityError::PrecisionExhausted { .. } => CliError::PrecisionExhausted(e.to_string()),
            DensityError::AvoidanceExhausted { .. } => CliError::AvoidanceExhausted(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

/// Reads the command's system file and executes it.
pub fn run(command: &Command) -> Result<String, CliError> {
    let path = command.file();
    let source = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    execute(command, &source)
}

/// Executes `command` against the system file contents `source`.
pub fn execute(command: &Command, source: &str) -> Result<String, CliError> {
    let spec = parse_system(source)?;
    match command {
        Command::Lift { .. } => lift(&spec),
        Command::Solve { y, .. } => solve(&spec, y),
        Command::Invert { y, .. } => invert(&spec, y),
        Command::Implicit { u, .. } => implicit(&spec, u),
        Command::Smooth { .. } => smooth(&spec),
        Command::Sample { m, level, avoid, budget, .. } => sample(&spec, *m, *level, avoid.as_deref(), *budget),
    }
}

fn vector_arg(spec: &SystemSpec, flag: &'static str, text: &str, len: usize) -> Result<Vec<ValuedElement>, CliError> {
    let scalars = parse_scalar_list(text, spec.ring, 1, 1).map_err(|e| CliError::Argument { flag, message: format!("column {}: {}", e.column, e.message) })?;
    if scalars.len() != len {
        return Err(CliError::Argument { flag, message: format!("expected {len} components, found {}", scalars.len()) });
    }
    Ok(elements(&spec.ring, &scalars))
}

fn polymap(spec: &SystemSpec) -> Result<PolyMap, CliError> {
    Ok(PolyMap::new(spec.polynomials())?)
}

fn require_origin(spec: &SystemSpec, command: &str) -> Result<(), CliError> {
    if spec.at_origin() {
        Ok(())
    } else {
        Err(CliError::Precondition(format!("'{command}' works at the origin; translate the system and drop the 'point' line")))
    }
}

fn claimed_dim(spec: &SystemSpec, command: &str) -> Result<usize, CliError> {
    match spec.role {
        Some(Role::Variety { dim }) => Ok(dim),
        Some(Role::Implicit { r }) => Ok(r),
        _ => Err(CliError::Precondition(format!("'{command}' needs a 'variety dim=<k>' or 'implicit r=<k>' line"))),
    }
}

fn lift(spec: &SystemSpec) -> Result<String, CliError> {
    let base = elements(&spec.ring, &spec.point_or_origin());
    let prob = HenselProblem::new(polymap(spec)?, base)?;
    let res = hensel_lift(&prob)?;
    Ok(format!("root = {} (iterations {}, residual ≥ {})\n", format_vector(&res.root), res.iterations, res.residual_valuation))
}

fn solve(spec: &SystemSpec, y: &str) -> Result<String, CliError> {
    let f = polymap(spec)?;
    let y = vector_arg(spec, "y", y, f.coarity())?;
    require_origin(spec, "solve")?;
    let prob = HenselProblem::at_origin(f)?;
    let res = solve_for_target_traced(&prob, &y)?;
    Ok(format!("x = {} (iterations {}, residual ≥ {})\n", format_vector(&res.root), res.iterations, res.residual_valuation))
}

fn invert(spec: &SystemSpec, y: &str) -> Result<String, CliError> {
    require_origin(spec, "invert")?;
    let chart = LocalChart::new(polymap(spec)?)?;
    let y = vector_arg(spec, "y", y, chart.f().arity())?;
    let sol = chart.inverse_eval(&y)?;
    Ok(format!(
        "x = {} (e = {}, v(e) = {}, certified precision {})\n",
        format_vector(&sol.values),
        chart.e(),
        chart.e_valuation(),
        sol.certified_precision
    ))
}

fn implicit(spec: &SystemSpec, u: &str) -> Result<String, CliError> {
    require_origin(spec, "implicit")?;
    let Some(Role::Implicit { r }) = spec.role else {
        return Err(CliError::Precondition("'implicit' needs an 'implicit r=<k>' line".to_string()));
    };
    let system = ImplicitSystem::new(polymap(spec)?, r)?;
    let u = vector_arg(spec, "u", u, r)?;
    let sol = system.graph_point(&u)?;
    let chart = system.chart();
    Ok(format!(
        "phi(u) = {}\ngraph point = {}\ne = {}, v(e) = {}, certified precision {}\n",
        format_vector(&sol.values[r..]),
        format_vector(&sol.values),
        chart.e(),
        chart.e_valuation(),
        sol.certified_precision
    ))
}

fn names(all: &[String], idx: &[usize]) -> String {
    idx.iter().map(|&i| all[i].as_str()).collect::<Vec<_>>().join(", ")
}

fn smooth(spec: &SystemSpec) -> Result<String, CliError> {
    let dim = claimed_dim(spec, "smooth")?;
    let variety = VarietySpec::new(spec.polynomials(), spec.point_or_origin(), dim)?;
    let report = smooth_check(&variety)?;
    let (rank, codim) = (report.jacobian_rank, report.codim);
    let mut out = match report.verdict {
        Verdict::NotSmooth => format!("rank {rank}, NOT smooth at point (expected codim {codim})\n"),
        Verdict::RankExceedsCodim => {
            format!("rank {rank} exceeds codim {codim}: claimed dimension {dim} is inconsistent at point\n")
        }
        Verdict::Smooth => format!("rank {rank}, smooth at point (codim {codim})\n"),
    };
    if report.verdict == Verdict::Smooth {
        let pivot = select_pivot(&variety, &report)?;
        let poly_names: Vec<String> = spec.polys.iter().map(|(n, _)| n.clone()).collect();
        out.push_str(&format!("pivot generators: {}\n", names(&poly_names, &pivot.generators)));
        out.push_str(&format!("pivot variables: {}\n", names(&spec.vars, &pivot.variables)));
        out.push_str(&format!("variable order: {}\n", names(&spec.vars, &pivot.var_order)));
        out.push_str(&format!("e = {}, v(e) = {}\n", pivot.minor_det, pivot.valuation));
    }
    Ok(out)
}

/// Left-aligned columns separated by two spaces.
fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            line.push_str(cell);
            if c + 1 < row.len() {
                line.extend(std::iter::repeat_n(' ', widths[c] - cell.chars().count() + 2));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn sample(spec: &SystemSpec, m: usize, level: u32, avoid: Option<&str>, budget: Option<usize>) -> Result<String, CliError> {
    let dim = claimed_dim(spec, "sample")?;
    let variety = VarietySpec::new(spec.polynomials(), spec.point_or_origin(), dim)?;
    let mut req = DensityRequest::new(variety, m, level);
    req.budget = budget;
    let q = match avoid {
        Some(text) => Some(
            parse_poly(text, spec.ring, &spec.vars, 1, 1)
                .map_err(|e| CliError::Argument { flag: "avoid", message: format!("column {}: {}", e.column, e.message) })?,
        ),
        None => spec.avoid.clone(),
    };
    if let Some(q) = q.clone() {
        req = req.avoiding(q);
    }
    let report = density_sample(&req)?;
    let base: Vec<String> = spec.point_or_origin().iter().map(Scalar::to_string).collect();
    let mut out = format!(
        "{} points near ({}) at displacement valuation ≥ {} (certified precision {}, e = {}, v(e) = {})\n",
        report.points.len(),
        base.join(", "),
        level,
        report.certified_precision,
        report.pivot.minor_det,
        report.pivot.valuation
    );
    let mut header = vec!["#".to_string()];
    header.extend(spec.vars.iter().cloned());
    header.push("disp".to_string());
    header.extend(spec.polys.iter().map(|(n, _)| format!("v({n})")));
    if q.is_some() {
        header.push("v(q)".to_string());
    }
    let mut rows = vec![header];
    for (k, pt) in report.points.iter().enumerate() {
        let mut row = vec![(k + 1).to_string()];
        row.extend(pt.coords.iter().map(ValuedElement::to_string));
        row.push(pt.displacement_valuation.to_string());
        row.extend(pt.generator_valuations.iter().map(Valuation::to_string));
        if let Some(v) = pt.avoid_valuation {
            row.push(v.to_string());
        }
        rows.push(row);
    }
    out.push_str(&table(&rows));
    Ok(out)
}
