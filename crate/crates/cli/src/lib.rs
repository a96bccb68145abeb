//! Command-line front end for `twisted-torsion`: input files, commands and
//! reports.
//!
//! Every command yields a [`Report`]: a human-readable table and a JSON
//! value with sorted keys and rationals written as `"p/q"` strings.

pub mod formats;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;
use twisted_torsion::dupont::{stabilized_twisted_cohomology, StabilizationReport};
use twisted_torsion::forms::PiecewiseForm;
use twisted_torsion::pipeline::{
    mw_complex, reidemeister_torsion, subdivision_compare, tau_mw, tau_twist, whitney_twist, CohomologyBases,
    PipelineError, TorsionResult,
};
use twisted_torsion::simplicial::{twisted_cochain_complex, Cochain, OrderedComplex, Pi1Presentation, Representation};
use twisted_torsion::spectral::Parity;
use twisted_torsion::{Matrix, Rational, Vector};

use crate::formats::{load_bases, load_cocycle, load_complex, load_rep};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("refused: {0}")]
    Refused(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Refused(_) => 2,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        if e.is_refusal() {
            CliError::Refused(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "twisted-torsion", version, about = "Exact twisted cohomology and Reidemeister torsion")]
pub struct Cli {
    /// Print the JSON report instead of the table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Mw,
    Dupont,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Twisted Betti numbers and twisted cohomology dimensions.
    Cohomology {
        complex: String,
        #[arg(long)]
        rep: Option<PathBuf>,
        #[arg(long)]
        cocycle: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Model::Mw)]
        model: Model,
        /// Highest Dupont truncation level (default: dim K + 1).
        #[arg(long)]
        max_level: Option<u32>,
    },
    /// Reidemeister torsion, and its twisted versions when a cocycle is given.
    Torsion {
        complex: String,
        #[arg(long)]
        rep: Option<PathBuf>,
        #[arg(long)]
        cocycle: Option<PathBuf>,
        #[arg(long)]
        bases: Option<PathBuf>,
    },
    /// Pages of the spectral sequence of the parity filtration.
    Pages {
        complex: String,
        #[arg(long)]
        rep: Option<PathBuf>,
        #[arg(long)]
        cocycle: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_page: usize,
        /// Include the matrices of the page differentials.
        #[arg(long)]
        differentials: bool,
    },
    /// Compares one barycentric subdivision with the original.
    SubdivideCheck {
        complex: String,
        #[arg(long)]
        rep: Option<PathBuf>,
        #[arg(long)]
        cocycle: Option<PathBuf>,
    },
    /// Piecewise polynomial forms.
    Forms {
        #[command(subcommand)]
        action: FormsCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum FormsCommand {
    /// Whitney lift of a cocycle, with the integration check.
    Lift {
        complex: String,
        #[arg(long)]
        cocycle: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub json: Value,
}

pub fn rational(x: &Rational) -> Value {
    Value::String(x.to_string())
}

fn vector_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

fn vectors_json(vs: &[Vector]) -> Value {
    Value::Array(vs.iter().map(|v| vector_json(v)).collect())
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|r| vector_json(m.row(r))).collect())
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

fn complex_json(k: &OrderedComplex) -> Value {
    json!({ "vertices": k.vertex_count(), "dimension": k.dimension(), "counts": k.counts() })
}

struct Input {
    k: OrderedComplex,
    p: Pi1Presentation,
    rho: Representation,
    theta: Vec<Cochain>,
}

fn load(complex: &str, rep: &Option<PathBuf>, cocycle: &Option<PathBuf>) -> Result<Input, CliError> {
    let k = load_complex(complex)?;
    let (p, rho) = load_rep(&k, rep.as_deref())?;
    let theta = load_cocycle(&k, cocycle.as_deref())?;
    Ok(Input { k, p, rho, theta })
}

pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Cohomology { complex, rep, cocycle, model, max_level } => {
            cohomology(&load(complex, rep, cocycle)?, *model, *max_level)
        }
        Command::Torsion { complex, rep, cocycle, bases } => {
            let input = load(complex, rep, cocycle)?;
            torsion(&input, bases)
        }
        Command::Pages { complex, rep, cocycle, max_page, differentials } => {
            pages(&load(complex, rep, cocycle)?, *max_page, *differentials)
        }
        Command::SubdivideCheck { complex, rep, cocycle } => subdivide_check(&load(complex, rep, cocycle)?),
        Command::Forms { action: FormsCommand::Lift { complex, cocycle } } => {
            let k = load_complex(complex)?;
            let theta = load_cocycle(&k, Some(cocycle))?;
            forms_lift(&k, &theta)
        }
    }
}

fn ladder_json(r: &StabilizationReport) -> Value {
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|l| json!({ "level": l.level, "even": l.even, "odd": l.odd, "saturated": l.saturated }))
        .collect();
    let dims = r.dims().ok();
    json!({
        "levels": rows,
        "max_level": r.max_level,
        "stabilized_at": r.stabilized_at,
        "even": dims.map(|d| d.0),
        "odd": dims.map(|d| d.1),
    })
}

fn cohomology(input: &Input, model: Model, max_level: Option<u32>) -> Result<Report, CliError> {
    let Input { k, p, rho, theta } = input;
    let mut text = String::new();
    let betti = twisted_cochain_complex(k, p, rho).map_err(PipelineError::from)?.cohomology_dims();
    writeln!(text, "twisted Betti numbers: {betti:?}").unwrap();
    let mut out = serde_json::Map::new();
    out.insert("command".into(), json!("cohomology"));
    out.insert("complex".into(), complex_json(k));
    out.insert("twisted_betti".into(), json!(betti));
    if matches!(model, Model::Mw | Model::Both) {
        match mw_complex(k, p, rho, theta) {
            Ok(mw) => {
                let (e, o) = mw.cohomology_dims();
                writeln!(text, "mathai-wu: even {e}, odd {o}").unwrap();
                out.insert("mw".into(), json!({ "even": e, "odd": o }));
            }
            Err(e @ PipelineError::Obstruction(_)) if model == Model::Both => {
                writeln!(text, "mathai-wu: unavailable ({e})").unwrap();
                out.insert("mw".into(), json!({ "unavailable": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if matches!(model, Model::Dupont | Model::Both) {
        let level = max_level.unwrap_or(k.dimension() as u32 + 1);
        let t = whitney_twist(k, theta)?;
        let r = stabilized_twisted_cohomology(k, p, rho, &t, level, false).map_err(PipelineError::from)?;
        writeln!(text, "dupont ladder:").unwrap();
        writeln!(text, "  {:>5} {:>5} {:>5} {:>9}", "level", "even", "odd", "saturated").unwrap();
        for l in &r.rows {
            writeln!(text, "  {:>5} {:>5} {:>5} {:>9}", l.level, l.even, l.odd, l.saturated).unwrap();
        }
        match r.dims() {
            Ok((e, o)) => {
                writeln!(text, "dupont: even {e}, odd {o} (stable from level {})", r.stabilized_at.unwrap_or(0))
            }
            Err(e) => writeln!(text, "dupont: {e}"),
        }
        .unwrap();
        let stabilized = r.dims().is_ok();
        out.insert("dupont".into(), ladder_json(&r));
        if !stabilized && model == Model::Dupont {
            return Err(CliError::Refused(format!("no two consecutive levels up to {level} agree")));
        }
    }
    Ok(Report { text, json: Value::Object(out) })
}

fn torsion_json(t: &TorsionResult) -> Value {
    let bases = match &t.bases {
        CohomologyBases::Graded(per) => {
            json!({ "per_degree": per.iter().map(|b| vectors_json(b)).collect::<Vec<_>>() })
        }
        CohomologyBases::Twisted { even, odd } => json!({ "even": vectors_json(even), "odd": vectors_json(odd) }),
    };
    json!({
        "coordinate": rational(t.coordinate()),
        "up_to_sign": t.up_to_sign,
        "provenance": t.provenance.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "bases": bases,
    })
}

fn torsion_line(text: &mut String, name: &str, t: &TorsionResult) {
    let routes: Vec<String> = t.provenance.iter().map(|r| r.to_string()).collect();
    writeln!(text, "{name:<10} {:>14}  (up to sign; via {})", t.coordinate().to_string(), routes.join(" -> ")).unwrap();
}

fn torsion(input: &Input, bases: &Option<PathBuf>) -> Result<Report, CliError> {
    let Input { k, p, rho, theta } = input;
    let bases = load_bases(bases.as_deref())?;
    let mut text = String::new();
    let mut out = serde_json::Map::new();
    out.insert("command".into(), json!("torsion"));
    out.insert("complex".into(), complex_json(k));
    let tau = reidemeister_torsion(k, p, rho, bases.untwisted.as_deref())?;
    torsion_line(&mut text, "tau", &tau);
    out.insert("tau".into(), torsion_json(&tau));
    if !theta.is_empty() {
        let mw = mw_complex(k, p, rho, theta)?;
        let twisted = bases.twisted.as_ref().map(|(e, o)| (e.as_slice(), o.as_slice()));
        let a = tau_mw(&mw, rho, twisted)?;
        let b = tau_twist(&mw, rho, bases.untwisted.as_deref(), twisted)?;
        torsion_line(&mut text, "tau_mw", &a);
        torsion_line(&mut text, "tau_twist", &b);
        out.insert("tau_mw".into(), torsion_json(&a));
        out.insert("tau_twist".into(), torsion_json(&b));
    }
    Ok(Report { text, json: Value::Object(out) })
}

fn pages(input: &Input, max_page: usize, differentials: bool) -> Result<Report, CliError> {
    let Input { k, p, rho, theta } = input;
    let mw = mw_complex(k, p, rho, theta)?;
    let ss = mw.spectral_sequence(max_page.max(1))?;
    let mut text = String::new();
    writeln!(text, "{:>3} {:>3} {:>6} {:>5}", "r", "p", "parity", "dim").unwrap();
    let mut rows = Vec::new();
    for page in ss.pages() {
        for cell in page.cells() {
            writeln!(text, "{:>3} {:>3} {:>6} {:>5}", page.r, cell.p, parity_name(cell.parity), cell.dim()).unwrap();
            let mut row = json!({ "r": page.r, "p": cell.p, "parity": parity_name(cell.parity), "dim": cell.dim() });
            if differentials {
                let d = ss.differential(page.r, cell.p, cell.parity).map_err(PipelineError::from)?;
                row["differential"] = matrix_json(&d);
            }
            rows.push(row);
        }
    }
    if differentials {
        for page in ss.pages() {
            for cell in page.cells() {
                let d = ss.differential(page.r, cell.p, cell.parity).map_err(PipelineError::from)?;
                if d.rows() > 0 && d.cols() > 0 && !d.is_zero() {
                    writeln!(text, "d_{} from ({}, {}):", page.r, cell.p, parity_name(cell.parity)).unwrap();
                    for r in 0..d.rows() {
                        let entries: Vec<String> = d.row(r).iter().map(|x| x.to_string()).collect();
                        writeln!(text, "  [{}]", entries.join(" ")).unwrap();
                    }
                }
            }
        }
    }
    let stable = ss.stable_page();
    writeln!(text, "stable from page {}", stable.map_or("-".into(), |s| s.to_string())).unwrap();
    let json = json!({ "command": "pages", "complex": complex_json(k), "cells": rows, "stable_page": stable });
    Ok(Report { text, json })
}

fn pair_json(pair: &Option<(Rational, Rational)>) -> Value {
    match pair {
        Some((a, b)) => json!({ "original": rational(a), "subdivided": rational(b), "ratio": rational(&(b / a)) }),
        None => Value::Null,
    }
}

fn subdivide_check(input: &Input) -> Result<Report, CliError> {
    let Input { k, p, rho, theta } = input;
    let r = subdivision_compare(k, p, rho, theta)?;
    let mut text = String::new();
    writeln!(text, "twisted Betti numbers: {:?} -> {:?}", r.betti.0, r.betti.1).unwrap();
    writeln!(text, "mathai-wu dims:        {:?} -> {:?}", r.mw_dims.0, r.mw_dims.1).unwrap();
    let show = |x: Option<Rational>| x.map_or("not computed".to_string(), |v| v.to_string());
    writeln!(text, "torsion ratio:         {}", show(r.torsion_ratio())).unwrap();
    writeln!(text, "twisted torsion ratio: {}", show(r.twisted_torsion_ratio())).unwrap();
    let ok = r.dims_agree() && r.ratios_are_units();
    writeln!(text, "consistent:            {ok}").unwrap();
    let json = json!({
        "command": "subdivide-check",
        "complex": complex_json(k),
        "twisted_betti": [r.betti.0, r.betti.1],
        "mw_dims": [[r.mw_dims.0 .0, r.mw_dims.0 .1], [r.mw_dims.1 .0, r.mw_dims.1 .1]],
        "torsion": pair_json(&r.torsion),
        "twisted_torsion": pair_json(&r.twisted_torsion),
        "consistent": ok,
    });
    Ok(Report { text, json })
}

fn forms_lift(k: &OrderedComplex, theta: &[Cochain]) -> Result<Report, CliError> {
    let mut text = String::new();
    let mut components = Vec::new();
    for c in theta {
        let lift = PiecewiseForm::whitney_lift(k, c).map_err(PipelineError::from)?;
        let back = lift.integration_map(k);
        let roundtrip = back == *c;
        writeln!(text, "degree {} (integrates back: {roundtrip})", c.degree).unwrap();
        let mut pieces = serde_json::Map::new();
        for s in k.maximal_simplices() {
            let form = lift.piece_on(k, &s).expect("simplex of the complex");
            let names: Vec<&str> = s.iter().map(|&v| k.names()[v].as_str()).collect();
            let key = names.join(" ");
            writeln!(text, "  [{key}]  {form}").unwrap();
            pieces.insert(key, Value::String(form.to_string()));
        }
        components.push(json!({ "degree": c.degree, "roundtrip": roundtrip, "pieces": pieces }));
    }
    let json = json!({ "command": "forms-lift", "complex": complex_json(k), "components": components });
    Ok(Report { text, json })
}

/// Renders the report as requested and writes the JSON file if asked.
pub fn emit(cli: &Cli, report: &Report) -> Result<String, CliError> {
    let json = serde_json::to_string_pretty(&report.json).expect("json values serialize");
    if let Some(path) = &cli.report {
        std::fs::write(path, format!("{json}\n")).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(if cli.json { format!("{json}\n") } else { report.text.clone() })
}
