//! JSON documents and the `qudecide` command line.
//!
//! Gate-set documents look like
//!
//! ```json
//! {"d": 2, "gates": [
//!   {"name": "H", "builtin": "H"},
//!   {"name": "T", "builtin": "phase", "phi": 0.7853981633974483},
//!   {"name": "R", "axis_angle": {"phi": 1.0, "k": [0, 0, 1]}},
//!   {"name": "M", "matrix": [[[0, 0], [1, 0]], [[-1, 0], [0, 0]]]}
//! ]}
//! ```
//!
//! Complex entries are `[re, im]`. `axis_angle` is only valid for `d = 2`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adjoint::adjoint_of;
use crate::ballspec::{is_exceptional_spectrum, N_SU2};
use crate::commutant::GateSet;
use crate::decider::{decide, suggest_fix, DeciderConfig, Verdict, VerdictKind};
use crate::linalg::{project_to_special_unitary, ComplexMatrix, LinalgError, UnitaryGate};
use crate::oracle::{closure_enumerate, epsilon_net_coverage};
use crate::su2geom::{hadamard, phase_gate, su2_from_axis_angle, AxisAngle};

pub const EXIT_UNIVERSAL: i32 = 0;
pub const EXIT_FINITE: i32 = 10;
pub const EXIT_NOT_UNIVERSAL: i32 = 11;
pub const EXIT_INCONCLUSIVE: i32 = 12;
pub const EXIT_INPUT: i32 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field {field}: {message}")]
    Field { field: String, message: String },
    #[error("gate {gate:?} fails {invariant}: {detail}")]
    Validation {
        gate: String,
        invariant: String,
        detail: String,
    },
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisAngleDoc {
    pub phi: f64,
    pub k: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis_angle: Option<AxisAngleDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSetDocument {
    pub d: usize,
    pub gates: Vec<GateEntry>,
}

fn field(i: usize, name: &str, message: impl Into<String>) -> CliError {
    CliError::Field {
        field: format!("gates[{i}].{name}"),
        message: message.into(),
    }
}

fn validation(gate: &str, e: LinalgError) -> CliError {
    let invariant = match &e {
        LinalgError::NotUnitary { invariant, .. } => (*invariant).to_owned(),
        LinalgError::NonFinite { .. } => "finite entries".to_owned(),
        LinalgError::NotSquare { .. } => "square shape".to_owned(),
        LinalgError::Singular(_) => "nonsingular (projection)".to_owned(),
        _ => "gate invariants".to_owned(),
    };
    CliError::Validation {
        gate: gate.to_owned(),
        invariant,
        detail: e.to_string(),
    }
}

fn entry_to_gate(
    i: usize,
    e: &GateEntry,
    d: usize,
    project: bool,
) -> Result<UnitaryGate, CliError> {
    let sources = [
        e.matrix.is_some(),
        e.builtin.is_some(),
        e.axis_angle.is_some(),
    ];
    if sources.iter().filter(|&&x| x).count() != 1 {
        return Err(field(
            i,
            "name",
            format!(
                "gate {:?} needs exactly one of matrix, builtin, axis_angle",
                e.name
            ),
        ));
    }
    if e.phi.is_some() && e.builtin.as_deref() != Some("phase") {
        return Err(field(
            i,
            "phi",
            "only the phase builtin takes a top-level phi",
        ));
    }
    let gate = if let Some(rows) = &e.matrix {
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(field(
                i,
                "matrix",
                format!("expected a {d}x{d} array of [re, im] pairs"),
            ));
        }
        let m = ComplexMatrix::from_fn(d, d, |r, c| {
            num_complex::Complex64::new(rows[r][c][0], rows[r][c][1])
        });
        match UnitaryGate::new(e.name.clone(), m.clone()) {
            Ok(g) => g,
            Err(err) if project && !matches!(err, LinalgError::NonFinite { .. }) => {
                project_to_special_unitary(&m).map_err(|x| validation(&e.name, x))?
            }
            Err(err) => return Err(validation(&e.name, err)),
        }
    } else if let Some(b) = &e.builtin {
        if d != 2 {
            return Err(field(i, "builtin", "builtin gates are 2x2; set d = 2"));
        }
        match (b.as_str(), e.phi) {
            ("H", _) => hadamard(),
            ("phase", Some(phi)) if phi.is_finite() => phase_gate(phi),
            ("phase", _) => return Err(field(i, "phi", "the phase builtin needs a finite phi")),
            (other, _) => {
                return Err(field(
                    i,
                    "builtin",
                    format!("unknown builtin {other:?}; use \"H\" or \"phase\""),
                ))
            }
        }
    } else {
        let a = e.axis_angle.as_ref().expect("checked above");
        if d != 2 {
            return Err(field(i, "axis_angle", "axis_angle gates need d = 2"));
        }
        let parsed = if project {
            AxisAngle::normalized(a.phi, a.k)
        } else {
            AxisAngle::new(a.phi, a.k)
        };
        let aa = parsed.map_err(|err| CliError::Validation {
            gate: e.name.clone(),
            invariant: "unit axis".into(),
            detail: err.to_string(),
        })?;
        su2_from_axis_angle(&aa)
    };
    Ok(gate.renamed(e.name.clone()))
}

/// Parses and validates a gate-set document.
pub fn parse_gateset(text: &str, project: bool) -> Result<GateSet, CliError> {
    let doc: GateSetDocument = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.d < 2 {
        return Err(CliError::Field {
            field: "d".into(),
            message: format!("need d >= 2, got {}", doc.d),
        });
    }
    if doc.gates.is_empty() {
        return Err(CliError::Field {
            field: "gates".into(),
            message: "at least one gate is required".into(),
        });
    }
    let gates = doc
        .gates
        .iter()
        .enumerate()
        .map(|(i, e)| entry_to_gate(i, e, doc.d, project))
        .collect::<Result<Vec<_>, _>>()?;
    GateSet::new(gates).map_err(|e| CliError::Field {
        field: "gates".into(),
        message: e.to_string(),
    })
}

/// Every gate written as a full-precision matrix entry.
pub fn gateset_document(s: &GateSet) -> GateSetDocument {
    let gates = s
        .gates()
        .iter()
        .map(|g| {
            let m = g.matrix();
            GateEntry {
                name: g.name().to_owned(),
                matrix: Some(
                    (0..s.d())
                        .map(|r| (0..s.d()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                        .collect(),
                ),
                builtin: None,
                phi: None,
                axis_angle: None,
            }
        })
        .collect();
    GateSetDocument { d: s.d(), gates }
}

pub fn serialize_gateset(s: &GateSet) -> String {
    serde_json::to_string_pretty(&gateset_document(s)).expect("plain data serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub tol_rank: f64,
    pub tol_eq: f64,
    pub tol_center: f64,
    pub max_word_len: usize,
    pub max_group_size: usize,
    pub n_power_max: u32,
    pub classify_non_universal: bool,
}

impl From<&DeciderConfig> for ConfigEcho {
    fn from(c: &DeciderConfig) -> Self {
        Self {
            tol_rank: c.tol_rank,
            tol_eq: c.tol_eq,
            tol_center: c.tol_center,
            max_word_len: c.max_word_len,
            max_group_size: c.max_group_size,
            n_power_max: c.n_power_max,
            classify_non_universal: c.classify_non_universal,
        }
    }
}

/// Report of a `check` run. Every field is always present (absent values are `null`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictDocument {
    pub verdict: String,
    pub kernel_dim: usize,
    pub terminating_l: Option<usize>,
    pub order: Option<usize>,
    pub witness_word: Option<Vec<String>>,
    pub witness_power: Option<u32>,
    pub reason: Option<String>,
    pub suggestion: Option<String>,
    pub warnings: Vec<String>,
    pub config: ConfigEcho,
}

impl VerdictDocument {
    pub fn new(s: &GateSet, v: &Verdict, cfg: &DeciderConfig) -> Self {
        Self {
            verdict: v.kind.as_str().to_owned(),
            kernel_dim: v.kernel_dim,
            terminating_l: v.terminating_l,
            order: v.order,
            witness_word: v.witness.as_ref().map(|w| w.word.names(s)),
            witness_power: v.witness.as_ref().map(|w| w.power),
            reason: v.reason.clone(),
            suggestion: suggest_fix(s, v).ok(),
            warnings: v.warnings.clone(),
            config: cfg.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        exit_code_for(&self.verdict)
    }
}

pub fn exit_code_for(verdict: &str) -> i32 {
    match verdict {
        v if v == VerdictKind::Universal.as_str() => EXIT_UNIVERSAL,
        v if v == VerdictKind::FiniteGroup.as_str() => EXIT_FINITE,
        v if v == VerdictKind::NotUniversal.as_str() => EXIT_NOT_UNIVERSAL,
        v if v == VerdictKind::Inconclusive.as_str() => EXIT_INCONCLUSIVE,
        _ => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qudecide",
    version,
    about = "Decide whether one-qudit gates generate a dense subgroup of SU(d)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Relative singular-value threshold for the commutant kernel
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_rank: f64,
    /// HS distance under which two group elements are identified
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_eq: f64,
    /// Longest word to expand [default: 13 for d = 2, 20 otherwise]
    #[arg(long, global = true)]
    pub max_word_len: Option<usize>,
    /// Largest group to enumerate
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_group: usize,
    /// Largest power tried per element [default: 6 for d = 2, 64 otherwise]
    #[arg(long, global = true)]
    pub n_power_max: Option<u32>,
    /// Skip enumerating the group when the commutant test fails
    #[arg(long, global = true)]
    pub no_classify: bool,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Project slightly non-unitary matrices onto SU(d) instead of rejecting them
    #[arg(long, global = true)]
    pub project: bool,
    /// Seed for Haar sampling
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide universality
    Check { file: PathBuf },
    /// Print the adjoint matrix of every gate
    Adjoint { file: PathBuf },
    /// Eigenphases, ball membership and exceptionality of every gate
    Spectrum { file: PathBuf },
    /// Enumerate the generated group by brute force
    Closure { file: PathBuf },
    /// Estimate how well short words cover SU(d)
    Netcov {
        file: PathBuf,
        /// Longest word to include
        #[arg(long, default_value_t = 8)]
        cap: usize,
        /// Number of Haar-random targets
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

impl Options {
    pub fn config(&self, d: usize) -> DeciderConfig {
        let mut c = DeciderConfig::for_dimension(d);
        c.tol_rank = self.tol_rank;
        c.tol_eq = self.tol_eq;
        c.max_group_size = self.max_group;
        c.classify_non_universal = !self.no_classify;
        if let Some(l) = self.max_word_len {
            c.max_word_len = l;
        }
        if let Some(n) = self.n_power_max {
            c.n_power_max = n;
        }
        c
    }
}

fn load(path: &PathBuf, project: bool) -> Result<GateSet, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_gateset(&text, project)
}

fn fmt_f(x: Option<usize>) -> String {
    x.map_or_else(|| "-".to_owned(), |v| v.to_string())
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    writeln!(out, "{text}")
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let o = &cli.opts;
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match &cli.command {
        Command::Check { file } => {
            let s = load(file, o.project)?;
            let cfg = o.config(s.d());
            let v = decide(&s, &cfg).map_err(|e| CliError::Field {
                field: "config".into(),
                message: e.to_string(),
            })?;
            let doc = VerdictDocument::new(&s, &v, &cfg);
            if o.json {
                emit_json(out, &doc).map_err(io)?;
            } else {
                write_verdict_text(out, &doc).map_err(io)?;
            }
            Ok(doc.exit_code())
        }
        Command::Adjoint { file } => {
            let s = load(file, o.project)?;
            let mats: Vec<(String, Vec<Vec<f64>>)> = s
                .gates()
                .iter()
                .map(|g| {
                    let a = adjoint_of(g).expect("validated gate").into_matrix();
                    let rows = (0..a.nrows())
                        .map(|r| a.row(r).iter().copied().collect())
                        .collect();
                    (g.name().to_owned(), rows)
                })
                .collect();
            if o.json {
                let v: Vec<_> = mats
                    .iter()
                    .map(|(n, m)| serde_json::json!({"name": n, "adjoint": m}))
                    .collect();
                emit_json(out, &serde_json::json!({ "d": s.d(), "gates": v })).map_err(io)?;
            } else {
                for (name, m) in &mats {
                    writeln!(out, "Ad[{name}]").map_err(io)?;
                    for row in m {
                        let cells: Vec<String> = row.iter().map(|x| format!("{x:>10.6}")).collect();
                        writeln!(out, "  {}", cells.join(" ")).map_err(io)?;
                    }
                }
            }
            Ok(0)
        }
        Command::Spectrum { file } => {
            let s = load(file, o.project)?;
            let n_bound = if s.d() == 2 {
                N_SU2
            } else {
                o.config(s.d()).n_power_max
            };
            let mut rows = Vec::new();
            for g in s.gates() {
                let c = is_exceptional_spectrum(g, n_bound).map_err(|e| validation(g.name(), e))?;
                rows.push(serde_json::json!({
                    "name": g.name(),
                    "phases": c.phases.as_slice(),
                    "in_ball": c.in_ball,
                    "exceptional": c.exceptional,
                    "n_power": c.n_power,
                }));
            }
            if o.json {
                emit_json(
                    out,
                    &serde_json::json!({ "d": s.d(), "n_bound": n_bound, "gates": rows }),
                )
                .map_err(io)?;
            } else {
                for r in &rows {
                    writeln!(
                        out,
                        "{}: phases {} in_ball={} exceptional={} n_power={}",
                        r["name"].as_str().unwrap_or(""),
                        r["phases"],
                        r["in_ball"],
                        r["exceptional"],
                        r["n_power"]
                    )
                    .map_err(io)?;
                }
            }
            Ok(0)
        }
        Command::Closure { file } => {
            let s = load(file, o.project)?;
            let r = closure_enumerate(&s, o.max_group, o.tol_eq);
            let doc = serde_json::json!({
                "order": if r.overflowed { None } else { Some(r.order) },
                "elements_found": r.order,
                "generations": r.generations,
                "overflowed": r.overflowed,
            });
            if o.json {
                emit_json(out, &doc).map_err(io)?;
            } else if r.overflowed {
                writeln!(
                    out,
                    "no closure within {} elements ({} generations)",
                    o.max_group, r.generations
                )
                .map_err(io)?;
            } else {
                writeln!(out, "order {} ({} generations)", r.order, r.generations).map_err(io)?;
            }
            Ok(0)
        }
        Command::Netcov { file, cap, samples } => {
            let s = load(file, o.project)?;
            let cfg = o.config(s.d());
            let v = decide(&s, &cfg).map_err(|e| CliError::Field {
                field: "config".into(),
                message: e.to_string(),
            })?;
            let r = epsilon_net_coverage(&s, *cap, *samples, o.seed);
            let mut warnings = Vec::new();
            if v.kind != VerdictKind::Universal {
                warnings.push(format!(
                    "NotDense: the set was judged {}; coverage cannot reach every target",
                    v.kind.as_str()
                ));
            }
            let doc = serde_json::json!({
                "word_length_cap": r.word_length_cap,
                "samples": r.samples,
                "seed": r.seed,
                "words": r.words,
                "max_min_distance": r.max_min_distance,
                "epsilon_target": r.epsilon_target,
                "covered": r.max_min_distance < r.epsilon_target,
                "warnings": warnings,
            });
            if o.json {
                emit_json(out, &doc).map_err(io)?;
            } else {
                writeln!(
                    out,
                    "{} words up to length {}: worst distance {:.6} over {} samples (target {:.6})",
                    r.words, r.word_length_cap, r.max_min_distance, r.samples, r.epsilon_target
                )
                .map_err(io)?;
                for w in &warnings {
                    writeln!(out, "warning: {w}").map_err(io)?;
                }
            }
            Ok(0)
        }
    }
}

fn write_verdict_text(out: &mut dyn Write, d: &VerdictDocument) -> std::io::Result<()> {
    writeln!(out, "verdict: {}", d.verdict)?;
    writeln!(out, "kernel_dim: {}", d.kernel_dim)?;
    writeln!(out, "terminating_l: {}", fmt_f(d.terminating_l))?;
    writeln!(out, "order: {}", fmt_f(d.order))?;
    if let (Some(w), Some(p)) = (&d.witness_word, d.witness_power) {
        writeln!(out, "witness: ({})^{p}", w.join(" "))?;
    }
    if let Some(r) = &d.reason {
        writeln!(out, "reason: {r}")?;
    }
    if let Some(s) = &d.suggestion {
        writeln!(out, "suggestion: {s}")?;
    }
    for w in &d.warnings {
        writeln!(out, "warning: {w}")?;
    }
    Ok(())
}
