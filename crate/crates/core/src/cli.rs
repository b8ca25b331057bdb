//! Command-line front end.
//!
//! Exit codes: 0 success or feasible, 1 invalid input (bad frame, table,
//! permutation or extension), 2 I/O or parse error, 3 infeasible or no model.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::extension::{
    build_system, minimize_negativity, solve_signed, solve_traditional, symmetrize, ExtensionResult, LinearSystem,
    Status,
};
use crate::files::{ExtensionFile, SpaceFile};
use crate::frame::{Automorphism, AutomorphismGroup, ObservedDistribution, DEFAULT_AUTOMORPHISM_CAP};
use crate::kscheck::{self, BasisSystem, ParityVerdict};
use crate::scenarios::{self, EighthAngle};
use crate::space::SignedDistribution;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "obspace", version, about = "Exact signed and traditional extensions of observation spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate an observation-space file.
    Check {
        file: PathBuf,
        /// Also check that this extension file agrees with every observed probability.
        #[arg(long)]
        extension: Option<PathBuf>,
    },
    /// Solve the extension problem for an observation-space file.
    Extend {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Emit a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print a built-in observation space as a file.
    Scenario {
        #[arg(value_enum)]
        name: ScenarioName,
        /// Orientations a,b,c in eighths of π (bell only).
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        angles: Option<Vec<i64>>,
    },
    /// Average an extension over a group of automorphisms.
    Symmetrize {
        space: PathBuf,
        extension: PathBuf,
        /// Use every automorphism of the space.
        #[arg(long, conflicts_with = "perm", required_unless_present = "perm")]
        auto: bool,
        /// Generator in cycle notation over outcome labels, e.g. "(+++,---)(++-,--+)".
        #[arg(long = "perm", value_name = "CYCLES")]
        perm: Vec<String>,
    },
    /// Search a basis system for consistent one-ray-per-basis selections.
    Ks {
        /// Basis-system file; the bundled 18-ray system when omitted.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Maximum number of selections to enumerate.
        #[arg(long, default_value_t = 10_000)]
        limit: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Signed,
    Traditional,
    MinNegativity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    Piponi,
    Bell,
    Hardy,
    HardyHidden,
}

/// A failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

type CmdResult = Result<i32, Failure>;

fn code_for(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::InvalidBasisSystem(_) | Error::InvalidPermutation(_) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: code_for(&e),
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn load_space(path: &Path) -> Result<ObservedDistribution, Failure> {
    let file: SpaceFile = serde_json::from_str(&read(path)?).map_err(|e| io_failure(path, e))?;
    file.to_observed().map_err(|e| Failure {
        code: code_for(&e),
        message: format!("{}: {e}", path.display()),
    })
}

fn load_extension(path: &Path, obs: &ObservedDistribution) -> Result<SignedDistribution, Failure> {
    let file: ExtensionFile = serde_json::from_str(&read(path)?).map_err(|e| io_failure(path, e))?;
    file.to_distribution(obs.space()).map_err(|e| Failure {
        code: code_for(&e),
        message: format!("{}: {e}", path.display()),
    })
}

/// Run a parsed command, writing the report to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Check { file, extension } => cmd_check(&file, extension.as_deref(), out),
        Command::Extend { file, mode, json } => cmd_extend(&file, mode, json, out),
        Command::Scenario { name, angles } => cmd_scenario(name, angles.as_deref(), out),
        Command::Symmetrize {
            space,
            extension,
            auto,
            perm,
        } => cmd_symmetrize(&space, &extension, auto, &perm, out, err),
        Command::Ks { file, limit } => cmd_ks(file.as_deref(), limit, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Parse arguments (including the program name) and run.
pub fn run_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            if e.use_stderr() {
                EXIT_IO
            } else {
                // --help and --version
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            }
        }
    }
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| Failure { code: EXIT_IO, message: e.to_string() })?
    };
}

fn cmd_check(path: &Path, extension: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let obs = load_space(path)?;
    let frame = obs.frame();
    say!(out, "ok: {} outcomes, {} ensembles", obs.space().len(), frame.ensembles().len());
    for en in frame.ensembles() {
        say!(out, "  ensemble {}: {} parts", en.name, en.partition.len());
    }
    let refinement = frame.common_refinement();
    if refinement.len() == obs.space().len() {
        say!(out, "common refinement: singletons");
    } else {
        say!(
            out,
            "common refinement: {} parts over {} outcomes (fat outcomes present)",
            refinement.len(),
            obs.space().len()
        );
    }
    let Some(ext) = extension else {
        return Ok(EXIT_OK);
    };
    let d = load_extension(ext, &obs)?;
    match obs.first_mismatch(&d)? {
        None => {
            say!(out, "extends observed distribution: true");
            say!(out, "traditional: {}", d.is_traditional());
            Ok(EXIT_OK)
        }
        Some(why) => {
            say!(out, "extends observed distribution: false ({why})");
            Ok(EXIT_INVALID)
        }
    }
}

#[derive(Serialize)]
struct Multiplier {
    row: String,
    multiplier: String,
}

#[derive(Serialize)]
struct ExtendReport {
    mode: Mode,
    status: String,
    feasible: bool,
    outcomes: Vec<String>,
    rank: usize,
    nullspace_dimension: usize,
    witness: Option<ExtensionFile>,
    traditional: Option<bool>,
    negative_mass: Option<String>,
    certificate: Option<Vec<Multiplier>>,
    certificate_valid: Option<bool>,
}

fn report(mode: Mode, obs: &ObservedDistribution, sys: &LinearSystem, r: &ExtensionResult) -> ExtendReport {
    let space = obs.space();
    ExtendReport {
        mode,
        status: r.status.to_string(),
        feasible: r.is_feasible(),
        outcomes: space.labels().to_vec(),
        rank: r.rank,
        nullspace_dimension: r.nullspace.len(),
        witness: r.witness.as_ref().map(|w| ExtensionFile::from_weights(space, w)),
        traditional: r.witness.as_ref().map(|w| w.iter().all(|x| x.sign() >= 0)),
        negative_mass: r.negative_mass.as_ref().map(ToString::to_string),
        certificate: r.certificate.as_ref().map(|c| {
            sys.rows()
                .iter()
                .zip(&c.multipliers)
                .map(|(row, y)| Multiplier {
                    row: row.label.clone(),
                    multiplier: y.to_string(),
                })
                .collect()
        }),
        certificate_valid: r.certificate.as_ref().map(|c| c.is_valid(sys)),
    }
}

fn cmd_extend(path: &Path, mode: Mode, json: bool, out: &mut dyn Write) -> CmdResult {
    let obs = load_space(path)?.normalize_fat_outcomes()?;
    let sys = build_system(&obs);
    let result = match mode {
        Mode::Signed => solve_signed(&sys),
        Mode::Traditional => solve_traditional(&sys),
        Mode::MinNegativity => match minimize_negativity(&sys) {
            Ok(r) => r,
            Err(Error::Infeasible) => solve_signed(&sys),
            Err(e) => return Err(e.into()),
        },
    };
    let rep = report(mode, &obs, &sys, &result);
    if json {
        say!(out, "{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
    } else {
        say!(out, "mode: {}", mode.to_possible_value().expect("named").get_name());
        say!(out, "status: {}", rep.status);
        say!(out, "rank: {} of {} unknowns", rep.rank, sys.vars());
        say!(out, "nullspace dimension: {}", rep.nullspace_dimension);
        if let Some(w) = &rep.witness {
            say!(out, "witness:");
            for (label, value) in &w.weights {
                say!(out, "  {label}: {value}");
            }
        }
        if let Some(m) = &rep.negative_mass {
            say!(out, "negative mass: {m}");
        }
        if let Some(cert) = &rep.certificate {
            say!(out, "certificate (nonzero row multipliers):");
            for m in cert.iter().filter(|m| m.multiplier != "0") {
                say!(out, "  {}: {}", m.row, m.multiplier);
            }
            if let Some(c) = &result.certificate {
                let lhs = c.combined_coefficients(&sys);
                let terms: Vec<String> = lhs
                    .iter()
                    .zip(obs.space().labels())
                    .filter(|(v, _)| !v.is_zero())
                    .map(|(v, l)| format!("({v})q[{l}]"))
                    .collect();
                let lhs_text = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                say!(out, "  combination: {} = {}", lhs_text, c.combined_rhs(&sys));
                say!(out, "  valid: {}", c.is_valid(&sys));
            }
        }
    }
    Ok(if result.status == Status::Infeasible {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    })
}

fn cmd_scenario(name: ScenarioName, angles: Option<&[i64]>, out: &mut dyn Write) -> CmdResult {
    let bundle = match (name, angles) {
        (ScenarioName::Bell, Some(a)) => {
            let [a, b, c] = a else {
                return Err(Failure {
                    code: EXIT_IO,
                    message: format!("--angles takes three values, got {}", a.len()),
                });
            };
            let k = |v: i64| {
                EighthAngle::new(v).map_err(|e| Failure {
                    code: EXIT_IO,
                    message: e.to_string(),
                })
            };
            scenarios::bell(k(*a)?, k(*b)?, k(*c)?)
        }
        (_, Some(_)) => {
            return Err(Failure {
                code: EXIT_IO,
                message: "--angles applies to the bell scenario only".into(),
            })
        }
        (ScenarioName::Piponi, None) => scenarios::piponi(),
        (ScenarioName::Bell, None) => scenarios::bell_default(),
        (ScenarioName::Hardy, None) => scenarios::hardy(),
        (ScenarioName::HardyHidden, None) => scenarios::hardy_hidden(),
    };
    say!(out, "{}", SpaceFile::from_observed(&bundle.observed).to_json());
    Ok(EXIT_OK)
}

/// Parse "(a,b,c)(d,e)" into label cycles. "()" is the identity.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<String>>, Error> {
    let bad = |msg: &str| Error::InvalidPermutation(format!("{msg} in `{text}`"));
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err(bad("empty permutation"));
    }
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
        let close = body.find(')').ok_or_else(|| bad("unclosed cycle"))?;
        let inner = &body[..close];
        if inner.contains('(') {
            return Err(bad("nested `(`"));
        }
        let labels: Vec<String> = inner
            .split(',')
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        if !labels.is_empty() {
            cycles.push(labels);
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

fn cmd_symmetrize(
    space: &Path,
    extension: &Path,
    auto: bool,
    perms: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let obs = load_space(space)?;
    let q = load_extension(extension, &obs)?;
    let group = if auto {
        AutomorphismGroup::enumerate(&obs, DEFAULT_AUTOMORPHISM_CAP)?
    } else {
        let gens = perms
            .iter()
            .map(|p| Automorphism::from_cycles(obs.space(), &parse_cycles(p)?))
            .collect::<Result<Vec<_>, Error>>()?;
        AutomorphismGroup::generate(&obs, &gens)?
    };
    let r = symmetrize(&obs, &q, &group)?;
    let _ = writeln!(err, "averaged over a group of order {}", group.len());
    say!(out, "{}", ExtensionFile::from_distribution(&r).to_json());
    Ok(EXIT_OK)
}

fn cmd_ks(file: Option<&Path>, limit: usize, out: &mut dyn Write) -> CmdResult {
    let system = match file {
        Some(p) => BasisSystem::from_json(&read(p)?).map_err(|e| io_failure(p, e))?,
        None => BasisSystem::cabello(),
    };
    let rep = kscheck::validate_system(&system);
    say!(out, "bases: {}", rep.bases);
    say!(out, "distinct rays: {}", rep.distinct_rays);
    for (ray, count) in system.rays().iter().zip(&rep.occurrences) {
        say!(out, "  ray {ray}: in {count} bases");
    }
    let bad: Vec<usize> = (0..rep.bases).filter(|&i| !rep.orthogonal[i]).collect();
    if bad.is_empty() {
        say!(out, "orthogonality: all bases orthogonal");
    } else {
        say!(out, "orthogonality: non-orthogonal bases {bad:?}");
    }
    say!(out, "cabello profile (9 bases, 18 rays, each in 2 bases): {}", rep.cabello_profile);
    match kscheck::parity_obstruction(&system) {
        ParityVerdict::Obstruction { bases } => say!(
            out,
            "parity: obstruction (every ray in exactly two bases, {bases} bases is odd)"
        ),
        ParityVerdict::NoObstruction { bases } => {
            say!(out, "parity: no obstruction ({bases} bases is even)")
        }
        ParityVerdict::NotApplicable => say!(out, "parity: not applicable"),
    }
    if !bad.is_empty() {
        return Ok(EXIT_INVALID);
    }
    let selections = kscheck::find_selections(&system, limit)?;
    let capped = if selections.len() >= limit { " (limit reached)" } else { "" };
    say!(out, "selections: {}{capped}", selections.len());
    for s in &selections {
        say!(out, "  {:?}", s.choice);
    }
    if selections.is_empty() {
        say!(out, "model exists: false");
        Ok(EXIT_INFEASIBLE)
    } else {
        say!(out, "model exists: true");
        Ok(EXIT_OK)
    }
}
