//! Command-line front end.
//!
//! `trisect <command> <file> [--json] [--seed N] [--log out.moves]`
//!
//! Results go to the output stream, diagnostics to the error stream. Exit
//! code 0 on success, 1 on an invalid diagram or unreadable input, 2 on a
//! usage error.

pub mod file;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::diagram::{linking_lift, KVector, Label, Trisection, ValidationReport};
use crate::form::{
    form_by_definition, form_fast, form_fast_full, form_general, BilinearForm, FormError, FormInvariants,
    FormMethod,
};
use crate::homology::{h2_kernel_formula, h2_symmetric, h3_direct, homology_profile, HomologyError, HomologyProfile};
use crate::linalg::{AbelianGroup, IntVector, IntegerMatrix};
use crate::moves::{format_log, parse_log, reduce, verify_move_invariance, CongruenceReport, MoveState};
use file::{DiagramFile, Payload};

pub const REPORT_SCHEMA: &str = "trisect-report/1";

#[derive(Parser, Debug)]
#[command(name = "trisect", version, about = "Homology and intersection forms of 4-manifolds from trisection diagram data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for `example random`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Move log: written by `reduce`, read by `replay`.
    #[arg(long, global = true)]
    log: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Diagram checks and k-vector.
    Validate { file: PathBuf },
    /// H0 through H4 and the Euler characteristic.
    Homology { file: PathBuf },
    /// Intersection form by every applicable method, with invariants.
    Form { file: PathBuf },
    /// H2 by the kernel formula and the symmetric formula.
    H2 { file: PathBuf },
    /// H3 as the triple intersection of the Lagrangians.
    H3 { file: PathBuf },
    /// Linking number of two null-homologous classes in the 3-manifold of a pair.
    Linking {
        file: PathBuf,
        /// First class, comma separated (length 2g).
        #[arg(long, allow_hyphen_values = true)]
        j: String,
        /// Second class, comma separated (length 2g).
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        /// Pair of systems, e.g. `ab`, `ag`, `bg`.
        #[arg(long, default_value = "ab")]
        pair: String,
    },
    /// Normalize and congruence-reduce the intersection matrices.
    Reduce { file: PathBuf },
    /// Apply a move log (given with --log) to a diagram.
    Replay { file: PathBuf },
    /// Print a bundled example diagram (`random` uses --seed).
    Example { name: String },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("invalid diagram\n{0}")]
    Invalid(Box<ValidationReport>),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[derive(Serialize, Default)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_vector: Option<KVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationReport>,
    /// For matrix payloads: whether curve classes realizing the matrices were found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realized: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homology: Option<HomologyProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h2: Option<H2Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h3: Option<H3Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<FormReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linking: Option<LinkingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moves: Option<MovesReport>,
    pub timing_ms: f64,
}

#[derive(Serialize)]
pub struct H2Report {
    pub complex: AbelianGroup,
    pub kernel_formula: AbelianGroup,
    /// Absent when curve classes are unavailable.
    pub symmetric: Option<AbelianGroup>,
    pub agree: bool,
}

#[derive(Serialize)]
pub struct H3Report {
    pub complex: AbelianGroup,
    pub direct: AbelianGroup,
    pub agree: bool,
}

#[derive(Serialize)]
pub struct MethodOutcome {
    pub method: FormMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<IntegerMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Serialize)]
pub struct FormReport {
    /// Columns are `H₂` representatives in the `γ`-basis.
    pub basis: IntegerMatrix,
    pub matrix: IntegerMatrix,
    pub methods: Vec<MethodOutcome>,
    pub agree: bool,
    pub invariants: FormInvariants,
    /// The fast formula on all of `ℤ^g`, when it applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fast_full: Option<IntegerMatrix>,
}

#[derive(Serialize)]
pub struct LinkingReport {
    pub pair: [Label; 2],
    pub j: Vec<serde_json::Value>,
    pub k: Vec<serde_json::Value>,
    /// The class `j ∈ L_A` pairing like `J` with `L_B`.
    pub lift: Vec<serde_json::Value>,
    pub value: serde_json::Value,
}

#[derive(Serialize)]
pub struct MatricesOut {
    pub alpha_beta: IntegerMatrix,
    pub gamma_beta: IntegerMatrix,
    pub alpha_gamma: IntegerMatrix,
}

#[derive(Serialize)]
pub struct MovesReport {
    pub count: usize,
    /// The log itself, unless it was written to a file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_file: Option<String>,
    pub final_matrices: MatricesOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_complete: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub congruence: Option<CongruenceReport>,
    /// Replaying the log on the input reproduces the final matrices.
    pub replay_verified: bool,
    /// Homology profile and form invariants unchanged.
    pub invariance_verified: bool,
    pub notes: Vec<String>,
}

fn vec_json(v: &[BigInt]) -> Vec<serde_json::Value> {
    v.iter().map(crate::bigint_json).collect()
}

fn read_diagram(path: &PathBuf) -> Result<DiagramFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    file::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn validation_of(f: &DiagramFile) -> ValidationReport {
    match &f.payload {
        Payload::Curves(d) => d.validate(),
        Payload::Matrices(m) => m.validate(),
    }
}

fn trisection_of(f: &DiagramFile) -> Result<Trisection, CliError> {
    let r = match &f.payload {
        Payload::Curves(d) => Trisection::from_curves(d.clone()),
        Payload::Matrices(m) => Trisection::from_matrices(m.clone()),
    };
    r.map_err(|e| match e {
        crate::diagram::DiagramError::Invalid(report) => CliError::Invalid(report),
        other => CliError::Input(other.to_string()),
    })
}

fn parse_vector(s: &str) -> Result<IntVector, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<BigInt>().map_err(|_| CliError::Usage(format!("'{s}' is not a comma-separated integer vector"))))
        .collect()
}

fn parse_pair(s: &str) -> Result<(Label, Label), CliError> {
    let labels: Vec<Label> = s
        .chars()
        .map(|c| c.to_string().parse::<Label>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--pair: {e}")))?;
    match labels.as_slice() {
        [a, b] if a != b => Ok((*a, *b)),
        _ => Err(CliError::Usage(format!("--pair must name two different systems, e.g. 'ab', got '{s}'"))),
    }
}

fn form_report(t: &Trisection) -> Result<FormReport, CliError> {
    let def = form_by_definition(t).map_err(|e| CliError::Input(e.to_string()))?;
    let mut methods = vec![MethodOutcome { method: FormMethod::Definition, matrix: Some(def.matrix.clone()), skipped: None }];
    let mut agree = true;
    let mut record = |method: FormMethod, r: Result<BilinearForm, FormError>| match r {
        Ok(f) => {
            agree &= f.matrix == def.matrix;
            methods.push(MethodOutcome { method, matrix: Some(f.matrix), skipped: None });
        }
        Err(e) => methods.push(MethodOutcome { method, matrix: None, skipped: Some(e.to_string()) }),
    };
    record(FormMethod::General, form_general(t, &def.basis));
    record(FormMethod::Fast, form_fast(t));
    Ok(FormReport {
        basis: def.basis.representatives.clone(),
        invariants: def.invariants(),
        matrix: def.matrix,
        methods,
        agree,
        fast_full: form_fast_full(t).ok(),
    })
}

fn homology_err(e: HomologyError) -> CliError {
    CliError::Input(e.to_string())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let start = Instant::now();
    let mut report = Report { schema: REPORT_SCHEMA, ..Default::default() };
    let mut exit = 0;
    let load = |path: &PathBuf, report: &mut Report| -> Result<(DiagramFile, Trisection), CliError> {
        let f = read_diagram(path)?;
        let t = trisection_of(&f)?;
        report.name = f.name.clone();
        report.genus = Some(t.genus());
        report.k_vector = Some(t.k());
        Ok((f, t))
    };
    match &cli.command {
        Command::Example { name } => {
            let text = if name == "random" {
                let seed = cli.seed.unwrap_or(0);
                let d = crate::generate::random_diagram(&mut crate::generate::rng(seed), 6);
                file::serialize(&DiagramFile {
                    name: Some(format!("random-{seed}")),
                    notes: Some("randomized valid diagram".into()),
                    payload: Payload::Curves(d),
                })
            } else {
                crate::corpus::source(name)
                    .ok_or_else(|| {
                        let names: Vec<&str> = crate::corpus::names().chain(["random"]).collect();
                        CliError::Usage(format!("unknown example '{name}'; available: {}", names.join(", ")))
                    })?
                    .to_string()
            };
            let _ = write!(out, "{text}");
            return Ok(0);
        }
        Command::Validate { file } => {
            report.command = "validate".into();
            let f = read_diagram(file)?;
            let v = validation_of(&f);
            report.name = f.name.clone();
            report.genus = Some(v.genus);
            report.k_vector = v.k_vector;
            if let (Payload::Matrices(m), true) = (&f.payload, v.valid) {
                report.realized = Some(m.realize().is_some());
            }
            if !v.valid {
                exit = 1;
            }
            report.validation = Some(v);
        }
        Command::Homology { file } => {
            report.command = "homology".into();
            let (_, t) = load(file, &mut report)?;
            report.homology = Some(homology_profile(&t));
        }
        Command::H2 { file } => {
            report.command = "h2".into();
            let (_, t) = load(file, &mut report)?;
            let complex = homology_profile(&t).groups[2].clone();
            let kernel_formula = h2_kernel_formula(&t).map_err(homology_err)?;
            let symmetric = match h2_symmetric(&t) {
                Ok(g) => Some(g),
                Err(HomologyError::NoRealization) => None,
                Err(e) => return Err(homology_err(e)),
            };
            let agree = kernel_formula == complex && symmetric.as_ref().is_none_or(|s| *s == complex);
            report.h2 = Some(H2Report { complex, kernel_formula, symmetric, agree });
        }
        Command::H3 { file } => {
            report.command = "h3".into();
            let (_, t) = load(file, &mut report)?;
            let complex = homology_profile(&t).groups[3].clone();
            let direct = h3_direct(&t).map_err(homology_err)?;
            report.h3 = Some(H3Report { agree: direct == complex, complex, direct });
        }
        Command::Form { file } => {
            report.command = "form".into();
            let (_, t) = load(file, &mut report)?;
            report.form = Some(form_report(&t)?);
        }
        Command::Linking { file, j, k, pair } => {
            report.command = "linking".into();
            let (a, b) = parse_pair(pair)?;
            let (jv, kv) = (parse_vector(j)?, parse_vector(k)?);
            let (_, t) = load(file, &mut report)?;
            let d = t
                .curves()
                .ok_or_else(|| CliError::Input("linking numbers need curve classes; none realize these matrices".into()))?;
            let lift = linking_lift(&jv, &kv, d.system(a), d.system(b)).map_err(|e| CliError::Input(e.to_string()))?;
            let value = d.surface().pair(&lift, &kv);
            report.linking = Some(LinkingReport {
                pair: [a, b],
                j: vec_json(&jv),
                k: vec_json(&kv),
                lift: vec_json(&lift),
                value: crate::bigint_json(&value),
            });
        }
        Command::Reduce { file } => {
            report.command = "reduce".into();
            let (_, t) = load(file, &mut report)?;
            let start_state = MoveState::new(&t);
            let r = reduce(&start_state).map_err(|e| CliError::Input(e.to_string()))?;
            let replay_verified =
                start_state.apply_all(&r.moves).map(|s| s.same_matrices(&r.state)).unwrap_or(false);
            let invariance_verified = verify_move_invariance(&start_state, &r.moves);
            let (log, log_file) = write_log(cli, &r.moves)?;
            report.moves = Some(MovesReport {
                count: r.moves.len(),
                log,
                log_file,
                final_matrices: matrices_out(&r.state),
                gamma_complete: Some(r.gamma_complete),
                congruence: r.congruence,
                replay_verified,
                invariance_verified,
                notes: r.notes,
            });
        }
        Command::Replay { file } => {
            report.command = "replay".into();
            let path = cli.log.as_ref().ok_or_else(|| CliError::Usage("replay needs --log <file>".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let moves = parse_log(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let (_, t) = load(file, &mut report)?;
            let start_state = MoveState::new(&t);
            let end = start_state.apply_all(&moves).map_err(|e| CliError::Input(e.to_string()))?;
            report.moves = Some(MovesReport {
                count: moves.len(),
                log: None,
                log_file: Some(path.display().to_string()),
                final_matrices: matrices_out(&end),
                gamma_complete: None,
                congruence: None,
                replay_verified: true,
                invariance_verified: verify_move_invariance(&start_state, &moves),
                notes: Vec::new(),
            });
        }
    }
    report.timing_ms = start.elapsed().as_secs_f64() * 1000.0;
    let text = if cli.json {
        let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
        s.push('\n');
        s
    } else {
        render(&report)
    };
    let _ = write!(out, "{text}");
    Ok(exit)
}

fn write_log(cli: &Cli, moves: &[crate::moves::Move]) -> Result<(Option<Vec<String>>, Option<String>), CliError> {
    match &cli.log {
        Some(path) => {
            std::fs::write(path, format_log(moves))
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            Ok((None, Some(path.display().to_string())))
        }
        None => Ok((Some(moves.iter().map(|m| m.to_string()).collect()), None)),
    }
}

fn matrices_out(s: &MoveState) -> MatricesOut {
    MatricesOut { alpha_beta: s.alpha_beta.clone(), gamma_beta: s.gamma_beta.clone(), alpha_gamma: s.alpha_gamma.clone() }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

/// Human-readable rendering of a report.
pub fn render(r: &Report) -> String {
    let mut s = String::new();
    if let Some(n) = &r.name {
        let _ = writeln!(s, "diagram: {n}");
    }
    if let (Some(g), Some(k)) = (r.genus, r.k_vector) {
        let _ = writeln!(s, "genus {g}, k-vector {k}");
    }
    if let Some(v) = &r.validation {
        let _ = writeln!(s, "{v}");
    }
    if let Some(real) = r.realized {
        let _ = writeln!(s, "curve classes realizing the matrices: {}", if real { "found" } else { "not found" });
    }
    if let Some(h) = &r.homology {
        let _ = writeln!(s, "{h}");
    }
    if let Some(h) = &r.h2 {
        let _ = writeln!(s, "H2 from the chain complex:   {}", h.complex);
        let _ = writeln!(s, "H2 by the kernel formula:    {}", h.kernel_formula);
        match &h.symmetric {
            Some(g) => {
                let _ = writeln!(s, "H2 by the symmetric formula: {g}");
            }
            None => {
                let _ = writeln!(s, "H2 by the symmetric formula: unavailable (no curve classes)");
            }
        }
        let _ = writeln!(s, "agree: {}", yes(h.agree));
    }
    if let Some(h) = &r.h3 {
        let _ = writeln!(s, "H3 from the chain complex: {}", h.complex);
        let _ = writeln!(s, "H3 = L_alpha ∩ L_beta ∩ L_gamma: {}", h.direct);
        let _ = writeln!(s, "agree: {}", yes(h.agree));
    }
    if let Some(f) = &r.form {
        let _ = writeln!(s, "intersection form: {}", f.matrix);
        for m in &f.methods {
            match (&m.matrix, &m.skipped) {
                (Some(q), _) => {
                    let _ = writeln!(s, "  {}: {q}", m.method);
                }
                (None, Some(why)) => {
                    let _ = writeln!(s, "  {}: skipped ({why})", m.method);
                }
                _ => {}
            }
        }
        let _ = writeln!(s, "methods agree: {}", yes(f.agree));
        let _ = writeln!(s, "{}", f.invariants);
    }
    if let Some(l) = &r.linking {
        let _ = writeln!(s, "lk(J, K) in H_{} ∪ H_{} = {}", l.pair[0], l.pair[1], l.value);
    }
    if let Some(m) = &r.moves {
        let _ = writeln!(s, "{} moves", m.count);
        if let Some(log) = &m.log {
            for line in log {
                let _ = writeln!(s, "  {line}");
            }
        }
        if let Some(p) = &m.log_file {
            let _ = writeln!(s, "move log: {p}");
        }
        let _ = writeln!(s, "alpha-Q-beta  = {}", m.final_matrices.alpha_beta);
        let _ = writeln!(s, "gamma-Q-beta  = {}", m.final_matrices.gamma_beta);
        let _ = writeln!(s, "alpha-Q-gamma = {}", m.final_matrices.alpha_gamma);
        if let Some(c) = &m.congruence {
            let _ = writeln!(s, "congruence blocks:\n{c}");
        }
        let _ = writeln!(s, "replay reproduces result: {}", yes(m.replay_verified));
        let _ = writeln!(s, "homology and form invariants preserved: {}", yes(m.invariance_verified));
        for n in &m.notes {
            let _ = writeln!(s, "note: {n}");
        }
    }
    let _ = writeln!(s, "time: {:.2} ms", r.timing_ms);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("trisect").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(&["frobnicate"]).0, 2);
        assert_eq!(run(&["example", "nonesuch"]).0, 2);
        assert_eq!(run(&[]).0, 2);
        assert_eq!(run(&["--help"]).0, 0);
    }

    #[test]
    fn example_prints_corpus() {
        let (code, out, _) = run(&["example", "s2xs2"]);
        assert_eq!(code, 0);
        assert!(file::parse(&out).is_ok());
        let (code, a, _) = run(&["example", "random", "--seed", "3"]);
        assert_eq!(code, 0);
        assert_eq!(a, run(&["example", "random", "--seed", "3"]).1);
    }
}
