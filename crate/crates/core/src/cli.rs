//! Command-line front end: JSON files in, one schema-versioned JSON document out.
//!
//! Exit codes: 0 success or feasible, 1 negative outcome, 2 input error,
//! 3 solver undecided.

use std::ffi::OsString;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::cone::{cone_member, decompose_into_extremals, dual_extreme_rays, parse_vector, separate, PolyhedralCone};
use crate::error::{Error, Result};
use crate::gns::{gns_build, gns_vector_state_check, joint_diagonalize_seeded};
use crate::moments::MomentFunctional;
use crate::poly::{monomials_up_to, AnyPolynomial, FloatPolynomial, Mode, Polynomial};
use crate::riesz::{extremal_positive_functionals, standard_representation, RieszElement, Scalar};
use crate::sos::{
    build_problem, extract_certificate, non_sos_witness, sos_feasibility, verify_certificate, AnyCertificate,
    Feasibility, WitnessOutcome,
};

pub const SCHEMA: &str = "star-order-lab/v1";
pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

const SOS_TOL: f64 = 1e-9;
const SOS_MAX_ITER: usize = 20_000;
const WITNESS_MAX_ITER: usize = 500;
const GNS_CHECK_TOL: f64 = 1e-7;

#[derive(Debug, Parser)]
#[command(
    name = "star-order-lab",
    version,
    about = "Certificates and representations for ordered *-algebras at desk scale"
)]
pub struct Cli {
    #[command(subcommand)]
    pub group: Group,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Solver tolerance; falls back to STAR_ORDER_TOL, then to the command default.
    #[arg(long, global = true, env = "STAR_ORDER_TOL")]
    pub tol: Option<f64>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long = "max-iter", global = true)]
    pub max_iter: Option<usize>,
    /// Exact rational arithmetic where the command supports it.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Truncation degree for GNS commands.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Index-set size for Riesz commands.
    #[arg(long, global = true)]
    pub size: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Sums of squares: Gram feasibility, certificate checks, dual witnesses.
    #[command(subcommand)]
    Sos(SosCommand),
    /// GNS representations and quadrature from moment tables.
    #[command(subcommand)]
    Gns(GnsCommand),
    /// Polyhedral cones: membership, separation, dual rays.
    #[command(subcommand)]
    Cone(ConeCommand),
    /// Finite Riesz spaces ℝ^X.
    #[command(subcommand)]
    Riesz(RieszCommand),
}

#[derive(Debug, Subcommand)]
pub enum SosCommand {
    /// Search a Gram matrix and print a certificate.
    Check { polynomial: PathBuf },
    /// Check a given certificate against a polynomial.
    Verify { polynomial: PathBuf, certificate: PathBuf },
    /// Search a moment functional separating the polynomial from the cone.
    Witness { polynomial: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum GnsCommand {
    /// Dump the truncated GNS representation.
    Build { moments: PathBuf },
    /// Recover an atomic measure by joint diagonalization.
    Quadrature { moments: PathBuf },
    /// Report residuals of the representation.
    Check { moments: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum ConeCommand {
    Member { cone: PathBuf, vector: PathBuf },
    Separate { cone: PathBuf, vector: PathBuf },
    Rays { cone: PathBuf },
    Decompose { cone: PathBuf, functional: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum RieszCommand {
    /// Extremal positive functionals on ℝ^X with |X| = --size.
    Extremal,
    /// Values of the extremal functionals on the given elements.
    Stdrep { elements: PathBuf },
}

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub payload: Value,
    /// Line for standard error, if any.
    pub diagnostic: Option<String>,
    /// Plain text that replaces the payload on standard output (help and version).
    pub text: Option<String>,
}

impl CommandResult {
    fn new(command: &str, exit_code: i32, body: Value) -> Self {
        let mut payload = json!({"schema": SCHEMA, "command": command});
        if let (Value::Object(target), Value::Object(extra)) = (&mut payload, body) {
            target.extend(extra);
        }
        CommandResult {
            exit_code,
            payload,
            diagnostic: None,
            text: None,
        }
    }

    fn from_error(command: &str, e: &Error) -> Self {
        let mut error = json!({"kind": e.kind(), "message": e.to_string()});
        if let Error::Parse { field, .. } = e {
            error["field"] = json!(field);
        }
        let mut r = Self::new(command, exit_code_for(e), json!({"status": "error", "error": error}));
        r.diagnostic = Some(format!("error: {e}"));
        r
    }

    /// What goes to standard output.
    pub fn stdout(&self) -> String {
        match &self.text {
            Some(t) => t.clone(),
            None => serde_json::to_string_pretty(&self.payload).expect("payload is plain JSON") + "\n",
        }
    }
}

/// Error kinds that are outcomes rather than input faults.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::IsMember | Error::NotInDualCone | Error::NotFlat | Error::NotAbsorbed => EXIT_NEGATIVE,
        Error::NoConvergence { .. } | Error::RankDeficient { .. } | Error::DegenerateSpectrum { .. } => EXIT_UNDECIDED,
        _ => EXIT_INPUT_ERROR,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
                    if e.exit_code() == 0 =>
                {
                    CommandResult {
                        exit_code: EXIT_SUCCESS,
                        payload: json!({"schema": SCHEMA}),
                        diagnostic: None,
                        text: Some(rendered),
                    }
                }
                _ => {
                    let err = Error::parse(
                        "arguments",
                        rendered.lines().next().unwrap_or("invalid arguments").trim(),
                    );
                    let mut r = CommandResult::from_error("usage", &err);
                    r.diagnostic = Some(rendered);
                    r
                }
            };
        }
    };
    execute(&cli)
}

fn command_name(group: &Group) -> &'static str {
    match group {
        Group::Sos(SosCommand::Check { .. }) => "sos check",
        Group::Sos(SosCommand::Verify { .. }) => "sos verify",
        Group::Sos(SosCommand::Witness { .. }) => "sos witness",
        Group::Gns(GnsCommand::Build { .. }) => "gns build",
        Group::Gns(GnsCommand::Quadrature { .. }) => "gns quadrature",
        Group::Gns(GnsCommand::Check { .. }) => "gns check",
        Group::Cone(ConeCommand::Member { .. }) => "cone member",
        Group::Cone(ConeCommand::Separate { .. }) => "cone separate",
        Group::Cone(ConeCommand::Rays { .. }) => "cone rays",
        Group::Cone(ConeCommand::Decompose { .. }) => "cone decompose",
        Group::Riesz(RieszCommand::Extremal) => "riesz extremal",
        Group::Riesz(RieszCommand::Stdrep { .. }) => "riesz stdrep",
    }
}

/// Runs an already parsed command. A panic inside a solver is reported as an
/// input error rather than aborting the process.
pub fn execute(cli: &Cli) -> CommandResult {
    let name = command_name(&cli.group);
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| dispatch(cli, name)));
    match outcome {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => CommandResult::from_error(name, &e),
        Err(cause) => {
            let msg = cause
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| cause.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown failure".to_string());
            let mut r = CommandResult::new(
                name,
                EXIT_INPUT_ERROR,
                json!({"status": "error", "error": {"kind": "Internal", "message": msg}}),
            );
            r.diagnostic = Some(format!("internal error: {msg}"));
            r
        }
    }
}

fn dispatch(cli: &Cli, name: &str) -> Result<CommandResult> {
    let opts = &cli.options;
    if let Some(t) = opts.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::parse("--tol", "must be a positive finite number"));
        }
    }
    match &cli.group {
        Group::Sos(cmd) => sos(cmd, opts, name),
        Group::Gns(cmd) => gns(cmd, opts, name),
        Group::Cone(cmd) => cone(cmd, name),
        Group::Riesz(cmd) => riesz(cmd, opts, name),
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let field = path.display().to_string();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::parse(field.clone(), format!("cannot read file: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(field, format!("invalid JSON: {e}")))
}

fn read_polynomial(path: &Path) -> Result<AnyPolynomial> {
    AnyPolynomial::from_json(&read_json(path)?)
}

fn sos(cmd: &SosCommand, opts: &Options, name: &str) -> Result<CommandResult> {
    let tol = opts.tol.unwrap_or(SOS_TOL);
    match cmd {
        SosCommand::Check { polynomial } => {
            let p = read_polynomial(polynomial)?;
            let prob = build_problem(&p.to_float())?;
            match sos_feasibility(&prob, opts.max_iter.unwrap_or(SOS_MAX_ITER), tol)? {
                Feasibility::Feasible {
                    gram,
                    iterations,
                    residual,
                } => {
                    let cert = extract_certificate(&gram, &prob.gram_basis)?;
                    let verified = verify_certificate(&prob.target, &cert, Mode::Float)?;
                    let mut body = json!({
                        "status": if verified { "feasible" } else { "undecided" },
                        "certificate": cert.to_json(),
                        "basis": prob.gram_basis.iter().map(|m| m.exps().to_vec()).collect::<Vec<_>>(),
                        "gram": gram.to_rows(),
                        "iterations": iterations,
                        "residual": residual,
                        "verified_float": verified,
                    });
                    if opts.exact {
                        body["verified_exact"] = json!(verify_certificate(&p.to_exact(), &cert, Mode::Exact)?);
                    }
                    let code = if verified { EXIT_SUCCESS } else { EXIT_UNDECIDED };
                    Ok(CommandResult::new(name, code, body))
                }
                Feasibility::Undecided { gap, iterations } => Ok(CommandResult::new(
                    name,
                    EXIT_UNDECIDED,
                    json!({"status": "undecided", "gap": gap, "iterations": iterations}),
                )),
            }
        }
        SosCommand::Verify {
            polynomial,
            certificate,
        } => {
            let p = read_polynomial(polynomial)?;
            let cert = AnyCertificate::from_json(&read_json(certificate)?)?;
            let ok = if opts.exact {
                verify_certificate(&p.to_exact(), &cert.to_exact(), Mode::Exact)?
            } else {
                verify_certificate(&p.to_float(), &cert.to_float(), Mode::Float)?
            };
            let mode = if opts.exact { "exact" } else { "float" };
            Ok(CommandResult::new(
                name,
                if ok { EXIT_SUCCESS } else { EXIT_NEGATIVE },
                json!({"status": if ok { "verified" } else { "rejected" }, "mode": mode, "valid": ok}),
            ))
        }
        SosCommand::Witness { polynomial } => {
            let p: FloatPolynomial = read_polynomial(polynomial)?.to_float();
            match non_sos_witness(&p, opts.max_iter.unwrap_or(WITNESS_MAX_ITER), tol)? {
                WitnessOutcome::Witness(w) => Ok(CommandResult::new(
                    name,
                    EXIT_SUCCESS,
                    json!({"status": "witness", "witness": w.to_json()}),
                )),
                WitnessOutcome::NotFound { best_value, iterations } => Ok(CommandResult::new(
                    name,
                    EXIT_NEGATIVE,
                    json!({"status": "not_found", "best_value": best_value, "iterations": iterations}),
                )),
            }
        }
    }
}

fn gns_degree(l: &MomentFunctional, opts: &Options) -> Result<usize> {
    match opts.degree {
        Some(d) => Ok(d),
        None if l.max_degree() >= 2 => Ok(l.max_degree() / 2 - 1),
        None => Err(Error::DegreeHeadroomMissing {
            needed: 2,
            available: l.max_degree(),
        }),
    }
}

fn gns(cmd: &GnsCommand, opts: &Options, name: &str) -> Result<CommandResult> {
    let path = match cmd {
        GnsCommand::Build { moments } | GnsCommand::Quadrature { moments } | GnsCommand::Check { moments } => moments,
    };
    let l = MomentFunctional::from_json(&read_json(path)?)?;
    let d = gns_degree(&l, opts)?;
    let rep = gns_build(&l, d)?;
    match cmd {
        GnsCommand::Build { .. } => Ok(CommandResult::new(
            name,
            EXIT_SUCCESS,
            json!({"status": "built", "representation": rep.to_json()}),
        )),
        GnsCommand::Quadrature { .. } => {
            let m = joint_diagonalize_seeded(&rep, opts.seed)?;
            Ok(CommandResult::new(
                name,
                EXIT_SUCCESS,
                json!({"status": "recovered", "measure": m.to_json()}),
            ))
        }
        GnsCommand::Check { .. } => {
            let tol = opts.tol.unwrap_or(GNS_CHECK_TOL);
            let pairing = if rep.flat {
                let samples: Vec<FloatPolynomial> = monomials_up_to(rep.arity, d)
                    .into_iter()
                    .map(|m| Polynomial::term(m, num_complex::Complex64::new(1.0, 0.0)))
                    .collect();
                Some(gns_vector_state_check(&rep, &l, &samples)?)
            } else {
                None
            };
            let residuals = [
                rep.gram_residual,
                rep.max_adjoint_residual(),
                rep.max_commutator_residual(),
                pairing.unwrap_or(0.0),
            ];
            let ok = rep.flat && residuals.iter().all(|&r| r <= tol);
            Ok(CommandResult::new(
                name,
                if ok { EXIT_SUCCESS } else { EXIT_NEGATIVE },
                json!({
                    "status": if ok { "consistent" } else { "inconsistent" },
                    "flat": rep.flat,
                    "quotient_dim": rep.quotient_dim,
                    "tolerance": tol,
                    "gram_residual": rep.gram_residual,
                    "adjoint_residual": rep.max_adjoint_residual(),
                    "commutator_residual": rep.max_commutator_residual(),
                    "vector_state_residual": pairing,
                }),
            ))
        }
    }
}

fn read_vector(path: &Path, key: &str) -> Result<Vec<f64>> {
    let v = read_json(path)?;
    match v.get(key) {
        Some(inner) => parse_vector(inner, key),
        None => parse_vector(&v, key),
    }
}

fn cone(cmd: &ConeCommand, name: &str) -> Result<CommandResult> {
    let path = match cmd {
        ConeCommand::Member { cone, .. }
        | ConeCommand::Separate { cone, .. }
        | ConeCommand::Rays { cone }
        | ConeCommand::Decompose { cone, .. } => cone,
    };
    let c = PolyhedralCone::from_json(&read_json(path)?)?;
    match cmd {
        ConeCommand::Member { vector, .. } => {
            let v = read_vector(vector, "vector")?;
            let member = cone_member(&c, &v)?;
            Ok(CommandResult::new(
                name,
                if member { EXIT_SUCCESS } else { EXIT_NEGATIVE },
                json!({"status": if member { "member" } else { "non_member" }, "member": member}),
            ))
        }
        ConeCommand::Separate { vector, .. } => {
            let v = read_vector(vector, "vector")?;
            match separate(&c, &v) {
                Ok(omega) => {
                    let value: f64 = omega.iter().zip(&v).map(|(a, b)| a * b).sum();
                    Ok(CommandResult::new(
                        name,
                        EXIT_SUCCESS,
                        json!({"status": "separated", "functional": omega, "value": value}),
                    ))
                }
                Err(Error::IsMember) => Ok(CommandResult::new(name, EXIT_NEGATIVE, json!({"status": "member"}))),
                Err(e) => Err(e),
            }
        }
        ConeCommand::Rays { .. } => {
            let rays = dual_extreme_rays(&c)?;
            Ok(CommandResult::new(
                name,
                EXIT_SUCCESS,
                json!({"status": "enumerated", "rays": rays}),
            ))
        }
        ConeCommand::Decompose { functional, .. } => {
            let omega = read_vector(functional, "functional")?;
            match decompose_into_extremals(&c, &omega) {
                Ok(terms) => {
                    let terms: Vec<Value> = terms
                        .iter()
                        .map(|(coef, ray)| json!({"coefficient": coef, "ray": ray}))
                        .collect();
                    Ok(CommandResult::new(
                        name,
                        EXIT_SUCCESS,
                        json!({"status": "decomposed", "terms": terms}),
                    ))
                }
                Err(Error::NotInDualCone) => Ok(CommandResult::new(
                    name,
                    EXIT_NEGATIVE,
                    json!({"status": "not_in_dual_cone"}),
                )),
                Err(e) => Err(e),
            }
        }
    }
}

fn read_elements<S: Scalar>(path: &Path) -> Result<Vec<RieszElement<S>>> {
    let v = read_json(path)?;
    let arr = v
        .get("elements")
        .unwrap_or(&v)
        .as_array()
        .ok_or_else(|| Error::parse("elements", "expected an array of elements"))?;
    arr.iter()
        .enumerate()
        .map(|(i, e)| {
            RieszElement::from_json(e).map_err(|err| match err {
                Error::Parse { field, reason } => Error::Parse {
                    field: format!("elements[{i}].{field}"),
                    reason,
                },
                other => other,
            })
        })
        .collect()
}

fn stdrep_payload<S: Scalar>(elements: &[RieszElement<S>], opts: &Options) -> Result<Value> {
    let n = match (opts.size, elements.first()) {
        (Some(n), _) => n,
        (None, Some(e)) => e.space(),
        (None, None) => return Err(Error::parse("elements", "no elements and no --size")),
    };
    if let Some(bad) = elements.iter().find(|e| e.space() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.space(),
        });
    }
    let rep = standard_representation(elements, n)?;
    Ok(json!({
        "status": "represented",
        "functionals": rep.functionals.iter().map(|f| f.weights.clone()).collect::<Vec<_>>(),
        "values": rep.values.iter().map(|row| row.iter().map(S::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    }))
}

fn riesz(cmd: &RieszCommand, opts: &Options, name: &str) -> Result<CommandResult> {
    match cmd {
        RieszCommand::Extremal => {
            let n = opts.size.ok_or_else(|| Error::parse("--size", "required"))?;
            let fs = extremal_positive_functionals(n)?;
            Ok(CommandResult::new(
                name,
                EXIT_SUCCESS,
                json!({"status": "enumerated", "functionals": fs.iter().map(|f| f.weights.clone()).collect::<Vec<_>>()}),
            ))
        }
        RieszCommand::Stdrep { elements } => {
            let body = if opts.exact {
                stdrep_payload(&read_elements::<BigRational>(elements)?, opts)?
            } else {
                stdrep_payload(&read_elements::<f64>(elements)?, opts)?
            };
            Ok(CommandResult::new(name, EXIT_SUCCESS, body))
        }
    }
}
