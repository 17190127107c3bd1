use std::collections::BTreeSet;
use std::io::Read;

use clap::{Args, Subcommand, ValueEnum};
use floerbound::bounds::{
    cap_length, cup_length, rank_bound, steenrod_bound, verify_certificate, Allowed, CapAction,
};
use floerbound::conley::{
    admissible_squares, must_vanish_profile, ConleyProfile, Extremal, Status,
};
use floerbound::io::{AlgebraDoc, CapActionDoc, CertificateDoc, ComplexDoc, ModuleDoc};
use floerbound::steenrod::{self, parse_sum, SteenrodElement};
use floerbound::stmod::{self, UnstableModule};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::error::{to_value, CliError};

const DEFAULT_MAX_DEGREE: i64 = 64;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steenrod algebra arithmetic.
    #[command(subcommand)]
    Sq(SqCommand),
    /// Vanishing of squares on Conley indices of isolated critical points.
    #[command(subcommand)]
    Conley(ConleyCommand),
    /// Filtered chain complexes.
    #[command(subcommand)]
    Morse(MorseCommand),
    /// Lower bounds and certificates.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Built-in example modules and algebras.
    #[command(subcommand)]
    Build(BuildCommand),
}

#[derive(Debug, Subcommand)]
pub enum SqCommand {
    /// Admissible form of a sum of words, e.g. "Sq^2 Sq^2 + Sq^3 Sq^1".
    Reduce { expr: String },
    /// Conjugate of Sq^j in the admissible basis.
    Conjugate { j: u32 },
    /// Product of two elements.
    Multiply { a: String, b: String },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExtremalArg {
    None,
    Minimum,
    Maximum,
}

#[derive(Debug, Subcommand)]
pub enum ConleyCommand {
    MustVanish {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        j: u32,
        #[arg(long, value_enum, default_value = "none")]
        extremal: ExtremalArg,
        /// Include the derivation.
        #[arg(long)]
        trace: bool,
    },
    /// Squares forced to vanish in every degree.
    Admissible {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        jmax: u32,
    },
}

#[derive(Debug, Args)]
pub struct ComplexInput {
    /// complex.json; standard input when omitted or `-`.
    #[arg(long)]
    complex: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum MorseCommand {
    Homology(ComplexInput),
    Les {
        #[command(flatten)]
        input: ComplexInput,
        /// Strictly decreasing, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        thresholds: Vec<f64>,
    },
    Validate(ComplexInput),
}

#[derive(Debug, Subcommand)]
pub enum BoundCommand {
    Steenrod {
        /// module.json; standard input when omitted or `-`.
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        n: u32,
        /// Comma-separated exponents; `none` for the empty set.
        #[arg(long, conflicts_with = "auto")]
        allowed: Option<String>,
        /// Use the squares forced to vanish in dimension n (the default).
        #[arg(long)]
        auto: bool,
        /// Also try every nonzero class in small degrees.
        #[arg(long)]
        exhaustive: bool,
    },
    Cup {
        #[arg(long)]
        algebra: Option<String>,
    },
    Cap {
        #[arg(long)]
        action: Option<String>,
    },
    Rank {
        #[arg(long)]
        module: Option<String>,
    },
    Verify {
        #[arg(long)]
        module: String,
        /// Certificate JSON; standard input when omitted or `-`.
        #[arg(long)]
        certificate: Option<String>,
        /// Gap parameter; defaults to the certificate's own.
        #[arg(long)]
        n: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BuildCommand {
    /// Cohomology ring of the complex projective plane.
    Cp2Algebra,
    /// Thom module of the normal bundle of CP^2 in R^7.
    Cp2ThomR7,
    /// CP^2 acting on itself by multiplication.
    Cp2Cap,
    /// Exterior algebra on two degree-one classes.
    TorusAlgebra,
    /// Wedge of k suspended copies of the CP^2 block.
    Application {
        #[arg(long)]
        k: u32,
    },
    Sphere {
        #[arg(long)]
        r: i64,
    },
    /// Suspends a module read from --module or standard input.
    Suspend {
        #[arg(long)]
        module: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
    Wedge {
        /// Repeat for each summand.
        #[arg(long, required = true)]
        module: Vec<String>,
    },
}

pub fn max_degree() -> Result<i64, CliError> {
    match std::env::var("FLOERBOUND_MAX_DEGREE") {
        Err(_) => Ok(DEFAULT_MAX_DEGREE),
        Ok(s) => s
            .trim()
            .parse::<i64>()
            .ok()
            .filter(|&d| d >= 0)
            .ok_or_else(|| {
                CliError::new(
                    "invalid_environment",
                    format!("FLOERBOUND_MAX_DEGREE must be a non-negative integer, got `{s}`"),
                )
            }),
    }
}

fn check_degree(what: &str, value: i64, max: i64) -> Result<(), CliError> {
    if value.abs() > max {
        return Err(CliError::new(
            "degree_limit",
            format!("{what} = {value} exceeds FLOERBOUND_MAX_DEGREE = {max}"),
        )
        .with_witness(json!({ "value": value, "max": max })));
    }
    Ok(())
}

fn check_module_degrees(m: &UnstableModule, max: i64) -> Result<(), CliError> {
    for d in m.degrees() {
        check_degree("module degree", d, max)?;
    }
    Ok(())
}

fn read_input(path: Option<&str>) -> Result<String, CliError> {
    match path {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::unreadable("<stdin>", e))?;
            Ok(s)
        }
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::unreadable(p, e)),
    }
}

fn parse_doc<T: DeserializeOwned>(path: Option<&str>) -> Result<T, CliError> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| floerbound::io::IoError::from(e).into())
}

fn load_module(path: Option<&str>, max: i64) -> Result<UnstableModule, CliError> {
    let m = parse_doc::<ModuleDoc>(path)?.to_module()?;
    check_module_degrees(&m, max)?;
    Ok(m)
}

fn module_json(m: &UnstableModule) -> Value {
    to_value(&ModuleDoc::from_module(m))
}

pub fn run(cmd: &Command) -> Result<Value, CliError> {
    let max = max_degree()?;
    match cmd {
        Command::Sq(c) => run_sq(c, max),
        Command::Conley(c) => run_conley(c, max),
        Command::Morse(c) => run_morse(c, max),
        Command::Bound(c) => run_bound(c, max),
        Command::Build(c) => run_build(c, max),
    }
}

fn parse_element(s: &str, max: i64) -> Result<SteenrodElement, CliError> {
    let parse_err = |e: steenrod::SteenrodError| {
        CliError::new("parse_error", e.to_string()).with_witness(json!({ "input": s }))
    };
    for w in parse_sum(s).map_err(parse_err)? {
        check_degree("degree", w.iter().map(|&i| i as i64).sum(), max)?;
    }
    s.parse().map_err(parse_err)
}

fn run_sq(c: &SqCommand, max: i64) -> Result<Value, CliError> {
    let result = match c {
        SqCommand::Reduce { expr } => parse_element(expr, max)?,
        SqCommand::Conjugate { j } => {
            check_degree("j", *j as i64, max)?;
            (*steenrod::conjugate(*j)).clone()
        }
        SqCommand::Multiply { a, b } => {
            let (a, b) = (parse_element(a, max)?, parse_element(b, max)?);
            check_degree("degree", (a.degree() + b.degree()) as i64, max)?;
            a.multiply(&b)
        }
    };
    Ok(json!({ "result": result.to_string() }))
}

fn run_conley(c: &ConleyCommand, max: i64) -> Result<Value, CliError> {
    match c {
        ConleyCommand::MustVanish {
            n,
            m,
            j,
            extremal,
            trace,
        } => {
            check_degree("n", *n as i64, max)?;
            check_degree("m", *m, max)?;
            check_degree("j", *j as i64, max)?;
            positive("n", *n)?;
            positive("j", *j)?;
            let extremal = match extremal {
                ExtremalArg::None => Extremal::None,
                ExtremalArg::Minimum => Extremal::Minimum,
                ExtremalArg::Maximum => Extremal::Maximum,
            };
            let fact = must_vanish_profile(ConleyProfile { n: *n, extremal }, *m, *j);
            let mut out = json!({
                "n": n,
                "m": m,
                "j": j,
                "extremal": to_value(&extremal),
                "forced": fact.status == Status::Forced,
                "status": to_value(&fact.status),
            });
            if *trace {
                out["trace"] = to_value(&fact.trace);
            }
            Ok(out)
        }
        ConleyCommand::Admissible { n, jmax } => {
            check_degree("n", *n as i64, max)?;
            check_degree("jmax", *jmax as i64, max)?;
            positive("n", *n)?;
            positive("jmax", *jmax)?;
            Ok(json!({ "n": n, "jmax": jmax, "allowed": admissible_squares(*n, *jmax) }))
        }
    }
}

fn positive(what: &str, v: u32) -> Result<(), CliError> {
    if v == 0 {
        return Err(CliError::new(
            "invalid_argument",
            format!("{what} must be positive"),
        ));
    }
    Ok(())
}

fn run_morse(c: &MorseCommand, max: i64) -> Result<Value, CliError> {
    let load = |input: &ComplexInput| -> Result<floerbound::MorseComplex64, CliError> {
        let c = parse_doc::<ComplexDoc>(input.complex.as_deref())?.to_complex()?;
        for g in c.generators() {
            check_degree("grading", g.grading, max)?;
        }
        Ok(c)
    };
    match c {
        MorseCommand::Homology(input) => {
            let h = load(input)?.homology();
            Ok(
                json!({ "convention": "homological", "groups": to_value(&h.groups), "dims": to_value(&h.dims()) }),
            )
        }
        MorseCommand::Les { input, thresholds } => {
            let report = load(input)?.les(thresholds)?;
            Ok(
                json!({ "convention": "homological", "exact": report.exact(), "levels": to_value(&report.levels) }),
            )
        }
        MorseCommand::Validate(input) => {
            let c = load(input)?;
            Ok(json!({
                "valid": true,
                "generators": c.len(),
                "incidences": c.incidence().count(),
                "chain_dims": to_value(&c.chain_dims()),
            }))
        }
    }
}

fn parse_allowed(s: &str) -> Result<BTreeSet<u32>, CliError> {
    let s = s.trim();
    if s.is_empty() || s == "none" {
        return Ok(BTreeSet::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .ok()
                .filter(|&r| r > 0)
                .ok_or_else(|| {
                    CliError::new(
                        "invalid_argument",
                        format!("allowed exponent `{t}` is not a positive integer"),
                    )
                })
        })
        .collect()
}

fn run_bound(c: &BoundCommand, max: i64) -> Result<Value, CliError> {
    match c {
        BoundCommand::Steenrod {
            module,
            n,
            allowed,
            auto: _,
            exhaustive,
        } => {
            positive("n", *n)?;
            check_degree("n", *n as i64, max)?;
            let m = load_module(module.as_deref(), max)?;
            let allowed = match allowed {
                Some(s) => Allowed::Set(parse_allowed(s)?),
                None => Allowed::Auto,
            };
            let cert = steenrod_bound(&m, *n, &allowed, *exhaustive);
            Ok(to_value(&CertificateDoc::from_certificate(&m, &cert)))
        }
        BoundCommand::Cup { algebra } => {
            let a = parse_doc::<AlgebraDoc>(algebra.as_deref())?.to_algebra()?;
            check_module_degrees(a.module(), max)?;
            let c = cup_length(&a);
            Ok(json!({ "cup_length": c.length, "factors": c.factors }))
        }
        BoundCommand::Cap { action } => {
            let c = parse_doc::<CapActionDoc>(action.as_deref())?.to_cap_action()?;
            check_module_degrees(c.space(), max)?;
            check_module_degrees(c.algebra().module(), max)?;
            Ok(to_value(&cap_length(&c)))
        }
        BoundCommand::Rank { module } => {
            let m = load_module(module.as_deref(), max)?;
            Ok(json!({ "rank_bound": rank_bound(&m) }))
        }
        BoundCommand::Verify {
            module,
            certificate,
            n,
        } => {
            let m = load_module(Some(module), max)?;
            let cert = parse_doc::<CertificateDoc>(certificate.as_deref())?.to_certificate(&m)?;
            let n = n.unwrap_or(cert.n);
            let report = verify_certificate(&m, n, &cert);
            if report.valid {
                Ok(json!({ "valid": true, "bound": cert.bound, "n": n }))
            } else {
                Err(
                    CliError::new("certificate_rejected", "certificate fails replay")
                        .with_witness(to_value(&report.failures)),
                )
            }
        }
    }
}

fn run_build(c: &BuildCommand, max: i64) -> Result<Value, CliError> {
    let module = |m: UnstableModule| -> Result<Value, CliError> {
        check_module_degrees(&m, max)?;
        Ok(module_json(&m))
    };
    match c {
        BuildCommand::Cp2Algebra => Ok(to_value(&AlgebraDoc::from_algebra(
            &stmod::projective_plane_algebra(),
        ))),
        BuildCommand::TorusAlgebra => {
            Ok(to_value(&AlgebraDoc::from_algebra(&stmod::torus_algebra())))
        }
        BuildCommand::Cp2Cap => Ok(to_value(&CapActionDoc::from_cap_action(
            &CapAction::regular(stmod::projective_plane_algebra()),
        ))),
        BuildCommand::Cp2ThomR7 => module(stmod::projective_plane_normal_thom()),
        BuildCommand::Application { k } => {
            check_degree("top degree", 8 * (*k as i64).max(1) - 4, max)?;
            module(stmod::application_module(*k))
        }
        BuildCommand::Sphere { r } => {
            check_degree("r", *r, max)?;
            if *r < 0 {
                return Err(CliError::new("invalid_argument", "r must be non-negative"));
            }
            module(stmod::sphere(*r))
        }
        BuildCommand::Suspend { module: path, d } => {
            check_degree("d", *d, max)?;
            let m = load_module(path.as_deref(), max)?;
            let s = m.suspend(*d).map_err(|e| match e {
                stmod::ModuleError::Invalid(report) => CliError::new(
                    "invalid_module",
                    format!("suspension by {d} is not unstable"),
                )
                .with_witness(to_value(&report.violations)),
                other => CliError::new("invalid_argument", other.to_string()),
            })?;
            module(s)
        }
        BuildCommand::Wedge { module: paths } => {
            let parts = paths
                .iter()
                .map(|p| load_module(Some(p), max))
                .collect::<Result<Vec<_>, _>>()?;
            module(stmod::wedge(&parts))
        }
    }
}
