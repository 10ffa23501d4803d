//! Command-line front end: enumeration, relation export, invariant
//! computation, evaluation, witness search and claim verification.
//!
//! Certificates and query results go to stdout (or `--output`); progress
//! and errors go to stderr. Errors carry the machine-parsable prefix
//! `error[code]:`. Exit codes: 0 pass/success, 1 fail, 2 inconclusive,
//! 64 usage error, 65 input data error, 70 internal error.

mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polyak_core::enumerate::{diagrams, Count};
use polyak_core::invariant::{self, Profile};
use polyak_core::json as wire;
use polyak_core::relations::{self, RelationKind};
use polyak_core::verify::{Status, Verifier, VerifyOptions};
use polyak_core::{Error, Flavor, Skeleton, Style};

use config::{Format, RunConfig};

const EXIT_USAGE: i32 = 64;
const EXIT_DATA: i32 = 65;
const EXIT_INTERNAL: i32 = 70;

#[derive(Parser)]
#[command(name = "polyak-lab", version, about = "Gauss-diagram finite-type invariant laboratory")]
struct Cli {
    /// Cache directory for enumerations and relation systems
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Enumeration ceiling (max diagram order)
    #[arg(long, global = true)]
    ceiling: Option<usize>,
    /// Write results to a file instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Output format: json or table
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads (0 = library default)
    #[arg(long, global = true)]
    parallelism: Option<usize>,
    /// Seed for randomized property suites
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Config file (default ./polyak-lab.toml)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SkeletonArg {
    Circle,
    Line,
}

impl From<SkeletonArg> for Skeleton {
    fn from(s: SkeletonArg) -> Skeleton {
        match s {
            SkeletonArg::Circle => Skeleton::Circle,
            SkeletonArg::Line => Skeleton::Line,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    ArrowSigned,
    ArrowUnsigned,
    ChordSigned,
    ChordUnsigned,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::ArrowSigned => Flavor::ArrowSigned,
            FlavorArg::ArrowUnsigned => Flavor::ArrowUnsigned,
            FlavorArg::ChordSigned => Flavor::ChordSigned,
            FlavorArg::ChordUnsigned => Flavor::ChordUnsigned,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Gpv,
    GpvVirtualization,
    Chord,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Profile {
        match p {
            ProfileArg::Gpv => Profile::Gpv,
            ProfileArg::GpvVirtualization => Profile::GpvVirtualization,
            ProfileArg::Chord => Profile::Chord,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Polyak,
    Chord,
    #[value(name = "1t")]
    OneTerm,
    #[value(name = "6t")]
    SixTerm,
    #[value(name = "4t")]
    FourTerm,
    #[value(name = "2t")]
    TwoTerm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClaimArg {
    Theorem1,
    Vanishing,
    Caterpillar,
    Average,
    Membership,
    Stability,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate canonical diagrams
    Enum(EnumArgs),
    /// Generate and export a relation system
    Relations(RelationsArgs),
    /// Compute an invariant-space basis
    Invariants(InvariantsArgs),
    /// Evaluate a functional on a knot given by Gauss code
    Eval(EvalArgs),
    /// Search for a virtualization witness pair
    Witness(WitnessArgs),
    /// Verify a claim and emit its certificate
    Verify(VerifyArgs),
}

#[derive(Args)]
struct EnumArgs {
    #[arg(long, value_enum)]
    skeleton: SkeletonArg,
    #[arg(long, value_enum)]
    flavor: FlavorArg,
    /// Enumerate diagrams with exactly this many arcs
    #[arg(long, conflicts_with = "up_to")]
    exactly: Option<usize>,
    /// Enumerate diagrams with up to this many arcs
    #[arg(long)]
    up_to: Option<usize>,
    /// Arrow style for the arrow-signed flavor: solid or dashed
    #[arg(long, default_value = "dashed")]
    style: String,
}

#[derive(Args)]
struct RelationsArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    order: usize,
    #[arg(long, value_enum)]
    skeleton: SkeletonArg,
    /// arrow or chord (unsigned families only)
    #[arg(long, default_value = "chord")]
    flavor: String,
}

#[derive(Args)]
struct InvariantsArgs {
    #[arg(long)]
    order: usize,
    #[arg(long, value_enum)]
    skeleton: SkeletonArg,
    #[arg(long, value_enum, default_value = "gpv")]
    profile: ProfileArg,
}

#[derive(Args)]
struct EvalArgs {
    /// Path to a functional JSON file
    #[arg(long)]
    invariant: PathBuf,
    /// Gauss code of the knot
    #[arg(long)]
    knot: String,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    invariant: PathBuf,
    #[arg(long, default_value_t = 4)]
    max_crossings: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    claim: ClaimArg,
    #[arg(long)]
    order: Option<usize>,
    /// Order budget for `verify all`
    #[arg(long, default_value_t = 3)]
    order_max: usize,
    #[arg(long, value_enum)]
    skeleton: Option<SkeletonArg>,
    /// arrow or chord (membership lemma)
    #[arg(long, default_value = "chord")]
    flavor: String,
    #[arg(long)]
    n_low: Option<usize>,
    #[arg(long)]
    n_high: Option<usize>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprintln!("error[{EXIT_USAGE}]: {e}");
            std::process::exit(EXIT_USAGE);
        }
    };
    let code = run(cli);
    std::process::exit(code);
}

fn data_error(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit { .. } => EXIT_USAGE,
        Error::Io(_) => EXIT_INTERNAL,
        _ => EXIT_DATA,
    }
}

fn run(cli: Cli) -> i32 {
    let mut cfg = match RunConfig::load(cli.config.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error[{EXIT_USAGE}]: {}", e.0);
            return EXIT_USAGE;
        }
    };
    if let Some(d) = cli.cache_dir {
        cfg.cache_dir = Some(d);
    }
    if let Some(c) = cli.ceiling {
        cfg.ceiling = c;
    }
    if let Some(o) = cli.output {
        cfg.output = Some(o);
    }
    if let Some(f) = &cli.format {
        match Format::parse(f) {
            Some(f) => cfg.format = f,
            None => {
                eprintln!("error[{EXIT_USAGE}]: format must be json or table");
                return EXIT_USAGE;
            }
        }
    }
    if let Some(p) = cli.parallelism {
        cfg.parallelism = p;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    polyak_core::configure_parallelism(cfg.parallelism);

    match dispatch(cli.command, &cfg) {
        Ok(code) => code,
        Err(e) => {
            let code = data_error(&e);
            eprintln!("error[{code}]: {e}");
            code
        }
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Error> {
    match &cfg.output {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                f.write_all(b"\n")?;
            }
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn emit_json(cfg: &RunConfig, v: &Value) -> Result<(), Error> {
    let bytes = wire::to_bytes(v);
    emit(cfg, std::str::from_utf8(&bytes).expect("json is utf-8").trim_end())
}

fn style_of(s: &str) -> Result<Style, Error> {
    match s {
        "solid" => Ok(Style::Solid),
        "dashed" => Ok(Style::Dashed),
        other => Err(Error::InvalidDiagram(format!("unknown style {other:?}"))),
    }
}

fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<i32, Error> {
    match cmd {
        Command::Enum(args) => {
            let count = match (args.exactly, args.up_to) {
                (Some(n), None) => Count::Exactly(n),
                (None, Some(n)) => Count::UpTo(n),
                (None, None) => {
                    eprintln!("error[{EXIT_USAGE}]: one of --exactly or --up-to is required");
                    return Ok(EXIT_USAGE);
                }
                _ => unreachable!("clap conflicts_with"),
            };
            let style = style_of(&args.style)?;
            let keys =
                diagrams(args.skeleton.into(), args.flavor.into(), style, count, cfg.ceiling)?;
            match cfg.format {
                Format::Json => {
                    let v = json!({
                        "count": keys.len(),
                        "diagrams": keys.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
                    });
                    emit_json(cfg, &v)?;
                }
                Format::Table => {
                    let mut lines: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
                    lines.push(format!("total: {}", keys.len()));
                    emit(cfg, &lines.join("\n"))?;
                }
            }
            Ok(0)
        }
        Command::Relations(args) => {
            let skeleton: Skeleton = args.skeleton.into();
            let arrow = match args.flavor.as_str() {
                "arrow" => true,
                "chord" => false,
                other => {
                    return Err(Error::InvalidDiagram(format!(
                        "flavor must be arrow or chord, got {other:?}"
                    )))
                }
            };
            let (sys, flavor) = match args.family {
                FamilyArg::Polyak => (
                    relations::generate_polyak(args.order, skeleton, cfg.ceiling)?,
                    Flavor::ArrowSigned,
                ),
                FamilyArg::Chord => (
                    relations::generate_chord_relations(args.order, skeleton, cfg.ceiling)?,
                    Flavor::ChordSigned,
                ),
                FamilyArg::OneTerm => (
                    relations::generate_unsigned(RelationKind::OneTerm, args.order, skeleton, arrow, cfg.ceiling)?,
                    if arrow { Flavor::ArrowUnsigned } else { Flavor::ChordUnsigned },
                ),
                FamilyArg::SixTerm => (
                    relations::generate_unsigned(RelationKind::SixTerm, args.order, skeleton, arrow, cfg.ceiling)?,
                    if arrow { Flavor::ArrowUnsigned } else { Flavor::ChordUnsigned },
                ),
                FamilyArg::FourTerm => (
                    relations::generate_unsigned(RelationKind::FourTerm, args.order, skeleton, false, cfg.ceiling)?,
                    Flavor::ChordUnsigned,
                ),
                FamilyArg::TwoTerm => (
                    relations::generate_unsigned(RelationKind::TwoTerm, args.order, skeleton, false, cfg.ceiling)?,
                    Flavor::ChordUnsigned,
                ),
            };
            match cfg.format {
                Format::Json => emit_json(cfg, &wire::system_to_json(&sys, flavor))?,
                Format::Table => {
                    let lines = vec![
                        format!("ambient: {} diagrams", sys.ambient().len()),
                        format!("rows: {}", sys.len()),
                        format!("rank: {}", sys.rank()),
                    ];
                    emit(cfg, &lines.join("\n"))?;
                }
            }
            Ok(0)
        }
        Command::Invariants(args) => {
            let basis =
                invariant::invariant_space(args.order, args.skeleton.into(), args.profile.into(), cfg.ceiling)?;
            match cfg.format {
                Format::Json => {
                    let v = Value::Array(basis.iter().map(wire::functional_to_json).collect());
                    emit_json(cfg, &v)?;
                }
                Format::Table => {
                    let mut lines = vec![format!("dimension: {}", basis.len())];
                    for (i, f) in basis.iter().enumerate() {
                        lines.push(format!("[{i}] {} terms{}", f.entries.len(), if f.is_constant() { " (constant)" } else { "" }));
                    }
                    emit(cfg, &lines.join("\n"))?;
                }
            }
            Ok(0)
        }
        Command::Eval(args) => {
            let text = std::fs::read_to_string(&args.invariant)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::Schema {
                pointer: String::new(),
                message: format!("invalid JSON: {e}"),
            })?;
            let f = wire::functional_from_json(&v)?;
            let knot = polyak_core::gauss_code::parse(&args.knot)?;
            let value = invariant::evaluate(&f, &knot)?;
            emit(cfg, &wire::rational_to_string(&value))?;
            Ok(0)
        }
        Command::Witness(args) => {
            let text = std::fs::read_to_string(&args.invariant)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::Schema {
                pointer: String::new(),
                message: format!("invalid JSON: {e}"),
            })?;
            let f = wire::functional_from_json(&v)?;
            match invariant::find_witness(&f, args.max_crossings, cfg.ceiling)? {
                Some(w) => {
                    emit_json(cfg, &serde_json::to_value(&w).expect("witness serializes"))?;
                    Ok(0)
                }
                None => {
                    emit_json(cfg, &Value::Null)?;
                    Ok(2)
                }
            }
        }
        Command::Verify(args) => verify(args, cfg),
    }
}

fn verifier(cfg: &RunConfig) -> Verifier {
    let opts = VerifyOptions { enumeration_ceiling: cfg.ceiling, ..VerifyOptions::default() };
    Verifier::new(opts, cfg.cache_dir.clone())
}

fn verify(args: VerifyArgs, cfg: &RunConfig) -> Result<i32, Error> {
    let v = verifier(cfg);
    let order = args.order;
    let skeletons: Vec<Skeleton> = match args.skeleton {
        Some(s) => vec![s.into()],
        None => vec![Skeleton::Circle, Skeleton::Line],
    };
    let mut certs = Vec::new();
    match args.claim {
        ClaimArg::Theorem1 => {
            let n = order.unwrap_or(3);
            for s in &skeletons {
                certs.push(v.verify_theorem1(n, *s)?);
            }
        }
        ClaimArg::Vanishing => {
            let n = order.unwrap_or(2);
            for s in &skeletons {
                certs.push(v.verify_vanishing(n, *s)?);
            }
        }
        ClaimArg::Caterpillar => {
            let n = order.unwrap_or(2);
            for s in &skeletons {
                certs.push(v.verify_caterpillar(n, *s)?);
            }
        }
        ClaimArg::Average => {
            certs.push(v.verify_average(order.unwrap_or(2))?);
        }
        ClaimArg::Membership => {
            let arrow = match args.flavor.as_str() {
                "arrow" => true,
                "chord" => false,
                other => {
                    return Err(Error::InvalidDiagram(format!(
                        "flavor must be arrow or chord, got {other:?}"
                    )))
                }
            };
            certs.push(v.verify_membership(order.unwrap_or(2), arrow)?);
        }
        ClaimArg::Stability => {
            let lo = args.n_low.unwrap_or(1);
            for s in &skeletons {
                let hi_default = match s {
                    Skeleton::Circle => 3,
                    Skeleton::Line => 2,
                };
                certs.push(v.verify_stability(lo, args.n_high.unwrap_or(hi_default), *s)?);
            }
        }
        ClaimArg::All => {
            let m = args.order_max;
            for n in 1..=m.min(3) {
                certs.push(v.verify_theorem1(n, Skeleton::Circle)?);
            }
            if m >= 4 {
                certs.push(v.verify_theorem1(4, Skeleton::Circle)?);
            }
            for n in 1..=m.min(2) {
                certs.push(v.verify_theorem1(n, Skeleton::Line)?);
            }
            for s in [Skeleton::Circle, Skeleton::Line] {
                for n in 2..=(m + 1).min(4) {
                    certs.push(v.verify_vanishing(n, s)?);
                }
            }
            for s in [Skeleton::Circle, Skeleton::Line] {
                for n in 2..=(m + 2).min(5) {
                    certs.push(v.verify_caterpillar(n, s)?);
                }
            }
            for n in 2..=m.min(3) {
                certs.push(v.verify_average(n)?);
            }
            for n in 2..=m.min(3) {
                certs.push(v.verify_membership(n, false)?);
                certs.push(v.verify_membership(n, true)?);
            }
            certs.push(v.verify_stability(1, m.min(4), Skeleton::Circle)?);
            certs.push(v.verify_stability(1, m.min(2), Skeleton::Line)?);
        }
    }

    for cert in &certs {
        eprintln!("{}: {} {}", cert.claim, cert.params, cert.status.as_str());
    }
    match cfg.format {
        Format::Json => {
            if certs.len() == 1 {
                emit_json(cfg, &certs[0].to_json())?;
            } else {
                let v = Value::Array(certs.iter().map(|c| c.to_json()).collect());
                emit_json(cfg, &v)?;
            }
        }
        Format::Table => {
            let lines: Vec<String> = certs
                .iter()
                .map(|c| format!("{:<12} {:<44} {}", c.claim, c.params.to_string(), c.status.as_str()))
                .collect();
            emit(cfg, &lines.join("\n"))?;
        }
    }
    let worst = certs
        .iter()
        .map(|c| c.status)
        .fold(Status::Pass, |acc, s| match (acc, s) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Pass,
        });
    Ok(worst.exit_code())
}
