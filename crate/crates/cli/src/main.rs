//! `rht`: command line front end for the CDGA engine.

use std::fmt;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use rht_core::cohomology::{
    betti_with, is_quasi_iso_with, quotient_ring_dims_with, CohomologyOptions, RingPresentation,
};
use rht_core::constructors::{biquotient_model, projectivize, PontryaginData};
use rht_core::dsl::{
    parse_document, parse_generator_spec, parse_pontryagin, parse_relations, render_model, Document, ParseErrors,
};
use rht_core::presets::{self, Case};
use rht_core::reduction::{compact_betti, reduce_with, DEFAULT_CHECK_DEGREE};
use rht_core::verify::{leray_hirsch_report, validator_report, verify_case, CaseReport, VerifyOptions};
use rht_core::{Error, FreeCdga};

#[derive(Parser)]
#[command(
    name = "rht",
    version,
    about = "Exact computations with Sullivan models over the rationals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers of a model up to a degree.
    Cohomology {
        /// Model file, or the name of a shipped preset.
        file: String,
        #[arg(long)]
        max_degree: u32,
        /// Which model of the document to use (default: the last one).
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        json: bool,
        /// Print cocycle representatives of a basis in each degree.
        #[arg(long)]
        representatives: bool,
    },
    /// Simplify a model by change of variable and cancellation of contractible pairs.
    Reduce {
        file: String,
        /// Compare Betti numbers up to this degree after every step; 0 disables.
        #[arg(long, default_value_t = DEFAULT_CHECK_DEGREE)]
        check_degree: u32,
        #[arg(long)]
        model: Option<String>,
        /// Print every step.
        #[arg(long)]
        log: bool,
    },
    /// Build the model of a biquotient from a `biquotient` block.
    Biquotient {
        #[arg(long)]
        config: String,
        /// Which biquotient block to use (default: the first one).
        #[arg(long)]
        name: Option<String>,
    },
    /// Model of the quaternionic projectivization of a bundle.
    Projectivize {
        #[arg(long)]
        base: String,
        #[arg(long)]
        rank: u32,
        /// File with a `pontryagin { p1 = ...; }` block over the base.
        #[arg(long)]
        pontryagin: String,
    },
    /// Check whether a morphism induces isomorphisms on cohomology.
    QuasiIso {
        file: String,
        #[arg(long)]
        max_degree: u32,
        /// Which morphism of the document to check (default: the last one).
        #[arg(long)]
        morphism: Option<String>,
    },
    /// Graded dimensions of a polynomial ring modulo relations.
    QuotientDims {
        /// Generators, for example `x4:4, y4:4`.
        #[arg(long)]
        gens: String,
        /// File of `;`-terminated relations.
        #[arg(long)]
        relations: String,
        #[arg(long)]
        max_degree: u32,
        #[arg(long)]
        json: bool,
    },
    /// Run the worked families and print a pass/fail/discrepancy report.
    #[command(name = "paper-verify")]
    Verify {
        #[arg(long, value_parser = parse_case)]
        case: Option<Case>,
        #[arg(long)]
        n: Option<u32>,
        /// Comma-separated rationals replacing the default free coefficients.
        #[arg(long)]
        coefficients: Option<String>,
    },
}

fn parse_case(s: &str) -> Result<Case, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum CliError {
    Io(String),
    Parse(String),
    Math(String),
    Resource(String),
    Usage(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Math(_) => 3,
            CliError::Resource(_) => 4,
            CliError::Io(_) | CliError::Usage(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) | CliError::Usage(m) | CliError::Math(m) | CliError::Resource(m) => f.write_str(m),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit { .. } => CliError::Resource(format!(
                "resource limit: {e} (raise RHT_MAX_BASIS to allow larger bases)"
            )),
            Error::InvalidInput(m) => CliError::Usage(m),
            other => CliError::Math(other.to_string()),
        }
    }
}

/// Parse errors are reported against the file they came from.
fn parse_err(origin: &str, e: ParseErrors) -> CliError {
    let lines: Vec<String> = e.errors().iter().map(|x| format!("{origin}:{x}")).collect();
    CliError::Parse(lines.join("\n"))
}

/// File contents, or the text of a shipped preset when no such file exists.
fn read_source(arg: &str) -> Result<String, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{arg}: {e}")));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    presets::preset(arg)
        .or_else(|| presets::preset(stem))
        .map(|p| p.source.to_string())
        .ok_or_else(|| CliError::Io(format!("{arg}: no such file or preset")))
}

fn load_document(arg: &str) -> Result<Document, CliError> {
    let text = read_source(arg)?;
    parse_document(&text).map_err(|e| parse_err(arg, e))
}

fn pick_model<'d>(doc: &'d Document, name: Option<&str>, origin: &str) -> Result<&'d FreeCdga, CliError> {
    match name {
        Some(n) => doc
            .model(n)
            .ok_or_else(|| CliError::Usage(format!("{origin}: no model named {n}"))),
        None => doc
            .models
            .last()
            .ok_or_else(|| CliError::Usage(format!("{origin}: no model defined"))),
    }
}

fn betti_json(pairs: impl IntoIterator<Item = (u32, usize)>) -> Value {
    let mut map = Map::new();
    for (d, b) in pairs {
        map.insert(d.to_string(), json!(b));
    }
    Value::Object(map)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let opts = CohomologyOptions::from_env();
    match cli.command {
        Command::Cohomology {
            file,
            max_degree,
            model,
            json,
            representatives,
        } => {
            let doc = load_document(&file)?;
            let m = pick_model(&doc, model.as_deref(), &file)?;
            let o = if representatives {
                opts.with_representatives()
            } else {
                opts
            };
            let report = betti_with(m, max_degree, &o)?;
            if json {
                let mut out = Map::new();
                out.insert("betti".into(), betti_json(report.nonzero()));
                if let Some(reps) = &report.representatives {
                    let mut r = Map::new();
                    for (d, ps) in reps.iter().filter(|(_, ps)| !ps.is_empty()) {
                        r.insert(
                            d.to_string(),
                            json!(ps.iter().map(ToString::to_string).collect::<Vec<_>>()),
                        );
                    }
                    out.insert("representatives".into(), Value::Object(r));
                }
                println!("{}", Value::Object(out));
            } else {
                println!("{m}");
                print!("{report}");
                println!("betti: {}", compact_betti(&report.betti_numbers()));
            }
        }
        Command::Reduce {
            file,
            check_degree,
            model,
            log,
        } => {
            let doc = load_document(&file)?;
            let m = pick_model(&doc, model.as_deref(), &file)?;
            let (out, steps) = reduce_with(m, check_degree, &opts)?;
            if log {
                print!("{steps}");
            }
            print!("{}", render_model(&out));
        }
        Command::Biquotient { config, name } => {
            let doc = load_document(&config)?;
            let data = match name.as_deref() {
                Some(n) => doc.biquotient(n),
                None => doc.biquotients.first(),
            }
            .ok_or_else(|| CliError::Usage(format!("{config}: no biquotient block")))?;
            print!("{}", render_model(&biquotient_model(data)?));
        }
        Command::Projectivize { base, rank, pontryagin } => {
            let doc = load_document(&base)?;
            let base_model = pick_model(&doc, None, &base)?;
            let text = read_source(&pontryagin)?;
            let (stated, classes) = parse_pontryagin(&text, base_model).map_err(|e| parse_err(&pontryagin, e))?;
            if let Some(r) = stated.filter(|r| *r != rank) {
                return Err(CliError::Usage(format!(
                    "{pontryagin} states rank {r}, but --rank is {rank}"
                )));
            }
            let total = projectivize(&PontryaginData {
                base: base_model.clone(),
                classes,
                rank,
            })?;
            print!("{}", render_model(&total.with_name(format!("P_{}", base_model.name()))));
        }
        Command::QuasiIso {
            file,
            max_degree,
            morphism,
        } => {
            let doc = load_document(&file)?;
            let f = match morphism.as_deref() {
                Some(n) => doc.morphism(n),
                None => doc.morphisms.last(),
            }
            .ok_or_else(|| CliError::Usage(format!("{file}: no morphism found")))?;
            let report = is_quasi_iso_with(f, max_degree, opts.max_basis).map_err(|e| match e {
                Error::InvalidInput(m) => CliError::Math(m),
                e => e.into(),
            })?;
            println!("{report}");
            if !report.is_quasi_iso() {
                return Err(CliError::Math(format!("{} is not a quasi-isomorphism", f.name())));
            }
        }
        Command::QuotientDims {
            gens,
            relations,
            max_degree,
            json,
        } => {
            let gens = parse_generator_spec(&gens).map_err(|e| parse_err("--gens", e))?;
            let text = read_source(&relations)?;
            let rels = parse_relations(&text, &gens).map_err(|e| parse_err(&relations, e))?;
            let pres = RingPresentation::new(gens, rels)?;
            let dims = quotient_ring_dims_with(&pres, max_degree, opts.max_basis)?;
            if json {
                let nz = dims.into_iter().filter(|(_, d)| *d > 0);
                println!("{}", json!({ "dims": betti_json(nz) }));
            } else {
                for (d, n) in dims {
                    println!("{d:>4} {n}");
                }
            }
        }
        Command::Verify { case, n, coefficients } => verify_command(case, n, coefficients, opts)?,
    }
    Ok(())
}

fn verify_command(
    case: Option<Case>,
    n: Option<u32>,
    coefficients: Option<String>,
    cohomology: CohomologyOptions,
) -> Result<(), CliError> {
    let coefficients = coefficients.map(|c| presets::parse_scalars(&c)).transpose()?;
    let start = Instant::now();
    let cases = match case {
        Some(c) => vec![c],
        None => Case::ALL.to_vec(),
    };
    let mut reports: Vec<CaseReport> = Vec::new();
    for c in cases {
        let ns: Vec<Option<u32>> = match (c, n) {
            (Case::Thm34, _) => vec![None],
            (_, Some(n)) => vec![Some(n)],
            (Case::Prop31 | Case::Thm33, None) => vec![Some(2), Some(3)],
            (Case::Prop32, None) => vec![Some(2)],
        };
        for n in ns {
            let opts = VerifyOptions {
                n,
                coefficients: coefficients.clone(),
                cohomology: cohomology.clone(),
                ..VerifyOptions::default()
            };
            reports.push(verify_case(c, &opts)?);
        }
    }
    if case.is_none() {
        reports.push(leray_hirsch_report(&cohomology)?);
        reports.push(validator_report()?);
    }
    for r in &reports {
        println!("{r}\n");
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.id.as_str()).collect();
    println!(
        "{} case(s), {} failed ({:.2} s)",
        reports.len(),
        failed.len(),
        start.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Math(format!("failed: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rht: {e}");
            ExitCode::from(e.code())
        }
    }
}
