//! Command-line front end for the ADE surface code toolkit.
//!
//! Exit codes: 0 success, 1 input error, 2 failed checks under
//! `check --strict`, 3 resource cap exceeded. Diagnostics (including the
//! version banner, unless `--no-header`) go to standard error; payload
//! output is deterministic and goes to standard output or to the
//! requested files (`-` means standard output).

use std::collections::BTreeSet;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Deserialize;

use ade_codes::ade::{DynkinConfig, DynkinFamily, DynkinLabel};
use ade_codes::codes::LabeledCode;
use ade_codes::doc::{from_document, parse_json, to_document, to_json};
use ade_codes::genealogy;
use ade_codes::lattice::{code_from_saturation, PolarizedLattice};
use ade_codes::restrictions::{b_inequality, check_code, RuleOutcome, SurfaceContext};
use ade_codes::{catalog, Error};

#[derive(Parser)]
#[command(name = "ade-codes", version, about = "Codes of normal surfaces with ADE singularities")]
struct Cli {
    /// Suppress the version banner on standard error.
    #[arg(long, global = true)]
    no_header: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local homology of one singularity type, with the gamma table.
    LocalHomology { family: String, index: usize },
    /// Shorten a code at one point by deleting diagram vertices.
    Shorten {
        file: String,
        #[arg(long)]
        point: String,
        /// Comma-separated vertex numbers; omit to delete the whole point.
        #[arg(long, value_delimiter = ',')]
        vertices: Vec<usize>,
    },
    /// Weight table of every nonzero vector of a code.
    Weights { file: String },
    /// Run the weight divisibility checks against a surface context.
    Check {
        file: String,
        #[arg(long)]
        degree: Option<u64>,
        /// JSON file with explicit surface invariants.
        #[arg(long)]
        ctx: Option<String>,
        /// Exit with status 2 if any check fails.
        #[arg(long)]
        strict: bool,
        /// Emit the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Discriminant form and extended code of a polarized ADE lattice.
    Saturate { file: String },
    /// Genealogy of shortenings from a catalog ancestor or a code file.
    Genealogy {
        ancestor: String,
        #[arg(long)]
        dot: Option<String>,
        #[arg(long)]
        csv: Option<String>,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// List or show the built-in ancestor codes.
    Catalog {
        #[arg(default_value = "list")]
        action: String,
        name: Option<String>,
    },
}

#[derive(Deserialize)]
struct CtxDoc {
    degree: Option<u64>,
    k_s_dot_h: i64,
    k_s_even: bool,
    b2: u64,
    chi: i64,
}

#[derive(Deserialize)]
struct BlockDoc {
    #[serde(rename = "type")]
    family: String,
    index: usize,
}

#[derive(Deserialize)]
struct LatticeDoc {
    blocks: Vec<BlockDoc>,
    degree: u64,
    #[serde(default)]
    points: Option<Vec<String>>,
    generators: Vec<Vec<String>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !cli.no_header {
        eprintln!("ade-codes {}", env!("CARGO_PKG_VERSION"));
    }
    match run(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Input(_) => ExitCode::from(1),
                Error::ResourceCap(_) => ExitCode::from(3),
            }
        }
    }
}

fn read_file(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {path}: {e}")))
}

fn write_output(path: &str, content: &str) -> Result<(), Error> {
    if path == "-" {
        print!("{content}");
        std::io::stdout().flush().ok();
        Ok(())
    } else {
        std::fs::write(path, content)
            .map_err(|e| Error::Input(format!("cannot write {path}: {e}")))
    }
}

fn load_code(file: &str) -> Result<(LabeledCode, Option<u64>), Error> {
    let doc = parse_json(&read_file(file)?)?;
    from_document(&doc)
}

fn parse_family(s: &str) -> Result<DynkinFamily, Error> {
    match s {
        "A" | "a" => Ok(DynkinFamily::A),
        "D" | "d" => Ok(DynkinFamily::D),
        "E" | "e" => Ok(DynkinFamily::E),
        _ => Err(Error::Input(format!("unknown family {s:?}, expected A, D or E"))),
    }
}

fn context_for(
    degree: &Option<u64>,
    ctx_file: &Option<String>,
    doc_degree: Option<u64>,
) -> Result<SurfaceContext, Error> {
    if let Some(path) = ctx_file {
        let c: CtxDoc = serde_json::from_str(&read_file(path)?)
            .map_err(|e| Error::Input(format!("{path}: {e}")))?;
        return Ok(SurfaceContext {
            degree: c.degree.map(BigInt::from),
            k_s_dot_h: BigInt::from(c.k_s_dot_h),
            k_s_even: c.k_s_even,
            b2: c.b2,
            chi_o: BigInt::from(c.chi),
        });
    }
    match degree.or(doc_degree) {
        Some(d) => Ok(SurfaceContext::hypersurface(d)),
        None => Err(Error::Input(
            "no surface context: pass --degree, --ctx, or a document with a degree".into(),
        )),
    }
}

fn run(cmd: &Command) -> Result<ExitCode, Error> {
    match cmd {
        Command::LocalHomology { family, index } => {
            let label = DynkinLabel::new(parse_family(family)?, *index)?;
            let cfg = DynkinConfig::new(label);
            let h = ade_codes::ade::local_homology(&cfg);
            println!("{label}: H_1(x) = {}", h.group);
            let dist: Vec<String> = h
                .distinguished
                .iter()
                .map(|v| format!("gamma_{v}"))
                .collect();
            println!(
                "distinguished generators: {}",
                if dist.is_empty() { "none".into() } else { dist.join(", ") }
            );
            for v in cfg.vertices() {
                let coords: Vec<String> =
                    h.gamma_of(v).coords.iter().map(BigInt::to_string).collect();
                println!("gamma_{v} = [{}]", coords.join(", "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Shorten { file, point, vertices } => {
            let (code, degree) = load_code(file)?;
            let short = if vertices.is_empty() {
                code.shorten_full(point)?
            } else {
                let s: BTreeSet<usize> = vertices.iter().copied().collect();
                code.shorten_geometric(point, &s)?
            };
            println!("{}", to_json(&to_document(&short, degree)));
            Ok(ExitCode::SUCCESS)
        }
        Command::Weights { file } => {
            let (code, _) = load_code(file)?;
            println!("code on {} ({} points), K of order {}", code.label_multiset(), code.num_points(), code.k_order());
            for (i, v) in code.all_vectors()?.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let w = code.weights(v);
                let labels: Vec<String> = w
                    .label_weights
                    .iter()
                    .map(|(l, c)| format!("{l}:{c}"))
                    .collect();
                println!(
                    "v{i}: order {} weight {}{}{} [{}]",
                    w.order,
                    w.hamming,
                    if v.is_strict() { "" } else { " (extended)" },
                    if w.almost_simple { " almost-simple" } else { "" },
                    labels.join(" ")
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { file, degree, ctx, strict, json } => {
            let (code, doc_degree) = load_code(file)?;
            let context = context_for(degree, ctx, doc_degree)?;
            let mut all_ok = true;
            if *json {
                let mut vectors = Vec::new();
                for (i, _, report) in check_code(&code, &context)? {
                    all_ok &= report.passed();
                    vectors.push(serde_json::json!({
                        "vector": i,
                        "checks": report.to_json(),
                    }));
                }
                let b = if code.is_extended() {
                    serde_json::Value::Null
                } else {
                    let b = b_inequality(&code, &context)?;
                    all_ok &= b.pass;
                    serde_json::json!({
                        "k2_dim": b.k2_dim,
                        "lower_bound": b.lower_bound.to_string(),
                        "pass": b.pass,
                    })
                };
                let doc = serde_json::json!({
                    "vectors": vectors,
                    "b_inequality": b,
                    "all_pass": all_ok,
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
                if *strict && !all_ok {
                    return Ok(ExitCode::from(2));
                }
                return Ok(ExitCode::SUCCESS);
            }
            for (i, v, report) in check_code(&code, &context)? {
                for e in &report.entries {
                    let status = match &e.result.outcome {
                        RuleOutcome::Pass => "pass",
                        RuleOutcome::Fail => {
                            all_ok = false;
                            "FAIL"
                        }
                        RuleOutcome::Inapplicable(_) => "n/a ",
                    };
                    let res = match (&e.result.residue, &e.result.modulus) {
                        (Some(r), Some(m)) => format!(" residue {r} mod {m}"),
                        _ => String::new(),
                    };
                    let note = if e.result.note.is_empty() {
                        String::new()
                    } else {
                        format!(" ({})", e.result.note)
                    };
                    println!(
                        "v{i} x{} (order {}): {:<8} {status}{res}{note}",
                        e.scale, e.order, e.result.rule
                    );
                }
                let _ = v;
            }
            if !code.is_extended() {
                let b = b_inequality(&code, &context)?;
                println!(
                    "B-inequality: k[2] = {} >= {}: {}",
                    b.k2_dim,
                    b.lower_bound,
                    if b.pass { "pass" } else { "FAIL" }
                );
                all_ok &= b.pass;
            }
            println!("summary: {}", if all_ok { "all checks pass" } else { "FAILURES present" });
            if *strict && !all_ok {
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Saturate { file } => {
            let doc: LatticeDoc = serde_json::from_str(&read_file(file)?)
                .map_err(|e| Error::Input(format!("{file}: {e}")))?;
            let blocks: Vec<DynkinConfig> = doc
                .blocks
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    Ok(DynkinConfig::new(DynkinLabel::new(
                        parse_family(&b.family)
                            .map_err(|e| Error::Input(format!("blocks[{i}]: {e}")))?,
                        b.index,
                    )?))
                })
                .collect::<Result<_, Error>>()?;
            let points: Vec<ade_codes::codes::SingularPoint> = match &doc.points {
                Some(ids) => {
                    if ids.len() != blocks.len() {
                        return Err(Error::Input("points must match blocks".into()));
                    }
                    ids.iter()
                        .zip(&blocks)
                        .map(|(id, b)| ade_codes::codes::SingularPoint {
                            id: id.clone(),
                            label: b.label,
                        })
                        .collect()
                }
                None => blocks
                    .iter()
                    .enumerate()
                    .map(|(i, b)| ade_codes::codes::SingularPoint {
                        id: format!("p{}", i + 1),
                        label: b.label,
                    })
                    .collect(),
            };
            let lattice = PolarizedLattice::new(blocks, doc.degree.into())?;
            let disc = lattice.discriminant()?;
            println!("discriminant group: {}", disc.group);
            let gens: Vec<Vec<BigRational>> = doc
                .generators
                .iter()
                .enumerate()
                .map(|(gi, g)| {
                    g.iter()
                        .enumerate()
                        .map(|(ci, s)| {
                            parse_rational(s).ok_or_else(|| {
                                Error::Input(format!("generators[{gi}][{ci}]: bad fraction {s:?}"))
                            })
                        })
                        .collect()
                })
                .collect::<Result<_, Error>>()?;
            let (code, sat) = code_from_saturation(&lattice, points, &gens)?;
            println!("glue group L^sat/L: {}", sat.glue);
            println!("extended code K': {}", code.h1());
            println!("strict code K: {}", code.strict_part()?.h1());
            println!("{}", to_json(&to_document(&code, Some(doc.degree))));
            Ok(ExitCode::SUCCESS)
        }
        Command::Genealogy { ancestor, dot, csv, max_depth } => {
            let code = if catalog::names().contains(&ancestor.as_str()) {
                let e = catalog::get(ancestor)?;
                e.extended.unwrap_or(e.strict)
            } else {
                load_code(ancestor)?.0
            };
            let max_nodes = std::env::var("ADE_CODES_MAX_NODES")
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(100_000);
            let dag = genealogy::build_dag(&code, *max_depth, max_nodes)?;
            let counts = dag.counts_by_nu();
            // Keep stdout clean when a machine format streams to it.
            let streaming = dot.as_deref() == Some("-") || csv.as_deref() == Some("-");
            let mut summary = String::new();
            use std::fmt::Write as _;
            let _ = writeln!(
                summary,
                "{} classes from {} ({})",
                dag.nodes.len(),
                ancestor,
                if dag.complete { "complete" } else { "INCOMPLETE: node cap hit" }
            );
            for (nu, c) in counts.iter().rev() {
                let _ = writeln!(summary, "nu={nu}: {c}");
            }
            if streaming {
                eprint!("{summary}");
            } else {
                print!("{summary}");
            }
            if let Some(path) = dot {
                write_output(path, &dag.to_dot())?;
            }
            if let Some(path) = csv {
                write_output(path, &dag.to_csv())?;
            }
            if !dag.complete {
                return Err(Error::ResourceCap(
                    "genealogy incomplete: raise ADE_CODES_MAX_NODES".into(),
                ));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Catalog { action, name } => match action.as_str() {
            "list" => {
                for n in catalog::names() {
                    let e = catalog::get(n)?;
                    let kp = match &e.extended {
                        Some(x) => format!(", K' = {}", x.h1()),
                        None => String::new(),
                    };
                    println!("{n}: {} | K = {}{kp}", e.strict.label_multiset(), e.strict.h1());
                }
                Ok(ExitCode::SUCCESS)
            }
            "show" => {
                let name = name
                    .as_ref()
                    .ok_or_else(|| Error::Input("catalog show needs a name".into()))?;
                let e = catalog::get(name)?;
                println!("{name}: {}", e.notes);
                println!("points: {}", e.strict.label_multiset());
                println!("K = {}", e.strict.h1());
                if let Some(x) = &e.extended {
                    println!("K' = {}", x.h1());
                }
                let deg = e.context.degree.as_ref().and_then(|d| d.to_u64());
                println!("{}", to_json(&to_document(&e.strict, deg)));
                Ok(ExitCode::SUCCESS)
            }
            other => Err(Error::Input(format!(
                "unknown catalog action {other:?}; use list or show"
            ))),
        },
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let num: BigInt = num.trim().parse().ok()?;
    let den: BigInt = den.trim().parse().ok()?;
    if den == BigInt::from(0) {
        return None;
    }
    Some(BigRational::new(num, den))
}
