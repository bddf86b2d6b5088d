//! Command-line surface: plan, transform, verify, count, bounds, lemmas,
//! netlist.
//!
//! [`dispatch`] is the whole entry point and is directly testable: it takes
//! argv, prints to stdout/stderr, and returns the process exit code (0
//! success, 1 failed checks or runtime errors, 2 usage errors).

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::addnet::{build_addnet, export_netlist};
use crate::cyclotomic::{check_km_range, check_size_bound, CosetPartition};
use crate::engine::{format_vector, parse_vector, CfftEngine};
use crate::gf2m::FieldSpec;
use crate::metrics;
use crate::planner::{build_block_form, build_plan, plan_to_document};
use crate::Result;

#[derive(Parser)]
#[command(
    name = "cfft",
    version,
    about = "Cyclotomic FFTs over GF(2^m) with a structured addition network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a transform plan and write its document
    Plan(PlanArgs),
    /// Transform a vector file through a plan
    Transform(TransformArgs),
    /// Randomized equivalence check against the evaluation oracle
    Verify(VerifyArgs),
    /// Static operation counts of a plan and its network
    Count(CountArgs),
    /// Measured counts versus scaled complexity-bound curves
    Bounds(BoundsArgs),
    /// Coset counting checks across a degree range
    Lemmas(LemmasArgs),
    /// Export the addition network as a netlist document
    Netlist(NetlistArgs),
}

fn parse_poly(poly: &Option<String>) -> Result<Option<u32>> {
    match poly {
        None => Ok(None),
        Some(hex) => Ok(Some(
            u32::from_str_radix(hex.trim_start_matches("0x"), 16).map_err(|e| {
                crate::Error::PlanDocument(format!("bad --poly hex {hex:?}: {e}"))
            })?,
        )),
    }
}

/// Field/length/plan selection shared by the plan-consuming subcommands:
/// either rebuild from --m/--n/--poly or load (and cross-check) a plan
/// document.
#[derive(Args)]
struct PlanSource {
    /// Extension degree m of GF(2^m); required unless --plan is given
    #[arg(long)]
    m: Option<usize>,
    /// Transform length; defaults to 2^m - 1 and must divide it
    #[arg(long)]
    n: Option<usize>,
    /// Primitive polynomial bitmask in hex; defaults to the built-in table
    #[arg(long)]
    poly: Option<String>,
    /// Load a plan document instead of rebuilding from --m
    #[arg(long)]
    plan: Option<PathBuf>,
}

impl PlanSource {
    fn resolve(&self) -> Result<crate::planner::CfftPlan> {
        if let Some(path) = &self.plan {
            let (plan, _) = crate::planner::plan_from_document(&std::fs::read_to_string(path)?)?;
            if self.m.is_some_and(|m| m != plan.field.degree()) {
                return Err(crate::Error::PlanDocument(
                    "--m disagrees with the plan document".into(),
                ));
            }
            if self.n.is_some_and(|n| n != plan.n) {
                return Err(crate::Error::PlanDocument(
                    "--n disagrees with the plan document".into(),
                ));
            }
            return Ok(plan);
        }
        let m = self.m.ok_or_else(|| {
            crate::Error::PlanDocument("either --m or --plan is required".into())
        })?;
        let field = FieldSpec::new(m, parse_poly(&self.poly)?)?;
        build_plan(&field, self.n.unwrap_or(field.group_order()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct PlanArgs {
    /// Extension degree m of GF(2^m)
    #[arg(long)]
    m: usize,
    /// Transform length; defaults to 2^m - 1 and must divide it
    #[arg(long)]
    n: Option<usize>,
    /// Primitive polynomial bitmask in hex; defaults to the built-in table
    #[arg(long)]
    poly: Option<String>,
    /// Output path for the plan document; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    source: PlanSource,
    /// Input vector file, one hex element per line
    #[arg(long = "in")]
    input: PathBuf,
    /// Output vector file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate the recombination directly instead of via the network
    #[arg(long)]
    no_addnet: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: PlanSource,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Verify only the direct path
    #[arg(long)]
    no_addnet: bool,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    source: PlanSource,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Skip building the addition network
    #[arg(long)]
    no_addnet: bool,
}

#[derive(Args)]
struct BoundsArgs {
    /// Smallest degree in the table
    #[arg(long, default_value_t = 4)]
    m_min: usize,
    /// Largest degree in the table
    #[arg(long, default_value_t = 10)]
    m_max: usize,
    /// Degree at which the curve scales are fitted
    #[arg(long, default_value_t = 4)]
    anchor_m: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct LemmasArgs {
    /// Check every degree from 2 up to this one
    #[arg(long, default_value_t = 12)]
    m_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct NetlistArgs {
    #[command(flatten)]
    source: PlanSource,
    /// Output path for the netlist document; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses argv and runs one subcommand.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own usage/help text; --help exits cleanly.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Count(a) => cmd_count(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Lemmas(a) => cmd_lemmas(a),
        Command::Netlist(a) => cmd_netlist(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<()> {
    let terminated = if content.ends_with('\n') {
        content.to_string()
    } else {
        format!("{content}\n")
    };
    match out {
        Some(path) => std::fs::write(path, terminated)?,
        None => print!("{terminated}"),
    }
    Ok(())
}

fn cmd_plan(args: PlanArgs) -> Result<i32> {
    let field = FieldSpec::new(args.m, parse_poly(&args.poly)?)?;
    let n = args.n.unwrap_or(field.group_order());
    let plan = build_plan(&field, n)?;
    let form = build_block_form(&plan);
    if let Ok(form) = &form {
        if form.experimental {
            eprintln!("note: n = {n} < 2^{} - 1; block form is experimental", field.degree());
        }
    }
    let doc = plan_to_document(&plan, form.is_ok());
    write_or_print(&args.out, &doc)?;
    let sizes: Vec<String> = plan.partition.sizes().iter().map(|s| s.to_string()).collect();
    println!("k = {}, block sizes: {}", plan.partition.k(), sizes.join(" "));
    if let Some(path) = &args.out {
        println!("plan written to {}", path.display());
    }
    Ok(0)
}

fn cmd_transform(args: TransformArgs) -> Result<i32> {
    let plan = args.source.resolve()?;
    let field = plan.field;
    let engine = if args.no_addnet {
        CfftEngine::without_addnet(plan)
    } else {
        CfftEngine::new(plan)?
    };
    let text = std::fs::read_to_string(&args.input)?;
    let input = parse_vector(&field, &text)?;
    let result = engine.transform(&input, !args.no_addnet)?;
    write_or_print(&args.out, &format_vector(&result.output))?;
    let t = result.tallies;
    eprintln!(
        "mults {} | conv adds {} (pre {}, post {}) | recombine adds {} ({})",
        t.conv_mults,
        t.conv_pre + t.conv_post,
        t.conv_pre,
        t.conv_post,
        t.av_pre + t.av_mvp + t.av_post + t.av_direct,
        if result.used_addnet {
            format!("network: pre {}, mvp {}, post {}", t.av_pre, t.av_mvp, t.av_post)
        } else {
            "direct".to_string()
        }
    );
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let plan = args.source.resolve()?;
    let engine = if args.no_addnet {
        CfftEngine::without_addnet(plan)
    } else {
        CfftEngine::new(plan)?
    };
    let report = engine.verify(args.trials, args.seed);
    print!("{report}");
    Ok(if report.all_passed() { 0 } else { 1 })
}

fn cmd_count(args: CountArgs) -> Result<i32> {
    let plan = args.source.resolve()?;
    let netplan = if args.no_addnet {
        None
    } else {
        Some(build_addnet(build_block_form(&plan)?)?)
    };
    let report = metrics::count(&plan, netplan.as_ref());
    match args.format {
        Format::Text => print!("{}", metrics::report_text(&report)),
        Format::Csv => {
            println!("{}", metrics::CSV_HEADER);
            println!("{}", metrics::report_csv_row(&report));
        }
    }
    Ok(0)
}

fn cmd_bounds(args: BoundsArgs) -> Result<i32> {
    let table = metrics::bound_table(args.m_min, args.m_max, args.anchor_m)?;
    match args.format {
        Format::Text => print!("{}", metrics::bound_table_text(&table)),
        Format::Csv => print!("{}", metrics::bound_table_csv(&table)),
    }
    Ok(0)
}

fn cmd_lemmas(args: LemmasArgs) -> Result<i32> {
    let mut all_pass = true;
    let mut csv = String::from("m,n,k,km,km_pass,size,count,size_bound,size_pass\n");
    let mut text = format!(
        "{:>3} {:>8} {:>6} {:>8} {:>8}  per-size count<=bound\n",
        "m", "n", "k", "km", "range"
    );
    for m in 2..=args.m_max {
        let km = check_km_range(m)?;
        let partition = CosetPartition::new(km.n)?;
        let sizes = check_size_bound(&partition, m);
        all_pass &= km.pass && sizes.iter().all(|r| r.pass);
        let detail: Vec<String> = sizes
            .iter()
            .map(|r| {
                format!(
                    "{}:{}<={}{}",
                    r.size,
                    r.count,
                    r.bound,
                    if r.pass { "" } else { "!" }
                )
            })
            .collect();
        text.push_str(&format!(
            "{:>3} {:>8} {:>6} {:>8} {:>8}  {}\n",
            m,
            km.n,
            km.k,
            km.km,
            if km.pass { "pass" } else { "FAIL" },
            detail.join(" ")
        ));
        for r in &sizes {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                m, km.n, km.k, km.km, km.pass, r.size, r.count, r.bound, r.pass
            ));
        }
    }
    match args.format {
        Format::Text => print!("{text}"),
        Format::Csv => print!("{csv}"),
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_netlist(args: NetlistArgs) -> Result<i32> {
    let plan = args.source.resolve()?;
    let netplan = build_addnet(build_block_form(&plan)?)?;
    let doc = export_netlist(&netplan);
    write_or_print(&args.out, &doc.to_json())?;
    eprintln!(
        "netlist: {} modules ({} elided), adds pre {} / mvp {} / post {}",
        doc.r,
        doc.mvp_modules.iter().filter(|m| m.elided).count(),
        doc.counts.pre,
        doc.counts.mvp,
        doc.counts.post
    );
    Ok(0)
}
