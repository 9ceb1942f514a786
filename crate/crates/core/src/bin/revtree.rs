use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use revtree::classify::{
    classify, cross_check, explain, Certificate, Verdict, Witness, WitnessVerification,
};
use revtree::corpus::{run_corpus, REFERENCE_CORPUS};
use revtree::expr::{
    cardinality, components, height, level0_card, parse_expr, parse_family, parse_seq,
    ComponentClass, TreeExpr,
};
use revtree::seq::check_merge_plan;
use revtree::wellorder::{classify_wellorder_union, WellOrderFamily};
use revtree::window::{verify_witness, WindowParams};
use revtree::{is_reversible_sequence, normalize, TriBool};

macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_INTERNAL: u8 = 2;
const EXIT_NONREV: u8 = 10;
const EXIT_UNKNOWN: u8 = 20;

#[derive(Parser)]
#[command(
    name = "revtree",
    version,
    about = "Reversibility of infinite trees, with certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone, Copy)]
struct WindowFlags {
    /// Longest materialized sequence and ordinal coefficient bound
    #[arg(long)]
    depth: Option<u32>,
    /// Labels per node for infinite branching
    #[arg(long)]
    width: Option<u32>,
    /// Copies per part for infinite multiplicities
    #[arg(long)]
    comps: Option<u32>,
    /// Bound on |n| for the components of delta
    #[arg(long)]
    zrange: Option<u32>,
}

impl WindowFlags {
    fn any(&self) -> bool {
        self.depth.is_some()
            || self.width.is_some()
            || self.comps.is_some()
            || self.zrange.is_some()
    }

    fn params(&self) -> WindowParams {
        let d = WindowParams::default();
        WindowParams {
            depth: self.depth.unwrap_or(d.depth),
            width: self.width.unwrap_or(d.width),
            comps: self.comps.unwrap_or(d.comps),
            zrange: self.zrange.unwrap_or(d.zrange),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify a tree expression
    Classify {
        /// Expression literal or path to a file holding one
        input: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also run every rule and fail on disagreement
        #[arg(long)]
        cross_check: bool,
        /// Check the attached witness on a finite window
        #[arg(long)]
        verify_witness: bool,
        #[command(flatten)]
        window: WindowFlags,
    },
    /// Test a sequence of naturals for reversibility
    SeqCheck {
        input: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Classify a disjoint union of well orders
    WelluCheck {
        /// A wfam{...} literal or a union of chains
        input: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Classify and check the witness on a finite window
    WitnessVerify {
        input: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        window: WindowFlags,
    },
    /// Classify every line of a corpus file (the shipped corpus by default)
    Corpus {
        path: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Parse, normalize and describe an expression
    Parse {
        input: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn read_input(arg: &str) -> Result<String, String> {
    let p = Path::new(arg);
    if p.is_file() {
        std::fs::read_to_string(p)
            .map(|s| s.trim().to_string())
            .map_err(|e| format!("cannot read {arg}: {e}"))
    } else {
        Ok(arg.to_string())
    }
}

fn parse_input(arg: &str) -> Result<TreeExpr, String> {
    let text = read_input(arg)?;
    parse_expr(&text).map_err(|e| format!("parse error {e}"))
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Reversible => EXIT_OK,
        Verdict::NonReversible => EXIT_NONREV,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn tri_code(t: &TriBool) -> u8 {
    match t {
        TriBool::Yes => EXIT_OK,
        TriBool::No => EXIT_NONREV,
        TriBool::Unknown(_) => EXIT_UNKNOWN,
    }
}

fn print_json(v: &impl serde::Serialize) {
    out!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run_classify(
    input: &str,
    format: Format,
    cross: bool,
    verify: bool,
    window: WindowFlags,
) -> Result<u8, String> {
    if window.any() && !verify {
        return Err("window flags require --verify-witness".into());
    }
    let e = parse_input(input)?;
    let mut cert: Certificate = classify(&e);
    let mut code = verdict_code(cert.verdict);
    if verify && cert.witness.is_some() {
        match cert.verify(&window.params()) {
            Ok(true) => {}
            Ok(false) => code = EXIT_INTERNAL,
            Err(err) => return Err(format!("witness check failed: {err}")),
        }
    }
    let report = cross.then(|| cross_check(&e));
    match format {
        Format::Json => print_json(&cert),
        Format::Text => {
            out!("{}", explain(&cert));
            if let (true, Some(WitnessVerification::Window { report })) =
                (verify, &cert.witness_verification)
            {
                out!("  {}", report.summary());
            }
        }
    }
    if let Some(r) = report {
        if format == Format::Text || !r.consistent() {
            let verdicts: Vec<String> = r
                .verdicts
                .iter()
                .map(|(rule, v)| format!("{rule}={v}"))
                .collect();
            eprintln!("cross-check: {}", verdicts.join(", "));
        }
        if !r.consistent() {
            for (a, b) in &r.conflicts {
                eprintln!("conflict: {a} disagrees with {b}");
            }
            return Ok(EXIT_INTERNAL);
        }
    }
    Ok(code)
}

fn run_seq(input: &str, format: Format) -> Result<u8, String> {
    let text = read_input(input)?;
    let s = parse_seq(&text).map_err(|e| format!("parse error {e}"))?;
    let v = is_reversible_sequence(&s);
    let check = v
        .witness
        .as_ref()
        .map(|p| check_merge_plan(p, &s.normalized()));
    match format {
        Format::Json => print_json(&json!({ "sequence": s, "verdict": v, "plan_check": check })),
        Format::Text => {
            out!("{s}: reversible = {}", v.reversible);
            out!("  {}", v.reason);
            if let (Some(p), Some(c)) = (&v.witness, &check) {
                out!("  merge plan: {p}");
                out!("  plan check: {}", if c.ok { "PASS" } else { "FAIL" });
            }
        }
    }
    if check.is_some_and(|c| !c.ok) {
        return Ok(EXIT_INTERNAL);
    }
    Ok(tri_code(&v.reversible))
}

fn run_wellu(input: &str, format: Format) -> Result<u8, String> {
    let text = read_input(input)?;
    let family = if text.trim_start().starts_with("wfam") {
        parse_family(&text).map_err(|e| format!("parse error {e}"))?
    } else {
        let e = normalize(&parse_expr(&text).map_err(|e| format!("parse error {e}"))?);
        WellOrderFamily::from_chain_union(&e)
            .ok_or_else(|| format!("{e} is not a union of well orders"))?
    };
    let v = classify_wellorder_union(&family);
    match format {
        Format::Json => print_json(&json!({ "family": family, "verdict": v })),
        Format::Text => {
            out!("{family}: reversible = {}", v.reversible);
            out!("  {}", v.reason);
            if let Some(p) = v.seq_verdict.as_ref().and_then(|s| s.witness.as_ref()) {
                out!("  merge plan: {p}");
            }
        }
    }
    Ok(tri_code(&v.reversible))
}

fn run_witness(input: &str, format: Format, window: WindowFlags) -> Result<u8, String> {
    let e = parse_input(input)?;
    let cert = classify(&e);
    let w = window.params();
    match &cert.witness {
        None => {
            let msg = format!("{}: {} with no witness to verify", cert.expr, cert.verdict);
            match format {
                Format::Json => print_json(
                    &json!({ "expr": cert.expr, "verdict": cert.verdict, "witness": null }),
                ),
                Format::Text => out!("{msg}"),
            }
            Ok(EXIT_UNKNOWN)
        }
        Some(Witness::Condensation { descriptor, target }) => {
            let report = verify_witness(descriptor, target, &w).map_err(|e| e.to_string())?;
            match format {
                Format::Json => print_json(&report),
                Format::Text => {
                    out!("{}", report.summary());
                    for d in &report.diagnostics {
                        out!("  {d}");
                    }
                }
            }
            Ok(if report.pass { EXIT_OK } else { EXIT_INTERNAL })
        }
        Some(Witness::MergePlan { plan, sequence }) => {
            let check = check_merge_plan(plan, sequence);
            match format {
                Format::Json => print_json(&check),
                Format::Text => {
                    out!(
                        "merge plan [{plan}] for {sequence}: {}",
                        if check.ok { "PASS" } else { "FAIL" }
                    );
                    for d in &check.diagnostics {
                        out!("  {d}");
                    }
                }
            }
            Ok(if check.ok { EXIT_OK } else { EXIT_INTERNAL })
        }
    }
}

fn run_corpus_cmd(path: Option<PathBuf>, format: Format) -> Result<u8, String> {
    let text = match &path {
        Some(p) => {
            std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?
        }
        None => REFERENCE_CORPUS.to_string(),
    };
    let report = run_corpus(&text);
    match format {
        Format::Json => print_json(&report),
        Format::Text => {
            for r in &report.results {
                let got = match (&r.actual, &r.error) {
                    (Some(v), _) => v.to_string(),
                    (None, Some(e)) => format!("error: {e}"),
                    (None, None) => "?".into(),
                };
                let rule = r.rule.map(|x| format!(" [{x}]")).unwrap_or_default();
                out!(
                    "{} line {}: {} ⟹ {} (got {got}{rule})",
                    if r.ok() { "ok  " } else { "FAIL" },
                    r.case.line,
                    r.case.expr,
                    r.case.expected
                );
            }
            for (line, msg) in &report.malformed {
                out!("FAIL line {line}: {msg}");
            }
            out!("{} passed, {} failed", report.passed(), report.failed());
        }
    }
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_INPUT
    })
}

fn run_parse(input: &str, format: Format) -> Result<u8, String> {
    let e = parse_input(input)?;
    let n = normalize(&e);
    let comps: Vec<String> = components(&n)
        .iter()
        .map(|c| match c {
            ComponentClass::Copies { mult, shape } => format!("{mult} x {shape}"),
            ComponentClass::ChainRun { limit, start, step } => {
                format!("chains {limit} + ({start} + {step}t)")
            }
        })
        .collect();
    match format {
        Format::Json => print_json(&json!({
            "expr": e,
            "normalized": n,
            "height": height(&n),
            "cardinality": cardinality(&n).to_string(),
            "level0": level0_card(&n).to_string(),
            "components": comps,
        })),
        Format::Text => {
            out!("expr:        {e}");
            out!("normalized:  {n}");
            out!("height:      {}", height(&n));
            out!("cardinality: {}", cardinality(&n));
            out!("|L_0|:       {}", level0_card(&n));
            out!("components:  {}", comps.join("; "));
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify {
            input,
            format,
            cross_check,
            verify_witness,
            window,
        } => run_classify(&input, format, cross_check, verify_witness, window),
        Command::SeqCheck { input, format } => run_seq(&input, format),
        Command::WelluCheck { input, format } => run_wellu(&input, format),
        Command::WitnessVerify {
            input,
            format,
            window,
        } => run_witness(&input, format, window),
        Command::Corpus { path, format } => run_corpus_cmd(path, format),
        Command::Parse { input, format } => run_parse(&input, format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
