//! The `lazylab` command line.
//!
//! Exit codes: 0 on success, 1 when evaluation gets stuck or a property
//! fails, 2 on usage, parse or input errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::denotational::{den_expr, den_heap, show_table, HeapVariant};
use crate::domain::{DomElem, Env, MAX_RANK};
use crate::natural::{eval_nat, DerivTrace, NatResult};
use crate::stacked::{run_via_stack_traced, StackResult, StackTrace};
use crate::syntax::{heap_print, parse, parse_desugared, print, Expr, Heap, NameSet};
use crate::verifier::{self, check_counterexample, counterexample_summary, GenConfig, RunOptions, Suite};

#[derive(Parser, Debug)]
#[command(name = "lazylab", version, about = "Natural, stacked and denotational semantics of a lazy lambda calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an expression, optionally against a heap.
    Eval(EvalArgs),
    /// Compute the denotation of an expression.
    Denote(DenoteArgs),
    /// Run property checks on generated programs.
    Check(CheckArgs),
    /// Reproduce the counterexample and its repair.
    Counterexample(CounterexampleArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Expression text.
    expr: String,
    /// Heap file: `name = expr` lines or JSON bindings.
    #[arg(long, value_name = "FILE")]
    heap: Option<String>,
    /// Reject general applications instead of rewriting them.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Semantics {
    Natural,
    Stacked,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "natural")]
    semantics: Semantics,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,
    /// Print the derivation.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    Join,
    Update,
}

impl From<Variant> for HeapVariant {
    fn from(v: Variant) -> HeapVariant {
        match v {
            Variant::Join => HeapVariant::Join,
            Variant::Update => HeapVariant::Update,
        }
    }
}

#[derive(Args, Debug)]
struct DenoteArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=MAX_RANK as i64))]
    rank: u8,
    #[arg(long, value_enum, default_value = "join")]
    variant: Variant,
    /// Environment file in JSON.
    #[arg(long, value_name = "FILE")]
    env: Option<String>,
    /// Print function tables as `{argument ↦ result}` index pairs.
    #[arg(long)]
    show_table: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    All,
    Theorems,
    Lemmas,
    Counterexamples,
    Equivalence,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Theorems => Suite::Theorems,
            SuiteArg::Lemmas => Suite::Lemmas,
            SuiteArg::Counterexamples => Suite::Counterexamples,
            SuiteArg::Equivalence => Suite::Equivalence,
        }
    }
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Cases per property.
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u64).range(1..))]
    cases: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=MAX_RANK as i64))]
    rank: u8,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,
    /// Worker threads; 0 uses every CPU. Reports do not depend on it.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    json: bool,
    /// Include wall-clock durations in the reports.
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct CounterexampleArgs {
    #[arg(long)]
    json: bool,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Output = Result<(String, i32), Failure>;

/// Runs the command line `argv` (program name first), writing to stdout and
/// stderr, and returns the exit code.
pub fn main(argv: Vec<String>) -> i32 {
    // Evaluation and denotation recurse along the expression and derivation.
    let worker = std::thread::Builder::new().stack_size(256 << 20).spawn(move || run(&argv));
    let (out, err, code) = match worker.map(|h| h.join()) {
        Ok(Ok(r)) => r,
        _ => (String::new(), "internal error\n".to_string(), 101),
    };
    let _ = std::io::stdout().write_all(out.as_bytes());
    let _ = std::io::stderr().write_all(err.as_bytes());
    code
}

/// Like [`main`], returning stdout, stderr and the exit code.
pub fn run(argv: &[String]) -> (String, String, i32) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (text, String::new(), 0) } else { (String::new(), text, 2) };
        }
    };
    let mut warnings = Vec::new();
    let result = match cli.command {
        Command::Eval(a) => eval(a, &mut warnings),
        Command::Denote(a) => denote(a, &mut warnings),
        Command::Check(a) => check(a),
        Command::Counterexample(a) => counterexample(a),
    };
    let mut err = String::new();
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    match result {
        Ok((out, code)) => (out, err, code),
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            (String::new(), err, f.code)
        }
    }
}

fn read_input(a: &InputArgs, warnings: &mut Vec<String>) -> Result<(Heap, Expr), Failure> {
    let e = if a.strict {
        parse(&a.expr).map_err(|e| usage(format!("expression: {e}")))?
    } else {
        let (e, w) = parse_desugared(&a.expr).map_err(|e| usage(format!("expression: {e}")))?;
        warnings.extend(w);
        e
    };
    let heap = match &a.heap {
        None => Heap::new(),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
            let (heap, w) = Heap::parse_any(&text, !a.strict).map_err(|e| usage(format!("{path}: {e}")))?;
            warnings.extend(w);
            heap
        }
    };
    Ok((heap, e))
}

fn stuck(kind: &str, name: Option<&crate::syntax::Name>) -> String {
    match name {
        Some(x) => format!("{kind}: {x}"),
        None => kind.to_string(),
    }
}

fn show_nat_trace(t: &DerivTrace, depth: usize, out: &mut String) {
    let _ = writeln!(
        out,
        "{:indent$}{:?}  {} : {}  ⇓  {} : {}",
        "",
        t.rule,
        heap_print(&t.input.0),
        print(&t.input.1),
        heap_print(&t.output.0),
        print(&t.output.1.to_expr()),
        indent = 2 * depth
    );
    for c in &t.children {
        show_nat_trace(c, depth + 1, out);
    }
}

fn show_stack_trace(t: &StackTrace, depth: usize, out: &mut String) {
    let frames = |s: &crate::stacked::Stack| {
        let parts: Vec<String> = s.frames().map(|(x, e)| format!("{x} = {}", print(e))).collect();
        format!("[{}]", parts.join(", "))
    };
    let _ = writeln!(
        out,
        "{:indent$}{:?}  {} {}  ⇓  {} {}",
        "",
        t.rule,
        heap_print(&t.input.0),
        frames(&t.input.1),
        heap_print(&t.output.0),
        frames(&t.output.1),
        indent = 2 * depth
    );
    for c in &t.children {
        show_stack_trace(c, depth + 1, out);
    }
}

fn eval(a: EvalArgs, warnings: &mut Vec<String>) -> Output {
    let (heap, e) = read_input(&a.input, warnings)?;
    let avoid = NameSet::new();
    let (result, trace_json, trace_text) = match a.semantics {
        Semantics::Natural => {
            let r = eval_nat(&heap, &e, &avoid, a.fuel);
            let (tj, tt) = match &r {
                NatResult::Success { trace, .. } => {
                    let mut s = String::new();
                    show_nat_trace(trace, 0, &mut s);
                    (Some(trace.to_json()), s)
                }
                _ => (None, String::new()),
            };
            (r, tj, tt)
        }
        Semantics::Stacked => {
            let r = run_via_stack_traced(&heap, &e, &avoid, a.fuel);
            match r {
                StackResult::Success { heap: h, stack, trace } => {
                    let mut s = String::new();
                    show_stack_trace(&trace, 0, &mut s);
                    let (_, top) = stack.top().expect("result frame");
                    let value = crate::syntax::SynValue::from_expr(top).expect("value");
                    let nat = NatResult::Success { heap: h, value, trace: crate::stacked::to_natural(&trace) };
                    (nat, Some(trace.to_json()), s)
                }
                StackResult::Diverged => (NatResult::Diverged, None, String::new()),
                StackResult::Blackhole(x) => (NatResult::Blackhole(x), None, String::new()),
                StackResult::UnboundVar(x) => (NatResult::UnboundVar(x), None, String::new()),
            }
        }
    };
    let (code, status) = match &result {
        NatResult::Success { .. } => (0, None),
        NatResult::Diverged => (1, Some(stuck("diverged (out of fuel)", None))),
        NatResult::Blackhole(x) => (1, Some(stuck("blackhole", Some(x)))),
        NatResult::UnboundVar(x) => (1, Some(stuck("unbound variable", Some(x)))),
    };
    if a.input.json {
        let mut v = json!({ "outcome": result.kind() });
        match &result {
            NatResult::Success { heap, value, trace } => {
                v["heap"] = serde_json::to_value(heap.to_file()).expect("serializable");
                v["value"] = json!(print(&value.to_expr()));
                v["steps"] = json!(trace.size());
            }
            NatResult::Blackhole(x) | NatResult::UnboundVar(x) => v["name"] = json!(x.to_string()),
            NatResult::Diverged => {}
        }
        if a.trace {
            v["trace"] = trace_json.unwrap_or(Value::Null);
        }
        return Ok((format!("{}\n", serde_json::to_string_pretty(&v).expect("json")), code));
    }
    match (&result, status) {
        (NatResult::Success { heap, value, .. }, _) => {
            let mut out = String::new();
            if a.trace {
                out.push_str(&trace_text);
            }
            let _ = writeln!(out, "{} : {}", heap_print(heap), print(&value.to_expr()));
            Ok((out, 0))
        }
        (_, Some(s)) => Err(Failure { code, message: s }),
        _ => unreachable!(),
    }
}

fn show_elem(u: DomElem, table: bool) -> String {
    if table {
        show_table(u)
    } else {
        format!("{u:?}")
    }
}

fn denote(a: DenoteArgs, warnings: &mut Vec<String>) -> Output {
    let (heap, e) = read_input(&a.input, warnings)?;
    let variant = HeapVariant::from(a.variant);
    let env = match &a.env {
        None => Env::bot(a.rank),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{path}: {e}")))?;
            let env = Env::from_json(&v).map_err(|e| usage(format!("{path}: {e}")))?;
            if env.rank() != a.rank {
                return Err(usage(format!("{path}: environment has rank {}, expected {}", env.rank(), a.rank)));
            }
            env
        }
    };
    let failed = |e: crate::domain::DomainError| Failure { code: 1, message: e.to_string() };
    let heap_env = if heap.is_empty() { env.clone() } else { den_heap(&heap, &env, a.rank, variant).map_err(failed)? };
    let value = den_expr(&e, &heap_env, a.rank, variant).map_err(failed)?;
    if a.input.json {
        let mut v = json!({ "rank": a.rank, "variant": variant, "value": value.to_json() });
        if !heap.is_empty() {
            v["heap"] = heap_env.to_json();
        }
        if a.show_table {
            v["table"] = json!(show_table(value));
        }
        return Ok((format!("{}\n", serde_json::to_string_pretty(&v).expect("json")), 0));
    }
    let mut out = String::new();
    if !heap.is_empty() {
        for (x, _) in heap.iter() {
            let _ = writeln!(out, "{x} ↦ {}", show_elem(heap_env.get(x), a.show_table));
        }
    }
    let _ = writeln!(out, "{}", show_elem(value, a.show_table));
    Ok((out, 0))
}

fn check(a: CheckArgs) -> Output {
    let cfg = GenConfig { seed: a.seed, rank: a.rank, fuel: a.fuel, cases: a.cases, ..GenConfig::default() };
    cfg.validate().map_err(usage)?;
    let opts = RunOptions { jobs: a.jobs, timings: a.timings };
    let reports = verifier::run_suite(a.suite.into(), &cfg, opts);
    let ok = reports.iter().all(|r| r.ok());
    let code = if ok { 0 } else { 1 };
    if a.json {
        let v = json!({
            "seed": cfg.seed,
            "rank": cfg.rank,
            "cases": cfg.cases,
            "fuel": cfg.fuel,
            "all_passed": ok,
            "reports": reports,
        });
        return Ok((format!("{}\n", serde_json::to_string_pretty(&v).expect("json")), code));
    }
    let mut out = String::new();
    for r in &reports {
        let _ = writeln!(out, "{r}");
    }
    let failing = reports.iter().filter(|r| !r.ok()).count();
    let inconclusive: u64 = reports.iter().map(|r| r.inconclusive).sum();
    if ok {
        let _ = writeln!(out, "all {} properties passed ({inconclusive} inconclusive cases)", reports.len());
    } else {
        let _ = writeln!(out, "{failing} of {} properties failed", reports.len());
    }
    Ok((out, code))
}

fn counterexample(a: CounterexampleArgs) -> Output {
    let summary = counterexample_summary().map_err(|e| Failure { code: 1, message: e.to_string() })?;
    let report = check_counterexample();
    let code = if report.ok() { 0 } else { 1 };
    if a.json {
        let v = serde_json::to_value(&summary).expect("json");
        return Ok((format!("{}\n", serde_json::to_string_pretty(&v).expect("json")), code));
    }
    let mut out = format!("{summary}\n");
    if !report.ok() {
        let _ = writeln!(out, "{report}");
    }
    Ok((out, code))
}
