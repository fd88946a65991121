//! Command-line front end. Exit codes: 0 when every query pair is related
//! (or a check holds), 1 when some pair is refuted (or a check fails), 2 on
//! usage, parse or validation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bisim::{
    bde_quotient, check_bde, check_fde, fde_quotient, find_bdb_with, find_fdb_with, gfp_bdb, BdbOptions, BisimResult,
    FdbOptions,
};
use crate::modelio::{
    crn_to_ctmc, default_state_cap, extend_params, parse_pairs, parse_population, parse_var_list,
    product_minus_identity, write_crn, write_ctmc, write_ode, ModelBundle, ParseError, Provenance,
};
use crate::poly::{PolyVectorField, Universe, Var};
use crate::relation::{Partition, Relation, UpTo};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "diffbisim", version, about = "Differential bisimulations of polynomial ODEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Local backward differential bisimulation around a query.
    Bdb(BdbArgs),
    /// Local forward differential bisimulation around a query.
    Fdb(FdbArgs),
    /// Check whether the equivalence closure of the pairs is a BDE.
    CheckBde(RelArgs),
    /// Check whether the equivalence closure of the pairs is an FDE.
    CheckFde(RelArgs),
    /// BDE quotient by the equivalence closure of the pairs.
    ReduceBde(RelArgs),
    /// FDE quotient by the equivalence closure of the pairs.
    ReduceFde(RelArgs),
    /// Population CTMC of a CRN.
    Crn2ctmc(CtmcArgs),
    /// Turn every rate constant of a CRN into a parameter species.
    ExtendParams(ExtendArgs),
    /// Disjoint union of two models.
    Union(UnionArgs),
    /// Largest (constrained) BDB by global fixpoint iteration.
    GfpBdb(GfpArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct QueryArgs {
    /// Inline pairs, `a,b; c,d`.
    #[arg(long)]
    query: Option<String>,
    /// File with one `a, b` pair per line.
    #[arg(long)]
    query_file: Option<PathBuf>,
    /// Comma-separated variables; the query is their product minus the identity.
    #[arg(long)]
    query_product: Option<String>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Report wall-clock time as well.
    #[arg(long)]
    stats: bool,
}

#[derive(Args, Debug)]
struct ConstraintArgs {
    /// File with forbidden pairs, one `a, b` per line.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Inline forbidden pairs, `a,b; c,d`.
    #[arg(long)]
    constraint_pairs: Option<String>,
    /// Comma-separated variables; forbids their product minus the identity.
    #[arg(long)]
    constraints_product: Option<String>,
}

#[derive(Args, Debug)]
struct BdbArgs {
    model: PathBuf,
    #[command(flatten)]
    query: QueryArgs,
    #[command(flatten)]
    constraints: ConstraintArgs,
    /// identity, reflexive, symmetric, refl-sym, transitive or equiv.
    #[arg(long, default_value = "identity")]
    upto: UpTo,
    /// Evaluate each sweep concurrently (deterministic).
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct FdbArgs {
    model: PathBuf,
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long, default_value = "identity")]
    upto: UpTo,
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct RelArgs {
    model: PathBuf,
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Write the result here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CtmcArgs {
    model: PathBuf,
    /// Initial population, e.g. `x0=2, x2=1`; absent species are 0.
    #[arg(long)]
    init: String,
    /// Name of the initial state.
    #[arg(long)]
    init_name: Option<String>,
    /// Maximum number of states (default from the environment or 1000000).
    #[arg(long)]
    state_cap: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Print state and transition counts to standard error.
    #[arg(long)]
    stats: bool,
}

#[derive(Args, Debug)]
struct ExtendArgs {
    model: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct UnionArgs {
    left: PathBuf,
    right: PathBuf,
    /// Name prefixes for the two models, `left,right`.
    #[arg(long)]
    prefixes: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GfpArgs {
    model: PathBuf,
    #[command(flatten)]
    query: QueryArgs,
    #[command(flatten)]
    constraints: ConstraintArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

struct Failure(String);

impl From<crate::modelio::ModelError> for Failure {
    fn from(e: crate::modelio::ModelError) -> Self {
        Failure(e.to_string())
    }
}

impl From<crate::bisim::BisimError> for Failure {
    fn from(e: crate::bisim::BisimError) -> Self {
        Failure(e.to_string())
    }
}

fn located(source: &str, e: ParseError) -> Failure {
    Failure(format!("{source}:{e}"))
}

type Outcome = Result<i32, Failure>;

/// Runs the tool on `argv` (including the program name).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Bdb(a) => cmd_bdb(a, out),
        Command::Fdb(a) => cmd_fdb(a, out),
        Command::CheckBde(a) => cmd_check(a, false, out),
        Command::CheckFde(a) => cmd_check(a, true, out),
        Command::ReduceBde(a) => cmd_reduce(a, false, out),
        Command::ReduceFde(a) => cmd_reduce(a, true, out),
        Command::Crn2ctmc(a) => cmd_crn2ctmc(a, out, err),
        Command::ExtendParams(a) => cmd_extend(a, out),
        Command::Union(a) => cmd_union(a, out),
        Command::GfpBdb(a) => cmd_gfp(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn load(path: &Path) -> Result<ModelBundle, Failure> {
    Ok(ModelBundle::load(path)?)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn pairs_from(
    universe: &Universe,
    inline: &Option<String>,
    inline_flag: &str,
    file: &Option<PathBuf>,
    product: &Option<String>,
    product_flag: &str,
) -> Result<Relation<Var>, Failure> {
    let mut rel = Relation::new();
    if let Some(text) = inline {
        rel = rel.union(&parse_pairs(text, universe).map_err(|e| located(inline_flag, e))?);
    }
    if let Some(path) = file {
        let text = read(path)?;
        let shown = path.display().to_string();
        rel = rel.union(&parse_pairs(&text, universe).map_err(|e| located(&shown, e))?);
    }
    if let Some(text) = product {
        let vars = parse_var_list(text, universe).map_err(|e| located(product_flag, e))?;
        rel = rel.union(&product_minus_identity(&vars));
    }
    Ok(rel)
}

fn query_of(universe: &Universe, q: &QueryArgs) -> Result<Relation<Var>, Failure> {
    pairs_from(
        universe,
        &q.query,
        "--query",
        &q.query_file,
        &q.query_product,
        "--query-product",
    )
}

fn constraints_of(universe: &Universe, c: &ConstraintArgs) -> Result<Relation<Var>, Failure> {
    pairs_from(
        universe,
        &c.constraint_pairs,
        "--constraint-pairs",
        &c.constraints,
        &c.constraints_product,
        "--constraints-product",
    )
}

fn require_query(q: &Relation<Var>) -> Result<(), Failure> {
    if q.is_empty() {
        return Err(Failure(
            "empty query; pass --query, --query-file or --query-product".to_string(),
        ));
    }
    Ok(())
}

fn pair_json(u: &Universe, (a, b): (Var, Var)) -> Value {
    json!([u.name(a), u.name(b)])
}

fn relation_json(u: &Universe, r: &Relation<Var>) -> Value {
    Value::Array(r.iter().map(|&p| pair_json(u, p)).collect())
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure(e.to_string()))
}

fn emit_to(path: &Option<PathBuf>, out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => emit(out, text),
    }
}

fn report(
    command: &str,
    f: &PolyVectorField,
    query: &Relation<Var>,
    res: &BisimResult,
    output: &OutputArgs,
    out: &mut dyn Write,
) -> Outcome {
    let u = f.universe();
    let all = query.iter().all(|&(a, b)| res.answer(a, b));
    let text = match output.format {
        OutputFormat::Json => {
            let answers: Vec<Value> = query
                .iter()
                .map(|&(a, b)| json!({ "pair": pair_json(u, (a, b)), "related": res.answer(a, b) }))
                .collect();
            let mut stats = json!({
                "transportProblems": res.stats.transport_problems,
                "iterations": res.stats.iterations,
            });
            if output.stats {
                stats["wallTimeMs"] = json!(res.stats.wall_time.as_secs_f64() * 1e3);
            }
            let doc = json!({
                "formatVersion": FORMAT_VERSION,
                "command": command,
                "queryAnswers": answers,
                "related": relation_json(u, &res.related),
                "refuted": relation_json(u, &res.refuted),
                "stats": stats,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json values serialize"))
        }
        OutputFormat::Text => {
            let mut s = format!(
                "related: {}\nrefuted: {}\n",
                res.related.display(u),
                res.refuted.display(u)
            );
            for &(a, b) in query.iter() {
                let verdict = if res.answer(a, b) { "yes" } else { "no" };
                s += &format!("query ({}, {}): {verdict}\n", u.name(a), u.name(b));
            }
            s += &format!(
                "transport problems: {}\niterations: {}\n",
                res.stats.transport_problems, res.stats.iterations
            );
            if output.stats {
                s += &format!("wall time: {:.3} ms\n", res.stats.wall_time.as_secs_f64() * 1e3);
            }
            s
        }
    };
    emit(out, &text)?;
    Ok(if all { 0 } else { 1 })
}

fn cmd_bdb(a: BdbArgs, out: &mut dyn Write) -> Outcome {
    let model = load(&a.model)?;
    let f = &model.field;
    let query = query_of(f.universe(), &a.query)?;
    require_query(&query)?;
    let constraints = constraints_of(f.universe(), &a.constraints)?;
    let opts = BdbOptions {
        up_to: a.upto,
        parallel: a.parallel,
    };
    let res = find_bdb_with(f, &query, &constraints, opts, &mut |_| {})?;
    report("bdb", f, &query, &res, &a.output, out)
}

fn cmd_fdb(a: FdbArgs, out: &mut dyn Write) -> Outcome {
    let model = load(&a.model)?;
    let f = &model.field;
    let query = query_of(f.universe(), &a.query)?;
    require_query(&query)?;
    let opts = FdbOptions {
        up_to: a.upto,
        parallel: a.parallel,
    };
    let res = find_fdb_with(f, &query, opts, &mut |_| {})?;
    report("fdb", f, &query, &res, &a.output, out)
}

fn equivalence_of(f: &PolyVectorField, q: &QueryArgs) -> Result<Relation<Var>, Failure> {
    let pairs = query_of(f.universe(), q)?;
    let vars: Vec<Var> = f.vars().collect();
    Ok(pairs.equivalence_closure(&vars))
}

fn partition_json(u: &Universe, p: &Partition) -> Value {
    Value::Array(
        p.blocks()
            .iter()
            .map(|b| Value::Array(b.iter().map(|&x| json!(u.name(x))).collect()))
            .collect(),
    )
}

fn cmd_check(a: RelArgs, forward: bool, out: &mut dyn Write) -> Outcome {
    let model = load(&a.model)?;
    let f = &model.field;
    let e = equivalence_of(f, &a.query)?;
    let holds = if forward { check_fde(f, &e)? } else { check_bde(f, &e)? };
    let p = Partition::from_relation(f.universe(), &e);
    let kind = if forward { "FDE" } else { "BDE" };
    let text = match a.format {
        OutputFormat::Json => {
            let doc = json!({
                "formatVersion": FORMAT_VERSION,
                "command": if forward { "check-fde" } else { "check-bde" },
                "partition": partition_json(f.universe(), &p),
                "holds": holds,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json values serialize"))
        }
        OutputFormat::Text => format!(
            "partition: {}\n{kind}: {}\n",
            p.display(f.universe()),
            if holds { "yes" } else { "no" }
        ),
    };
    emit_to(&a.output, out, &text)?;
    Ok(if holds { 0 } else { 1 })
}

fn cmd_reduce(a: RelArgs, forward: bool, out: &mut dyn Write) -> Outcome {
    let model = load(&a.model)?;
    let f = &model.field;
    let e = equivalence_of(f, &a.query)?;
    let reduced = if forward { fde_quotient(f, &e)? } else { bde_quotient(f, &e)? };
    let p = Partition::from_relation(f.universe(), &e);
    let text = match a.format {
        OutputFormat::Json => {
            let blocks: serde_json::Map<String, Value> = p
                .blocks()
                .iter()
                .enumerate()
                .map(|(k, b)| {
                    let names: Vec<Value> = b.iter().map(|&x| json!(f.name(x))).collect();
                    (reduced.name(Var::new(k)).to_string(), Value::Array(names))
                })
                .collect();
            let doc = json!({
                "formatVersion": FORMAT_VERSION,
                "command": if forward { "reduce-fde" } else { "reduce-bde" },
                "blocks": blocks,
                "field": write_ode(&reduced),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json values serialize"))
        }
        OutputFormat::Text => {
            let mut s = String::new();
            for (k, b) in p.blocks().iter().enumerate() {
                let names: Vec<&str> = b.iter().map(|&x| f.name(x)).collect();
                s += &format!("# {} = {{{}}}\n", reduced.name(Var::new(k)), names.join(", "));
            }
            s + &write_ode(&reduced)
        }
    };
    emit_to(&a.output, out, &text)?;
    Ok(0)
}

fn crn_of(model: ModelBundle, path: &Path) -> Result<crate::modelio::Crn, Failure> {
    match model.provenance {
        Provenance::Crn(crn) => Ok(crn),
        _ => Err(Failure(format!("{}: expected a .crn model", path.display()))),
    }
}

fn cmd_crn2ctmc(a: CtmcArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let crn = crn_of(load(&a.model)?, &a.model)?;
    let pop = parse_population(&a.init, &crn).map_err(|e| located("--init", e))?;
    let cap = a.state_cap.unwrap_or_else(default_state_cap);
    let start = Instant::now();
    let ctmc = crn_to_ctmc(&crn, &pop, a.init_name.as_deref(), cap)?;
    if a.stats {
        let _ = writeln!(
            err,
            "states: {}, transitions: {}, wall time: {:.3} ms",
            ctmc.num_states(),
            ctmc.num_transitions(),
            start.elapsed().as_secs_f64() * 1e3
        );
    }
    emit_to(&a.output, out, &write_ctmc(&ctmc))?;
    Ok(0)
}

fn cmd_extend(a: ExtendArgs, out: &mut dyn Write) -> Outcome {
    let crn = crn_of(load(&a.model)?, &a.model)?;
    emit_to(&a.output, out, &write_crn(&extend_params(&crn)))?;
    Ok(0)
}

fn cmd_union(a: UnionArgs, out: &mut dyn Write) -> Outcome {
    let left = load(&a.left)?;
    let right = load(&a.right)?;
    let (pl, pr) = match &a.prefixes {
        None => (String::new(), String::new()),
        Some(s) => match s.split_once(',') {
            Some((l, r)) => (l.trim().to_string(), r.trim().to_string()),
            None => return Err(Failure("--prefixes expects `left,right`".to_string())),
        },
    };
    let joined = left.union(&right, (&pl, &pr))?;
    let text = match &joined.provenance {
        Provenance::Ctmc(m) if a.output.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "ctmc")) => {
            write_ctmc(m)
        }
        _ => write_ode(&joined.field),
    };
    emit_to(&a.output, out, &text)?;
    Ok(0)
}

fn cmd_gfp(a: GfpArgs, out: &mut dyn Write) -> Outcome {
    let model = load(&a.model)?;
    let f = &model.field;
    let u = f.universe();
    let query = query_of(u, &a.query)?;
    let constraints = constraints_of(u, &a.constraints)?;
    let gfp = gfp_bdb(f, &constraints);
    let all = query.iter().all(|&(x, y)| gfp.contains(&x, &y));
    let p = Partition::from_relation(u, &gfp);
    let text = match a.format {
        OutputFormat::Json => {
            let answers: Vec<Value> = query
                .iter()
                .map(|&(x, y)| json!({ "pair": pair_json(u, (x, y)), "related": gfp.contains(&x, &y) }))
                .collect();
            let doc = json!({
                "formatVersion": FORMAT_VERSION,
                "command": "gfp-bdb",
                "queryAnswers": answers,
                "related": relation_json(u, &gfp),
                "partition": partition_json(u, &p),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json values serialize"))
        }
        OutputFormat::Text => {
            let mut s = format!("pairs: {}\npartition: {}\n", gfp.len(), p.display(u));
            for &(x, y) in query.iter() {
                let verdict = if gfp.contains(&x, &y) { "yes" } else { "no" };
                s += &format!("query ({}, {}): {verdict}\n", u.name(x), u.name(y));
            }
            s
        }
    };
    emit(out, &text)?;
    Ok(if all { 0 } else { 1 })
}
