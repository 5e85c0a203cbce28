use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use klein_tqft::characters::{CharacterTable, TABLE_FORMAT_VERSION};
use klein_tqft::combinatorics::{check_degree, DEFAULT_MAX_DEGREE};
use klein_tqft::dsl::{self, Evaluated};
use klein_tqft::gv::{default_hmax, gv_verify, BpsTable, MAX_GV_DEGREE};
use klein_tqft::ring::Scalar;
use klein_tqft::suites;
use klein_tqft::tqft::{Basis, Context, TqftOperator, DEFAULT_ORDER};
use klein_tqft::{Error, Partition};

const EXIT_VERIFY: u8 = 2;
const EXIT_ARGUMENT: u8 = 3;
const EXIT_TRUNCATION: u8 = 4;

#[derive(Parser)]
#[command(name = "ktqft", version, about = "Exact local real Gromov–Witten invariants of curves")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Character-table cache directory (default: $KTQFT_CACHE_DIR, else <user cache>/.ktqft).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed, doublet or relative invariant.
    Invariant(InvariantArgs),
    /// BPS tables and integrality checks.
    Gv(GvArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Evaluate a cobordism expression.
    Eval(EvalArgs),
    /// Print the character table of S_d.
    Chars(CharsArgs),
}

#[derive(Args)]
struct InvariantArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    genus: u32,
    #[arg(long, allow_negative_numbers = true)]
    level: i64,
    /// Second level: compute the doublet invariant at (level, doublet).
    #[arg(long, allow_negative_numbers = true)]
    doublet: Option<i64>,
    /// Boundary profile, one partition per flag, e.g. `--boundary 2,1`.
    #[arg(long)]
    boundary: Vec<String>,
    #[arg(long)]
    u_order: Option<i64>,
    /// Reverse the orientation convention on real outputs.
    #[arg(long)]
    flip_orientation: bool,
}

#[derive(Args)]
struct GvArgs {
    #[arg(long)]
    genus: u32,
    #[arg(long)]
    dmax: usize,
    #[arg(long)]
    hmax: Option<i64>,
    #[arg(long, default_value_t = 0)]
    u_order: i64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    genus: u32,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    level: i64,
    #[arg(long, default_value_t = 8)]
    dmax: usize,
    #[arg(long, default_value_t = 20)]
    u_order: i64,
    /// Run per-degree suites for every degree up to `--d`.
    #[arg(long)]
    upto: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    expr: String,
    #[arg(long)]
    d: usize,
    /// `standard` or `idempotent`.
    #[arg(long, default_value = "idempotent")]
    basis: String,
    #[arg(long)]
    u_order: Option<i64>,
}

#[derive(Args)]
struct CharsArgs {
    #[arg(long)]
    d: usize,
}

/// Any failure, already mapped to its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Truncation(_) => EXIT_TRUNCATION,
            Error::Check(_) | Error::Extraction(_) => EXIT_VERIFY,
            Error::NotInvertible(_) => 1,
            _ => EXIT_ARGUMENT,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn argument(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_ARGUMENT, msg: msg.into() }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ARGUMENT } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY),
        Err(f) => {
            eprintln!("ktqft: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let cache = Cache::new(cli.cache_dir.clone());
    match &cli.cmd {
        Cmd::Invariant(a) => invariant(a, &cache, cli.json),
        Cmd::Gv(a) => gv(a, cli.json),
        Cmd::Verify(a) => verify(a, cli.json),
        Cmd::Eval(a) => eval(a, &cache, cli.json),
        Cmd::Chars(a) => chars(a, &cache, cli.json),
    }
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values always serialize"));
}

// ---- character-table cache ----------------------------------------------------

struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    fn new(flag: Option<PathBuf>) -> Cache {
        let dir = flag
            .or_else(|| std::env::var_os("KTQFT_CACHE_DIR").map(PathBuf::from))
            .or_else(|| dirs::cache_dir().map(|d| d.join(".ktqft")));
        Cache { dir }
    }

    fn path(dir: &Path, d: usize) -> PathBuf {
        dir.join(format!("chars-v{TABLE_FORMAT_VERSION}-d{d}.json"))
    }

    /// Cached table if present and well-formed; otherwise built and stored.
    /// An unwritable cache is not an error.
    fn table(&self, d: usize) -> Result<Arc<CharacterTable>, Failure> {
        check_degree(d, DEFAULT_MAX_DEGREE)?;
        if let Some(dir) = &self.dir {
            let path = Cache::path(dir, d);
            if let Ok(text) = fs::read_to_string(&path) {
                if let Some(t) = serde_json::from_str(&text).ok().and_then(|v| CharacterTable::from_json(&v).ok()) {
                    if t.degree() == d {
                        return Ok(Arc::new(t));
                    }
                }
            }
        }
        let t = CharacterTable::build(d, DEFAULT_MAX_DEGREE)?;
        if let Some(dir) = &self.dir {
            let text = serde_json::to_string(&t.to_json()).expect("json values always serialize");
            if fs::create_dir_all(dir).and_then(|_| fs::write(Cache::path(dir, d), text)).is_err() {
                eprintln!("ktqft: warning: could not write cache in {}", dir.display());
            }
        }
        Ok(Arc::new(t))
    }

    fn context(&self, d: usize, order: Option<i64>) -> Result<Context, Failure> {
        let order = order.unwrap_or(DEFAULT_ORDER);
        if order < 0 {
            return Err(argument("--u-order must be non-negative"));
        }
        Ok(Context::from_table(self.table(d)?, order))
    }
}

// ---- commands -------------------------------------------------------------------

fn invariant(a: &InvariantArgs, cache: &Cache, as_json: bool) -> Outcome {
    let boundary: Vec<Partition> = a
        .boundary
        .iter()
        .map(|b| b.parse::<Partition>())
        .collect::<Result<_, _>>()?;
    if let Some(p) = boundary.iter().find(|p| p.degree() != a.d) {
        return Err(argument(format!("boundary {p} is not a partition of {}", a.d)));
    }
    let ctx = cache.context(a.d, a.u_order)?.with_flipped_orientation(a.flip_orientation);
    let (g, k) = (a.genus, a.level);

    let (kind, formula, composition): (&str, Scalar, Option<Scalar>) = match (a.doublet, boundary.is_empty()) {
        (None, true) => ("closed", ctx.closed_invariant(g, k)?, Some(ctx.closed_invariant_composition(g, k)?)),
        (Some(k2), true) => (
            "doublet",
            ctx.doublet_invariant(g, k, k2)?,
            Some(ctx.doublet_invariant_composition(g, k, k2)?),
        ),
        (None, false) => ("relative", ctx.relative_invariant(g, k, &boundary)?, None),
        (Some(k2), false) => {
            let all = ctx.doublet_relative(g, k, k2, boundary.len())?;
            ("doublet-relative", all.get(&boundary).cloned().unwrap_or_default(), None)
        }
    };
    let equal = composition.as_ref().map(|c| c.agrees(&formula));

    if as_json {
        emit(&json!({
            "kind": kind,
            "d": a.d,
            "genus": g,
            "level": match a.doublet { Some(k2) => json!([k, k2]), None => json!(k) },
            "boundary": boundary.iter().map(|p| p.parts().to_vec()).collect::<Vec<_>>(),
            "u_order": ctx.order(),
            "flip_orientation": a.flip_orientation,
            "value": formula.to_json(),
            "routes": {
                "formula": formula.to_json(),
                "composition": composition.as_ref().map(Scalar::to_json),
                "equal": equal,
            },
        }));
    } else {
        println!("{formula}");
        match equal {
            Some(true) => eprintln!("closed formula and operator composition agree"),
            Some(false) => eprintln!("MISMATCH: operator composition gives {}", composition.unwrap()),
            None => {}
        }
    }
    Ok(equal != Some(false))
}

fn table_text(t: &BpsTable) -> String {
    let mut out = String::new();
    for d in 1..=t.dmax {
        let row: Vec<String> = t.degree(d).iter().map(|(h, n)| format!("h={h}: {n}")).collect();
        out += &format!("  d={d}: {}\n", if row.is_empty() { "-".to_string() } else { row.join(", ") });
    }
    out
}

fn gv(a: &GvArgs, as_json: bool) -> Outcome {
    if a.dmax == 0 || a.dmax > MAX_GV_DEGREE {
        return Err(argument(format!("--dmax must be in 1..={MAX_GV_DEGREE}")));
    }
    let hmax = a.hmax.unwrap_or_else(|| default_hmax(a.genus, a.dmax));
    if hmax < 0 {
        return Err(argument("--hmax must be non-negative"));
    }
    let out = gv_verify(a.genus, a.dmax, hmax, a.u_order)?;
    if as_json {
        emit(&out.to_json());
    } else {
        println!("genus {} real BPS states n^R_(d,h):", a.genus);
        print!("{}", table_text(&out.real));
        println!("genus {} complex BPS states n^C_(d,h):", a.genus);
        print!("{}", table_text(&out.complex));
        println!("real checks: {}", if out.real.report.pass() { "pass" } else { "FAIL" });
        println!("complex checks: {}", if out.complex.report.pass() { "pass" } else { "FAIL" });
        println!("doublet consistent: {}", out.doublet_consistent);
        if let Some(c) = out.closed_form {
            println!("closed form: {}", if c { "pass" } else { "FAIL" });
        }
        println!("{}", if out.pass() { "pass" } else { "FAIL" });
    }
    Ok(out.pass())
}

fn verify(a: &VerifyArgs, as_json: bool) -> Outcome {
    if !suites::SUITES.contains(&a.suite.as_str()) {
        return Err(argument(format!("unknown suite {:?}; expected one of {}", a.suite, suites::SUITES.join(", "))));
    }
    let rep = if a.upto {
        suites::run_upto(&a.suite, a.d, a.genus, a.level, a.dmax, a.u_order)?
    } else {
        suites::run(&a.suite, a.d, a.genus, a.level, a.dmax, a.u_order)?
    };
    if as_json {
        emit(&rep.to_json());
    } else {
        println!("{rep}");
    }
    Ok(rep.pass())
}

fn operator_json(ctx: &Context, op: &TqftOperator) -> Value {
    let label = |ix: &Vec<usize>| ix.iter().map(|&i| ctx.partitions()[i].parts().to_vec()).collect::<Vec<_>>();
    let (n_in, n_out) = op.arity();
    json!({
        "arity": [n_in, n_out],
        "basis": op.basis().to_string(),
        "entries": op.entries().iter().map(|((i, o), c)| json!({
            "in": label(i), "out": label(o), "c": c.to_json(),
        })).collect::<Vec<_>>(),
    })
}

fn eval(a: &EvalArgs, cache: &Cache, as_json: bool) -> Outcome {
    let basis: Basis = a.basis.parse()?;
    let expr = dsl::parse(&a.expr)?;
    let (n_in, n_out) = dsl::typecheck(&expr)?;
    let ctx = cache.context(a.d, a.u_order)?;
    let value = match basis {
        Basis::Idempotent => dsl::evaluate(&expr, &ctx)?,
        Basis::Standard => {
            let op = dsl::evaluate_operator(&expr, &ctx, Basis::Standard)?;
            match op.as_scalar() {
                Some(s) => Evaluated::Scalar(s),
                None => Evaluated::Operator(op),
            }
        }
    };
    match (value, as_json) {
        (Evaluated::Scalar(s), true) => emit(&json!({
            "expr": expr.to_string(), "d": a.d, "arity": [0, 0], "value": s.to_json(),
        })),
        (Evaluated::Scalar(s), false) => println!("{s}"),
        (Evaluated::Operator(op), true) => emit(&json!({
            "expr": expr.to_string(), "d": a.d, "operator": operator_json(&ctx, &op),
        })),
        (Evaluated::Operator(op), false) => {
            println!("{expr} : {n_in} → {n_out} ({} basis)", op.basis());
            let names = |ix: &Vec<usize>| {
                ix.iter().map(|&i| ctx.partitions()[i].to_string()).collect::<Vec<_>>().join("⊗")
            };
            for ((i, o), c) in op.entries() {
                println!("  {} ↦ {}: {c}", names(i), names(o));
            }
        }
    }
    Ok(true)
}

fn chars(a: &CharsArgs, cache: &Cache, as_json: bool) -> Outcome {
    let t = cache.table(a.d)?;
    if as_json {
        emit(&t.to_json());
        return Ok(true);
    }
    let labels: Vec<String> = t.partitions().iter().map(|p| p.to_string()).collect();
    let width = labels
        .iter()
        .map(|l| l.chars().count())
        .chain(t.rows().iter().flatten().map(|v| v.to_string().len()))
        .max()
        .unwrap_or(1);
    println!("{:>width$}  {}", "χ_ρ(α)", labels.iter().map(|l| format!("{l:>width$}")).collect::<Vec<_>>().join(" "));
    for (r, row) in t.rows().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
        println!("{:>width$}  {}", labels[r], cells.join(" "));
    }
    Ok(true)
}
