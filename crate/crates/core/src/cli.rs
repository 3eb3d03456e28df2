//! Command-line front end. Subcommands map one-to-one onto the library
//! modules; all heavy lifting stays there.
//!
//! Exit codes: 0 success, 1 runtime failure or failed verification claims,
//! 2 usage errors, 3 exceeded enumeration budget, 4 hypothesis violation
//! under `verify --strict`.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::codes::{
    self, BoundsTable, CodeReport, DefiningSet, EnumBudget, Layer, ReportOptions, Variant,
};
use crate::error::{Error, Result};
use crate::gf2n::{BinPoly, FieldCtx};
use crate::lfsr::LfsrSeq;
use crate::simplicial::{CoordSet, GenComplex};
use crate::verify::{self, Instance, SweepConfig};
use crate::weight_theory::{EtaSystem, MsgDecomp, WSpace};

#[derive(Parser, Debug)]
#[command(
    name = "simplicial-codes",
    version,
    about = "Linear codes over F_{2^n} from layered coordinate-subspace defining sets"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the omega-power coordinate table of F_{2^n}
    Field(FieldArgs),
    /// Print an LFSR sequence, its states, and annihilator verdicts
    Lfsr(LfsrArgs),
    /// Dump the eta bookkeeping matrices and per-message weight rows
    Theory(TheoryArgs),
    /// Build a code from a layered defining set and report on it
    #[command(subcommand)]
    Code(CodeCmd),
    /// Check predicted code parameters against brute-force reports
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum CodeCmd {
    /// The code over F_{2^n} itself
    Build(CodeArgs),
    /// Its binary expansion (same flags; implies --subfield)
    Subfield(CodeArgs),
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Field degree; uses the stock modulus when --poly is absent
    #[arg(long)]
    n: Option<usize>,
    /// Modulus, term form "x^3+x+1" or hex mask "0xB"
    #[arg(long)]
    poly: Option<String>,
    /// Highest power to tabulate; default 2^n-1 closes the cycle
    #[arg(long)]
    k: Option<usize>,
    /// Machine JSON instead of CSV
    #[arg(long)]
    json: bool,
    /// Output path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LfsrArgs {
    /// Characteristic polynomial of the recurrence
    #[arg(long)]
    poly: String,
    /// Initial terms a_0..a_{n-1} as a bit string, e.g. "100"
    #[arg(long)]
    init: String,
    /// How many terms to print; default 2^n-1
    #[arg(long)]
    len: Option<usize>,
    /// Extra polynomials to test for membership in their solution spaces
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Machine JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    poly: Option<String>,
    /// Ambient dimension
    #[arg(long)]
    m: usize,
    /// Layers as semicolon-separated coordinate lists, e.g. "1,2;2,3;3,4"
    #[arg(long = "L")]
    layers: String,
    /// Print the A_k and M_i matrices and the W tuples instead of the
    /// per-message CSV
    #[arg(long)]
    matrices: bool,
    /// Print each layer's members as a JSON list of bitmasks
    #[arg(long)]
    complex_json: bool,
    #[arg(long)]
    max_messages: Option<u64>,
    #[arg(long)]
    max_length: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CodeArgs {
    /// Field degree; must match --poly when both are given
    #[arg(long)]
    n: Option<usize>,
    /// Modulus, term form "x^3+x+1" or hex mask "0xB"
    #[arg(long)]
    poly: Option<String>,
    /// Ambient dimension
    #[arg(long)]
    m: usize,
    /// Layers as semicolon-separated coordinate lists, e.g. "1,2;2,3;3,4"
    #[arg(long = "L")]
    layers: String,
    /// Which side of the product to take: "dstar" or "dcomp"
    #[arg(long, default_value = "dstar")]
    variant: String,
    /// Expand to the binary subfield code
    #[arg(long)]
    subfield: bool,
    /// Best-known-distance table (CSV with header q,length,k,best_d)
    #[arg(long)]
    bounds: Option<PathBuf>,
    /// Write the JSON report here; a summary table still goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report to stdout instead of the table
    #[arg(long)]
    json: bool,
    /// Message-count budget override
    #[arg(long)]
    max_messages: Option<u64>,
    /// Code-length budget override
    #[arg(long)]
    max_length: Option<u64>,
    /// Skip the exhaustive support-cover minimality scan
    #[arg(long)]
    no_exhaustive: bool,
    /// Enumeration threads; 0 asks the OS
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Comma list of field degrees to sweep, e.g. "2,3"
    #[arg(long = "n")]
    ns: String,
    #[arg(long, default_value_t = 1)]
    m_min: usize,
    /// Upper end of the ambient-dimension sweep
    #[arg(long)]
    m_max: Option<usize>,
    /// Check exactly this layer tuple instead of sweeping (needs --m and a
    /// single --n)
    #[arg(long = "L")]
    layers: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    /// Modulus for single-instance mode; default is the stock one
    #[arg(long)]
    poly: Option<String>,
    /// Ledger CSV path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stop after this many instances
    #[arg(long)]
    max_instances: Option<usize>,
    /// Keep one representative per coordinate-relabeling orbit
    #[arg(long)]
    dedup_perm: bool,
    /// Fail (exit 4) when an instance satisfies no claim family
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    max_messages: Option<u64>,
    #[arg(long)]
    max_length: Option<u64>,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

/// Entry point for the binary; parses real process arguments.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::HypothesisViolation(_) => 4,
        Error::Parse(_) | Error::InvalidInput(_) | Error::ReduciblePolynomial(_) => 2,
        Error::Io(_) => 1,
    }
}

/// Dispatch; the Ok value is the process exit code (verification sweeps
/// report claim failures through it without treating them as errors).
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Field(a) => run_field(a).map(|()| 0),
        Command::Lfsr(a) => run_lfsr(a).map(|()| 0),
        Command::Theory(a) => run_theory(a).map(|()| 0),
        Command::Code(CodeCmd::Build(a)) => run_code(a).map(|()| 0),
        Command::Code(CodeCmd::Subfield(mut a)) => {
            a.subfield = true;
            run_code(a).map(|()| 0)
        }
        Command::Verify(a) => run_verify(a),
    }
}

fn resolve_modulus(n: Option<usize>, poly: Option<&str>) -> Result<BinPoly> {
    let p = match (n, poly) {
        (_, Some(s)) => s.parse::<BinPoly>()?,
        (Some(n), None) => verify::default_modulus(n)?,
        (None, None) => return Err(Error::invalid("need --n or --poly")),
    };
    if let Some(n) = n {
        if p.degree() != n {
            return Err(Error::invalid(format!(
                "--n {n} does not match degree {} of {p}",
                p.degree()
            )));
        }
    }
    Ok(p)
}

fn budget_from(max_messages: Option<u64>, max_length: Option<u64>) -> Result<EnumBudget> {
    // env first, explicit flags on top
    let mut b = EnumBudget::from_env()?;
    if let Some(v) = max_messages {
        b.max_messages = v;
    }
    if let Some(v) = max_length {
        b.max_length = v;
    }
    if b.max_messages == 0 || b.max_length == 0 {
        return Err(Error::invalid("budget limits must be positive"));
    }
    Ok(b)
}

fn parse_layer_sets(s: &str, n: usize, m: usize) -> Result<Vec<CoordSet>> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != n {
        return Err(Error::invalid(format!(
            "--L has {} layers, field degree needs {n}",
            parts.len()
        )));
    }
    parts.iter().map(|p| CoordSet::parse(p, m)).collect()
}

fn out_writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout()),
    })
}

fn run_field(a: FieldArgs) -> Result<()> {
    let modulus = resolve_modulus(a.n, a.poly.as_deref())?;
    let n = modulus.degree();
    let k = a.k.unwrap_or(((1usize << n) - 1).max(2 * n - 2));
    if k > 1 << 16 {
        return Err(Error::invalid(format!("table length {k} is unreasonable")));
    }
    let ctx = FieldCtx::with_table_len(modulus, k)?;
    let mut out = out_writer(a.out.as_deref())?;
    if a.json {
        let table: Vec<Vec<u64>> = ctx
            .power_table()
            .iter()
            .map(|&row| (0..n as u64).map(|i| (row >> i) & 1).collect())
            .collect();
        let doc = json!({
            "n": n,
            "modulus": modulus.to_string(),
            "q": ctx.q(),
            "primitive": ctx.is_primitive(),
            "omega_order": ctx.omega_order(),
            "table": table,
        });
        writeln!(out, "{doc}")?;
    } else {
        ctx.write_power_table_csv(&mut out)?;
    }
    Ok(())
}

fn run_lfsr(a: LfsrArgs) -> Result<()> {
    let poly: BinPoly = a.poly.parse()?;
    let n = poly.degree();
    if n == 0 {
        return Err(Error::invalid("constant polynomial has no recurrence"));
    }
    if a.init.len() != n {
        return Err(Error::invalid(format!(
            "--init needs exactly {n} bits, got {:?}",
            a.init
        )));
    }
    let mut init = 0u64;
    for (j, c) in a.init.chars().enumerate() {
        match c {
            '1' => init |= 1 << j,
            '0' => {}
            _ => return Err(Error::invalid(format!("--init must be bits, got {:?}", a.init))),
        }
    }
    let seq = LfsrSeq::new(poly, init)?;
    let len = a.len.unwrap_or((1 << n) - 1);
    if len > 1 << 20 {
        return Err(Error::invalid(format!("--len {len} is unreasonable")));
    }
    let prefix = seq.prefix(len);
    let states = seq.states_matrix();
    let minimal = seq.minimal_polynomial();
    let mut verdicts: Vec<(String, bool)> = Vec::new();
    for c in &a.checks {
        let g: BinPoly = c.parse()?;
        verdicts.push((g.to_string(), seq.annihilated_by(g)));
    }
    if a.json {
        let doc = json!({
            "charpoly": poly.to_string(),
            "init": a.init,
            "prefix": prefix,
            "states": states.row_strings(),
            "states_full_rank": seq.states_full_rank(),
            "minimal_polynomial": minimal.to_string(),
            "checks": verdicts
                .iter()
                .map(|(p, ok)| json!({"poly": p, "member": ok}))
                .collect::<Vec<_>>(),
        });
        println!("{doc}");
        return Ok(());
    }
    println!("{prefix}");
    println!("states:");
    for row in states.row_strings() {
        println!("  {row}");
    }
    println!("minimal polynomial: {minimal}");
    println!("states full rank: {}", seq.states_full_rank());
    for (p, ok) in &verdicts {
        println!(
            "check {p}: {}",
            if *ok { "member" } else { "not a member" }
        );
    }
    Ok(())
}

fn run_theory(a: TheoryArgs) -> Result<()> {
    let modulus = resolve_modulus(a.n, a.poly.as_deref())?;
    let ctx = FieldCtx::new(modulus)?;
    let n = ctx.n();
    let m = a.m;
    let sets = parse_layer_sets(&a.layers, n, m)?;
    let mut out = out_writer(a.out.as_deref())?;

    if a.complex_json {
        let members: Vec<Vec<u64>> = sets
            .iter()
            .map(|&s| GenComplex::new(s).members().iter().map(|v| v.bits()).collect())
            .collect();
        writeln!(out, "{}", json!(members))?;
        return Ok(());
    }

    let es = EtaSystem::new(&ctx);
    let ws = WSpace::new(&es);

    if a.matrices {
        for (k, mat) in es.a_mats().iter().enumerate() {
            writeln!(out, "A_{k}:")?;
            for row in mat.row_strings() {
                writeln!(out, "  {row}")?;
            }
        }
        for (i, mat) in es.m_mats().iter().enumerate() {
            writeln!(out, "M_{i}:")?;
            for row in mat.row_strings() {
                writeln!(out, "  {row}")?;
            }
        }
        writeln!(out, "W:")?;
        for s in 0..ws.len() {
            let parts: Vec<String> = ws.tuple(s).iter().map(|t| t.to_string()).collect();
            writeln!(out, "  {}", parts.join(","))?;
        }
        writeln!(out, "all nonzero M combinations invertible: {}", es.all_combinations_invertible())?;
        return Ok(());
    }

    let budget = budget_from(a.max_messages, a.max_length)?;
    budget.check_messages(1u128 << (n * m))?;
    let layer_vec: Vec<Layer> = sets.iter().map(|&s| Layer::Generated(GenComplex::new(s))).collect();
    let member_vecs: Vec<Vec<crate::simplicial::Vec2m>> =
        sets.iter().map(|&s| GenComplex::new(s).members()).collect();
    let ds = DefiningSet::build(&ctx, m, &layer_vec, Variant::DStar, &budget)?;

    let mut w = csv::Writer::from_writer(out);
    w.write_record(["message", "theta", "formula_weight", "oracle_weight"])
        .map_err(|e| Error::parse(e.to_string()))?;
    let coord_mask = (1u64 << m) - 1;
    for key in 0..(1u64 << (n * m)) {
        let alphas: Vec<crate::simplicial::Vec2m> = (0..n)
            .map(|i| crate::simplicial::Vec2m::new((key >> (i * m)) & coord_mask, m))
            .collect::<Result<_>>()?;
        let msg = MsgDecomp::new(alphas)?;
        let th = crate::weight_theory::theta(&ws, &msg, &sets)?;
        let formula = crate::weight_theory::cd_star_weight(&ws, &msg, &member_vecs)?;
        let v = msg.to_message(&ctx)?;
        let oracle = codes::encode(&ds, &v)?.weight();
        w.write_record([
            key.to_string(),
            th.to_string(),
            formula.to_string(),
            oracle.to_string(),
        ])
        .map_err(|e| Error::parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn report_table(r: &CodeReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("[{},{},{}] over F_{}\n", r.length, r.k, r.d, r.q));
    s.push_str("weights:\n");
    for (w, c) in &r.weights {
        s.push_str(&format!("  w={w}: {c}\n"));
    }
    s.push_str(&format!(
        "griesmer_sum={} is_griesmer={} distance_optimal={}\n",
        r.griesmer_sum,
        r.is_griesmer,
        match r.distance_optimal {
            Some(b) => b.to_string(),
            None => "unknown".into(),
        }
    ));
    s.push_str(&format!(
        "ab_ratio={:.6} ab_minimal={} exhaustive_minimal={}\n",
        r.ab_ratio,
        r.ab_minimal,
        match r.exhaustive_minimal {
            Some(b) => b.to_string(),
            None => "skipped".into(),
        }
    ));
    s
}

fn run_code(a: CodeArgs) -> Result<()> {
    let modulus = resolve_modulus(a.n, a.poly.as_deref())?;
    let ctx = FieldCtx::new(modulus)?;
    let n = ctx.n();
    let variant: Variant = a.variant.parse()?;
    let sets = parse_layer_sets(&a.layers, n, a.m)?;
    let layer_vec: Vec<Layer> = sets.iter().map(|&s| Layer::Generated(GenComplex::new(s))).collect();
    let budget = budget_from(a.max_messages, a.max_length)?;
    let mut opts = ReportOptions::new();
    opts.budget = budget;
    opts.check_exhaustive_minimal = !a.no_exhaustive;
    opts.workers = a.workers;
    if let Some(p) = &a.bounds {
        opts.bounds = Some(BoundsTable::from_path(p)?);
    }

    let report = if a.subfield {
        let ds = DefiningSet::build(&ctx, a.m, &layer_vec, Variant::DStar, &budget)?;
        let ss = codes::subfield_expand(&ds);
        codes::subfield_report(&ss, variant, &opts)?
    } else {
        let ds = DefiningSet::build(&ctx, a.m, &layer_vec, variant, &budget)?;
        codes::code_report(&ds, &opts)?
    };

    let doc = serde_json::to_string(&report).map_err(|e| Error::parse(e.to_string()))?;
    match (&a.out, a.json) {
        (Some(p), _) => {
            let mut f = File::create(p)?;
            writeln!(f, "{doc}")?;
            if a.json {
                println!("{doc}");
            } else {
                print!("{}", report_table(&report));
            }
        }
        (None, true) => println!("{doc}"),
        (None, false) => print!("{}", report_table(&report)),
    }
    Ok(())
}

fn parse_ns(s: &str) -> Result<Vec<usize>> {
    let mut ns = Vec::new();
    for part in s.split(',') {
        let v: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad degree {part:?} in --n")))?;
        ns.push(v);
    }
    if ns.is_empty() {
        return Err(Error::invalid("--n needs at least one degree"));
    }
    Ok(ns)
}

fn run_verify(a: VerifyArgs) -> Result<i32> {
    let ns = parse_ns(&a.ns)?;
    let budget = budget_from(a.max_messages, a.max_length)?;

    let rows = if let Some(layer_str) = &a.layers {
        if ns.len() != 1 {
            return Err(Error::invalid("single-instance mode takes exactly one --n"));
        }
        let m = a.m.ok_or_else(|| Error::invalid("single-instance mode needs --m"))?;
        let n = ns[0];
        let modulus = match &a.poly {
            Some(s) => s.parse::<BinPoly>()?,
            None => verify::default_modulus(n)?,
        };
        if modulus.degree() != n {
            return Err(Error::invalid(format!(
                "--n {n} does not match degree {} of {modulus}",
                modulus.degree()
            )));
        }
        let sets = parse_layer_sets(layer_str, n, m)?;
        let inst = Instance::new(modulus, m, sets)?;
        let rows = verify::verify_instance(&inst, &budget, a.workers)?;
        if a.strict && rows.is_empty() {
            return Err(Error::HypothesisViolation(format!(
                "no claim family covers n={n} m={m} L={layer_str}"
            )));
        }
        rows
    } else {
        let m_max = a
            .m_max
            .ok_or_else(|| Error::invalid("sweep mode needs --m-max"))?;
        if a.poly.is_some() {
            return Err(Error::invalid("--poly only applies to single-instance mode"));
        }
        let cfg = SweepConfig {
            ns,
            m_min: a.m_min,
            m_max,
            max_instances: a.max_instances,
            dedup_permutations: a.dedup_perm,
            budget,
            workers: a.workers,
        };
        let summary = verify::run_sweep(&cfg)?;
        if a.strict {
            // sweeps only enumerate nonempty layers, so every instance
            // asserts at least the binary one-weight family; this guards
            // future enumeration changes
            let claims = summary.rows.len();
            if summary.instances > 0 && claims == 0 {
                return Err(Error::HypothesisViolation(
                    "sweep produced instances but no claims".into(),
                ));
            }
        }
        eprintln!(
            "instances={} claims={} failed={}",
            summary.instances,
            summary.rows.len(),
            summary.failed
        );
        summary.rows
    };

    let out = out_writer(a.out.as_deref())?;
    verify::write_ledger_csv(&rows, out)?;
    Ok(if rows.iter().any(|r| !r.pass) { 1 } else { 0 })
}
