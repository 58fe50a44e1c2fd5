//! `arboreal` — command-line front end for the verification toolkit.
//!
//! Exit codes: 0 on success, 1 when a verification fails or an internal
//! integrity check trips, 2 for usage and domain errors.

use arboreal::error::Error;
use arboreal::parity::{self, TruncatedResidue};
use arboreal::pink;
use arboreal::preimage::{
    build_preimage_tree, find_pcf_parameters, smallest_base_point, PcfParameter,
};
use arboreal::squares::{check_aut_tn, check_condition_one, ConditionVerdict};
use arboreal::suite::{self, Profile, SuiteOptions};
use arboreal::tree::{NodeAddress, TreeAutomorphism};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "arboreal",
    version,
    about = "Verifiable arboreal Galois data for post-critically finite quadratic maps",
    after_help = "The ARBOR_THREADS environment variable bounds worker threads; \
the current implementation is single-threaded, so any value >= 1 is accepted."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format (csv applies to `orders` only)
    #[arg(long, global = true, value_enum, default_value_t = Format::Tty)]
    format: Format,
    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tty,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Order table of the truncated geometric groups over a parameter grid
    Orders {
        /// Period range, e.g. `2` or `1..3`
        #[arg(long, default_value = "1..3")]
        r: String,
        /// Depth range, e.g. `4` or `1..4`
        #[arg(long, default_value = "1..4")]
        n: String,
        /// Breadth-first cross-check cap on the group order
        #[arg(long, default_value_t = 1 << 20)]
        cap: u64,
    },
    /// Kernel membership and root unit of a serialized automorphism
    Membership {
        #[arg(long)]
        r: u32,
        /// Automorphism as produced by the hex serialization
        #[arg(long)]
        hex: String,
    },
    /// Breadth-first closure of the generator family against the order formula
    PinkClosure {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1 << 24)]
        cap: u64,
    },
    /// Exhaustive unit-kernel enumeration at small depth
    EnumerateBprime {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: u32,
        /// Also list the elements in hex
        #[arg(long)]
        list: bool,
    },
    /// Build a labeled preimage tree and verify the Frobenius action on it
    FrobeniusVerify {
        #[arg(long)]
        p: u64,
        /// Parameter c; defaults to the smallest residue of exact period r
        #[arg(long)]
        c: Option<u64>,
        #[arg(long)]
        r: u32,
        /// Base point; defaults to the smallest residue off the critical orbit
        #[arg(long)]
        x0: Option<u64>,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
    /// Emit a canonically labeled preimage tree as JSON
    LabelTree {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        c: Option<u64>,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        x0: Option<u64>,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
    /// Square-class independence conditions for rational parameters
    ConditionCheck {
        /// Rational parameter c, e.g. `-1` or `-3/7`
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        /// Rational base point x0
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        /// Check the period-r condition (requires the rational parameter of that period)
        #[arg(long)]
        r: Option<u32>,
        /// Check independence of the first n discriminants
        #[arg(long)]
        n: Option<u32>,
    },
    /// Run the whole verification suite
    VerifyAll {
        #[arg(long, value_enum, default_value_t = ProfileArg::Quick)]
        profile: ProfileArg,
        #[arg(long, default_value_t = 17)]
        seed: u64,
        /// Corrupt one labeled tree on purpose; the run must then fail
        #[arg(long, hide = true)]
        mutate: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(msg) = validate_threads() {
        eprintln!("error: {msg}");
        std::process::exit(2);
    }
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Integrity(_) => 1,
                _ => 2,
            }
        }
    };
    std::process::exit(code);
}

fn validate_threads() -> Result<(), String> {
    match std::env::var("ARBOR_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Ok(()),
            _ => Err(format!(
                "ARBOR_THREADS must be a positive integer, got '{raw}'"
            )),
        },
        Err(_) => Ok(()),
    }
}

fn run(cli: Cli) -> arboreal::Result<i32> {
    let sink = Sink {
        format: cli.format,
        out: cli.out,
    };
    match cli.command {
        Command::Orders { r, n, cap } => cmd_orders(&sink, &r, &n, cap),
        Command::Membership { r, hex } => cmd_membership(&sink, r, &hex),
        Command::PinkClosure { r, n, cap } => cmd_pink_closure(&sink, r, n, cap),
        Command::EnumerateBprime { r, n, list } => cmd_enumerate(&sink, r, n, list),
        Command::FrobeniusVerify { p, c, r, x0, n, seed } => {
            cmd_frobenius(&sink, p, c, r, x0, n, seed)
        }
        Command::LabelTree { p, c, r, x0, n, seed } => cmd_label_tree(&sink, p, c, r, x0, n, seed),
        Command::ConditionCheck { c, x0, r, n } => cmd_condition_check(&sink, &c, &x0, r, n),
        Command::VerifyAll { profile, seed, mutate } => cmd_verify_all(&sink, profile, seed, mutate),
    }
}

/// Where and how reports leave the process. Reports are deterministic for
/// fixed inputs and seeds; timing goes to stderr only.
struct Sink {
    format: Format,
    out: Option<PathBuf>,
}

impl Sink {
    fn emit(&self, content: String) -> arboreal::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, content.as_bytes())
                .map_err(|e| Error::BadSerialization(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{content}");
                Ok(())
            }
        }
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> arboreal::Result<()> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::BadSerialization(e.to_string()))?;
        text.push('\n');
        self.emit(text)
    }

    fn reject_csv(&self, command: &str) -> arboreal::Result<()> {
        if self.format == Format::Csv {
            return Err(Error::BadSerialization(format!(
                "csv output is not defined for `{command}`; use tty or json"
            )));
        }
        Ok(())
    }
}

/// Inclusive range argument: `4` or `1..4`. Reversed bounds give an empty
/// range rather than an error.
fn parse_range(raw: &str) -> arboreal::Result<Vec<u32>> {
    let parse_one = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| Error::BadSerialization(format!("bad range component '{s}'")))
    };
    match raw.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (parse_one(lo)?, parse_one(hi)?);
            Ok((lo..=hi).collect())
        }
        None => Ok(vec![parse_one(raw)?]),
    }
}

fn cmd_orders(sink: &Sink, r: &str, n: &str, cap: u64) -> arboreal::Result<i32> {
    let rs = parse_range(r)?;
    let ns = parse_range(n)?;
    let started = Instant::now();
    let rows = pink::order_table(&rs, &ns, cap)?;
    eprintln!("orders: {} rows in {:?}", rows.len(), started.elapsed());
    match sink.format {
        Format::Csv => sink.emit(pink::order_table_csv(&rows))?,
        Format::Json => sink.emit_json(&rows)?,
        Format::Tty => {
            let mut text = String::from("r  n   log2   bfs        kernel     match\n");
            for row in &rows {
                let opt = |v: Option<u64>| v.map_or("-".to_string(), |x| x.to_string());
                text.push_str(&format!(
                    "{:<2} {:<3} {:<6} {:<10} {:<10} {}\n",
                    row.r,
                    row.n,
                    row.log2_formula,
                    opt(row.bfs_order),
                    opt(row.kernel_count),
                    row.matched
                ));
            }
            sink.emit(text)?;
        }
    }
    Ok(if rows.iter().all(|row| row.matched) { 0 } else { 1 })
}

#[derive(Serialize)]
struct MembershipReport {
    depth: u32,
    r: u32,
    hex: String,
    in_unit_kernel: bool,
    residue_consistent: bool,
    root_unit: TruncatedResidue,
}

fn cmd_membership(sink: &Sink, r: u32, hex: &str) -> arboreal::Result<i32> {
    sink.reject_csv("membership")?;
    let sigma = TreeAutomorphism::from_hex(hex)?;
    let report = MembershipReport {
        depth: sigma.depth(),
        r,
        hex: sigma.to_hex(),
        in_unit_kernel: parity::in_unit_kernel(&sigma, r)?,
        residue_consistent: parity::is_residue_consistent(&sigma, r)?,
        root_unit: parity::truncated_unit(&sigma, NodeAddress::root(), r)?,
    };
    match sink.format {
        Format::Json => sink.emit_json(&report)?,
        _ => sink.emit(format!(
            "depth {} automorphism, r = {}\n  unit kernel member: {}\n  residue consistent: {}\n  root unit: {}\n",
            report.depth,
            report.r,
            report.in_unit_kernel,
            report.residue_consistent,
            report.root_unit,
        ))?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct ClosureReport {
    r: u32,
    n: u32,
    generator_count: usize,
    order: u64,
    log2_formula: u64,
    matched: bool,
}

fn cmd_pink_closure(sink: &Sink, r: u32, n: u32, cap: u64) -> arboreal::Result<i32> {
    sink.reject_csv("pink-closure")?;
    let gens = pink::generator_set(r, n)?;
    let started = Instant::now();
    let group = pink::closure(&gens, cap)?;
    eprintln!(
        "pink-closure: {} elements in {:?}",
        group.order(),
        started.elapsed()
    );
    let log2_formula = pink::log2_order_closed(r, n);
    let matched = log2_formula < 64 && group.order() == 1u64 << log2_formula;
    let report = ClosureReport {
        r,
        n,
        generator_count: gens.elements().len(),
        order: group.order(),
        log2_formula,
        matched,
    };
    match sink.format {
        Format::Json => sink.emit_json(&report)?,
        _ => sink.emit(format!(
            "closure of {} generators at (r={}, n={}): order {} = 2^{:.0}, formula 2^{}, match {}\n",
            report.generator_count,
            r,
            n,
            report.order,
            (report.order as f64).log2(),
            report.log2_formula,
            report.matched,
        ))?,
    }
    Ok(if matched { 0 } else { 1 })
}

#[derive(Serialize)]
struct EnumerationReport {
    r: u32,
    n: u32,
    count: u64,
    log2_formula: u64,
    matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    elements: Option<Vec<String>>,
}

fn cmd_enumerate(sink: &Sink, r: u32, n: u32, list: bool) -> arboreal::Result<i32> {
    sink.reject_csv("enumerate-bprime")?;
    let started = Instant::now();
    let group = pink::enumerate_unit_kernel(r, n)?;
    eprintln!(
        "enumerate-bprime: {} elements in {:?}",
        group.order(),
        started.elapsed()
    );
    let log2_formula = pink::log2_order_closed(r, n);
    let matched = log2_formula < 64 && group.order() == 1u64 << log2_formula;
    let report = EnumerationReport {
        r,
        n,
        count: group.order(),
        log2_formula,
        matched,
        elements: list.then(|| group.iter().map(|sigma| sigma.to_hex()).collect()),
    };
    match sink.format {
        Format::Json => sink.emit_json(&report)?,
        _ => {
            let mut text = format!(
                "unit kernel at (r={}, n={}): {} elements, formula 2^{}, match {}\n",
                r, n, report.count, report.log2_formula, report.matched
            );
            if let Some(elements) = &report.elements {
                for hex in elements {
                    text.push_str(hex);
                    text.push('\n');
                }
            }
            sink.emit(text)?;
        }
    }
    Ok(if matched { 0 } else { 1 })
}

/// Fill in c and x0 defaults; `None` means the domain has no usable value.
fn resolve_parameters(
    p: u64,
    c: Option<u64>,
    r: u32,
    x0: Option<u64>,
) -> arboreal::Result<Option<(PcfParameter, u64)>> {
    let param = match c {
        Some(c) => PcfParameter::new(p, c, r)?,
        None => match find_pcf_parameters(p, r)?.first() {
            Some(&c) => PcfParameter::new(p, c, r)?,
            None => {
                eprintln!("error: no residue mod {p} has exact period {r}; choose another prime");
                return Ok(None);
            }
        },
    };
    let x0 = match x0 {
        Some(x0) => x0,
        None => match smallest_base_point(&param) {
            Some(x0) => x0,
            None => {
                eprintln!("error: every residue mod {p} lies on the critical orbit");
                return Ok(None);
            }
        },
    };
    Ok(Some((param, x0)))
}

#[derive(Serialize)]
struct FrobeniusReport {
    p: u64,
    c: u64,
    r: u32,
    x0: u64,
    n: u32,
    seed: u64,
    field_degree: u32,
    restarts: u32,
    ratio_checked: u64,
    ratio_failures: usize,
    unity_chain_ok: bool,
    products_checked: u64,
    product_failures: usize,
    frobenius: String,
    residue_consistent: bool,
    node_residues_checked: u64,
    node_residue_mismatches: usize,
    root_unit: TruncatedResidue,
    expected_root: u64,
    passed: bool,
}

fn cmd_frobenius(
    sink: &Sink,
    p: u64,
    c: Option<u64>,
    r: u32,
    x0: Option<u64>,
    n: u32,
    seed: u64,
) -> arboreal::Result<i32> {
    sink.reject_csv("frobenius-verify")?;
    let Some((param, x0)) = resolve_parameters(p, c, r, x0)? else {
        return Ok(2);
    };
    let started = Instant::now();
    let mut tree = build_preimage_tree(&param, x0, n, seed)?;
    tree.canonicalize_labels()?;
    let ratio = tree.verify_ratio_identity()?;
    let chain = tree.verify_unity_chain()?;
    let products = tree.verify_preimage_products()?;
    let sigma = tree.frobenius_automorphism()?;
    let cyc = tree.verify_cyclotomic_action(&sigma)?;
    eprintln!(
        "frobenius-verify: built and verified k={} tree in {:?}",
        tree.ctx().k(),
        started.elapsed()
    );
    let passed = ratio.all_ok() && chain.ok && products.all_ok() && cyc.all_ok();
    let report = FrobeniusReport {
        p,
        c: param.c(),
        r,
        x0,
        n,
        seed,
        field_degree: tree.ctx().k(),
        restarts: tree.restarts(),
        ratio_checked: ratio.checked,
        ratio_failures: ratio.failures.len(),
        unity_chain_ok: chain.ok,
        products_checked: products.checked,
        product_failures: products.failures.len(),
        frobenius: sigma.to_hex(),
        residue_consistent: cyc.residue_consistent,
        node_residues_checked: cyc.checked,
        node_residue_mismatches: cyc.mismatches.len(),
        root_unit: cyc.root_unit,
        expected_root: cyc.expected_root,
        passed,
    };
    match sink.format {
        Format::Json => sink.emit_json(&report)?,
        _ => sink.emit(format!(
            "z^2 + {} mod {} (period {}), x0 = {}, depth {} over F_{}^{}\n\
             ratio identities: {}/{} ok\n\
             unity chain: {}\n\
             preimage products: {}/{} ok\n\
             Frobenius: {}\n\
             residue consistent: {}, node residues: {}/{} ok\n\
             root unit {} (expect {} mod {})\n\
             verdict: {}\n",
            report.c,
            p,
            r,
            x0,
            n,
            p,
            report.field_degree,
            report.ratio_checked - report.ratio_failures as u64,
            report.ratio_checked,
            if chain.ok { "ok" } else { "BROKEN" },
            report.products_checked - report.product_failures as u64,
            report.products_checked,
            report.frobenius,
            report.residue_consistent,
            report.node_residues_checked - report.node_residue_mismatches as u64,
            report.node_residues_checked,
            report.root_unit,
            report.expected_root,
            report.root_unit.modulus(),
            if passed { "PASS" } else { "FAIL" },
        ))?,
    }
    Ok(if passed { 0 } else { 1 })
}

fn cmd_label_tree(
    sink: &Sink,
    p: u64,
    c: Option<u64>,
    r: u32,
    x0: Option<u64>,
    n: u32,
    seed: u64,
) -> arboreal::Result<i32> {
    sink.reject_csv("label-tree")?;
    let Some((param, x0)) = resolve_parameters(p, c, r, x0)? else {
        return Ok(2);
    };
    let started = Instant::now();
    let mut tree = build_preimage_tree(&param, x0, n, seed)?;
    tree.canonicalize_labels()?;
    eprintln!(
        "label-tree: k={} tree with {} nodes in {:?}",
        tree.ctx().k(),
        (1u64 << (n + 1)) - 1,
        started.elapsed()
    );
    sink.emit_json(&tree.document())?;
    Ok(0)
}

#[derive(Serialize)]
struct ConditionReport {
    c: String,
    x0: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    condition_one: Option<ConditionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    aut_tn: Option<ConditionVerdict>,
}

fn format_verdict(tag: &str, verdict: &ConditionVerdict) -> String {
    let mut text = format!(
        "{tag}: {} (rank {} of {})\n",
        if verdict.condition { "independent" } else { "dependent" },
        verdict.rank,
        verdict.labels.len()
    );
    for dep in &verdict.dependencies {
        let names: Vec<&str> = dep.iter().map(|&i| verdict.labels[i].as_str()).collect();
        text.push_str(&format!("  square product: {}\n", names.join(" * ")));
    }
    text
}

fn cmd_condition_check(
    sink: &Sink,
    c_raw: &str,
    x0_raw: &str,
    r: Option<u32>,
    n: Option<u32>,
) -> arboreal::Result<i32> {
    sink.reject_csv("condition-check")?;
    let parse = |what: &str, raw: &str| {
        BigRational::from_str(raw.trim())
            .map_err(|e| Error::BadSerialization(format!("bad rational for {what}: '{raw}' ({e})")))
    };
    let c = parse("c", c_raw)?;
    let x0 = parse("x0", x0_raw)?;
    if r.is_none() && n.is_none() {
        return Err(Error::BadSerialization(
            "condition-check needs --r (period condition) and/or --n (tree condition)".into(),
        ));
    }
    let condition_one = r.map(|r| check_condition_one(&c, &x0, r)).transpose()?;
    let aut_tn = n.map(|n| check_aut_tn(&c, &x0, n)).transpose()?;
    let report = ConditionReport {
        c: c.to_string(),
        x0: x0.to_string(),
        condition_one,
        aut_tn,
    };
    match sink.format {
        Format::Json => sink.emit_json(&report)?,
        _ => {
            let mut text = format!("c = {}, x0 = {}\n", report.c, report.x0);
            if let Some(v) = &report.condition_one {
                text.push_str(&format_verdict("period condition", v));
            }
            if let Some(v) = &report.aut_tn {
                text.push_str(&format_verdict("tree condition", v));
            }
            sink.emit(text)?;
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct SuiteReport {
    profile: Profile,
    seed: u64,
    passed: bool,
    criteria: Vec<suite::CriterionReport>,
}

fn cmd_verify_all(
    sink: &Sink,
    profile: ProfileArg,
    seed: u64,
    mutate: bool,
) -> arboreal::Result<i32> {
    sink.reject_csv("verify-all")?;
    let opts = SuiteOptions {
        profile: match profile {
            ProfileArg::Quick => Profile::Quick,
            ProfileArg::Full => Profile::Full,
        },
        seed,
        mutate,
    };
    let started = Instant::now();
    let criteria = suite::run_all(&opts)?;
    eprintln!("verify-all: suite finished in {:?}", started.elapsed());
    let passed = criteria.iter().all(|c| c.passed);
    let report = SuiteReport {
        profile: opts.profile,
        seed,
        passed,
        criteria,
    };
    match sink.format {
        Format::Json => sink.emit_json(&report)?,
        _ => {
            let mut text = String::new();
            for criterion in &report.criteria {
                text.push_str(&format!(
                    "[{}] {} {}: {}\n",
                    if criterion.passed { "PASS" } else { "FAIL" },
                    criterion.id,
                    criterion.name,
                    criterion.detail
                ));
            }
            text.push_str(&format!(
                "{}/{} criteria passed\n",
                report.criteria.iter().filter(|c| c.passed).count(),
                report.criteria.len()
            ));
            if !passed {
                // failures always come with machine-readable detail
                let failing: Vec<&suite::CriterionReport> =
                    report.criteria.iter().filter(|c| !c.passed).collect();
                text.push_str(&serde_json::to_string_pretty(&failing).map_err(|e| {
                    Error::BadSerialization(e.to_string())
                })?);
                text.push('\n');
            }
            sink.emit(text)?;
        }
    }
    Ok(if passed { 0 } else { 1 })
}
