use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qlancaster::exactpoly::{check_identity, Bounds, IdentityId, Status};
use qlancaster::quadverify::{
    aux3_check, chapman_grid_check, dei_check, density_forms_check, f3d_check, lattice_pairs, le_grid_check,
    marginal_check, orthogonality_suite, phi_bound_checks, positivity_scan, CheckReport, QuadConfig, LE_TERMS, Q_LATTICE,
};
use qlancaster::Result;
use serde_json::{json, Value};

use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Suite {
    Exact,
    Orthogonality,
    Kernels,
    Chapman,
    All,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Index bound: n, m for exact identities (default 6), degree for orthogonality (default 8).
    #[arg(long)]
    max_n: Option<usize>,
    /// Single q; orthogonality defaults to the lattice, other suites to 0.5.
    #[arg(short, long)]
    q: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    r1: f64,
    #[arg(long, default_value_t = 0.3)]
    r2: f64,
    /// Orthogonality tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = LE_TERMS)]
    max_terms: usize,
    /// Grid points per axis for the kernel suites.
    #[arg(long, default_value_t = 21)]
    grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Row {
    id: String,
    draw: String,
    pass: bool,
    value: Value,
}

fn check_row(r: CheckReport) -> Row {
    let mut value = serde_json::to_value(&r).expect("serializable");
    value["kind"] = json!("check");
    Row { id: r.check_id.clone(), draw: serde_json::to_string(&r.params).expect("serializable"), pass: r.pass, value }
}

fn exact(args: &VerifyArgs, rows: &mut Vec<Row>) -> Result<()> {
    let n = args.max_n.unwrap_or(6);
    let bounds = Bounds { n, m: n, ..Bounds::default() };
    for id in IdentityId::ALL {
        let rec = check_identity(id, &bounds)?;
        let mut value = serde_json::to_value(&rec).expect("serializable");
        value["kind"] = json!("identity");
        rows.push(Row {
            id: id.as_str().to_string(),
            draw: serde_json::to_string(&bounds).expect("serializable"),
            pass: rec.status == Status::Verified,
            value,
        });
    }
    Ok(())
}

fn orthogonality(args: &VerifyArgs, rows: &mut Vec<Row>) -> Result<()> {
    let qs: Vec<f64> = match args.q {
        Some(q) => vec![q],
        None => Q_LATTICE.to_vec(),
    };
    let n_max = args.max_n.unwrap_or(8);
    for (i, &q) in qs.iter().enumerate() {
        for pair in lattice_pairs(q, i == 0) {
            rows.push(check_row(orthogonality_suite(&pair, n_max, q, args.tol)?));
        }
    }
    Ok(())
}

fn kernels(args: &VerifyArgs, rows: &mut Vec<Row>) -> Result<()> {
    let (r1, r2, q) = (args.r1, args.r2, args.q.unwrap_or(0.5));
    let cfg = QuadConfig::with_tol(1e-9);
    rows.push(check_row(le_grid_check(r1, r2, q, args.grid, args.max_terms)?));
    rows.push(check_row(positivity_scan(r1, r2, q, args.grid, args.max_terms)?));
    rows.push(check_row(marginal_check(r1, r2, q, 7, &cfg)?));
    rows.push(check_row(density_forms_check(r1 * r2, q, 7, 200)?));
    for m in 0..=4 {
        rows.push(check_row(aux3_check(r1, m, q, 7, 200)?));
    }
    rows.push(check_row(dei_check(r1 * r2, q)?));
    for r in phi_bound_checks(r1, r2, q)? {
        rows.push(check_row(r));
    }
    Ok(())
}

fn chapman(args: &VerifyArgs, rows: &mut Vec<Row>) -> Result<()> {
    let (r1, r2, q) = (args.r1, args.r2, args.q.unwrap_or(0.5));
    let cfg = QuadConfig::with_tol(1e-9);
    rows.push(check_row(chapman_grid_check(r1, r2, q, 5, &cfg)?));
    rows.push(check_row(f3d_check(r1, r2, r1, q, 3, &cfg)?));
    Ok(())
}

/// Runs the suite; returns the JSON document and whether every row passed.
pub fn run(args: &VerifyArgs) -> std::result::Result<(String, bool), Failure> {
    let mut rows = Vec::new();
    let suites: &[Suite] = match args.suite {
        Suite::All => &[Suite::Exact, Suite::Orthogonality, Suite::Kernels, Suite::Chapman],
        ref s => std::slice::from_ref(s),
    };
    for s in suites {
        match s {
            Suite::Exact => exact(args, &mut rows)?,
            Suite::Orthogonality => orthogonality(args, &mut rows)?,
            Suite::Kernels => kernels(args, &mut rows)?,
            Suite::Chapman => chapman(args, &mut rows)?,
            Suite::All => unreachable!(),
        }
    }
    rows.sort_by(|a, b| (&a.id, &a.draw).cmp(&(&b.id, &b.draw)));
    let ok = rows.iter().all(|r| r.pass);
    let failed = rows.iter().filter(|r| !r.pass).count();
    let manifest = json!({
        "command": "verify",
        "suite": args.suite.to_possible_value().expect("named").get_name(),
        "version": env!("CARGO_PKG_VERSION"),
        "params": {
            "max_n": args.max_n, "q": args.q, "r1": args.r1, "r2": args.r2,
            "max_terms": args.max_terms, "grid": args.grid,
        },
        "tolerances": { "orthogonality": args.tol },
    });
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest,
        "summary": { "rows": rows.len(), "failed": failed, "pass": ok },
        "rows": rows.into_iter().map(|r| r.value).collect::<Vec<_>>(),
    });
    Ok((format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable")), ok))
}
