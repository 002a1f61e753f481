use std::fmt::Write;

use qlancaster::kernels::{kernel_closed, KernelId, KernelSpec};
use qlancaster::qcore::support;
use qlancaster::quadverify::interior_grid;
use qlancaster::sampling::{gen_chain, ChainConfig};

use crate::{Failure, SampleArgs, ScanArgs};

/// 17 significant digits, round-trippable.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn manifest(out: &mut String, command: &str, fields: &[(&str, String)]) {
    writeln!(out, "# command: {command}").unwrap();
    writeln!(out, "# version: {}", env!("CARGO_PKG_VERSION")).unwrap();
    for (k, v) in fields {
        writeln!(out, "# {k}: {v}").unwrap();
    }
}

pub fn scan(a: &ScanArgs) -> Result<String, Failure> {
    let spec = KernelSpec::new(KernelId::Main { r1: a.r1, r2: a.r2 }, a.q).with_terms(a.max_terms);
    let k = spec.prepare()?;
    let l = match support(a.q)?.half_width() {
        Some(l) => l,
        None => 5.0 * ((1.0 + (a.r1 * a.r2).abs()) / (1.0 - (a.r1 * a.r2).abs())).sqrt(),
    };
    let g = interior_grid(l, a.grid);
    let mut out = String::new();
    manifest(
        &mut out,
        "scan",
        &[
            ("r1", a.r1.to_string()),
            ("r2", a.r2.to_string()),
            ("q", a.q.to_string()),
            ("grid", format!("{0}x{0} interior Chebyshev nodes", a.grid)),
            ("max_terms", a.max_terms.to_string()),
        ],
    );
    out.push_str("x,y,sum,closed,abs_diff,tail\n");
    for &x in &g {
        for &y in &g {
            let s = k.sum(x, y)?;
            let c = kernel_closed(&spec, x, y)?;
            let row = [x, y, s.value, c, (s.value - c).abs(), s.tail_bound];
            out.push_str(&row.iter().map(|v| num(*v)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn sample(a: &SampleArgs) -> Result<String, Failure> {
    let cfg = ChainConfig { r1: a.r1, r2: a.r2, q: a.q, length: a.length, seed: a.seed, resolution: a.grid };
    let traj = gen_chain(&cfg)?;
    let mut out = String::new();
    manifest(
        &mut out,
        "sample",
        &[
            ("r1", a.r1.to_string()),
            ("r2", a.r2.to_string()),
            ("q", a.q.to_string()),
            ("length", a.length.to_string()),
            ("seed", a.seed.to_string()),
            ("resolution", a.grid.to_string()),
        ],
    );
    out.push_str("t,x\n");
    for (t, x) in traj.iter().enumerate() {
        writeln!(out, "{t},{}", num(*x)).unwrap();
    }
    Ok(out)
}
