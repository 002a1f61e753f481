use clap::{Args, Subcommand, ValueEnum};
use qlancaster::densities::{f_bn, f_cn, f_h, f_n, f_r, f_t, f_u};
use qlancaster::kernels::{kernel_closed, kernel_sum, phi_n, KernelId, KernelSpec};
use qlancaster::polyfam::{eval_poly, PolyFamily};
use qlancaster::qcore::TruncationPolicy;
use serde_json::{json, Map, Value};

use crate::Failure;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    ChebyshevT,
    ChebyshevU,
    Hermite,
    Qhermite,
    BigQhermite,
    AsChihara,
    UltraR,
    UltraV,
    UltraC,
    BPoly,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Density {
    #[value(name = "f_h")]
    H,
    #[value(name = "f_n")]
    N,
    #[value(name = "f_bn")]
    BigN,
    #[value(name = "f_cn")]
    CondN,
    #[value(name = "f_r")]
    R,
    #[value(name = "f_t")]
    T,
    #[value(name = "f_u")]
    U,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kernel {
    Main,
    PoissonMehler,
    ChebUu,
    ChebTt,
    ChebUt,
    AscNonsym,
    BigqhNonsym,
    Aux3,
}

/// Shape parameters shared by families, densities and kernels.
#[derive(Args, Debug, Default)]
pub struct Shape {
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Conditioning value for Al-Salam–Chihara families and kernels.
    #[arg(long)]
    cond: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Target {
    #[command(allow_negative_numbers = true)]
    Poly {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        x: f64,
        #[arg(short, long)]
        q: f64,
        #[command(flatten)]
        shape: Shape,
    },
    #[command(allow_negative_numbers = true)]
    Density {
        #[arg(long, value_enum)]
        kind: Density,
        #[arg(short)]
        x: f64,
        #[arg(short, long)]
        q: f64,
        #[command(flatten)]
        shape: Shape,
    },
    #[command(allow_negative_numbers = true)]
    Phi {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        #[arg(short, long)]
        q: f64,
    },
    KernelSum(KernelArgs),
    KernelClosed(KernelArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct KernelArgs {
    #[arg(long, value_enum)]
    kernel: Kernel,
    #[arg(short)]
    x: f64,
    #[arg(short, default_value_t = 0.0)]
    y: f64,
    #[arg(short, long)]
    q: f64,
    #[arg(long)]
    r1: Option<f64>,
    #[arg(long)]
    r2: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 200)]
    max_terms: usize,
    /// Fail when the tail estimate of the series exceeds this.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    shape: Shape,
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing required parameter --{name}")))
}

fn family(f: Family, s: &Shape) -> Result<PolyFamily, Failure> {
    Ok(match f {
        Family::ChebyshevT => PolyFamily::ChebyshevT,
        Family::ChebyshevU => PolyFamily::ChebyshevU,
        Family::Hermite => PolyFamily::Hermite,
        Family::Qhermite => PolyFamily::QHermite,
        Family::BigQhermite => PolyFamily::BigQHermite { a: need(s.a, "a")? },
        Family::AsChihara => PolyFamily::AsChihara { y: need(s.cond, "cond")?, rho: need(s.rho, "rho")? },
        Family::UltraR => PolyFamily::UltraR { beta: need(s.beta, "beta")? },
        Family::UltraV => PolyFamily::UltraV { beta: need(s.beta, "beta")? },
        Family::UltraC => PolyFamily::UltraC { beta: need(s.beta, "beta")? },
        Family::BPoly => PolyFamily::BPoly,
    })
}

fn kernel_id(k: &KernelArgs) -> Result<KernelId, Failure> {
    let s = &k.shape;
    Ok(match k.kernel {
        Kernel::Main => KernelId::Main { r1: need(k.r1, "r1")?, r2: need(k.r2, "r2")? },
        Kernel::PoissonMehler => KernelId::PoissonMehler { rho: need(s.rho, "rho")? },
        Kernel::ChebUu => KernelId::ChebUu { rho: need(s.rho, "rho")? },
        Kernel::ChebTt => KernelId::ChebTt { rho: need(s.rho, "rho")? },
        Kernel::ChebUt => KernelId::ChebUt { rho: need(s.rho, "rho")? },
        Kernel::AscNonsym => KernelId::AscNonsym { rho1: need(k.r1, "r1")?, rho2: need(k.r2, "r2")?, y: need(s.cond, "cond")? },
        Kernel::BigqhNonsym => KernelId::BigqhNonsym { a: need(s.a, "a")?, b: need(s.b, "b")? },
        Kernel::Aux3 => KernelId::Aux3 { r: need(k.r, "r")?, m: k.m.unwrap_or(0) },
    })
}

fn shape_params(p: &mut Map<String, Value>, s: &Shape) {
    for (k, v) in [("beta", s.beta), ("a", s.a), ("b", s.b), ("rho", s.rho), ("cond", s.cond)] {
        if let Some(v) = v {
            p.insert(k.into(), json!(v));
        }
    }
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

pub fn run(t: &Target) -> Result<Value, Failure> {
    let trunc = TruncationPolicy::default();
    let mut p = Map::new();
    let (target, value, tail) = match t {
        Target::Poly { family: f, n, x, q, shape } => {
            p.insert("family".into(), json!(value_name(f)));
            p.insert("n".into(), json!(n));
            p.insert("x".into(), json!(x));
            p.insert("q".into(), json!(q));
            shape_params(&mut p, shape);
            ("poly", eval_poly(&family(*f, shape)?, *n, *x, *q)?, None)
        }
        Target::Density { kind, x, q, shape } => {
            p.insert("kind".into(), json!(value_name(kind)));
            p.insert("x".into(), json!(x));
            p.insert("q".into(), json!(q));
            shape_params(&mut p, shape);
            let v = match kind {
                Density::H => f_h(*x, *q, &trunc)?,
                Density::N => f_n(*x, *q, &trunc)?,
                Density::BigN => f_bn(*x, need(shape.a, "a")?, *q, &trunc)?,
                Density::CondN => f_cn(*x, need(shape.cond, "cond")?, need(shape.rho, "rho")?, *q, &trunc)?,
                Density::R => f_r(*x, need(shape.beta, "beta")?, *q, &trunc)?,
                Density::T => f_t(*x),
                Density::U => f_u(*x),
            };
            ("density", v, None)
        }
        Target::Phi { n, r1, r2, q } => {
            for (k, v) in [("r1", *r1), ("r2", *r2), ("q", *q)] {
                p.insert(k.into(), json!(v));
            }
            p.insert("n".into(), json!(n));
            ("phi", phi_n(*n, *r1, *r2, *q)?, None)
        }
        Target::KernelSum(k) | Target::KernelClosed(k) => {
            let id = kernel_id(k)?;
            p.insert("kernel".into(), serde_json::to_value(id).expect("serializable"));
            for (name, v) in [("x", k.x), ("y", k.y), ("q", k.q)] {
                p.insert(name.into(), json!(v));
            }
            p.insert("max_terms".into(), json!(k.max_terms));
            let mut spec = KernelSpec::new(id, k.q).with_terms(k.max_terms);
            if let Some(tol) = k.tol {
                spec = spec.with_tol(tol);
            }
            if matches!(t, Target::KernelSum(_)) {
                let s = kernel_sum(&spec, k.x, k.y)?;
                ("kernel-sum", s.value, Some(s.tail_bound))
            } else {
                ("kernel-closed", kernel_closed(&spec, k.x, k.y)?, None)
            }
        }
    };
    let mut out = json!({ "target": target, "params": p, "value": value });
    if let Some(tb) = tail {
        out["tail_bound"] = json!(tb);
    }
    Ok(out)
}
