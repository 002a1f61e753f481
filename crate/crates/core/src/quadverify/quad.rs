//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{support, Support};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7)
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Panels in the initial uniform split.
    pub initial_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-10, max_panels: 4000, initial_panels: 8 }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadConfig { abs_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quad {
    pub value: f64,
    pub err: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadMany {
    pub values: Vec<f64>,
    /// Max-norm error estimate over the components.
    pub err: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    values: Vec<f64>,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err.total_cmp(&o.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Result<Panel>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let nodes: &[f64] = if x == 0.0 { &[c] } else { &[c - h * x, c + h * x] };
        for &t in nodes {
            buf.iter_mut().for_each(|v| *v = 0.0);
            f(t, buf)?;
            for k in 0..dim {
                if !buf[k].is_finite() {
                    return Err(Error::Adapt(format!("integrand is not finite at x = {t}")));
                }
                kron[k] += wk * buf[k];
                if i % 2 == 1 {
                    gauss[k] += WG[i / 2] * buf[k];
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    for k in 0..dim {
        kron[k] *= h;
        gauss[k] *= h;
        err = err.max((kron[k] - gauss[k]).abs());
    }
    Ok(Panel { a, b, values: kron, err })
}

/// Integrates a vector-valued `f` over `[a, b]`; `f(x, out)` writes `dim` values.
pub fn integrate_many<F>(mut f: F, dim: usize, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadMany>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::Domain(format!("bad interval [{a}, {b}]")));
    }
    let mut buf = vec![0.0; dim];
    let k = cfg.initial_panels.max(1);
    let mut heap = BinaryHeap::new();
    for i in 0..k {
        let lo = a + (b - a) * i as f64 / k as f64;
        let hi = if i + 1 == k { b } else { a + (b - a) * (i + 1) as f64 / k as f64 };
        heap.push(gk15(&mut f, lo, hi, dim, &mut buf)?);
    }
    loop {
        let total: f64 = heap.iter().map(|p| p.err).sum();
        if total <= cfg.abs_tol {
            let mut values = vec![0.0; dim];
            for p in heap.iter() {
                for (v, w) in values.iter_mut().zip(&p.values) {
                    *v += w;
                }
            }
            return Ok(QuadMany { values, err: total, panels: heap.len() });
        }
        if heap.len() >= cfg.max_panels {
            return Err(Error::Adapt(format!(
                "panel budget {} exhausted on [{a}, {b}] with error estimate {total:e} > {:e}",
                cfg.max_panels, cfg.abs_tol
            )));
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Adapt(format!("panel [{}, {}] cannot be split further", worst.a, worst.b)));
        }
        heap.push(gk15(&mut f, worst.a, mid, dim, &mut buf)?);
        heap.push(gk15(&mut f, mid, worst.b, dim, &mut buf)?);
    }
}

pub fn integrate_with<F>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Quad>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = integrate_many(
        |x, out| {
            out[0] = f(x)?;
            Ok(())
        },
        1,
        a,
        b,
        cfg,
    )?;
    Ok(Quad { value: r.values[0], err: r.err, panels: r.panels })
}

/// `∫_a^b f` to absolute tolerance `abs_tol`.
pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<Quad>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_with(f, a, b, &QuadConfig::with_tol(abs_tol))
}

/// Vector integral over `[-l, l]` with `x = l sin θ`, which smooths the
/// square-root behaviour of the weights at the endpoints.
pub fn integrate_sym_many<F>(mut f: F, dim: usize, l: f64, cfg: &QuadConfig) -> Result<QuadMany>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    integrate_many(
        |t, out| {
            let x = l * t.sin();
            f(x, out)?;
            let jac = l * t.cos();
            out.iter_mut().for_each(|v| *v *= jac);
            Ok(())
        },
        dim,
        -FRAC_PI_2,
        FRAC_PI_2,
        cfg,
    )
}

/// Vector integral over the real line with `x = t / (1 - t^2)`.
pub fn integrate_line_many<F>(mut f: F, dim: usize, cfg: &QuadConfig) -> Result<QuadMany>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    integrate_many(
        |t, out| {
            let s = 1.0 - t * t;
            let x = t / s;
            f(x, out)?;
            let jac = (1.0 + t * t) / (s * s);
            out.iter_mut().for_each(|v| *v = if *v == 0.0 { 0.0 } else { *v * jac });
            Ok(())
        },
        dim,
        -1.0,
        1.0,
        cfg,
    )
}

/// Vector integral over `S(q)`.
pub fn integrate_support_many<F>(f: F, dim: usize, q: f64, cfg: &QuadConfig) -> Result<QuadMany>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    match support(q)? {
        Support::Bounded { hi, .. } => integrate_sym_many(f, dim, hi, cfg),
        Support::RealLine => integrate_line_many(f, dim, cfg),
    }
}

/// `∫_{S(q)} f`.
pub fn integrate_support<F>(mut f: F, q: f64, cfg: &QuadConfig) -> Result<Quad>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = integrate_support_many(
        |x, out| {
            out[0] = f(x)?;
            Ok(())
        },
        1,
        q,
        cfg,
    )?;
    Ok(Quad { value: r.values[0], err: r.err, panels: r.panels })
}
