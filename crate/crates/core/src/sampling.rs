//! Inverse-CDF sampling from `f_R`, the main bivariate law and its stationary chain.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::densities::f_r;
use crate::error::{check_open_unit, domain, Error, Result};
use crate::kernels::{main_joint_density, phi_sequence};
use crate::polyfam::orthonormal_r_sequence;
use crate::qcore::{support, Support, TruncationPolicy};
use crate::quadverify::CheckReport;

pub const DEFAULT_RESOLUTION: usize = 4097;
/// Half-width of the tabulated range at `q = 1`.
const LINE_HALF_WIDTH: f64 = 40.0;

/// Piecewise-linear CDF on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl TabulatedCdf {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.cdf
    }

    pub fn eval(&self, x: f64) -> f64 {
        let g = &self.grid;
        if x <= g[0] {
            return 0.0;
        }
        if x >= g[g.len() - 1] {
            return 1.0;
        }
        let i = g.partition_point(|&v| v <= x) - 1;
        let w = (x - g[i]) / (g[i + 1] - g[i]);
        self.cdf[i] + w * (self.cdf[i + 1] - self.cdf[i])
    }

    /// Smallest `x` with `F(x) = u` under linear interpolation.
    pub fn inverse(&self, u: f64) -> f64 {
        let c = &self.cdf;
        let n = c.len();
        let u = u.clamp(0.0, 1.0);
        let i = c.partition_point(|&v| v < u);
        if i == 0 {
            return self.grid[0];
        }
        if i >= n {
            return self.grid[n - 1];
        }
        let (c0, c1) = (c[i - 1], c[i]);
        if c1 <= c0 {
            return self.grid[i - 1];
        }
        self.grid[i - 1] + (u - c0) / (c1 - c0) * (self.grid[i] - self.grid[i - 1])
    }
}

/// Abscissae `x_k = l sin θ_k` with `θ` uniform on `[-π/2, π/2]` (bounded support),
/// or a uniform grid at `q = 1`, and the quadrature weight of each node.
fn nodes(q: f64, resolution: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if resolution < 3 {
        return domain(format!("resolution {resolution} must be at least 3"));
    }
    let n = resolution - 1;
    Ok(match support(q)? {
        Support::Bounded { hi, .. } => {
            let h = 2.0 * FRAC_PI_2 / n as f64;
            (0..=n)
                .map(|k| {
                    let t = -FRAC_PI_2 + h * k as f64;
                    (hi * t.sin(), hi * t.cos())
                })
                .unzip()
        }
        Support::RealLine => (0..=n).map(|k| (-LINE_HALF_WIDTH + 2.0 * LINE_HALF_WIDTH * k as f64 / n as f64, 1.0)).unzip(),
    })
}

fn tabulate(values: &[f64], x: Vec<f64>, jac: &[f64], mass_tol: f64) -> Result<TabulatedCdf> {
    let n = x.len() - 1;
    let step = if jac.iter().all(|&j| j == 1.0) { (x[n] - x[0]) / n as f64 } else { 2.0 * FRAC_PI_2 / n as f64 };
    let mut cdf = Vec::with_capacity(n + 1);
    cdf.push(0.0);
    let mut acc = 0.0;
    for k in 0..n {
        let a = values[k] * jac[k];
        let b = values[k + 1] * jac[k + 1];
        if !(a >= 0.0 && b >= 0.0) {
            return Err(Error::Normalization(format!("density is negative or not finite near x = {}", x[k])));
        }
        acc += 0.5 * step * (a + b);
        cdf.push(acc);
    }
    if !((acc - 1.0).abs() <= mass_tol) {
        return Err(Error::Normalization(format!("total mass {acc} deviates from 1 by more than {mass_tol:e}")));
    }
    cdf.iter_mut().for_each(|c| *c /= acc);
    cdf[n] = 1.0;
    Ok(TabulatedCdf { grid: x, cdf })
}

/// Tabulates the CDF of `density` over `S(q)`.
pub fn build_cdf<F>(mut density: F, q: f64, resolution: usize) -> Result<TabulatedCdf>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (x, jac) = nodes(q, resolution)?;
    let values: Vec<f64> = x.iter().map(|&v| density(v)).collect::<Result<_>>()?;
    tabulate(&values, x, &jac, 1e-6)
}

pub fn sample_marginal(cdf: &TabulatedCdf, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| cdf.inverse(rng.gen())).collect()
}

/// CDF of the transition density `p(y|x) = joint(x, y) / f_R(x|r1 r2)`.
pub fn conditional_cdf(x: f64, r1: f64, r2: f64, q: f64, resolution: usize) -> Result<TabulatedCdf> {
    let t = TruncationPolicy::default();
    let fx = f_r(x, r1 * r2, q, &t)?;
    if !(fx > 0.0) {
        return domain(format!("f_R vanishes at x = {x}; the transition is undefined"));
    }
    let (grid, jac) = nodes(q, resolution)?;
    let values: Vec<f64> =
        grid.iter().map(|&y| Ok(main_joint_density(x, y, r1, r2, q, &t)? / fx)).collect::<Result<_>>()?;
    tabulate(&values, grid, &jac, 1e-4)
}

/// One draw from `p(·|x)`.
pub fn transition_sample(x: f64, r1: f64, r2: f64, q: f64, seed: u64) -> Result<f64> {
    let cdf = conditional_cdf(x, r1, r2, q, DEFAULT_RESOLUTION)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(cdf.inverse(rng.gen()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub r1: f64,
    pub r2: f64,
    pub q: f64,
    pub length: usize,
    pub seed: u64,
    /// Points per CDF table; conditional tables are cached per marginal grid node.
    pub resolution: usize,
}

impl ChainConfig {
    pub fn new(r1: f64, r2: f64, q: f64, length: usize, seed: u64) -> Self {
        ChainConfig { r1, r2, q, length, seed, resolution: 1025 }
    }

    pub fn validate(&self) -> Result<()> {
        check_open_unit("r1", self.r1)?;
        check_open_unit("r2", self.r2)?;
        if !(self.q > -1.0 && self.q < 1.0) {
            return domain(format!("q = {} must lie in (-1, 1) for sampling", self.q));
        }
        if self.length == 0 {
            return domain("chain length must be at least 1");
        }
        if self.resolution < 3 {
            return domain("resolution must be at least 3");
        }
        Ok(())
    }
}

/// Stationary chain `X_0 ~ f_R`, `X_{t+1} ~ p(·|X_t)`. Each transition uses the
/// conditional table of the marginal grid node nearest to `X_t`.
pub fn gen_chain(cfg: &ChainConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let (r1, r2, q) = (cfg.r1, cfg.r2, cfg.q);
    let t = TruncationPolicy::default();
    let marginal = build_cdf(|x| f_r(x, r1 * r2, q, &t), q, cfg.resolution)?;
    let grid = marginal.grid().to_vec();
    let last = grid.len() - 1;
    let mut cache: HashMap<usize, TabulatedCdf> = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x = marginal.inverse(rng.gen());
    let mut out = Vec::with_capacity(cfg.length);
    out.push(x);
    for _ in 1..cfg.length {
        let i = grid.partition_point(|&g| g < x);
        let mut k = if i == 0 {
            0
        } else if i > last || x - grid[i - 1] <= grid[i] - x {
            i - 1
        } else {
            i
        };
        // f_R vanishes at the endpoints
        k = k.clamp(1, last - 1);
        let table = match cache.get(&k) {
            Some(c) => c,
            None => {
                let c = conditional_cdf(grid[k], r1, r2, q, cfg.resolution)
                    .map_err(|e| e.context(&format!("x = {}", grid[k])))?;
                cache.entry(k).or_insert(c)
            }
        };
        x = table.inverse(rng.gen());
        out.push(x);
    }
    Ok(out)
}

/// Mean of `z_t` and its standard error from `batches` batch means.
pub fn batch_mean(z: &[f64], batches: usize) -> (f64, f64) {
    let n = z.len();
    let mean = z.iter().sum::<f64>() / n as f64;
    let b = batches.clamp(2, n.max(2));
    let size = n / b;
    if size == 0 {
        return (mean, f64::INFINITY);
    }
    let means: Vec<f64> = (0..b).map(|k| z[k * size..(k + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let mm = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|m| (m - mm) * (m - mm)).sum::<f64>() / (b - 1) as f64;
    (mean, (var / b as f64).sqrt())
}

/// Lag-one cross moment `E[R^_n(X_t) R^_m(X_{t+1})]` of a trajectory against
/// `φ_n δ_nm`, with a 3σ band from batch means.
pub fn cross_moment_check(traj: &[f64], n: usize, m: usize, cfg: &ChainConfig) -> Result<CheckReport> {
    let start = Instant::now();
    if traj.len() < 2 {
        return domain("need at least two chain steps");
    }
    let beta = cfg.r1 * cfg.r2;
    let top = n.max(m);
    let vals: Vec<Vec<f64>> =
        traj.iter().map(|&x| orthonormal_r_sequence(top, x, beta, cfg.q)).collect::<Result<_>>()?;
    let z: Vec<f64> = vals.windows(2).map(|w| w[0][n] * w[1][m]).collect();
    let (mean, se) = batch_mean(&z, 100);
    let target = if n == m { phi_sequence(n, cfg.r1, cfg.r2, cfg.q)?[n] } else { 0.0 };
    let params = [
        ("n", n as f64),
        ("m", m as f64),
        ("r1", cfg.r1),
        ("r2", cfg.r2),
        ("q", cfg.q),
        ("samples", z.len() as f64),
    ];
    let report = CheckReport {
        check_id: "empirical_phi".into(),
        params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        max_abs_residual: (mean - target).abs(),
        tolerance: 3.0 * se,
        grid: format!("seed {}", cfg.seed),
        pass: (mean - target).abs() <= 3.0 * se,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(report)
}

/// Generates a chain of `n_samples` steps and compares the lag-one moment with `φ_n`.
pub fn empirical_phi_check(n: usize, cfg: &ChainConfig, n_samples: usize) -> Result<CheckReport> {
    if n > 4 {
        return Err(Error::Index(format!("empirical checks support n ≤ 4, got {n}")));
    }
    let cfg = ChainConfig { length: n_samples + 1, ..*cfg };
    let traj = gen_chain(&cfg)?;
    cross_moment_check(&traj, n, n, &cfg)
}

/// `sup |F_emp − F|` of a sample against a table.
pub fn ks_statistic(samples: &[f64], cdf: &TabulatedCdf) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf.eval(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

/// Two-sample statistic `sup |F_a − F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// 3σ-equivalent one-sample threshold `1.5 · 1.95 / sqrt(n)`.
pub fn ks_threshold(n: usize) -> f64 {
    1.5 * 1.95 / (n as f64).sqrt()
}

/// Thinning step that makes the lag correlation of the thinned chain ≤ 0.01.
pub fn thinning(cfg: &ChainConfig) -> Result<usize> {
    let phi = phi_sequence(50, cfg.r1, cfg.r2, cfg.q)?;
    let rho = phi[1..].iter().fold(0.0f64, |m, p| m.max(p.abs()));
    if rho < 0.01 {
        return Ok(1);
    }
    Ok((0.01f64.ln() / rho.ln()).ceil().max(1.0) as usize)
}

/// KS test of the thinned trajectory against the `f_R` table.
pub fn stationarity_check(traj: &[f64], cfg: &ChainConfig) -> Result<CheckReport> {
    let start = Instant::now();
    let t = TruncationPolicy::default();
    let cdf = build_cdf(|x| f_r(x, cfg.r1 * cfg.r2, cfg.q, &t), cfg.q, DEFAULT_RESOLUTION)?;
    let k = thinning(cfg)?;
    let thin: Vec<f64> = traj.iter().step_by(k).copied().collect();
    let d = ks_statistic(&thin, &cdf);
    let tol = ks_threshold(thin.len());
    let params = [("r1", cfg.r1), ("r2", cfg.r2), ("q", cfg.q), ("thinning", k as f64), ("samples", thin.len() as f64)];
    Ok(CheckReport {
        check_id: "stationarity_ks".into(),
        params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        max_abs_residual: d,
        tolerance: tol,
        grid: format!("seed {}", cfg.seed),
        pass: d <= tol,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
