//! Sampling from the bidiagonal β-model and goodness-of-fit statistics.
//!
//! A is lower bidiagonal with A_jj = χ_{β(n−j)+2(α+1)} and
//! A_{j+1,j} = χ_{β(n−j)}, so T = AAᵀ/β is tridiagonal with
//! T_jj = (A_jj² + A_{j,j−1}²)/β and T_{j,j+1} = A_jj A_{j+1,j}/β.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::density::{beta_json, delay_time_alpha};
use crate::error::{Error, Result};
use crate::params::{Beta, EnsembleParams};

/// Draws per independent RNG stream. Fixed so that results never depend on
/// the number of worker threads.
pub const CHUNK: usize = 4096;

const MAX_BISECTION: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleMode {
    Unrestricted,
    FixedTrace,
    /// Largest proper delay time τ_H/λ_min with α = βn/2.
    DelayTime { tau_h: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    pub params: EnsembleParams,
    pub count: usize,
    pub seed: u64,
    pub mode: SampleMode,
}

impl SampleConfig {
    pub fn new(params: EnsembleParams, count: usize, seed: u64, mode: SampleMode) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter("sample count must be at least 1".into()));
        }
        if let SampleMode::DelayTime { tau_h } = mode {
            if !(tau_h > 0.0) || !tau_h.is_finite() {
                return Err(Error::InvalidParameter(format!("tau_H must be positive, got {tau_h}")));
            }
            let alpha = delay_time_alpha(params.n, &params.beta)?;
            if alpha != params.alpha {
                return Err(Error::Unsupported(format!(
                    "delay times need alpha = beta*n/2 = {alpha}, got alpha = {}",
                    params.alpha
                )));
            }
        }
        Ok(SampleConfig {
            params,
            count,
            seed,
            mode,
        })
    }

    /// Delay-time configuration with α fixed to βn/2.
    pub fn delay_time(n: usize, beta: Beta, tau_h: f64, count: usize, seed: u64) -> Result<Self> {
        let alpha = delay_time_alpha(n, &beta)?;
        Self::new(EnsembleParams::new(n, alpha, beta)?, count, seed, SampleMode::DelayTime { tau_h })
    }

    pub fn to_json(&self) -> Value {
        let mode = match self.mode {
            SampleMode::Unrestricted => json!("unrestricted"),
            SampleMode::FixedTrace => json!("fixed_trace"),
            SampleMode::DelayTime { tau_h } => json!({"delay_time": {"tau_h": tau_h}}),
        };
        json!({
            "n": self.params.n,
            "alpha": self.params.alpha,
            "beta": beta_json(&self.params.beta),
            "count": self.count,
            "seed": self.seed,
            "mode": mode,
        })
    }
}

/// One χ_d draw as √(2G), G ~ Gamma(d/2, 1).
pub fn sample_chi<R: Rng + ?Sized>(dof: f64, rng: &mut R) -> Result<f64> {
    if !(dof > 0.0) || !dof.is_finite() {
        return Err(Error::Domain(format!("chi degrees of freedom must be positive, got {dof}")));
    }
    let g = Gamma::new(dof / 2.0, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
    Ok((2.0 * g.sample(rng)).sqrt())
}

/// Diagonal and subdiagonal of the lower-bidiagonal A.
#[derive(Debug, Clone, PartialEq)]
pub struct BidiagonalModel {
    pub diag: Vec<f64>,
    pub subdiag: Vec<f64>,
    pub beta: f64,
}

impl BidiagonalModel {
    pub fn draw<R: Rng + ?Sized>(n: usize, alpha: f64, beta: f64, rng: &mut R) -> Result<Self> {
        let mut diag = Vec::with_capacity(n);
        let mut subdiag = Vec::with_capacity(n.saturating_sub(1));
        for j in 1..=n {
            let rest = beta * (n - j) as f64;
            diag.push(sample_chi(rest + 2.0 * (alpha + 1.0), rng)?);
            if j < n {
                subdiag.push(sample_chi(rest, rng)?);
            }
        }
        Ok(BidiagonalModel { diag, subdiag, beta })
    }

    /// (diagonal, off-diagonal) of T = AAᵀ/β.
    pub fn tridiagonal(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.diag.len();
        let t_diag = (0..n)
            .map(|j| {
                let below = if j > 0 { self.subdiag[j - 1].powi(2) } else { 0.0 };
                (self.diag[j].powi(2) + below) / self.beta
            })
            .collect();
        let t_off = (0..n.saturating_sub(1))
            .map(|j| self.diag[j] * self.subdiag[j] / self.beta)
            .collect();
        (t_diag, t_off)
    }
}

/// Number of eigenvalues of the symmetric tridiagonal (a, b) below `x`,
/// from the signs of the LDLᵀ pivots of T − xI.
pub fn sturm_count(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..a.len() {
        let off = if i > 0 { b[i - 1] * b[i - 1] / q } else { 0.0 };
        q = a[i] - x - off;
        if q == 0.0 {
            q = -f64::EPSILON * (a[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of a positive semi-definite symmetric tridiagonal
/// matrix, by bisection to 1e−12(1+|λ|).
pub fn smallest_eigenvalue(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::Usage("empty matrix".into()));
    }
    let n = a.len();
    let mut hi = (0..n)
        .map(|i| {
            let left = if i > 0 { b[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { b[i].abs() } else { 0.0 };
            a[i] + left + right
        })
        .fold(0.0, f64::max);
    let min_diag = a.iter().copied().fold(f64::INFINITY, f64::min);
    if sturm_count(a, b, min_diag) >= 1 {
        hi = min_diag;
    }
    let mut lo = 0.0;
    for _ in 0..MAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        if sturm_count(a, b, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Numerical(format!(
        "bisection did not converge after {MAX_BISECTION} steps (bracket [{lo}, {hi}])"
    )))
}

fn draw_one<R: Rng + ?Sized>(cfg: &SampleConfig, rng: &mut R) -> Result<f64> {
    let p = &cfg.params;
    let model = BidiagonalModel::draw(p.n, f64::from(p.alpha), p.beta.to_f64(), rng)?;
    let (a, b) = model.tridiagonal();
    let lam = smallest_eigenvalue(&a, &b)?;
    Ok(match cfg.mode {
        SampleMode::Unrestricted => lam,
        SampleMode::FixedTrace => {
            if p.n == 1 {
                1.0
            } else {
                lam / a.iter().sum::<f64>()
            }
        }
        SampleMode::DelayTime { tau_h } => tau_h / lam,
    })
}

/// Smallest eigenvalue of one draw of W = AAᵀ/β.
pub fn sample_smallest_eigenvalue<R: Rng + ?Sized>(cfg: &SampleConfig, rng: &mut R) -> Result<f64> {
    let plain = SampleConfig {
        mode: SampleMode::Unrestricted,
        ..cfg.clone()
    };
    draw_one(&plain, rng)
}

/// λ_min / tr W.
pub fn sample_fixed_trace<R: Rng + ?Sized>(cfg: &SampleConfig, rng: &mut R) -> Result<f64> {
    let ft = SampleConfig {
        mode: SampleMode::FixedTrace,
        ..cfg.clone()
    };
    draw_one(&ft, rng)
}

/// τ_H/λ_min for the ensemble with α = βn/2.
pub fn sample_largest_delay_time<R: Rng + ?Sized>(n: usize, beta: &Beta, tau_h: f64, rng: &mut R) -> Result<f64> {
    let cfg = SampleConfig::delay_time(n, beta.clone(), tau_h, 1, 0)?;
    draw_one(&cfg, rng)
}

/// Generator for chunk `index` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sorted draws for `cfg`, produced in parallel and independent of the
/// thread count.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    pub values: Vec<f64>,
    pub config: SampleConfig,
}

pub fn sample(cfg: &SampleConfig) -> Result<EmpiricalSample> {
    let chunks = cfg.count.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(cfg.seed, c as u64);
            let len = CHUNK.min(cfg.count - c * CHUNK);
            (0..len).map(|_| draw_one(cfg, &mut rng)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values: Vec<f64> = parts.into_iter().flatten().collect();
    values.sort_by(f64::total_cmp);
    Ok(EmpiricalSample {
        values,
        config: cfg.clone(),
    })
}

impl EmpiricalSample {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        let n = self.values.len() as f64;
        let m = self.mean();
        let var = self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        (var / n).sqrt()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 24);
        for v in &self.values {
            out.push_str(&format!("{v:.16e}\n"));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({"config": self.config.to_json(), "values": self.values})
    }

    /// (bin centre, density) over [min, max] with `bins` equal bins.
    pub fn histogram(&self, bins: usize) -> Result<Vec<(f64, f64)>> {
        histogram(&self.values, bins)
    }
}

pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() || bins == 0 {
        return Err(Error::Usage("histogram needs a non-empty sample and at least one bin".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let norm = values.len() as f64 * width;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(k, &c)| (lo + width * (k as f64 + 0.5), c as f64 / norm))
        .collect())
}

/// sup_i max(|i/N − F(x_i)|, |(i−1)/N − F(x_i)|) over a sorted sample.
pub fn ks_statistic<C: Fn(f64) -> f64 + Sync>(sorted: &[f64], cdf: C) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::Usage("KS statistic of an empty sample".into()));
    }
    let n = sorted.len() as f64;
    Ok(sorted
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let i = i as f64 + 1.0;
            (i / n - f).abs().max(((i - 1.0) / n - f).abs())
        })
        .reduce(|| 0.0, f64::max))
}

/// Two-sample KS statistic sup |F_a − F_b| for sorted inputs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Usage("KS statistic of an empty sample".into()));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
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
    Ok(d)
}

/// Asymptotic two-sample KS rejection threshold at the 1% level.
pub fn ks_two_sample_critical_1pct(na: usize, nb: usize) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    1.628 * ((na + nb) / (na * nb)).sqrt()
}
