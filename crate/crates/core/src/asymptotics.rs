//! Soft-edge scaling, Tracy-Widom tails and large-deviation rate functions.

use std::path::Path;

use crate::density::EigenDensity;
use crate::error::{Error, Result};
use crate::params::EnsembleParams;

/// Relative residual allowed when W is substituted back into W³ + PW + Q.
const CUBIC_TOLERANCE: f64 = 1e-9;

/// Shift ν and (negative) scale σ of the smallest eigenvalue at the soft edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftEdgeScaling {
    pub n: usize,
    /// m = n − 1 + 2(α+1)/β.
    pub m: f64,
    pub nu: f64,
    pub sigma: f64,
}

impl SoftEdgeScaling {
    pub fn new(params: &EnsembleParams) -> Result<Self> {
        let beta = params.beta.to_f64();
        let n = params.n as f64;
        let m = n - 1.0 + 2.0 * (f64::from(params.alpha) + 1.0) / beta;
        if m <= n {
            return Err(Error::Unsupported(format!(
                "soft-edge scaling needs m > n (got m = {m}, n = {n}); the square case is a hard edge with exponential law"
            )));
        }
        let d = n.sqrt() - m.sqrt();
        // Real cube root of a negative number keeps σ < 0.
        let sigma = d * (1.0 / n.sqrt() - 1.0 / m.sqrt()).cbrt();
        Ok(SoftEdgeScaling {
            n: params.n,
            m,
            nu: d * d,
            sigma,
        })
    }

    /// λ = σs + ν.
    pub fn unscale(&self, s: f64) -> f64 {
        self.sigma * s + self.nu
    }
}

/// Samples −σ f(σs+ν), or −(σ/mn) f_F((σs+ν)/mn) when `fixed_trace` is set.
pub fn soft_edge_transform<D: EigenDensity + ?Sized>(
    d: &D,
    scaling: &SoftEdgeScaling,
    grid: &[f64],
    fixed_trace: bool,
) -> Result<Vec<(f64, f64)>> {
    let mn = if fixed_trace { scaling.m * scaling.n as f64 } else { 1.0 };
    grid.iter()
        .map(|&s| {
            let lam = scaling.unscale(s);
            if lam < 0.0 {
                return Err(Error::Domain(format!(
                    "grid point s = {s} maps to sigma*s + nu = {lam} < 0"
                )));
            }
            Ok((s, -scaling.sigma / mn * d.pdf(lam / mn)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Leading-order log of the Tracy-Widom density: −β|x|³/24 on the left,
/// −2βx^{3/2}/3 on the right.
pub fn tw_tail_log(x: f64, beta: f64, side: Side) -> Result<f64> {
    match side {
        Side::Left if x < 0.0 => Ok(-beta * x.abs().powi(3) / 24.0),
        Side::Right if x > 0.0 => Ok(-2.0 * beta * x.powf(1.5) / 3.0),
        _ => Err(Error::Domain(format!("{side:?} tail asymptotics evaluated at x = {x}"))),
    }
}

/// Intermediate quantities of the right rate function at one ζ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelperChain {
    pub p: f64,
    pub q: f64,
    pub b: f64,
    pub r: f64,
    pub theta: f64,
    pub w: f64,
    pub u: f64,
    pub delta: f64,
    pub s: f64,
    /// |W³ + PW + Q| relative to the size of its terms.
    pub cubic_residual: f64,
}

/// A, ζ± and Δ₋ of the large-deviation description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeDeviationParams {
    pub n: usize,
    pub beta: f64,
    pub a: f64,
    pub zeta_minus: f64,
    pub zeta_plus: f64,
    pub delta_minus: f64,
}

pub fn ld_params(params: &EnsembleParams) -> Result<LargeDeviationParams> {
    let beta = params.beta.to_f64();
    let n = params.n as f64;
    let a = (2.0 * (f64::from(params.alpha) + 1.0) - beta) / (beta * n);
    LargeDeviationParams::from_a(params.n, beta, a)
}

impl LargeDeviationParams {
    pub fn from_a(n: usize, beta: f64, a: f64) -> Result<Self> {
        if !(a > -1.0) {
            return Err(Error::Domain(format!("large deviations need A > -1, got A = {a}")));
        }
        let root = (1.0 + a).sqrt();
        Ok(LargeDeviationParams {
            n,
            beta,
            a,
            zeta_minus: (1.0 - root).powi(2),
            zeta_plus: (1.0 + root).powi(2),
            delta_minus: 4.0 * root,
        })
    }

    /// Typical location nζ₋ of the smallest eigenvalue.
    pub fn typical(&self) -> f64 {
        self.n as f64 * self.zeta_minus
    }

    /// P, Q, B, R, θ = atan2(2√B, Q), W, U = W², Δ = U − ζ and S(ζ).
    pub fn helper_chain(&self, zeta: f64) -> Result<HelperChain> {
        let a = self.a;
        if !(zeta >= 0.0) {
            return Err(Error::Domain(format!("helper chain needs zeta >= 0, got {zeta}")));
        }
        let p = -zeta - 2.0 * (a + 2.0);
        if p >= 0.0 {
            return Err(Error::Domain(format!("P = {p} >= 0 at zeta = {zeta}")));
        }
        let sz = zeta.sqrt();
        let q = 2.0 * a * sz;
        let b = -(p.powi(3) / 27.0 + q * q / 4.0);
        if b < 0.0 {
            return Err(Error::Domain(format!("B = {b} < 0 at zeta = {zeta}")));
        }
        let r = (-p.powi(3) / 27.0).sqrt();
        let theta = (2.0 * b.sqrt()).atan2(q);
        let w = 2.0 * p / (3.0 * r.cbrt()) * ((theta + 2.0 * std::f64::consts::PI) / 3.0).cos();
        let u = w * w;
        let delta = u - zeta;
        if !(delta > 0.0) {
            return Err(Error::Domain(format!("Delta = {delta} <= 0 at zeta = {zeta}")));
        }
        let scale = w.abs().powi(3) + (p * w).abs() + q.abs();
        let cubic_residual = (w.powi(3) + p * w + q).abs() / scale.max(f64::MIN_POSITIVE);
        if cubic_residual > CUBIC_TOLERANCE {
            return Err(Error::Numerical(format!(
                "root selection: W = {w} leaves W^3 + PW + Q at relative size {cubic_residual} (zeta = {zeta})"
            )));
        }
        // ζU → 0 only when A = 0, where its coefficient vanishes too.
        let log_zu = if a == 0.0 { 0.0 } else { a * a / 4.0 * (zeta * u).ln() };
        let s = (u + zeta) / 2.0 - delta * delta / 32.0 - (delta / 4.0).ln()
            + a / 4.0 * (w - sz).powi(2)
            + log_zu
            - a * (a + 2.0) * ((w + sz) / 2.0).ln();
        Ok(HelperChain {
            p,
            q,
            b,
            r,
            theta,
            w,
            u,
            delta,
            s,
            cubic_residual,
        })
    }

    /// φ₋(z) for 0 ≤ z < ζ₋.
    pub fn left_rate(&self, z: f64) -> Result<f64> {
        let zm = self.zeta_minus;
        if !(z >= 0.0 && z < zm) {
            return Err(Error::Domain(format!("left rate needs 0 <= z < zeta_- = {zm}, got {z}")));
        }
        let a = self.a;
        let dm = self.delta_minus;
        let sz = z.sqrt();
        let szd = (z + dm).sqrt();
        Ok(-a / 2.0 * (-z / zm).ln_1p() - sz * szd / 2.0
            + 2.0 * ((szd - sz) / dm.sqrt()).ln()
            + a * (2.0 * (z / zm).sqrt() * (szd - sz) / dm).ln_1p())
    }

    /// φ₊(z) = [S(z+ζ₋) − S(ζ₋)]/2 for z ≥ 0.
    pub fn right_rate(&self, z: f64) -> Result<f64> {
        if !(z >= 0.0) {
            return Err(Error::Domain(format!("right rate needs z >= 0, got {z}")));
        }
        let hi = self.helper_chain(z + self.zeta_minus)?;
        let lo = self.helper_chain(self.zeta_minus)?;
        Ok(0.5 * (hi.s - lo.s))
    }

    /// Unnormalized asymptotic ln f(x): −βnφ₋((nζ₋−x)/n) left of nζ₋,
    /// −βn²φ₊((x−nζ₋)/n) right of it.
    pub fn log_density(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("asymptotic density needs x >= 0, got {x}")));
        }
        let n = self.n as f64;
        let t = self.typical();
        if x == 0.0 && self.a != 0.0 {
            // φ₋ diverges like −(A/2)ln(1 − z/ζ₋) as z → ζ₋.
            return Ok(if self.a > 0.0 { f64::NEG_INFINITY } else { f64::INFINITY });
        }
        if x < t {
            let z = (t - x) / n;
            if z >= self.zeta_minus {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(-self.beta * n * self.left_rate(z)?)
        } else {
            Ok(-self.beta * n * n * self.right_rate((x - t) / n)?)
        }
    }
}

pub fn ld_left_rate(p: &LargeDeviationParams, z: f64) -> Result<f64> {
    p.left_rate(z)
}

pub fn ld_right_rate(p: &LargeDeviationParams, z: f64) -> Result<f64> {
    p.right_rate(z)
}

pub fn ld_log_density(params: &EnsembleParams, x: f64) -> Result<f64> {
    ld_params(params)?.log_density(x)
}

/// Reference Tracy-Widom curve read from a two-column `s,density` CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TwTable {
    rows: Vec<(f64, f64)>,
}

impl TwTable {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read Tracy-Widom table {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// A first row that does not parse as numbers is taken as a header.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Usage(format!("Tracy-Widom table: {e}")))?;
            if record.len() < 2 {
                return Err(Error::Usage(format!("Tracy-Widom table row {} has fewer than two columns", i + 1)));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(s), Ok(v)) => rows.push((s, v)),
                _ if i == 0 => continue,
                _ => return Err(Error::Usage(format!("Tracy-Widom table row {} is not numeric", i + 1))),
            }
        }
        if rows.len() < 2 {
            return Err(Error::Usage("Tracy-Widom table needs at least two rows".into()));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(TwTable { rows })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.rows[0].0, self.rows[self.rows.len() - 1].0)
    }

    /// Linear interpolation; outside the tabulated range is an error.
    pub fn interpolate(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(s >= lo && s <= hi) {
            return Err(Error::Domain(format!("s = {s} outside the Tracy-Widom table range [{lo}, {hi}]")));
        }
        let k = self.rows.partition_point(|r| r.0 < s);
        if k == 0 {
            return Ok(self.rows[0].1);
        }
        let (s0, v0) = self.rows[k - 1];
        let (s1, v1) = self.rows[k];
        if s1 == s0 {
            return Ok(v1);
        }
        Ok(v0 + (v1 - v0) * (s - s0) / (s1 - s0))
    }
}
