//! Smallest-eigenvalue densities in damped-polynomial form.
//!
//! The unrestricted density is f(x) = e^{−rx} Σ_{j=α}^{nα} κ_j x^j with
//! r = βn/2 and κ_j = c·g_{j−α}. Every κ_j is positive, so pointwise values
//! are evaluated as log-sum-exp and stay finite long after κ_j leaves the
//! binary64 range.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::params::{usize_to_i64, Beta, EnsembleParams};
use crate::poly::DensePolynomial;
use crate::quadrature;
use crate::recursion::{compute_g, norm_constant_c, GPolynomial};
use crate::scalar::Scalar;
use crate::special::{falling_from_below, ln_gamma, log_sum_exp, reg_gamma_int, rising_factorial};

/// A density on the positive half-line with an accurate CDF.
pub trait EigenDensity: Sync {
    /// Density value; zero outside the support.
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
}

fn check_x(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("density evaluated at x = {x} < 0")));
    }
    Ok(())
}

fn check_eta(eta: f64, alpha: u32) -> Result<()> {
    if !(eta > -f64::from(alpha) - 1.0) {
        return Err(Error::Domain(format!(
            "moment of order {eta} diverges; need eta > -alpha - 1 = {}",
            -i64::from(alpha) - 1
        )));
    }
    Ok(())
}

fn positive_logs<F: Scalar>(values: &[F], what: &str) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|v| {
            if v.sign() == std::cmp::Ordering::Greater {
                Ok(v.ln())
            } else {
                Err(Error::Consistency(format!("{what} has a non-positive coefficient")))
            }
        })
        .collect()
}

/// Unrestricted-trace density e^{−βnx/2} Σ κ_j x^j.
#[derive(Debug, Clone)]
pub struct ClosedFormDensity<F: Scalar> {
    pub params: EnsembleParams,
    /// `kappa[k]` is κ_{α+k}.
    pub kappa: Vec<F>,
    pub gamma: F,
    pub c: F,
    ln_kappa: Vec<f64>,
    /// ln of the Gamma-mixture weights κ_j j!/r^{j+1}.
    ln_weights: Vec<f64>,
    rate: f64,
}

/// Runs the recursion and assembles the density.
pub fn build_density<F: Scalar>(params: &EnsembleParams, ctx: &F::Context) -> Result<ClosedFormDensity<F>> {
    let g = compute_g(params, ctx)?;
    ClosedFormDensity::from_g(&g)
}

impl<F: Scalar> ClosedFormDensity<F> {
    pub fn from_g(g: &GPolynomial<F>) -> Result<Self> {
        let params = g.params.clone();
        let ctx = g.ctx();
        let c = norm_constant_c(g)?;
        let kappa: Vec<F> = g.poly.coeffs().iter().map(|gj| gj.clone() * &c).collect();
        let ln_kappa = positive_logs(&kappa, "the density")?;
        let rate = params.beta.to_f64() * params.n as f64 / 2.0;
        let ln_rate = rate.ln();
        let alpha = params.alpha as usize;
        let ln_weights = ln_kappa
            .iter()
            .enumerate()
            .map(|(k, lk)| {
                let j = (alpha + k) as f64;
                lk + ln_gamma(j + 1.0) - (j + 1.0) * ln_rate
            })
            .collect();
        let gamma = params.gamma(&ctx)?;
        Ok(ClosedFormDensity {
            params,
            kappa,
            gamma,
            c,
            ln_kappa,
            ln_weights,
            rate,
        })
    }

    fn ctx(&self) -> F::Context {
        self.c.context()
    }

    /// The exponential rate βn/2.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Lowest power of x, i.e. α.
    pub fn lowest_power(&self) -> usize {
        self.params.alpha as usize
    }

    /// (j, κ_j) for j = α..nα.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &F)> {
        let alpha = self.lowest_power();
        self.kappa.iter().enumerate().map(move |(k, v)| (alpha + k, v))
    }

    pub fn kappa_at(&self, j: usize) -> Option<&F> {
        j.checked_sub(self.lowest_power()).and_then(|k| self.kappa.get(k))
    }

    /// Σ κ_j x^j as a polynomial, including the zero coefficients below x^α.
    pub fn polynomial(&self) -> DensePolynomial<F> {
        DensePolynomial::from_coeffs(self.kappa.clone()).shift(self.lowest_power())
    }

    /// Σ_j κ_j j! (2/βn)^{j+1}, which is 1 exactly in rational mode.
    pub fn normalization_sum(&self) -> Result<F> {
        let ctx = self.ctx();
        let beta: F = self.params.beta_in(&ctx)?;
        let inv_rate = F::from_i64(2, &ctx) / &(beta * &F::from_i64(usize_to_i64(self.params.n), &ctx));
        let mut total = F::zero(&ctx);
        for (j, kj) in self.terms() {
            let fact = F::from_bigint(&crate::special::factorial(j as u64), &ctx);
            total = total + &(kj.clone() * &fact * &inv_rate.powi(j as u64 + 1));
        }
        Ok(total)
    }

    /// ln f(x) for x > 0.
    pub fn ln_eval(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        if x == 0.0 {
            return Ok(if self.params.alpha == 0 { self.ln_kappa[0] } else { f64::NEG_INFINITY });
        }
        let lx = x.ln();
        let alpha = self.lowest_power();
        let s = log_sum_exp(self.ln_kappa.iter().enumerate().map(|(k, lk)| lk + (alpha + k) as f64 * lx));
        Ok(s - self.rate * x)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.ln_eval(x).map(f64::exp)
    }

    /// P(λ_min ≤ x), as a mixture of Gamma(j+1, r) laws with weights κ_j j!/r^{j+1}.
    pub fn cdf_checked(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        Ok(self.mixture(x, true))
    }

    /// P(λ_min > x), accurate in the far right tail.
    pub fn survival(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        Ok(self.mixture(x, false))
    }

    fn mixture(&self, x: f64, lower: bool) -> f64 {
        let y = self.rate * x;
        let alpha = self.lowest_power() as u64;
        let total: f64 = self
            .ln_weights
            .iter()
            .enumerate()
            .map(|(k, lw)| {
                let (p, q) = reg_gamma_int(alpha + k as u64 + 1, y);
                lw.exp() * if lower { p } else { q }
            })
            .sum();
        total.clamp(0.0, 1.0)
    }

    /// ⟨x^η⟩ for integer η > −α−1, exact in rational mode.
    pub fn moment_exact(&self, eta: i64) -> Result<F> {
        check_eta(eta as f64, self.params.alpha)?;
        let ctx = self.ctx();
        let beta: F = self.params.beta_in(&ctx)?;
        let inv_rate = F::from_i64(2, &ctx) / &(beta * &F::from_i64(usize_to_i64(self.params.n), &ctx));
        let mut total = F::zero(&ctx);
        for (j, kj) in self.terms() {
            let shifted = (j as i64 + eta) as u64;
            let fact = F::from_bigint(&crate::special::factorial(shifted), &ctx);
            total = total + &(kj.clone() * &fact * &inv_rate.powi(shifted + 1));
        }
        Ok(total)
    }

    /// ⟨x^η⟩ for real η > −α−1.
    pub fn moment(&self, eta: f64) -> Result<f64> {
        check_eta(eta, self.params.alpha)?;
        let ln_inv_rate = -self.rate.ln();
        Ok(log_sum_exp(self.terms().zip(&self.ln_kappa).map(|((j, _), lk)| {
            let s = j as f64 + eta + 1.0;
            lk + s * ln_inv_rate + ln_gamma(s)
        }))
        .exp())
    }

    /// JSON form: exact κ_j as numerator/denominator strings, floats otherwise.
    pub fn to_json(&self) -> Value {
        let kappa: Vec<Value> = self
            .terms()
            .zip(&self.ln_kappa)
            .map(|((j, v), lk)| coefficient_json(j, v, *lk))
            .collect();
        json!({
            "n": self.params.n,
            "alpha": self.params.alpha,
            "beta": beta_json(&self.params.beta),
            "gamma": scalar_json(&self.gamma),
            "kappa": kappa,
        })
    }
}

impl<F: Scalar> EigenDensity for ClosedFormDensity<F> {
    fn pdf(&self, x: f64) -> f64 {
        self.eval(x).unwrap_or(0.0)
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.mixture(x, true)
    }
}

/// Fixed-trace density Σ μ_j x^j (1−nx)^{γ−j−2} on [0, 1/n), where
/// μ_j = (2/β)^{j+1} κ_j Γ(γ)/Γ(γ−j−1).
#[derive(Debug, Clone)]
pub struct FixedTraceDensity<F: Scalar> {
    pub params: EnsembleParams,
    pub kappa: Vec<F>,
    pub gamma: F,
    /// `mu[k]` is μ_{α+k}.
    pub mu: Vec<F>,
    ln_mu: Vec<f64>,
    gamma_f64: f64,
}

pub fn build_fixed_trace<F: Scalar>(params: &EnsembleParams, ctx: &F::Context) -> Result<FixedTraceDensity<F>> {
    FixedTraceDensity::from_unrestricted(&build_density(params, ctx)?)
}

impl<F: Scalar> FixedTraceDensity<F> {
    pub fn from_unrestricted(d: &ClosedFormDensity<F>) -> Result<Self> {
        let params = d.params.clone();
        if params.n < 2 {
            return Err(Error::Unsupported(
                "fixed trace with n = 1 is a point mass at 1 (gamma - n*alpha - 1 = 0)".into(),
            ));
        }
        let ctx = d.ctx();
        let beta: F = params.beta_in(&ctx)?;
        let two_over_beta = F::from_i64(2, &ctx) / &beta;
        // Γ(γ)/Γ(γ−j−1) as (γ−1)(γ−2)⋯(γ−j−1); a zero factor is a pole of Γ(γ−j−1).
        let mu: Vec<F> = d
            .terms()
            .map(|(j, kj)| {
                two_over_beta.powi(j as u64 + 1) * kj * &falling_from_below(&d.gamma, j as u64 + 1)
            })
            .collect();
        if mu.iter().any(|m| m.sign() != std::cmp::Ordering::Greater) {
            return Err(Error::Unsupported(format!(
                "gamma - j - 1 reaches a non-positive integer for n={}, alpha={}, beta={}",
                params.n, params.alpha, params.beta
            )));
        }
        let ln_mu = positive_logs(&mu, "the fixed-trace density")?;
        Ok(FixedTraceDensity {
            gamma_f64: params.gamma_f64(),
            params,
            kappa: d.kappa.clone(),
            gamma: d.gamma.clone(),
            mu,
            ln_mu,
        })
    }

    fn ctx(&self) -> F::Context {
        self.gamma.context()
    }

    pub fn support_end(&self) -> f64 {
        1.0 / self.params.n as f64
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &F)> {
        let alpha = self.params.alpha as usize;
        self.mu.iter().enumerate().map(move |(k, v)| (alpha + k, v))
    }

    /// ln f_F(x); −∞ at and beyond x = 1/n.
    pub fn ln_eval(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        let t = self.params.n as f64 * x;
        if t >= 1.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if x == 0.0 {
            return Ok(if self.params.alpha == 0 { self.ln_mu[0] } else { f64::NEG_INFINITY });
        }
        let l1 = (-t).ln_1p();
        let ly = x.ln() - l1;
        let alpha = self.params.alpha as usize;
        let s = log_sum_exp(self.ln_mu.iter().enumerate().map(|(k, lm)| lm + (alpha + k) as f64 * ly));
        Ok((self.gamma_f64 - 2.0) * l1 + s)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.ln_eval(x).map(f64::exp)
    }

    /// P(x_min ≤ x) by composite Gauss-Legendre quadrature.
    pub fn cdf_checked(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        Ok(EigenDensity::cdf(self, x))
    }

    /// ⟨x^η⟩_F for integer η > −α−1, exact in rational mode.
    pub fn moment_exact(&self, eta: i64) -> Result<F> {
        check_eta(eta as f64, self.params.alpha)?;
        let ctx = self.ctx();
        let beta: F = self.params.beta_in(&ctx)?;
        let two_over_beta = F::from_i64(2, &ctx) / &beta;
        let n = F::from_i64(usize_to_i64(self.params.n), &ctx);
        let ratio = if eta >= 0 {
            F::one(&ctx) / &rising_factorial(&self.gamma, eta as u64)
        } else {
            falling_from_below(&self.gamma, eta.unsigned_abs())
        };
        let alpha = self.params.alpha as usize;
        let mut total = F::zero(&ctx);
        for (k, kj) in self.kappa.iter().enumerate() {
            let j = alpha + k;
            let shifted = (j as i64 + eta) as u64;
            let fact = F::from_bigint(&crate::special::factorial(shifted), &ctx);
            total = total + &(two_over_beta.powi(j as u64 + 1) * kj * &fact / &n.powi(shifted + 1));
        }
        Ok(ratio * &total)
    }

    /// ⟨x^η⟩_F for real η > −α−1.
    pub fn moment(&self, eta: f64) -> Result<f64> {
        check_eta(eta, self.params.alpha)?;
        let ln_tob = (2.0 / self.params.beta.to_f64()).ln();
        let ln_n = (self.params.n as f64).ln();
        let alpha = self.params.alpha as usize;
        let ln_kappa = positive_logs(&self.kappa, "the density")?;
        let s = log_sum_exp(ln_kappa.iter().enumerate().map(|(k, lk)| {
            let j = (alpha + k) as f64;
            lk + (j + 1.0) * ln_tob + ln_gamma(j + eta + 1.0) - (j + eta + 1.0) * ln_n
        }));
        Ok((ln_gamma(self.gamma_f64) - ln_gamma(self.gamma_f64 + eta) + s).exp())
    }

    /// P(x) = Σ μ_j x^j (1−nx)^{nα−j}, so that f_F(x) = (1−nx)^{γ−nα−2} P(x).
    pub fn display_polynomial(&self) -> DensePolynomial<F> {
        let ctx = self.ctx();
        let top = self.params.n * self.params.alpha as usize;
        let base = DensePolynomial::from_coeffs(vec![F::one(&ctx), -F::from_i64(usize_to_i64(self.params.n), &ctx)]);
        let mut powers = vec![DensePolynomial::constant(F::one(&ctx))];
        for k in 1..=top {
            let next = &powers[k - 1] * &base;
            powers.push(next);
        }
        let mut acc = DensePolynomial::zero();
        for (j, mj) in self.terms() {
            let term = powers[top - j].scale(mj).shift(j);
            acc = &acc + &term;
        }
        acc
    }

    /// γ − nα − 2, the exponent of (1−nx) in the display form.
    pub fn display_exponent(&self) -> F {
        let ctx = self.ctx();
        let shift = usize_to_i64(self.params.n) * i64::from(self.params.alpha) + 2;
        self.gamma.clone() - &F::from_i64(shift, &ctx)
    }

    pub fn to_json(&self) -> Value {
        let kappa: Vec<Value> = self
            .kappa
            .iter()
            .enumerate()
            .map(|(k, v)| coefficient_json(self.params.alpha as usize + k, v, v.ln()))
            .collect();
        let mu: Vec<Value> = self
            .terms()
            .zip(&self.ln_mu)
            .map(|((j, v), lm)| coefficient_json(j, v, *lm))
            .collect();
        json!({
            "n": self.params.n,
            "alpha": self.params.alpha,
            "beta": beta_json(&self.params.beta),
            "gamma": scalar_json(&self.gamma),
            "kappa": kappa,
            "mu": mu,
        })
    }
}

impl<F: Scalar> EigenDensity for FixedTraceDensity<F> {
    fn pdf(&self, x: f64) -> f64 {
        self.eval(x).unwrap_or(0.0)
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let end = self.support_end();
        if x >= end {
            return 1.0;
        }
        let panels = (64.0 * x / end).ceil() as usize;
        quadrature::composite(20, panels, 0.0, x, |t| self.pdf(t)).clamp(0.0, 1.0)
    }
}

/// α = βn/2, which must be a non-negative integer for the recursion.
pub fn delay_time_alpha(n: usize, beta: &Beta) -> Result<u32> {
    let bad = || {
        Error::Unsupported(format!(
            "delay times need alpha = beta*n/2 to be a non-negative integer; beta = {beta}, n = {n} gives a non-integer"
        ))
    };
    let half_n = BigRational::new(BigInt::from(n), BigInt::from(2));
    match beta {
        Beta::Rational(q) => {
            let a = q * &half_n;
            if !a.is_integer() || a.is_negative() {
                return Err(bad());
            }
            a.to_integer().to_u32().ok_or_else(bad)
        }
        Beta::Real(v) => {
            let a = v * n as f64 / 2.0;
            if a.fract() != 0.0 || a < 0.0 || a > f64::from(u32::MAX) {
                return Err(bad());
            }
            Ok(a as u32)
        }
        Beta::Scaled { .. } => Err(bad()),
    }
}

/// Density of the largest proper delay time, τ_H/x² · f(τ_H/x) with α = βn/2.
#[derive(Debug, Clone)]
pub struct DelayTimeDensity<F: Scalar> {
    pub tau_h: f64,
    pub inner: ClosedFormDensity<F>,
}

pub fn delay_time_density<F: Scalar>(n: usize, beta: Beta, tau_h: f64, ctx: &F::Context) -> Result<DelayTimeDensity<F>> {
    if !(tau_h > 0.0) || !tau_h.is_finite() {
        return Err(Error::InvalidParameter(format!("tau_H must be positive, got {tau_h}")));
    }
    let alpha = delay_time_alpha(n, &beta)?;
    let params = EnsembleParams::new(n, alpha, beta)?;
    Ok(DelayTimeDensity {
        tau_h,
        inner: build_density(&params, ctx)?,
    })
}

impl<F: Scalar> DelayTimeDensity<F> {
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("delay-time density needs x > 0, got {x}")));
        }
        let lam = self.tau_h / x;
        Ok((self.tau_h.ln() - 2.0 * x.ln() + self.inner.ln_eval(lam)?).exp())
    }
}

impl<F: Scalar> EigenDensity for DelayTimeDensity<F> {
    fn pdf(&self, x: f64) -> f64 {
        self.eval(x).unwrap_or(0.0)
    }

    /// P(τ_max ≤ x) = P(λ_min ≥ τ_H/x).
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.inner.survival(self.tau_h / x).unwrap_or(0.0)
    }
}

/// `p/q` (or `p`) for a rational.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn beta_json(beta: &Beta) -> Value {
    match beta {
        Beta::Rational(q) => Value::String(format_rational(q)),
        other => json!(other.to_f64()),
    }
}

/// Exact values as `p/q` strings, float values as numbers.
pub fn scalar_json<F: Scalar>(v: &F) -> Value {
    match v.to_rational() {
        Some(q) => Value::String(format_rational(&q)),
        None => json!(v.to_f64()),
    }
}

fn coefficient_json<F: Scalar>(j: usize, v: &F, ln: f64) -> Value {
    match v.to_rational() {
        Some(q) => json!({"j": j, "num": q.numer().to_string(), "den": q.denom().to_string()}),
        None => {
            let f = v.to_f64();
            if f.is_finite() && (f != 0.0 || v.is_zero()) {
                json!(f)
            } else {
                json!({"j": j, "ln": ln})
            }
        }
    }
}
