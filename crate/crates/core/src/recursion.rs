//! The polynomial recursion for g_{n,α,β} and the normalization constants.

use crate::error::{Error, Result};
use crate::params::{usize_to_i64, EnsembleParams};
use crate::poly::DensePolynomial;
use crate::scalar::Scalar;
use crate::special::{ln_gamma, rising_factorial};

/// Relative tolerance for the two routes to c.
pub const NORM_ROUTE_TOLERANCE: f64 = 1e-10;

/// g_{n,α,β} together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GPolynomial<F: Scalar> {
    pub params: EnsembleParams,
    pub poly: DensePolynomial<F>,
}

impl<F: Scalar> GPolynomial<F> {
    pub fn eval(&self, x: &F) -> F {
        self.poly.eval(x)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let ctx = self.ctx();
        self.poly.eval(&F::from_f64(x, &ctx)).to_f64()
    }

    pub fn ctx(&self) -> F::Context {
        self.poly
            .coeffs()
            .first()
            .map(|c| c.context())
            .expect("g has a positive constant term")
    }
}

/// Runs the recursion from g_{n,0,β} = 1 up to exponent α.
///
/// Each lift a−1 → a applies, for i = 1..n−1,
/// S_i = (x + 2a/β + n−i+1) S_{i−1} − (2x/(β(n−i))) S′_{i−1} + x(i−1)(1 + 2a/(β(n−i))) S_{i−2}
/// starting from S₀ = g_{n,a−1,β}, S₋₁ = 0; then g_{n,a,β} = S_{n−1}.
pub fn compute_g<F: Scalar>(params: &EnsembleParams, ctx: &F::Context) -> Result<GPolynomial<F>> {
    let beta: F = params.beta_in(ctx)?;
    let n = params.n;
    let two_over_beta = F::from_i64(2, ctx) / &beta;
    let mut g = DensePolynomial::constant(F::one(ctx));
    for a in 1..=params.alpha {
        let lift = two_over_beta.clone() * &F::from_i64(i64::from(a), ctx);
        let mut prev = DensePolynomial::zero();
        let mut cur = g;
        for i in 1..n {
            let rem = F::from_i64(usize_to_i64(n - i), ctx);
            let shift = lift.clone() + &F::from_i64(usize_to_i64(n - i + 1), ctx);
            let deriv = two_over_beta.clone() / &rem;
            let cross = F::from_i64(usize_to_i64(i - 1), ctx) * &(F::one(ctx) + &(lift.clone() / &rem));
            let next = DensePolynomial::combine_recursion_step(&cur, &prev, &shift, &deriv, &cross);
            prev = cur;
            cur = next;
        }
        g = cur;
    }
    let out = GPolynomial {
        params: params.clone(),
        poly: g,
    };
    check_g_invariants(&out)?;
    Ok(out)
}

fn check_g_invariants<F: Scalar>(g: &GPolynomial<F>) -> Result<()> {
    let expected = g.params.degree();
    if g.poly.degree() != Some(expected) {
        return Err(Error::Consistency(format!(
            "g has degree {:?}, expected {expected}",
            g.poly.degree()
        )));
    }
    let c0 = g.poly.coeff(0).expect("non-zero polynomial");
    if c0.sign() != std::cmp::Ordering::Greater {
        return Err(Error::Consistency("g(0) is not positive".into()));
    }
    Ok(())
}

/// ln C_{n,α,β} for real α > −1 and β > 0.
pub fn ln_selberg_constant(n: usize, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > -1.0) || !(beta > 0.0) || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "Selberg constant needs n >= 1, alpha > -1, beta > 0 (got n={n}, alpha={alpha}, beta={beta})"
        )));
    }
    let nf = n as f64;
    let gamma = nf * (alpha + beta * (nf - 1.0) / 2.0 + 1.0);
    let mut acc = gamma * (beta / 2.0).ln();
    let num = ln_gamma(beta / 2.0 + 1.0);
    for j in 0..n {
        let jf = j as f64;
        acc += num - ln_gamma(beta * (jf + 1.0) / 2.0 + 1.0) - ln_gamma(beta * jf / 2.0 + alpha + 1.0);
    }
    Ok(acc)
}

/// C_{n,α,β}, the normalization of the joint eigenvalue density.
pub fn selberg_constant_c(params: &EnsembleParams) -> Result<f64> {
    ln_selberg_constant(params.n, f64::from(params.alpha), params.beta.to_f64()).map(f64::exp)
}

/// ln c_{n,α,β} from the Gamma-product formula, in binary64.
pub fn ln_norm_constant_gamma_product(params: &EnsembleParams) -> f64 {
    let n = params.n as f64;
    let a = f64::from(params.alpha);
    let b = params.beta.to_f64();
    let mut acc = n.ln() + (n * a + 1.0) * (b / 2.0).ln() + ln_gamma(b / 2.0 + 1.0)
        - ln_gamma(b * n / 2.0 + 1.0)
        - ln_gamma(b * (n - 1.0) / 2.0 + a + 1.0);
    for j in 0..params.n.saturating_sub(1) {
        let jf = j as f64;
        acc += ln_gamma(b * jf / 2.0 + b + 1.0) - ln_gamma(b * jf / 2.0 + a + 1.0);
    }
    acc
}

/// The Gamma-product c with every Gamma ratio collapsed to a rising factorial:
/// c = n (β/2)^{nα+1} / ∏_{j=0}^{n−1} (βj/2 + 1)_α.
pub fn norm_constant_rising<F: Scalar>(params: &EnsembleParams, ctx: &F::Context) -> Result<F> {
    let beta: F = params.beta_in(ctx)?;
    let half_beta = beta / &F::from_i64(2, ctx);
    let alpha = u64::from(params.alpha);
    let mut denom = F::one(ctx);
    for j in 0..params.n {
        let z = half_beta.clone() * &F::from_i64(usize_to_i64(j), ctx) + &F::one(ctx);
        denom = denom * &rising_factorial(&z, alpha);
    }
    let exp = params.n as u64 * alpha + 1;
    Ok(F::from_i64(usize_to_i64(params.n), ctx) * &half_beta.powi(exp) / &denom)
}

/// 1/∫₀^∞ e^{−βnx/2} x^α g(x) dx, exact whenever the field is.
pub fn norm_constant_integral<F: Scalar>(g: &GPolynomial<F>) -> Result<F> {
    let ctx = g.ctx();
    let params = &g.params;
    let beta: F = params.beta_in(&ctx)?;
    let r_inv = F::from_i64(2, &ctx) / &(beta * &F::from_i64(usize_to_i64(params.n), &ctx));
    let alpha = i64::from(params.alpha);
    // (α+j)! r^{−(α+j+1)}, advanced one j at a time.
    let mut fact = F::one(&ctx);
    for k in 2..=alpha {
        fact = fact * &F::from_i64(k, &ctx);
    }
    let mut weight = fact * &r_inv.powi(alpha as u64 + 1);
    let mut total = F::zero(&ctx);
    for (j, gj) in g.poly.coeffs().iter().enumerate() {
        if j > 0 {
            weight = weight * &F::from_i64(alpha + j as i64, &ctx) * &r_inv;
        }
        total = total + &(gj.clone() * &weight);
    }
    Ok(F::one(&ctx) / &total)
}

/// c_{n,α,β} by the normalization integral, checked against the Gamma-product
/// formula. A log difference of ε is a relative error of about ε in c.
pub fn norm_constant_c<F: Scalar>(g: &GPolynomial<F>) -> Result<F> {
    let c = norm_constant_integral(g)?;
    let ln_integral = c.ln();
    let ln_product = ln_norm_constant_gamma_product(&g.params);
    if !ln_integral.is_finite() || (ln_integral - ln_product).abs() > NORM_ROUTE_TOLERANCE {
        return Err(Error::Consistency(format!(
            "normalization routes disagree for n={}, alpha={}, beta={}: ln c = {ln_integral} by integral, {ln_product} by Gamma product",
            g.params.n, g.params.alpha, g.params.beta
        )));
    }
    Ok(c)
}
