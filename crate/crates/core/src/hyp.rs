//! ₁F₁^{(β/2)}(−n+1; 2α/β+2; −x·𝟙_α) through the same recursion as g.

use crate::error::Result;
use crate::params::{usize_to_i64, EnsembleParams};
use crate::poly::DensePolynomial;
use crate::recursion::compute_g;
use crate::scalar::Scalar;
use crate::special::rising_factorial;

/// The matrix-argument ₁F₁ as a polynomial of degree α(n−1) in x.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergeomResult<F: Scalar> {
    pub params: EnsembleParams,
    pub poly: DensePolynomial<F>,
    /// (β/2)^{α(n−1)} ∏_{j=0}^{n−2} Γ(βj/2+β+1)/Γ(βj/2+α+β+1).
    pub prefactor: F,
}

impl<F: Scalar> HypergeomResult<F> {
    pub fn eval(&self, x: &F) -> F {
        self.poly.eval(x)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let ctx = self.prefactor.context();
        self.poly.eval(&F::from_f64(x, &ctx)).to_f64()
    }
}

/// Each Gamma ratio is the reciprocal rising factorial 1/(βj/2+β+1)_α.
pub fn hyp1f1_prefactor<F: Scalar>(params: &EnsembleParams, ctx: &F::Context) -> Result<F> {
    let beta: F = params.beta_in(ctx)?;
    let half = beta.clone() / &F::from_i64(2, ctx);
    let alpha = u64::from(params.alpha);
    let mut acc = half.powi(alpha * (params.n as u64 - 1));
    for j in 0..params.n.saturating_sub(1) {
        let z = half.clone() * &F::from_i64(usize_to_i64(j), ctx) + &beta + &F::one(ctx);
        acc = acc / &rising_factorial(&z, alpha);
    }
    Ok(acc)
}

pub fn hyp1f1_matrix<F: Scalar>(params: &EnsembleParams, ctx: &F::Context) -> Result<HypergeomResult<F>> {
    let g = compute_g(params, ctx)?;
    let prefactor = hyp1f1_prefactor(params, ctx)?;
    Ok(HypergeomResult {
        params: params.clone(),
        poly: g.poly.scale(&prefactor),
        prefactor,
    })
}

/// The classical truncated Kummer series Σ_{k=0}^{n−1} (−n+1)_k/(c)_k (−x)^k/k!.
pub fn kummer_polynomial<F: Scalar>(n: usize, c: &F) -> DensePolynomial<F> {
    let ctx = c.context();
    let a = F::from_i64(1 - usize_to_i64(n), &ctx);
    let mut coeffs = Vec::with_capacity(n);
    for k in 0..n as u64 {
        let sign = if k % 2 == 0 { F::one(&ctx) } else { -F::one(&ctx) };
        let fact = F::from_bigint(&crate::special::factorial(k), &ctx);
        coeffs.push(sign * &rising_factorial(&a, k) / &(rising_factorial(c, k) * &fact));
    }
    DensePolynomial::from_coeffs(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{rat, Beta};
    use crate::scalar::{BigFloat, FloatContext};
    use num_rational::BigRational;

    fn exact(n: usize, alpha: u32, beta: Beta) -> HypergeomResult<BigRational> {
        hyp1f1_matrix(&EnsembleParams::new(n, alpha, beta).unwrap(), &()).unwrap()
    }

    #[test]
    fn two_by_two_is_one_plus_x_over_three() {
        let h = exact(2, 1, Beta::integer(2));
        assert_eq!(h.poly.coeffs(), &[rat(1, 1), rat(1, 3)]);
    }

    #[test]
    fn value_at_origin_is_one() {
        for (n, a, b) in [(4, 5, Beta::integer(1)), (3, 6, Beta::ratio(1, 3)), (1, 3, Beta::integer(2))] {
            let h = exact(n, a, b);
            assert_eq!(h.eval(&rat(0, 1)), rat(1, 1));
        }
    }

    #[test]
    fn tabulated_values() {
        let cases = [
            (3, 6, Beta::ratio(1, 3), 10.0, 22.6555),
            (4, 5, Beta::integer(1), 5.0, 335.899),
            (5, 3, Beta::integer(2), 8.0, 87447.5),
            (5, 4, Beta::integer(3), 2.0, 320.040),
            (7, 3, Beta::integer(4), 1.0, 72.2218),
        ];
        for (n, a, b, x, v) in cases {
            let h = exact(n, a, b);
            let got = h.eval_f64(x);
            assert!((got - v).abs() <= 1e-4 * v, "n={n} alpha={a}: {got} vs {v}");
        }
        let p = EnsembleParams::new(3, 2, "5pi".parse().unwrap()).unwrap();
        let h: HypergeomResult<BigFloat> = hyp1f1_matrix(&p, &FloatContext::default()).unwrap();
        assert!((h.eval_f64(7.0) - 203.910).abs() <= 1e-4 * 203.910);
    }

    #[test]
    fn tabulated_polynomial_five_three_two() {
        let h = exact(5, 3, Beta::integer(2));
        let expected = [
            rat(1, 1),
            rat(12, 5),
            rat(27, 10),
            rat(13, 7),
            rat(477, 560),
            rat(19, 70),
            rat(3091, 50400),
            rat(83, 8400),
            rat(53, 47040),
            rat(47, 529200),
            rat(13, 2822400),
            rat(1, 7056000),
            rat(1, 508032000),
        ];
        assert_eq!(h.poly.coeffs(), &expected);
    }

    #[test]
    fn alpha_one_is_scalar_kummer() {
        for beta in [1, 2, 4] {
            for n in 1..=6 {
                let h = exact(n, 1, Beta::integer(beta));
                let c = rat(2, beta) + rat(2, 1);
                assert_eq!(h.poly, kummer_polynomial(n, &c), "n={n} beta={beta}");
            }
        }
    }
}
