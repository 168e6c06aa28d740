//! Dense univariate polynomials over a [`Scalar`] field.

use std::ops::{Add, Mul, Sub};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{BigFloat, Scalar};

/// `coeffs[i]` is the coefficient of `x^i`. Trailing zeros are never stored,
/// so the zero polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DensePolynomial<F> {
    coeffs: Vec<F>,
}

impl<F: Scalar> DensePolynomial<F> {
    pub fn zero() -> Self {
        DensePolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Option<&F> {
        self.coeffs.get(i)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn scale(&self, s: &F) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.clone() * s).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let ctx = self.coeffs[0].context();
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * &F::from_i64(k as i64, &ctx))
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero(&x.context());
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `(x + a)·s1 − b·x·s1′ + c·x·s0`, the affine step of the smallest
    /// eigenvalue recursion.
    pub fn combine_recursion_step(s1: &Self, s0: &Self, a: &F, b: &F, c: &F) -> Self {
        let len = (s1.coeffs.len() + 1).max(s0.coeffs.len() + 1);
        if s1.is_zero() && s0.is_zero() {
            return Self::zero();
        }
        let ctx = a.context();
        let mut out = Vec::with_capacity(len);
        // x·s1′ contributes k·s1[k] to x^k, so the diagonal factor is a − k·b.
        let mut factor = a.clone();
        for k in 0..len {
            let mut acc = F::zero(&ctx);
            if let Some(s) = s1.coeffs.get(k) {
                acc = acc + &(factor.clone() * s);
                factor = factor - b;
            }
            if k > 0 {
                if let Some(s) = s1.coeffs.get(k - 1) {
                    acc = acc + s;
                }
                if let Some(s) = s0.coeffs.get(k - 1) {
                    acc = acc + &(c.clone() * s);
                }
            }
            out.push(acc);
        }
        Self::from_coeffs(out)
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let ctx = self.coeffs[0].context();
        let mut coeffs = vec![F::zero(&ctx); k];
        coeffs.extend(self.coeffs.iter().cloned());
        DensePolynomial { coeffs }
    }

    fn zip_with(&self, other: &Self, negate_rhs: bool) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            let v = match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) if negate_rhs => a.clone() - b,
                (Some(a), Some(b)) => a.clone() + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) if negate_rhs => -b.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.push(v);
        }
        Self::from_coeffs(out)
    }
}

impl<'a, F: Scalar> Add<&'a DensePolynomial<F>> for &'a DensePolynomial<F> {
    type Output = DensePolynomial<F>;
    fn add(self, rhs: &'a DensePolynomial<F>) -> DensePolynomial<F> {
        self.zip_with(rhs, false)
    }
}

impl<'a, F: Scalar> Sub<&'a DensePolynomial<F>> for &'a DensePolynomial<F> {
    type Output = DensePolynomial<F>;
    fn sub(self, rhs: &'a DensePolynomial<F>) -> DensePolynomial<F> {
        self.zip_with(rhs, true)
    }
}

impl<'a, F: Scalar> Mul<&'a DensePolynomial<F>> for &'a DensePolynomial<F> {
    type Output = DensePolynomial<F>;
    fn mul(self, rhs: &'a DensePolynomial<F>) -> DensePolynomial<F> {
        if self.is_zero() || rhs.is_zero() {
            return DensePolynomial::zero();
        }
        let ctx = self.coeffs[0].context();
        let mut out = vec![F::zero(&ctx); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + &(a.clone() * b);
            }
        }
        DensePolynomial::from_coeffs(out)
    }
}

/// A polynomial whose coefficient field is only known at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPolynomial {
    Exact(DensePolynomial<BigRational>),
    Float(DensePolynomial<BigFloat>),
}

impl AnyPolynomial {
    pub fn try_add(&self, other: &AnyPolynomial) -> Result<AnyPolynomial> {
        match (self, other) {
            (AnyPolynomial::Exact(p), AnyPolynomial::Exact(q)) => Ok(AnyPolynomial::Exact(p + q)),
            (AnyPolynomial::Float(p), AnyPolynomial::Float(q)) => {
                let bits = |poly: &DensePolynomial<BigFloat>| poly.coeffs().first().map(|c| c.precision());
                match (bits(p), bits(q)) {
                    (Some(a), Some(b)) if a != b => Err(Error::Usage(format!(
                        "cannot add polynomials at {a} and {b} bits of precision"
                    ))),
                    _ => Ok(AnyPolynomial::Float(p + q)),
                }
            }
            _ => Err(Error::Usage("cannot add an exact and a float polynomial".into())),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            AnyPolynomial::Exact(p) => p.degree(),
            AnyPolynomial::Float(p) => p.degree(),
        }
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        match self {
            AnyPolynomial::Exact(p) => p.coeffs().iter().map(Scalar::to_f64).collect(),
            AnyPolynomial::Float(p) => p.coeffs().iter().map(Scalar::to_f64).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::rat;
    use crate::scalar::FloatContext;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn p(cs: &[i64]) -> DensePolynomial<BigRational> {
        DensePolynomial::from_coeffs(cs.iter().map(|&c| rat(c, 1)).collect())
    }

    #[test]
    fn add_examples() {
        assert_eq!(&p(&[1, 1]) + &p(&[0, 2]), p(&[1, 3]));
        assert_eq!(&p(&[4, 0, 7]) + &DensePolynomial::zero(), p(&[4, 0, 7]));
        let sum = &p(&[0, 0, 1]) + &p(&[0, 0, -1]);
        assert!(sum.is_zero());
        assert_eq!(sum.coeffs().len(), 0);
        assert_eq!(sum.degree(), None);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p(&[3, 1]).derivative(), p(&[1]));
        assert!(p(&[5]).derivative().is_zero());
        assert_eq!(p(&[0, 2, 0, 1]).derivative(), p(&[2, 0, 3]));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p(&[3, 1]).eval(&rat(0, 1)), rat(3, 1));
        assert_eq!(p(&[3, 1]).eval(&rat(1, 1)), rat(4, 1));
        // g for (n=2, α=1, β=2) is x + 3.
        assert_eq!(p(&[3, 1]).eval(&rat(10, 1)), rat(13, 1));
        assert_eq!(DensePolynomial::<BigRational>::zero().eval(&rat(2, 1)), rat(0, 1));
    }

    #[test]
    fn recursion_step_examples() {
        let zero = DensePolynomial::zero();
        let out = DensePolynomial::combine_recursion_step(&p(&[1]), &zero, &rat(3, 1), &rat(1, 1), &rat(0, 1));
        assert_eq!(out, p(&[3, 1]));
        let out = DensePolynomial::combine_recursion_step(&zero, &zero, &rat(3, 1), &rat(1, 1), &rat(2, 1));
        assert!(out.is_zero());
        let out = DensePolynomial::combine_recursion_step(&p(&[0, 1]), &p(&[1]), &rat(0, 1), &rat(1, 1), &rat(1, 1));
        assert_eq!(out, p(&[0, 0, 1]));
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let exact = AnyPolynomial::Exact(p(&[1, 2]));
        let ctx = FloatContext::new(256);
        let float = AnyPolynomial::Float(DensePolynomial::from_coeffs(vec![BigFloat::from_i64(1, &ctx)]));
        assert!(matches!(exact.try_add(&float), Err(Error::Usage(_))));
        let wide = AnyPolynomial::Float(DensePolynomial::from_coeffs(vec![BigFloat::from_i64(1, &FloatContext::new(512))]));
        assert!(matches!(float.try_add(&wide), Err(Error::Usage(_))));
        assert_eq!(exact.try_add(&exact).unwrap(), AnyPolynomial::Exact(p(&[2, 4])));
    }

    #[test]
    fn multiplication() {
        assert_eq!(&p(&[1, 1]) * &p(&[-1, 1]), p(&[-1, 0, 1]));
        assert_eq!(p(&[1, 2]).shift(2), p(&[0, 0, 1, 2]));
    }

    fn rational() -> impl Strategy<Value = BigRational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    fn poly() -> impl Strategy<Value = DensePolynomial<BigRational>> {
        prop::collection::vec(rational(), 0..8).prop_map(DensePolynomial::from_coeffs)
    }

    proptest! {
        #[test]
        fn add_then_sub_is_identity(a in poly(), b in poly()) {
            let back = &(&a + &b) - &b;
            prop_assert_eq!(back, a);
        }

        #[test]
        fn add_degree_bound(a in poly(), b in poly()) {
            let s = &a + &b;
            let bound = a.degree().max(b.degree());
            prop_assert!(s.degree() <= bound);
            if a.degree() != b.degree() {
                prop_assert_eq!(s.degree(), bound);
            }
        }

        #[test]
        fn derivative_is_linear(a in poly(), b in poly(), s in rational(), t in rational()) {
            let lhs = (&a.scale(&s) + &b.scale(&t)).derivative();
            let rhs = &a.derivative().scale(&s) + &b.derivative().scale(&t);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn recursion_step_commutes_with_eval(
            s1 in poly(), s0 in poly(), a in rational(), b in rational(), c in rational(), x in rational()
        ) {
            let out = DensePolynomial::combine_recursion_step(&s1, &s0, &a, &b, &c);
            let expected = (x.clone() + &a) * s1.eval(&x)
                - b.clone() * &x * s1.derivative().eval(&x)
                + c.clone() * &x * s0.eval(&x);
            prop_assert_eq!(out.eval(&x), expected);
        }
    }
}
