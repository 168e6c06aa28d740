//! Ensemble parameters (n, α, β) and the choice of coefficient field.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Constant, FloatContext, Scalar, DEFAULT_FLOAT_BITS, LARGE_DEGREE, LARGE_FLOAT_BITS};

/// The Dyson-like index β.
///
/// Rational values keep every downstream computation exact; multiples of π
/// or e and arbitrary reals force the float backend.
#[derive(Debug, Clone, PartialEq)]
pub enum Beta {
    Rational(BigRational),
    /// `coeff · constant`, e.g. 5π.
    Scaled { coeff: BigRational, constant: Constant },
    Real(f64),
}

impl Beta {
    pub fn integer(v: i64) -> Self {
        Beta::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Beta::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn pi() -> Self {
        Beta::Scaled {
            coeff: <BigRational as One>::one(),
            constant: Constant::Pi,
        }
    }

    pub fn e() -> Self {
        Beta::Scaled {
            coeff: <BigRational as One>::one(),
            constant: Constant::E,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Beta::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Beta::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Beta::Rational(q) => ToPrimitive::to_f64(q).unwrap_or(f64::NAN),
            Beta::Scaled { coeff, constant } => ToPrimitive::to_f64(coeff).unwrap_or(f64::NAN) * constant.to_f64(),
            Beta::Real(v) => *v,
        }
    }

    /// β as an element of the field `F`.
    pub fn to_scalar<F: Scalar>(&self, ctx: &F::Context) -> Result<F> {
        match self {
            Beta::Rational(q) => Ok(F::from_rational(q, ctx)),
            Beta::Scaled { coeff, constant } => {
                let c = F::constant(*constant, ctx).ok_or_else(|| {
                    Error::Unsupported(format!("beta = {self} is irrational; use float mode"))
                })?;
                Ok(F::from_rational(coeff, ctx) * &c)
            }
            Beta::Real(v) => {
                if F::EXACT {
                    Err(Error::Unsupported(format!(
                        "beta = {v} given as a real number; use float mode or a rational literal"
                    )))
                } else {
                    Ok(F::from_f64(*v, ctx))
                }
            }
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            Beta::Rational(q) => q.is_positive(),
            Beta::Scaled { coeff, .. } => coeff.is_positive(),
            Beta::Real(v) => *v > 0.0 && v.is_finite(),
        }
    }
}

/// `p/q`, an integer or a decimal literal, read exactly.
pub fn parse_rational_literal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational_literal(p)?;
        let q = parse_rational_literal(q)?;
        if Zero::is_zero(&q) {
            return None;
        }
        return Some(p / q);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = BigInt::from(10u8).pow(frac_part.len() as u32);
    let q = BigRational::new(num, den);
    Some(if neg { -q } else { q })
}

impl FromStr for Beta {
    type Err = Error;

    /// Accepts `p/q`, decimal literals (read exactly), `pi`, `e`, and
    /// rational multiples such as `5pi`, `5*pi` or `1/2*e`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let bad = || Error::InvalidParameter(format!("cannot parse beta from {s:?}"));
        for (suffix, constant) in [("pi", Constant::Pi), ("e", Constant::E)] {
            if let Some(head) = t.strip_suffix(suffix) {
                let head = head.trim().trim_end_matches('*').trim();
                let coeff = if head.is_empty() {
                    <BigRational as One>::one()
                } else {
                    parse_rational_literal(head).ok_or_else(bad)?
                };
                let beta = Beta::Scaled { coeff, constant };
                if !beta.is_positive() {
                    return Err(Error::InvalidParameter(format!("beta must be positive, got {s}")));
                }
                return Ok(beta);
            }
        }
        let q = parse_rational_literal(&t).ok_or_else(bad)?;
        if !q.is_positive() {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {s}")));
        }
        Ok(Beta::Rational(q))
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Rational(q) => write!(f, "{q}"),
            Beta::Scaled { coeff, constant } if coeff.is_one() => write!(f, "{}", constant.symbol()),
            Beta::Scaled { coeff, constant } => write!(f, "{coeff}*{}", constant.symbol()),
            Beta::Real(v) => write!(f, "{v}"),
        }
    }
}

/// Matrix dimension n, Laguerre exponent α and β.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleParams {
    pub n: usize,
    pub alpha: u32,
    pub beta: Beta,
}

impl EnsembleParams {
    pub fn new(n: usize, alpha: u32, beta: Beta) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !beta.is_positive() {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        Ok(EnsembleParams { n, alpha, beta })
    }

    /// Accepts α as a real number and rejects anything but a non-negative
    /// integer; half-integer α would need a Tricomi-U seed, which is not built.
    pub fn with_real_alpha(n: usize, alpha: f64, beta: Beta) -> Result<Self> {
        if !(alpha >= 0.0) || alpha.fract() != 0.0 || alpha > u32::MAX as f64 {
            return Err(Error::Unsupported(format!(
                "alpha = {alpha}: the recursion is seeded at alpha = 0 and only reaches non-negative integers"
            )));
        }
        Self::new(n, alpha as u32, beta)
    }

    /// Degree α(n−1) of g.
    pub fn degree(&self) -> usize {
        self.alpha as usize * (self.n - 1)
    }

    pub fn beta_in<F: Scalar>(&self, ctx: &F::Context) -> Result<F> {
        self.beta.to_scalar(ctx)
    }

    /// γ = n(α + β(n−1)/2 + 1).
    pub fn gamma<F: Scalar>(&self, ctx: &F::Context) -> Result<F> {
        let beta: F = self.beta_in(ctx)?;
        let n = F::from_i64(self.n as i64, ctx);
        let half_nm1 = F::from_rational(&BigRational::new(BigInt::from(self.n as i64 - 1), BigInt::from(2)), ctx);
        let inner = F::from_i64(self.alpha as i64 + 1, ctx) + &(beta * &half_nm1);
        Ok(n * &inner)
    }

    pub fn gamma_f64(&self) -> f64 {
        let n = self.n as f64;
        n * (self.alpha as f64 + self.beta.to_f64() * (n - 1.0) / 2.0 + 1.0)
    }

    /// The coefficient field this parameter set runs in by default.
    pub fn default_precision(&self) -> Precision {
        Precision::auto(self)
    }
}

/// Which coefficient field a computation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Exact,
    Float(FloatContext),
}

impl Precision {
    /// Exact whenever β is rational and the degree is desk-sized; otherwise
    /// the float backend, widened to 512 bits beyond degree 2000.
    pub fn auto(params: &EnsembleParams) -> Self {
        let degree = params.degree();
        if params.beta.is_rational() && degree <= LARGE_DEGREE {
            Precision::Exact
        } else {
            Precision::Float(Self::float_for_degree(degree))
        }
    }

    pub fn float_for_degree(degree: usize) -> FloatContext {
        if degree > LARGE_DEGREE {
            FloatContext::new(LARGE_FLOAT_BITS)
        } else {
            FloatContext::new(DEFAULT_FLOAT_BITS)
        }
    }

    pub fn label(&self) -> String {
        match self {
            Precision::Exact => "exact".into(),
            Precision::Float(ctx) => format!("float({})", ctx.bits),
        }
    }
}

/// Exact small integer as a rational, for building constants.
#[cfg(test)]
pub(crate) fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn usize_to_i64(v: usize) -> i64 {
    v.to_i64().expect("dimension fits in i64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_beta_forms() {
        assert_eq!("2".parse::<Beta>().unwrap(), Beta::integer(2));
        assert_eq!("1/2".parse::<Beta>().unwrap(), Beta::ratio(1, 2));
        assert_eq!("0.25".parse::<Beta>().unwrap(), Beta::ratio(1, 4));
        assert_eq!("pi".parse::<Beta>().unwrap(), Beta::pi());
        assert_eq!("e".parse::<Beta>().unwrap(), Beta::e());
        assert_eq!(
            "5pi".parse::<Beta>().unwrap(),
            Beta::Scaled { coeff: rat(5, 1), constant: Constant::Pi }
        );
        assert_eq!("5*pi".parse::<Beta>().unwrap(), "5pi".parse::<Beta>().unwrap());
        assert!("0".parse::<Beta>().is_err());
        assert!("-1".parse::<Beta>().is_err());
        assert!("abc".parse::<Beta>().is_err());
        assert!("1/0".parse::<Beta>().is_err());
    }

    #[test]
    fn gamma_exponent() {
        let p = EnsembleParams::new(5, 2, Beta::integer(2)).unwrap();
        let g: BigRational = p.gamma(&()).unwrap();
        assert_eq!(g, rat(35, 1));
        let p = EnsembleParams::new(3, 4, Beta::ratio(1, 5)).unwrap();
        let g: BigRational = p.gamma(&()).unwrap();
        assert_eq!(g, rat(78, 5));
    }

    #[test]
    fn irrational_beta_needs_float() {
        let p = EnsembleParams::new(3, 2, Beta::pi()).unwrap();
        assert!(p.gamma::<BigRational>(&()).is_err());
        let g: crate::scalar::BigFloat = p.gamma(&FloatContext::default()).unwrap();
        assert!((g.to_f64() - 3.0 * (3.0 + std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn alpha_must_be_non_negative_integer() {
        assert!(matches!(
            EnsembleParams::with_real_alpha(3, 1.5, Beta::integer(1)),
            Err(Error::Unsupported(_))
        ));
        assert!(EnsembleParams::with_real_alpha(3, -1.0, Beta::integer(1)).is_err());
        assert_eq!(EnsembleParams::with_real_alpha(3, 2.0, Beta::integer(1)).unwrap().alpha, 2);
        assert!(EnsembleParams::new(0, 1, Beta::integer(1)).is_err());
    }

    #[test]
    fn auto_precision() {
        let p = EnsembleParams::new(25, 225, Beta::integer(2)).unwrap();
        assert_eq!(Precision::auto(&p), Precision::Float(FloatContext::new(512)));
        let p = EnsembleParams::new(3, 2, Beta::e()).unwrap();
        assert_eq!(Precision::auto(&p), Precision::Float(FloatContext::new(256)));
        let p = EnsembleParams::new(3, 2, Beta::integer(4)).unwrap();
        assert_eq!(Precision::auto(&p), Precision::Exact);
    }
}
