//! Coefficient fields for the polynomial machinery.
//!
//! Two backends implement [`Scalar`]: exact [`BigRational`] and the
//! fixed-precision binary float [`BigFloat`]. The recursion, the densities
//! and the hypergeometric evaluator are generic over the field so that the
//! same code path runs exactly whenever β is rational.

use std::cmp::Ordering;
use std::f64::consts::LN_2;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat as AstroFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default mantissa width of the float backend.
pub const DEFAULT_FLOAT_BITS: usize = 256;

/// Mantissa width used once a polynomial degree exceeds [`LARGE_DEGREE`].
pub const LARGE_FLOAT_BITS: usize = 512;

/// Degree above which the float backend is widened by default.
pub const LARGE_DEGREE: usize = 2000;

const RM: RoundingMode = RoundingMode::ToEven;

/// Transcendental constants accepted as β multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn to_f64(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
        }
    }
}

/// A field of polynomial coefficients.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// Whatever is needed to materialize constants in this field.
    type Context: Clone + fmt::Debug + PartialEq + Send + Sync;

    /// True when arithmetic never rounds.
    const EXACT: bool;

    fn context(&self) -> Self::Context;
    fn from_i64(v: i64, ctx: &Self::Context) -> Self;
    fn from_bigint(v: &BigInt, ctx: &Self::Context) -> Self;
    fn from_rational(q: &BigRational, ctx: &Self::Context) -> Self;
    /// Exact image of a binary64 value.
    fn from_f64(v: f64, ctx: &Self::Context) -> Self;
    fn is_zero(&self) -> bool;
    fn sign(&self) -> Ordering;
    /// Nearest binary64 value; saturates to ±inf or 0 outside the f64 range.
    fn to_f64(&self) -> f64;
    /// Natural logarithm as f64, valid far outside the f64 range. NaN for non-positive values.
    fn ln(&self) -> f64;
    /// The exact value, when the field is exact.
    fn to_rational(&self) -> Option<BigRational>;
    /// π or e in this field; `None` when the field cannot represent it.
    fn constant(c: Constant, ctx: &Self::Context) -> Option<Self>;

    fn zero(ctx: &Self::Context) -> Self {
        Self::from_i64(0, ctx)
    }

    fn one(ctx: &Self::Context) -> Self {
        Self::from_i64(1, ctx)
    }

    fn powi(&self, mut exp: u64) -> Self {
        let ctx = self.context();
        let mut base = self.clone();
        let mut acc = Self::one(&ctx);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }
}

pub(crate) fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(64);
    let top = (v >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).ln() + shift as f64 * LN_2
}

impl Scalar for BigRational {
    type Context = ();
    const EXACT: bool = true;

    fn context(&self) -> Self::Context {}

    fn from_i64(v: i64, _: &()) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_bigint(v: &BigInt, _: &()) -> Self {
        BigRational::from_integer(v.clone())
    }

    fn from_rational(q: &BigRational, _: &()) -> Self {
        q.clone()
    }

    fn from_f64(v: f64, _: &()) -> Self {
        BigRational::from_float(v).expect("finite f64")
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn sign(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn to_f64(&self) -> f64 {
        if let Some(v) = ToPrimitive::to_f64(self) {
            if v.is_finite() && v != 0.0 {
                return v;
            }
        }
        if Zero::is_zero(self) {
            return 0.0;
        }
        let l = Scalar::ln(&self.abs());
        let mag = l.exp();
        if self.is_negative() {
            -mag
        } else {
            mag
        }
    }

    fn ln(&self) -> f64 {
        if !self.is_positive() {
            return f64::NAN;
        }
        ln_biguint(self.numer().magnitude()) - ln_biguint(self.denom().magnitude())
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn constant(_: Constant, _: &()) -> Option<Self> {
        None
    }
}

/// Precision (mantissa bits) of the float backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FloatContext {
    pub bits: usize,
}

impl Default for FloatContext {
    fn default() -> Self {
        FloatContext {
            bits: DEFAULT_FLOAT_BITS,
        }
    }
}

impl FloatContext {
    pub fn new(bits: usize) -> Self {
        FloatContext { bits: bits.max(64) }
    }

    pub fn pi(&self) -> BigFloat {
        let mut cc = Consts::new().expect("astro-float constant cache");
        BigFloat::wrap(cc.pi(self.bits, RM), self.bits)
    }

    pub fn e(&self) -> BigFloat {
        let mut cc = Consts::new().expect("astro-float constant cache");
        BigFloat::wrap(cc.e(self.bits, RM), self.bits)
    }
}

/// Binary floating point number with a fixed mantissa width.
///
/// Binary operations round to the wider of the two operand precisions.
#[derive(Clone)]
pub struct BigFloat {
    value: AstroFloat,
    bits: usize,
}

impl BigFloat {
    fn wrap(value: AstroFloat, bits: usize) -> Self {
        BigFloat { value, bits }
    }

    pub fn precision(&self) -> usize {
        self.bits
    }

    pub fn with_precision(&self, bits: usize) -> Self {
        let mut v = self.value.clone();
        // Only fails on NaN/inf, which we never construct.
        let _ = v.set_precision(bits, RM);
        BigFloat::wrap(v, bits)
    }

    pub fn sqrt(&self) -> Self {
        BigFloat::wrap(self.value.sqrt(self.bits, RM), self.bits)
    }

    /// `self^exp` for a positive base and arbitrary real exponent.
    pub fn pow(&self, exp: &BigFloat) -> Self {
        let bits = self.bits.max(exp.bits);
        let mut cc = Consts::new().expect("astro-float constant cache");
        BigFloat::wrap(self.value.pow(&exp.value, bits, RM, &mut cc), bits)
    }

    pub fn is_finite(&self) -> bool {
        !(self.value.is_nan() || self.value.is_inf())
    }

    /// Mantissa in [1/2, 1) and binary exponent.
    fn frexp(&self) -> Option<(f64, i64, bool)> {
        let (words, _, sign, exp, _) = self.value.as_raw_parts()?;
        let top = *words.last()?;
        if top == 0 {
            return None;
        }
        let frac = top as f64 / 18_446_744_073_709_551_616.0;
        Some((frac, exp as i64, sign == Sign::Neg))
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({:e}, {} bits)", self.to_f64(), self.bits)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

macro_rules! float_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &'a BigFloat) -> BigFloat {
                let bits = self.bits.max(rhs.bits);
                BigFloat::wrap(self.value.$method(&rhs.value, bits, RM), bits)
            }
        }
        impl $trait<BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                $trait::$method(self, &rhs)
            }
        }
        impl<'a, 'b> $trait<&'b BigFloat> for &'a BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &'b BigFloat) -> BigFloat {
                let bits = self.bits.max(rhs.bits);
                BigFloat::wrap(self.value.$method(&rhs.value, bits, RM), bits)
            }
        }
    };
}

float_binop!(Add, add);
float_binop!(Sub, sub);
float_binop!(Mul, mul);
float_binop!(Div, div);

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat::wrap(self.value.neg(), self.bits)
    }
}

impl Scalar for BigFloat {
    type Context = FloatContext;
    const EXACT: bool = false;

    fn context(&self) -> FloatContext {
        FloatContext { bits: self.bits }
    }

    fn from_i64(v: i64, ctx: &FloatContext) -> Self {
        BigFloat::wrap(AstroFloat::from_i64(v, ctx.bits), ctx.bits)
    }

    fn from_bigint(v: &BigInt, ctx: &FloatContext) -> Self {
        if let Some(small) = v.to_i64() {
            return Self::from_i64(small, ctx);
        }
        let digits = v.magnitude().to_u64_digits();
        let sign = if v.is_negative() { Sign::Neg } else { Sign::Pos };
        let exp = (digits.len() * 64) as astro_float::Exponent;
        let mut value = AstroFloat::from_words(&digits, sign, exp);
        let _ = value.set_precision(ctx.bits, RM);
        BigFloat::wrap(value, ctx.bits)
    }

    fn from_rational(q: &BigRational, ctx: &FloatContext) -> Self {
        let num = Self::from_bigint(q.numer(), ctx);
        if q.denom().is_one() {
            return num;
        }
        num / Self::from_bigint(q.denom(), ctx)
    }

    fn from_f64(v: f64, ctx: &FloatContext) -> Self {
        BigFloat::wrap(AstroFloat::from_f64(v, ctx.bits.max(64)), ctx.bits.max(64))
    }

    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn sign(&self) -> Ordering {
        if self.value.is_zero() {
            Ordering::Equal
        } else if self.value.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    fn to_f64(&self) -> f64 {
        if self.value.is_zero() {
            return 0.0;
        }
        if self.value.is_nan() {
            return f64::NAN;
        }
        if self.value.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.value.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        match self.frexp() {
            Some((frac, exp, neg)) => {
                let exp = exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
                let mag = libm::ldexp(frac, exp);
                if neg {
                    -mag
                } else {
                    mag
                }
            }
            None => 0.0,
        }
    }

    fn ln(&self) -> f64 {
        if self.sign() != Ordering::Greater {
            return f64::NAN;
        }
        match self.frexp() {
            Some((frac, exp, _)) => frac.ln() + exp as f64 * LN_2,
            None => f64::NAN,
        }
    }

    fn to_rational(&self) -> Option<BigRational> {
        None
    }

    fn constant(c: Constant, ctx: &FloatContext) -> Option<Self> {
        Some(match c {
            Constant::Pi => ctx.pi(),
            Constant::E => ctx.e(),
        })
    }
}
