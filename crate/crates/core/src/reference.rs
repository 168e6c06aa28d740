//! Published closed forms used by the `verify` suites.
//!
//! Polynomials are listed from the highest power down, as printed.

use std::f64::consts::{E, PI};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::params::Beta;

/// f(x) = e^{−βnx/2} x^α · factor · Σ coeffs.
#[derive(Debug, Clone)]
pub struct UnrestrictedRow {
    pub n: usize,
    pub alpha: u32,
    pub beta: &'static str,
    pub factor: (i64, i64),
    pub coeffs: &'static [i64],
}

/// f_F(x) = (1−nx)^{exponent} x^α · factor · Σ coeffs.
#[derive(Debug, Clone)]
pub struct FixedTraceRow {
    pub n: usize,
    pub alpha: u32,
    pub beta: &'static str,
    pub factor: (i64, i64),
    pub exponent: (i64, i64),
    pub coeffs: &'static [i64],
}

pub const UNRESTRICTED_EXACT: [UnrestrictedRow; 4] = [
    UnrestrictedRow {
        n: 4,
        alpha: 3,
        beta: "1/2",
        factor: (1, 217_945_728_000),
        coeffs: &[
            1,
            72,
            2520,
            54768,
            804_384,
            8_297_856,
            60_230_016,
            300_174_336,
            958_003_200,
            1_490_227_200,
        ],
    },
    UnrestrictedRow {
        n: 3,
        alpha: 4,
        beta: "1",
        factor: (1, 464_486_400),
        coeffs: &[1, 40, 800, 10080, 85680, 504_000, 2_056_320, 5_322_240, 6_652_800],
    },
    UnrestrictedRow {
        n: 5,
        alpha: 2,
        beta: "2",
        factor: (1, 17280),
        coeffs: &[1, 48, 960, 10320, 64800, 241_920, 524_160, 604_800, 302_400],
    },
    UnrestrictedRow {
        n: 3,
        alpha: 3,
        beta: "4",
        factor: (16, 1575),
        coeffs: &[4, 84, 735, 3360, 8400, 11340, 6615],
    },
];

pub const FIXED_TRACE_EXACT: [FixedTraceRow; 4] = [
    FixedTraceRow {
        n: 3,
        alpha: 4,
        beta: "1/5",
        factor: (220_712_943_321, 305_834_375),
        exponent: (8, 5),
        coeffs: &[68397, -122_040, 74044, -16200, 1998, -2120, 1276, -440, 77],
    },
    FixedTraceRow {
        n: 4,
        alpha: 3,
        beta: "1",
        factor: (-36480, 1),
        exponent: (8, 1),
        coeffs: &[94976, 159_488, -288_960, 197_120, -77728, 12768, 728, -112, -27, -12],
    },
    FixedTraceRow {
        n: 5,
        alpha: 2,
        beta: "2",
        factor: (628_320, 1),
        exponent: (23, 1),
        coeffs: &[75355, -92420, 29788, 4676, -580, -1234, 142, 22, 1],
    },
    FixedTraceRow {
        n: 4,
        alpha: 3,
        beta: "4",
        factor: (7_238_088, 1),
        exponent: (26, 1),
        coeffs: &[3472, -44528, 63564, -53204, 23884, -2940, -749, 43, 27, 3],
    },
];

fn ratio(p: (i64, i64)) -> BigRational {
    BigRational::new(BigInt::from(p.0), BigInt::from(p.1))
}

impl UnrestrictedRow {
    pub fn beta(&self) -> Beta {
        self.beta.parse().expect("reference beta parses")
    }

    /// κ_α, κ_{α+1}, …, κ_{nα}.
    pub fn kappa(&self) -> Vec<BigRational> {
        let f = ratio(self.factor);
        self.coeffs.iter().rev().map(|&c| BigRational::from_integer(c.into()) * &f).collect()
    }
}

impl FixedTraceRow {
    pub fn beta(&self) -> Beta {
        self.beta.parse().expect("reference beta parses")
    }

    pub fn exponent(&self) -> BigRational {
        ratio(self.exponent)
    }

    /// Coefficients of x^0 … x^{nα} of the factor multiplying (1−nx)^{exponent}.
    pub fn polynomial(&self) -> Vec<BigRational> {
        let f = ratio(self.factor);
        let zero = BigRational::from_integer(0.into());
        let mut out = vec![zero; self.alpha as usize];
        out.extend(self.coeffs.iter().rev().map(|&c| BigRational::from_integer(c.into()) * &f));
        out
    }
}

/// κ_2 … κ_6 for n = 3, α = 2, β = e.
pub fn unrestricted_beta_e() -> Vec<f64> {
    let e = E;
    let d = 64.0 * (e + 1.0) * (e + 2.0).powi(2) * (e + 4.0);
    let p = |c: &[(f64, i32)]| c.iter().map(|&(a, k)| a * e.powi(k)).sum::<f64>() / d;
    vec![
        p(&[(192.0, 3), (720.0, 4), (960.0, 5), (540.0, 6), (108.0, 7)]),
        p(&[(192.0, 4), (624.0, 5), (648.0, 6), (216.0, 7)]),
        p(&[(96.0, 5), (240.0, 6), (144.0, 7)]),
        p(&[(24.0, 6), (36.0, 7)]),
        p(&[(3.0, 7)]),
    ]
}

/// Fixed-trace polynomial x^0 … x^6 and exponent for n = 3, α = 2, β = π.
pub fn fixed_trace_beta_pi() -> (Vec<f64>, f64) {
    let k = 9.0 * (3.0 * PI + 2.0) * (3.0 * PI + 4.0) * (3.0 * PI + 7.0) * (3.0 * PI + 8.0)
        / (2.0 * (PI + 2.0) * (PI + 4.0));
    let poly = vec![
        0.0,
        0.0,
        k * (PI + 2.0),
        -4.0 * k,
        k * (8.0 - 6.0 * PI),
        -36.0 * k,
        k * (42.0 + 9.0 * PI),
    ];
    (poly, 3.0 * PI + 1.0)
}

/// (n, α, β, x, value) as printed to six significant figures.
pub const HYPERGEOMETRIC_VALUES: [(usize, u32, &str, f64, f64); 6] = [
    (3, 6, "1/3", 10.0, 22.6555),
    (4, 5, "1", 5.0, 335.899),
    (5, 3, "2", 8.0, 87447.5),
    (5, 4, "3", 2.0, 320.040),
    (7, 3, "4", 1.0, 72.2218),
    (3, 2, "5pi", 7.0, 203.910),
];

/// Mixed moments ⟨∏λ_j^{a_j}⟩ for n = 5, β = 2.
pub const MIXED_MOMENTS: [([u32; 4], i64); 4] = [
    ([0, 2, 3, 3], 3_175_200),
    ([1, 1, 3, 3], 1_360_800),
    ([1, 2, 2, 3], 680_400),
    ([2, 2, 2, 2], 302_400),
];
