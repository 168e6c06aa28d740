//! Gamma-function helpers shared by the density, moment and oracle code.

use num_bigint::BigInt;
use num_traits::One;

use crate::scalar::Scalar;

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma(x)
}

/// z (z+1) ⋯ (z+k−1); the empty product is 1.
pub fn rising_factorial<F: Scalar>(z: &F, k: u64) -> F {
    let ctx = z.context();
    let mut acc = F::one(&ctx);
    let mut term = z.clone();
    for _ in 0..k {
        acc = acc * &term;
        term = term + &F::one(&ctx);
    }
    acc
}

/// (z−1)(z−2) ⋯ (z−k) = Γ(z)/Γ(z−k). A zero factor appears exactly when
/// z−k is a non-positive integer, i.e. where 1/Γ(z−k) vanishes.
pub fn falling_from_below<F: Scalar>(z: &F, k: u64) -> F {
    let ctx = z.context();
    let mut acc = F::one(&ctx);
    let mut term = z.clone() - &F::one(&ctx);
    for _ in 0..k {
        acc = acc * &term;
        term = term - &F::one(&ctx);
    }
    acc
}

pub fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// ln Σ exp(v), ignoring NaN entries; −∞ for an empty sum.
pub fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.into_iter().filter(|v| !v.is_nan()).collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + terms.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Regularized incomplete gammas (P, Q) = (γ(a,y)/Γ(a), Γ(a,y)/Γ(a)) for a
/// positive integer shape. Whichever of the two is computed directly is
/// accurate to full relative precision; the other is its complement.
pub fn reg_gamma_int(a: u64, y: f64) -> (f64, f64) {
    if y <= 0.0 {
        return (0.0, 1.0);
    }
    if y.is_infinite() {
        return (1.0, 0.0);
    }
    let af = a as f64;
    if y < af {
        let p = lower_series(af, y);
        (p, 1.0 - p)
    } else {
        let q = upper_sum(a, y);
        (1.0 - q, q)
    }
}

// P = e^{−y} y^a / a! · Σ_{m≥0} y^m / ((a+1)⋯(a+m)), for y < a.
fn lower_series(af: f64, y: f64) -> f64 {
    let ln_pref = -y + af * y.ln() - ln_gamma(af + 1.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 1.0;
    loop {
        term *= y / (af + m);
        sum += term;
        if term < sum * 1e-17 || m > 100_000.0 {
            break;
        }
        m += 1.0;
    }
    (ln_pref + sum.ln()).exp().min(1.0)
}

// Q = e^{−y} y^{a−1}/(a−1)! · Σ_{m=0}^{a−1} (a−1)(a−2)⋯(a−m) / y^m, for y ≥ a.
fn upper_sum(a: u64, y: f64) -> f64 {
    let af = a as f64;
    let ln_pref = -y + (af - 1.0) * y.ln() - ln_gamma(af);
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..a {
        term *= (af - m as f64) / y;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    (ln_pref + sum.ln()).exp().min(1.0)
}

/// Regularized lower incomplete gamma P(a, y) for a positive integer shape.
///
/// Below y = a the convergent series for P is summed; above it the finite sum
/// Q(a, y) = e^{−y} Σ_{k<a} y^k/k! is accumulated from its largest term down.
pub fn reg_lower_gamma_int(a: u64, y: f64) -> f64 {
    reg_gamma_int(a, y).0
}
