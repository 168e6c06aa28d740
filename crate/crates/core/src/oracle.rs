//! Brute-force checks on g and its coefficients that share no code with the
//! recursion: tensor Gauss-Laguerre quadrature over the n−1 remaining
//! eigenvalues, exact Vandermonde expansion for even β, and the
//! partition-sum form of κ_r.

use std::collections::HashMap;
use std::num::NonZeroUsize;

use gauss_quad::laguerre::GaussLaguerre;
use gauss_quad::FiniteAboveNegOneF64;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{Beta, EnsembleParams};
use crate::recursion::{ln_norm_constant_gamma_product, norm_constant_rising};
use crate::special::{binomial, factorial};

/// Largest n the tensor quadrature accepts.
pub const MAX_N: usize = 5;

/// Node increment used for the convergence estimate.
const NODE_STEP: usize = 8;

/// Relative change between node counts above which a result is flagged.
pub const CONVERGENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    /// |Q(nodes + 8) − Q(nodes)|.
    pub error_estimate: f64,
    pub nodes: usize,
    pub converged: bool,
}

/// ceil((a(n−1) + β(n−1) + nβ)/2) + 10 nodes per axis.
pub fn default_nodes(n: usize, alpha: u32, beta: f64) -> usize {
    let m = n.saturating_sub(1) as f64;
    ((f64::from(alpha) * m + beta * m + n as f64 * beta) / 2.0).ceil() as usize + 10
}

/// Fewest nodes per axis accepted: a(n−1)/2 + nβ/2 + 5.
pub fn min_nodes(n: usize, alpha: u32, beta: f64) -> usize {
    (f64::from(alpha) * n.saturating_sub(1) as f64 / 2.0 + n as f64 * beta / 2.0 + 5.0).ceil() as usize
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if n > MAX_N {
        return Err(Error::Unsupported(format!(
            "tensor quadrature is limited to n <= {MAX_N}, got n = {n}"
        )));
    }
    Ok(())
}

/// Ratios ⟨F_k⟩ over m eigenvalues under |Δ(λ)|^β ∏ λ^β e^{−βλ/2}, with one
/// tensor pass shared by every integrand. Integrands receive λ, not t.
fn tensor_expectations(
    m: usize,
    beta: f64,
    nodes: usize,
    integrands: &[&(dyn Fn(&[f64]) -> f64 + Sync)],
) -> Result<Vec<f64>> {
    if m == 0 {
        return Ok(integrands.iter().map(|f| f(&[])).collect());
    }
    let degree = NonZeroUsize::new(nodes).ok_or_else(|| Error::InvalidParameter("nodes must be positive".into()))?;
    let a = FiniteAboveNegOneF64::new(beta)
        .ok_or_else(|| Error::InvalidParameter(format!("beta = {beta} is not a valid Laguerre exponent")))?;
    let rule = GaussLaguerre::new(degree, a);
    let pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    let scale = 2.0 / beta;
    let lam: Vec<f64> = pairs.iter().map(|(t, _)| t * scale).collect();
    let even = beta.fract() == 0.0 && (beta as i64) % 2 == 0;
    let k = integrands.len();

    // Split on the first axis, then sum the partials in index order so the
    // result does not depend on scheduling.
    let partials: Vec<Vec<f64>> = (0..nodes)
        .into_par_iter()
        .map(|i0| {
            let mut acc = vec![0.0; k + 1];
            let mut idx = vec![0usize; m];
            idx[0] = i0;
            let mut point = vec![0.0; m];
            loop {
                let mut w = 1.0;
                for (d, &i) in idx.iter().enumerate() {
                    point[d] = lam[i];
                    w *= pairs[i].1;
                }
                let mut vdm = 1.0;
                for p in 0..m {
                    for q in p + 1..m {
                        vdm *= point[q] - point[p];
                    }
                }
                let vdm = if even { vdm.powi(beta as i32) } else { vdm.abs().powf(beta) };
                let base = w * vdm;
                acc[k] += base;
                for (slot, f) in acc.iter_mut().zip(integrands) {
                    *slot += base * f(&point);
                }
                // Odometer over axes 1..m.
                let mut d = m;
                loop {
                    d -= 1;
                    if d == 0 {
                        return acc;
                    }
                    idx[d] += 1;
                    if idx[d] < nodes {
                        break;
                    }
                    idx[d] = 0;
                }
            }
        })
        .collect();
    let mut total = vec![0.0; k + 1];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    let den = total[k];
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::Numerical(format!("quadrature normalization is {den}")));
    }
    Ok(total[..k].iter().map(|v| v / den).collect())
}

fn estimates(
    m: usize,
    beta: f64,
    nodes: usize,
    integrands: &[&(dyn Fn(&[f64]) -> f64 + Sync)],
) -> Result<Vec<QuadratureEstimate>> {
    let coarse = tensor_expectations(m, beta, nodes, integrands)?;
    let fine = tensor_expectations(m, beta, nodes + NODE_STEP, integrands)?;
    Ok(coarse
        .into_iter()
        .zip(fine)
        .map(|(c, f)| {
            let err = (f - c).abs();
            QuadratureEstimate {
                value: c,
                error_estimate: err,
                nodes,
                converged: err <= CONVERGENCE_TOL * c.abs().max(f64::MIN_POSITIVE),
            }
        })
        .collect())
}

/// g(x) as the ratio of (n−1)-fold integrals, by tensor quadrature.
pub fn quadrature_g(params: &EnsembleParams, x: f64, nodes: Option<usize>) -> Result<QuadratureEstimate> {
    check_dimension(params.n)?;
    let beta = params.beta.to_f64();
    let nodes = resolve_nodes(params.n, params.alpha, beta, nodes)?;
    let alpha = params.alpha as i32;
    let f = move |lam: &[f64]| lam.iter().map(|l| (l + x).powi(alpha)).product::<f64>();
    Ok(estimates(params.n - 1, beta, nodes, &[&f])?[0])
}

fn resolve_nodes(n: usize, alpha: u32, beta: f64, nodes: Option<usize>) -> Result<usize> {
    let min = min_nodes(n, alpha, beta);
    match nodes {
        None => Ok(default_nodes(n, alpha, beta).max(min)),
        Some(k) if k >= min => Ok(k),
        Some(k) => Err(Error::InvalidParameter(format!("need at least {min} quadrature nodes, got {k}"))),
    }
}

fn check_exponents(n: usize, exponents: &[u32]) -> Result<()> {
    check_dimension(n)?;
    if exponents.len() != n - 1 {
        return Err(Error::InvalidParameter(format!(
            "expected {} exponents for n = {n}, got {}",
            n - 1,
            exponents.len()
        )));
    }
    Ok(())
}

/// ⟨∏ λ_j^{a_j}⟩ over n−1 eigenvalues, by tensor quadrature.
pub fn mixed_moment(n: usize, beta: &Beta, exponents: &[u32], nodes: Option<usize>) -> Result<QuadratureEstimate> {
    check_exponents(n, exponents)?;
    let b = beta.to_f64();
    let top = exponents.iter().copied().max().unwrap_or(0);
    let nodes = resolve_nodes(n, top, b, nodes)?;
    let exps: Vec<i32> = exponents.iter().map(|&e| e as i32).collect();
    let f = move |lam: &[f64]| lam.iter().zip(&exps).map(|(l, &e)| l.powi(e)).product::<f64>();
    Ok(estimates(n - 1, b, nodes, &[&f])?[0])
}

fn even_beta(beta: &Beta) -> Result<u32> {
    let unsupported = || Error::Unsupported(format!("exact moments need an even integer beta, got {beta}"));
    let q = beta.as_rational().ok_or_else(unsupported)?;
    if !q.is_integer() {
        return Err(unsupported());
    }
    let v = q.to_integer().to_u32().ok_or_else(unsupported)?;
    if v == 0 || v % 2 != 0 {
        return Err(unsupported());
    }
    Ok(v)
}

/// Δ(λ)^β expanded into monomials, for even β.
struct VandermondePower {
    beta: u32,
    terms: Vec<(Vec<u32>, BigInt)>,
    norm: BigInt,
}

impl VandermondePower {
    fn new(m: usize, beta: u32) -> Self {
        let mut poly: HashMap<Vec<u32>, BigInt> = HashMap::from([(vec![0; m], BigInt::one())]);
        for p in 0..m {
            for q in p + 1..m {
                for _ in 0..beta {
                    // Multiply by (λ_q − λ_p).
                    let mut next: HashMap<Vec<u32>, BigInt> = HashMap::with_capacity(poly.len() * 2);
                    for (e, c) in &poly {
                        let mut up = e.clone();
                        up[q] += 1;
                        *next.entry(up).or_insert_with(BigInt::zero) += c;
                        let mut down = e.clone();
                        down[p] += 1;
                        *next.entry(down).or_insert_with(BigInt::zero) -= c;
                    }
                    next.retain(|_, c| !c.is_zero());
                    poly = next;
                }
            }
        }
        let mut terms: Vec<(Vec<u32>, BigInt)> = poly.into_iter().collect();
        terms.sort();
        let mut out = VandermondePower {
            beta,
            terms,
            norm: BigInt::zero(),
        };
        out.norm = out.raw(&vec![0; m]);
        out
    }

    /// Σ_e c_e ∏_j (e_j + β + a_j)!, i.e. the integral up to (2/β)-powers.
    fn raw(&self, a: &[u32]) -> BigInt {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(a)
                    .fold(c.clone(), |acc, (&ej, &aj)| acc * factorial(u64::from(ej + self.beta + aj)))
            })
            .sum()
    }

    fn moment(&self, a: &[u32]) -> BigRational {
        let total: u32 = a.iter().sum();
        let scale = BigRational::new(BigInt::from(2), BigInt::from(self.beta));
        let mut pow = <BigRational as One>::one();
        for _ in 0..total {
            pow *= &scale;
        }
        pow * BigRational::new(self.raw(a), self.norm.clone())
    }
}

/// ⟨∏ λ_j^{a_j}⟩ in exact arithmetic; even integer β only.
pub fn mixed_moment_exact(n: usize, beta: &Beta, exponents: &[u32]) -> Result<BigRational> {
    check_exponents(n, exponents)?;
    let b = even_beta(beta)?;
    Ok(VandermondePower::new(n - 1, b).moment(exponents))
}

/// A partition of r−α into n−1 parts from [0, α], stored as
/// (value, multiplicity) with values strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    pub parts: Vec<(u32, usize)>,
}

impl Partition {
    pub fn total(&self) -> u64 {
        self.parts.iter().map(|&(v, s)| u64::from(v) * s as u64).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.iter().map(|&(_, s)| s).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values in non-increasing order, each repeated by its multiplicity.
    pub fn values(&self) -> Vec<u32> {
        self.parts.iter().flat_map(|&(v, s)| std::iter::repeat_n(v, s)).collect()
    }

    /// Number of distinct orderings, (Σs)!/∏s!.
    pub fn orderings(&self) -> BigInt {
        let denom: BigInt = self.parts.iter().map(|&(_, s)| factorial(s as u64)).product();
        factorial(self.len() as u64) / denom
    }
}

/// All partitions of `total` into exactly `parts` integers in [0, max_value],
/// up to ordering.
pub fn enumerate_partitions(total: u64, parts: usize, max_value: u32) -> Vec<Partition> {
    fn walk(rest: u64, slots: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if slots == 0 {
            if rest == 0 {
                let mut parts: Vec<(u32, usize)> = Vec::new();
                for &v in cur.iter() {
                    match parts.last_mut() {
                        Some((last, s)) if *last == v => *s += 1,
                        _ => parts.push((v, 1)),
                    }
                }
                out.push(Partition { parts });
            }
            return;
        }
        if rest > u64::from(cap) * slots as u64 {
            return;
        }
        let hi = cap.min(u32::try_from(rest).unwrap_or(u32::MAX));
        for v in (0..=hi).rev() {
            cur.push(v);
            walk(rest - u64::from(v), slots - 1, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    walk(total, parts, max_value, &mut Vec::with_capacity(parts), &mut out);
    out
}

fn partition_weight(p: &Partition, alpha: u32) -> BigRational {
    let mut w = <BigRational as One>::one();
    for &(v, s) in &p.parts {
        let b = binomial(u64::from(alpha), u64::from(v));
        let mut num = BigInt::one();
        for _ in 0..s {
            num *= &b;
        }
        w *= BigRational::new(num, factorial(s as u64));
    }
    w
}

fn partition_exponents(p: &Partition, alpha: u32) -> Vec<u32> {
    p.values().into_iter().map(|v| alpha - v).collect()
}

fn check_kappa_index(params: &EnsembleParams, r: u64) -> Result<()> {
    check_dimension(params.n)?;
    let alpha = u64::from(params.alpha);
    if r < alpha || r > alpha * params.n as u64 {
        return Err(Error::Domain(format!(
            "r = {r} is outside [alpha, n*alpha] = [{alpha}, {}]",
            alpha * params.n as u64
        )));
    }
    Ok(())
}

/// κ_r = (n−1)! c Σ_partitions ∏(C(α,p)^s/s!) ⟨∏λ^{α−p}⟩, exact for even β.
pub fn kappa_via_partitions_exact(params: &EnsembleParams, r: u64) -> Result<BigRational> {
    check_kappa_index(params, r)?;
    let b = even_beta(&params.beta)?;
    let m = params.n - 1;
    let vdm = VandermondePower::new(m, b);
    let c: BigRational = norm_constant_rising(params, &())?;
    let alpha = params.alpha;
    let sum: BigRational = enumerate_partitions(r - u64::from(alpha), m, alpha)
        .iter()
        .map(|p| partition_weight(p, alpha) * vdm.moment(&partition_exponents(p, alpha)))
        .sum();
    Ok(BigRational::from_integer(factorial(m as u64)) * c * sum)
}

/// The same sum with moments from tensor quadrature; any β > 0.
pub fn kappa_via_partitions(params: &EnsembleParams, r: u64, nodes: Option<usize>) -> Result<QuadratureEstimate> {
    check_kappa_index(params, r)?;
    let m = params.n - 1;
    let alpha = params.alpha;
    let beta = params.beta.to_f64();
    let nodes = resolve_nodes(params.n, alpha, beta, nodes)?;
    let parts = enumerate_partitions(r - u64::from(alpha), m, alpha);
    let weights: Vec<f64> = parts.iter().map(|p| partition_weight(p, alpha).to_f64().unwrap_or(f64::NAN)).collect();
    let exps: Vec<Vec<i32>> = parts
        .iter()
        .map(|p| partition_exponents(p, alpha).into_iter().map(|e| e as i32).collect())
        .collect();
    let f = move |lam: &[f64]| {
        weights
            .iter()
            .zip(&exps)
            .map(|(w, e)| w * lam.iter().zip(e).map(|(l, &k)| l.powi(k)).product::<f64>())
            .sum::<f64>()
    };
    let est = estimates(m, beta, nodes, &[&f])?[0];
    let scale = (ln_norm_constant_gamma_product(params) + crate::special::ln_gamma(params.n as f64)).exp();
    Ok(QuadratureEstimate {
        value: est.value * scale,
        error_estimate: est.error_estimate * scale,
        ..est
    })
}
