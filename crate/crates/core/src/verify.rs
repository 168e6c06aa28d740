//! Self-check suites: published tables, the worked partition example and
//! recursion-versus-quadrature agreement at small n.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::density::{build_density, build_fixed_trace, format_rational};
use crate::error::{Error, Result};
use crate::hyp::hyp1f1_matrix;
use crate::oracle::{kappa_via_partitions, kappa_via_partitions_exact, mixed_moment, mixed_moment_exact, quadrature_g};
use crate::params::{Beta, EnsembleParams};
use crate::recursion::{compute_g, norm_constant_c, norm_constant_rising};
use crate::reference;
use crate::scalar::{BigFloat, FloatContext, Scalar};

/// Relative tolerance for float rows of the tables and for oracle agreement.
pub const FLOAT_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-8;
/// The hypergeometric values are printed to six significant figures.
pub const PRINTED_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Small,
    Partitions,
    Tables,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "small" => Ok(Suite::Small),
            "appendixb" | "partitions" => Ok(Suite::Partitions),
            "tables" => Ok(Suite::Tables),
            "all" => Ok(Suite::All),
            _ => Err(Error::Usage(format!("unknown suite {s:?}; expected small, appendixB, tables or all"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Small => "small",
            Suite::Partitions => "appendixB",
            Suite::Tables => "tables",
            Suite::All => "all",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, expected: impl Into<String>, actual: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            expected: expected.into(),
            actual: actual.into(),
            pass,
        }
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Check::new(name, "a result", format!("error: {err}"), false)
    }

    pub fn to_json(&self) -> Value {
        json!({"name": self.name, "expected": self.expected, "actual": self.actual, "pass": self.pass})
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn exact_list(v: &[BigRational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(", ")
}

fn collect(name: String, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check::failed(name, &e))
}

pub fn run(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Small => small(),
        Suite::Partitions => partition_checks(),
        Suite::Tables => tables(),
        Suite::All => [small(), partition_checks(), tables()].concat(),
    }
}

fn tables() -> Vec<Check> {
    let mut out = Vec::new();
    for row in &reference::UNRESTRICTED_EXACT {
        let name = format!("unrestricted n={} alpha={} beta={}", row.n, row.alpha, row.beta);
        out.push(collect(name.clone(), || {
            let p = EnsembleParams::new(row.n, row.alpha, row.beta())?;
            let d = build_density::<BigRational>(&p, &())?;
            let want = row.kappa();
            Ok(Check::new(name, exact_list(&want), exact_list(&d.kappa), d.kappa == want))
        }));
    }
    let name = "unrestricted n=3 alpha=2 beta=e".to_string();
    out.push(collect(name.clone(), || {
        let p = EnsembleParams::new(3, 2, Beta::e())?;
        let d = build_density::<BigFloat>(&p, &FloatContext::new(256))?;
        let want = reference::unrestricted_beta_e();
        let got: Vec<f64> = d.kappa.iter().map(Scalar::to_f64).collect();
        let worst = worst_rel(&got, &want);
        Ok(Check::new(name, format!("{want:?}"), format!("{got:?} (max rel {worst:.1e})"), got.len() == want.len() && worst <= FLOAT_TOL))
    }));
    for row in &reference::FIXED_TRACE_EXACT {
        let name = format!("fixed trace n={} alpha={} beta={}", row.n, row.alpha, row.beta);
        out.push(collect(name.clone(), || {
            let p = EnsembleParams::new(row.n, row.alpha, row.beta())?;
            let d = build_fixed_trace::<BigRational>(&p, &())?;
            let got = d.display_polynomial().into_coeffs();
            let want = row.polynomial();
            let exp = d.display_exponent();
            let pass = got == want && exp == row.exponent();
            Ok(Check::new(
                name,
                format!("(1-nx)^{} [{}]", format_rational(&row.exponent()), exact_list(&want)),
                format!("(1-nx)^{} [{}]", format_rational(&exp), exact_list(&got)),
                pass,
            ))
        }));
    }
    let name = "fixed trace n=3 alpha=2 beta=pi".to_string();
    out.push(collect(name.clone(), || {
        let p = EnsembleParams::new(3, 2, Beta::pi())?;
        let d = build_fixed_trace::<BigFloat>(&p, &FloatContext::new(256))?;
        let (want, want_exp) = reference::fixed_trace_beta_pi();
        let got: Vec<f64> = d.display_polynomial().coeffs().iter().map(Scalar::to_f64).collect();
        let exp = d.display_exponent().to_f64();
        let nonzero: Vec<usize> = (0..want.len()).filter(|&k| want[k] != 0.0).collect();
        let worst = nonzero.iter().map(|&k| rel(got.get(k).copied().unwrap_or(f64::NAN), want[k])).fold(0.0, f64::max);
        let zeros_ok = (0..want.len()).filter(|k| !nonzero.contains(k)).all(|k| got.get(k).is_none_or(|v| v.abs() < 1e-60));
        let pass = got.len() == want.len() && worst <= FLOAT_TOL && zeros_ok && rel(exp, want_exp) <= FLOAT_TOL;
        Ok(Check::new(name, format!("{want:?}"), format!("{got:?} (max rel {worst:.1e})"), pass))
    }));
    for (n, alpha, beta, x, value) in reference::HYPERGEOMETRIC_VALUES {
        let name = format!("1F1 n={n} alpha={alpha} beta={beta} x={x}");
        out.push(collect(name.clone(), || {
            let p = EnsembleParams::new(n, alpha, beta.parse()?)?;
            let got = if p.beta.is_rational() {
                hyp1f1_matrix::<BigRational>(&p, &())?.eval_f64(x)
            } else {
                hyp1f1_matrix::<BigFloat>(&p, &FloatContext::default())?.eval_f64(x)
            };
            Ok(Check::new(name, format!("{value}"), format!("{got:.6}"), rel(got, value) <= PRINTED_TOL))
        }));
    }
    out
}

fn worst_rel(got: &[f64], want: &[f64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    got.iter().zip(want).map(|(g, w)| rel(*g, *w)).fold(0.0, f64::max)
}

fn partition_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let beta = Beta::integer(2);
    let name = "kappa_7 n=5 alpha=3 beta=2 (partition sum, exact)".to_string();
    out.push(collect(name.clone(), || {
        let p = EnsembleParams::new(5, 3, beta.clone())?;
        let k = kappa_via_partitions_exact(&p, 7)?;
        let want = BigRational::new(159.into(), 16.into());
        Ok(Check::new(name, "159/16", format_rational(&k), k == want))
    }));
    let name = "kappa_7 n=5 alpha=3 beta=2 (partition sum, quadrature)".to_string();
    out.push(collect(name.clone(), || {
        let p = EnsembleParams::new(5, 3, beta.clone())?;
        let k = kappa_via_partitions(&p, 7, None)?;
        Ok(Check::new(name, "9.9375", format!("{:.12}", k.value), rel(k.value, 9.9375) <= ORACLE_TOL))
    }));
    for (exps, value) in reference::MIXED_MOMENTS {
        let name = format!("mixed moment {exps:?}");
        out.push(collect(name.clone(), || {
            let q = mixed_moment(5, &beta, &exps, None)?;
            let exact = mixed_moment_exact(5, &beta, &exps)?;
            let exact_ok = exact == BigRational::from_integer(value.into());
            Ok(Check::new(
                name,
                value.to_string(),
                format!("{:.6} (exact {})", q.value, format_rational(&exact)),
                exact_ok && rel(q.value, value as f64) <= ORACLE_TOL,
            ))
        }));
    }
    out
}

fn small() -> Vec<Check> {
    let mut out = Vec::new();
    for n in 2..=3usize {
        for alpha in 0..=4u32 {
            for b in [2i64, 4] {
                let name = format!("g recursion vs quadrature n={n} alpha={alpha} beta={b}");
                out.push(collect(name.clone(), || {
                    let p = EnsembleParams::new(n, alpha, Beta::integer(b))?;
                    let g = compute_g::<BigRational>(&p, &())?;
                    let mut worst = 0.0f64;
                    for x in [0.0, 0.5, 1.0, 5.0] {
                        let q = quadrature_g(&p, x, None)?;
                        worst = worst.max(rel(q.value, g.eval_f64(x)));
                    }
                    Ok(Check::new(name, format!("rel <= {ORACLE_TOL:e}"), format!("{worst:.2e}"), worst <= ORACLE_TOL))
                }));
            }
        }
    }
    for n in 1..=3usize {
        for alpha in 0..=3u32 {
            let name = format!("normalization n={n} alpha={alpha} beta=1/2");
            out.push(collect(name.clone(), || {
                let p = EnsembleParams::new(n, alpha, Beta::ratio(1, 2))?;
                let g = compute_g::<BigRational>(&p, &())?;
                let c = norm_constant_c(&g)?;
                let rising: BigRational = norm_constant_rising(&p, &())?;
                let total = build_density::<BigRational>(&p, &())?.normalization_sum()?;
                let one = BigRational::from_integer(1.into());
                Ok(Check::new(
                    name,
                    "1",
                    format!("{} (c = {})", format_rational(&total), format_rational(&c)),
                    total == one && c == rising,
                ))
            }));
        }
    }
    out
}
