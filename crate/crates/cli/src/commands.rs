use std::path::Path;

use betawl::asymptotics::{ld_params, soft_edge_transform, SoftEdgeScaling, TwTable};
use betawl::density::{beta_json, delay_time_density};
use betawl::hyp::hyp1f1_matrix;
use betawl::montecarlo::{ks_statistic, sample, SampleConfig, SampleMode};
use betawl::params::parse_rational_literal;
use betawl::verify::{self, Suite};
use betawl::{
    build_density, build_fixed_trace, BigFloat, EigenDensity, EnsembleParams, Error, FloatContext, Precision, Result,
    Scalar,
};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::output::{csv_table, float, num, scalar_text, Envelope, PRECISION_ENV};
use crate::{Ensemble, Format, Outcome};

/// Points per default density grid.
const DEFAULT_GRID_POINTS: usize = 201;

macro_rules! dispatch {
    ($prec:expr, $f:ident($($arg:expr),* $(,)?)) => {
        match $prec {
            Precision::Exact => $f::<BigRational>(&(), $($arg),*),
            Precision::Float(ctx) => $f::<BigFloat>(&ctx, $($arg),*),
        }
    };
}

impl Ensemble {
    fn params(&self) -> Result<EnsembleParams> {
        let alpha: f64 = self
            .alpha
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse alpha from {:?}", self.alpha)))?;
        EnsembleParams::with_real_alpha(self.n, alpha, self.beta.parse()?)
    }
}

fn params_json(p: &EnsembleParams) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("n".into(), json!(p.n));
    m.insert("alpha".into(), json!(p.alpha));
    m.insert("beta".into(), beta_json(&p.beta));
    m
}

fn env_bits() -> Result<Option<usize>> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&b| b >= 53)
            .map(Some)
            .ok_or_else(|| Error::Usage(format!("{PRECISION_ENV} must be an integer >= 53, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

pub fn resolve_precision(flag: &str, params: &EnsembleParams) -> Result<Precision> {
    match flag.trim().to_ascii_lowercase().as_str() {
        "exact" if params.beta.is_rational() => Ok(Precision::Exact),
        "exact" => Err(Error::InvalidParameter(format!(
            "exact arithmetic needs a rational beta, got {}",
            params.beta
        ))),
        "auto" => Ok(match Precision::auto(params) {
            Precision::Exact => Precision::Exact,
            Precision::Float(ctx) => Precision::Float(env_bits()?.map(FloatContext::new).unwrap_or(ctx)),
        }),
        bits => match bits.parse::<usize>() {
            Ok(b) if b >= 53 => Ok(Precision::Float(FloatContext::new(b))),
            _ => Err(Error::Usage(format!("--precision takes auto, exact or a bit count >= 53, got {flag:?}"))),
        },
    }
}

/// `a:b:steps` with both ends included.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Usage(format!("grid must look like a:b:steps, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    if !a.is_finite() || !b.is_finite() || steps == 0 {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![a]);
    }
    let h = (b - a) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| if k + 1 == steps { b } else { a + h * k as f64 })
        .collect())
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

fn opt_json(v: Option<f64>) -> Value {
    v.map(num).unwrap_or(Value::Null)
}

pub fn density(
    e: &Ensemble,
    fixed_trace: bool,
    grid: Option<&str>,
    format: Option<Format>,
    precision: &str,
) -> Result<Outcome> {
    let params = e.params()?;
    let prec = resolve_precision(precision, &params)?;
    let points = grid.map(parse_grid).transpose()?;
    let format = format.unwrap_or(if points.is_some() { Format::Csv } else { Format::Json });
    let mut echo = params_json(&params);
    echo.insert("fixed_trace".into(), json!(fixed_trace));
    echo.insert("grid".into(), grid.map_or(Value::Null, |g| json!(g)));
    let text = dispatch!(prec, density_in(&params, fixed_trace, points, format, Value::Object(echo), prec.label()))?;
    Ok(Outcome { text, consistent: true })
}

fn density_in<F: Scalar>(
    ctx: &F::Context,
    params: &EnsembleParams,
    fixed_trace: bool,
    points: Option<Vec<f64>>,
    format: Format,
    echo: Value,
    label: String,
) -> Result<String> {
    let d = build_density::<F>(params, ctx)?;
    let ft = if fixed_trace { Some(build_fixed_trace::<F>(params, ctx)?) } else { None };
    let law: &dyn EigenDensity = match &ft {
        Some(f) => f,
        None => &d,
    };
    let points = match points {
        Some(p) => p,
        None => {
            let hi = match &ft {
                Some(f) => f.support_end(),
                None => {
                    let m1 = d.moment(1.0)?;
                    let sd = (d.moment(2.0)? - m1 * m1).max(0.0).sqrt();
                    m1 + 8.0 * sd
                }
            };
            parse_grid(&format!("0:{hi}:{DEFAULT_GRID_POINTS}"))?
        }
    };
    for &x in &points {
        if x.is_nan() || x < 0.0 {
            return Err(Error::Domain(format!("density grid contains x = {x} < 0")));
        }
    }
    match format {
        Format::Coeffs => {
            let rows: Vec<Vec<String>> = match &ft {
                Some(f) => f
                    .terms()
                    .zip(&f.kappa)
                    .map(|((j, mu), k)| vec![j.to_string(), scalar_text(k), scalar_text(mu)])
                    .collect(),
                None => d.terms().map(|(j, k)| vec![j.to_string(), scalar_text(k)]).collect(),
            };
            let header: &[&str] = if ft.is_some() { &["j", "kappa", "mu"] } else { &["j", "kappa"] };
            Ok(csv_table(header, &rows))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|&x| vec![float(x), float(law.pdf(x)), float(law.cdf(x))])
                .collect();
            Ok(csv_table(&["x", "pdf", "cdf"], &rows))
        }
        Format::Json => {
            let values: Vec<Value> = points
                .iter()
                .map(|&x| json!({"x": num(x), "pdf": num(law.pdf(x)), "cdf": num(law.cdf(x))}))
                .collect();
            let mut payload = json!({
                "density": d.to_json(),
                "normalization_constant": scalar_text(&d.c),
                "rate": num(d.rate()),
                "grid": values,
            });
            if let Some(f) = &ft {
                payload["fixed_trace"] = f.to_json();
                payload["fixed_trace"]["display_exponent"] = json!(scalar_text(&f.display_exponent()));
                payload["fixed_trace"]["display_polynomial"] =
                    json!(f.display_polynomial().coeffs().iter().map(scalar_text).collect::<Vec<_>>());
            }
            Ok(Envelope {
                command: "density",
                params: echo,
                precision_mode: label,
                payload,
            }
            .render())
        }
    }
}

pub fn moments(e: &Ensemble, etas: &[String], fixed_trace: bool, format: Format, precision: &str) -> Result<Outcome> {
    let params = e.params()?;
    let prec = resolve_precision(precision, &params)?;
    if format == Format::Coeffs {
        return Err(Error::Usage("moments supports --format json or csv".into()));
    }
    let mut echo = params_json(&params);
    echo.insert("fixed_trace".into(), json!(fixed_trace));
    echo.insert("eta".into(), json!(etas));
    let rows = dispatch!(prec, moments_in(&params, etas, fixed_trace))?;
    let text = match format {
        Format::Csv => csv_table(
            &["eta", "value"],
            &rows.iter().map(|(eta, text, _)| vec![eta.clone(), text.clone()]).collect::<Vec<_>>(),
        ),
        _ => Envelope {
            command: "moments",
            params: Value::Object(echo),
            precision_mode: prec.label(),
            payload: json!({
                "moments": rows
                    .iter()
                    .map(|(eta, text, approx)| json!({"eta": eta, "value": text, "approx": num(*approx)}))
                    .collect::<Vec<_>>(),
            }),
        }
        .render(),
    };
    Ok(Outcome { text, consistent: true })
}

/// (η as given, value as text, value as f64) per requested order.
fn moments_in<F: Scalar>(
    ctx: &F::Context,
    params: &EnsembleParams,
    etas: &[String],
    fixed_trace: bool,
) -> Result<Vec<(String, String, f64)>> {
    let d = build_density::<F>(params, ctx)?;
    let ft = if fixed_trace { Some(build_fixed_trace::<F>(params, ctx)?) } else { None };
    etas.iter()
        .map(|eta| {
            let t = eta.trim();
            if let Ok(k) = t.parse::<i64>() {
                let v = match &ft {
                    Some(f) => f.moment_exact(k)?,
                    None => d.moment_exact(k)?,
                };
                Ok((t.to_string(), scalar_text(&v), v.to_f64()))
            } else {
                let x: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("cannot parse moment order {eta:?}")))?;
                let v = match &ft {
                    Some(f) => f.moment(x)?,
                    None => d.moment(x)?,
                };
                Ok((t.to_string(), float(v), v))
            }
        })
        .collect()
}

pub fn hyp1f1(e: &Ensemble, xs: &[String], format: Format, precision: &str) -> Result<Outcome> {
    let params = e.params()?;
    let prec = resolve_precision(precision, &params)?;
    if format == Format::Coeffs {
        return Err(Error::Usage("hyp1f1 supports --format json or csv".into()));
    }
    let mut echo = params_json(&params);
    echo.insert("x".into(), json!(xs));
    let (rows, prefactor, coeffs) = dispatch!(prec, hyp_in(&params, xs))?;
    let text = match format {
        Format::Csv if prec == Precision::Exact => csv_table(
            &["x", "value", "exact"],
            &rows.iter().map(|(x, v, approx)| vec![x.clone(), float(*approx), v.clone()]).collect::<Vec<_>>(),
        ),
        Format::Csv => csv_table(
            &["x", "value"],
            &rows.iter().map(|(x, v, _)| vec![x.clone(), v.clone()]).collect::<Vec<_>>(),
        ),
        _ => Envelope {
            command: "hyp1f1",
            params: Value::Object(echo),
            precision_mode: prec.label(),
            payload: json!({
                "prefactor": prefactor,
                "coefficients": coeffs,
                "values": rows
                    .iter()
                    .map(|(x, v, approx)| json!({"x": x, "value": v, "approx": num(*approx)}))
                    .collect::<Vec<_>>(),
            }),
        }
        .render(),
    };
    Ok(Outcome { text, consistent: true })
}

type HypRows = (Vec<(String, String, f64)>, String, Vec<String>);

fn hyp_in<F: Scalar>(ctx: &F::Context, params: &EnsembleParams, xs: &[String]) -> Result<HypRows> {
    let h = hyp1f1_matrix::<F>(params, ctx)?;
    let rows = xs
        .iter()
        .map(|x| {
            let t = x.trim();
            let q = parse_rational_literal(t);
            match q {
                Some(q) if F::EXACT => {
                    let v = h.eval(&F::from_rational(&q, ctx));
                    Ok((t.to_string(), scalar_text(&v), v.to_f64()))
                }
                _ => {
                    let xf: f64 = t
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("cannot parse x from {x:?}")))?;
                    let v = h.eval(&F::from_f64(xf, ctx));
                    Ok((t.to_string(), scalar_text(&v), v.to_f64()))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let coeffs = h.poly.coeffs().iter().map(scalar_text).collect();
    Ok((rows, scalar_text(&h.prefactor), coeffs))
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    e: &Ensemble,
    count: usize,
    seed: u64,
    fixed_trace: bool,
    delay_time: Option<f64>,
    ks: bool,
    hist: Option<usize>,
    format: Format,
) -> Result<Outcome> {
    let params = e.params()?;
    let mode = match (fixed_trace, delay_time) {
        (_, Some(tau_h)) => SampleMode::DelayTime { tau_h },
        (true, None) => SampleMode::FixedTrace,
        (false, None) => SampleMode::Unrestricted,
    };
    if mode == SampleMode::FixedTrace && params.n == 1 && ks {
        return Err(Error::Unsupported("fixed-trace KS needs n >= 2; for n = 1 every draw is 1".into()));
    }
    let cfg = SampleConfig::new(params.clone(), count, seed, mode)?;
    let s = sample(&cfg)?;
    let prec = Precision::auto(&params);
    let ks_value = if ks {
        Some(dispatch!(prec, ks_in(&cfg, &s.values))?)
    } else {
        None
    };
    let histogram = hist.map(|b| s.histogram(b)).transpose()?;
    let text = match format {
        Format::Csv => {
            if let Some(d) = ks_value {
                eprintln!("ks statistic: {}", float(d));
            }
            match &histogram {
                Some(h) => csv_table(
                    &["bin_center", "density"],
                    &h.iter().map(|(c, d)| vec![float(*c), float(*d)]).collect::<Vec<_>>(),
                ),
                None => csv_table(&["value"], &s.values.iter().map(|v| vec![float(*v)]).collect::<Vec<_>>()),
            }
        }
        Format::Coeffs => return Err(Error::Usage("simulate supports --format json or csv".into())),
        Format::Json => {
            let mut payload = json!({
                "config": cfg.to_json(),
                "mean": num(s.mean()),
                "standard_error": num(s.standard_error()),
                "min": num(s.values[0]),
                "max": num(s.values[s.values.len() - 1]),
            });
            if let Some(d) = ks_value {
                payload["ks"] = json!({
                    "statistic": num(d),
                    "critical_1pct": num(1.628 / (count as f64).sqrt()),
                });
            }
            if let Some(h) = &histogram {
                payload["histogram"] = json!(h.iter().map(|(c, d)| json!([num(*c), num(*d)])).collect::<Vec<_>>());
            }
            let mut echo = params_json(&params);
            echo.insert("count".into(), json!(count));
            echo.insert("seed".into(), json!(seed));
            echo.insert("fixed_trace".into(), json!(fixed_trace));
            echo.insert("delay_time".into(), opt_json(delay_time));
            echo.insert("ks".into(), json!(ks));
            echo.insert("hist".into(), json!(hist));
            Envelope {
                command: "simulate",
                params: Value::Object(echo),
                precision_mode: if ks { prec.label() } else { "float(53)".into() },
                payload,
            }
            .render()
        }
    };
    Ok(Outcome { text, consistent: true })
}

fn ks_in<F: Scalar>(ctx: &F::Context, cfg: &SampleConfig, values: &[f64]) -> Result<f64> {
    let p = &cfg.params;
    match cfg.mode {
        SampleMode::Unrestricted => {
            let d = build_density::<F>(p, ctx)?;
            ks_statistic(values, |x| d.cdf(x))
        }
        SampleMode::FixedTrace => {
            let d = build_fixed_trace::<F>(p, ctx)?;
            ks_statistic(values, |x| d.cdf(x))
        }
        SampleMode::DelayTime { tau_h } => {
            let d = delay_time_density::<F>(p.n, p.beta.clone(), tau_h, ctx)?;
            ks_statistic(values, |x| d.cdf(x))
        }
    }
}

pub struct AsymptoticGrids<'a> {
    pub tw_transform: Option<&'a str>,
    pub large_dev: Option<&'a str>,
    pub ld_compare: Option<&'a str>,
}

pub fn asymptotics(
    e: &Ensemble,
    grids: AsymptoticGrids<'_>,
    tw_table: Option<&Path>,
    fixed_trace: bool,
    format: Option<Format>,
    precision: &str,
) -> Result<Outcome> {
    let params = e.params()?;
    let prec = resolve_precision(precision, &params)?;
    // Read the table before any expensive work so a bad path fails fast.
    let table = tw_table.map(TwTable::from_path).transpose()?;
    let tw_points = grids.tw_transform.map(parse_grid).transpose()?;
    let ld_points = grids.large_dev.map(parse_grid).transpose()?;
    let cmp_points = grids.ld_compare.map(parse_grid).transpose()?;
    if cmp_points.is_some() && fixed_trace {
        return Err(Error::Usage("--ld-compare applies to the unrestricted ensemble only".into()));
    }
    let given = [tw_points.is_some(), ld_points.is_some(), cmp_points.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    let format = format.unwrap_or(if given == 1 { Format::Csv } else { Format::Json });
    if format == Format::Coeffs || (format == Format::Csv && given != 1) {
        return Err(Error::Usage(
            "csv output needs exactly one of --tw-transform, --large-dev, --ld-compare".into(),
        ));
    }

    let ld = ld_params(&params)?;
    let scaling = SoftEdgeScaling::new(&params);

    let needs_density = tw_points.is_some() || cmp_points.is_some();
    let (tw_rows, cmp_rows) = if needs_density {
        dispatch!(
            prec,
            asymptotic_density_in(&params, fixed_trace, tw_points.as_deref(), cmp_points.as_deref())
        )?
    } else {
        (None, None)
    };

    let tw_rows: Option<Vec<(f64, f64, Option<f64>)>> = tw_rows.map(|rows| {
        rows.into_iter()
            .map(|(s, v)| (s, v, table.as_ref().and_then(|t| t.interpolate(s).ok())))
            .collect()
    });
    let ld_rows: Option<Vec<(f64, Option<f64>, Option<f64>)>> = ld_points.map(|zs| {
        zs.into_iter()
            .map(|z| (z, ld.left_rate(z).ok(), ld.right_rate(z).ok()))
            .collect()
    });

    let text = if format == Format::Csv {
        if let Some(rows) = &tw_rows {
            let mut header = vec!["s", "exact_scaled"];
            if table.is_some() {
                header.push("tw_reference");
            }
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(s, v, t)| {
                    let mut r = vec![float(*s), float(*v)];
                    if table.is_some() {
                        r.push(opt_cell(*t));
                    }
                    r
                })
                .collect();
            csv_table(&header, &body)
        } else if let Some(rows) = &ld_rows {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(z, l, r)| vec![float(*z), opt_cell(*l), opt_cell(*r)])
                .collect();
            csv_table(&["z", "phi_minus", "phi_plus"], &body)
        } else {
            let rows = cmp_rows.as_ref().expect("one grid given");
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(x, f, p)| vec![float(*x), opt_cell(*f), opt_cell(*p)])
                .collect();
            csv_table(&["x", "ln_f", "ld_prediction"], &body)
        }
    } else {
        let scaling_json = match &scaling {
            Ok(s) => json!({"m": num(s.m), "nu": num(s.nu), "sigma": num(s.sigma)}),
            Err(err) => json!({"unavailable": err.to_string()}),
        };
        let mut payload = json!({
            "soft_edge": scaling_json,
            "large_deviation": {
                "a": num(ld.a),
                "zeta_minus": num(ld.zeta_minus),
                "zeta_plus": num(ld.zeta_plus),
                "delta_minus": num(ld.delta_minus),
                "typical": num(ld.typical()),
            },
        });
        if let Some(rows) = &tw_rows {
            payload["tw_transform"] = json!(rows
                .iter()
                .map(|(s, v, t)| json!({"s": num(*s), "exact_scaled": num(*v), "tw_reference": opt_json(*t)}))
                .collect::<Vec<_>>());
        }
        if let Some(rows) = &ld_rows {
            payload["large_dev"] = json!(rows
                .iter()
                .map(|(z, l, r)| json!({"z": num(*z), "phi_minus": opt_json(*l), "phi_plus": opt_json(*r)}))
                .collect::<Vec<_>>());
        }
        if let Some(rows) = &cmp_rows {
            payload["ld_compare"] = json!(rows
                .iter()
                .map(|(x, f, p)| json!({"x": num(*x), "ln_f": opt_json(*f), "ld_prediction": opt_json(*p)}))
                .collect::<Vec<_>>());
        }
        let mut echo = params_json(&params);
        echo.insert("fixed_trace".into(), json!(fixed_trace));
        echo.insert("tw_transform".into(), json!(grids.tw_transform));
        echo.insert("large_dev".into(), json!(grids.large_dev));
        echo.insert("ld_compare".into(), json!(grids.ld_compare));
        echo.insert("tw_table".into(), json!(tw_table.map(|p| p.display().to_string())));
        Envelope {
            command: "asymptotics",
            params: Value::Object(echo),
            precision_mode: prec.label(),
            payload,
        }
        .render()
    };
    Ok(Outcome { text, consistent: true })
}

type ScaledRows = Vec<(f64, f64)>;
type CompareRows = Vec<(f64, Option<f64>, Option<f64>)>;

fn asymptotic_density_in<F: Scalar>(
    ctx: &F::Context,
    params: &EnsembleParams,
    fixed_trace: bool,
    tw: Option<&[f64]>,
    cmp: Option<&[f64]>,
) -> Result<(Option<ScaledRows>, Option<CompareRows>)> {
    let d = build_density::<F>(params, ctx)?;
    let tw_rows = match tw {
        Some(grid) => {
            let scaling = SoftEdgeScaling::new(params)?;
            Some(if fixed_trace {
                let f = build_fixed_trace::<F>(params, ctx)?;
                soft_edge_transform(&f, &scaling, grid, true)?
            } else {
                soft_edge_transform(&d, &scaling, grid, false)?
            })
        }
        None => None,
    };
    let cmp_rows = match cmp {
        Some(grid) => {
            let ld = ld_params(params)?;
            Some(
                grid.iter()
                    .map(|&x| (x, d.ln_eval(x).ok(), ld.log_density(x).ok()))
                    .collect(),
            )
        }
        None => None,
    };
    Ok((tw_rows, cmp_rows))
}

pub fn verify(suite: &str) -> Result<Outcome> {
    let suite: Suite = suite.parse()?;
    let checks = verify::run(suite);
    for c in checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: expected {}, got {}", c.name, c.expected, c.actual);
    }
    let passed = checks.iter().all(|c| c.pass);
    let text = Envelope {
        command: "verify",
        params: json!({"suite": suite.to_string()}),
        precision_mode: "mixed".into(),
        payload: json!({
            "suite": suite.to_string(),
            "passed": passed,
            "checks": checks.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        }),
    }
    .render();
    Ok(Outcome { text, consistent: passed })
}
