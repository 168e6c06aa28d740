//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::f64::consts::{E, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use betawl::asymptotics::ld_params;
use betawl::density::delay_time_density;
use betawl::hyp::hyp1f1_matrix;
use betawl::montecarlo::{ks_statistic, sample, SampleConfig, SampleMode};
use betawl::oracle::{kappa_via_partitions_exact, mixed_moment, quadrature_g};
use betawl::quadrature::adaptive;
use betawl::{
    build_density, build_fixed_trace, compute_g, BigFloat, Beta, EigenDensity, EnsembleParams, FloatContext, Scalar,
};
use num_rational::BigRational;

type Outcome = Result<String, String>;

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn params(n: usize, alpha: u32, beta: &str) -> EnsembleParams {
    EnsembleParams::new(n, alpha, beta.parse().unwrap()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// Unrestricted rows: (n, α, β, factor, coefficients from the top power down).
const UNRESTRICTED: [(usize, u32, &str, (i64, i64), &[i64]); 4] = [
    (4, 3, "1/2", (1, 217945728000), &[1, 72, 2520, 54768, 804384, 8297856, 60230016, 300174336, 958003200, 1490227200]),
    (3, 4, "1", (1, 464486400), &[1, 40, 800, 10080, 85680, 504000, 2056320, 5322240, 6652800]),
    (5, 2, "2", (1, 17280), &[1, 48, 960, 10320, 64800, 241920, 524160, 604800, 302400]),
    (3, 3, "4", (16, 1575), &[4, 84, 735, 3360, 8400, 11340, 6615]),
];

fn criterion_1() -> Outcome {
    for (n, a, b, (fn_, fd), coeffs) in UNRESTRICTED {
        let d = build_density::<BigRational>(&params(n, a, b), &()).map_err(|e| e.to_string())?;
        let want: Vec<BigRational> = coeffs.iter().rev().map(|&c| q(c, 1) * q(fn_, fd)).collect();
        ensure(d.kappa == want, format!("row n={n} alpha={a} beta={b} differs"))?;
    }
    let d = build_density::<BigFloat>(&params(3, 2, "e"), &FloatContext::new(256)).map_err(|e| e.to_string())?;
    let den = 64.0 * (E + 1.0) * (E + 2.0).powi(2) * (E + 4.0);
    let poly = |c: &[(f64, i32)]| c.iter().map(|&(a, k)| a * E.powi(k)).sum::<f64>() / den;
    let want = [
        poly(&[(192.0, 3), (720.0, 4), (960.0, 5), (540.0, 6), (108.0, 7)]),
        poly(&[(192.0, 4), (624.0, 5), (648.0, 6), (216.0, 7)]),
        poly(&[(96.0, 5), (240.0, 6), (144.0, 7)]),
        poly(&[(24.0, 6), (36.0, 7)]),
        poly(&[(3.0, 7)]),
    ];
    ensure(d.kappa.len() == want.len(), "beta=e row has the wrong length")?;
    let worst = d.kappa.iter().zip(want).map(|(k, w)| rel(k.to_f64(), w)).fold(0.0, f64::max);
    ensure(worst <= 1e-10, format!("beta=e row max rel err {worst:e}"))?;
    Ok(format!("4 exact rows equal; beta=e max rel err {worst:.1e}"))
}

// Fixed-trace rows: (n, α, β, factor, exponent of (1−nx), coefficients).
const FIXED: [(usize, u32, &str, (i64, i64), (i64, i64), &[i64]); 3] = [
    (4, 3, "1", (-36480, 1), (8, 1), &[94976, 159488, -288960, 197120, -77728, 12768, 728, -112, -27, -12]),
    (5, 2, "2", (628320, 1), (23, 1), &[75355, -92420, 29788, 4676, -580, -1234, 142, 22, 1]),
    (4, 3, "4", (7238088, 1), (26, 1), &[3472, -44528, 63564, -53204, 23884, -2940, -749, 43, 27, 3]),
];

fn criterion_2() -> Outcome {
    for (n, a, b, (fn_, fd), (en, ed), coeffs) in FIXED {
        let f = build_fixed_trace::<BigRational>(&params(n, a, b), &()).map_err(|e| e.to_string())?;
        let mut want = vec![q(0, 1); a as usize];
        want.extend(coeffs.iter().rev().map(|&c| q(c, 1) * q(fn_, fd)));
        let got = f.display_polynomial().into_coeffs();
        ensure(got == want, format!("row n={n} alpha={a} beta={b} polynomial differs"))?;
        ensure(f.display_exponent() == q(en, ed), format!("row n={n} alpha={a} beta={b} exponent differs"))?;
    }
    let f = build_fixed_trace::<BigFloat>(&params(3, 2, "pi"), &FloatContext::new(256)).map_err(|e| e.to_string())?;
    let k = 9.0 * (3.0 * PI + 2.0) * (3.0 * PI + 4.0) * (3.0 * PI + 7.0) * (3.0 * PI + 8.0)
        / (2.0 * (PI + 2.0) * (PI + 4.0));
    let want = [k * (PI + 2.0), -4.0 * k, k * (8.0 - 6.0 * PI), -36.0 * k, k * (42.0 + 9.0 * PI)];
    let got: Vec<f64> = f.display_polynomial().coeffs().iter().map(Scalar::to_f64).collect();
    ensure(got.len() == 7 && got[0].abs() < 1e-60 && got[1].abs() < 1e-60, "beta=pi row has wrong low terms")?;
    let worst = got[2..].iter().zip(want).map(|(g, w)| rel(*g, w)).fold(0.0, f64::max);
    let exp_err = rel(f.display_exponent().to_f64(), 3.0 * PI + 1.0);
    ensure(worst <= 1e-10 && exp_err <= 1e-10, format!("beta=pi row max rel err {worst:e}, exponent {exp_err:e}"))?;
    Ok(format!("3 exact rows equal; beta=pi max rel err {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let rows = [
        (3, 6, "1/3", 10.0, 22.6555),
        (4, 5, "1", 5.0, 335.899),
        (5, 3, "2", 8.0, 87447.5),
        (5, 4, "3", 2.0, 320.040),
        (7, 3, "4", 1.0, 72.2218),
        (3, 2, "5pi", 7.0, 203.910),
    ];
    let mut worst = 0.0f64;
    for (n, a, b, x, v) in rows {
        let p = params(n, a, b);
        let got = if p.beta.is_rational() {
            hyp1f1_matrix::<BigRational>(&p, &()).map_err(|e| e.to_string())?.eval_f64(x)
        } else {
            hyp1f1_matrix::<BigFloat>(&p, &FloatContext::new(256)).map_err(|e| e.to_string())?.eval_f64(x)
        };
        let err = rel(got, v);
        ensure(err <= 1e-4, format!("n={n} alpha={a} beta={b}: {got} vs {v}"))?;
        worst = worst.max(err);
    }
    Ok(format!("6 values, max rel err {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let k = kappa_via_partitions_exact(&params(5, 3, "2"), 7).map_err(|e| e.to_string())?;
    ensure(k == q(159, 16), format!("kappa_7 = {k}"))?;
    let beta = Beta::integer(2);
    let mut worst = 0.0f64;
    for (e, v) in [([0, 2, 3, 3], 3175200.0), ([1, 1, 3, 3], 1360800.0), ([1, 2, 2, 3], 680400.0), ([2, 2, 2, 2], 302400.0)] {
        let m = mixed_moment(5, &beta, &e, None).map_err(|e| e.to_string())?;
        let err = rel(m.value, v);
        ensure(err <= 1e-8, format!("moment {e:?} = {}", m.value))?;
        worst = worst.max(err);
    }
    Ok(format!("kappa_7 = 159/16; moments max rel err {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let betas = ["1/2", "1", "2", "3", "4"];
    let one = q(1, 1);
    let mut count = 0;
    for n in 1..=10 {
        for a in 0..=6 {
            for b in betas {
                let d = build_density::<BigRational>(&params(n, a, b), &()).map_err(|e| e.to_string())?;
                let s = d.normalization_sum().map_err(|e| e.to_string())?;
                ensure(s == one, format!("n={n} alpha={a} beta={b}: integral {s}"))?;
                count += 1;
            }
        }
    }
    let mut worst = 0.0f64;
    for n in 2..=6 {
        for a in 0..=4 {
            for b in betas {
                let f = build_fixed_trace::<BigRational>(&params(n, a, b), &()).map_err(|e| e.to_string())?;
                let total = adaptive(0.0, 1.0 / n as f64, 1e-12, |x| f.pdf(x));
                let err = (total - 1.0).abs();
                ensure(err <= 1e-8, format!("fixed trace n={n} alpha={a} beta={b}: integral {total}"))?;
                worst = worst.max(err);
            }
        }
    }
    Ok(format!("{count} exact integrals equal 1; fixed-trace max |1 - integral| {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2, 3] {
        for a in 0..=4 {
            for b in ["2", "4"] {
                let p = params(n, a, b);
                let g = compute_g::<BigRational>(&p, &()).map_err(|e| e.to_string())?;
                for x in [0.0, 0.5, 1.0, 5.0] {
                    let qv = quadrature_g(&p, x, None).map_err(|e| e.to_string())?.value;
                    let err = rel(qv, g.eval_f64(x));
                    ensure(err <= 1e-8, format!("n={n} alpha={a} beta={b} x={x}: rel err {err:e}"))?;
                    worst = worst.max(err);
                }
            }
        }
    }
    Ok(format!("80 points, max rel err {worst:.1e}"))
}

const SAMPLES: usize = 50_000;

fn ks_for(p: EnsembleParams, mode: SampleMode, seed: u64) -> Result<f64, String> {
    let cfg = SampleConfig::new(p.clone(), SAMPLES, seed, mode).map_err(|e| e.to_string())?;
    let s = sample(&cfg).map_err(|e| e.to_string())?;
    let r = match mode {
        SampleMode::Unrestricted => {
            let d = build_density::<BigRational>(&p, &()).map_err(|e| e.to_string())?;
            ks_statistic(&s.values, |x| d.cdf(x))
        }
        SampleMode::FixedTrace => {
            let d = build_fixed_trace::<BigRational>(&p, &()).map_err(|e| e.to_string())?;
            ks_statistic(&s.values, |x| d.cdf(x))
        }
        SampleMode::DelayTime { tau_h } => {
            let d = delay_time_density::<BigRational>(p.n, p.beta.clone(), tau_h, &()).map_err(|e| e.to_string())?;
            ks_statistic(&s.values, |x| d.cdf(x))
        }
    };
    r.map_err(|e| e.to_string())
}

fn criterion_7() -> Outcome {
    let cases = [
        (params(5, 2, "2"), SampleMode::Unrestricted),
        (params(3, 3, "4"), SampleMode::Unrestricted),
        (params(4, 3, "1"), SampleMode::Unrestricted),
        (params(5, 2, "2"), SampleMode::FixedTrace),
    ];
    let mut out = Vec::new();
    for (k, (p, mode)) in cases.into_iter().enumerate() {
        let d = ks_for(p.clone(), mode, 1000 + k as u64)?;
        ensure(d < 0.01, format!("n={} alpha={} beta={} {mode:?}: KS {d}", p.n, p.alpha, p.beta))?;
        out.push(format!("{d:.4}"));
    }
    Ok(format!("KS = [{}]", out.join(", ")))
}

fn criterion_8() -> Outcome {
    let mut out = Vec::new();
    for (b, alpha) in [("2", 8), ("4", 16)] {
        let d = ks_for(params(8, alpha, b), SampleMode::DelayTime { tau_h: 1.0 }, 2000 + alpha as u64)?;
        ensure(d < 0.01, format!("beta={b}: KS {d}"))?;
        out.push(format!("beta={b}: {d:.4}"));
    }
    Ok(format!("KS {}", out.join(", ")))
}

fn criterion_9() -> Outcome {
    let p = params(25, 225, "2");
    let d = build_density::<BigFloat>(&p, &FloatContext::new(512)).map_err(|e| e.to_string())?;
    ensure(d.kappa.len() == 225 * 24 + 1, "unexpected degree")?;

    // Finite and single-peaked on a grid covering the bulk of the law.
    let grid: Vec<f64> = (1..=600).map(|k| k as f64 * 0.5).collect();
    let lf: Vec<f64> = grid.iter().map(|&x| d.ln_eval(x).unwrap_or(f64::NAN)).collect();
    ensure(lf.iter().all(|v| v.is_finite()), "non-finite log-density on the grid")?;
    let peak = (0..lf.len()).max_by(|&i, &j| lf[i].total_cmp(&lf[j])).unwrap();
    ensure(
        lf[..=peak].windows(2).all(|w| w[1] >= w[0]) && lf[peak..].windows(2).all(|w| w[1] <= w[0]),
        "log-density is not single-peaked",
    )?;

    let ld = ld_params(&p).map_err(|e| e.to_string())?;
    let l0 = ld.left_rate(0.0).map_err(|e| e.to_string())?;
    let r0 = ld.right_rate(0.0).map_err(|e| e.to_string())?;
    ensure(l0.abs() <= 1e-12 && r0.abs() <= 1e-12, format!("phi(0) = ({l0:e}, {r0:e})"))?;

    let t = ld.typical();
    let eps = 1e-6 * t;
    let below = ld.log_density(t - eps).map_err(|e| e.to_string())?;
    let above = ld.log_density(t + eps).map_err(|e| e.to_string())?;
    let at = ld.log_density(t).map_err(|e| e.to_string())?;
    ensure(
        (below - at).abs() < 1e-6 && (above - at).abs() < 1e-6,
        format!("jump at the typical value: {below}, {at}, {above}"),
    )?;

    let mut worst = 0.0f64;
    let left = [0.5, 0.6, 0.7, 0.8, 0.9].map(|s| t * (1.0 - s));
    let right = [0.3, 0.5, 0.75, 1.0, 1.5].map(|s| t * (1.0 + s));
    for x in left.into_iter().chain(right) {
        let exact = d.ln_eval(x).map_err(|e| e.to_string())?;
        let pred = ld.log_density(x).map_err(|e| e.to_string())?;
        let err = rel(exact, pred);
        ensure(err <= 0.15, format!("x = {x:.3}: ln f = {exact:.3}, prediction {pred:.3}"))?;
        worst = worst.max(err);
    }
    Ok(format!("degree 5400, peak at x = {:.1}, LD max rel err {worst:.3}", grid[peak]))
}

fn kummer(n: usize, c: &BigRational) -> Vec<BigRational> {
    // Σ_k (1−n)_k/(c)_k (−x)^k/k!
    let mut out = Vec::new();
    let mut term = q(1, 1);
    for k in 0..n as i64 {
        out.push(term.clone());
        let a = q(1 - n as i64 + k, 1);
        term = term * a / (c + q(k, 1)) * q(-1, k + 1);
    }
    out
}

fn criterion_10() -> Outcome {
    for b in [1i64, 2, 4] {
        for n in 1..=6 {
            let h = hyp1f1_matrix::<BigRational>(&params(n, 1, &b.to_string()), &()).map_err(|e| e.to_string())?;
            let c = q(2, b) + q(2, 1);
            ensure(h.poly.coeffs() == kummer(n, &c).as_slice(), format!("beta={b} n={n} differs"))?;
        }
    }
    Ok("18 cases equal".into())
}

fn criterion_11() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_betawl");
    let run = |extra: &[&str]| {
        let mut args = vec!["simulate", "5", "2", "2", "50000", "42"];
        args.extend_from_slice(extra);
        Command::new(bin).args(&args).output().map_err(|e| e.to_string())
    };
    for extra in [&[][..], &["--format", "csv"][..], &["--fixed-trace", "--hist", "40"][..]] {
        let a = run(extra)?;
        let b = run(extra)?;
        ensure(a.status.success() && b.status.success(), format!("simulate {extra:?} failed"))?;
        ensure(a.stdout == b.stdout, format!("simulate {extra:?} output differs"))?;
    }
    Ok("3 invocation pairs byte-identical".into())
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 11] = [
        (1, "unrestricted coefficient table", Duration::from_secs(1), criterion_1),
        (2, "fixed-trace coefficient table", Duration::from_secs(1), criterion_2),
        (3, "hypergeometric value table", Duration::from_secs(1), criterion_3),
        (4, "worked partition example", Duration::from_secs(10), criterion_4),
        (5, "normalization sweep", Duration::from_secs(30), criterion_5),
        (6, "recursion against quadrature", Duration::from_secs(30), criterion_6),
        (7, "Monte-Carlo agreement", Duration::from_secs(60), criterion_7),
        (8, "delay-time pipeline", Duration::from_secs(60), criterion_8),
        (9, "large-n capability", Duration::from_secs(300), criterion_9),
        (10, "scalar hypergeometric reduction", Duration::from_secs(30), criterion_10),
        (11, "simulate determinism", Duration::from_secs(60), criterion_11),
    ];
    let mut failed = 0;
    for (id, name, budget, f) in criteria {
        let start = Instant::now();
        let result = f();
        let took = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if took <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over the {budget:?} budget")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} [{id:>2}] {name} ({:.2} s): {detail}", took.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
