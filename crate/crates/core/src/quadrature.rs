//! One-dimensional Gauss-Legendre integration used by CDFs and checks.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::GaussLegendre;

const PANEL_ORDER: usize = 20;
const MAX_DEPTH: u32 = 48;

fn rule(order: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(order)
        .or_insert_with(|| {
            let order = NonZeroUsize::new(order.max(1)).expect("non-zero");
            Arc::new(GaussLegendre::new(order).as_node_weight_pairs().to_vec())
        })
        .clone()
}

/// Fixed-order Gauss-Legendre rule on [a, b].
pub fn gauss_legendre<F: FnMut(f64) -> f64>(order: usize, a: f64, b: f64, mut f: F) -> f64 {
    let nodes = rule(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * nodes.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// Composite rule with `panels` equal panels of order `order`.
pub fn composite<F: FnMut(f64) -> f64>(order: usize, panels: usize, a: f64, b: f64, mut f: F) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + h * k as f64;
            gauss_legendre(order, lo, lo + h, &mut f)
        })
        .sum()
}

/// Adaptive bisection on 20-point panels until each panel's estimate agrees
/// with the sum over its halves to `tol` (absolute, scaled down per level).
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, mut f: F) -> f64 {
    let whole = gauss_legendre(PANEL_ORDER, a, b, &mut f);
    refine(&mut f, a, b, whole, tol, 0)
}

fn refine<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let mid = 0.5 * (a + b);
    let left = gauss_legendre(PANEL_ORDER, a, mid, &mut *f);
    let right = gauss_legendre(PANEL_ORDER, mid, b, &mut *f);
    let split = left + right;
    if (split - whole).abs() <= tol || depth >= MAX_DEPTH {
        return split;
    }
    refine(f, a, mid, left, tol / 2.0, depth + 1) + refine(f, mid, b, right, tol / 2.0, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_and_exponentials() {
        assert!((gauss_legendre(5, 0.0, 2.0, |x| x.powi(9)) - 102.4).abs() < 1e-12);
        let e = adaptive(0.0, 1.0, 1e-14, f64::exp);
        assert!((e - (std::f64::consts::E - 1.0)).abs() < 1e-14);
        let c = composite(10, 7, 0.0, std::f64::consts::PI, f64::sin);
        assert!((c - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = adaptive(0.0, 1.0, 1e-12, |x| x.sqrt());
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }
}
