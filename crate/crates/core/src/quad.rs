//! Gauss–Legendre quadrature: fixed rules, composite panels, and a simple
//! adaptive driver for complex-valued integrands with error estimates.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::NumericError;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1],
/// computed once by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<std::sync::Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| std::sync::Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(rule) = guard.get(&n) {
        return rule;
    }
    let rule: &'static (Vec<f64>, Vec<f64>) = Box::leak(Box::new(compute_gl(n)));
    guard.insert(n, rule);
    rule
}

fn compute_gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for k in 0..m {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P'_n(x) by upward recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    (nodes, weights)
}

/// ∫_a^b f(x) dx by a single n-point Gauss–Legendre rule.
pub fn fixed_gl<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let (nodes, weights) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    for (&x, &w) in nodes.iter().zip(weights) {
        acc += f(mid + half * x) * w;
    }
    acc * half
}

/// Composite Gauss–Legendre over explicit panel boundaries.
pub fn composite_gl<F: FnMut(f64) -> Complex64>(
    mut f: F,
    cuts: &[f64],
    n_per_panel: usize,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for w in cuts.windows(2) {
        acc += fixed_gl(&mut f, w[0], w[1], n_per_panel);
    }
    acc
}

/// Panel boundaries on [a, b] sized so each panel spans at most
/// `cycles_per_panel` cycles of the local frequency `freq(x)` (cycles per
/// unit of x), with a floor so panels never collapse.
pub fn oscillation_panels<F: Fn(f64) -> f64>(
    a: f64,
    b: f64,
    freq: F,
    cycles_per_panel: f64,
) -> Vec<f64> {
    assert!(b > a);
    let mut cuts = vec![a];
    let mut x = a;
    let min_width = (b - a) * 1e-6;
    while x < b {
        let f_here = freq(x).abs().max(freq((x + b) * 0.5).abs());
        let width = if f_here > 0.0 {
            (cycles_per_panel / f_here).min(b - a)
        } else {
            b - a
        };
        x = (x + width.max(min_width)).min(b);
        cuts.push(x);
    }
    cuts
}

/// Result of an adaptive integration: value and an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Adaptive bisection with embedded GL(16)/GL(32) error estimates.
///
/// Errors with [`NumericError::QuadratureFailure`] when the panel budget is
/// exhausted before the tolerance `tol_abs + tol_rel·|I|` is met.
pub fn adaptive<F: FnMut(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
    context: &'static str,
) -> Result<QuadResult, NumericError> {
    adaptive_with_cuts(f, &[a, b], tol_abs, tol_rel, max_panels, context)
}

/// Adaptive bisection seeded with explicit initial panels (used to
/// pre-resolve oscillation before the refinement loop takes over).
pub fn adaptive_with_cuts<F: FnMut(f64) -> Complex64>(
    mut f: F,
    cuts: &[f64],
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
    context: &'static str,
) -> Result<QuadResult, NumericError> {
    #[derive(Clone, Copy)]
    struct Panel {
        a: f64,
        b: f64,
        value: Complex64,
        err: f64,
    }

    let estimate = |f: &mut F, a: f64, b: f64| -> (Complex64, f64) {
        let coarse = fixed_gl(&mut *f, a, b, 16);
        let fine = fixed_gl(&mut *f, a, b, 32);
        (fine, (fine - coarse).norm())
    };

    let mut panels: Vec<Panel> = cuts
        .windows(2)
        .map(|w| {
            let (value, err) = estimate(&mut f, w[0], w[1]);
            Panel { a: w[0], b: w[1], value, err }
        })
        .collect();
    for _ in 0..max_panels {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let tol = tol_abs + tol_rel * total.norm();
        if err <= tol {
            return Ok(QuadResult { value: total, error_estimate: err });
        }
        // Split the worst panel.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        let (vl, el) = estimate(&mut f, p.a, mid);
        let (vr, er) = estimate(&mut f, mid, p.b);
        panels.push(Panel { a: p.a, b: mid, value: vl, err: el });
        panels.push(Panel { a: mid, b: p.b, value: vr, err: er });
    }
    let total: Complex64 = panels.iter().map(|p| p.value).sum();
    let err: f64 = panels.iter().map(|p| p.err).sum();
    let tol = tol_abs + tol_rel * total.norm();
    if err <= tol {
        Ok(QuadResult { value: total, error_estimate: err })
    } else {
        Err(NumericError::QuadratureFailure { context, estimate: err, tolerance: tol })
    }
}
