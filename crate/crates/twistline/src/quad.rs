//! Gauss-Legendre quadrature and a simple adaptive integrator.
//!
//! The integrands in this crate (1/sqrt(f), sqrt(f), ...) are analytic within
//! each lattice element, so a fixed high-order Gauss rule per subinterval plus
//! bisection on the G7-vs-G15 discrepancy converges very quickly. Callers are
//! expected to split integration ranges at element boundaries themselves.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1], nodes
/// ascending. Computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Asymptotic initial guess for the i-th root (descending in x).
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Legendre polynomial P_n(x) and its derivative via the three-term
/// recurrence (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let dp = (n as f64) * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// A reusable Gauss-Legendre rule mapped onto arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        GaussRule { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn g7() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(7))
}

fn g15() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(15))
}

/// Fixed 7-point Gauss integral; exact to machine precision for smooth
/// integrands on short intervals (used per integrator step).
pub fn gauss7<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    g7().integrate(f, a, b)
}

/// Adaptive integration by bisection. The error estimate on each subinterval
/// is the G15 result against the sum of two half-interval G15 results.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let coarse = g15().integrate(f, a, b);
    adapt(f, a, b, coarse, rel_tol, abs_tol, 0)
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: usize,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = g15().integrate(f, a, mid);
    let right = g15().integrate(f, mid, b);
    let refined = left + right;
    let err = (refined - whole).abs();
    if err <= abs_tol + rel_tol * refined.abs() || depth >= 48 {
        return refined;
    }
    adapt(f, a, mid, left, rel_tol, 0.5 * abs_tol, depth + 1)
        + adapt(f, mid, b, right, rel_tol, 0.5 * abs_tol, depth + 1)
}

/// Adaptive integration over [a, b] split at the supplied interior
/// breakpoints (ascending, possibly outside the range; those are ignored).
pub fn adaptive_piecewise<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    let mut edges = vec![a];
    for &p in breakpoints {
        if p > a && p < b {
            edges.push(p);
        }
    }
    edges.push(b);
    edges
        .windows(2)
        .map(|w| adaptive(f, w[0], w[1], rel_tol, abs_tol))
        .sum()
}
