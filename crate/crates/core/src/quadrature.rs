//! Composite Gauss-Legendre quadrature.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes per panel.
pub const ORDER: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial,
    /// starting from the Chebyshev-like initial guesses.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// The shared order-16 rule.
    pub fn standard() -> &'static Self {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(ORDER))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

/// Value and derivative of the degree-`n` Legendre polynomial at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Splits `[lo, hi]` into the fewest equal panels of width at most
/// `max_width`.
pub fn panels(lo: f64, hi: f64, max_width: f64) -> impl Iterator<Item = (f64, f64)> {
    let count = (((hi - lo) / max_width).ceil() as usize).max(1);
    let width = (hi - lo) / count as f64;
    (0..count).map(move |i| {
        let a = lo + width * i as f64;
        let b = if i + 1 == count { hi } else { a + width };
        (a, b)
    })
}

/// Composite nodes and weights over `[lo, hi]` with panels no wider than
/// `max_width`.
pub fn composite_nodes(lo: f64, hi: f64, max_width: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::standard();
    panels(lo, hi, max_width).flat_map(|(a, b)| rule.mapped(a, b).collect::<Vec<_>>()).collect()
}

/// Composite Gauss-Legendre integral of `f` over `[lo, hi]`.
pub fn integrate<F: FnMut(f64) -> f64>(lo: f64, hi: f64, max_width: f64, mut f: F) -> f64 {
    let rule = GaussLegendre::standard();
    panels(lo, hi, max_width).map(|(a, b)| rule.integrate(a, b, &mut f)).sum()
}

/// `∫ g^p` over a union of intervals, for a nonnegative integrand `g`.
pub fn power_integral<F: FnMut(f64) -> f64>(
    pieces: &[(f64, f64)],
    p: f64,
    max_width: f64,
    mut g: F,
) -> f64 {
    pieces
        .iter()
        .map(|&(lo, hi)| {
            integrate(lo, hi, max_width, |x| {
                let v = g(x);
                if p == 1.0 {
                    v
                } else if p == 2.0 {
                    v * v
                } else {
                    v.powf(p)
                }
            })
        })
        .sum()
}

/// Supremum of a nonnegative `g` over a union of intervals: a uniform grid
/// with `ORDER` points per panel, refined once by golden-section search
/// around the grid maximiser. Returns `(argmax, max)`.
pub fn grid_sup<F: FnMut(f64) -> f64>(pieces: &[(f64, f64)], max_width: f64, mut g: F) -> (f64, f64) {
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    let mut best_piece = (0.0, 0.0);
    let mut best_step = 0.0;
    for &(lo, hi) in pieces {
        let count = (((hi - lo) / max_width).ceil() as usize).max(1) * ORDER;
        let step = (hi - lo) / count as f64;
        for i in 0..=count {
            let x = if i == count { hi } else { lo + step * i as f64 };
            let v = g(x);
            if v > best.1 {
                best = (x, v);
                best_piece = (lo, hi);
                best_step = step;
            }
        }
    }
    if best.1.is_finite() && best_step > 0.0 {
        let lo = (best.0 - best_step).max(best_piece.0);
        let hi = (best.0 + best_step).min(best_piece.1);
        let refined = golden_max(lo, hi, &mut g);
        if refined.1 > best.1 {
            best = refined;
        }
    }
    best
}

/// Maximises a unimodal function on `[lo, hi]` by golden-section search.
/// Returns `(argmax, max)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut lo: f64, mut hi: f64, mut f: F) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
