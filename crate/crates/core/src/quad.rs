//! Adaptive Gauss-Legendre quadrature with explicit splits at non-smooth
//! points and square-root substitutions at singular endpoints.
//!
//! Refinement is driven by a global error budget: panels live in a priority
//! queue keyed by their error estimate (difference of a 15- and a 30-point
//! rule) and the worst panel is bisected until the summed estimate meets the
//! tolerance. A small relative floor recognises when the estimates are pure
//! roundoff noise of the integrand, which keeps integrable endpoint
//! singularities from triggering unbounded refinement.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the Legendre polynomial, seeded with the Chebyshev
    /// angle approximation.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre_and_derivative(n, x);
                pp = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (b + a);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| (GaussLegendre::new(15), GaussLegendre::new(30)))
}

/// How the integrand of a segment is evaluated in its local variable.
#[derive(Clone, Copy)]
enum Chart {
    /// plain t
    Plain,
    /// t = origin + u^2 (left-singular endpoint)
    FromLeft { origin: f64 },
    /// t = origin - u^2 (right-singular endpoint)
    FromRight { origin: f64 },
}

struct Panel {
    err: f64,
    val: f64,
    chart_idx: usize,
    lo: f64,
    hi: f64,
    splittable: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

const MAX_PANELS: usize = 40_000;
/// Error estimates below this fraction of the accumulated |integral| are
/// treated as integrand roundoff noise.
const NOISE_REL: f64 = 2e-13;

/// Integrate f over [a, b] to absolute tolerance `tol`, splitting first at the
/// interior points `splits` (kinks, sign changes, known interior singular
/// points).
///
/// `sqrt_left = Some(s)` declares a half-integer-power singular point at
/// s <= a; the first segment is integrated in the variable u = sqrt(t - s),
/// which removes the singular behaviour (exactly at the endpoint when s = a,
/// and as a benign reparameterization when the singularity lies outside the
/// interval but close to it). Symmetrically for `sqrt_right = Some(s)`,
/// s >= b, with u = sqrt(s - t).
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    splits: &[f64],
    sqrt_left: Option<f64>,
    sqrt_right: Option<f64>,
) -> Result<f64> {
    if !(a < b) {
        return Ok(0.0);
    }
    let mut pts: Vec<f64> = splits
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    pts.dedup();
    let mut edges = Vec::with_capacity(pts.len() + 2);
    edges.push(a);
    edges.extend(pts);
    edges.push(b);
    let n_seg = edges.len() - 1;

    if let Some(s) = sqrt_left {
        debug_assert!(s <= a, "left singular anchor must not exceed the interval");
    }
    if let Some(s) = sqrt_right {
        debug_assert!(s >= b, "right singular anchor must not precede the interval");
    }
    // segment charts: substituted variables anchored at declared singularities
    let mut charts: Vec<Chart> = Vec::new();
    let mut initial: Vec<(usize, f64, f64)> = Vec::new();
    for i in 0..n_seg {
        let (lo, hi) = (edges[i], edges[i + 1]);
        let left_sub = if i == 0 { sqrt_left } else { None };
        let right_sub = if i == n_seg - 1 { sqrt_right } else { None };
        match (left_sub, right_sub) {
            (None, None) => {
                charts.push(Chart::Plain);
                initial.push((charts.len() - 1, lo, hi));
            }
            (Some(s), None) => {
                charts.push(Chart::FromLeft { origin: s });
                initial.push((charts.len() - 1, (lo - s).sqrt(), (hi - s).sqrt()));
            }
            (None, Some(s)) => {
                charts.push(Chart::FromRight { origin: s });
                initial.push((charts.len() - 1, (s - hi).sqrt(), (s - lo).sqrt()));
            }
            (Some(sl), Some(sr)) => {
                let mid = 0.5 * (lo + hi);
                charts.push(Chart::FromLeft { origin: sl });
                initial.push((charts.len() - 1, (lo - sl).sqrt(), (mid - sl).sqrt()));
                charts.push(Chart::FromRight { origin: sr });
                initial.push((charts.len() - 1, (sr - hi).sqrt(), (sr - mid).sqrt()));
            }
        }
    }

    let mut eval = |chart: Chart, u: f64| -> f64 {
        match chart {
            Chart::Plain => f(u),
            Chart::FromLeft { origin } => 2.0 * u * f(origin + u * u),
            Chart::FromRight { origin } => 2.0 * u * f(origin - u * u),
        }
    };
    let (gl15, gl30) = rules();
    let make_panel = |chart_idx: usize, lo: f64, hi: f64, eval: &mut dyn FnMut(Chart, f64) -> f64| -> Panel {
        let chart = charts[chart_idx];
        let mut g = |u: f64| eval(chart, u);
        let coarse = gl15.integrate(&mut g, lo, hi);
        let fine = gl30.integrate(&mut g, lo, hi);
        let width_floor = 8.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1e-3);
        Panel {
            err: (fine - coarse).abs(),
            val: fine,
            chart_idx,
            lo,
            hi,
            splittable: hi - lo > width_floor,
        }
    };

    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut frozen_err = 0.0f64;
    let mut total_err = 0.0f64;
    let mut total_val = 0.0f64;
    let mut total_abs = 0.0f64;
    for &(ci, lo, hi) in &initial {
        let p = make_panel(ci, lo, hi, &mut eval);
        total_err += p.err;
        total_val += p.val;
        total_abs += p.val.abs();
        heap.push(p);
    }
    let mut n_panels = initial.len();
    while total_err > tol && total_err > NOISE_REL * total_abs.max(1e-300) {
        let Some(worst) = heap.pop() else { break };
        if !worst.splittable || n_panels >= MAX_PANELS {
            // retire the panel: its value stays counted, its error moves to
            // the frozen pool
            total_err -= worst.err;
            frozen_err += worst.err;
            continue;
        }
        total_err -= worst.err;
        total_val -= worst.val;
        total_abs -= worst.val.abs();
        let mid = 0.5 * (worst.lo + worst.hi);
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let p = make_panel(worst.chart_idx, lo, hi, &mut eval);
            total_err += p.err;
            total_val += p.val;
            total_abs += p.val.abs();
            heap.push(p);
        }
        n_panels += 1;
    }
    let achieved = total_err + frozen_err;
    if achieved > tol && achieved > NOISE_REL * total_abs.max(1e-300) {
        return Err(Error::Accuracy {
            requested: tol,
            achieved,
        });
    }
    Ok(total_val)
}

/// Convenience wrapper without splits or substitutions.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_adaptive(f, a, b, tol, &[], None, None)
}
