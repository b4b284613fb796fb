//! Gaussian quadrature on `[0, 1]`.
//!
//! Densities of the form `r^γ (1 − r)^β` are integrated with a composite rule:
//! Gauss–Legendre panels on a dyadic partition that refines toward both
//! endpoints, and Gauss–Jacobi panels on the two innermost intervals that absorb
//! the endpoint singularities of the weight.

use std::collections::HashMap;
use std::ops::{Add, Mul};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::numeric::beta_fn;

/// Values that can be accumulated by a quadrature sum.
pub trait Accumulate: Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> {}

impl<T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>> Accumulate for T {}

/// Nodes and positive weights of a Gauss rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    fn sum<T: Accumulate>(&self, mut f: impl FnMut(f64) -> T) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::default(), |acc, (&x, &w)| acc + f(x) * w)
    }
}

fn legendre_on_unit_interval(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[i] = (1.0 - x) / 2.0;
        nodes[n - 1 - i] = (1.0 + x) / 2.0;
        weights[i] = w / 2.0;
        weights[n - 1 - i] = w / 2.0;
    }
    GaussRule { nodes, weights }
}

/// Golub–Welsch for the weight `x^left (1 − x)^right` on `[0, 1]`.
fn jacobi_on_unit_interval(n: usize, left: f64, right: f64) -> GaussRule {
    // Jacobi polynomials on [-1, 1] with weight (1 - y)^a (1 + y)^b.
    let (a, b) = (right, left);
    let ab = a + b;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        jacobi[(k, k)] =
            if k == 0 { (b - a) / (ab + 2.0) } else { (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0)) };
        if k >= 1 {
            let off2 = if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * kf + ab;
                4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = off2.sqrt();
            jacobi[(k, k - 1)] = off;
            jacobi[(k - 1, k)] = off;
        }
    }
    let eig = jacobi.symmetric_eigen();
    // Total mass of x^left (1-x)^right on [0, 1].
    let mass = beta_fn(left + 1.0, right + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + eig.eigenvalues[i]) / 2.0, mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    GaussRule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

type RuleCache = Mutex<HashMap<(usize, u64, u64), Arc<GaussRule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre rule with `n` nodes on `[0, 1]` (cached).
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss–Jacobi rule with `n` nodes for `x^left (1 − x)^right` on `[0, 1]`
/// (cached). Both exponents must exceed −1.
pub fn gauss_jacobi(n: usize, left: f64, right: f64) -> Arc<GaussRule> {
    assert!(n >= 1, "quadrature needs at least one node");
    assert!(left > -1.0 && right > -1.0, "Jacobi exponents must exceed -1");
    let key = (n, left.to_bits(), right.to_bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return Arc::clone(rule);
    }
    let rule = if left == 0.0 && right == 0.0 {
        legendre_on_unit_interval(n)
    } else {
        jacobi_on_unit_interval(n, left, right)
    };
    let rule = Arc::new(rule);
    cache().lock().unwrap().insert(key, Arc::clone(&rule));
    rule
}

/// Composite quadrature policy shared by every density integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    /// Gauss nodes per panel.
    pub nodes: usize,
    /// Number of dyadic refinement levels toward each endpoint.
    pub levels: u32,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self { nodes: 256, levels: 24 }
    }
}

impl QuadratureRule {
    pub fn new(nodes: usize, levels: u32) -> Self {
        Self { nodes, levels }
    }

    /// Breakpoints `0 < 2^-L < … < 1/2 < … < 1 − 2^-L < 1`.
    pub fn dyadic_breaks(&self) -> Vec<f64> {
        let mut breaks = vec![0.0];
        for k in (1..=self.levels).rev() {
            breaks.push(0.5f64.powi(k as i32));
        }
        for k in 2..=self.levels {
            breaks.push(1.0 - 0.5f64.powi(k as i32));
        }
        breaks.push(1.0);
        breaks.dedup();
        breaks
    }

    /// Gauss–Legendre on every interval `[breaks[i], breaks[i + 1]]`.
    pub fn integrate_panels<T: Accumulate>(&self, breaks: &[f64], f: impl Fn(f64) -> T) -> T {
        let gl = gauss_legendre(self.nodes);
        breaks.windows(2).fold(T::default(), |acc, w| {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                return acc;
            }
            let len = b - a;
            acc + gl.sum(|u| f(a + len * u)) * len
        })
    }

    /// `∫₀¹ r^γ (1 − r)^β f(r) dr` for `γ, β > −1` and `f` bounded.
    pub fn integrate_jacobi<T: Accumulate>(&self, gamma: f64, beta: f64, f: impl Fn(f64) -> T) -> T {
        if self.levels == 0 {
            return gauss_jacobi(self.nodes, gamma, beta).sum(&f);
        }
        let eps = 0.5f64.powi(self.levels as i32);
        let left_rule = gauss_jacobi(self.nodes, gamma, 0.0);
        let right_rule = gauss_jacobi(self.nodes, beta, 0.0);

        let left = left_rule.sum(|u| {
            let r = eps * u;
            f(r) * (1.0 - r).powf(beta)
        }) * eps.powf(gamma + 1.0);
        let right = right_rule.sum(|v| {
            let r = 1.0 - eps * v;
            f(r) * r.powf(gamma)
        }) * eps.powf(beta + 1.0);

        let breaks = self.dyadic_breaks();
        let inner = &breaks[1..breaks.len() - 1];
        let middle = self.integrate_panels(inner, |r| f(r) * (r.powf(gamma) * (1.0 - r).powf(beta)));
        left + middle + right
    }
}
