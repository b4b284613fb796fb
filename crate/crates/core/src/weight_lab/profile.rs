use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::exp_affine_segment;

/// Piecewise-linear `g = log h` on a grid `0 ≤ t_0 < … < t_M`, continued
/// affinely by the first segment on `[0, t_0)` and by the last for `t > t_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct HProfile {
    t: Vec<f64>,
    log_h: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    t: Vec<f64>,
    log_h: Vec<f64>,
}

impl TryFrom<RawProfile> for HProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        Self::new(raw.t, raw.log_h)
    }
}

/// A Laplace moment and the part of it contributed by the affine tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceMoment {
    pub value: f64,
    pub tail: f64,
}

impl HProfile {
    pub fn new(t: Vec<f64>, log_h: Vec<f64>) -> Result<Self> {
        if t.len() != log_h.len() {
            return Err(Error::InvalidProfile(format!("{} grid points but {} values", t.len(), log_h.len())));
        }
        if t.len() < 3 {
            return Err(Error::InvalidProfile("at least three grid points are required".into()));
        }
        if !(t[0].is_finite() && t[0] >= 0.0) {
            return Err(Error::InvalidProfile(format!("first grid point {} must be nonnegative", t[0])));
        }
        if let Some(i) = t.windows(2).position(|w| !(w[1] > w[0] && w[1].is_finite())) {
            return Err(Error::InvalidProfile(format!("grid is not strictly increasing at index {}", i + 1)));
        }
        if let Some(i) = log_h.iter().position(|g| !g.is_finite()) {
            return Err(Error::InvalidProfile(format!("log h is not finite at index {i}")));
        }
        Ok(Self { t, log_h })
    }

    /// Samples `g` on `grid`.
    pub fn from_fn(grid: &[f64], g: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid.to_vec(), grid.iter().map(|&t| g(t)).collect())
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn log_h(&self) -> &[f64] {
        &self.log_h
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Slope of segment `i`, between `t_i` and `t_{i+1}`.
    pub fn slope(&self, i: usize) -> f64 {
        (self.log_h[i + 1] - self.log_h[i]) / (self.t[i + 1] - self.t[i])
    }

    pub fn slopes(&self) -> Vec<f64> {
        (0..self.len() - 1).map(|i| self.slope(i)).collect()
    }

    pub fn terminal_slope(&self) -> f64 {
        self.slope(self.len() - 2)
    }

    /// `g(t)` with affine continuation outside the grid.
    pub fn log_value(&self, t: f64) -> f64 {
        let last = self.len() - 1;
        let k = self.t.partition_point(|&x| x <= t);
        if k > 0 && self.t[k - 1] == t {
            return self.log_h[k - 1];
        }
        let i = k.saturating_sub(1).min(last - 1);
        self.log_h[i] + self.slope(i) * (t - self.t[i])
    }

    pub fn value(&self, t: f64) -> f64 {
        self.log_value(t).exp()
    }

    /// `∫₀^upper e^{g(t) + a t} dt` in closed form, `upper` possibly infinite.
    pub fn exp_integral(&self, a: f64, upper: f64) -> Result<f64> {
        if !(upper >= 0.0) {
            return Err(Error::Domain(format!("upper limit {upper} must be nonnegative")));
        }
        let y = |t: f64| self.log_value(t) + a * t;
        let mut total = 0.0;
        let mut lo = 0.0;
        for &knot in &self.t {
            let hi = knot.min(upper);
            if hi > lo {
                total += exp_affine_segment(y(lo), y(hi), hi - lo).0;
            }
            lo = lo.max(hi);
        }
        if upper > lo {
            let rate = self.terminal_slope() + a;
            if upper.is_infinite() {
                if rate >= 0.0 {
                    return Err(Error::IntegralDiverges { slope: self.terminal_slope(), rate: -a });
                }
                total += y(lo).exp() / -rate;
            } else {
                total += exp_affine_segment(y(lo), y(upper), upper - lo).0;
            }
        }
        Ok(total)
    }

    /// `L_λ(h) = ∫₀^∞ e^{−λt} h(t) dt` for real `λ`.
    pub fn laplace_transform(&self, lambda: f64) -> Result<f64> {
        self.exp_integral(-lambda, f64::INFINITY)
    }

    /// `∫₀^∞ e^{−nt} h(t) dt`, exact for piecewise-linear `g`.
    pub fn laplace_moment(&self, n: u32) -> Result<LaplaceMoment> {
        let lambda = f64::from(n);
        let value = self.laplace_transform(lambda)?;
        let m = self.len() - 1;
        let tail = (self.log_h[m] - lambda * self.t[m]).exp() / (lambda - self.terminal_slope());
        Ok(LaplaceMoment { value, tail })
    }

    /// `L_λ(h)` and its gradient with respect to the grid values `g_i`.
    pub fn laplace_with_gradient(&self, lambda: f64) -> Result<(f64, Vec<f64>)> {
        let m = self.len() - 1;
        let slope = self.terminal_slope();
        let k = slope - lambda;
        if k >= 0.0 {
            return Err(Error::IntegralDiverges { slope, rate: lambda });
        }
        let mut grad = vec![0.0; m + 1];
        let mut value = 0.0;
        let y = |i: usize| self.log_h[i] - lambda * self.t[i];

        let t0 = self.t[0];
        if t0 > 0.0 {
            // head on [0, t_0] along the first segment
            let width = self.t[1] - t0;
            let y_start = self.log_h[0] - self.slope(0) * t0;
            let (i, d_start, d_end) = exp_affine_segment(y_start, y(0), t0);
            value += i;
            grad[0] += d_start * (1.0 + t0 / width) + d_end;
            grad[1] -= d_start * t0 / width;
        }
        for i in 0..m {
            let (v, da, db) = exp_affine_segment(y(i), y(i + 1), self.t[i + 1] - self.t[i]);
            value += v;
            grad[i] += da;
            grad[i + 1] += db;
        }
        let width = self.t[m] - self.t[m - 1];
        let tail = y(m).exp() / -k;
        value += tail;
        grad[m] += tail + tail / (-k * width);
        grad[m - 1] -= tail / (-k * width);
        Ok((value, grad))
    }
}
