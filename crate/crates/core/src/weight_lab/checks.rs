use serde::{Deserialize, Serialize};

use super::profile::HProfile;
use super::weight::RadialWeightProfile;
use crate::berg_duran::MomentSequence;
use crate::error::{Error, Result};

/// Slack on the growth slope test: sampled `g = −t` has slopes `−1 ± ulp`.
const GROWTH_SLOPE_SLACK: f64 = 1e-12;

/// `h(t) = e^{−t} ω(e^{−t/2})` sampled on `grid` (all `t > 0`).
pub fn weight_to_h(w: &RadialWeightProfile, grid: &[f64]) -> Result<HProfile> {
    let log_h = grid.iter().map(|&t| w.log_value_at(t).map(|g| g - t)).collect::<Result<Vec<_>>>()?;
    HProfile::new(grid.to_vec(), log_h)
}

/// `ω(r) = h(−2 log r) / r²`.
pub fn h_to_weight(hp: &HProfile, r: f64) -> Result<f64> {
    RadialWeightProfile::FromH(hp.clone()).value(r)
}

/// Smallest increase between successive divided differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub margin: f64,
    /// Interior grid index where the margin is attained.
    pub at: usize,
    pub pass: bool,
}

fn convexity_margin(t: &[f64], y: &[f64], tol: f64) -> ConvexityReport {
    let slopes: Vec<f64> = (0..t.len() - 1).map(|i| (y[i + 1] - y[i]) / (t[i + 1] - t[i])).collect();
    let mut report = ConvexityReport { margin: f64::INFINITY, at: 1, pass: true };
    for (i, w) in slopes.windows(2).enumerate() {
        let d = w[1] - w[0];
        if d < report.margin || d.is_nan() {
            report.margin = d;
            report.at = i + 1;
        }
    }
    report.pass = report.margin >= -tol;
    report
}

/// Discrete convexity of `g = log h`.
pub fn log_convexity_check(hp: &HProfile, tol: f64) -> ConvexityReport {
    convexity_margin(hp.t(), hp.log_h(), tol)
}

/// Radial log-subharmonicity: convexity of `t ↦ log ω(e^{−t/2})` on `grid`.
pub fn log_subharmonic_check(w: &RadialWeightProfile, grid: &[f64], tol: f64) -> Result<ConvexityReport> {
    if grid.len() < 3 {
        return Err(Error::Domain("convexity needs at least three grid points".into()));
    }
    if grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    let y = grid.iter().map(|&t| w.log_value_at(t)).collect::<Result<Vec<_>>>()?;
    Ok(convexity_margin(grid, &y, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub threshold: f64,
    /// `sup_{t ≥ T} e^t h(t)`, absent when unbounded.
    pub sup: Option<f64>,
    pub bounded: bool,
}

/// Whether `e^t h(t)` stays bounded for `t ≥ T`. With an affine tail this is
/// a slope test, and the supremum is attained at `T` or at a grid point.
pub fn growth_check(hp: &HProfile, threshold: f64) -> GrowthReport {
    let bounded = hp.terminal_slope() <= -1.0 + GROWTH_SLOPE_SLACK;
    let sup = bounded.then(|| {
        let at = |t: f64| (t + hp.log_value(t)).exp();
        hp.t().iter().filter(|&&t| t >= threshold).fold(at(threshold), |m, &t| m.max(at(t)))
    });
    GrowthReport { threshold, sup, bounded }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DhatForm {
    MomentRatio,
    Tail,
}

/// Best doubling constant found for a weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhatReport {
    pub constant: f64,
    pub form: DhatForm,
    /// Moment index `n` of the worst ratio `ω_n / ω_{2n}`.
    pub argmax_index: Option<usize>,
    /// Radius of the worst ratio `ω̂(r) / ω̂((1 + r)/2)`.
    pub argmax_radius: Option<f64>,
    pub ceiling: f64,
    pub pass: bool,
}

/// `C = max_{1 ≤ n ≤ N} ω_n / ω_{2n}` with `N = (len − 1)/2`.
pub fn dhat_moment_check(omega_moments: &MomentSequence, ceiling: f64) -> Result<DhatReport> {
    let v = omega_moments.values();
    if v.len() < 3 {
        return Err(Error::InsufficientMoments { needed: 3, available: v.len() });
    }
    if let Some(index) = v.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::NotPositiveSequence { index, value: v[index] });
    }
    let n_check = (v.len() - 1) / 2;
    let (mut constant, mut arg) = (f64::NEG_INFINITY, 1);
    for n in 1..=n_check {
        let ratio = v[n] / v[2 * n];
        if ratio > constant {
            constant = ratio;
            arg = n;
        }
    }
    Ok(DhatReport {
        constant,
        form: DhatForm::MomentRatio,
        argmax_index: Some(arg),
        argmax_radius: None,
        ceiling,
        pass: constant <= ceiling,
    })
}

/// `C = max_r ω̂(r) / ω̂((1 + r)/2)` over `r_grid ⊂ [0, 1)`.
pub fn dhat_tail_check(w: &RadialWeightProfile, r_grid: &[f64], ceiling: f64) -> Result<DhatReport> {
    if r_grid.is_empty() {
        return Err(Error::Domain("radius grid is empty".into()));
    }
    let (mut constant, mut arg) = (f64::NEG_INFINITY, r_grid[0]);
    for &r in r_grid {
        let (near, far) = (w.tail(r)?, w.tail((1.0 + r) / 2.0)?);
        if !(far > 0.0) {
            return Err(Error::NotRkhsAdmissible(format!("tail vanishes beyond r = {}", (1.0 + r) / 2.0)));
        }
        let ratio = near / far;
        if ratio > constant {
            constant = ratio;
            arg = r;
        }
    }
    Ok(DhatReport {
        constant,
        form: DhatForm::Tail,
        argmax_index: None,
        argmax_radius: Some(arg),
        ceiling,
        pass: constant <= ceiling,
    })
}

/// `ω([r, 1)) > 0` for every `r < 1`.
pub fn rkhs_check(w: &RadialWeightProfile) -> bool {
    match w {
        RadialWeightProfile::Tabulated { values, .. } => values.last().is_some_and(|&v| v > 0.0),
        _ => true,
    }
}

/// `ω_n` via the weight, `½ L_{(n−1)/2}(h)` via its h-profile.
pub fn laplace_moment(hp: &HProfile, n: u32) -> Result<super::LaplaceMoment> {
    hp.laplace_moment(n)
}

/// `∫₀¹ r^n ω(r) dr`.
pub fn weight_moment(w: &RadialWeightProfile, n: u32) -> Result<f64> {
    w.moment(n)
}
