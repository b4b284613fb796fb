//! Feasibility solver for a log-convex `h` whose Laplace moments reproduce
//! the reciprocal kernel coefficients: `f(n + 1) · ∫₀^∞ e^{−nt} h(t) dt = 1`
//! for `n < N`, together with `sup_{t ≥ T} e^t h(t) < ∞`.
//!
//! The unknowns are the values `g_i = log h(t_i)` of a piecewise-linear
//! profile. Each iteration takes a damped Gauss–Newton step on the moment
//! residuals and projects back onto convex profiles with terminal slope at
//! most −1, so every iterate can be certified.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bernstein::BernsteinFunction;
use crate::error::{Error, Result};
use crate::measure::{MeasureOnUnitInterval, PrwVerdict};
use crate::weight_lab::{growth_check, log_convexity_check, ConvexityReport, GrowthReport, HProfile};

const STALL: f64 = 1e-14;
const MAX_DAMPING: f64 = 1e12;

/// Result of the divergence precheck.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Precheck {
    pub pass: bool,
    pub prw: PrwVerdict,
    pub warning: Option<String>,
}

/// The kernel can only be a Bergman kernel when `∫ dν/(1 − r)` diverges.
pub fn precheck(nu: &MeasureOnUnitInterval) -> Result<Precheck> {
    let prw = nu.prw_classify()?;
    let warning =
        (prw == PrwVerdict::Unknown).then(|| "divergence undecided for the tabulated density; proceeding".to_string());
    Ok(Precheck { pass: prw != PrwVerdict::Converges, prw, warning })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FitProblem {
    pub measure: MeasureOnUnitInterval,
    /// Number of moment conditions `n = 0..N`.
    pub moments: usize,
    pub grid: Vec<f64>,
    pub feasibility_tol: f64,
    pub max_iterations: usize,
    pub convexity_tol: f64,
}

impl FitProblem {
    pub fn new(measure: MeasureOnUnitInterval) -> Self {
        Self {
            measure,
            moments: 24,
            grid: Self::default_grid(48, 12.0),
            feasibility_tol: 1e-8,
            max_iterations: 500,
            convexity_tol: 1e-10,
        }
    }

    /// `points` nodes on `[0, end]` starting at 0 with increments growing by
    /// a factor 1.08, so resolution concentrates near `t = 0`.
    pub fn default_grid(points: usize, end: f64) -> Vec<f64> {
        let ratio: f64 = 1.08;
        let steps = points.saturating_sub(1) as i32;
        let first = end * (ratio - 1.0) / (ratio.powi(steps) - 1.0);
        let mut grid = Vec::with_capacity(points);
        let mut t = 0.0;
        grid.push(t);
        for k in 0..steps {
            t += first * ratio.powi(k);
            grid.push(t);
        }
        if let Some(last) = grid.last_mut() {
            *last = end;
        }
        grid
    }

    pub fn validate(&self) -> Result<()> {
        if self.moments < 2 {
            return Err(Error::InsufficientMoments { needed: 2, available: self.moments });
        }
        HProfile::new(self.grid.clone(), vec![0.0; self.grid.len()])?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitVerdict {
    Feasible,
    InfeasibleAtN,
    PrecheckRejected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub profile: Option<HProfile>,
    /// `|f(n + 1) · L_n(h) − 1|` for `n < N`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub convexity: Option<ConvexityReport>,
    pub growth: Option<GrowthReport>,
    pub verdict: FitVerdict,
    pub iterations: usize,
    pub warning: Option<String>,
}

/// Target data shared by the solver and the certifier.
struct Moments {
    coefficients: Vec<f64>,
}

impl Moments {
    fn new(nu: &MeasureOnUnitInterval, count: usize) -> Self {
        let f = BernsteinFunction::with_prefix(nu.clone(), count);
        Self { coefficients: f.kernel_coefficients(count - 1).values().to_vec() }
    }

    /// Signed residuals `f(n + 1) L_n − 1`, infinite where `L_n` diverges.
    fn residuals(&self, hp: &HProfile) -> Vec<f64> {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| match hp.laplace_transform(n as f64) {
                Ok(l) => c * l - 1.0,
                Err(_) => f64::INFINITY,
            })
            .collect()
    }

    fn jacobian(&self, hp: &HProfile) -> Result<DMatrix<f64>> {
        let mut jac = DMatrix::zeros(self.coefficients.len(), hp.len());
        for (n, c) in self.coefficients.iter().enumerate() {
            let (_, grad) = hp.laplace_with_gradient(n as f64)?;
            for (i, d) in grad.iter().enumerate() {
                jac[(n, i)] = c * d;
            }
        }
        Ok(jac)
    }
}

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Weighted pool-adjacent-violators: the nondecreasing sequence closest to
/// `values` in the `weights`-weighted least-squares sense.
fn isotonic(values: &[f64], weights: &[f64]) -> Vec<f64> {
    // blocks of (mean, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let (m2, w2, n2) = blocks[blocks.len() - 1];
            let (m1, w1, n1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.pop();
            let w = w1 + w2;
            *blocks.last_mut().unwrap() = ((m1 * w1 + m2 * w2) / w, w, n1 + n2);
        }
    }
    blocks.iter().flat_map(|&(m, _, n)| std::iter::repeat_n(m, n)).collect()
}

/// Convex with every slope at most −1, keeping `g_0`.
fn project(t: &[f64], g: &[f64]) -> Vec<f64> {
    let widths: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let slopes: Vec<f64> = (0..widths.len()).map(|i| (g[i + 1] - g[i]) / widths[i]).collect();
    let slopes = isotonic(&slopes, &widths);
    let mut out = Vec::with_capacity(g.len());
    out.push(g[0]);
    for (s, w) in slopes.iter().zip(&widths) {
        let prev = *out.last().unwrap();
        out.push(prev + s.min(-1.0) * w);
    }
    out
}

/// Affine `log α − βt` matching the first two targets with a single
/// exponential `α e^{−βt}`.
fn initial_profile(grid: &[f64], m0: f64, m1: f64) -> Vec<f64> {
    let beta = if m0 > m1 { m1 / (m0 - m1) } else { 1.0 };
    let alpha = beta * m0;
    grid.iter().map(|t| alpha.ln() - beta * t).collect()
}

fn damped_step(jac: &DMatrix<f64>, r: &[f64], damping: f64) -> Option<DVector<f64>> {
    let r = DVector::from_column_slice(r);
    let mut normal = jac * jac.transpose();
    for i in 0..normal.nrows() {
        normal[(i, i)] += damping;
    }
    let y = normal.cholesky()?.solve(&r);
    Some(-(jac.transpose() * y))
}

pub fn fit_h(problem: &FitProblem) -> Result<FitResult> {
    problem.validate()?;
    let check = precheck(&problem.measure)?;
    if !check.pass {
        return Ok(FitResult {
            profile: None,
            residuals: Vec::new(),
            max_residual: f64::INFINITY,
            convexity: None,
            growth: None,
            verdict: FitVerdict::PrecheckRejected,
            iterations: 0,
            warning: check.warning,
        });
    }
    let targets = Moments::new(&problem.measure, problem.moments);
    let grid = &problem.grid;
    let c = &targets.coefficients;

    let mut g = project(grid, &initial_profile(grid, 1.0 / c[0], 1.0 / c[1]));
    let mut hp = HProfile::new(grid.clone(), g.clone())?;
    let mut r = targets.residuals(&hp);
    let mut cost = norm(&r);
    let mut damping = 1e-3;
    let mut iterations = 0;

    while iterations < problem.max_iterations && cost > 0.0 && damping <= MAX_DAMPING {
        iterations += 1;
        let jac = targets.jacobian(&hp)?;
        let Some(step) = damped_step(&jac, &r, damping) else {
            damping *= 10.0;
            continue;
        };
        let trial: Vec<f64> = g.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        let trial = project(grid, &trial);
        let trial_hp = match HProfile::new(grid.clone(), trial.clone()) {
            Ok(p) => p,
            Err(_) => {
                damping *= 10.0;
                continue;
            }
        };
        let trial_r = targets.residuals(&trial_hp);
        let trial_cost = norm(&trial_r);
        if trial_cost.is_finite() && trial_cost < cost {
            let improvement = cost - trial_cost;
            g = trial;
            hp = trial_hp;
            r = trial_r;
            cost = trial_cost;
            damping = (damping * 0.3).max(1e-15);
            if improvement < STALL {
                break;
            }
        } else {
            damping *= 10.0;
        }
    }

    let residuals: Vec<f64> = r.iter().map(|x| x.abs()).collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let convexity = log_convexity_check(&hp, problem.convexity_tol);
    let growth = growth_check(&hp, growth_threshold(&hp));
    let feasible = max_residual <= problem.feasibility_tol && convexity.pass && growth.bounded;
    Ok(FitResult {
        profile: Some(hp),
        residuals,
        max_residual,
        convexity: Some(convexity),
        growth: Some(growth),
        verdict: if feasible { FitVerdict::Feasible } else { FitVerdict::InfeasibleAtN },
        iterations,
        warning: check.warning,
    })
}

fn growth_threshold(hp: &HProfile) -> f64 {
    hp.t()[0].max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateVerdict {
    Certified,
    NotCertified,
}

/// Independent re-evaluation of every condition for a given profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub convexity: ConvexityReport,
    pub growth: GrowthReport,
    /// `ν([0, 1]) · ∫₀^∞ h`, which must equal 1.
    pub mass_identity: f64,
    pub verdict: CertificateVerdict,
    pub failures: Vec<String>,
}

pub fn certify(nu: &MeasureOnUnitInterval, hp: &HProfile, n: usize, tol: f64) -> Result<Certificate> {
    if n == 0 {
        return Err(Error::InsufficientMoments { needed: 1, available: 0 });
    }
    let targets = Moments::new(nu, n);
    let residuals: Vec<f64> = targets.residuals(hp).iter().map(|x| x.abs()).collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let convexity = log_convexity_check(hp, tol);
    let growth = growth_check(hp, growth_threshold(hp));
    let mass_identity = match hp.laplace_transform(0.0) {
        Ok(l) => nu.total_mass() * l,
        Err(_) => f64::INFINITY,
    };

    let mut failures = Vec::new();
    if !(max_residual <= tol) {
        let worst = residuals.iter().position(|&x| x == max_residual).unwrap_or(0);
        failures.push(format!("moment residual {max_residual:e} at n = {worst} exceeds {tol:e}"));
    }
    if !convexity.pass {
        failures.push(format!("log h is not convex: margin {:e} at grid index {}", convexity.margin, convexity.at));
    }
    if !growth.bounded {
        failures.push("e^t h(t) is unbounded: terminal slope exceeds -1".to_string());
    }
    if !((mass_identity - 1.0).abs() <= tol) {
        failures.push(format!("mass identity {mass_identity} differs from 1"));
    }
    let verdict = if failures.is_empty() { CertificateVerdict::Certified } else { CertificateVerdict::NotCertified };
    Ok(Certificate { residuals, max_residual, convexity, growth, mass_identity, verdict, failures })
}
