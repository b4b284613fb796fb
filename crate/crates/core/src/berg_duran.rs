//! Moment machinery: reciprocal partial sums, complete monotonicity, the
//! induced weight moments and discrete reconstruction from moments.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bernstein::BernsteinFunction;
use crate::error::{Error, Result};
use crate::measure::{MeasureOnUnitInterval, PrwVerdict};
use crate::numeric::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    NuMoments,
    MuMoments,
    OmegaMoments,
    KernelCoefficients,
    Custom,
}

/// A finite moment-like sequence `m_0..=m_N` with a tag recording its origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    values: Vec<f64>,
    provenance: Provenance,
}

impl MomentSequence {
    pub fn new(values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientMoments { needed: 1, available: 0 });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("moment {i} is not finite")));
        }
        Ok(Self { values, provenance })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `b_n = 1/(a_0 + ⋯ + a_n)` with running compensated summation.
///
/// Applied to the moments of `ν` this yields `μ_n = 1/f(n + 1)`, a Hausdorff
/// moment sequence whenever `a` is one.
pub fn reciprocal_partial_sums(a: &MomentSequence) -> Result<MomentSequence> {
    let mut acc = CompensatedSum::new();
    let mut values = Vec::with_capacity(a.len());
    for (index, &x) in a.values().iter().enumerate() {
        acc.add(x);
        let value = acc.value();
        if !(value > 0.0) {
            return Err(Error::NotPositiveSequence { index, value });
        }
        values.push(1.0 / value);
    }
    let provenance = match a.provenance() {
        Provenance::NuMoments | Provenance::KernelCoefficients => Provenance::MuMoments,
        _ => Provenance::Custom,
    };
    MomentSequence::new(values, provenance)
}

/// Smallest signed difference `(−1)^k Δ^k b_n` over `0 ≤ k ≤ K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub min: f64,
    /// `(k, n)` where the minimum is attained.
    pub argmin: (usize, usize),
    pub pass: bool,
}

/// Finite-order complete monotonicity test: passes iff every signed forward
/// difference up to order `K` is at least `−tol`.
pub fn complete_monotonicity_report(b: &MomentSequence, k_max: usize, tol: f64) -> Result<MonotonicityReport> {
    if k_max == 0 || b.len() < k_max + 1 {
        return Err(Error::InsufficientMoments { needed: k_max.max(1) + 1, available: b.len() });
    }
    let mut diff = b.values().to_vec();
    let mut report = MonotonicityReport { min: f64::INFINITY, argmin: (0, 0), pass: true };
    for k in 0..=k_max {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (n, &d) in diff.iter().enumerate() {
            let signed = sign * d;
            if signed < report.min {
                report.min = signed;
                report.argmin = (k, n);
            }
        }
        diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
    }
    report.pass = report.min >= -tol;
    Ok(report)
}

/// Weight moments together with a caveat when the divergence condition
/// could not be decided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InducedMoments {
    pub moments: MomentSequence,
    pub warning: Option<String>,
}

/// `ω_n = 1/(2 f((n + 1)/2))` for `n ≤ N`: the moments of the radial weight
/// whose Bergman kernel is `S_ν`.
pub fn omega_moments_from_nu(nu: &MeasureOnUnitInterval, n_max: usize) -> Result<InducedMoments> {
    let warning = match nu.prw_classify()? {
        PrwVerdict::Diverges => None,
        PrwVerdict::Converges => return Err(Error::NotBergmanKernel),
        PrwVerdict::Unknown => Some(
            "divergence of ∫ dν/(1 − r) is undecided for this tabulated density; \
             the moments are computed but may not come from a weight"
                .to_string(),
        ),
    };
    let f = BernsteinFunction::with_prefix(nu.clone(), 0);
    let values =
        (0..=n_max).map(|n| f.eval((n as f64 + 1.0) / 2.0).map(|v| 1.0 / (2.0 * v))).collect::<Result<Vec<_>>>()?;
    let moments = MomentSequence::new(values, Provenance::OmegaMoments)?;
    Ok(InducedMoments { moments, warning })
}

/// Atoms on a fixed grid reproducing a truncated moment sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasureFit {
    pub locations: Vec<f64>,
    pub masses: Vec<f64>,
    /// `‖A m − target‖₂` without the regularization term.
    pub residual: f64,
}

impl DiscreteMeasureFit {
    /// Mass of `[0, r]`.
    pub fn cumulative(&self, r: f64) -> f64 {
        self.locations.iter().zip(&self.masses).filter(|(x, _)| **x <= r).map(|(_, m)| m).sum()
    }

    pub fn to_measure(&self) -> Result<MeasureOnUnitInterval> {
        let atoms: Vec<(f64, f64)> =
            self.locations.iter().zip(&self.masses).filter(|(_, m)| **m > 0.0).map(|(x, m)| (*x, *m)).collect();
        MeasureOnUnitInterval::atoms(&atoms)
    }
}

/// Nonnegative masses on `support_grid` whose moments `0..len` match
/// `target` in least squares.
///
/// `ridge` adds `ridge²‖m‖²` to the objective. A small positive value selects
/// the spread-out solution among the many near-exact fits instead of one
/// concentrated on a few nodes; zero gives plain NNLS.
pub fn fit_discrete_measure(target: &MomentSequence, support_grid: &[f64], ridge: f64) -> Result<DiscreteMeasureFit> {
    if support_grid.is_empty() {
        return Err(Error::Domain("support grid is empty".into()));
    }
    if let Some(x) = support_grid.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Domain(format!("support point {x} lies outside [0, 1]")));
    }
    if !(ridge.is_finite() && ridge >= 0.0) {
        return Err(Error::Domain(format!("ridge weight {ridge} must be nonnegative")));
    }
    let rows = target.len();
    let cols = support_grid.len();
    let moment_matrix = DMatrix::from_fn(rows, cols, |n, j| support_grid[j].powi(n as i32));
    let rhs = DVector::from_column_slice(target.values());

    let masses = nnls(&moment_matrix, &rhs, ridge);
    let residual = (&moment_matrix * &masses - &rhs).norm();
    Ok(DiscreteMeasureFit { locations: support_grid.to_vec(), masses: masses.iter().copied().collect(), residual })
}

/// `argmin ‖A_P x − b‖² + ridge²‖x‖²` over the columns in `passive`, via
/// the SVD filter factors `σ/(σ² + ridge²)`.
fn restricted_ridge(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[usize], ridge: f64) -> DVector<f64> {
    let svd = a.select_columns(passive).svd(true, true);
    let (u, v_t) = (svd.u.expect("left vectors"), svd.v_t.expect("right vectors"));
    let cutoff = f64::EPSILON * svd.singular_values.max() * a.nrows().max(passive.len()) as f64;
    let mut coef = u.transpose() * b;
    for (c, &s) in coef.iter_mut().zip(svd.singular_values.iter()) {
        *c = if ridge > 0.0 {
            *c * s / (s * s + ridge * ridge)
        } else if s > cutoff {
            *c / s
        } else {
            0.0
        };
    }
    v_t.transpose() * coef
}

/// Lawson–Hanson active-set NNLS for `min ‖Ax − b‖² + ridge²‖x‖²`, `x ≥ 0`.
///
/// When the unconstrained ridge solution is already nonnegative it is the
/// answer and the active-set iteration is skipped: the ridge term is far below
/// roundoff in the residual, so the iteration alone cannot resolve it.
fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, ridge: f64) -> DVector<f64> {
    let n = a.ncols();
    let all: Vec<usize> = (0..n).collect();
    if ridge > 0.0 {
        let x = restricted_ridge(a, b, &all, ridge);
        if x.iter().all(|&v| v >= 0.0) {
            return x;
        }
    }

    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let column_scale = a.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let dual_tol = 64.0 * f64::EPSILON * column_scale * b.norm();
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x) - &x * (ridge * ridge);
        let candidate = (0..n).filter(|&j| !passive[j]).max_by(|&i, &j| w[i].total_cmp(&w[j]).then(j.cmp(&i)));
        let Some(j) = candidate.filter(|&j| w[j] > dual_tol) else { break };
        passive[j] = true;

        for _ in 0..=n {
            let indices: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let s_p = restricted_ridge(a, b, &indices, ridge);
            if s_p.iter().all(|&s| s > 0.0) {
                x.fill(0.0);
                for (k, &i) in indices.iter().enumerate() {
                    x[i] = s_p[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &i) in indices.iter().enumerate() {
                if s_p[k] <= 0.0 {
                    alpha = alpha.min(x[i] / (x[i] - s_p[k]));
                }
            }
            for (k, &i) in indices.iter().enumerate() {
                x[i] += alpha * (s_p[k] - x[i]);
                if x[i] <= 0.0 {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if indices.iter().all(|&i| !passive[i]) {
                break;
            }
        }
    }
    x
}
