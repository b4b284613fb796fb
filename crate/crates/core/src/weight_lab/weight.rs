use serde::{Deserialize, Serialize};

use super::profile::HProfile;
use crate::berg_duran::{MomentSequence, Provenance};
use crate::error::{Error, Result};
use crate::numeric::exp_affine_segment;
use crate::quadrature::gauss_legendre;

/// A radial weight `ω(r)` on `(0, 1)`.
///
/// JSON form: `{"kind": "power", "c": 1.0, "p": 1.0}`, `{"kind": "constant",
/// "c": 1.0}`, `{"kind": "tabulated", "r": [...], "values": [...]}` or
/// `{"kind": "from-h", "t": [...], "log_h": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeight", into = "RawWeight")]
pub enum RadialWeightProfile {
    Constant {
        c: f64,
    },
    /// `c · r^{2p}`
    Power {
        c: f64,
        p: f64,
    },
    /// `ω(r) = h(−2 log r) / r²`
    FromH(HProfile),
    /// Interpolates `log ω` between positive samples, `ω` itself when a
    /// sample vanishes; constant beyond the first and last radius.
    Tabulated {
        r: Vec<f64>,
        values: Vec<f64>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RawWeight {
    Constant { c: f64 },
    Power { c: f64, p: f64 },
    FromH { t: Vec<f64>, log_h: Vec<f64> },
    Tabulated { r: Vec<f64>, values: Vec<f64> },
}

impl TryFrom<RawWeight> for RadialWeightProfile {
    type Error = Error;

    fn try_from(raw: RawWeight) -> Result<Self> {
        match raw {
            RawWeight::Constant { c } => Self::constant(c),
            RawWeight::Power { c, p } => Self::power(c, p),
            RawWeight::FromH { t, log_h } => Ok(Self::FromH(HProfile::new(t, log_h)?)),
            RawWeight::Tabulated { r, values } => Self::tabulated(r, values),
        }
    }
}

impl From<RadialWeightProfile> for RawWeight {
    fn from(w: RadialWeightProfile) -> Self {
        match w {
            RadialWeightProfile::Constant { c } => Self::Constant { c },
            RadialWeightProfile::Power { c, p } => Self::Power { c, p },
            RadialWeightProfile::FromH(hp) => Self::FromH { t: hp.t().to_vec(), log_h: hp.log_h().to_vec() },
            RadialWeightProfile::Tabulated { r, values } => Self::Tabulated { r, values },
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeight(format!("{name} = {x} must be positive")))
    }
}

impl RadialWeightProfile {
    pub fn constant(c: f64) -> Result<Self> {
        positive("c", c)?;
        Ok(Self::Constant { c })
    }

    pub fn power(c: f64, p: f64) -> Result<Self> {
        positive("c", c)?;
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::InvalidWeight(format!("exponent p = {p} must be nonnegative")));
        }
        Ok(Self::Power { c, p })
    }

    pub fn from_h(hp: HProfile) -> Self {
        Self::FromH(hp)
    }

    /// Samples may vanish (a weight supported away from the boundary) but
    /// not all of them.
    pub fn tabulated(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if r.len() != values.len() || r.len() < 2 {
            return Err(Error::InvalidWeight("tabulated weight needs matching r and values, at least two".into()));
        }
        if r.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::InvalidWeight("tabulated radii must lie in (0, 1)".into()));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidWeight("tabulated radii must be strictly increasing".into()));
        }
        if values.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::InvalidWeight("tabulated values must be finite and nonnegative".into()));
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidWeight("tabulated weight vanishes identically".into()));
        }
        Ok(Self::Tabulated { r, values })
    }

    /// The weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        positive("factor", factor)?;
        Ok(match self {
            Self::Constant { c } => Self::Constant { c: c * factor },
            Self::Power { c, p } => Self::Power { c: c * factor, p: *p },
            Self::FromH(hp) => {
                let shift = factor.ln();
                Self::FromH(HProfile::new(hp.t().to_vec(), hp.log_h().iter().map(|g| g + shift).collect())?)
            }
            Self::Tabulated { r, values } => {
                Self::Tabulated { r: r.clone(), values: values.iter().map(|v| v * factor).collect() }
            }
        })
    }

    /// `ω(r)` for `0 < r < 1`.
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("radius {r} must lie in (0, 1)")));
        }
        Ok(match self {
            Self::Constant { c } => *c,
            Self::Power { c, p } => c * r.powf(2.0 * p),
            Self::FromH(hp) => {
                let t = -2.0 * r.ln();
                (hp.log_value(t) + t).exp()
            }
            Self::Tabulated { r: grid, values } => tabulated_value(grid, values, r),
        })
    }

    /// `log ω(e^{−t/2})` for `t > 0`, exact for the closed-form variants.
    pub fn log_value_at(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("t = {t} maps outside (0, 1)")));
        }
        let value = match self {
            Self::Constant { c } => c.ln(),
            Self::Power { c, p } => c.ln() - p * t,
            Self::FromH(hp) => hp.log_value(t) + t,
            Self::Tabulated { .. } => {
                let r = (-t / 2.0).exp();
                let v = self.value(r)?;
                if !(v > 0.0) {
                    return Err(Error::NonPositiveWeight { r, value: v });
                }
                v.ln()
            }
        };
        Ok(value)
    }

    /// `ω_n = ∫₀¹ r^n ω(r) dr`.
    pub fn moment(&self, n: u32) -> Result<f64> {
        let nf = f64::from(n);
        match self {
            Self::Constant { c } => Ok(c / (nf + 1.0)),
            Self::Power { c, p } => Ok(c / (nf + 2.0 * p + 1.0)),
            Self::FromH(hp) => {
                // ∫ r ω(r) dr = ½ L_0(h) must be finite first.
                if hp.terminal_slope() >= 0.0 {
                    return Err(Error::InfiniteWeightMass);
                }
                Ok(0.5 * hp.laplace_transform((nf - 1.0) / 2.0)?)
            }
            Self::Tabulated { r, values } => Ok(tabulated_moment(r, values, n)),
        }
    }

    /// `ω_0..=ω_N`.
    pub fn moments(&self, n_max: u32) -> Result<MomentSequence> {
        let values = (0..=n_max).map(|n| self.moment(n)).collect::<Result<Vec<_>>>()?;
        MomentSequence::new(values, Provenance::OmegaMoments)
    }

    /// `ω̂(r) = ∫_r^1 ω(s) ds` for `0 ≤ r < 1`.
    pub fn tail(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!("radius {r} must lie in [0, 1)")));
        }
        match self {
            Self::Constant { c } => Ok(c * (1.0 - r)),
            Self::Power { c, p } => {
                let k = 2.0 * p + 1.0;
                let one_minus = if r == 0.0 { 1.0 } else { -(k * r.ln()).exp_m1() };
                Ok(c * one_minus / k)
            }
            Self::FromH(hp) => {
                // s = e^{−t/2}: ω̂(r) = ½ ∫₀^{−2 log r} e^{g(t) + t/2} dt
                let upper = if r == 0.0 { f64::INFINITY } else { -2.0 * r.ln() };
                Ok(0.5 * hp.exp_integral(0.5, upper)?)
            }
            Self::Tabulated { r: grid, values } => Ok(tabulated_tail(grid, values, r)),
        }
    }
}

fn tabulated_value(grid: &[f64], values: &[f64], r: f64) -> f64 {
    let k = grid.partition_point(|&x| x <= r);
    if k == 0 {
        return values[0];
    }
    if k == grid.len() {
        return values[k - 1];
    }
    let (a, b) = (k - 1, k);
    let u = (r - grid[a]) / (grid[b] - grid[a]);
    let (va, vb) = (values[a], values[b]);
    if va > 0.0 && vb > 0.0 {
        (va.ln() + u * (vb.ln() - va.ln())).exp()
    } else {
        va + u * (vb - va)
    }
}

/// `∫_lo^hi ω` inside one cell `[grid[a], grid[a + 1]]` of the interpolant.
fn cell_integral(grid: &[f64], values: &[f64], a: usize, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let (va, vb) = (tabulated_value(grid, values, lo), tabulated_value(grid, values, hi));
    if values[a] > 0.0 && values[a + 1] > 0.0 {
        exp_affine_segment(va.ln(), vb.ln(), hi - lo).0
    } else {
        0.5 * (va + vb) * (hi - lo)
    }
}

fn tabulated_tail(grid: &[f64], values: &[f64], r: f64) -> f64 {
    let last = grid.len() - 1;
    let mut total = values[last] * (1.0 - grid[last].max(r));
    for a in 0..last {
        total += cell_integral(grid, values, a, grid[a].max(r), grid[a + 1]);
    }
    if r < grid[0] {
        total += values[0] * (grid[0] - r);
    }
    total
}

fn tabulated_moment(grid: &[f64], values: &[f64], n: u32) -> f64 {
    let power = |a: f64, b: f64| (b.powi(n as i32 + 1) - a.powi(n as i32 + 1)) / (f64::from(n) + 1.0);
    let last = grid.len() - 1;
    let mut total = values[0] * power(0.0, grid[0]) + values[last] * power(grid[last], 1.0);
    let rule = gauss_legendre(32);
    for a in 0..last {
        let (lo, len) = (grid[a], grid[a + 1] - grid[a]);
        let cell: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &w)| {
                let r = lo + len * u;
                w * r.powi(n as i32) * tabulated_value(grid, values, r)
            })
            .sum();
        total += cell * len;
    }
    total
}
