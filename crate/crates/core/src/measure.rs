//! Finite positive Borel measures on `[0, 1]`.
//!
//! A measure is a finite sum of atoms, Jacobi-type densities
//! `c · r^γ (1 − r)^β` and at most one tabulated density. Moments of atoms and
//! Jacobi parts are closed form; everything else goes through a fixed
//! positive-weight discretization built once per measure.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::beta_fn;
use crate::quadrature::{gauss_jacobi, gauss_legendre, Accumulate, QuadratureRule};

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub at: f64,
    pub mass: f64,
}

/// The density `c · r^γ (1 − r)^β` on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JacobiPart {
    pub c: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl JacobiPart {
    /// `c · B(k + γ + 1, β + 1)`.
    pub fn moment(&self, k: u64) -> f64 {
        if k <= 4096 {
            let mut m = self.base_mass();
            for j in 0..k {
                m *= self.ratio(j);
            }
            m
        } else {
            self.c * beta_fn(k as f64 + self.gamma + 1.0, self.beta + 1.0)
        }
    }

    fn base_mass(&self) -> f64 {
        self.c * beta_fn(self.gamma + 1.0, self.beta + 1.0)
    }

    /// `B(k + γ + 2, β + 1) / B(k + γ + 1, β + 1)`.
    fn ratio(&self, k: u64) -> f64 {
        let a = k as f64 + self.gamma + 1.0;
        a / (a + self.beta + 1.0)
    }
}

/// Piecewise-linear density sampled on a strictly increasing grid in `(0, 1)`,
/// held constant at the end values outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedDensity {
    pub r: Vec<f64>,
    pub density: Vec<f64>,
}

impl TabulatedDensity {
    pub fn value(&self, x: f64) -> f64 {
        let (r, d) = (&self.r, &self.density);
        let last = r.len() - 1;
        if x <= r[0] {
            return d[0];
        }
        if x >= r[last] {
            return d[last];
        }
        let i = r.partition_point(|&ri| ri <= x) - 1;
        let w = (x - r[i]) / (r[i + 1] - r[i]);
        d[i] + w * (d[i + 1] - d[i])
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidMeasure(format!("tabulated part: {msg}")));
        if self.r.len() < 2 || self.r.len() != self.density.len() {
            return bad("needs at least two samples and matching lengths");
        }
        if self.r.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return bad("grid must lie in (0, 1)");
        }
        if self.r.windows(2).any(|w| w[1] <= w[0]) {
            return bad("grid must be strictly increasing");
        }
        if self.density.iter().any(|&d| !d.is_finite() || d < 0.0) {
            return bad("density values must be finite and nonnegative");
        }
        if self.density.iter().all(|&d| d == 0.0) {
            return bad("density vanishes identically");
        }
        Ok(())
    }
}

/// Outcome of the divergence test for `∫₀¹ dν(r) / (1 − r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrwVerdict {
    Diverges,
    Converges,
    Unknown,
}

/// Serialized form: `{"atoms": [...], "jacobi": [...], "tabulated": {...}}`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDescription {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub jacobi: Vec<JacobiPart>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tabulated: Option<TabulatedDensity>,
}

/// A finite positive Borel measure on `[0, 1]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MeasureDescription", into = "MeasureDescription")]
pub struct MeasureOnUnitInterval {
    atoms: Vec<Atom>,
    jacobi: Vec<JacobiPart>,
    tabulated: Option<TabulatedDensity>,
    quadrature: QuadratureRule,
    // (node, weight) pairs discretizing all density parts
    nodes: OnceLock<Vec<(f64, f64)>>,
}

impl PartialEq for MeasureOnUnitInterval {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
            && self.jacobi == other.jacobi
            && self.tabulated == other.tabulated
            && self.quadrature == other.quadrature
    }
}

impl TryFrom<MeasureDescription> for MeasureOnUnitInterval {
    type Error = Error;

    fn try_from(d: MeasureDescription) -> Result<Self> {
        Self::new(d.atoms, d.jacobi, d.tabulated)
    }
}

impl From<MeasureOnUnitInterval> for MeasureDescription {
    fn from(m: MeasureOnUnitInterval) -> Self {
        Self { atoms: m.atoms, jacobi: m.jacobi, tabulated: m.tabulated }
    }
}

impl MeasureOnUnitInterval {
    pub fn new(mut atoms: Vec<Atom>, jacobi: Vec<JacobiPart>, tabulated: Option<TabulatedDensity>) -> Result<Self> {
        if atoms.is_empty() && jacobi.is_empty() && tabulated.is_none() {
            return Err(Error::EmptyMeasure);
        }
        for a in &atoms {
            if !(0.0..=1.0).contains(&a.at) {
                return Err(Error::InvalidMeasure(format!("atom location {} outside [0, 1]", a.at)));
            }
            if !(a.mass.is_finite() && a.mass > 0.0) {
                return Err(Error::InvalidMeasure(format!("atom mass {} must be positive", a.mass)));
            }
        }
        atoms.sort_by(|p, q| p.at.total_cmp(&q.at));
        if atoms.windows(2).any(|w| w[0].at == w[1].at) {
            return Err(Error::InvalidMeasure("atom locations must be distinct".into()));
        }
        for j in &jacobi {
            let ok = j.c.is_finite() && j.c > 0.0 && j.gamma > -1.0 && j.beta > -1.0;
            if !ok || !j.gamma.is_finite() || !j.beta.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "Jacobi part needs c > 0, gamma > -1, beta > -1 (got {j:?})"
                )));
            }
        }
        if let Some(t) = &tabulated {
            t.validate()?;
        }
        Ok(Self { atoms, jacobi, tabulated, quadrature: QuadratureRule::default(), nodes: OnceLock::new() })
    }

    pub fn dirac(at: f64, mass: f64) -> Result<Self> {
        Self::new(vec![Atom { at, mass }], vec![], None)
    }

    pub fn atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        Self::new(atoms.iter().map(|&(at, mass)| Atom { at, mass }).collect(), vec![], None)
    }

    pub fn jacobi(c: f64, gamma: f64, beta: f64) -> Result<Self> {
        Self::new(vec![], vec![JacobiPart { c, gamma, beta }], None)
    }

    pub fn lebesgue() -> Self {
        Self::jacobi(1.0, 0.0, 0.0).expect("valid parameters")
    }

    pub fn tabulated(r: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        Self::new(vec![], vec![], Some(TabulatedDensity { r, density }))
    }

    /// Sum of two measures.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        for a in &other.atoms {
            match atoms.iter_mut().find(|b| b.at == a.at) {
                Some(b) => b.mass += a.mass,
                None => atoms.push(*a),
            }
        }
        let mut jacobi = self.jacobi.clone();
        jacobi.extend_from_slice(&other.jacobi);
        let tabulated = match (&self.tabulated, &other.tabulated) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidMeasure("at most one tabulated part".into()));
            }
            (t, None) | (None, t) => t.clone(),
        };
        Self::new(atoms, jacobi, tabulated).map(|m| m.with_quadrature(self.quadrature))
    }

    /// The same measure multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidMeasure(format!("scale factor {factor} must be positive")));
        }
        let atoms = self.atoms.iter().map(|a| Atom { at: a.at, mass: a.mass * factor }).collect();
        let jacobi = self.jacobi.iter().map(|j| JacobiPart { c: j.c * factor, ..*j }).collect();
        let tabulated = self
            .tabulated
            .as_ref()
            .map(|t| TabulatedDensity { r: t.r.clone(), density: t.density.iter().map(|d| d * factor).collect() });
        Self::new(atoms, jacobi, tabulated).map(|m| m.with_quadrature(self.quadrature))
    }

    pub fn with_quadrature(mut self, rule: QuadratureRule) -> Self {
        self.quadrature = rule;
        self.nodes = OnceLock::new();
        self
    }

    pub fn quadrature(&self) -> QuadratureRule {
        self.quadrature
    }

    pub fn atom_list(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn jacobi_parts(&self) -> &[JacobiPart] {
        &self.jacobi
    }

    pub fn tabulated_part(&self) -> Option<&TabulatedDensity> {
        self.tabulated.as_ref()
    }

    /// `ν({0})`, the constant term of the Bernstein function.
    pub fn mass_at_zero(&self) -> f64 {
        self.atoms.iter().filter(|a| a.at == 0.0).fold(0.0, |acc, a| acc + a.mass)
    }

    /// `ν({1})`, the linear term of the Bernstein function.
    pub fn mass_at_one(&self) -> f64 {
        self.atoms.iter().filter(|a| a.at == 1.0).fold(0.0, |acc, a| acc + a.mass)
    }

    pub fn has_density(&self) -> bool {
        !self.jacobi.is_empty() || self.tabulated.is_some()
    }

    pub fn total_mass(&self) -> f64 {
        self.moment(0)
    }

    /// `ν_k = ∫ r^k dν` with `0⁰ = 1`.
    pub fn moment(&self, k: u64) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.mass * atom_power(a.at, k)).sum();
        let jacobi: f64 = self.jacobi.iter().map(|j| j.moment(k)).sum();
        let tabulated = if self.tabulated.is_some() {
            self.tabulated_nodes().iter().map(|&(r, w)| w * pow_u64(r, k)).sum()
        } else {
            0.0
        };
        atoms + jacobi + tabulated
    }

    /// The prefix `ν_0, …, ν_{k_max}`.
    pub fn moments(&self, k_max: usize) -> Vec<f64> {
        let mut out = vec![0.0; k_max + 1];
        for a in &self.atoms {
            let mut p = 1.0;
            for m in out.iter_mut() {
                *m += a.mass * p;
                p *= a.at;
            }
        }
        for j in &self.jacobi {
            let mut m = j.base_mass();
            for (k, slot) in out.iter_mut().enumerate() {
                *slot += m;
                m *= j.ratio(k as u64);
            }
        }
        if self.tabulated.is_some() {
            for &(r, w) in self.tabulated_nodes() {
                let mut p = w;
                for slot in out.iter_mut() {
                    *slot += p;
                    p *= r;
                }
            }
        }
        out
    }

    /// Divergence of `∫₀¹ dν(r) / (1 − r)`.
    pub fn prw_classify(&self) -> Result<PrwVerdict> {
        if !(self.total_mass() > 0.0) {
            return Err(Error::EmptyMeasure);
        }
        if self.mass_at_one() > 0.0 || self.jacobi.iter().any(|j| j.beta <= 0.0) {
            return Ok(PrwVerdict::Diverges);
        }
        match &self.tabulated {
            // Positive at the last sample: the table cannot tell how the density
            // behaves as r -> 1.
            Some(t) if *t.density.last().unwrap() > 0.0 => Ok(PrwVerdict::Unknown),
            _ => Ok(PrwVerdict::Converges),
        }
    }

    /// `∫ F dν`: atoms summed exactly, densities by quadrature.
    pub fn integrate_against(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        for a in &self.atoms {
            if !f(a.at).is_finite() {
                return Err(Error::NonFiniteIntegrand { at: a.at });
            }
        }
        Ok(self.integrate(f))
    }

    /// Unchecked integration for any accumulable integrand.
    pub fn integrate<T: Accumulate>(&self, f: impl Fn(f64) -> T) -> T {
        let atoms = self.atoms.iter().fold(T::default(), |acc, a| acc + f(a.at) * a.mass);
        let density = self.density_nodes().iter().fold(T::default(), |acc, &(r, w)| acc + f(r) * w);
        atoms + density
    }

    /// Only the part of `∫ F dν` carried by densities.
    pub fn integrate_density<T: Accumulate>(&self, f: impl Fn(f64) -> T) -> T {
        self.density_nodes().iter().fold(T::default(), |acc, &(r, w)| acc + f(r) * w)
    }

    fn density_nodes(&self) -> &[(f64, f64)] {
        self.nodes.get_or_init(|| {
            let mut nodes = Vec::new();
            for j in &self.jacobi {
                jacobi_nodes(&self.quadrature, j, &mut nodes);
            }
            if let Some(t) = &self.tabulated {
                tabulated_nodes(&self.quadrature, t, &mut nodes);
            }
            nodes
        })
    }

    fn tabulated_nodes(&self) -> &[(f64, f64)] {
        let all = self.density_nodes();
        let jacobi_count = self.jacobi.len() * jacobi_node_count(&self.quadrature);
        &all[jacobi_count..]
    }
}

fn atom_power(at: f64, k: u64) -> f64 {
    if k == 0 {
        1.0
    } else {
        pow_u64(at, k)
    }
}

fn pow_u64(x: f64, k: u64) -> f64 {
    if k <= i32::MAX as u64 {
        x.powi(k as i32)
    } else {
        x.powf(k as f64)
    }
}

fn jacobi_node_count(rule: &QuadratureRule) -> usize {
    if rule.levels == 0 {
        rule.nodes
    } else {
        let panels = rule.dyadic_breaks().len() - 1;
        panels * rule.nodes
    }
}

fn jacobi_nodes(rule: &QuadratureRule, part: &JacobiPart, out: &mut Vec<(f64, f64)>) {
    let JacobiPart { c, gamma, beta } = *part;
    if rule.levels == 0 {
        let gj = gauss_jacobi(rule.nodes, gamma, beta);
        out.extend(gj.nodes.iter().zip(&gj.weights).map(|(&x, &w)| (x, c * w)));
        return;
    }
    let eps = 0.5f64.powi(rule.levels as i32);
    let left = gauss_jacobi(rule.nodes, gamma, 0.0);
    let scale = c * eps.powf(gamma + 1.0);
    for (&u, &w) in left.nodes.iter().zip(&left.weights) {
        let r = eps * u;
        out.push((r, scale * w * (1.0 - r).powf(beta)));
    }
    let gl = gauss_legendre(rule.nodes);
    let breaks = rule.dyadic_breaks();
    for win in breaks[1..breaks.len() - 1].windows(2) {
        let (a, b) = (win[0], win[1]);
        let len = b - a;
        for (&u, &w) in gl.nodes.iter().zip(&gl.weights) {
            let r = a + len * u;
            out.push((r, c * w * len * r.powf(gamma) * (1.0 - r).powf(beta)));
        }
    }
    let right = gauss_jacobi(rule.nodes, beta, 0.0);
    let scale = c * eps.powf(beta + 1.0);
    for (&v, &w) in right.nodes.iter().zip(&right.weights) {
        let r = 1.0 - eps * v;
        out.push((r, scale * w * r.powf(gamma)));
    }
}

fn tabulated_nodes(rule: &QuadratureRule, t: &TabulatedDensity, out: &mut Vec<(f64, f64)>) {
    let mut breaks = rule.dyadic_breaks();
    breaks.extend_from_slice(&t.r);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let gl = gauss_legendre(rule.nodes);
    for win in breaks.windows(2) {
        let (a, b) = (win[0], win[1]);
        let len = b - a;
        for (&u, &w) in gl.nodes.iter().zip(&gl.weights) {
            let r = a + len * u;
            let d = t.value(r);
            if d > 0.0 {
                out.push((r, w * len * d));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn dirac_moments() {
        let d0 = MeasureOnUnitInterval::dirac(0.0, 1.0).unwrap();
        assert_eq!(d0.moment(0), 1.0);
        assert_eq!(d0.moment(3), 0.0);
        let d1 = MeasureOnUnitInterval::dirac(1.0, 1.0).unwrap();
        for k in [0, 1, 7, 1000] {
            assert_eq!(d1.moment(k), 1.0);
        }
    }

    #[test]
    fn lebesgue_moment_matches_beta_and_quadrature() {
        let leb = MeasureOnUnitInterval::lebesgue();
        assert!(close(leb.moment(4), 0.2, 1e-14));
        let quad = leb.integrate_against(|r| r.powi(4)).unwrap();
        assert!(close(quad, 0.2, 1e-13));
    }

    #[test]
    fn prefix_matches_single_moments() {
        let m = MeasureOnUnitInterval::new(
            vec![Atom { at: 0.3, mass: 0.2 }, Atom { at: 1.0, mass: 0.5 }],
            vec![JacobiPart { c: 2.0, gamma: 0.5, beta: -0.5 }],
            None,
        )
        .unwrap();
        let prefix = m.moments(60);
        for (k, &p) in prefix.iter().enumerate() {
            assert!(close(p, m.moment(k as u64), 1e-13), "k = {k}");
        }
    }

    #[test]
    fn prw_verdicts() {
        let d0 = MeasureOnUnitInterval::dirac(0.0, 1.0).unwrap();
        assert_eq!(d0.prw_classify().unwrap(), PrwVerdict::Converges);
        let d1 = MeasureOnUnitInterval::dirac(1.0, 1.0).unwrap();
        assert_eq!(d1.prw_classify().unwrap(), PrwVerdict::Diverges);
        assert_eq!(MeasureOnUnitInterval::lebesgue().prw_classify().unwrap(), PrwVerdict::Diverges);
        let j = MeasureOnUnitInterval::jacobi(1.0, 0.0, 0.5).unwrap();
        assert_eq!(j.prw_classify().unwrap(), PrwVerdict::Converges);
        let t = MeasureOnUnitInterval::tabulated(vec![0.2, 0.5, 0.9], vec![1.0, 2.0, 1.0]).unwrap();
        assert_eq!(t.prw_classify().unwrap(), PrwVerdict::Unknown);
        let t = MeasureOnUnitInterval::tabulated(vec![0.2, 0.5, 0.9], vec![1.0, 2.0, 0.0]).unwrap();
        assert_eq!(t.prw_classify().unwrap(), PrwVerdict::Converges);
    }

    #[test]
    fn integrate_against_basics() {
        let leb = MeasureOnUnitInterval::lebesgue();
        assert!(close(leb.integrate_against(|_| 1.0).unwrap(), 1.0, 1e-14));
        assert!(close(leb.integrate_against(|r| r).unwrap(), 0.5, 1e-14));
        let d1 = MeasureOnUnitInterval::dirac(1.0, 1.0).unwrap();
        assert_eq!(d1.integrate_against(|r| r).unwrap(), 1.0);
        let err = d1.integrate_against(|r| 1.0 / (1.0 - r)).unwrap_err();
        assert_eq!(err, Error::NonFiniteIntegrand { at: 1.0 });
    }

    #[test]
    fn tabulated_density_integrates_piecewise_linear_exactly() {
        let t = MeasureOnUnitInterval::tabulated(vec![0.25, 0.75], vec![0.0, 2.0]).unwrap();
        // density: 0 on [0, .25], ramp to 2 on [.25, .75], 2 on [.75, 1]
        let want = 0.5 * 0.5 * 2.0 + 0.25 * 2.0;
        assert!(close(t.total_mass(), want, 1e-14));
    }

    #[test]
    fn rejects_invalid_parts() {
        assert_eq!(MeasureOnUnitInterval::new(vec![], vec![], None).unwrap_err(), Error::EmptyMeasure);
        assert!(MeasureOnUnitInterval::dirac(1.5, 1.0).is_err());
        assert!(MeasureOnUnitInterval::dirac(0.5, 0.0).is_err());
        assert!(MeasureOnUnitInterval::atoms(&[(0.5, 1.0), (0.5, 2.0)]).is_err());
        assert!(MeasureOnUnitInterval::jacobi(1.0, -1.0, 0.0).is_err());
        assert!(MeasureOnUnitInterval::tabulated(vec![0.5, 0.4], vec![1.0, 1.0]).is_err());
        assert!(MeasureOnUnitInterval::tabulated(vec![0.0, 0.4], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn json_description_round_trips() {
        let text = r#"{"atoms":[{"at":1.0,"mass":1.0}],"jacobi":[{"c":1.0,"gamma":0.0,"beta":0.0}]}"#;
        let m: MeasureOnUnitInterval = serde_json::from_str(text).unwrap();
        assert_eq!(m.mass_at_one(), 1.0);
        assert_eq!(m.jacobi_parts().len(), 1);
        let back: MeasureOnUnitInterval = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<MeasureOnUnitInterval>("{}").is_err());
        assert!(serde_json::from_str::<MeasureOnUnitInterval>(r#"{"atom":[]}"#).is_err());
    }
}
