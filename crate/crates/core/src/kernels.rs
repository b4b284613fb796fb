//! Shimorin-type kernels in series and integral form, Bergman-kernel
//! coefficients of a radial weight, and coefficientwise kernel matching.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::berg_duran::MomentSequence;
use crate::bernstein::BernsteinFunction;
use crate::error::{Error, Result};
use crate::measure::MeasureOnUnitInterval;

/// A pair `(z, λ)` in the open unit disk; kernels depend on `x = z·λ̄` only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    z: Complex64,
    lambda: Complex64,
}

impl DiskPoint {
    pub fn new(z: Complex64, lambda: Complex64) -> Result<Self> {
        if !(z.norm() < 1.0 && lambda.norm() < 1.0) {
            return Err(Error::Domain(format!("points must lie in the open unit disk (z = {z}, λ = {lambda})")));
        }
        Ok(Self { z, lambda })
    }

    /// A point pair with the prescribed product `x = z·λ̄`.
    pub fn from_product(x: Complex64) -> Result<Self> {
        if !(x.norm() < 1.0) {
            return Err(Error::Domain(format!("|x| = {} must be below 1", x.norm())));
        }
        let root = x.sqrt();
        Self::new(root, root.conj())
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::from_product(Complex64::new(x, 0.0))
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn x(&self) -> Complex64 {
        self.z * self.lambda.conj()
    }
}

/// Taylor coefficients `c_n` of a kernel in `x = z·λ̄`, with the constant `C`
/// of the linear bound `c_n ≤ (n + 1)·C` used to certify truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSeries {
    coefficients: Vec<f64>,
    mass_bound: f64,
}

/// A truncated series value with a certified bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms: usize,
}

impl KernelSeries {
    pub fn new(coefficients: Vec<f64>, mass_bound: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InsufficientMoments { needed: 1, available: 0 });
        }
        if let Some(n) = coefficients.iter().position(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::Domain(format!("kernel coefficient {n} must be positive")));
        }
        if !(mass_bound.is_finite() && mass_bound > 0.0) {
            return Err(Error::Domain(format!("mass bound {mass_bound} must be positive")));
        }
        Ok(Self { coefficients, mass_bound })
    }

    /// `c_n = f(n + 1)` for `n ≤ n_max`, with the mass bound `ν_0`.
    pub fn from_bernstein(f: &BernsteinFunction, n_max: usize) -> Self {
        let coefficients = f.kernel_coefficients(n_max).values().to_vec();
        Self { coefficients, mass_bound: f.total_mass() }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn mass_bound(&self) -> f64 {
        self.mass_bound
    }

    /// `C · Σ_{n > N} (n + 1) q^n` in closed form.
    pub fn tail_bound(&self, q: f64, last_index: usize) -> f64 {
        let m = last_index as f64 + 1.0;
        self.mass_bound * q.powf(m) * ((m + 1.0) - m * q) / ((1.0 - q) * (1.0 - q))
    }

    /// Smallest `N` whose tail bound is at most `tol`.
    pub fn required_last_index(&self, q: f64, tol: f64) -> usize {
        let mut n = 0;
        while self.tail_bound(q, n) > tol {
            n += 1;
        }
        n
    }

    /// Partial sum over all stored coefficients plus the certified tail bound.
    pub fn eval_series(&self, p: &DiskPoint, tol: f64) -> Result<SeriesValue> {
        let x = p.x();
        let q = x.norm();
        if !(q < 1.0) {
            return Err(Error::Domain(format!("|x| = {q} must be below 1")));
        }
        let last = self.coefficients.len() - 1;
        let tail_bound = self.tail_bound(q, last);
        if !(tail_bound <= tol) {
            return Err(Error::NeedMoreTerms {
                required: self.required_last_index(q, tol),
                available: self.coefficients.len(),
            });
        }
        // Horner from the highest coefficient.
        let value = self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c);
        Ok(SeriesValue { value, tail_bound, terms: self.coefficients.len() })
    }
}

/// `(1 − x)⁻¹ ∫₀¹ (1 − r x)⁻¹ dν(r)`.
pub fn eval_integral(nu: &MeasureOnUnitInterval, p: &DiskPoint) -> Result<Complex64> {
    let x = p.x();
    if !(x.norm() < 1.0) {
        return Err(Error::Domain(format!("|x| = {} must be below 1", x.norm())));
    }
    let one = Complex64::new(1.0, 0.0);
    let inner = nu.integrate(|r| (one - x * r).inv());
    Ok(inner / (one - x))
}

/// Bergman-kernel coefficients `1 / (2 ω_{2n+1})` from weight moments
/// `ω_0, ω_1, …`; one coefficient per available odd moment.
pub fn weight_kernel_coefficients(omega_moments: &MomentSequence) -> Result<KernelSeries> {
    let values = omega_moments.values();
    if values.len() < 2 {
        return Err(Error::InsufficientMoments { needed: 2, available: values.len() });
    }
    let mut coefficients = Vec::with_capacity(values.len() / 2);
    for (n, &odd) in values.iter().skip(1).step_by(2).enumerate() {
        if !(odd > 0.0) {
            return Err(Error::NotRkhsAdmissible(format!("moment ω_{} = {odd} is not positive", 2 * n + 1)));
        }
        coefficients.push(1.0 / (2.0 * odd));
    }
    // Tightest linear-growth constant consistent with the prefix; for kernels
    // induced by a measure this is c_0 = ν_0.
    let mass_bound = coefficients.iter().enumerate().map(|(n, c)| c / (n as f64 + 1.0)).fold(0.0, f64::max);
    KernelSeries::new(coefficients, mass_bound)
}

/// Result of comparing `S_ν` with `K_ω` coefficient by coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelMatch {
    pub matched: bool,
    /// `max_{n ≤ N} |2 ω_{2n+1} c_n − 1|`
    pub max_deviation: f64,
    pub worst_index: usize,
    pub first_mismatch: Option<usize>,
}

/// Checks `2 ω_{2n+1} c_n = 1` for `n ≤ N` within `tol`.
pub fn kernel_match(
    nu: &MeasureOnUnitInterval,
    omega_moments: &MomentSequence,
    n_max: usize,
    tol: f64,
) -> Result<KernelMatch> {
    let needed = 2 * n_max + 2;
    if omega_moments.len() < needed {
        return Err(Error::InsufficientMoments { needed, available: omega_moments.len() });
    }
    let f = BernsteinFunction::with_prefix(nu.clone(), n_max);
    let c = f.kernel_coefficients(n_max);
    let omega = omega_moments.values();
    let mut out = KernelMatch { matched: true, max_deviation: 0.0, worst_index: 0, first_mismatch: None };
    for (n, &cn) in c.values().iter().enumerate() {
        let dev = (2.0 * omega[2 * n + 1] * cn - 1.0).abs();
        let dev = if dev.is_nan() { f64::INFINITY } else { dev };
        if dev > out.max_deviation {
            out.max_deviation = dev;
            out.worst_index = n;
        }
        if dev > tol && out.first_mismatch.is_none() {
            out.first_mismatch = Some(n);
        }
    }
    out.matched = out.first_mismatch.is_none();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berg_duran::Provenance;
    use crate::reference;

    fn series(nu: MeasureOnUnitInterval, n: usize) -> KernelSeries {
        KernelSeries::from_bernstein(&BernsteinFunction::with_prefix(nu, n), n)
    }

    fn omega(values: Vec<f64>) -> MomentSequence {
        MomentSequence::new(values, Provenance::OmegaMoments).unwrap()
    }

    #[test]
    fn hardy_and_bergman_series_examples() {
        let hardy = series(reference::hardy(), 200);
        let at0 = hardy.eval_series(&DiskPoint::real(0.0).unwrap(), 1e-12).unwrap();
        assert_eq!(at0.value, Complex64::new(1.0, 0.0));
        let v = hardy.eval_series(&DiskPoint::real(0.25).unwrap(), 1e-12).unwrap();
        assert!((v.value.re - 4.0 / 3.0).abs() < 1e-12);
        let bergman = series(reference::bergman(), 200);
        let v = bergman.eval_series(&DiskPoint::real(0.25).unwrap(), 1e-12).unwrap();
        assert!((v.value.re - 16.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_terms_reports_the_required_index() {
        let s = series(reference::bergman(), 10);
        let err = s.eval_series(&DiskPoint::real(0.9).unwrap(), 1e-10).unwrap_err();
        match err {
            Error::NeedMoreTerms { required, available } => {
                assert_eq!(available, 11);
                assert!(s.tail_bound(0.9, required) <= 1e-10);
                assert!(s.tail_bound(0.9, required - 1) > 1e-10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn points_outside_the_disk_are_rejected() {
        assert!(DiskPoint::real(1.0).is_err());
        assert!(DiskPoint::new(Complex64::new(0.5, 0.0), Complex64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn integral_examples() {
        for (_, nu) in reference::test_family() {
            let v = eval_integral(&nu, &DiskPoint::real(0.0).unwrap()).unwrap();
            assert!((v.re - nu.total_mass()).abs() < 1e-13 * nu.total_mass());
        }
        let p = DiskPoint::new(Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)).unwrap();
        let v = eval_integral(&reference::bergman(), &p).unwrap();
        assert!((v.re - 16.0 / 9.0).abs() < 1e-14);
        let v = eval_integral(&reference::lebesgue(), &DiskPoint::real(0.5).unwrap()).unwrap();
        assert!((v.re - 4.0 * std::f64::consts::LN_2).abs() < 1e-13);
    }

    #[test]
    fn weight_coefficient_examples() {
        let lebesgue_weight: Vec<f64> = (0..20).map(|n| 1.0 / (n as f64 + 1.0)).collect();
        let ks = weight_kernel_coefficients(&omega(lebesgue_weight)).unwrap();
        for (n, &c) in ks.coefficients().iter().enumerate() {
            assert!((c - (n as f64 + 1.0)).abs() < 1e-12);
        }
        let r2: Vec<f64> = (0..20).map(|n| 1.0 / (n as f64 + 3.0)).collect();
        let ks = weight_kernel_coefficients(&omega(r2)).unwrap();
        for (n, &c) in ks.coefficients().iter().enumerate() {
            assert!((c - (n as f64 + 2.0)).abs() < 1e-12);
        }
        let ks = weight_kernel_coefficients(&omega(vec![1.0, 0.5])).unwrap();
        assert_eq!(ks.coefficients(), &[1.0]);
        let err = weight_kernel_coefficients(&omega(vec![1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::NotRkhsAdmissible(_)));
    }

    #[test]
    fn kernel_match_examples() {
        let lebesgue_weight = omega((0..=101).map(|n| 1.0 / (n as f64 + 1.0)).collect());
        let m = kernel_match(&reference::bergman(), &lebesgue_weight, 50, 1e-10).unwrap();
        assert!(m.matched);
        let m = kernel_match(&reference::hardy(), &lebesgue_weight, 50, 1e-10).unwrap();
        assert!(!m.matched);
        assert_eq!(m.first_mismatch, Some(1));
        let r2 = omega((0..=101).map(|n| 1.0 / (n as f64 + 3.0)).collect());
        let m = kernel_match(&reference::two_point(1.0, 1.0), &r2, 50, 1e-10).unwrap();
        assert!(m.matched, "{m:?}");
        assert!(kernel_match(&reference::bergman(), &r2, 60, 1e-10).is_err());
    }

    #[test]
    fn series_and_integral_agree_inside_radius_point_nine() {
        let points = [
            Complex64::new(0.9, 0.0),
            Complex64::new(-0.9, 0.0),
            Complex64::new(0.3, 0.6),
            Complex64::from_polar(0.85, 2.0),
        ];
        for (name, nu) in reference::test_family() {
            let ks = series(nu.clone(), 420);
            for x in points {
                let p = DiskPoint::from_product(x).unwrap();
                let s = ks.eval_series(&p, 1e-11).unwrap();
                let i = eval_integral(&nu, &p).unwrap();
                assert!((s.value - i).norm() <= s.tail_bound + 1e-10, "{name} at {x}");
            }
        }
    }

    #[test]
    fn diagonal_values_are_real_and_at_least_the_mass() {
        for (name, nu) in reference::test_family() {
            for x in [0.1, 0.5, 0.9] {
                let p = DiskPoint::new(Complex64::new(x, 0.0), Complex64::new(x, 0.0)).unwrap();
                let v = eval_integral(&nu, &p).unwrap();
                assert!(v.im.abs() < 1e-15 && v.re >= nu.total_mass(), "{name}");
            }
        }
    }

    #[test]
    fn closed_forms_on_a_disk_grid() {
        for k in 0..24 {
            let x = Complex64::from_polar(0.9 * (k % 4 + 1) as f64 / 4.0, k as f64 * 0.7);
            let p = DiskPoint::from_product(x).unwrap();
            let one = Complex64::new(1.0, 0.0);
            let hardy = eval_integral(&reference::hardy(), &p).unwrap();
            assert!((hardy - (one - x).inv()).norm() < 1e-10);
            let bergman = eval_integral(&reference::bergman(), &p).unwrap();
            assert!((bergman - ((one - x) * (one - x)).inv()).norm() < 1e-10);
        }
    }
}
