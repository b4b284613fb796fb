//! The Bernstein function `f(s) = ∫₀¹ (1 − t^s)/(1 − t) dν(t)` and the
//! Shimorin kernel coefficients `c_n = f(n + 1)`.

use crate::berg_duran::{MomentSequence, Provenance};
use crate::error::{Error, Result};
use crate::measure::MeasureOnUnitInterval;
use crate::numeric::{geometric_ratio, CompensatedSum};

const DEFAULT_PREFIX: usize = 64;

#[derive(Debug, Clone)]
pub struct BernsteinFunction {
    measure: MeasureOnUnitInterval,
    moments: Vec<f64>,
}

impl BernsteinFunction {
    pub fn new(measure: MeasureOnUnitInterval) -> Self {
        Self::with_prefix(measure, DEFAULT_PREFIX)
    }

    /// Caches the moments `ν_0..=ν_len`.
    pub fn with_prefix(measure: MeasureOnUnitInterval, len: usize) -> Self {
        let moments = measure.moments(len);
        Self { measure, moments }
    }

    pub fn measure(&self) -> &MeasureOnUnitInterval {
        &self.measure
    }

    /// `ν_0 = ν([0, 1])`.
    pub fn total_mass(&self) -> f64 {
        self.moments[0]
    }

    /// Direct evaluation of `f(s)` for `s > 0`.
    ///
    /// Atoms at 0 and 1 contribute `a` and `b·s`; interior atoms and densities
    /// use the bounded integrand `(1 − t^s)/(1 − t)`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Domain(format!("Bernstein function needs s > 0, got {s}")));
        }
        let mut acc = CompensatedSum::new();
        for a in self.measure.atom_list() {
            acc.add(a.mass * geometric_ratio(a.at, s));
        }
        if self.measure.has_density() {
            acc.add(self.measure.integrate_density(|t| geometric_ratio(t, s)));
        }
        Ok(acc.value())
    }

    /// `c_0..=c_N` by running compensated partial sums of the moments.
    pub fn kernel_coefficients(&self, n_max: usize) -> MomentSequence {
        let extended;
        let moments = if n_max < self.moments.len() {
            &self.moments[..=n_max]
        } else {
            extended = self.measure.moments(n_max);
            &extended[..]
        };
        let mut acc = CompensatedSum::new();
        let values = moments
            .iter()
            .map(|&m| {
                acc.add(m);
                acc.value()
            })
            .collect();
        MomentSequence::new(values, Provenance::KernelCoefficients).expect("finite partial sums")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn evaluation_examples() {
        let f = BernsteinFunction::new(reference::hardy());
        assert_eq!(f.eval(7.3).unwrap(), 1.0);
        let f = BernsteinFunction::new(reference::bergman());
        assert_eq!(f.eval(2.5).unwrap(), 2.5);
        let f = BernsteinFunction::new(reference::lebesgue());
        assert!((f.eval(2.0).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_argument_is_a_domain_error() {
        let f = BernsteinFunction::new(reference::lebesgue());
        assert!(matches!(f.eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(f.eval(-1.0), Err(Error::Domain(_))));
        assert!(matches!(f.eval(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn coefficient_examples() {
        let c = BernsteinFunction::new(reference::hardy()).kernel_coefficients(10);
        assert!(c.values().iter().all(|&v| v == 1.0));
        let c = BernsteinFunction::new(reference::bergman()).kernel_coefficients(10);
        for (n, &v) in c.values().iter().enumerate() {
            assert_eq!(v, n as f64 + 1.0);
        }
        let c = BernsteinFunction::new(reference::lebesgue()).kernel_coefficients(2);
        assert!((c.values()[2] - 11.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn coefficients_beyond_the_cached_prefix() {
        let f = BernsteinFunction::with_prefix(reference::lebesgue(), 4);
        let c = f.kernel_coefficients(100);
        let harmonic: f64 = (1..=101).map(|k| 1.0 / k as f64).sum();
        assert!((c.values()[100] - harmonic).abs() < 1e-13);
    }

    #[test]
    fn partial_sums_agree_with_direct_evaluation() {
        for (name, nu) in reference::test_family() {
            let f = BernsteinFunction::new(nu);
            let c = f.kernel_coefficients(50);
            for (n, &cn) in c.values().iter().enumerate() {
                let direct = f.eval(n as f64 + 1.0).unwrap();
                assert!((cn - direct).abs() <= 1e-10 * cn, "{name}, n = {n}: {cn} vs {direct}");
            }
        }
    }

    #[test]
    fn monotone_doubling_and_linear_growth() {
        for (name, nu) in reference::test_family() {
            let f = BernsteinFunction::new(nu);
            let mass = f.total_mass();
            let mut prev = 0.0;
            for i in 1..200 {
                let v = f.eval(i as f64 * 0.173).unwrap();
                assert!(v >= prev * (1.0 - 1e-14), "{name}: not monotone at step {i}");
                prev = v;
            }
            for n in 1..60 {
                let lhs = f.eval(n as f64 + 0.5).unwrap();
                let rhs = 2.0 * f.eval((n as f64 + 1.0) / 2.0).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-12), "{name}: doubling fails at n = {n}");
            }
            let c = f.kernel_coefficients(60);
            for (n, &cn) in c.values().iter().enumerate() {
                assert!(cn <= (n as f64 + 1.0) * mass * (1.0 + 1e-14), "{name}: growth at n = {n}");
            }
        }
    }

    #[test]
    fn half_integer_values_of_lebesgue_match_harmonic_numbers() {
        // H_{m+1/2} = 2 − 2 ln 2 + Σ_{k=1}^{m} 2/(2k+1)
        let f = BernsteinFunction::new(reference::lebesgue());
        let mut h = 2.0 - 2.0 * std::f64::consts::LN_2;
        for m in 0..40 {
            if m > 0 {
                h += 2.0 / (2.0 * m as f64 + 1.0);
            }
            let got = f.eval(m as f64 + 0.5).unwrap();
            assert!(((got - h) / h).abs() < 1e-10, "m = {m}: {got} vs {h}");
        }
    }
}
