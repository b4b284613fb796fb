//! End-to-end checks across modules on the exactly solvable family
//! `ν = aδ₀ + bδ₁`, whose induced weight is `(1/b) r^{2a/b}`.

use shimorin::berg_duran::omega_moments_from_nu;
use shimorin::charfit::{certify, fit_h, CertificateVerdict, FitProblem, FitVerdict};
use shimorin::kernels::{kernel_match, weight_kernel_coefficients};
use shimorin::reference::two_point;
use shimorin::weight_lab::{dhat_moment_check, RadialWeightProfile};

const FAMILY: [(f64, f64); 6] = [(0.0, 1.0), (0.0, 2.0), (1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0)];

#[test]
fn induced_moments_are_power_weight_moments() {
    for (a, b) in FAMILY {
        let omega = omega_moments_from_nu(&two_point(a, b), 100).unwrap().moments;
        let w = RadialWeightProfile::power(1.0 / b, a / b).unwrap();
        for (n, &v) in omega.values().iter().enumerate() {
            let exact = w.moment(n as u32).unwrap();
            assert!(((v - exact) / exact).abs() < 1e-14, "a = {a}, b = {b}, n = {n}");
        }
    }
}

#[test]
fn power_weight_kernel_matches_the_measure() {
    for (a, b) in FAMILY {
        let nu = two_point(a, b);
        let moments = RadialWeightProfile::power(1.0 / b, a / b).unwrap().moments(201).unwrap();
        let m = kernel_match(&nu, &moments, 100, 1e-10).unwrap();
        assert!(m.matched, "a = {a}, b = {b}: {m:?}");
        let series = weight_kernel_coefficients(&moments).unwrap();
        assert!((series.coefficients()[0] - nu.total_mass()).abs() < 1e-14);
        let d = dhat_moment_check(&moments, 2.0).unwrap();
        assert!(d.pass);
    }
}

#[test]
fn fitted_profiles_recover_the_exact_log_h() {
    for (a, b) in FAMILY {
        let nu = two_point(a, b);
        let problem = FitProblem::new(nu.clone());
        let result = fit_h(&problem).unwrap();
        assert_eq!(result.verdict, FitVerdict::Feasible, "a = {a}, b = {b}");
        assert!(result.max_residual <= 1e-8);
        let hp = result.profile.unwrap();
        let sup = (0..=800)
            .map(|i| {
                let t = 0.01 * i as f64;
                (hp.log_value(t) - (-(1.0 + a / b) * t - b.ln())).abs()
            })
            .fold(0.0, f64::max);
        assert!(sup <= 1e-3, "a = {a}, b = {b}: {sup}");
        let cert = certify(&nu, &hp, problem.moments, 1e-8).unwrap();
        assert_eq!(cert.verdict, CertificateVerdict::Certified);
        assert!((cert.mass_identity - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn certificates_hold_under_more_conditions_for_exact_profiles() {
    let nu = two_point(1.0, 2.0);
    let hp = shimorin::HProfile::from_fn(&FitProblem::default_grid(48, 12.0), |t| -1.5 * t - 2f64.ln()).unwrap();
    let cert = certify(&nu, &hp, 60, 1e-10).unwrap();
    assert_eq!(cert.verdict, CertificateVerdict::Certified, "{:?}", cert.failures);
}
