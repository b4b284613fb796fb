//! Small floating-point helpers shared by the modules.

use statrs::function::beta::ln_beta;
use statrs::function::gamma::gamma;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Euler Beta function. A small integer argument uses the finite product
/// `B(a, n) = (n − 1)! / (a (a + 1) ⋯ (a + n − 1))`; otherwise the Gamma ratio,
/// switching to the log form before `Γ` overflows.
pub(crate) fn beta_fn(a: f64, b: f64) -> f64 {
    let small_int = |x: f64| x.fract() == 0.0 && (1.0..=64.0).contains(&x);
    if small_int(b) || small_int(a) {
        let (a, n) = if small_int(b) { (a, b as u32) } else { (b, a as u32) };
        let mut value = 1.0;
        for j in 0..n {
            value *= if j == 0 { 1.0 / a } else { j as f64 / (a + j as f64) };
        }
        value
    } else if a + b < 150.0 {
        gamma(a) * gamma(b) / gamma(a + b)
    } else {
        ln_beta(a, b).exp()
    }
}

/// `(1 − t^s) / (1 − t)` on `[0, 1]`, continuous at both ends (value 1 at
/// `t = 0`, value `s` at `t = 1`).
pub(crate) fn geometric_ratio(t: f64, s: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return s;
    }
    let one_minus = 1.0 - t;
    // ln t computed from 1 − t keeps full relative accuracy near t = 1.
    let log_t = if t > 0.5 { (-one_minus).ln_1p() } else { t.ln() };
    -(s * log_t).exp_m1() / one_minus
}

/// `∫₀¹ e^{−dσ} dσ` for `d ≥ 0`.
pub(crate) fn q0(d: f64) -> f64 {
    if d < 1e-3 {
        1.0 - d / 2.0 + d * d / 6.0 - d * d * d / 24.0 + d * d * d * d / 120.0
    } else {
        -(-d).exp_m1() / d
    }
}

/// `∫₀¹ σ e^{−dσ} dσ` for `d ≥ 0`.
pub(crate) fn q1(d: f64) -> f64 {
    if d < 1e-3 {
        0.5 - d / 3.0 + d * d / 8.0 - d * d * d / 30.0 + d * d * d * d / 144.0
    } else {
        (-(-d).exp_m1() - d * (-d).exp()) / (d * d)
    }
}

/// Integral of `exp` of the affine function through `(0, ya)` and `(len, yb)`
/// over `[0, len]`, together with its partial derivatives in `ya` and `yb`.
pub(crate) fn exp_affine_segment(ya: f64, yb: f64, len: f64) -> (f64, f64, f64) {
    let d = (yb - ya).abs();
    let (q0, q1) = (q0(d), q1(d));
    if yb >= ya {
        let peak = yb.exp() * len;
        (peak * q0, peak * q1, peak * (q0 - q1))
    } else {
        let peak = ya.exp() * len;
        (peak * q0, peak * (q0 - q1), peak * q1)
    }
}
