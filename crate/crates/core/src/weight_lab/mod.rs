//! Radial weights, the weight ↔ h-profile transforms
//! `h(t) = e^{−t} ω(e^{−t/2})`, `ω(r) = h(−2 log r)/r²`, and the checks that
//! classify them: log-subharmonicity, log-convexity, growth, doubling (D̂)
//! and RKHS admissibility.

mod checks;
mod profile;
mod weight;

pub use checks::{
    dhat_moment_check, dhat_tail_check, growth_check, h_to_weight, laplace_moment, log_convexity_check,
    log_subharmonic_check, rkhs_check, weight_moment, weight_to_h, ConvexityReport, DhatForm, DhatReport, GrowthReport,
};
pub use profile::{HProfile, LaplaceMoment};
pub use weight::RadialWeightProfile;
