//! Named measures with known closed forms, used by tests, benches and the CLI.

use crate::measure::{Atom, JacobiPart, MeasureOnUnitInterval, TabulatedDensity};

/// `δ₀`: the Hardy-space kernel `1 / (1 − x)`.
pub fn hardy() -> MeasureOnUnitInterval {
    MeasureOnUnitInterval::dirac(0.0, 1.0).expect("valid atom")
}

/// `δ₁`: the unweighted Bergman kernel `1 / (1 − x)²`.
pub fn bergman() -> MeasureOnUnitInterval {
    MeasureOnUnitInterval::dirac(1.0, 1.0).expect("valid atom")
}

/// `a·δ₀ + b·δ₁` with `b > 0`; its Bernstein function is `a + b·s` and the
/// induced weight is `(1/b)·r^{2a/b}`.
pub fn two_point(a: f64, b: f64) -> MeasureOnUnitInterval {
    let mut atoms = vec![Atom { at: 1.0, mass: b }];
    if a > 0.0 {
        atoms.push(Atom { at: 0.0, mass: a });
    }
    MeasureOnUnitInterval::new(atoms, vec![], None).expect("valid atoms")
}

pub fn lebesgue() -> MeasureOnUnitInterval {
    MeasureOnUnitInterval::lebesgue()
}

/// The measures every suite-wide property is checked against.
pub fn test_family() -> Vec<(&'static str, MeasureOnUnitInterval)> {
    let mixed = MeasureOnUnitInterval::new(
        vec![Atom { at: 0.25, mass: 0.3 }, Atom { at: 1.0, mass: 0.5 }],
        vec![JacobiPart { c: 2.0, gamma: 1.0, beta: 0.0 }],
        None,
    )
    .expect("valid parts");
    let tabulated = MeasureOnUnitInterval::new(
        vec![],
        vec![],
        Some(TabulatedDensity { r: vec![0.05, 0.2, 0.4, 0.6, 0.8, 0.95], density: vec![0.5, 1.0, 1.5, 1.2, 0.8, 0.4] }),
    )
    .expect("valid table");
    vec![
        ("hardy", hardy()),
        ("bergman", bergman()),
        ("two-point(1,1)", two_point(1.0, 1.0)),
        ("two-point(2,1)", two_point(2.0, 1.0)),
        ("lebesgue", lebesgue()),
        ("jacobi(1,0.5,-0.5)", MeasureOnUnitInterval::jacobi(1.0, 0.5, -0.5).expect("valid")),
        ("jacobi(1,-0.5,0.5)", MeasureOnUnitInterval::jacobi(1.0, -0.5, 0.5).expect("valid")),
        ("mixed", mixed),
        ("interior-atom", MeasureOnUnitInterval::dirac(0.5, 0.5).expect("valid")),
        ("tabulated", tabulated),
    ]
}

/// Members of [`test_family`] whose divergence verdict is `Diverges`.
pub fn divergent_family() -> Vec<(&'static str, MeasureOnUnitInterval)> {
    test_family().into_iter().filter(|(_, m)| m.prw_classify() == Ok(crate::PrwVerdict::Diverges)).collect()
}
