//! Independent numerical checks of the closed forms.
//!
//! Nothing here is on the production path: these routines integrate the
//! dynamics, invert matrices and sum fluxes the slow, generic way so that
//! the closed forms have something to disagree with.

mod finite_beam;
mod linear;
mod ode;
pub mod suite;
mod sum_rules;
mod time_domain;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{DriveConfig, PhaseShiftTable, ScatteringScalars};

pub use finite_beam::{finite_beam_balance, BalanceReport, FiniteBeamModel};
pub use linear::{generic_inverse, leibniz_det};
pub use ode::{ode_deviation, ode_evolve, ODE_MAX_STEP};
pub use sum_rules::{quad_sum_rules, quad_sum_rules_reduced, SumRuleReport};
pub use time_domain::{spectrum_time_domain, spectrum_time_domain_reduced};

/// Fixed-seed generator for reproducible randomized checks.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random table with shifts in `[-0.6, 0.6]`.
pub fn random_table(rng: &mut impl Rng, lmax: usize) -> PhaseShiftTable {
    let mut draw = || (0..=lmax).map(|_| rng.gen_range(-0.6..0.6)).collect::<Vec<f64>>();
    let p = draw();
    let m = draw();
    PhaseShiftTable::new(p, m).expect("finite shifts")
}

/// Random scalars satisfying the triangle bound.
pub fn random_scalars(rng: &mut impl Rng) -> ScatteringScalars {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let a: f64 = rng.gen_range(0.0..0.4);
    let b: f64 = rng.gen_range(0.0..0.4);
    let c = rng.gen_range((a - b).abs()..=(a + b));
    ScatteringScalars::new(
        rng.gen_range(-half_pi..half_pi),
        rng.gen_range(-half_pi..half_pi),
        a * a,
        b * b,
        c * c,
        rng.gen_range(-0.05..0.05),
    )
    .expect("constructed on the triangle")
}

/// Random drive with `η² ∈ [0, 50]`, `z̃ ∈ [−6, 6]`, `γ̃ ∈ [0.05, 1.5]`.
pub fn random_drive(rng: &mut impl Rng) -> DriveConfig {
    DriveConfig::from_eta2(
        rng.gen_range(0.0..50.0),
        rng.gen_range(-6.0..6.0),
        rng.gen_range(0.05..1.5),
    )
    .expect("finite drive")
}

/// `|a − b| / |b|`, or `|a − b|` when `b` is zero.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}
