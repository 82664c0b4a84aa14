//! Inelastic spectrum as a Laplace transform in time, built from the
//! angular-resolved amplitudes instead of the closed-form coefficients.
//!
//! Integrating `c̄(θ) ⊗ d(θ)` over directions needs only `∫|Δg|² dΩ` and
//! `∫Δg dΩ`, since `d(θ)` is affine in `Δg(θ)`. The resulting moment columns
//! are propagated with `exp(−(G′ + γ̃ + 2ix)τ)` by RK4 and the transient is
//! accumulated alongside until it has decayed.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bloch::build_drift;
use crate::error::{Error, Result};
use crate::linalg::{vnorm, Mat3, Vec3, C64};
use crate::model::{delta_g_swave, reduced_scalars, DriveConfig, ReducedScalars, ScatteringScalars};
use crate::spectrum::AngularSpectralData;

/// Relative size of the transient at which propagation stops.
const DECAY_TARGET: f64 = 1e-13;
/// Step size times the generator norm.
const STEP_SCALE: f64 = 0.02;
const MAX_STEPS: usize = 20_000_000;

/// `∫ c̄_k(θ) d(θ) dΩ` for `k = 1, 3` (the second component of `c` is zero).
fn moment_columns(rs: &ReducedScalars, delta0_plus: f64, delta0_minus: f64) -> [Vec3; 2] {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    // d(θ) = a Δg(θ) + b, read off from two evaluations of the affine map
    let at = |dg: C64| AngularSpectralData::from_parts(rs, delta0_minus, zero, dg).d_theta;
    let b = at(zero);
    let ab = at(one);
    let a: Vec3 = [ab[0] - b[0], ab[1] - b[1], ab[2] - b[2]];
    let r4pi = (4.0 * PI).sqrt();
    let swave = delta_g_swave(delta0_plus, delta0_minus);
    let norm2 = rs.norm2_dg;
    // ∫Δg dΩ = √(4π) Δ₀ and ∫|Δg|² dΩ = ‖Δg‖²
    let int_dg = swave * r4pi;
    let eta = rs.eta;
    let c3 = -Complex64::from_polar(1.0, -2.0 * delta0_minus) / r4pi;
    let mut col1 = [zero; 3];
    let mut col3 = [zero; 3];
    for j in 0..3 {
        col1[j] = eta * (a[j] * norm2 + b[j] * int_dg.conj());
        col3[j] = c3 * (a[j] * int_dg + b[j] * (4.0 * PI));
    }
    [col1, col3]
}

/// `∫₀^∞ exp(−Aτ) v dτ` by RK4 on the augmented system `(y, I)`.
fn laplace_rk4(a: &Mat3, v: &Vec3) -> Result<Vec3> {
    let v0 = vnorm(v);
    let zero = [Complex64::new(0.0, 0.0); 3];
    if v0 == 0.0 {
        return Ok(zero);
    }
    let h = STEP_SCALE / a.norm1().max(1e-3);
    let hc = Complex64::new(h, 0.0);
    let neg = a.scale(Complex64::new(-1.0, 0.0));
    let mut y = *v;
    let mut acc = zero;
    let step = |y: &Vec3, k: &Vec3, f: f64| -> Vec3 {
        let mut out = *y;
        for i in 0..3 {
            out[i] += k[i] * (hc * f);
        }
        out
    };
    for n in 0..MAX_STEPS {
        // y' = −A y, I' = y; the I-stages are the y-values at the stage points
        let k1 = neg.mul_vec(&y);
        let y2 = step(&y, &k1, 0.5);
        let k2 = neg.mul_vec(&y2);
        let y3 = step(&y, &k2, 0.5);
        let k3 = neg.mul_vec(&y3);
        let y4 = step(&y, &k3, 1.0);
        let k4 = neg.mul_vec(&y4);
        for i in 0..3 {
            acc[i] += hc / 6.0 * (y[i] + 2.0 * y2[i] + 2.0 * y3[i] + y4[i]);
            y[i] += hc / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let norm = vnorm(&y);
        if !norm.is_finite() {
            return Err(Error::NoDecay {
                tau: n as f64 * h,
                norm,
            });
        }
        if norm < DECAY_TARGET * v0 {
            return Ok(acc);
        }
    }
    Err(Error::NoDecay {
        tau: MAX_STEPS as f64 * h,
        norm: vnorm(&y),
    })
}

/// Time-domain evaluation of `Σ_inel(x)`.
pub fn spectrum_time_domain(sc: &ScatteringScalars, dc: &DriveConfig, x: f64) -> Result<f64> {
    spectrum_time_domain_reduced(sc, &reduced_scalars(sc, dc), dc.gammatilde(), x)
}

pub fn spectrum_time_domain_reduced(
    sc: &ScatteringScalars,
    rs: &ReducedScalars,
    gammatilde: f64,
    x: f64,
) -> Result<f64> {
    let g = build_drift(rs);
    let a = g.matrix().shift(Complex64::new(gammatilde, 2.0 * x));
    let [col1, col3] = moment_columns(rs, sc.delta0_plus(), sc.delta0_minus());
    let i1 = laplace_rk4(&a, &col1)?;
    let i3 = laplace_rk4(&a, &col3)?;
    Ok(2.0 / PI * (i1[0] + i3[2]).re)
}
