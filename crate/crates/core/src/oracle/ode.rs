use num_complex::Complex64;

use crate::bloch::{BlochVector, DriftMatrix};
use crate::error::{Error, Result};
use crate::linalg::{vadd, vscale, Mat3, Vec3};

/// Largest RK4 step, in reduced time.
pub const ODE_MAX_STEP: f64 = 1e-3;

fn rk4(a: &Mat3, f: &Vec3, x0: Vec3, tau: f64) -> Vec3 {
    // x' = a x + f
    let rhs = |x: &Vec3| vadd(&a.mul_vec(x), f);
    let n = (tau / ODE_MAX_STEP).ceil().max(1.0) as usize;
    let h = tau / n as f64;
    let hc = Complex64::new(h, 0.0);
    let mut x = x0;
    for _ in 0..n {
        let k1 = rhs(&x);
        let k2 = rhs(&vadd(&x, &vscale(&k1, hc * 0.5)));
        let k3 = rhs(&vadd(&x, &vscale(&k2, hc * 0.5)));
        let k4 = rhs(&vadd(&x, &vscale(&k3, hc)));
        for i in 0..3 {
            x[i] += hc / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    x
}

/// Fixed-step RK4 on the Bloch equation.
pub fn ode_evolve(g: &DriftMatrix, eta: f64, x0: &BlochVector, tau: f64) -> Result<BlochVector> {
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::NegativeTime(tau));
    }
    if tau == 0.0 {
        return Ok(*x0);
    }
    let a = g.0.scale(Complex64::new(-0.5, 0.0));
    let f = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5 * eta, 0.0),
        Complex64::new(0.5 * eta, 0.0),
    ];
    Ok(BlochVector::from_vec3(&rk4(&a, &f, x0.to_vec3(), tau)))
}

/// Fixed-step RK4 on `d′ = −½(G′ + γ̃) d`.
pub fn ode_deviation(g: &DriftMatrix, gammatilde: f64, d0: &Vec3, tau: f64) -> Result<Vec3> {
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::NegativeTime(tau));
    }
    let a =
        g.0.shift(Complex64::new(gammatilde, 0.0))
            .scale(Complex64::new(-0.5, 0.0));
    Ok(rk4(&a, &[Complex64::new(0.0, 0.0); 3], *d0, tau))
}
