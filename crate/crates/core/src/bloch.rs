//! Reduced-state dynamics: drift matrix, equilibrium, time evolution and
//! deviation propagation.
//!
//! The reduced state is `ρ = [[u, v], [v̄, 1−u]]` and evolves in reduced time
//! `τ` as `dx/dτ = −½ G′ x + (0, η/2, η/2)` with `x = (u, v, v̄)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{cubic_discriminant, eigen, expm_pade, vadd, vscale, vsub, Eigen, Mat3, Vec3, C64};
use crate::model::ReducedScalars;

/// Condition number of the eigenvector basis above which the exponential is
/// computed by Padé scaling and squaring instead.
pub const EIGEN_CONDITION_LIMIT: f64 = 1e8;

/// Relative eigenvalue gap below which the spectrum is treated as degenerate.
const DEGENERACY_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub u: f64,
    pub v: Complex64,
}

impl BlochVector {
    pub fn new(u: f64, v: Complex64) -> Self {
        BlochVector { u, v }
    }

    /// A vector that represents a statistical operator.
    pub fn state(u: f64, v: Complex64) -> Result<Self> {
        let b = BlochVector { u, v };
        if !u.is_finite() || !v.is_finite() {
            return Err(invalid("bloch_vector", "entries must be finite"));
        }
        if !b.is_state(1e-12) {
            return Err(invalid(
                "bloch_vector",
                format!("u = {u}, |v|² = {} is not a statistical operator", v.norm_sqr()),
            ));
        }
        Ok(b)
    }

    pub fn ground() -> Self {
        BlochVector::new(0.0, Complex64::new(0.0, 0.0))
    }

    /// `0 ≤ u ≤ 1` and `u − u² ≥ |v|²`, up to `tol`.
    pub fn is_state(&self, tol: f64) -> bool {
        self.u >= -tol && self.u <= 1.0 + tol && self.u - self.u * self.u + tol >= self.v.norm_sqr()
    }

    pub fn to_vec3(&self) -> Vec3 {
        [Complex64::new(self.u, 0.0), self.v, self.v.conj()]
    }

    /// Projects a 3-vector back onto `(u, v, v̄)` form.
    pub fn from_vec3(x: &Vec3) -> Self {
        BlochVector::new(x[0].re, 0.5 * (x[1] + x[2].conj()))
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        (self.u - other.u).abs().max((self.v - other.v).norm())
    }
}

/// The drift matrix `G′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix(pub Mat3);

impl DriftMatrix {
    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn det(&self) -> C64 {
        self.0.det()
    }

    pub fn eigenvalues(&self) -> [C64; 3] {
        self.0.eigenvalues()
    }

    /// Smallest real part of the spectrum; positive means decay to a unique
    /// equilibrium.
    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues().iter().map(|l| l.re).fold(f64::INFINITY, f64::min)
    }

    /// Real part of the discriminant of the characteristic cubic.
    pub fn discriminant(&self) -> f64 {
        cubic_discriminant(self.0.char_poly()).re
    }
}

pub fn build_drift(rs: &ReducedScalars) -> DriftMatrix {
    let eta = Complex64::new(rs.eta, 0.0);
    let s = rs.s;
    let off = 2.0 * rs.eta * s.cos();
    let z = Complex64::new(0.0, 0.0);
    DriftMatrix(Mat3::from_rows([
        [Complex64::new(2.0, 0.0), -eta, -eta],
        [Complex64::from_polar(off, s), rs.bprime, z],
        [Complex64::from_polar(off, -s), z, rs.bprime.conj()],
    ]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumState {
    pub u_inf: f64,
    pub v_inf: Complex64,
}

impl EquilibriumState {
    pub fn bloch(&self) -> BlochVector {
        BlochVector::new(self.u_inf, self.v_inf)
    }

    /// `max |G′x − (0, η, η)|` for this state.
    pub fn residual(&self, g: &DriftMatrix, eta: f64) -> f64 {
        let lhs = g.0.mul_vec(&self.bloch().to_vec3());
        let rhs = forcing(eta);
        (0..3).map(|i| (lhs[i] - rhs[i]).norm()).fold(0.0, f64::max)
    }
}

/// `u(∞) = η²κ²/(z²+ζ²)`, `v(∞) = η(κ²+iy)/(z²+ζ²)`.
pub fn equilibrium(rs: &ReducedScalars) -> EquilibriumState {
    let d = rs.denom();
    EquilibriumState {
        u_inf: rs.eta2() * rs.kappa2 / d,
        v_inf: Complex64::new(rs.kappa2, rs.y) * (rs.eta / d),
    }
}

fn forcing(eta: f64) -> Vec3 {
    [
        Complex64::new(0.0, 0.0),
        Complex64::new(eta, 0.0),
        Complex64::new(eta, 0.0),
    ]
}

/// How a [`Propagator`] evaluates the matrix exponential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpStrategy {
    Eigen,
    Pade,
}

/// `τ ↦ exp(A τ)` for a fixed generator `A`.
#[derive(Debug, Clone)]
pub struct Propagator {
    generator: Mat3,
    eigen: Option<Eigen>,
}

impl Propagator {
    pub fn new(generator: Mat3) -> Self {
        let eigen = eigen(&generator).filter(|e| {
            let scale = 1.0 + e.values.iter().map(|l| l.norm()).fold(0.0, f64::max);
            let gap = (0..3)
                .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
                .map(|(i, j)| (e.values[i] - e.values[j]).norm())
                .fold(f64::INFINITY, f64::min);
            e.condition <= EIGEN_CONDITION_LIMIT && gap > DEGENERACY_GAP * scale
        });
        Propagator { generator, eigen }
    }

    pub fn strategy(&self) -> ExpStrategy {
        if self.eigen.is_some() {
            ExpStrategy::Eigen
        } else {
            ExpStrategy::Pade
        }
    }

    pub fn at(&self, tau: f64) -> Mat3 {
        match &self.eigen {
            Some(e) => {
                let mut d = Mat3::zeros();
                for k in 0..3 {
                    d[(k, k)] = (e.values[k] * tau).exp();
                }
                e.vectors * d * e.inverse
            }
            None => expm_pade(&self.generator.scale(Complex64::new(tau, 0.0))),
        }
    }
}

/// The propagator `exp(−G′τ/2)` of the homogeneous Bloch equation.
pub fn bloch_propagator(g: &DriftMatrix) -> Propagator {
    Propagator::new(g.0.scale(Complex64::new(-0.5, 0.0)))
}

/// Fixed point of the affine flow for an arbitrary drift matrix.
fn fixed_point(g: &DriftMatrix, eta: f64) -> Result<Vec3> {
    let inv = g.0.inverse().ok_or(Error::SingularSystem)?;
    Ok(inv.mul_vec(&forcing(eta)))
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::NegativeTime(tau));
    }
    if !tau.is_finite() {
        return Err(invalid("tau", "must be finite"));
    }
    Ok(())
}

/// State at reduced time `τ` from a state `x0`.
pub fn evolve(g: &DriftMatrix, x0: &BlochVector, eta: f64, tau: f64) -> Result<BlochVector> {
    check_tau(tau)?;
    if !x0.is_state(1e-12) {
        return Err(invalid("x0", "initial vector is not a statistical operator"));
    }
    if tau == 0.0 {
        return Ok(*x0);
    }
    let eq = fixed_point(g, eta)?;
    let dev = vsub(&x0.to_vec3(), &eq);
    let moved = bloch_propagator(g).at(tau).mul_vec(&dev);
    Ok(BlochVector::from_vec3(&vadd(&eq, &moved)))
}

/// `d(τ) = e^{−γ̃τ/2} e^{−G′τ/2} d0`.
pub fn propagate_deviation(g: &DriftMatrix, gammatilde: f64, d0: &Vec3, tau: f64) -> Result<Vec3> {
    check_tau(tau)?;
    if tau == 0.0 {
        return Ok(*d0);
    }
    let damp = (-0.5 * gammatilde * tau).exp();
    Ok(vscale(
        &bloch_propagator(g).at(tau).mul_vec(d0),
        Complex64::new(damp, 0.0),
    ))
}

/// Locates a sign change of `f` in `[lo, hi]` by bisection to width `tol`.
pub fn bisect_sign_change(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    // written so that a NaN endpoint also counts as no bracket
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    let bracketed = flo * fhi < 0.0;
    if !bracketed {
        return Err(invalid(
            "bracket",
            format!("no sign change between {lo} ({flo:e}) and {hi} ({fhi:e})"),
        ));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Drift matrix with no direct scattering, on resonance.
pub fn resonant_mollow_drift(eta2: f64) -> DriftMatrix {
    let eta = eta2.sqrt();
    let c = |x: f64| Complex64::new(x, 0.0);
    DriftMatrix(Mat3::from_rows([
        [c(2.0), c(-eta), c(-eta)],
        [c(2.0 * eta), c(1.0), c(0.0)],
        [c(2.0 * eta), c(0.0), c(1.0)],
    ]))
}

/// Intensity `η²` at which the resonant, scattering-free drift matrix
/// acquires a complex-conjugate eigenvalue pair.
pub fn mollow_threshold_eta2(tol: f64) -> Result<f64> {
    bisect_sign_change(|e2| resonant_mollow_drift(e2).discriminant(), 1e-3, 1.0, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reduced_scalars, DriveConfig, ScatteringScalars};

    fn reference() -> ScatteringScalars {
        ScatteringScalars::new(-0.03, 0.13, 0.005, 0.005, 0.02, -0.001).unwrap()
    }

    fn rs(eta2: f64, zt: f64) -> ReducedScalars {
        reduced_scalars(&reference(), &DriveConfig::from_eta2(eta2, zt, 0.0).unwrap())
    }

    #[test]
    fn undriven_drift_is_diagonal() {
        let r = reduced_scalars(&ScatteringScalars::mollow(), &DriveConfig::new(0.0, 0.0, 0.0).unwrap());
        let g = build_drift(&r);
        let m = g.matrix();
        for (i, d) in [2.0, 1.0, 1.0].iter().enumerate() {
            assert_eq!(m[(i, i)], Complex64::new(*d, 0.0));
        }
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(m[(0, 2)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn resonant_mollow_entries() {
        let r = reduced_scalars(
            &ScatteringScalars::mollow(),
            &DriveConfig::from_eta2(3.0, 0.0, 0.0).unwrap(),
        );
        assert!((build_drift(&r).0 - resonant_mollow_drift(3.0).0).max_abs() < 1e-15);
    }

    #[test]
    fn structure_and_determinant() {
        let r = rs(10.0, 0.0);
        let g = build_drift(&r);
        let m = g.matrix();
        assert_eq!(m[(1, 2)], Complex64::new(0.0, 0.0));
        assert_eq!(m[(2, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(m[(2, 2)], m[(1, 1)].conj());
        assert!((m[(2, 0)] - m[(1, 0)].conj()).norm() < 1e-15);
        let det = g.det();
        assert!((det - 2.0 * r.denom()).norm() < 1e-12 * det.norm());
    }

    #[test]
    fn equilibrium_solves_stationarity() {
        let r = rs(28.0, 3.0);
        let g = build_drift(&r);
        let eq = equilibrium(&r);
        assert!(eq.residual(&g, r.eta) < 1e-12);
        // generic linear solve
        let fp = fixed_point(&g, r.eta).unwrap();
        assert!((fp[0].re - eq.u_inf).abs() < 1e-13);
        assert!((fp[1] - eq.v_inf).norm() < 1e-13);
        assert!(eq.bloch().is_state(0.0));
    }

    #[test]
    fn resonant_mollow_equilibrium() {
        let r = reduced_scalars(&ScatteringScalars::mollow(), &DriveConfig::new(1.0, 0.0, 0.0).unwrap());
        let eq = equilibrium(&r);
        assert!((eq.u_inf - 1.0 / 3.0).abs() < 1e-15);
        assert!((eq.v_inf - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
        let r0 = reduced_scalars(&ScatteringScalars::mollow(), &DriveConfig::new(0.0, 0.0, 0.0).unwrap());
        assert_eq!(equilibrium(&r0).bloch(), BlochVector::ground());
    }

    #[test]
    fn evolution_limits() {
        let r = rs(18.0, -1.0);
        let g = build_drift(&r);
        let x0 = BlochVector::ground();
        assert_eq!(evolve(&g, &x0, r.eta, 0.0).unwrap(), x0);
        let late = evolve(&g, &x0, r.eta, 200.0).unwrap();
        assert!(late.distance(&equilibrium(&r).bloch()) < 1e-10);
        let eq = equilibrium(&r).bloch();
        for tau in [0.3, 5.0, 40.0] {
            assert!(evolve(&g, &eq, r.eta, tau).unwrap().distance(&eq) < 1e-12);
        }
    }

    #[test]
    fn evolution_rejects_bad_input() {
        let r = rs(1.0, 0.0);
        let g = build_drift(&r);
        assert_eq!(
            evolve(&g, &BlochVector::ground(), r.eta, -1.0),
            Err(Error::NegativeTime(-1.0))
        );
        let bad = BlochVector::new(0.5, Complex64::new(0.9, 0.0));
        assert!(evolve(&g, &bad, r.eta, 1.0).is_err());
        assert!(BlochVector::state(0.5, Complex64::new(0.9, 0.0)).is_err());
    }

    #[test]
    fn deviation_trivial_cases() {
        let g = build_drift(&rs(5.0, 0.5));
        let zero = [Complex64::new(0.0, 0.0); 3];
        assert_eq!(propagate_deviation(&g, 0.6, &zero, 2.0).unwrap(), zero);
        let d0 = [
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        assert_eq!(propagate_deviation(&g, 0.6, &d0, 0.0).unwrap(), d0);
        assert!(propagate_deviation(&g, 0.6, &d0, -0.1).is_err());
    }

    #[test]
    fn threshold_is_one_sixteenth() {
        let t = mollow_threshold_eta2(1e-13).unwrap();
        assert!((t - 1.0 / 16.0).abs() < 1e-9, "{t}");
    }

    #[test]
    fn threshold_routes_to_pade() {
        // at the threshold two eigenvalues coincide
        let g = resonant_mollow_drift(1.0 / 16.0);
        assert_eq!(bloch_propagator(&g).strategy(), ExpStrategy::Pade);
        let g = build_drift(&rs(10.0, 0.0));
        assert_eq!(bloch_propagator(&g).strategy(), ExpStrategy::Eigen);
    }

    #[test]
    fn both_strategies_agree() {
        let g = build_drift(&rs(10.0, 0.7));
        let p = bloch_propagator(&g);
        assert_eq!(p.strategy(), ExpStrategy::Eigen);
        for tau in [0.1, 1.0, 7.5] {
            let viapade = expm_pade(&g.0.scale(Complex64::new(-0.5 * tau, 0.0)));
            assert!((p.at(tau) - viapade).max_abs() < 1e-12);
        }
    }

    #[test]
    fn decay_everywhere_on_a_grid() {
        for eta2 in [0.0, 0.01, 1.0, 10.0, 100.0] {
            for zt in [-5.0, 0.0, 3.0] {
                assert!(build_drift(&rs(eta2, zt)).spectral_abscissa() > 0.0);
            }
        }
    }
}
