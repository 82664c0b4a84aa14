//! Fluorescence spectra in the reduced frequency `x` (offset from the laser
//! frequency in units of the line width, halved).
//!
//! The inelastic part is a bilinear form of the resolvent `(G̃ + 2ix)⁻¹`; the
//! elastic part is a Lorentzian of instrumental width `γ̃` centred at `x = 0`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inner, Mat3, Vec3, C64};
use crate::model::{
    delta_g, g_pm, reduced_scalars, scalars_from_phase_shifts, DriveConfig, PhaseShiftTable, ReducedScalars,
    ScatteringScalars,
};
use crate::quad::{integrate_real_line, QuadResult, Tolerance};
use crate::xsection::sigma_el_reduced;

const ZERO: C64 = C64::new(0.0, 0.0);

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The spectral drift matrix `G̃`, similar to `G′ + γ̃` via `diag(η, 1, −η²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDrift {
    matrix: Mat3,
    kappa2: f64,
    /// `w = z + (η²/2) sin 2s = −Im b′`
    w: f64,
    eta2: f64,
    s: f64,
    gammatilde: f64,
}

impl SpectralDrift {
    pub fn new(rs: &ReducedScalars, gammatilde: f64) -> Self {
        let s = rs.s;
        let eta2 = rs.eta2();
        let g = c(gammatilde);
        let matrix = Mat3::from_rows([
            [c(2.0) + g, c(-1.0), c(eta2)],
            [C64::from_polar(2.0 * eta2 * s.cos(), s), rs.bprime + g, ZERO],
            [C64::from_polar(-2.0 * s.cos(), -s), ZERO, rs.bprime.conj() + g],
        ]);
        SpectralDrift {
            matrix,
            kappa2: rs.bprime.re,
            w: -rs.bprime.im,
            eta2,
            s,
            gammatilde,
        }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    /// `det(G̃ + 2ix)` in closed form.
    pub fn det(&self, x: f64) -> C64 {
        let (k, w, s) = (self.kappa2, self.w, self.s);
        let a = C64::new(k + self.gammatilde, 2.0 * x);
        let b = C64::new(2.0 + self.gammatilde, 2.0 * x);
        b * (a * a + w * w) + 4.0 * self.eta2 * s.cos() * (a * s.cos() - w * s.sin())
    }

    /// Rows 1 and 3 of the adjugate of `G̃ + 2ix`.
    pub fn adjugate_rows_1_3(&self, x: f64) -> (Vec3, Vec3) {
        let (k, w, s, e2) = (self.kappa2, self.w, self.s, self.eta2);
        let g = self.gammatilde;
        let a = C64::new(k + g, 2.0 * x);
        let minus = C64::new(k + g, 2.0 * x - w);
        let cs = C64::from_polar(2.0 * s.cos(), -s);
        let row1 = [a * a + w * w, C64::new(k + g, 2.0 * x + w), -e2 * minus];
        let row3 = [
            cs * minus,
            cs,
            C64::new(2.0 + g, 2.0 * x) * minus + C64::from_polar(2.0 * e2 * s.cos(), s),
        ];
        (row1, row3)
    }

    fn checked_det(&self, x: f64) -> Result<C64> {
        let det = self.det(x);
        if !det.is_finite() || det.norm() < f64::MIN_POSITIVE {
            return Err(Error::SingularResolvent { x, det: det.norm() });
        }
        Ok(det)
    }
}

/// `(G̃ + 2ix)⁻¹`: rows 1 and 3 from the closed-form adjugate, row 2 from
/// cofactors.
pub fn resolvent(g: &SpectralDrift, x: f64) -> Result<Mat3> {
    let det = g.checked_det(x)?;
    let (r1, r3) = g.adjugate_rows_1_3(x);
    let shifted = g.matrix.shift(C64::new(0.0, 2.0 * x));
    let r2 = [shifted.cofactor(0, 1), shifted.cofactor(1, 1), shifted.cofactor(2, 1)];
    let inv = det.inv();
    let mut m = Mat3::from_rows([r1, r2, r3]);
    m = m.scale(inv);
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralCoefficients {
    pub cprime: Vec3,
    pub cdoubleprime: Vec3,
    pub dprime: Vec3,
    pub ddoubleprime: Vec3,
    pub mprime: C64,
}

impl SpectralCoefficients {
    pub fn new(rs: &ReducedScalars) -> Self {
        let (s, y, k2, d, e2) = (rs.s, rs.y, rs.kappa2, rs.denom(), rs.eta2());
        let es_sin = C64::from_polar(s.sin(), s);
        let ky = C64::new(k2, y);
        let mprime = ky + C64::i() * (d - e2 * k2) * es_sin;
        let dprime = [
            k2 * mprime,
            ky * mprime,
            c(rs.norm2_dg * (y * y + k2 * k2) + k2 * y * (2.0 * s).sin() + 2.0 * k2 * k2 * s.cos().powi(2))
                + C64::i() * k2 * ky.conj() * es_sin,
        ];
        let q = d - e2 * k2;
        SpectralCoefficients {
            cprime: [C64::i() * es_sin, ZERO, c(1.0)],
            cdoubleprime: [c(1.0), ZERO, ZERO],
            dprime,
            ddoubleprime: [c(k2 * q), ky * q, k2 * ky.conj()],
            mprime,
        }
    }
}

/// Precomputed inelastic spectrum for one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct InelasticSpectrum {
    drift: SpectralDrift,
    coeffs: SpectralCoefficients,
    prefactor: f64,
    norm2_pdg: f64,
}

impl InelasticSpectrum {
    pub fn new(sc: &ScatteringScalars, dc: &DriveConfig) -> Self {
        Self::from_reduced(&reduced_scalars(sc, dc), dc.gammatilde())
    }

    pub fn from_reduced(rs: &ReducedScalars, gammatilde: f64) -> Self {
        let d = rs.denom();
        InelasticSpectrum {
            drift: SpectralDrift::new(rs, gammatilde),
            coeffs: SpectralCoefficients::new(rs),
            prefactor: rs.eta2() / (PI * d * d),
            norm2_pdg: rs.norm2_pdg,
        }
    }

    pub fn drift(&self) -> &SpectralDrift {
        &self.drift
    }

    pub fn coefficients(&self) -> &SpectralCoefficients {
        &self.coeffs
    }

    /// `Σ_inel(x)`.
    pub fn at(&self, x: f64) -> Result<f64> {
        if self.prefactor == 0.0 {
            return Ok(0.0);
        }
        let det = self.drift.checked_det(x)?;
        let (r1, r3) = self.drift.adjugate_rows_1_3(x);
        let k = &self.coeffs;
        let dot = |r: &Vec3, d: &Vec3| r[0] * d[0] + r[1] * d[1] + r[2] * d[2];
        // c′ = (c′₁, 0, 1), c″ = (1, 0, 0)
        let main = k.cprime[0].conj() * dot(&r1, &k.dprime) + dot(&r3, &k.dprime);
        let perp = dot(&r1, &k.ddoubleprime) * self.norm2_pdg;
        Ok(self.prefactor * 2.0 * ((main + perp) / det).re)
    }

    /// Same quantity via the full resolvent (three bilinear forms).
    pub fn at_full(&self, x: f64) -> Result<f64> {
        let r = resolvent(&self.drift, x)?;
        let k = &self.coeffs;
        let v = inner(&k.cprime, &r.mul_vec(&k.dprime))
            + inner(&k.cdoubleprime, &r.mul_vec(&k.ddoubleprime)) * self.norm2_pdg;
        Ok(self.prefactor * 2.0 * v.re)
    }
}

pub fn sigma_inel_x(sc: &ScatteringScalars, dc: &DriveConfig, x: f64) -> Result<f64> {
    InelasticSpectrum::new(sc, dc).at(x)
}

/// The elastic component: a line of total weight `σ_el` at `x = center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElasticLine {
    pub weight: f64,
    pub center: f64,
}

impl ElasticLine {
    /// Lorentzian of full width `γ̃` and unit area, times the weight.
    pub fn lorentzian(&self, gammatilde: f64, x: f64) -> Result<f64> {
        if gammatilde <= 0.0 {
            return Err(Error::ZeroInstrumentalWidth);
        }
        let h = 0.5 * gammatilde;
        Ok(self.weight * (gammatilde / (2.0 * PI)) / ((x - self.center).powi(2) + h * h))
    }
}

pub fn elastic_line(sc: &ScatteringScalars, dc: &DriveConfig) -> ElasticLine {
    ElasticLine {
        weight: sigma_el_reduced(sc, &reduced_scalars(sc, dc)),
        center: 0.0,
    }
}

/// Total spectrum, elastic Lorentzian plus inelastic part.
#[derive(Debug, Clone, Copy)]
pub struct TotalSpectrum {
    pub inelastic: InelasticSpectrum,
    pub elastic: ElasticLine,
    gammatilde: f64,
}

impl TotalSpectrum {
    pub fn new(sc: &ScatteringScalars, dc: &DriveConfig) -> Result<Self> {
        Self::from_reduced(sc, &reduced_scalars(sc, dc), dc.gammatilde())
    }

    pub fn from_reduced(sc: &ScatteringScalars, rs: &ReducedScalars, gammatilde: f64) -> Result<Self> {
        if gammatilde <= 0.0 {
            return Err(Error::ZeroInstrumentalWidth);
        }
        Ok(TotalSpectrum {
            inelastic: InelasticSpectrum::from_reduced(rs, gammatilde),
            elastic: ElasticLine {
                weight: sigma_el_reduced(sc, rs),
                center: 0.0,
            },
            gammatilde,
        })
    }

    pub fn elastic_at(&self, x: f64) -> f64 {
        self.elastic
            .lorentzian(self.gammatilde, x)
            .expect("width checked at construction")
    }

    pub fn at(&self, x: f64) -> Result<f64> {
        Ok(self.elastic_at(x) + self.inelastic.at(x)?)
    }
}

pub fn sigma_tot_x(sc: &ScatteringScalars, dc: &DriveConfig, x: f64) -> Result<f64> {
    TotalSpectrum::new(sc, dc)?.at(x)
}

/// Closed-form inelastic spectrum with no direct scattering.
pub fn mollow_inel_x(ztilde: f64, eta: f64, gammatilde: f64, x: f64) -> f64 {
    let z = 2.0 * ztilde;
    let (e2, g, x2, z2) = (eta * eta, gammatilde, x * x, z * z);
    let p = (2.0 + g) * ((1.0 + g).powi(2) + 2.0 * e2 + z2) * ((2.0 + g).powi(2) + 2.0 * e2 + 4.0 * x2)
        + 2.0 * g * (2.0 * (2.0 * x2 - e2).powi(2) + (2.0 + g).powi(2) * (2.0 * x2 + e2));
    let q1 = (2.0 + g) * ((1.0 + g).powi(2) + z2) + 4.0 * (1.0 + g) * e2 - 4.0 * (4.0 + 3.0 * g) * x2;
    let q2 = 3.0 * g * g + 8.0 * g + 5.0 + z2 + 4.0 * e2 - 4.0 * x2;
    let q = q1 * q1 + 4.0 * x2 * q2 * q2;
    4.0 * e2 * p / (PI * q * (z2 + 1.0 + 2.0 * e2).powi(2))
}

/// Weak-drive asymptotic form of the inelastic spectrum.
pub fn low_intensity_x(sc: &ScatteringScalars, ztilde: f64, gammatilde: f64, eta: f64, x: f64) -> f64 {
    let (s, p, zt, g) = (sc.s(), sc.norm2_pdg(), ztilde, gammatilde);
    let e2 = eta * eta;
    let cc = (2.0 * zt * s.sin() + s.cos()).powi(2);
    let l = zt * zt + 0.25;
    let lp = 4.0 * (x + zt).powi(2) + (1.0 + g).powi(2);
    let lm = 4.0 * (x - zt).powi(2) + (1.0 + g).powi(2);
    let t1 = e2 / (2.0 * PI) * (p * (1.0 + g) / l + g * cc / (4.0 * l * l)) * (1.0 / lp + 1.0 / lm);
    let t2 = 2.0 * e2 * cc * (zt * zt + (1.0 + g).powi(2) / 4.0) / (PI * l * l * lp * lm);
    t1 + t2
}

/// Angular-resolved amplitudes at one polar angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularSpectralData {
    pub a_theta: C64,
    pub c_theta: Vec3,
    pub d_theta: Vec3,
    pub m_theta: C64,
}

impl AngularSpectralData {
    pub fn new(t: &PhaseShiftTable, dc: &DriveConfig, theta: f64) -> Self {
        let sc = scalars_from_phase_shifts(t);
        let rs = reduced_scalars(&sc, dc);
        let (_, gm) = g_pm(t, theta);
        Self::from_parts(&rs, sc.delta0_minus(), gm, delta_g(t, theta))
    }

    /// Built from the reduced scalars, `δ₀⁻`, `g₋(θ)` and `Δg(θ)`.
    pub fn from_parts(rs: &ReducedScalars, delta0_minus: f64, gm: C64, dg: C64) -> Self {
        let (e2, k2, y, s, d, eta) = (rs.eta2(), rs.kappa2, rs.y, rs.s, rs.denom(), rs.eta);
        let r4pi = (4.0 * PI).sqrt();
        let e2d = C64::from_polar(1.0, 2.0 * delta0_minus);
        let ky = C64::new(k2, y);
        let a_theta = gm + dg * (e2 * k2 / d) - e2d * ky / (r4pi * d);
        let m_theta = dg * (1.0 - e2 * k2 / d) + e2d * ky / (r4pi * d);
        let kk = rs.norm2_dg * (y * y + k2 * k2) + k2 * y * (2.0 * s).sin() + 2.0 * k2 * k2 * s.cos().powi(2);
        let d3 = -(e2 / (d * d)) * (e2d * (kk / r4pi) + dg * k2 * ky.conj());
        AngularSpectralData {
            a_theta,
            c_theta: [dg * eta, ZERO, -e2d / r4pi],
            d_theta: [m_theta * (eta * k2 / d), m_theta * ky / d, d3],
            m_theta,
        }
    }

    /// Weight of the elastic line per unit solid angle.
    pub fn elastic_weight(&self) -> f64 {
        self.a_theta.norm_sqr()
    }

    /// Inelastic density per unit solid angle at frequency `x`, given the
    /// drift matrix `G′` and width `γ̃`.
    pub fn inelastic_density(&self, g_prime: &Mat3, gammatilde: f64, x: f64) -> Result<f64> {
        let shifted = g_prime.shift(C64::new(gammatilde, 2.0 * x));
        let det = shifted.det();
        if !det.is_finite() || det.norm() < f64::MIN_POSITIVE {
            return Err(Error::SingularResolvent { x, det: det.norm() });
        }
        let r = shifted.adjugate().scale(det.inv());
        Ok(2.0 / PI * inner(&self.c_theta, &r.mul_vec(&self.d_theta)).re)
    }
}

/// `(elastic density, inelastic density)` per unit solid angle at `(θ, x)`.
pub fn spectral_diff(t: &PhaseShiftTable, dc: &DriveConfig, theta: f64, x: f64) -> Result<(f64, f64)> {
    if dc.gammatilde() <= 0.0 {
        return Err(Error::ZeroInstrumentalWidth);
    }
    let sc = scalars_from_phase_shifts(t);
    let rs = reduced_scalars(&sc, dc);
    let data = AngularSpectralData::new(t, dc, theta);
    let g = crate::bloch::build_drift(&rs);
    let line = ElasticLine {
        weight: data.elastic_weight(),
        center: 0.0,
    };
    Ok((
        line.lorentzian(dc.gammatilde(), x)?,
        data.inelastic_density(g.matrix(), dc.gammatilde(), x)?,
    ))
}

/// Half-width of the directly integrated frequency window.
pub fn integration_half_width(eta: f64, ztilde: f64) -> f64 {
    200f64.max(10.0 * eta + 10.0 * ztilde.abs())
}

/// Points where the spectra can have sharp structure.
pub fn spectral_breakpoints(eta: f64, ztilde: f64) -> Vec<f64> {
    let rabi = (eta * eta + ztilde * ztilde).sqrt();
    let mut b = vec![0.0, eta, -eta, ztilde, -ztilde, rabi, -rabi];
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn integrate_spectrum(f: impl Fn(f64) -> Result<f64>, dc: &DriveConfig, tol: Tolerance) -> Result<QuadResult> {
    let failure = std::cell::Cell::new(None);
    let r = integrate_real_line(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        },
        integration_half_width(dc.eta(), dc.ztilde()),
        &spectral_breakpoints(dc.eta(), dc.ztilde()),
        tol,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    r
}

/// `∫ Σ_inel(x) dx` over the real line.
pub fn integrate_inelastic(spec: &InelasticSpectrum, dc: &DriveConfig, tol: Tolerance) -> Result<QuadResult> {
    integrate_spectrum(|x| spec.at(x), dc, tol)
}

/// `∫ Σ_TOT(x) dx` over the real line.
pub fn integrate_total(spec: &TotalSpectrum, dc: &DriveConfig, tol: Tolerance) -> Result<QuadResult> {
    integrate_spectrum(|x| spec.at(x), dc, tol)
}

/// A local maximum of a sampled function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub x: f64,
    pub value: f64,
}

/// Local maxima of `f` on `[lo, hi]`: coarse scan on `n` points, then
/// golden-section refinement of each bracket to width `tol`.
pub fn find_peaks(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, tol: f64) -> Vec<Peak> {
    assert!(n >= 3 && hi > lo);
    let h = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        if ys[i] > ys[i - 1] && ys[i] >= ys[i + 1] {
            let x = golden_max(&f, xs[i - 1], xs[i + 1], tol);
            peaks.push(Peak { x, value: f(x) });
        }
    }
    peaks
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::build_drift;
    use crate::linalg::{solve_dense, Mat3};
    use crate::xsection::{cross_sections, sigma_inel};

    fn reference() -> ScatteringScalars {
        ScatteringScalars::new(-0.03, 0.13, 0.005, 0.005, 0.02, -0.001).unwrap()
    }

    fn dc(eta2: f64, zt: f64, gt: f64) -> DriveConfig {
        DriveConfig::from_eta2(eta2, zt, gt).unwrap()
    }

    fn generic_inverse(m: &Mat3) -> Mat3 {
        let rows: Vec<Vec<C64>> = (0..3).map(|i| m.row(i).to_vec()).collect();
        let mut cols = [[ZERO; 3]; 3];
        for (j, col) in cols.iter_mut().enumerate() {
            let mut e = vec![ZERO; 3];
            e[j] = c(1.0);
            let x = solve_dense(rows.clone(), e).unwrap();
            col.copy_from_slice(&x);
        }
        Mat3::from_cols(cols)
    }

    #[test]
    fn resolvent_matches_generic_inverse() {
        let rs = reduced_scalars(&reference(), &dc(18.0, 1.5, 0.6));
        let g = SpectralDrift::new(&rs, 0.6);
        for x in [-7.0, -0.3, 0.0, 2.2, 40.0] {
            let r = resolvent(&g, x).unwrap();
            let gi = generic_inverse(&g.matrix().shift(C64::new(0.0, 2.0 * x)));
            assert!((r - gi).max_abs() < 1e-12);
        }
    }

    #[test]
    fn decoupled_resolvent() {
        let rs = reduced_scalars(&ScatteringScalars::mollow(), &dc(0.0, 0.8, 0.6));
        let g = SpectralDrift::new(&rs, 0.6);
        let x = 0.4;
        let r = resolvent(&g, x).unwrap();
        let ix = C64::new(0.6, 2.0 * x);
        assert!((r[(0, 0)] - (c(2.0) + ix).inv()).norm() < 1e-15);
        assert!((r[(1, 1)] - (rs.bprime + ix).inv()).norm() < 1e-15);
        assert!((r[(2, 2)] - (rs.bprime.conj() + ix).inv()).norm() < 1e-15);
    }

    #[test]
    fn determinant_closed_form() {
        let rs = reduced_scalars(&reference(), &dc(28.0, -2.0, 0.3));
        let g = SpectralDrift::new(&rs, 0.3);
        for x in [-3.0, 0.5, 9.0] {
            let direct = g.matrix().shift(C64::new(0.0, 2.0 * x)).det();
            assert!((direct - g.det(x)).norm() < 1e-12 * direct.norm());
        }
    }

    #[test]
    fn similarity_to_drift() {
        let rs = reduced_scalars(&reference(), &dc(10.0, 0.3, 0.6));
        let gt = SpectralDrift::new(&rs, 0.6);
        let gp = build_drift(&rs);
        let mut a: Vec<C64> = gt.matrix().eigenvalues().to_vec();
        let mut b: Vec<C64> = gp.eigenvalues().iter().map(|l| l + 0.6).collect();
        let key = |v: &C64| (v.im * 1e6).round() as i64;
        a.sort_by_key(key);
        b.sort_by_key(key);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn printed_and_full_paths_agree() {
        let spec = InelasticSpectrum::new(&reference(), &dc(28.0, 3.0, 0.6));
        for x in [-8.0, -1.0, 0.0, 0.7, 5.3] {
            let a = spec.at(x).unwrap();
            let b = spec.at_full(x).unwrap();
            assert!((a - b).abs() < 1e-13 * a.abs().max(1e-3));
        }
    }

    #[test]
    fn undriven_spectrum_vanishes() {
        let spec = InelasticSpectrum::new(&reference(), &dc(0.0, 1.0, 0.6));
        assert_eq!(spec.at(0.3).unwrap(), 0.0);
    }

    #[test]
    fn mirror_symmetry() {
        let sc = reference();
        let m = sc.with_s_negated();
        for (zt, x) in [(0.0, 1.0), (2.0, -3.5), (-1.0, 0.2)] {
            let a = sigma_inel_x(&sc, &dc(18.0, zt, 0.6), x).unwrap();
            let b = sigma_inel_x(&m, &dc(18.0, -zt, 0.6), -x).unwrap();
            assert!((a - b).abs() < 1e-12 * a.abs().max(1e-6));
        }
    }

    #[test]
    fn mollow_closed_form() {
        let sc = ScatteringScalars::mollow();
        for zt in [-2.0, 0.0, 0.5, 3.0] {
            for x in [-10.0, -1.0, 0.0, 0.3, 4.0] {
                let a = sigma_inel_x(&sc, &dc(4.0, zt, 0.6), x).unwrap();
                let b = mollow_inel_x(zt, 2.0, 0.6, x);
                assert!((a - b).abs() < 1e-10 * b);
                assert_eq!(mollow_inel_x(zt, 2.0, 0.6, x), mollow_inel_x(zt, 2.0, 0.6, -x));
            }
        }
    }

    #[test]
    fn total_spectrum_requires_width() {
        assert_eq!(
            sigma_tot_x(&reference(), &dc(10.0, 0.0, 0.0), 0.0),
            Err(Error::ZeroInstrumentalWidth)
        );
        let v = sigma_tot_x(&reference(), &dc(10.0, 0.0, 0.6), 100.0).unwrap();
        assert!(v > 0.0 && v < 1e-4);
    }

    #[test]
    fn normalization() {
        let sc = reference();
        let d = dc(28.0, 3.0, 0.6);
        let tol = Tolerance {
            abs: 1e-13,
            rel: 1e-9,
            ..Tolerance::default()
        };
        let inel = integrate_inelastic(&InelasticSpectrum::new(&sc, &d), &d, tol).unwrap();
        let cs = cross_sections(&sc, &d);
        assert!((inel.value - cs.inelastic).abs() < 1e-7 * cs.inelastic);
        let tot = integrate_total(&TotalSpectrum::new(&sc, &d).unwrap(), &d, tol).unwrap();
        assert!((tot.value - cs.total).abs() < 1e-7 * cs.total);
    }

    #[test]
    fn weak_drive_form_symmetries() {
        let sc = reference();
        let m = sc.with_s_negated();
        for (zt, x) in [(0.5, 1.0), (-1.0, 0.3)] {
            let a = low_intensity_x(&sc, zt, 0.6, 0.01, x);
            assert!((a - low_intensity_x(&sc, zt, 0.6, 0.01, -x)).abs() < 1e-15 * a);
            assert!((a - low_intensity_x(&m, -zt, 0.6, 0.01, x)).abs() < 1e-15 * a);
        }
    }

    #[test]
    fn weak_drive_ratio() {
        let sc = reference();
        let eta2 = 1e-5;
        let a = sigma_inel_x(&sc, &dc(eta2, 1.0, 0.6), 0.5).unwrap();
        let b = low_intensity_x(&sc, 1.0, 0.6, eta2.sqrt(), 0.5);
        assert!((a / b - 1.0).abs() < 1e-3);
        assert!(sigma_inel(&sc, &dc(eta2, 1.0, 0.6)) > 0.0);
    }

    #[test]
    fn angular_densities_integrate() {
        let t = PhaseShiftTable::new(vec![0.2, 0.05, -0.1, 0.03], vec![-0.1, 0.12, 0.04, 0.0]).unwrap();
        let sc = scalars_from_phase_shifts(&t);
        let d = dc(5.0, 0.7, 0.6);
        let (mu, w) = crate::quad::gauss_legendre(64);
        let cs = cross_sections(&sc, &d);
        let el: f64 = mu
            .iter()
            .zip(&w)
            .map(|(m, w)| w * AngularSpectralData::new(&t, &d, m.acos()).elastic_weight())
            .sum::<f64>()
            * 2.0
            * PI;
        assert!((el - cs.elastic).abs() < 1e-10);
        for x in [0.0, 1.3, -2.2] {
            let v: f64 = mu
                .iter()
                .zip(&w)
                .map(|(m, w)| w * spectral_diff(&t, &d, m.acos(), x).unwrap().1)
                .sum::<f64>()
                * 2.0
                * PI;
            let r = sigma_inel_x(&sc, &d, x).unwrap();
            assert!((v - r).abs() < 1e-10 * r);
        }
    }

    #[test]
    fn weak_drive_elastic_amplitude() {
        let t = PhaseShiftTable::new(vec![0.1, 0.05], vec![0.2, -0.1]).unwrap();
        let d = dc(0.0, 0.4, 0.6);
        for th in [0.0, 1.0, 3.0] {
            let a = AngularSpectralData::new(&t, &d, th).elastic_weight();
            assert!((a - crate::xsection::sigma_diff(&t, &d, th)).abs() < 1e-15);
        }
    }

    #[test]
    fn triplet_peaks() {
        let spec = InelasticSpectrum::new(&ScatteringScalars::mollow(), &dc(100.0, 0.0, 0.01));
        let peaks = find_peaks(|x| spec.at(x).unwrap(), -15.0, 15.0, 3001, 1e-8);
        assert_eq!(peaks.len(), 3);
        assert!((peaks[0].x + 10.0).abs() < 0.5);
        assert!(peaks[1].x.abs() < 1e-6);
        assert!((peaks[2].x - 10.0).abs() < 0.5);
    }
}
