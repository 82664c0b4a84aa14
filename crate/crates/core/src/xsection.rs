//! Differential and integral cross sections, all as the dimensionless
//! `ω²σ/(6πc²)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::model::{
    g_pm, reduced_scalars, scalars_from_phase_shifts, DriveConfig, PhaseShiftTable, ReducedScalars, ScatteringScalars,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossSectionTriple {
    pub total: f64,
    pub elastic: f64,
    pub inelastic: f64,
    /// Auxiliary `A` of the total cross section.
    pub aux_a: f64,
    /// Auxiliary `B = (1+η²+η²‖P⊥Δg‖²)(1+η²‖P⊥Δg‖²)`.
    pub aux_b: f64,
    /// Auxiliary `E(y) = (y sin s + κ² cos s)² + ‖P⊥Δg‖²(y²+κ⁴)`.
    pub aux_e: f64,
}

impl CrossSectionTriple {
    /// `|el + inel − tot| / tot`.
    pub fn sum_rule_residual(&self) -> f64 {
        (self.elastic + self.inelastic - self.total).abs() / self.total.abs()
    }
}

fn aux_a(sc: &ScatteringScalars, rs: &ReducedScalars) -> f64 {
    let p = rs.norm2_pdg;
    sc.delta0_plus().sin().powi(2)
        + rs.kappa2 * sc.norm2_g_plus()
        + p * (1.0 + rs.eta2() * (1.0 + p) * sc.delta0_minus().sin().powi(2))
}

fn aux_b(rs: &ReducedScalars) -> f64 {
    let e2p = rs.eta2() * rs.norm2_pdg;
    (1.0 + rs.eta2() + e2p) * (1.0 + e2p)
}

fn aux_e(rs: &ReducedScalars) -> f64 {
    let (s, y, k2) = (rs.s, rs.y, rs.kappa2);
    (y * s.sin() + k2 * s.cos()).powi(2) + rs.norm2_pdg * (y * y + k2 * k2)
}

/// Total cross section in the form with the Fano numerator made explicit.
pub fn sigma_tot_reduced(sc: &ScatteringScalars, rs: &ReducedScalars) -> f64 {
    let d = rs.denom();
    let dm = sc.delta0_minus();
    let fano = (rs.z * dm.sin() - dm.cos()).powi(2);
    let v = (fano + rs.eta2() * aux_a(sc, rs)) / d + sc.norm2_pg_minus() * (rs.z * rs.z + aux_b(rs)) / d;
    debug_assert!({
        let alt = sigma_tot_expanded_reduced(sc, rs);
        (v - alt).abs() <= 1e-10 * v.abs().max(alt.abs()) + 1e-14
    });
    v
}

/// Total cross section, expanded form (used as a cross-check).
pub fn sigma_tot_expanded_reduced(sc: &ScatteringScalars, rs: &ReducedScalars) -> f64 {
    let d = rs.denom();
    let (gp, gm) = (sc.norm2_g_plus(), sc.norm2_g_minus());
    let dm = sc.delta0_minus();
    gm + rs.kappa2 / d * (1.0 + rs.eta2() * (gp - gm))
        - (rs.y * (2.0 * dm).sin() + 2.0 * rs.kappa2 * dm.sin().powi(2)) / d
}

pub fn sigma_el_reduced(sc: &ScatteringScalars, rs: &ReducedScalars) -> f64 {
    let d = rs.denom();
    let a = rs.z * rs.z + aux_b(rs);
    let b = rs.eta2() * rs.kappa2;
    let perp = (a * a * sc.norm2_pg_minus() + b * b * sc.norm2_pg_plus() + 2.0 * a * b * sc.cross_pg()) / (d * d);
    let dm = sc.delta0_minus();
    let swave = Complex64::from_polar(dm.sin(), -dm)
        + (Complex64::from_polar(b * rs.s.sin(), rs.s) - rs.y + Complex64::new(0.0, rs.kappa2)) / d;
    perp + swave.norm_sqr()
}

pub fn sigma_inel_reduced(rs: &ReducedScalars) -> f64 {
    let d = rs.denom();
    rs.eta2() * (1.0 + rs.kappa2) * aux_e(rs) / (d * d)
}

pub fn sigma_tot(sc: &ScatteringScalars, dc: &DriveConfig) -> f64 {
    sigma_tot_reduced(sc, &reduced_scalars(sc, dc))
}

pub fn sigma_tot_expanded(sc: &ScatteringScalars, dc: &DriveConfig) -> f64 {
    sigma_tot_expanded_reduced(sc, &reduced_scalars(sc, dc))
}

pub fn sigma_el(sc: &ScatteringScalars, dc: &DriveConfig) -> f64 {
    sigma_el_reduced(sc, &reduced_scalars(sc, dc))
}

pub fn sigma_inel(sc: &ScatteringScalars, dc: &DriveConfig) -> f64 {
    sigma_inel_reduced(&reduced_scalars(sc, dc))
}

pub fn cross_sections_reduced(sc: &ScatteringScalars, rs: &ReducedScalars) -> CrossSectionTriple {
    CrossSectionTriple {
        total: sigma_tot_reduced(sc, rs),
        elastic: sigma_el_reduced(sc, rs),
        inelastic: sigma_inel_reduced(rs),
        aux_a: aux_a(sc, rs),
        aux_b: aux_b(rs),
        aux_e: aux_e(rs),
    }
}

pub fn cross_sections(sc: &ScatteringScalars, dc: &DriveConfig) -> CrossSectionTriple {
    cross_sections_reduced(sc, &reduced_scalars(sc, dc))
}

/// Differential cross section at polar angle `θ` (φ-independent).
pub fn sigma_diff(t: &PhaseShiftTable, dc: &DriveConfig, theta: f64) -> f64 {
    let sc = scalars_from_phase_shifts(t);
    let rs = reduced_scalars(&sc, dc);
    let (gp, gm) = g_pm(t, theta);
    let d = rs.denom();
    let interference = Complex64::from_polar(1.0, -2.0 * sc.delta0_minus()) * gm * Complex64::new(rs.kappa2, -rs.y);
    gm.norm_sqr() + rs.kappa2 / d * (1.0 / (4.0 * PI) + rs.eta2() * (gp.norm_sqr() - gm.norm_sqr()))
        - 2.0 / ((4.0 * PI).sqrt() * d) * interference.re
}

/// Cross sections with no direct scattering.
pub fn mollow_xsections(ztilde: f64, eta: f64) -> CrossSectionTriple {
    let eta2 = eta * eta;
    let l = 4.0 * ztilde * ztilde + 1.0;
    let d = l + 2.0 * eta2;
    let rs = reduced_scalars(
        &ScatteringScalars::mollow(),
        &DriveConfig::new(eta, ztilde, 0.0).expect("finite drive"),
    );
    CrossSectionTriple {
        total: 1.0 / d,
        elastic: l / (d * d),
        inelastic: 2.0 * eta2 / (d * d),
        aux_a: aux_a(&ScatteringScalars::mollow(), &rs),
        aux_b: aux_b(&rs),
        aux_e: aux_e(&rs),
    }
}

/// Total cross section in the weak-drive limit, `z = 2z̃`.
pub fn low_intensity_tot(sc: &ScatteringScalars, ztilde: f64) -> f64 {
    let z = 2.0 * ztilde;
    let dm = sc.delta0_minus();
    sc.norm2_pg_minus() + (z * dm.sin() - dm.cos()).powi(2) / (z * z + 1.0)
}

/// `E₀ = (2z̃ sin s + cos s)² + ‖P⊥Δg‖²(4z̃²+1)`.
pub fn low_intensity_e0(sc: &ScatteringScalars, ztilde: f64) -> f64 {
    let s = sc.s();
    (2.0 * ztilde * s.sin() + s.cos()).powi(2) + sc.norm2_pdg() * (4.0 * ztilde * ztilde + 1.0)
}

/// Leading coefficient of `σ_inel = η²·c + O(η⁴)`: `c = 2E₀/(4z̃²+1)²`.
pub fn low_intensity_inel_coefficient(sc: &ScatteringScalars, ztilde: f64) -> f64 {
    let l = 4.0 * ztilde * ztilde + 1.0;
    2.0 * low_intensity_e0(sc, ztilde) / (l * l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_legendre;

    fn reference() -> ScatteringScalars {
        ScatteringScalars::new(-0.03, 0.13, 0.005, 0.005, 0.02, -0.001).unwrap()
    }

    fn dc(eta2: f64, zt: f64) -> DriveConfig {
        DriveConfig::from_eta2(eta2, zt, 0.0).unwrap()
    }

    #[test]
    fn mollow_values() {
        let m = mollow_xsections(0.0, 0.0);
        assert_eq!((m.total, m.elastic, m.inelastic), (1.0, 1.0, 0.0));
        let m = mollow_xsections(0.0, 1.0);
        assert!((m.total - 1.0 / 3.0).abs() < 1e-16);
        assert!((m.elastic - 1.0 / 9.0).abs() < 1e-16);
        assert!((m.inelastic - 2.0 / 9.0).abs() < 1e-16);
        let sc = ScatteringScalars::mollow();
        assert!((sigma_tot(&sc, &dc(0.0, 0.0)) - 1.0).abs() < 1e-16);
        assert!((sigma_tot(&sc, &dc(1.0, 0.0)) - 1.0 / 3.0).abs() < 1e-16);
        assert!((sigma_el(&sc, &dc(1.0, 0.0)) - 1.0 / 9.0).abs() < 1e-16);
        assert!((sigma_inel(&sc, &dc(1.0, 0.0)) - 2.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn general_path_reduces_to_mollow() {
        let sc = ScatteringScalars::mollow();
        for zt in [-3.0, -0.5, 0.0, 1.2] {
            for eta2 in [0.0, 0.3, 4.0, 50.0] {
                let a = cross_sections(&sc, &dc(eta2, zt));
                let b = mollow_xsections(zt, eta2.sqrt());
                assert!((a.total - b.total).abs() < 1e-15 * b.total.max(1.0));
                assert!((a.elastic - b.elastic).abs() < 1e-15);
                assert!((a.inelastic - b.inelastic).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn plateau() {
        let sc = reference();
        let limit = sc.norm2_pg_minus() + 0.13f64.sin().powi(2);
        assert!((limit - 0.0218).abs() < 5e-5);
        for zt in [-1e6, 1e6] {
            let c = cross_sections(&sc, &dc(28.0, zt));
            assert!((c.total - limit).abs() < 1e-6);
            assert!((c.elastic - limit).abs() < 1e-6);
            assert!(c.inelastic < 1e-6);
        }
    }

    #[test]
    fn forms_and_sum_rule() {
        let sc = reference();
        for eta2 in [0.0, 10.0, 28.0] {
            for zt in [-4.0, 0.0, 3.0] {
                let c = cross_sections(&sc, &dc(eta2, zt));
                let alt = sigma_tot_expanded(&sc, &dc(eta2, zt));
                assert!((c.total - alt).abs() < 1e-12 * c.total);
                assert!(c.sum_rule_residual() < 1e-12);
            }
        }
    }

    #[test]
    fn weak_drive_total() {
        let sc = reference();
        for zt in [-2.0, 0.0, 0.4] {
            let a = low_intensity_tot(&sc, zt);
            let b = sigma_tot(&sc, &dc(0.0, zt));
            assert!((a - b).abs() < 1e-12);
        }
        assert!((low_intensity_tot(&ScatteringScalars::mollow(), 0.0) - 1.0).abs() < 1e-16);
        let sc = ScatteringScalars::new(0.0, PI / 2.0, 0.0, 0.3, 0.3, 0.0).unwrap();
        assert!((low_intensity_tot(&sc, 1e9) - 1.3).abs() < 1e-9);
    }

    #[test]
    fn resonant_isotropic_differential() {
        let t = PhaseShiftTable::zeros(0);
        let v = sigma_diff(&t, &dc(0.0, 0.0), 0.3);
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn weak_drive_differential() {
        let t = PhaseShiftTable::new(vec![0.1, 0.05, -0.2], vec![0.2, -0.1, 0.03]).unwrap();
        let zt = 0.8;
        let z = 2.0 * zt;
        for th in [0.0, 1.0, 2.0, PI] {
            let (_, gm) = g_pm(&t, th);
            let r =
                gm - Complex64::i() * Complex64::from_polar(1.0, 0.4) / ((4.0 * PI).sqrt() * Complex64::new(z, 1.0));
            assert!((sigma_diff(&t, &dc(0.0, zt), th) - r.norm_sqr()).abs() < 1e-15);
        }
    }

    #[test]
    fn differential_integrates_to_total() {
        let t = PhaseShiftTable::new(vec![0.2, 0.05, -0.1, 0.03], vec![-0.1, 0.12, 0.04, 0.0]).unwrap();
        let sc = scalars_from_phase_shifts(&t);
        let (mu, w) = gauss_legendre(64);
        for (eta2, zt) in [(0.0, 0.0), (5.0, 0.7), (28.0, -3.0)] {
            let d = dc(eta2, zt);
            let integral: f64 = mu
                .iter()
                .zip(&w)
                .map(|(m, w)| w * sigma_diff(&t, &d, m.acos()))
                .sum::<f64>()
                * 2.0
                * PI;
            assert!((integral - sigma_tot(&sc, &d)).abs() < 1e-8);
        }
    }

    #[test]
    fn weak_drive_inelastic_slope() {
        let sc = reference();
        let zt = 0.5;
        let c = low_intensity_inel_coefficient(&sc, zt);
        let ratio = sigma_inel(&sc, &dc(1e-6, zt)) / 1e-6;
        assert!((ratio - c).abs() < 1e-4 * c);
    }
}
