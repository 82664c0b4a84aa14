//! Model inputs (phase shifts, scattering scalars, drive) and the derived
//! scalar and angular quantities.
//!
//! Units: rates in units of the natural line width `‖α‖²`, cross sections as
//! the dimensionless `ω²σ/(6πc²)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, Result};
use crate::legendre::legendre_values;

/// Tolerance on the triangle bound between `‖P⊥g±‖` and `‖P⊥Δg‖`.
pub const TRIANGLE_TOL: f64 = 1e-9;

/// Truncated partial-wave phase shifts `δ_l^±`, `l = 0..=lmax`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseShiftTable {
    delta_plus: Vec<f64>,
    delta_minus: Vec<f64>,
}

impl PhaseShiftTable {
    /// Builds a table; the shorter sequence is padded with zeros.
    pub fn new(delta_plus: Vec<f64>, delta_minus: Vec<f64>) -> Result<Self> {
        if delta_plus.is_empty() && delta_minus.is_empty() {
            return Err(invalid("phase_shifts", "at least the s-wave entry is required"));
        }
        for &d in delta_plus.iter() {
            require_finite("delta_plus", d)?;
        }
        for &d in delta_minus.iter() {
            require_finite("delta_minus", d)?;
        }
        let n = delta_plus.len().max(delta_minus.len());
        let mut p = delta_plus;
        let mut m = delta_minus;
        p.resize(n, 0.0);
        m.resize(n, 0.0);
        Ok(PhaseShiftTable {
            delta_plus: p,
            delta_minus: m,
        })
    }

    /// All shifts zero up to `lmax`: pure absorption/emission.
    pub fn zeros(lmax: usize) -> Self {
        PhaseShiftTable {
            delta_plus: vec![0.0; lmax + 1],
            delta_minus: vec![0.0; lmax + 1],
        }
    }

    pub fn lmax(&self) -> usize {
        self.delta_plus.len() - 1
    }

    pub fn delta_plus(&self) -> &[f64] {
        &self.delta_plus
    }

    pub fn delta_minus(&self) -> &[f64] {
        &self.delta_minus
    }
}

/// The scalars the integral quantities depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringScalars {
    delta0_plus: f64,
    delta0_minus: f64,
    s: f64,
    norm2_pg_plus: f64,
    norm2_pg_minus: f64,
    norm2_pdg: f64,
    eps_r: f64,
    cross_pg: f64,
}

impl ScatteringScalars {
    /// Validates the inputs and derives `s` and `Re⟨P⊥g⁺, P⊥g⁻⟩`.
    pub fn new(
        delta0_plus: f64,
        delta0_minus: f64,
        norm2_pg_plus: f64,
        norm2_pg_minus: f64,
        norm2_pdg: f64,
        eps_r: f64,
    ) -> Result<Self> {
        require_finite("delta0_plus", delta0_plus)?;
        require_finite("delta0_minus", delta0_minus)?;
        require_finite("eps_r", eps_r)?;
        for (name, v) in [
            ("norm2_pg_plus", norm2_pg_plus),
            ("norm2_pg_minus", norm2_pg_minus),
            ("norm2_pdg", norm2_pdg),
        ] {
            require_finite(name, v)?;
            if v < 0.0 {
                return Err(invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        let (gp, gm, dg) = (norm2_pg_plus.sqrt(), norm2_pg_minus.sqrt(), norm2_pdg.sqrt());
        if dg < (gp - gm).abs() - TRIANGLE_TOL || dg > gp + gm + TRIANGLE_TOL {
            return Err(invalid(
                "norm2_pdg",
                format!("violates the triangle bound |{gp:.3e} - {gm:.3e}| <= {dg:.3e} <= {gp:.3e} + {gm:.3e}"),
            ));
        }
        Ok(Self::from_parts(
            delta0_plus,
            delta0_minus,
            norm2_pg_plus,
            norm2_pg_minus,
            norm2_pdg,
            eps_r,
        ))
    }

    fn from_parts(
        delta0_plus: f64,
        delta0_minus: f64,
        norm2_pg_plus: f64,
        norm2_pg_minus: f64,
        norm2_pdg: f64,
        eps_r: f64,
    ) -> Self {
        ScatteringScalars {
            delta0_plus,
            delta0_minus,
            s: delta0_plus - delta0_minus,
            norm2_pg_plus,
            norm2_pg_minus,
            norm2_pdg,
            eps_r,
            cross_pg: 0.5 * (norm2_pg_plus + norm2_pg_minus - norm2_pdg),
        }
    }

    /// No direct scattering at all.
    pub fn mollow() -> Self {
        Self::from_parts(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn delta0_plus(&self) -> f64 {
        self.delta0_plus
    }
    pub fn delta0_minus(&self) -> f64 {
        self.delta0_minus
    }
    pub fn s(&self) -> f64 {
        self.s
    }
    pub fn norm2_pg_plus(&self) -> f64 {
        self.norm2_pg_plus
    }
    pub fn norm2_pg_minus(&self) -> f64 {
        self.norm2_pg_minus
    }
    pub fn norm2_pdg(&self) -> f64 {
        self.norm2_pdg
    }
    pub fn eps_r(&self) -> f64 {
        self.eps_r
    }
    pub fn cross_pg(&self) -> f64 {
        self.cross_pg
    }

    /// `‖g₊‖² = sin²δ₀⁺ + ‖P⊥g₊‖²`
    pub fn norm2_g_plus(&self) -> f64 {
        self.delta0_plus.sin().powi(2) + self.norm2_pg_plus
    }

    /// `‖g₋‖² = sin²δ₀⁻ + ‖P⊥g₋‖²`
    pub fn norm2_g_minus(&self) -> f64 {
        self.delta0_minus.sin().powi(2) + self.norm2_pg_minus
    }

    /// Mirror image `δ₀± → −δ₀±`, `ε → −ε` (hence `s → −s`); combined with
    /// `z̃ → −z̃` it flips the sign of `z`. Used by symmetry checks.
    pub fn with_s_negated(&self) -> Self {
        Self::from_parts(
            -self.delta0_plus,
            -self.delta0_minus,
            self.norm2_pg_plus,
            self.norm2_pg_minus,
            self.norm2_pdg,
            -self.eps_r,
        )
    }
}

/// Laser amplitude `η`, reduced detuning `z̃` and instrumental width `γ̃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    eta: f64,
    ztilde: f64,
    gammatilde: f64,
}

impl DriveConfig {
    pub fn new(eta: f64, ztilde: f64, gammatilde: f64) -> Result<Self> {
        require_finite("eta", eta)?;
        require_finite("ztilde", ztilde)?;
        require_finite("gammatilde", gammatilde)?;
        if eta < 0.0 {
            return Err(invalid("eta", format!("must be non-negative, got {eta}")));
        }
        if gammatilde < 0.0 {
            return Err(invalid("gammatilde", format!("must be non-negative, got {gammatilde}")));
        }
        Ok(DriveConfig {
            eta,
            ztilde,
            gammatilde,
        })
    }

    /// Parameterized by the intensity `η²`.
    pub fn from_eta2(eta2: f64, ztilde: f64, gammatilde: f64) -> Result<Self> {
        require_finite("eta2", eta2)?;
        if eta2 < 0.0 {
            return Err(invalid("eta2", format!("must be non-negative, got {eta2}")));
        }
        Self::new(eta2.sqrt(), ztilde, gammatilde)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn eta2(&self) -> f64 {
        self.eta * self.eta
    }
    pub fn ztilde(&self) -> f64 {
        self.ztilde
    }
    pub fn gammatilde(&self) -> f64 {
        self.gammatilde
    }

    pub fn with_ztilde(&self, ztilde: f64) -> Self {
        DriveConfig { ztilde, ..*self }
    }
}

/// Scalars derived from scattering data and drive.
///
/// Fields are public so fault-injection fixtures can perturb them; use
/// [`reduced_scalars`] to build consistent values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedScalars {
    pub eta: f64,
    pub s: f64,
    /// Detuning including the lamp shift, `z = 2z̃ − 2η²ε`.
    pub z: f64,
    pub y: f64,
    pub kappa2: f64,
    pub zeta2: f64,
    pub bprime: Complex64,
    pub norm2_dg: f64,
    /// `‖P⊥Δg‖²`
    pub norm2_pdg: f64,
}

impl ReducedScalars {
    pub fn eta2(&self) -> f64 {
        self.eta * self.eta
    }

    /// `z² + ζ²`, half the determinant of the drift matrix.
    pub fn denom(&self) -> f64 {
        self.z * self.z + self.zeta2
    }
}

pub fn reduced_scalars(sc: &ScatteringScalars, dc: &DriveConfig) -> ReducedScalars {
    let eta2 = dc.eta2();
    let s = sc.s();
    let p = sc.norm2_pdg();
    let z = 2.0 * dc.ztilde() - 2.0 * eta2 * sc.eps_r();
    let norm2_dg = s.sin().powi(2) + p;
    let kappa2 = 1.0 + eta2 * norm2_dg;
    let zeta2 = (1.0 + eta2 * p).powi(2) + eta2 * (1.0 + kappa2 + eta2 * p);
    let half_sin = 0.5 * eta2 * (2.0 * s).sin();
    ReducedScalars {
        eta: dc.eta(),
        s,
        z,
        y: z - half_sin,
        kappa2,
        zeta2,
        bprime: Complex64::new(kappa2, -(z + half_sin)),
        norm2_dg,
        norm2_pdg: p,
    }
}

/// Sums over `l ≥ 1` of a truncated table.
pub fn scalars_from_phase_shifts(t: &PhaseShiftTable) -> ScatteringScalars {
    let (dp, dm) = (t.delta_plus(), t.delta_minus());
    let mut pgp = 0.0;
    let mut pgm = 0.0;
    let mut pdg = 0.0;
    let mut eps = 0.0;
    for l in 1..=t.lmax() {
        let w = (2 * l + 1) as f64;
        pgp += w * dp[l].sin().powi(2);
        pgm += w * dm[l].sin().powi(2);
        let d = dp[l] - dm[l];
        pdg += w * d.sin().powi(2);
        eps += w * (2.0 * d).sin();
    }
    ScatteringScalars::from_parts(dp[0], dm[0], pgp, pgm, pdg, -0.25 * eps)
}

fn partial_wave_sum(deltas: &[f64], p: &[f64]) -> Complex64 {
    let norm = 1.0 / (4.0 * PI).sqrt();
    let sum: Complex64 = deltas
        .iter()
        .zip(p)
        .enumerate()
        .map(|(l, (&d, &pl))| Complex64::from_polar(1.0, d) * (d.sin() * (2 * l + 1) as f64 * pl))
        .sum();
    Complex64::i() * sum * norm
}

/// `(g₊(θ), g₋(θ))`.
pub fn g_pm(t: &PhaseShiftTable, theta: f64) -> (Complex64, Complex64) {
    let p = legendre_values(t.lmax(), theta.cos());
    (
        partial_wave_sum(t.delta_plus(), &p),
        partial_wave_sum(t.delta_minus(), &p),
    )
}

/// `Δg(θ) = g₊(θ) − g₋(θ)`.
pub fn delta_g(t: &PhaseShiftTable, theta: f64) -> Complex64 {
    let (gp, gm) = g_pm(t, theta);
    gp - gm
}

/// s-wave coefficient of `Δg`: `Δg = Δ₀/√(4π) + P⊥Δg`, with
/// `Δ₀ = i e^{i(δ₀⁺+δ₀⁻)} sin s`.
pub fn delta_g_swave(delta0_plus: f64, delta0_minus: f64) -> Complex64 {
    Complex64::i() * Complex64::from_polar(1.0, delta0_plus + delta0_minus) * (delta0_plus - delta0_minus).sin()
}

/// `Δg(θ)` assembled as s-wave part plus the `l ≥ 1` remainder, each term
/// written as `i e^{i(δ⁺+δ⁻)} sin(δ⁺−δ⁻)`.
pub fn delta_g_split(t: &PhaseShiftTable, theta: f64) -> (Complex64, Complex64) {
    let p = legendre_values(t.lmax(), theta.cos());
    let norm = 1.0 / (4.0 * PI).sqrt();
    let (dp, dm) = (t.delta_plus(), t.delta_minus());
    let swave = delta_g_swave(dp[0], dm[0]) * norm;
    let rest: Complex64 = (1..=t.lmax())
        .map(|l| delta_g_swave(dp[l], dm[l]) * ((2 * l + 1) as f64 * p[l] * norm))
        .sum();
    (swave, rest)
}
