//! Photon balance for a beam of finite half-angle `Δθ`.
//!
//! The field space is truncated to the axially symmetric harmonics
//! `Y_l0, l = 0..=L`. The laser profile is a flat cap of half-angle `Δθ`
//! normalized as in the collimated construction, so its overlaps tend to
//! `√(2l+1)/2` as `Δθ → 0` while `Σ_l overlap_l²` grows like `1/Δθ²`.
//! The 2×2 Lindblad generator is assembled directly from the jump operators
//! `R_l = e^{−iβ} α_l σ₋ + (S⁺λ)_l P₊ + (S⁻λ)_l P₋` and solved for its
//! stationary state; in equilibrium the outgoing photon flux
//! `Tr(Σ_l R_l†R_l ρ)` must equal the incoming flux `‖λ‖²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::bloch::BlochVector;
use crate::error::{invalid, Error, Result};
use crate::legendre::legendre_values;
use crate::linalg::solve_dense;
use crate::model::{DriveConfig, PhaseShiftTable};
use crate::quad::gauss_legendre;

type Op = [[Complex64; 2]; 2];

const Z: Complex64 = Complex64::new(0.0, 0.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn mul(a: &Op, b: &Op) -> Op {
    let mut m = [[Z; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

fn dagger(a: &Op) -> Op {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn add(a: &Op, b: &Op, s: Complex64) -> Op {
    let mut m = *a;
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] += s * b[i][j];
        }
    }
    m
}

fn trace(a: &Op) -> Complex64 {
    a[0][0] + a[1][1]
}

/// Beam geometry and its overlaps with the truncated harmonic basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteBeamModel {
    l_max: usize,
    dtheta: f64,
    overlaps: Vec<f64>,
}

impl FiniteBeamModel {
    /// Overlaps `⟨Y_l0|λ̃⟩` by 64-point Gauss–Legendre quadrature over
    /// `cos θ ∈ [cos Δθ, 1]`, exact for `L ≤ 127`.
    pub fn new(l_max: usize, dtheta: f64) -> Result<Self> {
        if !(dtheta > 0.0 && dtheta <= PI) {
            return Err(invalid("dtheta", format!("must lie in (0, π], got {dtheta}")));
        }
        if l_max > 127 {
            return Err(invalid("l_max", "overlap quadrature is exact only up to l = 127"));
        }
        // 1 − cos Δθ without cancellation
        let gap = 2.0 * (0.5 * dtheta).sin().powi(2);
        let (t, w) = gauss_legendre(64);
        let mut integrals = vec![0.0; l_max + 1];
        for (ti, wi) in t.iter().zip(&w) {
            let mu = 1.0 - 0.5 * gap * (1.0 - ti);
            let p = legendre_values(l_max, mu);
            for (acc, pl) in integrals.iter_mut().zip(&p) {
                *acc += 0.5 * gap * wi * pl;
            }
        }
        let norm = dtheta * (2.0 * PI * gap).sqrt();
        let overlaps = integrals
            .iter()
            .enumerate()
            .map(|(l, int)| 2.0 * PI * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt() * int / norm)
            .collect();
        Ok(FiniteBeamModel {
            l_max,
            dtheta,
            overlaps,
        })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    pub fn overlaps(&self) -> &[f64] {
        &self.overlaps
    }

    /// The collimated limit `√(2l+1)/2`.
    pub fn limit_overlap(l: usize) -> f64 {
        0.5 * ((2 * l + 1) as f64).sqrt()
    }

    /// `‖λ̃‖² = 1/Δθ²`, the bound on `Σ_l overlap_l²`.
    pub fn profile_norm2(&self) -> f64 {
        1.0 / (self.dtheta * self.dtheta)
    }
}

/// Stationary flux balance of the finite-beam generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceReport {
    pub influx: f64,
    pub outflux: f64,
    /// `|out − in| / in`, zero when nothing is injected.
    pub residual: f64,
    pub equilibrium: BlochVector,
}

/// Assembles the generator for `(fb, t, dc)`, finds its stationary state and
/// compares outgoing with incoming photon flux.
pub fn finite_beam_balance(fb: &FiniteBeamModel, t: &PhaseShiftTable, dc: &DriveConfig) -> Result<BalanceReport> {
    if t.lmax() > fb.l_max {
        return Err(invalid(
            "l_max",
            format!(
                "table has shifts up to l = {} beyond the basis cutoff {}",
                t.lmax(),
                fb.l_max
            ),
        ));
    }
    let shift = |d: &[f64], l: usize| d.get(l).copied().unwrap_or(0.0);
    let eta = dc.eta();
    let lambda: Vec<f64> = fb.overlaps.iter().map(|o| eta * o).collect();
    let s_plus: Vec<Complex64> = (0..=fb.l_max)
        .map(|l| Complex64::from_polar(lambda[l], 2.0 * shift(t.delta_plus(), l)))
        .collect();
    let s_minus: Vec<Complex64> = (0..=fb.l_max)
        .map(|l| Complex64::from_polar(lambda[l], 2.0 * shift(t.delta_minus(), l)))
        .collect();
    let drive = s_minus[0];
    // e^{−iβ} with β = arg(−⟨S⁻λ|α⟩); any phase works when the drive vanishes
    let phase = if drive.norm() > 0.0 {
        (-drive).unscale(drive.norm())
    } else {
        re(1.0)
    };

    let p_plus: Op = [[re(1.0), Z], [Z, Z]];
    let p_minus: Op = [[Z, Z], [Z, re(1.0)]];
    let sigma_minus: Op = [[Z, Z], [re(1.0), Z]];
    let sigma_z: Op = [[re(1.0), Z], [Z, re(-1.0)]];
    let sigma_y: Op = [[Z, Complex64::new(0.0, -1.0)], [Complex64::new(0.0, 1.0), Z]];

    let zero: Op = [[Z; 2]; 2];
    let h = add(
        &add(&zero, &sigma_z, re(-0.5 * dc.ztilde())),
        &sigma_y,
        re(-0.5 * drive.norm()),
    );

    let jumps: Vec<Op> = (0..=fb.l_max)
        .map(|l| {
            let alpha = if l == 0 { phase } else { Z };
            let r = add(&zero, &sigma_minus, alpha);
            let r = add(&r, &p_plus, s_plus[l]);
            add(&r, &p_minus, s_minus[l])
        })
        .collect();
    let rdr: Op = jumps
        .iter()
        .fold(zero, |acc, r| add(&acc, &mul(&dagger(r), r), re(1.0)));

    let generator = |rho: &Op| -> Op {
        // −i[H, ρ]
        let comm = add(&mul(&h, rho), &mul(rho, &h), re(-1.0));
        let mut out = add(&zero, &comm, Complex64::new(0.0, -1.0));
        for r in &jumps {
            out = add(&out, &mul(&mul(r, rho), &dagger(r)), re(1.0));
        }
        let anti = add(&mul(&rdr, rho), &mul(rho, &rdr), re(1.0));
        add(&out, &anti, re(-0.5))
    };

    // columns of the vectorized generator, vec index 2i + j
    let mut m = vec![vec![Z; 4]; 4];
    for k in 0..4 {
        let mut basis = [[Z; 2]; 2];
        basis[k / 2][k % 2] = re(1.0);
        let img = generator(&basis);
        for row in 0..4 {
            m[row][k] = img[row / 2][row % 2];
        }
    }
    // trace normalization replaces the (redundant) population equation
    m[0] = vec![re(1.0), Z, Z, re(1.0)];
    let mut rhs = vec![Z; 4];
    rhs[0] = re(1.0);
    let x = solve_dense(m, rhs).ok_or(Error::SingularSystem)?;
    let rho: Op = [[x[0], x[1]], [x[2], x[3]]];

    let u = rho[0][0].re;
    let v = rho[0][1];
    let eq = BlochVector::new(u, v);
    if !eq.is_state(1e-10) || (rho[1][0] - v.conj()).norm() > 1e-10 {
        return Err(Error::NonPositiveEquilibrium { u, v2: v.norm_sqr() });
    }

    let influx: f64 = lambda.iter().map(|l| l * l).sum();
    let outflux = trace(&mul(&rdr, &rho)).re;
    let residual = if influx == 0.0 {
        outflux.abs()
    } else {
        (outflux - influx).abs() / influx
    };
    Ok(BalanceReport {
        influx,
        outflux,
        residual,
        equilibrium: eq,
    })
}
