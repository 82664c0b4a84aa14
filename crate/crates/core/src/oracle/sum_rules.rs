use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{reduced_scalars, DriveConfig, ReducedScalars, ScatteringScalars};
use crate::quad::Tolerance;
use crate::spectrum::{integrate_inelastic, integrate_total, InelasticSpectrum, TotalSpectrum};
use crate::xsection::{sigma_inel_reduced, sigma_tot_reduced};

use super::relative_deviation;

/// Spectral integrals against the integral cross sections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumRuleReport {
    pub inelastic_integral: f64,
    pub inelastic_error: f64,
    pub sigma_inel: f64,
    pub inelastic_deviation: f64,
    pub total_integral: f64,
    pub total_error: f64,
    pub sigma_tot: f64,
    pub total_deviation: f64,
}

impl SumRuleReport {
    pub fn max_deviation(&self) -> f64 {
        self.inelastic_deviation.max(self.total_deviation)
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.max_deviation() <= rel_tol
    }
}

fn quadrature_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-14,
        rel: 1e-10,
        max_intervals: 8000,
    }
}

/// Integrates `Σ_inel` and `Σ_TOT` over all frequencies.
///
/// Quadrature failure is an `Err`; a sum-rule violation is reported in the
/// returned deviations.
pub fn quad_sum_rules(sc: &ScatteringScalars, dc: &DriveConfig) -> Result<SumRuleReport> {
    quad_sum_rules_reduced(sc, &reduced_scalars(sc, dc), dc)
}

/// As [`quad_sum_rules`], with the reduced scalars supplied by the caller.
pub fn quad_sum_rules_reduced(sc: &ScatteringScalars, rs: &ReducedScalars, dc: &DriveConfig) -> Result<SumRuleReport> {
    let gt = dc.gammatilde();
    if gt <= 0.0 {
        return Err(Error::ZeroInstrumentalWidth);
    }
    let tol = quadrature_tolerance();
    let inel = integrate_inelastic(&InelasticSpectrum::from_reduced(rs, gt), dc, tol)?;
    let tot = integrate_total(&TotalSpectrum::from_reduced(sc, rs, gt)?, dc, tol)?;
    let sigma_inel = sigma_inel_reduced(rs);
    let sigma_tot = sigma_tot_reduced(sc, rs);
    Ok(SumRuleReport {
        inelastic_integral: inel.value,
        inelastic_error: inel.error,
        sigma_inel,
        inelastic_deviation: relative_deviation(inel.value, sigma_inel),
        total_integral: tot.value,
        total_error: tot.error,
        sigma_tot,
        total_deviation: relative_deviation(tot.value, sigma_tot),
    })
}
