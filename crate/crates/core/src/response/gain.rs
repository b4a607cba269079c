// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;

use super::{chi_numeric, ResponseError};
use crate::model::{ScanGrid, SystemParams};

/// Bisection on the pump rate stops once the bracket is this narrow.
pub const PUMP_TOLERANCE: f64 = 1e-6;

/// "Much smaller than" in the closed-form threshold means at least this factor.
const WEAK: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeWarning {
    /// Probe or coupling detuning is nonzero.
    Detuned,
    /// `gamma_0` is not small against `omega_c`.
    TransitNotSmall,
    /// The threshold pump rate is not small against the radiative rates.
    PumpNotWeak,
    /// `gamma_d = 0`, so the pumped population never reaches `d`.
    NoDecayIntoD,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticThreshold {
    pub value: f64,
    pub warnings: Vec<RegimeWarning>,
}

/// Closed-form pump rate at which the resonant absorption line turns into gain.
///
/// `r_th = (gamma_b / gamma_d) |omega_c / omega|^2 gamma_a + (1 + gamma_b / gamma_d) gamma_0`.
/// Derived on resonance for weak transit and pump; outside that regime the value
/// is still returned, with warnings.
pub fn gain_threshold_analytic(p: &SystemParams) -> AnalyticThreshold {
    let mut warnings = Vec::new();
    if p.delta0 != 0.0 || p.delta_c != 0.0 {
        warnings.push(RegimeWarning::Detuned);
    }
    if p.gamma_0 > 0.0 && p.gamma_0 >= WEAK * p.omega_c.abs() {
        warnings.push(RegimeWarning::TransitNotSmall);
    }
    if p.gamma_d == 0.0 {
        warnings.push(RegimeWarning::NoDecayIntoD);
        return AnalyticThreshold {
            value: f64::INFINITY,
            warnings,
        };
    }
    let branching = p.gamma_b / p.gamma_d;
    let coupling = if p.omega_c == 0.0 {
        0.0
    } else {
        (p.omega_c / p.omega).powi(2) * p.gamma_a()
    };
    let value = branching * coupling + (1.0 + branching) * p.gamma_0;
    let slowest_radiative = [p.gamma_b, p.gamma_c, p.gamma_d]
        .into_iter()
        .filter(|g| *g > 0.0)
        .fold(f64::INFINITY, f64::min);
    if value >= WEAK * slowest_radiative {
        warnings.push(RegimeWarning::PumpNotWeak);
    }
    AnalyticThreshold { value, warnings }
}

/// Smallest `Im chi_numeric` over the grid and where it occurs.
pub fn minimum_absorption(p: &SystemParams, grid: &ScanGrid) -> Result<(f64, f64), ResponseError> {
    grid.validate()?;
    let values: Result<Vec<(f64, f64)>, ResponseError> = grid
        .values()
        .into_par_iter()
        .map(|delta| {
            chi_numeric(p, delta)
                .map(|z| (delta, z.im))
                .map_err(|source| ResponseError::Dynamics { delta, source })
        })
        .collect();
    Ok(values?
        .into_iter()
        .fold((f64::NAN, f64::INFINITY), |best, (d, v)| {
            if v < best.1 {
                (d, v)
            } else {
                best
            }
        }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericThreshold {
    pub value: f64,
    /// Final bracket; the sign of the minimum absorption differs at its ends.
    pub bracket: (f64, f64),
    pub bisections: usize,
}

/// Pump rate at which the minimum of `Im chi_numeric` over `grid` crosses zero.
pub fn gain_threshold_numeric(
    p: &SystemParams,
    grid: &ScanGrid,
    r_min: f64,
    r_max: f64,
) -> Result<NumericThreshold, ResponseError> {
    if !(r_min.is_finite() && r_max.is_finite()) || r_min < 0.0 || r_max < r_min {
        return Err(ResponseError::InvalidBracket { r_min, r_max });
    }
    let g = |r: f64| minimum_absorption(&p.with_pump_rate(r), grid).map(|(_, v)| v);
    let at_min = g(r_min)?;
    let at_max = if r_max == r_min { at_min } else { g(r_max)? };
    if at_min * at_max >= 0.0 {
        return Err(ResponseError::NoSignChange { at_min, at_max });
    }
    let (mut lo, mut hi) = (r_min, r_max);
    let lo_positive = at_min > 0.0;
    let mut bisections = 0;
    while hi - lo > PUMP_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let v = g(mid)?;
        bisections += 1;
        if v == 0.0 {
            return Ok(NumericThreshold {
                value: mid,
                bracket: (mid, mid),
                bisections,
            });
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(NumericThreshold {
        value: 0.5 * (lo + hi),
        bracket: (lo, hi),
        bisections,
    })
}
