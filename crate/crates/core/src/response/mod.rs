// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

//! Linear probe susceptibility, spectrum scans and the features extracted from them.
//!
//! Susceptibilities are in units of `eta / gamma_bar`; `Im chi > 0` is absorption.

mod features;
mod fit;
mod gain;
mod kramers_kronig;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coherent::Unitary;
use crate::dynamics::{probe_response, probe_response_in_basis, DynamicsError};
use crate::linalg::C64;
use crate::model::{derived_rates, GridError, ScanGrid, SystemParams};

pub use features::{
    find_zeros, interference_feature, intersection_width, measure_dip, measure_peak,
    transparency_points, DipMeasurement, FeatureFlag, FeatureKind, SpectralFeature, ZERO_THRESHOLD,
};
pub use fit::{fit_lorentzian, LorentzianFit};
pub use gain::{
    gain_threshold_analytic, gain_threshold_numeric, minimum_absorption, AnalyticThreshold,
    NumericThreshold, RegimeWarning, PUMP_TOLERANCE,
};
pub use kramers_kronig::kramers_kronig_real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResponseError {
    #[error(
        "perturbative feature formulas need |omega_tilde^2| and |omega_tilde^2 + gamma_ab delta_c| \
         >= 10 omega_c^2 (omega_tilde^2 = {omega_tilde_sq}, omega_c = {omega_c})"
    )]
    ValidityViolated { omega_tilde_sq: f64, omega_c: f64 },
    #[error("no interference feature without the coupling field")]
    NoInterference,
    #[error("not in the intersection regime: omega^2 = {omega_sq}, delta_c (delta_c + delta0) = {crossing}")]
    OutsideRegime { omega_sq: f64, crossing: f64 },
    #[error("minimum absorption has the same sign at both ends of the pump bracket ({at_min:.3e}, {at_max:.3e})")]
    NoSignChange { at_min: f64, at_max: f64 },
    #[error("invalid pump bracket [{r_min}, {r_max}]")]
    InvalidBracket { r_min: f64, r_max: f64 },
    #[error("samples must be sorted by detuning and come from one method")]
    InvalidSamples,
    #[error("no {0} found in the samples")]
    FeatureNotFound(&'static str),
    #[error("lineshape fit did not converge")]
    FitFailed,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("solve failed at delta = {delta}: {source}")]
    Dynamics {
        delta: f64,
        #[source]
        source: DynamicsError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Numeric,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::Numeric => "numeric",
        })
    }
}

/// Which evaluation paths a scan runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSelection {
    Analytic,
    Numeric,
    #[default]
    Both,
}

impl MethodSelection {
    pub fn methods(self) -> &'static [Method] {
        match self {
            MethodSelection::Analytic => &[Method::Analytic],
            MethodSelection::Numeric => &[Method::Numeric],
            MethodSelection::Both => &[Method::Analytic, Method::Numeric],
        }
    }
}

impl FromStr for MethodSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(MethodSelection::Analytic),
            "numeric" => Ok(MethodSelection::Numeric),
            "both" => Ok(MethodSelection::Both),
            other => Err(format!(
                "unknown method `{other}` (expected analytic, numeric or both)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SusceptibilitySample {
    pub delta: f64,
    pub chi: C64,
    pub method: Method,
}

/// Closed-form susceptibility for atoms that all sit in `b`.
///
/// The three-denominator continued fraction is combined into one fraction,
/// `i eta (G_cb G_db + W_c^2) / (G_ab (G_cb G_db + W_c^2) + W^2 G_db)`, so the
/// two-photon resonance `G_cb = 0` needs no special case.
pub fn chi_analytic(p: &SystemParams, delta: f64) -> C64 {
    let rates = derived_rates(p);
    let g_ab = C64::new(rates.gamma_ab, delta);
    let g_cb = C64::new(rates.gamma_cb, delta - p.delta0);
    let g_db = C64::new(rates.gamma_db, delta - p.delta0 - p.delta_c);
    let oc2 = p.omega_c * p.omega_c;
    let o2 = p.omega * p.omega;
    // Without the coupling field `G_db` is a common factor and `d` drops out.
    let inner = if oc2 == 0.0 { g_cb } else { g_cb * g_db + oc2 };
    let den = if oc2 == 0.0 {
        g_ab * g_cb + o2
    } else {
        g_ab * inner + g_db * o2
    };
    if den == C64::new(0.0, 0.0) {
        // Only reachable without any damping; the response is then unbounded.
        return C64::new(f64::NAN, f64::NAN);
    }
    C64::i() * p.eta * inner / den
}

/// Susceptibility from the full master-equation steady state.
pub fn chi_numeric(p: &SystemParams, delta: f64) -> Result<C64, DynamicsError> {
    Ok(chi_from_ratio(p, probe_response(p, delta)?.ratio))
}

/// As [`chi_numeric`], with the master equation solved in the basis `u`.
pub fn chi_numeric_in_basis(
    p: &SystemParams,
    delta: f64,
    u: &Unitary,
) -> Result<C64, DynamicsError> {
    Ok(chi_from_ratio(
        p,
        probe_response_in_basis(p, delta, u)?.ratio,
    ))
}

// rho_ab rotates as exp(+i nu t) in the frame of H, so the response with the
// absorptive sign convention is the conjugate.
fn chi_from_ratio(p: &SystemParams, ratio: C64) -> C64 {
    -p.eta * ratio.conj()
}

pub fn chi(p: &SystemParams, delta: f64, method: Method) -> Result<C64, DynamicsError> {
    match method {
        Method::Analytic => Ok(chi_analytic(p, delta)),
        Method::Numeric => chi_numeric(p, delta),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanFailure {
    pub delta: f64,
    pub method: Method,
    pub error: DynamicsError,
}

/// Samples in grid order (methods interleaved per point) plus every point that failed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scan {
    pub samples: Vec<SusceptibilitySample>,
    pub failures: Vec<ScanFailure>,
}

impl Scan {
    /// The samples of one method, still sorted by detuning.
    pub fn by_method(&self, method: Method) -> Vec<SusceptibilitySample> {
        self.samples
            .iter()
            .filter(|s| s.method == method)
            .copied()
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn scan(
    p: &SystemParams,
    grid: &ScanGrid,
    methods: MethodSelection,
) -> Result<Scan, ResponseError> {
    grid.validate()?;
    let methods = methods.methods();
    let results: Vec<Result<SusceptibilitySample, ScanFailure>> = (0..grid.points)
        .into_par_iter()
        .flat_map_iter(|i| {
            let delta = grid.value(i);
            methods.iter().map(move |&method| {
                chi(p, delta, method)
                    .map(|chi| SusceptibilitySample { delta, chi, method })
                    .map_err(|error| ScanFailure {
                        delta,
                        method,
                        error,
                    })
            })
        })
        .collect();
    let mut out = Scan::default();
    for r in results {
        match r {
            Ok(s) => out.samples.push(s),
            Err(f) => out.failures.push(f),
        }
    }
    if !out.failures.is_empty() {
        log::warn!(
            "{} of {} scan points failed",
            out.failures.len(),
            grid.points * methods.len()
        );
    }
    Ok(out)
}

/// Largest `|chi_numeric - chi_analytic|` over `grid` and the largest `|chi_analytic|`.
pub fn oracle_discrepancy(p: &SystemParams, grid: &ScanGrid) -> Result<(f64, f64), ResponseError> {
    grid.validate()?;
    let pairs: Result<Vec<(f64, f64)>, ResponseError> = grid
        .values()
        .into_par_iter()
        .map(|delta| {
            let ana = chi_analytic(p, delta);
            let num = chi_numeric(p, delta)
                .map_err(|source| ResponseError::Dynamics { delta, source })?;
            Ok(((num - ana).norm(), ana.norm()))
        })
        .collect();
    Ok(pairs?.into_iter().fold((0.0, 0.0), |(d, m), (di, mi)| {
        (f64::max(d, di), f64::max(m, mi))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;
    use approx::assert_abs_diff_eq;

    /// The printed continued fraction, evaluated directly.
    fn chi_factored(p: &SystemParams, delta: f64) -> C64 {
        let r = derived_rates(p);
        let g_ab = C64::new(r.gamma_ab, delta);
        let g_cb = C64::new(r.gamma_cb, delta - p.delta0);
        let g_db = C64::new(r.gamma_db, delta - p.delta0 - p.delta_c);
        let inner = g_cb + p.omega_c * p.omega_c / g_db;
        C64::i() * p.eta / (g_ab + p.omega * p.omega / inner)
    }

    #[test]
    fn single_fraction_matches_factored_form() {
        let p = SystemParams {
            gamma_0: 0.01,
            r_b: 0.01,
            delta0: 0.3,
            delta_c: -0.2,
            ..presets::split_dark_lines()
        };
        for delta in [-2.0, -0.4, 0.05, 0.31, 1.7] {
            let a = chi_analytic(&p, delta);
            let b = chi_factored(&p, delta);
            assert!((a - b).norm() < 1e-12 * b.norm().max(1.0), "delta {delta}");
        }
    }

    #[test]
    fn center_of_split_lines() {
        let chi = chi_analytic(&presets::split_dark_lines(), 0.0);
        assert_abs_diff_eq!(chi.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(chi.im, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn plain_dark_line() {
        let p = SystemParams {
            omega_c: 0.0,
            delta0: 0.25,
            ..presets::split_dark_lines()
        };
        assert_eq!(chi_analytic(&p, 0.25), C64::new(0.0, 0.0));
    }

    #[test]
    fn numeric_center_and_zero() {
        let p = presets::split_dark_lines();
        let center = chi_numeric(&p, 0.0).unwrap();
        assert_abs_diff_eq!(center.im, 2.0 / 3.0, epsilon = 1e-3);
        assert!(chi_numeric(&p, 0.2).unwrap().norm() < 1e-6);
    }

    #[test]
    fn gain_somewhere_at_strong_pump() {
        let p = presets::gain();
        let grid = ScanGrid::new(-0.05, 0.05, 101).unwrap();
        let min = grid
            .values()
            .into_iter()
            .map(|d| chi_numeric(&p, d).unwrap().im)
            .fold(f64::INFINITY, f64::min);
        assert!(min < 0.0, "min Im chi {min}");
    }

    #[test]
    fn scan_counts_and_order() {
        let grid = ScanGrid::new(-3.0, 3.0, 201).unwrap();
        let s = scan(&presets::split_dark_lines(), &grid, MethodSelection::Both).unwrap();
        assert!(s.is_complete());
        assert_eq!(s.samples.len(), 402);
        for (i, pair) in s.samples.chunks(2).enumerate() {
            assert_eq!(pair[0].method, Method::Analytic);
            assert_eq!(pair[1].method, Method::Numeric);
            assert_eq!(pair[0].delta, grid.value(i));
            assert_eq!(pair[1].delta, grid.value(i));
        }
    }

    #[test]
    fn scan_reports_failures_without_aborting() {
        // Nothing damps and nothing is driven: every numeric solve is degenerate.
        let p = SystemParams {
            omega: 0.0,
            omega_c: 0.0,
            gamma_b: 0.0,
            gamma_c: 0.0,
            gamma_d: 0.0,
            ..presets::split_dark_lines()
        };
        let grid = ScanGrid::new(-1.0, 1.0, 4).unwrap();
        let s = scan(&p, &grid, MethodSelection::Both).unwrap();
        assert_eq!(s.failures.len(), 4);
        assert_eq!(s.by_method(Method::Analytic).len(), 4);
    }

    #[test]
    fn method_selection_parses() {
        assert_eq!("both".parse::<MethodSelection>(), Ok(MethodSelection::Both));
        assert!("fast".parse::<MethodSelection>().is_err());
    }
}
