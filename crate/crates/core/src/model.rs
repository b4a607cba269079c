// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

//! Physical parameters of the four-level double-dark-resonance system.
//!
//! Every rate, detuning and Rabi frequency is measured in units of a single
//! reference rate (set to 1). The susceptibility scale `eta` is carried along
//! as an opaque factor.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance on the transit flux balance `r_b + r_c + r_d = gamma_0`.
pub const FLUX_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_PROBE: f64 = 1e-4;
pub const DEFAULT_ETA: f64 = 1.0;

/// Which transition the incoherent pump `r` drives out of the ground state `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpChannel {
    /// `b -> a`; the pumped atoms reach `d` through the radiative branch `gamma_d`.
    #[default]
    Upper,
    /// `b -> d` directly.
    Direct,
}

/// Validated model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    pub omega: f64,
    pub omega_c: f64,
    pub probe: f64,
    pub delta0: f64,
    pub delta_c: f64,
    pub gamma_b: f64,
    pub gamma_c: f64,
    pub gamma_d: f64,
    pub gamma_0: f64,
    pub r_pump: f64,
    pub r_b: f64,
    pub r_c: f64,
    pub r_d: f64,
    pub eta: f64,
    pub pump: PumpChannel,
}

/// Unvalidated parameter record, as read from a config file.
///
/// Missing optional fields take their documented defaults during validation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    #[serde(default)]
    pub omega: f64,
    #[serde(default)]
    pub omega_c: f64,
    #[serde(default)]
    pub probe: Option<f64>,
    #[serde(default)]
    pub delta0: f64,
    #[serde(default)]
    pub delta_c: f64,
    #[serde(default)]
    pub gamma_b: f64,
    #[serde(default)]
    pub gamma_c: f64,
    #[serde(default)]
    pub gamma_d: f64,
    #[serde(default)]
    pub gamma_0: f64,
    #[serde(default)]
    pub r_pump: f64,
    #[serde(default)]
    pub r_b: Option<f64>,
    #[serde(default)]
    pub r_c: Option<f64>,
    #[serde(default)]
    pub r_d: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub pump: PumpChannel,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("{name} must be finite (got {value})")]
    NonFinite { name: &'static str, value: f64 },
    #[error("{name} must be non-negative (got {value})")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("probe Rabi frequency must be positive (got {0})")]
    NonPositiveProbe(f64),
    #[error("susceptibility scale eta must be positive (got {0})")]
    NonPositiveEta(f64),
    #[error("transit flux imbalance: r_b + r_c + r_d = {injected} but gamma_0 = {gamma_0}")]
    FluxImbalance { injected: f64, gamma_0: f64 },
}

/// All violations found in one parameter record.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameters: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationError(pub Vec<Violation>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamWarning {
    /// No dissipation at all: the steady state is generally not unique.
    DegenerateDynamics,
}

/// Validates a raw record, filling defaults (`probe = 1e-4`, `eta = 1`,
/// `r_b = r_c = r_d = gamma_0 / 3`).
pub fn validate_params(raw: &RawParams) -> Result<SystemParams, ValidationError> {
    let third = raw.gamma_0 / 3.0;
    let p = SystemParams {
        omega: raw.omega,
        omega_c: raw.omega_c,
        probe: raw.probe.unwrap_or(DEFAULT_PROBE),
        delta0: raw.delta0,
        delta_c: raw.delta_c,
        gamma_b: raw.gamma_b,
        gamma_c: raw.gamma_c,
        gamma_d: raw.gamma_d,
        gamma_0: raw.gamma_0,
        r_pump: raw.r_pump,
        r_b: raw.r_b.unwrap_or(third),
        r_c: raw.r_c.unwrap_or(third),
        r_d: raw.r_d.unwrap_or(third),
        eta: raw.eta.unwrap_or(DEFAULT_ETA),
        pump: raw.pump,
    };
    p.validate()?;
    for w in p.warnings() {
        log::warn!("parameter warning: {w:?}");
    }
    Ok(p)
}

impl SystemParams {
    /// Checks every invariant and returns all violations at once.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let mut out = Vec::new();
        let all = [
            ("omega", self.omega),
            ("omega_c", self.omega_c),
            ("probe", self.probe),
            ("delta0", self.delta0),
            ("delta_c", self.delta_c),
            ("gamma_b", self.gamma_b),
            ("gamma_c", self.gamma_c),
            ("gamma_d", self.gamma_d),
            ("gamma_0", self.gamma_0),
            ("r_pump", self.r_pump),
            ("r_b", self.r_b),
            ("r_c", self.r_c),
            ("r_d", self.r_d),
            ("eta", self.eta),
        ];
        for (name, value) in all {
            if !value.is_finite() {
                out.push(Violation::NonFinite { name, value });
            }
        }
        let non_negative = [
            ("omega", self.omega),
            ("omega_c", self.omega_c),
            ("gamma_b", self.gamma_b),
            ("gamma_c", self.gamma_c),
            ("gamma_d", self.gamma_d),
            ("gamma_0", self.gamma_0),
            ("r_pump", self.r_pump),
            ("r_b", self.r_b),
            ("r_c", self.r_c),
            ("r_d", self.r_d),
        ];
        for (name, value) in non_negative {
            if value < 0.0 {
                out.push(Violation::NegativeRate { name, value });
            }
        }
        if self.probe <= 0.0 {
            out.push(Violation::NonPositiveProbe(self.probe));
        }
        if self.eta <= 0.0 {
            out.push(Violation::NonPositiveEta(self.eta));
        }
        let injected = self.r_b + self.r_c + self.r_d;
        if (injected - self.gamma_0).abs() > FLUX_TOLERANCE * self.gamma_0.max(1.0) {
            out.push(Violation::FluxImbalance {
                injected,
                gamma_0: self.gamma_0,
            });
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(ValidationError(out))
        }
    }

    pub fn warnings(&self) -> Vec<ParamWarning> {
        let dissipation = self.gamma_b + self.gamma_c + self.gamma_d + self.gamma_0 + self.r_pump;
        if dissipation == 0.0 {
            vec![ParamWarning::DegenerateDynamics]
        } else {
            Vec::new()
        }
    }

    /// Total radiative decay rate of the upper level.
    pub fn gamma_a(&self) -> f64 {
        self.gamma_b + self.gamma_c + self.gamma_d
    }

    /// `Omega^2 - delta_c (delta_c + delta0)`: the splitting between the
    /// unperturbed dressed levels that controls perturbation theory in `omega_c`.
    pub fn omega_tilde_sq(&self) -> f64 {
        self.omega * self.omega - self.delta_c * (self.delta_c + self.delta0)
    }

    /// Copy with a different incoherent pump rate; transit injection is untouched.
    pub fn with_pump_rate(&self, r_pump: f64) -> Self {
        Self { r_pump, ..*self }
    }

    /// Copy with transit broadening `gamma_0`, injecting every entering atom into `b`.
    pub fn with_ground_injection(&self, gamma_0: f64) -> Self {
        Self {
            gamma_0,
            r_b: gamma_0,
            r_c: 0.0,
            r_d: 0.0,
            ..*self
        }
    }

    /// True when atoms only enter the ground state and nothing pumps them out of it,
    /// i.e. the regime the closed-form susceptibility assumes.
    pub fn ground_state_only(&self) -> bool {
        self.r_pump == 0.0 && self.r_c == 0.0 && self.r_d == 0.0
    }
}

/// Relaxation rates of the populations and probe-relevant coherences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSet {
    pub gamma_a: f64,
    pub gamma_ab: f64,
    pub gamma_cb: f64,
    pub gamma_db: f64,
}

/// Coherence rates are half the sum of the two levels' total removal rates.
///
/// Removal of `a` is `gamma_a + gamma_0`, of `b` is `gamma_0 + r`, and of `c`, `d`
/// is `gamma_0`.
pub fn derived_rates(p: &SystemParams) -> RateSet {
    let gamma_a = p.gamma_a();
    let out_a = gamma_a + p.gamma_0;
    let out_b = p.gamma_0 + p.r_pump;
    let out_cd = p.gamma_0;
    RateSet {
        gamma_a,
        gamma_ab: 0.5 * (out_a + out_b),
        gamma_cb: 0.5 * (out_cd + out_b),
        gamma_db: 0.5 * (out_cd + out_b),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("scan grid needs delta_min < delta_max (got {0} .. {1})")]
    EmptyRange(f64, f64),
    #[error("scan grid needs at least 2 points (got {0})")]
    TooFewPoints(usize),
}

/// Uniform detuning grid with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
}

impl ScanGrid {
    pub fn new(delta_min: f64, delta_max: f64, points: usize) -> Result<Self, GridError> {
        let grid = Self {
            delta_min,
            delta_max,
            points,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.delta_min >= self.delta_max
            || !self.delta_min.is_finite()
            || !self.delta_max.is_finite()
        {
            return Err(GridError::EmptyRange(self.delta_min, self.delta_max));
        }
        if self.points < 2 {
            return Err(GridError::TooFewPoints(self.points));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.delta_max - self.delta_min) / (self.points - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.delta_max
        } else {
            let t = i as f64 / (self.points - 1) as f64;
            self.delta_min + (self.delta_max - self.delta_min) * t
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }
}

/// Parameter sets of the two spectra figures.
pub mod presets {
    use super::{PumpChannel, SystemParams};

    /// Pure coherent perturbation on resonance: `gamma_b = gamma_c = gamma_d = 1`,
    /// `Omega = 1`, `Omega_c = 0.2`, no transit or pump, all detunings zero.
    pub fn split_dark_lines() -> SystemParams {
        SystemParams {
            omega: 1.0,
            omega_c: 0.2,
            probe: super::DEFAULT_PROBE,
            delta0: 0.0,
            delta_c: 0.0,
            gamma_b: 1.0,
            gamma_c: 1.0,
            gamma_d: 1.0,
            gamma_0: 0.0,
            r_pump: 0.0,
            r_b: 0.0,
            r_c: 0.0,
            r_d: 0.0,
            eta: 1.0,
            pump: PumpChannel::Upper,
        }
    }

    /// Same as [`split_dark_lines`] with `delta_c = 1`, where the dressed energies intersect.
    pub fn intersecting() -> SystemParams {
        SystemParams {
            delta_c: 1.0,
            ..split_dark_lines()
        }
    }

    /// Weak perturbation with transit broadening and incoherent pump, tuned for gain:
    /// `Omega_c = 0.01`, `gamma_0 = 3 r_b = 3 r_c = 3 r_d = 1e-4`, `r = 1e-3`, `delta_c = 0`.
    pub fn gain() -> SystemParams {
        let gamma_0 = 1e-4;
        SystemParams {
            omega_c: 0.01,
            gamma_0,
            r_pump: 1e-3,
            r_b: gamma_0 / 3.0,
            r_c: gamma_0 / 3.0,
            r_d: gamma_0 / 3.0,
            ..split_dark_lines()
        }
    }

    /// As [`gain`] with `r = 5e-4` and `delta_c = 0.4`: index enhancement at vanishing absorption.
    pub fn enhanced_index() -> SystemParams {
        SystemParams {
            r_pump: 5e-4,
            delta_c: 0.4,
            ..gain()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig2a_raw() -> RawParams {
        RawParams {
            omega: 1.0,
            omega_c: 0.2,
            gamma_b: 1.0,
            gamma_c: 1.0,
            gamma_d: 1.0,
            ..Default::default()
        }
    }

    #[test]
    fn split_dark_line_parameters_are_valid() {
        let p = validate_params(&fig2a_raw()).unwrap();
        assert_eq!(p, presets::split_dark_lines());
        assert!(p.warnings().is_empty());
    }

    #[test]
    fn all_zero_rates_valid_but_warned() {
        let p = validate_params(&RawParams::default()).unwrap();
        assert_eq!(p.probe, 1e-4);
        assert_eq!(p.warnings(), vec![ParamWarning::DegenerateDynamics]);
    }

    #[test]
    fn balanced_transit_flux_is_valid() {
        let raw = RawParams {
            gamma_0: 3e-4,
            r_b: Some(1e-4),
            r_c: Some(1e-4),
            r_d: Some(1e-4),
            ..fig2a_raw()
        };
        assert!(validate_params(&raw).is_ok());
    }

    #[test]
    fn injection_defaults_to_equal_thirds() {
        let raw = RawParams {
            gamma_0: 1e-4,
            ..fig2a_raw()
        };
        let p = validate_params(&raw).unwrap();
        assert_relative_eq!(p.r_b, 1e-4 / 3.0);
        assert_eq!(p.r_b, p.r_c);
        assert_eq!(p.r_c, p.r_d);
    }

    #[test]
    fn violations_are_collected() {
        let raw = RawParams {
            gamma_b: -1.0,
            probe: Some(0.0),
            gamma_0: 1e-3,
            r_b: Some(0.0),
            r_c: Some(0.0),
            r_d: Some(0.0),
            ..fig2a_raw()
        };
        let err = validate_params(&raw).unwrap_err();
        assert_eq!(err.0.len(), 3);
        assert!(err.0.contains(&Violation::NegativeRate {
            name: "gamma_b",
            value: -1.0
        }));
        assert!(err.0.contains(&Violation::NonPositiveProbe(0.0)));
        assert!(matches!(err.0[2], Violation::FluxImbalance { .. }));
    }

    #[test]
    fn injection_without_transit_is_imbalanced() {
        let raw = RawParams {
            r_b: Some(1e-3),
            ..fig2a_raw()
        };
        assert!(validate_params(&raw).is_err());
    }

    #[test]
    fn nan_is_rejected() {
        let raw = RawParams {
            delta0: f64::NAN,
            ..fig2a_raw()
        };
        let err = validate_params(&raw).unwrap_err();
        assert!(matches!(
            err.0[0],
            Violation::NonFinite { name: "delta0", .. }
        ));
    }

    #[test]
    fn rates_for_split_dark_lines() {
        let r = derived_rates(&presets::split_dark_lines());
        assert_eq!(r.gamma_a, 3.0);
        assert_eq!(r.gamma_ab, 1.5);
        assert_eq!(r.gamma_cb, 0.0);
        assert_eq!(r.gamma_db, 0.0);
    }

    #[test]
    fn rates_all_zero() {
        let p = validate_params(&RawParams::default()).unwrap();
        let r = derived_rates(&p);
        assert_eq!(
            (r.gamma_a, r.gamma_ab, r.gamma_cb, r.gamma_db),
            (0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn rates_with_transit_and_pump() {
        let p = SystemParams {
            r_pump: 1e-3,
            ..presets::split_dark_lines().with_ground_injection(1e-4)
        };
        let r = derived_rates(&p);
        assert_relative_eq!(r.gamma_ab, (3.0 + 2e-4 + 1e-3) / 2.0, max_relative = 1e-15);
        assert_relative_eq!(r.gamma_cb, (2e-4 + 1e-3) / 2.0, max_relative = 1e-15);
        assert_eq!(r.gamma_cb, r.gamma_db);
    }

    #[test]
    fn rates_respect_level_removal_bounds() {
        let p = presets::gain();
        let r = derived_rates(&p);
        let out_a = r.gamma_a + p.gamma_0;
        let out_b = p.gamma_0 + p.r_pump;
        assert!(r.gamma_ab >= 0.5 * out_a.max(out_b));
        assert!(r.gamma_cb >= 0.5 * p.gamma_0.max(out_b));
    }

    #[test]
    fn grid_endpoints_inclusive() {
        let g = ScanGrid::new(-3.0, 3.0, 201).unwrap();
        let v = g.values();
        assert_eq!(v.len(), 201);
        assert_eq!(v[0], -3.0);
        assert_eq!(v[200], 3.0);
        assert_relative_eq!(v[100], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn grid_errors() {
        assert_eq!(
            ScanGrid::new(1.0, 1.0, 10),
            Err(GridError::EmptyRange(1.0, 1.0))
        );
        assert_eq!(ScanGrid::new(0.0, 1.0, 1), Err(GridError::TooFewPoints(1)));
    }

    #[test]
    fn raw_params_parse_from_json() {
        let raw: RawParams = serde_json::from_str(
            r#"{"omega": 1, "omega_c": 0.2, "gamma_b": 1, "gamma_c": 1, "gamma_d": 1, "pump": "direct"}"#,
        )
        .unwrap();
        assert_eq!(raw.pump, PumpChannel::Direct);
        assert!(serde_json::from_str::<RawParams>(r#"{"omgea": 1}"#).is_err());
    }
}
