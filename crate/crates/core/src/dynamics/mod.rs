// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

//! Open-system dynamics: the Lindblad generator, its steady state, time
//! evolution, and the weak-probe coherence.
//!
//! Dissipation channels:
//! - radiative decay `a -> b, c, d` at `gamma_b, gamma_c, gamma_d`;
//! - incoherent pump out of `b` at `r` (into `a` or `d`, see [`PumpChannel`]);
//! - transit removal of every level at `gamma_0`, balanced by injection
//!   `r_b, r_c, r_d` into the ground-state populations.
//!
//! [`PumpChannel`]: crate::model::PumpChannel

mod evolve;
mod liouvillian;
mod steady;

pub use evolve::{evolve, evolve_with, EvolveOptions};
pub use liouvillian::{build_liouvillian, JumpOperator, Liouvillian, OpenSystem};
pub use steady::{steady_state, steady_state_with_info, SolveInfo, NULL_SPACE_TOLERANCE};

use serde::Serialize;
use thiserror::Error;

use crate::coherent::{Level, Unitary};
use crate::linalg::{hermiticity_error, outer, Mat4, C64};
use crate::model::SystemParams;

pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;
/// Largest relative change of `rho_ab / E` allowed when the probe is halved.
pub const LINEARITY_TOLERANCE: f64 = 1e-3;
/// Responses smaller than this (in units of `1/gamma`) are compared absolutely.
const LINEARITY_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("steady state is not unique (null space of dimension {dimension})")]
    NonUniqueSteadyState { dimension: usize },
    #[error("generator has no normalizable steady state")]
    NoSteadyState,
    #[error("affine steady-state system is singular")]
    SingularSystem,
    #[error("solution violates density-matrix invariants: {0}")]
    InvalidState(StateViolation),
    #[error("integration step underflow at t = {time} (step {step})")]
    StepSizeUnderflow { time: f64, step: f64 },
    #[error("evolution time must be finite and non-negative (got {0})")]
    InvalidTime(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum StateViolation {
    #[error("not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace {0} differs from 1")]
    Trace(f64),
    #[error("negative eigenvalue {0:e}")]
    NotPositive(f64),
}

impl From<StateViolation> for DynamicsError {
    fn from(v: StateViolation) -> Self {
        DynamicsError::InvalidState(v)
    }
}

/// 4x4 density matrix over `(a, c, d, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub fn new(m: Mat4) -> Self {
        Self(m)
    }

    pub fn pure(level: Level) -> Self {
        Self(outer(level.index(), level.index()))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn element(&self, row: Level, col: Level) -> C64 {
        self.0[(row.index(), col.index())]
    }

    pub fn population(&self, level: Level) -> f64 {
        self.element(level, level).re
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().min()
    }

    /// `U rho U^dagger`
    pub fn transformed(&self, u: &Unitary) -> Self {
        Self(u.conjugate(&self.0))
    }

    /// Hermitian to 1e-10, unit trace to 1e-10, smallest eigenvalue >= -1e-8.
    pub fn check(&self) -> Result<(), StateViolation> {
        self.check_within(HERMITICITY_TOLERANCE)
    }

    /// As [`check`](Self::check), with the Hermiticity and positivity bounds
    /// widened to `accuracy` for solutions limited by conditioning.
    pub fn check_within(&self, accuracy: f64) -> Result<(), StateViolation> {
        let herm = self.hermiticity_error();
        if herm.is_nan() || herm > accuracy.max(HERMITICITY_TOLERANCE) {
            return Err(StateViolation::NotHermitian(herm));
        }
        let tr = self.trace();
        let drift = (tr - C64::new(1.0, 0.0)).norm();
        if drift.is_nan() || drift > TRACE_TOLERANCE {
            return Err(StateViolation::Trace(tr.re));
        }
        let min = self.min_eigenvalue();
        if min.is_nan() || min < -accuracy.max(POSITIVITY_TOLERANCE) {
            return Err(StateViolation::NotPositive(min));
        }
        Ok(())
    }
}

/// Steady-state probe coherence `rho_ab / E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeResponse {
    /// `<a| rho |b> / E`
    pub ratio: C64,
    /// Relative change of `ratio` when the probe is halved.
    pub linearity_change: f64,
    #[serde(skip)]
    pub state: DensityMatrix,
}

impl ProbeResponse {
    /// True when halving the probe moved the response by more than [`LINEARITY_TOLERANCE`].
    pub fn nonlinear(&self) -> bool {
        self.linearity_change > LINEARITY_TOLERANCE
    }
}

/// Steady-state `rho_ab / E` at probe detuning `delta`, with a linearity self-check
/// against a solve at half the probe strength.
pub fn probe_response(p: &SystemParams, delta: f64) -> Result<ProbeResponse, DynamicsError> {
    probe_response_in_basis(p, delta, &Unitary::identity())
}

/// As [`probe_response`], but solving the master equation written in basis `u`
/// and reading the coherence as `tr(rho' U|b><a|U^dagger)`.
pub fn probe_response_in_basis(
    p: &SystemParams,
    delta: f64,
    u: &Unitary,
) -> Result<ProbeResponse, DynamicsError> {
    let (ratio, state) = probe_coherence(p, delta, u)?;
    let half = SystemParams {
        probe: 0.5 * p.probe,
        ..*p
    };
    let (ratio_half, _) = probe_coherence(&half, delta, u)?;
    let linearity_change = (ratio - ratio_half).norm() / ratio.norm().max(LINEARITY_FLOOR);
    if linearity_change > LINEARITY_TOLERANCE {
        log::warn!(
            "probe response at delta = {delta} is nonlinear (relative change {linearity_change:.3e})"
        );
    }
    Ok(ProbeResponse {
        ratio,
        linearity_change,
        state,
    })
}

/// Single solve without the linearity check; `state` is in the original basis.
pub fn probe_coherence(
    p: &SystemParams,
    delta: f64,
    u: &Unitary,
) -> Result<(C64, DensityMatrix), DynamicsError> {
    let system = OpenSystem::from_params(p, delta).conjugated(u);
    let rho = steady_state(&system.liouvillian())?;
    let observable = u.conjugate(&outer(Level::B.index(), Level::A.index()));
    let coherence = (rho.matrix() * observable).trace();
    let back = DensityMatrix::new(u.0.adjoint() * rho.matrix() * u.0);
    Ok((coherence / p.probe, back))
}
