// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::{DensityMatrix, DynamicsError, Liouvillian};
use crate::linalg::unvectorize;

/// Singular values below this fraction of the largest count toward the null space.
pub const NULL_SPACE_TOLERANCE: f64 = 1e-10;

/// Diagnostics of one steady-state solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveInfo {
    pub null_dimension: usize,
    /// Smallest over largest singular value of the generator.
    pub inverse_condition: f64,
    /// Smallest singular value outside the null space over the largest. The
    /// solution is accurate to about machine epsilon over this gap.
    pub gap: f64,
}

/// Rounding in a backward-stable solve is amplified at most by this factor over
/// `EPSILON / gap`.
const STABILITY_FACTOR: f64 = 16.0;

/// Stationary state of `L`.
///
/// With a source the affine system `L x = -s` is solved directly; without one the
/// null vector of `L` is normalized to unit trace.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix, DynamicsError> {
    steady_state_with_info(l).map(|(rho, _)| rho)
}

pub fn steady_state_with_info(
    l: &Liouvillian,
) -> Result<(DensityMatrix, SolveInfo), DynamicsError> {
    let svd = l.generator.svd(false, true);
    let sv = &svd.singular_values;
    let largest = sv.max();
    if largest == 0.0 {
        return Err(DynamicsError::NonUniqueSteadyState { dimension: 16 });
    }
    let null_dimension = sv
        .iter()
        .filter(|s| **s < NULL_SPACE_TOLERANCE * largest)
        .count();
    let gap = sv
        .iter()
        .filter(|s| **s >= NULL_SPACE_TOLERANCE * largest)
        .fold(f64::INFINITY, |m, s| m.min(*s))
        / largest;
    let info = SolveInfo {
        null_dimension,
        inverse_condition: sv.min() / largest,
        gap,
    };

    let raw = if l.has_source() {
        if null_dimension > 0 {
            return Err(DynamicsError::SingularSystem);
        }
        let x = l
            .generator
            .lu()
            .solve(&(-l.source))
            .ok_or(DynamicsError::SingularSystem)?;
        unvectorize(&x)
    } else {
        match null_dimension {
            0 => return Err(DynamicsError::NoSteadyState),
            1 => {}
            dimension => return Err(DynamicsError::NonUniqueSteadyState { dimension }),
        }
        let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
        let k = sv.imin();
        let null = v_t.row(k).adjoint();
        let m = unvectorize(&null);
        let tr = m.trace();
        if tr.norm() < f64::EPSILON {
            return Err(DynamicsError::NoSteadyState);
        }
        m / tr
    };

    // A slow mode (weak optical pumping, say) limits the accuracy of the computed
    // vector; the bound follows the perturbation theory of the solve.
    DensityMatrix::new(raw).check_within(STABILITY_FACTOR * f64::EPSILON / gap)?;
    // Hermitian to rounding already; keep the projection exact.
    let rho = DensityMatrix::new((raw + raw.adjoint()) * crate::linalg::c(0.5));
    Ok((rho, info))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::build_liouvillian;
    use crate::model::{presets, SystemParams};

    #[test]
    fn slow_trapping_is_solved_and_reported() {
        // Without coupling or transit, d is a trap fed only through the weak probe.
        let p = SystemParams {
            omega: 0.3,
            omega_c: 0.0,
            gamma_b: 0.2,
            gamma_c: 0.2,
            gamma_d: 0.2,
            ..presets::split_dark_lines()
        };
        let (rho, info) = steady_state_with_info(&build_liouvillian(&p, 1.7)).unwrap();
        assert_eq!(info.null_dimension, 1);
        assert!(info.gap < 1e-8, "gap {}", info.gap);
        assert!((rho.population(crate::coherent::Level::D) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn well_separated_spectrum_has_large_gap() {
        let l = build_liouvillian(&presets::split_dark_lines(), 0.3);
        let (_, info) = steady_state_with_info(&l).unwrap();
        assert!(info.gap > 1e-3, "gap {}", info.gap);
    }
}
