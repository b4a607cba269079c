// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

use super::{DensityMatrix, DynamicsError, Liouvillian};
use crate::linalg::{c, unvectorize, vectorize, Vec16};

/// Adaptive Dormand-Prince 5(4) settings. The generator is autonomous, so
/// stage times are not needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest allowed step as a fraction of `max(t, 1)`.
    pub min_step_fraction: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            min_step_fraction: 1e-14,
        }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// `rho(t)` under `d vec(rho)/dt = L vec(rho) + s`.
pub fn evolve(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix, DynamicsError> {
    evolve_with(l, rho0, t, EvolveOptions::default())
}

pub fn evolve_with(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t: f64,
    opts: EvolveOptions,
) -> Result<DensityMatrix, DynamicsError> {
    if !t.is_finite() || t < 0.0 {
        return Err(DynamicsError::InvalidTime(t));
    }
    let rhs = |x: &Vec16| l.generator * x + l.source;
    let mut y = vectorize(rho0.matrix());
    let mut now = 0.0;
    let h_min = opts.min_step_fraction * t.max(1.0);
    let scale = l
        .generator
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1e-12);
    let mut h = (0.1 / scale).min(t);
    let mut k = [Vec16::zeros(); 7];
    k[0] = rhs(&y);

    while now < t {
        if t - now < h {
            h = t - now;
        }
        for s in 1..7 {
            let mut stage = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                if A[s][j] != 0.0 {
                    stage += kj * c(h * A[s][j]);
                }
            }
            k[s] = rhs(&stage);
        }
        // FSAL: the 7th stage is evaluated at the 5th-order solution.
        let mut y_new = y;
        let mut err_vec = Vec16::zeros();
        for i in 0..7 {
            y_new += k[i] * c(h * B5[i]);
            err_vec += k[i] * c(h * (B5[i] - B4[i]));
        }
        let err = err_vec
            .iter()
            .zip(y.iter().zip(y_new.iter()))
            .map(|(e, (a, b))| e.norm() / (opts.atol + opts.rtol * a.norm().max(b.norm())))
            .fold(0.0, f64::max);

        if err <= 1.0 {
            now += h;
            y = y_new;
            k[0] = k[6];
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if now < t && h < h_min && t - now > h_min {
            return Err(DynamicsError::StepSizeUnderflow { time: now, step: h });
        }
    }
    Ok(DensityMatrix::new(unvectorize(&y)))
}
