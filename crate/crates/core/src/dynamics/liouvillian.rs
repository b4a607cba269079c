// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

use crate::coherent::{build_hamiltonian, Hamiltonian, Level, Unitary};
use crate::linalg::{c, outer, sandwich, unvectorize, vectorize, Mat4, SuperOp, Vec16, C64};
use crate::model::{PumpChannel, SystemParams};

/// Lindblad jump `op` acting at `rate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpOperator {
    pub rate: f64,
    pub op: Mat4,
}

/// Everything that defines the open-system evolution, before vectorization.
///
/// `d rho/dt = -i[H, rho] + sum_k rate_k D[op_k] rho - removal * rho + injection`
#[derive(Debug, Clone, PartialEq)]
pub struct OpenSystem {
    pub hamiltonian: Mat4,
    pub jumps: Vec<JumpOperator>,
    pub removal: f64,
    pub injection: Mat4,
}

impl OpenSystem {
    pub fn from_params(p: &SystemParams, delta: f64) -> Self {
        Self::with_hamiltonian(p, &build_hamiltonian(p, delta))
    }

    /// Dissipation from `p` around an arbitrary Hamiltonian.
    pub fn with_hamiltonian(p: &SystemParams, h: &Hamiltonian) -> Self {
        let (a, cc, d, b) = (
            Level::A.index(),
            Level::C.index(),
            Level::D.index(),
            Level::B.index(),
        );
        let pump_target = match p.pump {
            PumpChannel::Upper => a,
            PumpChannel::Direct => d,
        };
        let jumps = [
            (p.gamma_b, outer(b, a)),
            (p.gamma_c, outer(cc, a)),
            (p.gamma_d, outer(d, a)),
            (p.r_pump, outer(pump_target, b)),
        ]
        .into_iter()
        .filter(|(rate, _)| *rate > 0.0)
        .map(|(rate, op)| JumpOperator { rate, op })
        .collect();

        let mut injection = Mat4::zeros();
        injection[(b, b)] = c(p.r_b);
        injection[(cc, cc)] = c(p.r_c);
        injection[(d, d)] = c(p.r_d);

        Self {
            hamiltonian: *h.matrix(),
            jumps,
            removal: p.gamma_0,
            injection,
        }
    }

    /// The same physics written in the basis `U`: every operator becomes `U X U^dagger`.
    pub fn conjugated(&self, u: &Unitary) -> Self {
        Self {
            hamiltonian: u.conjugate(&self.hamiltonian),
            jumps: self
                .jumps
                .iter()
                .map(|j| JumpOperator {
                    rate: j.rate,
                    op: u.conjugate(&j.op),
                })
                .collect(),
            removal: self.removal,
            injection: u.conjugate(&self.injection),
        }
    }

    pub fn liouvillian(&self) -> Liouvillian {
        let id = Mat4::identity();
        let minus_i = C64::new(0.0, -1.0);
        let mut gen =
            (sandwich(&self.hamiltonian, &id) - sandwich(&id, &self.hamiltonian)) * minus_i;
        for j in &self.jumps {
            let dag = j.op.adjoint();
            let n = dag * j.op;
            let d = sandwich(&j.op, &dag) - (sandwich(&n, &id) + sandwich(&id, &n)) * c(0.5);
            gen += d * c(j.rate);
        }
        gen -= SuperOp::identity() * c(self.removal);
        Liouvillian {
            generator: gen,
            source: vectorize(&self.injection),
        }
    }
}

/// Affine generator `d vec(rho)/dt = generator * vec(rho) + source` (column stacking).
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub generator: SuperOp,
    pub source: Vec16,
}

impl Liouvillian {
    /// Time derivative of `rho`.
    pub fn apply(&self, rho: &Mat4) -> Mat4 {
        unvectorize(&(self.generator * vectorize(rho) + self.source))
    }

    pub fn has_source(&self) -> bool {
        self.source.iter().any(|z| *z != C64::new(0.0, 0.0))
    }
}

/// Generator for the model at probe detuning `delta`.
pub fn build_liouvillian(p: &SystemParams, delta: f64) -> Liouvillian {
    OpenSystem::from_params(p, delta).liouvillian()
}
