// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

//! Rotating-frame Hamiltonian, dressed states of the driven `a, c, d`
//! manifold, and the unitarily equivalent level schemes.
//!
//! The basis order is `(a, c, d, b)` throughout.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{c, hermiticity_error, Mat4, C64};
use crate::model::SystemParams;

/// Atomic levels and their slot in the state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    /// Excited state.
    A,
    /// Ground state driven to `a` by the strong field.
    C,
    /// Metastable state coupled to `c` by the coherent perturbation.
    D,
    /// Ground state probed on `a <-> b`.
    B,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::A, Level::C, Level::D, Level::B];

    pub const fn index(self) -> usize {
        match self {
            Level::A => 0,
            Level::C => 1,
            Level::D => 2,
            Level::B => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoherentError {
    #[error("dressed frequencies coincide within 1e-10; labels are ambiguous")]
    DegenerateSpectrum(Box<DressedStateSet>),
    #[error(
        "perturbative dressed states need |Omega~^2| >= 10 Omega_c^2 (Omega~^2 = {omega_tilde_sq}, Omega_c = {omega_c})"
    )]
    ValidityViolated { omega_tilde_sq: f64, omega_c: f64 },
    #[error("lower-doublet scheme needs delta_c = 0 (got {0})")]
    UnsupportedDetuning(f64),
}

/// Hermitian 4x4 Hamiltonian in units of the reference rate (hbar = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian(pub Mat4);

impl Hamiltonian {
    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.0.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }
}

/// Rotating-frame Hamiltonian with probe detuning `delta`.
pub fn build_hamiltonian(p: &SystemParams, delta: f64) -> Hamiltonian {
    hamiltonian_with_probe(p, delta, p.probe)
}

/// Same as [`build_hamiltonian`] with the probe field switched off.
pub fn probe_off_hamiltonian(p: &SystemParams, delta: f64) -> Hamiltonian {
    hamiltonian_with_probe(p, delta, 0.0)
}

fn hamiltonian_with_probe(p: &SystemParams, delta: f64, probe: f64) -> Hamiltonian {
    let (a, cc, d, b) = (
        Level::A.index(),
        Level::C.index(),
        Level::D.index(),
        Level::B.index(),
    );
    let mut h = Mat4::zeros();
    h[(a, a)] = c(-p.delta0);
    h[(a, cc)] = c(-p.omega);
    h[(cc, a)] = c(-p.omega);
    h[(a, b)] = c(-probe);
    h[(b, a)] = c(-probe);
    h[(cc, d)] = c(-p.omega_c);
    h[(d, cc)] = c(-p.omega_c);
    h[(d, d)] = c(p.delta_c);
    h[(b, b)] = c(delta - p.delta0);
    Hamiltonian(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Perturbative,
}

/// One dressed level: frequency and amplitudes over `(a, c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DressedState {
    pub frequency: f64,
    pub amplitudes: [C64; 3],
}

impl DressedState {
    fn from_real(frequency: f64, v: Vector3<f64>) -> Self {
        Self {
            frequency,
            amplitudes: [c(v[0]), c(v[1]), c(v[2])],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn overlap(&self, other: &DressedState) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(x, y)| x.conj() * y)
            .sum()
    }
}

/// The three dressed levels `|+>`, `|->`, `|0>`.
///
/// `|+>` and `|->` are the Autler-Townes pair at `-delta0/2 -+ sqrt(Omega^2 + delta0^2/4)`
/// and `|0>` is the level that reduces to `|d>` as `Omega_c -> 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DressedStateSet {
    pub plus: DressedState,
    pub minus: DressedState,
    pub zero: DressedState,
    pub provenance: Provenance,
    pub omega0_sq: f64,
    pub omega_tilde_sq: f64,
    /// False when two frequencies coincide and the labels above are arbitrary.
    pub labeled: bool,
}

impl DressedStateSet {
    pub fn states(&self) -> [&DressedState; 3] {
        [&self.plus, &self.minus, &self.zero]
    }

    pub fn frequencies(&self) -> [f64; 3] {
        [
            self.plus.frequency,
            self.minus.frequency,
            self.zero.frequency,
        ]
    }

    /// Largest `|<i|j> - delta_ij|` over the three vectors.
    pub fn orthonormality_error(&self) -> f64 {
        let s = self.states();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s[i].overlap(s[j]) - c(target)).norm());
            }
        }
        worst
    }
}

/// Autler-Townes pair of the `a <-> c` drive, `(omega_plus, v_plus), (omega_minus, v_minus)`
/// with vectors over `(a, c)`.
fn autler_townes(omega: f64, delta0: f64) -> ((f64, [f64; 2]), (f64, [f64; 2])) {
    let root = (omega * omega + 0.25 * delta0 * delta0).sqrt();
    let w_plus = -0.5 * delta0 - root;
    let w_minus = -0.5 * delta0 + root;
    let omega0 = omega0_sq(omega, delta0).sqrt();
    if omega0 > 0.0 {
        (
            (w_plus, [-w_plus / omega0, omega / omega0]),
            (w_minus, [omega / omega0, w_plus / omega0]),
        )
    } else {
        // Omega = 0 with delta0 <= 0: |c> lies below |a>.
        ((w_plus, [0.0, 1.0]), (w_minus, [1.0, 0.0]))
    }
}

fn omega0_sq(omega: f64, delta0: f64) -> f64 {
    let shifted = 0.5 * delta0 + (omega * omega + 0.25 * delta0 * delta0).sqrt();
    omega * omega + shifted * shifted
}

fn manifold_matrix(p: &SystemParams, omega_c: f64) -> Matrix3<f64> {
    -Matrix3::new(
        p.delta0, p.omega, 0.0, //
        p.omega, 0.0, omega_c, //
        0.0, omega_c, -p.delta_c,
    )
}

/// Labeled states in the `Omega_c = 0` limit.
fn decoupled_states(p: &SystemParams) -> [(f64, Vector3<f64>); 3] {
    let ((wp, vp), (wm, vm)) = autler_townes(p.omega, p.delta0);
    [
        (wp, Vector3::new(vp[0], vp[1], 0.0)),
        (wm, Vector3::new(vm[0], vm[1], 0.0)),
        (p.delta_c, Vector3::new(0.0, 0.0, 1.0)),
    ]
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

const TRACKING_STEPS: usize = 64;
const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Exact eigenstates of the probe-off `(a, c, d)` block.
///
/// Labels follow the eigenvectors continuously from `Omega_c = 0`, where the
/// states are the Autler-Townes pair and `|d>`.
pub fn dressed_exact(p: &SystemParams) -> Result<DressedStateSet, CoherentError> {
    let mut tracked = decoupled_states(p);
    if p.omega_c != 0.0 {
        for step in 1..=TRACKING_STEPS {
            let oc = p.omega_c * step as f64 / TRACKING_STEPS as f64;
            let eig = SymmetricEigen::new(manifold_matrix(p, oc));
            let columns: Vec<Vector3<f64>> = (0..3)
                .map(|k| eig.eigenvectors.column(k).into_owned())
                .collect();
            let best = PERMUTATIONS
                .iter()
                .max_by(|x, y| {
                    let score = |perm: &[usize; 3]| -> f64 {
                        (0..3)
                            .map(|l| tracked[l].1.dot(&columns[perm[l]]).powi(2))
                            .sum()
                    };
                    score(x).total_cmp(&score(y))
                })
                .expect("non-empty permutation table");
            for l in 0..3 {
                let mut v = columns[best[l]];
                if tracked[l].1.dot(&v) < 0.0 {
                    v = -v;
                }
                tracked[l] = (eig.eigenvalues[best[l]], v);
            }
        }
    }

    let mut set = DressedStateSet {
        plus: DressedState::from_real(tracked[0].0, tracked[0].1),
        minus: DressedState::from_real(tracked[1].0, tracked[1].1),
        zero: DressedState::from_real(tracked[2].0, tracked[2].1),
        provenance: Provenance::Exact,
        omega0_sq: omega0_sq(p.omega, p.delta0),
        omega_tilde_sq: p.omega_tilde_sq(),
        labeled: true,
    };
    let w = set.frequencies();
    let degenerate = (0..3).any(|i| (i + 1..3).any(|j| (w[i] - w[j]).abs() < DEGENERACY_TOLERANCE));
    if degenerate {
        set.labeled = false;
        return Err(CoherentError::DegenerateSpectrum(Box::new(set)));
    }
    Ok(set)
}

/// First-order dressed states, evaluated from the closed-form expressions.
///
/// Frequencies are the unperturbed ones; amplitudes carry the first-order
/// admixture of `|d>` into the Autler-Townes pair and of `|a>, |c>` into `|0>`.
/// Vectors are normalized only to `1 + O(Omega_c^2)`.
pub fn dressed_perturbative(p: &SystemParams) -> Result<DressedStateSet, CoherentError> {
    let wt2 = p.omega_tilde_sq();
    let oc = p.omega_c;
    let o0_sq = omega0_sq(p.omega, p.delta0);
    let violated = CoherentError::ValidityViolated {
        omega_tilde_sq: wt2,
        omega_c: oc,
    };
    if wt2.abs() < 10.0 * oc * oc {
        return Err(violated);
    }

    let base = DressedStateSet {
        plus: DressedState::from_real(0.0, Vector3::zeros()),
        minus: DressedState::from_real(0.0, Vector3::zeros()),
        zero: DressedState::from_real(0.0, Vector3::zeros()),
        provenance: Provenance::Perturbative,
        omega0_sq: o0_sq,
        omega_tilde_sq: wt2,
        labeled: true,
    };
    if oc == 0.0 {
        let [plus, minus, zero] = decoupled_states(p);
        return Ok(DressedStateSet {
            plus: DressedState::from_real(plus.0, plus.1),
            minus: DressedState::from_real(minus.0, minus.1),
            zero: DressedState::from_real(zero.0, zero.1),
            ..base
        });
    }
    if o0_sq == 0.0 {
        return Err(violated);
    }

    let o0 = o0_sq.sqrt();
    let omega = p.omega;
    let root = (omega * omega + 0.25 * p.delta0 * p.delta0).sqrt();
    let w_plus = -0.5 * p.delta0 - root;
    let w_minus = -0.5 * p.delta0 + root;
    let w_zero = p.delta_c;

    let plus = Vector3::new(-w_plus, omega, omega * oc / (w_zero - w_plus)) / o0;
    let minus = Vector3::new(omega, w_plus, w_plus * oc / (w_zero - w_minus)) / o0;
    let zero = Vector3::new(-oc * omega / wt2, oc * (p.delta_c + p.delta0) / wt2, 1.0);

    Ok(DressedStateSet {
        plus: DressedState::from_real(w_plus, plus),
        minus: DressedState::from_real(w_minus, minus),
        zero: DressedState::from_real(w_zero, zero),
        ..base
    })
}

/// A 4x4 unitary change of basis; rows are the new basis vectors (conjugated).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary(pub Mat4);

impl Unitary {
    pub fn identity() -> Self {
        Self(Mat4::identity())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    /// `U M U^dagger`
    pub fn conjugate(&self, m: &Mat4) -> Mat4 {
        self.0 * m * self.0.adjoint()
    }

    pub fn unitarity_error(&self) -> f64 {
        crate::linalg::max_abs(&(self.0 * self.0.adjoint() - Mat4::identity()))
    }
}

/// Which pair of levels is rediagonalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalentScheme {
    /// `c, d -> (|c> +- |d>)/sqrt(2)`: two Lambda systems driven at `Omega/sqrt(2)`.
    LowerDoublet,
    /// `a, c ->` the Autler-Townes pair of the drive.
    UpperDoublet,
}

/// Hamiltonian in an equivalent basis together with the basis change used.
pub fn equivalent_scheme(
    p: &SystemParams,
    delta: f64,
    which: EquivalentScheme,
) -> Result<(Hamiltonian, Unitary), CoherentError> {
    let u = scheme_unitary(p, which)?;
    let h = build_hamiltonian(p, delta);
    Ok((Hamiltonian(u.conjugate(h.matrix())), u))
}

pub fn scheme_unitary(p: &SystemParams, which: EquivalentScheme) -> Result<Unitary, CoherentError> {
    let (a, cc, d, b) = (
        Level::A.index(),
        Level::C.index(),
        Level::D.index(),
        Level::B.index(),
    );
    let mut u = Mat4::zeros();
    match which {
        EquivalentScheme::LowerDoublet => {
            if p.delta_c != 0.0 {
                return Err(CoherentError::UnsupportedDetuning(p.delta_c));
            }
            let s = c(std::f64::consts::FRAC_1_SQRT_2);
            u[(a, a)] = c(1.0);
            u[(1, cc)] = s;
            u[(1, d)] = s;
            u[(2, cc)] = s;
            u[(2, d)] = -s;
            u[(b, b)] = c(1.0);
        }
        EquivalentScheme::UpperDoublet => {
            let ((_, vp), (_, vm)) = autler_townes(p.omega, p.delta0);
            u[(0, a)] = c(vp[0]);
            u[(0, cc)] = c(vp[1]);
            u[(1, a)] = c(vm[0]);
            u[(1, cc)] = c(vm[1]);
            u[(d, d)] = c(1.0);
            u[(b, b)] = c(1.0);
        }
    }
    Ok(Unitary(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;
    use approx::assert_abs_diff_eq;

    fn re(m: &Mat4, i: usize, j: usize) -> f64 {
        assert_eq!(m[(i, j)].im, 0.0);
        m[(i, j)].re
    }

    #[test]
    fn hamiltonian_entries() {
        let p = SystemParams {
            probe: 0.01,
            ..presets::split_dark_lines()
        };
        let h = build_hamiltonian(&p, 0.5);
        let expected = [
            [0.0, 1.0, 0.0, 0.01],
            [1.0, 0.0, 0.2, 0.0],
            [0.0, 0.2, 0.0, 0.0],
            [0.01, 0.0, 0.0, -0.5],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, value) in row.iter().enumerate() {
                assert_eq!(re(h.matrix(), i, j), -value, "entry ({i}, {j})");
            }
        }
    }

    #[test]
    fn hamiltonian_zero_when_everything_off() {
        let p = SystemParams {
            omega: 0.0,
            omega_c: 0.0,
            probe: 0.0,
            ..presets::split_dark_lines()
        };
        assert_eq!(*build_hamiltonian(&p, 0.0).matrix(), Mat4::zeros());
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let p = SystemParams {
            delta0: 0.3,
            delta_c: -0.7,
            ..presets::gain()
        };
        let h = build_hamiltonian(&p, 1.3);
        assert_eq!(h.hermiticity_error(), 0.0);
    }

    #[test]
    fn exact_dressed_split_dark_lines() {
        let set = dressed_exact(&presets::split_dark_lines()).unwrap();
        let r = 1.04f64.sqrt();
        assert_abs_diff_eq!(set.plus.frequency, -r, epsilon = 1e-12);
        assert_abs_diff_eq!(set.minus.frequency, r, epsilon = 1e-12);
        assert_abs_diff_eq!(set.zero.frequency, 0.0, epsilon = 1e-12);
        assert!(set.orthonormality_error() < 1e-10);
    }

    #[test]
    fn exact_vectors_are_eigenvectors() {
        let p = SystemParams {
            delta0: 0.4,
            delta_c: -0.3,
            ..presets::split_dark_lines()
        };
        let set = dressed_exact(&p).unwrap();
        let m = manifold_matrix(&p, p.omega_c);
        for s in set.states() {
            let v = Vector3::new(s.amplitudes[0].re, s.amplitudes[1].re, s.amplitudes[2].re);
            assert!((m * v - v * s.frequency).norm() < 1e-10);
        }
    }

    #[test]
    fn exact_decoupled_perturbation() {
        let p = SystemParams {
            omega_c: 0.0,
            delta_c: 0.37,
            ..presets::split_dark_lines()
        };
        let set = dressed_exact(&p).unwrap();
        assert_eq!(set.zero.frequency, 0.37);
        assert_eq!(set.zero.amplitudes, [c(0.0), c(0.0), c(1.0)]);
    }

    #[test]
    fn exact_autler_townes_limit() {
        let p = SystemParams {
            omega_c: 0.0,
            delta_c: 0.5,
            omega: 1.3,
            ..presets::split_dark_lines()
        };
        let set = dressed_exact(&p).unwrap();
        assert_abs_diff_eq!(set.plus.frequency, -1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(set.minus.frequency, 1.3, epsilon = 1e-15);
    }

    #[test]
    fn exact_reports_degeneracy() {
        // Intersection at Omega_c = 0: |-> and |d> both at +1.
        let p = SystemParams {
            omega_c: 0.0,
            ..presets::intersecting()
        };
        match dressed_exact(&p) {
            Err(CoherentError::DegenerateSpectrum(set)) => assert!(!set.labeled),
            other => panic!("expected degeneracy, got {other:?}"),
        }
        // Finite Omega_c lifts the crossing.
        assert!(dressed_exact(&presets::intersecting()).is_ok());
    }

    #[test]
    fn perturbative_split_dark_lines() {
        let p = presets::split_dark_lines();
        let set = dressed_perturbative(&p).unwrap();
        assert_eq!(set.zero.frequency, 0.0);
        assert_abs_diff_eq!(set.zero.amplitudes[0].re, -0.2, epsilon = 1e-15);
        assert_eq!(set.omega_tilde_sq, 1.0);
        let exact = dressed_exact(&p).unwrap();
        for (a, b) in set.frequencies().iter().zip(exact.frequencies()) {
            assert!((a - b).abs() <= 5.0 * 0.04);
        }
    }

    #[test]
    fn perturbative_amplitudes_close_to_exact() {
        let p = SystemParams {
            omega_c: 0.02,
            delta0: 0.3,
            delta_c: -0.4,
            ..presets::split_dark_lines()
        };
        let pert = dressed_perturbative(&p).unwrap();
        let exact = dressed_exact(&p).unwrap();
        for (a, b) in pert.states().iter().zip(exact.states()) {
            let ov = a.overlap(b).norm();
            assert!(
                (ov - 1.0).abs() < 10.0 * p.omega_c * p.omega_c,
                "overlap {ov}"
            );
            assert!((a.norm_sqr() - 1.0).abs() < 10.0 * p.omega_c * p.omega_c);
        }
    }

    #[test]
    fn perturbative_reduces_without_coupling() {
        let p = SystemParams {
            omega_c: 0.0,
            ..presets::split_dark_lines()
        };
        let pert = dressed_perturbative(&p).unwrap();
        let exact = dressed_exact(&p).unwrap();
        assert_eq!(pert.zero.amplitudes, [c(0.0), c(0.0), c(1.0)]);
        assert_eq!(pert.zero, exact.zero);
    }

    #[test]
    fn perturbative_guard_at_intersection() {
        let err = dressed_perturbative(&presets::intersecting()).unwrap_err();
        assert!(
            matches!(err, CoherentError::ValidityViolated { omega_tilde_sq, .. } if omega_tilde_sq == 0.0)
        );
    }

    #[test]
    fn lower_doublet_scheme() {
        let (h, u) = equivalent_scheme(
            &presets::split_dark_lines(),
            0.0,
            EquivalentScheme::LowerDoublet,
        )
        .unwrap();
        let m = h.matrix();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(m[(0, 1)].norm(), s, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 2)].norm(), s, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 1)].re, -0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(2, 2)].re, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 2)].norm(), 0.0, epsilon = 1e-15);
        // probe coupling untouched
        assert_eq!(
            m[(0, 3)],
            build_hamiltonian(&presets::split_dark_lines(), 0.0).0[(0, 3)]
        );
        assert!(u.unitarity_error() < 1e-12);
    }

    #[test]
    fn lower_doublet_rejects_detuned_perturbation() {
        assert_eq!(
            equivalent_scheme(
                &presets::intersecting(),
                0.0,
                EquivalentScheme::LowerDoublet
            )
            .unwrap_err(),
            CoherentError::UnsupportedDetuning(1.0)
        );
    }

    #[test]
    fn upper_doublet_scheme() {
        let p = presets::split_dark_lines();
        let (h, u) = equivalent_scheme(&p, 0.0, EquivalentScheme::UpperDoublet).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let um = u.matrix();
        assert_abs_diff_eq!(um[(0, 0)].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(um[(0, 1)].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(um[(1, 0)].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(um[(1, 1)].re, -s, epsilon = 1e-15);
        assert_abs_diff_eq!(h.matrix()[(0, 0)].re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.matrix()[(1, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        assert!(u.unitarity_error() < 1e-12);
    }

    #[test]
    fn scheme_preserves_spectrum() {
        let p = SystemParams {
            delta0: 0.25,
            probe: 0.05,
            ..presets::split_dark_lines()
        };
        for which in [
            EquivalentScheme::LowerDoublet,
            EquivalentScheme::UpperDoublet,
        ] {
            let (h2, _) = equivalent_scheme(&p, 0.3, which).unwrap();
            let before = build_hamiltonian(&p, 0.3).eigenvalues();
            for (x, y) in before.iter().zip(h2.eigenvalues()) {
                assert_abs_diff_eq!(*x, y, epsilon = 1e-10);
            }
        }
    }
}
