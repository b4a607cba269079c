// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

//! Small fixed-size complex matrices and column-stacking vectorization.

use nalgebra::{Matrix4, SMatrix, SVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat4 = Matrix4<C64>;
/// Superoperator on column-stacked 4x4 matrices.
pub type SuperOp = SMatrix<C64, 16, 16>;
pub type Vec16 = SVector<C64, 16>;

pub const DIM: usize = 4;

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `|row><col|`
pub fn outer(row: usize, col: usize) -> Mat4 {
    let mut m = Mat4::zeros();
    m[(row, col)] = c(1.0);
    m
}

/// Column-stacking: element `(i, j)` goes to index `i + 4 j`.
pub fn vectorize(m: &Mat4) -> Vec16 {
    Vec16::from_iterator(m.iter().copied())
}

pub fn unvectorize(v: &Vec16) -> Mat4 {
    Mat4::from_iterator(v.iter().copied())
}

/// Matrix of `X -> left * X * right` under column stacking: `right^T (x) left`.
pub fn sandwich(left: &Mat4, right: &Mat4) -> SuperOp {
    let mut out = SuperOp::zeros();
    for j in 0..DIM {
        for l in 0..DIM {
            let r = right[(l, j)];
            if r == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..DIM {
                for k in 0..DIM {
                    out[(i + DIM * j, k + DIM * l)] = left[(i, k)] * r;
                }
            }
        }
    }
    out
}

pub fn hermiticity_error(m: &Mat4) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
