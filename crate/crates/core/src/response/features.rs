// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::fit::fit_lorentzian;
use super::{chi, ResponseError, SusceptibilitySample};
use crate::model::{derived_rates, SystemParams};

/// `|Im chi|` below `ZERO_THRESHOLD * eta` counts as transparent.
pub const ZERO_THRESHOLD: f64 = 1e-6;

/// Ratio by which `|omega_tilde^2|` must exceed `omega_c^2` for the perturbative formulas.
const VALIDITY_MARGIN: f64 = 10.0;
/// Relative slack on `Omega^2 = delta_c (delta_c + delta0)` that still counts as intersecting.
const INTERSECTION_SLACK: f64 = 0.1;

const BISECTION_STEPS: usize = 200;
const GOLDEN_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    TransparencyPoint,
    AbsorptionPeak,
    GainDip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureFlag {
    /// Center and width come from first-order perturbation theory in `omega_c`.
    Perturbative,
    /// Height is the `omega_c -> 0` limit, not the exact peak value.
    AsymptoticHeight,
    /// Measured by a Lorentzian fit to sampled data.
    Fitted,
}

/// A resonance descriptor. `width` is the full width at half maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralFeature {
    pub kind: FeatureKind,
    pub center: f64,
    pub width: f64,
    pub height: f64,
    pub validity_flags: Vec<FeatureFlag>,
}

/// Detunings where `chi_analytic` vanishes for atoms at rest in `b`, upper one first.
///
/// With `omega_c = 0` the level `d` decouples and only the point at `delta0` is a zero.
pub fn transparency_points(p: &SystemParams) -> (f64, f64) {
    let mid = p.delta0 + 0.5 * p.delta_c;
    let half = (0.25 * p.delta_c * p.delta_c + p.omega_c * p.omega_c).sqrt();
    (mid + half, mid - half)
}

/// The narrow absorption line between the two transparency points.
pub fn interference_feature(p: &SystemParams) -> Result<SpectralFeature, ResponseError> {
    if p.omega_c == 0.0 {
        return Err(ResponseError::NoInterference);
    }
    let gamma_ab = derived_rates(p).gamma_ab;
    let wt2 = p.omega_tilde_sq();
    let oc2 = p.omega_c * p.omega_c;
    let shifted = wt2 + gamma_ab * p.delta_c;
    if wt2.abs() < VALIDITY_MARGIN * oc2 || shifted.abs() < VALIDITY_MARGIN * oc2 {
        return Err(ResponseError::ValidityViolated {
            omega_tilde_sq: wt2,
            omega_c: p.omega_c,
        });
    }
    let center = (p.delta_c + p.delta0) / (1.0 + oc2 / wt2);
    let width = gamma_ab * (p.omega * p.omega / wt2.abs()) * (2.0 * oc2 / shifted.abs());
    Ok(SpectralFeature {
        kind: FeatureKind::AbsorptionPeak,
        center,
        width,
        height: p.eta / gamma_ab,
        validity_flags: vec![FeatureFlag::Perturbative, FeatureFlag::AsymptoticHeight],
    })
}

/// Width of the transparency line where the dressed energies cross.
pub fn intersection_width(p: &SystemParams) -> Result<f64, ResponseError> {
    let omega_sq = p.omega * p.omega;
    let crossing = p.delta_c * (p.delta_c + p.delta0);
    if p.delta_c == 0.0 || (omega_sq - crossing).abs() > INTERSECTION_SLACK * omega_sq {
        return Err(ResponseError::OutsideRegime { omega_sq, crossing });
    }
    let gamma_ab = derived_rates(p).gamma_ab;
    Ok(2.0 * p.omega_c * p.omega_c * (p.delta0 + p.delta_c) / (gamma_ab * p.delta_c))
}

/// Zeros of `Im chi` located in a sorted single-method scan and refined with that method.
///
/// Sign changes are bisected. Points where `Im chi` only touches zero show up as
/// local minima of `|Im chi|`; those are refined by golden-section search and kept
/// when the minimum is below [`ZERO_THRESHOLD`].
pub fn find_zeros(
    p: &SystemParams,
    samples: &[SusceptibilitySample],
) -> Result<Vec<f64>, ResponseError> {
    let Some(first) = samples.first() else {
        return Ok(Vec::new());
    };
    let method = first.method;
    let consistent = samples.iter().all(|s| s.method == method)
        && samples.windows(2).all(|w| w[0].delta < w[1].delta);
    if !consistent {
        return Err(ResponseError::InvalidSamples);
    }
    let im = |delta: f64| -> Result<f64, ResponseError> {
        chi(p, delta, method)
            .map(|z| z.im)
            .map_err(|source| ResponseError::Dynamics { delta, source })
    };
    let threshold = ZERO_THRESHOLD * p.eta;
    let y: Vec<f64> = samples.iter().map(|s| s.chi.im).collect();
    let x: Vec<f64> = samples.iter().map(|s| s.delta).collect();
    let mut zeros = Vec::new();

    for i in 0..x.len() {
        if y[i] == 0.0 {
            zeros.push(x[i]);
        }
        if i + 1 < x.len() && y[i] * y[i + 1] < 0.0 {
            zeros.push(bisect(&im, x[i], x[i + 1], y[i])?);
        }
    }
    for i in 1..x.len().saturating_sub(1) {
        let (l, m, r) = (y[i - 1], y[i], y[i + 1]);
        let same_sign = l * m > 0.0 && m * r > 0.0;
        if same_sign && m.abs() <= l.abs() && m.abs() < r.abs() {
            let (at, value) = golden_min_abs(&im, x[i - 1], x[i + 1])?;
            if value.abs() < threshold {
                zeros.push(at);
            }
        }
    }
    zeros.sort_by(f64::total_cmp);
    let spacing = x
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    zeros.dedup_by(|a, b| (*a - *b).abs() < 0.5 * spacing);
    Ok(zeros)
}

fn bisect(
    f: &impl Fn(f64) -> Result<f64, ResponseError>,
    mut lo: f64,
    mut hi: f64,
    f_lo: f64,
) -> Result<f64, ResponseError> {
    let lo_positive = f_lo > 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_min_abs(
    f: &impl Fn(f64) -> Result<f64, ResponseError>,
    mut lo: f64,
    mut hi: f64,
) -> Result<(f64, f64), ResponseError> {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1)?.abs();
    let mut f2 = f(x2)?.abs();
    for _ in 0..GOLDEN_STEPS {
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?.abs();
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?.abs();
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Lorentzian fit to `Im chi` over the samples strictly inside `(lo, hi)`.
pub fn measure_peak(
    samples: &[SusceptibilitySample],
    lo: f64,
    hi: f64,
) -> Result<SpectralFeature, ResponseError> {
    let (x, y): (Vec<f64>, Vec<f64>) = samples
        .iter()
        .filter(|s| s.delta > lo && s.delta < hi)
        .map(|s| (s.delta, s.chi.im))
        .unzip();
    let fit = fit_lorentzian(&x, &y)?;
    Ok(SpectralFeature {
        kind: if fit.amplitude >= 0.0 {
            FeatureKind::AbsorptionPeak
        } else {
            FeatureKind::GainDip
        },
        center: fit.center,
        width: 2.0 * fit.hwhm,
        height: fit.amplitude + fit.baseline,
        validity_flags: vec![FeatureFlag::Fitted],
    })
}

/// Shape of a sampled absorption dip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DipMeasurement {
    /// Detuning of the lowest sample of the dip.
    pub minimum_at: f64,
    pub minimum: f64,
    /// Mean of the two neighbouring maxima.
    pub shoulder: f64,
    /// Full width at the level halfway between `minimum` and `shoulder`.
    pub width: f64,
}

/// The local minimum of `Im chi` nearest to `near`, measured between its neighbouring maxima.
pub fn measure_dip(
    samples: &[SusceptibilitySample],
    near: f64,
) -> Result<DipMeasurement, ResponseError> {
    let y: Vec<f64> = samples.iter().map(|s| s.chi.im).collect();
    let x: Vec<f64> = samples.iter().map(|s| s.delta).collect();
    let k = (1..y.len().saturating_sub(1))
        .filter(|&i| y[i] <= y[i - 1] && y[i] < y[i + 1])
        .min_by(|&a, &b| (x[a] - near).abs().total_cmp(&(x[b] - near).abs()))
        .ok_or(ResponseError::FeatureNotFound("absorption dip"))?;

    let mut left = k;
    while left > 0 && y[left - 1] >= y[left] {
        left -= 1;
    }
    let mut right = k;
    while right + 1 < y.len() && y[right + 1] >= y[right] {
        right += 1;
    }
    let shoulder = 0.5 * (y[left] + y[right]);
    let level = 0.5 * (y[k] + shoulder);
    if y[left] < level || y[right] < level {
        return Err(ResponseError::FeatureNotFound(
            "dip with two shoulders above half depth",
        ));
    }
    let crossing = |from: usize, step: isize| {
        let mut i = from;
        loop {
            let j = (i as isize + step) as usize;
            if y[j] >= level {
                let t = (level - y[i]) / (y[j] - y[i]);
                return x[i] + t * (x[j] - x[i]);
            }
            i = j;
        }
    };
    let width = crossing(k, 1) - crossing(k, -1);
    Ok(DipMeasurement {
        minimum_at: x[k],
        minimum: y[k],
        shoulder,
        width,
    })
}
