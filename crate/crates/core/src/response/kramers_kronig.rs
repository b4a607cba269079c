// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

/// `Re chi(at) = (1/pi) P int Im chi(x) / (at - x) dx` over the sampled range.
///
/// `x` must be strictly increasing and `at` inside `(x[0], x[n-1])`. The pole is
/// removed by subtracting `Im chi(at)` and integrating the remainder with the
/// trapezoidal rule; the subtracted piece is done in closed form.
pub fn kramers_kronig_real(x: &[f64], im: &[f64], at: f64) -> f64 {
    assert_eq!(x.len(), im.len(), "abscissae and values differ in length");
    let n = x.len();
    assert!(
        n >= 3 && at > x[0] && at < x[n - 1],
        "evaluation point outside the sampled range"
    );
    let f_at = interpolate(x, im, at);
    let slope_at = slope(x, im, at);
    let g = |i: usize| {
        let d = at - x[i];
        if d == 0.0 {
            -slope_at
        } else {
            (im[i] - f_at) / d
        }
    };
    let body: f64 = (0..n - 1)
        .map(|i| 0.5 * (g(i) + g(i + 1)) * (x[i + 1] - x[i]))
        .sum();
    let tail = f_at * ((at - x[0]) / (x[n - 1] - at)).ln();
    (body + tail) / std::f64::consts::PI
}

fn segment(x: &[f64], at: f64) -> usize {
    x.partition_point(|v| *v <= at).clamp(1, x.len() - 1) - 1
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    let i = segment(x, at);
    let t = (at - x[i]) / (x[i + 1] - x[i]);
    y[i] + t * (y[i + 1] - y[i])
}

fn slope(x: &[f64], y: &[f64], at: f64) -> f64 {
    let i = segment(x, at);
    let (l, r) = (i.saturating_sub(1), (i + 2).min(x.len() - 1));
    (y[r] - y[l]) / (x[r] - x[l])
}
