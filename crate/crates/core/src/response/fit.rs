// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::storage::Owned;
use nalgebra::{DVector, Dyn, OMatrix, Vector4, U4};
use serde::Serialize;

use super::ResponseError;

/// `baseline + amplitude * hwhm^2 / ((x - center)^2 + hwhm^2)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzianFit {
    pub center: f64,
    pub hwhm: f64,
    pub amplitude: f64,
    pub baseline: f64,
    pub rms_residual: f64,
}

impl LorentzianFit {
    pub fn eval(&self, x: f64) -> f64 {
        let w2 = self.hwhm * self.hwhm;
        self.baseline + self.amplitude * w2 / ((x - self.center).powi(2) + w2)
    }
}

struct Problem<'a> {
    x: &'a [f64],
    y: &'a [f64],
    // center, hwhm, amplitude, baseline
    params: Vector4<f64>,
}

impl LeastSquaresProblem<f64, Dyn, U4> for Problem<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, U4>;
    type ParameterStorage = Owned<f64, U4>;

    fn set_params(&mut self, params: &Vector4<f64>) {
        self.params = *params;
    }

    fn params(&self) -> Vector4<f64> {
        self.params
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let [x0, w, a, b] = self.params.into();
        let w2 = w * w;
        Some(DVector::from_iterator(
            self.x.len(),
            self.x
                .iter()
                .zip(self.y)
                .map(|(x, y)| b + a * w2 / ((x - x0).powi(2) + w2) - y),
        ))
    }

    fn jacobian(&self) -> Option<OMatrix<f64, Dyn, U4>> {
        let [x0, w, a, _] = self.params.into();
        let w2 = w * w;
        let mut j = OMatrix::<f64, Dyn, U4>::zeros(self.x.len());
        for (row, x) in self.x.iter().enumerate() {
            let u = x - x0;
            let den = u * u + w2;
            let shape = w2 / den;
            j[(row, 0)] = 2.0 * a * w2 * u / (den * den);
            j[(row, 1)] = 2.0 * a * w * u * u / (den * den);
            j[(row, 2)] = shape;
            j[(row, 3)] = 1.0;
        }
        Some(j)
    }
}

/// Least-squares Lorentzian plus constant baseline. Starts from the extreme sample.
pub fn fit_lorentzian(x: &[f64], y: &[f64]) -> Result<LorentzianFit, ResponseError> {
    if x.len() != y.len() || x.len() < 5 {
        return Err(ResponseError::FeatureNotFound(
            "enough samples to fit a lineshape",
        ));
    }
    let (lo, hi) = (x[0], x[x.len() - 1]);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    // The peak is whichever extreme lies farther from the mean.
    let (imax, ymax) = extreme(y, f64::gt);
    let (imin, ymin) = extreme(y, f64::lt);
    let (ipeak, base) = if ymax - mean >= mean - ymin {
        (imax, ymin)
    } else {
        (imin, ymax)
    };
    let start = Vector4::new(x[ipeak], 0.25 * (hi - lo).abs(), y[ipeak] - base, base);
    let problem = Problem {
        x,
        y,
        params: start,
    };
    let (solved, report) = LevenbergMarquardt::new().minimize(problem);
    if !report.termination.was_successful() {
        return Err(ResponseError::FitFailed);
    }
    let [center, w, amplitude, baseline] = solved.params.into();
    let rms_residual = (2.0 * report.objective_function / x.len() as f64).sqrt();
    Ok(LorentzianFit {
        center,
        hwhm: w.abs(),
        amplitude,
        baseline,
        rms_residual,
    })
}

fn extreme(y: &[f64], better: fn(&f64, &f64) -> bool) -> (usize, f64) {
    let mut best = 0;
    for i in 1..y.len() {
        if better(&y[i], &y[best]) {
            best = i;
        }
    }
    (best, y[best])
}
