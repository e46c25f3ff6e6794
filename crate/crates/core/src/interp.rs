//! Piecewise Hermite interpolation on uniform grids.

/// Uniform grid `start + i * step`, `i = 0..len`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformGrid {
    /// Splits `[a, b]` into the smallest number of equal steps not longer than `max_step`.
    pub fn covering(a: f64, b: f64, max_step: f64) -> Self {
        let n = ((b - a) / max_step - 1e-9).ceil().max(1.0) as usize;
        UniformGrid { start: a, step: (b - a) / n as f64, len: n + 1 }
    }

    pub fn at(&self, i: usize) -> f64 {
        if i + 1 == self.len {
            self.end()
        } else {
            self.start + i as f64 * self.step
        }
    }

    pub fn end(&self) -> f64 {
        self.start + (self.len - 1) as f64 * self.step
    }

    /// Interval index and local coordinate `s` in `[0, 1]`.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let raw = (x - self.start) / self.step;
        let i = (raw.floor().max(0.0) as usize).min(self.len - 2);
        (i, raw - i as f64)
    }
}

/// Cubic Hermite value and derivative on an interval of width `h`.
pub(crate) fn hermite3(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, s: f64) -> (f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * s2 - 6.0 * s;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = -6.0 * s2 + 6.0 * s;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let deriv = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (value, deriv)
}

/// Quintic Hermite value from values, first and second derivatives at both ends.
pub(crate) fn hermite5(left: [f64; 3], right: [f64; 3], h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let b0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let b1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let b2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    let b3 = 0.5 * s3 - s4 + 0.5 * s5;
    let b4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let b5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    b0 * left[0] + b1 * h * left[1] + b2 * h * h * left[2] + b3 * h * h * right[2] + b4 * h * right[1] + b5 * right[0]
}

/// Fourth-order finite-difference derivative of uniformly spaced samples,
/// one-sided five-point stencils at the two ends of each side.
pub(crate) fn derivative_4th(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "need at least 5 samples, got {n}");
    let y = values;
    (0..n)
        .map(|i| {
            let d = if i == 0 {
                -25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]
            } else if i == 1 {
                -3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]
            } else if i == n - 2 {
                3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5]
            } else if i == n - 1 {
                25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4] + 3.0 * y[n - 5]
            } else {
                y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]
            };
            d / (12.0 * h)
        })
        .collect()
}
