use crate::error::{Error, Result};
use crate::model::{CtmgModel, LocationId};

use super::Objective;

/// Per-location reachability probability sampled on an ascending time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction {
    times: Vec<f64>,
    /// Row-major, one row of `width` values per time.
    values: Vec<f64>,
    width: usize,
    switch_points: Vec<f64>,
    objective: Option<Objective>,
}

impl ValueFunction {
    /// `rows` must be sorted by ascending time.
    pub(crate) fn from_rows(
        rows: Vec<(f64, Vec<f64>)>,
        width: usize,
        switch_points: Vec<f64>,
        objective: Option<Objective>,
    ) -> Self {
        let mut times = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len() * width);
        for (t, row) in rows {
            debug_assert_eq!(row.len(), width);
            times.push(t);
            values.extend(row);
        }
        Self {
            times,
            values,
            width,
            switch_points,
            objective,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn get(&self, i: usize, l: LocationId) -> f64 {
        self.values[i * self.width + l.0]
    }

    pub fn series(&self, l: LocationId) -> Vec<f64> {
        (0..self.times.len()).map(|i| self.get(i, l)).collect()
    }

    pub fn switch_points(&self) -> &[f64] {
        &self.switch_points
    }

    /// `None` for the value of a fixed scheduler.
    pub fn objective(&self) -> Option<Objective> {
        self.objective
    }

    pub fn time_bound(&self) -> f64 {
        *self.times.last().expect("non-empty grid")
    }

    /// Values at `t = 0`.
    pub fn initial_row(&self) -> &[f64] {
        self.row(0)
    }

    /// Initial-distribution weighted value at `t = 0`.
    pub fn weighted_initial(&self, model: &CtmgModel) -> f64 {
        model
            .initial()
            .iter()
            .zip(self.initial_row())
            .map(|(m, v)| m * v)
            .sum()
    }

    /// Monotone piecewise-cubic Hermite interpolation; exact on grid points.
    pub fn value_at(&self, l: LocationId, t: f64) -> Result<f64> {
        let bound = self.time_bound();
        if !(0.0..=bound).contains(&t) || l.0 >= self.width {
            return Err(Error::TimeOutOfRange { t, bound });
        }
        let n = self.times.len();
        let k = self.times.partition_point(|&x| x < t);
        if k < n && self.times[k] == t {
            return Ok(self.get(k, l));
        }
        // t lies strictly inside (times[k-1], times[k])
        let i = k - 1;
        let (x0, x1) = (self.times[i], self.times[i + 1]);
        let (y0, y1) = (self.get(i, l), self.get(i + 1, l));
        let h = x1 - x0;
        let secant = |j: usize| -> f64 {
            (self.get(j + 1, l) - self.get(j, l)) / (self.times[j + 1] - self.times[j])
        };
        let d = secant(i);
        let slope = |j: usize| -> f64 {
            if n == 2 {
                return secant(0);
            }
            if j == 0 || j == n - 1 {
                // one-sided three-point estimate, limited to keep monotonicity
                let (i0, i1) = if j == 0 { (0, 1) } else { (n - 2, n - 3) };
                let h0 = self.times[i0 + 1] - self.times[i0];
                let h1 = self.times[i1 + 1] - self.times[i1];
                let (d0, d1) = (secant(i0), secant(i1));
                let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
                return if m * d0 <= 0.0 {
                    0.0
                } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
                    3.0 * d0
                } else {
                    m
                };
            }
            let (d0, d1) = (secant(j - 1), secant(j));
            if d0 * d1 <= 0.0 {
                return 0.0;
            }
            let h0 = self.times[j] - self.times[j - 1];
            let h1 = self.times[j + 1] - self.times[j];
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            (w1 + w2) / (w1 / d0 + w2 / d1)
        };
        let (m0, m1) = if d == 0.0 { (0.0, 0.0) } else { (slope(i), slope(i + 1)) };
        let s = (t - x0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Ok(h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1)
    }
}
