//! Piecewise-constant year-indexed schedules for exogenous inputs.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series must contain at least one point")]
    Empty,
    #[error("series years must be strictly increasing: {previous} then {year}")]
    NonIncreasingYears { previous: f64, year: f64 },
    #[error("series point at year {year} has non-finite value {value}")]
    NonFiniteValue { year: f64, value: f64 },
}

/// A step function of time: the value at year `t` is the value of the last
/// point at or before `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, SeriesError> {
        if points.is_empty() {
            return Err(SeriesError::Empty);
        }
        let mut previous = f64::NEG_INFINITY;
        for &(year, value) in &points {
            if !year.is_finite() || year <= previous {
                return Err(SeriesError::NonIncreasingYears { previous, year });
            }
            if !value.is_finite() {
                return Err(SeriesError::NonFiniteValue { year, value });
            }
            previous = year;
        }
        Ok(Self { points })
    }

    /// A schedule that is `value` forever, anchored at `year`.
    pub fn constant(year: f64, value: f64) -> Self {
        Self { points: vec![(year, value)] }
    }

    pub fn first_year(&self) -> f64 {
        self.points[0].0
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Value in effect at `year`, or None before the first point.
    pub fn value_at(&self, year: f64) -> Option<f64> {
        let mut current = None;
        for &(y, v) in &self.points {
            if y <= year {
                current = Some(v);
            } else {
                break;
            }
        }
        current
    }
}
