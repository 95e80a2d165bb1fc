use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evenly spaced samples `min..=max` with `count >= 2` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid count must be >= 2, got {count}"
            )));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidArgument(format!(
                "grid bounds must satisfy min < max, got {min}:{max}"
            )));
        }
        Ok(Self { min, max, count })
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    /// Parses `min:max:count`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidArgument(format!("grid must be min:max:count, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let min = parts[0].trim().parse().map_err(|_| bad())?;
        let max = parts[1].trim().parse().map_err(|_| bad())?;
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        Axis::new(min, max, count)
    }
}

/// Tensor grid, row-major: the first axis varies slowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub first: Axis,
    pub second: Axis,
}

impl Grid2 {
    pub fn new(first: Axis, second: Axis) -> Self {
        Self { first, second }
    }

    pub fn square(min: f64, max: f64, count: usize) -> Result<Self> {
        let a = Axis::new(min, max, count)?;
        Ok(Self::new(a, a))
    }

    pub fn len(&self) -> usize {
        self.first.count * self.second.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let ys = self.second.points();
        self.first
            .points()
            .into_iter()
            .flat_map(|x| ys.iter().map(move |&y| (x, y)))
            .collect()
    }
}
