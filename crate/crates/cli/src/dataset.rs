//! Dataset file format and validation.
//!
//! ```json
//! {"n": 1, "m": 2, "points": [{"x": [0.5], "f": 1.0}, ...]}
//! ```
//!
//! Values must be nonnegative, points distinct and of dimension `n`;
//! this build handles `n <= 2` and `1 <= m <= 4`.

use serde::{Deserialize, Serialize};

pub const MAX_DIM: usize = 2;
pub const MAX_ORDER: usize = 4;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Dataset {
    pub n: usize,
    pub m: usize,
    pub points: Vec<DataPoint>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DataPoint {
    pub x: Vec<f64>,
    pub f: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("dimension n = {0} unsupported (this build handles n <= {MAX_DIM})")]
    BadDim(usize),
    #[error("order m = {0} unsupported (this build handles 1 <= m <= {MAX_ORDER})")]
    BadOrder(usize),
    #[error("record {0}: point has {1} coordinates, dataset says n = {2}")]
    WrongDim(usize, usize, usize),
    #[error("record {0}: value {1} is negative")]
    NegativeValue(usize, f64),
    #[error("record {0}: non-finite entry")]
    NonFinite(usize),
    #[error("records {0} and {1} have the same point")]
    Duplicate(usize, usize),
}

impl Dataset {
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.n == 0 || self.n > MAX_DIM {
            return Err(DatasetError::BadDim(self.n));
        }
        if self.m == 0 || self.m > MAX_ORDER {
            return Err(DatasetError::BadOrder(self.m));
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.x.len() != self.n {
                return Err(DatasetError::WrongDim(i, p.x.len(), self.n));
            }
            if !p.f.is_finite() || p.x.iter().any(|c| !c.is_finite()) {
                return Err(DatasetError::NonFinite(i));
            }
            if p.f < 0.0 {
                return Err(DatasetError::NegativeValue(i, p.f));
            }
            for (j, q) in self.points.iter().enumerate().take(i) {
                if p.x == q.x {
                    return Err(DatasetError::Duplicate(j, i));
                }
            }
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.x.clone()).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.f).collect()
    }
}
