//! JSON matrix format: `{"format": "matrix-triplets/1", "rows", "cols",
//! "entries": [[row, col, re, im], ...]}` with zero entries omitted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, Csr};
use crate::scalar::{Real, C};

pub const MATRIX_FORMAT: &str = "matrix-triplets/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub format: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64, f64)>,
}

impl MatrixJson {
    pub fn from_csr<T: Real>(m: &Csr<T>) -> Self {
        Self {
            format: MATRIX_FORMAT.into(),
            rows: m.dim(),
            cols: m.dim(),
            entries: m.triplets().into_iter().map(|(i, j, v)| (i, j, v.to_f64_lossy(), 0.0)).collect(),
        }
    }

    pub fn from_dense<T: Real>(m: &CMat<T>) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = m[(i, j)];
                if z.re != T::zero() || z.im != T::zero() {
                    entries.push((i, j, z.re.to_f64_lossy(), z.im.to_f64_lossy()));
                }
            }
        }
        Self {
            format: MATRIX_FORMAT.into(),
            rows: m.rows(),
            cols: m.cols(),
            entries,
        }
    }

    pub fn to_dense<T: Real>(&self) -> Result<CMat<T>> {
        if self.format != MATRIX_FORMAT {
            return Err(Error::InvalidInput(format!("unsupported matrix format {:?}", self.format)));
        }
        let mut m = CMat::zeros(self.rows, self.cols);
        for &(i, j, re, im) in &self.entries {
            if i >= self.rows || j >= self.cols {
                return Err(Error::InvalidInput(format!("entry ({i}, {j}) out of range")));
            }
            m[(i, j)] += C::new(T::lit(re), T::lit(im));
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))
    }
}
