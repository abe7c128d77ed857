//! The variance-profile matrix A.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense real m×n matrix A = (a_ij), stored row-major, with a lazily cached
/// nonincreasing sort of all |a_ij| (the order statistics driving D∞).
///
/// The same type carries the deterministic profile and the sampled matrices
/// X ∘ A produced by the ensembles module: every norm routine operates on a
/// plain dense matrix.
#[derive(Debug, Serialize)]
pub struct VarianceProfile {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    #[serde(skip)]
    sorted_abs: OnceLock<Vec<f64>>,
}

impl Clone for VarianceProfile {
    fn clone(&self) -> Self {
        VarianceProfile {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
            // The cache is cheap to rebuild; don't clone it.
            sorted_abs: OnceLock::new(),
        }
    }
}

impl PartialEq for VarianceProfile {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl VarianceProfile {
    /// `data` is row-major of length `rows * cols`; all entries must be finite
    /// and both dimensions positive.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Domain(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("matrix entries must be finite, got {bad}")));
        }
        Ok(VarianceProfile {
            rows,
            cols,
            data,
            sorted_abs: OnceLock::new(),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Domain("matrix must have at least one row".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Domain("rows must all have the same length".into()));
        }
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major backing slice.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col_iter(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.entry(i, j))
    }

    /// All |a_ij| sorted nonincreasing, computed once and cached.
    pub fn sorted_abs(&self) -> &[f64] {
        self.sorted_abs.get_or_init(|| {
            let mut v: Vec<f64> = self.data.iter().map(|x| x.abs()).collect();
            v.sort_by(|a, b| b.partial_cmp(a).expect("entries are finite"));
            v
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&x| x != 0.0).count()
    }

    pub fn transpose(&self) -> VarianceProfile {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.entry(i, j));
            }
        }
        VarianceProfile {
            rows: self.cols,
            cols: self.rows,
            data,
            sorted_abs: OnceLock::new(),
        }
    }

    pub fn scaled(&self, c: f64) -> Result<VarianceProfile> {
        VarianceProfile::new(self.rows, self.cols, self.data.iter().map(|x| c * x).collect())
    }

    /// y = A t (length m); `t` must have length n.
    pub fn mat_vec(&self, t: &[f64], out: &mut Vec<f64>) {
        debug_assert_eq!(t.len(), self.cols);
        out.clear();
        out.reserve(self.rows);
        for i in 0..self.rows {
            let row = self.row(i);
            // Four independent accumulators break the FP add dependency chain.
            let mut acc = [0.0f64; 4];
            let mut rc = row.chunks_exact(4);
            let mut tc = t.chunks_exact(4);
            for (r4, t4) in (&mut rc).zip(&mut tc) {
                acc[0] += r4[0] * t4[0];
                acc[1] += r4[1] * t4[1];
                acc[2] += r4[2] * t4[2];
                acc[3] += r4[3] * t4[3];
            }
            let mut tail = 0.0;
            for (a, x) in rc.remainder().iter().zip(tc.remainder()) {
                tail += a * x;
            }
            out.push((acc[0] + acc[1]) + (acc[2] + acc[3]) + tail);
        }
    }

    /// x = Aᵀ s (length n); `s` must have length m.
    pub fn mat_tvec(&self, s: &[f64], out: &mut Vec<f64>) {
        debug_assert_eq!(s.len(), self.rows);
        out.clear();
        out.resize(self.cols, 0.0);
        for (i, &si) in s.iter().enumerate() {
            if si == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * si;
            }
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Domain(format!("invalid matrix JSON: {e}")))
    }
}

impl<'de> Deserialize<'de> for VarianceProfile {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rows: usize,
            cols: usize,
            data: Vec<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        VarianceProfile::new(raw.rows, raw.cols, raw.data).map_err(serde::de::Error::custom)
    }
}
