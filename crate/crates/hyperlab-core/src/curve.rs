//! Uniformly sampled curves and their CSV representations.
//!
//! A curve is a map from a uniform grid on `[t0, t1]` into points of R^n,
//! sorted root tuples, or matrices. The grid is stored implicitly: index i
//! maps to `t0 + (t1 - t0) * i / N`, which keeps midpoints of symmetric
//! intervals exact.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{HyperError, Result};
use crate::spectral::HermMatrix;

#[derive(Debug, Clone)]
pub struct SampledCurve<T> {
    t0: f64,
    t1: f64,
    values: Vec<T>,
}

impl<T> SampledCurve<T> {
    pub fn new(t0: f64, t1: f64, values: Vec<T>) -> Result<Self> {
        if !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
            return Err(HyperError::InvalidInput(format!(
                "bad curve interval [{}, {}]",
                t0, t1
            )));
        }
        if values.len() < 2 {
            return Err(HyperError::InvalidInput(
                "curve needs at least two samples".into(),
            ));
        }
        Ok(Self { t0, t1, values })
    }

    /// Sample a closure on the uniform grid with `nsteps` cells.
    pub fn sample(t0: f64, t1: f64, nsteps: usize, mut f: impl FnMut(f64) -> T) -> Result<Self> {
        if nsteps < 1 {
            return Err(HyperError::InvalidInput("nsteps must be >= 1".into()));
        }
        let mut values = Vec::with_capacity(nsteps + 1);
        for i in 0..=nsteps {
            let t = t0 + (t1 - t0) * (i as f64 / nsteps as f64);
            values.push(f(t));
        }
        Self::new(t0, t1, values)
    }

    pub fn nsteps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.nsteps() as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + (self.t1 - self.t0) * (i as f64 / self.nsteps() as f64)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.nsteps()).map(|i| self.t(i)).collect()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Apply a fallible map pointwise, tagging failures with the grid index.
    pub fn try_map<U>(&self, mut f: impl FnMut(&T) -> Result<U>) -> Result<SampledCurve<U>> {
        let mut out = Vec::with_capacity(self.values.len());
        for (i, v) in self.values.iter().enumerate() {
            out.push(f(v).map_err(|e| HyperError::TrackingFailure {
                index: i,
                source: Box::new(e),
            })?);
        }
        Ok(SampledCurve {
            t0: self.t0,
            t1: self.t1,
            values: out,
        })
    }
}

fn check_uniform_times(times: &[f64]) -> Result<(f64, f64)> {
    if times.len() < 2 {
        return Err(HyperError::Format("curve CSV needs at least two rows".into()));
    }
    let t0 = times[0];
    let t1 = *times.last().unwrap();
    if !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
        return Err(HyperError::Format(format!(
            "bad time range [{}, {}]",
            t0, t1
        )));
    }
    let n = times.len() - 1;
    for (i, t) in times.iter().enumerate() {
        let expect = t0 + (t1 - t0) * (i as f64 / n as f64);
        if (t - expect).abs() > 1e-9 * (t1 - t0) {
            return Err(HyperError::Format(format!(
                "non-uniform grid at row {}: t = {}, expected {}",
                i, t, expect
            )));
        }
    }
    Ok((t0, t1))
}

fn parse_f64(field: &str, row: usize, col: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| {
        HyperError::Format(format!("row {}, column {}: bad number {:?}", row, col, field))
    })
}

/// Write a point curve as CSV with header `t,c1,...,cn`.
pub fn save_point_csv(curve: &SampledCurve<Vec<f64>>, path: &Path) -> Result<()> {
    let n = curve.values()[0].len();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|j| format!("c{}", j)));
    w.write_record(&header)?;
    for (i, v) in curve.values().iter().enumerate() {
        let mut rec = vec![curve.t(i).to_string()];
        rec.extend(v.iter().map(|x| x.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a point curve from CSV with header `t,c1,...,cn`.
pub fn load_point_csv(path: &Path) -> Result<SampledCurve<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.is_empty() || header.get(0) != Some("t") {
        return Err(HyperError::Format("first CSV column must be `t`".into()));
    }
    let n = header.len() - 1;
    if n == 0 {
        return Err(HyperError::Format("point curve has no coordinate columns".into()));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != n + 1 {
            return Err(HyperError::Format(format!(
                "row {} has {} fields, expected {}",
                i,
                rec.len(),
                n + 1
            )));
        }
        times.push(parse_f64(&rec[0], i, 0)?);
        let mut v = Vec::with_capacity(n);
        for j in 1..=n {
            let x = parse_f64(&rec[j], i, j)?;
            if !x.is_finite() {
                return Err(HyperError::Format(format!(
                    "non-finite sample at row {}, column {}",
                    i, j
                )));
            }
            v.push(x);
        }
        values.push(v);
    }
    let (t0, t1) = check_uniform_times(&times)?;
    SampledCurve::new(t0, t1, values)
}

fn complex_header(m: usize, n: usize) -> Vec<String> {
    let mut header = vec!["t".to_string()];
    for i in 0..m {
        for j in 0..n {
            header.push(format!("re_{}_{}", i, j));
            header.push(format!("im_{}_{}", i, j));
        }
    }
    header
}

/// Infer (m, n) from `re_i_j` / `im_i_j` column names.
fn complex_dims(header: &csv::StringRecord) -> Result<(usize, usize)> {
    if header.is_empty() || header.get(0) != Some("t") {
        return Err(HyperError::Format("first CSV column must be `t`".into()));
    }
    let mut m = 0usize;
    let mut n = 0usize;
    for name in header.iter().skip(1) {
        let parts: Vec<&str> = name.split('_').collect();
        if parts.len() != 3 || (parts[0] != "re" && parts[0] != "im") {
            return Err(HyperError::Format(format!(
                "bad matrix column name {:?}; expected re_i_j / im_i_j",
                name
            )));
        }
        let i: usize = parts[1]
            .parse()
            .map_err(|_| HyperError::Format(format!("bad row index in {:?}", name)))?;
        let j: usize = parts[2]
            .parse()
            .map_err(|_| HyperError::Format(format!("bad column index in {:?}", name)))?;
        m = m.max(i + 1);
        n = n.max(j + 1);
    }
    if header.len() != 1 + 2 * m * n {
        return Err(HyperError::Format(format!(
            "{} matrix columns do not cover a {}x{} complex matrix",
            header.len() - 1,
            m,
            n
        )));
    }
    Ok((m, n))
}

/// Write a complex matrix curve as CSV: `t` then interleaved `re_i_j,im_i_j`
/// in row-major entry order.
pub fn save_complex_csv(curve: &SampledCurve<DMatrix<Complex64>>, path: &Path) -> Result<()> {
    let a0 = &curve.values()[0];
    let (m, n) = (a0.nrows(), a0.ncols());
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&complex_header(m, n))?;
    for (idx, a) in curve.values().iter().enumerate() {
        let mut rec = vec![curve.t(idx).to_string()];
        for i in 0..m {
            for j in 0..n {
                rec.push(a[(i, j)].re.to_string());
                rec.push(a[(i, j)].im.to_string());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a complex matrix curve from interleaved re/im CSV.
pub fn load_complex_csv(path: &Path) -> Result<SampledCurve<DMatrix<Complex64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let (m, n) = complex_dims(&header)?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 1 + 2 * m * n {
            return Err(HyperError::Format(format!(
                "row {} has {} fields, expected {}",
                row,
                rec.len(),
                1 + 2 * m * n
            )));
        }
        times.push(parse_f64(&rec[0], row, 0)?);
        let mut a = DMatrix::<Complex64>::zeros(m, n);
        let mut col = 1usize;
        for i in 0..m {
            for j in 0..n {
                let re = parse_f64(&rec[col], row, col)?;
                let im = parse_f64(&rec[col + 1], row, col + 1)?;
                if !re.is_finite() || !im.is_finite() {
                    return Err(HyperError::Format(format!(
                        "non-finite entry at row {}, column {}",
                        row, col
                    )));
                }
                a[(i, j)] = Complex64::new(re, im);
                col += 2;
            }
        }
        values.push(a);
    }
    let (t0, t1) = check_uniform_times(&times)?;
    SampledCurve::new(t0, t1, values)
}

/// Write a Hermitian matrix curve; same layout as the complex curve CSV
/// (full square matrix, interleaved re/im, row-major).
pub fn save_herm_csv(curve: &SampledCurve<HermMatrix>, path: &Path) -> Result<()> {
    let values: Vec<DMatrix<Complex64>> = curve
        .values()
        .iter()
        .map(|h| h.entries().clone())
        .collect();
    let as_complex = SampledCurve::new(curve.t0(), curve.t1(), values)?;
    save_complex_csv(&as_complex, path)
}

/// Read a Hermitian matrix curve; entries are validated and symmetrized
/// per the `HermMatrix` loader contract.
pub fn load_herm_csv(path: &Path) -> Result<SampledCurve<HermMatrix>> {
    let raw = load_complex_csv(path)?;
    raw.try_map(|a| {
        if a.nrows() != a.ncols() {
            return Err(HyperError::DimensionMismatch {
                context: format!("Hermitian curve sample is {}x{}", a.nrows(), a.ncols()),
            });
        }
        HermMatrix::new(a.clone())
    })
}
