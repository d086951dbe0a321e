use std::io::{Read, Write};

use num_complex::Complex64;
use serde::Serialize;

use super::LaplaceError;

/// Samples of a function on a strictly increasing grid of times `>= 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridFunction {
    times: Vec<f64>,
    #[serde(serialize_with = "crate::cjson::many")]
    values: Vec<Complex64>,
}

/// Checks the shape shared by every time grid: nonempty, finite, starting
/// at or after zero and strictly increasing.
pub fn check_times(times: &[f64]) -> Result<(), LaplaceError> {
    if times.is_empty() {
        return Err(LaplaceError::BadGrid("no sample times".into()));
    }
    for (i, t) in times.iter().enumerate() {
        if !t.is_finite() || *t < 0.0 {
            return Err(LaplaceError::BadGrid(format!(
                "time {t} at index {i} is not a finite value >= 0"
            )));
        }
        if i > 0 && *t <= times[i - 1] {
            return Err(LaplaceError::BadGrid(format!(
                "times not strictly increasing at index {i}"
            )));
        }
    }
    Ok(())
}

/// `n` equally spaced points from `start` to `end` inclusive.
pub fn uniform_times(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    end
                } else {
                    start + (end - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

impl GridFunction {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>) -> Result<Self, LaplaceError> {
        check_times(&times)?;
        if times.len() != values.len() {
            return Err(LaplaceError::BadGrid(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(LaplaceError::BadGrid(format!("non-finite value at index {i}")));
        }
        Ok(GridFunction { times, values })
    }

    /// Tabulates `f` on `times`.
    pub fn tabulate<F>(times: Vec<f64>, f: F) -> Result<Self, LaplaceError>
    where
        F: Fn(f64) -> Complex64,
    {
        let values = times.iter().map(|t| f(*t)).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Pointwise sum with a function on the same grid.
    pub fn add(&self, other: &GridFunction) -> Result<GridFunction, LaplaceError> {
        if self.times != other.times {
            return Err(LaplaceError::BadGrid("grids differ".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        GridFunction::new(self.times.clone(), values)
    }

    /// Largest `|Im phi|` on the grid.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Writes `t,re,im` rows using shortest round-trip decimal formatting.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), LaplaceError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "re", "im"])?;
        for (t, v) in self.iter() {
            w.write_record([t.to_string(), v.re.to_string(), v.im.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is ASCII")
    }

    /// Reads `t,re,im` or `t,value` columns with a header row.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, LaplaceError> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record?;
            let field = |i: usize| -> Result<f64, LaplaceError> {
                record
                    .get(i)
                    .ok_or_else(|| {
                        LaplaceError::BadGrid(format!("row {}: missing column {}", line + 2, i + 1))
                    })?
                    .parse::<f64>()
                    .map_err(|e| LaplaceError::BadGrid(format!("row {}: {e}", line + 2)))
            };
            times.push(field(0)?);
            let im = if record.len() > 2 { field(2)? } else { 0.0 };
            values.push(Complex64::new(field(1)?, im));
        }
        Self::new(times, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let g = GridFunction::tabulate(uniform_times(0.0, 1.0, 5), |t| {
            Complex64::new(t.sin(), -0.1 * t)
        })
        .unwrap();
        let text = g.to_csv_string();
        assert!(text.starts_with("t,re,im\n0,0,"));
        let back = GridFunction::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn real_column_only() {
        let g = GridFunction::read_csv("t,v\n0,1\n0.5,2\n".as_bytes()).unwrap();
        assert_eq!(g.values()[1], Complex64::new(2.0, 0.0));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridFunction::new(vec![0.0, 0.0], vec![Complex64::default(); 2]).is_err());
        assert!(GridFunction::new(vec![-1.0], vec![Complex64::default()]).is_err());
        assert!(GridFunction::new(vec![0.0], vec![]).is_err());
        assert!(GridFunction::new(vec![0.0], vec![Complex64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn uniform_endpoints_are_exact() {
        let t = uniform_times(0.1, 5.0, 491);
        assert_eq!(t[0], 0.1);
        assert_eq!(t[490], 5.0);
    }
}
