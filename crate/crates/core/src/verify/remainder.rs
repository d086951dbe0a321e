use num_complex::Complex64;
use serde::Serialize;

use super::VerifyError;
use crate::expr::{taylor_coeffs, Symbol};

const CONVERGED_REL: f64 = 1e-12;
const DIVERGENCE_WINDOW: usize = 10;

/// A claim `|d_j| <= C R^j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthCertificate {
    pub c: f64,
    pub r: f64,
}

impl GrowthCertificate {
    /// Smallest `R` consistent with the prefix relative to `|d_0|` (or to 1
    /// when `d_0 = 0`), and the matching `C`.
    pub fn fit(d: &[Complex64]) -> Self {
        let base = d.first().map(|x| x.norm()).filter(|x| *x > 0.0).unwrap_or(1.0);
        let r = d
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, x)| (x.norm() / base).powf(1.0 / j as f64))
            .fold(0.0, f64::max);
        let c = d
            .iter()
            .enumerate()
            .map(|(j, x)| if r > 0.0 { x.norm() / r.powi(j as i32) } else { x.norm() })
            .fold(0.0, f64::max);
        GrowthCertificate { c, r }
    }

    /// First index where the prefix breaks the claim.
    pub fn violation(&self, d: &[Complex64]) -> Option<usize> {
        d.iter()
            .enumerate()
            .position(|(j, x)| x.norm() > self.c * self.r.powi(j as i32) * (1.0 + 1e-12))
    }

    /// `R < 1` is what guarantees convergence for entire `f`.
    pub fn guarantees_convergence(&self) -> bool {
        self.r < 1.0
    }
}

/// `r_d(s) = sum_{n>=1} sum_{j=1..n} c_n d_{j-1} s^(n-j)` with
/// `c_n = f^(n)(0)/n!`. Entries of `d` beyond the stored prefix count as
/// zero.
#[derive(Clone, Debug)]
pub struct RemainderSeries {
    d: Vec<Complex64>,
    coeffs: Vec<Complex64>,
    abscissa: f64,
    certificate: GrowthCertificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RemainderValue {
    #[serde(serialize_with = "crate::cjson::one")]
    pub value: Complex64,
    pub converged: bool,
    pub terms: usize,
}

impl RemainderSeries {
    pub fn new(f: &Symbol, d: Vec<Complex64>, n_trunc: usize) -> Result<Self, VerifyError> {
        if n_trunc == 0 {
            return Err(VerifyError::BadTruncation);
        }
        let coeffs = taylor_coeffs(&f.expr, n_trunc, f.taylor_radius())?.coeffs;
        let certificate = GrowthCertificate::fit(&d);
        Ok(RemainderSeries {
            d,
            coeffs,
            abscissa: f.region.abscissa(),
            certificate,
        })
    }

    /// Replaces the fitted certificate by a claimed one, checked on the
    /// prefix.
    pub fn with_certificate(mut self, cert: GrowthCertificate) -> Result<Self, VerifyError> {
        if let Some(j) = cert.violation(&self.d) {
            return Err(VerifyError::Certificate {
                c: cert.c,
                r: cert.r,
                j,
            });
        }
        self.certificate = cert;
        Ok(self)
    }

    pub fn certificate(&self) -> GrowthCertificate {
        self.certificate
    }

    pub fn n_trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, s: Complex64) -> Result<RemainderValue, VerifyError> {
        if s.re <= self.abscissa {
            return Err(VerifyError::OutsideRegion {
                s,
                abscissa: self.abscissa,
            });
        }
        let zero = Complex64::new(0.0, 0.0);
        // inner_n = sum_{j=1..n} d_{j-1} s^(n-j) = s inner_{n-1} + d_{n-1}
        let mut inner = zero;
        let mut sum = zero;
        let mut partial = Vec::with_capacity(self.coeffs.len());
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            inner = s * inner + self.d.get(n - 1).copied().unwrap_or(zero);
            sum += c * inner;
            partial.push(sum);
        }
        let settled = |a: Complex64, b: Complex64| (a - b).norm() <= CONVERGED_REL * a.norm().max(1.0);
        let k = partial.len();
        let converged = k >= 3
            && settled(partial[k - 1], partial[k - 2])
            && settled(partial[k - 2], partial[k - 3]);
        if !converged && k >= DIVERGENCE_WINDOW {
            let w = &partial[k - DIVERGENCE_WINDOW..];
            if w.windows(2).all(|p| p[1].norm() > p[0].norm()) {
                return Err(VerifyError::DivergenceDetected {
                    n: k,
                    modulus: sum.norm(),
                });
            }
        }
        Ok(RemainderValue {
            value: sum,
            converged,
            terms: k,
        })
    }
}

/// One-shot evaluation of `r_d(s)` truncated at `n_trunc`.
pub fn build_remainder_series(
    f: &Symbol,
    d: &[Complex64],
    s: Complex64,
    n_trunc: usize,
) -> Result<RemainderValue, VerifyError> {
    RemainderSeries::new(f, d.to_vec(), n_trunc)?.eval(s)
}
