//! Formal Fatou coordinate Ψ(f(z)) = Ψ(z) + 1 of a parabolic germ, and the
//! analytic continuation of orbits it gives.
//!
//! Ψ(z) = Σ_{j=−k}^{−1} c_j z^j + μ·log z + Σ_{j=1}^{m} c_j z^j, with the
//! free constant set to 0. The series diverges in general but is very
//! accurate at the moduli where orbits are truncated.

use crate::error::{Error, Result};
use crate::germ::Germ;
use crate::series;
use nalgebra::DMatrix;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct FatouCoordinate {
    k: usize,
    /// c_{−k}, …, c_{−1}.
    negative: Vec<Complex64>,
    /// c_1, …, c_m.
    positive: Vec<Complex64>,
    /// Coefficient of log z; equals λ/(2πi) in the extended normal form.
    log_coeff: Complex64,
}

impl FatouCoordinate {
    /// Solve for the coefficients up to z^m.
    pub fn new(g: &Germ, m: usize) -> Result<Self> {
        let (k, a) = g.parabolic_leading()?;
        let top = k + m;
        let len = top + k + 2;
        // w = (f(z) − z)/z
        let mut w = series::zeros(len);
        for (i, slot) in w.iter_mut().enumerate().skip(1) {
            *slot = g.coeff(i + 1);
        }
        let log_series = series::log1p(&w, len);
        let shifted = |j: i64| -> series::Series {
            let mut e = series::pow1p(&w, Complex64::new(j as f64, 0.0), len);
            e[0] -= 1.0;
            e
        };
        let exponents: Vec<i64> = (-(k as i64)..=(m as i64)).filter(|&j| j != 0).collect();
        let shifts: Vec<series::Series> = exponents.iter().map(|&j| shifted(j)).collect();
        let mut coeff = vec![ZERO; exponents.len()];
        let mut log_coeff = ZERO;
        for s in 0..=top as i64 {
            let unknown = s - k as i64;
            let mut known = if s == 0 { Complex64::new(1.0, 0.0) } else { ZERO };
            for (idx, &j) in exponents.iter().enumerate() {
                if j < unknown {
                    let pos = s - j;
                    if pos >= 0 && (pos as usize) < len {
                        known -= coeff[idx] * shifts[idx][pos as usize];
                    }
                }
            }
            if s > k as i64 {
                known -= log_coeff * log_series[s as usize];
            }
            if unknown == 0 {
                log_coeff = known / a;
            } else {
                let idx = exponents.iter().position(|&j| j == unknown).expect("exponent in range");
                coeff[idx] = known / (a * unknown as f64);
            }
        }
        Ok(Self {
            k,
            negative: coeff[..k].to_vec(),
            positive: coeff[k..].to_vec(),
            log_coeff,
        })
    }

    pub fn log_coeff(&self) -> Complex64 {
        self.log_coeff
    }

    /// Ψ(z) with log z continued from `reference` (log reference taken principal).
    pub fn eval(&self, z: Complex64, reference: Complex64) -> Complex64 {
        let log = reference.ln() + (z / reference).ln();
        let inv = z.inv();
        let mut acc = ZERO;
        for c in &self.negative {
            acc = acc * inv + c;
        }
        acc *= inv;
        let pos = self.positive.iter().rev().fold(ZERO, |s, c| s * z + c) * z;
        acc + pos + self.log_coeff * log
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = self.log_coeff / z;
        for (i, c) in self.negative.iter().enumerate() {
            let j = i as i32 - self.k as i32;
            acc += c * j as f64 * z.powi(j - 1);
        }
        for (i, c) in self.positive.iter().enumerate() {
            let j = i as i32 + 1;
            acc += c * j as f64 * z.powi(j - 1);
        }
        acc
    }

    /// Solve Ψ(z) = t by Newton from `guess`, continuing log z from `reference`.
    pub fn invert(&self, t: Complex64, guess: Complex64, reference: Complex64) -> Result<Complex64> {
        let mut z = guess;
        for _ in 0..60 {
            let step = (self.eval(z, reference) - t) / self.derivative(z);
            z -= step;
            if step.norm() <= 1e-15 * z.norm() {
                return Ok(z);
            }
        }
        Err(Error::Numeric(format!("Fatou coordinate inversion did not converge at t = {t}")))
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1] (Golub–Welsch).
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            let m = i.max(j) as f64;
            m / (4.0 * m * m - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigen();
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}
