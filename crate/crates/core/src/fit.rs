//! Asymptotic coefficients from ε-sweeps.
//!
//! Planar sweeps of a parabolic orbit with multiplicity index k are expanded
//! in t = ε^{1/(k+1)}. The area, the real part and the imaginary part of the
//! complex measure (in the frame of the attracting direction ν) each have a
//! short, well-conditioned expansion. The directed area is A·CM/|CM|, so its
//! coefficients follow from those three fits:
//!
//! * directed content K₁ = M·ν, with M the leading area coefficient;
//! * residual content K_{k+1} = ν·(area ε²logε coefficient + i·M·γ/β), with
//!   β the leading coefficient of Re(CM/ν) and γ the ε^{2+1/(k+1)}logε
//!   coefficient of Im(CM/ν).
//!
//! Fitting the directed area directly is badly biased: its expansion contains
//! cross terms between the initial-point dependent ε² part of the complex
//! measure and the large subleading terms of |CM|.

use crate::error::{Error, Result};
use crate::germ::Germ;
use crate::neighborhood::{EpsSweep, SweepKind};
use crate::orbit::attracting_directions;
use crate::special::{beta, gamma};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance for snapping d/(1−d) to an integer.
pub const SNAP_TOLERANCE: f64 = 0.15;
/// Condition number above which a fit is flagged.
pub const CONDITION_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFit {
    pub coeffs: Vec<f64>,
    /// Ratio of extreme singular values after scaling columns to unit norm.
    pub condition: f64,
    /// RMS residual, in the units of the fitted values.
    pub residual: f64,
}

impl LinearFit {
    /// RMS residual relative to |coeffs[index]|.
    pub fn relative_residual(&self, index: usize) -> f64 {
        self.residual / self.coeffs[index].abs()
    }
}

/// Least squares of `y` against the basis functions evaluated at `x`.
pub fn least_squares(x: &[f64], y: &[f64], basis: &dyn Fn(f64) -> Vec<f64>) -> Result<LinearFit> {
    if x.is_empty() {
        return Err(Error::Precondition("least squares needs data".into()));
    }
    let m = basis(x[0]).len();
    if x.len() < m {
        return Err(Error::Precondition(format!("{} points cannot fit {m} terms", x.len())));
    }
    let rows: Vec<Vec<f64>> = x.iter().map(|&v| basis(v)).collect();
    let mut a = DMatrix::from_fn(x.len(), m, |i, j| rows[i][j]);
    let scales: Vec<f64> = (0..m).map(|j| a.column(j).norm()).collect();
    if scales.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::Numeric("degenerate basis column".into()));
    }
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let (smax, smin) = svd
        .singular_values
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let b = DVector::from_column_slice(y);
    let solution = svd.solve(&b, 0.0).map_err(|e| Error::Numeric(e.to_string()))?;
    let residual = ((&a * &solution - &b).norm_squared() / x.len() as f64).sqrt();
    let coeffs = solution.iter().zip(&scales).map(|(c, s)| c / s).collect();
    Ok(LinearFit { coeffs, condition: smax / smin, residual })
}

/// Nearest integer k to d/(1−d), if within [`SNAP_TOLERANCE`].
pub fn snap_k(dim: f64) -> Result<usize> {
    if (-SNAP_TOLERANCE..0.0).contains(&dim) {
        return Ok(0);
    }
    if !(0.0..1.0).contains(&dim) {
        return Err(Error::Precondition(format!("dimension {dim} is not below 1")));
    }
    let ratio = dim / (1.0 - dim);
    let k = ratio.round().max(0.0);
    if (ratio - k).abs() > SNAP_TOLERANCE {
        return Err(Error::Precondition(format!(
            "d/(1−d) = {ratio:.4} is not within {SNAP_TOLERANCE} of an integer"
        )));
    }
    Ok(k as usize)
}

fn ambient(sweep: &EpsSweep) -> f64 {
    match sweep.kind {
        SweepKind::Planar => 2.0,
        SweepKind::Line => 1.0,
    }
}

/// Index where the final decade of a decreasing grid starts.
fn final_decade(eps: &[f64]) -> usize {
    let last = *eps.last().expect("nonempty grid");
    eps.iter().position(|&e| e <= 10.0 * last * (1.0 + 1e-9)).unwrap_or(0)
}

fn log_log_slope(eps: &[f64], values: &[f64]) -> Result<f64> {
    let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    Ok(least_squares(&x, &y, &|v| vec![1.0, v])?.coeffs[1])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionFit {
    pub dim: f64,
    /// Extrapolated log-log slope.
    pub slope: f64,
    /// Slope difference between the two halves of the final decade.
    pub drift: f64,
    pub low_confidence: bool,
    pub window: (f64, f64),
    pub extrapolation: Extrapolation,
}

/// Planar dimensions in this range are extrapolated in powers of ε.
const POWER_EXTRAPOLATION_RANGE: std::ops::Range<f64> = 0.25..0.95;
const POWER_EXTRAPOLATION_ROUNDS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Extrapolation {
    /// Local slopes extrapolated linearly in 1/log ε.
    InverseLog,
    /// Local slopes extrapolated linearly in ε^{1−d}, with d self-consistent.
    Power,
}

/// d = N − s with s the log-log slope over the final decade. Local slopes are
/// extrapolated in 1/log ε, or for planar sweeps with d in the parabolic
/// range in ε^{1/(k+1)} = ε^{1−d}.
pub fn fit_box_dimension(sweep: &EpsSweep) -> Result<DimensionFit> {
    let eps = sweep.eps();
    let values = sweep.values();
    if eps.len() < 40 {
        return Err(Error::Precondition(format!("{} grid points; need at least 40", eps.len())));
    }
    let span = (eps[0] / eps[eps.len() - 1]).log10();
    if span < 1.5 - 1e-9 {
        return Err(Error::Precondition(format!("grid spans {span:.2} decades; need 1.5")));
    }
    if values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Numeric("measures must be positive".into()));
    }
    let start = final_decade(&eps);
    let (e, v) = (&eps[start..], &values[start..]);
    let n = e.len();
    let half = n / 2;
    let drift = (log_log_slope(&e[..=half], &v[..=half])? - log_log_slope(&e[half..], &v[half..])?).abs();

    // Local slopes over a sliding quarter of the decade.
    let width = (n / 4).max(3);
    let mut log_mid = Vec::new();
    let mut s = Vec::new();
    for lo in 0..n.saturating_sub(width) {
        let hi = lo + width;
        s.push(log_log_slope(&e[lo..=hi], &v[lo..=hi])?);
        log_mid.push((e[lo].ln() + e[hi].ln()) / 2.0);
    }
    let n_amb = ambient(sweep);
    let mut extrapolation = Extrapolation::InverseLog;
    let mut slope = if s.len() >= 3 {
        let u: Vec<f64> = log_mid.iter().map(|l| 1.0 / l).collect();
        least_squares(&u, &s, &|x| vec![1.0, x])?.coeffs[0]
    } else {
        log_log_slope(e, v)?
    };
    if sweep.kind == SweepKind::Planar && s.len() >= 3 && POWER_EXTRAPOLATION_RANGE.contains(&(n_amb - slope)) {
        for _ in 0..POWER_EXTRAPOLATION_ROUNDS {
            let p = 1.0 - (n_amb - slope).clamp(POWER_EXTRAPOLATION_RANGE.start, POWER_EXTRAPOLATION_RANGE.end);
            let u: Vec<f64> = log_mid.iter().map(|l| (p * l).exp()).collect();
            slope = least_squares(&u, &s, &|x| vec![1.0, x])?.coeffs[0];
        }
        extrapolation = Extrapolation::Power;
    }
    Ok(DimensionFit {
        dim: n_amb - slope,
        slope,
        drift,
        low_confidence: drift > 0.05,
        window: (e[n - 1], e[0]),
        extrapolation,
    })
}

/// Power expansion of a measure V ≈ ε^{N−d}·(c₀ + c₁t + … + c_{k+1}t^{k+1}
/// + t^k log ε·(ℓ₀ + ℓ₁t)), t = ε^{1/(k+1)}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerExpansion {
    pub k: usize,
    /// Leading coefficient c₀.
    pub leading: f64,
    /// ℓ₀: for planar sweeps the coefficient of ε²logε.
    pub log_coeff: f64,
    pub fit: LinearFit,
}

pub fn fit_power_expansion(sweep: &EpsSweep, k: usize) -> Result<PowerExpansion> {
    if k == 0 {
        return Err(Error::Precondition("power expansion needs k ≥ 1".into()));
    }
    let kf = k as f64;
    let exponent = ambient(sweep) - kf / (kf + 1.0);
    let eps = sweep.eps();
    let y: Vec<f64> = sweep.records.iter().map(|r| r.area / r.eps.powf(exponent)).collect();
    let basis = move |e: f64| {
        let t = e.powf(1.0 / (kf + 1.0));
        let mut row: Vec<f64> = (0..=k + 1).map(|j| t.powi(j as i32)).collect();
        row.push(t.powi(k as i32) * e.ln());
        row.push(t.powi(k as i32 + 1) * e.ln());
        row
    };
    let fit = least_squares(&eps, &y, &basis)?;
    Ok(PowerExpansion { k, leading: fit.coeffs[0], log_coeff: fit.coeffs[k + 2], fit })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContentFit {
    pub value: f64,
    /// Snapped k, when the dimension allowed it.
    pub k: Option<usize>,
    pub relative_residual: f64,
}

/// Limit of V/ε^{N−d}. Extrapolated in ε^{1/(k+1)} when d/(1−d) snaps to
/// k ≥ 1, otherwise the mean ratio over the final decade.
pub fn fit_minkowski_content(sweep: &EpsSweep, dim: f64) -> Result<ContentFit> {
    if let Ok(k) = snap_k(dim) {
        if k >= 1 {
            let p = fit_power_expansion(sweep, k)?;
            return Ok(ContentFit {
                value: p.leading,
                k: Some(k),
                relative_residual: p.fit.relative_residual(0),
            });
        }
    }
    let exponent = ambient(sweep) - dim;
    let eps = sweep.eps();
    let start = final_decade(&eps);
    let ratios: Vec<f64> = sweep.records[start..].iter().map(|r| r.area / r.eps.powf(exponent)).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = (ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / ratios.len() as f64).sqrt();
    Ok(ContentFit { value: mean, k: None, relative_residual: spread / mean.abs() })
}

/// A known term c·ε^e·(log ε)^p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub exponent: f64,
    pub log_power: u32,
    pub coeff: Complex64,
}

impl Term {
    pub fn eval(&self, eps: f64) -> Complex64 {
        self.coeff * eps.powf(self.exponent) * eps.ln().powi(self.log_power as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogCoefficient {
    /// Coefficient of ε^e·log ε.
    pub log_coeff: Complex64,
    /// Coefficient of ε^e.
    pub coeff: Complex64,
    pub condition: f64,
    pub ill_conditioned: bool,
    pub relative_residual: f64,
}

/// Subtract `known`, then fit {ε^e log ε, ε^e} over the final decade.
pub fn fit_log_coefficient(eps: &[f64], values: &[Complex64], exponent: f64, known: &[Term]) -> Result<LogCoefficient> {
    if eps.len() != values.len() || eps.is_empty() {
        return Err(Error::Precondition("mismatched sweep data".into()));
    }
    let start = final_decade(eps);
    let e = &eps[start..];
    let peeled: Vec<Complex64> = e
        .iter()
        .zip(&values[start..])
        .map(|(&x, v)| (v - known.iter().map(|t| t.eval(x)).sum::<Complex64>()) / x.powf(exponent))
        .collect();
    let basis = |x: f64| vec![x.ln(), 1.0];
    let re: Vec<f64> = peeled.iter().map(|c| c.re).collect();
    let im: Vec<f64> = peeled.iter().map(|c| c.im).collect();
    let fr = least_squares(e, &re, &basis)?;
    let fi = least_squares(e, &im, &basis)?;
    let log_coeff = Complex64::new(fr.coeffs[0], fi.coeffs[0]);
    let residual = fr.residual.hypot(fi.residual);
    Ok(LogCoefficient {
        log_coeff,
        coeff: Complex64::new(fr.coeffs[1], fi.coeffs[1]),
        condition: fr.condition,
        ill_conditioned: fr.condition > CONDITION_LIMIT,
        relative_residual: residual / log_coeff.norm().max(f64::MIN_POSITIVE),
    })
}

/// Fits behind the residual content of a k ≥ 2 orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualFit {
    pub k: usize,
    /// Attracting direction ν used for the frame.
    pub direction: Complex64,
    /// Minkowski content M.
    pub content: f64,
    /// Coefficient of ε²logε in the area.
    pub area_log: f64,
    /// Leading coefficient β of Re(CM/ν)/ε^{1+2/(k+1)}.
    pub measure_leading: f64,
    /// Coefficient γ of ε^{2+1/(k+1)}logε in Im(CM/ν).
    pub measure_log: f64,
    /// Coefficient of ε²logε in Im(CM/ν); zero in the extended normal form.
    pub measure_square_log: f64,
    pub directed_content: Complex64,
    pub residual_content: Complex64,
    /// ε² coefficient of the complex measure.
    pub principal_part: Complex64,
    pub area_fit: LinearFit,
    pub real_fit: LinearFit,
    pub imag_fit: LinearFit,
}

/// Residual content K_{k+1} of a planar sweep with k ≥ 2.
///
/// When `direction` is `None` the frame ν is estimated from the smallest-ε
/// complex measure and refined with the fitted Im(CM/ν)/ε^{1+2/(k+1)}
/// coefficient.
pub fn fit_residual_content(sweep: &EpsSweep, k: usize, direction: Option<Complex64>) -> Result<ResidualFit> {
    if k < 2 {
        return Err(Error::Precondition("residual content needs k ≥ 2; use the boundary fit for k = 1".into()));
    }
    if sweep.kind != SweepKind::Planar {
        return Err(Error::Precondition("residual content needs a planar sweep".into()));
    }
    let kf = k as f64;
    let tp = 1.0 / (kf + 1.0);
    let eps = sweep.eps();
    let cms = sweep.complex_measures();
    let area = fit_power_expansion(sweep, k)?;

    let real_basis = move |e: f64| {
        let t = e.powf(tp);
        let mut row: Vec<f64> = (0..=k).map(|j| t.powi(j as i32)).collect();
        row.push(t.powi(k as i32 - 1) * e.ln());
        row
    };
    // t^{1−k} carries any rotation of the frame; t^{2−k}..t^{−1} the terms
    // produced by nonzero a₂..a_k.
    let imag_basis = move |e: f64| {
        let t = e.powf(tp);
        let mut row: Vec<f64> = (1..k).rev().map(|j| t.powi(-(j as i32))).collect();
        row.extend([e.ln(), 1.0, t * e.ln(), t, t * t]);
        row
    };
    let offset = k - 1;

    let mut nu = match direction {
        Some(d) => d / d.norm(),
        None => {
            let last = *cms.last().ok_or_else(|| Error::Precondition("empty sweep".into()))?;
            if last.norm() == 0.0 {
                return Err(Error::Numeric("complex measure vanishes".into()));
            }
            last / last.norm()
        }
    };
    let rounds = if direction.is_some() { 1 } else { 4 };
    let mut fits = None;
    for _ in 0..rounds {
        let framed: Vec<Complex64> = cms.iter().map(|c| c / nu).collect();
        let yr: Vec<f64> = framed.iter().zip(&eps).map(|(c, e)| c.re / e.powf(1.0 + 2.0 * tp)).collect();
        let yi: Vec<f64> = framed.iter().zip(&eps).map(|(c, e)| c.im / (e * e)).collect();
        let rf = least_squares(&eps, &yr, &real_basis)?;
        let imf = least_squares(&eps, &yi, &imag_basis)?;
        let rotation = imf.coeffs[0] / rf.coeffs[0];
        fits = Some((rf, imf));
        if direction.is_some() || rotation.abs() < 1e-13 {
            break;
        }
        nu *= Complex64::from_polar(1.0, rotation);
    }
    let (real_fit, imag_fit) = fits.expect("at least one round");
    let beta_coeff = real_fit.coeffs[0];
    let gamma_coeff = imag_fit.coeffs[offset + 2];
    let m = area.leading;
    let residual_content = nu * Complex64::new(area.log_coeff, m * gamma_coeff / beta_coeff);
    let principal_part = nu * Complex64::new(real_fit.coeffs[k - 1], imag_fit.coeffs[offset + 1]);
    Ok(ResidualFit {
        k,
        direction: nu,
        content: m,
        area_log: area.log_coeff,
        measure_leading: beta_coeff,
        measure_log: gamma_coeff,
        measure_square_log: imag_fit.coeffs[offset],
        directed_content: nu * m,
        residual_content,
        principal_part,
        area_fit: area.fit,
        real_fit,
        imag_fit,
    })
}

/// Fits behind the k = 1 development.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryFit {
    pub content: f64,
    /// Coefficient of ε²logε in the area.
    pub area_log: f64,
    /// Coefficient of ε²logε in the complex measure, π/(2a₁).
    pub measure_log: Complex64,
    /// ε² coefficient of the complex measure.
    pub principal_part: Complex64,
    /// Coefficient of ε^{5/2}logε in the complex measure.
    pub measure_half_log: Complex64,
    pub area_fit: LinearFit,
    pub real_fit: LinearFit,
    pub imag_fit: LinearFit,
}

pub fn fit_boundary(sweep: &EpsSweep) -> Result<BoundaryFit> {
    if sweep.kind != SweepKind::Planar {
        return Err(Error::Precondition("boundary fit needs a planar sweep".into()));
    }
    let area = fit_power_expansion(sweep, 1)?;
    let eps = sweep.eps();
    let cms = sweep.complex_measures();
    let basis = |e: f64| {
        let t = e.sqrt();
        vec![e.ln(), 1.0, t * e.ln(), t, e * e.ln(), e]
    };
    let yr: Vec<f64> = cms.iter().zip(&eps).map(|(c, e)| c.re / (e * e)).collect();
    let yi: Vec<f64> = cms.iter().zip(&eps).map(|(c, e)| c.im / (e * e)).collect();
    let real_fit = least_squares(&eps, &yr, &basis)?;
    let imag_fit = least_squares(&eps, &yi, &basis)?;
    let c = |j: usize| Complex64::new(real_fit.coeffs[j], imag_fit.coeffs[j]);
    Ok(BoundaryFit {
        content: area.leading,
        area_log: area.log_coeff,
        measure_log: c(0),
        principal_part: c(1),
        measure_half_log: c(2),
        area_fit: area.fit,
        real_fit,
        imag_fit,
    })
}

/// K₁ = M·ν for a planar sweep with k ≥ 1.
pub fn fit_directed_content(sweep: &EpsSweep, k: usize) -> Result<Complex64> {
    match k {
        0 => Err(Error::Precondition("directed content needs k ≥ 1".into())),
        1 => {
            let b = fit_boundary(sweep)?;
            Ok(b.content * boundary_direction(b.measure_log))
        }
        _ => Ok(fit_residual_content(sweep, k, None)?.directed_content),
    }
}

/// ε² coefficient of the complex measure.
pub fn fit_principal_part(sweep: &EpsSweep, k: usize) -> Result<Complex64> {
    match k {
        0 => Err(Error::Precondition("principal part needs k ≥ 1".into())),
        1 => Ok(fit_boundary(sweep)?.principal_part),
        _ => Ok(fit_residual_content(sweep, k, None)?.principal_part),
    }
}

/// ν = A/|A| with A = −1/a₁, from the complex-measure log coefficient π/(2a₁).
pub fn boundary_direction(measure_log: Complex64) -> Complex64 {
    -measure_log / measure_log.norm()
}

/// Fit diagnostics carried by a [`FractalReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub k: usize,
    pub points: usize,
    pub window: (f64, f64),
    pub dimension: DimensionFit,
    pub direction: Option<Complex64>,
    /// Largest RMS residual relative to the coefficient it determines.
    pub relative_residual: f64,
    pub residual: Option<ResidualFit>,
    pub boundary: Option<BoundaryFit>,
}

/// Fractal data of one orbit. Field names follow the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractalReport {
    pub dim_b: f64,
    pub content: f64,
    pub k1_re: f64,
    pub k1_im: f64,
    pub kk1_re: Option<f64>,
    pub kk1_im: Option<f64>,
    pub h_re: Option<f64>,
    pub h_im: Option<f64>,
    pub diagnostics: Diagnostics,
}

impl FractalReport {
    pub fn k(&self) -> usize {
        self.diagnostics.k
    }

    pub fn directed_content(&self) -> Complex64 {
        Complex64::new(self.k1_re, self.k1_im)
    }

    pub fn residual_content(&self) -> Option<Complex64> {
        Some(Complex64::new(self.kk1_re?, self.kk1_im?))
    }

    pub fn principal_part(&self) -> Option<Complex64> {
        Some(Complex64::new(self.h_re?, self.h_im?))
    }
}

/// Full pipeline on one sweep: dimension, k, contents and principal part.
/// `direction` fixes the frame ν; otherwise it is estimated from the data.
pub fn fractal_report(sweep: &EpsSweep, direction: Option<Complex64>) -> Result<FractalReport> {
    let dimension = fit_box_dimension(sweep)?;
    let k = snap_k(dimension.dim)?;
    let eps = sweep.eps();
    let window = (eps[eps.len() - 1], eps[0]);
    let mut diagnostics = Diagnostics {
        k,
        points: eps.len(),
        window,
        dimension: dimension.clone(),
        direction: None,
        relative_residual: 0.0,
        residual: None,
        boundary: None,
    };
    let mut report = FractalReport {
        dim_b: dimension.dim,
        content: f64::NAN,
        k1_re: f64::NAN,
        k1_im: f64::NAN,
        kk1_re: None,
        kk1_im: None,
        h_re: None,
        h_im: None,
        diagnostics: diagnostics.clone(),
    };
    if k == 0 || sweep.kind == SweepKind::Line {
        let c = fit_minkowski_content(sweep, dimension.dim)?;
        report.content = c.value;
        report.k1_re = c.value;
        report.k1_im = 0.0;
        diagnostics.relative_residual = c.relative_residual;
        report.diagnostics = diagnostics;
        return Ok(report);
    }
    if k == 1 {
        let b = fit_boundary(sweep)?;
        let nu = direction.map(|d| d / d.norm()).unwrap_or_else(|| boundary_direction(b.measure_log));
        let k1 = nu * b.content;
        report.content = b.content;
        report.k1_re = k1.re;
        report.k1_im = k1.im;
        report.h_re = Some(b.principal_part.re);
        report.h_im = Some(b.principal_part.im);
        diagnostics.direction = Some(nu);
        diagnostics.relative_residual = b
            .area_fit
            .relative_residual(0)
            .max(b.real_fit.residual.hypot(b.imag_fit.residual) / b.measure_log.norm());
        diagnostics.boundary = Some(b);
    } else {
        let r = fit_residual_content(sweep, k, direction)?;
        report.content = r.content;
        report.k1_re = r.directed_content.re;
        report.k1_im = r.directed_content.im;
        report.kk1_re = Some(r.residual_content.re);
        report.kk1_im = Some(r.residual_content.im);
        report.h_re = Some(r.principal_part.re);
        report.h_im = Some(r.principal_part.im);
        diagnostics.direction = Some(r.direction);
        diagnostics.relative_residual = r
            .area_fit
            .relative_residual(0)
            .max(r.real_fit.relative_residual(0));
        diagnostics.residual = Some(r);
    }
    report.diagnostics = diagnostics;
    Ok(report)
}

/// ∫₀¹ (t√(1−t²) + arcsin t)·t^p dt, for p > −2 and p ≠ −1.
pub fn crescent_moment(p: f64) -> f64 {
    let a = (p + 2.0) / 2.0;
    0.5 * beta(a, 1.5) + PI / (2.0 * (p + 1.0)) - beta(a, 0.5) / (2.0 * (p + 1.0))
}

/// |K₁| = (k+1)/k·√π·Γ(1+1/(2k+2))/Γ(3/2+1/(2k+2))·(2/|a₁|)^{1/(k+1)}.
pub fn content_closed_form(k: usize, a1_abs: f64) -> f64 {
    let kf = k as f64;
    let s = 1.0 / (2.0 * kf + 2.0);
    (kf + 1.0) / kf * PI.sqrt() * gamma(1.0 + s) / gamma(1.5 + s) * (2.0 / a1_abs).powf(1.0 / (kf + 1.0))
}

/// M from the crescent moment integral; equals [`content_closed_form`].
pub fn content_from_moments(k: usize, a1_abs: f64) -> f64 {
    let kf = k as f64;
    let l = crescent_moment(-(2.0 * kf + 1.0) / (kf + 1.0));
    (PI + 2.0 * kf * l / (kf + 1.0)) / kf * 2f64.powf(-kf / (kf + 1.0)) * a1_abs.powf(-1.0 / (kf + 1.0))
}

/// β, the leading coefficient of Re(CM/ν)/ε^{1+2/(k+1)}, for k ≥ 2.
pub fn measure_leading(k: usize, a1_abs: f64) -> f64 {
    let kf = k as f64;
    let j = crescent_moment(-2.0 * kf / (kf + 1.0));
    (2.0 / a1_abs).powf(2.0 / (kf + 1.0)) * (PI / (2.0 * (kf - 1.0)) + j / (kf + 1.0))
}

/// γ per unit Im μ: coefficient of ε^{2+1/(k+1)}logε in Im(CM/ν), for k ≥ 1.
pub fn measure_log_factor(k: usize, a1_abs: f64) -> f64 {
    let kf = k as f64;
    let i_k = crescent_moment(-kf / (kf + 1.0));
    (2.0 / a1_abs).powf(1.0 / (kf + 1.0)) / (kf + 1.0) * (2.0 * i_k / (kf + 1.0) - PI)
}

/// Im(K_{k+1}/ν) per unit Im μ, μ = λ/(2πi); independent of |a₁|.
pub fn residual_imaginary_factor(k: usize) -> f64 {
    content_from_moments(k, 1.0) * measure_log_factor(k, 1.0) / measure_leading(k, 1.0)
}

/// Closed-form predictions for one attracting direction of a germ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Oracle {
    pub k: usize,
    pub a1: Complex64,
    pub lambda: Complex64,
    pub direction: Complex64,
    pub content: f64,
    pub directed_content: Complex64,
    /// K_{k+1} from the area and complex-measure coefficients (k ≥ 2).
    pub residual_content: Option<Complex64>,
    /// K_{k+1} as printed in the closed form with the Γ-ratio imaginary part.
    pub residual_content_printed: Option<Complex64>,
    pub measure_leading: Option<f64>,
    pub measure_log: Option<f64>,
    /// The germ has nonzero terms below z^{k+1}, so the raw directed area carries extra
    /// cross terms at ε²logε.
    pub partial: bool,
    pub boundary: Option<BoundaryOracle>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryOracle {
    pub area_log: f64,
    pub measure_log: Complex64,
    pub measure_half_log: Complex64,
    pub measure_half_log_printed: Complex64,
}

pub fn oracle_coefficients(g: &Germ, direction_index: usize) -> Result<Oracle> {
    let (_, inv) = g.normalize_extended()?;
    let k = inv.k;
    let a1 = inv.a1;
    let dirs = attracting_directions(g)?;
    let nu = dirs
        .get(direction_index)
        .ok_or_else(|| Error::Precondition(format!("direction index {direction_index} ≥ k = {k}")))?
        .unit;
    let mu = inv.lambda / (2.0 * PI * I);
    let abs = a1.norm();
    let kf = k as f64;
    let content = content_closed_form(k, abs);
    let partial = (2..=k).any(|i| g.coeff(i) != Complex64::new(0.0, 0.0));
    let mut oracle = Oracle {
        k,
        a1,
        lambda: inv.lambda,
        direction: nu,
        content,
        directed_content: nu * content,
        residual_content: None,
        residual_content_printed: None,
        measure_leading: None,
        measure_log: None,
        partial,
        boundary: None,
    };
    if k == 1 {
        let i1 = crescent_moment(-0.5);
        let printed = -5.0 * PI / (4.0 * 2f64.sqrt()) + PI.sqrt() / (4.0 * 2f64.sqrt()) * gamma(0.75) / gamma(1.25);
        oracle.boundary = Some(BoundaryOracle {
            area_log: PI / 2.0 * mu.re,
            measure_log: PI / (2.0 * a1),
            measure_half_log: nu * abs.powf(-0.5) * (i1 - PI) / 2f64.sqrt() * I * mu.im,
            measure_half_log_printed: printed * abs.sqrt() / a1 * I * mu.im,
        });
        return Ok(oracle);
    }
    let re = PI / (kf + 1.0) * mu.re;
    oracle.residual_content = Some(nu * Complex64::new(re, residual_imaginary_factor(k) * mu.im));
    let s = 1.0 / (2.0 * kf + 2.0);
    let printed_factor = 2.0 * (kf - 1.0) / (kf + 1.0) * (abs / 2.0).powf(1.0 / (kf + 1.0))
        * (gamma(0.5 + s) / gamma(2.0 + s) - PI.sqrt())
        / (gamma(1.0 / (kf + 1.0)) / gamma(1.5 + 1.0 / (kf + 1.0)) + PI.sqrt());
    // The printed form is in terms of b/a₁² − (k+1)/2 = −μ.
    oracle.residual_content_printed = Some(nu * Complex64::new(re, -printed_factor * mu.im));
    oracle.measure_leading = Some(measure_leading(k, abs));
    oracle.measure_log = Some(measure_log_factor(k, abs) * mu.im);
    Ok(oracle)
}
