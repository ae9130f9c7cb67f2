//! Classification statements read off fractal data: multiplicities of real
//! fixed points, cyclicity bounds, formal invariants of parabolic germs and
//! saddle-loop arithmetic.

use crate::error::{Error, Result};
use crate::fit::{
    self, crescent_moment, fit_box_dimension, fractal_report, least_squares, residual_imaginary_factor,
    FractalReport, SNAP_TOLERANCE,
};
use crate::germ::{FormalInvariants, Germ};
use crate::neighborhood::{sweep, EpsSweep, GridSpec, SweepKind};
use crate::orbit::{orbit, StopCriteria};
use crate::scales::{ChebyshevScale, ScaleMonomial};
use crate::special::gamma;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Qualifier attached to every cyclicity reading.
pub const CYCLICITY_QUALIFIER: &str = "upper bound; equality under the regularity condition on the unfolding";

/// μ = round(1/(1−d)).
pub fn multiplicity_from_dimension(d: f64) -> Result<usize> {
    if !(d > -SNAP_TOLERANCE && d < 1.0) {
        return Err(Error::Precondition(format!("dimension {d} outside [0, 1)")));
    }
    let ratio = 1.0 / (1.0 - d.max(0.0));
    let mu = ratio.round();
    if (ratio - mu).abs() >= SNAP_TOLERANCE {
        return Err(Error::Precondition(format!("1/(1−d) = {ratio:.4} is not near an integer")));
    }
    Ok(mu as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicSubcase {
    /// |S_ε| ≍ ε(−log ε): f′(0) < 1.
    Strict,
    /// |S_ε| ≍ ε·log(−log ε): f′(0) = 0.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicReading {
    pub subcase: HyperbolicSubcase,
    pub dim: f64,
    /// Slopes of log(|S_ε|/gauge) against log(−log ε).
    pub strict_slope: f64,
    pub degenerate_slope: f64,
}

/// Separate the two zero-dimensional gauges. The sweep should span many
/// decades; log(−log ε) must vary by at least 1 over it.
pub fn hyperbolic_subcase(sweep: &EpsSweep) -> Result<HyperbolicReading> {
    let eps = sweep.eps();
    let values = sweep.values();
    if eps.len() < 10 {
        return Err(Error::Precondition("hyperbolic subcase needs at least 10 grid points".into()));
    }
    if eps[0] >= 1.0 / std::f64::consts::E {
        return Err(Error::Precondition("ε must stay below 1/e".into()));
    }
    let ll: Vec<f64> = eps.iter().map(|e| (-e.ln()).ln()).collect();
    if ll[ll.len() - 1] - ll[0] < 1.0 {
        return Err(Error::Precondition("grid too narrow: log(−log ε) varies by less than 1".into()));
    }
    let ln_eps: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ln_len: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    // log|S_ε| = a + s·log ε + γ·log(−log ε).
    let joint: Vec<f64> = (0..eps.len()).collect::<Vec<_>>().iter().map(|&i| i as f64).collect();
    let fit = least_squares(&joint, &ln_len, &|i| {
        let i = i as usize;
        vec![1.0, ln_eps[i], ll[i]]
    })?;
    let dim = 1.0 - fit.coeffs[1];
    if dim.abs() > 0.05 {
        return Err(Error::Precondition(format!("fitted dimension {dim:.3} is not 0")));
    }
    let slope = |gauge: &dyn Fn(f64) -> f64| -> Result<f64> {
        let y: Vec<f64> = eps.iter().zip(&values).map(|(&e, v)| (v / gauge(e)).ln()).collect();
        Ok(least_squares(&ll, &y, &|x| vec![1.0, x])?.coeffs[1])
    };
    let strict_slope = slope(&|e| e * -e.ln())?;
    let degenerate_slope = slope(&|e| e * (-e.ln()).ln())?;
    let subcase = if strict_slope.abs() < 0.3 && degenerate_slope > 0.5 {
        HyperbolicSubcase::Strict
    } else if degenerate_slope.abs() < 0.3 && strict_slope < -0.5 {
        HyperbolicSubcase::Degenerate
    } else {
        return Err(Error::Numeric(format!(
            "inconclusive: slopes {strict_slope:.3} (ε·l) and {degenerate_slope:.3} (ε·log l)"
        )));
    };
    Ok(HyperbolicReading { subcase, dim, strict_slope, degenerate_slope })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReading {
    pub order: usize,
    /// f ≍ u_order.
    pub gauge: String,
    /// For the saddle-loop scale.
    pub cyclicity_bound: Option<usize>,
    pub qualifier: &'static str,
}

/// Reading of a critical Minkowski order; `None` means the order is infinite.
pub fn multiplicity_from_order(order: Option<usize>, scale: &ChebyshevScale) -> Result<OrderReading> {
    let order = order.ok_or_else(|| {
        Error::Precondition("method inapplicable: critical Minkowski order is infinite in this scale".into())
    })?;
    let gauge = scale
        .monomials
        .get(order)
        .ok_or_else(|| Error::Precondition(format!("order {order} beyond scale length {}", scale.len())))?;
    let saddle = scale.name.as_deref() == Some("saddle_loop");
    Ok(OrderReading {
        order,
        gauge: gauge.to_string(),
        cyclicity_bound: saddle.then_some(order),
        qualifier: CYCLICITY_QUALIFIER,
    })
}

/// φ(k) in its Γ-ratio form, k ≥ 2.
pub fn phi(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain("φ(k) needs k ≥ 2; use the boundary route for k = 1".into()));
    }
    let kf = k as f64;
    let s = 1.0 / (2.0 * kf + 2.0);
    let sqrt_pi = PI.sqrt();
    let num = gamma(1.0 / (kf + 1.0)) / gamma(1.5 + 1.0 / (kf + 1.0)) + sqrt_pi;
    let den = gamma(0.5 + s) / gamma(2.0 + s) - sqrt_pi;
    Ok(kf * (kf + 1.0) / (kf - 1.0) / sqrt_pi * num / den * gamma(1.0 + s) / gamma(1.5 + s))
}

/// The factor multiplying Im(R/ν) in λ, −2π/P_k; plays the role of 2π·φ(k)·M.
pub fn lambda_imaginary_factor(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain("needs k ≥ 2".into()));
    }
    Ok(-2.0 * PI / residual_imaginary_factor(k))
}

/// C_k with |a₁| = 2(C_k/M)^{k+1}.
fn content_constant(k: usize) -> f64 {
    fit::content_closed_form(k, 2.0)
}

/// a₁ from the directed content and the Minkowski content.
pub fn a1_from_contents(k: usize, directed: Complex64, content: f64) -> Complex64 {
    let c = content_constant(k);
    -2.0 * c.powi(k as i32 + 1) * directed.powi(-(k as i32)) / content
}

/// a₁ from the Γ-ratio form with the (−2)^{−k} prefactor.
pub fn a1_gamma_form(k: usize, directed: Complex64, content: f64) -> Complex64 {
    let kf = k as f64;
    let s = 1.0 / (2.0 * kf + 2.0);
    let bracket = kf / PI.sqrt() * gamma(1.5 + s) / gamma(s);
    directed.powi(-(k as i32)) * (-2.0f64).powi(-(k as i32)) / content * bracket.powf(-(kf + 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractalInvariants {
    pub k: usize,
    pub a1: Complex64,
    pub lambda: Complex64,
    /// Attracting direction of the sector the orbit lies in.
    pub direction: Complex64,
    /// Im part of λ could not be determined.
    pub lambda_im_undetermined: bool,
}

impl FractalInvariants {
    pub fn formal(&self) -> FormalInvariants {
        FormalInvariants { k: self.k, a1: self.a1, lambda: self.lambda }
    }
}

/// (k, a₁, λ) from the report of an orbit with k ≥ 2.
pub fn parabolic_invariants(report: &FractalReport) -> Result<FractalInvariants> {
    let k = report.k();
    if k == 1 {
        return k1_invariants(report);
    }
    if k == 0 {
        return Err(Error::Precondition("dimension 0: the germ is not parabolic".into()));
    }
    let residual = report
        .residual_content()
        .ok_or_else(|| Error::Precondition("report lacks the residual content".into()))?;
    let directed = report.directed_content();
    let nu = directed / directed.norm();
    let r = residual / nu;
    let kf = k as f64;
    let mu = Complex64::new((kf + 1.0) / PI * r.re, r.im / residual_imaginary_factor(k));
    Ok(FractalInvariants {
        k,
        a1: a1_from_contents(k, directed, report.content),
        lambda: 2.0 * PI * I * mu,
        direction: nu,
        lambda_im_undetermined: false,
    })
}

/// λ from the Γ-ratio form 2(k+1)i·Re(R/ν) + 2πφ(k)·M·Im(R/ν).
pub fn lambda_gamma_form(report: &FractalReport) -> Result<Complex64> {
    let k = report.k();
    let residual = report
        .residual_content()
        .ok_or_else(|| Error::Precondition("report lacks the residual content".into()))?;
    let directed = report.directed_content();
    let r = residual / (directed / directed.norm());
    Ok(2.0 * (k as f64 + 1.0) * I * r.re + 2.0 * PI * phi(k)? * report.content * r.im)
}

/// Prefactor of Im μ in the ε^{5/2}logε coefficient of the complex measure,
/// divided by ν.
pub fn boundary_half_log_factor(a1_abs: f64) -> Complex64 {
    I * a1_abs.powf(-0.5) * (crescent_moment(-0.5) - PI) / 2f64.sqrt()
}

/// (1, a₁, λ) from the boundary fits of a k = 1 report.
pub fn k1_invariants(report: &FractalReport) -> Result<FractalInvariants> {
    let b = report
        .diagnostics
        .boundary
        .as_ref()
        .ok_or_else(|| Error::Precondition("report lacks the k = 1 boundary fit".into()))?;
    if b.measure_log.norm() == 0.0 {
        return Err(Error::Numeric("complex-measure log coefficient vanishes".into()));
    }
    let a1 = PI / (2.0 * b.measure_log);
    let nu = fit::boundary_direction(b.measure_log);
    let re_mu = b.area_log / (PI / 2.0);
    let factor = nu * boundary_half_log_factor(a1.norm());
    let undetermined = factor.norm() < 1e-8;
    let im_mu = if undetermined { 0.0 } else { (b.measure_half_log / factor).re };
    Ok(FractalInvariants {
        k: 1,
        a1,
        lambda: 2.0 * PI * I * Complex64::new(re_mu, im_mu),
        direction: nu,
        lambda_im_undetermined: undetermined,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HolonomyReading {
    Linearizable,
    Resonant { k: usize, lambda: Complex64, iterate_k: usize },
}

/// Orbital invariants of a resonant saddle with ratio p/q from the orbit of
/// the q-th iterate of its holonomy.
pub fn holonomy_invariants(p: usize, q: usize, report: &FractalReport) -> Result<HolonomyReading> {
    if p == 0 || q == 0 || gcd(p, q) != 1 {
        return Err(Error::Precondition(format!("p = {p}, q = {q} must be coprime positive integers")));
    }
    if report.dim_b.abs() < 0.05 {
        return Ok(HolonomyReading::Linearizable);
    }
    let n = report.k();
    if n % q != 0 {
        return Err(Error::Precondition(format!("kq = {n} is not a multiple of q = {q}")));
    }
    let inv = parabolic_invariants(report)?;
    Ok(HolonomyReading::Resonant { k: n / q, lambda: inv.lambda, iterate_k: n })
}

/// Series of h^{∘q} through degree `order`. Iterating h itself would form
/// the displacement of h^{∘q} by cancellation.
pub fn holonomy_iterate(h: &Germ, q: usize, order: usize) -> Result<Germ> {
    if q == 0 {
        return Err(Error::Precondition("q must be positive".into()));
    }
    let mut padded = h.coeffs().to_vec();
    padded.resize(padded.len().max(order), Complex64::new(0.0, 0.0));
    let base = Germ::new(padded)?;
    let mut acc = base.clone();
    for _ in 1..q {
        acc = base.compose(&acc, order)?;
    }
    Germ::new(acc.coeffs()[..order].to_vec())
}

/// Resonant-saddle reading from the orbit of h^{∘q} through z0.
pub fn classify_holonomy(
    h: &Germ,
    p: usize,
    q: usize,
    z0: Complex64,
    points: usize,
    grid: &GridSpec,
) -> Result<ClassificationResult> {
    let iterate = holonomy_iterate(h, q, HOLONOMY_ORDER)?;
    let o = orbit(&iterate, z0, StopCriteria::with_max_points(points))?;
    let s = sweep(&o, grid, SweepKind::Planar)?;
    let report = fractal_report(&s, None)?;
    let reading = holonomy_invariants(p, q, &report)?;
    let mut notes = Vec::new();
    if matches!(reading, HolonomyReading::Linearizable) {
        notes.push("dimension 0: holonomy linearizable, saddle orbitally linearizable".to_string());
    }
    Ok(ClassificationResult {
        route: Route::Holonomy,
        dim_b: report.dim_b,
        invariants: None,
        multiplicity: None,
        hyperbolic: None,
        order: None,
        holonomy: Some(reading),
        exact: None,
        notes,
        report: Some(report),
    })
}

/// Truncation of the series of h^{∘q}.
pub const HOLONOMY_ORDER: usize = 24;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Box dimension of a spiral trajectory around a saddle loop of codimension k.
pub fn saddle_loop_dimension(codim: usize) -> Result<f64> {
    if codim == 0 {
        return Err(Error::Precondition("codimension must be at least 1".into()));
    }
    let k = codim as f64;
    Ok(if codim % 2 == 0 { 2.0 - 2.0 / k } else { 2.0 - 2.0 / (k + 1.0) })
}

/// Cyclicities compatible with a spiral dimension d ∈ [1, 2).
pub fn cyclicity_set(d: f64) -> Result<[usize; 2]> {
    if !(1.0..2.0).contains(&d) {
        return Err(Error::Precondition(format!("dimension {d} outside [1, 2)")));
    }
    let m = (2.0 / (2.0 - d)).round() as usize;
    Ok([m - 1, m])
}

/// Box dimension of {x^r·y = s_l^r} when dim{s_l} = s.
pub fn hyperbola_family_dimension(s: f64, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&s) || !(r > 0.0) {
        return Err(Error::Precondition(format!("need s ∈ [0, 1) and r > 0, got s = {s}, r = {r}")));
    }
    Ok((1.0 + s).max(1.0 + s / (s + r * (1.0 - s))))
}

/// Number of cells of a 2^level grid on (0,1]² met by x^r·y = s_l^r,
/// s_l = l^{−(1−s)/s}, l ≥ 1.
pub fn hyperbola_box_count(s: f64, r: f64, level: u32) -> Result<usize> {
    if !(s > 0.0 && s < 1.0) || !(r > 0.0) {
        return Err(Error::Precondition("box counting needs s ∈ (0, 1) and r > 0".into()));
    }
    let m = 1usize << level;
    let delta = 1.0 / m as f64;
    let exponent = (1.0 - s) / s;
    let mut grid = vec![false; m * m];
    let cell = |v: f64| ((v * m as f64) as usize).min(m - 1);
    // Below this level consecutive curves are closer than the cell size and
    // their union fills {x^r y ≤ cutoff^r}.
    let cutoff = delta / 4.0;
    let mut l = 1usize;
    loop {
        let sl = (l as f64).powf(-exponent);
        if sl < cutoff {
            break;
        }
        let c = sl.powf(r);
        let first = cell(sl);
        for col in first..m {
            let x_lo = (col as f64 * delta).max(sl);
            let x_hi = (col + 1) as f64 * delta;
            let y_hi = (c / x_lo.powf(r)).min(1.0);
            let y_lo = c / x_hi.powf(r);
            for row in cell(y_lo)..=cell(y_hi) {
                grid[row * m + col] = true;
            }
        }
        l += 1;
    }
    let floor = cutoff.powf(r);
    for col in 0..m {
        let x = col as f64 * delta;
        for row in 0..m {
            let y = row as f64 * delta;
            if x.powf(r) * y <= floor {
                grid[row * m + col] = true;
            } else {
                break;
            }
        }
    }
    Ok(grid.iter().filter(|&&b| b).count())
}

/// Box dimension from counts at grid levels `levels`: the fit
/// log N = a + d·log M + b/log M with M = 2^level.
pub fn hyperbola_raster_dimension(s: f64, r: f64, levels: std::ops::RangeInclusive<u32>) -> Result<f64> {
    if levels.clone().count() < 4 {
        return Err(Error::Precondition("need at least 4 grid levels".into()));
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for level in levels {
        x.push(level as f64 * 2f64.ln());
        y.push((hyperbola_box_count(s, r, level)? as f64).ln());
    }
    Ok(least_squares(&x, &y, &|v| vec![1.0, v, 1.0 / v])?.coeffs[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    RealMultiplicity,
    ChebyshevOrder,
    ParabolicFormal,
    Holonomy,
    SaddleLoop,
}

/// Exact invariants of a symbolic germ and their distance to the fractal ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactCheck {
    pub k: usize,
    pub a1: Complex64,
    pub lambda: Complex64,
    pub k_matches: bool,
    pub a1_relative_error: f64,
    pub lambda_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub route: Route,
    pub dim_b: f64,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub invariants: Option<FractalInvariants>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperbolic: Option<HyperbolicReading>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderReading>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<HolonomyReading>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactCheck>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<FractalReport>,
}

/// Exact invariants of `g` against fractal ones.
pub fn exact_check(g: &Germ, inv: &FractalInvariants) -> Result<ExactCheck> {
    let exact = g.formal_invariants()?;
    Ok(ExactCheck {
        k: exact.k,
        a1: exact.a1,
        lambda: exact.lambda,
        k_matches: exact.k == inv.k,
        a1_relative_error: (inv.a1.norm() - exact.a1.norm()).abs() / exact.a1.norm(),
        lambda_error: (inv.lambda - exact.lambda).norm(),
    })
}

/// Fractal classification of a complex germ from one orbit.
pub fn classify_report(report: FractalReport, germ: Option<&Germ>) -> Result<ClassificationResult> {
    let mut notes = Vec::new();
    let mut result = ClassificationResult {
        route: Route::ParabolicFormal,
        dim_b: report.dim_b,
        invariants: None,
        multiplicity: None,
        hyperbolic: None,
        order: None,
        holonomy: None,
        exact: None,
        notes: Vec::new(),
        report: None,
    };
    if report.k() == 0 {
        notes.push("hyperbolic; analytically linearizable (Koenigs)".to_string());
    } else {
        let inv = parabolic_invariants(&report)?;
        notes.push(format!(
            "contents read in the attracting sector of direction {:.6}{:+.6}i",
            inv.direction.re, inv.direction.im
        ));
        if inv.lambda_im_undetermined {
            notes.push("Im λ undetermined".to_string());
        }
        if let Some(g) = germ {
            if let Ok(check) = exact_check(g, &inv) {
                result.exact = Some(check);
            }
        }
        result.invariants = Some(inv);
    }
    if report.diagnostics.dimension.low_confidence {
        notes.push("dimension fit drifts across the final decade".to_string());
    }
    result.notes = notes;
    result.report = Some(report);
    Ok(result)
}

/// Orbit, sweep, fit and invariants for a germ and initial point.
pub fn classify_germ(g: &Germ, z0: Complex64, points: usize, grid: &GridSpec) -> Result<ClassificationResult> {
    let o = orbit(g, z0, StopCriteria::with_max_points(points))?;
    let s = sweep(&o, grid, SweepKind::Planar)?;
    classify_report(fractal_report(&s, None)?, Some(g))
}

/// Multiplicity of a real fixed point from a length sweep. `wide` is a sweep
/// over many decades; when its joint fit gives dimension 0 it also decides
/// the hyperbolic gauge.
pub fn classify_real(sweep: &EpsSweep, wide: Option<&EpsSweep>) -> Result<ClassificationResult> {
    let mut result = ClassificationResult {
        route: Route::RealMultiplicity,
        dim_b: f64::NAN,
        invariants: None,
        multiplicity: None,
        hyperbolic: None,
        order: None,
        holonomy: None,
        exact: None,
        notes: Vec::new(),
        report: None,
    };
    if let Some(w) = wide {
        match hyperbolic_subcase(w) {
            Ok(reading) => {
                result.dim_b = reading.dim;
                result.multiplicity = Some(1);
                result.hyperbolic = Some(reading);
                return Ok(result);
            }
            Err(Error::Numeric(msg)) => result.notes.push(format!("hyperbolic gauge {msg}")),
            Err(_) => {}
        }
    }
    let dim = fit_box_dimension(sweep)?;
    result.dim_b = dim.dim;
    result.multiplicity = Some(multiplicity_from_dimension(dim.dim)?);
    Ok(result)
}

/// Generalized-content reading of a real orbit in a scale.
pub fn classify_order(sweep: &EpsSweep, scale: &ChebyshevScale) -> Result<ClassificationResult> {
    let dim = fit_box_dimension(sweep).map(|d| d.dim).unwrap_or(f64::NAN);
    let order = match crate::scales::critical_order(sweep, scale) {
        Ok(o) => Some(o.order),
        Err(Error::Precondition(msg)) if msg.starts_with("order beyond") => None,
        Err(e) => return Err(e),
    };
    let reading = multiplicity_from_order(order, scale)?;
    Ok(ClassificationResult {
        route: Route::ChebyshevOrder,
        dim_b: dim,
        invariants: None,
        multiplicity: Some(reading.order),
        hyperbolic: None,
        order: Some(reading),
        holonomy: None,
        exact: None,
        notes: Vec::new(),
        report: None,
    })
}

/// Scale monomial for the gauge of an order reading.
pub fn order_gauge(scale: &ChebyshevScale, order: usize) -> Option<ScaleMonomial> {
    scale.monomials.get(order).copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn multiplicities() {
        assert_eq!(multiplicity_from_dimension(2.0 / 3.0).unwrap(), 3);
        assert_eq!(multiplicity_from_dimension(0.0).unwrap(), 1);
        assert_eq!(multiplicity_from_dimension(0.5).unwrap(), 2);
        assert!(multiplicity_from_dimension(0.6).is_err());
        assert!(multiplicity_from_dimension(1.0).is_err());
    }

    #[test]
    fn order_readings() {
        let saddle = ChebyshevScale::builtin("saddle_loop", 8).unwrap();
        let r = multiplicity_from_order(Some(4), &saddle).unwrap();
        assert_eq!(r.gauge, "x^2");
        assert_eq!(r.cyclicity_bound, Some(4));
        let r = multiplicity_from_order(Some(3), &saddle).unwrap();
        assert_eq!(r.gauge, "x^2*l");
        assert_eq!(r.cyclicity_bound, Some(3));
        let power = ChebyshevScale::builtin("power", 5).unwrap();
        let r = multiplicity_from_order(Some(2), &power).unwrap();
        assert_eq!(r.gauge, "x^2");
        assert_eq!(r.cyclicity_bound, None);
        assert!(multiplicity_from_order(None, &power).is_err());
    }

    #[test]
    fn phi_values() {
        assert!(phi(1).is_err());
        let v = phi(2).unwrap();
        assert!(v.is_finite() && v < 0.0);
        // Independent evaluation through ln Γ.
        let lg = |x: f64| statrs::function::gamma::ln_gamma(x).exp();
        let s = 1.0 / 6.0;
        let want = 6.0 / PI.sqrt() * (lg(1.0 / 3.0) / lg(1.5 + 1.0 / 3.0) + PI.sqrt())
            / (lg(0.5 + s) / lg(2.0 + s) - PI.sqrt())
            * lg(1.0 + s)
            / lg(1.5 + s);
        assert_relative_eq!(v, want, max_relative = 1e-10);
    }

    #[test]
    fn a1_forms() {
        for k in 1..6 {
            for &a1 in &[Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.5), Complex64::new(0.3, -1.1)] {
                let kf = k as f64;
                let a = (-kf * a1).powf(-1.0 / kf);
                let nu = a / a.norm();
                let m = fit::content_closed_form(k, a1.norm());
                let got = a1_from_contents(k, nu * m, m);
                assert!((got - a1).norm() < 1e-10 * a1.norm(), "k = {k}");
                let gamma_form = a1_gamma_form(k, nu * m, m);
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                assert!((gamma_form - sign * a1).norm() < 1e-10 * a1.norm(), "k = {k}");
            }
        }
    }

    #[test]
    fn saddle_tables() {
        assert_eq!(saddle_loop_dimension(3).unwrap(), 1.5);
        assert_eq!(saddle_loop_dimension(4).unwrap(), 1.5);
        assert_eq!(saddle_loop_dimension(1).unwrap(), 1.0);
        assert_eq!(cyclicity_set(1.0).unwrap(), [1, 2]);
        assert_eq!(cyclicity_set(1.5).unwrap(), [3, 4]);
        for m in 1..=12 {
            assert!(cyclicity_set(saddle_loop_dimension(m).unwrap()).unwrap().contains(&m));
        }
        assert_eq!(hyperbola_family_dimension(0.5, 2.0).unwrap(), 1.5);
        assert_eq!(hyperbola_family_dimension(0.0, 3.0).unwrap(), 1.0);
        assert_relative_eq!(hyperbola_family_dimension(0.3, 1.0).unwrap(), 1.3);
        assert_relative_eq!(hyperbola_family_dimension(0.5, 0.5).unwrap(), 1.0 + 0.5 / 0.75);
    }
}
