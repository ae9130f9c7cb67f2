//! Forward and backward orbits, attracting directions and petal membership.

use crate::error::{Error, Result};
use crate::germ::{newton_inverse, Dynamics, Germ};
use crate::neighborhood::SuffixSums;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttractingDirection {
    /// A = (−k a)^{−1/k}.
    pub point: Complex64,
    pub unit: Complex64,
    pub root_index: usize,
}

fn roots_sorted(base: Complex64, k: usize) -> Vec<AttractingDirection> {
    let principal = base.powf(-1.0 / k as f64);
    let mut roots: Vec<Complex64> = (0..k)
        .map(|j| principal * Complex64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64))
        .collect();
    roots.sort_by(|a, b| positive_arg(*a).total_cmp(&positive_arg(*b)));
    roots
        .into_iter()
        .enumerate()
        .map(|(root_index, point)| AttractingDirection { point, unit: point / point.norm(), root_index })
        .collect()
}

fn positive_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// The k attracting directions of a parabolic germ, sorted by argument in [0, 2π).
pub fn attracting_directions(g: &Germ) -> Result<Vec<AttractingDirection>> {
    let (k, a) = g.parabolic_leading()?;
    Ok(roots_sorted(-(k as f64) * a, k))
}

/// Attracting directions of the inverse germ.
pub fn repelling_directions(g: &Germ) -> Result<Vec<AttractingDirection>> {
    let (k, a) = g.parabolic_leading()?;
    Ok(roots_sorted(k as f64 * a, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopCriteria {
    pub max_points: usize,
    pub min_modulus: f64,
    pub min_distance: f64,
}

impl Default for StopCriteria {
    fn default() -> Self {
        Self { max_points: 2_000_000, min_modulus: 1e-9, min_distance: 1e-12 }
    }
}

impl StopCriteria {
    pub fn with_max_points(max_points: usize) -> Self {
        Self { max_points, ..Self::default() }
    }
}

/// A finite orbit z_0..z_N with consecutive distances d_n = |z_{n+1} − z_n|.
#[derive(Debug)]
pub struct OrbitSample {
    points: Vec<Complex64>,
    distances: Vec<f64>,
    monotone_from: usize,
    limit: Option<Complex64>,
    direction_index: Option<usize>,
    germ: Option<Germ>,
    pub(crate) sums: OnceLock<SuffixSums>,
}

impl Clone for OrbitSample {
    fn clone(&self) -> Self {
        Self {
            points: self.points.clone(),
            distances: self.distances.clone(),
            monotone_from: self.monotone_from,
            limit: self.limit,
            direction_index: self.direction_index,
            germ: self.germ.clone(),
            sums: OnceLock::new(),
        }
    }
}

impl OrbitSample {
    /// A bare point list with no limit point (finite sets, test fixtures).
    pub fn from_points(points: Vec<Complex64>) -> Self {
        let distances = points.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        Self::assemble(points, distances, None, None, None)
    }

    /// A point list converging to `limit`; the ε-neighborhood of the full
    /// infinite orbit is modelled beyond the last stored point.
    pub fn from_points_with_limit(points: Vec<Complex64>, limit: Complex64) -> Self {
        let distances = points.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        Self::assemble(points, distances, Some(limit), None, None)
    }

    fn assemble(
        points: Vec<Complex64>,
        distances: Vec<f64>,
        limit: Option<Complex64>,
        direction_index: Option<usize>,
        germ: Option<Germ>,
    ) -> Self {
        let monotone_from = monotone_index(&points, &distances, limit.unwrap_or(ZERO));
        Self { points, distances, monotone_from, limit, direction_index, germ, sums: OnceLock::new() }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn half_distance(&self, n: usize) -> f64 {
        self.distances[n] / 2.0
    }

    /// Index from which |z_n| and d_n decrease strictly.
    pub fn monotone_from(&self) -> usize {
        self.monotone_from
    }

    pub fn limit(&self) -> Option<Complex64> {
        self.limit
    }

    pub fn direction_index(&self) -> Option<usize> {
        self.direction_index
    }

    pub fn germ(&self) -> Option<&Germ> {
        self.germ.as_ref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same orbit rotated by `phase` about the origin.
    pub fn rotated(&self, phase: Complex64) -> Self {
        let points = self.points.iter().map(|z| z * phase).collect();
        let limit = self.limit.map(|l| l * phase);
        Self::assemble(points, self.distances.clone(), limit, self.direction_index, None)
    }

    /// Same orbit dilated by `s > 0` about the origin.
    pub fn scaled(&self, s: f64) -> Self {
        let points = self.points.iter().map(|z| z * s).collect();
        let distances = self.distances.iter().map(|d| d * s).collect();
        Self::assemble(points, distances, self.limit.map(|l| l * s), self.direction_index, None)
    }

    /// The orbit starting at z_m.
    pub fn shifted(&self, m: usize) -> Self {
        Self::assemble(
            self.points[m..].to_vec(),
            self.distances[m..].to_vec(),
            self.limit,
            self.direction_index,
            self.germ.clone(),
        )
    }

    /// CSV rows `n,re,im,d` (the last point has no successor distance).
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,re,im,d")?;
        for (n, z) in self.points.iter().enumerate() {
            let d = self.distances.get(n).map(|d| format!("{d:.17e}")).unwrap_or_default();
            writeln!(out, "{n},{:.17e},{:.17e},{d}", z.re, z.im)?;
        }
        Ok(())
    }
}

fn monotone_index(points: &[Complex64], distances: &[f64], limit: Complex64) -> usize {
    let n = distances.len();
    if n == 0 {
        return 0;
    }
    let mut start = n;
    while start > 0 {
        let j = start - 1;
        let modulus_ok = (points[j + 1] - limit).norm() < (points[j] - limit).norm();
        let distance_ok = j + 1 >= n || distances[j + 1] < distances[j];
        if !(modulus_ok && distance_ok) {
            break;
        }
        start = j;
    }
    start
}

/// Compensated sum of two doubles.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn dd_add(hi: Complex64, lo: Complex64, step: Complex64) -> (Complex64, Complex64) {
    let (re, re_err) = two_sum(hi.re, step.re);
    let (im, im_err) = two_sum(hi.im, step.im);
    let lo = Complex64::new(lo.re + re_err, lo.im + im_err);
    let (re, re_lo) = two_sum(re, lo.re);
    let (im, im_lo) = two_sum(im, lo.im);
    (Complex64::new(re, im), Complex64::new(re_lo, im_lo))
}

/// Iterate `step` from z0; positions are accumulated in double-double so
/// that 10^6 small steps do not drift.
fn iterate(
    map: &dyn Dynamics,
    z0: Complex64,
    stop: StopCriteria,
    inverse: bool,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let escape = 1e3 * z0.norm().max(1.0);
    let mut points = vec![z0];
    let mut distances = Vec::new();
    let mut hi = z0;
    let mut lo = ZERO;
    let mut previous: Option<(Complex64, Complex64)> = None;
    while points.len() < stop.max_points {
        let mut delta = if inverse {
            newton_inverse(|w| map.displacement(w), |w| map.derivative(w), hi, 1e-15)? - hi
        } else {
            map.displacement(hi)
        };
        // First-order correction for the low word, slope from the previous step.
        if let Some((z_prev, d_prev)) = previous {
            let dz = hi - z_prev;
            if dz != ZERO {
                delta += (delta - d_prev) / dz * lo;
            }
        }
        previous = Some((hi, delta));
        let d = delta.norm();
        let (h, l) = dd_add(hi, lo, delta);
        hi = h;
        lo = l;
        if !hi.re.is_finite() || !hi.im.is_finite() || hi.norm() > escape {
            return Err(Error::Precondition(format!(
                "initial point {z0} not attracted: orbit escapes after {} steps",
                points.len()
            )));
        }
        points.push(hi);
        distances.push(d);
        if hi.norm() < stop.min_modulus || d < stop.min_distance {
            break;
        }
    }
    Ok((points, distances))
}

fn attracted_direction(g: &Germ, z: Complex64, inverse: bool) -> Option<usize> {
    let dirs = if inverse { repelling_directions(g) } else { attracting_directions(g) }.ok()?;
    dirs.iter()
        .min_by(|a, b| angle_between(z, a.unit).total_cmp(&angle_between(z, b.unit)))
        .map(|d| d.root_index)
}

fn angle_between(z: Complex64, unit: Complex64) -> f64 {
    (z * unit.conj()).arg().abs()
}

fn finish(
    map: &dyn Dynamics,
    germ: Option<&Germ>,
    z0: Complex64,
    stop: StopCriteria,
    inverse: bool,
) -> Result<OrbitSample> {
    let (points, distances) = iterate(map, z0, stop, inverse)?;
    let last = *points.last().expect("orbit has its initial point");
    let direction = germ.filter(|g| g.is_parabolic()).and_then(|g| attracted_direction(g, last, inverse));
    let sample = OrbitSample::assemble(points, distances, Some(ZERO), direction, germ.cloned());
    if sample.len() > 2 && sample.monotone_from > sample.len() / 2 {
        return Err(Error::Precondition(format!(
            "initial point {z0} too far from origin: monotone only from index {} of {}",
            sample.monotone_from,
            sample.len()
        )));
    }
    Ok(sample)
}

/// Forward orbit of a germ.
pub fn orbit(g: &Germ, z0: Complex64, stop: StopCriteria) -> Result<OrbitSample> {
    finish(g, Some(g), z0, stop, false)
}

/// Backward orbit (Newton inverse at every step).
pub fn inverse_orbit(g: &Germ, z0: Complex64, stop: StopCriteria) -> Result<OrbitSample> {
    finish(g, Some(g), z0, stop, true)
}

/// Forward orbit of any map with a fixed point at the origin.
pub fn orbit_of(map: &dyn Dynamics, z0: Complex64, stop: StopCriteria) -> Result<OrbitSample> {
    finish(map, None, z0, stop, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Confidence {
    Verified,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PetalMembership {
    /// True for an attracting petal, false for a repelling one.
    pub attracting: bool,
    pub direction_index: usize,
    pub confidence: Confidence,
}

const PETAL_CHECK_STEPS: usize = 200;

/// Nearest attracting or repelling direction, confirmed by 200 iterates that
/// stay in the sector around it while their modulus decreases.
pub fn petal_membership(g: &Germ, z: Complex64) -> Result<PetalMembership> {
    let (k, _) = g.parabolic_leading()?;
    let attracting = attracting_directions(g)?;
    let repelling = repelling_directions(g)?;
    let nearest = |dirs: &[AttractingDirection]| {
        dirs.iter()
            .map(|d| (d.root_index, angle_between(z, d.unit), d.unit))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("k ≥ 1 directions")
    };
    let (ai, aangle, aunit) = nearest(&attracting);
    let (ri, rangle, runit) = nearest(&repelling);
    let is_attracting = aangle <= rangle;
    let (index, unit) = if is_attracting { (ai, aunit) } else { (ri, runit) };
    let half_opening = (PI - 0.1) / k as f64;
    let mut w = z;
    let mut verified = true;
    for _ in 0..PETAL_CHECK_STEPS {
        let next = if is_attracting {
            g.eval(w)
        } else {
            match g.eval_inverse(w, 1e-14) {
                Ok(v) => v,
                Err(_) => {
                    verified = false;
                    break;
                }
            }
        };
        if !(next.norm() < w.norm()) || angle_between(next, unit) > half_opening {
            verified = false;
            break;
        }
        w = next;
    }
    let confidence = if verified { Confidence::Verified } else { Confidence::Heuristic };
    Ok(PetalMembership { attracting: is_attracting, direction_index: index, confidence })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    /// Mean of z_n·n^{1/k} over the last decade of indices.
    pub fitted: Complex64,
    pub expected: Option<Complex64>,
    pub relative_deviation: Option<f64>,
    /// |z_n| decays geometrically; the power fit is rejected.
    pub exponential_decay: bool,
}

/// Compare z_n·n^{1/k} with the attracting direction A.
pub fn orbit_asymptotics_check(o: &OrbitSample) -> AsymptoticsReport {
    let pts = o.points();
    let n_total = pts.len();
    let first = (n_total / 10).max(1);
    let exponential_decay = {
        let a = pts[first].norm();
        let b = pts[n_total - 1].norm();
        let span = (n_total - 1 - first) as f64;
        // Power decay loses at most a factor n^{-1}; geometric decay loses
        // a fixed factor per step.
        b > 0.0 && span >= 5.0 && (b / a).ln() / span < -0.01 && b / a < ((first as f64) / (n_total as f64)).powi(4)
    };
    let leading = o.germ().and_then(|g| g.parabolic_leading().ok());
    let Some((k, _)) = leading else {
        return AsymptoticsReport { fitted: ZERO, expected: None, relative_deviation: None, exponential_decay };
    };
    let mut sum = ZERO;
    for (n, z) in pts.iter().enumerate().skip(first) {
        sum += z * (n as f64).powf(1.0 / k as f64);
    }
    let fitted = sum / (n_total - first) as f64;
    let expected = o
        .germ()
        .and_then(|g| attracting_directions(g).ok())
        .and_then(|dirs| o.direction_index().map(|i| dirs[i].point));
    let relative_deviation = expected.map(|a| (fitted - a).norm() / a.norm());
    AsymptoticsReport { fitted, expected, relative_deviation, exponential_decay }
}
