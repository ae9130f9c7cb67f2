//! Length, area and complex measure of ε-neighborhoods of orbits.
//!
//! The neighborhood splits at the critical index n_ε (first n with
//! d_n < 2ε) into a tail of disjoint discs 0..n_ε−1 and a nucleus made of
//! the disc at z_{n_ε} plus crescents K(z_{n+1}) \ K(z_n), n ≥ n_ε.
//!
//! Crescents with d ≥ 2κε are summed exactly. Below that the crescent area
//! is replaced by its odd series in d/ε, so the remaining sum only needs
//! Σ d^p and Σ d^p·midpoint for p = 1, 3, 5, 7, kept as block suffix sums.
//! Past the last stored point the orbit is continued by a model of the
//! remaining path (chord to the limit, power-law or geometric distances).

use crate::error::{Error, Result};
use crate::fatou::{gauss_legendre, FatouCoordinate};
use crate::orbit::OrbitSample;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const BLOCK: usize = 64;
/// Crescents with d/(2ε) below this use the series.
const SERIES_THRESHOLD: f64 = 0.05;
const POWERS: [i32; 4] = [1, 3, 5, 7];

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedComplex {
    re: Compensated,
    im: Compensated,
}

impl CompensatedComplex {
    #[inline]
    pub(crate) fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub(crate) fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Σ_{j≥D} of d_j^p and d_j^p·m_j past the stored distances, with an error
/// estimate for the path model.
#[derive(Debug, Clone, Copy, Default)]
struct PathTail {
    s: [f64; 4],
    m: [Complex64; 4],
    /// Relative error of the p = 1 sums (arc against chord).
    chord_error: f64,
    /// d_{D−1}, the largest distance in the unstored part is below it.
    last_distance: f64,
}

/// Orbit past its last stored point, continued through the Fatou coordinate
/// and summed by quadrature in the time variable.
#[derive(Debug, Clone)]
struct Continuation {
    /// (weight, d, midpoint) per quadrature node.
    nodes: Vec<(f64, f64, Complex64)>,
    /// Σd and Σd·m below the deepest node, by the chord to the limit.
    rest: (f64, Complex64),
    /// Relative accuracy of the continued path.
    accuracy: f64,
}

const FATOU_ORDER: usize = 12;
const QUADRATURE_LEVELS: usize = 28;
const QUADRATURE_POINTS: usize = 12;

fn continuation(o: &OrbitSample) -> Option<Continuation> {
    let g = o.germ()?;
    if o.limit() != Some(ZERO) || !g.is_parabolic() {
        return None;
    }
    let (k, _) = g.parabolic_leading().ok()?;
    let psi = FatouCoordinate::new(g, FATOU_ORDER).ok()?;
    let last = *o.points().last()?;
    let t_last = psi.eval(last, last);
    let accuracy = (psi.eval(g.eval(last), last) - t_last - 1.0).norm() + 1e-13;
    if !(accuracy < 1e-8) {
        return None;
    }
    // Σ_{i≥0} F(t_last + i) ≈ ∫_{−1/2}^∞ F(t_last + s) ds with s = R(v^{−k} − 1) − 1/2.
    let radius = t_last.norm();
    let rule = gauss_legendre(QUADRATURE_POINTS);
    let mut nodes = Vec::with_capacity(QUADRATURE_LEVELS * QUADRATURE_POINTS);
    let mut deepest = last;
    let kf = k as f64;
    for level in 0..QUADRATURE_LEVELS {
        let (hi, lo) = (0.5f64.powi(level as i32), 0.5f64.powi(level as i32 + 1));
        for &(x, w) in rule.iter().rev() {
            let v = lo + (hi - lo) * (x + 1.0) / 2.0;
            let s = radius * (v.powf(-kf) - 1.0) - 0.5;
            let jacobian = radius * kf * v.powf(-kf - 1.0) * (hi - lo) / 2.0;
            let t = t_last + s;
            let z = psi.invert(t, last * (t_last / t).powf(1.0 / kf), last).ok()?;
            deepest = z;
            let step = g.displacement(z);
            nodes.push((w * jacobian, step.norm(), z + step * 0.5));
        }
    }
    let chord = deepest.norm();
    Some(Continuation { nodes, rest: (chord, deepest * 0.5 * chord), accuracy })
}

/// Block suffix sums of distance powers and prefix sums of points.
#[derive(Debug)]
pub(crate) struct SuffixSums {
    s: Vec<[f64; 4]>,
    m: Vec<[Complex64; 4]>,
    prefix_points: Vec<Complex64>,
    tail: PathTail,
    continuation: Option<Continuation>,
}

impl SuffixSums {
    fn build(o: &OrbitSample) -> Self {
        let d = o.distances();
        let z = o.points();
        let blocks = d.len() / BLOCK + 1;
        let mut s = vec![[0.0; 4]; blocks + 1];
        let mut m = vec![[ZERO; 4]; blocks + 1];
        let mut acc_s = [Compensated::default(); 4];
        let mut acc_m = [CompensatedComplex::default(); 4];
        for j in (0..d.len()).rev() {
            let mid = (z[j] + z[j + 1]) * 0.5;
            let mut power = d[j];
            let d2 = d[j] * d[j];
            for p in 0..4 {
                acc_s[p].add(power);
                acc_m[p].add(mid * power);
                power *= d2;
            }
            if j % BLOCK == 0 {
                let b = j / BLOCK;
                for p in 0..4 {
                    s[b][p] = acc_s[p].value();
                    m[b][p] = acc_m[p].value();
                }
            }
        }
        let mut prefix_points = Vec::with_capacity(z.len() / BLOCK + 2);
        let mut acc = CompensatedComplex::default();
        for (j, p) in z.iter().enumerate() {
            if j % BLOCK == 0 {
                prefix_points.push(acc.value());
            }
            acc.add(*p);
        }
        let continuation = continuation(o);
        let tail = match (&continuation, o.limit()) {
            (None, Some(lim)) => path_tail(o, lim),
            _ => PathTail::default(),
        };
        Self { s, m, prefix_points, tail, continuation }
    }

    /// Σ_{j≥from} over stored distances.
    fn suffix(&self, o: &OrbitSample, from: usize) -> ([f64; 4], [Complex64; 4]) {
        let d = o.distances();
        let z = o.points();
        let next_block = from.div_ceil(BLOCK);
        let end = (next_block * BLOCK).min(d.len());
        let mut acc_s = [Compensated::default(); 4];
        let mut acc_m = [CompensatedComplex::default(); 4];
        for p in 0..4 {
            if next_block * BLOCK < d.len() {
                acc_s[p].add(self.s[next_block][p]);
                acc_m[p].add(self.m[next_block][p]);
            }
        }
        for j in from..end {
            let mid = (z[j] + z[j + 1]) * 0.5;
            let mut power = d[j];
            let d2 = d[j] * d[j];
            for p in 0..4 {
                acc_s[p].add(power);
                acc_m[p].add(mid * power);
                power *= d2;
            }
        }
        (acc_s.map(|a| a.value()), acc_m.map(|a| a.value()))
    }

    /// Σ_{j<n} z_j.
    fn prefix(&self, o: &OrbitSample, n: usize) -> Complex64 {
        let b = n / BLOCK;
        let mut acc = CompensatedComplex::default();
        acc.add(self.prefix_points[b]);
        for p in &o.points()[b * BLOCK..n] {
            acc.add(*p);
        }
        acc.value()
    }
}

/// Σ_{j≥D} (j/(D−1))^{−e}, midpoint rule.
fn power_tail(last_index: f64, e: f64) -> f64 {
    last_index / (e - 1.0) * ((last_index + 0.5) / last_index).powf(1.0 - e)
}

fn path_tail(o: &OrbitSample, lim: Complex64) -> PathTail {
    let d = o.distances();
    let z = o.points();
    let Some(&last_d) = d.last() else {
        return PathTail::default();
    };
    let last = *z.last().expect("nonempty");
    let chord = (last - lim).norm();
    let mut tail = PathTail { last_distance: last_d, ..PathTail::default() };
    tail.s[0] = chord;
    tail.m[0] = (last + lim) * 0.5 * chord;
    let big_d = d.len();
    if big_d < 8 || chord == 0.0 {
        return tail;
    }
    let last_index = (big_d - 1) as f64;
    let ratio = d[big_d - 1] / d[big_d - 2];
    let geometric = (1.0 - ratio) * last_index > 20.0;
    let offset = last - lim;
    if geometric {
        for (p, &pow) in POWERS.iter().enumerate().skip(1) {
            let r = ratio.powi(pow);
            let rz = ratio.powi(pow + 1);
            tail.s[p] = last_d.powi(pow) * r / (1.0 - r);
            tail.m[p] = lim * tail.s[p] + offset * last_d.powi(pow) * rz / (1.0 - rz);
        }
    } else {
        let i0 = (big_d * 9 / 10).max(1) - 1;
        let q = (d[i0] / d[big_d - 1]).ln() / (last_index / i0 as f64).ln();
        let q = q.clamp(1.05, 10.0);
        for (p, &pow) in POWERS.iter().enumerate().skip(1) {
            let e = pow as f64 * q;
            tail.s[p] = last_d.powi(pow) * power_tail(last_index, e);
            tail.m[p] = lim * tail.s[p] + offset * last_d.powi(pow) * power_tail(last_index, e + q - 1.0);
        }
    }
    // The stored path turns by θ between its midpoint and end; the unstored
    // arc exceeds its chord by O(θ²).
    let mid = z[z.len() / 2] - lim;
    let theta = if mid.norm() > 0.0 { (offset / mid).arg().abs() } else { 0.0 };
    tail.chord_error = theta * theta;
    tail
}

fn sums(o: &OrbitSample) -> &SuffixSums {
    o.sums.get_or_init(|| SuffixSums::build(o))
}

/// Area of K(z) \ K(w) for |z − w| = d ≤ 2ε.
pub fn crescent_area(d: f64, eps: f64) -> Result<f64> {
    if !(0.0..=2.0 * eps).contains(&d) {
        return Err(Error::Domain(format!("crescent needs 0 ≤ d ≤ 2ε, got d = {d}, ε = {eps}")));
    }
    Ok(crescent_area_unchecked(d, eps))
}

#[inline]
fn crescent_area_unchecked(d: f64, eps: f64) -> f64 {
    let t = (d / (2.0 * eps)).min(1.0);
    2.0 * eps * eps * (t * (1.0 - t * t).sqrt() + t.asin())
}

/// Centroid of the crescent K(z, ε) \ K(w, ε).
pub fn crescent_centroid(z: Complex64, w: Complex64, eps: f64) -> Result<Complex64> {
    let d = (z - w).norm();
    let area = crescent_area(d, eps)?;
    if d == 0.0 {
        return Err(Error::Domain("empty crescent (d = 0) has no centroid".into()));
    }
    let t = d / (2.0 * eps);
    let bracket = t * (1.0 - t * t).sqrt() - (1.0 - t * t).sqrt().asin();
    Ok(z + (w - z) * (eps * eps * bracket / area))
}

/// Smallest n ≥ n₀ with d_n < 2ε.
pub fn critical_index(o: &OrbitSample, eps: f64) -> Result<usize> {
    let d = o.distances();
    let n0 = o.monotone_from();
    if d.is_empty() || n0 >= d.len() {
        return Ok(d.len());
    }
    let threshold = 2.0 * eps;
    if d[d.len() - 1] >= threshold {
        if o.limit().is_some() {
            return Err(Error::Precondition(format!(
                "orbit too short for ε = {eps:e}: last half-distance is {:e}",
                d[d.len() - 1] / 2.0
            )));
        }
        return Ok(d.len());
    }
    Ok(n0 + d[n0..].partition_point(|&x| x >= threshold))
}

/// One evaluated ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarMeasures {
    pub eps: f64,
    pub n_eps: usize,
    pub area: f64,
    pub complex_measure: Complex64,
    pub directed_area: Complex64,
    /// Uncertainty from modelling the orbit past its last stored point.
    pub trunc_bound: f64,
}

/// Area, complex measure and directed area at one ε.
pub fn planar_measures(o: &OrbitSample, eps: f64) -> Result<PlanarMeasures> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("ε must be positive, got {eps}")));
    }
    let n_eps = critical_index(o, eps)?;
    let z = o.points();
    let d = o.distances();
    let disc = PI * eps * eps;
    let sums = sums(o);

    let mut area = Compensated::default();
    let mut moment = CompensatedComplex::default();
    area.add(n_eps as f64 * disc);
    moment.add(sums.prefix(o, n_eps) * disc);
    area.add(disc);
    moment.add(z[n_eps] * disc);
    let end_point = o.limit().unwrap_or(z[z.len() - 1]);
    moment.add((z[n_eps] - end_point) * (-0.5 * disc));

    let mut j = n_eps;
    while j < d.len() && d[j] >= 2.0 * SERIES_THRESHOLD * eps {
        let a = crescent_area_unchecked(d[j], eps);
        area.add(a);
        moment.add((z[j] + z[j + 1]) * (0.5 * a));
        j += 1;
    }
    let (mut s, mut m) = sums.suffix(o, j);
    let mut trunc_bound = 0.0;
    if let Some(cont) = &sums.continuation {
        let mut tail_area = Compensated::default();
        for &(w, d, mid) in &cont.nodes {
            let a = w * crescent_area_unchecked(d, eps);
            tail_area.add(a);
            moment.add(mid * a);
        }
        tail_area.add(2.0 * eps * cont.rest.0);
        moment.add(cont.rest.1 * (2.0 * eps));
        area.add(tail_area.value());
        trunc_bound = cont.accuracy * tail_area.value();
    } else if o.limit().is_some() {
        let tail = &sums.tail;
        for p in 0..4 {
            s[p] += tail.s[p];
            m[p] += tail.m[p];
        }
        let t = tail.last_distance / (2.0 * eps);
        let series_error = if t > SERIES_THRESHOLD {
            // Dropped τ⁹ term of the crescent series, summed geometrically.
            2.0 * eps * eps * (5.0 / 576.0) * t.powi(9) / (1.0 - t * t).max(1e-3)
        } else {
            0.0
        };
        let cubic = tail.s[1] / (12.0 * eps);
        trunc_bound = 2.0 * eps * tail.s[0] * tail.chord_error + 0.2 * cubic + series_error;
    }
    let coeffs = [
        2.0 * eps,
        -1.0 / (12.0 * eps),
        -1.0 / (320.0 * eps.powi(3)),
        -1.0 / (3584.0 * eps.powi(5)),
    ];
    for p in 0..4 {
        area.add(coeffs[p] * s[p]);
        moment.add(m[p] * coeffs[p]);
    }
    let area = area.value();
    let complex_measure = moment.value();
    let directed_area = if complex_measure.norm() > 0.0 {
        complex_measure * (area / complex_measure.norm())
    } else {
        ZERO
    };
    Ok(PlanarMeasures { eps, n_eps, area, complex_measure, directed_area, trunc_bound })
}

pub fn area_eps(o: &OrbitSample, eps: f64) -> Result<f64> {
    planar_measures(o, eps).map(|m| m.area)
}

pub fn complex_measure_eps(o: &OrbitSample, eps: f64) -> Result<Complex64> {
    planar_measures(o, eps).map(|m| m.complex_measure)
}

pub fn directed_area_eps(o: &OrbitSample, eps: f64) -> Result<Complex64> {
    let m = planar_measures(o, eps)?;
    if m.complex_measure.norm() == 0.0 {
        return Err(Error::Domain("centroid at the origin: direction undefined".into()));
    }
    Ok(m.directed_area)
}

/// Lebesgue measure of a union of intervals [x − ε, x + ε].
pub fn interval_union_length(xs: &[f64], eps: f64) -> f64 {
    let mut sorted: Vec<f64> = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut current: Option<(f64, f64)> = None;
    for x in sorted {
        let (lo, hi) = (x - eps, x + eps);
        current = match current {
            Some((a, b)) if lo <= b => Some((a, b.max(hi))),
            Some((a, b)) => {
                total += b - a;
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((a, b)) = current {
        total += b - a;
    }
    total
}

/// Length of the ε-neighborhood of a real orbit (real parts of the points).
/// With a limit point the unstored remainder fills the segment between the
/// last point and the limit.
pub fn length_eps(o: &OrbitSample, eps: f64) -> Result<f64> {
    let n_eps = critical_index(o, eps)?;
    let x: Vec<f64> = o.points().iter().map(|z| z.re).collect();
    if o.monotone_from() == 0 && n_eps < x.len() {
        let far = x[n_eps];
        let near = o.limit().map_or(x[x.len() - 1], |l| l.re);
        return Ok(2.0 * eps * n_eps as f64 + (far - near).abs() + 2.0 * eps);
    }
    let mut pts = x;
    if let Some(l) = o.limit() {
        // Points spaced below 2ε between the last point and the limit.
        let last = pts[pts.len() - 1];
        let steps = ((last - l.re).abs() / eps).ceil() as usize;
        pts.extend((1..=steps).map(|i| last + (l.re - last) * i as f64 / steps as f64));
    }
    Ok(interval_union_length(&pts, eps))
}

/// Closed-disc lens test: does K(c) \ K(b) meet K(a)? All radii ε.
fn crescent_meets_disc(a: Complex64, b: Complex64, c: Complex64, eps: f64) -> bool {
    let slack = 1e-12 * eps;
    let ac = (c - a).norm();
    if ac >= 2.0 * eps - slack {
        return false;
    }
    let far_from_b = |center: Complex64, other: Complex64| {
        let dir = center - b;
        if dir.norm() == 0.0 {
            return false;
        }
        let p = center + dir * (eps / dir.norm());
        (p - other).norm() <= eps && (p - b).norm() > eps + slack
    };
    if far_from_b(a, c) || far_from_b(c, a) {
        return true;
    }
    let mid = (a + c) * 0.5;
    let half = ac / 2.0;
    let h = (eps * eps - half * half).max(0.0).sqrt();
    if ac == 0.0 {
        return (a - b).norm() > slack;
    }
    let normal = (c - a) * Complex64::new(0.0, 1.0) / ac;
    [mid + normal * h, mid - normal * h].iter().any(|v| (v - b).norm() > eps + slack)
}

/// Checks that tail discs are disjoint from all other discs and that each
/// nucleus crescent misses the earlier discs (near n_ε densely, further out
/// on a geometric subsample).
pub fn admissibility_check(o: &OrbitSample, eps: f64) -> bool {
    let z = o.points();
    if z.len() < 2 {
        return true;
    }
    let Ok(n_eps) = critical_index(o, eps) else {
        return false;
    };
    let lim = o.limit().unwrap_or(z[z.len() - 1]);
    let n0 = o.monotone_from();
    let radius = |p: Complex64| (p - lim).norm();
    for j in 0..n_eps.min(z.len()) {
        for i in (j + 1)..z.len() {
            if i > n0 && i > j + 1 && radius(z[i]) < radius(z[j]) - 2.0 * eps {
                break;
            }
            if (z[i] - z[j]).norm() < 2.0 * eps * (1.0 - 1e-12) {
                return false;
            }
        }
    }
    let last = z.len() - 1;
    let mut checks: Vec<usize> = (n_eps..(n_eps + 64).min(last)).collect();
    let mut step = 64;
    while n_eps + step < last {
        checks.push(n_eps + step);
        step *= 2;
    }
    for n in checks {
        let (b, c) = (z[n], z[n + 1]);
        for j in (0..n).rev().take(4096) {
            if j >= n0 && radius(z[j]) - radius(c) > 2.0 * eps {
                break;
            }
            if crescent_meets_disc(z[j], b, c, eps) {
                return false;
            }
        }
    }
    true
}

/// Geometric ε grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GridSpec {
    /// `decades·ppd` points ending at the bottom of the orbit's valid window.
    Decades { decades: f64, points_per_decade: usize },
    /// Points from `eps_max` down to `eps_min`, both included.
    Range { eps_min: f64, eps_max: f64, points_per_decade: usize },
    Explicit(Vec<f64>),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Decades { decades: 2.5, points_per_decade: 60 }
    }
}

/// (ε_min, ε_max) = (10·d_N/2, d_{n₀}/4).
pub fn valid_window(o: &OrbitSample) -> Result<(f64, f64)> {
    let d = o.distances();
    if d.is_empty() {
        return Err(Error::Precondition("orbit has a single point".into()));
    }
    let lo = 10.0 * d[d.len() - 1] / 2.0;
    let hi = d[o.monotone_from().min(d.len() - 1)] / 4.0;
    if !(lo < hi) {
        return Err(Error::Precondition(format!("empty ε window [{lo:e}, {hi:e}]: extend the orbit")));
    }
    Ok((lo, hi))
}

fn geometric(eps_max: f64, count: usize, ppd: usize) -> Vec<f64> {
    (0..count).map(|i| eps_max * 10f64.powf(-(i as f64) / ppd as f64)).collect()
}

/// Decreasing grid values, nudged off any ε_n = d_n/2.
pub fn grid_values(o: &OrbitSample, spec: &GridSpec) -> Result<Vec<f64>> {
    let mut values = match spec {
        GridSpec::Decades { decades, points_per_decade } => {
            let (lo, hi) = valid_window(o)?;
            let count = (decades * *points_per_decade as f64).round() as usize;
            let top = lo * 10f64.powf((count.max(1) - 1) as f64 / *points_per_decade as f64);
            if top > hi * (1.0 + 1e-12) {
                return Err(Error::Precondition(format!(
                    "{decades} decades do not fit the valid window [{lo:e}, {hi:e}]"
                )));
            }
            geometric(top, count, *points_per_decade)
        }
        GridSpec::Range { eps_min, eps_max, points_per_decade } => {
            if !(eps_min < eps_max) {
                return Err(Error::Precondition("grid needs eps_min < eps_max".into()));
            }
            let span = (eps_max / eps_min).log10();
            let count = (span * *points_per_decade as f64).round() as usize + 1;
            let ppd = (count - 1) as f64 / span;
            (0..count).map(|i| eps_max * 10f64.powf(-(i as f64) / ppd)).collect()
        }
        GridSpec::Explicit(v) => v.clone(),
    };
    values.sort_by(|a, b| b.total_cmp(a));
    let d = o.distances();
    for e in values.iter_mut() {
        if let Ok(n) = critical_index(o, *e) {
            if n > 0 && n <= d.len() && d[n - 1] == 2.0 * *e {
                *e *= 1.0 + 1e-9;
            }
        }
    }
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepKind {
    /// Area, complex measure and directed area of planar neighborhoods.
    Planar,
    /// Lengths of neighborhoods of real orbits (stored in `area`).
    Line,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsSweep {
    pub kind: SweepKind,
    /// Decreasing ε.
    pub records: Vec<PlanarMeasures>,
}

impl EpsSweep {
    pub fn eps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.eps).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.area).collect()
    }

    pub fn complex_measures(&self) -> Vec<Complex64> {
        self.records.iter().map(|r| r.complex_measure).collect()
    }

    pub fn directed_areas(&self) -> Vec<Complex64> {
        self.records.iter().map(|r| r.directed_area).collect()
    }

    /// CSV with 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        match self.kind {
            SweepKind::Planar => {
                writeln!(out, "eps,n_eps,area,cm_re,cm_im,da_re,da_im,trunc_bound")?;
                for r in &self.records {
                    writeln!(
                        out,
                        "{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        r.eps,
                        r.n_eps,
                        r.area,
                        r.complex_measure.re,
                        r.complex_measure.im,
                        r.directed_area.re,
                        r.directed_area.im,
                        r.trunc_bound
                    )?;
                }
            }
            SweepKind::Line => {
                writeln!(out, "eps,n_eps,length,trunc_bound")?;
                for r in &self.records {
                    writeln!(out, "{:.16e},{},{:.16e},{:.16e}", r.eps, r.n_eps, r.area, r.trunc_bound)?;
                }
            }
        }
        Ok(())
    }

    /// Read a sweep written by [`EpsSweep::write_csv`]; the header fixes
    /// the kind.
    pub fn read_csv<R: std::io::BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty sweep file".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let kind = match header.trim() {
            "eps,n_eps,area,cm_re,cm_im,da_re,da_im,trunc_bound" => SweepKind::Planar,
            "eps,n_eps,length,trunc_bound" => SweepKind::Line,
            other => return Err(Error::Parse(format!("unknown sweep header '{other}'"))),
        };
        let mut records = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("malformed sweep row {}: '{line}'", i + 2));
            let fields: Vec<&str> = line.trim().split(',').collect();
            let num = |j: usize| -> Result<f64> { fields.get(j).ok_or_else(bad)?.parse().map_err(|_| bad()) };
            let n_eps = fields.get(1).ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let record = match kind {
                SweepKind::Planar if fields.len() == 8 => PlanarMeasures {
                    eps: num(0)?,
                    n_eps,
                    area: num(2)?,
                    complex_measure: Complex64::new(num(3)?, num(4)?),
                    directed_area: Complex64::new(num(5)?, num(6)?),
                    trunc_bound: num(7)?,
                },
                SweepKind::Line if fields.len() == 4 => PlanarMeasures {
                    eps: num(0)?,
                    n_eps,
                    area: num(2)?,
                    complex_measure: ZERO,
                    directed_area: ZERO,
                    trunc_bound: num(3)?,
                },
                _ => return Err(bad()),
            };
            records.push(record);
        }
        if records.is_empty() {
            return Err(Error::Parse("sweep file has no rows".into()));
        }
        Ok(EpsSweep { kind, records })
    }
}

fn evaluate(o: &OrbitSample, eps: f64, kind: SweepKind) -> Result<PlanarMeasures> {
    match kind {
        SweepKind::Planar => {
            let m = planar_measures(o, eps)?;
            if !admissibility_check(o, eps) {
                return Err(Error::Precondition(format!(
                    "ε-neighborhood at ε = {eps:e} is not of tail/nucleus type"
                )));
            }
            Ok(m)
        }
        SweepKind::Line => {
            let n_eps = critical_index(o, eps)?;
            let length = length_eps(o, eps)?;
            Ok(PlanarMeasures {
                eps,
                n_eps,
                area: length,
                complex_measure: ZERO,
                directed_area: ZERO,
                trunc_bound: 0.0,
            })
        }
    }
}

/// Evaluate the grid, in parallel when the `parallel` feature is on.
pub fn sweep(o: &OrbitSample, spec: &GridSpec, kind: SweepKind) -> Result<EpsSweep> {
    let grid = grid_values(o, spec)?;
    if let Some(&smallest) = grid.last() {
        let d = o.distances();
        if let Some(&last) = d.last() {
            if o.limit().is_some() && smallest < last / 2.0 {
                return Err(Error::Precondition(format!(
                    "ε = {smallest:e} below d_N/2 = {:e}: extend the orbit",
                    last / 2.0
                )));
            }
        }
    }
    // Build the shared sums before fanning out.
    let _ = sums(o);
    let records = crate::parallel::map(&grid, |&e| evaluate(o, e, kind))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    for r in &records {
        if kind == SweepKind::Planar && r.trunc_bound > 1e-4 * r.area {
            return Err(Error::Precondition(format!(
                "truncation bound {:e} too large at ε = {:e}: extend the orbit",
                r.trunc_bound, r.eps
            )));
        }
    }
    Ok(EpsSweep { kind, records })
}

/// Second-difference probe of ε ↦ Ã^ℂ around one ε_n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularityProbe {
    pub n: usize,
    pub eps_n: f64,
    pub step: f64,
    pub left_second: Complex64,
    pub right_second: Complex64,
    /// Same right-minus-left statistic at the midpoint of (ε_{n+1}, ε_n).
    pub interior_jump: f64,
    /// |right − left| at ε_n divided by `interior_jump`.
    pub blowup_factor: f64,
    /// |right − left| / |left|, the raw second-difference ratio.
    pub raw_ratio: f64,
    /// Relative mismatch of the one-sided first differences at ε_n.
    pub first_difference_mismatch: f64,
}

fn one_sided(o: &OrbitSample, center: f64, h: f64) -> Result<[Complex64; 5]> {
    let mut v = [ZERO; 5];
    for (i, slot) in v.iter_mut().enumerate() {
        *slot = complex_measure_eps(o, center + (i as f64 - 2.0) * h)?;
    }
    Ok(v)
}

/// For each n in the range, one-sided second differences with h = ε_n·10⁻⁴.
pub fn singularity_scan(o: &OrbitSample, n_range: std::ops::Range<usize>) -> Result<Vec<SingularityProbe>> {
    let d = o.distances();
    let mut out = Vec::new();
    for n in n_range {
        if n + 1 >= d.len() {
            return Err(Error::Precondition(format!("orbit too short for ε_{n}")));
        }
        let eps_n = d[n] / 2.0;
        let h = eps_n * 1e-4;
        let v = one_sided(o, eps_n, h)?;
        let left = (v[2] - v[1] * 2.0 + v[0]) / (h * h);
        let right = (v[4] - v[3] * 2.0 + v[2]) / (h * h);
        let interior = (eps_n + d[n + 1] / 2.0) / 2.0;
        let w = one_sided(o, interior, h)?;
        let interior_left = (w[2] - w[1] * 2.0 + w[0]) / (h * h);
        let interior_right = (w[4] - w[3] * 2.0 + w[2]) / (h * h);
        let interior_jump = (interior_right - interior_left).norm();
        let jump = (right - left).norm();
        let first_left = (v[2] - v[1]) / h;
        let first_right = (v[3] - v[2]) / h;
        out.push(SingularityProbe {
            n,
            eps_n,
            step: h,
            left_second: left,
            right_second: right,
            interior_jump,
            blowup_factor: jump / interior_jump.max(f64::MIN_POSITIVE),
            raw_ratio: jump / left.norm(),
            first_difference_mismatch: (first_right - first_left).norm() / first_left.norm(),
        });
    }
    Ok(out)
}
