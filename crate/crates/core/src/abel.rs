//! Generalized Abel equations H(f(z)) − H(z) = g(z) for parabolic germs f:
//! formal solutions, sectorial solutions summed along orbits, germs built
//! to admit a global solution, and principal parts of complex measures.

use crate::error::{Error, Result};
use crate::germ::{parse_complex, ClosedForm, Dynamics, Germ};
use crate::neighborhood::CompensatedComplex;
use crate::orbit::petal_membership;
use crate::series::{self, Series};
use crate::special::{expm1, log1p};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Power terms kept in the singular part of a sectorial solution.
pub const SECTORIAL_ORDER: usize = 6;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;
/// Radius used to bound the remainder series.
const REMAINDER_RADIUS: f64 = 0.3;
const REMAINDER_EXTRA: usize = 6;

/// Right-hand side g(z) = Σ α_i z^i, constant term allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs {
    coeffs: Vec<Complex64>,
}

impl Rhs {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().all(|c| *c == ZERO) {
            return Err(Error::Precondition("right-hand side is identically zero".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// g(z) = c·z^n.
    pub fn monomial(c: Complex64, n: usize) -> Self {
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[n] = c;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or(ZERO)
    }

    /// Order of vanishing at 0.
    pub fn multiplicity(&self) -> usize {
        self.coeffs.iter().position(|c| *c != ZERO).expect("nonzero rhs")
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        series::eval(&self.coeffs, z)
    }

    pub fn series(&self, len: usize) -> Series {
        series::resized(&self.coeffs, len)
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| if c.im == 0.0 { format!("{}", c.re) } else { format!("{}{:+}i", c.re, c.im) })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Either a comma list of coefficients from z^0 (`0,-1`) or a polynomial in
/// z with terms like `2`, `-z`, `3*z^2`, `0.5z^4`.
impl FromStr for Rhs {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty right-hand side".into()));
        }
        if t.contains(',') {
            let coeffs = t.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
            return Rhs::new(coeffs);
        }
        let bytes = t.as_bytes();
        let mut terms = Vec::new();
        let mut start = 0;
        for j in 1..bytes.len() {
            if (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E' | b'^') {
                terms.push(&t[start..j]);
                start = j;
            }
        }
        terms.push(&t[start..]);
        let mut coeffs = Vec::new();
        for term in terms {
            let (c, n) = parse_term(term).ok_or_else(|| Error::Parse(format!("invalid term '{term}' in '{text}'")))?;
            if coeffs.len() <= n {
                coeffs.resize(n + 1, ZERO);
            }
            coeffs[n] += c;
        }
        Rhs::new(coeffs)
    }
}

fn parse_term(term: &str) -> Option<(Complex64, usize)> {
    let (sign, body) = match term.as_bytes().first()? {
        b'-' => (-1.0, &term[1..]),
        b'+' => (1.0, &term[1..]),
        _ => (1.0, term),
    };
    let Some(pos) = body.find('z') else {
        return parse_complex(body).ok().map(|c| (sign * c, 0));
    };
    let coeff = body[..pos].trim_end_matches('*');
    let c = if coeff.is_empty() { ONE } else { parse_complex(coeff).ok()? };
    let rest = &body[pos + 1..];
    let n = if rest.is_empty() { 1 } else { rest.strip_prefix('^')?.parse().ok()? };
    Some((sign * c, n))
}

#[derive(Debug, Clone)]
pub struct AbelProblem {
    pub f: Germ,
    pub rhs: Rhs,
}

impl AbelProblem {
    pub fn new(f: Germ, rhs: Rhs) -> Result<Self> {
        f.parabolic_leading()?;
        Ok(Self { f, rhs })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Attracting petal V₊, forward orbits.
    Plus,
    /// Repelling petal V₋, backward orbits.
    Minus,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Side::Plus),
            "minus" | "-" => Ok(Side::Minus),
            _ => Err(Error::Parse(format!("side must be plus or minus, got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBranch {
    Principal,
    /// Argument in (0, 2π).
    Plus,
}

impl LogBranch {
    pub fn log(self, z: Complex64) -> Complex64 {
        let l = z.ln();
        match self {
            LogBranch::Principal => l,
            LogBranch::Plus if l.im <= 0.0 => l + 2.0 * PI * I,
            LogBranch::Plus => l,
        }
    }
}

impl Side {
    pub fn branch(self) -> LogBranch {
        match self {
            Side::Plus => LogBranch::Plus,
            Side::Minus => LogBranch::Principal,
        }
    }
}

/// H = Σ_{j=1}^{k} p_j z^{−j} + c·Log z + Σ_{j≥1} h_j z^j, without constant
/// term, for f(z) = z + a z^{k+1} + ….
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormalSolution {
    pub k: usize,
    pub leading: Complex64,
    /// Coefficient of z^{−j} at index j − 1.
    pub poles: Vec<Complex64>,
    pub log_coeff: Complex64,
    /// Coefficient of z^j at index j − 1.
    pub power: Vec<Complex64>,
    /// g − (S∘f − S) for the truncated solution S, by degree.
    #[serde(skip)]
    remainder: Series,
    #[serde(skip)]
    remainder_valuation: usize,
}

impl FormalSolution {
    /// α₀ in H = −α₀/z + ….
    pub fn alpha0(&self) -> Complex64 {
        -self.poles.first().copied().unwrap_or(ZERO)
    }

    /// Truncated solution at z with the given logarithm branch.
    pub fn eval(&self, z: Complex64, branch: LogBranch) -> Complex64 {
        let inv = z.inv();
        let poles = self.poles.iter().rev().fold(ZERO, |acc, c| (acc + c) * inv);
        let power = self.power.iter().rev().fold(ZERO, |acc, c| (acc + c) * z);
        poles + self.log_coeff * branch.log(z) + power
    }

    /// δ(w) = g(w) − (S(f(w)) − S(w)), formed from the displacement.
    fn defect(&self, f: &Germ, rhs: &Rhs, w: Complex64) -> Complex64 {
        let l = log1p(f.displacement(w) / w);
        let mut acc = rhs.eval(w) - self.log_coeff * l;
        let inv = w.inv();
        let mut p = ONE;
        for (j, c) in self.poles.iter().enumerate() {
            p *= inv;
            acc -= c * p * expm1(-((j + 1) as f64) * l);
        }
        p = ONE;
        for (j, c) in self.power.iter().enumerate() {
            p *= w;
            acc -= c * p * expm1((j + 1) as f64 * l);
        }
        acc
    }

    /// c with |δ(w)| ≲ c·|w|^m on |w| ≤ 0.3, m the remainder valuation.
    fn remainder_bound(&self) -> f64 {
        let m = self.remainder_valuation;
        self.remainder
            .iter()
            .enumerate()
            .skip(m)
            .map(|(i, c)| c.norm() * REMAINDER_RADIUS.powi((i - m) as i32))
            .fold(0.0, f64::max)
    }
}

/// Solve for the formal solution term by term through z^order.
pub fn formal_solution(p: &AbelProblem, order: usize) -> Result<FormalSolution> {
    let (k, a) = p.f.parabolic_leading()?;
    let top = order + k;
    let m_len = top + 1 + REMAINDER_EXTRA;
    let len = m_len + k + 1;
    let mut u = series::zeros(len);
    for (i, c) in u.iter_mut().enumerate().skip(1) {
        *c = p.f.coeff(i + 1);
    }
    // T_j(z) = z^j((1+U)^j − 1), T_log = log(1+U), as series in z.
    let apply = |j: isize| -> Series {
        let pw = series::pow1p(&u, Complex64::new(j as f64, 0.0), len);
        (0..m_len)
            .map(|m| {
                let idx = m as isize - j;
                if idx >= 1 {
                    pw[idx as usize]
                } else {
                    ZERO
                }
            })
            .collect()
    };
    let log_series = series::resized(&series::log1p(&u, len), m_len);
    let mut r = p.rhs.series(m_len);
    let mut poles = vec![ZERO; k];
    let mut power = vec![ZERO; order];
    let mut log_coeff = ZERO;
    for m in 0..=top {
        let j = m as isize - k as isize;
        let target = r[m];
        if target == ZERO {
            continue;
        }
        let (c, t) = if j == 0 { (target / a, log_series.clone()) } else { (target / (a * j as f64), apply(j)) };
        for (ri, ti) in r.iter_mut().zip(&t) {
            *ri -= c * ti;
        }
        r[m] = ZERO;
        match j {
            0 => log_coeff = c,
            j if j < 0 => poles[(-j - 1) as usize] = c,
            j => power[(j - 1) as usize] = c,
        }
    }
    Ok(FormalSolution { k, leading: a, poles, log_coeff, power, remainder: r, remainder_valuation: top + 1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summation {
    Forward,
    Compensated,
}

/// Sectorial solution H₊ on V₊ or H₋ on V₋ asymptotic to the formal one.
#[derive(Debug, Clone)]
pub struct SectorialSolution {
    problem: AbelProblem,
    formal: FormalSolution,
    side: Side,
    tol: f64,
    max_steps: usize,
    summation: Summation,
}

impl SectorialSolution {
    pub fn new(problem: AbelProblem, side: Side) -> Result<Self> {
        let formal = formal_solution(&problem, SECTORIAL_ORDER)?;
        Ok(Self {
            problem,
            formal,
            side,
            tol: DEFAULT_TOLERANCE,
            max_steps: DEFAULT_MAX_STEPS,
            summation: Summation::Compensated,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_steps(mut self, steps: usize) -> Self {
        self.max_steps = steps;
        self
    }

    pub fn with_summation(mut self, summation: Summation) -> Self {
        self.summation = summation;
        self
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn formal(&self) -> &FormalSolution {
        &self.formal
    }

    pub fn problem(&self) -> &AbelProblem {
        &self.problem
    }

    /// Whether z lies in the petal of this side.
    pub fn contains(&self, z: Complex64) -> Result<bool> {
        let m = petal_membership(&self.problem.f, z)?;
        Ok(m.attracting == (self.side == Side::Plus))
    }

    /// Value at z after checking petal membership.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !self.contains(z)? {
            let petal = if self.side == Side::Plus { "V₊" } else { "V₋" };
            return Err(Error::Precondition(format!("point {z} is not in the petal {petal}")));
        }
        self.eval_in_petal(z)
    }

    /// Value at z, assuming z lies in the petal.
    pub fn eval_in_petal(&self, z: Complex64) -> Result<Complex64> {
        let f = &self.problem.f;
        let k = self.formal.k as f64;
        let m = self.formal.remainder_valuation as f64;
        let a = self.formal.leading.norm();
        let mut bound = self.formal.remainder_bound();
        let mut forward = ZERO;
        let mut compensated = CompensatedComplex::default();
        let mut w = z;
        for step in 0..self.max_steps {
            if self.side == Side::Minus {
                w = f.eval_inverse(w, 1e-16)?;
            }
            if !(w.norm() < 1.0) || !w.re.is_finite() {
                return Err(Error::Precondition(format!("orbit of {z} leaves the petal after {step} steps")));
            }
            let d = self.formal.defect(f, &self.problem.rhs, w);
            forward += d;
            compensated.add(d);
            if self.side == Side::Plus {
                w = f.eval(w);
            }
            let r = w.norm();
            bound = bound.max(d.norm() / r.powf(m));
            let tail = 2.0 * bound * r.powf(m - k) / (a * (m - k));
            if tail < 0.5 * self.tol {
                let sum = match self.summation {
                    Summation::Forward => forward,
                    Summation::Compensated => compensated.value(),
                };
                let singular = self.formal.eval(z, self.side.branch());
                return Ok(match self.side {
                    Side::Plus => singular - sum,
                    Side::Minus => singular + sum,
                });
            }
        }
        Err(Error::Numeric(format!(
            "series tail bound not reached within {} orbit steps at z = {z}",
            self.max_steps
        )))
    }

    /// |H(f(z)) − H(z) − g(z)|.
    pub fn residual(&self, z: Complex64) -> Result<f64> {
        let h = self.eval_in_petal(z)?;
        let hf = self.eval_in_petal(self.problem.f.eval(z))?;
        Ok((hf - h - self.problem.rhs.eval(z)).norm())
    }
}

pub fn sectorial_plus(p: &AbelProblem, z: Complex64, tol: f64) -> Result<Complex64> {
    SectorialSolution::new(p.clone(), Side::Plus)?.with_tolerance(tol).eval(z)
}

pub fn sectorial_minus(p: &AbelProblem, z: Complex64, tol: f64) -> Result<Complex64> {
    SectorialSolution::new(p.clone(), Side::Minus)?.with_tolerance(tol).eval(z)
}

/// φ(f(z)) = φ(z)·(1 + v(z)) for a germ built to solve H(f) − H = g with
/// H = α_k/(k−1)·φ^{k−1} (k ≥ 2) or H = −α₀/φ + α₁·Log φ (k ≤ 1).
#[derive(Debug, Clone)]
struct SolvableMap {
    phi: Germ,
    rhs: Rhs,
    k: usize,
    alpha0: Complex64,
    alpha1: Complex64,
    alpha_k: Complex64,
}

impl SolvableMap {
    fn ratio(&self, p: Complex64, g: Complex64) -> Complex64 {
        if self.k >= 2 {
            let e = (self.k - 1) as f64;
            let x = e * g / (self.alpha_k * p.powf(e));
            return expm1(log1p(x) / e);
        }
        if self.alpha0 == ZERO {
            return expm1(g / self.alpha1);
        }
        let y = g * p / self.alpha0;
        let mut v = y / (ONE - y);
        if self.alpha1 == ZERO {
            return v;
        }
        for _ in 0..50 {
            let e = self.alpha0 * v / (p * (ONE + v)) + self.alpha1 * log1p(v) - g;
            let de = self.alpha0 / (p * (ONE + v) * (ONE + v)) + self.alpha1 / (ONE + v);
            let step = e / de;
            v -= step;
            if step.norm() <= 1e-17 * v.norm() {
                break;
            }
        }
        v
    }
}

impl Dynamics for SolvableMap {
    fn displacement(&self, z: Complex64) -> Complex64 {
        let p = self.phi.eval(z);
        let target = p * self.ratio(p, self.rhs.eval(z));
        // Solve φ(z + d) − φ(z) = target for d.
        let base = self.phi.displacement(z);
        let mut d = target / self.phi.derivative(z);
        for _ in 0..50 {
            let e = d + self.phi.displacement(z + d) - base - target;
            let step = e / self.phi.derivative(z + d);
            d -= step;
            if step.norm() <= 1e-17 * d.norm() {
                break;
            }
        }
        d
    }
}

/// A germ f with a global solution of H(f) − H = g, built from φ.
#[derive(Debug, Clone)]
pub struct SolvableGerm {
    pub germ: Germ,
    map: Arc<SolvableMap>,
}

impl SolvableGerm {
    pub fn phi(&self) -> &Germ {
        &self.map.phi
    }

    pub fn rhs(&self) -> &Rhs {
        &self.map.rhs
    }

    /// The global solution H at z.
    pub fn global_solution(&self, z: Complex64, branch: LogBranch) -> Complex64 {
        let m = &self.map;
        let p = m.phi.eval(z);
        if m.k >= 2 {
            let e = (m.k - 1) as f64;
            return m.alpha_k / e * p.powf(e);
        }
        let mut h = m.alpha1 * branch.log(p);
        if m.alpha0 != ZERO {
            h -= m.alpha0 / p;
        }
        h
    }
}

/// Series truncation of germs produced by `build_solvable_germ`.
pub const SOLVABLE_ORDER: usize = 20;

/// Germ f tangent to the identity for which H(f) − H = g has the global
/// solution of `SolvableGerm::global_solution`; g must vanish to order k.
pub fn build_solvable_germ(phi: &Germ, rhs: &Rhs, k: usize) -> Result<SolvableGerm> {
    if (phi.coeff(1) - ONE).norm() > 1e-14 {
        return Err(Error::Precondition("φ must be tangent to the identity".into()));
    }
    if rhs.multiplicity() != k {
        return Err(Error::Precondition(format!(
            "right-hand side vanishes to order {}, not k = {k}",
            rhs.multiplicity()
        )));
    }
    let map = SolvableMap {
        phi: phi.clone(),
        rhs: rhs.clone(),
        k,
        alpha0: rhs.coeff(0),
        alpha1: rhs.coeff(1),
        alpha_k: rhs.coeff(k),
    };
    let len = SOLVABLE_ORDER + 1;
    let phi_s = phi.series(len);
    let g = rhs.series(len);
    // Φ/z and G/z^s as series.
    let shift = |a: &[Complex64], s: usize| -> Series { series::resized(&a[s.min(a.len())..], len) };
    let phi_over_z = shift(&phi_s, 1);
    let mut phi_over_z_minus_one = phi_over_z.clone();
    phi_over_z_minus_one[0] = ZERO;
    let v = if k >= 2 {
        let e = (k - 1) as f64;
        let q = series::pow1p(&phi_over_z_minus_one, Complex64::new(e, 0.0), len);
        let x = series::scale(&series::mul(&shift(&g, k - 1), &series::recip(&q, len), len), e / map.alpha_k);
        let mut v = series::pow1p(&x, Complex64::new(1.0 / e, 0.0), len);
        v[0] = ZERO;
        v
    } else if map.alpha0 == ZERO {
        let mut v = series::exp(&series::scale(&g, map.alpha1.inv()), len);
        v[0] = ZERO;
        v
    } else {
        let y = series::scale(&series::mul(&g, &phi_s, len), map.alpha0.inv());
        let mut one_minus = series::scale(&y, -ONE);
        one_minus[0] += ONE;
        let mut v = series::mul(&y, &series::recip(&one_minus, len), len);
        if map.alpha1 != ZERO {
            let recip_phi = series::recip(&phi_over_z, len);
            for _ in 0..2 * (len as f64).log2().ceil() as usize + 2 {
                let mut one_plus = v.clone();
                one_plus[0] += ONE;
                let inv_one_plus = series::recip(&one_plus, len);
                // α₀ v/(Φ(1+v)) with v/Φ = (v/z)/(Φ/z).
                let v_over_phi = series::mul(&shift(&v, 1), &recip_phi, len);
                let e = series::add(
                    &series::add(
                        &series::scale(&series::mul(&v_over_phi, &inv_one_plus, len), map.alpha0),
                        &series::scale(&series::log1p(&v, len), map.alpha1),
                        len,
                    ),
                    &series::scale(&g, -ONE),
                    len,
                );
                // dE/dv = α₀/(Φ(1+v)²) + α₁/(1+v) has a pole; Newton on z·E.
                let inv_sq = series::mul(&inv_one_plus, &inv_one_plus, len);
                let mut de_z = series::scale(&series::mul(&recip_phi, &inv_sq, len), map.alpha0);
                let ez = times_z(&e);
                for (d, a) in de_z.iter_mut().zip(times_z(&series::scale(&inv_one_plus, map.alpha1))) {
                    *d += a;
                }
                let step = series::mul(&ez, &series::recip(&de_z, len), len);
                for (vi, si) in v.iter_mut().zip(&step) {
                    *vi -= si;
                }
                v[0] = ZERO;
            }
        }
        v
    };
    let mut one_plus_v = v;
    one_plus_v[0] += ONE;
    let target = series::mul(&phi_s, &one_plus_v, len);
    let f = series::compose(&series::reversion(&phi_s, len), &target, len);
    let map = Arc::new(map);
    let germ = Germ::new(f[1..].to_vec())?.with_closed_form(ClosedForm::Custom(map.clone()));
    Ok(SolvableGerm { germ, map })
}

fn times_z(a: &[Complex64]) -> Series {
    let mut out = series::zeros(a.len());
    out[1..].copy_from_slice(&a[..a.len() - 1]);
    out
}

fn check_principal_route(f: &Germ) -> Result<()> {
    let (k, a) = f.parabolic_leading()?;
    if k != 1 || (a - ONE).norm() > 1e-12 {
        return Err(Error::Precondition(format!(
            "principal parts need f(z) = z + z² + …, got k = {k}, leading coefficient {a}"
        )));
    }
    Ok(())
}

fn one_abel(f: &Germ) -> Result<AbelProblem> {
    AbelProblem::new(f.clone(), Rhs::monomial(-ONE, 1))
}

/// Principal part of the complex measure on V₊: π·H₊(z) − π/4 + iπ².
pub fn principal_part_plus(f: &Germ, z: Complex64) -> Result<Complex64> {
    check_principal_route(f)?;
    let h = SectorialSolution::new(one_abel(f)?, Side::Plus)?.eval(z)?;
    Ok(PI * h - PI / 4.0 + I * PI * PI)
}

/// Principal part for f⁻¹ on V₋: z − π·H₋(z) + π/4.
pub fn principal_part_minus(f: &Germ, z: Complex64) -> Result<Complex64> {
    check_principal_route(f)?;
    let h = SectorialSolution::new(one_abel(f)?, Side::Minus)?.eval(z)?;
    Ok(z - PI * h + PI / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Half {
    Up,
    Low,
}

/// (H₊ − H₋)(z) for the model germ and g = −z, with q = e^{∓2πi/z}:
/// 2πi·q/(1−q) on V^up, −2πi − 2πi·q/(1−q) on V^low.
pub fn model_cocycle(z: Complex64, half: Half) -> Result<Complex64> {
    let two_pi_i = 2.0 * PI * I;
    let q = match half {
        Half::Up if z.im > 0.0 => (-two_pi_i / z).exp(),
        Half::Low if z.im < 0.0 => (two_pi_i / z).exp(),
        _ => return Err(Error::Domain(format!("{z} is not in the {half:?} half-plane"))),
    };
    let den = ONE - q;
    if den.norm() < 1e-8 {
        return Err(Error::Domain(format!("denominator 1 − q vanishes at {z}")));
    }
    Ok(match half {
        Half::Up => two_pi_i * q / den,
        Half::Low => -two_pi_i - two_pi_i * q / den,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSample {
    pub half: Half,
    pub z: Complex64,
    /// Fatou coordinate Ψ₊(z).
    pub psi: Complex64,
    /// t = e^{−2πiΨ₊(z)}.
    pub t: Complex64,
    /// (H₊ − H₋)(z).
    pub h: Complex64,
    /// Argument of the sampled function: 1/t on V^up, t on V^low.
    pub variable: Complex64,
    /// g_∞(1/t) = h on V^up, g₀(t) = h + 2πi on V^low.
    pub value: Complex64,
}

/// Minimum |Im Ψ₊| accepted by `moment_sample`.
pub const MOMENT_BAND: f64 = 2.0;

/// Samples of the 1-moment functions along points of V^up and V^low.
pub fn moment_sample(f: &Germ, points_up: &[Complex64], points_low: &[Complex64]) -> Result<Vec<MomentSample>> {
    check_principal_route(f)?;
    let psi = SectorialSolution::new(AbelProblem::new(f.clone(), Rhs::constant(ONE))?, Side::Plus)?;
    let plus = SectorialSolution::new(one_abel(f)?, Side::Plus)?;
    let minus = SectorialSolution::new(one_abel(f)?, Side::Minus)?;
    let two_pi_i = 2.0 * PI * I;
    let mut out = Vec::with_capacity(points_up.len() + points_low.len());
    for (half, points) in [(Half::Up, points_up), (Half::Low, points_low)] {
        for &z in points {
            if (half == Half::Up) != (z.im > 0.0) {
                return Err(Error::Precondition(format!("{z} is not in V^{half:?}")));
            }
            let p = psi.eval_in_petal(z)?;
            if p.im.abs() < MOMENT_BAND {
                return Err(Error::Precondition(format!(
                    "{z} is too close to the real axis: |Im Ψ₊| = {:.3} < {MOMENT_BAND}",
                    p.im.abs()
                )));
            }
            let t = (-two_pi_i * p).exp();
            let h = plus.eval_in_petal(z)? - minus.eval_in_petal(z)?;
            let (variable, value) = match half {
                Half::Up => (t.inv(), h),
                Half::Low => (t, h + two_pi_i),
            };
            out.push(MomentSample { half, z, psi: p, t, h, variable, value });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::digamma;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rhs_parsing() {
        let r: Rhs = "-z".parse().unwrap();
        assert_eq!(r.coeffs(), &[ZERO, -ONE]);
        let r: Rhs = "1".parse().unwrap();
        assert_eq!(r.coeffs(), &[ONE]);
        let r: Rhs = "2 - z + 0.5z^3".parse().unwrap();
        assert_eq!(r.coeffs(), &[c(2.0, 0.0), -ONE, ZERO, c(0.5, 0.0)]);
        let r: Rhs = "0,1e-3,1".parse().unwrap();
        assert_eq!(r.coeff(1), c(1e-3, 0.0));
        assert_eq!(r.multiplicity(), 1);
        assert!("0".parse::<Rhs>().is_err());
        assert!("z^".parse::<Rhs>().is_err());
    }

    #[test]
    fn formal_model_abel() {
        let p = AbelProblem::new(Germ::model(), Rhs::constant(ONE)).unwrap();
        let s = formal_solution(&p, 10).unwrap();
        assert!((s.alpha0() - ONE).norm() < 1e-14);
        assert!(s.log_coeff.norm() < 1e-14);
        assert!(s.power.iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn formal_zexp_is_log() {
        let p = AbelProblem::new(Germ::zexp(), Rhs::monomial(-ONE, 1)).unwrap();
        let s = formal_solution(&p, 12).unwrap();
        assert!(s.poles[0].norm() < 1e-14);
        assert!((s.log_coeff + ONE).norm() < 1e-14);
        assert!(s.power.iter().all(|c| c.norm() < 1e-12), "{:?}", s.power);
    }

    #[test]
    fn formal_quadratic_rhs() {
        let f: Germ = "1,1".parse().unwrap();
        let p = AbelProblem::new(f, Rhs::monomial(ONE, 2)).unwrap();
        let s = formal_solution(&p, 8).unwrap();
        assert!((s.power[0] - ONE).norm() < 1e-14);
        assert!(s.power[1..].iter().all(|c| c.norm() < 1e-12));
    }

    /// Substituting the truncated series leaves O(z^{order+k+1}).
    #[test]
    fn formal_substitution_oracle() {
        let f: Germ = "1,0,1,0.4,-0.2".parse().unwrap();
        let p = AbelProblem::new(f.clone(), "1+2z-z^3".parse().unwrap()).unwrap();
        let order = 4;
        let s = formal_solution(&p, order).unwrap();
        let err = |r: f64| {
            let z = c(-r, 0.3 * r);
            let lhs = s.eval(f.eval(z), LogBranch::Principal) - s.eval(z, LogBranch::Principal);
            (lhs - p.rhs.eval(z)).norm()
        };
        let ratio = err(0.1) / err(0.05);
        // k = 2: error ~ z^{order+3}.
        assert!((ratio.log2() - (order + 3) as f64).abs() < 0.6, "ratio {ratio}");
    }

    #[test]
    fn model_plus_is_digamma() {
        let p = AbelProblem::new(Germ::model(), Rhs::monomial(-ONE, 1)).unwrap();
        let h = SectorialSolution::new(p, Side::Plus).unwrap();
        for z in [c(-0.1, 0.0), c(-0.05, 0.03), c(-0.2, -0.05), c(-0.02, 0.01)] {
            let v = h.eval(z).unwrap();
            let want = digamma(-z.inv()) - PI * I;
            assert!((v - want).norm() < 1e-10, "{z}: {v} vs {want}");
        }
    }

    #[test]
    fn model_minus_is_digamma() {
        let p = AbelProblem::new(Germ::model(), Rhs::monomial(-ONE, 1)).unwrap();
        let h = SectorialSolution::new(p, Side::Minus).unwrap();
        for z in [c(0.1, 0.0), c(0.05, 0.03), c(0.2, -0.05)] {
            let v = h.eval(z).unwrap();
            let want = digamma(ONE + z.inv());
            assert!((v - want).norm() < 1e-10, "{z}: {v} vs {want}");
        }
    }

    #[test]
    fn wrong_petal_is_rejected() {
        let p = AbelProblem::new(Germ::model(), Rhs::constant(ONE)).unwrap();
        assert!(sectorial_plus(&p, c(0.1, 0.0), 1e-10).is_err());
        assert!(sectorial_minus(&p, c(-0.1, 0.0), 1e-10).is_err());
    }

    #[test]
    fn zexp_global_solution() {
        let p = AbelProblem::new(Germ::zexp(), Rhs::monomial(-ONE, 1)).unwrap();
        for z in [c(-0.2, 0.0), c(-0.1, 0.05), c(-0.05, -0.04)] {
            let v = sectorial_plus(&p, z, 1e-12).unwrap();
            assert!((v + LogBranch::Plus.log(z)).norm() < 1e-12);
        }
        let pp = principal_part_plus(&Germ::zexp(), c(-0.2, 0.0)).unwrap();
        let want = -PI * LogBranch::Plus.log(c(-0.2, 0.0)) + I * PI * PI - PI / 4.0;
        assert!((pp - want).norm() < 1e-10);
    }

    #[test]
    fn solvable_examples() {
        let id: Germ = "1".parse().unwrap();
        let s = build_solvable_germ(&id, &Rhs::monomial(ONE, 2), 2).unwrap();
        assert!((s.germ.coeff(2) - ONE).norm() < 1e-14);
        assert!((3..10).all(|i| s.germ.coeff(i).norm() < 1e-13));
        assert!((s.global_solution(c(0.1, 0.2), LogBranch::Principal) - c(0.1, 0.2)).norm() < 1e-15);

        let s = build_solvable_germ(&id, &Rhs::monomial(-ONE, 1), 1).unwrap();
        let zexp = Germ::zexp();
        assert!((1..15).all(|i| (s.germ.coeff(i) - zexp.coeff(i)).norm() < 1e-13));
        let z = c(-0.1, 0.07);
        assert!((s.germ.displacement(z) - zexp.displacement(z)).norm() < 1e-16);

        // φ = 1 − e^{−z} gives −Log(2 − e^z).
        let mut coeffs = Vec::new();
        let mut fact = 1.0;
        for n in 1..25 {
            fact *= n as f64;
            coeffs.push(c(-(-1f64).powi(n) / fact, 0.0));
        }
        let phi = Germ::new(coeffs).unwrap();
        let s = build_solvable_germ(&phi, &Rhs::monomial(-ONE, 1), 1).unwrap();
        let lg = Germ::loggerm();
        assert!((1..15).all(|i| (s.germ.coeff(i) - lg.coeff(i)).norm() < 1e-10));
    }

    #[test]
    fn solvable_mixed_rhs() {
        let phi: Germ = "1,0.2,-0.1".parse().unwrap();
        let rhs: Rhs = "1-0.5z".parse().unwrap();
        let s = build_solvable_germ(&phi, &rhs, 0).unwrap();
        for z in [c(-0.05, 0.01), c(-0.1, -0.02)] {
            let h = |w| s.global_solution(w, LogBranch::Plus);
            let r = h(s.germ.eval(z)) - h(z) - rhs.eval(z);
            assert!(r.norm() < 1e-12, "{r}");
        }
        // Series agrees with the evaluator.
        let z = c(-0.01, 0.005);
        let poly = series::eval(&s.germ.series(SOLVABLE_ORDER + 1), z);
        assert!((poly - s.germ.eval(z)).norm() < 1e-14);
    }

    #[test]
    fn cocycle_conjugation() {
        for z in [c(0.1, 0.2), c(-0.05, 0.3), c(0.2, 0.05)] {
            let up = model_cocycle(z, Half::Up).unwrap();
            let low = model_cocycle(z.conj(), Half::Low).unwrap();
            assert!((low - (up.conj() - 2.0 * PI * I)).norm() < 1e-12);
        }
        assert!(model_cocycle(c(0.1, -0.1), Half::Up).is_err());
    }
}
