//! Chebyshev scales of power-log and exponential monomials, generalized
//! derivatives, and critical Minkowski orders of real orbits.
//!
//! Throughout, `l` stands for −log x.

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::neighborhood::EpsSweep;
use crate::orbit::OrbitSample;
use num_complex::Complex64;
use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

const EXPONENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ScaleMonomial {
    /// x^alpha·(−log x)^beta.
    PowerLog { alpha: f64, beta: f64 },
    /// e^{−c/x}.
    Exponential { c: f64 },
}

impl ScaleMonomial {
    pub const ONE: Self = Self::PowerLog { alpha: 0.0, beta: 0.0 };

    pub fn power_log(alpha: f64, beta: f64) -> Self {
        Self::PowerLog { alpha, beta }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::PowerLog { alpha, beta } => {
                let mut v = if alpha == 0.0 { 1.0 } else { x.powf(alpha) };
                if beta != 0.0 {
                    v *= (-x.ln()).powf(beta);
                }
                v
            }
            Self::Exponential { c } => (-c / x).exp(),
        }
    }

    /// log of [`Self::eval`], usable far below the f64 range of the value.
    fn ln_eval(&self, ln_x: f64) -> f64 {
        match *self {
            Self::PowerLog { alpha, beta } => {
                let mut v = alpha * ln_x;
                if beta != 0.0 {
                    v += beta * (-ln_x).ln();
                }
                v
            }
            Self::Exponential { c } => -c / ln_x.exp(),
        }
    }

    /// Ordering by flatness at 0: `Less` means `self` is less flat.
    pub fn flatness_cmp(&self, other: &Self) -> Ordering {
        match (*self, *other) {
            (Self::PowerLog { alpha: a, beta: b }, Self::PowerLog { alpha: c, beta: d }) => {
                a.total_cmp(&c).then(d.total_cmp(&b))
            }
            (Self::PowerLog { .. }, Self::Exponential { .. }) => Ordering::Less,
            (Self::Exponential { .. }, Self::PowerLog { .. }) => Ordering::Greater,
            (Self::Exponential { c: a }, Self::Exponential { c: b }) => a.total_cmp(&b),
        }
    }

    /// Upper end of the interval (0, cap) where the monomial increases.
    fn increasing_cap(&self) -> Option<f64> {
        match *self {
            Self::PowerLog { alpha, beta } if alpha > 0.0 => {
                Some(if beta > 0.0 { (-beta / alpha).exp() } else { 1.0 })
            }
            Self::PowerLog { alpha, beta } if alpha == 0.0 && beta < 0.0 => Some(1.0),
            Self::PowerLog { .. } => None,
            Self::Exponential { .. } => Some(f64::INFINITY),
        }
    }
}

impl fmt::Display for ScaleMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn power(f: &mut fmt::Formatter<'_>, var: &str, p: f64) -> fmt::Result {
            if p == 1.0 {
                write!(f, "{var}")
            } else {
                write!(f, "{var}^{p}")
            }
        }
        match *self {
            Self::PowerLog { alpha, beta } => match (alpha == 0.0, beta == 0.0) {
                (true, true) => write!(f, "1"),
                (false, true) => power(f, "x", alpha),
                (true, false) => power(f, "l", beta),
                (false, false) => {
                    power(f, "x", alpha)?;
                    write!(f, "*")?;
                    power(f, "l", beta)
                }
            },
            Self::Exponential { c } => write!(f, "e^(-{c}/x)"),
        }
    }
}

fn parse_number(text: &str) -> Result<f64> {
    text.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{text}'")))
}

fn parse_power(text: &str, var: &str) -> Result<Option<f64>> {
    let text = text.trim();
    if text == var {
        return Ok(Some(1.0));
    }
    match text.strip_prefix(var).and_then(|rest| rest.strip_prefix('^')) {
        Some(exp) => {
            let exp = exp.trim().trim_start_matches('(').trim_end_matches(')');
            Ok(Some(parse_number(exp)?))
        }
        None => Ok(None),
    }
}

/// One factor of a product term: a number, x^a, l^b or e^(-c/x).
fn parse_factor(text: &str) -> Result<(f64, ScaleMonomial)> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix("e^(").and_then(|r| r.strip_suffix(')')) {
        let c = inner
            .trim()
            .strip_prefix('-')
            .and_then(|r| r.strip_suffix("/x").or_else(|| r.strip_suffix("/s")).or_else(|| r.strip_suffix("/t")))
            .ok_or_else(|| Error::Parse(format!("expected e^(-c/x), got '{text}'")))?;
        let c = parse_number(c)?;
        if !(c > 0.0) {
            return Err(Error::Parse(format!("exponential monomial needs c > 0, got {c}")));
        }
        return Ok((1.0, ScaleMonomial::Exponential { c }));
    }
    for var in ["x", "s", "t"] {
        if let Some(alpha) = parse_power(text, var)? {
            return Ok((1.0, ScaleMonomial::power_log(alpha, 0.0)));
        }
    }
    if let Some(beta) = parse_power(text, "l")? {
        return Ok((1.0, ScaleMonomial::power_log(0.0, beta)));
    }
    Ok((parse_number(text)?, ScaleMonomial::ONE))
}

/// A product such as `2*x^2*l` or `x/2`.
fn parse_product(text: &str) -> Result<(f64, ScaleMonomial)> {
    let mut coeff = 1.0;
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut exponential = None;
    let mut power_seen = false;
    for factor in text.split('*') {
        let mut parts = factor.split('/');
        let head = parts.next().unwrap_or_default();
        // A '/' inside e^(-c/x) belongs to the factor.
        let (head, rest): (String, Vec<&str>) = if head.trim_start().starts_with("e^(") {
            (factor.to_string(), Vec::new())
        } else {
            (head.to_string(), parts.collect())
        };
        if head.trim().is_empty() {
            return Err(Error::Parse(format!("empty factor in '{text}'")));
        }
        let (c, m) = parse_factor(&head)?;
        coeff *= c;
        for d in rest {
            coeff /= parse_number(d)?;
        }
        match m {
            ScaleMonomial::PowerLog { alpha: a, beta: b } => {
                power_seen |= a != 0.0 || b != 0.0;
                alpha += a;
                beta += b;
            }
            ScaleMonomial::Exponential { c } => {
                if exponential.replace(c).is_some() {
                    return Err(Error::Parse("at most one exponential factor per term".into()));
                }
            }
        }
    }
    match exponential {
        Some(_) if power_seen => Err(Error::Parse(format!("mixed exponential and power factors in '{text}'"))),
        Some(c) => Ok((coeff, ScaleMonomial::Exponential { c })),
        None => Ok((coeff, ScaleMonomial::power_log(alpha, beta))),
    }
}

/// Split at top-level '+'/'-' signs, keeping exponent signs of numbers.
fn split_terms(text: &str) -> Vec<(f64, String)> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut sign = 1.0;
    let mut current = String::new();
    for (i, &ch) in chars.iter().enumerate() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let exponent_sign = i > 0 && matches!(chars[i - 1], 'e' | 'E') && i > 1 && chars[i - 2].is_ascii_digit();
        let after_caret = i > 0 && chars[i - 1] == '^';
        if (ch == '+' || ch == '-') && depth == 0 && !exponent_sign && !after_caret {
            if !current.is_empty() {
                terms.push((sign, std::mem::take(&mut current)));
            }
            sign = if ch == '-' { -1.0 } else { 1.0 };
            continue;
        }
        current.push(ch);
    }
    if !current.is_empty() {
        terms.push((sign, current));
    }
    terms
}

impl FromStr for ScaleMonomial {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (c, m) = parse_product(text)?;
        if c != 1.0 {
            return Err(Error::Parse(format!("monomial '{text}' carries a coefficient")));
        }
        Ok(m)
    }
}

/// A finite combination Σ c_j·m_j of monomials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Combination {
    pub terms: Vec<(f64, ScaleMonomial)>,
}

impl Combination {
    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, m)| c * m.eval(x)).sum()
    }
}

impl FromStr for Combination {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        if text.trim_end().ends_with(['+', '-', '*', '/']) {
            return Err(Error::Parse(format!("dangling operator in '{text}'")));
        }
        let mut terms = Vec::new();
        for (sign, term) in split_terms(text) {
            let (c, m) = parse_product(&term)?;
            terms.push((sign * c, m));
        }
        if terms.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        Ok(Self { terms })
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, m)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "{}", if *c < 0.0 { "-" } else { "+" })?;
            } else if *c < 0.0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            match (a == 1.0, *m == ScaleMonomial::ONE) {
                (true, _) => write!(f, "{m}")?,
                (false, true) => write!(f, "{a}")?,
                (false, false) => write!(f, "{a}*{m}")?,
            }
        }
        Ok(())
    }
}

/// A real map g on (0, δ) fixing 0, written as a combination such as `x-x^2*l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealMap {
    pub expr: Combination,
}

impl RealMap {
    pub fn eval(&self, x: f64) -> f64 {
        self.expr.eval(x)
    }
}

impl FromStr for RealMap {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        Ok(Self { expr: text.parse()? })
    }
}

impl RealMap {
    /// g(x) − x, with any `x` term cancelled symbolically.
    pub fn displacement(&self, x: f64) -> f64 {
        let identity = ScaleMonomial::power_log(1.0, 0.0);
        let linear: f64 = self.expr.terms.iter().filter(|(_, m)| *m == identity).map(|(c, _)| c).sum();
        let rest: f64 = self.expr.terms.iter().filter(|(_, m)| *m != identity).map(|(c, m)| c * m.eval(x)).sum();
        rest + (linear - 1.0) * x
    }
}

/// Orbit of a real map from x0 ∈ (0, 1), kept while it decreases strictly
/// and stays above 1e-290.
pub fn real_orbit(g: &RealMap, x0: f64, max_points: usize) -> Result<OrbitSample> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::Precondition(format!("initial point {x0} must lie in (0, 1)")));
    }
    let y = g.eval(x0);
    if !(y >= 0.0 && y < x0) {
        return Err(Error::Precondition(format!("g({x0}) = {y} is not in [0, x0): not attracted to 0")));
    }
    let mut points = vec![Complex64::new(x0, 0.0)];
    let (mut hi, mut lo) = (x0, 0.0);
    // Tangent-to-identity maps take tiny steps, accumulated in double-double;
    // contracting maps are evaluated directly.
    let identity = ScaleMonomial::power_log(1.0, 0.0);
    let tangent = g.expr.terms.iter().filter(|(_, m)| *m == identity).map(|(c, _)| c).sum::<f64>() == 1.0;
    while points.len() < max_points {
        let (next, next_lo) = if tangent {
            let step = g.displacement(hi + lo);
            let s = hi + step;
            let err = (hi - (s - (s - hi))) + (step - (s - hi));
            let l = lo + err;
            let next = s + l;
            (next, l - (next - s))
        } else {
            (g.eval(hi), 0.0)
        };
        if !(next < hi && next > 1e-290) || !next.is_finite() {
            break;
        }
        hi = next;
        lo = next_lo;
        points.push(Complex64::new(hi, 0.0));
    }
    if points.len() < 3 {
        return Err(Error::Precondition(format!("orbit from {x0} stalls immediately")));
    }
    Ok(OrbitSample::from_points_with_limit(points, Complex64::new(0.0, 0.0)))
}

/// Function x^p·l^e·Σ c_m l^{−m}, closed under d/dx and division.
#[derive(Debug, Clone, PartialEq)]
struct LogSeries {
    p: f64,
    e: f64,
    c: Vec<f64>,
}

const SERIES_TERMS: usize = 24;

impl LogSeries {
    fn monomial(m: &ScaleMonomial) -> Result<Self> {
        match *m {
            ScaleMonomial::PowerLog { alpha, beta } => {
                let mut c = vec![0.0; SERIES_TERMS];
                c[0] = 1.0;
                Ok(Self { p: alpha, e: beta, c })
            }
            ScaleMonomial::Exponential { .. } => {
                Err(Error::Domain("generalized derivatives are symbolic only for power-log monomials".into()))
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0.0)
    }

    /// Shift so that c₀ ≠ 0.
    fn normalized(mut self) -> Self {
        let scale = self.c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let lead = self.c.iter().position(|v| v.abs() > 1e-13 * scale);
        match lead {
            None => {
                self.c.iter_mut().for_each(|v| *v = 0.0);
            }
            Some(k) => {
                self.c.drain(..k);
                self.c.resize(SERIES_TERMS, 0.0);
                self.e -= k as f64;
            }
        }
        self
    }

    /// d/dx, using dl/dx = −1/x.
    fn derivative(&self) -> Self {
        let mut c = vec![0.0; SERIES_TERMS];
        for m in 0..SERIES_TERMS {
            c[m] = self.p * self.c[m];
            if m >= 1 {
                c[m] -= (self.e - (m as f64 - 1.0)) * self.c[m - 1];
            }
        }
        Self { p: self.p - 1.0, e: self.e, c }.normalized()
    }

    fn divide(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Domain("division by an identically zero function".into()));
        }
        let mut q = vec![0.0; SERIES_TERMS];
        for m in 0..SERIES_TERMS {
            let mut acc = self.c[m];
            for k in 0..m {
                acc -= q[k] * other.c[m - k];
            }
            q[m] = acc / other.c[0];
        }
        Ok(Self { p: self.p - other.p, e: self.e - other.e, c: q }.normalized())
    }

    fn limit_at_zero(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let sign = self.c[0].signum();
        if self.p > EXPONENT_TOL {
            0.0
        } else if self.p < -EXPONENT_TOL || self.e > EXPONENT_TOL {
            sign * f64::INFINITY
        } else if self.e < -EXPONENT_TOL {
            0.0
        } else {
            self.c[0]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevScale {
    pub monomials: Vec<ScaleMonomial>,
    pub name: Option<String>,
}

impl ChebyshevScale {
    pub fn new(monomials: Vec<ScaleMonomial>) -> Result<Self> {
        if monomials.is_empty() {
            return Err(Error::Precondition("empty scale".into()));
        }
        for w in monomials.windows(2) {
            if w[0].flatness_cmp(&w[1]) != Ordering::Less {
                return Err(Error::Precondition(format!("{} is not flatter than {}", w[1], w[0])));
            }
        }
        for m in &monomials[1..] {
            if m.increasing_cap().is_none() {
                return Err(Error::Precondition(format!("{m} does not increase near 0")));
            }
        }
        Ok(Self { monomials, name: None })
    }

    /// Named scale truncated to `len` monomials.
    pub fn builtin(name: &str, len: usize) -> Result<Self> {
        let pl = ScaleMonomial::power_log;
        let mut m = Vec::with_capacity(len);
        match name {
            "power" => m.extend((0..len).map(|i| pl(i as f64, 0.0))),
            "power_odd" => {
                m.push(ScaleMonomial::ONE);
                m.extend((0..len.saturating_sub(1)).map(|i| pl(2.0 * i as f64 + 1.0, 0.0)));
            }
            "saddle_loop" => {
                m.push(ScaleMonomial::ONE);
                let mut n = 1.0;
                while m.len() < len {
                    m.push(pl(n, 1.0));
                    m.push(pl(n, 0.0));
                    n += 1.0;
                }
            }
            "two_saddle" => {
                m.push(ScaleMonomial::ONE);
                m.push(pl(1.0, 0.0));
                let mut n = 2;
                while m.len() < len {
                    m.extend((0..=n).rev().map(|j| pl(n as f64, j as f64)));
                    n += 1;
                }
            }
            _ => return Err(Error::Parse(format!("unknown scale '{name}'"))),
        }
        m.truncate(len);
        let mut scale = Self::new(m)?;
        scale.name = Some(name.to_string());
        Ok(scale)
    }

    /// {t^{α₁}l, t^{α₁}, t^{α₂}l, t^{α₂}, …}.
    pub fn abelian(alphas: &[f64]) -> Result<Self> {
        let m = alphas
            .iter()
            .flat_map(|&a| [ScaleMonomial::power_log(a, 1.0), ScaleMonomial::power_log(a, 0.0)])
            .collect();
        let mut scale = Self::new(m)?;
        scale.name = Some("abelian".into());
        Ok(scale)
    }

    /// {1, e^{−c₁/x}, e^{−c₂/x}, …}.
    pub fn exponential(cs: &[f64]) -> Result<Self> {
        let mut m = vec![ScaleMonomial::ONE];
        m.extend(cs.iter().map(|&c| ScaleMonomial::Exponential { c }));
        let mut scale = Self::new(m)?;
        scale.name = Some("exp".into());
        Ok(scale)
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn position(&self, m: &ScaleMonomial) -> Option<usize> {
        self.monomials.iter().position(|u| u == m)
    }

    fn generalized_derivative(&self, j: usize, i: usize) -> Result<LogSeries> {
        let mut d = LogSeries::monomial(&self.monomials[j])?.divide(&LogSeries::monomial(&self.monomials[0])?)?;
        for step in 0..i {
            if d.is_zero() {
                return Ok(d);
            }
            let mut norm = LogSeries::monomial(&self.monomials[step + 1])?
                .divide(&LogSeries::monomial(&self.monomials[0])?)?;
            for s in 0..step {
                norm = norm.derivative().divide(&self.divisor(s)?)?;
            }
            d = d.derivative().divide(&norm.derivative())?;
        }
        Ok(d)
    }

    /// (D_s u_{s+1})′.
    fn divisor(&self, s: usize) -> Result<LogSeries> {
        let d = self.generalized_derivative(s + 1, s)?.derivative();
        if d.is_zero() {
            return Err(Error::Domain(format!("scale is degenerate at index {}", s + 1)));
        }
        Ok(d)
    }
}

impl FromStr for ChebyshevScale {
    type Err = Error;

    /// `power`, `saddle_loop:8`, `abelian:0.5,1,1.5`, `exp:1,2` or an explicit
    /// comma-separated monomial list; a leading 1 is added to explicit lists.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (head, arg) = match text.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (text, None),
        };
        let list = |a: Option<&str>| -> Result<Vec<f64>> {
            a.ok_or_else(|| Error::Parse(format!("scale '{head}' needs a value list")))?
                .split(',')
                .map(parse_number)
                .collect()
        };
        match head {
            "power" | "power_odd" | "saddle_loop" | "two_saddle" => {
                let len = match arg {
                    Some(a) => a.parse::<usize>().map_err(|_| Error::Parse(format!("bad scale length '{a}'")))?,
                    None => 8,
                };
                Self::builtin(head, len)
            }
            "abelian" => Self::abelian(&list(arg)?),
            "exp" => Self::exponential(&list(arg)?),
            _ => {
                let mut m: Vec<ScaleMonomial> = text.split(',').map(str::parse).collect::<Result<_>>()?;
                if m[0] != ScaleMonomial::ONE {
                    m.insert(0, ScaleMonomial::ONE);
                }
                Self::new(m)
            }
        }
    }
}

/// D_i(combo)(0). The combination must use monomials of the scale.
pub fn gen_derivative_at_zero(scale: &ChebyshevScale, combo: &Combination, i: usize) -> Result<f64> {
    if i >= scale.len() {
        return Err(Error::Precondition(format!("index {i} beyond scale length {}", scale.len())));
    }
    let mut total = 0.0;
    for (c, m) in &combo.terms {
        let j = scale
            .position(m)
            .ok_or_else(|| Error::Precondition(format!("monomial {m} is not in the scale")))?;
        if *c == 0.0 {
            continue;
        }
        total += c * scale.generalized_derivative(j, i)?.limit_at_zero();
    }
    Ok(total)
}

/// Solve m(x) = eps for x in the interval where m increases.
pub fn invert_monomial(m: &ScaleMonomial, eps: f64) -> Result<f64> {
    let cap = m
        .increasing_cap()
        .ok_or_else(|| Error::Domain(format!("{m} is not increasing near 0")))?;
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("ε = {eps} must be positive")));
    }
    let target = eps.ln();
    let ln_cap = cap.min(1e300).ln();
    let top = if cap.is_finite() { m.ln_eval(ln_cap) } else { 0.0 };
    if !(target < top) {
        return Err(Error::Domain(format!("ε = {eps:e} is above the range of {m}")));
    }
    // Bracket in u = ln x, seeded by the fixed-point guess for power-log monomials.
    let seed = match *m {
        ScaleMonomial::PowerLog { alpha, beta } if alpha > 0.0 => {
            let mut u = target / alpha;
            for _ in 0..3 {
                u = (target - beta * (-u).ln()) / alpha;
                if !u.is_finite() || u >= ln_cap {
                    u = ln_cap - 1.0;
                }
            }
            u.min(ln_cap - 1e-9)
        }
        ScaleMonomial::Exponential { c } => (c / -target).ln(),
        _ => ln_cap - 1.0,
    };
    let mut hi = ln_cap;
    let mut lo = seed.min(ln_cap - 1e-9);
    let mut step = 1.0;
    while m.ln_eval(lo) > target {
        hi = lo;
        lo -= step;
        step *= 2.0;
        if lo < -1e6 {
            return Err(Error::Domain(format!("ε = {eps:e} is below the range of {m}")));
        }
    }
    if m.ln_eval(lo) <= target && lo < hi {
        let mut probe = lo + step.min(hi - lo);
        while probe < hi && m.ln_eval(probe) <= target {
            lo = probe;
            step *= 2.0;
            probe = (lo + step).min(hi);
        }
        if probe < hi {
            hi = probe;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if m.ln_eval(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * lo.abs().max(1.0) {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    ToZero,
    Bounded,
    ToInfinity,
}

/// Trend threshold on d log(ratio)/d log(−log ε).
pub const LOG_TREND_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizedContent {
    pub monomial: ScaleMonomial,
    /// Extremes of length/u⁻¹(ε) over the final decade.
    pub lower: f64,
    pub upper: f64,
    /// Slope of log ratio against log(1/ε), final decade.
    pub slope: f64,
    /// Slope of log ratio against log(−log ε), whole sweep.
    pub log_slope: f64,
    pub trend: Trend,
}

/// Ratios |S_ε|/u⁻¹(ε) along a length sweep.
pub fn generalized_content(sweep: &EpsSweep, m: &ScaleMonomial) -> Result<GeneralizedContent> {
    let eps = sweep.eps();
    let values = sweep.values();
    if eps.len() < 4 {
        return Err(Error::Precondition("generalized content needs at least 4 grid points".into()));
    }
    let ratios: Vec<f64> = eps
        .iter()
        .zip(&values)
        .map(|(&e, &v)| Ok(v / invert_monomial(m, e)?))
        .collect::<Result<_>>()?;
    let last = eps[eps.len() - 1];
    let start = eps.iter().position(|&e| e <= 10.0 * last * (1.0 + 1e-9)).unwrap_or(0);
    let tail = &ratios[start..];
    let lower = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let upper = tail.iter().cloned().fold(0.0, f64::max);
    let ln_ratio: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let x: Vec<f64> = eps[start..].iter().map(|e| -e.ln()).collect();
    let slope = if x.len() >= 2 {
        least_squares(&x, &ln_ratio[start..], &|v| vec![1.0, v])?.coeffs[1]
    } else {
        0.0
    };
    let xl: Vec<f64> = eps.iter().map(|e| (-e.ln()).ln()).collect();
    let log_slope = least_squares(&xl, &ln_ratio, &|v| vec![1.0, v])?.coeffs[1];
    let trend = if log_slope < -LOG_TREND_THRESHOLD {
        Trend::ToZero
    } else if log_slope > LOG_TREND_THRESHOLD {
        Trend::ToInfinity
    } else {
        Trend::Bounded
    };
    Ok(GeneralizedContent { monomial: *m, lower, upper, slope, log_slope, trend })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalOrder {
    pub order: usize,
    pub contents: Vec<GeneralizedContent>,
}

/// Largest index i ≥ 1 whose generalized content does not tend to 0.
pub fn critical_order(sweep: &EpsSweep, scale: &ChebyshevScale) -> Result<CriticalOrder> {
    if scale.len() < 2 {
        return Err(Error::Precondition("scale needs at least two monomials".into()));
    }
    let contents: Vec<GeneralizedContent> = scale.monomials[1..]
        .iter()
        .map(|m| generalized_content(sweep, m))
        .collect::<Result<_>>()?;
    if contents.last().map(|c| c.trend) != Some(Trend::ToZero) {
        return Err(Error::Precondition(
            "order beyond scale truncation: contents do not drop to 0 within the scale".into(),
        ));
    }
    let order = contents
        .iter()
        .rposition(|c| c.trend != Trend::ToZero)
        .map(|i| i + 1)
        .ok_or_else(|| Error::Precondition("all generalized contents vanish: order below index 1".into()))?;
    Ok(CriticalOrder { order, contents })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighborhood::{sweep, GridSpec, SweepKind};
    use approx::assert_relative_eq;

    fn pl(a: f64, b: f64) -> ScaleMonomial {
        ScaleMonomial::power_log(a, b)
    }

    #[test]
    fn builtin_scales() {
        let s = ChebyshevScale::builtin("saddle_loop", 5).unwrap();
        assert_eq!(s.monomials, vec![pl(0.0, 0.0), pl(1.0, 1.0), pl(1.0, 0.0), pl(2.0, 1.0), pl(2.0, 0.0)]);
        let s = ChebyshevScale::builtin("power", 3).unwrap();
        assert_eq!(s.monomials, vec![pl(0.0, 0.0), pl(1.0, 0.0), pl(2.0, 0.0)]);
        let s = ChebyshevScale::builtin("two_saddle", 6).unwrap();
        assert_eq!(
            s.monomials,
            vec![pl(0.0, 0.0), pl(1.0, 0.0), pl(2.0, 2.0), pl(2.0, 1.0), pl(2.0, 0.0), pl(3.0, 3.0)]
        );
        let s = ChebyshevScale::builtin("power_odd", 4).unwrap();
        assert_eq!(s.monomials, vec![pl(0.0, 0.0), pl(1.0, 0.0), pl(3.0, 0.0), pl(5.0, 0.0)]);
        assert!(ChebyshevScale::builtin("nope", 3).is_err());
    }

    #[test]
    fn scale_specs() {
        assert_eq!("saddle_loop:8".parse::<ChebyshevScale>().unwrap().len(), 8);
        let a: ChebyshevScale = "abelian:0.5,1,1.5".parse().unwrap();
        assert_eq!(a.monomials[0], pl(0.5, 1.0));
        assert_eq!(a.len(), 6);
        let e: ChebyshevScale = "x^1*l^1,x^1,x^2*l^1,x^2".parse().unwrap();
        assert_eq!(e.monomials, ChebyshevScale::builtin("saddle_loop", 5).unwrap().monomials);
        assert!("x^2,x".parse::<ChebyshevScale>().is_err());
        let x: ChebyshevScale = "exp:1,3".parse().unwrap();
        assert_eq!(x.monomials[2], ScaleMonomial::Exponential { c: 3.0 });
    }

    #[test]
    fn parse_generators() {
        let g: RealMap = "x-x^2*l".parse().unwrap();
        let x: f64 = 0.3;
        assert_relative_eq!(g.eval(x), x - x * x * -x.ln(), max_relative = 1e-15);
        let h: RealMap = "x/2".parse().unwrap();
        assert_relative_eq!(h.eval(x), 0.15);
        let e: RealMap = "x - 2.5e-1*e^(-3/x)".parse().unwrap();
        assert_relative_eq!(e.eval(x), x - 0.25 * (-10.0f64).exp(), max_relative = 1e-15);
        assert_eq!(g.expr.to_string(), "x-x^2*l");
        assert!("x*e^(-1/x)".parse::<RealMap>().is_err());
        assert!("x-".parse::<RealMap>().is_err());
        assert!("x-y".parse::<RealMap>().is_err());
    }

    #[test]
    fn derivatives_on_power_scale() {
        let s = ChebyshevScale::builtin("power", 3).unwrap();
        let combo = Combination { terms: vec![(3.0, pl(2.0, 0.0))] };
        assert_relative_eq!(gen_derivative_at_zero(&s, &combo, 2).unwrap(), 3.0);
        assert_eq!(gen_derivative_at_zero(&s, &combo, 1).unwrap(), 0.0);
        let other = Combination { terms: vec![(1.0, pl(3.0, 0.0))] };
        assert!(gen_derivative_at_zero(&s, &other, 1).is_err());
    }

    #[test]
    fn chebyshev_property_of_log_scales() {
        for name in ["saddle_loop", "two_saddle"] {
            let s = ChebyshevScale::builtin(name, 7).unwrap();
            for i in 0..s.len() {
                for j in 0..s.len() {
                    let combo = Combination { terms: vec![(5.0, s.monomials[j])] };
                    let d = gen_derivative_at_zero(&s, &combo, i).unwrap();
                    let want = if i == j { 5.0 } else { 0.0 };
                    assert!((d - want).abs() < 1e-9, "{name} D_{i}(u_{j}) = {d}");
                }
            }
        }
    }

    #[test]
    fn inversion() {
        assert_relative_eq!(invert_monomial(&pl(2.0, 0.0), 1e-6).unwrap(), 1e-3, max_relative = 1e-12);
        let x = invert_monomial(&pl(1.0, 1.0), 1e-4).unwrap();
        assert_relative_eq!(x * -x.ln(), 1e-4, max_relative = 1e-12);
        let e = ScaleMonomial::Exponential { c: 1.0 };
        assert_relative_eq!(invert_monomial(&e, (-100.0f64).exp()).unwrap(), 1e-2, max_relative = 1e-12);
        assert!(invert_monomial(&pl(1.0, 1.0), 0.5).is_err());
        assert!(invert_monomial(&ScaleMonomial::ONE, 0.5).is_err());
    }

    fn line_sweep(g: &str, x0: f64, points: usize) -> EpsSweep {
        let g: RealMap = g.parse().unwrap();
        let o = real_orbit(&g, x0, points).unwrap();
        sweep(&o, &GridSpec::default(), SweepKind::Line).unwrap()
    }

    #[test]
    fn contents_of_quadratic_generator() {
        let s = line_sweep("x-x^2", 0.3, 300_000);
        assert_eq!(generalized_content(&s, &pl(2.0, 0.0)).unwrap().trend, Trend::Bounded);
        assert_eq!(generalized_content(&s, &pl(1.0, 0.0)).unwrap().trend, Trend::ToInfinity);
        assert_eq!(generalized_content(&s, &pl(3.0, 0.0)).unwrap().trend, Trend::ToZero);
    }

    #[test]
    fn orders_in_the_saddle_loop_scale() {
        let scale = ChebyshevScale::builtin("saddle_loop", 7).unwrap();
        assert_eq!(critical_order(&line_sweep("x-x^2", 0.3, 300_000), &scale).unwrap().order, 4);
        assert_eq!(critical_order(&line_sweep("x-x^2*l", 0.3, 300_000), &scale).unwrap().order, 3);
        let flat = line_sweep("x-e^(-3/x)", 0.6, 300_000);
        assert!(critical_order(&flat, &scale).is_err());
    }
}
