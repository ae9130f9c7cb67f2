//! Germs of diffeomorphisms fixing the origin: truncated series plus an
//! optional closed form used for evaluation.

use crate::error::{Error, Result};
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

/// Truncation used for builtin germs given by closed forms.
pub const BUILTIN_ORDER: usize = 40;

/// A holomorphic map near a fixed point at the origin.
///
/// `displacement` must be accurate in the relative sense even when it is much
/// smaller than `z`; orbit sums depend on it.
pub trait Dynamics: Send + Sync + fmt::Debug {
    fn displacement(&self, z: Complex64) -> Complex64;

    fn apply(&self, z: Complex64) -> Complex64 {
        z + self.displacement(z)
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        let h = 1e-6 * z.norm().max(1e-3);
        let forward = self.apply(z + h);
        let backward = self.apply(z - h);
        (forward - backward) / (2.0 * h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kind {
    Real,
    Complex,
}

#[derive(Clone)]
pub enum ClosedForm {
    /// z/(1−z)
    Model,
    /// z·e^z
    ZExp,
    /// −Log(2−e^z)
    LogGerm,
    Custom(Arc<dyn Dynamics>),
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedForm::Model => write!(f, "Model"),
            ClosedForm::ZExp => write!(f, "ZExp"),
            ClosedForm::LogGerm => write!(f, "LogGerm"),
            ClosedForm::Custom(m) => write!(f, "Custom({m:?})"),
        }
    }
}

impl ClosedForm {
    fn displacement(&self, z: Complex64) -> Complex64 {
        match self {
            ClosedForm::Model => z * z / (ONE - z),
            ClosedForm::ZExp => z * expm1(z),
            ClosedForm::LogGerm => {
                let e = expm1(z);
                -log1p(-e * e)
            }
            ClosedForm::Custom(m) => m.displacement(z),
        }
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        match self {
            ClosedForm::Model => (ONE - z).powi(-2),
            ClosedForm::ZExp => (ONE + z) * z.exp(),
            ClosedForm::LogGerm => z.exp() / (2.0 - z.exp()),
            ClosedForm::Custom(m) => m.derivative(z),
        }
    }
}

/// Formal invariants of a parabolic germ: multiplicity index `k`, leading
/// coefficient `a1` of z^{k+1} and residual invariant `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormalInvariants {
    pub k: usize,
    pub a1: Complex64,
    pub lambda: Complex64,
}

impl FormalInvariants {
    pub fn standard_pair(&self) -> (usize, Complex64) {
        (self.k, self.lambda)
    }
}

/// f(z) = Σ_{i≥1} a_i z^i, stored from degree 1.
#[derive(Debug, Clone)]
pub struct Germ {
    coeffs: Vec<Complex64>,
    kind: Kind,
    closed: Option<ClosedForm>,
    name: Option<&'static str>,
}

impl Germ {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.first().map_or(true, |a| *a == ZERO) {
            return Err(Error::Precondition(
                "linear coefficient must be nonzero for a diffeomorphism".into(),
            ));
        }
        let kind = if coeffs.iter().all(|c| c.im == 0.0) { Kind::Real } else { Kind::Complex };
        Ok(Self { coeffs, kind, closed: None, name: None })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Attach an exact evaluator; the stored coefficients stay in use for
    /// all formal computations.
    pub fn with_closed_form(mut self, closed: ClosedForm) -> Self {
        self.closed = Some(closed);
        self
    }

    pub fn model() -> Self {
        let mut g = Self::from_real(&[1.0; BUILTIN_ORDER]).expect("nonzero linear part");
        g.closed = Some(ClosedForm::Model);
        g.name = Some("model");
        g
    }

    pub fn zexp() -> Self {
        let mut coeffs = Vec::with_capacity(BUILTIN_ORDER);
        let mut factorial = 1.0;
        for n in 0..BUILTIN_ORDER {
            if n > 0 {
                factorial *= n as f64;
            }
            coeffs.push(Complex64::new(1.0 / factorial, 0.0));
        }
        let mut g = Self::new(coeffs).expect("nonzero linear part");
        g.closed = Some(ClosedForm::ZExp);
        g.name = Some("zexp");
        g
    }

    pub fn loggerm() -> Self {
        let len = BUILTIN_ORDER + 1;
        let mut identity = series::zeros(len);
        identity[1] = ONE;
        let e = series::add(&series::exp(&identity, len), &[-ONE], len);
        let s = series::scale(&series::log1p(&series::scale(&e, -ONE), len), -ONE);
        let mut g = Self::new(s[1..].to_vec()).expect("nonzero linear part");
        g.closed = Some(ClosedForm::LogGerm);
        g.name = Some("loggerm");
        g
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "model" => Some(Self::model()),
            "zexp" => Some(Self::zexp()),
            "loggerm" => Some(Self::loggerm()),
            _ => None,
        }
    }

    pub fn name(&self) -> Option<&'static str> {
        self.name
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of z^i (zero beyond the truncation).
    pub fn coeff(&self, i: usize) -> Complex64 {
        if i == 0 {
            return ZERO;
        }
        self.coeffs.get(i - 1).copied().unwrap_or(ZERO)
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed.as_ref()
    }

    /// Series including the zero constant term, resized to `len` entries.
    pub fn series(&self, len: usize) -> Series {
        let mut s = series::zeros(len);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + 1 < len {
                s[i + 1] = *c;
            }
        }
        s
    }

    pub fn is_parabolic(&self) -> bool {
        self.coeffs[0] == ONE && self.coeffs[1..].iter().any(|c| *c != ZERO)
    }

    /// k such that f(z) = z + a z^{k+1} + …, a ≠ 0.
    pub fn multiplicity_index(&self) -> Option<usize> {
        if !self.is_parabolic() {
            return None;
        }
        self.coeffs[1..].iter().position(|c| *c != ZERO).map(|p| p + 1)
    }

    /// (k, a) with f(z) = z + a z^{k+1} + ….
    pub fn parabolic_leading(&self) -> Result<(usize, Complex64)> {
        let k = self.multiplicity_index().ok_or_else(|| {
            Error::Precondition("germ is not parabolic (needs a1 = 1 and a nonlinear term)".into())
        })?;
        Ok((k, self.coeff(k + 1)))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        z + self.displacement(z)
    }

    /// f(z) − z.
    pub fn displacement(&self, z: Complex64) -> Complex64 {
        if let Some(c) = &self.closed {
            return c.displacement(z);
        }
        let tail = self.coeffs[1..].iter().rev().fold(ZERO, |acc, c| acc * z + c);
        z * ((self.coeffs[0] - ONE) + z * tail)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        if let Some(c) = &self.closed {
            return c.derivative(z);
        }
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(ZERO, |acc, (i, c)| acc * z + c * (i + 1) as f64)
    }

    /// self ∘ inner through degree `order`.
    pub fn compose(&self, inner: &Germ, order: usize) -> Result<Germ> {
        if order > self.truncation_order() || order > inner.truncation_order() {
            return Err(Error::Precondition(format!(
                "composition to order {order} exceeds available truncation ({}, {})",
                self.truncation_order(),
                inner.truncation_order()
            )));
        }
        let s = series::compose(&self.series(order + 1), &inner.series(order + 1), order + 1);
        Germ::new(s[1..].to_vec())
    }

    /// Compositional inverse through degree `order`.
    pub fn invert_series(&self, order: usize) -> Result<Germ> {
        if self.coeffs[0] == ZERO {
            return Err(Error::Precondition("not a diffeomorphism: a1 = 0".into()));
        }
        let s = series::reversion(&self.series(order + 1), order + 1);
        Germ::new(s[1..].to_vec())
    }

    /// Conjugate by tangent-to-identity changes z + c z^l, l = 2..k, to reach
    /// z + a z^{k+1} + b z^{2k+1} through degree 2k+1.
    pub fn normalize_extended(&self) -> Result<(Germ, FormalInvariants)> {
        let (k, a) = self.parabolic_leading()?;
        let top = 2 * k + 1;
        if self.truncation_order() < top {
            return Err(Error::Precondition(format!(
                "normalization needs truncation ≥ {top}, have {}",
                self.truncation_order()
            )));
        }
        let len = top + 1;
        let mut current = self.series(len);
        for l in 2..=k {
            let target = current[k + l];
            if target == ZERO {
                continue;
            }
            let c = -target / (a * (k + 1 - l) as f64);
            let mut change = series::zeros(len);
            change[1] = ONE;
            change[l] = c;
            let inverse = series::reversion(&change, len);
            current = series::compose(&inverse, &series::compose(&current, &change, len), len);
            current[k + l] = ZERO;
        }
        let b = current[top];
        let mut normal = series::zeros(len);
        normal[1] = ONE;
        normal[k + 1] = a;
        normal[top] += b;
        let lambda = Complex64::new(0.0, 2.0 * PI) * ((k + 1) as f64 / 2.0 - b / (a * a));
        let normal = Germ::new(normal[1..].to_vec())?;
        Ok((normal, FormalInvariants { k, a1: a, lambda }))
    }

    pub fn formal_invariants(&self) -> Result<FormalInvariants> {
        self.normalize_extended().map(|(_, inv)| inv)
    }

    /// Residue at 0 of 1/(f(z) − z).
    pub fn residual_index(&self) -> Result<Complex64> {
        let (k, _) = self.parabolic_leading()?;
        let len = k + 1;
        let quotient: Vec<Complex64> = (0..len).map(|j| self.coeff(k + 1 + j)).collect();
        Ok(series::recip(&quotient, len)[k])
    }

    /// Inverse map by Newton iteration seeded at z, to residual `tol`.
    pub fn eval_inverse(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        newton_inverse(|w| self.displacement(w), |w| self.derivative(w), z, tol)
    }
}

impl Dynamics for Germ {
    fn displacement(&self, z: Complex64) -> Complex64 {
        Germ::displacement(self, z)
    }

    fn apply(&self, z: Complex64) -> Complex64 {
        self.eval(z)
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        Germ::derivative(self, z)
    }
}

pub const NEWTON_MAX_STEPS: usize = 50;

/// Solve w + displacement(w) = z, seeded at w = z.
pub fn newton_inverse(
    displacement: impl Fn(Complex64) -> Complex64,
    derivative: impl Fn(Complex64) -> Complex64,
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    // Work with the correction u = w − z so the residual is formed without
    // cancelling two nearly equal points.
    let mut u = ZERO;
    let scale = z.norm().max(f64::MIN_POSITIVE);
    let mut last = f64::INFINITY;
    for _ in 0..NEWTON_MAX_STEPS {
        let w = z + u;
        let residual = u + displacement(w);
        let size = residual.norm();
        if size <= tol * scale || (size >= last && size <= 1e3 * tol * scale) {
            return Ok(w);
        }
        last = size;
        u -= residual / derivative(w);
    }
    Err(Error::Numeric(format!(
        "Newton inverse did not converge in {NEWTON_MAX_STEPS} steps at z = {z} (last residual {last:.3e})"
    )))
}

/// Parse `re`, `imi`, `re+imi` or `re-imi`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("invalid complex number '{text}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let parse_im = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(j) => {
            let re = body[..j].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, parse_im(&body[j..])?))
        }
        None => Ok(Complex64::new(0.0, parse_im(body)?)),
    }
}

impl FromStr for Germ {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(g) = Germ::builtin(s) {
            return Ok(g);
        }
        let coeffs = s.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
        Germ::new(coeffs)
    }
}

impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = self.name {
            return write!(f, "{name}");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| if c.im == 0.0 { format!("{}", c.re) } else { format!("{}{:+}i", c.re, c.im) })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}
