//! Truncated power series over `Complex64`, stored densely by degree
//! (index 0 is the constant term). All operations truncate to `len` terms.

use num_complex::Complex64;

pub type Series = Vec<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn zeros(len: usize) -> Series {
    vec![ZERO; len]
}

pub fn resized(a: &[Complex64], len: usize) -> Series {
    let mut out = zeros(len);
    for (o, v) in out.iter_mut().zip(a) {
        *o = *v;
    }
    out
}

pub fn add(a: &[Complex64], b: &[Complex64], len: usize) -> Series {
    let mut out = resized(a, len);
    for (o, v) in out.iter_mut().zip(b) {
        *o += v;
    }
    out
}

pub fn scale(a: &[Complex64], c: Complex64) -> Series {
    a.iter().map(|v| v * c).collect()
}

pub fn mul(a: &[Complex64], b: &[Complex64], len: usize) -> Series {
    let mut out = zeros(len);
    for (i, ai) in a.iter().enumerate().take(len) {
        if *ai == ZERO {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Multiplicative inverse; needs a nonzero constant term.
pub fn recip(a: &[Complex64], len: usize) -> Series {
    assert!(a[0] != ZERO, "series reciprocal needs a nonzero constant term");
    let mut out = zeros(len);
    out[0] = a[0].inv();
    for n in 1..len {
        let mut acc = ZERO;
        for k in 1..=n.min(a.len() - 1) {
            acc += a[k] * out[n - k];
        }
        out[n] = -acc * out[0];
    }
    out
}

/// `outer(inner(z))` with `inner[0] == 0`.
pub fn compose(outer: &[Complex64], inner: &[Complex64], len: usize) -> Series {
    assert!(inner.first().map_or(true, |c| *c == ZERO), "inner series must vanish at 0");
    let mut out = zeros(len);
    let mut power = zeros(len);
    power[0] = ONE;
    for (i, c) in outer.iter().enumerate().take(len) {
        if i > 0 {
            power = mul(&power, inner, len);
        }
        if *c != ZERO {
            for (o, p) in out.iter_mut().zip(&power) {
                *o += c * p;
            }
        }
    }
    out
}

/// Compositional inverse of a series with `a[0] == 0`, `a[1] != 0`.
pub fn reversion(a: &[Complex64], len: usize) -> Series {
    assert!(a.len() > 1 && a[1] != ZERO, "reversion needs a nonzero linear term");
    let mut out = zeros(len);
    if len < 2 {
        return out;
    }
    out[1] = a[1].inv();
    // Fix one degree at a time: the degree-n coefficient of a(out(z)) is
    // a1 * out[n] + (terms in lower coefficients).
    for n in 2..len {
        let trial = compose(a, &out[..=n], n + 1);
        out[n] = -trial[n] / a[1];
    }
    out
}

/// exp of a series with zero constant term.
pub fn exp(a: &[Complex64], len: usize) -> Series {
    assert!(a.first().map_or(true, |c| *c == ZERO));
    // out' = a' out
    let mut out = zeros(len);
    out[0] = ONE;
    for n in 1..len {
        let mut acc = ZERO;
        for k in 1..=n.min(a.len() - 1) {
            acc += a[k] * out[n - k] * k as f64;
        }
        out[n] = acc / n as f64;
    }
    out
}

/// log(1 + a) for a series with zero constant term.
pub fn log1p(a: &[Complex64], len: usize) -> Series {
    assert!(a.first().map_or(true, |c| *c == ZERO));
    let mut one_plus = resized(a, len);
    one_plus[0] = ONE;
    let derivative = derivative(&one_plus);
    let quotient = mul(&derivative, &recip(&one_plus, len), len);
    integral(&quotient, len)
}

/// (1 + a)^p for a series with zero constant term.
pub fn pow1p(a: &[Complex64], p: Complex64, len: usize) -> Series {
    exp(&scale(&log1p(a, len), p), len)
}

pub fn derivative(a: &[Complex64]) -> Series {
    a.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect()
}

pub fn integral(a: &[Complex64], len: usize) -> Series {
    let mut out = zeros(len);
    for (i, c) in a.iter().enumerate() {
        if i + 1 < len {
            out[i + 1] = c / (i + 1) as f64;
        }
    }
    out
}

/// Horner evaluation.
pub fn eval(a: &[Complex64], z: Complex64) -> Complex64 {
    a.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}
