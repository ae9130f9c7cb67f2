//! Gamma and digamma.
//!
//! Gamma uses the Lanczos approximation (g = 7, nine coefficients) with
//! reflection below 1/2. Digamma works on the complex plane: upward recurrence
//! until the real part reaches 8, then the asymptotic series.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments. Poles at non-positive integers give NaN.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Natural log of |Γ(x)| for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs a positive argument");
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Euler Beta function for positive arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

// B_{2n} / (2n) for n = 1..6.
const DIGAMMA_ASYMPTOTIC: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
];

/// Complex digamma ψ(w) = Γ'(w)/Γ(w). Poles at non-positive integers give NaN.
pub fn digamma(w: Complex64) -> Complex64 {
    if w.im == 0.0 && w.re <= 0.0 && w.re == w.re.floor() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    let mut w = w;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 8.0 {
        shift -= w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv2;
    for c in DIGAMMA_ASYMPTOTIC {
        series += power * c;
        power *= inv2;
    }
    shift + w.ln() - 0.5 * inv - series
}

/// e^z − 1 without cancellation for small |z|.
pub fn expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

/// Principal log(1 + u) without cancellation for small |u|.
pub fn log1p(u: Complex64) -> Complex64 {
    let modulus_term = 2.0 * u.re + u.norm_sqr();
    Complex64::new(0.5 * modulus_term.ln_1p(), u.im.atan2(1.0 + u.re))
}

/// Real digamma.
pub fn digamma_real(x: f64) -> f64 {
    digamma(Complex64::new(x, 0.0)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_at_integers_and_half() {
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(1.5), 0.5 * PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-13);
        assert!(gamma(-2.0).is_nan());
    }

    #[test]
    fn gamma_matches_statrs() {
        for i in 1..400 {
            let x = -3.7 + i as f64 * 0.05;
            if (x - x.round()).abs() < 1e-9 && x <= 0.0 {
                continue;
            }
            let reference = statrs::function::gamma::gamma(x);
            assert_relative_eq!(gamma(x), reference, max_relative = 1e-12);
        }
    }

    #[test]
    fn beta_matches_statrs() {
        for &(a, b) in &[(0.5, 0.5), (0.25, 1.5), (1.75, 0.5), (3.0, 4.5)] {
            assert_relative_eq!(beta(a, b), statrs::function::beta::beta(a, b), max_relative = 1e-12);
        }
    }

    #[test]
    fn ln_gamma_agrees_with_gamma() {
        for &x in &[0.1, 0.7, 1.0, 3.3, 12.5, 40.0] {
            assert_relative_eq!(ln_gamma(x), gamma(x).ln(), epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn digamma_reference_values() {
        let euler_gamma = 0.577_215_664_901_532_9;
        assert_relative_eq!(digamma_real(1.0), -euler_gamma, max_relative = 1e-13);
        assert_relative_eq!(digamma_real(10.0), 2.251_752_589_066_721, max_relative = 1e-13);
        assert_relative_eq!(
            digamma_real(0.5),
            -euler_gamma - 2.0 * 2f64.ln(),
            max_relative = 1e-13
        );
        for i in 1..200 {
            let x = 0.03 + i as f64 * 0.11;
            assert_relative_eq!(
                digamma_real(x),
                statrs::function::gamma::digamma(x),
                max_relative = 1e-11,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn expm1_log1p_small_arguments() {
        let z = Complex64::new(1e-12, -3e-13);
        assert!((expm1(z) - z).norm() < 1e-24);
        assert!((log1p(z) - z).norm() < 1e-24);
        let w = Complex64::new(0.4, -1.3);
        assert!((expm1(w) - (w.exp() - 1.0)).norm() < 1e-15);
        assert!((log1p(w) - (w + 1.0).ln()).norm() < 1e-15);
    }

    #[test]
    fn digamma_recurrence_and_reflection_complex() {
        let points = [
            Complex64::new(0.3, 2.0),
            Complex64::new(-4.2, 0.7),
            Complex64::new(0.0, 3.3),
            Complex64::new(-19.5, -0.1),
        ];
        for w in points {
            let step = digamma(w + 1.0) - digamma(w) - w.inv();
            assert!(step.norm() < 1e-12, "recurrence at {w}: {step}");
            let pi = Complex64::new(PI, 0.0);
            let reflect = digamma(1.0 - w) - digamma(w) - pi / (pi * w).tan();
            assert!(reflect.norm() < 1e-11, "reflection at {w}: {reflect}");
        }
    }
}
