use num_complex::Complex64;
use orbitlens::abel::Rhs;
use orbitlens::classify::{cyclicity_set, multiplicity_from_dimension, saddle_loop_dimension};
use orbitlens::neighborhood::{crescent_area, crescent_centroid, interval_union_length};
use orbitlens::series;
use orbitlens::Germ;
use proptest::prelude::*;
use std::f64::consts::PI;

const ORDER: usize = 16;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn conjugate(f: &Germ, c: Complex64) -> Germ {
    let mut phi = vec![Complex64::new(1.0, 0.0), c];
    phi.resize(ORDER, Complex64::new(0.0, 0.0));
    let phi = Germ::new(phi).unwrap();
    let mut coeffs = f.coeffs().to_vec();
    coeffs.resize(ORDER, Complex64::new(0.0, 0.0));
    let f = Germ::new(coeffs).unwrap();
    phi.invert_series(ORDER).unwrap().compose(&f.compose(&phi, ORDER).unwrap(), ORDER).unwrap()
}

proptest! {
    #[test]
    fn reversion_inverts_composition(tail in prop::collection::vec(complex(), 1..6), a1 in complex()) {
        prop_assume!(a1.norm() > 0.2);
        let mut a = vec![Complex64::new(0.0, 0.0), a1];
        a.extend(tail);
        let inv = series::reversion(&a, 8);
        let id = series::compose(&a, &inv, 8);
        for (n, c) in id.iter().enumerate() {
            let expected = if n == 1 { 1.0 } else { 0.0 };
            prop_assert!((c - expected).norm() < 1e-6 * (1.0 + a1.norm().recip()).powi(8));
        }
    }

    #[test]
    fn formal_invariants_survive_conjugation(
        k in 1usize..4,
        a1 in complex(),
        b in complex(),
        c in complex(),
    ) {
        prop_assume!(a1.norm() > 0.3);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
        coeffs[0] = Complex64::new(1.0, 0.0);
        coeffs[k] = a1;
        coeffs[2 * k] = b;
        let f = Germ::new(coeffs).unwrap();
        let base = f.formal_invariants().unwrap();
        let conj = conjugate(&f, c * 0.5).formal_invariants().unwrap();
        prop_assert_eq!(base.k, conj.k);
        prop_assert!((base.a1 - conj.a1).norm() < 1e-9);
        prop_assert!((base.lambda - conj.lambda).norm() < 1e-7 * (1.0 + base.lambda.norm()));
    }

    #[test]
    fn germ_text_round_trip(coeffs in prop::collection::vec(-10.0..10.0f64, 1..6), im in -5.0..5.0f64) {
        prop_assume!(coeffs[0] != 0.0);
        let mut cs: Vec<Complex64> = coeffs.iter().map(|&re| Complex64::new(re, 0.0)).collect();
        if let Some(last) = cs.last_mut() {
            last.im = im;
        }
        let g = Germ::new(cs).unwrap();
        let back: Germ = g.to_string().parse().unwrap();
        prop_assert_eq!(g.coeffs(), back.coeffs());
    }

    #[test]
    fn rhs_text_round_trip(coeffs in prop::collection::vec(-10.0..10.0f64, 1..6)) {
        prop_assume!(coeffs.iter().any(|&c| c != 0.0));
        let rhs = Rhs::new(coeffs.iter().map(|&re| Complex64::new(re, 0.0)).collect()).unwrap();
        let text = rhs.to_string();
        let back: Rhs = text.parse().unwrap();
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn multiplicity_inverts_dimension(mu in 1usize..40) {
        let d = 1.0 - 1.0 / mu as f64;
        prop_assert_eq!(multiplicity_from_dimension(d).unwrap(), mu);
    }

    #[test]
    fn multiplicity_is_monotone(a in 0.0..0.97f64, b in 0.0..0.97f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if let (Ok(m_lo), Ok(m_hi)) = (multiplicity_from_dimension(lo), multiplicity_from_dimension(hi)) {
            prop_assert!(m_lo <= m_hi);
        }
    }

    #[test]
    fn cyclicity_set_contains_codimension(codim in 1usize..200) {
        let d = saddle_loop_dimension(codim).unwrap();
        prop_assert!((1.0..2.0).contains(&d));
        prop_assert!(cyclicity_set(d).unwrap().contains(&codim));
    }

    #[test]
    fn crescent_area_is_bounded_and_monotone(t1 in 0.0..1.0f64, t2 in 0.0..1.0f64, eps in 1e-6..1.0f64) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let a_lo = crescent_area(2.0 * eps * lo, eps).unwrap();
        let a_hi = crescent_area(2.0 * eps * hi, eps).unwrap();
        prop_assert!(a_lo <= a_hi + 1e-15 * eps * eps);
        prop_assert!(a_hi <= PI * eps * eps * (1.0 + 1e-12));
        prop_assert!(a_lo >= 0.0);
    }

    #[test]
    fn crescent_centroids_mirror_about_midpoint(z in complex(), dir in 0.0..(2.0 * PI), t in 0.01..1.0f64, eps in 1e-3..1.0f64) {
        let w = z + Complex64::from_polar(2.0 * eps * t, dir);
        let a = crescent_centroid(z, w, eps).unwrap();
        let b = crescent_centroid(w, z, eps).unwrap();
        prop_assert!((a + b - z - w).norm() < 1e-9 * (1.0 + z.norm()));
    }

    #[test]
    fn interval_union_length_identity(xs in prop::collection::vec(-10.0..10.0f64, 1..60), eps in 1e-3..2.0f64) {
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        let gaps: f64 = sorted.windows(2).map(|w| (w[1] - w[0]).min(2.0 * eps)).sum();
        let len = interval_union_length(&xs, eps);
        prop_assert!((len - (gaps + 2.0 * eps)).abs() < 1e-9);
        prop_assert!(len <= 2.0 * eps * xs.len() as f64 + 1e-9);
    }
}
