mod common;

use apweights_core::weights::{
    ap_quotient, critical_exponent, decay_integral, dual_weight, reverse_holder_quotient,
    sup_ap_quotient,
};
use apweights_core::{
    poly::poly_rh_constant, Cube, CubeFamily, Polynomial, QuadratureSpec, Weight,
};
use common::adaptive_simpson;

fn q(n: usize) -> QuadratureSpec {
    QuadratureSpec::midpoint(n).unwrap()
}

#[test]
fn off_center_power_quotient_matches_simpson() {
    // |x|^2 on [3, 5] at p = 4: (avg x^2)(avg x^{-2/3})^3
    let w = Weight::power(1, 2.0).unwrap();
    let cube = Cube::new(vec![4.0], 1.0).unwrap();
    let avg_w = adaptive_simpson(&|x| x * x, 3.0, 5.0, 1e-13) / 2.0;
    let avg_d = adaptive_simpson(&|x: f64| x.powf(-2.0 / 3.0), 3.0, 5.0, 1e-13) / 2.0;
    let oracle = avg_w * avg_d.powi(3);
    let v = ap_quotient(&w, &cube, 4.0, &q(4096)).unwrap();
    assert!((v - oracle).abs() <= 1e-6 * oracle, "{v} vs {oracle}");
}

#[test]
fn centered_power_quotient_tends_to_nine() {
    // avg x^2 = 1/3 and avg |x|^{-2/3} = 3 on [-1, 1]; the midpoint mean of
    // |x|^{-2/3} has error c N^{-1/3}, removed here by Richardson steps.
    let w = Weight::power(1, 2.0).unwrap();
    let cube = Cube::centered(1, 1.0).unwrap();
    let dual_mean = |n: usize| {
        let avg_w = 1.0 / 3.0 - 1.0 / (3.0 * (n * n) as f64);
        (ap_quotient(&w, &cube, 4.0, &q(n)).unwrap() / avg_w).cbrt()
    };
    let (a, b) = (dual_mean(1 << 12), dual_mean(1 << 15));
    let r = 2f64.powf(1.0);
    let extrapolated = (r * b - a) / (r - 1.0);
    let quotient = extrapolated.powi(3) / 3.0;
    assert!((quotient - 9.0).abs() < 1e-3, "{quotient}");
    // and the raw values approach 9 from below
    let coarse = ap_quotient(&w, &cube, 4.0, &q(64)).unwrap();
    let fine = ap_quotient(&w, &cube, 4.0, &q(1 << 15)).unwrap();
    assert!(coarse < fine && fine < 9.0);
}

#[test]
fn power_weights_are_scale_invariant_on_centered_cubes() {
    for (dim, alpha, p) in [(1, 2.0, 4.0), (2, 1.5, 3.0), (3, -0.5, 2.0)] {
        let w = Weight::power(dim, alpha).unwrap();
        let base = ap_quotient(&w, &Cube::centered(dim, 1.0).unwrap(), p, &q(8)).unwrap();
        for h in [1e-3, 0.37, 5.0, 2048.0] {
            let v = ap_quotient(&w, &Cube::centered(dim, h).unwrap(), p, &q(8)).unwrap();
            assert!(
                (v - base).abs() <= 1e-10 * base,
                "dim {dim}, h {h}: {v} vs {base}"
            );
        }
    }
}

#[test]
fn centered_dyadic_family_gives_one_value() {
    let w = Weight::power(1, 2.0).unwrap();
    let halfwidths: Vec<f64> = (-8..=8).map(|k| 2f64.powi(k)).collect();
    let family = CubeFamily::centered(1, &halfwidths).unwrap();
    let r = sup_ap_quotient(&w, &family, 4.0, &QuadratureSpec::default_for_dim(1)).unwrap();
    assert!(r.is_finite());
    let first = r.entries[0].quotient;
    assert!(r
        .entries
        .iter()
        .all(|e| (e.quotient - first).abs() <= 1e-10 * first));
    assert_eq!(r.worst_cube.center(), &[0.0]);
    assert_eq!(r.cubes_examined, 17);

    let r = sup_ap_quotient(&w, &family, 2.5, &QuadratureSpec::default_for_dim(1)).unwrap();
    assert_eq!(r.sup_quotient, f64::INFINITY);
    assert_eq!(r.diverging_cubes, 17);
}

#[test]
fn critical_exponents_of_simple_weights() {
    let family = CubeFamily::default_for_dim(1).unwrap();
    let q1 = QuadratureSpec::default_for_dim(1);
    let tol = 0.01;

    let c = critical_exponent(&Weight::constant(1, 3.0).unwrap(), &family, &q1, tol).unwrap();
    assert!(c.exponent > 1.0 && c.exponent <= 1.0 + tol, "{c:?}");

    let c = critical_exponent(&Weight::power(1, 1.0).unwrap(), &family, &q1, tol).unwrap();
    assert!((2.0..=2.3).contains(&c.exponent), "{c:?}");

    let c = critical_exponent(&Weight::power(1, 2.0).unwrap(), &family, &q1, tol).unwrap();
    assert!((3.0..=3.3).contains(&c.exponent), "{c:?}");
}

#[test]
fn reverse_holder_off_center_is_below_the_degree_constant() {
    let xi2 = Polynomial::monomial(vec![2], 1.0);
    let w = Weight::poly_modulus(xi2);
    let quad = q(256);
    let v = reverse_holder_quotient(&w, &Cube::new(vec![10.0], 1.0).unwrap(), 2.0, &quad).unwrap();
    let m4 = adaptive_simpson(&|x: f64| x.powi(4), 9.0, 11.0, 1e-12) / 2.0;
    let m2 = adaptive_simpson(&|x: f64| x.powi(2), 9.0, 11.0, 1e-12) / 2.0;
    let oracle = m4.sqrt() / m2;
    assert!((v - oracle).abs() < 1e-5 * oracle, "{v} vs {oracle}");
    let bound = poly_rh_constant(1, 2, 2.0, 2000, &quad, 3).unwrap();
    assert!(v <= bound.value);
}

#[test]
fn decay_integral_matches_simpson() {
    let w = Weight::power(1, 2.0).unwrap();
    let r = 1024.0;
    let v = decay_integral(&w, 4.0, r, &QuadratureSpec::default_for_dim(1)).unwrap();
    let f = |x: f64| x * x / (1.0 + x).powi(4);
    // split at powers of two so the oracle resolves each scale
    let mut oracle = 0.0;
    let mut a = 0.0;
    let mut b = 1.0;
    while a < r {
        oracle += 2.0 * adaptive_simpson(&f, a, b, 1e-14);
        a = b;
        b *= 2.0;
    }
    assert!((v - oracle).abs() <= 1e-4 * oracle, "{v} vs {oracle}");
}

#[test]
fn decay_integral_stabilizes_above_critical_exponent() {
    // |x|^1 in one dimension has critical exponent 2; at p = 3 the tail
    // ∫_R^∞ x^{-2} dx halves with every doubling of R.
    let w = Weight::power(1, 1.0).unwrap();
    let quad = QuadratureSpec::default_for_dim(1);
    let values: Vec<f64> = (4..14)
        .map(|k| decay_integral(&w, 3.0, 2f64.powi(k), &quad).unwrap())
        .collect();
    let increments: Vec<f64> = values.windows(2).map(|v| (v[1] - v[0]) / v[0]).collect();
    assert!(increments.iter().all(|&d| d >= 0.0));
    for pair in increments.windows(2) {
        assert!(pair[1] < 0.6 * pair[0], "{increments:?}");
    }
    // at p = 1.5 (< 2) the integral keeps growing
    let slow: Vec<f64> = [8, 12]
        .iter()
        .map(|&k| decay_integral(&w, 1.5, 2f64.powi(k), &quad).unwrap())
        .collect();
    assert!(slow[1] > 1.5 * slow[0]);
}

#[test]
fn dual_quotient_identity_on_a_polynomial_modulus() {
    let poly = &(&Polynomial::monomial(vec![2, 0], 1.0) - &Polynomial::monomial(vec![0, 1], 2.0))
        + &Polynomial::constant(2, 0.25);
    let w = Weight::poly_modulus(poly);
    let p = 3.7;
    let pp = p / (p - 1.0);
    let cube = Cube::new(vec![0.3, -0.8], 1.5).unwrap();
    let lhs = ap_quotient(&dual_weight(&w, p).unwrap(), &cube, pp, &q(16)).unwrap();
    let rhs = ap_quotient(&w, &cube, p, &q(16)).unwrap().powf(pp - 1.0);
    assert!((lhs - rhs).abs() <= 1e-10 * rhs, "{lhs} vs {rhs}");
}
