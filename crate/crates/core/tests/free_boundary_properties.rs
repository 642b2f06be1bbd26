// Reference values are quoted at full oracle precision.
#![allow(clippy::excessive_precision)]

use gheat::free_boundary::{
    boundary_scan, f_fn, l_fn, sign_changes, solve_free_boundary, solve_free_boundary_degenerate,
    FreeBoundary, DEFAULT_TOL,
};
use gheat::gaussian::{double_factorial, gaussian_tail, scaled_tail};
use gheat::hermite::{g_poly, m_fn};
use gheat::Error;
use proptest::prelude::*;

const SIGMAS: [f64; 8] = [0.0, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99];

// (n, σ, c, k): 40-digit quadrature of the defining integrals plus a bracketing
// solve, see tests/oracle/profile_reference.py.
const REFERENCE: &[(u32, f64, f64, f64)] = &[
    (1, 0.0, -0.63883321580393557477, 0.63945790752328960488),
    (1, 0.05, -0.63496159159122390733, 0.63786866866633358491),
    (1, 0.5, -0.39082337020233617934, 0.49937869664373120771),
    (1, 0.9, -0.079748594356005831576, 0.14458625731329491582),
    (2, 0.0, -0.84560877978154195887, 3.0621281209977888634),
    (2, 0.3, -0.7019349666157132691, 2.9669607891718764683),
    (3, 0.7, -0.38063583876333618652, 15.954910754172436907),
    (5, 0.5, -0.79225569016819604323, 1520.5362702989204891),
];

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn matches_reference_solutions() {
    for &(n, s, c, k) in REFERENCE {
        let fb = FreeBoundary::solve(n, s).unwrap();
        assert!(rel(fb.c, c) <= 1e-12, "n={n} s={s}: c={}", fb.c);
        assert!(rel(fb.k, k) <= 1e-12, "n={n} s={s}: k={}", fb.k);
    }
}

#[test]
fn solver_contract() {
    for n in 1..=5 {
        for &s in &SIGMAS {
            let fb = FreeBoundary::solve(n, s).unwrap();
            assert!(fb.c < 0.0 && fb.k > 0.0, "{fb:?}");
            assert!(fb.residual.abs() <= 1e-12, "{fb:?}");
            assert_eq!(fb.d_scaled.is_some(), s > 0.0);
            if let Some(d) = fb.d_scaled {
                assert!(d.is_finite() && d > 0.0, "{fb:?}");
            }
        }
    }
}

#[test]
fn matching_function_vanishes_at_the_root() {
    for n in 1..=5 {
        for &s in &SIGMAS[1..] {
            let fb = FreeBoundary::solve(n, s).unwrap();
            let f = f_fn(n, s, fb.c).unwrap();
            // f_n is a difference of two terms of size ~ f_n(0) = (1-σ^{2n})(2n-2)!!
            // at most; compare against that scale.
            let scale = double_factorial(2 * n as i64 - 2);
            assert!(f.abs() <= 1e-14 * scale, "n={n} s={s}: f={f}");
        }
    }
}

#[test]
fn k_agrees_with_l_formulation() {
    for n in 1..=5 {
        for &s in &SIGMAS[1..] {
            let fb = FreeBoundary::solve(n, s).unwrap();
            let alt = double_factorial(2 * n as i64) / l_fn(n, fb.c).unwrap();
            assert!(rel(fb.k, alt) <= 1e-10, "n={n} s={s}: {} vs {alt}", fb.k);
        }
    }
}

#[test]
fn first_order_uncertain_system() {
    for &s in &SIGMAS[1..] {
        let fb = solve_free_boundary(1, s, DEFAULT_TOL).unwrap();
        let c = fb.c;
        let lhs = 1.0 + c / s * scaled_tail(-c / s).unwrap();
        let rhs = s * s * (1.0 - c * scaled_tail(c).unwrap());
        assert!((lhs - rhs).abs() <= 1e-12, "s={s}: {lhs} vs {rhs}");
        let k = -2.0 * c / ((-0.5 * c * c).exp() - c * gaussian_tail(c).unwrap());
        assert!((fb.k - k).abs() <= 1e-12 * k, "s={s}");
    }
}

#[test]
fn first_order_degenerate_system() {
    let fb = solve_free_boundary_degenerate(1, DEFAULT_TOL).unwrap();
    let c = fb.c;
    let r = c * c - c * c * c * scaled_tail(c).unwrap() - 1.0;
    assert!(r.abs() <= 1e-12, "{r}");
    let k = -2.0 * c * c * c * (0.5 * c * c).exp();
    assert!((fb.k - k).abs() <= 1e-12, "{} vs {k}", fb.k);
}

#[test]
fn degenerate_upper_second_derivative_vanishes() {
    for n in 1..=5 {
        let fb = solve_free_boundary_degenerate(n, DEFAULT_TOL).unwrap();
        let g = g_poly(n - 1).eval(fb.c);
        let v = g + fb.k / double_factorial(2 * n as i64) * m_fn(n - 1, fb.c).unwrap();
        assert!(v.abs() <= 1e-12, "n={n}: {v} (g={g})");
    }
}

#[test]
fn matching_function_shape() {
    for n in 1..=5 {
        for &s in &[0.1, 0.5, 0.9] {
            let at0 = f_fn(n, s, 0.0).unwrap();
            let want = (1.0 - f64::powi(s, 2 * n as i32)) * double_factorial(2 * n as i64 - 2);
            assert!(rel(at0, want) <= 1e-14, "n={n} s={s}");
            let mut prev = f64::NEG_INFINITY;
            for i in 0..300 {
                let x = -30.0 + 0.1 * i as f64;
                let v = f_fn(n, s, x).unwrap();
                assert!(v > prev, "n={n} s={s} x={x}");
                prev = v;
            }
        }
    }
    assert!(f_fn(1, 0.5, -10.0).unwrap() < 0.0);
}

#[test]
fn matching_function_guards() {
    assert!(matches!(f_fn(1, 0.5, -30.5), Err(Error::Range(_))));
    assert!(matches!(f_fn(1, 1.0, -1.0), Err(Error::Domain(_))));
    assert!(matches!(f_fn(1, 0.5, f64::NAN), Err(Error::Domain(_))));
}

#[test]
fn l_derivative_and_growth() {
    for n in 1..=5 {
        let fact: f64 = (2..2 * n).map(f64::from).product();
        // l_n is a difference of O(1) terms; further left its derivative drops
        // below what an ε = 1e-5 central difference can resolve.
        for &x in &[-2.0, -1.5, -1.0, -0.7, -0.2] {
            let eps = 1e-5;
            let fd = (l_fn(n, x + eps).unwrap() - l_fn(n, x - eps).unwrap()) / (2.0 * eps);
            let g = g_poly(n - 1).eval(x);
            let exact = fact / (g * g) * (-0.5 * x * x).exp();
            assert!(rel(fd, exact) <= 1e-6, "n={n} x={x}: {fd} vs {exact}");
        }
        let mut prev = f64::NEG_INFINITY;
        // Further left l_n is within a few ulps of √(2π) and increments vanish.
        for i in 1..=300 {
            let x = -3.0 + 0.01 * i as f64 - 0.001;
            let v = l_fn(n, x).unwrap();
            assert!(v > prev, "n={n} x={x}");
            prev = v;
        }
        // l_n ~ (2n-2)!!/((2n-1)!!|x|) as x → 0⁻.
        let near = l_fn(n, -1e-3).unwrap();
        assert!(near > 100.0, "n={n}");
        assert!(rel(l_fn(n, -1e-6).unwrap(), near * 1e3) <= 1e-2, "n={n}");
    }
}

#[test]
fn single_sign_change() {
    for n in 1..=5 {
        for &s in &SIGMAS {
            assert_eq!(sign_changes(n, s, 1000).unwrap(), 1, "n={n} s={s}");
        }
    }
}

#[test]
fn scan_is_monotone() {
    let sigmas: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    for n in 1..=5 {
        let rows = boundary_scan(n, &sigmas).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].c > w[0].c, "n={n}");
            assert!(w[1].k < w[0].k, "n={n}");
        }
    }
    let k = |s| FreeBoundary::solve(1, s).unwrap().k;
    assert!(k(0.05) > k(0.5) && k(0.5) > k(0.95) && k(0.95) > 0.0);
}

#[test]
fn degenerate_limit() {
    for n in 1..=5 {
        let a = FreeBoundary::solve(n, 1e-3).unwrap();
        let b = FreeBoundary::solve(n, 0.0).unwrap();
        assert!(rel(a.c, b.c) <= 1e-2 && rel(a.k, b.k) <= 1e-2, "n={n}");
    }
}

#[test]
fn small_sigma_does_not_overflow() {
    let fb = FreeBoundary::solve(3, 1e-4).unwrap();
    assert!(fb.d_scaled.unwrap().is_finite());
    assert!(fb.d_unscaled().unwrap().is_infinite());
}

#[test]
fn deterministic() {
    for &(n, s, _, _) in REFERENCE {
        let a = FreeBoundary::solve(n, s).unwrap();
        let b = FreeBoundary::solve(n, s).unwrap();
        assert_eq!(a.c.to_bits(), b.c.to_bits());
        assert_eq!(a.k.to_bits(), b.k.to_bits());
        assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_sigma_solves(n in 1u32..=8, s in 0.001f64..0.999) {
        let fb = FreeBoundary::solve(n, s).unwrap();
        prop_assert!(fb.c < 0.0 && fb.k > 0.0);
        prop_assert!(fb.residual.abs() <= 1e-12);
        let lo = FreeBoundary::solve(n, s * 0.9).unwrap();
        prop_assert!(lo.k > fb.k && lo.c < fb.c);
    }
}
