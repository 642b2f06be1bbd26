// Reference values are quoted at full oracle precision.
#![allow(clippy::excessive_precision)]

use gheat::gaussian::{classical_shifted_moment, double_factorial, gaussian_tail};
use gheat::hermite::{
    g_poly, h_poly, left_asymptote, left_asymptote_enclosure, m_fn, mills_bounds, pair_identities,
    Parity,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const BOUND_X: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

#[test]
fn coefficients_are_integers_with_unit_lead() {
    for n in 0..=12 {
        let g = g_poly(n);
        let h = h_poly(n);
        assert!(g.is_integral() && h.is_integral(), "n={n}");
        assert_eq!(g.parity(), Parity::Odd);
        assert_eq!(h.parity(), Parity::Even);
        assert_eq!(g.degree(), Some(2 * n as usize + 1));
        assert_eq!(h.degree(), Some(2 * n as usize));
        let one = BigRational::from_integer(BigInt::from(1));
        assert_eq!(g.coeff(2 * n as usize + 1), one);
        assert_eq!(h.coeff(2 * n as usize), one);
        // h_n(0) = (2n)!!
        assert_eq!(
            h.coeff(0),
            BigRational::from_integer(BigInt::from(double_factorial(2 * n as i64) as u64))
        );
    }
}

#[test]
fn g_is_the_classical_odd_moment() {
    for n in 0..=8 {
        let g = g_poly(n);
        for i in -40..=40 {
            let x = 0.25 * i as f64;
            let a = g.eval(x);
            let b = classical_shifted_moment(2 * n + 1, x, 1.0);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "n={n} x={x}");
        }
    }
}

#[test]
fn m_is_nonnegative_and_nonincreasing() {
    for n in 0..=8 {
        let mut prev = f64::INFINITY;
        for i in 0..=200 {
            let x = -10.0 + 0.1 * i as f64;
            let m = m_fn(n, x).unwrap();
            assert!(m >= -1e-15, "n={n} x={x}");
            assert!(m <= prev, "n={n} x={x}");
            prev = m;
        }
    }
}

#[test]
fn m_matches_quadrature() {
    // ∫_x^∞ (s-x)^{2n+1} e^{-s²/2} ds, 40-digit quadrature
    let cases = [
        (0, 0.0, 1.0),
        (1, 0.0, 2.0),
        (2, 0.0, 8.0),
        (3, 0.0, 48.0),
        (1, -5.0, 350.92795847392481089),
        (3, 2.5, 0.0080546468273982637162),
    ];
    for (n, x, want) in cases {
        let got = m_fn(n, x).unwrap();
        assert!(
            (got - want).abs() <= 1e-12 * want,
            "n={n} x={x}: {got} vs {want}"
        );
    }
}

#[test]
fn m_matches_definition_where_it_is_stable() {
    // h_n e^{-x²/2} - g_n·tail(x), directly, for moderate negative x.
    for n in 0..=4 {
        for &x in &[-4.0, -2.0, -1.0] {
            let direct = h_poly(n).eval(x) * (-0.5 * x * x).exp()
                - g_poly(n).eval(x) * gaussian_tail(x).unwrap();
            let m = m_fn(n, x).unwrap();
            assert!((m - direct).abs() <= 1e-12 * m, "n={n} x={x}");
        }
    }
}

#[test]
fn far_right_m_is_negligible() {
    let m = m_fn(1, 30.0).unwrap();
    assert!((0.0..1e-100).contains(&m));
}

#[test]
fn identities_hold_exactly() {
    for n in 1..=12 {
        let r = pair_identities(n).unwrap();
        assert!(r.cross_product && r.wronskian, "n={n}");
        r.ensure().unwrap();
    }
}

#[test]
fn identities_need_positive_order() {
    assert!(pair_identities(0).is_err());
}

#[test]
fn sandwich_and_gap_bounds() {
    for n in 1..=10 {
        for &x in &BOUND_X {
            let r = mills_bounds(n, x).unwrap();
            assert!(r.holds(1e-12), "{r:?}");
            // The ordering itself is carried by the gaps, whose signs are exact;
            // at x = 10 the bounds agree with the tail beyond double resolution.
            assert!(r.lower_gap >= 0.0 && r.upper_gap >= 0.0, "{r:?}");
        }
    }
}

#[test]
fn bounds_tighten_with_order() {
    let mut prev = mills_bounds(1, 2.0).unwrap();
    for n in 2..=10 {
        let r = mills_bounds(n, 2.0).unwrap();
        assert!(r.lower >= prev.lower && r.upper <= prev.upper, "n={n}");
        assert!(
            r.lower_gap <= prev.lower_gap && r.upper_gap <= prev.upper_gap,
            "n={n}"
        );
        prev = r;
    }
}

#[test]
fn order_three_gaps_inside_bounds() {
    let r = mills_bounds(3, 1.0).unwrap();
    assert!(r.lower_gap <= r.lower_gap_bound);
    assert!(r.upper_gap <= r.upper_gap_bound);
    assert!(r.upper_gap_bound.is_finite());
}

#[test]
fn bounds_reject_nonpositive_x() {
    assert!(mills_bounds(2, 0.0).is_err());
    assert!(mills_bounds(2, -1.0).is_err());
    assert!(mills_bounds(0, 1.0).is_err());
}

#[test]
fn left_asymptote_matches_quadrature_at_minus_thirty() {
    // x^{2n}J_{2n-1}(-x)/(2n-1)! - 1 at x = -30, 40-digit quadrature. The
    // leading correction is -n(2n+1)/x².
    let dev = [
        -0.0033149574247613104469,
        -0.010983183919500025836,
        -0.022875971560481408453,
        -0.038812086754425322284,
    ];
    for (i, want) in dev.into_iter().enumerate() {
        let n = i as u32 + 1;
        let fact: f64 = (2..2 * n).map(f64::from).product();
        let got = left_asymptote(n, -30.0).unwrap() / fact - 1.0;
        assert!((got - want).abs() <= 1e-13, "n={n}: {got} vs {want}");
    }
    assert!((left_asymptote(1, -30.0).unwrap() - 1.0).abs() <= 0.01);
}

#[test]
fn left_asymptote_is_enclosed() {
    for n in 1..=8 {
        for &x in &[-30.0, -10.0, -5.0, -2.0, -1.0] {
            let v = left_asymptote(n, x).unwrap();
            let (lo, hi) = left_asymptote_enclosure(n, x).unwrap();
            assert!(lo < v && v < hi, "n={n} x={x}: {lo} < {v} < {hi}");
        }
    }
}

#[test]
fn left_asymptote_domain() {
    assert!(left_asymptote(1, 0.0).is_err());
    assert!(left_asymptote(0, -1.0).is_err());
    assert!(left_asymptote_enclosure(1, 1.0).is_err());
}

proptest! {
    #[test]
    fn bounds_hold_everywhere(n in 1u32..=10, x in 0.05f64..30.0) {
        let r = mills_bounds(n, x).unwrap();
        prop_assert!(r.holds(1e-12), "{:?}", r);
    }

    #[test]
    fn m_is_monotone_between_samples(n in 0u32..=8, x in -12.0f64..12.0, dx in 1e-6f64..2.0) {
        let a = m_fn(n, x).unwrap();
        let b = m_fn(n, x + dx).unwrap();
        prop_assert!(b >= 0.0);
        prop_assert!(b <= a);
    }

    #[test]
    fn exact_and_float_evaluation_agree(n in 0u32..=10, num in -400i64..400) {
        let x = num as f64 / 64.0;
        let exact = g_poly(n).eval_exact(&BigRational::new(BigInt::from(num), BigInt::from(64)));
        let exact = num_traits::ToPrimitive::to_f64(&exact).unwrap();
        let float = g_poly(n).eval(x);
        prop_assert!((exact - float).abs() <= 1e-13 * exact.abs().max(1e-300));
    }
}
