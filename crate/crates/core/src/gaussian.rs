//! Gaussian tail integrals and the one-sided moments built on them.
//!
//! Everything here is expressed through the unnormalized kernel `e^{-t²/2}`:
//!
//! * `gaussian_tail(x) = ∫_x^∞ e^{-t²/2} dt`, total mass `√(2π)`;
//! * `scaled_tail(x) = e^{x²/2} · gaussian_tail(x)` (the Mills ratio);
//! * `one_sided_moments(x, ·)` fills `J_k(x) = ∫_0^∞ u^k e^{-xu-u²/2} du`, so that
//!   `∫_x^∞ (s-x)^k e^{-s²/2} ds = e^{-x²/2} J_k(x)`.
//!
//! The Mills ratio is the primary quantity. For `x ≥ CF_SWITCH` it comes from
//! the continued fraction `R = 1/(x + 1/(x + 2/(x + 3/(x + ...))))`, whose
//! partial tails are exactly the ratios `J_k / J_{k-1}`. Below the switch a
//! power series is used and the left half-line follows by reflection.

use crate::error::{Error, Result};

pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
pub const SQRT_PI_2: f64 = 1.253_314_137_315_500_3;

/// Below this abscissa the Mills ratio comes from the power series and the
/// moment recurrence runs forward; above it both come from the continued
/// fraction.
const CF_SWITCH: f64 = 0.5;

const LENTZ_TINY: f64 = 1e-300;
const LENTZ_MAX_ITER: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TailValue {
    pub x: f64,
    /// `∫_x^∞ e^{-t²/2} dt`
    pub tail: f64,
    /// `e^{x²/2} · tail`
    pub scaled: f64,
}

impl TailValue {
    pub fn at(x: f64) -> Result<Self> {
        Ok(TailValue {
            x,
            tail: gaussian_tail(x)?,
            scaled: scaled_tail(x)?,
        })
    }
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("abscissa must be finite, got {x}")))
    }
}

/// `∫_x^∞ e^{-t²/2} dt`. Underflows to zero for `x ≳ 38.6`.
pub fn gaussian_tail(x: f64) -> Result<f64> {
    check_finite(x)?;
    Ok(tail(x))
}

/// `e^{x²/2} ∫_x^∞ e^{-t²/2} dt`, strictly positive and decreasing.
///
/// Finite for `x ≥ -37.6`; below that the result overflows and a range error
/// is returned.
pub fn scaled_tail(x: f64) -> Result<f64> {
    check_finite(x)?;
    let r = mills_ratio(x);
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Range(format!("scaled tail overflows at x = {x}")))
    }
}

pub(crate) fn tail(x: f64) -> f64 {
    if x < 0.0 {
        SQRT_2PI - tail(-x)
    } else if x < CF_SWITCH {
        SQRT_PI_2 - exp_neg_half_sq(x) * odd_series(x)
    } else {
        exp_neg_half_sq(x) * mills_cf(x)
    }
}

/// Mills ratio without argument checks.
pub(crate) fn mills_ratio(x: f64) -> f64 {
    if x.abs() < CF_SWITCH {
        SQRT_PI_2 * exp_half_sq(x) - odd_series(x)
    } else if x > 0.0 {
        mills_cf(x)
    } else {
        SQRT_2PI * exp_half_sq(x) - mills_cf(-x)
    }
}

/// `e^{-x²/2} Σ_k x^{2k+1}/(2k+1)!! = ∫_0^x e^{-t²/2} dt`, returned without the
/// exponential factor. Used only for `|x| < CF_SWITCH`.
fn odd_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        term *= x2 / (2.0 * k + 3.0);
        sum += term;
        k += 1.0;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            return sum;
        }
    }
}

fn mills_cf(x: f64) -> f64 {
    1.0 / (x + cf_tail(1, x))
}

/// Tail of the Mills continued fraction starting at partial numerator `first`:
/// `first/(x + (first+1)/(x + (first+2)/(x + ...)))`, by modified Lentz.
/// Equals `J_first(x) / J_{first-1}(x)`.
fn cf_tail(first: usize, x: f64) -> f64 {
    let mut f = LENTZ_TINY;
    let mut c = f;
    let mut d = 0.0;
    for i in 0..LENTZ_MAX_ITER {
        let a = (first + i) as f64;
        d = x + a * d;
        if d == 0.0 {
            d = LENTZ_TINY;
        }
        c = x + a / c;
        if c == 0.0 {
            c = LENTZ_TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 0.5 * f64::EPSILON {
            break;
        }
    }
    f
}

/// Fills `out[k] = J_k(x) = ∫_0^∞ u^k e^{-xu-u²/2} du` for `k < out.len()`.
///
/// For `x ≥ CF_SWITCH` the ratios `J_k/J_{k-1}` are taken from the continued
/// fraction and accumulated upward, which involves no subtraction. Below the
/// switch the three-term recurrence `J_{k+1} = k J_{k-1} - x J_k` runs forward;
/// it is dominant-stable for `x < 0` and loses at most a couple of digits on
/// `[0, CF_SWITCH)` for the orders used here.
pub fn one_sided_moments(x: f64, out: &mut [f64]) {
    let Some(last) = out.len().checked_sub(1) else {
        return;
    };
    if x >= CF_SWITCH {
        // r_{last+1} from the continued fraction, then r_j = j/(x + r_{j+1}).
        let mut r_next = cf_tail(last + 1, x);
        for j in (1..=last).rev() {
            let r = j as f64 / (x + r_next);
            out[j] = r;
            r_next = r;
        }
        out[0] = 1.0 / (x + r_next);
        for j in 1..=last {
            out[j] *= out[j - 1];
        }
    } else {
        out[0] = mills_ratio(x);
        if last >= 1 {
            out[1] = 1.0 - x * out[0];
        }
        for k in 1..last {
            out[k + 1] = k as f64 * out[k - 1] - x * out[k];
        }
    }
}

/// Single `J_k(x)`; see [`one_sided_moments`].
pub fn one_sided_moment(k: usize, x: f64) -> f64 {
    let mut buf = [0.0; 64];
    if k < buf.len() {
        one_sided_moments(x, &mut buf[..=k]);
        buf[k]
    } else {
        let mut v = vec![0.0; k + 1];
        one_sided_moments(x, &mut v);
        v[k]
    }
}

/// `e^{x²/2}` with the rounding error of `x²` folded back in.
pub(crate) fn exp_half_sq(x: f64) -> f64 {
    let p = x * x;
    let e = x.mul_add(x, -p);
    (0.5 * p).exp() * (1.0 + 0.5 * e)
}

/// `e^{-x²/2}` with the rounding error of `x²` folded back in.
pub(crate) fn exp_neg_half_sq(x: f64) -> f64 {
    let p = x * x;
    let e = x.mul_add(x, -p);
    (-0.5 * p).exp() * (1.0 - 0.5 * e)
}

/// `m!!` with `0!! = (-1)!! = 1`.
pub fn double_factorial(m: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = m;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// `E|Z|^m` for a standard normal `Z`.
pub fn abs_moment(m: u32) -> f64 {
    let df = double_factorial(m as i64 - 1);
    if m.is_multiple_of(2) {
        df
    } else {
        (2.0 / std::f64::consts::PI).sqrt() * df
    }
}

/// `E[(x + sZ)^m]` for a standard normal `Z`, by binomial expansion.
pub fn classical_shifted_moment(m: u32, x: f64, s: f64) -> f64 {
    let m = m as i64;
    let mut binom = 1.0;
    let mut acc = 0.0;
    for j in 0..=m {
        if j > 0 {
            binom = binom * (m - j + 1) as f64 / j as f64;
        }
        if j % 2 == 0 {
            acc += binom * x.powi((m - j) as i32) * s.powi(j as i32) * double_factorial(j - 1);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn tail_at_zero_is_half_mass() {
        assert!(rel(gaussian_tail(0.0).unwrap(), 1.253_314_137_315_500_3) < 1e-15);
        assert!(rel(scaled_tail(0.0).unwrap(), SQRT_PI_2) < 1e-15);
    }

    #[test]
    fn tail_far_left_is_total_mass() {
        assert!((gaussian_tail(-40.0).unwrap() - SQRT_2PI).abs() <= 1e-15);
    }

    #[test]
    fn non_finite_is_rejected() {
        assert!(matches!(gaussian_tail(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(scaled_tail(f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(scaled_tail(-40.0), Err(Error::Range(_))));
    }

    #[test]
    fn tail_underflows_to_zero() {
        assert_eq!(gaussian_tail(60.0).unwrap(), 0.0);
    }

    #[test]
    fn abs_moments() {
        assert_eq!(abs_moment(0), 1.0);
        assert_eq!(abs_moment(2), 1.0);
        assert_eq!(abs_moment(4), 3.0);
        assert!(rel(abs_moment(1), (2.0 / std::f64::consts::PI).sqrt()) < 1e-15);
    }

    #[test]
    fn shifted_moments() {
        for &x in &[-3.0, -0.5, 0.0, 1.25, 7.0] {
            let x: f64 = x;
            assert!((classical_shifted_moment(3, x, 1.0) - (x.powi(3) + 3.0 * x)).abs() < 1e-12);
            assert!((classical_shifted_moment(2, x, 0.7) - (x * x + 0.49)).abs() < 1e-14);
            assert_eq!(classical_shifted_moment(5, x, 0.0), x.powi(5));
        }
    }

    #[test]
    fn moment_recurrence_matches_mills_ratio() {
        let mut buf = [0.0; 8];
        for &x in &[-3.0, -0.2, 0.0, 0.3, 0.5, 2.0, 12.0] {
            one_sided_moments(x, &mut buf);
            assert!(rel(buf[0], mills_ratio(x)) < 1e-14, "x={x}");
            // J_1 = 1 - x J_0 by integration by parts.
            assert!((buf[1] - (1.0 - x * buf[0])).abs() < 1e-14 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn moments_at_zero() {
        let mut buf = [0.0; 7];
        one_sided_moments(0.0, &mut buf);
        assert!(rel(buf[0], SQRT_PI_2) < 1e-15);
        assert_eq!(buf[1], 1.0);
        assert_eq!(buf[3], 2.0);
        assert_eq!(buf[5], 8.0);
        assert!(rel(buf[6], 15.0 * SQRT_PI_2) < 1e-14);
    }
}
