//! Free-boundary constants `(c, k, d)` of the self-similar profile.
//!
//! For `σ ∈ (0,1)` the boundary `c` is the unique negative zero of
//!
//! ```text
//! f_n(x) = J_{2n-1}(-x/σ) - σ^{2n} J_{2n-1}(x)
//! ```
//!
//! where `J_k` is the scaled one-sided Gaussian moment (see
//! [`crate::gaussian::one_sided_moments`]). This is the matching condition
//! `h_{n-1}(x/σ) + g_{n-1}(x/σ) e^{x²/2σ²} ∫_{-∞}^{x/σ} e^{-t²/2}dt
//!  = σ^{2n}[h_{n-1}(x) - g_{n-1}(x) e^{x²/2} ∫_x^∞ e^{-t²/2}dt]` with both
//! brackets rewritten so that no exponential is ever formed on its own.
//! `f_n(0) = (1-σ^{2n})(2n-2)!! > 0` and `f_n` increases on `x < 0`, so a
//! leftward doubling search always finds a bracket.
//!
//! For `σ = 0` the boundary solves `c^{2n} J_{2n-1}(c) = (2n-1)!`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{
    self, classical_shifted_moment, double_factorial, exp_half_sq, one_sided_moment,
};
use crate::hermite::h_poly;

/// Leftmost abscissa the matching functions are evaluated at.
pub const LEFT_LIMIT: f64 = -30.0;

pub const DEFAULT_TOL: f64 = 1e-12;

const X_TOL: f64 = 1e-15;
const MAX_ITER: usize = 200;

/// Largest supported order; `(2n+1)!` and the polynomial coefficients stay
/// well inside double range.
pub const MAX_N: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeBoundary {
    pub n: u32,
    pub sigma: f64,
    /// Boundary between the convex (right) and concave (left) regions.
    pub c: f64,
    /// Odd-moment constant, `Ê[B_1^{2n+1}]`.
    pub k: f64,
    /// `d · e^{-c²/(2σ²)}`; absent for `σ = 0`, where the left branch is the
    /// initial monomial itself.
    pub d_scaled: Option<f64>,
    /// Relative matching residual at `c`: `f_n(c)` divided by the sum of its
    /// two terms for `σ > 0`, and `c^{2n}J_{2n-1}(c)/(2n-1)! - 1` for `σ = 0`.
    pub residual: f64,
    pub iterations: usize,
}

impl FreeBoundary {
    /// Solves with the default tolerance, dispatching on `σ = 0`.
    pub fn solve(n: u32, sigma: f64) -> Result<Self> {
        if sigma == 0.0 {
            solve_free_boundary_degenerate(n, DEFAULT_TOL)
        } else {
            solve_free_boundary(n, sigma, DEFAULT_TOL)
        }
    }

    /// `d` itself. Overflows for small `σ`; provided for inspection only.
    pub fn d_unscaled(&self) -> Option<f64> {
        let s = self.sigma;
        self.d_scaled
            .map(|d| d * (0.5 * (self.c / s) * (self.c / s)).exp())
    }
}

fn check_n(n: u32) -> Result<()> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::domain(format!("n must be in 1..={MAX_N}, got {n}")))
    }
}

fn check_open_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "sigma must lie in (0, 1), got {sigma}"
        )))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// `g_{n-1}` at `x`.
fn g_prev(n: u32, x: f64) -> f64 {
    classical_shifted_moment(2 * n - 1, x, 1.0)
}

fn matching_terms(n: u32, sigma: f64, x: f64) -> (f64, f64) {
    let k = 2 * n as usize - 1;
    (
        one_sided_moment(k, -x / sigma),
        sigma.powi(2 * n as i32) * one_sided_moment(k, x),
    )
}

fn matching(n: u32, sigma: f64, x: f64) -> f64 {
    let (a, b) = matching_terms(n, sigma, x);
    a - b
}

/// `f_n` divided by the sum of its two (positive) terms; same root, residual
/// measured relative to the size of what is being matched.
fn relative_matching(n: u32, sigma: f64, x: f64) -> f64 {
    let (a, b) = matching_terms(n, sigma, x);
    (a - b) / (a + b)
}

fn degenerate_matching(n: u32, x: f64) -> f64 {
    x.powi(2 * n as i32) * one_sided_moment(2 * n as usize - 1, x) / factorial(2 * n - 1) - 1.0
}

fn factorial(k: u32) -> f64 {
    (2..=k).map(f64::from).product()
}

/// The matching function whose negative zero is the free boundary.
pub fn f_fn(n: u32, sigma: f64, x: f64) -> Result<f64> {
    check_n(n)?;
    check_open_sigma(sigma)?;
    if !x.is_finite() {
        return Err(Error::domain(format!("x must be finite, got {x}")));
    }
    if x < LEFT_LIMIT {
        return Err(Error::Range(format!("x = {x} is left of {LEFT_LIMIT}")));
    }
    Ok(matching(n, sigma, x))
}

/// `l_n(x) = ∫_x^∞ e^{-t²/2} dt - h_{n-1}(x)/g_{n-1}(x) · e^{-x²/2}` for `x < 0`.
///
/// Increasing on `x < 0` with `l_n' = (2n-1)!/g_{n-1}² · e^{-x²/2}`, and
/// `k = (2n)!!/l_n(c)`.
pub fn l_fn(n: u32, x: f64) -> Result<f64> {
    check_n(n)?;
    if !(x < 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("l_n needs finite x < 0, got {x}")));
    }
    let h = h_poly(n - 1).to_float();
    Ok(gaussian::tail(x) - h.eval(x) / g_prev(n, x) * gaussian::exp_neg_half_sq(x))
}

struct Root {
    x: f64,
    fx: f64,
    iterations: usize,
}

/// Brent's method on a bracket `[a, b]` with `f(a)·f(b) ≤ 0`.
fn brent(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> Result<Root> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            fx: fa,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            fx: fb,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo: a.min(b),
            hi: a.max(b),
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * X_TOL;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(Root {
                x: b,
                fx: fb,
                iterations: iter,
            });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::Convergence {
        iterations: MAX_ITER,
        residual: fb,
    })
}

/// Doubles `start` leftward until `f` turns negative, capped at
/// [`LEFT_LIMIT`]. Returns `(left, right)` with `f(left) < 0 ≤ f(right)`.
fn bracket_left(f: &impl Fn(f64) -> f64, start: f64) -> Result<(f64, f64)> {
    let mut right = 0.0;
    let mut left = start;
    loop {
        if f(left) < 0.0 {
            return Ok((left, right));
        }
        if left <= LEFT_LIMIT {
            return Err(Error::Bracket {
                lo: LEFT_LIMIT,
                hi: 0.0,
            });
        }
        right = left;
        left = (2.0 * left).max(LEFT_LIMIT);
    }
}

/// Free boundary for `σ ∈ (0,1)`.
pub fn solve_free_boundary(n: u32, sigma: f64, tol: f64) -> Result<FreeBoundary> {
    check_n(n)?;
    check_open_sigma(sigma)?;
    check_tol(tol)?;
    let f = |x: f64| relative_matching(n, sigma, x);
    let (lo, hi) = bracket_left(&f, -1.0)?;
    let root = brent(f, lo, hi)?;
    if root.fx.abs() > tol {
        return Err(Error::Convergence {
            iterations: root.iterations,
            residual: root.fx,
        });
    }
    let c = root.x;
    // k = -(2n)!! g_{n-1}(c) / m_{n-1}(c), with m_{n-1}(c) = e^{-c²/2} J_{2n-1}(c).
    let g_c = g_prev(n, c);
    let k = -double_factorial(2 * n as i64) * g_c * exp_half_sq(c)
        / one_sided_moment(2 * n as usize - 1, c);
    let d_scaled = sigma * g_prev(n, c / sigma) / g_c * k * gaussian::exp_neg_half_sq(c);
    Ok(FreeBoundary {
        n,
        sigma,
        c,
        k,
        d_scaled: Some(d_scaled),
        residual: root.fx,
        iterations: root.iterations,
    })
}

/// Free boundary for `σ = 0`.
pub fn solve_free_boundary_degenerate(n: u32, tol: f64) -> Result<FreeBoundary> {
    check_n(n)?;
    check_tol(tol)?;
    let f = |x: f64| degenerate_matching(n, x);
    let (lo, hi) = bracket_left(&f_neg(&f), -0.5)?;
    let root = brent(f, lo, hi)?;
    if root.fx.abs() > tol {
        return Err(Error::Convergence {
            iterations: root.iterations,
            residual: root.fx,
        });
    }
    let c = root.x;
    let two_n = 2 * n as i32;
    let k = -(f64::from(2 * n) / double_factorial(2 * n as i64 - 1))
        * g_prev(n, c)
        * c.powi(two_n)
        * exp_half_sq(c);
    Ok(FreeBoundary {
        n,
        sigma: 0.0,
        c,
        k,
        d_scaled: None,
        residual: root.fx,
        iterations: root.iterations,
    })
}

// The degenerate matching function is negative near 0 and positive far
// left; flipping the sign lets it share the bracket search.
fn f_neg(f: &impl Fn(f64) -> f64) -> impl Fn(f64) -> f64 + '_ {
    move |x| -f(x)
}

/// Number of sign changes of the matching function on `points` equally
/// spaced abscissae spanning `[LEFT_LIMIT, 0]`. Exactly one is expected; the
/// right end is included because the root moves to `0⁻` as `σ → 1`.
pub fn sign_changes(n: u32, sigma: f64, points: usize) -> Result<usize> {
    check_n(n)?;
    if !(0.0..1.0).contains(&sigma) {
        return Err(Error::domain(format!(
            "sigma must lie in [0, 1), got {sigma}"
        )));
    }
    if points < 2 {
        return Err(Error::domain("need at least two probe points"));
    }
    let f = |x: f64| {
        if sigma == 0.0 {
            degenerate_matching(n, x)
        } else {
            matching(n, sigma, x)
        }
    };
    let step = -LEFT_LIMIT / (points - 1) as f64;
    let mut count = 0;
    let mut prev = f(LEFT_LIMIT);
    for i in 1..points {
        let x = if i + 1 == points {
            0.0
        } else {
            LEFT_LIMIT + i as f64 * step
        };
        let v = f(x);
        if v != 0.0 && prev != 0.0 && v.signum() != prev.signum() {
            count += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    Ok(count)
}

/// Solves for each `σ` of a strictly ascending list in `[0, 1)`.
pub fn boundary_scan(n: u32, sigmas: &[f64]) -> Result<Vec<FreeBoundary>> {
    if sigmas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("sigma scan must be strictly ascending"));
    }
    sigmas.iter().map(|&s| FreeBoundary::solve(n, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_at_zero() {
        for n in 1..=5 {
            for &s in &[0.1, 0.5, 0.9] {
                let expect =
                    (1.0 - f64::powi(s, 2 * n as i32)) * double_factorial(2 * (n as i64 - 1));
                let got = f_fn(n, s, 0.0).unwrap();
                assert!((got - expect).abs() < 1e-13 * expect, "n={n} s={s}");
            }
        }
    }

    #[test]
    fn matching_domain() {
        assert!(matches!(f_fn(1, 0.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(f_fn(1, 1.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(f_fn(1, 0.5, -31.0), Err(Error::Range(_))));
        assert!(matches!(f_fn(0, 0.5, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn matching_negative_far_left() {
        assert!(f_fn(1, 0.5, -10.0).unwrap() < 0.0);
    }

    #[test]
    fn l_domain() {
        assert!(l_fn(1, 0.0).is_err());
        assert!(l_fn(1, 1.0).is_err());
    }

    #[test]
    fn scan_must_ascend() {
        assert!(boundary_scan(1, &[0.5, 0.1]).is_err());
        assert!(boundary_scan(1, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn solver_rejects_bad_tolerance() {
        assert!(solve_free_boundary(1, 0.5, 0.0).is_err());
        assert!(solve_free_boundary_degenerate(1, -1.0).is_err());
    }

    #[test]
    fn brent_finds_simple_root() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r.x - std::f64::consts::SQRT_2).abs() < 1e-13);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn first_order_reference() {
        // 40-digit mpmath solve of the three matching conditions.
        let fb = solve_free_boundary(1, 0.5, DEFAULT_TOL).unwrap();
        assert!((fb.c - -0.390_823_370_202_336_2).abs() < 1e-12);
        assert!((fb.k - 0.499_378_696_643_731_2).abs() < 1e-12);
        let fb = solve_free_boundary(2, 0.05, DEFAULT_TOL).unwrap();
        assert!((fb.c - -0.840_695_102_330_906_2).abs() < 1e-12);
        assert!((fb.k - 3.059_656_229_958_380_7).abs() < 1e-11);
    }
}
