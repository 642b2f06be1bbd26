//! The self-similar profile and the space-time solution built from it.
//!
//! For `φ(x) = x^{2n+1}` the solution is `u(t,x) = t^{n+1/2} P(x/√t)`, where
//! `P` solves `(P'')⁺ - σ²(P'')⁻ + xP' - (2n+1)P = 0`. The profile is convex
//! right of the free boundary `c` and concave left of it:
//!
//! ```text
//! x ≥ c:  P = g_n(x) + k/(2n)!! · m_n(x)
//! x < c:  P = σ^{2n+1} g_n(x/σ) + d/(2n)!! · m_n(-x/σ)      (σ > 0)
//!         P = x^{2n+1}                                        (σ = 0)
//! ```
//!
//! The left branch is evaluated with `d = D e^{c²/(2σ²)}` folded into the
//! Gaussian factor of `m_n(-x/σ)`, so no intermediate overflows however small
//! `σ` is.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_boundary::{FreeBoundary, MAX_N};
use crate::gaussian::{
    classical_shifted_moment, double_factorial, exp_neg_half_sq, one_sided_moments,
};
use crate::hermite::{g_poly, FloatPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    /// `σ = 1`: the classical heat equation, `P = g_n`.
    Classical,
    /// `σ ∈ (0,1)`
    Uncertain,
    /// `σ = 0`
    Degenerate,
}

/// Piecewise closed-form profile `P_n^σ` with analytic first and second
/// derivatives.
#[derive(Debug, Clone)]
pub struct Profile {
    n: u32,
    sigma: f64,
    regime: Regime,
    fb: Option<FreeBoundary>,
    g: FloatPoly,
    dg: FloatPoly,
    d2g: FloatPoly,
    /// `k / (2n)!!`
    upper_weight: f64,
    /// `D / (2n)!!`
    lower_weight: f64,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if (0.0..=1.0).contains(&sigma) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "sigma must lie in [0, 1], got {sigma}"
        )))
    }
}

impl Profile {
    pub fn new(n: u32, sigma: f64) -> Result<Self> {
        if !(1..=MAX_N).contains(&n) {
            return Err(Error::domain(format!("n must be in 1..={MAX_N}, got {n}")));
        }
        check_sigma(sigma)?;
        let (regime, fb) = if sigma == 1.0 {
            (Regime::Classical, None)
        } else if sigma == 0.0 {
            (Regime::Degenerate, Some(FreeBoundary::solve(n, 0.0)?))
        } else {
            (Regime::Uncertain, Some(FreeBoundary::solve(n, sigma)?))
        };
        Ok(Self::assemble(n, sigma, regime, fb))
    }

    /// Builds the profile around an already solved boundary.
    pub fn from_boundary(fb: FreeBoundary) -> Result<Self> {
        if !(1..=MAX_N).contains(&fb.n) || !(0.0..1.0).contains(&fb.sigma) || fb.c >= 0.0 {
            return Err(Error::domain("free boundary record is not admissible"));
        }
        let regime = if fb.sigma == 0.0 {
            Regime::Degenerate
        } else {
            Regime::Uncertain
        };
        if regime == Regime::Uncertain && fb.d_scaled.is_none() {
            return Err(Error::domain("free boundary with sigma > 0 needs d_scaled"));
        }
        Ok(Self::assemble(fb.n, fb.sigma, regime, Some(fb)))
    }

    fn assemble(n: u32, sigma: f64, regime: Regime, fb: Option<FreeBoundary>) -> Self {
        let g = g_poly(n);
        let dg = g.derivative();
        let d2g = dg.derivative();
        let norm = double_factorial(2 * n as i64);
        let upper_weight = fb.map_or(0.0, |b| b.k / norm);
        let lower_weight = fb.and_then(|b| b.d_scaled).map_or(0.0, |d| d / norm);
        Profile {
            n,
            sigma,
            regime,
            fb,
            g: g.to_float(),
            dg: dg.to_float(),
            d2g: d2g.to_float(),
            upper_weight,
            lower_weight,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn free_boundary(&self) -> Option<&FreeBoundary> {
        self.fb.as_ref()
    }

    /// Free boundary abscissa; `None` for `σ = 1`.
    pub fn boundary(&self) -> Option<f64> {
        self.fb.map(|b| b.c)
    }

    /// `P(0) = Ê[B_1^{2n+1}]`; zero in the classical case.
    pub fn k(&self) -> f64 {
        self.fb.map_or(0.0, |b| b.k)
    }

    /// `P`, `P'` or `P''` for `order` 0, 1, 2.
    pub fn eval(&self, x: f64, order: u8) -> Result<f64> {
        if order > 2 {
            return Err(Error::domain(format!(
                "derivative order must be 0, 1 or 2, got {order}"
            )));
        }
        Ok(self.branch(x)[order as usize])
    }

    pub fn value(&self, x: f64) -> f64 {
        self.branch(x)[0]
    }

    pub fn first(&self, x: f64) -> f64 {
        self.branch(x)[1]
    }

    pub fn second(&self, x: f64) -> f64 {
        self.branch(x)[2]
    }

    /// Left and right limits `[P, P', P'']` at the free boundary.
    pub fn one_sided_at_boundary(&self) -> Option<([f64; 3], [f64; 3])> {
        let c = self.boundary()?;
        Some((self.lower(c), self.upper(c)))
    }

    /// `[P, P', P'']` at `x`. The boundary point itself belongs to the upper
    /// branch.
    pub fn branch(&self, x: f64) -> [f64; 3] {
        match (self.regime, self.fb) {
            (Regime::Classical, _) => [self.g.eval(x), self.dg.eval(x), self.d2g.eval(x)],
            (_, Some(fb)) if x >= fb.c => self.upper(x),
            _ => self.lower(x),
        }
    }

    fn upper(&self, x: f64) -> [f64; 3] {
        let n = self.n as usize;
        let mut j = [0.0; 64];
        let j = &mut j[..2 * n + 2];
        one_sided_moments(x, j);
        let w = self.upper_weight * exp_neg_half_sq(x);
        let a = (2 * n + 1) as f64;
        [
            self.g.eval(x) + w * j[2 * n + 1],
            self.dg.eval(x) - w * a * j[2 * n],
            self.d2g.eval(x) + w * a * (2 * n) as f64 * j[2 * n - 1],
        ]
    }

    fn lower(&self, x: f64) -> [f64; 3] {
        let n = self.n as usize;
        let p = 2 * self.n as i32;
        match self.regime {
            Regime::Degenerate => [
                x.powi(p + 1),
                (p + 1) as f64 * x.powi(p),
                ((p + 1) * p) as f64 * x.powi(p - 1),
            ],
            _ => {
                let s = self.sigma;
                let c = self.fb.map_or(0.0, |b| b.c);
                let y = x / s;
                let mut j = [0.0; 64];
                let j = &mut j[..2 * n + 2];
                one_sided_moments(-y, j);
                // d e^{-y²/2} = D e^{(c² - x²)/(2σ²)}
                let w = self.lower_weight * ((c - x) * (c + x) / (2.0 * s * s)).exp();
                let a = (2 * n + 1) as f64;
                [
                    s.powi(p + 1) * self.g.eval(y) + w * j[2 * n + 1],
                    s.powi(p) * self.dg.eval(y) + w * a / s * j[2 * n],
                    s.powi(p - 1) * self.d2g.eval(y)
                        + w * a * (2 * n) as f64 / (s * s) * j[2 * n - 1],
                ]
            }
        }
    }

    /// `(P'')⁺ - σ²(P'')⁻ + xP' - (2n+1)P`
    pub fn ode_residual(&self, x: f64) -> f64 {
        let [p, dp, d2p] = self.branch(x);
        let gen = if d2p >= 0.0 {
            d2p
        } else {
            self.sigma * self.sigma * d2p
        };
        gen + x * dp - (2 * self.n + 1) as f64 * p
    }

    /// `u(t,x) = t^{n+1/2} P(x/√t)`, and `x^{2n+1}` at `t = 0`.
    pub fn solution(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.solution_derivatives(t, x)?[0])
    }

    /// `[u, u_x, u_xx]` at `(t, x)`.
    pub fn solution_derivatives(&self, t: f64, x: f64) -> Result<[f64; 3]> {
        if !(t >= 0.0 && t.is_finite()) || !x.is_finite() {
            return Err(Error::domain(format!(
                "need finite t >= 0 and x, got t={t}, x={x}"
            )));
        }
        let p = 2 * self.n as i32;
        if t == 0.0 {
            return Ok([
                x.powi(p + 1),
                (p + 1) as f64 * x.powi(p),
                ((p + 1) * p) as f64 * x.powi(p - 1),
            ]);
        }
        let rt = t.sqrt();
        let [v, d1, d2] = self.branch(x / rt);
        let tn = t.powi(self.n as i32);
        Ok([tn * rt * v, tn * d1, tn / rt * d2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionQuery {
    pub n: u32,
    pub sigma: f64,
    pub t: f64,
    pub x: f64,
}

/// Solution of the G-heat equation with initial value `x^{2n+1}`.
pub fn eval_solution(q: &SolutionQuery) -> Result<f64> {
    Profile::new(q.n, q.sigma)?.solution(q.t, q.x)
}

/// `u(t, -x)`: the solution with initial value `-x^{2n+1}`.
pub fn reflected_solution(q: &SolutionQuery) -> Result<f64> {
    Profile::new(q.n, q.sigma)?.solution(q.t, -q.x)
}

/// `Ê[B_t^{2n+1}] = k t^{n+1/2}`.
pub fn odd_moment(n: u32, sigma: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    let p = Profile::new(n, sigma)?;
    Ok(p.k() * t.powi(n as i32) * t.sqrt())
}

/// `Ê[(x + B_t)^m]` for any positive integer power.
#[derive(Debug, Clone)]
pub enum MonomialSolution {
    /// `m = 1`
    Linear,
    /// Even `m`: convex data, the top volatility is optimal.
    Convex(u32),
    /// Odd `m ≥ 3`.
    Odd(Profile),
}

impl MonomialSolution {
    pub fn new(m: u32, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        match m {
            0 => Err(Error::domain("power must be positive")),
            1 => Ok(MonomialSolution::Linear),
            m if m % 2 == 0 => Ok(MonomialSolution::Convex(m)),
            m => Ok(MonomialSolution::Odd(Profile::new((m - 1) / 2, sigma)?)),
        }
    }

    pub fn value(&self, t: f64, x: f64) -> Result<f64> {
        if !(t >= 0.0 && t.is_finite()) || !x.is_finite() {
            return Err(Error::domain(format!(
                "need finite t >= 0 and x, got t={t}, x={x}"
            )));
        }
        Ok(match self {
            MonomialSolution::Linear => x,
            MonomialSolution::Convex(m) => classical_shifted_moment(*m, x, t.sqrt()),
            MonomialSolution::Odd(p) => p.solution(t, x)?,
        })
    }
}

pub fn g_expectation_monomial(m: u32, sigma: f64, t: f64, x: f64) -> Result<f64> {
    MonomialSolution::new(m, sigma)?.value(t, x)
}

/// `max_ν E[(x + ν B_t)^m]` over `grid_size` equally spaced constant
/// volatilities in `[σ, 1]`.
pub fn constant_control_lower_bound(
    m: u32,
    sigma: f64,
    t: f64,
    x: f64,
    grid_size: usize,
) -> Result<f64> {
    check_sigma(sigma)?;
    if grid_size < 2 {
        return Err(Error::domain("grid_size must be at least 2"));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::domain(format!("t must be nonnegative, got {t}")));
    }
    let rt = t.sqrt();
    Ok((0..grid_size)
        .map(|i| {
            let nu = sigma + (1.0 - sigma) * i as f64 / (grid_size - 1) as f64;
            classical_shifted_moment(m, x, nu * rt)
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `sup E[(log S_T)^m]` over volatility processes in `[σ, 1]` when
/// `d log S = μ dt + σ_t dB`, `S_0 = 1`.
pub fn finance_log_moment(m: u32, sigma: f64, mu: f64, horizon: f64) -> Result<f64> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    g_expectation_monomial(m, sigma, horizon, mu * horizon)
}
