//! The polynomial pair `g_n`, `h_n` and the decaying solution `m_n`.
//!
//! `g_n(x) = E[(x+Z)^{2n+1}]` is the growing fundamental solution of
//! `y'' + x y' - (2n+1) y = 0` and
//! `m_n(x) = h_n(x) e^{-x²/2} - g_n(x) ∫_x^∞ e^{-t²/2} dt = √(2π) E[((x+Z)⁻)^{2n+1}]`
//! the decaying one. Coefficients are built exactly; identities between them
//! are checked in rational arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{self, exp_neg_half_sq, one_sided_moment, SQRT_2PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn of_degree(d: usize) -> Self {
        if d.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    fn times(self, other: Parity) -> Self {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Polynomial with exact rational coefficients and a fixed parity.
///
/// `coeffs[i]` is the coefficient of `x^i`; entries of the wrong parity are
/// always zero and trailing zeros are trimmed. The zero polynomial carries
/// whatever parity it was built with and is compatible with both under
/// addition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
    parity: Parity,
}

impl RationalPoly {
    pub fn new(coeffs: Vec<BigRational>, parity: Parity) -> Result<Self> {
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() && Parity::of_degree(i) != parity {
                return Err(Error::domain(format!(
                    "coefficient of x^{i} is nonzero in a {parity:?} polynomial"
                )));
            }
        }
        let mut p = RationalPoly { coeffs, parity };
        p.trim();
        Ok(p)
    }

    pub fn zero(parity: Parity) -> Self {
        RationalPoly {
            coeffs: Vec::new(),
            parity,
        }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        let c = BigRational::from_integer(c.into());
        let coeffs = if c.is_zero() { Vec::new() } else { vec![c] };
        RationalPoly {
            coeffs,
            parity: Parity::Even,
        }
    }

    /// `c · x^degree`
    pub fn monomial(c: impl Into<BigInt>, degree: usize) -> Self {
        let c = BigRational::from_integer(c.into());
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[degree] = c;
        let mut p = RationalPoly {
            coeffs,
            parity: Parity::of_degree(degree),
        };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect();
        let mut p = RationalPoly {
            coeffs,
            parity: self.parity.flip(),
        };
        p.trim();
        p
    }

    /// `x · p(x)`
    pub fn mul_x(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        if !self.is_zero() {
            coeffs.push(BigRational::zero());
            coeffs.extend(self.coeffs.iter().cloned());
        }
        RationalPoly {
            coeffs,
            parity: self.parity.flip(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let mut p = RationalPoly {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            parity: self.parity,
        };
        p.trim();
        p
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_float(&self) -> FloatPoly {
        let start = match self.parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        let half = self
            .coeffs
            .iter()
            .skip(start)
            .step_by(2)
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect();
        FloatPoly {
            half,
            odd: self.parity == Parity::Odd,
        }
    }

    /// Float evaluation (converts coefficients on every call; use
    /// [`FloatPoly`] for repeated evaluation).
    pub fn eval(&self, x: f64) -> f64 {
        self.to_float().eval(x)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let parity = match (self.is_zero(), other.is_zero()) {
            (true, _) => other.parity,
            (false, true) => self.parity,
            (false, false) => {
                assert_eq!(
                    self.parity, other.parity,
                    "adding polynomials of different parity"
                );
                self.parity
            }
        };
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let b = other.coeff(i);
                if negate {
                    self.coeff(i) - b
                } else {
                    self.coeff(i) + b
                }
            })
            .collect();
        let mut p = RationalPoly { coeffs, parity };
        p.trim();
        p
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        self.combine(rhs, false)
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        self.combine(rhs, true)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        let parity = self.parity.times(rhs.parity);
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero(parity);
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        let mut p = RationalPoly { coeffs, parity };
        p.trim();
        p
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Float copy of a parity polynomial, stored as coefficients in `x²`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPoly {
    half: Vec<f64>,
    odd: bool,
}

impl FloatPoly {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let x2 = x * x;
        let h = self
            .half
            .iter()
            .rev()
            .fold(0.0_f64, |acc, &c| acc.mul_add(x2, c));
        if self.odd {
            x * h
        } else {
            h
        }
    }
}

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

fn double_factorial(k: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut i = k;
    while i > 1 {
        acc *= i;
        i -= 2;
    }
    acc
}

fn binomial(n: u64, k: u64) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `g_n(x) = Σ_i (2n+1)! / ((2(n-i))!! (2i+1)!) x^{2i+1}`, odd, degree `2n+1`.
pub fn g_poly(n: u32) -> RationalPoly {
    let n = n as u64;
    let top = factorial(2 * n + 1);
    let mut coeffs = vec![BigRational::zero(); (2 * n + 2) as usize];
    for i in 0..=n {
        let den = double_factorial(2 * (n - i) as i64) * factorial(2 * i + 1);
        coeffs[(2 * i + 1) as usize] = BigRational::new(top.clone(), den);
    }
    RationalPoly {
        coeffs,
        parity: Parity::Odd,
    }
}

/// `h_n(x) = Σ_i (n+i)!(n-i)! / ((2(n-i))!! (2i)!) · (C(2n+1,0)+⋯+C(2n+1,n-i)) x^{2i}`,
/// even, degree `2n`.
pub fn h_poly(n: u32) -> RationalPoly {
    let n = n as u64;
    let mut coeffs = vec![BigRational::zero(); (2 * n + 1) as usize];
    for i in 0..=n {
        let partial: BigInt = (0..=n - i).map(|j| binomial(2 * n + 1, j)).sum();
        let num = factorial(n + i) * factorial(n - i) * partial;
        let den = double_factorial(2 * (n - i) as i64) * factorial(2 * i);
        coeffs[(2 * i) as usize] = BigRational::new(num, den);
    }
    RationalPoly {
        coeffs,
        parity: Parity::Even,
    }
}

/// Exact polynomials `(p_k, q_k)` with `J_k(x) = p_k(x) + q_k(x)·R(x)`, where
/// `R` is the Mills ratio and `J_k` the scaled one-sided moment of
/// [`gaussian::one_sided_moments`]. Built from `J_{k+1} = k J_{k-1} - x J_k`.
pub fn moment_polys(k: u32) -> (RationalPoly, RationalPoly) {
    let mut p = (RationalPoly::zero(Parity::Odd), RationalPoly::constant(1));
    let mut q = (RationalPoly::constant(1), -&RationalPoly::monomial(1, 1));
    if k == 0 {
        return (p.0, q.0);
    }
    for j in 1..k {
        let jj = BigRational::from_integer(BigInt::from(j));
        let p_next = &p.0.scale(&jj) - &p.1.mul_x();
        let q_next = &q.0.scale(&jj) - &q.1.mul_x();
        p = (p.1, p_next);
        q = (q.1, q_next);
    }
    (p.1, q.1)
}

/// `m_n(x) = ∫_x^∞ (s-x)^{2n+1} e^{-s²/2} ds = h_n(x)e^{-x²/2} - g_n(x)∫_x^∞ e^{-t²/2}dt`.
///
/// Evaluated as `e^{-x²/2} J_{2n+1}(x)`, which has no cancellation for
/// positive `x`. Far left, where `e^{x²/2}` would overflow, the Gaussian
/// term is below the last bit and `m_n = -√(2π) g_n(x)`.
pub fn m_fn(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("abscissa must be finite, got {x}")));
    }
    Ok(m_value(n, x))
}

pub(crate) fn m_value(n: u32, x: f64) -> f64 {
    if x < -37.0 {
        -SQRT_2PI * gaussian::classical_shifted_moment(2 * n + 1, x, 1.0)
    } else {
        exp_neg_half_sq(x) * one_sided_moment(2 * n as usize + 1, x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairIdentityReport {
    pub n: u32,
    /// `h_{n-1} g_n - g_{n-1} h_n = (2n-1)! x`
    pub cross_product: bool,
    /// `h_{n-1} g'_{n-1} + x h_{n-1} g_{n-1} - h'_{n-1} g_{n-1} - g_{n-1}² = (2n-1)!`
    pub wronskian: bool,
}

impl PairIdentityReport {
    pub fn holds(&self) -> bool {
        self.cross_product && self.wronskian
    }

    /// Turns a failed check into an error.
    pub fn ensure(self) -> Result<Self> {
        if self.holds() {
            Ok(self)
        } else {
            Err(Error::IdentityViolation(format!("{self:?}")))
        }
    }
}

pub fn pair_identities(n: u32) -> Result<PairIdentityReport> {
    if n == 0 {
        return Err(Error::domain("pair identities need n >= 1"));
    }
    let g0 = g_poly(n - 1);
    let h0 = h_poly(n - 1);
    let g1 = g_poly(n);
    let h1 = h_poly(n);
    let fact = factorial(2 * n as u64 - 1);

    let cross = &(&h0 * &g1) - &(&g0 * &h1);
    let cross_product = cross == RationalPoly::monomial(fact.clone(), 1);

    let dg0 = g0.derivative();
    let dh0 = h0.derivative();
    let w = &(&(&(&h0 * &dg0) + &(&h0 * &g0).mul_x()) - &(&dh0 * &g0)) - &(&g0 * &g0);
    let wronskian = w == RationalPoly::constant(fact);

    Ok(PairIdentityReport {
        n,
        cross_product,
        wronskian,
    })
}

/// Two-sided bounds on the Gaussian tail at `x > 0` from the pair at order `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: u32,
    pub x: f64,
    /// `(h'_{n-1} + g_{n-1}) / (g'_{n-1} + x g_{n-1}) · e^{-x²/2}`
    pub lower: f64,
    pub tail: f64,
    /// `h_n / g_n · e^{-x²/2}`
    pub upper: f64,
    /// `tail - lower`, computed as `e^{-x²/2} J_{2n}(x) / (g'_{n-1} + x g_{n-1})`
    /// so that its sign is exact.
    pub lower_gap: f64,
    /// `upper - tail`, computed as `m_n(x) / g_n(x)`.
    pub upper_gap: f64,
    /// `min_{1≤k≤n} √(2π)(2k)!(n-k)! / (x^{2k} 2^{3k} n!)`
    pub lower_gap_bound: f64,
    /// `min_{1≤k≤n-1} √(2π)(2k+1)!(2(n-k)-1)! n! / (2^k x^{2(k+1)} (2n)! (n-k-1)!)`;
    /// infinite when the range of `k` is empty (`n = 1`).
    pub upper_gap_bound: f64,
}

impl BoundReport {
    /// All ordering relations, the direct bounds compared with a relative
    /// slack for rounding in the tail itself.
    pub fn holds(&self, slack: f64) -> bool {
        let tol = slack * self.tail;
        self.lower <= self.tail + tol
            && self.tail <= self.upper + tol
            && self.lower_gap >= 0.0
            && self.upper_gap >= 0.0
            && self.lower_gap <= self.lower_gap_bound
            && self.upper_gap <= self.upper_gap_bound
    }
}

fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

pub fn mills_bounds(n: u32, x: f64) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::domain("bounds need n >= 1"));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("bounds need finite x > 0, got {x}")));
    }
    let g_prev = g_poly(n - 1);
    let h_prev = h_poly(n - 1);
    let g = g_poly(n).to_float();
    let h = h_poly(n).to_float();
    let dg_prev = g_prev.derivative().to_float();
    let dh_prev = h_prev.derivative().to_float();
    let g_prev = g_prev.to_float();

    let e = exp_neg_half_sq(x);
    let even = dg_prev.eval(x) + x * g_prev.eval(x);
    let lower = (dh_prev.eval(x) + g_prev.eval(x)) / even * e;
    let upper = h.eval(x) / g.eval(x) * e;
    let tail = gaussian::tail(x);
    let lower_gap = e * one_sided_moment(2 * n as usize, x) / even;
    let upper_gap = m_value(n, x) / g.eval(x);

    let nn = n as u64;
    let ln_x = x.ln();
    let ln_sqrt_2pi = SQRT_2PI.ln();
    let lower_gap_bound = (1..=nn)
        .map(|k| {
            ln_sqrt_2pi + ln_factorial(2 * k) + ln_factorial(nn - k)
                - 2.0 * k as f64 * ln_x
                - 3.0 * k as f64 * std::f64::consts::LN_2
                - ln_factorial(nn)
        })
        .fold(f64::INFINITY, f64::min)
        .exp();
    let upper_gap_bound = (1..nn)
        .map(|k| {
            ln_sqrt_2pi
                + ln_factorial(2 * k + 1)
                + ln_factorial(2 * (nn - k) - 1)
                + ln_factorial(nn)
                - k as f64 * std::f64::consts::LN_2
                - 2.0 * (k + 1) as f64 * ln_x
                - ln_factorial(2 * nn)
                - ln_factorial(nn - k - 1)
        })
        .fold(f64::INFINITY, f64::min)
        .exp();

    Ok(BoundReport {
        n,
        x,
        lower,
        tail,
        upper,
        lower_gap,
        upper_gap,
        lower_gap_bound,
        upper_gap_bound,
    })
}

/// `x^{2n} [h_{n-1}(x) + g_{n-1}(x) e^{x²/2} ∫_{-∞}^x e^{-t²/2} dt]` for `x < 0`,
/// which tends to `(2n-1)!` as `x → -∞`.
///
/// The bracket equals `J_{2n-1}(-x)` and is evaluated that way.
pub fn left_asymptote(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    if !(x < 0.0 && x.is_finite()) {
        return Err(Error::domain(format!(
            "x must be finite and negative, got {x}"
        )));
    }
    Ok(x.powi(2 * n as i32) * one_sided_moment(2 * n as usize - 1, -x))
}

/// Lower and upper enclosures of [`left_asymptote`] at `x < 0`:
/// `(2n-1)! x^{2n+1}/g_n(x)` and `(2n-1)! x^{2n}/(g'_{n-1}(x) + x g_{n-1}(x))`.
/// Both tend to `(2n-1)!` as `x → -∞`.
pub fn left_asymptote_enclosure(n: u32, x: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    if !(x < 0.0 && x.is_finite()) {
        return Err(Error::domain(format!(
            "x must be finite and negative, got {x}"
        )));
    }
    let fact: f64 = (2..2 * n).map(f64::from).product();
    let g_prev = g_poly(n - 1);
    let even = g_prev.derivative().eval(x) + x * g_prev.eval(x);
    let p = 2 * n as i32;
    Ok((
        fact * x.powi(p + 1) / g_poly(n).eval(x),
        fact * x.powi(p) / even,
    ))
}
