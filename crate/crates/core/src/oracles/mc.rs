use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_boundary::FreeBoundary;

/// Paths per parallel work item. Fixed so the reduction order, and with it
/// every bit of the estimate, is independent of the thread count.
const BATCH: usize = 4096;

/// Volatility control for the simulated diffusion `dX = ν dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "nu")]
pub enum McPolicy {
    /// `ν` fixed in `[σ, 1]`.
    Constant(f64),
    /// Full volatility where the value function is convex, `σ` where it is
    /// concave: `ν = 1` iff `X ≥ c·√(T - t)`. For even powers and `m = 1` the
    /// data is convex (or linear) and this is simply `ν = 1`.
    Feedback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
}

/// Resolved form of a policy: `ν = hi` where `X ≥ c·√(T - t)`, else `lo`.
#[derive(Clone, Copy)]
struct Rule {
    c: f64,
    lo: f64,
    hi: f64,
}

impl Rule {
    fn new(m: u32, sigma: f64, policy: &McPolicy) -> Result<Self> {
        match *policy {
            McPolicy::Constant(nu) if (sigma..=1.0).contains(&nu) => Ok(Rule {
                c: 0.0,
                lo: nu,
                hi: nu,
            }),
            McPolicy::Constant(nu) => Err(Error::domain(format!(
                "constant volatility {nu} is not admissible for [{sigma}, 1]"
            ))),
            McPolicy::Feedback if m >= 3 && m % 2 == 1 && sigma < 1.0 => {
                let fb = FreeBoundary::solve((m - 1) / 2, sigma)?;
                Ok(Rule {
                    c: fb.c,
                    lo: sigma,
                    hi: 1.0,
                })
            }
            McPolicy::Feedback => Ok(Rule {
                c: 0.0,
                lo: 1.0,
                hi: 1.0,
            }),
        }
    }
}

/// Running mean and sum of squared deviations, mergeable in a fixed order.
#[derive(Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1.0;
        let d = v - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }
}

/// Euler estimate of `E[X_T^m]` for `X_0 = x0`, `dX = ν(t, X) dW`.
///
/// Path `i` draws from ChaCha8 stream `i` of `seed`, so the result depends only
/// on the arguments, not on scheduling.
#[allow(clippy::too_many_arguments)]
pub fn mc_value(
    m: u32,
    sigma: f64,
    horizon: f64,
    x0: f64,
    policy: &McPolicy,
    paths: usize,
    steps: usize,
    seed: u64,
) -> Result<McEstimate> {
    if m == 0 {
        return Err(Error::domain("power must be positive"));
    }
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::domain(format!(
            "sigma must lie in [0, 1], got {sigma}"
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) || !x0.is_finite() {
        return Err(Error::domain(format!(
            "need T > 0 and finite x0, got T={horizon}, x0={x0}"
        )));
    }
    if paths == 0 || steps == 0 {
        return Err(Error::domain("paths and steps must be at least 1"));
    }
    let rule = Rule::new(m, sigma, policy)?;
    let dt = horizon / steps as f64;
    let sq = dt.sqrt();
    let base = ChaCha8Rng::seed_from_u64(seed);

    let simulate = |path: usize| -> f64 {
        let mut rng = base.clone();
        rng.set_stream(path as u64);
        let mut x = x0;
        for i in 0..steps {
            let remaining = horizon - i as f64 * dt;
            let nu = if x >= rule.c * remaining.sqrt() {
                rule.hi
            } else {
                rule.lo
            };
            let z: f64 = StandardNormal.sample(&mut rng);
            x += nu * sq * z;
        }
        x.powi(m as i32)
    };

    let batches: Vec<Moments> = (0..paths.div_ceil(BATCH))
        .into_par_iter()
        .map(|b| {
            let mut acc = Moments::default();
            for path in b * BATCH..((b + 1) * BATCH).min(paths) {
                acc.push(simulate(path));
            }
            acc
        })
        .collect();
    let total = batches.into_iter().fold(Moments::default(), Moments::merge);

    let stderr = if paths > 1 {
        (total.m2 / (total.count - 1.0) / total.count).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        mean: total.mean,
        stderr,
        paths,
        steps,
        seed,
    })
}
