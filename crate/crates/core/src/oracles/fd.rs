use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solution::MonomialSolution;

/// Uniform space-time grid for the explicit scheme.
///
/// `nx` counts interior nodes; the two boundary nodes sit at `x_min` and
/// `x_max`, so `Δx = (x_max - x_min)/(nx + 1)`. The time step is
/// `Δt = cfl·Δx²`, shortened on the last step to land exactly on `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub horizon: f64,
    pub cfl: f64,
}

impl FdGrid {
    pub const DEFAULT_CFL: f64 = 0.25;

    pub fn new(x_min: f64, x_max: f64, nx: usize, horizon: f64, cfl: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < 0.0 && 0.0 < x_max) {
            return Err(Error::domain(format!(
                "need x_min < 0 < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if nx < 16 {
            return Err(Error::domain(format!(
                "need at least 16 interior nodes, got {nx}"
            )));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::domain(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        // The update is u_i += cfl·(u_{i-1} - 2u_i + u_{i+1})·ν²/2 with ν ≤ 1,
        // a convex combination exactly when cfl ≤ 1/2.
        if !(cfl > 0.0 && cfl <= 0.5) {
            return Err(Error::domain(format!(
                "cfl must lie in (0, 0.5], got {cfl}"
            )));
        }
        Ok(FdGrid {
            x_min,
            x_max,
            nx,
            horizon,
            cfl,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx + 1) as f64
    }

    pub fn dt(&self) -> f64 {
        self.cfl * self.dx() * self.dx()
    }

    /// Number of time steps, the last possibly shortened.
    pub fn steps(&self) -> usize {
        let full = self.horizon / self.dt();
        // Guard against `T/Δt` landing a hair above an integer.
        let n = (full * (1.0 - 4.0 * f64::EPSILON)).ceil();
        (n as usize).max(1)
    }

    /// All `nx + 2` node positions, boundary nodes included.
    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.nx + 2)
            .map(|i| {
                if i == self.nx + 1 {
                    self.x_max
                } else {
                    self.x_min + i as f64 * dx
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// Boundary nodes reset to the closed-form trace after every step.
    PinnedExact,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSolution {
    pub grid: FdGrid,
    pub m: u32,
    pub sigma: f64,
    pub steps: usize,
    pub boundary_mode: BoundaryMode,
    pub x: Vec<f64>,
    /// Numerical values at `T` on every node.
    pub values: Vec<f64>,
    /// Closed form at `T` on every node.
    pub exact: Vec<f64>,
}

impl GridSolution {
    /// Largest `|numeric - closed form|` over nodes in `[a, b]`.
    pub fn max_error_on(&self, a: f64, b: f64) -> f64 {
        self.x
            .iter()
            .zip(self.values.iter().zip(&self.exact))
            .filter(|(x, _)| (a..=b).contains(*x))
            .map(|(_, (u, e))| (u - e).abs())
            .fold(0.0, f64::max)
    }

    /// Linear interpolation of the numerical solution at `x`.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let g = &self.grid;
        if !(g.x_min..=g.x_max).contains(&x) {
            return None;
        }
        let s = (x - g.x_min) / g.dx();
        let i = (s.floor() as usize).min(g.nx);
        let w = s - i as f64;
        Some((1.0 - w) * self.values[i] + w * self.values[i + 1])
    }

    /// Writes `x,u_numeric,u_closed,error` rows with round-trip precision.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["x", "u_numeric", "u_closed", "error"])?;
        for ((x, u), e) in self.x.iter().zip(&self.values).zip(&self.exact) {
            w.write_record([x, u, e, &(u - e)].map(|v| format!("{v:.16e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Explicit monotone scheme for `u_t = ½((u_xx)⁺ - σ²(u_xx)⁻)`, `u(0,x) = x^m`.
pub fn fd_solve(m: u32, sigma: f64, grid: &FdGrid) -> Result<GridSolution> {
    let exact_fn = MonomialSolution::new(m, sigma)?;
    let grid = FdGrid::new(grid.x_min, grid.x_max, grid.nx, grid.horizon, grid.cfl)?;
    let x = grid.nodes();
    let last = x.len() - 1;
    let mut u: Vec<f64> = x.iter().map(|&xi| xi.powi(m as i32)).collect();
    let mut next = u.clone();

    let inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    let s2 = sigma * sigma;
    let dt = grid.dt();
    let steps = grid.steps();
    let mut t = 0.0;
    for step in 0..steps {
        let h = if step + 1 == steps {
            grid.horizon - t
        } else {
            dt
        };
        for i in 1..last {
            let d2 = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
            let g = 0.5 * if d2 >= 0.0 { d2 } else { s2 * d2 };
            next[i] = u[i] + h * g;
        }
        t = if step + 1 == steps {
            grid.horizon
        } else {
            t + h
        };
        next[0] = exact_fn.value(t, x[0])?;
        next[last] = exact_fn.value(t, x[last])?;
        if let Some(node) = next.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step, node });
        }
        std::mem::swap(&mut u, &mut next);
    }

    let exact = x
        .iter()
        .map(|&xi| exact_fn.value(grid.horizon, xi))
        .collect::<Result<Vec<_>>>()?;
    Ok(GridSolution {
        grid,
        m,
        sigma,
        steps,
        boundary_mode: BoundaryMode::PinnedExact,
        x,
        values: u,
        exact,
    })
}
