//! Discrete-ordinates solver of the half-space problem
//!
//! ```text
//! μ ∂ψ/∂x + ψ = (3/4) ∫_{-1}^{1} (1 - μ'²) ψ(x, μ') dμ',   ψ = h/(2G_v),
//! ψ(0, μ) = 0 for μ > 0,   ψ(x, μ) → U + x - μ as x → ∞,
//! ```
//!
//! independent of the analytic machinery. Ordinates are Gauss–Legendre nodes
//! on each half-range `(-1, 0)` and `(0, 1)`, so the jump of `ψ(0, μ)` at
//! `μ = 0` falls between nodes. Space is a geometrically graded mesh on
//! `[0, x_max]` swept per ordinate with the diamond-difference scheme. The
//! incoming data at `x_max` is the asymptote `U + x_max - μ`, where `U` is
//! relaxed toward the intercept of a straight-line fit of the velocity over
//! `[0.6, 0.9]·x_max` after every source iteration.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::kramers::VelocityProfile;
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, to_f64, Real};

/// Largest first-cell width of the mesh.
pub const MAX_FIRST_CELL: f64 = 1e-3;
/// Relaxation factor of the far-field intercept update.
pub const RELAXATION: f64 = 0.5;
/// Fit window as fractions of `x_max`.
pub const FIT_WINDOW: (f64, f64) = (0.6, 0.9);
/// Smallest acceptable `R²` of the far-field fit.
pub const MIN_R_SQUARED: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig<T> {
    pub n_ordinates: usize,
    pub x_max: T,
    pub n_cells: usize,
    pub sweep_tol: T,
    pub max_iterations: usize,
}

impl<T: Real> Default for OracleConfig<T> {
    fn default() -> Self {
        Self {
            n_ordinates: 64,
            x_max: lit(20.0),
            n_cells: 2000,
            sweep_tol: lit(1e-10),
            max_iterations: 5000,
        }
    }
}

impl<T: Real> OracleConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_ordinates < 4 || !self.n_ordinates.is_multiple_of(2) {
            return Err(Error::InvalidConfig("n_ordinates must be even and at least 4".into()));
        }
        if !(self.x_max >= lit(10.0)) || !self.x_max.is_finite() {
            return Err(Error::InvalidConfig("x_max must be at least 10".into()));
        }
        if self.n_cells < 2 {
            return Err(Error::InvalidConfig("n_cells must be at least 2".into()));
        }
        if !(self.sweep_tol > T::zero()) {
            return Err(Error::InvalidConfig("sweep_tol must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolution<T> {
    pub x_grid: Vec<T>,
    pub mu: Vec<T>,
    pub weights: Vec<T>,
    /// `h_field[j][i] = ψ(x_i, μ_j)`.
    pub h_field: Vec<Vec<T>>,
    /// `U(x_i)/G_v = (3/4) Σ_j w_j (1 - μ_j²) ψ(x_i, μ_j)`.
    pub u_profile: Vec<T>,
    pub slip_fit: LinearFit<T>,
    pub iterations_used: usize,
    /// Largest change of the velocity in the last iteration.
    pub residual: T,
}

impl<T: Real> OracleSolution<T> {
    pub fn wall_velocity(&self) -> T {
        self.u_profile[0]
    }

    /// Linear interpolation of the velocity profile.
    pub fn velocity_at(&self, x: T) -> Option<T> {
        let xs = &self.x_grid;
        if x < xs[0] || x > xs[xs.len() - 1] {
            return None;
        }
        let i = xs.partition_point(|&p| p <= x).clamp(1, xs.len() - 1);
        let (x0, x1) = (xs[i - 1], xs[i]);
        let t = (x - x0) / (x1 - x0);
        Some(self.u_profile[i - 1] + t * (self.u_profile[i] - self.u_profile[i - 1]))
    }
}

/// Half-range Gauss–Legendre ordinates `(μ, w)`, negative half first.
pub fn ordinates<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let gl = GaussLegendre::<T>::new(n / 2);
    let pos: Vec<(T, T)> = gl.mapped(T::zero(), T::one()).collect();
    let mut mu = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for &(m, wt) in pos.iter().rev() {
        mu.push(-m);
        w.push(wt);
    }
    for &(m, wt) in &pos {
        mu.push(m);
        w.push(wt);
    }
    (mu, w)
}

/// Nodes `0 = x_0 < … < x_n = x_max` with geometric cell growth and first cell
/// `min(MAX_FIRST_CELL, x_max/n)`.
pub fn graded_mesh<T: Real>(x_max: T, n_cells: usize) -> Vec<T> {
    let n = n_cells as f64;
    let xm = to_f64(x_max);
    let h0 = MAX_FIRST_CELL.min(xm / n);
    let ratio = if h0 * n >= xm * (1.0 - 1e-12) {
        1.0
    } else {
        // h0 (r^n - 1)/(r - 1) = x_max, solved by bisection on r > 1
        let total = |r: f64| h0 * (r.powf(n) - 1.0) / (r - 1.0);
        let (mut lo, mut hi) = (1.0 + 1e-15, 2.0);
        while total(hi) < xm {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) < xm {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut pts = Vec::with_capacity(n_cells + 1);
    let mut x = 0.0;
    let mut h = h0;
    pts.push(T::zero());
    for _ in 1..n_cells {
        x += h;
        pts.push(lit(x));
        h *= ratio;
    }
    pts.push(x_max);
    pts
}

/// Diamond-difference sweep of one ordinate through the mesh for the
/// node source `s`, starting from the incoming value `inflow`.
fn sweep<T: Real>(mu: T, xs: &[T], s: &[T], inflow: T) -> Vec<T> {
    let n = xs.len();
    let half = lit::<T>(0.5);
    let mut psi = vec![T::zero(); n];
    if mu > T::zero() {
        psi[0] = inflow;
        for i in 0..n - 1 {
            let a = mu / (xs[i + 1] - xs[i]);
            let src = (s[i] + s[i + 1]) * half;
            psi[i + 1] = (psi[i] * (a - half) + src) / (a + half);
        }
    } else {
        let m = -mu;
        psi[n - 1] = inflow;
        for i in (0..n - 1).rev() {
            let a = m / (xs[i + 1] - xs[i]);
            let src = (s[i] + s[i + 1]) * half;
            psi[i] = (psi[i + 1] * (a - half) + src) / (a + half);
        }
    }
    psi
}

fn fit_window<T: Real>(xs: &[T], u: &[T], x_max: T) -> Result<LinearFit<T>> {
    let lo = x_max * lit(FIT_WINDOW.0);
    let hi = x_max * lit(FIT_WINDOW.1);
    let (wx, wu): (Vec<T>, Vec<T>) = xs
        .iter()
        .zip(u)
        .filter(|(&x, _)| x >= lo && x <= hi)
        .map(|(&x, &v)| (x, v))
        .unzip();
    linear_fit(&wx, &wu)
}

/// One source iteration: sweeps every ordinate against the current velocity
/// `source`, then relaxes the far-field intercept `u_sl` toward the fit of
/// the new velocity.
struct Step<T> {
    psi: Vec<Vec<T>>,
    source: Vec<T>,
    u_sl: T,
    fit: LinearFit<T>,
}

struct Problem<T> {
    cfg: OracleConfig<T>,
    mu: Vec<T>,
    coef: Vec<T>,
    xs: Vec<T>,
}

impl<T: Real> Problem<T> {
    fn step(&self, source: &[T], u_sl: T) -> Result<Step<T>> {
        let psi: Vec<Vec<T>> = self
            .mu
            .par_iter()
            .map(|&m| {
                let inflow = if m > T::zero() {
                    T::zero()
                } else {
                    u_sl + self.cfg.x_max - m
                };
                sweep(m, &self.xs, source, inflow)
            })
            .collect();
        let new_source: Vec<T> = (0..self.xs.len())
            .map(|i| {
                self.coef
                    .iter()
                    .zip(&psi)
                    .fold(T::zero(), |acc, (&c, col)| acc + c * col[i])
            })
            .collect();
        let fit = fit_window(&self.xs, &new_source, self.cfg.x_max)?;
        Ok(Step {
            psi,
            source: new_source,
            u_sl: u_sl + lit::<T>(RELAXATION) * (fit.intercept - u_sl),
            fit,
        })
    }
}

/// Iterates kept by the Anderson mixer.
pub const ANDERSON_DEPTH: usize = 8;

/// Anderson mixing of a fixed-point map `x -> g(x)`. The mixing coefficients
/// come from an `f64` least-squares solve; the iterates keep full precision.
struct Anderson<T> {
    depth: usize,
    prev: Option<(Vec<T>, Vec<T>)>,
    dg: Vec<Vec<T>>,
    df: Vec<Vec<T>>,
}

impl<T: Real> Anderson<T> {
    fn new(depth: usize) -> Self {
        Self {
            depth,
            prev: None,
            dg: Vec::new(),
            df: Vec::new(),
        }
    }

    /// Next iterate from the current iterate `x` and its image `g`.
    fn next(&mut self, x: &[T], g: &[T]) -> Vec<T> {
        let f: Vec<T> = g.iter().zip(x).map(|(&a, &b)| a - b).collect();
        if let Some((g_old, f_old)) = self.prev.take() {
            self.dg.push(g.iter().zip(&g_old).map(|(&a, &b)| a - b).collect());
            self.df.push(f.iter().zip(&f_old).map(|(&a, &b)| a - b).collect());
            if self.dg.len() > self.depth {
                self.dg.remove(0);
                self.df.remove(0);
            }
        }
        self.prev = Some((g.to_vec(), f.clone()));
        if self.df.is_empty() {
            return g.to_vec();
        }
        let a = nalgebra::DMatrix::from_fn(f.len(), self.df.len(), |i, j| to_f64(self.df[j][i]));
        let b = nalgebra::DVector::from_iterator(f.len(), f.iter().map(|&v| to_f64(v)));
        let gamma = match a.svd(true, true).solve(&b, 1e-13) {
            Ok(gamma) => gamma,
            Err(_) => return g.to_vec(),
        };
        let mut out = g.to_vec();
        for (j, dg) in self.dg.iter().enumerate() {
            let c: T = lit(gamma[j]);
            for (o, &d) in out.iter_mut().zip(dg) {
                *o = *o - c * d;
            }
        }
        out
    }
}

/// Runs the source iteration, Anderson-accelerated, until the velocity and
/// the intercept both change by less than `sweep_tol`.
pub fn solve<T: Real>(cfg: &OracleConfig<T>) -> Result<OracleSolution<T>> {
    cfg.validate()?;
    let (mu, w) = ordinates::<T>(cfg.n_ordinates);
    let xs = graded_mesh(cfg.x_max, cfg.n_cells);
    let (lo, hi) = (cfg.x_max * lit(FIT_WINDOW.0), cfg.x_max * lit(FIT_WINDOW.1));
    if xs.iter().filter(|&&x| x >= lo && x <= hi).count() < 2 {
        return Err(Error::InvalidConfig(
            "mesh too coarse: fewer than two nodes in the fit window".into(),
        ));
    }
    let three_quarters = lit::<T>(0.75);
    let coef: Vec<T> = mu
        .iter()
        .zip(&w)
        .map(|(&m, &wt)| three_quarters * wt * (T::one() - m * m))
        .collect();
    let problem = Problem {
        cfg: *cfg,
        mu,
        coef,
        xs,
    };

    let pack = |source: &[T], u: T| -> Vec<T> { source.iter().copied().chain([u]).collect() };
    let n = problem.xs.len();
    let mut mixer = Anderson::new(ANDERSON_DEPTH);
    // Start from the Chapman–Enskog field with zero slip.
    let mut state = pack(&problem.xs, T::zero());
    let mut residual = T::infinity();
    for it in 1..=cfg.max_iterations {
        let step = problem.step(&state[..n], state[n])?;
        let image = pack(&step.source, step.u_sl);
        residual = image
            .iter()
            .zip(&state)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
        if residual < cfg.sweep_tol {
            if step.fit.r_squared < lit(MIN_R_SQUARED) {
                return Err(Error::UnstableFit {
                    r_squared: to_f64(step.fit.r_squared),
                });
            }
            let Problem { mu, xs, .. } = problem;
            return Ok(OracleSolution {
                x_grid: xs,
                mu,
                weights: w,
                h_field: step.psi,
                u_profile: step.source,
                slip_fit: step.fit,
                iterations_used: it,
                residual,
            });
        }
        state = mixer.next(&state, &image);
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iterations,
        residual: to_f64(residual),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow<T> {
    pub x: T,
    pub oracle: T,
    pub analytic: T,
    pub relative_deviation: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileComparison<T> {
    pub x_range: (T, T),
    pub max_relative_deviation: T,
    pub rows: Vec<ComparisonRow<T>>,
}

/// Relative deviation of the oracle velocity from the analytic profile at the
/// analytic grid points in `[0, 5]`.
pub fn compare_profiles<T: Real>(
    oracle: &OracleSolution<T>,
    analytic: &VelocityProfile<T>,
) -> Result<ProfileComparison<T>> {
    compare_profiles_on(oracle, analytic, T::zero(), lit(5.0))
}

/// [`compare_profiles`] restricted to `[x_lo, x_hi]`.
pub fn compare_profiles_on<T: Real>(
    oracle: &OracleSolution<T>,
    analytic: &VelocityProfile<T>,
    x_lo: T,
    x_hi: T,
) -> Result<ProfileComparison<T>> {
    if analytic.x_grid.len() != analytic.u_over_gv.len() {
        return Err(Error::GridMismatch("analytic profile arrays differ in length".into()));
    }
    let mut rows = Vec::new();
    let mut worst = T::zero();
    for (&x, &ua) in analytic.x_grid.iter().zip(&analytic.u_over_gv) {
        if x < x_lo || x > x_hi {
            continue;
        }
        let uo = oracle
            .velocity_at(x)
            .ok_or_else(|| Error::GridMismatch(format!("x = {} lies outside the oracle mesh", to_f64(x))))?;
        let dev = ((uo - ua) / ua).abs();
        worst = worst.max(dev);
        rows.push(ComparisonRow {
            x,
            oracle: uo,
            analytic: ua,
            relative_deviation: dev,
        });
    }
    if rows.is_empty() {
        return Err(Error::GridMismatch(
            "no analytic grid points inside the comparison range".into(),
        ));
    }
    Ok(ProfileComparison {
        x_range: (x_lo, x_hi),
        max_relative_deviation: worst,
        rows,
    })
}
