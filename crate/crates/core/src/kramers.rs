//! Closed-form solution of the Kramers problem, per unit velocity gradient `G_v`.
//!
//! With `f(η) = sin ζ(η)/(η X(η))` (non-positive on `(0, 1)`):
//!
//! ```text
//! U_sl / G_v        = V₁
//! a(η) / G_v        = 8 f(η) / (3π)
//! U(x) / G_v        = V₁ + x + (1/π) ∫_0^1 e^{-x/η} f(η) dη
//! h(x, μ) / (2G_v)  = V₁ + x - μ + (1/π) ∫_0^1 e^{-x/η} η f(η)/(η - μ) dη
//!                     + Θ(μ) cos ζ(μ)/X(μ) e^{-x/μ}
//! ```
//!
//! The continuum term of `h` is `(3/4) ∫ e^{-x/η} η a(η)/(η - μ) dη`, so its
//! kernel is `sin ζ(η)/X(η)` without the `1/η` of the velocity integral. It is
//! a principal value for `μ ∈ (0, 1)`. At the wall
//! `U(0)/G_v = 1/√5`, `h(0, μ) = 0` for `μ > 0` and `h(0, μ)/(2G_v) = -1/X(μ)`
//! for `μ < 0`.
//!
//! Dimensional results use the mean free path `l = (η/ρ)√(πβ)` with viscosity
//! `η = 8ρ l₁(α)/(15 ν₀ β l₀(α))`, giving `K_v(α) = (15V₁/8) l₀(α)/(√π l₁(α))`.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::Serialize;

use crate::dispersion::zeta;
use crate::error::{Error, Result};
use crate::fermi::{Alpha, FermiIntegrals};
use crate::fit::{linear_fit, LinearFit};
use crate::moments::{MomentTable, Route};
use crate::quadrature::{Endpoint, Integrator, QuadratureConfig};
use crate::scalar::{lit, to_f64, Real};
use crate::xfunction::XFunction;

/// Order of the moment table held by a [`SlipSolution`].
pub const MOMENT_ORDER: usize = 8;
/// For `x > 0` the layer integrals start at `η = x / LAYER_CUTOFF`; below it
/// `e^{-x/η} < e^{-LAYER_CUTOFF}`.
pub const LAYER_CUTOFF: f64 = 50.0;
/// Step of the centred difference in the transport residual.
pub const RESIDUAL_STEP: f64 = 1e-4;

/// `U(0)/G_v = 1/√5`.
pub fn wall_velocity_exact<T: Real>() -> T {
    lit::<T>(5.0).sqrt().recip()
}

/// `15/(8√5)`: the classical coefficient built on the wall velocity.
pub fn kv_classical_wall<T: Real>() -> T {
    lit::<T>(15.0 / 8.0) * wall_velocity_exact::<T>()
}

/// `η = 8ρ l₁(α)/(15 ν₀ β l₀(α))`.
pub fn viscosity<T: Real>(fermi: &FermiIntegrals<T>, alpha: Alpha<T>, rho: T, nu0: T, beta: T) -> Result<T> {
    for (v, name) in [(rho, "density > 0"), (nu0, "collision rate > 0"), (beta, "beta > 0")] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::OutOfRange {
                value: to_f64(v),
                range: name,
            });
        }
    }
    let ratio = fermi.l1(alpha)? / fermi.l0(alpha)?;
    Ok(lit::<T>(8.0 / 15.0) * rho * ratio / (nu0 * beta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VelocityProfile<T> {
    pub x_grid: Vec<T>,
    pub u_over_gv: Vec<T>,
    /// `U/G_v - (V₁ + x)`.
    pub h_layer: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSlice<T> {
    pub x: T,
    pub mu_grid: Vec<T>,
    pub h_over_2gv: Vec<T>,
}

/// Terms of `μ ∂h/∂x + h - (3/4) ∫(1 - μ'²) h dμ'` at one point, in units of `2G_v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportResidual<T> {
    pub x: T,
    pub mu: T,
    pub h: T,
    pub collision: T,
    pub residual: T,
}

impl<T: Real> TransportResidual<T> {
    /// `|residual| / max(|h|, |collision|)`.
    pub fn relative(&self) -> T {
        self.residual.abs() / self.h.abs().max(self.collision.abs())
    }
}

/// Analytic solution with its tables.
#[derive(Debug, Clone)]
pub struct SlipSolution<T> {
    xf: XFunction<T>,
    moments: MomentTable<T>,
    fermi: FermiIntegrals<T>,
    outer: Integrator<T>,
}

impl<T: Real> SlipSolution<T> {
    pub fn new() -> Result<Self> {
        Self::with_config(XFunction::<T>::default_config())
    }

    /// `cfg` drives every single integral; nested integrals use tolerances
    /// a thousand times looser.
    pub fn with_config(cfg: QuadratureConfig<T>) -> Result<Self> {
        let xf = XFunction::with_config(cfg)?;
        let moments = MomentTable::compute(&xf, MOMENT_ORDER, Route::Both)?;
        let outer_cfg = QuadratureConfig {
            rel_tol: cfg.rel_tol * lit(1e3),
            abs_tol: cfg.abs_tol * lit(1e3),
            max_subdivisions: cfg.max_subdivisions,
            base_order: cfg.base_order,
        };
        Ok(Self {
            outer: Integrator::new(outer_cfg)?,
            xf,
            moments,
            fermi: FermiIntegrals::default(),
        })
    }

    pub fn x_function(&self) -> &XFunction<T> {
        &self.xf
    }

    pub fn moment_table(&self) -> &MomentTable<T> {
        &self.moments
    }

    pub fn fermi(&self) -> &FermiIntegrals<T> {
        &self.fermi
    }

    /// `U_sl/G_v = V₁`.
    pub fn u_sl_over_gv(&self) -> T {
        self.moments.v(1)
    }

    /// `U(0)/G_v` from the profile integral.
    pub fn wall_velocity_over_gv(&self) -> Result<T> {
        self.velocity(T::zero())
    }

    /// `|V₁ + (1/π) ∫ sin ζ/(ηX) dη - 1/√5|`.
    pub fn wall_closure_residual(&self) -> Result<T> {
        Ok((self.u_sl_over_gv() + self.layer(T::zero())? - wall_velocity_exact::<T>()).abs())
    }

    /// `15V₁/8`: the classical coefficient built on the slip intercept.
    pub fn kv_classical_slip(&self) -> T {
        lit::<T>(15.0 / 8.0) * self.u_sl_over_gv()
    }

    /// `sin ζ(η)/(η X(η))`.
    fn spectral_weight(&self, eta: T) -> T {
        zeta(eta).sin() / (eta * self.xf.x_or_nan(eta))
    }

    /// `a(η)/G_v = 8 sin ζ(η)/(3π η X(η))` on `(0, 1)`.
    pub fn spectrum_coefficient(&self, eta: T) -> Result<T> {
        if !(eta > T::zero() && eta < T::one()) {
            return Err(Error::OutOfRange {
                value: to_f64(eta),
                range: "(0, 1)",
            });
        }
        let x = self.xf.x_at(eta)?;
        Ok(lit::<T>(8.0) * zeta(eta).sin() / (lit::<T>(3.0) * T::PI() * eta * x))
    }

    fn check_x(x: T) -> Result<()> {
        if x >= T::zero() && x.is_finite() {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                value: to_f64(x),
                range: "x >= 0",
            })
        }
    }

    /// Lower end of the layer integrals; `None` when the whole integrand is
    /// below `e^{-LAYER_CUTOFF}`.
    fn layer_start(x: T) -> Option<T> {
        let lo = x / lit(LAYER_CUTOFF);
        if lo >= T::one() {
            None
        } else {
            Some(lo)
        }
    }

    /// Breakpoints halving toward `lo` (down to `scale`) and toward `1`.
    fn layer_breaks(lo: T, scale: T) -> Vec<T> {
        let half = lit::<T>(0.5);
        let floor = lo.max(scale * lit(0.125)).max(lit(1e-12));
        let mut pts = Vec::new();
        let mut d = half;
        while d > floor {
            pts.push(d);
            d = d * half;
        }
        let mut d = half;
        for _ in 0..12 {
            d = d * half;
            pts.push(T::one() - d);
        }
        pts
    }

    /// Knudsen-layer defect `(1/π) ∫_0^1 e^{-x/η} sin ζ(η)/(η X(η)) dη`.
    pub fn layer(&self, x: T) -> Result<T> {
        Self::check_x(x)?;
        let Some(lo) = Self::layer_start(x) else {
            return Ok(T::zero());
        };
        let breaks = Self::layer_breaks(lo, lit(2f64.powi(-12)));
        let est = self.xf.integrator().integrate_with_breaks(
            |eta: T| (-x / eta).exp() * self.spectral_weight(eta),
            lo,
            T::one(),
            &breaks,
        )?;
        Ok(est.value / T::PI())
    }

    /// `U(x)/G_v`.
    pub fn velocity(&self, x: T) -> Result<T> {
        Ok(self.u_sl_over_gv() + x + self.layer(x)?)
    }

    /// Profile on a grid, evaluated in parallel; output order follows the grid.
    pub fn velocity_profile(&self, x_grid: &[T]) -> Result<VelocityProfile<T>> {
        let layer: Vec<T> = x_grid.par_iter().map(|&x| self.layer(x)).collect::<Result<_>>()?;
        let v1 = self.u_sl_over_gv();
        let u = x_grid.iter().zip(&layer).map(|(&x, &h)| v1 + x + h).collect();
        Ok(VelocityProfile {
            x_grid: x_grid.to_vec(),
            u_over_gv: u,
            h_layer: layer,
        })
    }

    /// Straight-line fit of `U/G_v` over `points` equally spaced `x` in `[x_lo, x_hi]`.
    pub fn far_field_fit(&self, x_lo: T, x_hi: T, points: usize) -> Result<LinearFit<T>> {
        if points < 2 || !(x_hi > x_lo) {
            return Err(Error::InvalidConfig(
                "fit window needs x_hi > x_lo and two points".into(),
            ));
        }
        let step = (x_hi - x_lo) / lit((points - 1) as f64);
        let xs: Vec<T> = (0..points).map(|i| x_lo + step * lit(i as f64)).collect();
        let profile = self.velocity_profile(&xs)?;
        linear_fit(&profile.x_grid, &profile.u_over_gv)
    }

    /// `h(x, μ)/(2G_v)` for `x >= 0`, `μ ∈ (-1, 1) \ {0}`.
    pub fn h(&self, x: T, mu: T) -> Result<T> {
        Self::check_x(x)?;
        if !(mu.abs() < T::one()) || mu == T::zero() {
            return Err(Error::OutOfRange {
                value: to_f64(mu),
                range: "(-1, 0) ∪ (0, 1)",
            });
        }
        Ok(self.h_continuum(x, mu)? + self.h_discrete(x, mu)?)
    }

    /// Every term of `h` except the `Θ(μ)` one.
    fn h_continuum(&self, x: T, mu: T) -> Result<T> {
        let base = self.u_sl_over_gv() + x - mu;
        let Some(lo) = Self::layer_start(x) else {
            return Ok(base);
        };
        let quad = self.xf.integrator();
        let f = |eta: T| (-x / eta).exp() * zeta(eta).sin() / self.xf.x_or_nan(eta);
        let integral = if mu > lo * lit(1.0 + 1e-9) {
            let breaks = Self::layer_breaks(lo, lit(2f64.powi(-12)));
            quad.principal_value_with_breaks(f, lo, T::one(), mu, &breaks)?.value
        } else {
            let breaks = Self::layer_breaks(lo, mu.abs().min(lit(2f64.powi(-12))));
            quad.integrate_with_breaks(|eta: T| f(eta) / (eta - mu), lo, T::one(), &breaks)?
                .value
        };
        Ok(base + integral / T::PI())
    }

    /// `Θ(μ) cos ζ(μ)/X(μ) e^{-x/μ}`.
    fn h_discrete(&self, x: T, mu: T) -> Result<T> {
        if mu <= T::zero() {
            return Ok(T::zero());
        }
        Ok(zeta(mu).cos() / self.xf.x_at(mu)? * (-x / mu).exp())
    }

    pub fn distribution(&self, x: T, mu_grid: &[T]) -> Result<DistributionSlice<T>> {
        let h = mu_grid
            .par_iter()
            .map(|&mu| self.h(x, mu))
            .collect::<Result<Vec<T>>>()?;
        Ok(DistributionSlice {
            x,
            mu_grid: mu_grid.to_vec(),
            h_over_2gv: h,
        })
    }

    /// `(3/4) ∫_{-1}^{1} (1 - μ²) h(x, μ)/(2G_v) dμ`, which equals `U(x)/G_v`.
    pub fn velocity_from_distribution(&self, x: T) -> Result<T> {
        Self::check_x(x)?;
        let failure = RefCell::new(None);
        let g = |mu: T| {
            let w = T::one() - mu * mu;
            match self.h(x, mu) {
                Ok(h) => w * h,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    T::nan()
                }
            }
        };
        let neg = self
            .outer
            .integrate_graded(g, -T::one(), T::zero(), Endpoint::Regular, Endpoint::Logarithmic);
        let pos = self
            .outer
            .integrate_graded(g, T::zero(), T::one(), Endpoint::Logarithmic, Endpoint::Logarithmic);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(lit::<T>(0.75) * (neg?.value + pos?.value))
    }

    /// Transport-equation residual at `(x, μ)` given the collision term at `x`.
    /// `∂h/∂x` of the continuum part is a centred difference; the `Θ(μ)` term
    /// satisfies `μ ∂/∂x + 1 = 0` identically and drops out.
    pub fn transport_residual_with(&self, x: T, mu: T, collision: T) -> Result<TransportResidual<T>> {
        let dx = lit::<T>(RESIDUAL_STEP);
        if x < dx {
            return Err(Error::OutOfRange {
                value: to_f64(x),
                range: "x >= residual step",
            });
        }
        let h = self.h(x, mu)?;
        let c = self.h_continuum(x, mu)?;
        let dc = (self.h_continuum(x + dx, mu)? - self.h_continuum(x - dx, mu)?) / (dx + dx);
        Ok(TransportResidual {
            x,
            mu,
            h,
            collision,
            residual: mu * dc + c - collision,
        })
    }

    pub fn transport_residual(&self, x: T, mu: T) -> Result<TransportResidual<T>> {
        let collision = self.velocity_from_distribution(x)?;
        self.transport_residual_with(x, mu, collision)
    }

    /// `K_v(α) = (15V₁/8) l₀(α)/(√π l₁(α))`.
    pub fn slip_coefficient(&self, alpha: Alpha<T>) -> Result<T> {
        Ok(self.kv_classical_slip() * self.fermi_factor(alpha)?)
    }

    /// `l₀(α)/(√π l₁(α))`, equal to `1` in the classical limit.
    pub fn fermi_factor(&self, alpha: Alpha<T>) -> Result<T> {
        Ok(self.fermi.l0(alpha)? / (T::PI().sqrt() * self.fermi.l1(alpha)?))
    }

    /// `K_v*(x, α) = 15 H(x) l₀(α)/(8√π l₁(α))`, `H(x) = U(x)/G_v`.
    pub fn dimensional_profile(&self, x: T, alpha: Alpha<T>) -> Result<T> {
        Ok(lit::<T>(15.0 / 8.0) * self.velocity(x)? * self.fermi_factor(alpha)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::sync::OnceLock;

    fn sol() -> &'static SlipSolution<f64> {
        static S: OnceLock<SlipSolution<f64>> = OnceLock::new();
        S.get_or_init(|| SlipSolution::new().unwrap())
    }

    #[test]
    fn wall_velocity() {
        let s = sol();
        assert_abs_diff_eq!(s.wall_velocity_over_gv().unwrap(), 0.2f64.sqrt(), epsilon = 1e-9);
        assert!(s.wall_closure_residual().unwrap() < 1e-9);
    }

    #[test]
    fn far_field_is_chapman_enskog() {
        let s = sol();
        assert_abs_diff_eq!(s.velocity(10.0).unwrap(), s.u_sl_over_gv() + 10.0, epsilon = 1e-4);
        let fit = s.far_field_fit(8.0, 12.0, 9).unwrap();
        assert_abs_diff_eq!(fit.intercept, s.u_sl_over_gv(), epsilon = 1e-4);
    }

    #[test]
    fn layer_is_negative_and_monotone() {
        let xs: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
        let p = sol().velocity_profile(&xs).unwrap();
        assert!(p.h_layer.iter().all(|&h| h <= 0.0));
        assert!(p.h_layer.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn spectrum_coefficient_sign_and_formula() {
        let s = sol();
        for i in 1..99 {
            assert!(s.spectrum_coefficient(i as f64 / 100.0).unwrap() < 0.0);
        }
        let x = s.x_function().x_boundary(0.5).unwrap();
        let expect = 8.0 / (3.0 * std::f64::consts::PI) * zeta(0.5f64).sin() / (0.5 * x);
        assert_relative_eq!(s.spectrum_coefficient(0.5).unwrap(), expect, max_relative = 1e-11);
        assert!(s.spectrum_coefficient(1.0 - 1e-9).unwrap().abs() < 1e-6);
        assert!(s.spectrum_coefficient(0.0).is_err());
    }

    #[test]
    fn wall_distribution() {
        let s = sol();
        assert!(s.h(0.0, 0.5).unwrap().abs() < 1e-9);
        let x = s.x_function().x_boundary(-0.5).unwrap();
        assert_relative_eq!(s.h(0.0, -0.5).unwrap(), -1.0 / x, max_relative = 1e-9);
    }

    #[test]
    fn distribution_far_field() {
        let s = sol();
        for &mu in &[-0.7, -0.2, 0.3, 0.9] {
            let h = s.h(30.0, mu).unwrap();
            assert_abs_diff_eq!(h, s.u_sl_over_gv() + 30.0 - mu, epsilon = 1e-10);
        }
    }

    #[test]
    fn moment_consistency() {
        let s = sol();
        for &x in &[0.0, 0.5, 2.0] {
            let a = s.velocity_from_distribution(x).unwrap();
            let b = s.velocity(x).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn transport_equation_holds() {
        let s = sol();
        let collision = s.velocity_from_distribution(0.5).unwrap();
        for &mu in &[-0.8, -0.1, 0.2, 0.6] {
            let r = s.transport_residual_with(0.5, mu, collision).unwrap();
            assert!(r.relative() < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn slip_coefficients() {
        let s = sol();
        assert_abs_diff_eq!(kv_classical_wall::<f64>(), 0.83853, epsilon = 1e-5);
        assert_relative_eq!(
            s.slip_coefficient(Alpha::Classical).unwrap(),
            s.kv_classical_slip(),
            max_relative = 1e-14
        );
        let kv40 = s.slip_coefficient(Alpha::Finite(40.0)).unwrap();
        let asym = s.kv_classical_slip() * 8.0 / (3.0 * (std::f64::consts::PI * 40.0).sqrt());
        assert_relative_eq!(kv40, asym, max_relative = 0.02);
    }

    #[test]
    fn dimensional_profile_scales_with_h() {
        let s = sol();
        let a = Alpha::Finite(1.5);
        let r0 = s.dimensional_profile(0.0, a).unwrap() / s.velocity(0.0).unwrap();
        let r1 = s.dimensional_profile(2.0, a).unwrap() / s.velocity(2.0).unwrap();
        assert_relative_eq!(r0, r1, max_relative = 1e-14);
        let k0 = s.dimensional_profile(0.0, Alpha::Classical).unwrap();
        assert_abs_diff_eq!(k0, kv_classical_wall::<f64>(), epsilon = 1e-9);
    }

    #[test]
    fn viscosity_limits() {
        let f = FermiIntegrals::<f64>::default();
        let v = viscosity(&f, Alpha::Classical, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(v, 8.0 / (15.0 * std::f64::consts::PI.sqrt()), max_relative = 1e-14);
        let v2 = viscosity(&f, Alpha::Finite(0.0), 2.0, 1.0, 1.0).unwrap();
        let v1 = viscosity(&f, Alpha::Finite(0.0), 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(v2, 2.0 * v1, max_relative = 1e-15);
        assert!(viscosity(&f, Alpha::Finite(0.0), -1.0, 1.0, 1.0).is_err());
    }
}
