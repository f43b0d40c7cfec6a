//! The factorizing function `X(z)` of the homogeneous Riemann problem
//! `X+(μ)/X-(μ) = λ+(μ)/λ-(μ)` on the cut `(0, 1)`:
//!
//! ```text
//! V(z) = (1/π) ∫_0^1 ζ(τ)/(τ - z) dτ,        X(z) = exp(V(z)) / z.
//! ```
//!
//! `ζ(0) = -π` makes the Cauchy integral logarithmically singular at `z = 0`,
//! so it is split into an elementary part and a remainder whose density
//! vanishes at both ends of the cut:
//!
//! ```text
//! W(z) = (1/π) ∫_0^1 (θ(τ) - πτ)/(τ - z) dτ,
//! V(z) = W(z) + 1 + (z - 1) Ln((z - 1)/z).
//! ```
//!
//! On the cut the boundary value used by the solution is
//!
//! ```text
//! X(μ) = sgn(μ) exp(W(μ) + 1 + (μ - 1) ln|μ - 1| - μ ln|μ|),
//! ```
//!
//! with `W(μ)` a principal value for `μ ∈ (0, 1)`. It is bounded at both ends of
//! the cut, and `X(±0) = ±exp(W(0) + 1) = ±√5`.
//!
//! `W` is tabulated at Chebyshev nodes on panels that halve toward `0` and `1`,
//! so [`XFunction::x_at`] is a cheap barycentric interpolation; the exact
//! principal-value path stays available as [`XFunction::x_boundary`].

use num_complex::Complex;
use rayon::prelude::*;

use crate::dispersion::{lambda_real, lambda_w, theta, zeta};
use crate::error::{Error, Result};
use crate::quadrature::{Endpoint, Integrator, QuadratureConfig};
use crate::scalar::{lit, to_f64, Real};

/// Dyadic levels of the boundary table on each side of `1/2`.
pub const TABLE_LEVELS: usize = 40;
/// Chebyshev nodes per table panel.
pub const PANEL_NODES: usize = 24;
/// `|Im z|` below which points over `[0, 1]` are treated as on the cut.
pub const CUT_GUARD: f64 = 1e-6;

/// `θ(τ) - πτ`, the part of the density of `V` that vanishes at both ends.
fn reduced_theta<T: Real>(tau: T) -> T {
    theta(tau) - T::PI() * tau
}

/// One Chebyshev panel of the boundary table.
#[derive(Debug, Clone)]
struct Panel<T> {
    a: T,
    b: T,
    nodes: Vec<T>,
    w: Vec<T>,
}

impl<T: Real> Panel<T> {
    fn interpolate(&self, mu: T, cheb: &Chebyshev<T>) -> T {
        let half = lit::<T>(0.5);
        let t = (mu - (self.a + self.b) * half) / ((self.b - self.a) * half);
        let mut num = T::zero();
        let mut den = T::zero();
        for ((&x, &bw), &f) in cheb.nodes.iter().zip(&cheb.weights).zip(&self.w) {
            let d = t - x;
            if d == T::zero() {
                return f;
            }
            let c = bw / d;
            num = num + c * f;
            den = den + c;
        }
        num / den
    }
}

/// Chebyshev points of the first kind on `[-1, 1]` with barycentric weights.
#[derive(Debug, Clone)]
struct Chebyshev<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> Chebyshev<T> {
    fn new(n: usize) -> Self {
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for j in 0..n {
            let phi = (2 * j + 1) as f64 * std::f64::consts::PI / (2 * n) as f64;
            nodes.push(lit(phi.cos()));
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            weights.push(lit(sign * phi.sin()));
        }
        Self { nodes, weights }
    }
}

/// One sample of the boundary table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample<T> {
    pub tau: T,
    pub lambda: T,
    pub theta: T,
    pub zeta: T,
    pub x: T,
}

/// Dense table of `W` on `(0, 1)`, graded toward both ends of the cut.
#[derive(Debug, Clone)]
pub struct BoundaryTable<T> {
    cheb: Chebyshev<T>,
    left: Vec<Panel<T>>,
    right: Vec<Panel<T>>,
    lo: T,
    hi: T,
}

impl<T: Real> BoundaryTable<T> {
    /// Smallest `τ` covered by the table; `1 - lower()` is the largest.
    pub fn lower(&self) -> T {
        self.lo
    }

    pub fn upper(&self) -> T {
        self.hi
    }

    pub fn contains(&self, mu: T) -> bool {
        mu >= self.lo && mu <= self.hi
    }

    fn w(&self, mu: T) -> Option<T> {
        if !self.contains(mu) {
            return None;
        }
        let half = lit::<T>(0.5);
        let (panels, d) = if mu < half {
            (&self.left, mu)
        } else {
            (&self.right, T::one() - mu)
        };
        // panel k covers d ∈ [2^-(k+2), 2^-(k+1)]
        let level = (-d.log2()).floor().to_usize().unwrap_or(0).saturating_sub(1);
        let k = level.min(panels.len() - 1);
        Some(panels[k].interpolate(mu, &self.cheb))
    }

    /// All table nodes in increasing `τ`, with the boundary quantities at each.
    pub fn samples(&self) -> Vec<BoundarySample<T>> {
        let mut out = Vec::new();
        let mut push = |p: &Panel<T>| {
            for (&tau, &w) in p.nodes.iter().zip(&p.w) {
                out.push(BoundarySample {
                    tau,
                    lambda: lambda_real(tau),
                    theta: theta(tau),
                    zeta: zeta(tau),
                    x: boundary_x(tau, w),
                });
            }
        };
        for p in self.left.iter().rev() {
            push(p);
        }
        for p in &self.right {
            push(p);
        }
        out.sort_by(|a, b| a.tau.partial_cmp(&b.tau).expect("finite nodes"));
        out
    }
}

/// `X(μ)` from `W(μ)` on the real line, `μ ≠ 0, 1`.
fn boundary_x<T: Real>(mu: T, w: T) -> T {
    let one = T::one();
    let e = w + one + (mu - one) * (mu - one).abs().ln() - mu * mu.abs().ln();
    e.exp() * mu.signum()
}

/// Factorizing function with its tabulated boundary values.
#[derive(Debug, Clone)]
pub struct XFunction<T> {
    quad: Integrator<T>,
    table: BoundaryTable<T>,
    v1: T,
    w0: T,
}

impl<T: Real> XFunction<T> {
    /// Default tolerances tightened to the scalar's precision.
    pub fn default_config() -> QuadratureConfig<T> {
        let eps = T::epsilon();
        QuadratureConfig {
            rel_tol: (eps * lit(100.0)).max(lit(1e-13)),
            abs_tol: (eps * lit(10.0)).max(lit(1e-15)),
            max_subdivisions: 400,
            base_order: 31,
        }
    }

    pub fn new() -> Result<Self> {
        Self::with_config(Self::default_config())
    }

    pub fn with_config(cfg: QuadratureConfig<T>) -> Result<Self> {
        let quad = Integrator::new(cfg)?;
        let w0 = quad
            .integrate_graded(
                |t: T| reduced_theta(t) / t,
                T::zero(),
                T::one(),
                Endpoint::Regular,
                Endpoint::Logarithmic,
            )?
            .value
            / T::PI();
        let v1 = -quad
            .integrate_graded(zeta::<T>, T::zero(), T::one(), Endpoint::Regular, Endpoint::Logarithmic)?
            .value
            / T::PI();
        let table = build_table(&quad)?;
        Ok(Self { quad, table, v1, w0 })
    }

    pub fn integrator(&self) -> &Integrator<T> {
        &self.quad
    }

    pub fn table(&self) -> &BoundaryTable<T> {
        &self.table
    }

    /// `V₁ = -(1/π) ∫_0^1 ζ(τ) dτ`.
    pub fn v1(&self) -> T {
        self.v1
    }

    fn check_off_cut(z: Complex<T>) -> Result<()> {
        let guard = lit::<T>(CUT_GUARD);
        if z.im.abs() < guard && z.re > -guard && z.re < T::one() + guard {
            Err(Error::OnCut {
                re: to_f64(z.re),
                im: to_f64(z.im),
            })
        } else {
            Ok(())
        }
    }

    /// Breakpoints that resolve `1/(τ - z)` for `z` close to the cut.
    fn breaks_near(z: Complex<T>) -> Vec<T> {
        let mut pts = Vec::new();
        if z.re > T::zero() && z.re < T::one() {
            pts.push(z.re);
            let mut d = z.im.abs();
            while d < T::one() {
                pts.push(z.re - d);
                pts.push(z.re + d);
                d = d * lit(4.0);
            }
        }
        pts
    }

    /// Attainable absolute accuracy of a Cauchy integral with an `O(1)` density:
    /// near the cut the integrand reaches `1/|Im z|` and its `L¹` norm grows like
    /// `ln(1/|Im z|)`.
    fn roundoff_floor(z: Complex<T>) -> T {
        let im = z.im.abs().max(T::min_positive_value());
        if z.re < T::zero() || z.re > T::one() || im >= lit(1e-2) {
            return T::zero();
        }
        T::epsilon() * lit(1e3) * (T::one() - im.ln()).max(T::one())
    }

    /// `(1/π) ∫_0^1 f(τ)/(τ - z) dτ` for `z` off the cut.
    fn cauchy<F>(&self, f: F, z: Complex<T>) -> Result<Complex<T>>
    where
        F: Fn(T) -> T,
    {
        let breaks = Self::breaks_near(z);
        let g = |t: T| Complex::new(f(t), T::zero()) / (Complex::new(t, T::zero()) - z);
        let floor = Self::roundoff_floor(z);
        let est = if floor > self.quad.config().abs_tol {
            let cfg = QuadratureConfig {
                abs_tol: floor,
                ..*self.quad.config()
            };
            Integrator::new(cfg)?.integrate_with_breaks(g, T::zero(), T::one(), &breaks)?
        } else {
            self.quad.integrate_with_breaks(g, T::zero(), T::one(), &breaks)?
        };
        Ok(est.value / T::PI())
    }

    /// `W(z)` off the cut.
    pub fn w_of_z(&self, z: Complex<T>) -> Result<Complex<T>> {
        Self::check_off_cut(z)?;
        self.cauchy(reduced_theta, z)
    }

    /// `V(z) = (1/π) ∫_0^1 ζ(τ)/(τ - z) dτ` off the cut.
    pub fn v_of_z(&self, z: Complex<T>) -> Result<Complex<T>> {
        let one = Complex::new(T::one(), T::zero());
        let w = self.w_of_z(z)?;
        Ok(w + one + (z - one) * ((z - one) / z).ln())
    }

    /// `V(z)` by direct quadrature of `ζ/(τ - z)`, without the elementary split.
    pub fn v_of_z_direct(&self, z: Complex<T>) -> Result<Complex<T>> {
        Self::check_off_cut(z)?;
        self.cauchy(zeta, z)
    }

    /// `X(z) = exp(V(z))/z` off the cut.
    pub fn x_of_z(&self, z: Complex<T>) -> Result<Complex<T>> {
        Ok(self.v_of_z(z)?.exp() / z)
    }

    /// `X(z) = exp(V°(z))/(z - 1)` with `V°(z) = (1/π) ∫_0^1 θ(τ)/(τ - z) dτ`.
    pub fn x_of_z_shifted(&self, z: Complex<T>) -> Result<Complex<T>> {
        Self::check_off_cut(z)?;
        let v = self.cauchy(theta, z)?;
        Ok(v.exp() / (z - Complex::new(T::one(), T::zero())))
    }

    /// Exact `W(μ)` on the real line: principal value on `(0, 1)`, regular outside.
    pub fn w_boundary(&self, mu: T) -> Result<T> {
        let zero = T::zero();
        let one = T::one();
        if mu > zero && mu < one {
            let g = |t: T| reduced_theta(t) / T::PI();
            Ok(self.quad.principal_value(g, zero, one, mu)?.value)
        } else if mu == zero {
            Ok(self.w0)
        } else {
            if mu == one {
                return Err(Error::PoleAtEndpoint {
                    pole: 1.0,
                    a: 0.0,
                    b: 1.0,
                });
            }
            let est = self.quad.integrate_graded(
                |t: T| reduced_theta(t) / (t - mu),
                zero,
                one,
                Endpoint::Regular,
                Endpoint::Logarithmic,
            )?;
            Ok(est.value / T::PI())
        }
    }

    /// Exact boundary value `X(μ)` for `μ ∈ (-1, 1) \ {0}`.
    pub fn x_boundary(&self, mu: T) -> Result<T> {
        if !(mu.abs() < T::one()) || mu == T::zero() {
            return Err(Error::OutOfRange {
                value: to_f64(mu),
                range: "(-1, 0) ∪ (0, 1)",
            });
        }
        Ok(boundary_x(mu, self.w_boundary(mu)?))
    }

    /// `X(μ)` for `μ ∈ (0, 1)` from the table, falling back to the exact path
    /// outside the tabulated range.
    pub fn x_at(&self, mu: T) -> Result<T> {
        match self.table.w(mu) {
            Some(w) => Ok(boundary_x(mu, w)),
            None => self.x_boundary(mu),
        }
    }

    /// `(X(-0), X(+0)) = (-exp(W(0) + 1), exp(W(0) + 1))`.
    pub fn x_at_zero(&self) -> (T, T) {
        let v = (self.w0 + T::one()).exp();
        (-v, v)
    }

    /// `X(±0)` by Richardson extrapolation of `X(±h)`, `X(±h/2)`.
    pub fn x_at_zero_extrapolated(&self, h: T) -> Result<(T, T)> {
        let half = h * lit(0.5);
        let two = lit::<T>(2.0);
        let minus = two * self.x_boundary(-half)? - self.x_boundary(-h)?;
        let plus = two * self.x_boundary(half)? - self.x_boundary(h)?;
        Ok((minus, plus))
    }

    /// `|5λ(z) - X(z)X(-z)| / max(1, |5λ(z)|)`.
    pub fn factorization_residual(&self, z: Complex<T>) -> Result<T> {
        let five = lit::<T>(5.0);
        let lhs = lambda_w(z)? * five;
        let rhs = self.x_of_z(z)? * self.x_of_z(-z)?;
        Ok((lhs - rhs).norm() / lhs.norm().max(T::one()))
    }

    /// `|1/X(z) - (z - V₁ - (1/π) ∫_0^1 sin ζ(τ)/(X(τ)(τ - z)) dτ)|`.
    pub fn inverse_x_representation_check(&self, z: Complex<T>) -> Result<T> {
        Self::check_off_cut(z)?;
        let integral = self.cauchy(|t| zeta(t).sin() / self.x_or_nan(t), z)?;
        let rhs = z - Complex::new(self.v1, T::zero()) - integral;
        Ok((self.x_of_z(z)?.inv() - rhs).norm())
    }

    /// `|X(z) - (1/π) ∫_0^1 X(τ) sin ζ(τ)/(τ - z) dτ|`.
    pub fn x_representation_check(&self, z: Complex<T>) -> Result<T> {
        Self::check_off_cut(z)?;
        let integral = self.cauchy(|t| self.x_or_nan(t) * zeta(t).sin(), z)?;
        Ok((self.x_of_z(z)? - integral).norm())
    }

    /// Residual of `X(μ) cos ζ(μ) = Vp (1/π) ∫_0^1 X(τ) sin ζ(τ)/(τ - μ) dτ` on `(0, 1)`.
    pub fn boundary_identity_residual(&self, mu: T) -> Result<T> {
        let rhs = self
            .quad
            .principal_value(|t| self.x_or_nan(t) * zeta(t).sin() / T::PI(), T::zero(), T::one(), mu)?
            .value;
        Ok((self.x_at(mu)? * zeta(mu).cos() - rhs).abs())
    }

    /// Table lookup inside quadrature closures; quadrature nodes are interior,
    /// so failure only signals a broken table and propagates as NaN.
    pub(crate) fn x_or_nan(&self, t: T) -> T {
        self.x_at(t).unwrap_or_else(|_| T::nan())
    }
}

fn build_table<T: Real>(quad: &Integrator<T>) -> Result<BoundaryTable<T>> {
    let cheb = Chebyshev::<T>::new(PANEL_NODES);
    let half = lit::<T>(0.5);
    let mut spans = Vec::with_capacity(2 * TABLE_LEVELS);
    let mut d = half;
    for _ in 0..TABLE_LEVELS {
        spans.push((d * half, d, false));
        spans.push((T::one() - d, T::one() - d * half, true));
        d = d * half;
    }
    let g = |t: T| reduced_theta(t) / T::PI();
    let panels: Vec<(bool, Panel<T>)> = spans
        .into_par_iter()
        .map(|(a, b, right)| {
            let nodes: Vec<T> = cheb
                .nodes
                .iter()
                .map(|&x| (a + b) * half + (b - a) * half * x)
                .collect();
            let w = nodes
                .iter()
                .map(|&mu| quad.principal_value(g, T::zero(), T::one(), mu).map(|e| e.value))
                .collect::<Result<Vec<T>>>()?;
            Ok((right, Panel { a, b, nodes, w }))
        })
        .collect::<Result<Vec<_>>>()?;
    let (right, left): (Vec<_>, Vec<_>) = panels.into_iter().partition(|(r, _)| *r);
    let left: Vec<Panel<T>> = left.into_iter().map(|(_, p)| p).collect();
    let right: Vec<Panel<T>> = right.into_iter().map(|(_, p)| p).collect();
    let lo = left.last().expect("non-empty table").a;
    let hi = right.last().expect("non-empty table").b;
    Ok(BoundaryTable {
        cheb,
        left,
        right,
        lo,
        hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use num_complex::Complex64;
    use std::sync::OnceLock;

    fn xf() -> &'static XFunction<f64> {
        static X: OnceLock<XFunction<f64>> = OnceLock::new();
        X.get_or_init(|| XFunction::new().unwrap())
    }

    #[test]
    fn endpoint_limits_are_root_five() {
        let (m, p) = xf().x_at_zero();
        assert_relative_eq!(p, 5f64.sqrt(), max_relative = 1e-10);
        assert_relative_eq!(m, -5f64.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn v1_value() {
        assert_abs_diff_eq!(xf().v1(), 0.582, epsilon = 1e-3);
    }

    #[test]
    fn table_matches_exact_boundary() {
        let x = xf();
        for &mu in &[1e-9, 1e-4, 0.013, 0.2, 0.5, 0.77, 0.9999, 1.0 - 1e-9] {
            let exact = x.x_boundary(mu).unwrap();
            let fast = x.x_at(mu).unwrap();
            assert_relative_eq!(fast, exact, max_relative = 1e-11);
        }
    }

    #[test]
    fn table_samples_are_positive_and_ordered() {
        let s = xf().table().samples();
        assert_eq!(s.len(), 2 * TABLE_LEVELS * PANEL_NODES);
        assert!(s.windows(2).all(|w| w[0].tau < w[1].tau));
        assert!(s
            .iter()
            .all(|r| r.x > 0.0 && r.zeta < 0.0 && r.zeta > -std::f64::consts::PI));
    }

    #[test]
    fn split_and_direct_v_agree() {
        let x = xf();
        for z in [
            Complex64::new(2.0, 0.0),
            Complex64::new(-0.5, 0.3),
            Complex64::new(0.4, 0.2),
        ] {
            let a = x.v_of_z(z).unwrap();
            let b = x.v_of_z_direct(z).unwrap();
            assert!((a - b).norm() < 1e-10, "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn shifted_representation_agrees() {
        let x = xf();
        for z in [
            Complex64::new(3.0, 1.0),
            Complex64::new(-0.2, -0.7),
            Complex64::new(0.5, 0.01),
        ] {
            let a = x.x_of_z(z).unwrap();
            let b = x.x_of_z_shifted(z).unwrap();
            assert!((a - b).norm() < 1e-9 * a.norm(), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn off_cut_negative_axis_matches_boundary() {
        let x = xf();
        let a = x.x_of_z(Complex64::new(-0.4, 0.0)).unwrap();
        let b = x.x_boundary(-0.4).unwrap();
        assert_relative_eq!(a.re, b, max_relative = 1e-11);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn near_cut_points_are_refused() {
        let x = xf();
        assert!(matches!(x.x_of_z(Complex64::new(0.5, 1e-8)), Err(Error::OnCut { .. })));
        assert!(x.x_of_z(Complex64::new(1.5, 0.0)).is_ok());
    }

    #[test]
    fn factorization_examples() {
        let x = xf();
        assert!(x.factorization_residual(Complex64::new(1.5, 0.5)).unwrap() < 1e-8);
        assert!(x.factorization_residual(Complex64::new(10.0, 0.0)).unwrap() < 1e-10);
        let r1 = x.factorization_residual(Complex64::new(0.0, -2.0)).unwrap();
        let r2 = x.factorization_residual(Complex64::new(0.0, 2.0)).unwrap();
        assert!(r1 < 1e-8);
        assert_abs_diff_eq!(r1, r2, epsilon = 1e-12);
    }

    #[test]
    fn integral_representations() {
        let x = xf();
        assert!(x.inverse_x_representation_check(Complex64::new(-1.0, 0.0)).unwrap() < 1e-8);
        assert!(x.inverse_x_representation_check(Complex64::new(5.0, 0.0)).unwrap() < 1e-9);
        assert!(x.x_representation_check(Complex64::new(0.3, 0.4)).unwrap() < 1e-9);
    }

    #[test]
    fn boundary_cos_identity() {
        assert!(xf().boundary_identity_residual(0.3).unwrap() < 1e-9);
    }

    #[test]
    fn far_field_behaviour() {
        let x = xf();
        let z = Complex64::new(1e4, 0.0);
        let v = x.v_of_z(z).unwrap();
        assert_relative_eq!((z * v).re, x.v1(), max_relative = 1e-3);
        let xz = x.x_of_z(z).unwrap();
        assert_relative_eq!((z * xz).re, 1.0, max_relative = 1e-3);
    }

    #[test]
    fn conjugate_symmetry() {
        let x = xf();
        let z = Complex64::new(0.7, 0.9);
        let a = x.v_of_z(z).unwrap();
        let b = x.v_of_z(z.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-13);
    }

    #[test]
    fn extrapolated_zero_limit() {
        let x = xf();
        let (m, p) = x.x_at_zero();
        let (me, pe) = x.x_at_zero_extrapolated(1e-6).unwrap();
        assert_relative_eq!(me, m, max_relative = 1e-4);
        assert_relative_eq!(pe, p, max_relative = 1e-4);
    }
}
