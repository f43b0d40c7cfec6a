//! Case and Williams dispersion functions.
//!
//! ```text
//! λc(z) = 1 + (z/2) ∫_{-1}^{1} dτ/(τ - z)             = 1 + (z/2) ln((z-1)/(z+1))
//! λ(z)  = 1 + (3z/4) ∫_{-1}^{1} (1 - u²) du/(u - z)   = -1/2 + (3/2)(1 - z²) λc(z)
//! ```
//!
//! On the cut `(-1, 1)` the boundary values are `λ±(μ) = λ(μ) ± i(3π/4)μ(1 - μ²)`
//! with `λ(μ)` the principal-value function. `θ(μ) = arg λ+(μ)` is taken from
//! the two-argument arctangent, which is continuous on `(0, 1)` because the
//! imaginary part is positive there; `ζ(μ) = θ(μ) - π`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Default distance kept from the cut endpoints and from the cut itself.
pub const DEFAULT_GUARD: f64 = 1e-12;
/// `|z|` beyond which `lambda_w` switches to its Laurent series.
const LAURENT_RADIUS: f64 = 4.0;

/// Limit of `λ(μ)` at `μ -> ±1`.
pub const LAMBDA_AT_ENDPOINT: f64 = -0.5;

/// Spectral variable strictly inside the cut.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CutPoint<T>(T);

impl<T: Real> CutPoint<T> {
    pub fn new(mu: T) -> Result<Self> {
        Self::with_guard(mu, lit(DEFAULT_GUARD))
    }

    pub fn with_guard(mu: T, guard: T) -> Result<Self> {
        if mu.is_finite() && T::one() - mu.abs() > guard {
            Ok(Self(mu))
        } else {
            Err(Error::OutOfRange {
                value: to_f64(mu),
                range: "(-1, 1) away from the endpoints",
            })
        }
    }

    pub fn mu(self) -> T {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionBoundary<T> {
    pub mu: CutPoint<T>,
    /// Principal-value `λ(μ)`, the real part of both boundary values.
    pub lambda_pv: T,
    /// `(3π/4) μ (1 - μ²)`, the imaginary part of `λ+(μ)`.
    pub im_part: T,
    pub theta: T,
    pub zeta: T,
}

impl<T: Real> DispersionBoundary<T> {
    pub fn lambda_plus(&self) -> Complex<T> {
        Complex::new(self.lambda_pv, self.im_part)
    }

    pub fn lambda_minus(&self) -> Complex<T> {
        Complex::new(self.lambda_pv, -self.im_part)
    }

    /// `|λ±|²`.
    pub fn modulus_squared(&self) -> T {
        self.lambda_pv * self.lambda_pv + self.im_part * self.im_part
    }
}

/// Principal-value `λ(μ) = -1/2 + (3/2)(1 - μ²)(1 + (μ/2) ln((1-μ)/(1+μ)))` for `|μ| <= 1`.
pub fn lambda_real<T: Real>(mu: T) -> T {
    let one = T::one();
    let s = one - mu * mu;
    if s <= T::zero() {
        return lit(LAMBDA_AT_ENDPOINT);
    }
    // ln((1-μ)/(1+μ)) = ln_1p(-μ) - ln_1p(μ)
    let log_ratio = (-mu).ln_1p() - mu.ln_1p();
    lit::<T>(-0.5) + lit::<T>(1.5) * s * (one + mu * lit(0.5) * log_ratio)
}

/// `Im λ+(μ) = (3π/4) μ (1 - μ²)`.
pub fn im_part<T: Real>(mu: T) -> T {
    lit::<T>(0.75) * T::PI() * mu * (T::one() - mu * mu)
}

/// `θ(μ) = arg λ+(μ)` on `[-1, 1]`, with `θ(0) = 0` and `θ(±1) = ±π`.
pub fn theta<T: Real>(mu: T) -> T {
    if mu >= T::one() {
        return T::PI();
    }
    if mu <= -T::one() {
        return -T::PI();
    }
    im_part(mu).atan2(lambda_real(mu))
}

/// `ζ(μ) = θ(μ) - π`, in `(-π, 0)` on `(0, 1)`.
pub fn zeta<T: Real>(mu: T) -> T {
    theta(mu) - T::PI()
}

pub fn boundary<T: Real>(mu: CutPoint<T>) -> DispersionBoundary<T> {
    let m = mu.mu();
    let lambda_pv = lambda_real(m);
    let im = im_part(m);
    let theta = im.atan2(lambda_pv);
    DispersionBoundary {
        mu,
        lambda_pv,
        im_part: im,
        theta,
        zeta: theta - T::PI(),
    }
}

fn distance_to_cut<T: Real>(z: Complex<T>) -> T {
    let one = T::one();
    let dx = if z.re > one {
        z.re - one
    } else if z.re < -one {
        -one - z.re
    } else {
        T::zero()
    };
    dx.hypot(z.im)
}

fn check_off_cut<T: Real>(z: Complex<T>) -> Result<()> {
    if distance_to_cut(z) < lit(DEFAULT_GUARD) {
        Err(Error::OnCut {
            re: to_f64(z.re),
            im: to_f64(z.im),
        })
    } else {
        Ok(())
    }
}

/// Case dispersion function off the cut.
pub fn lambda_c<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    check_off_cut(z)?;
    let one = Complex::new(T::one(), T::zero());
    Ok(one + z * lit::<T>(0.5) * ((z - one) / (z + one)).ln())
}

/// Williams dispersion function off the cut.
pub fn lambda_w<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    check_off_cut(z)?;
    if z.norm() >= lit(LAURENT_RADIUS) {
        return Ok(lambda_w_laurent_converged(z));
    }
    let one = Complex::new(T::one(), T::zero());
    let lc = one + z * lit::<T>(0.5) * ((z - one) / (z + one)).ln();
    Ok((one - z * z) * lc * lit::<T>(1.5) - one * lit::<T>(0.5))
}

/// Partial sum `-Σ_{n=1}^{terms} 1/((2n+1) z^{2n})` of the Case function at `|z| > 1`.
pub fn lambda_c_laurent<T: Real>(z: Complex<T>, terms: usize) -> Complex<T> {
    let w = (z * z).inv();
    let mut pow = w;
    let mut sum = Complex::new(T::zero(), T::zero());
    for n in 1..=terms {
        sum = sum - pow / lit::<T>(2.0 * n as f64 + 1.0);
        pow = pow * w;
    }
    sum
}

/// Partial sum `-Σ_{n=1}^{terms} 3/((2n+1)(2n+3) z^{2n})` of the Williams function at `|z| > 1`.
pub fn lambda_w_laurent<T: Real>(z: Complex<T>, terms: usize) -> Complex<T> {
    let w = (z * z).inv();
    let mut pow = w;
    let mut sum = Complex::new(T::zero(), T::zero());
    for n in 1..=terms {
        let nf = n as f64;
        sum = sum - pow * lit::<T>(3.0 / ((2.0 * nf + 1.0) * (2.0 * nf + 3.0)));
        pow = pow * w;
    }
    sum
}

fn lambda_w_laurent_converged<T: Real>(z: Complex<T>) -> Complex<T> {
    let w = (z * z).inv();
    let mut pow = w;
    let mut sum = Complex::new(T::zero(), T::zero());
    for n in 1..=400 {
        let nf = n as f64;
        let term = pow * lit::<T>(3.0 / ((2.0 * nf + 1.0) * (2.0 * nf + 3.0)));
        sum = sum - term;
        if term.norm() <= T::epsilon() * sum.norm() {
            break;
        }
        pow = pow * w;
    }
    sum
}

/// `G(μ) = λ+(μ)/λ-(μ)`, unimodular on the cut; the endpoints map to `1`.
pub fn riemann_coefficient<T: Real>(mu: T) -> Complex<T> {
    if mu.abs() >= T::one() {
        return Complex::new(T::one(), T::zero());
    }
    let lp = Complex::new(lambda_real(mu), im_part(mu));
    lp / lp.conj()
}

/// Winding number of `G` along `(-1, 1)`, counted from `grid_size` equal steps.
pub fn winding_count<T: Real>(grid_size: usize) -> Result<i64> {
    winding_over(-T::one(), T::one(), grid_size)
}

/// Winding number of `G(μ)` as `μ` runs from `from` to `to` (both in `[-1, 1]`).
/// Reversing the direction flips the sign.
pub fn winding_over<T: Real>(from: T, to: T, grid_size: usize) -> Result<i64> {
    if grid_size < 100 {
        return Err(Error::InvalidConfig("winding grid needs at least 100 steps".into()));
    }
    if from.abs() > T::one() || to.abs() > T::one() {
        return Err(Error::OutOfRange {
            value: to_f64(if from.abs() > T::one() { from } else { to }),
            range: "[-1, 1]",
        });
    }
    let step = (to - from) / lit(grid_size as f64);
    let mut prev = riemann_coefficient(from);
    let mut total = T::zero();
    for i in 1..=grid_size {
        let mu = if i == grid_size {
            to
        } else {
            from + step * lit(i as f64)
        };
        let g = riemann_coefficient(mu);
        total = total + (g / prev).arg();
        prev = g;
    }
    let winding = total / T::TAU();
    let rounded = winding.round();
    if (winding - rounded).abs() > lit(1e-3) {
        return Err(Error::GridTooCoarse {
            winding: to_f64(winding),
        });
    }
    Ok(rounded.to_i64().expect("winding fits in i64"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Integrator;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn lambda_real_special_values() {
        assert_eq!(lambda_real(0.0f64), 1.0);
        assert_eq!(lambda_real(1.0f64), -0.5);
        assert_abs_diff_eq!(lambda_real(1.0 - 1e-12f64), -0.5, epsilon = 1e-9);
        let expected = -0.5 + 1.5 * 0.75 * (1.0 + 0.25 * (1.0f64 / 3.0).ln());
        assert_relative_eq!(lambda_real(0.5f64), expected, max_relative = 1e-15);
    }

    #[test]
    fn lambda_real_matches_defining_principal_value() {
        // λ(μ) = 1 + (3μ/4) Vp ∫ (1 - τ²)/(τ - μ) dτ
        let q = Integrator::<f64>::default();
        for i in 1..100 {
            let mu = -0.99 + 1.98 * i as f64 / 100.0;
            if mu.abs() < 1e-9 {
                continue;
            }
            let pv = q.principal_value(|t| 1.0 - t * t, -1.0, 1.0, mu).unwrap().value;
            assert_abs_diff_eq!(1.0 + 0.75 * mu * pv, lambda_real(mu), epsilon = 1e-9);
        }
    }

    #[test]
    fn case_function_values() {
        let v = lambda_c(Complex64::new(2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 + (1.0f64 / 3.0).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        let z = Complex64::new(0.0, 3.0);
        let closed = lambda_c(z).unwrap();
        let series = lambda_c_laurent(z, 40);
        assert!((closed - series).norm() < 1e-10);
    }

    #[test]
    fn williams_function_far_field() {
        for r in [10.0, 100.0, 1e4] {
            let z = Complex64::new(r, 0.3 * r);
            let v = lambda_w(z).unwrap();
            // next Laurent term is -3/(35 z²)
            assert!((z * z * v + 0.2).norm() < 0.1 / z.norm_sqr());
        }
        let z = Complex64::new(3.0, 0.0);
        let closed = lambda_w(z).unwrap();
        assert!((closed - lambda_w_laurent(z, 8)).norm() < 1e-8);
    }

    #[test]
    fn on_cut_rejected() {
        assert!(matches!(lambda_w(Complex64::new(0.3, 0.0)), Err(Error::OnCut { .. })));
        assert!(matches!(lambda_c(Complex64::new(-1.0, 0.0)), Err(Error::OnCut { .. })));
        assert!(lambda_w(Complex64::new(0.3, 1e-6)).is_ok());
    }

    #[test]
    fn branch_is_continuous_on_circles() {
        for r in [1.05, 1.5, 3.0] {
            let n = 2000;
            let mut prev = lambda_w(Complex64::from_polar(r, 0.0)).unwrap();
            for k in 1..=n {
                let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64);
                let v = lambda_w(z).unwrap();
                assert!((v - prev).norm() < 0.05, "jump at r={r}, k={k}");
                prev = v;
            }
        }
    }

    #[test]
    fn boundary_limits() {
        let lo = boundary(CutPoint::new(1e-9f64).unwrap());
        assert_abs_diff_eq!(lo.theta, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(lo.zeta, -PI, epsilon = 1e-8);
        let hi = boundary(CutPoint::new(1.0 - 1e-9f64).unwrap());
        assert_abs_diff_eq!(hi.theta, PI, epsilon = 1e-7);
        assert_abs_diff_eq!(hi.zeta, 0.0, epsilon = 1e-7);
        assert!(CutPoint::new(1.0f64).is_err());
        assert!(CutPoint::new(-1.0 + 1e-13f64).is_err());
    }

    #[test]
    fn boundary_matches_limits_of_lambda_w() {
        for mu in [-0.7, -0.2, 0.1, 0.5, 0.9] {
            let b = boundary(CutPoint::new(mu).unwrap());
            let above = lambda_w(Complex64::new(mu, 1e-9)).unwrap();
            let below = lambda_w(Complex64::new(mu, -1e-9)).unwrap();
            assert!((above - b.lambda_plus()).norm() < 1e-7);
            assert!((below - b.lambda_minus()).norm() < 1e-7);
        }
    }

    #[test]
    fn theta_is_odd_and_crosses_half_pi_at_zero_of_lambda() {
        for i in 1..200 {
            let mu = i as f64 / 200.0;
            assert_abs_diff_eq!(theta(-mu), -theta(mu), epsilon = 1e-15);
        }
        // bisection for the zero of λ on (0, 1)
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if lambda_real(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_abs_diff_eq!(theta(lo), PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn winding_numbers() {
        assert_eq!(winding_count::<f64>(10_000).unwrap(), 2);
        assert_eq!(winding_over(0.0f64, 1.0, 10_000).unwrap(), 1);
        assert_eq!(winding_over(1.0f64, -1.0, 10_000).unwrap(), -2);
        assert_eq!(winding_count::<f64>(100).unwrap(), 2);
        assert!(matches!(winding_count::<f64>(10), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn coefficient_is_unimodular() {
        for i in 0..=1000 {
            let mu = -1.0 + 2.0 * i as f64 / 1000.0;
            assert_abs_diff_eq!(riemann_coefficient(mu).norm(), 1.0, epsilon = 1e-12);
        }
    }
}
