//! Fermi–Dirac integrals of the linearized problem:
//!
//! ```text
//! l0(α) = ∫_0^∞ ln(1 + e^{α - C²}) dC
//! l1(α) = ∫_0^∞ C ln(1 + e^{α - C²}) dC
//! gn(α) = ∫_0^∞ C^n e^{C² - α} / (1 + e^{C² - α})² dC
//! ```
//!
//! The weight of `gn` is read as `C^n`; with that reading `g5 = 2 l1` and
//! `g4 = (3/4) l0`, the normalisations used by the mass-velocity functional.
//!
//! For `|α| <= 60` the integrals are evaluated by quadrature, truncated at
//! `C_max = sqrt(max(α, 0) + 46)`. Below that range the classical single-term
//! asymptotes are used, above it the Sommerfeld expansion.
//!
//! In the classical limit (`Alpha::Classical`) each function returns the
//! coefficient of `e^α` in its leading asymptote, e.g. `l0 -> sqrt(π)/2`, so
//! ratios such as `l0/l1` keep their limiting values.

use crate::error::{Error, Result};
use crate::quadrature::{Integrator, QuadratureConfig};
use crate::scalar::{lit, Real};

/// Reduced chemical potential `α = μ/kT`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha<T> {
    Finite(T),
    /// `α -> -∞`, the Boltzmann gas.
    Classical,
}

impl<T: Real> Alpha<T> {
    pub fn new(value: T) -> Result<Self> {
        if value.is_finite() {
            Ok(Alpha::Finite(value))
        } else {
            Err(Error::OutOfRange {
                value: crate::scalar::to_f64(value),
                range: "finite reduced chemical potential",
            })
        }
    }

    pub fn value(self) -> Option<T> {
        match self {
            Alpha::Finite(a) => Some(a),
            Alpha::Classical => None,
        }
    }
}

/// Largest `|α|` evaluated by quadrature.
pub const QUADRATURE_RANGE: f64 = 60.0;
/// Integrand tail cut-off, `e^{-46} ≈ 1e-20`.
const TAIL_EXPONENT: f64 = 46.0;
pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiTableRow<T> {
    pub alpha: Alpha<T>,
    pub l0: T,
    pub l1: T,
    pub g4: T,
    pub g5: T,
}

#[derive(Debug, Clone)]
pub struct FermiIntegrals<T> {
    quad: Integrator<T>,
}

impl<T: Real> Default for FermiIntegrals<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        let cfg = QuadratureConfig {
            rel_tol: (eps * lit(500.0)).max(lit(1e-13)),
            abs_tol: (eps * lit(5.0)).max(lit(1e-15)),
            max_subdivisions: 200,
            base_order: 31,
        };
        Self::new(cfg).expect("valid default configuration")
    }
}

enum Branch<T> {
    Classical,
    Quadrature(T),
    Degenerate(T),
}

impl<T: Real> FermiIntegrals<T> {
    pub fn new(cfg: QuadratureConfig<T>) -> Result<Self> {
        Ok(Self {
            quad: Integrator::new(cfg)?,
        })
    }

    fn branch(alpha: Alpha<T>) -> Branch<T> {
        let range = lit::<T>(QUADRATURE_RANGE);
        match alpha {
            Alpha::Classical => Branch::Classical,
            Alpha::Finite(a) if a < -range => Branch::Classical,
            Alpha::Finite(a) if a > range => Branch::Degenerate(a),
            Alpha::Finite(a) => Branch::Quadrature(a),
        }
    }

    /// Multiplies a classical-limit coefficient by `e^α` unless the limit flag is set.
    fn scale(alpha: Alpha<T>, coefficient: T) -> T {
        match alpha {
            Alpha::Classical => coefficient,
            Alpha::Finite(a) => coefficient * a.exp(),
        }
    }

    fn cutoff(a: T) -> T {
        (a.max(T::zero()) + lit(TAIL_EXPONENT)).sqrt()
    }

    /// `∫_0^{C_max} C^k ln(1 + e^{α - C²}) dC`, pre-scaled by `e^{-α}` when `α <= 0`.
    fn log_moment(&self, a: T, k: i32) -> Result<T> {
        let cmax = Self::cutoff(a);
        if a <= T::zero() {
            let ea = a.exp();
            let est = self.quad.integrate(
                |c: T| {
                    let u = ea * (-c * c).exp();
                    c.powi(k) * u.ln_1p() / ea
                },
                T::zero(),
                cmax,
            )?;
            Ok(est.value * ea)
        } else {
            let est = self.quad.integrate_with_breaks(
                |c: T| {
                    let y = a - c * c;
                    let ln = if y > T::zero() {
                        y + (-y).exp().ln_1p()
                    } else {
                        y.exp().ln_1p()
                    };
                    c.powi(k) * ln
                },
                T::zero(),
                cmax,
                &[a.sqrt()],
            )?;
            Ok(est.value)
        }
    }

    pub fn l0(&self, alpha: Alpha<T>) -> Result<T> {
        match Self::branch(alpha) {
            Branch::Classical => Ok(Self::scale(alpha, T::PI().sqrt() * lit(0.5))),
            Branch::Quadrature(a) => self.log_moment(a, 0),
            Branch::Degenerate(a) => {
                let pi2 = T::PI() * T::PI();
                Ok(lit::<T>(2.0 / 3.0) * a.powf(lit(1.5))
                    + pi2 / lit(12.0) * a.powf(lit(-0.5))
                    + lit::<T>(7.0 / 960.0) * pi2 * pi2 * a.powf(lit(-2.5))
                    + lit::<T>(31.0 * 105.0 / (15120.0 * 32.0)) * pi2 * pi2 * pi2 * a.powf(lit(-4.5)))
            }
        }
    }

    pub fn l1(&self, alpha: Alpha<T>) -> Result<T> {
        match Self::branch(alpha) {
            Branch::Classical => Ok(Self::scale(alpha, lit(0.5))),
            Branch::Quadrature(a) => self.log_moment(a, 1),
            Branch::Degenerate(a) => Ok(a * a / lit(4.0) + T::PI() * T::PI() / lit(12.0)),
        }
    }

    /// `gn(α)` for `n` in `0..=8`.
    pub fn g_n(&self, alpha: Alpha<T>, n: usize) -> Result<T> {
        if n > MAX_ORDER {
            return Err(Error::UnsupportedOrder(n));
        }
        match Self::branch(alpha) {
            Branch::Classical => Ok(Self::scale(alpha, half_integer_gamma::<T>(n + 1) * lit(0.5))),
            Branch::Quadrature(a) => {
                let k = n as i32;
                let cmax = Self::cutoff(a);
                if a <= T::zero() {
                    let ea = a.exp();
                    let est = self.quad.integrate(
                        |c: T| {
                            let e = (-c * c).exp();
                            let u = ea * e;
                            c.powi(k) * e / ((T::one() + u) * (T::one() + u))
                        },
                        T::zero(),
                        cmax,
                    )?;
                    Ok(est.value * ea)
                } else {
                    let est = self.quad.integrate_with_breaks(
                        |c: T| {
                            let ch = ((c * c - a) * lit(0.5)).cosh();
                            c.powi(k) / (lit::<T>(4.0) * ch * ch)
                        },
                        T::zero(),
                        cmax,
                        &[a.sqrt()],
                    )?;
                    Ok(est.value)
                }
            }
            Branch::Degenerate(a) => {
                // (1/2) Σ c_j Φ^{(2j)}(α), Φ(E) = E^p
                let p = lit::<T>((n as f64 - 1.0) / 2.0);
                let pi2 = T::PI() * T::PI();
                let coeffs = [
                    T::one(),
                    pi2 / lit(6.0),
                    lit::<T>(7.0 / 360.0) * pi2 * pi2,
                    lit::<T>(31.0 / 15120.0) * pi2 * pi2 * pi2,
                ];
                let mut falling = T::one();
                let mut sum = T::zero();
                for (j, &c) in coeffs.iter().enumerate() {
                    if j > 0 {
                        let m = lit::<T>(2.0 * j as f64);
                        falling = falling * (p - m + lit(2.0)) * (p - m + T::one());
                    }
                    sum = sum + c * falling * a.powf(p - lit(2.0 * j as f64));
                }
                Ok(sum * lit(0.5))
            }
        }
    }

    pub fn row(&self, alpha: Alpha<T>) -> Result<FermiTableRow<T>> {
        Ok(FermiTableRow {
            alpha,
            l0: self.l0(alpha)?,
            l1: self.l1(alpha)?,
            g4: self.g_n(alpha, 4)?,
            g5: self.g_n(alpha, 5)?,
        })
    }

    /// `l0(α) / l1(α)`, finite in both limits (`sqrt(π)` classically).
    pub fn l0_over_l1(&self, alpha: Alpha<T>) -> Result<T> {
        Ok(self.l0(alpha)? / self.l1(alpha)?)
    }
}

/// `Γ(m/2)` for positive integer `m`.
fn half_integer_gamma<T: Real>(m: usize) -> T {
    let (mut g, mut x) = if m.is_multiple_of(2) {
        (T::one(), T::one())
    } else {
        (T::PI().sqrt(), lit(0.5))
    };
    let target = lit::<T>(m as f64 / 2.0);
    while x < target {
        g = g * x;
        x = x + T::one();
    }
    g
}
