//! Expansion coefficients at infinity:
//!
//! ```text
//! V(z)   = V₁/z + V₂/z² + …,            V_n  = -(1/π) ∫_0^1 ζ(τ) τ^{n-1} dτ
//! X(z)   = 1/z + X₂/z² + X₃/z³ + …,     X_n  = -(1/π) ∫_0^1 X(τ) sin ζ(τ) τ^{n-1} dτ
//! 1/X(z) = z - V₁ + X₁*/z + X₂*/z² + …, X_n* =  (1/π) ∫_0^1 sin ζ(τ)/X(τ) τ^{n-1} dτ
//! ```
//!
//! Besides the moment integrals, each family has a series route. The
//! factorization `λ(z) = X(z)X(-z)/5` with
//! `λ(z) = -(1/(5z²)) Σ_m c_m z^{-2m}`, `c_m = 15/((2m+3)(2m+5))`, gives
//!
//! ```text
//! ln Σ_m c_m w^m = 2 Σ_k V_{2k} w^k,   w = 1/z²,
//! ```
//!
//! a rational recurrence for the even `V_n` (`V₂ = 3/14`, `V₄ = 43/588`,
//! `V₆ = 857/22638`). Odd `V_n` have no such closed form and always come from
//! the integrals. `X_n` and `X_n*` follow by exponentiating `±V(z)`.

use num_traits::{FromPrimitive, Num};

use crate::dispersion::zeta;
use crate::error::{Error, Result};
use crate::quadrature::Endpoint;
use crate::scalar::{lit, Real};
use crate::xfunction::XFunction;

/// Highest supported expansion order.
pub const MAX_ORDER: usize = 20;

/// Which evaluation path(s) a [`MomentTable`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Integral,
    Recurrence,
    Both,
}

/// A single evaluation path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Integral,
    Recurrence,
}

/// Coefficient lists; entry `i` holds index `n = i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<T> {
    pub v: Vec<T>,
    pub x: Vec<T>,
    pub x_star: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable<T> {
    pub order: usize,
    pub route: Route,
    pub integral: Option<Coefficients<T>>,
    pub recurrence: Option<Coefficients<T>>,
}

impl<T: Real> MomentTable<T> {
    pub fn compute(xf: &XFunction<T>, order: usize, route: Route) -> Result<Self> {
        check_order(order)?;
        let want = |m: Method| -> Result<Option<Coefficients<T>>> {
            Ok(Some(Coefficients {
                v: v_by(xf, order, m)?,
                x: x_coefficients(xf, order, m)?,
                x_star: x_star_coefficients(xf, order, m)?,
            }))
        };
        let (integral, recurrence) = match route {
            Route::Integral => (want(Method::Integral)?, None),
            Route::Recurrence => (None, want(Method::Recurrence)?),
            Route::Both => (want(Method::Integral)?, want(Method::Recurrence)?),
        };
        Ok(Self {
            order,
            route,
            integral,
            recurrence,
        })
    }

    /// The recurrence values when present, otherwise the integrals.
    pub fn primary(&self) -> &Coefficients<T> {
        self.recurrence
            .as_ref()
            .or(self.integral.as_ref())
            .expect("a table holds at least one route")
    }

    /// `V_n`, `n >= 1`.
    pub fn v(&self, n: usize) -> T {
        self.primary().v[n - 1]
    }

    pub fn x(&self, n: usize) -> T {
        self.primary().x[n - 1]
    }

    pub fn x_star(&self, n: usize) -> T {
        self.primary().x_star[n - 1]
    }

    /// Largest `|integral - recurrence|` over all entries, when both routes are held.
    pub fn max_route_difference(&self) -> Option<T> {
        let (a, b) = (self.integral.as_ref()?, self.recurrence.as_ref()?);
        let diff = |p: &[T], q: &[T]| p.iter().zip(q).map(|(&u, &v)| (u - v).abs()).fold(T::zero(), T::max);
        Some(diff(&a.v, &b.v).max(diff(&a.x, &b.x)).max(diff(&a.x_star, &b.x_star)))
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        Err(Error::UnsupportedOrder(order))
    } else {
        Ok(())
    }
}

/// `V_1 … V_order` from the moment integrals.
pub fn v_moments<T: Real>(xf: &XFunction<T>, order: usize) -> Result<Vec<T>> {
    check_order(order)?;
    moments_upto(xf, order)
}

fn moments_upto<T: Real>(xf: &XFunction<T>, order: usize) -> Result<Vec<T>> {
    (1..=order)
        .map(|n| {
            let k = (n - 1) as i32;
            let est = xf.integrator().integrate_graded(
                |t: T| zeta(t) * t.powi(k),
                T::zero(),
                T::one(),
                Endpoint::Regular,
                Endpoint::Logarithmic,
            )?;
            Ok(-est.value / T::PI())
        })
        .collect()
}

/// `V_1 … V_order`, even entries from the rational recurrence on the
/// recurrence route.
fn v_by<T: Real>(xf: &XFunction<T>, order: usize, method: Method) -> Result<Vec<T>> {
    let mut v = moments_upto(xf, order)?;
    if method == Method::Recurrence {
        let even: Vec<T> = even_v_series(order / 2);
        for (k, val) in even.into_iter().enumerate() {
            v[2 * k + 1] = val;
        }
    }
    Ok(v)
}

/// Even coefficients `[V₂, V₄, …, V_{2count}]` over any field, from
/// `ln Σ c_m w^m = 2 Σ V_{2k} w^k`.
pub fn even_v_series<F>(count: usize) -> Vec<F>
where
    F: Num + Clone + FromPrimitive,
{
    let int = |n: i64| F::from_i64(n).expect("small integers are representable");
    let c = |m: i64| int(15) / (int(2 * m + 3) * int(2 * m + 5));
    let mut v: Vec<F> = Vec::with_capacity(count);
    for m in 0..count as i64 {
        let mut acc = int(m + 1) * c(m + 1);
        for k in 1..=m {
            acc = acc - int(2 * k) * v[(k - 1) as usize].clone() * c(m + 1 - k);
        }
        v.push(acc / int(2 * (m + 1)));
    }
    v
}

/// `[V₂, V₄, V₆]` from the three explicit recurrences
/// `V₂ = 3/14`, `V₄ = (1/8)(20/21 - (12/7)V₂)`, `V₆ = (1/6)(5/11 - (10/21)V₂ - (12/7)V₄)`.
pub fn even_v_recurrences<F>() -> [F; 3]
where
    F: Num + Clone + FromPrimitive,
{
    let q = |a: i64, b: i64| F::from_i64(a).expect("small") / F::from_i64(b).expect("small");
    let v2 = q(3, 14);
    let v4 = q(1, 8) * (q(20, 21) - q(12, 7) * v2.clone());
    let v6 = q(1, 6) * (q(5, 11) - q(10, 21) * v2.clone() - q(12, 7) * v4.clone());
    [v2, v4, v6]
}

/// Coefficients `e_0 … e_len` of `exp(Σ_{n>=1} a_n w^n)`, with `a[0] = a_1`.
fn exp_series<T: Real>(a: &[T], len: usize) -> Vec<T> {
    let mut e = vec![T::one()];
    for k in 1..=len {
        let mut acc = T::zero();
        for j in 1..=k.min(a.len()) {
            acc = acc + lit::<T>(j as f64) * a[j - 1] * e[k - j];
        }
        e.push(acc / lit(k as f64));
    }
    e
}

/// `X_1 … X_order`.
pub fn x_coefficients<T: Real>(xf: &XFunction<T>, order: usize, method: Method) -> Result<Vec<T>> {
    check_order(order)?;
    match method {
        Method::Recurrence => {
            let v = v_by(xf, order, Method::Recurrence)?;
            Ok(exp_series(&v, order - 1))
        }
        Method::Integral => (1..=order)
            .map(|n| weighted_moment(xf, n, |t| xf.x_or_nan(t) * zeta(t).sin()).map(|m| -m))
            .collect(),
    }
}

/// `X_1* … X_order*`.
pub fn x_star_coefficients<T: Real>(xf: &XFunction<T>, order: usize, method: Method) -> Result<Vec<T>> {
    check_order(order)?;
    match method {
        Method::Recurrence => {
            let v: Vec<T> = v_by(xf, (order + 1).min(MAX_ORDER + 1), Method::Recurrence)?
                .into_iter()
                .map(|x| -x)
                .collect();
            Ok(exp_series(&v, order + 1)[2..].to_vec())
        }
        Method::Integral => (1..=order)
            .map(|n| weighted_moment(xf, n, |t| zeta(t).sin() / xf.x_or_nan(t)))
            .collect(),
    }
}

/// `(1/π) ∫_0^1 f(τ) τ^{n-1} dτ`.
fn weighted_moment<T: Real, F: Fn(T) -> T>(xf: &XFunction<T>, n: usize, f: F) -> Result<T> {
    let k = (n - 1) as i32;
    let est = xf.integrator().integrate_graded(
        |t: T| f(t) * t.powi(k),
        T::zero(),
        T::one(),
        Endpoint::Logarithmic,
        Endpoint::Logarithmic,
    )?;
    Ok(est.value / T::PI())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use std::sync::OnceLock;

    fn table() -> &'static MomentTable<f64> {
        static T: OnceLock<MomentTable<f64>> = OnceLock::new();
        T.get_or_init(|| {
            let xf = XFunction::new().unwrap();
            MomentTable::compute(&xf, 12, Route::Both).unwrap()
        })
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn exact_even_recurrences() {
        let [v2, v4, v6] = even_v_recurrences::<BigRational>();
        assert_eq!(v2, rat(3, 14));
        assert_eq!(v4, rat(43, 588));
        assert_eq!(v6, rat(857, 22638));
        let series = even_v_series::<BigRational>(3);
        assert_eq!(series, vec![v2, v4, v6]);
    }

    #[test]
    fn published_values() {
        let t = table();
        assert_abs_diff_eq!(t.v(1), 0.582, epsilon = 1e-3);
        assert_abs_diff_eq!(t.v(3), 0.115, epsilon = 1e-3);
        assert_abs_diff_eq!(t.v(5), 0.051, epsilon = 1e-3);
        assert_abs_diff_eq!(t.x(2), 0.582, epsilon = 1e-3);
        assert_abs_diff_eq!(t.x(3), 0.384, epsilon = 1e-3);
        assert_abs_diff_eq!(t.x_star(1), -0.045, epsilon = 1e-3);
        assert_abs_diff_eq!(t.x_star(2), -0.023, epsilon = 1e-3);
        assert_abs_diff_eq!(t.x_star(3), -0.015, epsilon = 1e-3);
    }

    #[test]
    fn integral_route_even_moments_are_rational() {
        let v = &table().integral.as_ref().unwrap().v;
        assert_abs_diff_eq!(v[1], 3.0 / 14.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v[3], 43.0 / 588.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v[5], 857.0 / 22638.0, epsilon = 1e-10);
    }

    #[test]
    fn routes_agree() {
        let t = table();
        assert!(t.max_route_difference().unwrap() < 1e-9);
        assert_abs_diff_eq!(t.integral.as_ref().unwrap().x[0], 1.0, epsilon = 1e-10);
        assert_eq!(t.recurrence.as_ref().unwrap().x[1], t.v(1));
    }

    #[test]
    fn v_positive_and_decreasing() {
        let v = &table().primary().v;
        assert!(v.iter().all(|&x| x > 0.0));
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn order_limits() {
        let xf = XFunction::<f64>::new().unwrap();
        assert!(matches!(v_moments(&xf, 0), Err(Error::UnsupportedOrder(0))));
        assert!(matches!(v_moments(&xf, 21), Err(Error::UnsupportedOrder(21))));
    }

    #[test]
    fn x_star_matches_displayed_combinations() {
        let t = table();
        let v = |n| t.v(n);
        assert_abs_diff_eq!(t.x_star(1), -v(2) + v(1).powi(2) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.x_star(2), -v(3) + v(1) * v(2) - v(1).powi(3) / 6.0, epsilon = 1e-14);
        let x3 = -v(4) + v(3) * v(1) + v(2).powi(2) / 2.0 - v(2) * v(1).powi(2) / 2.0 + v(1).powi(4) / 24.0;
        assert_abs_diff_eq!(t.x_star(3), x3, epsilon = 1e-14);
        assert_abs_diff_eq!(t.x(3), v(2) + v(1).powi(2) / 2.0, epsilon = 1e-14);
    }
}
