//! One-dimensional adaptive Gauss–Legendre integration.
//!
//! Each panel is integrated with an `n`-point Gauss–Legendre rule and again on
//! its two halves; the difference is the panel error estimate. Panels with the
//! largest estimate are bisected until the total estimate meets
//! `max(abs_tol, rel_tol * |I|)` or the subdivision budget runs out.
//!
//! Cauchy principal values are computed by subtracting the pole value,
//!
//! ```text
//! Vp ∫_a^b f(t)/(t - p) dt = ∫_a^b (f(t) - f(p))/(t - p) dt + f(p) ln((b - p)/(p - a)),
//! ```
//!
//! which stays accurate when the pole sits close to an endpoint.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, QuadValue, Real};

/// Known behaviour of an integrand at an interval endpoint. Non-regular
/// endpoints get an initial set of geometrically shrinking panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Endpoint {
    #[default]
    Regular,
    Logarithmic,
    VanishingLinearly,
}

impl Endpoint {
    fn needs_grading(self) -> bool {
        !matches!(self, Endpoint::Regular)
    }
}

/// Number of halving levels used when grading toward a flagged endpoint.
const GRADING_LEVELS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Maximum number of panel bisections.
    pub max_subdivisions: usize,
    /// Gauss points per panel.
    pub base_order: usize,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: lit(1e-10),
            abs_tol: lit(1e-12),
            max_subdivisions: 60,
            base_order: 31,
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn with_tolerances(rel_tol: T, abs_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) || !(self.abs_tol > T::zero()) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.base_order < 2 {
            return Err(Error::InvalidConfig("base_order must be at least 2".into()));
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Nodes by Newton iteration on the three-term Legendre recurrence, in `f64`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            nodes: nodes.into_iter().map(lit).collect(),
            weights: weights.into_iter().map(lit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * lit(0.5);
        let mid = (a + b) * lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }

    /// Fixed-rule integral over `[a, b]`.
    pub fn apply<V, F>(&self, f: &F, a: T, b: T) -> V
    where
        V: QuadValue<T>,
        F: Fn(T) -> V + ?Sized,
    {
        self.mapped(a, b).fold(V::zero(), |acc, (x, w)| acc + f(x) * w)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, dp)
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<V, T> {
    pub value: V,
    pub error: T,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<V, T> {
    a: T,
    b: T,
    left: V,
    right: V,
    error: T,
}

/// Adaptive integrator holding a precomputed rule.
#[derive(Debug, Clone)]
pub struct Integrator<T> {
    cfg: QuadratureConfig<T>,
    rule: GaussLegendre<T>,
}

impl<T: Real> Default for Integrator<T> {
    fn default() -> Self {
        Self::new(QuadratureConfig::default()).expect("default configuration is valid")
    }
}

impl<T: Real> Integrator<T> {
    pub fn new(cfg: QuadratureConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            rule: GaussLegendre::new(cfg.base_order),
            cfg,
        })
    }

    pub fn config(&self) -> &QuadratureConfig<T> {
        &self.cfg
    }

    pub fn rule(&self) -> &GaussLegendre<T> {
        &self.rule
    }

    /// `∫_a^b f`.
    pub fn integrate<V, F>(&self, f: F, a: T, b: T) -> Result<Estimate<V, T>>
    where
        V: QuadValue<T>,
        F: Fn(T) -> V,
    {
        check_interval(a, b)?;
        self.adaptive(&f, &[a, b])
    }

    /// `∫_a^b f` with extra initial breakpoints (sorted or not; points outside
    /// `(a, b)` are ignored).
    pub fn integrate_with_breaks<V, F>(&self, f: F, a: T, b: T, breaks: &[T]) -> Result<Estimate<V, T>>
    where
        V: QuadValue<T>,
        F: Fn(T) -> V,
    {
        check_interval(a, b)?;
        let mut pts = vec![a, b];
        pts.extend(breaks.iter().copied().filter(|&p| p > a && p < b));
        pts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        pts.dedup();
        self.adaptive(&f, &pts)
    }

    /// `∫_a^b f` with geometric panels toward flagged endpoints.
    pub fn integrate_graded<V, F>(&self, f: F, a: T, b: T, left: Endpoint, right: Endpoint) -> Result<Estimate<V, T>>
    where
        V: QuadValue<T>,
        F: Fn(T) -> V,
    {
        check_interval(a, b)?;
        let pts = graded_breakpoints(a, b, left, right);
        self.adaptive(&f, &pts)
    }

    /// Cauchy principal value `Vp ∫_a^b f(t)/(t - pole) dt` for `f` smooth at the pole.
    pub fn principal_value<F>(&self, f: F, a: T, b: T, pole: T) -> Result<Estimate<T, T>>
    where
        F: Fn(T) -> T,
    {
        self.principal_value_with_breaks(f, a, b, pole, &[])
    }

    /// [`Integrator::principal_value`] with extra initial breakpoints.
    pub fn principal_value_with_breaks<F>(&self, f: F, a: T, b: T, pole: T, breaks: &[T]) -> Result<Estimate<T, T>>
    where
        F: Fn(T) -> T,
    {
        check_interval(a, b)?;
        let scale = a.abs().max(b.abs()).max(T::one());
        let guard = T::epsilon() * lit(16.0) * scale;
        if !(pole - a > guard && b - pole > guard) {
            return Err(Error::PoleAtEndpoint {
                pole: to_f64(pole),
                a: to_f64(a),
                b: to_f64(b),
            });
        }
        let fp = f(pole);
        let g = |t: T| {
            let d = t - pole;
            if d == T::zero() {
                T::zero()
            } else {
                (f(t) - fp) / d
            }
        };
        let mut pts = vec![a, pole, b];
        pts.extend(breaks.iter().copied().filter(|&p| p > a && p < b));
        pts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        pts.dedup();
        let est = self.adaptive(&g, &pts)?;
        Ok(Estimate {
            value: est.value + fp * ((b - pole) / (pole - a)).ln(),
            error: est.error,
            evaluations: est.evaluations + 1,
        })
    }

    fn panel<V, F>(&self, f: &F, a: T, b: T) -> (V, V)
    where
        V: QuadValue<T>,
        F: Fn(T) -> V + ?Sized,
    {
        let m = (a + b) * lit(0.5);
        (self.rule.apply(f, a, m), self.rule.apply(f, m, b))
    }

    fn adaptive<V, F>(&self, f: &F, breakpoints: &[T]) -> Result<Estimate<V, T>>
    where
        V: QuadValue<T>,
        F: Fn(T) -> V + ?Sized,
    {
        let n = self.rule.len();
        let mut evaluations = 0usize;
        let mut panels: Vec<Panel<V, T>> = Vec::with_capacity(breakpoints.len() + self.cfg.max_subdivisions);
        for w in breakpoints.windows(2) {
            let (a, b) = (w[0], w[1]);
            let whole: V = self.rule.apply(f, a, b);
            let (left, right) = self.panel(f, a, b);
            evaluations += 3 * n;
            panels.push(Panel {
                a,
                b,
                left,
                right,
                error: (left + right - whole).magnitude(),
            });
        }

        let mut splits = 0usize;
        loop {
            let total = panels.iter().fold(V::zero(), |acc, p| acc + p.left + p.right);
            let error: T = panels.iter().map(|p| p.error).sum();
            if !total.is_finite_value() || !error.is_finite() {
                return Err(Error::NonConvergence {
                    estimate: f64::NAN,
                    error_bound: f64::INFINITY,
                });
            }
            let tol = self.cfg.abs_tol.max(self.cfg.rel_tol * total.magnitude());
            if error <= tol {
                return Ok(Estimate {
                    value: total,
                    error,
                    evaluations,
                });
            }
            let (worst, _) = panels.iter().enumerate().fold((0, T::neg_infinity()), |best, (i, p)| {
                if p.error > best.1 {
                    (i, p.error)
                } else {
                    best
                }
            });
            let p = panels[worst];
            let m = (p.a + p.b) * lit(0.5);
            let too_narrow =
                (p.b - p.a) <= T::epsilon() * lit(64.0) * p.a.abs().max(p.b.abs()).max(T::min_positive_value());
            if splits >= self.cfg.max_subdivisions || too_narrow {
                return Err(Error::NonConvergence {
                    estimate: to_f64(total.magnitude()),
                    error_bound: to_f64(error),
                });
            }
            splits += 1;
            let (ll, lr) = self.panel(f, p.a, m);
            let (rl, rr) = self.panel(f, m, p.b);
            evaluations += 4 * n;
            panels[worst] = Panel {
                a: p.a,
                b: m,
                left: ll,
                right: lr,
                error: (ll + lr - p.left).magnitude(),
            };
            panels.push(Panel {
                a: m,
                b: p.b,
                left: rl,
                right: rr,
                error: (rl + rr - p.right).magnitude(),
            });
        }
    }
}

fn check_interval<T: Real>(a: T, b: T) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(Error::InvalidInterval {
            a: to_f64(a),
            b: to_f64(b),
        })
    }
}

/// Breakpoints for `[a, b]` with halving panels toward flagged endpoints.
pub fn graded_breakpoints<T: Real>(a: T, b: T, left: Endpoint, right: Endpoint) -> Vec<T> {
    let half = lit::<T>(0.5);
    let (lo_end, hi_end) = match (left.needs_grading(), right.needs_grading()) {
        (true, true) => ((a + b) * half, (a + b) * half),
        _ => (b, a),
    };
    let mut pts = vec![a, b];
    if left.needs_grading() {
        let mut w = lo_end - a;
        for _ in 0..GRADING_LEVELS {
            pts.push(a + w);
            w = w * half;
        }
    }
    if right.needs_grading() {
        let mut w = b - hi_end;
        for _ in 0..GRADING_LEVELS {
            pts.push(b - w);
            w = w * half;
        }
    }
    pts.retain(|&p| p >= a && p <= b);
    pts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    pts.dedup();
    pts
}

/// Convenience wrapper: `∫_a^b f` under `cfg`.
pub fn integrate<T, V, F>(f: F, a: T, b: T, cfg: &QuadratureConfig<T>) -> Result<Estimate<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    Integrator::new(*cfg)?.integrate(f, a, b)
}

/// Convenience wrapper: `Vp ∫_a^b f(t)/(t - pole) dt` under `cfg`.
pub fn principal_value<T, F>(f: F, a: T, b: T, pole: T, cfg: &QuadratureConfig<T>) -> Result<Estimate<T, T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    Integrator::new(*cfg)?.principal_value(f, a, b, pole)
}
