//! Identity suite: every closed-form value and internal consistency relation
//! of the solution, checked numerically and collected into a report.
//!
//! Checks against values quoted to three digits keep their rounding
//! tolerance; all other tolerances shrink tenfold in strict mode.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dispersion::{lambda_real, lambda_w, lambda_w_laurent, theta, winding_over};
use crate::error::Result;
use crate::fermi::{Alpha, FermiIntegrals};
use crate::kramers::{kv_classical_wall, wall_velocity_exact, SlipSolution};
use crate::oracle::{compare_profiles, solve, OracleConfig};

/// `ζ(3/2)`.
const RIEMANN_ZETA_3_2: f64 = 2.612_375_348_685_488;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub strict: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Fixed-width text table with `precision` significant digits.
    pub fn render(&self, precision: usize) -> String {
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {:<width$}  value={:.p$e}  reference={:.p$e}  deviation={:.3e}  tolerance={:.1e}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.reference,
                c.deviation,
                c.tolerance,
                p = precision.saturating_sub(1),
            ));
        }
        let failed = self.failures().count();
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    pub strict: bool,
    pub oracle: OracleConfig<f64>,
}

struct Collector {
    scale: f64,
    checks: Vec<Check>,
}

impl Collector {
    /// `|value - reference| <= tolerance·scale`.
    fn abs(&mut self, name: &str, value: f64, reference: f64, tolerance: f64) {
        self.push(
            name,
            value,
            reference,
            (value - reference).abs(),
            tolerance * self.scale,
        );
    }

    /// `|value - reference| <= tolerance` against a value quoted to three digits.
    fn rounded(&mut self, name: &str, value: f64, reference: f64, tolerance: f64) {
        self.push(name, value, reference, (value - reference).abs(), tolerance);
    }

    /// `|value/reference - 1| <= tolerance·scale`.
    fn rel(&mut self, name: &str, value: f64, reference: f64, tolerance: f64) {
        self.push(
            name,
            value,
            reference,
            (value / reference - 1.0).abs(),
            tolerance * self.scale,
        );
    }

    /// A non-negative error measure that must stay below `tolerance·scale`.
    fn bound(&mut self, name: &str, value: f64, tolerance: f64) {
        self.push(name, value, 0.0, value.abs(), tolerance * self.scale);
    }

    fn exact(&mut self, name: &str, value: f64, reference: f64) {
        self.push(name, value, reference, (value - reference).abs(), 0.0);
    }

    fn push(&mut self, name: &str, value: f64, reference: f64, deviation: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            value,
            reference,
            deviation,
            tolerance,
            passed: deviation <= tolerance,
        });
    }
}

/// `k`-th point of the additive recurrence with step `a`, in `[0, 1)`.
fn weyl(k: usize, a: f64) -> f64 {
    (k as f64 * a).fract()
}

/// Deterministic sample points: 20 with `1.1 <= |z| <= 10` and 10 with
/// `|Re z| <= 1`, `|Im z| >= 0.5`.
pub fn factorization_points() -> (Vec<Complex64>, Vec<Complex64>) {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let far = (1..=20)
        .map(|k| {
            let r = 1.1 + 8.9 * weyl(k, golden);
            Complex64::from_polar(r, 2.0 * PI * weyl(k, 2f64.sqrt()))
        })
        .collect();
    let near = (1..=10)
        .map(|k| {
            let re = -1.0 + 2.0 * weyl(k, golden);
            let im = 0.5 + 2.0 * weyl(k, 3f64.sqrt());
            Complex64::new(re, if k % 2 == 0 { im } else { -im })
        })
        .collect();
    (far, near)
}

pub fn run(options: &VerifyOptions) -> Result<Report> {
    let solution = SlipSolution::<f64>::new()?;
    run_with(&solution, options)
}

pub fn run_with(sol: &SlipSolution<f64>, options: &VerifyOptions) -> Result<Report> {
    let mut c = Collector {
        scale: if options.strict { 0.1 } else { 1.0 },
        checks: Vec::new(),
    };
    let xf = sol.x_function();
    let m = sol.moment_table();
    let integral = m.integral.as_ref().expect("solution holds both routes");

    // moments
    c.rounded("V1 = 0.582", m.v(1), 0.582, 1e-3);
    c.abs("V2 = 3/14 (integral)", integral.v[1], 3.0 / 14.0, 1e-8);
    c.rounded("V3 = 0.115", m.v(3), 0.115, 1e-3);
    c.abs("V4 = 43/588 (integral)", integral.v[3], 43.0 / 588.0, 1e-8);
    c.rounded("V5 = 0.051", m.v(5), 0.051, 1e-3);
    c.abs("V6 = 857/22638 (integral)", integral.v[5], 857.0 / 22638.0, 1e-8);
    c.bound(
        "integral vs recurrence routes",
        m.max_route_difference().unwrap_or(f64::NAN),
        1e-6,
    );
    c.rounded("X2 = 0.582", m.x(2), 0.582, 1e-3);
    c.rounded("X3 = 0.384", m.x(3), 0.384, 1e-3);
    c.rounded("X1* = -0.045", m.x_star(1), -0.045, 1e-3);
    c.rounded("X2* = -0.023", m.x_star(2), -0.023, 1e-3);
    c.rounded("X3* = -0.015", m.x_star(3), -0.015, 1e-3);
    c.abs("X1 = 1 (integral)", integral.x[0], 1.0, 1e-8);

    // factorization
    let (far, near) = factorization_points();
    let worst = |pts: &[Complex64]| -> Result<f64> {
        let r = pts
            .par_iter()
            .map(|&z| {
                let five_lambda = lambda_w(z)? * 5.0;
                let prod = xf.x_of_z(z)? * xf.x_of_z(-z)?;
                Ok((five_lambda - prod).norm() / five_lambda.norm())
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(r.into_iter().fold(0.0, f64::max))
    };
    c.bound("factorization, 1.1 <= |z| <= 10", worst(&far)?, 1e-7);
    c.bound("factorization, |Re z| <= 1, |Im z| >= 0.5", worst(&near)?, 1e-7);

    // endpoint limits
    let root5 = 5f64.sqrt();
    let (xm, xp) = xf.x_at_zero();
    let (em, ep) = xf.x_at_zero_extrapolated(1e-6)?;
    c.rel("X(+0) = sqrt(5)", xp, root5, 1e-3);
    c.rel("X(-0) = -sqrt(5)", xm, -root5, 1e-3);
    c.bound(
        "X(+-0) extrapolated vs limit",
        ((ep / xp - 1.0).abs()).max((em / xm - 1.0).abs()),
        1e-4,
    );

    // wall velocity and slip
    let v1 = sol.u_sl_over_gv();
    c.abs(
        "U(0)/Gv = 1/sqrt(5)",
        sol.wall_velocity_over_gv()?,
        wall_velocity_exact(),
        5e-4,
    );
    c.bound(
        "wall closure V1 + layer(0) - 1/sqrt(5)",
        sol.wall_closure_residual()?,
        1e-6,
    );
    let fit = sol.far_field_fit(8.0, 12.0, 41)?;
    c.abs("far-field intercept = V1", fit.intercept, v1, 1e-4);

    // discrete-ordinates oracle
    let oracle = solve(&options.oracle)?;
    c.rounded("oracle intercept = 0.582", oracle.slip_fit.intercept, 0.582, 2e-3);
    c.rounded("oracle wall velocity = 0.4472", oracle.wall_velocity(), 0.4472, 4e-3);
    let xs: Vec<f64> = (0..=100).map(|i| i as f64 * 0.05).collect();
    let profile = sol.velocity_profile(&xs)?;
    let cmp = compare_profiles(&oracle, &profile)?;
    c.bound("oracle vs analytic profile on [0, 5]", cmp.max_relative_deviation, 5e-3);

    // dispersion
    c.exact("winding over (-1, 1)", winding_over(-1.0, 1.0, 10_000)? as f64, 2.0);
    c.exact("winding over (0, 1)", winding_over(0.0, 1.0, 10_000)? as f64, 1.0);
    c.abs("theta(0+) = 0", theta(1e-12), 0.0, 1e-6);
    c.abs("theta(1-) = pi", theta(1.0 - 1e-12), PI, 1e-6);
    let z3 = Complex64::new(3.0, 0.0);
    c.bound(
        "Laurent series at z = 3, 8 terms",
        (lambda_w_laurent(z3, 8) - lambda_w(z3)?).norm(),
        1e-8,
    );
    c.exact("lambda(0) = 1", lambda_real(0.0), 1.0);
    c.exact("lambda(1-) = -1/2", lambda_real(1.0), -0.5);

    // wall distribution
    let mu_pos: Vec<f64> = (0..50).map(|i| 0.02 + 0.96 * i as f64 / 49.0).collect();
    let mu_neg: Vec<f64> = mu_pos.iter().map(|m| -m).collect();
    let h_pos = sol.distribution(0.0, &mu_pos)?.h_over_2gv;
    let h_neg = sol.distribution(0.0, &mu_neg)?.h_over_2gv;
    let hmax = h_pos.iter().chain(&h_neg).fold(0.0f64, |a, &h| a.max(h.abs()));
    let pos_worst = h_pos.iter().fold(0.0f64, |a, &h| a.max(h.abs())) / hmax;
    c.bound("h(0, mu)/max|h| for mu > 0", pos_worst, 1e-7);
    let x_neg = mu_neg
        .par_iter()
        .map(|&m| xf.x_boundary(m))
        .collect::<Result<Vec<f64>>>()?;
    let neg_worst = h_neg
        .iter()
        .zip(&x_neg)
        .fold(0.0f64, |a, (&h, &x)| a.max((h + 1.0 / x).abs()));
    c.bound("h(0, mu) + 1/X(mu) for mu < 0", neg_worst, 1e-6);

    // transport equation and velocity moment
    let xs_t = [0.1, 0.5, 1.0, 2.0, 5.0];
    let mus_t = [-0.9, -0.3, 0.05, 0.4, 0.8];
    let collision = xs_t
        .par_iter()
        .map(|&x| sol.velocity_from_distribution(x))
        .collect::<Result<Vec<f64>>>()?;
    let pairs: Vec<(usize, f64)> = (0..xs_t.len())
        .flat_map(|i| mus_t.iter().map(move |&m| (i, m)))
        .collect();
    let residuals = pairs
        .par_iter()
        .map(|&(i, mu)| {
            sol.transport_residual_with(xs_t[i], mu, collision[i])
                .map(|r| r.relative())
        })
        .collect::<Result<Vec<f64>>>()?;
    c.bound(
        "transport residual, 25 points",
        residuals.into_iter().fold(0.0, f64::max),
        1e-4,
    );
    let mut moment_worst = 0.0f64;
    for (&x, &u) in xs_t.iter().zip(&collision) {
        moment_worst = moment_worst.max((u - sol.velocity(x)?).abs());
    }
    c.bound("(3/4) int (1-mu^2) h dmu - U(x)", moment_worst, 1e-5);

    // Fermi integrals
    let fermi = FermiIntegrals::<f64>::default();
    let grid: Vec<f64> = (0..50).map(|i| -20.0 + 40.0 * i as f64 / 49.0).collect();
    let identity = grid
        .par_iter()
        .map(|&a| {
            let al = Alpha::Finite(a);
            let (l0, l1) = (fermi.l0(al)?, fermi.l1(al)?);
            let d5 = (fermi.g_n(al, 5)? / (2.0 * l1) - 1.0).abs();
            let d4 = (fermi.g_n(al, 4)? / (0.75 * l0) - 1.0).abs();
            Ok((d5, d4))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    c.bound(
        "g5 = 2 l1 on [-20, 20] (relative)",
        identity.iter().fold(0.0, |a, d| a.max(d.0)),
        1e-9,
    );
    c.bound(
        "g4 = (3/4) l0 on [-20, 20] (relative)",
        identity.iter().fold(0.0, |a, d| a.max(d.1)),
        1e-9,
    );
    let l0_series = PI.sqrt() / 2.0 * (1.0 - 0.5f64.sqrt()) * RIEMANN_ZETA_3_2;
    c.abs("l0(0) series", fermi.l0(Alpha::Finite(0.0))?, l0_series, 1e-8);
    c.abs("l1(0) = pi^2/24", fermi.l1(Alpha::Finite(0.0))?, PI * PI / 24.0, 1e-8);
    let e30 = (-30f64).exp();
    c.rel(
        "l0(-30) e^30 = sqrt(pi)/2",
        fermi.l0(Alpha::Finite(-30.0))? / e30,
        PI.sqrt() / 2.0,
        1e-6,
    );
    c.rel("l1(-30) e^30 = 1/2", fermi.l1(Alpha::Finite(-30.0))? / e30, 0.5, 1e-6);

    // slip coefficients
    c.rounded("kv_classical_wall = 0.83853", kv_classical_wall(), 0.83853, 1e-5);
    c.rel(
        "K_v(classical) = 15 V1/8",
        sol.slip_coefficient(Alpha::Classical)?,
        15.0 * v1 / 8.0,
        1e-12,
    );
    let alphas: Vec<f64> = (0..50).map(|i| -10.0 + 50.0 * i as f64 / 49.0).collect();
    let kv = alphas
        .par_iter()
        .map(|&a| sol.slip_coefficient(Alpha::Finite(a)))
        .collect::<Result<Vec<f64>>>()?;
    let rises = kv.windows(2).filter(|w| w[1] >= w[0]).count();
    c.exact("K_v(alpha) non-decreasing steps on [-10, 40]", rises as f64, 0.0);
    let asym = 15.0 * v1 / 8.0 * 8.0 / (3.0 * (PI * 40.0).sqrt());
    c.rel(
        "K_v(40) vs degenerate asymptote",
        sol.slip_coefficient(Alpha::Finite(40.0))?,
        asym,
        2e-2,
    );

    Ok(Report {
        strict: options.strict,
        checks: c.checks,
    })
}
