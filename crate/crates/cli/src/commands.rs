use kramers_core::dispersion::{im_part, lambda_real, theta, zeta};
use kramers_core::fermi::FermiIntegrals;
use kramers_core::kramers::{kv_classical_wall, wall_velocity_exact};
use kramers_core::moments::{Coefficients, MomentTable, Route};
use kramers_core::oracle::{self, compare_profiles};
use kramers_core::verify::{self, Report, VerifyOptions};
use kramers_core::{Alpha64, OracleConfig64, QuadratureConfig64, Result, SlipSolution64, XFunction64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{AlphaGrid, Command, RouteArg};
use crate::output::{col, Table};

/// The result of one subcommand before formatting.
pub enum Output {
    Table(Table),
    Json(Value),
    Report(Report),
}

/// Quadrature settings: the library defaults with any tolerance overrides applied.
#[derive(Debug, Clone, Copy, Default)]
pub struct Tolerances {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
}

impl Tolerances {
    fn x_config(self) -> QuadratureConfig64 {
        self.apply(XFunction64::default_config())
    }

    fn apply(self, mut cfg: QuadratureConfig64) -> QuadratureConfig64 {
        if let Some(r) = self.rel_tol {
            cfg.rel_tol = r;
        }
        if let Some(a) = self.abs_tol {
            cfg.abs_tol = a;
        }
        cfg
    }

    fn overridden(self) -> bool {
        self.rel_tol.is_some() || self.abs_tol.is_some()
    }

    fn solution(self) -> Result<SlipSolution64> {
        SlipSolution64::with_config(self.x_config())
    }

    fn fermi(self) -> Result<FermiIntegrals<f64>> {
        if self.overridden() {
            FermiIntegrals::new(self.apply(QuadratureConfig64 {
                max_subdivisions: 200,
                ..QuadratureConfig64::default()
            }))
        } else {
            Ok(FermiIntegrals::default())
        }
    }
}

pub fn run(command: &Command, tol: Tolerances) -> Result<Output> {
    match command {
        Command::DispersionTable { points } => Ok(Output::Table(dispersion_table(*points as usize))),
        Command::XfunctionTable { points } => xfunction_table(*points as usize, tol).map(Output::Table),
        Command::Moments { order, route } => moments_table(*order as usize, *route, tol).map(Output::Table),
        Command::Profile { xmax, points } => profile_table(*xmax, *points as usize, tol).map(Output::Table),
        Command::Distribution { x, points } => distribution_table(*x, *points as usize, tol).map(Output::Table),
        Command::FermiTable { grid } => fermi_table(grid, tol).map(Output::Table),
        Command::KvTable { grid } => kv_table(grid, tol).map(Output::Table),
        Command::Oracle { ordinates, cells, xmax } => oracle_report(*ordinates, *cells, *xmax, tol).map(Output::Json),
        Command::Verify { strict } => verify_report(*strict, tol).map(Output::Report),
    }
}

/// `n` interior points `-1 + 2(i+1)/(n+1)` of `(-1, 1)`.
fn symmetric_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| -1.0 + 2.0 * (i + 1) as f64 / (n + 1) as f64).collect()
}

/// `n` interior points `(i+1)/(n+1)` of `(0, 1)`.
fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i + 1) as f64 / (n + 1) as f64).collect()
}

/// `n` equispaced points on `[a, b]`, both ends included.
fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn dispersion_table(points: usize) -> Table {
    let mut t = Table::new(vec![
        col("mu", "-1 + 2(i+1)/(N+1)"),
        col(
            "lambda",
            "Re lambda+(mu) = -1/2 + (3/2)(1 - mu^2)(1 + (mu/2) ln((1 - mu)/(1 + mu)))",
        ),
        col("im_part", "Im lambda+(mu) = (3 pi/4) mu (1 - mu^2)"),
        col("theta", "arg lambda+(mu), continuous with theta(0) = 0"),
        col("zeta", "theta(mu) - pi"),
    ]);
    for mu in symmetric_grid(points) {
        t.push(vec![mu, lambda_real(mu), im_part(mu), theta(mu), zeta(mu)]);
    }
    t
}

fn xfunction_table(points: usize, tol: Tolerances) -> Result<Table> {
    let xf = XFunction64::with_config(tol.x_config())?;
    let taus = unit_grid(points);
    let xs = taus.par_iter().map(|&tau| xf.x_at(tau)).collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(vec![
        col("tau", "(i+1)/(N+1)"),
        col("zeta", "arg lambda+(tau) - pi"),
        col("V", "ln(tau X(tau)), V(tau) = (1/pi) PV int_0^1 zeta(s)/(s - tau) ds"),
        col("X", "boundary value exp(V(tau))/tau"),
    ]);
    for (tau, x) in taus.into_iter().zip(xs) {
        t.push(vec![tau, zeta(tau), (tau * x).ln(), x]);
    }
    Ok(t)
}

fn moments_table(order: usize, route: RouteArg, tol: Tolerances) -> Result<Table> {
    let xf = XFunction64::with_config(tol.x_config())?;
    let core_route = match route {
        RouteArg::Integral => Route::Integral,
        RouteArg::Recurrence => Route::Recurrence,
        RouteArg::Both => Route::Both,
    };
    let table = MomentTable::compute(&xf, order, core_route)?;
    let n_col = col("n", "expansion index");
    let v_f = "V_n = -(1/pi) int_0^1 zeta(t) t^(n-1) dt";
    let x_f = "X(z) = sum X_n z^-n, X_n = -(1/pi) int_0^1 X(t) sin zeta(t) t^(n-1) dt";
    let s_f = "1/X(z) = z - V_1 + sum X*_n z^-n, X*_n = (1/pi) int_0^1 sin zeta(t)/X(t) t^(n-1) dt";
    let row = |c: &Coefficients<f64>, i: usize| [c.v[i], c.x[i], c.x_star[i]];
    let t = match (&table.integral, &table.recurrence) {
        (Some(a), Some(b)) => {
            let mut t = Table::new(vec![
                n_col,
                col("v_integral", v_f),
                col(
                    "v_recurrence",
                    "V_n from ln sum c_m w^m = 2 sum V_2k w^k, c_m = 15/((2m+3)(2m+5)); odd n by integral",
                ),
                col("v_difference", "v_recurrence - v_integral"),
                col("x_integral", x_f),
                col("x_recurrence", "X_n from the series exp(V(z))/z"),
                col("x_difference", "x_recurrence - x_integral"),
                col("x_star_integral", s_f),
                col("x_star_recurrence", "X*_n from the series z exp(-V(z))"),
                col("x_star_difference", "x_star_recurrence - x_star_integral"),
            ]);
            for i in 0..order {
                let (ra, rb) = (row(a, i), row(b, i));
                let mut r = vec![(i + 1) as f64];
                for k in 0..3 {
                    r.extend([ra[k], rb[k], rb[k] - ra[k]]);
                }
                t.push(r);
            }
            t
        }
        _ => {
            let c = table.primary();
            let mut t = Table::new(vec![n_col, col("v", v_f), col("x", x_f), col("x_star", s_f)]);
            for i in 0..order {
                let mut r = vec![(i + 1) as f64];
                r.extend(row(c, i));
                t.push(r);
            }
            t
        }
    };
    Ok(t)
}

fn profile_table(xmax: f64, points: usize, tol: Tolerances) -> Result<Table> {
    let sol = tol.solution()?;
    let profile = sol.velocity_profile(&linspace(0.0, xmax, points))?;
    let mut t = Table::new(vec![
        col("x", "distance from the wall in mean free paths"),
        col(
            "u_over_gv",
            "U(x)/G_v = V_1 + x + (1/pi) int_0^1 e^(-x/eta) sin zeta(eta)/(eta X(eta)) d eta",
        ),
        col("defect", "U(x)/G_v - (V_1 + x)"),
    ]);
    for ((&x, &u), &d) in profile.x_grid.iter().zip(&profile.u_over_gv).zip(&profile.h_layer) {
        t.push(vec![x, u, d]);
    }
    Ok(t)
}

fn distribution_table(x: f64, points: usize, tol: Tolerances) -> Result<Table> {
    let sol = tol.solution()?;
    let mus: Vec<f64> = symmetric_grid(points).into_iter().filter(|&m| m != 0.0).collect();
    let slice = sol.distribution(x, &mus)?;
    let mut t = Table::new(vec![
        col("mu", "-1 + 2(i+1)/(N+1), mu = 0 omitted"),
        col(
            "h_over_2gv",
            "V_1 + x - mu + (1/pi) int_0^1 e^(-x/eta) sin zeta(eta)/(X(eta)(eta - mu)) d eta + [mu > 0] cos zeta(mu)/X(mu) e^(-x/mu)",
        ),
    ]);
    for (&mu, &h) in slice.mu_grid.iter().zip(&slice.h_over_2gv) {
        t.push(vec![mu, h]);
    }
    Ok(t)
}

fn alphas(grid: &AlphaGrid) -> Result<Vec<Alpha64>> {
    linspace(grid.alpha_min, grid.alpha_max, grid.steps as usize)
        .into_iter()
        .map(Alpha64::new)
        .collect()
}

fn fermi_table(grid: &AlphaGrid, tol: Tolerances) -> Result<Table> {
    let fermi = tol.fermi()?;
    let rows = alphas(grid)?
        .par_iter()
        .map(|&a| fermi.row(a))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(vec![
        col("alpha", "reduced chemical potential mu/kT"),
        col("l0", "int_0^inf ln(1 + e^(alpha - C^2)) dC"),
        col("l1", "int_0^inf C ln(1 + e^(alpha - C^2)) dC"),
        col("g4", "int_0^inf C^4 e^(C^2 - alpha)/(1 + e^(C^2 - alpha))^2 dC"),
        col("g5", "int_0^inf C^5 e^(C^2 - alpha)/(1 + e^(C^2 - alpha))^2 dC"),
    ]);
    for r in rows {
        t.push(vec![
            r.alpha.value().unwrap_or(f64::NEG_INFINITY),
            r.l0,
            r.l1,
            r.g4,
            r.g5,
        ]);
    }
    Ok(t)
}

fn kv_table(grid: &AlphaGrid, tol: Tolerances) -> Result<Table> {
    let sol = tol.solution()?;
    let fermi = tol.fermi()?;
    let slip = sol.kv_classical_slip();
    let wall = kv_classical_wall::<f64>();
    let factors = alphas(grid)?
        .par_iter()
        .map(|&a| Ok((a, fermi.l0(a)? / (std::f64::consts::PI.sqrt() * fermi.l1(a)?))))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(vec![
        col("alpha", "reduced chemical potential mu/kT"),
        col("fermi_factor", "l0(alpha)/(sqrt(pi) l1(alpha))"),
        col("kv", "K_v(alpha) = (15 V_1/8) l0(alpha)/(sqrt(pi) l1(alpha))"),
        col("kv_wall", "(15/(8 sqrt 5)) l0(alpha)/(sqrt(pi) l1(alpha))"),
        col("kv_classical_slip", "15 V_1/8"),
        col("kv_classical_wall", "15/(8 sqrt 5)"),
    ]);
    for (a, f) in factors {
        t.push(vec![
            a.value().unwrap_or(f64::NEG_INFINITY),
            f,
            slip * f,
            wall * f,
            slip,
            wall,
        ]);
    }
    Ok(t)
}

fn oracle_report(ordinates: usize, cells: usize, xmax: f64, tol: Tolerances) -> Result<Value> {
    let cfg = OracleConfig64 {
        n_ordinates: ordinates,
        n_cells: cells,
        x_max: xmax,
        ..OracleConfig64::default()
    };
    cfg.validate()?;
    let sol = tol.solution()?;
    let numeric = oracle::solve(&cfg)?;
    let xs = linspace(0.0, 5.0, 101);
    let analytic = sol.velocity_profile(&xs)?;
    let cmp = compare_profiles(&numeric, &analytic)?;
    let v1 = sol.u_sl_over_gv();
    let u0 = wall_velocity_exact::<f64>();
    Ok(json!({
        "config": cfg,
        "iterations": numeric.iterations_used,
        "final_change": numeric.residual,
        "slip_fit": numeric.slip_fit,
        "slip": {
            "oracle": numeric.slip_fit.intercept,
            "analytic": v1,
            "difference": numeric.slip_fit.intercept - v1,
        },
        "wall_velocity": {
            "oracle": numeric.wall_velocity(),
            "analytic": u0,
            "difference": numeric.wall_velocity() - u0,
        },
        "profile_comparison": cmp,
    }))
}

fn verify_report(strict: bool, tol: Tolerances) -> Result<Report> {
    let options = VerifyOptions {
        strict,
        ..VerifyOptions::default()
    };
    if tol.overridden() {
        verify::run_with(&tol.solution()?, &options)
    } else {
        verify::run(&options)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_interior() {
        let g = symmetric_grid(3);
        assert_eq!(g, vec![-0.5, 0.0, 0.5]);
        assert!(unit_grid(4).iter().all(|&t| t > 0.0 && t < 1.0));
        assert_eq!(linspace(-10.0, 40.0, 51)[1], -9.0);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }

    #[test]
    fn dispersion_rows_match_columns() {
        let t = dispersion_table(9);
        assert_eq!(t.rows.len(), 9);
        assert!(t.rows.iter().all(|r| r.len() == t.columns.len()));
        let centre = &t.rows[4];
        assert_eq!(centre[0], 0.0);
        assert_eq!(centre[1], 1.0);
    }
}
