use std::sync::OnceLock;

use kramers_core::fermi::Alpha;
use kramers_core::kramers::wall_velocity_exact;
use kramers_core::SlipSolution64;
use proptest::prelude::*;

fn sol() -> &'static SlipSolution64 {
    static S: OnceLock<SlipSolution64> = OnceLock::new();
    S.get_or_init(|| SlipSolution64::new().unwrap())
}

#[test]
fn profile_rises_from_the_wall_value() {
    let s = sol();
    let xs: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
    let p = s.velocity_profile(&xs).unwrap();
    assert!((p.u_over_gv[0] - wall_velocity_exact::<f64>()).abs() < 1e-9);
    assert!(p.u_over_gv.windows(2).all(|w| w[1] > w[0]));
    assert!(p.h_layer.iter().all(|&d| d <= 0.0));
    assert!(p.h_layer.windows(2).all(|w| w[1].abs() < w[0].abs()));
}

#[test]
fn distribution_moment_is_the_velocity() {
    let s = sol();
    for x in [0.0, 0.3, 3.0] {
        assert!((s.velocity_from_distribution(x).unwrap() - s.velocity(x).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn spectrum_coefficient_is_non_positive() {
    let s = sol();
    for i in 1..50 {
        assert!(s.spectrum_coefficient(i as f64 / 50.0).unwrap() <= 0.0);
    }
}

#[test]
fn classical_limit_of_the_slip_coefficient() {
    let s = sol();
    let classical = s.slip_coefficient(Alpha::Classical).unwrap();
    let far = s.slip_coefficient(Alpha::Finite(-40.0)).unwrap();
    assert!((far / classical - 1.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slip_coefficient_decreases(a in -15.0f64..45.0, step in 0.05f64..5.0) {
        let s = sol();
        let k1 = s.slip_coefficient(Alpha::Finite(a)).unwrap();
        let k2 = s.slip_coefficient(Alpha::Finite(a + step)).unwrap();
        prop_assert!(k2 < k1);
    }

    #[test]
    fn incoming_half_vanishes_at_the_wall(mu in 0.01f64..0.99) {
        prop_assert!(sol().h(0.0, mu).unwrap().abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn transport_equation_holds(x in 0.05f64..6.0, mu in -0.95f64..0.95) {
        prop_assume!(mu.abs() > 0.02);
        prop_assert!(sol().transport_residual(x, mu).unwrap().relative() < 1e-4);
    }
}
