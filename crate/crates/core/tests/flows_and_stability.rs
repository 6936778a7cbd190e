mod support;

use dalembert_core::characteristics::{integrate_characteristic_flow, ClosedFormSolution};
use dalembert_core::stability::{
    adjoint_defect, adjoint_operator, average_power, average_power_rate, forward_operator, linearized_residual,
    material_derivative, xi_eval, AverageWindow, Perturbation, StabilityReport, Verdict, DEFAULT_C_MIN,
};
use dalembert_core::{Expr, Field};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{close, diff, random_safe_expr, Sym};

fn random_base<G: Rng>(rng: &mut G) -> ClosedFormSolution {
    let h = Expr::Add(
        Box::new(Expr::Const(1.5)),
        Box::new(Expr::Sin(Box::new(random_safe_expr(rng, 2, &[0])))),
    );
    ClosedFormSolution::new(rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5), h).unwrap()
}

fn random_perturbation<G: Rng>(rng: &mut G, base: ClosedFormSolution) -> Perturbation {
    let s = random_safe_expr(rng, 3, &[0]);
    let r = random_safe_expr(rng, 3, &[0]);
    Perturbation::new(s, r, base).unwrap()
}

/// Composite Simpson on `[a, b]`, independent of the crate's quadrature.
fn simpson(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for k in 1..panels {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn rk4_matches_closed_form_flow_without_quadratic_term() {
    // β = 0: ẏ = (αy + 1)·h0 integrates to y(t) = ((1 + αy0)·e^{α h0 t} − 1)/α.
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let alpha: f64 = rng.random_range(0.1..1.0);
        let sol = ClosedFormSolution::parse(alpha, 0.0, "1 + 0.5*cos(x)").unwrap();
        let (x0, y0) = (rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5));
        let traj = integrate_characteristic_flow(&sol, x0, y0, 1.0, 1e-3).unwrap();
        let h0 = 1.0 + 0.5 * f64::cos(x0);
        let exact = ((1.0 + alpha * y0) * (alpha * h0).exp() - 1.0) / alpha;
        assert!((traj.last().y - exact).abs() < 1e-8);
    }
}

#[test]
fn fifty_random_trajectories_stay_on_the_graph() {
    // Parameters keep ẏ = u of order one, so the flow stays bounded on [0, 1].
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let h = Expr::Add(
            Box::new(Expr::Const(1.0)),
            Box::new(Expr::Mul(
                Box::new(Expr::Const(0.3)),
                Box::new(Expr::Sin(Box::new(random_safe_expr(&mut rng, 2, &[0])))),
            )),
        );
        let sol = ClosedFormSolution::new(rng.random_range(-0.5..0.5), rng.random_range(-0.2..0.2), h).unwrap();
        let (x0, y0) = (rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5));
        let traj = integrate_characteristic_flow(&sol, x0, y0, 1.0, 1e-3).unwrap();
        assert!(!traj.blow_up);
        let c = traj.u_consistency(&sol).unwrap();
        assert!(c < 1e-6, "{c} for {sol:?}");
    }
}

#[test]
fn linearization_vanishes_for_all_perturbations() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let base = random_base(&mut rng);
        let pert = random_perturbation(&mut rng, base);
        for _ in 0..5 {
            let p = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let r = linearized_residual(&pert, p).unwrap();
            assert!(r.abs() < 1e-9, "{r}");
        }
    }
}

#[test]
fn material_derivative_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let h = 1e-5;
    for _ in 0..30 {
        let base = random_base(&mut rng);
        let pert = random_perturbation(&mut rng, base);
        let (x, y) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let fd = (xi_eval(&pert, x, y + h).unwrap() - xi_eval(&pert, x, y - h).unwrap()) / (2.0 * h);
        let expected = fd * pert.base.value(x, y).unwrap();
        assert!(close(material_derivative(&pert, x, y).unwrap(), expected, 1e-6, 1e-6));
    }
}

#[test]
fn pointwise_defect_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let unit = ClosedFormSolution::parse(0.0, 0.0, "1").unwrap();
    for k in 0..50 {
        let base = if k < 25 { unit.clone() } else { random_base(&mut rng) };
        let phi_expr = random_safe_expr(&mut rng, 4, &[0, 1]);
        let phi = Field::expression(phi_expr.clone(), 2).unwrap();
        let phi_sym = Sym::from_expr(&phi_expr);
        let phi_y = diff(&phi_sym, 1);
        let u_y = diff(&Sym::from_expr(&base.expr()), 1);
        for _ in 0..4 {
            let (x, y) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let pt = [x, y];
            let defect = forward_operator(&base, &phi, x, y).unwrap() - adjoint_operator(&base, &phi, x, y).unwrap();
            let closed = 2.0 * base.value(x, y).unwrap() * phi_y.eval(&pt) + u_y.eval(&pt) * phi_sym.eval(&pt);
            assert!((defect - closed).abs() < 1e-8, "{defect} vs {closed}");
        }
    }
}

#[test]
fn pairing_defect_is_the_boundary_term() {
    // ∫[(δξ)φ + ξ∂y(uφ)] dx = d/dt ∫ u ξ φ dx on the slice y = t.
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let window = AverageWindow::uniform(2.0, 0.0, 1.0, 4, 64).unwrap();
    for _ in 0..10 {
        let base = random_base(&mut rng);
        let pert = random_perturbation(&mut rng, base);
        let phi_expr = Expr::parse("exp(-x^2) * (1 + y)", &["x", "y"]).unwrap();
        let phi = Field::expression(phi_expr.clone(), 2).unwrap();
        let t = rng.random_range(-0.5..0.5);
        let defect = adjoint_defect(&pert, &phi, &window, t).unwrap();
        let moment = |y: f64| {
            simpson(-2.0, 2.0, 2000, |x| {
                pert.base.value(x, y).unwrap() * xi_eval(&pert, x, y).unwrap() * phi_expr.eval(&[x, y]).unwrap()
            })
        };
        let h = 1e-4;
        let fd = (moment(t + h) - moment(t - h)) / (2.0 * h);
        assert!(close(defect.pairing, fd, 1e-6, 1e-6), "{} vs {fd}", defect.pairing);
    }
}

#[test]
fn rate_matches_derivative_of_power_for_unit_base() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let unit = ClosedFormSolution::parse(0.0, 0.0, "1").unwrap();
    let window = AverageWindow::default();
    for _ in 0..10 {
        let pert = random_perturbation(&mut rng, unit.clone());
        let t = rng.random_range(0.5..2.0);
        let h = 1e-5;
        let fd = (average_power(&pert, &window, t + h).unwrap() - average_power(&pert, &window, t - h).unwrap()) / (2.0 * h);
        let rate = average_power_rate(&pert, &window, t).unwrap();
        assert!((rate - fd).abs() < 1e-4, "{rate} vs {fd}");
    }
}

#[test]
fn doubling_quadrature_points_is_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    let coarse = AverageWindow::uniform(5.0, 0.1, 10.0, 8, 128).unwrap();
    let fine = AverageWindow::uniform(5.0, 0.1, 10.0, 8, 256).unwrap();
    for _ in 0..10 {
        let s = random_safe_expr(&mut rng, 2, &[0]);
        let r = Expr::Sin(Box::new(random_safe_expr(&mut rng, 2, &[0])));
        let base = ClosedFormSolution::parse(0.0, 0.0, "1 + 0.5*sin(x)").unwrap();
        let pert = Perturbation::new(s, r, base).unwrap();
        for &t in &coarse.t_grid {
            let a = average_power(&pert, &coarse, t).unwrap();
            let b = average_power(&pert, &fine, t).unwrap();
            assert!(close(a, b, 1e-8, 1e-14), "{a} vs {b}");
        }
    }
}

#[test]
fn power_is_non_negative() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let window = AverageWindow::uniform(3.0, 0.0, 2.0, 5, 32).unwrap();
    for _ in 0..20 {
        let base = random_base(&mut rng);
        let pert = random_perturbation(&mut rng, base);
        for &t in &window.t_grid {
            assert!(average_power(&pert, &window, t).unwrap() >= 0.0);
        }
    }
}

#[test]
fn fitted_rate_recovers_injected_decay() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..50 {
        let c: f64 = rng.random_range(0.01..5.0);
        let p0: f64 = rng.random_range(0.1..10.0);
        let grid: Vec<f64> = (0..64).map(|k| 0.1 + 9.9 * k as f64 / 63.0).collect();
        let p = grid.iter().map(|&t| (t, p0 * (-c * t).exp())).collect();
        let pd = grid.iter().map(|&t| (t, -c * p0 * (-c * t).exp())).collect();
        let report = StabilityReport::from_samples(p, pd, DEFAULT_C_MIN).unwrap();
        assert!(close(report.fitted_rate, c, 1e-6, 0.0));
        assert!(close(report.tau0, 1.0 / c, 1e-6, 0.0));
        assert_eq!(report.verdict, Verdict::AverageStable);
    }
}
