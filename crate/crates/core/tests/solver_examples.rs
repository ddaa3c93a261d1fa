use fracint::basis::RecurrenceBasis;
use fracint::frac_integrals::IntegralBackend;
use fracint::problems::garrappa_problem;
use fracint::solver::{grid_error, solve, SolverConfig};

fn error_at(s: usize, horizon: f64, backend: IntegralBackend) -> f64 {
    let problem = garrappa_problem(0.5, horizon).unwrap();
    let exact = problem.exact.clone().unwrap();
    let cfg = SolverConfig {
        backend,
        ..SolverConfig::with_terms(s)
    };
    let sol = solve(&problem.ivp, &RecurrenceBasis::legendre(), &cfg).unwrap();
    grid_error(&sol, &|t| exact(t)).unwrap()
}

#[test]
fn nonlinear_problem_at_24_terms() {
    let rec = error_at(24, 0.5, IntegralBackend::Recurrence);
    let hor = error_at(24, 0.5, IntegralBackend::Horner);
    assert!(rec <= 1e-4, "{rec:e}");
    assert!(rec < hor, "recurrence {rec:e} horner {hor:e}");
}

#[test]
fn error_falls_with_terms() {
    let coarse = error_at(6, 1.0, IntegralBackend::Recurrence);
    let fine = error_at(16, 1.0, IntegralBackend::Recurrence);
    assert!(fine < 1e-3 * coarse, "{coarse:e} -> {fine:e}");
}
