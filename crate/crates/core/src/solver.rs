//! Single-interval collocation solver for scalar Caputo problems
//! `D^α y = f(t, y)`, `y(0) = y0`, `t ∈ [0, T]`, `0 < α <= 1`.
//!
//! The vector field is projected onto `P_0..P_{s-1}` with the matching Gauss
//! rule, giving the quasi-polynomial
//!
//! ```text
//! σ(cT) = y0 + T^α Σ_j γ_j I^α P_j(c)
//! ```
//!
//! whose coefficients solve the fixed-point system
//! `γ_j = (1/ν_j) Σ_i b_i P_j(c_i) f(c_i T, σ(c_i T))`.
//! The system is iterated by plain Picard sweeps starting from `γ = 0`; every
//! sweep evaluates `f` at all nodes against the previous iterate.

use std::fmt;
use std::sync::Arc;

use crate::basis::RecurrenceBasis;
use crate::error::{FracError, Result};
use crate::frac_integrals::{integral_matrix, IntegralBackend, IntegralEvaluator};
use crate::quadrature::QuadratureRule;

pub type RhsFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Number of points of the uniform error grid on `[0, T]`.
pub const ERROR_GRID_POINTS: usize = 1001;

#[derive(Clone)]
pub struct FractionalIvp {
    pub alpha: f64,
    pub horizon: f64,
    pub y0: f64,
    pub rhs: RhsFn,
}

impl fmt::Debug for FractionalIvp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FractionalIvp")
            .field("alpha", &self.alpha)
            .field("horizon", &self.horizon)
            .field("y0", &self.y0)
            .finish_non_exhaustive()
    }
}

impl FractionalIvp {
    pub fn new<F>(alpha: f64, horizon: f64, y0: f64, rhs: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let ivp = FractionalIvp {
            alpha,
            horizon,
            y0,
            rhs: Arc::new(rhs),
        };
        ivp.validate()?;
        Ok(ivp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(FracError::Domain(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(FracError::Domain(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if !self.y0.is_finite() {
            return Err(FracError::Domain("initial value must be finite".into()));
        }
        Ok(())
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        let mut ivp = self.clone();
        ivp.horizon = horizon;
        ivp.validate()?;
        Ok(ivp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Number of expansion terms `s`.
    pub terms: usize,
    pub max_iterations: usize,
    /// Max-norm bound on the change of `γ` between sweeps.
    pub tolerance: f64,
    pub backend: IntegralBackend,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            terms: 10,
            max_iterations: 200,
            tolerance: 1e-14,
            backend: IntegralBackend::Recurrence,
        }
    }
}

impl SolverConfig {
    pub fn with_terms(terms: usize) -> Self {
        SolverConfig {
            terms,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.terms == 0 {
            return Err(FracError::Domain("number of terms must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(FracError::Domain("max_iterations must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(FracError::Domain("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationReport {
    pub iterations: usize,
    pub residual: f64,
}

/// `σ(t) = y0 + h^α Σ_j γ_j I^α P_j(t/T)` with `h = T`.
#[derive(Debug, Clone)]
pub struct QuasiPolynomialSolution {
    pub gamma: Vec<f64>,
    pub alpha: f64,
    pub horizon: f64,
    pub y0: f64,
    pub report: IterationReport,
    evaluator: IntegralEvaluator,
}

impl QuasiPolynomialSolution {
    pub fn backend(&self) -> IntegralBackend {
        self.evaluator.backend()
    }

    /// Step length `h`; the whole horizon is one step.
    pub fn step(&self) -> f64 {
        self.horizon
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t <= self.horizon) {
            return Err(FracError::Domain(format!(
                "t = {t} outside [0, {}]",
                self.horizon
            )));
        }
        if t == 0.0 {
            return Ok(self.y0);
        }
        let integrals = self.evaluator.eval(t / self.horizon)?;
        let sum: f64 = self
            .gamma
            .iter()
            .zip(&integrals)
            .map(|(g, i)| g * i)
            .sum();
        Ok(self.y0 + self.step().powf(self.alpha) * sum)
    }
}

/// Solves with the built-in Gauss rule of `basis`.
pub fn solve(
    ivp: &FractionalIvp,
    basis: &RecurrenceBasis,
    cfg: &SolverConfig,
) -> Result<QuasiPolynomialSolution> {
    cfg.validate()?;
    let rule = QuadratureRule::for_basis(basis, cfg.terms)?;
    solve_with_rule(ivp, basis, &rule, cfg)
}

/// Solves with an explicit Gauss rule, which must have `cfg.terms` nodes.
pub fn solve_with_rule(
    ivp: &FractionalIvp,
    basis: &RecurrenceBasis,
    rule: &QuadratureRule,
    cfg: &SolverConfig,
) -> Result<QuasiPolynomialSolution> {
    ivp.validate()?;
    cfg.validate()?;
    let s = cfg.terms;
    if rule.len() != s {
        return Err(FracError::Domain(format!(
            "rule has {} nodes but {s} terms were requested",
            rule.len()
        )));
    }

    let integrals = integral_matrix(basis, ivp.alpha, rule, cfg.backend)?;
    let polys: Vec<Vec<f64>> = rule.nodes.iter().map(|&c| basis.eval_all(s - 1, c)).collect();
    let inv_norms: Vec<f64> = (0..s).map(|j| 1.0 / basis.sq_norm(j)).collect();
    let scale = ivp.horizon.powf(ivp.alpha);
    let times: Vec<f64> = rule.nodes.iter().map(|&c| c * ivp.horizon).collect();

    let mut gamma = vec![0.0; s];
    let mut f_values = vec![0.0; s];
    let mut residual = f64::INFINITY;
    for iteration in 1..=cfg.max_iterations {
        for i in 0..s {
            let y: f64 = ivp.y0
                + scale
                    * integrals
                        .row(i)
                        .iter()
                        .zip(&gamma)
                        .map(|(m, g)| m * g)
                        .sum::<f64>();
            let f = (ivp.rhs)(times[i], y);
            if !f.is_finite() {
                return Err(FracError::NonFinite {
                    iteration,
                    node: i,
                    t: times[i],
                    y,
                });
            }
            f_values[i] = f;
        }
        residual = 0.0;
        for j in 0..s {
            let mut acc = 0.0;
            for i in 0..s {
                acc += rule.weights[i] * polys[i][j] * f_values[i];
            }
            let updated = acc * inv_norms[j];
            residual = f64::max(residual, (updated - gamma[j]).abs());
            gamma[j] = updated;
        }
        if residual <= cfg.tolerance {
            return Ok(QuasiPolynomialSolution {
                gamma,
                alpha: ivp.alpha,
                horizon: ivp.horizon,
                y0: ivp.y0,
                report: IterationReport {
                    iterations: iteration,
                    residual,
                },
                evaluator: IntegralEvaluator::new(basis, ivp.alpha, s - 1, cfg.backend)?,
            });
        }
    }
    Err(FracError::NotConverged {
        iterations: cfg.max_iterations,
        residual,
    })
}

/// `evaluate` as a free function.
pub fn evaluate(sol: &QuasiPolynomialSolution, t: f64) -> Result<f64> {
    sol.evaluate(t)
}

/// Max-abs difference between `exact` and `sol` on the uniform 1001-point grid.
pub fn grid_error<E: Fn(f64) -> f64>(sol: &QuasiPolynomialSolution, exact: &E) -> Result<f64> {
    let n = ERROR_GRID_POINTS - 1;
    let mut worst: f64 = 0.0;
    for k in 0..=n {
        let t = if k == n {
            sol.horizon
        } else {
            sol.horizon * k as f64 / n as f64
        };
        let err = (exact(t) - sol.evaluate(t)?).abs();
        if err.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(err);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorPoint {
    pub s: usize,
    /// NaN when the solve failed.
    pub error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub failure: Option<String>,
}

/// `E(s)` for each `s` in `s_values`; failures are recorded per row.
pub fn error_curve<E: Fn(f64) -> f64>(
    ivp: &FractionalIvp,
    exact: &E,
    basis: &RecurrenceBasis,
    backend: IntegralBackend,
    s_values: &[usize],
    template: &SolverConfig,
) -> Result<Vec<ErrorPoint>> {
    if s_values.is_empty() {
        return Err(FracError::Domain("empty s range".into()));
    }
    if s_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FracError::Domain("s range must be ascending".into()));
    }
    let mut out = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let cfg = SolverConfig {
            terms: s,
            backend,
            ..*template
        };
        let point = match solve(ivp, basis, &cfg) {
            Ok(sol) => ErrorPoint {
                s,
                error: grid_error(&sol, exact)?,
                iterations: sol.report.iterations,
                converged: true,
                failure: None,
            },
            Err(e @ FracError::NotConverged { iterations, .. }) => ErrorPoint {
                s,
                error: f64::NAN,
                iterations,
                converged: false,
                failure: Some(e.to_string()),
            },
            Err(e @ FracError::NonFinite { iteration, .. }) => ErrorPoint {
                s,
                error: f64::NAN,
                iterations: iteration,
                converged: false,
                failure: Some(e.to_string()),
            },
            Err(e) => return Err(e),
        };
        out.push(point);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_ivp(alpha: f64, horizon: f64) -> FractionalIvp {
        let g = libm::tgamma(alpha + 1.0);
        FractionalIvp::new(alpha, horizon, 0.0, move |_, _| g).unwrap()
    }

    #[test]
    fn constant_rhs_is_exact_with_one_term() {
        let ivp = constant_ivp(0.5, 1.0);
        let sol = solve(&ivp, &RecurrenceBasis::legendre(), &SolverConfig::with_terms(1)).unwrap();
        assert!((sol.gamma[0] - libm::tgamma(1.5)).abs() < 1e-15);
        assert_eq!(sol.evaluate(0.0).unwrap(), 0.0);
        assert!((sol.evaluate(0.49).unwrap() - 0.7).abs() < 1e-14);
        let err = grid_error(&sol, &|t: f64| t.sqrt()).unwrap();
        assert!(err <= 1e-15, "err={err}");
    }

    #[test]
    fn projection_of_a_basis_polynomial() {
        for basis in [
            RecurrenceBasis::legendre(),
            RecurrenceBasis::chebyshev(),
            RecurrenceBasis::chebyshev_orthonormal(),
        ] {
            let k = 3;
            let b = basis.clone();
            let horizon = 2.0;
            let ivp = FractionalIvp::new(0.7, horizon, 1.5, move |t, _| b.eval_poly(k, t / horizon))
                .unwrap();
            let sol = solve(&ivp, &basis, &SolverConfig::with_terms(6)).unwrap();
            for (j, g) in sol.gamma.iter().enumerate() {
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((g - expected).abs() < 1e-13, "{:?} j={j} γ={g}", basis.kind());
            }
            assert!(sol.report.iterations <= 2);
            assert_eq!(sol.evaluate(0.0).unwrap(), 1.5);
        }
    }

    #[test]
    fn evaluation_outside_horizon_is_rejected() {
        let ivp = constant_ivp(0.5, 0.5);
        let sol = solve(&ivp, &RecurrenceBasis::legendre(), &SolverConfig::with_terms(2)).unwrap();
        assert!(sol.evaluate(0.6).is_err());
        assert!(sol.evaluate(-1e-3).is_err());
        assert!(sol.evaluate(f64::NAN).is_err());
    }

    #[test]
    fn invalid_problems_and_configs() {
        assert!(FractionalIvp::new(1.5, 1.0, 0.0, |_, _| 0.0).is_err());
        assert!(FractionalIvp::new(0.0, 1.0, 0.0, |_, _| 0.0).is_err());
        assert!(FractionalIvp::new(0.5, 0.0, 0.0, |_, _| 0.0).is_err());
        let ivp = constant_ivp(0.5, 1.0);
        let leg = RecurrenceBasis::legendre();
        assert!(solve(&ivp, &leg, &SolverConfig::with_terms(0)).is_err());
        let cfg = SolverConfig {
            tolerance: 0.0,
            ..SolverConfig::with_terms(3)
        };
        assert!(solve(&ivp, &leg, &cfg).is_err());
    }

    #[test]
    fn divergence_and_nan_are_diagnosed() {
        let leg = RecurrenceBasis::legendre();
        // y' = 50 y on [0, 1] with y0 = 1: Picard from γ = 0 cannot settle in 5 sweeps
        let ivp = FractionalIvp::new(1.0, 1.0, 1.0, |_, y| 50.0 * y).unwrap();
        let cfg = SolverConfig {
            max_iterations: 5,
            ..SolverConfig::with_terms(4)
        };
        assert!(matches!(
            solve(&ivp, &leg, &cfg),
            Err(FracError::NotConverged { iterations: 5, .. })
        ));
        let ivp = FractionalIvp::new(0.5, 1.0, 0.0, |_, _| f64::NAN).unwrap();
        assert!(matches!(
            solve(&ivp, &leg, &SolverConfig::with_terms(3)),
            Err(FracError::NonFinite { iteration: 1, .. })
        ));
    }

    #[test]
    fn linear_test_equation_alpha_one() {
        // y' = -y, y(0) = 1 on [0, 1]
        let ivp = FractionalIvp::new(1.0, 1.0, 1.0, |_, y| -y).unwrap();
        let sol = solve(&ivp, &RecurrenceBasis::legendre(), &SolverConfig::with_terms(12)).unwrap();
        let err = grid_error(&sol, &|t: f64| (-t).exp()).unwrap();
        assert!(err < 1e-13, "err={err}");
    }

    #[test]
    fn error_curve_records_failures() {
        let leg = RecurrenceBasis::legendre();
        let ivp = FractionalIvp::new(0.5, 1.0, 0.0, |t, _| if t > 0.5 { f64::INFINITY } else { 1.0 })
            .unwrap();
        let curve = error_curve(
            &ivp,
            &|t: f64| t,
            &leg,
            IntegralBackend::Recurrence,
            &[1, 2, 3],
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(curve.len(), 3);
        assert!(curve.iter().skip(1).all(|p| !p.converged && p.error.is_nan()));
        assert!(error_curve(
            &ivp,
            &|t: f64| t,
            &leg,
            IntegralBackend::Recurrence,
            &[3, 2],
            &SolverConfig::default()
        )
        .is_err());
    }
}
