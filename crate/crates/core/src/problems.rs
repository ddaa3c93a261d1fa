//! Benchmark problems with known solutions, and problems read from TOML files.
//!
//! A problem file is a flat TOML table:
//!
//! ```toml
//! name = "relaxation"
//! alpha = 0.5
//! T = 1.0
//! y0 = 0.0
//! rhs = "-y + gamma(alpha + 1)"
//! exact = "t^alpha"          # optional
//! ```
//!
//! Expressions may use `t`, `y`, `alpha`, `+ - * / ^`, parentheses and `gamma(...)`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{FracError, Result};
use crate::expr::{Bindings, Expr, Variable};
use crate::solver::FractionalIvp;

pub type ExactFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct BenchmarkProblem {
    pub name: String,
    pub ivp: FractionalIvp,
    pub exact: Option<ExactFn>,
    pub note: String,
}

impl fmt::Debug for BenchmarkProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkProblem")
            .field("name", &self.name)
            .field("ivp", &self.ivp)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl BenchmarkProblem {
    pub fn exact_at(&self, t: f64) -> Option<f64> {
        self.exact.as_ref().map(|e| e(t))
    }

    /// Right-hand side `f(t, y)`.
    pub fn rhs(&self, t: f64, y: f64) -> f64 {
        (self.ivp.rhs)(t, y)
    }
}

/// `sign(y) |y|^p`, finite for negative iterates.
pub fn signed_pow(y: f64, p: f64) -> f64 {
    y.signum() * y.abs().powf(p)
}

/// `D^α y = -y^{3/2} + 40320/Γ(9-α) t^{8-α} - 3 Γ(5+α/2)/Γ(5-α/2) t^{4-α/2}
///          + (3/2 t^{α/2} - t^4)^3 + 9/4 Γ(α+1)`, `y(0) = 0`,
/// with solution `y = t^8 - 3 t^{4+α/2} + 9/4 t^α`.
pub fn garrappa_problem(alpha: f64, horizon: f64) -> Result<BenchmarkProblem> {
    let c8 = 40320.0 / libm::tgamma(9.0 - alpha);
    let c4 = 3.0 * libm::tgamma(5.0 + alpha / 2.0) / libm::tgamma(5.0 - alpha / 2.0);
    let c0 = 2.25 * libm::tgamma(alpha + 1.0);
    let rhs = move |t: f64, y: f64| {
        let inner = 1.5 * t.powf(alpha / 2.0) - t.powi(4);
        -signed_pow(y, 1.5) + c8 * t.powf(8.0 - alpha) - c4 * t.powf(4.0 - alpha / 2.0)
            + inner * inner * inner
            + c0
    };
    let exact = move |t: f64| t.powi(8) - 3.0 * t.powf(4.0 + alpha / 2.0) + 2.25 * t.powf(alpha);
    Ok(BenchmarkProblem {
        name: "garrappa".into(),
        ivp: FractionalIvp::new(alpha, horizon, 0.0, rhs)?,
        exact: Some(Arc::new(exact)),
        note: "nonlinear test problem with a non-smooth exact solution (Garrappa 2018)".into(),
    })
}

/// `D^α y = Γ(α+1)`, `y(0) = 0`, solution `t^α`.
pub fn constant_rhs_problem(alpha: f64, horizon: f64) -> Result<BenchmarkProblem> {
    let g = libm::tgamma(alpha + 1.0);
    Ok(BenchmarkProblem {
        name: "constant".into(),
        ivp: FractionalIvp::new(alpha, horizon, 0.0, move |_, _| g)?,
        exact: Some(Arc::new(move |t: f64| t.powf(alpha))),
        note: "constant right-hand side; one expansion term is exact".into(),
    })
}

pub fn builtin(name: &str, alpha: f64, horizon: f64) -> Result<BenchmarkProblem> {
    match name {
        "garrappa" => garrappa_problem(alpha, horizon),
        "constant" => constant_rhs_problem(alpha, horizon),
        other => Err(FracError::Parse(format!("unknown problem '{other}'"))),
    }
}

pub const BUILTIN_NAMES: [&str; 2] = ["garrappa", "constant"];

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub alpha: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default)]
    pub y0: f64,
    pub rhs: String,
    pub exact: Option<String>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| FracError::Parse(e.to_string()))
    }

    pub fn read<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Builds the problem, optionally overriding `alpha` and `T`.
    pub fn build(&self, alpha: Option<f64>, horizon: Option<f64>) -> Result<BenchmarkProblem> {
        let alpha = alpha.unwrap_or(self.alpha);
        let horizon = horizon.unwrap_or(self.horizon);
        let rhs = Expr::parse(&self.rhs)?;
        let rhs_fn = move |t: f64, y: f64| rhs.eval(&Bindings { t, y, alpha });
        let exact: Option<ExactFn> = match &self.exact {
            Some(src) => {
                let e = Expr::parse(src)?;
                if e.uses(Variable::Y) {
                    return Err(FracError::Parse(
                        "the exact solution may not depend on y".into(),
                    ));
                }
                Some(Arc::new(move |t: f64| e.eval(&Bindings { t, y: 0.0, alpha })))
            }
            None => None,
        };
        Ok(BenchmarkProblem {
            name: self.name.clone(),
            ivp: FractionalIvp::new(alpha, horizon, self.y0, rhs_fn)?,
            exact,
            note: "loaded from file".into(),
        })
    }
}

/// Built-in name or path to a problem file.
pub fn resolve(name_or_path: &str, alpha: Option<f64>, horizon: Option<f64>) -> Result<BenchmarkProblem> {
    if BUILTIN_NAMES.contains(&name_or_path) {
        builtin(name_or_path, alpha.unwrap_or(0.5), horizon.unwrap_or(1.0))
    } else {
        ProblemFile::read(name_or_path)?.build(alpha, horizon)
    }
}
