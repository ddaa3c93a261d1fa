//! Orthogonal polynomial families on `[0, 1]` given by a three-term recurrence
//!
//! ```text
//! P_0(c) = 1
//! P_j(c) = (a_j c - b_j) P_{j-1}(c) - d_j P_{j-2}(c),   j >= 1,  d_1 = 0
//! ```
//!
//! Every basis also carries its squared norms `ν_j = ∫ ω P_j²`, so that
//! projections stay correct for families that are orthogonal but not
//! orthonormal (the scaled Chebyshev recurrence has `ν_j = 1/2` for `j >= 1`).

use std::fmt;
use std::sync::Arc;

use crate::error::{FracError, Result};

/// Coefficient sequence indexed by degree.
pub type CoefficientFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// Shifted Chebyshev polynomials of the first kind, `T_j(2c - 1)`.
    Chebyshev,
    /// `√2 T_j(2c - 1)` for `j >= 1`; orthonormal for the Chebyshev weight.
    ChebyshevOrthonormal,
    /// Shifted, orthonormal Legendre polynomials.
    Legendre,
    Custom,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Chebyshev => "chebyshev",
            BasisKind::ChebyshevOrthonormal => "chebyshev-orthonormal",
            BasisKind::Legendre => "legendre",
            BasisKind::Custom => "custom",
        }
    }

    /// True for the two Chebyshev variants, which share weight and nodes.
    pub fn is_chebyshev(self) -> bool {
        matches!(self, BasisKind::Chebyshev | BasisKind::ChebyshevOrthonormal)
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BasisKind {
    type Err = FracError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chebyshev" => Ok(BasisKind::Chebyshev),
            "chebyshev-orthonormal" | "chebyshev_orthonormal" => {
                Ok(BasisKind::ChebyshevOrthonormal)
            }
            "legendre" => Ok(BasisKind::Legendre),
            other => Err(FracError::Parse(format!("unknown basis '{other}'"))),
        }
    }
}

#[derive(Clone)]
struct CustomCoefficients {
    a: CoefficientFn,
    b: CoefficientFn,
    d: CoefficientFn,
    sq_norm: CoefficientFn,
}

/// A polynomial family defined by recurrence coefficients `(a_j, b_j, d_j)`.
///
/// Coefficients are produced on demand, so the degree is unbounded.
#[derive(Clone)]
pub struct RecurrenceBasis {
    kind: BasisKind,
    custom: Option<CustomCoefficients>,
}

impl fmt::Debug for RecurrenceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RecurrenceBasis")
            .field("kind", &self.kind)
            .finish()
    }
}

impl RecurrenceBasis {
    /// Scaled Chebyshev recurrence: `a_1 = 2, b_1 = 1, a_j = 4, b_j = 2, d_j = 1`.
    pub fn chebyshev() -> Self {
        Self::builtin(BasisKind::Chebyshev)
    }

    pub fn chebyshev_orthonormal() -> Self {
        Self::builtin(BasisKind::ChebyshevOrthonormal)
    }

    /// Orthonormal shifted Legendre: `b_j = √(4 - j⁻²)`, `a_j = 2 b_j`,
    /// `d_j = (j-1)/j · √((2j+1)/(2j-3))`.
    pub fn legendre() -> Self {
        Self::builtin(BasisKind::Legendre)
    }

    pub fn from_kind(kind: BasisKind) -> Result<Self> {
        match kind {
            BasisKind::Custom => Err(FracError::Unsupported(
                "custom bases need explicit coefficients".into(),
            )),
            k => Ok(Self::builtin(k)),
        }
    }

    /// User-supplied family. Orthogonality with respect to any weight is not
    /// checked; `sq_norm` must return the squared norms that the projection
    /// step divides by.
    pub fn custom<A, B, D, N>(a: A, b: B, d: D, sq_norm: N) -> Self
    where
        A: Fn(usize) -> f64 + Send + Sync + 'static,
        B: Fn(usize) -> f64 + Send + Sync + 'static,
        D: Fn(usize) -> f64 + Send + Sync + 'static,
        N: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        RecurrenceBasis {
            kind: BasisKind::Custom,
            custom: Some(CustomCoefficients {
                a: Arc::new(a),
                b: Arc::new(b),
                d: Arc::new(d),
                sq_norm: Arc::new(sq_norm),
            }),
        }
    }

    fn builtin(kind: BasisKind) -> Self {
        RecurrenceBasis { kind, custom: None }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// `a_j` for `j >= 1`.
    pub fn a(&self, j: usize) -> f64 {
        debug_assert!(j >= 1);
        match (self.kind, &self.custom) {
            (BasisKind::Chebyshev, _) => {
                if j == 1 {
                    2.0
                } else {
                    4.0
                }
            }
            (BasisKind::ChebyshevOrthonormal, _) => {
                if j == 1 {
                    2.0 * std::f64::consts::SQRT_2
                } else {
                    4.0
                }
            }
            (BasisKind::Legendre, _) => 2.0 * legendre_b(j),
            (BasisKind::Custom, Some(c)) => (c.a)(j),
            (BasisKind::Custom, None) => unreachable!("custom basis without coefficients"),
        }
    }

    /// `b_j` for `j >= 1`.
    pub fn b(&self, j: usize) -> f64 {
        debug_assert!(j >= 1);
        match (self.kind, &self.custom) {
            (BasisKind::Chebyshev, _) => {
                if j == 1 {
                    1.0
                } else {
                    2.0
                }
            }
            (BasisKind::ChebyshevOrthonormal, _) => {
                if j == 1 {
                    std::f64::consts::SQRT_2
                } else {
                    2.0
                }
            }
            (BasisKind::Legendre, _) => legendre_b(j),
            (BasisKind::Custom, Some(c)) => (c.b)(j),
            (BasisKind::Custom, None) => unreachable!("custom basis without coefficients"),
        }
    }

    /// `d_j`; zero for `j <= 1`.
    pub fn d(&self, j: usize) -> f64 {
        if j <= 1 {
            return 0.0;
        }
        match (self.kind, &self.custom) {
            (BasisKind::Chebyshev, _) => 1.0,
            (BasisKind::ChebyshevOrthonormal, _) => {
                if j == 2 {
                    std::f64::consts::SQRT_2
                } else {
                    1.0
                }
            }
            (BasisKind::Legendre, _) => {
                let jf = j as f64;
                (jf - 1.0) / jf * ((2.0 * jf + 1.0) / (2.0 * jf - 3.0)).sqrt()
            }
            (BasisKind::Custom, Some(c)) => (c.d)(j),
            (BasisKind::Custom, None) => unreachable!("custom basis without coefficients"),
        }
    }

    /// Squared norm `ν_j = ∫₀¹ ω(c) P_j(c)² dc`.
    pub fn sq_norm(&self, j: usize) -> f64 {
        match (self.kind, &self.custom) {
            (BasisKind::Chebyshev, _) => {
                if j == 0 {
                    1.0
                } else {
                    0.5
                }
            }
            (BasisKind::ChebyshevOrthonormal | BasisKind::Legendre, _) => 1.0,
            (BasisKind::Custom, Some(c)) => (c.sq_norm)(j),
            (BasisKind::Custom, None) => unreachable!("custom basis without coefficients"),
        }
    }

    /// `P_j(c)` by forward recurrence from `P_0 = 1`.
    pub fn eval_poly(&self, j: usize, c: f64) -> f64 {
        let mut prev = 0.0;
        let mut curr = 1.0;
        for k in 1..=j {
            let next = (self.a(k) * c - self.b(k)) * curr - self.d(k) * prev;
            prev = curr;
            curr = next;
        }
        curr
    }

    /// `[P_0(c), ..., P_max_degree(c)]` in one recurrence pass.
    pub fn eval_all(&self, max_degree: usize, c: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(max_degree + 1);
        out.push(1.0);
        let mut prev = 0.0;
        let mut curr = 1.0;
        for k in 1..=max_degree {
            let next = (self.a(k) * c - self.b(k)) * curr - self.d(k) * prev;
            prev = curr;
            curr = next;
            out.push(curr);
        }
        out
    }

    /// `P_j(c)` together with `P_j'(c)`.
    pub fn eval_with_derivative(&self, j: usize, c: f64) -> (f64, f64) {
        let (mut p_prev, mut p_curr) = (0.0, 1.0);
        let (mut dp_prev, mut dp_curr) = (0.0, 0.0);
        for k in 1..=j {
            let (a, b, d) = (self.a(k), self.b(k), self.d(k));
            let p_next = (a * c - b) * p_curr - d * p_prev;
            let dp_next = a * p_curr + (a * c - b) * dp_curr - d * dp_prev;
            p_prev = p_curr;
            p_curr = p_next;
            dp_prev = dp_curr;
            dp_curr = dp_next;
        }
        (p_curr, dp_curr)
    }
}

fn legendre_b(j: usize) -> f64 {
    let jf = j as f64;
    (4.0 - 1.0 / (jf * jf)).sqrt()
}
