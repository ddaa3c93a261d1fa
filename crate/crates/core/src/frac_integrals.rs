//! Riemann–Liouville integrals `I^α P_j(c)` of recurrence-defined polynomials.
//!
//! Two backends are available:
//!
//! * [`IntegralBackend::Recurrence`] propagates `Ψ^α P_j = Γ(α) I^α P_j` with
//!   the three-term rule
//!   `Ψ^α P_j = (a_j c - b_j) Ψ^α P_{j-1} - a_j Ψ^{α+1} P_{j-1} - d_j Ψ^α P_{j-2}`,
//!   which follows from `Ψ^α (c g) = c Ψ^α g - Ψ^{α+1} g`. Computing `Ψ^α P_j`
//!   needs `Ψ^{α+k} P_0, ..., Ψ^{α+k} P_{j-1}` for higher orders `α+k`, so the
//!   values form a triangular table; only three of its columns are live at a time.
//! * [`IntegralBackend::Horner`] expands `P_j` in monomials, integrates term by
//!   term (`I^α c^i = i!/Γ(α+i+1) c^{i+α}`) and evaluates the result with a
//!   Horner scheme. Its coefficients grow exponentially with `j` and alternate
//!   in sign, so it loses accuracy through cancellation.

use std::fmt;
use std::str::FromStr;

use crate::basis::{BasisKind, RecurrenceBasis};
use crate::error::{FracError, Result};
use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegralBackend {
    Recurrence,
    Horner,
}

impl IntegralBackend {
    pub fn name(self) -> &'static str {
        match self {
            IntegralBackend::Recurrence => "recurrence",
            IntegralBackend::Horner => "horner",
        }
    }
}

impl fmt::Display for IntegralBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IntegralBackend {
    type Err = FracError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "recurrence" => Ok(IntegralBackend::Recurrence),
            "horner" => Ok(IntegralBackend::Horner),
            other => Err(FracError::Parse(format!("unknown backend '{other}'"))),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(FracError::Domain(format!("alpha must be positive, got {alpha}")))
    }
}

fn check_point(c: f64) -> Result<()> {
    if c >= 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(FracError::Domain(format!(
            "evaluation point must be non-negative, got {c}"
        )))
    }
}

/// `Ψ^α c^k = Γ(α) k!/Γ(α+k+1) c^{k+α} = k!/(α(α+1)...(α+k)) c^{k+α}`.
pub fn psi_monomial(alpha: f64, k: usize, c: f64) -> f64 {
    let mut ratio = 1.0 / alpha;
    for i in 1..=k {
        ratio *= i as f64 / (alpha + i as f64);
    }
    if c == 0.0 {
        0.0
    } else {
        ratio * ((alpha + k as f64) * c.ln()).exp()
    }
}

/// Three rolling columns of the triangular `Ψ` table at one point `c`.
///
/// After [`PsiState::new`] the current column holds `Ψ^{α+k} P_0(c)` for
/// `k = 0..len`; each [`PsiState::advance`] moves to the next degree and
/// shortens the column by one.
#[derive(Debug, Clone)]
pub struct PsiState {
    alpha: f64,
    c: f64,
    degree: usize,
    psi_prev2: Vec<f64>,
    psi_prev1: Vec<f64>,
    psi_curr: Vec<f64>,
}

impl PsiState {
    pub fn new(alpha: f64, c: f64, len: usize) -> Result<Self> {
        check_alpha(alpha)?;
        check_point(c)?;
        if len == 0 {
            return Err(FracError::Domain("table length must be at least 1".into()));
        }
        let ln_c = c.ln();
        let seed = (0..len)
            .map(|k| {
                let order = alpha + k as f64;
                if c == 0.0 {
                    0.0
                } else {
                    (order * ln_c).exp() / order
                }
            })
            .collect();
        Ok(PsiState {
            alpha,
            c,
            degree: 0,
            psi_prev2: Vec::new(),
            psi_prev1: Vec::new(),
            psi_curr: seed,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `Ψ^{α+k} P_degree(c)` for the live orders `k`.
    pub fn column(&self) -> &[f64] {
        &self.psi_curr
    }

    /// `Ψ^α P_degree(c)`.
    pub fn psi(&self) -> f64 {
        self.psi_curr[0]
    }

    /// Moves from degree `j-1` to `j`. Fails once the column is exhausted.
    pub fn advance(&mut self, basis: &RecurrenceBasis) -> Result<()> {
        let len = self.psi_curr.len();
        if len < 2 {
            return Err(FracError::Domain(
                "Ψ table exhausted; seed it with more orders".into(),
            ));
        }
        let j = self.degree + 1;
        let (a, b, d) = (basis.a(j), basis.b(j), basis.d(j));
        let shift = a * self.c - b;
        // the column two degrees back is no longer needed; reuse its buffer
        let mut next = std::mem::take(&mut self.psi_prev2);
        next.clear();
        for k in 0..len - 1 {
            let mut v = shift * self.psi_curr[k] - a * self.psi_curr[k + 1];
            if j >= 2 {
                v -= d * self.psi_prev1[k];
            }
            next.push(v);
        }
        self.psi_prev2 = std::mem::replace(&mut self.psi_prev1, std::mem::take(&mut self.psi_curr));
        self.psi_curr = next;
        self.degree = j;
        Ok(())
    }
}

/// `[I^α P_0(c), ..., I^α P_max_degree(c)]` by the `Ψ` recurrence.
pub fn compute_psi_integrals(
    basis: &RecurrenceBasis,
    alpha: f64,
    c: f64,
    max_degree: usize,
) -> Result<Vec<f64>> {
    let mut state = PsiState::new(alpha, c, max_degree + 1)?;
    let gamma = libm::tgamma(alpha);
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(state.psi() / gamma);
    for _ in 0..max_degree {
        state.advance(basis)?;
        out.push(state.psi() / gamma);
    }
    Ok(out)
}

/// `I^α P_j(c) = Σ_i p_i c^{i+α}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalExpansion {
    pub degree: usize,
    pub alpha: f64,
    pub coeffs: Vec<f64>,
}

/// `scale / Γ(α+1)`, falling back to log space when `Γ(α+1)` overflows.
fn leading_coefficient(scale: f64, alpha: f64) -> f64 {
    let g = libm::tgamma(alpha + 1.0);
    if g.is_finite() {
        scale / g
    } else {
        (scale.ln() - libm::lgamma(alpha + 1.0)).exp()
    }
}

fn chebyshev_expansion(j: usize, alpha: f64, scale: f64) -> Result<CanonicalExpansion> {
    check_alpha(alpha)?;
    if j == 0 {
        return Ok(CanonicalExpansion {
            degree: 0,
            alpha,
            coeffs: vec![leading_coefficient(1.0, alpha)],
        });
    }
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut coeffs = Vec::with_capacity(j + 1);
    let mut p = sign * leading_coefficient(scale, alpha);
    coeffs.push(p);
    let jf = j as f64;
    for i in 1..=j {
        let i_f = i as f64;
        // p_i / p_{i-1} = -2 (j+i-1)(j-i+1) / ((2i-1)(α+i))
        p *= -2.0 * (jf + i_f - 1.0) * (jf - i_f + 1.0) / ((2.0 * i_f - 1.0) * (alpha + i_f));
        coeffs.push(p);
    }
    Ok(CanonicalExpansion {
        degree: j,
        alpha,
        coeffs,
    })
}

/// Canonical expansion of `I^α (√2 T_j(2c-1))` (`I^α 1` for `j = 0`).
pub fn canonical_coeffs_chebyshev(j: usize, alpha: f64) -> Result<CanonicalExpansion> {
    chebyshev_expansion(j, alpha, std::f64::consts::SQRT_2)
}

/// Canonical expansion of `I^α` of the orthonormal shifted Legendre polynomial.
pub fn canonical_coeffs_legendre(j: usize, alpha: f64) -> Result<CanonicalExpansion> {
    check_alpha(alpha)?;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut coeffs = Vec::with_capacity(j + 1);
    let mut p = sign * leading_coefficient(((2 * j + 1) as f64).sqrt(), alpha);
    coeffs.push(p);
    let jf = j as f64;
    for i in 1..=j {
        let i_f = i as f64;
        // p_i / p_{i-1} = -(j+i)(j-i+1) / (i (α+i))
        p *= -(jf + i_f) * (jf - i_f + 1.0) / (i_f * (alpha + i_f));
        coeffs.push(p);
    }
    Ok(CanonicalExpansion {
        degree: j,
        alpha,
        coeffs,
    })
}

/// Canonical expansion matching the normalization of `kind`.
pub fn canonical_coeffs(kind: BasisKind, j: usize, alpha: f64) -> Result<CanonicalExpansion> {
    match kind {
        BasisKind::Chebyshev => chebyshev_expansion(j, alpha, 1.0),
        BasisKind::ChebyshevOrthonormal => canonical_coeffs_chebyshev(j, alpha),
        BasisKind::Legendre => canonical_coeffs_legendre(j, alpha),
        BasisKind::Custom => Err(FracError::Unsupported(
            "no canonical-basis formula for a custom basis".into(),
        )),
    }
}

/// `ρ_0 c^α` with `ρ_j = p_j`, `ρ_{i-1} = ρ_i c + p_{i-1}`.
pub fn horner_eval(expansion: &CanonicalExpansion, c: f64) -> f64 {
    let mut rho = 0.0;
    for &p in expansion.coeffs.iter().rev() {
        rho = rho * c + p;
    }
    if c == 0.0 {
        0.0
    } else {
        rho * c.powf(expansion.alpha)
    }
}

/// Evaluates `I^α P_0..P_max_degree` at many points with a fixed backend.
///
/// The Horner backend builds its expansions once.
#[derive(Debug, Clone)]
pub struct IntegralEvaluator {
    basis: RecurrenceBasis,
    alpha: f64,
    max_degree: usize,
    backend: IntegralBackend,
    expansions: Vec<CanonicalExpansion>,
}

impl IntegralEvaluator {
    pub fn new(
        basis: &RecurrenceBasis,
        alpha: f64,
        max_degree: usize,
        backend: IntegralBackend,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let expansions = match backend {
            IntegralBackend::Recurrence => Vec::new(),
            IntegralBackend::Horner => (0..=max_degree)
                .map(|j| canonical_coeffs(basis.kind(), j, alpha))
                .collect::<Result<_>>()?,
        };
        Ok(IntegralEvaluator {
            basis: basis.clone(),
            alpha,
            max_degree,
            backend,
            expansions,
        })
    }

    pub fn backend(&self) -> IntegralBackend {
        self.backend
    }

    pub fn eval(&self, c: f64) -> Result<Vec<f64>> {
        match self.backend {
            IntegralBackend::Recurrence => {
                compute_psi_integrals(&self.basis, self.alpha, c, self.max_degree)
            }
            IntegralBackend::Horner => {
                check_point(c)?;
                Ok(self.expansions.iter().map(|e| horner_eval(e, c)).collect())
            }
        }
    }
}

/// `[I^α P_0(c), ..., I^α P_max_degree(c)]` with the chosen backend.
pub fn fractional_integrals(
    basis: &RecurrenceBasis,
    alpha: f64,
    c: f64,
    max_degree: usize,
    backend: IntegralBackend,
) -> Result<Vec<f64>> {
    IntegralEvaluator::new(basis, alpha, max_degree, backend)?.eval(c)
}

/// `values[i][j] = I^α P_j(c_i)` over the nodes of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalIntegralMatrix {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    /// Row-major, `nodes.len() × size`.
    values: Vec<f64>,
    size: usize,
}

impl FractionalIntegralMatrix {
    pub fn rows(&self) -> usize {
        self.nodes.len()
    }

    pub fn cols(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.size..(i + 1) * self.size]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows()).map(|i| self.get(i, j)).collect()
    }
}

/// Integral matrix for `P_0..P_{s-1}` at the `s` nodes of `rule`.
pub fn integral_matrix(
    basis: &RecurrenceBasis,
    alpha: f64,
    rule: &QuadratureRule,
    backend: IntegralBackend,
) -> Result<FractionalIntegralMatrix> {
    let s = rule.len();
    if s == 0 {
        return Err(FracError::Domain("empty quadrature rule".into()));
    }
    let evaluator = IntegralEvaluator::new(basis, alpha, s - 1, backend)?;
    let mut values = Vec::with_capacity(s * s);
    for &c in &rule.nodes {
        values.extend(evaluator.eval(c)?);
    }
    Ok(FractionalIntegralMatrix {
        alpha,
        nodes: rule.nodes.clone(),
        values,
        size: s,
    })
}
