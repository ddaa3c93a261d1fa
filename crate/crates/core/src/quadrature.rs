//! Gauss rules on `[0, 1]` whose nodes are the zeros of `P_s`.
//!
//! Weights are normalized so that `Σ b_i = ∫₀¹ ω = 1`.

use std::f64::consts::PI;

use crate::basis::{BasisKind, RecurrenceBasis};
use crate::error::{FracError, Result};

const NEWTON_MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Strictly increasing, inside `(0, 1)`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: BasisKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The `s`-point rule matching the weight of `basis`.
    pub fn for_basis(basis: &RecurrenceBasis, s: usize) -> Result<Self> {
        match basis.kind() {
            BasisKind::Chebyshev | BasisKind::ChebyshevOrthonormal => {
                let mut rule = chebyshev_rule(s)?;
                rule.kind = basis.kind();
                Ok(rule)
            }
            BasisKind::Legendre => legendre_rule(s),
            BasisKind::Custom => Err(FracError::Unsupported(
                "no built-in Gauss rule for a custom basis; pass one explicitly".into(),
            )),
        }
    }

    /// `Σ b_i g(c_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&c, &w)| w * g(c))
            .sum()
    }
}

/// Chebyshev–Gauss rule for `ω(c) = (π√(c(1-c)))⁻¹`, equal weights `1/s`.
pub fn chebyshev_rule(s: usize) -> Result<QuadratureRule> {
    if s == 0 {
        return Err(FracError::Domain("quadrature size must be at least 1".into()));
    }
    let sf = s as f64;
    let nodes = symmetric_nodes(s, |i| {
        // (1 + cos θ_i)/2 written as sin² to keep the small nodes accurate
        let half = ((2 * i - 1) as f64 * PI / (4.0 * sf)).sin();
        Ok(half * half)
    })?;
    Ok(QuadratureRule {
        nodes,
        weights: vec![1.0 / sf; s],
        kind: BasisKind::Chebyshev,
    })
}

/// Gauss–Legendre rule on `[0, 1]`.
///
/// Nodes come from Newton's method on the orthonormal shifted Legendre
/// recurrence; weights are the Christoffel numbers `1 / Σ_k P_k(c_i)²`.
pub fn legendre_rule(s: usize) -> Result<QuadratureRule> {
    if s == 0 {
        return Err(FracError::Domain("quadrature size must be at least 1".into()));
    }
    let basis = RecurrenceBasis::legendre();
    let sf = s as f64;
    let nodes = symmetric_nodes(s, |i| {
        // Tricomi-type guess, written as sin² to stay accurate near c = 0
        let theta = PI * (i as f64 - 0.25) / (sf + 0.5);
        let half = (0.5 * theta).sin();
        let mut c = half * half;
        let mut last_step = f64::INFINITY;
        for _ in 0..NEWTON_MAX_ITERATIONS {
            let (p, dp) = basis.eval_with_derivative(s, c);
            let step = p / dp;
            c -= step;
            last_step = step;
            if !step.is_finite() {
                break;
            }
            if step.abs() <= 1e-15 {
                // one more step to polish small nodes to full relative accuracy
                let (p, dp) = basis.eval_with_derivative(s, c);
                c -= p / dp;
                if c > 0.0 && c < 0.5 {
                    return Ok(c);
                }
                break;
            }
        }
        Err(FracError::NodeConvergence {
            size: s,
            node: i,
            iterations: NEWTON_MAX_ITERATIONS,
            last_step,
        })
    })?;

    let weights = nodes
        .iter()
        .map(|&c| {
            let sum: f64 = basis.eval_all(s - 1, c).iter().map(|p| p * p).sum();
            1.0 / sum
        })
        .collect();

    Ok(QuadratureRule {
        nodes,
        weights,
        kind: BasisKind::Legendre,
    })
}

/// Builds ascending nodes from the lower half, mirroring `c -> 1 - c`;
/// the middle node of an odd rule is exactly 1/2.
fn symmetric_nodes<F>(s: usize, lower: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64>,
{
    let half = s / 2;
    let low: Vec<f64> = (1..=half).map(lower).collect::<Result<_>>()?;
    let mut nodes = low.clone();
    if s % 2 == 1 {
        nodes.push(0.5);
    }
    nodes.extend(low.iter().rev().map(|c| 1.0 - c));
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `∫₀¹ ω(c) c^k dc` for the Chebyshev weight: `C(2k, k) / 4^k`.
    fn chebyshev_moment(k: usize) -> f64 {
        let mut m = 1.0;
        for i in 1..=k {
            m *= (2 * i - 1) as f64 / (2 * i) as f64;
        }
        m
    }

    #[test]
    fn small_rules() {
        let r = chebyshev_rule(1).unwrap();
        assert_eq!(r.nodes, vec![0.5]);
        assert_eq!(r.weights, vec![1.0]);

        let r = chebyshev_rule(2).unwrap();
        let h = 2f64.sqrt() / 2.0;
        assert!((r.nodes[0] - (1.0 - h) / 2.0).abs() < 1e-16);
        assert!((r.nodes[1] - (1.0 + h) / 2.0).abs() < 1e-16);
        assert_eq!(r.weights, vec![0.5, 0.5]);

        let r = chebyshev_rule(3).unwrap();
        assert!((r.integrate(|c| c) - 0.5).abs() < 1e-15);

        let r = legendre_rule(1).unwrap();
        assert!((r.nodes[0] - 0.5).abs() < 1e-16);
        assert!((r.weights[0] - 1.0).abs() < 1e-16);

        let r = legendre_rule(2).unwrap();
        let off = 0.5 / 3f64.sqrt();
        assert!((r.nodes[0] - (0.5 - off)).abs() < 1e-16);
        assert!((r.nodes[1] - (0.5 + off)).abs() < 1e-16);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
        assert!((r.weights[1] - 0.5).abs() < 1e-15);

        let r = legendre_rule(5).unwrap();
        assert!((r.integrate(|c| c.powi(9)) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn zero_size_is_rejected() {
        assert!(chebyshev_rule(0).is_err());
        assert!(legendre_rule(0).is_err());
    }

    #[test]
    fn exact_for_weighted_monomials() {
        for s in 1..=20 {
            let leg = legendre_rule(s).unwrap();
            let cheb = chebyshev_rule(s).unwrap();
            for k in 0..2 * s {
                let l = leg.integrate(|c| c.powi(k as i32));
                assert!((l - 1.0 / (k as f64 + 1.0)).abs() < 1e-13, "s={s} k={k}");
                let t = cheb.integrate(|c| c.powi(k as i32));
                assert!((t - chebyshev_moment(k)).abs() < 1e-13, "s={s} k={k}");
            }
            assert!((leg.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!((cheb.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn nodes_are_zeros_of_p_s() {
        for s in 1..=30 {
            let leg = legendre_rule(s).unwrap();
            let cheb = chebyshev_rule(s).unwrap();
            let lb = RecurrenceBasis::legendre();
            let cb = RecurrenceBasis::chebyshev();
            for (&cl, &cc) in leg.nodes.iter().zip(&cheb.nodes) {
                assert!(lb.eval_poly(s, cl).abs() < 1e-12, "s={s}");
                assert!(cb.eval_poly(s, cc).abs() < 1e-12, "s={s}");
            }
        }
    }

    #[test]
    fn nodes_sorted_inside_and_interlacing() {
        for s in 1..=30 {
            for (a, b) in [
                (legendre_rule(s).unwrap(), legendre_rule(s + 1).unwrap()),
                (chebyshev_rule(s).unwrap(), chebyshev_rule(s + 1).unwrap()),
            ] {
                assert!(a.nodes.windows(2).all(|w| w[0] < w[1]));
                assert!(a.nodes.iter().all(|&c| c > 0.0 && c < 1.0));
                assert!(a.weights.iter().all(|&w| w > 0.0));
                for i in 0..s {
                    assert!(b.nodes[i] < a.nodes[i] && a.nodes[i] < b.nodes[i + 1]);
                }
            }
        }
    }

    #[test]
    fn discrete_orthogonality() {
        for basis in [
            RecurrenceBasis::legendre(),
            RecurrenceBasis::chebyshev(),
            RecurrenceBasis::chebyshev_orthonormal(),
        ] {
            for s in [1, 5, 12, 25] {
                let rule = QuadratureRule::for_basis(&basis, s).unwrap();
                let tables: Vec<Vec<f64>> =
                    rule.nodes.iter().map(|&c| basis.eval_all(s, c)).collect();
                for j in 0..s {
                    for k in 0..s {
                        if j + k > 2 * s - 1 {
                            continue;
                        }
                        let sum: f64 = rule
                            .weights
                            .iter()
                            .zip(&tables)
                            .map(|(w, p)| w * p[j] * p[k])
                            .sum();
                        let expected = if j == k { basis.sq_norm(j) } else { 0.0 };
                        assert!((sum - expected).abs() < 1e-12, "{:?} s={s} j={j} k={k}", basis);
                    }
                }
            }
        }
    }

    #[test]
    fn legendre_continuous_orthonormality() {
        let fine = legendre_rule(40).unwrap();
        let basis = RecurrenceBasis::legendre();
        for i in 0..=10 {
            for j in 0..=10 {
                let v = fine.integrate(|c| basis.eval_poly(i, c) * basis.eval_poly(j, c));
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-12);
            }
        }
    }
}
