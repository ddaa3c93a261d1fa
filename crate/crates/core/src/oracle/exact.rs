//! Exact rational evaluation of the polynomial part of the canonical
//! expansions, with a single rounding at the end.
//!
//! For binary64 inputs `α = p/q` and `c = m/2^e` the sum
//! `Σ_i (-1)^{j-i} N_i · i!/∏_{k=1}^{i}(α+k) · c^i` is a rational number whose
//! numerator and denominator are formed in big integers over the common
//! denominator `∏_{k=1}^{j}(p+kq) · 2^{ej}`.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::extended::ExtendedReal;

/// `(numerator, denominator)` with `denominator > 0`, value `numerator / denominator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rational {
    pub num: BigInt,
    pub den: BigInt,
}

impl Rational {
    pub fn to_extended(&self) -> ExtendedReal {
        ratio_to_extended(&self.num, &self.den)
    }
}

/// Splits a finite binary64 value into `(mantissa, exponent)` with `x = mantissa · 2^exponent`.
pub fn decompose(x: f64) -> (BigInt, i32) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    while mant & 1 == 0 {
        mant >>= 1;
        exp += 1;
    }
    (BigInt::from(sign) * BigInt::from(mant), exp)
}

/// `x` as an exact fraction `num / den` with `den` a power of two.
pub fn f64_to_rational(x: f64) -> Rational {
    let (m, e) = decompose(x);
    if e >= 0 {
        Rational {
            num: m << (e as usize),
            den: BigInt::one(),
        }
    } else {
        Rational {
            num: m,
            den: BigInt::one() << ((-e) as usize),
        }
    }
}

/// `num / den` rounded to double-double.
pub fn ratio_to_extended(num: &BigInt, den: &BigInt) -> ExtendedReal {
    if num.is_zero() {
        return ExtendedReal::ZERO;
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let n = num.magnitude();
    let d = den.magnitude();
    // scale so that the integer quotient carries ~120 bits
    let shift = 120i64 + d.bits() as i64 - n.bits() as i64;
    let q: BigUint = if shift >= 0 {
        (n << (shift as usize)) / d
    } else {
        n / (d << ((-shift) as usize))
    };
    let q = q
        .to_u128()
        .expect("scaled quotient has at most 121 bits by construction");
    let v = ExtendedReal::from_u128(q).ldexp(-(shift as i32));
    if negative {
        -v
    } else {
        v
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Integer monomial coefficients of `T_j(2c - 1)`: entry `i` multiplies `c^i`.
pub fn shifted_chebyshev_coefficients(j: usize) -> Vec<BigInt> {
    if j == 0 {
        return vec![BigInt::one()];
    }
    (0..=j)
        .map(|i| {
            // j (j+i-1)! 4^i / ((j-i)! (2i)!)
            let num = BigInt::from(j) * factorial(j + i - 1) * (BigInt::one() << (2 * i));
            let den = factorial(j - i) * factorial(2 * i);
            debug_assert!((&num % &den).is_zero());
            let v = num / den;
            if (j - i) % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// Integer monomial coefficients of the classical shifted Legendre polynomial
/// `P_j(2c - 1)`, i.e. `(-1)^{j-i} C(j, i) C(j+i, i)`.
pub fn shifted_legendre_coefficients(j: usize) -> Vec<BigInt> {
    (0..=j)
        .map(|i| {
            let v = binomial(j, i) * binomial(j + i, i);
            if (j - i) % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// `Σ_i coeffs[i] · i!/∏_{k=1}^{i}(α+k) · c^i` exactly.
///
/// Multiplying by `c^α / Γ(α+1)` turns this into `I^α` of `Σ coeffs[i] c^i`.
pub fn integrated_polynomial_sum(coeffs: &[BigInt], alpha: f64, c: f64) -> Rational {
    let j = coeffs.len().saturating_sub(1);
    let a = f64_to_rational(alpha);
    let (m, e) = decompose(c);
    // c = m · 2^e; for e >= 0 fold the power into the mantissa
    let (m, e_neg) = if e >= 0 {
        (m << (e as usize), 0usize)
    } else {
        (m, (-e) as usize)
    };
    let (p, q) = (&a.num, &a.den);

    // factors (p + k q), k = 1..=j, and suffix products ∏_{k=i+1}^{j}
    let factors: Vec<BigInt> = (1..=j).map(|k| p + q * BigInt::from(k)).collect();
    let mut suffix = vec![BigInt::one(); j + 1];
    for i in (0..j).rev() {
        suffix[i] = &suffix[i + 1] * &factors[i];
    }

    let mut total = BigInt::zero();
    let mut fact = BigInt::one(); // i!
    let mut q_pow = BigInt::one(); // q^i
    let mut m_pow = BigInt::one(); // m^i
    for (i, coeff) in coeffs.iter().enumerate() {
        if i > 0 {
            fact *= BigInt::from(i);
            q_pow *= q;
            m_pow *= &m;
        }
        if coeff.is_zero() {
            continue;
        }
        let term = coeff * &fact * &q_pow * &suffix[i] * &m_pow;
        total += term << (e_neg * (j - i));
    }
    let den = &suffix[0] << (e_neg * j);
    Rational { num: total, den }
}

/// Largest `|coeffs[i]|` as a float, for magnitude diagnostics.
pub fn max_abs(coeffs: &[BigInt]) -> f64 {
    coeffs
        .iter()
        .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_is_exact() {
        for &x in &[0.5, 0.3, 1.0, 3.75, 1e-300, 123456789.0, -0.1] {
            let r = f64_to_rational(x);
            assert_eq!(r.to_extended().to_f64(), x);
        }
    }

    #[test]
    fn low_degree_coefficients() {
        // T_2(2c-1) = 8c² - 8c + 1
        assert_eq!(
            shifted_chebyshev_coefficients(2),
            vec![BigInt::from(1), BigInt::from(-8), BigInt::from(8)]
        );
        // P_2(2c-1) = 6c² - 6c + 1
        assert_eq!(
            shifted_legendre_coefficients(2),
            vec![BigInt::from(1), BigInt::from(-6), BigInt::from(6)]
        );
        // T_3(2c-1) = 32c³ - 48c² + 18c - 1
        assert_eq!(
            shifted_chebyshev_coefficients(3),
            vec![
                BigInt::from(-1),
                BigInt::from(18),
                BigInt::from(-48),
                BigInt::from(32)
            ]
        );
    }

    #[test]
    fn alpha_one_sum_is_plain_antiderivative_over_c() {
        // α = 1: Σ coeff_i c^i / (i+1)
        let coeffs = shifted_legendre_coefficients(2);
        let r = integrated_polynomial_sum(&coeffs, 1.0, 0.5);
        // 1 - 6·0.5/2 + 6·0.25/3 = 1 - 1.5 + 0.5 = 0
        assert!(r.num.is_zero());
        let r = integrated_polynomial_sum(&coeffs, 1.0, 0.25);
        // 1 - 0.75 + 0.125 = 0.375
        assert_eq!(r.to_extended().to_f64(), 0.375);
    }
}
