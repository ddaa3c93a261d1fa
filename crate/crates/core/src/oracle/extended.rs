//! Double-double arithmetic: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 32 significant decimal digits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::FracError;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ExtendedReal {
    hi: f64,
    lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub const PI: ExtendedReal = ExtendedReal {
    hi: std::f64::consts::PI,
    lo: 1.2246467991473532e-16,
};

pub const LN_2: ExtendedReal = ExtendedReal {
    hi: std::f64::consts::LN_2,
    lo: 2.3190468138462996e-17,
};

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal { hi: 0.0, lo: 0.0 };
    pub const ONE: ExtendedReal = ExtendedReal { hi: 1.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        ExtendedReal { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        ExtendedReal { hi: x, lo: 0.0 }
    }

    /// Exact for `|x| < 2^106`, otherwise correctly rounded in the leading part.
    pub fn from_u128(x: u128) -> Self {
        let hi = x as f64;
        // hi is an integer not exceeding 2^128, so the conversion back is exact
        // unless hi rounded up to 2^128 itself.
        let hi_int = if hi >= 3.402823669209385e38 {
            u128::MAX
        } else {
            hi as u128
        };
        let rem = if x >= hi_int {
            (x - hi_int) as f64
        } else {
            -((hi_int - x) as f64)
        };
        ExtendedReal::new(hi, rem)
    }

    pub fn from_i64(x: i64) -> Self {
        let hi = x as f64;
        let rem = (x as i128 - hi as i128) as f64;
        ExtendedReal::new(hi, rem)
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiplication by `2^k`, exact barring under/overflow.
    pub fn ldexp(self, k: i32) -> Self {
        let f = pow2(k);
        if f.is_finite() && f != 0.0 {
            ExtendedReal {
                hi: self.hi * f,
                lo: self.lo * f,
            }
        } else {
            // split to avoid intermediate overflow of the scale factor
            let h = k / 2;
            self.ldexp(h).ldexp(k - h)
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = self.lo.mul_add(b, e);
        let (hi, lo) = quick_two_sum(p, e);
        ExtendedReal { hi, lo }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                ExtendedReal::from_f64(f64::NAN)
            };
        }
        let y = ExtendedReal::from_f64(self.hi.sqrt());
        y + (self - y.sqr()) / y.mul_f64(2.0)
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            ExtendedReal::new(hi, self.lo.floor())
        } else {
            ExtendedReal { hi, lo: 0.0 }
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.7 {
            return ExtendedReal::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        if self.hi == 0.0 {
            return Self::ONE;
        }
        const SQUARINGS: i32 = 10;
        let k = (self.hi / LN_2.hi).round();
        let r = (self - LN_2.mul_f64(k)).ldexp(-SQUARINGS);

        // e^r - 1 by Taylor series; |r| < 4e-4
        let mut sum = r;
        let mut term = r;
        for n in 2..40 {
            term = (term * r) / ExtendedReal::from_f64(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 * sum.hi.abs() {
                break;
            }
        }
        // (e^r - 1) -> (e^{2r} - 1) = 2 s + s²
        for _ in 0..SQUARINGS {
            sum = sum.mul_f64(2.0) + sum.sqr();
        }
        (sum + Self::ONE).ldexp(k as i32)
    }

    /// Natural logarithm by Newton refinement of the binary64 guess.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return ExtendedReal::from_f64(if self.hi == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            });
        }
        if self == Self::ONE {
            return Self::ZERO;
        }
        let mut y = ExtendedReal::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }

    /// `self^e` for `self >= 0`; `0^e = 0` for `e > 0`.
    pub fn powf(self, e: ExtendedReal) -> Self {
        if self.is_zero() {
            return if e.hi > 0.0 { Self::ZERO } else { Self::ONE };
        }
        if self == Self::ONE {
            return Self::ONE;
        }
        (e * self.ln()).exp()
    }

    pub fn powi(self, n: u32) -> Self {
        let mut result = Self::ONE;
        let mut base = self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result * base;
            }
            base = base.sqr();
            n >>= 1;
        }
        result
    }

    /// Γ(x) for `x > 0`.
    ///
    /// Integers and half-integers use their closed forms; other arguments are
    /// shifted above 35 and evaluated with the Stirling series through the
    /// `B_24` term, whose truncation error there is below `1e-32` relative.
    pub fn gamma(self) -> Self {
        let x = self;
        if !(x.hi > 0.0) || !x.is_finite() {
            return ExtendedReal::from_f64(f64::NAN);
        }
        let twice = x.mul_f64(2.0);
        if twice.lo == 0.0 && twice.hi.fract() == 0.0 && twice.hi <= 340.0 {
            let n2 = twice.hi as u32;
            if n2 % 2 == 0 {
                // Γ(n) = (n-1)!
                let mut acc = Self::ONE;
                for k in 1..n2 / 2 {
                    acc = acc.mul_f64(k as f64);
                }
                return acc;
            }
            // Γ(n + 1/2) = √π ∏_{k=1}^{n} (k - 1/2)
            let mut acc = sqrt_pi();
            for k in 1..=n2 / 2 {
                acc = acc.mul_f64(k as f64 - 0.5);
            }
            return acc;
        }

        let mut z = x;
        let mut shift_product = Self::ONE;
        while z.hi < 35.0 {
            shift_product = shift_product * z;
            z = z + Self::ONE;
        }
        ln_gamma_stirling(z).exp() / shift_product
    }

    /// Scientific notation with `digits` significant digits (truncated, not rounded).
    pub fn to_decimal_string(self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        if !self.is_finite() {
            return format!("{}", self.to_f64());
        }
        let digits = digits.max(1);
        let negative = self.hi < 0.0;
        let mut r = self.abs();
        let mut exp10 = r.hi.log10().floor() as i32;
        r = r / ten_pow(exp10);
        if r.hi >= 10.0 {
            r = r / ExtendedReal::from_f64(10.0);
            exp10 += 1;
        } else if r.hi < 1.0 {
            r = r.mul_f64(10.0);
            exp10 -= 1;
        }
        let mut out = String::with_capacity(digits + 8);
        if negative {
            out.push('-');
        }
        for i in 0..digits {
            let mut d = r.hi.floor();
            let mut rest = r - ExtendedReal::from_f64(d);
            if rest.hi < 0.0 {
                d -= 1.0;
                rest = rest + Self::ONE;
            }
            let d = d.clamp(0.0, 9.0);
            out.push(char::from(b'0' + d as u8));
            if i == 0 && digits > 1 {
                out.push('.');
            }
            r = rest.mul_f64(10.0);
        }
        out.push_str(&format!("e{exp10}"));
        out
    }
}

fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

fn ten_pow(e: i32) -> ExtendedReal {
    let p = ExtendedReal::from_f64(10.0).powi(e.unsigned_abs());
    if e >= 0 {
        p
    } else {
        ExtendedReal::ONE / p
    }
}

pub fn sqrt_pi() -> ExtendedReal {
    static V: OnceLock<ExtendedReal> = OnceLock::new();
    *V.get_or_init(|| PI.sqrt())
}

fn half_ln_two_pi() -> ExtendedReal {
    static V: OnceLock<ExtendedReal> = OnceLock::new();
    *V.get_or_init(|| PI.mul_f64(2.0).ln().mul_f64(0.5))
}

/// `B_{2k} / (2k (2k-1))` as (numerator, denominator) for k = 1..=12.
const STIRLING_TERMS: [(f64, f64); 12] = [
    (1.0, 12.0),
    (-1.0, 360.0),
    (1.0, 1260.0),
    (-1.0, 1680.0),
    (1.0, 1188.0),
    (-691.0, 360360.0),
    (1.0, 156.0),
    (-3617.0, 122400.0),
    (43867.0, 244188.0),
    (-174611.0, 125400.0),
    (77683.0, 5796.0),
    (-236364091.0, 1506960.0),
];

fn ln_gamma_stirling(z: ExtendedReal) -> ExtendedReal {
    let inv = ExtendedReal::ONE / z;
    let inv2 = inv.sqr();
    let mut series = ExtendedReal::ZERO;
    let mut power = inv;
    for &(num, den) in &STIRLING_TERMS {
        series = series + power * ExtendedReal::from_f64(num) / ExtendedReal::from_f64(den);
        power = power * inv2;
    }
    (z - ExtendedReal::from_f64(0.5)) * z.ln() - z + half_ln_two_pi() + series
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;
    fn add(self, b: ExtendedReal) -> ExtendedReal {
        let (s0, e1) = two_sum(self.hi, b.hi);
        let (s1, e2) = two_sum(self.lo, b.lo);
        let (s0, e1) = quick_two_sum(s0, e1 + s1);
        let (hi, lo) = quick_two_sum(s0, e1 + e2);
        ExtendedReal { hi, lo }
    }
}

impl Neg for ExtendedReal {
    type Output = ExtendedReal;
    fn neg(self) -> ExtendedReal {
        ExtendedReal {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for ExtendedReal {
    type Output = ExtendedReal;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, b: ExtendedReal) -> ExtendedReal {
        self + (-b)
    }
}

impl Mul for ExtendedReal {
    type Output = ExtendedReal;
    fn mul(self, b: ExtendedReal) -> ExtendedReal {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = self.hi.mul_add(b.lo, e);
        let e = self.lo.mul_add(b.hi, e);
        let (hi, lo) = quick_two_sum(p, e);
        ExtendedReal { hi, lo }
    }
}

impl Div for ExtendedReal {
    type Output = ExtendedReal;
    fn div(self, b: ExtendedReal) -> ExtendedReal {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        ExtendedReal { hi, lo } + ExtendedReal::from_f64(q3)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        ExtendedReal::from_f64(x)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(32);
        f.write_str(&self.to_decimal_string(digits))
    }
}

impl FromStr for ExtendedReal {
    type Err = FracError;

    /// Parses `[-]digits[.digits][e[-]exp]`.
    fn from_str(s: &str) -> Result<Self, FracError> {
        let bad = || FracError::Parse(format!("invalid decimal '{s}'"));
        let t = s.trim();
        let (negative, t) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(pos) => {
                let e: i32 = t[pos + 1..].parse().map_err(|_| bad())?;
                (&t[..pos], e)
            }
            None => (t, 0),
        };
        let mut value = ExtendedReal::ZERO;
        let mut frac_digits = 0i32;
        let mut seen_point = false;
        let mut any = false;
        for ch in mantissa.chars() {
            match ch {
                '0'..='9' => {
                    value = value.mul_f64(10.0) + ExtendedReal::from_f64((ch as u8 - b'0') as f64);
                    any = true;
                    if seen_point {
                        frac_digits += 1;
                    }
                }
                '.' if !seen_point => seen_point = true,
                _ => return Err(bad()),
            }
        }
        if !any {
            return Err(bad());
        }
        let e = exponent - frac_digits;
        let value = if e >= 0 {
            value * ten_pow(e)
        } else {
            value / ten_pow(-e)
        };
        Ok(if negative { -value } else { value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: ExtendedReal, b: ExtendedReal, rel: f64) -> bool {
        let d = (a - b).abs().to_f64();
        d <= rel * b.abs().to_f64().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn basic_arithmetic_keeps_low_part() {
        let third = ExtendedReal::ONE / ExtendedReal::from_f64(3.0);
        let back = third.mul_f64(3.0);
        assert!((back - ExtendedReal::ONE).abs().to_f64() < 1e-31);
        let x = ExtendedReal::from_f64(1.0) + ExtendedReal::from_f64(1e-20);
        assert_eq!(x.hi(), 1.0);
        assert_eq!(x.lo(), 1e-20);
        let two = ExtendedReal::from_f64(2.0);
        assert!((two.sqrt().sqr() - two).abs().to_f64() < 1e-31);
    }

    #[test]
    fn exp_and_ln_are_inverse() {
        assert!(close(LN_2.exp(), ExtendedReal::from_f64(2.0), 1e-31));
        for &x in &[0.001, 0.3, 1.0, 7.5, 123.25, 1e-10] {
            let v = ExtendedReal::from_f64(x);
            assert!(close(v.ln().exp(), v, 1e-30), "x={x}");
        }
        for &x in &[-50.0, -1.0, 0.5, 40.0, 300.0] {
            let v = ExtendedReal::from_f64(x);
            assert!(close(v.exp().ln(), v, 1e-30), "x={x}");
        }
    }

    #[test]
    fn gamma_identities() {
        // Γ(1/2)² = π
        let g = ExtendedReal::from_f64(0.5).gamma();
        assert!(close(g.sqr(), PI, 1e-31));
        // the Stirling branch against the half-integer closed form
        let shifted = ExtendedReal::from_f64(2.5);
        let stirling = {
            let mut z = shifted;
            let mut prod = ExtendedReal::ONE;
            while z.hi() < 35.0 {
                prod = prod * z;
                z = z + ExtendedReal::ONE;
            }
            ln_gamma_stirling(z).exp() / prod
        };
        assert!(close(stirling, shifted.gamma(), 1e-30));
        // reflection: Γ(1/4) Γ(3/4) = π √2
        let q = ExtendedReal::from_f64(0.25).gamma() * ExtendedReal::from_f64(0.75).gamma();
        assert!(close(q, PI * ExtendedReal::from_f64(2.0).sqrt(), 1e-30));
        // duplication: Γ(x) Γ(x + 1/2) = 2^{1-2x} √π Γ(2x)
        for &x in &[0.3, 0.7, 1.3, 4.1] {
            let xd = ExtendedReal::from_f64(x);
            let lhs = xd.gamma() * (xd + ExtendedReal::from_f64(0.5)).gamma();
            let rhs = ExtendedReal::from_f64(2.0).powf(ExtendedReal::ONE - xd.mul_f64(2.0))
                * sqrt_pi()
                * xd.mul_f64(2.0).gamma();
            assert!(close(lhs, rhs, 1e-29), "x={x}");
        }
        assert_eq!(ExtendedReal::from_f64(6.0).gamma().to_f64(), 120.0);
    }

    #[test]
    fn decimal_round_trip() {
        let v: ExtendedReal = "1.12837916709551257389615890312154517".parse().unwrap();
        let expected = ExtendedReal::from_f64(2.0) / sqrt_pi();
        assert!(close(v, expected, 1e-31));
        let s = expected.to_decimal_string(30);
        assert_eq!(&s[..22], "1.12837916709551257389");
        let back: ExtendedReal = s.parse().unwrap();
        assert!(close(back, expected, 1e-29));
        assert_eq!(
            "-2.5e-3".parse::<ExtendedReal>().unwrap().to_f64(),
            -0.0025
        );
        assert!("1.2.3".parse::<ExtendedReal>().is_err());
        assert!("".parse::<ExtendedReal>().is_err());
    }

    #[test]
    fn wide_integers() {
        let x: u128 = (1u128 << 100) + 12345;
        let v = ExtendedReal::from_u128(x);
        assert_eq!(v.hi(), 2f64.powi(100));
        assert_eq!(v.lo(), 12345.0);
        assert_eq!(ExtendedReal::from_i64(-7).to_f64(), -7.0);
    }
}
