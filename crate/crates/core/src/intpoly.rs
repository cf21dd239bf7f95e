//! Exact integer-coefficient univariate polynomials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use twofloat::TwoFloat;

/// A polynomial with arbitrary-width integer coefficients, stored lowest
/// degree first. The coefficient vector never has trailing zeros, so the zero
/// polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^degree`
    pub fn monomial(c: BigInt, degree: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    /// Expansion of `(1 + x)^n`.
    pub fn one_plus_x_pow(n: usize) -> Self {
        Self::new(binomial_row(n))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^k`; zero beyond the degree.
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading_coefficient(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// Multiplies by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPolynomial { coeffs }
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Exact value at an integer point.
    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Value at a real point. Horner's scheme runs in double-double
    /// arithmetic with each coefficient split into two binary64 words, so the
    /// alternating large coefficients of high-degree polynomials do not lose
    /// the result to cancellation.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let x = TwoFloat::from(x);
        self.coeffs
            .iter()
            .rev()
            .fold(TwoFloat::from(0.0), |acc, c| acc * x + bigint_to_twofloat(c))
            .hi()
    }

    /// Value at a complex point, in double-double like `eval_f64`.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let z = Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im));
        let zero = TwoFloat::from(0.0);
        let v = self.coeffs.iter().rev().fold(Complex::new(zero, zero), |acc, c| {
            acc * z + Complex::new(bigint_to_twofloat(c), zero)
        });
        Complex64::new(v.re.hi(), v.im.hi())
    }

    /// Coefficients rounded to binary64.
    pub fn to_f64_coefficients(&self) -> Vec<f64> {
        self.coeffs.iter().map(bigint_to_f64).collect()
    }

    /// Renders the polynomial with the given variable name, highest degree
    /// first, e.g. `t^4 - 2t^2 + 5`.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = c.abs();
            if k == 0 || !mag.is_one() {
                out.push_str(&mag.to_string());
            }
            match k {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{k}")),
            }
        }
        out
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

/// Serialized as the coefficient list (lowest degree first) in decimal
/// strings, so arbitrarily wide coefficients survive JSON.
impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPolynomial::new(coeffs)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Row `n` of Pascal's triangle, exact.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

fn bigint_to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(if c.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

fn bigint_to_twofloat(c: &BigInt) -> TwoFloat {
    let hi = bigint_to_f64(c);
    match BigInt::from_f64(hi) {
        Some(head) => TwoFloat::new_add(hi, bigint_to_f64(&(c - head))),
        None => TwoFloat::from(hi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_rows() {
        assert_eq!(IntPolynomial::one_plus_x_pow(0), IntPolynomial::one());
        assert_eq!(
            IntPolynomial::one_plus_x_pow(4),
            IntPolynomial::from_i64(&[1, 4, 6, 4, 1])
        );
        // C(400, 200) is far beyond 64 bits.
        let row = binomial_row(400);
        assert!(row[200].bits() > 390);
        assert_eq!(row[1], BigInt::from(400));
        assert_eq!(row[400], BigInt::one());
    }

    #[test]
    fn normalization_drops_trailing_zeros() {
        let p = IntPolynomial::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!(IntPolynomial::from_i64(&[0, 0]).is_zero());
        assert_eq!(IntPolynomial::zero().degree(), None);
    }

    #[test]
    fn arithmetic() {
        let a = IntPolynomial::from_i64(&[1, 1]);
        let b = IntPolynomial::from_i64(&[-1, 1]);
        assert_eq!(&a * &b, IntPolynomial::from_i64(&[-1, 0, 1]));
        assert_eq!(&a - &a, IntPolynomial::zero());
        assert_eq!(&a + &b, IntPolynomial::from_i64(&[0, 2]));
        assert_eq!(a.shift_up(2), IntPolynomial::from_i64(&[0, 0, 1, 1]));
        assert_eq!(
            IntPolynomial::from_i64(&[5, 0, -2, 0, 1]).derivative(),
            IntPolynomial::from_i64(&[0, -4, 0, 4])
        );
    }

    #[test]
    fn display() {
        let p = IntPolynomial::from_i64(&[5, 0, -2, 0, 1]);
        assert_eq!(p.display_with("t"), "t^4 - 2t^2 + 5");
        assert_eq!(IntPolynomial::from_i64(&[-1, 1]).to_string(), "x - 1");
        assert_eq!(IntPolynomial::from_i64(&[0, -3]).to_string(), "-3x");
    }

    #[test]
    fn double_double_evaluation_survives_cancellation() {
        // (t - 1)^30 expanded has coefficients up to C(30,15) ~ 1.5e8 with
        // alternating signs; at t = 3/2 the true value is 2^-30.
        let p = {
            let base = IntPolynomial::from_i64(&[-1, 1]);
            (0..30).fold(IntPolynomial::one(), |acc, _| &acc * &base)
        };
        let t = 1.5;
        let exact = 2f64.powi(-30);
        let got = p.eval_f64(t);
        assert!(((got - exact) / exact).abs() < 1e-6, "got {got:e}");
    }
}
