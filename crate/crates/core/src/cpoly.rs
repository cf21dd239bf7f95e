//! Complex polynomial evaluation in binary64 or double-double precision.

use std::fmt::{self, Debug};
use std::str::FromStr;

use num_complex::{Complex, Complex64};
use num_traits::{Float, FloatConst};
use serde::{Deserialize, Serialize, Serializer};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::graphs::{IntPolynomial, TrinomialSpec};
use crate::roots::RootSet;

/// A point of the complex plane.
pub type ComplexPoint = Complex64;

/// Membership in the closed left half-plane `Re(z) <= 0`.
pub fn in_closed_left_half_plane(z: ComplexPoint) -> bool {
    z.re <= 0.0
}

/// Serializes a point as `{"re": .., "im": ..}`.
pub fn serialize_point<S: Serializer>(z: &ComplexPoint, s: S) -> Result<S::Ok, S::Error> {
    Point::from(*z).serialize(s)
}

pub fn serialize_opt_point<S: Serializer>(z: &Option<ComplexPoint>, s: S) -> Result<S::Ok, S::Error> {
    z.map(Point::from).serialize(s)
}

pub fn serialize_points<S: Serializer>(zs: &[ComplexPoint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(zs.iter().copied().map(Point::from))
}

#[derive(Serialize)]
struct Point {
    re: f64,
    im: f64,
}

impl From<ComplexPoint> for Point {
    fn from(z: ComplexPoint) -> Self {
        Point { re: z.re, im: z.im }
    }
}

/// Working precision, applied uniformly to a whole computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// binary64
    #[default]
    Standard,
    /// double-double, about 106 significand bits
    Extended,
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Precision::Standard),
            "extended" => Ok(Precision::Extended),
            other => Err(Error::invalid(format!(
                "unknown precision {other:?} (expected standard or extended)"
            ))),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Standard => "standard",
            Precision::Extended => "extended",
        })
    }
}

/// Scalar types the evaluators and the root solver are generic over.
pub(crate) trait Real: Float + FloatConst + Debug + Send + Sync + 'static {
    /// Unit roundoff.
    const EPS: f64;

    fn lift(x: f64) -> Self;
    fn lower(self) -> f64;
}

impl Real for f64 {
    const EPS: f64 = f64::EPSILON / 2.0;

    fn lift(x: f64) -> Self {
        x
    }

    fn lower(self) -> f64 {
        self
    }
}

impl Real for TwoFloat {
    const EPS: f64 = 1.0e-32;

    fn lift(x: f64) -> Self {
        TwoFloat::from(x)
    }

    fn lower(self) -> f64 {
        self.hi() + self.lo()
    }
}

pub(crate) fn lift_c<T: Real>(z: Complex64) -> Complex<T> {
    Complex::new(T::lift(z.re), T::lift(z.im))
}

pub(crate) fn lower_c<T: Real>(z: Complex<T>) -> Complex64 {
    Complex64::new(z.re.lower(), z.im.lower())
}

/// `a / b` by Smith's method, which avoids forming `|b|^2`.
pub(crate) fn cdiv<T: Real>(a: Complex<T>, b: Complex<T>) -> Complex<T> {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let d = b.re + b.im * r;
        Complex::new((a.re + a.im * r) / d, (a.im - a.re * r) / d)
    } else {
        let r = b.re / b.im;
        let d = b.re * r + b.im;
        Complex::new((a.re * r + a.im) / d, (a.im * r - a.re) / d)
    }
}

/// Value, derivative and the scale `sum |a_k| |z|^k` by Horner's scheme.
pub(crate) fn horner<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>, T) {
    let zero = Complex::new(T::zero(), T::zero());
    let abs_z = z.norm();
    let mut value = zero;
    let mut deriv = zero;
    let mut scale = T::zero();
    for c in coeffs.iter().rev() {
        deriv = deriv * z + value;
        value = value * z + c;
        scale = scale * abs_z + c.norm();
    }
    (value, deriv, scale)
}

/// `z^e` by repeated squaring.
pub(crate) fn powu<T: Real>(z: Complex<T>, mut e: u32) -> Complex<T> {
    let mut base = z;
    let mut acc = Complex::new(T::one(), T::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        e >>= 1;
        if e > 0 {
            base = base * base;
        }
    }
    acc
}

/// Value, derivative and scale `|z|^n + |z|^m + 1` of `z^n + z^m - 1`.
pub(crate) fn trinomial_parts<T: Real>(t: &TrinomialSpec, z: Complex<T>) -> (Complex<T>, Complex<T>, T) {
    let one = Complex::new(T::one(), T::zero());
    let zm1 = powu(z, t.m() - 1);
    let zm = zm1 * z;
    let zn1 = if t.n() == t.m() {
        zm1
    } else {
        zm * powu(z, t.n() - t.m() - 1)
    };
    let zn = zn1 * z;
    let value = zn + zm - one;
    let deriv = zn1.scale(T::lift(t.n() as f64)) + zm1.scale(T::lift(t.m() as f64));
    let scale = zn.norm() + zm.norm() + T::one();
    (value, deriv, scale)
}

/// Result of an evaluation; `overflow` is set when any component of the
/// value is not finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: ComplexPoint,
    pub overflow: bool,
}

impl Evaluation {
    fn new(value: ComplexPoint) -> Self {
        Evaluation {
            value,
            overflow: !(value.re.is_finite() && value.im.is_finite()),
        }
    }
}

/// Dense complex polynomial, coefficients lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct DensePolynomial {
    coeffs: Vec<ComplexPoint>,
    precision: Precision,
}

impl DensePolynomial {
    /// Trailing zero coefficients are dropped; an all-zero input is rejected.
    pub fn new(mut coeffs: Vec<ComplexPoint>, precision: Precision) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::invalid("zero polynomial has no leading coefficient"));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::invalid("polynomial coefficients must be finite"));
        }
        Ok(DensePolynomial { coeffs, precision })
    }

    pub fn from_real(coeffs: &[f64], precision: Precision) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(), precision)
    }

    pub fn from_int_polynomial(p: &IntPolynomial, precision: Precision) -> Result<Self> {
        Self::from_real(&p.to_f64_coefficients(), precision)
    }

    pub fn coefficients(&self) -> &[ComplexPoint] {
        &self.coeffs
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading_coefficient(&self) -> ComplexPoint {
        self.coeffs[self.degree()]
    }

    pub fn derivative(&self) -> DensePolynomial {
        if self.degree() == 0 {
            return DensePolynomial {
                coeffs: vec![Complex64::new(0.0, 0.0)],
                precision: self.precision,
            };
        }
        DensePolynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
            precision: self.precision,
        }
    }

    /// Horner evaluation in the configured precision.
    pub fn evaluate(&self, z: ComplexPoint) -> Evaluation {
        let value = match self.precision {
            Precision::Standard => horner(&self.coeffs, z).0,
            Precision::Extended => {
                let coeffs: Vec<Complex<TwoFloat>> = self.coeffs.iter().map(|&c| lift_c(c)).collect();
                lower_c(horner(&coeffs, lift_c(z)).0)
            }
        };
        Evaluation::new(value)
    }

    /// `|p(z)| / sum |a_k| |z|^k`, the backward-error style residual used
    /// by the root solver.
    pub fn relative_residual(&self, z: ComplexPoint) -> f64 {
        let (v, _, s) = match self.precision {
            Precision::Standard => horner(&self.coeffs, z),
            Precision::Extended => {
                let coeffs: Vec<Complex<TwoFloat>> = self.coeffs.iter().map(|&c| lift_c(c)).collect();
                let (v, d, s) = horner(&coeffs, lift_c(z));
                (lower_c(v), lower_c(d), s.lower())
            }
        };
        relative(v.norm(), s)
    }
}

pub(crate) fn relative(abs_value: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        abs_value / scale
    } else {
        abs_value
    }
}

/// `z^n + z^m - 1` by binary powering, never through the dense expansion.
pub fn evaluate_trinomial(t: &TrinomialSpec, z: ComplexPoint, precision: Precision) -> Evaluation {
    let value = match precision {
        Precision::Standard => trinomial_parts(t, z).0,
        Precision::Extended => lower_c(trinomial_parts::<TwoFloat>(t, lift_c(z)).0),
    };
    Evaluation::new(value)
}

/// Relative residual `|Φ(z)| / (|z|^n + |z|^m + 1)`.
pub fn trinomial_relative_residual(t: &TrinomialSpec, z: ComplexPoint, precision: Precision) -> f64 {
    match precision {
        Precision::Standard => {
            let (v, _, s) = trinomial_parts(t, z);
            relative(v.norm(), s)
        }
        Precision::Extended => {
            let (v, _, s) = trinomial_parts::<TwoFloat>(t, lift_c(z));
            relative(v.norm().lower(), s.lower())
        }
    }
}

/// Maps roots in `y` to roots in `x = y - 1`.
pub fn shift_roots_to_x(roots_in_y: &RootSet) -> RootSet {
    roots_in_y.map_points(|y| y - 1.0)
}

/// Maps roots in `x` to roots in `y = x + 1`.
pub fn shift_roots_to_y(roots_in_x: &RootSet) -> RootSet {
    roots_in_x.map_points(|x| x + 1.0)
}
