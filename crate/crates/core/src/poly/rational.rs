//! Gaussian rationals `a + b i` with `a, b ∈ ℚ`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element of `ℚ(i)`. Both parts are kept in lowest terms with a
/// positive denominator (guaranteed by [`BigRational`]).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        Self::new(
            BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        )
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|a + bi|² = a² + b²`, exactly.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.norm_sqr();
        Some(Self::new(&self.re / &d, -(&self.im / &d)))
    }

    /// Whether printing factors out a minus sign: the real part is negative,
    /// or it is zero and the imaginary part is negative.
    pub fn sign_is_negative(&self) -> bool {
        self.re.is_negative() || (self.re.is_zero() && self.im.is_negative())
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Closest rational approximation of a float with bounded denominator,
    /// found by continued fractions. Falls back to an exact dyadic value
    /// when no small denominator meets `tol`.
    pub fn approximate(z: Complex64, max_den: i64, tol: f64) -> Self {
        Self::new(approx_rational(z.re, max_den, tol), approx_rational(z.im, max_den, tol))
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

fn approx_rational(x: f64, max_den: i64, tol: f64) -> BigRational {
    if !x.is_finite() {
        return BigRational::zero();
    }
    // Convergents p_k / q_k of the continued fraction of x.
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > max_den as i128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if ((p1 as f64) / (q1 as f64) - x).abs() <= tol * x.abs().max(1.0) {
            return BigRational::new(BigInt::from(p1), BigInt::from(q1));
        }
        let frac = rem - a;
        if frac == 0.0 {
            break;
        }
        rem = 1.0 / frac;
    }
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

impl Zero for GaussRat {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl From<i64> for GaussRat {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussRat::new(&self.re * &rhs.re, BigRational::zero());
        }
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: &GaussRat) -> GaussRat {
        self * &rhs.inv().expect("division by zero Gaussian rational")
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussRat {
            type Output = GaussRat;
            fn $m(self, rhs: GaussRat) -> GaussRat {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        -&self
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, rhs: &GaussRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, rhs: &GaussRat) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

fn fmt_rat(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl GaussRat {
    /// Writes `|self|` in grammar form and reports whether a leading minus
    /// sign was factored out. The real part of the printed value is
    /// nonnegative, since the grammar only has unsigned rationals.
    pub(crate) fn fmt_unsigned(&self, f: &mut fmt::Formatter<'_>) -> Result<bool, fmt::Error> {
        let negate = self.sign_is_negative();
        let (re, im) = if negate {
            (-self.re.clone(), -self.im.clone())
        } else {
            (self.re.clone(), self.im.clone())
        };
        if im.is_zero() {
            fmt_rat(&re, f)?;
        } else {
            write!(f, "(")?;
            fmt_rat(&re, f)?;
            write!(f, "{}", if im.is_negative() { "-" } else { "+" })?;
            fmt_rat(&im.abs(), f)?;
            write!(f, "i)")?;
        }
        Ok(negate)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        struct Unsigned<'a>(&'a GaussRat);
        impl fmt::Display for Unsigned<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_unsigned(f).map(|_| ())
            }
        }
        if self.sign_is_negative() {
            write!(f, "-")?;
        }
        write!(f, "{}", Unsigned(self))
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = GaussRat::from_parts((1, 2), (3, 1));
        let b = GaussRat::from_parts((-2, 3), (1, 5));
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!(&a - &a, GaussRat::zero());
        assert_eq!(GaussRat::i() * GaussRat::i(), GaussRat::from_int(-1));
    }

    #[test]
    fn lowest_terms() {
        let a = GaussRat::from_ratio(6, -4);
        assert_eq!(a.re.numer(), &BigInt::from(-3));
        assert_eq!(a.re.denom(), &BigInt::from(2));
    }

    #[test]
    fn display() {
        assert_eq!(GaussRat::from_parts((1, 2), (3, 1)).to_string(), "(1/2+3i)");
        assert_eq!(GaussRat::from_parts((-1, 2), (3, 1)).to_string(), "-(1/2-3i)");
        assert_eq!(GaussRat::from_parts((0, 1), (-2, 1)).to_string(), "-(0+2i)");
        assert_eq!(GaussRat::from_int(-7).to_string(), "-7");
    }

    #[test]
    fn approximate_recovers_simple_fractions() {
        let z = Complex64::new(-1.0 / 3.0, 0.25);
        assert_eq!(GaussRat::approximate(z, 1_000_000, 1e-12), GaussRat::from_parts((-1, 3), (1, 4)));
    }
}
