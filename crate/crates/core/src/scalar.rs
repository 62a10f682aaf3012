//! Exact coefficient fields.
//!
//! Every series in this crate is generic over a [`Coefficient`]: an exact
//! subfield of the complex numbers that is closed under conjugation. The two
//! provided fields are the Gaussian rationals `ℚ(i)` ([`GaussianRational`],
//! the default everywhere) and the plain rationals `ℚ` (`BigRational`), which
//! is enough for real-coefficient experiments.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact field of complex numbers closed under conjugation.
pub trait Coefficient:
    Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + Send
    + Sync
    + 'static
{
    fn conj(&self) -> Self;

    fn from_rational(r: BigRational) -> Self;

    /// `sqrt(-1)`, when the field contains it.
    fn imaginary_unit() -> Option<Self>;

    fn is_real(&self) -> bool;

    /// Sign of the real part.
    fn real_sign(&self) -> Ordering;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn product(a: &Self, b: &Self) -> Self {
        let mut out = a.clone();
        out *= b;
        out
    }

    fn inverse(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Coefficient for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_rational(r: BigRational) -> Self {
        r
    }

    fn imaginary_unit() -> Option<Self> {
        None
    }

    fn is_real(&self) -> bool {
        true
    }

    fn real_sign(&self) -> Ordering {
        self.cmp(&BigRational::zero())
    }

    fn product(a: &Self, b: &Self) -> Self {
        a * b
    }
}

/// A complex number `re + im·i` with arbitrary-precision rational parts.
///
/// Both parts are kept in lowest terms with a positive denominator (this is
/// what `BigRational` maintains after every operation).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        GaussianRational {
            re: BigRational::new(re.0.into(), re.1.into()),
            im: BigRational::new(im.0.into(), im.1.into()),
        }
    }

    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    /// `|x|² = x·conj(x)`, a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }
}

impl From<BigRational> for GaussianRational {
    fn from(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        BigRational::from_integer(v.into()).into()
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return (&self.re * &rhs.re).into();
        }
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        assert!(!rhs.is_zero(), "division by zero Gaussian rational");
        let d = rhs.norm_sqr();
        GaussianRational {
            re: (&self.re * &rhs.re + &self.im * &rhs.im) / &d,
            im: (&self.im * &rhs.re - &self.re * &rhs.im) / &d,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl Coefficient for GaussianRational {
    fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn from_rational(r: BigRational) -> Self {
        r.into()
    }

    fn imaginary_unit() -> Option<Self> {
        Some(GaussianRational::i())
    }

    fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn real_sign(&self) -> Ordering {
        self.re.cmp(&BigRational::zero())
    }

    fn product(a: &Self, b: &Self) -> Self {
        a * b
    }
}

impl fmt::Display for GaussianRational {
    /// Prints in the expression grammar: `3/2`, `-i`, `1/2*i`, `3/2-1/2*i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let imag = if self.im.abs().is_one() {
            "i".to_string()
        } else {
            format!("{}*i", self.im.abs())
        };
        match (self.re.is_zero(), self.im.is_negative()) {
            (true, false) => write!(f, "{imag}"),
            (true, true) => write!(f, "-{imag}"),
            (false, false) => write!(f, "{}+{imag}", self.re),
            (false, true) => write!(f, "{}-{imag}", self.re),
        }
    }
}

/// Error from parsing a rational literal such as `-3/4`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct RationalParseError(pub String);

/// Parses `p`, `-p` or `p/q` into a rational.
pub fn parse_rational(text: &str) -> Result<BigRational, RationalParseError> {
    let err = || RationalParseError(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| err())?;
    let den = BigInt::from_str(den).map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: (i64, i64), im: (i64, i64)) -> GaussianRational {
        GaussianRational::from_parts(re, im)
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let x = g((4, -6), (0, 1));
        assert_eq!(x.re, BigRational::new((-2).into(), 3.into()));
        assert!(x.re.denom() > &BigInt::zero());
    }

    #[test]
    fn field_ops() {
        let a = g((1, 2), (3, 1));
        let b = g((-2, 1), (1, 5));
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!(&(&a + &b) - &b, a);
        let m = &a * &a.conj();
        assert!(m.im.is_zero());
        assert_eq!(m.re, a.norm_sqr());
        assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn i_squared() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from(-1));
    }

    #[test]
    fn display_forms() {
        assert_eq!(g((3, 2), (0, 1)).to_string(), "3/2");
        assert_eq!(g((0, 1), (-1, 1)).to_string(), "-i");
        assert_eq!(g((0, 1), (1, 2)).to_string(), "1/2*i");
        assert_eq!(g((3, 2), (-1, 2)).to_string(), "3/2-1/2*i");
    }

    #[test]
    fn rational_literals() {
        assert_eq!(
            parse_rational("-3/4").unwrap(),
            BigRational::new((-3).into(), 4.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
