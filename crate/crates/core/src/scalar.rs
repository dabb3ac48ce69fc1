//! Complex scalar backends.
//!
//! Two backends implement [`Scalar`]: [`Exact`] (complex numbers with
//! arbitrary-precision rational parts) and [`Float`] (`Complex64`). Every
//! algebraic structure in the crate is generic over the backend so the same
//! formulas are evaluated either with zero rounding or at double precision.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};

/// Complex number with exact rational real and imaginary parts.
pub type Exact = Complex<BigRational>;

/// Double-precision complex number.
pub type Float = Complex64;

/// A complex field element. `conj` is the complex conjugation τ.
pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// `true` for the rational backend.
    const EXACT: bool;

    /// The rational number `num / den` embedded as a real scalar.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// The imaginary unit.
    fn i() -> Self;

    /// Complex conjugation τ.
    fn conj(&self) -> Self;

    /// Real part, as a scalar with zero imaginary part.
    fn re_part(&self) -> Self;

    /// `|z|^2` as a real scalar.
    fn abs_sq(&self) -> Self {
        (self.conj() * self.clone()).re_part()
    }

    fn to_c64(&self) -> Complex64;

    /// Lossy for the exact backend only in the sense that a double is
    /// converted to the rational it denotes.
    fn from_c64(z: Complex64) -> Self;

    /// Multiply by a real rational `num / den`.
    fn scale(&self, num: i64, den: i64) -> Self {
        self.clone() * Self::from_ratio(num, den)
    }
}

fn ratio(num: i64, den: i64) -> BigRational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(|| panic!("non-finite value {x} in exact mode"))
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(ratio(num, den), BigRational::zero())
    }

    fn i() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn re_part(&self) -> Self {
        Complex::new(self.re.clone(), BigRational::zero())
    }

    fn abs_sq(&self) -> Self {
        Complex::new(
            &self.re * &self.re + &self.im * &self.im,
            BigRational::zero(),
        )
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn from_c64(z: Complex64) -> Self {
        Complex::new(rational_from_f64(z.re), rational_from_f64(z.im))
    }
}

impl Scalar for Float {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn re_part(&self) -> Self {
        Complex64::new(self.re, 0.0)
    }

    fn abs_sq(&self) -> Self {
        Complex64::new(self.norm_sqr(), 0.0)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn from_c64(z: Complex64) -> Self {
        z
    }
}

/// Build an exact scalar from rational real and imaginary parts.
pub fn exact(re: (i64, i64), im: (i64, i64)) -> Exact {
    Complex::new(ratio(re.0, re.1), ratio(im.0, im.1))
}

/// Parse `"p/q"`, `"p"` or a decimal string into a rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    // Decimal literals are read as the exact decimal fraction they denote.
    let (int_part, frac_part) = s.split_once('.')?;
    let neg = int_part.starts_with('-');
    let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
    let n: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(n, den);
    Some(if neg { -r } else { r })
}

/// Format a rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_is_an_involution() {
        let z = exact((3, 4), (-5, 7));
        assert_eq!(z.conj().conj(), z);
        let w = Complex64::new(0.25, -1.5);
        assert_eq!(Scalar::conj(&Scalar::conj(&w)), w);
    }

    #[test]
    fn exact_field_axioms_on_samples() {
        let a = exact((1, 3), (2, 5));
        let b = exact((-7, 2), (1, 9));
        let c = exact((4, 1), (-3, 8));
        assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        assert_eq!(
            a.clone() * (b.clone() + c.clone()),
            a.clone() * b.clone() + a.clone() * c.clone()
        );
        assert_eq!(a.clone() * Exact::one() / a.clone(), Exact::one());
        assert_eq!(a.abs_sq(), a.conj() * a.clone());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert_eq!(format_rational(&parse_rational("-2").unwrap()), "-2");
        assert_eq!(format_rational(&parse_rational("-0.25").unwrap()), "-1/4");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("abc").is_none());
    }

    #[test]
    fn conversions() {
        let z = exact((1, 2), (-3, 4));
        assert_eq!(z.to_c64(), Complex64::new(0.5, -0.75));
        assert_eq!(Exact::from_c64(Complex64::new(0.5, -0.75)), z);
        assert_eq!(Float::from_ratio(3, 2), Complex64::new(1.5, 0.0));
    }
}
