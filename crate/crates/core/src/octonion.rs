//! Cayley algebra and its complexification.
//!
//! Octonions are built by Cayley–Dickson doubling of the quaternions with
//! the convention `(a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))`.
//! Coordinates `e0..e3` hold the first quaternion, `e4..e7` the second.
//! The same type carries real octonions (`T` a real field) and bioctonions
//! (`T` a [`Scalar`]); octonion conjugation never touches the coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Num;

use crate::scalar::Scalar;

/// Coefficient ring of an octonion.
pub trait Ring: Clone + PartialEq + std::fmt::Debug + Num + Neg<Output = Self> {}
impl<T: Clone + PartialEq + std::fmt::Debug + Num + Neg<Output = T>> Ring for T {}

#[derive(Clone, Debug, PartialEq)]
pub struct Octonion<T> {
    pub c: [T; 8],
}

/// Element of the complexified Cayley algebra.
pub type Bioctonion<S> = Octonion<S>;

type Quat<T> = [T; 4];

fn qmul<T: Ring>(a: &Quat<T>, b: &Quat<T>) -> Quat<T> {
    let [a0, a1, a2, a3] = a.clone();
    let [b0, b1, b2, b3] = b.clone();
    [
        a0.clone() * b0.clone() - a1.clone() * b1.clone() - a2.clone() * b2.clone() - a3.clone() * b3.clone(),
        a0.clone() * b1.clone() + a1.clone() * b0.clone() + a2.clone() * b3.clone() - a3.clone() * b2.clone(),
        a0.clone() * b2.clone() - a1.clone() * b3.clone() + a2.clone() * b0.clone() + a3.clone() * b1.clone(),
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ]
}

fn qconj<T: Ring>(a: &Quat<T>) -> Quat<T> {
    [a[0].clone(), -a[1].clone(), -a[2].clone(), -a[3].clone()]
}

fn qadd<T: Ring>(a: Quat<T>, b: Quat<T>) -> Quat<T> {
    let [a0, a1, a2, a3] = a;
    let [b0, b1, b2, b3] = b;
    [a0 + b0, a1 + b1, a2 + b2, a3 + b3]
}

fn qsub<T: Ring>(a: Quat<T>, b: Quat<T>) -> Quat<T> {
    let [a0, a1, a2, a3] = a;
    let [b0, b1, b2, b3] = b;
    [a0 - b0, a1 - b1, a2 - b2, a3 - b3]
}

impl<T: Ring> Octonion<T> {
    pub fn new(c: [T; 8]) -> Self {
        Octonion { c }
    }

    pub fn zero() -> Self {
        Octonion { c: std::array::from_fn(|_| T::zero()) }
    }

    pub fn one() -> Self {
        Self::unit(0)
    }

    /// Basis element `e_k`.
    pub fn unit(k: usize) -> Self {
        let mut o = Self::zero();
        o.c[k] = T::one();
        o
    }

    /// `s * e0`.
    pub fn real(s: T) -> Self {
        let mut o = Self::zero();
        o.c[0] = s;
        o
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    fn halves(&self) -> (Quat<T>, Quat<T>) {
        (
            std::array::from_fn(|i| self.c[i].clone()),
            std::array::from_fn(|i| self.c[i + 4].clone()),
        )
    }

    fn from_halves(a: Quat<T>, b: Quat<T>) -> Self {
        let [a0, a1, a2, a3] = a;
        let [b0, b1, b2, b3] = b;
        Octonion { c: [a0, a1, a2, a3, b0, b1, b2, b3] }
    }

    /// Octonion conjugation: negates `e1..e7`.
    pub fn conj(&self) -> Self {
        let mut c = self.c.clone();
        for x in c.iter_mut().skip(1) {
            *x = -x.clone();
        }
        Octonion { c }
    }

    /// Real part as a coefficient.
    pub fn re(&self) -> T {
        self.c[0].clone()
    }

    /// Symmetric bilinear form `(x, y) = sum x_i y_i = Re(x conj(y))`.
    pub fn dot(&self, other: &Self) -> T {
        self.c
            .iter()
            .zip(other.c.iter())
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    /// Quadratic norm `N(x) = x conj(x) = sum x_i^2` (bilinear, no τ).
    pub fn norm(&self) -> T {
        self.dot(self)
    }

    pub fn scale(&self, s: &T) -> Self {
        Octonion { c: std::array::from_fn(|i| self.c[i].clone() * s.clone()) }
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Octonion { c: std::array::from_fn(|i| f(&self.c[i])) }
    }
}

impl<S: Scalar> Octonion<S> {
    /// Complex conjugation τ applied coordinate-wise.
    pub fn tau(&self) -> Self {
        self.map(|x| x.conj())
    }

    /// Hermitian form `sum conj(x_i) y_i`.
    pub fn herm(&self, other: &Self) -> S {
        self.c
            .iter()
            .zip(other.c.iter())
            .fold(S::zero(), |acc, (a, b)| acc + a.conj() * b.clone())
    }
}

impl<T: Ring> Add for Octonion<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(rhs.c) {
            *x = x.clone() + y;
        }
        Octonion { c }
    }
}

impl<T: Ring> Sub for Octonion<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(rhs.c) {
            *x = x.clone() - y;
        }
        Octonion { c }
    }
}

impl<T: Ring> Neg for Octonion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x.clone())
    }
}

impl<T: Ring> Mul for &Octonion<T> {
    type Output = Octonion<T>;
    fn mul(self, rhs: &Octonion<T>) -> Octonion<T> {
        let (a, b) = self.halves();
        let (c, d) = rhs.halves();
        let left = qsub(qmul(&a, &c), qmul(&qconj(&d), &b));
        let right = qadd(qmul(&d, &a), qmul(&b, &qconj(&c)));
        Octonion::from_halves(left, right)
    }
}

impl<T: Ring> Mul for Octonion<T> {
    type Output = Octonion<T>;
    fn mul(self, rhs: Octonion<T>) -> Octonion<T> {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact, Exact};
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    type R = BigRational;

    fn ri(n: i64) -> R {
        R::from_integer(n.into())
    }

    #[test]
    fn unit_law_and_imaginary_squares() {
        let one = Octonion::<R>::one();
        assert_eq!(&one * &Octonion::unit(3), Octonion::unit(3));
        for k in 1..8 {
            let e = Octonion::<R>::unit(k);
            assert_eq!(&e * &e, Octonion::real(-R::one()), "e{k}^2");
        }
    }

    #[test]
    fn distinct_imaginary_units_anticommute() {
        for i in 1..8 {
            for j in 1..8 {
                if i == j {
                    continue;
                }
                let (a, b) = (Octonion::<R>::unit(i), Octonion::<R>::unit(j));
                let ab = &a * &b;
                assert_eq!(ab.clone() + &b * &a, Octonion::zero());
                // product of two units is again a signed unit
                assert_eq!(ab.c.iter().filter(|x| !x.is_zero()).count(), 1);
            }
        }
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(Octonion::<R>::one().conj(), Octonion::one());
        assert_eq!(Octonion::<R>::unit(5).conj(), -Octonion::unit(5));
        let x = Octonion::new(std::array::from_fn(|i| ri(i as i64 - 3)));
        let sum = x.clone() + x.conj();
        assert_eq!(sum, Octonion::real(x.re() * ri(2)));
    }

    #[test]
    fn tau_examples() {
        let ie2 = Octonion::<Exact>::unit(2).scale(&Exact::i());
        assert_eq!(ie2.tau(), -ie2.clone());
        assert_eq!(Octonion::<Exact>::unit(2).tau(), Octonion::unit(2));
        let x = Octonion::new(std::array::from_fn(|i| exact((i as i64, 3), (1 - i as i64, 2))));
        assert_eq!(x.tau().conj(), x.conj().tau());
    }
}
