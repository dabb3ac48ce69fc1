//! The exceptional Jordan algebra and its complexification.
//!
//! An element is a Hermitian 3×3 bioctonion matrix
//!
//! ```text
//!     | d1      x3      conj(x2) |
//!     | conj(x3) d2     x1       |
//!     | x2      conj(x1) d3      |
//! ```
//!
//! stored as its 27 coordinates (`d1, d2, d3`, then the eight coordinates of
//! `x1`, `x2`, `x3`). Products are evaluated by closed-form coordinate
//! expansions; no octonion matrix is ever formed.

use std::ops::{Add, Neg, Sub};

use crate::octonion::Bioctonion;
use crate::scalar::Scalar;

/// Real dimension of the Jordan algebra (complex dimension of its complexification).
pub const JORDAN_DIM: usize = 27;

#[derive(Clone, Debug, PartialEq)]
pub struct JordanElement<S: Scalar> {
    pub d: [S; 3],
    pub x: [Bioctonion<S>; 3],
}

/// Rational constants in the Freudenthal product
/// `X×Y = overall·(jordan·X∘Y − trace_left·tr(X)Y − trace_right·tr(Y)X
///        + (trace_product·tr(X)tr(Y) − inner·(X,Y))E)`.
///
/// Only perturbed copies differ from [`CrossConstants::default`]; they exist
/// for fault-injection runs of the verification suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossConstants {
    pub overall: (i64, i64),
    pub jordan: (i64, i64),
    pub trace_left: (i64, i64),
    pub trace_right: (i64, i64),
    pub trace_product: (i64, i64),
    pub inner: (i64, i64),
}

impl Default for CrossConstants {
    fn default() -> Self {
        CrossConstants {
            overall: (1, 2),
            jordan: (2, 1),
            trace_left: (1, 1),
            trace_right: (1, 1),
            trace_product: (1, 1),
            inner: (1, 1),
        }
    }
}

fn c<S: Scalar>(r: (i64, i64)) -> S {
    S::from_ratio(r.0, r.1)
}

impl<S: Scalar> JordanElement<S> {
    pub fn zero() -> Self {
        JordanElement {
            d: std::array::from_fn(|_| S::zero()),
            x: std::array::from_fn(|_| Bioctonion::zero()),
        }
    }

    /// The unit matrix `E`.
    pub fn identity() -> Self {
        Self::diag(S::one(), S::one(), S::one())
    }

    pub fn diag(a: S, b: S, c: S) -> Self {
        JordanElement { d: [a, b, c], x: std::array::from_fn(|_| Bioctonion::zero()) }
    }

    /// `E_k` for `k` in `1..=3`.
    pub fn e(k: usize) -> Self {
        assert!((1..=3).contains(&k), "E_k is defined for k = 1, 2, 3");
        let mut z = Self::zero();
        z.d[k - 1] = S::one();
        z
    }

    /// `F_k(x)`: the element whose only nonzero entry is the off-diagonal
    /// slot `x_k` (`k` in `1..=3`).
    pub fn off(k: usize, x: Bioctonion<S>) -> Self {
        assert!((1..=3).contains(&k), "F_k is defined for k = 1, 2, 3");
        let mut z = Self::zero();
        z.x[k - 1] = x;
        z
    }

    /// Basis vector `i` of the fixed coordinate order.
    pub fn basis(i: usize) -> Self {
        let mut coords = vec![S::zero(); JORDAN_DIM];
        coords[i] = S::one();
        Self::from_coords(&coords)
    }

    pub fn coords(&self) -> Vec<S> {
        let mut v = Vec::with_capacity(JORDAN_DIM);
        v.extend(self.d.iter().cloned());
        for o in &self.x {
            v.extend(o.c.iter().cloned());
        }
        v
    }

    pub fn from_coords(v: &[S]) -> Self {
        assert_eq!(v.len(), JORDAN_DIM);
        JordanElement {
            d: std::array::from_fn(|i| v[i].clone()),
            x: std::array::from_fn(|k| Bioctonion::new(std::array::from_fn(|i| v[3 + 8 * k + i].clone()))),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        JordanElement {
            d: std::array::from_fn(|i| self.d[i].clone() * s.clone()),
            x: std::array::from_fn(|k| self.x[k].scale(s)),
        }
    }

    pub fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self.scale(&S::from_ratio(num, den))
    }

    /// Complex conjugation τ of every coordinate.
    pub fn tau(&self) -> Self {
        JordanElement {
            d: std::array::from_fn(|i| self.d[i].conj()),
            x: std::array::from_fn(|k| self.x[k].tau()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|s| s.is_zero()) && self.x.iter().all(|o| o.is_zero())
    }

    /// Whether the element lies in the real form (every coordinate τ-fixed).
    pub fn is_real(&self) -> bool {
        self.tau() == *self
    }

    pub fn trace(&self) -> S {
        self.d[0].clone() + self.d[1].clone() + self.d[2].clone()
    }

    /// Jordan product `X∘Y = (XY + YX)/2`.
    pub fn circ(&self, other: &Self) -> Self {
        let (xi, x) = (&self.d, &self.x);
        let (eta, y) = (&other.d, &other.x);
        let half = S::from_ratio(1, 2);
        let d = std::array::from_fn(|k| {
            let (k1, k2) = ((k + 1) % 3, (k + 2) % 3);
            xi[k].clone() * eta[k].clone() + x[k1].dot(&y[k1]) + x[k2].dot(&y[k2])
        });
        let off = std::array::from_fn(|k| {
            let (k1, k2) = ((k + 1) % 3, (k + 2) % 3);
            let mixed = (&x[k1] * &y[k2] + &y[k1] * &x[k2]).conj();
            (y[k].scale(&(xi[k1].clone() + xi[k2].clone()))
                + x[k].scale(&(eta[k1].clone() + eta[k2].clone()))
                + mixed)
                .scale(&half)
        });
        JordanElement { d, x: off }
    }

    /// Symmetric bilinear inner product `(X, Y) = tr(X∘Y)`.
    pub fn inner(&self, other: &Self) -> S {
        let diag = (0..3).fold(S::zero(), |acc, k| acc + self.d[k].clone() * other.d[k].clone());
        let off = (0..3).fold(S::zero(), |acc, k| acc + self.x[k].dot(&other.x[k]));
        diag + off * S::from_int(2)
    }

    /// Hermitian inner product `<X, Y> = (τX, Y)`.
    pub fn herm_inner(&self, other: &Self) -> S {
        self.tau().inner(other)
    }

    /// Freudenthal product `X×Y`.
    pub fn cross(&self, other: &Self) -> Self {
        self.cross_with(other, &CrossConstants::default())
    }

    pub fn cross_with(&self, other: &Self, k: &CrossConstants) -> Self {
        let (tx, ty) = (self.trace(), other.trace());
        let e_coef = c::<S>(k.trace_product) * tx.clone() * ty.clone() - c::<S>(k.inner) * self.inner(other);
        let sum = self.circ(other).scale(&c(k.jordan))
            - other.scale(&(c::<S>(k.trace_left) * tx))
            - self.scale(&(c::<S>(k.trace_right) * ty))
            + Self::identity().scale(&e_coef);
        sum.scale(&c(k.overall))
    }

    /// `det X = (X, X×X)/3`.
    pub fn det(&self) -> S {
        self.inner(&self.cross(self)) * S::from_ratio(1, 3)
    }

    pub fn to_float(&self) -> JordanElement<crate::scalar::Float> {
        JordanElement::from_coords(&self.coords().iter().map(|s| s.to_c64()).collect::<Vec<_>>())
    }
}

impl<S: Scalar> Add for JordanElement<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let [a0, a1, a2] = self.d;
        let [b0, b1, b2] = rhs.d;
        let [x0, x1, x2] = self.x;
        let [y0, y1, y2] = rhs.x;
        JordanElement { d: [a0 + b0, a1 + b1, a2 + b2], x: [x0 + y0, x1 + y1, x2 + y2] }
    }
}

impl<S: Scalar> Sub for JordanElement<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for JordanElement<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(&-S::one())
    }
}

/// Linear operator on the 27-dimensional space, as a dense matrix in the
/// coordinate basis of [`JordanElement::coords`].
#[derive(Clone, Debug, PartialEq)]
pub struct JordanOperator<S: Scalar> {
    /// Row-major `27 × 27` entries.
    pub m: Vec<S>,
}

/// Weight of coordinate `i` in the bilinear form: `(X, Y) = sum w_i X_i Y_i`.
pub fn coord_weight(i: usize) -> i64 {
    if i < 3 {
        1
    } else {
        2
    }
}

impl<S: Scalar> JordanOperator<S> {
    pub fn zero() -> Self {
        JordanOperator { m: vec![S::zero(); JORDAN_DIM * JORDAN_DIM] }
    }

    pub fn identity() -> Self {
        let mut op = Self::zero();
        for i in 0..JORDAN_DIM {
            op.m[i * JORDAN_DIM + i] = S::one();
        }
        op
    }

    /// Matrix of a linear map given as a closure.
    pub fn from_linear_map(f: impl Fn(&JordanElement<S>) -> JordanElement<S>) -> Self {
        let mut op = Self::zero();
        for j in 0..JORDAN_DIM {
            let col = f(&JordanElement::basis(j)).coords();
            for (i, v) in col.into_iter().enumerate() {
                op.m[i * JORDAN_DIM + j] = v;
            }
        }
        op
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.m[i * JORDAN_DIM + j]
    }

    pub fn apply(&self, x: &JordanElement<S>) -> JordanElement<S> {
        let v = x.coords();
        let out: Vec<S> = (0..JORDAN_DIM)
            .map(|i| {
                self.m[i * JORDAN_DIM..(i + 1) * JORDAN_DIM]
                    .iter()
                    .zip(v.iter())
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect();
        JordanElement::from_coords(&out)
    }

    pub fn compose(&self, other: &Self) -> Self {
        let n = JORDAN_DIM;
        let mut out = Self::zero();
        for i in 0..n {
            for k in 0..n {
                let a = &self.m[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.m[k * n + j];
                    if !b.is_zero() {
                        out.m[i * n + j] = out.m[i * n + j].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other) - other.compose(self)
    }

    pub fn scale(&self, s: &S) -> Self {
        JordanOperator { m: self.m.iter().map(|x| x.clone() * s.clone()).collect() }
    }

    /// Adjoint with respect to the bilinear form `(,)`: `(φX, Y) = (X, φᵀY)`.
    pub fn transpose(&self) -> Self {
        let n = JORDAN_DIM;
        let mut out = Self::zero();
        for i in 0..n {
            for j in 0..n {
                let w = S::from_ratio(coord_weight(j), coord_weight(i));
                out.m[i * n + j] = self.m[j * n + i].clone() * w;
            }
        }
        out
    }

    /// Entry-wise complex conjugation, i.e. the operator `τ∘φ∘τ`.
    pub fn tau_conj(&self) -> Self {
        JordanOperator { m: self.m.iter().map(|x| x.conj()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|x| x.is_zero())
    }

    pub fn to_float(&self) -> JordanOperator<crate::scalar::Float> {
        JordanOperator { m: self.m.iter().map(|x| x.to_c64()).collect() }
    }
}

impl<S: Scalar> Add for JordanOperator<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        JordanOperator { m: self.m.into_iter().zip(rhs.m).map(|(a, b)| a + b).collect() }
    }
}

impl<S: Scalar> Sub for JordanOperator<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        JordanOperator { m: self.m.into_iter().zip(rhs.m).map(|(a, b)| a - b).collect() }
    }
}

/// The multiplication operator `Z ↦ A∘Z`.
pub fn mult_operator<S: Scalar>(a: &JordanElement<S>) -> JordanOperator<S> {
    JordanOperator::from_linear_map(|z| a.circ(z))
}

/// `X∨W = [X̃, W̃] + (X∘W − (X,W)E/3)~`, an element of the complexified e6.
pub fn vee<S: Scalar>(x: &JordanElement<S>, w: &JordanElement<S>) -> JordanOperator<S> {
    let third = S::from_ratio(1, 3);
    let xw = x.circ(w);
    let shift = x.inner(w) * third;
    JordanOperator::from_linear_map(|z| {
        x.circ(&w.circ(z)) - w.circ(&x.circ(z)) + xw.circ(z) - z.scale(&shift)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::octonion::Octonion;
    use crate::scalar::{exact, Exact};
    use num_traits::{One, Zero};

    type J = JordanElement<Exact>;

    fn q(n: i64) -> Exact {
        Exact::from_int(n)
    }

    fn sample(seed: i64) -> J {
        let coords: Vec<Exact> = (0..JORDAN_DIM as i64)
            .map(|i| exact(((i * 7 + seed * 3) % 11 - 5, 1 + (i % 3)), ((i * seed + 2) % 5 - 2, 2)))
            .collect();
        J::from_coords(&coords)
    }

    #[test]
    fn unit_and_idempotents() {
        let x = sample(3);
        assert_eq!(J::identity().circ(&x), x);
        assert!(J::e(1).circ(&J::e(2)).is_zero());
        assert_eq!(J::e(1).circ(&J::e(1)), J::e(1));
    }

    #[test]
    fn diagonal_products() {
        let a = J::diag(q(2), q(3), q(5));
        let b = J::diag(q(7), q(-1), exact((1, 2), (0, 1)));
        assert_eq!(a.circ(&b), J::diag(q(14), q(-3), exact((5, 2), (0, 1))));
        assert_eq!(a.det(), q(30));
        assert!(J::e(1).det().is_zero());
        assert_eq!(J::identity().det(), Exact::one());
    }

    #[test]
    fn inner_products() {
        assert_eq!(J::identity().inner(&J::identity()), q(3));
        assert!(J::e(1).inner(&J::e(2)).is_zero());
        let x = sample(4);
        let h = x.herm_inner(&x);
        assert!(h.im.is_zero() && h.re > num_rational::BigRational::zero());
    }

    #[test]
    fn cross_examples() {
        assert_eq!(J::identity().cross(&J::identity()), J::identity());
        assert!(J::e(1).cross(&J::e(1)).is_zero());
        let r = q(2);
        let d = J::diag(q(1), r.clone(), r.clone());
        assert_eq!(d.cross(&d), J::diag(r.clone() * r.clone(), r.clone(), r));
    }

    #[test]
    fn cross_of_off_diagonal_unit() {
        // F_1(1) × F_1(1) = -E_1 (adjugate of the 2×2 block [[0,1],[1,0]]).
        let f = J::off(1, Octonion::one());
        assert_eq!(f.cross(&f), -J::e(1));
    }

    #[test]
    fn mult_operator_examples() {
        assert_eq!(mult_operator(&J::identity()), JordanOperator::identity());
        assert_eq!(mult_operator(&J::e(1)).apply(&J::e(1)), J::e(1));
        let a = sample(5);
        let op = mult_operator(&a);
        assert_eq!(op.transpose(), op);
        let (z, w) = (sample(6), sample(7));
        assert_eq!(op.apply(&z).inner(&w), z.inner(&op.apply(&w)));
    }

    #[test]
    fn transpose_is_bilinear_adjoint() {
        let phi = vee(&sample(1), &sample(2));
        let (z, w) = (sample(8), sample(9));
        assert_eq!(phi.apply(&z).inner(&w), z.inner(&phi.transpose().apply(&w)));
    }
}
