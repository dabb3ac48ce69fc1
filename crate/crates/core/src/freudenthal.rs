//! The 56-dimensional Freudenthal space `𝔓^C = 𝔍^C ⊕ 𝔍^C ⊕ C ⊕ C`.
//!
//! Holds the maps τ and λ, the Hermitian and symplectic forms, the `SU(2)`
//! action commuting with E7, the Lie-algebra valued product `P×Q`, and the
//! two cubic covariants `T(P) = τλ((P×P)P)` and `S(P) = (P×P)τλP`.

use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jordan::{coord_weight, vee, CrossConstants, JordanElement, JordanOperator, JORDAN_DIM};
use crate::scalar::{Float, Scalar};

/// Complex dimension of the Freudenthal space.
pub const DIM: usize = 2 * JORDAN_DIM + 2;

#[derive(Clone, Debug, PartialEq)]
pub struct FreudenthalVector<S: Scalar> {
    pub x: JordanElement<S>,
    pub y: JordanElement<S>,
    pub xi: S,
    pub eta: S,
}

/// Weight of coordinate `i` in `<P, Q> = sum w_i conj(P_i) Q_i`.
pub fn weight(i: usize) -> f64 {
    if i < 2 * JORDAN_DIM {
        coord_weight(i % JORDAN_DIM) as f64
    } else {
        1.0
    }
}

impl<S: Scalar> FreudenthalVector<S> {
    pub fn new(x: JordanElement<S>, y: JordanElement<S>, xi: S, eta: S) -> Self {
        FreudenthalVector { x, y, xi, eta }
    }

    pub fn zero() -> Self {
        Self::new(JordanElement::zero(), JordanElement::zero(), S::zero(), S::zero())
    }

    /// The normal form `(r1, r2, r3; r) = (diag(r1, r2, r3), 0, r, 0)`.
    pub fn normal_form(r1: S, r2: S, r3: S, r: S) -> Self {
        Self::new(JordanElement::diag(r1, r2, r3), JordanElement::zero(), r, S::zero())
    }

    pub fn normal_form_ratio(entries: [(i64, i64); 4]) -> Self {
        let [a, b, c, d] = entries.map(|(p, q)| S::from_ratio(p, q));
        Self::normal_form(a, b, c, d)
    }

    pub fn basis(i: usize) -> Self {
        let mut v = vec![S::zero(); DIM];
        v[i] = S::one();
        Self::from_coords(&v)
    }

    pub fn coords(&self) -> Vec<S> {
        let mut v = self.x.coords();
        v.extend(self.y.coords());
        v.push(self.xi.clone());
        v.push(self.eta.clone());
        v
    }

    pub fn from_coords(v: &[S]) -> Self {
        assert_eq!(v.len(), DIM);
        Self::new(
            JordanElement::from_coords(&v[..JORDAN_DIM]),
            JordanElement::from_coords(&v[JORDAN_DIM..2 * JORDAN_DIM]),
            v[2 * JORDAN_DIM].clone(),
            v[2 * JORDAN_DIM + 1].clone(),
        )
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.x.scale(s), self.y.scale(s), self.xi.clone() * s.clone(), self.eta.clone() * s.clone())
    }

    pub fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self.scale(&S::from_ratio(num, den))
    }

    /// `λ(X, Y, ξ, η) = (Y, −X, η, −ξ)`.
    pub fn lambda(&self) -> Self {
        Self::new(self.y.clone(), -self.x.clone(), self.eta.clone(), -self.xi.clone())
    }

    /// Complex conjugation τ.
    pub fn tau(&self) -> Self {
        Self::new(self.x.tau(), self.y.tau(), self.xi.conj(), self.eta.conj())
    }

    pub fn tau_lambda(&self) -> Self {
        self.lambda().tau()
    }

    /// Hermitian inner product `<P, Q> = <X,Z> + <Y,W> + τ(ξ)ζ + τ(η)ω`.
    pub fn herm_inner(&self, other: &Self) -> S {
        self.x.herm_inner(&other.x)
            + self.y.herm_inner(&other.y)
            + self.xi.conj() * other.xi.clone()
            + self.eta.conj() * other.eta.clone()
    }

    pub fn norm_sq(&self) -> S {
        self.herm_inner(self)
    }

    /// Symplectic form `{P, Q} = (X,W) − (Z,Y) + ξω − ζη`.
    pub fn symp(&self, other: &Self) -> S {
        self.x.inner(&other.y) - other.x.inner(&self.y) + self.xi.clone() * other.eta.clone()
            - other.xi.clone() * self.eta.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.xi.is_zero() && self.eta.is_zero()
    }

    pub fn to_float(&self) -> FreudenthalVector<Float> {
        FreudenthalVector::from_coords(&self.coords().iter().map(|s| s.to_c64()).collect::<Vec<_>>())
    }
}

impl FreudenthalVector<Float> {
    pub fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_vec(self.coords())
    }

    pub fn from_dvector(v: &DVector<Complex64>) -> Self {
        Self::from_coords(v.as_slice())
    }

    /// Real coordinates `(Re P_0, Im P_0, Re P_1, ...)`.
    pub fn realify(&self) -> Vec<f64> {
        self.coords().iter().flat_map(|z| [z.re, z.im]).collect()
    }

    /// Norm induced by `<,>`.
    pub fn norm(&self) -> f64 {
        self.norm_sq().re.max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coords().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl<S: Scalar> Add for FreudenthalVector<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.xi + rhs.xi, self.eta + rhs.eta)
    }
}

impl<S: Scalar> Sub for FreudenthalVector<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.xi - rhs.xi, self.eta - rhs.eta)
    }
}

impl<S: Scalar> Neg for FreudenthalVector<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(&-S::one())
    }
}

/// `A = [[a, −τb], [b, τa]]` with `|a|² + |b|² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SU2Matrix<S: Scalar> {
    pub a: S,
    pub b: S,
}

impl<S: Scalar> SU2Matrix<S> {
    /// Exact backends require `|a|² + |b|² = 1` exactly, the float backend
    /// within `1e-10`.
    pub fn new(a: S, b: S) -> Result<Self> {
        let n = a.abs_sq() + b.abs_sq();
        let ok = if S::EXACT { n == S::one() } else { (n.to_c64().re - 1.0).abs() <= 1e-10 };
        if !ok {
            return Err(Error::NonUnitary(format!("{:?}", n.to_c64())));
        }
        Ok(SU2Matrix { a, b })
    }

    pub fn identity() -> Self {
        SU2Matrix { a: S::one(), b: S::zero() }
    }

    /// Matrix product.
    pub fn mul(&self, other: &Self) -> Self {
        SU2Matrix {
            a: self.a.clone() * other.a.clone() - self.b.conj() * other.b.clone(),
            b: self.b.clone() * other.a.clone() + self.a.conj() * other.b.clone(),
        }
    }

    pub fn inverse(&self) -> Self {
        SU2Matrix { a: self.a.conj(), b: -self.b.clone() }
    }
}

impl SU2Matrix<Float> {
    /// `exp(s·H)` for `H = c0·diag(i, −i) + c1·[[0, −1], [1, 0]] + c2·[[0, i], [i, 0]]`.
    pub fn exp_generator(c: [f64; 3], s: f64) -> Self {
        let theta = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() * s;
        if theta == 0.0 {
            return Self::identity();
        }
        let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        let (u0, u1, u2) = (c[0] / n, c[1] / n, c[2] / n);
        // H/|H| squares to −1, so exp(θĤ) = cos θ + sin θ·Ĥ.
        let (cs, sn) = (theta.cos(), theta.sin());
        let a = Complex64::new(cs, sn * u0);
        let b = Complex64::new(sn * u1, sn * u2);
        SU2Matrix { a, b }
    }
}

/// `φ(A)(X, Y, ξ, η) = (aX + τ(bY), aY − τ(bX), aξ + τ(bη), aη − τ(bξ))`.
pub fn phi_su2<S: Scalar>(m: &SU2Matrix<S>, p: &FreudenthalVector<S>) -> FreudenthalVector<S> {
    let (a, b) = (&m.a, &m.b);
    let by = p.y.scale(b).tau();
    let bx = p.x.scale(b).tau();
    FreudenthalVector::new(
        p.x.scale(a) + by,
        p.y.scale(a) - bx,
        a.clone() * p.xi.clone() + (b.clone() * p.eta.clone()).conj(),
        a.clone() * p.eta.clone() - (b.clone() * p.xi.clone()).conj(),
    )
}

/// The e7 element `Φ(φ, A, B, ν)` acting on the Freudenthal space by
///
/// ```text
/// X' = φX − (ν/3)X + 2B×Y + ηA
/// Y' = 2A×X − φᵀY + (ν/3)Y + ξB
/// ξ' = (A, Y) + νξ
/// η' = (B, X) − νη
/// ```
///
/// where `φᵀ` is the adjoint of `φ` for the bilinear form `(,)`.
#[derive(Clone, Debug)]
pub struct LieElement<S: Scalar> {
    pub phi: JordanOperator<S>,
    pub a: JordanElement<S>,
    pub b: JordanElement<S>,
    pub nu: S,
    matrix: OnceLock<DMatrix<Complex64>>,
}

impl<S: Scalar> PartialEq for LieElement<S> {
    fn eq(&self, other: &Self) -> bool {
        self.phi == other.phi && self.a == other.a && self.b == other.b && self.nu == other.nu
    }
}

impl<S: Scalar> LieElement<S> {
    pub fn new(phi: JordanOperator<S>, a: JordanElement<S>, b: JordanElement<S>, nu: S) -> Self {
        LieElement { phi, a, b, nu, matrix: OnceLock::new() }
    }

    pub fn zero() -> Self {
        Self::new(JordanOperator::zero(), JordanElement::zero(), JordanElement::zero(), S::zero())
    }

    pub fn from_phi(phi: JordanOperator<S>) -> Self {
        Self::new(phi, JordanElement::zero(), JordanElement::zero(), S::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.phi.is_zero() && self.a.is_zero() && self.b.is_zero() && self.nu.is_zero()
    }

    pub fn apply(&self, p: &FreudenthalVector<S>) -> FreudenthalVector<S> {
        self.apply_with(p, &CrossConstants::default())
    }

    pub fn apply_with(&self, p: &FreudenthalVector<S>, k: &CrossConstants) -> FreudenthalVector<S> {
        let two = S::from_int(2);
        let nu3 = self.nu.clone() * S::from_ratio(1, 3);
        let phi_y = if self.phi.is_zero() { JordanElement::zero() } else { self.phi.transpose().apply(&p.y) };
        let phi_x = if self.phi.is_zero() { JordanElement::zero() } else { self.phi.apply(&p.x) };
        let x = phi_x - p.x.scale(&nu3) + self.b.cross_with(&p.y, k).scale(&two) + self.a.scale(&p.eta);
        let y = self.a.cross_with(&p.x, k).scale(&two) - phi_y + p.y.scale(&nu3) + self.b.scale(&p.xi);
        let xi = self.a.inner(&p.y) + self.nu.clone() * p.xi.clone();
        let eta = self.b.inner(&p.x) - self.nu.clone() * p.eta.clone();
        FreudenthalVector::new(x, y, xi, eta)
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.phi.scale(s), self.a.scale(s), self.b.scale(s), self.nu.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.phi.clone() + other.phi.clone(),
            self.a.clone() + other.a.clone(),
            self.b.clone() + other.b.clone(),
            self.nu.clone() + other.nu.clone(),
        )
    }

    pub fn to_float(&self) -> LieElement<Float> {
        LieElement::new(self.phi.to_float(), self.a.to_float(), self.b.to_float(), self.nu.to_c64())
    }

    /// `56 × 56` complex matrix of the action, computed once.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.matrix.get_or_init(|| {
            let f = self.to_float();
            let mut m = DMatrix::zeros(DIM, DIM);
            for j in 0..DIM {
                let col = f.apply(&FreudenthalVector::basis(j)).coords();
                for (i, v) in col.into_iter().enumerate() {
                    m[(i, j)] = v;
                }
            }
            m
        })
    }
}

impl LieElement<Float> {
    /// Real linear combination `sum c_k B_k`.
    pub fn combination(basis: &[LieElement<Float>], coeffs: &[f64]) -> Self {
        assert_eq!(basis.len(), coeffs.len());
        basis
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| **c != 0.0)
            .fold(Self::zero(), |acc, (b, c)| acc.add(&b.scale(&Complex64::new(*c, 0.0))))
    }
}

/// Constants of the product `P×Q = Φ(φ, A, B, ν)`:
/// `φ = phi·(X∨W + Z∨Y)`, `A = a·(2Y×W − ξZ − ζX)`,
/// `B = b·(2X×Z − ηW − ωY)`, `ν = nu·((X,W) + (Z,Y) − 3(ξω + ζη))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductConstants {
    pub cross: CrossConstants,
    pub phi: (i64, i64),
    pub a: (i64, i64),
    pub b: (i64, i64),
    pub nu: (i64, i64),
}

impl Default for ProductConstants {
    fn default() -> Self {
        ProductConstants { cross: CrossConstants::default(), phi: (-1, 2), a: (-1, 4), b: (1, 4), nu: (1, 8) }
    }
}

/// A single constant of the product formulas, for fault injection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Knob {
    CrossOverall,
    CrossJordan,
    CrossTraceLeft,
    CrossTraceRight,
    CrossTraceProduct,
    CrossInner,
    ProductPhi,
    ProductA,
    ProductB,
    ProductNu,
}

impl Knob {
    pub const ALL: [Knob; 10] = [
        Knob::CrossOverall,
        Knob::CrossJordan,
        Knob::CrossTraceLeft,
        Knob::CrossTraceRight,
        Knob::CrossTraceProduct,
        Knob::CrossInner,
        Knob::ProductPhi,
        Knob::ProductA,
        Knob::ProductB,
        Knob::ProductNu,
    ];

    /// Constants of the Jordan cross product `X×Y`.
    pub const CROSS: [Knob; 6] = [
        Knob::CrossOverall,
        Knob::CrossJordan,
        Knob::CrossTraceLeft,
        Knob::CrossTraceRight,
        Knob::CrossTraceProduct,
        Knob::CrossInner,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Knob::CrossOverall => "cross-overall",
            Knob::CrossJordan => "cross-jordan",
            Knob::CrossTraceLeft => "cross-trace-left",
            Knob::CrossTraceRight => "cross-trace-right",
            Knob::CrossTraceProduct => "cross-trace-product",
            Knob::CrossInner => "cross-inner",
            Knob::ProductPhi => "product-phi",
            Knob::ProductA => "product-a",
            Knob::ProductB => "product-b",
            Knob::ProductNu => "product-nu",
        }
    }

    pub fn parse(s: &str) -> Option<Knob> {
        Knob::ALL.into_iter().find(|k| k.name() == s)
    }
}

fn bump(r: (i64, i64)) -> (i64, i64) {
    (r.0 * 101, r.1 * 100)
}

impl ProductConstants {
    /// Copy with one constant multiplied by 1.01.
    pub fn perturbed(knob: Knob) -> Self {
        let mut k = Self::default();
        match knob {
            Knob::CrossOverall => k.cross.overall = bump(k.cross.overall),
            Knob::CrossJordan => k.cross.jordan = bump(k.cross.jordan),
            Knob::CrossTraceLeft => k.cross.trace_left = bump(k.cross.trace_left),
            Knob::CrossTraceRight => k.cross.trace_right = bump(k.cross.trace_right),
            Knob::CrossTraceProduct => k.cross.trace_product = bump(k.cross.trace_product),
            Knob::CrossInner => k.cross.inner = bump(k.cross.inner),
            Knob::ProductPhi => k.phi = bump(k.phi),
            Knob::ProductA => k.a = bump(k.a),
            Knob::ProductB => k.b = bump(k.b),
            Knob::ProductNu => k.nu = bump(k.nu),
        }
        k
    }
}

/// The Lie-algebra valued product `P×Q`.
pub fn cross_p<S: Scalar>(p: &FreudenthalVector<S>, q: &FreudenthalVector<S>) -> LieElement<S> {
    cross_p_with(p, q, &ProductConstants::default())
}

pub fn cross_p_with<S: Scalar>(p: &FreudenthalVector<S>, q: &FreudenthalVector<S>, k: &ProductConstants) -> LieElement<S> {
    let (x, y, xi, eta) = (&p.x, &p.y, &p.xi, &p.eta);
    let (z, w, zeta, omega) = (&q.x, &q.y, &q.xi, &q.eta);
    let two = S::from_int(2);
    let r = |c: (i64, i64)| S::from_ratio(c.0, c.1);

    let phi = if (x.is_zero() || w.is_zero()) && (z.is_zero() || y.is_zero()) {
        JordanOperator::zero()
    } else {
        (vee(x, w) + vee(z, y)).scale(&r(k.phi))
    };
    let a = (y.cross_with(w, &k.cross).scale(&two) - z.scale(xi) - x.scale(zeta)).scale(&r(k.a));
    let b = (x.cross_with(z, &k.cross).scale(&two) - w.scale(eta) - y.scale(omega)).scale(&r(k.b));
    let nu = (x.inner(w) + z.inner(y)
        - S::from_int(3) * (xi.clone() * omega.clone() + zeta.clone() * eta.clone()))
        * r(k.nu);
    LieElement::new(phi, a, b, nu)
}

/// `T(P) = τλ((P×P)P)`.
pub fn t_covariant<S: Scalar>(p: &FreudenthalVector<S>) -> FreudenthalVector<S> {
    t_covariant_with(p, &ProductConstants::default())
}

pub fn t_covariant_with<S: Scalar>(p: &FreudenthalVector<S>, k: &ProductConstants) -> FreudenthalVector<S> {
    cross_p_with(p, p, k).apply_with(p, &k.cross).tau_lambda()
}

/// `S(P) = (P×P)τλP`.
pub fn s_covariant<S: Scalar>(p: &FreudenthalVector<S>) -> FreudenthalVector<S> {
    s_covariant_with(p, &ProductConstants::default())
}

pub fn s_covariant_with<S: Scalar>(p: &FreudenthalVector<S>, k: &ProductConstants) -> FreudenthalVector<S> {
    cross_p_with(p, p, k).apply_with(&p.tau_lambda(), &k.cross)
}

/// Closed-form value of `T` on a normal form:
/// `T(r1, r2, r3; r) = (3/2)(r2 r3 r, r1 r3 r, r1 r2 r; r1 r2 r3)`.
pub fn t_diagonal_law<S: Scalar>(r1: &S, r2: &S, r3: &S, r: &S) -> FreudenthalVector<S> {
    FreudenthalVector::normal_form(
        r2.clone() * r3.clone() * r.clone(),
        r1.clone() * r3.clone() * r.clone(),
        r1.clone() * r2.clone() * r.clone(),
        r1.clone() * r2.clone() * r3.clone(),
    )
    .scale_ratio(3, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact, Exact};

    type P = FreudenthalVector<Exact>;

    fn nf(e: [i64; 4]) -> P {
        P::normal_form_ratio(e.map(|v| (v, 1)))
    }

    #[test]
    fn lambda_examples() {
        let x = JordanElement::diag(exact((1, 1), (2, 1)), Exact::from_int(3), Exact::from_int(-1));
        let y = JordanElement::e(2).scale(&Exact::i());
        let p = P::new(x.clone(), y.clone(), exact((1, 2), (0, 1)), exact((0, 1), (5, 1)));
        let l = p.lambda();
        assert_eq!(l, P::new(y, -x, p.eta.clone(), -p.xi.clone()));
        assert_eq!(l.lambda(), -p.clone());
        assert_eq!(p.tau_lambda().tau_lambda(), -p.clone());
        assert_eq!(p.tau().tau(), p);
    }

    #[test]
    fn tau_lambda_of_real_normal_form() {
        let d = JordanElement::diag(Exact::from_int(1), Exact::from_int(2), Exact::from_int(3));
        let p = P::new(d.clone(), JordanElement::zero(), Exact::from_int(5), Exact::from_int(0));
        assert_eq!(p.tau_lambda(), P::new(JordanElement::zero(), -d, Exact::from_int(0), Exact::from_int(-5)));
    }

    #[test]
    fn inner_and_symplectic() {
        let p = P::new(JordanElement::zero(), JordanElement::zero(), Exact::from_int(1), Exact::from_int(0));
        assert_eq!(p.herm_inner(&p), Exact::from_int(1));
        let q = nf([1, 2, 3, 5]) + P::new(JordanElement::e(1), JordanElement::e(3), Exact::i(), Exact::from_int(2));
        assert_eq!(q.symp(&q), Exact::from_int(0));
        assert_eq!(q.symp(&p), -p.symp(&q));
    }

    #[test]
    fn cross_of_first_slot_identity() {
        let p = P::new(JordanElement::identity(), JordanElement::zero(), Exact::from_int(0), Exact::from_int(0));
        let pp = cross_p(&p, &p);
        assert!(pp.phi.is_zero());
        assert!(pp.a.is_zero());
        assert_eq!(pp.b, JordanElement::identity().scale_ratio(1, 2));
        assert_eq!(pp.nu, Exact::from_int(0));
    }

    #[test]
    fn s_covariant_values() {
        assert!(s_covariant(&nf([0, 0, 0, 0])).is_zero());
        assert_eq!(s_covariant(&nf([1, 0, 0, 2])), nf([4, 0, 0, 2]).scale_ratio(-1, 2));
    }

    #[test]
    fn s_covariant_regression_fixture() {
        // S(1,1,1;0) = ((P×P)τλP): P×P = Φ(0, 0, E/2, 0) and τλP = (0, −E, 0, 0),
        // so only the X-slot 2B×Y = −E×E = −E survives.
        let s = s_covariant(&nf([1, 1, 1, 0]));
        assert_eq!(s, P::new(-JordanElement::identity(), JordanElement::zero(), Exact::from_int(0), Exact::from_int(0)));
    }

    #[test]
    fn su2_rejects_non_unit_exact() {
        assert!(SU2Matrix::new(Exact::from_int(1), Exact::from_int(1)).is_err());
        assert!(SU2Matrix::new(exact((3, 5), (0, 1)), exact((0, 1), (4, 5))).is_ok());
    }

    #[test]
    fn su2_identity_acts_trivially() {
        let p = nf([1, 2, 3, 5]) + P::new(JordanElement::zero(), JordanElement::e(2), Exact::i(), Exact::from_int(7));
        assert_eq!(phi_su2(&SU2Matrix::identity(), &p), p);
    }

    #[test]
    fn knob_names_round_trip() {
        for k in Knob::ALL {
            assert_eq!(Knob::parse(k.name()), Some(k));
        }
        assert_eq!(Knob::parse("nope"), None);
    }
}
