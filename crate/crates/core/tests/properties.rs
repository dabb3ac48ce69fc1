//! Algebraic laws on random exact inputs.

mod common;

use common::{jordan, octonion, su2, vector};
use e7orbit::freudenthal::{phi_su2, t_covariant, SU2Matrix};
use e7orbit::jordan::JordanElement;
use e7orbit::scalar::{exact, Exact, Scalar};
use num_traits::Zero;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn octonions_are_alternative(x in octonion(), y in octonion()) {
        prop_assert_eq!(&(&x * &x) * &y, &x * &(&x * &y));
        prop_assert_eq!(&(&y * &x) * &x, &y * &(&x * &x));
        // Flexible law follows from the two above.
        prop_assert_eq!(&(&x * &y) * &x, &x * &(&y * &x));
    }

    #[test]
    fn norm_is_multiplicative(x in octonion(), y in octonion()) {
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn conjugation_reverses_products(x in octonion(), y in octonion()) {
        prop_assert_eq!((&x * &y).conj(), &y.conj() * &x.conj());
        prop_assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn jordan_identity(x in jordan(), y in jordan()) {
        let xx = x.circ(&x);
        prop_assert_eq!(xx.circ(&y.circ(&x)), xx.circ(&y).circ(&x));
        prop_assert_eq!(x.circ(&y), y.circ(&x));
    }

    #[test]
    fn cross_square_is_the_adjugate(x in jordan()) {
        let adj = x.cross(&x);
        let det = x.det();
        prop_assert_eq!(adj.cross(&adj), x.scale(&det));
        prop_assert_eq!(x.circ(&adj), JordanElement::identity().scale(&det));
    }

    #[test]
    fn trace_laws(x in jordan(), y in jordan()) {
        prop_assert_eq!(x.inner(&y), x.circ(&y).trace());
        prop_assert_eq!(x.cross(&y), y.cross(&x));
        let half = Exact::from_ratio(1, 2);
        prop_assert_eq!(x.cross(&y).trace(), (x.trace() * y.trace() - x.inner(&y)) * half);
    }

    #[test]
    fn symplectic_form_is_alternating(p in vector(), q in vector()) {
        prop_assert_eq!(p.symp(&q), -q.symp(&p));
        prop_assert_eq!(p.tau_lambda().tau_lambda(), p.scale(&-Exact::from_int(1)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // φ(A) is only real-linear, so it keeps Re<,> but not the complex forms.
    #[test]
    fn su2_preserves_forms(m in su2(), p in vector(), q in vector()) {
        let (mp, mq) = (phi_su2(&m, &p), phi_su2(&m, &q));
        prop_assert_eq!(mp.norm_sq(), p.norm_sq());
        prop_assert_eq!(mp.herm_inner(&mq).re_part(), p.herm_inner(&q).re_part());
        prop_assert_eq!(phi_su2(&m.inverse(), &mp), p);
    }

    #[test]
    fn phases_scale_covariants_antilinearly(k in 0..4usize, p in vector()) {
        let a = [exact((3, 5), (4, 5)), exact((0, 1), (1, 1)), exact((5, 13), (-12, 13)), exact((-1, 1), (0, 1))][k].clone();
        let m = SU2Matrix::new(a.clone(), Exact::zero()).unwrap();
        let abar3 = a.conj() * a.conj() * a.conj();
        prop_assert_eq!(t_covariant(&phi_su2(&m, &p)), t_covariant(&p).scale(&abar3));
    }
}
