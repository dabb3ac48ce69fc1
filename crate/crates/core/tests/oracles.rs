//! Independent re-computations checked against the library.

mod common;

use common::jordan;
use e7orbit::freudenthal::FreudenthalVector;
use e7orbit::jordan::{JordanElement, JORDAN_DIM};
use e7orbit::lie::E7Algebra;
use e7orbit::octonion::Octonion;
use e7orbit::scalar::{Exact, Float, Scalar};
use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

type Oct = Octonion<Exact>;

/// The Hermitian octonion matrix of a Jordan element, spelled out.
fn matrix(x: &JordanElement<Exact>) -> [[Oct; 3]; 3] {
    let r = |s: &Exact| Oct::real(s.clone());
    let [x1, x2, x3] = x.x.clone();
    [
        [r(&x.d[0]), x3.clone(), x2.conj()],
        [x3.conj(), r(&x.d[1]), x1.clone()],
        [x2, x1.conj(), r(&x.d[2])],
    ]
}

fn matmul(a: &[[Oct; 3]; 3], b: &[[Oct; 3]; 3]) -> [[Oct; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(Oct::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
    })
}

fn jordan_product_oracle(x: &JordanElement<Exact>, y: &JordanElement<Exact>) -> [[Oct; 3]; 3] {
    let (mx, my) = (matrix(x), matrix(y));
    let (xy, yx) = (matmul(&mx, &my), matmul(&my, &mx));
    let half = Exact::from_ratio(1, 2);
    std::array::from_fn(|i| std::array::from_fn(|j| (xy[i][j].clone() + yx[i][j].clone()).scale(&half)))
}

/// `d1 d2 d3 + 2 Re(x1 x2 x3) − d1 N(x1) − d2 N(x2) − d3 N(x3)`.
fn det_oracle(x: &JordanElement<Exact>) -> Exact {
    let [d1, d2, d3] = x.d.clone();
    let [x1, x2, x3] = &x.x;
    d1.clone() * d2.clone() * d3.clone() + (&(x1 * x2) * x3).re() * Exact::from_int(2)
        - d1 * x1.norm()
        - d2 * x2.norm()
        - d3 * x3.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jordan_product_matches_matrix_oracle(x in jordan(), y in jordan()) {
        let m = jordan_product_oracle(&x, &y);
        let c = x.circ(&y);
        for k in 0..3 {
            prop_assert_eq!(&m[k][k], &Oct::real(c.d[k].clone()));
        }
        prop_assert_eq!(&m[1][2], &c.x[0]);
        prop_assert_eq!(&m[2][0], &c.x[1]);
        prop_assert_eq!(&m[0][1], &c.x[2]);
        prop_assert_eq!(&m[2][1], &c.x[0].conj());
    }

    #[test]
    fn determinant_matches_oracle(x in jordan()) {
        prop_assert_eq!(x.det(), det_oracle(&x));
    }
}

/// Rank of a rational matrix (rows or columns, either way) by elimination.
fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, pivot);
        let p = rows[rank][c].clone();
        let prow = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &p;
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Stabilizer of `(D, 0, ρ, 0)`, `ρ ≠ 0`, split as
/// `{φ ∈ e6 : φD = 0} ⊕ {A : 2A×D = ρτA, (τA, D) = 0}`: ν is forced to
/// vanish by the ξ-slot and the remaining parts decouple.
fn stabilizer_oracle(d: [i64; 3], rho: i64) -> (usize, usize) {
    let dj = JordanElement::<Exact>::diag(Exact::from_int(d[0]), Exact::from_int(d[1]), Exact::from_int(d[2]));
    let rho = Exact::from_int(rho);

    // A-part, exactly: columns are the images of the 54 real directions.
    let mut cols: Vec<Vec<BigRational>> = Vec::new();
    for i in 0..JORDAN_DIM {
        for s in [Exact::one(), Exact::i()] {
            let a = JordanElement::basis(i).scale(&s);
            let y = a.cross(&dj).scale(&Exact::from_int(2)) - a.tau().scale(&rho);
            let eta = a.tau().inner(&dj);
            let mut col = Vec::new();
            for z in y.coords().into_iter().chain([eta]) {
                col.push(z.re);
                col.push(z.im);
            }
            cols.push(col);
        }
    }
    let a_kernel = 2 * JORDAN_DIM - rational_rank(cols);

    // e6 part, numerically.
    let algebra = E7Algebra::shared().unwrap();
    let df: JordanElement<Float> = dj.to_float();
    let cols: Vec<Vec<f64>> = algebra
        .e6
        .elements
        .iter()
        .map(|e| e.phi.apply(&df).coords().into_iter().flat_map(|z| [z.re, z.im]).collect())
        .collect();
    let m = DMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i]);
    let sv = m.singular_values();
    let smax = sv.max();
    let rank = sv.iter().filter(|&&s| s > 1e-9 * smax.max(1.0)).count();
    (algebra.e6.len() - rank, a_kernel)
}

#[test]
fn stabilizer_dimensions_match_decomposition_oracle() {
    let algebra = E7Algebra::shared().unwrap();
    // (D, ρ, e6 part, A part); the e6 parts are spin(10), spin(9), f4, e6.
    let cases: [([i64; 3], i64, usize, usize); 5] =
        [([1, 0, 0], 1, 45, 10), ([1, 2, 2], 1, 36, 9), ([2, 1, 2], 1, 36, 9), ([1, 1, 1], 1, 52, 26), ([0, 0, 0], 1, 78, 0)];
    for (d, rho, e6_part, a_part) in cases {
        assert_eq!(stabilizer_oracle(d, rho), (e6_part, a_part), "D = {d:?}");
        let p = FreudenthalVector::<Float>::normal_form_ratio([(d[0], 1), (d[1], 1), (d[2], 1), (rho, 1)]);
        let stab = algebra.stabilizer_dimension(&p).unwrap();
        assert_eq!(stab.dim, e6_part + a_part, "D = {d:?}");
    }
}

#[test]
fn rational_rank_sanity() {
    let q = |n: i64| BigRational::from_integer(n.into());
    assert_eq!(rational_rank(vec![vec![q(1), q(2)], vec![q(2), q(4)]]), 1);
    assert_eq!(rational_rank(vec![vec![q(0), q(1)], vec![q(1), q(0)], vec![q(1), q(1)]]), 2);
}
