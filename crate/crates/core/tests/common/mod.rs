#![allow(dead_code)]

use e7orbit::freudenthal::{FreudenthalVector, SU2Matrix, DIM};
use e7orbit::jordan::{JordanElement, JORDAN_DIM};
use e7orbit::octonion::Octonion;
use e7orbit::scalar::{exact, Exact};
use proptest::prelude::*;

pub fn small() -> impl Strategy<Value = Exact> {
    (-3i64..=3, -3i64..=3).prop_map(|(a, b)| exact((a, 1), (b, 1)))
}

pub fn octonion() -> impl Strategy<Value = Octonion<Exact>> {
    prop::array::uniform8(small()).prop_map(Octonion::new)
}

pub fn jordan() -> impl Strategy<Value = JordanElement<Exact>> {
    prop::collection::vec(small(), JORDAN_DIM).prop_map(|c| JordanElement::from_coords(&c))
}

/// Mostly-zero vectors keep exact cubic maps cheap.
pub fn vector() -> impl Strategy<Value = FreudenthalVector<Exact>> {
    prop::collection::vec(prop_oneof![3 => Just(exact((0, 1), (0, 1))), 2 => small()], DIM)
        .prop_map(|c| FreudenthalVector::from_coords(&c))
}

/// `(a, b) = ((p + qi)/n, (r + si)/n)` with `p² + q² + r² + s² = n²`.
pub fn su2() -> impl Strategy<Value = SU2Matrix<Exact>> {
    let quads: [[i64; 5]; 5] = [[1, 2, 2, 4, 5], [2, 3, 6, 0, 7], [1, 2, 2, 0, 3], [2, 4, 5, 6, 9], [1, 1, 1, 1, 2]];
    (0..quads.len(), 0..24usize, prop::array::uniform4(any::<bool>())).prop_map(move |(k, perm, signs)| {
        let q = quads[k];
        let mut v = [q[0], q[1], q[2], q[3]];
        // One of the 24 orderings.
        let mut pool: Vec<i64> = v.to_vec();
        let mut idx = perm;
        for slot in v.iter_mut() {
            let j = idx % pool.len();
            idx /= pool.len();
            *slot = pool.remove(j);
        }
        for (x, s) in v.iter_mut().zip(signs) {
            if s {
                *x = -*x;
            }
        }
        let n = q[4];
        SU2Matrix::new(exact((v[0], n), (v[1], n)), exact((v[2], n), (v[3], n))).expect("unit by construction")
    })
}
