//! Inverse Cartier comparison for small group algebras.

use std::sync::Arc;

use cyclic_hom::algebra::Algebra;
use cyclic_hom::cartier::{cartier_check, qf_group_algebra};
use cyclic_hom::FieldSpec;

fn run(p: u32, n: usize) {
    let a = Arc::new(Algebra::cyclic_group(FieldSpec::prime(p).unwrap(), n).unwrap());
    let q = qf_group_algebra(a).unwrap();
    let r = cartier_check(&q, 4, 5).unwrap();
    assert!(r.passes(), "{r:?}");
}

#[test]
fn z2_over_gf3() {
    run(3, 2);
}

#[test]
fn z3_over_gf2() {
    run(2, 3);
}
