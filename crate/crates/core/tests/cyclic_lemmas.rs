//! Subdivision and π-pullback comparisons for pulled-back cyclic objects.

use std::sync::Arc;

use cyclic_hom::algebra::{self, Algebra};
use cyclic_hom::cyclic::{self, a_sharp, pullback, Along};
use cyclic_hom::FieldSpec;

fn z2_over_gf3() -> Arc<Algebra> {
    Arc::new(Algebra::cyclic_group(FieldSpec::prime(3).unwrap(), 2).unwrap())
}

#[test]
fn subdivision_preserves_hh_and_hc() {
    let a = z2_over_gf3();
    let e = a_sharp(a.clone(), 12);
    let ie = pullback(&e, Along::I, 2, 6).unwrap();
    assert_eq!(cyclic::hh_dims(&ie, 5).unwrap(), cyclic::hh_dims(&e, 5).unwrap());
    assert_eq!(cyclic::hc_dims(&ie, 4).unwrap(), cyclic::hc_dims(&e, 4).unwrap());
}

#[test]
fn pi_pullback_is_periodic_hochschild() {
    let a = z2_over_gf3();
    let e = a_sharp(a.clone(), 8);
    let hh = algebra::hh_dims(&a, 7);
    let pe = pullback(&e, Along::Pi, 2, 8).unwrap();
    let hc = cyclic::hc_dims(&pe, 6).unwrap();
    let expect: Vec<usize> = (0..=6).map(|i| cyclic::periodic_sum(&hh, i)).collect();
    assert_eq!(hc, expect);
}

#[test]
fn a_sharp_hochschild_matches_bar_complex() {
    for a in [
        Algebra::truncated_polynomial(FieldSpec::prime(2).unwrap(), 2).unwrap(),
        Algebra::matrix_algebra(FieldSpec::prime(3).unwrap(), 2).unwrap(),
        Algebra::upper_triangular(FieldSpec::prime(5).unwrap(), 2).unwrap(),
    ] {
        let a = Arc::new(a);
        let e = a_sharp(a.clone(), 5);
        assert_eq!(cyclic::hh_dims(&e, 4).unwrap(), algebra::hh_dims(&a, 4));
    }
}

#[test]
fn matrix_algebra_hodge_degenerates() {
    let a = Arc::new(Algebra::matrix_algebra(FieldSpec::prime(5).unwrap(), 2).unwrap());
    let e = a_sharp(a, 10);
    let r = cyclic::hodge_report(&e, 8).unwrap();
    assert!(r.degenerate(), "{r:?}");
}
