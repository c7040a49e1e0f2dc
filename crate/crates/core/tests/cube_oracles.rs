use cyclic_hom::cube::{
    build_cube, canonical_extension, cube_homology, k_flat_is_w2, symmetric_cocycle_dim, witt_ring, FiniteVS,
};

fn vs(p: u32, d: usize) -> FiniteVS {
    FiniteVS::new(p, d).unwrap()
}

#[test]
fn stable_window_over_f3() {
    let cube = build_cube(&vs(3, 1), 3).unwrap();
    assert_eq!(cube.prime_dim(3), 6560);
    assert_eq!(cube.homology_dims(), vec![1, 1, 0]);
}

#[test]
fn additivity_in_low_degrees() {
    for (p, d) in [(2, 1), (2, 2), (3, 1), (5, 1)] {
        let h = cube_homology(&vs(p, d), 2).unwrap();
        assert_eq!(h, vec![d, d], "GF({p})^{d}");
    }
}

#[test]
fn prime_dims_for_every_level() {
    let space = vs(2, 2);
    let cube = build_cube(&space, 2).unwrap();
    for n in 0..=2 {
        assert_eq!(cube.prime_dim(n), 4u64.pow(1 << n) - 1);
        assert_eq!(cube.slab_dim(n) + cube.quotient_dim(n) as u64, cube.prime_dim(n));
    }
}

#[test]
fn cocycles_agree_with_flat_complex() {
    for (p, d) in [(2, 1), (2, 2), (3, 1), (5, 1)] {
        let coc = symmetric_cocycle_dim(&vs(p, d)).unwrap();
        assert_eq!(coc.dim(), coc.flat_dim);
        assert!(coc.six_term_holds());
    }
}

#[test]
fn extension_over_larger_space() {
    let ext = canonical_extension(&vs(3, 2)).unwrap();
    assert!(ext.verify().passes());
}

#[test]
fn witt_against_integers_mod_p_squared() {
    for p in [2u32, 3, 5, 7] {
        let w = witt_ring(p).unwrap();
        let m = (p * p) as u64;
        // a0^p + p·a1 on integer lifts
        let phi = |a: cyclic_hom::cube::WittPair| ((a.a0 as u64).pow(p) + p as u64 * a.a1 as u64) % m;
        let mut images: Vec<u64> = w.elements().map(phi).collect();
        images.sort_unstable();
        assert_eq!(images, (0..m).collect::<Vec<_>>());
        for a in w.elements() {
            for b in w.elements() {
                assert_eq!(phi(w.add(a, b)), (phi(a) + phi(b)) % m);
                assert_eq!(phi(w.mul(a, b)), phi(a) * phi(b) % m);
            }
        }
    }
}

#[test]
fn flat_ring_for_p5() {
    let cert = k_flat_is_w2(5).unwrap();
    assert_eq!(cert.map.len(), 25);
    assert!(cert.ring_axioms.is_empty());
}
