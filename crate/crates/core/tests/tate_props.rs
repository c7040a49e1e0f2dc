use cyclic_hom::exactlin::Matrix;
use cyclic_hom::tate::{is_free, tate_dims, verify_votimesp, CpModule};
use cyclic_hom::{FieldSpec, SparseVec};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_invertible(rng: &mut StdRng, field: FieldSpec, n: usize) -> (Matrix, Matrix) {
    let p = field.characteristic() as i64;
    loop {
        let trip: Vec<_> = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, field.from_i64(rng.gen_range(0..p))))
            .collect();
        let g = Matrix::from_triplets(field, n, n, trip);
        if g.rank() == n {
            let cols = (0..n).map(|i| g.solve(&SparseVec::unit(i, &field)).unwrap()).collect();
            return (g.clone(), Matrix::from_columns(field, n, cols));
        }
    }
}

#[test]
fn tate_counts_non_free_blocks() {
    let mut rng = StdRng::seed_from_u64(5);
    for p in [2u32, 3, 5] {
        let field = FieldSpec::prime(p).unwrap();
        for _ in 0..15 {
            let blocks: Vec<usize> = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(1..=p as usize)).collect();
            let mut m = CpModule::jordan(field, blocks[0]).unwrap();
            for b in &blocks[1..] {
                m = m.direct_sum(&CpModule::jordan(field, *b).unwrap()).unwrap();
            }
            let (g, g_inv) = random_invertible(&mut rng, field, m.dim());
            let m = m.conjugate(&g, &g_inv).unwrap();
            let expected = blocks.iter().filter(|b| **b < p as usize).count();
            let dims = tate_dims(&m, &[-3, -2, -1, 0, 1, 2, 3]);
            assert!(dims.iter().all(|d| *d == expected), "{blocks:?} -> {dims:?}");
            assert_eq!(is_free(&m), expected == 0);
        }
    }
}

#[test]
fn frobenius_identification_small_cases() {
    for (dim, p) in [(1, 2), (2, 2), (1, 3), (1, 5)] {
        let field = FieldSpec::prime(p as u32).unwrap();
        let report = verify_votimesp(field, dim, p, &[-2, -1, 0, 1, 2]).unwrap();
        assert!(report.passes(), "{dim} {p}: {report:?}");
    }
}
