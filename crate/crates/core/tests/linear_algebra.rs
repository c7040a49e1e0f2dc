use cyclic_hom::{FieldSpec, Matrix, SparseVec};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Plain dense Gaussian elimination mod p.
fn dense_rank(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|r| rows[*r][c] % p != 0) else { continue };
        rows.swap(rank, pivot);
        let inv = (1..p).find(|x| x * rows[rank][c] % p == 1).unwrap();
        for r in 0..rows.len() {
            if r != rank && rows[r][c] % p != 0 {
                let f = rows[r][c] * inv % p;
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] + (p - f) * rows[rank][k]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn random_dense(rng: &mut StdRng, rows: usize, cols: usize, p: u64, density: f64) -> Vec<Vec<u64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| if rng.gen_bool(density) { rng.gen_range(1..p) } else { 0 }).collect())
        .collect()
}

fn to_matrix(field: FieldSpec, dense: &[Vec<u64>]) -> Matrix {
    let data: Vec<Vec<i64>> = dense.iter().map(|r| r.iter().map(|x| *x as i64).collect()).collect();
    Matrix::from_i64_rows(field, &data)
}

#[test]
fn random_gf2_ranks_match_dense_elimination() {
    let mut rng = StdRng::seed_from_u64(7);
    let field = FieldSpec::prime(2).unwrap();
    for density in [0.02, 0.05, 0.1, 0.5] {
        for _ in 0..20 {
            let dense = random_dense(&mut rng, 50, 50, 2, density);
            assert_eq!(to_matrix(field, &dense).rank(), dense_rank(dense, 2));
        }
    }
}

#[test]
fn random_ranks_over_odd_primes() {
    let mut rng = StdRng::seed_from_u64(11);
    for p in [3u64, 7, 101] {
        let field = FieldSpec::prime(p as u32).unwrap();
        for _ in 0..20 {
            let (r, c) = (rng.gen_range(1..90), rng.gen_range(1..90));
            let dense = random_dense(&mut rng, r, c, p, 0.05);
            assert_eq!(to_matrix(field, &dense).rank(), dense_rank(dense, p));
        }
    }
}

#[test]
fn rank_nullity_and_kernel_vectors() {
    let mut rng = StdRng::seed_from_u64(3);
    for field in [FieldSpec::prime(5).unwrap(), FieldSpec::rationals()] {
        for _ in 0..10 {
            let dense = random_dense(&mut rng, 12, 20, 5, 0.3);
            let m = to_matrix(field, &dense);
            let k = m.kernel_basis();
            assert_eq!(k.dim() + m.rank(), m.cols());
            for v in k.basis() {
                assert!(m.apply(v).is_zero());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn solve_recovers_consistent_systems(
        entries in prop::collection::vec(0i64..7, 8 * 6),
        x in prop::collection::vec(0i64..7, 6),
    ) {
        let field = FieldSpec::prime(7).unwrap();
        let rows: Vec<Vec<i64>> = entries.chunks(6).map(|c| c.to_vec()).collect();
        let m = Matrix::from_i64_rows(field, &rows);
        let xv = SparseVec::from_dense(&field, &x.iter().map(|v| field.from_i64(*v)).collect::<Vec<_>>());
        let b = m.apply(&xv);
        let y = m.solve(&b).expect("b is in the image");
        prop_assert_eq!(m.apply(&y), b);
    }

    #[test]
    fn transpose_preserves_rank(entries in prop::collection::vec(0i64..3, 7 * 9)) {
        let field = FieldSpec::prime(3).unwrap();
        let rows: Vec<Vec<i64>> = entries.chunks(9).map(|c| c.to_vec()).collect();
        let m = Matrix::from_i64_rows(field, &rows);
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }
}
