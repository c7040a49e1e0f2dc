use std::sync::Arc;

use cyclic_hom::complexes::{cone, induced_map_on_homology, ChainComplex, ComplexMap, HomologyBasis};
use cyclic_hom::{FieldSpec, Matrix, SparseVec};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_matrix(rng: &mut StdRng, field: FieldSpec, rows: usize, cols: usize) -> Matrix {
    let p = field.characteristic() as i64;
    let trip: Vec<_> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .filter_map(|(r, c)| rng.gen_bool(0.3).then(|| (r, c, field.from_i64(rng.gen_range(1..p)))))
        .collect();
    Matrix::from_triplets(field, rows, cols, trip)
}

/// Degrees 0..dims.len(); each differential is a random combination of
/// cycles of the previous one, so `d² = 0` by construction.
fn random_complex(rng: &mut StdRng, field: FieldSpec, dims: &[usize]) -> Arc<ChainComplex> {
    let p = field.characteristic() as i64;
    let mut ds: Vec<Arc<Matrix>> = Vec::new();
    for n in 1..dims.len() {
        let m = if n == 1 {
            random_matrix(rng, field, dims[0], dims[1])
        } else {
            let z = ds[n - 2].kernel_basis();
            let cols = (0..dims[n])
                .map(|_| {
                    z.basis().iter().fold(SparseVec::new(), |acc, v| {
                        if rng.gen_bool(0.4) {
                            acc.axpy(&field, &field.from_i64(rng.gen_range(1..p)), v)
                        } else {
                            acc
                        }
                    })
                })
                .collect();
            Matrix::from_columns(field, dims[n - 1], cols)
        };
        ds.push(Arc::new(m));
    }
    Arc::new(ChainComplex::new(field, 0, dims.to_vec(), ds).unwrap())
}

fn direct_sum(a: &ChainComplex, b: &ChainComplex) -> Arc<ChainComplex> {
    let field = a.field();
    let one = field.one();
    let dims: Vec<usize> = (a.lo()..=a.hi()).map(|n| a.dim(n) + b.dim(n)).collect();
    let ds = (a.lo() + 1..=a.hi())
        .map(|n| {
            let (da, db) = (a.differential(n), b.differential(n));
            Arc::new(
                Matrix::assemble(
                    field,
                    &[a.dim(n - 1), b.dim(n - 1)],
                    &[a.dim(n), b.dim(n)],
                    &[(0, 0, &da, one.clone()), (1, 1, &db, one.clone())],
                )
                .unwrap(),
            )
        })
        .collect();
    Arc::new(ChainComplex::new(field, a.lo(), dims, ds).unwrap())
}

/// `base + d h + h d` for a random degree-raising `h`.
fn perturb(rng: &mut StdRng, s: &Arc<ChainComplex>, t: &Arc<ChainComplex>, base: Vec<Matrix>) -> ComplexMap {
    let field = s.field();
    let h: Vec<Matrix> = (s.lo()..=s.hi()).map(|n| random_matrix(rng, field, t.dim(n + 1), s.dim(n))).collect();
    let hk = |n: i64| -> Matrix {
        if n < s.lo() || n > s.hi() {
            Matrix::zero(field, t.dim(n + 1), s.dim(n))
        } else {
            h[(n - s.lo()) as usize].clone()
        }
    };
    let maps = (s.lo()..=s.hi())
        .map(|n| {
            let dh = t.differential(n + 1).mul(&hk(n)).unwrap();
            let hd = hk(n - 1).mul(&s.differential(n)).unwrap();
            (n, Arc::new(base[(n - s.lo()) as usize].add(&dh).unwrap().add(&hd).unwrap()))
        })
        .collect();
    ComplexMap::new(s.clone(), t.clone(), 0, maps).unwrap()
}

/// `[I; 0]: C_n -> C_n ⊕ E_n`.
fn inclusion(field: FieldSpec, a: usize, b: usize) -> Matrix {
    Matrix::assemble(field, &[a, b], &[a], &[(0, 0, &Matrix::identity(field, a), field.one())]).unwrap()
}

#[test]
fn homology_two_ways() {
    let mut rng = StdRng::seed_from_u64(1);
    for p in [2, 3, 5] {
        let field = FieldSpec::prime(p).unwrap();
        for _ in 0..10 {
            let c = random_complex(&mut rng, field, &[6, 9, 8, 5]);
            for n in 0..=3 {
                assert_eq!(c.homology_dim(n).unwrap(), HomologyBasis::compute(&c, n).unwrap().dim());
            }
        }
    }
}

#[test]
fn induced_maps_compose_and_ranks_agree() {
    let mut rng = StdRng::seed_from_u64(2);
    let field = FieldSpec::prime(3).unwrap();
    for _ in 0..8 {
        let c = random_complex(&mut rng, field, &[4, 7, 6, 3]);
        let e = random_complex(&mut rng, field, &[3, 5, 5, 2]);
        let ce = direct_sum(&c, &e);
        let incl: Vec<Matrix> = (0..=3).map(|n| inclusion(field, c.dim(n), e.dim(n))).collect();
        let proj: Vec<Matrix> = (0..=3).map(|n| incl[n as usize].transpose()).collect();
        let f = perturb(&mut rng, &c, &ce, incl);
        let g = perturb(&mut rng, &ce, &c, proj);
        let gf = f.then(&g).unwrap();
        for n in 0..=3 {
            let h = c.homology_dim(n).unwrap();
            assert_eq!(f.induced_rank(n).unwrap(), h);
            assert_eq!(f.induced_rank(n).unwrap(), f.induced_rank_by_cycles(n).unwrap());
            assert_eq!(g.induced_rank(n).unwrap(), g.induced_rank_by_cycles(n).unwrap());
            let composite = induced_map_on_homology(&gf, n).unwrap();
            let product = induced_map_on_homology(&g, n).unwrap().mul(&induced_map_on_homology(&f, n).unwrap()).unwrap();
            assert_eq!(composite, product);
            assert_eq!(composite, Matrix::identity(field, h));
        }
        let null = perturb(&mut rng, &c, &c, (0..=3).map(|n| Matrix::zero(field, c.dim(n), c.dim(n))).collect());
        for n in 0..=3 {
            assert_eq!(null.induced_rank(n).unwrap(), 0);
        }
    }
}

#[test]
fn cone_fits_the_long_exact_sequence() {
    let mut rng = StdRng::seed_from_u64(4);
    let field = FieldSpec::prime(2).unwrap();
    for _ in 0..8 {
        let c = random_complex(&mut rng, field, &[5, 8, 6, 3]);
        let t = random_complex(&mut rng, field, &[4, 6, 7, 2]);
        let ct = direct_sum(&c, &t);
        let proj_t: Vec<Matrix> = (0..=3)
            .map(|n| {
                let (a, b) = (c.dim(n), t.dim(n));
                Matrix::assemble(field, &[b], &[a, b], &[(0, 1, &Matrix::identity(field, b), field.one())]).unwrap()
            })
            .collect();
        let f = perturb(&mut rng, &ct, &t, proj_t);
        let k = cone(&f).unwrap();
        for n in 0..=3i64 {
            let coker = t.homology_dim(n).unwrap() - f.induced_rank(n).unwrap();
            let ker = if n == 0 { 0 } else { ct.homology_dim(n - 1).unwrap() - f.induced_rank(n - 1).unwrap() };
            assert_eq!(k.homology_dim(n).unwrap(), coker + ker, "degree {n}");
        }
    }
}
