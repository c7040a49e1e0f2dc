//! Quasi-Frobenius maps `F: A -> A^{⊗p}` over GF(p), the induced map of
//! p-cyclic objects `F̃: π*A_# -> i*A_#`, and the check that `F̃` is an
//! isomorphism on periodic cyclic homology.
//!
//! Over a prime field the Frobenius twist is the identity on coordinates, so
//! `F` is an ordinary linear map.

use std::sync::Arc;

use crate::algebra::{decode, encode, Algebra};
use crate::complexes::ComplexMap;
use crate::cyclic::{self, a_sharp, pullback, Along, CyclicHomology, HpWindow, LambdaMor, PCyclicObject};
use crate::exactlin::{Matrix, SparseVec, Subspace};
use crate::tate::{self, CpModule};
use crate::{Error, Result};

/// A linear map `A -> A^{⊗p}`, `p` the field characteristic.
#[derive(Clone, Debug)]
pub struct QuasiFrobenius {
    pub algebra: Arc<Algebra>,
    pub p: usize,
    pub map: Matrix,
}

impl QuasiFrobenius {
    pub fn new(algebra: Arc<Algebra>, map: Matrix) -> Result<Self> {
        let f = algebra.field();
        if !f.is_prime_field() {
            return Err(Error::NotPrimeField);
        }
        let p = f.characteristic() as usize;
        let d = algebra.dim();
        if map.cols() != d || map.rows() != d.pow(p as u32) {
            return Err(Error::ShapeMismatch(format!(
                "expected a {}×{d} matrix, got {}×{}",
                d.pow(p as u32),
                map.rows(),
                map.cols()
            )));
        }
        Ok(QuasiFrobenius { algebra, p, map })
    }

    /// `A^{⊗p}` with the rotation action.
    pub fn target_module(&self) -> Result<CpModule> {
        tate::power_module(self.algebra.field(), self.algebra.dim(), self.p)
    }

    pub fn image(&self) -> Subspace {
        Subspace::span(self.map.field(), self.map.rows(), self.map.columns().iter().cloned())
    }

    /// `F` carried along the isomorphism `A' -> A` whose matrix `p` has the basis
    /// of `A'` as columns: `F' = (p^{-1})^{⊗p} F p`.
    pub fn transport(&self, target: Arc<Algebra>, p: &Matrix, p_inv: &Matrix) -> Result<QuasiFrobenius> {
        let f = self.algebra.field();
        let d = self.algebra.dim();
        let cols = (0..d)
            .map(|j| tensor_power_apply(p_inv, self.p, &self.map.apply(p.column(j))))
            .collect();
        QuasiFrobenius::new(target, Matrix::from_columns(f, d.pow(self.p as u32), cols))
    }
}

/// `m^{⊗k} v` for a square `m` and `v` in the `k`-th tensor power.
fn tensor_power_apply(m: &Matrix, k: usize, v: &SparseVec) -> SparseVec {
    let f = m.field();
    let d = m.cols();
    let mut pairs = Vec::new();
    for (idx, c) in v.entries() {
        let mut acc = vec![(0usize, c.clone())];
        for x in decode(*idx, k, d) {
            let col = m.column(x);
            acc = acc
                .iter()
                .flat_map(|(i, a)| col.entries().iter().map(move |(t, b)| (i * d + t, f.mul(a, b))))
                .collect();
        }
        pairs.extend(acc);
    }
    SparseVec::from_pairs(&f, pairs)
}

/// `F(g) = g^{⊗p}` on the group basis.
pub fn qf_group_algebra(a: Arc<Algebra>) -> Result<QuasiFrobenius> {
    if a.group_table().is_none() {
        return Err(Error::Invalid("algebra was not built from a group table".into()));
    }
    let f = a.field();
    if !f.is_prime_field() {
        return Err(Error::NotPrimeField);
    }
    let p = f.characteristic() as usize;
    let d = a.dim();
    let trip = (0..d).map(|g| (encode(&vec![g; p], d), g, f.one())).collect::<Vec<_>>();
    let map = Matrix::from_triplets(f, d.pow(p as u32), d, trip);
    QuasiFrobenius::new(a, map)
}

/// Product in `A^{⊗k}` (factorwise).
pub fn tensor_power_mul(a: &Algebra, k: usize, x: &SparseVec, y: &SparseVec) -> SparseVec {
    let f = a.field();
    let d = a.dim();
    let mut pairs = Vec::new();
    for (i, cx) in x.entries() {
        let wi = decode(*i, k, d);
        for (j, cy) in y.entries() {
            let wj = decode(*j, k, d);
            let mut acc: Vec<(usize, crate::Scalar)> = vec![(0, f.mul(cx, cy))];
            for t in 0..k {
                let prod = a.basis_product(wi[t], wj[t]);
                let mut next = Vec::with_capacity(acc.len() * prod.nnz());
                for (idx, v) in &acc {
                    for (s, w) in prod.entries() {
                        next.push((idx * d + s, f.mul(v, w)));
                    }
                }
                acc = next;
            }
            pairs.extend(acc);
        }
    }
    SparseVec::from_pairs(&f, pairs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QfReport {
    pub injective: bool,
    pub unital: bool,
    pub multiplicative: bool,
    pub equivariant: bool,
    /// Rank of `Ȟ_i(F)` for `i = -2..=2` (with `Ȟ_i(A) = A`, trivial action).
    pub tate_ranks: Vec<(i64, usize)>,
    pub tate_iso: bool,
    pub cokernel_free: bool,
}

impl QfReport {
    pub fn passes(&self) -> bool {
        self.injective && self.unital && self.multiplicative && self.equivariant && self.tate_iso && self.cokernel_free
    }
}

pub fn qf_validate(q: &QuasiFrobenius) -> Result<QfReport> {
    let a = &q.algebra;
    let f = a.field();
    let d = a.dim();
    let m = q.target_module()?;
    let total = m.dim();
    let injective = q.map.rank() == d;
    let unit_p = (0..q.p).fold(SparseVec::unit(0, &f), |acc, _| crate::algebra::tensor_vec(&f, &acc, a.unit(), d));
    let unital = q.map.apply(a.unit()) == unit_p;
    let multiplicative = (0..d).all(|i| {
        (0..d).all(|j| {
            let lhs = q.map.apply(a.basis_product(i, j));
            let rhs = tensor_power_mul(a, q.p, q.map.column(i), q.map.column(j));
            lhs == rhs
        })
    });
    let equivariant = m.sigma().mul(&q.map)? == q.map;

    // Ȟ(F): A -> Ȟ(A^{⊗p}); even degrees land in ker N / im(1-σ), odd in ker(1-σ) / im N
    let oms = m.one_minus_sigma();
    let norm = m.norm();
    let target_dims = tate::tate_dims(&m, &[0, 1]);
    let rank_mod = |kernel_of: &Matrix, image_of: &Matrix| -> usize {
        let in_kernel = q.map.columns().iter().all(|c| kernel_of.apply(c).is_zero());
        if !in_kernel {
            return 0;
        }
        let b = Subspace::span(f, total, image_of.columns().iter().cloned());
        b.sum(&q.image()).dim() - b.dim()
    };
    let even = rank_mod(&norm, &oms);
    let odd = rank_mod(&oms, &norm);
    let tate_ranks: Vec<(i64, usize)> = (-2..=2).map(|i: i64| (i, if i % 2 == 0 { even } else { odd })).collect();
    let tate_iso = even == d && odd == d && target_dims == vec![d, d];

    let cokernel_free = if equivariant {
        tate::is_free(&m.quotient(&q.image())?)
    } else {
        false
    };
    Ok(QfReport { injective, unital, multiplicative, equivariant, tate_ranks, tate_iso, cokernel_free })
}

/// Where inner index `l` of block `j` (out of `n` blocks of length `p`) lands in `A^{⊗pn}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shuffle {
    /// Position `j + l·n`.
    StrideN,
    /// Position `j·p + l`, i.e. plain concatenation.
    StrideP,
}

impl Shuffle {
    pub fn position(self, j: usize, l: usize, n: usize, p: usize) -> usize {
        match self {
            Shuffle::StrideN => j + l * n,
            Shuffle::StrideP => j * p + l,
        }
    }
}

/// The level components `F̃_n: A^{⊗n} -> A^{⊗pn}`, `n = 1..=N`.
#[derive(Clone, Debug)]
pub struct PTilde {
    pub shuffle: Shuffle,
    pub source: PCyclicObject,
    pub target: PCyclicObject,
    components: Vec<Matrix>,
}

impl PTilde {
    pub fn component(&self, n: usize) -> &Matrix {
        &self.components[n - 1]
    }

    pub fn truncation(&self) -> usize {
        self.components.len()
    }

    /// Violations of `i*A_#(g) F̃ = F̃ π*A_#(g)` over all generators.
    pub fn naturality_failures(&self) -> Result<Vec<String>> {
        let p = self.source.period();
        let top = self.truncation();
        let mut gens = Vec::new();
        for n in 1..=top {
            gens.push(LambdaMor::tau(p, n));
            if n >= 2 {
                gens.extend((0..n).map(|i| LambdaMor::face(p, n, i)));
            }
            if n < top {
                gens.extend((0..n).map(|i| LambdaMor::degeneracy(p, n, i)));
            }
        }
        let mut bad = Vec::new();
        for g in gens {
            let lhs = self.target.matrix(&g)?.mul(self.component(g.source()))?;
            let rhs = self.component(g.target()).mul(&self.source.matrix(&g)?)?;
            if lhs != rhs {
                bad.push(format!("F̃ is not natural for {g}"));
            }
        }
        Ok(bad)
    }
}

fn build_components(q: &QuasiFrobenius, shuffle: Shuffle, top: usize) -> Vec<Matrix> {
    let f = q.algebra.field();
    let d = q.algebra.dim();
    let p = q.p;
    let inner: Vec<Vec<(Vec<usize>, crate::Scalar)>> = (0..d)
        .map(|g| q.map.column(g).entries().iter().map(|(i, c)| (decode(*i, p, d), c.clone())).collect())
        .collect();
    (1..=top)
        .map(|n| {
            let cols = (0..d.pow(n as u32))
                .map(|c| {
                    let word = decode(c, n, d);
                    let mut acc: Vec<(Vec<usize>, crate::Scalar)> = vec![(vec![0; p * n], f.one())];
                    for (j, &g) in word.iter().enumerate() {
                        let mut next = Vec::with_capacity(acc.len() * inner[g].len());
                        for (w, v) in &acc {
                            for (iw, cv) in &inner[g] {
                                let mut w2 = w.clone();
                                for (l, &x) in iw.iter().enumerate() {
                                    w2[shuffle.position(j, l, n, p)] = x;
                                }
                                next.push((w2, f.mul(v, cv)));
                            }
                        }
                        acc = next;
                    }
                    SparseVec::from_pairs(&f, acc.into_iter().map(|(w, v)| (encode(&w, d), v)).collect())
                })
                .collect();
            Matrix::from_columns(f, d.pow((p * n) as u32), cols)
        })
        .collect()
}

/// `F̃: π*A_# -> i*A_#` truncated at `[N]`, with the shuffle chosen by the
/// naturality test; exactly one candidate is expected to pass.
pub fn induced_ptilde(q: &QuasiFrobenius, truncation: usize) -> Result<PTilde> {
    let e = a_sharp(q.algebra.clone(), q.p * truncation);
    let source = pullback(&e, Along::Pi, q.p, truncation)?;
    let target = pullback(&e, Along::I, q.p, truncation)?;
    let mut passing = Vec::new();
    let mut failures = Vec::new();
    for shuffle in [Shuffle::StrideN, Shuffle::StrideP] {
        let t = PTilde {
            shuffle,
            source: source.clone(),
            target: target.clone(),
            components: build_components(q, shuffle, truncation),
        };
        let bad = t.naturality_failures()?;
        if bad.is_empty() {
            passing.push(t);
        } else {
            failures.push(format!("{shuffle:?}: {}", bad[0]));
        }
    }
    match passing.len() {
        1 => Ok(passing.pop().unwrap()),
        0 => Err(Error::NaturalityFailure(failures.join("; "))),
        // both pass only in degenerate cases (p = 1 or N = 1); stride n is canonical
        _ => Ok(passing.into_iter().next().unwrap()),
    }
}

/// Which shuffle candidates are natural; used to confirm exactly one passes.
pub fn natural_shuffles(q: &QuasiFrobenius, truncation: usize) -> Result<Vec<Shuffle>> {
    let e = a_sharp(q.algebra.clone(), q.p * truncation);
    let source = pullback(&e, Along::Pi, q.p, truncation)?;
    let target = pullback(&e, Along::I, q.p, truncation)?;
    let mut out = Vec::new();
    for shuffle in [Shuffle::StrideN, Shuffle::StrideP] {
        let t = PTilde {
            shuffle,
            source: source.clone(),
            target: target.clone(),
            components: build_components(q, shuffle, truncation),
        };
        if t.naturality_failures()?.is_empty() {
            out.push(shuffle);
        }
    }
    Ok(out)
}

/// Deck transformation `τ^n` on `i*A_#([n])` as a Z/p-module, and the image of `F̃_n`.
pub fn level_quotient(t: &PTilde, n: usize) -> Result<CpModule> {
    let p = t.source.period();
    let deck = t.target.matrix(&LambdaMor::tau_power(p, n, n as i64))?;
    let m = CpModule::new(deck.field(), deck)?;
    let c = t.component(n);
    let image = Subspace::span(c.field(), c.rows(), c.columns().iter().cloned());
    m.quotient(&image)
}

/// Per-degree comparison of `HC_i(F̃)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HcComparison {
    pub degree: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
}

impl HcComparison {
    pub fn is_iso(&self) -> bool {
        self.rank == self.source_dim && self.rank == self.target_dim
    }
}

/// Basis in which the homological comparison is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorkingBasis {
    Given,
    /// Transported to a basis adapted to the primitive central idempotents;
    /// HC dimensions and induced ranks are invariant under this isomorphism.
    BlockAdapted,
}

#[derive(Clone, Debug)]
pub struct CartierReport {
    pub p: usize,
    pub trusted: usize,
    pub shuffle: Shuffle,
    pub basis: WorkingBasis,
    /// `(level, quotient dim, free)` for levels `1..=N`.
    pub levelwise_free: Vec<(usize, usize, bool)>,
    pub source_window: HpWindow,
    pub target_window: HpWindow,
    pub base_window: HpWindow,
    pub comparison: Vec<HcComparison>,
    /// `u F̃ = F̃ u` at chain level.
    pub commutes_with_u: bool,
    /// `HC(i*A_#) = HC(A_#)` and the stable HP dims agree.
    pub subdivision_consistent: bool,
    /// `HC_i(π*A_#) = Σ_l HH_{i-2l}(A)`.
    pub pi_pullback_consistent: bool,
}

impl CartierReport {
    pub fn all_free(&self) -> bool {
        self.levelwise_free.iter().all(|x| x.2)
    }

    /// `HC_i(F̃)` is bijective on every degree of the detected stable window.
    pub fn iso_on_window(&self) -> bool {
        self.comparison.iter().all(|c| {
            let start = self.source_window.stable[c.degree % 2].map(|s| s.0);
            match start {
                Some(s) if c.degree >= s => c.is_iso(),
                _ => true,
            }
        })
    }

    pub fn consistent(&self) -> bool {
        self.subdivision_consistent && self.pi_pullback_consistent
    }

    pub fn passes(&self) -> bool {
        self.all_free() && self.iso_on_window() && self.commutes_with_u && self.consistent()
    }
}

/// Full Cartier pipeline: freeness of the cokernels of `F̃` at levels `<= levels`,
/// and `HC(F̃)` on the stable window in degrees `<= d`.
pub fn cartier_check(q: &QuasiFrobenius, d: usize, levels: usize) -> Result<CartierReport> {
    let validation = qf_validate(q)?;
    if !validation.passes() {
        return Err(Error::Invalid(format!("not a quasi-Frobenius map: {validation:?}")));
    }
    let given = induced_ptilde(q, levels)?;
    let levelwise_free = (1..=levels)
        .map(|n| level_quotient(&given, n).map(|m| (n, m.dim(), tate::is_free(&m))))
        .collect::<Result<Vec<_>>>()?;

    let (work, basis) = match q.algebra.block_adapted(1 << 16) {
        Some((a, p, p_inv)) => (q.transport(Arc::new(a), &p, &p_inv)?, WorkingBasis::BlockAdapted),
        None => (q.clone(), WorkingBasis::Given),
    };
    if !qf_validate(&work)?.passes() {
        return Err(Error::Mismatch("transported map is not quasi-Frobenius".into()));
    }
    let t = induced_ptilde(&work, d + 2)?;

    let hs = CyclicHomology::compute(&t.source, d)?;
    let ht = CyclicHomology::compute(&t.target, d)?;
    let (us, ut) = (hs.u_chain_map()?, ht.u_chain_map()?);
    let source_window = HpWindow::from_data(d, hs.hc_dims(), hs.u_ranks()?);
    let target_window = HpWindow::from_data(d, ht.hc_dims(), ht.u_ranks()?);
    if source_window.stable.iter().any(|s| s.is_none()) {
        return Err(Error::InconclusiveStabilization(d));
    }

    let chain = ptilde_chain_map(&t, &hs, &ht)?;
    let comparison = (0..=d)
        .map(|i| {
            Ok(HcComparison {
                degree: i,
                source_dim: source_window.hc[i],
                target_dim: target_window.hc[i],
                rank: chain.induced_rank(i as i64)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let commutes_with_u = (2..=d as i64 + 1).all(|m| {
        let lhs = ut.component(m).mul(&chain.component(m)).expect("shapes");
        let rhs = chain.component(m - 2).mul(&us.component(m)).expect("shapes");
        lhs == rhs
    });

    // the base object is taken in the given basis, so this also checks the transport
    let base = a_sharp(q.algebra.clone(), d + 2);
    let hb = CyclicHomology::compute(&base, d)?;
    let base_window = HpWindow::from_data(d, hb.hc_dims(), hb.u_ranks()?);
    let subdivision_consistent = base_window.hc == target_window.hc
        && base_window.stable.map(|s| s.map(|x| x.1)) == target_window.stable.map(|s| s.map(|x| x.1))
        && hb.hh_dims() == ht.hh_dims();
    let hh = crate::algebra::hh_dims(&q.algebra, d + 1);
    let pi_pullback_consistent = (0..=d).all(|i| source_window.hc[i] == cyclic::periodic_sum(&hh, i));

    Ok(CartierReport {
        p: q.p,
        trusted: d,
        shuffle: t.shuffle,
        basis,
        levelwise_free,
        source_window,
        target_window,
        base_window,
        comparison,
        commutes_with_u,
        subdivision_consistent,
        pi_pullback_consistent,
    })
}

/// `F̃` applied cellwise to the total complexes.
fn ptilde_chain_map(t: &PTilde, hs: &CyclicHomology, ht: &CyclicHomology) -> Result<ComplexMap> {
    let bs = &hs.bicomplex().bicomplex;
    let bt = &ht.bicomplex().bicomplex;
    let f = bs.field();
    let mut maps = Vec::new();
    for m in 0..=hs.trusted + 1 {
        let ls = bs.total_layout(m);
        let lt = bt.total_layout(m);
        let rows: Vec<usize> = lt.iter().map(|c| c.2).collect();
        let cols: Vec<usize> = ls.iter().map(|c| c.2).collect();
        let blocks: Vec<(usize, usize, &Matrix, crate::Scalar)> =
            ls.iter().enumerate().map(|(k, &(q, _, _))| (k, k, t.component(m - q + 1), f.one())).collect();
        maps.push((m as i64, Arc::new(Matrix::assemble(f, &rows, &cols, &blocks)?)));
    }
    ComplexMap::new(hs.total.clone(), ht.total.clone(), 0, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FieldSpec;

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn group_algebra_map_is_quasi_frobenius() {
        let a = Arc::new(Algebra::cyclic_group(gf(2), 3).unwrap());
        let q = qf_group_algebra(a).unwrap();
        let r = qf_validate(&q).unwrap();
        assert!(r.passes(), "{r:?}");
    }

    #[test]
    fn zero_and_perturbed_maps_fail() {
        let a = Arc::new(Algebra::cyclic_group(gf(3), 2).unwrap());
        let zero = QuasiFrobenius::new(a.clone(), Matrix::zero(gf(3), 8, 2)).unwrap();
        let r = qf_validate(&zero).unwrap();
        assert!(!r.injective && !r.tate_iso);
        let good = qf_group_algebra(a.clone()).unwrap();
        // add e_{(0,0,1)}, which is not rotation-fixed
        let bump = Matrix::from_triplets(gf(3), 8, 2, vec![(1, 1, gf(3).one())]);
        let bad = QuasiFrobenius::new(a, good.map.add(&bump).unwrap()).unwrap();
        assert!(!qf_validate(&bad).unwrap().equivariant);
    }

    #[test]
    fn stride_n_is_the_natural_shuffle() {
        let a = Arc::new(Algebra::cyclic_group(gf(3), 2).unwrap());
        let q = qf_group_algebra(a).unwrap();
        assert_eq!(natural_shuffles(&q, 3).unwrap(), vec![Shuffle::StrideN]);
        let t = induced_ptilde(&q, 3).unwrap();
        assert_eq!(t.component(1), &q.map);
    }

    #[test]
    fn ground_field_cartier() {
        let a = Arc::new(Algebra::ground_field(gf(3)));
        let q = QuasiFrobenius::new(a, Matrix::identity(gf(3), 1)).unwrap();
        let r = cartier_check(&q, 4, 3).unwrap();
        assert!(r.passes(), "{r:?}");
        assert_eq!(r.source_window.hp(0), Some(1));
        assert_eq!(r.source_window.hp(1), Some(0));
    }
}
