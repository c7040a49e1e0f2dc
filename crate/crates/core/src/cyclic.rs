//! The cyclic categories Λ and Λ_p in normal form, the cyclic object `A_#`
//! of an algebra, pullbacks along `i: Λ_p -> Λ` and `π: Λ_p -> Λ`, the cyclic
//! bicomplex, and the invariants built on it: HH, HC, the periodicity map `u`,
//! Connes' exact sequence, HP stabilization and the Hodge degeneration test.
//!
//! A morphism `[n] -> [m]` of Λ_p is a nondecreasing `f: Z -> Z` with
//! `f(x + n) = f(x) + m`, taken modulo `f ~ f + p·m`; the representative
//! stored has `0 <= f(0) < p·m`. Object `[n]` has `n` points and sits in
//! simplicial degree `n - 1`.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{decode, encode, Algebra};
use crate::complexes::{induced_map_on_homology, Bicomplex, ChainComplex, ComplexMap};
use crate::exactlin::{Matrix, Scalar, SparseVec};
use crate::simplicial::SimplicialVS;
use crate::{Error, FieldSpec, Result};

/// Normal-form morphism `[n] -> [m]` of Λ_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LambdaMor {
    p: usize,
    n: usize,
    m: usize,
    vals: Vec<i64>,
}

impl LambdaMor {
    /// `vals` are `f(0), …, f(n-1)`; they are normalized modulo `σ^p`.
    pub fn new(p: usize, n: usize, m: usize, vals: Vec<i64>) -> Result<Self> {
        if p == 0 || n == 0 || m == 0 || vals.len() != n {
            return Err(Error::Invalid("morphisms need p, n, m >= 1 and n values".into()));
        }
        let monotone = vals.windows(2).all(|w| w[0] <= w[1]) && vals[n - 1] <= vals[0] + m as i64;
        if !monotone {
            return Err(Error::Invalid(format!("values {vals:?} are not a monotone lift")));
        }
        let period = (p * m) as i64;
        let shift = vals[0].div_euclid(period) * period;
        let vals = vals.into_iter().map(|v| v - shift).collect();
        Ok(LambdaMor { p, n, m, vals })
    }

    pub fn identity(p: usize, n: usize) -> Self {
        LambdaMor { p, n, m: n, vals: (0..n as i64).collect() }
    }

    /// Rotation `x ↦ x + 1` of `[n]`; it has order `p·n`.
    pub fn tau(p: usize, n: usize) -> Self {
        LambdaMor::tau_power(p, n, 1)
    }

    pub fn tau_power(p: usize, n: usize, k: i64) -> Self {
        LambdaMor::new(p, n, n, (0..n as i64).map(|x| x + k).collect()).expect("rotation is monotone")
    }

    /// Face `[n] -> [n-1]` merging points `i` and `i+1` (for `i = n-1`, points `n-1` and `0`).
    pub fn face(p: usize, n: usize, i: usize) -> Self {
        assert!(n >= 2 && i < n);
        LambdaMor::new(p, n, n - 1, (0..n as i64).map(|x| x - (x > i as i64) as i64).collect()).unwrap()
    }

    /// Degeneracy `[n] -> [n+1]` skipping point `i + 1`.
    pub fn degeneracy(p: usize, n: usize, i: usize) -> Self {
        assert!(i < n);
        LambdaMor::new(p, n, n + 1, (0..n as i64).map(|x| x + (x > i as i64) as i64).collect()).unwrap()
    }

    pub fn period(&self) -> usize {
        self.p
    }

    pub fn source(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[i64] {
        &self.vals
    }

    /// Value of the lift at any integer.
    pub fn eval(&self, x: i64) -> i64 {
        let n = self.n as i64;
        self.vals[x.rem_euclid(n) as usize] + x.div_euclid(n) * self.m as i64
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &LambdaMor) -> Result<LambdaMor> {
        if self.p != g.p || self.m != g.n {
            return Err(Error::Mismatch(format!(
                "cannot compose [{}]->[{}] (p={}) with [{}]->[{}] (p={})",
                self.n, self.m, self.p, g.n, g.m, g.p
            )));
        }
        LambdaMor::new(self.p, self.n, g.m, self.vals.iter().map(|&v| g.eval(v)).collect())
    }

    /// All morphisms `[n] -> [m]` of Λ_p, in lexicographic order of values.
    pub fn enumerate(p: usize, n: usize, m: usize) -> Vec<LambdaMor> {
        let mut out = Vec::new();
        let mut vals = vec![0i64; n];
        fn rec(k: usize, p: usize, n: usize, m: usize, vals: &mut Vec<i64>, out: &mut Vec<LambdaMor>) {
            if k == n {
                out.push(LambdaMor { p, n, m, vals: vals.clone() });
                return;
            }
            let (lo, hi) = if k == 0 { (0, (p * m) as i64 - 1) } else { (vals[k - 1], vals[0] + m as i64) };
            for v in lo..=hi {
                vals[k] = v;
                rec(k + 1, p, n, m, vals, out);
            }
        }
        rec(0, p, n, m, &mut vals, &mut out);
        out
    }

    /// Image under `i: Λ_p -> Λ`, `[n] ↦ [pn]`.
    pub fn functor_i(&self) -> LambdaMor {
        let vals = (0..(self.p * self.n) as i64).map(|x| self.eval(x)).collect();
        LambdaMor::new(1, self.p * self.n, self.p * self.m, vals).expect("period extension is monotone")
    }

    /// Image under `π: Λ_p -> Λ`, identical on objects.
    pub fn functor_pi(&self) -> LambdaMor {
        LambdaMor::new(1, self.n, self.m, self.vals.clone()).expect("same lift")
    }
}

impl fmt::Display for LambdaMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]->[{}] p={} {:?}", self.n, self.m, self.p, self.vals)
    }
}

/// A functor from Λ_p to finite-dimensional vector spaces, evaluated on
/// linear combinations of parallel morphisms.
pub trait CyclicFunctor: Send + Sync {
    fn period(&self) -> usize;
    fn field(&self) -> FieldSpec;
    /// Dimension at object `[n]`, `n >= 1`.
    fn dim(&self, n: usize) -> usize;
    /// Matrix of `Σ c_t E(f_t)`; all `f_t` share source and target.
    fn combination(&self, source: usize, target: usize, terms: &[(LambdaMor, Scalar)]) -> Matrix;
    fn describe(&self) -> String;
}

/// `A_#`: `[n] ↦ A^{⊗n}`; the `j`-th output factor of `f` is the ordered product
/// of the inputs over the lift-ordered preimage of `j`, and 1 if it is empty.
pub struct ASharp {
    algebra: Arc<Algebra>,
}

impl ASharp {
    pub fn new(algebra: Arc<Algebra>) -> Self {
        ASharp { algebra }
    }

    /// Preimage positions (mod `n`) of each output point, in lift order.
    fn preimages(f: &LambdaMor) -> Vec<Vec<usize>> {
        let (n, m) = (f.n as i64, f.m as i64);
        let mut out = vec![Vec::new(); f.m];
        // with 0 <= f(0) < m every preimage of 0..m lies in (-n, n)
        let shift = f.vals[0].div_euclid(m) * m;
        for x in (-n + 1)..n {
            let v = f.eval(x) - shift;
            if (0..m).contains(&v) {
                out[v as usize].push(x.rem_euclid(n) as usize);
            }
        }
        out
    }
}

impl CyclicFunctor for ASharp {
    fn period(&self) -> usize {
        1
    }

    fn field(&self) -> FieldSpec {
        self.algebra.field()
    }

    fn dim(&self, n: usize) -> usize {
        self.algebra.dim().pow(n as u32)
    }

    fn combination(&self, source: usize, target: usize, terms: &[(LambdaMor, Scalar)]) -> Matrix {
        let a = &self.algebra;
        let f = a.field();
        let d = a.dim();
        let pre: Vec<(Vec<Vec<usize>>, &Scalar)> = terms
            .iter()
            .map(|(mor, c)| {
                assert!(mor.p == 1 && mor.n == source && mor.m == target, "term {mor} has the wrong shape");
                (ASharp::preimages(mor), c)
            })
            .collect();
        let cols = (0..self.dim(source))
            .map(|col| {
                let word = decode(col, source, d);
                let mut pairs: Vec<(usize, Scalar)> = Vec::new();
                let mut factor: Vec<usize> = Vec::new();
                for (lists, c) in &pre {
                    // expand ⊗_j product(word[list_j]) into basis terms
                    let mut acc: Vec<(usize, Scalar)> = vec![(0, (*c).clone())];
                    for list in lists.iter() {
                        factor.clear();
                        factor.extend(list.iter().map(|&x| word[x]));
                        let prod = match factor.len() {
                            1 => SparseVec::unit(factor[0], &f),
                            2 => a.basis_product(factor[0], factor[1]).clone(),
                            _ => a.product_of(&factor),
                        };
                        if prod.is_zero() {
                            acc.clear();
                            break;
                        }
                        let mut next = Vec::with_capacity(acc.len() * prod.nnz());
                        for (idx, v) in &acc {
                            for (t, w) in prod.entries() {
                                next.push((idx * d + t, f.mul(v, w)));
                            }
                        }
                        acc = next;
                    }
                    pairs.extend(acc);
                }
                SparseVec::from_pairs(&f, pairs)
            })
            .collect();
        Matrix::from_columns(f, self.dim(target), cols)
    }

    fn describe(&self) -> String {
        format!("A_# of a {}-dimensional algebra", self.algebra.dim())
    }
}

/// Which functor `Λ_p -> Λ` to pull back along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Along {
    I,
    Pi,
}

/// Pullback of a Λ-object to Λ_p; structure maps are re-derived from the
/// functor on morphisms.
pub struct Pullback {
    base: Arc<dyn CyclicFunctor>,
    along: Along,
    p: usize,
}

impl CyclicFunctor for Pullback {
    fn period(&self) -> usize {
        self.p
    }

    fn field(&self) -> FieldSpec {
        self.base.field()
    }

    fn dim(&self, n: usize) -> usize {
        match self.along {
            Along::I => self.base.dim(self.p * n),
            Along::Pi => self.base.dim(n),
        }
    }

    fn combination(&self, source: usize, target: usize, terms: &[(LambdaMor, Scalar)]) -> Matrix {
        let mapped: Vec<(LambdaMor, Scalar)> = terms
            .iter()
            .map(|(f, c)| {
                assert_eq!(f.p, self.p, "morphism period does not match the pullback");
                let g = match self.along {
                    Along::I => f.functor_i(),
                    Along::Pi => f.functor_pi(),
                };
                (g, c.clone())
            })
            .collect();
        match self.along {
            Along::I => self.base.combination(self.p * source, self.p * target, &mapped),
            Along::Pi => self.base.combination(source, target, &mapped),
        }
    }

    fn describe(&self) -> String {
        let arrow = match self.along {
            Along::I => "i",
            Along::Pi => "π",
        };
        format!("{arrow}* (p = {}) of {}", self.p, self.base.describe())
    }
}

/// A functor `Λ_p -> Vect` restricted to objects `[1]..[N]`.
#[derive(Clone)]
pub struct PCyclicObject {
    functor: Arc<dyn CyclicFunctor>,
    truncation: usize,
}

impl fmt::Debug for PCyclicObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PCyclicObject({}, N = {})", self.functor.describe(), self.truncation)
    }
}

impl PCyclicObject {
    pub fn new(functor: Arc<dyn CyclicFunctor>, truncation: usize) -> Self {
        PCyclicObject { functor, truncation }
    }

    pub fn period(&self) -> usize {
        self.functor.period()
    }

    pub fn field(&self) -> FieldSpec {
        self.functor.field()
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn functor(&self) -> &Arc<dyn CyclicFunctor> {
        &self.functor
    }

    pub fn dim(&self, n: usize) -> usize {
        self.functor.dim(n)
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.truncation {
            return Err(Error::TruncationTooShallow { needed: n, available: self.truncation });
        }
        Ok(())
    }

    pub fn combination(&self, source: usize, target: usize, terms: &[(LambdaMor, Scalar)]) -> Result<Matrix> {
        self.check_level(source)?;
        self.check_level(target)?;
        Ok(self.functor.combination(source, target, terms))
    }

    pub fn matrix(&self, f: &LambdaMor) -> Result<Matrix> {
        if f.p != self.period() {
            return Err(Error::Mismatch(format!("morphism {f} does not live in Λ_{}", self.period())));
        }
        self.combination(f.n, f.m, &[(f.clone(), self.field().one())])
    }

    /// Underlying simplicial space: level `k` is `[k+1]`, levels `0..N-1`.
    pub fn simplicial_part(&self) -> Result<SimplicialVS> {
        let p = self.period();
        let top = self.truncation - 1;
        let dims = (0..=top).map(|k| self.dim(k + 1)).collect();
        let mut faces = vec![Vec::new()];
        for k in 1..=top {
            faces.push(
                (0..=k).map(|i| self.matrix(&LambdaMor::face(p, k + 1, i)).map(Arc::new)).collect::<Result<_>>()?,
            );
        }
        let degens = (0..top)
            .map(|k| (0..=k).map(|i| self.matrix(&LambdaMor::degeneracy(p, k + 1, i)).map(Arc::new)).collect())
            .collect::<Result<_>>()?;
        SimplicialVS::new(self.field(), dims, faces, degens)
    }

    /// Functoriality on all pairs of generators (faces, degeneracies, τ) within
    /// the truncation, plus `τ^{pn} = id`. Returns the violated relations.
    pub fn check_relations(&self) -> Result<Vec<String>> {
        let p = self.period();
        let mut gens: Vec<LambdaMor> = Vec::new();
        for n in 1..=self.truncation {
            gens.push(LambdaMor::tau(p, n));
            if n >= 2 {
                gens.extend((0..n).map(|i| LambdaMor::face(p, n, i)));
            }
            if n < self.truncation {
                gens.extend((0..n).map(|i| LambdaMor::degeneracy(p, n, i)));
            }
        }
        let mut bad = Vec::new();
        for f in &gens {
            let ef = self.matrix(f)?;
            for g in gens.iter().filter(|g| g.n == f.m) {
                let lhs = self.matrix(g)?.mul(&ef)?;
                if lhs != self.matrix(&f.then(g)?)? {
                    bad.push(format!("E({g}) E({f}) ≠ E(composite)"));
                }
            }
        }
        for n in 1..=self.truncation {
            let t = self.matrix(&LambdaMor::tau(p, n))?;
            let mut acc = Matrix::identity(self.field(), self.dim(n));
            for _ in 0..p * n {
                acc = t.mul(&acc)?;
            }
            if acc != Matrix::identity(self.field(), self.dim(n)) {
                bad.push(format!("τ^{} ≠ id at [{n}]", p * n));
            }
        }
        Ok(bad)
    }
}

/// `A_#` truncated at `[N]`.
pub fn a_sharp(a: Arc<Algebra>, truncation: usize) -> PCyclicObject {
    PCyclicObject::new(Arc::new(ASharp::new(a)), truncation)
}

/// Pullback of a Λ-object along `i` or `π` to Λ_p, truncated at `[N]`.
pub fn pullback(e: &PCyclicObject, along: Along, p: usize, truncation: usize) -> Result<PCyclicObject> {
    if e.period() != 1 {
        return Err(Error::Mismatch("pullbacks start from a Λ-object".into()));
    }
    let needed = match along {
        Along::I => p * truncation,
        Along::Pi => truncation,
    };
    if e.truncation() < needed {
        return Err(Error::TruncationTooShallow { needed, available: e.truncation() });
    }
    let functor = Pullback { base: e.functor.clone(), along, p };
    Ok(PCyclicObject::new(Arc::new(functor), truncation))
}

fn sign(field: &FieldSpec, odd: bool) -> Scalar {
    if odd {
        field.from_i64(-1)
    } else {
        field.one()
    }
}

/// Rows of the cyclic bicomplex at simplicial degree `n` (object `[n+1]`);
/// maps that no cell with `q + n <= top` uses are skipped.
struct RowMaps {
    b: Option<Arc<Matrix>>,
    b_prime: Option<Arc<Matrix>>,
    one_minus_lambda: Option<Arc<Matrix>>,
    norm: Option<Arc<Matrix>>,
}

fn row_maps(e: &PCyclicObject, n: usize, top: usize) -> Result<RowMaps> {
    let f = e.field();
    let p = e.period();
    let pts = n + 1;
    let faces: Vec<(LambdaMor, Scalar)> = if n >= 1 {
        (0..=n).map(|i| (LambdaMor::face(p, pts, i), sign(&f, i % 2 == 1))).collect()
    } else {
        Vec::new()
    };
    let b = if n >= 1 { Some(Arc::new(e.combination(pts, n, &faces)?)) } else { None };
    let b_prime = if n >= 1 && n < top { Some(Arc::new(e.combination(pts, n, &faces[..n])?)) } else { None };
    // λ = (-1)^n τ
    let odd = n % 2 == 1;
    let one_minus_lambda = if n < top {
        let terms = [(LambdaMor::identity(p, pts), f.one()), (LambdaMor::tau(p, pts), sign(&f, !odd))];
        Some(Arc::new(e.combination(pts, pts, &terms)?))
    } else {
        None
    };
    let norm = if n + 2 <= top {
        let terms: Vec<(LambdaMor, Scalar)> = (0..p * pts)
            .map(|i| (LambdaMor::tau_power(p, pts, i as i64), sign(&f, odd && i % 2 == 1)))
            .collect();
        Some(Arc::new(e.combination(pts, pts, &terms)?))
    } else {
        None
    };
    Ok(RowMaps { b, b_prime, one_minus_lambda, norm })
}

/// The cyclic bicomplex of a p-cyclic object, truncated to total degree `D + 1`:
/// even columns carry `b`, odd columns `b'`, horizontal maps alternate `1 - λ`
/// (odd to even) and the norm `N` (even to odd).
#[derive(Clone, Debug)]
pub struct CyclicBicomplex {
    pub bicomplex: Bicomplex,
    pub p: usize,
    pub trusted: usize,
}

impl CyclicBicomplex {
    /// Needs the truncation of `e` to be at least `D + 2`.
    pub fn new(e: &PCyclicObject, d: usize) -> Result<Self> {
        let top = d + 1;
        if e.truncation() < top + 1 {
            return Err(Error::TruncationTooShallow { needed: top + 1, available: e.truncation() });
        }
        let rows: Vec<RowMaps> = (0..=top).map(|n| row_maps(e, n, top)).collect::<Result<_>>()?;
        let bicomplex = Bicomplex::new(
            e.field(),
            top,
            top,
            top,
            |_, n| e.dim(n + 1),
            |q, n| {
                let r = &rows[n];
                if q % 2 == 0 { r.b.clone() } else { r.b_prime.clone() }.expect("row n >= 1 has faces")
            },
            |q, n| {
                let r = &rows[n];
                if q % 2 == 1 { r.one_minus_lambda.clone() } else { r.norm.clone() }.expect("cell is in range")
            },
        )?;
        Ok(CyclicBicomplex { bicomplex, p: e.period(), trusted: d })
    }
}

/// HH and HC of a p-cyclic object through degree `D`, with the chain-level
/// maps `ι: C(E) -> Tot` (column 0) and `u: Tot -> Tot[-2]` (column shift).
#[derive(Clone, Debug)]
pub struct CyclicHomology {
    pub trusted: usize,
    pub hochschild: Arc<ChainComplex>,
    pub total: Arc<ChainComplex>,
    bicomplex: CyclicBicomplex,
}

impl CyclicHomology {
    pub fn compute(e: &PCyclicObject, d: usize) -> Result<Self> {
        let bicomplex = CyclicBicomplex::new(e, d)?;
        let total = Arc::new(bicomplex.bicomplex.total_complex(d)?);
        let b = &bicomplex.bicomplex;
        let dims = (0..=d + 1).map(|n| b.dim(0, n)).collect();
        let diffs = (1..=d + 1).map(|n| b.vertical(0, n).expect("column 0").clone()).collect();
        let hochschild = Arc::new(ChainComplex::new(e.field(), 0, dims, diffs)?);
        Ok(CyclicHomology { trusted: d, hochschild, total, bicomplex })
    }

    pub fn bicomplex(&self) -> &CyclicBicomplex {
        &self.bicomplex
    }

    /// `HH_0..HH_D`.
    pub fn hh_dims(&self) -> Vec<usize> {
        let degrees: Vec<i64> = (0..=self.trusted as i64).collect();
        self.hochschild.homology_dims(&degrees).expect("in range")
    }

    /// `HC_0..HC_D`.
    pub fn hc_dims(&self) -> Vec<usize> {
        let degrees: Vec<i64> = (0..=self.trusted as i64).collect();
        self.total.homology_dims(&degrees).expect("in range")
    }

    /// Chain map `u: Tot_m -> Tot_{m-2}`, `(q, n) ↦ (q - 2, n)`, killing columns 0 and 1.
    pub fn u_chain_map(&self) -> Result<ComplexMap> {
        let b = &self.bicomplex.bicomplex;
        let f = b.field();
        let mut maps = Vec::new();
        for m in 2..=self.trusted + 1 {
            let src = b.total_layout(m);
            let tgt = b.total_layout(m - 2);
            let mut trip = Vec::new();
            for &(q, off, dim) in src.iter().filter(|c| c.0 >= 2) {
                let toff = tgt[q - 2].1;
                for k in 0..dim {
                    trip.push((toff + k, off + k, f.one()));
                }
            }
            let rows = self.total.dim(m as i64 - 2);
            let cols = self.total.dim(m as i64);
            maps.push((m as i64, Arc::new(Matrix::from_triplets(f, rows, cols, trip))));
        }
        ComplexMap::new(self.total.clone(), self.total.clone(), -2, maps)
    }

    /// Chain map `ι: C(E) -> Tot` including column 0.
    pub fn iota_chain_map(&self) -> Result<ComplexMap> {
        let f = self.total.field();
        let maps = (0..=self.trusted as i64 + 1)
            .map(|m| {
                let dim = self.hochschild.dim(m);
                let trip = (0..dim).map(|k| (k, k, f.one()));
                (m, Arc::new(Matrix::from_triplets(f, self.total.dim(m), dim, trip.collect::<Vec<_>>())))
            })
            .collect();
        ComplexMap::new(self.hochschild.clone(), self.total.clone(), 0, maps)
    }

    /// Matrix of `u: HC_i -> HC_{i-2}` in the deterministic homology bases.
    pub fn u_map(&self, i: usize) -> Result<Matrix> {
        if i < 2 || i > self.trusted {
            return Err(Error::DegreeOutOfRange(i as i64));
        }
        induced_map_on_homology(&self.u_chain_map()?, i as i64)
    }

    /// Ranks of `u_i` for `i = 2..=D` (index `i`; entries 0 and 1 are `None`).
    pub fn u_ranks(&self) -> Result<Vec<Option<usize>>> {
        let u = self.u_chain_map()?;
        let mut out = vec![None, None];
        for i in 2..=self.trusted {
            out.push(Some(u.induced_rank(i as i64)?));
        }
        Ok(out)
    }
}

/// `HH_0..HH_{D-1}` of the underlying simplicial object (needs `N >= D + 1`).
pub fn hh_dims(e: &PCyclicObject, d: usize) -> Result<Vec<usize>> {
    if d + 1 > e.truncation() {
        return Err(Error::TruncationTooShallow { needed: d + 1, available: e.truncation() });
    }
    let f = e.field();
    let p = e.period();
    let dims: Vec<usize> = (0..=d).map(|k| e.dim(k + 1)).collect();
    let mut diffs = Vec::new();
    for k in 1..=d {
        let faces: Vec<(LambdaMor, Scalar)> =
            (0..=k).map(|i| (LambdaMor::face(p, k + 1, i), sign(&f, i % 2 == 1))).collect();
        diffs.push(Arc::new(e.combination(k + 1, k, &faces)?));
    }
    let c = ChainComplex::new(f, 0, dims, diffs)?;
    let degrees: Vec<i64> = (0..d as i64).collect();
    c.homology_dims(&degrees)
}

/// `HC_0..HC_D` (needs `N >= D + 2`).
pub fn hc_dims(e: &PCyclicObject, d: usize) -> Result<Vec<usize>> {
    Ok(CyclicHomology::compute(e, d)?.hc_dims())
}

/// Matrix of `u: HC_i -> HC_{i-2}`.
pub fn u_map(e: &PCyclicObject, i: usize) -> Result<Matrix> {
    CyclicHomology::compute(e, i)?.u_map(i)
}

/// Connes' exact sequence checked at each `HC_i`, `i <= D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnesRow {
    pub degree: usize,
    pub hh: usize,
    pub hc: usize,
    pub iota_rank: usize,
    pub u_rank: usize,
    /// `u ∘ ι = 0`.
    pub composite_zero: bool,
    /// `rank ι_* = dim HC_i - rank u_i`.
    pub exact: bool,
}

pub fn connes_check(e: &PCyclicObject, d: usize) -> Result<Vec<ConnesRow>> {
    let h = CyclicHomology::compute(e, d)?;
    let hh = h.hh_dims();
    let hc = h.hc_dims();
    let iota = h.iota_chain_map()?;
    let u = h.u_chain_map()?;
    let composite = iota.then(&u)?;
    let mut out = Vec::new();
    for i in 0..=d {
        let iota_rank = iota.induced_rank(i as i64)?;
        let u_rank = if i >= 2 { u.induced_rank(i as i64)? } else { 0 };
        let composite_zero = composite.component(i as i64).is_zero();
        out.push(ConnesRow {
            degree: i,
            hh: hh[i],
            hc: hc[i],
            iota_rank,
            u_rank,
            composite_zero,
            exact: iota_rank + u_rank == hc[i],
        });
    }
    Ok(out)
}

/// HP read off from the u-tower in degrees `<= D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpWindow {
    pub trusted: usize,
    pub hc: Vec<usize>,
    /// `u_ranks[i]` is the rank of `u: HC_i -> HC_{i-2}` (`None` for `i < 2`).
    pub u_ranks: Vec<Option<usize>>,
    /// Per parity: `(first degree of the stable range, HP dimension)`.
    pub stable: [Option<(usize, usize)>; 2],
}

impl HpWindow {
    pub fn from_data(trusted: usize, hc: Vec<usize>, u_ranks: Vec<Option<usize>>) -> Self {
        let iso = |i: usize| u_ranks[i] == Some(hc[i]) && hc[i] == hc[i - 2];
        let mut stable = [None, None];
        for (parity, slot) in stable.iter_mut().enumerate() {
            // top-most degree of this parity with a u-map out of it
            let degrees: Vec<usize> = (2..=trusted).filter(|i| i % 2 == parity).collect();
            if degrees.is_empty() {
                continue;
            }
            let mut start = None;
            for &i in degrees.iter().rev() {
                if iso(i) {
                    start = Some(i - 2);
                } else {
                    break;
                }
            }
            *slot = start.map(|s| (s, hc[s]));
        }
        HpWindow { trusted, hc, u_ranks, stable }
    }

    /// HP in the given parity, if stabilized.
    pub fn hp(&self, parity: usize) -> Option<usize> {
        self.stable[parity % 2].map(|(_, d)| d)
    }
}

pub fn hp_window(e: &PCyclicObject, d: usize) -> Result<HpWindow> {
    let h = CyclicHomology::compute(e, d)?;
    Ok(HpWindow::from_data(d, h.hc_dims(), h.u_ranks()?))
}

/// `Σ_{l >= 0} v_{i - 2l}`.
pub fn periodic_sum(v: &[usize], i: usize) -> usize {
    (0..=i / 2).map(|l| v[i - 2 * l]).sum()
}

/// Hodge-to-de Rham degeneration check by dimension count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeReport {
    pub hh: Vec<usize>,
    pub hc: Vec<usize>,
    /// `E_1` total dimension `Σ_l hh_{i-2l}` per degree.
    pub e1: Vec<usize>,
    /// Largest `D'` with `E_1 = HC` in all degrees `<= D'`.
    pub degenerate_up_to: Option<usize>,
    pub trusted: usize,
}

impl HodgeReport {
    pub fn degenerate(&self) -> bool {
        self.degenerate_up_to == Some(self.trusted)
    }
}

pub fn hodge_report(e: &PCyclicObject, d: usize) -> Result<HodgeReport> {
    let h = CyclicHomology::compute(e, d)?;
    Ok(hodge_from(h.hh_dims(), h.hc_dims(), d))
}

pub fn hodge_from(hh: Vec<usize>, hc: Vec<usize>, d: usize) -> HodgeReport {
    let e1: Vec<usize> = (0..=d).map(|i| periodic_sum(&hh, i)).collect();
    let mut upto = None;
    for i in 0..=d {
        if e1[i] == hc[i] {
            upto = Some(i);
        } else {
            break;
        }
    }
    HodgeReport { hh, hc, e1, degenerate_up_to: upto, trusted: d }
}

/// Words of length `n` in base `d`, handy for inspecting `A^{⊗n}` bases.
pub fn word_index(word: &[usize], d: usize) -> usize {
    encode(word, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn tau_has_order_pn() {
        for p in 1..4 {
            for n in 1..5 {
                let t = LambdaMor::tau(p, n);
                let mut acc = LambdaMor::identity(p, n);
                for k in 1..=p * n {
                    acc = acc.then(&t).unwrap();
                    assert_eq!(acc == LambdaMor::identity(p, n), k == p * n);
                }
            }
        }
    }

    #[test]
    fn hom_one_to_n_has_n_elements() {
        for n in 1..7 {
            assert_eq!(LambdaMor::enumerate(1, 1, n).len(), n);
        }
    }

    #[test]
    fn functors_on_identity_and_tau() {
        let t = LambdaMor::tau(3, 1);
        assert_eq!(t.functor_i(), LambdaMor::tau(1, 3));
        assert_eq!(LambdaMor::identity(2, 3).functor_i(), LambdaMor::identity(1, 6));
        assert_eq!(LambdaMor::tau_power(2, 3, 3).functor_pi(), LambdaMor::identity(1, 3));
    }

    #[test]
    fn collapse_maps_give_both_products() {
        let a = Arc::new(Algebra::matrix_algebra(gf(5), 2).unwrap());
        let e = a_sharp(a.clone(), 2);
        let collapses = LambdaMor::enumerate(1, 2, 1);
        assert_eq!(collapses.len(), 2);
        let mut seen = Vec::new();
        for f in &collapses {
            let m = e.matrix(f).unwrap();
            // compare against ab and ba on all basis pairs
            let ab = (0..16).all(|c| m.column(c) == a.basis_product(c / 4, c % 4));
            let ba = (0..16).all(|c| m.column(c) == a.basis_product(c % 4, c / 4));
            seen.push((ab, ba));
        }
        seen.sort();
        assert_eq!(seen, vec![(false, true), (true, false)]);
    }

    #[test]
    fn ground_field_cyclic_homology() {
        let e = a_sharp(Arc::new(Algebra::ground_field(gf(5))), 10);
        assert_eq!(hc_dims(&e, 8).unwrap(), vec![1, 0, 1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(hh_dims(&e, 5).unwrap(), vec![1, 0, 0, 0, 0]);
        let u = u_map(&e, 2).unwrap();
        assert_eq!(u.rank(), 1);
    }

    #[test]
    fn generated_objects_satisfy_relations() {
        let a = Arc::new(Algebra::truncated_polynomial(gf(2), 2).unwrap());
        let e = a_sharp(a, 4);
        assert!(e.check_relations().unwrap().is_empty());
        let pi = pullback(&e, Along::Pi, 2, 3).unwrap();
        assert!(pi.check_relations().unwrap().is_empty());
    }
}
