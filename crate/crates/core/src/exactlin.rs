//! Exact linear algebra over prime fields GF(p) and the rationals.
//!
//! Matrices are immutable, column-compressed and sparse. Ranks use a
//! deterministic elimination order: vectors are processed in increasing
//! index order and each is reduced at its smallest nonzero index. Small
//! matrices (at most 64x64) go through a dense elimination instead.
//!
//! A `Matrix` with `rows` rows and `cols` columns represents the linear map
//! `v -> M v` from column vectors of length `cols` to length `rows`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::Error;

const DENSE_LIMIT: usize = 64;

/// The base field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Prime(u32),
    Rationals,
}

/// A field element in canonical form for its `FieldSpec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp(u32),
    Q(Box<BigRational>),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl FieldSpec {
    pub fn prime(p: u32) -> Result<Self, Error> {
        if !is_prime(p as u64) || p as u64 >= (1u64 << 31) {
            return Err(Error::InvalidPrime(p as u64));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    /// Characteristic of the field (0 for the rationals).
    pub fn characteristic(&self) -> u32 {
        match self {
            FieldSpec::Prime(p) => *p,
            FieldSpec::Rationals => 0,
        }
    }

    pub fn is_prime_field(&self) -> bool {
        matches!(self, FieldSpec::Prime(_))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Prime(_) => Scalar::Fp(0),
            FieldSpec::Rationals => Scalar::Q(Box::new(BigRational::zero())),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldSpec::Prime(p) => Scalar::Fp(v.rem_euclid(*p as i64) as u32),
            FieldSpec::Rationals => Scalar::Q(Box::new(BigRational::from_integer(BigInt::from(v)))),
        }
    }

    /// The fraction `num / den`; `den` must be invertible in the field.
    pub fn from_ratio(&self, num: i64, den: i64) -> Option<Scalar> {
        let d = self.from_i64(den);
        let inv = self.inv(&d)?;
        Some(self.mul(&self.from_i64(num), &inv))
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Fp(v) => *v == 0,
            Scalar::Q(q) => q.is_zero(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => {
                Scalar::Fp(((*x as u64 + *y as u64) % *p as u64) as u32)
            }
            (FieldSpec::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(Box::new(&**x + &**y)),
            _ => panic!("scalar does not belong to field {self:?}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldSpec::Prime(p), Scalar::Fp(x)) => Scalar::Fp(if *x == 0 { 0 } else { p - x }),
            (FieldSpec::Rationals, Scalar::Q(x)) => Scalar::Q(Box::new(-&**x)),
            _ => panic!("scalar does not belong to field {self:?}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Prime(p), Scalar::Fp(x), Scalar::Fp(y)) => {
                Scalar::Fp(((*x as u64 * *y as u64) % *p as u64) as u32)
            }
            (FieldSpec::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(Box::new(&**x * &**y)),
            _ => panic!("scalar does not belong to field {self:?}"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        match (self, a) {
            (FieldSpec::Prime(p), Scalar::Fp(x)) => {
                Some(Scalar::Fp(pow_mod(*x as u64, *p as u64 - 2, *p as u64) as u32))
            }
            (FieldSpec::Rationals, Scalar::Q(x)) => Some(Scalar::Q(Box::new(x.recip()))),
            _ => panic!("scalar does not belong to field {self:?}"),
        }
    }

    pub fn pow(&self, a: &Scalar, e: u64) -> Scalar {
        let mut r = self.one();
        for _ in 0..e {
            r = self.mul(&r, a);
        }
        r
    }

    /// Residue of a prime-field scalar as an integer in `0..p`.
    pub fn residue(&self, a: &Scalar) -> Option<u32> {
        match a {
            Scalar::Fp(v) => Some(*v),
            Scalar::Q(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp(v) => write!(f, "{v}"),
            Scalar::Q(q) => write!(f, "{q}"),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "GF({p})"),
            FieldSpec::Rationals => write!(f, "Q"),
        }
    }
}

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(index: usize, field: &FieldSpec) -> Self {
        SparseVec { entries: vec![(index, field.one())] }
    }

    /// Builds a vector from unsorted pairs, summing duplicates and dropping zeros.
    pub fn from_pairs(field: &FieldSpec, mut pairs: Vec<(usize, Scalar)>) -> Self {
        pairs.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, Scalar)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w = field.add(w, &v),
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !field.is_zero(v));
        SparseVec { entries }
    }

    pub fn from_dense(field: &FieldSpec, values: &[Scalar]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !field.is_zero(v))
            .map(|(i, v)| (i, v.clone()))
            .collect();
        SparseVec { entries }
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Scalar)> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn leading(&self) -> Option<&(usize, Scalar)> {
        self.entries.first()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn get(&self, index: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn scale(&self, field: &FieldSpec, c: &Scalar) -> SparseVec {
        if field.is_zero(c) {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, field.mul(v, c))).collect(),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, field: &FieldSpec, c: &Scalar, other: &SparseVec) -> SparseVec {
        if field.is_zero(c) || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() || b < other.entries.len() {
            let ia = self.entries.get(a).map(|e| e.0).unwrap_or(usize::MAX);
            let ib = other.entries.get(b).map(|e| e.0).unwrap_or(usize::MAX);
            if ia < ib {
                out.push(self.entries[a].clone());
                a += 1;
            } else if ib < ia {
                out.push((ib, field.mul(c, &other.entries[b].1)));
                b += 1;
            } else {
                let v = field.add(&self.entries[a].1, &field.mul(c, &other.entries[b].1));
                if !field.is_zero(&v) {
                    out.push((ia, v));
                }
                a += 1;
                b += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, field: &FieldSpec, other: &SparseVec) -> SparseVec {
        self.axpy(field, &field.one(), other)
    }

    pub fn sub(&self, field: &FieldSpec, other: &SparseVec) -> SparseVec {
        self.axpy(field, &field.from_i64(-1), other)
    }

    /// Relabels indices through `map`; entries mapped to `None` are dropped.
    pub fn reindex(&self, field: &FieldSpec, map: impl Fn(usize) -> Option<usize>) -> SparseVec {
        let pairs = self
            .entries
            .iter()
            .filter_map(|(i, v)| map(*i).map(|j| (j, v.clone())))
            .collect();
        SparseVec::from_pairs(field, pairs)
    }

    pub fn to_dense(&self, field: &FieldSpec, len: usize) -> Vec<Scalar> {
        let mut out = vec![field.zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }
}

/// Immutable sparse matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    columns: Vec<SparseVec>,
}

impl Matrix {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, columns: vec![SparseVec::new(); cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let columns = (0..n).map(|i| SparseVec::unit(i, &field)).collect();
        Matrix { field, rows: n, cols: n, columns }
    }

    pub fn from_columns(field: FieldSpec, rows: usize, columns: Vec<SparseVec>) -> Self {
        for c in &columns {
            if let Some(m) = c.max_index() {
                assert!(m < rows, "column entry {m} exceeds row count {rows}");
            }
        }
        let cols = columns.len();
        Matrix { field, rows, cols, columns }
    }

    /// Builds from `(row, col, value)` triples; duplicates are summed.
    pub fn from_triplets(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Self {
        let mut per_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) out of bounds");
            per_col[c].push((r, v));
        }
        let columns = per_col.into_iter().map(|p| SparseVec::from_pairs(&field, p)).collect();
        Matrix { field, rows, cols, columns }
    }

    /// Dense row-major integer entries, reduced into the field.
    pub fn from_i64_rows(field: FieldSpec, data: &[Vec<i64>]) -> Self {
        let rows = data.len();
        let cols = data.first().map(|r| r.len()).unwrap_or(0);
        let trip = data.iter().enumerate().flat_map(|(r, row)| {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            row.iter().enumerate().map(move |(c, v)| (r, c, field.from_i64(*v)))
        });
        Matrix::from_triplets(field, rows, cols, trip.collect::<Vec<_>>())
    }

    pub fn from_row_vectors(field: FieldSpec, cols: usize, rows: &[SparseVec]) -> Self {
        let trip: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(r, v)| v.entries().iter().map(move |(c, s)| (r, *c, s.clone())))
            .collect();
        Matrix::from_triplets(field, rows.len(), cols, trip)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &SparseVec {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.columns[c].get(r).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.nnz()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_zero())
    }

    /// All stored entries as `(row, col, value)`, column-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.entries().iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn transpose(&self) -> Matrix {
        let mut per_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col.entries() {
                per_col[*r].push((c, v.clone()));
            }
        }
        let columns = per_col.into_iter().map(|entries| SparseVec { entries }).collect();
        Matrix { field: self.field, rows: self.cols, cols: self.rows, columns }
    }

    /// Row vectors of the matrix.
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        self.transpose().columns
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut pairs = Vec::new();
        for (i, s) in v.entries() {
            for (r, m) in self.columns[*i].entries() {
                pairs.push((*r, self.field.mul(m, s)));
            }
        }
        SparseVec::from_pairs(&self.field, pairs)
    }

    fn check_field(&self, other: &Matrix) -> Result<(), Error> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// Product `self * other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix, Error> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = other.columns.iter().map(|c| self.apply(c)).collect();
        Ok(Matrix { field: self.field, rows: self.rows, cols: other.cols, columns })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, Error> {
        self.lin_comb(&self.field.one(), other)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, Error> {
        self.lin_comb(&self.field.from_i64(-1), other)
    }

    /// `self + c * other`.
    pub fn lin_comb(&self, c: &Scalar, other: &Matrix) -> Result<Matrix, Error> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| a.axpy(&self.field, c, b))
            .collect();
        Ok(Matrix { field: self.field, rows: self.rows, cols: self.cols, columns })
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let columns = self.columns.iter().map(|col| col.scale(&self.field, c)).collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, columns }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let columns = idx.iter().map(|&c| self.columns[c].clone()).collect();
        Matrix { field: self.field, rows: self.rows, cols: idx.len(), columns }
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![self.field.zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v.clone();
        }
        out
    }

    /// Assembles a block matrix. Each block is `(block_row, block_col, matrix, coefficient)`;
    /// blocks landing on the same position are summed.
    pub fn assemble(
        field: FieldSpec,
        row_sizes: &[usize],
        col_sizes: &[usize],
        blocks: &[(usize, usize, &Matrix, Scalar)],
    ) -> Result<Matrix, Error> {
        let row_off = offsets(row_sizes);
        let col_off = offsets(col_sizes);
        let rows = row_off[row_sizes.len()];
        let cols = col_off[col_sizes.len()];
        let mut per_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (bi, bj, m, coef) in blocks {
            if m.rows != row_sizes[*bi] || m.cols != col_sizes[*bj] {
                return Err(Error::ShapeMismatch(format!(
                    "block ({bi},{bj}) is {}x{}, expected {}x{}",
                    m.rows, m.cols, row_sizes[*bi], col_sizes[*bj]
                )));
            }
            for (c, col) in m.columns.iter().enumerate() {
                let target = &mut per_col[col_off[*bj] + c];
                for (r, v) in col.entries() {
                    target.push((row_off[*bi] + r, field.mul(v, coef)));
                }
            }
        }
        let columns = per_col.into_iter().map(|p| SparseVec::from_pairs(&field, p)).collect();
        Ok(Matrix { field, rows, cols, columns })
    }

    /// Rank over the matrix's field. Large matrices are first split into the
    /// connected components of their row/column incidence graph.
    pub fn rank(&self) -> usize {
        if self.rows <= DENSE_LIMIT && self.cols <= DENSE_LIMIT {
            return self.rank_direct();
        }
        self.split_blocks().iter().map(|b| b.matrix.rank_direct()).sum()
    }

    fn rank_direct(&self) -> usize {
        rank_of_vectors(&self.field, self.rows, self.cols, || self.columns.clone(), || self.row_vectors())
    }

    /// Connected blocks of the incidence graph; zero columns and rows are omitted.
    /// Within a block, local indices follow global order.
    pub fn split_blocks(&self) -> Vec<Block> {
        let mut uf = UnionFind::new(self.rows + self.cols);
        for (c, col) in self.columns.iter().enumerate() {
            for (r, _) in col.entries() {
                uf.union(self.rows + c, *r);
            }
        }
        let mut block_of_root: HashMap<usize, usize> = HashMap::new();
        let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        // rows first so that each block's row list is sorted
        let mut row_block = vec![usize::MAX; self.rows];
        let mut row_local = vec![0usize; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            if col.is_zero() {
                continue;
            }
            let root = uf.find(self.rows + c);
            let b = *block_of_root.entry(root).or_insert_with(|| {
                blocks.push((Vec::new(), Vec::new()));
                blocks.len() - 1
            });
            blocks[b].1.push(c);
        }
        for r in 0..self.rows {
            let root = uf.find(r);
            if let Some(&b) = block_of_root.get(&root) {
                row_block[r] = b;
                row_local[r] = blocks[b].0.len();
                blocks[b].0.push(r);
            }
        }
        blocks
            .into_iter()
            .map(|(rows, cols)| {
                let columns = cols
                    .iter()
                    .map(|&c| SparseVec {
                        entries: self.columns[c]
                            .entries()
                            .iter()
                            .map(|(r, v)| (row_local[*r], v.clone()))
                            .collect(),
                    })
                    .collect();
                let matrix = Matrix { field: self.field, rows: rows.len(), cols: cols.len(), columns };
                Block { rows, cols, matrix }
            })
            .collect()
    }

    /// Basis of `{v : M v = 0}` in reduced row-echelon form.
    /// Some `x` with `M x = b`, or `None` when `b` is outside the column space.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        let solver = LinearSolver::new(self.field, self.rows, &self.columns);
        solver.solve(b).map(|c| SparseVec::from_dense(&self.field, &c))
    }

    pub fn kernel_basis(&self) -> Subspace {
        if self.rows <= DENSE_LIMIT && self.cols <= DENSE_LIMIT {
            return self.kernel_basis_direct();
        }
        let mut rows: Vec<SparseVec> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for (c, col) in self.columns.iter().enumerate() {
            if col.is_zero() {
                rows.push(SparseVec::unit(c, &self.field));
                pivots.push(c);
            }
        }
        for b in self.split_blocks() {
            let k = b.matrix.kernel_basis_direct();
            for (v, p) in k.rows.iter().zip(&k.pivots) {
                rows.push(v.reindex(&self.field, |i| Some(b.cols[i])));
                pivots.push(b.cols[*p]);
            }
        }
        let mut pairs: Vec<(usize, SparseVec)> = pivots.into_iter().zip(rows).collect();
        pairs.sort_by_key(|(p, _)| *p);
        let (pivots, rows) = pairs.into_iter().unzip();
        Subspace { field: self.field, ambient: self.cols, rows, pivots }
    }

    fn kernel_basis_direct(&self) -> Subspace {
        let echelon = Subspace::span(self.field, self.cols, self.row_vectors());
        let pivot_rows: Vec<(usize, &SparseVec)> =
            echelon.pivots.iter().copied().zip(echelon.rows.iter()).collect();
        let mut is_pivot = vec![false; self.cols];
        for (p, _) in &pivot_rows {
            is_pivot[*p] = true;
        }
        let mut kernel = Vec::new();
        for f in (0..self.cols).filter(|c| !is_pivot[*c]) {
            let mut pairs = vec![(f, self.field.one())];
            for (p, row) in &pivot_rows {
                if let Some(v) = row.get(f) {
                    pairs.push((*p, self.field.neg(v)));
                }
            }
            kernel.push(SparseVec::from_pairs(&self.field, pairs));
        }
        Subspace::span(self.field, self.cols, kernel)
    }
}

/// A connected block of a matrix: global row and column indices plus the local submatrix.
#[derive(Clone, Debug)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub matrix: Matrix,
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

pub(crate) fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

fn rank_of_vectors(
    field: &FieldSpec,
    rows: usize,
    cols: usize,
    columns: impl FnOnce() -> Vec<SparseVec>,
    row_vectors: impl FnOnce() -> Vec<SparseVec>,
) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    if rows <= DENSE_LIMIT && cols <= DENSE_LIMIT {
        let cols_v = columns();
        let dense: Vec<Vec<Scalar>> = cols_v.iter().map(|c| c.to_dense(field, rows)).collect();
        return dense_rank(field, dense);
    }
    // eliminate whichever family has fewer vectors
    let (vectors, len) = if cols <= rows { (columns(), rows) } else { (row_vectors(), cols) };
    let vectors = sparsest_first(field, len, vectors);
    match field {
        FieldSpec::Prime(p) => sparse_rank_prime(*p, len, vectors),
        FieldSpec::Rationals => sparse_rank_generic(field, len, vectors),
    }
}

/// Relabels coordinates by increasing occurrence count and orders vectors by
/// increasing support, so that left-looking elimination picks sparse pivots
/// first. Rank is unchanged by both permutations.
fn sparsest_first(field: &FieldSpec, len: usize, mut vectors: Vec<SparseVec>) -> Vec<SparseVec> {
    let mut count = vec![0usize; len];
    for v in &vectors {
        for (i, _) in v.entries() {
            count[*i] += 1;
        }
    }
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by_key(|&i| (count[i], i));
    let mut label = vec![0usize; len];
    for (new, &old) in order.iter().enumerate() {
        label[old] = new;
    }
    vectors.sort_by_key(|v| v.nnz());
    vectors.into_iter().map(|v| v.reindex(field, |i| Some(label[i]))).collect()
}

/// Dense Gaussian elimination on a list of vectors (each of equal length).
pub(crate) fn dense_rank(field: &FieldSpec, mut m: Vec<Vec<Scalar>>) -> usize {
    if let FieldSpec::Prime(p) = field {
        let p = *p as u64;
        let mut a: Vec<Vec<u64>> = m
            .iter()
            .map(|r| r.iter().map(|s| field.residue(s).unwrap() as u64).collect())
            .collect();
        let n_rows = a.len();
        let n_cols = a.first().map(|r| r.len()).unwrap_or(0);
        let mut rank = 0;
        for c in 0..n_cols {
            let Some(piv) = (rank..n_rows).find(|&r| a[r][c] != 0) else { continue };
            a.swap(rank, piv);
            let inv = pow_mod(a[rank][c], p - 2, p);
            for x in a[rank].iter_mut() {
                *x = *x * inv % p;
            }
            let pivot_row = a[rank].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != rank && row[c] != 0 {
                    let f = row[c];
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x = (*x + p * p - f * y % p) % p;
                    }
                }
            }
            rank += 1;
        }
        return rank;
    }
    let n_rows = m.len();
    let n_cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..n_cols {
        let Some(piv) = (rank..n_rows).find(|&r| !field.is_zero(&m[r][c])) else { continue };
        m.swap(rank, piv);
        let inv = field.inv(&m[rank][c]).unwrap();
        let pivot_row: Vec<Scalar> = m[rank].iter().map(|x| field.mul(x, &inv)).collect();
        for r in 0..n_rows {
            if r != rank && !field.is_zero(&m[r][c]) {
                let f = m[r][c].clone();
                for k in 0..n_cols {
                    m[r][k] = field.sub(&m[r][k], &field.mul(&f, &pivot_row[k]));
                }
            }
        }
        m[rank] = pivot_row;
        rank += 1;
    }
    rank
}

fn sparse_rank_prime(p: u32, len: usize, vectors: Vec<SparseVec>) -> usize {
    let p64 = p as u64;
    let mut pivots: Vec<Option<Vec<(usize, u32)>>> = vec![None; len];
    let mut rank = 0;
    for v in vectors {
        let mut cur: Vec<(usize, u32)> = v
            .into_entries()
            .into_iter()
            .map(|(i, s)| match s {
                Scalar::Fp(x) => (i, x),
                Scalar::Q(_) => unreachable!(),
            })
            .collect();
        while let Some(&(lead, coef)) = cur.first() {
            match &pivots[lead] {
                Some(pv) => {
                    // cur -= coef * pv, pivot vectors have leading coefficient 1
                    let f = (p64 - coef as u64) % p64;
                    let mut out = Vec::with_capacity(cur.len() + pv.len());
                    let (mut a, mut b) = (0, 0);
                    while a < cur.len() || b < pv.len() {
                        let ia = cur.get(a).map(|e| e.0).unwrap_or(usize::MAX);
                        let ib = pv.get(b).map(|e| e.0).unwrap_or(usize::MAX);
                        if ia < ib {
                            out.push(cur[a]);
                            a += 1;
                        } else if ib < ia {
                            out.push((ib, (f * pv[b].1 as u64 % p64) as u32));
                            b += 1;
                        } else {
                            let val = (cur[a].1 as u64 + f * pv[b].1 as u64) % p64;
                            if val != 0 {
                                out.push((ia, val as u32));
                            }
                            a += 1;
                            b += 1;
                        }
                    }
                    cur = out;
                }
                None => {
                    let inv = pow_mod(coef as u64, p64 - 2, p64);
                    for e in cur.iter_mut() {
                        e.1 = (e.1 as u64 * inv % p64) as u32;
                    }
                    pivots[lead] = Some(cur);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn sparse_rank_generic(field: &FieldSpec, len: usize, vectors: Vec<SparseVec>) -> usize {
    let mut pivots: Vec<Option<SparseVec>> = vec![None; len];
    let mut rank = 0;
    for mut cur in vectors {
        while let Some((lead, coef)) = cur.leading().cloned() {
            match &pivots[lead] {
                Some(pv) => cur = cur.axpy(field, &field.neg(&coef), pv),
                None => {
                    let inv = field.inv(&coef).unwrap();
                    pivots[lead] = Some(cur.scale(field, &inv));
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// A subspace of `field^ambient`, stored as a reduced row-echelon basis
/// with increasing pivot columns and unit pivots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    field: FieldSpec,
    ambient: usize,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: FieldSpec, ambient: usize) -> Self {
        Subspace { field, ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: FieldSpec, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            rows: (0..ambient).map(|i| SparseVec::unit(i, &field)).collect(),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span(field: FieldSpec, ambient: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut b = EchelonBuilder::new(field, ambient);
        for v in vectors {
            b.insert(v);
        }
        b.finish()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_row_vectors(self.field, self.ambient, &self.rows)
    }

    /// Residue of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = v.clone();
        for (row, p) in self.rows.iter().zip(&self.pivots) {
            if let Some(c) = v.get(*p) {
                out = out.axpy(&self.field, &self.field.neg(c), row);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` is not in the span.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<Scalar>> {
        if !self.contains(v) {
            return None;
        }
        Some(
            self.pivots
                .iter()
                .map(|p| v.get(*p).cloned().unwrap_or_else(|| self.field.zero()))
                .collect(),
        )
    }

    /// Non-pivot coordinates: a basis of the quotient `ambient / self`.
    pub fn complement_indices(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for p in &self.pivots {
            is_pivot[*p] = true;
        }
        (0..self.ambient).filter(|i| !is_pivot[*i]).collect()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::span(self.field, self.ambient, self.rows.iter().chain(&other.rows).cloned())
    }
}

/// Incremental reduced-echelon construction.
pub struct EchelonBuilder {
    field: FieldSpec,
    ambient: usize,
    rows: Vec<SparseVec>,
    pivot_of: HashMap<usize, usize>,
}

impl EchelonBuilder {
    pub fn new(field: FieldSpec, ambient: usize) -> Self {
        EchelonBuilder { field, ambient, rows: Vec::new(), pivot_of: HashMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = v.clone();
        for (i, c) in v.entries() {
            if let Some(&r) = self.pivot_of.get(i) {
                out = out.axpy(&self.field, &self.field.neg(c), &self.rows[r]);
            }
        }
        out
    }

    /// Inserts `v`; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        if let Some(m) = v.max_index() {
            assert!(m < self.ambient, "vector index {m} outside ambient {}", self.ambient);
        }
        let r = self.reduce(&v);
        let Some((lead, coef)) = r.leading().cloned() else { return false };
        let r = r.scale(&self.field, &self.field.inv(&coef).unwrap());
        for row in self.rows.iter_mut() {
            if let Some(c) = row.get(lead).cloned() {
                *row = row.axpy(&self.field, &self.field.neg(&c), &r);
            }
        }
        self.pivot_of.insert(lead, self.rows.len());
        self.rows.push(r);
        true
    }

    pub fn finish(self) -> Subspace {
        let mut pairs: Vec<(usize, SparseVec)> =
            self.pivot_of.iter().map(|(p, r)| (*p, self.rows[*r].clone())).collect();
        pairs.sort_by_key(|(p, _)| *p);
        let (pivots, rows) = pairs.into_iter().unzip();
        Subspace { field: self.field, ambient: self.ambient, rows, pivots }
    }
}

/// Expresses vectors in terms of a fixed independent family.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    field: FieldSpec,
    ambient: usize,
    count: usize,
    // rows [u | a] with u = sum_k a_k v_k in reduced echelon form
    echelon: Subspace,
}

impl LinearSolver {
    /// The family may be dependent; `solve` then returns one particular solution.
    pub fn new(field: FieldSpec, ambient: usize, family: &[SparseVec]) -> Self {
        let count = family.len();
        let augmented = family.iter().enumerate().map(|(k, v)| {
            let mut e = v.entries.clone();
            e.push((ambient + k, field.one()));
            SparseVec { entries: e }
        });
        let full = Subspace::span(field, ambient + count, augmented);
        // rows pivoting in the coefficient part record dependencies; drop them
        let (rows, pivots) = full
            .rows
            .into_iter()
            .zip(full.pivots)
            .filter(|(_, p)| *p < ambient)
            .unzip();
        let echelon = Subspace { field, ambient: ambient + count, rows, pivots };
        LinearSolver { field, ambient, count, echelon }
    }

    /// Coefficients `c` with `w = sum c_k v_k`, or `None` if `w` is outside the span.
    pub fn solve(&self, w: &SparseVec) -> Option<Vec<Scalar>> {
        let mut residue = w.clone();
        let mut coeffs = SparseVec::new();
        for (row, p) in self.echelon.rows.iter().zip(&self.echelon.pivots) {
            if let Some(c) = w.get(*p) {
                residue = residue.axpy(&self.field, &self.field.neg(c), row);
                coeffs = coeffs.axpy(&self.field, c, row);
            }
        }
        // the u-part of residue must vanish; its a-part is -coeffs
        if residue.entries.iter().any(|(i, _)| *i < self.ambient) {
            return None;
        }
        let mut out = vec![self.field.zero(); self.count];
        for (i, v) in coeffs.entries() {
            if *i >= self.ambient {
                out[*i - self.ambient] = v.clone();
            }
        }
        Some(out)
    }
}

pub fn rank(m: &Matrix) -> usize {
    m.rank()
}

pub fn kernel_basis(m: &Matrix) -> Subspace {
    m.kernel_basis()
}

/// `dim ker(d_out) - rank(d_in)` for composable `d_in: C_{n+1} -> C_n`, `d_out: C_n -> C_{n-1}`.
pub fn homology_dim(d_in: &Matrix, d_out: &Matrix) -> Result<usize, Error> {
    if d_in.rows != d_out.cols {
        return Err(Error::ShapeMismatch(format!(
            "d_in has {} rows but d_out has {} columns",
            d_in.rows, d_out.cols
        )));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(Error::CompositeNonzero);
    }
    Ok(d_out.cols - d_out.rank() - d_in.rank())
}

/// Exact rational from a pair of integers, used by parsers and tests.
pub fn rational(num: i64, den: i64) -> Scalar {
    assert!(den != 0);
    Scalar::Q(Box::new(BigRational::new(BigInt::from(num), BigInt::from(den))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn identity_rank() {
        assert_eq!(Matrix::identity(gf(3), 4).rank(), 4);
    }

    #[test]
    fn proportional_rows_over_q() {
        let m = Matrix::from_i64_rows(FieldSpec::Rationals, &[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_of_zero_is_everything() {
        let k = Matrix::zero(gf(5), 3, 3).kernel_basis();
        assert_eq!(k.dim(), 3);
        assert_eq!(k, Subspace::full(gf(5), 3));
    }

    #[test]
    fn kernel_of_all_ones_row() {
        let f = gf(2);
        let k = Matrix::from_i64_rows(f, &[vec![1, 1]]).kernel_basis();
        assert_eq!(k.dim(), 1);
        let expect = SparseVec::from_pairs(&f, vec![(0, f.one()), (1, f.one())]);
        assert_eq!(k.basis()[0], expect);
    }

    #[test]
    fn homology_dim_trivial_cases() {
        let f = gf(7);
        let z = Matrix::zero(f, 3, 3);
        assert_eq!(homology_dim(&z, &z).unwrap(), 3);
        let id = Matrix::identity(f, 3);
        assert_eq!(homology_dim(&id, &z).unwrap(), 0);
        assert!(matches!(homology_dim(&id, &id), Err(Error::CompositeNonzero)));
    }

    #[test]
    fn invalid_primes_rejected() {
        assert!(FieldSpec::prime(4).is_err());
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::prime(2147483647).is_ok());
        assert!(FieldSpec::prime(4294967291).is_err());
    }

    #[test]
    fn rational_canonical_form() {
        let f = FieldSpec::Rationals;
        assert_eq!(f.from_ratio(2, -4).unwrap(), rational(-1, 2));
        assert_eq!(f.add(&rational(1, 3), &rational(2, 3)), f.one());
    }

    #[test]
    fn subspace_coordinates_roundtrip() {
        let f = gf(5);
        let vs = vec![
            SparseVec::from_dense(&f, &[f.from_i64(1), f.from_i64(2), f.zero(), f.from_i64(3)]),
            SparseVec::from_dense(&f, &[f.zero(), f.from_i64(1), f.from_i64(4), f.from_i64(1)]),
        ];
        let s = Subspace::span(f, 4, vs.clone());
        let combo = vs[0].axpy(&f, &f.from_i64(3), &vs[1]);
        let coords = s.coordinates(&combo).unwrap();
        let mut rebuilt = SparseVec::new();
        for (c, row) in coords.iter().zip(s.basis()) {
            rebuilt = rebuilt.axpy(&f, c, row);
        }
        assert_eq!(rebuilt, combo);
        assert!(s.coordinates(&SparseVec::unit(3, &f)).is_none());
    }
}
