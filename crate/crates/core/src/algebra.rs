//! Finite-dimensional unital associative algebras given by structure
//! constants, bimodules by action matrices, and the Hochschild machinery:
//! the bar/Hochschild simplicial object, Hochschild (co)homology, reduced
//! Hochschild cohomology through `Ext(I_A, -)`, and a W₂-lift obstruction test.
//!
//! Tensor words `a_1 ⊗ … ⊗ a_n` of basis elements are encoded base `dim A`
//! with `a_1` most significant; `M ⊗ A^{⊗n}` puts the module index in front.

use std::sync::Arc;

use crate::exactlin::{LinearSolver, Matrix, Scalar, SparseVec, Subspace};
use crate::simplicial::SimplicialVS;
use crate::{Error, FieldSpec, Result};

/// Index of a word in base `base`, first letter most significant.
pub fn encode(word: &[usize], base: usize) -> usize {
    word.iter().fold(0, |acc, &a| acc * base + a)
}

/// Inverse of `encode` for words of length `len`.
pub fn decode(mut index: usize, len: usize, base: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = index % base;
        index /= base;
    }
    out
}

/// `a ⊗ b` with `b` from a space of dimension `dim_b`.
pub fn tensor_vec(field: &FieldSpec, a: &SparseVec, b: &SparseVec, dim_b: usize) -> SparseVec {
    let mut pairs = Vec::with_capacity(a.nnz() * b.nnz());
    for (i, x) in a.entries() {
        for (j, y) in b.entries() {
            pairs.push((i * dim_b + j, field.mul(x, y)));
        }
    }
    SparseVec::from_pairs(field, pairs)
}

/// Unital associative algebra with basis `e_0..e_{dim-1}`.
#[derive(Clone, Debug)]
pub struct Algebra {
    field: FieldSpec,
    labels: Vec<String>,
    unit: SparseVec,
    mult: Vec<Vec<SparseVec>>,
    group_table: Option<Vec<Vec<usize>>>,
}

impl Algebra {
    /// Validates associativity and the unit laws exactly.
    pub fn new(field: FieldSpec, labels: Vec<String>, unit: SparseVec, mult: Vec<Vec<SparseVec>>) -> Result<Self> {
        let dim = labels.len();
        if mult.len() != dim || mult.iter().any(|r| r.len() != dim) {
            return Err(Error::ShapeMismatch("structure tensor must be dim x dim".into()));
        }
        if mult.iter().flatten().chain(std::iter::once(&unit)).any(|v| v.max_index().is_some_and(|m| m >= dim)) {
            return Err(Error::ShapeMismatch("structure constant index out of range".into()));
        }
        let a = Algebra { field, labels, unit, mult, group_table: None };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            let e = SparseVec::unit(i, &self.field);
            if self.mul(&self.unit, &e) != e || self.mul(&e, &self.unit) != e {
                return Err(Error::Invalid(format!("unit law fails on basis element {}", self.labels[i])));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = &self.mult[i][j];
                for k in 0..n {
                    let left = self.mul(ij, &SparseVec::unit(k, &self.field));
                    let right = self.mul(&SparseVec::unit(i, &self.field), &self.mult[j][k]);
                    if left != right {
                        return Err(Error::Invalid(format!(
                            "associativity fails on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ground_field(field: FieldSpec) -> Self {
        Algebra::new(field, vec!["1".into()], SparseVec::unit(0, &field), vec![vec![SparseVec::unit(0, &field)]])
            .expect("the field is an algebra")
    }

    /// Group algebra from a multiplication table `table[g][h] = gh`.
    pub fn group_algebra(field: FieldSpec, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::Invalid("group table must be a square table of element indices".into()));
        }
        for g in 0..n {
            for h in 0..n {
                for k in 0..n {
                    if table[table[g][h]][k] != table[g][table[h][k]] {
                        return Err(Error::Invalid("group table is not associative".into()));
                    }
                }
            }
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::Invalid("group table has no identity".into()))?;
        for g in 0..n {
            if !(0..n).any(|h| table[g][h] == e) {
                return Err(Error::Invalid(format!("element {g} has no inverse")));
            }
        }
        let mult = (0..n).map(|g| (0..n).map(|h| SparseVec::unit(table[g][h], &field)).collect()).collect();
        let labels = (0..n).map(|g| format!("g{g}")).collect();
        let mut a = Algebra::new(field, labels, SparseVec::unit(e, &field), mult)?;
        a.group_table = Some(table);
        Ok(a)
    }

    pub fn cyclic_group(field: FieldSpec, n: usize) -> Result<Self> {
        let table = (0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect();
        Algebra::group_algebra(field, table)
    }

    /// `M_n(k)` with matrix units `e_{ij}` at index `i*n + j`.
    pub fn matrix_algebra(field: FieldSpec, n: usize) -> Result<Self> {
        let idx = |i: usize, j: usize| i * n + j;
        let mut mult = vec![vec![SparseVec::new(); n * n]; n * n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    mult[idx(i, j)][idx(j, l)] = SparseVec::unit(idx(i, l), &field);
                }
            }
        }
        let unit = SparseVec::from_pairs(&field, (0..n).map(|i| (idx(i, i), field.one())).collect());
        let labels = (0..n * n).map(|k| format!("e{}{}", k / n, k % n)).collect();
        Algebra::new(field, labels, unit, mult)
    }

    /// Upper-triangular `n x n` matrices, basis `e_{ij}` with `i <= j` in row-major order.
    pub fn upper_triangular(field: FieldSpec, n: usize) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let pos = |i: usize, j: usize| pairs.iter().position(|&p| p == (i, j)).unwrap();
        let d = pairs.len();
        let mut mult = vec![vec![SparseVec::new(); d]; d];
        for (a, &(i, j)) in pairs.iter().enumerate() {
            for (b, &(k, l)) in pairs.iter().enumerate() {
                if j == k {
                    mult[a][b] = SparseVec::unit(pos(i, l), &field);
                }
            }
        }
        let unit = SparseVec::from_pairs(&field, (0..n).map(|i| (pos(i, i), field.one())).collect());
        let labels = pairs.iter().map(|(i, j)| format!("e{i}{j}")).collect();
        Algebra::new(field, labels, unit, mult)
    }

    /// `k[x]/x^n` with basis `1, x, …, x^{n-1}`.
    pub fn truncated_polynomial(field: FieldSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("k[x]/x^0 is the zero ring".into()));
        }
        let mult = (0..n)
            .map(|i| (0..n).map(|j| if i + j < n { SparseVec::unit(i + j, &field) } else { SparseVec::new() }).collect())
            .collect();
        let labels = (0..n).map(|i| format!("x^{i}")).collect();
        Algebra::new(field, labels, SparseVec::unit(0, &field), mult)
    }

    /// Path algebra of an acyclic quiver; paths compose left to right
    /// (`p·q` is `p` followed by `q`). Trivial paths come first.
    pub fn path_algebra(field: FieldSpec, vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if edges.iter().any(|&(s, t)| s >= vertices || t >= vertices) {
            return Err(Error::Invalid("edge endpoint is not a vertex".into()));
        }
        // Kahn's algorithm detects cycles
        let mut indeg = vec![0usize; vertices];
        for &(_, t) in edges {
            indeg[t] += 1;
        }
        let mut stack: Vec<usize> = (0..vertices).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &(s, t) in edges {
                if s == v {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        stack.push(t);
                    }
                }
            }
        }
        if seen != vertices {
            return Err(Error::Invalid("quiver has an oriented cycle".into()));
        }
        // a path is (start vertex, edge list)
        let mut paths: Vec<(usize, Vec<usize>)> = (0..vertices).map(|v| (v, Vec::new())).collect();
        let mut frontier = paths.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (s, es) in &frontier {
                let end = es.last().map(|&e| edges[e].1).unwrap_or(*s);
                for (e, &(a, _)) in edges.iter().enumerate() {
                    if a == end {
                        let mut p = es.clone();
                        p.push(e);
                        next.push((*s, p));
                    }
                }
            }
            paths.extend(next.iter().cloned());
            frontier = next;
        }
        let end_of = |p: &(usize, Vec<usize>)| p.1.last().map(|&e| edges[e].1).unwrap_or(p.0);
        let find = |p: &(usize, Vec<usize>)| paths.iter().position(|q| q == p).unwrap();
        let d = paths.len();
        let mut mult = vec![vec![SparseVec::new(); d]; d];
        for (i, p) in paths.iter().enumerate() {
            for (j, q) in paths.iter().enumerate() {
                if end_of(p) == q.0 {
                    let mut es = p.1.clone();
                    es.extend(&q.1);
                    mult[i][j] = SparseVec::unit(find(&(p.0, es)), &field);
                }
            }
        }
        let unit = SparseVec::from_pairs(&field, (0..vertices).map(|v| (v, field.one())).collect());
        let labels = paths
            .iter()
            .map(|(s, es)| {
                if es.is_empty() {
                    format!("v{s}")
                } else {
                    es.iter().map(|e| format!("a{e}")).collect::<Vec<_>>().join("")
                }
            })
            .collect();
        Algebra::new(field, labels, unit, mult)
    }

    /// Direct product `A × B`.
    pub fn product(a: &Algebra, b: &Algebra) -> Result<Self> {
        if a.field != b.field {
            return Err(Error::FieldMismatch);
        }
        let (da, db) = (a.dim(), b.dim());
        let shift = |v: &SparseVec| v.reindex(&a.field, |i| Some(i + da));
        let mut mult = vec![vec![SparseVec::new(); da + db]; da + db];
        for i in 0..da {
            for j in 0..da {
                mult[i][j] = a.mult[i][j].clone();
            }
        }
        for i in 0..db {
            for j in 0..db {
                mult[da + i][da + j] = shift(&b.mult[i][j]);
            }
        }
        let unit = a.unit.add(&a.field, &shift(&b.unit));
        let labels = a.labels.iter().map(|l| format!("{l}.1")).chain(b.labels.iter().map(|l| format!("{l}.2"))).collect();
        Algebra::new(a.field, labels, unit, mult)
    }

    pub fn opposite(a: &Algebra) -> Result<Self> {
        let n = a.dim();
        let mult = (0..n).map(|i| (0..n).map(|j| a.mult[j][i].clone()).collect()).collect();
        let mut op = Algebra::new(a.field, a.labels.clone(), a.unit.clone(), mult)?;
        op.group_table = a.group_table.as_ref().map(|t| (0..n).map(|g| (0..n).map(|h| t[h][g]).collect()).collect());
        Ok(op)
    }

    /// `A ⊗ B` with basis `e_i ⊗ f_k` at index `i * dim B + k`.
    pub fn tensor(a: &Algebra, b: &Algebra) -> Result<Self> {
        if a.field != b.field {
            return Err(Error::FieldMismatch);
        }
        let f = a.field;
        let (da, db) = (a.dim(), b.dim());
        let mut mult = vec![vec![SparseVec::new(); da * db]; da * db];
        for i in 0..da {
            for k in 0..db {
                for j in 0..da {
                    for l in 0..db {
                        mult[i * db + k][j * db + l] = tensor_vec(&f, &a.mult[i][j], &b.mult[k][l], db);
                    }
                }
            }
        }
        let unit = tensor_vec(&f, &a.unit, &b.unit, db);
        let labels = a.labels.iter().flat_map(|x| b.labels.iter().map(move |y| format!("{x}*{y}"))).collect();
        Algebra::new(f, labels, unit, mult)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> &SparseVec {
        &self.unit
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &SparseVec {
        &self.mult[i][j]
    }

    /// Group multiplication table when built by the group-algebra factory.
    pub fn group_table(&self) -> Option<&Vec<Vec<usize>>> {
        self.group_table.as_ref()
    }

    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut pairs = Vec::new();
        for (i, a) in x.entries() {
            for (j, b) in y.entries() {
                let c = self.field.mul(a, b);
                for (t, m) in self.mult[*i][*j].entries() {
                    pairs.push((*t, self.field.mul(&c, m)));
                }
            }
        }
        SparseVec::from_pairs(&self.field, pairs)
    }

    /// Ordered product of basis elements; the empty product is the unit.
    pub fn product_of(&self, word: &[usize]) -> SparseVec {
        match word.split_first() {
            None => self.unit.clone(),
            Some((&first, rest)) => {
                let mut acc = SparseVec::unit(first, &self.field);
                for &w in rest {
                    acc = self.mul(&acc, &SparseVec::unit(w, &self.field));
                }
                acc
            }
        }
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim()).all(|i| (0..i).all(|j| self.mult[i][j] == self.mult[j][i]))
    }

    /// Dimension of the center, as the common kernel of `x ↦ e_i x - x e_i`.
    pub fn center_dim(&self) -> usize {
        Bimodule::diagonal(self).invariants().dim()
    }

    /// Linear map `A ⊗ A -> A`, `x ⊗ y ↦ xy`.
    pub fn multiplication_map(&self) -> Matrix {
        let n = self.dim();
        let cols = (0..n * n).map(|k| self.mult[k / n][k % n].clone()).collect();
        Matrix::from_columns(self.field, n, cols)
    }

    /// The same algebra in the basis given by the columns of `p` (old
    /// coordinates). Returns the transported algebra and `p^{-1}`.
    pub fn change_basis(&self, p: &Matrix) -> Result<(Algebra, Matrix)> {
        let n = self.dim();
        if p.rows() != n || p.cols() != n || p.rank() != n {
            return Err(Error::Invalid("change of basis must be an invertible dim x dim matrix".into()));
        }
        let solver = LinearSolver::new(self.field, n, p.columns());
        let coords = |v: &SparseVec| SparseVec::from_dense(&self.field, &solver.solve(v).expect("p is invertible"));
        let p_inv = Matrix::from_columns(self.field, n, (0..n).map(|k| coords(&SparseVec::unit(k, &self.field))).collect());
        let mult = (0..n)
            .map(|i| (0..n).map(|j| coords(&self.mul(p.column(i), p.column(j)))).collect())
            .collect();
        let labels = (0..n).map(|i| format!("b{i}")).collect();
        let a = Algebra::new(self.field, labels, coords(&self.unit), mult)?;
        Ok((a, p_inv))
    }

    /// Primitive central idempotents, found by enumerating the center over a
    /// prime field; `None` when the center has more than `limit` elements.
    pub fn primitive_central_idempotents(&self, limit: u64) -> Option<Vec<SparseVec>> {
        if !self.field.is_prime_field() {
            return None;
        }
        let z = Bimodule::diagonal(self).invariants();
        let p = self.field.characteristic() as u64;
        let count = p.checked_pow(z.dim() as u32).filter(|&c| c <= limit)?;
        let mut idempotents = Vec::new();
        for c in 1..count {
            let mut v = SparseVec::new();
            let mut rest = c;
            for b in z.basis() {
                let coef = self.field.from_i64((rest % p) as i64);
                rest /= p;
                v = v.axpy(&self.field, &coef, b);
            }
            if self.mul(&v, &v) == v {
                idempotents.push(v);
            }
        }
        let primitive = idempotents
            .iter()
            .filter(|e| idempotents.iter().all(|f| f == *e || self.mul(e, f) != *f))
            .cloned()
            .collect();
        Some(primitive)
    }

    /// Basis adapted to `A = ⊕ A e_i` over the primitive central idempotents,
    /// so that products across blocks vanish. Returns the transported algebra,
    /// the change of basis `p` and `p^{-1}`; `None` when there is one block.
    pub fn block_adapted(&self, limit: u64) -> Option<(Algebra, Matrix, Matrix)> {
        let idem = self.primitive_central_idempotents(limit)?;
        if idem.len() < 2 {
            return None;
        }
        let mut cols = Vec::new();
        for e in &idem {
            let block = Subspace::span(
                self.field,
                self.dim(),
                (0..self.dim()).map(|k| self.mul(e, &SparseVec::unit(k, &self.field))),
            );
            cols.extend(block.basis().iter().cloned());
        }
        if cols.len() != self.dim() {
            return None;
        }
        let p = Matrix::from_columns(self.field, self.dim(), cols);
        let (a, p_inv) = self.change_basis(&p).ok()?;
        Some((a, p, p_inv))
    }
}

/// A-bimodule through left and right action matrices of each basis element of A.
#[derive(Clone, Debug)]
pub struct Bimodule {
    field: FieldSpec,
    dim: usize,
    left: Vec<Matrix>,
    right: Vec<Matrix>,
}

impl Bimodule {
    /// Validates the action laws against `a`.
    pub fn new(a: &Algebra, dim: usize, left: Vec<Matrix>, right: Vec<Matrix>) -> Result<Self> {
        if left.len() != a.dim() || right.len() != a.dim() {
            return Err(Error::ShapeMismatch("one action matrix per basis element".into()));
        }
        if left.iter().chain(&right).any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::ShapeMismatch("action matrices must be dim x dim".into()));
        }
        let m = Bimodule { field: a.field, dim, left, right };
        let id = Matrix::identity(a.field, dim);
        if m.left_action(a.unit()) != id || m.right_action(a.unit()) != id {
            return Err(Error::Invalid("unit does not act as the identity".into()));
        }
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let prod = a.basis_product(i, j);
                if m.left[i].mul(&m.left[j])? != m.left_action(prod) {
                    return Err(Error::Invalid("left action is not multiplicative".into()));
                }
                if m.right[j].mul(&m.right[i])? != m.right_action(prod) {
                    return Err(Error::Invalid("right action is not multiplicative".into()));
                }
                if m.left[i].mul(&m.right[j])? != m.right[j].mul(&m.left[i])? {
                    return Err(Error::Invalid("left and right actions do not commute".into()));
                }
            }
        }
        Ok(m)
    }

    /// `A` acting on itself from both sides.
    pub fn diagonal(a: &Algebra) -> Self {
        let n = a.dim();
        let left = (0..n)
            .map(|i| Matrix::from_columns(a.field, n, (0..n).map(|j| a.mult[i][j].clone()).collect()))
            .collect();
        let right = (0..n)
            .map(|i| Matrix::from_columns(a.field, n, (0..n).map(|j| a.mult[j][i].clone()).collect()))
            .collect();
        Bimodule { field: a.field, dim: n, left, right }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn combine(&self, mats: &[Matrix], x: &SparseVec) -> Matrix {
        let mut acc = Matrix::zero(self.field, self.dim, self.dim);
        for (i, c) in x.entries() {
            acc = acc.lin_comb(c, &mats[*i]).expect("action matrices share a shape");
        }
        acc
    }

    /// Matrix of `m ↦ x·m`.
    pub fn left_action(&self, x: &SparseVec) -> Matrix {
        self.combine(&self.left, x)
    }

    /// Matrix of `m ↦ m·x`.
    pub fn right_action(&self, x: &SparseVec) -> Matrix {
        self.combine(&self.right, x)
    }

    pub fn left_basis(&self, i: usize) -> &Matrix {
        &self.left[i]
    }

    pub fn right_basis(&self, i: usize) -> &Matrix {
        &self.right[i]
    }

    /// `{m : e_i m = m e_i for all i}`.
    pub fn invariants(&self) -> Subspace {
        let mut rows = Vec::new();
        for (l, r) in self.left.iter().zip(&self.right) {
            rows.extend(l.sub(r).expect("same shape").row_vectors());
        }
        Matrix::from_row_vectors(self.field, self.dim, &rows).kernel_basis()
    }
}

/// `I_A = ker(A ⊗ A -> A)` as a bimodule, with its inclusion into `A ⊗ A`.
#[derive(Clone, Debug)]
pub struct NCFormsBimodule {
    pub bimodule: Bimodule,
    /// Columns are the basis of `I_A` inside `A ⊗ A`.
    pub inclusion: Matrix,
}

impl NCFormsBimodule {
    pub fn new(a: &Algebra) -> Result<Self> {
        let f = a.field;
        let n = a.dim();
        let kernel = a.multiplication_map().kernel_basis();
        let basis: Vec<SparseVec> = kernel.basis().to_vec();
        let solver = LinearSolver::new(f, n * n, &basis);
        let act = |v: &SparseVec, on_left: bool, k: usize| -> SparseVec {
            let mut acc = SparseVec::new();
            for (idx, c) in v.entries() {
                let (x, y) = (idx / n, idx % n);
                let t = if on_left {
                    tensor_vec(&f, &a.mult[k][x], &SparseVec::unit(y, &f), n)
                } else {
                    tensor_vec(&f, &SparseVec::unit(x, &f), &a.mult[y][k], n)
                };
                acc = acc.axpy(&f, c, &t);
            }
            acc
        };
        let mut left = Vec::new();
        let mut right = Vec::new();
        for k in 0..n {
            for (side, out) in [(true, &mut left), (false, &mut right)] {
                let cols = basis
                    .iter()
                    .map(|v| {
                        let img = act(v, side, k);
                        solver
                            .solve(&img)
                            .map(|c| SparseVec::from_dense(&f, &c))
                            .ok_or_else(|| Error::Mismatch("I_A is not stable under the actions".into()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(Matrix::from_columns(f, basis.len(), cols));
            }
        }
        let bimodule = Bimodule::new(a, basis.len(), left, right)?;
        let inclusion = Matrix::from_columns(f, n * n, basis);
        Ok(NCFormsBimodule { bimodule, inclusion })
    }
}

/// Dimension of `Hom_{A-A}(x, y)`, by solving the intertwining equations.
pub fn hom_bimod_dim(x: &Bimodule, y: &Bimodule) -> usize {
    let f = x.field;
    let (dx, dy) = (x.dim, y.dim);
    // unknown φ: dy x dx, entry (r, c) at index r * dx + c; equations Y φ - φ X = 0
    let mut trip = Vec::new();
    let mut row = 0;
    for (ys, xs) in [(&y.left, &x.left), (&y.right, &x.right)] {
        for (ym, xm) in ys.iter().zip(xs.iter()) {
            for (r, t, v) in ym.entries() {
                for c in 0..dx {
                    trip.push((row + r * dx + c, t * dx + c, v.clone()));
                }
            }
            for (t, c, v) in xm.entries() {
                for r in 0..dy {
                    trip.push((row + r * dx + c, r * dx + t, f.neg(v)));
                }
            }
            row += dy * dx;
        }
    }
    let m = Matrix::from_triplets(f, row, dy * dx, trip);
    dy * dx - m.rank()
}

/// Face `d_i` of the Hochschild object at level `n`, applied to basis element `col`.
fn hochschild_face(a: &Algebra, m: &Bimodule, n: usize, i: usize, col: usize) -> SparseVec {
    let f = a.field;
    let d = a.dim();
    let pow = d.pow(n as u32);
    let (mi, word) = (col / pow, decode(col % pow, n, d));
    let rest_pow = d.pow(n as u32 - 1);
    let mv = SparseVec::unit(mi, &f);
    if i == 0 {
        let acted = m.right[word[0]].apply(&mv);
        let w = SparseVec::unit(encode(&word[1..], d), &f);
        tensor_vec(&f, &acted, &w, rest_pow)
    } else if i == n {
        let acted = m.left[word[n - 1]].apply(&mv);
        let w = SparseVec::unit(encode(&word[..n - 1], d), &f);
        tensor_vec(&f, &acted, &w, rest_pow)
    } else {
        let prod = &a.mult[word[i - 1]][word[i]];
        let mut pairs = Vec::with_capacity(prod.nnz());
        let mut w: Vec<usize> = Vec::with_capacity(n - 1);
        for (t, c) in prod.entries() {
            w.clear();
            w.extend_from_slice(&word[..i - 1]);
            w.push(*t);
            w.extend_from_slice(&word[i + 1..]);
            pairs.push((mi * rest_pow + encode(&w, d), c.clone()));
        }
        SparseVec::from_pairs(&f, pairs)
    }
}

/// Degeneracy `s_i` at level `n` (inserts the unit after the `i`-th tensor factor).
fn hochschild_degeneracy(a: &Algebra, n: usize, i: usize, col: usize) -> SparseVec {
    let f = a.field;
    let d = a.dim();
    let pow = d.pow(n as u32);
    let (mi, word) = (col / pow, decode(col % pow, n, d));
    let next_pow = pow * d;
    let mut pairs = Vec::new();
    for (u, c) in a.unit.entries() {
        let mut w = word.clone();
        w.insert(i, *u);
        pairs.push((mi * next_pow + encode(&w, d), c.clone()));
    }
    SparseVec::from_pairs(&f, pairs)
}

/// Simplicial object with level `n` equal to `M ⊗ A^{⊗n}` (levels `0..=D`).
pub fn hochschild_complex(a: &Algebra, m: &Bimodule, d_top: usize) -> Result<SimplicialVS> {
    if d_top < 1 {
        return Err(Error::Invalid("truncation must be at least 1".into()));
    }
    let f = a.field;
    let dims: Vec<usize> = (0..=d_top).map(|n| m.dim * a.dim().pow(n as u32)).collect();
    let mut faces = vec![Vec::new()];
    for n in 1..=d_top {
        let level = (0..=n)
            .map(|i| {
                let cols = (0..dims[n]).map(|c| hochschild_face(a, m, n, i, c)).collect();
                Arc::new(Matrix::from_columns(f, dims[n - 1], cols))
            })
            .collect();
        faces.push(level);
    }
    let degens = (0..d_top)
        .map(|n| {
            (0..=n)
                .map(|i| {
                    let cols = (0..dims[n]).map(|c| hochschild_degeneracy(a, n, i, c)).collect();
                    Arc::new(Matrix::from_columns(f, dims[n + 1], cols))
                })
                .collect()
        })
        .collect();
    SimplicialVS::new(f, dims, faces, degens)
}

/// Hochschild boundary `b = Σ (-1)^i d_i` out of level `n`, built without storing faces.
pub fn hochschild_boundary(a: &Algebra, m: &Bimodule, n: usize) -> Matrix {
    let f = a.field;
    let rows = m.dim * a.dim().pow(n as u32 - 1);
    let cols = (0..m.dim * a.dim().pow(n as u32))
        .map(|c| {
            let mut pairs = Vec::new();
            for i in 0..=n {
                let s = if i % 2 == 0 { f.one() } else { f.from_i64(-1) };
                for (r, v) in hochschild_face(a, m, n, i, c).into_entries() {
                    pairs.push((r, f.mul(&s, &v)));
                }
            }
            SparseVec::from_pairs(&f, pairs)
        })
        .collect();
    Matrix::from_columns(f, rows, cols)
}

/// `HH_i(A, M)` for `i = 0..D-1`.
pub fn hh_dims_with(a: &Algebra, m: &Bimodule, d: usize) -> Vec<usize> {
    let ranks: Vec<usize> = (1..=d).map(|n| hochschild_boundary(a, m, n).rank()).collect();
    (0..d)
        .map(|i| {
            let dim = m.dim * a.dim().pow(i as u32);
            let out = if i == 0 { 0 } else { ranks[i - 1] };
            dim - out - ranks[i]
        })
        .collect()
}

/// Hochschild homology with diagonal coefficients, degrees `0..D-1`.
pub fn hh_dims(a: &Algebra, d: usize) -> Vec<usize> {
    hh_dims_with(a, &Bimodule::diagonal(a), d)
}

/// Cochain differential `δ: Hom(A^{⊗n}, M) -> Hom(A^{⊗(n+1)}, M)`.
/// A cochain coordinate `(w, k)` sits at index `w * dim M + k`.
pub fn hochschild_cochain_differential(a: &Algebra, m: &Bimodule, n: usize) -> Matrix {
    let f = a.field;
    let d = a.dim();
    let dm = m.dim;
    let words_out = d.pow(n as u32 + 1);
    let mut trip = Vec::new();
    let neg_if = |odd: bool, v: &Scalar| if odd { f.neg(v) } else { v.clone() };
    for u in 0..words_out {
        let word = decode(u, n + 1, d);
        // a_1 · φ(a_2 … a_{n+1})
        let tail = encode(&word[1..], d);
        for (k, mm, v) in m.left[word[0]].entries() {
            trip.push((u * dm + k, tail * dm + mm, v.clone()));
        }
        // Σ (-1)^i φ(… a_i a_{i+1} …)
        for i in 1..=n {
            for (t, c) in a.mult[word[i - 1]][word[i]].entries() {
                let mut w = word[..i - 1].to_vec();
                w.push(*t);
                w.extend_from_slice(&word[i + 1..]);
                let wi = encode(&w, d);
                for k in 0..dm {
                    trip.push((u * dm + k, wi * dm + k, neg_if(i % 2 == 1, c)));
                }
            }
        }
        // (-1)^{n+1} φ(a_1 … a_n) · a_{n+1}
        let head = encode(&word[..n], d);
        for (k, mm, v) in m.right[word[n]].entries() {
            trip.push((u * dm + k, head * dm + mm, neg_if((n + 1) % 2 == 1, v)));
        }
    }
    Matrix::from_triplets(f, words_out * dm, d.pow(n as u32) * dm, trip)
}

/// `HH^i(A, M)` for `i = 0..D-1`.
pub fn hochschild_cohomology_dims(a: &Algebra, m: &Bimodule, d: usize) -> Vec<usize> {
    let ranks: Vec<usize> = (0..d).map(|n| hochschild_cochain_differential(a, m, n).rank()).collect();
    (0..d)
        .map(|i| {
            let dim = m.dim * a.dim().pow(i as u32);
            let incoming = if i == 0 { 0 } else { ranks[i - 1] };
            dim - ranks[i] - incoming
        })
        .collect()
}

/// `Ext^i(I_A, M)`, i.e. entry `i` is `HH̄^{i+1}(A, M)`, for `i = 0..D-2`.
/// Uses the bar resolution of `A` with its two bottom terms removed, whose
/// `Hom` complex is `Hom(A^{⊗(i+1)}, M)` with the Hochschild differential.
pub fn reduced_hh_dims(a: &Algebra, m: &Bimodule, d: usize) -> Vec<usize> {
    let ranks: Vec<usize> = (1..d).map(|n| hochschild_cochain_differential(a, m, n).rank()).collect();
    (0..d.saturating_sub(1))
        .map(|i| {
            let dim = m.dim * a.dim().pow(i as u32 + 1);
            let incoming = if i == 0 { 0 } else { ranks[i - 1] };
            dim - ranks[i] - incoming
        })
        .collect()
}

/// Outcome of the W₂-lift test.
#[derive(Clone, Debug)]
pub struct W2LiftReport {
    pub vanishes: bool,
    /// Associator of the naive lift divided by p, as a 3-cochain.
    pub cocycle: SparseVec,
    /// A 2-cochain ψ with δψ equal to the cocycle, when one exists.
    pub correction: Option<SparseVec>,
    /// Whether the corrected lift was checked associative modulo p².
    pub corrected_lift_associative: bool,
}

/// Lifts structure constants to `Z/p²` via representatives `0..p-1`, divides
/// the associator by `p`, checks it is a Hochschild 3-cocycle and tries to
/// write it as a coboundary.
pub fn w2_lift_obstruction(a: &Algebra) -> Result<W2LiftReport> {
    let FieldSpec::Prime(p) = a.field else { return Err(Error::NotPrimeField) };
    let f = a.field;
    let p = p as i128;
    let q = p * p;
    let n = a.dim();
    let lift = |v: &SparseVec| -> Vec<i128> {
        let mut out = vec![0i128; n];
        for (i, s) in v.entries() {
            out[*i] = f.residue(s).unwrap() as i128;
        }
        out
    };
    let base: Vec<Vec<Vec<i128>>> = (0..n).map(|i| (0..n).map(|j| lift(&a.mult[i][j])).collect()).collect();
    let associator = |c: &Vec<Vec<Vec<i128>>>, i: usize, j: usize, k: usize| -> Vec<i128> {
        let mut out = vec![0i128; n];
        for s in 0..n {
            for t in 0..n {
                out[t] += c[i][j][s] * c[s][k][t] - c[j][k][s] * c[i][s][t];
            }
        }
        out.iter().map(|x| x.rem_euclid(q)).collect()
    };
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let w = encode(&[i, j, k], n);
                for (t, v) in associator(&base, i, j, k).into_iter().enumerate() {
                    if v % p != 0 {
                        return Err(Error::Mismatch("algebra is not associative mod p".into()));
                    }
                    pairs.push((w * n + t, f.from_i64((v / p) as i64)));
                }
            }
        }
    }
    let cocycle = SparseVec::from_pairs(&f, pairs);
    let diag = Bimodule::diagonal(a);
    if !hochschild_cochain_differential(a, &diag, 3).apply(&cocycle).is_zero() {
        return Err(Error::Mismatch("associator defect is not a 3-cocycle".into()));
    }
    let delta2 = hochschild_cochain_differential(a, &diag, 2);
    let Some(psi) = delta2.solve(&cocycle) else {
        return Ok(W2LiftReport { vanishes: false, cocycle, correction: None, corrected_lift_associative: false });
    };
    let mut corrected = base.clone();
    for (idx, v) in psi.entries() {
        let (w, t) = (idx / n, idx % n);
        corrected[w / n][w % n][t] = (corrected[w / n][w % n][t] + p * f.residue(v).unwrap() as i128).rem_euclid(q);
    }
    let ok = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| associator(&corrected, i, j, k).iter().all(|x| *x == 0))));
    Ok(W2LiftReport { vanishes: true, cocycle, correction: Some(psi), corrected_lift_associative: ok })
}

/// Dimension of `M / span{a m - m a}`, computed directly.
pub fn coinvariant_dim(m: &Bimodule) -> usize {
    let mut cols = Vec::new();
    for (l, r) in m.left.iter().zip(&m.right) {
        cols.extend(l.sub(r).expect("same shape").columns().iter().cloned());
    }
    m.dim - Matrix::from_columns(m.field, m.dim, cols).rank()
}
