//! Truncated simplicial vector spaces, their standard (alternating face)
//! complex and the Dold–Kan normalized complex.
//!
//! Levels run `0..=N`. Homology of either complex at level `N` is unreliable
//! (faces out of level `N + 1` are missing) and callers should ignore it.

use std::sync::Arc;

use crate::complexes::{ChainComplex, ComplexMap};
use crate::exactlin::{Matrix, SparseVec, Subspace};
use crate::{Error, FieldSpec, Result};

/// Simplicial vector space truncated at level `N`.
#[derive(Clone, Debug)]
pub struct SimplicialVS {
    field: FieldSpec,
    dims: Vec<usize>,
    // faces[n][i] = d_i: E_n -> E_{n-1}, n >= 1, 0 <= i <= n
    faces: Vec<Vec<Arc<Matrix>>>,
    // degens[n][i] = s_i: E_n -> E_{n+1}, n < N, 0 <= i <= n
    degens: Vec<Vec<Arc<Matrix>>>,
}

impl SimplicialVS {
    /// Shapes are validated; simplicial identities are not (see `check_identities`).
    pub fn new(
        field: FieldSpec,
        dims: Vec<usize>,
        faces: Vec<Vec<Arc<Matrix>>>,
        degens: Vec<Vec<Arc<Matrix>>>,
    ) -> Result<Self> {
        let top = dims.len().checked_sub(1).ok_or_else(|| Error::Invalid("no levels".into()))?;
        if faces.len() != top + 1 || degens.len() != top {
            return Err(Error::ShapeMismatch("face/degeneracy level counts".into()));
        }
        if !faces[0].is_empty() {
            return Err(Error::ShapeMismatch("level 0 has no faces".into()));
        }
        for n in 1..=top {
            if faces[n].len() != n + 1 {
                return Err(Error::ShapeMismatch(format!("level {n} needs {} faces", n + 1)));
            }
            for m in &faces[n] {
                if m.rows() != dims[n - 1] || m.cols() != dims[n] || m.field() != field {
                    return Err(Error::ShapeMismatch(format!("face out of level {n}")));
                }
            }
        }
        for n in 0..top {
            if degens[n].len() != n + 1 {
                return Err(Error::ShapeMismatch(format!("level {n} needs {} degeneracies", n + 1)));
            }
            for m in &degens[n] {
                if m.rows() != dims[n + 1] || m.cols() != dims[n] || m.field() != field {
                    return Err(Error::ShapeMismatch(format!("degeneracy out of level {n}")));
                }
            }
        }
        Ok(SimplicialVS { field, dims, faces, degens })
    }

    /// Linear span of a truncated simplicial set given by level sizes and
    /// face/degeneracy functions on element indices.
    pub fn from_simplicial_set(
        field: FieldSpec,
        sizes: &[usize],
        face: impl Fn(usize, usize, usize) -> usize,
        degen: impl Fn(usize, usize, usize) -> usize,
    ) -> Result<Self> {
        let top = sizes.len() - 1;
        let perm = |rows: usize, cols: usize, f: &dyn Fn(usize) -> usize| {
            let cols_v = (0..cols).map(|x| SparseVec::unit(f(x), &field)).collect();
            Arc::new(Matrix::from_columns(field, rows, cols_v))
        };
        let mut faces = vec![Vec::new()];
        for n in 1..=top {
            faces.push((0..=n).map(|i| perm(sizes[n - 1], sizes[n], &|x| face(n, i, x))).collect());
        }
        let degens = (0..top)
            .map(|n| (0..=n).map(|i| perm(sizes[n + 1], sizes[n], &|x| degen(n, i, x))).collect())
            .collect();
        SimplicialVS::new(field, sizes.to_vec(), faces, degens)
    }

    /// The standard `l`-simplex `Δ[l]`: level `n` has the nondecreasing maps `[0..n] -> [0..l]`.
    pub fn standard_simplex(field: FieldSpec, l: usize, top: usize) -> Result<Self> {
        let levels: Vec<Vec<Vec<usize>>> = (0..=top).map(|n| monotone_sequences(n + 1, l)).collect();
        let index = |n: usize, s: &[usize]| levels[n].iter().position(|t| t == s).unwrap();
        let sizes: Vec<usize> = levels.iter().map(|v| v.len()).collect();
        SimplicialVS::from_simplicial_set(
            field,
            &sizes,
            |n, i, x| {
                let mut s = levels[n][x].clone();
                s.remove(i);
                index(n - 1, &s)
            },
            |n, i, x| {
                let mut s = levels[n][x].clone();
                s.insert(i, s[i]);
                index(n + 1, &s)
            },
        )
    }

    /// Constant simplicial space with value `field^dim`.
    pub fn constant(field: FieldSpec, dim: usize, top: usize) -> Result<Self> {
        let id = Arc::new(Matrix::identity(field, dim));
        let faces = (0..=top).map(|n| vec![id.clone(); if n == 0 { 0 } else { n + 1 }]).collect();
        let degens = (0..top).map(|n| vec![id.clone(); n + 1]).collect();
        SimplicialVS::new(field, vec![dim; top + 1], faces, degens)
    }

    /// Levelwise direct sum.
    pub fn direct_sum(&self, other: &SimplicialVS) -> Result<Self> {
        if self.field != other.field || self.top() != other.top() {
            return Err(Error::Mismatch("direct sum needs equal fields and truncations".into()));
        }
        let f = self.field;
        let one = f.one();
        let sum = |a: &Matrix, b: &Matrix| -> Result<Arc<Matrix>> {
            Ok(Arc::new(Matrix::assemble(
                f,
                &[a.rows(), b.rows()],
                &[a.cols(), b.cols()],
                &[(0, 0, a, one.clone()), (1, 1, b, one.clone())],
            )?))
        };
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let mut faces = vec![Vec::new()];
        for n in 1..=self.top() {
            faces.push((0..=n).map(|i| sum(&self.faces[n][i], &other.faces[n][i])).collect::<Result<_>>()?);
        }
        let degens = (0..self.top())
            .map(|n| (0..=n).map(|i| sum(&self.degens[n][i], &other.degens[n][i])).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        SimplicialVS::new(f, dims, faces, degens)
    }

    /// Conjugates every structure map by the given invertible change of basis per level:
    /// the new maps are `g_{target} ∘ m ∘ g_{source}^{-1}`.
    pub fn change_basis(&self, g: &[Matrix], g_inv: &[Matrix]) -> Result<Self> {
        let conj = |m: &Matrix, t: usize, s: usize| -> Result<Arc<Matrix>> {
            Ok(Arc::new(g[t].mul(&m.mul(&g_inv[s])?)?))
        };
        let mut faces = vec![Vec::new()];
        for n in 1..=self.top() {
            faces.push(self.faces[n].iter().map(|m| conj(m, n - 1, n)).collect::<Result<_>>()?);
        }
        let degens = (0..self.top())
            .map(|n| self.degens[n].iter().map(|m| conj(m, n + 1, n)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        SimplicialVS::new(self.field, self.dims.clone(), faces, degens)
    }

    /// Décalage: level `n` is `E_{n+1}` with faces `d_{i+1}` and degeneracies `s_{i+1}`.
    /// It carries the extra degeneracy `s_0`, hence is contractible onto level 0.
    pub fn decalage(&self) -> Result<Self> {
        let top = self.top().checked_sub(1).ok_or_else(|| Error::Invalid("truncation too short".into()))?;
        let dims = self.dims[1..].to_vec();
        let mut faces = vec![Vec::new()];
        for n in 1..=top {
            faces.push((0..=n).map(|i| self.faces[n + 1][i + 1].clone()).collect());
        }
        let degens = (0..top).map(|n| (0..=n).map(|i| self.degens[n + 1][i + 1].clone()).collect()).collect();
        SimplicialVS::new(self.field, dims, faces, degens)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Truncation level `N`.
    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn face(&self, n: usize, i: usize) -> &Arc<Matrix> {
        &self.faces[n][i]
    }

    pub fn degeneracy(&self, n: usize, i: usize) -> &Arc<Matrix> {
        &self.degens[n][i]
    }

    /// Replaces one face matrix (used to construct deliberate violations).
    pub fn with_face(&self, n: usize, i: usize, m: Matrix) -> Result<Self> {
        let mut faces = self.faces.clone();
        faces[n][i] = Arc::new(m);
        SimplicialVS::new(self.field, self.dims.clone(), faces, self.degens.clone())
    }
}

fn monotone_sequences(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for s in &out {
            let start = s.last().copied().unwrap_or(0);
            for v in start..=max {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Alternating sum `Σ (-1)^i d_i` at level `n`.
pub fn alternating_face_sum(e: &SimplicialVS, n: usize) -> Result<Matrix> {
    let f = e.field;
    let mut acc = Matrix::zero(f, e.dims[n - 1], e.dims[n]);
    for (i, d) in e.faces[n].iter().enumerate() {
        let c = if i % 2 == 0 { f.one() } else { f.from_i64(-1) };
        acc = acc.lin_comb(&c, d)?;
    }
    Ok(acc)
}

/// Complex with terms `E_n` and differential `Σ (-1)^i d_i`.
pub fn standard_complex(e: &SimplicialVS) -> Result<ChainComplex> {
    let d = (1..=e.top()).map(|n| alternating_face_sum(e, n).map(Arc::new)).collect::<Result<_>>()?;
    ChainComplex::new(e.field, 0, e.dims.clone(), d)
}

/// Degenerate subspace `Σ_i im(s_i)` of `E_n`.
fn degenerate_part(e: &SimplicialVS, n: usize) -> Subspace {
    if n == 0 {
        return Subspace::zero(e.field, e.dims[0]);
    }
    let cols = e.degens[n - 1].iter().flat_map(|s| s.columns().iter().cloned());
    Subspace::span(e.field, e.dims[n], cols)
}

struct Normalization {
    degenerate: Vec<Subspace>,
    complements: Vec<Vec<usize>>,
}

impl Normalization {
    fn new(e: &SimplicialVS) -> Self {
        let degenerate: Vec<Subspace> = (0..=e.top()).map(|n| degenerate_part(e, n)).collect();
        let complements = degenerate.iter().map(|s| s.complement_indices()).collect();
        Normalization { degenerate, complements }
    }

    /// Quotient coordinates of `v ∈ E_n` in the complement basis.
    fn project(&self, field: &FieldSpec, n: usize, v: &SparseVec) -> SparseVec {
        let r = self.degenerate[n].reduce(v);
        let comp = &self.complements[n];
        r.reindex(field, |i| comp.binary_search(&i).ok())
    }

    fn projection_matrix(&self, e: &SimplicialVS, n: usize) -> Matrix {
        let cols = (0..e.dims[n]).map(|i| self.project(&e.field, n, &SparseVec::unit(i, &e.field))).collect();
        Matrix::from_columns(e.field, self.complements[n].len(), cols)
    }
}

/// Complex with terms `E_n / Σ im(s_i)`, basis given by the non-pivot coordinates.
pub fn normalized_complex(e: &SimplicialVS) -> Result<ChainComplex> {
    let norm = Normalization::new(e);
    let dims: Vec<usize> = norm.complements.iter().map(|c| c.len()).collect();
    let mut d = Vec::new();
    for n in 1..=e.top() {
        let full = alternating_face_sum(e, n)?;
        let cols = norm.complements[n]
            .iter()
            .map(|&c| norm.project(&e.field, n - 1, full.column(c)))
            .collect();
        d.push(Arc::new(Matrix::from_columns(e.field, dims[n - 1], cols)));
    }
    ChainComplex::new(e.field, 0, dims, d)
}

/// The quotient map from the standard to the normalized complex.
pub fn normalization_projection(e: &SimplicialVS) -> Result<ComplexMap> {
    let norm = Normalization::new(e);
    let source = Arc::new(standard_complex(e)?);
    let target = Arc::new(normalized_complex(e)?);
    let maps = (0..=e.top()).map(|n| (n as i64, Arc::new(norm.projection_matrix(e, n)))).collect();
    ComplexMap::new(source, target, 0, maps)
}

/// Every simplicial identity that fails within the truncation, by name.
pub fn check_identities(e: &SimplicialVS) -> Vec<String> {
    let mut bad = Vec::new();
    let eq = |a: &Matrix, b: &Matrix| a == b;
    let prod = |a: &Matrix, b: &Matrix| a.mul(b).expect("shapes validated at construction");
    let top = e.top();
    // d_i d_j = d_{j-1} d_i, i < j, on E_n
    for n in 2..=top {
        for j in 1..=n {
            for i in 0..j {
                if !eq(&prod(&e.faces[n - 1][i], &e.faces[n][j]), &prod(&e.faces[n - 1][j - 1], &e.faces[n][i])) {
                    bad.push(format!("d_{i} d_{j} = d_{} d_{i} on level {n}", j - 1));
                }
            }
        }
    }
    // s_i s_j = s_{j+1} s_i, i <= j, on E_n
    for n in 0..top.saturating_sub(1) {
        for j in 0..=n {
            for i in 0..=j {
                if !eq(&prod(&e.degens[n + 1][i], &e.degens[n][j]), &prod(&e.degens[n + 1][j + 1], &e.degens[n][i]))
                {
                    bad.push(format!("s_{i} s_{j} = s_{} s_{i} on level {n}", j + 1));
                }
            }
        }
    }
    // mixed relations, s_j: E_n -> E_{n+1}, d_i: E_{n+1} -> E_n
    for n in 0..top {
        let id = Matrix::identity(e.field, e.dims[n]);
        for j in 0..=n {
            let s = &e.degens[n][j];
            for i in 0..=n + 1 {
                let lhs = prod(&e.faces[n + 1][i], s);
                let (ok, name) = if i == j || i == j + 1 {
                    (eq(&lhs, &id), format!("d_{i} s_{j} = id on level {n}"))
                } else if i < j {
                    let rhs = prod(&e.degens[n - 1][j - 1], &e.faces[n][i]);
                    (eq(&lhs, &rhs), format!("d_{i} s_{j} = s_{} d_{i} on level {n}", j - 1))
                } else {
                    let rhs = prod(&e.degens[n - 1][j], &e.faces[n][i - 1]);
                    (eq(&lhs, &rhs), format!("d_{i} s_{j} = s_{j} d_{} on level {n}", i - 1))
                };
                if !ok {
                    bad.push(name);
                }
            }
        }
    }
    bad
}
