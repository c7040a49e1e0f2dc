//! Tate homology of Z/p acting on GF(p)-vector spaces, freeness tests, the
//! norm (trace) map, and the identification of `V` with `Ȟ(Z/p, V^{⊗p})`.
//!
//! The complex is the two-periodic one with `d_odd = 1 - σ` and
//! `d_even = 1 + σ + … + σ^{p-1}`; so `Ȟ_even = ker N / im(1 - σ)` and
//! `Ȟ_odd = ker(1 - σ) / im N`.

use crate::algebra::{decode, encode};
use crate::exactlin::{Matrix, SparseVec, Subspace};
use crate::{Error, FieldSpec, Result};

/// A GF(p)-vector space with an automorphism `σ` of order dividing `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpModule {
    field: FieldSpec,
    sigma: Matrix,
}

impl CpModule {
    pub fn new(field: FieldSpec, sigma: Matrix) -> Result<Self> {
        if !field.is_prime_field() {
            return Err(Error::NotPrimeField);
        }
        if sigma.field() != field {
            return Err(Error::FieldMismatch);
        }
        if sigma.rows() != sigma.cols() {
            return Err(Error::ShapeMismatch(format!("σ is {}×{}", sigma.rows(), sigma.cols())));
        }
        let p = field.characteristic() as usize;
        let mut acc = Matrix::identity(field, sigma.rows());
        for _ in 0..p {
            acc = sigma.mul(&acc)?;
        }
        if acc != Matrix::identity(field, sigma.rows()) {
            return Err(Error::Invalid("σ^p is not the identity".into()));
        }
        Ok(CpModule { field, sigma })
    }

    pub fn trivial(field: FieldSpec, dim: usize) -> Result<Self> {
        CpModule::new(field, Matrix::identity(field, dim))
    }

    /// `k[t]/t^size` with `σ = 1 + t`; `size = p` is the regular module.
    pub fn jordan(field: FieldSpec, size: usize) -> Result<Self> {
        let p = field.characteristic() as usize;
        if size == 0 || size > p {
            return Err(Error::Invalid(format!("Jordan block of size {size} does not exist for p = {p}")));
        }
        let mut trip: Vec<_> = (0..size).map(|i| (i, i, field.one())).collect();
        trip.extend((1..size).map(|i| (i, i - 1, field.one())));
        CpModule::new(field, Matrix::from_triplets(field, size, size, trip))
    }

    /// `k[Z/p]` with `σ` the cyclic shift of the group basis.
    pub fn regular(field: FieldSpec) -> Result<Self> {
        let p = field.characteristic() as usize;
        let trip = (0..p).map(|i| ((i + 1) % p, i, field.one())).collect::<Vec<_>>();
        CpModule::new(field, Matrix::from_triplets(field, p, p, trip))
    }

    pub fn direct_sum(&self, other: &CpModule) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let one = self.field.one();
        let m = Matrix::assemble(
            self.field,
            &[self.dim(), other.dim()],
            &[self.dim(), other.dim()],
            &[(0, 0, &self.sigma, one.clone()), (1, 1, &other.sigma, one)],
        )?;
        Ok(CpModule { field: self.field, sigma: m })
    }

    /// The same module in the basis given by the columns of `g`.
    pub fn conjugate(&self, g: &Matrix, g_inv: &Matrix) -> Result<Self> {
        if g_inv.mul(g)? != Matrix::identity(self.field, self.dim()) {
            return Err(Error::Invalid("change of basis is not invertible".into()));
        }
        CpModule::new(self.field, g_inv.mul(&self.sigma)?.mul(g)?)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn order(&self) -> usize {
        self.field.characteristic() as usize
    }

    pub fn dim(&self) -> usize {
        self.sigma.rows()
    }

    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    /// `1 - σ`.
    pub fn one_minus_sigma(&self) -> Matrix {
        Matrix::identity(self.field, self.dim()).sub(&self.sigma).expect("square")
    }

    /// `1 + σ + … + σ^{p-1}`.
    pub fn norm(&self) -> Matrix {
        let mut power = Matrix::identity(self.field, self.dim());
        let mut acc = power.clone();
        for _ in 1..self.order() {
            power = self.sigma.mul(&power).expect("square");
            acc = acc.add(&power).expect("square");
        }
        acc
    }

    /// Invariants `ker(1 - σ)`.
    pub fn invariants(&self) -> Subspace {
        self.one_minus_sigma().kernel_basis()
    }

    /// `σ`-stable subspace as a module, in its echelon basis.
    pub fn submodule(&self, w: &Subspace) -> Result<CpModule> {
        let cols = w
            .basis()
            .iter()
            .map(|v| {
                let image = self.sigma.apply(v);
                w.coordinates(&image)
                    .map(|c| SparseVec::from_dense(&self.field, &c))
                    .ok_or_else(|| Error::Invalid("subspace is not σ-stable".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        CpModule::new(self.field, Matrix::from_columns(self.field, w.dim(), cols))
    }

    /// Quotient by a `σ`-stable subspace, in the basis of non-pivot coordinates.
    pub fn quotient(&self, w: &Subspace) -> Result<CpModule> {
        let keep = w.complement_indices();
        let mut position = vec![None; self.dim()];
        for (k, &i) in keep.iter().enumerate() {
            position[i] = Some(k);
        }
        for v in w.basis() {
            if !w.contains(&self.sigma.apply(v)) {
                return Err(Error::Invalid("subspace is not σ-stable".into()));
            }
        }
        let cols = keep
            .iter()
            .map(|&i| {
                let r = w.reduce(self.sigma.column(i));
                r.reindex(&self.field, |j| position[j])
            })
            .collect();
        CpModule::new(self.field, Matrix::from_columns(self.field, keep.len(), cols))
    }
}

/// `dim Ȟ_i` for each requested `i`.
pub fn tate_dims(m: &CpModule, degrees: &[i64]) -> Vec<usize> {
    let oms = m.one_minus_sigma();
    let norm = m.norm();
    let (r_oms, r_norm) = (oms.rank(), norm.rank());
    let n = m.dim();
    // dim ker N - rank(1-σ) and dim ker(1-σ) - rank N coincide
    degrees.iter().map(|_| n - r_norm - r_oms).collect()
}

/// Freeness over `k[Z/p]` from the rank profile of `σ - 1`.
pub fn is_free(m: &CpModule) -> bool {
    let p = m.order();
    let n = m.dim();
    if n % p != 0 {
        return false;
    }
    let t = m.sigma().sub(&Matrix::identity(m.field(), n)).expect("square");
    let mut power = Matrix::identity(m.field(), n);
    for j in 1..p {
        power = t.mul(&power).expect("square");
        if power.rank() != n / p * (p - j) {
            return false;
        }
    }
    true
}

/// Norm map from coinvariants (basis: non-pivot coordinates of `im(1 - σ)`)
/// to invariants (basis: echelon basis of `ker(1 - σ)`).
pub fn trace_map(m: &CpModule) -> Matrix {
    let f = m.field();
    let image = Subspace::span(f, m.dim(), m.one_minus_sigma().columns().iter().cloned());
    let reps = image.complement_indices();
    let inv = m.invariants();
    let norm = m.norm();
    let cols = reps
        .iter()
        .map(|&i| {
            let c = inv.coordinates(norm.column(i)).expect("norms are invariant");
            SparseVec::from_dense(&f, &c)
        })
        .collect();
    Matrix::from_columns(f, inv.dim(), cols)
}

/// `V^{⊗p}` for `V = k^dim` with `σ(v_1 ⊗ … ⊗ v_p) = v_p ⊗ v_1 ⊗ … ⊗ v_{p-1}`.
pub fn power_module(field: FieldSpec, dim: usize, p: usize) -> Result<CpModule> {
    if !field.is_prime_field() {
        return Err(Error::NotPrimeField);
    }
    if field.characteristic() as usize != p {
        return Err(Error::Mismatch(format!("Z/{p} acting over {field}")));
    }
    let total = dim.pow(p as u32);
    let trip = (0..total)
        .map(|c| {
            let w = decode(c, p, dim);
            let mut r = Vec::with_capacity(p);
            r.push(w[p - 1]);
            r.extend_from_slice(&w[..p - 1]);
            (encode(&r, dim), c, field.one())
        })
        .collect::<Vec<_>>();
    CpModule::new(field, Matrix::from_triplets(field, total, total, trip))
}

/// `v^{⊗p}` for a vector of `k^dim`.
pub fn diagonal_power(field: &FieldSpec, v: &SparseVec, dim: usize, p: usize) -> SparseVec {
    let mut acc = SparseVec::unit(0, field);
    let mut len = 1;
    for _ in 0..p {
        acc = crate::algebra::tensor_vec(field, &acc, v, dim);
        len *= dim;
    }
    debug_assert!(acc.max_index().is_none_or(|i| i < len));
    acc
}

/// Outcome of checking `V ≅ Ȟ_i(Z/p, V^{⊗p})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VOtimesPReport {
    pub dim_v: usize,
    pub p: usize,
    pub tate: Vec<(i64, usize)>,
    pub dims_match: bool,
    /// `v^{⊗p}` is a cycle for both differentials.
    pub diagonal_in_cycles: bool,
    /// The classes of `e_i^{⊗p}` span `Ȟ` in both parities.
    pub diagonal_spans: bool,
    /// `[(v + w)^{⊗p}] = [v^{⊗p}] + [w^{⊗p}]` on all pairs of a sample.
    pub diagonal_additive: bool,
    /// The span of the non-constant words has vanishing `Ȟ`.
    pub off_diagonal_acyclic: bool,
}

impl VOtimesPReport {
    pub fn passes(&self) -> bool {
        self.dims_match
            && self.diagonal_in_cycles
            && self.diagonal_spans
            && self.diagonal_additive
            && self.off_diagonal_acyclic
    }
}

pub fn verify_votimesp(field: FieldSpec, dim_v: usize, p: usize, degrees: &[i64]) -> Result<VOtimesPReport> {
    let m = power_module(field, dim_v, p)?;
    let total = m.dim();
    let dims = tate_dims(&m, degrees);
    let tate: Vec<(i64, usize)> = degrees.iter().copied().zip(dims.iter().copied()).collect();
    let dims_match = dims.iter().all(|&d| d == dim_v);

    let oms = m.one_minus_sigma();
    let norm = m.norm();
    let im_oms = Subspace::span(field, total, oms.columns().iter().cloned());
    let im_norm = Subspace::span(field, total, norm.columns().iter().cloned());

    // sample: all vectors when small, else basis vectors and pairwise sums
    let sample: Vec<SparseVec> = if p.pow(dim_v as u32) <= 64 {
        (0..p.pow(dim_v as u32))
            .map(|c| {
                let coords = decode(c, dim_v, p);
                SparseVec::from_pairs(&field, coords.iter().enumerate().map(|(i, &x)| (i, field.from_i64(x as i64))).collect())
            })
            .collect()
    } else {
        let mut s: Vec<SparseVec> = (0..dim_v).map(|i| SparseVec::unit(i, &field)).collect();
        for i in 0..dim_v {
            for j in i + 1..dim_v {
                s.push(s[i].add(&field, &s[j]));
            }
        }
        s
    };
    let diag = |v: &SparseVec| diagonal_power(&field, v, dim_v, p);
    let diagonal_in_cycles =
        sample.iter().all(|v| oms.apply(&diag(v)).is_zero() && norm.apply(&diag(v)).is_zero());

    let basis_diag: Vec<SparseVec> = (0..dim_v).map(|i| diag(&SparseVec::unit(i, &field))).collect();
    let spans_mod = |b: &Subspace| {
        let mut s = b.clone();
        for v in &basis_diag {
            s = s.sum(&Subspace::span(field, total, [v.clone()]));
        }
        s.dim() - b.dim() == dim_v
    };
    let diagonal_spans = spans_mod(&im_oms) && spans_mod(&im_norm) && dims_match;

    let diagonal_additive = sample.iter().all(|v| {
        sample.iter().all(|w| {
            let lhs = diag(&v.add(&field, w));
            let rhs = diag(v).add(&field, &diag(w));
            let diff = lhs.sub(&field, &rhs);
            im_oms.contains(&diff) && im_norm.contains(&diff)
        })
    });

    let off: Vec<SparseVec> = (0..total)
        .filter(|&c| {
            let w = decode(c, p, dim_v);
            w.iter().any(|&x| x != w[0])
        })
        .map(|c| SparseVec::unit(c, &field))
        .collect();
    let off_module = m.submodule(&Subspace::span(field, total, off))?;
    let off_diagonal_acyclic = tate_dims(&off_module, &[0, 1]).iter().all(|&d| d == 0);

    Ok(VOtimesPReport {
        dim_v,
        p,
        tate,
        dims_match,
        diagonal_in_cycles,
        diagonal_spans,
        diagonal_additive,
        off_diagonal_acyclic,
    })
}
