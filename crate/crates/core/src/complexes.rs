//! Chain complexes, bicomplexes and their totalization, homology with
//! reproducible bases, and maps induced on homology.
//!
//! A `ChainComplex` lives on a finite degree range `[lo, hi]` and is zero
//! outside it, so homology is defined at every degree of the range. Bicomplex
//! squares are stored commuting; the sign `(-1)^row` on horizontal maps is
//! inserted only when totalizing.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::exactlin::{LinearSolver, Matrix, Scalar, SparseVec, Subspace};
use crate::{Error, FieldSpec, Result};

/// Bounded chain complex with differentials `d_n: C_n -> C_{n-1}`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    field: FieldSpec,
    lo: i64,
    dims: Vec<usize>,
    // d[k] is the differential out of degree lo + k + 1
    d: Vec<Arc<Matrix>>,
    ranks: Vec<OnceLock<usize>>,
}

impl ChainComplex {
    /// `dims[k]` is the dimension in degree `lo + k`; `d[k]` is the differential
    /// from degree `lo + k + 1`. Shapes and `d^2 = 0` are validated.
    pub fn new(field: FieldSpec, lo: i64, dims: Vec<usize>, d: Vec<Arc<Matrix>>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Invalid("complex needs at least one degree".into()));
        }
        if d.len() + 1 != dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len() - 1,
                d.len()
            )));
        }
        for (k, m) in d.iter().enumerate() {
            if m.field() != field {
                return Err(Error::FieldMismatch);
            }
            if m.cols() != dims[k + 1] || m.rows() != dims[k] {
                return Err(Error::ShapeMismatch(format!(
                    "d_{} is {}x{}, expected {}x{}",
                    lo + k as i64 + 1,
                    m.rows(),
                    m.cols(),
                    dims[k],
                    dims[k + 1]
                )));
            }
        }
        for k in 1..d.len() {
            if !d[k - 1].mul(&d[k])?.is_zero() {
                return Err(Error::CompositeNonzero);
            }
        }
        let ranks = d.iter().map(|_| OnceLock::new()).collect();
        Ok(ChainComplex { field, lo, dims, d, ranks })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn in_range(&self, n: i64) -> bool {
        n >= self.lo && n <= self.hi()
    }

    /// Dimension in degree `n` (0 outside the range).
    pub fn dim(&self, n: i64) -> usize {
        if self.in_range(n) {
            self.dims[(n - self.lo) as usize]
        } else {
            0
        }
    }

    /// Differential out of degree `n`, or the zero map when it leaves the range.
    pub fn differential(&self, n: i64) -> Arc<Matrix> {
        if n > self.lo && n <= self.hi() {
            self.d[(n - self.lo - 1) as usize].clone()
        } else {
            Arc::new(Matrix::zero(self.field, self.dim(n - 1), self.dim(n)))
        }
    }

    fn check_degree(&self, n: i64) -> Result<()> {
        if self.in_range(n) {
            Ok(())
        } else {
            Err(Error::DegreeOutOfRange(n))
        }
    }

    /// Rank of `d_n`, computed once and cached.
    pub fn differential_rank(&self, n: i64) -> usize {
        let k = n - self.lo - 1;
        if k < 0 || k as usize >= self.d.len() {
            return 0;
        }
        *self.ranks[k as usize].get_or_init(|| self.d[k as usize].rank())
    }

    pub fn homology_dim(&self, n: i64) -> Result<usize> {
        self.check_degree(n)?;
        Ok(self.dim(n) - self.differential_rank(n) - self.differential_rank(n + 1))
    }

    pub fn homology_dims(&self, degrees: &[i64]) -> Result<Vec<usize>> {
        degrees.iter().map(|&n| self.homology_dim(n)).collect()
    }

    /// Homology dimensions over the whole range, lowest degree first.
    pub fn all_homology_dims(&self) -> Vec<usize> {
        let degrees: Vec<i64> = (self.lo..=self.hi()).collect();
        self.homology_dims(&degrees).expect("degrees are in range")
    }

    pub fn cycles(&self, n: i64) -> Subspace {
        self.differential(n).kernel_basis()
    }

    pub fn boundaries(&self, n: i64) -> Subspace {
        let d = self.differential(n + 1);
        Subspace::span(self.field, self.dim(n), d.columns().iter().cloned())
    }
}

/// Chain map `f_n: C_n -> C'_{n + shift}`; absent degrees are zero maps.
#[derive(Clone, Debug)]
pub struct ComplexMap {
    source: Arc<ChainComplex>,
    target: Arc<ChainComplex>,
    shift: i64,
    maps: BTreeMap<i64, Arc<Matrix>>,
}

impl ComplexMap {
    /// Validates shapes and `f d = d f` wherever both sides are defined.
    pub fn new(
        source: Arc<ChainComplex>,
        target: Arc<ChainComplex>,
        shift: i64,
        maps: Vec<(i64, Arc<Matrix>)>,
    ) -> Result<Self> {
        let maps: BTreeMap<i64, Arc<Matrix>> = maps.into_iter().collect();
        let f = ComplexMap { source, target, shift, maps };
        for (&n, m) in &f.maps {
            if m.cols() != f.source.dim(n) || m.rows() != f.target.dim(n + shift) {
                return Err(Error::ShapeMismatch(format!("component f_{n} has wrong shape")));
            }
        }
        for n in f.source.lo()..=f.source.hi() {
            let lhs = f.component(n - 1).mul(&f.source.differential(n))?;
            let rhs = f.target.differential(n + shift).mul(&f.component(n))?;
            if lhs != rhs {
                return Err(Error::Mismatch(format!("chain-map condition fails at degree {n}")));
            }
        }
        Ok(f)
    }

    pub fn identity(c: Arc<ChainComplex>) -> Self {
        let maps = (c.lo()..=c.hi())
            .map(|n| (n, Arc::new(Matrix::identity(c.field(), c.dim(n)))))
            .collect();
        ComplexMap { source: c.clone(), target: c, shift: 0, maps }
    }

    pub fn zero(source: Arc<ChainComplex>, target: Arc<ChainComplex>, shift: i64) -> Self {
        ComplexMap { source, target, shift, maps: BTreeMap::new() }
    }

    pub fn source(&self) -> &Arc<ChainComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ChainComplex> {
        &self.target
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn component(&self, n: i64) -> Arc<Matrix> {
        self.maps.get(&n).cloned().unwrap_or_else(|| {
            Arc::new(Matrix::zero(self.source.field(), self.target.dim(n + self.shift), self.source.dim(n)))
        })
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &ComplexMap) -> Result<ComplexMap> {
        let mut maps = Vec::new();
        for n in self.source.lo()..=self.source.hi() {
            let m = g.component(n + self.shift).mul(&self.component(n))?;
            maps.push((n, Arc::new(m)));
        }
        ComplexMap::new(self.source.clone(), g.target.clone(), self.shift + g.shift, maps)
    }

    /// Rank of `H_n(f)` from ranks alone:
    /// `rank [[d_n, 0], [f_n, d'_{m+1}]] - rank d_n - rank d'_{m+1}`, `m = n + shift`.
    pub fn induced_rank(&self, n: i64) -> Result<usize> {
        self.source.check_degree(n)?;
        let m = n + self.shift;
        self.target.check_degree(m)?;
        let (s, t) = (&self.source, &self.target);
        let field = s.field();
        let one = field.one();
        let ds = s.differential(n);
        let dt = t.differential(m + 1);
        let f = self.component(n);
        let joint = Matrix::assemble(
            field,
            &[s.dim(n - 1), t.dim(m)],
            &[s.dim(n), t.dim(m + 1)],
            &[(0, 0, &ds, one.clone()), (1, 0, &f, one.clone()), (1, 1, &dt, one)],
        )?;
        Ok(joint.rank() - s.differential_rank(n) - t.differential_rank(m + 1))
    }

    /// Same rank via an explicit cycle basis: `rank[f(Z_n) | B'] - rank B'`.
    pub fn induced_rank_by_cycles(&self, n: i64) -> Result<usize> {
        self.source.check_degree(n)?;
        let m = n + self.shift;
        self.target.check_degree(m)?;
        let z = self.source.cycles(n);
        let f = self.component(n);
        let bd = self.target.differential(m + 1);
        let mut cols: Vec<SparseVec> = z.basis().iter().map(|v| f.apply(v)).collect();
        cols.extend(bd.columns().iter().cloned());
        let joint = Matrix::from_columns(self.source.field(), self.target.dim(m), cols);
        Ok(joint.rank() - bd.rank())
    }
}

/// Representative cycles for `H_n`, chosen deterministically: the echelon
/// basis of the cycles is scanned in order and a cycle is kept when it is
/// independent of the boundaries and the cycles kept so far.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub degree: i64,
    pub representatives: Vec<SparseVec>,
    pub tag: &'static str,
    boundaries: Subspace,
    solver: LinearSolver,
    complex_dim: usize,
}

impl HomologyBasis {
    pub fn compute(c: &ChainComplex, n: i64) -> Result<Self> {
        c.check_degree(n)?;
        let z = c.cycles(n);
        let b = c.boundaries(n);
        let mut builder = crate::exactlin::EchelonBuilder::new(c.field(), c.dim(n));
        for v in b.basis() {
            builder.insert(v.clone());
        }
        let mut reps = Vec::new();
        for v in z.basis() {
            if builder.insert(v.clone()) {
                reps.push(v.clone());
            }
        }
        let residues: Vec<SparseVec> = reps.iter().map(|r| b.reduce(r)).collect();
        let solver = LinearSolver::new(c.field(), c.dim(n), &residues);
        Ok(HomologyBasis {
            degree: n,
            representatives: reps,
            tag: "echelon-cycles-mod-boundaries",
            boundaries: b,
            solver,
            complex_dim: c.dim(n),
        })
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of the class of a cycle `z`.
    pub fn class_coordinates(&self, z: &SparseVec) -> Result<Vec<Scalar>> {
        if z.max_index().is_some_and(|m| m >= self.complex_dim) {
            return Err(Error::ShapeMismatch("vector longer than the chain group".into()));
        }
        self.solver
            .solve(&self.boundaries.reduce(z))
            .ok_or_else(|| Error::Mismatch("vector is not a cycle".into()))
    }
}

/// Matrix of `H_n(f)` in the deterministic homology bases of source and target.
pub fn induced_map_on_homology(f: &ComplexMap, n: i64) -> Result<Matrix> {
    let hs = HomologyBasis::compute(&f.source, n)?;
    let ht = HomologyBasis::compute(&f.target, n + f.shift)?;
    let comp = f.component(n);
    let field = f.source.field();
    let mut cols = Vec::with_capacity(hs.dim());
    for r in &hs.representatives {
        let coords = ht.class_coordinates(&comp.apply(r))?;
        cols.push(SparseVec::from_dense(&field, &coords));
    }
    Ok(Matrix::from_columns(field, ht.dim(), cols))
}

/// Mapping cone: `cone_n = C_{n-1} ⊕ C'_n`, `d(x, y) = (-dx, f x + d'y)`.
pub fn cone(f: &ComplexMap) -> Result<ChainComplex> {
    if f.shift != 0 {
        return Err(Error::Invalid("cone needs a degree-preserving map".into()));
    }
    let (s, t) = (&f.source, &f.target);
    let field = s.field();
    let lo = s.lo().min(t.lo());
    let hi = (s.hi() + 1).max(t.hi());
    let dims: Vec<usize> = (lo..=hi).map(|n| s.dim(n - 1) + t.dim(n)).collect();
    let minus = field.from_i64(-1);
    let one = field.one();
    let mut d = Vec::new();
    for n in lo + 1..=hi {
        let ds = s.differential(n - 1);
        let dt = t.differential(n);
        let fm = f.component(n - 1);
        let m = Matrix::assemble(
            field,
            &[s.dim(n - 2), t.dim(n - 1)],
            &[s.dim(n - 1), t.dim(n)],
            &[(0, 0, &ds, minus.clone()), (1, 0, &fm, one.clone()), (1, 1, &dt, one.clone())],
        )?;
        d.push(Arc::new(m));
    }
    ChainComplex::new(field, lo, dims, d)
}

/// First-quadrant bicomplex, truncated to cells with `q <= max_q`,
/// `n <= max_n`, `q + n <= max_total`. Vertical maps go `(q,n) -> (q,n-1)`,
/// horizontal maps `(q,n) -> (q-1,n)`; squares commute.
#[derive(Clone, Debug)]
pub struct Bicomplex {
    field: FieldSpec,
    max_q: usize,
    max_n: usize,
    max_total: usize,
    dims: BTreeMap<(usize, usize), usize>,
    vertical: BTreeMap<(usize, usize), Arc<Matrix>>,
    horizontal: BTreeMap<(usize, usize), Arc<Matrix>>,
}

impl Bicomplex {
    /// Builds and validates a bicomplex. `dims(q, n)`, `vertical(q, n)` (for `n >= 1`)
    /// and `horizontal(q, n)` (for `q >= 1`) are queried for every cell in the region.
    pub fn new(
        field: FieldSpec,
        max_q: usize,
        max_n: usize,
        max_total: usize,
        mut dims: impl FnMut(usize, usize) -> usize,
        mut vertical: impl FnMut(usize, usize) -> Arc<Matrix>,
        mut horizontal: impl FnMut(usize, usize) -> Arc<Matrix>,
    ) -> Result<Self> {
        let mut b = Bicomplex {
            field,
            max_q,
            max_n,
            max_total,
            dims: BTreeMap::new(),
            vertical: BTreeMap::new(),
            horizontal: BTreeMap::new(),
        };
        let cells: Vec<(usize, usize)> = b.cells().collect();
        for &(q, n) in &cells {
            b.dims.insert((q, n), dims(q, n));
        }
        for &(q, n) in &cells {
            if n >= 1 {
                let m = vertical(q, n);
                b.check_shape(&m, (q, n - 1), (q, n))?;
                b.vertical.insert((q, n), m);
            }
            if q >= 1 {
                let m = horizontal(q, n);
                b.check_shape(&m, (q - 1, n), (q, n))?;
                b.horizontal.insert((q, n), m);
            }
        }
        b.validate()?;
        Ok(b)
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.max_q.min(self.max_total)).flat_map(move |q| {
            (0..=self.max_n.min(self.max_total - q)).map(move |n| (q, n))
        })
    }

    fn check_shape(&self, m: &Matrix, to: (usize, usize), from: (usize, usize)) -> Result<()> {
        if m.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        if m.rows() != self.dims[&to] || m.cols() != self.dims[&from] {
            return Err(Error::ShapeMismatch(format!(
                "map {from:?} -> {to:?} is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                self.dims[&to],
                self.dims[&from]
            )));
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        for (&(q, n), v) in &self.vertical {
            if n >= 2 && !self.vertical[&(q, n - 1)].mul(v)?.is_zero() {
                return Err(Error::CompositeNonzero);
            }
            if q >= 1 {
                let hv = self.horizontal[&(q, n - 1)].mul(v)?;
                let vh = self.vertical[&(q - 1, n)].mul(&self.horizontal[&(q, n)])?;
                if hv != vh {
                    return Err(Error::Mismatch(format!("square at ({q},{n}) does not commute")));
                }
            }
        }
        for (&(q, n), h) in &self.horizontal {
            if q >= 2 && !self.horizontal[&(q - 1, n)].mul(h)?.is_zero() {
                return Err(Error::CompositeNonzero);
            }
        }
        Ok(())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self, q: usize, n: usize) -> usize {
        self.dims.get(&(q, n)).copied().unwrap_or(0)
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    pub fn vertical(&self, q: usize, n: usize) -> Option<&Arc<Matrix>> {
        self.vertical.get(&(q, n))
    }

    pub fn horizontal(&self, q: usize, n: usize) -> Option<&Arc<Matrix>> {
        self.horizontal.get(&(q, n))
    }

    /// Largest `D` such that every cell of total degree `<= D + 1` is present.
    pub fn deepest_total(&self) -> Option<usize> {
        let m = self.max_q.min(self.max_n).min(self.max_total);
        m.checked_sub(1)
    }

    /// Offsets of the cells `(q, m - q)` inside the total degree `m`.
    pub fn total_layout(&self, m: usize) -> Vec<(usize, usize, usize)> {
        let mut off = 0;
        let mut out = Vec::new();
        for q in 0..=m {
            let d = self.dim(q, m - q);
            out.push((q, off, d));
            off += d;
        }
        out
    }

    /// Total complex in degrees `0..=D+1`; homology is exact in degrees `<= D`.
    pub fn total_complex(&self, d_max: usize) -> Result<ChainComplex> {
        let needed = d_max + 1;
        let available = self.max_q.min(self.max_n).min(self.max_total);
        if needed > available {
            return Err(Error::TruncationTooShallow { needed, available });
        }
        let f = self.field;
        let dims: Vec<usize> = (0..=needed).map(|m| (0..=m).map(|q| self.dim(q, m - q)).sum()).collect();
        let mut diffs = Vec::new();
        for m in 1..=needed {
            let row_sizes: Vec<usize> = (0..m).map(|q| self.dim(q, m - 1 - q)).collect();
            let col_sizes: Vec<usize> = (0..=m).map(|q| self.dim(q, m - q)).collect();
            let mut blocks: Vec<(usize, usize, &Matrix, Scalar)> = Vec::new();
            for q in 0..=m {
                let n = m - q;
                if n >= 1 {
                    blocks.push((q, q, self.vertical[&(q, n)].as_ref(), f.one()));
                }
                if q >= 1 {
                    let sign = if n % 2 == 0 { f.one() } else { f.from_i64(-1) };
                    blocks.push((q - 1, q, self.horizontal[&(q, n)].as_ref(), sign));
                }
            }
            diffs.push(Arc::new(Matrix::assemble(f, &row_sizes, &col_sizes, &blocks)?));
        }
        ChainComplex::new(f, 0, dims, diffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn identity_two_term_complex_is_acyclic() {
        let f = gf(5);
        let c = ChainComplex::new(f, 0, vec![1, 1], vec![Arc::new(Matrix::identity(f, 1))]).unwrap();
        assert_eq!(c.homology_dims(&[0, 1]).unwrap(), vec![0, 0]);
    }

    #[test]
    fn zero_differentials_give_term_dims() {
        let f = gf(3);
        let c = ChainComplex::new(
            f,
            0,
            vec![2, 3, 1],
            vec![Arc::new(Matrix::zero(f, 2, 3)), Arc::new(Matrix::zero(f, 3, 1))],
        )
        .unwrap();
        assert_eq!(c.all_homology_dims(), vec![2, 3, 1]);
        assert!(matches!(c.homology_dim(3), Err(Error::DegreeOutOfRange(3))));
    }

    #[test]
    fn nonzero_square_rejected() {
        let f = gf(3);
        let id = Arc::new(Matrix::identity(f, 1));
        let r = ChainComplex::new(f, 0, vec![1, 1, 1], vec![id.clone(), id]);
        assert!(matches!(r, Err(Error::CompositeNonzero)));
    }

    #[test]
    fn single_cell_bicomplex() {
        let f = gf(7);
        let b = Bicomplex::new(
            f,
            3,
            3,
            3,
            |q, n| if (q, n) == (0, 0) { 2 } else { 0 },
            |q, n| Arc::new(Matrix::zero(f, if (q, n - 1) == (0, 0) { 2 } else { 0 }, 0)),
            |q, n| Arc::new(Matrix::zero(f, if (q - 1, n) == (0, 0) { 2 } else { 0 }, 0)),
        )
        .unwrap();
        let t = b.total_complex(2).unwrap();
        assert_eq!(t.all_homology_dims(), vec![2, 0, 0, 0]);
        assert!(matches!(b.total_complex(3), Err(Error::TruncationTooShallow { .. })));
    }

    #[test]
    fn identity_and_zero_induced_maps() {
        let f = gf(5);
        let c = Arc::new(
            ChainComplex::new(
                f,
                0,
                vec![2, 2],
                vec![Arc::new(Matrix::from_i64_rows(f, &[vec![1, 0], vec![0, 0]]))],
            )
            .unwrap(),
        );
        let id = ComplexMap::identity(c.clone());
        assert_eq!(induced_map_on_homology(&id, 0).unwrap(), Matrix::identity(f, 1));
        let z = ComplexMap::zero(c.clone(), c, 0);
        assert!(induced_map_on_homology(&z, 1).unwrap().is_zero());
    }
}
