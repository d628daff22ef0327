//! Finite-dimensional chain-complex calculus over prime fields: complexes
//! with cohomological grading (d of degree +1), chain maps, mapping cones,
//! homology ranks, quasi-isomorphism tests, and the chain-homotopy equation.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub type Degree = i32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomalgError {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("differential d_{0} has shape {1}x{2}, expected {3}x{4}")]
    DifferentialShape(Degree, usize, usize, usize, usize),
    #[error("d o d != 0 between degrees {0} and {1}")]
    SquareNonzero(Degree, Degree),
    #[error("chain map component at degree {0} has shape {1}x{2}, expected {3}x{4}")]
    ComponentShape(Degree, usize, usize, usize, usize),
    #[error("chain map does not commute with differentials at degree {0}")]
    NotChainMap(Degree),
    #[error("homotopy component at degree {0} has shape {1}x{2}, expected {3}x{4}")]
    HomotopyShape(Degree, usize, usize, usize, usize),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
}

pub fn is_prime(p: u64) -> bool {
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

/// Dense matrix over F_p, row-major. Acts on column vectors: an m x n matrix
/// maps F_p^n -> F_p^m.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} mod {}", self.rows, self.cols, self.p)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Matrix {
        Matrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Matrix {
        let mut m = Matrix::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u64, rows: Vec<Vec<u64>>) -> Result<Matrix, HomalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(HomalgError::Shape("ragged rows".into()));
        }
        let data = rows.into_iter().flatten().map(|x| x % p).collect();
        Ok(Matrix {
            p,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a + b) % self.p)
            .collect();
        Matrix { data, ..*self }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a + self.p - b) % self.p)
            .collect();
        Matrix { data, ..*self }
    }

    pub fn neg(&self) -> Matrix {
        let data = self.data.iter().map(|&a| (self.p - a) % self.p).collect();
        Matrix { data, ..*self }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Matrix::zero(self.p, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = (out.get(r, c) + a * other.get(k, c)) % self.p;
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: u64) -> Matrix {
        let s = s % self.p;
        let data = self.data.iter().map(|&a| a * s % self.p).collect();
        Matrix { data, ..*self }
    }

    fn inv_mod(&self, a: u64) -> u64 {
        // p prime: a^(p-2)
        let mut base = a % self.p;
        let mut exp = self.p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce()
    }

    /// In-place reduction to row echelon form; returns the rank.
    fn row_reduce(&mut self) -> usize {
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(src) = (pivot_row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if src != pivot_row {
                for c in 0..self.cols {
                    let (a, b) = (self.get(pivot_row, c), self.get(src, c));
                    self.set(pivot_row, c, b);
                    self.set(src, c, a);
                }
            }
            let inv = self.inv_mod(self.get(pivot_row, col));
            for c in 0..self.cols {
                let v = self.get(pivot_row, c) * inv % self.p;
                self.set(pivot_row, c, v);
            }
            for r in 0..self.rows {
                if r == pivot_row {
                    continue;
                }
                let f = self.get(r, col);
                if f == 0 {
                    continue;
                }
                for c in 0..self.cols {
                    let v = (self.get(r, c) + (self.p - f) * self.get(pivot_row, c)) % self.p;
                    self.set(r, c, v);
                }
            }
            pivot_row += 1;
        }
        pivot_row
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Basis of the kernel as columns.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        m.row_reduce();
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row < m.rows && m.get(row, col) != 0 {
                pivot_cols.push(col);
                row += 1;
            }
        }
        let free_cols: Vec<usize> = (0..m.cols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = Vec::new();
        for &fc in &free_cols {
            let mut v = vec![0u64; m.cols];
            v[fc] = 1;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = (self.p - m.get(r, fc)) % self.p;
            }
            basis.push(v);
        }
        basis
    }

    /// Is `v` in the column span of this matrix?
    pub fn column_span_contains(&self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.rows);
        let mut aug = Matrix::zero(self.p, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, v[r]);
        }
        aug.rank() == self.rank()
    }

    /// One solution x of A x = b, if any.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zero(self.p, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r] % self.p);
        }
        aug.row_reduce();
        let mut x = vec![0u64; self.cols];
        for r in 0..self.rows {
            let Some(pivot) = (0..self.cols).find(|&c| aug.get(r, c) != 0) else {
                if aug.get(r, self.cols) != 0 {
                    return None; // inconsistent row 0 .. 0 | nonzero
                }
                continue;
            };
            x[pivot] = aug.get(r, self.cols);
        }
        // free variables stay 0; verify (guards the back-substitution)
        let check: Vec<u64> = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c) * x[c] % self.p)
                    .sum::<u64>()
                    % self.p
            })
            .collect();
        if check
            .iter()
            .zip(b)
            .all(|(&lhs, &rhs)| lhs == rhs % self.p)
        {
            Some(x)
        } else {
            None
        }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c) * (v[c] % self.p) % self.p)
                    .sum::<u64>()
                    % self.p
            })
            .collect()
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zero(self.p, self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                out.set(self.rows + r, self.cols + c, other.get(r, c));
            }
        }
        out
    }
}

/// Finitely supported graded vector space over F_p with differentials of
/// degree +1 squaring to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    p: u64,
    dims: BTreeMap<Degree, usize>,
    /// d_n : degree n -> degree n+1, stored where source and target dims are
    /// both nonzero.
    diffs: BTreeMap<Degree, Matrix>,
}

impl ChainComplex {
    pub fn new(
        p: u64,
        dims: BTreeMap<Degree, usize>,
        diffs: BTreeMap<Degree, Matrix>,
    ) -> Result<ChainComplex, HomalgError> {
        if !is_prime(p) {
            return Err(HomalgError::NotPrime(p));
        }
        let dims: BTreeMap<Degree, usize> =
            dims.into_iter().filter(|&(_, d)| d > 0).collect();
        let c = ChainComplex { p, dims, diffs };
        c.check()?;
        // canonical storage: materialized zero differentials are dropped so
        // structural equality matches semantic equality
        let ChainComplex { p, dims, diffs } = c;
        let diffs = diffs.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(ChainComplex { p, dims, diffs })
    }

    fn check(&self) -> Result<(), HomalgError> {
        for (&n, d) in &self.diffs {
            if d.p != self.p {
                return Err(HomalgError::ModulusMismatch(d.p, self.p));
            }
            let (er, ec) = (self.dim(n + 1), self.dim(n));
            if (d.rows, d.cols) != (er, ec) {
                return Err(HomalgError::DifferentialShape(n, d.rows, d.cols, er, ec));
            }
        }
        for (&n, d) in &self.diffs {
            if let Some(next) = self.diffs.get(&(n + 1)) {
                if !next.mul(d).is_zero() {
                    return Err(HomalgError::SquareNonzero(n, n + 1));
                }
            }
        }
        Ok(())
    }

    /// Complex concentrated in a single degree with zero differential.
    pub fn concentrated(p: u64, degree: Degree, dim: usize) -> ChainComplex {
        let mut dims = BTreeMap::new();
        if dim > 0 {
            dims.insert(degree, dim);
        }
        ChainComplex {
            p,
            dims,
            diffs: BTreeMap::new(),
        }
    }

    pub fn zero(p: u64) -> ChainComplex {
        ChainComplex {
            p,
            dims: BTreeMap::new(),
            diffs: BTreeMap::new(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self, n: Degree) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<Degree, usize> {
        &self.dims
    }

    pub fn degree_range(&self) -> Option<(Degree, Degree)> {
        let lo = *self.dims.keys().next()?;
        let hi = *self.dims.keys().last()?;
        Some((lo, hi))
    }

    /// d_n, materialized as a zero matrix when absent.
    pub fn diff(&self, n: Degree) -> Matrix {
        self.diffs
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.p, self.dim(n + 1), self.dim(n)))
    }

    /// Alternating sum of dimensions.
    pub fn euler_char(&self) -> i64 {
        self.dims
            .iter()
            .map(|(&n, &d)| if n.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// rank H^n = dim ker d_n - rank d_{n-1}, by Gaussian elimination.
    pub fn homology_ranks(&self) -> BTreeMap<Degree, usize> {
        let mut out = BTreeMap::new();
        for &n in self.dims.keys() {
            let z = self.diff(n).nullity();
            let b = self.diff(n - 1).rank();
            let h = z - b;
            if h > 0 {
                out.insert(n, h);
            }
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology_ranks().is_empty()
    }

    /// Shift: (C[k])^n = C^(n+k), differential reused (signs are invisible to
    /// every rank computation here).
    pub fn shift(&self, k: Degree) -> ChainComplex {
        let dims = self.dims.iter().map(|(&n, &d)| (n - k, d)).collect();
        let diffs = self.diffs.iter().map(|(&n, d)| (n - k, d.clone())).collect();
        ChainComplex {
            p: self.p,
            dims,
            diffs,
        }
    }

    /// Degreewise direct sum.
    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        assert_eq!(self.p, other.p);
        let mut dims = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        let keys: std::collections::BTreeSet<Degree> = self
            .dims
            .keys()
            .chain(other.dims.keys())
            .copied()
            .collect();
        for &n in &keys {
            let d = self.dim(n) + other.dim(n);
            if d > 0 {
                dims.insert(n, d);
            }
        }
        for &n in &keys {
            if self.dim(n) + other.dim(n) > 0 && self.dim(n + 1) + other.dim(n + 1) > 0 {
                let m = self.diff(n).direct_sum(&other.diff(n));
                if !m.is_zero() {
                    diffs.insert(n, m);
                }
            }
        }
        ChainComplex {
            p: self.p,
            dims,
            diffs,
        }
    }
}

/// Degreewise linear map commuting with the differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    components: BTreeMap<Degree, Matrix>,
}

impl ChainMap {
    pub fn new(
        source: ChainComplex,
        target: ChainComplex,
        components: BTreeMap<Degree, Matrix>,
    ) -> Result<ChainMap, HomalgError> {
        if source.p != target.p {
            return Err(HomalgError::ModulusMismatch(source.p, target.p));
        }
        let f = ChainMap {
            source,
            target,
            components,
        };
        f.check()?;
        let ChainMap {
            source,
            target,
            components,
        } = f;
        let components = components.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(ChainMap {
            source,
            target,
            components,
        })
    }

    fn check(&self) -> Result<(), HomalgError> {
        for (&n, m) in &self.components {
            let (er, ec) = (self.target.dim(n), self.source.dim(n));
            if (m.rows, m.cols) != (er, ec) {
                return Err(HomalgError::ComponentShape(n, m.rows, m.cols, er, ec));
            }
        }
        let degrees: std::collections::BTreeSet<Degree> = self
            .source
            .dims
            .keys()
            .chain(self.target.dims.keys())
            .copied()
            .collect();
        for &n in &degrees {
            let lhs = self.target.diff(n).mul(&self.component(n));
            let rhs = self.component(n + 1).mul(&self.source.diff(n));
            if lhs != rhs {
                return Err(HomalgError::NotChainMap(n));
            }
        }
        Ok(())
    }

    pub fn identity(c: &ChainComplex) -> ChainMap {
        let components = c
            .dims
            .iter()
            .map(|(&n, &d)| (n, Matrix::identity(c.p, d)))
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            components,
        }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> ChainMap {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            components: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn component(&self, n: Degree) -> Matrix {
        self.components.get(&n).cloned().unwrap_or_else(|| {
            Matrix::zero(self.source.p, self.target.dim(n), self.source.dim(n))
        })
    }

    pub fn compose(&self, inner: &ChainMap) -> Result<ChainMap, HomalgError> {
        if inner.target.dims != self.source.dims {
            return Err(HomalgError::Shape(
                "composition: inner target does not match outer source".into(),
            ));
        }
        let degrees: std::collections::BTreeSet<Degree> =
            inner.source.dims.keys().copied().collect();
        let mut components = BTreeMap::new();
        for &n in &degrees {
            let m = self.component(n).mul(&inner.component(n));
            if !m.is_zero() {
                components.insert(n, m);
            }
        }
        ChainMap::new(inner.source.clone(), self.target.clone(), components)
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        let degrees: std::collections::BTreeSet<Degree> =
            self.source.dims.keys().copied().collect();
        let components = degrees
            .into_iter()
            .map(|n| (n, self.component(n).add(&other.component(n))))
            .collect();
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            components,
        }
    }

    pub fn sub(&self, other: &ChainMap) -> ChainMap {
        let degrees: std::collections::BTreeSet<Degree> =
            self.source.dims.keys().copied().collect();
        let components = degrees
            .into_iter()
            .map(|n| (n, self.component(n).sub(&other.component(n))))
            .collect();
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            components,
        }
    }

    /// Do `self` and `other` induce the same map on homology? Checked by
    /// testing that the difference sends every cycle into the boundaries.
    pub fn induces_same_on_homology(&self, other: &ChainMap) -> bool {
        let diff = self.sub(other);
        for &n in self.source.dims.keys() {
            let cycles = self.source.diff(n).kernel_basis();
            if cycles.is_empty() {
                continue;
            }
            // boundary matrix of the target in degree n
            let bd = self.target.diff(n - 1);
            let comp = diff.component(n);
            for z in cycles {
                let img = comp.apply(&z);
                if img.iter().all(|&x| x == 0) {
                    continue;
                }
                if bd.cols == 0 || !bd.column_span_contains(&img) {
                    return false;
                }
            }
        }
        true
    }
}

/// Total complex of the two-term bicomplex given by f: degree-n piece is
/// source_n (+) target_{n-1}, differential [[d_src, 0], [f, -d_tgt]].
pub fn cone(f: &ChainMap) -> ChainComplex {
    let a = f.source();
    let b = f.target();
    let p = a.p;
    let mut dims = BTreeMap::new();
    let degrees: std::collections::BTreeSet<Degree> = a
        .dims
        .keys()
        .copied()
        .chain(b.dims.keys().map(|&n| n + 1))
        .collect();
    for &n in &degrees {
        let d = a.dim(n) + b.dim(n - 1);
        if d > 0 {
            dims.insert(n, d);
        }
    }
    let mut diffs = BTreeMap::new();
    for &n in &degrees {
        let (src_dim, tgt_dim) = (a.dim(n) + b.dim(n - 1), a.dim(n + 1) + b.dim(n));
        if src_dim == 0 || tgt_dim == 0 {
            continue;
        }
        let mut m = Matrix::zero(p, tgt_dim, src_dim);
        let da = a.diff(n);
        for r in 0..da.rows {
            for c in 0..da.cols {
                m.set(r, c, da.get(r, c));
            }
        }
        let fc = f.component(n);
        for r in 0..fc.rows {
            for c in 0..fc.cols {
                m.set(a.dim(n + 1) + r, c, fc.get(r, c));
            }
        }
        let db = b.diff(n - 1).neg();
        for r in 0..db.rows {
            for c in 0..db.cols {
                m.set(a.dim(n + 1) + r, a.dim(n) + c, db.get(r, c));
            }
        }
        if !m.is_zero() {
            diffs.insert(n, m);
        }
    }
    let out = ChainComplex { p, dims, diffs };
    debug_assert!(out.check().is_ok());
    out
}

/// Over a field, quasi-isomorphism is exactly acyclicity of the cone.
pub fn is_quasi_iso(f: &ChainMap) -> bool {
    cone(f).is_acyclic()
}

/// Degree-lowering collection H_n : F^n -> F^(n-1); the witness side of the
/// homotopy equation, no commutation required.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    pub components: BTreeMap<Degree, Matrix>,
}

impl Homotopy {
    pub fn zero() -> Homotopy {
        Homotopy {
            components: BTreeMap::new(),
        }
    }

    pub fn component(&self, f: &ChainComplex, n: Degree) -> Matrix {
        self.components
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(f.p(), f.dim(n - 1), f.dim(n)))
    }

    pub fn check_shapes(&self, f: &ChainComplex) -> Result<(), HomalgError> {
        for (&n, m) in &self.components {
            let (er, ec) = (f.dim(n - 1), f.dim(n));
            if (m.rows, m.cols) != (er, ec) {
                return Err(HomalgError::HomotopyShape(n, m.rows, m.cols, er, ec));
            }
        }
        Ok(())
    }
}

/// Check H d - d H = f02 - f12 f01 degreewise on the common complex F.
pub fn check_homotopy(
    h: &Homotopy,
    f02: &ChainMap,
    f12: &ChainMap,
    f01: &ChainMap,
) -> Result<bool, HomalgError> {
    let f = f02.source().clone();
    for g in [f02, f12, f01] {
        if g.source().dims != f.dims || g.target().dims != f.dims {
            return Err(HomalgError::Shape(
                "homotopy check needs endomorphisms of one complex".into(),
            ));
        }
    }
    h.check_shapes(&f)?;
    let rhs = f02.sub(&f12.compose(f01).expect("endomorphism composition"));
    for &n in f.dims().keys() {
        let lhs = h
            .component(&f, n + 1)
            .mul(&f.diff(n))
            .sub(&f.diff(n - 1).mul(&h.component(&f, n)));
        if lhs != rhs.component(n) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solve the homotopy equation H d - d H = rhs for H as one linear system
/// over F_p. Returns a witness if solvable.
pub fn solve_homotopy(f: &ChainComplex, rhs: &ChainMap) -> Option<Homotopy> {
    let p = f.p();
    // unknowns: entries of H_n for each degree n with dim(n) > 0 and
    // dim(n-1) > 0
    let mut offsets: BTreeMap<Degree, usize> = BTreeMap::new();
    let mut total = 0usize;
    for &n in f.dims().keys() {
        let size = f.dim(n - 1) * f.dim(n);
        if size > 0 {
            offsets.insert(n, total);
            total += size;
        }
    }
    // equations: for each degree n, an f.dim(n) x f.dim(n) matrix identity
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut b: Vec<u64> = Vec::new();
    for &n in f.dims().keys() {
        let dn = f.dim(n);
        let d_here = f.diff(n); // dim(n+1) x dim(n)
        let d_below = f.diff(n - 1); // dim(n) x dim(n-1)
        let target = rhs.component(n);
        for i in 0..dn {
            for j in 0..dn {
                let mut row = vec![0u64; total];
                // (H_{n+1} d_n)_{ij} = sum_k H_{n+1}[i,k] d_n[k,j]
                if let Some(&off) = offsets.get(&(n + 1)) {
                    let cols = f.dim(n + 1);
                    for k in 0..cols {
                        let coef = d_here.get(k, j);
                        if coef != 0 {
                            row[off + i * cols + k] = (row[off + i * cols + k] + coef) % p;
                        }
                    }
                }
                // -(d_{n-1} H_n)_{ij} = -sum_k d_{n-1}[i,k] H_n[k,j]
                if let Some(&off) = offsets.get(&n) {
                    let cols = dn;
                    for k in 0..f.dim(n - 1) {
                        let coef = d_below.get(i, k);
                        if coef != 0 {
                            let idx = off + k * cols + j;
                            row[idx] = (row[idx] + p - coef) % p;
                        }
                    }
                }
                rows.push(row);
                b.push(target.get(i, j));
            }
        }
    }
    if total == 0 {
        // no unknowns: solvable iff rhs is zero
        return if b.iter().all(|&x| x == 0) {
            Some(Homotopy::zero())
        } else {
            None
        };
    }
    let system = Matrix::from_rows(p, rows).expect("homotopy system rows");
    let x = system.solve(&b)?;
    let mut components = BTreeMap::new();
    for (&n, &off) in &offsets {
        let (r, c) = (f.dim(n - 1), f.dim(n));
        let mut m = Matrix::zero(p, r, c);
        for i in 0..r {
            for j in 0..c {
                m.set(i, j, x[off + i * c + j]);
            }
        }
        components.insert(n, m);
    }
    Some(Homotopy { components })
}
