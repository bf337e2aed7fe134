//! Exact rational linear algebra.
//!
//! Everything in this crate reduces to a handful of operations over the
//! rationals: matrix products, span membership, span insertion, preimages
//! of subspaces under a linear map and small linear systems. No floating
//! point is used anywhere.
//!
//! Subspaces are kept as a basis in canonical reduced row-echelon form, so
//! two [`VectorSpace`] values describing the same span compare equal.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// The scalar field of every weight.
pub type Rational = BigRational;

/// Errors raised by the linear-algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
}

/// Error returned when a rational literal cannot be parsed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

fn mismatch(context: &'static str, expected: usize, found: usize) -> LinalgError {
    LinalgError::DimensionMismatch {
        context,
        expected,
        found,
    }
}

/// Parses `"3"`, `"-7/2"`, `"2/4"` and the like. Non-canonical input is
/// accepted and reduced.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_owned());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let valid = |s: &str| {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) {
        return Err(err());
    }
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"p"` when the denominator is one, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Shorthand for an integer-valued rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n / d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A dense row vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vector {
    entries: Vec<Rational>,
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&format_rational(e))?;
        }
        f.write_str("]")
    }
}

impl Index<usize> for Vector {
    type Output = Rational;

    fn index(&self, i: usize) -> &Rational {
        &self.entries[i]
    }
}

impl From<Vec<Rational>> for Vector {
    fn from(entries: Vec<Rational>) -> Self {
        Vector { entries }
    }
}

impl Vector {
    pub fn new(entries: Vec<Rational>) -> Self {
        Vector { entries }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Vector::new(values.iter().map(|&v| int(v)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Vector::new(vec![Rational::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Vector::zeros(dim);
        v.entries[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    pub fn set(&mut self, i: usize, value: Rational) {
        self.entries[i] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Indices of the non-zero entries.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.entries[i].is_zero()).collect()
    }

    pub fn dot(&self, other: &Vector) -> Result<Rational, LinalgError> {
        if self.dim() != other.dim() {
            return Err(mismatch("dot product", self.dim(), other.dim()));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b))
    }

    pub fn add(&self, other: &Vector) -> Result<Vector, LinalgError> {
        if self.dim() != other.dim() {
            return Err(mismatch("vector sum", self.dim(), other.dim()));
        }
        Ok(Vector::new(
            self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn scale(&self, s: &Rational) -> Vector {
        Vector::new(self.entries.iter().map(|a| a * s).collect())
    }

    /// Row vector times matrix.
    pub fn mul_matrix(&self, m: &Matrix) -> Result<Vector, LinalgError> {
        if self.dim() != m.rows {
            return Err(mismatch("vector-matrix product", m.rows, self.dim()));
        }
        let mut out = vec![Rational::zero(); m.cols];
        for (i, x) in self.entries.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let e = m.get(i, j);
                if !e.is_zero() {
                    *o += x * e;
                }
            }
        }
        Ok(Vector::new(out))
    }

    /// Concatenation `self ⊕ other`.
    pub fn concat(&self, other: &Vector) -> Vector {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Vector::new(entries)
    }

    pub fn to_sparse(&self) -> SparseVector {
        SparseVector {
            entries: self
                .entries
                .iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .map(|(i, e)| (i, e.clone()))
                .collect(),
        }
    }
}

/// A dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(",")?;
            }
            write!(f, "{:?}", self.row(r))?;
        }
        f.write_str("]")
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(mismatch("matrix data", rows * cols, data.len()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(mismatch("matrix row", cols, row.len()));
            }
            data.extend(row);
        }
        Matrix::new(n, cols, data)
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self, LinalgError> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> Vector {
        Vector::new(self.data[r * self.cols..(r + 1) * self.cols].to_vec())
    }

    pub fn column(&self, c: usize) -> Vector {
        Vector::new((0..self.rows).map(|r| self.get(r, c).clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Matrix times column vector.
    pub fn mul_column(&self, v: &Vector) -> Result<Vector, LinalgError> {
        if v.dim() != self.cols {
            return Err(mismatch("matrix-vector product", self.cols, v.dim()));
        }
        Ok(Vector::new(
            (0..self.rows)
                .map(|r| {
                    (0..self.cols)
                        .filter(|&c| !v[c].is_zero())
                        .fold(Rational::zero(), |acc, c| acc + self.get(r, c) * &v[c])
                })
                .collect(),
        ))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        mat_mul(self, other)
    }
}

/// Exact matrix product `a · b`.
pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    if a.cols != b.rows {
        return Err(mismatch("matrix product", a.cols, b.rows));
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if x.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                let y = b.get(k, j);
                if !y.is_zero() {
                    let idx = i * out.cols + j;
                    out.data[idx] += x * y;
                }
            }
        }
    }
    Ok(out)
}

/// A sparse row vector: strictly increasing indices, no explicit zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVector {
    entries: Vec<(usize, Rational)>,
}

impl SparseVector {
    pub fn new() -> Self {
        SparseVector::default()
    }

    /// Builds from arbitrary `(index, value)` pairs; duplicates are summed.
    pub fn from_pairs(mut pairs: Vec<(usize, Rational)>) -> Self {
        pairs.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, Rational)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        SparseVector { entries }
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Rational> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn to_dense(&self, dim: usize) -> Vector {
        let mut v = Vector::zeros(dim);
        for (i, e) in &self.entries {
            v.set(*i, e.clone());
        }
        v
    }

    pub fn scale(&self, s: &Rational) -> SparseVector {
        if s.is_zero() {
            return SparseVector::new();
        }
        SparseVector {
            entries: self.entries.iter().map(|(i, e)| (*i, e * s)).collect(),
        }
    }

    /// `self - coef * other`.
    pub fn sub_scaled(&self, coef: &Rational, other: &SparseVector) -> SparseVector {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, -(coef * y)));
                        b.next();
                    } else {
                        let v = x - coef * y;
                        if !v.is_zero() {
                            out.push((*i, v));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, -(coef * y)));
                    b.next();
                }
                (None, None) => break,
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseVector { entries: out }
    }

    pub fn dot_dense(&self, dense: &Vector) -> Rational {
        self.entries
            .iter()
            .fold(Rational::zero(), |acc, (i, e)| acc + e * &dense[*i])
    }

    /// Shifts every index by `offset`.
    pub fn shifted(&self, offset: usize) -> SparseVector {
        SparseVector {
            entries: self.entries.iter().map(|(i, e)| (i + offset, e.clone())).collect(),
        }
    }

    /// Concatenation of `self` (of dimension `dim`) with `other`.
    pub fn concat(&self, dim: usize, other: &SparseVector) -> SparseVector {
        let mut entries = self.entries.clone();
        entries.extend(other.shifted(dim).entries);
        SparseVector { entries }
    }
}

/// A sparse matrix stored as its non-empty rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    nonzero_rows: Vec<(usize, SparseVector)>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            nonzero_rows: Vec::new(),
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: Vec<(usize, usize, Rational)>) -> Self {
        let mut by_row: std::collections::BTreeMap<usize, Vec<(usize, Rational)>> = std::collections::BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
            by_row.entry(r).or_default().push((c, v));
        }
        let nonzero_rows = by_row
            .into_iter()
            .map(|(r, pairs)| (r, SparseVector::from_pairs(pairs)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        SparseMatrix {
            rows,
            cols,
            nonzero_rows,
        }
    }

    pub fn from_dense(m: &Matrix) -> Self {
        let mut triplets = Vec::new();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if !m.get(r, c).is_zero() {
                    triplets.push((r, c, m.get(r, c).clone()));
                }
            }
        }
        SparseMatrix::from_triplets(m.rows(), m.cols(), triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nonzero_rows(&self) -> &[(usize, SparseVector)] {
        &self.nonzero_rows
    }

    pub fn row(&self, r: usize) -> Option<&SparseVector> {
        self.nonzero_rows
            .binary_search_by_key(&r, |(i, _)| *i)
            .ok()
            .map(|k| &self.nonzero_rows[k].1)
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, x: &SparseVector) -> SparseVector {
        let mut pairs = Vec::new();
        for (i, xi) in x.entries() {
            if let Some(row) = self.row(*i) {
                for (j, m) in row.entries() {
                    pairs.push((*j, xi * m));
                }
            }
        }
        SparseVector::from_pairs(pairs)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (r, row) in &self.nonzero_rows {
            for (c, v) in row.entries() {
                m.set(*r, *c, v.clone());
            }
        }
        m
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut nonzero_rows = self.nonzero_rows.clone();
        for (r, row) in &other.nonzero_rows {
            nonzero_rows.push((r + self.rows, row.shifted(self.cols)));
        }
        SparseMatrix {
            rows: self.rows + other.rows,
            cols: self.cols + other.cols,
            nonzero_rows,
        }
    }
}

/// A subspace of `ℚ^n`, kept in canonical reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorSpace {
    ambient_dim: usize,
    // sorted by pivot; the pivot of a row is its leading index and carries a 1
    rows: Vec<SparseVector>,
}

impl VectorSpace {
    /// The zero subspace of `ℚ^n`.
    pub fn zero(ambient_dim: usize) -> Self {
        VectorSpace {
            ambient_dim,
            rows: Vec::new(),
        }
    }

    /// All of `ℚ^n`.
    pub fn full(ambient_dim: usize) -> Self {
        VectorSpace {
            ambient_dim,
            rows: (0..ambient_dim)
                .map(|i| SparseVector {
                    entries: vec![(i, Rational::one())],
                })
                .collect(),
        }
    }

    /// The span of the given vectors.
    pub fn span<'a>(ambient_dim: usize, vectors: impl IntoIterator<Item = &'a Vector>) -> Result<Self, LinalgError> {
        let mut s = VectorSpace::zero(ambient_dim);
        for v in vectors {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient_dim
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().filter_map(SparseVector::leading).collect()
    }

    /// The canonical basis as dense vectors.
    pub fn basis(&self) -> Vec<Vector> {
        self.rows.iter().map(|r| r.to_dense(self.ambient_dim)).collect()
    }

    pub fn sparse_basis(&self) -> &[SparseVector] {
        &self.rows
    }

    fn check_dim(&self, context: &'static str, found: usize) -> Result<(), LinalgError> {
        if found != self.ambient_dim {
            return Err(mismatch(context, self.ambient_dim, found));
        }
        Ok(())
    }

    /// `v` minus its projection along the canonical basis. Zero iff `v` is
    /// in the span.
    pub fn residual(&self, v: &SparseVector) -> SparseVector {
        let mut res = v.clone();
        for row in &self.rows {
            let pivot = row.leading().expect("basis rows are non-zero");
            if let Some(coef) = v.get(pivot) {
                res = res.sub_scaled(coef, row);
            }
        }
        res
    }

    pub fn contains_sparse(&self, v: &SparseVector) -> bool {
        debug_assert!(v.max_index().is_none_or(|i| i < self.ambient_dim));
        self.residual(v).is_zero()
    }

    pub fn contains(&self, v: &Vector) -> Result<bool, LinalgError> {
        self.check_dim("span membership", v.dim())?;
        Ok(self.contains_sparse(&v.to_sparse()))
    }

    /// Inserts `v`; returns whether it was independent of the current basis.
    pub fn insert_sparse(&mut self, v: &SparseVector) -> bool {
        let res = self.residual(v);
        let Some(pivot) = res.leading() else {
            return false;
        };
        let lead = res.get(pivot).expect("leading entry").clone();
        let new_row = res.scale(&lead.recip());
        for row in &mut self.rows {
            if let Some(c) = row.get(pivot).cloned() {
                *row = row.sub_scaled(&c, &new_row);
            }
        }
        let at = self
            .rows
            .partition_point(|r| r.leading().expect("non-zero row") < pivot);
        self.rows.insert(at, new_row);
        true
    }

    pub fn insert(&mut self, v: &Vector) -> Result<bool, LinalgError> {
        self.check_dim("span insertion", v.dim())?;
        Ok(self.insert_sparse(&v.to_sparse()))
    }

    /// The annihilator `{z : b·z = 0 for every b in the space}`.
    pub fn annihilator(&self) -> VectorSpace {
        let pivots = self.pivots();
        let mut is_pivot = vec![false; self.ambient_dim];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = VectorSpace::zero(self.ambient_dim);
        for free in (0..self.ambient_dim).filter(|&c| !is_pivot[c]) {
            let mut pairs = vec![(free, Rational::one())];
            for row in &self.rows {
                if let Some(x) = row.get(free) {
                    pairs.push((row.leading().expect("non-zero row"), -x.clone()));
                }
            }
            out.insert_sparse(&SparseVector::from_pairs(pairs));
        }
        out
    }

    /// `{y : y·a ∈ self}`.
    pub fn preimage(&self, a: &Matrix) -> Result<VectorSpace, LinalgError> {
        self.check_dim("preimage", a.cols())?;
        let constraints = self.annihilator();
        let mut images = VectorSpace::zero(a.rows());
        for z in constraints.basis() {
            images.insert(&a.mul_column(&z)?)?;
        }
        Ok(images.annihilator())
    }

    /// Places this space in block `block` of a space `blocks` times larger.
    pub fn embed_block(&self, block: usize, blocks: usize) -> VectorSpace {
        let offset = block * self.ambient_dim;
        VectorSpace {
            ambient_dim: self.ambient_dim * blocks,
            rows: self.rows.iter().map(|r| r.shifted(offset)).collect(),
        }
    }
}

/// Functional form of [`VectorSpace::insert`].
pub fn span_insert(s: &VectorSpace, v: &Vector) -> Result<(VectorSpace, bool), LinalgError> {
    let mut out = s.clone();
    let independent = out.insert(v)?;
    Ok((out, independent))
}

pub fn in_span(s: &VectorSpace, v: &Vector) -> Result<bool, LinalgError> {
    s.contains(v)
}

/// `{y : y·a ∈ v}`.
pub fn preimage_space(v: &VectorSpace, a: &Matrix) -> Result<VectorSpace, LinalgError> {
    v.preimage(a)
}

/// Row space of `a`.
pub fn image_space(a: &Matrix) -> VectorSpace {
    let mut s = VectorSpace::zero(a.cols());
    for r in 0..a.rows() {
        s.insert_sparse(&a.row(r).to_sparse());
    }
    s
}

/// Solves `coeffs · x = rhs` for every equation. Returns `None` when the
/// system is inconsistent; free variables are set to zero.
pub fn solve_linear(equations: &[(Vector, Rational)], unknowns: usize) -> Option<Vector> {
    let mut rows: Vec<Vec<Rational>> = equations
        .iter()
        .map(|(c, r)| {
            assert_eq!(c.dim(), unknowns, "equation arity");
            let mut row = c.entries().to_vec();
            row.push(r.clone());
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..unknowns {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip();
        for x in rows[rank].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|row| !row[unknowns].is_zero()) {
        return None;
    }
    let mut x = Vector::zeros(unknowns);
    for (r, &c) in pivot_cols.iter().enumerate() {
        x.set(c, rows[r][unknowns].clone());
    }
    Some(x)
}
