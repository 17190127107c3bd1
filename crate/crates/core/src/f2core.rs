//! Dense bit-packed linear algebra over GF(2).
//!
//! Vectors and matrix rows are packed into 64-bit words. Everything in the
//! crate that is "a linear map over F2" (Steenrod actions, boundary maps,
//! maps in long exact sequences) ends up as an [`F2Matrix`] acting on column
//! vectors: `rows` is the target dimension and `cols` the source dimension.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// A vector over F2.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// The standard basis vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(
            bits.len(),
            bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i),
        )
    }

    /// Interprets the low `len` bits of `mask` as a vector.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = mask;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        let parity: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        parity % 2 == 1
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

impl Serialize for BitVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.ones())
    }
}

/// A dense `rows x cols` matrix over F2, stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from 0/1 rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b & 1 == 1);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, v) in columns.iter().enumerate() {
            assert_eq!(v.len(), rows, "column length does not match row count");
            for r in v.ones() {
                m.set(r, c, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r].flip(c)
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> BitVec {
        BitVec::from_indices(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    /// Set entries as `(row, col)` pairs in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.ones().map(move |c| (r, c)))
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &BitVec) -> BitVec {
        assert_eq!(
            v.len(),
            self.cols,
            "vector length does not match matrix columns"
        );
        BitVec::from_indices(self.rows, (0..self.rows).filter(|&r| self.data[r].dot(v)))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix, F2Error> {
        if self.cols != other.rows {
            return Err(F2Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[r].xor_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &F2Matrix) -> Result<F2Matrix, F2Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(F2Error::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.xor_assign(b);
        }
        Ok(out)
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for (r, c) in self.entries().collect::<Vec<_>>() {
            t.set(c, r, true);
        }
        t
    }

    /// Reduced row echelon form and its pivot columns.
    fn rref(&self) -> (Vec<BitVec>, Vec<usize>) {
        let mut rows = self.data.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            let Some(p) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, p);
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        rows.truncate(next);
        (rows, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the null space `{v : self * v = 0}`.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let (rows, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVec::unit(self.cols, free);
                for (row, &p) in rows.iter().zip(&pivots) {
                    if row.get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// A basis of the column space.
    pub fn image_basis(&self) -> Vec<BitVec> {
        let (_, pivots) = self.rref();
        pivots.into_iter().map(|c| self.column(c)).collect()
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Matrix {}x{} [", self.rows, self.cols)?;
        for (i, row) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{row:?}")?;
        }
        write!(f, "]")
    }
}

/// Incremental echelon basis of a subspace. Each stored vector carries a tag
/// recording which inserted vectors it is a combination of.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    dim: usize,
    tag_len: usize,
    rows: Vec<(usize, BitVec, BitVec)>,
}

impl EchelonBasis {
    pub fn new(dim: usize, tag_len: usize) -> Self {
        Self {
            dim,
            tag_len,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; returns the remainder and the tag of the
    /// combination that was subtracted.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        assert_eq!(v.len(), self.dim);
        let mut rem = v.clone();
        let mut tag = BitVec::zeros(self.tag_len);
        for (pivot, row, row_tag) in &self.rows {
            if rem.get(*pivot) {
                rem.xor_assign(row);
                tag.xor_assign(row_tag);
            }
        }
        (rem, tag)
    }

    /// Inserts `v` with the given tag. Returns false if `v` was already in the span.
    pub fn insert(&mut self, v: &BitVec, tag: BitVec) -> bool {
        let (rem, sub) = self.reduce(v);
        match rem.first_one() {
            None => false,
            Some(pivot) => {
                let mut t = tag;
                t.xor_assign(&sub);
                self.rows.push((pivot, rem, t));
                true
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).0.is_zero()
    }
}

/// A subquotient `Z / B` of F2^dim with chosen representatives, able to
/// express any element of `Z` in coordinates of `Z / B`.
#[derive(Debug, Clone)]
pub struct Subquotient {
    reps: Vec<BitVec>,
    echelon: EchelonBasis,
}

impl Subquotient {
    /// `cycles` must span a space containing the span of `boundaries`.
    pub fn new(dim: usize, cycles: &[BitVec], boundaries: &[BitVec]) -> Self {
        let mut span = EchelonBasis::new(dim, 0);
        for b in boundaries {
            span.insert(b, BitVec::zeros(0));
        }
        let mut reps = Vec::new();
        for z in cycles {
            if span.insert(z, BitVec::zeros(0)) {
                reps.push(z.clone());
            }
        }
        let mut echelon = EchelonBasis::new(dim, reps.len());
        for b in boundaries {
            echelon.insert(b, BitVec::zeros(reps.len()));
        }
        for (i, r) in reps.iter().enumerate() {
            echelon.insert(r, BitVec::unit(reps.len(), i));
        }
        Self { reps, echelon }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[BitVec] {
        &self.reps
    }

    /// Coordinates of the class of `z`, or `None` if `z` is not in `Z`.
    pub fn coordinates(&self, z: &BitVec) -> Option<BitVec> {
        let (rem, tag) = self.echelon.reduce(z);
        rem.is_zero().then_some(tag)
    }
}

/// A degree-wise family of linear maps `A_d -> B_{d + shift}`.
///
/// Blocks are keyed by source degree; a missing block is the zero map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMap {
    pub shift: i64,
    pub source_dims: BTreeMap<i64, usize>,
    pub target_dims: BTreeMap<i64, usize>,
    pub blocks: BTreeMap<i64, F2Matrix>,
}

impl GradedMap {
    pub fn new(
        shift: i64,
        source_dims: BTreeMap<i64, usize>,
        target_dims: BTreeMap<i64, usize>,
        blocks: BTreeMap<i64, F2Matrix>,
    ) -> Result<Self, F2Error> {
        let map = Self {
            shift,
            source_dims: strip_zero(source_dims),
            target_dims: strip_zero(target_dims),
            blocks,
        };
        for (&d, block) in &map.blocks {
            let (s, t) = (map.source_dim(d), map.target_dim(d + shift));
            if block.cols() != s || block.rows() != t {
                return Err(F2Error::ShapeMismatch(format!(
                    "block at degree {d} is {}x{}, expected {t}x{s}",
                    block.rows(),
                    block.cols()
                )));
            }
        }
        Ok(map)
    }

    pub fn zero(
        shift: i64,
        source_dims: BTreeMap<i64, usize>,
        target_dims: BTreeMap<i64, usize>,
    ) -> Self {
        Self::new(shift, source_dims, target_dims, BTreeMap::new())
            .expect("zero map is well-formed")
    }

    pub fn identity(dims: BTreeMap<i64, usize>) -> Self {
        let blocks = dims
            .iter()
            .map(|(&d, &n)| (d, F2Matrix::identity(n)))
            .collect();
        Self::new(0, dims.clone(), dims, blocks).expect("identity is well-formed")
    }

    pub fn source_dim(&self, d: i64) -> usize {
        self.source_dims.get(&d).copied().unwrap_or(0)
    }

    pub fn target_dim(&self, d: i64) -> usize {
        self.target_dims.get(&d).copied().unwrap_or(0)
    }

    /// The block out of source degree `d`, materializing zeros.
    pub fn block(&self, d: i64) -> F2Matrix {
        self.blocks
            .get(&d)
            .cloned()
            .unwrap_or_else(|| F2Matrix::zeros(self.target_dim(d + self.shift), self.source_dim(d)))
    }
}

fn strip_zero(dims: BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    dims.into_iter().filter(|&(_, n)| n > 0).collect()
}

/// Exactness data for one degree of the middle term of `A -f-> B -g-> C`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeExactness {
    pub degree: i64,
    pub dim: usize,
    pub image_rank: usize,
    pub kernel_dim: usize,
    pub composite_zero: bool,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub exact: bool,
    pub degrees: Vec<DegreeExactness>,
}

impl ExactnessReport {
    pub fn failures(&self) -> impl Iterator<Item = &DegreeExactness> {
        self.degrees.iter().filter(|d| !d.exact)
    }
}

/// Checks `image(f) = kernel(g)` in every degree of the middle term.
pub fn check_exact(f: &GradedMap, g: &GradedMap) -> Result<ExactnessReport, F2Error> {
    if f.target_dims != g.source_dims {
        return Err(F2Error::ShapeMismatch(format!(
            "target of f {:?} differs from source of g {:?}",
            f.target_dims, g.source_dims
        )));
    }
    let mut degrees = Vec::new();
    for (&d, &dim) in &g.source_dims {
        let f_block = f.block(d - f.shift);
        let g_block = g.block(d);
        let image_rank = f_block.rank();
        let kernel_dim = dim - g_block.rank();
        let composite_zero = g_block.mul(&f_block)?.is_zero();
        degrees.push(DegreeExactness {
            degree: d,
            dim,
            image_rank,
            kernel_dim,
            composite_zero,
            exact: composite_zero && image_rank == kernel_dim,
        });
    }
    Ok(ExactnessReport {
        exact: degrees.iter().all(|d| d.exact),
        degrees,
    })
}
