//! Finite unstable modules and algebras over the mod 2 Steenrod algebra.
//!
//! A module is a graded F2 vector space with named basis elements and, for
//! each `j >= 1` and degree `m`, a matrix for `Sq^j: M^m -> M^(m+j)`. Matrices
//! act on column vectors (rows index the target basis). Missing blocks are
//! zero and `Sq^0` is the identity unless explicitly overridden, in which case
//! validation checks it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::f2core::{BitVec, F2Matrix};
use crate::steenrod::adem_reduce;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("degree {degree} outside declared range [{lo}, {hi}]")]
    DegreeOutOfRange { degree: i64, lo: i64, hi: i64 },
    #[error("duplicate basis name `{0}`")]
    DuplicateName(String),
    #[error("unknown basis name `{0}`")]
    UnknownName(String),
    #[error(
        "Sq^{j} block on degree {degree} has shape {rows}x{cols}, expected {exp_rows}x{exp_cols}"
    )]
    BlockShape {
        j: u32,
        degree: i64,
        rows: usize,
        cols: usize,
        exp_rows: usize,
        exp_cols: usize,
    },
    #[error("entry ({row}, {col}) out of range for Sq^{j} on degree {degree}")]
    EntryOutOfRange {
        j: u32,
        degree: i64,
        row: usize,
        col: usize,
    },
    #[error("degree-0 component of the total class is not the unit")]
    NotUnipotent,
    #[error("total class component in degree {0} has the wrong length")]
    ComponentShape(i64),
    #[error("algebra has no unit in degree 0")]
    MissingUnit,
    #[error("module fails validation: {0}")]
    Invalid(ValidationReport),
}

/// A homogeneous element: a degree plus coordinates in that degree's basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Class {
    pub degree: i64,
    pub vector: BitVec,
}

impl Class {
    pub fn new(degree: i64, vector: BitVec) -> Self {
        Self { degree, vector }
    }

    pub fn is_zero(&self) -> bool {
        self.vector.is_zero()
    }
}

/// One violated axiom, with enough context to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `Sq^j` nonzero on degree `degree < j`.
    Instability {
        j: u32,
        degree: i64,
    },
    /// `Sq^a Sq^b` disagrees with its admissible expansion on `degree`.
    AdemIncoherence {
        a: u32,
        b: u32,
        degree: i64,
        relation: String,
    },
    /// An explicit `Sq^0` block that is not the identity.
    Sq0NotIdentity {
        degree: i64,
    },
    NonAssociative {
        x: String,
        y: String,
        z: String,
    },
    NonCommutative {
        x: String,
        y: String,
    },
    NonUnital {
        x: String,
    },
    /// A product of basis elements landing in a degree with no classes.
    ProductOutOfRange {
        x: String,
        y: String,
    },
    /// `Sq^m x != x * x` for `|x| = m`.
    SquaringAxiom {
        x: String,
    },
    Cartan {
        j: u32,
        x: String,
        y: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} violation(s)", self.violations.len())?;
        if let Some(first) = self.violations.first() {
            write!(f, ", first: {first:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnstableModule {
    lo: i64,
    hi: i64,
    basis: BTreeMap<i64, Vec<String>>,
    sq: BTreeMap<(u32, i64), F2Matrix>,
}

impl UnstableModule {
    /// A module with the given basis and no Steenrod action yet. An empty range
    /// has `hi < lo`.
    pub fn new(lo: i64, hi: i64, basis: BTreeMap<i64, Vec<String>>) -> Result<Self, ModuleError> {
        let mut seen = BTreeSet::new();
        for (&d, names) in &basis {
            if !names.is_empty() && (d < lo || d > hi) {
                return Err(ModuleError::DegreeOutOfRange { degree: d, lo, hi });
            }
            for n in names {
                if !seen.insert(n.clone()) {
                    return Err(ModuleError::DuplicateName(n.clone()));
                }
            }
        }
        Ok(Self {
            lo,
            hi,
            basis: basis.into_iter().filter(|(_, n)| !n.is_empty()).collect(),
            sq: BTreeMap::new(),
        })
    }

    pub fn zero() -> Self {
        Self {
            lo: 0,
            hi: -1,
            basis: BTreeMap::new(),
            sq: BTreeMap::new(),
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// `hi - lo`, the largest degree difference a square can span.
    pub fn span(&self) -> i64 {
        (self.hi - self.lo).max(0)
    }

    pub fn dim(&self, d: i64) -> usize {
        self.basis.get(&d).map_or(0, Vec::len)
    }

    pub fn total_dim(&self) -> usize {
        self.basis.values().map(Vec::len).sum()
    }

    /// Degrees carrying at least one class, ascending.
    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.basis.keys().copied()
    }

    pub fn names(&self, d: i64) -> &[String] {
        self.basis.get(&d).map_or(&[], Vec::as_slice)
    }

    pub fn basis(&self) -> &BTreeMap<i64, Vec<String>> {
        &self.basis
    }

    pub fn find(&self, name: &str) -> Option<(i64, usize)> {
        self.basis
            .iter()
            .find_map(|(&d, names)| names.iter().position(|n| n == name).map(|i| (d, i)))
    }

    pub fn basis_class(&self, d: i64, i: usize) -> Class {
        Class::new(d, BitVec::unit(self.dim(d), i))
    }

    /// Stored nonzero blocks, keyed by `(j, source degree)`.
    pub fn sq_blocks(&self) -> impl Iterator<Item = (u32, i64, &F2Matrix)> {
        self.sq.iter().map(|(&(j, m), mat)| (j, m, mat))
    }

    /// The matrix of `Sq^j` on degree `m`, zero or identity when not stored.
    pub fn sq(&self, j: u32, m: i64) -> F2Matrix {
        match self.sq.get(&(j, m)) {
            Some(mat) => mat.clone(),
            None if j == 0 => F2Matrix::identity(self.dim(m)),
            None => F2Matrix::zeros(self.dim(m + j as i64), self.dim(m)),
        }
    }

    pub fn set_sq(&mut self, j: u32, m: i64, mat: F2Matrix) -> Result<(), ModuleError> {
        let (exp_rows, exp_cols) = (self.dim(m + j as i64), self.dim(m));
        if mat.rows() != exp_rows || mat.cols() != exp_cols {
            return Err(ModuleError::BlockShape {
                j,
                degree: m,
                rows: mat.rows(),
                cols: mat.cols(),
                exp_rows,
                exp_cols,
            });
        }
        if (j > 0 && mat.is_zero()) || (j == 0 && mat == F2Matrix::identity(exp_cols)) {
            self.sq.remove(&(j, m));
        } else {
            self.sq.insert((j, m), mat);
        }
        Ok(())
    }

    /// Flips one matrix entry: the coefficient of target basis `row` in `Sq^j` of source basis `col`.
    pub fn toggle_sq_entry(
        &mut self,
        j: u32,
        m: i64,
        row: usize,
        col: usize,
    ) -> Result<(), ModuleError> {
        let mut mat = self.sq(j, m);
        if row >= mat.rows() || col >= mat.cols() {
            return Err(ModuleError::EntryOutOfRange {
                j,
                degree: m,
                row,
                col,
            });
        }
        mat.toggle(row, col);
        self.set_sq(j, m, mat)
    }

    pub fn apply_sq(&self, j: u32, x: &Class) -> Class {
        Class::new(x.degree + j as i64, self.sq(j, x.degree).apply(&x.vector))
    }

    /// Applies a composite in application order (first element applied first).
    pub fn apply_sequence(&self, exponents: &[u32], x: &Class) -> Class {
        exponents
            .iter()
            .fold(x.clone(), |acc, &r| self.apply_sq(r, &acc))
    }

    /// Matrix of a word `Sq^i1 ... Sq^it` (rightmost first) starting at degree `m`.
    fn word_matrix(&self, word: &[u32], m: i64) -> F2Matrix {
        let mut acc = F2Matrix::identity(self.dim(m));
        let mut d = m;
        for &i in word.iter().rev() {
            acc = self.sq(i, d).mul(&acc).expect("block shapes chain");
            d += i as i64;
        }
        acc
    }

    /// Shifts every degree by `d`. Shifts that break instability are refused.
    pub fn suspend(&self, d: i64) -> Result<UnstableModule, ModuleError> {
        let out = self.shifted(d);
        let report = validate(&out);
        let unstable: Vec<_> = report
            .violations
            .into_iter()
            .filter(|v| matches!(v, Violation::Instability { .. }))
            .collect();
        if unstable.is_empty() {
            Ok(out)
        } else {
            Err(ModuleError::Invalid(ValidationReport {
                violations: unstable,
            }))
        }
    }

    /// Degree shift without any checks.
    pub fn shifted(&self, d: i64) -> UnstableModule {
        UnstableModule {
            lo: self.lo + d,
            hi: self.hi + d,
            basis: self
                .basis
                .iter()
                .map(|(&k, v)| (k + d, v.clone()))
                .collect(),
            sq: self
                .sq
                .iter()
                .map(|(&(j, m), mat)| ((j, m + d), mat.clone()))
                .collect(),
        }
    }

    /// Compares degrees, dimensions and Steenrod matrices, ignoring names and
    /// the declared range.
    pub fn same_structure(&self, other: &UnstableModule) -> bool {
        let dims = |m: &UnstableModule| {
            m.basis
                .iter()
                .map(|(&d, v)| (d, v.len()))
                .collect::<Vec<_>>()
        };
        dims(self) == dims(other) && self.sq == other.sq
    }
}

/// Every violated module axiom. Empty report means valid.
pub fn validate(m: &UnstableModule) -> ValidationReport {
    let mut violations = Vec::new();
    for (&(j, d), mat) in &m.sq {
        if j == 0 {
            if *mat != F2Matrix::identity(m.dim(d)) {
                violations.push(Violation::Sq0NotIdentity { degree: d });
            }
        } else if (j as i64) > d && !mat.is_zero() {
            violations.push(Violation::Instability { j, degree: d });
        }
    }
    let span = m.span();
    let degrees: Vec<i64> = m.degrees().collect();
    for total in 2..=span {
        for b in 1..total {
            let a = total - b;
            if a >= 2 * b {
                continue;
            }
            let (a, b) = (a as u32, b as u32);
            let relation = adem_reduce(&[a, b]).expect("positive exponents");
            for &d in &degrees {
                if m.dim(d + total) == 0 {
                    continue;
                }
                let lhs = m.word_matrix(&[a, b], d);
                let mut rhs = F2Matrix::zeros(lhs.rows(), lhs.cols());
                for t in relation.terms() {
                    rhs = rhs
                        .add(&m.word_matrix(t.exponents(), d))
                        .expect("same shape");
                }
                if lhs != rhs {
                    violations.push(Violation::AdemIncoherence {
                        a,
                        b,
                        degree: d,
                        relation: format!("Sq^{a} Sq^{b} = {relation}"),
                    });
                }
            }
        }
    }
    ValidationReport { violations }
}

pub fn suspend(m: &UnstableModule, d: i64) -> Result<UnstableModule, ModuleError> {
    m.suspend(d)
}

/// Degree-wise direct sum with block-diagonal action. With two or more parts,
/// basis names are prefixed by the part index as `"{i}:{name}"`.
pub fn wedge(parts: &[UnstableModule]) -> UnstableModule {
    match parts {
        [] => return UnstableModule::zero(),
        [only] => return only.clone(),
        _ => {}
    }
    let nonempty: Vec<&UnstableModule> = parts.iter().filter(|p| p.total_dim() > 0).collect();
    let lo = nonempty.iter().map(|p| p.lo).min().unwrap_or(0);
    let hi = nonempty.iter().map(|p| p.hi).max().unwrap_or(-1);
    let mut basis: BTreeMap<i64, Vec<String>> = BTreeMap::new();
    // offsets[i][d] = index of part i's first class in degree d
    let mut offsets: Vec<BTreeMap<i64, usize>> = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let mut off = BTreeMap::new();
        for (&d, names) in &p.basis {
            let slot = basis.entry(d).or_default();
            off.insert(d, slot.len());
            slot.extend(names.iter().map(|n| format!("{i}:{n}")));
        }
        offsets.push(off);
    }
    let mut out = UnstableModule::new(lo, hi, basis).expect("prefixed names are unique");
    for (i, p) in parts.iter().enumerate() {
        for (&(j, d), mat) in &p.sq {
            let (row_off, col_off) = (offsets[i][&(d + j as i64)], offsets[i][&d]);
            let mut block = out.sq(j, d);
            for (r, c) in mat.entries() {
                block.toggle(row_off + r, col_off + c);
            }
            out.set_sq(j, d, block).expect("block shape from dims");
        }
    }
    out
}

/// Two basis elements, each as `(degree, index)`.
pub type BasisPair = ((i64, usize), (i64, usize));

/// An unstable module with a commutative, associative, unital product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedAlgebra {
    module: UnstableModule,
    unit: usize,
    products: BTreeMap<BasisPair, BitVec>,
}

impl GradedAlgebra {
    /// `unit` names a degree-0 basis element. The product starts as the one
    /// forced by the unit and is extended with [`GradedAlgebra::add_product`].
    pub fn new(module: UnstableModule, unit: &str) -> Result<Self, ModuleError> {
        let (d, idx) = module
            .find(unit)
            .ok_or_else(|| ModuleError::UnknownName(unit.into()))?;
        if d != 0 {
            return Err(ModuleError::MissingUnit);
        }
        let mut products = BTreeMap::new();
        for (&deg, names) in module.basis() {
            for i in 0..names.len() {
                let v = BitVec::unit(names.len(), i);
                products.insert(((0, idx), (deg, i)), v.clone());
                products.insert(((deg, i), (0, idx)), v);
            }
        }
        Ok(Self {
            module,
            unit: idx,
            products,
        })
    }

    pub fn module(&self) -> &UnstableModule {
        &self.module
    }

    pub fn into_module(self) -> UnstableModule {
        self.module
    }

    pub fn unit_class(&self) -> Class {
        self.module.basis_class(0, self.unit)
    }

    pub fn unit_name(&self) -> &str {
        &self.module.names(0)[self.unit]
    }

    /// Sets `x * y` to contain `z` (and symmetrically `y * x`). Repeated
    /// entries are idempotent.
    pub fn add_product(&mut self, x: &str, y: &str, z: &str) -> Result<(), ModuleError> {
        let find = |n: &str| {
            self.module
                .find(n)
                .ok_or_else(|| ModuleError::UnknownName(n.into()))
        };
        let (xd, xi) = find(x)?;
        let (yd, yi) = find(y)?;
        let (zd, zi) = find(z)?;
        if zd != xd + yd {
            return Err(ModuleError::DegreeOutOfRange {
                degree: zd,
                lo: xd + yd,
                hi: xd + yd,
            });
        }
        let dim = self.module.dim(zd);
        for key in [((xd, xi), (yd, yi)), ((yd, yi), (xd, xi))] {
            self.products
                .entry(key)
                .or_insert_with(|| BitVec::zeros(dim))
                .set(zi, true);
        }
        Ok(())
    }

    /// Sets the full product of two basis elements; does not symmetrize.
    pub fn set_product(&mut self, x: (i64, usize), y: (i64, usize), value: BitVec) {
        if value.is_zero() {
            self.products.remove(&(x, y));
        } else {
            self.products.insert((x, y), value);
        }
    }

    /// Stored nonzero products of basis elements.
    pub fn products(&self) -> impl Iterator<Item = ((i64, usize), (i64, usize), &BitVec)> {
        self.products
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(&(x, y), v)| (x, y, v))
    }

    pub fn multiply_basis(&self, x: (i64, usize), y: (i64, usize)) -> Class {
        let d = x.0 + y.0;
        let v = self
            .products
            .get(&(x, y))
            .filter(|v| v.len() == self.module.dim(d))
            .cloned()
            .unwrap_or_else(|| BitVec::zeros(self.module.dim(d)));
        Class::new(d, v)
    }

    pub fn multiply(&self, x: &Class, y: &Class) -> Class {
        let d = x.degree + y.degree;
        let mut acc = BitVec::zeros(self.module.dim(d));
        for i in x.vector.ones() {
            for j in y.vector.ones() {
                acc.xor_assign(&self.multiply_basis((x.degree, i), (y.degree, j)).vector);
            }
        }
        Class::new(d, acc)
    }

    pub fn sq(&self, j: u32, x: &Class) -> Class {
        self.module.apply_sq(j, x)
    }

    fn name(&self, x: (i64, usize)) -> String {
        self.module.names(x.0)[x.1].clone()
    }

    fn basis_keys(&self) -> Vec<(i64, usize)> {
        self.module
            .basis()
            .iter()
            .flat_map(|(&d, n)| (0..n.len()).map(move |i| (d, i)))
            .collect()
    }
}

/// Module axioms plus the algebra axioms: associativity, commutativity, unit,
/// squaring (`Sq^|x| x = x^2`) and the Cartan formula on basis pairs.
pub fn validate_algebra(a: &GradedAlgebra) -> ValidationReport {
    let mut report = validate(&a.module);
    let v = &mut report.violations;
    let keys = a.basis_keys();
    for (&(x, y), val) in &a.products {
        if !val.is_zero() && val.len() != a.module.dim(x.0 + y.0) {
            v.push(Violation::ProductOutOfRange {
                x: a.name(x),
                y: a.name(y),
            });
        }
    }
    let unit = a.unit_class();
    for &x in &keys {
        let xc = a.module.basis_class(x.0, x.1);
        if a.multiply(&unit, &xc) != xc || a.multiply(&xc, &unit) != xc {
            v.push(Violation::NonUnital { x: a.name(x) });
        }
        if x.0 >= 0 && x.0 <= u32::MAX as i64 && a.sq(x.0 as u32, &xc) != a.multiply(&xc, &xc) {
            v.push(Violation::SquaringAxiom { x: a.name(x) });
        }
    }
    for (ix, &x) in keys.iter().enumerate() {
        let xc = a.module.basis_class(x.0, x.1);
        for &y in &keys[ix..] {
            let yc = a.module.basis_class(y.0, y.1);
            let xy = a.multiply(&xc, &yc);
            if xy != a.multiply(&yc, &xc) {
                v.push(Violation::NonCommutative {
                    x: a.name(x),
                    y: a.name(y),
                });
            }
            for j in 1..=a.module.span() as u32 {
                let lhs = a.sq(j, &xy);
                let mut rhs = BitVec::zeros(lhs.vector.len());
                for p in 0..=j {
                    rhs.xor_assign(&a.multiply(&a.sq(p, &xc), &a.sq(j - p, &yc)).vector);
                }
                if lhs.vector != rhs {
                    v.push(Violation::Cartan {
                        j,
                        x: a.name(x),
                        y: a.name(y),
                    });
                }
            }
        }
    }
    for &x in &keys {
        let xc = a.module.basis_class(x.0, x.1);
        for &y in &keys {
            let yc = a.module.basis_class(y.0, y.1);
            let xy = a.multiply(&xc, &yc);
            for &z in &keys {
                let zc = a.module.basis_class(z.0, z.1);
                if a.multiply(&xy, &zc) != a.multiply(&xc, &a.multiply(&yc, &zc)) {
                    v.push(Violation::NonAssociative {
                        x: a.name(x),
                        y: a.name(y),
                        z: a.name(z),
                    });
                }
            }
        }
    }
    report
}

/// An inhomogeneous element `1 + w_1 + w_2 + ...` of a graded algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalSWClass {
    components: BTreeMap<i64, BitVec>,
    pub rank: Option<u32>,
}

impl TotalSWClass {
    /// Builds a total class; zero components are dropped.
    pub fn new(
        a: &GradedAlgebra,
        components: BTreeMap<i64, BitVec>,
        rank: Option<u32>,
    ) -> Result<Self, ModuleError> {
        for (&d, v) in &components {
            if v.len() != a.module.dim(d) {
                return Err(ModuleError::ComponentShape(d));
            }
        }
        let components: BTreeMap<i64, BitVec> = components
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .collect();
        if components.get(&0) != Some(&a.unit_class().vector) {
            return Err(ModuleError::NotUnipotent);
        }
        if components.keys().any(|&d| d < 0) {
            return Err(ModuleError::NotUnipotent);
        }
        Ok(Self { components, rank })
    }

    /// The class `1`.
    pub fn one(a: &GradedAlgebra) -> Self {
        Self {
            components: BTreeMap::from([(0, a.unit_class().vector)]),
            rank: None,
        }
    }

    /// The homogeneous element `1 + x`.
    pub fn one_plus(a: &GradedAlgebra, x: &Class) -> Result<Self, ModuleError> {
        let mut c = BTreeMap::from([(0, a.unit_class().vector)]);
        c.entry(x.degree)
            .and_modify(|v: &mut BitVec| v.xor_assign(&x.vector))
            .or_insert_with(|| x.vector.clone());
        Self::new(a, c, None)
    }

    /// The component in degree `d` (zero if absent).
    pub fn component(&self, a: &GradedAlgebra, d: i64) -> Class {
        Class::new(
            d,
            self.components
                .get(&d)
                .cloned()
                .unwrap_or_else(|| BitVec::zeros(a.module.dim(d))),
        )
    }

    /// Nonzero components, ascending by degree.
    pub fn components(&self) -> impl Iterator<Item = (i64, &BitVec)> {
        self.components.iter().map(|(&d, v)| (d, v))
    }

    /// Product in the algebra, truncated at its top degree.
    pub fn multiply(&self, a: &GradedAlgebra, other: &TotalSWClass) -> TotalSWClass {
        let mut out: BTreeMap<i64, BitVec> = BTreeMap::new();
        for (&p, x) in &self.components {
            for (&q, y) in &other.components {
                let prod = a.multiply(&Class::new(p, x.clone()), &Class::new(q, y.clone()));
                if prod.vector.is_empty() {
                    continue;
                }
                out.entry(p + q)
                    .and_modify(|v| v.xor_assign(&prod.vector))
                    .or_insert(prod.vector);
            }
        }
        out.retain(|_, v| !v.is_zero());
        TotalSWClass {
            components: out,
            rank: self.rank,
        }
    }

    pub fn pow(&self, a: &GradedAlgebra, e: u32) -> TotalSWClass {
        (0..e).fold(TotalSWClass::one(a), |acc, _| acc.multiply(a, self))
    }
}

/// The multiplicative inverse, solved degree by degree: `v_0 = 1` and
/// `v_d = sum_{p=1..d} w_p v_(d-p)`.
pub fn invert_total_class(
    a: &GradedAlgebra,
    w: &TotalSWClass,
) -> Result<TotalSWClass, ModuleError> {
    if w.components.get(&0) != Some(&a.unit_class().vector) {
        return Err(ModuleError::NotUnipotent);
    }
    let top = a.module.hi().max(0);
    let mut v: BTreeMap<i64, BitVec> = BTreeMap::from([(0, a.unit_class().vector)]);
    for d in 1..=top {
        let mut acc = BitVec::zeros(a.module.dim(d));
        for p in 1..=d {
            let (Some(wp), Some(vq)) = (w.components.get(&p), v.get(&(d - p))) else {
                continue;
            };
            acc.xor_assign(
                &a.multiply(&Class::new(p, wp.clone()), &Class::new(d - p, vq.clone()))
                    .vector,
            );
        }
        if !acc.is_zero() {
            v.insert(d, acc);
        }
    }
    Ok(TotalSWClass {
        components: v,
        rank: None,
    })
}

/// Cohomology of the Thom space of a rank-`r` bundle with total
/// Stiefel-Whitney class `w`: basis `u*b` in degree `r + |b|` and
/// `Sq^j(u b) = u sum_{p+q=j} w_p Sq^q(b)`.
pub fn thom(base: &GradedAlgebra, w: &TotalSWClass, r: u32) -> Result<UnstableModule, ModuleError> {
    let bm = base.module();
    let shift = r as i64;
    let basis = bm
        .basis()
        .iter()
        .map(|(&d, names)| (d + shift, names.iter().map(|n| format!("u*{n}")).collect()))
        .collect();
    let mut out = UnstableModule::new(bm.lo() + shift, bm.hi() + shift, basis)?;
    let span = bm.span() as u32;
    for m in bm.degrees().collect::<Vec<_>>() {
        for j in 1..=span {
            let target = m + j as i64;
            if bm.dim(target) == 0 {
                continue;
            }
            let mut mat = F2Matrix::zeros(bm.dim(target), bm.dim(m));
            for col in 0..bm.dim(m) {
                let b = bm.basis_class(m, col);
                let mut acc = BitVec::zeros(bm.dim(target));
                for p in 0..=j {
                    let wp = w.component(base, p as i64);
                    if wp.is_zero() {
                        continue;
                    }
                    acc.xor_assign(&base.multiply(&wp, &base.sq(j - p, &b)).vector);
                }
                for row in acc.ones() {
                    mat.set(row, col, true);
                }
            }
            out.set_sq(j, m + shift, mat)?;
        }
    }
    let report = validate(&out);
    if report.is_valid() {
        Ok(out)
    } else {
        Err(ModuleError::Invalid(report))
    }
}

fn basis_of(entries: &[(i64, &str)]) -> BTreeMap<i64, Vec<String>> {
    let mut b: BTreeMap<i64, Vec<String>> = BTreeMap::new();
    for &(d, n) in entries {
        b.entry(d).or_default().push(n.to_string());
    }
    b
}

/// `H*(CP^2; F2) = F2[k]/(k^3)` with `|k| = 2`: basis `1, k, k2`.
pub fn projective_plane_algebra() -> GradedAlgebra {
    let m = UnstableModule::new(0, 4, basis_of(&[(0, "1"), (2, "k"), (4, "k2")]))
        .expect("static basis");
    let mut a = GradedAlgebra::new(m, "1").expect("unit present");
    a.add_product("k", "k", "k2").expect("static product");
    let mut m = a.module.clone();
    m.toggle_sq_entry(2, 2, 0, 0).expect("Sq^2 k = k2");
    a.module = m;
    a
}

/// Cohomology of a point: just the unit.
pub fn point_algebra() -> GradedAlgebra {
    let m = UnstableModule::new(0, 0, basis_of(&[(0, "1")])).expect("static basis");
    GradedAlgebra::new(m, "1").expect("unit present")
}

/// `H*(T^2; F2)`: exterior algebra on `x, y` of degree 1.
pub fn torus_algebra() -> GradedAlgebra {
    let m = UnstableModule::new(0, 2, basis_of(&[(0, "1"), (1, "x"), (1, "y"), (2, "xy")]))
        .expect("static basis");
    let mut a = GradedAlgebra::new(m, "1").expect("unit present");
    a.add_product("x", "y", "xy").expect("static product");
    a
}

/// The sphere `S^r` as a module: one class in degree `r`.
pub fn sphere(r: i64) -> UnstableModule {
    UnstableModule::new(r, r, basis_of(&[(r, "s")])).expect("static basis")
}

/// `1 + k` in the projective plane algebra.
pub fn projective_plane_tangent_root(a: &GradedAlgebra) -> TotalSWClass {
    let (d, i) = a.module.find("k").expect("projective plane algebra has k");
    TotalSWClass::one_plus(a, &a.module.basis_class(d, i)).expect("unipotent")
}

/// The Thom module of the normal bundle of `CP^2` in `R^7`: the rank-3 bundle
/// whose total class inverts `w(T CP^2) = (1 + k)^3`.
pub fn projective_plane_normal_thom() -> UnstableModule {
    let a = projective_plane_algebra();
    let tangent = projective_plane_tangent_root(&a).pow(&a, 3);
    let normal = invert_total_class(&a, &tangent).expect("unipotent");
    thom(&a, &normal, 3).expect("normal bundle data is consistent")
}

/// Wedge over `j = 1..k` of the `CP^2_+` block suspended by `8(j - 1)`.
pub fn application_module(k: u32) -> UnstableModule {
    let block = projective_plane_algebra().into_module();
    let parts: Vec<UnstableModule> = (0..k as i64)
        .map(|j| block.suspend(8 * j).expect("non-negative shift"))
        .collect();
    wedge(&parts)
}
