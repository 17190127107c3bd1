//! Lower bounds on intersection counts with replayable certificates.
//!
//! Searches run over basis classes. Products, cap actions and Steenrod squares
//! are linear in each argument, so a nonzero value on some combination of
//! classes is already nonzero on one of its basis terms. For `n >= 2` a
//! certificate uses each start degree at most once, so the exhaustive flag of
//! [`steenrod_bound`] cannot improve the bound; with `n = 1` it also counts
//! dependent classes of one degree separately.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::conley;
use crate::f2core::BitVec;
use crate::stmod::{BasisPair, Class, GradedAlgebra, ModuleError, UnstableModule};

/// Degrees with at most this many basis classes are enumerated exhaustively.
pub const EXHAUSTIVE_DIM_LIMIT: usize = 12;

/// `1 + t` for the largest `t` with a nonzero product of `t` positive-degree
/// basis classes; `factors` names one such product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CupLength {
    pub length: usize,
    pub factors: Vec<String>,
}

fn positive_basis(m: &UnstableModule) -> Vec<(i64, usize)> {
    m.basis()
        .iter()
        .filter(|(&d, _)| d > 0)
        .flat_map(|(&d, names)| (0..names.len()).map(move |i| (d, i)))
        .collect()
}

fn name_of(m: &UnstableModule, x: (i64, usize)) -> String {
    m.names(x.0)[x.1].clone()
}

/// Nonzero iterated products reachable from `seeds` by multiplying with
/// `factors` on the right. Returns the longest chain of factors found.
fn longest_product<F>(
    seeds: Vec<(Class, Vec<(i64, usize)>)>,
    factors: &[(i64, usize)],
    step: F,
) -> (usize, Vec<(i64, usize)>)
where
    F: Fn(&Class, (i64, usize)) -> Class,
{
    let mut frontier: BTreeMap<Class, Vec<(i64, usize)>> = BTreeMap::new();
    for (c, w) in seeds {
        if !c.is_zero() {
            frontier.entry(c).or_insert(w);
        }
    }
    let mut best = (0, Vec::new());
    let mut t = 0;
    while let Some((_, w)) = frontier.iter().next() {
        best = (t, w.clone());
        let mut next: BTreeMap<Class, Vec<(i64, usize)>> = BTreeMap::new();
        for (c, w) in &frontier {
            for &f in factors {
                let p = step(c, f);
                if !p.is_zero() {
                    next.entry(p).or_insert_with(|| {
                        let mut w = w.clone();
                        w.push(f);
                        w
                    });
                }
            }
        }
        frontier = next;
        t += 1;
    }
    best
}

pub fn cup_length(a: &GradedAlgebra) -> CupLength {
    let m = a.module();
    let pos = positive_basis(m);
    let seeds = pos
        .iter()
        .map(|&x| (m.basis_class(x.0, x.1), vec![x]))
        .collect();
    let (t, w) = longest_product(seeds, &pos, |c, f| a.multiply(c, &m.basis_class(f.0, f.1)));
    CupLength {
        // no nonzero positive-degree class at all gives 1
        length: if w.is_empty() { 1 } else { t + 2 },
        factors: w.into_iter().map(|x| name_of(m, x)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CapViolation {
    UnitNotIdentity { v: String },
    NonAssociative { v: String, a: String, b: String },
}

/// A right action `V x A -> V` of a graded algebra on a graded space, with
/// `deg(v * a) = deg v + deg a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapAction {
    algebra: GradedAlgebra,
    space: UnstableModule,
    action: BTreeMap<BasisPair, BitVec>,
}

impl CapAction {
    /// Starts with the unit acting as the identity and nothing else.
    pub fn new(algebra: GradedAlgebra, space: UnstableModule) -> Self {
        let unit = algebra
            .module()
            .find(algebra.unit_name())
            .expect("unit is a basis element");
        let mut action = BTreeMap::new();
        for (&d, names) in space.basis() {
            for i in 0..names.len() {
                action.insert(((d, i), unit), BitVec::unit(names.len(), i));
            }
        }
        Self {
            algebra,
            space,
            action,
        }
    }

    /// The algebra acting on itself by multiplication.
    pub fn regular(algebra: GradedAlgebra) -> Self {
        let space = algebra.module().clone();
        let mut c = Self::new(algebra, space);
        let m = c.algebra.module().clone();
        for (&dv, nv) in m.basis() {
            for v in 0..nv.len() {
                for (&da, na) in m.basis() {
                    for a in 0..na.len() {
                        let p = c.algebra.multiply_basis((dv, v), (da, a));
                        c.set_action((dv, v), (da, a), p.vector);
                    }
                }
            }
        }
        c
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn space(&self) -> &UnstableModule {
        &self.space
    }

    /// Sets `v * a` to contain `w`.
    pub fn add_action(&mut self, v: &str, a: &str, w: &str) -> Result<(), ModuleError> {
        let (vd, vi) = self
            .space
            .find(v)
            .ok_or_else(|| ModuleError::UnknownName(v.into()))?;
        let (ad, ai) = self
            .algebra
            .module()
            .find(a)
            .ok_or_else(|| ModuleError::UnknownName(a.into()))?;
        let (wd, wi) = self
            .space
            .find(w)
            .ok_or_else(|| ModuleError::UnknownName(w.into()))?;
        if wd != vd + ad {
            return Err(ModuleError::DegreeOutOfRange {
                degree: wd,
                lo: vd + ad,
                hi: vd + ad,
            });
        }
        let dim = self.space.dim(wd);
        self.action
            .entry(((vd, vi), (ad, ai)))
            .or_insert_with(|| BitVec::zeros(dim))
            .set(wi, true);
        Ok(())
    }

    pub fn set_action(&mut self, v: (i64, usize), a: (i64, usize), value: BitVec) {
        if value.is_zero() {
            self.action.remove(&(v, a));
        } else {
            self.action.insert((v, a), value);
        }
    }

    /// Nonzero `v * a` on basis pairs.
    pub fn entries(&self) -> impl Iterator<Item = ((i64, usize), (i64, usize), &BitVec)> {
        self.action
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(&(v, a), w)| (v, a, w))
    }

    pub fn act_basis(&self, v: (i64, usize), a: (i64, usize)) -> Class {
        let d = v.0 + a.0;
        let dim = self.space.dim(d);
        let w = self
            .action
            .get(&(v, a))
            .filter(|w| w.len() == dim)
            .cloned()
            .unwrap_or_else(|| BitVec::zeros(dim));
        Class::new(d, w)
    }

    pub fn act(&self, v: &Class, a: &Class) -> Class {
        let d = v.degree + a.degree;
        let mut acc = BitVec::zeros(self.space.dim(d));
        for i in v.vector.ones() {
            for j in a.vector.ones() {
                acc.xor_assign(&self.act_basis((v.degree, i), (a.degree, j)).vector);
            }
        }
        Class::new(d, acc)
    }

    /// Unit and associativity checks on all basis elements.
    pub fn validate(&self) -> Vec<CapViolation> {
        let mut out = Vec::new();
        let a = self.algebra.module();
        let unit = self.algebra.unit_class();
        let space_basis: Vec<(i64, usize)> = self
            .space
            .basis()
            .iter()
            .flat_map(|(&d, n)| (0..n.len()).map(move |i| (d, i)))
            .collect();
        let alg_basis: Vec<(i64, usize)> = a
            .basis()
            .iter()
            .flat_map(|(&d, n)| (0..n.len()).map(move |i| (d, i)))
            .collect();
        for &v in &space_basis {
            let vc = self.space.basis_class(v.0, v.1);
            if self.act(&vc, &unit) != vc {
                out.push(CapViolation::UnitNotIdentity {
                    v: name_of(&self.space, v),
                });
            }
            for &x in &alg_basis {
                let xc = a.basis_class(x.0, x.1);
                let vx = self.act(&vc, &xc);
                for &y in &alg_basis {
                    let yc = a.basis_class(y.0, y.1);
                    if self.act(&vx, &yc) != self.act(&vc, &self.algebra.multiply(&xc, &yc)) {
                        out.push(CapViolation::NonAssociative {
                            v: name_of(&self.space, v),
                            a: name_of(a, x),
                            b: name_of(a, y),
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapWitness {
    pub beta: String,
    pub alphas: Vec<String>,
}

/// `k` is `None` when `V = 0`; then `bound` is 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapLength {
    pub k: Option<usize>,
    pub bound: usize,
    pub witness: Option<CapWitness>,
}

pub fn cap_length(c: &CapAction) -> CapLength {
    let space = c.space();
    let a = c.algebra().module();
    let seeds: Vec<(Class, Vec<(i64, usize)>)> = space
        .basis()
        .iter()
        .flat_map(|(&d, n)| (0..n.len()).map(move |i| (d, i)))
        .map(|v| (space.basis_class(v.0, v.1), vec![v]))
        .collect();
    if seeds.is_empty() {
        return CapLength {
            k: None,
            bound: 0,
            witness: None,
        };
    }
    let pos = positive_basis(a);
    let (k, chain) = longest_product(seeds, &pos, |x, f| c.act(x, &a.basis_class(f.0, f.1)));
    CapLength {
        k: Some(k),
        bound: k + 1,
        witness: Some(CapWitness {
            beta: name_of(space, chain[0]),
            alphas: chain[1..].iter().map(|&x| name_of(a, x)).collect(),
        }),
    }
}

/// Total dimension.
pub fn rank_bound(m: &UnstableModule) -> usize {
    m.total_dim()
}

/// A class followed by squares applied in order: `Sq^(r_k) ... Sq^(r_1) start`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SqChain {
    pub start: Class,
    pub exponents: Vec<u32>,
}

impl SqChain {
    pub fn k(&self) -> usize {
        self.exponents.len()
    }

    pub fn start_degree(&self) -> i64 {
        self.start.degree
    }

    pub fn end_degree(&self) -> i64 {
        self.start.degree + self.exponents.iter().map(|&r| r as i64).sum::<i64>()
    }

    fn key(&self) -> (i64, &[u32], Vec<usize>) {
        (
            self.start.degree,
            &self.exponents,
            self.start.vector.ones().collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCertificate {
    pub n: u32,
    pub allowed: BTreeSet<u32>,
    pub chains: Vec<SqChain>,
    pub bound: usize,
}

/// Which exponents a search may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Allowed {
    /// Squares forced to vanish on every Conley index in dimension `n`.
    Auto,
    Set(BTreeSet<u32>),
}

impl Allowed {
    pub fn resolve(&self, m: &UnstableModule, n: u32) -> BTreeSet<u32> {
        match self {
            Allowed::Auto => conley::admissible_squares(n, m.span().max(0) as u32),
            Allowed::Set(s) => s.iter().copied().filter(|&r| r > 0).collect(),
        }
    }
}

fn start_classes(m: &UnstableModule, exhaustive: bool) -> Vec<Class> {
    let mut out = Vec::new();
    for d in m.degrees() {
        let dim = m.dim(d);
        if exhaustive && dim <= EXHAUSTIVE_DIM_LIMIT {
            out.extend((1u64..1 << dim).map(|mask| Class::new(d, BitVec::from_mask(dim, mask))));
        } else {
            out.extend((0..dim).map(|i| m.basis_class(d, i)));
        }
    }
    out
}

/// Every chain with nonzero image, depth first from each start class.
pub fn enumerate_chains(
    m: &UnstableModule,
    allowed: &BTreeSet<u32>,
    exhaustive: bool,
) -> Vec<SqChain> {
    fn go(
        m: &UnstableModule,
        allowed: &BTreeSet<u32>,
        start: &Class,
        cur: &Class,
        exps: &mut Vec<u32>,
        out: &mut Vec<SqChain>,
    ) {
        out.push(SqChain {
            start: start.clone(),
            exponents: exps.clone(),
        });
        for &r in allowed {
            if cur.degree + r as i64 > m.hi() {
                break;
            }
            let next = m.apply_sq(r, cur);
            if !next.is_zero() {
                exps.push(r);
                go(m, allowed, start, &next, exps, out);
                exps.pop();
            }
        }
    }
    let mut out = Vec::new();
    for s in start_classes(m, exhaustive) {
        go(m, allowed, &s, &s, &mut Vec::new(), &mut out);
    }
    out.sort_by(|a, b| a.key().cmp(&b.key()));
    out
}

/// Maximizes `l + sum k_s` over chain sequences whose consecutive members
/// satisfy `start_s >= end_(s-1) + n - 1`. Among optimal certificates the one
/// with the lexicographically smallest sequence of chain keys is returned.
///
/// Panics if `n == 0`.
pub fn steenrod_bound(
    m: &UnstableModule,
    n: u32,
    allowed: &Allowed,
    exhaustive: bool,
) -> BoundCertificate {
    assert!(n >= 1, "gap parameter must be positive");
    let allowed = allowed.resolve(m, n);
    let chains = enumerate_chains(m, &allowed, exhaustive);
    let gap = n as i64 - 1;
    let starts: Vec<i64> = chains.iter().map(SqChain::start_degree).collect();
    // chains are sorted by start degree, so successors of i form a suffix
    let successor = |i: usize| {
        let threshold = chains[i].end_degree() + gap;
        starts.partition_point(|&s| s < threshold).max(i + 1)
    };
    let len = chains.len();
    let mut best = vec![0usize; len];
    let mut suffix = vec![0usize; len + 1];
    for i in (0..len).rev() {
        best[i] = 1 + chains[i].k() + suffix[successor(i)];
        suffix[i] = suffix[i + 1].max(best[i]);
    }
    let mut picked = Vec::new();
    let mut from = 0;
    let mut target = suffix[0];
    while target > 0 {
        let i = (from..len)
            .find(|&i| best[i] == target)
            .expect("suffix maximum is attained");
        picked.push(chains[i].clone());
        target -= 1 + chains[i].k();
        from = successor(i);
    }
    BoundCertificate {
        n,
        allowed,
        bound: suffix[0],
        chains: picked,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateFailure {
    NonPositiveGap,
    BadStart {
        chain: usize,
    },
    ExponentNotAllowed {
        chain: usize,
        exponent: u32,
    },
    ZeroImage {
        chain: usize,
        step: usize,
    },
    DuplicateChain {
        chain: usize,
    },
    Gap {
        earlier: usize,
        later: usize,
        gap: i64,
    },
    BoundMismatch {
        claimed: usize,
        actual: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub failures: Vec<CertificateFailure>,
}

/// Replays a certificate from the module's matrices alone. Exponents are
/// checked against the certificate's own `allowed` set.
pub fn verify_certificate(m: &UnstableModule, n: u32, cert: &BoundCertificate) -> VerifyReport {
    let mut failures = Vec::new();
    if n == 0 || cert.n != n {
        failures.push(CertificateFailure::NonPositiveGap);
    }
    for (s, chain) in cert.chains.iter().enumerate() {
        let mut d = chain.start.degree;
        let mut v = chain.start.vector.clone();
        if v.len() != m.dim(d) || v.is_zero() {
            failures.push(CertificateFailure::BadStart { chain: s });
            continue;
        }
        for (step, &r) in chain.exponents.iter().enumerate() {
            if !cert.allowed.contains(&r) || r == 0 {
                failures.push(CertificateFailure::ExponentNotAllowed {
                    chain: s,
                    exponent: r,
                });
            }
            let mat = m.sq(r, d);
            let mut w = BitVec::zeros(mat.rows());
            for (row, col) in mat.entries() {
                if v.get(col) {
                    w.flip(row);
                }
            }
            d += r as i64;
            v = w;
            if v.is_zero() {
                failures.push(CertificateFailure::ZeroImage { chain: s, step });
                break;
            }
        }
        if cert.chains[..s].contains(chain) {
            failures.push(CertificateFailure::DuplicateChain { chain: s });
        }
    }
    let need = n as i64 - 1;
    for later in 0..cert.chains.len() {
        for earlier in 0..later {
            let start = cert.chains[later].start.degree;
            let end = cert.chains[earlier].start.degree
                + cert.chains[earlier]
                    .exponents
                    .iter()
                    .map(|&r| r as i64)
                    .sum::<i64>();
            if start - end < need {
                failures.push(CertificateFailure::Gap {
                    earlier,
                    later,
                    gap: start - end,
                });
            }
        }
    }
    let actual = cert.chains.len() + cert.chains.iter().map(|c| c.exponents.len()).sum::<usize>();
    if actual != cert.bound {
        failures.push(CertificateFailure::BoundMismatch {
            claimed: cert.bound,
            actual,
        });
    }
    VerifyReport {
        valid: failures.is_empty(),
        failures,
    }
}
