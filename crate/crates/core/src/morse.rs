//! Filtered chain complexes over F2 built from generator and incidence data.
//!
//! Gradings are homological: the differential lowers grading by one and
//! strictly lowers action. Restricting to generators of action `>= kappa`
//! gives the quotient by the subcomplex of lower action, so every filter level
//! is again a chain complex. For thresholds `k_1 > ... > k_r` each level fits
//! in a short exact sequence
//!
//! ```text
//! 0 -> Q_j -> F_j -> F_(j-1) -> 0
//! ```
//!
//! where `F_j` keeps action `>= k_j` (with `F_0 = 0`) and `Q_j` keeps action
//! in `[k_j, k_(j-1))`. Its long exact sequence in homology is
//! `H_m(Q) -> H_m(F_j) -> H_m(F_(j-1)) -> H_(m-1)(Q)`. Over F2 the cohomology
//! sequence has the same dimensions with the maps transposed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Debug;

use num_traits::Num;
use serde::Serialize;
use thiserror::Error;

use crate::f2core::{check_exact, BitVec, ExactnessReport, F2Matrix, GradedMap, Subquotient};
use crate::stmod::UnstableModule;

/// Scalar type for actions. Blanket-implemented for ordered numeric types.
pub trait Action: Num + Copy + PartialOrd + Debug {}

impl<T: Num + Copy + PartialOrd + Debug> Action for T {}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generator<A> {
    pub name: String,
    pub grading: i64,
    pub action: A,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComplexViolation {
    DuplicateName {
        name: String,
    },
    UnknownGenerator {
        name: String,
    },
    /// Action is not comparable with itself (NaN).
    InvalidAction {
        name: String,
    },
    /// `grading(x) != grading(y) + 1` for an incidence `x -> y`.
    GradingMismatch {
        x: String,
        y: String,
    },
    /// `action(x) <= action(y)` for an incidence `x -> y`.
    ActionNotDecreasing {
        x: String,
        y: String,
    },
    /// The coefficient of `z` in `d(d(x))` is 1.
    BoundarySquaredNonzero {
        x: String,
        z: String,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("invalid complex: {} violation(s)", .0.len())]
    Invalid(Vec<ComplexViolation>),
    #[error("invalid thresholds: {0}")]
    Thresholds(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseComplex<A> {
    generators: Vec<Generator<A>>,
    incidence: BTreeSet<(usize, usize)>,
}

/// Validates generator and incidence data; incidence pairs are `(x, y)` with
/// coefficient 1 for `y` in `d(x)`.
pub fn build_complex<A: Action>(
    generators: Vec<Generator<A>>,
    incidence: &[(String, String)],
) -> Result<MorseComplex<A>, ComplexError> {
    let mut violations = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, g) in generators.iter().enumerate() {
        if index.insert(g.name.as_str(), i).is_some() {
            violations.push(ComplexViolation::DuplicateName {
                name: g.name.clone(),
            });
        }
        if g.action.partial_cmp(&g.action).is_none() {
            violations.push(ComplexViolation::InvalidAction {
                name: g.name.clone(),
            });
        }
    }
    let mut pairs = BTreeSet::new();
    for (x, y) in incidence {
        let (Some(&xi), Some(&yi)) = (index.get(x.as_str()), index.get(y.as_str())) else {
            for n in [x, y] {
                if !index.contains_key(n.as_str()) {
                    violations.push(ComplexViolation::UnknownGenerator { name: n.clone() });
                }
            }
            continue;
        };
        let (gx, gy) = (&generators[xi], &generators[yi]);
        if gx.grading != gy.grading + 1 {
            violations.push(ComplexViolation::GradingMismatch {
                x: x.clone(),
                y: y.clone(),
            });
        }
        if gx.action.partial_cmp(&gy.action) != Some(std::cmp::Ordering::Greater) {
            violations.push(ComplexViolation::ActionNotDecreasing {
                x: x.clone(),
                y: y.clone(),
            });
        }
        // listing a pair twice means count 2, i.e. 0 mod 2
        if !pairs.remove(&(xi, yi)) {
            pairs.insert((xi, yi));
        }
    }
    if !violations.is_empty() {
        return Err(ComplexError::Invalid(violations));
    }
    let c = MorseComplex {
        generators,
        incidence: pairs,
    };
    let squared = c.boundary_squared_witnesses();
    if squared.is_empty() {
        Ok(c)
    } else {
        Err(ComplexError::Invalid(squared))
    }
}

impl<A: Action> MorseComplex<A> {
    pub fn generators(&self) -> &[Generator<A>] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Incidences as name pairs, in generator order.
    pub fn incidence(&self) -> impl Iterator<Item = (&str, &str)> {
        self.incidence.iter().map(|&(x, y)| {
            (
                self.generators[x].name.as_str(),
                self.generators[y].name.as_str(),
            )
        })
    }

    fn boundary_squared_witnesses(&self) -> Vec<ComplexViolation> {
        let mut out: BTreeMap<(usize, usize), bool> = BTreeMap::new();
        for &(x, y) in &self.incidence {
            for &(y2, z) in self.incidence.range((y, 0)..=(y, usize::MAX)) {
                debug_assert_eq!(y2, y);
                *out.entry((x, z)).or_default() ^= true;
            }
        }
        out.into_iter()
            .filter(|(_, odd)| *odd)
            .map(|((x, z), _)| ComplexViolation::BoundarySquaredNonzero {
                x: self.generators[x].name.clone(),
                z: self.generators[z].name.clone(),
            })
            .collect()
    }

    /// Generator indices of grading `m`, in input order.
    fn chain_basis(&self, m: i64) -> Vec<usize> {
        (0..self.generators.len())
            .filter(|&i| self.generators[i].grading == m)
            .collect()
    }

    pub fn gradings(&self) -> BTreeSet<i64> {
        self.generators.iter().map(|g| g.grading).collect()
    }

    /// Dimension of the chain group in each grading.
    pub fn chain_dims(&self) -> BTreeMap<i64, usize> {
        let mut d = BTreeMap::new();
        for g in &self.generators {
            *d.entry(g.grading).or_default() += 1;
        }
        d
    }

    /// Matrix of `d: C_m -> C_(m-1)`.
    pub fn boundary_matrix(&self, m: i64) -> F2Matrix {
        let src = self.chain_basis(m);
        let tgt = self.chain_basis(m - 1);
        let pos: HashMap<usize, usize> = tgt.iter().enumerate().map(|(r, &g)| (g, r)).collect();
        let mut mat = F2Matrix::zeros(tgt.len(), src.len());
        for (c, &x) in src.iter().enumerate() {
            for &(_, y) in self.incidence.range((x, 0)..=(x, usize::MAX)) {
                mat.set(pos[&y], c, true);
            }
        }
        mat
    }

    fn subquotient(&self, m: i64) -> Subquotient {
        let dim = self.chain_basis(m).len();
        let cycles = self.boundary_matrix(m).kernel_basis();
        let boundaries = self.boundary_matrix(m + 1).image_basis();
        Subquotient::new(dim, &cycles, &boundaries)
    }

    /// Homology in every grading that has generators.
    pub fn homology(&self) -> Homology {
        let mut groups = BTreeMap::new();
        for m in self.gradings() {
            let basis = self.chain_basis(m);
            let q = self.subquotient(m);
            let reps = q
                .representatives()
                .iter()
                .map(|z| {
                    z.ones()
                        .map(|i| self.generators[basis[i]].name.clone())
                        .collect()
                })
                .collect();
            groups.insert(
                m,
                HomologyGroup {
                    dim: q.dim(),
                    representatives: reps,
                },
            );
        }
        Homology { groups }
    }

    /// Generators with action `>= kappa` and the incidences among them.
    pub fn filter(&self, kappa: A) -> MorseComplex<A> {
        self.restrict(|a| a >= kappa)
    }

    fn restrict(&self, keep: impl Fn(A) -> bool) -> MorseComplex<A> {
        let mut map = HashMap::new();
        let mut generators = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            if keep(g.action) {
                map.insert(i, generators.len());
                generators.push(g.clone());
            }
        }
        let incidence = self
            .incidence
            .iter()
            .filter_map(|(x, y)| Some((*map.get(x)?, *map.get(y)?)))
            .collect();
        MorseComplex {
            generators,
            incidence,
        }
    }

    /// The long exact sequence of every filtration level.
    pub fn les(&self, thresholds: &[A]) -> Result<LesReport<A>, ComplexError> {
        for (i, t) in thresholds.iter().enumerate() {
            if t.partial_cmp(t).is_none() {
                return Err(ComplexError::Thresholds(format!(
                    "threshold {i} is not a number"
                )));
            }
        }
        if let Some(i) = thresholds.windows(2).position(|w| w[0] <= w[1]) {
            return Err(ComplexError::Thresholds(format!(
                "thresholds must be strictly decreasing (positions {i} and {})",
                i + 1
            )));
        }
        let mut levels = Vec::new();
        for (j, &kappa) in thresholds.iter().enumerate() {
            let upper_bound = (j > 0).then(|| thresholds[j - 1]);
            let in_level = |a: A| a >= kappa && upper_bound.is_none_or(|u| a < u);
            if !self.generators.iter().any(|g| in_level(g.action)) {
                return Err(ComplexError::Thresholds(format!(
                    "level {} ([{kappa:?}, {upper_bound:?})) contains no generators",
                    j + 1
                )));
            }
            let filtered = self.filter(kappa);
            let upper = match upper_bound {
                Some(u) => self.filter(u),
                None => MorseComplex {
                    generators: Vec::new(),
                    incidence: BTreeSet::new(),
                },
            };
            let quotient = filtered.restrict(in_level);
            levels.push(LesLevel::compute(
                j + 1,
                kappa,
                &quotient,
                &filtered,
                &upper,
            ));
        }
        Ok(LesReport { levels })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub dim: usize,
    /// Cycle representatives, each a list of generator names.
    pub representatives: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Homology {
    pub groups: BTreeMap<i64, HomologyGroup>,
}

impl Homology {
    pub fn dim(&self, m: i64) -> usize {
        self.groups.get(&m).map_or(0, |g| g.dim)
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.groups
            .iter()
            .filter(|(_, g)| g.dim > 0)
            .map(|(&m, g)| (m, g.dim))
            .collect()
    }
}

/// Homology with chosen representatives, as coordinates over the full generator list.
struct LabelledHomology {
    dims: BTreeMap<i64, usize>,
    reps: BTreeMap<i64, Vec<Vec<String>>>,
    quotients: BTreeMap<i64, (Vec<String>, Subquotient)>,
}

impl LabelledHomology {
    fn of<A: Action>(c: &MorseComplex<A>) -> Self {
        let mut dims = BTreeMap::new();
        let mut reps = BTreeMap::new();
        let mut quotients = BTreeMap::new();
        for m in c.gradings() {
            let names: Vec<String> = c
                .chain_basis(m)
                .iter()
                .map(|&i| c.generators[i].name.clone())
                .collect();
            let q = c.subquotient(m);
            if q.dim() > 0 {
                dims.insert(m, q.dim());
            }
            reps.insert(
                m,
                q.representatives()
                    .iter()
                    .map(|z| z.ones().map(|i| names[i].clone()).collect())
                    .collect(),
            );
            quotients.insert(m, (names, q));
        }
        Self {
            dims,
            reps,
            quotients,
        }
    }

    /// Coordinates of a cycle given by generator names.
    fn coordinates(&self, m: i64, chain: &BTreeSet<String>) -> BitVec {
        let Some((names, q)) = self.quotients.get(&m) else {
            return BitVec::zeros(0);
        };
        let v = BitVec::from_indices(
            names.len(),
            names
                .iter()
                .enumerate()
                .filter(|(_, n)| chain.contains(*n))
                .map(|(i, _)| i),
        );
        q.coordinates(&v).expect("image of a cycle is a cycle")
    }
}

/// One filtration level: the three homologies, the maps between them and
/// exactness at each of the three positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LesLevel<A> {
    pub level: usize,
    pub threshold: A,
    pub quotient: BTreeMap<i64, usize>,
    pub filtered: BTreeMap<i64, usize>,
    pub upper: BTreeMap<i64, usize>,
    /// `H_m(Q) -> H_m(F_j)`.
    #[serde(skip)]
    pub inclusion: GradedMap,
    /// `H_m(F_j) -> H_m(F_(j-1))`.
    #[serde(skip)]
    pub projection: GradedMap,
    /// `H_m(F_(j-1)) -> H_(m-1)(Q)`.
    #[serde(skip)]
    pub connecting: GradedMap,
    pub ranks: MapRanks,
    pub exactness: LevelExactness,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapRanks {
    pub inclusion: BTreeMap<i64, usize>,
    pub projection: BTreeMap<i64, usize>,
    pub connecting: BTreeMap<i64, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelExactness {
    pub at_quotient: ExactnessReport,
    pub at_filtered: ExactnessReport,
    pub at_upper: ExactnessReport,
}

fn ranks(map: &GradedMap) -> BTreeMap<i64, usize> {
    map.blocks
        .iter()
        .map(|(&d, b)| (d, b.rank()))
        .filter(|&(_, r)| r > 0)
        .collect()
}

impl<A: Action> LesLevel<A> {
    fn compute(
        level: usize,
        threshold: A,
        q: &MorseComplex<A>,
        f: &MorseComplex<A>,
        u: &MorseComplex<A>,
    ) -> Self {
        let hq = LabelledHomology::of(q);
        let hf = LabelledHomology::of(f);
        let hu = LabelledHomology::of(u);
        // inclusion and projection keep generator names; coefficients on
        // generators absent from the target are dropped
        let induced =
            |src: &LabelledHomology, tgt: &LabelledHomology, keep: &dyn Fn(&str) -> bool| {
                let mut blocks = BTreeMap::new();
                for (&m, &dim) in &src.dims {
                    let tdim = tgt.dims.get(&m).copied().unwrap_or(0);
                    let mut mat = F2Matrix::zeros(tdim, dim);
                    if tdim > 0 {
                        for (c, rep) in src.reps[&m].iter().enumerate() {
                            let image: BTreeSet<String> =
                                rep.iter().filter(|n| keep(n)).cloned().collect();
                            for r in tgt.coordinates(m, &image).ones() {
                                mat.set(r, c, true);
                            }
                        }
                    }
                    blocks.insert(m, mat);
                }
                GradedMap::new(0, src.dims.clone(), tgt.dims.clone(), blocks)
                    .expect("block shapes from dims")
            };
        let f_names: BTreeSet<&str> = f.generators.iter().map(|g| g.name.as_str()).collect();
        let u_names: BTreeSet<&str> = u.generators.iter().map(|g| g.name.as_str()).collect();
        let inclusion = induced(&hq, &hf, &|n| f_names.contains(n));
        let projection = induced(&hf, &hu, &|n| u_names.contains(n));

        let index: HashMap<&str, usize> = f
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.as_str(), i))
            .collect();
        let mut blocks = BTreeMap::new();
        for (&m, &dim) in &hu.dims {
            let tdim = hq.dims.get(&(m - 1)).copied().unwrap_or(0);
            let mut mat = F2Matrix::zeros(tdim, dim);
            if tdim > 0 {
                for (c, rep) in hu.reps[&m].iter().enumerate() {
                    // lift to F_j, take the boundary there; it lands in Q
                    let mut boundary: BTreeSet<String> = BTreeSet::new();
                    for name in rep {
                        let x = index[name.as_str()];
                        for &(_, y) in f.incidence.range((x, 0)..=(x, usize::MAX)) {
                            let yn = f.generators[y].name.clone();
                            if !boundary.remove(&yn) {
                                boundary.insert(yn);
                            }
                        }
                    }
                    for r in hq.coordinates(m - 1, &boundary).ones() {
                        mat.set(r, c, true);
                    }
                }
            }
            blocks.insert(m, mat);
        }
        let connecting = GradedMap::new(-1, hu.dims.clone(), hq.dims.clone(), blocks)
            .expect("block shapes from dims");

        let exactness = LevelExactness {
            at_quotient: check_exact(&connecting, &inclusion).expect("matching dims"),
            at_filtered: check_exact(&inclusion, &projection).expect("matching dims"),
            at_upper: check_exact(&projection, &connecting).expect("matching dims"),
        };
        let exact =
            exactness.at_quotient.exact && exactness.at_filtered.exact && exactness.at_upper.exact;
        LesLevel {
            level,
            threshold,
            quotient: hq.dims,
            filtered: hf.dims,
            upper: hu.dims,
            ranks: MapRanks {
                inclusion: ranks(&inclusion),
                projection: ranks(&projection),
                connecting: ranks(&connecting),
            },
            inclusion,
            projection,
            connecting,
            exactness,
            exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LesReport<A> {
    pub levels: Vec<LesLevel<A>>,
}

impl<A> LesReport<A> {
    pub fn exact(&self) -> bool {
        self.levels.iter().all(|l| l.exact)
    }
}

/// A commutation failure `Sq^j phi* != phi* Sq^j` in cohomological degree `degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SqCompatFailure {
    pub map: &'static str,
    pub j: u32,
    pub degree: i64,
}

/// Checks that the cohomology maps of a level commute with user-supplied
/// Steenrod actions on `H*(Q)`, `H*(F_j)` and `H*(F_(j-1))`. Each module's
/// basis in degree `m` must be dual to the level's homology representatives
/// in grading `m`.
pub fn check_sq_compatibility<A: Action>(
    level: &LesLevel<A>,
    quotient: &UnstableModule,
    filtered: &UnstableModule,
    upper: &UnstableModule,
) -> Result<Vec<SqCompatFailure>, String> {
    for (label, module, dims) in [
        ("quotient", quotient, &level.quotient),
        ("filtered", filtered, &level.filtered),
        ("upper", upper, &level.upper),
    ] {
        let got: BTreeMap<i64, usize> = module.basis().iter().map(|(&d, n)| (d, n.len())).collect();
        if &got != dims {
            return Err(format!(
                "{label} module dimensions {got:?} differ from homology {dims:?}"
            ));
        }
    }
    let mut failures = Vec::new();
    // phi: H_d(X) -> H_(d+s)(Y); phi*: H^(d+s)(Y) -> H^d(X) is the transpose
    let maps: [(&'static str, &GradedMap, &UnstableModule, &UnstableModule); 3] = [
        ("inclusion", &level.inclusion, quotient, filtered),
        ("projection", &level.projection, filtered, upper),
        ("connecting", &level.connecting, upper, quotient),
    ];
    for (name, map, x, y) in maps {
        let span = x.span().max(y.span()).max(1) as u32;
        let degrees: BTreeSet<i64> = map.source_dims.keys().copied().collect();
        for &d in &degrees {
            for j in 1..=span {
                let e = d + map.shift;
                let lhs = x.sq(j, d).mul(&map.block(d).transpose());
                let rhs = map.block(d + j as i64).transpose().mul(&y.sq(j, e));
                match (lhs, rhs) {
                    (Ok(l), Ok(r)) if l == r => {}
                    (Ok(_), Ok(_)) => failures.push(SqCompatFailure {
                        map: name,
                        j,
                        degree: e,
                    }),
                    _ => return Err(format!("shape mismatch checking {name} at degree {d}")),
                }
            }
        }
    }
    Ok(failures)
}
