//! Deciding when `Sq^j` must vanish on `H^m` of the Conley index of an
//! isolated critical point on an oriented `n`-manifold.
//!
//! Facts are derived as the least fixpoint of three rules:
//!
//! * **R1** (support): reduced cohomology lives in `[1, n-1]` (or `{0}` / `{n}`
//!   at a minimum / maximum), so `Sq^j` on `H^m` vanishes when source or
//!   target degree falls outside.
//! * **R2** (co-H space): `Sq^j` vanishes on `H^j`, and on `H^m` for `j > m`
//!   by instability.
//! * **R3** (duality): `Sq^j` on `H^m` vanishes iff `c(Sq^j)` vanishes on
//!   `H^(n-m-j)` of the index of the reversed flow. It does if every admissible
//!   monomial of `c(Sq^j)` has some factor acting on an already-forced
//!   `(degree, square)` pair.
//!
//! `NotForced` only means the rules do not derive vanishing.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::steenrod::conjugate;
use crate::stmod::UnstableModule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremal {
    None,
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConleyProfile {
    pub n: u32,
    pub extremal: Extremal,
}

impl ConleyProfile {
    pub fn new(n: u32) -> Self {
        Self {
            n,
            extremal: Extremal::None,
        }
    }
}

/// Degrees that can carry reduced cohomology, as an inclusive interval.
pub fn support_bounds(p: &ConleyProfile) -> (i64, i64) {
    let n = p.n as i64;
    match p.extremal {
        Extremal::None => (1, n - 1),
        Extremal::Minimum => (0, 0),
        Extremal::Maximum => (n, n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Forced,
    NotForced,
}

/// A `(degree, square)` pair cited as already forced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FactRef {
    pub m: i64,
    pub j: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialCitation {
    /// Admissible word `Sq^i1 ... Sq^it` of `c(Sq^j)`; `Sq^it` acts first.
    pub word: Vec<u32>,
    pub cites: FactRef,
}

/// One derived fact and the rule that derived it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum TraceStep {
    R1 {
        m: i64,
        j: u32,
        support: (i64, i64),
    },
    R2 {
        m: i64,
        j: u32,
    },
    R3 {
        m: i64,
        j: u32,
        dual_degree: i64,
        conjugate: String,
        monomials: Vec<MonomialCitation>,
    },
}

impl TraceStep {
    pub fn fact(&self) -> FactRef {
        match *self {
            TraceStep::R1 { m, j, .. } | TraceStep::R2 { m, j } | TraceStep::R3 { m, j, .. } => {
                FactRef { m, j }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcingFact {
    pub n: u32,
    pub m: i64,
    pub j: u32,
    pub status: Status,
    /// Derivations in dependency order; the last step derives `(m, j)`.
    pub trace: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Derivation {
    Support,
    CoH,
    Duality {
        dual_degree: i64,
        cites: Vec<(Vec<u32>, FactRef)>,
    },
}

/// The forced facts for one profile and all squares up to `jmax`.
#[derive(Debug, Clone)]
pub struct FactTable {
    profile: ConleyProfile,
    jmax: u32,
    facts: BTreeMap<FactRef, Derivation>,
}

impl FactTable {
    pub fn build(profile: ConleyProfile, jmax: u32) -> Self {
        let mut t = Self {
            profile,
            jmax,
            facts: BTreeMap::new(),
        };
        let n = profile.n as i64;
        let conjugates: Vec<_> = (0..=jmax).map(conjugate).collect();
        loop {
            let mut changed = false;
            for j in 1..=jmax {
                for m in 0..=n {
                    let key = FactRef { m, j };
                    if t.facts.contains_key(&key) {
                        continue;
                    }
                    if let Some(d) = t.derive(m, j, &conjugates[j as usize]) {
                        t.facts.insert(key, d);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        t
    }

    pub fn profile(&self) -> ConleyProfile {
        self.profile
    }

    pub fn jmax(&self) -> u32 {
        self.jmax
    }

    fn outside_support(&self, m: i64, j: u32) -> bool {
        let (lo, hi) = support_bounds(&self.profile);
        m < lo || m > hi || m + j as i64 > hi
    }

    fn derive(
        &self,
        m: i64,
        j: u32,
        conj: &crate::steenrod::SteenrodElement,
    ) -> Option<Derivation> {
        if self.outside_support(m, j) {
            return Some(Derivation::Support);
        }
        if self.profile.extremal != Extremal::None {
            return None;
        }
        if j as i64 >= m {
            return Some(Derivation::CoH);
        }
        let dual_degree = self.profile.n as i64 - m - j as i64;
        let mut cites = Vec::new();
        for mono in conj.terms() {
            let mut d = dual_degree;
            let mut hit = None;
            for a in mono.application_order() {
                if self.is_forced(d, a) {
                    hit = Some(FactRef { m: d, j: a });
                    break;
                }
                d += a as i64;
            }
            cites.push((mono.exponents().to_vec(), hit?));
        }
        (!cites.is_empty()).then_some(Derivation::Duality { dual_degree, cites })
    }

    /// Whether `Sq^j` on `H^m` is forced (any `m`; `j` up to `jmax`).
    pub fn is_forced(&self, m: i64, j: u32) -> bool {
        if j == 0 {
            return false;
        }
        self.outside_support(m, j) || self.facts.contains_key(&FactRef { m, j })
    }

    fn step(&self, f: FactRef) -> TraceStep {
        if self.outside_support(f.m, f.j) {
            return TraceStep::R1 {
                m: f.m,
                j: f.j,
                support: support_bounds(&self.profile),
            };
        }
        match &self.facts[&f] {
            Derivation::Support => unreachable!("support facts are caught above"),
            Derivation::CoH => TraceStep::R2 { m: f.m, j: f.j },
            Derivation::Duality { dual_degree, cites } => TraceStep::R3 {
                m: f.m,
                j: f.j,
                dual_degree: *dual_degree,
                conjugate: conjugate(f.j).to_string(),
                monomials: cites
                    .iter()
                    .map(|(w, c)| MonomialCitation {
                        word: w.clone(),
                        cites: *c,
                    })
                    .collect(),
            },
        }
    }

    fn collect(&self, f: FactRef, seen: &mut BTreeSet<FactRef>, out: &mut Vec<TraceStep>) {
        if !seen.insert(f) {
            return;
        }
        if let Some(Derivation::Duality { cites, .. }) = self.facts.get(&f) {
            if !self.outside_support(f.m, f.j) {
                for (_, c) in cites {
                    self.collect(*c, seen, out);
                }
            }
        }
        out.push(self.step(f));
    }

    pub fn fact(&self, m: i64, j: u32) -> ForcingFact {
        assert!(
            j <= self.jmax,
            "square {j} beyond table bound {}",
            self.jmax
        );
        let mut trace = Vec::new();
        let status = if self.is_forced(m, j) {
            self.collect(FactRef { m, j }, &mut BTreeSet::new(), &mut trace);
            Status::Forced
        } else {
            Status::NotForced
        };
        ForcingFact {
            n: self.profile.n,
            m,
            j,
            status,
            trace,
        }
    }
}

type TableCache = RwLock<HashMap<ConleyProfile, Arc<FactTable>>>;

/// A shared table covering at least `jmax`.
pub fn fact_table(profile: ConleyProfile, jmax: u32) -> Arc<FactTable> {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().expect("cache poisoned").get(&profile) {
        if t.jmax >= jmax {
            return t.clone();
        }
    }
    let table = Arc::new(FactTable::build(profile, jmax));
    let mut w = cache.write().expect("cache poisoned");
    let entry = w.entry(profile).or_insert_with(|| table.clone());
    if entry.jmax < table.jmax {
        *entry = table.clone();
    }
    entry.clone()
}

/// Forcing status of `Sq^j` on `H^m` at a non-extremal isolated critical point.
pub fn must_vanish(n: u32, m: i64, j: u32) -> ForcingFact {
    must_vanish_profile(ConleyProfile::new(n), m, j)
}

pub fn must_vanish_profile(profile: ConleyProfile, m: i64, j: u32) -> ForcingFact {
    fact_table(profile, j.max(1)).fact(m, j)
}

/// The squares `j <= jmax` forced on every degree: those usable in the
/// intersection bound for Lagrangians of dimension `n`.
pub fn admissible_squares(n: u32, jmax: u32) -> BTreeSet<u32> {
    let table = fact_table(ConleyProfile::new(n), jmax.max(1));
    (1..=jmax)
        .filter(|&j| (0..=n as i64).all(|m| table.is_forced(m, j)))
        .collect()
}

/// Re-derives a trace from scratch using only the three rules, without the
/// engine's table. Returns the first problem found.
pub fn replay(profile: ConleyProfile, fact: &ForcingFact) -> Result<(), String> {
    let n = profile.n as i64;
    let (lo, hi) = support_bounds(&profile);
    let by_support = |m: i64, j: u32| m < lo || m > hi || m + j as i64 > hi;
    if fact.status == Status::NotForced {
        return if fact.trace.is_empty() {
            Ok(())
        } else {
            Err("not-forced fact carries a trace".into())
        };
    }
    let mut established: BTreeSet<FactRef> = BTreeSet::new();
    for step in &fact.trace {
        match step {
            TraceStep::R1 { m, j, .. } => {
                if !by_support(*m, *j) {
                    return Err(format!("R1 cited for ({m}, {j}) inside the support"));
                }
            }
            TraceStep::R2 { m, j } => {
                if profile.extremal != Extremal::None || (*j as i64) < *m {
                    return Err(format!("R2 does not apply to ({m}, {j})"));
                }
            }
            TraceStep::R3 {
                m,
                j,
                dual_degree,
                monomials,
                ..
            } => {
                if profile.extremal != Extremal::None {
                    return Err("R3 used on an extremal profile".into());
                }
                if *dual_degree != n - m - *j as i64 {
                    return Err(format!("wrong dual degree for ({m}, {j})"));
                }
                let expected: BTreeSet<Vec<u32>> = conjugate(*j)
                    .terms()
                    .map(|t| t.exponents().to_vec())
                    .collect();
                let given: BTreeSet<Vec<u32>> = monomials.iter().map(|c| c.word.clone()).collect();
                if expected != given || monomials.len() != given.len() {
                    return Err(format!(
                        "monomials of c(Sq^{j}) do not match its admissible expansion"
                    ));
                }
                for c in monomials {
                    let mut d = *dual_degree;
                    let mut at_step = false;
                    for a in c.word.iter().rev() {
                        if (FactRef { m: d, j: *a }) == c.cites {
                            at_step = true;
                            break;
                        }
                        d += *a as i64;
                    }
                    if !at_step {
                        return Err(format!(
                            "citation {:?} is not a step of {:?}",
                            c.cites, c.word
                        ));
                    }
                    if !established.contains(&c.cites) && !by_support(c.cites.m, c.cites.j) {
                        return Err(format!("citation {:?} not established earlier", c.cites));
                    }
                }
            }
        }
        established.insert(step.fact());
    }
    match fact.trace.last() {
        Some(s)
            if s.fact()
                == (FactRef {
                    m: fact.m,
                    j: fact.j,
                }) =>
        {
            Ok(())
        }
        _ => Err("trace does not end with the claimed fact".into()),
    }
}

/// A way a module cannot be the cohomology of a single-critical-point Conley index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConleyConflict {
    /// Classes in a degree outside the support interval.
    Support { degree: i64 },
    /// A nonzero `Sq^j` on `H^m` that the rules force to vanish.
    ForcedSquare { m: i64, j: u32 },
}

/// Checks a module declared as the cohomology of the Conley index of an
/// isolated critical point against every derivable vanishing fact.
pub fn conley_conflicts(module: &UnstableModule, profile: ConleyProfile) -> Vec<ConleyConflict> {
    let (lo, hi) = support_bounds(&profile);
    let mut out: Vec<ConleyConflict> = module
        .degrees()
        .filter(|&d| d < lo || d > hi)
        .map(|degree| ConleyConflict::Support { degree })
        .collect();
    let blocks: Vec<(u32, i64)> = module
        .sq_blocks()
        .filter(|(j, _, _)| *j > 0)
        .map(|(j, m, _)| (j, m))
        .collect();
    if let Some(jmax) = blocks.iter().map(|b| b.0).max() {
        let table = fact_table(profile, jmax);
        for (j, m) in blocks {
            if table.is_forced(m, j) {
                out.push(ConleyConflict::ForcedSquare { m, j });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_examples() {
        assert_eq!(support_bounds(&ConleyProfile::new(7)), (1, 6));
        let min = ConleyProfile {
            n: 5,
            extremal: Extremal::Minimum,
        };
        let max = ConleyProfile {
            n: 5,
            extremal: Extremal::Maximum,
        };
        assert_eq!(support_bounds(&min), (0, 0));
        assert_eq!(support_bounds(&max), (5, 5));
    }

    #[test]
    fn dimension_seven_squares_two() {
        for m in -2..=9 {
            let f = must_vanish(7, m, 2);
            assert_eq!(f.status, Status::Forced, "m={m}");
            replay(ConleyProfile::new(7), &f).unwrap();
        }
        let f = must_vanish(7, 3, 2);
        assert!(matches!(
            f.trace.last(),
            Some(TraceStep::R3 { conjugate, dual_degree: 2, .. }) if conjugate == "Sq^2"
        ));
        assert_eq!(f.trace[0], TraceStep::R2 { m: 2, j: 2 });
    }

    #[test]
    fn dimension_eight() {
        assert_eq!(must_vanish(8, 3, 2).status, Status::NotForced);
        assert!(must_vanish(8, 3, 2).trace.is_empty());
        for (m, j) in [(2, 2), (4, 2), (5, 2), (3, 3), (4, 3)] {
            let f = must_vanish(8, m, j);
            assert_eq!(f.status, Status::Forced, "({m}, {j})");
            replay(ConleyProfile::new(8), &f).unwrap();
        }
    }

    #[test]
    fn admissible_sets() {
        let seven = admissible_squares(7, 6);
        assert_eq!(seven, (2..=6).collect());
        let eight = admissible_squares(8, 7);
        assert!((4..=7).all(|j| eight.contains(&j)));
        assert!(!eight.contains(&2));
        for n in 5..=12 {
            assert!(!admissible_squares(n, 3).contains(&1), "n={n}");
        }
    }

    #[test]
    fn square_one_in_dimension_four_is_forced() {
        // H^1 -> H^2 by co-H; H^2 -> H^3 dualizes to Sq^1 on H^1; H^3 -> H^4 leaves the support
        assert!(admissible_squares(4, 1).contains(&1));
    }

    #[test]
    fn extremal_profiles_force_everything() {
        for ext in [Extremal::Minimum, Extremal::Maximum] {
            let p = ConleyProfile {
                n: 6,
                extremal: ext,
            };
            for m in -1..=7 {
                for j in 1..=4 {
                    let f = must_vanish_profile(p, m, j);
                    assert_eq!(f.status, Status::Forced);
                    replay(p, &f).unwrap();
                }
            }
        }
    }

    #[test]
    fn replay_rejects_tampered_traces() {
        let p = ConleyProfile::new(7);
        let mut f = must_vanish(7, 3, 2);
        f.trace.remove(0);
        assert!(replay(p, &f).is_err());
        let mut g = must_vanish(7, 3, 2);
        if let Some(TraceStep::R3 { dual_degree, .. }) = g.trace.last_mut() {
            *dual_degree = 1;
        }
        assert!(replay(p, &g).is_err());
        let bogus = ForcingFact {
            n: 8,
            m: 3,
            j: 2,
            status: Status::Forced,
            trace: vec![TraceStep::R2 { m: 3, j: 2 }],
        };
        assert!(replay(ConleyProfile::new(8), &bogus).is_err());
    }

    #[test]
    fn thom_module_cannot_be_a_conley_index() {
        let t = crate::stmod::projective_plane_normal_thom();
        let conflicts = conley_conflicts(&t, ConleyProfile::new(7));
        assert!(conflicts.contains(&ConleyConflict::ForcedSquare { m: 3, j: 2 }));
        assert!(conflicts.contains(&ConleyConflict::Support { degree: 7 }));
        // no suspension escapes: Sq^2 is forced on every degree when n = 7
        for d in 0..6 {
            let s = t.suspend(d).unwrap();
            let c = conley_conflicts(&s, ConleyProfile::new(7));
            assert!(
                c.contains(&ConleyConflict::ForcedSquare { m: 3 + d, j: 2 }),
                "d={d}"
            );
        }
    }
}
