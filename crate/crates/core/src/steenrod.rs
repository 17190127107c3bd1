//! The mod 2 Steenrod algebra in the admissible (Serre-Cartan) basis.
//!
//! A word `(i1, ..., it)` stands for the composite `Sq^i1 Sq^i2 ... Sq^it`,
//! so `Sq^it` is applied first. A word is admissible when `i_j >= 2 i_{j+1}`
//! for every consecutive pair; admissible monomials form an F2 basis of the
//! algebra. Arbitrary words are brought to that basis by rewriting the
//! leftmost inadmissible pair with the Adem relation
//!
//! ```text
//! Sq^a Sq^b = sum_c binom(b - c - 1, a - 2c) Sq^(a + b - c) Sq^c    (0 < a < 2b)
//! ```
//!
//! with binomial coefficients taken mod 2.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteenrodError {
    #[error("invalid word {0:?}: exponents must be positive")]
    InvalidWord(Vec<u32>),
    #[error("cannot add elements of degrees {0} and {1}")]
    MixedDegree(u32, u32),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A composite `Sq^i1 ... Sq^it` of positive squares. The empty word is `Sq^0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SteenrodMonomial(Vec<u32>);

impl SteenrodMonomial {
    pub fn new(exponents: Vec<u32>) -> Result<Self, SteenrodError> {
        if exponents.contains(&0) {
            return Err(SteenrodError::InvalidWord(exponents));
        }
        Ok(Self(exponents))
    }

    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_admissible(&self) -> bool {
        admissible(&self.0)
    }

    /// Exponents in order of application (`Sq^it` first).
    pub fn application_order(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().rev().copied()
    }
}

impl fmt::Display for SteenrodMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "Sq^0");
        }
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "Sq^{e}")?;
        }
        Ok(())
    }
}

fn admissible(word: &[u32]) -> bool {
    word.windows(2).all(|p| p[0] >= 2 * p[1])
}

fn check_word(word: &[u32]) -> Result<(), SteenrodError> {
    if word.contains(&0) {
        Err(SteenrodError::InvalidWord(word.to_vec()))
    } else {
        Ok(())
    }
}

pub fn is_admissible(word: &[u32]) -> Result<bool, SteenrodError> {
    check_word(word)?;
    Ok(admissible(word))
}

/// `binom(n, k) mod 2` by Lucas' theorem.
pub(crate) fn binom_odd(n: u32, k: u32) -> bool {
    k <= n && (k & !n) == 0
}

/// An F2-linear combination of admissible monomials of a common degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SteenrodElement {
    degree: u32,
    terms: BTreeSet<SteenrodMonomial>,
}

impl SteenrodElement {
    pub fn zero(degree: u32) -> Self {
        Self {
            degree,
            terms: BTreeSet::new(),
        }
    }

    /// `Sq^0`, the unit.
    pub fn one() -> Self {
        Self::from_admissible(SteenrodMonomial::identity())
    }

    /// The single square `Sq^j` (`Sq^0` for `j = 0`).
    pub fn sq(j: u32) -> Self {
        if j == 0 {
            Self::one()
        } else {
            Self::from_admissible(SteenrodMonomial(vec![j]))
        }
    }

    fn from_admissible(m: SteenrodMonomial) -> Self {
        debug_assert!(m.is_admissible());
        Self {
            degree: m.degree(),
            terms: BTreeSet::from([m]),
        }
    }

    fn from_terms(degree: u32, terms: BTreeSet<SteenrodMonomial>) -> Self {
        Self { degree, terms }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().all(|m| m.0.is_empty())
    }

    /// Terms in ascending lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = &SteenrodMonomial> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &SteenrodElement) -> Result<SteenrodElement, SteenrodError> {
        let degree = match (self.is_zero(), other.is_zero()) {
            (true, _) => other.degree,
            (_, true) => self.degree,
            _ if self.degree == other.degree => self.degree,
            _ => return Err(SteenrodError::MixedDegree(self.degree, other.degree)),
        };
        let terms = self
            .terms
            .symmetric_difference(&other.terms)
            .cloned()
            .collect();
        Ok(Self::from_terms(degree, terms))
    }

    /// Composition `self ∘ other`, normalized to the admissible basis.
    pub fn multiply(&self, other: &SteenrodElement) -> SteenrodElement {
        let mut acc = BTreeSet::new();
        for a in &self.terms {
            for b in &other.terms {
                let word: Vec<u32> = a.0.iter().chain(&b.0).copied().collect();
                for m in reduce_word(&word).iter() {
                    toggle(&mut acc, m.clone());
                }
            }
        }
        Self::from_terms(self.degree + other.degree, acc)
    }
}

impl fmt::Display for SteenrodElement {
    /// Terms sorted lexicographically descending, joined by ` + `; zero is `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, m) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for SteenrodElement {
    type Err = SteenrodError;

    /// Parses a sum of (not necessarily admissible) words and reduces it.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let words = parse_sum(s)?;
        let mut degree: Option<u32> = None;
        let mut acc = SteenrodElement::zero(0);
        for w in &words {
            let d = w.iter().sum();
            if let Some(prev) = degree.filter(|&p| p != d) {
                return Err(SteenrodError::MixedDegree(prev, d));
            }
            degree = Some(d);
            acc = acc.add(&adem_reduce(w)?)?;
        }
        if let Some(d) = degree {
            acc.degree = d;
        }
        Ok(acc)
    }
}

fn toggle(set: &mut BTreeSet<SteenrodMonomial>, m: SteenrodMonomial) {
    if !set.remove(&m) {
        set.insert(m);
    }
}

/// Parses `"Sq^a Sq^b + Sq^c"`. `0` is the empty sum; `1` and `Sq^0` are the
/// unit; `Sq^0` factors inside a word are dropped. Braces `Sq^{12}` are accepted.
pub fn parse_sum(s: &str) -> Result<Vec<Vec<u32>>, SteenrodError> {
    let s = s.trim();
    if s == "0" {
        return Ok(Vec::new());
    }
    s.split('+').map(parse_word).collect()
}

fn parse_word(s: &str) -> Result<Vec<u32>, SteenrodError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(SteenrodError::Parse("empty term".into()));
    }
    if s == "1" {
        return Ok(Vec::new());
    }
    let mut word = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let Some(tail) = rest.strip_prefix("Sq") else {
            return Err(SteenrodError::Parse(format!("expected `Sq^n` at `{rest}`")));
        };
        let tail = tail.strip_prefix('^').unwrap_or(tail);
        let (digits, after) = match tail.strip_prefix('{') {
            Some(inner) => {
                let close = inner
                    .find('}')
                    .ok_or_else(|| SteenrodError::Parse(format!("unclosed brace in `{s}`")))?;
                (&inner[..close], &inner[close + 1..])
            }
            None => {
                let end = tail
                    .find(|c: char| !c.is_ascii_digit())
                    .unwrap_or(tail.len());
                (&tail[..end], &tail[end..])
            }
        };
        let e: u32 = digits
            .trim()
            .parse()
            .map_err(|_| SteenrodError::Parse(format!("bad exponent `{digits}` in `{s}`")))?;
        if e > 0 {
            word.push(e);
        }
        rest = after.trim_start_matches(|c: char| c.is_whitespace() || c == '*');
    }
    Ok(word)
}

type WordCache = RwLock<HashMap<Vec<u32>, Arc<BTreeSet<SteenrodMonomial>>>>;

fn word_cache() -> &'static WordCache {
    static CACHE: OnceLock<WordCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Reduces a word with no zero exponents. Memoized.
fn reduce_word(word: &[u32]) -> Arc<BTreeSet<SteenrodMonomial>> {
    if admissible(word) {
        return Arc::new(BTreeSet::from([SteenrodMonomial(word.to_vec())]));
    }
    if let Some(hit) = word_cache().read().expect("cache poisoned").get(word) {
        return hit.clone();
    }
    let i = word
        .windows(2)
        .position(|p| p[0] < 2 * p[1])
        .expect("inadmissible word has an inadmissible pair");
    let (a, b) = (word[i], word[i + 1]);
    let mut acc = BTreeSet::new();
    for c in 0..=a / 2 {
        if !binom_odd(b - c - 1, a - 2 * c) {
            continue;
        }
        let mut next = Vec::with_capacity(word.len());
        next.extend_from_slice(&word[..i]);
        next.push(a + b - c);
        if c > 0 {
            next.push(c);
        }
        next.extend_from_slice(&word[i + 2..]);
        for m in reduce_word(&next).iter() {
            toggle(&mut acc, m.clone());
        }
    }
    let acc = Arc::new(acc);
    word_cache()
        .write()
        .expect("cache poisoned")
        .entry(word.to_vec())
        .or_insert_with(|| acc.clone());
    acc
}

/// The admissible-basis representative of the composite named by `word`.
pub fn adem_reduce(word: &[u32]) -> Result<SteenrodElement, SteenrodError> {
    check_word(word)?;
    let degree = word.iter().sum();
    Ok(SteenrodElement::from_terms(
        degree,
        (*reduce_word(word)).clone(),
    ))
}

pub fn multiply(a: &SteenrodElement, b: &SteenrodElement) -> SteenrodElement {
    a.multiply(b)
}

pub fn degree(e: &SteenrodElement) -> u32 {
    e.degree()
}

type ConjugateCache = RwLock<Vec<Arc<SteenrodElement>>>;

fn conjugate_cache() -> &'static ConjugateCache {
    static CACHE: OnceLock<ConjugateCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Arc::new(SteenrodElement::one())]))
}

/// The antipode `c(Sq^j)`, from `c(Sq^j) = sum_{l<j} c(Sq^l) Sq^(j-l)`.
pub fn conjugate(j: u32) -> Arc<SteenrodElement> {
    let j = j as usize;
    if let Some(hit) = conjugate_cache().read().expect("cache poisoned").get(j) {
        return hit.clone();
    }
    let mut known: Vec<Arc<SteenrodElement>> =
        conjugate_cache().read().expect("cache poisoned").clone();
    while known.len() <= j {
        let next = known.len() as u32;
        let mut acc = SteenrodElement::zero(next);
        for (l, c) in known.iter().enumerate() {
            let term = c.multiply(&SteenrodElement::sq(next - l as u32));
            acc = acc.add(&term).expect("terms share degree");
        }
        known.push(Arc::new(acc));
    }
    let mut cache = conjugate_cache().write().expect("cache poisoned");
    if cache.len() < known.len() {
        *cache = known.clone();
    }
    known[j].clone()
}
