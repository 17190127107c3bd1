//! Independent model of the Steenrod action on F2[x1, ..., x6] with |x_i| = 1.
//!
//! Uses only `Sq(x) = x + x^2` and the Cartan formula, so
//! `Sq^i(x1^e1 ... x6^e6) = sum over i1+...+i6 = i of prod binom(e_l, i_l) x_l^(e_l + i_l)`.
//! Nothing here touches the Adem relations.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

pub const VARS: usize = 6;

/// Exponent vector packed 8 bits per variable.
pub type Mono = u64;
pub type Poly = BTreeSet<Mono>;

pub fn exps(m: Mono) -> [u32; VARS] {
    let mut e = [0; VARS];
    for (l, slot) in e.iter_mut().enumerate() {
        *slot = ((m >> (8 * l)) & 0xff) as u32;
    }
    e
}

pub fn pack(e: &[u32; VARS]) -> Mono {
    e.iter().enumerate().fold(0, |acc, (l, &x)| {
        assert!(x < 256);
        acc | ((x as u64) << (8 * l))
    })
}

fn binom_odd(n: u32, k: u32) -> bool {
    k <= n && (k & !n) == 0
}

/// All monomials of total degree exactly `d`.
pub fn monomials_of_degree(d: u32) -> Vec<Mono> {
    fn go(l: usize, left: u32, cur: &mut [u32; VARS], out: &mut Vec<Mono>) {
        if l == VARS - 1 {
            cur[l] = left;
            out.push(pack(cur));
            return;
        }
        for x in 0..=left {
            cur[l] = x;
            go(l + 1, left - x, cur, out);
        }
    }
    let mut out = Vec::new();
    go(0, d, &mut [0; VARS], &mut out);
    out
}

#[derive(Default)]
pub struct Oracle {
    cache: HashMap<(Mono, u32), Vec<Mono>>,
}

impl Oracle {
    pub fn new() -> Self {
        Self::default()
    }

    /// `Sq^i` of a single monomial.
    pub fn sq_mono(&mut self, m: Mono, i: u32) -> Vec<Mono> {
        if i == 0 {
            return vec![m];
        }
        if let Some(hit) = self.cache.get(&(m, i)) {
            return hit.clone();
        }
        let e = exps(m);
        let mut out = Vec::new();
        let mut add = [0u32; VARS];
        fn go(l: usize, left: u32, e: &[u32; VARS], add: &mut [u32; VARS], out: &mut Vec<Mono>) {
            if l == VARS {
                if left == 0 {
                    let mut r = *e;
                    for k in 0..VARS {
                        r[k] += add[k];
                    }
                    out.push(pack(&r));
                }
                return;
            }
            for x in 0..=left.min(e[l]) {
                if binom_odd(e[l], x) {
                    add[l] = x;
                    go(l + 1, left - x, e, add, out);
                }
            }
            add[l] = 0;
        }
        go(0, i, &e, &mut add, &mut out);
        self.cache.insert((m, i), out.clone());
        out
    }

    pub fn sq_poly(&mut self, p: &Poly, i: u32) -> Poly {
        let mut out = Poly::new();
        for &m in p {
            for r in self.sq_mono(m, i) {
                if !out.remove(&r) {
                    out.insert(r);
                }
            }
        }
        out
    }

    /// Applies the composite named by `word` (rightmost square first).
    pub fn apply_word(&mut self, word: &[u32], p: &Poly) -> Poly {
        let mut cur = p.clone();
        for &i in word.iter().rev() {
            cur = self.sq_poly(&cur, i);
        }
        cur
    }

    /// Images of `m` under every word of degree `<= max_degree`, keyed by word.
    /// The words are generated by extending on the left, so each image costs
    /// one application of a single square.
    pub fn all_word_images(&mut self, m: Mono, max_degree: u32) -> HashMap<Vec<u32>, Poly> {
        let mut out = HashMap::new();
        let start: Poly = BTreeSet::from([m]);
        out.insert(Vec::new(), start.clone());
        let mut stack = vec![(Vec::<u32>::new(), 0u32, start)];
        while let Some((word, deg, poly)) = stack.pop() {
            for a in 1..=max_degree - deg {
                let next = self.sq_poly(&poly, a);
                let mut w = Vec::with_capacity(word.len() + 1);
                w.push(a);
                w.extend_from_slice(&word);
                out.insert(w.clone(), next.clone());
                if deg + a < max_degree {
                    stack.push((w, deg + a, next));
                }
            }
        }
        out
    }
}

/// All words (compositions) of total degree exactly `d`.
pub fn words_of_degree(d: u32) -> Vec<Vec<u32>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=d {
        for rest in words_of_degree(d - first) {
            let mut w = vec![first];
            w.extend(rest);
            out.push(w);
        }
    }
    out
}

pub fn xor_into(acc: &mut Poly, p: &Poly) {
    for &m in p {
        if !acc.remove(&m) {
            acc.insert(m);
        }
    }
}
