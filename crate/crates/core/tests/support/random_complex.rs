//! Random valid filtered complexes and a brute-force homology count.

#![allow(dead_code)]

use std::collections::BTreeMap;

use floerbound::f2core::{BitVec, F2Matrix};
use floerbound::morse::{build_complex, Generator, MorseComplex};
use rand::Rng;

/// A valid complex with at most `max_gens` generators. Generators are added in
/// increasing grading; each new boundary is a random cycle supported on
/// generators of strictly smaller action, so `d^2 = 0` holds by construction.
pub fn random_complex<R: Rng>(rng: &mut R, max_gens: usize) -> MorseComplex<f64> {
    let n = rng.gen_range(1..=max_gens);
    let max_grading = rng.gen_range(0..=4i64);
    let mut gens: Vec<Generator<f64>> = (0..n)
        .map(|i| Generator {
            name: format!("g{i}"),
            grading: rng.gen_range(0..=max_grading),
            // few distinct values so ties and clusters occur
            action: rng.gen_range(0..6) as f64 * 0.5,
        })
        .collect();
    gens.sort_by_key(|g| g.grading);
    let mut incidence: Vec<(String, String)> = Vec::new();
    for (i, x) in gens.iter().enumerate() {
        let below: Vec<usize> = (0..i)
            .filter(|&k| gens[k].grading == x.grading - 1 && gens[k].action < x.action)
            .collect();
        if below.is_empty() {
            continue;
        }
        // d restricted to `below`, as a matrix into grading - 2
        let lower: Vec<usize> = (0..i)
            .filter(|&k| gens[k].grading == x.grading - 2)
            .collect();
        let mut d = F2Matrix::zeros(lower.len(), below.len());
        for (c, &b) in below.iter().enumerate() {
            for (r, &l) in lower.iter().enumerate() {
                if incidence.contains(&(gens[b].name.clone(), gens[l].name.clone())) {
                    d.set(r, c, true);
                }
            }
        }
        let mut z = BitVec::zeros(below.len());
        for k in d.kernel_basis() {
            if rng.gen_bool(0.6) {
                z.xor_assign(&k);
            }
        }
        for c in z.ones() {
            incidence.push((x.name.clone(), gens[below[c]].name.clone()));
        }
    }
    build_complex(gens, &incidence).expect("construction yields a valid complex")
}

/// Thresholds chosen among the complex's own actions, strictly decreasing.
pub fn random_thresholds<R: Rng>(rng: &mut R, c: &MorseComplex<f64>) -> Vec<f64> {
    let mut actions: Vec<f64> = c.generators().iter().map(|g| g.action).collect();
    actions.sort_by(|a, b| b.partial_cmp(a).unwrap());
    actions.dedup();
    let mut t: Vec<f64> = actions.into_iter().filter(|_| rng.gen_bool(0.7)).collect();
    if t.is_empty() {
        t.push(
            c.generators()
                .iter()
                .map(|g| g.action)
                .fold(f64::INFINITY, f64::min),
        );
    }
    t
}

/// Homology dimensions by counting kernel and image elements over all chains.
pub fn brute_force_dims(c: &MorseComplex<f64>) -> BTreeMap<i64, usize> {
    let gens = c.generators();
    let d_of = |x: &str| -> Vec<&str> {
        c.incidence()
            .filter(|(a, _)| *a == x)
            .map(|(_, b)| b)
            .collect()
    };
    let mut out = BTreeMap::new();
    let gradings: std::collections::BTreeSet<i64> = gens.iter().map(|g| g.grading).collect();
    let log2 = |n: usize| n.trailing_zeros() as usize;
    for &m in &gradings {
        let here: Vec<&str> = gens
            .iter()
            .filter(|g| g.grading == m)
            .map(|g| g.name.as_str())
            .collect();
        let above: Vec<&str> = gens
            .iter()
            .filter(|g| g.grading == m + 1)
            .map(|g| g.name.as_str())
            .collect();
        let image = |names: &[&str], mask: u32| -> u32 {
            let mut out = 0u32;
            for (i, x) in names.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for y in d_of(x) {
                        out ^= 1 << here.iter().position(|h| *h == y).unwrap();
                    }
                }
            }
            out
        };
        let below: Vec<&str> = gens
            .iter()
            .filter(|g| g.grading == m - 1)
            .map(|g| g.name.as_str())
            .collect();
        let kernel = (0u32..1 << here.len())
            .filter(|&mask| {
                let mut v = vec![false; below.len()];
                for (i, x) in here.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        for y in d_of(x) {
                            let p = below.iter().position(|b| *b == y).unwrap();
                            v[p] ^= true;
                        }
                    }
                }
                v.iter().all(|b| !b)
            })
            .count();
        let mut images: Vec<u32> = (0u32..1 << above.len())
            .map(|mask| image(&above, mask))
            .collect();
        images.sort_unstable();
        images.dedup();
        let dim = log2(kernel) - log2(images.len());
        if dim > 0 {
            out.insert(m, dim);
        }
    }
    out
}
