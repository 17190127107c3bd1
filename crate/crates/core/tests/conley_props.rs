use floerbound::conley::{
    admissible_squares, must_vanish, replay, ConleyProfile, Extremal, FactTable, Status,
};
use proptest::prelude::*;

const PROFILES: [Extremal; 3] = [Extremal::None, Extremal::Minimum, Extremal::Maximum];

#[test]
fn every_trace_replays() {
    for n in 1..=12 {
        for extremal in PROFILES {
            let p = ConleyProfile { n, extremal };
            let t = FactTable::build(p, n + 2);
            for m in -1..=n as i64 + 1 {
                for j in 1..=n + 2 {
                    let f = t.fact(m, j);
                    assert_eq!(f.status == Status::Forced, t.is_forced(m, j));
                    replay(p, &f).unwrap_or_else(|e| panic!("n={n} m={m} j={j} {extremal:?}: {e}"));
                }
            }
        }
    }
}

#[test]
fn large_squares_vanish() {
    for n in 2..=12u32 {
        for j in n.div_ceil(2).max(1)..=n + 1 {
            for m in -1..=n as i64 + 1 {
                assert_eq!(
                    must_vanish(n, m, j).status,
                    Status::Forced,
                    "n={n} m={m} j={j}"
                );
            }
        }
    }
}

#[test]
fn admissible_examples() {
    let seven = admissible_squares(7, 6);
    assert!((2..=6).all(|j| seven.contains(&j)));
    let eight = admissible_squares(8, 7);
    assert!((4..=7).all(|j| eight.contains(&j)));
    for n in 5..=12 {
        assert!(!admissible_squares(n, n).contains(&1), "n={n}");
    }
}

proptest! {
    #[test]
    fn raising_jmax_keeps_facts(n in 1u32..13, jmax in 1u32..10, extra in 1u32..6, e in 0usize..3) {
        let p = ConleyProfile { n, extremal: PROFILES[e] };
        let small = FactTable::build(p, jmax);
        let big = FactTable::build(p, jmax + extra);
        for m in 0..=n as i64 {
            for j in 1..=jmax {
                prop_assert_eq!(small.is_forced(m, j), big.is_forced(m, j));
            }
        }
    }

    #[test]
    fn support_rule_forces_high_degrees(n in 2u32..13, m in 0i64..13, j in 1u32..13) {
        // the support rule alone forces m + j >= n
        if m + j as i64 >= n as i64 {
            prop_assert_eq!(must_vanish(n, m, j).status, Status::Forced);
        }
    }
}
