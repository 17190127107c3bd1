//! Acceptance suite. Prints one PASS/FAIL line per criterion; run with
//! `cargo test -p floerbound-cli --test acceptance -- --nocapture`.

#[path = "support/golden.rs"]
mod golden;
#[path = "../../core/tests/support/poly_oracle.rs"]
mod poly_oracle;
#[path = "../../core/tests/support/random_complex.rs"]
mod random_complex;

use std::collections::{BTreeMap, BTreeSet};

use floerbound::bounds::{
    cap_length, cup_length, steenrod_bound, verify_certificate, Allowed, CapAction,
};
use floerbound::conley::{must_vanish, Status};
use floerbound::io::ModuleDoc;
use floerbound::morse::build_complex;
use floerbound::steenrod::{adem_reduce, conjugate, SteenrodElement};
use floerbound::stmod::{
    application_module, invert_total_class, projective_plane_algebra,
    projective_plane_tangent_root, torus_algebra,
};
use poly_oracle::{monomials_of_degree, pack, xor_into, Oracle, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn adem_kernel() -> Outcome {
    ensure(adem_reduce(&[1, 1]).unwrap().is_zero(), || {
        "Sq^1 Sq^1 does not reduce to 0".into()
    })?;
    let mut dom: Vec<u64> = (0..=6).flat_map(monomials_of_degree).collect();
    dom.push(pack(&[1, 1, 1, 1, 1, 1]));
    dom.push(pack(&[3, 1, 2, 1, 1, 1]));
    dom.sort_unstable();
    dom.dedup();
    let mut o = Oracle::new();
    for &m in &dom {
        let images = o.all_word_images(m, 12);
        for (word, image) in &images {
            let reduced = adem_reduce(word).map_err(|e| e.to_string())?;
            let mut acc = Poly::new();
            for t in reduced.terms() {
                xor_into(&mut acc, &images[t.exponents()]);
            }
            ensure(&acc == image, || {
                format!("{word:?} -> {reduced} differs on monomial {m:#x}")
            })?;
        }
    }
    Ok(())
}

fn antipode() -> Outcome {
    ensure(conjugate(1).to_string() == "Sq^1", || {
        format!("c(Sq^1) = {}", conjugate(1))
    })?;
    ensure(conjugate(2).to_string() == "Sq^2", || {
        format!("c(Sq^2) = {}", conjugate(2))
    })?;
    for j in 1..=20u32 {
        let mut acc = SteenrodElement::zero(j);
        for l in 0..=j {
            let term = conjugate(l).multiply(&SteenrodElement::sq(j - l));
            acc = acc.add(&term).map_err(|e| e.to_string())?;
        }
        ensure(acc.is_zero(), || {
            format!("antipode sum in degree {j} is {acc}")
        })?;
    }
    Ok(())
}

fn large_squares_vanish() -> Outcome {
    for n in 2..=12u32 {
        for j in n.div_ceil(2).max(1)..=n + 2 {
            for m in -2..=n as i64 + 2 {
                ensure(must_vanish(n, m, j).status == Status::Forced, || {
                    format!("n={n} m={m} j={j} not forced")
                })?;
            }
        }
    }
    Ok(())
}

fn dimension_seven_and_eight() -> Outcome {
    for m in -1..=8 {
        ensure(must_vanish(7, m, 2).status == Status::Forced, || {
            format!("n=7 m={m} j=2 not forced")
        })?;
    }
    for (m, j) in [(2, 2), (4, 2), (5, 2), (3, 3)] {
        ensure(must_vanish(8, m, j).status == Status::Forced, || {
            format!("n=8 m={m} j={j} not forced")
        })?;
    }
    Ok(())
}

fn thom_example() -> Outcome {
    let (out, code) = golden::run(&["build", "cp2-thom-r7"], None);
    ensure(code == 0, || format!("build exited {code}"))?;
    let doc: ModuleDoc = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let m = doc.to_module().map_err(|e| e.to_string())?;
    let degrees: Vec<i64> = m.degrees().collect();
    ensure(degrees == [3, 5, 7], || format!("degrees {degrees:?}"))?;
    ensure((3..=7).step_by(2).all(|d| m.dim(d) == 1), || {
        "each degree should be one-dimensional".into()
    })?;
    ensure(m.sq(2, 3).rank() == 1, || {
        "Sq^2: H^3 -> H^5 is not of rank 1".into()
    })?;
    let a = projective_plane_algebra();
    let normal = invert_total_class(&a, &projective_plane_tangent_root(&a).pow(&a, 3))
        .map_err(|e| e.to_string())?;
    let w2 = normal.component(&a, 2);
    ensure(w2 == a.module().basis_class(2, 0), || {
        format!("w_2 = {w2:?}")
    })
}

fn application_bound() -> Outcome {
    for k in 1..=5u32 {
        let m = application_module(k);
        let auto = steenrod_bound(&m, 7, &Allowed::Auto, false);
        ensure(auto.bound == 2 * k as usize, || {
            format!("k={k}: auto bound {}", auto.bound)
        })?;
        let bare = steenrod_bound(&m, 7, &Allowed::Set(BTreeSet::new()), false);
        ensure(bare.bound == k as usize, || {
            format!("k={k}: bare bound {}", bare.bound)
        })?;
        for cert in [&auto, &bare] {
            let r = verify_certificate(&m, 7, cert);
            ensure(r.valid, || {
                format!("k={k}: certificate rejected: {:?}", r.failures)
            })?;
        }
    }
    Ok(())
}

/// `d^2` computed from scratch on the incidence list.
fn boundary_squared_is_zero(incidence: &BTreeSet<(String, String)>) -> bool {
    let mut count: BTreeMap<(&str, &str), u32> = BTreeMap::new();
    for (x, y) in incidence {
        for (y2, z) in incidence {
            if y == y2 {
                *count.entry((x, z)).or_default() += 1;
            }
        }
    }
    count.values().all(|c| c % 2 == 0)
}

fn morse_layer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..1000 {
        let c = random_complex::random_complex(&mut rng, 12);
        for m in c.gradings() {
            let dd = c
                .boundary_matrix(m - 1)
                .mul(&c.boundary_matrix(m))
                .map_err(|e| e.to_string())?;
            ensure(dd.is_zero(), || {
                format!("trial {trial}: d^2 != 0 in grading {m}")
            })?;
        }
        let fast = c.homology().dims();
        let slow = random_complex::brute_force_dims(&c);
        ensure(fast == slow, || {
            format!("trial {trial}: homology {fast:?} vs brute force {slow:?}")
        })?;
        let thresholds = random_complex::random_thresholds(&mut rng, &c);
        let report = c
            .les(&thresholds)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        for level in &report.levels {
            for (pos, r) in [
                ("quotient", &level.exactness.at_quotient),
                ("filtered", &level.exactness.at_filtered),
                ("upper", &level.exactness.at_upper),
            ] {
                ensure(r.exact, || {
                    format!("trial {trial}: level {} not exact at {pos}", level.level)
                })?;
            }
        }
        // one extra incidence consistent with gradings and actions: the
        // builder must accept it exactly when d^2 stays zero
        let gens: Vec<(String, i64, f64)> = c
            .generators()
            .iter()
            .map(|g| (g.name.clone(), g.grading, g.action))
            .collect();
        let candidates: Vec<(usize, usize)> = (0..gens.len())
            .flat_map(|x| (0..gens.len()).map(move |y| (x, y)))
            .filter(|&(x, y)| gens[x].1 == gens[y].1 + 1 && gens[x].2 > gens[y].2)
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let (x, y) = candidates[rng.gen_range(0..candidates.len())];
        let mut incidence: BTreeSet<(String, String)> = c
            .incidence()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let pair = (gens[x].0.clone(), gens[y].0.clone());
        if !incidence.remove(&pair) {
            incidence.insert(pair);
        }
        let expect_ok = boundary_squared_is_zero(&incidence);
        let listed: Vec<(String, String)> = incidence.iter().cloned().collect();
        let built = build_complex(c.generators().to_vec(), &listed);
        ensure(built.is_ok() == expect_ok, || {
            format!(
                "trial {trial}: builder verdict {} but d^2 = 0 is {expect_ok}",
                built.is_ok()
            )
        })?;
    }
    Ok(())
}

fn cup_and_cap() -> Outcome {
    let cp2 = cup_length(&projective_plane_algebra()).length;
    ensure(cp2 == 3, || format!("cup_length(CP^2) = {cp2}"))?;
    let t2 = cup_length(&torus_algebra()).length;
    ensure(t2 == 3, || format!("cup_length(T^2) = {t2}"))?;
    let regular = cap_length(&CapAction::regular(projective_plane_algebra()));
    ensure(regular.k == Some(2) && regular.bound == 3, || {
        format!("regular cap length {regular:?}")
    })?;
    let trivial = cap_length(&CapAction::new(
        projective_plane_algebra(),
        floerbound::stmod::sphere(1),
    ));
    ensure(trivial.bound == 1, || {
        format!("trivial cap length {trivial:?}")
    })
}

fn determinism() -> Outcome {
    for case in golden::CASES {
        let first = golden::run_case(case);
        let second = golden::run_case(case);
        ensure(first == second, || {
            format!("{}: two runs differ", case.name)
        })?;
        let expected = std::fs::read(golden::golden_path(case.name))
            .map_err(|e| format!("{}: {e}", case.name))?;
        ensure(first.0 == expected, || {
            format!("{}: output differs from golden file", case.name)
        })?;
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        (
            "1 Adem kernel and oracle faithfulness through degree 12",
            adem_kernel,
        ),
        (
            "2 antipode values and defining sum through degree 20",
            antipode,
        ),
        (
            "3 squares with 2j >= n - 1 vanish for 2 <= n <= 12",
            large_squares_vanish,
        ),
        (
            "4 dimension 7 and dimension 8 forced squares",
            dimension_seven_and_eight,
        ),
        ("5 Thom module of CP^2 in R^7", thom_example),
        (
            "6 application bounds 2k and k with verified certificates",
            application_bound,
        ),
        ("7 Morse layer on 1000 random complexes", morse_layer),
        ("8 cup and cap lengths", cup_and_cap),
        ("9 byte-identical golden outputs across runs", determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS [{name}]"),
            Err(why) => {
                println!("FAIL [{name}]: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
