//! Acceptance suite: seven criteria at exact tolerance, one PASS/FAIL line
//! each with its runtime. Runs without the libtest harness so the lines
//! always appear in the test output.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRunner};

use rht_core::cdga::degree_violation;
use rht_core::cohomology::{betti, is_quasi_iso, quotient_ring_dims, CohomologyOptions};
use rht_core::constructors::{biquotient_model, hp_model, hp_model_with, projectivize, sphere_model, PontryaginData};
use rht_core::dsl::{parse_document, parse_model, render_model};
use rht_core::gradedalg::{basis_of_degree, ratio, scalar};
use rht_core::presets::{self, Case, PRESETS};
use rht_core::reduction::find_reducible;
use rht_core::verify::{leray_hirsch_check, monomial_classes};
use rht_core::{cancel_acyclic_pair, change_of_variable, reduce, FreeCdga, Generator, Polynomial, Scalar};

type Outcome = Result<String, String>;

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn p(g: &Generator) -> Polynomial {
    Polynomial::generator(g)
}

fn gen_of(m: &FreeCdga, name: &str) -> Result<Generator, String> {
    m.gen(name).cloned().map_err(err)
}

fn betti_vec(m: &FreeCdga, max: u32) -> Result<Vec<usize>, String> {
    Ok(betti(m, max).map_err(err)?.betti_numbers())
}

/// `1` at the listed degrees and `0` elsewhere in `0..=max`.
fn spike(max: u32, ones: &[(u32, usize)]) -> Vec<usize> {
    (0..=max)
        .map(|d| ones.iter().find(|(k, _)| *k == d).map_or(0, |(_, b)| *b))
        .collect()
}

fn criterion_1() -> Outcome {
    let hp2 = hp_model_with(2, "y").map_err(err)?;
    let y4 = gen_of(&hp2, "y4")?;
    let pe = projectivize(&PontryaginData {
        base: hp2,
        classes: vec![p(&y4), p(&y4).pow(2)],
        rank: 2,
    })
    .map_err(err)?;
    let b = betti_vec(&pe, 16)?;
    let expected = spike(16, &[(0, 1), (4, 2), (8, 2), (12, 1)]);
    ensure(b == expected, || format!("P(E) betti {b:?}"))?;

    let doc = presets::load("thm34").map_err(err)?;
    let ring = doc.presentation("PEring").ok_or("no PEring")?;
    let dims = quotient_ring_dims(ring, 16).map_err(err)?;
    let dims: Vec<usize> = (0..=16).map(|k| dims[&k]).collect();
    ensure(dims == b, || format!("quotient dims {dims:?} vs betti {b:?}"))?;

    let biq = doc.model("B").ok_or("no B")?;
    let (reduced, _) = reduce(biq, 16).map_err(err)?;
    let a4 = Generator::new("a4", 4);
    let b4 = Generator::new("b4", 4);
    let v7 = Generator::new("v7", 7);
    let v11 = Generator::new("v11", 11);
    let dv7 = (&p(&b4) * &(&p(&a4) - &p(&b4))).scale(&scalar(3)) - p(&a4).pow(2);
    let dv11 = -p(&b4).pow(3);
    let expected = FreeCdga::new("", [a4, b4, v7.clone(), v11.clone()], [(v7, dv7), (v11, dv11)]).map_err(err)?;
    ensure(reduced == expected, || format!("reduced to {reduced}"))?;
    let rb = betti_vec(&reduced, 16)?;
    ensure(rb == b, || format!("reduced betti {rb:?}"))?;
    ensure(betti_vec(biq, 16)? == b, || "biquotient betti differs".into())?;

    for name in ["f_corrected", "f"] {
        let f = doc.morphism(name).ok_or("missing morphism")?;
        let r = is_quasi_iso(f, 16).map_err(err)?;
        ensure(r.is_quasi_iso(), || format!("{name} not a quasi-isomorphism:\n{r}"))?;
    }
    let stated = doc.morphism("f_stated").ok_or("no f_stated")?;
    ensure(stated.compose_and_check().is_err(), || {
        "stated f unexpectedly a chain map".into()
    })?;
    Ok("betti (1,2,2,1); quotient ring matches; reduction exact; f quasi-iso with sign correction".into())
}

fn criterion_2() -> Outcome {
    let mut parts = Vec::new();
    for n in [2u32, 3] {
        let top = 8 * n - 1;
        let max = 8 * n;
        let base = sphere_model(4 * n).map_err(err)?;
        let a = gen_of(&base, &format!("a{}", 4 * n))?;
        let mut classes = vec![Polynomial::zero(); n as usize];
        classes[n as usize - 1] = p(&a);
        let pe = projectivize(&PontryaginData { base, classes, rank: n }).map_err(err)?;
        let (pe_red, _) = reduce(&pe, max).map_err(err)?;
        let x4 = Generator::new("x4", 4);
        let at = Generator::new(format!("a{top}"), top);
        let want = FreeCdga::new("", [x4.clone(), at.clone()], [(at, p(&x4).pow(2 * n))]).map_err(err)?;
        ensure(pe_red == want, || format!("n={n}: P(E) reduced to {pe_red}"))?;

        let biq = biquotient_model(&presets::thm33_data(n, &presets::thm33_default_coefficients(n)).map_err(err)?)
            .map_err(err)?;
        let (b_red, _) = reduce(&biq, max).map_err(err)?;
        let b4 = Generator::new("b4", 4);
        let vt = Generator::new(format!("v{top}"), top);
        let want = FreeCdga::new("", [b4.clone(), vt.clone()], [(vt, -p(&b4).pow(2 * n))]).map_err(err)?;
        ensure(b_red == want, || format!("n={n}: biquotient reduced to {b_red}"))?;

        let ones: Vec<(u32, usize)> = (0..2 * n).map(|k| (4 * k, 1)).collect();
        for (label, m) in [("P(E)", &pe), ("biquotient", &biq)] {
            let b = betti_vec(m, max)?;
            ensure(b == spike(max, &ones), || format!("n={n}: {label} betti {b:?}"))?;
        }
        let doc = parse_document(&Case::Thm33.source(n).map_err(err)?).map_err(err)?;
        let eta = doc.morphism("eta").ok_or("no eta")?;
        let r = is_quasi_iso(eta, max).map_err(err)?;
        ensure(r.is_quasi_iso(), || format!("n={n}: eta\n{r}"))?;
        parts.push(format!("n={n} top degree {}", 4 * (2 * n - 1)));
    }
    Ok(format!(
        "both sides reduce to two generators, eta quasi-iso ({})",
        parts.join(", ")
    ))
}

fn rht(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rht"))
        .args(args)
        .output()
        .map_err(err)?;
    Ok((
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    ))
}

fn criterion_3() -> Outcome {
    for n in [2u32, 3] {
        let biq = biquotient_model(&presets::prop31_data(n).map_err(err)?).map_err(err)?;
        let r = betti(&biq, 8).map_err(err)?;
        ensure(r.betti(0) == 1 && r.betti(3) == 1 && r.betti(4) == 1, || {
            format!("n={n}: betti {:?}", r.betti_numbers())
        })?;
        let ns = n.to_string();
        let (code, stdout) = rht(&["paper-verify", "--case", "prop31", "--n", &ns])?;
        ensure(code == 0, || format!("n={n}: paper-verify exited {code}\n{stdout}"))?;
        let flagged = stdout
            .lines()
            .any(|l| l.trim_start().starts_with("DISCREPANCY") && l.contains("contractible"));
        ensure(flagged, || format!("n={n}: no contractibility discrepancy\n{stdout}"))?;
    }
    Ok("betti(0)=betti(3)=betti(4)=1 at n=2,3; contractibility claim reported as a discrepancy".into())
}

fn criterion_4() -> Outcome {
    let betas = presets::parse_scalars("3, 3, 1").map_err(err)?;
    let biq = biquotient_model(&presets::prop32_data(2, &betas).map_err(err)?).map_err(err)?;
    let (out, _) = reduce(&biq, 16).map_err(err)?;
    let thm34 = presets::load("thm34").map_err(err)?;
    let target = thm34.model("Breduced").ok_or("no Breduced")?;
    let map = out
        .renaming_onto(target)
        .ok_or_else(|| format!("{out} is not a renaming of {target}"))?;
    let renamed = out.rename(&map).map_err(err)?;
    ensure(&renamed == target, || format!("renamed model {renamed}"))?;
    let pairs: Vec<String> = map.iter().map(|(a, b)| format!("{a}->{b}")).collect();
    Ok(format!("identical after renaming {}", pairs.join(", ")))
}

fn criterion_5() -> Outcome {
    let opts = CohomologyOptions::default();
    let mut runner = TestRunner::new(Config {
        cases: 6,
        failure_persistence: None,
        ..Config::default()
    });
    let mut checked = 0usize;
    for file in ["hp1", "hp2", "s4", "s8"] {
        let doc = presets::load(file).map_err(err)?;
        let base = doc.models[0].clone();
        for rank in [2u32, 3] {
            let mut sets: Vec<Vec<Scalar>> = vec![vec![scalar(0); 3], vec![scalar(1); 3]];
            let strat = prop::collection::vec((-7i64..=7, 1i64..=5), 3);
            for _ in 0..6 {
                let tree = strat.new_tree(&mut runner).map_err(err)?;
                sets.push(tree.current().into_iter().map(|(a, b)| ratio(a, b)).collect());
            }
            for c in sets {
                let check = leray_hirsch_check(&base, rank, monomial_classes(&base, rank, &c), &opts).map_err(err)?;
                ensure(check.status == rht_core::Status::Pass, || {
                    format!("{}: {}", check.name, check.detail)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("total dimension = rank × base total in {checked} cases"))
}

// ------------------------------------------------------------------ property suites

fn random_poly(gens: &[Generator], n: u32, picks: &[(usize, i64)]) -> Polynomial {
    let basis = basis_of_degree(gens, n);
    let mut out = Polynomial::zero();
    if !basis.is_empty() {
        for (i, c) in picks {
            out.add_term(basis[i % basis.len()].clone(), scalar(*c));
        }
    }
    out
}

/// Generators in increasing degree, each with `dg = d(p) + q` where `q`
/// only involves cocycle generators.
fn tower(degrees: &[u32], picks: &[(usize, i64)]) -> FreeCdga {
    let mut degrees = degrees.to_vec();
    degrees.sort_unstable();
    let mut m = FreeCdga::trivial();
    let mut chunks = picks.chunks(2).cycle();
    for (i, &k) in degrees.iter().enumerate() {
        let gens = m.generators().to_vec();
        let closed: Vec<Generator> = gens
            .iter()
            .filter(|g| m.d(g).is_some_and(Polynomial::is_zero))
            .cloned()
            .collect();
        let dp = m.apply_d(&random_poly(&gens, k, chunks.next().unwrap_or(&[]))).unwrap();
        let dg = &dp + &random_poly(&closed, k + 1, chunks.next().unwrap_or(&[]));
        let g = Generator::new(format!("g{i}_{k}"), k);
        let diffs: Vec<(Generator, Polynomial)> = m
            .differentials()
            .map(|(a, b)| (a.clone(), b.clone()))
            .chain([(g.clone(), dg)])
            .collect();
        m = FreeCdga::new("R", gens.into_iter().chain([g]), diffs).unwrap();
    }
    m
}

fn picks() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..64, -3i64..=3), 4..16)
}

fn degrees() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(2u32..=7, 1..=5)
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn fixed_gens() -> Vec<Generator> {
    [("a", 2), ("b", 3), ("c", 4), ("e", 5), ("f", 3)]
        .into_iter()
        .map(|(n, d)| Generator::new(n, d))
        .collect()
}

fn criterion_6() -> Outcome {
    runner(200)
        .run(&(degrees(), picks(), 2u32..=12), |(degs, pk, n)| {
            let m = tower(&degs, &pk);
            prop_assert!(m.validate().is_ok());
            let x = random_poly(m.generators(), n, &pk);
            prop_assert!(m.apply_d(&m.apply_d(&x).unwrap()).unwrap().is_zero());
            Ok(())
        })
        .map_err(|e| format!("d² = 0: {e}"))?;

    runner(1000)
        .run(&(degrees(), picks(), 1u32..=8, 1u32..=8), |(degs, pk, a, b)| {
            let gens = fixed_gens();
            let (x, y) = (random_poly(&gens, a, &pk[..2]), random_poly(&gens, b, &pk[2..]));
            let sign = if a * b % 2 == 1 { scalar(-1) } else { scalar(1) };
            prop_assert_eq!(&x * &y, (&y * &x).scale(&sign));
            let m = tower(&degs, &pk);
            let (x, y) = (
                random_poly(m.generators(), a, &pk[..2]),
                random_poly(m.generators(), b, &pk[2..]),
            );
            let lhs = m.apply_d(&(&x * &y)).unwrap();
            let (dx, dy) = (m.apply_d(&x).unwrap(), m.apply_d(&y).unwrap());
            let rhs = if a % 2 == 0 {
                &(&dx * &y) + &(&x * &dy)
            } else {
                &(&dx * &y) - &(&x * &dy)
            };
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })
        .map_err(|e| format!("commutativity/Leibniz: {e}"))?;

    runner(100)
        .run(
            &(degrees(), picks(), prop_oneof![-3i64..=-1, 1i64..=3]),
            |(degs, pk, lambda)| {
                let m = tower(&degs, &pk);
                let gens = m.generators().to_vec();
                let closed: Vec<Generator> = gens
                    .iter()
                    .filter(|g| m.d(g).is_some_and(Polynomial::is_zero))
                    .cloned()
                    .collect();
                let x = Generator::new("x4", 4);
                let v = Generator::new("v3", 3);
                let r = &m.apply_d(&random_poly(&gens, 3, &pk[..2])).unwrap() + &random_poly(&closed, 4, &pk[2..4]);
                let dv = &p(&x).scale(&scalar(lambda)) + &r;
                let diffs: Vec<(Generator, Polynomial)> = m
                    .differentials()
                    .map(|(a, b)| (a.clone(), b.clone()))
                    .chain([(v.clone(), dv.clone())])
                    .collect();
                let e = FreeCdga::new("E", gens.into_iter().chain([x.clone(), v.clone()]), diffs).unwrap();
                let t = Generator::new("t4", 4);
                let changed = change_of_variable(&e, &x, &t, &dv).unwrap();
                let (out, _) = cancel_acyclic_pair(&changed, &v).unwrap();
                let before = betti(&e, 16).unwrap().betti_numbers();
                prop_assert_eq!(betti(&changed, 16).unwrap().betti_numbers(), before.clone());
                prop_assert_eq!(betti(&out, 16).unwrap().betti_numbers(), before);
                Ok(())
            },
        )
        .map_err(|e| format!("cancellation: {e}"))?;

    let mut models = 0usize;
    for pr in PRESETS {
        let doc = parse_document(pr.source).map_err(err)?;
        for m in &doc.models {
            let back = parse_model(&render_model(m)).map_err(err)?;
            ensure(&back == m, || format!("{}: {} does not round-trip", pr.file, m.name()))?;
            let (once, _) = reduce(m, 0).map_err(err)?;
            let (twice, log) = reduce(&once, 0).map_err(err)?;
            ensure(
                find_reducible(&once).is_none() && log.is_empty() && once == twice,
                || format!("{}: reduce not idempotent on {}", pr.file, m.name()),
            )?;
            models += 1;
        }
    }
    Ok(format!(
        "d²=0 ×200, commutativity+Leibniz ×1000, cancellation ×100, idempotence and round trip on {models} preset models"
    ))
}

fn criterion_7() -> Outcome {
    let bad = "model Bad { gen v7 : 7; gen z8 : 8; gen b4 : 4; d v7 = z8 - 3*b4^4; }";
    let e = parse_model(bad).err().ok_or("inhomogeneous model accepted")?;
    let msg = e.to_string();
    ensure(msg.contains("inhomogeneous") && msg.contains("-3*b4^4"), || msg.clone())?;

    let b4 = Generator::new("b4", 4);
    let c4 = Generator::new("c4", 4);
    let x4 = Generator::new("x4", 4);
    for n in [2u32, 3] {
        let v7 = Generator::new("v7", 7);
        let z8 = Generator::new("z8", 8);
        let dv7 = &p(&z8) - &p(&b4).pow(4).scale(&scalar(i64::from(n) + 1));
        let v = degree_violation(&v7, &dv7).ok_or("dv7 accepted")?;
        let want = format!("-{}*b4^4", n + 1);
        ensure(
            v.to_string().contains("inhomogeneous") && v.to_string().contains(&want),
            || v.to_string(),
        )?;
    }
    // prop32 at n = 2: da7 = x4·b4 − β7·c4^{n−1}.
    let a7 = Generator::new("a7", 7);
    let da7 = &(&p(&x4) * &p(&b4)) - &p(&c4).scale(&scalar(3));
    let v = degree_violation(&a7, &da7).ok_or("da7 accepted")?;
    ensure(
        v.to_string().contains("inhomogeneous") && v.to_string().contains("-3*c4"),
        || v.to_string(),
    )?;
    let hp = hp_model(1).map_err(err)?;
    ensure(hp.validate().is_ok(), || "valid model rejected".into())?;
    Ok("offending terms named: -3*b4^4, -4*b4^4, -3*c4".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 HP1-bundle over HP2 end to end", criterion_1, Duration::from_secs(10)),
        ("2 sphere bundles at n = 2, 3", criterion_2, Duration::from_secs(10)),
        ("3 contractibility verdict", criterion_3, Duration::from_secs(10)),
        (
            "4 beta = (3, 3, 1) specialization",
            criterion_4,
            Duration::from_secs(10),
        ),
        ("5 Leray-Hirsch dimension law", criterion_5, Duration::from_secs(30)),
        ("6 property suites", criterion_6, Duration::from_secs(60)),
        ("7 validator regression", criterion_7, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let outcome = f();
        let t = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if t > budget => Err(format!("{msg}; over budget of {} s", budget.as_secs())),
            o => o,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name} ({:.3} s): {msg}", t.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} ({:.3} s): {msg}", t.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
