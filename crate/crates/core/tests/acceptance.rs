//! Acceptance criteria 1-8, one line each on stdout (written past the test
//! harness's capture), followed by a single assertion that all of them hold.

mod common;

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use opcheck::cm_operad::{phi_check, Color, CMObject, Variant};
use opcheck::envelope::{build_envelope, build_fplus_tensor, comparison_on_objects, tuple_label, DEFAULT_CEILING};
use opcheck::fincat::{OperadCheckOptions, Scope};
use opcheck::finset::{enumerate_maps, factorize, PointedMap, PointedSet};
use opcheck::report::{cmd_functor, cmd_mul, cmd_verify_envelope, cmd_verify_operad, FunctorCheck};
use opcheck::semantics::{build_A, bundled_algebra, check_cardinality, check_functoriality, check_inert_cube_limit};
use opcheck::{Verdict, Witness};

struct Outcome {
    id: u8,
    title: &'static str,
    ok: bool,
    detail: String,
    elapsed: Duration,
    limit: Duration,
}

fn criterion(id: u8, title: &'static str, limit_secs: u64, body: impl FnOnce() -> Result<String, String>) -> Outcome {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_secs);
    let (ok, detail) = match result {
        Ok(d) => (elapsed <= limit, d),
        Err(d) => (false, d),
    };
    let o = Outcome {
        id,
        title,
        ok,
        detail,
        elapsed,
        limit,
    };
    let line = format!(
        "criterion {}: {} | {} | {} | {:.2}s of {}s\n",
        o.id,
        if o.ok { "PASS" } else { "FAIL" },
        o.title,
        o.detail,
        o.elapsed.as_secs_f64(),
        o.limit.as_secs()
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    o
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn operad_axioms() -> Result<String, String> {
    let t3 = Instant::now();
    let full = cmd_verify_operad(3, Variant::Strengthened, OperadCheckOptions::default(), DEFAULT_CEILING)
        .map_err(|e| e.to_string())?;
    ensure(full.report.passed(), || format!("N=3: {:?}", full.report.witness))?;
    ensure(full.report.checks.iter().all(|c| c.verdict == Some(Verdict::Pass)), || "N=3: a check was skipped".into())?;
    let t3 = t3.elapsed();
    ensure(t3 < Duration::from_secs(30), || "N=3 over 30 s".into())?;
    let t = Instant::now();
    let opts = OperadCheckOptions {
        scope: Scope::InertOnly,
        up_to_equivalence: false,
    };
    let inert = cmd_verify_operad(4, Variant::Strengthened, opts, DEFAULT_CEILING).map_err(|e| e.to_string())?;
    ensure(inert.report.passed(), || format!("N=4 inert-only: {:?}", inert.report.witness))?;
    ensure(t.elapsed() < Duration::from_secs(300), || "N=4 inert-only over 5 min".into())?;
    Ok(format!(
        "N=3 all conditions pass in {:.2}s; N=4 inert-only passes in {:.2}s",
        t3.as_secs_f64(),
        t.elapsed().as_secs_f64()
    ))
}

fn fstar_oracle() -> Result<String, String> {
    for m in 0..=4 {
        for n in 0..=4 {
            let maps = enumerate_maps(PointedSet::new(m), PointedSet::new(n));
            ensure(maps.len() == (n + 1).pow(m as u32), || format!("|hom(<{m}>,<{n}>)| = {}", maps.len()))?;
            let raw: Vec<Vec<usize>> = maps.iter().map(|f| f.images().to_vec()).collect();
            ensure(raw == raw_maps(m, n), || format!("hom(<{m}>,<{n}>) differs from reference"))?;
        }
    }
    let mut checked = 0;
    for m in 0..=3 {
        for n in 0..=3 {
            for f in enumerate_maps(PointedSet::new(m), PointedSet::new(n)) {
                let (i, a) = factorize(&f);
                let k = i.target().arity;
                ensure(i.then(&a).ok() == Some(f.clone()), || format!("{f}: factors do not recombine"))?;
                for k2 in 0..=3 {
                    for i2 in enumerate_maps(PointedSet::new(m), PointedSet::new(k2)) {
                        if !is_inert(i2.images(), k2) {
                            continue;
                        }
                        for a2 in enumerate_maps(PointedSet::new(k2), PointedSet::new(n)) {
                            if !is_active(a2.images()) || i2.then(&a2).ok() != Some(f.clone()) {
                                continue;
                            }
                            ensure(k2 == k, || format!("{f} also factors through <{k2}>"))?;
                            let isos = enumerate_maps(PointedSet::new(k), PointedSet::new(k))
                                .into_iter()
                                .filter(|s| is_inert(s.images(), k) && is_active(s.images()))
                                .filter(|s| i.then(s).ok() == Some(i2.clone()) && s.then(&a2).ok() == Some(a.clone()))
                                .count();
                            ensure(isos == 1, || format!("{f} via {i2}, {a2}: {isos} comparison isos"))?;
                        }
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!("(n+1)^m for m,n <= 4; unique factorization for {checked} maps"))
}

fn envelope_comparison() -> Result<String, String> {
    let strong = cmd_verify_envelope(2, 2, Variant::Strengthened, DEFAULT_CEILING).map_err(|e| e.to_string())?;
    ensure(strong.report.passed(), || format!("(2,2) strengthened: {:?}", strong.report.witness))?;

    let table = envelope_hom_table(1, 1, false);
    let env = build_envelope(1, 1, Variant::Literal).map_err(|e| e.to_string())?;
    let fplus = build_fplus_tensor(1, 1, Some(1)).map_err(|e| e.to_string())?;
    let (et, ft) = (env.total(), fplus.total());
    let base = env.fibered.base();
    for ((x, y, delta), counts) in &table {
        let d = base.arrow_id(&delta.parse::<PointedMap>().map_err(|e| e.to_string())?).ok_or("base map out of range")?;
        let (xi, yi) = (et.find_object(x).ok_or(x.clone())?, et.find_object(y).ok_or(y.clone())?);
        let image = |o: usize| tuple_label(&comparison_on_objects(&env.objects[o]));
        let (fx, fy) = (ft.find_object(&image(xi)).ok_or("image")?, ft.find_object(&image(yi)).ok_or("image")?);
        let got = (env.fibered.arrows_over(xi, yi, d).len(), fplus.fibered.arrows_over(fx, fy, d).len());
        ensure(got == (counts.envelope, counts.fplus), || {
            format!("{x} -> {y} over {delta}: main {got:?}, oracle {counts:?}")
        })?;
    }
    let lit = cmd_verify_envelope(1, 1, Variant::Literal, DEFAULT_CEILING).map_err(|e| e.to_string())?;
    let expected = Witness::HomMismatch {
        source: "(1|1)@1:1".into(),
        target: "(1|)@1:1".into(),
        base_map: Some("1->1:1".into()),
        left: 1,
        right: 0,
    };
    ensure(lit.report.witness.as_ref() == Some(&expected), || format!("(1,1) literal: {:?}", lit.report.witness))?;
    Ok(format!(
        "(2,2) strengthened bijective on {} objects / {} arrows; (1,1) literal mismatch 1 vs 0 matches oracle on {} hom-sets",
        strong.report.data["envelope"]["objects"],
        strong.report.data["envelope"]["arrows"],
        table.len()
    ))
}

fn phi_shadow() -> Result<String, String> {
    let strong = phi_check(3, Variant::Strengthened).map_err(|e| e.to_string())?;
    ensure(strong.is_pass() && phi_first_mismatch(3, true).is_none(), || format!("strengthened: {strong}"))?;
    let lit = phi_check(3, Variant::Literal).map_err(|e| e.to_string())?;
    let (source, target, left, right) = phi_first_mismatch(3, false).ok_or("oracle finds no literal mismatch")?;
    let expected = Verdict::fail(Witness::HomMismatch {
        source: source.clone(),
        target: target.clone(),
        base_map: None,
        left,
        right,
    });
    ensure(lit == expected, || format!("literal: main {lit}, oracle {expected}"))?;
    Ok(format!("strengthened passes; literal fails at {source} -> {target} ({left} vs {right}) as the oracle predicts"))
}

fn mul_table() -> Result<String, String> {
    let mut rows = 0;
    for k in 0..=4 {
        for bits in 0..(1u32 << k) {
            let word: Vec<char> = (0..k).map(|i| if bits & (1 << i) != 0 { 'm' } else { 'a' }).collect();
            let inputs: Vec<Color> = word.iter().map(|&c| if c == 'm' { Color::M } else { Color::A }).collect();
            let ms = bits.count_ones() as usize;
            for (out, c) in [(Color::A, 'a'), (Color::M, 'm')] {
                let run = cmd_mul(&inputs, out, Variant::Strengthened).map_err(|e| e.to_string())?;
                let count = run.report.data["count"].as_u64().unwrap_or(u64::MAX) as usize;
                let expected = match c {
                    'a' => usize::from(ms == 0),
                    _ => usize::from(ms == 1),
                };
                ensure(count == expected && count == mul_count(&word, c, true), || {
                    format!("Mul({word:?}; {c}) = {count}, expected {expected}")
                })?;
                rows += 1;
            }
        }
    }
    Ok(format!("{rows} table entries match the closed form and direct enumeration"))
}

fn functor_shadow() -> Result<String, String> {
    let mut pairs = 0;
    for name in ["z2_additive", "max_monoid"] {
        let alg = bundled_algebra(name).ok_or("missing bundled algebra")?;
        let run = cmd_functor(&alg, name, 3, &[FunctorCheck::Functoriality, FunctorCheck::Cardinality], DEFAULT_CEILING)
            .map_err(|e| e.to_string())?;
        ensure(run.report.passed(), || format!("{name}: {:?}", run.report.witness))?;
        let a = build_A(&alg, 3);
        ensure(check_functoriality(&a).is_pass() && check_cardinality(&a).is_pass(), || name.to_string())?;
        let c = a.base.category();
        pairs = c.composable_pairs().count();
    }
    ensure(pairs >= 1000, || format!("only {pairs} composable pairs"))?;
    Ok(format!("both algebras functorial on {pairs} composable pairs; |A(<n>)| = |E|^n |M|"))
}

fn cube_shadow() -> Result<String, String> {
    let mut cubes = 0;
    for name in ["z2_additive", "max_monoid"] {
        let alg = bundled_algebra(name).ok_or("missing bundled algebra")?;
        for x in CMObject::all(3).into_iter().filter(|x| x.base.arity >= 1) {
            let v = check_inert_cube_limit(&alg, &x).map_err(|e| e.to_string())?;
            ensure(v.is_pass(), || format!("{name} {x}: {v}"))?;
            cubes += 1;
        }
    }
    Ok(format!("{cubes} cubes and all their nontrivial subcubes are limits"))
}

fn determinism() -> Result<String, String> {
    let commands: &[&[&str]] = &[
        &["verify", "operad", "--max-size", "3"],
        &["verify", "operad", "--variant", "literal", "--max-size", "3"],
        &["verify", "operad", "--max-size", "3", "--inert-only", "--up-to-equivalence"],
        &["verify", "envelope", "--max-size", "2", "--shape", "2"],
        &["verify", "envelope", "--variant", "literal", "--max-size", "1", "--shape", "1"],
        &["verify", "phi", "--max-size", "3"],
        &["verify", "phi", "--variant", "literal", "--max-size", "3"],
        &["verify", "segal", "--arity", "2"],
        &["verify", "segal", "--variant", "literal", "--arity", "2"],
        &["verify", "closure", "--variant", "literal", "--max-size", "3"],
        &["mul", "--inputs", "a,m", "--output", "m"],
        &["mul", "--inputs", "m", "--output", "a", "--variant", "literal"],
        &["functor", "--algebra", "z2_additive", "--max-size", "3"],
        &["functor", "--algebra", "max_monoid", "--max-size", "3"],
        &["maps", "--source", "3", "--target", "2"],
        &["factorize", "3->2:2,0,1"],
        &["cube", "--arity", "3"],
        &["cm-morphism", "--source", "(2|1,2)", "--target", "(1|1)", "2->1:1,0"],
        &["fplus-morphism", "--source", "{1,2|1}", "--target", "{1|1}", "1,1"],
        &["compare", "(3|1,3)@2:1,1,2"],
        &["build", "cm", "--max-size", "2"],
        &["build", "fstar", "--max-size", "2"],
        &["build", "fplus", "--max-size", "1", "--shape", "2"],
        &["build", "envelope", "--max-size", "1", "--shape", "2"],
    ];
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_opcheck"))
            .args(args)
            .env_remove("OPCHECK_CEILING")
            .output()
            .map_err(|e| e.to_string())
    };
    for args in commands {
        let (a, b) = (run(args)?, run(args)?);
        ensure(a.status.code() != Some(2), || format!("{args:?}: {}", String::from_utf8_lossy(&a.stderr)))?;
        ensure(a.stdout == b.stdout && a.status.code() == b.status.code(), || format!("{args:?} differs"))?;
        ensure(serde_json::from_slice::<serde_json::Value>(&a.stdout).is_ok(), || format!("{args:?}: not JSON"))?;
    }
    Ok(format!("{} commands byte-identical across two runs", commands.len()))
}

#[test]
fn acceptance() {
    let outcomes = [
        criterion(1, "operad axioms, strengthened", 30 + 300, operad_axioms),
        criterion(2, "F_* hom counts and factorization", 5, fstar_oracle),
        criterion(3, "envelope comparison", 120, envelope_comparison),
        criterion(4, "phi full faithfulness", 10, phi_shadow),
        criterion(5, "multimorphism table", 5, mul_table),
        criterion(6, "functoriality of A_{E,M}", 60, functor_shadow),
        criterion(7, "inert cube limits", 30, cube_shadow),
        criterion(8, "determinism", 120, determinism),
    ];
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.ok)
        .map(|o| format!("{} ({})", o.id, o.detail))
        .collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
