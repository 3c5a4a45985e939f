//! Acceptance criteria. Runs as a plain binary so that the one-line verdicts
//! are always printed; exits non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{brute_force_factors, build, ctx, naive_kernel, numbered, parse};
use fsing_core::field::FieldCtx;
use fsing_core::frobenius::{
    build_regularity_certificate, fedder_fsplit, verify_regularity_certificate, FedderOutcome,
};
use fsing_core::input::{matroid_basis_polynomial, matroid_vars, MatroidInput};
use fsing_core::invariants::{dfpt_at, fpt_crosscheck, multiplicity_hypersurface};
use fsing_core::modification::{modification_pipeline, ModificationOptions};
use fsing_core::poly::{frobenius_power_mod_bracket, Monomial, Point, Poly};
use fsing_core::structure::{
    disjoint_factorization, extension_stability_check, is_irreducible_sqfree, is_squarefree_supported, CIdeal,
};
use fsing_core::suite::{random_sqfree_factors, theorem_suite, SuiteConfig};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took <= limit, || format!("took {took:?}, limit {limit:?}"))
}

fn random_terms(rng: &mut ChaCha8Rng, n: usize, max_terms: usize, max_exp: u16) -> Vec<(Vec<u16>, i64)> {
    let k = rng.gen_range(1..=max_terms);
    (0..k)
        .map(|_| {
            (
                (0..n).map(|_| rng.gen_range(0..=max_exp)).collect(),
                rng.gen_range(1..50),
            )
        })
        .collect()
}

fn suite_passes() -> Outcome {
    let start = Instant::now();
    let config = SuiteConfig {
        count: 200,
        e_max: 2,
        ..SuiteConfig::default()
    };
    let report = theorem_suite(&config).map_err(|e| e.to_string())?;
    ensure(report.samples.len() == 200, || {
        format!("{} samples", report.samples.len())
    })?;
    ensure(report.passed() == 200, || {
        format!(
            "{} passed, {} skipped, {} counterexamples",
            report.passed(),
            report.skipped(),
            report.counterexamples()
        )
    })?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "200/200 samples split at e = 1 and certified, {:?}",
        start.elapsed()
    ))
}

fn curated(p: u64) -> Vec<(&'static str, Poly)> {
    let (field, vars) = ctx(p, "x y z w u v r s a b c d");
    let q = |s: &str| parse(&field, &vars, s);
    let (mfield, mvars) = (Arc::new(FieldCtx::prime(p).unwrap()), matroid_vars(4).unwrap());
    let u24 = MatroidInput {
        n: 4,
        bases: vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]],
        p: None,
    };
    let u24 = matroid_basis_polynomial(&u24, mfield, mvars).unwrap();
    vec![
        ("xy+zw", q("x*y + z*w")),
        ("xy+zw+uv+rs", q("x*y + z*w + u*v + r*s")),
        ("(xy+zw)(ab+cd)", q("x*y + z*w").mul(&q("a*b + c*d")).unwrap()),
        ("x+yz", q("x + y*z")),
        ("triangle", q("x*y + x*z + y*z")),
        ("U(2,4)", u24),
        ("x", q("x")),
        ("xyz", q("x*y*z")),
        ("x(y+z)", q("x*y + x*z")),
        (
            "(x+y)(z+w)(u+v)",
            q("x + y").mul(&q("z + w")).unwrap().mul(&q("u + v")).unwrap(),
        ),
        ("xyz+uvw", q("x*y*z + u*v*w")),
        ("(x+yz)(u+vr)", q("x + y*z").mul(&q("u + v*r")).unwrap()),
    ]
}

fn dfpt_formulas() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for p in [2, 3] {
        for (name, f) in curated(p) {
            let ideal = disjoint_factorization(&f).map_err(|e| format!("{name}: {e}"))?;
            let origin = Point::origin(f.vars().len());
            let r = dfpt_at(&ideal, &origin).map_err(|e| format!("{name}: {e}"))?;
            let mult = multiplicity_hypersurface(&f, &origin).map_err(|e| e.to_string())?;
            let t = ideal.len() as i64;
            ensure(r.mult == mult && r.dfpt == mult as i64 - t, || {
                format!("{name} over F_{p}: dfpt {} vs mult {mult} - t {t}", r.dfpt)
            })?;
            for (sample, d) in fpt_crosscheck(&ideal, &[1, 2]).map_err(|e| e.to_string())? {
                ensure(d == Some(Ratio::from_integer(0)), || {
                    format!("{name} over F_{p}, e = {}: discrepancy {d:?}", sample.e)
                })?;
            }
            cases += 1;
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "{cases} inputs over F_2 and F_3, dfpt = mult - t and zero discrepancy at e = 1, 2"
    ))
}

fn kernel_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = 0;
    for p in [2, 3] {
        for _ in 0..300 {
            let n = rng.gen_range(1..=3);
            let (field, vars) = numbered(p, n);
            let f = build(&field, &vars, &random_terms(&mut rng, n, 3, 3));
            if f.is_zero() {
                continue;
            }
            for e in 1..=2 {
                let fast = frobenius_power_mod_bracket(&f, e).map_err(|e| e.to_string())?;
                ensure(fast == naive_kernel(&f, e), || format!("mismatch for {f} at e = {e}"))?;
                cases += 1;
            }
        }
    }
    ensure(cases >= 500, || format!("only {cases} cases"))?;
    Ok(format!("{cases} (f, e) pairs agree with full expansion"))
}

fn factor_strings(fs: &[Poly]) -> BTreeSet<String> {
    fs.iter().map(|f| f.to_string()).collect()
}

fn factorization_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut compared = 0;
    while compared < 100 {
        let p = [2, 3, 5][rng.gen_range(0..3)];
        let n = rng.gen_range(2..=6);
        let (field, vars) = numbered(p, n);
        let f = build(&field, &vars, &random_terms(&mut rng, n, 5, 1));
        if f.is_zero() || f.is_constant() {
            continue;
        }
        let ideal = disjoint_factorization(&f).map_err(|e| format!("{f}: {e}"))?;
        let expected = factor_strings(&brute_force_factors(&f));
        ensure(factor_strings(ideal.factors()) == expected, || {
            format!("{f}: got {:?}", ideal.factors())
        })?;
        compared += 1;
    }
    for i in 0..200u64 {
        let p = [2, 3, 5][(i % 3) as usize];
        let n = rng.gen_range(1..=8);
        let t = rng.gen_range(1..=n.min(3));
        let (field, vars) = numbered(p, n);
        let planted = random_sqfree_factors(&field, &vars, 8, t, i).map_err(|e| e.to_string())?;
        let f = planted
            .iter()
            .try_fold(Poly::one(field.clone(), vars.clone()), |acc, g| acc.mul(g));
        let f = f.map_err(|e| e.to_string())?;
        let got = disjoint_factorization(&f).map_err(|e| e.to_string())?.len();
        ensure(got == t, || format!("{f}: planted {t} factors, recovered {got}"))?;
    }
    Ok("100 brute-force comparisons and 200 planted products agree".into())
}

fn geometric_stability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    while done < 50 {
        let p = [2, 3][rng.gen_range(0..2)];
        let n = rng.gen_range(2..=5);
        let (field, vars) = numbered(p, n);
        let f = build(&field, &vars, &random_terms(&mut rng, n, 5, 1));
        if f.is_zero() || f.is_constant() {
            continue;
        }
        let s = 2 + done % 2;
        ensure(extension_stability_check(&f, s).map_err(|e| e.to_string())?, || {
            format!("{f}: factor count changes over F_{p}^{s}")
        })?;
        done += 1;
    }
    Ok("50 samples keep their factor count over degree 2 and 3 extensions".into())
}

fn modification() -> Outcome {
    let mut runs = Vec::new();
    for p in [2, 3] {
        let (field, vars) = ctx(p, "x y z w");
        let g = parse(&field, &vars, "x*y + z*w");
        let h = parse(&field, &vars, "x*z*w");
        for a in [[0, 0, 0, 0], [1, 0, 0, 0]] {
            let a: Vec<_> = a.iter().map(|&c| field.from_int(c)).collect();
            let r = modification_pipeline(&g, &h, &a, &ModificationOptions::default()).map_err(|e| e.to_string())?;
            let label = format!("F_{p}, a = {a:?}");
            ensure(is_squarefree_supported(&r.build.transformed) && r.squarefree, || {
                format!("{label}: support")
            })?;
            let irreducible = is_irreducible_sqfree(&r.build.transformed).map_err(|e| e.to_string())?;
            ensure(irreducible && r.irreducible, || format!("{label}: reducible"))?;
            ensure(r.certificate_check.as_ref().is_some_and(|c| c.is_valid()), || {
                format!("{label}: certificate")
            })?;
            ensure(r.points.len() == 20, || {
                format!("{label}: only {} points", r.points.len())
            })?;
            for pc in &r.points {
                ensure(pc.dfpt == pc.mult as i64 - 1 && pc.consistent, || {
                    format!("{label}: dfpt {} at mult {}", pc.dfpt, pc.mult)
                })?;
            }
            ensure(r.passed(), || format!("{label}: report did not pass"))?;
            runs.push(label);
        }
    }
    Ok(format!("{} runs verified at 20 points each", runs.len()))
}

fn run_cli(args: &[&str], input: &str) -> std::process::Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("input.poly");
    std::fs::write(&path, input).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fsing"));
    cmd.args(args).arg(&path);
    cmd.output().unwrap()
}

fn negative_controls() -> Outcome {
    let (field, vars) = ctx(2, "x");
    let square = CIdeal::from_generators(vec![parse(&field, &vars, "x^2")]).map_err(|e| e.to_string())?;
    let outcome = fedder_fsplit(&square, 1).map_err(|e| e.to_string())?;
    ensure(matches!(outcome, FedderOutcome::NotSplit { .. }), || {
        "x^2 reported split".into()
    })?;

    for (label, text) in [
        ("x^2 + y", "p 2\nvars x y\npoly f: x^2 + y\n"),
        ("p 6", "p 6\nvars x y\npoly f: x*y\n"),
    ] {
        let out = run_cli(&["check"], text);
        ensure(out.status.code() == Some(2), || {
            format!("{label}: exit {:?}", out.status.code())
        })?;
    }

    let (field, vars) = ctx(3, "x y z w");
    let q = disjoint_factorization(&parse(&field, &vars, "x*y + z*w")).map_err(|e| e.to_string())?;
    let cert = build_regularity_certificate(&q, 2).map_err(|e| e.to_string())?;
    let mut bad = cert.clone();
    let mut exps = bad.stages[0].witness.exps().to_vec();
    exps[1] += 5;
    bad.stages[0].witness = Monomial::from_exps(exps);
    ensure(!verify_regularity_certificate(&q, &bad).is_valid(), || {
        "mutated witness accepted".into()
    })?;
    Ok("x^2 is not split, bad inputs exit 2, mutated witness rejected".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("random square-free supported suite", suite_passes),
        ("dfpt formulas on curated inputs", dfpt_formulas),
        ("bracket kernel equivalence", kernel_equivalence),
        ("factorization oracle", factorization_oracle),
        ("factor counts over extensions", geometric_stability),
        ("modification pipeline", modification),
        ("negative controls", negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} ({:.2?})", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
