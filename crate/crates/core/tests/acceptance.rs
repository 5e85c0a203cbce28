//! Acceptance run: one PASS/FAIL line per criterion, exact comparisons only.

use std::process::ExitCode;
use std::time::Instant;

use klein_tqft::dsl;
use klein_tqft::gv::{default_hmax, gv_verify};
use klein_tqft::suites::{self, SuiteReport};
use klein_tqft::tqft::Context;
use klein_tqft::Result;

type Outcome = Result<(bool, String)>;

fn from_reports(reports: Vec<SuiteReport>) -> (bool, String) {
    let total: usize = reports.iter().map(|r| r.cases.len()).sum();
    let failed: Vec<String> = reports.iter().flat_map(|r| r.failures().map(|c| c.name.clone())).collect();
    if failed.is_empty() {
        (true, format!("{total} cases"))
    } else {
        (false, format!("{} of {total} failed, first: {}", failed.len(), failed[0]))
    }
}

// Closed formula against the composition C A^{-(g-1)} K^g U.
fn closed_vs_composition() -> Outcome {
    let mut n = 0;
    for d in 1..=6 {
        let ctx = Context::new(d)?;
        for g in 1..=3u32 {
            let k = g as i64 - 1;
            let a = ctx.closed_invariant(g, k)?;
            let b = ctx.closed_invariant_composition(g, k)?;
            if a != b {
                return Ok((false, format!("d={d} g={g}: {a} vs {b}")));
            }
            n += 1;
        }
    }
    Ok((true, format!("{n} cases")))
}

fn sphere() -> Outcome {
    Ok(from_reports(vec![suites::sphere_cy(8, 20)?]))
}

fn torus() -> Outcome {
    Ok(from_reports(vec![suites::torus(10)?]))
}

fn klein() -> Outcome {
    Ok(from_reports((1..=8).map(suites::klein_axioms).collect::<Result<_>>()?))
}

fn splitting() -> Outcome {
    let mut reps = Vec::new();
    for d in 1..=4 {
        for g in 0..=3 {
            for k in -2..=2 {
                reps.push(suites::splitting(d, g, k, 2)?);
            }
        }
    }
    Ok(from_reports(reps))
}

fn sfs() -> Outcome {
    Ok(from_reports((1..=10).map(suites::sfs).collect::<Result<_>>()?))
}

fn r_alpha() -> Outcome {
    Ok(from_reports((1..=10).map(suites::r_alpha).collect::<Result<_>>()?))
}

fn bridge() -> Outcome {
    let mut reps = Vec::new();
    for d in 1..=5 {
        for g in 0..=3 {
            reps.push(suites::complex_bridge(d, g, 16)?);
        }
    }
    Ok(from_reports(reps))
}

fn gv() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (g, dmax) in [(0u32, 5usize), (1, 6), (2, 5), (3, 5)] {
        let out = gv_verify(g, dmax, default_hmax(g, dmax), 0)?;
        ok &= out.pass();
        if g <= 1 {
            ok &= out.closed_form == Some(true);
        }
        notes.push(format!("g={g}: {}", if out.pass() { "ok" } else { "fail" }));
    }
    Ok((ok, notes.join(", ")))
}

fn functoriality() -> Outcome {
    let rep = suites::functoriality(4, 200, 0x5eed)?;
    Ok(from_reports(vec![rep]))
}

fn main() -> ExitCode {
    // A quick sanity gate on the DSL before the heavy criteria.
    assert!(dsl::typecheck(&dsl::parse("cup . cap").unwrap()).unwrap() == (0, 0));

    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("closed formula = operator composition (d ≤ 6, g = 1..3)", closed_vs_composition),
        ("sphere at level -1: exp form to q^8, u^20; connected part", sphere),
        ("torus at level 0 to q^10; self-conjugate counts", torus),
        ("Klein axioms and elementary cobordisms (d ≤ 8)", klein),
        ("splitting formulas (g ≤ 3, |k| ≤ 2, d ≤ 4)", splitting),
        ("signed Frobenius–Schur indicators and identity (d ≤ 10)", sfs),
        ("level-0 cap coefficients r_α (d ≤ 10); sq(4,3,3,2,1)", r_alpha),
        ("doublets reproduce rotated complex invariants (d ≤ 5, g ≤ 3)", bridge),
        ("BPS integrality, parity, vanishing, closed forms, re-synthesis", gv),
        ("DSL functoriality on 200 random expressions (d ≤ 4)", functoriality),
    ];

    let results: Vec<(usize, Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .enumerate()
            .map(|(i, (_, f))| {
                s.spawn(move || {
                    let t = Instant::now();
                    let r = f();
                    (i, r, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });

    let mut all = true;
    for (i, r, secs) in results {
        let (pass, detail) = match r {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        println!(
            "{} criterion {:>2}: {} [{detail}; {secs:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            criteria[i].0
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
