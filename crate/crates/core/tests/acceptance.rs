//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use food_core::corpus;
use food_core::fuzz::{honest, run_properties_with, GenConfig, Limits, Mutant, Property, Transformer};
use food_core::{canonicalize, desugar, eval, parse, pretty, transform, Def, EvalOutcome, Program, Value};

const SEED: u64 = 42;
const FUEL: u64 = 100_000;
const ROUND_TRIP_TRIALS: usize = 1_000;
const DIFFERENTIAL_TRIALS: usize = 1_000;
const TYPE_SAFETY_TRIALS: usize = 500;
const DUALITY_TRIALS: usize = 500;
const MUTANT_TRIALS: usize = 300;
const GOLDEN_BUDGET: Duration = Duration::from_secs(1);
const DIFFERENTIAL_BUDGET: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn limits() -> Limits {
    Limits {
        fuel: FUEL,
        ..Limits::default()
    }
}

fn prog(src: &str) -> Program {
    desugar(&parse(src).expect("corpus parses"))
}

fn sel(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Every corpus program under every single-type selection and under the
/// full selection.
fn golden_subjects() -> Vec<(&'static str, Program, BTreeSet<String>)> {
    let mut out = Vec::new();
    for (name, src) in corpus::ALL {
        let p = prog(src);
        let types = p.type_names();
        out.push((*name, p.clone(), types.iter().cloned().collect()));
        for t in &types {
            out.push((*name, p.clone(), sel(&[t])));
        }
    }
    out
}

fn check_golden(props: &[Property], tr: &Transformer) -> Result<usize, String> {
    let subjects = golden_subjects();
    for (name, p, s) in &subjects {
        for &prop in props {
            food_core::fuzz::check_property(prop, p, s, tr, limits())
                .map_err(|e| format!("{name} {s:?} {prop}: {e}"))?;
        }
    }
    Ok(subjects.len())
}

fn check_fuzz(props: &[Property], trials: usize) -> Result<(usize, usize), String> {
    let report = run_properties_with(&GenConfig::with_seed(SEED), trials, limits(), &honest, props, true);
    let summary = report.summary();
    match report.trials.iter().find(|t| !t.failures.is_empty()) {
        Some(t) => {
            let f = &t.failures[0];
            Err(format!(
                "{} of {} trials failed; trial {} {}: {}\n{}",
                summary.failed_trials, summary.trials, t.trial, f.property, f.message, f.witness
            ))
        }
        None => Ok((summary.terminating, summary.exhausted)),
    }
}

fn golden_transforms() -> Outcome {
    let pairs: [(&str, &[&str], &str); 10] = [
        (corpus::SETS_OOP, &["Set"], corpus::SETS_FP),
        (corpus::SETS_FP, &["Set"], corpus::SETS_OOP),
        (corpus::EXP_OOP, &["Exp"], corpus::EXP_FP),
        (corpus::EXP_FP, &["Exp"], corpus::EXP_OOP),
        (corpus::SETLIST_OOP, &["Set"], corpus::SETLIST_SET_FP),
        (corpus::SETLIST_SET_FP, &["Set"], corpus::SETLIST_OOP),
        (corpus::SETLIST_FP, &["Set"], corpus::SETLIST_SET_OOP),
        (corpus::SETLIST_SET_OOP, &["Set"], corpus::SETLIST_FP),
        (corpus::SETLIST_OOP, &["Set", "List"], corpus::SETLIST_FP),
        (corpus::SETLIST_SET_FP, &["Set", "List"], corpus::SETLIST_SET_OOP),
    ];
    let start = Instant::now();
    for (i, (from, types, to)) in pairs.iter().enumerate() {
        let input = prog(from);
        let out = transform(&input, &sel(types))
            .map_err(|e| format!("pair {i}: {e:?}"))?
            .program;
        if canonicalize(&out) != canonicalize(&prog(to)) {
            return Err(format!(
                "pair {i} differs from the expected program:\n{}",
                pretty(&out).unwrap()
            ));
        }
        // Definitions of unselected types come out exactly as they went in.
        let untouched = |p: &Program| {
            p.defs
                .iter()
                .filter(|d| !touches(d, types))
                .map(pretty_def)
                .collect::<Vec<_>>()
        };
        if untouched(&out) != untouched(&input) {
            return Err(format!("pair {i}: unselected definitions changed"));
        }
    }
    let took = start.elapsed();
    if took > GOLDEN_BUDGET {
        return Err(format!("took {took:?}, budget {GOLDEN_BUDGET:?}"));
    }
    Ok(format!("{} pairs in {took:?}", pairs.len()))
}

/// Whether `d` belongs to one of `types`.
fn touches(d: &Def, types: &[&str]) -> bool {
    let owner = match d {
        Def::Datatype(x) => x.name.as_str(),
        Def::Interface(x) => x.name.as_str(),
        Def::Constructor(x) => x.parent.as_str(),
        Def::Generator(x) => x.parent.as_str(),
        Def::Consumer(x) => x.self_type.as_str(),
    };
    types.contains(&owner)
}

fn pretty_def(d: &Def) -> String {
    pretty(&Program::new(vec![d.clone()], food_core::Expr::Int(0))).unwrap()
}

fn round_trip() -> Outcome {
    let n = check_golden(&[Property::RoundTrip], &honest)?;
    check_fuzz(&[Property::RoundTrip], ROUND_TRIP_TRIALS)?;
    Ok(format!("{n} golden subjects, {ROUND_TRIP_TRIALS} generated programs"))
}

fn semantics_preservation() -> Outcome {
    let start = Instant::now();
    let n = check_golden(&[Property::DifferentialEval], &honest)?;
    let (terminating, exhausted) = check_fuzz(&[Property::DifferentialEval], DIFFERENTIAL_TRIALS)?;
    let took = start.elapsed();
    if took > DIFFERENTIAL_BUDGET {
        return Err(format!("took {took:?}, budget {DIFFERENTIAL_BUDGET:?}"));
    }
    Ok(format!(
        "{n} golden subjects, {DIFFERENTIAL_TRIALS} generated programs ({terminating} values, {exhausted} out of fuel at {FUEL}) in {took:?}"
    ))
}

fn type_safety() -> Outcome {
    let props = [
        Property::StepPreservation,
        Property::Progress,
        Property::TypePreservation,
        Property::WellFormedPreservation,
    ];
    let n = check_golden(&props, &honest)?;
    check_fuzz(&props, TYPE_SAFETY_TRIALS)?;
    Ok(format!("{n} golden subjects, {TYPE_SAFETY_TRIALS} generated programs"))
}

fn duality() -> Outcome {
    let props = [Property::ContextDuality, Property::LookupDuality];
    let n = check_golden(&props, &honest)?;
    check_fuzz(&props, DUALITY_TRIALS)?;
    Ok(format!("{n} golden subjects, {DUALITY_TRIALS} generated programs"))
}

fn dispatch_regression() -> Outcome {
    let out = transform(&prog(corpus::SETLIST_OOP), &sel(&["Set"]))
        .map_err(|e| format!("{e:?}"))?
        .program;
    // Definition placement is not part of the comparison.
    let printed = pretty(&canonicalize(&out)).unwrap();
    let expected = pretty(&canonicalize(&prog(corpus::SETLIST_SET_FP))).unwrap();
    if printed != expected {
        return Err(format!("output differs:\n{printed}"));
    }
    for line in [
        "def contains(i: Int): Bool = n == i || x.contains(i)",
        "case Insert(s, n) => i == n || contains(s)(i)",
    ] {
        if !printed.contains(line) {
            return Err(format!("missing `{line}` in:\n{printed}"));
        }
    }
    let back = transform(&prog(corpus::SETLIST_FP), &sel(&["Set"]))
        .map_err(|e| format!("{e:?}"))?
        .program;
    let printed = pretty(&canonicalize(&back)).unwrap();
    if printed != pretty(&canonicalize(&prog(corpus::SETLIST_SET_OOP))).unwrap() {
        return Err(format!("functional-to-object output differs:\n{printed}"));
    }
    Ok("list calls kept, set calls rewritten, in both directions".into())
}

const MUTANT_PROPERTIES: [Property; 8] = Property::ALL;

fn mutation_sensitivity() -> Outcome {
    let golden = golden_subjects();
    let mut caught = Vec::new();
    for m in Mutant::ALL {
        let tr = m.transformer();
        let mut by: BTreeSet<Property> = MUTANT_PROPERTIES
            .into_iter()
            .filter(|&prop| {
                golden
                    .iter()
                    .any(|(_, p, s)| food_core::fuzz::check_property(prop, p, s, &tr, limits()).is_err())
            })
            .collect();
        if by.is_empty() {
            let report = run_properties_with(
                &GenConfig::with_seed(SEED),
                MUTANT_TRIALS,
                limits(),
                &tr,
                &MUTANT_PROPERTIES,
                false,
            );
            by.extend(report.trials.iter().flat_map(|t| t.failures.iter().map(|f| f.property)));
        }
        if by.is_empty() {
            return Err(format!("mutant {m} survived"));
        }
        let by: Vec<String> = by.iter().map(|p| p.to_string()).collect();
        caught.push(format!("{m} by {}", by.join(",")));
    }
    Ok(format!(
        "all {} mutants caught: {}",
        Mutant::ALL.len(),
        caught.join("; ")
    ))
}

fn normalizer_value() -> Value {
    let obj = |c: &str, vs: Vec<Value>| Value::Obj(c.into(), vs);
    obj(
        "ValOr",
        vec![
            obj("ValNegVar", vec![Value::Int(1)]),
            obj(
                "ValOr",
                vec![
                    obj("ValPosVar", vec![Value::Int(2)]),
                    obj("ValNegVar", vec![Value::Int(3)]),
                ],
            ),
        ],
    )
}

fn run(p: &Program) -> Result<EvalOutcome, String> {
    eval(p, FUEL).map_err(|e| format!("{e:?}"))
}

fn normalizer_iteration() -> Outcome {
    let ctx = sel(&["Context"]);
    // First iteration: continuations as objects, then switched to data.
    let iter1 = prog(corpus::BOOL_ITER1);
    let iter1_fp = transform(&iter1, &ctx).map_err(|e| format!("{e:?}"))?.program;
    if run(&iter1)? != run(&iter1_fp)? {
        return Err("first iteration evaluates differently after the switch".into());
    }
    // Second iteration: new consumers written against the data view.
    let additions = parse(corpus::BOOL_ITER2_ADDITIONS).map_err(|e| format!("{e:?}"))?;
    let mut iter2_fp = iter1_fp.clone();
    iter2_fp.defs.extend(additions.defs);
    iter2_fp.main = additions.main;
    let iter2_fp = desugar(&iter2_fp);
    if canonicalize(&iter2_fp) != canonicalize(&prog(corpus::BOOL_FP_CTX)) {
        return Err(format!(
            "second iteration is not the data-style normalizer:\n{}",
            pretty(&iter2_fp).unwrap()
        ));
    }
    // And back to objects.
    let iter2_oo = transform(&iter2_fp, &ctx).map_err(|e| format!("{e:?}"))?.program;
    if canonicalize(&iter2_oo) != canonicalize(&prog(corpus::BOOL_OOP_CTX)) {
        return Err(format!(
            "switching back does not give the object-style normalizer:\n{}",
            pretty(&iter2_oo).unwrap()
        ));
    }
    let want = EvalOutcome::Value(normalizer_value());
    for (name, p) in [("data", &iter2_fp), ("objects", &iter2_oo)] {
        let got = run(p)?;
        if got != want {
            return Err(format!("{name} style gives {got}, expected {want}"));
        }
        for prop in [Property::RoundTrip, Property::DifferentialEval] {
            food_core::fuzz::check_property(prop, p, &ctx, &honest, limits())
                .map_err(|e| format!("{name} style {prop}: {e}"))?;
        }
    }
    Ok(format!("normalizes to {want} in both styles"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("golden transforms", golden_transforms),
        ("round trip", round_trip),
        ("semantics preservation", semantics_preservation),
        ("type safety", type_safety),
        ("context and lookup duality", duality),
        ("type-directed dispatch", dispatch_regression),
        ("mutation sensitivity", mutation_sensitivity),
        ("normalizer iteration", normalizer_iteration),
    ];
    let mut ok = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                ok = false;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
