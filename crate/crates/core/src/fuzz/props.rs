//! Executable versions of the soundness results, checked one program at a
//! time against a (possibly deliberately broken) transformer.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::context::{ctx_differences, preprocess, restrict, translate_ctx, GlobalCtx, TypeEnv};
use crate::diagnostic::{render, Diagnostic};
use crate::interp::{csm_body, dtr_body, eval_expr, step, Body, EvalOutcome, StepOutcome};
use crate::syntax::{canonicalize, desugar, Program, Type, SELF, THIS};
use crate::transform::{transform, transform_expr, typecheck, typecheck_expr, TransformResult};
use crate::wellformed::check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Property {
    /// Transforming twice gives back the input, up to definition placement.
    RoundTrip,
    /// The transformed program has the same type.
    TypePreservation,
    /// The transformed program passes the static checks.
    WellFormedPreservation,
    /// Every evaluation step keeps the main expression's type.
    StepPreservation,
    /// Evaluation never gets stuck.
    Progress,
    /// Input and transformed program evaluate to the same outcome in the
    /// same number of steps.
    DifferentialEval,
    /// The transformed program's context is the translated context.
    ContextDuality,
    /// Destructor bodies become consumer bodies and back, up to
    /// `this`/`self` renaming.
    LookupDuality,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::RoundTrip,
        Property::TypePreservation,
        Property::WellFormedPreservation,
        Property::StepPreservation,
        Property::Progress,
        Property::DifferentialEval,
        Property::ContextDuality,
        Property::LookupDuality,
    ];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Anything that rewrites a program for a set of selected types.
pub type Transformer = dyn Fn(&Program, &BTreeSet<String>) -> Result<TransformResult, Vec<Diagnostic>> + Sync;

/// The real transformation.
pub fn honest(p: &Program, s: &BTreeSet<String>) -> Result<TransformResult, Vec<Diagnostic>> {
    transform(p, s)
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Step budget for evaluation-based properties.
    pub fuel: u64,
    /// Step budget for the per-step typing check, which is costlier.
    pub step_fuel: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            fuel: crate::DEFAULT_FUEL,
            step_fuel: 5_000,
        }
    }
}

fn diags(ds: Vec<Diagnostic>) -> String {
    render(&ds).trim_end().to_string()
}

/// Checks one property of `program` (desugared internally).
pub fn check_property(
    prop: Property,
    program: &Program,
    selected: &BTreeSet<String>,
    tr: &Transformer,
    limits: Limits,
) -> Result<(), String> {
    let p = desugar(program);
    let ctx = preprocess(&p).map_err(diags)?;
    match prop {
        Property::RoundTrip => {
            let there = tr(&p, selected).map_err(|e| format!("forward transform failed: {}", diags(e)))?;
            let back = tr(&there.program, selected).map_err(|e| format!("backward transform failed: {}", diags(e)))?;
            if canonicalize(&back.program) != canonicalize(&p) {
                return Err("transforming twice does not give back the program".into());
            }
            if there.program_type != back.program_type {
                return Err(format!(
                    "program type changed: {} then {}",
                    there.program_type, back.program_type
                ));
            }
            Ok(())
        }
        Property::TypePreservation => {
            let before = typecheck(&p).map_err(diags)?;
            let there = tr(&p, selected).map_err(|e| format!("transform failed: {}", diags(e)))?;
            let after = typecheck(&there.program).map_err(|e| format!("output does not typecheck: {}", diags(e)))?;
            if before != after || there.program_type != before {
                return Err(format!("type {before} became {after}"));
            }
            Ok(())
        }
        Property::WellFormedPreservation => {
            let there = tr(&p, selected).map_err(|e| format!("transform failed: {}", diags(e)))?;
            let out = desugar(&there.program);
            let octx = preprocess(&out).map_err(|e| format!("output context: {}", diags(e)))?;
            check(&out, &octx).map_err(|e| format!("output is not well formed: {}", diags(e)))
        }
        Property::StepPreservation => step_preservation(&p, &ctx, limits.step_fuel),
        Property::Progress => match eval_expr(&p.main, &ctx, limits.fuel).0 {
            EvalOutcome::Stuck { expr, reason } => Err(format!("stuck at `{expr}`: {reason}")),
            _ => Ok(()),
        },
        Property::DifferentialEval => {
            let there = tr(&p, selected).map_err(|e| format!("transform failed: {}", diags(e)))?;
            let out = desugar(&there.program);
            let octx = preprocess(&out).map_err(|e| format!("output context: {}", diags(e)))?;
            let (a, n) = eval_expr(&p.main, &ctx, limits.fuel);
            let (b, m) = eval_expr(&out.main, &octx, limits.fuel);
            let same = match (&a, &b) {
                (EvalOutcome::Value(x), EvalOutcome::Value(y)) => x == y,
                (EvalOutcome::FuelExhausted, EvalOutcome::FuelExhausted) => true,
                _ => false,
            };
            if !same {
                return Err(format!("input gives {a}, output gives {b}"));
            }
            if n != m {
                return Err(format!("input takes {n} steps, output takes {m}"));
            }
            Ok(())
        }
        Property::ContextDuality => {
            let there = tr(&p, selected).map_err(|e| format!("transform failed: {}", diags(e)))?;
            let octx = preprocess(&desugar(&there.program)).map_err(|e| format!("output context: {}", diags(e)))?;
            let expected = translate_ctx(&restrict(&ctx, selected).map_err(|e| e.message)?);
            let actual = restrict(&octx, selected).map_err(|e| e.message)?;
            let diff = ctx_differences(&expected, &actual);
            if diff.is_empty() {
                Ok(())
            } else {
                Err(format!("contexts differ in {}", diff.join(", ")))
            }
        }
        Property::LookupDuality => {
            let there = tr(&p, selected).map_err(|e| format!("transform failed: {}", diags(e)))?;
            let octx = preprocess(&desugar(&there.program)).map_err(|e| format!("output context: {}", diags(e)))?;
            let rctx = restrict(&ctx, selected).map_err(|e| e.message)?;
            lookup_duality(&ctx, &rctx, &octx)
        }
    }
}

fn step_preservation(p: &Program, ctx: &GlobalCtx, fuel: u64) -> Result<(), String> {
    let ty = typecheck(p).map_err(diags)?;
    let mut cur = p.main.clone();
    for n in 0..fuel {
        match step(&cur, ctx) {
            StepOutcome::Done(_) => return Ok(()),
            StepOutcome::Stuck(reason) => return Err(format!("stuck after {n} steps at `{cur}`: {reason}")),
            StepOutcome::Stepped(next) => {
                let t = typecheck_expr(&next, ctx).map_err(|e| format!("step {} is ill typed: {e}", n + 1))?;
                if t != ty {
                    return Err(format!("step {} has type {t}, expected {ty}", n + 1));
                }
                cur = next;
            }
        }
    }
    Ok(())
}

/// Expected body on the other side: translate under the restricted
/// context, then rename the receiver binder.
fn expected_body(rctx: &GlobalCtx, b: &Body, env: TypeEnv, from: &str, to: &str) -> Result<Body, String> {
    let (e, _) = transform_expr(&b.body, rctx, &env)?;
    Ok(Body {
        fields: b.fields.clone(),
        params: b.params.clone(),
        body: e.rename(from, to),
    })
}

fn lookup_duality(ctx: &GlobalCtx, rctx: &GlobalCtx, octx: &GlobalCtx) -> Result<(), String> {
    for d in &rctx.it {
        let Some(iface) = ctx.interface(d) else { continue };
        for c in rctx.gen(d) {
            let g = ctx.generator(c).ok_or_else(|| format!("missing class `{c}`"))?;
            for f in rctx.dtr(d) {
                let Some(before) = dtr_body(f, c, ctx) else { continue };
                let decl = iface.dtrs.iter().find(|x| &x.name == f).expect("declared");
                let mut env = TypeEnv::new().with(THIS, Type::named(d));
                if g.fun(f).is_some() {
                    env.bind_params(&g.fields);
                }
                env.bind_params(&decl.params);
                let want = expected_body(rctx, &before, env, THIS, SELF)?;
                let got = csm_body(f, c, octx);
                if got.as_ref() != Some(&want) {
                    return Err(format!("destructor `{f}` of `{c}` has no matching consumer case"));
                }
            }
        }
    }
    for d in &rctx.dt {
        for c in rctx.ctr(d) {
            let k = ctx.constructor(c).ok_or_else(|| format!("missing constructor `{c}`"))?;
            for f in rctx.csm(d) {
                let Some(before) = csm_body(f, c, ctx) else { continue };
                let consumer = ctx.consumer(f, d).expect("listed consumer");
                let mut env = TypeEnv::new().with(SELF, Type::named(d));
                if consumer.clause_for(c).is_some() {
                    env.bind_params(&k.fields);
                }
                env.bind_params(&consumer.params);
                let want = expected_body(rctx, &before, env, SELF, THIS)?;
                let got = dtr_body(f, c, octx);
                if got.as_ref() != Some(&want) {
                    return Err(format!("consumer `{f}` case `{c}` has no matching destructor"));
                }
            }
        }
    }
    Ok(())
}

/// Runs every property and returns the failures.
pub fn check_all(
    program: &Program,
    selected: &BTreeSet<String>,
    tr: &Transformer,
    limits: Limits,
) -> Vec<(Property, String)> {
    Property::ALL
        .iter()
        .filter_map(|&p| check_property(p, program, selected, tr, limits).err().map(|e| (p, e)))
        .collect()
}
