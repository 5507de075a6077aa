//! Greedy test-case reduction. A candidate is kept only if it still passes
//! the static checks and still fails the property being shrunk.

use std::collections::BTreeSet;

use crate::context::preprocess;
use crate::syntax::{desugar, ConsumerBody, Def, Expr, Program};
use crate::transform::typecheck;
use crate::wellformed::check;

use super::props::{check_property, Limits, Property, Transformer};

fn valid(p: &Program) -> bool {
    let Ok(ctx) = preprocess(p) else { return false };
    check(p, &ctx).is_ok() && typecheck(p).is_ok()
}

fn fails(p: &Program, selected: &BTreeSet<String>, prop: Property, tr: &Transformer, limits: Limits) -> bool {
    valid(p) && check_property(prop, p, selected, tr, limits).is_err()
}

/// Smaller versions of `e`: its subexpressions and a few literals. Callers
/// filter out the ill-typed ones.
fn smaller_exprs(e: &Expr) -> Vec<Expr> {
    let mut out: Vec<Expr> = e.children().into_iter().cloned().collect();
    for lit in [Expr::Int(0), Expr::Bool(true)] {
        if e != &lit && e.size() > 1 {
            out.push(lit);
        }
    }
    out
}

fn candidates(p: &Program) -> Vec<Program> {
    let mut out = Vec::new();
    for i in 0..p.defs.len() {
        let mut q = p.clone();
        q.defs.remove(i);
        out.push(q);
    }
    for (i, def) in p.defs.iter().enumerate() {
        match def {
            Def::Consumer(c) => {
                if let ConsumerBody::Match(cs) = &c.body {
                    for k in 0..cs.len() {
                        let mut q = p.clone();
                        if let Def::Consumer(c) = &mut q.defs[i] {
                            if let ConsumerBody::Match(cs) = &mut c.body {
                                cs.remove(k);
                            }
                        }
                        out.push(q);
                    }
                }
            }
            Def::Generator(g) => {
                for k in 0..g.funs.len() {
                    let mut q = p.clone();
                    if let Def::Generator(g) = &mut q.defs[i] {
                        g.funs.remove(k);
                    }
                    out.push(q);
                }
            }
            Def::Interface(it) => {
                for k in 0..it.dtrs.len() {
                    let mut q = p.clone();
                    if let Def::Interface(it) = &mut q.defs[i] {
                        it.dtrs.remove(k);
                    }
                    out.push(q);
                    if it.dtrs[k].body.is_some() {
                        let mut q = p.clone();
                        if let Def::Interface(it) = &mut q.defs[i] {
                            it.dtrs[k].body = None;
                        }
                        out.push(q);
                    }
                }
            }
            _ => {}
        }
    }
    for e in smaller_exprs(&p.main) {
        let mut q = p.clone();
        q.main = e;
        out.push(q);
    }
    for (i, def) in p.defs.iter().enumerate() {
        for (k, body) in def.exprs().into_iter().enumerate() {
            for e in smaller_exprs(body) {
                let mut q = p.clone();
                *q.defs[i].exprs_mut().remove(k) = e;
                out.push(q);
            }
        }
    }
    out
}

/// Shrinks `program` while it keeps failing `prop`. Returns the input
/// unchanged if it does not fail to begin with.
pub fn shrink(
    program: &Program,
    selected: &BTreeSet<String>,
    prop: Property,
    tr: &Transformer,
    limits: Limits,
) -> (Program, BTreeSet<String>) {
    let mut cur = desugar(program);
    let mut sel = selected.clone();
    if !fails(&cur, &sel, prop, tr, limits) {
        return (cur, sel);
    }
    // Every accepted candidate is strictly smaller, so this terminates; the
    // cap only bounds the time spent.
    for _ in 0..1_000 {
        let next = candidates(&cur).into_iter().find_map(|q| {
            let names: BTreeSet<String> = q.type_names().into_iter().collect();
            let qs: BTreeSet<String> = sel.intersection(&names).cloned().collect();
            fails(&q, &qs, prop, tr, limits).then_some((q, qs))
        });
        match next {
            Some((q, qs)) => {
                cur = q;
                sel = qs;
            }
            None => break,
        }
    }
    (cur, sel)
}
