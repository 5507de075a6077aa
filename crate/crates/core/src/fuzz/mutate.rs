//! Deliberately broken transformers. Each mutant runs the real
//! transformation and then damages its output in one specific way; the
//! property checks should notice.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::context::{preprocess, GlobalCtx};
use crate::diagnostic::Diagnostic;
use crate::syntax::{ConsumerBody, Def, Expr, Pattern, Program, SELF, THIS};
use crate::transform::{transform, TransformResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mutant {
    /// Swaps the bodies of two clauses of one consumer.
    SwapClauseBodies,
    /// Removes a wildcard clause.
    DropWildcard,
    /// Leaves `this` in a generated consumer clause.
    KeepThisInClause,
    /// Leaves `self` in a generated method.
    KeepSelfInMethod,
    /// Removes a class method that overrides an interface default.
    DropOverride,
    /// Turns an interface default back into a bare declaration.
    DropDefault,
    /// Swaps the bodies of two methods of one class.
    SwapMethodBodies,
    /// Swaps two pattern variables of a clause.
    SwapPatternVars,
    /// Turns one rewritten call back into the other call form.
    UntranslatedCall,
    /// Adds one to an integer literal.
    OffByOne,
}

impl Mutant {
    pub const ALL: [Mutant; 10] = [
        Mutant::SwapClauseBodies,
        Mutant::DropWildcard,
        Mutant::KeepThisInClause,
        Mutant::KeepSelfInMethod,
        Mutant::DropOverride,
        Mutant::DropDefault,
        Mutant::SwapMethodBodies,
        Mutant::SwapPatternVars,
        Mutant::UntranslatedCall,
        Mutant::OffByOne,
    ];

    /// Applies the damage to a transformed program; `None` when the program
    /// has nothing this mutant can touch.
    pub fn apply(self, out: &Program, input: &Program) -> Option<Program> {
        let mut p = out.clone();
        let changed = match self {
            Mutant::SwapClauseBodies => p.defs.iter_mut().any(|d| match d {
                Def::Consumer(c) => match &mut c.body {
                    ConsumerBody::Match(cs) => {
                        match (0..cs.len()).find(|&i| cs[i + 1..].iter().any(|o| o.body != cs[i].body)) {
                            Some(i) => {
                                let j = (i + 1..cs.len())
                                    .find(|&j| cs[j].body != cs[i].body)
                                    .expect("found above");
                                let (a, b) = (cs[i].body.clone(), cs[j].body.clone());
                                cs[i].body = b;
                                cs[j].body = a;
                                true
                            }
                            None => false,
                        }
                    }
                    ConsumerBody::Bare(_) => false,
                },
                _ => false,
            }),
            Mutant::DropWildcard => p.defs.iter_mut().any(|d| match d {
                Def::Consumer(c) => match &mut c.body {
                    ConsumerBody::Match(cs) if cs.last().is_some_and(|c| c.is_wildcard()) => {
                        cs.pop();
                        true
                    }
                    _ => false,
                },
                _ => false,
            }),
            Mutant::KeepThisInClause => p.defs.iter_mut().any(|d| match d {
                Def::Consumer(_) => d
                    .exprs_mut()
                    .into_iter()
                    .find(|e| e.mentions(SELF))
                    .map(|e| e.rename_in_place(SELF, THIS))
                    .is_some(),
                _ => false,
            }),
            Mutant::KeepSelfInMethod => p.defs.iter_mut().any(|d| match d {
                Def::Generator(_) | Def::Interface(_) => d
                    .exprs_mut()
                    .into_iter()
                    .find(|e| e.mentions(THIS))
                    .map(|e| e.rename_in_place(THIS, SELF))
                    .is_some(),
                _ => false,
            }),
            Mutant::DropOverride => {
                let defaults: BTreeSet<(String, String)> = p
                    .defs
                    .iter()
                    .filter_map(|d| match d {
                        Def::Interface(i) => Some(i),
                        _ => None,
                    })
                    .flat_map(|i| {
                        i.dtrs
                            .iter()
                            .filter(|d| d.body.is_some())
                            .map(|d| (i.name.clone(), d.name.clone()))
                    })
                    .collect();
                p.defs.iter_mut().any(|d| match d {
                    Def::Generator(g) => {
                        match g
                            .funs
                            .iter()
                            .position(|f| defaults.contains(&(g.parent.clone(), f.name.clone())))
                        {
                            Some(n) => {
                                g.funs.remove(n);
                                true
                            }
                            None => false,
                        }
                    }
                    _ => false,
                })
            }
            Mutant::DropDefault => p.defs.iter_mut().any(|d| match d {
                Def::Interface(i) => i
                    .dtrs
                    .iter_mut()
                    .find(|d| d.body.is_some())
                    .map(|d| d.body = None)
                    .is_some(),
                _ => false,
            }),
            Mutant::SwapMethodBodies => p.defs.iter_mut().any(|d| match d {
                Def::Generator(g) => {
                    let n = g.funs.len();
                    let pair = (0..n)
                        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                        .find(|&(i, j)| g.funs[i].ret == g.funs[j].ret && g.funs[i].body != g.funs[j].body);
                    match pair {
                        Some((i, j)) => {
                            let a = g.funs[i].body.take();
                            g.funs[i].body = g.funs[j].body.take();
                            g.funs[j].body = a;
                            true
                        }
                        None => false,
                    }
                }
                _ => false,
            }),
            Mutant::SwapPatternVars => p.defs.iter_mut().any(|d| match d {
                Def::Consumer(c) => match &mut c.body {
                    ConsumerBody::Match(cs) => cs
                        .iter_mut()
                        .find_map(|cl| match &mut cl.pattern {
                            Pattern::Ctor(_, vars) if vars.len() >= 2 => {
                                vars.swap(0, 1);
                                Some(())
                            }
                            _ => None,
                        })
                        .is_some(),
                    ConsumerBody::Bare(_) => false,
                },
                _ => false,
            }),
            Mutant::UntranslatedCall => {
                let ctx = preprocess(input).ok()?;
                let changed = p
                    .defs
                    .iter_mut()
                    .any(|d| d.exprs_mut().into_iter().any(|e| flip_call(e, &ctx)));
                changed || flip_call(&mut p.main, &ctx)
            }
            Mutant::OffByOne => {
                let changed = p.defs.iter_mut().any(|d| d.exprs_mut().into_iter().any(bump_int));
                changed || bump_int(&mut p.main)
            }
        };
        changed.then_some(p)
    }

    /// A transformer that runs the real transformation and applies this
    /// mutant to its output whenever possible.
    pub fn transformer(
        self,
    ) -> impl Fn(&Program, &BTreeSet<String>) -> Result<TransformResult, Vec<Diagnostic>> + Sync {
        move |p, s| {
            let mut r = transform(p, s)?;
            if let Some(m) = self.apply(&r.program, p) {
                r.program = m;
            }
            Ok(r)
        }
    }
}

impl fmt::Display for Mutant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Flips the first call on a type that changed style: a consumer call on a
/// type that was an interface goes back to a selection, and vice versa.
fn flip_call(e: &mut Expr, input: &GlobalCtx) -> bool {
    let flipped = match e {
        Expr::App { name, first, args } if was_destructor(input, name) => {
            Some(Expr::sel((**first).clone(), name.clone(), args.clone()))
        }
        Expr::Sel { recv, name, args } if was_consumer(input, name) => {
            Some(Expr::app(name.clone(), (**recv).clone(), args.clone()))
        }
        _ => None,
    };
    if let Some(f) = flipped {
        *e = f;
        return true;
    }
    e.children_mut().into_iter().any(|c| flip_call(c, input))
}

fn was_destructor(ctx: &GlobalCtx, f: &str) -> bool {
    ctx.dtr.values().any(|fs| fs.iter().any(|g| g == f))
}

fn was_consumer(ctx: &GlobalCtx, f: &str) -> bool {
    ctx.csm.values().any(|fs| fs.iter().any(|g| g == f))
}

fn bump_int(e: &mut Expr) -> bool {
    if let Expr::Int(n) = e {
        *n = n.wrapping_add(1);
        return true;
    }
    e.children_mut().into_iter().any(bump_int)
}
