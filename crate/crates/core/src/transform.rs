//! Type-directed translation between object-oriented and functional
//! decomposition.
//!
//! Translation and type checking are one judgment: every expression is
//! typed, and the type of a receiver decides whether a selection becomes a
//! consumer call (its interface is selected) or stays as it is. Running with
//! nothing selected is therefore a plain type checker.

use std::collections::BTreeSet;

use crate::context::{preprocess, restrict, GlobalCtx, TypeEnv};
use crate::diagnostic::Diagnostic;
use crate::syntax::{
    desugar, BinOp, Clause, Constructor, Consumer, ConsumerBody, Datatype, Def, Dtr, Expr, Generator, Interface,
    Pattern, Pos, Program, Type, Value, SELF, THIS,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformResult {
    pub program: Program,
    /// Type of the main expression.
    pub program_type: Type,
}

/// Translates the selected datatypes to interfaces and the selected
/// interfaces to datatypes in a single pass. Every other definition is kept
/// and only has its expressions rewritten.
pub fn transform(program: &Program, selected: &BTreeSet<String>) -> Result<TransformResult, Vec<Diagnostic>> {
    let program = desugar(program);
    let full = preprocess(&program)?;
    let ctx = restrict(&full, selected).map_err(|d| vec![d])?;
    let mut tr = Translator {
        ctx: &ctx,
        errors: Vec::new(),
    };
    let mut defs = Vec::with_capacity(program.defs.len());
    for def in &program.defs {
        tr.def(def, &mut defs);
    }
    let main = tr.expr(Pos::default(), &program.main, &TypeEnv::new());
    match main {
        Some((main, program_type)) if tr.errors.is_empty() => Ok(TransformResult {
            program: Program::new(defs, main),
            program_type,
        }),
        _ => Err(tr.errors),
    }
}

/// Type of the main expression, with every definition type checked.
pub fn typecheck(program: &Program) -> Result<Type, Vec<Diagnostic>> {
    transform(program, &BTreeSet::new()).map(|r| r.program_type)
}

/// Translates one expression under `ctx` (which should already be
/// restricted) and returns it with its type.
pub fn transform_expr(e: &Expr, ctx: &GlobalCtx, env: &TypeEnv) -> Result<(Expr, Type), String> {
    infer(ctx, e, env)
}

/// Types a closed expression, possibly holding runtime objects.
pub fn typecheck_expr(e: &Expr, ctx: &GlobalCtx) -> Result<Type, String> {
    infer(ctx, e, &TypeEnv::new()).map(|(_, t)| t)
}

struct Translator<'a> {
    ctx: &'a GlobalCtx,
    errors: Vec<Diagnostic>,
}

impl Translator<'_> {
    fn expr(&mut self, pos: Pos, e: &Expr, env: &TypeEnv) -> Option<(Expr, Type)> {
        match infer(self.ctx, e, env) {
            Ok(r) => Some(r),
            Err(msg) => {
                self.errors.push(Diagnostic::at(pos, msg));
                None
            }
        }
    }

    /// Translates `body` and checks it against `expected`.
    fn body(&mut self, pos: Pos, place: &str, body: &Expr, env: &TypeEnv, expected: &Type) -> Expr {
        match self.expr(pos, body, env) {
            Some((e, t)) if &t == expected => e,
            Some((e, t)) => {
                self.errors.push(Diagnostic::at(
                    pos,
                    format!("{place} has type {t} but is declared to return {expected}"),
                ));
                e
            }
            None => body.clone(),
        }
    }

    fn def(&mut self, def: &Def, out: &mut Vec<Def>) {
        let ctx = self.ctx;
        match def {
            Def::Datatype(d) if ctx.dt.contains(&d.name) => out.push(Def::Interface(self.dt_to_it(d))),
            Def::Datatype(_) => out.push(def.clone()),
            Def::Interface(i) if ctx.it.contains(&i.name) => {
                out.push(Def::Datatype(Datatype {
                    name: i.name.clone(),
                    pos: i.pos,
                }));
                for d in &i.dtrs {
                    let c = self.dtr_to_csm(i, d);
                    out.push(Def::Consumer(c));
                }
            }
            Def::Interface(i) => {
                let mut i = i.clone();
                for d in &mut i.dtrs {
                    if let Some(body) = &d.body {
                        let mut env = TypeEnv::new().with(THIS, Type::named(&i.name));
                        env.bind_params(&d.params);
                        let place = format!("default `{}` of `{}`", d.name, i.name);
                        d.body = Some(self.body(i.pos, &place, body, &env, &d.ret));
                    }
                }
                out.push(Def::Interface(i));
            }
            Def::Generator(g) if ctx.it.contains(&g.parent) => out.push(Def::Constructor(Constructor {
                name: g.name.clone(),
                fields: g.fields.clone(),
                parent: g.parent.clone(),
                pos: g.pos,
            })),
            Def::Generator(g) => {
                let mut g = g.clone();
                for f in &mut g.funs {
                    let mut env = TypeEnv::new().with(THIS, Type::named(&g.parent));
                    env.bind_params(&g.fields);
                    env.bind_params(&f.params);
                    let place = format!("`{}.{}`", g.name, f.name);
                    let body = f.body.as_ref().expect("generator method without body");
                    f.body = Some(self.body(g.pos, &place, body, &env, &f.ret));
                }
                out.push(Def::Generator(g));
            }
            Def::Constructor(k) if ctx.dt.contains(&k.parent) => out.push(Def::Generator(self.ctr_to_gen(k))),
            Def::Constructor(_) => out.push(def.clone()),
            // Eliminated; its clauses were moved to the interface and classes.
            Def::Consumer(c) if ctx.dt.contains(&c.self_type) => {}
            Def::Consumer(c) => {
                let mut c = c.clone();
                let clauses = c
                    .clauses()
                    .into_iter()
                    .map(|cl| {
                        let env = self.clause_env(&c, &cl.pattern);
                        let body = self.body(c.pos, &format!("`{}`", c.name), &cl.body, &env, &c.ret);
                        Clause {
                            pattern: cl.pattern,
                            body,
                        }
                    })
                    .collect();
                c.body = ConsumerBody::Match(clauses);
                out.push(Def::Consumer(c));
            }
        }
    }

    fn clause_env(&self, c: &Consumer, pattern: &Pattern) -> TypeEnv {
        let mut env = TypeEnv::new().with(SELF, Type::named(&c.self_type));
        if let Pattern::Ctor(k, vars) = pattern {
            let fields = self.ctx.fields_of(k).unwrap_or(&[]);
            for (x, p) in vars.iter().zip(fields) {
                env.bind(x.clone(), p.ty.clone());
            }
        }
        env.bind_params(&c.params);
        env
    }

    /// A destructor of a selected interface becomes a consumer: one clause
    /// per generator defining it, then a wildcard from the default.
    fn dtr_to_csm(&mut self, i: &Interface, d: &Dtr) -> Consumer {
        let ctx = self.ctx;
        let mut clauses = Vec::new();
        for c in ctx.gen(&i.name) {
            let Some(g) = ctx.generator(c) else { continue };
            let Some(f) = g.fun(&d.name) else { continue };
            let mut env = TypeEnv::new().with(THIS, Type::named(&i.name));
            env.bind_params(&g.fields);
            env.bind_params(&f.params);
            let place = format!("`{}.{}`", g.name, f.name);
            let body = f.body.as_ref().expect("generator method without body");
            let body = self.body(g.pos, &place, body, &env, &f.ret).rename(THIS, SELF);
            clauses.push(Clause::ctor(
                g.name.clone(),
                g.fields.iter().map(|p| p.name.clone()).collect(),
                body,
            ));
        }
        if let Some(default) = &d.body {
            let mut env = TypeEnv::new().with(THIS, Type::named(&i.name));
            env.bind_params(&d.params);
            let place = format!("default `{}` of `{}`", d.name, i.name);
            let body = self.body(i.pos, &place, default, &env, &d.ret).rename(THIS, SELF);
            clauses.push(Clause::wildcard(body));
        }
        Consumer {
            name: d.name.clone(),
            self_type: i.name.clone(),
            params: d.params.clone(),
            ret: d.ret.clone(),
            body: ConsumerBody::Match(clauses),
            pos: i.pos,
        }
    }

    /// A selected datatype becomes an interface declaring one destructor per
    /// consumer; a wildcard clause becomes the default implementation.
    fn dt_to_it(&mut self, d: &Datatype) -> Interface {
        let ctx = self.ctx;
        let mut dtrs = Vec::new();
        for f in ctx.csm(&d.name) {
            let c = ctx.consumer(f, &d.name).expect("consumer listed in csm").clone();
            let body = c.wildcard_body().map(|w| {
                let env = self.clause_env(&c, &Pattern::Wildcard);
                self.body(c.pos, &format!("`{}`", c.name), w, &env, &c.ret)
                    .rename(SELF, THIS)
            });
            dtrs.push(Dtr {
                name: c.name.clone(),
                params: c.params.clone(),
                ret: c.ret.clone(),
                body,
            });
        }
        Interface {
            name: d.name.clone(),
            dtrs,
            pos: d.pos,
        }
    }

    /// A constructor of a selected datatype becomes a class with one method
    /// per consumer that has a clause for it.
    fn ctr_to_gen(&mut self, k: &Constructor) -> Generator {
        let ctx = self.ctx;
        let mut funs = Vec::new();
        for f in ctx.csm(&k.parent) {
            let c = ctx.consumer(f, &k.parent).expect("consumer listed in csm").clone();
            let Some(cl) = c.clause_for(&k.name) else { continue };
            let env = self.clause_env(&c, &cl.pattern);
            let body = self
                .body(c.pos, &format!("`{}`", c.name), &cl.body, &env, &c.ret)
                .rename(SELF, THIS);
            funs.push(Dtr {
                name: c.name.clone(),
                params: c.params.clone(),
                ret: c.ret.clone(),
                body: Some(body),
            });
        }
        Generator {
            name: k.name.clone(),
            fields: k.fields.clone(),
            parent: k.parent.clone(),
            funs,
            pos: k.pos,
        }
    }
}

fn expect(what: &str, actual: &Type, expected: &Type) -> Result<(), String> {
    if actual == expected {
        Ok(())
    } else {
        Err(format!("{what} has type {actual}, expected {expected}"))
    }
}

fn args_against(
    ctx: &GlobalCtx,
    callee: &str,
    args: &[Expr],
    params: &[Type],
    env: &TypeEnv,
) -> Result<Vec<Expr>, String> {
    if args.len() != params.len() {
        return Err(format!(
            "`{callee}` takes {} argument(s) but {} given",
            params.len(),
            args.len()
        ));
    }
    args.iter()
        .zip(params)
        .enumerate()
        .map(|(n, (a, t))| {
            let (a2, at) = infer(ctx, a, env)?;
            expect(&format!("argument {} of `{callee}` (`{a}`)", n + 1), &at, t)?;
            Ok(a2)
        })
        .collect()
}

fn named_type<'t>(what: &Expr, t: &'t Type) -> Result<&'t str, String> {
    t.as_named()
        .ok_or_else(|| format!("`{what}` has type {t}, which has no destructors or consumers"))
}

fn value_type(ctx: &GlobalCtx, v: &Value) -> Result<Type, String> {
    match v {
        Value::Int(_) => Ok(Type::Int),
        Value::Bool(_) => Ok(Type::Bool),
        Value::Obj(c, fields) => {
            let Some(Type::Arrow(params, ret)) = ctx.class_sig(c) else {
                return Err(format!("runtime object of unknown class `{c}`"));
            };
            if params.len() != fields.len() {
                return Err(format!(
                    "runtime object `{c}` has {} field(s), expected {}",
                    fields.len(),
                    params.len()
                ));
            }
            for (f, t) in fields.iter().zip(params) {
                expect(&format!("field `{f}` of `{c}`"), &value_type(ctx, f)?, t)?;
            }
            Ok((**ret).clone())
        }
    }
}

fn infer(ctx: &GlobalCtx, e: &Expr, env: &TypeEnv) -> Result<(Expr, Type), String> {
    match e {
        Expr::Var(x) => env
            .lookup(x)
            .map(|t| (e.clone(), t.clone()))
            .ok_or_else(|| format!("unbound variable `{x}`")),
        Expr::Int(_) => Ok((e.clone(), Type::Int)),
        Expr::Bool(_) => Ok((e.clone(), Type::Bool)),
        Expr::Obj(v) => Ok((e.clone(), value_type(ctx, v)?)),
        Expr::Sel { recv, name, args } => {
            let (recv2, rt) = infer(ctx, recv, env)?;
            let d = named_type(recv, &rt)?;
            let Some(Type::Arrow(params, ret)) = ctx.dtr_sig(name, d) else {
                return Err(format!("type {d} has no destructor `{name}` (in `{e}`)"));
            };
            let args2 = args_against(ctx, &format!("{d}.{name}"), args, params, env)?;
            let out = if ctx.it.contains(d) && ctx.dtr(d).contains(name) {
                Expr::app(name.clone(), recv2, args2)
            } else {
                Expr::sel(recv2, name.clone(), args2)
            };
            Ok((out, (**ret).clone()))
        }
        Expr::App { name, first, args } => {
            let (first2, ft) = infer(ctx, first, env)?;
            let d = named_type(first, &ft)?;
            let Some(c) = ctx.consumer(name, d) else {
                return Err(format!("type {d} has no consumer `{name}` (in `{e}`)"));
            };
            let params: Vec<Type> = c.params.iter().map(|p| p.ty.clone()).collect();
            let args2 = args_against(ctx, &format!("{name} on {d}"), args, &params, env)?;
            let out = if ctx.dt.contains(d) && ctx.csm(d).contains(name) {
                Expr::sel(first2, name.clone(), args2)
            } else {
                Expr::app(name.clone(), first2, args2)
            };
            Ok((out, c.ret.clone()))
        }
        Expr::Ctr { name, args } | Expr::New { name, args } => {
            let is_new = matches!(e, Expr::New { .. });
            let (known, parent) = if is_new {
                (ctx.generator(name).map(|g| &g.parent), "class")
            } else {
                (ctx.constructor(name).map(|k| &k.parent), "constructor")
            };
            let Some(d) = known else {
                return Err(format!("unknown {parent} `{name}` (in `{e}`)"));
            };
            let Some(Type::Arrow(params, _)) = ctx.class_sig(name) else {
                return Err(format!("`{name}` has no signature"));
            };
            let args2 = args_against(ctx, name, args, params, env)?;
            let out = match (is_new, ctx.it.contains(d), ctx.dt.contains(d)) {
                (true, true, _) => Expr::ctr(name.clone(), args2),
                (true, false, _) => Expr::new_obj(name.clone(), args2),
                (false, _, true) => Expr::new_obj(name.clone(), args2),
                (false, _, false) => Expr::ctr(name.clone(), args2),
            };
            Ok((out, Type::named(d)))
        }
        Expr::Prim { op, lhs, rhs } => {
            let (l2, lt) = infer(ctx, lhs, env)?;
            let (r2, rt) = infer(ctx, rhs, env)?;
            let (operand, result) = match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul => (Type::Int, Type::Int),
                BinOp::Le | BinOp::Lt => (Type::Int, Type::Bool),
                BinOp::And | BinOp::Or => (Type::Bool, Type::Bool),
                BinOp::Eq => {
                    if lt != Type::Int && lt != Type::Bool {
                        return Err(format!("`==` compares Int or Bool, but `{lhs}` has type {lt}"));
                    }
                    (lt.clone(), Type::Bool)
                }
            };
            let sym = op.symbol();
            expect(&format!("left operand of `{sym}` (`{lhs}`)"), &lt, &operand)?;
            expect(&format!("right operand of `{sym}` (`{rhs}`)"), &rt, &operand)?;
            Ok((Expr::prim(*op, l2, r2), result))
        }
        Expr::If { cond, then, els } => {
            let (c2, ct) = infer(ctx, cond, env)?;
            expect(&format!("condition `{cond}`"), &ct, &Type::Bool)?;
            let (t2, tt) = infer(ctx, then, env)?;
            let (e2, et) = infer(ctx, els, env)?;
            expect(&format!("else branch `{els}`"), &et, &tt)?;
            Ok((Expr::if_(c2, t2, e2), tt))
        }
    }
}
