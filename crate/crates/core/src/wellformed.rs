//! Static checks that must hold before a program is translated: scoping,
//! exact interface implementation, exhaustive matches, pattern variables
//! that repeat the constructor's field names, and call arities.

use std::collections::HashSet;

use crate::context::{GlobalCtx, TypeEnv};
use crate::diagnostic::Diagnostic;
use crate::syntax::{
    BinOp, Consumer, ConsumerBody, Def, Expr, Generator, Interface, Param, Pattern, Pos, Program, Type, Value, SELF,
    THIS,
};

/// Checks a desugared program against its unrestricted context. Every
/// violation is reported.
pub fn check(program: &Program, ctx: &GlobalCtx) -> Result<(), Vec<Diagnostic>> {
    let mut ck = Checker {
        ctx,
        errors: Vec::new(),
    };
    for def in &program.defs {
        match def {
            Def::Datatype(_) => {}
            Def::Constructor(c) => ck.distinct(c.pos, "field", &c.fields, &[]),
            Def::Interface(i) => ck.interface(i),
            Def::Generator(g) => ck.generator(g),
            Def::Consumer(c) => ck.consumer(c),
        }
    }
    ck.expr(Pos::default(), "main expression", &program.main, &TypeEnv::new());
    if ck.errors.is_empty() {
        Ok(())
    } else {
        Err(ck.errors)
    }
}

struct Checker<'a> {
    ctx: &'a GlobalCtx,
    errors: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn err(&mut self, pos: Pos, msg: String) {
        self.errors.push(Diagnostic::at(pos, msg));
    }

    /// Binder names in `params` must be pairwise distinct and must not
    /// reuse any name in `outer`.
    fn distinct(&mut self, pos: Pos, what: &str, params: &[Param], outer: &[String]) {
        let mut seen = HashSet::new();
        for p in params {
            if !seen.insert(p.name.as_str()) {
                self.err(pos, format!("{what} `{}` is bound twice", p.name));
            } else if outer.contains(&p.name) {
                self.err(pos, format!("{what} `{}` shadows a field of the same name", p.name));
            }
        }
    }

    fn interface(&mut self, i: &Interface) {
        for d in &i.dtrs {
            self.distinct(i.pos, "parameter", &d.params, &[]);
            if let Some(body) = &d.body {
                let mut env = TypeEnv::new().with(THIS, Type::named(&i.name));
                env.bind_params(&d.params);
                self.expr(i.pos, &format!("default `{}` of `{}`", d.name, i.name), body, &env);
            }
        }
    }

    fn generator(&mut self, g: &Generator) {
        self.distinct(g.pos, "field", &g.fields, &[]);
        let field_names: Vec<String> = g.fields.iter().map(|p| p.name.clone()).collect();
        let iface = self.ctx.interface(&g.parent).cloned();
        let mut seen = HashSet::new();
        for f in &g.funs {
            if !seen.insert(f.name.as_str()) {
                self.err(g.pos, format!("class `{}` defines `{}` twice", g.name, f.name));
                continue;
            }
            self.distinct(g.pos, "parameter", &f.params, &field_names);
            match iface.as_ref().and_then(|i| i.dtrs.iter().find(|d| d.name == f.name)) {
                None => self.err(
                    g.pos,
                    format!(
                        "class `{}` defines `{}`, which `{}` does not declare",
                        g.name, f.name, g.parent
                    ),
                ),
                Some(decl) => {
                    if decl.params != f.params || decl.ret != f.ret {
                        self.err(
                            g.pos,
                            format!(
                                "`{}.{}` does not match the declaration in `{}`",
                                g.name, f.name, g.parent
                            ),
                        );
                    }
                }
            }
            if let Some(body) = &f.body {
                let mut env = TypeEnv::new().with(THIS, Type::named(&g.parent));
                env.bind_params(&g.fields);
                env.bind_params(&f.params);
                self.expr(g.pos, &format!("`{}.{}`", g.name, f.name), body, &env);
            }
        }
        if let Some(i) = iface {
            for d in &i.dtrs {
                if d.body.is_none() && g.fun(&d.name).is_none() {
                    self.err(
                        g.pos,
                        format!("class `{}` does not implement `{}` of `{}`", g.name, d.name, i.name),
                    );
                }
            }
        }
    }

    fn consumer(&mut self, c: &Consumer) {
        self.distinct(c.pos, "parameter", &c.params, &[]);
        let clauses = match &c.body {
            ConsumerBody::Match(cs) => cs.clone(),
            ConsumerBody::Bare(e) => vec![crate::syntax::Clause::wildcard(e.clone())],
        };
        let ctors = self.ctx.ctr(&c.self_type).to_vec();
        let mut seen = HashSet::new();
        let mut wildcard = false;
        for (n, cl) in clauses.iter().enumerate() {
            let mut env = TypeEnv::new().with(SELF, Type::named(&c.self_type));
            match &cl.pattern {
                Pattern::Wildcard => {
                    wildcard = true;
                    if n + 1 != clauses.len() {
                        self.err(c.pos, format!("wildcard must be last in `{}`", c.name));
                    }
                }
                Pattern::Ctor(k, vars) => {
                    if !seen.insert(k.clone()) {
                        self.err(c.pos, format!("`{}` matches `{k}` twice", c.name));
                    }
                    if !ctors.contains(k) {
                        self.err(
                            c.pos,
                            format!("`{k}` is not a constructor of `{}` in `{}`", c.self_type, c.name),
                        );
                        continue;
                    }
                    let fields = self.ctx.fields_of(k).unwrap_or(&[]).to_vec();
                    let names: Vec<&String> = fields.iter().map(|p| &p.name).collect();
                    if vars.iter().collect::<Vec<_>>() != names {
                        self.err(
                            c.pos,
                            format!(
                                "pattern `{k}({})` in `{}` must name the fields of `{k}` in order: `{k}({})`",
                                vars.join(", "),
                                c.name,
                                names.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
                            ),
                        );
                        continue;
                    }
                    for p in &c.params {
                        if vars.contains(&p.name) {
                            self.err(
                                c.pos,
                                format!("parameter `{}` of `{}` clashes with a field of `{k}`", p.name, c.name),
                            );
                        }
                    }
                    env.bind_params(&fields);
                }
            }
            env.bind_params(&c.params);
            self.expr(c.pos, &format!("`{}`", c.name), &cl.body, &env);
        }
        if !wildcard {
            let missing: Vec<&String> = ctors.iter().filter(|k| !seen.contains(*k)).collect();
            if !missing.is_empty() {
                self.err(
                    c.pos,
                    format!(
                        "match in `{}` is not exhaustive: missing {}",
                        c.name,
                        missing.iter().map(|s| format!("`{s}`")).collect::<Vec<_>>().join(", ")
                    ),
                );
            }
        }
    }

    /// Scoping and arity checks over an expression. Returns a best-effort
    /// type used to resolve the receiver of selections and applications.
    fn expr(&mut self, pos: Pos, place: &str, e: &Expr, env: &TypeEnv) -> Option<Type> {
        let ctx = self.ctx;
        match e {
            Expr::Var(x) => {
                let t = env.lookup(x).cloned();
                if t.is_none() {
                    self.err(pos, format!("unbound variable `{x}` in {place}"));
                }
                t
            }
            Expr::Int(_) => Some(Type::Int),
            Expr::Bool(_) => Some(Type::Bool),
            Expr::Obj(v) => match v {
                Value::Obj(c, _) => ctx.parent_of(c).map(Type::named),
                Value::Int(_) => Some(Type::Int),
                Value::Bool(_) => Some(Type::Bool),
            },
            Expr::Prim { op, lhs, rhs } => {
                self.expr(pos, place, lhs, env);
                self.expr(pos, place, rhs, env);
                Some(match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul => Type::Int,
                    _ => Type::Bool,
                })
            }
            Expr::If { cond, then, els } => {
                self.expr(pos, place, cond, env);
                let t = self.expr(pos, place, then, env);
                let u = self.expr(pos, place, els, env);
                t.or(u)
            }
            Expr::Ctr { name, args } | Expr::New { name, args } => {
                for a in args {
                    self.expr(pos, place, a, env);
                }
                let is_new = matches!(e, Expr::New { .. });
                let ok = if is_new {
                    ctx.generator(name).is_some()
                } else {
                    ctx.constructor(name).is_some()
                };
                if !ok {
                    let msg = match (is_new, ctx.class_def(name).is_some()) {
                        (true, true) => format!("`{name}` is a constructor; call it without `new` in {place}"),
                        (false, true) => format!("`{name}` is a class; instantiate it with `new` in {place}"),
                        (true, false) => format!("unknown class `{name}` in {place}"),
                        (false, false) => format!("unknown constructor `{name}` in {place}"),
                    };
                    self.err(pos, msg);
                    return None;
                }
                let arity = ctx.fields_of(name).map_or(0, |f| f.len());
                if arity != args.len() {
                    self.err(
                        pos,
                        format!("`{name}` takes {arity} argument(s) but {} given in {place}", args.len()),
                    );
                }
                ctx.parent_of(name).map(Type::named)
            }
            Expr::Sel { recv, name, args } => {
                let rt = self.expr(pos, place, recv, env);
                for a in args {
                    self.expr(pos, place, a, env);
                }
                let d = rt.as_ref().and_then(Type::as_named)?.to_string();
                match ctx.dtr_sig(name, &d) {
                    Some(Type::Arrow(params, ret)) => {
                        if params.len() != args.len() {
                            self.err(
                                pos,
                                format!(
                                    "`{d}.{name}` takes {} argument(s) but {} given in {place}",
                                    params.len(),
                                    args.len()
                                ),
                            );
                        }
                        Some((**ret).clone())
                    }
                    _ => {
                        self.err(pos, format!("`{d}` has no destructor `{name}` in {place}"));
                        None
                    }
                }
            }
            Expr::App { name, first, args } => {
                let ft = self.expr(pos, place, first, env);
                for a in args {
                    self.expr(pos, place, a, env);
                }
                let d = ft.as_ref().and_then(Type::as_named)?.to_string();
                match ctx.consumer(name, &d) {
                    Some(c) => {
                        if c.params.len() != args.len() {
                            self.err(
                                pos,
                                format!(
                                    "consumer `{name}` on `{d}` takes {} argument(s) but {} given in {place}",
                                    c.params.len(),
                                    args.len()
                                ),
                            );
                        }
                        Some(c.ret.clone())
                    }
                    None => {
                        self.err(pos, format!("`{d}` has no consumer `{name}` in {place}"));
                        None
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::preprocess;
    use crate::corpus;
    use crate::parser::parse;
    use crate::syntax::desugar;

    fn run(src: &str) -> Result<(), Vec<Diagnostic>> {
        let p = desugar(&parse(src).unwrap());
        let ctx = preprocess(&p).unwrap();
        check(&p, &ctx)
    }

    fn fails_with(src: &str, needle: &str) {
        let errs = run(src).expect_err(src);
        assert!(
            errs.iter().any(|e| e.message.contains(needle)),
            "expected `{needle}` in {errs:?}"
        );
    }

    #[test]
    fn corpus_is_well_formed() {
        for (name, src) in corpus::ALL {
            assert_eq!(run(src), Ok(()), "{name}");
        }
    }

    #[test]
    fn missing_clause_is_not_exhaustive() {
        let src = corpus::SETS_FP.replace("  case Empty() => false\n", "");
        fails_with(&src, "not exhaustive: missing `Empty`");
    }

    #[test]
    fn pattern_must_repeat_field_names() {
        let src = corpus::SETS_FP.replace(
            "case Insert(s, n) => i == n || contains(s)(i)",
            "case Insert(t, n) => i == n || contains(t)(i)",
        );
        fails_with(&src, "must name the fields of `Insert`");
    }

    #[test]
    fn unbound_variables() {
        fails_with("x", "unbound variable `x`");
        fails_with("data D\ndef f(self: D)(): D = this\nf(1)()", "unbound variable `this`");
        fails_with("interface I { def f(): I = self }\n1", "unbound variable `self`");
    }

    #[test]
    fn class_must_implement_declarations() {
        let src = corpus::SETS_OOP.replace("  def isEmpty(): Bool = false\n", "");
        fails_with(&src, "does not implement `isEmpty`");
    }

    #[test]
    fn class_must_not_add_methods() {
        let src = corpus::EXP_OOP.replace("def eval(): Int = n", "def eval(): Int = n\n  def show(): Int = n");
        fails_with(&src, "does not declare");
    }

    #[test]
    fn override_must_match_declaration() {
        let src = corpus::SETS_OOP.replace("def union(that: Set): Set = that", "def union(other: Set): Set = other");
        fails_with(&src, "does not match the declaration");
    }

    #[test]
    fn arity_checks() {
        fails_with("data D\ncase E() extends D\nE(1)", "takes 0 argument(s)");
        let src = corpus::SETS_OOP.replace(
            "new Insert(new Empty(), 1).union(",
            "new Insert(new Empty(), 1).union(new Empty(), ",
        );
        fails_with(&src, "takes 1 argument(s) but 2 given");
        let src = corpus::SETS_FP.replace("(Insert(Empty(), 2))", "(Insert(Empty(), 2), Empty())");
        fails_with(&src, "takes 1 argument(s) but 2 given");
    }

    #[test]
    fn new_and_constructor_calls_are_not_interchangeable() {
        fails_with("data D\ncase C() extends D\nnew C()", "call it without `new`");
        fails_with(
            "interface I {}\nclass C() implements I {}\nC()",
            "instantiate it with `new`",
        );
        fails_with("Nope()", "unknown constructor");
    }

    #[test]
    fn duplicate_and_shadowing_binders() {
        fails_with("data D\ncase C(x: Int, x: Int) extends D\n1", "bound twice");
        fails_with(
            "interface I { def f(n: Int): Int }\nclass C(n: Int) implements I { def f(n: Int): Int = n }\n1",
            "shadows a field",
        );
        fails_with(
            "data D\ncase C(n: Int) extends D\ndef f(self: D)(n: Int): Int = match { case C(n) => n }\n1",
            "clashes with a field",
        );
    }

    #[test]
    fn wildcard_allows_partial_match() {
        assert_eq!(
            run("data D\ncase A() extends D\ncase B() extends D\ndef f(self: D)(): Int = match { case A() => 1 case _ => 2 }\nf(B())()"),
            Ok(())
        );
        fails_with(
            "data D\ncase A() extends D\ndef f(self: D)(): Int = match { case A() => 1 case A() => 2 }\n1",
            "matches `A` twice",
        );
    }

    #[test]
    fn all_violations_are_collected() {
        let errs = run("data D\ncase A() extends D\ndef f(self: D)(): Int = match { }\nx + y").unwrap_err();
        assert_eq!(errs.len(), 3, "{errs:?}");
    }
}
