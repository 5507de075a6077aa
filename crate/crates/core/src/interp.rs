//! Call-by-value small-step interpreter.
//!
//! Redexes are found left to right: a receiver (or the first argument of a
//! consumer call) is evaluated before the remaining arguments. Constructor
//! calls and `new` both produce `obj(C, v̄)`, so a value means the same thing
//! in either decomposition style.

use std::fmt;

use crate::context::{preprocess, GlobalCtx};
use crate::diagnostic::Diagnostic;
use crate::syntax::{BinOp, Expr, Program, Value, SELF, THIS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Stepped(Expr),
    Done(Value),
    Stuck(String),
}

/// The code run for a call: names bound to the receiver's fields, names
/// bound to the arguments, and the body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Body {
    pub fields: Vec<String>,
    pub params: Vec<String>,
    pub body: Expr,
}

/// Destructor lookup: the class's own method, else the interface default
/// (which sees no fields).
pub fn dtr_body(f: &str, c: &str, ctx: &GlobalCtx) -> Option<Body> {
    let g = ctx.generator(c)?;
    if let Some(m) = g.fun(f) {
        return Some(Body {
            fields: g.fields.iter().map(|p| p.name.clone()).collect(),
            params: m.params.iter().map(|p| p.name.clone()).collect(),
            body: m.body.clone()?,
        });
    }
    let d = ctx.interface(&g.parent)?.dtrs.iter().find(|d| d.name == f)?;
    Some(Body {
        fields: Vec::new(),
        params: d.params.iter().map(|p| p.name.clone()).collect(),
        body: d.body.clone()?,
    })
}

/// Consumer lookup: the clause for `c`, else the wildcard (which sees no
/// fields).
pub fn csm_body(f: &str, c: &str, ctx: &GlobalCtx) -> Option<Body> {
    let k = ctx.constructor(c)?;
    let consumer = ctx.consumer(f, &k.parent)?;
    let params = consumer.params.iter().map(|p| p.name.clone()).collect();
    if let Some(cl) = consumer.clause_for(c) {
        let crate::syntax::Pattern::Ctor(_, vars) = &cl.pattern else {
            unreachable!()
        };
        return Some(Body {
            fields: vars.clone(),
            params,
            body: cl.body.clone(),
        });
    }
    Some(Body {
        fields: Vec::new(),
        params,
        body: consumer.wildcard_body()?.clone(),
    })
}

fn substitute(e: &mut Expr, map: &[(&str, Expr)]) {
    match e {
        Expr::Var(x) => {
            if let Some((_, v)) = map.iter().rev().find(|(y, _)| y == x) {
                *e = v.clone();
            }
        }
        Expr::Obj(_) | Expr::Int(_) | Expr::Bool(_) => {}
        Expr::Sel { recv: first, args, .. } | Expr::App { first, args, .. } => {
            substitute(first, map);
            args.iter_mut().for_each(|a| substitute(a, map));
        }
        Expr::Ctr { args, .. } | Expr::New { args, .. } => args.iter_mut().for_each(|a| substitute(a, map)),
        Expr::Prim { lhs, rhs, .. } => {
            substitute(lhs, map);
            substitute(rhs, map);
        }
        Expr::If { cond, then, els } => {
            substitute(cond, map);
            substitute(then, map);
            substitute(els, map);
        }
    }
}

fn instantiate(b: Body, binder: &'static str, recv: &Value, args: Vec<Value>) -> Result<Expr, String> {
    let Value::Obj(_, fields) = recv else { unreachable!() };
    if b.fields.len() > fields.len() || b.params.len() != args.len() {
        return Err("arity mismatch".into());
    }
    let mut map: Vec<(&str, Expr)> = Vec::with_capacity(1 + b.fields.len() + args.len());
    map.push((binder, Expr::Obj(recv.clone())));
    for (y, v) in b.fields.iter().zip(fields) {
        map.push((y, v.clone().into_expr()));
    }
    for (x, v) in b.params.iter().zip(args) {
        map.push((x, v.into_expr()));
    }
    let mut body = b.body;
    substitute(&mut body, &map);
    Ok(body)
}

fn values(args: &[Expr]) -> Vec<Value> {
    args.iter()
        .map(|a| a.as_value().expect("argument is a value"))
        .collect()
}

/// The first position that must become a value before `e` itself can
/// reduce, if any.
fn pending(e: &mut Expr) -> Option<&mut Expr> {
    match e {
        Expr::Var(_) | Expr::Obj(_) | Expr::Int(_) | Expr::Bool(_) => None,
        Expr::Sel { recv: first, args, .. } | Expr::App { first, args, .. } => {
            if !first.is_value() {
                Some(first)
            } else {
                args.iter_mut().find(|a| !a.is_value())
            }
        }
        Expr::Ctr { args, .. } | Expr::New { args, .. } => args.iter_mut().find(|a| !a.is_value()),
        Expr::Prim {
            op: BinOp::And | BinOp::Or,
            lhs,
            ..
        } => (!lhs.is_value()).then_some(&mut **lhs),
        Expr::Prim { lhs, rhs, .. } => {
            if !lhs.is_value() {
                Some(lhs)
            } else {
                (!rhs.is_value()).then_some(&mut **rhs)
            }
        }
        Expr::If { cond, .. } => (!cond.is_value()).then_some(&mut **cond),
    }
}

/// Reduces the leftmost-innermost redex of a non-value expression in place.
fn step_in_place(e: &mut Expr, ctx: &GlobalCtx) -> Result<(), String> {
    if let Some(child) = pending(e) {
        return step_in_place(child, ctx);
    }
    let next = match e {
        Expr::Obj(_) | Expr::Int(_) | Expr::Bool(_) => unreachable!("values do not step"),
        Expr::Var(x) => return Err(format!("free variable `{x}`")),
        Expr::Ctr { name, args } | Expr::New { name, args } => {
            Expr::Obj(Value::Obj(std::mem::take(name), values(args)))
        }
        Expr::Sel { recv, name, args } => {
            let recv = recv.as_value().expect("receiver is a value");
            let Value::Obj(c, _) = &recv else {
                return Err(format!("selection `{name}` on primitive value {recv}"));
            };
            let body = dtr_body(name, c, ctx).ok_or_else(|| format!("`{c}` has no destructor `{name}`"))?;
            instantiate(body, THIS, &recv, values(args))?
        }
        Expr::App { name, first, args } => {
            let recv = first.as_value().expect("first argument is a value");
            let Value::Obj(c, _) = &recv else {
                return Err(format!("consumer `{name}` applied to primitive value {recv}"));
            };
            let body = csm_body(name, c, ctx).ok_or_else(|| format!("no clause of `{name}` matches `{c}`"))?;
            instantiate(body, SELF, &recv, values(args))?
        }
        Expr::Prim { op, lhs, rhs } => {
            let l = lhs.as_value().expect("operand is a value");
            match (op, l) {
                (BinOp::And, Value::Bool(false)) => Expr::Bool(false),
                (BinOp::Or, Value::Bool(true)) => Expr::Bool(true),
                (BinOp::And | BinOp::Or, Value::Bool(_)) => std::mem::replace(&mut **rhs, Expr::Int(0)),
                (op, l) => {
                    let r = rhs.as_value().expect("operand is a value");
                    match (op, l, r) {
                        (BinOp::Add, Value::Int(a), Value::Int(b)) => Expr::Int(a.wrapping_add(b)),
                        (BinOp::Sub, Value::Int(a), Value::Int(b)) => Expr::Int(a.wrapping_sub(b)),
                        (BinOp::Mul, Value::Int(a), Value::Int(b)) => Expr::Int(a.wrapping_mul(b)),
                        (BinOp::Le, Value::Int(a), Value::Int(b)) => Expr::Bool(a <= b),
                        (BinOp::Lt, Value::Int(a), Value::Int(b)) => Expr::Bool(a < b),
                        (BinOp::Eq, Value::Int(a), Value::Int(b)) => Expr::Bool(a == b),
                        (BinOp::Eq, Value::Bool(a), Value::Bool(b)) => Expr::Bool(a == b),
                        (op, l, r) => return Err(format!("`{}` cannot combine {l} and {r}", op.symbol())),
                    }
                }
            }
        }
        Expr::If { cond, then, els } => match cond.as_value() {
            Some(Value::Bool(true)) => std::mem::replace(&mut **then, Expr::Int(0)),
            Some(Value::Bool(false)) => std::mem::replace(&mut **els, Expr::Int(0)),
            Some(v) => return Err(format!("condition is {v}, not a boolean")),
            None => unreachable!(),
        },
    };
    *e = next;
    Ok(())
}

/// One reduction step of a closed expression.
pub fn step(e: &Expr, ctx: &GlobalCtx) -> StepOutcome {
    if let Some(v) = e.as_value() {
        return StepOutcome::Done(v);
    }
    let mut next = e.clone();
    match step_in_place(&mut next, ctx) {
        Ok(()) => StepOutcome::Stepped(next),
        Err(reason) => StepOutcome::Stuck(reason),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalOutcome {
    Value(Value),
    FuelExhausted,
    Stuck { expr: Expr, reason: String },
}

impl fmt::Display for EvalOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalOutcome::Value(v) => write!(f, "{v}"),
            EvalOutcome::FuelExhausted => f.write_str("fuel exhausted"),
            EvalOutcome::Stuck { expr, reason } => write!(f, "stuck at `{expr}`: {reason}"),
        }
    }
}

/// Runs `e` for at most `fuel` steps. Also returns the number of steps taken.
pub fn eval_expr(e: &Expr, ctx: &GlobalCtx, fuel: u64) -> (EvalOutcome, u64) {
    let mut cur = e.clone();
    let mut steps = 0;
    loop {
        if let Some(v) = cur.as_value() {
            return (EvalOutcome::Value(v), steps);
        }
        if steps == fuel {
            return (EvalOutcome::FuelExhausted, steps);
        }
        if let Err(reason) = step_in_place(&mut cur, ctx) {
            // `step_in_place` only writes on success, so `cur` is intact.
            return (EvalOutcome::Stuck { expr: cur, reason }, steps);
        }
        steps += 1;
    }
}

/// Evaluates the main expression of a program.
pub fn eval(program: &Program, fuel: u64) -> Result<EvalOutcome, Vec<Diagnostic>> {
    let ctx = preprocess(program)?;
    Ok(eval_expr(&program.main, &ctx, fuel).0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// Every expression visited, starting with the main expression.
    pub steps: Vec<Expr>,
    pub outcome: EvalOutcome,
}

pub fn trace_expr(e: &Expr, ctx: &GlobalCtx, fuel: u64) -> Trace {
    let mut steps = vec![e.clone()];
    let mut taken = 0;
    loop {
        let cur = steps.last().expect("trace is never empty");
        let next = match step(cur, ctx) {
            StepOutcome::Done(v) => {
                return Trace {
                    steps,
                    outcome: EvalOutcome::Value(v),
                }
            }
            _ if taken == fuel => {
                return Trace {
                    steps,
                    outcome: EvalOutcome::FuelExhausted,
                }
            }
            StepOutcome::Stuck(reason) => {
                let expr = cur.clone();
                return Trace {
                    steps,
                    outcome: EvalOutcome::Stuck { expr, reason },
                };
            }
            StepOutcome::Stepped(next) => next,
        };
        steps.push(next);
        taken += 1;
    }
}

pub fn trace(program: &Program, fuel: u64) -> Result<Trace, Vec<Diagnostic>> {
    let ctx = preprocess(program)?;
    Ok(trace_expr(&program.main, &ctx, fuel))
}
