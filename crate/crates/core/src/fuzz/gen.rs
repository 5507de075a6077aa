//! Seeded generator of well-formed, well-typed programs.
//!
//! Programs are built from an abstract model (types, their variants and
//! their operations) and then emitted with each type independently in
//! object-oriented or functional style.
//!
//! Termination comes from an ordering on calls. A body of an operation on
//! type `Ti` may call any operation of an earlier type `Tj` (j < i) on any
//! receiver, any operation of `Ti` on a field (a strictly smaller value),
//! and only lower-numbered operations of `Ti` on `this`/`self`. Looping
//! programs break this on purpose with a self tail call.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::syntax::{
    BinOp, Clause, Constructor, Consumer, ConsumerBody, Datatype, Def, Dtr, Expr, Generator, Interface, Param, Pos,
    Program, Type, SELF, THIS,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_types: usize,
    pub max_ctors_per_type: usize,
    pub max_ops_per_type: usize,
    pub max_field_arity: usize,
    pub max_expr_depth: usize,
    /// Probability that a type is emitted object-oriented.
    pub style_mix: f64,
    /// Probability that a call prefers a structurally recursive receiver.
    pub recursion_bias: f64,
    /// Fraction of programs containing a deliberately looping operation.
    pub loop_fraction: f64,
    /// Fraction of programs that reuse operation names across types.
    pub overload: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_types: 3,
            max_ctors_per_type: 3,
            max_ops_per_type: 3,
            max_field_arity: 2,
            max_expr_depth: 3,
            style_mix: 0.5,
            recursion_bias: 0.6,
            loop_fraction: 0.05,
            overload: 0.25,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenConfig {
            seed,
            ..GenConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let bounds = [
            ("max_types", self.max_types),
            ("max_ctors_per_type", self.max_ctors_per_type),
            ("max_ops_per_type", self.max_ops_per_type),
            ("max_field_arity", self.max_field_arity),
            ("max_expr_depth", self.max_expr_depth),
        ];
        for (name, v) in bounds {
            if v == 0 {
                return Err(format!("{name} must be at least 1"));
            }
        }
        let probs = [
            ("style_mix", self.style_mix),
            ("recursion_bias", self.recursion_bias),
            ("loop_fraction", self.loop_fraction),
            ("overload", self.overload),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

struct CtorSpec {
    name: String,
    fields: Vec<Param>,
}

struct OpSpec {
    name: String,
    params: Vec<Param>,
    ret: Type,
    default: Option<Expr>,
    /// One entry per constructor; `None` falls back to the default.
    bodies: Vec<Option<Expr>>,
}

struct TypeSpec {
    name: String,
    oo: bool,
    ctors: Vec<CtorSpec>,
    ops: Vec<OpSpec>,
}

/// Where a body lives; decides which calls keep evaluation terminating.
#[derive(Clone)]
struct Scope {
    vars: Vec<(String, Type)>,
    /// (type index, op index, receiver binder) when inside an operation.
    cur: Option<(usize, usize, &'static str)>,
    /// Fields whose type is the current type.
    rec_fields: Vec<String>,
}

impl Scope {
    fn main() -> Scope {
        Scope {
            vars: Vec::new(),
            cur: None,
            rec_fields: Vec::new(),
        }
    }
}

struct Gen<'c> {
    cfg: &'c GenConfig,
    rng: ChaCha8Rng,
    types: Vec<TypeSpec>,
    next_ctor: usize,
    next_field: usize,
    next_param: usize,
    next_op: usize,
}

/// Generates one program. Deterministic per configuration.
pub fn gen_program(cfg: &GenConfig) -> Program {
    let mut g = Gen {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        types: Vec::new(),
        next_ctor: 0,
        next_field: 0,
        next_param: 0,
        next_op: 0,
    };
    g.skeleton();
    g.bodies();
    let looping = g.rng.gen_bool(cfg.loop_fraction);
    let main = if looping { g.make_loop() } else { g.main() };
    g.emit(main)
}

fn type_index(t: &Type) -> Option<usize> {
    t.as_named()
        .and_then(|n| n.strip_prefix('T'))
        .and_then(|i| i.parse().ok())
}

/// (type, op, fixed receiver or `None` for a generated one).
type Call = (usize, usize, Option<Expr>);

impl Gen<'_> {
    fn ground(&mut self) -> Type {
        if self.rng.gen_bool(0.5) {
            Type::Int
        } else {
            Type::Bool
        }
    }

    /// A type usable by type `i`: ground, or any type up to `upto`.
    fn pick_type(&mut self, upto: usize) -> Type {
        if self.rng.gen_bool(0.5) {
            self.ground()
        } else {
            Type::named(format!("T{}", self.rng.gen_range(0..=upto)))
        }
    }

    fn skeleton(&mut self) {
        let cfg = self.cfg;
        let overload = self.rng.gen_bool(cfg.overload);
        let ntypes = self.rng.gen_range(1..=cfg.max_types);
        for i in 0..ntypes {
            let oo = self.rng.gen_bool(cfg.style_mix);
            let nctors = self.rng.gen_range(1..=cfg.max_ctors_per_type);
            let mut ctors = Vec::new();
            for k in 0..nctors {
                let arity = self.rng.gen_range(0..=cfg.max_field_arity);
                let fields = (0..arity)
                    .map(|_| {
                        // The first variant never recurses, so every type
                        // has a finite value.
                        let ty = if k == 0 && i == 0 {
                            self.ground()
                        } else if k == 0 {
                            self.pick_type(i - 1)
                        } else {
                            self.pick_type(i)
                        };
                        let p = Param::new(format!("y{}", self.next_field), ty);
                        self.next_field += 1;
                        p
                    })
                    .collect();
                ctors.push(CtorSpec {
                    name: format!("C{}", self.next_ctor),
                    fields,
                });
                self.next_ctor += 1;
            }
            let nops = self.rng.gen_range(1..=cfg.max_ops_per_type);
            let mut ops: Vec<OpSpec> = Vec::new();
            for m in 0..nops {
                let reuse: Vec<String> = self.types[..i]
                    .iter()
                    .flat_map(|t| t.ops.iter().map(|o| o.name.clone()))
                    .filter(|n| !ops.iter().any(|o| &o.name == n))
                    .collect();
                let name = if overload && !reuse.is_empty() && self.rng.gen_bool(0.6) {
                    reuse.choose(&mut self.rng).cloned().expect("non-empty")
                } else {
                    self.next_op += 1;
                    format!("f{}", self.next_op - 1)
                };
                let nparams = self.rng.gen_range(0..=cfg.max_field_arity);
                let params = (0..nparams)
                    .map(|_| {
                        let ty = self.pick_type(i);
                        let p = Param::new(format!("p{}", self.next_param), ty);
                        self.next_param += 1;
                        p
                    })
                    .collect();
                // Operation 0 always returns a ground type so that every
                // type can be observed from the main expression.
                let ret = if m == 0 { self.ground() } else { self.pick_type(i) };
                ops.push(OpSpec {
                    name,
                    params,
                    ret,
                    default: None,
                    bodies: Vec::new(),
                });
            }
            self.types.push(TypeSpec {
                name: format!("T{i}"),
                oo,
                ctors,
                ops,
            });
        }
    }

    fn bodies(&mut self) {
        for i in 0..self.types.len() {
            for m in 0..self.types[i].ops.len() {
                let binder = if self.types[i].oo { THIS } else { SELF };
                let ret = self.types[i].ops[m].ret.clone();
                let params = self.types[i].ops[m].params.clone();
                let has_default = self.rng.gen_bool(0.4);
                let base = Scope {
                    vars: std::iter::once((binder.to_string(), Type::named(format!("T{i}"))))
                        .chain(params.iter().map(|p| (p.name.clone(), p.ty.clone())))
                        .collect(),
                    cur: Some((i, m, binder)),
                    rec_fields: Vec::new(),
                };
                let default = if has_default {
                    Some(self.expr(&ret, self.cfg.max_expr_depth, &base))
                } else {
                    None
                };
                let mut bodies = Vec::new();
                for k in 0..self.types[i].ctors.len() {
                    if has_default && self.rng.gen_bool(0.6) {
                        bodies.push(None);
                        continue;
                    }
                    let fields = self.types[i].ctors[k].fields.clone();
                    let mut scope = base.clone();
                    let own = Type::named(format!("T{i}"));
                    for f in &fields {
                        scope.vars.push((f.name.clone(), f.ty.clone()));
                        if f.ty == own {
                            scope.rec_fields.push(f.name.clone());
                        }
                    }
                    bodies.push(Some(self.expr(&ret, self.cfg.max_expr_depth, &scope)));
                }
                let op = &mut self.types[i].ops[m];
                op.default = default;
                op.bodies = bodies;
            }
        }
    }

    /// A call of operation `m` of type `j` on `recv`, in that type's style.
    fn call(&self, j: usize, m: usize, recv: Expr, args: Vec<Expr>) -> Expr {
        let name = self.types[j].ops[m].name.clone();
        if self.types[j].oo {
            Expr::sel(recv, name, args)
        } else {
            Expr::app(name, recv, args)
        }
    }

    fn construct(&self, j: usize, k: usize, args: Vec<Expr>) -> Expr {
        let name = self.types[j].ctors[k].name.clone();
        if self.types[j].oo {
            Expr::new_obj(name, args)
        } else {
            Expr::ctr(name, args)
        }
    }

    fn literal(&mut self, ty: &Type) -> Expr {
        match ty {
            Type::Int => Expr::Int(self.rng.gen_range(-3..10)),
            Type::Bool => Expr::Bool(self.rng.gen_bool(0.5)),
            _ => unreachable!("literal of non-ground type"),
        }
    }

    /// Smallest value of type `ty` without using any variable.
    fn base_value(&mut self, ty: &Type) -> Expr {
        match type_index(ty) {
            None => self.literal(ty),
            Some(j) => {
                let fields: Vec<Type> = self.types[j].ctors[0].fields.iter().map(|p| p.ty.clone()).collect();
                let args = fields.iter().map(|t| self.base_value(t)).collect();
                self.construct(j, 0, args)
            }
        }
    }

    fn leaf(&mut self, ty: &Type, scope: &Scope) -> Expr {
        let vars: Vec<&String> = scope.vars.iter().filter(|(_, t)| t == ty).map(|(x, _)| x).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.7) {
            return Expr::var(vars.choose(&mut self.rng).expect("non-empty").as_str());
        }
        self.base_value(ty)
    }

    /// Calls returning `ty` that keep evaluation terminating in `scope`,
    /// split into calls on other types and calls back into the current one.
    fn calls(&self, ty: &Type, scope: &Scope) -> (Vec<Call>, Vec<Call>) {
        let mut plain = Vec::new();
        let mut recursive = Vec::new();
        let limit = scope.cur.map_or(self.types.len(), |(i, _, _)| i);
        for j in 0..limit {
            for (m, op) in self.types[j].ops.iter().enumerate() {
                if &op.ret == ty {
                    plain.push((j, m, None));
                }
            }
        }
        if let Some((i, cur_op, binder)) = scope.cur {
            for (m, op) in self.types[i].ops.iter().enumerate() {
                if &op.ret != ty {
                    continue;
                }
                if m < cur_op {
                    plain.push((i, m, Some(Expr::var(binder))));
                }
                for f in &scope.rec_fields {
                    recursive.push((i, m, Some(Expr::var(f.as_str()))));
                }
            }
        }
        (plain, recursive)
    }

    fn expr(&mut self, ty: &Type, depth: usize, scope: &Scope) -> Expr {
        if depth == 0 {
            return self.leaf(ty, scope);
        }
        let (plain, recursive) = self.calls(ty, scope);
        if !recursive.is_empty() && self.rng.gen_bool(self.cfg.recursion_bias) {
            let (j, m, recv) = recursive.choose(&mut self.rng).cloned().expect("non-empty");
            return self.finish_call(j, m, recv, depth, scope);
        }
        let choice = self.rng.gen_range(0..10);
        match choice {
            0..=2 => self.leaf(ty, scope),
            3..=4 if !plain.is_empty() || !recursive.is_empty() => {
                let all: Vec<_> = plain.into_iter().chain(recursive).collect();
                let (j, m, recv) = all.choose(&mut self.rng).cloned().expect("non-empty");
                self.finish_call(j, m, recv, depth, scope)
            }
            5 => {
                let c = self.expr(&Type::Bool, depth - 1, scope);
                let t = self.expr(ty, depth - 1, scope);
                let e = self.expr(ty, depth - 1, scope);
                Expr::if_(c, t, e)
            }
            _ => match ty {
                Type::Int => {
                    let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul]
                        .choose(&mut self.rng)
                        .expect("non-empty");
                    Expr::prim(
                        op,
                        self.expr(&Type::Int, depth - 1, scope),
                        self.expr(&Type::Int, depth - 1, scope),
                    )
                }
                Type::Bool => {
                    let (op, operand) = [
                        (BinOp::And, Type::Bool),
                        (BinOp::Or, Type::Bool),
                        (BinOp::Eq, Type::Bool),
                        (BinOp::Eq, Type::Int),
                        (BinOp::Le, Type::Int),
                        (BinOp::Lt, Type::Int),
                    ]
                    .choose(&mut self.rng)
                    .cloned()
                    .expect("non-empty");
                    Expr::prim(
                        op,
                        self.expr(&operand, depth - 1, scope),
                        self.expr(&operand, depth - 1, scope),
                    )
                }
                _ => {
                    let j = type_index(ty).expect("named type");
                    let k = self.rng.gen_range(0..self.types[j].ctors.len());
                    let fields: Vec<Type> = self.types[j].ctors[k].fields.iter().map(|p| p.ty.clone()).collect();
                    let args = fields.iter().map(|t| self.expr(t, depth - 1, scope)).collect();
                    self.construct(j, k, args)
                }
            },
        }
    }

    fn finish_call(&mut self, j: usize, m: usize, recv: Option<Expr>, depth: usize, scope: &Scope) -> Expr {
        let recv = match recv {
            Some(r) => r,
            None => self.expr(&Type::named(format!("T{j}")), depth - 1, scope),
        };
        let params: Vec<Type> = self.types[j].ops[m].params.iter().map(|p| p.ty.clone()).collect();
        let args = params.iter().map(|t| self.expr(t, depth - 1, scope)).collect();
        self.call(j, m, recv, args)
    }

    /// One or two observations of operation 0 of some type, joined into a
    /// single ground expression.
    fn main(&mut self) -> Expr {
        let probes = self.rng.gen_range(1..=2);
        let mut parts = Vec::new();
        for _ in 0..probes {
            let j = self.rng.gen_range(0..self.types.len());
            let m = 0;
            let recv = self.expr(&Type::named(format!("T{j}")), self.cfg.max_expr_depth, &Scope::main());
            let params: Vec<Type> = self.types[j].ops[m].params.iter().map(|p| p.ty.clone()).collect();
            let args = params.iter().map(|t| self.expr(t, 1, &Scope::main())).collect();
            let ret = self.types[j].ops[m].ret.clone();
            parts.push((self.call(j, m, recv, args), ret));
        }
        let (first, ty) = parts.remove(0);
        match parts.pop() {
            None => first,
            Some((second, ty2)) => {
                let as_int = |e: Expr, t: &Type| match t {
                    Type::Bool => Expr::if_(e, Expr::Int(1), Expr::Int(0)),
                    _ => e,
                };
                if ty == ty2 && ty == Type::Bool {
                    Expr::prim(BinOp::And, first, second)
                } else {
                    Expr::prim(BinOp::Add, as_int(first, &ty), as_int(second, &ty2))
                }
            }
        }
    }

    /// Rewrites every body of one operation into a self tail call and
    /// returns a main expression that reaches it.
    fn make_loop(&mut self) -> Expr {
        let i = self.rng.gen_range(0..self.types.len());
        let m = self.rng.gen_range(0..self.types[i].ops.len());
        let binder = if self.types[i].oo { THIS } else { SELF };
        let args: Vec<Expr> = self.types[i].ops[m]
            .params
            .iter()
            .map(|p| Expr::var(p.name.as_str()))
            .collect();
        let again = self.call(i, m, Expr::var(binder), args);
        let op = &mut self.types[i].ops[m];
        op.default = Some(again.clone());
        for b in &mut op.bodies {
            *b = None;
        }
        let k = self.rng.gen_range(0..self.types[i].ctors.len());
        let fields: Vec<Type> = self.types[i].ctors[k].fields.iter().map(|p| p.ty.clone()).collect();
        let recv_args = fields.iter().map(|t| self.base_value(t)).collect();
        let recv = self.construct(i, k, recv_args);
        let params: Vec<Type> = self.types[i].ops[m].params.iter().map(|p| p.ty.clone()).collect();
        let args = params.iter().map(|t| self.base_value(t)).collect();
        let call = self.call(i, m, recv, args);
        match &self.types[i].ops[m].ret {
            Type::Int | Type::Bool => call,
            // Observe a non-ground result through operation 0.
            _ => {
                let j = type_index(&self.types[i].ops[m].ret).expect("named type");
                let params: Vec<Type> = self.types[j].ops[0].params.iter().map(|p| p.ty.clone()).collect();
                let args = params.iter().map(|t| self.base_value(t)).collect();
                self.call(j, 0, call, args)
            }
        }
    }

    fn emit(mut self, main: Expr) -> Program {
        let mut defs = Vec::new();
        let mut consumers = Vec::new();
        let types = std::mem::take(&mut self.types);
        for t in &types {
            if t.oo {
                let dtrs = t
                    .ops
                    .iter()
                    .map(|o| Dtr {
                        name: o.name.clone(),
                        params: o.params.clone(),
                        ret: o.ret.clone(),
                        body: o.default.clone(),
                    })
                    .collect();
                defs.push(Def::Interface(Interface {
                    name: t.name.clone(),
                    dtrs,
                    pos: Pos::default(),
                }));
                for (k, c) in t.ctors.iter().enumerate() {
                    let mut funs: Vec<Dtr> = t
                        .ops
                        .iter()
                        .filter_map(|o| {
                            o.bodies[k].clone().map(|b| Dtr {
                                name: o.name.clone(),
                                params: o.params.clone(),
                                ret: o.ret.clone(),
                                body: Some(b),
                            })
                        })
                        .collect();
                    if self.rng.gen_bool(0.2) {
                        funs.shuffle(&mut self.rng);
                    }
                    defs.push(Def::Generator(Generator {
                        name: c.name.clone(),
                        fields: c.fields.clone(),
                        parent: t.name.clone(),
                        funs,
                        pos: Pos::default(),
                    }));
                }
            } else {
                defs.push(Def::Datatype(Datatype {
                    name: t.name.clone(),
                    pos: Pos::default(),
                }));
                for c in &t.ctors {
                    defs.push(Def::Constructor(Constructor {
                        name: c.name.clone(),
                        fields: c.fields.clone(),
                        parent: t.name.clone(),
                        pos: Pos::default(),
                    }));
                }
                for o in &t.ops {
                    let mut clauses: Vec<Clause> = t
                        .ctors
                        .iter()
                        .zip(&o.bodies)
                        .filter_map(|(c, b)| {
                            b.clone().map(|b| {
                                Clause::ctor(c.name.clone(), c.fields.iter().map(|p| p.name.clone()).collect(), b)
                            })
                        })
                        .collect();
                    if self.rng.gen_bool(0.2) {
                        clauses.shuffle(&mut self.rng);
                    }
                    let body = match &o.default {
                        Some(d) if clauses.is_empty() && self.rng.gen_bool(0.5) => ConsumerBody::Bare(d.clone()),
                        Some(d) => {
                            clauses.push(Clause::wildcard(d.clone()));
                            ConsumerBody::Match(clauses)
                        }
                        None => ConsumerBody::Match(clauses),
                    };
                    consumers.push(Def::Consumer(Consumer {
                        name: o.name.clone(),
                        self_type: t.name.clone(),
                        params: o.params.clone(),
                        ret: o.ret.clone(),
                        body,
                        pos: Pos::default(),
                    }));
                }
            }
        }
        consumers.shuffle(&mut self.rng);
        defs.extend(consumers);
        Program::new(defs, main)
    }
}
