//! Abstract syntax of FOOD programs.
//!
//! A program is a sequence of definitions followed by a main expression.
//! Definitions come in five forms: datatypes and their constructors,
//! interfaces and their generators (classes), and consumers (top-level
//! functions that pattern match on their `self` argument).
//!
//! Equality on every node is structural. Source positions are carried on
//! definitions for diagnostics but never take part in comparisons.

mod canon;
mod pretty;

use std::fmt;

pub use canon::{canonicalize, desugar};
pub use pretty::{pretty, pretty_expr, PrintError};

/// Reserved binder for the receiver inside interfaces and generators.
pub const THIS: &str = "this";
/// Reserved binder for the datatype argument of a consumer.
pub const SELF: &str = "self";

/// A source position. Always compares equal so that structural equality
/// ignores where a node came from.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    pub fn new(line: usize, column: usize) -> Self {
        Pos { line, column }
    }

    pub fn is_known(&self) -> bool {
        self.line > 0
    }
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Named(String),
    Arrow(Vec<Type>, Box<Type>),
    Int,
    Bool,
}

impl Type {
    pub fn named(name: impl Into<String>) -> Type {
        Type::Named(name.into())
    }

    pub fn arrow(params: Vec<Type>, ret: Type) -> Type {
        Type::Arrow(params, Box::new(ret))
    }

    pub fn as_named(&self) -> Option<&str> {
        match self {
            Type::Named(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Named(d) => f.write_str(d),
            Type::Int => f.write_str("Int"),
            Type::Bool => f.write_str("Bool"),
            Type::Arrow(params, ret) => {
                f.write_str("(")?;
                for (i, p) in params.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ") -> {ret}")
            }
        }
    }
}

/// A typed binder: a field, a parameter or the `self` argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
}

impl Param {
    pub fn new(name: impl Into<String>, ty: Type) -> Self {
        Param { name: name.into(), ty }
    }
}

pub fn param_names(params: &[Param]) -> Vec<String> {
    params.iter().map(|p| p.name.clone()).collect()
}

pub fn param_types(params: &[Param]) -> Vec<Type> {
    params.iter().map(|p| p.ty.clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    And,
    Or,
    Eq,
    Le,
    Lt,
}

impl BinOp {
    pub const ALL: [BinOp; 8] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::And,
        BinOp::Or,
        BinOp::Eq,
        BinOp::Le,
        BinOp::Lt,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Eq => "==",
            BinOp::Le => "<=",
            BinOp::Lt => "<",
        }
    }

    /// Binding strength; higher binds tighter. All operators are left associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq => 3,
            BinOp::Le | BinOp::Lt => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul => 6,
        }
    }
}

/// Runtime values: `obj(C, v̄)` plus the primitive extension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Obj(String, Vec<Value>),
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn into_expr(self) -> Expr {
        match self {
            Value::Int(i) => Expr::Int(i),
            Value::Bool(b) => Expr::Bool(b),
            obj => Expr::Obj(obj),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Obj(c, fields) => {
                write!(f, "obj({c}")?;
                for v in fields {
                    write!(f, ", {v}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    /// Destructor selection `recv.f(args)`.
    Sel {
        recv: Box<Expr>,
        name: String,
        args: Vec<Expr>,
    },
    /// Consumer application `f(first)(args)`.
    App {
        name: String,
        first: Box<Expr>,
        args: Vec<Expr>,
    },
    /// Constructor call `C(args)`.
    Ctr {
        name: String,
        args: Vec<Expr>,
    },
    /// Generator instantiation `new C(args)`.
    New {
        name: String,
        args: Vec<Expr>,
    },
    /// Runtime object; never produced by the parser. Holds a [`Value::Obj`].
    Obj(Value),
    Int(i64),
    Bool(bool),
    Prim {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    If {
        cond: Box<Expr>,
        then: Box<Expr>,
        els: Box<Expr>,
    },
}

impl Expr {
    pub fn var(x: impl Into<String>) -> Expr {
        Expr::Var(x.into())
    }

    pub fn sel(recv: Expr, name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Sel {
            recv: Box::new(recv),
            name: name.into(),
            args,
        }
    }

    pub fn app(name: impl Into<String>, first: Expr, args: Vec<Expr>) -> Expr {
        Expr::App {
            name: name.into(),
            first: Box::new(first),
            args,
        }
    }

    pub fn ctr(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Ctr {
            name: name.into(),
            args,
        }
    }

    pub fn new_obj(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::New {
            name: name.into(),
            args,
        }
    }

    pub fn prim(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Prim {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn if_(cond: Expr, then: Expr, els: Expr) -> Expr {
        Expr::If {
            cond: Box::new(cond),
            then: Box::new(then),
            els: Box::new(els),
        }
    }

    /// Value forms: runtime objects and literals.
    pub fn is_value(&self) -> bool {
        matches!(self, Expr::Obj(_) | Expr::Int(_) | Expr::Bool(_))
    }

    pub fn as_value(&self) -> Option<Value> {
        match self {
            Expr::Obj(v) => Some(v.clone()),
            Expr::Int(i) => Some(Value::Int(*i)),
            Expr::Bool(b) => Some(Value::Bool(*b)),
            _ => None,
        }
    }

    /// Immediate subexpressions in evaluation order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Var(_) | Expr::Obj(_) | Expr::Int(_) | Expr::Bool(_) => Vec::new(),
            Expr::Sel { recv, args, .. } => std::iter::once(&**recv).chain(args).collect(),
            Expr::App { first, args, .. } => std::iter::once(&**first).chain(args).collect(),
            Expr::Ctr { args, .. } | Expr::New { args, .. } => args.iter().collect(),
            Expr::Prim { lhs, rhs, .. } => vec![lhs, rhs],
            Expr::If { cond, then, els } => vec![cond, then, els],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Expr> {
        match self {
            Expr::Var(_) | Expr::Obj(_) | Expr::Int(_) | Expr::Bool(_) => Vec::new(),
            Expr::Sel { recv, args, .. } => std::iter::once(&mut **recv).chain(args).collect(),
            Expr::App { first, args, .. } => std::iter::once(&mut **first).chain(args).collect(),
            Expr::Ctr { args, .. } | Expr::New { args, .. } => args.iter_mut().collect(),
            Expr::Prim { lhs, rhs, .. } => vec![lhs, rhs],
            Expr::If { cond, then, els } => vec![cond, then, els],
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn mentions(&self, x: &str) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if let Expr::Var(y) = e {
                found |= y == x;
            }
        });
        found
    }

    pub fn contains_obj(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e, Expr::Obj(_)));
        found
    }

    /// Replaces every occurrence of variable `from` with variable `to`.
    /// Expressions bind nothing, so renaming is capture-free.
    pub fn rename(&self, from: &str, to: &str) -> Expr {
        let mut out = self.clone();
        out.rename_in_place(from, to);
        out
    }

    pub fn rename_in_place(&mut self, from: &str, to: &str) {
        if let Expr::Var(x) = self {
            if x == from {
                *x = to.to_string();
            }
            return;
        }
        for c in self.children_mut() {
            c.rename_in_place(from, to);
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

impl fmt::Display for Expr {
    /// Prints any expression, including runtime objects (as `obj(C, ...)`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty::expr_to_string(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Ctor(String, Vec<String>),
    Wildcard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub pattern: Pattern,
    pub body: Expr,
}

impl Clause {
    pub fn ctor(name: impl Into<String>, vars: Vec<String>, body: Expr) -> Clause {
        Clause {
            pattern: Pattern::Ctor(name.into(), vars),
            body,
        }
    }

    pub fn wildcard(body: Expr) -> Clause {
        Clause {
            pattern: Pattern::Wildcard,
            body,
        }
    }

    pub fn is_wildcard(&self) -> bool {
        matches!(self.pattern, Pattern::Wildcard)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsumerBody {
    /// `= e`, sugar for `match { case _ => e }`.
    Bare(Expr),
    Match(Vec<Clause>),
}

/// Destructor: a declaration, or a function when it carries a body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dtr {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Type,
    pub body: Option<Expr>,
}

impl Dtr {
    pub fn signature(&self) -> Type {
        Type::arrow(param_types(&self.params), self.ret.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Datatype {
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interface {
    pub name: String,
    pub dtrs: Vec<Dtr>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constructor {
    pub name: String,
    pub fields: Vec<Param>,
    pub parent: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub fields: Vec<Param>,
    pub parent: String,
    /// Method implementations; every entry has a body.
    pub funs: Vec<Dtr>,
    pub pos: Pos,
}

impl Generator {
    pub fn fun(&self, name: &str) -> Option<&Dtr> {
        self.funs.iter().find(|d| d.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Consumer {
    pub name: String,
    pub self_type: String,
    pub params: Vec<Param>,
    pub ret: Type,
    pub body: ConsumerBody,
    pub pos: Pos,
}

impl Consumer {
    /// Clauses after desugaring; a bare body reads as one wildcard clause.
    pub fn clauses(&self) -> Vec<Clause> {
        match &self.body {
            ConsumerBody::Bare(e) => vec![Clause::wildcard(e.clone())],
            ConsumerBody::Match(cs) => cs.clone(),
        }
    }

    pub fn clause_for(&self, ctor: &str) -> Option<&Clause> {
        match &self.body {
            ConsumerBody::Bare(_) => None,
            ConsumerBody::Match(cs) => cs
                .iter()
                .find(|c| matches!(&c.pattern, Pattern::Ctor(n, _) if n == ctor)),
        }
    }

    pub fn wildcard_body(&self) -> Option<&Expr> {
        match &self.body {
            ConsumerBody::Bare(e) => Some(e),
            ConsumerBody::Match(cs) => cs.iter().find(|c| c.is_wildcard()).map(|c| &c.body),
        }
    }

    /// `D → (T̄) → T`.
    pub fn signature(&self) -> Type {
        Type::arrow(
            vec![Type::named(&self.self_type)],
            Type::arrow(param_types(&self.params), self.ret.clone()),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Def {
    Datatype(Datatype),
    Interface(Interface),
    Constructor(Constructor),
    Generator(Generator),
    Consumer(Consumer),
}

impl Def {
    /// The defined name: D, C or f.
    pub fn name(&self) -> &str {
        match self {
            Def::Datatype(d) => &d.name,
            Def::Interface(i) => &i.name,
            Def::Constructor(c) => &c.name,
            Def::Generator(g) => &g.name,
            Def::Consumer(c) => &c.name,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Def::Datatype(d) => d.pos,
            Def::Interface(i) => i.pos,
            Def::Constructor(c) => c.pos,
            Def::Generator(g) => g.pos,
            Def::Consumer(c) => c.pos,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Def::Datatype(_) => "datatype",
            Def::Interface(_) => "interface",
            Def::Constructor(_) => "constructor",
            Def::Generator(_) => "generator",
            Def::Consumer(_) => "consumer",
        }
    }

    /// All expressions held by this definition.
    pub fn exprs(&self) -> Vec<&Expr> {
        match self {
            Def::Datatype(_) | Def::Constructor(_) => Vec::new(),
            Def::Interface(i) => i.dtrs.iter().filter_map(|d| d.body.as_ref()).collect(),
            Def::Generator(g) => g.funs.iter().filter_map(|d| d.body.as_ref()).collect(),
            Def::Consumer(c) => match &c.body {
                ConsumerBody::Bare(e) => vec![e],
                ConsumerBody::Match(cs) => cs.iter().map(|c| &c.body).collect(),
            },
        }
    }

    pub fn exprs_mut(&mut self) -> Vec<&mut Expr> {
        match self {
            Def::Datatype(_) | Def::Constructor(_) => Vec::new(),
            Def::Interface(i) => i.dtrs.iter_mut().filter_map(|d| d.body.as_mut()).collect(),
            Def::Generator(g) => g.funs.iter_mut().filter_map(|d| d.body.as_mut()).collect(),
            Def::Consumer(c) => match &mut c.body {
                ConsumerBody::Bare(e) => vec![e],
                ConsumerBody::Match(cs) => cs.iter_mut().map(|c| &mut c.body).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub defs: Vec<Def>,
    pub main: Expr,
}

impl Program {
    pub fn new(defs: Vec<Def>, main: Expr) -> Self {
        Program { defs, main }
    }

    /// Names of every declared datatype and interface, in source order.
    pub fn type_names(&self) -> Vec<String> {
        self.defs
            .iter()
            .filter_map(|d| match d {
                Def::Datatype(d) => Some(d.name.clone()),
                Def::Interface(i) => Some(i.name.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn contains_obj(&self) -> bool {
        self.main.contains_obj() || self.defs.iter().any(|d| d.exprs().iter().any(|e| e.contains_obj()))
    }
}
