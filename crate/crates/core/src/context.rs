//! The preprocessed global context: which names are datatypes or
//! interfaces, their constructors, generators, destructors and consumers,
//! and the signatures used for typing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::diagnostic::Diagnostic;
use crate::syntax::{
    param_types, Clause, Constructor, Consumer, ConsumerBody, Datatype, Def, Dtr, Generator, Interface, Param, Pos,
    Program, Type,
};

/// Key of the signature map: classes (constructors and generators) by name,
/// consumers by `(f, D)` so overloads on different datatypes coexist.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SigKey {
    Class(String),
    Consumer(String, String),
}

impl fmt::Display for SigKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigKey::Class(c) => f.write_str(c),
            SigKey::Consumer(name, d) => write!(f, "({name}, {d})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DefKey {
    Type(String),
    Class(String),
    Consumer(String, String),
}

impl fmt::Display for DefKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DefKey::Type(d) => write!(f, "type {d}"),
            DefKey::Class(c) => write!(f, "class {c}"),
            DefKey::Consumer(name, d) => write!(f, "consumer ({name}, {d})"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GlobalCtx {
    pub dt: BTreeSet<String>,
    pub it: BTreeSet<String>,
    pub ctr: BTreeMap<String, Vec<String>>,
    pub gen: BTreeMap<String, Vec<String>>,
    pub dtr: BTreeMap<String, Vec<String>>,
    pub csm: BTreeMap<String, Vec<String>>,
    pub sig: BTreeMap<SigKey, Type>,
    /// Destructor signatures `(T̄) -> T`, keyed by `(f, D)`.
    pub dtr_sig: BTreeMap<(String, String), Type>,
    pub def: BTreeMap<DefKey, Def>,
}

fn list<'a>(map: &'a BTreeMap<String, Vec<String>>, d: &str) -> &'a [String] {
    map.get(d).map(Vec::as_slice).unwrap_or(&[])
}

impl GlobalCtx {
    pub fn ctr(&self, d: &str) -> &[String] {
        list(&self.ctr, d)
    }

    pub fn gen(&self, d: &str) -> &[String] {
        list(&self.gen, d)
    }

    pub fn dtr(&self, d: &str) -> &[String] {
        list(&self.dtr, d)
    }

    pub fn csm(&self, d: &str) -> &[String] {
        list(&self.csm, d)
    }

    pub fn is_type(&self, d: &str) -> bool {
        self.def.contains_key(&DefKey::Type(d.to_string()))
    }

    pub fn class_sig(&self, c: &str) -> Option<&Type> {
        self.sig.get(&SigKey::Class(c.to_string()))
    }

    pub fn consumer_sig(&self, f: &str, d: &str) -> Option<&Type> {
        self.sig.get(&SigKey::Consumer(f.to_string(), d.to_string()))
    }

    pub fn dtr_sig(&self, f: &str, d: &str) -> Option<&Type> {
        self.dtr_sig.get(&(f.to_string(), d.to_string()))
    }

    pub fn type_def(&self, d: &str) -> Option<&Def> {
        self.def.get(&DefKey::Type(d.to_string()))
    }

    pub fn interface(&self, d: &str) -> Option<&Interface> {
        match self.type_def(d)? {
            Def::Interface(i) => Some(i),
            _ => None,
        }
    }

    pub fn class_def(&self, c: &str) -> Option<&Def> {
        self.def.get(&DefKey::Class(c.to_string()))
    }

    pub fn constructor(&self, c: &str) -> Option<&Constructor> {
        match self.class_def(c)? {
            Def::Constructor(k) => Some(k),
            _ => None,
        }
    }

    pub fn generator(&self, c: &str) -> Option<&Generator> {
        match self.class_def(c)? {
            Def::Generator(g) => Some(g),
            _ => None,
        }
    }

    pub fn consumer(&self, f: &str, d: &str) -> Option<&Consumer> {
        match self.def.get(&DefKey::Consumer(f.to_string(), d.to_string()))? {
            Def::Consumer(c) => Some(c),
            _ => None,
        }
    }

    /// The parent type of a constructor or generator.
    pub fn parent_of(&self, c: &str) -> Option<&str> {
        match self.class_def(c)? {
            Def::Constructor(k) => Some(&k.parent),
            Def::Generator(g) => Some(&g.parent),
            _ => None,
        }
    }

    /// Field list of a constructor or generator.
    pub fn fields_of(&self, c: &str) -> Option<&[Param]> {
        match self.class_def(c)? {
            Def::Constructor(k) => Some(&k.fields),
            Def::Generator(g) => Some(&g.fields),
            _ => None,
        }
    }

    /// Every declared datatype and interface name, whether or not it
    /// survived restriction.
    pub fn declared_types(&self) -> BTreeSet<String> {
        self.def
            .keys()
            .filter_map(|k| match k {
                DefKey::Type(d) => Some(d.clone()),
                _ => None,
            })
            .collect()
    }

    /// Key-sorted text rendering, one entry per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let set = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(", ");
        let _ = writeln!(out, "dt = {{{}}}", set(&self.dt));
        let _ = writeln!(out, "it = {{{}}}", set(&self.it));
        for (label, map) in [
            ("ctr", &self.ctr),
            ("gen", &self.gen),
            ("dtr", &self.dtr),
            ("csm", &self.csm),
        ] {
            for (d, names) in map {
                let _ = writeln!(out, "{label}({d}) = [{}]", names.join(", "));
            }
        }
        for (k, t) in &self.sig {
            let _ = writeln!(out, "sig({k}) = {t}");
        }
        for ((f, d), t) in &self.dtr_sig {
            let _ = writeln!(out, "dtrSig({f}, {d}) = {t}");
        }
        for (k, def) in &self.def {
            let _ = writeln!(out, "def({k}) = {}", def.kind());
        }
        out
    }
}

/// Builds the global context of a program. All problems are collected.
pub fn preprocess(program: &Program) -> Result<GlobalCtx, Vec<Diagnostic>> {
    let mut ctx = GlobalCtx::default();
    let mut errors = Vec::new();

    // Types first so that parents may be declared after their children.
    for def in &program.defs {
        let (name, pos) = match def {
            Def::Datatype(d) => (&d.name, d.pos),
            Def::Interface(i) => (&i.name, i.pos),
            _ => continue,
        };
        if ctx.def.contains_key(&DefKey::Type(name.clone())) {
            errors.push(Diagnostic::at(pos, format!("type `{name}` is declared twice")));
            continue;
        }
        ctx.def.insert(DefKey::Type(name.clone()), def.clone());
        match def {
            Def::Datatype(_) => {
                ctx.dt.insert(name.clone());
                ctx.ctr.insert(name.clone(), Vec::new());
                ctx.csm.insert(name.clone(), Vec::new());
            }
            Def::Interface(i) => {
                ctx.it.insert(name.clone());
                ctx.gen.insert(name.clone(), Vec::new());
                let mut names = Vec::new();
                for d in &i.dtrs {
                    if names.contains(&d.name) {
                        errors.push(Diagnostic::at(
                            pos,
                            format!("destructor `{}` is declared twice in `{name}`", d.name),
                        ));
                        continue;
                    }
                    names.push(d.name.clone());
                    ctx.dtr_sig.insert((d.name.clone(), name.clone()), d.signature());
                }
                ctx.dtr.insert(name.clone(), names);
            }
            _ => unreachable!(),
        }
    }

    for def in &program.defs {
        match def {
            Def::Datatype(_) | Def::Interface(_) => {}
            Def::Constructor(Constructor {
                name,
                fields,
                parent,
                pos,
            })
            | Def::Generator(Generator {
                name,
                fields,
                parent,
                pos,
                ..
            }) => {
                let is_ctor = matches!(def, Def::Constructor(_));
                if ctx.is_type(name) || ctx.def.contains_key(&DefKey::Class(name.clone())) {
                    errors.push(Diagnostic::at(*pos, format!("`{name}` is declared twice")));
                    continue;
                }
                let parent_ok = if is_ctor {
                    ctx.dt.contains(parent)
                } else {
                    ctx.it.contains(parent)
                };
                if !parent_ok {
                    let msg = match (is_ctor, ctx.is_type(parent)) {
                        (true, true) => format!("constructor `{name}` extends interface `{parent}`; use a class"),
                        (false, true) => format!("class `{name}` implements datatype `{parent}`; use a case"),
                        (_, false) => format!("`{name}` has undeclared parent type `{parent}`"),
                    };
                    errors.push(Diagnostic::at(*pos, msg));
                    continue;
                }
                let map = if is_ctor { &mut ctx.ctr } else { &mut ctx.gen };
                map.entry(parent.clone()).or_default().push(name.clone());
                ctx.sig.insert(
                    SigKey::Class(name.clone()),
                    Type::arrow(param_types(fields), Type::named(parent)),
                );
                ctx.def.insert(DefKey::Class(name.clone()), def.clone());
            }
            Def::Consumer(c) => {
                if !ctx.dt.contains(&c.self_type) {
                    let msg = if ctx.it.contains(&c.self_type) {
                        format!(
                            "consumer `{}` matches on interface `{}`; consumers need a datatype",
                            c.name, c.self_type
                        )
                    } else {
                        format!("consumer `{}` has undeclared type `{}`", c.name, c.self_type)
                    };
                    errors.push(Diagnostic::at(c.pos, msg));
                    continue;
                }
                let key = DefKey::Consumer(c.name.clone(), c.self_type.clone());
                if ctx.def.contains_key(&key) {
                    errors.push(Diagnostic::at(
                        c.pos,
                        format!("consumer `{}` on `{}` is declared twice", c.name, c.self_type),
                    ));
                    continue;
                }
                ctx.csm.entry(c.self_type.clone()).or_default().push(c.name.clone());
                ctx.sig
                    .insert(SigKey::Consumer(c.name.clone(), c.self_type.clone()), c.signature());
                ctx.def.insert(key, def.clone());
            }
        }
    }

    if errors.is_empty() {
        Ok(ctx)
    } else {
        Err(errors)
    }
}

/// Keeps only the selected types in `dt`/`it` and empties the maps of every
/// other type. Signatures and definitions are kept for typing skip rules.
pub fn restrict(ctx: &GlobalCtx, selected: &BTreeSet<String>) -> Result<GlobalCtx, Diagnostic> {
    if let Some(bad) = selected.iter().find(|d| !ctx.is_type(d)) {
        return Err(Diagnostic::unplaced(format!("unknown type `{bad}`")));
    }
    let mut out = ctx.clone();
    out.dt.retain(|d| selected.contains(d));
    out.it.retain(|d| selected.contains(d));
    for map in [&mut out.ctr, &mut out.csm] {
        map.retain(|d, _| out.dt.contains(d));
    }
    for map in [&mut out.gen, &mut out.dtr] {
        map.retain(|d, _| out.it.contains(d));
    }
    Ok(out)
}

/// The context a transformed program is expected to have: datatypes and
/// interfaces swap roles, and signatures of the swapped types move between
/// the consumer and destructor maps.
///
/// Definitions of swapped types are replaced by signature-only shells; only
/// their keys are meaningful.
pub fn translate_ctx(ctx: &GlobalCtx) -> GlobalCtx {
    let mut out = ctx.clone();
    std::mem::swap(&mut out.dt, &mut out.it);
    std::mem::swap(&mut out.ctr, &mut out.gen);
    std::mem::swap(&mut out.dtr, &mut out.csm);

    for d in &ctx.it {
        for f in ctx.dtr(d) {
            let key = (f.clone(), d.clone());
            let Some(Type::Arrow(params, ret)) = out.dtr_sig.remove(&key) else {
                continue;
            };
            let inner = Type::Arrow(params.clone(), ret.clone());
            out.sig.insert(
                SigKey::Consumer(f.clone(), d.clone()),
                Type::arrow(vec![Type::named(d)], inner),
            );
            let params = params
                .iter()
                .enumerate()
                .map(|(i, t)| Param::new(format!("x{i}"), t.clone()))
                .collect();
            out.def.insert(
                DefKey::Consumer(f.clone(), d.clone()),
                Def::Consumer(Consumer {
                    name: f.clone(),
                    self_type: d.clone(),
                    params,
                    ret: *ret,
                    body: ConsumerBody::Match(Vec::<Clause>::new()),
                    pos: Pos::default(),
                }),
            );
        }
        out.def.insert(
            DefKey::Type(d.clone()),
            Def::Datatype(Datatype {
                name: d.clone(),
                pos: Pos::default(),
            }),
        );
        for c in ctx.gen(d) {
            if let Some(Def::Generator(g)) = ctx.class_def(c) {
                out.def.insert(
                    DefKey::Class(c.clone()),
                    Def::Constructor(Constructor {
                        name: g.name.clone(),
                        fields: g.fields.clone(),
                        parent: g.parent.clone(),
                        pos: Pos::default(),
                    }),
                );
            }
        }
    }

    for d in &ctx.dt {
        let mut dtrs = Vec::new();
        for f in ctx.csm(d) {
            let Some(Type::Arrow(_, inner)) = out.sig.remove(&SigKey::Consumer(f.clone(), d.clone())) else {
                continue;
            };
            let Def::Consumer(c) = out
                .def
                .remove(&DefKey::Consumer(f.clone(), d.clone()))
                .expect("consumer signature without definition")
            else {
                unreachable!()
            };
            out.dtr_sig.insert((f.clone(), d.clone()), *inner);
            dtrs.push(Dtr {
                name: c.name,
                params: c.params,
                ret: c.ret,
                body: None,
            });
        }
        out.def.insert(
            DefKey::Type(d.clone()),
            Def::Interface(Interface {
                name: d.clone(),
                dtrs,
                pos: Pos::default(),
            }),
        );
        for c in ctx.ctr(d) {
            if let Some(Def::Constructor(k)) = ctx.class_def(c) {
                out.def.insert(
                    DefKey::Class(c.clone()),
                    Def::Generator(Generator {
                        name: k.name.clone(),
                        fields: k.fields.clone(),
                        parent: k.parent.clone(),
                        funs: Vec::new(),
                        pos: Pos::default(),
                    }),
                );
            }
        }
    }
    out
}

/// Compares two contexts componentwise on everything except definition
/// bodies. Returns the names of the differing components.
pub fn ctx_differences(a: &GlobalCtx, b: &GlobalCtx) -> Vec<&'static str> {
    let mut diffs = Vec::new();
    if a.dt != b.dt {
        diffs.push("dt");
    }
    if a.it != b.it {
        diffs.push("it");
    }
    if a.ctr != b.ctr {
        diffs.push("ctr");
    }
    if a.gen != b.gen {
        diffs.push("gen");
    }
    if a.dtr != b.dtr {
        diffs.push("dtr");
    }
    if a.csm != b.csm {
        diffs.push("csm");
    }
    if a.sig != b.sig {
        diffs.push("sig");
    }
    if a.dtr_sig != b.dtr_sig {
        diffs.push("dtrSig");
    }
    let kinds = |c: &GlobalCtx| c.def.iter().map(|(k, d)| (k.clone(), d.kind())).collect::<Vec<_>>();
    if kinds(a) != kinds(b) {
        diffs.push("def");
    }
    diffs
}

/// Typing environment for variables; later bindings shadow earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeEnv {
    binds: Vec<(String, Type)>,
}

impl TypeEnv {
    pub fn new() -> Self {
        TypeEnv::default()
    }

    pub fn bind(&mut self, x: impl Into<String>, ty: Type) {
        self.binds.push((x.into(), ty));
    }

    pub fn with(mut self, x: impl Into<String>, ty: Type) -> Self {
        self.bind(x, ty);
        self
    }

    pub fn bind_params(&mut self, params: &[Param]) {
        for p in params {
            self.bind(p.name.clone(), p.ty.clone());
        }
    }

    pub fn lookup(&self, x: &str) -> Option<&Type> {
        self.binds.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn is_empty(&self) -> bool {
        self.binds.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::parser::parse;
    use crate::syntax::desugar;

    fn ctx_of(src: &str) -> GlobalCtx {
        preprocess(&desugar(&parse(src).unwrap())).unwrap()
    }

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn oo_sets_context() {
        let ctx = ctx_of(corpus::SETS_OOP);
        assert_eq!(ctx.it, set(&["Set"]));
        assert!(ctx.dt.is_empty());
        assert_eq!(ctx.dtr("Set"), names(&["isEmpty", "contains", "insert", "union"]));
        assert_eq!(ctx.gen("Set"), names(&["Empty", "Insert", "Union"]));
        assert_eq!(
            ctx.dtr_sig("insert", "Set"),
            Some(&Type::arrow(vec![Type::Int], Type::named("Set")))
        );
        assert!(ctx.ctr("Set").is_empty() && ctx.csm("Set").is_empty());
    }

    #[test]
    fn fp_sets_context() {
        let ctx = ctx_of(corpus::SETS_FP);
        assert_eq!(ctx.dt, set(&["Set"]));
        assert_eq!(ctx.ctr("Set"), names(&["Empty", "Insert", "Union"]));
        assert_eq!(ctx.csm("Set"), names(&["isEmpty", "contains", "insert", "union"]));
        let set_t = Type::named("Set");
        assert_eq!(
            ctx.consumer_sig("contains", "Set"),
            Some(&Type::arrow(vec![set_t], Type::arrow(vec![Type::Int], Type::Bool)))
        );
        assert_eq!(
            ctx.consumer_sig("contains", "Set").unwrap().to_string(),
            "(Set) -> (Int) -> Bool"
        );
    }

    #[test]
    fn empty_program_context() {
        assert_eq!(ctx_of("1"), GlobalCtx::default());
    }

    #[test]
    fn restrict_keeps_selected_only() {
        let ctx = ctx_of(corpus::SETLIST_OOP);
        let r = restrict(&ctx, &set(&["Set"])).unwrap();
        assert_eq!(r.it, set(&["Set"]));
        assert!(r.gen("List").is_empty() && r.dtr("List").is_empty());
        assert_eq!(r.sig, ctx.sig);
        assert_eq!(r.dtr_sig, ctx.dtr_sig);
        assert_eq!(r.def, ctx.def);
    }

    #[test]
    fn restrict_all_and_none() {
        let ctx = ctx_of(corpus::SETLIST_OOP);
        assert_eq!(restrict(&ctx, &set(&["Set", "List"])).unwrap(), ctx);
        let none = restrict(&ctx, &BTreeSet::new()).unwrap();
        assert!(none.dt.is_empty() && none.it.is_empty());
        assert!(none.ctr.is_empty() && none.gen.is_empty() && none.dtr.is_empty() && none.csm.is_empty());
        assert!(restrict(&ctx, &set(&["Nope"])).is_err());
    }

    #[test]
    fn translate_oo_sets_gives_fp_sets() {
        let oo = ctx_of(corpus::SETS_OOP);
        let fp = ctx_of(corpus::SETS_FP);
        assert_eq!(ctx_differences(&translate_ctx(&oo), &fp), Vec::<&str>::new());
        assert_eq!(ctx_differences(&translate_ctx(&fp), &oo), Vec::<&str>::new());
    }

    #[test]
    fn translate_is_an_involution_on_tables() {
        for src in [corpus::SETS_OOP, corpus::SETS_FP, corpus::SETLIST_SET_FP] {
            let ctx = ctx_of(src);
            assert!(ctx_differences(&translate_ctx(&translate_ctx(&ctx)), &ctx).is_empty());
        }
    }

    #[test]
    fn translate_skip_entries_unchanged() {
        let ctx = ctx_of(corpus::SETLIST_OOP);
        let r = restrict(&ctx, &set(&["Set"])).unwrap();
        let t = translate_ctx(&r);
        assert_eq!(t.dtr_sig("contains", "List"), ctx.dtr_sig("contains", "List"));
        assert_eq!(t.class_sig("Cons"), ctx.class_sig("Cons"));
        assert_eq!(
            t.def.get(&DefKey::Class("Nil".into())),
            ctx.def.get(&DefKey::Class("Nil".into()))
        );
    }

    #[test]
    fn preprocess_errors() {
        let cases = [
            ("data A\ndata A\n1", "declared twice"),
            ("case C() extends D\n1", "undeclared parent"),
            ("interface I {}\ncase C() extends I\n1", "use a class"),
            ("data D\nclass C() implements D {}\n1", "use a case"),
            ("interface I {}\ndef f(self: I)(): Int = 1\n1", "need a datatype"),
            (
                "data D\ndef f(self: D)(): Int = 1\ndef f(self: D)(): Int = 2\n1",
                "declared twice",
            ),
            ("interface I { def f(): Int def f(): Int }\n1", "declared twice"),
            ("data A\ncase A() extends A\n1", "declared twice"),
        ];
        for (src, needle) in cases {
            let errs = preprocess(&parse(src).unwrap()).unwrap_err();
            assert!(errs.iter().any(|e| e.message.contains(needle)), "{src}: {errs:?}");
        }
    }

    #[test]
    fn overloaded_consumers_coexist() {
        let ctx = ctx_of(corpus::SETLIST_FP);
        assert!(ctx.consumer("contains", "Set").is_some());
        assert!(ctx.consumer("contains", "List").is_some());
    }

    #[test]
    fn dump_is_sorted_and_stable() {
        let ctx = ctx_of(corpus::SETS_OOP);
        let text = ctx.dump();
        assert!(text.starts_with("dt = {}\nit = {Set}\n"));
        assert!(text.contains("dtrSig(insert, Set) = (Int) -> Set\n"));
        assert_eq!(text, ctx.clone().dump());
    }

    #[test]
    fn env_shadows() {
        let env = TypeEnv::new().with("x", Type::Int).with("x", Type::Bool);
        assert_eq!(env.lookup("x"), Some(&Type::Bool));
        assert_eq!(env.lookup("y"), None);
    }
}
