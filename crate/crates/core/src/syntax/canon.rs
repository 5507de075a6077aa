use std::collections::{HashMap, HashSet};

use super::{Clause, ConsumerBody, Def, Pattern, Program};

/// Rewrites every bare consumer body `= e` into `match { case _ => e }`.
pub fn desugar(program: &Program) -> Program {
    let mut out = program.clone();
    for def in &mut out.defs {
        if let Def::Consumer(c) = def {
            if let ConsumerBody::Bare(e) = &c.body {
                c.body = ConsumerBody::Match(vec![Clause::wildcard(e.clone())]);
            }
        }
    }
    out
}

/// Normal form used to compare programs up to definition placement.
///
/// Each datatype is immediately followed by its consumers (in their source
/// order), non-wildcard clauses follow constructor declaration order, and
/// generator methods follow the interface's destructor order. Everything
/// else keeps its relative order.
pub fn canonicalize(program: &Program) -> Program {
    let mut ctor_rank: HashMap<&str, HashMap<&str, usize>> = HashMap::new();
    let mut dtr_rank: HashMap<&str, HashMap<&str, usize>> = HashMap::new();
    let mut datatypes = HashSet::new();
    for def in &program.defs {
        match def {
            Def::Datatype(d) => {
                datatypes.insert(d.name.as_str());
            }
            Def::Constructor(c) => {
                let ranks = ctor_rank.entry(c.parent.as_str()).or_default();
                let next = ranks.len();
                ranks.entry(c.name.as_str()).or_insert(next);
            }
            Def::Interface(i) => {
                let ranks = dtr_rank.entry(i.name.as_str()).or_default();
                for d in &i.dtrs {
                    let next = ranks.len();
                    ranks.entry(d.name.as_str()).or_insert(next);
                }
            }
            _ => {}
        }
    }

    let normalize = |def: &Def| -> Def {
        let mut def = def.clone();
        match &mut def {
            Def::Consumer(c) => {
                if let ConsumerBody::Match(clauses) = &mut c.body {
                    let ranks = ctor_rank.get(c.self_type.as_str());
                    let rank = |cl: &Clause| match &cl.pattern {
                        Pattern::Wildcard => usize::MAX,
                        Pattern::Ctor(name, _) => ranks
                            .and_then(|r| r.get(name.as_str()).copied())
                            .unwrap_or(usize::MAX - 1),
                    };
                    clauses.sort_by_key(|cl| rank(cl));
                }
            }
            Def::Generator(g) => {
                if let Some(ranks) = dtr_rank.get(g.parent.as_str()) {
                    g.funs
                        .sort_by_key(|f| ranks.get(f.name.as_str()).copied().unwrap_or(usize::MAX));
                }
            }
            _ => {}
        }
        def
    };

    let attached = |def: &Def| matches!(def, Def::Consumer(c) if datatypes.contains(c.self_type.as_str()));

    let mut defs = Vec::with_capacity(program.defs.len());
    for def in &program.defs {
        if attached(def) {
            continue;
        }
        defs.push(normalize(def));
        if let Def::Datatype(d) = def {
            for other in &program.defs {
                if matches!(other, Def::Consumer(c) if c.self_type == d.name) {
                    defs.push(normalize(other));
                }
            }
        }
    }
    Program::new(defs, program.main.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::parser::parse;

    #[test]
    fn desugar_bare_body() {
        let p = parse("data S\ndef f(self: S)(i: Int): Int = i\nx").unwrap();
        let d = desugar(&p);
        let Def::Consumer(c) = &d.defs[1] else { panic!() };
        assert_eq!(
            c.body,
            ConsumerBody::Match(vec![Clause::wildcard(crate::syntax::Expr::var("i"))])
        );
    }

    #[test]
    fn desugar_identity_cases() {
        let sets = parse(corpus::SETS_OOP).unwrap();
        assert_eq!(desugar(&sets), sets);
        let clauses = parse("data S\ncase A() extends S\ndef f(self: S)(): Int = match { case A() => 1 }\nx").unwrap();
        assert_eq!(desugar(&clauses), clauses);
    }

    #[test]
    fn canonical_fp_sets_with_union_hoisted() {
        let fp_sets = desugar(&parse(corpus::SETS_FP).unwrap());
        // move `union` to the front of the program
        let mut moved = fp_sets.clone();
        let idx = moved.defs.iter().position(|d| d.name() == "union").unwrap();
        let union = moved.defs.remove(idx);
        moved.defs.insert(0, union);
        let canon = canonicalize(&moved);
        let names: Vec<_> = canon.defs.iter().map(|d| d.name()).collect();
        assert_eq!(
            names,
            ["Set", "union", "isEmpty", "contains", "insert", "Empty", "Insert", "Union"]
        );
        // source order of consumers decides, so the unmoved program keeps its order
        let names: Vec<_> = canonicalize(&fp_sets).defs.iter().map(|d| d.name().to_string()).collect();
        assert_eq!(
            names,
            ["Set", "isEmpty", "contains", "insert", "union", "Empty", "Insert", "Union"]
        );
    }

    #[test]
    fn canonical_identity_cases() {
        let oo = parse(corpus::SETS_OOP).unwrap();
        assert_eq!(canonicalize(&oo), oo);
        let fp = canonicalize(&desugar(&parse(corpus::SETS_FP).unwrap()));
        assert_eq!(canonicalize(&fp), fp);
    }

    #[test]
    fn clauses_follow_constructor_order() {
        let p = parse(
            "data S\ncase A() extends S\ncase B() extends S\n\
             def f(self: S)(): Int = match { case B() => 2 case _ => 0 }\n\
             def g(self: S)(): Int = match { case B() => 2 case A() => 1 }\nx",
        )
        .unwrap();
        let p = parse(&crate::syntax::pretty(&p).unwrap()).unwrap();
        assert!(p != canonicalize(&p));
        let c = canonicalize(&p);
        let Def::Consumer(g) = &c.defs[2] else { panic!() };
        let order: Vec<_> = g.clauses().into_iter().map(|c| c.pattern).collect();
        assert_eq!(
            order,
            [Pattern::Ctor("A".into(), vec![]), Pattern::Ctor("B".into(), vec![])]
        );
    }
}
