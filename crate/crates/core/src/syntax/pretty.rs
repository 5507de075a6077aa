use std::fmt::Write;

use thiserror::Error;

use super::{ConsumerBody, Def, Dtr, Expr, Param, Pattern, Program, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrintError {
    #[error("runtime object `{0}` has no source syntax")]
    RuntimeObject(String),
}

const ATOM: u8 = 7;

/// Renders a program in concrete syntax. Fails if a runtime object is present.
pub fn pretty(program: &Program) -> Result<String, PrintError> {
    let mut out = String::new();
    for def in &program.defs {
        print_def(def, &mut out)?;
    }
    let main = pretty_expr(&program.main)?;
    if main.starts_with('(') && !program.defs.is_empty() {
        // keeps a trailing call in the last definition from absorbing the main expression
        out.push_str(";\n");
    }
    out.push_str(&main);
    out.push('\n');
    Ok(out)
}

/// Renders a source expression. Fails on runtime objects.
pub fn pretty_expr(e: &Expr) -> Result<String, PrintError> {
    let mut found = None;
    e.walk(&mut |sub| {
        if let (None, Expr::Obj(v)) = (&found, sub) {
            found = Some(v.to_string());
        }
    });
    match found {
        Some(obj) => Err(PrintError::RuntimeObject(obj)),
        None => Ok(expr_to_string(e)),
    }
}

pub(super) fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, 0, &mut out);
    out
}

fn print_def(def: &Def, out: &mut String) -> Result<(), PrintError> {
    match def {
        Def::Datatype(d) => {
            let _ = writeln!(out, "data {}", d.name);
        }
        Def::Interface(i) => {
            let _ = write!(out, "interface {} {{", i.name);
            print_members(&i.dtrs, out)?;
        }
        Def::Constructor(c) => {
            let _ = writeln!(out, "case {}({}) extends {}", c.name, params(&c.fields), c.parent);
        }
        Def::Generator(g) => {
            let _ = write!(
                out,
                "class {}({}) implements {} {{",
                g.name,
                params(&g.fields),
                g.parent
            );
            print_members(&g.funs, out)?;
        }
        Def::Consumer(c) => {
            let _ = write!(
                out,
                "def {}(self: {})({}): {} = ",
                c.name,
                c.self_type,
                params(&c.params),
                c.ret
            );
            match &c.body {
                ConsumerBody::Bare(e) => {
                    out.push_str(&pretty_expr(e)?);
                    out.push('\n');
                }
                ConsumerBody::Match(clauses) if clauses.is_empty() => out.push_str("match {}\n"),
                ConsumerBody::Match(clauses) => {
                    out.push_str("match {\n");
                    for clause in clauses {
                        let pat = match &clause.pattern {
                            Pattern::Wildcard => "_".to_string(),
                            Pattern::Ctor(name, vars) => format!("{}({})", name, vars.join(", ")),
                        };
                        let _ = writeln!(out, "  case {} => {}", pat, pretty_expr(&clause.body)?);
                    }
                    out.push_str("}\n");
                }
            }
        }
    }
    Ok(())
}

fn print_members(members: &[Dtr], out: &mut String) -> Result<(), PrintError> {
    if members.is_empty() {
        out.push_str("}\n");
        return Ok(());
    }
    out.push('\n');
    for d in members {
        let _ = write!(out, "  def {}({}): {}", d.name, params(&d.params), d.ret);
        if let Some(body) = &d.body {
            let _ = write!(out, " = {}", pretty_expr(body)?);
        }
        out.push('\n');
    }
    out.push_str("}\n");
    Ok(())
}

fn params(ps: &[Param]) -> String {
    ps.iter()
        .map(|p| format!("{}: {}", p.name, p.ty))
        .collect::<Vec<_>>()
        .join(", ")
}

fn write_args(args: &[Expr], out: &mut String) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(a, 0, out);
    }
    out.push(')');
}

fn write_value(v: &Value, out: &mut String) {
    let _ = write!(out, "{v}");
}

/// Writes `e`, parenthesised when its own precedence is below `min`.
fn write_expr(e: &Expr, min: u8, out: &mut String) {
    match e {
        Expr::Var(x) => out.push_str(x),
        Expr::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Expr::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Expr::Obj(v) => write_value(v, out),
        Expr::Sel { recv, name, args } => {
            write_expr(recv, ATOM, out);
            let _ = write!(out, ".{name}");
            write_args(args, out);
        }
        Expr::App { name, first, args } => {
            out.push_str(name);
            write_args(std::slice::from_ref(first), out);
            write_args(args, out);
        }
        Expr::Ctr { name, args } => {
            out.push_str(name);
            write_args(args, out);
        }
        Expr::New { name, args } => {
            let _ = write!(out, "new {name}");
            write_args(args, out);
        }
        Expr::Prim { op, lhs, rhs } => {
            let prec = op.precedence();
            let paren = prec < min;
            if paren {
                out.push('(');
            }
            write_expr(lhs, prec, out);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(rhs, prec + 1, out);
            if paren {
                out.push(')');
            }
        }
        Expr::If { cond, then, els } => {
            let paren = min > 0;
            if paren {
                out.push('(');
            }
            out.push_str("if (");
            write_expr(cond, 0, out);
            out.push_str(") ");
            write_expr(then, 0, out);
            out.push_str(" else ");
            write_expr(els, 0, out);
            if paren {
                out.push(')');
            }
        }
    }
}
