//! The FOOD calculus: a small language with both object-oriented
//! decomposition (interfaces and classes) and functional decomposition
//! (datatypes and pattern-matching consumers), a type-directed translation
//! between the two, and a small-step interpreter.
//!
//! The usual pipeline is [`parse`], [`desugar`], [`preprocess`], [`check`],
//! then either [`transform`] or [`eval`].

pub mod context;
pub mod corpus;
pub mod diagnostic;
pub mod fuzz;
pub mod interp;
pub mod parser;
pub mod syntax;
pub mod transform;
pub mod wellformed;

pub use context::{preprocess, restrict, translate_ctx, DefKey, GlobalCtx, SigKey, TypeEnv};
pub use diagnostic::Diagnostic;
pub use interp::{csm_body, dtr_body, eval, eval_expr, step, trace, trace_expr, Body, EvalOutcome, StepOutcome, Trace};
pub use parser::{parse, parse_expr};
pub use syntax::{
    canonicalize, desugar, pretty, pretty_expr, BinOp, Clause, Constructor, Consumer, ConsumerBody, Datatype, Def, Dtr,
    Expr, Generator, Interface, Param, Pattern, Pos, Program, Type, Value,
};
pub use transform::{transform, transform_expr, typecheck, typecheck_expr, TransformResult};
pub use wellformed::check;

/// Default step budget for evaluation.
pub const DEFAULT_FUEL: u64 = 100_000;

/// Parses, desugars, preprocesses and checks `source` in one go.
pub fn load(source: &str) -> Result<(Program, GlobalCtx), Vec<Diagnostic>> {
    let program = desugar(&parse(source)?);
    let ctx = preprocess(&program)?;
    check(&program, &ctx)?;
    Ok((program, ctx))
}
