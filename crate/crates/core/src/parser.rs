//! Recursive-descent parser for `.food` source text.
//!
//! Newlines are ordinary whitespace; `;` may separate definitions. Parsing
//! stops at the first error inside a definition and resumes at the next
//! top-level definition keyword, so one diagnostic is reported per broken
//! definition.

use std::fmt;

use crate::diagnostic::Diagnostic;
use crate::syntax::{
    BinOp, Clause, Constructor, Consumer, ConsumerBody, Datatype, Def, Dtr, Expr, Generator, Interface, Param, Pattern,
    Pos, Program, Type, SELF, THIS,
};

const KEYWORDS: &[&str] = &[
    "data",
    "interface",
    "case",
    "extends",
    "class",
    "implements",
    "def",
    "match",
    "new",
    "if",
    "else",
    "true",
    "false",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Keyword(&'static str),
    Int(u64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Dot,
    Assign,
    FatArrow,
    Underscore,
    Op(BinOp),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(x) => write!(f, "identifier `{x}`"),
            Tok::Keyword(k) => write!(f, "`{k}`"),
            Tok::Int(i) => write!(f, "integer `{i}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Assign => f.write_str("`=`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Underscore => f.write_str("`_`"),
            Tok::Op(op) => write!(f, "`{}`", op.symbol()),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Pos,
    depth: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut depth = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos::new(line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word == "_" {
                Tok::Underscore
            } else if let Some(k) = KEYWORDS.iter().find(|k| **k == word) {
                Tok::Keyword(k)
            } else {
                Tok::Ident(word)
            }
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            match digits.parse::<u64>() {
                Ok(n) => Tok::Int(n),
                Err(_) => return Err(Diagnostic::at(pos, format!("integer literal `{digits}` is too large"))),
            }
        } else {
            let next = chars.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                ('=', Some('>')) => (Tok::FatArrow, 2),
                ('=', Some('=')) => (Tok::Op(BinOp::Eq), 2),
                ('<', Some('=')) => (Tok::Op(BinOp::Le), 2),
                ('&', Some('&')) => (Tok::Op(BinOp::And), 2),
                ('|', Some('|')) => (Tok::Op(BinOp::Or), 2),
                ('=', _) => (Tok::Assign, 1),
                ('<', _) => (Tok::Op(BinOp::Lt), 1),
                ('+', _) => (Tok::Op(BinOp::Add), 1),
                ('-', _) => (Tok::Op(BinOp::Sub), 1),
                ('*', _) => (Tok::Op(BinOp::Mul), 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                (':', _) => (Tok::Colon, 1),
                (';', _) => (Tok::Semi, 1),
                ('.', _) => (Tok::Dot, 1),
                _ => return Err(Diagnostic::at(pos, format!("unexpected character `{c}`"))),
            };
            i += len;
            tok
        };
        col += i - start;
        if tok == Tok::RBrace {
            depth = depth.saturating_sub(1);
        }
        toks.push(Token {
            tok: tok.clone(),
            pos,
            depth,
        });
        if tok == Tok::LBrace {
            depth += 1;
        }
    }
    toks.push(Token {
        tok: Tok::Eof,
        pos: Pos::new(line, col),
        depth: 0,
    });
    Ok(toks)
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

fn is_def_start(t: &Token) -> bool {
    t.depth == 0
        && matches!(
            t.tok,
            Tok::Keyword("data")
                | Tok::Keyword("interface")
                | Tok::Keyword("case")
                | Tok::Keyword("class")
                | Tok::Keyword("def")
        )
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let idx = (self.at + n).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, what: &str) -> PResult<T> {
        Err(Diagnostic::at(
            self.pos(),
            format!("expected {what}, found {}", self.peek()),
        ))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.error(&tok.to_string())
        }
    }

    fn keyword(&mut self, k: &'static str) -> PResult<()> {
        self.expect(Tok::Keyword(k))
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            _ => self.error(what),
        }
    }

    /// A user-declared binder: anything but the reserved `self` and `this`.
    fn binder(&mut self, what: &str) -> PResult<String> {
        let pos = self.pos();
        let x = self.ident(what)?;
        if x == SELF || x == THIS {
            return Err(Diagnostic::at(pos, format!("`{x}` is reserved and cannot be declared")));
        }
        Ok(x)
    }

    fn type_name(&mut self) -> PResult<String> {
        let pos = self.pos();
        let x = self.binder("a type name")?;
        if x == "Int" || x == "Bool" {
            return Err(Diagnostic::at(pos, format!("`{x}` is a built-in type")));
        }
        Ok(x)
    }

    fn ty(&mut self) -> PResult<Type> {
        let x = self.ident("a type")?;
        Ok(match x.as_str() {
            "Int" => Type::Int,
            "Bool" => Type::Bool,
            _ => Type::Named(x),
        })
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            let name = self.binder("a parameter name")?;
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            out.push(Param { name, ty });
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn program(&mut self) -> Result<Program, Vec<Diagnostic>> {
        let mut defs = Vec::new();
        let mut diags = Vec::new();
        loop {
            while self.eat(&Tok::Semi) {}
            if !is_def_start(&self.toks[self.at]) {
                break;
            }
            let start = self.at;
            match self.def() {
                Ok(d) => defs.push(d),
                Err(d) => {
                    diags.push(d);
                    if self.at == start {
                        self.bump();
                    }
                    while !is_def_start(&self.toks[self.at]) && *self.peek() != Tok::Eof {
                        self.bump();
                    }
                }
            }
        }
        let main = if *self.peek() == Tok::Eof {
            if diags.is_empty() {
                diags.push(Diagnostic::at(
                    self.pos(),
                    "expected the main expression, found end of input",
                ));
            }
            None
        } else {
            match self.expr() {
                Ok(e) => {
                    while self.eat(&Tok::Semi) {}
                    if *self.peek() != Tok::Eof {
                        diags.push(Diagnostic::at(
                            self.pos(),
                            format!("expected end of input after the main expression, found {}", self.peek()),
                        ));
                    }
                    Some(e)
                }
                Err(d) => {
                    diags.push(d);
                    None
                }
            }
        };
        match main {
            Some(main) if diags.is_empty() => Ok(Program { defs, main }),
            _ => Err(diags),
        }
    }

    fn def(&mut self) -> PResult<Def> {
        let pos = self.pos();
        match self.bump() {
            Tok::Keyword("data") => {
                let name = self.type_name()?;
                Ok(Def::Datatype(Datatype { name, pos }))
            }
            Tok::Keyword("interface") => {
                let name = self.type_name()?;
                self.expect(Tok::LBrace)?;
                let mut dtrs = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    if self.eat(&Tok::Semi) {
                        continue;
                    }
                    dtrs.push(self.member(false)?);
                }
                Ok(Def::Interface(Interface { name, dtrs, pos }))
            }
            Tok::Keyword("case") => {
                let name = self.type_name()?;
                let fields = self.params()?;
                self.keyword("extends")?;
                let parent = self.ident("a datatype name")?;
                Ok(Def::Constructor(Constructor {
                    name,
                    fields,
                    parent,
                    pos,
                }))
            }
            Tok::Keyword("class") => {
                let name = self.type_name()?;
                let fields = self.params()?;
                self.keyword("implements")?;
                let parent = self.ident("an interface name")?;
                self.expect(Tok::LBrace)?;
                let mut funs = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    if self.eat(&Tok::Semi) {
                        continue;
                    }
                    funs.push(self.member(true)?);
                }
                Ok(Def::Generator(Generator {
                    name,
                    fields,
                    parent,
                    funs,
                    pos,
                }))
            }
            Tok::Keyword("def") => self.consumer(pos),
            _ => unreachable!("caller checked for a definition keyword"),
        }
    }

    /// `def f(x: T, ...): T [= e]` inside an interface or class body.
    fn member(&mut self, needs_body: bool) -> PResult<Dtr> {
        self.keyword("def")?;
        let name = self.binder("a method name")?;
        let params = self.params()?;
        self.expect(Tok::Colon)?;
        let ret = self.ty()?;
        let body = if self.eat(&Tok::Assign) {
            Some(self.expr()?)
        } else if needs_body {
            return self.error("`=` and a method body");
        } else {
            None
        };
        Ok(Dtr {
            name,
            params,
            ret,
            body,
        })
    }

    fn consumer(&mut self, pos: Pos) -> PResult<Def> {
        let name = self.binder("a consumer name")?;
        self.expect(Tok::LParen)?;
        match self.peek() {
            Tok::Ident(x) if x == SELF => {
                self.bump();
            }
            _ => return self.error("`self` as the consumer's first parameter"),
        }
        self.expect(Tok::Colon)?;
        let self_type = self.ident("a datatype name")?;
        self.expect(Tok::RParen)?;
        let params = self.params()?;
        self.expect(Tok::Colon)?;
        let ret = self.ty()?;
        self.expect(Tok::Assign)?;
        let body = if self.eat(&Tok::Keyword("match")) {
            ConsumerBody::Match(self.clauses()?)
        } else {
            ConsumerBody::Bare(self.expr()?)
        };
        Ok(Def::Consumer(Consumer {
            name,
            self_type,
            params,
            ret,
            body,
            pos,
        }))
    }

    fn clauses(&mut self) -> PResult<Vec<Clause>> {
        self.expect(Tok::LBrace)?;
        let mut clauses: Vec<Clause> = Vec::new();
        let mut wildcard_at: Option<Pos> = None;
        while !self.eat(&Tok::RBrace) {
            if self.eat(&Tok::Semi) {
                continue;
            }
            let pos = self.pos();
            self.keyword("case")?;
            if let Some(w) = wildcard_at {
                return Err(Diagnostic::at(w, "wildcard must be last"));
            }
            let pattern = if self.eat(&Tok::Underscore) {
                wildcard_at = Some(pos);
                Pattern::Wildcard
            } else {
                let ctor = self.ident("a constructor pattern or `_`")?;
                let mut vars = Vec::new();
                if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
                    loop {
                        vars.push(self.binder("a pattern variable")?);
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                Pattern::Ctor(ctor, vars)
            };
            self.expect(Tok::FatArrow)?;
            let body = self.expr()?;
            clauses.push(Clause { pattern, body });
        }
        Ok(clauses)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = self.postfix()?;
        loop {
            let op = match self.peek() {
                Tok::Op(op) if op.precedence() >= min => *op,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::prim(op, lhs, rhs);
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        while self.eat(&Tok::Dot) {
            let name = self.ident("a destructor name")?;
            let args = self.args()?;
            e = Expr::sel(e, name, args);
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                i64::try_from(n)
                    .map(Expr::Int)
                    .map_err(|_| Diagnostic::at(pos, format!("integer literal `{n}` is too large")))
            }
            Tok::Op(BinOp::Sub) if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                let Tok::Int(n) = self.bump() else { unreachable!() };
                i64::try_from(-(n as i128))
                    .map(Expr::Int)
                    .map_err(|_| Diagnostic::at(pos, format!("integer literal `-{n}` is too small")))
            }
            Tok::Keyword("true") => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::Keyword("false") => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Keyword("new") => {
                self.bump();
                let name = self.ident("a class name")?;
                let args = self.args()?;
                Ok(Expr::new_obj(name, args))
            }
            Tok::Keyword("if") => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let then = self.expr()?;
                self.keyword("else")?;
                let els = self.expr()?;
                Ok(Expr::if_(cond, then, els))
            }
            Tok::Ident(x) => {
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(Expr::Var(x));
                }
                let first = self.args()?;
                if *self.peek() != Tok::LParen {
                    return Ok(Expr::ctr(x, first));
                }
                let rest = self.args()?;
                let [first]: [Expr; 1] = first.try_into().map_err(|_| {
                    Diagnostic::at(
                        pos,
                        format!("consumer application `{x}(..)(..)` takes exactly one first argument"),
                    )
                })?;
                Ok(Expr::app(x, first, rest))
            }
            _ => self.error("an expression"),
        }
    }
}

/// Parses a whole program. Consumer bodies are left as written; see
/// [`crate::syntax::desugar`].
pub fn parse(source: &str) -> Result<Program, Vec<Diagnostic>> {
    let toks = lex(source).map_err(|d| vec![d])?;
    Parser { toks, at: 0 }.program()
}

/// Parses a single expression.
pub fn parse_expr(source: &str) -> Result<Expr, Diagnostic> {
    let toks = lex(source)?;
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.error("end of input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn oo_sets_has_four_definitions() {
        let p = parse(corpus::SETS_OOP).unwrap();
        assert_eq!(p.defs.len(), 4);
        assert!(matches!(&p.defs[0], Def::Interface(i) if i.name == "Set" && i.dtrs.len() == 4));
        assert!(matches!(&p.main, Expr::Sel { name, .. } if name == "contains"));
    }

    #[test]
    fn variable_program() {
        assert_eq!(parse("x").unwrap(), Program::new(vec![], Expr::var("x")));
    }

    #[test]
    fn wildcard_must_be_last() {
        let err = parse("data D\ndef f(self:D)(): Bool = match { case _ => true case C() => false }\nx").unwrap_err();
        assert_eq!(err.len(), 1);
        assert!(err[0].message.contains("wildcard must be last"), "{:?}", err);
        assert_eq!((err[0].line, err[0].column), (2, 33));
    }

    #[test]
    fn reserved_binders_rejected() {
        for src in [
            "case C(this: Int) extends D\nx",
            "interface D { def f(self: Int): Int }\nx",
            "data D\ndef f(self: D)(this: Int): Int = 1\nx",
            "data D\ncase C(a: Int) extends D\ndef f(self: D)(): Int = match { case C(self) => 1 }\nx",
        ] {
            let err = parse(src).unwrap_err();
            assert!(err[0].message.contains("reserved"), "{src}: {err:?}");
        }
        let err = parse("data D\ndef f(x: D)(): Int = 1\nx").unwrap_err();
        assert!(err[0].message.contains("`self`"));
    }

    #[test]
    fn one_diagnostic_per_broken_definition() {
        let err =
            parse("data\ncase C(x Int) extends D\ndata E\nclass K() implements E { def f(): Int }\n1").unwrap_err();
        assert_eq!(err.len(), 3, "{err:?}");
        assert_eq!(err[0].line, 2);
        assert_eq!(err[1].line, 2);
        assert_eq!(err[2].line, 4);
    }

    #[test]
    fn empty_input_is_an_error() {
        let err = parse("// nothing\n").unwrap_err();
        assert!(!err.is_empty());
    }

    #[test]
    fn application_forms() {
        assert_eq!(
            parse_expr("f(x)(1, 2)").unwrap(),
            Expr::app("f", Expr::var("x"), vec![Expr::Int(1), Expr::Int(2)])
        );
        assert_eq!(
            parse_expr("C(1, 2)").unwrap(),
            Expr::ctr("C", vec![Expr::Int(1), Expr::Int(2)])
        );
        assert_eq!(parse_expr("f(x)()").unwrap(), Expr::app("f", Expr::var("x"), vec![]));
        assert!(parse_expr("f(x, y)(1)").is_err());
        assert_eq!(
            parse_expr("new C().f(1).g()").unwrap(),
            Expr::sel(
                Expr::sel(Expr::new_obj("C", vec![]), "f", vec![Expr::Int(1)]),
                "g",
                vec![]
            )
        );
    }

    #[test]
    fn operator_precedence() {
        let e = parse_expr("1 + 2 * 3 == 7 && true || false").unwrap();
        let expected = Expr::prim(
            BinOp::Or,
            Expr::prim(
                BinOp::And,
                Expr::prim(
                    BinOp::Eq,
                    Expr::prim(
                        BinOp::Add,
                        Expr::Int(1),
                        Expr::prim(BinOp::Mul, Expr::Int(2), Expr::Int(3)),
                    ),
                    Expr::Int(7),
                ),
                Expr::Bool(true),
            ),
            Expr::Bool(false),
        );
        assert_eq!(e, expected);
        assert_eq!(
            parse_expr("x - -3").unwrap(),
            Expr::prim(BinOp::Sub, Expr::var("x"), Expr::Int(-3))
        );
        assert_eq!(parse_expr("-9223372036854775808").unwrap(), Expr::Int(i64::MIN));
        assert!(parse_expr("9223372036854775808").is_err());
    }

    #[test]
    fn pattern_without_parens() {
        let p = parse("data D\ncase E() extends D\ndef f(self: D)(): Int = match { case E => 1 }\n0").unwrap();
        let Def::Consumer(c) = &p.defs[2] else { panic!() };
        assert_eq!(c.clauses()[0].pattern, Pattern::Ctor("E".into(), vec![]));
    }

    #[test]
    fn semicolons_and_comments() {
        let p = parse("data D; case E() extends D // trailing\n;E()").unwrap();
        assert_eq!(p.defs.len(), 2);
        assert_eq!(p.main, Expr::ctr("E", vec![]));
    }
}
