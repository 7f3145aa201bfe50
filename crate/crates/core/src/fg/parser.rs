//! Lexer and recursive-descent parser for `.fg` source files.

use crate::diag::{Code, Diagnostic, Span};

use super::ast::*;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Package,
    Type,
    Struct,
    Interface,
    Func,
    Return,
    Var,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    Semi,
    Assign,
    EqEq,
    Lt,
    AndAnd,
    OrOr,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Package => "package",
            Tok::Type => "type",
            Tok::Struct => "struct",
            Tok::Interface => "interface",
            Tok::Func => "func",
            Tok::Return => "return",
            Tok::Var => "var",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Semi => ";",
            Tok::Assign => "=",
            Tok::EqEq => "==",
            Tok::Lt => "<",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek_char() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.src[self.pos..].starts_with("//") => {
                    while let Some(c) = self.peek_char() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Span)>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let (start, line, col) = (self.pos, self.line, self.col);
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, Span::new(start, start, line, col)));
                return Ok(out);
            };
            let tok = match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                ';' => Tok::Semi,
                '<' => Tok::Lt,
                '=' => {
                    if self.peek_char() == Some('=') {
                        self.bump();
                        Tok::EqEq
                    } else {
                        Tok::Assign
                    }
                }
                '&' if self.peek_char() == Some('&') => {
                    self.bump();
                    Tok::AndAnd
                }
                '|' if self.peek_char() == Some('|') => {
                    self.bump();
                    Tok::OrOr
                }
                c if c.is_ascii_digit() => {
                    while self.peek_char().is_some_and(|c| c.is_ascii_digit()) {
                        self.bump();
                    }
                    let text = &self.src[start..self.pos];
                    match text.parse() {
                        Ok(n) => Tok::Int(n),
                        Err(_) => {
                            return Err(Diagnostic::error(
                                Code::Lex,
                                Span::new(start, self.pos, line, col),
                                format!("integer literal `{text}` out of range"),
                            ))
                        }
                    }
                }
                c if c.is_alphabetic() || c == '_' => {
                    while self
                        .peek_char()
                        .is_some_and(|c| c.is_alphanumeric() || c == '_')
                    {
                        self.bump();
                    }
                    match &self.src[start..self.pos] {
                        "package" => Tok::Package,
                        "type" => Tok::Type,
                        "struct" => Tok::Struct,
                        "interface" => Tok::Interface,
                        "func" => Tok::Func,
                        "return" => Tok::Return,
                        "var" => Tok::Var,
                        s => Tok::Ident(s.to_string()),
                    }
                }
                other => {
                    return Err(Diagnostic::error(
                        Code::Lex,
                        Span::new(start, self.pos, line, col),
                        format!("unexpected character `{other}`"),
                    ))
                }
            };
            out.push((tok, Span::new(start, self.pos, line, col)));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    mode: Mode,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, what: &str) -> PResult<T> {
        Err(Diagnostic::error(
            Code::Syntax,
            self.span(),
            format!("expected {what}, found {}", self.peek().describe()),
        ))
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            self.error(&format!("`{}`", t.text()))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let sp = self.bump().1;
                Ok(Ident::spanned(name, sp))
            }
            _ => self.error("identifier"),
        }
    }

    fn ext_only(&self, span: Span, what: &str) -> PResult<()> {
        if self.mode.is_ext() {
            Ok(())
        } else {
            Err(Diagnostic::error(
                Code::ExtensionSyntax,
                span,
                format!("{what} requires the primitive extension (--ext)"),
            ))
        }
    }

    fn program(&mut self) -> PResult<Program> {
        if self.eat(&Tok::Package) {
            self.ident()?;
            self.eat(&Tok::Semi);
        }
        let mut decls = Vec::new();
        let mut main = None;
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Type => decls.push(Decl::Type(self.type_decl()?)),
                Tok::Func => {
                    if *self.peek_at(1) == Tok::LParen {
                        decls.push(Decl::Method(self.method_decl()?));
                    } else if matches!(self.peek_at(1), Tok::Ident(s) if s == "main") {
                        let sp = self.span();
                        if main.is_some() {
                            return Err(Diagnostic::error(
                                Code::Syntax,
                                sp,
                                "duplicate `func main`",
                            ));
                        }
                        main = Some(self.main_decl()?);
                    } else {
                        self.bump();
                        return self.error("`(` or `main`");
                    }
                }
                Tok::Semi => {
                    self.bump();
                }
                _ => return self.error("declaration"),
            }
        }
        match main {
            Some(main) => Ok(Program::new(self.mode, decls, main)),
            None => Err(Diagnostic::error(
                Code::Syntax,
                self.span(),
                "missing `func main() { _ = e }`",
            )),
        }
    }

    fn type_decl(&mut self) -> PResult<TypeDecl> {
        let start = self.expect(Tok::Type)?;
        let name = self.ident()?;
        let lit = match self.peek() {
            Tok::Struct => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let mut fields = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    let f = self.ident()?;
                    let t = self.ident()?;
                    fields.push(Binder { name: f, ty: t });
                    while self.eat(&Tok::Semi) || self.eat(&Tok::Comma) {}
                }
                TypeLit::Struct(fields)
            }
            Tok::Interface => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let mut specs = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    let m = self.ident()?;
                    let sig = self.signature()?;
                    specs.push(MethodSpec { name: m, sig });
                    while self.eat(&Tok::Semi) {}
                }
                TypeLit::Interface(specs)
            }
            _ => return self.error("`struct` or `interface`"),
        };
        Ok(TypeDecl {
            name,
            lit,
            span: start.to(self.prev_span()),
        })
    }

    fn signature(&mut self) -> PResult<Signature> {
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        while !self.eat(&Tok::RParen) {
            let x = self.ident()?;
            let t = self.ident()?;
            params.push(Binder { name: x, ty: t });
            if !self.eat(&Tok::Comma) {
                self.expect(Tok::RParen)?;
                break;
            }
        }
        let ret = self.ident()?;
        Ok(Signature { params, ret })
    }

    fn method_decl(&mut self) -> PResult<MethodDecl> {
        let start = self.expect(Tok::Func)?;
        self.expect(Tok::LParen)?;
        let rx = self.ident()?;
        let rt = self.ident()?;
        self.expect(Tok::RParen)?;
        let name = self.ident()?;
        let sig = self.signature()?;
        self.expect(Tok::LBrace)?;
        self.expect(Tok::Return)?;
        let body = self.expr()?;
        while self.eat(&Tok::Semi) {}
        self.expect(Tok::RBrace)?;
        Ok(MethodDecl {
            recv: Binder { name: rx, ty: rt },
            spec: MethodSpec { name, sig },
            body,
            span: start.to(self.prev_span()),
        })
    }

    fn main_decl(&mut self) -> PResult<Expr> {
        self.expect(Tok::Func)?;
        self.ident()?;
        self.expect(Tok::LParen)?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let mut bindings: Vec<(String, Expr)> = Vec::new();
        let result = loop {
            match self.peek().clone() {
                Tok::Var => {
                    let sp = self.span();
                    self.bump();
                    let x = self.ident()?;
                    self.ident()?;
                    self.expect(Tok::Assign)?;
                    let e = self.expr()?;
                    while self.eat(&Tok::Semi) {}
                    if x.name == "_" {
                        break e;
                    }
                    self.ext_only(sp, "`var` bindings in main")?;
                    bindings.push((x.name, e));
                }
                Tok::Ident(s) if s == "_" => {
                    self.bump();
                    self.expect(Tok::Assign)?;
                    let e = self.expr()?;
                    while self.eat(&Tok::Semi) {}
                    break e;
                }
                _ => return self.error("`_ = e`"),
            }
        };
        self.expect(Tok::RBrace)?;
        // `var x t = e; ...; _ = r` becomes r with each x replaced by its
        // (already substituted) defining expression.
        let mut resolved: Vec<(String, Expr)> = Vec::new();
        for (x, e) in bindings {
            let map: Vec<(&str, &Expr)> = resolved.iter().map(|(y, d)| (y.as_str(), d)).collect();
            let e = e.subst(&map);
            resolved.retain(|(y, _)| *y != x);
            resolved.push((x, e));
        }
        let map: Vec<(&str, &Expr)> = resolved.iter().map(|(y, d)| (y.as_str(), d)).collect();
        Ok(result.subst(&map))
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        match self.peek() {
            Tok::OrOr => Some(BinOp::Or),
            Tok::AndAnd => Some(BinOp::And),
            Tok::EqEq => Some(BinOp::Eq),
            Tok::Lt => Some(BinOp::Lt),
            _ => None,
        }
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.postfix()?;
        while let Some(op) = self.binop() {
            if op.precedence() < min_prec {
                break;
            }
            let sp = self.span();
            self.ext_only(sp, &format!("operator `{}`", op.symbol()))?;
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr {
                kind: ExprKind::Bin {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            };
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.eat(&Tok::Dot) {
            if self.eat(&Tok::LParen) {
                let ty = self.ident()?;
                self.expect(Tok::RParen)?;
                let span = e.span.to(self.prev_span());
                e = Expr {
                    kind: ExprKind::Assert {
                        recv: Box::new(e),
                        ty,
                    },
                    span,
                };
                continue;
            }
            let name = self.ident()?;
            if self.eat(&Tok::LParen) {
                let args = self.args(Tok::RParen)?;
                let span = e.span.to(self.prev_span());
                e = Expr {
                    kind: ExprKind::Call {
                        recv: Box::new(e),
                        method: name,
                        args,
                    },
                    span,
                };
            } else {
                let span = e.span.to(name.span);
                e = Expr {
                    kind: ExprKind::Select {
                        recv: Box::new(e),
                        field: name,
                    },
                    span,
                };
            }
        }
        Ok(e)
    }

    fn args(&mut self, close: Tok) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        while !self.eat(&close) {
            args.push(self.expr()?);
            if !self.eat(&Tok::Comma) {
                self.expect(close)?;
                break;
            }
        }
        Ok(args)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let sp = self.span();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                if self.mode.is_ext() && (name == "true" || name == "false") {
                    return Ok(Expr {
                        kind: ExprKind::Bool(name == "true"),
                        span: sp,
                    });
                }
                if self.eat(&Tok::LBrace) {
                    let args = self.args(Tok::RBrace)?;
                    return Ok(Expr {
                        kind: ExprKind::StructLit {
                            ty: Ident::spanned(name, sp),
                            args,
                        },
                        span: sp.to(self.prev_span()),
                    });
                }
                Ok(Expr {
                    kind: ExprKind::Var(name),
                    span: sp,
                })
            }
            Tok::Int(n) => {
                self.ext_only(sp, "integer literals")?;
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Int(n),
                    span: sp,
                })
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => self.error("expression"),
        }
    }
}

/// Parses a whole program. Rejections always carry at least one diagnostic.
pub fn parse_program(text: &str, mode: Mode) -> Result<Program, Vec<Diagnostic>> {
    let lexer = Lexer {
        src: text,
        pos: 0,
        line: 1,
        col: 1,
    };
    let toks = lexer.tokens().map_err(|d| vec![d])?;
    let mut p = Parser { toks, pos: 0, mode };
    p.program().map_err(|d| vec![d])
}

/// Parses a single expression (used by tests and the generator's tooling).
pub fn parse_expr(text: &str, mode: Mode) -> Result<Expr, Vec<Diagnostic>> {
    let lexer = Lexer {
        src: text,
        pos: 0,
        line: 1,
        col: 1,
    };
    let toks = lexer.tokens().map_err(|d| vec![d])?;
    let mut p = Parser { toks, pos: 0, mode };
    let e = p.expr().map_err(|d| vec![d])?;
    if *p.peek() != Tok::Eof {
        return Err(vec![p.error::<()>("end of input").unwrap_err()]);
    }
    Ok(e)
}
