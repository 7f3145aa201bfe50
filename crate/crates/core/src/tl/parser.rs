//! Parser for the text format produced by [`super::print`].
//!
//! Identifiers bound by an enclosing lambda or pattern are variables; every
//! other identifier (and any `@name`) is a method variable.

use crate::diag::{Code, Diagnostic, Span};

use super::ast::*;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Ctor(String),
    Int(i64),
    Let,
    In,
    Case,
    Of,
    True,
    False,
    Backslash,
    Arrow,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Assign,
    At,
    Op(BinOp),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Ctor(s) => format!("constructor `K_{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Let => "`let`".into(),
            Tok::In => "`in`".into(),
            Tok::Case => "`case`".into(),
            Tok::Of => "`of`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Assign => "`=`".into(),
            Tok::At => "`@`".into(),
            Tok::Op(op) => format!("`{}`", op.symbol()),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, Diagnostic> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1u32, 0usize);
    while i < bytes.len() {
        let c = bytes[i];
        let span = |end: usize| Span::new(i, end, line, (i - line_start) as u32 + 1);
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if text[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            let mut j = i;
            while j < bytes.len()
                && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'')
            {
                j += 1;
            }
            let word = &text[start..j];
            let tok = match word {
                "let" => Tok::Let,
                "in" => Tok::In,
                "case" => Tok::Case,
                "of" => Tok::Of,
                "true" => Tok::True,
                "false" => Tok::False,
                w if w.starts_with("K_") && w.len() > 2 => Tok::Ctor(w[2..].to_string()),
                w => Tok::Ident(w.to_string()),
            };
            toks.push((tok, span(j)));
            i = j;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let n = text[i..j].parse().map_err(|_| {
                Diagnostic::error(Code::Lex, span(j), "integer literal out of range")
            })?;
            toks.push((Tok::Int(n), span(j)));
            i = j;
            continue;
        }
        let two = text.get(i..i + 2).unwrap_or("");
        let (tok, len) = match two {
            "->" => (Tok::Arrow, 2),
            "==" => (Tok::Op(BinOp::Eq), 2),
            "&&" => (Tok::Op(BinOp::And), 2),
            "||" => (Tok::Op(BinOp::Or), 2),
            _ => match c {
                b'\\' => (Tok::Backslash, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b'{' => (Tok::LBrace, 1),
                b'}' => (Tok::RBrace, 1),
                b',' => (Tok::Comma, 1),
                b';' => (Tok::Semi, 1),
                b'=' => (Tok::Assign, 1),
                b'@' => (Tok::At, 1),
                b'<' => (Tok::Op(BinOp::Lt), 1),
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    return Err(Diagnostic::error(
                        Code::Lex,
                        span(i + ch.len_utf8()),
                        format!("unexpected character `{ch}`"),
                    ));
                }
            },
        };
        toks.push((tok, span(i + len)));
        i += len;
    }
    let end = Span::new(
        text.len(),
        text.len(),
        line,
        (text.len() - line_start) as u32 + 1,
    );
    toks.push((Tok::Eof, end));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    scope: Vec<String>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
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

    fn error(&self, what: &str) -> Diagnostic {
        Diagnostic::error(
            Code::Syntax,
            self.span(),
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(&t.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut bindings = Vec::new();
        while self.eat(&Tok::Let) {
            let name = self.ident()?;
            self.expect(&Tok::Assign)?;
            let body = self.expr()?;
            bindings.push(Binding { name, body });
        }
        if !bindings.is_empty() {
            self.expect(&Tok::In)?;
        }
        let main = self.expr()?;
        self.expect(&Tok::Eof)?;
        Ok(Program { bindings, main })
    }

    fn expr(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Backslash) {
            if let Tok::Ident(x) = self.peek().clone() {
                self.bump();
                self.expect(&Tok::Arrow)?;
                let body = self.scoped(vec![x.clone()], Parser::expr)?;
                return Ok(Expr::lam(&x, body));
            }
            let pat = self.pattern()?;
            self.expect(&Tok::Arrow)?;
            let body = self.scoped(pat.vars.clone(), Parser::expr)?;
            return Ok(Expr::lam_pat(pat, body));
        }
        self.binary(0)
    }

    fn scoped<T>(
        &mut self,
        vars: Vec<String>,
        f: impl FnOnce(&mut Parser) -> PResult<T>,
    ) -> PResult<T> {
        let n = self.scope.len();
        self.scope.extend(vars);
        let r = f(self);
        self.scope.truncate(n);
        r
    }

    fn binary(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = self.app()?;
        while let Tok::Op(op) = *self.peek() {
            let p = op.precedence();
            if p < min {
                break;
            }
            self.bump();
            let rhs = self.binary(p + 1)?;
            lhs = Expr::Prim(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::Ctor(_)
                | Tok::Int(_)
                | Tok::True
                | Tok::False
                | Tok::LParen
                | Tok::Case
                | Tok::At
        )
    }

    fn app(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            e = Expr::app(e, a);
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<Expr> {
        if !self.starts_atom() {
            return Err(self.error("an expression"));
        }
        let span = self.span();
        match self.bump() {
            Tok::Ident(x) => Ok(if self.scope.contains(&x) {
                Expr::Var(x)
            } else {
                Expr::Method(x)
            }),
            Tok::At => Ok(Expr::Method(self.ident()?)),
            Tok::Int(n) => Ok(Expr::Int(n)),
            Tok::True => Ok(Expr::Bool(true)),
            Tok::False => Ok(Expr::Bool(false)),
            Tok::Ctor(t) => {
                self.expect(&Tok::LParen)?;
                let (args, _) = self.expr_list()?;
                Ok(Expr::Con(Ctor::Named(t), args))
            }
            Tok::LParen => {
                let (mut args, trailing) = self.expr_list()?;
                if args.len() == 1 && !trailing {
                    return Ok(args.pop().unwrap());
                }
                let k = Ctor::tuple(args.len())
                    .map_err(|e| Diagnostic::error(Code::Syntax, span, e.to_string()))?;
                Ok(Expr::Con(k, args))
            }
            Tok::Case => {
                let scrut = self.expr()?;
                self.expect(&Tok::Of)?;
                self.expect(&Tok::LBrace)?;
                let mut clauses = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    let pat = self.pattern()?;
                    self.expect(&Tok::Arrow)?;
                    let body = self.scoped(pat.vars.clone(), Parser::expr)?;
                    clauses.push(Clause { pat, body });
                    if !self.eat(&Tok::Semi) {
                        self.expect(&Tok::RBrace)?;
                        break;
                    }
                }
                Ok(Expr::case(scrut, clauses))
            }
            _ => unreachable!("checked by starts_atom"),
        }
    }

    /// Comma-separated expressions after an opening parenthesis, through the
    /// closing one. Also reports whether a trailing comma was present.
    fn expr_list(&mut self) -> PResult<(Vec<Expr>, bool)> {
        let mut args = Vec::new();
        let mut trailing = false;
        while !self.eat(&Tok::RParen) {
            args.push(self.expr()?);
            trailing = self.eat(&Tok::Comma);
            if !trailing {
                self.expect(&Tok::RParen)?;
                break;
            }
        }
        Ok((args, trailing))
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        let span = self.span();
        let ctor = match self.peek().clone() {
            Tok::Ctor(t) => {
                self.bump();
                Some(Ctor::Named(t))
            }
            _ => None,
        };
        self.expect(&Tok::LParen)?;
        let mut vars = Vec::new();
        while !self.eat(&Tok::RParen) {
            vars.push(self.ident()?);
            if !self.eat(&Tok::Comma) {
                self.expect(&Tok::RParen)?;
                break;
            }
        }
        let ctor = match ctor {
            Some(k) => k,
            None => Ctor::tuple(vars.len())
                .map_err(|e| Diagnostic::error(Code::Syntax, span, e.to_string()))?,
        };
        Ok(Pattern { ctor, vars })
    }
}

pub fn parse_program(text: &str) -> Result<Program, Diagnostic> {
    let toks = lex(text)?;
    Parser {
        toks,
        pos: 0,
        scope: Vec::new(),
    }
    .program()
}

/// Parses a closed expression; free identifiers become method variables.
pub fn parse_expr(text: &str) -> Result<Expr, Diagnostic> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        scope: Vec::new(),
    };
    let e = p.expr()?;
    p.expect(&Tok::Eof)?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tl::print::{print_expr, print_program};

    #[test]
    fn scope_resolution() {
        let e = parse_expr("\\x -> f x").unwrap();
        assert_eq!(
            e,
            Expr::lam("x", Expr::app(Expr::method("f"), Expr::var("x")))
        );
        let e = parse_expr("\\f -> @f f").unwrap();
        assert_eq!(
            e,
            Expr::lam("f", Expr::app(Expr::method("f"), Expr::var("f")))
        );
    }

    #[test]
    fn tuples() {
        assert_eq!(parse_expr("()").unwrap(), Expr::tuple(vec![]).unwrap());
        assert_eq!(parse_expr("(1)").unwrap(), Expr::Int(1));
        assert_eq!(
            parse_expr("(1,)").unwrap(),
            Expr::tuple(vec![Expr::Int(1)]).unwrap()
        );
        let e = parse_expr("\\(a, b) -> b").unwrap();
        let pat = Pattern::new(Ctor::Tuple(2), vec!["a".into(), "b".into()]);
        assert_eq!(e, Expr::lam_pat(pat, Expr::var("b")));
        let many: Vec<String> = (0..33).map(|i| i.to_string()).collect();
        assert!(parse_expr(&format!("({})", many.join(", "))).is_err());
    }

    #[test]
    fn case_and_program() {
        let src = "let id = \\x -> x\nlet snd = \\p -> case p of { (a, b) -> b; K_T() -> p }\nin snd (id K_T(), 2)\n";
        let p = parse_program(src).unwrap();
        assert_eq!(p.bindings.len(), 2);
        assert_eq!(print_program(&p), src);
        assert!(parse_program("let f = \\x -> x\nf").is_err());
    }

    #[test]
    fn precedence() {
        for src in [
            "a || b && c",
            "(a || b) && c",
            "f x (y == z)",
            "(\\x -> x) 1",
            "case f 1 of {}",
        ] {
            let e = parse_expr(src).unwrap();
            assert_eq!(print_expr(&e), src);
        }
    }

    #[test]
    fn errors_have_spans() {
        let d = parse_expr("\\x -> \n  x $").unwrap_err();
        assert_eq!(d.code, Code::Lex);
        assert_eq!((d.span.line, d.span.col), (2, 5));
        let d = parse_program("let = 1").unwrap_err();
        assert_eq!(d.code, Code::Syntax);
    }
}
