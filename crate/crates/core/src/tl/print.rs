//! Canonical text format for TL programs.
//!
//! ```text
//! let eq_Int = \this -> \(that) -> ...
//! in eq_Int K_Int(1) (K_Int(2))
//! ```
//!
//! Constructor applications and tuples are written with parenthesized
//! argument lists, `case` is brace-delimited, and a method variable that is
//! shadowed by a bound variable is written `@name`.

use std::fmt::Write;

use super::ast::*;

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for b in &p.bindings {
        let _ = writeln!(out, "let {} = {}", b.name, print_expr(&b.body));
    }
    if !p.bindings.is_empty() {
        out.push_str("in ");
    }
    out.push_str(&print_expr(&p.main));
    out.push('\n');
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut pr = Printer {
        out: String::new(),
        bound: Vec::new(),
    };
    pr.expr(e, Ctx::Top);
    pr.out
}

pub fn print_pattern(p: &Pattern) -> String {
    let mut out = String::new();
    pattern(&mut out, p);
    out
}

fn pattern(out: &mut String, p: &Pattern) {
    if let Ctor::Named(t) = &p.ctor {
        let _ = write!(out, "K_{t}");
    }
    let _ = write!(out, "({})", p.vars.join(", "));
}

#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    Top,
    /// Operand of an infix operator that needs at least this precedence.
    Operand(u8),
    AppFun,
    AppArg,
}

struct Printer {
    out: String,
    bound: Vec<String>,
}

impl Printer {
    fn expr(&mut self, e: &Expr, ctx: Ctx) {
        match e {
            Expr::Var(x) => self.out.push_str(x),
            Expr::Method(y) => {
                if self.bound.contains(y) {
                    self.out.push('@');
                }
                self.out.push_str(y);
            }
            Expr::Int(n) => {
                let _ = write!(self.out, "{n}");
            }
            Expr::Bool(b) => {
                let _ = write!(self.out, "{b}");
            }
            Expr::Con(k, args) => {
                if let Ctor::Named(t) = k {
                    let _ = write!(self.out, "K_{t}");
                }
                self.out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    self.expr(a, Ctx::Top);
                }
                if *k == Ctor::Tuple(1) {
                    self.out.push(',');
                }
                self.out.push(')');
            }
            Expr::App(f, a) => {
                let paren = ctx == Ctx::AppArg;
                self.open(paren);
                self.expr(f, Ctx::AppFun);
                self.out.push(' ');
                self.expr(a, Ctx::AppArg);
                self.close(paren);
            }
            Expr::Prim(op, l, r) => {
                let p = op.precedence();
                let paren = match ctx {
                    Ctx::Top => false,
                    Ctx::Operand(min) => p < min,
                    Ctx::AppFun | Ctx::AppArg => true,
                };
                self.open(paren);
                self.expr(l, Ctx::Operand(p));
                let _ = write!(self.out, " {} ", op.symbol());
                self.expr(r, Ctx::Operand(p + 1));
                self.close(paren);
            }
            Expr::Lam(x, body) => {
                let paren = ctx != Ctx::Top;
                self.open(paren);
                self.out.push('\\');
                match e.as_lam_pat() {
                    Some((pat, inner)) => {
                        pattern(&mut self.out, pat);
                        self.out.push_str(" -> ");
                        self.scoped(&pat.vars, |pr| pr.expr(inner, Ctx::Top));
                    }
                    None => {
                        let _ = write!(self.out, "{x} -> ");
                        self.scoped(std::slice::from_ref(x), |pr| pr.expr(body, Ctx::Top));
                    }
                }
                self.close(paren);
            }
            Expr::Case(s, clauses) => {
                self.out.push_str("case ");
                self.expr(s, Ctx::Top);
                self.out.push_str(" of {");
                for (i, c) in clauses.iter().enumerate() {
                    self.out.push_str(if i == 0 { " " } else { "; " });
                    pattern(&mut self.out, &c.pat);
                    self.out.push_str(" -> ");
                    self.scoped(&c.pat.vars, |pr| pr.expr(&c.body, Ctx::Top));
                }
                self.out
                    .push_str(if clauses.is_empty() { "}" } else { " }" });
            }
        }
    }

    fn scoped(&mut self, vars: &[String], f: impl FnOnce(&mut Printer)) {
        let n = self.bound.len();
        self.bound.extend(vars.iter().cloned());
        f(self);
        self.bound.truncate(n);
    }

    fn open(&mut self, paren: bool) {
        if paren {
            self.out.push('(');
        }
    }

    fn close(&mut self, paren: bool) {
        if paren {
            self.out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(k: Ctor, vs: &[&str]) -> Pattern {
        Pattern::new(k, vs.iter().map(|v| v.to_string()).collect())
    }

    #[test]
    fn upcast_shape() {
        let up = Expr::lam(
            "y",
            Expr::con("Eq", vec![Expr::var("y"), Expr::method("eq_Int")]),
        );
        let p = Program {
            bindings: vec![Binding {
                name: "toEq_Int".into(),
                body: up,
            }],
            main: Expr::app(
                Expr::method("toEq_Int"),
                Expr::con("Int", vec![Expr::Int(1)]),
            ),
        };
        assert_eq!(
            print_program(&p),
            "let toEq_Int = \\y -> K_Eq(y, eq_Int)\nin toEq_Int K_Int(1)\n"
        );
    }

    #[test]
    fn tuples_and_sugar() {
        let e = Expr::lam_pat(
            pat(Ctor::Tuple(1), &["that"]),
            Expr::tuple(vec![Expr::var("that")]).unwrap(),
        );
        assert_eq!(print_expr(&e), "\\(that) -> (that,)");
        let unit = Expr::tuple(vec![]).unwrap();
        assert_eq!(
            print_expr(&Expr::lam_pat(pat(Ctor::Tuple(0), &[]), unit)),
            "\\() -> ()"
        );
    }

    #[test]
    fn application_and_operators() {
        let f = Expr::method("f");
        let e = Expr::app(
            Expr::app(f.clone(), Expr::app(f.clone(), Expr::Int(1))),
            Expr::Prim(
                BinOp::And,
                Box::new(Expr::Bool(true)),
                Box::new(Expr::Bool(false)),
            ),
        );
        assert_eq!(print_expr(&e), "f (f 1) (true && false)");
        let e = Expr::case(
            Expr::var("x"),
            vec![Clause {
                pat: pat(Ctor::named("T"), &["a", "b"]),
                body: Expr::lam("z", Expr::var("b")),
            }],
        );
        assert_eq!(print_expr(&e), "case x of { K_T(a, b) -> \\z -> b }");
        assert_eq!(
            print_expr(&Expr::case(Expr::var("x"), vec![])),
            "case x of {}"
        );
    }

    #[test]
    fn shadowed_method_is_marked() {
        let e = Expr::lam("f", Expr::app(Expr::method("f"), Expr::var("f")));
        assert_eq!(print_expr(&e), "\\f -> @f f");
    }
}
