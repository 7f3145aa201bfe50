//! Canonical pretty-printer for FG programs.

use std::fmt::Write;

use super::ast::*;

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.decls {
        match d {
            Decl::Type(t) => print_type_decl(&mut out, t),
            Decl::Method(m) => {
                let _ = writeln!(
                    out,
                    "func ({} {}) {}{} {{",
                    m.recv.name,
                    m.recv.ty,
                    m.spec.name,
                    signature(&m.spec.sig)
                );
                let _ = writeln!(out, "\treturn {}", print_expr(&m.body));
                out.push_str("}\n");
            }
        }
        out.push('\n');
    }
    let _ = writeln!(out, "func main() {{\n\t_ = {}\n}}", print_expr(&p.main));
    out
}

fn print_type_decl(out: &mut String, t: &TypeDecl) {
    match &t.lit {
        TypeLit::Struct(fields) if fields.is_empty() => {
            let _ = writeln!(out, "type {} struct {{}}", t.name);
        }
        TypeLit::Struct(fields) => {
            let _ = writeln!(out, "type {} struct {{", t.name);
            for f in fields {
                let _ = writeln!(out, "\t{} {}", f.name, f.ty);
            }
            out.push_str("}\n");
        }
        TypeLit::Interface(specs) if specs.is_empty() => {
            let _ = writeln!(out, "type {} interface {{}}", t.name);
        }
        TypeLit::Interface(specs) => {
            let _ = writeln!(out, "type {} interface {{", t.name);
            for s in specs {
                let _ = writeln!(out, "\t{}{}", s.name, signature(&s.sig));
            }
            out.push_str("}\n");
        }
    }
}

pub fn signature(sig: &Signature) -> String {
    let params: Vec<String> = sig
        .params
        .iter()
        .map(|p| format!("{} {}", p.name, p.ty))
        .collect();
    format!("({}) {}", params.join(", "), sig.ret)
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, 0);
    out
}

fn list(out: &mut String, es: &[Expr]) {
    for (i, a) in es.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(out, a, 0);
    }
}

/// Prints `e`, parenthesizing when its precedence is below `min`.
fn expr(out: &mut String, e: &Expr, min: u8) {
    match &e.kind {
        ExprKind::Var(x) => out.push_str(x),
        ExprKind::Int(n) => {
            let _ = write!(out, "{n}");
        }
        ExprKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::StructLit { ty, args } => {
            out.push_str(&ty.name);
            out.push('{');
            list(out, args);
            out.push('}');
        }
        ExprKind::Select { recv, field } => {
            expr(out, recv, u8::MAX);
            out.push('.');
            out.push_str(&field.name);
        }
        ExprKind::Assert { recv, ty } => {
            expr(out, recv, u8::MAX);
            let _ = write!(out, ".({ty})");
        }
        ExprKind::Call { recv, method, args } => {
            expr(out, recv, u8::MAX);
            let _ = write!(out, ".{method}(");
            list(out, args);
            out.push(')');
        }
        ExprKind::Bin { op, lhs, rhs } => {
            let p = op.precedence();
            let paren = p < min;
            if paren {
                out.push('(');
            }
            expr(out, lhs, p);
            let _ = write!(out, " {} ", op.symbol());
            expr(out, rhs, p + 1);
            if paren {
                out.push(')');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg::parser::{parse_expr, parse_program};

    #[test]
    fn canonical_layout() {
        let p = parse_program("type T struct{} func main(){_=T{}}", Mode::Core).unwrap();
        let s = print_program(&p);
        assert!(s.contains("type T struct {"));
        assert_eq!(s, "type T struct {}\n\nfunc main() {\n\t_ = T{}\n}\n");
        assert_eq!(parse_program(&s, Mode::Core).unwrap(), p);
    }

    #[test]
    fn binop_parens() {
        for src in [
            "(a || b) && c",
            "a || b && c",
            "(a == b) == c",
            "a == (b == c)",
            "x.f.(I).m(a < b)",
        ] {
            let e = parse_expr(src, Mode::Ext).unwrap();
            let printed = print_expr(&e);
            assert_eq!(
                parse_expr(&printed, Mode::Ext).unwrap(),
                e,
                "{src} -> {printed}"
            );
        }
        let e = parse_expr("(a || b) && c", Mode::Ext).unwrap();
        assert_eq!(print_expr(&e), "(a || b) && c");
        let e = parse_expr("((a)) || (b && c)", Mode::Ext).unwrap();
        assert_eq!(print_expr(&e), "a || b && c");
    }
}
