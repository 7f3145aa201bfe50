//! Well-formedness: conditions FG1-FG4 plus name resolution.

use std::collections::{HashMap, HashSet};

use crate::diag::{Code, Diagnostic};

use super::ast::*;
use super::decls::{Decls, TypeKind};

/// Checks a program and returns every violation found. An empty vector means
/// the program is well-formed.
pub fn check_wellformed(p: &Program) -> Vec<Diagnostic> {
    let decls = Decls::of_program(p);
    let mut diags = Vec::new();

    let mut seen_types: HashMap<&str, ()> = HashMap::new();
    for t in p.types() {
        let name = t.name.as_str();
        if p.mode.is_ext() && (name == INT_TYPE || name == BOOL_TYPE) {
            diags.push(Diagnostic::error(
                Code::ReservedName,
                t.name.span,
                format!("`{name}` is a primitive type and cannot be redeclared"),
            ));
        }
        if seen_types.insert(name, ()).is_some() {
            diags.push(Diagnostic::error(
                Code::DuplicateType,
                t.name.span,
                format!("type `{name}` declared more than once"),
            ));
        }
        match &t.lit {
            TypeLit::Struct(fields) => {
                let mut names = HashSet::new();
                for f in fields {
                    if !names.insert(f.name.as_str()) {
                        diags.push(Diagnostic::error(
                            Code::DuplicateField,
                            f.name.span,
                            format!("duplicate field `{}` in struct `{name}`", f.name),
                        ));
                    }
                    resolve(&decls, &f.ty, &mut diags);
                }
            }
            TypeLit::Interface(specs) => {
                let mut names = HashSet::new();
                for s in specs {
                    if !names.insert(s.name.as_str()) {
                        diags.push(Diagnostic::error(
                            Code::DuplicateSpec,
                            s.name.span,
                            format!("duplicate method `{}` in interface `{name}`", s.name),
                        ));
                    }
                    check_signature(&decls, None, &s.sig, &mut diags);
                }
            }
        }
    }

    check_struct_cycles(&decls, &mut diags);

    let mut seen_methods = HashSet::new();
    for m in p.methods() {
        match decls.kind(m.recv_type()) {
            Some(TypeKind::Struct) => {}
            Some(_) => diags.push(Diagnostic::error(
                Code::ReceiverNotStruct,
                m.recv.ty.span,
                format!("receiver type `{}` is not a struct", m.recv.ty),
            )),
            None => resolve(&decls, &m.recv.ty, &mut diags),
        }
        if !seen_methods.insert((m.recv_type(), m.name())) {
            diags.push(Diagnostic::error(
                Code::DuplicateMethod,
                m.spec.name.span,
                format!(
                    "method `{}` already declared for receiver type `{}`",
                    m.name(),
                    m.recv_type()
                ),
            ));
        }
        check_signature(&decls, Some(&m.recv.name), &m.spec.sig, &mut diags);
        check_expr_types(&decls, &m.body, &mut diags);
    }
    check_expr_types(&decls, &p.main, &mut diags);
    diags
}

fn resolve(decls: &Decls, t: &Ident, diags: &mut Vec<Diagnostic>) {
    if !decls.is_declared(t.as_str()) {
        diags.push(Diagnostic::error(
            Code::UnknownType,
            t.span,
            format!("unknown type `{t}`"),
        ));
    }
}

fn check_signature(
    decls: &Decls,
    recv: Option<&Ident>,
    sig: &Signature,
    diags: &mut Vec<Diagnostic>,
) {
    let mut names: HashSet<&str> = recv.iter().map(|r| r.as_str()).collect();
    for p in &sig.params {
        if !names.insert(p.name.as_str()) {
            diags.push(Diagnostic::error(
                Code::DuplicateParam,
                p.name.span,
                format!("parameter `{}` bound more than once", p.name),
            ));
        }
        resolve(decls, &p.ty, diags);
    }
    resolve(decls, &sig.ret, diags);
}

/// Every type named in an expression (literals and assertions) must exist.
fn check_expr_types(decls: &Decls, e: &Expr, diags: &mut Vec<Diagnostic>) {
    e.walk(&mut |n| match &n.kind {
        ExprKind::StructLit { ty, .. } | ExprKind::Assert { ty, .. } => resolve(decls, ty, diags),
        _ => {}
    });
}

/// FG1: the struct-to-struct field graph must be acyclic. Interface-typed
/// fields contribute no edges.
fn check_struct_cycles(decls: &Decls, diags: &mut Vec<Diagnostic>) {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }
    let structs: Vec<&str> = decls.structs().collect();
    let mut marks: HashMap<&str, Mark> = structs.iter().map(|s| (*s, Mark::Fresh)).collect();
    let mut reported: HashSet<&str> = HashSet::new();

    fn visit<'a>(
        decls: &'a Decls,
        s: &'a str,
        marks: &mut HashMap<&'a str, Mark>,
        reported: &mut HashSet<&'a str>,
        diags: &mut Vec<Diagnostic>,
    ) {
        marks.insert(s, Mark::Active);
        for f in decls.struct_fields(s).unwrap_or(&[]) {
            let t = f.ty.as_str();
            if !decls.is_struct(t) {
                continue;
            }
            match marks.get(t).copied().unwrap_or(Mark::Done) {
                Mark::Active => {
                    if reported.insert(s) {
                        diags.push(Diagnostic::error(
                            Code::RecursiveStruct,
                            f.ty.span,
                            format!("struct `{s}` is recursive through field `{}`", f.name),
                        ));
                    }
                }
                Mark::Fresh => visit(decls, t, marks, reported, diags),
                Mark::Done => {}
            }
        }
        marks.insert(s, Mark::Done);
    }

    for s in structs {
        if marks[s] == Mark::Fresh {
            visit(decls, s, &mut marks, &mut reported, diags);
        }
    }
}
