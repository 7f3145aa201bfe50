//! Plain FG type checker. It produces no target code; the translator must
//! accept exactly the programs this checker accepts.

use std::collections::HashMap;

use crate::diag::{Code, Diagnostic};

use super::ast::*;
use super::decls::{Decls, TypeKind};

pub type TypeEnv = HashMap<String, String>;

pub struct TypeChecker<'d> {
    decls: &'d Decls,
    runtime: bool,
}

impl<'d> TypeChecker<'d> {
    pub fn new(decls: &'d Decls) -> Self {
        TypeChecker {
            decls,
            runtime: false,
        }
    }

    /// A checker for terms reached during evaluation, where substitution can
    /// put a struct value under an assertion (`S{}.(T)`). Such an assertion
    /// has the asserted type.
    pub fn runtime(decls: &'d Decls) -> Self {
        TypeChecker {
            decls,
            runtime: true,
        }
    }

    /// Synthesizes the minimal type of `e`.
    pub fn synth(&self, env: &TypeEnv, e: &Expr) -> Result<String, Diagnostic> {
        let d = self.decls;
        match &e.kind {
            ExprKind::Var(x) => env.get(x).cloned().ok_or_else(|| {
                Diagnostic::error(Code::UnknownVar, e.span, format!("unknown variable `{x}`"))
            }),
            ExprKind::StructLit { ty, args } => {
                let fields = d.struct_fields(ty.as_str()).ok_or_else(|| {
                    Diagnostic::error(
                        Code::UnknownType,
                        ty.span,
                        format!("`{ty}` is not a struct type"),
                    )
                })?;
                if fields.len() != args.len() {
                    return Err(arity(e, fields.len(), args.len()));
                }
                for (f, a) in fields.iter().zip(args) {
                    self.check(env, a, f.ty.as_str())?;
                }
                Ok(ty.name.clone())
            }
            ExprKind::Select { recv, field } => {
                let t = self.synth(env, recv)?;
                let fields = d.struct_fields(&t).ok_or_else(|| {
                    Diagnostic::error(
                        Code::SelectOnNonStruct,
                        e.span,
                        format!("cannot select field `{field}` from non-struct type `{t}`"),
                    )
                })?;
                fields
                    .iter()
                    .find(|f| f.name.name == field.name)
                    .map(|f| f.ty.name.clone())
                    .ok_or_else(|| {
                        Diagnostic::error(
                            Code::UnknownField,
                            field.span,
                            format!("struct `{t}` has no field `{field}`"),
                        )
                    })
            }
            ExprKind::Call { recv, method, args } => {
                let t = self.synth(env, recv)?;
                let (_, spec) = d.find_method(&t, method.as_str()).ok_or_else(|| {
                    Diagnostic::error(
                        Code::UnknownMethod,
                        method.span,
                        format!("type `{t}` has no method `{method}`"),
                    )
                })?;
                if spec.sig.params.len() != args.len() {
                    return Err(arity(e, spec.sig.params.len(), args.len()));
                }
                for (p, a) in spec.sig.params.iter().zip(args) {
                    self.check(env, a, p.ty.as_str())?;
                }
                Ok(spec.sig.ret.name.clone())
            }
            ExprKind::Assert { recv, ty } => {
                let t = self.synth(env, recv)?;
                if self.runtime && d.is_struct(&t) && d.kind(ty.as_str()).is_some() {
                    return Ok(ty.name.clone());
                }
                if !d.is_interface(&t) {
                    return Err(Diagnostic::error(
                        Code::AssertOnNonInterface,
                        e.span,
                        if d.is_struct(&t) {
                            format!("type assertion on struct type `{t}` is not allowed in FG")
                        } else {
                            format!("type assertion on non-interface type `{t}`")
                        },
                    ));
                }
                match d.kind(ty.as_str()) {
                    None => Err(Diagnostic::error(
                        Code::UnknownType,
                        ty.span,
                        format!("unknown type `{ty}`"),
                    )),
                    Some(TypeKind::Interface) => Ok(ty.name.clone()),
                    Some(_) if d.subtype(ty.as_str(), &t) => Ok(ty.name.clone()),
                    Some(_) => Err(Diagnostic::error(
                        Code::ImpossibleAssert,
                        e.span,
                        format!("impossible assertion: `{ty}` does not implement `{t}`"),
                    )),
                }
            }
            ExprKind::Int(_) => Ok(INT_TYPE.to_string()),
            ExprKind::Bool(_) => Ok(BOOL_TYPE.to_string()),
            ExprKind::Bin { op, lhs, rhs } => {
                let l = self.synth(env, lhs)?;
                let r = self.synth(env, rhs)?;
                binop_type(*op, &l, &r).ok_or_else(|| {
                    Diagnostic::error(
                        Code::PrimitiveOp,
                        e.span,
                        format!("operator `{}` not defined on `{l}` and `{r}`", op.symbol()),
                    )
                })
            }
        }
    }

    /// Checks `e` against `want` via subsumption.
    pub fn check(&self, env: &TypeEnv, e: &Expr, want: &str) -> Result<(), Diagnostic> {
        let have = self.synth(env, e)?;
        if have == want || (self.decls.is_interface(want) && self.decls.subtype(&have, want)) {
            Ok(())
        } else {
            Err(not_a_subtype(e, &have, want))
        }
    }

    pub fn method_env(m: &MethodDecl) -> TypeEnv {
        let mut env = TypeEnv::new();
        env.insert(m.recv.name.name.clone(), m.recv.ty.name.clone());
        for p in &m.spec.sig.params {
            env.insert(p.name.name.clone(), p.ty.name.clone());
        }
        env
    }

    /// Checks every method body and returns the type of `main`.
    pub fn check_program(&self, p: &Program) -> Result<String, Vec<Diagnostic>> {
        let mut errs = Vec::new();
        for m in p.methods() {
            if let Err(d) = self.check(&Self::method_env(m), &m.body, m.spec.sig.ret.as_str()) {
                errs.push(d);
            }
        }
        match self.synth(&TypeEnv::new(), &p.main) {
            Ok(t) if errs.is_empty() => Ok(t),
            Ok(_) => Err(errs),
            Err(d) => {
                errs.push(d);
                Err(errs)
            }
        }
    }
}

pub(crate) fn binop_type(op: BinOp, l: &str, r: &str) -> Option<String> {
    let ok = match op {
        BinOp::Eq => l == r && (l == INT_TYPE || l == BOOL_TYPE),
        BinOp::Lt => l == INT_TYPE && r == INT_TYPE,
        BinOp::And | BinOp::Or => l == BOOL_TYPE && r == BOOL_TYPE,
    };
    ok.then(|| BOOL_TYPE.to_string())
}

pub(crate) fn arity(e: &Expr, want: usize, got: usize) -> Diagnostic {
    Diagnostic::error(
        Code::ArityMismatch,
        e.span,
        format!("expected {want} argument(s), found {got}"),
    )
}

pub(crate) fn not_a_subtype(e: &Expr, have: &str, want: &str) -> Diagnostic {
    Diagnostic::error(
        Code::NotASubtype,
        e.span,
        format!("`{have}` is not a subtype of `{want}`"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg::parser::{parse_expr, parse_program};

    const SRC: &str = "
        type I interface { m(x T) T }
        type J interface {}
        type T struct { a I }
        type U struct {}
        func (r U) m(x T) T { return x }
        func main() { _ = T{U{}} }";

    fn synth(src: &str, env: &[(&str, &str)]) -> Result<String, Code> {
        let p = parse_program(SRC, Mode::Ext).unwrap();
        let d = Decls::of_program(&p);
        let env = env
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        TypeChecker::new(&d)
            .synth(&env, &parse_expr(src, Mode::Ext).unwrap())
            .map_err(|e| e.code)
    }

    #[test]
    fn synthesis() {
        assert_eq!(synth("T{U{}}", &[]), Ok("T".into()));
        assert_eq!(synth("T{U{}}.a", &[]), Ok("I".into()));
        assert_eq!(synth("T{U{}}.a.m(T{U{}})", &[]), Ok("T".into()));
        assert_eq!(synth("U{}.m(x)", &[("x", "T")]), Ok("T".into()));
        assert_eq!(synth("i.(U)", &[("i", "I")]), Ok("U".into()));
        assert_eq!(synth("i.(J)", &[("i", "I")]), Ok("J".into()));
        assert_eq!(synth("1 < 2 && true", &[]), Ok("bool".into()));
    }

    #[test]
    fn errors() {
        assert_eq!(synth("y", &[]), Err(Code::UnknownVar));
        assert_eq!(synth("T{T{U{}}}", &[]), Err(Code::NotASubtype));
        assert_eq!(synth("T{}", &[]), Err(Code::ArityMismatch));
        assert_eq!(synth("U{}.m()", &[]), Err(Code::ArityMismatch));
        assert_eq!(synth("U{}.n()", &[]), Err(Code::UnknownMethod));
        assert_eq!(synth("U{}.a", &[]), Err(Code::UnknownField));
        assert_eq!(synth("i.a", &[("i", "I")]), Err(Code::SelectOnNonStruct));
        assert_eq!(synth("U{}.(U)", &[]), Err(Code::AssertOnNonInterface));
        assert_eq!(synth("i.(T)", &[("i", "I")]), Err(Code::ImpossibleAssert));
        assert_eq!(synth("1 && true", &[]), Err(Code::PrimitiveOp));
        assert_eq!(synth("i.m(U{})", &[("i", "I")]), Err(Code::NotASubtype));
    }
}
