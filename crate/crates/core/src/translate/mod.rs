//! Type-directed dictionary-passing translation from FG to TL.
//!
//! The translator is also a type checker: it synthesizes the minimal type of
//! every expression and inserts upcasts only at checking positions (struct
//! literal fields, call arguments and method results).

pub mod names;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::diag::{Code, Diagnostic, Span};
use crate::fg::ast::{Expr, ExprKind, MethodDecl, Program};
use crate::fg::check_wellformed;
use crate::fg::decls::{Decls, TypeKind};
use crate::fg::typeck::{arity, binop_type, not_a_subtype, TypeChecker, TypeEnv};
use crate::tl::{self, Binding, Clause, Ctor, Pattern};

pub use names::{FreshNamer, Names};

type TExpr = tl::Expr;

/// Deliberate miscompilations, used to check that the differential harness
/// notices them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Interface-to-interface upcasts read dictionary slot `π(i) - 1`, so the
    /// first slot receives the underlying value.
    PermutationOffByOne,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Options {
    /// Emit upcasts and downcasts as named `let` bindings instead of inline.
    pub hoist_helpers: bool,
    /// Wrap every coercion to an interface in an extra identity upcast.
    pub identity_upcasts: bool,
    pub fault: Option<Fault>,
}

/// How often each translation rule fired.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Coverage(BTreeMap<&'static str, usize>);

impl Coverage {
    pub const RULES: [&'static str; 13] = [
        "td-var",
        "td-struct",
        "td-access",
        "td-call-struct",
        "td-call-iface",
        "td-assert",
        "td-sub",
        "td-cons-struct-iface",
        "td-cons-iface-iface",
        "td-destr-iface-struct",
        "td-destr-iface-iface",
        "td-method",
        "td-prog",
    ];

    fn hit(&mut self, rule: &'static str) {
        *self.0.entry(rule).or_default() += 1;
    }

    pub fn get(&self, rule: &str) -> usize {
        self.0.get(rule).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &Coverage) {
        for (k, v) in &other.0 {
            *self.0.entry(k).or_default() += v;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Translation {
    pub program: tl::Program,
    /// Synthesized type of `main`.
    pub main_type: String,
    pub coverage: Coverage,
    pub warnings: Vec<Diagnostic>,
}

pub struct Translator<'d> {
    decls: &'d Decls,
    names: Names,
    opts: Options,
    fresh: FreshNamer,
    helpers: BTreeMap<String, TExpr>,
    coverage: Coverage,
    warnings: Vec<Diagnostic>,
}

impl<'d> Translator<'d> {
    pub fn new(decls: &'d Decls, opts: Options) -> Translator<'d> {
        Translator {
            decls,
            names: Names::new(decls),
            opts,
            fresh: FreshNamer::default(),
            helpers: BTreeMap::new(),
            coverage: Coverage::default(),
            warnings: Vec::new(),
        }
    }

    pub fn names(&self) -> &Names {
        &self.names
    }

    pub fn coverage(&self) -> &Coverage {
        &self.coverage
    }

    /// Synthesizes the type of `e` and its translation.
    pub fn infer(&mut self, env: &TypeEnv, e: &Expr) -> Result<(String, TExpr), Diagnostic> {
        let d = self.decls;
        match &e.kind {
            ExprKind::Var(x) => {
                let t = env.get(x).ok_or_else(|| {
                    Diagnostic::error(Code::UnknownVar, e.span, format!("unknown variable `{x}`"))
                })?;
                self.coverage.hit("td-var");
                Ok((t.clone(), TExpr::Var(names::var(x))))
            }
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
                let mut out = Vec::with_capacity(args.len());
                for (f, a) in fields.iter().zip(args) {
                    out.push(self.check(env, a, f.ty.as_str())?);
                }
                self.coverage.hit("td-struct");
                Ok((ty.name.clone(), TExpr::con(ty.as_str(), out)))
            }
            ExprKind::Select { recv, field } => {
                let (t, code) = self.infer(env, recv)?;
                let fields = d.struct_fields(&t).ok_or_else(|| {
                    Diagnostic::error(
                        Code::SelectOnNonStruct,
                        e.span,
                        format!("cannot select field `{field}` from non-struct type `{t}`"),
                    )
                })?;
                let i = fields
                    .iter()
                    .position(|f| f.name.name == field.name)
                    .ok_or_else(|| {
                        Diagnostic::error(
                            Code::UnknownField,
                            field.span,
                            format!("struct `{t}` has no field `{field}`"),
                        )
                    })?;
                let vars: Vec<String> = fields.iter().map(|_| self.fresh.fresh("f")).collect();
                let body = TExpr::Var(vars[i].clone());
                self.coverage.hit("td-access");
                Ok((
                    fields[i].ty.name.clone(),
                    TExpr::case(
                        code,
                        vec![Clause {
                            pat: Pattern::new(Ctor::named(&t), vars),
                            body,
                        }],
                    ),
                ))
            }
            ExprKind::Call { recv, method, args } => {
                let (t, code) = self.infer(env, recv)?;
                let found = d.find_method(&t, method.as_str());
                let (j, spec) = found.ok_or_else(|| {
                    Diagnostic::error(
                        Code::UnknownMethod,
                        method.span,
                        format!("type `{t}` has no method `{method}`"),
                    )
                })?;
                if spec.sig.params.len() != args.len() {
                    return Err(arity(e, spec.sig.params.len(), args.len()));
                }
                let mut out = Vec::with_capacity(args.len());
                for (p, a) in spec.sig.params.iter().zip(args) {
                    out.push(self.check(env, a, p.ty.as_str())?);
                }
                let pack = TExpr::tuple(out).map_err(|err| {
                    Diagnostic::error(Code::ArityMismatch, e.span, err.to_string())
                })?;
                let ret = spec.sig.ret.name.clone();
                if d.is_struct(&t) {
                    let m = self
                        .names
                        .method(method.as_str(), &t)
                        .expect("struct method is named");
                    self.coverage.hit("td-call-struct");
                    Ok((ret, TExpr::app2(TExpr::method(m), code, pack)))
                } else {
                    let q = d.interface_specs(&t).map_or(0, <[_]>::len);
                    let x = self.fresh.fresh("x");
                    let slots: Vec<String> = (0..q).map(|_| self.fresh.fresh("d")).collect();
                    let body =
                        TExpr::app2(TExpr::Var(slots[j].clone()), TExpr::Var(x.clone()), pack);
                    let pat =
                        Pattern::new(Ctor::named(&t), std::iter::once(x).chain(slots).collect());
                    self.coverage.hit("td-call-iface");
                    Ok((ret, TExpr::case(code, vec![Clause { pat, body }])))
                }
            }
            ExprKind::Assert { recv, ty } => {
                let (t, code) = self.infer(env, recv)?;
                if !d.is_interface(&t) {
                    return Err(Diagnostic::error(
                        Code::AssertOnNonInterface,
                        e.span,
                        format!("type assertion on non-interface type `{t}`"),
                    ));
                }
                let f = self.downcast(&t, ty.as_str(), e.span)?;
                self.coverage.hit("td-assert");
                Ok((ty.name.clone(), TExpr::app(f, code)))
            }
            ExprKind::Int(n) => Ok((crate::fg::ast::INT_TYPE.into(), TExpr::Int(*n))),
            ExprKind::Bool(b) => Ok((crate::fg::ast::BOOL_TYPE.into(), TExpr::Bool(*b))),
            ExprKind::Bin { op, lhs, rhs } => {
                let (l, lc) = self.infer(env, lhs)?;
                let (r, rc) = self.infer(env, rhs)?;
                let t = binop_type(*op, &l, &r).ok_or_else(|| {
                    Diagnostic::error(
                        Code::PrimitiveOp,
                        e.span,
                        format!("operator `{}` not defined on `{l}` and `{r}`", op.symbol()),
                    )
                })?;
                Ok((t, TExpr::Prim(*op, Box::new(lc), Box::new(rc))))
            }
        }
    }

    /// Translates `e` at a checking position expecting `want`.
    pub fn check(&mut self, env: &TypeEnv, e: &Expr, want: &str) -> Result<TExpr, Diagnostic> {
        let (have, code) = self.infer(env, e)?;
        self.coerce_to(&have, want, code)
            .ok_or_else(|| not_a_subtype(e, &have, want))
    }

    /// Algorithmic subsumption: `None` when `have` is not a subtype of `want`.
    pub fn coerce_to(&mut self, have: &str, want: &str, code: TExpr) -> Option<TExpr> {
        let d = self.decls;
        let iface = d.is_interface(want);
        let code = if have == want {
            code
        } else if iface && d.subtype(have, want) {
            self.coverage.hit("td-sub");
            TExpr::app(self.upcast(have, want), code)
        } else {
            return None;
        };
        if iface && self.opts.identity_upcasts {
            Some(TExpr::app(self.upcast(want, want), code))
        } else {
            Some(code)
        }
    }

    /// The interface-value constructor from `t` to interface `u`.
    pub fn upcast(&mut self, t: &str, u: &str) -> TExpr {
        let rule = if self.decls.is_struct(t) {
            "td-cons-struct-iface"
        } else {
            "td-cons-iface-iface"
        };
        self.coverage.hit(rule);
        if !self.opts.hoist_helpers {
            return self.upcast_inline(t, u);
        }
        let name = self
            .names
            .upcast(t, u)
            .expect("upcast along a subtype edge")
            .to_string();
        if !self.helpers.contains_key(&name) {
            let saved = std::mem::take(&mut self.fresh);
            let body = self.upcast_inline(t, u);
            self.fresh = saved;
            self.helpers.insert(name.clone(), body);
        }
        TExpr::Method(name)
    }

    fn upcast_inline(&mut self, t: &str, u: &str) -> TExpr {
        let d = self.decls;
        let specs = d.interface_specs(u).unwrap_or(&[]);
        if d.is_struct(t) {
            let y = self.fresh.fresh("y");
            let mut args = vec![TExpr::Var(y.clone())];
            for s in specs {
                let m = self
                    .names
                    .method(s.name.as_str(), t)
                    .expect("implementing method is named");
                args.push(TExpr::method(m));
            }
            return TExpr::lam(&y, TExpr::con(u, args));
        }
        let q = d.interface_specs(t).map_or(0, <[_]>::len);
        let x = self.fresh.fresh("x");
        let slots: Vec<String> = (0..q).map(|_| self.fresh.fresh("d")).collect();
        let pi = d.permutation(t, u).expect("upcast along a subtype edge");
        let mut args = vec![TExpr::Var(x.clone())];
        for p in pi {
            args.push(match self.opts.fault {
                Some(Fault::PermutationOffByOne) if p == 0 => TExpr::Var(x.clone()),
                Some(Fault::PermutationOffByOne) => TExpr::Var(slots[p - 1].clone()),
                None => TExpr::Var(slots[p].clone()),
            });
        }
        let pat = Pattern::new(Ctor::named(t), std::iter::once(x).chain(slots).collect());
        TExpr::lam_pat(pat, TExpr::con(u, args))
    }

    /// The interface-value destructor from interface `i` to `u`. `span` is
    /// where diagnostics about the assertion are reported.
    pub fn downcast(&mut self, i: &str, u: &str, span: Span) -> Result<TExpr, Diagnostic> {
        let d = self.decls;
        match d.kind(u) {
            None => {
                return Err(Diagnostic::error(
                    Code::UnknownType,
                    span,
                    format!("unknown type `{u}`"),
                ))
            }
            Some(TypeKind::Interface) => {
                self.coverage.hit("td-destr-iface-iface");
                if !d.structs().any(|s| d.subtype(s, u)) {
                    self.warnings.push(Diagnostic::warning(
                        Code::EmptyDestructor,
                        span,
                        format!("no struct implements `{u}`; this assertion always fails"),
                    ));
                }
            }
            Some(_) if d.subtype(u, i) => self.coverage.hit("td-destr-iface-struct"),
            Some(_) => {
                return Err(Diagnostic::error(
                    Code::ImpossibleAssert,
                    span,
                    format!("impossible assertion: `{u}` does not implement `{i}`"),
                ))
            }
        }
        if !self.opts.hoist_helpers {
            return Ok(self.downcast_inline(i, u));
        }
        let name = self
            .names
            .downcast(i, u)
            .expect("downcast is named")
            .to_string();
        if !self.helpers.contains_key(&name) {
            let saved = std::mem::take(&mut self.fresh);
            let body = self.downcast_inline(i, u);
            self.fresh = saved;
            self.helpers.insert(name.clone(), body);
        }
        Ok(TExpr::Method(name))
    }

    fn downcast_inline(&mut self, i: &str, u: &str) -> TExpr {
        let d = self.decls;
        let q = d.interface_specs(i).map_or(0, <[_]>::len);
        let y = self.fresh.fresh("y");
        let slots: Vec<String> = (0..q).map(|_| self.fresh.fresh("d")).collect();
        let targets: Vec<&str> = if d.is_struct(u) {
            vec![u]
        } else {
            d.structs().filter(|s| d.subtype(s, u)).collect()
        };
        let mut clauses = Vec::new();
        for s in targets {
            let n = d.struct_fields(s).map_or(0, <[_]>::len);
            let zs: Vec<String> = (0..n).map(|_| self.fresh.fresh("z")).collect();
            let rebuilt = TExpr::con(s, zs.iter().map(|z| TExpr::Var(z.clone())).collect());
            let body = if s == u {
                rebuilt
            } else {
                TExpr::app(self.upcast(s, u), rebuilt)
            };
            clauses.push(Clause {
                pat: Pattern::new(Ctor::named(s), zs),
                body,
            });
        }
        let pat = Pattern::new(
            Ctor::named(i),
            std::iter::once(y.clone()).chain(slots).collect(),
        );
        TExpr::lam_pat(pat, TExpr::case(TExpr::Var(y), clauses))
    }

    /// `m_T = \recv -> \(params) -> body`
    pub fn translate_method(&mut self, m: &MethodDecl) -> Result<Binding, Diagnostic> {
        self.fresh.reset();
        let env = TypeChecker::method_env(m);
        let body = self.check(&env, &m.body, m.spec.sig.ret.as_str())?;
        let params: Vec<String> = m
            .spec
            .sig
            .params
            .iter()
            .map(|p| names::var(p.name.as_str()))
            .collect();
        let k = Ctor::tuple(params.len())
            .map_err(|err| Diagnostic::error(Code::ArityMismatch, m.span, err.to_string()))?;
        let name = self
            .names
            .method(m.name(), m.recv_type())
            .ok_or_else(|| {
                Diagnostic::error(
                    Code::ReceiverNotStruct,
                    m.recv.ty.span,
                    format!("receiver type `{}` is not a struct", m.recv.ty),
                )
            })?
            .to_string();
        self.coverage.hit("td-method");
        let inner = TExpr::lam_pat(Pattern::new(k, params), body);
        Ok(Binding {
            name,
            body: TExpr::lam(&names::var(m.recv.name.as_str()), inner),
        })
    }

    /// Translates `main` under the empty environment.
    pub fn translate_main(&mut self, main: &Expr) -> Result<(String, TExpr), Diagnostic> {
        self.fresh.reset();
        self.infer(&TypeEnv::new(), main)
    }

    /// Hoisted helpers requested so far, in name order.
    pub fn helper_bindings(&self) -> Vec<Binding> {
        self.helpers
            .iter()
            .map(|(name, body)| Binding {
                name: name.clone(),
                body: body.clone(),
            })
            .collect()
    }
}

/// Translates a whole program: one binding per method in declaration order,
/// then hoisted helpers, then `main`.
pub fn translate_program(p: &Program, opts: &Options) -> Result<Translation, Vec<Diagnostic>> {
    let wf = check_wellformed(p);
    if !wf.is_empty() {
        return Err(wf);
    }
    let decls = Decls::of_program(p);
    let mut tr = Translator::new(&decls, opts.clone());
    let mut bindings = Vec::new();
    let mut errs = Vec::new();
    for m in p.methods() {
        match tr.translate_method(m) {
            Ok(b) => bindings.push(b),
            Err(d) => errs.push(d),
        }
    }
    let main = tr.translate_main(&p.main);
    let (main_type, main) = match main {
        Ok(r) if errs.is_empty() => r,
        Ok(_) => return Err(errs),
        Err(d) => {
            errs.push(d);
            return Err(errs);
        }
    };
    bindings.extend(tr.helper_bindings());
    tr.coverage.hit("td-prog");
    Ok(Translation {
        program: tl::Program { bindings, main },
        main_type,
        coverage: tr.coverage,
        warnings: tr.warnings,
    })
}

/// Translates a single method declaration exactly as [`translate_program`]
/// would.
pub fn translate_method(
    decls: &Decls,
    m: &MethodDecl,
    opts: &Options,
) -> Result<Binding, Diagnostic> {
    Translator::new(decls, opts.clone()).translate_method(m)
}

/// The inline interface-value constructor from `t` to interface `u`.
/// Requires `t <: u`.
pub fn build_upcast(decls: &Decls, t: &str, u: &str) -> TExpr {
    Translator::new(decls, Options::default()).upcast(t, u)
}

/// The inline interface-value destructor from interface `i` to `u`.
pub fn build_downcast(decls: &Decls, i: &str, u: &str) -> Result<TExpr, Diagnostic> {
    Translator::new(decls, Options::default()).downcast(i, u, Span::default())
}
