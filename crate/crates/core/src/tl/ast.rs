//! Target language: an untyped lambda calculus with constructors and
//! pattern matching.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use crate::fg::ast::BinOp;

/// Largest tuple constructor available.
pub const MAX_TUPLE: usize = 32;

/// Bound variable used by the `\Pat -> E` sugar, which stands for
/// `\p' -> case p' of { Pat -> E }`.
pub const SUGAR_VAR: &str = "p'";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ctor {
    /// `K_t` for a struct or interface named `t`.
    Named(String),
    Tuple(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TlError {
    #[error("tuple arity {0} exceeds the maximum of {MAX_TUPLE}")]
    TupleArity(usize),
    #[error("duplicate binding `{0}`")]
    DuplicateBinding(String),
    #[error("binding `{0}` is not a lambda")]
    NotALambda(String),
}

impl Ctor {
    pub fn named(t: &str) -> Ctor {
        Ctor::Named(t.to_string())
    }

    pub fn tuple(k: usize) -> Result<Ctor, TlError> {
        if k > MAX_TUPLE {
            Err(TlError::TupleArity(k))
        } else {
            Ok(Ctor::Tuple(k))
        }
    }
}

impl fmt::Display for Ctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ctor::Named(t) => write!(f, "K_{t}"),
            Ctor::Tuple(k) => write!(f, "Tuple{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub ctor: Ctor,
    pub vars: Vec<String>,
}

impl Pattern {
    pub fn new(ctor: Ctor, vars: Vec<String>) -> Pattern {
        Pattern { ctor, vars }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub pat: Pattern,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    /// A lambda- or pattern-bound variable `X`.
    Var(String),
    /// A top-level method variable `Y`.
    Method(String),
    Con(Ctor, Vec<Expr>),
    App(Box<Expr>, Box<Expr>),
    Lam(String, Box<Expr>),
    Case(Box<Expr>, Vec<Clause>),
    Int(i64),
    Bool(bool),
    Prim(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(x: &str) -> Expr {
        Expr::Var(x.to_string())
    }

    pub fn method(y: &str) -> Expr {
        Expr::Method(y.to_string())
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(a))
    }

    /// `f a b`, i.e. `(f a) b`.
    pub fn app2(f: Expr, a: Expr, b: Expr) -> Expr {
        Expr::app(Expr::app(f, a), b)
    }

    pub fn lam(x: &str, body: Expr) -> Expr {
        Expr::Lam(x.to_string(), Box::new(body))
    }

    /// `\Pat -> body`, desugared.
    pub fn lam_pat(pat: Pattern, body: Expr) -> Expr {
        Expr::lam(
            SUGAR_VAR,
            Expr::Case(Box::new(Expr::var(SUGAR_VAR)), vec![Clause { pat, body }]),
        )
    }

    pub fn case(scrut: Expr, clauses: Vec<Clause>) -> Expr {
        Expr::Case(Box::new(scrut), clauses)
    }

    pub fn con(t: &str, args: Vec<Expr>) -> Expr {
        Expr::Con(Ctor::named(t), args)
    }

    pub fn tuple(args: Vec<Expr>) -> Result<Expr, TlError> {
        Ok(Expr::Con(Ctor::tuple(args.len())?, args))
    }

    /// Values: method variables, constructors applied to values, literals
    /// and lambdas. Lambdas count as values so that `(\x -> e) E` can
    /// evaluate its argument.
    pub fn is_value(&self) -> bool {
        match self {
            Expr::Method(_) | Expr::Int(_) | Expr::Bool(_) | Expr::Lam(..) => true,
            Expr::Con(_, args) => args.iter().all(Expr::is_value),
            _ => false,
        }
    }

    /// If this is a `\Pat -> E` sugar lambda, its pattern and body.
    pub fn as_lam_pat(&self) -> Option<(&Pattern, &Expr)> {
        let Expr::Lam(x, body) = self else {
            return None;
        };
        if x != SUGAR_VAR {
            return None;
        }
        let Expr::Case(scrut, clauses) = &**body else {
            return None;
        };
        if **scrut != Expr::var(SUGAR_VAR) || clauses.len() != 1 {
            return None;
        }
        let cl = &clauses[0];
        if cl.pat.vars.iter().any(|v| v == SUGAR_VAR) || cl.body.free_vars().contains(SUGAR_VAR) {
            return None;
        }
        Some((&cl.pat, &cl.body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Expr::Method(_) | Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Con(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Expr::App(f, a) | Expr::Prim(_, f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Expr::Lam(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Expr::Case(s, cls) => {
                s.collect_free(bound, out);
                for c in cls {
                    let n = bound.len();
                    bound.extend(c.pat.vars.iter().cloned());
                    c.body.collect_free(bound, out);
                    bound.truncate(n);
                }
            }
        }
    }

    /// Method variables referenced anywhere in the expression.
    pub fn method_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Method(y) = e {
                out.insert(y.clone());
            }
        });
        out
    }

    pub fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Var(_) | Expr::Method(_) | Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Con(_, args) => args.iter().for_each(|a| a.walk(f)),
            Expr::App(a, b) | Expr::Prim(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Expr::Lam(_, b) => b.walk(f),
            Expr::Case(s, cls) => {
                s.walk(f);
                cls.iter().for_each(|c| c.body.walk(f));
            }
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Substitutes closed values for variables, stopping at shadowing binders.
    /// Since the substituted terms are closed, no capture can occur.
    pub fn subst(&self, map: &[(&str, &Expr)]) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Expr::Var(x) => match map.iter().find(|(y, _)| y == x) {
                Some((_, v)) => (*v).clone(),
                None => self.clone(),
            },
            Expr::Method(_) | Expr::Int(_) | Expr::Bool(_) => self.clone(),
            Expr::Con(k, args) => Expr::Con(k.clone(), args.iter().map(|a| a.subst(map)).collect()),
            Expr::App(f, a) => Expr::app(f.subst(map), a.subst(map)),
            Expr::Prim(op, l, r) => Expr::Prim(*op, Box::new(l.subst(map)), Box::new(r.subst(map))),
            Expr::Lam(x, b) => {
                let inner: Vec<_> = map.iter().filter(|(y, _)| y != x).copied().collect();
                Expr::Lam(x.clone(), Box::new(b.subst(&inner)))
            }
            Expr::Case(s, cls) => Expr::Case(
                Box::new(s.subst(map)),
                cls.iter()
                    .map(|c| {
                        let inner: Vec<_> = map
                            .iter()
                            .filter(|(y, _)| !c.pat.vars.iter().any(|v| v == y))
                            .copied()
                            .collect();
                        Clause {
                            pat: c.pat.clone(),
                            body: c.body.subst(&inner),
                        }
                    })
                    .collect(),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binding {
    pub name: String,
    pub body: Expr,
}

/// `let Y_i = \X_i -> E_i in E`
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub bindings: Vec<Binding>,
    pub main: Expr,
}

impl Default for Expr {
    fn default() -> Expr {
        Expr::Con(Ctor::Tuple(0), vec![])
    }
}

impl Program {
    pub fn binding(&self, name: &str) -> Option<&Expr> {
        self.bindings
            .iter()
            .find(|b| b.name == name)
            .map(|b| &b.body)
    }
}

/// The method substitution `μ` built from a program's let bindings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MethodSubst {
    map: HashMap<String, Expr>,
}

impl MethodSubst {
    pub fn from_program(p: &Program) -> Result<MethodSubst, TlError> {
        let mut map = HashMap::new();
        for b in &p.bindings {
            if !matches!(b.body, Expr::Lam(..)) {
                return Err(TlError::NotALambda(b.name.clone()));
            }
            if map.insert(b.name.clone(), b.body.clone()).is_some() {
                return Err(TlError::DuplicateBinding(b.name.clone()));
            }
        }
        Ok(MethodSubst { map })
    }

    pub fn get(&self, y: &str) -> Option<&Expr> {
        self.map.get(y)
    }

    pub fn contains(&self, y: &str) -> bool {
        self.map.contains_key(y)
    }
}

/// A TL value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Method(String),
    Con(Ctor, Vec<Value>),
    Lam(String, Box<Expr>),
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn from_expr(e: &Expr) -> Option<Value> {
        Some(match e {
            Expr::Method(y) => Value::Method(y.clone()),
            Expr::Con(k, args) => Value::Con(
                k.clone(),
                args.iter().map(Value::from_expr).collect::<Option<_>>()?,
            ),
            Expr::Lam(x, b) => Value::Lam(x.clone(), b.clone()),
            Expr::Int(n) => Value::Int(*n),
            Expr::Bool(b) => Value::Bool(*b),
            _ => return None,
        })
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Value::Method(y) => Expr::Method(y.clone()),
            Value::Con(k, vs) => Expr::Con(k.clone(), vs.iter().map(Value::to_expr).collect()),
            Value::Lam(x, b) => Expr::Lam(x.clone(), b.clone()),
            Value::Int(n) => Expr::Int(*n),
            Value::Bool(b) => Expr::Bool(*b),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::print_expr(&self.to_expr()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_bounds() {
        assert_eq!(Ctor::tuple(0), Ok(Ctor::Tuple(0)));
        assert_eq!(Ctor::tuple(MAX_TUPLE), Ok(Ctor::Tuple(32)));
        assert_eq!(Ctor::tuple(33), Err(TlError::TupleArity(33)));
        let unit = Expr::tuple(vec![]).unwrap();
        assert!(unit.is_value());
        assert_eq!(
            Value::from_expr(&unit),
            Some(Value::Con(Ctor::Tuple(0), vec![]))
        );
    }

    #[test]
    fn subst_respects_shadowing() {
        let v = Expr::con("T", vec![]);
        let e = Expr::app(Expr::var("x"), Expr::lam("x", Expr::var("x")));
        assert_eq!(
            e.subst(&[("x", &v)]),
            Expr::app(v.clone(), Expr::lam("x", Expr::var("x")))
        );
        let pat = Pattern::new(Ctor::Tuple(1), vec!["x".into()]);
        let e = Expr::case(
            Expr::var("x"),
            vec![Clause {
                pat: pat.clone(),
                body: Expr::var("x"),
            }],
        );
        assert_eq!(
            e.subst(&[("x", &v)]),
            Expr::case(
                v.clone(),
                vec![Clause {
                    pat,
                    body: Expr::var("x")
                }]
            )
        );
    }

    #[test]
    fn sugar_detection() {
        let pat = Pattern::new(Ctor::Tuple(1), vec!["a".into()]);
        let e = Expr::lam_pat(pat.clone(), Expr::var("a"));
        assert_eq!(e.as_lam_pat(), Some((&pat, &Expr::var("a"))));
        assert!(Expr::lam("p'", Expr::var("p'")).as_lam_pat().is_none());
        assert!(Expr::lam_pat(pat, Expr::var(SUGAR_VAR))
            .as_lam_pat()
            .is_none());
        assert_eq!(
            Expr::lam_pat(Pattern::new(Ctor::Tuple(0), vec![]), Expr::var("z")).free_vars(),
            BTreeSet::from(["z".to_string()])
        );
    }

    #[test]
    fn method_subst_errors() {
        let lam = Expr::lam("x", Expr::var("x"));
        let dup = Program {
            bindings: vec![
                Binding {
                    name: "f".into(),
                    body: lam.clone(),
                },
                Binding {
                    name: "f".into(),
                    body: lam,
                },
            ],
            main: Expr::default(),
        };
        assert_eq!(
            MethodSubst::from_program(&dup),
            Err(TlError::DuplicateBinding("f".into()))
        );
    }
}
