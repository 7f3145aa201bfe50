//! Featherweight Go syntax trees.

use std::fmt;

use crate::diag::Span;

/// Whether the int/bool primitive extension is enabled.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Core,
    Ext,
}

impl Mode {
    pub fn is_ext(self) -> bool {
        self == Mode::Ext
    }
}

pub const INT_TYPE: &str = "int";
pub const BOOL_TYPE: &str = "bool";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Ident {
        Ident {
            name: name.into(),
            span: Span::default(),
        }
    }

    pub fn spanned(name: impl Into<String>, span: Span) -> Ident {
        Ident {
            name: name.into(),
            span,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A `name type` pair: struct fields, method parameters and receivers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub name: Ident,
    pub ty: Ident,
}

impl Binder {
    pub fn new(name: &str, ty: &str) -> Binder {
        Binder {
            name: Ident::new(name),
            ty: Ident::new(ty),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub params: Vec<Binder>,
    pub ret: Ident,
}

impl Signature {
    /// Signature equality with or without parameter names.
    pub fn matches(&self, other: &Signature, compare_names: bool) -> bool {
        self.params.len() == other.params.len()
            && self.ret.name == other.ret.name
            && self.params.iter().zip(&other.params).all(|(a, b)| {
                a.ty.name == b.ty.name && (!compare_names || a.name.name == b.name.name)
            })
    }
}

/// `m(x t, ...) t`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MethodSpec {
    pub name: Ident,
    pub sig: Signature,
}

impl MethodSpec {
    pub fn matches(&self, other: &MethodSpec, compare_names: bool) -> bool {
        self.name.name == other.name.name && self.sig.matches(&other.sig, compare_names)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeLit {
    Struct(Vec<Binder>),
    Interface(Vec<MethodSpec>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeDecl {
    pub name: Ident,
    pub lit: TypeLit,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MethodDecl {
    pub recv: Binder,
    pub spec: MethodSpec,
    pub body: Expr,
    pub span: Span,
}

impl MethodDecl {
    pub fn name(&self) -> &str {
        &self.spec.name.name
    }

    pub fn recv_type(&self) -> &str {
        &self.recv.ty.name
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Decl {
    Type(TypeDecl),
    Method(MethodDecl),
}

impl Decl {
    pub fn span(&self) -> Span {
        match self {
            Decl::Type(t) => t.span,
            Decl::Method(m) => m.span,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Eq,
    Lt,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Eq => "==",
            BinOp::Lt => "<",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Lt => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Var(String),
    Call {
        recv: Box<Expr>,
        method: Ident,
        args: Vec<Expr>,
    },
    StructLit {
        ty: Ident,
        args: Vec<Expr>,
    },
    Select {
        recv: Box<Expr>,
        field: Ident,
    },
    Assert {
        recv: Box<Expr>,
        ty: Ident,
    },
    Int(i64),
    Bool(bool),
    Bin {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl Expr {
    pub fn new(kind: ExprKind) -> Expr {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn var(name: &str) -> Expr {
        Expr::new(ExprKind::Var(name.to_string()))
    }

    pub fn lit(ty: &str, args: Vec<Expr>) -> Expr {
        Expr::new(ExprKind::StructLit {
            ty: Ident::new(ty),
            args,
        })
    }

    pub fn call(recv: Expr, method: &str, args: Vec<Expr>) -> Expr {
        Expr::new(ExprKind::Call {
            recv: Box::new(recv),
            method: Ident::new(method),
            args,
        })
    }

    pub fn select(recv: Expr, field: &str) -> Expr {
        Expr::new(ExprKind::Select {
            recv: Box::new(recv),
            field: Ident::new(field),
        })
    }

    pub fn assert(recv: Expr, ty: &str) -> Expr {
        Expr::new(ExprKind::Assert {
            recv: Box::new(recv),
            ty: Ident::new(ty),
        })
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::new(ExprKind::Bin {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        })
    }

    /// True for `t_S{v...}` with value arguments, and for primitive literals.
    pub fn is_value(&self) -> bool {
        match &self.kind {
            ExprKind::StructLit { args, .. } => args.iter().all(Expr::is_value),
            ExprKind::Int(_) | ExprKind::Bool(_) => true,
            _ => false,
        }
    }

    pub fn is_extension(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Bin { .. }
        )
    }

    /// Immediate subexpressions, left to right.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Var(_) | ExprKind::Int(_) | ExprKind::Bool(_) => vec![],
            ExprKind::Call { recv, args, .. } => {
                let mut v = vec![&**recv];
                v.extend(args.iter());
                v
            }
            ExprKind::StructLit { args, .. } => args.iter().collect(),
            ExprKind::Select { recv, .. } | ExprKind::Assert { recv, .. } => vec![&**recv],
            ExprKind::Bin { lhs, rhs, .. } => vec![&**lhs, &**rhs],
        }
    }

    /// Pre-order visit of every node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Replaces free occurrences of variables by the given expressions.
    /// FG expressions have no binders, so this is plain replacement.
    pub fn subst(&self, map: &[(&str, &Expr)]) -> Expr {
        let kind = match &self.kind {
            ExprKind::Var(x) => {
                return match map.iter().find(|(y, _)| y == x) {
                    Some((_, e)) => (*e).clone(),
                    None => self.clone(),
                }
            }
            ExprKind::Call { recv, method, args } => ExprKind::Call {
                recv: Box::new(recv.subst(map)),
                method: method.clone(),
                args: args.iter().map(|a| a.subst(map)).collect(),
            },
            ExprKind::StructLit { ty, args } => ExprKind::StructLit {
                ty: ty.clone(),
                args: args.iter().map(|a| a.subst(map)).collect(),
            },
            ExprKind::Select { recv, field } => ExprKind::Select {
                recv: Box::new(recv.subst(map)),
                field: field.clone(),
            },
            ExprKind::Assert { recv, ty } => ExprKind::Assert {
                recv: Box::new(recv.subst(map)),
                ty: ty.clone(),
            },
            ExprKind::Int(_) | ExprKind::Bool(_) => return self.clone(),
            ExprKind::Bin { op, lhs, rhs } => ExprKind::Bin {
                op: *op,
                lhs: Box::new(lhs.subst(map)),
                rhs: Box::new(rhs.subst(map)),
            },
        };
        Expr {
            kind,
            span: self.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Program {
    pub mode: Mode,
    pub decls: Vec<Decl>,
    pub main: Expr,
}

impl Program {
    pub fn new(mode: Mode, decls: Vec<Decl>, main: Expr) -> Program {
        Program { mode, decls, main }
    }

    pub fn methods(&self) -> impl Iterator<Item = &MethodDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Method(m) => Some(m),
            Decl::Type(_) => None,
        })
    }

    pub fn types(&self) -> impl Iterator<Item = &TypeDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Type(t) => Some(t),
            Decl::Method(_) => None,
        })
    }
}

/// A run-time FG value `t_S{v...}`, plus primitive values in extension mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Struct(String, Vec<Value>),
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn to_expr(&self) -> Expr {
        match self {
            Value::Struct(t, vs) => Expr::lit(t, vs.iter().map(Value::to_expr).collect()),
            Value::Int(n) => Expr::new(ExprKind::Int(*n)),
            Value::Bool(b) => Expr::new(ExprKind::Bool(*b)),
        }
    }

    /// Converts an expression that [`Expr::is_value`] accepts.
    pub fn from_expr(e: &Expr) -> Option<Value> {
        match &e.kind {
            ExprKind::StructLit { ty, args } => Some(Value::Struct(
                ty.name.clone(),
                args.iter().map(Value::from_expr).collect::<Option<_>>()?,
            )),
            ExprKind::Int(n) => Some(Value::Int(*n)),
            ExprKind::Bool(b) => Some(Value::Bool(*b)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Struct(t, vs) => {
                write!(f, "{t}{{")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}
