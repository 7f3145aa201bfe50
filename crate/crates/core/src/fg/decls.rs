//! Declaration tables: method sets, structural subtyping and method lookup.

use std::collections::HashMap;

use thiserror::Error;

use super::ast::{
    Binder, Decl, MethodDecl, MethodSpec, Mode, Program, TypeLit, BOOL_TYPE, INT_TYPE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeKind {
    Struct,
    Interface,
    Int,
    Bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("no method `{method}` for receiver type `{recv}`")]
    NoSuchMethod { method: String, recv: String },
}

/// Indexed view of a program's declarations.
///
/// Duplicate declarations are tolerated here (the first one wins); they are
/// reported by the well-formedness checker.
#[derive(Clone, Debug)]
pub struct Decls {
    decls: Vec<Decl>,
    mode: Mode,
    types: HashMap<String, usize>,
    methods: HashMap<(String, String), usize>,
    by_recv: HashMap<String, Vec<usize>>,
    /// Whether parameter names take part in the superset check of subtyping.
    pub compare_param_names: bool,
}

impl Decls {
    pub fn new(decls: Vec<Decl>, mode: Mode) -> Decls {
        let mut types = HashMap::new();
        let mut methods = HashMap::new();
        let mut by_recv: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, d) in decls.iter().enumerate() {
            match d {
                Decl::Type(t) => {
                    types.entry(t.name.name.clone()).or_insert(i);
                }
                Decl::Method(m) => {
                    let key = (m.recv_type().to_string(), m.name().to_string());
                    if let std::collections::hash_map::Entry::Vacant(e) = methods.entry(key) {
                        e.insert(i);
                        by_recv
                            .entry(m.recv_type().to_string())
                            .or_default()
                            .push(i);
                    }
                }
            }
        }
        Decls {
            decls,
            mode,
            types,
            methods,
            by_recv,
            compare_param_names: false,
        }
    }

    pub fn of_program(p: &Program) -> Decls {
        Decls::new(p.decls.clone(), p.mode)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn decls(&self) -> &[Decl] {
        &self.decls
    }

    pub fn kind(&self, t: &str) -> Option<TypeKind> {
        if self.mode.is_ext() {
            if t == INT_TYPE {
                return Some(TypeKind::Int);
            }
            if t == BOOL_TYPE {
                return Some(TypeKind::Bool);
            }
        }
        let i = *self.types.get(t)?;
        match &self.decls[i] {
            Decl::Type(td) => Some(match td.lit {
                TypeLit::Struct(_) => TypeKind::Struct,
                TypeLit::Interface(_) => TypeKind::Interface,
            }),
            Decl::Method(_) => unreachable!(),
        }
    }

    pub fn is_declared(&self, t: &str) -> bool {
        self.kind(t).is_some()
    }

    pub fn is_struct(&self, t: &str) -> bool {
        self.kind(t) == Some(TypeKind::Struct)
    }

    pub fn is_interface(&self, t: &str) -> bool {
        self.kind(t) == Some(TypeKind::Interface)
    }

    fn type_lit(&self, t: &str) -> Option<&TypeLit> {
        match &self.decls[*self.types.get(t)?] {
            Decl::Type(td) => Some(&td.lit),
            Decl::Method(_) => None,
        }
    }

    pub fn struct_fields(&self, t: &str) -> Option<&[Binder]> {
        match self.type_lit(t)? {
            TypeLit::Struct(fs) => Some(fs),
            TypeLit::Interface(_) => None,
        }
    }

    pub fn interface_specs(&self, t: &str) -> Option<&[MethodSpec]> {
        match self.type_lit(t)? {
            TypeLit::Interface(ss) => Some(ss),
            TypeLit::Struct(_) => None,
        }
    }

    /// Struct names in declaration order.
    pub fn structs(&self) -> impl Iterator<Item = &str> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Type(td) if matches!(td.lit, TypeLit::Struct(_)) => Some(td.name.as_str()),
            _ => None,
        })
    }

    /// Interface names in declaration order.
    pub fn interfaces(&self) -> impl Iterator<Item = &str> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Type(td) if matches!(td.lit, TypeLit::Interface(_)) => Some(td.name.as_str()),
            _ => None,
        })
    }

    /// Method declarations in declaration order.
    pub fn method_decls(&self) -> impl Iterator<Item = &MethodDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Method(m) => Some(m),
            Decl::Type(_) => None,
        })
    }

    /// The method set of `t`: declaration order for structs, spec order for
    /// interfaces. Primitive types have no methods.
    pub fn methods(&self, t: &str) -> Result<Vec<&MethodSpec>, LookupError> {
        match self.kind(t) {
            None => Err(LookupError::UnknownType(t.to_string())),
            Some(TypeKind::Int | TypeKind::Bool) => Ok(vec![]),
            Some(TypeKind::Interface) => Ok(self.interface_specs(t).unwrap().iter().collect()),
            Some(TypeKind::Struct) => Ok(self
                .by_recv
                .get(t)
                .map(|ixs| {
                    ixs.iter()
                        .map(|&i| match &self.decls[i] {
                            Decl::Method(m) => &m.spec,
                            Decl::Type(_) => unreachable!(),
                        })
                        .collect()
                })
                .unwrap_or_default()),
        }
    }

    /// Finds the spec named `m` in the method set of `t`.
    pub fn find_method(&self, t: &str, m: &str) -> Option<(usize, &MethodSpec)> {
        self.methods(t)
            .ok()?
            .into_iter()
            .enumerate()
            .find(|(_, s)| s.name.name == m)
    }

    /// `D ⊢ t <: u`: reflexive on structs and primitives; otherwise `u` must
    /// be an interface whose specs are all contained in the method set of `t`.
    pub fn is_subtype(&self, t: &str, u: &str) -> Result<bool, LookupError> {
        let tk = self
            .kind(t)
            .ok_or_else(|| LookupError::UnknownType(t.to_string()))?;
        let uk = self
            .kind(u)
            .ok_or_else(|| LookupError::UnknownType(u.to_string()))?;
        if uk != TypeKind::Interface {
            return Ok(t == u && tk == uk);
        }
        if matches!(tk, TypeKind::Int | TypeKind::Bool) {
            return Ok(false);
        }
        let have = self.methods(t)?;
        let want = self.interface_specs(u).unwrap();
        Ok(want
            .iter()
            .all(|w| have.iter().any(|h| h.matches(w, self.compare_param_names))))
    }

    /// Convenience wrapper treating unknown types as "not a subtype".
    pub fn subtype(&self, t: &str, u: &str) -> bool {
        self.is_subtype(t, u).unwrap_or(false)
    }

    /// The unique declaration of method `m` on struct `t`.
    pub fn method_lookup(&self, m: &str, t: &str) -> Result<&MethodDecl, LookupError> {
        match self.methods.get(&(t.to_string(), m.to_string())) {
            Some(&i) => match &self.decls[i] {
                Decl::Method(md) => Ok(md),
                Decl::Type(_) => unreachable!(),
            },
            None => Err(LookupError::NoSuchMethod {
                method: m.to_string(),
                recv: t.to_string(),
            }),
        }
    }

    /// `π`: for each spec of interface `to`, the position of the matching
    /// spec in interface `from`. Requires `from <: to`.
    pub fn permutation(&self, from: &str, to: &str) -> Option<Vec<usize>> {
        let have = self.interface_specs(from)?;
        let want = self.interface_specs(to)?;
        want.iter()
            .map(|w| {
                have.iter()
                    .position(|h| h.matches(w, self.compare_param_names))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg::parser::parse_program;

    const EQ_ORD: &str = r#"
        type Eq interface { eq(that Eq) bool }
        type Ord interface { eq(that Eq) bool; lt(that Ord) bool }
        type Int struct { val int }
        func (this Int) eq(that Eq) bool { return this.val == that.(Int).val }
        func (this Int) lt(that Ord) bool { return this.val < that.(Int).val || this.eq(that) }
        type Unit struct {}
        func main() { _ = Unit{} }
    "#;

    fn decls(src: &str, mode: Mode) -> Decls {
        Decls::of_program(&parse_program(src, mode).unwrap())
    }

    #[test]
    fn methods_of_struct_and_interface() {
        let d = decls(EQ_ORD, Mode::Ext);
        let names = |t| {
            d.methods(t)
                .unwrap()
                .iter()
                .map(|s| s.name.name.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(names("Eq"), ["eq"]);
        assert_eq!(names("Int"), ["eq", "lt"]);
        assert_eq!(names("Ord"), ["eq", "lt"]);
        assert!(names("Unit").is_empty());
        assert_eq!(
            d.methods("Nope"),
            Err(LookupError::UnknownType("Nope".into()))
        );
    }

    #[test]
    fn subtyping() {
        let d = decls(EQ_ORD, Mode::Ext);
        assert!(d.is_subtype("Int", "Eq").unwrap());
        assert!(d.is_subtype("Int", "Ord").unwrap());
        assert!(d.is_subtype("Ord", "Eq").unwrap());
        assert!(!d.is_subtype("Eq", "Ord").unwrap());
        assert!(d.is_subtype("Unit", "Unit").unwrap());
        assert!(!d.is_subtype("Unit", "Int").unwrap());
        assert!(!d.is_subtype("Unit", "Eq").unwrap());
        assert!(!d.is_subtype("Eq", "Int").unwrap());
        assert!(d.is_subtype("int", "int").unwrap());
        assert!(d.is_subtype("Eq", "Eq").unwrap());
        assert!(d.is_subtype("Int", "Nope").is_err());
    }

    #[test]
    fn param_names_flag() {
        let src = r#"
            type I interface { m(a T) T }
            type T struct {}
            func (x T) m(b T) T { return b }
            func main() { _ = T{} }
        "#;
        let mut d = decls(src, Mode::Core);
        assert!(d.subtype("T", "I"));
        d.compare_param_names = true;
        assert!(!d.subtype("T", "I"));
    }

    #[test]
    fn lookup() {
        let d = decls(EQ_ORD, Mode::Ext);
        let m = d.method_lookup("lt", "Int").unwrap();
        assert_eq!(m.recv.name.name, "this");
        assert_eq!(m.spec.sig.params[0].ty.name, "Ord");
        assert!(matches!(
            d.method_lookup("lt", "Unit"),
            Err(LookupError::NoSuchMethod { .. })
        ));
    }

    #[test]
    fn permutation_matches_by_spec() {
        let d = decls(EQ_ORD, Mode::Ext);
        assert_eq!(d.permutation("Ord", "Eq"), Some(vec![0]));
        assert_eq!(d.permutation("Ord", "Ord"), Some(vec![0, 1]));
        assert_eq!(d.permutation("Eq", "Ord"), None);
    }
}
