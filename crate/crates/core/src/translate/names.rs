//! Naming of generated TL method variables and variables.
//!
//! Method `m` on struct `T` becomes `m_T`, the upcast from `t` to interface
//! `U` becomes `toU_t` and the downcast from interface `I` to `u` becomes
//! `fromI_u`. Clashes (for instance `a_b` on `C` against `a` on `b_C`) are
//! resolved by appending `'` in a fixed order: methods in declaration order,
//! then upcasts, then downcasts.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::fg::Decls;

#[derive(Clone, Debug, Default)]
pub struct Names {
    methods: HashMap<(String, String), String>,
    upcasts: BTreeMap<(String, String), String>,
    downcasts: BTreeMap<(String, String), String>,
}

const TL_KEYWORDS: [&str; 6] = ["let", "in", "case", "of", "true", "false"];

impl Names {
    pub fn new(decls: &Decls) -> Names {
        let mut taken = HashSet::new();
        let mut claim = |candidate: String| {
            let mut name = if candidate.starts_with("K_") {
                format!("_{candidate}")
            } else {
                candidate
            };
            while !taken.insert(name.clone()) {
                name.push('\'');
            }
            name
        };
        let mut names = Names::default();
        for m in decls.method_decls() {
            let key = (m.name().to_string(), m.recv_type().to_string());
            if let std::collections::hash_map::Entry::Vacant(e) = names.methods.entry(key) {
                let n = claim(format!("{}_{}", e.key().0, e.key().1));
                e.insert(n);
            }
        }
        let types: Vec<&str> = decls.structs().chain(decls.interfaces()).collect();
        let ifaces: Vec<&str> = decls.interfaces().collect();
        for &u in &ifaces {
            for &t in &types {
                if decls.subtype(t, u) {
                    let n = claim(format!("to{u}_{t}"));
                    names.upcasts.insert((t.to_string(), u.to_string()), n);
                }
            }
        }
        for &i in &ifaces {
            for &u in &types {
                let n = claim(format!("from{i}_{u}"));
                names.downcasts.insert((i.to_string(), u.to_string()), n);
            }
        }
        names
    }

    /// The method variable for method `m` on struct `t`.
    pub fn method(&self, m: &str, t: &str) -> Option<&str> {
        self.methods
            .get(&(m.to_string(), t.to_string()))
            .map(String::as_str)
    }

    /// Name of the hoisted upcast from `t` to interface `u`.
    pub fn upcast(&self, t: &str, u: &str) -> Option<&str> {
        self.upcasts
            .get(&(t.to_string(), u.to_string()))
            .map(String::as_str)
    }

    /// Name of the hoisted downcast from interface `i` to `u`.
    pub fn downcast(&self, i: &str, u: &str) -> Option<&str> {
        self.downcasts
            .get(&(i.to_string(), u.to_string()))
            .map(String::as_str)
    }
}

/// The TL variable standing for FG variable `x`. FG identifiers never contain
/// `'`, so the renamed form cannot clash with another source variable.
pub fn var(x: &str) -> String {
    if TL_KEYWORDS.contains(&x) || x.starts_with("K_") {
        format!("{x}'v")
    } else {
        x.to_string()
    }
}

/// Generates `prefix'N` names, which never collide with source variables.
#[derive(Clone, Debug, Default)]
pub struct FreshNamer {
    next: usize,
}

impl FreshNamer {
    pub fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}'{}", self.next)
    }

    pub fn reset(&mut self) {
        self.next = 0;
    }
}
