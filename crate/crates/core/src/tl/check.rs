//! Structural validation of TL programs: constructor arities, closedness and
//! well-formed patterns.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use super::ast::*;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("constructor {ctor} used with arity {found}, elsewhere {expected}")]
    ArityMismatch {
        ctor: String,
        expected: usize,
        found: usize,
    },
    #[error("free variable `{var}` in {site}")]
    FreeVariable { var: String, site: String },
    #[error("method variable `{name}` is not bound")]
    UnboundMethod { name: String },
    #[error("duplicate binding `{0}`")]
    DuplicateBinding(String),
    #[error("binding `{0}` is not a lambda")]
    NotALambda(String),
    #[error("pattern {pattern} binds a variable twice")]
    DuplicatePatternVar { pattern: String },
    #[error("constructor {ctor} heads more than one clause")]
    DuplicateClause { ctor: String },
    #[error("tuple arity {0} exceeds {MAX_TUPLE}")]
    TupleTooLarge(usize),
}

/// Runs every structural check and returns all violations found.
pub fn check_program(p: &Program) -> Vec<CheckError> {
    let mut errs = Vec::new();
    let mut names = HashSet::new();
    for b in &p.bindings {
        if !names.insert(b.name.as_str()) {
            errs.push(CheckError::DuplicateBinding(b.name.clone()));
        }
        if !matches!(b.body, Expr::Lam(..)) {
            errs.push(CheckError::NotALambda(b.name.clone()));
        }
    }

    let mut arities: BTreeMap<Ctor, usize> = BTreeMap::new();
    let sites = p
        .bindings
        .iter()
        .map(|b| (format!("binding `{}`", b.name), &b.body))
        .chain(std::iter::once(("main".to_string(), &p.main)));
    for (site, e) in sites {
        for x in e.free_vars() {
            errs.push(CheckError::FreeVariable {
                var: x,
                site: site.clone(),
            });
        }
        for y in e.method_vars() {
            if !names.contains(y.as_str()) {
                errs.push(CheckError::UnboundMethod { name: y });
            }
        }
        check_expr(e, &mut arities, &mut errs);
    }
    errs.dedup();
    errs
}

fn check_expr(e: &Expr, arities: &mut BTreeMap<Ctor, usize>, errs: &mut Vec<CheckError>) {
    let mut record = |k: &Ctor, n: usize, errs: &mut Vec<CheckError>| {
        if let Ctor::Tuple(m) = k {
            if *m > MAX_TUPLE {
                errs.push(CheckError::TupleTooLarge(*m));
            }
            if *m != n {
                errs.push(CheckError::ArityMismatch {
                    ctor: k.to_string(),
                    expected: *m,
                    found: n,
                });
            }
            return;
        }
        let expected = *arities.entry(k.clone()).or_insert(n);
        if expected != n {
            errs.push(CheckError::ArityMismatch {
                ctor: k.to_string(),
                expected,
                found: n,
            });
        }
    };
    e.walk(&mut |n| match n {
        Expr::Con(k, args) => record(k, args.len(), errs),
        Expr::Case(_, clauses) => {
            let mut heads = HashSet::new();
            for c in clauses {
                record(&c.pat.ctor, c.pat.vars.len(), errs);
                let distinct: HashSet<_> = c.pat.vars.iter().collect();
                if distinct.len() != c.pat.vars.len() {
                    errs.push(CheckError::DuplicatePatternVar {
                        pattern: super::print::print_pattern(&c.pat),
                    });
                }
                if !heads.insert(&c.pat.ctor) {
                    errs.push(CheckError::DuplicateClause {
                        ctor: c.pat.ctor.to_string(),
                    });
                }
            }
        }
        _ => {}
    });
}
