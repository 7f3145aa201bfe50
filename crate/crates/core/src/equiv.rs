//! Fuel-bounded relation between FG and TL values, and the differential
//! runner built on it.

use std::fmt;

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::diag::Diagnostic;
use crate::fg::{self, Decls, TypeKind};
use crate::tl::{self, Ctor, MethodSubst};
use crate::translate::{self, translate_program, Names, Options, Translation};

pub const DEFAULT_EVAL_FUEL: usize = 100_000;
pub const DEFAULT_REL_FUEL: usize = 64;

/// Decides relatedness of an FG value and a TL value at a type, given a
/// step index. Dictionary slots are related when they are exactly the method
/// variable that method lookup selects for the underlying struct.
pub struct Relation<'d> {
    decls: &'d Decls,
    names: Names,
}

impl<'d> Relation<'d> {
    pub fn new(decls: &'d Decls) -> Relation<'d> {
        Relation {
            decls,
            names: Names::new(decls),
        }
    }

    pub fn decls(&self) -> &'d Decls {
        self.decls
    }

    pub fn related(&self, t: &str, v: &fg::Value, tv: &tl::Value, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        let d = self.decls;
        match (d.kind(t), v, tv) {
            (Some(TypeKind::Int), fg::Value::Int(a), tl::Value::Int(b)) => a == b,
            (Some(TypeKind::Bool), fg::Value::Bool(a), tl::Value::Bool(b)) => a == b,
            (
                Some(TypeKind::Struct),
                fg::Value::Struct(s, vs),
                tl::Value::Con(Ctor::Named(c), tvs),
            ) => {
                let Some(fields) = d.struct_fields(t) else {
                    return false;
                };
                s == t
                    && c == t
                    && vs.len() == fields.len()
                    && tvs.len() == fields.len()
                    && fields
                        .iter()
                        .zip(vs.iter().zip(tvs))
                        .all(|(f, (a, b))| self.related(f.ty.as_str(), a, b, k))
            }
            (
                Some(TypeKind::Interface),
                fg::Value::Struct(s, _),
                tl::Value::Con(Ctor::Named(c), parts),
            ) => {
                let specs = d.interface_specs(t).unwrap_or(&[]);
                if c != t || parts.len() != specs.len() + 1 || !d.subtype(s, t) {
                    return false;
                }
                let tl::Value::Con(Ctor::Named(u), _) = &parts[0] else {
                    return false;
                };
                if u != s || !self.related(s, v, &parts[0], k - 1) {
                    return false;
                }
                specs.iter().zip(&parts[1..]).all(|(spec, slot)| {
                    let m = spec.name.as_str();
                    d.method_lookup(m, s).is_ok()
                        && matches!((slot, self.names.method(m, s)), (tl::Value::Method(y), Some(want)) if y == want)
                })
            }
            _ => false,
        }
    }
}

pub fn values_related(decls: &Decls, t: &str, v: &fg::Value, tv: &tl::Value, k: usize) -> bool {
    Relation::new(decls).related(t, v, tv, k)
}

/// Every method binding of `prog` is exactly what the translator emits for
/// the corresponding declaration.
pub fn methods_related(decls: &Decls, prog: &tl::Program, opts: &Options) -> bool {
    let Ok(mu) = MethodSubst::from_program(prog) else {
        return false;
    };
    decls
        .method_decls()
        .all(|m| match translate::translate_method(decls, m, opts) {
            Ok(b) => mu.get(&b.name) == Some(&b.body),
            Err(_) => false,
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Fg,
    Tl,
    Both,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Fg => "fg",
            Side::Tl => "tl",
            Side::Both => "both",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Agree {
        fg: fg::Value,
        tl: tl::Value,
    },
    BothStuck {
        fg: fg::StuckReason,
        tl: tl::StuckReason,
    },
    Disagree(String),
    Budget(Side),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Agree { .. } => "agree",
            Verdict::BothStuck { .. } => "both-stuck",
            Verdict::Disagree(_) => "disagree",
            Verdict::Budget(_) => "budget",
        }
    }

    pub fn detail(&self) -> String {
        match self {
            Verdict::Agree { fg, tl } => format!("fg={fg} tl={tl}"),
            Verdict::BothStuck { fg, tl } => format!("fg {fg}; tl {tl}"),
            Verdict::Disagree(d) => d.clone(),
            Verdict::Budget(side) => format!("out of fuel on {}", side.as_str()),
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Agree { .. } | Verdict::BothStuck { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name(), self.detail())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffConfig {
    pub eval_fuel: usize,
    pub rel_fuel: usize,
    pub options: Options,
}

impl Default for DiffConfig {
    fn default() -> DiffConfig {
        DiffConfig {
            eval_fuel: DEFAULT_EVAL_FUEL,
            rel_fuel: DEFAULT_REL_FUEL,
            options: Options::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiffReport {
    pub verdict: Verdict,
    pub main_type: String,
    pub fg_outcome: fg::Outcome,
    pub tl_outcome: tl::Outcome,
    pub eval_fuel: usize,
    pub rel_fuel: usize,
    pub program_hash: String,
    pub translation: Translation,
}

impl DiffReport {
    pub fn to_json(&self, seed: Option<u64>) -> serde_json::Value {
        json!({
            "v": 1,
            "program-hash": self.program_hash,
            "verdict": self.verdict.name(),
            "detail": self.verdict.detail(),
            "fg-steps": self.fg_outcome.steps(),
            "tl-steps": self.tl_outcome.steps(),
            "fuel": self.eval_fuel,
            "rel-fuel": self.rel_fuel,
            "seed": seed,
        })
    }
}

/// SHA-256 of the canonical printing of `p`, in hex.
pub fn program_hash(p: &fg::Program) -> String {
    hex::encode(Sha256::digest(fg::print_program(p).as_bytes()))
}

/// Runs `p` under the FG semantics and its translation under the TL
/// semantics, and relates the results at the type of `main`.
pub fn diff_run(p: &fg::Program, cfg: &DiffConfig) -> Result<DiffReport, Vec<Diagnostic>> {
    let translation = translate_program(p, &cfg.options)?;
    let decls = Decls::of_program(p);
    let fg_outcome = fg::fg_eval(&decls, &p.main, cfg.eval_fuel);
    let tl_outcome = match tl::run_program(&translation.program, cfg.eval_fuel) {
        Ok(o) => o,
        Err(e) => tl::Outcome::Stuck(tl::StuckReason::UnboundMethod(e.to_string()), 0),
    };
    let verdict = classify(
        &Relation::new(&decls),
        &translation.main_type,
        &fg_outcome,
        &tl_outcome,
        cfg.rel_fuel,
    );
    Ok(DiffReport {
        verdict,
        main_type: translation.main_type.clone(),
        fg_outcome,
        tl_outcome,
        eval_fuel: cfg.eval_fuel,
        rel_fuel: cfg.rel_fuel,
        program_hash: program_hash(p),
        translation,
    })
}

fn classify(rel: &Relation, t: &str, fo: &fg::Outcome, to: &tl::Outcome, k: usize) -> Verdict {
    use fg::Outcome as F;
    use tl::Outcome as T;
    match (fo, to) {
        (F::OutOfFuel, T::OutOfFuel) => Verdict::Budget(Side::Both),
        (F::OutOfFuel, _) => Verdict::Budget(Side::Fg),
        (_, T::OutOfFuel) => Verdict::Budget(Side::Tl),
        (F::Value(v, _), T::Value(tv, _)) => {
            if rel.related(t, v, tv, k) {
                Verdict::Agree {
                    fg: v.clone(),
                    tl: tv.clone(),
                }
            } else {
                Verdict::Disagree(format!("values unrelated at {t}: fg={v} tl={tv}"))
            }
        }
        (F::Stuck(a, _), T::Stuck(b, _)) => {
            if matches!(a, fg::StuckReason::AssertFailure { .. })
                && matches!(b, tl::StuckReason::MatchFailure { .. })
            {
                Verdict::BothStuck {
                    fg: a.clone(),
                    tl: b.clone(),
                }
            } else {
                Verdict::Disagree(format!("unexpected stuck states: fg {a}; tl {b}"))
            }
        }
        (F::Value(v, _), T::Stuck(b, _)) => {
            Verdict::Disagree(format!("fg value {v}, tl stuck ({b})"))
        }
        (F::Stuck(a, _), T::Value(tv, _)) => {
            Verdict::Disagree(format!("fg stuck ({a}), tl value {tv}"))
        }
    }
}

/// A related pair of values at an FG type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub ty: String,
    pub fg: fg::Value,
    pub tl: tl::Value,
}

/// Collects `(t, v, V)` and, recursively, the pairs at its struct fields and
/// underlying interface values.
pub fn harvest(decls: &Decls, t: &str, v: &fg::Value, tv: &tl::Value, out: &mut Vec<Sample>) {
    out.push(Sample {
        ty: t.to_string(),
        fg: v.clone(),
        tl: tv.clone(),
    });
    match (decls.kind(t), v, tv) {
        (Some(TypeKind::Struct), fg::Value::Struct(_, vs), tl::Value::Con(_, tvs)) => {
            if let Some(fields) = decls.struct_fields(t) {
                for (f, (a, b)) in fields.iter().zip(vs.iter().zip(tvs)) {
                    harvest(decls, f.ty.as_str(), a, b, out);
                }
            }
        }
        (Some(TypeKind::Interface), fg::Value::Struct(s, _), tl::Value::Con(_, parts))
            if !parts.is_empty() =>
        {
            harvest(decls, s, v, &parts[0], out);
        }
        _ => {}
    }
}

/// A sample related at index `k` but not at some smaller index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub sample: Sample,
    pub k: usize,
    pub smaller: usize,
}

/// Checks, for every sample and every `k <= max_k`, that relatedness at `k`
/// implies relatedness at all `k' <= k`.
pub fn monotonicity_check(
    rel: &Relation,
    samples: &[Sample],
    max_k: usize,
) -> Vec<MonotonicityViolation> {
    let mut out = Vec::new();
    for s in samples {
        let r: Vec<bool> = (0..=max_k)
            .map(|k| rel.related(&s.ty, &s.fg, &s.tl, k))
            .collect();
        for k in 0..=max_k {
            if let Some(smaller) = (0..k).find(|&j| r[k] && !r[j]) {
                out.push(MonotonicityViolation {
                    sample: s.clone(),
                    k,
                    smaller,
                });
                break;
            }
        }
    }
    out
}

/// Result of applying an inline upcast to a related pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CastCheck {
    pub from: String,
    pub to: String,
    /// TL axiom steps taken by the cast application; `None` when the TL side
    /// did not produce a value.
    pub tl_steps: Option<usize>,
    pub preserved: bool,
}

/// Applies `build_upcast(t, u)` to `V` and checks the result is related to
/// `v` at `u` with index `k - steps`.
pub fn check_upcast(rel: &Relation, mu: &MethodSubst, s: &Sample, u: &str, k: usize) -> CastCheck {
    let up = translate::build_upcast(rel.decls, &s.ty, u);
    let e = tl::Expr::app(up, s.tl.to_expr());
    let (tl_steps, preserved) = match tl::tl_eval(mu, &e, DEFAULT_EVAL_FUEL) {
        tl::Outcome::Value(tv, n) => (Some(n), rel.related(u, &s.fg, &tv, k.saturating_sub(n))),
        _ => (None, false),
    };
    CastCheck {
        from: s.ty.clone(),
        to: u.to_string(),
        tl_steps,
        preserved,
    }
}

/// Runs the FG assertion `v.(u)` against the TL destructor from interface
/// `s.ty` applied to `V`. Both must succeed with related results, or both
/// must be stuck.
pub fn check_downcast(
    rel: &Relation,
    mu: &MethodSubst,
    s: &Sample,
    u: &str,
    k: usize,
) -> CastCheck {
    let down = match translate::build_downcast(rel.decls, &s.ty, u) {
        Ok(e) => e,
        Err(_) => {
            return CastCheck {
                from: s.ty.clone(),
                to: u.to_string(),
                tl_steps: None,
                preserved: false,
            }
        }
    };
    let fe = fg::Expr::assert(s.fg.to_expr(), u);
    let fo = fg::fg_eval(rel.decls, &fe, DEFAULT_EVAL_FUEL);
    let to = tl::tl_eval(mu, &tl::Expr::app(down, s.tl.to_expr()), DEFAULT_EVAL_FUEL);
    let (tl_steps, preserved) = match (fo, to) {
        (fg::Outcome::Value(v, _), tl::Outcome::Value(tv, n)) => {
            (Some(n), rel.related(u, &v, &tv, k.saturating_sub(n)))
        }
        (fg::Outcome::Stuck(..), tl::Outcome::Stuck(..)) => (None, true),
        _ => (None, false),
    };
    CastCheck {
        from: s.ty.clone(),
        to: u.to_string(),
        tl_steps,
        preserved,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg::{parse_program, Mode};

    const SRC: &str = "
        type Eq interface { eq(that Eq) bool }
        type Int struct { val int }
        type Pair struct { left Eq; right Eq }
        func (this Int) eq(that Eq) bool { return this.val == that.(Int).val }
        func (this Pair) eq(that Eq) bool { return this.left.eq(that.(Pair).left) }
        func main() { _ = Int{1} }";

    fn decls() -> Decls {
        Decls::of_program(&parse_program(SRC, Mode::Ext).unwrap())
    }

    fn int(n: i64) -> (fg::Value, tl::Value) {
        (
            fg::Value::Struct("Int".into(), vec![fg::Value::Int(n)]),
            tl::Value::Con(Ctor::named("Int"), vec![tl::Value::Int(n)]),
        )
    }

    fn eq_value(inner: tl::Value, slot: &str) -> tl::Value {
        tl::Value::Con(
            Ctor::named("Eq"),
            vec![inner, tl::Value::Method(slot.into())],
        )
    }

    #[test]
    fn interface_values() {
        let d = decls();
        let (v, tv) = int(1);
        assert!(values_related(
            &d,
            "Eq",
            &v,
            &eq_value(tv.clone(), "eq_Int"),
            64
        ));
        assert!(!values_related(
            &d,
            "Eq",
            &v,
            &eq_value(tv.clone(), "eq_Pair"),
            64
        ));
        assert!(values_related(
            &d,
            "Eq",
            &v,
            &eq_value(tv.clone(), "eq_Pair"),
            0
        ));
        let (_, tv2) = int(2);
        assert!(!values_related(&d, "Eq", &v, &eq_value(tv2, "eq_Int"), 64));
        assert!(values_related(&d, "Int", &v, &tv, 1));
        assert!(!values_related(&d, "Pair", &v, &tv, 1));
    }

    #[test]
    fn diff_and_methods() {
        let p = parse_program(SRC, Mode::Ext).unwrap();
        let r = diff_run(&p, &DiffConfig::default()).unwrap();
        assert_eq!(r.verdict.name(), "agree");
        assert_eq!(r.fg_outcome.steps(), Some(0));
        let d = decls();
        let mut prog = r.translation.program.clone();
        assert!(methods_related(&d, &prog, &Options::default()));
        prog.bindings[0].body = tl::Expr::lam("x", tl::Expr::var("x"));
        assert!(!methods_related(&d, &prog, &Options::default()));
        let json = r.to_json(Some(7));
        assert_eq!(json["v"], 1);
        assert_eq!(json["program-hash"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn both_stuck() {
        let src = "
            type I interface {}
            type A struct {}
            type B struct {}
            type W struct { i I }
            func main() { _ = W{A{}}.i.(B) }";
        let p = parse_program(src, Mode::Core).unwrap();
        let r = diff_run(&p, &DiffConfig::default()).unwrap();
        assert_eq!(r.verdict.name(), "both-stuck", "{}", r.verdict);
    }

    #[test]
    fn casts_preserve() {
        let d = decls();
        let rel = Relation::new(&d);
        let (v, tv) = int(3);
        let s = Sample {
            ty: "Int".into(),
            fg: v.clone(),
            tl: tv.clone(),
        };
        let mu = MethodSubst::default();
        let up = check_upcast(&rel, &mu, &s, "Eq", 64);
        assert_eq!((up.tl_steps, up.preserved), (Some(1), true));
        let s = Sample {
            ty: "Eq".into(),
            fg: v,
            tl: eq_value(tv, "eq_Int"),
        };
        let down = check_downcast(&rel, &mu, &s, "Int", 64);
        assert_eq!((down.tl_steps, down.preserved), (Some(3), true));
        let down = check_downcast(&rel, &mu, &s, "Pair", 64);
        assert_eq!((down.tl_steps, down.preserved), (None, true));
    }
}
