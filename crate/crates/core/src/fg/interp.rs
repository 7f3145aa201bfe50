//! Small-step reduction for FG with run-time method lookup.
//!
//! Only the axioms (field, call, assert, and primitive operators in extension
//! mode) cost a step; descending through evaluation contexts is free.

use std::fmt;

use serde::Serialize;

use super::ast::*;
use super::decls::Decls;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    FgField,
    FgCall,
    FgAssert,
    FgPrim,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::FgField => "fg-field",
            Rule::FgCall => "fg-call",
            Rule::FgAssert => "fg-assert",
            Rule::FgPrim => "fg-prim",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StuckReason {
    /// `t_S{..}.(t)` where `t_S` is not a subtype of `t`.
    AssertFailure {
        dynamic: String,
        asserted: String,
    },
    NoMethod {
        method: String,
        recv: String,
    },
    BadField {
        field: String,
        recv: String,
    },
    BadPrim(BinOp),
    FreeVar(String),
}

impl StuckReason {
    pub fn kind(&self) -> &'static str {
        match self {
            StuckReason::AssertFailure { .. } => "assert-failure",
            StuckReason::NoMethod { .. } => "no-method",
            StuckReason::BadField { .. } => "bad-field",
            StuckReason::BadPrim(_) => "bad-prim",
            StuckReason::FreeVar(_) => "free-var",
        }
    }
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StuckReason::AssertFailure { dynamic, asserted } => {
                write!(f, "assert-failure: {dynamic} is not a {asserted}")
            }
            StuckReason::NoMethod { method, recv } => write!(f, "no-method: {recv}.{method}"),
            StuckReason::BadField { field, recv } => write!(f, "bad-field: {recv}.{field}"),
            StuckReason::BadPrim(op) => write!(f, "bad-prim: {}", op.symbol()),
            StuckReason::FreeVar(x) => write!(f, "free-var: {x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Stepped(Expr, Rule),
    AlreadyValue,
    Stuck(StuckReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Value(Value, usize),
    Stuck(StuckReason, usize),
    OutOfFuel,
}

impl Outcome {
    pub fn steps(&self) -> Option<usize> {
        match self {
            Outcome::Value(_, n) | Outcome::Stuck(_, n) => Some(*n),
            Outcome::OutOfFuel => None,
        }
    }
}

/// Performs one reduction step on a closed expression.
pub fn fg_step(decls: &Decls, e: &Expr) -> Step {
    Stepper { decls }.step(e)
}

/// Reduces `e` for at most `fuel` axiom steps.
pub fn fg_eval(decls: &Decls, e: &Expr, fuel: usize) -> Outcome {
    fg_eval_traced(decls, e, fuel, &mut |_, _, _| {})
}

/// Like [`fg_eval`], calling `trace(n, rule, e')` after the `n`-th step.
pub fn fg_eval_traced(
    decls: &Decls,
    e: &Expr,
    fuel: usize,
    trace: &mut dyn FnMut(usize, Rule, &Expr),
) -> Outcome {
    let stepper = Stepper { decls };
    let mut cur = e.clone();
    let mut steps = 0;
    loop {
        match stepper.step(&cur) {
            Step::AlreadyValue => {
                return Outcome::Value(
                    Value::from_expr(&cur).expect("normal form is a value"),
                    steps,
                )
            }
            Step::Stuck(r) => return Outcome::Stuck(r, steps),
            Step::Stepped(next, rule) => {
                if steps == fuel {
                    return Outcome::OutOfFuel;
                }
                steps += 1;
                trace(steps, rule, &next);
                cur = next;
            }
        }
    }
}

struct Stepper<'d> {
    decls: &'d Decls,
}

enum ListStep {
    AllValues,
    Stepped(Vec<Expr>, Rule),
    Stuck(StuckReason),
}

impl Stepper<'_> {
    fn step_list(&self, es: &[Expr]) -> ListStep {
        for (i, a) in es.iter().enumerate() {
            match self.step(a) {
                Step::AlreadyValue => continue,
                Step::Stuck(r) => return ListStep::Stuck(r),
                Step::Stepped(a2, rule) => {
                    let mut out = es.to_vec();
                    out[i] = a2;
                    return ListStep::Stepped(out, rule);
                }
            }
        }
        ListStep::AllValues
    }

    fn step(&self, e: &Expr) -> Step {
        let rebuild = |kind: ExprKind, rule| Step::Stepped(Expr { kind, span: e.span }, rule);
        match &e.kind {
            ExprKind::Var(x) => Step::Stuck(StuckReason::FreeVar(x.clone())),
            ExprKind::Int(_) | ExprKind::Bool(_) => Step::AlreadyValue,
            ExprKind::StructLit { ty, args } => match self.step_list(args) {
                ListStep::AllValues => Step::AlreadyValue,
                ListStep::Stuck(r) => Step::Stuck(r),
                ListStep::Stepped(args, rule) => rebuild(
                    ExprKind::StructLit {
                        ty: ty.clone(),
                        args,
                    },
                    rule,
                ),
            },
            ExprKind::Select { recv, field } => match self.step(recv) {
                Step::Stepped(r, rule) => rebuild(
                    ExprKind::Select {
                        recv: Box::new(r),
                        field: field.clone(),
                    },
                    rule,
                ),
                Step::Stuck(r) => Step::Stuck(r),
                Step::AlreadyValue => {
                    let bad = || {
                        Step::Stuck(StuckReason::BadField {
                            field: field.name.clone(),
                            recv: recv_name(recv),
                        })
                    };
                    let ExprKind::StructLit { ty, args } = &recv.kind else {
                        return bad();
                    };
                    let Some(fields) = self.decls.struct_fields(ty.as_str()) else {
                        return bad();
                    };
                    match fields.iter().position(|f| f.name.name == field.name) {
                        Some(i) if i < args.len() => Step::Stepped(args[i].clone(), Rule::FgField),
                        _ => bad(),
                    }
                }
            },
            ExprKind::Assert { recv, ty } => match self.step(recv) {
                Step::Stepped(r, rule) => rebuild(
                    ExprKind::Assert {
                        recv: Box::new(r),
                        ty: ty.clone(),
                    },
                    rule,
                ),
                Step::Stuck(r) => Step::Stuck(r),
                Step::AlreadyValue => {
                    let dynamic = recv_name(recv);
                    let ok = matches!(recv.kind, ExprKind::StructLit { .. })
                        && self.decls.subtype(&dynamic, ty.as_str());
                    if ok {
                        Step::Stepped((**recv).clone(), Rule::FgAssert)
                    } else {
                        Step::Stuck(StuckReason::AssertFailure {
                            dynamic,
                            asserted: ty.name.clone(),
                        })
                    }
                }
            },
            ExprKind::Call { recv, method, args } => match self.step(recv) {
                Step::Stepped(r, rule) => rebuild(
                    ExprKind::Call {
                        recv: Box::new(r),
                        method: method.clone(),
                        args: args.clone(),
                    },
                    rule,
                ),
                Step::Stuck(r) => Step::Stuck(r),
                Step::AlreadyValue => match self.step_list(args) {
                    ListStep::Stuck(r) => Step::Stuck(r),
                    ListStep::Stepped(args, rule) => rebuild(
                        ExprKind::Call {
                            recv: recv.clone(),
                            method: method.clone(),
                            args,
                        },
                        rule,
                    ),
                    ListStep::AllValues => {
                        let no_method = || {
                            Step::Stuck(StuckReason::NoMethod {
                                method: method.name.clone(),
                                recv: recv_name(recv),
                            })
                        };
                        if !matches!(recv.kind, ExprKind::StructLit { .. }) {
                            return no_method();
                        }
                        let Ok(decl) = self.decls.method_lookup(method.as_str(), &recv_name(recv))
                        else {
                            return no_method();
                        };
                        if decl.spec.sig.params.len() != args.len() {
                            return no_method();
                        }
                        let mut map: Vec<(&str, &Expr)> = vec![(decl.recv.name.as_str(), &**recv)];
                        for (p, a) in decl.spec.sig.params.iter().zip(args) {
                            map.push((p.name.as_str(), a));
                        }
                        Step::Stepped(decl.body.subst(&map), Rule::FgCall)
                    }
                },
            },
            ExprKind::Bin { op, lhs, rhs } => match self.step(lhs) {
                Step::Stepped(l, rule) => rebuild(
                    ExprKind::Bin {
                        op: *op,
                        lhs: Box::new(l),
                        rhs: rhs.clone(),
                    },
                    rule,
                ),
                Step::Stuck(r) => Step::Stuck(r),
                Step::AlreadyValue => match self.step(rhs) {
                    Step::Stepped(r, rule) => rebuild(
                        ExprKind::Bin {
                            op: *op,
                            lhs: lhs.clone(),
                            rhs: Box::new(r),
                        },
                        rule,
                    ),
                    Step::Stuck(r) => Step::Stuck(r),
                    Step::AlreadyValue => match prim(*op, &lhs.kind, &rhs.kind) {
                        Some(b) => Step::Stepped(Expr::new(ExprKind::Bool(b)), Rule::FgPrim),
                        None => Step::Stuck(StuckReason::BadPrim(*op)),
                    },
                },
            },
        }
    }
}

fn recv_name(e: &Expr) -> String {
    match &e.kind {
        ExprKind::StructLit { ty, .. } => ty.name.clone(),
        ExprKind::Int(_) => INT_TYPE.to_string(),
        ExprKind::Bool(_) => BOOL_TYPE.to_string(),
        _ => "?".to_string(),
    }
}

fn prim(op: BinOp, l: &ExprKind, r: &ExprKind) -> Option<bool> {
    use ExprKind::{Bool, Int};
    Some(match (op, l, r) {
        (BinOp::Eq, Int(a), Int(b)) => a == b,
        (BinOp::Eq, Bool(a), Bool(b)) => a == b,
        (BinOp::Lt, Int(a), Int(b)) => a < b,
        (BinOp::And, Bool(a), Bool(b)) => *a && *b,
        (BinOp::Or, Bool(a), Bool(b)) => *a || *b,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg::parser::{parse_expr, parse_program};

    const SRC: &str = "
        type U struct {}
        type T struct { a U; b U }
        type W struct { u U }
        type I interface { get() U }
        func (t T) get() U { return t.b }
        func (t T) loop() T { return t.loop() }
        func main() { _ = T{U{}, U{}} }";

    fn decls() -> Decls {
        Decls::of_program(&parse_program(SRC, Mode::Core).unwrap())
    }

    fn e(s: &str) -> Expr {
        parse_expr(s, Mode::Ext).unwrap()
    }

    #[test]
    fn field_projection() {
        let src = "type U1 struct {} type U2 struct {} type T struct { a U1; b U2 } func main() { _ = U1{} }";
        let d = Decls::of_program(&parse_program(src, Mode::Core).unwrap());
        assert_eq!(
            fg_step(&d, &e("T{U1{}, U2{}}.b")),
            Step::Stepped(e("U2{}"), Rule::FgField)
        );
    }

    #[test]
    fn assert_on_struct_value() {
        let d = decls();
        assert_eq!(
            fg_step(&d, &e("U{}.(U)")),
            Step::Stepped(e("U{}"), Rule::FgAssert)
        );
        assert_eq!(
            fg_step(&d, &e("T{U{},U{}}.(I)")),
            Step::Stepped(e("T{U{},U{}}"), Rule::FgAssert)
        );
        assert_eq!(
            fg_step(&d, &e("U{}.(I)")),
            Step::Stuck(StuckReason::AssertFailure {
                dynamic: "U".into(),
                asserted: "I".into()
            })
        );
        assert_eq!(
            fg_step(&d, &e("W{U{}}.(T)")),
            Step::Stuck(StuckReason::AssertFailure {
                dynamic: "W".into(),
                asserted: "T".into()
            })
        );
    }

    #[test]
    fn stuck_kinds() {
        let d = decls();
        assert!(matches!(
            fg_step(&d, &e("U{}.f")),
            Step::Stuck(StuckReason::BadField { .. })
        ));
        assert!(matches!(
            fg_step(&d, &e("U{}.get()")),
            Step::Stuck(StuckReason::NoMethod { .. })
        ));
        assert!(matches!(
            fg_step(&d, &e("x")),
            Step::Stuck(StuckReason::FreeVar(_))
        ));
        assert!(matches!(
            fg_step(&d, &e("1 && true")),
            Step::Stuck(StuckReason::BadPrim(_))
        ));
    }

    #[test]
    fn call_substitutes_receiver() {
        let d = decls();
        assert_eq!(
            fg_step(&d, &e("T{U{}, W{U{}}.u}.get()")),
            Step::Stepped(e("T{U{}, U{}}.get()"), Rule::FgField)
        );
        assert_eq!(
            fg_step(&d, &e("T{U{}, U{}}.get()")),
            Step::Stepped(e("T{U{}, U{}}.b"), Rule::FgCall)
        );
    }

    #[test]
    fn values_do_not_step() {
        let d = decls();
        assert_eq!(fg_step(&d, &e("T{U{}, U{}}")), Step::AlreadyValue);
        assert_eq!(fg_step(&d, &e("3")), Step::AlreadyValue);
    }

    #[test]
    fn eval_and_fuel() {
        let d = decls();
        assert_eq!(
            fg_eval(&d, &e("T{U{}, U{}}"), 0),
            Outcome::Value(
                Value::Struct("T".into(), vec![Value::Struct("U".into(), vec![]); 2]),
                0
            )
        );
        assert_eq!(fg_eval(&d, &e("T{U{}, U{}}.get()"), 0), Outcome::OutOfFuel);
        assert_eq!(fg_eval(&d, &e("T{U{}, U{}}.get()"), 1), Outcome::OutOfFuel);
        assert_eq!(
            fg_eval(&d, &e("T{U{}, U{}}.get()"), 2),
            Outcome::Value(Value::Struct("U".into(), vec![]), 2)
        );
        assert_eq!(
            fg_eval(&d, &e("T{U{}, U{}}.loop()"), 500),
            Outcome::OutOfFuel
        );
        assert_eq!(
            fg_eval(&d, &e("T{U{}, U{}}.get().(I)"), 10),
            Outcome::Stuck(
                StuckReason::AssertFailure {
                    dynamic: "U".into(),
                    asserted: "I".into()
                },
                2
            )
        );
        let mut rules = vec![];
        fg_eval_traced(&d, &e("1 < 2 || false"), 10, &mut |n, r, _| {
            rules.push((n, r))
        });
        assert_eq!(rules, [(1, Rule::FgPrim), (2, Rule::FgPrim)]);
    }
}
