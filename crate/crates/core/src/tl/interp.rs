//! Small-step reduction for TL under a method substitution.
//!
//! Reduction happens in place: only the redex is rebuilt, so a step costs
//! time proportional to the depth of the redex plus the size of the
//! substituted body.

use std::fmt;

use serde::Serialize;

use super::ast::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    TlLambda,
    TlCase,
    TlMethod,
    TlPrim,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::TlLambda => "tl-lambda",
            Rule::TlCase => "tl-case",
            Rule::TlMethod => "tl-method",
            Rule::TlPrim => "tl-prim",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StuckReason {
    /// No clause of a `case` matches the scrutinee's head constructor.
    MatchFailure {
        scrutinee: String,
    },
    UnboundMethod(String),
    NonFunction(String),
    BadPrim(BinOp),
    FreeVar(String),
}

impl StuckReason {
    pub fn kind(&self) -> &'static str {
        match self {
            StuckReason::MatchFailure { .. } => "match-failure",
            StuckReason::UnboundMethod(_) => "unbound-method",
            StuckReason::NonFunction(_) => "non-function",
            StuckReason::BadPrim(_) => "bad-prim",
            StuckReason::FreeVar(_) => "free-var",
        }
    }
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StuckReason::MatchFailure { scrutinee } => {
                write!(f, "match-failure: no clause for {scrutinee}")
            }
            StuckReason::UnboundMethod(y) => write!(f, "unbound-method: {y}"),
            StuckReason::NonFunction(v) => write!(f, "non-function: {v} applied"),
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

/// Performs one reduction step.
pub fn tl_step(mu: &MethodSubst, e: &Expr) -> Step {
    let mut next = e.clone();
    match reduce(mu, &mut next) {
        Ok(Some(rule)) => Step::Stepped(next, rule),
        Ok(None) => Step::AlreadyValue,
        Err(r) => Step::Stuck(r),
    }
}

/// Reduces `e` for at most `fuel` axiom steps.
pub fn tl_eval(mu: &MethodSubst, e: &Expr, fuel: usize) -> Outcome {
    tl_eval_traced(mu, e, fuel, &mut |_, _, _| {})
}

/// Like [`tl_eval`], calling `trace(n, rule, e')` after the `n`-th step.
pub fn tl_eval_traced(
    mu: &MethodSubst,
    e: &Expr,
    fuel: usize,
    trace: &mut dyn FnMut(usize, Rule, &Expr),
) -> Outcome {
    let mut cur = e.clone();
    let mut steps = 0;
    loop {
        if steps == fuel {
            return match tl_step(mu, &cur) {
                Step::AlreadyValue => Outcome::Value(to_value(&cur), steps),
                Step::Stuck(r) => Outcome::Stuck(r, steps),
                Step::Stepped(..) => Outcome::OutOfFuel,
            };
        }
        match reduce(mu, &mut cur) {
            Ok(None) => return Outcome::Value(to_value(&cur), steps),
            Err(r) => return Outcome::Stuck(r, steps),
            Ok(Some(rule)) => {
                steps += 1;
                trace(steps, rule, &cur);
            }
        }
    }
}

/// Builds `μ` from the program's bindings and evaluates `main`.
pub fn run_program(p: &Program, fuel: usize) -> Result<Outcome, TlError> {
    let mu = MethodSubst::from_program(p)?;
    Ok(tl_eval(&mu, &p.main, fuel))
}

fn to_value(e: &Expr) -> Value {
    Value::from_expr(e).expect("normal form is a value")
}

/// Reduces the redex of `e` in place. `Ok(None)` means `e` is a value.
fn reduce(mu: &MethodSubst, e: &mut Expr) -> Result<Option<Rule>, StuckReason> {
    match e {
        Expr::Var(x) => Err(StuckReason::FreeVar(x.clone())),
        Expr::Method(_) | Expr::Int(_) | Expr::Bool(_) | Expr::Lam(..) => Ok(None),
        Expr::Con(_, args) => {
            for a in args {
                if let Some(r) = reduce(mu, a)? {
                    return Ok(Some(r));
                }
            }
            Ok(None)
        }
        Expr::App(f, a) => {
            if let Expr::Method(y) = &**f {
                let body = mu
                    .get(y)
                    .ok_or_else(|| StuckReason::UnboundMethod(y.clone()))?;
                **f = body.clone();
                return Ok(Some(Rule::TlMethod));
            }
            if let Some(r) = reduce(mu, f)? {
                return Ok(Some(r));
            }
            if let Some(r) = reduce(mu, a)? {
                return Ok(Some(r));
            }
            match &**f {
                Expr::Lam(x, body) => {
                    let next = body.subst(&[(x, a)]);
                    *e = next;
                    Ok(Some(Rule::TlLambda))
                }
                other => Err(StuckReason::NonFunction(super::print::print_expr(other))),
            }
        }
        Expr::Case(s, clauses) => {
            if let Some(r) = reduce(mu, s)? {
                return Ok(Some(r));
            }
            let Expr::Con(k, args) = &**s else {
                return Err(StuckReason::MatchFailure {
                    scrutinee: super::print::print_expr(s),
                });
            };
            let Some(c) = clauses
                .iter()
                .find(|c| c.pat.ctor == *k && c.pat.vars.len() == args.len())
            else {
                return Err(StuckReason::MatchFailure {
                    scrutinee: super::print::print_expr(s),
                });
            };
            let map: Vec<(&str, &Expr)> = c
                .pat
                .vars
                .iter()
                .map(String::as_str)
                .zip(args.iter())
                .collect();
            let next = c.body.subst(&map);
            *e = next;
            Ok(Some(Rule::TlCase))
        }
        Expr::Prim(op, l, r) => {
            if let Some(rule) = reduce(mu, l)? {
                return Ok(Some(rule));
            }
            if let Some(rule) = reduce(mu, r)? {
                return Ok(Some(rule));
            }
            let v = match (*op, &**l, &**r) {
                (BinOp::Eq, Expr::Int(a), Expr::Int(b)) => a == b,
                (BinOp::Eq, Expr::Bool(a), Expr::Bool(b)) => a == b,
                (BinOp::Lt, Expr::Int(a), Expr::Int(b)) => a < b,
                (BinOp::And, Expr::Bool(a), Expr::Bool(b)) => *a && *b,
                (BinOp::Or, Expr::Bool(a), Expr::Bool(b)) => *a || *b,
                _ => return Err(StuckReason::BadPrim(*op)),
            };
            *e = Expr::Bool(v);
            Ok(Some(Rule::TlPrim))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tl::parser::{parse_expr, parse_program};

    fn mu(src: &str) -> MethodSubst {
        MethodSubst::from_program(&parse_program(src).unwrap()).unwrap()
    }

    fn eval(src: &str, fuel: usize) -> Outcome {
        run_program(&parse_program(src).unwrap(), fuel).unwrap()
    }

    #[test]
    fn beta_and_case() {
        let id = parse_expr("(\\x -> x) K_T()").unwrap();
        assert_eq!(
            tl_step(&MethodSubst::default(), &id),
            Step::Stepped(parse_expr("K_T()").unwrap(), Rule::TlLambda)
        );
        assert_eq!(
            eval("case K_K(1, 2) of { K_K(x, y) -> y }", 10),
            Outcome::Value(Value::Int(2), 1)
        );
    }

    #[test]
    fn method_unfolds_before_argument() {
        let m = mu("let y = \\x -> x\nin ()");
        let e = parse_expr("y ((\\z -> z) K_T())").unwrap();
        let Step::Stepped(e1, Rule::TlMethod) = tl_step(&m, &e) else {
            panic!()
        };
        assert_eq!(e1, parse_expr("(\\x -> x) ((\\z -> z) K_T())").unwrap());
        assert_eq!(
            tl_eval(&m, &e, 100),
            Outcome::Value(Value::Con(Ctor::named("T"), vec![]), 3)
        );
    }

    #[test]
    fn programs() {
        assert_eq!(
            eval("let y = \\x -> x\nin y K_T()", 10),
            Outcome::Value(Value::Con(Ctor::named("T"), vec![]), 2)
        );
        assert_eq!(
            eval("K_T()", 0),
            Outcome::Value(Value::Con(Ctor::named("T"), vec![]), 0)
        );
        let dup = parse_program("let y = \\x -> x\nlet y = \\x -> x\nin y").unwrap();
        assert_eq!(
            run_program(&dup, 1),
            Err(TlError::DuplicateBinding("y".into()))
        );
    }

    #[test]
    fn stuck_and_fuel() {
        let Outcome::Stuck(r, 1) = eval("case (\\x -> x) K_A() of { K_B() -> 1 }", 10) else {
            panic!()
        };
        assert_eq!(r.kind(), "match-failure");
        let Outcome::Stuck(r, 0) = eval("f 1", 10) else {
            panic!()
        };
        assert_eq!(r, StuckReason::UnboundMethod("f".into()));
        let Outcome::Stuck(r, 0) = eval("1 2", 10) else {
            panic!()
        };
        assert_eq!(r.kind(), "non-function");
        assert_eq!(eval("(\\x -> x) 1", 0), Outcome::OutOfFuel);
        assert_eq!(eval("(\\x -> x) 1", 1), Outcome::Value(Value::Int(1), 1));
        assert_eq!(eval("let f = \\x -> f x\nin f 1", 1000), Outcome::OutOfFuel);
    }

    #[test]
    fn primitives_are_strict() {
        assert_eq!(
            eval("1 < 2 || (\\x -> x) false", 10),
            Outcome::Value(Value::Bool(true), 3)
        );
        let Outcome::Stuck(r, _) = eval("1 && true", 10) else {
            panic!()
        };
        assert_eq!(r, StuckReason::BadPrim(BinOp::And));
    }
}
