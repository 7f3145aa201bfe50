//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fgdict::diag::Code;
use fgdict::equiv::{
    check_downcast, check_upcast, diff_run, harvest, monotonicity_check, DiffConfig, Relation,
    Sample, Verdict,
};
use fgdict::fg::{self, Decls, Mode, Program, TypeKind};
use fgdict::gen::{gen_program, GenConfig};
use fgdict::tl::{self, Ctor, MethodSubst};
use fgdict::translate::{translate_program, Options};

type Outcome = Result<String, String>;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn load(path: &Path) -> Program {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    fg::parse_program(&text, Mode::Ext).unwrap_or_else(|d| panic!("{}: {}", path.display(), d[0]))
}

fn fg_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "fg"))
        .collect();
    v.sort();
    v
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Alpha-equivalence of TL expressions.
fn alpha_eq(a: &tl::Expr, b: &tl::Expr, env: &mut Vec<(String, String)>) -> bool {
    use tl::Expr::*;
    match (a, b) {
        (Var(x), Var(y)) => {
            let l = env.iter().rev().find(|(p, _)| p == x);
            let r = env.iter().rev().find(|(_, q)| q == y);
            match (l, r) {
                (Some((_, q)), Some((p, _))) => q == y && p == x,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Method(x), Method(y)) => x == y,
        (Int(x), Int(y)) => x == y,
        (Bool(x), Bool(y)) => x == y,
        (Con(c, xs), Con(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq(x, y, env))
        }
        (App(f, x), App(g, y)) => alpha_eq(f, g, env) && alpha_eq(x, y, env),
        (Prim(o, x1, x2), Prim(p, y1, y2)) => {
            o == p && alpha_eq(x1, y1, env) && alpha_eq(x2, y2, env)
        }
        (Lam(x, s), Lam(y, t)) => {
            env.push((x.clone(), y.clone()));
            let ok = alpha_eq(s, t, env);
            env.pop();
            ok
        }
        (Case(s, cs), Case(t, ds)) => {
            alpha_eq(s, t, env)
                && cs.len() == ds.len()
                && cs.iter().zip(ds).all(|(c, d)| {
                    if c.pat.ctor != d.pat.ctor || c.pat.vars.len() != d.pat.vars.len() {
                        return false;
                    }
                    let n = env.len();
                    env.extend(c.pat.vars.iter().cloned().zip(d.pat.vars.iter().cloned()));
                    let ok = alpha_eq(&c.body, &d.body, env);
                    env.truncate(n);
                    ok
                })
        }
        _ => false,
    }
}

/// 1. Running example.
fn running_example() -> Outcome {
    let start = Instant::now();
    let p = load(&corpus().join("equality.fg"));
    let golden: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(corpus().join("equality.golden.json")).unwrap(),
    )
    .unwrap();
    let ty = fg::typeck::TypeChecker::new(&Decls::of_program(&p))
        .check_program(&p)
        .map_err(|d| format!("does not type-check: {}", d[0]))?;
    ensure(ty == golden["main-type"], || format!("main has type {ty}"))?;

    let opts = Options {
        hoist_helpers: true,
        ..Options::default()
    };
    let t = translate_program(&p, &opts).map_err(|d| d[0].to_string())?;
    let shapes = [
        ("toEq_Int", r"\y -> K_Eq(y, eq_Int)"),
        ("toEq_Pair", r"\y -> K_Eq(y, eq_Pair)"),
        ("toEq_Ord", r"\K_Ord(x, eq, lt) -> K_Eq(x, eq)"),
        (
            "fromEq_Int",
            r"\K_Eq(y, eq) -> case y of { K_Int(v) -> K_Int(v) }",
        ),
        (
            "fromEq_Pair",
            r"\K_Eq(y, eq) -> case y of { K_Pair(l, r) -> K_Pair(l, r) }",
        ),
        (
            "fromOrd_Int",
            r"\K_Ord(y, eq, lt) -> case y of { K_Int(v) -> K_Int(v) }",
        ),
    ];
    for (name, shape) in shapes {
        let want = tl::parse_expr(shape).unwrap();
        let got = t
            .program
            .binding(name)
            .ok_or_else(|| format!("no binding {name}"))?;
        ensure(alpha_eq(got, &want, &mut vec![]), || {
            format!("{name} = {} does not match {shape}", tl::print_expr(got))
        })?;
    }
    // eq_Pair p (toEq_Pair p), with the argument list as a 1-tuple.
    let main_ok = match &t.program.main {
        tl::Expr::App(f, args) => {
            matches!(&**f, tl::Expr::App(g, _) if **g == tl::Expr::method("eq_Pair"))
                && matches!(&**args, tl::Expr::Con(Ctor::Tuple(1), a)
                    if matches!(&a[0], tl::Expr::App(h, _) if **h == tl::Expr::method("toEq_Pair")))
        }
        _ => false,
    };
    ensure(main_ok, || {
        format!("main is {}", tl::print_expr(&t.program.main))
    })?;

    let r = diff_run(&p, &DiffConfig::default()).map_err(|d| d[0].to_string())?;
    let Verdict::Agree { fg, tl } = &r.verdict else {
        return Err(format!("diff: {}", r.verdict));
    };
    ensure(
        fg.to_string() == golden["value"] && tl.to_string() == golden["value"],
        || format!("fg={fg} tl={tl}, golden {}", golden["value"]),
    )?;
    ensure(
        r.fg_outcome.steps().map(|n| n as u64) == golden["fg-steps"].as_u64(),
        || format!("fg steps {:?}", r.fg_outcome.steps()),
    )?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("6 helper shapes match, agree on {fg}, {took:?}"))
}

/// Diff reports for the first 1000 default-config seeds.
fn default_runs() -> Vec<(Program, fgdict::equiv::DiffReport)> {
    let cfg = GenConfig::default();
    (0..1000)
        .map(|seed| {
            let p = gen_program(&cfg.with_seed(seed));
            let r = diff_run(&p, &DiffConfig::default()).expect("generated program translates");
            (p, r)
        })
        .collect()
}

/// 2. No disagreement on generated programs.
fn soundness(runs: &[(Program, fgdict::equiv::DiffReport)], took: Duration) -> Outcome {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, r) in runs {
        *counts.entry(r.verdict.name()).or_default() += 1;
    }
    let get = |k: &str| counts.get(k).copied().unwrap_or(0);
    let ok = get("agree") + get("both-stuck");
    let summary = format!("{counts:?} in {took:?}");
    ensure(get("disagree") == 0, || summary.clone())?;
    ensure(ok * 100 >= 95 * runs.len(), || summary.clone())?;
    ensure(ok + get("budget") == runs.len(), || summary.clone())?;
    ensure(took < Duration::from_secs(60), || summary.clone())?;
    Ok(summary)
}

struct Harvest {
    decls: Decls,
    mu: MethodSubst,
    samples: Vec<Sample>,
}

fn harvest_all(runs: &[(Program, fgdict::equiv::DiffReport)]) -> Vec<Harvest> {
    runs.iter()
        .filter_map(|(p, r)| {
            let Verdict::Agree { fg, tl } = &r.verdict else {
                return None;
            };
            let decls = Decls::of_program(p);
            let mu = MethodSubst::from_program(&r.translation.program).unwrap();
            let mut samples = Vec::new();
            harvest(&decls, &r.main_type, fg, tl, &mut samples);
            Some(Harvest { decls, mu, samples })
        })
        .collect()
}

/// 3. Monotonicity of the step-indexed relation.
fn monotonicity(hs: &[Harvest]) -> Outcome {
    let mut total = 0;
    for h in hs {
        let rel = Relation::new(&h.decls);
        total += h.samples.len();
        if let Some(v) = monotonicity_check(&rel, &h.samples, 64).first() {
            return Err(format!("{v:?}"));
        }
    }
    ensure(total >= 200, || format!("only {total} triples"))?;
    Ok(format!("{total} triples, k <= 64, no violations"))
}

/// 4. Upcasts and downcasts preserve relatedness.
fn casts(hs: &[Harvest]) -> Outcome {
    const K: usize = 64;
    let mut pairs = 0;
    let (mut ups, mut downs) = (0, 0);
    let mut steps: BTreeMap<&str, std::collections::BTreeSet<usize>> = BTreeMap::new();
    for h in hs {
        let rel = Relation::new(&h.decls);
        let d = &h.decls;
        let ifaces: Vec<&str> = d.interfaces().collect();
        let structs: Vec<&str> = d.structs().collect();
        for s in &h.samples {
            if !rel.related(&s.ty, &s.fg, &s.tl, K) {
                continue;
            }
            pairs += 1;
            let is_struct = d.kind(&s.ty) == Some(TypeKind::Struct);
            for &u in ifaces.iter().filter(|u| **u != s.ty && d.subtype(&s.ty, u)) {
                let c = check_upcast(&rel, &h.mu, s, u, K);
                ensure(c.preserved, || format!("upcast {c:?} of {s:?}"))?;
                let key = if is_struct {
                    "struct-upcast"
                } else {
                    "iface-upcast"
                };
                steps.entry(key).or_default().extend(c.tl_steps);
                ups += 1;
            }
            if is_struct || d.kind(&s.ty) != Some(TypeKind::Interface) {
                continue;
            }
            let targets = structs
                .iter()
                .filter(|t| d.subtype(t, &s.ty))
                .map(|t| (*t, "destructor-struct"))
                .chain(ifaces.iter().map(|i| (*i, "destructor-iface")));
            for (u, key) in targets {
                let c = check_downcast(&rel, &h.mu, s, u, K);
                ensure(c.preserved, || format!("downcast {c:?} of {s:?}"))?;
                steps.entry(key).or_default().extend(c.tl_steps);
                downs += 1;
            }
        }
    }
    ensure(pairs >= 200, || format!("only {pairs} related pairs"))?;
    let set = |k: &str| steps.get(k).cloned().unwrap_or_default();
    let one = |k: &str, n: usize| {
        let s = set(k);
        ensure(s.len() == 1 && s.contains(&n), || {
            format!("{k} took {s:?} steps, expected {n}")
        })
    };
    one("struct-upcast", 1)?;
    one("destructor-struct", 3)?;
    // An interface target also rebuilds the dictionary with a struct upcast.
    one("destructor-iface", 3 + 1)?;
    Ok(format!(
        "{pairs} pairs, {ups} upcasts, {downs} downcasts; steps: struct upcast 1, \
         destructor 3 (+1 upcast for interface targets), interface upcast {:?}",
        set("iface-upcast")
    ))
}

/// 5. Inserting identity upcasts does not change any verdict.
fn coherence() -> Outcome {
    let cfg = GenConfig::default();
    let plain = DiffConfig::default();
    let mut ident = DiffConfig::default();
    ident.options.identity_upcasts = true;
    let mut instrumented = 0;
    for seed in 0..100 {
        let p = gen_program(&cfg.with_seed(seed));
        let a = diff_run(&p, &plain).unwrap();
        let b = diff_run(&p, &ident).unwrap();
        ensure(a.verdict == b.verdict, || {
            format!("seed {seed}: {} vs {}", a.verdict, b.verdict)
        })?;
        instrumented += (a.translation.program != b.translation.program) as usize;
    }
    ensure(instrumented > 0, || {
        "no identity upcast was inserted".into()
    })?;
    Ok(format!(
        "100 seeds, identical verdicts, {instrumented} translations instrumented"
    ))
}

/// 6. Failing assertions get stuck on both sides.
fn stuckness() -> Outcome {
    let files = fg_files(&corpus().join("stuck"));
    ensure(files.len() == 10, || {
        format!("{} stuck programs", files.len())
    })?;
    let mut empty = 0;
    for f in &files {
        let p = load(f);
        let r = diff_run(&p, &DiffConfig::default()).map_err(|d| d[0].to_string())?;
        ensure(matches!(r.verdict, Verdict::BothStuck { .. }), || {
            format!("{}: {}", f.display(), r.verdict)
        })?;
        empty += r
            .translation
            .warnings
            .iter()
            .any(|w| w.code == Code::EmptyDestructor) as usize;
    }
    ensure(empty > 0, || "no empty-clause destructor exercised".into())?;
    Ok(format!(
        "{} programs both stuck, {empty} through empty destructors",
        files.len()
    ))
}

/// 7. Well-formedness and assertion diagnostics.
fn wellformedness() -> Outcome {
    let dir = corpus().join("wf");
    let diagnostics = |name: &str| {
        let p = load(&dir.join(name));
        let wf = fg::check_wellformed(&p);
        if !wf.is_empty() {
            return wf;
        }
        match fg::typeck::TypeChecker::new(&Decls::of_program(&p)).check_program(&p) {
            Ok(_) => vec![],
            Err(d) => d,
        }
    };
    let cases = [
        ("fg1", Code::RecursiveStruct),
        ("fg2", Code::DuplicateField),
        ("fg3", Code::DuplicateSpec),
        ("fg4", Code::DuplicateMethod),
        ("assert", Code::AssertOnNonInterface),
    ];
    for (stem, code) in cases {
        let ok = diagnostics(&format!("{stem}_accept.fg"));
        ensure(ok.is_empty(), || format!("{stem}_accept: {}", ok[0]))?;
        let bad = diagnostics(&format!("{stem}_reject.fg"));
        ensure(bad.len() == 1 && bad[0].code == code, || {
            format!("{stem}_reject: {bad:?}")
        })?;
        if code == Code::AssertOnNonInterface {
            ensure(bad[0].message.contains("is not allowed in FG"), || {
                bad[0].message.clone()
            })?;
        }
    }
    Ok("FG1-FG4 and struct assertion: 5 accepted, 5 rejected with the right code".into())
}

/// 8. Compilation and fuzzing are deterministic.
fn determinism() -> Outcome {
    let mut files = vec![corpus().join("equality.fg")];
    files.extend(fg_files(&corpus().join("stuck")));
    files.extend(
        fg_files(&corpus().join("wf"))
            .into_iter()
            .filter(|f| f.to_string_lossy().ends_with("_accept.fg")),
    );
    for f in &files {
        for hoist_helpers in [false, true] {
            let opts = Options {
                hoist_helpers,
                ..Options::default()
            };
            let compile =
                || tl::print_program(&translate_program(&load(f), &opts).unwrap().program);
            ensure(compile() == compile(), || {
                format!("{} differs", f.display())
            })?;
        }
    }
    let stream = || -> Vec<String> {
        let cfg = GenConfig::default().with_seed(7);
        (0..200)
            .map(|i| {
                let p = gen_program(&cfg.with_seed(cfg.seed + i));
                diff_run(&p, &DiffConfig::default())
                    .unwrap()
                    .to_json(Some(cfg.seed + i))
                    .to_string()
            })
            .collect()
    };
    ensure(stream() == stream(), || {
        "fuzz verdict streams differ".into()
    })?;
    Ok(format!(
        "{} corpus files compile identically, 200-case fuzz stream repeats",
        files.len()
    ))
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "running example", running_example()));
    let start = Instant::now();
    let runs = default_runs();
    let took = start.elapsed();
    results.push((2, "no disagreement on 1000 seeds", soundness(&runs, took)));
    let hs = harvest_all(&runs);
    results.push((3, "monotonicity", monotonicity(&hs)));
    results.push((4, "upcast/downcast preservation", casts(&hs)));
    results.push((5, "coherence", coherence()));
    results.push((6, "stuckness fidelity", stuckness()));
    results.push((7, "well-formedness suite", wellformedness()));
    results.push((8, "determinism", determinism()));

    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {n} ({name}): PASS: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
