use fgdict::equiv::{diff_run, DiffConfig, Verdict};
use fgdict::fg::{self, ExprKind, Mode, Program};
use fgdict::gen::{gen_program, shrink, well_typed, GenConfig};
use fgdict::translate::{translate_program, Coverage, Fault, Options};

fn has_assert(p: &Program) -> bool {
    let mut found = false;
    let mut visit = |e: &fg::Expr| found |= matches!(e.kind, ExprKind::Assert { .. });
    p.main.walk(&mut visit);
    for m in p.methods() {
        m.body.walk(&mut visit);
    }
    found
}

#[test]
fn coverage_over_default_seeds() {
    let cfg = GenConfig::default();
    let mut total = Coverage::default();
    let (mut asserts, mut iface_calls) = (0, 0);
    for seed in 0..1000 {
        let p = gen_program(&cfg.with_seed(seed));
        let t = translate_program(&p, &Options::default()).expect("generated programs translate");
        asserts += has_assert(&p) as usize;
        iface_calls += (t.coverage.get("td-call-iface") > 0) as usize;
        total.merge(&t.coverage);
    }
    eprintln!("assert {asserts}/1000, td-call-iface {iface_calls}/1000, {total:?}");
    assert!(asserts >= 300, "{asserts}");
    assert!(iface_calls >= 500, "{iface_calls}");
    for rule in Coverage::RULES {
        assert!(total.get(rule) > 0, "{rule} never fired");
    }
}

#[test]
fn empty_interfaces_reach_the_empty_destructor() {
    let cfg = GenConfig {
        allow_empty_ifaces: true,
        ..GenConfig::default()
    };
    let mut warned = 0;
    for seed in 0..1000 {
        let p = gen_program(&cfg.with_seed(seed));
        assert!(well_typed(&p), "seed {seed}:\n{}", fg::print_program(&p));
        let t = translate_program(&p, &Options::default()).unwrap();
        warned += !t.warnings.is_empty() as usize;
        let r = diff_run(&p, &DiffConfig::default()).unwrap();
        assert!(
            !matches!(r.verdict, Verdict::Disagree(_)),
            "seed {seed}: {}",
            r.verdict
        );
    }
    eprintln!("empty destructors in {warned}/1000");
    assert!(warned > 0);
}

#[test]
fn generated_programs_never_disagree() {
    for mode in [Mode::Core, Mode::Ext] {
        let cfg = GenConfig {
            mode,
            ..GenConfig::default()
        };
        for seed in 0..150 {
            let p = gen_program(&cfg.with_seed(seed));
            let r = diff_run(&p, &DiffConfig::default()).unwrap();
            assert!(
                !matches!(r.verdict, Verdict::Disagree(_)),
                "seed {seed}: {}\n{}",
                r.verdict,
                fg::print_program(&p)
            );
        }
    }
}

fn faulty_disagrees(p: &Program) -> bool {
    let cfg = DiffConfig {
        options: Options {
            fault: Some(Fault::PermutationOffByOne),
            ..Options::default()
        },
        ..DiffConfig::default()
    };
    matches!(
        diff_run(p, &cfg).map(|r| r.verdict),
        Ok(Verdict::Disagree(_))
    )
}

#[test]
fn injected_fault_shrinks_to_small_witness() {
    let cfg = GenConfig::default();
    let p = (0..2000)
        .map(|s| gen_program(&cfg.with_seed(s)))
        .find(faulty_disagrees)
        .expect("some seed exposes the fault");
    let small = shrink(&p, &faulty_disagrees);
    assert!(faulty_disagrees(&small));
    assert!(well_typed(&small));
    eprintln!("{}", fg::print_program(&small));
    assert!(small.decls.len() <= 4, "{}", fg::print_program(&small));
    assert_eq!(shrink(&small, &faulty_disagrees), small);
}
