//! Random generation of well-typed FG programs, and shrinking.
//!
//! Programs are built in layers: struct names, a pool of method names with
//! fixed signatures, which structs implement which pool methods, interfaces
//! carved out of realized method sets, struct fields, and finally method
//! bodies and `main`. A method body only calls pool methods with a smaller
//! index, so every generated program terminates.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fg::ast::*;
use crate::fg::check_wellformed;
use crate::fg::decls::{Decls, TypeKind};
use crate::fg::typeck::{TypeChecker, TypeEnv};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    pub max_structs: usize,
    pub max_ifaces: usize,
    pub max_methods_per_iface: usize,
    pub max_fields: usize,
    pub expr_depth: usize,
    pub assert_probability: f64,
    pub mode: Mode,
    /// Also generate interfaces that no struct implements.
    pub allow_empty_ifaces: bool,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 0,
            max_structs: 4,
            max_ifaces: 3,
            max_methods_per_iface: 3,
            max_fields: 3,
            expr_depth: 4,
            assert_probability: 0.3,
            mode: Mode::Core,
            allow_empty_ifaces: false,
        }
    }
}

impl GenConfig {
    pub fn with_seed(&self, seed: u64) -> GenConfig {
        GenConfig {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.max_structs == 0 {
            return Err("max_structs must be at least 1".into());
        }
        if self.max_methods_per_iface == 0 || self.expr_depth == 0 {
            return Err("max_methods_per_iface and expr_depth must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.assert_probability) {
            return Err("assert_probability must lie in [0, 1]".into());
        }
        Ok(())
    }
}

struct PoolMethod {
    name: String,
    params: Vec<(String, String)>,
    ret: String,
}

impl PoolMethod {
    fn spec(&self) -> MethodSpec {
        MethodSpec {
            name: Ident::new(&self.name),
            sig: Signature {
                params: self.params.iter().map(|(x, t)| Binder::new(x, t)).collect(),
                ret: Ident::new(&self.ret),
            },
        }
    }
}

/// Generates a program. Panics if `cfg` does not validate.
pub fn gen_program(cfg: &GenConfig) -> Program {
    cfg.validate().expect("invalid generator configuration");
    let mut g = Gen {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    g.program()
}

#[derive(Clone, Copy)]
enum Kind {
    Var,
    Lit,
    Upcast,
    Select,
    Call,
    Assert,
    Prim,
}

struct Gen<'c> {
    cfg: &'c GenConfig,
    rng: ChaCha8Rng,
}

/// Everything known once the declarations are fixed.
struct World {
    decls: Decls,
    pool: Vec<PoolMethod>,
    /// Per struct, the pool indices it implements.
    impls: Vec<Vec<usize>>,
    structs: Vec<String>,
    /// Interfaces with at least one implementing struct.
    inhabited_ifaces: Vec<String>,
    all_ifaces: Vec<String>,
}

impl World {
    fn pool_index(&self, m: &str) -> usize {
        self.pool
            .iter()
            .position(|p| p.name == m)
            .unwrap_or(usize::MAX)
    }
}

impl Gen<'_> {
    fn program(&mut self) -> Program {
        let cfg = self.cfg;
        let ext = cfg.mode.is_ext();
        let n_structs = self.rng.gen_range(1..=cfg.max_structs);
        let n_ifaces = self.rng.gen_range(cfg.max_ifaces.min(1)..=cfg.max_ifaces);
        let structs: Vec<String> = (0..n_structs).map(|i| format!("S{i}")).collect();
        let ifaces: Vec<String> = (0..n_ifaces).map(|i| format!("I{i}")).collect();
        let phantom: Vec<bool> = ifaces
            .iter()
            .map(|_| cfg.allow_empty_ifaces && self.rng.gen_bool(0.3))
            .collect();

        // Types usable in signatures: structs, non-phantom interfaces, primitives.
        let mut sig_types: Vec<String> = structs.clone();
        sig_types.extend(
            ifaces
                .iter()
                .zip(&phantom)
                .filter(|(_, p)| !**p)
                .map(|(i, _)| i.clone()),
        );
        if ext {
            sig_types.push(INT_TYPE.into());
            sig_types.push(BOOL_TYPE.into());
        }

        let n_pool = self.rng.gen_range(1..=cfg.max_methods_per_iface + 1);
        let pool: Vec<PoolMethod> = (0..n_pool)
            .map(|k| {
                let arity = self.rng.gen_range(0..=2);
                PoolMethod {
                    name: format!("m{k}"),
                    params: (0..arity)
                        .map(|i| {
                            (
                                format!("x{i}"),
                                sig_types.choose(&mut self.rng).unwrap().clone(),
                            )
                        })
                        .collect(),
                    ret: sig_types.choose(&mut self.rng).unwrap().clone(),
                }
            })
            .collect();

        let impls: Vec<Vec<usize>> = structs
            .iter()
            .map(|_| (0..n_pool).filter(|_| self.rng.gen_bool(0.6)).collect())
            .collect();

        // Interfaces: subsets of a struct's method set or of an earlier
        // interface, in shuffled order so that upcasts permute slots.
        let mut iface_specs: Vec<Vec<MethodSpec>> = Vec::new();
        let mut iface_pool: Vec<Vec<usize>> = Vec::new();
        for (j, _) in ifaces.iter().enumerate() {
            let earlier: Vec<usize> = (0..j).filter(|&i| !iface_pool[i].is_empty()).collect();
            let source: Vec<usize> = if !earlier.is_empty() && self.rng.gen_bool(0.5) {
                iface_pool[*earlier.choose(&mut self.rng).unwrap()].clone()
            } else {
                impls.choose(&mut self.rng).unwrap().clone()
            };
            let mut chosen = source;
            chosen.shuffle(&mut self.rng);
            let max = chosen.len().min(cfg.max_methods_per_iface);
            let keep = if max == 0 {
                0
            } else {
                self.rng.gen_range(1..=max)
            };
            chosen.truncate(keep);
            let mut specs: Vec<MethodSpec> = chosen.iter().map(|&k| pool[k].spec()).collect();
            if phantom[j] {
                // A spec no struct implements, so only interfaces derived
                // from this one are its supertypes.
                specs.push(MethodSpec {
                    name: Ident::new(format!("p{j}")),
                    sig: Signature {
                        params: vec![],
                        ret: Ident::new(&structs[0]),
                    },
                });
            }
            iface_specs.push(specs);
            iface_pool.push(chosen);
        }

        let implements =
            |s: usize, j: usize| !phantom[j] && iface_pool[j].iter().all(|k| impls[s].contains(k));

        // Fields of S_i only mention lower structs and interfaces with a lower
        // implementer, so every type has a closed canonical value.
        let mut fields: Vec<Vec<Binder>> = Vec::new();
        for i in 0..n_structs {
            let mut choices: Vec<String> = structs[..i].to_vec();
            choices.extend(
                (0..n_ifaces)
                    .filter(|&j| (0..i).any(|s| implements(s, j)))
                    .map(|j| ifaces[j].clone()),
            );
            if ext {
                choices.push(INT_TYPE.into());
                choices.push(BOOL_TYPE.into());
            }
            let n = if choices.is_empty() {
                0
            } else {
                self.rng.gen_range(0..=cfg.max_fields)
            };
            fields.push(
                (0..n)
                    .map(|f| Binder::new(&format!("f{f}"), choices.choose(&mut self.rng).unwrap()))
                    .collect(),
            );
        }

        let mut decls = Vec::new();
        for (i, s) in structs.iter().enumerate() {
            decls.push(type_decl(s, TypeLit::Struct(fields[i].clone())));
        }
        for (j, name) in ifaces.iter().enumerate() {
            decls.push(type_decl(name, TypeLit::Interface(iface_specs[j].clone())));
        }
        let mut method_slots = Vec::new();
        for (i, s) in structs.iter().enumerate() {
            for &k in &impls[i] {
                method_slots.push(decls.len());
                decls.push(Decl::Method(MethodDecl {
                    recv: Binder::new("this", s),
                    spec: pool[k].spec(),
                    body: Expr::var("this"),
                    span: Default::default(),
                }));
            }
        }

        let d = Decls::new(decls.clone(), cfg.mode);
        let inhabited_ifaces = (0..n_ifaces)
            .filter(|&j| (0..n_structs).any(|s| implements(s, j)))
            .map(|j| ifaces[j].clone())
            .collect();
        let world = World {
            decls: d,
            pool,
            impls,
            structs: structs.clone(),
            inhabited_ifaces,
            all_ifaces: ifaces,
        };

        for slot in method_slots {
            let Decl::Method(m) = &decls[slot] else {
                unreachable!()
            };
            let env = TypeChecker::method_env(m);
            let limit = world.pool_index(m.name());
            let depth = self.rng.gen_range(1..=cfg.expr_depth);
            let ret = m.spec.sig.ret.name.clone();
            let body = self
                .expr(&world, &ret, depth, false, &env, limit)
                .expect("non-exact generation is total");
            if let Decl::Method(m) = &mut decls[slot] {
                m.body = body;
            }
        }

        let mut goals: Vec<String> = world.structs.clone();
        goals.extend(world.inhabited_ifaces.iter().cloned());
        goals.extend(world.inhabited_ifaces.iter().cloned());
        if ext {
            goals.push(BOOL_TYPE.into());
        }
        let goal = goals.choose(&mut self.rng).unwrap().clone();
        // Prefer a main that dispatches through an interface.
        let dispatch: Vec<(String, usize)> = world
            .inhabited_ifaces
            .iter()
            .flat_map(|i| {
                let w = &world;
                w.pool
                    .iter()
                    .enumerate()
                    .filter(move |(_, pm)| w.decls.find_method(i, &pm.name).is_some())
                    .map(move |(k, _)| (i.clone(), k))
            })
            .collect();
        let env = TypeEnv::new();
        let mut main = None;
        if cfg.expr_depth > 1 && !dispatch.is_empty() && self.rng.gen_bool(0.85) {
            let (i, k) = dispatch.choose(&mut self.rng).unwrap().clone();
            main = self.call(&world, &i, k, cfg.expr_depth, &env, world.pool.len());
        }
        let main = match main {
            Some(m) => m,
            None => self
                .expr(&world, &goal, cfg.expr_depth, false, &env, world.pool.len())
                .expect("non-exact generation is total"),
        };
        Program::new(cfg.mode, decls, main)
    }

    /// A closed value of type `t`.
    fn canon(&mut self, w: &World, t: &str) -> Expr {
        match w.decls.kind(t) {
            Some(TypeKind::Int) => Expr::new(ExprKind::Int(self.rng.gen_range(0..4))),
            Some(TypeKind::Bool) => Expr::new(ExprKind::Bool(self.rng.gen_bool(0.5))),
            Some(TypeKind::Struct) => {
                let fields: Vec<String> = w
                    .decls
                    .struct_fields(t)
                    .unwrap()
                    .iter()
                    .map(|f| f.ty.name.clone())
                    .collect();
                let args = fields.iter().map(|f| self.canon(w, f)).collect();
                Expr::lit(t, args)
            }
            _ => {
                let s = w
                    .structs
                    .iter()
                    .find(|s| w.decls.subtype(s, t))
                    .expect("interface is inhabited")
                    .clone();
                self.canon(w, &s)
            }
        }
    }

    /// An expression whose type is `want` (exactly, if `exact`, otherwise a
    /// subtype of it). Calls are limited to pool methods below `limit`.
    /// Only exact interface goals can fail.
    fn expr(
        &mut self,
        w: &World,
        want: &str,
        depth: usize,
        exact: bool,
        env: &TypeEnv,
        limit: usize,
    ) -> Option<Expr> {
        let d = &w.decls;
        let kind = d.kind(want);
        let mut kinds: Vec<(Kind, u32)> = vec![(Kind::Var, 3)];
        if depth > 0 {
            match kind {
                Some(TypeKind::Interface) if !exact => kinds.push((Kind::Upcast, 4)),
                Some(TypeKind::Interface) => {}
                _ => kinds.push((Kind::Lit, 2)),
            }
            let exact_iface = exact && kind == Some(TypeKind::Interface);
            kinds.push((Kind::Select, if exact_iface { 6 } else { 2 }));
            kinds.push((Kind::Call, 6));
            if self.rng.gen_bool(self.cfg.assert_probability) {
                kinds.push((Kind::Assert, 3));
            }
            if kind == Some(TypeKind::Bool) {
                kinds.push((Kind::Prim, 2));
            }
        }
        while !kinds.is_empty() {
            let i = kinds
                .choose_weighted(&mut self.rng, |(_, wgt)| *wgt)
                .map(|c| kinds.iter().position(|k| std::ptr::eq(k, c)).unwrap())
                .unwrap();
            let (k, _) = kinds.remove(i);
            let got = self.produce(w, k, want, depth, exact, env, limit);
            if got.is_some() {
                return got;
            }
        }
        if exact && kind == Some(TypeKind::Interface) {
            None
        } else {
            Some(self.canon(w, want))
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn produce(
        &mut self,
        w: &World,
        k: Kind,
        want: &str,
        depth: usize,
        exact: bool,
        env: &TypeEnv,
        limit: usize,
    ) -> Option<Expr> {
        let d = &w.decls;
        let kind = d.kind(want);
        match k {
            Kind::Var => {
                let mut vars: Vec<&String> = env
                    .iter()
                    .filter(|(_, t)| *t == want || (!exact && d.subtype(t, want)))
                    .map(|(x, _)| x)
                    .collect();
                vars.sort();
                vars.choose(&mut self.rng).map(|x| Expr::var(x))
            }
            Kind::Lit => match kind {
                Some(TypeKind::Struct) => {
                    let fields: Vec<String> = d
                        .struct_fields(want)
                        .unwrap()
                        .iter()
                        .map(|f| f.ty.name.clone())
                        .collect();
                    let mut args = Vec::new();
                    for f in &fields {
                        args.push(self.expr(w, f, depth - 1, false, env, limit)?);
                    }
                    Some(Expr::lit(want, args))
                }
                _ => Some(self.canon(w, want)),
            },
            Kind::Upcast => {
                let mut sources: Vec<String> = w
                    .structs
                    .iter()
                    .filter(|s| d.subtype(s, want))
                    .cloned()
                    .collect();
                sources.extend(
                    w.inhabited_ifaces
                        .iter()
                        .filter(|i| *i != want && d.subtype(i, want))
                        .cloned(),
                );
                // An assertion to an interface without implementers always
                // fails, through a destructor with no clauses.
                let phantoms: Vec<&String> = w
                    .all_ifaces
                    .iter()
                    .filter(|i| !w.inhabited_ifaces.contains(i) && d.subtype(i, want))
                    .collect();
                if self.cfg.allow_empty_ifaces && !phantoms.is_empty() && self.rng.gen_bool(0.5) {
                    let p = phantoms.choose(&mut self.rng).unwrap().to_string();
                    let subject = w.inhabited_ifaces.choose(&mut self.rng)?.clone();
                    let e = self.expr(w, &subject, depth - 1, true, env, limit)?;
                    return Some(Expr::assert(e, &p));
                }
                sources.push(want.to_string());
                let src = sources.choose(&mut self.rng).unwrap().clone();
                self.expr(w, &src, depth, true, env, limit)
            }
            Kind::Select => {
                let mut cands = Vec::new();
                for s in &w.structs {
                    for f in d.struct_fields(s).unwrap() {
                        let t = f.ty.as_str();
                        if t == want || (!exact && d.subtype(t, want)) {
                            cands.push((s.clone(), f.name.name.clone()));
                        }
                    }
                }
                match cands.choose(&mut self.rng).cloned() {
                    Some((s, f)) => {
                        let recv = self.expr(w, &s, depth - 1, true, env, limit)?;
                        Some(Expr::select(recv, &f))
                    }
                    None => None,
                }
            }
            Kind::Call => {
                let mut cands: Vec<(String, usize)> = Vec::new();
                for (k, pm) in w.pool.iter().enumerate().take(limit) {
                    if !(pm.ret == want || (!exact && d.subtype(&pm.ret, want))) {
                        continue;
                    }
                    for (s, im) in w.structs.iter().zip(&w.impls) {
                        if im.contains(&k) {
                            cands.push((s.clone(), k));
                        }
                    }
                    for i in &w.inhabited_ifaces {
                        if d.find_method(i, &pm.name).is_some() {
                            for _ in 0..4 {
                                cands.push((i.clone(), k));
                            }
                        }
                    }
                }
                match cands.choose(&mut self.rng).cloned() {
                    Some((r, k)) => self.call(w, &r, k, depth, env, limit),
                    None => None,
                }
            }
            Kind::Assert => {
                let subjects: Vec<String> = if kind == Some(TypeKind::Struct) {
                    w.inhabited_ifaces
                        .iter()
                        .filter(|i| d.subtype(want, i))
                        .cloned()
                        .collect()
                } else if kind == Some(TypeKind::Interface) {
                    w.inhabited_ifaces.clone()
                } else {
                    vec![]
                };
                match subjects.choose(&mut self.rng).cloned() {
                    Some(i) => {
                        let e = self.expr(w, &i, depth - 1, true, env, limit)?;
                        Some(Expr::assert(e, want))
                    }
                    None => None,
                }
            }
            Kind::Prim => {
                let op = *[BinOp::Eq, BinOp::Lt, BinOp::And, BinOp::Or]
                    .choose(&mut self.rng)
                    .unwrap();
                let operand = match op {
                    BinOp::Lt => INT_TYPE,
                    BinOp::Eq if self.rng.gen_bool(0.5) => INT_TYPE,
                    _ => BOOL_TYPE,
                };
                let l = self.expr(w, operand, depth - 1, false, env, limit)?;
                let r = self.expr(w, operand, depth - 1, false, env, limit)?;
                Some(Expr::bin(op, l, r))
            }
        }
    }

    fn call(
        &mut self,
        w: &World,
        recv_ty: &str,
        k: usize,
        depth: usize,
        env: &TypeEnv,
        limit: usize,
    ) -> Option<Expr> {
        let recv = self.expr(w, recv_ty, depth - 1, true, env, limit)?;
        let pm = &w.pool[k];
        let name = pm.name.clone();
        let params: Vec<String> = pm.params.iter().map(|(_, t)| t.clone()).collect();
        let mut args = Vec::new();
        for t in &params {
            args.push(self.expr(w, t, depth - 1, false, env, limit)?);
        }
        Some(Expr::call(recv, &name, args))
    }
}

fn type_decl(name: &str, lit: TypeLit) -> Decl {
    Decl::Type(TypeDecl {
        name: Ident::new(name),
        lit,
        span: Default::default(),
    })
}

/// Whether `p` is well-formed and well-typed.
pub fn well_typed(p: &Program) -> bool {
    check_wellformed(p).is_empty()
        && TypeChecker::new(&Decls::of_program(p))
            .check_program(p)
            .is_ok()
}

/// Greedily shrinks `p` while it stays well-typed and `failing` keeps
/// holding. Every step removes a declaration, spec, field or parameter,
/// replaces a subterm by a smaller one, or moves a signature type to an
/// earlier declared type, so the loop terminates. The result is a local
/// minimum with respect to these steps.
pub fn shrink(p: &Program, failing: &dyn Fn(&Program) -> bool) -> Program {
    let mut cur = p.clone();
    while let Some(next) = candidates(&cur)
        .into_iter()
        .find(|q| well_typed(q) && failing(q))
    {
        cur = next;
    }
    cur
}

fn candidates(p: &Program) -> Vec<Program> {
    let mut out = Vec::new();
    let method_names: std::collections::BTreeSet<String> =
        p.methods().map(|m| m.name().to_string()).collect();
    let type_names: Vec<String> = p.types().map(|t| t.name.name.clone()).collect();

    for i in 0..p.decls.len() {
        let mut q = p.clone();
        let removed = q.decls.remove(i);
        out.push(q.clone());
        match removed {
            // Redirect the callers of a removed method.
            Decl::Method(m) => {
                for to in method_names.iter().filter(|t| *t != m.name()) {
                    let mut r = q.clone();
                    for_each_expr(&mut r, |e| rename_calls(e, m.name(), to));
                    out.push(r.clone());
                    // Also let interfaces ask for the target method instead.
                    let target = p.methods().find(|d| d.name() == to).unwrap().spec.clone();
                    for d in &mut r.decls {
                        if let Decl::Type(TypeDecl {
                            lit: TypeLit::Interface(specs),
                            ..
                        }) = d
                        {
                            for s in specs.iter_mut().filter(|s| s.name.name == m.name()) {
                                *s = target.clone();
                            }
                        }
                    }
                    out.push(r);
                }
            }
            // Merge a removed type into another one.
            Decl::Type(t) => {
                for to in type_names.iter().filter(|u| **u != t.name.name) {
                    let mut r = q.clone();
                    rename_type(&mut r, &t.name.name, to);
                    out.push(r);
                }
            }
        }
    }

    for (i, d) in p.decls.iter().enumerate() {
        let Decl::Type(t) = d else { continue };
        match &t.lit {
            TypeLit::Interface(specs) => {
                for j in 0..specs.len() {
                    let mut q = p.clone();
                    if let Decl::Type(TypeDecl {
                        lit: TypeLit::Interface(specs),
                        ..
                    }) = &mut q.decls[i]
                    {
                        specs.remove(j);
                    }
                    out.push(q);
                }
            }
            TypeLit::Struct(fields) => {
                for j in 0..fields.len() {
                    let mut q = p.clone();
                    if let Decl::Type(TypeDecl {
                        lit: TypeLit::Struct(fields),
                        ..
                    }) = &mut q.decls[i]
                    {
                        fields.remove(j);
                    }
                    let ty = t.name.name.clone();
                    for_each_expr(&mut q, |e| drop_literal_arg(e, &ty, j));
                    out.push(q);
                }
            }
        }
    }

    for m in &method_names {
        let arity = p
            .methods()
            .find(|d| d.name() == m)
            .map_or(0, |d| d.spec.sig.params.len());
        for j in 0..arity {
            let mut q = p.clone();
            drop_param(&mut q, m, j);
            out.push(q);
        }
    }

    // Retype a signature position to a type declared earlier.
    let index = |t: &str| type_names.iter().position(|u| u == t);
    for m in &method_names {
        let Some(decl) = p.methods().find(|d| d.name() == m) else {
            continue;
        };
        let sig = &decl.spec.sig;
        for pos in 0..=sig.params.len() {
            let ty = if pos < sig.params.len() {
                &sig.params[pos].ty.name
            } else {
                &sig.ret.name
            };
            let Some(k) = index(ty) else { continue };
            for to in &type_names[..k] {
                let mut q = p.clone();
                retype(&mut q, m, pos, to);
                out.push(q);
            }
        }
    }

    let nullary: Vec<Expr> = p
        .types()
        .filter(|t| matches!(&t.lit, TypeLit::Struct(f) if f.is_empty()))
        .map(|t| Expr::lit(&t.name.name, vec![]))
        .collect();
    let replace = |e: &Expr, put: &mut dyn FnMut(Expr)| {
        let mut n = 0;
        e.walk(&mut |_| n += 1);
        for pos in 0..n {
            let node = nth_node(e, pos);
            let mut repls = smaller_exprs(node);
            if node.size() > 1 {
                repls.extend(nullary.iter().cloned());
            }
            for r in repls {
                let mut e2 = e.clone();
                *nth_node_mut(&mut e2, pos) = r;
                put(e2);
            }
        }
    };
    replace(&p.main, &mut |e| {
        let mut q = p.clone();
        q.main = e;
        out.push(q);
    });
    for (i, d) in p.decls.iter().enumerate() {
        if let Decl::Method(m) = d {
            replace(&m.body, &mut |e| {
                let mut q = p.clone();
                if let Decl::Method(m) = &mut q.decls[i] {
                    m.body = e;
                }
                out.push(q);
            });
        }
    }
    out
}

fn children_mut(e: &mut Expr) -> Vec<&mut Expr> {
    match &mut e.kind {
        ExprKind::Var(_) | ExprKind::Int(_) | ExprKind::Bool(_) => vec![],
        ExprKind::Call { recv, args, .. } => {
            let mut v = vec![&mut **recv];
            v.extend(args.iter_mut());
            v
        }
        ExprKind::StructLit { args, .. } => args.iter_mut().collect(),
        ExprKind::Select { recv, .. } | ExprKind::Assert { recv, .. } => vec![&mut **recv],
        ExprKind::Bin { lhs, rhs, .. } => vec![&mut **lhs, &mut **rhs],
    }
}

/// Applies `f` bottom-up to every node of `main` and of every method body.
fn for_each_expr(p: &mut Program, mut f: impl FnMut(&mut Expr)) {
    fn go(e: &mut Expr, f: &mut impl FnMut(&mut Expr)) {
        for c in children_mut(e) {
            go(c, f);
        }
        f(e);
    }
    go(&mut p.main, &mut f);
    for d in &mut p.decls {
        if let Decl::Method(m) = d {
            go(&mut m.body, &mut f);
        }
    }
}

fn nth_node(e: &Expr, n: usize) -> &Expr {
    let mut i = 0;
    let mut found = None;
    e.walk(&mut |s| {
        if i == n {
            found = Some(s);
        }
        i += 1;
    });
    found.expect("node index in range")
}

fn nth_node_mut(e: &mut Expr, n: usize) -> &mut Expr {
    fn go<'a>(e: &'a mut Expr, n: &mut usize) -> Option<&'a mut Expr> {
        if *n == 0 {
            return Some(e);
        }
        *n -= 1;
        children_mut(e).into_iter().find_map(|c| go(c, n))
    }
    let mut n = n;
    go(e, &mut n).expect("node index in range")
}

fn rename_calls(e: &mut Expr, from: &str, to: &str) {
    if let ExprKind::Call { method, .. } = &mut e.kind {
        if method.name == from {
            *method = Ident::new(to);
        }
    }
}

fn drop_literal_arg(e: &mut Expr, ty: &str, j: usize) {
    if let ExprKind::StructLit { ty: t, args } = &mut e.kind {
        if t.name == ty && j < args.len() {
            args.remove(j);
        }
    }
}

/// Removes parameter `j` from every declaration, spec and call of `m`.
fn drop_param(p: &mut Program, m: &str, j: usize) {
    let drop = |sig: &mut Signature| {
        if j < sig.params.len() {
            sig.params.remove(j);
        }
    };
    for d in &mut p.decls {
        match d {
            Decl::Method(md) if md.name() == m => drop(&mut md.spec.sig),
            Decl::Type(TypeDecl {
                lit: TypeLit::Interface(specs),
                ..
            }) => {
                specs
                    .iter_mut()
                    .filter(|s| s.name.name == m)
                    .for_each(|s| drop(&mut s.sig));
            }
            _ => {}
        }
    }
    for_each_expr(p, |e| {
        if let ExprKind::Call { method, args, .. } = &mut e.kind {
            if method.name == m && j < args.len() {
                args.remove(j);
            }
        }
    });
}

/// Sets position `pos` of every signature of `m` to `to`; the position past
/// the last parameter is the result.
fn retype(p: &mut Program, m: &str, pos: usize, to: &str) {
    let set = |sig: &mut Signature| match sig.params.get_mut(pos) {
        Some(b) => b.ty = Ident::new(to),
        None => sig.ret = Ident::new(to),
    };
    for d in &mut p.decls {
        match d {
            Decl::Method(md) if md.name() == m => set(&mut md.spec.sig),
            Decl::Type(TypeDecl {
                lit: TypeLit::Interface(specs),
                ..
            }) => {
                specs
                    .iter_mut()
                    .filter(|s| s.name.name == m)
                    .for_each(|s| set(&mut s.sig));
            }
            _ => {}
        }
    }
}

/// Replaces every occurrence of type name `from` by `to`.
fn rename_type(p: &mut Program, from: &str, to: &str) {
    let fix = |i: &mut Ident| {
        if i.name == from {
            i.name = to.to_string();
        }
    };
    let fix_sig = |sig: &mut Signature| {
        sig.params.iter_mut().for_each(|b| fix(&mut b.ty));
        fix(&mut sig.ret);
    };
    for d in &mut p.decls {
        match d {
            Decl::Type(t) => match &mut t.lit {
                TypeLit::Struct(fields) => fields.iter_mut().for_each(|b| fix(&mut b.ty)),
                TypeLit::Interface(specs) => specs.iter_mut().for_each(|s| fix_sig(&mut s.sig)),
            },
            Decl::Method(m) => {
                fix(&mut m.recv.ty);
                fix_sig(&mut m.spec.sig);
            }
        }
    }
    for_each_expr(p, |e| match &mut e.kind {
        ExprKind::StructLit { ty, .. } | ExprKind::Assert { ty, .. } => fix(ty),
        _ => {}
    });
}

/// Proper subexpressions of `e`, largest first.
fn smaller_exprs(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    e.walk(&mut |s| {
        if !std::ptr::eq(s, e) {
            out.push(s.clone());
        }
    });
    out.sort_by_key(|s| std::cmp::Reverse(s.size()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg::print_program;

    #[test]
    fn generated_programs_are_well_typed() {
        for mode in [Mode::Core, Mode::Ext] {
            for seed in 0..200 {
                let cfg = GenConfig {
                    seed,
                    mode,
                    ..GenConfig::default()
                };
                let p = gen_program(&cfg);
                assert!(
                    check_wellformed(&p).is_empty(),
                    "seed {seed}:\n{}",
                    print_program(&p)
                );
                assert!(well_typed(&p), "seed {seed}:\n{}", print_program(&p));
            }
        }
    }

    #[test]
    fn smallest_configuration() {
        let cfg = GenConfig {
            max_structs: 1,
            max_ifaces: 0,
            expr_depth: 1,
            ..GenConfig::default()
        };
        for seed in 0..20 {
            let p = gen_program(&cfg.with_seed(seed));
            assert!(well_typed(&p));
            assert_eq!(p.types().count(), 1);
        }
    }

    #[test]
    fn deterministic() {
        let cfg = GenConfig {
            seed: 42,
            ..GenConfig::default()
        };
        assert_eq!(
            print_program(&gen_program(&cfg)),
            print_program(&gen_program(&cfg))
        );
    }

    #[test]
    fn shrink_fixpoint() {
        let p = crate::fg::parse_program("type T struct {} func main() { _ = T{} }", Mode::Core)
            .unwrap();
        let keep = |q: &Program| q.types().count() == 1;
        assert_eq!(shrink(&p, &keep), p);
    }

    #[test]
    fn config_validation() {
        assert!(GenConfig::default().validate().is_ok());
        assert!(GenConfig {
            max_structs: 0,
            ..GenConfig::default()
        }
        .validate()
        .is_err());
        assert!(GenConfig {
            assert_probability: 1.5,
            ..GenConfig::default()
        }
        .validate()
        .is_err());
    }
}
