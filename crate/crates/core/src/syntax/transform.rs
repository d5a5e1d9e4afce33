//! Substitution, desugaring, replication elimination and static analysis.

use std::collections::BTreeSet;

use super::{DefId, Dialect, Formula, Name, ParamDef, ProcTerm, Program, ValueTerm, VarId};

// ---- variables ----------------------------------------------------------------

fn vterm_mentions(t: &ValueTerm, x: VarId) -> bool {
    match t {
        ValueTerm::Num(_) => false,
        ValueTerm::Var(v) => *v == x,
        ValueTerm::Add(l, r) => vterm_mentions(l, x) || vterm_mentions(r, x),
    }
}

fn vterm_max_var(t: &ValueTerm) -> Option<u64> {
    let mut vs = Vec::new();
    t.vars(&mut vs);
    vs.into_iter().map(|v| v.0).max()
}

pub fn subst_vterm(t: &ValueTerm, v: VarId, s: &ValueTerm) -> ValueTerm {
    match t {
        ValueTerm::Num(_) => t.clone(),
        ValueTerm::Var(x) if *x == v => s.clone(),
        ValueTerm::Var(_) => t.clone(),
        ValueTerm::Add(l, r) => ValueTerm::add(subst_vterm(l, v, s), subst_vterm(r, v, s)),
    }
}

fn formula_max_var(phi: &Formula) -> u64 {
    match phi {
        Formula::False | Formula::True => 0,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            formula_max_var(a).max(formula_max_var(b))
        }
        Formula::Exists(x, b) | Formula::Forall(x, b) => x.0.max(formula_max_var(b)),
        Formula::Lt(l, r) | Formula::Eq(l, r) => vterm_max_var(l)
            .unwrap_or(0)
            .max(vterm_max_var(r).unwrap_or(0)),
    }
}

/// Capture-avoiding `φ{s/v}`: a quantifier whose variable occurs in `s` is renamed first.
pub fn subst_formula(phi: &Formula, v: VarId, s: &ValueTerm) -> Formula {
    match phi {
        Formula::False | Formula::True => phi.clone(),
        Formula::And(a, b) => Formula::and(subst_formula(a, v, s), subst_formula(b, v, s)),
        Formula::Or(a, b) => Formula::or(subst_formula(a, v, s), subst_formula(b, v, s)),
        Formula::Implies(a, b) => {
            Formula::implies(subst_formula(a, v, s), subst_formula(b, v, s))
        }
        Formula::Exists(x, b) | Formula::Forall(x, b) => {
            let rebuild = |x: VarId, b: Formula| match phi {
                Formula::Exists(..) => Formula::Exists(x, Box::new(b)),
                _ => Formula::Forall(x, Box::new(b)),
            };
            if *x == v {
                return phi.clone();
            }
            if vterm_mentions(s, *x) {
                let fresh = VarId(
                    formula_max_var(b)
                        .max(vterm_max_var(s).unwrap_or(0))
                        .max(v.0)
                        .max(x.0)
                        + 1,
                );
                let renamed = subst_formula(b, *x, &ValueTerm::Var(fresh));
                rebuild(fresh, subst_formula(&renamed, v, s))
            } else {
                rebuild(*x, subst_formula(b, v, s))
            }
        }
        Formula::Lt(l, r) => Formula::Lt(subst_vterm(l, v, s), subst_vterm(r, v, s)),
        Formula::Eq(l, r) => Formula::Eq(subst_vterm(l, v, s), subst_vterm(r, v, s)),
    }
}

/// Every variable occurrence in `t`, binders included.
pub(crate) fn all_vars(t: &ProcTerm, out: &mut Vec<VarId>) {
    fn formula(phi: &Formula, out: &mut Vec<VarId>) {
        match phi {
            Formula::False | Formula::True => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                formula(a, out);
                formula(b, out);
            }
            Formula::Exists(x, b) | Formula::Forall(x, b) => {
                out.push(*x);
                formula(b, out);
            }
            Formula::Lt(l, r) | Formula::Eq(l, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }
    match t {
        ProcTerm::Nil | ProcTerm::Universal(_) | ProcTerm::Running(_) => {}
        ProcTerm::In(_, x, b) | ProcTerm::RepIn(_, x, b) => {
            out.push(*x);
            all_vars(b, out);
        }
        ProcTerm::Out(_, v, b) | ProcTerm::RepOut(_, v, b) => {
            v.vars(out);
            all_vars(b, out);
        }
        ProcTerm::Par(l, r) => {
            all_vars(l, out);
            all_vars(r, out);
        }
        ProcTerm::Res(_, b) => all_vars(b, out),
        ProcTerm::Cond(phi, b) => {
            formula(phi, out);
            all_vars(b, out);
        }
        ProcTerm::Call(_, args) => args.iter().for_each(|a| a.vars(out)),
        ProcTerm::IfElse(phi, s, e) => {
            formula(phi, out);
            all_vars(s, out);
            all_vars(e, out);
        }
        ProcTerm::Case {
            placeholder,
            scrutinee,
            arms,
        } => {
            out.push(*placeholder);
            scrutinee.vars(out);
            for (phi, arm) in arms {
                formula(phi, out);
                all_vars(arm, out);
            }
        }
        ProcTerm::Let(x, v, b) => {
            out.push(*x);
            v.vars(out);
            all_vars(b, out);
        }
    }
}

pub fn max_var_index(t: &ProcTerm) -> Option<u64> {
    let mut vs = Vec::new();
    all_vars(t, &mut vs);
    vs.into_iter().map(|v| v.0).max()
}

fn fresh_var(t: &ProcTerm, v: VarId, s: &ValueTerm, x: VarId) -> VarId {
    let m = max_var_index(t)
        .unwrap_or(0)
        .max(vterm_max_var(s).unwrap_or(0))
        .max(v.0)
        .max(x.0);
    VarId(m + 1)
}

/// `T{s/v}`: replaces the free occurrences of `v`. Occurrences under a binder
/// of `v` are untouched; a binder that would capture a variable of `s` is
/// renamed (never the case when `s` is closed).
pub fn subst_value(t: &ProcTerm, v: VarId, s: &ValueTerm) -> ProcTerm {
    // Substitutes under a binder `x`, renaming it when `s` mentions it.
    let under = |x: VarId, body: &ProcTerm| -> (VarId, ProcTerm) {
        if x == v {
            (x, body.clone())
        } else if vterm_mentions(s, x) {
            let y = fresh_var(body, v, s, x);
            let renamed = subst_value(body, x, &ValueTerm::Var(y));
            (y, subst_value(&renamed, v, s))
        } else {
            (x, subst_value(body, v, s))
        }
    };
    match t {
        ProcTerm::Nil | ProcTerm::Universal(_) | ProcTerm::Running(_) => t.clone(),
        ProcTerm::In(a, x, b) => {
            let (x, b) = under(*x, b);
            ProcTerm::In(*a, x, Box::new(b))
        }
        ProcTerm::RepIn(a, x, b) => {
            let (x, b) = under(*x, b);
            ProcTerm::RepIn(*a, x, Box::new(b))
        }
        ProcTerm::Out(a, u, b) => {
            ProcTerm::Out(*a, subst_vterm(u, v, s), Box::new(subst_value(b, v, s)))
        }
        ProcTerm::RepOut(a, u, b) => {
            ProcTerm::RepOut(*a, subst_vterm(u, v, s), Box::new(subst_value(b, v, s)))
        }
        ProcTerm::Par(l, r) => ProcTerm::par(subst_value(l, v, s), subst_value(r, v, s)),
        ProcTerm::Res(c, b) => ProcTerm::Res(*c, Box::new(subst_value(b, v, s))),
        ProcTerm::Cond(phi, b) => {
            ProcTerm::Cond(subst_formula(phi, v, s), Box::new(subst_value(b, v, s)))
        }
        ProcTerm::Call(j, args) => {
            ProcTerm::Call(*j, args.iter().map(|a| subst_vterm(a, v, s)).collect())
        }
        ProcTerm::IfElse(phi, a, b) => ProcTerm::if_else(
            subst_formula(phi, v, s),
            subst_value(a, v, s),
            subst_value(b, v, s),
        ),
        ProcTerm::Case {
            placeholder,
            scrutinee,
            arms,
        } => {
            if *placeholder == v || vterm_mentions(s, *placeholder) {
                // The placeholder only ever stands for the scrutinee, so
                // expanding it first is both capture-free and shadow-correct.
                let p = *placeholder;
                let arms = arms
                    .iter()
                    .map(|(phi, arm)| {
                        (
                            subst_formula(&subst_formula(phi, p, scrutinee), v, s),
                            subst_value(&subst_value(arm, p, scrutinee), v, s),
                        )
                    })
                    .collect();
                ProcTerm::Case {
                    placeholder: fresh_var(t, v, s, p),
                    scrutinee: subst_vterm(scrutinee, v, s),
                    arms,
                }
            } else {
                let scrutinee = subst_vterm(scrutinee, v, s);
                ProcTerm::Case {
                    placeholder: *placeholder,
                    scrutinee,
                    arms: arms
                        .iter()
                        .map(|(phi, arm)| (subst_formula(phi, v, s), subst_value(arm, v, s)))
                        .collect(),
                }
            }
        }
        ProcTerm::Let(x, u, b) => {
            let u = subst_vterm(u, v, s);
            let (x, b) = under(*x, b);
            ProcTerm::Let(x, u, Box::new(b))
        }
    }
}

/// Free value variables of `t`.
pub fn free_vars(t: &ProcTerm) -> BTreeSet<VarId> {
    fn go(t: &ProcTerm, out: &mut BTreeSet<VarId>) {
        let bind = |x: VarId, b: &ProcTerm, out: &mut BTreeSet<VarId>| {
            let mut inner = BTreeSet::new();
            go(b, &mut inner);
            inner.remove(&x);
            out.extend(inner);
        };
        let mut vs = Vec::new();
        match t {
            ProcTerm::Nil | ProcTerm::Universal(_) | ProcTerm::Running(_) => {}
            ProcTerm::In(_, x, b) | ProcTerm::RepIn(_, x, b) => bind(*x, b, out),
            ProcTerm::Out(_, u, b) | ProcTerm::RepOut(_, u, b) => {
                u.vars(&mut vs);
                go(b, out);
            }
            ProcTerm::Par(l, r) => {
                go(l, out);
                go(r, out);
            }
            ProcTerm::Res(_, b) => go(b, out),
            ProcTerm::Cond(phi, b) => {
                phi.free_vars(&mut vs);
                go(b, out);
            }
            ProcTerm::Call(_, args) => args.iter().for_each(|a| a.vars(&mut vs)),
            ProcTerm::IfElse(phi, a, b) => {
                phi.free_vars(&mut vs);
                go(a, out);
                go(b, out);
            }
            ProcTerm::Case {
                placeholder,
                scrutinee,
                arms,
            } => {
                scrutinee.vars(&mut vs);
                let mut inner = BTreeSet::new();
                for (phi, arm) in arms {
                    let mut fv = Vec::new();
                    phi.free_vars(&mut fv);
                    inner.extend(fv);
                    go(arm, &mut inner);
                }
                inner.remove(placeholder);
                out.extend(inner);
            }
            ProcTerm::Let(x, u, b) => {
                u.vars(&mut vs);
                bind(*x, b, out);
            }
        }
        out.extend(vs);
    }
    let mut out = BTreeSet::new();
    go(t, &mut out);
    out
}

// ---- names ------------------------------------------------------------------

/// Applies `f` to every name occurrence, binders included.
pub fn rename_names(t: &ProcTerm, f: &mut dyn FnMut(Name) -> Name) -> ProcTerm {
    match t {
        ProcTerm::Nil | ProcTerm::Call(..) => t.clone(),
        ProcTerm::Universal(seed) => {
            let mut seed = seed.clone();
            seed.chan = f(seed.chan);
            ProcTerm::Universal(seed)
        }
        ProcTerm::Running(_) => t.clone(),
        ProcTerm::In(a, x, b) => ProcTerm::In(f(*a), *x, Box::new(rename_names(b, f))),
        ProcTerm::RepIn(a, x, b) => ProcTerm::RepIn(f(*a), *x, Box::new(rename_names(b, f))),
        ProcTerm::Out(a, u, b) => ProcTerm::Out(f(*a), u.clone(), Box::new(rename_names(b, f))),
        ProcTerm::RepOut(a, u, b) => {
            ProcTerm::RepOut(f(*a), u.clone(), Box::new(rename_names(b, f)))
        }
        ProcTerm::Par(l, r) => {
            let l = rename_names(l, f);
            ProcTerm::par(l, rename_names(r, f))
        }
        ProcTerm::Res(c, b) => ProcTerm::Res(f(*c), Box::new(rename_names(b, f))),
        ProcTerm::Cond(phi, b) => ProcTerm::Cond(phi.clone(), Box::new(rename_names(b, f))),
        ProcTerm::IfElse(phi, a, b) => {
            let a = rename_names(a, f);
            ProcTerm::if_else(phi.clone(), a, rename_names(b, f))
        }
        ProcTerm::Case {
            placeholder,
            scrutinee,
            arms,
        } => ProcTerm::Case {
            placeholder: *placeholder,
            scrutinee: scrutinee.clone(),
            arms: arms
                .iter()
                .map(|(phi, arm)| (phi.clone(), rename_names(arm, f)))
                .collect(),
        },
        ProcTerm::Let(x, u, b) => ProcTerm::Let(*x, u.clone(), Box::new(rename_names(b, f))),
    }
}

/// Largest name index occurring in `t` (binders and runtime wrappers included).
pub fn max_name_index(t: &ProcTerm) -> Option<u64> {
    let mut m: Option<u64> = None;
    let mut note = |a: Name| {
        m = Some(m.map_or(a.0, |k| k.max(a.0)));
        a
    };
    rename_names(t, &mut note);
    for_each_runtime_sig(t, &mut |sig| {
        for g in sig.globals() {
            m = Some(m.map_or(g.0, |k| k.max(g.0)));
        }
    });
    m
}

fn for_each_runtime_sig(t: &ProcTerm, f: &mut dyn FnMut(&super::TypeSig)) {
    match t {
        ProcTerm::Universal(seed) => {
            f(&seed.sig);
        }
        ProcTerm::Running(cfg) => f(cfg.sig()),
        ProcTerm::Nil | ProcTerm::Call(..) => {}
        ProcTerm::In(_, _, b)
        | ProcTerm::Out(_, _, b)
        | ProcTerm::Res(_, b)
        | ProcTerm::Cond(_, b)
        | ProcTerm::RepIn(_, _, b)
        | ProcTerm::RepOut(_, _, b)
        | ProcTerm::Let(_, _, b) => for_each_runtime_sig(b, f),
        ProcTerm::Par(l, r) | ProcTerm::IfElse(_, l, r) => {
            for_each_runtime_sig(l, f);
            for_each_runtime_sig(r, f);
        }
        ProcTerm::Case { arms, .. } => arms.iter().for_each(|(_, a)| for_each_runtime_sig(a, f)),
    }
}

/// Static counts of a term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Analysis {
    pub free_vars: BTreeSet<VarId>,
    /// Names with an occurrence outside every restriction of that name, in
    /// first-occurrence order.
    pub global_names: Vec<Name>,
    /// Number of distinct names bound by a restriction somewhere in the term.
    pub local_name_count: usize,
}

pub fn analyze(t: &ProcTerm) -> Analysis {
    fn go(t: &ProcTerm, bound: &mut Vec<Name>, globals: &mut Vec<Name>, locals: &mut BTreeSet<Name>) {
        let mut see = |a: Name, bound: &Vec<Name>| {
            if !bound.contains(&a) && !globals.contains(&a) {
                globals.push(a);
            }
        };
        match t {
            ProcTerm::Nil | ProcTerm::Call(..) => {}
            ProcTerm::Universal(seed) => {
                see(seed.chan, bound);
                for g in seed.sig.globals() {
                    see(*g, bound);
                }
            }
            ProcTerm::Running(cfg) => {
                for g in cfg.sig().globals() {
                    see(*g, bound);
                }
            }
            ProcTerm::In(a, _, b)
            | ProcTerm::Out(a, _, b)
            | ProcTerm::RepIn(a, _, b)
            | ProcTerm::RepOut(a, _, b) => {
                see(*a, bound);
                go(b, bound, globals, locals);
            }
            ProcTerm::Par(l, r) | ProcTerm::IfElse(_, l, r) => {
                go(l, bound, globals, locals);
                go(r, bound, globals, locals);
            }
            ProcTerm::Res(c, b) => {
                locals.insert(*c);
                bound.push(*c);
                go(b, bound, globals, locals);
                bound.pop();
            }
            ProcTerm::Cond(_, b) | ProcTerm::Let(_, _, b) => go(b, bound, globals, locals),
            ProcTerm::Case { arms, .. } => {
                for (_, arm) in arms {
                    go(arm, bound, globals, locals);
                }
            }
        }
    }
    let mut globals = Vec::new();
    let mut locals = BTreeSet::new();
    go(t, &mut Vec::new(), &mut globals, &mut locals);
    Analysis {
        free_vars: free_vars(t),
        global_names: globals,
        local_name_count: locals.len(),
    }
}

// ---- desugaring ---------------------------------------------------------------

/// Removes `if … else`, `case` and `let`.
pub fn desugar_term(t: &ProcTerm) -> ProcTerm {
    match t {
        ProcTerm::Nil | ProcTerm::Call(..) | ProcTerm::Universal(_) | ProcTerm::Running(_) => {
            t.clone()
        }
        ProcTerm::In(a, x, b) => ProcTerm::In(*a, *x, Box::new(desugar_term(b))),
        ProcTerm::RepIn(a, x, b) => ProcTerm::RepIn(*a, *x, Box::new(desugar_term(b))),
        ProcTerm::Out(a, u, b) => ProcTerm::Out(*a, u.clone(), Box::new(desugar_term(b))),
        ProcTerm::RepOut(a, u, b) => ProcTerm::RepOut(*a, u.clone(), Box::new(desugar_term(b))),
        ProcTerm::Par(l, r) => ProcTerm::par(desugar_term(l), desugar_term(r)),
        ProcTerm::Res(c, b) => ProcTerm::Res(*c, Box::new(desugar_term(b))),
        ProcTerm::Cond(phi, b) => ProcTerm::Cond(phi.clone(), Box::new(desugar_term(b))),
        ProcTerm::IfElse(phi, s, e) => two_leg(phi.clone(), desugar_term(s), desugar_term(e)),
        ProcTerm::Case {
            placeholder,
            scrutinee,
            arms,
        } => {
            let arms: Vec<(Formula, ProcTerm)> = arms
                .iter()
                .map(|(phi, arm)| {
                    (
                        subst_formula(phi, *placeholder, scrutinee),
                        subst_value(&desugar_term(arm), *placeholder, scrutinee),
                    )
                })
                .collect();
            let mut it = arms.into_iter().rev();
            match it.next() {
                None => ProcTerm::Nil,
                Some((phi, arm)) => it.fold(ProcTerm::cond(phi, arm), |rest, (phi, arm)| {
                    two_leg(phi, arm, rest)
                }),
            }
        }
        ProcTerm::Let(x, u, b) => subst_value(&desugar_term(b), *x, u),
    }
}

fn two_leg(phi: Formula, s: ProcTerm, e: ProcTerm) -> ProcTerm {
    ProcTerm::par(
        ProcTerm::cond(phi.clone(), s),
        ProcTerm::cond(Formula::not(phi), e),
    )
}

pub fn desugar(p: &Program) -> Program {
    Program {
        dialect: p.dialect,
        defs: p
            .defs
            .iter()
            .map(|d| ParamDef {
                name: d.name.clone(),
                params: d.params.clone(),
                body: desugar_term(&d.body),
            })
            .collect(),
        main: desugar_term(&p.main),
        symtab: p.symtab.clone(),
    }
}

/// Replaces every replicated prefix by a call to a fresh recursive
/// definition: `!a(x).S` becomes `C(x⃗)` with `C(x⃗) = a(x).S | C(x⃗)`, and
/// `!'a(t).T` becomes `C(x⃗)` with `C(x⃗) = 'a(t).T | C(x⃗)`, where `x⃗` are
/// the free variables of the replicated term.
pub fn derive_replication(p: &Program) -> Program {
    let p = desugar(p);
    if !p.main.has_replication() && p.defs.iter().all(|d| !d.body.has_replication()) {
        return p;
    }
    let mut defs = p.defs.clone();
    let main = replace_replication(&p.main, &mut defs);
    for i in 0..p.defs.len() {
        let body = replace_replication(&defs[i].body.clone(), &mut defs);
        defs[i].body = body;
    }
    Program {
        dialect: Dialect::P,
        defs,
        main,
        symtab: p.symtab,
    }
}

fn replace_replication(t: &ProcTerm, defs: &mut Vec<ParamDef>) -> ProcTerm {
    let recurse = |b: &ProcTerm, defs: &mut Vec<ParamDef>| Box::new(replace_replication(b, defs));
    match t {
        ProcTerm::RepIn(a, x, b) => {
            let body = replace_replication(b, defs);
            replicator(ProcTerm::In(*a, *x, Box::new(body)), defs)
        }
        ProcTerm::RepOut(a, u, b) => {
            let body = replace_replication(b, defs);
            replicator(ProcTerm::Out(*a, u.clone(), Box::new(body)), defs)
        }
        ProcTerm::Nil | ProcTerm::Call(..) | ProcTerm::Universal(_) | ProcTerm::Running(_) => {
            t.clone()
        }
        ProcTerm::In(a, x, b) => ProcTerm::In(*a, *x, recurse(b, defs)),
        ProcTerm::Out(a, u, b) => ProcTerm::Out(*a, u.clone(), recurse(b, defs)),
        ProcTerm::Par(l, r) => {
            let l = replace_replication(l, defs);
            ProcTerm::par(l, replace_replication(r, defs))
        }
        ProcTerm::Res(c, b) => ProcTerm::Res(*c, recurse(b, defs)),
        ProcTerm::Cond(phi, b) => ProcTerm::Cond(phi.clone(), recurse(b, defs)),
        ProcTerm::IfElse(..) | ProcTerm::Case { .. } | ProcTerm::Let(..) => {
            replace_replication(&desugar_term(t), defs)
        }
    }
}

// Defines `C(x⃗) = prefix | C(x⃗)` and returns the call `C(x⃗)`.
fn replicator(prefix: ProcTerm, defs: &mut Vec<ParamDef>) -> ProcTerm {
    let params: Vec<VarId> = free_vars(&prefix).into_iter().collect();
    let id = DefId(defs.len() as u64 + 1);
    let call = ProcTerm::Call(id, params.iter().map(|v| ValueTerm::Var(*v)).collect());
    let mut k = defs.len() + 1;
    while defs.iter().any(|d| d.name == format!("C{k}")) {
        k += 1;
    }
    defs.push(ParamDef {
        name: format!("C{k}"),
        params,
        body: ProcTerm::par(prefix, call.clone()),
    });
    call
}

#[cfg(test)]
mod tests {
    use super::super::{parse_source, parse_term};
    use super::*;

    #[test]
    fn two_leg_if_and_let() {
        let t = parse_term("if x0 = 1 then 'n1.0 else 'n2.0").unwrap();
        let phi = Formula::eq(ValueTerm::var(0), ValueTerm::num(1));
        let expect = ProcTerm::par(
            ProcTerm::cond(phi.clone(), ProcTerm::output(1, ValueTerm::num(0), ProcTerm::Nil)),
            ProcTerm::cond(
                Formula::not(phi),
                ProcTerm::output(2, ValueTerm::num(0), ProcTerm::Nil),
            ),
        );
        assert_eq!(desugar_term(&t), expect);
        let t = parse_term("let x0 = 3 in 'n1(x0).0").unwrap();
        assert_eq!(desugar_term(&t), parse_term("'n1(3).0").unwrap());
        let core = parse_term("n1(x0).'n2(x0).0").unwrap();
        assert_eq!(desugar_term(&core), core);
    }

    #[test]
    fn case_expands_to_nested_ifs() {
        let t = parse_term("case 2 of _ = 1 => 'n1.0; _ = 2 => 'n2.0 end").unwrap();
        let d = desugar_term(&t);
        let expect = parse_term("if 2 = 1 then 'n1.0 | if ~2 = 1 then (if 2 = 2 then 'n2.0)").unwrap();
        assert_eq!(d, expect);
        assert_eq!(desugar_term(&d), d);
    }

    #[test]
    fn let_substitution_avoids_capture() {
        let t = parse_term("n1(x0).let x1 = x0 + 1 in n2(x0).'n3(x1).0").unwrap();
        let d = desugar_term(&t);
        // the inner binder of x0 must not capture the substituted x0
        let expect = parse_term("n1(x0).n2(x2).'n3(x0 + 1).0").unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn substitution_examples() {
        let one = ValueTerm::num(1);
        let t = parse_term("'n2(x0).0").unwrap();
        assert_eq!(subst_value(&t, VarId(0), &one), parse_term("'n2(1).0").unwrap());
        let t = parse_term("n1(x0).'n2(x0).0").unwrap();
        assert_eq!(subst_value(&t, VarId(0), &one), t);
        let t = parse_term("if x0 = 1 then 0").unwrap();
        assert_eq!(subst_value(&t, VarId(0), &one), parse_term("if 1 = 1 then 0").unwrap());
    }

    #[test]
    fn analysis_counts_distinct_local_names() {
        let t = parse_term("(n2)(n2(x0).0 | (n2)(n3)(n2(x1).0 | n3(x2).0))").unwrap();
        assert_eq!(analyze(&t).local_name_count, 2);
        let t = parse_term("'n1(x0).0").unwrap();
        assert_eq!(analyze(&t).free_vars.into_iter().collect::<Vec<_>>(), vec![VarId(0)]);
        let t = parse_term("(n3)(n1(x0).0)").unwrap();
        assert_eq!(analyze(&t).global_names, vec![Name(1)]);
    }

    #[test]
    fn replication_becomes_recursion() {
        let p = parse_source("main = !n1(x0).'n2(x0).0").unwrap();
        let q = derive_replication(&p);
        assert_eq!(q.dialect, Dialect::P);
        assert_eq!(q.main, ProcTerm::call(1, vec![]));
        assert_eq!(
            q.defs[0].body,
            ProcTerm::par(parse_term("n1(x0).'n2(x0).0").unwrap(), ProcTerm::call(1, vec![]))
        );
        let p = parse_source("main = !'n1(0).0").unwrap();
        let q = derive_replication(&p);
        assert_eq!(
            q.defs[0].body,
            ProcTerm::par(parse_term("'n1(0).0").unwrap(), ProcTerm::call(1, vec![]))
        );
        let p = parse_source("main = n1(x0).!'n2(x0).0").unwrap();
        let q = derive_replication(&p);
        assert_eq!(q.defs[0].params, vec![VarId(0)]);
        assert_eq!(
            q.main,
            ProcTerm::input(1, 0, ProcTerm::call(1, vec![ValueTerm::var(0)]))
        );
        let plain = parse_source("main = 'n1.0").unwrap();
        assert_eq!(derive_replication(&plain).main, plain.main);
    }
}
