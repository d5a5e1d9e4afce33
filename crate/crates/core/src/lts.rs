//! Direct operational semantics of VPC and VPC! processes.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::presburger::{self, EvalError};
use crate::syntax::{analyze, desugar_term, subst_value, DefId, Name, Nat, ParamDef, ProcTerm, Program, ValueTerm};
use crate::universal;

/// Default bound on nested unguarded definition unfoldings.
pub const DEFAULT_FUEL: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Action {
    Input(Name, Nat),
    Output(Name, Nat),
    Tau,
}

impl Action {
    pub fn subject(&self) -> Option<Name> {
        match self {
            Action::Input(a, _) | Action::Output(a, _) => Some(*a),
            Action::Tau => None,
        }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Input(a, v) => write!(f, "in {a} {v}"),
            Action::Output(a, v) => write!(f, "out {a} {v}"),
            Action::Tau => f.write_str("tau"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LtsError {
    #[error("fuel exhausted unfolding {0}: unguarded recursion")]
    FuelExhausted(DefId),
    #[error("call to undefined definition {0}")]
    UnknownDefinition(DefId),
    #[error("{def} expects {expected} arguments, got {found}")]
    Arity {
        def: DefId,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A closed term together with the definitions its calls refer to.
#[derive(Clone, Debug)]
pub struct DirectState {
    pub term: ProcTerm,
    pub defs: Arc<Vec<ParamDef>>,
}

impl DirectState {
    pub fn new(term: ProcTerm, defs: Arc<Vec<ParamDef>>) -> Self {
        DirectState { term, defs }
    }

    /// The start state of a program: its main term under its definitions.
    pub fn of_program(p: &Program) -> Self {
        DirectState::new(p.main.clone(), Arc::new(p.defs.clone()))
    }

    pub fn of_term(term: ProcTerm) -> Self {
        DirectState::new(term, Arc::new(Vec::new()))
    }

    /// A state running the universal engine from `cfg`.
    pub fn engine(cfg: universal::Config) -> Self {
        DirectState::of_term(canonical(ProcTerm::Running(Box::new(cfg))))
    }

    fn with_term(&self, term: ProcTerm) -> Self {
        DirectState {
            term,
            defs: Arc::clone(&self.defs),
        }
    }
}

impl PartialEq for DirectState {
    fn eq(&self, other: &Self) -> bool {
        self.term == other.term && (Arc::ptr_eq(&self.defs, &other.defs) || self.defs == other.defs)
    }
}

impl Eq for DirectState {}

impl Hash for DirectState {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.term.hash(state)
    }
}

impl fmt::Display for DirectState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.term)
    }
}

/// The transitions of `s`, with inputs offered only for values `0..=vbound`.
pub fn direct_transitions(
    s: &DirectState,
    vbound: u64,
    fuel: usize,
) -> Result<Vec<(Action, DirectState)>, LtsError> {
    let names = def_names(&s.defs);
    Ok(term_transitions(&s.term, &s.defs, vbound, fuel)?
        .into_iter()
        .map(|(a, t)| (a, s.with_term(tidy(t, &names))))
        .collect())
}

/// Transitions of a bare term under `defs`; residuals are not canonicalized.
pub fn term_transitions(
    t: &ProcTerm,
    defs: &[ParamDef],
    vbound: u64,
    fuel: usize,
) -> Result<Vec<(Action, ProcTerm)>, LtsError> {
    Ctx::new(defs, vbound, fuel).trans(t)
}

/// Residuals of `t` after receiving `value` on `a`. Unlike
/// [`term_transitions`] this is exact for every value.
pub fn term_receive(
    t: &ProcTerm,
    defs: &[ParamDef],
    a: Name,
    value: &Nat,
    fuel: usize,
) -> Result<Vec<ProcTerm>, LtsError> {
    Ctx::new(defs, 0, fuel).receive(t, a, value)
}

/// Strong-bisimulation-preserving cleanup of the active structure: parallel
/// `0` components vanish, `(c)0` and `if φ then 0` become `0`, and finished
/// engines become `0`.
pub fn canonical(t: ProcTerm) -> ProcTerm {
    canonical_in(t, &[])
}

/// [`canonical`], additionally dropping restrictions `(c)T` where `c` cannot
/// occur free in `T` or in any definition `T` may unfold.
pub fn canonical_in(t: ProcTerm, defs: &[ParamDef]) -> ProcTerm {
    let names = def_names(defs);
    tidy(t, &names)
}

fn tidy(t: ProcTerm, def_names: &[BTreeSet<Name>]) -> ProcTerm {
    match t {
        ProcTerm::Par(l, r) => match (tidy(*l, def_names), tidy(*r, def_names)) {
            (ProcTerm::Nil, x) | (x, ProcTerm::Nil) => x,
            (l, r) => ProcTerm::par(l, r),
        },
        ProcTerm::Res(c, b) => match tidy(*b, def_names) {
            ProcTerm::Nil => ProcTerm::Nil,
            b if !free_names(&b, def_names).contains(&c) => b,
            b => ProcTerm::Res(c, Box::new(b)),
        },
        ProcTerm::Cond(phi, b) => match tidy(*b, def_names) {
            ProcTerm::Nil => ProcTerm::Nil,
            b => ProcTerm::Cond(phi, Box::new(b)),
        },
        ProcTerm::Running(cfg) if cfg.is_nil() => ProcTerm::Nil,
        other => other,
    }
}

// Over-approximation of the names each definition may use freely, through
// the definitions it calls.
pub(crate) fn def_names(defs: &[ParamDef]) -> Vec<BTreeSet<Name>> {
    let calls: Vec<BTreeSet<usize>> = defs.iter().map(|d| called(&d.body)).collect();
    let mut names: Vec<BTreeSet<Name>> = defs
        .iter()
        .map(|d| analyze(&d.body).global_names.into_iter().collect())
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..defs.len() {
            for &k in &calls[i] {
                if k < defs.len() && k != i {
                    let extra: Vec<Name> = names[k].difference(&names[i]).copied().collect();
                    if !extra.is_empty() {
                        names[i].extend(extra);
                        changed = true;
                    }
                }
            }
        }
    }
    names
}

pub(crate) fn free_names(t: &ProcTerm, def_names: &[BTreeSet<Name>]) -> BTreeSet<Name> {
    let mut out: BTreeSet<Name> = analyze(t).global_names.into_iter().collect();
    for k in called(t) {
        if let Some(ns) = def_names.get(k) {
            out.extend(ns.iter().copied());
        }
    }
    if let ProcTerm::Universal(seed) = t {
        out.extend(seed.retarget.iter().copied());
    }
    out
}

// Zero-based positions of the definitions called anywhere in `t`.
fn called(t: &ProcTerm) -> BTreeSet<usize> {
    fn go(t: &ProcTerm, out: &mut BTreeSet<usize>) {
        match t {
            ProcTerm::Call(j, _) => {
                if let Some(i) = usize::try_from(j.0).ok().and_then(|j| j.checked_sub(1)) {
                    out.insert(i);
                }
            }
            ProcTerm::Nil | ProcTerm::Universal(_) | ProcTerm::Running(_) => {}
            ProcTerm::In(_, _, b)
            | ProcTerm::Out(_, _, b)
            | ProcTerm::Res(_, b)
            | ProcTerm::Cond(_, b)
            | ProcTerm::RepIn(_, _, b)
            | ProcTerm::RepOut(_, _, b)
            | ProcTerm::Let(_, _, b) => go(b, out),
            ProcTerm::Par(l, r) | ProcTerm::IfElse(_, l, r) => {
                go(l, out);
                go(r, out);
            }
            ProcTerm::Case { arms, .. } => arms.iter().for_each(|(_, a)| go(a, out)),
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut out);
    out
}

struct Ctx<'a> {
    defs: &'a [ParamDef],
    vbound: u64,
    fuel: usize,
    // Calls currently being unfolded without an intervening prefix.
    active: Vec<(DefId, Vec<Nat>)>,
}

impl<'a> Ctx<'a> {
    fn new(defs: &'a [ParamDef], vbound: u64, fuel: usize) -> Self {
        Ctx {
            defs,
            vbound,
            fuel,
            active: Vec::new(),
        }
    }

    /// Runs `f` on the body of `j(args)`; an identical nested re-entry yields nothing.
    fn unfold<T>(
        &mut self,
        j: DefId,
        args: &[ValueTerm],
        f: impl FnOnce(&mut Self, &ProcTerm) -> Result<Vec<T>, LtsError>,
    ) -> Result<Vec<T>, LtsError> {
        let def = usize::try_from(j.0)
            .ok()
            .and_then(|j| j.checked_sub(1))
            .and_then(|i| self.defs.get(i))
            .ok_or(LtsError::UnknownDefinition(j))?;
        if def.params.len() != args.len() {
            return Err(LtsError::Arity {
                def: j,
                expected: def.params.len(),
                found: args.len(),
            });
        }
        let values = args
            .iter()
            .map(presburger::eval_term)
            .collect::<Result<Vec<_>, _>>()?;
        let key = (j, values);
        if self.active.contains(&key) {
            return Ok(Vec::new());
        }
        if self.active.len() >= self.fuel {
            return Err(LtsError::FuelExhausted(j));
        }
        let mut body = def.body.clone();
        for (x, v) in def.params.iter().zip(&key.1) {
            body = subst_value(&body, *x, &ValueTerm::Num(v.clone()));
        }
        self.active.push(key);
        let out = f(self, &body);
        self.active.pop();
        out
    }

    fn trans(&mut self, t: &ProcTerm) -> Result<Vec<(Action, ProcTerm)>, LtsError> {
        Ok(match t {
            ProcTerm::Nil => Vec::new(),
            ProcTerm::In(a, x, body) => (0..=self.vbound)
                .map(|v| {
                    let next = subst_value(body, *x, &ValueTerm::num(v));
                    (Action::Input(*a, Nat::from(v)), next)
                })
                .collect(),
            ProcTerm::Out(a, t, body) => {
                vec![(Action::Output(*a, presburger::eval_term(t)?), (**body).clone())]
            }
            ProcTerm::RepIn(a, x, body) => (0..=self.vbound)
                .map(|v| {
                    let next = subst_value(body, *x, &ValueTerm::num(v));
                    (Action::Input(*a, Nat::from(v)), ProcTerm::par(next, t.clone()))
                })
                .collect(),
            ProcTerm::RepOut(a, v, body) => vec![(
                Action::Output(*a, presburger::eval_term(v)?),
                ProcTerm::par((**body).clone(), t.clone()),
            )],
            ProcTerm::Par(l, r) => {
                let lt = self.trans(l)?;
                let rt = self.trans(r)?;
                let mut out = Vec::with_capacity(lt.len() + rt.len());
                for (a, l2) in &lt {
                    out.push((a.clone(), ProcTerm::par(l2.clone(), (**r).clone())));
                }
                for (a, r2) in &rt {
                    out.push((a.clone(), ProcTerm::par((**l).clone(), r2.clone())));
                }
                for (a, l2) in &lt {
                    if let Action::Output(c, v) = a {
                        for r2 in self.receive(r, *c, v)? {
                            out.push((Action::Tau, ProcTerm::par(l2.clone(), r2)));
                        }
                    }
                }
                for (a, r2) in &rt {
                    if let Action::Output(c, v) = a {
                        for l2 in self.receive(l, *c, v)? {
                            out.push((Action::Tau, ProcTerm::par(l2, r2.clone())));
                        }
                    }
                }
                out
            }
            ProcTerm::Res(c, body) => self
                .trans(body)?
                .into_iter()
                .filter(|(a, _)| a.subject() != Some(*c))
                .map(|(a, b)| (a, ProcTerm::Res(*c, Box::new(b))))
                .collect(),
            ProcTerm::Cond(phi, body) => {
                if presburger::decide(phi)? {
                    self.trans(body)?
                } else {
                    Vec::new()
                }
            }
            ProcTerm::Call(j, args) => self.unfold(*j, args, |ctx, body| ctx.trans(body))?,
            ProcTerm::IfElse(..) | ProcTerm::Case { .. } | ProcTerm::Let(..) => {
                self.trans(&desugar_term(t))?
            }
            ProcTerm::Universal(seed) => (0..=self.vbound)
                .map(|v| {
                    let v = Nat::from(v);
                    let cfg = universal::boot_seed(seed, &v);
                    (Action::Input(seed.chan, v), ProcTerm::Running(Box::new(cfg)))
                })
                .collect(),
            ProcTerm::Running(cfg) => universal::config_transitions(cfg, self.vbound)
                .into_iter()
                .map(|(a, c)| (a, ProcTerm::Running(Box::new(c))))
                .collect(),
        })
    }

    fn receive(&mut self, t: &ProcTerm, a: Name, value: &Nat) -> Result<Vec<ProcTerm>, LtsError> {
        Ok(match t {
            ProcTerm::In(b, x, body) if *b == a => {
                vec![subst_value(body, *x, &ValueTerm::Num(value.clone()))]
            }
            ProcTerm::RepIn(b, x, body) if *b == a => vec![ProcTerm::par(
                subst_value(body, *x, &ValueTerm::Num(value.clone())),
                t.clone(),
            )],
            ProcTerm::Nil
            | ProcTerm::In(..)
            | ProcTerm::RepIn(..)
            | ProcTerm::Out(..)
            | ProcTerm::RepOut(..) => Vec::new(),
            ProcTerm::Par(l, r) => {
                let mut out: Vec<ProcTerm> = self
                    .receive(l, a, value)?
                    .into_iter()
                    .map(|l2| ProcTerm::par(l2, (**r).clone()))
                    .collect();
                for r2 in self.receive(r, a, value)? {
                    out.push(ProcTerm::par((**l).clone(), r2));
                }
                out
            }
            ProcTerm::Res(c, _) if *c == a => Vec::new(),
            ProcTerm::Res(c, body) => self
                .receive(body, a, value)?
                .into_iter()
                .map(|b| ProcTerm::Res(*c, Box::new(b)))
                .collect(),
            ProcTerm::Cond(phi, body) => {
                if presburger::decide(phi)? {
                    self.receive(body, a, value)?
                } else {
                    Vec::new()
                }
            }
            ProcTerm::Call(j, args) => {
                self.unfold(*j, args, |ctx, body| ctx.receive(body, a, value))?
            }
            ProcTerm::IfElse(..) | ProcTerm::Case { .. } | ProcTerm::Let(..) => {
                self.receive(&desugar_term(t), a, value)?
            }
            ProcTerm::Universal(seed) if seed.chan == a => vec![ProcTerm::Running(Box::new(
                universal::boot_seed(seed, value),
            ))],
            ProcTerm::Universal(_) => Vec::new(),
            ProcTerm::Running(cfg) => universal::config_receive(cfg, a, value)
                .into_iter()
                .map(|c| ProcTerm::Running(Box::new(c)))
                .collect(),
        })
    }
}
