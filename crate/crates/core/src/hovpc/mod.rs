//! Higher-order VPC: processes that send and receive abstractions, their
//! transition rules, and the translation into first-order VPC where an
//! abstraction travels as its Gödel code and is run by a universal process.

mod parser;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::checker::{self, Violation};
use crate::godel::{decode_program, encode_program, Code, CodecError};
use crate::presburger::{self, EvalError};
use crate::syntax::{
    analyze, desugar_term, max_name_index, max_var_index, rename_names, subst_formula,
    subst_vterm, Formula, Name, Nat, ParseError, ProcTerm, Program, SigError, TypeSig,
    UniversalSeed, ValueTerm, VarId,
};

pub use parser::{parse_ho, HoSource};

/// An abstraction variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AbsVar(pub u64);

impl fmt::Display for AbsVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.0)
    }
}

/// `⟨i, j⟩`: at most `i` local names, exactly `j` name parameters.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct AbsType {
    pub local_count: u64,
    pub param_count: usize,
}

impl AbsType {
    pub fn new(local_count: u64, param_count: usize) -> Self {
        AbsType {
            local_count,
            param_count,
        }
    }
}

impl fmt::Display for AbsType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.local_count, self.param_count)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HoError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("abstraction variable {0} is unbound")]
    Unbound(AbsVar),
    #[error("{what} has type {found}, expected {expected}")]
    TypeMismatch {
        what: String,
        expected: AbsType,
        found: AbsType,
    },
    #[error("ill-formed abstraction: {0}")]
    IllFormed(String),
    #[error(transparent)]
    Violation(#[from] Violation),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Sig(#[from] SigError),
}

/// `λc₁…c_j.T` with a declared type. The body is a closed, definition-free,
/// replication-free VPC term whose free names are among the parameters.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Abstraction {
    params: Vec<Name>,
    body: ProcTerm,
    ty: AbsType,
}

impl Abstraction {
    /// Checks the body against the type; without a type, the body's own local
    /// count and the parameter count are used.
    pub fn new(params: Vec<Name>, body: ProcTerm, ty: Option<AbsType>) -> Result<Self, HoError> {
        let body = desugar_term(&body);
        let ty = ty.unwrap_or_else(|| {
            AbsType::new(analyze(&body).local_name_count as u64, params.len())
        });
        if ty.param_count != params.len() {
            return Err(HoError::IllFormed(format!(
                "{} parameters declared with type {ty}",
                params.len()
            )));
        }
        if body.has_calls() || body.has_replication() || has_runtime(&body) {
            return Err(HoError::IllFormed(
                "bodies may not call definitions or replicate".into(),
            ));
        }
        let a = Abstraction { params, body, ty };
        a.normalized()?;
        Ok(a)
    }

    pub fn params(&self) -> &[Name] {
        &self.params
    }

    pub fn body(&self) -> &ProcTerm {
        &self.body
    }

    pub fn ty(&self) -> AbsType {
        self.ty
    }

    fn sig(&self) -> Result<TypeSig, HoError> {
        Ok(TypeSig::new(self.ty.local_count, self.params.clone())?)
    }

    // Parameters become 1..j, local names j+1..j+i.
    fn normalized(&self) -> Result<Program, HoError> {
        let p = Program::from_term(self.body.clone());
        Ok(checker::normalize_program(&p, &self.sig()?)?)
    }

    /// `A(a₁,…,a_j)`: the body with parameter `m` replaced by `a_m`; local
    /// names are renamed apart from the arguments.
    pub fn instantiate(&self, names: &[Name]) -> Result<ProcTerm, HoError> {
        if names.len() != self.ty.param_count {
            return Err(HoError::TypeMismatch {
                what: "instantiation".into(),
                expected: self.ty,
                found: AbsType::new(self.ty.local_count, names.len()),
            });
        }
        Ok(retarget_program(&self.normalized()?, names)?.main)
    }
}

impl fmt::Display for Abstraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\\")?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ". {} : {}", self.body, self.ty)
    }
}

fn has_runtime(t: &ProcTerm) -> bool {
    match t {
        ProcTerm::Universal(_) | ProcTerm::Running(_) => true,
        ProcTerm::Nil | ProcTerm::Call(..) => false,
        ProcTerm::In(_, _, b)
        | ProcTerm::Out(_, _, b)
        | ProcTerm::Res(_, b)
        | ProcTerm::Cond(_, b)
        | ProcTerm::RepIn(_, _, b)
        | ProcTerm::RepOut(_, _, b)
        | ProcTerm::Let(_, _, b) => has_runtime(b),
        ProcTerm::Par(l, r) | ProcTerm::IfElse(_, l, r) => has_runtime(l) || has_runtime(r),
        ProcTerm::Case { arms, .. } => arms.iter().any(|(_, a)| has_runtime(a)),
    }
}

/// Higher-order process terms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum HoTerm {
    Nil,
    In(Name, VarId, Box<HoTerm>),
    Out(Name, ValueTerm, Box<HoTerm>),
    Par(Box<HoTerm>, Box<HoTerm>),
    Res(Name, Box<HoTerm>),
    Cond(Formula, Box<HoTerm>),
    /// `X(a₁,…,a_j)`
    AbsVarApp(AbsVar, Vec<Name>),
    /// `A(a₁,…,a_j)`
    AbsApp(Abstraction, Vec<Name>),
    /// `a(X:⟨i,j⟩).T`
    HoIn(Name, AbsVar, AbsType, Box<HoTerm>),
    /// `'a(A).T`
    HoOut(Name, Abstraction, Box<HoTerm>),
}

impl HoTerm {
    pub fn par(l: HoTerm, r: HoTerm) -> Self {
        HoTerm::Par(Box::new(l), Box::new(r))
    }

    /// Embeds a first-order term; sugar is removed, definition calls,
    /// replication and runtime wrappers are rejected.
    pub fn from_first_order(t: &ProcTerm) -> Result<Self, HoError> {
        fn go(t: &ProcTerm) -> Result<HoTerm, HoError> {
            Ok(match t {
                ProcTerm::Nil => HoTerm::Nil,
                ProcTerm::In(a, x, b) => HoTerm::In(*a, *x, Box::new(go(b)?)),
                ProcTerm::Out(a, v, b) => HoTerm::Out(*a, v.clone(), Box::new(go(b)?)),
                ProcTerm::Par(l, r) => HoTerm::par(go(l)?, go(r)?),
                ProcTerm::Res(c, b) => HoTerm::Res(*c, Box::new(go(b)?)),
                ProcTerm::Cond(phi, b) => HoTerm::Cond(phi.clone(), Box::new(go(b)?)),
                _ => {
                    return Err(HoError::IllFormed(format!(
                        "`{t}` has no higher-order counterpart"
                    )))
                }
            })
        }
        go(&desugar_term(t))
    }

    /// The first-order term, if no higher-order construct occurs.
    pub fn to_first_order(&self) -> Option<ProcTerm> {
        Some(match self {
            HoTerm::Nil => ProcTerm::Nil,
            HoTerm::In(a, x, b) => ProcTerm::In(*a, *x, Box::new(b.to_first_order()?)),
            HoTerm::Out(a, v, b) => ProcTerm::Out(*a, v.clone(), Box::new(b.to_first_order()?)),
            HoTerm::Par(l, r) => ProcTerm::par(l.to_first_order()?, r.to_first_order()?),
            HoTerm::Res(c, b) => ProcTerm::Res(*c, Box::new(b.to_first_order()?)),
            HoTerm::Cond(phi, b) => ProcTerm::Cond(phi.clone(), Box::new(b.to_first_order()?)),
            _ => return None,
        })
    }

    fn children(&self) -> Vec<&HoTerm> {
        match self {
            HoTerm::Nil | HoTerm::AbsVarApp(..) | HoTerm::AbsApp(..) => Vec::new(),
            HoTerm::In(_, _, b)
            | HoTerm::Out(_, _, b)
            | HoTerm::Res(_, b)
            | HoTerm::Cond(_, b)
            | HoTerm::HoIn(_, _, _, b)
            | HoTerm::HoOut(_, _, b) => vec![b],
            HoTerm::Par(l, r) => vec![l, r],
        }
    }

    fn max_name(&self) -> u64 {
        let own = match self {
            HoTerm::In(a, ..)
            | HoTerm::Out(a, ..)
            | HoTerm::Res(a, _)
            | HoTerm::HoIn(a, ..) => a.0,
            HoTerm::AbsVarApp(_, ns) => ns.iter().map(|n| n.0).max().unwrap_or(0),
            HoTerm::AbsApp(abs, ns) => ns
                .iter()
                .map(|n| n.0)
                .chain(abs_max_name(abs))
                .max()
                .unwrap_or(0),
            _ => 0,
        };
        let own = match self {
            HoTerm::HoOut(a, abs, _) => a.0.max(abs_max_name(abs).unwrap_or(0)),
            _ => own,
        };
        self.children()
            .into_iter()
            .map(HoTerm::max_name)
            .fold(own, u64::max)
    }

    fn max_var(&self) -> Option<u64> {
        let mut vs = Vec::new();
        match self {
            HoTerm::In(_, x, _) => vs.push(*x),
            HoTerm::Out(_, v, _) => v.vars(&mut vs),
            HoTerm::Cond(phi, _) => {
                if let Some(m) = max_var_index(&ProcTerm::Cond(phi.clone(), Box::new(ProcTerm::Nil)))
                {
                    vs.push(VarId(m));
                }
            }
            _ => {}
        }
        let own = vs.into_iter().map(|v| v.0).max();
        self.children()
            .into_iter()
            .filter_map(HoTerm::max_var)
            .chain(own)
            .max()
    }

    /// Abstraction variables with a free occurrence.
    pub fn free_abs_vars(&self) -> Vec<AbsVar> {
        fn go(t: &HoTerm, bound: &mut Vec<AbsVar>, out: &mut Vec<AbsVar>) {
            match t {
                HoTerm::AbsVarApp(x, _) => {
                    if !bound.contains(x) && !out.contains(x) {
                        out.push(*x);
                    }
                }
                HoTerm::HoIn(_, x, _, b) => {
                    bound.push(*x);
                    go(b, bound, out);
                    bound.pop();
                }
                _ => t.children().into_iter().for_each(|c| go(c, bound, out)),
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// `T{v/x}` for a closed value `v`.
    fn subst_value(&self, x: VarId, v: &ValueTerm) -> HoTerm {
        match self {
            HoTerm::In(a, y, b) if *y == x => HoTerm::In(*a, *y, b.clone()),
            HoTerm::In(a, y, b) => HoTerm::In(*a, *y, Box::new(b.subst_value(x, v))),
            HoTerm::Out(a, t, b) => {
                HoTerm::Out(*a, subst_vterm(t, x, v), Box::new(b.subst_value(x, v)))
            }
            HoTerm::Par(l, r) => HoTerm::par(l.subst_value(x, v), r.subst_value(x, v)),
            HoTerm::Res(c, b) => HoTerm::Res(*c, Box::new(b.subst_value(x, v))),
            HoTerm::Cond(phi, b) => {
                HoTerm::Cond(subst_formula(phi, x, v), Box::new(b.subst_value(x, v)))
            }
            HoTerm::HoIn(a, y, ty, b) => HoTerm::HoIn(*a, *y, *ty, Box::new(b.subst_value(x, v))),
            HoTerm::HoOut(a, abs, b) => HoTerm::HoOut(*a, abs.clone(), Box::new(b.subst_value(x, v))),
            HoTerm::Nil | HoTerm::AbsVarApp(..) | HoTerm::AbsApp(..) => self.clone(),
        }
    }

    /// `T{A/X}`. Abstractions are closed, so nothing can be captured.
    pub fn subst_abs(&self, x: AbsVar, abs: &Abstraction) -> HoTerm {
        match self {
            HoTerm::AbsVarApp(y, names) if *y == x => HoTerm::AbsApp(abs.clone(), names.clone()),
            HoTerm::HoIn(_, y, _, _) if *y == x => self.clone(),
            HoTerm::HoIn(a, y, ty, b) => HoTerm::HoIn(*a, *y, *ty, Box::new(b.subst_abs(x, abs))),
            HoTerm::HoOut(a, e, b) => HoTerm::HoOut(*a, e.clone(), Box::new(b.subst_abs(x, abs))),
            HoTerm::In(a, y, b) => HoTerm::In(*a, *y, Box::new(b.subst_abs(x, abs))),
            HoTerm::Out(a, t, b) => HoTerm::Out(*a, t.clone(), Box::new(b.subst_abs(x, abs))),
            HoTerm::Par(l, r) => HoTerm::par(l.subst_abs(x, abs), r.subst_abs(x, abs)),
            HoTerm::Res(c, b) => HoTerm::Res(*c, Box::new(b.subst_abs(x, abs))),
            HoTerm::Cond(phi, b) => HoTerm::Cond(phi.clone(), Box::new(b.subst_abs(x, abs))),
            HoTerm::Nil | HoTerm::AbsVarApp(..) | HoTerm::AbsApp(..) => self.clone(),
        }
    }
}

fn abs_max_name(abs: &Abstraction) -> Option<u64> {
    max_name_index(&abs.body)
        .into_iter()
        .chain(abs.params.iter().map(|n| n.0))
        .max()
}

fn write_names(f: &mut fmt::Formatter<'_>, names: &[Name]) -> fmt::Result {
    f.write_str("(")?;
    for (i, n) in names.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{n}")?;
    }
    f.write_str(")")
}

impl fmt::Display for HoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Operands of `|` and prefix bodies that are compositions get parentheses.
        let body = |f: &mut fmt::Formatter<'_>, b: &HoTerm| match b {
            HoTerm::Par(..) => write!(f, "({b})"),
            _ => write!(f, "{b}"),
        };
        match self {
            HoTerm::Nil => f.write_str("0"),
            HoTerm::In(a, x, b) => {
                write!(f, "{a}({x}).")?;
                body(f, b)
            }
            HoTerm::Out(a, v, b) => {
                write!(f, "'{a}({v}).")?;
                body(f, b)
            }
            HoTerm::Par(l, r) => {
                write!(f, "{l} | ")?;
                body(f, r)
            }
            HoTerm::Res(c, b) => {
                write!(f, "({c})")?;
                body(f, b)
            }
            HoTerm::Cond(phi, b) => {
                write!(f, "if {phi} then ")?;
                body(f, b)
            }
            HoTerm::AbsVarApp(x, names) => {
                write!(f, "{x}")?;
                write_names(f, names)
            }
            HoTerm::AbsApp(abs, names) => {
                write!(f, "({abs})")?;
                write_names(f, names)
            }
            HoTerm::HoIn(a, x, ty, b) => {
                write!(f, "{a}({x}:{ty}).")?;
                body(f, b)
            }
            HoTerm::HoOut(a, abs, b) => {
                write!(f, "'{a}({abs}).")?;
                body(f, b)
            }
        }
    }
}

/// Labels of the higher-order transition system.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum HoAction {
    Tau,
    Input(Name, Nat),
    Output(Name, Nat),
    HoInput(Name, Abstraction),
    HoOutput(Name, Abstraction),
}

impl HoAction {
    fn subject(&self) -> Option<Name> {
        match self {
            HoAction::Tau => None,
            HoAction::Input(a, _)
            | HoAction::Output(a, _)
            | HoAction::HoInput(a, _)
            | HoAction::HoOutput(a, _) => Some(*a),
        }
    }
}

impl fmt::Display for HoAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HoAction::Tau => f.write_str("tau"),
            HoAction::Input(a, v) => write!(f, "in {a} {v}"),
            HoAction::Output(a, v) => write!(f, "out {a} {v}"),
            HoAction::HoInput(a, abs) => write!(f, "in {a} ({abs})"),
            HoAction::HoOutput(a, abs) => write!(f, "out {a} ({abs})"),
        }
    }
}

/// One-step transitions of a closed higher-order term. Value inputs range
/// over `0..=vbound`; abstraction inputs range over the candidates of the
/// matching type.
pub fn ho_transitions(
    s: &HoTerm,
    vbound: u64,
    candidates: &[Abstraction],
) -> Result<Vec<(HoAction, HoTerm)>, HoError> {
    let mut out = Vec::new();
    match s {
        HoTerm::Nil | HoTerm::AbsVarApp(..) => {}
        HoTerm::In(a, x, b) => {
            for v in 0..=vbound {
                out.push((HoAction::Input(*a, Nat::from(v)), b.subst_value(*x, &ValueTerm::num(v))));
            }
        }
        HoTerm::Out(a, t, b) => {
            out.push((HoAction::Output(*a, presburger::eval_term(t)?), (**b).clone()));
        }
        HoTerm::Cond(phi, b) => {
            if presburger::decide(phi)? {
                out = ho_transitions(b, vbound, candidates)?;
            }
        }
        HoTerm::Res(c, b) => {
            for (act, t) in ho_transitions(b, vbound, candidates)? {
                if act.subject() != Some(*c) {
                    out.push((act, HoTerm::Res(*c, Box::new(t))));
                }
            }
        }
        HoTerm::AbsApp(abs, names) => {
            let t = HoTerm::from_first_order(&abs.instantiate(names)?)?;
            out = ho_transitions(&t, vbound, candidates)?;
        }
        HoTerm::HoIn(a, x, ty, b) => {
            for abs in candidates.iter().filter(|c| c.ty == *ty) {
                out.push((HoAction::HoInput(*a, abs.clone()), b.subst_abs(*x, abs)));
            }
        }
        HoTerm::HoOut(a, abs, b) => out.push((HoAction::HoOutput(*a, abs.clone()), (**b).clone())),
        HoTerm::Par(l, r) => {
            let left = ho_transitions(l, vbound, candidates)?;
            let right = ho_transitions(r, vbound, candidates)?;
            for (act, t) in &left {
                out.push((act.clone(), HoTerm::par(t.clone(), (**r).clone())));
            }
            for (act, t) in &right {
                out.push((act.clone(), HoTerm::par((**l).clone(), t.clone())));
            }
            for (outputs, other, left_sends) in [(&left, r, true), (&right, l, false)] {
                for (act, sender) in outputs {
                    let receivers = match act {
                        HoAction::Output(a, v) => ho_receive(other, *a, v)?,
                        HoAction::HoOutput(a, abs) => ho_receive_abs(other, *a, abs),
                        _ => continue,
                    };
                    for receiver in receivers {
                        let t = if left_sends {
                            HoTerm::par(sender.clone(), receiver)
                        } else {
                            HoTerm::par(receiver, sender.clone())
                        };
                        out.push((HoAction::Tau, t));
                    }
                }
            }
        }
    }
    Ok(out)
}

// Residuals of `t` after receiving value `v` on `a`.
fn ho_receive(t: &HoTerm, a: Name, v: &Nat) -> Result<Vec<HoTerm>, HoError> {
    Ok(match t {
        HoTerm::In(b, x, body) if *b == a => vec![body.subst_value(*x, &ValueTerm::Num(v.clone()))],
        HoTerm::Par(l, r) => {
            let mut out: Vec<HoTerm> = ho_receive(l, a, v)?
                .into_iter()
                .map(|l2| HoTerm::par(l2, (**r).clone()))
                .collect();
            out.extend(
                ho_receive(r, a, v)?
                    .into_iter()
                    .map(|r2| HoTerm::par((**l).clone(), r2)),
            );
            out
        }
        HoTerm::Res(c, body) if *c != a => ho_receive(body, a, v)?
            .into_iter()
            .map(|b| HoTerm::Res(*c, Box::new(b)))
            .collect(),
        HoTerm::Cond(phi, body) if presburger::decide(phi)? => ho_receive(body, a, v)?,
        HoTerm::AbsApp(abs, names) => {
            ho_receive(&HoTerm::from_first_order(&abs.instantiate(names)?)?, a, v)?
        }
        _ => Vec::new(),
    })
}

// Residuals of `t` after receiving abstraction `abs` on `a`.
fn ho_receive_abs(t: &HoTerm, a: Name, abs: &Abstraction) -> Vec<HoTerm> {
    match t {
        HoTerm::HoIn(b, x, ty, body) if *b == a && *ty == abs.ty => vec![body.subst_abs(*x, abs)],
        HoTerm::Par(l, r) => {
            let mut out: Vec<HoTerm> = ho_receive_abs(l, a, abs)
                .into_iter()
                .map(|l2| HoTerm::par(l2, (**r).clone()))
                .collect();
            out.extend(
                ho_receive_abs(r, a, abs)
                    .into_iter()
                    .map(|r2| HoTerm::par((**l).clone(), r2)),
            );
            out
        }
        HoTerm::Res(c, body) if *c != a => ho_receive_abs(body, a, abs)
            .into_iter()
            .map(|b| HoTerm::Res(*c, Box::new(b)))
            .collect(),
        HoTerm::Cond(phi, body) if presburger::decide(phi).unwrap_or(false) => {
            ho_receive_abs(body, a, abs)
        }
        _ => Vec::new(),
    }
}

/// The environment `υ`: the first-order variable that carries the code
/// received for each abstraction variable, with the variable's type.
pub type HoEnv = BTreeMap<AbsVar, (VarId, AbsType)>;

/// The code sent for an abstraction: its body normalized with the parameters
/// as globals `1..j` and the locals as `j+1..j+i`.
pub fn encode_abstraction(abs: &Abstraction) -> Result<Code, HoError> {
    Ok(encode_program(&abs.normalized()?)?)
}

/// Rewrites a placeholder-form code for the instantiation `names`: global
/// index `m ≤ j` becomes `names[m-1]`, local index `ℓ > j` becomes
/// `M + (ℓ - j)` with `M` above every instantiation name.
pub fn retarget_code(z: &Nat, names: &[Name]) -> Result<Code, HoError> {
    let p = decode_program(z)?;
    Ok(encode_program(&retarget_program(&p, names)?)?)
}

fn retarget_program(p: &Program, names: &[Name]) -> Result<Program, HoError> {
    let j = names.len() as u64;
    let top = names.iter().map(|n| n.0).max().unwrap_or(0).max(j);
    let mut bad = None;
    let mut f = |a: Name| {
        if a.0 == 0 {
            bad = Some(a);
            a
        } else if a.0 <= j {
            names[a.0 as usize - 1]
        } else {
            Name(top + (a.0 - j))
        }
    };
    let mut out = p.clone();
    out.main = rename_names(&p.main, &mut f);
    for d in &mut out.defs {
        d.body = rename_names(&d.body, &mut f);
    }
    match bad {
        Some(_) => Err(HoError::IllFormed("name index 0 in abstraction code".into())),
        None => Ok(out),
    }
}

/// The first-order translation `⟦t⟧_env`. An abstraction output sends the
/// abstraction's code; an application `X(a⃗)` becomes
/// `(d)('d(x).0 | U_d)` where `x` carries the code received for `X` and
/// `U_d` is a universal seed that retargets the code to `a⃗` before running it.
pub fn translate(t: &HoTerm, env: &HoEnv) -> Result<ProcTerm, HoError> {
    let mut fresh = Fresh {
        name: t.max_name() + 1,
        var: t
            .max_var()
            .into_iter()
            .chain(env.values().map(|(v, _)| v.0))
            .max()
            .map_or(0, |m| m + 1),
    };
    fresh.go(t, env)
}

struct Fresh {
    name: u64,
    var: u64,
}

impl Fresh {
    fn go(&mut self, t: &HoTerm, env: &HoEnv) -> Result<ProcTerm, HoError> {
        Ok(match t {
            HoTerm::Nil => ProcTerm::Nil,
            HoTerm::In(a, x, b) => ProcTerm::In(*a, *x, Box::new(self.go(b, env)?)),
            HoTerm::Out(a, v, b) => ProcTerm::Out(*a, v.clone(), Box::new(self.go(b, env)?)),
            HoTerm::Par(l, r) => {
                let l = self.go(l, env)?;
                ProcTerm::par(l, self.go(r, env)?)
            }
            HoTerm::Res(c, b) => ProcTerm::Res(*c, Box::new(self.go(b, env)?)),
            HoTerm::Cond(phi, b) => ProcTerm::Cond(phi.clone(), Box::new(self.go(b, env)?)),
            HoTerm::HoIn(a, x, ty, b) => {
                let v = VarId(self.var);
                self.var += 1;
                let mut inner = env.clone();
                inner.insert(*x, (v, *ty));
                ProcTerm::In(*a, v, Box::new(self.go(b, &inner)?))
            }
            HoTerm::HoOut(a, abs, b) => {
                let code = encode_abstraction(abs)?;
                ProcTerm::Out(*a, ValueTerm::Num(code), Box::new(self.go(b, env)?))
            }
            HoTerm::AbsVarApp(x, names) => {
                let &(v, ty) = env.get(x).ok_or(HoError::Unbound(*x))?;
                if names.len() != ty.param_count {
                    return Err(HoError::TypeMismatch {
                        what: format!("application of {x}"),
                        expected: ty,
                        found: AbsType::new(ty.local_count, names.len()),
                    });
                }
                let d = Name(self.name);
                self.name += 1;
                let mut globals = Vec::new();
                for n in names {
                    if !globals.contains(n) {
                        globals.push(*n);
                    }
                }
                let seed = UniversalSeed {
                    chan: d,
                    sig: TypeSig::new(ty.local_count, globals)?,
                    retarget: names.clone(),
                };
                ProcTerm::Res(
                    d,
                    Box::new(ProcTerm::par(
                        ProcTerm::Out(d, ValueTerm::Var(v), Box::new(ProcTerm::Nil)),
                        ProcTerm::Universal(seed),
                    )),
                )
            }
            HoTerm::AbsApp(abs, names) => abs.instantiate(names)?,
        })
    }
}

/// Decodes an abstraction code back into placeholder form with parameters
/// `n1..n{j}`.
pub fn decode_abstraction(z: &Code, ty: AbsType) -> Result<Abstraction, HoError> {
    let p = decode_program(z)?;
    if !p.defs.is_empty() {
        return Err(HoError::IllFormed("abstraction codes carry no definitions".into()));
    }
    let params = (1..=ty.param_count as u64).map(Name).collect();
    Abstraction::new(params, p.main, Some(ty))
}
