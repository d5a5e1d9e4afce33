//! Validation of raw Gödel indices against a type signature, and their
//! normal forms.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::godel::{self, Code};
use crate::syntax::{desugar_term, DefId, Dialect, Name, ParamDef, ProcTerm, Program, TypeSig, VarId};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ViolationKind {
    /// The code has a component too large to materialize.
    Undecodable,
    DialectMismatch,
    /// A call to a definition that does not exist, or with the wrong number of arguments.
    BadCall,
    FreeVariable,
    OpenFormula,
    GlobalBudget,
    LocalBudget,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Undecodable => "undecodable",
            ViolationKind::DialectMismatch => "dialect mismatch",
            ViolationKind::BadCall => "bad call",
            ViolationKind::FreeVariable => "free variable",
            ViolationKind::OpenFormula => "open formula",
            ViolationKind::GlobalBudget => "global budget",
            ViolationKind::LocalBudget => "local budget",
        })
    }
}

/// Where a violation sits: the main term or a definition body, then the
/// child positions leading to the offending subterm.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Location {
    pub def: Option<DefId>,
    pub path: Vec<u8>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.def {
            Some(j) => write!(f, "{j}")?,
            None => f.write_str("main")?,
        }
        f.write_str("@")?;
        if self.path.is_empty() {
            return f.write_str("root");
        }
        for (i, p) in self.path.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("{kind} at {location}: {detail}")]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Location,
    pub detail: String,
}

struct Walker<'a> {
    dialect: Dialect,
    sig: &'a TypeSig,
    arities: Vec<usize>,
    def: Option<DefId>,
    path: Vec<u8>,
    vars: Vec<VarId>,
    names: Vec<Name>,
    locals: Vec<Name>,
    best: Option<Violation>,
}

impl Walker<'_> {
    fn report(&mut self, kind: ViolationKind, detail: String) {
        if self.best.as_ref().is_some_and(|b| b.kind <= kind) {
            return;
        }
        self.best = Some(Violation {
            kind,
            location: Location {
                def: self.def,
                path: self.path.clone(),
            },
            detail,
        });
    }

    fn name(&mut self, a: Name) {
        if !self.names.contains(&a) && self.sig.position(a).is_none() {
            self.report(
                ViolationKind::GlobalBudget,
                format!("global name {a} is not in the signature"),
            );
        }
    }

    fn value_vars(&mut self, vs: Vec<VarId>) {
        if let Some(v) = vs.into_iter().find(|v| !self.vars.contains(v)) {
            self.report(ViolationKind::FreeVariable, format!("variable {v} is free"));
        }
    }

    fn child(&mut self, i: u8, t: &ProcTerm) {
        self.path.push(i);
        self.walk(t);
        self.path.pop();
    }

    fn walk(&mut self, t: &ProcTerm) {
        let mut vs = Vec::new();
        match t {
            ProcTerm::Nil => {}
            ProcTerm::In(a, x, b) | ProcTerm::RepIn(a, x, b) => {
                if matches!(t, ProcTerm::RepIn(..)) && self.dialect == Dialect::P {
                    self.report(ViolationKind::DialectMismatch, "replication in VPC".into());
                }
                self.name(*a);
                self.vars.push(*x);
                self.child(0, b);
                self.vars.pop();
            }
            ProcTerm::Out(a, u, b) | ProcTerm::RepOut(a, u, b) => {
                if matches!(t, ProcTerm::RepOut(..)) && self.dialect == Dialect::P {
                    self.report(ViolationKind::DialectMismatch, "replication in VPC".into());
                }
                self.name(*a);
                u.vars(&mut vs);
                self.value_vars(vs);
                self.child(0, b);
            }
            ProcTerm::Par(l, r) => {
                self.child(0, l);
                self.child(1, r);
            }
            ProcTerm::Res(c, b) => {
                if !self.locals.contains(c) {
                    self.locals.push(*c);
                }
                self.names.push(*c);
                self.child(0, b);
                self.names.pop();
            }
            ProcTerm::Cond(phi, b) => {
                phi.free_vars(&mut vs);
                if let Some(v) = vs.into_iter().find(|v| !self.vars.contains(v)) {
                    self.report(
                        ViolationKind::OpenFormula,
                        format!("condition mentions unbound {v}"),
                    );
                }
                self.child(0, b);
            }
            ProcTerm::Call(j, args) => {
                if self.dialect == Dialect::Bang {
                    self.report(ViolationKind::DialectMismatch, "definition call in VPC!".into());
                }
                let arity = usize::try_from(j.0)
                    .ok()
                    .and_then(|j| j.checked_sub(1))
                    .and_then(|i| self.arities.get(i).copied());
                match arity {
                    None => self.report(ViolationKind::BadCall, format!("no definition {j}")),
                    Some(n) if n != args.len() => self.report(
                        ViolationKind::BadCall,
                        format!("{j} takes {n} arguments, got {}", args.len()),
                    ),
                    Some(_) => {}
                }
                args.iter().for_each(|a| a.vars(&mut vs));
                self.value_vars(vs);
            }
            ProcTerm::IfElse(..) | ProcTerm::Case { .. } | ProcTerm::Let(..) => {
                self.walk(&desugar_term(t))
            }
            ProcTerm::Universal(_) | ProcTerm::Running(_) => self.report(
                ViolationKind::DialectMismatch,
                "runtime engine terms have no index".into(),
            ),
        }
    }
}

fn check_parts(
    main: &ProcTerm,
    defs: &[ParamDef],
    dialect: Dialect,
    sig: &TypeSig,
) -> Result<(), Violation> {
    let mut w = Walker {
        dialect,
        sig,
        arities: defs.iter().map(|d| d.params.len()).collect(),
        def: None,
        path: Vec::new(),
        vars: Vec::new(),
        names: Vec::new(),
        locals: Vec::new(),
        best: None,
    };
    w.walk(main);
    for (i, d) in defs.iter().enumerate() {
        w.def = Some(DefId(i as u64 + 1));
        w.vars = d.params.clone();
        w.walk(&d.body);
    }
    if w.locals.len() as u64 > sig.local_budget() {
        w.def = None;
        w.path.clear();
        let n = w.locals.len();
        w.report(
            ViolationKind::LocalBudget,
            format!("{n} distinct local names exceed the budget {}", sig.local_budget()),
        );
    }
    match w.best {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

fn undecodable(e: godel::CodecError) -> Violation {
    Violation {
        kind: ViolationKind::Undecodable,
        location: Location::default(),
        detail: e.to_string(),
    }
}

/// `Ok` iff the term coded by `z` is closed, its free names lie in
/// `sig.globals`, it restricts at most `sig.local_budget` distinct names and
/// all its conditions are closed. Otherwise the most severe violation.
pub fn grammar_check(z: &Code, sig: &TypeSig, d: Dialect) -> Result<(), Violation> {
    let t = godel::decode_term(z, d).map_err(undecodable)?;
    check_parts(&t, &[], d, sig)
}

/// Checks a whole program (main term and every definition body).
pub fn check_program(p: &Program, sig: &TypeSig) -> Result<(), Violation> {
    check_parts(&p.main, &p.defs, p.dialect, sig)
}

// Names occurring free anywhere keep their position in ɉ; names that only
// ever occur bound get k+1, k+2, … in order of their first binder.
fn name_map(main: &ProcTerm, defs: &[ParamDef], sig: &TypeSig) -> BTreeMap<Name, Name> {
    fn collect(t: &ProcTerm, bound: &mut Vec<Name>, free: &mut Vec<Name>, binders: &mut Vec<Name>) {
        match t {
            ProcTerm::In(a, _, b)
            | ProcTerm::Out(a, _, b)
            | ProcTerm::RepIn(a, _, b)
            | ProcTerm::RepOut(a, _, b) => {
                if !bound.contains(a) && !free.contains(a) {
                    free.push(*a);
                }
                collect(b, bound, free, binders);
            }
            ProcTerm::Res(c, b) => {
                if !binders.contains(c) {
                    binders.push(*c);
                }
                bound.push(*c);
                collect(b, bound, free, binders);
                bound.pop();
            }
            ProcTerm::Par(l, r) => {
                collect(l, bound, free, binders);
                collect(r, bound, free, binders);
            }
            ProcTerm::Cond(_, b) => collect(b, bound, free, binders),
            _ => {}
        }
    }
    let mut free = Vec::new();
    let mut binders = Vec::new();
    collect(main, &mut Vec::new(), &mut free, &mut binders);
    for d in defs {
        collect(&d.body, &mut Vec::new(), &mut free, &mut binders);
    }
    let k = sig.globals().len() as u64;
    let mut map = BTreeMap::new();
    for a in &free {
        if let Some(m) = sig.position(*a) {
            map.insert(*a, Name(m));
        }
    }
    let mut next = k;
    for c in binders {
        if !map.contains_key(&c) {
            next += 1;
            map.insert(c, Name(next));
        }
    }
    map
}

fn rename(t: &ProcTerm, map: &BTreeMap<Name, Name>) -> ProcTerm {
    crate::syntax::rename_names(t, &mut |a| map.get(&a).copied().unwrap_or(a))
}

/// The normal form of a well-typed program: sugar removed and names renumbered.
pub fn normalize_program(p: &Program, sig: &TypeSig) -> Result<Program, Violation> {
    check_program(p, sig)?;
    let main = desugar_term(&p.main);
    let defs: Vec<ParamDef> = p
        .defs
        .iter()
        .map(|d| ParamDef {
            body: desugar_term(&d.body),
            ..d.clone()
        })
        .collect();
    let map = name_map(&main, &defs, sig);
    Ok(Program {
        dialect: p.dialect,
        main: rename(&main, &map),
        defs: defs
            .iter()
            .map(|d| ParamDef {
                body: rename(&d.body, &map),
                ..d.clone()
            })
            .collect(),
        symtab: Default::default(),
    })
}

/// The normal index of `z`: globals renamed to their position in
/// `sig.globals`, locals to `k+1, k+2, …` by first binder.
pub fn normalize(z: &Code, sig: &TypeSig, d: Dialect) -> Result<Code, Violation> {
    let t = godel::decode_term(z, d).map_err(undecodable)?;
    check_parts(&t, &[], d, sig)?;
    let map = name_map(&t, &[], sig);
    Ok(godel::encode_term(&rename(&t, &map), d).expect("decoded terms re-encode"))
}

/// [`normalize`], or the index of `0` when `z` is ill-typed.
pub fn parse_index(z: &Code, sig: &TypeSig, d: Dialect) -> Code {
    normalize(z, sig, d).unwrap_or_else(|_| Code::zero())
}

/// Decodes, checks and normalizes a program code; `None` when ill-typed.
pub fn parse_program_index(z: &Code, sig: &TypeSig) -> Option<Program> {
    let p = godel::decode_program(z).ok()?;
    normalize_program(&p, sig).ok()
}

/// Program-level [`parse_index`].
pub fn normalize_program_code(z: &Code, sig: &TypeSig) -> Code {
    parse_program_index(z, sig)
        .and_then(|p| godel::encode_program(&p).ok())
        .unwrap_or_else(Code::zero)
}
