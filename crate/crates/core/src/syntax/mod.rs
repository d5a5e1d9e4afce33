//! Abstract syntax of VPC and VPC! terms, parametric definitions and programs.

mod parser;
mod print;
mod transform;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

pub use parser::{parse_formula, parse_source, parse_term, ParseError};
pub(crate) use parser::{Parser, Tok};
pub use print::print_program;
pub use transform::{
    analyze, derive_replication, desugar, desugar_term, free_vars, max_name_index,
    max_var_index, rename_names, subst_formula, subst_value, subst_vterm, Analysis,
};

use crate::universal::Config;

/// Natural numbers carried by value terms and actions.
pub type Nat = BigUint;

/// A channel name, identified by its index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Name(pub u64);

/// A value variable, identified by its index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VarId(pub u64);

/// 1-based position of a definition in its program. `DefId(0)` never names a definition.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DefId(pub u64);

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl fmt::Display for DefId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ValueTerm {
    Num(Nat),
    Var(VarId),
    Add(Box<ValueTerm>, Box<ValueTerm>),
}

impl ValueTerm {
    pub fn num(k: u64) -> Self {
        ValueTerm::Num(Nat::from(k))
    }

    pub fn var(v: u64) -> Self {
        ValueTerm::Var(VarId(v))
    }

    pub fn add(l: ValueTerm, r: ValueTerm) -> Self {
        ValueTerm::Add(Box::new(l), Box::new(r))
    }

    /// `s(t)`, i.e. `t + 1`.
    pub fn succ(t: ValueTerm) -> Self {
        ValueTerm::add(t, ValueTerm::num(1))
    }

    pub fn is_closed(&self) -> bool {
        match self {
            ValueTerm::Num(_) => true,
            ValueTerm::Var(_) => false,
            ValueTerm::Add(l, r) => l.is_closed() && r.is_closed(),
        }
    }

    pub fn vars(&self, out: &mut Vec<VarId>) {
        match self {
            ValueTerm::Num(_) => {}
            ValueTerm::Var(v) => out.push(*v),
            ValueTerm::Add(l, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    False,
    True,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(VarId, Box<Formula>),
    Forall(VarId, Box<Formula>),
    Lt(ValueTerm, ValueTerm),
    Eq(ValueTerm, ValueTerm),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// `¬φ`, encoded as `φ ⇒ ⊥`.
    pub fn not(a: Formula) -> Self {
        Formula::implies(a, Formula::False)
    }

    pub fn exists(v: u64, body: Formula) -> Self {
        Formula::Exists(VarId(v), Box::new(body))
    }

    pub fn forall(v: u64, body: Formula) -> Self {
        Formula::Forall(VarId(v), Box::new(body))
    }

    pub fn lt(a: ValueTerm, b: ValueTerm) -> Self {
        Formula::Lt(a, b)
    }

    pub fn eq(a: ValueTerm, b: ValueTerm) -> Self {
        Formula::Eq(a, b)
    }

    /// Variables occurring free, with repetitions, in left-to-right order.
    pub fn free_vars(&self, out: &mut Vec<VarId>) {
        fn go(f: &Formula, bound: &mut Vec<VarId>, out: &mut Vec<VarId>) {
            match f {
                Formula::False | Formula::True => {}
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Exists(v, body) | Formula::Forall(v, body) => {
                    bound.push(*v);
                    go(body, bound, out);
                    bound.pop();
                }
                Formula::Lt(s, t) | Formula::Eq(s, t) => {
                    let mut vs = Vec::new();
                    s.vars(&mut vs);
                    t.vars(&mut vs);
                    out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
                }
            }
        }
        go(self, &mut Vec::new(), out)
    }

    pub fn is_closed(&self) -> bool {
        let mut vs = Vec::new();
        self.free_vars(&mut vs);
        vs.is_empty()
    }
}

/// Runtime seed of a universal process listening on `chan`: on receiving a
/// code it retargets the code's placeholder names to `retarget` and boots it
/// under `sig`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UniversalSeed {
    pub chan: Name,
    pub sig: TypeSig,
    pub retarget: Vec<Name>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ProcTerm {
    Nil,
    In(Name, VarId, Box<ProcTerm>),
    Out(Name, ValueTerm, Box<ProcTerm>),
    Par(Box<ProcTerm>, Box<ProcTerm>),
    Res(Name, Box<ProcTerm>),
    Cond(Formula, Box<ProcTerm>),
    Call(DefId, Vec<ValueTerm>),
    RepIn(Name, VarId, Box<ProcTerm>),
    RepOut(Name, ValueTerm, Box<ProcTerm>),
    /// `if φ then S else T`
    IfElse(Formula, Box<ProcTerm>, Box<ProcTerm>),
    /// `case t of φ₀ => T₀; … end`, with `placeholder` standing for `t` in the arms.
    Case {
        placeholder: VarId,
        scrutinee: ValueTerm,
        arms: Vec<(Formula, ProcTerm)>,
    },
    /// `let x = t in T`
    Let(VarId, ValueTerm, Box<ProcTerm>),
    Universal(UniversalSeed),
    Running(Box<Config>),
}

impl ProcTerm {
    pub fn input(a: u64, x: u64, body: ProcTerm) -> Self {
        ProcTerm::In(Name(a), VarId(x), Box::new(body))
    }

    pub fn output(a: u64, t: ValueTerm, body: ProcTerm) -> Self {
        ProcTerm::Out(Name(a), t, Box::new(body))
    }

    pub fn par(l: ProcTerm, r: ProcTerm) -> Self {
        ProcTerm::Par(Box::new(l), Box::new(r))
    }

    pub fn res(c: u64, body: ProcTerm) -> Self {
        ProcTerm::Res(Name(c), Box::new(body))
    }

    pub fn cond(phi: Formula, body: ProcTerm) -> Self {
        ProcTerm::Cond(phi, Box::new(body))
    }

    pub fn call(j: u64, args: Vec<ValueTerm>) -> Self {
        ProcTerm::Call(DefId(j), args)
    }

    pub fn rep_in(a: u64, x: u64, body: ProcTerm) -> Self {
        ProcTerm::RepIn(Name(a), VarId(x), Box::new(body))
    }

    pub fn rep_out(a: u64, t: ValueTerm, body: ProcTerm) -> Self {
        ProcTerm::RepOut(Name(a), t, Box::new(body))
    }

    pub fn if_else(phi: Formula, s: ProcTerm, t: ProcTerm) -> Self {
        ProcTerm::IfElse(phi, Box::new(s), Box::new(t))
    }

    /// Right-nested parallel composition of `parts`; `0` when empty.
    pub fn par_all(parts: Vec<ProcTerm>) -> Self {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => ProcTerm::Nil,
            Some(last) => it.fold(last, |acc, p| ProcTerm::par(p, acc)),
        }
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, ProcTerm::Nil)
    }

    pub fn has_sugar(&self) -> bool {
        match self {
            ProcTerm::IfElse(..) | ProcTerm::Case { .. } | ProcTerm::Let(..) => true,
            ProcTerm::Nil | ProcTerm::Call(..) | ProcTerm::Universal(_) | ProcTerm::Running(_) => {
                false
            }
            ProcTerm::In(_, _, b)
            | ProcTerm::Out(_, _, b)
            | ProcTerm::Res(_, b)
            | ProcTerm::Cond(_, b)
            | ProcTerm::RepIn(_, _, b)
            | ProcTerm::RepOut(_, _, b) => b.has_sugar(),
            ProcTerm::Par(l, r) => l.has_sugar() || r.has_sugar(),
        }
    }

    pub fn has_replication(&self) -> bool {
        match self {
            ProcTerm::RepIn(..) | ProcTerm::RepOut(..) => true,
            ProcTerm::Nil | ProcTerm::Call(..) | ProcTerm::Universal(_) | ProcTerm::Running(_) => {
                false
            }
            ProcTerm::In(_, _, b)
            | ProcTerm::Out(_, _, b)
            | ProcTerm::Res(_, b)
            | ProcTerm::Cond(_, b)
            | ProcTerm::Let(_, _, b) => b.has_replication(),
            ProcTerm::Par(l, r) | ProcTerm::IfElse(_, l, r) => {
                l.has_replication() || r.has_replication()
            }
            ProcTerm::Case { arms, .. } => arms.iter().any(|(_, t)| t.has_replication()),
        }
    }

    pub fn has_calls(&self) -> bool {
        match self {
            ProcTerm::Call(..) => true,
            ProcTerm::Nil | ProcTerm::Universal(_) | ProcTerm::Running(_) => false,
            ProcTerm::In(_, _, b)
            | ProcTerm::Out(_, _, b)
            | ProcTerm::Res(_, b)
            | ProcTerm::Cond(_, b)
            | ProcTerm::RepIn(_, _, b)
            | ProcTerm::RepOut(_, _, b)
            | ProcTerm::Let(_, _, b) => b.has_calls(),
            ProcTerm::Par(l, r) | ProcTerm::IfElse(_, l, r) => l.has_calls() || r.has_calls(),
            ProcTerm::Case { arms, .. } => arms.iter().any(|(_, t)| t.has_calls()),
        }
    }
}

/// The two calculi: `Bang` is VPC! (replication, Gödel modulus 7), `P` is VPC
/// (parametric definitions, modulus 6).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Dialect {
    Bang,
    P,
}

impl Dialect {
    pub fn modulus(self) -> u32 {
        match self {
            Dialect::Bang => 7,
            Dialect::P => 6,
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Bang => "bang",
            Dialect::P => "p",
        })
    }
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bang" | "vpc!" => Ok(Dialect::Bang),
            "p" | "vpc" => Ok(Dialect::P),
            other => Err(format!("unknown dialect `{other}` (expected bang or p)")),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ParamDef {
    pub name: String,
    pub params: Vec<VarId>,
    pub body: ProcTerm,
}

/// Source identifiers and the indices they were given.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct SymbolTable {
    pub names: BTreeMap<String, Name>,
    pub vars: BTreeMap<String, VarId>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Program {
    pub dialect: Dialect,
    pub defs: Vec<ParamDef>,
    pub main: ProcTerm,
    pub symtab: SymbolTable,
}

impl Program {
    pub fn new(dialect: Dialect, defs: Vec<ParamDef>, main: ProcTerm) -> Self {
        Program {
            dialect,
            defs,
            main,
            symtab: SymbolTable::default(),
        }
    }

    /// A definition-free VPC program.
    pub fn from_term(main: ProcTerm) -> Self {
        let dialect = if main.has_replication() {
            Dialect::Bang
        } else {
            Dialect::P
        };
        Program::new(dialect, Vec::new(), main)
    }

    pub fn def(&self, id: DefId) -> Option<&ParamDef> {
        let j = usize::try_from(id.0).ok()?;
        j.checked_sub(1).and_then(|i| self.defs.get(i))
    }

    pub fn def_id(&self, name: &str) -> Option<DefId> {
        self.defs
            .iter()
            .position(|d| d.name == name)
            .map(|i| DefId(i as u64 + 1))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigError {
    #[error("duplicate global name {0} in signature")]
    Duplicate(Name),
    #[error("malformed signature `{0}` (expected \"i=<n>;g=<name>,...\")")]
    Malformed(String),
}

/// The pair `[i, ɉ]`: a local-name budget and the ordered list of global names.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct TypeSig {
    local_budget: u64,
    globals: Vec<Name>,
}

impl TypeSig {
    pub fn new(local_budget: u64, globals: Vec<Name>) -> Result<Self, SigError> {
        for (i, g) in globals.iter().enumerate() {
            if globals[..i].contains(g) {
                return Err(SigError::Duplicate(*g));
            }
        }
        Ok(TypeSig {
            local_budget,
            globals,
        })
    }

    /// Signature with globals `n1..n{k}`.
    pub fn canonical(local_budget: u64, k: u64) -> Self {
        TypeSig {
            local_budget,
            globals: (1..=k).map(Name).collect(),
        }
    }

    pub fn local_budget(&self) -> u64 {
        self.local_budget
    }

    pub fn globals(&self) -> &[Name] {
        &self.globals
    }

    /// 1-based position of `a` among the globals.
    pub fn position(&self, a: Name) -> Option<u64> {
        self.globals
            .iter()
            .position(|g| *g == a)
            .map(|i| i as u64 + 1)
    }

    /// The global at 1-based position `m`.
    pub fn global(&self, m: u64) -> Option<Name> {
        let i = usize::try_from(m).ok()?.checked_sub(1)?;
        self.globals.get(i).copied()
    }
}

impl fmt::Display for TypeSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i={};g=", self.local_budget)?;
        for (i, g) in self.globals.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for TypeSig {
    type Err = SigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SigError::Malformed(s.to_string());
        let mut budget = None;
        let mut globals = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "i" => budget = Some(value.trim().parse::<u64>().map_err(|_| bad())?),
                "g" => {
                    for g in value.split(',').map(str::trim).filter(|g| !g.is_empty()) {
                        let idx = g
                            .strip_prefix('n')
                            .and_then(|d| d.parse::<u64>().ok())
                            .ok_or_else(bad)?;
                        globals.push(Name(idx));
                    }
                }
                _ => return Err(bad()),
            }
        }
        TypeSig::new(budget.unwrap_or(0), globals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_round_trips_through_text() {
        let sig: TypeSig = "i=2;g=n1,n5".parse().unwrap();
        assert_eq!(sig.local_budget(), 2);
        assert_eq!(sig.globals(), &[Name(1), Name(5)]);
        assert_eq!(sig.to_string().parse::<TypeSig>().unwrap(), sig);
        assert_eq!("i=0;g=".parse::<TypeSig>().unwrap(), TypeSig::canonical(0, 0));
    }

    #[test]
    fn sig_rejects_duplicates_and_garbage() {
        assert_eq!(
            "i=0;g=n1,n1".parse::<TypeSig>(),
            Err(SigError::Duplicate(Name(1)))
        );
        assert!("i=x".parse::<TypeSig>().is_err());
        assert!("g=a".parse::<TypeSig>().is_err());
    }

    #[test]
    fn par_all_nests_right() {
        let p = ProcTerm::par_all(vec![ProcTerm::Nil, ProcTerm::Nil, ProcTerm::Nil]);
        assert_eq!(
            p,
            ProcTerm::par(ProcTerm::Nil, ProcTerm::par(ProcTerm::Nil, ProcTerm::Nil))
        );
        assert_eq!(ProcTerm::par_all(vec![]), ProcTerm::Nil);
    }
}
