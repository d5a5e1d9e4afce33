//! Gödel indices of parametric definitions, the universal definition family
//! and effective partial application.

use std::fmt;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::checker::{self, Violation};
use crate::godel::{self, pair, pair2, unpair, unpair2, Code, CodecError};
use crate::syntax::{subst_value, DefId, Dialect, Nat, ParamDef, ProcTerm, Program, TypeSig, ValueTerm};
use crate::universal::{self, Config};

/// `⟨m, ⟨system, j⟩⟩`: a system of `m` definitions and the position `j` of the target.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DefIndex(pub Code);

impl fmt::Display for DefIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmnError {
    #[error("definition system is ill-typed: {0}")]
    Type(#[from] Violation),
    #[error("no definition {0} in the system")]
    UnknownTarget(DefId),
    #[error("index does not decode to a definition system")]
    Malformed,
    #[error("target takes {arity} parameters, but {k0} + {k1} were requested")]
    Arity { arity: usize, k0: usize, k1: usize },
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Indexes `target` within `system` after checking and normalizing every
/// body against `sig`.
pub fn encode_def(system: &[ParamDef], target: DefId, sig: &TypeSig) -> Result<DefIndex, SmnError> {
    let m = system.len() as u64;
    if target.0 == 0 || target.0 > m {
        return Err(SmnError::UnknownTarget(target));
    }
    let p = Program::new(Dialect::P, system.to_vec(), ProcTerm::Nil);
    let p = checker::normalize_program(&p, sig)?;
    index_of(&p.defs, target.0)
}

fn index_of(defs: &[ParamDef], j: u64) -> Result<DefIndex, SmnError> {
    let entries = defs
        .iter()
        .map(godel::encode_def_entry)
        .collect::<Result<Vec<_>, _>>()?;
    let m = Code::from(defs.len() as u64);
    Ok(DefIndex(pair2(&m, &pair2(&pair(&entries), &Code::from(j)))))
}

/// The definitions and target position packed in `z`.
pub fn decode_def(z: &DefIndex) -> Result<(Vec<ParamDef>, DefId), SmnError> {
    let (m, rest) = unpair2(&z.0);
    let (system, j) = unpair2(&rest);
    let m = godel::to_len(&m)?;
    let j = j.to_u64().ok_or(SmnError::Malformed)?;
    if j == 0 || j > m as u64 {
        return Err(SmnError::Malformed);
    }
    let defs = unpair(&system, m)
        .iter()
        .enumerate()
        .map(|(i, e)| godel::decode_def_entry(e, format!("D{}", i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((defs, DefId(j)))
}

/// The universal definition applied to `args`: the engine configuration of
/// the call `D_j(args)` under the system in `z`. Malformed indices and
/// argument-count mismatches give the configuration of `0`.
pub fn universal_def(z: &DefIndex, args: &[Nat], sig: &TypeSig) -> Config {
    let program = decode_def(z).ok().and_then(|(defs, j)| {
        let target = &defs[j.0 as usize - 1];
        if target.params.len() != args.len() {
            return None;
        }
        let call = ProcTerm::Call(j, args.iter().cloned().map(ValueTerm::Num).collect());
        godel::encode_program(&Program::new(Dialect::P, defs, call)).ok()
    });
    match program {
        Some(code) => universal::boot_universal(&code, sig),
        None => universal::boot_universal(&Code::from(0u32), sig),
    }
}

/// Partial application: fixes the first `k0` parameters of the target to
/// `vals`, leaving a `k1`-ary definition.
pub fn smn(z: &DefIndex, k0: usize, k1: usize, vals: &[Nat]) -> Result<DefIndex, SmnError> {
    let (mut defs, j) = decode_def(z)?;
    let target = defs[j.0 as usize - 1].clone();
    if target.params.len() != k0 + k1 || vals.len() != k0 {
        return Err(SmnError::Arity {
            arity: target.params.len(),
            k0: vals.len(),
            k1,
        });
    }
    let mut body = target.body.clone();
    for (x, v) in target.params[..k0].iter().zip(vals) {
        body = subst_value(&body, *x, &ValueTerm::Num(v.clone()));
    }
    let applied = ParamDef {
        name: format!("{}_{}", target.name, k0),
        params: target.params[k0..].to_vec(),
        body,
    };
    // Recursive references to the target must keep meaning the original.
    let called = defs.iter().any(|d| calls(&d.body, j));
    let new_j = if called {
        defs.push(applied);
        defs.len() as u64
    } else {
        defs[j.0 as usize - 1] = applied;
        j.0
    };
    index_of(&defs, new_j)
}

fn calls(t: &ProcTerm, j: DefId) -> bool {
    match t {
        ProcTerm::Call(k, _) => *k == j,
        ProcTerm::Nil | ProcTerm::Universal(_) | ProcTerm::Running(_) => false,
        ProcTerm::In(_, _, b)
        | ProcTerm::Out(_, _, b)
        | ProcTerm::Res(_, b)
        | ProcTerm::Cond(_, b)
        | ProcTerm::RepIn(_, _, b)
        | ProcTerm::RepOut(_, _, b)
        | ProcTerm::Let(_, _, b) => calls(b, j),
        ProcTerm::Par(l, r) | ProcTerm::IfElse(_, l, r) => calls(l, j) || calls(r, j),
        ProcTerm::Case { arms, .. } => arms.iter().any(|(_, a)| calls(a, j)),
    }
}
