use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{
    pair, pair2, seq_code, seq_decode, tag_join, tag_split, to_index, to_len, unpair, unpair2, Code,
    CodecError,
};
use crate::presburger;
use crate::syntax::{
    desugar_term, subst_value, DefId, Dialect, Formula, Name, Nat, ParamDef, ProcTerm, Program,
    ValueTerm, VarId,
};

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

// ---- value terms --------------------------------------------------------------

/// `Num k ↦ 3k`, `Var v ↦ 3v+1`, `Add(s,t) ↦ 3π(⟦s⟧,⟦t⟧)+2`.
pub fn encode_vterm(t: &ValueTerm) -> Code {
    match t {
        ValueTerm::Num(k) => k * 3u32,
        ValueTerm::Var(v) => big(v.0) * 3u32 + 1u32,
        ValueTerm::Add(l, r) => pair2(&encode_vterm(l), &encode_vterm(r)) * 3u32 + 2u32,
    }
}

pub fn decode_vterm(z: &Code) -> Result<ValueTerm, CodecError> {
    let q = z / 3u32;
    match (z % 3u32).to_u32().expect("residue below 3") {
        0 => Ok(ValueTerm::Num(q)),
        1 => Ok(ValueTerm::Var(VarId(to_index(&q)?))),
        _ => {
            let (l, r) = unpair2(&q);
            Ok(ValueTerm::add(decode_vterm(&l)?, decode_vterm(&r)?))
        }
    }
}

// ---- formulas -----------------------------------------------------------------

/// `⊥ ↦ 0`, `⊤ ↦ 1`, otherwise `7q + r + 2` with `r` tagging
/// `∧, ∨, ⇒, ∃, ∀, <, =` in that order.
pub fn encode_formula(phi: &Formula) -> Code {
    let (r, q) = match phi {
        Formula::False => return BigUint::zero(),
        Formula::True => return BigUint::one(),
        Formula::And(a, b) => (0u32, pair2(&encode_formula(a), &encode_formula(b))),
        Formula::Or(a, b) => (1, pair2(&encode_formula(a), &encode_formula(b))),
        Formula::Implies(a, b) => (2, pair2(&encode_formula(a), &encode_formula(b))),
        Formula::Exists(x, b) => (3, pair2(&big(x.0), &encode_formula(b))),
        Formula::Forall(x, b) => (4, pair2(&big(x.0), &encode_formula(b))),
        Formula::Lt(s, t) => (5, pair2(&encode_vterm(s), &encode_vterm(t))),
        Formula::Eq(s, t) => (6, pair2(&encode_vterm(s), &encode_vterm(t))),
    };
    q * 7u32 + r + 2u32
}

pub fn decode_formula(z: &Code) -> Result<Formula, CodecError> {
    if z.is_zero() {
        return Ok(Formula::False);
    }
    if z.is_one() {
        return Ok(Formula::True);
    }
    let w = z - 2u32;
    let q = &w / 7u32;
    let r = (&w % 7u32).to_u32().expect("residue below 7");
    let (a, b) = unpair2(&q);
    Ok(match r {
        0 => Formula::and(decode_formula(&a)?, decode_formula(&b)?),
        1 => Formula::or(decode_formula(&a)?, decode_formula(&b)?),
        2 => Formula::implies(decode_formula(&a)?, decode_formula(&b)?),
        3 => Formula::Exists(VarId(to_index(&a)?), Box::new(decode_formula(&b)?)),
        4 => Formula::Forall(VarId(to_index(&a)?), Box::new(decode_formula(&b)?)),
        5 => Formula::Lt(decode_vterm(&a)?, decode_vterm(&b)?),
        _ => Formula::Eq(decode_vterm(&a)?, decode_vterm(&b)?),
    })
}

// ---- process terms ------------------------------------------------------------

/// The Gödel index of `t`: the modulus-7 scheme for VPC! (`Bang`) or the
/// modulus-6 scheme with definition calls for VPC (`P`). Sugar is expanded first.
pub fn encode_term(t: &ProcTerm, d: Dialect) -> Result<Code, CodecError> {
    if t.has_sugar() {
        return encode_core(&desugar_term(t), d);
    }
    encode_core(t, d)
}

fn encode_core(t: &ProcTerm, d: Dialect) -> Result<Code, CodecError> {
    let m = d.modulus();
    let tagged = |r: u32, parts: &[BigUint]| tag_join(r, &pair(parts), m);
    Ok(match t {
        ProcTerm::Nil => BigUint::zero(),
        ProcTerm::In(a, x, b) => tagged(1, &[big(a.0), big(x.0), encode_core(b, d)?]),
        ProcTerm::Out(a, v, b) => tagged(2, &[big(a.0), encode_vterm(v), encode_core(b, d)?]),
        ProcTerm::Par(l, r) => tagged(3, &[encode_core(l, d)?, encode_core(r, d)?]),
        ProcTerm::Res(c, b) => tagged(4, &[big(c.0), encode_core(b, d)?]),
        ProcTerm::Cond(phi, b) => tagged(5, &[encode_formula(phi), encode_core(b, d)?]),
        ProcTerm::RepIn(a, x, b) if d == Dialect::Bang => {
            tagged(6, &[big(a.0), big(x.0), encode_core(b, d)?])
        }
        ProcTerm::RepOut(a, v, b) if d == Dialect::Bang => {
            tagged(7, &[big(a.0), encode_vterm(v), encode_core(b, d)?])
        }
        ProcTerm::RepIn(..) | ProcTerm::RepOut(..) => {
            return Err(CodecError::DialectMismatch("replication", d))
        }
        ProcTerm::Call(j, args) if d == Dialect::P => {
            let args: Vec<BigUint> = args.iter().map(encode_vterm).collect();
            tag_join(6, &pair2(&big(j.0), &seq_code(&args)), m)
        }
        ProcTerm::Call(..) => return Err(CodecError::DialectMismatch("a definition call", d)),
        ProcTerm::IfElse(..) | ProcTerm::Case { .. } | ProcTerm::Let(..) => {
            encode_core(&desugar_term(t), d)?
        }
        ProcTerm::Universal(_) | ProcTerm::Running(_) => return Err(CodecError::NotEncodable),
    })
}

/// Inverse of [`encode_term`]; every natural number decodes.
pub fn decode_term(z: &Code, d: Dialect) -> Result<ProcTerm, CodecError> {
    let (r, q) = tag_split(z, d.modulus());
    let three = |q: &Code| {
        let v = unpair(q, 3);
        (v[0].clone(), v[1].clone(), v[2].clone())
    };
    Ok(match (r, d) {
        (0, _) => ProcTerm::Nil,
        (1, _) | (6, Dialect::Bang) => {
            let (a, x, b) = three(&q);
            let (a, x, b) = (Name(to_index(&a)?), VarId(to_index(&x)?), decode_term(&b, d)?);
            if r == 1 {
                ProcTerm::In(a, x, Box::new(b))
            } else {
                ProcTerm::RepIn(a, x, Box::new(b))
            }
        }
        (2, _) | (7, Dialect::Bang) => {
            let (a, v, b) = three(&q);
            let (a, v, b) = (Name(to_index(&a)?), decode_vterm(&v)?, decode_term(&b, d)?);
            if r == 2 {
                ProcTerm::Out(a, v, Box::new(b))
            } else {
                ProcTerm::RepOut(a, v, Box::new(b))
            }
        }
        (3, _) => {
            let (l, r) = unpair2(&q);
            ProcTerm::par(decode_term(&l, d)?, decode_term(&r, d)?)
        }
        (4, _) => {
            let (c, b) = unpair2(&q);
            ProcTerm::Res(Name(to_index(&c)?), Box::new(decode_term(&b, d)?))
        }
        (5, _) => {
            let (phi, b) = unpair2(&q);
            ProcTerm::Cond(decode_formula(&phi)?, Box::new(decode_term(&b, d)?))
        }
        (6, Dialect::P) => {
            let (j, args) = unpair2(&q);
            let args = seq_decode(&args)?
                .iter()
                .map(decode_vterm)
                .collect::<Result<Vec<_>, _>>()?;
            ProcTerm::Call(DefId(to_index(&j)?), args)
        }
        _ => unreachable!("tag_split returns a tag within the modulus"),
    })
}

// ---- programs -----------------------------------------------------------------

/// `⟨k, ⟨defs, main⟩⟩` where `defs` pairs the k tuples `⟨arity, ⟨params…, body⟩⟩`.
pub fn encode_program(p: &Program) -> Result<Code, CodecError> {
    if p.dialect == Dialect::Bang {
        return Err(CodecError::DialectMismatch("a VPC! program", Dialect::P));
    }
    let defs = p
        .defs
        .iter()
        .map(encode_def_entry)
        .collect::<Result<Vec<_>, _>>()?;
    let main = encode_term(&p.main, Dialect::P)?;
    Ok(pair2(&big(p.defs.len() as u64), &pair2(&pair(&defs), &main)))
}

pub(crate) fn encode_def_entry(def: &ParamDef) -> Result<Code, CodecError> {
    let mut tail: Vec<BigUint> = def.params.iter().map(|x| big(x.0)).collect();
    tail.push(encode_term(&def.body, Dialect::P)?);
    Ok(pair2(&big(def.params.len() as u64), &pair(&tail)))
}

pub(crate) fn decode_def_entry(z: &Code, name: String) -> Result<ParamDef, CodecError> {
    let (arity, tail) = unpair2(z);
    let arity = to_len(&arity)?;
    let parts = unpair(&tail, arity + 1);
    let params = parts[..arity]
        .iter()
        .map(|x| to_index(x).map(VarId))
        .collect::<Result<Vec<_>, _>>()?;
    let body = decode_term(&parts[arity], Dialect::P)?;
    Ok(ParamDef { name, params, body })
}

/// Inverse of [`encode_program`]; definitions are named `D1…Dk`.
pub fn decode_program(z: &Code) -> Result<Program, CodecError> {
    let (k, rest) = unpair2(z);
    let k = to_len(&k)?;
    let (defs, main) = unpair2(&rest);
    let defs = unpair(&defs, k)
        .iter()
        .enumerate()
        .map(|(i, e)| decode_def_entry(e, format!("D{}", i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Program::new(Dialect::P, defs, decode_term(&main, Dialect::P)?))
}

// ---- code-level operations ------------------------------------------------------

/// `⟦decode(z){decode(t)/x_v}⟧`.
pub fn subst_code(z: &Code, v: u64, t: &Code, d: Dialect) -> Result<Code, CodecError> {
    if z.is_zero() {
        return Ok(BigUint::zero());
    }
    let term = decode_term(z, d)?;
    let value = decode_vterm(t)?;
    encode_term(&subst_value(&term, VarId(v), &value), d)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ValKind {
    Term,
    Formula,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Val {
    Num(Nat),
    Bool(bool),
}

/// Evaluates the closed value term or decides the closed formula coded by `z`.
pub fn val_code(z: &Code, kind: ValKind) -> Result<Val, CodecError> {
    Ok(match kind {
        ValKind::Term => Val::Num(val_term_code(z)?),
        ValKind::Formula => Val::Bool(val_formula_code(z)?),
    })
}

pub fn val_term_code(z: &Code) -> Result<Nat, CodecError> {
    Ok(presburger::eval_term(&decode_vterm(z)?)?)
}

pub fn val_formula_code(z: &Code) -> Result<bool, CodecError> {
    Ok(presburger::decide(&decode_formula(z)?)?)
}
