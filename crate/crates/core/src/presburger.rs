//! Evaluation of closed value terms and a decision procedure for closed
//! Presburger sentences over the naturals (Cooper's quantifier elimination).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::syntax::{Formula, Nat, ValueTerm, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("value term is open: {0} is free")]
    OpenTerm(VarId),
    #[error("formula is open: {0} is free")]
    OpenFormula(VarId),
}

/// The unique `i` with `⊢ t = i`.
pub fn eval_term(t: &ValueTerm) -> Result<Nat, EvalError> {
    match t {
        ValueTerm::Num(k) => Ok(k.clone()),
        ValueTerm::Var(v) => Err(EvalError::OpenTerm(*v)),
        ValueTerm::Add(l, r) => Ok(eval_term(l)? + eval_term(r)?),
    }
}

fn eval_in(t: &ValueTerm, env: &[(VarId, BigUint)]) -> Result<BigUint, EvalError> {
    match t {
        ValueTerm::Num(k) => Ok(k.clone()),
        ValueTerm::Var(v) => env
            .iter()
            .rev()
            .find(|(x, _)| x == v)
            .map(|(_, n)| n.clone())
            .ok_or(EvalError::OpenFormula(*v)),
        ValueTerm::Add(l, r) => Ok(eval_in(l, env)? + eval_in(r, env)?),
    }
}

fn has_quantifier(phi: &Formula) -> bool {
    match phi {
        Formula::Exists(..) | Formula::Forall(..) => true,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            has_quantifier(a) || has_quantifier(b)
        }
        _ => false,
    }
}

// Quantifiers range over {0, …, bound} when `bound` is given; quantifier-free
// formulas never consult it.
fn eval_formula(
    phi: &Formula,
    env: &mut Vec<(VarId, BigUint)>,
    bound: u64,
) -> Result<bool, EvalError> {
    Ok(match phi {
        Formula::False => false,
        Formula::True => true,
        Formula::And(a, b) => eval_formula(a, env, bound)? && eval_formula(b, env, bound)?,
        Formula::Or(a, b) => eval_formula(a, env, bound)? || eval_formula(b, env, bound)?,
        Formula::Implies(a, b) => !eval_formula(a, env, bound)? || eval_formula(b, env, bound)?,
        Formula::Exists(x, body) | Formula::Forall(x, body) => {
            let want = matches!(phi, Formula::Exists(..));
            let mut result = !want;
            for i in 0..=bound {
                env.push((*x, BigUint::from(i)));
                let r = eval_formula(body, env, bound);
                env.pop();
                if r? == want {
                    result = want;
                    break;
                }
            }
            result
        }
        Formula::Lt(s, t) => eval_in(s, env)? < eval_in(t, env)?,
        Formula::Eq(s, t) => eval_in(s, env)? == eval_in(t, env)?,
    })
}

/// Evaluates `φ` with every quantifier ranging over `{0, …, bound}`. Agrees
/// with [`decide`] only when all witnesses and counterexamples lie within the bound.
pub fn brute_decide(phi: &Formula, bound: u64) -> Result<bool, EvalError> {
    eval_formula(phi, &mut Vec::new(), bound)
}

/// Decides a closed sentence of Presburger arithmetic over the naturals.
pub fn decide(phi: &Formula) -> Result<bool, EvalError> {
    if !has_quantifier(phi) {
        return eval_formula(phi, &mut Vec::new(), 0);
    }
    let mut qe = Eliminator::default();
    let qf = qe.eliminate_all(phi)?;
    match qf {
        Qf::True => Ok(true),
        Qf::False => Ok(false),
        other => unreachable!("closed sentence left residue {other:?}"),
    }
}

// ---- linear arithmetic ----------------------------------------------------------

type Key = usize;

#[derive(Clone, PartialEq, Eq, Debug)]
struct Lin {
    coeffs: BTreeMap<Key, BigInt>,
    constant: BigInt,
}

impl Lin {
    fn constant(c: BigInt) -> Self {
        Lin {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    fn var(k: Key) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(k, BigInt::one());
        Lin {
            coeffs,
            constant: BigInt::zero(),
        }
    }

    fn add(&self, other: &Lin) -> Lin {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            let e = out.coeffs.entry(*k).or_insert_with(BigInt::zero);
            *e += c;
            if e.is_zero() {
                out.coeffs.remove(k);
            }
        }
        out.constant += &other.constant;
        out
    }

    fn scale(&self, m: &BigInt) -> Lin {
        if m.is_zero() {
            return Lin::constant(BigInt::zero());
        }
        Lin {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c * m)).collect(),
            constant: &self.constant * m,
        }
    }

    fn sub(&self, other: &Lin) -> Lin {
        self.add(&other.scale(&-BigInt::one()))
    }

    fn coeff(&self, k: Key) -> BigInt {
        self.coeffs.get(&k).cloned().unwrap_or_else(BigInt::zero)
    }

    fn is_ground(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Replaces variable `k` by `by`.
    fn subst(&self, k: Key, by: &Lin) -> Lin {
        let a = self.coeff(k);
        if a.is_zero() {
            return self.clone();
        }
        let mut without = self.clone();
        without.coeffs.remove(&k);
        without.add(&by.scale(&a))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Atom {
    /// `0 < l`
    Lt(Lin),
    /// `l = 0`
    Eq(Lin),
    /// `l ≠ 0`
    Ne(Lin),
    /// `d | l`
    Div(BigInt, Lin),
    /// `¬(d | l)`
    NDiv(BigInt, Lin),
}

impl Atom {
    fn lin(&self) -> &Lin {
        match self {
            Atom::Lt(l) | Atom::Eq(l) | Atom::Ne(l) | Atom::Div(_, l) | Atom::NDiv(_, l) => l,
        }
    }

    fn map_lin(&self, f: impl Fn(&Lin) -> Lin) -> Atom {
        match self {
            Atom::Lt(l) => Atom::Lt(f(l)),
            Atom::Eq(l) => Atom::Eq(f(l)),
            Atom::Ne(l) => Atom::Ne(f(l)),
            Atom::Div(d, l) => Atom::Div(d.clone(), f(l)),
            Atom::NDiv(d, l) => Atom::NDiv(d.clone(), f(l)),
        }
    }

    fn negate(&self) -> Atom {
        match self {
            // ¬(0 < l)  ⇔  l ≤ 0  ⇔  0 < 1 − l
            Atom::Lt(l) => Atom::Lt(Lin::constant(BigInt::one()).sub(l)),
            Atom::Eq(l) => Atom::Ne(l.clone()),
            Atom::Ne(l) => Atom::Eq(l.clone()),
            Atom::Div(d, l) => Atom::NDiv(d.clone(), l.clone()),
            Atom::NDiv(d, l) => Atom::Div(d.clone(), l.clone()),
        }
    }

    fn ground_value(&self) -> Option<bool> {
        let l = self.lin();
        if !l.is_ground() {
            return None;
        }
        let c = &l.constant;
        Some(match self {
            Atom::Lt(_) => c.is_positive(),
            Atom::Eq(_) => c.is_zero(),
            Atom::Ne(_) => !c.is_zero(),
            Atom::Div(d, _) => c.mod_floor(d).is_zero(),
            Atom::NDiv(d, _) => !c.mod_floor(d).is_zero(),
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Qf {
    True,
    False,
    Atom(Atom),
    And(Vec<Qf>),
    Or(Vec<Qf>),
}

fn atom(a: Atom) -> Qf {
    match a.ground_value() {
        Some(true) => Qf::True,
        Some(false) => Qf::False,
        None => Qf::Atom(a),
    }
}

fn and_all(parts: impl IntoIterator<Item = Qf>) -> Qf {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Qf::True => {}
            Qf::False => return Qf::False,
            Qf::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Qf::True,
        1 => out.pop().unwrap(),
        _ => Qf::And(out),
    }
}

fn or_all(parts: impl IntoIterator<Item = Qf>) -> Qf {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Qf::False => {}
            Qf::True => return Qf::True,
            Qf::Or(inner) => out.extend(inner),
            other => {
                if !out.contains(&other) {
                    out.push(other)
                }
            }
        }
    }
    match out.len() {
        0 => Qf::False,
        1 => out.pop().unwrap(),
        _ => Qf::Or(out),
    }
}

fn negate(f: &Qf) -> Qf {
    match f {
        Qf::True => Qf::False,
        Qf::False => Qf::True,
        Qf::Atom(a) => atom(a.negate()),
        Qf::And(ps) => or_all(ps.iter().map(negate)),
        Qf::Or(ps) => and_all(ps.iter().map(negate)),
    }
}

fn map_atoms(f: &Qf, g: &dyn Fn(&Atom) -> Qf) -> Qf {
    match f {
        Qf::True | Qf::False => f.clone(),
        Qf::Atom(a) => g(a),
        Qf::And(ps) => and_all(ps.iter().map(|p| map_atoms(p, g))),
        Qf::Or(ps) => or_all(ps.iter().map(|p| map_atoms(p, g))),
    }
}

fn for_atoms(f: &Qf, g: &mut dyn FnMut(&Atom)) {
    match f {
        Qf::True | Qf::False => {}
        Qf::Atom(a) => g(a),
        Qf::And(ps) | Qf::Or(ps) => ps.iter().for_each(|p| for_atoms(p, g)),
    }
}

fn subst_qf(f: &Qf, k: Key, by: &Lin) -> Qf {
    map_atoms(f, &|a| atom(a.map_lin(|l| l.subst(k, by))))
}

#[derive(Default)]
struct Eliminator {
    next_key: Key,
    scope: Vec<(VarId, Key)>,
}

impl Eliminator {
    fn lin_of(&self, t: &ValueTerm) -> Result<Lin, EvalError> {
        Ok(match t {
            ValueTerm::Num(k) => Lin::constant(BigInt::from(k.clone())),
            ValueTerm::Var(v) => {
                let key = self
                    .scope
                    .iter()
                    .rev()
                    .find(|(x, _)| x == v)
                    .map(|(_, k)| *k)
                    .ok_or(EvalError::OpenFormula(*v))?;
                Lin::var(key)
            }
            ValueTerm::Add(l, r) => self.lin_of(l)?.add(&self.lin_of(r)?),
        })
    }

    fn eliminate_all(&mut self, phi: &Formula) -> Result<Qf, EvalError> {
        Ok(match phi {
            Formula::False => Qf::False,
            Formula::True => Qf::True,
            Formula::And(a, b) => and_all([self.eliminate_all(a)?, self.eliminate_all(b)?]),
            Formula::Or(a, b) => or_all([self.eliminate_all(a)?, self.eliminate_all(b)?]),
            Formula::Implies(a, b) => {
                or_all([negate(&self.eliminate_all(a)?), self.eliminate_all(b)?])
            }
            Formula::Lt(s, t) => atom(Atom::Lt(self.lin_of(t)?.sub(&self.lin_of(s)?))),
            Formula::Eq(s, t) => atom(Atom::Eq(self.lin_of(s)?.sub(&self.lin_of(t)?))),
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                let key = self.next_key;
                self.next_key += 1;
                self.scope.push((*x, key));
                let inner = self.eliminate_all(body);
                self.scope.pop();
                let inner = inner?;
                if matches!(phi, Formula::Exists(..)) {
                    exists_nat(key, &inner)
                } else {
                    negate(&exists_nat(key, &negate(&inner)))
                }
            }
        })
    }
}

fn mentions(f: &Qf, k: Key) -> bool {
    let mut found = false;
    for_atoms(f, &mut |a| found |= !a.lin().coeff(k).is_zero());
    found
}

/// `∃x ∈ ℕ. f`.
fn exists_nat(x: Key, f: &Qf) -> Qf {
    if !mentions(f, x) {
        return f.clone();
    }
    let nonneg = Atom::Lt(Lin::var(x).add(&Lin::constant(BigInt::one())));
    cooper(x, &and_all([Qf::Atom(nonneg), f.clone()]))
}

/// `∃x ∈ ℤ. f` by Cooper's method.
fn cooper(x: Key, f: &Qf) -> Qf {
    // Scale every atom so that x has coefficient ±l, then read l·x as x.
    let mut l = BigInt::one();
    for_atoms(f, &mut |a| {
        let c = a.lin().coeff(x);
        if !c.is_zero() {
            l = l.lcm(&c.abs());
        }
    });
    let unit = |a: &Atom| -> Qf {
        let c = a.lin().coeff(x);
        if c.is_zero() {
            return Qf::Atom(a.clone());
        }
        let m = &l / c.abs();
        let scaled = |lin: &Lin| {
            let mut s = lin.scale(&m);
            let sign = if c.is_negative() { -BigInt::one() } else { BigInt::one() };
            s.coeffs.insert(x, sign);
            s
        };
        let flip = |lin: Lin| {
            if lin.coeff(x).is_negative() {
                lin.scale(&-BigInt::one())
            } else {
                lin
            }
        };
        atom(match a {
            Atom::Lt(lin) => Atom::Lt(scaled(lin)),
            Atom::Eq(lin) => Atom::Eq(flip(scaled(lin))),
            Atom::Ne(lin) => Atom::Ne(flip(scaled(lin))),
            Atom::Div(d, lin) => Atom::Div(d * &m, flip(scaled(lin))),
            Atom::NDiv(d, lin) => Atom::NDiv(d * &m, flip(scaled(lin))),
        })
    };
    let mut g = map_atoms(f, &unit);
    if !l.is_one() {
        g = and_all([g, Qf::Atom(Atom::Div(l.clone(), Lin::var(x)))]);
    }

    let mut delta = BigInt::one();
    let mut lower: Vec<Lin> = Vec::new();
    for_atoms(&g, &mut |a| {
        let c = a.lin().coeff(x);
        if c.is_zero() {
            return;
        }
        let mut rest = a.lin().clone();
        rest.coeffs.remove(&x);
        let b = match a {
            // 0 < x + t  ⇔  x > −t
            Atom::Lt(_) if c.is_positive() => Some(rest.scale(&-BigInt::one())),
            // x + t = 0  ⇔  x = −t  (least solution −t, so b = −t − 1)
            Atom::Eq(_) => Some(rest.scale(&-BigInt::one()).sub(&Lin::constant(BigInt::one()))),
            // x + t ≠ 0: the excluded point −t
            Atom::Ne(_) => Some(rest.scale(&-BigInt::one())),
            Atom::Div(d, _) | Atom::NDiv(d, _) => {
                delta = delta.lcm(d);
                None
            }
            _ => None,
        };
        if let Some(b) = b {
            if !lower.contains(&b) {
                lower.push(b);
            }
        }
    });

    let minus_inf = map_atoms(&g, &|a| {
        let c = a.lin().coeff(x);
        match a {
            Atom::Lt(_) if c.is_positive() => Qf::False,
            Atom::Lt(_) if c.is_negative() => Qf::True,
            Atom::Eq(_) if !c.is_zero() => Qf::False,
            Atom::Ne(_) if !c.is_zero() => Qf::True,
            _ => Qf::Atom(a.clone()),
        }
    });

    let mut disjuncts = Vec::new();
    let mut j = BigInt::one();
    while j <= delta {
        let jl = Lin::constant(j.clone());
        let d = subst_qf(&minus_inf, x, &jl);
        if d == Qf::True {
            return Qf::True;
        }
        disjuncts.push(d);
        for b in &lower {
            let d = subst_qf(&g, x, &b.add(&jl));
            if d == Qf::True {
                return Qf::True;
            }
            disjuncts.push(d);
        }
        j += 1;
    }
    or_all(disjuncts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn dec(s: &str) -> bool {
        decide(&parse_formula(s).unwrap()).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_term(&ValueTerm::num(0)).unwrap(), Nat::from(0u32));
        let t = ValueTerm::add(
            ValueTerm::add(ValueTerm::num(1), ValueTerm::num(1)),
            ValueTerm::num(3),
        );
        assert_eq!(eval_term(&t).unwrap(), Nat::from(5u32));
        assert_eq!(
            eval_term(&ValueTerm::var(2)),
            Err(EvalError::OpenTerm(VarId(2)))
        );
    }

    #[test]
    fn decide_examples() {
        assert!(dec("0 = 0"));
        assert!(!dec("exists x0. x0 + x0 = 1"));
        assert!(dec("exists x0. x0 + x0 = 4 /\\ x0 < 3"));
        assert!(dec("forall x. exists y. x < y"));
        assert!(!dec("exists x. forall y. y < x"));
        assert!(dec("forall x. x = 0 \\/ exists y. x = y + 1"));
        assert!(dec("forall x. exists y. x = y + y \\/ x = y + y + 1"));
        assert!(!dec("forall x. exists y. x = y + y + y"));
        assert!(dec("exists x. exists y. x + x + x = y + y /\\ 0 < x"));
        assert!(!dec("exists x. x < 0"));
        assert!(dec("forall x. forall y. x + y = y + x"));
        assert!(!dec("exists x. 5 < x /\\ x < 6"));
        assert!(dec("exists x. 5 < x /\\ x < 7"));
    }

    #[test]
    fn brute_decide_examples() {
        let f = parse_formula("exists x0. x0 = 7").unwrap();
        assert!(brute_decide(&f, 10).unwrap());
        assert!(!brute_decide(&f, 5).unwrap());
        let f = parse_formula("forall x0. x0 < x0 + 1").unwrap();
        assert!(brute_decide(&f, 64).unwrap());
    }

    #[test]
    fn open_formulas_are_rejected() {
        assert!(decide(&parse_formula("x0 = 1").unwrap()).is_err());
        assert!(decide(&parse_formula("exists x. x = y").unwrap()).is_err());
    }

    #[test]
    fn connective_laws() {
        let a = parse_formula("exists x. x + x = 6").unwrap();
        let b = parse_formula("forall x. exists y. y = x + 2").unwrap();
        let c = parse_formula("exists x. x + x + x = 7").unwrap();
        for (p, q) in [(&a, &b), (&a, &c), (&c, &b)] {
            let (dp, dq) = (decide(p).unwrap(), decide(q).unwrap());
            assert_eq!(decide(&Formula::and(p.clone(), q.clone())).unwrap(), dp && dq);
            assert_eq!(decide(&Formula::or(p.clone(), q.clone())).unwrap(), dp || dq);
            assert_eq!(decide(&Formula::not(p.clone())).unwrap(), !dp);
        }
    }
}
