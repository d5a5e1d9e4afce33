//! Corpora and generators shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vpc::equiv::{bb_div_equiv, explore, stratified_equiv};
use vpc::lts::DirectState;
use vpc::syntax::{Dialect, Formula, Name, ProcTerm, TypeSig, ValueTerm, VarId};

/// Whether a corpus entry has a finite state space under the test bounds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Space {
    Finite,
    Infinite,
}

pub struct Entry {
    pub label: &'static str,
    pub source: &'static str,
    pub sig: &'static str,
    pub space: Space,
}

const fn entry(label: &'static str, source: &'static str, sig: &'static str, space: Space) -> Entry {
    Entry {
        label,
        source,
        sig,
        space,
    }
}

use Space::{Finite, Infinite};

/// VPC programs run through the universal process.
pub const PROGRAMS: &[Entry] = &[
    entry("nil", "main = 0", "i=0;g=", Finite),
    entry("output", "main = 'n1(3).0", "i=0;g=n1", Finite),
    entry("echo", "main = n1(x0).'n2(x0).0", "i=0;g=n1,n2", Finite),
    entry("interleaving", "main = 'n1(0).0 | 'n2(1).0", "i=0;g=n1,n2", Finite),
    entry(
        "private sync",
        "main = (n3)('n3(2).0 | n3(x0).'n1(x0).0)",
        "i=1;g=n1",
        Finite,
    ),
    entry(
        "nested restriction",
        "main = (n3)(n4)('n3(1).0 | n3(x0).'n4(x0).0 | n4(x1).'n1(x1 + 1).0)",
        "i=2;g=n1",
        Finite,
    ),
    entry(
        "shadowed local",
        "main = (n3)('n3(0).0 | (n3)('n3(1).0 | n3(x0).'n1(x0).0) | n3(x1).'n2(x1).0)",
        "i=1;g=n1,n2",
        Finite,
    ),
    entry(
        "guard",
        "main = n1(x0).if x0 < 1 then 'n2(x0).0",
        "i=0;g=n1,n2",
        Finite,
    ),
    entry(
        "two-leg if",
        "main = n1(x0).if x0 = 1 then 'n2(0).0 else 'n3(0).0",
        "i=0;g=n1,n2,n3",
        Finite,
    ),
    entry(
        "case",
        "main = n1(x0).case x0 of _ = 0 => 'n2(0).0; 0 < _ => 'n2(1).0; end",
        "i=0;g=n1,n2",
        Finite,
    ),
    entry("let", "main = let y = 3 in 'n1(y + y).0", "i=0;g=n1", Finite),
    entry(
        "existential guard",
        "main = n1(x0).if exists x1. x1 + x1 = x0 then 'n2(x0).0",
        "i=0;g=n1,n2",
        Finite,
    ),
    entry(
        "universal guard",
        "main = n1(x0).if forall x1. (x1 < x0 => x1 < 1) then 'n2(0).0",
        "i=0;g=n1,n2",
        Finite,
    ),
    entry(
        "dynamic capture",
        "def D(x) = 'n1(0).0 | (n1)('n1(x).0 | 'n1(x).0 | n1(z).D(z + 1))\nmain = D(0)",
        "i=1;g=n1",
        Infinite,
    ),
    entry(
        "counter",
        "def C(x0) = 'n1(x0).C(x0 + 1)\nmain = C(0)",
        "i=0;g=n1",
        Infinite,
    ),
    entry(
        "bounded counter",
        "def C(x0) = if x0 < 3 then 'n1(x0).C(x0 + 1)\nmain = C(0)",
        "i=0;g=n1",
        Finite,
    ),
    entry(
        "mutual recursion",
        "def A(x0) = 'n1(x0).B(x0)\ndef B(x0) = n2(x1).A(x1)\nmain = A(0)",
        "i=0;g=n1,n2",
        Finite,
    ),
    entry(
        "ping pong",
        "def P() = 'n1(0).Q()\ndef Q() = n2(x0).if x0 = 0 then P()\nmain = P()",
        "i=0;g=n1,n2",
        Finite,
    ),
    entry(
        "tau loop",
        "def W() = (n3)('n3(0).0 | n3(x0).W())\nmain = W()",
        "i=1;g=",
        Finite,
    ),
    entry(
        "race",
        "main = (n3)('n3(0).0 | n3(x0).'n1(0).0 | n3(x1).'n2(0).0)",
        "i=1;g=n1,n2",
        Finite,
    ),
    entry(
        "two inputs",
        "main = n1(x0).n1(x1).if x0 < x1 then 'n2(x1).0",
        "i=0;g=n1,n2",
        Finite,
    ),
    entry(
        "arithmetic",
        "main = n1(x0).'n2(x0 + x0 + 1).0",
        "i=0;g=n1,n2",
        Finite,
    ),
    entry(
        "parallel inputs",
        "main = n1(x0).0 | n2(x1).'n1(x1).0",
        "i=0;g=n1,n2",
        Finite,
    ),
    entry(
        "global also restricted",
        "main = 'n1(0).0 | (n1)('n1(1).0 | n1(x0).'n2(x0).0)",
        "i=1;g=n1,n2",
        Finite,
    ),
    entry(
        "two parameters",
        "def S(x0, x1) = if x0 < x1 then 'n1(x0).S(x0 + 1, x1)\nmain = n2(x2).S(0, x2)",
        "i=0;g=n1,n2",
        Finite,
    ),
    entry(
        "recursive private channel",
        "def R(x0) = (n3)('n3(x0).0 | n3(x1).'n1(x1).R(x1))\nmain = R(1)",
        "i=1;g=n1",
        Finite,
    ),
    entry("false guard", "main = if 1 < 0 then 'n1(0).0", "i=0;g=n1", Finite),
    entry(
        "server loop",
        "def S() = n1(x0).'n2(x0 + 1).S()\nmain = S()",
        "i=0;g=n1,n2",
        Finite,
    ),
];

/// VPC! terms with replication.
pub const REPLICATION: &[(&str, &str)] = &[
    ("!n1(x0).'n2(x0).0", "i=0;g=n1,n2"),
    ("!'n1(0).0", "i=0;g=n1"),
    ("!n1(x0).0 | 'n1(1).0", "i=0;g=n1"),
    ("(n3)(!'n3(1).0 | n3(x0).'n1(x0).0)", "i=1;g=n1"),
    ("(n3)(!n3(x0).'n1(x0).0 | 'n3(0).'n3(1).0)", "i=1;g=n1"),
    ("!n1(x0).if x0 = 1 then 'n2(0).0", "i=0;g=n1,n2"),
    ("n1(x0).!'n2(x0).0", "i=0;g=n1,n2"),
    ("(n3)(!n3(x0).'n3(x0 + 1).0 | 'n3(0).0) | 'n1(0).0", "i=1;g=n1"),
    ("!n1(x0).(n3)('n3(x0).0 | n3(x1).'n2(x1).0)", "i=1;g=n1,n2"),
    ("'n1(0).!n2(x0).'n1(x0).0", "i=0;g=n1,n2"),
    ("!n1(x0).!'n2(x0).0", "i=0;g=n1,n2"),
];

/// Definition systems for partial application: source, target, signature,
/// and the three `k0` splits tried.
pub const SYSTEMS: &[(&str, &str, &str, [usize; 3])] = &[
    ("def D(x0, x1) = 'n1(x0 + x1).0\nmain = 0", "D", "i=0;g=n1", [0, 1, 2]),
    (
        "def D(x0, x1, x2) = if x0 < x1 then 'n1(x2).0 else 'n2(x2).0\nmain = 0",
        "D",
        "i=0;g=n1,n2",
        [1, 2, 3],
    ),
    (
        "def D(x0, x1) = if x0 < x1 then 'n1(x0).D(x0 + 1, x1)\nmain = 0",
        "D",
        "i=0;g=n1",
        [0, 1, 2],
    ),
    (
        "def A(x0, x1) = 'n1(x0).B(x1, x0)\ndef B(x0, x1) = 'n2(x0).0\nmain = 0",
        "A",
        "i=0;g=n1,n2",
        [0, 1, 2],
    ),
    (
        "def D(x0, x1) = n1(x2).if x2 = x0 then 'n2(x1).0\nmain = 0",
        "D",
        "i=0;g=n1,n2",
        [0, 1, 2],
    ),
    (
        "def D(x0, x1) = (n3)('n3(x0).0 | n3(x2).'n1(x2 + x1).0)\nmain = 0",
        "D",
        "i=1;g=n1",
        [0, 1, 2],
    ),
    (
        "def D(x0, x1, x2) = 'n1(x0).'n1(x1).'n1(x2).0\nmain = 0",
        "D",
        "i=0;g=n1",
        [0, 1, 2],
    ),
    (
        "def D(x0, x1) = 'n1(x0).0 | 'n2(x1).0\ndef B(x0) = D(x0, x0)\nmain = 0",
        "D",
        "i=0;g=n1,n2",
        [0, 1, 2],
    ),
];

/// Higher-order scenarios.
pub const HO_SCENARIOS: &[(&str, &str)] = &[
    (
        "send, receive, instantiate",
        "(n1)('n1(\\g. 'g(7).0).0 | n1(X:<0,1>).X(n2))",
    ),
    (
        "nested higher-order prefix",
        "(n1)(n4)('n1(\\g. 'g(5).0).0 | 'n4(\\h. h(y).'h(y + 1).0).0 | n1(X:<0,1>).n4(Y:<0,1>).(X(n2) | Y(n3)))",
    ),
    (
        "parameterless abstraction",
        "(n1)('n1(\\. (c)('c(3).0 | c(y).0) : <1,0>).0 | n1(X:<1,0>).(X() | 'n2(0).0))",
    ),
    (
        "two parameters and a local",
        "(n1)('n1(\\a, b. (c)('c(2).0 | c(y).'a(y).'b(y + 1).0) : <1,2>).0 | n1(X:<1,2>).X(n2, n3))",
    ),
    (
        "abstraction used twice",
        "(n1)('n1(\\g. g(x).'g(x + 1).0).0 | n1(X:<0,1>).(X(n2) | X(n3)))",
    ),
];

/// Ten processes for the equivalence-relation checks.
pub const EQUIV_CORPUS: &[&str] = &[
    "main = 0",
    "main = (n3)('n3(0).0 | n3(x0).0)",
    "main = 'n1(0).0",
    "main = (n3)('n3(0).0 | n3(x0).'n1(0).0)",
    "main = 'n1(0).(n3)('n3(0).0 | n3(x0).0)",
    "def W() = (n3)('n3(0).0 | n3(x0).W())\nmain = W()",
    "main = n1(x0).0",
    "main = n1(x0).(n3)('n3(0).0 | n3(x1).0)",
    "main = n1(x0).(n9)('n9(0).0 | n9(x1).'n2(0).0 | n9(x2).'n3(0).0)",
    "main = (n9)('n9(0).0 | n9(x1).n1(x0).'n2(0).0 | n9(x2).n1(x0).'n3(0).0)",
];

pub fn sig(s: &str) -> TypeSig {
    s.parse().expect("corpus signature parses")
}

/// Bounded branching bisimilarity: the full check when both graphs fit in
/// `cap` states, otherwise the depth-`depth` approximant.
pub fn bisimilar(a: &DirectState, b: &DirectState, vbound: u64, cap: usize, depth: usize) -> Result<bool, String> {
    let ga = explore(a, vbound, cap, usize::MAX).map_err(|e| e.to_string())?;
    let gb = explore(b, vbound, cap, usize::MAX).map_err(|e| e.to_string())?;
    if !ga.is_truncated() && !gb.is_truncated() {
        return bb_div_equiv(&ga, &gb)
            .map(|v| v.equivalent)
            .map_err(|e| e.to_string());
    }
    stratified_equiv(a, b, depth, vbound).map_err(|e| e.to_string())
}

// ---- random generation ------------------------------------------------------

/// Random value term over at most `vars` variables.
pub fn gen_vterm(rng: &mut ChaCha8Rng, depth: u32, vars: &[VarId]) -> ValueTerm {
    match rng.gen_range(0..if depth == 0 { 2 } else { 3 }) {
        0 => ValueTerm::Num(BigUint::from(rng.gen_range(0..4u32))),
        1 if !vars.is_empty() => ValueTerm::Var(vars[rng.gen_range(0..vars.len())]),
        1 => ValueTerm::Num(BigUint::from(rng.gen_range(0..4u32))),
        _ => ValueTerm::add(gen_vterm(rng, depth - 1, vars), gen_vterm(rng, depth - 1, vars)),
    }
}

/// Random formula; quantifiers bind fresh variables from `pool`.
pub fn gen_formula(rng: &mut ChaCha8Rng, depth: u32, vars: &[VarId], pool: &[VarId]) -> Formula {
    let atoms = 4;
    let k = if depth == 0 { rng.gen_range(0..atoms) } else { rng.gen_range(0..atoms + 5) };
    match k {
        0 => Formula::True,
        1 => Formula::False,
        2 => Formula::Lt(gen_vterm(rng, 1, vars), gen_vterm(rng, 1, vars)),
        3 => Formula::Eq(gen_vterm(rng, 1, vars), gen_vterm(rng, 1, vars)),
        4 => Formula::and(gen_formula(rng, depth - 1, vars, pool), gen_formula(rng, depth - 1, vars, pool)),
        5 => Formula::or(gen_formula(rng, depth - 1, vars, pool), gen_formula(rng, depth - 1, vars, pool)),
        6 => Formula::implies(gen_formula(rng, depth - 1, vars, pool), gen_formula(rng, depth - 1, vars, pool)),
        _ => {
            let x = pool[rng.gen_range(0..pool.len())];
            let mut inner = vars.to_vec();
            inner.push(x);
            let body = Box::new(gen_formula(rng, depth - 1, &inner, pool));
            if k == 7 {
                Formula::Exists(x, body)
            } else {
                Formula::Forall(x, body)
            }
        }
    }
}

/// Random core term of the dialect with names `n1..n{names}` and variables
/// `x0..x{vars-1}`. With `closed`, variables are only used under binders.
pub fn gen_term(
    rng: &mut ChaCha8Rng,
    depth: u32,
    dialect: Dialect,
    names: u64,
    vars: u64,
    closed: bool,
) -> ProcTerm {
    let pool: Vec<VarId> = (0..vars).map(VarId).collect();
    let scope = if closed { Vec::new() } else { pool.clone() };
    term_in(rng, depth, dialect, names, &pool, &scope)
}

fn term_in(
    rng: &mut ChaCha8Rng,
    depth: u32,
    dialect: Dialect,
    names: u64,
    pool: &[VarId],
    scope: &[VarId],
) -> ProcTerm {
    if depth == 0 {
        return ProcTerm::Nil;
    }
    let name = |rng: &mut ChaCha8Rng| Name(rng.gen_range(1..=names));
    let kinds = match dialect {
        Dialect::Bang => 8,
        Dialect::P => 6,
    };
    let d = depth - 1;
    match rng.gen_range(0..kinds) {
        0 => ProcTerm::Nil,
        1 | 6 => {
            let a = name(rng);
            let x = pool[rng.gen_range(0..pool.len())];
            let mut inner = scope.to_vec();
            inner.push(x);
            let body = Box::new(term_in(rng, d, dialect, names, pool, &inner));
            if dialect == Dialect::Bang && rng.gen_bool(0.3) {
                ProcTerm::RepIn(a, x, body)
            } else {
                ProcTerm::In(a, x, body)
            }
        }
        2 | 7 => {
            let a = name(rng);
            let v = gen_vterm(rng, 1, scope);
            let body = Box::new(term_in(rng, d, dialect, names, pool, scope));
            if dialect == Dialect::Bang && rng.gen_bool(0.3) {
                ProcTerm::RepOut(a, v, body)
            } else {
                ProcTerm::Out(a, v, body)
            }
        }
        3 => ProcTerm::par(
            term_in(rng, d, dialect, names, pool, scope),
            term_in(rng, d, dialect, names, pool, scope),
        ),
        4 => ProcTerm::Res(name(rng), Box::new(term_in(rng, d, dialect, names, pool, scope))),
        _ => {
            let phi = gen_formula(rng, 1, scope, pool);
            ProcTerm::Cond(phi, Box::new(term_in(rng, d, dialect, names, pool, scope)))
        }
    }
}

/// `c₀ + c₁·x₀ + c₂·x₁` over the bound variables, coefficients as repeated addition.
fn gen_linear(rng: &mut ChaCha8Rng, vars: &[VarId]) -> ValueTerm {
    let mut t = ValueTerm::num(rng.gen_range(0..=6));
    for &x in vars {
        for _ in 0..rng.gen_range(0..=4) {
            t = ValueTerm::add(t, ValueTerm::Var(x));
        }
    }
    t
}

/// A closed sentence with at most two quantifiers, each guarded by a bound
/// `B ≤ 30` so that every witness lies below 64, and at most three atoms.
pub fn gen_sentence(rng: &mut ChaCha8Rng) -> Formula {
    let q = rng.gen_range(0..=2u64);
    let vars: Vec<VarId> = (0..q).map(VarId).collect();
    let atom = |rng: &mut ChaCha8Rng| {
        let (s, t) = (gen_linear(rng, &vars), gen_linear(rng, &vars));
        if rng.gen_bool(0.5) {
            Formula::Lt(s, t)
        } else {
            Formula::Eq(s, t)
        }
    };
    let mut phi = atom(rng);
    for _ in 0..rng.gen_range(0..=2) {
        let other = atom(rng);
        phi = match rng.gen_range(0..4) {
            0 => Formula::and(phi, other),
            1 => Formula::or(phi, other),
            2 => Formula::implies(phi, other),
            _ => Formula::and(Formula::not(phi), other),
        };
    }
    for &x in vars.iter().rev() {
        let guard = Formula::Lt(ValueTerm::Var(x), ValueTerm::num(rng.gen_range(0..=30)));
        phi = if rng.gen_bool(0.5) {
            Formula::Exists(x, Box::new(Formula::and(guard, phi)))
        } else {
            Formula::Forall(x, Box::new(Formula::implies(guard, phi)))
        };
    }
    phi
}
