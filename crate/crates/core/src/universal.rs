//! The on-the-fly interpreter for VPC! codes and the universal process for
//! VPC program codes.
//!
//! A configuration is a tree of parallel compositions and restrictions whose
//! leaves hold Gödel codes. Each step decodes only the outermost constructor
//! of a leaf, so received values are substituted into codes before the rest
//! of the term is ever looked at.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};

use crate::checker;
use crate::godel::{self, tag_split, unpair, unpair2, Code};
use crate::lts::{self, Action};
use crate::syntax::{Dialect, Name, Nat, ParamDef, ProcTerm, TypeSig, UniversalSeed, ValueTerm, VarId};

/// A definition as the engine sees it: parameter indices and a body code.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DefEntry {
    pub params: Vec<VarId>,
    pub body: Code,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EngineEnv {
    pub dialect: Dialect,
    pub sig: TypeSig,
    pub defs: Vec<DefEntry>,
    // Names each definition may use freely, through the definitions it calls.
    def_names: Vec<BTreeSet<Name>>,
}

impl EngineEnv {
    fn new(dialect: Dialect, sig: TypeSig, defs: Vec<DefEntry>) -> Self {
        let decoded: Vec<ParamDef> = defs
            .iter()
            .enumerate()
            .map(|(i, d)| ParamDef {
                name: format!("D{}", i + 1),
                params: d.params.clone(),
                body: godel::decode_term(&d.body, dialect).unwrap_or(ProcTerm::Nil),
            })
            .collect();
        EngineEnv {
            dialect,
            sig,
            defs,
            def_names: lts::def_names(&decoded),
        }
    }

    // Drops restrictions whose name cannot occur in their scope, as the
    // direct semantics does.
    fn tidy(&self, n: Node) -> Node {
        match n {
            Node::Par(l, r) => Node::par(self.tidy(*l), self.tidy(*r)),
            Node::Res(c, b) => {
                let b = self.tidy(*b);
                if self.mentions(&b, Name(c)) {
                    Node::res(c, b)
                } else {
                    b
                }
            }
            other => other,
        }
    }

    fn mentions(&self, n: &Node, c: Name) -> bool {
        match n {
            Node::Nil => false,
            Node::Sim(z) => match godel::decode_term(z, self.dialect) {
                Ok(t) => lts::free_names(&t, &self.def_names).contains(&c),
                Err(_) => true,
            },
            Node::Par(l, r) => self.mentions(l, c) || self.mentions(r, c),
            Node::Res(d, b) => Name(*d) != c && self.mentions(b, c),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Node {
    Nil,
    /// A simulator leaf running the term coded by its index.
    Sim(Code),
    Par(Box<Node>, Box<Node>),
    /// Restriction of a (normal) name index.
    Res(u64, Box<Node>),
}

impl Node {
    fn par(l: Node, r: Node) -> Node {
        match (l, r) {
            (Node::Nil, x) | (x, Node::Nil) => x,
            (l, r) => Node::Par(Box::new(l), Box::new(r)),
        }
    }

    fn res(c: u64, b: Node) -> Node {
        match b {
            Node::Nil => Node::Nil,
            b => Node::Res(c, Box::new(b)),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum StepKind {
    /// The τ spent dispatching a definition call.
    DefCall,
    Ordinary,
}

#[derive(Clone, Debug)]
pub struct Config {
    root: Node,
    env: Arc<EngineEnv>,
}

impl PartialEq for Config {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && (Arc::ptr_eq(&self.env, &other.env) || self.env == other.env)
    }
}

impl Eq for Config {}

impl Hash for Config {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.root.hash(state)
    }
}

impl Config {
    fn nil(dialect: Dialect, sig: TypeSig) -> Self {
        Config {
            root: Node::Nil,
            env: Arc::new(EngineEnv::new(dialect, sig, Vec::new())),
        }
    }

    fn with_root(&self, root: Node) -> Self {
        Config {
            root: self.env.tidy(root),
            env: Arc::clone(&self.env),
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn env(&self) -> &EngineEnv {
        &self.env
    }

    pub fn sig(&self) -> &TypeSig {
        &self.env.sig
    }

    pub fn is_nil(&self) -> bool {
        self.root == Node::Nil
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, n: &Node, d: Dialect) -> fmt::Result {
    match n {
        Node::Nil => f.write_str("0"),
        Node::Sim(z) => match godel::decode_term(z, d) {
            Ok(t) => write!(f, "{t}"),
            Err(_) => write!(f, "#{z}"),
        },
        Node::Par(l, r) => {
            f.write_str("(")?;
            write_node(f, l, d)?;
            f.write_str(" | ")?;
            write_node(f, r, d)?;
            f.write_str(")")
        }
        Node::Res(c, b) => {
            write!(f, "(n{c})")?;
            write_node(f, b, d)
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, self.env.dialect)
    }
}

/// The interpreter: runs the VPC! term coded by `z` once it has been checked
/// and normalized against `sig`; ill-typed codes run as `0`.
pub fn boot_interpreter(z: &Code, sig: &TypeSig) -> Config {
    let code = checker::parse_index(z, sig, Dialect::Bang);
    let cfg = Config::nil(Dialect::Bang, sig.clone());
    let root = expand(&code, Dialect::Bang);
    cfg.with_root(root)
}

/// The universal process: runs the VPC program coded by `z` (main term plus
/// definitions) after checking and normalizing it against `sig`.
pub fn boot_universal(z: &Code, sig: &TypeSig) -> Config {
    let Some(p) = checker::parse_program_index(z, sig) else {
        return Config::nil(Dialect::P, sig.clone());
    };
    let defs = p
        .defs
        .iter()
        .map(|d| DefEntry {
            params: d.params.clone(),
            body: godel::encode_term(&d.body, Dialect::P).expect("normalized bodies encode"),
        })
        .collect();
    let main = godel::encode_term(&p.main, Dialect::P).expect("normalized main encodes");
    let env = Arc::new(EngineEnv::new(Dialect::P, sig.clone(), defs));
    Config {
        root: env.tidy(expand(&main, Dialect::P)),
        env,
    }
}

/// What a universal seed becomes after receiving `code`.
pub fn boot_seed(seed: &UniversalSeed, code: &Nat) -> Config {
    if seed.retarget.is_empty() {
        return boot_universal(code, &seed.sig);
    }
    match crate::hovpc::retarget_code(code, &seed.retarget) {
        Ok(z) => boot_universal(&z, &seed.sig),
        Err(_) => Config::nil(Dialect::P, seed.sig.clone()),
    }
}

// Parallel compositions and restrictions are taken apart eagerly; every other
// constructor stays coded until it acts.
fn expand(z: &Code, d: Dialect) -> Node {
    let (tag, q) = tag_split(z, d.modulus());
    match tag {
        0 => Node::Nil,
        3 => {
            let (l, r) = unpair2(&q);
            Node::par(expand(&l, d), expand(&r, d))
        }
        4 => {
            let (c, b) = unpair2(&q);
            match c.to_u64() {
                Some(c) => Node::res(c, expand(&b, d)),
                None => Node::Nil,
            }
        }
        5 if unpair2(&q).1.is_zero() => Node::Nil,
        _ => Node::Sim(z.clone()),
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Raw {
    In(u64, Nat),
    Out(u64, Nat),
    Tau(StepKind),
}

impl Raw {
    fn subject(&self) -> Option<u64> {
        match self {
            Raw::In(a, _) | Raw::Out(a, _) => Some(*a),
            Raw::Tau(_) => None,
        }
    }
}

struct Engine<'a> {
    env: &'a EngineEnv,
    vbound: u64,
}

fn num_code(v: &Nat) -> Code {
    godel::encode_vterm(&ValueTerm::Num(v.clone()))
}

impl Engine<'_> {
    fn d(&self) -> Dialect {
        self.env.dialect
    }

    fn subst(&self, body: &Code, x: &Code, v: &Nat) -> Option<Code> {
        let x = x.to_u64()?;
        godel::subst_code(body, x, &num_code(v), self.d()).ok()
    }

    fn trans(&self, n: &Node) -> Vec<(Raw, Node)> {
        match n {
            Node::Nil => Vec::new(),
            Node::Sim(z) => self.leaf(z),
            Node::Par(l, r) => {
                let lt = self.trans(l);
                let rt = self.trans(r);
                let mut out = Vec::with_capacity(lt.len() + rt.len());
                for (a, l2) in &lt {
                    out.push((a.clone(), Node::par(l2.clone(), (**r).clone())));
                }
                for (a, r2) in &rt {
                    out.push((a.clone(), Node::par((**l).clone(), r2.clone())));
                }
                for (a, l2) in &lt {
                    if let Raw::Out(c, v) = a {
                        for r2 in self.receive(r, *c, v) {
                            out.push((Raw::Tau(StepKind::Ordinary), Node::par(l2.clone(), r2)));
                        }
                    }
                }
                for (a, r2) in &rt {
                    if let Raw::Out(c, v) = a {
                        for l2 in self.receive(l, *c, v) {
                            out.push((Raw::Tau(StepKind::Ordinary), Node::par(l2, r2.clone())));
                        }
                    }
                }
                out
            }
            Node::Res(c, b) => self
                .trans(b)
                .into_iter()
                .filter(|(a, _)| a.subject() != Some(*c))
                .map(|(a, b)| (a, Node::res(*c, b)))
                .collect(),
        }
    }

    fn leaf(&self, z: &Code) -> Vec<(Raw, Node)> {
        let d = self.d();
        let (tag, q) = tag_split(z, d.modulus());
        match (tag, d) {
            (1, _) | (6, Dialect::Bang) => {
                let parts = unpair(&q, 3);
                let Some(a) = parts[0].to_u64() else {
                    return Vec::new();
                };
                (0..=self.vbound)
                    .filter_map(|v| {
                        let v = Nat::from(v);
                        let body = expand(&self.subst(&parts[2], &parts[1], &v)?, d);
                        let next = if tag == 1 {
                            body
                        } else {
                            Node::par(body, Node::Sim(z.clone()))
                        };
                        Some((Raw::In(a, v), next))
                    })
                    .collect()
            }
            (2, _) | (7, Dialect::Bang) => {
                let parts = unpair(&q, 3);
                let (Some(a), Ok(v)) = (parts[0].to_u64(), godel::val_term_code(&parts[1])) else {
                    return Vec::new();
                };
                let body = expand(&parts[2], d);
                let next = if tag == 2 {
                    body
                } else {
                    Node::par(body, Node::Sim(z.clone()))
                };
                vec![(Raw::Out(a, v), next)]
            }
            (5, _) => {
                let (phi, body) = unpair2(&q);
                match godel::val_formula_code(&phi) {
                    Ok(true) => self.trans(&expand(&body, d)),
                    _ => Vec::new(),
                }
            }
            (6, Dialect::P) => self.call(&q).into_iter().collect(),
            // Tags 0, 3 and 4 never reach a leaf.
            _ => self.trans(&expand(z, d)),
        }
    }

    // The dispatcher: look up definition j, check the argument count and
    // substitute the argument codes for the parameters.
    fn call(&self, q: &Code) -> Option<(Raw, Node)> {
        let (j, args) = unpair2(q);
        let def = j
            .to_usize()
            .and_then(|j| j.checked_sub(1))
            .and_then(|i| self.env.defs.get(i))?;
        let args = godel::seq_decode(&args).ok()?;
        if args.len() != def.params.len() {
            return None;
        }
        let mut body = def.body.clone();
        for (x, a) in def.params.iter().zip(&args) {
            let a = match godel::val_term_code(a) {
                Ok(v) => godel::encode_vterm(&ValueTerm::Num(v)),
                Err(_) => a.clone(),
            };
            body = godel::subst_code(&body, x.0, &a, Dialect::P).ok()?;
        }
        Some((Raw::Tau(StepKind::DefCall), expand(&body, Dialect::P)))
    }

    fn receive(&self, n: &Node, a: u64, v: &Nat) -> Vec<Node> {
        match n {
            Node::Nil => Vec::new(),
            Node::Sim(z) => self.leaf_receive(z, a, v),
            Node::Par(l, r) => {
                let mut out: Vec<Node> = self
                    .receive(l, a, v)
                    .into_iter()
                    .map(|l2| Node::par(l2, (**r).clone()))
                    .collect();
                for r2 in self.receive(r, a, v) {
                    out.push(Node::par((**l).clone(), r2));
                }
                out
            }
            Node::Res(c, _) if *c == a => Vec::new(),
            Node::Res(c, b) => self
                .receive(b, a, v)
                .into_iter()
                .map(|b| Node::res(*c, b))
                .collect(),
        }
    }

    fn leaf_receive(&self, z: &Code, a: u64, v: &Nat) -> Vec<Node> {
        let d = self.d();
        let (tag, q) = tag_split(z, d.modulus());
        match (tag, d) {
            (1, _) | (6, Dialect::Bang) => {
                let parts = unpair(&q, 3);
                if parts[0].to_u64() != Some(a) {
                    return Vec::new();
                }
                let Some(body) = self.subst(&parts[2], &parts[1], v) else {
                    return Vec::new();
                };
                let body = expand(&body, d);
                vec![if tag == 1 {
                    body
                } else {
                    Node::par(body, Node::Sim(z.clone()))
                }]
            }
            (5, _) => {
                let (phi, body) = unpair2(&q);
                match godel::val_formula_code(&phi) {
                    Ok(true) => self.receive(&expand(&body, d), a, v),
                    _ => Vec::new(),
                }
            }
            _ => Vec::new(),
        }
    }
}

/// Steps of `c` with the kind of each τ. Inputs are offered for values `0..=vbound`.
pub fn config_steps(c: &Config, vbound: u64) -> Vec<(Action, StepKind, Config)> {
    let engine = Engine {
        env: &c.env,
        vbound,
    };
    let sig = &c.env.sig;
    engine
        .trans(&c.root)
        .into_iter()
        .filter_map(|(raw, n)| {
            let (action, kind) = match raw {
                Raw::In(m, v) => (Action::Input(sig.global(m)?, v), StepKind::Ordinary),
                Raw::Out(m, v) => (Action::Output(sig.global(m)?, v), StepKind::Ordinary),
                Raw::Tau(k) => (Action::Tau, k),
            };
            Some((action, kind, c.with_root(n)))
        })
        .collect()
}

pub fn config_transitions(c: &Config, vbound: u64) -> Vec<(Action, Config)> {
    config_steps(c, vbound)
        .into_iter()
        .map(|(a, _, c)| (a, c))
        .collect()
}

/// Residual configurations after `c` receives `v` on the global name `a`.
pub fn config_receive(c: &Config, a: Name, v: &Nat) -> Vec<Config> {
    let Some(m) = c.env.sig.position(a) else {
        return Vec::new();
    };
    let engine = Engine {
        env: &c.env,
        vbound: 0,
    };
    engine
        .receive(&c.root, m, v)
        .into_iter()
        .map(|n| c.with_root(n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::godel::encode_program;
    use crate::syntax::parse_source;

    fn sig(s: &str) -> TypeSig {
        s.parse().unwrap()
    }

    #[test]
    fn nil_and_ill_typed_boot_to_nil() {
        assert!(boot_interpreter(&Code::zero(), &sig("i=0;g=")).is_nil());
        assert!(boot_interpreter(&Code::from(26u32), &sig("i=0;g=n1")).is_nil());
        assert!(boot_universal(&Code::zero(), &sig("i=0;g=")).is_nil());
    }

    #[test]
    fn interpreter_offers_inputs() {
        let cfg = boot_interpreter(&Code::from(8u32), &sig("i=0;g=n1"));
        let t = config_transitions(&cfg, 1);
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].0, Action::Input(Name(1), Nat::from(0u32)));
        assert!(t[0].1.is_nil());
    }

    #[test]
    fn call_arguments_are_evaluated() {
        let p = parse_source("def A(x0) = n1(x1).A(x0 + x1)\nmain = A(0)").unwrap();
        let cfg = boot_universal(&encode_program(&p).unwrap(), &sig("i=0;g=n1"));
        let mut state = cfg;
        let mut seen = Vec::new();
        for _ in 0..4 {
            let steps = config_steps(&state, 0);
            assert_eq!(steps.len(), 1);
            state = steps[0].2.clone();
            seen.push(state.clone());
        }
        // in n1 0 followed by the call lands back on the same configuration.
        assert_eq!(seen[1], seen[3]);
    }

    #[test]
    fn universal_runs_output() {
        let p = parse_source("main = 'n1(1).0").unwrap();
        let cfg = boot_universal(&encode_program(&p).unwrap(), &sig("i=0;g=n1"));
        let t = config_transitions(&cfg, 2);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, Action::Output(Name(1), Nat::from(1u32)));
        assert!(t[0].1.is_nil());
    }

    #[test]
    fn globals_resolve_positionally() {
        let p = parse_source("main = 'n7(1).0 | 'n3(2).0").unwrap();
        let cfg = boot_universal(&encode_program(&p).unwrap(), &sig("i=0;g=n7,n3"));
        let acts: Vec<String> = config_transitions(&cfg, 0).iter().map(|(a, _)| a.to_string()).collect();
        assert_eq!(acts, ["out n7 1", "out n3 2"]);
    }

    #[test]
    fn calls_cost_one_tau() {
        let p = parse_source("def D(x) = 'n1(x).0\nmain = D(4)").unwrap();
        let cfg = boot_universal(&encode_program(&p).unwrap(), &sig("i=0;g=n1"));
        let steps = config_steps(&cfg, 0);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].0, Action::Tau);
        assert_eq!(steps[0].1, StepKind::DefCall);
        let next = config_transitions(&steps[0].2, 0);
        assert_eq!(next[0].0, Action::Output(Name(1), Nat::from(4u32)));
    }

    #[test]
    fn restriction_blocks_and_synchronizes() {
        let p = parse_source("main = (n3)('n3(0).0 | n3(x0).'n1(x0 + 1).0)").unwrap();
        let cfg = boot_universal(&encode_program(&p).unwrap(), &sig("i=1;g=n1"));
        let t = config_transitions(&cfg, 2);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, Action::Tau);
        let t2 = config_transitions(&t[0].1, 2);
        assert_eq!(t2[0].0, Action::Output(Name(1), Nat::from(1u32)));
    }

    #[test]
    fn replication_respawns_leaf() {
        let t = crate::syntax::parse_term("!'n1(0).0").unwrap();
        let z = godel::encode_term(&t, Dialect::Bang).unwrap();
        let cfg = boot_interpreter(&z, &sig("i=0;g=n1"));
        let t1 = config_transitions(&cfg, 0);
        assert_eq!(t1.len(), 1);
        let t2 = config_transitions(&t1[0].1, 0);
        assert_eq!(t2.len(), 1);
        assert_eq!(t1[0].1, t2[0].1);
    }
}
