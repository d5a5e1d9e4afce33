//! Divergence-preserving branching bisimilarity by signature refinement.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{tarjan, EquivError, LtsGraph};
use crate::lts::Action;

/// Why two start states were told apart.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Witness {
    /// State of the first graph.
    pub left: usize,
    /// State of the second graph.
    pub right: usize,
    pub reason: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "states {} / {}: {}", self.left, self.right, self.reason)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Verdict {
    pub equivalent: bool,
    pub witness: Option<Witness>,
}

type Signature = (BTreeSet<(Action, usize)>, bool);

/// Whether the start states of `g1` and `g2` are divergence-preserving
/// branching bisimilar. Both graphs must be complete.
pub fn bb_div_equiv(g1: &LtsGraph, g2: &LtsGraph) -> Result<Verdict, EquivError> {
    if g1.is_truncated() || g2.is_truncated() {
        return Err(EquivError::TruncatedInput);
    }
    if g1.vbound != g2.vbound {
        return Err(EquivError::VboundMismatch(g1.vbound, g2.vbound));
    }
    let n1 = g1.states.len();
    let n = n1 + g2.states.len();
    let mut succ: Vec<Vec<(Action, usize)>> = vec![Vec::new(); n];
    for (s, a, t) in &g1.edges {
        succ[*s].push((a.clone(), *t));
    }
    for (s, a, t) in &g2.edges {
        succ[n1 + s].push((a.clone(), n1 + t));
    }

    let mut block = vec![0usize; n];
    let mut count = 1;
    let mut witness = None;
    loop {
        let sigs = signatures(&succ, &block);
        let mut ids: HashMap<(usize, &Signature), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let fresh = ids.len();
            next[s] = *ids.entry((block[s], &sigs[s])).or_insert(fresh);
        }
        if witness.is_none() && block[0] == block[n1] && next[0] != next[n1] {
            witness = Some(Witness {
                left: 0,
                right: 0,
                reason: explain(&sigs[0], &sigs[n1]),
            });
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    let equivalent = block[0] == block[n1];
    Ok(Verdict {
        equivalent,
        witness: if equivalent { None } else { witness },
    })
}

// For each state: the (action, target block) pairs reachable through inert τ
// steps followed by one non-inert step, and whether an infinite inert τ-run
// starts there.
fn signatures(succ: &[Vec<(Action, usize)>], block: &[usize]) -> Vec<Signature> {
    let n = succ.len();
    let inert: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            succ[s]
                .iter()
                .filter(|(a, t)| a.is_tau() && block[*t] == block[s])
                .map(|(_, t)| *t)
                .collect()
        })
        .collect();
    let mut comp_of = vec![usize::MAX; n];
    let mut comp_sig: Vec<Signature> = Vec::new();
    for comp in tarjan(n, &inert) {
        let id = comp_sig.len();
        for &s in &comp {
            comp_of[s] = id;
        }
        let mut set = BTreeSet::new();
        let mut div = comp.len() > 1 || inert[comp[0]].contains(&comp[0]);
        for &s in &comp {
            for (a, t) in &succ[s] {
                if a.is_tau() && block[*t] == block[s] {
                    let c = comp_of[*t];
                    if c != id {
                        let (inner, d) = &comp_sig[c];
                        set.extend(inner.iter().cloned());
                        div |= d;
                    }
                } else {
                    set.insert((a.clone(), block[*t]));
                }
            }
        }
        comp_sig.push((set, div));
    }
    (0..n).map(|s| comp_sig[comp_of[s]].clone()).collect()
}

fn explain(left: &Signature, right: &Signature) -> String {
    if left.1 != right.1 {
        let side = if left.1 { "first" } else { "second" };
        return format!("only the {side} process diverges");
    }
    if let Some((a, _)) = left.0.difference(&right.0).next() {
        return format!("second process cannot match `{a}`");
    }
    if let Some((a, _)) = right.0.difference(&left.0).next() {
        return format!("first process cannot match `{a}`");
    }
    "successor classes differ".to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::explore;
    use crate::lts::DirectState;
    use crate::syntax::parse_source;

    fn graph(src: &str) -> LtsGraph {
        let p = parse_source(src).unwrap();
        explore(&DirectState::of_program(&p), 1, 2000, usize::MAX).unwrap()
    }

    fn equiv(a: &str, b: &str) -> Verdict {
        bb_div_equiv(&graph(a), &graph(b)).unwrap()
    }

    #[test]
    fn inert_tau_is_absorbed() {
        assert!(equiv("main = 0", "main = (n3)('n3(0).0 | n3(x0).0)").equivalent);
        assert!(equiv("main = 'n1(0).0", "main = (n3)('n3(0).0 | n3(x0).'n1(0).0)").equivalent);
    }

    #[test]
    fn divergence_is_observed() {
        let v = equiv("main = 0", "def W() = (n3)('n3(0).0 | n3(x0).W())\nmain = W()");
        assert!(!v.equivalent);
        assert!(v.witness.unwrap().reason.contains("diverges"));
    }

    #[test]
    fn branching_structure_matters() {
        // a.(b + c) versus a.b + a.c, with choice realized by a race on a private channel.
        let left = "main = n1(x0).(n9)('n9(0).0 | n9(x1).'n2(0).0 | n9(x2).'n3(0).0)";
        let right = "main = (n9)('n9(0).0 | n9(x1).n1(x0).'n2(0).0 | n9(x2).n1(x0).'n3(0).0)";
        assert!(!equiv(left, right).equivalent);
        assert!(equiv(left, left).equivalent);
    }

    #[test]
    fn visible_differences() {
        let v = equiv("main = 0", "main = 'n1(0).0");
        assert!(!v.equivalent);
        assert!(v.witness.unwrap().reason.contains("out n1 0"));
    }

    #[test]
    fn truncated_input_is_rejected() {
        let p = parse_source("main = n1(x0).n1(x1).0").unwrap();
        let g = explore(&DirectState::of_program(&p), 1, 1, usize::MAX).unwrap();
        assert_eq!(bb_div_equiv(&g, &g), Err(EquivError::TruncatedInput));
    }
}
