//! Bounded state-space exploration and behavioural equivalence checks.

mod bisim;
mod stratified;

use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use thiserror::Error;

use crate::lts::{direct_transitions, Action, DirectState, LtsError, DEFAULT_FUEL};

pub use bisim::{bb_div_equiv, Verdict, Witness};
pub use stratified::stratified_equiv;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error("graph was truncated by the exploration caps")]
    TruncatedInput,
    #[error("graphs were explored with different value bounds ({0} and {1})")]
    VboundMismatch(u64, u64),
    #[error(transparent)]
    Lts(#[from] LtsError),
}

/// A finite transition graph explored from state 0.
#[derive(Clone, Debug)]
pub struct LtsGraph {
    pub states: Vec<DirectState>,
    pub edges: Vec<(usize, Action, usize)>,
    /// The state can perform an infinite τ-run inside the graph.
    pub diverges: Vec<bool>,
    /// Some successors of the state were cut off by a cap.
    pub truncated: Vec<bool>,
    /// Largest input value offered during exploration.
    pub vbound: u64,
}

impl LtsGraph {
    pub fn is_truncated(&self) -> bool {
        self.truncated.iter().any(|&t| t)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Adjacency lists in edge order.
    pub fn successors(&self) -> Vec<Vec<(Action, usize)>> {
        let mut succ = vec![Vec::new(); self.states.len()];
        for (s, a, t) in &self.edges {
            succ[*s].push((a.clone(), *t));
        }
        succ
    }

    /// Text dump: `states N edges M`, one `src ACTION dst` line per edge,
    /// then the divergent states after `div:`.
    pub fn dump(&self) -> String {
        let mut out = format!("states {} edges {}\n", self.states.len(), self.edges.len());
        for (s, a, t) in &self.edges {
            let _ = writeln!(out, "{s} {a} {t}");
        }
        out.push_str("div:");
        for (i, d) in self.diverges.iter().enumerate() {
            if *d {
                let _ = write!(out, " {i}");
            }
        }
        out.push('\n');
        out
    }
}

/// Breadth-first exploration from `start`, stopping at `state_cap` states or
/// `depth_cap` steps from the start.
pub fn explore(
    start: &DirectState,
    vbound: u64,
    state_cap: usize,
    depth_cap: usize,
) -> Result<LtsGraph, LtsError> {
    let mut index: HashMap<DirectState, usize> = HashMap::new();
    let mut states = vec![start.clone()];
    let mut depth = vec![0usize];
    let mut truncated = vec![false];
    let mut edges = Vec::new();
    index.insert(start.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let succ = direct_transitions(&states[s], vbound, DEFAULT_FUEL)?;
        if depth[s] >= depth_cap {
            truncated[s] = !succ.is_empty();
            continue;
        }
        for (a, t) in succ {
            let id = match index.get(&t) {
                Some(&id) => id,
                None if states.len() < state_cap => {
                    let id = states.len();
                    index.insert(t.clone(), id);
                    states.push(t);
                    depth.push(depth[s] + 1);
                    truncated.push(false);
                    queue.push_back(id);
                    id
                }
                None => {
                    truncated[s] = true;
                    continue;
                }
            };
            edges.push((s, a, id));
        }
    }
    let diverges = divergence(states.len(), &edges);
    Ok(LtsGraph {
        states,
        edges,
        diverges,
        truncated,
        vbound,
    })
}

/// Strongly connected components of the subgraph given by `succ`, in reverse
/// topological order (Tarjan).
pub(crate) fn tarjan(n: usize, succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // Explicit call stack of (node, next child position).
        let mut calls = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, i)) = calls.last() {
            if i < succ[v].len() {
                let w = succ[v][i];
                calls.last_mut().expect("nonempty").1 += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                calls.pop();
                if let Some(&(parent, _)) = calls.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// States that lie on or reach a τ-cycle.
fn divergence(n: usize, edges: &[(usize, Action, usize)]) -> Vec<bool> {
    let mut tau = vec![Vec::new(); n];
    for (s, a, t) in edges {
        if a.is_tau() {
            tau[*s].push(*t);
        }
    }
    let mut div = vec![false; n];
    // Components come out successors-first, so one pass suffices.
    for comp in tarjan(n, &tau) {
        let cyclic = comp.len() > 1 || tau[comp[0]].contains(&comp[0]);
        let reaches = comp.iter().any(|&s| tau[s].iter().any(|&t| div[t]));
        if cyclic || reaches {
            for &s in &comp {
                div[s] = true;
            }
        }
    }
    div
}

/// Whether some visible action is reachable from the start state.
pub fn observable(g: &LtsGraph) -> Result<bool, EquivError> {
    if g.is_truncated() {
        return Err(EquivError::TruncatedInput);
    }
    Ok(g.edges.iter().any(|(_, a, _)| !a.is_tau()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_source;

    fn graph(src: &str, vbound: u64) -> LtsGraph {
        let p = parse_source(src).unwrap();
        explore(&DirectState::of_program(&p), vbound, 2000, usize::MAX).unwrap()
    }

    #[test]
    fn explore_examples() {
        let g = graph("main = 'n1(0).0", 1);
        assert_eq!((g.states.len(), g.edges.len()), (2, 1));
        assert!(!g.diverges.iter().any(|&d| d));
        let g = graph("main = (n3)('n3(0).0 | n3(x0).0)", 1);
        assert_eq!((g.states.len(), g.edges.len()), (2, 1));
        assert_eq!(g.edges[0].1, Action::Tau);
        let p = parse_source("main = n1(x0).n1(x1).0").unwrap();
        let g = explore(&DirectState::of_program(&p), 1, 1, usize::MAX).unwrap();
        assert!(g.truncated[0]);
    }

    #[test]
    fn divergence_flags() {
        let g = graph("def W() = (n3)('n3(0).0 | n3(x0).W())\nmain = 'n1(0).W()", 0);
        assert_eq!(g.diverges, vec![false, true]);
    }

    #[test]
    fn observability() {
        assert!(!observable(&graph("main = 0", 1)).unwrap());
        assert!(observable(&graph("main = 'n1(0).0", 1)).unwrap());
        assert!(!observable(&graph("main = (n1)'n1(0).0", 1)).unwrap());
    }

    #[test]
    fn dump_format() {
        let g = graph("main = (n3)('n3(0).0 | n3(x0).0) | 'n1(2).0", 0);
        let d = g.dump();
        assert!(d.starts_with("states 4 edges 4\n"), "{d}");
        assert!(d.contains("0 out n1 2 "), "{d}");
        assert!(d.ends_with("div:\n"));
    }

    #[test]
    fn tarjan_orders_successors_first() {
        let succ = vec![vec![1], vec![2], vec![1]];
        let comps = tarjan(3, &succ);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[1], vec![0]);
    }
}
