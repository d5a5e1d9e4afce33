//! Depth-indexed approximation of branching bisimilarity for subjects whose
//! state space is too large (or infinite) to explore completely.

use std::collections::{HashMap, HashSet, VecDeque};

use super::tarjan;
use crate::lts::{direct_transitions, Action, DirectState, LtsError, DEFAULT_FUEL};

/// Largest τ-closure examined when matching a move.
const CLOSURE_LIMIT: usize = 64;

struct Lazy {
    vbound: u64,
    states: Vec<DirectState>,
    index: HashMap<DirectState, usize>,
    succ: Vec<Option<Vec<(Action, usize)>>>,
    closures: HashMap<usize, (Vec<usize>, Option<bool>)>,
    memo: HashMap<(usize, usize), (usize, usize)>,
}

impl Lazy {
    fn intern(&mut self, s: DirectState) -> usize {
        if let Some(&id) = self.index.get(&s) {
            return id;
        }
        let id = self.states.len();
        self.index.insert(s.clone(), id);
        self.states.push(s);
        self.succ.push(None);
        id
    }

    fn succ(&mut self, s: usize) -> Result<Vec<(Action, usize)>, LtsError> {
        if let Some(out) = &self.succ[s] {
            return Ok(out.clone());
        }
        let raw = direct_transitions(&self.states[s], self.vbound, DEFAULT_FUEL)?;
        let out: Vec<(Action, usize)> = raw.into_iter().map(|(a, t)| (a, self.intern(t))).collect();
        self.succ[s] = Some(out.clone());
        Ok(out)
    }

    /// States reachable from `s` by τ-steps (including `s`), and whether `s`
    /// diverges when that closure is small enough to know.
    fn closure(&mut self, s: usize) -> Result<(Vec<usize>, Option<bool>), LtsError> {
        if let Some(c) = self.closures.get(&s) {
            return Ok(c.clone());
        }
        let mut seen = HashSet::from([s]);
        let mut order = vec![s];
        let mut queue = VecDeque::from([s]);
        let mut complete = true;
        while let Some(u) = queue.pop_front() {
            for (a, t) in self.succ(u)? {
                if a.is_tau() && seen.insert(t) {
                    if order.len() >= CLOSURE_LIMIT {
                        complete = false;
                        continue;
                    }
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        let div = if complete {
            let local: HashMap<usize, usize> =
                order.iter().enumerate().map(|(i, &u)| (u, i)).collect();
            let mut adj = vec![Vec::new(); order.len()];
            for (i, &u) in order.iter().enumerate() {
                for (a, t) in self.succ(u)? {
                    if a.is_tau() {
                        adj[i].push(local[&t]);
                    }
                }
            }
            Some(
                tarjan(order.len(), &adj)
                    .iter()
                    .any(|c| c.len() > 1 || adj[c[0]].contains(&c[0])),
            )
        } else {
            None
        };
        let out = (order, div);
        self.closures.insert(s, out.clone());
        Ok(out)
    }

    fn equiv(&mut self, p: usize, q: usize, n: usize) -> Result<bool, LtsError> {
        if n == 0 || p == q {
            return Ok(true);
        }
        let (max_true, min_false) = self.memo.get(&(p, q)).copied().unwrap_or((0, usize::MAX));
        if n <= max_true {
            return Ok(true);
        }
        if n >= min_false {
            return Ok(false);
        }
        let (_, dp) = self.closure(p)?;
        let (_, dq) = self.closure(q)?;
        let ok = !matches!((dp, dq), (Some(a), Some(b)) if a != b)
            && self.forth(p, q, n)?
            && self.forth(q, p, n)?;
        let entry = self.memo.entry((p, q)).or_insert((0, usize::MAX));
        if ok {
            entry.0 = entry.0.max(n);
        } else {
            entry.1 = entry.1.min(n);
        }
        Ok(ok)
    }

    // Every move of p is matched by q, up to depth n.
    fn forth(&mut self, p: usize, q: usize, n: usize) -> Result<bool, LtsError> {
        for (a, p2) in self.succ(p)? {
            if a.is_tau() && self.equiv(p2, q, n - 1)? {
                continue;
            }
            let (closure, _) = self.closure(q)?;
            let mut matched = false;
            'search: for q2 in closure {
                if q2 != q && !self.equiv(p, q2, n - 1)? {
                    continue;
                }
                for (b, q3) in self.succ(q2)? {
                    if b == a && self.equiv(p2, q3, n - 1)? {
                        matched = true;
                        break 'search;
                    }
                }
            }
            if !matched {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Whether `s1` and `s2` are related by the `depth`-th approximant of
/// branching bisimilarity. Divergence is compared whenever both τ-closures
/// are small enough to be explored completely.
pub fn stratified_equiv(
    s1: &DirectState,
    s2: &DirectState,
    depth: usize,
    vbound: u64,
) -> Result<bool, LtsError> {
    let mut lazy = Lazy {
        vbound,
        states: Vec::new(),
        index: HashMap::new(),
        succ: Vec::new(),
        closures: HashMap::new(),
        memo: HashMap::new(),
    };
    let p = lazy.intern(s1.clone());
    let q = lazy.intern(s2.clone());
    lazy.equiv(p, q, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{derive_replication, parse_source};

    fn state(src: &str) -> DirectState {
        DirectState::of_program(&parse_source(src).unwrap())
    }

    #[test]
    fn replication_matches_its_derived_form() {
        let p = parse_source("main = !n1(x0).0").unwrap();
        let q = derive_replication(&p);
        let (s1, s2) = (DirectState::of_program(&p), DirectState::of_program(&q));
        assert!(stratified_equiv(&s1, &s2, 6, 1).unwrap());
    }

    #[test]
    fn unmatched_output_is_found() {
        for depth in 1..4 {
            assert!(!stratified_equiv(&state("main = 0"), &state("main = 'n1(0).0"), depth, 1).unwrap());
        }
        assert!(stratified_equiv(&state("main = 0"), &state("main = 'n1(0).0"), 0, 1).unwrap());
    }

    #[test]
    fn reflexive() {
        let s = state("main = !n1(x0).'n2(x0).0");
        assert!(stratified_equiv(&s, &s, 5, 1).unwrap());
    }

    #[test]
    fn inert_tau_and_divergence() {
        let a = state("main = 'n1(0).0");
        let b = state("main = (n3)('n3(0).0 | n3(x0).'n1(0).0)");
        assert!(stratified_equiv(&a, &b, 6, 1).unwrap());
        let w = state("def W() = (n3)('n3(0).0 | n3(x0).W())\nmain = W()");
        assert!(!stratified_equiv(&state("main = 0"), &w, 3, 1).unwrap());
    }

    #[test]
    fn antitone_in_depth() {
        let a = state("main = n1(x0).n1(x1).'n2(0).0");
        let b = state("main = n1(x0).n1(x1).'n3(0).0");
        let verdicts: Vec<bool> = (0..6).map(|d| stratified_equiv(&a, &b, d, 0).unwrap()).collect();
        assert_eq!(verdicts, [true, true, true, false, false, false]);
    }
}
