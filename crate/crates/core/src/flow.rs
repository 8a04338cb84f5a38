//! Blocking-flow (Dinic) maximum flow over exact integer capacities.

use std::collections::VecDeque;
use std::ops::{AddAssign, SubAssign};

use num_traits::Zero;

/// Integer-like capacity type. Implemented for `i128` and `BigInt`.
pub trait Capacity: Clone + Ord + Zero + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> {}

impl<T> Capacity for T where T: Clone + Ord + Zero + for<'a> AddAssign<&'a T> + for<'a> SubAssign<&'a T> {}

#[derive(Debug, Clone)]
struct Arc<T> {
    to: usize,
    residual: T,
}

/// Directed network; each added arc gets a paired reverse arc at `id ^ 1`.
#[derive(Debug, Clone)]
pub struct FlowNetwork<T> {
    arcs: Vec<Arc<T>>,
    capacity: Vec<T>,
    adj: Vec<Vec<usize>>,
}

impl<T: Capacity> FlowNetwork<T> {
    pub fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            capacity: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn arc_count(&self) -> usize {
        self.capacity.len()
    }

    /// Adds `from -> to` and returns its id.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: T) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, residual: cap.clone() });
        self.arcs.push(Arc {
            to: from,
            residual: T::zero(),
        });
        self.capacity.push(cap);
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    pub fn endpoints(&self, id: usize) -> (usize, usize) {
        (self.arcs[id ^ 1].to, self.arcs[id].to)
    }

    /// Flow currently routed on arc `id` (an id returned by [`add_arc`]).
    pub fn flow(&self, id: usize) -> T {
        let mut f = self.capacity[id / 2].clone();
        f -= &self.arcs[id].residual;
        f
    }

    fn levels(&self, s: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.nodes()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let a = &self.arcs[e];
                if level[a.to] == usize::MAX && a.residual > T::zero() {
                    level[a.to] = level[v] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        level
    }

    /// Pushes a maximum flow from `s` to `t` and returns its value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> T {
        let mut total = T::zero();
        if s == t {
            return total;
        }
        loop {
            let level = self.levels(s);
            if level[t] == usize::MAX {
                return total;
            }
            let mut next = vec![0usize; self.nodes()];
            let mut path: Vec<usize> = Vec::new();
            let mut v = s;
            loop {
                if v == t {
                    let mut bottleneck = self.arcs[path[0]].residual.clone();
                    for &e in &path[1..] {
                        if self.arcs[e].residual < bottleneck {
                            bottleneck = self.arcs[e].residual.clone();
                        }
                    }
                    let mut cut_at = path.len();
                    for (k, &e) in path.iter().enumerate() {
                        self.arcs[e].residual -= &bottleneck;
                        self.arcs[e ^ 1].residual += &bottleneck;
                        if cut_at == path.len() && self.arcs[e].residual.is_zero() {
                            cut_at = k;
                        }
                    }
                    total += &bottleneck;
                    path.truncate(cut_at);
                    v = match path.last() {
                        Some(&e) => self.arcs[e].to,
                        None => s,
                    };
                    continue;
                }
                let mut advanced = false;
                while next[v] < self.adj[v].len() {
                    let e = self.adj[v][next[v]];
                    let a = &self.arcs[e];
                    if a.residual > T::zero() && level[a.to] == level[v] + 1 {
                        path.push(e);
                        v = a.to;
                        advanced = true;
                        break;
                    }
                    next[v] += 1;
                }
                if advanced {
                    continue;
                }
                // dead end: retreat and skip the arc that led here
                match path.pop() {
                    Some(e) => {
                        v = self.arcs[e ^ 1].to;
                        next[v] += 1;
                    }
                    None => break,
                }
            }
        }
    }

    /// Nodes reachable from `s` along arcs with positive residual capacity.
    pub fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &e in &self.adj[v] {
                let a = &self.arcs[e];
                if !seen[a.to] && a.residual > T::zero() {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }

    /// Splits the current `s -> t` flow into paths, returned as
    /// `(node sequence, amount)`. Assumes the flow is acyclic.
    pub fn decompose(&self, s: usize, t: usize) -> Vec<(Vec<usize>, T)> {
        let mut remaining: Vec<T> = (0..self.capacity.len()).map(|k| self.flow(2 * k)).collect();
        let mut next = vec![0usize; self.nodes()];
        let mut out = Vec::new();
        loop {
            let mut path_arcs: Vec<usize> = Vec::new();
            let mut v = s;
            while v != t {
                let mut step = None;
                while next[v] < self.adj[v].len() {
                    let e = self.adj[v][next[v]];
                    if e % 2 == 0 && remaining[e / 2] > T::zero() {
                        step = Some(e);
                        break;
                    }
                    next[v] += 1;
                }
                match step {
                    Some(e) => {
                        path_arcs.push(e);
                        v = self.arcs[e].to;
                    }
                    None => {
                        // only possible at the source once all flow is used
                        debug_assert!(v == s, "flow conservation violated");
                        return out;
                    }
                }
            }
            let mut amount = remaining[path_arcs[0] / 2].clone();
            for &e in &path_arcs[1..] {
                if remaining[e / 2] < amount {
                    amount = remaining[e / 2].clone();
                }
            }
            let mut nodes = vec![s];
            for &e in &path_arcs {
                remaining[e / 2] -= &amount;
                nodes.push(self.arcs[e].to);
            }
            out.push((nodes, amount));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn classic_network() {
        let mut g: FlowNetwork<i128> = FlowNetwork::new(6);
        for (a, b, c) in [(0, 1, 16), (0, 2, 13), (1, 2, 10), (2, 1, 4), (1, 3, 12), (3, 2, 9), (2, 4, 14), (4, 3, 7), (3, 5, 20), (4, 5, 4)] {
            g.add_arc(a, b, c);
        }
        assert_eq!(g.max_flow(0, 5), 23);
        let reach = g.reachable(0);
        assert!(reach[0] && !reach[5]);
    }

    #[test]
    fn bigint_and_decomposition() {
        let mut g: FlowNetwork<BigInt> = FlowNetwork::new(4);
        g.add_arc(0, 1, BigInt::from(3));
        g.add_arc(0, 2, BigInt::from(2));
        g.add_arc(1, 3, BigInt::from(2));
        g.add_arc(2, 3, BigInt::from(5));
        g.add_arc(1, 2, BigInt::from(1));
        assert_eq!(g.max_flow(0, 3), BigInt::from(5));
        let paths = g.decompose(0, 3);
        let total: BigInt = paths.iter().map(|p| p.1.clone()).sum();
        assert_eq!(total, BigInt::from(5));
        assert!(paths.iter().all(|(nodes, _)| nodes[0] == 0 && *nodes.last().unwrap() == 3));
    }

    #[test]
    fn disconnected_sink() {
        let mut g: FlowNetwork<i128> = FlowNetwork::new(3);
        g.add_arc(0, 1, 5);
        assert_eq!(g.max_flow(0, 2), 0);
        assert!(g.decompose(0, 2).is_empty());
    }
}
