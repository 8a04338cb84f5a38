//! Exact maximum-weight independent set by branch and bound.

use std::collections::HashMap;

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Self::empty(n);
        for v in 0..n {
            b.insert(v);
        }
        b
    }

    fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    fn remove(&mut self, v: usize) {
        self.0[v / 64] &= !(1 << (v % 64));
    }

    fn contains(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn and_not(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }

    fn or_assign(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }

    fn is_subset(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }
}

pub(crate) struct Mwis<'a> {
    n: usize,
    weights: &'a [i128],
    nbr: Vec<Bits>,
    memo: HashMap<Bits, (i128, Bits)>,
}

impl<'a> Mwis<'a> {
    pub(crate) fn new(weights: &'a [i128], adj: &[Vec<usize>]) -> Self {
        let n = weights.len();
        let nbr = adj
            .iter()
            .map(|a| {
                let mut b = Bits::empty(n);
                for &w in a {
                    b.insert(w);
                }
                b
            })
            .collect();
        Self {
            n,
            weights,
            nbr,
            memo: HashMap::new(),
        }
    }

    /// Optimum weight and chosen vertices, ascending.
    pub(crate) fn solve_all(&mut self) -> (i128, Vec<usize>) {
        let (w, set) = self.solve(Bits::full(self.n));
        (w, set.iter().collect())
    }

    fn components(&self, mask: &Bits) -> Vec<Bits> {
        let mut rest = mask.clone();
        let mut out = Vec::new();
        loop {
            let Some(root) = rest.iter().next() else { break };
            let mut comp = Bits::empty(self.n);
            comp.insert(root);
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for w in self.nbr[v].and(&rest).iter() {
                    if !comp.contains(w) {
                        comp.insert(w);
                        stack.push(w);
                    }
                }
            }
            rest = rest.and_not(&comp);
            out.push(comp);
        }
        out
    }

    /// Removes forced and dominated vertices; returns the forced weight and set.
    fn reduce(&self, mask: &mut Bits) -> (i128, Bits) {
        let mut taken = Bits::empty(self.n);
        let mut gained = 0i128;
        loop {
            let mut changed = false;
            let verts: Vec<usize> = mask.iter().collect();
            for &v in &verts {
                if !mask.contains(v) {
                    continue;
                }
                let nv = self.nbr[v].and(mask);
                // simplicial and heaviest in its neighbourhood: take it
                let heaviest = nv.iter().all(|u| self.weights[u] <= self.weights[v]);
                if heaviest && nv.iter().all(|u| nv.and_not(&self.nbr[u]).iter().all(|x| x == u)) {
                    gained += self.weights[v];
                    taken.insert(v);
                    mask.remove(v);
                    *mask = mask.and_not(&nv);
                    changed = true;
                    continue;
                }
                // v dominates a neighbour u whose closed neighbourhood
                // contains v's: u can be dropped
                let mut closed_v = nv.clone();
                closed_v.insert(v);
                for u in nv.iter() {
                    if self.weights[u] <= self.weights[v] {
                        let mut closed_u = self.nbr[u].and(mask);
                        closed_u.insert(u);
                        if closed_v.is_subset(&closed_u) {
                            mask.remove(u);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return (gained, taken);
            }
        }
    }

    /// Greedy weighted clique cover: an upper bound on any independent set.
    fn bound(&self, mask: &Bits) -> i128 {
        let mut verts: Vec<usize> = mask.iter().collect();
        verts.sort_by(|&a, &b| self.weights[b].cmp(&self.weights[a]).then(a.cmp(&b)));
        let mut cliques: Vec<Bits> = Vec::new();
        let mut total = 0;
        for v in verts {
            match cliques.iter_mut().find(|c| c.is_subset(&self.nbr[v])) {
                Some(c) => c.insert(v),
                None => {
                    let mut c = Bits::empty(self.n);
                    c.insert(v);
                    cliques.push(c);
                    total += self.weights[v];
                }
            }
        }
        total
    }

    fn solve(&mut self, mut mask: Bits) -> (i128, Bits) {
        let (forced_w, forced) = self.reduce(&mut mask);
        let (w, mut set) = self.solve_reduced(mask);
        set.or_assign(&forced);
        (w + forced_w, set)
    }

    fn solve_reduced(&mut self, mask: Bits) -> (i128, Bits) {
        if mask.is_empty() {
            return (0, Bits::empty(self.n));
        }
        if let Some(hit) = self.memo.get(&mask) {
            return hit.clone();
        }
        let parts = self.components(&mask);
        let result = if parts.len() > 1 {
            let mut total = 0;
            let mut set = Bits::empty(self.n);
            for part in parts {
                let (w, s) = self.solve(part);
                total += w;
                set.or_assign(&s);
            }
            (total, set)
        } else {
            let mut best = (i128::MIN, Bits::empty(self.n));
            self.branch(mask.clone(), 0, Bits::empty(self.n), &mut best);
            best
        };
        self.memo.insert(mask, result.clone());
        result
    }

    fn branch(&mut self, mask: Bits, cur: i128, chosen: Bits, best: &mut (i128, Bits)) {
        if mask.is_empty() {
            if cur > best.0 {
                *best = (cur, chosen);
            }
            return;
        }
        if cur + self.bound(&mask) <= best.0 {
            return;
        }
        if self.components(&mask).len() > 1 {
            let (w, s) = self.solve(mask);
            if cur + w > best.0 {
                let mut all = chosen;
                all.or_assign(&s);
                *best = (cur + w, all);
            }
            return;
        }
        let v = mask
            .iter()
            .max_by_key(|&v| (self.nbr[v].and(&mask).count(), self.weights[v], std::cmp::Reverse(v)))
            .expect("mask is not empty");
        let mut with = mask.and_not(&self.nbr[v]);
        with.remove(v);
        let mut chosen_with = chosen.clone();
        chosen_with.insert(v);
        let (fw, forced) = self.reduce(&mut with);
        chosen_with.or_assign(&forced);
        self.branch(with, cur + self.weights[v] + fw, chosen_with, best);

        let mut without = mask;
        without.remove(v);
        let (fw, forced) = self.reduce(&mut without);
        let mut chosen_without = chosen;
        chosen_without.or_assign(&forced);
        self.branch(without, cur + fw, chosen_without, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(weights: &[i128], adj: &[Vec<usize>]) -> i128 {
        let n = weights.len();
        (0u32..1 << n)
            .filter(|s| (0..n).all(|v| s >> v & 1 == 0 || adj[v].iter().all(|&u| s >> u & 1 == 0)))
            .map(|s| (0..n).filter(|v| s >> v & 1 == 1).map(|v| weights[v]).sum())
            .max()
            .unwrap()
    }

    #[test]
    fn random_graphs_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..=14);
            let p = rng.gen_range(0.05..0.7);
            let mut adj = vec![Vec::new(); n];
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(p) {
                        adj[a].push(b);
                        adj[b].push(a);
                    }
                }
            }
            let weights: Vec<i128> = (0..n).map(|_| rng.gen_range(1..20)).collect();
            let (w, set) = Mwis::new(&weights, &adj).solve_all();
            assert_eq!(w, brute(&weights, &adj));
            assert_eq!(set.iter().map(|&v| weights[v]).sum::<i128>(), w);
            for &a in &set {
                assert!(adj[a].iter().all(|b| !set.contains(b)));
            }
        }
    }

    #[test]
    fn larger_graph_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 90;
        let mut adj = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(0.06) {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        let weights: Vec<i128> = (0..n).map(|_| rng.gen_range(1..50)).collect();
        let (w, set) = Mwis::new(&weights, &adj).solve_all();
        assert_eq!(set.iter().map(|&v| weights[v]).sum::<i128>(), w);
        for &a in &set {
            assert!(adj[a].iter().all(|b| !set.contains(b)));
        }
        // every vertex outside the set must have a neighbour inside it or
        // adding it would improve the optimum
        for v in 0..n {
            if !set.contains(&v) {
                assert!(adj[v].iter().any(|b| set.contains(b)));
            }
        }
    }
}
