//! Branch-and-bound minimum-cost hitting set over small set systems.
//!
//! Elements carry positive integer costs. Sets are hit when one member is
//! chosen. Optional groups are element-disjoint blocks whose fully-contained
//! sets are solved exactly as a lower bound.

use std::collections::HashMap;
use std::ops::ControlFlow;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Free,
    In,
    Out,
}

#[derive(Clone, Debug)]
struct Group {
    elems: Vec<usize>,
    sets: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct Instance {
    costs: Vec<u64>,
    sets: Vec<Vec<usize>>,
    elem_sets: Vec<Vec<usize>>,
    groups: Vec<Group>,
    // position of an element inside its group, used for cache keys
    group_of: Vec<Option<(usize, usize)>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Stats {
    pub branches: u64,
}

impl Instance {
    /// `sets` must be non-empty and reference elements `< costs.len()`.
    pub fn new(costs: Vec<u64>, sets: Vec<Vec<usize>>) -> Self {
        let mut elem_sets = vec![Vec::new(); costs.len()];
        let sets: Vec<Vec<usize>> = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        for (j, s) in sets.iter().enumerate() {
            debug_assert!(!s.is_empty());
            for &e in s {
                elem_sets[e].push(j);
            }
        }
        let group_of = vec![None; costs.len()];
        Instance { costs, sets, elem_sets, groups: Vec::new(), group_of }
    }

    /// Register element-disjoint groups. Returns the first shared element on overlap.
    pub fn with_groups(mut self, groups: Vec<Vec<usize>>) -> Result<Self, usize> {
        for (gi, mut elems) in groups.into_iter().enumerate() {
            elems.sort_unstable();
            elems.dedup();
            for (pos, &e) in elems.iter().enumerate() {
                if self.group_of[e].is_some() {
                    return Err(e);
                }
                self.group_of[e] = Some((gi, pos));
            }
            let sets = (0..self.sets.len())
                .filter(|&j| self.sets[j].iter().all(|&e| matches!(self.group_of[e], Some((g, _)) if g == gi)))
                .collect();
            self.groups.push(Group { elems, sets });
        }
        Ok(self)
    }

    /// Minimum cost and one optimal hitting set (elements ascending).
    pub fn minimize(&self) -> (u64, Vec<usize>, Stats) {
        let mut s = Search::new(self);
        let (ub, mut best) = self.greedy();
        s.best_cost = ub;
        std::mem::swap(&mut s.best, &mut best);
        s.best_found = true;
        s.optimize();
        let mut best = s.best.clone();
        best.sort_unstable();
        (s.best_cost, best, s.stats)
    }

    /// Visit every hitting set of cost exactly `target` (assumed to be the optimum).
    pub fn enumerate<F>(&self, target: u64, mut visit: F) -> (ControlFlow<()>, Stats)
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let mut s = Search::new(self);
        let flow = s.enumerate(target, &mut visit);
        (flow, s.stats)
    }

    /// Lower bound on the total cost of any hitting set containing `included`
    /// and avoiding `excluded`; `None` if no such set exists.
    pub fn bound_with(&self, included: &[usize], excluded: &[usize]) -> Option<u64> {
        let mut s = Search::new(self);
        for &e in excluded {
            s.exclude(e);
        }
        for &e in included {
            if s.status[e] == Status::Free {
                s.include(e);
            }
        }
        s.lower_bound().map(|lb| lb + s.cost)
    }

    /// Greedy cover (cost-effectiveness), then drop redundant elements.
    fn greedy(&self) -> (u64, Vec<usize>) {
        let mut hit = vec![false; self.sets.len()];
        let mut left = self.sets.len();
        let mut chosen = Vec::new();
        while left > 0 {
            let mut best: Option<(usize, usize)> = None;
            for e in 0..self.costs.len() {
                let gain = self.elem_sets[e].iter().filter(|&&j| !hit[j]).count();
                if gain == 0 {
                    continue;
                }
                // maximize gain / cost
                let better = match best {
                    None => true,
                    Some((b, bg)) => (gain as u128) * (self.costs[b] as u128) > (bg as u128) * (self.costs[e] as u128),
                };
                if better {
                    best = Some((e, gain));
                }
            }
            let (e, _) = best.expect("every set has an element");
            chosen.push(e);
            for &j in &self.elem_sets[e] {
                if !hit[j] {
                    hit[j] = true;
                    left -= 1;
                }
            }
        }
        let mut count = vec![0u32; self.sets.len()];
        for &e in &chosen {
            for &j in &self.elem_sets[e] {
                count[j] += 1;
            }
        }
        // drop the most expensive redundant elements first
        let mut order = chosen.clone();
        order.sort_by_key(|&e| std::cmp::Reverse(self.costs[e]));
        let mut keep: Vec<usize> = Vec::new();
        for e in order {
            if self.elem_sets[e].iter().all(|&j| count[j] > 1) {
                for &j in &self.elem_sets[e] {
                    count[j] -= 1;
                }
            } else {
                keep.push(e);
            }
        }
        keep.sort_unstable();
        (keep.iter().map(|&e| self.costs[e]).sum(), keep)
    }
}

struct Search<'a> {
    inst: &'a Instance,
    status: Vec<Status>,
    hit: Vec<u32>,
    free: Vec<u32>,
    uncovered: usize,
    cost: u64,
    chosen: Vec<usize>,
    best_cost: u64,
    best: Vec<usize>,
    best_found: bool,
    stats: Stats,
    cache: HashMap<(usize, u64, u64), Option<u64>>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance) -> Self {
        Search {
            inst,
            status: vec![Status::Free; inst.costs.len()],
            hit: vec![0; inst.sets.len()],
            free: inst.sets.iter().map(|s| s.len() as u32).collect(),
            uncovered: inst.sets.len(),
            cost: 0,
            chosen: Vec::new(),
            best_cost: u64::MAX,
            best: Vec::new(),
            best_found: false,
            stats: Stats::default(),
            cache: HashMap::new(),
        }
    }

    fn include(&mut self, e: usize) {
        debug_assert_eq!(self.status[e], Status::Free);
        self.status[e] = Status::In;
        self.cost += self.inst.costs[e];
        self.chosen.push(e);
        for &j in &self.inst.elem_sets[e] {
            self.free[j] -= 1;
            if self.hit[j] == 0 {
                self.uncovered -= 1;
            }
            self.hit[j] += 1;
        }
    }

    fn uninclude(&mut self, e: usize) {
        self.status[e] = Status::Free;
        self.cost -= self.inst.costs[e];
        self.chosen.pop();
        for &j in &self.inst.elem_sets[e] {
            self.free[j] += 1;
            self.hit[j] -= 1;
            if self.hit[j] == 0 {
                self.uncovered += 1;
            }
        }
    }

    fn exclude(&mut self, e: usize) {
        if self.status[e] != Status::Free {
            return;
        }
        self.status[e] = Status::Out;
        for &j in &self.inst.elem_sets[e] {
            self.free[j] -= 1;
        }
    }

    fn unexclude(&mut self, e: usize) {
        self.status[e] = Status::Free;
        for &j in &self.inst.elem_sets[e] {
            self.free[j] += 1;
        }
    }

    /// Uncovered set with the fewest free elements, lowest index on ties.
    fn branch_set(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for j in 0..self.inst.sets.len() {
            if self.hit[j] > 0 {
                continue;
            }
            if best.is_none_or(|b| self.free[j] < self.free[b]) {
                best = Some(j);
                if self.free[j] <= 1 {
                    break;
                }
            }
        }
        best
    }

    /// Lower bound on the additional cost to hit all uncovered sets.
    fn lower_bound(&mut self) -> Option<u64> {
        let inst = self.inst;
        let mut order: Vec<usize> = (0..inst.sets.len()).filter(|&j| self.hit[j] == 0).collect();
        if order.iter().any(|&j| self.free[j] == 0) {
            return None;
        }
        order.sort_by_key(|&j| (self.free[j], j));

        let plain = self.packing(&order, false);
        if inst.groups.is_empty() {
            return Some(plain);
        }
        let mut grouped = 0u64;
        for gi in 0..inst.groups.len() {
            grouped += self.group_residual(gi)?;
        }
        grouped += self.packing(&order, true);
        Some(plain.max(grouped))
    }

    /// Greedy element-disjoint packing of uncovered sets; each packed set
    /// forces its cheapest free element. With `skip_groups`, sets touching
    /// a grouped free element are left out.
    fn packing(&self, order: &[usize], skip_groups: bool) -> u64 {
        let inst = self.inst;
        let mut used = vec![false; inst.costs.len()];
        let mut total = 0;
        'sets: for &j in order {
            let mut cheapest = u64::MAX;
            for &e in &inst.sets[j] {
                if self.status[e] != Status::Free {
                    continue;
                }
                if used[e] || (skip_groups && inst.group_of[e].is_some()) {
                    continue 'sets;
                }
                cheapest = cheapest.min(inst.costs[e]);
            }
            for &e in &inst.sets[j] {
                if self.status[e] == Status::Free {
                    used[e] = true;
                }
            }
            total += cheapest;
        }
        total
    }

    /// Exact cost to finish hitting the group's own sets with its free elements.
    fn group_residual(&mut self, gi: usize) -> Option<u64> {
        let inst = self.inst;
        let group = &inst.groups[gi];
        let key = if group.elems.len() <= 64 {
            let (mut inc, mut exc) = (0u64, 0u64);
            for (p, &e) in group.elems.iter().enumerate() {
                match self.status[e] {
                    Status::In => inc |= 1 << p,
                    Status::Out => exc |= 1 << p,
                    Status::Free => {}
                }
            }
            Some((gi, inc, exc))
        } else {
            None
        };
        if let Some(k) = key {
            if let Some(v) = self.cache.get(&k) {
                return *v;
            }
        }
        let open: Vec<Vec<usize>> = group
            .sets
            .iter()
            .filter(|&&j| self.hit[j] == 0)
            .map(|&j| inst.sets[j].iter().copied().filter(|&e| self.status[e] == Status::Free).collect())
            .collect();
        let value = small_min_hit(&open, &inst.costs);
        if let Some(k) = key {
            self.cache.insert(k, value);
        }
        value
    }

    fn optimize(&mut self) {
        self.stats.branches += 1;
        let Some(j) = self.branch_set() else {
            if self.cost < self.best_cost || !self.best_found {
                self.best_cost = self.cost;
                self.best = self.chosen.clone();
                self.best_found = true;
            }
            return;
        };
        match self.lower_bound() {
            Some(lb) if self.cost + lb < self.best_cost => {}
            _ => return,
        }
        let free: Vec<usize> =
            self.inst.sets[j].iter().copied().filter(|&e| self.status[e] == Status::Free).collect();
        for &e in &free {
            self.include(e);
            self.optimize();
            self.uninclude(e);
            // later branches exclude this element
            self.exclude(e);
        }
        for &e in &free {
            if self.status[e] == Status::Out {
                self.unexclude(e);
            }
        }
    }

    fn enumerate<F>(&mut self, target: u64, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        self.stats.branches += 1;
        let Some(j) = self.branch_set() else {
            if self.cost == target {
                let mut sol = self.chosen.clone();
                sol.sort_unstable();
                return visit(&sol);
            }
            return ControlFlow::Continue(());
        };
        match self.lower_bound() {
            Some(lb) if self.cost + lb <= target => {}
            _ => return ControlFlow::Continue(()),
        }
        let free: Vec<usize> =
            self.inst.sets[j].iter().copied().filter(|&e| self.status[e] == Status::Free).collect();
        let mut flow = ControlFlow::Continue(());
        for &e in &free {
            self.include(e);
            flow = self.enumerate(target, visit);
            self.uninclude(e);
            self.exclude(e);
            if flow.is_break() {
                break;
            }
        }
        for &e in &free {
            if self.status[e] == Status::Out {
                self.unexclude(e);
            }
        }
        flow
    }
}

/// Plain recursive minimum hitting set for tiny systems (group bounds).
fn small_min_hit(sets: &[Vec<usize>], costs: &[u64]) -> Option<u64> {
    fn go(sets: &[Vec<usize>], costs: &[u64], chosen: &mut Vec<usize>, cost: u64, best: &mut Option<u64>) {
        if best.is_some_and(|b| cost >= b) {
            return;
        }
        let open: Vec<&Vec<usize>> = sets.iter().filter(|s| !s.iter().any(|e| chosen.contains(e))).collect();
        let Some(pick) = open.iter().min_by_key(|s| s.len()) else {
            *best = Some(cost);
            return;
        };
        // disjoint packing bound over the open sets
        let mut used: Vec<usize> = Vec::new();
        let mut lb = 0;
        let mut sorted = open.clone();
        sorted.sort_by_key(|s| s.len());
        for s in sorted {
            if s.iter().all(|e| !used.contains(e)) {
                lb += s.iter().map(|&e| costs[e]).min().unwrap_or(0);
                used.extend(s.iter().copied());
            }
        }
        if best.is_some_and(|b| cost + lb >= b) {
            return;
        }
        for &e in pick.iter() {
            chosen.push(e);
            go(sets, costs, chosen, cost + costs[e], best);
            chosen.pop();
        }
    }
    if sets.iter().any(Vec::is_empty) {
        return None;
    }
    let mut best = None;
    go(sets, costs, &mut Vec::new(), 0, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_set_has_three_optima() {
        let inst = Instance::new(vec![1, 1, 1], vec![vec![0, 1, 2]]);
        assert_eq!(inst.minimize().0, 1);
        let mut all = Vec::new();
        let _ = inst.enumerate(1, |s| {
            all.push(s.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(all, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn weighted_prefers_cheap_element() {
        let inst = Instance::new(vec![5, 1, 5], vec![vec![0, 1], vec![1, 2]]);
        let (cost, sol, _) = inst.minimize();
        assert_eq!((cost, sol), (1, vec![1]));
    }

    #[test]
    fn groups_reject_overlap() {
        let inst = Instance::new(vec![1; 4], vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(inst.clone().with_groups(vec![vec![0, 1], vec![1, 2]]).unwrap_err(), 1);
        let grouped = inst.with_groups(vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(grouped.bound_with(&[], &[]), Some(2));
        assert_eq!(grouped.minimize().0, 2);
    }

    #[test]
    fn infeasible_bound_is_none() {
        let inst = Instance::new(vec![1, 1], vec![vec![0, 1]]);
        assert_eq!(inst.bound_with(&[], &[0, 1]), None);
        assert_eq!(inst.bound_with(&[0], &[1]), Some(1));
    }
}
