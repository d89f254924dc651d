//! Table-constraint search over a shared finite value set.
//!
//! Backtracking with generalized arc consistency maintained at every node.
//! Fully deterministic: values are tried in ascending order; `solve_first`
//! picks the unassigned variable with the smallest live domain (lowest index
//! on ties), while `enumerate` walks variables in index order so solutions
//! come out in lexicographic order of the value vector.

use crate::caps::Deadline;
use crate::error::Result;
use std::collections::VecDeque;
use std::rc::Rc;

pub struct Constraint {
    /// Variable per position; a variable may appear at several positions.
    pub scope: Vec<usize>,
    /// Allowed value tuples, one entry per position.
    pub allowed: Rc<Vec<Vec<usize>>>,
}

pub struct Csp {
    pub num_vars: usize,
    pub num_values: usize,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone)]
struct Domains {
    words: usize,
    bits: Vec<u64>,
}

impl Domains {
    fn full(num_vars: usize, num_values: usize) -> Self {
        let words = num_values.div_ceil(64).max(1);
        let mut bits = vec![0u64; words * num_vars.max(1)];
        for v in 0..num_vars {
            for val in 0..num_values {
                bits[v * words + val / 64] |= 1 << (val % 64);
            }
        }
        Domains { words, bits }
    }

    fn of(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    fn count(&self, v: usize) -> u32 {
        self.of(v).iter().map(|w| w.count_ones()).sum()
    }

    fn has(&self, v: usize, val: usize) -> bool {
        self.bits[v * self.words + val / 64] & (1 << (val % 64)) != 0
    }

    fn assign(&mut self, v: usize, val: usize) {
        let base = v * self.words;
        for w in &mut self.bits[base..base + self.words] {
            *w = 0;
        }
        self.bits[base + val / 64] = 1 << (val % 64);
    }

    /// Intersect the domain of `v` with `mask`; reports whether it shrank.
    fn intersect(&mut self, v: usize, mask: &[u64]) -> bool {
        let base = v * self.words;
        let mut changed = false;
        for (i, m) in mask.iter().enumerate() {
            let old = self.bits[base + i];
            let new = old & m;
            if new != old {
                self.bits[base + i] = new;
                changed = true;
            }
        }
        changed
    }

    fn values(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, w) in self.of(v).iter().enumerate() {
            let mut w = *w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(i * 64 + b);
                w &= w - 1;
            }
        }
        out
    }

    fn first(&self, v: usize) -> usize {
        for (i, w) in self.of(v).iter().enumerate() {
            if *w != 0 {
                return i * 64 + w.trailing_zeros() as usize;
            }
        }
        unreachable!("empty domain read")
    }
}

struct Engine<'a> {
    csp: &'a Csp,
    /// Constraints touching each variable.
    var_cons: Vec<Vec<u32>>,
    /// For each constraint position, the first position holding the same variable.
    rep_pos: Vec<Vec<usize>>,
    deadline: Deadline,
    ticks: u64,
}

impl<'a> Engine<'a> {
    fn new(csp: &'a Csp, deadline: Deadline) -> Self {
        let mut var_cons = vec![Vec::new(); csp.num_vars];
        let mut rep_pos = Vec::with_capacity(csp.constraints.len());
        for (ci, c) in csp.constraints.iter().enumerate() {
            let mut reps = vec![0; c.scope.len()];
            for (p, &v) in c.scope.iter().enumerate() {
                reps[p] = c.scope.iter().position(|&u| u == v).unwrap();
                if reps[p] == p {
                    var_cons[v].push(ci as u32);
                }
            }
            rep_pos.push(reps);
        }
        Engine {
            csp,
            var_cons,
            rep_pos,
            deadline,
            ticks: 0,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.ticks += 1;
        if self.ticks % 128 == 0 {
            self.deadline.check()?;
        }
        Ok(())
    }

    /// Revise one constraint to arc consistency, queueing neighbours of any
    /// variable whose domain shrank. Returns false on a domain wipeout.
    fn revise(
        &self,
        ci: usize,
        doms: &mut Domains,
        queue: &mut VecDeque<u32>,
        queued: &mut [bool],
    ) -> bool {
        let c = &self.csp.constraints[ci];
        let k = c.scope.len();
        let words = doms.words;
        let mut support = vec![0u64; k * words];
        'tuples: for t in c.allowed.iter() {
            for p in 0..k {
                if !doms.has(c.scope[p], t[p]) {
                    continue 'tuples;
                }
                let rp = self.rep_pos[ci][p];
                if rp != p && t[rp] != t[p] {
                    continue 'tuples;
                }
            }
            for p in 0..k {
                support[p * words + t[p] / 64] |= 1 << (t[p] % 64);
            }
        }
        for p in 0..k {
            if self.rep_pos[ci][p] != p {
                continue;
            }
            let v = c.scope[p];
            if doms.intersect(v, &support[p * words..(p + 1) * words]) {
                if doms.count(v) == 0 {
                    return false;
                }
                for &nc in &self.var_cons[v] {
                    if !queued[nc as usize] {
                        queued[nc as usize] = true;
                        queue.push_back(nc);
                    }
                }
            }
        }
        true
    }

    /// Run revisions to a fixpoint starting from the given seed constraints.
    fn propagate(&mut self, doms: &mut Domains, seed: &[u32]) -> Result<bool> {
        let mut queued = vec![false; self.csp.constraints.len()];
        let mut queue: VecDeque<u32> = VecDeque::new();
        for &ci in seed {
            if !queued[ci as usize] {
                queued[ci as usize] = true;
                queue.push_back(ci);
            }
        }
        while let Some(ci) = queue.pop_front() {
            queued[ci as usize] = false;
            self.tick()?;
            if !self.revise(ci as usize, doms, &mut queue, &mut queued) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn propagate_all(&mut self, doms: &mut Domains) -> Result<bool> {
        let all: Vec<u32> = (0..self.csp.constraints.len() as u32).collect();
        self.propagate(doms, &all)
    }

    fn solution(&self, doms: &Domains) -> Vec<usize> {
        (0..self.csp.num_vars).map(|v| doms.first(v)).collect()
    }

    fn find(&mut self, doms: &Domains) -> Result<Option<Vec<usize>>> {
        self.tick()?;
        let mut best: Option<(u32, usize)> = None;
        for v in 0..self.csp.num_vars {
            let c = doms.count(v);
            if c > 1 && best.map_or(true, |(bc, _)| c < bc) {
                best = Some((c, v));
            }
        }
        let Some((_, var)) = best else {
            return Ok(Some(self.solution(doms)));
        };
        for val in doms.values(var) {
            let mut next = doms.clone();
            next.assign(var, val);
            if self.propagate(&mut next, &self.var_cons[var].clone())? {
                if let Some(sol) = self.find(&next)? {
                    return Ok(Some(sol));
                }
            }
        }
        Ok(None)
    }

    fn enumerate(
        &mut self,
        doms: &Domains,
        var: usize,
        limit: Option<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<bool> {
        self.tick()?;
        if limit.is_some_and(|l| out.len() >= l) {
            return Ok(true);
        }
        if var == self.csp.num_vars {
            out.push(self.solution(doms));
            return Ok(limit.is_some_and(|l| out.len() >= l));
        }
        if doms.count(var) == 1 {
            return self.enumerate(doms, var + 1, limit, out);
        }
        for val in doms.values(var) {
            let mut next = doms.clone();
            next.assign(var, val);
            if !self.propagate(&mut next, &self.var_cons[var].clone())? {
                continue;
            }
            if self.enumerate(&next, var + 1, limit, out)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

impl Csp {
    /// First solution in the engine's deterministic order, or None when the
    /// search space is exhausted.
    pub fn solve_first(&self, deadline: Deadline) -> Result<Option<Vec<usize>>> {
        deadline.check()?;
        if self.num_vars == 0 {
            for c in &self.constraints {
                if c.allowed.is_empty() && c.scope.is_empty() {
                    return Ok(None);
                }
            }
            return Ok(Some(Vec::new()));
        }
        if self.num_values == 0 {
            return Ok(None);
        }
        let mut doms = Domains::full(self.num_vars, self.num_values);
        let mut eng = Engine::new(self, deadline);
        if !eng.propagate_all(&mut doms)? {
            return Ok(None);
        }
        eng.find(&doms)
    }

    /// All solutions (up to `limit`) in lexicographic order of the value vector.
    pub fn enumerate(&self, limit: Option<usize>, deadline: Deadline) -> Result<Vec<Vec<usize>>> {
        deadline.check()?;
        if limit == Some(0) {
            return Ok(Vec::new());
        }
        if self.num_vars == 0 {
            for c in &self.constraints {
                if c.allowed.is_empty() && c.scope.is_empty() {
                    return Ok(Vec::new());
                }
            }
            return Ok(vec![Vec::new()]);
        }
        if self.num_values == 0 {
            return Ok(Vec::new());
        }
        let mut doms = Domains::full(self.num_vars, self.num_values);
        let mut eng = Engine::new(self, deadline);
        let mut out = Vec::new();
        if !eng.propagate_all(&mut doms)? {
            return Ok(out);
        }
        eng.enumerate(&doms, 0, limit, &mut out)?;
        Ok(out)
    }
}
