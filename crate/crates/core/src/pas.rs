//! Partial assignment systems: tables that attach, to every k-subset of a
//! variable set, a set of candidate assignments on exactly that subset.
//! Variable sets are limited to 64 variables so subsets are bitmasks.

use crate::caps::Deadline;
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// All subsets of `universe` with `size` bits, ascending as integers.
pub fn subsets_of_size(universe: u64, size: usize) -> Vec<u64> {
    let bits: Vec<u64> = (0..64).filter(|&i| universe >> i & 1 == 1).collect();
    let n = bits.len();
    if size > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let mask = idx.iter().fold(0u64, |m, &i| m | 1 << bits[i]);
        out.push(mask);
        // Advance the combination; indices run over ascending bit positions,
        // so masks come out ascending as integers.
        let mut pos = size;
        loop {
            if pos == 0 {
                out.sort_unstable();
                return out;
            }
            pos -= 1;
            if idx[pos] != pos + n - size {
                idx[pos] += 1;
                for p in pos + 1..size {
                    idx[p] = idx[p - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Values of an assignment on `sub`, read out of an assignment on `mask`.
/// Requires `sub` to be a subset of `mask`; values are kept in ascending
/// variable order throughout.
pub fn restrict_values(mask: u64, values: &[usize], sub: u64) -> Vec<usize> {
    debug_assert_eq!(sub & !mask, 0);
    let mut out = Vec::with_capacity(sub.count_ones() as usize);
    let mut vi = 0;
    for i in 0..64 {
        if mask >> i & 1 == 1 {
            if sub >> i & 1 == 1 {
                out.push(values[vi]);
            }
            vi += 1;
        }
    }
    out
}

/// A map defined on the variables in `mask`, with values listed in ascending
/// variable order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartialAssignment {
    pub mask: u64,
    pub values: Vec<usize>,
}

impl PartialAssignment {
    pub fn new(mask: u64, values: Vec<usize>) -> Result<Self> {
        if mask.count_ones() as usize != values.len() {
            return Err(Error::BadInput(format!(
                "{} values for a domain of {} variables",
                values.len(),
                mask.count_ones()
            )));
        }
        Ok(PartialAssignment { mask, values })
    }
}

/// Arity-k table over `num_vars` variables with values below `n`. A subset
/// absent from the table carries the empty assignment set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pas {
    num_vars: usize,
    pub n: usize,
    pub k: usize,
    table: BTreeMap<u64, BTreeSet<Vec<usize>>>,
}

impl Pas {
    pub fn new(num_vars: usize, n: usize, k: usize) -> Result<Self> {
        if num_vars > 64 {
            return Err(Error::BadInput(format!(
                "{num_vars} variables, the limit is 64"
            )));
        }
        Ok(Pas {
            num_vars,
            n,
            k,
            table: BTreeMap::new(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn universe(&self) -> u64 {
        if self.num_vars == 64 {
            u64::MAX
        } else {
            (1u64 << self.num_vars) - 1
        }
    }

    pub fn insert(&mut self, mask: u64, values: Vec<usize>) -> Result<()> {
        if mask & !self.universe() != 0 {
            return Err(Error::BadInput("subset leaves the variable set".to_string()));
        }
        if mask.count_ones() as usize != self.k {
            return Err(Error::BadInput(format!(
                "key has {} variables, arity is {}",
                mask.count_ones(),
                self.k
            )));
        }
        if values.len() != self.k {
            return Err(Error::BadInput(format!(
                "assignment has {} values, arity is {}",
                values.len(),
                self.k
            )));
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= self.n) {
            return Err(Error::BadInput(format!(
                "value {bad} outside domain {}",
                self.n
            )));
        }
        self.table.entry(mask).or_default().insert(values);
        Ok(())
    }

    pub fn remove_key(&mut self, mask: u64) {
        self.table.remove(&mask);
    }

    pub fn assignments(&self, mask: u64) -> Option<&BTreeSet<Vec<usize>>> {
        self.table.get(&mask)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, &BTreeSet<Vec<usize>>)> {
        self.table.iter().map(|(&m, s)| (m, s))
    }

    /// The table holding every restriction of the given total functions to
    /// every k-subset.
    pub fn restrictions_of(
        num_vars: usize,
        n: usize,
        k: usize,
        functions: &[Vec<usize>],
    ) -> Result<Self> {
        let mut pas = Pas::new(num_vars, n, k)?;
        for f in functions {
            if f.len() != num_vars {
                return Err(Error::BadInput(format!(
                    "global function has {} values for {} variables",
                    f.len(),
                    num_vars
                )));
            }
        }
        for mask in subsets_of_size(pas.universe(), k) {
            for f in functions {
                let full = pas.universe();
                pas.insert(mask, restrict_values(full, f, mask))?;
            }
        }
        Ok(pas)
    }

    /// The table holding every assignment on every k-subset.
    pub fn full(num_vars: usize, n: usize, k: usize) -> Result<Self> {
        let mut pas = Pas::new(num_vars, n, k)?;
        for mask in subsets_of_size(pas.universe(), k) {
            for values in crate::enc::mixed_radix(&vec![n; k]) {
                pas.insert(mask, values)?;
            }
        }
        Ok(pas)
    }
}

/// Largest assignment set attached to any subset.
pub fn pas_value(pas: &Pas) -> usize {
    pas.table.values().map(|s| s.len()).max().unwrap_or(0)
}

/// Is `f` an m-solution: does every m-subset extend to a table key whose
/// assignment set contains a match for `f` on that m-subset?
pub fn is_m_solution(f: &[usize], pas: &Pas, m: usize) -> Result<bool> {
    if f.len() != pas.num_vars {
        return Err(Error::BadInput(format!(
            "assignment has {} values for {} variables",
            f.len(),
            pas.num_vars
        )));
    }
    if let Some(&bad) = f.iter().find(|&&v| v >= pas.n) {
        return Err(Error::BadInput(format!(
            "value {bad} outside domain {}",
            pas.n
        )));
    }
    let universe = pas.universe();
    for u in subsets_of_size(universe, m) {
        let want = restrict_values(universe, f, u);
        let ok = pas.table.iter().any(|(&w, gs)| {
            u & !w == 0 && gs.iter().any(|g| restrict_values(w, g, u) == want)
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Deterministic backtracking search for an m-solution, lexicographically
/// least in the value vector. `None` is definitive.
pub fn find_m_solution(pas: &Pas, m: usize, deadline: Deadline) -> Result<Option<Vec<usize>>> {
    deadline.check()?;
    let v = pas.num_vars;
    if pas.n == 0 && v > 0 {
        return Ok(None);
    }
    if m == 0 {
        // Only the empty subset constrains: it needs any nonempty cell.
        if pas.table.values().any(|s| !s.is_empty()) {
            return Ok(Some(vec![0; v]));
        }
        return Ok(None);
    }
    if v < m {
        return Ok(Some(vec![0; v]));
    }
    let universe = pas.universe();
    // Subsets to verify, grouped by their highest variable so each is checked
    // as soon as it is fully assigned.
    let mut by_highest: Vec<Vec<u64>> = vec![Vec::new(); v];
    for u in subsets_of_size(universe, m) {
        let high = 63 - u.leading_zeros() as usize;
        by_highest[high].push(u);
    }
    let mut f = vec![0usize; v];
    fn assign(
        pas: &Pas,
        by_highest: &[Vec<u64>],
        f: &mut Vec<usize>,
        var: usize,
        deadline: Deadline,
        ticks: &mut u32,
    ) -> Result<bool> {
        *ticks = ticks.wrapping_add(1);
        if *ticks % 256 == 0 {
            deadline.check()?;
        }
        if var == pas.num_vars {
            return Ok(true);
        }
        let assigned = if var + 1 == 64 {
            u64::MAX
        } else {
            (1u64 << (var + 1)) - 1
        };
        for val in 0..pas.n {
            f[var] = val;
            let ok = by_highest[var].iter().all(|&u| {
                let want = restrict_values(assigned, &f[..var + 1], u);
                pas.table.iter().any(|(&w, gs)| {
                    u & !w == 0 && gs.iter().any(|g| restrict_values(w, g, u) == want)
                })
            });
            if ok && assign(pas, by_highest, f, var + 1, deadline, ticks)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    let mut ticks = 0u32;
    if assign(pas, &by_highest, &mut f, 0, deadline, &mut ticks)? {
        Ok(Some(f))
    } else {
        Ok(None)
    }
}

/// A list of tables over one variable set with non-increasing arities.
pub struct PasSequence {
    items: Vec<Pas>,
}

impl PasSequence {
    pub fn new(items: Vec<Pas>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::BadInput("empty sequence".to_string()));
        }
        for w in items.windows(2) {
            if w[0].num_vars != w[1].num_vars || w[0].n != w[1].n {
                return Err(Error::BadInput(
                    "sequence members disagree on variables or values".to_string(),
                ));
            }
            if w[0].k < w[1].k {
                return Err(Error::BadInput(
                    "arities must be non-increasing".to_string(),
                ));
            }
        }
        Ok(PasSequence { items })
    }

    pub fn items(&self) -> &[Pas] {
        &self.items
    }
}

fn chain_count(v: usize, arities: &[usize], cap: u64) -> Result<u128> {
    fn binom(n: usize, k: usize) -> u128 {
        if k > n {
            return 0;
        }
        let mut r: u128 = 1;
        for i in 0..k {
            r = r.saturating_mul((n - i) as u128) / (i as u128 + 1);
        }
        r
    }
    let mut total: u128 = binom(v, arities[0]);
    for w in arities.windows(2) {
        total = total.saturating_mul(binom(w[0], w[1]));
    }
    if total > cap as u128 {
        return Err(Error::ChainSpaceCapExceeded {
            chains: total,
            cap: cap as u128,
        });
    }
    Ok(total)
}

/// Does every descending chain of subsets matching the arity profile admit
/// some pair i < j whose assignment sets meet after restriction to the
/// deeper subset?
pub fn is_consistent(seq: &PasSequence, chain_cap: u64) -> Result<bool> {
    let items = seq.items();
    let arities: Vec<usize> = items.iter().map(|p| p.k).collect();
    let v = items[0].num_vars;
    chain_count(v, &arities, chain_cap)?;

    fn descend(items: &[Pas], chain: &mut Vec<u64>, level: usize) -> bool {
        if level == items.len() {
            return chain_has_pair(items, chain);
        }
        let parent = if level == 0 {
            items[0].universe()
        } else {
            chain[level - 1]
        };
        for u in subsets_of_size(parent, items[level].k) {
            chain.push(u);
            let ok = descend(items, chain, level + 1);
            chain.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    fn chain_has_pair(items: &[Pas], chain: &[u64]) -> bool {
        for j in 1..chain.len() {
            let uj = chain[j];
            let deep: &BTreeSet<Vec<usize>> = match items[j].assignments(uj) {
                Some(s) if !s.is_empty() => s,
                _ => continue,
            };
            for i in 0..j {
                let ui = chain[i];
                if let Some(shallow) = items[i].assignments(ui) {
                    if shallow
                        .iter()
                        .any(|g| deep.contains(&restrict_values(ui, g, uj)))
                    {
                        return true;
                    }
                }
            }
        }
        false
    }

    let mut chain = Vec::with_capacity(items.len());
    Ok(descend(items, &mut chain, 0))
}

fn check_partial(f: &PartialAssignment, pas: &Pas) -> Result<()> {
    if f.mask & !pas.universe() != 0 {
        return Err(Error::BadInput(
            "assignment domain leaves the variable set".to_string(),
        ));
    }
    if f.mask.count_ones() as usize != f.values.len() {
        return Err(Error::BadInput("assignment is not total".to_string()));
    }
    if f.mask.count_ones() as usize > pas.k {
        return Err(Error::BadInput(format!(
            "assignment domain larger than arity {}",
            pas.k
        )));
    }
    if let Some(&bad) = f.values.iter().find(|&&v| v >= pas.n) {
        return Err(Error::BadInput(format!(
            "value {bad} outside domain {}",
            pas.n
        )));
    }
    Ok(())
}

/// Does every l-subset W admit a table key covering dom(f) and W whose set
/// contains an extension of f?
pub fn is_obstacle(f: &PartialAssignment, pas: &Pas, l: usize) -> Result<bool> {
    check_partial(f, pas)?;
    for w in subsets_of_size(pas.universe(), l) {
        let need = f.mask | w;
        let ok = pas.table.iter().any(|(&u, gs)| {
            need & !u == 0 && gs.iter().any(|g| restrict_values(u, g, f.mask) == f.values)
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Does some l-subset W make every k-superset of dom(f) and W contain an
/// extension of f? Vacuously true for a W with no qualifying superset.
pub fn is_admissible(f: &PartialAssignment, pas: &Pas, l: usize) -> Result<bool> {
    check_partial(f, pas)?;
    for w in subsets_of_size(pas.universe(), l) {
        let need = f.mask | w;
        let rest = pas.universe() & !need;
        let missing = pas.k as isize - need.count_ones() as isize;
        if missing < 0 {
            return Ok(true);
        }
        let ok = subsets_of_size(rest, missing as usize).iter().all(|&extra| {
            let u = need | extra;
            pas.assignments(u)
                .map(|gs| gs.iter().any(|g| restrict_values(u, g, f.mask) == f.values))
                .unwrap_or(false)
        });
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Is `j` a refinement of `i`: lower or equal arity, and every subset's set
/// in `j` realized exactly as the restriction of some superset's set in `i`?
pub fn is_refinement(j: &Pas, i: &Pas) -> Result<bool> {
    if j.num_vars != i.num_vars || j.n != i.n {
        return Err(Error::BadInput(
            "tables disagree on variables or values".to_string(),
        ));
    }
    if j.k > i.k {
        return Ok(false);
    }
    let universe = j.universe();
    let empty = BTreeSet::new();
    for u in subsets_of_size(universe, j.k) {
        let ju = j.assignments(u).unwrap_or(&empty);
        let rest = universe & !u;
        let found = subsets_of_size(rest, i.k - j.k).iter().any(|&extra| {
            let big = u | extra;
            let restricted: BTreeSet<Vec<usize>> = i
                .assignments(big)
                .unwrap_or(&empty)
                .iter()
                .map(|g| restrict_values(big, g, u))
                .collect();
            &restricted == ju
        });
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}
