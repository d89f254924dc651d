//! The structure on nonempty subsets of a domain, in two variants, and the
//! arc-consistency style check it supports: a template passes when the
//! subset structure of side `a` maps homomorphically to side `b`.

use crate::caps::{checked_pow, Caps, Deadline};
use crate::error::{Error, Result};
use crate::structure::{find_homomorphism, Homomorphism, RelationalStructure, Template};

/// Which clause admits a tuple of subsets into a lifted relation.
///
/// `Standard`: every element of every coordinate extends to a full witness
/// tuple threading the other coordinates.
/// `Literal`: any choice of elements can be repaired in any single
/// coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerSemantics {
    Standard,
    Literal,
}

fn subset_elems(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

fn standard_admits(sets: &[Vec<usize>], rel: &[Vec<usize>]) -> bool {
    for (i, s) in sets.iter().enumerate() {
        for &a in s {
            let found = rel.iter().any(|t| {
                t[i] == a
                    && t.iter()
                        .zip(sets.iter())
                        .all(|(&e, s)| s.binary_search(&e).is_ok())
            });
            if !found {
                return false;
            }
        }
    }
    true
}

fn literal_admits(sets: &[Vec<usize>], rel: &[Vec<usize>]) -> bool {
    let k = sets.len();
    let mut pick = vec![0usize; k];
    loop {
        let tuple: Vec<usize> = pick.iter().zip(sets.iter()).map(|(&p, s)| s[p]).collect();
        for j in 0..k {
            let mut repaired = tuple.clone();
            let ok = sets[j].iter().any(|&b| {
                repaired[j] = b;
                rel.binary_search(&repaired).is_ok()
            });
            if !ok {
                return false;
            }
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < sets[pos].len() {
                break;
            }
            pick[pos] = 0;
        }
    }
}

/// Structure on the nonempty subsets of the domain of `s`. Subsets are
/// numbered by bitmask, so element `d` is the subset with mask `d + 1`.
pub fn power_structure(
    s: &RelationalStructure,
    semantics: PowerSemantics,
    caps: &Caps,
) -> Result<RelationalStructure> {
    let n = s.domain_size();
    if n == 0 {
        return Err(Error::BadParam(
            "subset structure over the empty domain".to_string(),
        ));
    }
    let full = checked_pow(2, n, caps.size_cap, "subset domain")?;
    let size = full - 1;
    let elems: Vec<Vec<usize>> = (1..=size).map(|mask| subset_elems(mask, n)).collect();
    let mut extensions = Vec::with_capacity(s.signature().len());
    for (idx, sym) in s.signature().symbols().iter().enumerate() {
        let rel = s.relation(idx);
        checked_pow(size, sym.arity, caps.cell_cap, "subset relation checks")?;
        let mut ext = Vec::new();
        let mut tuple = vec![0usize; sym.arity];
        'next: loop {
            let sets: Vec<Vec<usize>> = tuple.iter().map(|&d| elems[d].clone()).collect();
            let admit = match semantics {
                PowerSemantics::Standard => standard_admits(&sets, rel),
                PowerSemantics::Literal => literal_admits(&sets, rel),
            };
            if admit {
                ext.push(tuple.clone());
            }
            let mut pos = sym.arity;
            loop {
                if pos == 0 {
                    break 'next;
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < size {
                    break;
                }
                tuple[pos] = 0;
            }
        }
        extensions.push(ext);
    }
    let labels: Vec<String> = elems
        .iter()
        .map(|e| {
            let names: Vec<String> = e.iter().map(|&i| s.element_name(i)).collect();
            format!("{{{}}}", names.join(","))
        })
        .collect();
    RelationalStructure::new(size, s.signature().clone(), extensions)?.with_labels(labels)
}

/// Search for a homomorphism from the subset structure of side `a` to side
/// `b`. A witness certifies the template is solvable by the one-set-per-
/// variable propagation procedure; `None` is a definitive failure.
pub fn width1_check(
    template: &Template,
    semantics: PowerSemantics,
    caps: &Caps,
    deadline: Deadline,
) -> Result<Option<Homomorphism>> {
    let u = power_structure(&template.a, semantics, caps)?;
    find_homomorphism(&u, &template.b, deadline)
}
