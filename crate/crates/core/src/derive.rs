//! Explicit derivations between the built-in conditions: a cyclic table of
//! any arity yields a 4-ary table for the `f(a,r,e,a) = f(r,a,r,e)` identity,
//! and such a table yields 6-ary tables for the Siggers and the Olsak
//! identities. Every output is re-verified against its target identity on
//! all inputs before it is returned.

use crate::caps::Caps;
use crate::condition::{named_condition, witness_satisfies, MinorCondition, NamedCondition};
use crate::error::{Error, Result};
use crate::minion::{minor_apply, FunctionTable, MinorMap};
use std::collections::BTreeMap;

fn satisfies(f: &FunctionTable, condition: &MinorCondition) -> Result<bool> {
    let mut w = BTreeMap::new();
    w.insert("f".to_string(), f.clone());
    witness_satisfies(condition, &w)
}

/// Is `f` invariant under rotating its arguments by one position?
pub fn is_cyclic_table(f: &FunctionTable) -> Result<bool> {
    if f.arity < 2 {
        return Err(Error::BadArity(format!(
            "cyclicity needs arity >= 2, got {}",
            f.arity
        )));
    }
    satisfies(f, &named_condition(NamedCondition::Cyclic(f.arity))?)
}

pub fn satisfies_area_rare(f: &FunctionTable) -> Result<bool> {
    if f.arity != 4 {
        return Err(Error::BadArity(format!(
            "the identity is 4-ary, got arity {}",
            f.arity
        )));
    }
    satisfies(f, &named_condition(NamedCondition::AreaRare)?)
}

/// Position map sending a cyclic table of arity 3k+r to a 4-ary table over
/// the variables x=0, y=1, z=2, w=3. Correctness rests on rotation
/// invariance only, split by the residue r.
fn cyclic_to_area_rare_map(arity: usize) -> Result<MinorMap> {
    let k = arity / 3;
    let r = arity % 3;
    let mut map = Vec::with_capacity(arity);
    match r {
        0 => {
            map.extend(std::iter::repeat(1).take(k));
            map.extend(std::iter::repeat(2).take(k));
            map.extend(std::iter::repeat(3).take(k));
        }
        1 => {
            map.extend(std::iter::repeat(1).take(k + 1));
            map.extend(std::iter::repeat(3).take(k - 1));
            map.extend([0, 0]);
            map.extend(std::iter::repeat(2).take(k - 1));
        }
        _ => {
            map.extend(std::iter::repeat(1).take(k + 1));
            map.extend(std::iter::repeat(3).take(k));
            map.push(0);
            map.extend(std::iter::repeat(2).take(k));
        }
    }
    MinorMap::new(arity, 4, map)
}

/// From a cyclic table of any arity >= 2, the 4-ary minor that satisfies
/// `g(a,r,e,a) = g(r,a,r,e)`.
pub fn derive_from_cyclic(f: &FunctionTable, caps: &Caps) -> Result<FunctionTable> {
    if f.arity < 2 {
        return Err(Error::BadArity(format!(
            "derivation needs arity >= 2, got {}",
            f.arity
        )));
    }
    if !is_cyclic_table(f)? {
        return Err(Error::NotCyclic(
            "input table is not rotation invariant".to_string(),
        ));
    }
    let g = minor_apply(f, &cyclic_to_area_rare_map(f.arity)?, caps)?;
    if !satisfies_area_rare(&g)? {
        return Err(Error::NotAreaRare(
            "derived table failed the identity recheck".to_string(),
        ));
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RareTarget {
    Siggers,
    Olsak,
}

/// From a 4-ary table satisfying `f(a,r,e,a) = f(r,a,r,e)`, a 6-ary minor
/// satisfying the Siggers identity or both Olsak identities. Over the
/// variables (x,y,z,u,v,w) = (0..6) the Siggers table is f(x,y,w,z) and the
/// Olsak table is f(v,y,x,z).
pub fn derive_from_area_rare(
    f: &FunctionTable,
    target: RareTarget,
    caps: &Caps,
) -> Result<FunctionTable> {
    if f.arity != 4 {
        return Err(Error::BadArity(format!(
            "derivation needs arity 4, got {}",
            f.arity
        )));
    }
    if !satisfies_area_rare(f)? {
        return Err(Error::NotAreaRare(
            "input table fails the identity".to_string(),
        ));
    }
    let (map, check) = match target {
        RareTarget::Siggers => (vec![0, 1, 5, 2], NamedCondition::Siggers),
        RareTarget::Olsak => (vec![4, 1, 0, 2], NamedCondition::Olsak),
    };
    let g = minor_apply(f, &MinorMap::new(4, 6, map)?, caps)?;
    if !satisfies(&g, &named_condition(check)?)? {
        return Err(Error::BadParam(
            "derived table failed the identity recheck".to_string(),
        ));
    }
    Ok(g)
}
