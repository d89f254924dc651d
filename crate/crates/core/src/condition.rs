//! Minor conditions: finite systems of identities `f_sigma = g_tau` between
//! minors of abstract function symbols, and their satisfaction by the
//! polymorphisms of a template.

use crate::caps::{checked_pow, Caps, Deadline};
use crate::enc::{encode, mixed_radix};
use crate::error::{Error, Result};
use crate::minion::FunctionTable;
use crate::solver::{Constraint, Csp};
use crate::structure::Template;
use crate::unionfind::UnionFind;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionSymbol {
    pub name: String,
    pub arity: usize,
}

/// One side of an identity: a symbol applied to variables, so that position
/// `i` of the symbol reads variable `map[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentitySide {
    pub symbol: String,
    pub map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub lhs: IdentitySide,
    pub rhs: IdentitySide,
}

/// A set of identities between minors of the listed symbols, all over the
/// same `vars` abstract variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorCondition {
    pub symbols: Vec<ConditionSymbol>,
    pub vars: usize,
    pub identities: Vec<Identity>,
}

impl MinorCondition {
    pub fn validate(&self) -> Result<()> {
        let mut arity_of = HashMap::new();
        for s in &self.symbols {
            if arity_of.insert(s.name.as_str(), s.arity).is_some() {
                return Err(Error::BadParam(format!(
                    "condition declares symbol `{}` twice",
                    s.name
                )));
            }
        }
        for id in &self.identities {
            for side in [&id.lhs, &id.rhs] {
                let arity = *arity_of
                    .get(side.symbol.as_str())
                    .ok_or_else(|| Error::UnknownName(side.symbol.clone()))?;
                if side.map.len() != arity {
                    return Err(Error::ArityMismatch(format!(
                        "identity applies `{}` (arity {}) to {} variables",
                        side.symbol,
                        arity,
                        side.map.len()
                    )));
                }
                if let Some(&bad) = side.map.iter().find(|&&v| v >= self.vars) {
                    return Err(Error::BadParam(format!(
                        "identity uses variable {} but the condition has {}",
                        bad, self.vars
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn arity_of(&self, symbol: &str) -> Option<usize> {
        self.symbols
            .iter()
            .find(|s| s.name == symbol)
            .map(|s| s.arity)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedCondition {
    Cyclic(usize),
    AreaRare,
    Siggers,
    Olsak,
}

/// The built-in conditions. Each uses a single symbol named `f`.
pub fn named_condition(which: NamedCondition) -> Result<MinorCondition> {
    let one = |arity: usize, vars: usize, ids: Vec<(Vec<usize>, Vec<usize>)>| MinorCondition {
        symbols: vec![ConditionSymbol {
            name: "f".to_string(),
            arity,
        }],
        vars,
        identities: ids
            .into_iter()
            .map(|(lhs, rhs)| Identity {
                lhs: IdentitySide {
                    symbol: "f".to_string(),
                    map: lhs,
                },
                rhs: IdentitySide {
                    symbol: "f".to_string(),
                    map: rhs,
                },
            })
            .collect(),
    };
    match which {
        NamedCondition::Cyclic(k) => {
            if k < 2 {
                return Err(Error::BadParam(format!("cyclic arity {k} < 2")));
            }
            let lhs: Vec<usize> = (0..k).collect();
            let rhs: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
            Ok(one(k, k, vec![(lhs, rhs)]))
        }
        // f(a,r,e,a) = f(r,a,r,e) over variables a=0, r=1, e=2.
        NamedCondition::AreaRare => Ok(one(4, 3, vec![(vec![0, 1, 2, 0], vec![1, 0, 1, 2])])),
        // f(a,r,a,e,r,e) = f(r,a,e,a,e,r).
        NamedCondition::Siggers => Ok(one(
            6,
            3,
            vec![(vec![0, 1, 0, 2, 1, 2], vec![1, 0, 2, 0, 2, 1])],
        )),
        // f(x,x,y,y,y,x) = f(x,y,x,y,x,y) = f(y,x,x,x,y,y), chained.
        NamedCondition::Olsak => Ok(one(
            6,
            2,
            vec![
                (vec![0, 0, 1, 1, 1, 0], vec![0, 1, 0, 1, 0, 1]),
                (vec![0, 1, 0, 1, 0, 1], vec![1, 0, 0, 0, 1, 1]),
            ],
        )),
    }
}

/// Does a concrete assignment of tables to symbols satisfy every identity?
pub fn witness_satisfies(
    condition: &MinorCondition,
    witness: &BTreeMap<String, FunctionTable>,
) -> Result<bool> {
    condition.validate()?;
    let mut in_size = None;
    for s in &condition.symbols {
        let f = witness
            .get(&s.name)
            .ok_or_else(|| Error::UnknownName(format!("witness lacks `{}`", s.name)))?;
        if f.arity != s.arity {
            return Err(Error::ArityMismatch(format!(
                "witness for `{}` has arity {}, condition declares {}",
                s.name, f.arity, s.arity
            )));
        }
        match in_size {
            None => in_size = Some(f.in_size),
            Some(n) if n != f.in_size => {
                return Err(Error::DomainMismatch(
                    "witness tables disagree on the input domain".to_string(),
                ))
            }
            _ => {}
        }
    }
    let n = match in_size {
        Some(n) => n,
        None => return Ok(true),
    };
    for id in &condition.identities {
        let f = &witness[&id.lhs.symbol];
        let g = &witness[&id.rhs.symbol];
        for x in mixed_radix(&vec![n; condition.vars]) {
            let lhs_args: Vec<usize> = id.lhs.map.iter().map(|&v| x[v]).collect();
            let rhs_args: Vec<usize> = id.rhs.map.iter().map(|&v| x[v]).collect();
            if f.apply(&lhs_args) != g.apply(&rhs_args) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

struct CellSpace {
    /// Offset of each symbol's block of cells.
    offsets: Vec<usize>,
    total: usize,
}

impl CellSpace {
    fn cell(&self, symbol_idx: usize, args: &[usize], in_size: usize) -> usize {
        self.offsets[symbol_idx] + encode(args, in_size)
    }
}

/// Decide whether the polymorphisms of `template` satisfy the condition.
///
/// One search variable is created per cell (symbol, input tuple over side
/// `a`). Identities merge cells that any satisfying assignment must send to
/// the same value; the quotient is then constrained to be compatible with
/// every relation, and the generic engine searches for values in side `b`.
/// `None` is a definitive refutation, not a timeout.
pub fn satisfy_minor_condition(
    template: &Template,
    condition: &MinorCondition,
    caps: &Caps,
    deadline: Deadline,
) -> Result<Option<BTreeMap<String, FunctionTable>>> {
    condition.validate()?;
    let a_size = template.a.domain_size();
    let b_size = template.b.domain_size();
    let mut offsets = Vec::with_capacity(condition.symbols.len());
    let mut total = 0usize;
    for s in &condition.symbols {
        caps.check_arity("condition symbol arity", s.arity)?;
        offsets.push(total);
        let block = checked_pow(a_size, s.arity, caps.cell_cap, "condition cells")?;
        total = total
            .checked_add(block)
            .ok_or(Error::SizeCapExceeded {
                what: "condition cells",
                requested: u128::MAX,
                cap: caps.cell_cap as u128,
            })?;
        caps.check_cells("condition cells", total)?;
    }
    let space = CellSpace { offsets, total };
    let symbol_idx: HashMap<&str, usize> = condition
        .symbols
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.as_str(), i))
        .collect();

    let mut uf = UnionFind::new(space.total);
    for id in &condition.identities {
        let li = symbol_idx[id.lhs.symbol.as_str()];
        let ri = symbol_idx[id.rhs.symbol.as_str()];
        for x in mixed_radix(&vec![a_size; condition.vars]) {
            let lhs_args: Vec<usize> = id.lhs.map.iter().map(|&v| x[v]).collect();
            let rhs_args: Vec<usize> = id.rhs.map.iter().map(|&v| x[v]).collect();
            uf.union(
                space.cell(li, &lhs_args, a_size),
                space.cell(ri, &rhs_args, a_size),
            );
        }
    }
    let (class_of, num_classes) = uf.quotient();

    let mut constraints = Vec::new();
    let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
    let mut ticks = 0u32;
    for (rel_idx, sym) in template.a.signature().symbols().iter().enumerate() {
        let src = template.a.relation(rel_idx);
        if src.is_empty() {
            continue;
        }
        let allowed = Rc::new(template.b.relation(rel_idx).to_vec());
        for (si, s) in condition.symbols.iter().enumerate() {
            checked_pow(src.len(), s.arity, caps.cell_cap, "condition constraints")?;
            let mut args = vec![0usize; s.arity];
            for choice in mixed_radix(&vec![src.len(); s.arity]) {
                ticks = ticks.wrapping_add(1);
                if ticks % 1024 == 0 {
                    deadline.check()?;
                }
                let mut scope = Vec::with_capacity(sym.arity);
                for i in 0..sym.arity {
                    for (j, &c) in choice.iter().enumerate() {
                        args[j] = src[c][i];
                    }
                    scope.push(class_of[space.cell(si, &args, a_size)]);
                }
                if seen.insert((rel_idx, scope.clone())) {
                    constraints.push(Constraint {
                        scope,
                        allowed: Rc::clone(&allowed),
                    });
                }
            }
        }
    }

    let csp = Csp {
        num_vars: num_classes,
        num_values: b_size,
        constraints,
    };
    let solution = match csp.solve_first(deadline)? {
        Some(s) => s,
        None => return Ok(None),
    };

    let mut witness = BTreeMap::new();
    for (si, s) in condition.symbols.iter().enumerate() {
        let len = checked_pow(a_size, s.arity, caps.cell_cap, "condition cells")?;
        let mut table = Vec::with_capacity(len);
        for row in 0..len {
            table.push(solution[class_of[space.offsets[si] + row]]);
        }
        witness.insert(
            s.name.clone(),
            FunctionTable::new(s.arity, a_size, b_size, table)?,
        );
    }
    debug_assert!(witness_satisfies(condition, &witness)?);
    Ok(Some(witness))
}
