//! Finite functions `A^k -> B` as flat tables, minors of such functions, and
//! the polymorphisms of a template.
//!
//! A table row index is the row-major encoding of the input tuple (coordinate
//! 0 most significant), the same encoding used for power-structure domains.
//! That identification is what lets a homomorphism `A^k -> B` be read off
//! directly as a function table and vice versa.

use crate::caps::{checked_pow, Caps, Deadline};
use crate::enc::{encode, mixed_radix};
use crate::error::{Error, Result};
use crate::structure::{enumerate_homomorphisms, power, Template};
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunctionTable {
    pub arity: usize,
    pub in_size: usize,
    pub out_size: usize,
    /// Output value per row-major input index; length `in_size^arity`.
    pub table: Vec<usize>,
}

impl FunctionTable {
    pub fn new(arity: usize, in_size: usize, out_size: usize, table: Vec<usize>) -> Result<Self> {
        let f = FunctionTable {
            arity,
            in_size,
            out_size,
            table,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let expect = checked_pow(self.in_size, self.arity, usize::MAX, "table length")?;
        if self.table.len() != expect {
            return Err(Error::ArityMismatch(format!(
                "table has {} rows, arity {} over {} values needs {}",
                self.table.len(),
                self.arity,
                self.in_size,
                expect
            )));
        }
        if let Some(&bad) = self.table.iter().find(|&&v| v >= self.out_size) {
            return Err(Error::DomainMismatch(format!(
                "table value {} >= output domain {}",
                bad, self.out_size
            )));
        }
        Ok(())
    }

    pub fn apply(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        self.table[encode(args, self.in_size)]
    }

    /// The i-th projection of the given arity.
    pub fn projection(arity: usize, i: usize, size: usize) -> Result<Self> {
        if i >= arity {
            return Err(Error::BadParam(format!(
                "projection index {i} out of arity {arity}"
            )));
        }
        let len = checked_pow(size, arity, usize::MAX, "table length")?;
        let mut table = Vec::with_capacity(len);
        for t in mixed_radix(&vec![size; arity]) {
            table.push(t[i]);
        }
        FunctionTable::new(arity, size, size, table)
    }
}

/// A map of input positions: entry `i` says which variable of the target
/// arity feeds position `i` of the source function.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MinorMap {
    pub source_arity: usize,
    pub target_arity: usize,
    map: Vec<usize>,
}

impl MinorMap {
    pub fn new(source_arity: usize, target_arity: usize, map: Vec<usize>) -> Result<Self> {
        if map.len() != source_arity {
            return Err(Error::ArityMismatch(format!(
                "minor map has {} entries for source arity {}",
                map.len(),
                source_arity
            )));
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= target_arity) {
            return Err(Error::BadParam(format!(
                "minor map entry {} >= target arity {}",
                bad, target_arity
            )));
        }
        Ok(MinorMap {
            source_arity,
            target_arity,
            map,
        })
    }

    pub fn identity(arity: usize) -> Self {
        MinorMap {
            source_arity: arity,
            target_arity: arity,
            map: (0..arity).collect(),
        }
    }

    pub fn entries(&self) -> &[usize] {
        &self.map
    }

    /// Composite map so that taking the minor along `self` and then along
    /// `next` equals taking one minor along the result.
    pub fn then(&self, next: &MinorMap) -> Result<MinorMap> {
        if self.target_arity != next.source_arity {
            return Err(Error::ArityMismatch(format!(
                "cannot chain a map into arity {} with one out of arity {}",
                self.target_arity, next.source_arity
            )));
        }
        MinorMap::new(
            self.source_arity,
            next.target_arity,
            self.map.iter().map(|&i| next.map[i]).collect(),
        )
    }
}

/// The minor of `f` along `m`: the target-arity function whose value on
/// `x` is `f(x[m(0)], ..., x[m(arity-1)])`.
pub fn minor_apply(f: &FunctionTable, m: &MinorMap, caps: &Caps) -> Result<FunctionTable> {
    if f.arity != m.source_arity {
        return Err(Error::ArityMismatch(format!(
            "function arity {} but map source arity {}",
            f.arity, m.source_arity
        )));
    }
    let len = checked_pow(f.in_size, m.target_arity, caps.cell_cap, "minor table")?;
    let mut table = Vec::with_capacity(len);
    let mut args = vec![0usize; f.arity];
    for x in mixed_radix(&vec![f.in_size; m.target_arity]) {
        for (i, &v) in m.entries().iter().enumerate() {
            args[i] = x[v];
        }
        table.push(f.apply(&args));
    }
    FunctionTable::new(m.target_arity, f.in_size, f.out_size, table)
}

/// Is `f` compatible with every relation of the template? Checked by running
/// over all ways to pick `arity` tuples of each relation of side `a`.
pub fn is_polymorphism(
    f: &FunctionTable,
    template: &Template,
    caps: &Caps,
    deadline: Deadline,
) -> Result<bool> {
    if f.in_size != template.a.domain_size() || f.out_size != template.b.domain_size() {
        return Err(Error::DomainMismatch(format!(
            "table is {} -> {}, template is {} -> {}",
            f.in_size,
            f.out_size,
            template.a.domain_size(),
            template.b.domain_size()
        )));
    }
    let mut ticks = 0u32;
    for (idx, sym) in template.a.signature().symbols().iter().enumerate() {
        let src = template.a.relation(idx);
        let tgt = template.b.relation(idx);
        if src.is_empty() {
            continue;
        }
        checked_pow(src.len(), f.arity, caps.cell_cap, "compatibility checks")?;
        let mut args = vec![0usize; f.arity];
        for choice in mixed_radix(&vec![src.len(); f.arity]) {
            ticks = ticks.wrapping_add(1);
            if ticks % 1024 == 0 {
                deadline.check()?;
            }
            let mut image = Vec::with_capacity(sym.arity);
            for i in 0..sym.arity {
                for (j, &c) in choice.iter().enumerate() {
                    args[j] = src[c][i];
                }
                image.push(f.apply(&args));
            }
            if tgt.binary_search(&image).is_err() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All polymorphisms of the given arity in lexicographic order of the table
/// vector. A polymorphism of arity k is exactly a homomorphism from the k-th
/// power of side `a` to side `b`, and under row-major indexing the
/// homomorphism's value vector is the function table itself.
pub fn enumerate_polymorphisms(
    template: &Template,
    arity: usize,
    limit: Option<usize>,
    caps: &Caps,
    deadline: Deadline,
) -> Result<Vec<FunctionTable>> {
    caps.check_arity("polymorphism arity", arity)?;
    let p = power(&template.a, arity, caps)?;
    let homs = enumerate_homomorphisms(&p, &template.b, limit, deadline)?;
    homs.into_iter()
        .map(|h| {
            FunctionTable::new(
                arity,
                template.a.domain_size(),
                template.b.domain_size(),
                h.map().to_vec(),
            )
        })
        .collect()
}

struct ArityLevel {
    tables: Rc<Vec<FunctionTable>>,
}

/// The polymorphisms of one template, enumerated per arity on demand and
/// cached. Positions within a level follow the lexicographic table order.
pub struct MinionSlice {
    template: Template,
    caps: Caps,
    levels: RefCell<HashMap<usize, ArityLevel>>,
}

impl MinionSlice {
    pub fn new(template: Template, caps: Caps) -> Self {
        MinionSlice {
            template,
            caps,
            levels: RefCell::new(HashMap::new()),
        }
    }

    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub fn tables(&self, arity: usize, deadline: Deadline) -> Result<Rc<Vec<FunctionTable>>> {
        if let Some(level) = self.levels.borrow().get(&arity) {
            return Ok(Rc::clone(&level.tables));
        }
        let tables = Rc::new(enumerate_polymorphisms(
            &self.template,
            arity,
            None,
            &self.caps,
            deadline,
        )?);
        self.levels.borrow_mut().insert(
            arity,
            ArityLevel {
                tables: Rc::clone(&tables),
            },
        );
        Ok(tables)
    }

    /// Position of `f` within its arity level, or `None` if `f` is not a
    /// polymorphism of the template.
    pub fn index_of(&self, f: &FunctionTable, deadline: Deadline) -> Result<Option<usize>> {
        let tables = self.tables(f.arity, deadline)?;
        Ok(tables.binary_search(f).ok())
    }
}
