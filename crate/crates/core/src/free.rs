//! The structure freely generated from a polymorphism minion by a finite
//! generator: elements are the minion members whose arity is the generator's
//! domain size, and each relation is populated by one member per tuple
//! enumeration of the generator relation.

use crate::caps::Deadline;
use crate::error::{Error, Result};
use crate::minion::{minor_apply, FunctionTable, MinionSlice, MinorMap};
use crate::structure::{RelationalStructure, Template};
use std::rc::Rc;

/// The built structure together with the tables its elements stand for.
/// Element `i` of the structure is `elements[i]`; the order is the
/// lexicographic table order of the minion level.
pub struct FreeStructure {
    pub structure: RelationalStructure,
    pub elements: Rc<Vec<FunctionTable>>,
}

/// Build the free structure of the minion slice generated by `generator`.
///
/// For a symbol R of arity k with generator tuples r_0 < ... < r_{m-1}, a
/// minion member g of arity m contributes the tuple (g_{p_0},...,g_{p_{k-1}})
/// where map p_i sends j to r_j(i). A relation with no generator tuples is
/// empty in the result.
pub fn free_structure(
    slice: &MinionSlice,
    generator: &RelationalStructure,
    deadline: Deadline,
) -> Result<FreeStructure> {
    let n = generator.domain_size();
    let elements = slice.tables(n, deadline)?;
    let mut extensions = Vec::with_capacity(generator.signature().len());
    for (idx, sym) in generator.signature().symbols().iter().enumerate() {
        let tuples = generator.relation(idx);
        let m = tuples.len();
        if m == 0 {
            extensions.push(Vec::new());
            continue;
        }
        let maps: Vec<MinorMap> = (0..sym.arity)
            .map(|i| MinorMap::new(m, n, tuples.iter().map(|r| r[i]).collect()))
            .collect::<Result<_>>()?;
        let generators = slice.tables(m, deadline)?;
        let mut ext = Vec::with_capacity(generators.len());
        for g in generators.iter() {
            let mut t = Vec::with_capacity(sym.arity);
            for p in &maps {
                let member = minor_apply(g, p, slice.caps())?;
                let pos = slice
                    .index_of(&member, deadline)?
                    .ok_or_else(|| {
                        Error::DomainMismatch(
                            "minor of a minion member left the minion".to_string(),
                        )
                    })?;
                t.push(pos);
            }
            ext.push(t);
        }
        extensions.push(ext);
    }
    let structure =
        RelationalStructure::new(elements.len(), generator.signature().clone(), extensions)?;
    Ok(FreeStructure {
        structure,
        elements,
    })
}

/// The slice of all projections, realized as the polymorphisms of the
/// triangle with each vertex pinned by its own unary mark.
pub fn projection_slice(caps: crate::caps::Caps) -> Result<MinionSlice> {
    let s = crate::structure::named_structure("k3_star", None)?;
    Ok(MinionSlice::new(Template::new(s.clone(), s)?, caps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::structure::{find_isomorphism, named_structure, Signature};

    #[test]
    fn pinned_triangle_has_only_projections() {
        let slice = projection_slice(Caps::default()).unwrap();
        let d = Deadline::none();
        assert_eq!(slice.tables(1, d).unwrap().len(), 1);
        assert_eq!(slice.tables(2, d).unwrap().len(), 2);
        assert_eq!(slice.tables(3, d).unwrap().len(), 3);
        for (i, t) in slice.tables(2, d).unwrap().iter().enumerate() {
            assert_eq!(t, &FunctionTable::projection(2, i, 3).unwrap());
        }
    }

    #[test]
    fn projection_slice_regenerates_the_edge() {
        let slice = projection_slice(Caps::default()).unwrap();
        let k2 = named_structure("k", Some(2)).unwrap();
        let f = free_structure(&slice, &k2, Deadline::none()).unwrap();
        assert_eq!(f.structure.domain_size(), 2);
        assert_eq!(f.structure.relation(0), &[vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn projection_slice_regenerates_small_generators_up_to_iso() {
        let slice = projection_slice(Caps::default()).unwrap();
        let d = Deadline::none();
        for s in [
            named_structure("k", Some(3)).unwrap(),
            named_structure("c", Some(3)).unwrap(),
            named_structure("one_in_three", None).unwrap(),
        ] {
            let f = free_structure(&slice, &s, d).unwrap();
            assert!(
                find_isomorphism(&f.structure, &s, d).unwrap().is_some(),
                "free structure of projections should reproduce its generator"
            );
        }
    }

    #[test]
    fn empty_generator_relation_gives_empty_free_relation() {
        let slice = projection_slice(Caps::default()).unwrap();
        let s = RelationalStructure::new(2, Signature::of(&[("E", 2)]), vec![vec![]]).unwrap();
        let f = free_structure(&slice, &s, Deadline::none()).unwrap();
        assert_eq!(f.structure.domain_size(), 2);
        assert!(f.structure.relation(0).is_empty());
    }

    #[test]
    fn richer_minions_grow_the_domain() {
        let k2 = named_structure("k", Some(2)).unwrap();
        let slice = MinionSlice::new(
            Template::new(k2.clone(), k2.clone()).unwrap(),
            Caps::default(),
        );
        let f = free_structure(&slice, &k2, Deadline::none()).unwrap();
        // All four binary self-dual tables are elements here.
        assert_eq!(f.structure.domain_size(), 4);
        assert_eq!(f.elements.len(), 4);
        assert_eq!(f.structure.relation(0).len(), 4);
    }
}
