//! Set-valued minion homomorphisms checked on bounded fragments, and the
//! gadget reduction they power: an instance over the target template turns
//! into a structure whose elements are bounded variable subsets and whose
//! relations are graphs of partial functions, so that homomorphisms off the
//! gadget extract a consistent sequence of partial assignment tables.

use crate::caps::{checked_pow, Caps, Deadline};
use crate::enc::{decode, mixed_radix};
use crate::error::{Error, Result};
use crate::minion::{minor_apply, FunctionTable, MinionSlice, MinorMap};
use crate::pas::{subsets_of_size, Pas, PasSequence};
use crate::structure::{
    enumerate_homomorphisms, induced_substructure, Homomorphism, RelationSymbol,
    RelationalStructure, Signature, Template,
};
use std::collections::BTreeMap;

/// A map from a minion into sets of at most `d` functions over another,
/// arity-preserving, such that every length-r chain of minors admits a
/// linked pair of images. Entries absent from the table denote the empty
/// image set.
#[derive(Clone, Debug)]
pub struct WeakMinionHom {
    pub d: usize,
    pub r: usize,
    entries: BTreeMap<FunctionTable, Vec<FunctionTable>>,
}

const NO_IMAGES: [FunctionTable; 0] = [];

impl WeakMinionHom {
    pub fn new(
        d: usize,
        r: usize,
        entries: Vec<(FunctionTable, Vec<FunctionTable>)>,
    ) -> Result<Self> {
        if d < 1 || r < 1 {
            return Err(Error::BadParam("both bounds must be >= 1".to_string()));
        }
        let mut table = BTreeMap::new();
        for (src, mut imgs) in entries {
            src.validate()?;
            for g in &imgs {
                g.validate()?;
            }
            imgs.sort();
            imgs.dedup();
            if table.insert(src, imgs).is_some() {
                return Err(Error::BadInput("duplicate source table".to_string()));
            }
        }
        Ok(WeakMinionHom {
            d,
            r,
            entries: table,
        })
    }

    /// Every table of the slice up to the arity bound mapped to itself.
    pub fn identity(slice: &MinionSlice, arity_bound: usize, deadline: Deadline) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for a in 1..=arity_bound {
            for t in slice.tables(a, deadline)?.iter() {
                entries.insert(t.clone(), vec![t.clone()]);
            }
        }
        Ok(WeakMinionHom { d: 1, r: 1, entries })
    }

    /// Image set, with absence read as empty.
    pub fn images(&self, t: &FunctionTable) -> &[FunctionTable] {
        self.entries.get(t).map_or(NO_IMAGES.as_slice(), |v| v.as_slice())
    }

    /// Image set, with absence kept visible.
    pub fn lookup(&self, t: &FunctionTable) -> Option<&[FunctionTable]> {
        self.entries.get(t).map(|v| v.as_slice())
    }

    pub fn table(&self) -> &BTreeMap<FunctionTable, Vec<FunctionTable>> {
        &self.entries
    }
}

/// Tables t_0..t_r with verified links t_{i+1} = t_i minored by the i-th map.
#[derive(Clone, Debug)]
pub struct ChainOfMinors {
    tables: Vec<FunctionTable>,
    links: Vec<MinorMap>,
}

impl ChainOfMinors {
    pub fn new(tables: Vec<FunctionTable>, links: Vec<MinorMap>, caps: &Caps) -> Result<Self> {
        if tables.len() != links.len() + 1 {
            return Err(Error::BadInput(format!(
                "{} tables need {} links, got {}",
                tables.len(),
                tables.len().saturating_sub(1),
                links.len()
            )));
        }
        for (i, link) in links.iter().enumerate() {
            if minor_apply(&tables[i], link, caps)? != tables[i + 1] {
                return Err(Error::BadInput(format!("link {i} does not reproduce its table")));
            }
        }
        Ok(ChainOfMinors { tables, links })
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn tables(&self) -> &[FunctionTable] {
        &self.tables
    }

    pub fn links(&self) -> &[MinorMap] {
        &self.links
    }

    /// The composed position map from step i to step j.
    pub fn composite(&self, i: usize, j: usize) -> Result<MinorMap> {
        if i > j || j > self.links.len() {
            return Err(Error::BadInput(format!("no composite from {i} to {j}")));
        }
        let mut m = MinorMap::identity(self.tables[i].arity);
        for link in &self.links[i..j] {
            m = m.then(link)?;
        }
        Ok(m)
    }
}

#[derive(Clone, Debug)]
pub enum FragmentVerdict {
    /// Every chain in the fragment admitted a linked image pair. Says
    /// nothing beyond the inspected arities.
    FragmentVerified { chains: u64 },
    ArityViolation(String),
    CardinalityViolation(String),
    ChainViolation { chain: ChainOfMinors },
}

fn chain_space(level_sizes: &[u128], bound: usize, r: usize) -> u128 {
    // W(a, s) = number of ways to extend a table of arity a by s more links.
    let mut w = vec![1u128; bound + 1];
    for _ in 0..r {
        let mut next = vec![0u128; bound + 1];
        for a in 1..=bound {
            let mut total = 0u128;
            for a2 in 1..=bound {
                let maps = (a2 as u128).saturating_pow(a as u32);
                total = total.saturating_add(maps.saturating_mul(w[a2]));
            }
            next[a] = total;
        }
        w = next;
    }
    let mut total = 0u128;
    for a in 1..=bound {
        total = total.saturating_add(level_sizes[a].saturating_mul(w[a]));
    }
    total
}

/// Verify the three defining conditions on the fragment of the slice up to
/// `arity_bound`: arity preservation, the cardinality bound, and the linked
/// pair condition on every chain of r minors whose tables stay within the
/// bound. A pass is relative to the fragment only.
pub fn check_weak_minion_hom(
    xi: &WeakMinionHom,
    slice: &MinionSlice,
    arity_bound: usize,
    deadline: Deadline,
) -> Result<FragmentVerdict> {
    if arity_bound < 1 {
        return Err(Error::BadParam("arity bound must be >= 1".to_string()));
    }
    for (src, imgs) in xi.table() {
        for g in imgs {
            if g.arity != src.arity {
                return Ok(FragmentVerdict::ArityViolation(format!(
                    "source of arity {} has an image of arity {}",
                    src.arity, g.arity
                )));
            }
        }
    }
    for (src, imgs) in xi.table() {
        if imgs.len() > xi.d {
            return Ok(FragmentVerdict::CardinalityViolation(format!(
                "{} images on a source of arity {}, the bound is {}",
                imgs.len(),
                src.arity,
                xi.d
            )));
        }
    }

    let caps = *slice.caps();
    let mut levels = Vec::with_capacity(arity_bound + 1);
    levels.push(std::rc::Rc::new(Vec::new()));
    for a in 1..=arity_bound {
        levels.push(slice.tables(a, deadline)?);
    }
    let sizes: Vec<u128> = levels.iter().map(|l| l.len() as u128).collect();
    let space = chain_space(&sizes, arity_bound, xi.r);
    if space > caps.chain_cap as u128 {
        return Err(Error::FragmentTooLarge(format!(
            "{space} chains exceed the cap {}",
            caps.chain_cap
        )));
    }

    // Depth-first over chains; composites to every earlier step ride along.
    struct Walk<'a> {
        xi: &'a WeakMinionHom,
        caps: &'a Caps,
        bound: usize,
        deadline: Deadline,
        ticks: u64,
        chains: u64,
    }
    impl Walk<'_> {
        fn go(
            &mut self,
            tables: &mut Vec<FunctionTable>,
            links: &mut Vec<MinorMap>,
        ) -> Result<Option<ChainOfMinors>> {
            if links.len() == self.xi.r {
                self.ticks = self.ticks.wrapping_add(1);
                if self.ticks % 256 == 0 {
                    self.deadline.check()?;
                }
                self.chains += 1;
                for i in 0..tables.len() {
                    for j in i + 1..tables.len() {
                        let mut pi = MinorMap::identity(tables[i].arity);
                        for link in &links[i..j] {
                            pi = pi.then(link)?;
                        }
                        for g in self.xi.images(&tables[i]) {
                            let gm = minor_apply(g, &pi, self.caps)?;
                            if self.xi.images(&tables[j]).contains(&gm) {
                                return Ok(None);
                            }
                        }
                    }
                }
                return Ok(Some(ChainOfMinors {
                    tables: tables.clone(),
                    links: links.clone(),
                }));
            }
            let a = tables.last().unwrap().arity;
            for a2 in 1..=self.bound {
                for map in mixed_radix(&vec![a2; a]) {
                    let link = MinorMap::new(a, a2, map)?;
                    let next = minor_apply(tables.last().unwrap(), &link, self.caps)?;
                    tables.push(next);
                    links.push(link);
                    let hit = self.go(tables, links)?;
                    tables.pop();
                    links.pop();
                    if hit.is_some() {
                        return Ok(hit);
                    }
                }
            }
            Ok(None)
        }
    }

    let mut walk = Walk {
        xi,
        caps: &caps,
        bound: arity_bound,
        deadline,
        ticks: 0,
        chains: 0,
    };
    for a in 1..=arity_bound {
        for t in levels[a].iter() {
            let mut tables = vec![t.clone()];
            let mut links = Vec::new();
            if let Some(chain) = walk.go(&mut tables, &mut links)? {
                return Ok(FragmentVerdict::ChainViolation { chain });
            }
        }
    }
    Ok(FragmentVerdict::FragmentVerified {
        chains: walk.chains,
    })
}

/// The reduced instance together with everything the construction fixed:
/// the subset family, the per-subset homomorphism lists and their positions,
/// the emitted inclusion pairs, and the gadget structure the relations refer
/// to. Element u of the reduced instance is `sets()[u]`.
pub struct GadgetBundle {
    template: Template,
    instance: RelationalStructure,
    schedule: Vec<usize>,
    sets: Vec<u64>,
    set_elems: Vec<Vec<usize>>,
    levels: Vec<Vec<usize>>,
    homs: Vec<Vec<Vec<usize>>>,
    pairs: Vec<(usize, usize)>,
    gamma: RelationalStructure,
    gadget: RelationalStructure,
}

impl GadgetBundle {
    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn instance(&self) -> &RelationalStructure {
        &self.instance
    }

    pub fn schedule(&self) -> &[usize] {
        &self.schedule
    }

    /// Subset masks in domain order of the reduced instance.
    pub fn sets(&self) -> &[u64] {
        &self.sets
    }

    /// Ascending elements of subset u.
    pub fn set_elements(&self, u: usize) -> &[usize] {
        &self.set_elems[u]
    }

    /// Per level, the indices of its subsets in `sets()` order.
    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    /// Homomorphisms of the induced substructure on subset u into the first
    /// template side, lexicographic by value vector. Positions in this list
    /// are the numbering the gadget relations speak about.
    pub fn homs_of(&self, u: usize) -> &[Vec<usize>] {
        &self.homs[u]
    }

    /// Every emitted inclusion pair (u, w), the reflexive ones included.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn gamma(&self) -> &RelationalStructure {
        &self.gamma
    }

    pub fn gadget(&self) -> &RelationalStructure {
        &self.gadget
    }

    /// Positions of subset w's elements inside subset u's element list.
    fn restriction_positions(&self, u: usize, w: usize) -> Vec<usize> {
        self.set_elems[w]
            .iter()
            .map(|e| {
                self.set_elems[u]
                    .binary_search(e)
                    .expect("w is a subset of u")
            })
            .collect()
    }

    /// The position map sending each homomorphism on u to its restriction's
    /// position on w.
    pub fn minor_link_map(&self, u: usize, w: usize) -> Result<MinorMap> {
        let pos = self.restriction_positions(u, w);
        let mut map = Vec::with_capacity(self.homs[u].len());
        for f in &self.homs[u] {
            let rest: Vec<usize> = pos.iter().map(|&p| f[p]).collect();
            let wi = self.homs[w]
                .binary_search(&rest)
                .expect("restriction of a homomorphism is a homomorphism");
            map.push(wi);
        }
        MinorMap::new(self.homs[u].len(), self.homs[w].len(), map)
    }
}

fn binom_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r = 1u128;
    for t in 0..k.min(n - k) {
        r = r.saturating_mul((n - t) as u128) / (t + 1) as u128;
    }
    r
}

fn partial_function_name(graph: &BTreeMap<usize, usize>) -> String {
    let body: Vec<String> = graph.iter().map(|(s, t)| format!("{s}>{t}")).collect();
    format!("pf:{}", body.join(","))
}

/// Build the reduced instance for `instance` over the template, with subset
/// sizes given by the schedule. Levels larger than the variable set come out
/// empty; an instance below the head arity therefore reduces to a smaller
/// (possibly empty) structure.
pub fn dr_reduce_instance(
    instance: &RelationalStructure,
    template: &Template,
    schedule: &[usize],
    caps: &Caps,
    deadline: Deadline,
) -> Result<GadgetBundle> {
    if !instance.similar(&template.a) {
        return Err(Error::SignatureMismatch(
            "instance signature differs from the template".to_string(),
        ));
    }
    if schedule.is_empty() {
        return Err(Error::BadInput("empty arity schedule".to_string()));
    }
    if schedule.iter().any(|&k| k < 1) {
        return Err(Error::BadInput("schedule arities must be >= 1".to_string()));
    }
    if schedule.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::BadInput(
            "schedule arities must be non-increasing".to_string(),
        ));
    }
    let v = instance.domain_size();
    if v > 64 {
        return Err(Error::BadInput(format!("{v} variables, the limit is 64")));
    }

    let mut family = 0u128;
    for &k in schedule {
        family = family.saturating_add(binom_u128(v, k));
    }
    if family > caps.size_cap as u128 {
        return Err(Error::SizeCapExceeded {
            what: "subset family",
            requested: family,
            cap: caps.size_cap as u128,
        });
    }
    let s_size = checked_pow(template.a.domain_size(), schedule[0], caps.size_cap, "gadget domain")?;

    let universe = if v == 64 { u64::MAX } else { (1u64 << v) - 1 };
    let mut sets: Vec<u64> = Vec::new();
    let mut index: BTreeMap<u64, usize> = BTreeMap::new();
    let mut levels: Vec<Vec<usize>> = Vec::with_capacity(schedule.len());
    for &k in schedule {
        let mut level = Vec::new();
        for mask in subsets_of_size(universe, k) {
            let next = sets.len();
            let idx = *index.entry(mask).or_insert_with(|| {
                sets.push(mask);
                next
            });
            level.push(idx);
        }
        levels.push(level);
    }

    let mut set_elems = Vec::with_capacity(sets.len());
    let mut homs = Vec::with_capacity(sets.len());
    for &mask in &sets {
        let elems: Vec<usize> = (0..v).filter(|&i| mask >> i & 1 == 1).collect();
        let (sub, _) = induced_substructure(instance, &elems)?;
        let found = enumerate_homomorphisms(&sub, &template.a, None, deadline)?;
        let list: Vec<Vec<usize>> = found.into_iter().map(|h| h.map().to_vec()).collect();
        debug_assert!(list.len() <= s_size.max(1));
        debug_assert!(list.windows(2).all(|w| w[0] < w[1]));
        set_elems.push(elems);
        homs.push(list);
    }

    let mut pairs = Vec::new();
    for u in 0..sets.len() {
        for w in 0..sets.len() {
            if sets[w] & !sets[u] == 0 {
                pairs.push((u, w));
            }
        }
    }

    // One relation per distinct partial function; its tuples in the reduced
    // instance and its graph in the gadget.
    let mut relations: BTreeMap<String, (Vec<Vec<usize>>, Vec<Vec<usize>>)> = BTreeMap::new();
    let mut ticks = 0u64;
    for &(u, w) in &pairs {
        ticks = ticks.wrapping_add(1);
        if ticks % 64 == 0 {
            deadline.check()?;
        }
        let pos = {
            let elems_w = &set_elems[w];
            let elems_u = &set_elems[u];
            elems_w
                .iter()
                .map(|e| elems_u.binary_search(e).expect("w is a subset of u"))
                .collect::<Vec<_>>()
        };
        let mut graph = BTreeMap::new();
        for (fi, f) in homs[u].iter().enumerate() {
            let rest: Vec<usize> = pos.iter().map(|&p| f[p]).collect();
            let wi = homs[w]
                .binary_search(&rest)
                .expect("restriction of a homomorphism is a homomorphism");
            graph.insert(fi, wi);
        }
        let name = partial_function_name(&graph);
        let entry = relations.entry(name).or_insert_with(|| {
            let pairs: Vec<Vec<usize>> = graph.iter().map(|(&s, &t)| vec![s, t]).collect();
            (Vec::new(), pairs)
        });
        entry.0.push(vec![u, w]);
    }

    let symbols: Vec<RelationSymbol> = relations
        .keys()
        .map(|name| RelationSymbol {
            name: name.clone(),
            arity: 2,
        })
        .collect();
    let signature = Signature::new(symbols)?;
    let mut gamma_exts = Vec::with_capacity(relations.len());
    let mut gadget_exts = Vec::with_capacity(relations.len());
    for (_, (tuples, graph)) in relations {
        gamma_exts.push(tuples);
        gadget_exts.push(graph);
    }
    let labels: Vec<String> = set_elems
        .iter()
        .map(|elems| {
            let names: Vec<String> = elems.iter().map(|&e| instance.element_name(e)).collect();
            format!("{{{}}}", names.join(","))
        })
        .collect();
    let gamma =
        RelationalStructure::new(sets.len(), signature.clone(), gamma_exts)?.with_labels(labels)?;
    let gadget = RelationalStructure::new(s_size, signature, gadget_exts)?;

    Ok(GadgetBundle {
        template: template.clone(),
        instance: instance.clone(),
        schedule: schedule.to_vec(),
        sets,
        set_elems,
        levels,
        homs,
        pairs,
        gamma,
        gadget,
    })
}

/// The homomorphism a solution of the instance induces on the reduced
/// instance: each subset goes to the position of the solution's restriction.
pub fn canonical_gadget_hom(h: &[usize], bundle: &GadgetBundle) -> Result<Homomorphism> {
    Homomorphism::checked(h.to_vec(), &bundle.instance, &bundle.template.a)?;
    let mut map = Vec::with_capacity(bundle.sets.len());
    for (u, elems) in bundle.set_elems.iter().enumerate() {
        let restriction: Vec<usize> = elems.iter().map(|&e| h[e]).collect();
        let c = bundle.homs[u]
            .binary_search(&restriction)
            .expect("restriction of a homomorphism is a homomorphism");
        map.push(c);
    }
    Homomorphism::checked(map, &bundle.gamma, &bundle.gadget)
}

/// The a-ary minor that keeps the first a coordinates and routes every
/// later one to coordinate 0.
pub fn restrict_pad(s_u: &FunctionTable, a: usize, caps: &Caps) -> Result<FunctionTable> {
    if a < 1 || a > s_u.arity {
        return Err(Error::BadArity(format!(
            "cannot cut arity {} down to {a}",
            s_u.arity
        )));
    }
    let map: Vec<usize> = (0..s_u.arity).map(|i| if i < a { i } else { 0 }).collect();
    minor_apply(s_u, &MinorMap::new(s_u.arity, a, map)?, caps)
}

/// Compose a homomorphism into the gadget with the projection embedding of
/// the gadget into its free structure: element c becomes e after the c-th
/// projection. `e` is a homomorphism between the slice template's sides.
pub fn compose_with_projections(
    gadget_hom: &Homomorphism,
    e: &Homomorphism,
    caps: &Caps,
) -> Result<Vec<FunctionTable>> {
    let s_size = gadget_hom.target_size();
    let in_size = e.source_size();
    let cells = checked_pow(in_size, s_size, caps.cell_cap, "projection table")?;
    let mut out = Vec::with_capacity(gadget_hom.source_size());
    for x in 0..gadget_hom.source_size() {
        let c = gadget_hom.apply(x);
        let table: Vec<usize> = (0..cells)
            .map(|idx| e.apply(decode(idx, in_size, s_size)[c]))
            .collect();
        out.push(FunctionTable::new(
            s_size,
            in_size,
            e.target_size(),
            table,
        )?);
    }
    Ok(out)
}

/// Extract the per-level assignment tables from a map that sends each subset
/// to a function of the gadget's arity. Every emitted inclusion pair is
/// checked for the minor link on the cut-down tables and for agreement of
/// the extracted value rows; the per-subset rows are the images under the
/// set-valued homomorphism, evaluated coordinatewise on the homomorphism
/// lists.
pub fn extract_pas_sequence(
    s_tables: &[FunctionTable],
    xi: &WeakMinionHom,
    bundle: &GadgetBundle,
    caps: &Caps,
    deadline: Deadline,
) -> Result<PasSequence> {
    if s_tables.len() != bundle.sets.len() {
        return Err(Error::BadInput(format!(
            "{} tables for {} subsets",
            s_tables.len(),
            bundle.sets.len()
        )));
    }
    let s_size = bundle.gadget.domain_size();
    for t in s_tables {
        t.validate()?;
        if t.arity != s_size {
            return Err(Error::BadInput(format!(
                "table arity {} differs from the gadget domain {s_size}",
                t.arity
            )));
        }
    }

    let mut cut = Vec::with_capacity(s_tables.len());
    for (u, s_u) in s_tables.iter().enumerate() {
        let du = bundle.homs[u].len();
        if du == 0 {
            return Err(Error::BadInput(format!(
                "subset {} admits no homomorphisms into the first side",
                bundle.gamma.element_name(u)
            )));
        }
        cut.push(restrict_pad(s_u, du, caps)?);
    }

    let c_size = bundle.template.a.domain_size();
    let d_size = bundle.template.b.domain_size();
    let images_of = |u: usize| -> Result<&[FunctionTable]> {
        xi.lookup(&cut[u]).ok_or_else(|| {
            Error::MissingXiEntry(format!(
                "no entry for the arity-{} table on subset {}",
                cut[u].arity,
                bundle.gamma.element_name(u)
            ))
        })
    };
    let z_row = |u: usize, g: &FunctionTable| -> Result<Vec<usize>> {
        if g.arity != bundle.homs[u].len() || g.in_size != c_size || g.out_size != d_size {
            return Err(Error::BadInput(format!(
                "image table on subset {} has shape {}/{}/{}, expected {}/{}/{}",
                bundle.gamma.element_name(u),
                g.arity,
                g.in_size,
                g.out_size,
                bundle.homs[u].len(),
                c_size,
                d_size
            )));
        }
        let elems = &bundle.set_elems[u];
        let mut row = Vec::with_capacity(elems.len());
        for p in 0..elems.len() {
            let args: Vec<usize> = bundle.homs[u].iter().map(|f| f[p]).collect();
            row.push(g.apply(&args));
        }
        Ok(row)
    };

    let mut ticks = 0u64;
    for &(u, w) in &bundle.pairs {
        ticks = ticks.wrapping_add(1);
        if ticks % 64 == 0 {
            deadline.check()?;
        }
        let pi = bundle.minor_link_map(u, w)?;
        if minor_apply(&cut[u], &pi, caps)? != cut[w] {
            return Err(Error::MinorLinkViolation(format!(
                "tables on {} and {} are not linked",
                bundle.gamma.element_name(u),
                bundle.gamma.element_name(w)
            )));
        }
        let (gs, hs) = (images_of(u)?, images_of(w)?);
        let pos = bundle.restriction_positions(u, w);
        for g in gs {
            let gm = minor_apply(g, &pi, caps)?;
            for h in hs {
                if gm == *h {
                    let row_u = z_row(u, g)?;
                    let row_w = z_row(w, h)?;
                    let restricted: Vec<usize> = pos.iter().map(|&p| row_u[p]).collect();
                    if restricted != row_w {
                        return Err(Error::MinorLinkViolation(format!(
                            "value rows on {} and {} disagree under a linked image pair",
                            bundle.gamma.element_name(u),
                            bundle.gamma.element_name(w)
                        )));
                    }
                }
            }
        }
    }

    let v = bundle.instance.domain_size();
    let mut items = Vec::with_capacity(bundle.levels.len());
    for (i, level) in bundle.levels.iter().enumerate() {
        let mut pas = Pas::new(v, d_size, bundle.schedule[i])?;
        for &u in level {
            for g in images_of(u)? {
                pas.insert(bundle.sets[u], z_row(u, g)?)?;
            }
        }
        items.push(pas);
    }
    PasSequence::new(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pas::{find_m_solution, is_consistent, pas_value};
    use crate::structure::{is_homomorphism, named_structure};

    fn k2_template() -> Template {
        let k2 = named_structure("k", Some(2)).unwrap();
        Template::new(k2.clone(), k2).unwrap()
    }

    fn path_instance(edges: &[(usize, usize)], v: usize) -> RelationalStructure {
        let mut ext = Vec::new();
        for &(a, b) in edges {
            ext.push(vec![a, b]);
            ext.push(vec![b, a]);
        }
        RelationalStructure::new(v, Signature::of(&[("E", 2)]), vec![ext]).unwrap()
    }

    fn k2_slice() -> MinionSlice {
        MinionSlice::new(k2_template(), Caps::default())
    }

    #[test]
    fn bundle_counts_match_on_a_triangle_free_instance() {
        let t = k2_template();
        let inst = path_instance(&[(0, 1), (1, 2)], 3);
        let b = dr_reduce_instance(&inst, &t, &[2, 1], &Caps::default(), Deadline::none()).unwrap();
        assert_eq!(b.sets().len(), 6);
        assert_eq!(b.gadget().domain_size(), 4);
        assert_eq!(b.levels()[0].len(), 3);
        assert_eq!(b.levels()[1].len(), 3);
        assert_eq!(b.pairs().len(), 12);
        // Every relation is the graph of a partial function.
        for idx in 0..b.gadget().signature().len() {
            let graph = b.gadget().relation(idx);
            let mut seen = std::collections::HashSet::new();
            for t in graph {
                assert!(seen.insert(t[0]));
            }
        }
        // Homomorphism lists are lexicographic; the edge {0,1} admits two.
        let u01 = b.sets().iter().position(|&m| m == 0b11).unwrap();
        assert_eq!(b.homs_of(u01), &[vec![0, 1], vec![1, 0]]);
        let u02 = b.sets().iter().position(|&m| m == 0b101).unwrap();
        assert_eq!(b.homs_of(u02).len(), 4);
    }

    #[test]
    fn canonical_hom_verifies_for_both_colorings_of_an_edge() {
        let t = k2_template();
        let inst = path_instance(&[(0, 1)], 2);
        let b = dr_reduce_instance(&inst, &t, &[2, 1], &Caps::default(), Deadline::none()).unwrap();
        assert_eq!(b.sets().len(), 3);
        for h in [[0, 1], [1, 0]] {
            let hom = canonical_gadget_hom(&h, &b).unwrap();
            assert_eq!(hom.source_size(), 3);
        }
        assert!(matches!(
            canonical_gadget_hom(&[0, 0], &b),
            Err(Error::NotAHomomorphism(_))
        ));
    }

    #[test]
    fn empty_instance_reduces_to_the_empty_structure() {
        let t = k2_template();
        let inst =
            RelationalStructure::new(0, Signature::of(&[("E", 2)]), vec![Vec::new()]).unwrap();
        let b = dr_reduce_instance(&inst, &t, &[2, 1], &Caps::default(), Deadline::none()).unwrap();
        assert_eq!(b.sets().len(), 0);
        let hom = canonical_gadget_hom(&[], &b).unwrap();
        assert_eq!(hom.map().len(), 0);
    }

    #[test]
    fn cutting_down_projections() {
        let caps = Caps::default();
        let p2 = FunctionTable::projection(5, 2, 2).unwrap();
        let cut = restrict_pad(&p2, 3, &caps).unwrap();
        assert_eq!(cut, FunctionTable::projection(3, 2, 2).unwrap());
        let p4 = FunctionTable::projection(5, 4, 2).unwrap();
        let cut = restrict_pad(&p4, 3, &caps).unwrap();
        assert_eq!(cut, FunctionTable::projection(3, 0, 2).unwrap());
        let same = restrict_pad(&p4, 5, &caps).unwrap();
        assert_eq!(same, p4);
        assert!(restrict_pad(&p4, 6, &caps).is_err());
        assert!(restrict_pad(&p4, 0, &caps).is_err());
    }

    #[test]
    fn identity_passes_the_fragment_check() {
        let slice = k2_slice();
        let xi = WeakMinionHom::identity(&slice, 3, Deadline::none()).unwrap();
        let verdict = check_weak_minion_hom(&xi, &slice, 3, Deadline::none()).unwrap();
        match verdict {
            FragmentVerdict::FragmentVerified { chains } => assert!(chains > 0),
            other => panic!("expected a pass, got {other:?}"),
        }
    }

    #[test]
    fn fragment_check_reports_each_violation_kind() {
        let slice = k2_slice();
        let neg = FunctionTable::new(1, 2, 2, vec![1, 0]).unwrap();
        let id1 = FunctionTable::projection(1, 0, 2).unwrap();

        // An image of the wrong arity.
        let bad = WeakMinionHom::new(
            1,
            1,
            vec![(neg.clone(), vec![FunctionTable::projection(2, 0, 2).unwrap()])],
        )
        .unwrap();
        assert!(matches!(
            check_weak_minion_hom(&bad, &slice, 1, Deadline::none()).unwrap(),
            FragmentVerdict::ArityViolation(_)
        ));

        // More images than the declared bound.
        let fat = WeakMinionHom::new(1, 1, vec![(neg.clone(), vec![neg.clone(), id1.clone()])])
            .unwrap();
        assert!(matches!(
            check_weak_minion_hom(&fat, &slice, 1, Deadline::none()).unwrap(),
            FragmentVerdict::CardinalityViolation(_)
        ));

        // A total identity minus one entry fails on a constant chain.
        let mut entries: Vec<(FunctionTable, Vec<FunctionTable>)> = Vec::new();
        for a in 1..=2 {
            for t in slice.tables(a, Deadline::none()).unwrap().iter() {
                if *t != neg {
                    entries.push((t.clone(), vec![t.clone()]));
                }
            }
        }
        let holey = WeakMinionHom::new(1, 1, entries).unwrap();
        match check_weak_minion_hom(&holey, &slice, 2, Deadline::none()).unwrap() {
            FragmentVerdict::ChainViolation { chain } => {
                assert!(chain.tables().contains(&neg));
            }
            other => panic!("expected a chain violation, got {other:?}"),
        }
    }

    #[test]
    fn chain_composites_obey_the_composition_law() {
        let caps = Caps::default();
        let and3 = FunctionTable::new(3, 2, 2, vec![0, 0, 0, 0, 0, 0, 0, 1]).unwrap();
        let first = MinorMap::new(3, 2, vec![0, 1, 1]).unwrap();
        let and2 = minor_apply(&and3, &first, &caps).unwrap();
        let second = MinorMap::new(2, 1, vec![0, 0]).unwrap();
        let and1 = minor_apply(&and2, &second, &caps).unwrap();
        let chain = ChainOfMinors::new(
            vec![and3.clone(), and2, and1.clone()],
            vec![first, second],
            &caps,
        )
        .unwrap();
        let pi = chain.composite(0, 2).unwrap();
        assert_eq!(minor_apply(&and3, &pi, &caps).unwrap(), and1);
        assert_eq!(chain.composite(1, 1).unwrap().entries(), &[0, 1]);
        // A wrong link is rejected outright.
        let broken = ChainOfMinors::new(
            vec![and3.clone(), and3.clone()],
            vec![MinorMap::identity(3)],
            &caps,
        );
        assert!(broken.is_ok());
        let really_broken = ChainOfMinors::new(
            vec![and3.clone(), FunctionTable::projection(3, 0, 2).unwrap()],
            vec![MinorMap::identity(3)],
            &caps,
        );
        assert!(really_broken.is_err());
    }

    #[test]
    fn extraction_recovers_a_coloring_end_to_end() {
        let caps = Caps::default();
        let t = k2_template();
        let inst = path_instance(&[(0, 1), (1, 2)], 3);
        let b = dr_reduce_instance(&inst, &t, &[2, 1], &caps, Deadline::none()).unwrap();
        let slice = k2_slice();
        let xi = WeakMinionHom::identity(&slice, 4, Deadline::none()).unwrap();

        let hom = canonical_gadget_hom(&[0, 1, 0], &b).unwrap();
        let e = t.promise_witness(Deadline::none()).unwrap().unwrap().clone();
        let s_tables = compose_with_projections(&hom, &e, &caps).unwrap();
        let seq = extract_pas_sequence(&s_tables, &xi, &b, &caps, Deadline::none()).unwrap();

        assert_eq!(seq.items().len(), 2);
        for pas in seq.items() {
            assert!(pas_value(pas) <= 1);
        }
        assert!(is_consistent(&seq, caps.chain_cap).unwrap());
        let sol = find_m_solution(&seq.items()[0], 2, Deadline::none())
            .unwrap()
            .unwrap();
        assert!(is_homomorphism(&sol, &inst, &t.b).unwrap());
        assert_eq!(sol, vec![0, 1, 0]);
    }

    #[test]
    fn extraction_rejects_corrupted_tables_and_thin_maps() {
        let caps = Caps::default();
        let t = k2_template();
        let inst = path_instance(&[(0, 1), (1, 2)], 3);
        let b = dr_reduce_instance(&inst, &t, &[2, 1], &caps, Deadline::none()).unwrap();
        let slice = k2_slice();
        let xi = WeakMinionHom::identity(&slice, 4, Deadline::none()).unwrap();
        let hom = canonical_gadget_hom(&[0, 1, 0], &b).unwrap();
        let e = t.promise_witness(Deadline::none()).unwrap().unwrap().clone();
        let s_tables = compose_with_projections(&hom, &e, &caps).unwrap();

        // Rerouting one singleton's table to the other homomorphism index
        // breaks the link with every superset.
        let w = b.sets().iter().position(|&m| m == 0b001).unwrap();
        let flipped = 1 - hom.apply(w);
        let mut broken = s_tables.clone();
        broken[w] = FunctionTable::new(
            4,
            2,
            2,
            (0..16).map(|i| decode(i, 2, 4)[flipped]).collect(),
        )
        .unwrap();
        assert!(matches!(
            extract_pas_sequence(&broken, &xi, &b, &caps, Deadline::none()),
            Err(Error::MinorLinkViolation(_))
        ));

        // A fragment that stops below the largest list arity has no entry to
        // look up.
        let thin = WeakMinionHom::identity(&slice, 1, Deadline::none()).unwrap();
        assert!(matches!(
            extract_pas_sequence(&s_tables, &thin, &b, &caps, Deadline::none()),
            Err(Error::MissingXiEntry(_))
        ));
    }
}
