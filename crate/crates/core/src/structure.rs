//! Finite relational structures over a fixed signature, and homomorphisms
//! between them.
//!
//! Domains are `0..n`. Relation extensions are kept sorted and deduplicated,
//! so a structure's in-memory form is already canonical.

use crate::caps::{checked_pow, Caps, Deadline};
use crate::enc::{encode, mixed_radix};
use crate::error::{Error, Result};
use crate::solver::{Constraint, Csp};
use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use std::sync::OnceLock;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// Ordered list of relation symbols with unique names. Two structures are
/// similar exactly when their signatures are equal, order included.
#[derive(Clone, Debug)]
pub struct Signature {
    symbols: Vec<RelationSymbol>,
    by_name: HashMap<String, usize>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}
impl Eq for Signature {}

impl Signature {
    pub fn new(symbols: Vec<RelationSymbol>) -> Result<Self> {
        let mut by_name = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if by_name.insert(s.name.clone(), i).is_some() {
                return Err(Error::MalformedStructure {
                    issues: vec![format!("duplicate relation symbol `{}`", s.name)],
                });
            }
        }
        Ok(Signature { symbols, by_name })
    }

    pub fn of(pairs: &[(&str, usize)]) -> Self {
        Signature::new(
            pairs
                .iter()
                .map(|&(name, arity)| RelationSymbol {
                    name: name.to_string(),
                    arity,
                })
                .collect(),
        )
        .expect("static signature")
    }

    pub fn symbols(&self) -> &[RelationSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn max_arity(&self) -> Option<usize> {
        self.symbols.iter().map(|s| s.arity).max()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationalStructure {
    domain_size: usize,
    labels: Option<Vec<String>>,
    signature: Signature,
    /// Per symbol, lexicographically sorted distinct tuples.
    extensions: Vec<Vec<Vec<usize>>>,
}

impl RelationalStructure {
    pub fn new(
        domain_size: usize,
        signature: Signature,
        mut extensions: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let mut issues = Vec::new();
        if extensions.len() != signature.len() {
            issues.push(format!(
                "{} extensions for {} symbols",
                extensions.len(),
                signature.len()
            ));
            return Err(Error::MalformedStructure { issues });
        }
        for (sym, ext) in signature.symbols().iter().zip(extensions.iter()) {
            for (ti, t) in ext.iter().enumerate() {
                if t.len() != sym.arity {
                    issues.push(format!(
                        "relation {} tuple {} has length {}, arity is {}",
                        sym.name,
                        ti,
                        t.len(),
                        sym.arity
                    ));
                }
                for &e in t {
                    if e >= domain_size {
                        issues.push(format!(
                            "relation {} tuple {}: entry {} >= domain {}",
                            sym.name, ti, e, domain_size
                        ));
                    }
                }
            }
        }
        if !issues.is_empty() {
            return Err(Error::MalformedStructure { issues });
        }
        for ext in &mut extensions {
            ext.sort();
            ext.dedup();
        }
        Ok(RelationalStructure {
            domain_size,
            labels: None,
            signature,
            extensions,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.domain_size {
            return Err(Error::MalformedStructure {
                issues: vec![format!(
                    "{} labels for domain of size {}",
                    labels.len(),
                    self.domain_size
                )],
            });
        }
        let distinct: HashSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::MalformedStructure {
                issues: vec!["duplicate domain labels".to_string()],
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn relation(&self, idx: usize) -> &[Vec<usize>] {
        &self.extensions[idx]
    }

    pub fn relation_by_name(&self, name: &str) -> Option<&[Vec<usize>]> {
        self.signature.index_of(name).map(|i| self.relation(i))
    }

    pub fn similar(&self, other: &RelationalStructure) -> bool {
        self.signature == other.signature
    }

    /// Name of element `e` for diagnostics: its label when present, else its index.
    pub fn element_name(&self, e: usize) -> String {
        match &self.labels {
            Some(ls) => ls[e].clone(),
            None => e.to_string(),
        }
    }
}

/// A checked map `source -> target`; construction verifies the homomorphism
/// condition on every tuple, so a value of this type is always a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    map: Vec<usize>,
    source_size: usize,
    target_size: usize,
}

impl Homomorphism {
    pub fn checked(
        map: Vec<usize>,
        source: &RelationalStructure,
        target: &RelationalStructure,
    ) -> Result<Self> {
        if is_homomorphism(&map, source, target)? {
            Ok(Homomorphism {
                map,
                source_size: source.domain_size(),
                target_size: target.domain_size(),
            })
        } else {
            Err(Error::NotAHomomorphism(
                "map violates a relation".to_string(),
            ))
        }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn apply(&self, e: usize) -> usize {
        self.map[e]
    }
}

/// Does `map` define a homomorphism `source -> target`? `Ok(false)` pinpoints
/// nothing; callers wanting the reason should compare relations themselves.
pub fn is_homomorphism(
    map: &[usize],
    source: &RelationalStructure,
    target: &RelationalStructure,
) -> Result<bool> {
    if !source.similar(target) {
        return Err(Error::SignatureMismatch(
            "source and target have different signatures".to_string(),
        ));
    }
    if map.len() != source.domain_size() {
        return Err(Error::ArityOrRangeMismatch(format!(
            "map has {} entries for domain of size {}",
            map.len(),
            source.domain_size()
        )));
    }
    if let Some(&bad) = map.iter().find(|&&v| v >= target.domain_size()) {
        return Err(Error::ArityOrRangeMismatch(format!(
            "value {} >= target domain {}",
            bad,
            target.domain_size()
        )));
    }
    for (idx, _) in source.signature().symbols().iter().enumerate() {
        let tgt = target.relation(idx);
        for t in source.relation(idx) {
            let image: Vec<usize> = t.iter().map(|&e| map[e]).collect();
            if tgt.binary_search(&image).is_err() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn hom_csp(source: &RelationalStructure, target: &RelationalStructure) -> Result<Csp> {
    if !source.similar(target) {
        return Err(Error::SignatureMismatch(
            "source and target have different signatures".to_string(),
        ));
    }
    let mut constraints = Vec::new();
    for (idx, _) in source.signature().symbols().iter().enumerate() {
        if source.relation(idx).is_empty() {
            continue;
        }
        let allowed = Rc::new(source_relation_tuples(target, idx));
        for t in source.relation(idx) {
            constraints.push(Constraint {
                scope: t.clone(),
                allowed: Rc::clone(&allowed),
            });
        }
    }
    Ok(Csp {
        num_vars: source.domain_size(),
        num_values: target.domain_size(),
        constraints,
    })
}

fn source_relation_tuples(s: &RelationalStructure, idx: usize) -> Vec<Vec<usize>> {
    s.relation(idx).to_vec()
}

/// Deterministic backtracking search for a homomorphism. `None` means there
/// is definitively none; a deadline overrun surfaces as an error instead.
pub fn find_homomorphism(
    source: &RelationalStructure,
    target: &RelationalStructure,
    deadline: Deadline,
) -> Result<Option<Homomorphism>> {
    let csp = hom_csp(source, target)?;
    Ok(csp.solve_first(deadline)?.map(|map| Homomorphism {
        map,
        source_size: source.domain_size(),
        target_size: target.domain_size(),
    }))
}

/// All homomorphisms (or the first `limit`) in lexicographic order of the
/// value vector.
pub fn enumerate_homomorphisms(
    source: &RelationalStructure,
    target: &RelationalStructure,
    limit: Option<usize>,
    deadline: Deadline,
) -> Result<Vec<Homomorphism>> {
    let csp = hom_csp(source, target)?;
    Ok(csp
        .enumerate(limit, deadline)?
        .into_iter()
        .map(|map| Homomorphism {
            map,
            source_size: source.domain_size(),
            target_size: target.domain_size(),
        })
        .collect())
}

/// Search for an isomorphism by backtracking over injective assignments.
/// Both directions are verified before a witness is returned.
pub fn find_isomorphism(
    a: &RelationalStructure,
    b: &RelationalStructure,
    deadline: Deadline,
) -> Result<Option<Vec<usize>>> {
    if !a.similar(b) {
        return Err(Error::SignatureMismatch(
            "isomorphism requires equal signatures".to_string(),
        ));
    }
    if a.domain_size() != b.domain_size() {
        return Ok(None);
    }
    for idx in 0..a.signature().len() {
        if a.relation(idx).len() != b.relation(idx).len() {
            return Ok(None);
        }
    }
    let n = a.domain_size();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        a: &RelationalStructure,
        b: &RelationalStructure,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        depth: usize,
        deadline: Deadline,
    ) -> Result<bool> {
        deadline.check()?;
        let n = a.domain_size();
        if depth == n {
            // Forward images verified incrementally; counts being equal makes
            // a forward-preserving bijection an isomorphism only after the
            // reverse check, which we do explicitly.
            let inv_ok = is_homomorphism(map, a, b)? && {
                let mut inv = vec![0; n];
                for (x, &y) in map.iter().enumerate() {
                    inv[y] = x;
                }
                is_homomorphism(&inv, b, a)?
            };
            return Ok(inv_ok);
        }
        'cand: for y in 0..n {
            if used[y] {
                continue;
            }
            map[depth] = y;
            used[y] = true;
            // Every fully mapped source tuple must land in the target relation.
            for idx in 0..a.signature().len() {
                let tgt = b.relation(idx);
                for t in a.relation(idx) {
                    if t.iter().any(|&e| e > depth) {
                        continue;
                    }
                    let image: Vec<usize> = t.iter().map(|&e| map[e]).collect();
                    if tgt.binary_search(&image).is_err() {
                        map[depth] = usize::MAX;
                        used[y] = false;
                        continue 'cand;
                    }
                }
            }
            if extend(a, b, map, used, depth + 1, deadline)? {
                return Ok(true);
            }
            map[depth] = usize::MAX;
            used[y] = false;
        }
        Ok(false)
    }
    if extend(a, b, &mut map, &mut used, 0, deadline)? {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

/// A promise template: a pair of similar structures. Whether the promise
/// `A -> B` actually holds is computed lazily and cached.
#[derive(Debug)]
pub struct Template {
    pub a: RelationalStructure,
    pub b: RelationalStructure,
    promise: OnceLock<Option<Homomorphism>>,
}

impl Clone for Template {
    fn clone(&self) -> Self {
        let promise = OnceLock::new();
        if let Some(v) = self.promise.get() {
            let _ = promise.set(v.clone());
        }
        Template {
            a: self.a.clone(),
            b: self.b.clone(),
            promise,
        }
    }
}

impl Template {
    pub fn new(a: RelationalStructure, b: RelationalStructure) -> Result<Self> {
        if !a.similar(&b) {
            return Err(Error::SignatureMismatch(
                "template sides have different signatures".to_string(),
            ));
        }
        Ok(Template {
            a,
            b,
            promise: OnceLock::new(),
        })
    }

    /// The cached witness that `a -> b`, computed on first use.
    pub fn promise_witness(&self, deadline: Deadline) -> Result<Option<&Homomorphism>> {
        if let Some(v) = self.promise.get() {
            return Ok(v.as_ref());
        }
        let found = find_homomorphism(&self.a, &self.b, deadline)?;
        let _ = self.promise.set(found);
        Ok(self.promise.get().unwrap().as_ref())
    }
}

/// Build one of the named structures in the corpus.
///
/// `k n`: loopless complete digraph (both orientations of each pair).
/// `h n`: domain n with the ternary not-all-equal relation.
/// `c n`: directed n-cycle.
/// `horn`: domain 2 with constants 0 and 1 and the two implication relations.
/// `one_in_three`: domain 2 with the exactly-one-1 ternary relation.
/// `k3_star`: the triangle with each vertex marked by its own unary singleton.
pub fn named_structure(name: &str, param: Option<usize>) -> Result<RelationalStructure> {
    let need = |what: &str| -> Result<usize> {
        param.ok_or_else(|| Error::BadParam(format!("`{what}` needs a parameter n >= 1")))
    };
    match name {
        "k" => {
            let n = need("k")?;
            if n == 0 {
                return Err(Error::BadParam("k needs n >= 1".to_string()));
            }
            let mut e = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        e.push(vec![i, j]);
                    }
                }
            }
            RelationalStructure::new(n, Signature::of(&[("E", 2)]), vec![e])
        }
        "h" => {
            let n = need("h")?;
            if n == 0 {
                return Err(Error::BadParam("h needs n >= 1".to_string()));
            }
            let mut nae = Vec::new();
            for t in mixed_radix(&[n, n, n]) {
                if !(t[0] == t[1] && t[1] == t[2]) {
                    nae.push(t);
                }
            }
            RelationalStructure::new(n, Signature::of(&[("NAE", 3)]), vec![nae])
        }
        "c" => {
            let n = need("c")?;
            if n == 0 {
                return Err(Error::BadParam("c needs n >= 1".to_string()));
            }
            let e = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
            RelationalStructure::new(n, Signature::of(&[("E", 2)]), vec![e])
        }
        "horn" => {
            let mut imp = Vec::new();
            let mut nimp = Vec::new();
            for t in mixed_radix(&[2, 2, 2]) {
                if !(t[0] == 1 && t[1] == 1 && t[2] == 0) {
                    imp.push(t.clone());
                }
                if !(t[0] == 1 && t[1] == 1 && t[2] == 1) {
                    nimp.push(t);
                }
            }
            RelationalStructure::new(
                2,
                Signature::of(&[("C0", 1), ("C1", 1), ("IMP", 3), ("NIMP", 3)]),
                vec![vec![vec![0]], vec![vec![1]], imp, nimp],
            )
        }
        "one_in_three" => RelationalStructure::new(
            2,
            Signature::of(&[("R", 3)]),
            vec![vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]],
        ),
        "k3_star" => {
            let mut e = Vec::new();
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        e.push(vec![i, j]);
                    }
                }
            }
            RelationalStructure::new(
                3,
                Signature::of(&[("E", 2), ("C0", 1), ("C1", 1), ("C2", 1)]),
                vec![e, vec![vec![0]], vec![vec![1]], vec![vec![2]]],
            )
        }
        other => Err(Error::UnknownName(other.to_string())),
    }
}

/// k-th direct power. Domain indices are the row-major encodings of k-tuples;
/// a tuple is in a power relation exactly when every coordinate slice is in
/// the base relation, so |R^(A^k)| = |R^A|^k.
pub fn power(s: &RelationalStructure, k: usize, caps: &Caps) -> Result<RelationalStructure> {
    if k == 0 {
        return Err(Error::BadParam("power needs k >= 1".to_string()));
    }
    let n = checked_pow(s.domain_size(), k, caps.size_cap, "power domain")?;
    let mut extensions = Vec::with_capacity(s.signature().len());
    for (idx, sym) in s.signature().symbols().iter().enumerate() {
        let base = s.relation(idx);
        let count = checked_pow(base.len(), k, caps.cell_cap, "power relation")?;
        let mut ext = Vec::with_capacity(count);
        // Choose one base tuple per coordinate slice; position i of the power
        // tuple collects entry i of each chosen slice.
        for choice in mixed_radix(&vec![base.len(); k]) {
            let mut t = Vec::with_capacity(sym.arity);
            for i in 0..sym.arity {
                let coords: Vec<usize> = choice.iter().map(|&c| base[c][i]).collect();
                t.push(encode(&coords, s.domain_size()));
            }
            ext.push(t);
        }
        extensions.push(ext);
    }
    RelationalStructure::new(n, s.signature().clone(), extensions)
}

/// Disjoint union. Returns the union and, per part, the injection of its
/// domain into the union's domain.
pub fn disjoint_union(
    parts: &[&RelationalStructure],
) -> Result<(RelationalStructure, Vec<Vec<usize>>)> {
    if parts.is_empty() {
        return Err(Error::BadParam("disjoint union of zero parts".to_string()));
    }
    let sig = parts[0].signature().clone();
    for p in parts.iter().skip(1) {
        if p.signature() != &sig {
            return Err(Error::SignatureMismatch(
                "disjoint union parts differ in signature".to_string(),
            ));
        }
    }
    let mut injections = Vec::with_capacity(parts.len());
    let mut offset = 0;
    let mut extensions = vec![Vec::new(); sig.len()];
    for p in parts {
        injections.push((offset..offset + p.domain_size()).collect::<Vec<_>>());
        for idx in 0..sig.len() {
            for t in p.relation(idx) {
                extensions[idx].push(t.iter().map(|&e| e + offset).collect());
            }
        }
        offset += p.domain_size();
    }
    Ok((RelationalStructure::new(offset, sig, extensions)?, injections))
}

/// Substructure induced on `subset` (distinct elements, any order). Elements
/// are renumbered in ascending order of their old index; the returned vector
/// maps new indices to old ones.
pub fn induced_substructure(
    s: &RelationalStructure,
    subset: &[usize],
) -> Result<(RelationalStructure, Vec<usize>)> {
    let mut old: Vec<usize> = subset.to_vec();
    old.sort_unstable();
    old.dedup();
    if old.len() != subset.len() {
        return Err(Error::BadParam("subset has repeated elements".to_string()));
    }
    if let Some(&bad) = old.iter().find(|&&e| e >= s.domain_size()) {
        return Err(Error::BadParam(format!(
            "subset element {} out of range {}",
            bad,
            s.domain_size()
        )));
    }
    let mut new_of = HashMap::new();
    for (new, &o) in old.iter().enumerate() {
        new_of.insert(o, new);
    }
    let mut extensions = Vec::with_capacity(s.signature().len());
    for idx in 0..s.signature().len() {
        let mut ext = Vec::new();
        'tuples: for t in s.relation(idx) {
            let mut img = Vec::with_capacity(t.len());
            for &e in t {
                match new_of.get(&e) {
                    Some(&n) => img.push(n),
                    None => continue 'tuples,
                }
            }
            ext.push(img);
        }
        extensions.push(ext);
    }
    let mut out = RelationalStructure::new(old.len(), s.signature().clone(), extensions)?;
    if let Some(labels) = s.labels() {
        out = out.with_labels(old.iter().map(|&o| labels[o].clone()).collect())?;
    }
    Ok((out, old))
}
