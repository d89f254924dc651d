//! Exhaustive oracles for the integration tests. Everything here walks raw
//! extensions and full map spaces directly, independent of the library's
//! search engine, so agreement is evidence rather than tautology.
#![allow(dead_code)]

use pcsplab::structure::{RelationalStructure, Signature, Template};
use rand::Rng;

/// Row-major index of a tuple, coordinate 0 most significant.
pub fn encode(tuple: &[usize], base: usize) -> usize {
    tuple.iter().fold(0, |acc, &v| acc * base + v)
}

/// All vectors of the given length over 0..base, in lexicographic order.
pub fn all_vectors(len: usize, base: usize) -> Vec<Vec<usize>> {
    if base == 0 {
        return if len == 0 { vec![vec![]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut v = vec![0usize; len];
    loop {
        out.push(v.clone());
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            v[pos] += 1;
            if v[pos] < base {
                break;
            }
            v[pos] = 0;
        }
    }
}

/// Membership check by direct scan of every tuple of every relation.
pub fn oracle_is_hom(
    map: &[usize],
    source: &RelationalStructure,
    target: &RelationalStructure,
) -> bool {
    for idx in 0..source.signature().len() {
        let tgt = target.relation(idx);
        for t in source.relation(idx) {
            let image: Vec<usize> = t.iter().map(|&e| map[e]).collect();
            if !tgt.iter().any(|u| u == &image) {
                return false;
            }
        }
    }
    true
}

/// Every homomorphism, by filtering the full map space in lex order.
pub fn oracle_homs(
    source: &RelationalStructure,
    target: &RelationalStructure,
) -> Vec<Vec<usize>> {
    all_vectors(source.domain_size(), target.domain_size())
        .into_iter()
        .filter(|m| oracle_is_hom(m, source, target))
        .collect()
}

pub fn oracle_hom_exists(source: &RelationalStructure, target: &RelationalStructure) -> bool {
    all_vectors(source.domain_size(), target.domain_size())
        .into_iter()
        .any(|m| oracle_is_hom(&m, source, target))
}

/// Does the table (as a raw row-major vector) preserve every relation: for
/// each choice of `arity` source tuples, the coordinatewise image lands in
/// the target relation.
pub fn oracle_is_polymorphism(
    table: &[usize],
    arity: usize,
    template: &Template,
) -> bool {
    let a_size = template.a.domain_size();
    for idx in 0..template.a.signature().len() {
        let src = template.a.relation(idx);
        let tgt = template.b.relation(idx);
        if src.is_empty() {
            continue;
        }
        let r = src[0].len();
        for choice in all_vectors(arity, src.len()) {
            let mut image = Vec::with_capacity(r);
            for i in 0..r {
                let args: Vec<usize> = choice.iter().map(|&c| src[c][i]).collect();
                image.push(table[encode(&args, a_size)]);
            }
            if !tgt.iter().any(|u| u == &image) {
                return false;
            }
        }
    }
    true
}

/// All polymorphism tables of one arity, filtered from the full table space.
pub fn oracle_polymorphisms(template: &Template, arity: usize) -> Vec<Vec<usize>> {
    let cells = template.a.domain_size().pow(arity as u32);
    all_vectors(cells, template.b.domain_size())
        .into_iter()
        .filter(|t| oracle_is_polymorphism(t, arity, template))
        .collect()
}

/// A random instance over the signature: up to `max_elems` elements, and for
/// each symbol either a dense sprinkle (small domains) or a bounded number
/// of sampled tuples, so the exhaustive oracles stay cheap downstream.
pub fn seeded_instance<R: Rng>(
    rng: &mut R,
    signature: &Signature,
    max_elems: usize,
    max_tuples: usize,
) -> RelationalStructure {
    let size = rng.gen_range(1..=max_elems);
    let mut extensions = Vec::with_capacity(signature.len());
    for sym in signature.symbols() {
        let all = all_vectors(sym.arity, size);
        let mut ext = Vec::new();
        if size <= 3 {
            for t in all {
                if rng.gen_bool(0.4) {
                    ext.push(t);
                }
            }
        } else {
            for _ in 0..rng.gen_range(0..=max_tuples) {
                ext.push(all[rng.gen_range(0..all.len())].clone());
            }
        }
        extensions.push(ext);
    }
    RelationalStructure::new(size, signature.clone(), extensions).unwrap()
}
