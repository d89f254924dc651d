//! Minimal exhaustive oracle shared by the acceptance tests. Everything
//! here does the dumbest correct thing: full enumeration, direct scans.

#![allow(dead_code)]

use pcsplab::structure::{RelationalStructure, Template};
use rand::Rng;

pub fn encode(tuple: &[usize], base: usize) -> usize {
    tuple.iter().fold(0, |acc, &v| acc * base + v)
}

/// All value vectors of the given length, lexicographic.
pub fn all_vectors(len: usize, base: usize) -> Vec<Vec<usize>> {
    if base == 0 {
        return if len == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::with_capacity(base.pow(len as u32));
    let mut cur = vec![0usize; len];
    loop {
        out.push(cur.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < base {
                break;
            }
            cur[i] = 0;
        }
    }
}

pub fn oracle_is_hom(map: &[usize], a: &RelationalStructure, b: &RelationalStructure) -> bool {
    for (idx, _) in a.signature().symbols().iter().enumerate() {
        for t in a.relation(idx) {
            let image: Vec<usize> = t.iter().map(|&e| map[e]).collect();
            if !b.relation(idx).iter().any(|u| u == &image) {
                return false;
            }
        }
    }
    true
}

pub fn oracle_homs(a: &RelationalStructure, b: &RelationalStructure) -> Vec<Vec<usize>> {
    all_vectors(a.domain_size(), b.domain_size())
        .into_iter()
        .filter(|m| oracle_is_hom(m, a, b))
        .collect()
}

pub fn oracle_hom_exists(a: &RelationalStructure, b: &RelationalStructure) -> bool {
    all_vectors(a.domain_size(), b.domain_size())
        .into_iter()
        .any(|m| oracle_is_hom(&m, a, b))
}

/// Raw-table polymorphism check by scanning every argument choice.
pub fn oracle_is_polymorphism(table: &[usize], arity: usize, template: &Template) -> bool {
    let a_size = template.a.domain_size();
    for (idx, _) in template.a.signature().symbols().iter().enumerate() {
        let src = template.a.relation(idx);
        let dst = template.b.relation(idx);
        if src.is_empty() {
            continue;
        }
        let width = src[0].len();
        for choice in all_vectors(arity, src.len()) {
            let image: Vec<usize> = (0..width)
                .map(|col| {
                    let args: Vec<usize> = choice.iter().map(|&c| src[c][col]).collect();
                    table[encode(&args, a_size)]
                })
                .collect();
            if !dst.iter().any(|u| u == &image) {
                return false;
            }
        }
    }
    true
}

/// Random instance over one binary symbol `E`, domain 1..=max_elems.
pub fn seeded_digraph<R: Rng>(rng: &mut R, max_elems: usize, max_edges: usize) -> RelationalStructure {
    use pcsplab::structure::Signature;
    let n = rng.gen_range(1..=max_elems);
    let mut edges = Vec::new();
    if n <= 3 {
        for i in 0..n {
            for j in 0..n {
                if rng.gen_bool(0.4) {
                    edges.push(vec![i, j]);
                }
            }
        }
    } else {
        for _ in 0..rng.gen_range(0..=max_edges) {
            edges.push(vec![rng.gen_range(0..n), rng.gen_range(0..n)]);
        }
        edges.sort();
        edges.dedup();
    }
    RelationalStructure::new(n, Signature::of(&[("E", 2)]), vec![edges]).unwrap()
}
