//! Property-based checks: algebraic laws, serialization round-trips, and
//! the structural substructure property of both instance translations.

mod common;

use common::*;
use pcsplab::caps::{Caps, Deadline};
use pcsplab::minion::{minor_apply, FunctionTable, MinorMap};
use pcsplab::pas::{is_m_solution, is_refinement, pas_value, Pas};
use pcsplab::pp::{pp_reduce_instance, PpAtom, PpFormula, PpPowerDef, PpTerm};
use pcsplab::structure::{
    enumerate_homomorphisms, find_homomorphism, induced_substructure, named_structure,
    RelationalStructure, Signature, Template,
};
use pcsplab::weakreduce::dr_reduce_instance;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn minor_application_composes(
        (a, b, c) in (1usize..=3, 1usize..=3, 1usize..=3),
        n in 2usize..=3,
        o in 2usize..=3,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = n.pow(a as u32);
        let table: Vec<usize> = (0..cells).map(|_| rng.gen_range(0..o)).collect();
        let f = FunctionTable::new(a, n, o, table).unwrap();
        let m1 = MinorMap::new(a, b, (0..a).map(|_| rng.gen_range(0..b)).collect()).unwrap();
        let m2 = MinorMap::new(b, c, (0..b).map(|_| rng.gen_range(0..c)).collect()).unwrap();
        let caps = Caps::default();
        let two_steps = minor_apply(&minor_apply(&f, &m1, &caps).unwrap(), &m2, &caps).unwrap();
        let one_step = minor_apply(&f, &m1.then(&m2).unwrap(), &caps).unwrap();
        prop_assert_eq!(two_steps, one_step);
    }

    #[test]
    fn structure_json_round_trips(seed in any::<u64>(), labeled in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = Signature::of(&[("E", 2), ("P", 1)]);
        let mut s = seeded_instance(&mut rng, &sig, 4, 8);
        if labeled {
            let labels = (0..s.domain_size()).map(|i| format!("e{i}")).collect();
            s = s.with_labels(labels).unwrap();
        }
        let emitted = pcsplab::json::emit_structure(&s);
        let back = pcsplab::json::parse_structure(&emitted).unwrap();
        prop_assert_eq!(pcsplab::json::emit_structure(&back), emitted);
    }

    #[test]
    fn pas_json_round_trips(seed in any::<u64>(), v in 2usize..=4, k in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2;
        let mut pas = Pas::new(v, n, k).unwrap();
        let universe = pas.universe();
        for mask in pcsplab::pas::subsets_of_size(universe, k) {
            for _ in 0..rng.gen_range(0..=2) {
                let values: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
                pas.insert(mask, values).unwrap();
            }
        }
        let vars: Vec<String> = (0..v).map(|i| format!("x{i}")).collect();
        let emitted = pcsplab::json::emit_pas(&pas, &vars).unwrap();
        let (names, back) = pcsplab::json::parse_pas(&emitted).unwrap();
        prop_assert_eq!(&names, &vars);
        prop_assert_eq!(back, pas);
    }

    #[test]
    fn restriction_tables_refine_and_keep_solutions(
        seed in any::<u64>(),
        v in 4usize..=5,
        two in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = if two { 2 } else { 1 };
        let funcs: Vec<Vec<usize>> = (0..count)
            .map(|_| (0..v).map(|_| rng.gen_range(0..2)).collect())
            .collect();
        let i = Pas::restrictions_of(v, 2, 3, &funcs).unwrap();
        let j = Pas::restrictions_of(v, 2, 2, &funcs).unwrap();
        prop_assert!(is_refinement(&j, &i).unwrap());
        prop_assert!(pas_value(&j) <= pas_value(&i));
        for g in &funcs {
            prop_assert!(is_m_solution(g, &j, 2).unwrap());
            prop_assert!(is_m_solution(g, &i, 2).unwrap());
        }
    }

    #[test]
    fn search_engine_matches_the_oracle_on_random_instances(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k2 = named_structure("k", Some(2)).unwrap();
        let k3 = named_structure("k", Some(3)).unwrap();
        let inst = seeded_instance(&mut rng, k2.signature(), 3, 6);
        for target in [&k2, &k3] {
            let expected = oracle_homs(&inst, target);
            let listed =
                enumerate_homomorphisms(&inst, target, None, Deadline::none()).unwrap();
            let listed: Vec<Vec<usize>> = listed.iter().map(|h| h.map().to_vec()).collect();
            prop_assert_eq!(&listed, &expected);
            if let Some(first) = expected.first() {
                let found = find_homomorphism(&inst, target, Deadline::none())
                    .unwrap()
                    .unwrap();
                prop_assert!(oracle_is_hom(found.map(), &inst, target));
                prop_assert_eq!(found.map(), first.as_slice());
            }
        }
    }
}

fn edge_signature() -> Signature {
    Signature::of(&[("E", 2)])
}

fn identity_def() -> PpPowerDef {
    PpPowerDef {
        n: 1,
        target: edge_signature(),
        formulas: vec![PpFormula {
            exists: 0,
            atoms: vec![PpAtom {
                relation: "E".to_string(),
                args: vec![
                    PpTerm::Free { row: 0, col: 0 },
                    PpTerm::Free { row: 1, col: 0 },
                ],
            }],
            eqs: vec![],
        }],
    }
}

fn two_path_def() -> PpPowerDef {
    PpPowerDef {
        n: 1,
        target: edge_signature(),
        formulas: vec![PpFormula {
            exists: 1,
            atoms: vec![
                PpAtom {
                    relation: "E".to_string(),
                    args: vec![PpTerm::Free { row: 0, col: 0 }, PpTerm::Bound(0)],
                },
                PpAtom {
                    relation: "E".to_string(),
                    args: vec![PpTerm::Bound(0), PpTerm::Free { row: 1, col: 0 }],
                },
            ],
            eqs: vec![],
        }],
    }
}

/// Variable layout of the equality-free translation: grid cells first, then
/// one existential block per (symbol, tuple) in signature and tuple order.
struct TranslationLayout {
    n: usize,
    grid_vars: usize,
    block_starts: Vec<Vec<usize>>,
    exists: Vec<usize>,
}

impl TranslationLayout {
    fn of(def: &PpPowerDef, instance: &RelationalStructure) -> Self {
        let mut block_starts = Vec::new();
        let grid_vars = instance.domain_size() * def.n;
        let mut next = grid_vars;
        for (idx, _) in def.target.symbols().iter().enumerate() {
            let mut starts = Vec::new();
            for _ in instance.relation(idx) {
                starts.push(next);
                next += def.formulas[idx].exists;
            }
            block_starts.push(starts);
        }
        TranslationLayout {
            n: def.n,
            grid_vars,
            block_starts,
            exists: def.formulas.iter().map(|f| f.exists).collect(),
        }
    }

    /// Instance elements a variable touches: its grid cell's element, or all
    /// elements of the constraint owning its existential block.
    fn touched(&self, var: usize, instance: &RelationalStructure) -> Vec<usize> {
        if var < self.grid_vars {
            return vec![var / self.n];
        }
        for (idx, starts) in self.block_starts.iter().enumerate() {
            for (pos, &start) in starts.iter().enumerate() {
                if var >= start && var < start + self.exists[idx] {
                    return instance.relation(idx)[pos].clone();
                }
            }
        }
        unreachable!("variable out of range");
    }
}

/// Any finite substructure of the translated instance embeds into the
/// translation of the induced instance on the elements it touches.
#[test]
fn translated_substructures_come_from_translated_subinstances() {
    let base = edge_signature();
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for def in [identity_def(), two_path_def()] {
        for _ in 0..30 {
            let inst = seeded_instance(&mut rng, &base, 5, 6);
            let gamma = pp_reduce_instance(&def, &inst, &base, &caps).unwrap();
            let layout = TranslationLayout::of(&def, &inst);

            // A random variable set of the translation, closed into F.
            let vars: Vec<usize> = (0..gamma.domain_size())
                .filter(|_| rng.gen_bool(0.6))
                .collect();
            let mut f: Vec<usize> = vars
                .iter()
                .flat_map(|&v| layout.touched(v, &inst))
                .collect();
            f.sort_unstable();
            f.dedup();
            if f.is_empty() {
                continue;
            }
            let (sub, old_of_new) = induced_substructure(&inst, &f).unwrap();
            let new_of_old = {
                let mut m = vec![usize::MAX; inst.domain_size()];
                for (new, &old) in old_of_new.iter().enumerate() {
                    m[old] = new;
                }
                m
            };
            let sub_gamma = pp_reduce_instance(&def, &sub, &base, &caps).unwrap();
            let sub_layout = TranslationLayout::of(&def, &sub);

            // Image of each translation variable over F inside the
            // sub-translation, when defined.
            let map_var = |var: usize| -> Option<usize> {
                if var < layout.grid_vars {
                    let (elem, col) = (var / layout.n, var % layout.n);
                    let new = new_of_old[elem];
                    if new == usize::MAX {
                        return None;
                    }
                    return Some(new * sub_layout.n + col);
                }
                for (idx, starts) in layout.block_starts.iter().enumerate() {
                    for (pos, &start) in starts.iter().enumerate() {
                        if var >= start && var < start + layout.exists[idx] {
                            let t = &inst.relation(idx)[pos];
                            if t.iter().any(|&e| new_of_old[e] == usize::MAX) {
                                return None;
                            }
                            let mapped: Vec<usize> =
                                t.iter().map(|&e| new_of_old[e]).collect();
                            let new_pos = sub
                                .relation(idx)
                                .binary_search(&mapped)
                                .expect("induced instance keeps inner constraints");
                            return Some(
                                sub_layout.block_starts[idx][new_pos] + (var - start),
                            );
                        }
                    }
                }
                unreachable!()
            };

            let in_set = |v: usize| vars.contains(&v);
            for idx in 0..base.len() {
                let sub_ext = sub_gamma.relation(idx);
                for t in gamma.relation(idx) {
                    if !t.iter().all(|&v| in_set(v)) {
                        continue;
                    }
                    let image: Vec<usize> = t
                        .iter()
                        .map(|&v| map_var(v).expect("touched elements lie in F"))
                        .collect();
                    assert!(
                        sub_ext.iter().any(|u| u == &image),
                        "missing image tuple for def with {} existentials",
                        layout.exists[idx]
                    );
                }
            }
        }
    }
}

/// The gadget translation has the same property: the pairs among a family
/// of subsets all lying inside F appear, with identical relation names, in
/// the translation of the induced instance on F.
#[test]
fn gadget_substructures_come_from_induced_subinstances() {
    let caps = Caps::default();
    let k2 = named_structure("k", Some(2)).unwrap();
    let t = Template::new(k2.clone(), k2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let inst = seeded_instance(&mut rng, t.a.signature(), 4, 5);
        let bundle = dr_reduce_instance(&inst, &t, &[2, 1], &caps, Deadline::none()).unwrap();

        let f: Vec<usize> = (0..inst.domain_size()).filter(|_| rng.gen_bool(0.7)).collect();
        if f.len() < 2 {
            continue;
        }
        let f_mask = f.iter().fold(0u64, |m, &e| m | 1 << e);
        let (sub, old_of_new) = induced_substructure(&inst, &f).unwrap();
        let sub_bundle = dr_reduce_instance(&sub, &t, &[2, 1], &caps, Deadline::none()).unwrap();
        let new_of_old = {
            let mut m = vec![usize::MAX; inst.domain_size()];
            for (new, &old) in old_of_new.iter().enumerate() {
                m[old] = new;
            }
            m
        };
        let sub_index_of = |mask: u64| -> usize {
            let mapped = (0..64)
                .filter(|&b| mask >> b & 1 == 1)
                .fold(0u64, |m, b| m | 1 << new_of_old[b as usize]);
            sub_bundle
                .sets()
                .iter()
                .position(|&s| s == mapped)
                .expect("subset of F present in the sub-bundle")
        };

        let gamma = bundle.gamma();
        let sub_gamma = sub_bundle.gamma();
        for (idx, sym) in gamma.signature().symbols().iter().enumerate() {
            for pair in gamma.relation(idx) {
                let (u, w) = (pair[0], pair[1]);
                if bundle.sets()[u] & !f_mask != 0 {
                    continue;
                }
                let image = vec![
                    sub_index_of(bundle.sets()[u]),
                    sub_index_of(bundle.sets()[w]),
                ];
                let sub_ext = sub_gamma
                    .relation_by_name(&sym.name)
                    .expect("same partial function arises over the subinstance");
                assert!(sub_ext.iter().any(|p| p == &image));
            }
        }
    }
}
