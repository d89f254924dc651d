//! Interpreting one signature in powers of another: each target symbol is
//! given by an existential conjunctive formula over the base signature, with
//! free variables arranged in an arity-by-exponent grid. The same formula
//! set is used in two directions: applying it to a template produces the
//! defined template, and unrolling it over an instance produces the
//! instance's translation back into the base signature.

use crate::caps::{checked_pow, Caps, Deadline};
use crate::enc::{encode, mixed_radix};
use crate::error::{Error, Result};
use crate::structure::{
    find_homomorphism, Homomorphism, RelationalStructure, Signature, Template,
};
use crate::unionfind::UnionFind;

/// A variable of a defining formula: either grid cell (row, col) with
/// `row < arity(R)` and `col < n`, or one of the formula's existentials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PpTerm {
    Free { row: usize, col: usize },
    Bound(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PpAtom {
    pub relation: String,
    pub args: Vec<PpTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PpFormula {
    pub exists: usize,
    pub atoms: Vec<PpAtom>,
    pub eqs: Vec<(PpTerm, PpTerm)>,
}

/// Exponent, target signature, and one formula per target symbol.
#[derive(Clone, Debug)]
pub struct PpPowerDef {
    pub n: usize,
    pub target: Signature,
    pub formulas: Vec<PpFormula>,
}

impl PpPowerDef {
    pub fn validate(&self, base: &Signature) -> Result<()> {
        if self.n == 0 {
            return Err(Error::BadParam("exponent must be >= 1".to_string()));
        }
        if self.formulas.len() != self.target.len() {
            return Err(Error::BadParam(format!(
                "{} formulas for {} target symbols",
                self.formulas.len(),
                self.target.len()
            )));
        }
        for (sym, formula) in self.target.symbols().iter().zip(&self.formulas) {
            let check_term = |t: &PpTerm| -> Result<()> {
                match *t {
                    PpTerm::Free { row, col } => {
                        if row >= sym.arity || col >= self.n {
                            return Err(Error::UndeclaredVariable(format!(
                                "grid cell ({row},{col}) outside {}x{} for `{}`",
                                sym.arity, self.n, sym.name
                            )));
                        }
                    }
                    PpTerm::Bound(i) => {
                        if i >= formula.exists {
                            return Err(Error::UndeclaredVariable(format!(
                                "existential {} of `{}` not declared",
                                i, sym.name
                            )));
                        }
                    }
                }
                Ok(())
            };
            for atom in &formula.atoms {
                let idx = base
                    .index_of(&atom.relation)
                    .ok_or_else(|| Error::UnknownName(atom.relation.clone()))?;
                let want = base.symbols()[idx].arity;
                if atom.args.len() != want {
                    return Err(Error::ArityMismatch(format!(
                        "atom over `{}` has {} arguments, arity is {}",
                        atom.relation,
                        atom.args.len(),
                        want
                    )));
                }
                for t in &atom.args {
                    check_term(t)?;
                }
            }
            for (l, r) in &formula.eqs {
                check_term(l)?;
                check_term(r)?;
            }
        }
        Ok(())
    }
}

fn eval_side(
    s: &RelationalStructure,
    def: &PpPowerDef,
    caps: &Caps,
    deadline: Deadline,
) -> Result<RelationalStructure> {
    let size = s.domain_size();
    let domain = checked_pow(size, def.n, caps.size_cap, "defined domain")?;
    let mut extensions = Vec::with_capacity(def.target.len());
    let mut ticks = 0u32;
    for (sym, formula) in def.target.symbols().iter().zip(&def.formulas) {
        let grid_len = sym.arity * def.n;
        checked_pow(
            size,
            grid_len + formula.exists,
            caps.cell_cap,
            "formula evaluations",
        )?;
        let mut ext = Vec::new();
        for grid in mixed_radix(&vec![size; grid_len]) {
            ticks = ticks.wrapping_add(1);
            if ticks % 256 == 0 {
                deadline.check()?;
            }
            let holds = mixed_radix(&vec![size; formula.exists]).any(|ex| {
                let value = |t: &PpTerm| match *t {
                    PpTerm::Free { row, col } => grid[row * def.n + col],
                    PpTerm::Bound(i) => ex[i],
                };
                formula.eqs.iter().all(|(l, r)| value(l) == value(r))
                    && formula.atoms.iter().all(|atom| {
                        let tuple: Vec<usize> = atom.args.iter().map(&value).collect();
                        s.relation_by_name(&atom.relation)
                            .map(|rel| rel.binary_search(&tuple).is_ok())
                            .unwrap_or(false)
                    })
            });
            if holds {
                let tuple: Vec<usize> = (0..sym.arity)
                    .map(|i| encode(&grid[i * def.n..(i + 1) * def.n], size))
                    .collect();
                ext.push(tuple);
            }
        }
        extensions.push(ext);
    }
    RelationalStructure::new(domain, def.target.clone(), extensions)
}

/// Evaluate the definition over both sides of a template. The results live
/// on the n-th power domains under row-major encoding.
pub fn pp_power_apply(
    template: &Template,
    def: &PpPowerDef,
    caps: &Caps,
    deadline: Deadline,
) -> Result<Template> {
    def.validate(template.a.signature())?;
    let a = eval_side(&template.a, def, caps, deadline)?;
    let b = eval_side(&template.b, def, caps, deadline)?;
    Template::new(a, b)
}

/// Unroll the definition over an instance of the target signature, producing
/// an instance of the base signature.
///
/// Variables are the grid cells (v, j) for v an instance element, numbered
/// v*n + j, followed by one block of existentials per constraint occurrence
/// in signature order then tuple order. Equality atoms merge variables; the
/// quotient renumbers classes by their smallest member.
pub fn pp_reduce_instance(
    def: &PpPowerDef,
    instance: &RelationalStructure,
    base: &Signature,
    caps: &Caps,
) -> Result<RelationalStructure> {
    def.validate(base)?;
    if instance.signature() != &def.target {
        return Err(Error::SignatureMismatch(
            "instance signature differs from the definition's target".to_string(),
        ));
    }
    let n = def.n;
    let grid_vars = instance
        .domain_size()
        .checked_mul(n)
        .ok_or(Error::SizeCapExceeded {
            what: "translation variables",
            requested: u128::MAX,
            cap: caps.size_cap as u128,
        })?;
    let mut total = grid_vars;
    for (idx, _) in def.target.symbols().iter().enumerate() {
        total += instance.relation(idx).len() * def.formulas[idx].exists;
    }
    caps.check_size("translation variables", total)?;

    let mut uf = UnionFind::new(total);
    let mut emitted: Vec<Vec<Vec<usize>>> = vec![Vec::new(); base.len()];
    let mut next_exist = grid_vars;
    for (idx, _) in def.target.symbols().iter().enumerate() {
        let formula = &def.formulas[idx];
        for t in instance.relation(idx) {
            let occ_base = next_exist;
            next_exist += formula.exists;
            let var_of = |term: &PpTerm| match *term {
                PpTerm::Free { row, col } => t[row] * n + col,
                PpTerm::Bound(i) => occ_base + i,
            };
            for atom in &formula.atoms {
                let bi = base.index_of(&atom.relation).unwrap();
                emitted[bi].push(atom.args.iter().map(&var_of).collect());
            }
            for (l, r) in &formula.eqs {
                uf.union(var_of(l), var_of(r));
            }
        }
    }
    let (class_of, classes) = uf.quotient();
    for ext in &mut emitted {
        for t in ext.iter_mut() {
            for e in t.iter_mut() {
                *e = class_of[*e];
            }
        }
    }
    RelationalStructure::new(classes, base.clone(), emitted)
}

/// Certify one template as a relaxation of another: a homomorphism from the
/// relaxed `a` side into the original `a` side, and one from the original
/// `b` side into the relaxed `b` side. Instances translate by the identity.
pub fn relaxation_reduce(
    relaxed: &Template,
    original: &Template,
    deadline: Deadline,
) -> Result<Option<(Homomorphism, Homomorphism)>> {
    let fwd = find_homomorphism(&relaxed.a, &original.a, deadline)?;
    let back = find_homomorphism(&original.b, &relaxed.b, deadline)?;
    Ok(match (fwd, back) {
        (Some(f), Some(b)) => Some((f, b)),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{find_isomorphism, named_structure};

    fn k2() -> RelationalStructure {
        named_structure("k", Some(2)).unwrap()
    }

    fn edge_template() -> Template {
        Template::new(k2(), k2()).unwrap()
    }

    fn x(row: usize, col: usize) -> PpTerm {
        PpTerm::Free { row, col }
    }

    fn identity_def() -> PpPowerDef {
        PpPowerDef {
            n: 1,
            target: Signature::of(&[("E", 2)]),
            formulas: vec![PpFormula {
                exists: 0,
                atoms: vec![PpAtom {
                    relation: "E".to_string(),
                    args: vec![x(0, 0), x(1, 0)],
                }],
                eqs: vec![],
            }],
        }
    }

    fn two_path_def() -> PpPowerDef {
        PpPowerDef {
            n: 1,
            target: Signature::of(&[("E", 2)]),
            formulas: vec![PpFormula {
                exists: 1,
                atoms: vec![
                    PpAtom {
                        relation: "E".to_string(),
                        args: vec![x(0, 0), PpTerm::Bound(0)],
                    },
                    PpAtom {
                        relation: "E".to_string(),
                        args: vec![PpTerm::Bound(0), x(1, 0)],
                    },
                ],
                eqs: vec![],
            }],
        }
    }

    #[test]
    fn identity_formula_reproduces_the_template() {
        let out = pp_power_apply(
            &edge_template(),
            &identity_def(),
            &Caps::default(),
            Deadline::none(),
        )
        .unwrap();
        assert_eq!(out.a, k2());
        assert_eq!(out.b, k2());
    }

    #[test]
    fn two_step_reachability_on_the_edge_is_the_diagonal() {
        let out = pp_power_apply(
            &edge_template(),
            &two_path_def(),
            &Caps::default(),
            Deadline::none(),
        )
        .unwrap();
        assert_eq!(out.a.relation(0), &[vec![0, 0], vec![1, 1]]);
        assert_eq!(out.b.relation(0), &[vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn equality_formula_yields_the_diagonal() {
        let def = PpPowerDef {
            n: 1,
            target: Signature::of(&[("R", 2)]),
            formulas: vec![PpFormula {
                exists: 0,
                atoms: vec![],
                eqs: vec![(x(0, 0), x(1, 0))],
            }],
        };
        let out =
            pp_power_apply(&edge_template(), &def, &Caps::default(), Deadline::none()).unwrap();
        assert_eq!(out.a.relation(0), &[vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn exponent_two_squares_the_domain() {
        let def = PpPowerDef {
            n: 2,
            target: Signature::of(&[("E", 2)]),
            formulas: vec![PpFormula {
                exists: 0,
                atoms: vec![PpAtom {
                    relation: "E".to_string(),
                    args: vec![x(0, 0), x(1, 0)],
                }],
                eqs: vec![],
            }],
        };
        let out =
            pp_power_apply(&edge_template(), &def, &Caps::default(), Deadline::none()).unwrap();
        assert_eq!(out.a.domain_size(), 4);
        // Coordinate 1 is unconstrained: 2 first-coordinate edges x 4 pairs.
        assert_eq!(out.a.relation(0).len(), 8);
    }

    #[test]
    fn validation_catches_bad_references() {
        let mut def = identity_def();
        def.formulas[0].atoms[0].relation = "F".to_string();
        assert!(def.validate(k2().signature()).is_err());
        let mut def = identity_def();
        def.formulas[0].atoms[0].args = vec![x(0, 0), x(2, 0)];
        assert!(def.validate(k2().signature()).is_err());
        let mut def = identity_def();
        def.formulas[0].atoms[0].args = vec![x(0, 0), PpTerm::Bound(0)];
        assert!(def.validate(k2().signature()).is_err());
    }

    #[test]
    fn identity_translation_reproduces_the_instance() {
        let c5 = named_structure("c", Some(5)).unwrap();
        let out =
            pp_reduce_instance(&identity_def(), &c5, k2().signature(), &Caps::default()).unwrap();
        assert!(find_isomorphism(&out, &c5, Deadline::none())
            .unwrap()
            .is_some());
    }

    #[test]
    fn two_path_translation_of_one_edge_subdivides_it() {
        let edge = RelationalStructure::new(
            2,
            Signature::of(&[("E", 2)]),
            vec![vec![vec![0, 1]]],
        )
        .unwrap();
        let out =
            pp_reduce_instance(&two_path_def(), &edge, k2().signature(), &Caps::default())
                .unwrap();
        assert_eq!(out.domain_size(), 3);
        assert_eq!(out.relation(0), &[vec![0, 2], vec![2, 1]]);
    }

    #[test]
    fn translation_variable_count_is_grid_plus_existentials() {
        let c5 = named_structure("c", Some(5)).unwrap();
        let out =
            pp_reduce_instance(&two_path_def(), &c5, k2().signature(), &Caps::default()).unwrap();
        assert_eq!(out.domain_size(), 5 + 5);
        assert_eq!(out.relation(0).len(), 10);
    }

    #[test]
    fn equality_atoms_identify_variables() {
        let def = PpPowerDef {
            n: 1,
            target: Signature::of(&[("R", 2)]),
            formulas: vec![PpFormula {
                exists: 0,
                atoms: vec![],
                eqs: vec![(x(0, 0), x(1, 0))],
            }],
        };
        let instance = RelationalStructure::new(
            3,
            Signature::of(&[("R", 2)]),
            vec![vec![vec![0, 1], vec![1, 2]]],
        )
        .unwrap();
        let out = pp_reduce_instance(&def, &instance, k2().signature(), &Caps::default()).unwrap();
        // All three elements collapse into one class.
        assert_eq!(out.domain_size(), 1);
    }

    #[test]
    fn translation_preserves_solvability_both_ways() {
        let def = two_path_def();
        let caps = Caps::default();
        let d = Deadline::none();
        let defined = pp_power_apply(&edge_template(), &def, &caps, d).unwrap();
        for inst in [
            named_structure("c", Some(3)).unwrap(),
            named_structure("c", Some(4)).unwrap(),
            named_structure("k", Some(2)).unwrap(),
        ] {
            let translated = pp_reduce_instance(&def, &inst, k2().signature(), &caps).unwrap();
            let direct = find_homomorphism(&inst, &defined.a, d).unwrap().is_some();
            let via = find_homomorphism(&translated, &k2(), d).unwrap().is_some();
            assert_eq!(direct, via, "both routes must agree on {inst:?}");
        }
    }

    #[test]
    fn relaxation_witnesses_small_not_all_equal_chain() {
        let d = Deadline::none();
        let h2 = named_structure("h", Some(2)).unwrap();
        let h3 = named_structure("h", Some(3)).unwrap();
        let h5 = named_structure("h", Some(5)).unwrap();
        let relaxed = Template::new(h2, h5.clone()).unwrap();
        let original = Template::new(h3, h5).unwrap();
        let (f, b) = relaxation_reduce(&relaxed, &original, d).unwrap().unwrap();
        assert_eq!(f.map(), &[0, 1]);
        assert_eq!(b.map(), &[0, 1, 2, 3, 4]);
        let k3 = named_structure("k", Some(3)).unwrap();
        let k2t = edge_template();
        let k3t = Template::new(k3.clone(), k3).unwrap();
        assert!(relaxation_reduce(&k3t, &k2t, d).unwrap().is_none());
        assert!(relaxation_reduce(&k2t, &k2t, d).unwrap().is_some());
    }
}
