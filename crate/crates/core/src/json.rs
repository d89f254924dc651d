//! Canonical JSON forms of the domain objects. Parsing is strict: unknown
//! keys and malformed shapes are errors, missing relation lists mean empty.
//! Emission is canonical, so equal objects serialize to identical bytes:
//! fixed key order, symbols in signature order, sorted tuple lists.

use crate::error::{Error, Result};
use crate::minion::FunctionTable;
use crate::pas::Pas;
use crate::pp::{PpAtom, PpFormula, PpPowerDef, PpTerm};
use crate::schedule::{AritySchedule, ScheduleCase};
use crate::structure::{RelationSymbol, RelationalStructure, Signature};
use crate::condition::{ConditionSymbol, Identity, IdentitySide, MinorCondition};
use serde_json::{json, Map, Value};

fn parse_err(what: &str, detail: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{what}: {detail}"))
}

fn as_obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| parse_err(what, "expected an object"))
}

fn as_arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(what, "expected an array"))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| parse_err(what, "expected a string"))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| parse_err(what, "expected a nonnegative integer"))
}

fn get<'a>(m: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    m.get(key)
        .ok_or_else(|| parse_err(what, format!("missing key `{key}`")))
}

fn check_keys(m: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    for k in m.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(parse_err(what, format!("unknown key `{k}`")));
        }
    }
    Ok(())
}

fn usize_list(v: &Value, what: &str) -> Result<Vec<usize>> {
    as_arr(v, what)?.iter().map(|x| as_usize(x, what)).collect()
}

fn string_list(v: &Value, what: &str) -> Result<Vec<String>> {
    as_arr(v, what)?
        .iter()
        .map(|x| as_str(x, what).map(str::to_string))
        .collect()
}

fn parse_signature(v: &Value, what: &str) -> Result<Signature> {
    let mut symbols = Vec::new();
    for s in as_arr(v, what)? {
        let m = as_obj(s, what)?;
        check_keys(m, &["name", "arity"], what)?;
        symbols.push(RelationSymbol {
            name: as_str(get(m, "name", what)?, what)?.to_string(),
            arity: as_usize(get(m, "arity", what)?, what)?,
        });
    }
    Signature::new(symbols)
}

fn emit_signature(sig: &Signature) -> Value {
    Value::Array(
        sig.symbols()
            .iter()
            .map(|s| json!({"name": s.name, "arity": s.arity}))
            .collect(),
    )
}

pub fn parse_structure(v: &Value) -> Result<RelationalStructure> {
    let what = "structure";
    let m = as_obj(v, what)?;
    check_keys(m, &["domain", "signature", "relations"], what)?;
    let domain = get(m, "domain", what)?;
    let (size, labels) = match domain {
        Value::Array(_) => {
            let labels = string_list(domain, "structure domain")?;
            (labels.len(), Some(labels))
        }
        _ => (as_usize(domain, "structure domain")?, None),
    };
    let signature = parse_signature(get(m, "signature", what)?, "structure signature")?;
    let relations = as_obj(get(m, "relations", what)?, "structure relations")?;
    for name in relations.keys() {
        if signature.index_of(name).is_none() {
            return Err(parse_err(what, format!("relation `{name}` not in the signature")));
        }
    }
    let mut extensions = Vec::with_capacity(signature.len());
    for sym in signature.symbols() {
        let ext = match relations.get(&sym.name) {
            None => Vec::new(),
            Some(list) => as_arr(list, "relation")?
                .iter()
                .map(|t| usize_list(t, &format!("relation `{}` tuple", sym.name)))
                .collect::<Result<Vec<_>>>()?,
        };
        extensions.push(ext);
    }
    let s = RelationalStructure::new(size, signature, extensions)?;
    match labels {
        Some(l) => s.with_labels(l),
        None => Ok(s),
    }
}

pub fn emit_structure(s: &RelationalStructure) -> Value {
    let domain = match s.labels() {
        Some(l) => Value::Array(l.iter().map(|x| Value::String(x.clone())).collect()),
        None => json!(s.domain_size()),
    };
    let mut relations = Map::new();
    for (i, sym) in s.signature().symbols().iter().enumerate() {
        let tuples: Vec<Value> = s
            .relation(i)
            .iter()
            .map(|t| Value::Array(t.iter().map(|&e| json!(e)).collect()))
            .collect();
        relations.insert(sym.name.clone(), Value::Array(tuples));
    }
    json!({
        "domain": domain,
        "signature": emit_signature(s.signature()),
        "relations": Value::Object(relations),
    })
}

pub fn parse_function_table(v: &Value) -> Result<FunctionTable> {
    let what = "function table";
    let m = as_obj(v, what)?;
    check_keys(m, &["arity", "in", "out", "table"], what)?;
    FunctionTable::new(
        as_usize(get(m, "arity", what)?, what)?,
        as_usize(get(m, "in", what)?, what)?,
        as_usize(get(m, "out", what)?, what)?,
        usize_list(get(m, "table", what)?, "function table entries")?,
    )
}

pub fn emit_function_table(f: &FunctionTable) -> Value {
    json!({
        "arity": f.arity,
        "in": f.in_size,
        "out": f.out_size,
        "table": f.table,
    })
}

fn parse_identity_side(v: &Value) -> Result<IdentitySide> {
    let what = "identity side";
    let pair = as_arr(v, what)?;
    if pair.len() != 2 {
        return Err(parse_err(what, "expected [symbol, variable list]"));
    }
    Ok(IdentitySide {
        symbol: as_str(&pair[0], what)?.to_string(),
        map: usize_list(&pair[1], what)?,
    })
}

fn emit_identity_side(s: &IdentitySide) -> Value {
    json!([s.symbol, s.map])
}

pub fn parse_condition(v: &Value) -> Result<MinorCondition> {
    let what = "condition";
    let m = as_obj(v, what)?;
    check_keys(m, &["symbols", "vars", "identities"], what)?;
    let mut symbols = Vec::new();
    for s in as_arr(get(m, "symbols", what)?, "condition symbols")? {
        let sm = as_obj(s, "condition symbol")?;
        check_keys(sm, &["name", "arity"], "condition symbol")?;
        symbols.push(ConditionSymbol {
            name: as_str(get(sm, "name", "condition symbol")?, what)?.to_string(),
            arity: as_usize(get(sm, "arity", "condition symbol")?, what)?,
        });
    }
    let mut identities = Vec::new();
    for id in as_arr(get(m, "identities", what)?, "condition identities")? {
        let im = as_obj(id, "identity")?;
        check_keys(im, &["lhs", "rhs"], "identity")?;
        identities.push(Identity {
            lhs: parse_identity_side(get(im, "lhs", "identity")?)?,
            rhs: parse_identity_side(get(im, "rhs", "identity")?)?,
        });
    }
    let cond = MinorCondition {
        symbols,
        vars: as_usize(get(m, "vars", what)?, what)?,
        identities,
    };
    cond.validate()?;
    Ok(cond)
}

pub fn emit_condition(c: &MinorCondition) -> Value {
    json!({
        "symbols": c.symbols.iter().map(|s| json!({"name": s.name, "arity": s.arity})).collect::<Vec<_>>(),
        "vars": c.vars,
        "identities": c.identities.iter().map(|id| json!({
            "lhs": emit_identity_side(&id.lhs),
            "rhs": emit_identity_side(&id.rhs),
        })).collect::<Vec<_>>(),
    })
}

/// Variable names fix the index order: position in `vars` is the variable's
/// index. Assignment vectors arrive ordered by each entry's U list and are
/// reordered to ascending variable index internally.
pub fn parse_pas(v: &Value) -> Result<(Vec<String>, Pas)> {
    let what = "assignment table";
    let m = as_obj(v, what)?;
    check_keys(m, &["vars", "n", "k", "table"], what)?;
    let vars = string_list(get(m, "vars", what)?, "variable names")?;
    let index_of = |name: &str| -> Result<usize> {
        vars.iter()
            .position(|x| x == name)
            .ok_or_else(|| parse_err(what, format!("unknown variable `{name}`")))
    };
    let n = as_usize(get(m, "n", what)?, what)?;
    let k = as_usize(get(m, "k", what)?, what)?;
    let mut pas = Pas::new(vars.len(), n, k)?;
    for entry in as_arr(get(m, "table", what)?, "table entries")? {
        let em = as_obj(entry, "table entry")?;
        check_keys(em, &["U", "fs"], "table entry")?;
        let names = string_list(get(em, "U", "table entry")?, "subset")?;
        let mut order = Vec::with_capacity(names.len());
        let mut mask = 0u64;
        for name in &names {
            let i = index_of(name)?;
            if i >= 64 {
                return Err(parse_err(what, "more than 64 variables"));
            }
            if mask >> i & 1 == 1 {
                return Err(parse_err(what, format!("variable `{name}` repeated in a subset")));
            }
            mask |= 1 << i;
            order.push(i);
        }
        // Values come in U-list order; keys store them ascending by index.
        let mut slots: Vec<usize> = (0..order.len()).collect();
        slots.sort_by_key(|&p| order[p]);
        for f in as_arr(get(em, "fs", "table entry")?, "assignments")? {
            let values = usize_list(f, "assignment")?;
            if values.len() != order.len() {
                return Err(parse_err(what, "assignment length differs from its subset"));
            }
            let sorted: Vec<usize> = slots.iter().map(|&p| values[p]).collect();
            pas.insert(mask, sorted)?;
        }
    }
    Ok((vars, pas))
}

pub fn emit_pas(pas: &Pas, vars: &[String]) -> Result<Value> {
    if vars.len() != pas.num_vars() {
        return Err(Error::BadInput(format!(
            "{} names for {} variables",
            vars.len(),
            pas.num_vars()
        )));
    }
    let mut table = Vec::new();
    for (mask, fs) in pas.entries() {
        let names: Vec<&String> = (0..64)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| &vars[i as usize])
            .collect();
        let rows: Vec<Value> = fs.iter().map(|f| json!(f)).collect();
        table.push(json!({"U": names, "fs": rows}));
    }
    Ok(json!({
        "vars": vars,
        "n": pas.n,
        "k": pas.k,
        "table": table,
    }))
}

fn term_name(t: &PpTerm, exists: &[String]) -> String {
    match *t {
        PpTerm::Free { row, col } => format!("x_{row}_{col}"),
        PpTerm::Bound(i) => exists[i].clone(),
    }
}

fn parse_term(s: &str, exists: &[String], what: &str) -> Result<PpTerm> {
    let mut it = s.split('_');
    if it.next() == Some("x") {
        let row = it.next().and_then(|x| x.parse::<usize>().ok());
        let col = it.next().and_then(|x| x.parse::<usize>().ok());
        if let (Some(row), Some(col), None) = (row, col, it.next()) {
            return Ok(PpTerm::Free { row, col });
        }
    }
    exists
        .iter()
        .position(|x| x == s)
        .map(PpTerm::Bound)
        .ok_or_else(|| Error::UndeclaredVariable(format!("{what}: `{s}`")))
}

pub fn parse_pp_def(v: &Value) -> Result<PpPowerDef> {
    let what = "interpretation";
    let m = as_obj(v, what)?;
    check_keys(m, &["n", "target_signature", "formulas"], what)?;
    let n = as_usize(get(m, "n", what)?, what)?;
    let target = parse_signature(get(m, "target_signature", what)?, "target signature")?;
    let formula_map = as_obj(get(m, "formulas", what)?, "formulas")?;
    for name in formula_map.keys() {
        if target.index_of(name).is_none() {
            return Err(parse_err(what, format!("formula for unknown symbol `{name}`")));
        }
    }
    let mut formulas = Vec::with_capacity(target.len());
    for sym in target.symbols() {
        let fv = formula_map
            .get(&sym.name)
            .ok_or_else(|| parse_err(what, format!("no formula for `{}`", sym.name)))?;
        let fm = as_obj(fv, "formula")?;
        check_keys(fm, &["exists", "atoms", "eq"], "formula")?;
        let exists = string_list(get(fm, "exists", "formula")?, "existentials")?;
        let mut atoms = Vec::new();
        for atom in as_arr(get(fm, "atoms", "formula")?, "atoms")? {
            let parts = as_arr(atom, "atom")?;
            if parts.is_empty() {
                return Err(parse_err("atom", "expected [relation, terms...]"));
            }
            let relation = as_str(&parts[0], "atom relation")?.to_string();
            let args = parts[1..]
                .iter()
                .map(|t| parse_term(as_str(t, "atom term")?, &exists, "atom term"))
                .collect::<Result<Vec<_>>>()?;
            atoms.push(PpAtom { relation, args });
        }
        let mut eqs = Vec::new();
        for eq in as_arr(get(fm, "eq", "formula")?, "equalities")? {
            let pair = as_arr(eq, "equality")?;
            if pair.len() != 2 {
                return Err(parse_err("equality", "expected [term, term]"));
            }
            eqs.push((
                parse_term(as_str(&pair[0], "equality term")?, &exists, "equality term")?,
                parse_term(as_str(&pair[1], "equality term")?, &exists, "equality term")?,
            ));
        }
        formulas.push(PpFormula {
            exists: exists.len(),
            atoms,
            eqs,
        });
    }
    Ok(PpPowerDef {
        n,
        target,
        formulas,
    })
}

pub fn emit_pp_def(def: &PpPowerDef) -> Value {
    let mut formulas = Map::new();
    for (sym, f) in def.target.symbols().iter().zip(&def.formulas) {
        let exists: Vec<String> = (0..f.exists).map(|i| format!("z{i}")).collect();
        let atoms: Vec<Value> = f
            .atoms
            .iter()
            .map(|a| {
                let mut parts = vec![Value::String(a.relation.clone())];
                parts.extend(a.args.iter().map(|t| Value::String(term_name(t, &exists))));
                Value::Array(parts)
            })
            .collect();
        let eqs: Vec<Value> = f
            .eqs
            .iter()
            .map(|(a, b)| json!([term_name(a, &exists), term_name(b, &exists)]))
            .collect();
        formulas.insert(
            sym.name.clone(),
            json!({"exists": exists, "atoms": atoms, "eq": eqs}),
        );
    }
    json!({
        "n": def.n,
        "target_signature": emit_signature(&def.target),
        "formulas": Value::Object(formulas),
    })
}

/// A list of source tables with their image lists; bounds come separately.
pub fn parse_xi_entries(v: &Value) -> Result<Vec<(FunctionTable, Vec<FunctionTable>)>> {
    let what = "image table list";
    let mut out = Vec::new();
    for entry in as_arr(v, what)? {
        let m = as_obj(entry, what)?;
        check_keys(m, &["src", "imgs"], what)?;
        let src = parse_function_table(get(m, "src", what)?)?;
        let imgs = as_arr(get(m, "imgs", what)?, "images")?
            .iter()
            .map(parse_function_table)
            .collect::<Result<Vec<_>>>()?;
        out.push((src, imgs));
    }
    Ok(out)
}

pub fn emit_xi_entries(entries: &[(FunctionTable, Vec<FunctionTable>)]) -> Value {
    Value::Array(
        entries
            .iter()
            .map(|(src, imgs)| {
                json!({
                    "src": emit_function_table(src),
                    "imgs": imgs.iter().map(emit_function_table).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

pub fn parse_family(v: &Value) -> Result<Vec<Vec<String>>> {
    as_arr(v, "family")?
        .iter()
        .map(|m| string_list(m, "family member"))
        .collect()
}

pub fn parse_map_witness(v: &Value) -> Result<Vec<usize>> {
    let what = "witness";
    let m = as_obj(v, what)?;
    check_keys(m, &["map"], what)?;
    usize_list(get(m, "map", what)?, "witness map")
}

pub fn emit_map_witness(map: &[usize]) -> Value {
    json!({ "map": map })
}

pub fn emit_schedule(s: &AritySchedule) -> Value {
    let case = match s.case {
        ScheduleCase::AllM => "all-m",
        ScheduleCase::DropZeroHead => "drop-zero-head",
        ScheduleCase::Base => "base",
        ScheduleCase::Recursive => "recursive",
    };
    let nums = |v: &[num_bigint::BigUint]| -> Value {
        Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
    };
    json!({
        "n": s.n,
        "m": s.m,
        "d": s.d,
        "case": case,
        "k": nums(&s.k),
        "pair_heads": nums(&s.pair_heads),
        "pair_tails": nums(&s.pair_tails),
        "reduced": nums(&s.reduced),
        "ell": nums(&s.ell),
    })
}

/// Canonical bytes of a value: two-space indentation and a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}
