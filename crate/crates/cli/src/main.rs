//! Batch front end. Every verb reads JSON files, runs one library
//! operation, and emits a canonical report on stdout. Exit codes: 0 found
//! or true, 1 not found or false, 2 error, 3 deadline. Timing goes to
//! stderr so reruns on identical inputs are byte-identical on stdout.

use clap::{Args, Parser, Subcommand, ValueEnum};
use pcsplab::caps::{Caps, Deadline};
use pcsplab::condition::{named_condition, MinorCondition, NamedCondition};
use pcsplab::derive::{derive_from_area_rare, derive_from_cyclic, RareTarget};
use pcsplab::error::{Error, Result};
use pcsplab::free::free_structure;
use pcsplab::json;
use pcsplab::kw::{kw_extract, kw_instance};
use pcsplab::minion::{enumerate_polymorphisms, MinionSlice};
use pcsplab::pas::{find_m_solution, is_consistent, Pas, PasSequence};
use pcsplab::powerset::{power_structure, width1_check, PowerSemantics};
use pcsplab::pp::{pp_power_apply, pp_reduce_instance, relaxation_reduce};
use pcsplab::schedule::{dr_arity_schedule, pas_arities, AritySchedule};
use pcsplab::structure::{
    enumerate_homomorphisms, find_homomorphism, is_homomorphism, named_structure,
    Homomorphism, RelationalStructure, Template,
};
use pcsplab::weakreduce::{
    canonical_gadget_hom, compose_with_projections, dr_reduce_instance, extract_pas_sequence,
    WeakMinionHom,
};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "pcsplab", version, about = "Promise-CSP template laboratory")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Common {
    /// Per-invocation deadline in seconds; 0 disables it.
    #[arg(long, default_value_t = 60)]
    deadline_secs: u64,
    #[arg(long)]
    arity_cap: Option<usize>,
    #[arg(long)]
    cell_cap: Option<usize>,
    #[arg(long)]
    size_cap: Option<usize>,
    #[arg(long)]
    chain_cap: Option<u64>,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Standard,
    Literal,
}

impl From<SemanticsArg> for PowerSemantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Standard => PowerSemantics::Standard,
            SemanticsArg::Literal => PowerSemantics::Literal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DeriveTarget {
    #[value(alias = "area_rare")]
    AreaRare,
    Siggers,
    Olsak,
}

#[derive(Subcommand)]
enum Verb {
    /// Search for a homomorphism, or verify a supplied one.
    Hom {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        /// Witness file {"map": [...]} to check instead of searching.
        #[arg(long)]
        verify: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// List homomorphisms in lexicographic order.
    Enumerate {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// List polymorphisms of one arity.
    Pol {
        /// The two template sides.
        #[arg(long, num_args = 2)]
        template: Vec<PathBuf>,
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        limit: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Decide satisfiability of a minor condition over a template.
    MinorCheck {
        #[arg(long, num_args = 2)]
        template: Vec<PathBuf>,
        /// Built-in name (cyclic:K, area_rare, siggers, olsak) or a file.
        #[arg(long)]
        condition: String,
        #[command(flatten)]
        common: Common,
    },
    /// Derive an area-rare, Siggers, or Olsak table from a cyclic one.
    Derive {
        /// Cyclic function table file.
        #[arg(long)]
        table: PathBuf,
        #[arg(long, value_enum)]
        target: DeriveTarget,
        #[command(flatten)]
        common: Common,
    },
    /// Test solvability by arc consistency: subset structure into side b.
    Width1 {
        #[arg(long, num_args = 2)]
        template: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "standard")]
        semantics: SemanticsArg,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the structure on nonempty subsets of a structure's domain.
    PowerStructure {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, value_enum, default_value = "standard")]
        semantics: SemanticsArg,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the free structure of a template's polymorphisms over a generator.
    Free {
        #[arg(long, num_args = 2)]
        template: Vec<PathBuf>,
        #[arg(long)]
        generator: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Apply an interpretation to both template sides.
    PpApply {
        #[arg(long, num_args = 2)]
        template: Vec<PathBuf>,
        #[arg(long)]
        def: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Translate an instance through an interpretation.
    PpReduce {
        #[arg(long)]
        def: PathBuf,
        /// Structure supplying the base signature.
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
       instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Certify one template as a relaxation of another.
    RelaxCheck {
        #[arg(long, num_args = 2)]
        relaxed: Vec<PathBuf>,
        #[arg(long, num_args = 2)]
        original: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compute the arity schedule of the assignment-table recursion.
    PasArities {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, value_delimiter = ',')]
        values: Vec<u64>,
        /// Emit the full trace as JSON instead of the plain arity line.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Search for an m-solution of an assignment table.
    PasSolve {
        #[arg(long)]
        pas: PathBuf,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Decide consistency of a sequence of assignment tables.
    PasConsistent {
        /// Table files, highest arity first.
        #[arg(long = "pas", required = true)]
        pas: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Arity schedule for a template reduction with image bound d, length r.
    DrSchedule {
        #[arg(long, num_args = 2)]
        template: Vec<PathBuf>,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Translate an instance into its subset-family gadget instance.
    DrReduce {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, num_args = 2)]
        template: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Extract the per-level assignment tables from a gadget solution.
    DrExtract {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, num_args = 2)]
        template: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<usize>,
        /// Image table file: [{"src": table, "imgs": [tables...]}].
        #[arg(long)]
        xi: PathBuf,
        #[arg(long)]
        xi_d: usize,
        #[arg(long)]
        xi_r: usize,
        /// Solution of the original instance; its canonical gadget map is used.
        #[arg(long, conflicts_with = "gadget_hom")]
        solution: Option<PathBuf>,
        /// Map from the translated instance into the gadget structure.
        #[arg(long)]
        gadget_hom: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Choice extraction from a homomorphism off a union of powers.
    Kw {
        /// Family file: list of members, each a list of distinct labels.
        #[arg(long)]
        family: PathBuf,
        #[arg(long, num_args = 2)]
        template: Vec<PathBuf>,
        /// Emit the disjoint union of member powers instead of extracting.
        #[arg(long, conflicts_with = "hom")]
        emit_instance: bool,
        /// Homomorphism from that union into the first template side.
        #[arg(long)]
        hom: Option<PathBuf>,
        /// Skip the cyclic-polymorphism precheck.
        #[arg(long)]
        assume_no_cyclic: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Emit a named structure from the built-in corpus.
    Named {
        #[arg(long)]
        name: String,
        #[arg(long)]
        param: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

enum Output {
    Json(Value),
    Text(String),
}

struct Report {
    output: Output,
    found: bool,
}

impl Report {
    fn found(v: Value) -> Self {
        Report {
            output: Output::Json(v),
            found: true,
        }
    }

    fn missing(v: Value) -> Self {
        Report {
            output: Output::Json(v),
            found: false,
        }
    }

    fn text(s: String) -> Self {
        Report {
            output: Output::Text(s),
            found: true,
        }
    }
}

fn load_json(path: &PathBuf) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_structure(path: &PathBuf) -> Result<RelationalStructure> {
    json::parse_structure(&load_json(path)?)
}

fn load_template(paths: &[PathBuf]) -> Result<Template> {
    Template::new(load_structure(&paths[0])?, load_structure(&paths[1])?)
}

fn load_map(path: &PathBuf) -> Result<Vec<usize>> {
    json::parse_map_witness(&load_json(path)?)
}

fn overlay_caps_file(caps: &mut Caps, path: &str) -> Result<()> {
    let v: Value = serde_json::from_str(
        &std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?,
    )
    .map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse(format!("{path}: expected an object")))?;
    for (key, val) in obj {
        let as_u64 = val
            .as_u64()
            .ok_or_else(|| Error::Parse(format!("{path}: `{key}` must be an integer")))?;
        match key.as_str() {
            "arity_cap" => caps.arity_cap = as_u64 as usize,
            "cell_cap" => caps.cell_cap = as_u64 as usize,
            "size_cap" => caps.size_cap = as_u64 as usize,
            "chain_cap" => caps.chain_cap = as_u64,
            _ => return Err(Error::Parse(format!("{path}: unknown cap `{key}`"))),
        }
    }
    Ok(())
}

fn resolve(common: &Common) -> Result<(Caps, Deadline)> {
    let mut caps = Caps::default();
    if let Ok(path) = std::env::var("PCSP_CAPS") {
        if !path.is_empty() {
            overlay_caps_file(&mut caps, &path)?;
        }
    }
    if let Some(v) = common.arity_cap {
        caps.arity_cap = v;
    }
    if let Some(v) = common.cell_cap {
        caps.cell_cap = v;
    }
    if let Some(v) = common.size_cap {
        caps.size_cap = v;
    }
    if let Some(v) = common.chain_cap {
        caps.chain_cap = v;
    }
    let deadline = if common.deadline_secs == 0 {
        Deadline::none()
    } else {
        Deadline::after_secs(common.deadline_secs)
    };
    Ok((caps, deadline))
}

fn parse_condition_arg(arg: &str) -> Result<MinorCondition> {
    let named = match arg {
        "olsak" => Some(NamedCondition::Olsak),
        "siggers" => Some(NamedCondition::Siggers),
        "area_rare" | "area-rare" => Some(NamedCondition::AreaRare),
        _ => arg
            .strip_prefix("cyclic:")
            .map(|k| {
                k.parse::<usize>()
                    .map(NamedCondition::Cyclic)
                    .map_err(|_| Error::BadParam(format!("bad cyclic arity `{k}`")))
            })
            .transpose()?,
    };
    match named {
        Some(n) => named_condition(n),
        None => json::parse_condition(&load_json(&PathBuf::from(arg))?),
    }
}

fn hom_report(found: Option<&Homomorphism>) -> Report {
    match found {
        Some(h) => Report::found(json::emit_map_witness(h.map())),
        None => Report::missing(json!({"found": false})),
    }
}

fn schedule_report(s: &AritySchedule, as_json: bool) -> Report {
    if as_json {
        Report::text(json::to_canonical_string(&json::emit_schedule(s)))
    } else {
        let nums: Vec<String> = s.k.iter().map(|v| v.to_string()).collect();
        Report::text(format!("{}\n", nums.join(" ")))
    }
}

fn element_names(s: &RelationalStructure) -> Vec<String> {
    (0..s.domain_size()).map(|e| s.element_name(e)).collect()
}

fn run(verb: &Verb) -> Result<Report> {
    match verb {
        Verb::Hom {
            from,
            to,
            verify,
            common,
        } => {
            let (_, deadline) = resolve(common)?;
            let a = load_structure(from)?;
            let b = load_structure(to)?;
            match verify {
                Some(w) => {
                    let map = load_map(w)?;
                    if is_homomorphism(&map, &a, &b)? {
                        Ok(Report::found(json!({"valid": true})))
                    } else {
                        Ok(Report::missing(json!({"valid": false})))
                    }
                }
                None => Ok(hom_report(find_homomorphism(&a, &b, deadline)?.as_ref())),
            }
        }
        Verb::Enumerate {
            from,
            to,
            limit,
            common,
        } => {
            let (_, deadline) = resolve(common)?;
            let a = load_structure(from)?;
            let b = load_structure(to)?;
            let homs = enumerate_homomorphisms(&a, &b, *limit, deadline)?;
            let maps: Vec<Value> = homs.iter().map(|h| json!(h.map())).collect();
            let report = json!({"count": maps.len(), "homs": maps});
            if maps.is_empty() {
                Ok(Report::missing(report))
            } else {
                Ok(Report::found(report))
            }
        }
        Verb::Pol {
            template,
            arity,
            limit,
            common,
        } => {
            let (caps, deadline) = resolve(common)?;
            let t = load_template(template)?;
            let tables = enumerate_polymorphisms(&t, *arity, *limit, &caps, deadline)?;
            let listed: Vec<Value> = tables.iter().map(json::emit_function_table).collect();
            let report = json!({"count": listed.len(), "tables": listed});
            if listed.is_empty() {
                Ok(Report::missing(report))
            } else {
                Ok(Report::found(report))
            }
        }
        Verb::MinorCheck {
            template,
            condition,
            common,
        } => {
            let (caps, deadline) = resolve(common)?;
            let t = load_template(template)?;
            let cond = parse_condition_arg(condition)?;
            match pcsplab::condition::satisfy_minor_condition(&t, &cond, &caps, deadline)? {
                Some(witness) => {
                    let mut obj = serde_json::Map::new();
                    for (name, table) in &witness {
                        obj.insert(name.clone(), json::emit_function_table(table));
                    }
                    Ok(Report::found(json!({"witness": Value::Object(obj)})))
                }
                None => Ok(Report::missing(json!({"satisfiable": false}))),
            }
        }
        Verb::Derive {
            table,
            target,
            common,
        } => {
            let (caps, _) = resolve(common)?;
            let f = json::parse_function_table(&load_json(table)?)?;
            let rare = derive_from_cyclic(&f, &caps)?;
            let out = match target {
                DeriveTarget::AreaRare => rare,
                DeriveTarget::Siggers => {
                    derive_from_area_rare(&rare, RareTarget::Siggers, &caps)?
                }
                DeriveTarget::Olsak => derive_from_area_rare(&rare, RareTarget::Olsak, &caps)?,
            };
            Ok(Report::found(json::emit_function_table(&out)))
        }
        Verb::Width1 {
            template,
            semantics,
            common,
        } => {
            let (caps, deadline) = resolve(common)?;
            let t = load_template(template)?;
            Ok(hom_report(
                width1_check(&t, (*semantics).into(), &caps, deadline)?.as_ref(),
            ))
        }
        Verb::PowerStructure {
            structure,
            semantics,
            common,
        } => {
            let (caps, _) = resolve(common)?;
            let s = load_structure(structure)?;
            let u = power_structure(&s, (*semantics).into(), &caps)?;
            Ok(Report::found(json::emit_structure(&u)))
        }
        Verb::Free {
            template,
            generator,
            common,
        } => {
            let (caps, deadline) = resolve(common)?;
            let t = load_template(template)?;
            let g = load_structure(generator)?;
            let slice = MinionSlice::new(t, caps);
            let free = free_structure(&slice, &g, deadline)?;
            let elements: Vec<Value> =
                free.elements.iter().map(json::emit_function_table).collect();
            Ok(Report::found(json!({
                "structure": json::emit_structure(&free.structure),
                "elements": elements,
            })))
        }
        Verb::PpApply {
            template,
            def,
            common,
        } => {
            let (caps, deadline) = resolve(common)?;
            let t = load_template(template)?;
            let d = json::parse_pp_def(&load_json(def)?)?;
            let out = pp_power_apply(&t, &d, &caps, deadline)?;
            Ok(Report::found(json!({
                "a": json::emit_structure(&out.a),
                "b": json::emit_structure(&out.b),
            })))
        }
        Verb::PpReduce {
            def,
            base,
            instance,
            common,
        } => {
            let (caps, _) = resolve(common)?;
            let d = json::parse_pp_def(&load_json(def)?)?;
            let b = load_structure(base)?;
            let i = load_structure(instance)?;
            let gamma = pp_reduce_instance(&d, &i, b.signature(), &caps)?;
            Ok(Report::found(json::emit_structure(&gamma)))
        }
        Verb::RelaxCheck {
            relaxed,
            original,
            common,
        } => {
            let (_, deadline) = resolve(common)?;
            let rel = load_template(relaxed)?;
            let orig = load_template(original)?;
            match relaxation_reduce(&rel, &orig, deadline)? {
                Some((fwd, back)) => Ok(Report::found(json!({
                    "a_map": json::emit_map_witness(fwd.map()),
                    "b_map": json::emit_map_witness(back.map()),
                }))),
                None => Ok(Report::missing(json!({"found": false}))),
            }
        }
        Verb::PasArities {
            n,
            m,
            values,
            json: as_json,
            common,
        } => {
            resolve(common)?;
            Ok(schedule_report(&pas_arities(*n, *m, values)?, *as_json))
        }
        Verb::PasSolve { pas, m, common } => {
            let (_, deadline) = resolve(common)?;
            let (_, table) = json::parse_pas(&load_json(pas)?)?;
            match find_m_solution(&table, *m, deadline)? {
                Some(map) => Ok(Report::found(json::emit_map_witness(&map))),
                None => Ok(Report::missing(json!({"found": false}))),
            }
        }
        Verb::PasConsistent { pas, common } => {
            let (caps, _) = resolve(common)?;
            let mut vars: Option<Vec<String>> = None;
            let mut tables: Vec<Pas> = Vec::new();
            for path in pas {
                let (names, table) = json::parse_pas(&load_json(path)?)?;
                match &vars {
                    None => vars = Some(names),
                    Some(v) if v != &names => {
                        return Err(Error::BadInput(
                            "table files disagree on variable names".to_string(),
                        ))
                    }
                    _ => {}
                }
                tables.push(table);
            }
            let seq = PasSequence::new(tables)?;
            if is_consistent(&seq, caps.chain_cap)? {
                Ok(Report::found(json!({"consistent": true})))
            } else {
                Ok(Report::missing(json!({"consistent": false})))
            }
        }
        Verb::DrSchedule {
            template,
            d,
            r,
            json: as_json,
            common,
        } => {
            resolve(common)?;
            let t = load_template(template)?;
            Ok(schedule_report(&dr_arity_schedule(&t, *d, *r)?, *as_json))
        }
        Verb::DrReduce {
            instance,
            template,
            schedule,
            common,
        } => {
            let (caps, deadline) = resolve(common)?;
            let i = load_structure(instance)?;
            let t = load_template(template)?;
            let bundle = dr_reduce_instance(&i, &t, schedule, &caps, deadline)?;
            Ok(Report::found(json::emit_structure(bundle.gamma())))
        }
        Verb::DrExtract {
            instance,
            template,
            schedule,
            xi,
            xi_d,
            xi_r,
            solution,
            gadget_hom,
            common,
        } => {
            let (caps, deadline) = resolve(common)?;
            let i = load_structure(instance)?;
            let t = load_template(template)?;
            let bundle = dr_reduce_instance(&i, &t, schedule, &caps, deadline)?;
            let hom = match (solution, gadget_hom) {
                (Some(path), None) => canonical_gadget_hom(&load_map(path)?, &bundle)?,
                (None, Some(path)) => Homomorphism::checked(
                    load_map(path)?,
                    bundle.gamma(),
                    bundle.gadget(),
                )?,
                _ => {
                    return Err(Error::BadParam(
                        "pass exactly one of --solution and --gadget-hom".to_string(),
                    ))
                }
            };
            let e = t
                .promise_witness(deadline)?
                .ok_or_else(|| {
                    Error::BadInput("template has no promise homomorphism".to_string())
                })?
                .clone();
            let s_tables = compose_with_projections(&hom, &e, &caps)?;
            let entries = json::parse_xi_entries(&load_json(xi)?)?;
            let xi_map = WeakMinionHom::new(*xi_d, *xi_r, entries)?;
            let seq = extract_pas_sequence(&s_tables, &xi_map, &bundle, &caps, deadline)?;
            let names = element_names(&i);
            let levels = seq
                .items()
                .iter()
                .map(|p| json::emit_pas(p, &names))
                .collect::<Result<Vec<_>>>()?;
            Ok(Report::found(json!({"sequence": levels})))
        }
        Verb::Kw {
            family,
            template,
            emit_instance,
            hom,
            assume_no_cyclic,
            common,
        } => {
            let (caps, deadline) = resolve(common)?;
            let fam = json::parse_family(&load_json(family)?)?;
            let t = load_template(template)?;
            if *emit_instance {
                let u = kw_instance(&fam, &t.a, &caps)?;
                return Ok(Report::found(json::emit_structure(&u)));
            }
            let hom_path = hom.as_ref().ok_or_else(|| {
                Error::BadParam("pass --hom, or --emit-instance".to_string())
            })?;
            let map = load_map(hom_path)?;
            match kw_extract(&fam, &t, &map, *assume_no_cyclic, &caps, deadline) {
                Ok(choice) => Ok(Report::found(json!({"choice": choice}))),
                Err(Error::CyclicPolymorphismExists(p)) => Ok(Report::missing(
                    json!({"cyclic_polymorphism_arity": p}),
                )),
                Err(e) => Err(e),
            }
        }
        Verb::Named {
            name,
            param,
            common,
        } => {
            resolve(common)?;
            let s = named_structure(name, *param)?;
            Ok(Report::found(json::emit_structure(&s)))
        }
    }
}

fn output_path(verb: &Verb) -> Option<&PathBuf> {
    let common = match verb {
        Verb::Hom { common, .. }
        | Verb::Enumerate { common, .. }
        | Verb::Pol { common, .. }
        | Verb::MinorCheck { common, .. }
        | Verb::Derive { common, .. }
        | Verb::Width1 { common, .. }
        | Verb::PowerStructure { common, .. }
        | Verb::Free { common, .. }
        | Verb::PpApply { common, .. }
        | Verb::PpReduce { common, .. }
        | Verb::RelaxCheck { common, .. }
        | Verb::PasArities { common, .. }
        | Verb::PasSolve { common, .. }
        | Verb::PasConsistent { common, .. }
        | Verb::DrSchedule { common, .. }
        | Verb::DrReduce { common, .. }
        | Verb::DrExtract { common, .. }
        | Verb::Kw { common, .. }
        | Verb::Named { common, .. } => common,
    };
    common.output.as_ref()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = run(&cli.verb);
    eprintln!("elapsed_ms={}", started.elapsed().as_millis());
    match result {
        Ok(report) => {
            let bytes = match &report.output {
                Output::Json(v) => json::to_canonical_string(v),
                Output::Text(s) => s.clone(),
            };
            match output_path(&cli.verb) {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &bytes) {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => print!("{bytes}"),
            }
            if report.found {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Error::DeadlineExceeded) => {
            eprintln!("error: deadline exceeded");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
