use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use branchlab::goursat::{
    self, brute_subdirect, classify_pair, fibre_product, goursat_decompose, sum_zero, FiniteHom, ProductSubgroup,
};
use branchlab::induction::{self, Finiteness};
use branchlab::permgrp::{Perm, PermGroup};
use branchlab::subgroups::{self, parse_subgroup, Budgets, FgSubgroup};
use branchlab::tree::Vertex;
use branchlab::wreath::{GroupDef, Portrait, Tri};
use branchlab::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "branchlab",
    version,
    about = "Exact computations in self-similar branch groups"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// JSON file with budget values; flags override it
    #[arg(long, global = true)]
    config: Option<String>,
    /// Word-problem closure cap
    #[arg(long, global = true)]
    closure_cap: Option<usize>,
    /// Maximal descent depth
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// Maximal membership search length
    #[arg(long, global = true)]
    max_search_len: Option<usize>,
    /// Maximal quotient level
    #[arg(long, global = true)]
    max_level: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Serialize)]
struct Config {
    #[serde(flatten)]
    budgets: Budgets,
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Load and validate group definitions
    #[command(subcommand)]
    Group(GroupCmd),
    /// Operations on single elements
    #[command(subcommand)]
    Elt(EltCmd),
    /// Finite level quotients
    #[command(subcommand)]
    Quot(QuotCmd),
    /// Finitely generated subgroups
    #[command(subcommand)]
    Sub(SubCmd),
    /// Transversal certificates and block decompositions
    #[command(subcommand)]
    Induct(InductCmd),
    /// Subdirect products of finite groups
    #[command(subcommand)]
    Goursat(GoursatCmd),
}

#[derive(Subcommand)]
enum GroupCmd {
    Check {
        file: String,
    },
    /// grigorchuk, gupta-sidki:<p> or ggs:<p>:<e1,e2,..>
    Builtin {
        spec: String,
    },
}

#[derive(Args)]
struct GroupArg {
    /// Built-in name or group definition file
    #[arg(long, default_value = "grigorchuk")]
    group: String,
}

#[derive(Args)]
struct WordArg {
    #[command(flatten)]
    g: GroupArg,
    #[arg(long)]
    word: String,
}

#[derive(Subcommand)]
enum EltCmd {
    Reduce(WordArg),
    Order {
        #[command(flatten)]
        w: WordArg,
        #[arg(long, default_value_t = 256)]
        max_order: usize,
    },
    Act {
        #[command(flatten)]
        w: WordArg,
        #[arg(long)]
        vertex: String,
    },
    Section {
        #[command(flatten)]
        w: WordArg,
        #[arg(long)]
        vertex: String,
    },
    Portrait {
        #[command(flatten)]
        w: WordArg,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum QuotCmd {
    Order {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long)]
        level: usize,
    },
    Index2 {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long)]
        level: usize,
    },
}

#[derive(Args)]
struct SubArg {
    #[command(flatten)]
    g: GroupArg,
    /// Subgroup file (generator words or block JSON), or inline words
    #[arg(long)]
    subgroup: String,
}

#[derive(Subcommand)]
enum SubCmd {
    Stab {
        #[command(flatten)]
        s: SubArg,
        /// Comma-separated vertices
        #[arg(long)]
        vertices: String,
    },
    Section {
        #[command(flatten)]
        s: SubArg,
        #[arg(long)]
        vertex: String,
    },
    Index {
        #[command(flatten)]
        s: SubArg,
        #[arg(long)]
        level: usize,
    },
    Member {
        #[command(flatten)]
        s: SubArg,
        #[arg(long)]
        word: String,
    },
    FiVerdict(SubArg),
    /// Normal closure of one element
    Closure(WordArg),
}

#[derive(Subcommand)]
enum InductCmd {
    Descend(SubArg),
    Levelform(SubArg),
    Blocks(SubArg),
    Finite(SubArg),
    Equiv(SubArg),
}

#[derive(Subcommand)]
enum GoursatCmd {
    /// Fibre product of two maps onto a common quotient (JSON file)
    Fibre { file: String },
    /// Goursat data of a subdirect subgroup of a product of two groups (JSON file)
    Decompose { file: String },
    /// Pair classes of a subgroup of a product (JSON file)
    Classify { file: String },
    Sumzero {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
    },
    /// All subdirect subgroups of G1 x G2, by exhaustive enumeration
    Brute {
        #[arg(long)]
        g1: String,
        #[arg(long)]
        g2: String,
        #[arg(long, default_value_t = goursat::DEFAULT_CAP)]
        cap: usize,
    },
}

struct Output {
    result: Value,
    text: Option<String>,
}

impl Output {
    fn json(result: Value) -> Output {
        Output { result, text: None }
    }

    fn with_text(result: Value, text: impl Into<String>) -> Output {
        Output {
            result,
            text: Some(text.into()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(&cli.opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli.cmd, &config) {
        Ok(out) => {
            let unknown = has_unknown(&out.result);
            match (config.format, out.text) {
                (Format::Json, _) | (_, None) => {
                    let env = json!({ "command": command_name(&cli.cmd), "config": config, "result": out.result });
                    print(&serde_json::to_string_pretty(&env).unwrap());
                }
                (_, Some(text)) => print(text.trim_end()),
            }
            if unknown {
                eprintln!("note: budgets exhausted before a verdict");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn print(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn load_config(opts: &Opts) -> Result<Config, String> {
    let mut budgets = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            serde_json::from_str::<Budgets>(&text).map_err(|e| format!("{path}: {e}"))?
        }
        None => Budgets::default(),
    };
    let set = |slot: &mut usize, v: Option<usize>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut budgets.closure_cap, opts.closure_cap);
    set(&mut budgets.max_depth, opts.max_depth);
    set(&mut budgets.max_search_len, opts.max_search_len);
    set(&mut budgets.max_level, opts.max_level);
    let values = [
        budgets.closure_cap,
        budgets.max_search_len,
        budgets.max_level,
        budgets.max_ball,
        budgets.max_cosets,
    ];
    if values.contains(&0) {
        return Err("budgets must be positive".into());
    }
    Ok(Config {
        budgets,
        format: opts.format,
    })
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Group(GroupCmd::Check { .. }) => "group check",
        Cmd::Group(GroupCmd::Builtin { .. }) => "group builtin",
        Cmd::Elt(c) => match c {
            EltCmd::Reduce(_) => "elt reduce",
            EltCmd::Order { .. } => "elt order",
            EltCmd::Act { .. } => "elt act",
            EltCmd::Section { .. } => "elt section",
            EltCmd::Portrait { .. } => "elt portrait",
        },
        Cmd::Quot(QuotCmd::Order { .. }) => "quot order",
        Cmd::Quot(QuotCmd::Index2 { .. }) => "quot index2",
        Cmd::Sub(c) => match c {
            SubCmd::Stab { .. } => "sub stab",
            SubCmd::Section { .. } => "sub section",
            SubCmd::Index { .. } => "sub index",
            SubCmd::Member { .. } => "sub member",
            SubCmd::FiVerdict(_) => "sub fi-verdict",
            SubCmd::Closure(_) => "sub closure",
        },
        Cmd::Induct(c) => match c {
            InductCmd::Descend(_) => "induct descend",
            InductCmd::Levelform(_) => "induct levelform",
            InductCmd::Blocks(_) => "induct blocks",
            InductCmd::Finite(_) => "induct finite",
            InductCmd::Equiv(_) => "induct equiv",
        },
        Cmd::Goursat(c) => match c {
            GoursatCmd::Fibre { .. } => "goursat fibre",
            GoursatCmd::Decompose { .. } => "goursat decompose",
            GoursatCmd::Classify { .. } => "goursat classify",
            GoursatCmd::Sumzero { .. } => "goursat sumzero",
            GoursatCmd::Brute { .. } => "goursat brute",
        },
    }
}

/// Any `"verdict": "unknown"` (or a bare `"Unknown"`) in the payload.
fn has_unknown(v: &Value) -> bool {
    match v {
        Value::String(s) => s == "Unknown",
        Value::Array(xs) => xs.iter().any(has_unknown),
        Value::Object(m) => m.get("verdict").and_then(Value::as_str) == Some("unknown") || m.values().any(has_unknown),
        _ => false,
    }
}

fn read_text(path: &str) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidParameters(format!("{path}: {e}")))
}

fn load_group(spec: &str) -> Result<GroupDef, Error> {
    if Path::new(spec).is_file() {
        GroupDef::parse(&read_text(spec)?)
    } else {
        GroupDef::builtin(spec)
    }
}

fn load_subgroup(g: &GroupDef, spec: &str) -> Result<FgSubgroup, Error> {
    let text = if Path::new(spec).is_file() {
        read_text(spec)?
    } else {
        spec.to_string()
    };
    parse_subgroup(g, &text)
}

fn group_summary(g: &GroupDef) -> Value {
    let gens: Vec<Value> = (0..g.num_generators())
        .map(|i| json!({ "name": g.generator_names()[i], "involution": g.is_involution(i) }))
        .collect();
    json!({
        "name": g.name(),
        "degree": g.degree(),
        "csp": g.has_csp(),
        "generators": gens,
        "definition": g.to_text(),
    })
}

fn tri(t: Tri) -> Value {
    json!(t)
}

fn run(cmd: &Cmd, cfg: &Config) -> Result<Output, Error> {
    let b = &cfg.budgets;
    match cmd {
        Cmd::Group(GroupCmd::Check { file }) => {
            let g = GroupDef::parse(&read_text(file)?)?;
            Ok(Output::json(group_summary(&g)))
        }
        Cmd::Group(GroupCmd::Builtin { spec }) => Ok(Output::json(group_summary(&GroupDef::builtin(spec)?))),
        Cmd::Elt(c) => elt(c, cfg),
        Cmd::Quot(QuotCmd::Order { g, level }) => {
            let order = load_group(&g.group)?.quotient(*level).order().to_string();
            Ok(Output::with_text(json!(order), order))
        }
        Cmd::Quot(QuotCmd::Index2 { g, level }) => {
            let n = load_group(&g.group)?.quotient(*level).index2_count().to_string();
            Ok(Output::with_text(json!(n), n))
        }
        Cmd::Sub(c) => sub(c, cfg),
        Cmd::Induct(c) => induct(c, b),
        Cmd::Goursat(c) => finite(c),
    }
}

fn elt(c: &EltCmd, cfg: &Config) -> Result<Output, Error> {
    let cap = cfg.budgets.closure_cap;
    let load = |w: &WordArg| -> Result<(GroupDef, branchlab::wreath::Word), Error> {
        let g = load_group(&w.g.group)?;
        let word = g.parse_word(&w.word)?;
        Ok((g, word))
    };
    match c {
        EltCmd::Reduce(w) => {
            let (g, word) = load(w)?;
            let r = g.render(&g.reduce(&word));
            let t = g.is_trivial(&word, cap);
            let text = if t == Tri::True { "e".to_string() } else { r.clone() };
            Ok(Output::with_text(json!({ "reduced": r, "trivial": tri(t) }), text))
        }
        EltCmd::Order { w, max_order } => {
            let (g, word) = load(w)?;
            match g.element_order(&word, *max_order, cap) {
                Some(n) => Ok(Output::with_text(json!({ "order": n }), n.to_string())),
                None => Ok(Output::json(
                    json!({ "order": null, "verdict": "unknown", "max_order": max_order }),
                )),
            }
        }
        EltCmd::Act { w, vertex } => {
            let (g, word) = load(w)?;
            let v = Vertex::parse(vertex, g.degree())?;
            let img = g.act(&word, &v).to_string();
            Ok(Output::with_text(json!({ "vertex": v, "image": img }), img))
        }
        EltCmd::Section { w, vertex } => {
            let (g, word) = load(w)?;
            let v = Vertex::parse(vertex, g.degree())?;
            let s = g.render(&g.section(&word, &v));
            Ok(Output::with_text(json!({ "vertex": v, "section": s }), s))
        }
        EltCmd::Portrait { w, depth } => {
            let (g, word) = load(w)?;
            let p = Portrait::from_word(&g, &word).expanded(&g, *depth);
            match cfg.format {
                Format::Json => Ok(Output::json(serde_json::to_value(p.view(&g)).unwrap())),
                _ => Ok(Output::with_text(Value::Null, p.to_dot(&g))),
            }
        }
    }
}

fn sub(c: &SubCmd, cfg: &Config) -> Result<Output, Error> {
    let b = &cfg.budgets;
    let load = |s: &SubArg| -> Result<(GroupDef, FgSubgroup), Error> {
        let g = load_group(&s.g.group)?;
        let h = load_subgroup(&g, &s.subgroup)?;
        Ok((g, h))
    };
    match c {
        SubCmd::Stab { s, vertices } => {
            let (g, h) = load(s)?;
            let xs = vertices
                .split(',')
                .map(|v| Vertex::parse(v.trim(), g.degree()))
                .collect::<Result<Vec<_>, _>>()?;
            let (stab, index) = h.stab_set_with_index(&xs, b)?;
            Ok(Output::json(
                json!({ "vertices": xs, "index": index, "generators": stab.render_gens() }),
            ))
        }
        SubCmd::Section { s, vertex } => {
            let (g, h) = load(s)?;
            let v = Vertex::parse(vertex, g.degree())?;
            let stab = h.stab_set(std::slice::from_ref(&v), b)?;
            let sec = stab.section_subgroup(&v)?.pruned(b.closure_cap);
            Ok(Output::json(json!({ "vertex": v, "generators": sec.render_gens() })))
        }
        SubCmd::Index { s, level } => {
            let (_, h) = load(s)?;
            let idx = h.index_in_quotient(*level)?.to_string();
            Ok(Output::with_text(json!({ "level": level, "index": idx }), idx))
        }
        SubCmd::Member { s, word } => {
            let (g, h) = load(s)?;
            let w = g.parse_word(word)?;
            Ok(Output::json(serde_json::to_value(h.membership_word(&w, b)).unwrap()))
        }
        SubCmd::FiVerdict(s) => {
            let (_, h) = load(s)?;
            Ok(Output::json(serde_json::to_value(h.finite_index_verdict(b)).unwrap()))
        }
        SubCmd::Closure(w) => {
            let g = load_group(&w.g.group)?;
            let word = g.parse_word(&w.word)?;
            let nc = subgroups::normal_closure_gens(&g, &word, b);
            Ok(Output::json(json!({
                "generators": nc.subgroup.render_gens(),
                "certified_index": nc.certified_index.map(|i| i.to_string()),
                "fi_verdict": nc.verdict,
            })))
        }
    }
}

fn induct(c: &InductCmd, b: &Budgets) -> Result<Output, Error> {
    let (InductCmd::Descend(s)
    | InductCmd::Levelform(s)
    | InductCmd::Blocks(s)
    | InductCmd::Finite(s)
    | InductCmd::Equiv(s)) = c;
    let g = load_group(&s.g.group)?;
    let h = load_subgroup(&g, &s.subgroup)?;
    let value = match c {
        InductCmd::Descend(_) => serde_json::to_value(induction::descend(&h, b)),
        InductCmd::Levelform(_) => {
            let cert = induction::descend(&h, b);
            serde_json::to_value(induction::to_level_form(&h, &cert)?)
        }
        InductCmd::Blocks(_) => serde_json::to_value(induction::block_decomposition(&h, b)?),
        InductCmd::Finite(_) => {
            let (f, cert) = induction::is_finite_verdict(&h, b);
            let text = match &f {
                Finiteness::Finite { order } => format!("finite of order {order}"),
                Finiteness::Infinite => "infinite".into(),
                Finiteness::Unknown => "unknown".into(),
            };
            let v = json!({ "finiteness": f, "certificate": cert });
            return Ok(Output {
                result: v,
                text: Some(text),
            }
            .json_only_if_unknown());
        }
        InductCmd::Equiv(_) => serde_json::to_value(induction::verify_theorem_equivalence(&h, b)),
    };
    Ok(Output::json(value.map_err(|e| Error::Json(e.to_string()))?))
}

impl Output {
    /// Falls back to the JSON envelope when the verdict is open.
    fn json_only_if_unknown(self) -> Output {
        if has_unknown(&self.result) {
            Output { text: None, ..self }
        } else {
            self
        }
    }
}

/// A finite permutation group: a small-group name, inline cycles
/// `<degree>:<gen>;<gen>` or JSON `{"degree": d, "generators": [[..], ..]}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum FiniteGroupDoc {
    Name(String),
    Gens { degree: usize, generators: Vec<Vec<u32>> },
}

fn finite_group(doc: &FiniteGroupDoc) -> Result<PermGroup, Error> {
    match doc {
        FiniteGroupDoc::Name(s) => parse_finite_group(s),
        FiniteGroupDoc::Gens { degree, generators } => {
            let gens = generators
                .iter()
                .map(|g| perm(*degree, g))
                .collect::<Result<Vec<_>, _>>()?;
            PermGroup::new(*degree, gens)
        }
    }
}

fn perm(degree: usize, images: &[u32]) -> Result<Perm, Error> {
    let p = Perm::from_images(images.to_vec())?;
    if p.degree() != degree {
        return Err(Error::DegreeMismatch(p.degree(), degree));
    }
    Ok(p)
}

fn parse_finite_group(s: &str) -> Result<PermGroup, Error> {
    if let Ok(g) = goursat::small::by_name(s) {
        return Ok(g);
    }
    if s.trim_start().starts_with('{') {
        let doc: FiniteGroupDoc = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
        return finite_group(&doc);
    }
    let (deg, gens) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidParameters(format!("unknown group `{s}`")))?;
    let degree: usize = deg
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameters(format!("bad degree in `{s}`")))?;
    let gens = gens
        .split(';')
        .map(|c| {
            let cycles: Vec<Vec<u32>> = c
                .split(')')
                .map(|x| x.trim().trim_start_matches('('))
                .filter(|x| !x.is_empty())
                .map(|x| {
                    x.split_whitespace()
                        .map(|n| n.parse::<u32>())
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<_, _>>()
                .map_err(|_| Error::InvalidPerm(c.to_string()))?;
            Perm::from_cycles(degree, &cycles)
        })
        .collect::<Result<Vec<_>, _>>()?;
    PermGroup::new(degree, gens)
}

#[derive(Deserialize)]
struct HomDoc {
    g1: FiniteGroupDoc,
    g2: FiniteGroupDoc,
    quotient: FiniteGroupDoc,
    images1: Vec<Vec<u32>>,
    images2: Vec<Vec<u32>>,
}

#[derive(Deserialize)]
struct ProductDoc {
    factors: Vec<FiniteGroupDoc>,
    generators: Vec<Vec<Vec<u32>>>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T, Error> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Json(format!("{path}: {e}")))
}

fn product(doc: &ProductDoc) -> Result<ProductSubgroup, Error> {
    let factors = doc.factors.iter().map(finite_group).collect::<Result<Vec<_>, _>>()?;
    let gens = doc
        .generators
        .iter()
        .map(|t| {
            if t.len() != factors.len() {
                return Err(Error::InvalidParameters(
                    "tuple length differs from factor count".into(),
                ));
            }
            t.iter()
                .zip(&factors)
                .map(|(x, f)| perm(f.degree(), x))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    ProductSubgroup::new(factors, gens)
}

fn tuples(h: &ProductSubgroup) -> Value {
    json!(h
        .gens()
        .iter()
        .map(|t| t.iter().map(|p| p.images().to_vec()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn pair_classes(h: &ProductSubgroup) -> Value {
    let n = h.factors().len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(json!({ "pair": [i, j], "class": classify_pair(h, i, j) }));
        }
    }
    json!(out)
}

fn finite(c: &GoursatCmd) -> Result<Output, Error> {
    let cap = goursat::DEFAULT_CAP;
    match c {
        GoursatCmd::Fibre { file } => {
            let doc: HomDoc = read_json(file)?;
            let (g1, g2, q) = (
                finite_group(&doc.g1)?,
                finite_group(&doc.g2)?,
                finite_group(&doc.quotient)?,
            );
            let qd = q.degree();
            let im = |xs: &[Vec<u32>]| xs.iter().map(|x| perm(qd, x)).collect::<Result<Vec<_>, _>>();
            let f1 = FiniteHom::new(g1, q.clone(), im(&doc.images1)?, cap)?;
            let f2 = FiniteHom::new(g2, q, im(&doc.images2)?, cap)?;
            let p = fibre_product(&f1, &f2, cap)?;
            Ok(Output::json(
                json!({ "order": p.order(), "generators": tuples(&p), "classes": pair_classes(&p) }),
            ))
        }
        GoursatCmd::Decompose { file } => {
            let h = product(&read_json(file)?)?;
            let d = goursat_decompose(&h, cap)?;
            let round_trip = fibre_product(&d.f1, &d.f2, cap)?.same_as(&h);
            let images = |f: &FiniteHom| f.images().iter().map(|p| p.images().to_vec()).collect::<Vec<_>>();
            Ok(Output::json(json!({
                "order": h.order(),
                "quotient_order": d.quotient.order_usize(),
                "quotient_degree": d.quotient.degree(),
                "kernel_orders": [d.kernel1_order, d.kernel2_order],
                "images1": images(&d.f1),
                "images2": images(&d.f2),
                "round_trip": round_trip,
            })))
        }
        GoursatCmd::Classify { file } => {
            let h = product(&read_json(file)?)?;
            let kernels = (0..h.factors().len())
                .map(|i| h.coordinate_kernel_order(i, cap))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Output::json(json!({
                "order": h.order(),
                "subdirect": h.is_subdirect(),
                "classes": pair_classes(&h),
                "coordinate_kernel_orders": kernels,
            })))
        }
        GoursatCmd::Sumzero { p, n } => {
            let h = sum_zero(*p, *n)?;
            let kernels = (0..*n)
                .map(|i| h.coordinate_kernel_order(i, cap))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Output::json(json!({
                "order": h.order(),
                "generators": tuples(&h),
                "classes": pair_classes(&h),
                "coordinate_kernel_orders": kernels,
            })))
        }
        GoursatCmd::Brute { g1, g2, cap } => {
            let (a, b) = (parse_finite_group(g1)?, parse_finite_group(g2)?);
            let subs = brute_subdirect(&a, &b, *cap)?;
            let list: Vec<Value> = subs
                .iter()
                .map(|h| json!({ "order": h.order(), "generators": tuples(h), "class": classify_pair(h, 0, 1) }))
                .collect();
            let count = goursat::goursat_count(&a, &b, *cap)?;
            Ok(Output::json(
                json!({ "count": subs.len(), "goursat_count": count, "subgroups": list }),
            ))
        }
    }
}
