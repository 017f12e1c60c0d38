//! psk: reproducible pipelines over graphs, construction traces,
//! decompositions and embeddings. Documents travel as newline-delimited
//! JSON; DOT renderings go to files only.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use psk_core::decomposition::{
    normalize_to_smooth_simple, verify_decomposition, ConstructionTrace, DecompositionError,
    TreeDecomposition,
};
use psk_core::dot::{digraph_to_dot, graph_to_dot, product_to_dot};
use psk_core::embedders::{
    embed_outerplanar, embed_simple_treewidth, embed_unbounded_indegree, EmbedderError,
};
use psk_core::graph::{Digraph, Graph, Vertex, VertexSet};
use psk_core::instances::{
    gen_attachment_closure, gen_kbar3, gen_max_outerplanar, gen_random_simple_ktree,
    gen_stw_lowerbound, InstanceError,
};
use psk_core::oracle::{
    clique_number, exact_simple_treewidth, exact_treewidth, exhaustive_embedding_search,
    OracleError, SearchBudget,
};
use psk_core::products::{
    clique_diagnostics, directed_product, strong_product, verify_embedding, EdgeClass, Embedding,
    EmbeddingReport, ProductError,
};

#[derive(Parser)]
#[command(
    name = "psk",
    version,
    about = "Construct, verify and stress-test embeddings of sparse graphs into products of digraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Read documents from this file instead of stdin.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Write documents to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for independent documents; output order is always
    /// the input order.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Write DOT renderings to this path (an index is inserted before the
    /// extension when the stream has several documents).
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit instance documents: graphs or construction traces.
    Generate(GenerateArgs),
    /// Embed guests and emit self-verified embedding documents.
    Embed(EmbedArgs),
    /// Re-check embedding documents and print their verification reports.
    Verify,
    /// Rebuild width-k decompositions into smooth simple form.
    Normalize(NormalizeArgs),
    /// Multiply two factors.
    Product(ProductArgs),
    /// Ground-truth numbers and exhaustive embedding searches.
    Oracle(OracleArgs),
    /// Per-clique strip, redundancy and magnetism flags inside an embedding.
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,

    /// Family parameter k where applicable.
    #[arg(long)]
    k: Option<usize>,

    /// Number of vertices for seeded families.
    #[arg(long)]
    n: Option<usize>,

    /// Seed for randomized families; PSK_SEED overrides this.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Fresh vertices attached per clique (attachment-closure).
    #[arg(long)]
    copies: Option<usize>,

    /// Closure rounds (attachment-closure).
    #[arg(long)]
    rounds: Option<usize>,

    /// Documents to emit; consecutive seeds starting at the seed.
    #[arg(long, default_value_t = 1)]
    count: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Kbar3,
    RandomSimpleKtree,
    MaxOuterplanar,
    AttachmentClosure,
    StwLowerbound,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long, value_enum)]
    method: Method,

    /// First host width budget (unbounded method).
    #[arg(long)]
    p: Option<usize>,

    /// Second host width budget (unbounded method).
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Outerplanar,
    SimpleStw,
    Unbounded,
}

#[derive(Args)]
struct NormalizeArgs {
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct ProductArgs {
    /// Strong product of two graphs.
    #[arg(long, conflicts_with = "directed")]
    strong: bool,

    /// Directed product of two digraphs.
    #[arg(long)]
    directed: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(value_enum)]
    what: OracleWhat,

    #[arg(long, default_value_t = 3)]
    max_host_size: usize,

    #[arg(long, default_value_t = 2)]
    max_indegree1: usize,

    #[arg(long, default_value_t = 2)]
    max_indegree2: usize,

    #[arg(long, default_value_t = 2)]
    max_tw1: usize,

    #[arg(long, default_value_t = 2)]
    max_tw2: usize,

    #[arg(long, default_value_t = false)]
    oriented_only: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleWhat {
    Tw,
    Stw,
    Omega,
    Search,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Comma-separated clique vertices, e.g. 0,2,5.
    #[arg(long)]
    clique: String,
}

/// A guest graph together with its embedding; the unit the embed, verify
/// and diagnose streams exchange.
#[derive(Serialize, Deserialize)]
struct EmbeddingDoc {
    guest: Graph,
    embedding: Embedding,
}

#[derive(Serialize, Deserialize)]
struct DecompositionDoc {
    graph: Graph,
    decomposition: TreeDecomposition,
}

#[derive(Deserialize)]
struct StrongFactors {
    factor1: Graph,
    factor2: Graph,
}

#[derive(Deserialize)]
struct DirectedFactors {
    factor1: Digraph,
    factor2: Digraph,
}

enum CliError {
    /// A requested check or construction failed on well-formed input.
    Failed(String),
    /// Unreadable or ill-formed input, or unusable flag combinations.
    Malformed(String),
    /// Instance or search size beyond the configured limits.
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Malformed(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Failed(m) | CliError::Malformed(m) | CliError::Budget(m) => m,
        }
    }
}

impl From<EmbedderError> for CliError {
    fn from(e: EmbedderError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<DecompositionError> for CliError {
    fn from(e: DecompositionError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<ProductError> for CliError {
    fn from(e: ProductError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Budget(e.to_string())
    }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        match e {
            InstanceError::ParameterRange(_) => CliError::Malformed(e.to_string()),
            InstanceError::Explosion { .. } => CliError::Budget(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Malformed(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Malformed(e.to_string())
    }
}

/// One output document: its JSON line, an optional DOT rendering, and
/// whether the document passed the checks the subcommand ran on it.
struct DocOut {
    json: String,
    dot: Option<String>,
    ok: bool,
}

impl DocOut {
    fn new(json: String, dot: Option<String>) -> Self {
        DocOut {
            json,
            dot,
            ok: true,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.jobs == 0 {
        return Err(CliError::Malformed("--jobs must be at least 1".into()));
    }
    match &cli.command {
        Command::Generate(args) => {
            let outs = run_generate(cli, args)?;
            write_outputs(cli, &outs)
        }
        Command::Embed(args) => {
            let lines = read_lines(&cli.input)?;
            let want_dot = cli.dot.is_some();
            let outs = process(&lines, cli.jobs, |l| embed_line(args, l, want_dot))?;
            write_outputs(cli, &outs)
        }
        Command::Verify => {
            let lines = read_lines(&cli.input)?;
            let want_dot = cli.dot.is_some();
            let outs = process(&lines, cli.jobs, |l| verify_line(l, want_dot))?;
            write_outputs(cli, &outs)?;
            match outs.iter().filter(|o| !o.ok).count() {
                0 => Ok(()),
                bad => Err(CliError::Failed(format!(
                    "{} of {} documents failed verification",
                    bad,
                    outs.len()
                ))),
            }
        }
        Command::Normalize(args) => {
            reject_dot(cli, "normalize")?;
            let lines = read_lines(&cli.input)?;
            let outs = process(&lines, cli.jobs, |l| normalize_line(args, l))?;
            write_outputs(cli, &outs)
        }
        Command::Product(args) => {
            if args.strong == args.directed {
                return Err(CliError::Malformed(
                    "pass exactly one of --strong or --directed".into(),
                ));
            }
            let lines = read_lines(&cli.input)?;
            let want_dot = cli.dot.is_some();
            let outs = process(&lines, cli.jobs, |l| product_line(args, l, want_dot))?;
            write_outputs(cli, &outs)
        }
        Command::Oracle(args) => {
            reject_dot(cli, "oracle")?;
            let lines = read_lines(&cli.input)?;
            let outs = process(&lines, cli.jobs, |l| oracle_line(args, l))?;
            write_outputs(cli, &outs)
        }
        Command::Diagnose(args) => {
            reject_dot(cli, "diagnose")?;
            let clique = parse_clique(&args.clique)?;
            let lines = read_lines(&cli.input)?;
            let outs = process(&lines, cli.jobs, |l| diagnose_line(&clique, l))?;
            write_outputs(cli, &outs)
        }
    }
}

fn reject_dot(cli: &Cli, name: &str) -> Result<(), CliError> {
    if cli.dot.is_some() {
        return Err(CliError::Malformed(format!(
            "--dot is not supported for {}",
            name
        )));
    }
    Ok(())
}

fn read_lines(input: &Option<PathBuf>) -> Result<Vec<String>, CliError> {
    let text = match input {
        Some(path) => fs::read_to_string(path)?,
        None => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_owned)
        .collect())
}

fn process<F>(lines: &[String], jobs: usize, f: F) -> Result<Vec<DocOut>, CliError>
where
    F: Fn(&str) -> Result<DocOut, CliError> + Sync,
{
    if jobs <= 1 || lines.len() <= 1 {
        return lines.iter().map(|l| f(l)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Malformed(e.to_string()))?;
    let results: Vec<Result<DocOut, CliError>> = pool.install(|| {
        use rayon::prelude::*;
        lines.par_iter().map(|l| f(l)).collect()
    });
    results.into_iter().collect()
}

fn write_outputs(cli: &Cli, outs: &[DocOut]) -> Result<(), CliError> {
    let mut body = String::new();
    for o in outs {
        body.push_str(&o.json);
        body.push('\n');
    }
    match &cli.output {
        Some(path) => fs::write(path, body)?,
        None => {
            let stdout = io::stdout();
            let mut handle = stdout.lock();
            handle.write_all(body.as_bytes())?;
            handle.flush()?;
        }
    }
    if let Some(base) = &cli.dot {
        let rendered: Vec<(usize, &String)> = outs
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.dot.as_ref().map(|d| (i, d)))
            .collect();
        let many = rendered.len() > 1;
        for (i, d) in rendered {
            fs::write(dot_path(base, i, many), d)?;
        }
    }
    Ok(())
}

fn dot_path(base: &Path, idx: usize, many: bool) -> PathBuf {
    if !many {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dot".into());
    base.with_file_name(format!("{}-{}.{}", stem, idx, ext))
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var("PSK_SEED") {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::Malformed("PSK_SEED must be an unsigned integer".into())),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Malformed(e.to_string())),
    }
}

fn require(opt: Option<usize>, flag: &str) -> Result<usize, CliError> {
    opt.ok_or_else(|| CliError::Malformed(format!("--{} is required here", flag)))
}

fn run_generate(cli: &Cli, args: &GenerateArgs) -> Result<Vec<DocOut>, CliError> {
    let seed0 = env_seed()?.unwrap_or(args.seed);
    if args.count == 0 {
        return Err(CliError::Malformed("--count must be at least 1".into()));
    }
    let seeded = matches!(
        args.family,
        Family::RandomSimpleKtree | Family::MaxOuterplanar
    );
    if !seeded && args.count != 1 {
        return Err(CliError::Malformed(
            "--count applies only to seeded families".into(),
        ));
    }
    let want_dot = cli.dot.is_some();
    let graph_doc = |g: Graph| -> Result<DocOut, CliError> {
        let dot = want_dot.then(|| graph_to_dot(&g, "instance"));
        Ok(DocOut::new(serde_json::to_string(&g)?, dot))
    };
    let mut outs = Vec::with_capacity(args.count);
    match args.family {
        Family::Kbar3 => {
            let k = require(args.k, "k")?;
            if k == 0 {
                return Err(CliError::Malformed("--k must be at least 1".into()));
            }
            outs.push(graph_doc(gen_kbar3(k))?);
        }
        Family::RandomSimpleKtree => {
            let k = require(args.k, "k")?;
            let n = require(args.n, "n")?;
            for i in 0..args.count {
                let trace = gen_random_simple_ktree(k, n, seed0.wrapping_add(i as u64))?;
                let dot = if want_dot {
                    let g = trace.graph().map_err(|e| CliError::Failed(e.to_string()))?;
                    Some(graph_to_dot(&g, "instance"))
                } else {
                    None
                };
                outs.push(DocOut::new(serde_json::to_string(&trace)?, dot));
            }
        }
        Family::MaxOuterplanar => {
            let n = require(args.n, "n")?;
            for i in 0..args.count {
                outs.push(graph_doc(gen_max_outerplanar(
                    n,
                    seed0.wrapping_add(i as u64),
                )?)?);
            }
        }
        Family::AttachmentClosure => {
            let k = require(args.k, "k")?;
            let copies = require(args.copies, "copies")?;
            let rounds = require(args.rounds, "rounds")?;
            let base = single_input_graph(cli)?;
            outs.push(graph_doc(gen_attachment_closure(
                &base, k, copies, rounds,
            )?)?);
        }
        Family::StwLowerbound => {
            let k = require(args.k, "k")?;
            let base = single_input_graph(cli)?;
            outs.push(graph_doc(gen_stw_lowerbound(k, &base)?)?);
        }
    }
    Ok(outs)
}

fn single_input_graph(cli: &Cli) -> Result<Graph, CliError> {
    let lines = read_lines(&cli.input)?;
    match lines.len() {
        1 => Ok(serde_json::from_str(&lines[0])?),
        n => Err(CliError::Malformed(format!(
            "expected exactly one base graph document, got {}",
            n
        ))),
    }
}

fn embedding_dot(guest: &Graph, e: &Embedding, report: &EmbeddingReport) -> Option<String> {
    if !report.is_valid {
        return None;
    }
    let coords: Vec<(Vertex, Vertex)> = (0..guest.vertex_count()).map(|v| e.map[&v]).collect();
    let diagonal: Vec<(Vertex, Vertex)> = report
        .edge_classes
        .iter()
        .filter(|&&(_, _, c)| c == EdgeClass::Diagonal)
        .map(|&(u, v, _)| (u, v))
        .collect();
    Some(product_to_dot(guest, &coords, &diagonal, "embedding"))
}

fn embed_line(args: &EmbedArgs, line: &str, want_dot: bool) -> Result<DocOut, CliError> {
    let (guest, embedding) = match args.method {
        Method::Outerplanar => {
            let g: Graph = serde_json::from_str(line)?;
            let e = embed_outerplanar(&g)?;
            (g, e)
        }
        Method::SimpleStw => {
            let trace: ConstructionTrace = serde_json::from_str(line)?;
            let e = embed_simple_treewidth(&trace)?;
            let g = trace.graph().map_err(|e| CliError::Failed(e.to_string()))?;
            (g, e)
        }
        Method::Unbounded => {
            let p = require(args.p, "p")?;
            let q = require(args.q, "q")?;
            let trace: ConstructionTrace = serde_json::from_str(line)?;
            let e = embed_unbounded_indegree(&trace, p, q)?;
            let g = trace.graph().map_err(|e| CliError::Failed(e.to_string()))?;
            (g, e)
        }
    };
    let report = verify_embedding(&guest, &embedding);
    if !report.is_valid {
        return Err(CliError::Failed(format!(
            "constructed embedding failed verification: {:?}",
            report.violations
        )));
    }
    let dot = if want_dot {
        embedding_dot(&guest, &embedding, &report)
    } else {
        None
    };
    let doc = EmbeddingDoc { guest, embedding };
    Ok(DocOut::new(serde_json::to_string(&doc)?, dot))
}

fn verify_line(line: &str, want_dot: bool) -> Result<DocOut, CliError> {
    let doc: EmbeddingDoc = serde_json::from_str(line)?;
    let report = verify_embedding(&doc.guest, &doc.embedding);
    let dot = if want_dot {
        embedding_dot(&doc.guest, &doc.embedding, &report)
    } else {
        None
    };
    let ok = report.is_valid;
    let mut out = DocOut::new(serde_json::to_string(&report)?, dot);
    out.ok = ok;
    Ok(out)
}

fn normalize_line(args: &NormalizeArgs, line: &str) -> Result<DocOut, CliError> {
    let doc: DecompositionDoc = serde_json::from_str(line)?;
    let normalized = normalize_to_smooth_simple(&doc.graph, &doc.decomposition, args.k)?;
    let report = verify_decomposition(&doc.graph, &normalized, args.k);
    if !(report.is_valid && report.is_normal && report.is_k_simple && report.is_k_smooth) {
        return Err(CliError::Failed(format!(
            "normalization produced a defective decomposition: {:?}",
            report.violations
        )));
    }
    let out = DecompositionDoc {
        graph: doc.graph,
        decomposition: normalized,
    };
    Ok(DocOut::new(serde_json::to_string(&out)?, None))
}

fn product_line(args: &ProductArgs, line: &str, want_dot: bool) -> Result<DocOut, CliError> {
    if args.directed {
        let f: DirectedFactors = serde_json::from_str(line)?;
        let p = directed_product(&f.factor1, &f.factor2);
        let dot = want_dot.then(|| digraph_to_dot(&p, "product"));
        Ok(DocOut::new(serde_json::to_string(&p)?, dot))
    } else {
        let f: StrongFactors = serde_json::from_str(line)?;
        let p = strong_product(&f.factor1, &f.factor2);
        let dot = want_dot.then(|| graph_to_dot(&p, "product"));
        Ok(DocOut::new(serde_json::to_string(&p)?, dot))
    }
}

fn oracle_line(args: &OracleArgs, line: &str) -> Result<DocOut, CliError> {
    let g: Graph = serde_json::from_str(line)?;
    let json = match args.what {
        OracleWhat::Tw => exact_treewidth(&g)?.to_string(),
        OracleWhat::Stw => exact_simple_treewidth(&g)?.to_string(),
        OracleWhat::Omega => clique_number(&g)?.to_string(),
        OracleWhat::Search => {
            let budget = SearchBudget {
                max_host_size: args.max_host_size,
                max_indegree1: args.max_indegree1,
                max_indegree2: args.max_indegree2,
                max_tw1: args.max_tw1,
                max_tw2: args.max_tw2,
                oriented_only: args.oriented_only,
            };
            let outcome = exhaustive_embedding_search(&g, &budget)?;
            serde_json::to_string(&outcome)?
        }
    };
    Ok(DocOut::new(json, None))
}

fn parse_clique(list: &str) -> Result<VertexSet, CliError> {
    let mut out = VertexSet::new();
    for part in list.split(',') {
        let v = part
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Malformed(format!("bad clique vertex '{}'", part.trim())))?;
        out.insert(v);
    }
    Ok(out)
}

fn diagnose_line(clique: &VertexSet, line: &str) -> Result<DocOut, CliError> {
    let doc: EmbeddingDoc = serde_json::from_str(line)?;
    let diag = clique_diagnostics(&doc.guest, &doc.embedding, clique)?;
    Ok(DocOut::new(serde_json::to_string(&diag)?, None))
}
