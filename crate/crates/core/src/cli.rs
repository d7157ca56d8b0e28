//! Command-line front end. Every subcommand reads the shared settings file
//! (`--config`, see [`crate::config`]) plus its own flags, and prints JSON
//! lines instead of tables with `--json`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::Settings;
use crate::corpus::{
    corpus_stats, generate_synthetic_corpus, load_corpus, load_dictionary_with, save_corpus, save_dictionary,
    CorpusFormat, Dictionary,
};
use crate::embedding::ProviderSpec;
use crate::eval::{
    evaluate_run, format_feedback_log, format_queries, fuse_votes, kappa_by_level, load_feedback_log, load_queries,
    QrelSet, RunFile,
};
use crate::index::{build_index, load_index, read_manifest, save_index, IndexConfig};
use crate::preprocess::{format_lemma_table, load_lemma_table, load_stopwords, NormalizationConfig};
use crate::search::{order_by_time, Method, SearchConfig, Searcher};
use crate::service::{self, AssessmentPlan, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "shiftsearch", version, about = "Semantic search and relevance evaluation for plant log records")]
pub struct Cli {
    /// Settings file with `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print JSON lines instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or inspect an index.
    #[command(subcommand)]
    Index(IndexCommand),
    /// Run one query or a query file against an index.
    Search(SearchArgs),
    /// Start the HTTP service.
    Serve(ServeArgs),
    /// Generate synthetic data.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Evaluation and assessment tools.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Length histogram and token-kind shares of a corpus.
    Stats(StatsArgs),
}

#[derive(Debug, Subcommand)]
pub enum IndexCommand {
    Build(BuildArgs),
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// tsv, csv or jsonl; guessed from the extension when omitted.
    #[arg(long)]
    pub format: Option<String>,
    /// Functional-location dictionary (tab-separated unless `.csv`).
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// One stopword per line; replaces the built-in German list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Two-column `surface<TAB>lemma` table.
    #[arg(long)]
    pub lemmas: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Text vector file (`count dim` header, then `term v1 .. vd`).
    #[arg(long)]
    pub vectors: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Also list the most frequent terms.
    #[arg(long, default_value_t = 0)]
    pub top_terms: usize,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Query text.
    #[arg(long, conflicts_with = "queries", required_unless_present = "queries")]
    pub q: Option<String>,
    /// `query_id<TAB>text` file; produces a run file.
    #[arg(long)]
    pub queries: Option<PathBuf>,
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub no_expansion: bool,
    /// relevance or time.
    #[arg(long, default_value = "relevance")]
    pub sort: String,
    /// Where to write the run file (stdout when omitted).
    #[arg(long)]
    pub run_out: Option<PathBuf>,
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub host: Option<String>,
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub feedback_log: Option<PathBuf>,
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Synthetic benchmark: corpus, dictionary, queries, qrels, lemmas and
    /// the simulated votes.
    Corpus(GenCorpusArgs),
}

#[derive(Debug, Args)]
pub struct GenCorpusArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub records: usize,
    #[arg(long, default_value_t = 20)]
    pub locations: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// tsv or jsonl.
    #[arg(long, default_value = "tsv")]
    pub format: String,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Score a run file against qrels.
    Run(EvalRunArgs),
    /// Cohen's kappa per judgment level from a feedback log.
    Kappa(FeedbackArgs),
    /// Fuse a feedback log into graded qrels.
    Fuse(FuseArgs),
    /// Assign queries to assessors and freeze result lists.
    Plan(PlanArgs),
}

#[derive(Debug, Args)]
pub struct EvalRunArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long)]
    pub qrels: PathBuf,
    /// Comma-separated cutoffs.
    #[arg(long)]
    pub cutoffs: Option<String>,
}

#[derive(Debug, Args)]
pub struct FeedbackArgs {
    #[arg(long)]
    pub feedback: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(long)]
    pub feedback: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub queries: PathBuf,
    /// Comma-separated assessor ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub assessors: Vec<String>,
    #[arg(long, default_value_t = 20)]
    pub per_assessor: usize,
    #[arg(long, default_value_t = 2)]
    pub redundancy: usize,
    #[arg(long, default_value = "plan-1")]
    pub plan_id: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub bucket: usize,
}

struct Ctx<'a> {
    settings: Settings,
    json: bool,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit(&mut self, value: serde_json::Value) -> Result<()> {
        writeln!(self.out, "{value}")?;
        Ok(())
    }

    fn line(&mut self, text: impl AsRef<str>) -> Result<()> {
        writeln!(self.out, "{}", text.as_ref())?;
        Ok(())
    }

    fn path_or(&self, flag: Option<PathBuf>, key: &str, what: &str) -> Result<PathBuf> {
        flag.or_else(|| self.settings.path(key))
            .with_context(|| format!("{what} is required (flag or `{key}` setting)"))
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit status: 0 on success, 1 on failure, 2 on usage errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let json = cli.json;
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let message = format!("{e:#}");
            if json {
                let _ = writeln!(err, "{}", json!({ "error": message }));
            } else {
                let _ = writeln!(err, "error: {message}");
            }
            1
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let mut settings = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    settings.apply_env();
    let mut ctx = Ctx {
        settings,
        json: cli.json,
        out,
    };
    match cli.command {
        Command::Index(IndexCommand::Build(a)) => index_build(&mut ctx, a),
        Command::Index(IndexCommand::Inspect(a)) => index_inspect(&mut ctx, a),
        Command::Search(a) => search(&mut ctx, a),
        Command::Serve(a) => serve(&mut ctx, a),
        Command::Gen(GenCommand::Corpus(a)) => gen_corpus(&mut ctx, a),
        Command::Eval(EvalCommand::Run(a)) => eval_run(&mut ctx, a),
        Command::Eval(EvalCommand::Kappa(a)) => eval_kappa(&mut ctx, a),
        Command::Eval(EvalCommand::Fuse(a)) => eval_fuse(&mut ctx, a),
        Command::Eval(EvalCommand::Plan(a)) => eval_plan(&mut ctx, a),
        Command::Stats(a) => stats(&mut ctx, a),
    }
}

fn corpus_format(flag: Option<&str>, path: &Path) -> Result<CorpusFormat> {
    Ok(match flag {
        Some(f) => f.parse()?,
        None => CorpusFormat::from_path(path),
    })
}

fn delimiter_for(path: &Path) -> u8 {
    if path.extension().is_some_and(|e| e == "csv") {
        b','
    } else {
        b'\t'
    }
}

fn index_build(ctx: &mut Ctx, a: BuildArgs) -> Result<()> {
    let out_dir = ctx.path_or(a.out, "index_dir", "--out")?;
    let format = corpus_format(a.format.as_deref(), &a.corpus)?;
    let records = load_corpus(&a.corpus, format)?;
    let dictionary = match &a.dictionary {
        Some(p) => Dictionary::new(load_dictionary_with(p, delimiter_for(p))?),
        None => Dictionary::default(),
    };
    let mut normalization = match &a.stopwords {
        Some(p) => {
            let words = load_stopwords(p)?;
            NormalizationConfig::default().with_stopwords(words.iter().map(String::as_str))
        }
        None => NormalizationConfig::default(),
    };
    if let Some(p) = &a.lemmas {
        normalization = normalization.with_lemmas(load_lemma_table(p)?);
    }
    let seed = match a.seed {
        Some(s) => s,
        None => ctx.settings.parsed("seed")?.unwrap_or(42),
    };
    let spec = match &a.vectors {
        Some(p) => ProviderSpec::File {
            path: fs::canonicalize(p).with_context(|| format!("cannot access {}", p.display()))?,
            fallback_seed: seed,
        },
        None => ProviderSpec::Hashed {
            seed,
            dim: match a.dim {
                Some(d) => d,
                None => ctx.settings.parsed("dim")?.unwrap_or(256),
            },
        },
    };
    let provider = spec.build()?;
    let index = build_index(&records, &dictionary, provider.as_ref(), &IndexConfig::new(normalization))?;
    save_index(&index, &out_dir)?;
    let summary = json!({
        "index_dir": out_dir,
        "documents": index.doc_count(),
        "vocabulary": index.postings().len(),
        "dim": index.dim(),
        "fingerprint": index.fingerprint(),
    });
    if ctx.json {
        ctx.emit(summary)
    } else {
        ctx.line(format!(
            "indexed {} records into {} ({} terms, dim {}, provider {})",
            index.doc_count(),
            out_dir.display(),
            index.postings().len(),
            index.dim(),
            index.fingerprint()
        ))
    }
}

fn index_inspect(ctx: &mut Ctx, a: InspectArgs) -> Result<()> {
    let dir = ctx.path_or(a.index, "index_dir", "--index")?;
    let manifest = read_manifest(&dir)?;
    let mut top: Vec<(String, usize)> = Vec::new();
    if a.top_terms > 0 {
        let index = load_index(&dir)?;
        top = index
            .postings()
            .iter()
            .map(|(t, p)| (t.clone(), p.len()))
            .collect();
        top.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
        top.truncate(a.top_terms);
    }
    if ctx.json {
        let mut v = serde_json::to_value(&manifest)?;
        if !top.is_empty() {
            v["top_terms"] = json!(top);
        }
        return ctx.emit(v);
    }
    ctx.line(format!("format version  {}", manifest.format_version))?;
    ctx.line(format!("documents       {}", manifest.doc_count))?;
    ctx.line(format!("vocabulary      {}", manifest.vocabulary_size))?;
    ctx.line(format!("dimension       {}", manifest.dim))?;
    ctx.line(format!("provider        {}", serde_json::to_string(&manifest.provider)?))?;
    ctx.line(format!("fingerprint     {}", manifest.provider_fingerprint))?;
    ctx.line(format!("config hash     {}", manifest.config_hash))?;
    for (t, df) in top {
        ctx.line(format!("{df:>8}  {t}"))?;
    }
    Ok(())
}

fn search_config(ctx: &Ctx, a: &SearchArgs) -> Result<SearchConfig> {
    let mut c = SearchConfig::default();
    if let Some(k) = ctx.settings.parsed("k")? {
        c.k = k;
    }
    if let Some(n) = ctx.settings.parsed("page_size")? {
        c.page_size = n;
    }
    if let Some(m) = ctx.settings.parsed("method")? {
        c.method = m;
    }
    if let Some(e) = ctx.settings.flag("expansion")? {
        c.query_expansion = e;
    }
    if let Some(m) = a.method {
        c.method = m;
    }
    if let Some(l) = a.limit {
        c.page_size = l;
    }
    if a.no_expansion {
        c.query_expansion = false;
    }
    c.validate()?;
    Ok(c)
}

fn snippet(text: &str, max: usize) -> String {
    let flat = text.split_whitespace().collect::<Vec<_>>().join(" ");
    if flat.chars().count() <= max {
        flat
    } else {
        format!("{}...", flat.chars().take(max).collect::<String>())
    }
}

fn search(ctx: &mut Ctx, a: SearchArgs) -> Result<()> {
    let dir = ctx.path_or(a.index.clone(), "index_dir", "--index")?;
    let by_time = match a.sort.as_str() {
        "relevance" => false,
        "time" => true,
        other => bail!("unknown sort {other:?} (expected relevance or time)"),
    };
    let config = search_config(ctx, &a)?;
    let searcher = Searcher::from_index(Arc::new(load_index(&dir)?))?;

    if let Some(path) = &a.queries {
        let queries = load_queries(path)?;
        let tag = a.tag.clone().unwrap_or_else(|| config.method.to_string());
        let run = searcher.run(&queries, &config, &tag)?;
        match &a.run_out {
            Some(p) => {
                fs::write(p, run.format()).with_context(|| format!("cannot write {}", p.display()))?;
                if ctx.json {
                    ctx.emit(json!({ "run": p, "queries": run.queries.len(), "tag": tag }))?;
                } else {
                    ctx.line(format!("wrote {} queries to {}", run.queries.len(), p.display()))?;
                }
            }
            None => write!(ctx.out, "{}", run.format())?,
        }
        return Ok(());
    }

    let q = a.q.as_deref().unwrap_or_default();
    let mut page_config = config;
    if by_time {
        page_config.page_size = config.k;
    }
    let outcome = searcher.search(q, &page_config)?;
    let mut results = outcome.results;
    if by_time {
        order_by_time(&mut results);
        results.truncate(config.page_size);
    }
    let index = searcher.index();
    if ctx.json {
        for r in &results {
            let record = index.record(r.ordinal);
            ctx.emit(json!({
                "rank": r.rank,
                "record_id": r.record_id,
                "timestamp": r.timestamp,
                "score": r.score,
                "doc_sim": r.doc_sim,
                "term_sim": r.term_sim,
                "text": record.text(),
            }))?;
        }
        return Ok(());
    }
    ctx.line(format!(
        "{} results of {} matched ({}, expansion {})",
        results.len(),
        outcome.matched,
        config.method,
        if config.query_expansion { "on" } else { "off" }
    ))?;
    ctx.line(format!("{:>4}  {:>6}  {:>10}  {:<10}  text", "rank", "score", "timestamp", "id"))?;
    for r in &results {
        let record = index.record(r.ordinal);
        ctx.line(format!(
            "{:>4}  {:>6.3}  {:>10}  {:<10}  {}",
            r.rank,
            r.score,
            r.timestamp,
            r.record_id,
            snippet(&record.text(), 70)
        ))?;
    }
    Ok(())
}

fn serve(ctx: &mut Ctx, a: ServeArgs) -> Result<()> {
    let mut settings = ctx.settings.clone();
    let overrides = [
        ("index_dir", a.index.map(|p| p.display().to_string())),
        ("host", a.host),
        ("port", a.port.map(|p| p.to_string())),
        ("feedback_log", a.feedback_log.map(|p| p.display().to_string())),
        ("plan", a.plan.map(|p| p.display().to_string())),
        ("static_dir", a.static_dir.map(|p| p.display().to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            settings.set(key, v);
        }
    }
    let config = ServiceConfig::from_settings(&settings)?;
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .try_init();
    let runtime = tokio::runtime::Runtime::new().context("cannot start async runtime")?;
    runtime.block_on(service::serve(config))?;
    Ok(())
}

fn gen_corpus(ctx: &mut Ctx, a: GenCorpusArgs) -> Result<()> {
    let bench = generate_synthetic_corpus(a.seed, a.records, a.locations)?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let format: CorpusFormat = a.format.parse()?;
    let corpus_name = match format {
        CorpusFormat::JsonLines => "corpus.jsonl",
        CorpusFormat::Delimited { delimiter: b',' } => "corpus.csv",
        CorpusFormat::Delimited { .. } => "corpus.tsv",
    };
    let write = |name: &str, text: String| -> Result<PathBuf> {
        let p = a.out.join(name);
        fs::write(&p, text).with_context(|| format!("cannot write {}", p.display()))?;
        Ok(p)
    };
    save_corpus(&bench.records, &a.out.join(corpus_name), format)?;
    save_dictionary(&bench.dictionary, &a.out.join("dictionary.tsv"))?;
    write("queries.tsv", format_queries(&bench.queries))?;
    write("qrels.txt", bench.truth.format())?;
    write("lemmas.tsv", format_lemma_table(&bench.lemmas))?;
    write("feedback.jsonl", format_feedback_log(&bench.judgments))?;
    let summary = json!({
        "out": a.out,
        "records": bench.records.len(),
        "locations": bench.dictionary.len(),
        "queries": bench.queries.len(),
        "judged_pairs": bench.truth.len(),
        "votes": bench.judgments.len(),
    });
    if ctx.json {
        ctx.emit(summary)
    } else {
        ctx.line(format!(
            "wrote {} records, {} locations, {} queries and {} judged pairs to {}",
            bench.records.len(),
            bench.dictionary.len(),
            bench.queries.len(),
            bench.truth.len(),
            a.out.display()
        ))
    }
}

fn parse_cutoffs(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .with_context(|| format!("invalid cutoff {c:?}"))
        })
        .collect()
}

fn eval_run(ctx: &mut Ctx, a: EvalRunArgs) -> Result<()> {
    let cutoffs = match a.cutoffs.or_else(|| ctx.settings.get("cutoffs").map(str::to_string)) {
        Some(c) => parse_cutoffs(&c)?,
        None => vec![5, 20],
    };
    let run = RunFile::load(&a.run)?;
    let qrels = QrelSet::load(&a.qrels)?;
    let report = evaluate_run(&run, &qrels, &cutoffs)?;
    if ctx.json {
        return ctx.emit(serde_json::to_value(&report)?);
    }
    ctx.line(format!(
        "run {}: {} queries ({} without qrels), {:.1} retrieved on average",
        report.run_tag, report.query_count, report.queries_without_qrels, report.avg_retrieved
    ))?;
    ctx.line(format!("MRR      {:.4}", report.mrr))?;
    for c in &report.cutoffs {
        ctx.line(format!(
            "@{:<4}  P {:.4}  mAP {:.4}  nDCG {:.4}",
            c.n, c.precision, c.map, c.ndcg
        ))?;
    }
    Ok(())
}

fn eval_kappa(ctx: &mut Ctx, a: FeedbackArgs) -> Result<()> {
    let path = ctx.path_or(a.feedback, "feedback_log", "--feedback")?;
    let events = load_feedback_log(&path)?;
    for s in kappa_by_level(&events) {
        if ctx.json {
            ctx.emit(serde_json::to_value(&s)?)?;
        } else {
            let kappa = s.kappa.map_or("n/a".to_string(), |k| format!("{k:.4}"));
            ctx.line(format!(
                "{:<7} kappa {kappa}  ({} pairs over {} queries)",
                s.level, s.pairs, s.queries
            ))?;
        }
    }
    Ok(())
}

fn eval_fuse(ctx: &mut Ctx, a: FuseArgs) -> Result<()> {
    let path = ctx.path_or(a.feedback, "feedback_log", "--feedback")?;
    let qrels = fuse_votes(&load_feedback_log(&path)?);
    match &a.out {
        Some(p) => {
            fs::write(p, qrels.format()).with_context(|| format!("cannot write {}", p.display()))?;
            if ctx.json {
                ctx.emit(json!({ "qrels": p, "judged_pairs": qrels.len() }))
            } else {
                ctx.line(format!("wrote {} judged pairs to {}", qrels.len(), p.display()))
            }
        }
        None if ctx.json => {
            for (q, docs) in qrels.queries() {
                for (d, g) in docs {
                    ctx.emit(json!({ "query_id": q, "record_id": d, "grade": g }))?;
                }
            }
            Ok(())
        }
        None => {
            write!(ctx.out, "{}", qrels.format())?;
            Ok(())
        }
    }
}

fn eval_plan(ctx: &mut Ctx, a: PlanArgs) -> Result<()> {
    let dir = ctx.path_or(a.index, "index_dir", "--index")?;
    let searcher = Searcher::from_index(Arc::new(load_index(&dir)?))?;
    let queries = load_queries(&a.queries)?;
    let plan = AssessmentPlan::build(
        &a.plan_id,
        &searcher,
        &queries,
        &a.assessors,
        a.per_assessor,
        a.redundancy,
    )?;
    plan.save(&a.out)?;
    if ctx.json {
        return ctx.emit(json!({
            "plan": a.out,
            "plan_id": plan.plan_id,
            "assignments": plan.assignments,
        }));
    }
    ctx.line(format!("plan {} written to {}", plan.plan_id, a.out.display()))?;
    for (assessor, qs) in &plan.assignments {
        ctx.line(format!("{assessor:<12} {}", qs.join(" ")))?;
    }
    Ok(())
}

fn stats(ctx: &mut Ctx, a: StatsArgs) -> Result<()> {
    let format = corpus_format(a.format.as_deref(), &a.corpus)?;
    let records = load_corpus(&a.corpus, format)?;
    let s = corpus_stats(&records, a.bucket)?;
    if ctx.json {
        return ctx.emit(serde_json::to_value(&s)?);
    }
    ctx.line(format!("records  {}", s.record_count))?;
    ctx.line(format!("tokens   {}", s.token_count))?;
    ctx.line(format!(
        "kinds    word {:.3}  code {:.3}  numeric {:.3}",
        s.token_kind_shares.word, s.token_kind_shares.code, s.token_kind_shares.numeric
    ))?;
    let max = s.length_histogram.values().copied().max().unwrap_or(0).max(1);
    for (start, count) in &s.length_histogram {
        let bar = "#".repeat((count * 40).div_ceil(max));
        ctx.line(format!(
            "{:>5}-{:<5} {count:>6} {bar}",
            start,
            start + s.bucket_width - 1
        ))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_parsing() {
        assert_eq!(parse_cutoffs("5, 20").unwrap(), [5, 20]);
        assert!(parse_cutoffs("5,0").is_err());
        assert!(parse_cutoffs("x").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["shiftsearch", "frobnicate"], &mut out, &mut err), 2);
        assert!(!err.is_empty());
        assert_eq!(run(["shiftsearch", "--help"], &mut out, &mut err), 0);
    }
}
