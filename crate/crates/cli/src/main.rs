//! `t2t`: command-line front end for the toolkit. Machine-readable JSON on
//! stdout, diagnostics on stderr. Exit codes: 0 success, 1 usage error,
//! 2 data error. All randomness flows from the global `--seed` flag.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use t2t_core::arch::{param_breakdown, Family};
use t2t_core::corruption::{corrupt, doc_rng, CorruptionConfig};
use t2t_core::metrics::{
    ar_score, bleu_multi_reference, f1_binary, rouge, BleuOptions, EvalSummary,
};
use t2t_core::summarization::{
    adaptive_lead_baseline, dataset_stats, human_upper_bound, lead_baseline, trimming_coverage,
    SummaryGroup,
};
use t2t_core::tasks::{self, ArchitectureStyle, TaskRecord};
use t2t_core::tokenizer::Vocab;
use t2t_core::transfer::{transfer_embeddings, EmbeddingMatrix};
use t2t_core::tuning::{geometric_search, GeometricSearchConfig};

const SCHEMA: &str = "t2t/v1";

#[derive(Parser)]
#[command(name = "t2t", version, about = "Text-to-text benchmark toolkit")]
struct Cli {
    /// Seed for all randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Suppress warnings on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    /// Force machine-readable JSON output (the default; accepted for
    /// explicitness).
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenizer operations.
    Tok {
        #[command(subcommand)]
        command: TokCommand,
    },
    /// Transfer an embedding matrix onto another vocabulary.
    Transfer(TransferArgs),
    /// Generate span-corruption denoising pairs from token-id JSONL.
    Corrupt(CorruptArgs),
    /// Task formatting and the built-in spec registry.
    Tasks {
        #[command(subcommand)]
        command: TasksCommand,
    },
    /// Score predictions against references.
    Evaluate(EvaluateArgs),
    /// Summarization baselines, upper bounds and dataset statistics.
    Summ {
        #[command(subcommand)]
        command: SummCommand,
    },
    /// Trainable-parameter accounting for the benchmark model families.
    Params(ParamsArgs),
    /// Geometric learning-rate search over a shell-command objective.
    Lrsearch(LrsearchArgs),
}

#[derive(Subcommand)]
enum TokCommand {
    /// Encode stdin (one record per line) into token ids or pieces.
    Encode(TokEncodeArgs),
}

#[derive(Args)]
struct TokEncodeArgs {
    /// Vocabulary TSV (piece<TAB>score per line, line index = id).
    #[arg(long)]
    vocab: PathBuf,

    /// Emit token ids (default).
    #[arg(long, conflicts_with = "pieces")]
    ids: bool,

    /// Emit piece strings instead of ids.
    #[arg(long)]
    pieces: bool,
}

#[derive(Args)]
struct TransferArgs {
    #[arg(long)]
    src_vocab: PathBuf,
    #[arg(long)]
    src_emb: PathBuf,
    #[arg(long)]
    tgt_vocab: PathBuf,
    /// Output embedding matrix path.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON transfer report with per-piece provenance.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CorruptArgs {
    #[arg(long)]
    vocab: PathBuf,
    /// Fraction of tokens to corrupt.
    #[arg(long, default_value_t = 0.15)]
    rate: f64,
    /// Mean tokens per corrupted span.
    #[arg(long, default_value_t = 3.0)]
    mean_span: f64,
}

#[derive(Subcommand)]
enum TasksCommand {
    /// Print the classification task registry as JSON for auditing.
    DumpSpecs,
    /// Format JSONL task records from stdin into (source, target) pairs.
    Format(TasksFormatArgs),
}

#[derive(Args)]
struct TasksFormatArgs {
    /// Append the decoder-only separator to every source.
    #[arg(long)]
    decoder_only: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Metric {
    Rouge,
    Bleu,
    Accuracy,
    F1,
    Ar,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, value_enum)]
    metric: Metric,
    /// Predictions, one per line.
    #[arg(long)]
    preds: PathBuf,
    /// References, one per line.
    #[arg(long, conflicts_with = "multi_ref")]
    refs: Option<PathBuf>,
    /// Multi-reference JSONL: {"refs": [...]} per line.
    #[arg(long)]
    multi_ref: Option<PathBuf>,
    /// Positive label for the F1 metric.
    #[arg(long)]
    positive_label: Option<String>,
    /// Include per-example scores in the report.
    #[arg(long)]
    per_example: bool,
    /// Epsilon smoothing for BLEU n-gram orders with zero matches
    /// (unsmoothed by default).
    #[arg(long)]
    smoothing_epsilon: Option<f64>,
}

#[derive(Subcommand)]
enum SummCommand {
    /// Lead-n or adaptive-n extractive baseline.
    Baseline(SummBaselineArgs),
    /// Pairwise inter-reference ROUGE (human upper bound).
    Upperbound(SummUpperboundArgs),
    /// Dataset statistics: lengths, compression ratio, abstractedness.
    Stats(SummStatsArgs),
}

#[derive(Args)]
struct SummBaselineArgs {
    /// Summary groups JSONL.
    #[arg(long)]
    input: PathBuf,
    /// Copy the first N sentences.
    #[arg(long, conflicts_with = "adaptive")]
    lead_n: Option<usize>,
    /// Choose the sentence count that best matches the average target
    /// length.
    #[arg(long)]
    adaptive: bool,
    /// Average target length in characters for the adaptive baseline;
    /// computed from the references when omitted.
    #[arg(long)]
    avg_target_len: Option<f64>,
    /// Score candidates with ROUGE against every reference.
    #[arg(long)]
    score: bool,
    /// Also write the aggregate ROUGE row as TSV.
    #[arg(long)]
    tsv: Option<PathBuf>,
    /// Include per-group candidates in the report.
    #[arg(long)]
    emit_candidates: bool,
}

#[derive(Args)]
struct SummUpperboundArgs {
    #[arg(long)]
    input: PathBuf,
    /// Only pair references sharing a ratio tag.
    #[arg(long)]
    same_ratio: bool,
    #[arg(long)]
    tsv: Option<PathBuf>,
}

#[derive(Args)]
struct SummStatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Vocabulary for trimming coverage.
    #[arg(long, requires = "limit")]
    vocab: Option<PathBuf>,
    /// Token limit for trimming coverage.
    #[arg(long, requires = "vocab")]
    limit: Option<usize>,
    #[arg(long)]
    tsv: Option<PathBuf>,
}

#[derive(Args)]
struct ParamsArgs {
    /// Model size: small, base or large.
    #[arg(long, value_parser = clap::builder::ValueParser::new(|s: &str| s.parse::<Family>()),
          required_unless_present = "config", conflicts_with = "config")]
    family: Option<Family>,
    /// Vocabulary size.
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    vocab: Option<u64>,
    /// Tie the output head to the input embedding.
    #[arg(long, conflicts_with = "config")]
    tied: bool,
    /// Use a 2-matrix feed-forward block instead of the gated 3-matrix one.
    #[arg(long, conflicts_with = "config")]
    ungated: bool,
    /// Load the full architecture config from a JSON file instead.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct LrsearchArgs {
    #[arg(long, default_value_t = 4e-4)]
    start: f64,
    #[arg(long, default_value_t = 2.0)]
    factor: f64,
    #[arg(long, default_value_t = 32)]
    max_probes: usize,
    /// Shell command receiving the candidate as its last argument; its
    /// last stdout line must be the score (higher is better).
    #[arg(long)]
    cmd: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        seed: cli.seed,
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Tok { command } => match command {
            TokCommand::Encode(args) => tok_encode(args),
        },
        Command::Transfer(args) => transfer(args),
        Command::Corrupt(args) => corrupt_stream(&ctx, args),
        Command::Tasks { command } => match command {
            TasksCommand::DumpSpecs => {
                print!("{}", tasks::dump_registry_json());
                Ok(())
            }
            TasksCommand::Format(args) => tasks_format(args),
        },
        Command::Evaluate(args) => evaluate(args),
        Command::Summ { command } => match command {
            SummCommand::Baseline(args) => summ_baseline(&ctx, args),
            SummCommand::Upperbound(args) => summ_upperbound(&ctx, args),
            SummCommand::Stats(args) => summ_stats(args),
        },
        Command::Params(args) => params(args),
        Command::Lrsearch(args) => lrsearch(args),
    }
}

struct Ctx {
    seed: u64,
    quiet: bool,
}

impl Ctx {
    fn warn(&self, msg: &str) {
        if !self.quiet {
            eprintln!("warning: {msg}");
        }
    }
}

fn load_vocab(path: &PathBuf) -> Result<Vocab> {
    Vocab::load(path).with_context(|| format!("loading vocabulary {}", path.display()))
}

fn read_lines(path: &PathBuf) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn stdout_line(value: &impl Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

// ---------------------------------------------------------------- tok ----

#[derive(Serialize)]
#[serde(untagged)]
enum EncodedLine {
    Ids { ids: Vec<u32> },
    Pieces { pieces: Vec<String> },
}

fn tok_encode(args: TokEncodeArgs) -> Result<()> {
    let vocab = load_vocab(&args.vocab)?;
    let stdin = io::stdin().lock();
    for line in stdin.lines() {
        let line = line?;
        let record = if args.pieces {
            EncodedLine::Pieces {
                pieces: vocab.segment(&line).pieces,
            }
        } else {
            EncodedLine::Ids {
                ids: vocab.encode(&line).ids,
            }
        };
        stdout_line(&record)?;
    }
    Ok(())
}

// ----------------------------------------------------------- transfer ----

#[derive(Serialize)]
struct TransferSummary {
    schema: &'static str,
    copied: usize,
    averaged: usize,
    fallback: usize,
    rows: usize,
    cols: usize,
}

#[derive(Serialize)]
struct TransferReportOut<'a> {
    #[serde(flatten)]
    summary: &'a TransferSummary,
    provenance: &'a [t2t_core::transfer::Provenance],
}

fn transfer(args: TransferArgs) -> Result<()> {
    let src_vocab = load_vocab(&args.src_vocab)?;
    let tgt_vocab = load_vocab(&args.tgt_vocab)?;
    let src_emb = EmbeddingMatrix::read_file(&args.src_emb)
        .with_context(|| format!("reading {}", args.src_emb.display()))?;
    let (out, report) = transfer_embeddings(&src_vocab, &src_emb, &tgt_vocab)?;
    out.write_file(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    let summary = TransferSummary {
        schema: SCHEMA,
        copied: report.copied,
        averaged: report.averaged,
        fallback: report.fallback,
        rows: out.rows(),
        cols: out.cols(),
    };
    if let Some(path) = &args.report {
        let mut file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(
            &mut file,
            &TransferReportOut {
                summary: &summary,
                provenance: &report.provenance,
            },
        )?;
        file.write_all(b"\n")?;
    }
    stdout_line(&summary)
}

// ------------------------------------------------------------ corrupt ----

#[derive(Deserialize)]
struct IdsLine {
    ids: Vec<u32>,
}

#[derive(Serialize)]
struct PairLine<'a> {
    input: &'a [u32],
    target: &'a [u32],
}

fn corrupt_stream(ctx: &Ctx, args: CorruptArgs) -> Result<()> {
    let vocab = load_vocab(&args.vocab)?;
    let cfg = CorruptionConfig::new(args.rate, args.mean_span, ctx.seed)?;
    let stdin = io::stdin().lock();
    for (index, line) in stdin.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: IdsLine = serde_json::from_str(&line)
            .with_context(|| format!("line {}: expected {{\"ids\": [...]}}", index + 1))?;
        let mut rng = doc_rng(cfg.seed, index as u64);
        let pair = corrupt(&cfg, &record.ids, &vocab, &mut rng)
            .with_context(|| format!("line {}", index + 1))?;
        stdout_line(&PairLine {
            input: &pair.input_ids,
            target: &pair.target_ids,
        })?;
    }
    Ok(())
}

// -------------------------------------------------------------- tasks ----

fn tasks_format(args: TasksFormatArgs) -> Result<()> {
    let stdin = io::stdin().lock();
    for (index, line) in stdin.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TaskRecord = serde_json::from_str(&line)
            .with_context(|| format!("line {}: bad task record", index + 1))?;
        let mut spec = tasks::find(&record.task)?;
        if args.decoder_only {
            spec = spec.with_style(ArchitectureStyle::DecoderOnly);
        }
        let formatted = tasks::format_example(
            &spec,
            &record.text1,
            record.text2.as_deref(),
            &record.target,
        )
        .with_context(|| format!("line {}", index + 1))?;
        stdout_line(&formatted)?;
    }
    Ok(())
}

// ----------------------------------------------------------- evaluate ----

#[derive(Deserialize)]
struct RefsLine {
    refs: Vec<String>,
}

#[derive(Serialize)]
struct EvalReport {
    schema: &'static str,
    #[serde(flatten)]
    summary: EvalSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<serde_json::Value>,
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let preds = read_lines(&args.preds)?;
    let multi = args.multi_ref.is_some();
    let reference_sets: Vec<Vec<String>> = if let Some(path) = &args.multi_ref {
        read_lines(path)?
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                let parsed: RefsLine = serde_json::from_str(l)
                    .with_context(|| format!("line {}: expected {{\"refs\": [...]}}", i + 1))?;
                if parsed.refs.is_empty() {
                    bail!("line {}: empty reference set", i + 1);
                }
                Ok(parsed.refs)
            })
            .collect::<Result<_>>()?
    } else {
        let path = args
            .refs
            .as_ref()
            .ok_or_else(|| anyhow!("either --refs or --multi-ref is required"))?;
        read_lines(path)?.into_iter().map(|r| vec![r]).collect()
    };
    if preds.len() != reference_sets.len() {
        bail!(
            "prediction and reference counts differ: {} vs {}",
            preds.len(),
            reference_sets.len()
        );
    }
    if preds.is_empty() {
        bail!("metric undefined on empty input");
    }

    let report = match args.metric {
        Metric::Rouge => {
            let mut scores = Vec::with_capacity(preds.len());
            let mut sums = [0.0f64; 3];
            for (p, refs) in preds.iter().zip(&reference_sets) {
                // Against multiple references, keep the best-scoring one.
                let best = refs
                    .iter()
                    .map(|r| rouge(p, r))
                    .max_by(|a, b| a.mean_f.partial_cmp(&b.mean_f).expect("finite"))
                    .expect("nonempty");
                sums[0] += best.rouge1.fmeasure;
                sums[1] += best.rouge2.fmeasure;
                sums[2] += best.rouge_l.fmeasure;
                scores.push(best.mean_f);
            }
            let n = scores.len() as f64;
            let detail = serde_json::json!({
                "rouge1_f": sums[0] / n,
                "rouge2_f": sums[1] / n,
                "rouge_l_f": sums[2] / n,
            });
            EvalReport {
                schema: SCHEMA,
                summary: EvalSummary::from_scores("rouge", scores, args.per_example),
                detail: Some(detail),
            }
        }
        Metric::Bleu => {
            let options = BleuOptions {
                smoothing_epsilon: args.smoothing_epsilon,
            };
            let score = bleu_multi_reference(&preds, &reference_sets, options)?;
            EvalReport {
                schema: SCHEMA,
                summary: EvalSummary::corpus("bleu", score, preds.len()),
                detail: None,
            }
        }
        Metric::Accuracy => {
            // Exact match after whitespace trimming; any reference counts.
            let scores: Vec<f64> = preds
                .iter()
                .zip(&reference_sets)
                .map(|(p, refs)| {
                    if refs.iter().any(|r| p.trim() == r.trim()) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            EvalReport {
                schema: SCHEMA,
                summary: EvalSummary::from_scores("accuracy", scores, args.per_example),
                detail: None,
            }
        }
        Metric::F1 => {
            if multi {
                bail!("--multi-ref is not supported for the f1 metric");
            }
            let positive = args
                .positive_label
                .as_deref()
                .ok_or_else(|| anyhow!("--positive-label is required for the f1 metric"))?;
            let refs: Vec<&String> = reference_sets.iter().map(|s| &s[0]).collect();
            let score = f1_binary(&preds, &refs, positive)?;
            EvalReport {
                schema: SCHEMA,
                summary: EvalSummary::corpus("f1", score, preds.len()),
                detail: None,
            }
        }
        Metric::Ar => {
            if multi {
                bail!("--multi-ref is not supported for the ar metric");
            }
            let refs: Vec<&String> = reference_sets.iter().map(|s| &s[0]).collect();
            let score = ar_score(&preds, &refs)?;
            EvalReport {
                schema: SCHEMA,
                summary: EvalSummary::corpus("ar", score, preds.len()),
                detail: None,
            }
        }
    };
    stdout_line(&report)
}

// --------------------------------------------------------------- summ ----

fn read_groups(path: &PathBuf) -> Result<Vec<SummaryGroup>> {
    read_lines(path)?
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).with_context(|| format!("line {}: bad summary group", i + 1))
        })
        .collect()
}

#[derive(Serialize)]
struct RougeRow {
    rouge1_f: f64,
    rouge2_f: f64,
    rouge_l_f: f64,
    mean_f: f64,
}

fn write_rouge_tsv(path: &PathBuf, row: &RougeRow) -> Result<()> {
    let out = format!(
        "rouge1\trouge2\trouge_l\tmean\n{}\t{}\t{}\t{}\n",
        row.rouge1_f, row.rouge2_f, row.rouge_l_f, row.mean_f
    );
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Mean ROUGE f-measures of each candidate against every reference of its
/// group; every (candidate, reference) pair contributes one example.
fn score_candidates(groups: &[SummaryGroup], candidates: &[String]) -> RougeRow {
    let mut sums = [0.0f64; 4];
    let mut n = 0usize;
    for (group, cand) in groups.iter().zip(candidates) {
        for reference in &group.references {
            let s = rouge(cand, &reference.text);
            sums[0] += s.rouge1.fmeasure;
            sums[1] += s.rouge2.fmeasure;
            sums[2] += s.rouge_l.fmeasure;
            sums[3] += s.mean_f;
            n += 1;
        }
    }
    let d = n.max(1) as f64;
    RougeRow {
        rouge1_f: sums[0] / d,
        rouge2_f: sums[1] / d,
        rouge_l_f: sums[2] / d,
        mean_f: sums[3] / d,
    }
}

#[derive(Serialize)]
struct CandidateRow {
    id: String,
    candidate: String,
}

#[derive(Serialize)]
struct BaselineReport {
    schema: &'static str,
    baseline: String,
    groups: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    avg_target_len: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rouge: Option<RougeRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidates: Option<Vec<CandidateRow>>,
}

fn summ_baseline(ctx: &Ctx, args: SummBaselineArgs) -> Result<()> {
    let groups = read_groups(&args.input)?;
    if groups.is_empty() {
        bail!("no summary groups in {}", args.input.display());
    }
    let (name, avg_target_len, candidates) = if args.adaptive {
        let avg = match args.avg_target_len {
            Some(v) => v,
            None => {
                let (sum, n) = groups
                    .iter()
                    .flat_map(|g| &g.references)
                    .map(|r| r.text.chars().count())
                    .fold((0usize, 0usize), |(s, n), l| (s + l, n + 1));
                if n == 0 {
                    bail!("cannot derive --avg-target-len: no references");
                }
                sum as f64 / n as f64
            }
        };
        let candidates = groups
            .iter()
            .map(|g| adaptive_lead_baseline(&g.source, avg))
            .collect::<Result<Vec<_>, _>>()?;
        ("adaptive".to_string(), Some(avg), candidates)
    } else {
        let n = args.lead_n.unwrap_or(3);
        let candidates = groups
            .iter()
            .map(|g| lead_baseline(&g.source, n))
            .collect::<Result<Vec<_>, _>>()?;
        (format!("lead-{n}"), None, candidates)
    };

    let rouge_agg = if args.score {
        Some(score_candidates(&groups, &candidates))
    } else {
        None
    };
    match (&args.tsv, &rouge_agg) {
        (Some(path), Some(row)) => write_rouge_tsv(path, row)?,
        (Some(_), None) => ctx.warn("--tsv without --score writes nothing"),
        _ => {}
    }

    stdout_line(&BaselineReport {
        schema: SCHEMA,
        baseline: name,
        groups: groups.len(),
        avg_target_len,
        rouge: rouge_agg,
        candidates: if args.emit_candidates {
            Some(
                groups
                    .iter()
                    .zip(candidates)
                    .map(|(g, candidate)| CandidateRow {
                        id: g.id.clone(),
                        candidate,
                    })
                    .collect(),
            )
        } else {
            None
        },
    })
}

#[derive(Serialize)]
struct UpperBoundReport {
    schema: &'static str,
    pairs: usize,
    skipped_groups: usize,
    same_ratio: bool,
    rouge: RougeRow,
}

fn summ_upperbound(ctx: &Ctx, args: SummUpperboundArgs) -> Result<()> {
    let groups = read_groups(&args.input)?;
    let ub = human_upper_bound(&groups, args.same_ratio)?;
    if ub.skipped_groups > 0 {
        ctx.warn(&format!(
            "{} group(s) skipped with fewer than two usable references",
            ub.skipped_groups
        ));
    }
    let row = RougeRow {
        rouge1_f: ub.score.rouge1.fmeasure,
        rouge2_f: ub.score.rouge2.fmeasure,
        rouge_l_f: ub.score.rouge_l.fmeasure,
        mean_f: ub.score.mean_f,
    };
    if let Some(path) = &args.tsv {
        write_rouge_tsv(path, &row)?;
    }
    stdout_line(&UpperBoundReport {
        schema: SCHEMA,
        pairs: ub.pairs,
        skipped_groups: ub.skipped_groups,
        same_ratio: args.same_ratio,
        rouge: row,
    })
}

#[derive(Serialize)]
struct StatsReport {
    schema: &'static str,
    #[serde(flatten)]
    stats: t2t_core::DatasetStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    trimming_coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    token_limit: Option<usize>,
}

fn summ_stats(args: SummStatsArgs) -> Result<()> {
    let groups = read_groups(&args.input)?;
    let stats = dataset_stats(&groups)?;
    let coverage = match (&args.vocab, args.limit) {
        (Some(vocab_path), Some(limit)) => {
            let vocab = load_vocab(vocab_path)?;
            Some(trimming_coverage(&groups, &vocab, limit)?)
        }
        _ => None,
    };
    if let Some(path) = &args.tsv {
        let mut out = String::from("stat\tvalue\n");
        out.push_str(&format!("groups\t{}\n", stats.groups));
        out.push_str(&format!("references\t{}\n", stats.references));
        out.push_str(&format!("avg_source_len\t{}\n", stats.avg_source_len));
        out.push_str(&format!("avg_target_len\t{}\n", stats.avg_target_len));
        out.push_str(&format!("compression_ratio\t{}\n", stats.compression_ratio));
        for (n, v) in &stats.abstractedness {
            out.push_str(&format!("abstractedness_{n}gram\t{v}\n"));
        }
        if let Some(c) = coverage {
            out.push_str(&format!("trimming_coverage\t{c}\n"));
        }
        fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    }
    stdout_line(&StatsReport {
        schema: SCHEMA,
        stats,
        trimming_coverage: coverage,
        token_limit: args.limit,
    })
}

// ------------------------------------------------------------- params ----

#[derive(Serialize)]
struct ParamsReport {
    schema: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<Family>,
    config: t2t_core::ArchConfig,
    breakdown: t2t_core::ParamBreakdown,
}

fn params(args: ParamsArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing architecture config {}", path.display()))?
        }
        None => {
            let family = args.family.expect("required by clap");
            let mut config = family.config(args.vocab.expect("required by clap"));
            config.tied_lm_head = args.tied;
            config.gated_ffn = !args.ungated;
            config
        }
    };
    stdout_line(&ParamsReport {
        schema: SCHEMA,
        family: args.family,
        config,
        breakdown: param_breakdown(&config),
    })
}

// ----------------------------------------------------------- lrsearch ----

#[derive(Serialize)]
struct LrsearchReport {
    schema: &'static str,
    best: f64,
    probes: Vec<t2t_core::tuning::ProbeRecord>,
}

fn lrsearch(args: LrsearchArgs) -> Result<()> {
    let cfg = GeometricSearchConfig {
        start: args.start,
        factor: args.factor,
        max_probes: args.max_probes,
    };
    let mut failure: Option<anyhow::Error> = None;
    let objective = |candidate: f64| -> f64 {
        match run_objective_command(&args.cmd, candidate) {
            Ok(score) => score,
            Err(err) => {
                failure = Some(err);
                f64::NAN
            }
        }
    };
    let result = geometric_search(&cfg, objective);
    if let Some(err) = failure {
        return Err(err);
    }
    let (best, probes) = result?;
    stdout_line(&LrsearchReport {
        schema: SCHEMA,
        best,
        probes,
    })
}

/// Run `sh -c "<cmd> <candidate>"` and parse the last non-empty stdout
/// line as the score.
fn run_objective_command(cmd: &str, candidate: f64) -> Result<f64> {
    let output = std::process::Command::new("sh")
        .arg("-c")
        .arg(format!("{cmd} {candidate}"))
        .output()
        .with_context(|| format!("running objective command for candidate {candidate}"))?;
    if !output.status.success() {
        bail!(
            "objective command failed for candidate {candidate}: {}",
            String::from_utf8_lossy(&output.stderr).trim()
        );
    }
    let stdout = String::from_utf8_lossy(&output.stdout);
    let last = stdout
        .lines()
        .rev()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| anyhow!("objective command printed no score for {candidate}"))?;
    last.trim()
        .parse::<f64>()
        .with_context(|| format!("parsing score {last:?} for candidate {candidate}"))
}
