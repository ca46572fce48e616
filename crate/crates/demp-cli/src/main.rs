//! `demp`: analysis pipeline over coded review-meeting transcripts.
//!
//! Reports go to standard output; diagnostics go to standard error as
//! `severity:locator:message`. Exit status: 0 on success, 1 when the data
//! produced error-severity diagnostics, 2 on usage or input/output errors.
//! Identical inputs and flags produce byte-identical outputs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use demp_core::cluster::{cluster, Linkage};
use demp_core::lsa::{lsa, mine_configurations, windowed_counts, TransitionReport};
use demp_core::qoc::{extract_qoc, merged_dot, merged_json, QocGraph};
use demp_core::reliability::{
    cohen_kappa, pair_codings, perrault_leigh, ComparisonKey, ReliabilityError,
};
use demp_core::stats::{activity_distribution, level_distribution, subject_distribution};
use demp_core::table::{fmt_share, Table};
use demp_core::{
    analyze_transcript, normalize, parse_transcript, render_transcript, validate,
    AnalyzedMeeting, CriterionRegistry, Diagnostic, Sequence, Severity,
};

#[derive(Parser)]
#[command(name = "demp", version, about = "Coded review-meeting transcript analysis")]
struct Cli {
    /// Criterion registry config (letter = name, kind per line).
    #[arg(long, env = "DEMP_REGISTRY", global = true)]
    registry: Option<PathBuf>,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Include management sequences in statistics and stream analyses.
    #[arg(long, global = true)]
    include_management: bool,

    /// Seed for randomized test harnesses; every analysis command is
    /// deterministic and ignores it.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Dot,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StatsBy {
    Level,
    Activity,
    Subject,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum KappaKey {
    Activity,
    Code,
}

#[derive(Args)]
struct StreamArgs {
    /// Transition lag (events in between are skipped positions).
    #[arg(long, default_value_t = 1)]
    lag: usize,
    /// Two-tailed significance threshold.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check transcripts, reporting diagnostics.
    Validate { files: Vec<PathBuf> },
    /// Insert implicit introductions and print the canonical transcript.
    Normalize { file: PathBuf },
    /// Per-move level/rule/sequence table.
    Segment { file: PathBuf },
    /// Per-move table with the exchange column added.
    Exchanges { file: PathBuf },
    /// Distribution tables over the corpus.
    Stats {
        #[arg(long, value_enum)]
        by: StatsBy,
        /// Nesting level for activity/subject tables.
        #[arg(long)]
        level: Option<u32>,
        files: Vec<PathBuf>,
    },
    /// Lag sequential analysis over exchange streams.
    Lsa {
        #[command(flatten)]
        stream: StreamArgs,
        /// Report gapped co-occurrence counts within this window instead of
        /// lagged z scores.
        #[arg(long)]
        window: Option<usize>,
        files: Vec<PathBuf>,
    },
    /// Iterative configuration mining (analysis + rewriting cycles).
    Mine {
        #[command(flatten)]
        stream: StreamArgs,
        #[arg(long, default_value_t = 32)]
        max_cycles: usize,
        files: Vec<PathBuf>,
    },
    /// Hierarchical clustering of tokens by outgoing transition profiles.
    Cluster {
        #[command(flatten)]
        stream: StreamArgs,
        #[arg(long, default_value = "complete")]
        linkage: String,
        files: Vec<PathBuf>,
    },
    /// Inter-rater agreement between two codings of one meeting.
    Kappa {
        #[arg(long, value_enum, default_value_t = KappaKey::Activity)]
        key: KappaKey,
        file_a: PathBuf,
        file_b: PathBuf,
    },
    /// Design-rationale graphs per sequence.
    Qoc {
        /// Write one file per sequence here instead of a merged report.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        file: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: Option<String>,
}

impl Failure {
    fn data(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: Some(message.into()),
        }
    }

    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: Some(message.into()),
        }
    }

    fn silent(code: u8) -> Failure {
        Failure {
            code,
            message: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Some(m) = f.message {
                eprintln!("error:-:{m}");
            }
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::usage(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("reading {}: {e}", path.display())))
    }
}

fn load_registry(path: &Option<PathBuf>) -> Result<CriterionRegistry, Failure> {
    match path {
        None => Ok(CriterionRegistry::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::usage(format!("reading registry {}: {e}", p.display())))?;
            CriterionRegistry::from_config(&text)
                .map_err(|e| Failure::usage(format!("registry {}: {e}", p.display())))
        }
    }
}

fn emit_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

fn parse_file(path: &Path, registry: &CriterionRegistry) -> Result<demp_core::Transcript, Failure> {
    let text = read_input(path)?;
    parse_transcript(&text, registry)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn analyze_file(path: &Path, registry: &CriterionRegistry) -> Result<AnalyzedMeeting, Failure> {
    let t = parse_file(path, registry)?;
    match analyze_transcript(&t) {
        Ok(analyzed) => {
            emit_diagnostics(&analyzed.diagnostics);
            Ok(analyzed)
        }
        Err(demp_core::pipeline::AnalysisError::Invalid(diags)) => {
            emit_diagnostics(&diags);
            Err(Failure::silent(1))
        }
        Err(e) => Err(Failure::data(format!("{}: {e}", path.display()))),
    }
}

fn analyze_corpus(
    files: &[PathBuf],
    registry: &CriterionRegistry,
) -> Result<Vec<AnalyzedMeeting>, Failure> {
    if files.is_empty() {
        return Err(Failure::usage("no input files given"));
    }
    files.iter().map(|f| analyze_file(f, registry)).collect()
}

fn corpus_sequences(meetings: &[AnalyzedMeeting], include_management: bool) -> Vec<&Sequence> {
    meetings
        .iter()
        .flat_map(|m| m.selected_sequences(include_management))
        .map(|s| &s.sequence)
        .collect()
}

fn corpus_streams(meetings: &[AnalyzedMeeting], include_management: bool) -> Vec<Vec<String>> {
    meetings
        .iter()
        .flat_map(|m| m.exchange_streams(include_management))
        .collect()
}

fn print_table(table: &Table, format: Format) -> Result<(), Failure> {
    match format {
        Format::Csv => print!("{}", table.to_csv()),
        Format::Json => print!("{}", table.to_json()),
        Format::Dot => return Err(Failure::usage("this report has no dot form")),
    }
    Ok(())
}

/// The per-move annotation table; `with_exchanges` adds the exchange column
/// (labelled on the first move of each exchange, blank on continuations).
fn move_table(meeting: &AnalyzedMeeting, with_exchanges: bool) -> Table {
    let mut columns = vec!["rank", "speaker", "code"];
    if with_exchanges {
        columns.push("exchange");
    }
    columns.extend(["level", "rule", "sequence"]);
    let mut table = Table::new(&columns);

    for s in &meeting.sequences {
        let membership = s.classified.membership(s.sequence.moves.len());
        for (i, lm) in s.sequence.moves.iter().enumerate() {
            let mut row = vec![
                lm.coded.rank.to_string(),
                lm.coded.speaker.to_string(),
                lm.coded.code(),
            ];
            if with_exchanges {
                let label = membership[i]
                    .filter(|&x| s.classified.exchanges[x].members[0] == i)
                    .map(|x| s.classified.exchanges[x].kind.label().to_string())
                    .unwrap_or_default();
                row.push(label);
            }
            row.extend([
                lm.level.to_string(),
                lm.rule.label().to_string(),
                s.sequence.index.to_string(),
            ]);
            table.push_row(row);
        }
    }
    table
}

fn transition_json(report: &TransitionReport) -> serde_json::Value {
    json!({
        "alphabet": report.alphabet,
        "lag": report.lag,
        "alpha": report.alpha,
        "z_threshold": report.z_threshold,
        "min_expected": report.min_expected,
        "total_transitions": report.total_transitions,
        "degenerate": report.degenerate,
        "pairs": report.to_table().to_json_value(),
    })
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

fn run(cli: Cli) -> Result<(), Failure> {
    let registry = load_registry(&cli.registry)?;
    let format = cli.format;
    let include_management = cli.include_management;

    match cli.command {
        Command::Validate { files } => {
            if files.is_empty() {
                return Err(Failure::usage("no input files given"));
            }
            let mut failed = false;
            for file in &files {
                let t = parse_file(file, &registry)?;
                let diags = validate(&t);
                emit_diagnostics(&diags);
                failed |= diags.iter().any(|d| d.severity == Severity::Error);
            }
            if failed {
                return Err(Failure::silent(1));
            }
            Ok(())
        }

        Command::Normalize { file } => {
            let t = parse_file(&file, &registry)?;
            let normalized = normalize(&t);
            let diags = validate(&normalized);
            emit_diagnostics(&diags);
            print!("{}", render_transcript(&normalized));
            if diags.iter().any(|d| d.severity == Severity::Error) {
                return Err(Failure::silent(1));
            }
            Ok(())
        }

        Command::Segment { file } => {
            let meeting = analyze_file(&file, &registry)?;
            print_table(&move_table(&meeting, false), format)
        }

        Command::Exchanges { file } => {
            let meeting = analyze_file(&file, &registry)?;
            print_table(&move_table(&meeting, true), format)
        }

        Command::Stats { by, level, files } => {
            let meetings = analyze_corpus(&files, &registry)?;
            let seqs = corpus_sequences(&meetings, include_management);
            match by {
                StatsBy::Level => {
                    let d = level_distribution(&seqs).map_err(|e| Failure::data(e.to_string()))?;
                    match format {
                        Format::Json => {
                            print_json(&json!({
                                "dimension": d.table.dimension,
                                "scope": d.table.scope,
                                "rows": d.table.to_table().to_json_value(),
                                "move_word_correlation": d.move_word_correlation,
                            }));
                        }
                        _ => {
                            print_table(&d.table.to_table(), format)?;
                            let mut extra = Table::new(&["metric", "value"]);
                            extra.push_row(vec![
                                "move_word_correlation".into(),
                                d.move_word_correlation
                                    .map(fmt_share)
                                    .unwrap_or_else(|| "undefined".into()),
                            ]);
                            println!();
                            print_table(&extra, format)?;
                        }
                    }
                    Ok(())
                }
                StatsBy::Activity => {
                    let level =
                        level.ok_or_else(|| Failure::usage("--level is required with --by activity"))?;
                    let d = activity_distribution(&seqs, level)
                        .map_err(|e| Failure::data(e.to_string()))?;
                    match format {
                        Format::Json => {
                            let groups: BTreeMap<&str, f64> =
                                d.groups.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                            print_json(&json!({
                                "dimension": d.table.dimension,
                                "scope": d.table.scope,
                                "rows": d.table.to_table().to_json_value(),
                                "groups": groups,
                            }));
                        }
                        _ => {
                            print_table(&d.table.to_table(), format)?;
                            let mut extra = Table::new(&["group", "share"]);
                            for (g, share) in &d.groups {
                                extra.push_row(vec![g.clone(), fmt_share(*share)]);
                            }
                            println!();
                            print_table(&extra, format)?;
                        }
                    }
                    Ok(())
                }
                StatsBy::Subject => {
                    let level =
                        level.ok_or_else(|| Failure::usage("--level is required with --by subject"))?;
                    let d = subject_distribution(&seqs, level)
                        .map_err(|e| Failure::data(e.to_string()))?;
                    if format == Format::Json {
                        print_json(&json!({
                            "dimension": d.dimension,
                            "scope": d.scope,
                            "rows": d.to_table().to_json_value(),
                        }));
                        Ok(())
                    } else {
                        print_table(&d.to_table(), format)
                    }
                }
            }
        }

        Command::Lsa { stream, window, files } => {
            let meetings = analyze_corpus(&files, &registry)?;
            let streams = corpus_streams(&meetings, include_management);
            if let Some(window) = window {
                let (alphabet, counts) = windowed_counts(&streams, window);
                let mut table = Table::new(&["antecedent", "consequent", "count"]);
                for (a, row) in counts.iter().enumerate() {
                    for (b, &c) in row.iter().enumerate() {
                        table.push_row(vec![alphabet[a].clone(), alphabet[b].clone(), c.to_string()]);
                    }
                }
                return match format {
                    Format::Dot => Err(Failure::usage("windowed counts have no dot form")),
                    _ => print_table(&table, format),
                };
            }
            let report =
                lsa(&streams, stream.lag, stream.alpha).map_err(|e| Failure::usage(e.to_string()))?;
            match format {
                Format::Csv => print_table(&report.to_table(), format),
                Format::Json => {
                    print_json(&transition_json(&report));
                    Ok(())
                }
                Format::Dot => {
                    print!("{}", report.to_dot("transitions"));
                    Ok(())
                }
            }
        }

        Command::Mine { stream, max_cycles, files } => {
            let meetings = analyze_corpus(&files, &registry)?;
            let streams = corpus_streams(&meetings, include_management);
            let outcome = mine_configurations(&streams, stream.lag, stream.alpha, max_cycles)
                .map_err(|e| Failure::usage(e.to_string()))?;
            match format {
                Format::Csv => {
                    let mut table = Table::new(&["cycle", "left", "right", "replacement", "z"]);
                    for r in &outcome.grammar.rules {
                        table.push_row(vec![
                            r.cycle.to_string(),
                            r.left.clone(),
                            r.right.clone(),
                            r.replacement.clone(),
                            demp_core::table::fmt_stat(r.z),
                        ]);
                    }
                    print_table(&table, format)
                }
                Format::Json => {
                    print_json(&json!({
                        "grammar": outcome.grammar,
                        "terminal": transition_json(&outcome.report),
                    }));
                    Ok(())
                }
                Format::Dot => {
                    print!("{}", outcome.report.to_dot("configurations"));
                    Ok(())
                }
            }
        }

        Command::Cluster { stream, linkage, files } => {
            let linkage: Linkage = linkage.parse().map_err(Failure::usage)?;
            let meetings = analyze_corpus(&files, &registry)?;
            let streams = corpus_streams(&meetings, include_management);
            let report =
                lsa(&streams, stream.lag, stream.alpha).map_err(|e| Failure::data(e.to_string()))?;
            let dendrogram = cluster(&report, linkage).map_err(|e| Failure::data(e.to_string()))?;
            match format {
                Format::Json => {
                    let merges: Vec<serde_json::Value> = dendrogram
                        .merges
                        .iter()
                        .map(|m| {
                            json!({
                                "left": m.left,
                                "right": m.right,
                                "height": m.height,
                                "size": m.size,
                            })
                        })
                        .collect();
                    print_json(&json!({"leaves": dendrogram.leaves, "merges": merges}));
                    Ok(())
                }
                _ => print_table(&dendrogram.to_table(), format),
            }
        }

        Command::Kappa { key, file_a, file_b } => {
            let a = parse_file(&file_a, &registry)?;
            let b = parse_file(&file_b, &registry)?;
            let key = match key {
                KappaKey::Activity => ComparisonKey::Activity,
                KappaKey::Code => ComparisonKey::FullCode,
            };
            let (labels_a, labels_b) =
                pair_codings(&a, &b, key).map_err(|e| Failure::data(e.to_string()))?;
            // the full report carries both indices; with a single category
            // the Perrault-Leigh index is undefined and kappa alone remains
            let report = match perrault_leigh(&labels_a, &labels_b) {
                Ok(r) => r,
                Err(ReliabilityError::TooFewCategories(_)) => {
                    cohen_kappa(&labels_a, &labels_b).map_err(|e| Failure::data(e.to_string()))?
                }
                Err(e) => return Err(Failure::data(e.to_string())),
            };
            if format == Format::Json {
                print_json(&serde_json::to_value(&report).expect("report serializes"));
                Ok(())
            } else {
                print_table(&report.to_table(), format)
            }
        }

        Command::Qoc { out_dir, file } => {
            let meeting = analyze_file(&file, &registry)?;
            let graphs: Vec<QocGraph> = meeting
                .selected_sequences(include_management)
                .into_iter()
                .map(|s| extract_qoc(&s.sequence, &registry))
                .collect();
            for g in &graphs {
                emit_diagnostics(&g.diagnostics);
            }
            match out_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir)
                        .map_err(|e| Failure::usage(format!("creating {}: {e}", dir.display())))?;
                    let ext = match format {
                        Format::Dot => "dot",
                        Format::Json => "json",
                        Format::Csv => {
                            return Err(Failure::usage("qoc exports are dot or json"));
                        }
                    };
                    for g in &graphs {
                        let body = match format {
                            Format::Dot => g.to_dot(),
                            _ => g.to_json(),
                        };
                        let path = dir.join(format!("qoc_seq{}.{ext}", g.sequence_index));
                        fs::write(&path, body).map_err(|e| {
                            Failure::usage(format!("writing {}: {e}", path.display()))
                        })?;
                    }
                    Ok(())
                }
                None => match format {
                    Format::Dot => {
                        print!("{}", merged_dot(&graphs));
                        Ok(())
                    }
                    Format::Json => {
                        print!("{}", merged_json(&graphs));
                        Ok(())
                    }
                    Format::Csv => Err(Failure::usage("qoc exports are dot or json")),
                },
            }
        }
    }
}
