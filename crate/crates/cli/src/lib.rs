//! Command-line surface over `vindex-core`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error, 3 numerical
//! failure. Reports go to `--output` or standard output; diagnostics go to
//! standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vindex_core::align::gradcheck::{run_gradcheck, GradcheckConfig};
use vindex_core::align::{make_synthetic_task, train, Conditioning, MaskMode};
use vindex_core::caption::{split_sentences, RuleParser, SynonymLexicon, TupleSet};
use vindex_core::features::{aggregate_layers, interleave, select_nf_level, FeatureSpace, LayerStack};
use vindex_core::grounding::{category_report_with, ThresholdRule};
use vindex_core::io::jsonl::{
    load_caption_pairs, load_feature_tensors, load_grounding_items, load_qa_items, load_qa_responses,
    load_tuple_records,
};
use vindex_core::io::report::{CaptionSection, SqaSection, TrainingSection, TransformSection};
use vindex_core::io::{
    load_embedding_table, load_lexicon, load_train_config, read_tensor_bytes, resolve_seed, write_tensor, EvalReport,
    SEED_ENV, TENSOR_MAGIC,
};
use vindex_core::matching::{corpus_report, Aggregation, AttributePairing, EmbeddingTable, MatchConfig};
use vindex_core::sqa::{score_text, validate_qa_set};
use vindex_core::{Error, FeatureGrid, Seed};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "vindex", version, about = "Brain-decoding evaluation and feature alignment toolkit")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Seed; overrides the config file and the VINDEX_SEED variable.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Semantic cosine threshold (eval-caption) or IoU threshold m (eval-grounding).
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Record wall-clock runtime in the report (breaks byte-identity across runs).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract tuple records from captions, one caption per line.
    Parse {
        #[arg(long)]
        input: PathBuf,
        /// Lexicon whose multiword terms are kept as compounds.
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Score candidate captions against references.
    EvalCaption {
        /// caption-pair JSONL.
        #[arg(long, conflicts_with_all = ["candidates", "references"])]
        pairs: Option<PathBuf>,
        /// tuple-record JSONL, paired with --references line by line.
        #[arg(long, requires = "references")]
        candidates: Option<PathBuf>,
        #[arg(long, requires = "candidates")]
        references: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = AggregationArg::Micro)]
        aggregation: AggregationArg,
        #[arg(long, value_enum, default_value_t = PairingArg::ObjectFirst)]
        attribute_pairing: PairingArg,
    },
    /// Grounding accuracy and mean IoU by salience category.
    EvalGrounding {
        #[arg(long)]
        items: PathBuf,
        /// Count IoU equal to the threshold as a hit.
        #[arg(long)]
        inclusive: bool,
    },
    /// Salient question answering accuracy.
    EvalSqa {
        #[arg(long)]
        items: PathBuf,
        #[arg(long)]
        responses: PathBuf,
    },
    /// Convert feature tensors into one of the four feature spaces.
    Transform {
        /// Binary tensor or feature-tensor JSONL; repeat for several layers.
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long, value_parser = ["1", "9", "36", "144", "576"])]
        nf_level: Option<String>,
        /// Layer groups for the aggregated space.
        #[arg(long, default_value_t = 2)]
        groups: usize,
        /// Write the transformed tensor here in binary form.
        #[arg(long)]
        tensor_out: Option<PathBuf>,
    },
    /// Train the brain encoder with the masked denoising objective on the synthetic task.
    TrainAlign {
        /// JSON training config; missing fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Finite-difference check of every encoder and denoiser gradient.
    Gradcheck {
        #[arg(long, value_enum, default_value_t = ConditioningArg::Pooled)]
        conditioning: ConditioningArg,
        #[arg(long, value_enum, default_value_t = MaskModeArg::Replace)]
        mask_mode: MaskModeArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AggregationArg {
    Micro,
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PairingArg {
    ObjectFirst,
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    Se,
    Me,
    Af,
    Nf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConditioningArg {
    Pooled,
    PerToken,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MaskModeArg {
    Replace,
    KeepVisible,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    /// Completed, but the numerical check failed; the report is still written.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Core(_) => EXIT_DATA,
            CliError::Failed(_) => EXIT_NUMERICAL,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("vindex: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let started = Instant::now();
    let g = &cli.global;
    let env_seed = std::env::var(SEED_ENV).ok();
    let seed_for = |config_seed: u64| -> CliResult<u64> {
        resolve_seed(config_seed, env_seed.as_deref(), g.seed).map_err(|e| CliError::Usage(e.to_string()))
    };

    let mut failure = None;
    let mut report = match &cli.command {
        Command::Parse { input, lexicon } => {
            if g.format == Format::Csv {
                return Err(CliError::Usage("parse writes JSONL; --format csv is not supported".into()));
            }
            return run_parse(input, lexicon.as_deref(), g.output.as_deref());
        }
        Command::EvalCaption {
            pairs,
            candidates,
            references,
            lexicon,
            embeddings,
            aggregation,
            attribute_pairing,
        } => {
            let mut report = EvalReport::new("eval-caption");
            let lex = match lexicon {
                Some(p) => {
                    digest(&mut report, "lexicon", p)?;
                    load_lexicon(p)?.lexicon
                }
                None => SynonymLexicon::new(),
            };
            let table = match embeddings {
                Some(p) => {
                    digest(&mut report, "embeddings", p)?;
                    load_embedding_table(p)?
                }
                None => EmbeddingTable::empty(),
            };
            let tuple_pairs = match (pairs, candidates, references) {
                (Some(p), _, _) => {
                    digest(&mut report, "pairs", p)?;
                    let parser = RuleParser::with_lexicon(&lex);
                    load_caption_pairs(p)?
                        .iter()
                        .map(|cp| (cp.candidate.to_tuples(&parser), cp.reference.to_tuples(&parser)))
                        .collect::<Vec<_>>()
                }
                (None, Some(c), Some(r)) => {
                    digest(&mut report, "candidates", c)?;
                    digest(&mut report, "references", r)?;
                    zip_records(load_tuple_records(c)?, load_tuple_records(r)?)?
                }
                _ => return Err(CliError::Usage("eval-caption needs --pairs or --candidates/--references".into())),
            };
            let threshold = g.threshold.unwrap_or(vindex_core::matching::DEFAULT_SEMANTIC_THRESHOLD);
            if !(0.0..=1.0).contains(&threshold) {
                return Err(CliError::Usage(format!("--threshold {threshold} is outside [0, 1]")));
            }
            let config = MatchConfig {
                threshold,
                attribute_pairing: match attribute_pairing {
                    PairingArg::ObjectFirst => AttributePairing::ObjectFirst,
                    PairingArg::Independent => AttributePairing::Independent,
                },
                aggregation: match aggregation {
                    AggregationArg::Micro => Aggregation::Micro,
                    AggregationArg::Macro => Aggregation::Macro,
                },
            };
            let rep = corpus_report(&tuple_pairs, &lex, &table, config)?;
            report.caption = Some(CaptionSection {
                n_pairs: tuple_pairs.len(),
                threshold,
                report: rep,
            });
            report
        }
        Command::EvalGrounding { items, inclusive } => {
            let mut report = EvalReport::new("eval-grounding");
            digest(&mut report, "items", items)?;
            let m = g.threshold.unwrap_or(0.5);
            if !(0.0..=1.0).contains(&m) {
                return Err(CliError::Usage(format!("--threshold {m} is outside [0, 1]")));
            }
            let rule = if *inclusive { ThresholdRule::Inclusive } else { ThresholdRule::Strict };
            report.grounding = Some(category_report_with(&load_grounding_items(items)?, m, rule)?);
            report
        }
        Command::EvalSqa { items, responses } => {
            let mut report = EvalReport::new("eval-sqa");
            digest(&mut report, "items", items)?;
            digest(&mut report, "responses", responses)?;
            let set = validate_qa_set(load_qa_items(items)?)?;
            let resp = load_qa_responses(responses)?;
            if resp.len() != set.items.len() {
                return Err(Error::shape(format!("{} QA items but {} responses", set.items.len(), resp.len())).into());
            }
            for (i, (item, r)) in set.items.iter().zip(&resp).enumerate() {
                if let (Some(a), Some(b)) = (&item.id, &r.id) {
                    if a != b {
                        return Err(Error::format(Some(i + 1), format!("response id `{b}` does not match item id `{a}`")).into());
                    }
                }
            }
            let texts: Vec<String> = resp.into_iter().map(|r| r.response).collect();
            let score = score_text(&set.items, &texts)?;
            report.sqa = Some(SqaSection {
                warnings: set.warnings,
                score,
            });
            report
        }
        Command::Transform {
            input,
            space,
            nf_level,
            groups,
            tensor_out,
        } => {
            let mut report = EvalReport::new("transform");
            let mut tensors = Vec::new();
            for (i, p) in input.iter().enumerate() {
                let bytes = read(p)?;
                report.add_input(&format!("input{i}"), &p.display().to_string(), &bytes);
                tensors.extend(parse_tensors(p, &bytes)?);
            }
            let (space, out) = transform(&tensors, *space, nf_level.as_deref(), *groups)?;
            let first = &tensors[0];
            report.transform = Some(TransformSection {
                space: serde_json::to_value(space)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                input_shape: [first.height(), first.width(), first.dim()],
                output_shape: [out.height(), out.width(), out.dim()],
                output_mean: out.mean(),
            });
            if let Some(p) = tensor_out {
                write_tensor(p, &out)?;
            }
            report
        }
        Command::TrainAlign { config, steps, beta } => {
            let mut report = EvalReport::new("train-align");
            if let Some(p) = config {
                digest(&mut report, "config", p)?;
            }
            let mut cfg = load_train_config(config.as_deref())?;
            if let Some(s) = steps {
                cfg.steps = *s;
            }
            if let Some(b) = beta {
                cfg.beta = *b;
            }
            cfg.seed = seed_for(cfg.seed)?;
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            report.seed = Some(cfg.seed);
            let task = make_synthetic_task(Seed(cfg.seed), &cfg.task)?;
            let outcome = train(&task, &cfg)?;
            report.training = Some(TrainingSection {
                summary: outcome.history.summary(),
                history: outcome.history,
                config: cfg,
            });
            report
        }
        Command::Gradcheck { conditioning, mask_mode } => {
            let mut report = EvalReport::new("gradcheck");
            let cfg = GradcheckConfig {
                seed: seed_for(GradcheckConfig::default().seed)?,
                conditioning: match conditioning {
                    ConditioningArg::Pooled => Conditioning::Pooled,
                    ConditioningArg::PerToken => Conditioning::PerToken,
                },
                mask_mode: match mask_mode {
                    MaskModeArg::Replace => MaskMode::Replace,
                    MaskModeArg::KeepVisible => MaskMode::KeepVisible,
                },
                ..GradcheckConfig::default()
            };
            report.seed = Some(cfg.seed);
            let rep = run_gradcheck(&cfg)?;
            if !rep.passed {
                failure = Some(format!(
                    "gradient check failed: max relative error {:e} exceeds {:e}",
                    rep.max_rel_error, rep.tolerance
                ));
            }
            report.gradcheck = Some(rep);
            report
        }
    };

    if g.timing {
        report.runtime_seconds = Some(started.elapsed().as_secs_f64());
    }
    let text = match g.format {
        Format::Json => report.to_canonical_json()?,
        Format::Csv => report.to_csv()?,
    };
    emit(g.output.as_deref(), text.as_bytes())?;
    match failure {
        Some(msg) => Err(CliError::Failed(msg)),
        None => Ok(()),
    }
}

fn run_parse(input: &Path, lexicon: Option<&Path>, output: Option<&Path>) -> CliResult<()> {
    let parser = match lexicon {
        Some(p) => RuleParser::with_lexicon(&load_lexicon(p)?.lexicon),
        None => RuleParser::default(),
    };
    let text = String::from_utf8(read(input)?)
        .map_err(|e| Error::format(None, format!("{}: not UTF-8: {e}", input.display())))?;
    let mut out = String::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let set = parser.extract(&split_sentences(line));
        let rec = set.to_record(Some(format!("line-{}", idx + 1)));
        out.push_str(&serde_json::to_string(&rec).map_err(|e| Error::format(Some(idx + 1), e.to_string()))?);
        out.push('\n');
    }
    emit(output, out.as_bytes())
}

fn zip_records(
    cands: Vec<(Option<String>, TupleSet)>,
    refs: Vec<(Option<String>, TupleSet)>,
) -> CliResult<Vec<(TupleSet, TupleSet)>> {
    if cands.len() != refs.len() {
        return Err(Error::shape(format!("{} candidate records but {} reference records", cands.len(), refs.len())).into());
    }
    cands
        .into_iter()
        .zip(refs)
        .enumerate()
        .map(|(i, ((ci, c), (ri, r)))| match (ci, ri) {
            (Some(a), Some(b)) if a != b => {
                Err(Error::format(Some(i + 1), format!("candidate id `{a}` does not match reference id `{b}`")).into())
            }
            _ => Ok((c, r)),
        })
        .collect()
}

fn parse_tensors(path: &Path, bytes: &[u8]) -> CliResult<Vec<FeatureGrid>> {
    if bytes.starts_with(TENSOR_MAGIC) {
        return Ok(vec![read_tensor_bytes(bytes)?]);
    }
    let grids = load_feature_tensors(path)?;
    if grids.is_empty() {
        return Err(Error::format(None, format!("{}: no tensors", path.display())).into());
    }
    Ok(grids)
}

fn transform(
    tensors: &[FeatureGrid],
    space: SpaceArg,
    nf_level: Option<&str>,
    groups: usize,
) -> CliResult<(FeatureSpace, FeatureGrid)> {
    let count = |want: usize, name: &str| -> CliResult<()> {
        if tensors.len() != want {
            return Err(CliError::Usage(format!("--space {name} takes {want} tensor(s), got {}", tensors.len())));
        }
        Ok(())
    };
    if nf_level.is_some() && space != SpaceArg::Nf {
        return Err(CliError::Usage("--nf-level applies only to --space nf".into()));
    }
    Ok(match space {
        SpaceArg::Se => {
            count(1, "se")?;
            (FeatureSpace::Se, tensors[0].clone())
        }
        SpaceArg::Me => {
            count(2, "me")?;
            (FeatureSpace::Me, interleave(&tensors[0], &tensors[1])?)
        }
        SpaceArg::Af => {
            if tensors.len() < 2 {
                return Err(CliError::Usage("--space af takes at least 2 layer tensors".into()));
            }
            if groups == 0 {
                return Err(CliError::Usage("--groups must be positive".into()));
            }
            let stack = LayerStack::new(tensors.to_vec())?;
            (FeatureSpace::Af, aggregate_layers(&stack, groups)?)
        }
        SpaceArg::Nf => {
            count(1, "nf")?;
            let level = nf_level
                .ok_or_else(|| CliError::Usage("--space nf requires --nf-level".into()))?
                .parse()
                .map_err(|_| CliError::Usage("--nf-level must be an integer".into()))?;
            (FeatureSpace::Nf, select_nf_level(&tensors[0], level)?)
        }
    })
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| {
        Error::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        }
        .into()
    })
}

fn digest(report: &mut EvalReport, name: &str, path: &Path) -> CliResult<()> {
    let bytes = read(path)?;
    report.add_input(name, &path.display().to_string(), &bytes);
    Ok(())
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let res = match output {
        Some(p) => std::fs::write(p, bytes).map_err(|e| (p.display().to_string(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| ("<stdout>".to_string(), e))
        }
    };
    res.map_err(|(path, e)| {
        Error::Io {
            path,
            reason: e.to_string(),
        }
        .into()
    })
}
