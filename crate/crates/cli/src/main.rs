//! `stk`: tokenize, tag, chunk and search text for metaphor and analogy clues.
//!
//! Exit codes: 0 clean, 1 when some inputs failed or a checked catalog has
//! errors, 2 for configuration and usage errors.

mod config;

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use stk_core::annotate::{
    annotate_corpus, corpus_stats, mark_inline, parse_standoff, sort_records, strip_marks, write_standoff,
    AnnotationRecord, MarkStyle, Pipeline,
};
use stk_core::catalog::{parse_catalog, parse_skip_list, serialize_catalog, Catalog};
use stk_core::chunker::chunk;
use stk_core::matcher::MatchMode;
use stk_core::relevance::{compute_relevance, parse_judgments, RelevanceRecord};
use stk_core::tagger::{load_rules, pretagged_text, read_pretagged, tag, write_pretagged, Lexicon, TaggedToken};
use stk_core::text::{Document, SentenceSplitter};

use config::Options;

#[derive(Parser)]
#[command(name = "stk", version, about = "Find metaphor and analogy clues in text")]
struct Cli {
    /// Options file (TOML); flags override its values.
    #[arg(long, global = true, env = "STK_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Resources {
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Input is in the pre-tagged format.
    #[arg(long)]
    pretagged: bool,
}

#[derive(Args)]
struct Marks {
    #[arg(long)]
    mark_open: Option<String>,
    #[arg(long)]
    mark_close: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print tokens as `sentence start length kind surface`.
    Tokenize { file: PathBuf },
    /// Tag tokens and print the pre-tagged format.
    Tag {
        #[command(flatten)]
        resources: Resources,
        file: PathBuf,
    },
    /// Print chunks as `KIND head surfaces`, one sentence per block.
    Chunk {
        #[command(flatten)]
        resources: Resources,
        file: PathBuf,
    },
    /// Run the whole pipeline and write standoff records (or marked text).
    Annotate {
        #[command(flatten)]
        resources: Resources,
        #[command(flatten)]
        marks: Marks,
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Skippable classes, overriding the catalog's `skip` line.
        #[arg(long)]
        skip: Option<String>,
        /// Report every alignment instead of the canonical matches.
        #[arg(long)]
        all_matches: bool,
        /// Write marked text instead of standoff records.
        #[arg(long)]
        inline: bool,
        /// Output file; a directory for `--inline` with several inputs.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an unlabeled judgment file for the records.
        #[arg(long)]
        judgments_template: Option<PathBuf>,
        /// Process files on several threads.
        #[arg(long)]
        parallel: bool,
        files: Vec<PathBuf>,
    },
    /// Remove inline marks.
    Strip {
        #[command(flatten)]
        marks: Marks,
        file: PathBuf,
    },
    /// Catalog tools.
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Relevance table for each clue, from the catalog or from judgments.
    Relevance {
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        judgments: Option<PathBuf>,
    },
    /// Per-clue counts over standoff files.
    Stats { files: Vec<PathBuf> },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Report errors and warnings.
    Check { file: PathBuf },
    /// Print the canonical form.
    Fmt { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("stk: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

struct Setup {
    options: Options,
}

impl Setup {
    fn splitter(&self) -> SentenceSplitter {
        match &self.options.abbreviations {
            Some(list) => SentenceSplitter::with_abbreviations(list.iter().map(String::as_str)),
            None => SentenceSplitter::default(),
        }
    }

    fn lexicon(&self, flag: &Option<PathBuf>) -> Result<Lexicon> {
        let path = flag.as_ref().or(self.options.lexicon.as_ref()).context("no lexicon given (--lexicon)")?;
        Lexicon::load(path).with_context(|| format!("lexicon {}", path.display()))
    }

    fn rules(&self, flag: &Option<PathBuf>) -> Result<Vec<stk_core::tagger::TransformationRule>> {
        match flag.as_ref().or(self.options.rules.as_ref()) {
            Some(path) => load_rules(path).with_context(|| format!("rules {}", path.display())),
            None => Ok(Vec::new()),
        }
    }

    fn catalog(&self, flag: &Option<PathBuf>) -> Result<Catalog> {
        let path = flag.as_ref().or(self.options.catalog.as_ref()).context("no catalog given (--catalog)")?;
        let text = read_input(path)?;
        parse_catalog(&text).with_context(|| format!("catalog {}", path.display()))
    }

    fn pretagged(&self, resources: &Resources) -> bool {
        resources.pretagged || self.options.pretagged.unwrap_or(false)
    }

    fn style(&self, marks: &Marks) -> MarkStyle {
        let default = MarkStyle::default();
        MarkStyle {
            open: marks.mark_open.clone().or(self.options.mark_open.clone()).unwrap_or(default.open),
            close: marks.mark_close.clone().or(self.options.mark_close.clone()).unwrap_or(default.close),
        }
    }

    fn tagged(&self, resources: &Resources, path: &Path) -> Result<Vec<Vec<TaggedToken>>> {
        let input = read_input(path)?;
        if self.pretagged(resources) {
            return read_pretagged(&input).with_context(|| format!("pre-tagged input {}", path.display()));
        }
        let lexicon = self.lexicon(&resources.lexicon)?;
        let rules = self.rules(&resources.rules)?;
        let document = Document::parse(&input, &self.splitter());
        let sentences = document.sentences.iter().map(|s| tag(&s.tokens, &lexicon, &rules)).collect();
        Ok(sentences)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let options = match &cli.config {
        Some(p) => Options::load(p)?,
        None => Options::default(),
    };
    let cx = Setup { options };
    match cli.command {
        Command::Tokenize { file } => {
            let text = read_input(&file)?;
            let document = Document::parse(&text, &cx.splitter());
            let mut out = String::new();
            for (i, s) in document.sentences.iter().enumerate() {
                for t in &s.tokens {
                    out.push_str(&format!("{i}\t{}\t{}\t{}\t{}\n", t.span.start, t.span.len(), t.kind.as_str(), t.surface));
                }
            }
            emit(None, &out)?;
        }
        Command::Tag { resources, file } => {
            let sentences = cx.tagged(&resources, &file)?;
            emit(None, &write_pretagged(sentences.iter().map(Vec::as_slice)))?;
        }
        Command::Chunk { resources, file } => {
            let sentences = cx.tagged(&resources, &file)?;
            let mut out = String::new();
            for s in &sentences {
                for u in chunk(s) {
                    out.push_str(&u.to_line());
                    out.push('\n');
                }
                out.push('\n');
            }
            emit(None, &out)?;
        }
        Command::Annotate {
            resources,
            marks,
            catalog,
            skip,
            all_matches,
            inline,
            out,
            judgments_template,
            parallel,
            files,
        } => {
            return annotate(
                &cx,
                AnnotateArgs {
                    resources,
                    style: cx.style(&marks),
                    catalog: cx.catalog(&catalog)?,
                    skip: skip.or(cx.options.skip.clone()),
                    all_matches: all_matches || cx.options.all_matches.unwrap_or(false),
                    inline: inline || cx.options.inline.unwrap_or(false),
                    out: out.or(cx.options.out.clone()),
                    judgments_template,
                    parallel: parallel || cx.options.parallel.unwrap_or(false),
                    files,
                },
            )
        }
        Command::Strip { marks, file } => {
            let text = read_input(&file)?;
            let plain = strip_marks(&text, &cx.style(&marks)).with_context(|| format!("{}", file.display()))?;
            emit(None, &plain)?;
        }
        Command::Catalog(CatalogCommand::Check { file }) => {
            let text = read_input(&file)?;
            return Ok(match parse_catalog(&text) {
                Ok(catalog) => {
                    let errors = catalog.validate();
                    for d in &errors {
                        println!("error: {d}");
                    }
                    for w in catalog.warnings() {
                        println!("warning: {w}");
                    }
                    if errors.is_empty() {
                        println!("{}: {} clues", file.display(), catalog.clues.len());
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    println!("error: {e}");
                    ExitCode::from(1)
                }
            });
        }
        Command::Catalog(CatalogCommand::Fmt { file }) => {
            let text = read_input(&file)?;
            let catalog = parse_catalog(&text).with_context(|| format!("catalog {}", file.display()))?;
            emit(None, &serialize_catalog(&catalog))?;
        }
        Command::Relevance { catalog, judgments } => {
            let catalog = cx.catalog(&catalog)?;
            emit(None, &relevance_table(&catalog, judgments.as_deref())?)?;
        }
        Command::Stats { files } => {
            let mut records = Vec::new();
            for f in &files {
                let text = read_input(f)?;
                records.extend(parse_standoff(&text).with_context(|| format!("standoff {}", f.display()))?);
            }
            let mut out = String::from("clue\tdocuments\toccurrences\tmin\tmax\n");
            for s in corpus_stats(&records) {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    s.clue_name, s.documents, s.occurrences, s.min_per_document, s.max_per_document
                ));
            }
            emit(None, &out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

struct AnnotateArgs {
    resources: Resources,
    style: MarkStyle,
    catalog: Catalog,
    skip: Option<String>,
    all_matches: bool,
    inline: bool,
    out: Option<PathBuf>,
    judgments_template: Option<PathBuf>,
    parallel: bool,
    files: Vec<PathBuf>,
}

fn annotate(cx: &Setup, args: AnnotateArgs) -> Result<ExitCode> {
    if args.inline && args.files.len() > 1 && args.out.is_none() {
        bail!("--inline with several inputs needs --out DIR");
    }
    let skip: BTreeSet<_> = match &args.skip {
        Some(s) => parse_skip_list(s).map_err(anyhow::Error::msg).context("--skip")?,
        None => args.catalog.skip.clone(),
    };
    let pretagged = cx.pretagged(&args.resources);
    let (lexicon, rules) = if pretagged {
        (Lexicon::new(), Vec::new())
    } else {
        (cx.lexicon(&args.resources.lexicon)?, cx.rules(&args.resources.rules)?)
    };
    let mode = if args.all_matches { MatchMode::AllCandidates } else { MatchMode::Canonical };
    let mut pipeline = Pipeline::new(args.catalog, lexicon, rules).with_skip(skip).with_mode(mode);
    pipeline.splitter = cx.splitter();

    let mut failures = 0;
    let mut records: Vec<AnnotationRecord> = Vec::new();
    // texts are only kept for inline output
    let mut texts: Vec<(PathBuf, String)> = Vec::new();
    if pretagged || args.inline {
        for path in &args.files {
            let doc_id = path.display().to_string();
            let result = read_input(path).and_then(|input| {
                if pretagged {
                    let sentences = read_pretagged(&input).with_context(|| format!("pre-tagged input {doc_id}"))?;
                    Ok((pretagged_text(&sentences), pipeline.annotate_tagged(&doc_id, sentences)))
                } else {
                    let found = pipeline.annotate_text(&doc_id, &input);
                    Ok((input, found))
                }
            });
            match result {
                Ok((text, found)) => {
                    records.extend(found);
                    texts.push((path.clone(), text));
                }
                Err(e) => {
                    failures += 1;
                    eprintln!("stk: {e:#}");
                }
            }
        }
        sort_records(&mut records);
    } else {
        let corpus = annotate_corpus(&args.files, &pipeline, args.parallel);
        for f in &corpus.failures {
            eprintln!("stk: {f}");
        }
        failures = corpus.failures.len();
        records = corpus.records;
    }

    if let Some(path) = &args.judgments_template {
        let lines: String = records.iter().filter_map(|r| r.judgment_template()).map(|l| l + "\n").collect();
        emit(Some(path), &lines)?;
    }

    if args.inline {
        let to_dir = args.files.len() > 1;
        if to_dir {
            let dir = args.out.as_ref().expect("checked above");
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
        for (path, text) in &texts {
            let doc_id = path.display().to_string();
            let own: Vec<_> = records.iter().filter(|r| r.doc_id == doc_id).cloned().collect();
            let marked = mark_inline(text, &own, &args.style).with_context(|| format!("marking {doc_id}"))?;
            for i in &marked.skipped {
                eprintln!(
                    "stk: {doc_id}: {} at {} overlaps an earlier mark; kept in standoff only",
                    own[*i].clue_name, own[*i].span
                );
            }
            let target = if to_dir {
                let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "stdin".into());
                Some(args.out.as_ref().expect("checked above").join(format!("{name}.marked")))
            } else {
                args.out.clone()
            };
            emit(target.as_deref(), &marked.text)?;
        }
    } else {
        emit(args.out.as_deref(), &write_standoff(&records))?;
    }
    Ok(if failures > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn relevance_table(catalog: &Catalog, judgments: Option<&Path>) -> Result<String> {
    let mut rows: Vec<(String, RelevanceRecord, Vec<String>)> = Vec::new();
    match judgments {
        None => {
            for clue in &catalog.clues {
                if let Some(r) = &clue.relevance {
                    rows.push((clue.name.clone(), *r, r.warnings()));
                }
            }
        }
        Some(path) => {
            let judgments = parse_judgments(&read_input(path)?).with_context(|| format!("judgments {}", path.display()))?;
            let mut names: Vec<String> = catalog.clues.iter().map(|c| c.name.clone()).collect();
            for j in &judgments {
                if !names.contains(&j.clue_name) {
                    names.push(j.clue_name.clone());
                }
            }
            for name in names {
                let record = compute_relevance(&judgments, &name)?;
                let mut warnings = Vec::new();
                if catalog.clue(&name).is_none() {
                    warnings.push("not in catalog".to_string());
                }
                rows.push((name, record, warnings));
            }
        }
    }
    let mut out = String::from("clue\toccurrences\tconventional\tnew\tcontexts\ttotal\tratio\tvalue\twarnings\n");
    for (name, r, warnings) in rows {
        let (ratio, value) = match r.ratio() {
            Some(q) => (q.to_string(), q.decimal()),
            None => ("-".into(), "-".into()),
        };
        let warnings = if warnings.is_empty() { "-".to_string() } else { warnings.join("; ") };
        let [occ, conv, new, ctx, total] = r.counts();
        out.push_str(&format!("{name}\t{occ}\t{conv}\t{new}\t{ctx}\t{total}\t{ratio}\t{value}\t{warnings}\n"));
    }
    Ok(out)
}
