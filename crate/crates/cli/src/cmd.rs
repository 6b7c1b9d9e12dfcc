use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use fsp_core::format::{render_inference, render_tuning, IndicatorScheme, RenderedRecord, TaskFile};
use fsp_core::ingest::{interleave, read_article_corpus, read_flat_corpus, Article};
use fsp_core::par::Workers;
use fsp_core::predict::{evaluate, read_logits};
use fsp_core::sampler::{generate as generate_samples, Split};
use fsp_core::shard::{read_shard, write_shards, GenerateStats};
use serde::Deserialize;

use crate::config::RunConfig;
use crate::{EvalArgs, Failure, GenerateArgs, InspectArgs, RenderArgs, SchemeArg, SchemeOpts};

fn scheme_from(opts: &SchemeOpts) -> Result<Option<IndicatorScheme>, Failure> {
    let Some(kind) = opts.scheme else {
        if opts.symbols.is_some() {
            return Err(Failure::Usage("--symbols requires --scheme custom".into()));
        }
        return Ok(None);
    };
    let name = match kind {
        SchemeArg::Alphabet => "alphabet",
        SchemeArg::Numeric => "numeric",
        SchemeArg::Constant => "constant",
        SchemeArg::Custom => "custom",
    };
    Ok(Some(IndicatorScheme::parse(name, opts.symbols.as_deref())?))
}

#[derive(Default)]
struct ReadTally {
    ok: usize,
    errors: usize,
}

fn collect_corpus<I>(path: &Path, reader: I, tally: &mut ReadTally) -> Result<Vec<Article>, Failure>
where
    I: Iterator<Item = fsp_core::Result<Article>>,
{
    let mut out = Vec::new();
    for item in reader {
        match item {
            Ok(a) => {
                tally.ok += 1;
                out.push(a);
            }
            Err(e @ fsp_core::Error::Record { .. }) => {
                tally.errors += 1;
                log::warn!("{}: {e}", path.display());
            }
            Err(e) => return Err(Failure::Data(format!("{}: {e}", path.display()))),
        }
    }
    Ok(out)
}

fn remove_stale_shards(dir: &Path) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let is_shard = (name.starts_with("tuning-") || name.starts_with("validation-")) && name.ends_with(".jsonl");
        if is_shard {
            fs::remove_file(&path)?;
        }
    }
    Ok(())
}

pub fn generate(a: GenerateArgs) -> Result<(), Failure> {
    let mut cfg = RunConfig::load(a.config.as_deref())?;
    if let Some(o) = a.objective {
        cfg.sampler.objective = o.into();
    }
    if let Some(n) = a.n_model {
        cfg.sampler.n_model = n;
    }
    if let Some(n) = a.n_max_label {
        cfg.sampler.n_max_label = n;
    }
    if let Some(n) = a.hard_negatives {
        cfg.sampler.hard_negatives = n;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if let Some(s) = a.shard_size {
        cfg.shard_size = s;
    }
    if let Some(f) = a.validation_fraction {
        cfg.sampler.validation_fraction = f;
    }
    if let Some(q) = a.quota {
        cfg.ingest.per_corpus_quota = Some(q);
    }
    if let Some(r) = a.max_error_rate {
        cfg.max_error_rate = r;
    }
    if let Some(s) = scheme_from(&a.scheme)? {
        cfg.scheme = s;
    }
    let seed = a
        .seed
        .or(cfg.seed)
        .ok_or_else(|| Failure::Usage("generate needs --seed or `seed` in the config".into()))?;
    cfg.sampler.seed = seed;
    cfg.validate()?;
    if a.articles.is_empty() && a.flat.is_empty() {
        return Err(Failure::Usage("no input corpus given (use --articles and/or --flat)".into()));
    }

    let mut tally = ReadTally::default();
    let mut streams = Vec::new();
    for path in &a.articles {
        let reader = read_article_corpus(path, &cfg.ingest)?;
        streams.push(collect_corpus(path, reader, &mut tally)?);
    }
    for path in &a.flat {
        let mut reader = read_flat_corpus(path, &cfg.ingest)?;
        let articles = collect_corpus(path, reader.by_ref(), &mut tally)?;
        if reader.dropped() > 0 {
            log::info!("{}: {} record(s) over the per-category cap dropped", path.display(), reader.dropped());
        }
        streams.push(articles);
    }
    let seen = tally.ok + tally.errors;
    if seen > 0 && tally.errors as f64 > cfg.max_error_rate * seen as f64 {
        return Err(Failure::Data(format!(
            "{} of {} input record(s) malformed, above the {:.2}% threshold",
            tally.errors,
            seen,
            cfg.max_error_rate * 100.0
        )));
    }

    let quotas: Vec<usize> = streams
        .iter()
        .map(|s| cfg.ingest.per_corpus_quota.unwrap_or(s.len().max(1)))
        .collect();
    let mixed = interleave(streams, &quotas, seed)?;
    let out = generate_samples(&mixed.articles, &cfg.sampler, Workers(cfg.workers))?;

    fs::create_dir_all(&a.out)?;
    remove_stale_shards(&a.out)?;
    let mut stats = GenerateStats::from_generated(&out, &cfg.sampler, mixed.articles.len(), tally.errors);
    for (split, samples) in [(Split::Tuning, &out.tuning), (Split::Validation, &out.validation)] {
        for p in write_shards(&a.out, split, samples, cfg.shard_size)? {
            stats.shards.push(p.file_name().unwrap_or_default().to_string_lossy().into_owned());
        }
    }
    let mut stats_json = serde_json::to_string_pretty(&stats).map_err(|e| Failure::Data(e.to_string()))?;
    stats_json.push('\n');
    fs::write(a.out.join("stats.json"), stats_json)?;
    fs::write(a.out.join("filter_report.tsv"), out.filter.to_text())?;
    log::info!(
        "{} tuning + {} validation sample(s) from {} paragraph(s) in {} shard(s)",
        stats.tuning_samples,
        stats.validation_samples,
        stats.paragraphs_seen,
        stats.shards.len()
    );
    Ok(())
}

#[derive(Deserialize)]
struct DatasetLine {
    text: String,
    label: usize,
}

pub fn render(a: RenderArgs) -> Result<(), Failure> {
    let cfg = RunConfig::load(a.config.as_deref())?;
    cfg.markers.validate()?;
    let raw = fs::read_to_string(&a.task)
        .map_err(|e| Failure::Usage(format!("cannot read task file {}: {e}", a.task.display())))?;
    let task: TaskFile = serde_json::from_str(&raw)
        .map_err(|e| Failure::Usage(format!("invalid task file {}: {e}", a.task.display())))?;
    let (mut spec, task_scheme) = task.into_spec(cfg.sampler.n_model)?;
    if let Some(n) = a.n_model {
        spec.n_model = n;
        spec.validate()?;
    }
    let scheme = scheme_from(&a.scheme)?.or(task_scheme).unwrap_or(cfg.scheme);

    let file = File::open(&a.dataset)
        .map_err(|e| Failure::Data(format!("cannot open {}: {e}", a.dataset.display())))?;
    let mut rendered = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = i + 1;
        let rec: DatasetLine = serde_json::from_str(&line)
            .map_err(|e| Failure::Data(format!("{} line {n}: {e}", a.dataset.display())))?;
        if rec.label >= spec.n_l() {
            return Err(Failure::Data(format!(
                "{} line {n}: label {} is not below the task's {} classes",
                a.dataset.display(),
                rec.label,
                spec.n_l()
            )));
        }
        let input = render_inference(&rec.text, &spec, &scheme, &cfg.markers)?;
        rendered.push(RenderedRecord { input, label: rec.label });
    }

    let sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    for r in &rendered {
        serde_json::to_writer(&mut w, r).map_err(|e| Failure::Data(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn eval(a: EvalArgs) -> Result<(), Failure> {
    let file = File::open(&a.logits)
        .map_err(|e| Failure::Data(format!("cannot open {}: {e}", a.logits.display())))?;
    if a.n_l == 0 {
        return Err(Failure::Usage("--n-l must be >= 1".into()));
    }
    let report = evaluate(read_logits(BufReader::new(file)), a.n_l, &a.task)?;
    let json = serde_json::to_string(&report).map_err(|e| Failure::Data(e.to_string()))?;
    print!("{report}");
    match &a.report {
        Some(p) => fs::write(p, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(())
}

pub fn inspect(a: InspectArgs) -> Result<(), Failure> {
    let is_stats = a.path.file_name().is_some_and(|n| n.to_string_lossy().ends_with("stats.json"));
    if is_stats {
        let raw = fs::read_to_string(&a.path)?;
        let stats: GenerateStats = serde_json::from_str(&raw).map_err(|e| Failure::Data(e.to_string()))?;
        println!("objective {}  seed {}  n_model {}  n_max_label {}", stats.objective, stats.seed, stats.n_model, stats.n_max_label);
        println!("articles {}  paragraphs {}  record errors {}", stats.articles, stats.paragraphs_seen, stats.record_errors);
        print!("{}", stats.filter.to_text());
        println!("samples: tuning {}  validation {}", stats.tuning_samples, stats.validation_samples);
        println!("J histogram:      {:?}", stats.j_histogram);
        println!("hard negatives:   {:?}", stats.hard_negative_histogram);
        println!("label histogram:  {:?}", stats.label_histogram);
        println!("chance accuracy:  {:.4}", stats.chance_accuracy());
        return Ok(());
    }
    let scheme = scheme_from(&a.scheme)?.unwrap_or_default();
    let markers = Default::default();
    for s in read_shard(&a.path)?.iter().take(a.limit) {
        let symbol = scheme.symbols(s.options.len())?.swap_remove(s.label);
        println!("label {} ({symbol})  J={}  hard={}", s.label, s.j(), s.hard_count());
        println!("{}\n", render_tuning(s, &scheme, &markers)?);
    }
    Ok(())
}
