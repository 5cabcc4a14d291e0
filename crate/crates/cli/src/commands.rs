use std::path::{Component, Path, PathBuf};

use anyhow::{bail, Context, Result};
use codemark::attacks::{attack_batch, AttackKind, AttackSpec};
use codemark::config::{BackendKind, RunConfig, WeightsSetting};
use codemark::corpus::{self, atomic_write, ingest_directory, load_codebase, load_records, read_jsonl, save_codebase};
use codemark::embedder::{bits_per_function, embed_batch, BatchItem, BitSource};
use codemark::evaluator::{report, MetricReport, RunArtifacts};
use codemark::extractor::{extract_batch, ResultLine};
use codemark::features::{grid_search_weights, DevPair};
use codemark::harness::TestConfig;
use codemark::par::with_jobs;
use codemark::{rules, CandidateCodebase, CodeSnippet, Exec, Language, WatermarkBits};
use serde::Serialize;

use crate::{usage, AttackFlags, AttackKindArg, BackendArg, Cli, Command, Message, RulesAction, RunFlags};

pub fn run(cli: Cli) -> Result<()> {
    let base = match &cli.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading config {}", p.display()))?,
        None => RunConfig::default(),
    };
    let jobs = cli.jobs.or(base.concurrency);
    with_jobs(jobs, move || dispatch(cli.command, base))
}

fn dispatch(command: Command, base: RunConfig) -> Result<()> {
    match command {
        Command::Ingest { dir, output, lang } => ingest(&dir, &output, &lang),
        Command::Embed {
            codebase,
            message,
            run,
            output,
        } => embed(&configure(base, &run)?, &codebase, &message, &output),
        Command::Extract {
            codebase,
            input,
            run,
            output,
        } => extract(&configure(base, &run)?, &codebase, &input, &output),
        Command::Attack {
            input,
            attack,
            seed,
            backend,
            pairs,
            output,
        } => {
            let run = RunFlags {
                backend,
                ..RunFlags::default()
            };
            let cfg = configure(base, &run)?;
            let spec = attack_spec(&attack, seed.unwrap_or(cfg.seed))?;
            attack_dir(&cfg, &spec, &input, pairs.as_deref(), &output)
        }
        Command::Eval {
            records,
            results,
            suspects,
            codebase,
            tests,
            failures,
            output,
        } => eval(&EvalInputs {
            records,
            results,
            suspects,
            codebase,
            tests,
            failures,
            output,
        }),
        Command::Pipeline {
            codebase,
            message,
            run,
            attack_kind,
            p,
            k,
            attack_seed,
            output,
        } => {
            let cfg = configure(base, &run)?;
            let spec = attack_kind
                .map(|kind| attack_spec(&AttackFlags { kind, p, k }, attack_seed.unwrap_or(cfg.seed)))
                .transpose()?;
            pipeline(&cfg, &codebase, &message, spec, &output)
        }
        Command::TuneWeights { codebase, dev, output } => tune(&codebase, &dev, &output),
        Command::Rules {
            action: RulesAction::Export { output },
        } => export_rules(output.as_deref()),
    }
}

/// Applies command-line overrides to the loaded config.
fn configure(mut cfg: RunConfig, run: &RunFlags) -> Result<RunConfig> {
    if let Some(n) = run.n {
        cfg.n = n;
    }
    if let Some(b) = run.backend {
        cfg.backend = match b {
            BackendArg::Mock => BackendKind::Mock,
            BackendArg::Remote => BackendKind::Remote,
        };
    }
    if let Some(w) = &run.weights {
        cfg.weights = WeightsSetting::File(w.clone());
    }
    if let Some(t) = &run.tests {
        cfg.tests = Some(t.clone());
    }
    if let Some(m) = run.margin {
        cfg.policy.margin = m;
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn attack_spec(a: &AttackFlags, seed: u64) -> Result<AttackSpec> {
    let spec = match a.kind {
        AttackKindArg::Rename => AttackSpec::rename(a.p, seed),
        AttackKindArg::Transform => AttackSpec::transform(a.k, seed),
        AttackKindArg::Paraphrase => AttackSpec::paraphrase(),
    };
    spec.validate().map_err(usage)?;
    Ok(spec)
}

fn bit_source(cfg: &RunConfig, m: &Message) -> Result<BitSource> {
    match &m.bits {
        Some(text) => {
            let bits: WatermarkBits = text.parse().map_err(usage)?;
            if bits.len() != cfg.n {
                return Err(usage(format!("--bits has {} bits but n is {}", bits.len(), cfg.n)));
            }
            Ok(BitSource::Fixed(bits))
        }
        None => Ok(BitSource::Seeded(m.seed.unwrap_or(cfg.seed))),
    }
}

fn load_nonempty(path: &Path) -> Result<CandidateCodebase> {
    let cb = load_codebase(path).with_context(|| format!("reading codebase {}", path.display()))?;
    if cb.is_empty() {
        bail!("codebase {} is empty", path.display());
    }
    Ok(cb)
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

fn write_jsonl<T: Serialize>(items: impl IntoIterator<Item = T>, path: &Path) -> Result<()> {
    atomic_write(path, corpus::to_jsonl(items)?.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

/// Writes each snippet to `dir/<id>`.
fn write_snippets<'a>(dir: &Path, snippets: impl IntoIterator<Item = &'a CodeSnippet>) -> Result<usize> {
    let mut count = 0;
    for s in snippets {
        let rel = Path::new(&s.id);
        if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
            bail!("snippet id {:?} is not a plain relative path", s.id);
        }
        atomic_write(&dir.join(rel), s.text.as_bytes())?;
        count += 1;
    }
    Ok(count)
}

/// One file, or every file under a directory (ids relative to it).
fn read_suspects(path: &Path) -> Result<Vec<CodeSnippet>> {
    if path.is_dir() {
        return Ok(ingest_directory(path, None)?.snippets().to_vec());
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let id = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(vec![CodeSnippet::new(id, Language::from_path(path), text, path.display().to_string())?])
}

fn ingest(dir: &Path, output: &Path, langs: &[String]) -> Result<()> {
    let filter = langs
        .iter()
        .map(|l| Language::parse(l).ok_or_else(|| usage(format!("unknown language {l:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let cb = ingest_directory(dir, (!filter.is_empty()).then_some(filter.as_slice()))
        .with_context(|| format!("ingesting {}", dir.display()))?;
    save_codebase(&cb, output)?;
    println!(
        "ingested {} snippets from {} ({} duplicates, {} unreadable) -> {}",
        cb.len(),
        dir.display(),
        cb.duplicates,
        cb.skipped,
        output.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct FailureLine<'a> {
    snippet_id: &'a str,
    reason: String,
}

fn failure_lines(items: &[BatchItem]) -> Vec<FailureLine<'_>> {
    items
        .iter()
        .filter_map(|i| {
            i.failure_reason().map(|reason| FailureLine {
                snippet_id: &i.snippet_id,
                reason,
            })
        })
        .collect()
}

fn embed(cfg: &RunConfig, codebase: &Path, message: &Message, output: &Path) -> Result<()> {
    let source = bit_source(cfg, message)?;
    let cb = load_nonempty(codebase)?;
    let backend = cfg.build_backend()?;
    let items = embed_batch(&backend, &cb, &source, cfg.n, Exec::Parallel)?;
    let written = write_snippets(&output.join("snippets"), items.iter().filter_map(BatchItem::watermarked))?;
    write_jsonl(items.iter().filter_map(BatchItem::record), &output.join("records.jsonl"))?;
    let failures = failure_lines(&items);
    for f in &failures {
        log::warn!("{}: {}", f.snippet_id, f.reason);
    }
    write_jsonl(&failures, &output.join("failures.jsonl"))?;
    if written == 0 {
        bail!("no snippet could be watermarked");
    }
    println!(
        "embedded {written}/{} snippets, {} bits each (bpf {:.2}) -> {}",
        items.len(),
        cfg.n,
        bits_per_function(&items).unwrap_or(0.0),
        output.display()
    );
    Ok(())
}

fn extract(cfg: &RunConfig, codebase: &Path, input: &Path, output: &Path) -> Result<()> {
    let cb = load_nonempty(codebase)?;
    let suspects = read_suspects(input)?;
    if suspects.is_empty() {
        bail!("no suspect code under {}", input.display());
    }
    let backend = cfg.build_backend()?;
    let weights = cfg.resolve_weights()?;
    let results = extract_batch(&backend, &suspects, &cb, &weights, cfg.n, &cfg.policy, Exec::Parallel);
    let mut lines = Vec::with_capacity(results.len());
    let mut failed = 0;
    for (s, r) in suspects.iter().zip(results) {
        match r {
            Ok(r) => lines.push(ResultLine::new(&s.id, &r)),
            Err(e) => {
                eprintln!("{}: {e}", s.id);
                failed += 1;
            }
        }
    }
    write_jsonl(&lines, output)?;
    let low = lines.iter().filter(|l| l.low_confidence).count();
    println!(
        "extracted {}/{} watermarks ({low} low-confidence) -> {}",
        lines.len(),
        suspects.len(),
        output.display()
    );
    if failed > 0 {
        bail!("{failed} of {} extractions failed", suspects.len());
    }
    Ok(())
}

fn attack_dir(cfg: &RunConfig, spec: &AttackSpec, input: &Path, pairs: Option<&Path>, output: &Path) -> Result<()> {
    let backend = cfg.build_backend()?;
    if matches!(spec.kind, AttackKind::Paraphrase) && backend.is_mock() {
        bail!("paraphrase attacks need a model; use --backend remote");
    }
    let snippets = read_suspects(input)?;
    let mut attacked = Vec::new();
    let mut failed = 0;
    for (s, r) in snippets.iter().zip(attack_batch(&backend, spec, &snippets, Exec::Parallel)?) {
        match r {
            Ok(a) => attacked.push(a),
            Err(e) => {
                eprintln!("{}: {e}", s.id);
                failed += 1;
            }
        }
    }
    write_snippets(&output.join("snippets"), attacked.iter().map(|a| &a.snippet))?;
    write_jsonl(attacked.iter().map(|a| &a.meta), &output.join("attacks.jsonl"))?;
    if let Some(path) = pairs {
        let dev = attacked.iter().map(|a| DevPair {
            text: a.snippet.text.clone(),
            language: a.snippet.language,
            original_id: a.snippet.id.clone(),
        });
        write_jsonl(dev, path)?;
    }
    println!("{spec}: attacked {}/{} snippets -> {}", attacked.len(), snippets.len(), output.display());
    if attacked.is_empty() {
        bail!("every attack failed");
    }
    if failed > 0 {
        log::warn!("{failed} snippets could not be attacked");
    }
    Ok(())
}

struct EvalInputs {
    records: PathBuf,
    results: PathBuf,
    suspects: Option<PathBuf>,
    codebase: Option<PathBuf>,
    tests: Option<PathBuf>,
    failures: Option<PathBuf>,
    output: PathBuf,
}

fn eval(a: &EvalInputs) -> Result<()> {
    let records = load_records(&a.records).with_context(|| format!("reading {}", a.records.display()))?;
    let results: Vec<ResultLine> = read_jsonl(&a.results).with_context(|| format!("reading {}", a.results.display()))?;
    let suspects = a.suspects.as_deref().map(read_suspects).transpose()?.unwrap_or_default();
    let originals = a.codebase.as_deref().map(load_nonempty).transpose()?;
    let tests = a
        .tests
        .as_deref()
        .map(|p| TestConfig::load(p).with_context(|| format!("reading {}", p.display())))
        .transpose()?;
    let embed_failures = match &a.failures {
        Some(p) => read_jsonl::<serde_json::Value>(p)?.len(),
        None => 0,
    };
    let r = report(
        &RunArtifacts {
            records: &records,
            results: &results,
            suspects: &suspects,
            originals: originals.as_ref(),
            embed_failures,
            tests: tests.as_ref(),
        },
        Exec::Parallel,
    )?;
    finish_report(&r, &a.output)
}

fn finish_report(r: &MetricReport, output: &Path) -> Result<()> {
    write_json(r, output)?;
    print!("{}", r.to_table());
    println!("report -> {}", output.display());
    Ok(())
}

fn pipeline(
    cfg: &RunConfig,
    codebase: &Path,
    message: &Message,
    attack: Option<AttackSpec>,
    output: &Path,
) -> Result<()> {
    let source = bit_source(cfg, message)?;
    let cb = load_nonempty(codebase)?;
    let backend = cfg.build_backend()?;
    if attack.is_some_and(|a| matches!(a.kind, AttackKind::Paraphrase)) && backend.is_mock() {
        bail!("paraphrase attacks need a model; use --backend remote");
    }
    let items = embed_batch(&backend, &cb, &source, cfg.n, Exec::Parallel)?;
    for f in failure_lines(&items) {
        log::warn!("{}: {}", f.snippet_id, f.reason);
    }
    let embedded: Vec<&BatchItem> = items.iter().filter(|i| i.is_success()).collect();
    if embedded.is_empty() {
        bail!("no snippet could be watermarked");
    }
    let marked: Vec<CodeSnippet> = embedded.iter().filter_map(|i| i.watermarked().cloned()).collect();
    let suspects = match &attack {
        Some(spec) => attack_batch(&backend, spec, &marked, Exec::Parallel)?
            .into_iter()
            .zip(&marked)
            .map(|(r, s)| r.map(|a| a.snippet).with_context(|| format!("{spec} on {}", s.id)))
            .collect::<Result<Vec<_>>>()?,
        None => marked,
    };
    let weights = cfg.resolve_weights()?;
    let results = extract_batch(&backend, &suspects, &cb, &weights, cfg.n, &cfg.policy, Exec::Parallel)
        .into_iter()
        .zip(&suspects)
        .map(|(r, s)| {
            r.map(|r| ResultLine::new(&s.id, &r))
                .with_context(|| format!("extracting {}", s.id))
        })
        .collect::<Result<Vec<_>>>()?;
    let records: Vec<_> = embedded.iter().filter_map(|i| i.record().cloned()).collect();
    let tests = cfg.test_config()?;
    let r = report(
        &RunArtifacts {
            records: &records,
            results: &results,
            suspects: &suspects,
            originals: Some(&cb),
            embed_failures: items.len() - embedded.len(),
            tests: tests.as_ref(),
        },
        Exec::Parallel,
    )?;
    if let Some(spec) = attack {
        println!("attack: {spec}");
    }
    finish_report(&r, output)
}

fn tune(codebase: &Path, dev: &Path, output: &Path) -> Result<()> {
    let cb = load_nonempty(codebase)?;
    let pairs: Vec<DevPair> = read_jsonl(dev).with_context(|| format!("reading {}", dev.display()))?;
    let best = grid_search_weights(&pairs, &cb, Exec::Parallel)?;
    best.weights.save(output)?;
    let w = best.weights;
    println!(
        "searched {} grid points on {} pairs: alpha {:.1} beta {:.1} gamma {:.1} delta {:.1}, top-1 {:.4}, mean margin {:.4} -> {}",
        best.evaluated,
        pairs.len(),
        w.alpha,
        w.beta,
        w.gamma,
        w.delta,
        best.accuracy,
        best.mean_margin,
        output.display()
    );
    Ok(())
}

fn export_rules(output: Option<&Path>) -> Result<()> {
    let catalog = rules::export();
    match output {
        Some(path) => {
            write_json(&catalog, path)?;
            println!("{} rules -> {}", catalog.len(), path.display());
        }
        None => println!("{}", serde_json::to_string_pretty(&catalog)?),
    }
    Ok(())
}
