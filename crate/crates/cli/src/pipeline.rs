//! prompt / resolve / baseline / eval over a corpus.

use crate::config::RunConfig;
use anyhow::{anyhow, bail, Context, Result};
use mergeprompt_core::backend::{parse_resolution, prompt_sha256, sample_n, CompletionBackend};
use mergeprompt_core::eval::{
    accuracy_curve, classify_oov, fit_density, is_correct, FeasibilityRecord, FitOptions, RunReport,
};
use mergeprompt_core::model::{
    load_conflict_descriptions, load_textual_conflicts, ConflictDescription, EvalRecord, TextualConflict,
    TextualSource,
};
use mergeprompt_core::prompt::{
    app_url_shot, assemble, render_shot, split_shots, Example, Prompt, Shot, ShotSplit, TokenEstimator,
};
use mergeprompt_core::stringmerge::string_merge;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

pub enum Corpus {
    Semantic(Vec<ConflictDescription>),
    Textual(Vec<TextualConflict>),
}

impl Corpus {
    /// Descriptions for semantic_diff; a marker file or tuple directory otherwise.
    pub fn load(path: &Path, cfg: &RunConfig) -> Result<Self> {
        let context = || format!("loading corpus {}", path.display());
        if !cfg.format.is_textual() {
            let file = File::open(path).with_context(context)?;
            return Ok(Corpus::Semantic(load_conflict_descriptions(BufReader::new(file)).with_context(context)?));
        }
        let conflicts = if path.is_dir() {
            load_textual_conflicts(TextualSource::TupleDir(path))
        } else {
            let mut file = File::open(path).with_context(context)?;
            load_textual_conflicts(TextualSource::MarkerFile(&mut file))
        };
        Ok(Corpus::Textual(conflicts.with_context(context)?))
    }

    fn ids(&self) -> Vec<&str> {
        match self {
            Corpus::Semantic(v) => v.iter().map(|d| d.id.as_str()).collect(),
            Corpus::Textual(v) => v.iter().map(|c| c.id.as_str()).collect(),
        }
    }

    fn examples(&self) -> Vec<Example<'_>> {
        match self {
            Corpus::Semantic(v) => v.iter().map(Example::Semantic).collect(),
            Corpus::Textual(v) => v.iter().map(Example::Textual).collect(),
        }
    }

    fn find(&self, id: &str) -> Option<Example<'_>> {
        self.examples().into_iter().find(|e| example_id(e) == id)
    }
}

fn example_id<'a>(e: &Example<'a>) -> &'a str {
    match e {
        Example::Semantic(d) => &d.id,
        Example::Textual(c) => &c.id,
    }
}

fn ground_truth(e: &Example<'_>) -> Option<String> {
    match e {
        Example::Semantic(d) => d.fix().map(str::to_string),
        Example::Textual(c) if !c.resolution.is_empty() => Some(c.resolution.join("\n")),
        Example::Textual(_) => None,
    }
}

/// Numeric ids sort numerically, before any non-numeric id.
fn id_order(id: &str) -> (bool, u64, String) {
    match id.parse::<u64>() {
        Ok(n) => (false, n, String::new()),
        Err(_) => (true, 0, id.to_string()),
    }
}

/// Fixed shots plus the examples left to query.
pub struct Prompter {
    cfg: RunConfig,
    shots: Vec<Shot>,
    estimator: TokenEstimator,
}

impl Prompter {
    /// Textual shots are removed from `corpus` so they are never evaluated.
    pub fn new(cfg: &RunConfig, corpus: Corpus) -> Result<(Self, Corpus)> {
        let (shots, corpus) = match corpus {
            Corpus::Semantic(v) => {
                if cfg.shots > 1 {
                    log::warn!("only one built-in semantic shot exists; using 1 instead of {}", cfg.shots);
                }
                let shots = if cfg.shots == 0 {
                    Vec::new()
                } else {
                    vec![render_shot(cfg.format, &Example::Semantic(&app_url_shot()))?]
                };
                (shots, Corpus::Semantic(v))
            }
            Corpus::Textual(v) => {
                let split = if cfg.shot_ids.is_empty() {
                    ShotSplit::Random {
                        count: cfg.shots,
                        seed: cfg.seed,
                    }
                } else {
                    ShotSplit::Named(cfg.shot_ids.clone())
                };
                let (picked, rest) = split_shots(v, &split)?;
                let shots = picked
                    .iter()
                    .map(|c| render_shot(cfg.format, &Example::Textual(c)))
                    .collect::<Result<_, _>>()?;
                (shots, Corpus::Textual(rest))
            }
        };
        let prompter = Self {
            cfg: cfg.clone(),
            shots,
            estimator: TokenEstimator::default(),
        };
        Ok((prompter, corpus))
    }

    pub fn prompt(&self, example: Example<'_>) -> Result<Prompt> {
        Ok(assemble(
            &self.shots,
            example,
            self.cfg.format,
            self.cfg.strategy,
            self.cfg.budget,
            &self.estimator,
        )?)
    }
}

pub fn print_prompt(cfg: &RunConfig, corpus_path: &Path, id: &str) -> Result<()> {
    let (prompter, corpus) = Prompter::new(cfg, Corpus::load(corpus_path, cfg)?)?;
    let example = corpus
        .find(id)
        .ok_or_else(|| anyhow!("no example {id:?} in the corpus (or it is used as a shot)"))?;
    let prompt = prompter.prompt(example)?;
    log::info!("{} tokens (estimated), {} shots, {} pairs", prompt.token_estimate, prompt.shots_used, prompt.pairs_used);
    print!("{}", prompt.text);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_sha256: Option<String>,
    #[serde(default)]
    pub candidates: Vec<String>,
    /// Single-candidate form written by `baseline`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<String>,
}

impl CandidateRecord {
    fn all(&self) -> Vec<String> {
        let mut out = self.candidates.clone();
        out.extend(self.candidate.clone());
        out
    }
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut out = std::io::BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".MANIFEST");
    output.with_file_name(name)
}

fn write_manifest(output: &Path, value: serde_json::Value) -> Result<()> {
    let path = manifest_path(output);
    std::fs::write(&path, serde_json::to_string_pretty(&value)? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

pub fn resolve(cfg: &RunConfig, corpus_path: &Path, output: &Path) -> Result<()> {
    let backend = cfg.backend()?;
    let (prompter, corpus) = Prompter::new(cfg, Corpus::load(corpus_path, cfg)?)?;
    let params = cfg.params();
    let aborted = AtomicBool::new(false);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers.max(1)).build()?;

    let run_one = |example: Example<'_>| -> Result<CandidateRecord> {
        let prompt = prompter.prompt(example)?;
        let completions = sample_n(backend.as_ref() as &dyn CompletionBackend, &prompt.text, &params, cfg.parallelism)?;
        Ok(CandidateRecord {
            id: example_id(&example).to_string(),
            prompt_sha256: Some(prompt_sha256(&prompt.text)),
            candidates: completions.iter().map(|c| parse_resolution(c, cfg.format)).collect(),
            candidate: None,
        })
    };
    let results: Vec<(String, Option<Result<CandidateRecord>>)> = pool.install(|| {
        corpus
            .examples()
            .into_par_iter()
            .map(|example| {
                let id = example_id(&example).to_string();
                if aborted.load(Ordering::Acquire) {
                    return (id, None);
                }
                let result = run_one(example);
                if result.is_err() {
                    aborted.store(true, Ordering::Release);
                }
                (id, Some(result))
            })
            .collect()
    });

    let mut done = Vec::new();
    let mut failures = Vec::new();
    for (id, result) in results {
        match result {
            Some(Ok(record)) => done.push(record),
            Some(Err(e)) => failures.push((id, e)),
            None => {}
        }
    }
    done.sort_by_key(|r| id_order(&r.id));
    failures.sort_by_key(|(id, _)| id_order(id));
    write_jsonl(output, &done)?;

    let run_config = serde_json::to_value(cfg)?;
    if let Some((id, error)) = failures.first() {
        write_manifest(
            output,
            serde_json::json!({
                "status": "aborted",
                "failed_id": id,
                "error": format!("{error:#}"),
                "completed": done.iter().map(|r| &r.id).collect::<Vec<_>>(),
                "total": corpus.ids().len(),
                "run_config": run_config,
            }),
        )?;
        bail!("example {id} failed: {error:#}");
    }
    write_manifest(
        output,
        serde_json::json!({
            "status": "complete",
            "completed": done.len(),
            "total": corpus.ids().len(),
            "run_config": run_config,
        }),
    )?;
    eprintln!("resolved {} examples", done.len());
    Ok(())
}

pub fn baseline(cfg: &RunConfig, corpus_path: &Path, output: &Path) -> Result<()> {
    let Corpus::Semantic(descriptions) = Corpus::load(corpus_path, cfg)? else {
        bail!("the StringMerge baseline needs a semantic_diff corpus");
    };
    let mut records: Vec<CandidateRecord> = descriptions
        .par_iter()
        .map(|d| CandidateRecord {
            id: d.id.clone(),
            prompt_sha256: None,
            candidates: Vec::new(),
            candidate: Some(string_merge(d)),
        })
        .collect();
    records.sort_by_key(|r| id_order(&r.id));
    write_jsonl(output, &records)?;
    eprintln!("baseline candidates: {}", records.len());
    Ok(())
}

pub fn load_candidates(path: &Path) -> Result<Vec<CandidateRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?);
    }
    Ok(out)
}

pub struct EvalOptions {
    pub k: Option<usize>,
    pub fit: Option<FitOptions>,
}

pub fn evaluate(cfg: &RunConfig, candidates_path: &Path, corpus_path: &Path, options: &EvalOptions) -> Result<RunReport> {
    let records = load_candidates(candidates_path)?;
    let corpus = Corpus::load(corpus_path, cfg)?;
    let by_id: HashMap<&str, Example<'_>> = corpus.examples().into_iter().map(|e| (example_id(&e), e)).collect();

    let missing: Vec<&str> = records
        .iter()
        .filter(|r| by_id.get(r.id.as_str()).and_then(ground_truth).is_none())
        .map(|r| r.id.as_str())
        .collect();
    if !missing.is_empty() {
        bail!("candidate ids missing from the corpus or without ground truth: {}", missing.join(", "));
    }
    if let Some(r) = records.iter().find(|r| r.all().is_empty()) {
        bail!("record {} has no candidates", r.id);
    }

    let mode = cfg.eval_mode();
    let mut eval_records = Vec::new();
    for r in &records {
        let truth = ground_truth(&by_id[r.id.as_str()]).expect("checked above");
        let candidates = r.all();
        let outcomes = candidates.iter().map(|c| is_correct(c, &truth, mode)).collect();
        eval_records.push(EvalRecord::new(r.id.clone(), outcomes, candidates)?);
    }
    let k = match options.k {
        Some(k) => k,
        None => eval_records.iter().map(|r| r.trial_outcomes.len()).min().unwrap_or(1),
    };
    let curve = accuracy_curve(&eval_records, k)?;

    // OOV needs the prompt each example was resolved with; rebuild it.
    let feasibility: Option<Vec<FeasibilityRecord>> = match &corpus {
        Corpus::Semantic(_) => {
            let (prompter, corpus) = Prompter::new(cfg, Corpus::load(corpus_path, cfg)?)?;
            let Corpus::Semantic(descriptions) = &corpus else { unreachable!() };
            let mut out = Vec::new();
            for r in &eval_records {
                let d = descriptions.iter().find(|d| d.id == r.example_id).expect("checked above");
                let prompt = prompter.prompt(Example::Semantic(d))?;
                let resolved = r.trial_outcomes[..k].iter().any(|&x| x);
                out.push(classify_oov(d, &prompt.text, resolved)?);
            }
            Some(out)
        }
        Corpus::Textual(_) => None,
    };
    let fit = match &options.fit {
        Some(opts) => Some(fit_density(&curve.acc(), opts)?),
        None => None,
    };
    let mut run_config = serde_json::to_value(cfg)?;
    run_config["eval_mode"] = serde_json::to_value(mode)?;
    run_config["k"] = k.into();
    Ok(RunReport::new(run_config, &eval_records, &curve, feasibility.as_deref(), fit.as_ref()))
}

/// Accuracy values from a curve CSV (an `accuracy` column), a JSON array, or
/// a run report's `curve` field.
pub fn read_curve(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let array = value.get("curve").cloned().unwrap_or(value);
        return serde_json::from_value(array).context("expected an array of accuracies");
    }
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').map(str::trim).collect();
    let column = header
        .iter()
        .position(|h| *h == "accuracy")
        .ok_or_else(|| anyhow!("CSV has no `accuracy` column"))?;
    lines
        .enumerate()
        .map(|(i, l)| {
            l.split(',')
                .nth(column)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| anyhow!("{}: bad row {}", path.display(), i + 2))
        })
        .collect()
}
