//! `sentrack`: sentence-guided tracking over detection-stream files.
//!
//! Subcommands: `track` (decode one sentence against one clip, optionally
//! drawing per-frame overlays), `generate` (best description of a clip),
//! `retrieve` (rank a corpus for a sentence), `simulate` (synthesize a
//! corpus with ground truth), `eval` (score a corpus against judgments),
//! and `oracle-check` (differential-test the decoder against exhaustive
//! enumeration).
//!
//! Exit codes: 0 success, 1 error (bad input, IO), 2 query unsatisfiable
//! (`track` with τ = −∞, `generate` with no finite-score sentence).
//! Timings go to stderr so result documents stay byte-identical across
//! reruns with fixed seeds.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sentrack::config::FileConfig;
use sentrack::{check, eval, io, overlay, sim};
use sentrack_core::clip::Clip;
use sentrack_core::generate::generate;
use sentrack_core::lattice::{sentence_track, SentenceTrackResult};
use sentrack_core::linguistics::Grammar;

const EXIT_UNSATISFIABLE: u8 = 2;

#[derive(Parser)]
#[command(name = "sentrack", version, about = "Sentence-guided detection tracking")]
struct Cli {
    /// TOML config file; flags beat file values, file values beat defaults.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Lexicon file (defaults to the built-in lexicon).
    #[arg(long, global = true, value_name = "FILE")]
    lexicon: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track the participants of one sentence in one clip.
    Track(TrackArgs),
    /// Generate the best-scoring description of a clip.
    Generate(GenerateArgs),
    /// Rank a corpus of clips by how well they depict a sentence.
    Retrieve(RetrieveArgs),
    /// Synthesize a clip corpus with ground-truth sidecars and judgments.
    Simulate(SimulateArgs),
    /// Score a corpus against judgments and report retrieval/generation metrics.
    Eval(EvalArgs),
    /// Differential-test the decoder against exhaustive enumeration.
    OracleCheck(OracleCheckArgs),
}

#[derive(Args)]
struct TrackArgs {
    /// Clip file (detection stream JSON).
    #[arg(long, value_name = "FILE")]
    clip: PathBuf,

    /// Sentence to track.
    #[arg(long, value_name = "TEXT")]
    sentence: String,

    /// Detections kept per frame (overrides the config file).
    #[arg(long, value_name = "N")]
    top_k: Option<usize>,

    /// Directory for per-frame SVG overlays (omit for no drawings).
    #[arg(long, value_name = "DIR")]
    overlay: Option<PathBuf>,

    /// Write the result document here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Clip file (detection stream JSON).
    #[arg(long, value_name = "FILE")]
    clip: PathBuf,

    /// Beam width (overrides the config file).
    #[arg(long, value_name = "N")]
    beam_width: Option<usize>,

    /// Stop once extending the best sentence multiplies its probability by
    /// less than this factor (overrides the config file).
    #[arg(long, value_name = "FACTOR")]
    contraction_threshold: Option<f64>,

    /// Longest sentence considered (overrides the config file).
    #[arg(long, value_name = "N")]
    max_words: Option<usize>,

    /// Write the result document here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RetrieveArgs {
    /// Sentence to retrieve clips for.
    #[arg(long, value_name = "TEXT")]
    sentence: String,

    /// Directory of clip files (a `clips/` subdirectory is used if present).
    #[arg(long, value_name = "DIR")]
    corpus_dir: PathBuf,

    /// Ranked entries to report (overrides the config file).
    #[arg(long, value_name = "N")]
    top: Option<usize>,

    /// Worker threads; 0 means available parallelism (overrides the config file).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,

    /// Write the result document here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Directory to write the corpus under.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,

    /// Corpus seed; a clip's bytes depend only on (manifest, seed).
    #[arg(long)]
    seed: u64,

    /// Manifest file; defaults to a built-in corpus (see --corpus).
    #[arg(long, value_name = "FILE", conflicts_with = "corpus")]
    manifest: Option<PathBuf>,

    /// Built-in manifest: "default" (40 clips) or "minimal-pairs" (20).
    #[arg(long, value_name = "NAME", default_value = "default")]
    corpus: String,

    /// Detection-box jitter σ in pixels (overrides the manifest).
    #[arg(long, value_name = "SIGMA")]
    jitter_sigma: Option<f64>,

    /// Detection-score noise σ (overrides the manifest).
    #[arg(long, value_name = "SIGMA")]
    score_sigma: Option<f64>,

    /// Expected false positives per frame (overrides the manifest).
    #[arg(long, value_name = "RATE")]
    fp_rate: Option<f64>,

    /// Per-detection misclassification probability (overrides the manifest).
    #[arg(long, value_name = "RATE")]
    misclass_rate: Option<f64>,

    /// Accept manifests that leave inventory sentences undepicted.
    #[arg(long)]
    allow_partial: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Corpus directory: clips/, truth/, judgments.txt, sentences.txt.
    #[arg(long, value_name = "DIR")]
    corpus_dir: PathBuf,

    /// Cross-validation folds (overrides the config file).
    #[arg(long, value_name = "N")]
    folds: Option<usize>,

    /// Seed for the cross-validation fold shuffle.
    #[arg(long, default_value_t = 17)]
    seed: u64,

    /// Worker threads; 0 means available parallelism (overrides the config file).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,

    /// Skip the generation pass (retrieval metrics only).
    #[arg(long)]
    no_generation: bool,

    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// Random instances to compare (0 passes trivially with a warning).
    #[arg(long, default_value_t = 200)]
    trials: usize,

    /// Instance-sampling seed.
    #[arg(long, default_value_t = 0x0c7a_c1e5)]
    seed: u64,

    /// Longest clip sampled (frames).
    #[arg(long, default_value_t = 5, value_name = "T")]
    max_frames: usize,

    /// Most detections per frame sampled.
    #[arg(long, default_value_t = 3, value_name = "J")]
    max_detections: usize,

    /// Most participants sampled.
    #[arg(long, default_value_t = 2, value_name = "L")]
    max_participants: usize,

    /// Most words sampled.
    #[arg(long, default_value_t = 3, value_name = "W")]
    max_words: usize,

    /// Flip detection flows on the oracle's copy of each clip to
    /// demonstrate that divergences are caught.
    #[arg(long)]
    inject_bug: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let config = FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Track(args) => cmd_track(cli, &config, args),
        Command::Generate(args) => cmd_generate(cli, &config, args),
        Command::Retrieve(args) => cmd_retrieve(cli, &config, args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Eval(args) => cmd_eval(cli, &config, args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
    }
}

/// Print `value` as pretty JSON to stdout, or write it to `path`.
fn emit<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    match path {
        Some(path) => io::write_json(path, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// track
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct TrackDocument {
    clip_id: String,
    sentence: String,
    satisfiable: bool,
    /// τ of the best joint interpretation; JSON `null` when −∞.
    tau: f64,
    participants: Vec<ParticipantDoc>,
    words: Vec<WordDoc>,
}

#[derive(Serialize)]
struct ParticipantDoc {
    participant: usize,
    role: &'static str,
    /// Chosen detection index per frame.
    indices: Vec<usize>,
    /// The detection boxes those indices select, `[x1, y1, x2, y2]`.
    boxes: Vec<[f64; 4]>,
}

#[derive(Serialize)]
struct WordDoc {
    lemma: String,
    word_index: usize,
    /// Recognizer state per frame along the accepted run.
    states: Vec<usize>,
}

fn track_document(clip: &Clip, result: &SentenceTrackResult) -> Result<TrackDocument> {
    let mut participants = Vec::with_capacity(result.tracks.len());
    for pt in &result.tracks {
        let boxes = clip
            .track_boxes(&pt.track)
            .with_context(|| format!("resolving track for participant {}", pt.participant))?;
        participants.push(ParticipantDoc {
            participant: pt.participant,
            role: pt.role.name(),
            indices: pt.track.indices.clone(),
            boxes: boxes.into_iter().map(|b| b.0).collect(),
        });
    }
    Ok(TrackDocument {
        clip_id: clip.id.clone(),
        sentence: result.sentence.clone(),
        satisfiable: result.tau.is_finite(),
        tau: result.tau,
        participants,
        words: result
            .word_states
            .iter()
            .map(|w| WordDoc {
                lemma: w.lemma.clone(),
                word_index: w.word_index,
                states: w.states.clone(),
            })
            .collect(),
    })
}

fn cmd_track(cli: &Cli, config: &FileConfig, args: &TrackArgs) -> Result<u8> {
    let mut tracker = config.tracker_config();
    if let Some(k) = args.top_k {
        tracker.top_k = k;
    }
    let lexicon = io::load_lexicon(cli.lexicon.as_deref())?;
    let clip = io::load_clip(&args.clip)?;

    let started = Instant::now();
    let result = sentence_track(&clip, &args.sentence, &lexicon, &tracker)?;
    eprintln!(
        "tracked clip {} in {} ms",
        clip.id,
        started.elapsed().as_millis()
    );

    emit(args.out.as_deref(), &track_document(&clip, &result)?)?;
    if let Some(dir) = &args.overlay {
        let frames = overlay::write_overlays(dir, &clip, &result)?;
        eprintln!("wrote {frames} overlay frames under {}", dir.display());
    }
    Ok(if result.tau.is_finite() {
        0
    } else {
        EXIT_UNSATISFIABLE
    })
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct GenerateDocument {
    clip_id: String,
    /// `null` when no sentence scores finitely on the clip.
    sentence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
}

fn cmd_generate(cli: &Cli, config: &FileConfig, args: &GenerateArgs) -> Result<u8> {
    let mut gen = config.gen_config();
    if let Some(w) = args.beam_width {
        gen.beam_width = w;
    }
    if let Some(t) = args.contraction_threshold {
        gen.contraction_threshold = t;
    }
    if let Some(n) = args.max_words {
        gen.max_words = n;
    }
    let lexicon = io::load_lexicon(cli.lexicon.as_deref())?;
    let clip = io::load_clip(&args.clip)?;

    let started = Instant::now();
    let best = generate(&clip, &Grammar::builtin(), &lexicon, &gen)?;
    eprintln!(
        "described clip {} in {} ms",
        clip.id,
        started.elapsed().as_millis()
    );

    let doc = GenerateDocument {
        clip_id: clip.id.clone(),
        sentence: best.as_ref().map(|g| g.sentence.clone()),
        tau: best.as_ref().map(|g| g.tau),
    };
    emit(args.out.as_deref(), &doc)?;
    Ok(if best.is_some() { 0 } else { EXIT_UNSATISFIABLE })
}

// ---------------------------------------------------------------------------
// retrieve
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct RetrieveDocument {
    sentence: String,
    clips_scored: usize,
    ranked: Vec<RankEntry>,
}

#[derive(Serialize)]
struct RankEntry {
    rank: usize,
    clip_id: String,
    satisfiable: bool,
    /// JSON `null` when −∞.
    tau: f64,
}

/// A corpus directory is either a flat directory of clip files or the
/// layout `simulate` writes, with clips under `clips/`.
fn clips_dir(corpus_dir: &Path) -> PathBuf {
    let nested = corpus_dir.join("clips");
    if nested.is_dir() {
        nested
    } else {
        corpus_dir.to_path_buf()
    }
}

fn cmd_retrieve(cli: &Cli, config: &FileConfig, args: &RetrieveArgs) -> Result<u8> {
    let lexicon = io::load_lexicon(cli.lexicon.as_deref())?;
    let corpus = io::load_corpus(&clips_dir(&args.corpus_dir))?;
    let tracker = config.tracker_config();
    let jobs = args.jobs.unwrap_or(config.retrieval.jobs);
    let top = args.top.unwrap_or(config.retrieval.top);

    let query = [io::SentenceEntry {
        id: String::from("query"),
        text: args.sentence.clone(),
    }];
    let started = Instant::now();
    let lists = eval::score_matrix(&corpus, &query, &lexicon, &tracker, jobs)?;
    eprintln!(
        "scored {} clips in {} ms",
        corpus.len(),
        started.elapsed().as_millis()
    );

    let ranked = lists[0]
        .entries
        .iter()
        .take(top)
        .enumerate()
        .map(|(i, (clip_id, tau))| RankEntry {
            rank: i + 1,
            clip_id: clip_id.clone(),
            satisfiable: tau.is_finite(),
            tau: *tau,
        })
        .collect();
    emit(
        args.out.as_deref(),
        &RetrieveDocument {
            sentence: args.sentence.clone(),
            clips_scored: corpus.len(),
            ranked,
        },
    )?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(args: &SimulateArgs) -> Result<u8> {
    let mut manifest = match &args.manifest {
        Some(path) => sim::Manifest::load(path)?,
        None => match args.corpus.as_str() {
            "default" => sim::Manifest::default_corpus(),
            "minimal-pairs" => sim::Manifest::minimal_pairs(),
            other => bail!("unknown built-in corpus `{other}` (default, minimal-pairs)"),
        },
    };
    if let Some(s) = args.jitter_sigma {
        manifest.noise.jitter_sigma = s;
    }
    if let Some(s) = args.score_sigma {
        manifest.noise.score_sigma = s;
    }
    if let Some(r) = args.fp_rate {
        manifest.noise.fp_rate = r;
    }
    if let Some(r) = args.misclass_rate {
        manifest.noise.misclass_rate = r;
    }
    if args.allow_partial {
        manifest.allow_partial = true;
    }

    let summary = sim::simulate_corpus(&manifest, &args.out_dir, args.seed)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(0)
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EvalDocument {
    clips: usize,
    sentences: usize,
    retrieval: eval::RetrievalSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    generation: Option<eval::GenerationOutcome>,
}

fn cmd_eval(cli: &Cli, config: &FileConfig, args: &EvalArgs) -> Result<u8> {
    let lexicon = io::load_lexicon(cli.lexicon.as_deref())?;
    let corpus = io::load_corpus(&args.corpus_dir.join("clips"))?;
    let judgments = io::load_judgments(&args.corpus_dir.join("judgments.txt"))?;
    let sentences = io::load_sentences(&args.corpus_dir.join("sentences.txt"))?;
    let tracker = config.tracker_config();
    let folds = args.folds.unwrap_or(config.retrieval.folds);
    let jobs = args.jobs.unwrap_or(config.retrieval.jobs);

    let started = Instant::now();
    let lists = eval::score_matrix(&corpus, &sentences, &lexicon, &tracker, jobs)?;
    let elapsed = started.elapsed();
    eprintln!(
        "scored {} pairs in {:.1} s ({} ms per clip)",
        corpus.len() * sentences.len(),
        elapsed.as_secs_f64(),
        elapsed.as_millis() / corpus.len() as u128
    );
    let retrieval = eval::summarize(&lists, &judgments, folds, args.seed)?;

    let generation = if args.no_generation {
        None
    } else {
        let truths = sim::load_truths(&args.corpus_dir.join("truth"))?;
        let started = Instant::now();
        let outcome = eval::generation_pass(
            &corpus,
            &truths,
            &Grammar::builtin(),
            &lexicon,
            &config.gen_config(),
            jobs,
        )?;
        let elapsed = started.elapsed();
        eprintln!(
            "described {} clips in {:.1} s ({} ms per clip)",
            corpus.len(),
            elapsed.as_secs_f64(),
            elapsed.as_millis() / corpus.len() as u128
        );
        Some(outcome)
    };

    emit(
        args.out.as_deref(),
        &EvalDocument {
            clips: corpus.len(),
            sentences: sentences.len(),
            retrieval,
            generation,
        },
    )?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// oracle-check
// ---------------------------------------------------------------------------

fn cmd_oracle_check(args: &OracleCheckArgs) -> Result<u8> {
    if args.trials == 0 {
        eprintln!("warning: 0 trials requested; passing trivially");
        println!("oracle-check: PASS (0 instances)");
        return Ok(0);
    }
    let options = check::CheckOptions {
        trials: args.trials,
        seed: args.seed,
        max_frames: args.max_frames,
        max_detections: args.max_detections,
        max_participants: args.max_participants,
        max_words: args.max_words,
        inject_bug: args.inject_bug,
    };
    let started = Instant::now();
    let outcome = check::run(&options)?;
    eprintln!(
        "compared {} instances in {:.1} s",
        outcome.trials,
        started.elapsed().as_secs_f64()
    );
    match outcome.divergence {
        None => {
            println!(
                "oracle-check: PASS ({} instances, {} satisfiable, {} unsatisfiable)",
                outcome.trials, outcome.finite, outcome.unsatisfiable
            );
            Ok(0)
        }
        Some(report) => {
            println!("oracle-check: FAIL\n{report}");
            Ok(1)
        }
    }
}
