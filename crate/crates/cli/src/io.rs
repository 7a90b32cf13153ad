//! On-disk formats: clips and corpora, judgments, sentence inventories,
//! and lexicon files.

use anyhow::{bail, Context, Result};
use sentrack_core::clip::Clip;
use sentrack_core::lexicon::Lexicon;
use sentrack_core::retrieve::Judgment;
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

pub fn load_clip(path: &Path) -> Result<Clip> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let clip = Clip::from_json(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(clip)
}

pub fn save_clip(clip: &Clip, path: &Path) -> Result<()> {
    write_text(path, &(clip.to_json() + "\n"))
}

/// Load every `*.json` clip in `dir`, ordered by file name. Fails on an
/// empty or duplicate-id corpus so downstream ranking is well-defined.
pub fn load_corpus(dir: &Path) -> Result<Vec<Clip>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading corpus directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no clip files (*.json) in {}", dir.display());
    }
    let mut seen = BTreeSet::new();
    let mut corpus = Vec::with_capacity(paths.len());
    for path in &paths {
        let clip = load_clip(path)?;
        if !seen.insert(clip.id.clone()) {
            bail!("duplicate clip id `{}` in {}", clip.id, path.display());
        }
        corpus.push(clip);
    }
    Ok(corpus)
}

/// Judgments: one `clip_id sentence_id 0|1` record per line; `#` comments
/// and blank lines ignored.
pub fn load_judgments(path: &Path) -> Result<Vec<Judgment>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut judgments = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [clip_id, sentence_id, flag] = fields[..] else {
            bail!(
                "{}:{}: expected `clip_id sentence_id 0|1`, got `{line}`",
                path.display(),
                lineno + 1
            );
        };
        let depicted = match flag {
            "0" => false,
            "1" => true,
            other => bail!(
                "{}:{}: depicted flag must be 0 or 1, got `{other}`",
                path.display(),
                lineno + 1
            ),
        };
        if !seen.insert((clip_id.to_string(), sentence_id.to_string())) {
            bail!(
                "{}:{}: duplicate judgment for ({clip_id}, {sentence_id})",
                path.display(),
                lineno + 1
            );
        }
        judgments.push(Judgment {
            clip_id: clip_id.to_string(),
            sentence_id: sentence_id.to_string(),
            depicted,
        });
    }
    if judgments.is_empty() {
        bail!("{}: no judgment records", path.display());
    }
    Ok(judgments)
}

pub fn save_judgments(judgments: &[Judgment], path: &Path) -> Result<()> {
    let mut out = String::from("# clip_id sentence_id depicted\n");
    for j in judgments {
        out.push_str(&format!(
            "{} {} {}\n",
            j.clip_id,
            j.sentence_id,
            u8::from(j.depicted)
        ));
    }
    write_text(path, &out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceEntry {
    pub id: String,
    pub text: String,
}

/// Sentence inventory: one `id<TAB>text` per line.
pub fn load_sentences(path: &Path) -> Result<Vec<SentenceEntry>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut sentences = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((id, sentence)) = line.split_once('\t') else {
            bail!(
                "{}:{}: expected `id<TAB>sentence`, got `{line}`",
                path.display(),
                lineno + 1
            );
        };
        if !seen.insert(id.to_string()) {
            bail!("{}:{}: duplicate sentence id `{id}`", path.display(), lineno + 1);
        }
        sentences.push(SentenceEntry {
            id: id.to_string(),
            text: sentence.trim().to_string(),
        });
    }
    if sentences.is_empty() {
        bail!("{}: no sentences", path.display());
    }
    Ok(sentences)
}

pub fn save_sentences(sentences: &[SentenceEntry], path: &Path) -> Result<()> {
    let mut out = String::new();
    for s in sentences {
        out.push_str(&format!("{}\t{}\n", s.id, s.text));
    }
    write_text(path, &out)
}

/// The built-in lexicon, or a replacement loaded from a DSL file.
pub fn load_lexicon(path: Option<&Path>) -> Result<Lexicon> {
    match path {
        None => Ok(Lexicon::builtin()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Lexicon::from_dsl(&text).with_context(|| format!("in {}", path.display()))
        }
    }
}

/// Write creating parent directories as needed.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}
