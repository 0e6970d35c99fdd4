//! On-disk formats, record validation, and the synthetic dataset generator.
//!
//! Instances live in line-delimited JSON; embedding matrices live in a
//! separate binary container keyed by image id so large tensors stay out of
//! the text format. Floats are little-endian f32 on disk and are promoted to
//! f64 in memory for every numerical path.

mod container;
mod synth;

pub use container::{
    read_embeddings, read_fact_embeddings, read_params, read_question_embeddings,
    write_embeddings, write_fact_embeddings, write_params, write_question_embeddings, DType,
    EMBEDDING_MAGIC, PARAMS_SECTION_TAG,
};
pub use synth::{
    gold_token_sequence, render_generated_answer, vocab_size, InstanceTruth, PlantedAnomaly,
    SynthConfig, SynthDataset, ANOMALY_TYPE_NAMES, TOKEN_BOS, TOKEN_EOS, TOKEN_NORMAL,
    TOKEN_TYPE_BASE,
};

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Matrix;
use crate::util::fnv1a64;

/// Instruction appended to every question so the model attends to the fact
/// features placed ahead of it in the input sequence.
pub const AUX_PROMPT: &str = "Above is the feature related to the anomaly facts";

/// Question difficulty tiers used for per-tier accuracy reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Standard,
    Identification,
    Reasoning,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [
        Difficulty::Standard,
        Difficulty::Identification,
        Difficulty::Reasoning,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Difficulty::Standard => "standard",
            Difficulty::Identification => "identification",
            Difficulty::Reasoning => "reasoning",
        }
    }
}

/// One question over a test/reference image pair with rank-ordered candidate
/// answers. Rank is encoded purely by list position: index 0 is rank 1 (best).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QAInstance {
    pub instance_id: String,
    pub test_image_id: String,
    pub reference_image_id: String,
    pub question: String,
    pub answers: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_answer_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_id: Option<String>,
    pub difficulty: Difficulty,
}

impl QAInstance {
    /// Checks the per-record invariants.
    pub fn validate(&self) -> Result<()> {
        if self.answers.is_empty() {
            return Err(Error::validation("answers", "answer list must be non-empty"));
        }
        if let Some(idx) = self.gold_answer_index {
            if idx >= self.answers.len() {
                return Err(Error::validation(
                    "gold_answer_index",
                    format!("{idx} out of range for {} answers", self.answers.len()),
                ));
            }
        }
        Ok(())
    }

    /// Number of candidate answers (the preference list length).
    pub fn answer_count(&self) -> usize {
        self.answers.len()
    }
}

/// Per-image patch embedding matrix with its grid metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBundle<T> {
    pub image_id: String,
    /// `(grid_rows * grid_cols) × C`, row-major over the patch grid.
    pub patches: Matrix<T>,
    pub grid_shape: (usize, usize),
    pub dtype: DType,
}

impl<T: Scalar> EmbeddingBundle<T> {
    pub fn validate(&self, embed_dim: usize) -> Result<()> {
        let want_rows = self.grid_shape.0 * self.grid_shape.1;
        if self.patches.rows() != want_rows {
            return Err(Error::validation(
                "patches",
                format!(
                    "row count {} does not match grid {}x{}",
                    self.patches.rows(),
                    self.grid_shape.0,
                    self.grid_shape.1
                ),
            ));
        }
        if self.patches.cols() != embed_dim {
            return Err(Error::validation(
                "patches",
                format!("width {} does not match C={embed_dim}", self.patches.cols()),
            ));
        }
        if !self.patches.is_finite() {
            return Err(Error::validation("patches", "non-finite entry in payload"));
        }
        Ok(())
    }
}

/// Fact sentences for one image together with their pooled embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct FactSet<T> {
    pub image_id: String,
    pub sentences: Vec<String>,
    /// `L_F × C`; row i pools the encoding of sentence i.
    pub pooled_embeddings: Matrix<T>,
}

impl<T: Scalar> FactSet<T> {
    pub fn validate(&self) -> Result<()> {
        if self.pooled_embeddings.rows() != self.sentences.len() {
            return Err(Error::validation(
                "pooled_embeddings",
                format!(
                    "{} embedding rows for {} sentences",
                    self.pooled_embeddings.rows(),
                    self.sentences.len()
                ),
            ));
        }
        if !self.pooled_embeddings.is_finite() {
            return Err(Error::validation(
                "pooled_embeddings",
                "non-finite entry in payload",
            ));
        }
        Ok(())
    }
}

/// Encoded question token matrix for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionEmbedding<T> {
    pub instance_id: String,
    /// `L_q × C` token embeddings.
    pub tokens: Matrix<T>,
    /// Whether [`AUX_PROMPT`] has already been appended; appending happens at
    /// ingestion so downstream stages never double-append.
    pub augmented_prompt_applied: bool,
}

impl<T: Scalar> QuestionEmbedding<T> {
    pub fn validate(&self) -> Result<()> {
        if self.tokens.rows() == 0 {
            return Err(Error::validation("tokens", "question must have at least one row"));
        }
        if !self.tokens.is_finite() {
            return Err(Error::validation("tokens", "non-finite entry in payload"));
        }
        Ok(())
    }
}

/// Embedding row standing in for the encoded [`AUX_PROMPT`]. Fixed for the
/// lifetime of the format: derived from the prompt text, not from any seed.
pub fn aux_prompt_row<T: Scalar>(embed_dim: usize) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a64(AUX_PROMPT.as_bytes()));
    let raw: Vec<f64> = (0..embed_dim)
        .map(|_| rand::Rng::random_range(&mut rng, -1.0..=1.0))
        .collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
    raw.iter()
        .map(|&x| T::from_f64((x / norm) as f32 as f64))
        .collect()
}

/// Appends the auxiliary instruction row unless it is already present.
pub fn augment_question<T: Scalar>(question: &mut QuestionEmbedding<T>) {
    if question.augmented_prompt_applied {
        return;
    }
    let row = aux_prompt_row::<T>(question.tokens.cols());
    let extra = Matrix::from_rows(&[row]);
    question.tokens = Matrix::vstack(&[&question.tokens, &extra]);
    question.augmented_prompt_applied = true;
}

/// Reads newline-delimited instance records, validating each one.
pub fn load_instances(path: &Path) -> Result<Vec<QAInstance>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let inst: QAInstance = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: lineno + 1,
            msg: e.to_string(),
        })?;
        inst.validate()?;
        out.push(inst);
    }
    Ok(out)
}

/// Writes instances as one JSON record per line.
pub fn write_instances(path: &Path, instances: &[QAInstance]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for inst in instances {
        serde_json::to_writer(&mut w, inst).map_err(|e| Error::Format(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Checks the evaluation-set invariant: every group id present maps to
/// exactly five instances.
pub fn validate_group_sizes(instances: &[QAInstance]) -> Result<()> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for inst in instances {
        if let Some(g) = &inst.group_id {
            *counts.entry(g.as_str()).or_default() += 1;
        }
    }
    for (group, count) in counts {
        if count != 5 {
            return Err(Error::validation(
                "group_id",
                format!("group {group} has {count} members, expected 5"),
            ));
        }
    }
    Ok(())
}

/// Reads fact sentences (JSONL) and their pooled embeddings (binary
/// container) and joins them by image id.
pub fn read_facts(sentences_path: &Path, embeddings_path: &Path) -> Result<BTreeMap<String, FactSet<f64>>> {
    #[derive(Deserialize)]
    struct FactRecord {
        image_id: String,
        sentences: Vec<String>,
    }
    let text = fs::read_to_string(sentences_path)?;
    let pooled = read_fact_embeddings(embeddings_path)?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: FactRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: lineno + 1,
            msg: e.to_string(),
        })?;
        let emb = pooled.get(&rec.image_id).ok_or_else(|| {
            Error::validation("image_id", format!("no fact embeddings for {}", rec.image_id))
        })?;
        let set = FactSet {
            image_id: rec.image_id.clone(),
            sentences: rec.sentences,
            pooled_embeddings: emb.clone(),
        };
        set.validate()?;
        out.insert(rec.image_id, set);
    }
    Ok(out)
}

/// Writes fact sentences (JSONL) and pooled embeddings (binary container).
pub fn write_facts(
    sentences_path: &Path,
    embeddings_path: &Path,
    facts: &BTreeMap<String, FactSet<f64>>,
) -> Result<()> {
    #[derive(Serialize)]
    struct FactRecord<'a> {
        image_id: &'a str,
        sentences: &'a [String],
    }
    let mut w = BufWriter::new(fs::File::create(sentences_path)?);
    for set in facts.values() {
        let rec = FactRecord {
            image_id: &set.image_id,
            sentences: &set.sentences,
        };
        serde_json::to_writer(&mut w, &rec).map_err(|e| Error::Format(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    let pooled: BTreeMap<String, Matrix<f64>> = facts
        .iter()
        .map(|(id, set)| (id.clone(), set.pooled_embeddings.clone()))
        .collect();
    write_fact_embeddings(embeddings_path, &pooled)
}

/// Reads instance truth records (JSONL).
pub fn load_truth(path: &Path) -> Result<BTreeMap<String, InstanceTruth>> {
    let text = fs::read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: InstanceTruth = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: lineno + 1,
            msg: e.to_string(),
        })?;
        out.insert(rec.instance_id.clone(), rec);
    }
    Ok(out)
}

/// Writes instance truth records (JSONL).
pub fn write_truth(path: &Path, truth: &BTreeMap<String, InstanceTruth>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for rec in truth.values() {
        serde_json::to_writer(&mut w, rec).map_err(|e| Error::Format(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
