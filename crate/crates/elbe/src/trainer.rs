//! Parameter tables, initialization, negative sampling, the Adam loop, and
//! text checkpoints.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{ConceptBox, Margin};
use crate::losses::{self, GradMap, ParamSlot};
use crate::ontology::{AxiomSet, ConceptId, NormalizedAxiom, RelationId, Vocabulary};

/// Dense embedding tables: one center and one offset row per concept, one
/// translation vector per relation. Offsets stay elementwise non-negative
/// after every optimizer step.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    dim: usize,
    num_concepts: usize,
    num_relations: usize,
    concept_centers: Vec<f64>,
    concept_offsets: Vec<f64>,
    relation_vecs: Vec<f64>,
}

impl ModelParams {
    pub fn zeros(dim: usize, num_concepts: usize, num_relations: usize) -> Self {
        Self {
            dim,
            num_concepts,
            num_relations,
            concept_centers: vec![0.0; num_concepts * dim],
            concept_offsets: vec![0.0; num_concepts * dim],
            relation_vecs: vec![0.0; num_relations * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_concepts(&self) -> usize {
        self.num_concepts
    }

    pub fn num_relations(&self) -> usize {
        self.num_relations
    }

    fn concept_range(&self, c: ConceptId) -> Result<std::ops::Range<usize>> {
        if c.0 >= self.num_concepts {
            return Err(Error::UnknownId {
                kind: "concept",
                index: c.0,
            });
        }
        Ok(c.0 * self.dim..(c.0 + 1) * self.dim)
    }

    fn relation_range(&self, r: RelationId) -> Result<std::ops::Range<usize>> {
        if r.0 >= self.num_relations {
            return Err(Error::UnknownId {
                kind: "relation",
                index: r.0,
            });
        }
        Ok(r.0 * self.dim..(r.0 + 1) * self.dim)
    }

    pub fn concept_center(&self, c: ConceptId) -> Result<&[f64]> {
        Ok(&self.concept_centers[self.concept_range(c)?])
    }

    pub fn concept_offset(&self, c: ConceptId) -> Result<&[f64]> {
        Ok(&self.concept_offsets[self.concept_range(c)?])
    }

    pub fn relation_vec(&self, r: RelationId) -> Result<&[f64]> {
        Ok(&self.relation_vecs[self.relation_range(r)?])
    }

    pub fn concept_box(&self, c: ConceptId) -> Result<ConceptBox> {
        ConceptBox::new(
            self.concept_center(c)?.to_vec(),
            self.concept_offset(c)?.to_vec(),
        )
    }

    pub fn set_concept(&mut self, c: ConceptId, center: &[f64], offset: &[f64]) -> Result<()> {
        let range = self.concept_range(c)?;
        if center.len() != self.dim || offset.len() != self.dim {
            return Err(Error::DimMismatch {
                left: center.len(),
                right: self.dim,
            });
        }
        self.concept_centers[range.clone()].copy_from_slice(center);
        self.concept_offsets[range].copy_from_slice(offset);
        Ok(())
    }

    pub fn set_relation(&mut self, r: RelationId, vec: &[f64]) -> Result<()> {
        let range = self.relation_range(r)?;
        if vec.len() != self.dim {
            return Err(Error::DimMismatch {
                left: vec.len(),
                right: self.dim,
            });
        }
        self.relation_vecs[range].copy_from_slice(vec);
        Ok(())
    }

    pub fn offsets_non_negative(&self) -> bool {
        self.concept_offsets.iter().all(|&o| o >= 0.0)
    }

    pub fn all_finite(&self) -> bool {
        self.concept_centers
            .iter()
            .chain(&self.concept_offsets)
            .chain(&self.relation_vecs)
            .all(|v| v.is_finite())
    }
}

/// Training hyperparameters. Everything is seeded and reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    pub margin: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub negatives_per_positive: usize,
    pub seed: u64,
    pub init_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 50,
            margin: -0.05,
            learning_rate: 5e-3,
            epochs: 1000,
            batch_size: 32,
            negatives_per_positive: 1,
            seed: 42,
            init_scale: 0.5,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::Config("dim must be >= 1".into()));
        }
        if self.batch_size < 1 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        if !(self.margin.is_finite() && self.learning_rate.is_finite() && self.init_scale >= 0.0) {
            return Err(Error::Config("margin/lr/init_scale must be finite".into()));
        }
        Ok(())
    }

    /// Single-line summary echoed into checkpoints and manifests.
    pub fn echo(&self) -> String {
        format!(
            "dim={} margin={} lr={} epochs={} batch_size={} negatives={} seed={} init_scale={}",
            self.dim,
            self.margin,
            self.learning_rate,
            self.epochs,
            self.batch_size,
            self.negatives_per_positive,
            self.seed,
            self.init_scale
        )
    }
}

/// Seeded uniform initialization: centers and relation vectors in
/// `[-init_scale, init_scale]`, offsets in `[0, init_scale]`.
pub fn init_params(vocab: &Vocabulary, config: &TrainConfig) -> Result<ModelParams> {
    config.validate()?;
    if config.init_scale == 0.0 {
        log::warn!("init_scale is 0: starting from an all-zero degenerate model");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let s = config.init_scale;
    let mut params = ModelParams::zeros(config.dim, vocab.num_concepts(), vocab.num_relations());
    for v in params.concept_centers.iter_mut() {
        *v = if s == 0.0 { 0.0 } else { rng.gen_range(-s..=s) };
    }
    for v in params.concept_offsets.iter_mut() {
        *v = if s == 0.0 { 0.0 } else { rng.gen_range(0.0..=s) };
    }
    for v in params.relation_vecs.iter_mut() {
        *v = if s == 0.0 { 0.0 } else { rng.gen_range(-s..=s) };
    }
    Ok(params)
}

/// Adam moment tables plus step counter.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step: u64,
    m_centers: Vec<f64>,
    v_centers: Vec<f64>,
    m_offsets: Vec<f64>,
    v_offsets: Vec<f64>,
    m_relations: Vec<f64>,
    v_relations: Vec<f64>,
}

impl AdamState {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            m_centers: vec![0.0; params.concept_centers.len()],
            v_centers: vec![0.0; params.concept_centers.len()],
            m_offsets: vec![0.0; params.concept_offsets.len()],
            v_offsets: vec![0.0; params.concept_offsets.len()],
            m_relations: vec![0.0; params.relation_vecs.len()],
            v_relations: vec![0.0; params.relation_vecs.len()],
        }
    }
}

/// One bias-corrected Adam update from a sparse gradient map, followed by
/// clamping concept offsets to be non-negative.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &GradMap,
    state: &mut AdamState,
    lr: f64,
) -> Result<()> {
    let dim = params.dim;
    let mut g_centers = vec![0.0; params.concept_centers.len()];
    let mut g_offsets = vec![0.0; params.concept_offsets.len()];
    let mut g_relations = vec![0.0; params.relation_vecs.len()];
    for (slot, g) in grads {
        if g.len() != dim {
            return Err(Error::DimMismatch {
                left: g.len(),
                right: dim,
            });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("gradient for {slot:?}")));
        }
        let (table, idx) = match *slot {
            ParamSlot::ConceptCenter(i) => (&mut g_centers, i),
            ParamSlot::ConceptOffset(i) => (&mut g_offsets, i),
            ParamSlot::Relation(i) => (&mut g_relations, i),
        };
        let base = idx * dim;
        if base + dim > table.len() {
            return Err(Error::UnknownId {
                kind: "parameter slot",
                index: idx,
            });
        }
        table[base..base + dim].copy_from_slice(g);
    }

    state.step += 1;
    let bc1 = 1.0 - state.beta1.powi(state.step as i32);
    let bc2 = 1.0 - state.beta2.powi(state.step as i32);
    let update = |p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
        for i in 0..p.len() {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + state.epsilon);
        }
    };
    update(
        &mut params.concept_centers,
        &g_centers,
        &mut state.m_centers,
        &mut state.v_centers,
    );
    update(
        &mut params.concept_offsets,
        &g_offsets,
        &mut state.m_offsets,
        &mut state.v_offsets,
    );
    update(
        &mut params.relation_vecs,
        &g_relations,
        &mut state.m_relations,
        &mut state.v_relations,
    );
    for o in params.concept_offsets.iter_mut() {
        if *o < 0.0 {
            *o = 0.0;
        }
    }
    Ok(())
}

/// Index of known-true `C ⊑ ∃R.D` triples, used to filter negatives and
/// ranking candidates.
pub fn positive_nf3_index(axioms: &[NormalizedAxiom]) -> HashSet<(usize, usize, usize)> {
    axioms
        .iter()
        .filter_map(|a| match *a {
            NormalizedAxiom::Nf3 { c, r, d } => Some((c.0, r.0, d.0)),
            _ => None,
        })
        .collect()
}

/// Corrupts the tail of each NF3 axiom in the batch `k` times with a
/// uniformly random concept, resampling up to 100 times to avoid known
/// positives. Other normal forms contribute no negatives.
pub fn sample_negatives(
    batch: &[NormalizedAxiom],
    vocab: &Vocabulary,
    k: usize,
    positives: &HashSet<(usize, usize, usize)>,
    rng: &mut ChaCha8Rng,
) -> Vec<(ConceptId, RelationId, ConceptId)> {
    let n = vocab.num_concepts();
    if n == 0 || k == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for ax in batch {
        let (c, r) = match *ax {
            NormalizedAxiom::Nf3 { c, r, .. } => (c, r),
            _ => continue,
        };
        for _ in 0..k {
            for _attempt in 0..100 {
                let d_prime = rng.gen_range(0..n);
                if !positives.contains(&(c.0, r.0, d_prime)) {
                    out.push((c, r, ConceptId(d_prime)));
                    break;
                }
            }
        }
    }
    out
}

/// Per-epoch training record.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
    /// Mean raw rank over the validation NF3 axioms, when a validation set
    /// is supplied.
    pub valid_mean_rank: Option<f64>,
}

/// Full training loop: seeded shuffle, minibatches with sampled negatives,
/// Adam updates, per-epoch invariant checks. Aborts on non-finite loss or
/// parameters.
pub fn train(
    train_set: &AxiomSet,
    valid_set: &AxiomSet,
    config: &TrainConfig,
) -> Result<(ModelParams, Vec<EpochStats>)> {
    config.validate()?;
    if !valid_set.is_empty() && valid_set.vocabulary != train_set.vocabulary {
        return Err(Error::VocabMismatch(
            "train and validation sets use different vocabularies".into(),
        ));
    }
    let vocab = &train_set.vocabulary;
    let mut params = init_params(vocab, config)?;
    let mut state = AdamState::new(&params);
    let positives = positive_nf3_index(&train_set.axioms);
    let valid_queries: Vec<_> = valid_set
        .axioms
        .iter()
        .filter_map(|a| match *a {
            NormalizedAxiom::Nf3 { c, r, d } => Some(crate::evaluation::SubsumptionQuery {
                head: c,
                relation: r,
                tail: d,
            }),
            _ => None,
        })
        .collect();
    let candidates: Vec<ConceptId> = vocab.concept_ids().collect();
    let margin = Margin(config.margin);
    // distinct stream from the init draws
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    let mut history = Vec::with_capacity(config.epochs);
    let mut order: Vec<usize> = (0..train_set.len()).collect();

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<NormalizedAxiom> =
                chunk.iter().map(|&i| train_set.axioms[i]).collect();
            let negatives = sample_negatives(
                &batch,
                vocab,
                config.negatives_per_positive,
                &positives,
                &mut rng,
            );
            let loss = losses::batch_loss(&batch, &negatives, &params, margin)?;
            if !loss.value.is_finite() {
                return Err(Error::NonFinite(format!("batch loss at epoch {epoch}")));
            }
            total += loss.value;
            adam_step(&mut params, &loss.grads, &mut state, config.learning_rate)?;
        }
        if !params.offsets_non_negative() {
            return Err(Error::Config(format!(
                "offset invariant violated at epoch {epoch}"
            )));
        }
        if !params.all_finite() {
            return Err(Error::NonFinite(format!("parameters at epoch {epoch}")));
        }
        let valid_mean_rank = if valid_queries.is_empty() {
            None
        } else {
            let mut sum = 0.0;
            for q in &valid_queries {
                let (raw, _) =
                    crate::evaluation::rank_query(q, &candidates, &params, &positives)?;
                sum += raw;
            }
            Some(sum / valid_queries.len() as f64)
        };
        history.push(EpochStats {
            epoch,
            mean_loss: total / train_set.len().max(1) as f64,
            valid_mean_rank,
        });
    }
    Ok((params, history))
}

/// A loaded checkpoint: parameters plus the vocabulary they index and the
/// training-config echo line.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub vocabulary: Vocabulary,
    pub config_echo: String,
}

impl Checkpoint {
    pub fn require_dim(&self, dim: usize) -> Result<()> {
        if self.params.dim() != dim {
            return Err(Error::Checkpoint(format!(
                "expected dim {dim}, checkpoint has {}",
                self.params.dim()
            )));
        }
        Ok(())
    }
}

const CHECKPOINT_MAGIC: &str = "elbe-checkpoint";
const CHECKPOINT_VERSION: u32 = 1;

fn push_floats(line: &mut String, values: &[f64]) {
    for v in values {
        line.push(' ');
        // shortest round-trip decimal form
        line.push_str(&format!("{v}"));
    }
}

/// Writes a self-describing text checkpoint. Floats use the shortest decimal
/// representation that round-trips, so save→load is lossless.
pub fn save_checkpoint(
    params: &ModelParams,
    vocab: &Vocabulary,
    config_echo: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    if vocab.num_concepts() != params.num_concepts()
        || vocab.num_relations() != params.num_relations()
    {
        return Err(Error::VocabMismatch(
            "vocabulary size does not match parameter tables".into(),
        ));
    }
    let mut out = String::new();
    out.push_str(&format!("{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}\n"));
    out.push_str(&format!("dim {}\n", params.dim()));
    out.push_str(&format!("concepts {}\n", params.num_concepts()));
    out.push_str(&format!("relations {}\n", params.num_relations()));
    out.push_str(&format!("config {}\n", config_echo.replace('\n', " ")));
    for (i, name) in vocab.concept_names().iter().enumerate() {
        let mut line = format!("concept {name}");
        push_floats(&mut line, params.concept_center(ConceptId(i))?);
        push_floats(&mut line, params.concept_offset(ConceptId(i))?);
        line.push('\n');
        out.push_str(&line);
    }
    for (i, name) in vocab.relation_names().iter().enumerate() {
        let mut line = format!("relation {name}");
        push_floats(&mut line, params.relation_vec(RelationId(i))?);
        line.push('\n');
        out.push_str(&line);
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let content = std::fs::read_to_string(path)?;
    let corrupt = |msg: &str| Error::Checkpoint(msg.to_string());
    let mut lines = content.lines();
    let header = lines.next().ok_or_else(|| corrupt("empty file"))?;
    let mut head = header.split_whitespace();
    if head.next() != Some(CHECKPOINT_MAGIC) {
        return Err(corrupt("not an elbe checkpoint"));
    }
    let version: u32 = head
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| corrupt("missing version"))?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported version {version}, expected {CHECKPOINT_VERSION}"
        )));
    }
    let mut field = |name: &str| -> Result<usize> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Checkpoint(format!("missing `{name}` line")))?;
        let rest = line
            .strip_prefix(name)
            .ok_or_else(|| Error::Checkpoint(format!("expected `{name}` line, got `{line}`")))?;
        rest.trim()
            .parse()
            .map_err(|_| Error::Checkpoint(format!("bad `{name}` value")))
    };
    let dim = field("dim")?;
    let num_concepts = field("concepts")?;
    let num_relations = field("relations")?;
    let config_line = lines
        .next()
        .ok_or_else(|| corrupt("missing `config` line"))?;
    let config_echo = config_line
        .strip_prefix("config")
        .ok_or_else(|| corrupt("expected `config` line"))?
        .trim()
        .to_string();

    let mut vocabulary = Vocabulary::new();
    let mut params = ModelParams::zeros(dim, num_concepts, num_relations);
    let parse_floats = |tok: &mut std::str::SplitWhitespace, n: usize| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let v: f64 = tok
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| corrupt("truncated float record"))?;
            out.push(v);
        }
        Ok(out)
    };
    for _ in 0..num_concepts {
        let line = lines.next().ok_or_else(|| corrupt("missing concept record"))?;
        let mut tok = line.split_whitespace();
        if tok.next() != Some("concept") {
            return Err(corrupt("expected concept record"));
        }
        let name = tok.next().ok_or_else(|| corrupt("concept record lacks name"))?;
        let id = vocabulary.intern_concept(name);
        let center = parse_floats(&mut tok, dim)?;
        let offset = parse_floats(&mut tok, dim)?;
        params.set_concept(id, &center, &offset)?;
    }
    for _ in 0..num_relations {
        let line = lines.next().ok_or_else(|| corrupt("missing relation record"))?;
        let mut tok = line.split_whitespace();
        if tok.next() != Some("relation") {
            return Err(corrupt("expected relation record"));
        }
        let name = tok.next().ok_or_else(|| corrupt("relation record lacks name"))?;
        let id = vocabulary.intern_relation(name);
        let vec = parse_floats(&mut tok, dim)?;
        params.set_relation(id, &vec)?;
    }
    if vocabulary.num_concepts() != num_concepts || vocabulary.num_relations() != num_relations {
        return Err(corrupt("duplicate symbol names in checkpoint"));
    }
    Ok(Checkpoint {
        params,
        vocabulary,
        config_echo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::parse_axioms;

    fn vocab_n(concepts: usize, relations: usize) -> Vocabulary {
        let mut v = Vocabulary::new();
        for i in 0..concepts {
            v.intern_concept(&format!("C{i}"));
        }
        for i in 0..relations {
            v.intern_relation(&format!("r{i}"));
        }
        v
    }

    #[test]
    fn init_is_deterministic_and_in_range() {
        let vocab = vocab_n(5, 2);
        let cfg = TrainConfig {
            dim: 4,
            seed: 9,
            init_scale: 0.3,
            ..TrainConfig::default()
        };
        let a = init_params(&vocab, &cfg).unwrap();
        let b = init_params(&vocab, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.offsets_non_negative());
        for i in 0..5 {
            for &v in a.concept_center(ConceptId(i)).unwrap() {
                assert!(v.abs() <= 0.3);
            }
            for &v in a.concept_offset(ConceptId(i)).unwrap() {
                assert!((0.0..=0.3).contains(&v));
            }
        }
    }

    #[test]
    fn init_scale_zero_gives_zero_model() {
        let vocab = vocab_n(2, 1);
        let cfg = TrainConfig {
            dim: 3,
            init_scale: 0.0,
            ..TrainConfig::default()
        };
        let p = init_params(&vocab, &cfg).unwrap();
        assert_eq!(p.concept_center(ConceptId(0)).unwrap(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn init_rejects_zero_dim() {
        let vocab = vocab_n(1, 0);
        let cfg = TrainConfig {
            dim: 0,
            ..TrainConfig::default()
        };
        assert!(init_params(&vocab, &cfg).is_err());
    }

    #[test]
    fn adam_zero_grad_is_noop() {
        let vocab = vocab_n(2, 1);
        let cfg = TrainConfig {
            dim: 2,
            ..TrainConfig::default()
        };
        let mut p = init_params(&vocab, &cfg).unwrap();
        let before = p.clone();
        let mut state = AdamState::new(&p);
        adam_step(&mut p, &GradMap::new(), &mut state, 0.01).unwrap();
        assert_eq!(p, before);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn adam_first_step_moves_by_lr() {
        // with g = 1 at t = 1: m_hat = 1, v_hat = 1, update = -lr/(1 + eps)
        let mut p = ModelParams::zeros(1, 1, 0);
        let mut state = AdamState::new(&p);
        let mut grads = GradMap::new();
        grads.insert(ParamSlot::ConceptCenter(0), vec![1.0]);
        adam_step(&mut p, &grads, &mut state, 0.01).unwrap();
        let v = p.concept_center(ConceptId(0)).unwrap()[0];
        assert!((v + 0.01).abs() < 1e-6, "moved to {v}");
    }

    #[test]
    fn adam_clamps_offsets() {
        let mut p = ModelParams::zeros(1, 1, 0);
        let mut state = AdamState::new(&p);
        let mut grads = GradMap::new();
        grads.insert(ParamSlot::ConceptOffset(0), vec![1.0]);
        adam_step(&mut p, &grads, &mut state, 0.5).unwrap();
        assert_eq!(p.concept_offset(ConceptId(0)).unwrap()[0], 0.0);
    }

    #[test]
    fn adam_rejects_non_finite_grads() {
        let mut p = ModelParams::zeros(1, 1, 0);
        let mut state = AdamState::new(&p);
        let mut grads = GradMap::new();
        grads.insert(ParamSlot::ConceptCenter(0), vec![f64::NAN]);
        assert!(adam_step(&mut p, &grads, &mut state, 0.01).is_err());
    }

    #[test]
    fn negatives_avoid_positives() {
        let set = parse_axioms("nf3 A r B\nnf3 A r C\nnf1 A B\n", "<t>").unwrap();
        let positives = positive_nf3_index(&set.axioms);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let neg = sample_negatives(&set.axioms, &set.vocabulary, 5, &positives, &mut rng);
        // only the two NF3 axioms contribute
        assert_eq!(neg.len(), 10);
        for (c, r, d) in neg {
            assert!(!positives.contains(&(c.0, r.0, d.0)));
        }
    }

    #[test]
    fn negatives_empty_cases() {
        let set = parse_axioms("nf1 A B\n", "<t>").unwrap();
        let positives = positive_nf3_index(&set.axioms);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_negatives(&set.axioms, &set.vocabulary, 3, &positives, &mut rng).is_empty());
        let set = parse_axioms("nf3 A r B\n", "<t>").unwrap();
        assert!(sample_negatives(&set.axioms, &set.vocabulary, 0, &positives, &mut rng).is_empty());
    }

    #[test]
    fn zero_epochs_returns_init() {
        let set = parse_axioms("nf1 A B\n", "<t>").unwrap();
        let cfg = TrainConfig {
            dim: 2,
            epochs: 0,
            ..TrainConfig::default()
        };
        let empty = AxiomSet {
            axioms: vec![],
            vocabulary: set.vocabulary.clone(),
        };
        let (params, history) = train(&set, &empty, &cfg).unwrap();
        assert!(history.is_empty());
        assert_eq!(params, init_params(&set.vocabulary, &cfg).unwrap());
    }

    #[test]
    fn training_is_deterministic() {
        let set = crate::ontology::generate_family_domain();
        let cfg = TrainConfig {
            dim: 2,
            margin: 0.0,
            epochs: 25,
            negatives_per_positive: 1,
            seed: 5,
            ..TrainConfig::default()
        };
        let empty = AxiomSet {
            axioms: vec![],
            vocabulary: set.vocabulary.clone(),
        };
        let (pa, ha) = train(&set, &empty, &cfg).unwrap();
        let (pb, hb) = train(&set, &empty, &cfg).unwrap();
        assert_eq!(pa, pb);
        assert_eq!(ha, hb);
        assert!(pa.offsets_non_negative());
        assert!(pa.all_finite());
    }

    #[test]
    fn family_loss_decreases_to_near_zero() {
        let set = crate::ontology::generate_family_domain();
        let cfg = TrainConfig {
            dim: 2,
            margin: 0.0,
            learning_rate: 5e-3,
            epochs: 2000,
            batch_size: 12,
            negatives_per_positive: 0,
            seed: 1,
            init_scale: 0.5,
        };
        let empty = AxiomSet {
            axioms: vec![],
            vocabulary: set.vocabulary.clone(),
        };
        let (_, history) = train(&set, &empty, &cfg).unwrap();
        let last = history.last().unwrap();
        assert!(
            last.mean_loss * (set.len() as f64) < 0.01,
            "final total loss {} too high",
            last.mean_loss * set.len() as f64
        );
    }

    #[test]
    fn checkpoint_roundtrip() {
        let vocab = vocab_n(3, 2);
        let cfg = TrainConfig {
            dim: 5,
            seed: 77,
            ..TrainConfig::default()
        };
        let params = init_params(&vocab, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.txt");
        save_checkpoint(&params, &vocab, &cfg.echo(), &path).unwrap();
        let ck = load_checkpoint(&path).unwrap();
        assert_eq!(ck.params, params);
        assert_eq!(ck.vocabulary.concept_names(), vocab.concept_names());
        assert_eq!(ck.vocabulary.relation_names(), vocab.relation_names());
        assert_eq!(ck.config_echo, cfg.echo());
        assert!(ck.require_dim(5).is_ok());
        assert!(ck.require_dim(2).is_err());
    }

    #[test]
    fn checkpoint_empty_vocabulary() {
        let vocab = Vocabulary::new();
        let params = ModelParams::zeros(4, 0, 0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.txt");
        save_checkpoint(&params, &vocab, "", &path).unwrap();
        let ck = load_checkpoint(&path).unwrap();
        assert_eq!(ck.params.num_concepts(), 0);
    }

    #[test]
    fn checkpoint_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "not a checkpoint\n").unwrap();
        assert!(load_checkpoint(&path).is_err());
        std::fs::write(&path, "elbe-checkpoint 99\ndim 2\n").unwrap();
        let err = load_checkpoint(&path).unwrap_err();
        assert!(err.to_string().contains("version"));
    }
}
