//! Scoring, candidate ranking, and the metric suite (H@k, mean rank, AUC;
//! raw and filtered) for subsumption/link-prediction queries and the
//! equivalence-entailment task.
//!
//! All scores are oriented higher-is-better. Ranks are 1-based; a tied true
//! entity receives the mean position of its tie group, so ranks may be
//! fractional.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::ontology::{ConceptId, RelationId};
use crate::trainer::ModelParams;

/// A `head ⊑ ∃relation.tail` query: rank `head` among all candidate heads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsumptionQuery {
    pub head: ConceptId,
    pub relation: RelationId,
    pub tail: ConceptId,
}

/// Plausibility of `head ⊑ ∃relation.tail`:
/// `-||max(0, |e_c(head) + e_c(rel) - e_c(tail)| - e_o(head) - e_o(tail))||`.
/// Always ≤ 0; 0 means the translated gap is closed in every dimension.
pub fn score_subsumption(
    params: &ModelParams,
    head: ConceptId,
    relation: RelationId,
    tail: ConceptId,
) -> Result<f64> {
    let hc = params.concept_center(head)?;
    let rc = params.relation_vec(relation)?;
    let tc = params.concept_center(tail)?;
    let ho = params.concept_offset(head)?;
    let to = params.concept_offset(tail)?;
    let sq: f64 = (0..params.dim())
        .map(|i| {
            let g = ((hc[i] + rc[i] - tc[i]).abs() - ho[i] - to[i]).max(0.0);
            g * g
        })
        .sum();
    Ok(-sq.sqrt())
}

/// Mean-tie-group rank of the entry with score `true_score` among `scores`
/// (descending order, 1-based). `scores` excludes the true entry itself.
fn rank_among(true_score: f64, scores: impl Iterator<Item = f64>) -> f64 {
    let mut better = 0usize;
    let mut tied = 0usize;
    for s in scores {
        if s > true_score {
            better += 1;
        } else if s == true_score {
            tied += 1;
        }
    }
    better as f64 + (tied as f64 + 2.0) / 2.0
}

/// Raw and filtered rank of the query's true head among `candidates`.
///
/// The filtered rank drops every candidate other than the true head whose
/// `(candidate, relation, tail)` triple is a known positive in `filter_set`.
pub fn rank_query(
    query: &SubsumptionQuery,
    candidates: &[ConceptId],
    params: &ModelParams,
    filter_set: &HashSet<(usize, usize, usize)>,
) -> Result<(f64, f64)> {
    if !candidates.contains(&query.head) {
        return Err(Error::Config(format!(
            "true head {:?} missing from candidate pool",
            query.head
        )));
    }
    let true_score = score_subsumption(params, query.head, query.relation, query.tail)?;
    let mut others_raw = Vec::with_capacity(candidates.len() - 1);
    let mut others_filtered = Vec::with_capacity(candidates.len() - 1);
    let mut seen_true = false;
    for &cand in candidates {
        if cand == query.head && !seen_true {
            seen_true = true;
            continue;
        }
        let s = score_subsumption(params, cand, query.relation, query.tail)?;
        others_raw.push(s);
        if !filter_set.contains(&(cand.0, query.relation.0, query.tail.0)) {
            others_filtered.push(s);
        }
    }
    let raw = rank_among(true_score, others_raw.into_iter());
    let filtered = rank_among(true_score, others_filtered.into_iter());
    Ok((raw, filtered))
}

/// Aggregated ranking metrics over one rank list.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    /// (k, fraction of ranks ≤ k), in the order the ks were given.
    pub hits_at: Vec<(usize, f64)>,
    pub mean_rank: f64,
    /// Rank-based AUC: mean over queries of `(N - rank) / (N - 1)`.
    pub auc: f64,
}

/// Computes H@k, mean rank, and rank-based AUC for a rank list over a pool
/// of `num_candidates`. A single-candidate pool contributes AUC 1.
pub fn aggregate_metrics(ranks: &[f64], num_candidates: usize, ks: &[usize]) -> MetricSummary {
    let n = ranks.len() as f64;
    if ranks.is_empty() {
        return MetricSummary {
            hits_at: ks.iter().map(|&k| (k, 0.0)).collect(),
            mean_rank: 0.0,
            auc: 0.0,
        };
    }
    let hits_at = ks
        .iter()
        .map(|&k| {
            let h = ranks.iter().filter(|&&r| r <= k as f64).count() as f64 / n;
            (k, h)
        })
        .collect();
    let mean_rank = ranks.iter().sum::<f64>() / n;
    let auc = ranks
        .iter()
        .map(|&r| {
            if num_candidates <= 1 {
                1.0
            } else {
                (num_candidates as f64 - r) / (num_candidates as f64 - 1.0)
            }
        })
        .sum::<f64>()
        / n;
    MetricSummary {
        hits_at,
        mean_rank,
        auc,
    }
}

/// Per-query ranks plus aggregated metrics, raw and filtered. Both summaries
/// are normalized by the same (raw) candidate count so filtered metrics
/// dominate raw ones.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingReport {
    pub raw_ranks: Vec<f64>,
    pub filtered_ranks: Vec<f64>,
    pub num_candidates: usize,
    pub raw: MetricSummary,
    pub filtered: MetricSummary,
}

impl RankingReport {
    pub fn from_ranks(
        raw_ranks: Vec<f64>,
        filtered_ranks: Vec<f64>,
        num_candidates: usize,
        ks: &[usize],
    ) -> Self {
        let raw = aggregate_metrics(&raw_ranks, num_candidates, ks);
        let filtered = aggregate_metrics(&filtered_ranks, num_candidates, ks);
        Self {
            raw_ranks,
            filtered_ranks,
            num_candidates,
            raw,
            filtered,
        }
    }
}

/// Closeness of `e_c(E)` to the midpoint of the formal intersection of the
/// boxes of C and D, negated so higher is better (0 is a perfect match).
pub fn score_equiv_box(
    params: &ModelParams,
    c: ConceptId,
    d: ConceptId,
    e: ConceptId,
) -> Result<f64> {
    let cc = params.concept_center(c)?;
    let oc = params.concept_offset(c)?;
    let dc = params.concept_center(d)?;
    let od = params.concept_offset(d)?;
    let ec = params.concept_center(e)?;
    let sq: f64 = (0..params.dim())
        .map(|i| {
            let box_min = (cc[i] - oc[i]).max(dc[i] - od[i]);
            let box_max = (cc[i] + oc[i]).min(dc[i] + od[i]);
            let mid = (box_min + box_max) / 2.0;
            let diff = mid - ec[i];
            diff * diff
        })
        .sum();
    Ok(-sq.sqrt())
}

/// An n-ball embedding, used only for scoring the ball-based comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct BallEmbedding {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BallEmbedding {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::Config(format!("ball radius must be >= 0, got {radius}")));
        }
        Ok(Self { center, radius })
    }
}

/// Ball analogue of [`score_equiv_box`]: distance from `e`'s center to the
/// center of the smallest ball containing the intersection of `c` and `d`,
/// negated. Coincident centers fall back to `c`'s center.
pub fn score_equiv_ball(c: &BallEmbedding, d: &BallEmbedding, e: &BallEmbedding) -> f64 {
    let delta: Vec<f64> = d
        .center
        .iter()
        .zip(&c.center)
        .map(|(dv, cv)| dv - cv)
        .collect();
    let norm = delta.iter().map(|x| x * x).sum::<f64>().sqrt();
    let k = if norm > 0.0 {
        let h = (c.radius * c.radius - d.radius * d.radius + norm * norm) / (2.0 * norm);
        h / norm
    } else {
        0.0
    };
    let sq: f64 = c
        .center
        .iter()
        .zip(&delta)
        .zip(&e.center)
        .map(|((cv, dv), ev)| {
            let p = cv + k * dv - ev;
            p * p
        })
        .sum();
    -sq.sqrt()
}

/// Ranks the true E of each heldout `(C, D, E)` triple among
/// `candidate_concepts` by [`score_equiv_box`]. No filtering applies, so the
/// filtered side of the report equals the raw side.
pub fn evaluate_equivalence(
    heldout: &[(ConceptId, ConceptId, ConceptId)],
    params: &ModelParams,
    candidate_concepts: &[ConceptId],
    ks: &[usize],
) -> Result<RankingReport> {
    let mut ranks = Vec::with_capacity(heldout.len());
    for &(c, d, e) in heldout {
        if !candidate_concepts.contains(&e) {
            return Err(Error::Config(format!(
                "true concept {e:?} missing from candidate pool"
            )));
        }
        let true_score = score_equiv_box(params, c, d, e)?;
        let mut others = Vec::with_capacity(candidate_concepts.len() - 1);
        let mut seen_true = false;
        for &cand in candidate_concepts {
            if cand == e && !seen_true {
                seen_true = true;
                continue;
            }
            others.push(score_equiv_box(params, c, d, cand)?);
        }
        ranks.push(rank_among(true_score, others.into_iter()));
    }
    Ok(RankingReport::from_ranks(
        ranks.clone(),
        ranks,
        candidate_concepts.len(),
        ks,
    ))
}
