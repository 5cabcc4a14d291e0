//! Watermark extraction by differential comparison.
//!
//! 1. Retrieve the most similar original ĉ from the candidate codebase.
//! 2. Rebuild the embedding plan on ĉ (same procedure as the embedder).
//! 3. Replay the plan on a running reconstruction r: for each bit, apply
//!    the rule the embedder would have used and keep it (bit = 1) only if
//!    it moves r strictly closer to the suspect text.

use serde::{Deserialize, Serialize};

use crate::corpus::{CandidateCodebase, CodeSnippet};
use crate::embedder::{self, EmbeddingPlan, WatermarkBits};
use crate::error::{Error, Result};
use crate::features::{extract_profile, sim_sem, Comparator, FeatureProfile, Signal, Similarities, SimilarityWeights};
use crate::llm::Backend;
use crate::par::Exec;
use crate::rules::TransformationRule;

/// Retrieval scores below this are flagged as low confidence.
pub const LOW_CONFIDENCE: f64 = 0.5;

/// Scores closer than this count as tied; the smaller id wins.
const SCORE_TIE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    #[serde(rename = "match")]
    pub matched: CodeSnippet,
    pub score: f64,
    pub breakdown: Similarities,
    pub runner_up_score: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodingPolicy {
    /// Required `sim_sem` improvement for a 1-bit.
    pub margin: f64,
}

impl Default for DecodingPolicy {
    fn default() -> Self {
        DecodingPolicy { margin: 0.0 }
    }
}

impl DecodingPolicy {
    pub fn new(margin: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&margin) {
            return Err(Error::InvalidArgument(format!("margin must be in [0, 1], got {margin}")));
        }
        Ok(DecodingPolicy { margin })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BitEvidence {
    pub bit: usize,
    /// Rule replayed for this bit; `None` when no rule could be applied.
    pub rule_id: Option<String>,
    pub sim_before: f64,
    pub sim_after: f64,
    pub decision: u8,
    pub signal: Signal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub bits: WatermarkBits,
    pub evidence: Vec<BitEvidence>,
    pub retrieval: RetrievalResult,
    pub low_confidence: bool,
}

/// Flat per-snippet line written by the `extract` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultLine {
    pub snippet_id: String,
    pub bits: WatermarkBits,
    pub score: f64,
    pub match_id: String,
    pub low_confidence: bool,
    pub evidence: Vec<BitEvidence>,
}

impl ResultLine {
    pub fn new(snippet_id: impl Into<String>, r: &ExtractionResult) -> Self {
        ResultLine {
            snippet_id: snippet_id.into(),
            bits: r.bits.clone(),
            score: r.retrieval.score,
            match_id: r.retrieval.matched.id.clone(),
            low_confidence: r.low_confidence,
            evidence: r.evidence.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// Retrieval

/// Candidate codebase with precomputed feature profiles.
#[derive(Clone, Debug)]
pub struct Retriever<'a> {
    codebase: &'a CandidateCodebase,
    profiles: Vec<FeatureProfile>,
    exec: Exec,
}

impl<'a> Retriever<'a> {
    pub fn new(codebase: &'a CandidateCodebase, exec: Exec) -> Self {
        Retriever {
            codebase,
            profiles: exec.map(codebase.snippets(), extract_profile),
            exec,
        }
    }

    pub fn codebase(&self) -> &'a CandidateCodebase {
        self.codebase
    }

    pub fn retrieve(&self, c1: &CodeSnippet, weights: &SimilarityWeights) -> Result<RetrievalResult> {
        if self.codebase.is_empty() {
            return Err(Error::EmptyCodebase);
        }
        let q = extract_profile(c1);
        let sims: Vec<Similarities> = self.exec.map(&self.profiles, |p| Similarities::between(&q, p));
        let mut best = 0;
        let mut best_score = sims[0].score(weights);
        let mut runner_up = 0.0;
        for (i, s) in sims.iter().enumerate().skip(1) {
            let score = s.score(weights);
            if score > best_score + SCORE_TIE {
                runner_up = best_score;
                best = i;
                best_score = score;
            } else if score > runner_up {
                runner_up = score;
            }
        }
        Ok(RetrievalResult {
            matched: self.codebase.snippets()[best].clone(),
            score: best_score,
            breakdown: sims[best],
            runner_up_score: runner_up.min(best_score),
        })
    }
}

pub fn retrieve(c1: &CodeSnippet, codebase: &CandidateCodebase, weights: &SimilarityWeights) -> Result<RetrievalResult> {
    Retriever::new(codebase, Exec::Sequential).retrieve(c1, weights)
}

// ---------------------------------------------------------------------------
// Decoding

pub fn reconstruct_plan(backend: &Backend, c_hat: &CodeSnippet, n: usize) -> Result<EmbeddingPlan> {
    embedder::plan(backend, c_hat, n)
}

/// Applies `rule` to `r` if the backend confirms it.
fn replay(backend: &Backend, r: &CodeSnippet, rule: &TransformationRule) -> Result<Option<CodeSnippet>> {
    match backend.transform(r, rule) {
        Ok(v) if v.rule_confirmed => Ok(Some(r.with_text(v.output_text))),
        Ok(_) | Err(Error::EngineUnsupported(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn decode(
    backend: &Backend,
    c1: &CodeSnippet,
    c_hat: &CodeSnippet,
    plan: &EmbeddingPlan,
    policy: &DecodingPolicy,
) -> Result<(WatermarkBits, Vec<BitEvidence>)> {
    let cmp = Comparator::new(c1);
    let target = extract_profile(c1);
    let mut r = c_hat.clone();
    let mut bits = Vec::with_capacity(plan.len());
    let mut evidence = Vec::with_capacity(plan.len());
    for bp in &plan.per_bit {
        let at_bit = |e| Error::at_bit(bp.bit, e);
        let mut tried = None;
        for rule in bp.window_rules() {
            if let Some(c) = replay(backend, &r, rule).map_err(at_bit)? {
                tried = Some((rule, c));
                break;
            }
        }
        if tried.is_none() {
            if let Some(rule) = bp.fallback_rule() {
                if let Some(c) = replay(backend, &r, rule).map_err(at_bit)? {
                    tried = Some((rule, c));
                }
            }
        }
        match tried {
            Some((rule, cand)) => {
                let cl = cmp.compare(&r, &cand, policy.margin);
                bits.push(cl.improved);
                evidence.push(BitEvidence {
                    bit: bp.bit,
                    rule_id: Some(rule.rule_id.to_string()),
                    sim_before: cl.sim_before,
                    sim_after: cl.sim_after,
                    decision: u8::from(cl.improved),
                    signal: cl.signal,
                });
                if cl.improved {
                    r = cand;
                }
            }
            None => {
                let s = sim_sem(&extract_profile(&r), &target);
                bits.push(false);
                evidence.push(BitEvidence {
                    bit: bp.bit,
                    rule_id: None,
                    sim_before: s,
                    sim_after: s,
                    decision: 0,
                    signal: Signal::Tie,
                });
            }
        }
    }
    Ok((WatermarkBits::from_bools(bits), evidence))
}

/// Retrieval, plan reconstruction and decoding against a prepared retriever.
pub fn extract_with(
    backend: &Backend,
    c1: &CodeSnippet,
    retriever: &Retriever<'_>,
    weights: &SimilarityWeights,
    n: usize,
    policy: &DecodingPolicy,
) -> Result<ExtractionResult> {
    let retrieval = retriever.retrieve(c1, weights)?;
    let plan = reconstruct_plan(backend, &retrieval.matched, n)?;
    let (bits, evidence) = decode(backend, c1, &retrieval.matched, &plan, policy)?;
    Ok(ExtractionResult {
        bits,
        evidence,
        low_confidence: retrieval.score < LOW_CONFIDENCE,
        retrieval,
    })
}

pub fn extract(
    backend: &Backend,
    c1: &CodeSnippet,
    codebase: &CandidateCodebase,
    weights: &SimilarityWeights,
    n: usize,
    policy: &DecodingPolicy,
) -> Result<ExtractionResult> {
    extract_with(backend, c1, &Retriever::new(codebase, Exec::Sequential), weights, n, policy)
}

/// Extracts every suspect independently. The retrieval scan runs
/// sequentially inside each job; parallelism is across suspects.
pub fn extract_batch(
    backend: &Backend,
    suspects: &[CodeSnippet],
    codebase: &CandidateCodebase,
    weights: &SimilarityWeights,
    n: usize,
    policy: &DecodingPolicy,
    exec: Exec,
) -> Vec<Result<ExtractionResult>> {
    let retriever = Retriever::new(codebase, exec);
    let inner = Retriever {
        exec: Exec::Sequential,
        ..retriever
    };
    exec.map(suspects, |c1| extract_with(backend, c1, &inner, weights, n, policy))
}
