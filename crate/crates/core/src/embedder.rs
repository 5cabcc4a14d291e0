//! Watermark embedding: assign each bit a rule category, rank that
//! category's rules for the snippet, then apply one rule per 1-bit in
//! sequence, each step checked for behavior preservation.
//!
//! Every bit gets a window of at most [`RETRY_CAP`] candidate rules. Rules
//! are never shared between bits: when a category repeats (n > 4) its ranked
//! list is dealt out round-robin, and the fallback rules reserved for bits
//! whose window is empty come from organization rules no window uses. This
//! keeps each rule's trace attributable to a single bit at extraction time.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::{BitRule, CandidateCodebase, CodeSnippet, WatermarkRecord};
use crate::error::{Error, Result};
use crate::llm::Backend;
use crate::par::Exec;
use crate::rules::{self, RuleCategory, TransformationRule};

/// Candidate rules tried per bit before falling back.
pub const RETRY_CAP: usize = 5;

/// Timestamp written into mock-backend records so runs are byte-reproducible.
pub const MOCK_TIMESTAMP: &str = "1970-01-01T00:00:00Z";

// ---------------------------------------------------------------------------
// WatermarkBits

/// An n-bit message, n ≥ 1. Serialized as a string of `0`/`1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WatermarkBits {
    bits: Vec<bool>,
}

impl WatermarkBits {
    pub fn from_bools(bits: Vec<bool>) -> Self {
        WatermarkBits { bits }
    }

    pub fn zeros(n: usize) -> Self {
        WatermarkBits { bits: vec![false; n] }
    }

    pub fn ones(n: usize) -> Self {
        WatermarkBits { bits: vec![true; n] }
    }

    /// Uniform random bits.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        WatermarkBits {
            bits: (0..n).map(|_| rng.gen::<bool>()).collect(),
        }
    }

    /// All 2^n patterns in counting order (first bit most significant).
    pub fn all(n: usize) -> Vec<WatermarkBits> {
        (0..1u64 << n)
            .map(|v| WatermarkBits {
                bits: (0..n).map(|k| v >> (n - 1 - k) & 1 == 1).collect(),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<bool> {
        self.bits.get(k).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl FromStr for WatermarkBits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidArgument("watermark must have at least one bit".into()));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!(
                    "watermark {s:?} contains {other:?}; only 0 and 1 are allowed"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WatermarkBits { bits })
    }
}

impl fmt::Display for WatermarkBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for WatermarkBits {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WatermarkBits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Plan

/// Category carrying bit `k` (0-based): round-robin over the four categories.
pub fn category_for_bit(k: usize) -> RuleCategory {
    RuleCategory::ALL[k % RuleCategory::ALL.len()]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BitPlan {
    /// 1-based bit position.
    pub bit: usize,
    pub category: RuleCategory,
    /// Applicable rules for this bit, best first.
    pub ranked_rules: Vec<&'static str>,
    /// The rules actually tried, in order (a prefix of `ranked_rules`, minus
    /// any rule reserved as another bit's fallback).
    pub window: Vec<&'static str>,
    /// Organization rule tried when no window rule can be applied.
    pub fallback: Option<&'static str>,
    pub chosen: Option<&'static str>,
}

impl BitPlan {
    pub fn window_rules(&self) -> impl Iterator<Item = &'static TransformationRule> + '_ {
        self.window.iter().filter_map(|id| rules::catalog().lookup(id))
    }

    pub fn fallback_rule(&self) -> Option<&'static TransformationRule> {
        self.fallback.and_then(|id| rules::catalog().lookup(id))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingPlan {
    pub per_bit: Vec<BitPlan>,
}

impl EmbeddingPlan {
    pub fn len(&self) -> usize {
        self.per_bit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_bit.is_empty()
    }
}

pub fn plan(backend: &Backend, snippet: &CodeSnippet, n: usize) -> Result<EmbeddingPlan> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut ranked_by_cat = Vec::new();
    for cat in RuleCategory::ALL {
        let used = (0..n).any(|k| category_for_bit(k) == cat);
        let ranked: Vec<&'static str> = if used || cat == RuleCategory::Organization {
            backend.rank_rules(snippet, cat).iter().map(|r| r.rule_id).collect()
        } else {
            Vec::new()
        };
        ranked_by_cat.push(ranked);
    }
    let cats = RuleCategory::ALL.len();
    let mut per_bit: Vec<BitPlan> = (0..n)
        .map(|k| {
            let category = category_for_bit(k);
            let full = &ranked_by_cat[k % cats];
            let copies = (0..n).filter(|j| j % cats == k % cats).count();
            let slot = k / cats;
            let ranked: Vec<&'static str> = full.iter().skip(slot).step_by(copies).copied().collect();
            let window = ranked.iter().take(RETRY_CAP).copied().collect();
            BitPlan {
                bit: k + 1,
                category,
                ranked_rules: ranked,
                window,
                fallback: None,
                chosen: None,
            }
        })
        .collect();

    // Fallbacks: lowest-priority organization rules that no window uses.
    let in_windows: HashSet<&str> = per_bit.iter().flat_map(|b| b.window.iter().copied()).collect();
    let mut spare: Vec<&'static str> = ranked_by_cat[cats - 1]
        .iter()
        .filter(|id| !in_windows.contains(*id))
        .copied()
        .collect();
    // Bits whose category is least often applicable get the scarce fallbacks first.
    let need = |c: RuleCategory| match c {
        RuleCategory::Loops => 0,
        RuleCategory::Math => 1,
        RuleCategory::Naming => 2,
        RuleCategory::Organization => 3,
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| (need(per_bit[k].category), k));
    for k in order {
        if !per_bit[k].window.is_empty() {
            continue;
        }
        if let Some(id) = spare.pop() {
            per_bit[k].fallback = Some(id);
            continue;
        }
        // Take the last rule of the longest organization window. A window is
        // emptied only when nothing else is left; that bit can then carry 0 only.
        let donor = (0..n)
            .filter(|&j| j != k && per_bit[j].category == RuleCategory::Organization && !per_bit[j].window.is_empty())
            .max_by_key(|&j| (per_bit[j].window.len(), std::cmp::Reverse(j)));
        if let Some(j) = donor {
            let id = per_bit[j].window.pop();
            per_bit[k].fallback = id;
        }
    }
    for bp in per_bit.iter_mut() {
        if bp.fallback.is_none() && !bp.window.is_empty() {
            bp.fallback = spare.pop();
        }
    }
    Ok(EmbeddingPlan { per_bit })
}

// ---------------------------------------------------------------------------
// Embedding

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum BitStatus {
    Applied { rule_id: String },
    Skipped,
    Fallback { rule_id: String },
    Failed { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingOutcome {
    pub snippet_id: String,
    pub bits: WatermarkBits,
    /// Present only when every bit succeeded.
    pub watermarked: Option<CodeSnippet>,
    pub record: Option<WatermarkRecord>,
    pub per_bit_status: Vec<BitStatus>,
    pub plan: EmbeddingPlan,
}

impl EmbeddingOutcome {
    pub fn is_success(&self) -> bool {
        self.watermarked.is_some()
    }

    fn failure(&self) -> Option<(usize, &str)> {
        self.per_bit_status.iter().enumerate().find_map(|(k, s)| match s {
            BitStatus::Failed { reason } => Some((k + 1, reason.as_str())),
            _ => None,
        })
    }

    /// Turns a failed outcome into [`Error::EmbeddingFailed`].
    pub fn require_success(self) -> Result<Self> {
        match self.failure() {
            None => Ok(self),
            Some((bit, reason)) => Err(Error::EmbeddingFailed {
                snippet: self.snippet_id.clone(),
                bit,
                reason: reason.to_string(),
            }),
        }
    }
}

/// Applies `rule` to `cur` through the backend and checks the result.
/// `Ok(None)` means the rule could not be used here.
fn try_rule(
    backend: &Backend,
    cur: &CodeSnippet,
    rule: &TransformationRule,
    notes: &mut Vec<String>,
) -> Result<Option<CodeSnippet>> {
    let verdict = match backend.transform(cur, rule) {
        Ok(v) => v,
        Err(Error::EngineUnsupported(id)) => {
            notes.push(format!("{id}: engine unsupported"));
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    if !verdict.rule_confirmed {
        notes.push(format!("{}: not applicable", rule.rule_id));
        return Ok(None);
    }
    let cand = cur.with_text(verdict.output_text);
    let check = backend.verify_semantics(cur, &cand)?;
    if !check.ok {
        notes.push(format!("{}: rejected ({})", rule.rule_id, check.notes));
        return Ok(None);
    }
    Ok(Some(cand))
}

/// The rule the extractor will test for a bit that was left at 0.
fn probe_rule(bp: &BitPlan, cur: &CodeSnippet) -> &'static str {
    bp.window_rules()
        .find(|r| rules::is_applicable(r, cur))
        .map(|r| r.rule_id)
        .or(bp.fallback)
        .or_else(|| bp.window.first().copied())
        .unwrap_or_else(|| rules::catalog().category(bp.category)[0].rule_id)
}

pub fn record_timestamp(backend: &Backend) -> String {
    if backend.is_mock() {
        MOCK_TIMESTAMP.to_string()
    } else {
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    }
}

/// Runs the embedding chain and reports every bit's status; a failed bit
/// leaves `watermarked` empty rather than returning an error.
pub fn embed_outcome(
    backend: &Backend,
    snippet: &CodeSnippet,
    bits: &WatermarkBits,
    plan: &EmbeddingPlan,
) -> Result<EmbeddingOutcome> {
    if bits.is_empty() {
        return Err(Error::InvalidArgument("watermark must have at least one bit".into()));
    }
    if plan.len() != bits.len() {
        return Err(Error::InvalidArgument(format!(
            "plan covers {} bits but the watermark has {}",
            plan.len(),
            bits.len()
        )));
    }
    let mut plan = plan.clone();
    let mut cur = snippet.clone();
    let mut statuses = Vec::with_capacity(bits.len());
    let mut per_bit_rules = Vec::with_capacity(bits.len());
    for (k, bit) in bits.iter().enumerate() {
        let bp = &mut plan.per_bit[k];
        if !bit {
            statuses.push(BitStatus::Skipped);
            per_bit_rules.push(BitRule {
                bit: k + 1,
                rule_id: probe_rule(bp, &cur).to_string(),
                applied: false,
            });
            continue;
        }
        let mut notes = Vec::new();
        let mut done = None;
        let window: Vec<_> = bp.window_rules().collect();
        for rule in window {
            if let Some(next) = try_rule(backend, &cur, rule, &mut notes).map_err(|e| Error::at_bit(k + 1, e))? {
                done = Some((rule, next, false));
                break;
            }
        }
        if done.is_none() {
            if let Some(rule) = bp.fallback_rule() {
                if let Some(next) = try_rule(backend, &cur, rule, &mut notes).map_err(|e| Error::at_bit(k + 1, e))? {
                    done = Some((rule, next, true));
                }
            }
        }
        match done {
            Some((rule, next, fallback)) => {
                cur = next;
                bp.chosen = Some(rule.rule_id);
                let rule_id = rule.rule_id.to_string();
                statuses.push(if fallback {
                    BitStatus::Fallback { rule_id: rule_id.clone() }
                } else {
                    BitStatus::Applied { rule_id: rule_id.clone() }
                });
                per_bit_rules.push(BitRule {
                    bit: k + 1,
                    rule_id,
                    applied: true,
                });
            }
            None => {
                let reason = if notes.is_empty() {
                    format!("no applicable {} rule and no fallback available", bp.category)
                } else {
                    notes.join("; ")
                };
                statuses.push(BitStatus::Failed { reason });
            }
        }
    }
    let failed = statuses.iter().any(|s| matches!(s, BitStatus::Failed { .. }));
    let (watermarked, record) = if failed {
        (None, None)
    } else {
        let record = WatermarkRecord {
            snippet_id: snippet.id.clone(),
            bits: bits.clone(),
            per_bit_rules,
            backend: backend.name().to_string(),
            created_at: record_timestamp(backend),
        };
        (Some(cur), Some(record))
    };
    Ok(EmbeddingOutcome {
        snippet_id: snippet.id.clone(),
        bits: bits.clone(),
        watermarked,
        record,
        per_bit_status: statuses,
        plan,
    })
}

/// Embeds `bits`; any failed bit is an [`Error::EmbeddingFailed`].
pub fn embed(
    backend: &Backend,
    snippet: &CodeSnippet,
    bits: &WatermarkBits,
    plan: &EmbeddingPlan,
) -> Result<EmbeddingOutcome> {
    embed_outcome(backend, snippet, bits, plan)?.require_success()
}

/// Plans and embeds in one step.
pub fn watermark(backend: &Backend, snippet: &CodeSnippet, bits: &WatermarkBits) -> Result<EmbeddingOutcome> {
    let p = plan(backend, snippet, bits.len())?;
    embed(backend, snippet, bits, &p)
}

/// Where batch watermarks come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BitSource {
    /// Uniform random bits from a ChaCha generator, drawn in codebase order.
    Seeded(u64),
    /// The same message for every snippet.
    Fixed(WatermarkBits),
}

impl BitSource {
    pub fn draw(&self, count: usize, n: usize) -> Result<Vec<WatermarkBits>> {
        match self {
            BitSource::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..count).map(|_| WatermarkBits::random(n, &mut rng)).collect())
            }
            BitSource::Fixed(bits) => {
                if bits.len() != n {
                    return Err(Error::LengthMismatch {
                        index: 0,
                        expected: n,
                        found: bits.len(),
                    });
                }
                Ok(vec![bits.clone(); count])
            }
        }
    }
}

/// One snippet's result in a batch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchItem {
    pub snippet_id: String,
    pub bits: WatermarkBits,
    pub outcome: Option<EmbeddingOutcome>,
    pub error: Option<String>,
}

impl BatchItem {
    pub fn is_success(&self) -> bool {
        self.outcome.as_ref().is_some_and(EmbeddingOutcome::is_success)
    }

    pub fn watermarked(&self) -> Option<&CodeSnippet> {
        self.outcome.as_ref().and_then(|o| o.watermarked.as_ref())
    }

    pub fn record(&self) -> Option<&WatermarkRecord> {
        self.outcome.as_ref().and_then(|o| o.record.as_ref())
    }

    /// Why the snippet could not be watermarked.
    pub fn failure_reason(&self) -> Option<String> {
        if let Some(e) = &self.error {
            return Some(e.clone());
        }
        let o = self.outcome.as_ref()?;
        o.failure().map(|(bit, r)| format!("bit {bit}: {r}"))
    }
}

/// Embeds every snippet independently; failures are collected, not fatal.
pub fn embed_batch(
    backend: &Backend,
    codebase: &CandidateCodebase,
    source: &BitSource,
    n: usize,
    exec: Exec,
) -> Result<Vec<BatchItem>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let messages = source.draw(codebase.len(), n)?;
    let jobs: Vec<(&CodeSnippet, &WatermarkBits)> = codebase.snippets().iter().zip(&messages).collect();
    Ok(exec.map(&jobs, |(snippet, bits)| {
        let result = plan(backend, snippet, n).and_then(|p| embed_outcome(backend, snippet, bits, &p));
        match result {
            Ok(o) => BatchItem {
                snippet_id: snippet.id.clone(),
                bits: (*bits).clone(),
                outcome: Some(o),
                error: None,
            },
            Err(e) => BatchItem {
                snippet_id: snippet.id.clone(),
                bits: (*bits).clone(),
                outcome: None,
                error: Some(e.to_string()),
            },
        }
    }))
}

/// Total embedded bits divided by successfully embedded functions.
pub fn bits_per_function(items: &[BatchItem]) -> Option<f64> {
    let ok: Vec<&BatchItem> = items.iter().filter(|i| i.is_success()).collect();
    if ok.is_empty() {
        return None;
    }
    let total: usize = ok.iter().map(|i| i.bits.len()).sum();
    Some(total as f64 / ok.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_roundtrip_through_strings() {
        let b: WatermarkBits = "1001".parse().unwrap();
        assert_eq!(b.to_string(), "1001");
        assert_eq!(serde_json::to_string(&b).unwrap(), "\"1001\"");
        assert_eq!(serde_json::from_str::<WatermarkBits>("\"0110\"").unwrap().to_string(), "0110");
        assert!("".parse::<WatermarkBits>().is_err());
        assert!("10a1".parse::<WatermarkBits>().is_err());
    }

    #[test]
    fn all_patterns_in_counting_order() {
        let all = WatermarkBits::all(4);
        assert_eq!(all.len(), 16);
        assert_eq!(all[0].to_string(), "0000");
        assert_eq!(all[9].to_string(), "1001");
        assert_eq!(all[15].to_string(), "1111");
    }

    #[test]
    fn schedule_is_round_robin() {
        let cats: Vec<RuleCategory> = (0..8).map(category_for_bit).collect();
        assert_eq!(&cats[..4], &RuleCategory::ALL);
        assert_eq!(&cats[4..], &RuleCategory::ALL);
    }

    #[test]
    fn loop_bit_falls_back_on_loopless_snippet() {
        let s = CodeSnippet::synthetic("r", crate::corpus::Language::C, "return x;");
        let b = Backend::mock();
        let bits: WatermarkBits = "0100".parse().unwrap();
        let out = watermark(&b, &s, &bits).unwrap();
        assert_eq!(
            out.per_bit_status[1],
            BitStatus::Fallback {
                rule_id: "organization.insert_blank_line".into()
            }
        );
        assert_eq!(out.watermarked.unwrap().text, "return x;\n");
    }

    #[test]
    fn failed_bit_is_reported_not_thrown() {
        let s = CodeSnippet::synthetic("r", crate::corpus::Language::C, "return x;");
        let b = Backend::mock();
        let bits: WatermarkBits = "0001".parse().unwrap();
        let p = plan(&b, &s, 4).unwrap();
        let out = embed_outcome(&b, &s, &bits, &p).unwrap();
        assert!(!out.is_success());
        assert!(matches!(out.per_bit_status[3], BitStatus::Failed { .. }));
        assert!(matches!(embed(&b, &s, &bits, &p), Err(Error::EmbeddingFailed { bit: 4, .. })));
    }
}
