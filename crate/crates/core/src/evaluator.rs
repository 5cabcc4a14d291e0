//! Metrics: bit and message accuracy, bits per function, syntax validity,
//! unit-test pass rate and similarity degradation.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{CandidateCodebase, CodeSnippet, WatermarkRecord};
use crate::embedder::WatermarkBits;
use crate::error::{Error, Result};
use crate::extractor::ResultLine;
use crate::features::{extract_profile, sim_sem};
use crate::harness::{TestConfig, TestOutcome};
use crate::lexer::Lexed;
use crate::par::Exec;

pub use crate::harness::run_tests;

fn check_pairs(pairs: &[(WatermarkBits, WatermarkBits)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no watermark pairs to score".into()));
    }
    for (index, (w, w_hat)) in pairs.iter().enumerate() {
        if w.len() != w_hat.len() {
            return Err(Error::LengthMismatch {
                index,
                expected: w.len(),
                found: w_hat.len(),
            });
        }
    }
    Ok(())
}

/// Fraction of bits recovered correctly, pooled over all pairs.
pub fn bit_acc(pairs: &[(WatermarkBits, WatermarkBits)]) -> Result<f64> {
    check_pairs(pairs)?;
    let total: usize = pairs.iter().map(|(w, _)| w.len()).sum();
    if total == 0 {
        return Err(Error::InvalidArgument("watermarks have no bits".into()));
    }
    let hits: usize = pairs
        .iter()
        .map(|(w, w_hat)| w.iter().zip(w_hat.iter()).filter(|(a, b)| a == b).count())
        .sum();
    Ok(hits as f64 / total as f64)
}

/// Fraction of watermarks recovered exactly.
pub fn msg_acc(pairs: &[(WatermarkBits, WatermarkBits)]) -> Result<f64> {
    check_pairs(pairs)?;
    let exact = pairs.iter().filter(|(w, w_hat)| w == w_hat).count();
    Ok(exact as f64 / pairs.len() as f64)
}

/// Built-in syntax check: brackets balance outside literals and comments,
/// and no literal or comment is left open. A necessary condition only; in
/// particular Python indentation is not checked.
pub fn syntax_check(snippet: &CodeSnippet) -> bool {
    let lx = Lexed::new(&snippet.text, snippet.language);
    lx.brackets_balanced() && !lx.has_unterminated()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntaxSource {
    Builtin,
    External,
    /// The external validator could not run; the built-in result was used.
    BuiltinFallback,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntaxVerdict {
    pub ok: bool,
    pub source: SyntaxSource,
}

/// Syntax check that prefers a configured external validator.
pub fn syntax_check_with(snippet: &CodeSnippet, tests: Option<&TestConfig>) -> SyntaxVerdict {
    match tests.and_then(|t| t.validate(snippet)) {
        None => SyntaxVerdict {
            ok: syntax_check(snippet),
            source: SyntaxSource::Builtin,
        },
        Some(TestOutcome::Skipped(why)) => {
            log::warn!("{}: validator unavailable ({why}); using built-in check", snippet.id);
            SyntaxVerdict {
                ok: syntax_check(snippet),
                source: SyntaxSource::BuiltinFallback,
            }
        }
        Some(outcome) => SyntaxVerdict {
            ok: outcome.passed(),
            source: SyntaxSource::External,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub bit_acc: f64,
    pub msg_acc: f64,
    pub bpf: f64,
    /// `None` when no suspect code was supplied.
    pub syntax_rate: Option<f64>,
    /// `None` when no unit test could run.
    pub pass_rate: Option<f64>,
    pub pass_skipped: usize,
    /// Mean `sim_sem(original, suspect)`. Not CodeBLEU.
    pub sim_degradation: Option<f64>,
    pub n_snippets: usize,
    pub n_failures: usize,
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

impl MetricReport {
    /// Two-column text table.
    pub fn to_table(&self) -> String {
        let rows = [
            ("bit_acc", format!("{:.4}", self.bit_acc)),
            ("msg_acc", format!("{:.4}", self.msg_acc)),
            ("bpf", format!("{:.2}", self.bpf)),
            ("syntax_rate", cell(self.syntax_rate)),
            ("pass_rate", cell(self.pass_rate)),
            ("pass_skipped", self.pass_skipped.to_string()),
            ("sim_degradation", cell(self.sim_degradation)),
            ("n_snippets", self.n_snippets.to_string()),
            ("n_failures", self.n_failures.to_string()),
        ];
        let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let vw = rows.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<w$}  {v:>vw$}");
        }
        out
    }
}

/// Everything a report is computed from.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunArtifacts<'a> {
    pub records: &'a [WatermarkRecord],
    pub results: &'a [ResultLine],
    /// Code that was extracted from (watermarked, possibly attacked).
    pub suspects: &'a [CodeSnippet],
    /// Originals, for similarity degradation.
    pub originals: Option<&'a CandidateCodebase>,
    /// Embeddings attempted but not completed.
    pub embed_failures: usize,
    pub tests: Option<&'a TestConfig>,
}

/// Aggregates a run. Records and results must cover the same snippet ids.
pub fn report(a: &RunArtifacts<'_>, exec: Exec) -> Result<MetricReport> {
    if a.records.is_empty() {
        return Err(Error::InvalidArgument("no watermark records to evaluate".into()));
    }
    let mut by_id: BTreeMap<&str, &ResultLine> = BTreeMap::new();
    for r in a.results {
        if by_id.insert(r.snippet_id.as_str(), r).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate result for {}", r.snippet_id)));
        }
    }
    let mut pairs = Vec::with_capacity(a.records.len());
    for rec in a.records {
        let res = by_id
            .remove(rec.snippet_id.as_str())
            .ok_or_else(|| Error::UnknownSnippet(rec.snippet_id.clone()))?;
        pairs.push((rec.bits.clone(), res.bits.clone()));
    }
    if let Some(extra) = by_id.keys().next() {
        return Err(Error::UnknownSnippet(extra.to_string()));
    }
    let bit_acc = bit_acc(&pairs)?;
    let msg_acc = msg_acc(&pairs)?;
    let total_bits: usize = a.records.iter().map(|r| r.bits.len()).sum();
    let bpf = total_bits as f64 / a.records.len() as f64;

    let known: HashSet<&str> = a.records.iter().map(|r| r.snippet_id.as_str()).collect();
    if let Some(s) = a.suspects.iter().find(|s| !known.contains(s.id.as_str())) {
        return Err(Error::UnknownSnippet(s.id.clone()));
    }
    let (syntax_rate, pass_rate, pass_skipped, sim_degradation) = if a.suspects.is_empty() {
        (None, None, 0, None)
    } else {
        let checks: Vec<(bool, Option<TestOutcome>)> = exec.map(a.suspects, |s| {
            let syn = syntax_check_with(s, a.tests).ok;
            (syn, a.tests.and_then(|t| t.run(s)))
        });
        let syntax_ok = checks.iter().filter(|(ok, _)| *ok).count();
        let mut passed = 0;
        let mut ran = 0;
        let mut skipped = 0;
        for (_, outcome) in &checks {
            match outcome {
                Some(TestOutcome::Passed) => {
                    passed += 1;
                    ran += 1;
                }
                Some(TestOutcome::Failed(_)) => ran += 1,
                Some(TestOutcome::Skipped(_)) => skipped += 1,
                None => {}
            }
        }
        let sims: Vec<f64> = match a.originals {
            Some(cb) => a
                .suspects
                .iter()
                .map(|s| {
                    let orig = cb.get(&s.id).ok_or_else(|| Error::UnknownSnippet(s.id.clone()))?;
                    Ok(sim_sem(&extract_profile(orig), &extract_profile(s)))
                })
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        (
            Some(syntax_ok as f64 / checks.len() as f64),
            (ran > 0).then(|| passed as f64 / ran as f64),
            skipped,
            (!sims.is_empty()).then(|| sims.iter().sum::<f64>() / sims.len() as f64),
        )
    };
    Ok(MetricReport {
        bit_acc,
        msg_acc,
        bpf,
        syntax_rate,
        pass_rate,
        pass_skipped,
        sim_degradation,
        n_snippets: a.records.len(),
        n_failures: a.embed_failures,
    })
}
