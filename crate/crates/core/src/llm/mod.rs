//! Transformation backends: the deterministic mock, which delegates to the
//! rules engine, and a remote chat-completion model.

pub mod limiter;
pub mod prompts;
pub mod remote;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::CodeSnippet;
use crate::embedder::WatermarkBits;
use crate::error::{Error, Result};
use crate::harness::{TestConfig, TestOutcome};
use crate::lexer::{Lexed, TokenKind};
use crate::rules::{self, RuleCategory, TransformationRule};

pub use remote::{ProviderConfig, RemoteClient, DEFAULT_API_KEY_ENV};

/// Parsed result of asking a backend to apply one rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformVerdict {
    pub output_text: String,
    pub rule_confirmed: bool,
    pub notes: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub ok: bool,
    pub notes: String,
}

#[derive(Clone, Debug)]
pub enum Backend {
    Mock { tests: Option<Arc<TestConfig>> },
    Remote { client: Arc<RemoteClient>, tests: Option<Arc<TestConfig>> },
}

impl Backend {
    pub fn mock() -> Self {
        Backend::Mock { tests: None }
    }

    pub fn remote(config: ProviderConfig) -> Result<Self> {
        Ok(Backend::Remote {
            client: Arc::new(RemoteClient::new(config)?),
            tests: None,
        })
    }

    /// Attaches unit-test commands used when verifying semantics.
    pub fn with_tests(self, cfg: Option<Arc<TestConfig>>) -> Self {
        match self {
            Backend::Mock { .. } => Backend::Mock { tests: cfg },
            Backend::Remote { client, .. } => Backend::Remote { client, tests: cfg },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Mock { .. } => "mock",
            Backend::Remote { .. } => "remote",
        }
    }

    pub fn is_mock(&self) -> bool {
        matches!(self, Backend::Mock { .. })
    }

    fn tests(&self) -> Option<&TestConfig> {
        match self {
            Backend::Mock { tests } | Backend::Remote { tests, .. } => tests.as_deref(),
        }
    }

    pub fn transform(&self, snippet: &CodeSnippet, rule: &TransformationRule) -> Result<TransformVerdict> {
        match self {
            Backend::Mock { .. } => match rules::apply(rule, snippet) {
                Ok(out) => Ok(TransformVerdict {
                    output_text: out.text,
                    rule_confirmed: true,
                    notes: String::new(),
                }),
                Err(Error::NotApplicable(_)) => Ok(TransformVerdict {
                    output_text: snippet.text.clone(),
                    rule_confirmed: false,
                    notes: format!("{} does not apply", rule.rule_id),
                }),
                Err(e) => Err(e),
            },
            Backend::Remote { client, .. } => {
                let bits = WatermarkBits::ones(1);
                let prompt = prompts::render_embed_prompt(snippet, &bits, &[rule])?;
                let code = client.complete_code(prompts::EMBED_ROLE, &prompt)?;
                let changed = code.trim() != snippet.text.trim();
                Ok(TransformVerdict {
                    output_text: if changed { code } else { snippet.text.clone() },
                    rule_confirmed: changed,
                    notes: if changed { String::new() } else { "model returned the code unchanged".into() },
                })
            }
        }
    }

    /// Applicable rules of `category`, best first.
    pub fn rank_rules(&self, snippet: &CodeSnippet, category: RuleCategory) -> Vec<&'static TransformationRule> {
        let candidates = rules::catalog().category(category);
        match self {
            Backend::Mock { .. } => candidates
                .into_iter()
                .filter(|r| rules::is_applicable(r, snippet))
                .collect(),
            Backend::Remote { client, .. } => {
                let prompt = prompts::render_rank_prompt(snippet, &candidates);
                match client.complete(prompts::EMBED_ROLE, &prompt) {
                    Ok(reply) => parse_ranking(&reply, &candidates)
                        .into_iter()
                        .filter(|r| !r.is_deterministic() || rules::is_applicable(r, snippet))
                        .collect(),
                    Err(e) => {
                        log::warn!("ranking request failed ({e}); using static priority for {category}");
                        candidates
                            .into_iter()
                            .filter(|r| rules::is_applicable(r, snippet))
                            .collect()
                    }
                }
            }
        }
    }

    /// Whether `after` behaves like `before`.
    pub fn verify_semantics(&self, before: &CodeSnippet, after: &CodeSnippet) -> Result<Verification> {
        if before.text == after.text {
            return Ok(Verification {
                ok: true,
                notes: String::new(),
            });
        }
        match self {
            Backend::Mock { .. } => {
                let structural = structural_check(before, after);
                if let Err(why) = structural {
                    return Ok(Verification { ok: false, notes: why });
                }
                Ok(match self.tests().and_then(|t| t.run(after)) {
                    None => Verification {
                        ok: true,
                        notes: String::new(),
                    },
                    Some(TestOutcome::Passed) => Verification {
                        ok: true,
                        notes: "unit test passed".into(),
                    },
                    Some(TestOutcome::Failed(why)) => Verification {
                        ok: false,
                        notes: format!("unit test failed: {why}"),
                    },
                    Some(TestOutcome::Skipped(why)) => Verification {
                        ok: true,
                        notes: format!("unit test skipped ({why}); structural check only"),
                    },
                })
            }
            Backend::Remote { client, .. } => {
                let prompt = prompts::render_verify_prompt(before, after);
                let ok = client.complete_with(prompts::EXTRACT_ROLE, &prompt, |r| {
                    prompts::parse_yes_no(r).ok_or_else(|| Error::ResponseParse("expected yes or no".into()))
                })?;
                Ok(Verification {
                    ok,
                    notes: "model judgment".into(),
                })
            }
        }
    }

    /// Behavior-preserving rewrite by a general model; refused by the mock.
    pub fn paraphrase(&self, snippet: &CodeSnippet) -> Result<String> {
        match self {
            Backend::Mock { .. } => Err(Error::MockUnsupported("paraphrasing")),
            Backend::Remote { client, .. } => {
                client.complete_code(prompts::EMBED_ROLE, &prompts::render_paraphrase_prompt(snippet))
            }
        }
    }

    /// Asks the model directly which sub-rules were applied.
    pub fn judge_bits(
        &self,
        original: &CodeSnippet,
        watermarked: &CodeSnippet,
        sub_rules: &[&TransformationRule],
    ) -> Result<WatermarkBits> {
        match self {
            Backend::Mock { .. } => Err(Error::MockUnsupported("model judgment of bits")),
            Backend::Remote { client, .. } => {
                let prompt = prompts::render_extract_prompt(original, watermarked, sub_rules)?;
                let n = sub_rules.len();
                let bits = client.complete_with(prompts::EXTRACT_ROLE, &prompt, |r| {
                    prompts::parse_bit_tuple(r)
                        .filter(|b| b.len() == n)
                        .ok_or_else(|| Error::ResponseParse(format!("expected a {n}-bit tuple")))
                })?;
                Ok(WatermarkBits::from_bools(bits))
            }
        }
    }
}

/// Rule ids in the order they appear in the reply.
fn parse_ranking(reply: &str, candidates: &[&'static TransformationRule]) -> Vec<&'static TransformationRule> {
    let mut found: Vec<(usize, &'static TransformationRule)> = candidates
        .iter()
        .filter_map(|r| {
            let short = r.rule_id.split_once('.').map_or(r.rule_id, |(_, s)| s);
            reply
                .find(r.rule_id)
                .or_else(|| find_word(reply, short))
                .map(|pos| (pos, *r))
        })
        .collect();
    found.sort_by_key(|(pos, _)| *pos);
    found.into_iter().map(|(_, r)| r).collect()
}

fn find_word(hay: &str, word: &str) -> Option<usize> {
    let is_word = |c: char| c.is_alphanumeric() || c == '_';
    hay.match_indices(word).map(|(i, _)| i).find(|&i| {
        let before = hay[..i].chars().next_back().is_none_or(|c| !is_word(c));
        let after = hay[i + word.len()..].chars().next().is_none_or(|c| !is_word(c));
        before && after
    })
}

/// Bracket balance kept, no literal left open, and string/comment contents
/// unchanged.
fn structural_check(before: &CodeSnippet, after: &CodeSnippet) -> std::result::Result<(), String> {
    let lb = Lexed::new(&before.text, before.language);
    let la = Lexed::new(&after.text, after.language);
    if lb.brackets_balanced() && !la.brackets_balanced() {
        return Err("bracket balance broken".into());
    }
    if !lb.has_unterminated() && la.has_unterminated() {
        return Err("unterminated literal or comment introduced".into());
    }
    let protected = |lx: &Lexed<'_>| {
        let mut m: HashMap<String, usize> = HashMap::new();
        for t in lx.tokens.iter().filter(|t| matches!(t.kind, TokenKind::Str | TokenKind::Comment)) {
            *m.entry(t.text(lx.src).to_string()).or_default() += 1;
        }
        m
    };
    if protected(&lb) != protected(&la) {
        return Err("string literal or comment content changed".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Language;

    #[test]
    fn mock_transform_and_verify() {
        let b = Backend::mock();
        let s = CodeSnippet::synthetic("t", Language::C, "int testStream(int a) { return a; }");
        let r = rules::lookup("naming.camel_to_snake").unwrap();
        let v = b.transform(&s, r).unwrap();
        assert!(v.rule_confirmed);
        assert_eq!(v.output_text, "int test_stream(int a) { return a; }");
        let after = s.with_text(v.output_text);
        assert!(b.verify_semantics(&s, &after).unwrap().ok);
        let broken = s.with_text("int testStream(int a) { return a; ");
        assert!(!b.verify_semantics(&s, &broken).unwrap().ok);
    }

    #[test]
    fn mock_refuses_paraphrase() {
        let s = CodeSnippet::synthetic("t", Language::C, "int f(void) { return 1; }");
        assert!(matches!(Backend::mock().paraphrase(&s), Err(Error::MockUnsupported(_))));
    }

    #[test]
    fn ranking_parse_keeps_reply_order() {
        let cands = rules::catalog().category(RuleCategory::Loops);
        let got = parse_ranking("while_to_do_while\nloops.for_to_while\n", &cands);
        let ids: Vec<&str> = got.iter().map(|r| r.rule_id).collect();
        assert_eq!(ids, ["loops.while_to_do_while", "loops.for_to_while"]);
    }
}
