//! Removal attacks: random identifier renaming (V@p%), random
//! semantics-preserving transformations (T@k) and model paraphrasing.
//!
//! The transformation pool is the whole deterministic catalog. Attack code
//! never sees watermark records, so the attacker cannot target the rules
//! that were actually used for embedding.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::corpus::{content_hash, CodeSnippet};
use crate::error::{Error, Result};
use crate::features::extract_profile;
use crate::lexer::{Lexed, TokenKind};
use crate::llm::Backend;
use crate::par::Exec;
use crate::rules::{self, rename_identifier};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttackKind {
    Rename { p: f64 },
    Transform { k: usize },
    Paraphrase,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    #[serde(flatten)]
    pub kind: AttackKind,
    #[serde(default)]
    pub seed: u64,
}

impl AttackSpec {
    pub fn rename(p: f64, seed: u64) -> Self {
        AttackSpec {
            kind: AttackKind::Rename { p },
            seed,
        }
    }

    pub fn transform(k: usize, seed: u64) -> Self {
        AttackSpec {
            kind: AttackKind::Transform { k },
            seed,
        }
    }

    pub fn paraphrase() -> Self {
        AttackSpec {
            kind: AttackKind::Paraphrase,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            AttackKind::Rename { p } if !(p > 0.0 && p <= 1.0) => {
                Err(Error::InvalidArgument(format!("rename fraction must be in (0, 1], got {p}")))
            }
            AttackKind::Transform { k: 0 } => Err(Error::InvalidArgument("transform count must be at least 1".into())),
            _ => Ok(()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            AttackKind::Rename { .. } => "rename",
            AttackKind::Transform { .. } => "transform",
            AttackKind::Paraphrase => "paraphrase",
        }
    }
}

/// Short label in the usual notation: `V@50%`, `T@3`, `paraphrase`.
impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AttackKind::Rename { p } => write!(f, "V@{}%", (p * 100.0).round()),
            AttackKind::Transform { k } => write!(f, "T@{k}"),
            AttackKind::Paraphrase => f.write_str("paraphrase"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Renamed {
    pub from: String,
    pub to: String,
}

/// What an attack did to one snippet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackMeta {
    pub snippet_id: String,
    pub kind: String,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub applied_rules: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub renamed: Option<Vec<Renamed>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attacked {
    pub snippet: CodeSnippet,
    pub meta: AttackMeta,
}

/// Each snippet draws from its own stream, so one batch seed does not make
/// every snippet pick the same positions.
fn rng(seed: u64, snippet: &CodeSnippet) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(content_hash(&snippet.id));
    r
}

/// Renames ⌈p·|V|⌉ randomly chosen variables to fresh `var_<i>` names.
pub fn rename_attack(snippet: &CodeSnippet, p: f64, seed: u64) -> Result<Attacked> {
    AttackSpec::rename(p, seed).validate()?;
    let vars: Vec<String> = extract_profile(snippet).var_set.into_iter().collect();
    let mut meta = AttackMeta {
        snippet_id: snippet.id.clone(),
        kind: "rename".into(),
        params: json!({ "p": p }),
        seed: Some(seed),
        applied_rules: None,
        renamed: Some(Vec::new()),
    };
    if vars.is_empty() {
        log::warn!("{}: no variables to rename; left unchanged", snippet.id);
        return Ok(Attacked {
            snippet: snippet.clone(),
            meta,
        });
    }
    let count = ((p * vars.len() as f64).ceil() as usize).clamp(1, vars.len());
    let mut chosen: Vec<&String> = vars.choose_multiple(&mut rng(seed, snippet), count).collect();
    chosen.sort();

    let lx = Lexed::new(&snippet.text, snippet.language);
    let mut taken: HashSet<String> = lx
        .tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Ident)
        .map(|t| t.text(lx.src).to_string())
        .collect();
    let mut text = snippet.text.clone();
    let mut renamed = Vec::with_capacity(count);
    let mut next = 0usize;
    for old in chosen {
        let new = loop {
            let cand = format!("var_{next}");
            next += 1;
            if !taken.contains(&cand) {
                break cand;
            }
        };
        taken.insert(new.clone());
        text = rename_identifier(&Lexed::new(&text, snippet.language), old, &new);
        renamed.push(Renamed {
            from: old.clone(),
            to: new,
        });
    }
    meta.renamed = Some(renamed);
    Ok(Attacked {
        snippet: snippet.with_text(text),
        meta,
    })
}

/// Applies up to `k` distinct random deterministic rules in sequence.
pub fn transform_attack(snippet: &CodeSnippet, k: usize, seed: u64) -> Result<Attacked> {
    AttackSpec::transform(k, seed).validate()?;
    let mut rng = rng(seed, snippet);
    let mut pool = rules::catalog().deterministic();
    let mut cur = snippet.clone();
    let mut applied = Vec::new();
    while applied.len() < k {
        let usable: Vec<usize> = (0..pool.len()).filter(|&i| rules::is_applicable(pool[i], &cur)).collect();
        let Some(&i) = usable.choose(&mut rng) else { break };
        let rule = pool.remove(i);
        cur = rules::apply(rule, &cur)?;
        applied.push(rule.rule_id.to_string());
    }
    if applied.len() < k {
        log::debug!("{}: only {} of {k} transformations applicable", snippet.id, applied.len());
    }
    Ok(Attacked {
        snippet: cur,
        meta: AttackMeta {
            snippet_id: snippet.id.clone(),
            kind: "transform".into(),
            params: json!({ "k": k }),
            seed: Some(seed),
            applied_rules: Some(applied),
            renamed: None,
        },
    })
}

/// One paraphrasing request; the reply is taken as is.
pub fn paraphrase_attack(backend: &Backend, snippet: &CodeSnippet) -> Result<Attacked> {
    let text = backend.paraphrase(snippet)?;
    Ok(Attacked {
        snippet: snippet.with_text(text),
        meta: AttackMeta {
            snippet_id: snippet.id.clone(),
            kind: "paraphrase".into(),
            params: json!({}),
            seed: None,
            applied_rules: None,
            renamed: None,
        },
    })
}

pub fn apply_attack(backend: &Backend, spec: &AttackSpec, snippet: &CodeSnippet) -> Result<Attacked> {
    match spec.kind {
        AttackKind::Rename { p } => rename_attack(snippet, p, spec.seed),
        AttackKind::Transform { k } => transform_attack(snippet, k, spec.seed),
        AttackKind::Paraphrase => paraphrase_attack(backend, snippet),
    }
}

pub fn attack_batch(
    backend: &Backend,
    spec: &AttackSpec,
    snippets: &[CodeSnippet],
    exec: Exec,
) -> Result<Vec<Result<Attacked>>> {
    spec.validate()?;
    Ok(exec.map(snippets, |s| apply_attack(backend, spec, s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Language;

    fn sample() -> CodeSnippet {
        CodeSnippet::synthetic(
            "s.c",
            Language::C,
            "int total(int *xs, int n) {\n    int acc = 0;\n    int i;\n    for (i = 0; i < n; i++) {\n        acc += xs[i];\n    }\n    return acc;\n}\n",
        )
    }

    #[test]
    fn rename_counts_use_ceiling() {
        // V = {acc, i, n, xs}
        let s = sample();
        assert_eq!(extract_profile(&s).var_set.len(), 4);
        let a = rename_attack(&s, 0.5, 3).unwrap();
        assert_eq!(a.meta.renamed.as_ref().unwrap().len(), 2);
        let a = rename_attack(&s, 0.25, 3).unwrap();
        assert_eq!(a.meta.renamed.as_ref().unwrap().len(), 1);
        let a = rename_attack(&s, 0.3, 3).unwrap();
        assert_eq!(a.meta.renamed.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn full_rename_replaces_every_variable() {
        let s = sample();
        let a = rename_attack(&s, 1.0, 11).unwrap();
        let before = extract_profile(&s).var_set;
        let after = extract_profile(&a.snippet).var_set;
        assert!(before.is_disjoint(&after));
        assert_eq!(after.len(), before.len());
    }

    #[test]
    fn fresh_names_avoid_existing_identifiers() {
        let s = CodeSnippet::synthetic("v.py", Language::Python, "def f(a, var_0):\n    return a + var_0\n");
        let a = rename_attack(&s, 0.5, 0).unwrap();
        let r = &a.meta.renamed.unwrap()[0];
        assert_ne!(r.to, "var_0");
        assert_eq!(extract_profile(&a.snippet).var_set.len(), 2);
    }

    #[test]
    fn empty_variable_set_is_a_no_op() {
        let s = CodeSnippet::synthetic("e.c", Language::C, "int one(void) { return 1; }");
        let a = rename_attack(&s, 1.0, 0).unwrap();
        assert_eq!(a.snippet.text, s.text);
        assert!(a.meta.renamed.unwrap().is_empty());
    }

    #[test]
    fn attacks_are_seed_deterministic() {
        let s = sample();
        assert_eq!(rename_attack(&s, 0.5, 9).unwrap(), rename_attack(&s, 0.5, 9).unwrap());
        assert_eq!(transform_attack(&s, 3, 7).unwrap(), transform_attack(&s, 3, 7).unwrap());
    }

    #[test]
    fn transform_count_is_bounded_by_applicability() {
        let s = CodeSnippet::synthetic("r.c", Language::C, "return x;");
        let a = transform_attack(&s, 3, 7).unwrap();
        assert!(a.meta.applied_rules.unwrap().len() < 3);
        assert!(transform_attack(&s, 0, 7).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(AttackSpec::rename(0.5, 1).to_string(), "V@50%");
        assert_eq!(AttackSpec::transform(3, 1).to_string(), "T@3");
        let json = serde_json::to_string(&AttackSpec::transform(2, 5)).unwrap();
        assert_eq!(json, r#"{"kind":"transform","k":2,"seed":5}"#);
    }
}
