//! Prompt templates for the remote backend. The wording is fixed and
//! versioned so runs can be compared; bump [`PROMPT_VERSION`] on any edit.

use crate::corpus::CodeSnippet;
use crate::embedder::WatermarkBits;
use crate::error::{Error, Result};
use crate::rules::TransformationRule;

pub const PROMPT_VERSION: &str = "codemark-prompts/1";

pub const EMBED_ROLE: &str =
    "You are an experienced programmer who rewrites code without changing what it does or breaking its syntax.";

pub const EXTRACT_ROLE: &str =
    "You are an expert at spotting small rewrites between two versions of the same source code.";

/// `w = (1, 0, 0, 1)`
pub fn bit_tuple(bits: &WatermarkBits) -> String {
    let parts: Vec<String> = bits.iter().map(|b| u8::from(b).to_string()).collect();
    format!("w = ({})", parts.join(", "))
}

fn rule_lines(rules: &[&TransformationRule]) -> String {
    rules
        .iter()
        .enumerate()
        .map(|(i, r)| format!("  {}. {} ({}): {}", i + 1, r.display_name(), r.rule_id, r.description))
        .collect::<Vec<_>>()
        .join("\n")
}

fn fenced(snippet: &CodeSnippet) -> String {
    format!("```{}\n{}\n```", snippet.language.as_str(), snippet.text.trim_end_matches('\n'))
}

pub fn render_embed_prompt(
    snippet: &CodeSnippet,
    bits: &WatermarkBits,
    sub_rules: &[&TransformationRule],
) -> Result<String> {
    if sub_rules.len() != bits.len() {
        return Err(Error::LengthMismatch {
            index: 0,
            expected: bits.len(),
            found: sub_rules.len(),
        });
    }
    if sub_rules.is_empty() {
        return Err(Error::InvalidArgument("an embedding prompt needs at least one bit".into()));
    }
    Ok(format!(
        "Role: {EMBED_ROLE}\n\
         \n\
         Description: You receive a piece of source code and a watermark bitstring. Embed the bitstring by applying behavior-preserving rewrites.\n\
         \n\
         Rules:\n\
         - When bit w_k is 1, apply exactly one rewrite of the kind named by sub-rule k.\n\
         - When bit w_k is 0, do not apply sub-rule k.\n\
         - Respect the constraints of each rewrite kind.\n\
         - Do not change behavior and do not add comments.\n\
         \n\
         Example:\n\
         Input: w = (1, 0, 0, 1) with sub-rules {{camel to snake, for to while, group ops, insert blank line}}\n\
         Output: the code with rewrites 1 and 4 applied and rewrites 2 and 3 left out.\n\
         \n\
         Task:\n\
         Bitstring: {}\n\
         Sub-rules, in bit order:\n\
         {}\n\
         Code:\n\
         {}\n\
         \n\
         Reply with the complete rewritten code in a single fenced code block.\n",
        bit_tuple(bits),
        rule_lines(sub_rules),
        fenced(snippet),
    ))
}

pub fn render_extract_prompt(
    original: &CodeSnippet,
    watermarked: &CodeSnippet,
    sub_rules: &[&TransformationRule],
) -> Result<String> {
    if sub_rules.is_empty() {
        return Err(Error::InvalidArgument("an extraction prompt needs at least one sub-rule".into()));
    }
    Ok(format!(
        "Role: {EXTRACT_ROLE}\n\
         \n\
         Description: You receive an original function and a watermarked version of it. Decide which rewrites were applied so the watermark can be read back.\n\
         \n\
         Rules:\n\
         - For bit position k, compare the two versions with respect to sub-rule k only.\n\
         - Set w_k = 1 when sub-rule k was applied and w_k = 0 otherwise.\n\
         - Give a short reason for each bit based on structure and behavior.\n\
         \n\
         Example:\n\
         Input: a code pair {{Original, Watermarked}} and a sub-rule list\n\
         Output: w = (1, 0, 0, 1) followed by one reason per bit.\n\
         \n\
         Task:\n\
         Sub-rules, in bit order ({} positions):\n\
         {}\n\
         [ORIGINAL]\n\
         {}\n\
         [TRANSFORMED]\n\
         {}\n\
         \n\
         Start your reply with the recovered bits written as w = (...).\n",
        sub_rules.len(),
        rule_lines(sub_rules),
        fenced(original),
        fenced(watermarked),
    ))
}

pub fn render_rank_prompt(snippet: &CodeSnippet, candidates: &[&TransformationRule]) -> String {
    format!(
        "Role: {EMBED_ROLE}\n\
         \n\
         Below is a function and a list of rewrite kinds. List the rewrite kinds that can be applied to this function without changing its behavior, most suitable first. Reply with one rule id per line and nothing else; leave out kinds that do not apply.\n\
         \n\
         Rewrite kinds:\n\
         {}\n\
         \n\
         Code:\n\
         {}\n",
        rule_lines(candidates),
        fenced(snippet),
    )
}

pub fn render_verify_prompt(before: &CodeSnippet, after: &CodeSnippet) -> String {
    format!(
        "Role: {EXTRACT_ROLE}\n\
         \n\
         Do these two functions behave identically for every input? Answer with a single word, yes or no.\n\
         \n\
         [FIRST]\n\
         {}\n\
         [SECOND]\n\
         {}\n",
        fenced(before),
        fenced(after),
    )
}

pub fn render_paraphrase_prompt(snippet: &CodeSnippet) -> String {
    format!(
        "Role: {EMBED_ROLE}\n\
         \n\
         Rewrite the following function in your own style while preserving its exact behavior. Reply with the complete rewritten code in a single fenced code block.\n\
         \n\
         {}\n",
        fenced(snippet),
    )
}

/// Body of the last fenced code block in a reply.
pub fn last_code_block(reply: &str) -> Option<String> {
    let mut blocks = Vec::new();
    let mut rest = reply;
    while let Some(open) = rest.find("```") {
        let after_ticks = &rest[open + 3..];
        let body_start = after_ticks.find('\n').map_or(after_ticks.len(), |p| p + 1);
        let body = &after_ticks[body_start..];
        let Some(close) = body.find("```") else { break };
        blocks.push(&body[..close]);
        rest = &body[close + 3..];
    }
    let block = blocks.pop()?;
    let text = block.strip_suffix('\n').unwrap_or(block);
    (!text.trim().is_empty()).then(|| text.to_string())
}

/// Parses `w = (1, 0, 1)` (spacing and separators are flexible).
pub fn parse_bit_tuple(reply: &str) -> Option<Vec<bool>> {
    let at = reply.find("w =").or_else(|| reply.find("w="))?;
    let open = at + reply[at..].find('(')?;
    let close = open + reply[open..].find(')')?;
    let bits: Option<Vec<bool>> = reply[open + 1..close]
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "0" => Some(false),
            "1" => Some(true),
            _ => None,
        })
        .collect();
    bits.filter(|b| !b.is_empty())
}

/// Leading yes/no of a reply.
pub fn parse_yes_no(reply: &str) -> Option<bool> {
    let word: String = reply
        .trim_start()
        .chars()
        .take_while(|c| c.is_alphabetic())
        .collect::<String>()
        .to_lowercase();
    match word.as_str() {
        "yes" => Some(true),
        "no" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_block_extraction() {
        let reply = "Sure.\n```python\ndef f():\n    pass\n```\nthen\n```c\nint g(void);\n```\n";
        assert_eq!(last_code_block(reply).unwrap(), "int g(void);");
        assert_eq!(last_code_block("no code here"), None);
        assert_eq!(last_code_block("```\n\n```"), None);
    }

    #[test]
    fn bit_tuple_parsing() {
        assert_eq!(parse_bit_tuple("w = (1, 0, 0, 1) because"), Some(vec![true, false, false, true]));
        assert_eq!(parse_bit_tuple("w=(0 1)"), Some(vec![false, true]));
        assert_eq!(parse_bit_tuple("w = (2)"), None);
    }

    #[test]
    fn yes_no() {
        assert_eq!(parse_yes_no(" Yes."), Some(true));
        assert_eq!(parse_yes_no("no, because"), Some(false));
        assert_eq!(parse_yes_no("maybe"), None);
    }
}
