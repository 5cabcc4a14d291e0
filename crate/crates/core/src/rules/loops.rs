//! Loop rewrites for brace-family languages.

use super::edits::{has_comment, has_multiline_literal, indent_unit, is_type_word, line_indent, reindent, split_top_commas, Edits};
use crate::lexer::{Lexed, TokenKind};

fn contains_word(lx: &Lexed<'_>, from: usize, to: usize, word: &str) -> bool {
    (from..to).any(|i| lx.is_word(i, word))
}

/// Statement text for a comma-separated expression list, one statement each.
fn as_statements(lx: &Lexed<'_>, from: usize, to: usize) -> Vec<String> {
    if from >= to {
        return Vec::new();
    }
    split_top_commas(lx, from, to)
        .into_iter()
        .filter(|(a, b)| a <= b)
        .map(|(a, b)| format!("{};", lx.span(a, b).trim()))
        .collect()
}

/// Whether a for-loop init clause declares its variables (`int i = 0`).
fn is_declaration(lx: &Lexed<'_>, from: usize, to: usize) -> bool {
    from < to && lx.s(from).kind == TokenKind::Ident && is_type_word(lx.st(from))
}

/// `for (init; cond; step) { body }` becomes
/// `init; while (cond) { body step; }`.
///
/// Sites whose body contains `continue` are skipped (the step would be
/// bypassed), as are loops with an empty condition.
pub(super) fn for_to_while(lx: &Lexed<'_>) -> Option<String> {
    if !lx.lang.is_brace_family() {
        return None;
    }
    let src = lx.src;
    let unit = indent_unit(src);
    let mut edits = Edits::new();
    for i in 0..lx.sig_len() {
        if !lx.is_word(i, "for") || !lx.is_punct(i + 1, "(") {
            continue;
        }
        let Some(close) = lx.matching_close(i + 1) else { continue };
        let Some(s1) = lx.find_at_depth0(i + 2, ";") else { continue };
        if s1 >= close {
            continue;
        }
        let Some(s2) = lx.find_at_depth0(s1 + 1, ";") else { continue };
        if s2 >= close || s2 == s1 + 1 {
            continue;
        }
        if !lx.is_punct(close + 1, "{") {
            continue;
        }
        let Some(body_close) = lx.matching_close(close + 1) else { continue };
        if contains_word(lx, close + 1, body_close, "continue") {
            continue;
        }
        if has_comment(lx, lx.start(i), lx.end(close)) {
            continue;
        }

        let init_range = (i + 2, s1);
        let is_decl = is_declaration(lx, init_range.0, init_range.1);
        // Declared loop variables go out of scope after the loop; keep that by
        // wrapping in a block when the name is reused elsewhere.
        let mut needs_block = false;
        if is_decl {
            for (a, b) in split_top_commas(lx, init_range.0, init_range.1) {
                let name_at = (a..=b).find(|&k| {
                    lx.s(k).kind == TokenKind::Ident
                        && !is_type_word(lx.st(k))
                        && (k + 1 > b || lx.is_punct(k + 1, "=") || lx.is_punct(k + 1, ","))
                });
                if let Some(k) = name_at {
                    let name = lx.st(k);
                    let used_outside = (0..lx.sig_len()).any(|m| {
                        (m < i || m > body_close)
                            && lx.s(m).kind == TokenKind::Ident
                            && lx.st(m) == name
                    });
                    needs_block |= used_outside;
                }
            }
        }

        let init = if init_range.0 < init_range.1 {
            if is_decl {
                vec![format!("{};", lx.span(init_range.0, init_range.1 - 1).trim())]
            } else {
                as_statements(lx, init_range.0, init_range.1)
            }
        } else {
            Vec::new()
        };
        let cond = lx.span(s1 + 1, s2 - 1).trim();
        let step = as_statements(lx, s2 + 1, close);

        let ind = line_indent(src, lx.start(i));
        let body_inner = &src[lx.end(close + 1)..lx.start(body_close)];
        let multiline = body_inner.contains('\n');
        let mut text = String::new();
        let mut sep = String::from(" ");
        if multiline {
            sep = format!("\n{ind}");
        }
        for s in &init {
            text.push_str(s);
            text.push_str(&sep);
        }
        text.push_str(&format!("while ({cond}) {{"));
        if multiline {
            let body_ind = body_inner
                .lines()
                .skip(1)
                .find(|l| !l.trim().is_empty())
                .map(|l| &l[..l.len() - l.trim_start().len()])
                .map(str::to_string)
                .unwrap_or_else(|| format!("{ind}{unit}"));
            text.push_str(body_inner.trim_end());
            for s in &step {
                text.push_str(&format!("\n{body_ind}{s}"));
            }
            text.push_str(&format!("\n{ind}}}"));
        } else {
            text.push_str(body_inner.trim_end());
            for s in &step {
                text.push(' ');
                text.push_str(s);
            }
            text.push_str(" }");
        }
        if needs_block {
            if multiline {
                if has_multiline_literal(lx, lx.start(i), lx.end(body_close)) {
                    continue;
                }
                text = format!("{{\n{ind}{unit}{}\n{ind}}}", reindent(&text, unit));
            } else {
                text = format!("{{ {text} }}");
            }
        }
        edits.push(lx.start(i), lx.end(body_close), text);
    }
    edits.apply(src)
}

/// `while (c) { body }` becomes `if (c) do { body } while (c);`.
///
/// The guard keeps the zero-iteration case; the condition is evaluated in
/// the same sequence as before.
pub(super) fn while_to_do_while(lx: &Lexed<'_>) -> Option<String> {
    if !lx.lang.is_brace_family() {
        return None;
    }
    let mut edits = Edits::new();
    for i in 0..lx.sig_len() {
        if !lx.is_word(i, "while") || !lx.is_punct(i + 1, "(") {
            continue;
        }
        let Some(close) = lx.matching_close(i + 1) else { continue };
        if close == i + 2 || !lx.is_punct(close + 1, "{") {
            continue;
        }
        let Some(body_close) = lx.matching_close(close + 1) else { continue };
        // A trailing `else` would re-bind to the new `if`; a label would
        // end up on the `if`.
        if lx.is_word(body_close + 1, "else") || (i > 0 && lx.is_punct(i - 1, ":")) {
            continue;
        }
        if has_comment(lx, lx.start(i), lx.end(close)) {
            continue;
        }
        let cond = lx.span(i + 2, close - 1).trim();
        let body = lx.span(close + 1, body_close);
        let text = format!("if ({cond}) do {body} while ({cond});");
        edits.push(lx.start(i), lx.end(body_close), text);
    }
    edits.apply(lx.src)
}
