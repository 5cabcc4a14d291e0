use crate::lexer::{Lexed, TokenKind};

/// Non-overlapping byte-range replacements, applied in one pass.
#[derive(Debug, Default)]
pub(crate) struct Edits {
    items: Vec<(usize, usize, String)>,
}

impl Edits {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the edit unless it overlaps one already accepted. Returns whether it was taken.
    pub fn push(&mut self, start: usize, end: usize, replacement: impl Into<String>) -> bool {
        // Insertions conflict with each other only at the same offset, and
        // with ranges only when strictly inside them.
        let overlaps = self.items.iter().any(|&(s, e, _)| match (start == end, s == e) {
            (true, true) => start == s,
            (true, false) => start > s && start < e,
            (false, true) => s > start && s < end,
            (false, false) => start < e && s < end,
        });
        if overlaps {
            return false;
        }
        self.items.push((start, end, replacement.into()));
        true
    }

    /// Adds all edits or none of them.
    pub fn push_all(&mut self, items: Vec<(usize, usize, String)>) -> bool {
        let saved = self.items.len();
        for (s, e, r) in items {
            if !self.push(s, e, r) {
                self.items.truncate(saved);
                return false;
            }
        }
        true
    }

    /// Applies the edits; `None` if there were none.
    pub fn apply(mut self, src: &str) -> Option<String> {
        if self.items.is_empty() {
            return None;
        }
        self.items.sort_by_key(|&(s, e, _)| (s, e));
        let mut out = String::with_capacity(src.len() + 64);
        let mut pos = 0;
        for (s, e, r) in &self.items {
            out.push_str(&src[pos..*s]);
            out.push_str(r);
            pos = *e;
        }
        out.push_str(&src[pos..]);
        Some(out)
    }
}

/// Leading whitespace of the line containing byte offset `at`.
pub(crate) fn line_indent(src: &str, at: usize) -> &str {
    let line_start = src[..at].rfind('\n').map_or(0, |p| p + 1);
    let rest = &src[line_start..];
    let n = rest.len() - rest.trim_start_matches([' ', '\t']).len();
    &rest[..n]
}

/// Indentation unit guessed from the source (defaults to four spaces).
pub(crate) fn indent_unit(src: &str) -> &'static str {
    if src.lines().any(|l| l.starts_with('\t')) {
        "\t"
    } else if src
        .lines()
        .filter(|l| !l.trim().is_empty())
        .any(|l| l.len() - l.trim_start().len() == 2)
    {
        "  "
    } else {
        "    "
    }
}

/// Whether the significant token `i` begins a statement (brace family).
pub(crate) fn at_statement_start(lx: &Lexed<'_>, i: usize) -> bool {
    i == 0 || matches!(lx.st(i - 1), ";" | "{" | "}") && lx.s(i - 1).kind == TokenKind::Punct
}

/// Words that may make up the type part of a simple declaration.
pub(crate) fn is_type_word(w: &str) -> bool {
    matches!(
        w,
        "int" | "long" | "short" | "char" | "double" | "float" | "bool" | "boolean" | "unsigned"
            | "signed" | "const" | "final" | "var" | "let" | "auto" | "size_t" | "byte"
            | "String" | "string" | "int64_t" | "uint64_t"
    )
}

/// Literal-ish token run: a single number, string, boolean or null, optionally negated.
pub(crate) fn is_simple_literal(lx: &Lexed<'_>, from: usize, to: usize) -> bool {
    let mut i = from;
    if i < to && lx.is_punct(i, "-") {
        i += 1;
    }
    if i + 1 != to {
        return false;
    }
    match lx.s(i).kind {
        TokenKind::Number | TokenKind::Str => true,
        TokenKind::Ident => matches!(
            lx.st(i),
            "true" | "false" | "null" | "True" | "False" | "None"
        ),
        _ => false,
    }
}

/// Whether a run of significant tokens contains any comment or multi-line
/// literal (which must not be re-indented).
pub(crate) fn has_multiline_literal(lx: &Lexed<'_>, start: usize, end: usize) -> bool {
    lx.tokens.iter().any(|t| {
        t.start >= start
            && t.end <= end
            && matches!(t.kind, TokenKind::Str | TokenKind::Comment)
            && t.text(lx.src).contains('\n')
    })
}

/// Whether a comment lies within the byte range.
pub(crate) fn has_comment(lx: &Lexed<'_>, start: usize, end: usize) -> bool {
    lx.tokens
        .iter()
        .any(|t| t.kind == TokenKind::Comment && t.start >= start && t.end <= end)
}

/// Adds `extra` after every newline of `text` that is followed by content.
pub(crate) fn reindent(text: &str, extra: &str) -> String {
    let mut out = String::with_capacity(text.len() + 32);
    let mut first = true;
    for line in text.split('\n') {
        if !first {
            out.push('\n');
            if !line.trim().is_empty() {
                out.push_str(extra);
            }
        }
        first = false;
        out.push_str(line);
    }
    out
}

/// Splits the significant range `from..to` at top-level commas, returning
/// `(first, last)` inclusive ranges.
pub(crate) fn split_top_commas(lx: &Lexed<'_>, from: usize, to: usize) -> Vec<(usize, usize)> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut part_start = from;
    for i in from..to {
        if lx.s(i).kind == TokenKind::Punct {
            match lx.st(i) {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                "," if depth == 0 => {
                    parts.push((part_start, i.saturating_sub(1)));
                    part_start = i + 1;
                    continue;
                }
                _ => {}
            }
        }
    }
    parts.push((part_start, to.saturating_sub(1)));
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edits_apply_in_order() {
        let mut e = Edits::new();
        assert!(e.push(4, 5, "B"));
        assert!(e.push(0, 1, "A"));
        assert!(!e.push(0, 2, "X"));
        assert_eq!(e.apply("abcdefg").unwrap(), "AbcdBfg");
    }

    #[test]
    fn insertions_at_edges_are_allowed() {
        let mut e = Edits::new();
        assert!(e.push(1, 2, "Y"));
        assert!(e.push(2, 2, " "));
        assert!(e.push(1, 1, " "));
        assert!(!e.push(1, 1, "  "));
        assert_eq!(e.apply("abc").unwrap(), "a Y c");
    }

    #[test]
    fn reindent_skips_blank_lines() {
        assert_eq!(reindent("a\n\n b\n", "  "), "a\n\n   b\n");
    }

    #[test]
    fn line_indent_finds_leading_ws() {
        let src = "x\n    for (;;)";
        assert_eq!(line_indent(src, src.find("for").unwrap()), "    ");
    }
}
