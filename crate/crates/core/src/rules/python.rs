//! Physical-line view over a token stream, used by the indentation-aware
//! rewrites.

use crate::corpus::Language;
use crate::lexer::{Lexed, TokenKind};

#[derive(Clone, Debug)]
pub(super) struct Line {
    pub start: usize,
    /// Offset of the terminating `\n` (or end of input).
    pub end: usize,
    pub indent: usize,
    /// First and last significant token starting on this line.
    pub first: Option<usize>,
    pub last: Option<usize>,
    /// Starts inside a multi-line literal or open bracket.
    pub continuation: bool,
    pub has_comment: bool,
}

impl Line {
    pub fn is_blank(&self, src: &str) -> bool {
        src[self.start..self.end].trim().is_empty()
    }

    pub fn indent_str<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.start + self.indent]
    }

    /// Number of significant tokens on the line.
    pub fn width(&self) -> usize {
        match (self.first, self.last) {
            (Some(a), Some(b)) => b - a + 1,
            _ => 0,
        }
    }
}

pub(super) fn lines(lx: &Lexed<'_>) -> Vec<Line> {
    let src = lx.src;
    let mut out = Vec::new();
    let mut start = 0;
    loop {
        let end = src[start..].find('\n').map_or(src.len(), |p| start + p);
        let text = &src[start..end];
        let indent = text.len() - text.trim_start_matches([' ', '\t']).len();
        out.push(Line {
            start,
            end,
            indent,
            first: None,
            last: None,
            continuation: false,
            has_comment: false,
        });
        if end >= src.len() {
            break;
        }
        start = end + 1;
    }
    let starts: Vec<usize> = out.iter().map(|l: &Line| l.start).collect();
    let line_of = |off: usize| starts.partition_point(|&s| s <= off) - 1;

    for t in lx.tokens.iter().filter(|t| matches!(t.kind, TokenKind::Str | TokenKind::Comment)) {
        // Lines beginning strictly inside a literal continue it.
        if t.end > t.start {
            let a = line_of(t.start);
            let b = line_of(t.end - 1);
            for line in &mut out[a + 1..=b] {
                if line.start > t.start {
                    line.continuation = true;
                }
            }
        }
    }
    for t in lx.tokens.iter().filter(|t| t.kind == TokenKind::Comment) {
        let l = line_of(t.start);
        out[l].has_comment = true;
    }
    let py = lx.lang == Language::Python;
    let mut depth = 0i32;
    let mut current_line = usize::MAX;
    for i in 0..lx.sig_len() {
        let t = lx.s(i);
        let l = line_of(t.start);
        if l != current_line {
            current_line = l;
            if depth > 0 {
                out[l].continuation = true;
            }
            out[l].first = Some(i);
        }
        out[l].last = Some(i);
        // Braces delimit blocks in the C family, not continuations.
        if t.kind == TokenKind::Punct {
            match lx.st(i) {
                "(" | "[" => depth += 1,
                ")" | "]" => depth -= 1,
                "{" if py => depth += 1,
                "}" if py => depth -= 1,
                _ => {}
            }
        }
    }
    out
}

/// Extent of an indented block starting at line `from`: every following line
/// that is blank or indented deeper than `indent`. Trailing blank lines are
/// excluded. Returns the inclusive line range, or `None` if empty.
pub(super) fn block(lines: &[Line], src: &str, from: usize, indent: usize) -> Option<(usize, usize)> {
    let mut last = None;
    for (k, l) in lines.iter().enumerate().skip(from) {
        if l.continuation {
            continue;
        }
        if l.is_blank(src) {
            continue;
        }
        if l.indent <= indent {
            break;
        }
        last = Some(k);
    }
    last.map(|b| (from, b))
}

/// Index of the line holding significant token `i`.
pub(super) fn line_index(lines: &[Line], lx: &Lexed<'_>, i: usize) -> usize {
    let off = lx.start(i);
    lines.partition_point(|l| l.start <= off) - 1
}
