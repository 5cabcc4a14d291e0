//! Code-organization rewrites: branch order, braces, temporaries,
//! declarations and whitespace.

use super::edits::{at_statement_start, has_comment, is_simple_literal, is_type_word, split_top_commas, Edits};
use super::naming::function_name_index;
use super::python::{block, line_index, lines, Line};
use crate::corpus::Language;
use crate::lexer::{is_keyword, is_reserved, Lexed, TokenKind};

fn is_python(lx: &Lexed<'_>) -> bool {
    lx.lang == Language::Python
}

/// Whether token `i` sits on a preprocessor line.
fn in_directive(lx: &Lexed<'_>, i: usize) -> bool {
    if !matches!(lx.lang, Language::C | Language::Cpp) {
        return false;
    }
    let at = lx.start(i);
    let line_start = lx.src[..at].rfind('\n').map_or(0, |p| p + 1);
    lx.src[line_start..].trim_start().starts_with('#')
}

fn line_has_comment(lx: &Lexed<'_>, l: &Line) -> bool {
    has_comment(lx, l.start, l.end)
}

// ---------------------------------------------------------------------------
// optimize_cond

pub(super) fn optimize_cond(lx: &Lexed<'_>) -> Option<String> {
    if is_python(lx) {
        return optimize_cond_py(lx);
    }
    let mut edits = Edits::new();
    for i in 0..lx.sig_len() {
        if !lx.is_word(i, "if") || !lx.is_punct(i + 1, "(") {
            continue;
        }
        let Some(close) = lx.matching_close(i + 1) else { continue };
        if close == i + 2 || !lx.is_punct(close + 1, "{") {
            continue;
        }
        let Some(then_close) = lx.matching_close(close + 1) else { continue };
        if !lx.is_word(then_close + 1, "else") || !lx.is_punct(then_close + 2, "{") {
            continue;
        }
        let else_open = then_close + 2;
        let Some(else_close) = lx.matching_close(else_open) else { continue };
        let src = lx.src;
        let cond = lx.span(i + 2, close - 1).trim();
        let text = format!(
            "(!({cond})){}{}{}else{}{}",
            &src[lx.end(close)..lx.start(close + 1)],
            lx.span(else_open, else_close),
            &src[lx.end(then_close)..lx.start(then_close + 1)],
            &src[lx.end(then_close + 1)..lx.start(else_open)],
            lx.span(close + 1, then_close),
        );
        edits.push(lx.start(i + 1), lx.end(else_close), text);
    }
    edits.apply(lx.src)
}

fn optimize_cond_py(lx: &Lexed<'_>) -> Option<String> {
    let src = lx.src;
    let ls = lines(lx);
    let mut edits = Edits::new();
    for (k, l) in ls.iter().enumerate() {
        let (Some(first), Some(last)) = (l.first, l.last) else { continue };
        if l.continuation || !lx.is_word(first, "if") || !lx.is_punct(last, ":") || last < first + 2 {
            continue;
        }
        if line_has_comment(lx, l) || line_index(&ls, lx, last) != k {
            continue;
        }
        let Some((a0, a1)) = block(&ls, src, k + 1, l.indent) else { continue };
        let Some(e) = (a1 + 1..ls.len()).find(|&m| !ls[m].is_blank(src) && !ls[m].continuation) else {
            continue;
        };
        let el = &ls[e];
        let is_else = el.indent == l.indent
            && el.width() == 2
            && lx.is_word(el.first.unwrap(), "else")
            && lx.is_punct(el.last.unwrap(), ":")
            && !line_has_comment(lx, el);
        if !is_else {
            continue;
        }
        let Some((b0, b1)) = block(&ls, src, e + 1, l.indent) else { continue };
        let ind = l.indent_str(src);
        let cond = lx.span(first + 1, last - 1).trim();
        let a_text = &src[ls[a0].start..ls[a1].end];
        let b_text = &src[ls[b0].start..ls[b1].end];
        let text = format!("if not ({cond}):\n{b_text}\n{ind}else:\n{a_text}");
        edits.push(lx.start(first), ls[b1].end, text);
    }
    edits.apply(src)
}

// ---------------------------------------------------------------------------
// add_braces

const COMPOUND_START: &[&str] = &[
    "if", "for", "while", "do", "switch", "try", "else", "case", "default", "catch", "finally",
];

pub(super) fn add_braces(lx: &Lexed<'_>) -> Option<String> {
    if !lx.lang.is_brace_family() {
        return None;
    }
    let mut edits = Edits::new();
    for i in 0..lx.sig_len() {
        let body = if lx.is_word(i, "else") {
            i + 1
        } else if (lx.is_word(i, "if") || lx.is_word(i, "for") || lx.is_word(i, "while"))
            && lx.is_punct(i + 1, "(")
        {
            match lx.matching_close(i + 1) {
                Some(c) => c + 1,
                None => continue,
            }
        } else {
            continue;
        };
        if body >= lx.sig_len() {
            continue;
        }
        let t = lx.st(body);
        if lx.s(body).kind == TokenKind::Punct && matches!(t, "{" | ";" | "}") {
            continue;
        }
        if lx.s(body).kind == TokenKind::Ident && COMPOUND_START.contains(&t) {
            continue;
        }
        let Some(semi) = lx.find_at_depth0(body, ";") else { continue };
        // A `{` before the `;` means a block-bodied construct (lambda, initializer).
        if (body..semi).any(|k| lx.is_punct(k, "{")) {
            continue;
        }
        edits.push_all(vec![
            (lx.start(body), lx.start(body), "{ ".to_string()),
            (lx.end(semi), lx.end(semi), " }".to_string()),
        ]);
    }
    edits.apply(lx.src)
}

// ---------------------------------------------------------------------------
// inline_temp

fn count_plain(lx: &Lexed<'_>, name: &str) -> usize {
    (0..lx.sig_len())
        .filter(|&k| lx.s(k).kind == TokenKind::Ident && lx.st(k) == name && !lx.is_member(k))
        .count()
}

fn is_type_token(lx: &Lexed<'_>, k: usize) -> bool {
    match lx.s(k).kind {
        TokenKind::Ident => !matches!(lx.st(k), "return" | "new" | "delete" | "throw"),
        TokenKind::Punct => matches!(lx.st(k), "*" | "&" | "<" | ">" | "::" | "[" | "]" | ","),
        _ => false,
    }
}

const MODIFIERS: &[&str] = &[
    "public", "private", "protected", "static", "inline", "extern", "final", "virtual", "async",
    "function", "def", "synchronized", "abstract",
];

/// Return type of the function, as concatenated token text without modifiers.
fn return_type(lx: &Lexed<'_>) -> Option<String> {
    let f = function_name_index(lx)?;
    let mut out = String::new();
    for k in 0..f {
        if lx.s(k).kind == TokenKind::Ident && MODIFIERS.contains(&lx.st(k)) {
            continue;
        }
        if lx.is_punct(k, "@") {
            return None;
        }
        out.push_str(lx.st(k));
    }
    (!out.is_empty()).then_some(out)
}

pub(super) fn inline_temp(lx: &Lexed<'_>) -> Option<String> {
    if is_python(lx) {
        return inline_temp_py(lx);
    }
    let ret = return_type(lx);
    let mut edits = Edits::new();
    for i in 0..lx.sig_len() {
        if !at_statement_start(lx, i) || lx.s(i).kind != TokenKind::Ident {
            continue;
        }
        let Some(eq) = (i..lx.sig_len()).find(|&k| !is_type_token(lx, k)) else { continue };
        if !lx.is_punct(eq, "=") || eq < i + 2 {
            continue;
        }
        let name_at = eq - 1;
        if lx.s(name_at).kind != TokenKind::Ident || is_reserved(lx.st(name_at)) || is_keyword(lx.st(name_at)) {
            continue;
        }
        let ty: String = (i..name_at).map(|k| lx.st(k)).collect();
        let ty_ok = matches!(ty.as_str(), "var" | "let" | "const" | "auto")
            || ret.as_deref() == Some(ty.as_str());
        if !ty_ok {
            continue;
        }
        let Some(semi) = lx.find_at_depth0(eq + 1, ";") else { continue };
        if semi == eq + 1 {
            continue;
        }
        let name = lx.st(name_at);
        let returns_it = lx.is_word(semi + 1, "return")
            && lx.is_word(semi + 2, name)
            && lx.is_punct(semi + 3, ";");
        if !returns_it || count_plain(lx, name) != 2 {
            continue;
        }
        if has_comment(lx, lx.start(i), lx.end(semi + 3)) {
            continue;
        }
        let expr = lx.span(eq + 1, semi - 1).trim();
        edits.push(lx.start(i), lx.end(semi + 3), format!("return {expr};"));
    }
    edits.apply(lx.src)
}

fn inline_temp_py(lx: &Lexed<'_>) -> Option<String> {
    let src = lx.src;
    let ls = lines(lx);
    let mut edits = Edits::new();
    for k in 0..ls.len().saturating_sub(1) {
        let (l, m) = (&ls[k], &ls[k + 1]);
        let (Some(first), Some(last)) = (l.first, l.last) else { continue };
        if l.continuation || m.continuation || m.indent != l.indent || m.width() != 2 {
            continue;
        }
        if lx.s(first).kind != TokenKind::Ident || !lx.is_punct(first + 1, "=") || last < first + 2 {
            continue;
        }
        let name = lx.st(first);
        if is_reserved(name) || is_keyword(name) {
            continue;
        }
        // Single assignment target, expression confined to this line.
        if lx.find_at_depth0(first + 2, "=").is_some_and(|q| q <= last) {
            continue;
        }
        if line_index(&ls, lx, last) != k {
            continue;
        }
        let mf = m.first.unwrap();
        if !lx.is_word(mf, "return") || !lx.is_word(mf + 1, name) || count_plain(lx, name) != 2 {
            continue;
        }
        if has_comment(lx, l.start, m.end) {
            continue;
        }
        let expr = lx.span(first + 2, last).trim();
        edits.push(lx.start(first), lx.end(mf + 1), format!("return {expr}"));
    }
    edits.apply(src)
}

// ---------------------------------------------------------------------------
// split_decl

pub(super) fn split_decl(lx: &Lexed<'_>) -> Option<String> {
    if is_python(lx) {
        return split_decl_py(lx);
    }
    let mut edits = Edits::new();
    let mut i = 0;
    while i < lx.sig_len() {
        let start = i;
        i += 1;
        if !at_statement_start(lx, start) {
            continue;
        }
        let mut k = start;
        while k < lx.sig_len() && lx.s(k).kind == TokenKind::Ident && is_type_word(lx.st(k)) {
            k += 1;
        }
        if k == start {
            continue;
        }
        while lx.is_punct(k, "[") && lx.is_punct(k + 1, "]") {
            k += 2;
        }
        let Some(semi) = lx.find_at_depth0(k, ";") else { continue };
        let parts = split_top_commas(lx, k, semi);
        if parts.len() < 2 {
            continue;
        }
        let well_formed = parts.iter().all(|&(a, b)| {
            a <= b
                && (lx.is_punct(a, "*")
                    || lx.s(a).kind == TokenKind::Ident && !is_type_word(lx.st(a)) && !is_keyword(lx.st(a)))
        });
        if !well_formed || has_comment(lx, lx.start(start), lx.end(semi)) {
            continue;
        }
        let ty = lx.span(start, k - 1);
        let text = parts
            .iter()
            .map(|&(a, b)| format!("{ty} {};", lx.span(a, b).trim()))
            .collect::<Vec<_>>()
            .join(" ");
        edits.push(lx.start(start), lx.end(semi), text);
        i = semi + 1;
    }
    edits.apply(lx.src)
}

fn split_decl_py(lx: &Lexed<'_>) -> Option<String> {
    let src = lx.src;
    let ls = lines(lx);
    let mut edits = Edits::new();
    for (k, l) in ls.iter().enumerate() {
        let (Some(first), Some(last)) = (l.first, l.last) else { continue };
        if l.continuation || line_has_comment(lx, l) || line_index(&ls, lx, last) != k {
            continue;
        }
        if ls.get(k + 1).is_some_and(|n| n.continuation) {
            continue;
        }
        let Some(eq) = (first..=last).find(|&m| lx.is_punct(m, "=")) else { continue };
        let lhs = split_top_commas(lx, first, eq);
        let rhs = split_top_commas(lx, eq + 1, last + 1);
        if lhs.len() < 2 || lhs.len() != rhs.len() {
            continue;
        }
        let names: Vec<&str> = lhs
            .iter()
            .filter(|&&(a, b)| a == b && lx.s(a).kind == TokenKind::Ident && !is_keyword(lx.st(a)))
            .map(|&(a, _)| lx.st(a))
            .collect();
        let distinct = names.iter().collect::<std::collections::HashSet<_>>().len() == names.len();
        if names.len() != lhs.len() || !distinct {
            continue;
        }
        if !rhs.iter().all(|&(a, b)| a <= b && is_simple_literal(lx, a, b + 1)) {
            continue;
        }
        let ind = l.indent_str(src);
        let text = names
            .iter()
            .zip(&rhs)
            .map(|(n, &(a, b))| format!("{n} = {}", lx.span(a, b)))
            .collect::<Vec<_>>()
            .join(&format!("\n{ind}"));
        edits.push(lx.start(first), lx.end(last), text);
    }
    edits.apply(src)
}

// ---------------------------------------------------------------------------
// reorder_decl

/// `TYPE NAME;` or `TYPE NAME = LITERAL;` starting at `i`: returns the `;` index and the name.
fn simple_decl<'a>(lx: &Lexed<'a>, i: usize) -> Option<(usize, &'a str)> {
    let mut k = i;
    while k < lx.sig_len() && lx.s(k).kind == TokenKind::Ident && is_type_word(lx.st(k)) {
        k += 1;
    }
    if k == i || k >= lx.sig_len() || lx.s(k).kind != TokenKind::Ident || is_keyword(lx.st(k)) {
        return None;
    }
    let name = lx.st(k);
    if lx.is_punct(k + 1, ";") {
        return Some((k + 1, name));
    }
    if !lx.is_punct(k + 1, "=") {
        return None;
    }
    let semi = lx.find_at_depth0(k + 2, ";")?;
    is_simple_literal(lx, k + 2, semi).then_some((semi, name))
}

pub(super) fn reorder_decl(lx: &Lexed<'_>) -> Option<String> {
    if is_python(lx) {
        return reorder_decl_py(lx);
    }
    let src = lx.src;
    let mut edits = Edits::new();
    for i in 0..lx.sig_len() {
        if !at_statement_start(lx, i) {
            continue;
        }
        let Some((s1, n1)) = simple_decl(lx, i) else { continue };
        let Some((s2, n2)) = simple_decl(lx, s1 + 1) else { continue };
        if n1 == n2 || has_comment(lx, lx.start(i), lx.end(s2)) {
            continue;
        }
        let text = format!(
            "{}{}{}",
            lx.span(s1 + 1, s2),
            &src[lx.end(s1)..lx.start(s1 + 1)],
            lx.span(i, s1)
        );
        edits.push(lx.start(i), lx.end(s2), text);
    }
    edits.apply(src)
}

fn py_literal_assign<'a>(lx: &Lexed<'a>, l: &Line) -> Option<&'a str> {
    let (first, last) = (l.first?, l.last?);
    let ok = !l.continuation
        && lx.s(first).kind == TokenKind::Ident
        && !is_keyword(lx.st(first))
        && lx.is_punct(first + 1, "=")
        && is_simple_literal(lx, first + 2, last + 1);
    ok.then(|| lx.st(first))
}

fn reorder_decl_py(lx: &Lexed<'_>) -> Option<String> {
    let ls = lines(lx);
    let mut edits = Edits::new();
    for k in 0..ls.len().saturating_sub(1) {
        let (l, m) = (&ls[k], &ls[k + 1]);
        if l.indent != m.indent || line_has_comment(lx, l) || line_has_comment(lx, m) {
            continue;
        }
        if ls.get(k + 2).is_some_and(|n| n.continuation) {
            continue;
        }
        let (Some(a), Some(b)) = (py_literal_assign(lx, l), py_literal_assign(lx, m)) else { continue };
        if a == b {
            continue;
        }
        let l_text = lx.span(l.first.unwrap(), l.last.unwrap());
        let m_text = lx.span(m.first.unwrap(), m.last.unwrap());
        edits.push(lx.start(l.first.unwrap()), lx.end(m.last.unwrap()), format!("{m_text}\n{}{l_text}", l.indent_str(lx.src)));
    }
    edits.apply(lx.src)
}

// ---------------------------------------------------------------------------
// reorder_cond

/// Operand free of calls, indexing, member access, division and assignment,
/// so evaluating it early cannot fail or have effects.
fn pure_operand(lx: &Lexed<'_>, a: usize, b: usize) -> bool {
    if a > b {
        return false;
    }
    (a..=b).all(|k| match lx.s(k).kind {
        TokenKind::Number => true,
        TokenKind::Ident => {
            let w = lx.st(k);
            let call = lx.is_punct(k + 1, "(");
            let word_ok = !is_keyword(w)
                || matches!(w, "true" | "false" | "null" | "True" | "False" | "None" | "not" | "is");
            !call && word_ok
        }
        TokenKind::Punct => matches!(
            lx.st(k),
            "(" | ")" | "!" | "<" | ">" | "<=" | ">=" | "==" | "!=" | "===" | "!==" | "+" | "-"
        ),
        _ => false,
    })
}

fn is_logic_op(lx: &Lexed<'_>, k: usize) -> bool {
    if is_python(lx) {
        lx.is_word(k, "and") || lx.is_word(k, "or")
    } else {
        lx.is_punct(k, "&&") || lx.is_punct(k, "||")
    }
}

/// Swaps the operands of a single top-level logical operator in `from..=to`.
fn swap_operands(lx: &Lexed<'_>, from: usize, to: usize) -> Option<(usize, usize, String)> {
    let mut depth = 0i32;
    let mut ops = Vec::new();
    for k in from..=to {
        if lx.s(k).kind == TokenKind::Punct {
            match lx.st(k) {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                _ => {}
            }
        }
        if depth == 0 && is_logic_op(lx, k) {
            ops.push(k);
        }
    }
    let [op] = ops[..] else { return None };
    if op == from || op == to || !pure_operand(lx, from, op - 1) || !pure_operand(lx, op + 1, to) {
        return None;
    }
    let a = lx.span(from, op - 1);
    let b = lx.span(op + 1, to);
    if a == b || has_comment(lx, lx.start(from), lx.end(to)) {
        return None;
    }
    let src = lx.src;
    let text = format!(
        "{b}{}{}{}{a}",
        &src[lx.end(op - 1)..lx.start(op)],
        lx.st(op),
        &src[lx.end(op)..lx.start(op + 1)]
    );
    Some((lx.start(from), lx.end(to), text))
}

pub(super) fn reorder_cond(lx: &Lexed<'_>) -> Option<String> {
    let mut edits = Edits::new();
    if is_python(lx) {
        let ls = lines(lx);
        for l in &ls {
            let (Some(first), Some(last)) = (l.first, l.last) else { continue };
            let header = lx.is_word(first, "if") || lx.is_word(first, "elif") || lx.is_word(first, "while");
            if l.continuation || !header || !lx.is_punct(last, ":") || last < first + 4 {
                continue;
            }
            if let Some((s, e, t)) = swap_operands(lx, first + 1, last - 1) {
                edits.push(s, e, t);
            }
        }
    } else {
        for i in 0..lx.sig_len() {
            if !(lx.is_word(i, "if") || lx.is_word(i, "while")) || !lx.is_punct(i + 1, "(") {
                continue;
            }
            let Some(close) = lx.matching_close(i + 1) else { continue };
            if close < i + 5 {
                continue;
            }
            if let Some((s, e, t)) = swap_operands(lx, i + 2, close - 1) {
                edits.push(s, e, t);
            }
        }
    }
    edits.apply(lx.src)
}

// ---------------------------------------------------------------------------
// swap_params

fn is_symmetric_call(lx: &Lexed<'_>, i: usize) -> bool {
    let name = lx.st(i);
    if lx.s(i).kind != TokenKind::Ident || !lx.is_punct(i + 1, "(") {
        return false;
    }
    let qualifier = if lx.is_member(i) && i >= 2 { Some(lx.st(i - 2)) } else { None };
    match lx.lang {
        Language::Java | Language::JavaScript => {
            matches!(name, "max" | "min") && qualifier == Some("Math") && lx.is_punct(i - 1, ".")
        }
        Language::Cpp => {
            (matches!(name, "max" | "min") && qualifier == Some("std") && lx.is_punct(i - 1, "::"))
                || (matches!(name, "fmax" | "fmin") && (qualifier.is_none() || qualifier == Some("std")))
        }
        Language::C => matches!(name, "fmax" | "fmin") && !lx.is_member(i),
        Language::Python => matches!(name, "max" | "min") && !lx.is_member(i),
        Language::Unknown => false,
    }
}

fn pure_argument(lx: &Lexed<'_>, a: usize, b: usize) -> bool {
    a <= b
        && (a..=b).all(|k| match lx.s(k).kind {
            TokenKind::Number | TokenKind::Str => true,
            TokenKind::Ident => !lx.is_punct(k + 1, "("),
            TokenKind::Punct => matches!(lx.st(k), "." | "+" | "-" | "*" | "(" | ")" | "[" | "]"),
            _ => false,
        })
}

pub(super) fn swap_params(lx: &Lexed<'_>) -> Option<String> {
    let src = lx.src;
    let mut edits = Edits::new();
    for i in 0..lx.sig_len() {
        if !is_symmetric_call(lx, i) {
            continue;
        }
        let Some(close) = lx.matching_close(i + 1) else { continue };
        let args = split_top_commas(lx, i + 2, close);
        let [(a0, a1), (b0, b1)] = args[..] else { continue };
        if !pure_argument(lx, a0, a1) || !pure_argument(lx, b0, b1) {
            continue;
        }
        let (a, b) = (lx.span(a0, a1), lx.span(b0, b1));
        if a == b || has_comment(lx, lx.start(a0), lx.end(b1)) {
            continue;
        }
        let text = format!("{b}{}{a}", &src[lx.end(a1)..lx.start(b0)]);
        edits.push(lx.start(a0), lx.end(b1), text);
    }
    edits.apply(src)
}

// ---------------------------------------------------------------------------
// whitespace rules

fn pad_around(lx: &Lexed<'_>, i: usize, edits: &mut Edits) {
    let src = lx.src;
    let (s, e) = (lx.start(i), lx.end(i));
    if s > 0 && !src[..s].ends_with(char::is_whitespace) {
        edits.push(s, s, " ");
    }
    if e < src.len() && !src[e..].starts_with(char::is_whitespace) {
        edits.push(e, e, " ");
    }
}

const ASSIGN_OPS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=", "**=", "//=", ":=",
];

pub(super) fn format_spacing(lx: &Lexed<'_>) -> Option<String> {
    let mut edits = Edits::new();
    for i in 0..lx.sig_len() {
        if lx.s(i).kind != TokenKind::Punct || !ASSIGN_OPS.contains(&lx.st(i)) {
            continue;
        }
        if lx.is_word(i.wrapping_sub(1), "operator") || in_directive(lx, i) {
            continue;
        }
        pad_around(lx, i, &mut edits);
    }
    edits.apply(lx.src)
}

const BINARY_OPS: &[&str] = &[
    "+", "-", "*", "/", "%", "<", ">", "<=", ">=", "==", "!=", "===", "!==", "&&", "||", "&", "|",
    "^", "<<", ">>", ">>>", "**", "//", "??",
];

/// Whether the token before `i` ends an operand, making `i` a binary operator.
fn ends_operand(lx: &Lexed<'_>, i: usize) -> bool {
    if i == 0 {
        return false;
    }
    let p = i - 1;
    match lx.s(p).kind {
        TokenKind::Number | TokenKind::Str => true,
        TokenKind::Ident => {
            let w = lx.st(p);
            !is_keyword(w) && !is_reserved(w)
        }
        TokenKind::Punct => matches!(lx.st(p), ")" | "]"),
        _ => false,
    }
}

pub(super) fn adjust_op_space(lx: &Lexed<'_>) -> Option<String> {
    let mut edits = Edits::new();
    for i in 0..lx.sig_len() {
        if lx.s(i).kind != TokenKind::Punct || !BINARY_OPS.contains(&lx.st(i)) {
            continue;
        }
        if !ends_operand(lx, i) || lx.is_word(i.wrapping_sub(1), "operator") || in_directive(lx, i) {
            continue;
        }
        pad_around(lx, i, &mut edits);
    }
    edits.apply(lx.src)
}

/// Inserts an empty line after the first complete statement line of the
/// function body, unless one is already there.
pub(super) fn insert_blank_line(lx: &Lexed<'_>) -> Option<String> {
    let src = lx.src;
    let ls = lines(lx);
    // Without a function header the whole snippet counts as body.
    let body_start = if is_python(lx) {
        match (0..lx.sig_len()).find(|&k| lx.is_word(k, "def")) {
            Some(def) => {
                let open = (def..lx.sig_len()).find(|&k| lx.is_punct(k, "("))?;
                let close = lx.matching_close(open)?;
                let colon = lx.find_at_depth0(close + 1, ":")?;
                let k = line_index(&ls, lx, colon);
                if ls[k].last != Some(colon) {
                    return None;
                }
                k + 1
            }
            None => 0,
        }
    } else {
        match (0..lx.sig_len()).find(|&k| lx.is_punct(k, "{")) {
            Some(open) => line_index(&ls, lx, open) + 1,
            None => 0,
        }
    };
    let target = (body_start..ls.len()).find(|&k| {
        let l = &ls[k];
        let Some(last) = l.last else { return false };
        if l.continuation || l.first.is_none() || ls.get(k + 1).is_some_and(|n| n.continuation) {
            return false;
        }
        if line_index(&ls, lx, l.first.unwrap()) != k {
            return false;
        }
        if is_python(lx) {
            !lx.is_punct(last, ":")
        } else {
            lx.is_punct(last, ";")
        }
    })?;
    let mut edits = Edits::new();
    // Last statement of the snippet: the blank line goes at the end.
    let at_eof = match ls.get(target + 1) {
        None => true,
        Some(next) => next.is_blank(src) && target + 2 == ls.len() && next.end == src.len(),
    };
    if at_eof {
        edits.push(src.len(), src.len(), "\n");
        return edits.apply(src);
    }
    if ls[target + 1].is_blank(src) {
        return None;
    }
    let nl = ls[target].end;
    let in_space = lx
        .tokens
        .iter()
        .any(|t| t.kind == TokenKind::Space && t.start <= nl && nl < t.end);
    if !in_space {
        return None;
    }
    edits.push(nl, nl, "\n");
    edits.apply(src)
}
