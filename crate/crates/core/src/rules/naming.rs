//! Function-name rewrites. The declared name and every call site (recursive
//! calls) are renamed together; member accesses that merely share the
//! spelling are left alone.

use std::collections::HashSet;

use crate::lexer::{is_keyword, is_reserved, Lexed, TokenKind};

/// Significant index of the declared function name: the first identifier
/// directly before a `(` at bracket depth zero.
pub fn function_name_index(lx: &Lexed<'_>) -> Option<usize> {
    let mut depth = 0i32;
    for i in 0..lx.sig_len() {
        let tok = lx.s(i);
        if tok.kind == TokenKind::Punct {
            match lx.st(i) {
                "(" => {
                    if depth == 0 && i > 0 {
                        let prev = lx.s(i - 1);
                        let name = lx.st(i - 1);
                        let annotated = i > 1 && lx.is_punct(i - 2, "@");
                        if prev.kind == TokenKind::Ident
                            && !is_keyword(name)
                            && !annotated
                            && !lx.is_member(i - 1)
                        {
                            return Some(i - 1);
                        }
                    }
                    depth += 1;
                }
                "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                _ => {}
            }
        }
    }
    None
}

fn words(name: &str) -> Vec<String> {
    let mut out = Vec::new();
    for part in name.split('_').filter(|p| !p.is_empty()) {
        let mut cur = String::new();
        let mut prev_lower = false;
        for c in part.chars() {
            if c.is_uppercase() && prev_lower && !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            prev_lower = c.is_lowercase() || c.is_ascii_digit();
            cur.push(c);
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

fn capitalize(w: &str) -> String {
    let mut cs = w.chars();
    match cs.next() {
        Some(f) => f.to_uppercase().chain(cs.flat_map(char::to_lowercase)).collect(),
        None => String::new(),
    }
}

fn starts_lower(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_lowercase())
}

fn camel_to_snake_name(name: &str) -> Option<String> {
    let camel = starts_lower(name)
        && !name.contains('_')
        && name.chars().any(|c| c.is_uppercase());
    camel.then(|| {
        words(name)
            .iter()
            .map(|w| w.to_lowercase())
            .collect::<Vec<_>>()
            .join("_")
    })
}

fn snake_to_camel_name(name: &str) -> Option<String> {
    let snake = starts_lower(name)
        && name.contains('_')
        && !name.ends_with('_')
        && !name.chars().any(|c| c.is_uppercase());
    snake.then(|| {
        let ws = words(name);
        let mut out = ws[0].clone();
        for w in &ws[1..] {
            out.push_str(&capitalize(w));
        }
        out
    })
}

fn pascal_name(name: &str) -> Option<String> {
    starts_lower(name).then(|| {
        words(name)
            .iter()
            .map(|w| {
                let mut cs = w.chars();
                match cs.next() {
                    Some(f) => f.to_uppercase().chain(cs).collect::<String>(),
                    None => String::new(),
                }
            })
            .collect()
    })
}

fn upper_name(name: &str) -> Option<String> {
    name.chars()
        .any(|c| c.is_lowercase())
        .then(|| name.to_uppercase())
}

fn lower_name(name: &str) -> Option<String> {
    name.chars()
        .any(|c| c.is_uppercase())
        .then(|| name.to_lowercase())
}

fn suffixed_name(name: &str) -> Option<String> {
    if name.contains('_') {
        Some(format!("{name}_val"))
    } else {
        Some(format!("{name}Val"))
    }
}

fn rename_function(lx: &Lexed<'_>, f: fn(&str) -> Option<String>) -> Option<String> {
    let at = function_name_index(lx)?;
    let old = lx.st(at);
    let new = f(old)?;
    let valid = new != old
        && new.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && !is_reserved(&new)
        && !is_keyword(&new);
    if !valid {
        return None;
    }
    let existing: HashSet<&str> = lx
        .tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Ident)
        .map(|t| t.text(lx.src))
        .collect();
    if existing.contains(new.as_str()) {
        return None;
    }
    Some(rename_identifier(lx, old, &new))
}

/// Renames every non-member occurrence of `old`.
pub(crate) fn rename_identifier(lx: &Lexed<'_>, old: &str, new: &str) -> String {
    let mut out = String::with_capacity(lx.src.len() + 16);
    let mut pos = 0;
    for i in 0..lx.sig_len() {
        let t = lx.s(i);
        if t.kind == TokenKind::Ident && lx.st(i) == old && !lx.is_member(i) {
            out.push_str(&lx.src[pos..t.start]);
            out.push_str(new);
            pos = t.end;
        }
    }
    out.push_str(&lx.src[pos..]);
    out
}

pub(super) fn camel_to_snake(lx: &Lexed<'_>) -> Option<String> {
    rename_function(lx, camel_to_snake_name)
}

pub(super) fn snake_to_camel(lx: &Lexed<'_>) -> Option<String> {
    rename_function(lx, snake_to_camel_name)
}

pub(super) fn to_pascal(lx: &Lexed<'_>) -> Option<String> {
    rename_function(lx, pascal_name)
}

pub(super) fn to_upper(lx: &Lexed<'_>) -> Option<String> {
    rename_function(lx, upper_name)
}

pub(super) fn to_lower(lx: &Lexed<'_>) -> Option<String> {
    rename_function(lx, lower_name)
}

pub(super) fn add_suffix(lx: &Lexed<'_>) -> Option<String> {
    rename_function(lx, suffixed_name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn name_conversions() {
        assert_eq!(camel_to_snake_name("testStream").unwrap(), "test_stream");
        assert_eq!(camel_to_snake_name("calcSumOfSquares").unwrap(), "calc_sum_of_squares");
        assert_eq!(camel_to_snake_name("test_stream"), None);
        assert_eq!(camel_to_snake_name("Value"), None);
        assert_eq!(snake_to_camel_name("my_var").unwrap(), "myVar");
        assert_eq!(snake_to_camel_name("calc_sum").unwrap(), "calcSum");
        assert_eq!(snake_to_camel_name("value"), None);
        assert_eq!(pascal_name("remove").unwrap(), "Remove");
        assert_eq!(pascal_name("calc_sum").unwrap(), "CalcSum");
        assert_eq!(pascal_name("testStream").unwrap(), "TestStream");
        assert_eq!(upper_name("value").unwrap(), "VALUE");
        assert_eq!(lower_name("Value").unwrap(), "value");
        assert_eq!(suffixed_name("data").unwrap(), "dataVal");
        assert_eq!(suffixed_name("my_data").unwrap(), "my_data_val");
    }

    #[test]
    fn function_name_skips_annotations_and_keywords() {
        use crate::corpus::Language;
        let lx = Lexed::new("@Deprecated(\"x\") int foo(int a) { if (a) bar(a); }", Language::Java);
        assert_eq!(lx.st(function_name_index(&lx).unwrap()), "foo");
        let lx = Lexed::new("def go(x):\n    return x", Language::Python);
        assert_eq!(lx.st(function_name_index(&lx).unwrap()), "go");
        let lx = Lexed::new("return x;", Language::C);
        assert_eq!(function_name_index(&lx), None);
    }

    #[test]
    fn renames_recursive_calls_but_not_members() {
        use crate::corpus::Language;
        let src = "int fact(int n) { return n ? n * fact(n - 1) : o.fact; }";
        let lx = Lexed::new(src, Language::C);
        assert_eq!(
            rename_identifier(&lx, "fact", "Fact"),
            "int Fact(int n) { return n ? n * Fact(n - 1) : o.fact; }"
        );
    }
}
