use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;

use super::*;
use crate::corpus::Language;
use crate::lexer::TokenKind;

fn c(text: &str) -> CodeSnippet {
    CodeSnippet::synthetic("t.c", Language::C, text)
}

fn py(text: &str) -> CodeSnippet {
    CodeSnippet::synthetic("t.py", Language::Python, text)
}

fn run(id: &str, s: &CodeSnippet) -> String {
    apply(lookup(id).unwrap(), s).unwrap().text
}

#[test]
fn catalog_shape() {
    let cat = catalog();
    let sizes: Vec<usize> = RuleCategory::ALL.iter().map(|&k| cat.category(k).len()).collect();
    assert_eq!(sizes, [6, 6, 7, 10]);
    assert_eq!(cat.rules().len(), 29);
    let ids: HashSet<&str> = cat.rules().iter().map(|r| r.rule_id).collect();
    assert_eq!(ids.len(), 29);
    for r in cat.rules() {
        assert_eq!(lookup(r.rule_id).unwrap(), r);
        assert!(r.rule_id.starts_with(r.category.name()));
    }
    assert!(matches!(lookup("naming.nope"), Err(Error::UnknownRule(_))));
    assert_eq!(RuleCategory::from_id(3), Some(RuleCategory::Math));
}

#[test]
fn deterministic_coverage() {
    let det: Vec<&str> = catalog().deterministic().iter().map(|r| r.rule_id).collect();
    assert_eq!(det.len(), 18);
    assert!(det.contains(&"loops.for_to_while"));
    assert!(det.contains(&"loops.while_to_do_while"));
    assert!(!det.iter().any(|id| id.starts_with("math.")));
    let export = export();
    assert_eq!(export.iter().filter(|e| e.deterministic).count(), 18);
}

#[test]
fn camel_to_snake_renames_definition_and_calls() {
    let s = c("int testStream(int n) {\n    if (n > 0) return testStream(n - 1);\n    return 0;\n}\n");
    assert_eq!(
        run("naming.camel_to_snake", &s),
        "int test_stream(int n) {\n    if (n > 0) return test_stream(n - 1);\n    return 0;\n}\n"
    );
    let already = c("int test_stream(int n) { return n; }");
    assert!(!is_applicable(lookup("naming.camel_to_snake").unwrap(), &already));
}

#[test]
fn other_naming_rules() {
    let s = py("def count_words(text):\n    return len(text.split())\n");
    assert!(run("naming.snake_to_camel", &s).starts_with("def countWords(text):"));
    assert!(run("naming.to_pascal", &s).starts_with("def CountWords(text):"));
    assert!(run("naming.to_upper", &s).starts_with("def COUNT_WORDS(text):"));
    assert!(run("naming.add_suffix", &s).starts_with("def count_words_val(text):"));
    let j = CodeSnippet::synthetic("t.java", Language::Java, "static int Value(int x) { return x; }");
    assert_eq!(run("naming.to_lower", &j), "static int value(int x) { return x; }");
}

#[test]
fn math_rules_need_a_model() {
    let s = c("int twice(int x) { return 2 * x; }");
    let r = lookup("math.mul_to_add").unwrap();
    assert!(matches!(apply(r, &s), Err(Error::EngineUnsupported(_))));
    assert!(!is_applicable(r, &s));
}

#[test]
fn for_to_while_example() {
    let s = c("int sum(int *xs, int n) {\n    int t = 0, i;\n    for (i = 0; i < n; i++) {\n        t += xs[i];\n    }\n    return t;\n}\n");
    let r = lookup("loops.for_to_while").unwrap();
    assert!(is_applicable(r, &s));
    assert_eq!(
        run("loops.for_to_while", &s),
        "int sum(int *xs, int n) {\n    int t = 0, i;\n    i = 0;\n    while (i < n) {\n        t += xs[i];\n        i++;\n    }\n    return t;\n}\n"
    );
    assert!(!is_applicable(r, &c("return x;")));
}

#[test]
fn while_to_do_while_keeps_the_guard() {
    let s = c("void drain(int c) {\n    while (c) {\n        c--;\n    }\n}\n");
    assert_eq!(
        run("loops.while_to_do_while", &s),
        "void drain(int c) {\n    if (c) do {\n        c--;\n    } while (c);\n}\n"
    );
}

#[test]
fn organization_examples() {
    let s = c("int f(int a, int b) {\n    int x=5, y;\n    y = a+b;\n    if (a > 0 && b > 0)\n        return fmax(a, b);\n    return x;\n}\n");
    assert!(run("organization.split_decl", &s).contains("    int x=5; int y;\n"));
    assert!(run("organization.format_spacing", &s).contains("int x = 5, y;"));
    assert!(run("organization.adjust_op_space", &s).contains("y = a + b;"));
    assert!(run("organization.reorder_cond", &s).contains("if (b > 0 && a > 0)"));
    assert!(run("organization.add_braces", &s).contains("{ return fmax(a, b); }"));
    assert!(run("organization.swap_params", &s).contains("fmax(b, a)"));
    assert!(run("organization.insert_blank_line", &s).contains("int x=5, y;\n\n    y = a+b;"));

    let js = CodeSnippet::synthetic(
        "t.js",
        Language::JavaScript,
        "function g(x) {\n  const a = 1;\n  const b = 2;\n  let r = Math.min(x, a + b);\n  return r;\n}\n",
    );
    assert!(run("organization.reorder_decl", &js).contains("const b = 2;\n  const a = 1;"));
    assert!(run("organization.inline_temp", &js).contains("  return Math.min(x, a + b);\n}"));

    let branch = c("int h(int a) {\n    if (a > 1) {\n        return 1;\n    } else {\n        return 2;\n    }\n}\n");
    assert_eq!(
        run("organization.optimize_cond", &branch),
        "int h(int a) {\n    if (!(a > 1)) {\n        return 2;\n    } else {\n        return 1;\n    }\n}\n"
    );
}

#[test]
fn python_organization_examples() {
    let s = py("def f(a, b):\n    x, y = 1, 2\n    if a < b and b > 0:\n        n = a\n    else:\n        n = b\n    result = n+x\n    return result\n");
    assert!(run("organization.split_decl", &s).contains("    x = 1\n    y = 2\n"));
    assert!(run("organization.optimize_cond", &s)
        .contains("    if not (a < b and b > 0):\n        n = b\n    else:\n        n = a\n"));
    assert!(run("organization.reorder_cond", &s).contains("if b > 0 and a < b:"));
    assert!(run("organization.inline_temp", &s).ends_with("    return n+x\n"));
    assert!(run("organization.insert_blank_line", &s).starts_with("def f(a, b):\n    x, y = 1, 2\n\n    if"));
}

#[test]
fn blank_line_without_a_body() {
    assert_eq!(run("organization.insert_blank_line", &c("return x;")), "return x;\n");
    assert_eq!(run("organization.insert_blank_line", &c("return x;\n")), "return x;\n\n");
}

#[test]
fn literals_and_comments_are_left_alone() {
    let s = c("int testStream(int a) {\n    // testStream a+b\n    printf(\"a+b=%d testStream\", a+1);\n    return a;\n}\n");
    let out = run("naming.camel_to_snake", &s);
    assert!(out.contains("// testStream a+b"));
    assert!(out.contains("\"a+b=%d testStream\""));
    let out = run("organization.adjust_op_space", &s);
    assert!(out.contains("// testStream a+b"));
    assert!(out.contains("\"a+b=%d testStream\", a + 1"));
}

#[test]
fn detect_examples() {
    let before = c("int testStream(void) { return 0; }");
    let after = c("int test_stream(void) { return 0; }");
    let rule = lookup("naming.camel_to_snake").unwrap();
    assert!(detect(rule, &before, &after));
    assert!(!detect(rule, &before, &before));
    assert!(!detect(lookup("loops.for_to_while").unwrap(), &before, &after));
}

// ---------------------------------------------------------------------------
// Properties over generated functions

const NAMES: &[&str] = &["alpha", "beta", "count", "idx", "totalSum", "max_val", "tmp", "acc"];
const FN_NAMES: &[&str] = &["computeTotal", "compute_total", "Compute", "scan", "SCAN_ALL", "runIt"];

fn name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(NAMES)
}

fn c_stmt() -> impl Strategy<Value = String> {
    (0..10usize, name(), name(), 0..20i32).prop_map(|(k, a, b, n)| match k {
        0 => format!("int {a} = {n};"),
        1 => format!("int {a}={n}, {b};"),
        2 => format!("{a} = {b}+{n};"),
        3 => format!("if ({a} > {n} && {b} < {n}) {{ {a} = {b}; }} else {{ {b} = {a}; }}"),
        4 => format!("for ({a} = 0; {a} < {n}; {a}++) {{ {b} += {a}; }}"),
        5 => format!("while ({a} < {n}) {{ {a}++; }}"),
        6 => format!("/* {a}={b}+1 */ {a} = {a}*2;"),
        7 => format!("printf(\"{a}={b} // x\\n\", {a});"),
        8 => format!("if ({a}) {b} = fmax({a}, {b});"),
        _ => format!("const int {a} = {n};\n    const int {b} = {};", n + 1),
    })
}

fn c_function() -> impl Strategy<Value = String> {
    (prop::sample::select(FN_NAMES), name(), prop::collection::vec(c_stmt(), 1..6)).prop_map(|(f, p, body)| {
        let mut s = format!("int {f}(int {p}) {{\n");
        for st in body {
            s.push_str("    ");
            s.push_str(&st);
            s.push('\n');
        }
        s.push_str(&format!("    return {f}({p} - 1) + {p};\n}}\n"));
        s
    })
}

fn py_stmt() -> impl Strategy<Value = String> {
    (0..8usize, name(), name(), 0..20i32).prop_map(|(k, a, b, n)| match k {
        0 => format!("{a} = {n}"),
        1 => format!("{a}, {b} = {n}, {}", n + 2),
        2 => format!("{a} = {b}+{n}"),
        3 => format!("if {a} > {n} and {b} < {n}:\n        {a} = {b}\n    else:\n        {b} = {a}"),
        4 => format!("for {a} in range({n}):\n        {b} += {a}"),
        5 => format!("{a} = max({a}, {b})  # {a}={b}"),
        6 => format!("print(\"{a}={b} # not a comment\")"),
        _ => format!("{a} = [{b}, {n}]"),
    })
}

fn py_function() -> impl Strategy<Value = String> {
    (prop::sample::select(FN_NAMES), name(), prop::collection::vec(py_stmt(), 1..6)).prop_map(|(f, p, body)| {
        let mut s = format!("def {f}({p}):\n");
        for st in body {
            s.push_str("    ");
            s.push_str(&st);
            s.push('\n');
        }
        s.push_str(&format!("    result = {p}+1\n    return result\n"));
        s
    })
}

fn protected(s: &CodeSnippet) -> BTreeMap<String, usize> {
    let lx = Lexed::new(&s.text, s.language);
    let mut m = BTreeMap::new();
    for t in lx.tokens.iter().filter(|t| matches!(t.kind, TokenKind::Str | TokenKind::Comment)) {
        *m.entry(t.text(lx.src).to_string()).or_default() += 1;
    }
    m
}

fn check_rules(s: &CodeSnippet) -> std::result::Result<(), TestCaseError> {
    let lx = Lexed::new(&s.text, s.language);
    let balanced = lx.brackets_balanced();
    for rule in catalog().deterministic() {
        if !is_applicable(rule, s) {
            prop_assert!(matches!(apply(rule, s), Err(Error::NotApplicable(_))));
            continue;
        }
        let out = apply(rule, s).unwrap();
        prop_assert_ne!(&out.text, &s.text, "{} changed nothing", rule.rule_id);
        prop_assert_eq!(&out, &apply(rule, s).unwrap());
        prop_assert_eq!(protected(&out), protected(s), "{} touched a literal", rule.rule_id);
        let lo = Lexed::new(&out.text, out.language);
        prop_assert!(!balanced || lo.brackets_balanced(), "{} broke brackets", rule.rule_id);
        prop_assert!(!lo.has_unterminated());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn c_family_rule_invariants(text in c_function(), lang in prop::sample::select(vec![Language::C, Language::Cpp, Language::Java])) {
        check_rules(&CodeSnippet::synthetic("g", lang, text))?;
    }

    #[test]
    fn python_rule_invariants(text in py_function()) {
        check_rules(&py(&text))?;
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[ -~\\n]{0,80}", lang in prop::sample::select(Language::ALL.to_vec())) {
        let s = CodeSnippet::synthetic("x", lang, text);
        for rule in catalog().rules() {
            if is_applicable(rule, &s) {
                prop_assert_ne!(apply(rule, &s).unwrap().text, s.text.clone());
            }
        }
    }
}
