//! Language-agnostic surface scanner.
//!
//! Produces a lossless token stream (concatenating every token's text yields
//! the input) for C-family, Java, JavaScript and Python sources. There is no
//! grammar here: the scanner only knows enough to keep string literals and
//! comments out of the way of the rewrite rules.

use crate::corpus::Language;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    /// String, char, or template literal (including any closing quote).
    Str,
    Comment,
    Punct,
    /// Spaces, tabs and newlines.
    Space,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
    /// Set on string literals and block comments that run off the end of the input.
    pub unterminated: bool,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }

    pub fn is_trivia(&self) -> bool {
        matches!(self.kind, TokenKind::Space | TokenKind::Comment)
    }
}

const PUNCT_4: &[&str] = &[">>>="];
const PUNCT_3: &[&str] = &[
    "<<=", ">>=", ">>>", "...", "**=", "//=", "===", "!==", "<=>",
];
const PUNCT_2: &[&str] = &[
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "::", "**", "//", "=>", "?.", "??", ":=",
];

/// A source text together with its token stream.
#[derive(Clone, Debug)]
pub struct Lexed<'a> {
    pub src: &'a str,
    pub lang: Language,
    pub tokens: Vec<Token>,
    /// Indices into `tokens` of every non-trivia token.
    pub sig: Vec<usize>,
}

impl<'a> Lexed<'a> {
    pub fn new(src: &'a str, lang: Language) -> Self {
        let tokens = tokenize(src, lang);
        let sig = tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_trivia())
            .map(|(i, _)| i)
            .collect();
        Lexed {
            src,
            lang,
            tokens,
            sig,
        }
    }

    /// Token behind the `i`-th significant position.
    pub fn s(&self, i: usize) -> &Token {
        &self.tokens[self.sig[i]]
    }

    /// Text of the `i`-th significant token.
    pub fn st(&self, i: usize) -> &'a str {
        let t = self.tokens[self.sig[i]];
        &self.src[t.start..t.end]
    }

    pub fn sig_len(&self) -> usize {
        self.sig.len()
    }

    pub fn is_punct(&self, i: usize, text: &str) -> bool {
        i < self.sig.len() && self.s(i).kind == TokenKind::Punct && self.st(i) == text
    }

    pub fn is_word(&self, i: usize, text: &str) -> bool {
        i < self.sig.len() && self.s(i).kind == TokenKind::Ident && self.st(i) == text
    }

    /// Significant index of the bracket closing the one opened at `open`.
    pub fn matching_close(&self, open: usize) -> Option<usize> {
        let (o, c) = match self.st(open) {
            "(" => ("(", ")"),
            "[" => ("[", "]"),
            "{" => ("{", "}"),
            _ => return None,
        };
        let mut depth = 0usize;
        for i in open..self.sig.len() {
            if self.s(i).kind != TokenKind::Punct {
                continue;
            }
            let t = self.st(i);
            if t == o {
                depth += 1;
            } else if t == c {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
        }
        None
    }

    /// First significant index at or after `from` holding `text` at bracket
    /// depth zero relative to `from`. Stops (returning `None`) if an enclosing
    /// bracket closes first.
    pub fn find_at_depth0(&self, from: usize, text: &str) -> Option<usize> {
        let mut depth = 0i32;
        for i in from..self.sig.len() {
            let tok = self.s(i);
            if tok.kind != TokenKind::Punct {
                continue;
            }
            let t = self.st(i);
            if depth == 0 && t == text {
                return Some(i);
            }
            match t {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    depth -= 1;
                    if depth < 0 {
                        return None;
                    }
                }
                _ => {}
            }
        }
        None
    }

    /// Byte offset where the `i`-th significant token starts.
    pub fn start(&self, i: usize) -> usize {
        self.s(i).start
    }

    /// Byte offset where the `i`-th significant token ends.
    pub fn end(&self, i: usize) -> usize {
        self.s(i).end
    }

    /// Source text spanning significant tokens `a..=b` (trivia in between included).
    pub fn span(&self, a: usize, b: usize) -> &'a str {
        &self.src[self.start(a)..self.end(b)]
    }

    /// Whether the significant token at `i` sits in a member position
    /// (`obj.x`, `p->x`, `ns::x`).
    pub fn is_member(&self, i: usize) -> bool {
        i > 0 && matches!(self.st(i - 1), "." | "->" | "::" | "?.")
            && self.s(i - 1).kind == TokenKind::Punct
    }

    /// Whether any string literal or block comment is left open.
    pub fn has_unterminated(&self) -> bool {
        self.tokens.iter().any(|t| t.unterminated)
    }

    /// Net bracket balance check over code tokens.
    pub fn brackets_balanced(&self) -> bool {
        let mut stack = Vec::new();
        for i in 0..self.sig.len() {
            if self.s(i).kind != TokenKind::Punct {
                continue;
            }
            match self.st(i) {
                "(" => stack.push(')'),
                "[" => stack.push(']'),
                "{" => stack.push('}'),
                c @ (")" | "]" | "}") if stack.pop() != c.chars().next() => return false,
                _ => {}
            }
        }
        stack.is_empty()
    }
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

pub fn tokenize(src: &str, lang: Language) -> Vec<Token> {
    let python = lang == Language::Python;
    let triple_quotes = matches!(lang, Language::Python | Language::Java);
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let rest = &src[i..];
        let c = rest.chars().next().unwrap();
        let start = i;
        let mut unterminated = false;
        let kind;
        if c.is_whitespace() {
            let len: usize = rest
                .chars()
                .take_while(|c| c.is_whitespace())
                .map(char::len_utf8)
                .sum();
            i += len;
            kind = TokenKind::Space;
        } else if (python && c == '#') || (!python && rest.starts_with("//")) {
            i += rest.find('\n').unwrap_or(rest.len());
            kind = TokenKind::Comment;
        } else if !python && rest.starts_with("/*") {
            match rest[2..].find("*/") {
                Some(p) => i += p + 4,
                None => {
                    i = src.len();
                    unterminated = true;
                }
            }
            kind = TokenKind::Comment;
        } else if triple_quotes && (rest.starts_with("\"\"\"") || rest.starts_with("'''")) {
            let q = &rest[..3];
            match scan_until(&rest[3..], q, true) {
                Some(p) => i += 3 + p,
                None => {
                    i = src.len();
                    unterminated = true;
                }
            }
            kind = TokenKind::Str;
        } else if c == '"' || c == '\'' || (c == '`' && lang == Language::JavaScript) {
            let q = &rest[..1];
            let multiline = c == '`';
            match scan_until(&rest[1..], q, multiline) {
                Some(p) => i += 1 + p,
                None => {
                    // An unterminated single-line literal stops at the newline.
                    let stop = if multiline {
                        rest.len()
                    } else {
                        rest.find('\n').unwrap_or(rest.len())
                    };
                    i += stop;
                    unterminated = true;
                }
            }
            kind = TokenKind::Str;
        } else if c.is_ascii_digit()
            || (c == '.' && rest[1..].starts_with(|d: char| d.is_ascii_digit()))
        {
            let mut j = 0;
            let rb = rest.as_bytes();
            while j < rb.len() {
                let b = rb[j];
                let exponent_sign = (b == b'+' || b == b'-')
                    && j > 0
                    && matches!(rb[j - 1], b'e' | b'E')
                    && !rest[..j].starts_with("0x")
                    && !rest[..j].starts_with("0X");
                if b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || exponent_sign {
                    j += 1;
                } else {
                    break;
                }
            }
            i += j;
            kind = TokenKind::Number;
        } else if is_ident_start(c) {
            let len: usize = rest
                .chars()
                .take_while(|&c| is_ident_continue(c))
                .map(char::len_utf8)
                .sum();
            i += len;
            kind = TokenKind::Ident;
        } else {
            let mut len = c.len_utf8();
            for (n, table) in [(4, PUNCT_4), (3, PUNCT_3), (2, PUNCT_2)] {
                if rest.len() >= n && rest.is_char_boundary(n) {
                    let cand = &rest[..n];
                    // `//` is floor division only in Python; elsewhere it was
                    // already consumed as a comment.
                    if table.contains(&cand) && (python || !cand.starts_with("//")) {
                        len = n;
                        break;
                    }
                }
            }
            i += len;
            kind = TokenKind::Punct;
        }
        debug_assert!(i > start && i <= bytes.len());
        out.push(Token {
            kind,
            start,
            end: i,
            unterminated,
        });
    }
    out
}

/// Length up to and including the closing `quote`, honouring backslash escapes.
fn scan_until(s: &str, quote: &str, multiline: bool) -> Option<usize> {
    let mut it = s.char_indices();
    while let Some((p, ch)) = it.next() {
        if ch == '\\' {
            it.next();
            continue;
        }
        if ch == '\n' && !multiline {
            return None;
        }
        if s[p..].starts_with(quote) {
            return Some(p + quote.len());
        }
    }
    None
}

/// Keywords across the supported languages plus library and builtin names
/// that must never be renamed or treated as variables.
pub fn is_reserved(word: &str) -> bool {
    RESERVED.binary_search(&word).is_ok()
}

/// Words that open a statement-level construct.
pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.binary_search(&word).is_ok()
}

/// Sorted.
const KEYWORDS: &[&str] = &[
    "False", "None", "True", "abstract", "and", "as", "assert", "async", "auto", "await", "bool",
    "boolean", "break", "byte", "case", "catch", "char", "class", "const", "constexpr", "continue",
    "def", "default", "del", "delete", "do", "double", "elif", "else", "enum", "except", "extends",
    "extern", "false", "final", "finally", "float", "for", "from", "function", "global", "goto",
    "if", "implements", "import", "in", "inline", "instanceof", "int", "interface", "is", "lambda",
    "let", "long", "new", "nonlocal", "not", "null", "nullptr", "of", "or", "package", "pass",
    "private", "protected", "public", "raise", "register", "return", "short", "signed", "sizeof",
    "static", "struct", "super", "switch", "template", "this", "throw", "throws", "true", "try",
    "typedef", "typename", "typeof", "undefined", "union", "unsigned", "var", "void", "volatile",
    "while", "with", "yield",
];

/// Sorted. Keywords, standard types, and library identifiers.
const RESERVED: &[&str] = &[
    "ArrayList", "Arrays", "Boolean", "Character", "Collections", "DBL_MAX", "DBL_MIN", "Double",
    "EOF", "False", "HashMap", "HashSet", "INT_MAX", "INT_MIN", "Infinity", "Integer", "LLONG_MAX",
    "LLONG_MIN", "LONG_MAX", "LONG_MIN", "List", "Long", "Map", "Math", "NULL", "NaN", "None",
    "Number", "Object", "SIZE_MAX", "Set", "String", "StringBuilder", "System", "True", "UINT_MAX",
    "abs", "abstract", "accumulate", "all", "and", "any", "as", "assert", "async", "atoi", "auto",
    "await", "bool", "boolean", "break", "byte", "calloc", "case", "catch", "ceil", "char", "chr",
    "class", "console", "const", "constexpr", "continue", "cos", "cout", "def", "default", "del",
    "delete", "dict", "divmod", "do", "double", "elif", "else", "endl", "enum", "enumerate",
    "except", "exp", "extends", "extern", "fabs", "false", "final", "finally", "float", "floor",
    "fmax", "fmin", "for", "free", "from", "function", "global", "goto", "if", "implements",
    "import", "in", "inline", "instanceof", "int", "int64_t", "interface", "is", "isdigit",
    "isinstance", "lambda", "len", "let", "list", "log", "long", "malloc", "map", "max", "memcpy",
    "memset", "min", "new", "nonlocal", "not", "null", "nullptr", "of", "or", "ord", "package",
    "pass", "pow", "print", "printf", "private", "protected", "public", "raise", "range",
    "register", "return", "reversed", "round", "self", "set", "short", "signed", "sin", "size_t",
    "sizeof", "sorted", "sqrt", "static", "std", "str", "strcmp", "strcpy", "string", "strlen",
    "struct", "super", "switch", "template", "this", "throw", "throws", "true", "try", "tuple",
    "typedef", "typename", "typeof", "uint64_t", "undefined", "union", "unordered_map", "unsigned",
    "var", "vector", "void", "volatile", "while", "with", "yield", "zip",
];
