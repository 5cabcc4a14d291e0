//! Snippets, candidate codebases, and the JSONL files that persist them.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedder::WatermarkBits;
use crate::error::{Error, Result};
use crate::rules;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    C,
    Cpp,
    Java,
    JavaScript,
    Python,
    Unknown,
}

impl Language {
    pub const ALL: [Language; 6] = [
        Language::C,
        Language::Cpp,
        Language::Java,
        Language::JavaScript,
        Language::Python,
        Language::Unknown,
    ];

    pub fn from_extension(ext: &str) -> Language {
        match ext.to_ascii_lowercase().as_str() {
            "c" | "h" => Language::C,
            "cpp" | "cc" | "cxx" | "hpp" => Language::Cpp,
            "java" => Language::Java,
            "js" | "mjs" | "cjs" => Language::JavaScript,
            "py" => Language::Python,
            _ => Language::Unknown,
        }
    }

    pub fn from_path(path: &Path) -> Language {
        path.extension()
            .and_then(|e| e.to_str())
            .map(Language::from_extension)
            .unwrap_or(Language::Unknown)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Language::C => "c",
            Language::Cpp => "cpp",
            Language::Java => "java",
            Language::JavaScript => "javascript",
            Language::Python => "python",
            Language::Unknown => "unknown",
        }
    }

    pub fn parse(s: &str) -> Option<Language> {
        Language::ALL.into_iter().find(|l| l.as_str() == s)
    }

    /// Brace-delimited block syntax (everything but Python).
    pub fn is_brace_family(self) -> bool {
        self != Language::Python
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// 64-bit FNV-1a over the UTF-8 bytes.
pub fn content_hash(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

mod hex64 {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:016x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        u64::from_str_radix(&s, 16).map_err(D::Error::custom)
    }
}

/// One function's worth of source text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSnippet {
    pub id: String,
    pub language: Language,
    pub text: String,
    pub origin: String,
    #[serde(with = "hex64")]
    pub content_hash: u64,
}

impl CodeSnippet {
    pub fn new(
        id: impl Into<String>,
        language: Language,
        text: impl Into<String>,
        origin: impl Into<String>,
    ) -> Result<Self> {
        let text = text.into();
        if text.is_empty() {
            return Err(Error::InvalidArgument("snippet text is empty".into()));
        }
        Ok(CodeSnippet {
            id: id.into(),
            language,
            content_hash: content_hash(&text),
            text,
            origin: origin.into(),
        })
    }

    /// A snippet not backed by a file.
    pub fn synthetic(id: impl Into<String>, language: Language, text: impl Into<String>) -> Self {
        let text = text.into();
        CodeSnippet {
            id: id.into(),
            language,
            content_hash: content_hash(&text),
            text,
            origin: "synthetic".into(),
        }
    }

    /// Same identity, new body.
    pub fn with_text(&self, text: impl Into<String>) -> Self {
        let text = text.into();
        CodeSnippet {
            id: self.id.clone(),
            language: self.language,
            content_hash: content_hash(&text),
            text,
            origin: self.origin.clone(),
        }
    }
}

/// The set of unmarked originals searched during extraction.
#[derive(Clone, Debug, Default)]
pub struct CandidateCodebase {
    snippets: Vec<CodeSnippet>,
    by_id: HashMap<String, usize>,
    /// Files dropped at ingest because they were not UTF-8 or were empty.
    pub skipped: usize,
    /// Snippets dropped because their content duplicated an earlier one.
    pub duplicates: usize,
}

impl PartialEq for CandidateCodebase {
    fn eq(&self, other: &Self) -> bool {
        self.snippets == other.snippets
    }
}

impl CandidateCodebase {
    /// Builds a codebase, dropping content duplicates (first kept) and
    /// sorting by id.
    pub fn from_snippets(snippets: impl IntoIterator<Item = CodeSnippet>) -> Result<Self> {
        let mut seen_hash = HashMap::new();
        let mut kept = Vec::new();
        let mut duplicates = 0;
        for s in snippets {
            if s.text.is_empty() {
                return Err(Error::InvalidArgument(format!("snippet {} is empty", s.id)));
            }
            match seen_hash.get(&s.content_hash) {
                Some(prev_text) if *prev_text == s.text => duplicates += 1,
                _ => {
                    seen_hash.insert(s.content_hash, s.text.clone());
                    kept.push(s);
                }
            }
        }
        kept.sort_by(|a, b| a.id.cmp(&b.id));
        let mut by_id = HashMap::with_capacity(kept.len());
        for (i, s) in kept.iter().enumerate() {
            if by_id.insert(s.id.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate snippet id {}", s.id)));
            }
        }
        Ok(CandidateCodebase {
            snippets: kept,
            by_id,
            skipped: 0,
            duplicates,
        })
    }

    pub fn snippets(&self) -> &[CodeSnippet] {
        &self.snippets
    }

    pub fn get(&self, id: &str) -> Option<&CodeSnippet> {
        self.by_id.get(id).map(|&i| &self.snippets[i])
    }

    pub fn len(&self) -> usize {
        self.snippets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snippets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CodeSnippet> {
        self.snippets.iter()
    }

    /// Codebase without the snippet `id` (used to simulate a missing original).
    pub fn without(&self, id: &str) -> CandidateCodebase {
        let snippets: Vec<_> = self.snippets.iter().filter(|s| s.id != id).cloned().collect();
        let by_id = snippets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.clone(), i))
            .collect();
        CandidateCodebase {
            snippets,
            by_id,
            skipped: 0,
            duplicates: 0,
        }
    }
}

impl<'a> IntoIterator for &'a CandidateCodebase {
    type Item = &'a CodeSnippet;
    type IntoIter = std::slice::Iter<'a, CodeSnippet>;

    fn into_iter(self) -> Self::IntoIter {
        self.snippets.iter()
    }
}

/// Reads every file under `dir` as one snippet. Ids are `/`-separated paths
/// relative to `dir`.
pub fn ingest_directory(dir: &Path, language_filter: Option<&[Language]>) -> Result<CandidateCodebase> {
    let meta = fs::metadata(dir).map_err(|e| Error::io(dir, e))?;
    if !meta.is_dir() {
        return Err(Error::InvalidArgument(format!(
            "{} is not a directory",
            dir.display()
        )));
    }
    let mut snippets = Vec::new();
    let mut skipped = 0;
    let walker = walkdir::WalkDir::new(dir)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'));
    for entry in walker {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(dir).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path();
        let language = Language::from_path(path);
        if let Some(filter) = language_filter {
            if !filter.contains(&language) {
                continue;
            }
        }
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = match String::from_utf8(bytes) {
            Ok(t) if !t.is_empty() => t,
            _ => {
                log::warn!("skipping {}: empty or not UTF-8", path.display());
                skipped += 1;
                continue;
            }
        };
        let rel = path.strip_prefix(dir).unwrap_or(path);
        let id = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        snippets.push(CodeSnippet::new(id, language, text, path.display().to_string())?);
    }
    let mut cb = CandidateCodebase::from_snippets(snippets)?;
    cb.skipped = skipped;
    Ok(cb)
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Serializes `items` one JSON object per line, LF-terminated.
pub fn to_jsonl<T: Serialize>(items: impl IntoIterator<Item = T>) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(&item)?);
        out.push('\n');
    }
    Ok(out)
}

/// Parses JSONL, reporting the 1-based line number of the first bad record.
pub fn from_jsonl<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(item);
    }
    Ok(out)
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_jsonl(&text)
}

pub fn save_codebase(cb: &CandidateCodebase, path: &Path) -> Result<()> {
    atomic_write(path, to_jsonl(cb.snippets())?.as_bytes())
}

pub fn load_codebase(path: &Path) -> Result<CandidateCodebase> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_codebase(&text)
}

pub fn parse_codebase(text: &str) -> Result<CandidateCodebase> {
    let mut snippets: Vec<CodeSnippet> = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        let s: CodeSnippet = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        if s.text.is_empty() {
            return Err(parse_err("empty text".into()));
        }
        if content_hash(&s.text) != s.content_hash {
            return Err(parse_err(format!("content_hash mismatch for {}", s.id)));
        }
        snippets.push(s);
    }
    CandidateCodebase::from_snippets(snippets)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitRule {
    pub bit: usize,
    pub rule_id: String,
    pub applied: bool,
}

/// Audit trail of one embedding: which rule carried each bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WatermarkRecord {
    pub snippet_id: String,
    pub bits: WatermarkBits,
    pub per_bit_rules: Vec<BitRule>,
    pub backend: String,
    pub created_at: String,
}

impl WatermarkRecord {
    pub fn validate(&self) -> Result<()> {
        if self.per_bit_rules.len() != self.bits.len() {
            return Err(Error::InvalidArgument(format!(
                "record {}: {} rule entries for {} bits",
                self.snippet_id,
                self.per_bit_rules.len(),
                self.bits.len()
            )));
        }
        for r in &self.per_bit_rules {
            rules::lookup(&r.rule_id)?;
        }
        Ok(())
    }
}

pub fn save_records(records: &[WatermarkRecord], path: &Path) -> Result<()> {
    atomic_write(path, to_jsonl(records)?.as_bytes())
}

pub fn load_records(path: &Path) -> Result<Vec<WatermarkRecord>> {
    let records: Vec<WatermarkRecord> = read_jsonl(path)?;
    for r in &records {
        r.validate()?;
    }
    Ok(records)
}
