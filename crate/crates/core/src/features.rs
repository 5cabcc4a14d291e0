//! Retrieval features and the similarity functions built on them.
//!
//! A [`FeatureProfile`] holds the four views of a function used for
//! retrieval: its name, its variable identifiers, counts of structural
//! tokens, and its text with whitespace removed. The four similarities and
//! their weighted combination drive both retrieval and bit decoding.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{atomic_write, CandidateCodebase, CodeSnippet, Language};
use crate::error::{Error, Result};
use crate::lexer::{is_keyword, is_reserved, Lexed, TokenKind};
use crate::par::Exec;
use crate::rules::function_name_index;

/// Keywords and punctuation counted by the structural vector, in order.
pub const STRUCT_VOCAB: [&str; 29] = [
    "for", "while", "do", "if", "else", "switch", "case", "return", "break", "continue", "try",
    "catch", "def", "function", "{", "}", "(", ")", "[", "]", ";", "=", "==", "<", ">", "+", "-",
    "*", "/",
];

const STRUCT_WORDS: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureProfile {
    pub fn_name: String,
    pub var_set: BTreeSet<String>,
    pub struct_vec: Vec<u32>,
    pub norm_text: String,
}

pub fn extract_profile(snippet: &CodeSnippet) -> FeatureProfile {
    profile_of(&snippet.text, snippet.language)
}

pub fn profile_of(text: &str, lang: Language) -> FeatureProfile {
    let lx = Lexed::new(text, lang);
    let fn_name = function_name_index(&lx)
        .map(|i| lx.st(i).to_string())
        .unwrap_or_default();
    FeatureProfile {
        var_set: variable_set(&lx, &fn_name),
        struct_vec: structure_counts(&lx),
        norm_text: normalize(text),
        fn_name,
    }
}

/// Whitespace-free text.
pub fn normalize(text: &str) -> String {
    text.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Variable identifiers: names with at least one non-member occurrence,
/// minus keywords, library names, the function name, and anything that is
/// ever called.
pub fn variable_set(lx: &Lexed<'_>, fn_name: &str) -> BTreeSet<String> {
    let mut called = HashSet::new();
    let mut plain = BTreeSet::new();
    for i in 0..lx.sig_len() {
        if lx.s(i).kind != TokenKind::Ident {
            continue;
        }
        let w = lx.st(i);
        if lx.is_punct(i + 1, "(") {
            called.insert(w);
        }
        if !lx.is_member(i) && !is_keyword(w) && !is_reserved(w) && w != fn_name {
            plain.insert(w);
        }
    }
    plain.retain(|w| !called.contains(w));
    plain.into_iter().map(str::to_string).collect()
}

fn structure_counts(lx: &Lexed<'_>) -> Vec<u32> {
    let mut v = vec![0u32; STRUCT_VOCAB.len()];
    for i in 0..lx.sig_len() {
        let kind = lx.s(i).kind;
        let range = match kind {
            TokenKind::Ident => 0..STRUCT_WORDS,
            TokenKind::Punct => STRUCT_WORDS..STRUCT_VOCAB.len(),
            _ => continue,
        };
        let t = lx.st(i);
        if let Some(k) = STRUCT_VOCAB[range.clone()].iter().position(|v| *v == t) {
            v[range.start + k] += 1;
        }
    }
    v
}

// ---------------------------------------------------------------------------
// Edit distance

/// Unit-cost character-level Levenshtein distance.
pub fn lev_dist(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    lev_chars(&a, &b)
}

fn lev_chars(a: &[char], b: &[char]) -> usize {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    let (pattern, text) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if pattern.is_empty() {
        return text.len();
    }
    myers(pattern, text)
}

/// Bit-parallel edit distance (Myers' algorithm, blocked form for patterns
/// longer than one machine word).
fn myers(pattern: &[char], text: &[char]) -> usize {
    const W: usize = 64;
    let m = pattern.len();
    let blocks = m.div_ceil(W);

    let mut index: HashMap<char, usize> = HashMap::new();
    let mut peq: Vec<u64> = Vec::new();
    for (i, &c) in pattern.iter().enumerate() {
        let slot = *index.entry(c).or_insert_with(|| {
            peq.extend(std::iter::repeat_n(0, blocks));
            peq.len() / blocks - 1
        });
        peq[slot * blocks + i / W] |= 1 << (i % W);
    }
    let zeros = vec![0u64; blocks];

    let mut pv = vec![!0u64; blocks];
    let mut mv = vec![0u64; blocks];
    let last_bit = 1u64 << ((m - 1) % W);
    let mut score = m as isize;
    for c in text {
        let eqs = match index.get(c) {
            Some(&slot) => &peq[slot * blocks..(slot + 1) * blocks],
            None => &zeros[..],
        };
        let mut hin: i32 = 1;
        for b in 0..blocks {
            let out_bit = if b + 1 == blocks { last_bit } else { 1 << (W - 1) };
            hin = advance_block(&mut pv[b], &mut mv[b], eqs[b], hin, out_bit);
        }
        score += hin as isize;
    }
    score as usize
}

/// One column step for a 64-row block; returns the horizontal delta at the
/// row selected by `out_bit`.
#[inline]
fn advance_block(pv: &mut u64, mv: &mut u64, eq: u64, hin: i32, out_bit: u64) -> i32 {
    let hin_neg = u64::from(hin < 0);
    let xv = eq | *mv;
    let eq = eq | hin_neg;
    let xh = ((eq & *pv).wrapping_add(*pv) ^ *pv) | eq;
    let mut ph = *mv | !(xh | *pv);
    let mut mh = *pv & xh;
    let mut hout = 0;
    if ph & out_bit != 0 {
        hout = 1;
    }
    if mh & out_bit != 0 {
        hout = -1;
    }
    ph <<= 1;
    mh <<= 1;
    mh |= hin_neg;
    ph |= u64::from(hin > 0);
    *pv = mh | !(xv | ph);
    *mv = ph & xv;
    hout
}

/// `1 − lev/max(len)`, with two empty strings counting as identical.
pub fn edit_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - lev_chars(&a, &b) as f64 / longest as f64
}

/// Dice overlap of the two texts' line multisets (trailing whitespace
/// ignored). Unlike edit similarity it is blind to line order.
pub fn line_similarity(a: &str, b: &str) -> f64 {
    let mut counts: HashMap<&str, i64> = HashMap::new();
    let (mut na, mut nb) = (0usize, 0usize);
    for l in a.lines() {
        *counts.entry(l.trim_end()).or_default() += 1;
        na += 1;
    }
    let mut common = 0usize;
    for l in b.lines() {
        let c = counts.entry(l.trim_end()).or_default();
        if *c > 0 {
            common += 1;
        }
        *c -= 1;
        nb += 1;
    }
    if na + nb == 0 {
        return 1.0;
    }
    2.0 * common as f64 / (na + nb) as f64
}

// ---------------------------------------------------------------------------
// Similarities

pub fn sim_name(p: &FeatureProfile, q: &FeatureProfile) -> f64 {
    edit_similarity(&p.fn_name, &q.fn_name)
}

pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

pub fn sim_vars(p: &FeatureProfile, q: &FeatureProfile) -> f64 {
    jaccard(&p.var_set, &q.var_set)
}

pub fn cosine(a: &[u32], b: &[u32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum();
    let na: f64 = a.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
    match (na == 0.0, nb == 0.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => (dot / (na * nb)).clamp(0.0, 1.0),
    }
}

pub fn sim_struct(p: &FeatureProfile, q: &FeatureProfile) -> f64 {
    cosine(&p.struct_vec, &q.struct_vec)
}

pub fn sim_sem(p: &FeatureProfile, q: &FeatureProfile) -> f64 {
    edit_similarity(&p.norm_text, &q.norm_text)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Similarities {
    pub name: f64,
    pub vars: f64,
    #[serde(rename = "struct")]
    pub structure: f64,
    pub sem: f64,
}

impl Similarities {
    pub fn between(p: &FeatureProfile, q: &FeatureProfile) -> Self {
        Similarities {
            name: sim_name(p, q),
            vars: sim_vars(p, q),
            structure: sim_struct(p, q),
            sem: sim_sem(p, q),
        }
    }

    pub fn score(&self, w: &SimilarityWeights) -> f64 {
        let s = w.alpha * self.name + w.beta * self.vars + w.gamma * self.structure + w.delta * self.sem;
        s.clamp(0.0, 1.0)
    }
}

// ---------------------------------------------------------------------------
// Weights

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Default for SimilarityWeights {
    fn default() -> Self {
        SimilarityWeights {
            alpha: 0.25,
            beta: 0.25,
            gamma: 0.25,
            delta: 0.25,
        }
    }
}

pub const DEFAULT_WEIGHTS_FILE: &str = "codemark-weights.json";

impl SimilarityWeights {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let w = SimilarityWeights {
            alpha,
            beta,
            gamma,
            delta,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.alpha, self.beta, self.gamma, self.delta];
        if parts.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidArgument(format!("weights must lie in [0, 1]: {parts:?}")));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("weights must sum to 1, got {sum}")));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let w: SimilarityWeights = serde_json::from_str(&text)?;
        w.validate()?;
        Ok(w)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        atomic_write(path, text.as_bytes())
    }
}

pub fn combined_score(p: &FeatureProfile, q: &FeatureProfile, w: &SimilarityWeights) -> f64 {
    Similarities::between(p, q).score(w)
}

// ---------------------------------------------------------------------------
// Closeness test used for decoding

/// Which signal settled a closeness comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signal {
    Semantic,
    Structural,
    Textual,
    Tie,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Closeness {
    pub sim_before: f64,
    pub sim_after: f64,
    pub improved: bool,
    pub signal: Signal,
}

const TIE: f64 = 1e-9;

/// Precomputed view of the target text that candidates are compared against.
#[derive(Clone, Debug)]
pub struct Comparator {
    text: String,
    profile: FeatureProfile,
}

impl Comparator {
    pub fn new(target: &CodeSnippet) -> Self {
        Comparator {
            text: target.text.clone(),
            profile: extract_profile(target),
        }
    }

    /// Does `after` move `before` towards the target? `sim_sem` decides
    /// (with `margin`); within 1e-9 `sim_struct` decides; if both tie, raw
    /// text decides: line overlap, then edit similarity, then edit
    /// similarity ignoring case.
    pub fn compare(&self, before: &CodeSnippet, after: &CodeSnippet, margin: f64) -> Closeness {
        let pb = extract_profile(before);
        let pa = extract_profile(after);
        let sb = sim_sem(&pb, &self.profile);
        let sa = sim_sem(&pa, &self.profile);
        let mut out = Closeness {
            sim_before: sb,
            sim_after: sa,
            improved: false,
            signal: Signal::Tie,
        };
        if (sa - sb).abs() > TIE {
            out.signal = Signal::Semantic;
            out.improved = sa > sb + margin;
            return out;
        }
        let tb = sim_struct(&pb, &self.profile);
        let ta = sim_struct(&pa, &self.profile);
        if (ta - tb).abs() > TIE {
            out.signal = Signal::Structural;
            out.improved = ta > tb;
            return out;
        }
        let lb = line_similarity(&before.text, &self.text);
        let la = line_similarity(&after.text, &self.text);
        if (la - lb).abs() > TIE {
            out.signal = Signal::Textual;
            out.improved = la > lb;
            return out;
        }
        let rb = edit_similarity(&before.text, &self.text);
        let ra = edit_similarity(&after.text, &self.text);
        if (ra - rb).abs() > TIE {
            out.signal = Signal::Textual;
            out.improved = ra > rb;
            return out;
        }
        let folded = self.text.to_lowercase();
        let cb = edit_similarity(&before.text.to_lowercase(), &folded);
        let ca = edit_similarity(&after.text.to_lowercase(), &folded);
        if (ca - cb).abs() > TIE {
            out.signal = Signal::Textual;
            out.improved = ca > cb;
        }
        out
    }
}

pub fn closer(before: &CodeSnippet, after: &CodeSnippet, target: &CodeSnippet, margin: f64) -> Closeness {
    Comparator::new(target).compare(before, after, margin)
}

// ---------------------------------------------------------------------------
// Grid search

/// Development example: a (possibly attacked) watermarked text and the id of
/// the original it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DevPair {
    pub text: String,
    pub language: Language,
    pub original_id: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSearchOutcome {
    pub weights: SimilarityWeights,
    pub accuracy: f64,
    pub mean_margin: f64,
    pub evaluated: usize,
}

/// Every weight vector on the 0.1 simplex grid, in ascending lexicographic order.
pub fn grid_points() -> Vec<[u8; 4]> {
    let mut out = Vec::with_capacity(286);
    for a in 0..=10u8 {
        for b in 0..=10 - a {
            for c in 0..=10 - a - b {
                out.push([a, b, c, 10 - a - b - c]);
            }
        }
    }
    out
}

fn tenths(p: [u8; 4]) -> SimilarityWeights {
    SimilarityWeights {
        alpha: f64::from(p[0]) / 10.0,
        beta: f64::from(p[1]) / 10.0,
        gamma: f64::from(p[2]) / 10.0,
        delta: f64::from(p[3]) / 10.0,
    }
}

/// Top-1 hits and summed best-minus-runner-up margin for one weight vector.
fn evaluate_point(w: &SimilarityWeights, table: &[Vec<Similarities>], truth: &[usize]) -> (usize, f64) {
    let mut hits = 0;
    let mut margin_sum = 0.0;
    for (row, &want) in table.iter().zip(truth) {
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        let mut runner_up = f64::NEG_INFINITY;
        for (c, s) in row.iter().enumerate() {
            let score = s.score(w);
            if score > best.1 + 1e-12 {
                runner_up = best.1;
                best = (c, score);
            } else if score > runner_up {
                runner_up = score;
            }
        }
        if best.0 == want {
            hits += 1;
        }
        let runner_up = if runner_up.is_finite() { runner_up } else { 0.0 };
        margin_sum += best.1 - runner_up;
    }
    (hits, margin_sum)
}

/// Exhaustive search of the weight grid. Objective: top-1 retrieval
/// accuracy; ties go to the larger mean margin, then to the earlier grid
/// point.
pub fn grid_search_weights(
    dev: &[DevPair],
    codebase: &CandidateCodebase,
    exec: Exec,
) -> Result<GridSearchOutcome> {
    if dev.is_empty() {
        return Err(Error::InvalidArgument("development set is empty".into()));
    }
    if codebase.is_empty() {
        return Err(Error::EmptyCodebase);
    }
    let candidates: Vec<FeatureProfile> = exec.map(codebase.snippets(), extract_profile);
    let ids: HashMap<&str, usize> = codebase
        .snippets()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.as_str(), i))
        .collect();
    let truth = dev
        .iter()
        .map(|p| {
            ids.get(p.original_id.as_str())
                .copied()
                .ok_or_else(|| Error::UnknownSnippet(p.original_id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let table: Vec<Vec<Similarities>> = exec.map(dev, |p| {
        let q = profile_of(&p.text, p.language);
        candidates.iter().map(|c| Similarities::between(&q, c)).collect()
    });

    let points = grid_points();
    let results = exec.map(&points, |p| evaluate_point(&tenths(*p), &table, &truth));
    let mut best = 0;
    for (i, r) in results.iter().enumerate().skip(1) {
        let b = &results[best];
        if r.0 > b.0 || (r.0 == b.0 && r.1 > b.1) {
            best = i;
        }
    }
    let n = dev.len() as f64;
    Ok(GridSearchOutcome {
        weights: tenths(points[best]),
        accuracy: results[best].0 as f64 / n,
        mean_margin: results[best].1 / n,
        evaluated: points.len(),
    })
}
