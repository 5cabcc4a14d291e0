use std::path::{Path, PathBuf};

use codemark::attacks::{attack_batch, paraphrase_attack, rename_attack, transform_attack, AttackSpec};
use codemark::corpus::{self, ingest_directory, load_records, save_codebase, save_records};
use codemark::embedder::{embed_batch, BitSource, BatchItem};
use codemark::evaluator::{report, RunArtifacts};
use codemark::extractor::{extract_batch, ResultLine};
use codemark::harness::{TestConfig, TestOutcome};
use codemark::rules;
use codemark::{Backend, CandidateCodebase, CodeSnippet, DecodingPolicy, Error, Exec, Language, SimilarityWeights};

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn codebase() -> CandidateCodebase {
    ingest_directory(&corpus_dir().join("functions"), None).unwrap()
}

fn tests() -> TestConfig {
    TestConfig::load(&corpus_dir().join("tests.json")).unwrap()
}

fn runnable(s: &CodeSnippet) -> bool {
    s.language != Language::Java
}

fn embed_all(cb: &CandidateCodebase, seed: u64) -> Vec<BatchItem> {
    embed_batch(&Backend::mock(), cb, &BitSource::Seeded(seed), 4, Exec::Parallel).unwrap()
}

#[test]
fn ingest_assigns_relative_ids_and_filters_languages() {
    let cb = codebase();
    assert_eq!(cb.len(), 65);
    assert!(cb.get("c/sum_array.c").is_some());
    assert!(cb.iter().all(|s| s.content_hash == corpus::content_hash(&s.text)));
    let py = ingest_directory(&corpus_dir().join("functions"), Some(&[Language::Python])).unwrap();
    assert_eq!(py.len(), 13);
    assert!(py.iter().all(|s| s.language == Language::Python));
}

#[test]
fn ingest_skips_duplicates_and_undecodable_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.py"), "def f():\n    return 1\n").unwrap();
    std::fs::write(dir.path().join("b.py"), "def f():\n    return 1\n").unwrap();
    std::fs::write(dir.path().join("c.py"), [0xff, 0xfe, 0x00]).unwrap();
    std::fs::write(dir.path().join("d.py"), "").unwrap();
    let cb = ingest_directory(dir.path(), None).unwrap();
    assert_eq!(cb.len(), 1);
    assert_eq!(cb.duplicates, 1);
    assert_eq!(cb.skipped, 2);
    assert!(ingest_directory(&dir.path().join("a.py"), None).is_err());
}

#[test]
fn codebase_and_records_survive_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let cb = codebase();
    let path = dir.path().join("codebase.jsonl");
    save_codebase(&cb, &path).unwrap();
    assert_eq!(corpus::load_codebase(&path).unwrap(), cb);

    let records: Vec<_> = embed_all(&cb, 5).iter().filter_map(|i| i.record().cloned()).collect();
    let rpath = dir.path().join("records.jsonl");
    save_records(&records, &rpath).unwrap();
    assert_eq!(load_records(&rpath).unwrap(), records);
}

#[test]
fn malformed_jsonl_reports_the_line() {
    let text = "{\"id\":\"a\"}\nnot json\n";
    match corpus::parse_codebase(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn mock_runs_are_reproducible() {
    let cb = codebase();
    let a = embed_all(&cb, 9);
    let b = embed_batch(&Backend::mock(), &cb, &BitSource::Seeded(9), 4, Exec::Sequential).unwrap();
    assert_eq!(a, b);
    let texts = |items: &[BatchItem]| -> String {
        corpus::to_jsonl(items.iter().filter_map(|i| i.record())).unwrap()
    };
    assert_eq!(texts(&a), texts(&b));
}

#[test]
fn extraction_recovers_every_message() {
    let cb = codebase();
    let items = embed_all(&cb, 17);
    let marked: Vec<CodeSnippet> = items.iter().filter_map(|i| i.watermarked().cloned()).collect();
    assert_eq!(marked.len(), cb.len());
    let results = extract_batch(
        &Backend::mock(),
        &marked,
        &cb,
        &SimilarityWeights::default(),
        4,
        &DecodingPolicy::default(),
        Exec::Parallel,
    );
    for (item, r) in items.iter().zip(&results) {
        let r = r.as_ref().unwrap();
        assert_eq!(r.bits, item.bits, "{}", item.snippet_id);
        assert_eq!(r.retrieval.matched.id, item.snippet_id);
        assert!(!r.low_confidence);
    }
}

#[test]
fn extraction_against_an_empty_codebase_fails() {
    let cb = codebase();
    let s = cb.get("c/sum_array.c").unwrap();
    let empty = CandidateCodebase::default();
    let r = codemark::extract(&Backend::mock(), s, &empty, &SimilarityWeights::default(), 4, &DecodingPolicy::default());
    assert!(matches!(r, Err(Error::EmptyCodebase)));
}

#[test]
fn report_matches_hand_counts() {
    let cb = codebase();
    let items = embed_all(&cb, 23);
    let records: Vec<_> = items.iter().filter_map(|i| i.record().cloned()).collect();
    let marked: Vec<CodeSnippet> = items.iter().filter_map(|i| i.watermarked().cloned()).collect();
    let mut results: Vec<ResultLine> = extract_batch(
        &Backend::mock(),
        &marked,
        &cb,
        &SimilarityWeights::default(),
        4,
        &DecodingPolicy::default(),
        Exec::Parallel,
    )
    .iter()
    .zip(&marked)
    .map(|(r, s)| ResultLine::new(&s.id, r.as_ref().unwrap()))
    .collect();
    // Corrupt one bit of one result and every bit of another.
    let b0: Vec<bool> = results[0].bits.iter().enumerate().map(|(k, b)| if k == 0 { !b } else { b }).collect();
    results[0].bits = codemark::WatermarkBits::from_bools(b0);
    results[1].bits = codemark::WatermarkBits::from_bools(results[1].bits.iter().map(|b| !b).collect());

    let tests = tests();
    let r = report(
        &RunArtifacts {
            records: &records,
            results: &results,
            suspects: &marked,
            originals: Some(&cb),
            embed_failures: 0,
            tests: Some(&tests),
        },
        Exec::Parallel,
    )
    .unwrap();
    let total = 4.0 * records.len() as f64;
    assert_eq!(r.bit_acc, (total - 5.0) / total);
    assert_eq!(r.msg_acc, (records.len() - 2) as f64 / records.len() as f64);
    assert_eq!(r.bpf, 4.0);
    assert_eq!(r.syntax_rate, Some(1.0));
    assert_eq!(r.pass_rate, Some(1.0));
    assert_eq!(r.pass_skipped, 0);
    assert!(r.sim_degradation.unwrap() > 0.5 && r.sim_degradation.unwrap() < 1.0);
    assert_eq!(r.n_snippets, 65);

    let json: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in [
        "bit_acc",
        "msg_acc",
        "bpf",
        "syntax_rate",
        "pass_rate",
        "pass_skipped",
        "sim_degradation",
        "n_snippets",
        "n_failures",
    ] {
        assert!(json.get(key).is_some(), "{key}");
    }

    let short = &results[1..];
    assert!(report(
        &RunArtifacts {
            records: &records,
            results: short,
            ..RunArtifacts::default()
        },
        Exec::Sequential
    )
    .is_err());
}

#[test]
fn every_engine_rule_keeps_unit_tests_passing() {
    let cb = codebase();
    let tests = tests();
    let jobs: Vec<(CodeSnippet, &'static str)> = rules::catalog()
        .deterministic()
        .into_iter()
        .flat_map(|rule| {
            cb.iter()
                .filter(|s| runnable(s) && tests.has_test(s) && rules::is_applicable(rule, s))
                .map(move |s| (rules::apply(rule, s).unwrap(), rule.rule_id))
                .collect::<Vec<_>>()
        })
        .collect();
    assert!(jobs.len() > 100, "only {} rule applications", jobs.len());
    let failures: Vec<String> = Exec::Parallel
        .map(&jobs, |(s, rule)| match tests.run(s) {
            Some(TestOutcome::Passed) => None,
            other => Some(format!("{rule} on {}: {other:?}", s.id)),
        })
        .into_iter()
        .flatten()
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn attacked_code_still_passes_its_tests() {
    let cb = codebase();
    let tests = tests();
    let marked: Vec<CodeSnippet> = embed_all(&cb, 42)
        .iter()
        .filter_map(|i| i.watermarked().cloned())
        .filter(runnable)
        .collect();
    for spec in [AttackSpec::rename(1.0, 3), AttackSpec::transform(3, 3)] {
        let attacked: Vec<CodeSnippet> = attack_batch(&Backend::mock(), &spec, &marked, Exec::Parallel)
            .unwrap()
            .into_iter()
            .map(|a| a.unwrap().snippet)
            .collect();
        let failures: Vec<String> = Exec::Parallel
            .map(&attacked, |s| match tests.run(s) {
                Some(TestOutcome::Passed) => None,
                other => Some(format!("{spec} on {}: {other:?}", s.id)),
            })
            .into_iter()
            .flatten()
            .collect();
        assert!(failures.is_empty(), "{failures:#?}");
    }
}

#[test]
fn attack_metadata_describes_the_change() {
    let cb = codebase();
    let s = cb.get("python/sum_evens.py").unwrap();
    let r = rename_attack(s, 0.5, 1).unwrap();
    assert_eq!(r.meta.kind, "rename");
    assert_eq!(r.meta.seed, Some(1));
    assert!(!r.meta.renamed.as_ref().unwrap().is_empty());
    let t = transform_attack(s, 2, 1).unwrap();
    assert_eq!(t.meta.kind, "transform");
    assert!(t.meta.applied_rules.as_ref().unwrap().len() <= 2);
    assert_eq!(transform_attack(s, 2, 1).unwrap(), t);
    assert!(matches!(paraphrase_attack(&Backend::mock(), s), Err(Error::MockUnsupported(_))));
    assert!(attack_batch(&Backend::mock(), &AttackSpec::rename(0.0, 1), std::slice::from_ref(s), Exec::Sequential).is_err());
}

#[test]
fn weights_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("weights.json");
    let w = SimilarityWeights::new(0.4, 0.3, 0.2, 0.1).unwrap();
    w.save(&path).unwrap();
    assert_eq!(SimilarityWeights::load(&path).unwrap(), w);
    std::fs::write(&path, r#"{"alpha":0.5,"beta":0.5,"gamma":0.5,"delta":0.0}"#).unwrap();
    assert!(SimilarityWeights::load(&path).is_err());
}
