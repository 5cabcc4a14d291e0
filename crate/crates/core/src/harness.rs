//! Running per-snippet unit tests and external validators.
//!
//! A command template is a shell command line with placeholders:
//! `{file}` (the snippet written to a temp file), `{fn}` (its function
//! name), `{test}` (the matching test file) and `{tmp}` (a scratch
//! directory). Exit status 0 means pass; 127 (command not found) means the
//! runtime is missing and the run is skipped.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::corpus::{CodeSnippet, Language};
use crate::error::{Error, Result};
use crate::features::extract_profile;

pub const DEFAULT_TIMEOUT_SECS: u64 = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageTest {
    pub command: String,
    /// Appended to the snippet id (minus extension) to locate its test file.
    #[serde(default)]
    pub test_suffix: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestConfig {
    #[serde(default)]
    pub languages: BTreeMap<Language, LanguageTest>,
    /// Syntax validators per language; `{file}` is the only placeholder used.
    #[serde(default)]
    pub validators: BTreeMap<Language, String>,
    #[serde(default)]
    pub tests_dir: Option<PathBuf>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_timeout() -> u64 {
    DEFAULT_TIMEOUT_SECS
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            languages: BTreeMap::new(),
            validators: BTreeMap::new(),
            tests_dir: None,
            timeout_secs: DEFAULT_TIMEOUT_SECS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "lowercase")]
pub enum TestOutcome {
    Passed,
    Failed(String),
    Skipped(String),
}

impl TestOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, TestOutcome::Passed)
    }
}

impl TestConfig {
    /// Loads a config; a relative `tests_dir` is resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: TestConfig = serde_json::from_str(&text)?;
        if let Some(dir) = &cfg.tests_dir {
            if dir.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.tests_dir = Some(base.join(dir));
            }
        }
        Ok(cfg)
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    /// Test file for a snippet, if the language is configured and the file exists.
    pub fn test_file(&self, snippet: &CodeSnippet) -> Option<PathBuf> {
        let spec = self.languages.get(&snippet.language)?;
        let dir = self.tests_dir.as_ref()?;
        let stem = match snippet.id.rsplit_once('.') {
            Some((stem, ext)) if !ext.contains('/') => stem,
            _ => snippet.id.as_str(),
        };
        let path = dir.join(format!("{stem}{}", spec.test_suffix));
        path.is_file().then_some(path)
    }

    pub fn has_test(&self, snippet: &CodeSnippet) -> bool {
        self.test_file(snippet).is_some()
    }

    /// Runs the snippet's unit test; `None` when no test is configured for it.
    pub fn run(&self, snippet: &CodeSnippet) -> Option<TestOutcome> {
        let test = self.test_file(snippet)?;
        let spec = &self.languages[&snippet.language];
        Some(run_tests(snippet, &spec.command, Some(&test), self.timeout()))
    }

    /// Runs the configured external validator; `None` when none is configured.
    pub fn validate(&self, snippet: &CodeSnippet) -> Option<TestOutcome> {
        let cmd = self.validators.get(&snippet.language)?;
        Some(run_tests(snippet, cmd, None, self.timeout()))
    }
}

fn extension(lang: Language) -> &'static str {
    match lang {
        Language::C => "c",
        Language::Cpp => "cpp",
        Language::Java => "java",
        Language::JavaScript => "js",
        Language::Python => "py",
        Language::Unknown => "txt",
    }
}

fn quote(p: &Path) -> String {
    format!("'{}'", p.display().to_string().replace('\'', r"'\''"))
}

/// Writes the snippet into a fresh temp directory, fills in the template and
/// runs it through `sh -c` with a timeout.
pub fn run_tests(snippet: &CodeSnippet, template: &str, test: Option<&Path>, timeout: Duration) -> TestOutcome {
    match try_run(snippet, template, test, timeout) {
        Ok(o) => o,
        Err(e) => TestOutcome::Skipped(e.to_string()),
    }
}

fn try_run(snippet: &CodeSnippet, template: &str, test: Option<&Path>, timeout: Duration) -> Result<TestOutcome> {
    let tmp = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
    let file = tmp.path().join(format!("snippet.{}", extension(snippet.language)));
    fs::write(&file, &snippet.text).map_err(|e| Error::io(&file, e))?;
    let fn_name = extract_profile(snippet).fn_name;
    let mut cmd = template
        .replace("{file}", &quote(&file))
        .replace("{tmp}", &quote(tmp.path()))
        .replace("{fn}", &fn_name);
    if let Some(t) = test {
        let abs = t.canonicalize().unwrap_or_else(|_| t.to_path_buf());
        cmd = cmd.replace("{test}", &quote(&abs));
    }
    let out_path = tmp.path().join("output.log");
    let out = File::create(&out_path).map_err(|e| Error::io(&out_path, e))?;
    let err = out.try_clone().map_err(|e| Error::io(&out_path, e))?;
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .current_dir(tmp.path())
        .stdin(Stdio::null())
        .stdout(out)
        .stderr(err)
        .spawn()
        .map_err(|e| Error::ExecutionUnavailable(format!("cannot start sh: {e}")))?;
    let deadline = Instant::now() + timeout;
    let status = loop {
        match child.try_wait().map_err(|e| Error::io(&out_path, e))? {
            Some(s) => break s,
            None if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                return Ok(TestOutcome::Failed(format!("timed out after {}s", timeout.as_secs())));
            }
            None => std::thread::sleep(Duration::from_millis(5)),
        }
    };
    let log = fs::read_to_string(&out_path).unwrap_or_default();
    let tail: String = {
        let lines: Vec<&str> = log.lines().collect();
        lines[lines.len().saturating_sub(5)..].join("\n")
    };
    Ok(match status.code() {
        Some(0) => TestOutcome::Passed,
        Some(127) => TestOutcome::Skipped(format!("runtime unavailable: {tail}")),
        Some(c) => TestOutcome::Failed(format!("exit status {c}: {tail}")),
        None => TestOutcome::Failed("terminated by signal".into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snip() -> CodeSnippet {
        CodeSnippet::synthetic("py/f.py", Language::Python, "def f(x):\n    return x\n")
    }

    #[test]
    fn exit_status_decides() {
        let t = Duration::from_secs(5);
        assert_eq!(run_tests(&snip(), "test -s {file}", None, t), TestOutcome::Passed);
        assert!(matches!(run_tests(&snip(), "exit 3", None, t), TestOutcome::Failed(_)));
        assert!(matches!(
            run_tests(&snip(), "no-such-runtime-xyz {file}", None, t),
            TestOutcome::Skipped(_)
        ));
    }

    #[test]
    fn placeholders_are_substituted() {
        let t = Duration::from_secs(5);
        let o = run_tests(&snip(), "test \"{fn}\" = f && grep -q 'return x' {file}", None, t);
        assert_eq!(o, TestOutcome::Passed);
    }

    #[test]
    fn timeout_kills_the_child() {
        let o = run_tests(&snip(), "sleep 5", None, Duration::from_millis(200));
        assert!(matches!(o, TestOutcome::Failed(m) if m.contains("timed out")));
    }
}
