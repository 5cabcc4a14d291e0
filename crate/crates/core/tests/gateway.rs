use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;

use codemark::llm::{ProviderConfig, RemoteClient};
use codemark::rules::{self, RuleCategory};
use codemark::{Backend, CodeSnippet, Error, Language};
use serde_json::{json, Value};

struct Captured {
    auth: String,
    body: Value,
}

/// Serves the scripted `(status, body)` replies in order, one per connection.
fn serve(replies: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<Captured>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&seen);
    thread::spawn(move || {
        for (status, body) in replies {
            let Ok((stream, _)) = listener.accept() else { return };
            let mut reader = BufReader::new(stream);
            let mut len = 0;
            let mut auth = String::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                let lower = line.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                if lower.starts_with("authorization:") {
                    auth = line["authorization:".len()..].trim().to_string();
                }
            }
            let mut buf = vec![0; len];
            reader.read_exact(&mut buf).unwrap();
            log.lock().unwrap().push(Captured {
                auth,
                body: serde_json::from_slice(&buf).unwrap_or(Value::Null),
            });
            let mut stream = reader.into_inner();
            let _ = write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    (url, seen)
}

fn chat(content: &str) -> (u16, String) {
    (200, json!({"choices": [{"message": {"role": "assistant", "content": content}}]}).to_string())
}

fn config(url: &str, key_env: &str, retries: u32) -> ProviderConfig {
    ProviderConfig {
        endpoint_url: url.to_string(),
        model_name: "test-model".into(),
        api_key_env: key_env.into(),
        timeout_secs: 5,
        max_retries: retries,
        requests_per_minute: None,
        ..ProviderConfig::default()
    }
}

fn with_key(name: &str) -> &str {
    std::env::set_var(name, format!("secret-{name}"));
    name
}

fn snippet() -> CodeSnippet {
    CodeSnippet::synthetic(
        "f.c",
        Language::C,
        "int sum(int *xs, int n) {\n    int acc = 0;\n    for (int i = 0; i < n; i++) {\n        acc += xs[i];\n    }\n    return acc;\n}\n",
    )
}

#[test]
fn request_carries_model_key_and_messages() {
    let (url, seen) = serve(vec![chat("hello")]);
    let key = with_key("CODEMARK_GW_KEY_A");
    let client = RemoteClient::new(config(&url, key, 0)).unwrap();
    assert_eq!(client.complete("sys", "user text").unwrap(), "hello");
    let seen = seen.lock().unwrap();
    assert_eq!(seen.len(), 1);
    assert_eq!(seen[0].auth, "Bearer secret-CODEMARK_GW_KEY_A");
    assert_eq!(seen[0].body["model"], "test-model");
    assert_eq!(seen[0].body["messages"][0]["content"], "sys");
    assert_eq!(seen[0].body["messages"][1]["content"], "user text");
}

#[test]
fn server_errors_are_retried() {
    let (url, _) = serve(vec![
        (500, "{}".into()),
        (503, "{}".into()),
        chat("third time"),
    ]);
    let client = RemoteClient::new(config(&url, with_key("CODEMARK_GW_KEY_B"), 2)).unwrap();
    assert_eq!(client.complete("s", "u").unwrap(), "third time");
    assert_eq!(client.requests_sent(), 3);
}

#[test]
fn retries_are_bounded() {
    let (url, _) = serve(vec![(500, "{}".into()), (500, "{}".into()), chat("too late")]);
    let client = RemoteClient::new(config(&url, with_key("CODEMARK_GW_KEY_C"), 1)).unwrap();
    match client.complete("s", "u") {
        Err(Error::Network { endpoint, message }) => {
            assert_eq!(endpoint, url);
            assert!(message.contains("500"), "{message}");
        }
        other => panic!("expected a network error, got {other:?}"),
    }
    assert_eq!(client.requests_sent(), 2);
}

#[test]
fn unusable_replies_are_parse_errors() {
    let (url, _) = serve(vec![chat("no code here"), (200, "not json".into())]);
    let client = RemoteClient::new(config(&url, with_key("CODEMARK_GW_KEY_D"), 1)).unwrap();
    assert!(matches!(client.complete_code("s", "u"), Err(Error::ResponseParse(_))));
    assert_eq!(client.requests_sent(), 2);
}

#[test]
fn code_block_is_extracted() {
    let (url, _) = serve(vec![chat("Sure:\n```c\nint f(void) { return 2; }\n```\n")]);
    let client = RemoteClient::new(config(&url, with_key("CODEMARK_GW_KEY_E"), 0)).unwrap();
    assert_eq!(client.complete_code("s", "u").unwrap().trim(), "int f(void) { return 2; }");
}

#[test]
fn unreachable_endpoint_names_the_endpoint() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let url = format!("http://127.0.0.1:{port}/v1/chat/completions");
    let client = RemoteClient::new(config(&url, with_key("CODEMARK_GW_KEY_F"), 0)).unwrap();
    let err = client.complete("s", "u").unwrap_err();
    assert!(matches!(&err, Error::Network { endpoint, .. } if *endpoint == url));
    assert!(err.to_string().contains(&url));
}

#[test]
fn missing_key_fails_before_sending() {
    let (url, seen) = serve(vec![chat("unused")]);
    std::env::remove_var("CODEMARK_GW_KEY_UNSET");
    let client = RemoteClient::new(config(&url, "CODEMARK_GW_KEY_UNSET", 3)).unwrap();
    match client.complete("s", "u") {
        Err(Error::MissingCredential(name)) => assert_eq!(name, "CODEMARK_GW_KEY_UNSET"),
        other => panic!("expected a missing credential, got {other:?}"),
    }
    assert_eq!(client.requests_sent(), 0);
    assert!(seen.lock().unwrap().is_empty());
}

#[test]
fn remote_transform_confirms_changed_code() {
    let s = snippet();
    let rewritten = s.text.replace("acc", "acc_v");
    let (url, _) = serve(vec![chat(&format!("```c\n{rewritten}```")), chat(&format!("```c\n{}```", s.text))]);
    let backend = Backend::remote(config(&url, with_key("CODEMARK_GW_KEY_G"), 0)).unwrap();
    let rule = rules::lookup("naming.add_suffix").unwrap();
    let v = backend.transform(&s, rule).unwrap();
    assert!(v.rule_confirmed);
    assert_eq!(v.output_text.trim(), rewritten.trim());
    let v = backend.transform(&s, rule).unwrap();
    assert!(!v.rule_confirmed);
    assert_eq!(v.output_text, s.text);
}

#[test]
fn remote_ranking_follows_the_reply_order() {
    // while_to_do_while has an engine and does not apply to a for loop, so
    // it is dropped; reverse_loop has no engine and is trusted.
    let s = snippet();
    let (url, _) = serve(vec![chat("1. reverse_loop\n2. loops.while_to_do_while\n3. loops.for_to_while")]);
    let backend = Backend::remote(config(&url, with_key("CODEMARK_GW_KEY_H"), 0)).unwrap();
    let ranked: Vec<&str> = backend.rank_rules(&s, RuleCategory::Loops).iter().map(|r| r.rule_id).collect();
    assert_eq!(ranked, ["loops.reverse_loop", "loops.for_to_while"]);
}

#[test]
fn ranking_falls_back_to_static_priority_when_offline() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let url = format!("http://127.0.0.1:{port}/");
    let backend = Backend::remote(config(&url, with_key("CODEMARK_GW_KEY_I"), 0)).unwrap();
    let s = snippet();
    for cat in [RuleCategory::Naming, RuleCategory::Loops, RuleCategory::Organization] {
        assert_eq!(backend.rank_rules(&s, cat), Backend::mock().rank_rules(&s, cat));
    }
}

#[test]
fn remote_paraphrase_returns_the_code_block() {
    let (url, _) = serve(vec![chat("```c\nint g(void) { return 1; }\n```")]);
    let backend = Backend::remote(config(&url, with_key("CODEMARK_GW_KEY_J"), 0)).unwrap();
    assert_eq!(backend.paraphrase(&snippet()).unwrap().trim(), "int g(void) { return 1; }");
}

#[test]
fn mock_refuses_paraphrase() {
    assert!(matches!(Backend::mock().paraphrase(&snippet()), Err(Error::MockUnsupported(_))));
}
