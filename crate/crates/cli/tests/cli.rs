use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::thread;

const COMMANDS: [&str; 9] = [
    "ingest",
    "analyze",
    "rewrite",
    "train",
    "evaluate",
    "curve",
    "gradcheck",
    "score",
    "synth",
];

fn audionese(dir: &Path, args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_audionese"));
    cmd.args(args)
        .current_dir(dir)
        .env_remove("AUDIONESE_SCORER_URL")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn run(dir: &Path, args: &[&str]) -> Output {
    audionese(dir, args, None, &[])
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn synth_and_ingest(dir: &Path) {
    ok(dir, &["synth", "--out", "users.jsonl"]);
    ok(dir, &["ingest", "--in", "users.jsonl", "--out-dir", "data"]);
}

/// Serves one fixed HTTP status for every request.
fn status_server(status: u16, body: &'static str) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0;
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 {
                    break;
                }
                let line = line.trim_end().to_ascii_lowercase();
                if line.is_empty() {
                    break;
                }
                if let Some(v) = line.strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap();
                }
            }
            let mut buf = vec![0; length];
            let _ = reader.read_exact(&mut buf);
            let resp = format!(
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            let _ = stream.write_all(resp.as_bytes());
        }
    });
    url
}

#[test]
fn every_option_documents_its_default() {
    let dir = tempfile::tempdir().unwrap();
    for c in COMMANDS {
        let help = ok(dir.path(), &[c, "--help"]);
        let mut blocks: Vec<String> = Vec::new();
        for line in help
            .lines()
            .skip_while(|l| !l.starts_with("Options:"))
            .skip(1)
        {
            let t = line.trim_start();
            if t.starts_with("--") || (t.starts_with('-') && t.as_bytes().get(2) == Some(&b',')) {
                blocks.push(String::new());
            }
            if let Some(b) = blocks.last_mut() {
                b.push_str(line);
                b.push('\n');
            }
        }
        assert!(blocks.len() > 2, "{c}");
        for b in blocks {
            if b.contains("--help") || b.contains("--version") {
                continue;
            }
            assert!(
                b.contains("[default") || b.contains("(required)"),
                "{c}: {b}"
            );
        }
    }
}

#[test]
fn ingest_reports_counts_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "--out", "users.jsonl"]);
    let out = ok(
        dir.path(),
        &["ingest", "--in", "users.jsonl", "--out-dir", "a"],
    );
    assert_eq!(out.trim(), "300 prompts (50 train / 250 test)");
    ok(
        dir.path(),
        &["ingest", "--in", "users.jsonl", "--out-dir", "b"],
    );
    for f in ["corpus.jsonl", "split.json"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn plain_text_ingest() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("p.txt"),
        "sad harp solo\n\nbumpy jazz song\nchill lofi beat\n",
    )
    .unwrap();
    let out = ok(
        dir.path(),
        &["ingest", "--in", "p.txt", "--train", "1", "--out-dir", "d"],
    );
    assert_eq!(out.trim(), "3 prompts (1 train / 2 test)");
}

#[test]
fn missing_input_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["ingest", "--in", "nope.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let out = run(dir.path(), &["train", "--corpus", "nope.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_corpus_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.txt"), "\n\n").unwrap();
    let out = run(dir.path(), &["analyze", "--corpus", "empty.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rewrite_keeps_original_content() {
    let dir = tempfile::tempdir().unwrap();
    let out = audionese(
        dir.path(),
        &["rewrite"],
        Some("sad harp solo\nbumpy song\n"),
        &[],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for w in ["sad", "harp", "solo"] {
        assert!(
            lines[0]
                .split_whitespace()
                .any(|t| t.trim_matches(',') == w),
            "{}",
            lines[0]
        );
    }
}

#[test]
fn score_prints_one_line_per_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = audionese(dir.path(), &["score"], Some("sad harp solo\nhello\n"), &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    let scores: Vec<f64> = text
        .lines()
        .map(|l| l.split('\t').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(scores.len(), 2);
    assert!(scores[0] > scores[1]);
    assert!((scores[1] - 0.02).abs() < 1e-9);
}

#[test]
fn gradcheck_passes_on_initial_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["gradcheck", "--run-id", "g"]);
    assert!(out.contains("max relative error"), "{out}");
    assert!(dir.path().join("reports/g/gradcheck.json").exists());
}

#[test]
fn curve_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    synth_and_ingest(dir.path());
    let args = [
        "curve",
        "--corpus",
        "data/corpus.jsonl",
        "--split",
        "data/split.json",
    ];
    let a = ok(dir.path(), &args);
    let b = ok(dir.path(), &args);
    assert_eq!(a, b);
    assert!(a.starts_with("n_samples,"));
    assert!(a.lines().count() >= 4);
}

#[test]
fn train_then_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    synth_and_ingest(dir.path());
    let data = [
        "--corpus",
        "data/corpus.jsonl",
        "--split",
        "data/split.json",
    ];
    ok(
        dir.path(),
        &[&["train", "--run-id", "t"][..], &data].concat(),
    );
    for f in [
        "curve.csv",
        "train_report.json",
        "config.toml",
        "model.json",
    ] {
        assert!(dir.path().join("reports/t").join(f).exists(), "{f}");
    }
    let eval = [
        &[
            "evaluate",
            "--model",
            "reports/t/model.json",
            "--run-id",
            "e",
        ][..],
        &data,
    ]
    .concat();
    ok(dir.path(), &eval);
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("reports/e/eval_report.json")).unwrap(),
    )
    .unwrap();
    assert!(report.to_string().contains("improvement_ratio"));
    // Same run id twice: the folder is reused, reports overwritten.
    ok(dir.path(), &eval);
}

#[test]
fn scorer_http_error_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let url = status_server(500, "{}");
    let out = audionese(
        dir.path(),
        &["score", "--scorer", "external", "--scorer-url", &url],
        Some("sad harp solo\n"),
        &[],
    );
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn env_url_overrides_flag_url() {
    let dir = tempfile::tempdir().unwrap();
    let url = status_server(200, "{\"scores\": [0.25]}");
    let out = audionese(
        dir.path(),
        &[
            "score",
            "--scorer",
            "external",
            "--scorer-url",
            "http://127.0.0.1:9",
        ],
        Some("sad harp solo\n"),
        &[("AUDIONESE_SCORER_URL", &url)],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("0.250000\t"));
}

#[test]
fn external_scorer_without_url_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = audionese(
        dir.path(),
        &["score", "--scorer", "external"],
        Some("x\n"),
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn active_lock_blocks_a_second_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("reports")).unwrap();
    fs::write(dir.path().join("reports/.lock"), "").unwrap();
    let out = run(dir.path(), &["gradcheck"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lock"));
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    synth_and_ingest(dir.path());
    fs::write(
        dir.path().join("c.toml"),
        "[paths]\ncorpus = \"data/corpus.jsonl\"\nsplit = \"data/split.json\"\n\n[train]\nmargin = 0.5\nepochs = 3\n",
    )
    .unwrap();
    ok(
        dir.path(),
        &[
            "train", "--config", "c.toml", "--epochs", "2", "--run-id", "r",
        ],
    );
    let saved: toml::Value = fs::read_to_string(dir.path().join("reports/r/config.toml"))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(saved["train"]["margin"].as_float(), Some(0.5));
    assert_eq!(saved["train"]["epochs"].as_integer(), Some(2));
    assert_eq!(saved["train"]["learning_rate"].as_float(), Some(3e-4));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), "[train]\nmargn = 0.5\n").unwrap();
    let out = run(dir.path(), &["gradcheck", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(2));
}
