use serde_json::Value;
use soograph_core::fixtures::{self, D1, D2, D3, D4, D5};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

struct Env {
    _dir: tempfile::TempDir,
    root: PathBuf,
    data: PathBuf,
}

impl Env {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        Env {
            data: root.join("data"),
            root,
            _dir: dir,
        }
    }

    /// A store holding the five-document fixture and its reads.
    fn loaded() -> Self {
        let env = Env::new();
        let docs = env.write("docs.jsonl", &fixtures::c5_jsonl());
        let reads = env.write("reads.jsonl", &fixtures::r3_jsonl());
        let out = env.run(&["ingest", docs.to_str().unwrap(), "--reads", reads.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
        env
    }

    fn write(&self, name: &str, body: &str) -> PathBuf {
        let p = self.root.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn cmd(&self) -> Command {
        let mut c = Command::new(env!("CARGO_BIN_EXE_soograph"));
        c.arg("--data-dir")
            .arg(&self.data)
            .env_remove("SOOGRAPH_DATA_DIR")
            .env("RUST_LOG", "warn");
        c
    }

    fn run(&self, args: &[&str]) -> Output {
        self.cmd().args(args).output().unwrap()
    }

    fn run_with_input(&self, args: &[&str], input: &str) -> Output {
        let mut child = self
            .cmd()
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .unwrap();
        child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
        child.wait_with_output().unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn ingest_reports_counts_and_persists() {
    let env = Env::new();
    let docs = env.write("docs.jsonl", &format!("{}not json\n", fixtures::c5_jsonl()));
    let reads = env.write("reads.jsonl", &fixtures::r3_jsonl());
    let out = env.run(&["ingest", docs.to_str().unwrap(), "--reads", reads.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["n_docs"], 5);
    assert_eq!(v["n_read_events"], 6);
    assert_eq!(v["docs"]["skipped"], 1);
    assert_eq!(v["reads"]["accepted"], 6);
    assert!(stderr(&out).contains("warning"));
    assert!(env.data.join("docs.jsonl").exists());

    let again = env.run(&["ingest", docs.to_str().unwrap()]);
    let v: Value = serde_json::from_str(stdout(&again).trim()).unwrap();
    assert_eq!(v["n_docs"], 5);
}

#[test]
fn missing_input_is_an_io_error() {
    let env = Env::new();
    let out = env.run(&["ingest", "/nonexistent/docs.jsonl"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("/nonexistent/docs.jsonl"));
}

#[test]
fn query_formats() {
    let env = Env::loaded();
    let ids = env.run(&["query", "useful(year:2015-2020)", "--format", "ids"]);
    assert_eq!(code(&ids), 0, "{}", stderr(&ids));
    assert_eq!(stdout(&ids).lines().collect::<Vec<_>>(), [D3, D1, D2]);

    let limited = env.run(&["--limit", "1", "query", "useful(year:2015-2020)", "--format", "ids"]);
    assert_eq!(stdout(&limited).lines().collect::<Vec<_>>(), [D3]);

    let json = env.run(&["--limit", "1", "query", "useful(year:2015-2020)", "--format", "json"]);
    let v: Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["n_total"], 3);
    assert_eq!(v["entries"].as_array().unwrap().len(), 3);
    assert_eq!(v["query"], "useful(year:2015-2020)");

    let table = env.run(&["query", "useful(year:2015-2020)"]);
    let text = stdout(&table);
    assert!(text.lines().next().unwrap().contains("score"));
    assert!(text.contains(D3) && text.contains("3 of 3 results"));
}

#[test]
fn now_pins_trending() {
    let env = Env::loaded();
    let cfg = env.write("soograph.conf", "trending.min_docs = 2\n");
    let args = |now: &'static str| {
        vec![
            "--config".to_string(),
            cfg.to_str().unwrap().to_string(),
            "--now".into(),
            now.into(),
            "query".into(),
            format!("trending(bibcode:{D1})"),
            "--format".into(),
            "ids".into(),
        ]
    };
    let run = |now| {
        let a = args(now);
        stdout(&env.run(&a.iter().map(String::as_str).collect::<Vec<_>>()))
    };
    assert_eq!(run("2020-06-22").lines().collect::<Vec<_>>(), [D1, D2, D3]);
    assert_eq!(run("2023-01-01"), "");
}

#[test]
fn parse_errors_show_a_caret_and_exit_2() {
    let env = Env::loaded();
    let out = env.run(&["query", "useful(object:m31)"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("unsupported field: object"), "{err}");
    let lines: Vec<&str> = err.lines().collect();
    let q = lines.iter().position(|l| l.trim() == "useful(object:m31)").unwrap();
    assert_eq!(lines[q + 1].find('^'), lines[q].find("object"));
}

#[test]
fn evaluation_errors_exit_3() {
    let env = Env::loaded();
    let out = env.run(&["query", "useful(docs(library/nosuch))"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let out = env.run(&["query", "topn(0, year:2000)"]);
    assert!(matches!(code(&out), 2 | 3));
}

#[test]
fn usage_errors_exit_2() {
    let env = Env::loaded();
    assert_eq!(code(&env.run(&["--now", "June", "query", "x"])), 2);
    assert_eq!(code(&env.run(&["network", "x", "--format", "svg"])), 2);
    assert_eq!(code(&env.run(&["network", "x", "--kind", "venue"])), 2);
    assert_eq!(code(&env.run(&["query"])), 2);
    let bad = env.write("bad.conf", "bm25.k9 = 1\n");
    assert_eq!(code(&env.run(&["--config", bad.to_str().unwrap(), "query", "x"])), 2);
    assert_eq!(code(&env.run(&["--config", "/nonexistent.conf", "query", "x"])), 1);
}

#[test]
fn network_exports() {
    let env = Env::loaded();
    let q = format!("bibcode:{D3} OR bibcode:{D4} OR bibcode:{D5}");
    let dot = env.run(&["network", &q]);
    assert_eq!(code(&dot), 0, "{}", stderr(&dot));
    assert!(stdout(&dot).starts_with("graph network {"));
    let json = env.run(&["network", &q, "--format", "json", "--seed", "4"]);
    let v: Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 3);
    assert_eq!(v["edges"].as_array().unwrap().len(), 3);
    let gm = env.run(&["network", &q, "--format", "graphml", "--max-nodes", "2"]);
    assert_eq!(stdout(&gm).matches("<node ").count(), 2);
    let authors = env.run(&["network", "year:2000-2020", "--kind", "author", "--format", "json"]);
    assert_eq!(code(&authors), 0);
}

#[test]
fn repl_session() {
    let env = Env::loaded();
    let input = "\n\\help\nyear:2015-2020\n\\save recent\nuseful(\\last)\n\\history\n\\last\n\\quit\nyear:2000\n";
    let out = env.run_with_input(&["repl", "--format", "ids"], input);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("\\save NAME"));
    assert!(text.contains("saved 2 documents as library/recent"));
    let useful_at = text.find(&format!("{D3}\n{D1}\n{D2}\n")).expect(&text);
    assert!(text[..useful_at].contains(&format!("{D4}\n{D5}\n")));
    assert!(text.contains("  2  useful(\\last)"));
    // `\last` on its own lists the previous result again; nothing runs after `\quit`
    let tail = &text[text.find("  2  useful(\\last)").unwrap()..];
    for id in [D1, D2, D3] {
        assert!(tail.contains(id), "{tail}");
    }
    assert!(!tail.contains(D4));
    let show = env.run(&["library", "show", "recent"]);
    assert_eq!(stdout(&show).lines().collect::<Vec<_>>(), [D4, D5]);
}

#[test]
fn repl_reports_errors_and_continues() {
    let env = Env::loaded();
    let out = env.run_with_input(&["repl", "--format", "ids"], "\\last\nfoo(bar\n\\save\nyear:2020\n");
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("error: no previous result"));
    assert!(text.contains("error: "));
    assert!(text.trim_end().ends_with("soograph>") && text.contains(&format!("{D5}\n")));
}

#[test]
fn library_commands() {
    let env = Env::loaded();
    let saved = env.run(&["library", "save", "early", "--query", "year:2000-2005"]);
    assert_eq!(code(&saved), 0, "{}", stderr(&saved));
    let v: Value = serde_json::from_slice(&saved.stdout).unwrap();
    assert_eq!(v["n_docs"], 2);
    let file = env.write("ids.txt", &format!("{D5}\n\n{D1}\n{D5}\n"));
    assert_eq!(
        code(&env.run(&["library", "save", "picked", "--file", file.to_str().unwrap()])),
        0
    );
    let list = stdout(&env.run(&["library", "list"]));
    assert_eq!(list.lines().collect::<Vec<_>>(), ["early", "picked"]);
    assert_eq!(
        stdout(&env.run(&["library", "show", "picked"]))
            .lines()
            .collect::<Vec<_>>(),
        [D5, D1]
    );
    let out = env.run(&["query", "docs(library/picked)", "--format", "ids"]);
    assert_eq!(stdout(&out).lines().count(), 2);
    assert_eq!(code(&env.run(&["library", "show", "nosuch"])), 3);
    assert_eq!(code(&env.run(&["library", "save", "x"])), 2);
    assert_ne!(code(&env.run(&["library", "save", "../evil", "--query", "x"])), 0);
}

#[test]
fn synth_writes_loadable_files() {
    let env = Env::new();
    let (d, r) = (env.root.join("d.jsonl"), env.root.join("r.jsonl"));
    let args = [
        "synth",
        "--n-docs",
        "120",
        "--n-readers",
        "10",
        "--seed",
        "9",
        "--docs-out",
        d.to_str().unwrap(),
        "--reads-out",
        r.to_str().unwrap(),
    ];
    let out = env.run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let first = std::fs::read(&d).unwrap();
    assert_eq!(std::fs::read_to_string(&d).unwrap().lines().count(), 120);
    env.run(&args);
    assert_eq!(std::fs::read(&d).unwrap(), first);
    let ingest = env.run(&["ingest", d.to_str().unwrap(), "--reads", r.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&ingest.stdout).unwrap();
    assert_eq!(v["n_docs"], 120);
    assert_eq!(v["n_dangling_refs"], 0);

    let bad = env.run(&["synth", "--n-docs", "10", "--docs-out", "/nonexistent/dir/d.jsonl"]);
    assert_eq!(code(&bad), 1);
    assert_eq!(
        code(&env.run(&["synth", "--year-from", "2020", "--year-to", "1990"])),
        2
    );
}

fn wait_for_port(child: &mut std::process::Child) -> u16 {
    let mut err = BufReader::new(child.stderr.take().unwrap());
    let deadline = Instant::now() + Duration::from_secs(20);
    let mut line = String::new();
    while Instant::now() < deadline {
        line.clear();
        if err.read_line(&mut line).unwrap() == 0 {
            break;
        }
        if let Some(rest) = line.split("http://").nth(1) {
            let port = rest.trim().rsplit(':').next().unwrap().parse().unwrap();
            std::thread::spawn(move || std::io::copy(&mut err, &mut std::io::sink()));
            return port;
        }
    }
    panic!("server did not report its address: {line}");
}

fn get(port: u16, path: &str) -> String {
    let mut s = std::net::TcpStream::connect(("127.0.0.1", port)).unwrap();
    write!(s, "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").unwrap();
    let mut body = String::new();
    s.read_to_string(&mut body).unwrap();
    body
}

fn serve(env: &Env, extra: &[&str]) -> std::process::Child {
    env.cmd()
        .env("RUST_LOG", "info")
        .args(["serve", "--port", "0"])
        .args(extra)
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap()
}

#[cfg(unix)]
fn terminate(child: &std::process::Child) {
    Command::new("kill")
        .arg("-TERM")
        .arg(child.id().to_string())
        .status()
        .unwrap();
}

#[cfg(unix)]
#[test]
fn serve_answers_and_stops_on_sigterm() {
    let env = Env::loaded();
    let site = env.root.join("site");
    std::fs::create_dir(&site).unwrap();
    std::fs::write(site.join("index.html"), "<h1>explorer</h1>").unwrap();
    let mut child = serve(&env, &["--static-dir", site.to_str().unwrap()]);
    let port = wait_for_port(&mut child);
    let health = get(port, "/healthz");
    assert!(
        health.starts_with("HTTP/1.1 200") && health.contains("\"n_docs\":5"),
        "{health}"
    );
    let q = get(port, "/query?q=useful(year:2015-2020)");
    assert!(q.contains(D3) && q.contains("\"n_total\":3"), "{q}");
    assert!(get(port, "/index.html").contains("explorer"));
    terminate(&child);
    let deadline = Instant::now() + Duration::from_secs(10);
    loop {
        if let Some(status) = child.try_wait().unwrap() {
            assert!(status.success(), "{status:?}");
            break;
        }
        assert!(Instant::now() < deadline, "server ignored SIGTERM");
        std::thread::sleep(Duration::from_millis(50));
    }
}

#[test]
fn busy_port_is_an_io_error() {
    let env = Env::loaded();
    let held = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = held.local_addr().unwrap().port().to_string();
    let out = env.run(&["serve", "--port", &port]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(stderr(&out).contains("bind"));
}

#[test]
fn data_dir_from_environment() {
    let env = Env::loaded();
    let out = Command::new(env!("CARGO_BIN_EXE_soograph"))
        .env("SOOGRAPH_DATA_DIR", &env.data)
        .args(["query", &format!("bibcode:{D2}"), "--format", "ids"])
        .output()
        .unwrap();
    assert_eq!(stdout(&out).trim(), D2);
    assert!(Path::new(&env.data).is_dir());
}
