//! Line-oriented query loop. `\last` stands for the previous result.

use crate::{query_failure, render, OutputFormat};
use chrono::NaiveDate;
use soograph_core::Engine;
use std::io::{self, BufRead, Write};

const LAST: &str = "_last";
const HELP: &str = "queries are evaluated as typed; \\last is the previous result\n\
\\save NAME  save the previous result as a library\n\
\\history    list the queries of this session\n\
\\quit       leave\n";

pub fn run(
    engine: &Engine,
    now: NaiveDate,
    format: OutputFormat,
    limit: usize,
    input: impl BufRead,
    out: &mut impl Write,
) -> io::Result<()> {
    let mut history: Vec<String> = Vec::new();
    let mut last: Option<Vec<String>> = None;
    let mut lines = input.lines();
    loop {
        write!(out, "soograph> ")?;
        out.flush()?;
        let Some(line) = lines.next() else {
            writeln!(out)?;
            return Ok(());
        };
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once(char::is_whitespace).unwrap_or((line, "")) {
            ("\\quit" | "\\q", _) => return Ok(()),
            ("\\help", _) => write!(out, "{HELP}")?,
            ("\\history", _) => {
                for (i, h) in history.iter().enumerate() {
                    writeln!(out, "{:>3}  {h}", i + 1)?;
                }
            }
            ("\\save", name) => match (&last, name.trim()) {
                (None, _) => writeln!(out, "error: no previous result")?,
                (_, "") => writeln!(out, "error: \\save needs a library name")?,
                (Some(ids), name) => match engine.libraries().save(name, ids) {
                    Ok(lib) => writeln!(out, "saved {} documents as library/{}", lib.doc_ids.len(), lib.name)?,
                    Err(e) => writeln!(out, "error: {e}")?,
                },
            },
            _ => {
                history.push(line.to_string());
                let text = if line.contains("\\last") {
                    let Some(ids) = &last else {
                        writeln!(out, "error: no previous result")?;
                        continue;
                    };
                    engine.libraries().set_scratch(LAST, ids).expect("valid scratch name");
                    line.replace("\\last", &format!("docs(library/{LAST})"))
                } else {
                    line.to_string()
                };
                match engine.query(&text, now) {
                    Ok(outcome) => {
                        write!(out, "{}", render::render(engine, &outcome, format, limit))?;
                        last = Some(outcome.list.ids(engine.store()));
                    }
                    Err(e) => writeln!(out, "error: {}", query_failure(&text, e).message_text())?,
                }
            }
        }
    }
}
