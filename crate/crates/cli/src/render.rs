use crate::OutputFormat;
use soograph_core::engine::QueryOutcome;
use soograph_core::report::QueryReport;
use soograph_core::Engine;
use std::fmt::Write;

fn clip(s: &str, width: usize) -> String {
    if s.chars().count() <= width {
        return s.to_string();
    }
    let mut out: String = s.chars().take(width.saturating_sub(1)).collect();
    out.push('…');
    out
}

pub fn render(engine: &Engine, outcome: &QueryOutcome, format: OutputFormat, limit: usize) -> String {
    let store = engine.store();
    match format {
        OutputFormat::Json => {
            let mut s = QueryReport::new(outcome.canonical.clone(), &outcome.list, store, usize::MAX).to_json();
            s.push('\n');
            s
        }
        OutputFormat::Ids => outcome
            .list
            .entries
            .iter()
            .take(limit)
            .map(|e| format!("{}\n", store.doc(e.doc).id))
            .collect(),
        OutputFormat::Table => {
            let mut s = String::new();
            writeln!(
                s,
                "{:>4}  {:<19}  {:>10}  {:>4}  {:<20}  title",
                "#", "id", "score", "year", "first author"
            )
            .unwrap();
            for (i, e) in outcome.list.entries.iter().take(limit).enumerate() {
                let d = store.doc(e.doc);
                writeln!(
                    s,
                    "{:>4}  {:<19}  {:>10.4}  {:>4}  {:<20}  {}",
                    i + 1,
                    d.id,
                    e.score.total,
                    d.year,
                    clip(d.first_author().unwrap_or(""), 20),
                    clip(&d.title, 60)
                )
                .unwrap();
            }
            let n = outcome.list.len();
            writeln!(s, "{} of {n} results  {}", n.min(limit), outcome.canonical).unwrap();
            s
        }
    }
}
