//! Deterministic synthetic corpora and read logs.
//!
//! Sampling uses only integer arithmetic on a seeded ChaCha stream, so a
//! seed yields the same corpus everywhere. The one exception is a
//! non-integer `pa_exponent`, whose weight table goes through `powf`.

use crate::corpus::{Collection, Document, ReadEvent};
use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub n_docs: usize,
    pub n_topics: usize,
    pub refs_mean: f64,
    /// Preferential-attachment strength: targets are drawn with weight
    /// `(1 + in_degree)^pa_exponent`.
    pub pa_exponent: f64,
    pub n_readers: usize,
    pub reads_mean: f64,
    pub year_span: (i32, i32),
    pub seed: u64,
    /// Last day of the generated read log, which covers the 180 days
    /// before it.
    pub reads_until: NaiveDate,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_docs: 1000,
            n_topics: 10,
            refs_mean: 10.0,
            pa_exponent: 1.0,
            n_readers: 200,
            reads_mean: 20.0,
            year_span: (1990, 2020),
            seed: 0,
            reads_until: NaiveDate::from_ymd_opt(2020, 6, 22).expect("valid date"),
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.year_span.0 > self.year_span.1 {
            return Err("year span must have lo <= hi".into());
        }
        if !(crate::corpus::MIN_YEAR..=crate::corpus::MAX_YEAR).contains(&self.year_span.0)
            || !(crate::corpus::MIN_YEAR..=crate::corpus::MAX_YEAR).contains(&self.year_span.1)
        {
            return Err("year span must lie within the valid year range".into());
        }
        let finite = |v: f64| v.is_finite() && v >= 0.0;
        if !finite(self.refs_mean) || !finite(self.reads_mean) || !finite(self.pa_exponent) {
            return Err("refs_mean, reads_mean and pa_exponent must be finite and >= 0".into());
        }
        if self.n_topics == 0 && self.n_docs > 0 {
            return Err("n_topics must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    /// Ordered by year.
    pub documents: Vec<Document>,
    pub events: Vec<ReadEvent>,
    /// Topic of each document.
    pub topics: Vec<u32>,
}

impl SyntheticCorpus {
    pub fn documents_jsonl(&self) -> String {
        self.documents.iter().map(|d| d.to_json_line() + "\n").collect()
    }

    pub fn events_jsonl(&self) -> String {
        self.events.iter().map(|e| e.to_json_line() + "\n").collect()
    }
}

/// Prefix sums over integer weights.
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: vec![0; n + 1] }
    }

    fn add(&mut self, i: usize, delta: u64) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn total(&self) -> u64 {
        let mut i = self.tree.len() - 1;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    fn find(&self, mut target: u64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

const WEIGHT_SCALE: u64 = 1024;
const WEIGHT_CAP: u64 = 1 << 44;

struct AttachmentWeights {
    exponent: f64,
    table: Vec<u64>,
}

impl AttachmentWeights {
    fn get(&mut self, in_degree: usize) -> u64 {
        if self.exponent == 1.0 {
            return (1 + in_degree as u64) * WEIGHT_SCALE;
        }
        if self.exponent == 0.0 {
            return WEIGHT_SCALE;
        }
        while self.table.len() <= in_degree {
            let k = self.table.len() as f64;
            let w = ((1.0 + k).powf(self.exponent) * WEIGHT_SCALE as f64).round();
            self.table.push((w as u64).clamp(1, WEIGHT_CAP));
        }
        self.table[in_degree]
    }
}

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "nu", "pe", "ra", "si", "to", "va", "ze", "ba", "do", "fi", "gu", "he", "jo", "ly", "mo", "ne",
    "po", "qu", "ri", "su", "te",
];
const COMMON: [&str; 16] = [
    "study",
    "results",
    "model",
    "data",
    "observations",
    "analysis",
    "new",
    "method",
    "evidence",
    "survey",
    "properties",
    "sample",
    "effect",
    "measurement",
    "the",
    "of",
];
const STEMS: [&str; 7] = ["ApJ", "MNRAS", "AJ", "A&A", "PASP", "arXiv", "SPIE"];
const INSTITUTES: [&str; 6] = [
    "Center for Astrophysics",
    "Institute of Astronomy",
    "Department of Physics",
    "Space Telescope Institute",
    "Observatory of the South",
    "Laboratory for Particle Physics",
];

/// Pseudo-word number `i` (distinct for distinct `i`).
fn word(i: usize) -> String {
    let n = SYLLABLES.len();
    let mut s = String::new();
    let (a, rest) = (i % n, i / n);
    let (b, c) = (rest % n, rest / n);
    s.push_str(SYLLABLES[a]);
    s.push_str(SYLLABLES[b]);
    if c > 0 {
        s.push_str(&word(c - 1));
    }
    s
}

/// Index in `0..n` biased towards 0.
fn skewed(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.random_range(0..n).min(rng.random_range(0..n))
}

/// Count with the given mean: uniform on `0..=round(2*mean)`.
fn count(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    let hi = (2.0 * mean).round() as usize;
    rng.random_range(0..=hi)
}

const TOPIC_WORDS: usize = 40;
const TOPIC_AUTHORS: usize = 30;

pub fn generate(params: &SynthParams) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n_docs;
    let n_topics = params.n_topics.max(1);
    let (lo, hi) = params.year_span;
    let span = (hi - lo + 1) as usize;

    let topic_words: Vec<Vec<String>> = (0..n_topics)
        .map(|t| (0..TOPIC_WORDS).map(|w| word(t * TOPIC_WORDS + w)).collect())
        .collect();
    let surname = |t: usize, a: usize| format!("{}{}", word(10_000 + t * TOPIC_AUTHORS + a), "son");

    let mut documents = Vec::with_capacity(n);
    let mut topics = Vec::with_capacity(n);
    let mut in_degree = vec![0usize; n];
    let mut global = Fenwick::new(n);
    let mut per_topic: Vec<Fenwick> = (0..n_topics).map(|_| Fenwick::new(n)).collect();
    let mut weights = AttachmentWeights {
        exponent: params.pa_exponent,
        table: Vec::new(),
    };
    let mut year_start = 0usize;
    let mut seq_in_year = 0usize;

    for i in 0..n {
        let year = lo + ((i * span) / n.max(1)) as i32;
        if i > 0 && documents.last().is_some_and(|d: &Document| d.year != year) {
            // earlier years become citable
            for j in year_start..i {
                let w = weights.get(in_degree[j]);
                global.add(j, w);
                per_topic[topics[j] as usize].add(j, w);
            }
            year_start = i;
            seq_in_year = 0;
        }
        let topic = rng.random_range(0..n_topics);
        topics.push(topic as u32);

        let pick_word = |rng: &mut ChaCha8Rng| -> String {
            if rng.random_range(0..10u32) < 7 {
                topic_words[topic][skewed(rng, TOPIC_WORDS)].clone()
            } else {
                COMMON[rng.random_range(0..COMMON.len())].to_string()
            }
        };
        let title_len = rng.random_range(4..=8);
        let title: Vec<String> = (0..title_len).map(|_| pick_word(&mut rng)).collect();
        let abs_len = rng.random_range(25..=60);
        let abstract_words: Vec<String> = (0..abs_len).map(|_| pick_word(&mut rng)).collect();
        let keywords: Vec<String> = (0..rng.random_range(0..=3usize))
            .map(|_| topic_words[topic][skewed(&mut rng, TOPIC_WORDS)].clone())
            .collect();

        let n_authors = rng.random_range(1..=4usize);
        let mut authors = Vec::with_capacity(n_authors);
        let mut affiliations = Vec::with_capacity(n_authors);
        for _ in 0..n_authors {
            let t = if rng.random_range(0..10u32) < 8 {
                topic
            } else {
                rng.random_range(0..n_topics)
            };
            let a = skewed(&mut rng, TOPIC_AUTHORS);
            let initial = (b'a' + (a % 26) as u8) as char;
            let name = format!("{}, {}.", capitalize(&surname(t, a)), initial.to_ascii_uppercase());
            if authors.contains(&name) {
                continue;
            }
            authors.push(name);
            affiliations.push(INSTITUTES[(t + a) % INSTITUTES.len()].to_string());
        }

        let month = rng.random_range(1..=12u32);
        let day = rng.random_range(1..=28u32);
        let stem = STEMS[rng.random_range(0..STEMS.len())];
        let vol = seq_in_year / 9999 + 1;
        let page = seq_in_year % 9999 + 1;
        seq_in_year += 1;
        let initial = authors[0].chars().next().unwrap_or('.');
        let id = format!("{year}{stem:.<5}{vol:.>4}.{page:.>4}{initial}");

        let mut refs: Vec<usize> = Vec::new();
        let wanted = count(&mut rng, params.refs_mean).min(year_start);
        let mut attempts = 0;
        while refs.len() < wanted && attempts < wanted * 8 {
            attempts += 1;
            let tree = if rng.random_range(0..10u32) < 8 && per_topic[topic].total() > 0 {
                &per_topic[topic]
            } else {
                &global
            };
            let total = tree.total();
            if total == 0 {
                break;
            }
            let target = tree.find(rng.random_range(0..total));
            if !refs.contains(&target) {
                refs.push(target);
            }
        }
        for &r in &refs {
            let old = weights.get(in_degree[r]);
            in_degree[r] += 1;
            let delta = weights.get(in_degree[r]) - old;
            global.add(r, delta);
            per_topic[topics[r] as usize].add(r, delta);
        }

        let mut d = Document::new(id, year);
        d.title = capitalize(&title.join(" "));
        d.abstract_text = abstract_words.join(" ");
        d.authors = authors;
        d.affiliations = affiliations;
        d.pubdate = format!("{year}-{month:02}");
        d.entry_date = NaiveDate::from_ymd_opt(year, month, day);
        d.bibstem = stem.to_string();
        d.keywords = keywords;
        d.collections = vec![if topic % 4 == 3 {
            Collection::Physics
        } else {
            Collection::Astronomy
        }];
        if rng.random_range(0..10u32) < 8 {
            d.properties = vec!["refereed".to_string()];
        }
        d.references = refs.iter().map(|&r| documents[r].id.clone()).collect();
        documents.push(d);
    }

    let events = read_events(params, &mut rng, &documents, &topics, n_topics);
    SyntheticCorpus {
        documents,
        events,
        topics,
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

const READ_DAYS: u64 = 180;

fn read_events(
    params: &SynthParams,
    rng: &mut ChaCha8Rng,
    docs: &[Document],
    topics: &[u32],
    n_topics: usize,
) -> Vec<ReadEvent> {
    let n = topics.len();
    if n == 0 {
        return Vec::new();
    }
    let mut by_topic: Vec<Vec<usize>> = vec![Vec::new(); n_topics];
    for (i, &t) in topics.iter().enumerate() {
        by_topic[t as usize].push(i);
    }
    let mut events = Vec::new();
    for r in 0..params.n_readers {
        let topic = rng.random_range(0..n_topics);
        let reads = count(rng, params.reads_mean);
        for _ in 0..reads {
            let pool = &by_topic[topic];
            let doc = if rng.random_range(0..10u32) < 8 && !pool.is_empty() {
                // recent documents are more likely
                pool[pool.len() - 1 - skewed(rng, pool.len())]
            } else {
                n - 1 - skewed(rng, n)
            };
            let back = rng.random_range(0..READ_DAYS);
            let date = params
                .reads_until
                .checked_sub_days(Days::new(back))
                .unwrap_or(params.reads_until);
            events.push(ReadEvent::new(format!("reader{r:05}"), docs[doc].id.clone(), date));
        }
    }
    events
}
