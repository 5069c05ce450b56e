use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;

/// Indexed text fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Title,
    Abstract,
    Keyword,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::Title, Field::Abstract, Field::Keyword];

    pub fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub field: Field,
    pub position: u32,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SynonymError {
    #[error("line {line}: expected `token=canonical`")]
    MissingSeparator { line: usize },
    #[error("line {line}: {side:?} must be exactly one token")]
    NotAToken { line: usize, side: String },
    #[error("reading synonym file: {0}")]
    Io(String),
}

/// Variant token -> canonical token, applied at index and query time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymTable {
    map: HashMap<String, String>,
}

impl SynonymTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `token=canonical` lines. Blank lines and `#` comments are
    /// skipped. Both sides are case-folded and must be a single token.
    pub fn parse(text: &str) -> Result<Self, SynonymError> {
        let mut table = SynonymTable::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (from, to) = line
                .split_once('=')
                .ok_or(SynonymError::MissingSeparator { line: i + 1 })?;
            let from = single_token(from).ok_or_else(|| SynonymError::NotAToken {
                line: i + 1,
                side: from.trim().to_string(),
            })?;
            let to = single_token(to).ok_or_else(|| SynonymError::NotAToken {
                line: i + 1,
                side: to.trim().to_string(),
            })?;
            table.insert(from, to);
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, SynonymError> {
        let text = std::fs::read_to_string(path).map_err(|e| SynonymError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, variant: impl Into<String>, canonical: impl Into<String>) {
        self.map.insert(variant.into(), canonical.into());
    }

    pub fn canonical<'a>(&'a self, token: &'a str) -> &'a str {
        self.map.get(token).map(String::as_str).unwrap_or(token)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

fn single_token(s: &str) -> Option<String> {
    let mut words = split_words(s);
    let first = words.next()?;
    words.next().is_none().then_some(first)
}

fn split_words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

/// Lowercasing tokenizer splitting on every non-alphanumeric character.
/// No stemming and no stopwords.
#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    synonyms: SynonymTable,
}

impl Tokenizer {
    pub fn new(synonyms: SynonymTable) -> Self {
        Tokenizer { synonyms }
    }

    pub fn synonyms(&self) -> &SynonymTable {
        &self.synonyms
    }

    pub fn tokenize(&self, text: &str, field: Field) -> Vec<Token> {
        self.terms(text)
            .into_iter()
            .enumerate()
            .map(|(i, text)| Token {
                text,
                field,
                position: i as u32,
            })
            .collect()
    }

    /// Token texts only, in order.
    pub fn terms(&self, text: &str) -> Vec<String> {
        split_words(text)
            .map(|w| match self.synonyms.map.get(&w) {
                Some(c) => c.clone(),
                None => w,
            })
            .collect()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Title => "title",
            Field::Abstract => "abstract",
            Field::Keyword => "keyword",
        })
    }
}
