//! `key=value` engine configuration.

use crate::netviz::{LabelStatistic, NetvizParams};
use crate::readership::ReaderFilterConfig;
use crate::soo::SooParams;
use crate::text::{Bm25Params, ScoreParams, SynonymError, SynonymTable};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub bm25: Bm25Params,
    pub score: ScoreParams,
    pub readers: ReaderFilterConfig,
    pub soo: SooParams,
    pub netviz: NetvizParams,
    pub synonyms_path: Option<PathBuf>,
    pub synonyms: SynonymTable,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for {key}: {value:?}")]
    BadValue { line: usize, key: String, value: String },
    #[error("{0}")]
    Invalid(String),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("synonyms: {0}")]
    Synonyms(#[from] SynonymError),
}

pub const KEYS: &[&str] = &[
    "bm25.k1",
    "bm25.b",
    "score.title_weight",
    "score.cite_alpha",
    "score.read_beta",
    "score.blend",
    "trending.window_days",
    "trending.min_docs",
    "trending.max_docs",
    "soo.cap",
    "soo.similar_terms",
    "netviz.max_nodes",
    "netviz.min_weight",
    "netviz.label_words",
    "netviz.label_statistic",
    "text.synonyms",
];

impl Config {
    /// Parses config text without touching the filesystem; a
    /// `text.synonyms` path is recorded but not loaded.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or(ConfigError::Syntax { line })?;
            cfg.set(line, key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and loads its synonym table, resolving a relative
    /// path against the config file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Config::parse(&text)?;
        if let Some(p) = cfg.synonyms_path.take() {
            let resolved = match path.parent() {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p,
            };
            cfg.synonyms = SynonymTable::load(&resolved)?;
            cfg.synonyms_path = Some(resolved);
        }
        Ok(cfg)
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue {
            line,
            key: key.into(),
            value: value.into(),
        };
        let float =
            || -> Result<f64, ConfigError> { value.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad) };
        let int = || value.parse::<usize>().map_err(|_| bad());
        match key {
            "bm25.k1" => self.bm25.k1 = float()?,
            "bm25.b" => self.bm25.b = float()?,
            "score.title_weight" => self.bm25.title_weight = float()?,
            "score.cite_alpha" => self.score.cite_alpha = float()?,
            "score.read_beta" => self.score.read_beta = float()?,
            "score.blend" => self.score.blend = float()?,
            "trending.window_days" => self.readers.window_days = value.parse().map_err(|_| bad())?,
            "trending.min_docs" => self.readers.min_docs = int()?,
            "trending.max_docs" => self.readers.max_docs = int()?,
            "soo.cap" => self.soo.cap = int()?,
            "soo.similar_terms" => self.soo.similar_terms = int()?,
            "netviz.max_nodes" => self.netviz.max_nodes = int()?,
            "netviz.min_weight" => self.netviz.min_weight = value.parse().map_err(|_| bad())?,
            "netviz.label_words" => self.netviz.label_words = int()?,
            "netviz.label_statistic" => {
                self.netviz.label_statistic = match value {
                    "llr" => LabelStatistic::LogLikelihood,
                    "chi2" => LabelStatistic::ChiSquared,
                    _ => return Err(bad()),
                }
            }
            "text.synonyms" => {
                if value.is_empty() {
                    return Err(bad());
                }
                self.synonyms_path = Some(PathBuf::from(value));
            }
            _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.into()));
        if self.bm25.k1 < 0.0 || !(0.0..=1.0).contains(&self.bm25.b) || self.bm25.title_weight < 0.0 {
            return invalid("bm25.k1 must be >= 0, bm25.b in [0, 1], score.title_weight >= 0");
        }
        if !(0.0..=1.0).contains(&self.score.blend) {
            return invalid("score.blend must be in [0, 1]");
        }
        self.readers.validate().map_err(ConfigError::Invalid)?;
        if self.soo.cap < 1 {
            return invalid("soo.cap must be at least 1");
        }
        if self.netviz.max_nodes < 1 || self.netviz.min_weight < 1 {
            return invalid("netviz.max_nodes and netviz.min_weight must be at least 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = Config::parse("").unwrap();
        assert_eq!(c.soo.cap, 200);
        assert_eq!(c.soo.similar_terms, 25);
        assert_eq!(c.readers, ReaderFilterConfig::default());
        assert_eq!(c.bm25.k1, 1.2);
        assert_eq!(c.netviz.max_nodes, 100);
    }

    #[test]
    fn every_key_is_accepted() {
        let values = [
            "1.5", "0.5", "3", "0.2", "0.3", "0.4", "30", "2", "50", "10", "5", "20", "2", "4", "chi2", "syn.txt",
        ];
        let text: String = KEYS.iter().zip(values).map(|(k, v)| format!("{k} = {v}\n")).collect();
        let c = Config::parse(&format!("# comment\n\n{text}")).unwrap();
        assert_eq!(c.readers.min_docs, 2);
        assert_eq!(c.soo.cap, 10);
        assert_eq!(c.netviz.label_statistic, LabelStatistic::ChiSquared);
        assert_eq!(c.synonyms_path.as_deref(), Some(Path::new("syn.txt")));
    }

    #[test]
    fn errors() {
        assert!(matches!(Config::parse("x"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(
            Config::parse("\nfoo=1"),
            Err(ConfigError::UnknownKey { line: 2, .. })
        ));
        assert!(matches!(Config::parse("soo.cap=-1"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(
            Config::parse("bm25.k1=NaN"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            Config::parse("trending.min_docs=9\ntrending.max_docs=3"),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn load_resolves_synonyms_relative_to_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("syn.txt"), "nh3=ammonia\n").unwrap();
        std::fs::write(dir.path().join("engine.conf"), "text.synonyms=syn.txt\n").unwrap();
        let c = Config::load(&dir.path().join("engine.conf")).unwrap();
        assert_eq!(c.synonyms.canonical("nh3"), "ammonia");
        assert!(Config::load(&dir.path().join("missing.conf")).is_err());
    }
}
