//! Tokenization, the inverted index, BM25 and the composite score.

mod index;
pub mod score;
mod search;
mod tokenize;

pub use index::{idf, Bm25Params, FieldMask, PostingEntry, PostingList, TextIndex};
pub use score::{collation, normalize_by_max, queryless, Score, ScoreComponents, ScoreParams};
pub use search::{fold_author_query, fold_name, positive_terms, FieldSearch, MetadataIndex, SearchError};
pub use tokenize::{Field, SynonymError, SynonymTable, Token, Tokenizer};
