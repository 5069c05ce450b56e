use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Operators taking a query (or, for `similar`, raw text) argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Useful,
    Reviews,
    Trending,
    Similar,
    References,
    Citations,
}

impl OpKind {
    pub const ALL: [OpKind; 6] = [
        OpKind::Useful,
        OpKind::Reviews,
        OpKind::Trending,
        OpKind::Similar,
        OpKind::References,
        OpKind::Citations,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Useful => "useful",
            OpKind::Reviews => "reviews",
            OpKind::Trending => "trending",
            OpKind::Similar => "similar",
            OpKind::References => "references",
            OpKind::Citations => "citations",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        OpKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// True for the four second-order operators, which cap their input.
    pub fn is_second_order(self) -> bool {
        !matches!(self, OpKind::References | OpKind::Citations)
    }
}

/// Value-carrying fields. `year`, `entdate` and `docs` have their own nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldName {
    Author,
    Bibcode,
    Bibstem,
    Full,
    Abs,
    Title,
    Keyword,
    Inst,
    Property,
    Collection,
    Orcid,
}

impl FieldName {
    pub const ALL: [FieldName; 11] = [
        FieldName::Author,
        FieldName::Bibcode,
        FieldName::Bibstem,
        FieldName::Full,
        FieldName::Abs,
        FieldName::Title,
        FieldName::Keyword,
        FieldName::Inst,
        FieldName::Property,
        FieldName::Collection,
        FieldName::Orcid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FieldName::Author => "author",
            FieldName::Bibcode => "bibcode",
            FieldName::Bibstem => "bibstem",
            FieldName::Full => "full",
            FieldName::Abs => "abs",
            FieldName::Title => "title",
            FieldName::Keyword => "keyword",
            FieldName::Inst => "inst",
            FieldName::Property => "property",
            FieldName::Collection => "collection",
            FieldName::Orcid => "orcid",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        FieldName::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Fields whose value is matched as text against the inverted index.
    pub fn is_text(self) -> bool {
        matches!(
            self,
            FieldName::Full | FieldName::Abs | FieldName::Title | FieldName::Keyword
        )
    }
}

/// One end of an `entdate:[X TO Y]` range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DateBound {
    Date(NaiveDate),
    /// `NOW-nDAYS`; `NOW` is `NowMinusDays(0)`.
    NowMinusDays(u32),
    /// `*`
    Open,
}

impl DateBound {
    pub fn resolve(self, now: NaiveDate) -> Option<NaiveDate> {
        match self {
            DateBound::Date(d) => Some(d),
            DateBound::NowMinusDays(n) => now.checked_sub_days(chrono::Days::new(n as u64)),
            DateBound::Open => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortKey {
    Score,
    CitationCount,
    ReadCount,
    Date,
    FirstAuthor,
}

impl SortKey {
    pub const ALL: [SortKey; 5] = [
        SortKey::Score,
        SortKey::CitationCount,
        SortKey::ReadCount,
        SortKey::Date,
        SortKey::FirstAuthor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SortKey::Score => "score",
            SortKey::CitationCount => "citation_count",
            SortKey::ReadCount => "read_count",
            SortKey::Date => "date",
            SortKey::FirstAuthor => "first_author",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        SortKey::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Asc,
    Desc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SortSpec {
    pub key: SortKey,
    pub direction: Direction,
}

impl SortSpec {
    pub const SCORE_DESC: SortSpec = SortSpec {
        key: SortKey::Score,
        direction: Direction::Desc,
    };
    pub const CITATIONS_DESC: SortSpec = SortSpec {
        key: SortKey::CitationCount,
        direction: Direction::Desc,
    };

    pub fn new(key: SortKey, direction: Direction) -> Self {
        SortSpec { key, direction }
    }
}

impl fmt::Display for SortSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Asc => "asc",
            Direction::Desc => "desc",
        };
        write!(f, "{} {dir}", self.key.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OpArg {
    Query(Box<QueryAst>),
    /// `similar("text", input)`
    RawText(String),
}

/// Parse tree of a query.
///
/// `And`/`Or` always hold at least two children, `TopN::n` lies in
/// `1..=1000` and only `similar` may carry [`OpArg::RawText`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QueryAst {
    Term(String),
    Phrase(String),
    Field {
        name: FieldName,
        value: String,
        anchored: bool,
    },
    YearRange(i32, i32),
    DateRange(DateBound, DateBound),
    And(Vec<QueryAst>),
    Or(Vec<QueryAst>),
    Not(Box<QueryAst>),
    OpCall {
        kind: OpKind,
        arg: OpArg,
    },
    TopN {
        n: u32,
        child: Box<QueryAst>,
        sort: SortSpec,
    },
    Docs(String),
}

pub const TOPN_MAX: u32 = 1000;

impl QueryAst {
    /// Nodes that produce a ranked list rather than a document predicate.
    pub fn is_list(&self) -> bool {
        match self {
            QueryAst::OpCall { .. } | QueryAst::TopN { .. } | QueryAst::Docs(_) => true,
            QueryAst::And(c) | QueryAst::Or(c) => c.iter().any(QueryAst::is_list),
            QueryAst::Not(c) => c.is_list(),
            _ => false,
        }
    }

    pub fn op(kind: OpKind, child: QueryAst) -> Self {
        QueryAst::OpCall {
            kind,
            arg: OpArg::Query(Box::new(child)),
        }
    }

    pub fn negate(child: QueryAst) -> Self {
        QueryAst::Not(Box::new(child))
    }

    pub fn field(name: FieldName, value: impl Into<String>) -> Self {
        QueryAst::Field {
            name,
            value: value.into(),
            anchored: false,
        }
    }
}
