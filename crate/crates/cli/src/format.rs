//! The problem file: TOML sections describing one groupoid, one cocycle and
//! any number of named elements.
//!
//! ```toml
//! [groupoid]
//! kind = "transformation"
//!
//! [group]
//! kind = "free"
//! generators = ["a", "b"]
//!
//! [space]
//! points = ["pt"]
//!
//! [cocycle]
//! kind = "trivial"
//!
//! [[element.f.terms]]
//! word = "a b^-1"
//! re = 1.0
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::Spanned;

/// A number or a string holding a phase, fraction or decimal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Float(x) => write!(f, "{x}"),
            Scalar::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub groupoid: Spanned<GroupoidSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Spanned<GroupSection>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Spanned<SpaceSection>>,
    /// Generator (free kinds) or element (finite groups) to the images of the
    /// points, in point order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Spanned<BTreeMap<String, Vec<Spanned<String>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<Spanned<CocycleSection>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub element: BTreeMap<String, Spanned<ElementSection>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<Spanned<RunSection>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidSection {
    /// `transformation` or `table`.
    pub kind: Spanned<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Vec<Spanned<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrows: Option<Vec<Spanned<ArrowDecl>>>,
    /// Triples `[a, b, c]` meaning `a b = c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub products: Option<Vec<Spanned<Vec<String>>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDecl {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    /// `free`, `free-abelian` or `finite`.
    pub kind: Spanned<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Spanned<String>>>,
    /// `cyclic N`, `klein` or `s3`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<Spanned<String>>>,
    /// Multiplication table by element name, rows indexed by the left factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<Spanned<String>>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub points: Vec<Spanned<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleSection {
    /// `trivial`, `table`, `bilinear` or `coboundary`.
    pub kind: Spanned<String>,
    /// Group cocycle values indexed by element order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Vec<Spanned<Scalar>>>>,
    /// Values on named pairs of table-groupoid arrows; unlisted pairs are 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Spanned<EntryDecl>>>,
    /// `σ(m, n) = exp(2πi mᵀΘn)` on a free abelian group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<Vec<Spanned<Scalar>>>>,
    /// The function whose coboundary is taken, by arrow or element name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<BTreeMap<String, Spanned<Scalar>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDecl {
    pub a: String,
    pub b: String,
    pub phase: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSection {
    #[serde(default)]
    pub terms: Vec<Spanned<TermDecl>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDecl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrow: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_power: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<u32>,
}

/// A message attached to a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// Maps byte offsets to line and column numbers.
pub struct Positions<'a> {
    text: &'a str,
}

impl<'a> Positions<'a> {
    pub fn new(text: &'a str) -> Self {
        Positions { text }
    }

    pub fn at(&self, span: Range<usize>, message: impl Into<String>) -> Diagnostic {
        let start = span.start.min(self.text.len());
        let before = &self.text[..start];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Diagnostic { line, column, message: message.into() }
    }
}

/// Parses the TOML layer only; semantic checks happen in [`crate::problem`].
pub fn parse_document(text: &str) -> Result<Document, Vec<Diagnostic>> {
    toml::from_str(text).map_err(|e| {
        let pos = Positions::new(text);
        vec![pos.at(e.span().unwrap_or(0..0), e.message().to_string())]
    })
}

pub fn to_toml(doc: &Document) -> String {
    toml::to_string(doc).expect("documents always serialize")
}
