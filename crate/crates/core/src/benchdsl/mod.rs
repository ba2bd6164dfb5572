//! Line-oriented bench description language.
//!
//! ```text
//! # comment
//! source spdc
//! filter smf side=bob
//! qplate q=1 alpha0=0 side=bob
//! herald basis=H side=alice
//! analyzer scheme=interferometer
//! ```
//!
//! One stage per line: a keyword, an optional variant, then `key=value`
//! parameters. Angle parameters accept radians, `22.5deg` and `pi/2` forms
//! and are stored in radians. Every stage has a side (`alice`, `bob`,
//! `both`); omitted sides take the keyword's default.

mod compile;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compile::{compile, Bench, PipelineStep, SemanticError, Warning};
pub use parse::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Keyword {
    Source,
    Filter,
    QPlate,
    Qwp,
    Hwp,
    Herald,
    Analyzer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ParamType {
    Angle,
    Number,
    Ident,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ParamSpec {
    pub name: &'static str,
    pub ty: ParamType,
    pub required: bool,
}

const fn param(name: &'static str, ty: ParamType, required: bool) -> ParamSpec {
    ParamSpec { name, ty, required }
}

impl Keyword {
    pub const ALL: [Keyword; 7] = [
        Keyword::Source,
        Keyword::Filter,
        Keyword::QPlate,
        Keyword::Qwp,
        Keyword::Hwp,
        Keyword::Herald,
        Keyword::Analyzer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Source => "source",
            Keyword::Filter => "filter",
            Keyword::QPlate => "qplate",
            Keyword::Qwp => "qwp",
            Keyword::Hwp => "hwp",
            Keyword::Herald => "herald",
            Keyword::Analyzer => "analyzer",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn default_side(self) -> Side {
        match self {
            Keyword::Source => Side::Both,
            Keyword::Herald => Side::Alice,
            _ => Side::Bob,
        }
    }

    /// Accepted variants and whether one must be given. The first is the default.
    pub(crate) fn variants(self) -> (&'static [&'static str], bool) {
        match self {
            Keyword::Source => (&["spdc"], false),
            Keyword::Filter => (&["smf"], true),
            _ => (&[], false),
        }
    }

    pub(crate) fn params(self) -> &'static [ParamSpec] {
        use ParamType::*;
        const SOURCE: &[ParamSpec] = &[param("m_max", Number, false)];
        const QPLATE: &[ParamSpec] = &[param("q", Number, true), param("alpha0", Angle, false)];
        const WAVEPLATE: &[ParamSpec] = &[param("angle", Angle, true)];
        const HERALD: &[ParamSpec] = &[param("basis", Ident, false)];
        const ANALYZER: &[ParamSpec] = &[param("scheme", Ident, false)];
        match self {
            Keyword::Source => SOURCE,
            Keyword::Filter => &[],
            Keyword::QPlate => QPLATE,
            Keyword::Qwp | Keyword::Hwp => WAVEPLATE,
            Keyword::Herald => HERALD,
            Keyword::Analyzer => ANALYZER,
        }
    }

    pub(crate) fn param_type(self, name: &str) -> Option<ParamType> {
        self.params().iter().find(|p| p.name == name).map(|p| p.ty)
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Alice,
    Bob,
    Both,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Alice => "alice",
            Side::Bob => "bob",
            Side::Both => "both",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Side::Alice, Side::Bob, Side::Both]
            .into_iter()
            .find(|x| x.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Number(f64),
    Ident(String),
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            Value::Ident(_) => None,
        }
    }

    pub fn as_ident(&self) -> Option<&str> {
        match self {
            Value::Ident(s) => Some(s),
            Value::Number(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub keyword: Keyword,
    pub variant: Option<String>,
    pub params: BTreeMap<String, Value>,
    pub side: Side,
    /// 1-based source line; 0 for stages built in code.
    pub line: usize,
}

impl Stage {
    pub fn new(keyword: Keyword) -> Self {
        let variant = match keyword.variants() {
            (v, _) if !v.is_empty() => Some(v[0].to_string()),
            _ => None,
        };
        Stage {
            keyword,
            variant,
            params: BTreeMap::new(),
            side: keyword.default_side(),
            line: 0,
        }
    }

    pub fn with(mut self, name: &str, value: Value) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn on(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn number(&self, name: &str) -> Option<f64> {
        self.params.get(name).and_then(Value::as_number)
    }

    pub fn ident(&self, name: &str) -> Option<&str> {
        self.params.get(name).and_then(Value::as_ident)
    }

    /// Equal up to source positions.
    pub fn structurally_eq(&self, other: &Stage) -> bool {
        self.keyword == other.keyword
            && self.variant == other.variant
            && self.params == other.params
            && self.side == other.side
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchAst {
    pub stages: Vec<Stage>,
}

impl BenchAst {
    pub fn structurally_eq(&self, other: &BenchAst) -> bool {
        self.stages.len() == other.stages.len()
            && self.stages.iter().zip(&other.stages).all(|(a, b)| a.structurally_eq(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParseErrorKind {
    UnknownKeyword,
    BadNumber,
    DuplicateParam,
    MissingParam,
    MisplacedStage,
    /// Lexically malformed token, e.g. `=5` or a stray word.
    InvalidToken,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::UnknownKeyword => "unknown-keyword",
            ParseErrorKind::BadNumber => "bad-number",
            ParseErrorKind::DuplicateParam => "duplicate-param",
            ParseErrorKind::MissingParam => "missing-param",
            ParseErrorKind::MisplacedStage => "misplaced-stage",
            ParseErrorKind::InvalidToken => "invalid-token",
        })
    }
}

/// Positions are 1-based; columns count characters.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("line {line}, column {column}: {kind}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

fn write_value(out: &mut String, ty: Option<ParamType>, v: &Value) {
    use std::fmt::Write;
    match (ty, v) {
        (Some(ParamType::Angle), Value::Number(x)) => write!(out, "{x:.16e}"),
        (_, Value::Number(x)) => write!(out, "{x:?}"),
        (_, Value::Ident(s)) => write!(out, "{s}"),
    }
    .expect("writing to a String");
}

/// Canonical text: one stage per line, parameters sorted, side explicit,
/// angles in radians with 17 significant digits. Comments are not kept.
pub fn serialize(ast: &BenchAst) -> String {
    let mut out = String::new();
    for st in &ast.stages {
        out.push_str(st.keyword.as_str());
        if let Some(v) = &st.variant {
            out.push(' ');
            out.push_str(v);
        }
        for (name, value) in &st.params {
            out.push(' ');
            out.push_str(name);
            out.push('=');
            write_value(&mut out, st.keyword.param_type(name), value);
        }
        out.push_str(" side=");
        out.push_str(st.side.as_str());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

/// Parses and compiles in one step.
pub fn load(text: &str) -> Result<Bench, BenchError> {
    Ok(compile(&parse(text)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn angle_value() -> impl Strategy<Value = Value> {
        (-20.0..20.0f64).prop_map(Value::Number)
    }

    fn stage() -> impl Strategy<Value = Stage> {
        let side = prop_oneof![Just(Side::Alice), Just(Side::Bob), Just(Side::Both)];
        let body = prop_oneof![
            Just(Stage::new(Keyword::Filter)),
            ((-8i32..8), proptest::option::of(angle_value())).prop_map(|(q2, a0)| {
                let s = Stage::new(Keyword::QPlate).with("q", Value::Number(f64::from(q2) / 2.0));
                match a0 {
                    Some(a) => s.with("alpha0", a),
                    None => s,
                }
            }),
            angle_value().prop_map(|a| Stage::new(Keyword::Qwp).with("angle", a)),
            angle_value().prop_map(|a| Stage::new(Keyword::Hwp).with("angle", a)),
            prop_oneof![Just("projector"), Just("interferometer")]
                .prop_map(|s| Stage::new(Keyword::Analyzer).with("scheme", Value::Ident(s.into()))),
        ];
        (body, side).prop_map(|(s, side)| s.on(side))
    }

    fn bench() -> impl Strategy<Value = BenchAst> {
        (
            proptest::option::of(0u32..9),
            proptest::collection::vec(stage(), 0..6),
            proptest::option::of(prop_oneof![Just("H"), Just("V"), Just("L"), Just("R")]),
            proptest::collection::vec(stage(), 0..3),
        )
            .prop_map(|(m_max, pre, herald, post)| {
                let mut source = Stage::new(Keyword::Source);
                if let Some(m) = m_max {
                    source = source.with("m_max", Value::Number(f64::from(m)));
                }
                let mut stages = vec![source];
                stages.extend(pre);
                if let Some(b) = herald {
                    stages.push(Stage::new(Keyword::Herald).with("basis", Value::Ident(b.into())));
                }
                stages.extend(post);
                BenchAst { stages }
            })
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(ast in bench()) {
            let text = serialize(&ast);
            let back = parse(&text).unwrap();
            prop_assert!(back.structurally_eq(&ast), "{text}");
            prop_assert_eq!(serialize(&back), text);
        }
    }

    #[test]
    fn angle_serialization_is_exact() {
        let x = 0.1 + 0.2;
        let ast = BenchAst {
            stages: vec![
                Stage::new(Keyword::Source),
                Stage::new(Keyword::Qwp).with("angle", Value::Number(x)),
            ],
        };
        let text = serialize(&ast);
        assert!(text.contains("angle=3.0000000000000004e-1"), "{text}");
        assert_eq!(parse(&text).unwrap().stages[1].number("angle"), Some(x));
    }

    #[test]
    fn comments_are_dropped() {
        let ast = parse("# bench\nsource spdc # twin photons\n").unwrap();
        assert_eq!(serialize(&ast), "source spdc side=both\n");
    }
}
