use std::collections::BTreeMap;

use super::{BenchAst, Keyword, ParamType, ParseError, ParseErrorKind, Side, Stage, Value};
use crate::angle::parse_angle;

struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// Whitespace-separated tokens with 1-based character columns, up to `#`.
fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut end_byte = line.len();
    for (col0, (byte, ch)) in line.char_indices().enumerate() {
        if ch == '#' {
            end_byte = byte;
            break;
        }
        match (ch.is_whitespace(), start) {
            (true, Some((b, c))) => {
                out.push(Token {
                    text: &line[b..byte],
                    column: c,
                });
                start = None;
            }
            (false, None) => start = Some((byte, col0 + 1)),
            _ => {}
        }
    }
    if let Some((b, c)) = start {
        out.push(Token {
            text: &line[b..end_byte],
            column: c,
        });
    }
    out
}

fn err(line: usize, column: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        kind,
        message: message.into(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_value(ty: ParamType, text: &str, line: usize, column: usize) -> Result<Value, ParseError> {
    match ty {
        ParamType::Angle => parse_angle(text)
            .map(Value::Number)
            .map_err(|e| err(line, column, ParseErrorKind::BadNumber, e.to_string())),
        ParamType::Number => match text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Value::Number(x)),
            _ => Err(err(
                line,
                column,
                ParseErrorKind::BadNumber,
                format!("{text:?} is not a number"),
            )),
        },
        ParamType::Ident if is_ident(text) => Ok(Value::Ident(text.to_string())),
        ParamType::Ident => Err(err(
            line,
            column,
            ParseErrorKind::InvalidToken,
            format!("{text:?} is not an identifier"),
        )),
    }
}

fn parse_stage(toks: &[Token<'_>], line: usize) -> Result<Stage, ParseError> {
    let head = &toks[0];
    let keyword = Keyword::from_name(head.text).ok_or_else(|| {
        err(
            line,
            head.column,
            ParseErrorKind::UnknownKeyword,
            format!("unknown stage {:?}", head.text),
        )
    })?;
    let mut rest = &toks[1..];
    let (variants, variant_required) = keyword.variants();
    let mut variant = variants.first().map(|v| v.to_string());
    if let Some(t) = rest.first().filter(|t| !t.text.contains('=')) {
        if variants.is_empty() {
            return Err(err(
                line,
                t.column,
                ParseErrorKind::InvalidToken,
                format!("{keyword} takes no variant, found {:?}", t.text),
            ));
        }
        if !variants.contains(&t.text) {
            return Err(err(
                line,
                t.column,
                ParseErrorKind::UnknownKeyword,
                format!("unknown {keyword} variant {:?}", t.text),
            ));
        }
        variant = Some(t.text.to_string());
        rest = &rest[1..];
    } else if variant_required {
        return Err(err(
            line,
            head.column,
            ParseErrorKind::MissingParam,
            format!("{keyword} needs a variant ({})", variants.join("|")),
        ));
    }

    let mut params = BTreeMap::new();
    let mut side = None;
    for t in rest {
        let Some((name, value)) = t.text.split_once('=') else {
            return Err(err(
                line,
                t.column,
                ParseErrorKind::InvalidToken,
                format!("expected key=value, found {:?}", t.text),
            ));
        };
        if name.is_empty() || value.is_empty() {
            return Err(err(
                line,
                t.column,
                ParseErrorKind::InvalidToken,
                format!("malformed parameter {:?}", t.text),
            ));
        }
        let value_col = t.column + name.chars().count() + 1;
        let duplicate = || {
            err(
                line,
                t.column,
                ParseErrorKind::DuplicateParam,
                format!("{name} given twice"),
            )
        };
        if name == "side" {
            if side.is_some() {
                return Err(duplicate());
            }
            side = Some(Side::from_name(value).ok_or_else(|| {
                err(
                    line,
                    value_col,
                    ParseErrorKind::UnknownKeyword,
                    format!("unknown side {value:?} (alice|bob|both)"),
                )
            })?);
            continue;
        }
        let ty = keyword.param_type(name).ok_or_else(|| {
            err(
                line,
                t.column,
                ParseErrorKind::UnknownKeyword,
                format!("{keyword} has no parameter {name:?}"),
            )
        })?;
        if params.contains_key(name) {
            return Err(duplicate());
        }
        params.insert(name.to_string(), parse_value(ty, value, line, value_col)?);
    }
    if let Some(p) = keyword
        .params()
        .iter()
        .find(|p| p.required && !params.contains_key(p.name))
    {
        return Err(err(
            line,
            head.column,
            ParseErrorKind::MissingParam,
            format!("{keyword} needs {}=", p.name),
        ));
    }
    Ok(Stage {
        keyword,
        variant,
        params,
        side: side.unwrap_or(keyword.default_side()),
        line,
    })
}

/// Parses bench text; stops at the first error.
pub fn parse(text: &str) -> Result<BenchAst, ParseError> {
    let mut stages: Vec<(Stage, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        let column = toks[0].column;
        stages.push((parse_stage(&toks, i + 1)?, column));
    }

    let Some((first, first_col)) = stages.first() else {
        return Err(err(1, 1, ParseErrorKind::MissingParam, "no source stage"));
    };
    let sources: Vec<_> = stages.iter().filter(|(s, _)| s.keyword == Keyword::Source).collect();
    match sources.as_slice() {
        [] => {
            return Err(err(
                first.line,
                *first_col,
                ParseErrorKind::MissingParam,
                "no source stage",
            ))
        }
        [(s, c), ..] if first.keyword != Keyword::Source => {
            return Err(err(
                s.line,
                *c,
                ParseErrorKind::MisplacedStage,
                "source must be the first stage",
            ));
        }
        [_, (s, c), ..] => return Err(err(s.line, *c, ParseErrorKind::MisplacedStage, "second source stage")),
        _ => {}
    }
    if let Some((s, c)) = stages.iter().filter(|(s, _)| s.keyword == Keyword::Herald).nth(1) {
        return Err(err(s.line, *c, ParseErrorKind::MisplacedStage, "second herald stage"));
    }
    Ok(BenchAst {
        stages: stages.into_iter().map(|(s, _)| s).collect(),
    })
}
