//! A reader and writer for the dense subset of ARFF used by ASlib.
//!
//! Supported: `%` comment lines, `@relation`, `@attribute NAME TYPE` with
//! `NUMERIC`, `REAL`, `INTEGER`, `STRING` or a `{nominal,set}`, then `@data`
//! followed by comma-separated rows. Keywords are case-insensitive and `?`
//! marks a missing cell. Sparse rows and date attributes are rejected.

use std::fmt::{self, Write as _};
use std::io::BufRead;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttributeType {
    Numeric,
    Real,
    Integer,
    String,
    Nominal(Vec<String>),
}

impl AttributeType {
    pub fn is_numeric(&self) -> bool {
        matches!(self, Self::Numeric | Self::Real | Self::Integer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeType,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    /// A `STRING` cell or a validated nominal label.
    Text(String),
    Missing,
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArffRelation {
    pub name: String,
    pub attributes: Vec<Attribute>,
    pub rows: Vec<Vec<Value>>,
}

impl ArffRelation {
    /// Position of the attribute called `name`, compared case-insensitively.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.attributes
            .iter()
            .position(|a| a.name.eq_ignore_ascii_case(name))
    }
}

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedArff {
        line,
        reason: reason.into(),
    }
}

/// One comma-separated field. `quoted` distinguishes `'?'` from `?`.
#[derive(Debug)]
struct Token {
    text: String,
    quoted: bool,
}

fn split_fields(s: &str, line: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let mut tok = Token {
            text: String::new(),
            quoted: false,
        };
        match chars.peek().copied() {
            Some(q @ ('\'' | '"')) => {
                chars.next();
                tok.quoted = true;
                let mut closed = false;
                while let Some(c) = chars.next() {
                    match c {
                        '\\' => match chars.next() {
                            Some(e) => tok.text.push(e),
                            None => return Err(malformed(line, "dangling escape")),
                        },
                        c if c == q => {
                            closed = true;
                            break;
                        }
                        c => tok.text.push(c),
                    }
                }
                if !closed {
                    return Err(malformed(line, "unterminated quoted value"));
                }
                while chars.peek().is_some_and(|c| c.is_whitespace()) {
                    chars.next();
                }
                match chars.peek() {
                    None | Some(',') => {}
                    Some(c) => {
                        return Err(malformed(
                            line,
                            format!("unexpected `{c}` after quoted value"),
                        ))
                    }
                }
            }
            _ => {
                while let Some(&c) = chars.peek() {
                    if c == ',' {
                        break;
                    }
                    tok.text.push(c);
                    chars.next();
                }
                let trimmed = tok.text.trim_end().len();
                tok.text.truncate(trimmed);
            }
        }
        out.push(tok);
        match chars.next() {
            Some(',') => continue,
            None => break,
            Some(_) => unreachable!("field scanners stop at a comma or end of input"),
        }
    }
    Ok(out)
}

/// Splits off the first whitespace-delimited (possibly quoted) word.
fn take_word(s: &str, line: usize) -> Result<(String, &str)> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    match chars.next() {
        None => Err(malformed(line, "expected a name")),
        Some((_, q @ ('\'' | '"'))) => {
            let mut name = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    name.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((name, &s[i + c.len_utf8()..]));
                } else {
                    name.push(c);
                }
            }
            Err(malformed(line, "unterminated quoted name"))
        }
        Some(_) => {
            let end = s
                .find(|c: char| c.is_whitespace() || c == '{')
                .unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
    }
}

fn parse_type(spec: &str, line: usize) -> Result<AttributeType> {
    let spec = spec.trim();
    if let Some(inner) = spec.strip_prefix('{') {
        let inner = inner
            .strip_suffix('}')
            .ok_or_else(|| malformed(line, "unterminated nominal set"))?;
        let values: Vec<String> = split_fields(inner, line)?
            .into_iter()
            .map(|t| t.text)
            .collect();
        if values.iter().any(String::is_empty) {
            return Err(malformed(line, "empty nominal value"));
        }
        return Ok(AttributeType::Nominal(values));
    }
    match spec.to_ascii_lowercase().as_str() {
        "numeric" => Ok(AttributeType::Numeric),
        "real" => Ok(AttributeType::Real),
        "integer" => Ok(AttributeType::Integer),
        "string" => Ok(AttributeType::String),
        other => Err(malformed(line, format!("unknown attribute type `{other}`"))),
    }
}

fn parse_cell(tok: Token, attr: &Attribute, line: usize) -> Result<Value> {
    if !tok.quoted && tok.text == "?" {
        return Ok(Value::Missing);
    }
    match &attr.kind {
        AttributeType::String => Ok(Value::Text(tok.text)),
        AttributeType::Nominal(allowed) => {
            if allowed.contains(&tok.text) {
                Ok(Value::Text(tok.text))
            } else {
                Err(malformed(
                    line,
                    format!("value `{}` not in nominal set of `{}`", tok.text, attr.name),
                ))
            }
        }
        kind => {
            let x: f64 = tok.text.parse().map_err(|_| {
                malformed(
                    line,
                    format!(
                        "cannot parse `{}` as a number for `{}`",
                        tok.text, attr.name
                    ),
                )
            })?;
            if !x.is_finite() {
                return Err(malformed(line, format!("non-finite number `{}`", tok.text)));
            }
            if *kind == AttributeType::Integer && x.fract() != 0.0 {
                return Err(malformed(
                    line,
                    format!("`{}` is not an integer for `{}`", tok.text, attr.name),
                ));
            }
            Ok(Value::Number(x))
        }
    }
}

/// Parses an ARFF document from any buffered reader.
pub fn parse_arff<R: BufRead>(reader: R) -> Result<ArffRelation> {
    let mut name: Option<String> = None;
    let mut attributes = Vec::new();
    let mut rows = Vec::new();
    let mut in_data = false;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| malformed(lineno, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if in_data {
            if trimmed.starts_with('{') {
                return Err(malformed(lineno, "sparse rows are not supported"));
            }
            let fields = split_fields(trimmed, lineno)?;
            if fields.len() != attributes.len() {
                return Err(malformed(
                    lineno,
                    format!(
                        "row has {} values but {} attributes are declared",
                        fields.len(),
                        attributes.len()
                    ),
                ));
            }
            let row = fields
                .into_iter()
                .zip(&attributes)
                .map(|(tok, attr)| parse_cell(tok, attr, lineno))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
            continue;
        }

        let Some(rest) = trimmed.strip_prefix('@') else {
            return Err(malformed(lineno, "expected a header directive"));
        };
        let keyword_end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let (keyword, body) = rest.split_at(keyword_end);
        match keyword.to_ascii_lowercase().as_str() {
            "relation" => {
                if name.is_some() {
                    return Err(malformed(lineno, "duplicate @relation"));
                }
                let (n, _) = take_word(body, lineno)?;
                name = Some(n);
            }
            "attribute" => {
                if name.is_none() {
                    return Err(malformed(lineno, "@attribute before @relation"));
                }
                let (attr_name, type_spec) = take_word(body, lineno)?;
                let kind = parse_type(type_spec, lineno)?;
                attributes.push(Attribute {
                    name: attr_name,
                    kind,
                });
            }
            "data" => {
                if attributes.is_empty() {
                    return Err(malformed(lineno, "@data before any @attribute"));
                }
                in_data = true;
            }
            other => return Err(malformed(lineno, format!("unknown directive `@{other}`"))),
        }
    }

    if !in_data {
        return Err(malformed(0, "missing @data section"));
    }
    Ok(ArffRelation {
        name: name.unwrap_or_default(),
        attributes,
        rows,
    })
}

pub fn parse_arff_str(text: &str) -> Result<ArffRelation> {
    parse_arff(text.as_bytes())
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty()
        || s == "?"
        || s.starts_with('%')
        || s.chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '\'' | '"' | '\\' | '{' | '}' | '%'))
}

struct Quoted<'a>(&'a str);

impl fmt::Display for Quoted<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !needs_quotes(self.0) {
            return f.write_str(self.0);
        }
        f.write_char('\'')?;
        for c in self.0.chars() {
            if c == '\'' || c == '\\' {
                f.write_char('\\')?;
            }
            f.write_char(c)?;
        }
        f.write_char('\'')
    }
}

impl fmt::Display for ArffRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "@RELATION {}", Quoted(&self.name))?;
        writeln!(f)?;
        for attr in &self.attributes {
            write!(f, "@ATTRIBUTE {} ", Quoted(&attr.name))?;
            match &attr.kind {
                AttributeType::Numeric => f.write_str("NUMERIC")?,
                AttributeType::Real => f.write_str("REAL")?,
                AttributeType::Integer => f.write_str("INTEGER")?,
                AttributeType::String => f.write_str("STRING")?,
                AttributeType::Nominal(values) => {
                    f.write_char('{')?;
                    for (i, v) in values.iter().enumerate() {
                        if i > 0 {
                            f.write_char(',')?;
                        }
                        write!(f, "{}", Quoted(v))?;
                    }
                    f.write_char('}')?;
                }
            }
            writeln!(f)?;
        }
        writeln!(f)?;
        writeln!(f, "@DATA")?;
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                match v {
                    Value::Missing => f.write_char('?')?,
                    Value::Number(x) => write!(f, "{x}")?,
                    Value::Text(s) => write!(f, "{}", Quoted(s))?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
