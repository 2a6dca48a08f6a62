use super::ast::Span;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Kw(&'static str),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Kw(k) | Tok::Punct(k) => format!("`{k}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// Text of the `//` comment line directly preceding this token, if any.
    pub leading_comment: Option<String>,
}

const KEYWORDS: &[&str] = &[
    "fn", "var", "if", "else", "while", "return", "true", "false", "null", "dispatch", "case",
    "default",
];

// Longest first so that `<=` wins over `<`.
const PUNCTS: &[&str] = &[
    "==", "!=", "<=", ">=", "&&", "||", "(", ")", "{", "}", ",", ";", "=", "+", "-", "*", "/", "%",
    "<", ">", "!",
];

pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut pending_comment: Option<String> = None;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            let end = text[i..].find('\n').map_or(bytes.len(), |n| i + n);
            pending_comment = Some(text[i + 2..end].trim().to_string());
            i = end;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let digits = &text[start..i];
            let value = digits.parse::<i64>().map_err(|_| {
                SyntaxError::at(
                    text,
                    start,
                    format!("integer literal `{digits}` out of range"),
                )
            })?;
            Tok::Int(value)
        } else if c == b'"' {
            i += 1;
            let mut s = String::new();
            loop {
                let Some(ch) = text[i..].chars().next() else {
                    return Err(SyntaxError::at(text, start, "unterminated string literal"));
                };
                i += ch.len_utf8();
                match ch {
                    '"' => break,
                    '\n' => {
                        return Err(SyntaxError::at(text, start, "unterminated string literal"))
                    }
                    '\\' => {
                        let Some(esc) = text[i..].chars().next() else {
                            return Err(SyntaxError::at(
                                text,
                                start,
                                "unterminated string literal",
                            ));
                        };
                        i += esc.len_utf8();
                        s.push(match esc {
                            'n' => '\n',
                            't' => '\t',
                            '"' => '"',
                            '\\' => '\\',
                            other => {
                                return Err(SyntaxError::at(
                                    text,
                                    i - other.len_utf8() - 1,
                                    format!("unknown escape `\\{other}`"),
                                ))
                            }
                        });
                    }
                    other => s.push(other),
                }
            }
            Tok::Str(s)
        } else {
            match PUNCTS.iter().find(|p| text[i..].starts_with(**p)) {
                Some(p) => {
                    i += p.len();
                    Tok::Punct(p)
                }
                None => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    return Err(SyntaxError::at(
                        text,
                        start,
                        format!("unexpected character `{ch}`"),
                    ));
                }
            }
        };
        out.push(Token {
            tok,
            span: Span::new(start, i),
            leading_comment: pending_comment.take(),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(bytes.len(), bytes.len()),
        leading_comment: pending_comment.take(),
    });
    Ok(out)
}
