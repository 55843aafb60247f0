//! Readers for the ICCMA'23 `p af` format and the legacy APX format.
//!
//! ICCMA'23:
//!
//! ```text
//! p af 3
//! # comment
//! 1 2
//! 2 3
//! ```
//!
//! APX: `arg(a).` and `att(a,b).` statements, whitespace insensitive. A line
//! may hold several statements.

use std::collections::HashMap;

use super::ArgumentationFramework;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("no `p af <n>` header found")]
    NoHeader,
    #[error("line {line}: attack given before the `p af <n>` header")]
    AttackBeforeHeader { line: usize },
    #[error("line {line}: duplicate `p af` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: malformed header, expected `p af <n>`")]
    BadHeader { line: usize },
    #[error("line {line}: argument count must be at least 1")]
    ZeroArguments { line: usize },
    #[error("line {line}: `{token}` is not an integer")]
    NotAnInteger { line: usize, token: String },
    #[error("line {line}: argument {id} is outside 1..={n}")]
    OutOfRange { line: usize, id: u64, n: usize },
    #[error("line {line}: an attack line needs exactly 2 tokens, found {found}")]
    AttackArity { line: usize, found: usize },
    #[error("line {line}: invalid UTF-8")]
    Utf8 { line: usize },
    #[error("line {line}: argument `{name}` is not declared")]
    Undeclared { line: usize, name: String },
    #[error("line {line}: malformed statement `{text}`")]
    Malformed { line: usize, text: String },
    #[error("no arguments declared")]
    NoArguments,
}

fn lines(input: &[u8]) -> impl Iterator<Item = (usize, &[u8])> {
    input
        .split(|&b| b == b'\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix(b"\r").unwrap_or(l)))
}

fn parse_int(line: usize, token: &str) -> Result<u64, ParseError> {
    token.parse().map_err(|_| ParseError::NotAnInteger {
        line,
        token: token.to_string(),
    })
}

/// Parses an ICCMA'23 `p af` file in one pass over its lines.
pub fn parse_iccma(input: &[u8]) -> Result<ArgumentationFramework, ParseError> {
    let mut n: Option<usize> = None;
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for (line, raw) in lines(input) {
        let text = std::str::from_utf8(raw).map_err(|_| ParseError::Utf8 { line })?;
        let text = text.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if text.starts_with('p') {
            if n.is_some() {
                return Err(ParseError::DuplicateHeader { line });
            }
            let tokens: Vec<&str> = text.split_ascii_whitespace().collect();
            if tokens.len() != 3 || tokens[0] != "p" || tokens[1] != "af" {
                return Err(ParseError::BadHeader { line });
            }
            let count = parse_int(line, tokens[2])? as usize;
            if count == 0 {
                return Err(ParseError::ZeroArguments { line });
            }
            n = Some(count);
            continue;
        }
        let Some(count) = n else {
            return Err(ParseError::AttackBeforeHeader { line });
        };
        let mut tokens = text.split_ascii_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            let found = text.split_ascii_whitespace().count();
            return Err(ParseError::AttackArity { line, found });
        };
        let id = |tok: &str| -> Result<u32, ParseError> {
            let id = parse_int(line, tok)?;
            if id == 0 || id > count as u64 {
                return Err(ParseError::OutOfRange { line, id, n: count });
            }
            Ok(id as u32 - 1)
        };
        let (a, b) = (id(a)?, id(b)?);
        pairs.push((a, b));
    }
    let n = n.ok_or(ParseError::NoHeader)?;
    Ok(ArgumentationFramework::from_checked_pairs(n, pairs))
}

enum Statement<'a> {
    Arg(&'a str),
    Att(&'a str, &'a str),
}

fn statement(text: &str) -> Option<Statement<'_>> {
    let body = text.strip_suffix('.')?;
    let (head, rest) = body.split_once('(')?;
    let inner = rest.strip_suffix(')')?;
    let valid = |s: &str| !s.is_empty() && !s.contains(['(', ')', ',']);
    match head {
        "arg" if valid(inner) => Some(Statement::Arg(inner)),
        "att" => {
            let (x, y) = inner.split_once(',')?;
            (valid(x) && valid(y)).then_some(Statement::Att(x, y))
        }
        _ => None,
    }
}

/// Parses an APX file. Arguments receive ids in order of first declaration;
/// the names are kept for output.
pub fn parse_apx(input: &[u8]) -> Result<ArgumentationFramework, ParseError> {
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut pairs = Vec::new();
    for (line, raw) in lines(input) {
        let text = std::str::from_utf8(raw).map_err(|_| ParseError::Utf8 { line })?;
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact.starts_with('%') {
            continue;
        }
        for stmt in compact.split_inclusive(").") {
            match statement(stmt) {
                Some(Statement::Arg(name)) => {
                    if !ids.contains_key(name) {
                        ids.insert(name.to_string(), names.len() as u32);
                        names.push(name.to_string());
                    }
                }
                Some(Statement::Att(x, y)) => {
                    let lookup = |name: &str| {
                        ids.get(name)
                            .copied()
                            .ok_or_else(|| ParseError::Undeclared {
                                line,
                                name: name.to_string(),
                            })
                    };
                    pairs.push((lookup(x)?, lookup(y)?));
                }
                None => {
                    return Err(ParseError::Malformed {
                        line,
                        text: text.trim().to_string(),
                    })
                }
            }
        }
    }
    if names.is_empty() {
        return Err(ParseError::NoArguments);
    }
    Ok(ArgumentationFramework::from_checked_pairs(names.len(), pairs).with_names(names))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attacks(af: &ArgumentationFramework) -> Vec<(usize, usize)> {
        af.attacks().map(|(a, b)| (a + 1, b + 1)).collect()
    }

    #[test]
    fn apx_statements_may_share_a_line() {
        let af = parse_apx(b"arg(a).arg(b). arg(c).\natt(a,b).att(b,c).\n").unwrap();
        assert_eq!(attacks(&af), vec![(1, 2), (2, 3)]);
        assert!(matches!(
            parse_apx(b"arg(a).arg(b"),
            Err(ParseError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn iccma_examples() {
        let af = parse_iccma(b"p af 3\n1 2\n2 3\n").unwrap();
        assert_eq!(af.num_arguments(), 3);
        assert_eq!(attacks(&af), vec![(1, 2), (2, 3)]);

        let af = parse_iccma(b"p af 1\n").unwrap();
        assert_eq!(af.num_arguments(), 1);
        assert_eq!(af.num_attacks(), 0);

        let af = parse_iccma(b"p af 2\n# c\n1 1\n1 2\n").unwrap();
        assert_eq!(attacks(&af), vec![(1, 1), (1, 2)]);
    }

    #[test]
    fn iccma_tolerates_blank_lines_crlf_and_duplicates() {
        let af = parse_iccma(b"\n# x\r\np af 2\r\n\r\n1 2\r\n1 2\n\n").unwrap();
        assert_eq!(attacks(&af), vec![(1, 2)]);
    }

    #[test]
    fn iccma_errors_carry_line_numbers() {
        assert_eq!(parse_iccma(b"").unwrap_err(), ParseError::NoHeader);
        assert_eq!(parse_iccma(b"# only\n").unwrap_err(), ParseError::NoHeader);
        assert_eq!(
            parse_iccma(b"1 2\np af 2\n").unwrap_err(),
            ParseError::AttackBeforeHeader { line: 1 }
        );
        assert_eq!(
            parse_iccma(b"p af 2\np af 2\n").unwrap_err(),
            ParseError::DuplicateHeader { line: 2 }
        );
        assert_eq!(
            parse_iccma(b"p aba 2\n").unwrap_err(),
            ParseError::BadHeader { line: 1 }
        );
        assert_eq!(
            parse_iccma(b"p af 0\n").unwrap_err(),
            ParseError::ZeroArguments { line: 1 }
        );
        assert_eq!(
            parse_iccma(b"p af 2\n1 x\n").unwrap_err(),
            ParseError::NotAnInteger {
                line: 2,
                token: "x".into()
            }
        );
        assert_eq!(
            parse_iccma(b"p af 2\n\n1 3\n").unwrap_err(),
            ParseError::OutOfRange {
                line: 3,
                id: 3,
                n: 2
            }
        );
        assert_eq!(
            parse_iccma(b"p af 2\n0 1\n").unwrap_err(),
            ParseError::OutOfRange {
                line: 2,
                id: 0,
                n: 2
            }
        );
        assert_eq!(
            parse_iccma(b"p af 2\n1 2 2\n").unwrap_err(),
            ParseError::AttackArity { line: 2, found: 3 }
        );
        assert_eq!(
            parse_iccma(b"p af 2\n1\n").unwrap_err(),
            ParseError::AttackArity { line: 2, found: 1 }
        );
    }

    #[test]
    fn apx_examples() {
        let af = parse_apx(b"arg(a).\narg(b).\natt(a,b).").unwrap();
        assert_eq!(af.num_arguments(), 2);
        assert_eq!(attacks(&af), vec![(1, 2)]);
        assert_eq!(af.name_of(1), "b");

        let af = parse_apx(b"arg(a).\natt(a,a).").unwrap();
        assert_eq!(attacks(&af), vec![(1, 1)]);

        assert_eq!(
            parse_apx(b"att(a,b).").unwrap_err(),
            ParseError::Undeclared {
                line: 1,
                name: "a".into()
            }
        );
    }

    #[test]
    fn apx_whitespace_and_errors() {
        let af = parse_apx(b"  arg( x1 ) .\n\narg(y).\n att ( y , x1 ).\n").unwrap();
        assert_eq!(attacks(&af), vec![(2, 1)]);
        assert_eq!(af.resolve("y"), Some(1));
        assert!(matches!(
            parse_apx(b"arg(a).\nfoo(a).\n").unwrap_err(),
            ParseError::Malformed { line: 2, .. }
        ));
        assert!(matches!(
            parse_apx(b"arg(a)\n").unwrap_err(),
            ParseError::Malformed { line: 1, .. }
        ));
        assert_eq!(parse_apx(b"\n").unwrap_err(), ParseError::NoArguments);
    }
}
