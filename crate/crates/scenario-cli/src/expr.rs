//! Mini-language for naming matrices in scenario files.
//!
//! Grammar:
//! ```text
//! expr  := name | name '(' args ')'
//! args  := arg (',' arg)*
//! arg   := number | name
//! ```
//! Known heads: `pauli_x`, `pauli_y`, `pauli_z` (bare), `identity(n)`,
//! `diag(a, b, ...)`, `gibbs(matrix_name, beta)`. Bare names other than the
//! Pauli matrices refer to previously declared matrices.

use std::collections::BTreeMap;

use opalg::cmat::{c, identity, pauli_x, pauli_y, pauli_z, CMat};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character {0:?} at byte {1}")]
    BadChar(char, usize),
    #[error("malformed number {0:?}")]
    BadNumber(String),
    #[error("expected {expected} at byte {at}")]
    Expected { expected: &'static str, at: usize },
    #[error("trailing input after expression at byte {0}")]
    Trailing(usize),
    #[error("unknown matrix or function {0:?}")]
    Unknown(String),
    #[error("{head}: expected {expected} argument(s), got {got}")]
    Arity {
        head: String,
        expected: &'static str,
        got: usize,
    },
    #[error("{head}: argument {index} must be a {expected}")]
    BadArg {
        head: String,
        index: usize,
        expected: &'static str,
    },
    #[error("identity size must be in 1..=64, got {0}")]
    BadSize(f64),
    #[error("gibbs argument {0:?} is not a declared matrix")]
    DanglingReference(String),
    #[error("gibbs argument {0:?} is not Hermitian")]
    NotHermitian(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Name(String),
    Number(f64),
    LParen,
    RParen,
    Comma,
}

fn lex(src: &str) -> Result<Vec<(Token, usize)>, ExprError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        match ch {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push((Token::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Token::RParen, i));
                i += 1;
            }
            ',' => {
                out.push((Token::Comma, i));
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                out.push((Token::Name(bytes[start..i].iter().collect()), start));
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || matches!(bytes[i], '.' | '-' | '+' | 'e' | 'E'))
                {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                let value: f64 = text.parse().map_err(|_| ExprError::BadNumber(text))?;
                if !value.is_finite() {
                    return Err(ExprError::BadNumber(
                        bytes[start..i].iter().collect::<String>(),
                    ));
                }
                out.push((Token::Number(value), start));
            }
            other => return Err(ExprError::BadChar(other, i)),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Arg {
    Number(f64),
    Name(String),
}

#[derive(Debug, Clone, PartialEq)]
struct Call {
    head: String,
    args: Option<Vec<Arg>>,
}

fn parse_call(src: &str) -> Result<Call, ExprError> {
    let tokens = lex(src)?;
    let mut it = tokens.iter().peekable();
    let head = match it.next() {
        Some((Token::Name(n), _)) => n.clone(),
        Some((_, at)) => {
            return Err(ExprError::Expected {
                expected: "a name",
                at: *at,
            })
        }
        None => return Err(ExprError::Empty),
    };
    let args = if matches!(it.peek(), Some((Token::LParen, _))) {
        it.next();
        let mut args = Vec::new();
        if matches!(it.peek(), Some((Token::RParen, _))) {
            it.next();
        } else {
            loop {
                match it.next() {
                    Some((Token::Number(v), _)) => args.push(Arg::Number(*v)),
                    Some((Token::Name(n), _)) => args.push(Arg::Name(n.clone())),
                    Some((_, at)) => {
                        return Err(ExprError::Expected {
                            expected: "an argument",
                            at: *at,
                        })
                    }
                    None => {
                        return Err(ExprError::Expected {
                            expected: "an argument",
                            at: src.len(),
                        })
                    }
                }
                match it.next() {
                    Some((Token::Comma, _)) => continue,
                    Some((Token::RParen, _)) => break,
                    Some((_, at)) => {
                        return Err(ExprError::Expected {
                            expected: "',' or ')'",
                            at: *at,
                        })
                    }
                    None => {
                        return Err(ExprError::Expected {
                            expected: "')'",
                            at: src.len(),
                        })
                    }
                }
            }
        }
        Some(args)
    } else {
        None
    };
    if let Some((_, at)) = it.next() {
        return Err(ExprError::Trailing(*at));
    }
    Ok(Call { head, args })
}

fn check_size(v: f64) -> Result<usize, ExprError> {
    if v.fract() == 0.0 && (1.0..=64.0).contains(&v) {
        Ok(v as usize)
    } else {
        Err(ExprError::BadSize(v))
    }
}

/// Evaluates a matrix expression against the previously declared matrices.
pub fn eval_matrix_expr(
    src: &str,
    env: &BTreeMap<String, CMat>,
) -> Result<CMat, ExprError> {
    let call = parse_call(src)?;
    let head = call.head.as_str();
    match (head, call.args) {
        ("pauli_x", None) => Ok(pauli_x()),
        ("pauli_y", None) => Ok(pauli_y()),
        ("pauli_z", None) => Ok(pauli_z()),
        ("identity", Some(args)) => {
            if args.len() != 1 {
                return Err(ExprError::Arity {
                    head: head.into(),
                    expected: "1",
                    got: args.len(),
                });
            }
            match args[0] {
                Arg::Number(v) => Ok(identity(check_size(v)?)),
                Arg::Name(_) => Err(ExprError::BadArg {
                    head: head.into(),
                    index: 0,
                    expected: "number",
                }),
            }
        }
        ("diag", Some(args)) => {
            if args.is_empty() || args.len() > 64 {
                return Err(ExprError::Arity {
                    head: head.into(),
                    expected: "1..=64",
                    got: args.len(),
                });
            }
            let mut entries = Vec::with_capacity(args.len());
            for (i, a) in args.iter().enumerate() {
                match a {
                    Arg::Number(v) => entries.push(*v),
                    Arg::Name(_) => {
                        return Err(ExprError::BadArg {
                            head: head.into(),
                            index: i,
                            expected: "number",
                        })
                    }
                }
            }
            let n = entries.len();
            Ok(CMat::from_fn(n, n, |i, j| {
                if i == j {
                    c(entries[i], 0.0)
                } else {
                    c(0.0, 0.0)
                }
            }))
        }
        ("gibbs", Some(args)) => {
            if args.len() != 2 {
                return Err(ExprError::Arity {
                    head: head.into(),
                    expected: "2",
                    got: args.len(),
                });
            }
            let name = match &args[0] {
                Arg::Name(n) => n.clone(),
                Arg::Number(_) => {
                    return Err(ExprError::BadArg {
                        head: head.into(),
                        index: 0,
                        expected: "matrix name",
                    })
                }
            };
            let beta = match args[1] {
                Arg::Number(v) => v,
                Arg::Name(_) => {
                    return Err(ExprError::BadArg {
                        head: head.into(),
                        index: 1,
                        expected: "number",
                    })
                }
            };
            let h = env
                .get(&name)
                .ok_or(ExprError::DanglingReference(name.clone()))?;
            if (h - h.adjoint()).map(|z| z.norm()).max() > 1e-12 {
                return Err(ExprError::NotHermitian(name));
            }
            Ok(opalg::gibbs_density(h, beta))
        }
        (_, None) => env
            .get(head)
            .cloned()
            .ok_or_else(|| ExprError::Unknown(head.into())),
        (_, Some(_)) => Err(ExprError::Unknown(head.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> BTreeMap<String, CMat> {
        let mut env = BTreeMap::new();
        env.insert("h".to_string(), pauli_z());
        env
    }

    #[test]
    fn builtins_evaluate() {
        let env = env();
        assert_eq!(eval_matrix_expr("pauli_x", &env).unwrap(), pauli_x());
        assert_eq!(eval_matrix_expr("identity(3)", &env).unwrap(), identity(3));
        let d = eval_matrix_expr("diag(0.9, 0.1)", &env).unwrap();
        assert_eq!(d[(0, 0)], c(0.9, 0.0));
        assert_eq!(d[(1, 1)], c(0.1, 0.0));
        assert_eq!(d[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn gibbs_references_environment() {
        let env = env();
        let g = eval_matrix_expr("gibbs(h, 1.0)", &env).unwrap();
        assert!((g.trace().re - 1.0).abs() < 1e-14);
        assert!(g[(1, 1)].re > g[(0, 0)].re); // lower pauli_z eigenvalue favored
        assert!(matches!(
            eval_matrix_expr("gibbs(missing, 1.0)", &env),
            Err(ExprError::DanglingReference(_))
        ));
    }

    #[test]
    fn reference_and_errors() {
        let env = env();
        assert_eq!(eval_matrix_expr("h", &env).unwrap(), pauli_z());
        assert!(matches!(
            eval_matrix_expr("nope", &env),
            Err(ExprError::Unknown(_))
        ));
        assert!(matches!(
            eval_matrix_expr("", &env),
            Err(ExprError::Empty)
        ));
        assert!(matches!(
            eval_matrix_expr("diag(1, x)", &env),
            Err(ExprError::BadArg { .. })
        ));
        assert!(matches!(
            eval_matrix_expr("identity(0)", &env),
            Err(ExprError::BadSize(_))
        ));
        assert!(matches!(
            eval_matrix_expr("diag(1,2) extra", &env),
            Err(ExprError::Trailing(_))
        ));
        assert!(matches!(
            eval_matrix_expr("diag(1e999)", &env),
            Err(ExprError::BadNumber(_))
        ));
    }
}
