//! Recursive-descent parser for both rendering styles.
//!
//! ```text
//! formula := member | not formula | "(" formula op formula ")"
//!          | quant "(" var ")" "[" formula "]"
//! member  := "(" term in term ")"
//! term    := var | open term ("," term)+ close
//!          | "{" binder "|" formula "}"
//! binder  := var ("," var)* | open var ("," var)+ close
//! ```
//!
//! Both `&`/`∧`, `|`/`∨`, `=>`/`⇒`/`→`, `~`/`¬`, `in`/`∈`, `forall`/`∀`,
//! `exists`/`∃` and `<…>`/`⟨…⟩` are accepted interchangeably.

use thiserror::Error;

use super::sort::SortError;
use super::{Connective, Expr, Formula, Quantifier, Term, Variable};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("parse error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error(transparent)]
    Sort(#[from] SortError),
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "ParseError",
            ParseError::Sort(e) => e.code(),
        }
    }

    pub fn column(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { column, .. } => Some(*column),
            ParseError::Sort(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    LAngle,
    RAngle,
    Comma,
    Bar,
    And,
    Or,
    Implies,
    Not,
    In,
    Quant(Quantifier),
    Ident(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Quant(q) => format!("`{}`", q.keyword()),
            other => format!("{other:?}"),
        }
    }
}

struct Lexer;

impl Lexer {
    fn tokenize(src: &str) -> Result<(Vec<(Tok, usize)>, usize), ParseError> {
        let chars: Vec<char> = src.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let single = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '[' => Some(Tok::LBrack),
                ']' => Some(Tok::RBrack),
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                '<' | '⟨' => Some(Tok::LAngle),
                '>' | '⟩' => Some(Tok::RAngle),
                ',' => Some(Tok::Comma),
                '|' => Some(Tok::Bar),
                '&' | '∧' => Some(Tok::And),
                '∨' => Some(Tok::Or),
                '⇒' | '→' => Some(Tok::Implies),
                '~' | '¬' => Some(Tok::Not),
                '∈' => Some(Tok::In),
                '∀' => Some(Tok::Quant(Quantifier::Forall)),
                '∃' => Some(Tok::Quant(Quantifier::Exists)),
                _ => None,
            };
            if let Some(t) = single {
                toks.push((t, col));
                i += 1;
                continue;
            }
            if c == '=' && chars.get(i + 1) == Some(&'>') {
                toks.push((Tok::Implies, col));
                i += 2;
                continue;
            }
            if c.is_ascii_alphabetic() {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                while i < chars.len() && chars[i] == '\'' {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let tok = match word.as_str() {
                    "in" => Tok::In,
                    "forall" => Tok::Quant(Quantifier::Forall),
                    "exists" => Tok::Quant(Quantifier::Exists),
                    _ => Tok::Ident(word),
                };
                toks.push((tok, col));
                continue;
            }
            return Err(ParseError::Syntax {
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
        Ok((toks, chars.len() + 1))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_column: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        let (toks, end_column) = Lexer::tokenize(src)?;
        Ok(Parser {
            toks,
            pos: 0,
            end_column,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.end_column)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            column: self.column(),
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(wanted)
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            return self.unexpected("end of input");
        }
        Ok(())
    }

    fn starts_term(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_)) | Some(Tok::LAngle) | Some(Tok::LBrace)
        )
    }

    fn variable(&mut self) -> Result<Variable, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                match Variable::from_name(&name) {
                    Some(v) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    None => self.error(format!("cannot infer the sort of `{name}`")),
                }
            }
            _ => self.unexpected("a variable"),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.formula()?))
            }
            Some(Tok::Quant(q)) => {
                let q = *q;
                self.pos += 1;
                self.expect(Tok::LParen, "`(`")?;
                let v = self.variable()?;
                self.expect(Tok::RParen, "`)`")?;
                self.expect(Tok::LBrack, "`[`")?;
                let body = self.formula()?;
                self.expect(Tok::RBrack, "`]`")?;
                Ok(Formula::quantify(q, v, body))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                if self.starts_term() {
                    let lhs = self.term()?;
                    self.expect(Tok::In, "`∈`")?;
                    let rhs = self.term()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Formula::Member(lhs, rhs));
                }
                let lhs = self.formula()?;
                let op = match self.peek() {
                    Some(Tok::And) => Connective::And,
                    Some(Tok::Or) | Some(Tok::Bar) => Connective::Or,
                    Some(Tok::Implies) => Connective::Implies,
                    _ => return self.unexpected("a connective"),
                };
                self.pos += 1;
                let rhs = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::connect(op, lhs, rhs))
            }
            _ => self.unexpected("a formula"),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => Ok(Term::Var(self.variable()?)),
            Some(Tok::LAngle) => {
                self.pos += 1;
                let mut parts = vec![self.term()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    parts.push(self.term()?);
                }
                if parts.len() < 2 {
                    return self.unexpected("`,`");
                }
                self.expect(Tok::RAngle, "`⟩`")?;
                Ok(Term::Tuple(parts))
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                let bound = if self.peek() == Some(&Tok::LAngle) {
                    self.pos += 1;
                    let vars = self.var_list()?;
                    if vars.len() < 2 {
                        return self.unexpected("`,`");
                    }
                    self.expect(Tok::RAngle, "`⟩`")?;
                    vars
                } else {
                    self.var_list()?
                };
                self.expect(Tok::Bar, "`|`")?;
                let body = self.formula()?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(Term::comprehension(bound, body))
            }
            _ => self.unexpected("a term"),
        }
    }

    fn var_list(&mut self) -> Result<Vec<Variable>, ParseError> {
        let mut vars = vec![self.variable()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            vars.push(self.variable()?);
        }
        Ok(vars)
    }
}

/// Parses and sort-checks a formula.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.finish()?;
    f.check_sorts()?;
    Ok(f)
}

/// Parses and sort-checks a term.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    t.sort()?;
    Ok(t)
}

/// Parses either a formula or a term, decided by the leading token.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let p = Parser::new(src)?;
    if p.starts_term() {
        parse_term(src).map(Expr::Term)
    } else {
        parse_formula(src).map(Expr::Formula)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Style;

    fn x(i: usize) -> Variable {
        Variable::elem(format!("x{i}"))
    }
    fn a(i: usize) -> Variable {
        Variable::set(format!("A{i}"))
    }

    #[test]
    fn atomic_formula() {
        assert_eq!(
            parse_formula("(x0 ∈ A0)").unwrap(),
            Formula::member(x(0), a(0))
        );
        assert_eq!(
            parse_formula("(x0 in A0)").unwrap(),
            Formula::member(x(0), a(0))
        );
    }

    #[test]
    fn existential_over_set_variable() {
        assert_eq!(
            parse_formula("∃(A0) [(x0 ∈ A0)]").unwrap(),
            Formula::exists(a(0), Formula::member(x(0), a(0)))
        );
        assert_eq!(
            parse_formula("forall(A0)[(x0 in A0)]").unwrap(),
            Formula::forall(a(0), Formula::member(x(0), a(0)))
        );
    }

    #[test]
    fn truncated_input_reports_column() {
        let err = parse_formula("(x0 ∈").unwrap_err();
        assert_eq!(err.column(), Some(6));
        assert_eq!(err.code(), "ParseError");
    }

    #[test]
    fn bar_is_disjunction_inside_comprehensions() {
        let t = parse_term("{x0 | ((x0 in A0) | (x0 in A1))}").unwrap();
        assert_eq!(t.render(Style::Unicode), "{x0 | ((x0 ∈ A0) ∨ (x0 ∈ A1))}");
    }

    #[test]
    fn both_binder_spellings_for_tuples() {
        let a = parse_term("{<x0, x1> | ((x0 in A0) & (x1 in A1))}").unwrap();
        let b = parse_term("{x0, x1 | ((x0 ∈ A0) ∧ (x1 ∈ A1))}").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sort_errors_are_forwarded() {
        assert_eq!(parse_formula("(x0 ∈ x1)").unwrap_err().code(), "SortMismatch");
    }

    #[test]
    fn rejects_trailing_tokens_and_short_tuples() {
        assert!(parse_formula("(x0 ∈ A0))").is_err());
        assert!(parse_term("<x0>").is_err());
    }

    #[test]
    fn expr_dispatch() {
        assert!(matches!(parse_expr("{x0 | (x0 ∈ A0)}"), Ok(Expr::Term(_))));
        assert!(matches!(parse_expr("¬(x0 ∈ A0)"), Ok(Expr::Formula(_))));
    }
}
