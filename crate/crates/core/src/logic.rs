//! Conventional propositional syntax: parsing, printing and direct evaluation.
//!
//! Grammar (keywords case-insensitive, atoms case-sensitive):
//!
//! ```text
//! expr  := impl
//! impl  := or ('->' impl)?
//! or    := and ('or' and)*
//! and   := unary ('and' unary)*
//! unary := 'not' unary | 'true' | 'false' | atom | '(' expr ')'
//!        | 'forall' IDENT ':' or '->' impl
//! ```
//!
//! `=>` and `⇒` are accepted for `->`. Inside a `forall` body every atom must
//! be a monadic application `p(x)` of the bound variable; it is stored as the
//! atom `p`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::form::Assignment;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LogicExpr {
    Atom(String),
    Const(bool),
    Not(Box<LogicExpr>),
    And(Vec<LogicExpr>),
    Or(Vec<LogicExpr>),
    Implies(Box<LogicExpr>, Box<LogicExpr>),
    ForallImplies {
        var: String,
        antecedent: Box<LogicExpr>,
        consequent: Box<LogicExpr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("empty input")]
    EmptyInput,
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(
        "unbound quantifier at {line}:{column}: predicate `{predicate}` applied to `{variable}`"
    )]
    UnboundQuantifier {
        line: usize,
        column: usize,
        predicate: String,
        variable: String,
    },
    #[error("unsupported quantifier `exists` at {line}:{column}")]
    UnsupportedQuantifier { line: usize, column: usize },
    #[error("unbound variables: {}", .0.join(", "))]
    UnboundVariable(Vec<String>),
}

impl LogicExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        LogicExpr::Atom(name.into())
    }

    pub fn negate(inner: LogicExpr) -> Self {
        LogicExpr::Not(Box::new(inner))
    }

    pub fn implies(antecedent: LogicExpr, consequent: LogicExpr) -> Self {
        LogicExpr::Implies(Box::new(antecedent), Box::new(consequent))
    }

    /// Distinct atom names, predicate names included.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            LogicExpr::Atom(name) => {
                out.insert(name.clone());
            }
            LogicExpr::Const(_) => {}
            LogicExpr::Not(inner) => inner.collect_atoms(out),
            LogicExpr::And(items) | LogicExpr::Or(items) => {
                items.iter().for_each(|e| e.collect_atoms(out))
            }
            LogicExpr::Implies(a, b)
            | LogicExpr::ForallImplies {
                antecedent: a,
                consequent: b,
                ..
            } => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Truth value under a total assignment of [`atoms`](Self::atoms).
    pub fn eval(&self, assignment: &Assignment) -> Result<bool, LogicError> {
        let missing: Vec<String> = self
            .atoms()
            .into_iter()
            .filter(|a| !assignment.contains_key(a))
            .collect();
        if !missing.is_empty() {
            return Err(LogicError::UnboundVariable(missing));
        }
        Ok(self.eval_bound(assignment))
    }

    fn eval_bound(&self, assignment: &Assignment) -> bool {
        match self {
            LogicExpr::Atom(name) => assignment[name],
            LogicExpr::Const(value) => *value,
            LogicExpr::Not(inner) => !inner.eval_bound(assignment),
            LogicExpr::And(items) => items.iter().all(|e| e.eval_bound(assignment)),
            LogicExpr::Or(items) => items.iter().any(|e| e.eval_bound(assignment)),
            LogicExpr::Implies(a, b)
            | LogicExpr::ForallImplies {
                antecedent: a,
                consequent: b,
                ..
            } => !a.eval_bound(assignment) || b.eval_bound(assignment),
        }
    }
}

impl fmt::Display for LogicExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_logic(self, None, f)
    }
}

/// Fully parenthesized rendering; `parse_logic(&print_logic(e)) == Ok(e)`.
pub fn print_logic(expr: &LogicExpr) -> String {
    expr.to_string()
}

fn write_logic(expr: &LogicExpr, bound: Option<&str>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let join = |items: &[LogicExpr], sep: &str, f: &mut fmt::Formatter<'_>| -> fmt::Result {
        f.write_str("(")?;
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write_logic(item, bound, f)?;
        }
        f.write_str(")")
    };
    match expr {
        LogicExpr::Atom(name) => match bound {
            Some(var) => write!(f, "{name}({var})"),
            None => f.write_str(name),
        },
        LogicExpr::Const(true) => f.write_str("true"),
        LogicExpr::Const(false) => f.write_str("false"),
        LogicExpr::Not(inner) => {
            f.write_str("(not ")?;
            write_logic(inner, bound, f)?;
            f.write_str(")")
        }
        LogicExpr::And(items) => join(items, " and ", f),
        LogicExpr::Or(items) => join(items, " or ", f),
        LogicExpr::Implies(a, b) => {
            f.write_str("(")?;
            write_logic(a, bound, f)?;
            f.write_str(" -> ")?;
            write_logic(b, bound, f)?;
            f.write_str(")")
        }
        LogicExpr::ForallImplies {
            var,
            antecedent,
            consequent,
        } => {
            write!(f, "(forall {var}: ")?;
            write_logic(antecedent, Some(var), f)?;
            f.write_str(" -> ")?;
            write_logic(consequent, Some(var), f)?;
            f.write_str(")")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Colon,
    Arrow,
    Not,
    And,
    Or,
    Forall,
    True,
    False,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// True when `name` can be printed as a bare atom and parsed back.
pub fn is_valid_atom(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c))
        && chars.all(is_ident_char)
        && keyword(name).is_none()
        && !name.eq_ignore_ascii_case("exists")
}

fn keyword(word: &str) -> Option<Tok> {
    match word.to_ascii_lowercase().as_str() {
        "not" => Some(Tok::Not),
        "and" => Some(Tok::And),
        "or" => Some(Tok::Or),
        "forall" => Some(Tok::Forall),
        "true" => Some(Tok::True),
        "false" => Some(Tok::False),
        _ => None,
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, LogicError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    while let Some(&c) = chars.peek() {
        let (start_line, start_col) = (line, column);
        let push = |tokens: &mut Vec<Token>, tok| {
            tokens.push(Token {
                tok,
                line: start_line,
                column: start_col,
            })
        };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
        } else if c == '(' || c == ')' || c == ':' || c == '⇒' {
            chars.next();
            column += 1;
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ':' => Tok::Colon,
                _ => Tok::Arrow,
            };
            push(&mut tokens, tok);
        } else if c == '-' || c == '=' {
            chars.next();
            column += 1;
            if chars.peek() == Some(&'>') {
                chars.next();
                column += 1;
                push(&mut tokens, Tok::Arrow);
            } else {
                return Err(LogicError::Syntax {
                    line: start_line,
                    column: start_col,
                    message: format!("expected `{c}>`"),
                });
            }
        } else if is_ident_start(c) {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if !is_ident_char(c) {
                    break;
                }
                word.push(c);
                chars.next();
                column += 1;
            }
            if word.eq_ignore_ascii_case("exists") {
                return Err(LogicError::UnsupportedQuantifier {
                    line: start_line,
                    column: start_col,
                });
            }
            let tok = keyword(&word).unwrap_or(Tok::Ident(word));
            push(&mut tokens, tok);
        } else {
            return Err(LogicError::Syntax {
                line: start_line,
                column: start_col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    bound: Option<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.pos].clone();
        if token.tok != Tok::Eof {
            self.pos += 1;
        }
        token
    }

    fn error<T>(&self, token: &Token, message: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Syntax {
            line: token.line,
            column: token.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, LogicError> {
        let token = self.bump();
        if token.tok == tok {
            Ok(token)
        } else {
            self.error(
                &token,
                format!("expected {what}, found {}", describe(&token.tok)),
            )
        }
    }

    fn implication(&mut self) -> Result<LogicExpr, LogicError> {
        let lhs = self.disjunction()?;
        if self.peek().tok == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(LogicExpr::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<LogicExpr, LogicError> {
        let mut items = vec![self.conjunction()?];
        while self.peek().tok == Tok::Or {
            self.bump();
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            LogicExpr::Or(items)
        })
    }

    fn conjunction(&mut self) -> Result<LogicExpr, LogicError> {
        let mut items = vec![self.unary()?];
        while self.peek().tok == Tok::And {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            LogicExpr::And(items)
        })
    }

    fn unary(&mut self) -> Result<LogicExpr, LogicError> {
        let token = self.bump();
        match &token.tok {
            Tok::Not => Ok(LogicExpr::negate(self.unary()?)),
            Tok::True => Ok(LogicExpr::Const(true)),
            Tok::False => Ok(LogicExpr::Const(false)),
            Tok::LParen => {
                let inner = self.implication()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => self.atom(name.clone(), &token),
            Tok::Forall => self.forall(&token),
            other => self.error(
                &token,
                format!("expected expression, found {}", describe(other)),
            ),
        }
    }

    fn atom(&mut self, name: String, at: &Token) -> Result<LogicExpr, LogicError> {
        if self.peek().tok != Tok::LParen || !matches!(self.tokens[self.pos + 1].tok, Tok::Ident(_))
        {
            if self.bound.is_some() {
                return self.error(
                    at,
                    format!("expected predicate application `{name}(..)` inside forall"),
                );
            }
            return Ok(LogicExpr::Atom(name));
        }
        self.bump();
        let Tok::Ident(arg) = self.bump().tok else {
            unreachable!()
        };
        self.expect(Tok::RParen, "`)`")?;
        match &self.bound {
            Some(var) if *var == arg => Ok(LogicExpr::Atom(name)),
            _ => Err(LogicError::UnboundQuantifier {
                line: at.line,
                column: at.column,
                predicate: name,
                variable: arg,
            }),
        }
    }

    fn forall(&mut self, at: &Token) -> Result<LogicExpr, LogicError> {
        if self.bound.is_some() {
            return self.error(at, "nested quantifiers are not supported");
        }
        let var_token = self.bump();
        let Tok::Ident(var) = var_token.tok else {
            return self.error(&var_token, "expected bound variable after `forall`");
        };
        self.expect(Tok::Colon, "`:`")?;
        self.bound = Some(var.clone());
        let antecedent = self.disjunction()?;
        self.expect(Tok::Arrow, "`->` in forall body")?;
        let consequent = self.implication()?;
        self.bound = None;
        Ok(LogicExpr::ForallImplies {
            var,
            antecedent: Box::new(antecedent),
            consequent: Box::new(consequent),
        })
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(name) => format!("`{name}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Not => "`not`".into(),
        Tok::And => "`and`".into(),
        Tok::Or => "`or`".into(),
        Tok::Forall => "`forall`".into(),
        Tok::True => "`true`".into(),
        Tok::False => "`false`".into(),
        Tok::Eof => "end of input".into(),
    }
}

pub fn parse_logic(text: &str) -> Result<LogicExpr, LogicError> {
    let tokens = tokenize(text)?;
    if tokens.len() == 1 {
        return Err(LogicError::EmptyInput);
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        bound: None,
    };
    let expr = parser.implication()?;
    let rest = parser.peek().clone();
    if rest.tok != Tok::Eof {
        return parser.error(&rest, format!("unexpected {}", describe(&rest.tok)));
    }
    Ok(expr)
}
