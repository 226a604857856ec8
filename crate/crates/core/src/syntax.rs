//! Symbols, sequences, atoms and problem files.
//!
//! Concrete syntax is line oriented:
//!
//! ```text
//! # comment
//! dialect: repetitions
//! assume: y1 y2 <= z1 z1
//! query: x1 x2 <= y1 y2
//! ```
//!
//! The constants are written `#T` and `#F`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sequence entry: a propositional variable or one of the two constants.
///
/// `Bot` sorts before `Top`, and both before every variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    Bot,
    Top,
    Var(String),
}

impl Symbol {
    pub fn var(name: impl Into<String>) -> Self {
        Symbol::Var(name.into())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Symbol::Top | Symbol::Bot)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Symbol::Var(name) => Some(name),
            _ => None,
        }
    }

    /// The fixed bit of a constant.
    pub fn constant_value(&self) -> Option<bool> {
        match self {
            Symbol::Top => Some(true),
            Symbol::Bot => Some(false),
            Symbol::Var(_) => None,
        }
    }

    pub fn constant(bit: bool) -> Self {
        if bit {
            Symbol::Top
        } else {
            Symbol::Bot
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Top => f.write_str("#T"),
            Symbol::Bot => f.write_str("#F"),
            Symbol::Var(name) => f.write_str(name),
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "#T" => Ok(Symbol::Top),
            "#F" => Ok(Symbol::Bot),
            _ if is_identifier(s) => Ok(Symbol::Var(s.to_string())),
            _ => Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("`{s}` is not a symbol"),
            }),
        }
    }
}

/// A finite, possibly empty, sequence of symbols. Equality is positional.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sequence(pub Vec<Symbol>);

impl Sequence {
    pub fn new(items: Vec<Symbol>) -> Self {
        Sequence(items)
    }

    /// A sequence of constants from bits, `true` ↦ `#T`.
    pub fn constants(bits: &[bool]) -> Self {
        Sequence(bits.iter().map(|&b| Symbol::constant(b)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.0.iter()
    }

    pub fn items(&self) -> &[Symbol] {
        &self.0
    }

    /// Variables occurring in the sequence; constants excluded.
    pub fn vars(&self) -> BTreeSet<&str> {
        self.0.iter().filter_map(Symbol::as_var).collect()
    }

    pub fn has_constants(&self) -> bool {
        self.0.iter().any(Symbol::is_constant)
    }

    pub fn is_all_constant(&self) -> bool {
        self.0.iter().all(Symbol::is_constant)
    }

    pub fn has_repetition(&self) -> bool {
        let mut seen = BTreeSet::new();
        !self.0.iter().all(|s| seen.insert(s))
    }

    /// Bits of an all-constant sequence.
    pub fn constant_bits(&self) -> Option<Vec<bool>> {
        self.0.iter().map(Symbol::constant_value).collect()
    }

    pub fn concat(&self, other: &Sequence) -> Sequence {
        let mut items = self.0.clone();
        items.extend(other.0.iter().cloned());
        Sequence(items)
    }
}

impl From<Vec<Symbol>> for Sequence {
    fn from(items: Vec<Symbol>) -> Self {
        Sequence(items)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(Symbol::from_str)
            .collect::<Result<Vec<_>>>()
            .map(Sequence)
    }
}

/// An inclusion atom `lhs ⊆ rhs` with `|lhs| = |rhs|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub lhs: Sequence,
    pub rhs: Sequence,
}

impl Atom {
    pub fn new(lhs: Sequence, rhs: Sequence) -> Result<Self> {
        if lhs.len() != rhs.len() {
            return Err(Error::Arity {
                line: 0,
                lhs: lhs.len(),
                rhs: rhs.len(),
            });
        }
        Ok(Atom { lhs, rhs })
    }

    pub fn arity(&self) -> usize {
        self.lhs.len()
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }

    pub fn has_constants(&self) -> bool {
        self.lhs.has_constants() || self.rhs.has_constants()
    }

    /// Trivial atoms `x ⊆ x` hold in every team.
    pub fn is_trivial(&self) -> bool {
        self.lhs == self.rhs
    }

    /// No symbol repeats within either side and no constants occur.
    pub fn is_repetition_free(&self) -> bool {
        !self.has_constants() && !self.lhs.has_repetition() && !self.rhs.has_repetition()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_atom(s, 1, 1)
    }
}

pub fn is_repetition_free(atom: &Atom) -> bool {
    atom.is_repetition_free()
}

pub fn render_atom(atom: &Atom) -> String {
    atom.to_string()
}

/// The three syntactic classes of inclusion atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dialect {
    RepetitionFree,
    WithRepetitions,
    BooleanConstants,
}

impl Dialect {
    pub const ALL: [Dialect; 3] = [
        Dialect::RepetitionFree,
        Dialect::WithRepetitions,
        Dialect::BooleanConstants,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dialect::RepetitionFree => "repetition-free",
            Dialect::WithRepetitions => "repetitions",
            Dialect::BooleanConstants => "boolean-constants",
        }
    }

    pub fn has_constants(self) -> bool {
        self == Dialect::BooleanConstants
    }

    pub fn has_repetitions(self) -> bool {
        self != Dialect::RepetitionFree
    }

    /// Checks an atom against the dialect; the error message names the violation.
    pub fn check(self, atom: &Atom) -> std::result::Result<(), String> {
        match self {
            Dialect::BooleanConstants => Ok(()),
            Dialect::WithRepetitions => {
                if atom.has_constants() {
                    Err(format!("`{atom}` uses constants"))
                } else {
                    Ok(())
                }
            }
            Dialect::RepetitionFree => {
                if atom.has_constants() {
                    Err(format!("`{atom}` uses constants"))
                } else if atom.lhs.has_repetition() || atom.rhs.has_repetition() {
                    Err(format!("`{atom}` repeats a variable within one side"))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn admits(self, atom: &Atom) -> bool {
        self.check(atom).is_ok()
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dialect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "repetition-free" => Ok(Dialect::RepetitionFree),
            "repetitions" => Ok(Dialect::WithRepetitions),
            "boolean-constants" => Ok(Dialect::BooleanConstants),
            other => Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("unknown dialect `{other}`"),
            }),
        }
    }
}

/// An implication problem `assumptions ⊨ query` in a dialect.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Problem {
    pub dialect: Dialect,
    pub assumptions: Vec<Atom>,
    pub query: Atom,
}

impl Problem {
    /// Builds a problem, dropping duplicate assumptions and checking the dialect.
    pub fn new(dialect: Dialect, assumptions: Vec<Atom>, query: Atom) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut kept = Vec::with_capacity(assumptions.len());
        for a in assumptions {
            if let Err(message) = dialect.check(&a) {
                return Err(Error::Dialect { line: 0, message });
            }
            if seen.insert(a.clone()) {
                kept.push(a);
            }
        }
        if let Err(message) = dialect.check(&query) {
            return Err(Error::Dialect { line: 0, message });
        }
        Ok(Problem {
            dialect,
            assumptions: kept,
            query,
        })
    }

    /// The variable universe, sorted by name.
    pub fn variables(&self) -> Vec<String> {
        let mut vars: BTreeSet<&str> = self.query.vars();
        for a in &self.assumptions {
            vars.extend(a.vars());
        }
        vars.into_iter().map(str::to_string).collect()
    }

    /// Largest arity among the query and the assumptions.
    pub fn max_arity(&self) -> usize {
        self.assumptions
            .iter()
            .map(Atom::arity)
            .chain(std::iter::once(self.query.arity()))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dialect: {}", self.dialect)?;
        for a in &self.assumptions {
            writeln!(f, "assume: {a}")?;
        }
        writeln!(f, "query: {}", self.query)
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_problem(s)
    }
}

fn parse_sequence(text: &str, line: usize, column: usize) -> Result<Sequence> {
    let mut items = Vec::new();
    let mut offset = 0;
    for token in text.split_whitespace() {
        let at = text[offset..].find(token).map_or(offset, |i| offset + i);
        offset = at + token.len();
        let symbol = match token {
            "#T" => Symbol::Top,
            "#F" => Symbol::Bot,
            _ if is_identifier(token) => Symbol::Var(token.to_string()),
            _ => {
                return Err(Error::Parse {
                    line,
                    column: column + at,
                    message: format!("unexpected token `{token}`"),
                })
            }
        };
        items.push(symbol);
    }
    if items.is_empty() {
        return Err(Error::Parse {
            line,
            column: column + text.len(),
            message: "expected at least one symbol".into(),
        });
    }
    Ok(Sequence(items))
}

fn parse_atom(text: &str, line: usize, column: usize) -> Result<Atom> {
    let Some(split) = text.find("<=") else {
        return Err(Error::Parse {
            line,
            column: column + text.len(),
            message: "expected `<=`".into(),
        });
    };
    let lhs = parse_sequence(&text[..split], line, column)?;
    let rhs = parse_sequence(&text[split + 2..], line, column + split + 2)?;
    if lhs.len() != rhs.len() {
        return Err(Error::Arity {
            line,
            lhs: lhs.len(),
            rhs: rhs.len(),
        });
    }
    Ok(Atom { lhs, rhs })
}

/// Parses a problem file. The dialect defaults to `boolean-constants`.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let mut dialect: Option<(Dialect, usize)> = None;
    let mut assumptions: Vec<(Atom, usize)> = Vec::new();
    let mut query: Option<(Atom, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let indent = raw.len() - raw.trim_start().len();
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let column = indent + 1;
        if let Some(rest) = body.strip_prefix("dialect:") {
            if dialect.is_some() {
                return Err(Error::Parse {
                    line,
                    column,
                    message: "duplicate dialect line".into(),
                });
            }
            let d = rest.trim().parse::<Dialect>().map_err(|_| Error::Parse {
                line,
                column: column + "dialect:".len() + (rest.len() - rest.trim_start().len()),
                message: format!("unknown dialect `{}`", rest.trim()),
            })?;
            dialect = Some((d, line));
        } else if let Some(rest) = body.strip_prefix("assume:") {
            let atom = parse_atom(rest, line, column + "assume:".len())?;
            assumptions.push((atom, line));
        } else if let Some(rest) = body.strip_prefix("query:") {
            if query.is_some() {
                return Err(Error::DuplicateQuery { line });
            }
            let atom = parse_atom(rest, line, column + "query:".len())?;
            query = Some((atom, line));
        } else {
            return Err(Error::Parse {
                line,
                column,
                message: "expected `dialect:`, `assume:` or `query:`".into(),
            });
        }
    }

    let dialect = dialect.map_or(Dialect::BooleanConstants, |(d, _)| d);
    let (query, query_line) = query.ok_or(Error::MissingQuery)?;
    for (atom, line) in assumptions
        .iter()
        .chain(std::iter::once(&(query.clone(), query_line)))
    {
        if let Err(message) = dialect.check(atom) {
            return Err(Error::Dialect {
                line: *line,
                message,
            });
        }
    }
    Problem::new(
        dialect,
        assumptions.into_iter().map(|(a, _)| a).collect(),
        query,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(s: &str) -> Atom {
        s.parse().unwrap()
    }

    #[test]
    fn parses_table_one_fragment() {
        let p =
            parse_problem("dialect: repetitions\nassume: y1 y2 <= z1 z1\nquery: x1 x2 <= y1 y2")
                .unwrap();
        assert_eq!(p.dialect, Dialect::WithRepetitions);
        assert_eq!(p.assumptions, vec![atom("y1 y2 <= z1 z1")]);
        assert_eq!(p.query, atom("x1 x2 <= y1 y2"));
    }

    #[test]
    fn minimal_file_defaults_to_boolean() {
        let p = parse_problem("query: x1 <= x1").unwrap();
        assert_eq!(p.dialect, Dialect::BooleanConstants);
        assert!(p.assumptions.is_empty());
        assert_eq!(p.query, atom("x1 <= x1"));
    }

    #[test]
    fn repetition_violates_repetition_free_dialect() {
        let err = parse_problem("dialect: repetition-free\nquery: x1 x1 <= y1 y2").unwrap_err();
        assert!(matches!(err, Error::Dialect { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn constants_violate_repetitions_dialect() {
        let err =
            parse_problem("dialect: repetitions\nassume: #T <= p\nquery: p <= p").unwrap_err();
        assert!(matches!(err, Error::Dialect { line: 2, .. }));
    }

    #[test]
    fn error_positions() {
        let err = parse_problem("query: x1 x$ <= y1 y2").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 1,
                column: 11,
                message: "unexpected token `x$`".into()
            }
        );
        let err = parse_problem("# c\nquery: x1 x2 <= y1").unwrap_err();
        assert_eq!(
            err,
            Error::Arity {
                line: 2,
                lhs: 2,
                rhs: 1
            }
        );
        assert_eq!(
            parse_problem("assume: a <= b").unwrap_err(),
            Error::MissingQuery
        );
        assert_eq!(
            parse_problem("query: a <= b\nquery: b <= a").unwrap_err(),
            Error::DuplicateQuery { line: 2 }
        );
        assert!(matches!(
            parse_problem("query: <= b").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_problem("dialect: fuzzy\nquery: a <= b").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn repetition_free_examples() {
        assert!(is_repetition_free(&atom("x1 <= x1")));
        assert!(!is_repetition_free(&atom("x1 x1 <= y1 y2")));
        let empty = Atom::new(Sequence::default(), Sequence::default()).unwrap();
        assert!(is_repetition_free(&empty));
        assert!(!is_repetition_free(&atom("#T <= x1")));
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_atom(&atom("p1 p2 <= q1 q2")), "p1 p2 <= q1 q2");
        let a = Atom::new(
            Sequence(vec![Symbol::Top, Symbol::Bot]),
            Sequence(vec![Symbol::Top, Symbol::var("p2")]),
        )
        .unwrap();
        assert_eq!(render_atom(&a), "#T #F <= #T p2");
        assert_eq!(render_atom(&atom("x1 <= x1")), "x1 <= x1");
    }

    #[test]
    fn literal_constant_tokens_are_not_identifiers() {
        assert_eq!("#T".parse::<Symbol>().unwrap(), Symbol::Top);
        assert!("#X".parse::<Symbol>().is_err());
        assert!("1x".parse::<Symbol>().is_err());
    }
}
