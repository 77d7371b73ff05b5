//! Concrete ASCII syntax.
//!
//! ```text
//! formula := conj ('|' conj)*
//! conj    := unary ('&' unary)*
//! unary   := '!' unary | ('A' | 'E') var unary | '(' formula ')' | atom
//! atom    := term '=' term
//! term    := factor ('*' factor)*
//! factor  := primary ('^-1')*
//! primary := '1' | var | 'p' digits | '(' term ')' | '[' term ',' term ']'
//! ```
//!
//! Variables are lowercase identifiers other than `p0`, `p1`, …; `∀` and
//! `∃` are accepted as aliases for `A` and `E`. The commutator `[a, b]`
//! expands to `a^-1 * b^-1 * a * b` while parsing.

use std::fmt;

use super::ast::{Formula, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Param(usize),
    One,
    Star,
    InvMark,
    Eq,
    Amp,
    Bar,
    Bang,
    Forall,
    Exists,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let single = match c {
            '*' => Some(Tok::Star),
            '=' => Some(Tok::Eq),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Bar),
            '!' => Some(Tok::Bang),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '1' => Some(Tok::One),
            '∀' => Some(Tok::Forall),
            '∃' => Some(Tok::Exists),
            _ => None,
        };
        if let Some(t) = single {
            chars.next();
            out.push((pos, t));
            continue;
        }
        if c.is_whitespace() {
            chars.next();
        } else if c == '^' {
            chars.next();
            let minus = chars.next().map(|x| x.1);
            let one = chars.next().map(|x| x.1);
            if minus != Some('-') || one != Some('1') {
                return Err(Error::Parse { position: pos, message: "expected `^-1`".into() });
            }
            out.push((pos, Tok::InvMark));
        } else if c == 'A' || c == 'E' {
            chars.next();
            out.push((pos, if c == 'A' { Tok::Forall } else { Tok::Exists }));
        } else if c.is_ascii_lowercase() {
            let mut ident = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    ident.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            let tok = match ident.strip_prefix('p').map(|n| n.parse::<usize>()) {
                Some(Ok(i)) if !ident[1..].is_empty() && ident[1..].chars().all(|d| d.is_ascii_digit()) => Tok::Param(i),
                _ => Tok::Ident(ident),
            };
            out.push((pos, tok));
        } else {
            return Err(Error::Parse { position: pos, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { position: self.offset(), message: message.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut f = self.conj()?;
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Forall) | Some(Tok::Exists) => {
                let forall = self.peek() == Some(&Tok::Forall);
                self.pos += 1;
                let v = match self.peek() {
                    Some(Tok::Ident(v)) => v.clone(),
                    _ => return self.err("expected a variable after a quantifier"),
                };
                self.pos += 1;
                let body = self.unary()?;
                Ok(if forall { Formula::forall(&v, body) } else { Formula::exists(&v, body) })
            }
            Some(Tok::LParen) => {
                // either a parenthesized formula or an atom starting with a
                // parenthesized term
                let save = self.pos;
                self.pos += 1;
                if let Ok(f) = self.formula() {
                    if self.peek() == Some(&Tok::RParen) {
                        self.pos += 1;
                        if !matches!(self.peek(), Some(Tok::Star) | Some(Tok::InvMark) | Some(Tok::Eq)) {
                            return Ok(f);
                        }
                    }
                }
                self.pos = save;
                self.atom()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let a = self.term()?;
        self.expect(Tok::Eq, "`=`")?;
        let b = self.term()?;
        Ok(Formula::eq(a, b))
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            t = Term::mul(t, self.factor()?);
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<Term> {
        let mut t = self.primary()?;
        while self.peek() == Some(&Tok::InvMark) {
            self.pos += 1;
            t = Term::inv(t);
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term> {
        let t = match self.peek().cloned() {
            Some(Tok::One) => Term::Identity,
            Some(Tok::Ident(v)) => Term::Var(v),
            Some(Tok::Param(i)) => Term::Param(i),
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(t);
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let a = self.term()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.term()?;
                self.expect(Tok::RBracket, "`]`")?;
                return Ok(Term::comm(a, b));
            }
            _ => return self.err("expected a term"),
        };
        self.pos += 1;
        Ok(t)
    }
}

/// Parses the concrete syntax.
pub fn parse(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, end: text.len() };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

/// Prints in the concrete syntax; `parse(&print(f)) == f` for every AST.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Param(i) => write!(f, "p{i}"),
            Term::Identity => write!(f, "1"),
            Term::Mul(a, b) => {
                write!(f, "{a}*")?;
                if matches!(**b, Term::Mul(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Term::Inv(a) => {
                if matches!(**a, Term::Mul(..)) {
                    write!(f, "({a})^-1")
                } else {
                    write!(f, "{a}^-1")
                }
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // operands that would otherwise re-associate or bind differently
        // get parentheses
        let paren = |f: &mut fmt::Formatter<'_>, x: &Formula, wrap: bool| {
            if wrap {
                write!(f, "({x})")
            } else {
                write!(f, "{x}")
            }
        };
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::And(a, b) => {
                paren(f, a, matches!(**a, Formula::Or(..)))?;
                write!(f, " & ")?;
                paren(f, b, matches!(**b, Formula::Or(..) | Formula::And(..)))
            }
            Formula::Or(a, b) => {
                write!(f, "{a} | ")?;
                paren(f, b, matches!(**b, Formula::Or(..)))
            }
            Formula::Not(a) => {
                write!(f, "!")?;
                paren(f, a, matches!(**a, Formula::And(..) | Formula::Or(..)))
            }
            Formula::Forall(v, body) => write!(f, "A {v} ({body})"),
            Formula::Exists(v, body) => write!(f, "E {v} ({body})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_atom() {
        assert_eq!(parse("x = 1").unwrap(), Formula::eq(Term::var("x"), Term::Identity));
    }

    #[test]
    fn quantified_commuting() {
        let f = parse("∀y (x*y = y*x)").unwrap();
        assert_eq!(f, Formula::forall("y", Formula::commute(Term::var("x"), Term::var("y"))));
        assert_eq!(print(&f), "A y (x*y = y*x)");
        assert_eq!(parse(&print(&f)).unwrap(), f);
    }

    #[test]
    fn commutator_sugar_desugars() {
        let f = parse("[x, p0] = 1").unwrap();
        let x = Term::var("x");
        let p = Term::Param(0);
        let expected = Term::mul(
            Term::mul(Term::mul(Term::inv(x.clone()), Term::inv(p.clone())), x),
            p,
        );
        assert_eq!(f, Formula::eq(expected, Term::Identity));
    }

    #[test]
    fn parenthesized_terms_and_formulas() {
        let f = parse("(x*y)^-1 = y^-1*x^-1").unwrap();
        assert!(matches!(f, Formula::Eq(Term::Inv(_), _)));
        let g = parse("(x = 1 | y = 1) & !(x = y)").unwrap();
        assert!(matches!(g, Formula::And(..)));
        assert_eq!(parse(&print(&g)).unwrap(), g);
        let h = parse("(x) = (y*z)*w").unwrap();
        assert_eq!(parse(&print(&h)).unwrap(), h);
    }

    #[test]
    fn right_nested_operators_round_trip() {
        let a = Formula::eq(Term::var("a"), Term::Identity);
        let b = Formula::eq(Term::var("b"), Term::Identity);
        let c = Formula::eq(Term::var("c"), Term::Identity);
        let f = Formula::and(a.clone(), Formula::and(b.clone(), c.clone()));
        assert_eq!(parse(&print(&f)).unwrap(), f);
        let f = Formula::or(a.clone(), Formula::or(b.clone(), c.clone()));
        assert_eq!(parse(&print(&f)).unwrap(), f);
        let t = Term::mul(Term::var("a"), Term::mul(Term::var("b"), Term::var("c")));
        let f = Formula::eq(t, Term::inv(Term::inv(Term::Param(3))));
        assert_eq!(parse(&print(&f)).unwrap(), f);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("x = ") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
        match parse("x ^ 2 = 1") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse("A (x = 1)").is_err());
        assert!(parse("x = 1 )").is_err());
        assert!(parse("X = 1").is_err());
    }
}
