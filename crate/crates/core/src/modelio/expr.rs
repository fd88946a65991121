use num_traits::Zero;

use super::lexer::{small_natural, Cursor, ParseError, Tok};
use crate::poly::{Polynomial, Var};
use crate::Rational;

pub enum Symbol {
    Var(Var),
    Const(Rational),
}

/// Recursive-descent parser for polynomial expressions:
///
/// ```text
/// expr   := term (('+' | '-') term)*
/// term   := unary (('*' | '/') unary)*
/// unary  := '-' unary | '+' unary | power
/// power  := atom ('^' natural)?
/// atom   := number | identifier | '(' expr ')'
/// ```
///
/// Division is only allowed by nonzero constants.
pub fn parse_expr(cur: &mut Cursor, resolve: &dyn Fn(&str) -> Option<Symbol>) -> Result<Polynomial, ParseError> {
    let mut acc = parse_term(cur, resolve)?;
    loop {
        if cur.eat(&Tok::Plus) {
            acc = acc.add(&parse_term(cur, resolve)?);
        } else if cur.eat(&Tok::Minus) {
            acc = acc.sub(&parse_term(cur, resolve)?);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_term(cur: &mut Cursor, resolve: &dyn Fn(&str) -> Option<Symbol>) -> Result<Polynomial, ParseError> {
    let mut acc = parse_unary(cur, resolve)?;
    loop {
        if cur.eat(&Tok::Star) {
            acc = acc.mul(&parse_unary(cur, resolve)?);
        } else if cur.peek() == Some(&Tok::Slash) {
            let (line, col) = cur.here();
            cur.next();
            let divisor = parse_unary(cur, resolve)?;
            let c = constant_value(&divisor)
                .ok_or_else(|| ParseError::new(line, col, "division by a non-constant expression is not polynomial"))?;
            if c.is_zero() {
                return Err(ParseError::new(line, col, "division by zero"));
            }
            acc = acc.scale(&c.recip());
        } else {
            return Ok(acc);
        }
    }
}

fn parse_unary(cur: &mut Cursor, resolve: &dyn Fn(&str) -> Option<Symbol>) -> Result<Polynomial, ParseError> {
    if cur.eat(&Tok::Minus) {
        return Ok(parse_unary(cur, resolve)?.neg());
    }
    if cur.eat(&Tok::Plus) {
        return parse_unary(cur, resolve);
    }
    let base = parse_atom(cur, resolve)?;
    if cur.eat(&Tok::Caret) {
        let (line, col) = cur.here();
        let exponent = match cur.next().map(|t| t.tok) {
            Some(Tok::Num(q)) => small_natural(&q),
            _ => None,
        }
        .ok_or_else(|| ParseError::new(line, col, "exponent must be a natural number"))?;
        return Ok(base.pow(exponent));
    }
    Ok(base)
}

fn parse_atom(cur: &mut Cursor, resolve: &dyn Fn(&str) -> Option<Symbol>) -> Result<Polynomial, ParseError> {
    match cur.peek().cloned() {
        Some(Tok::Num(q)) => {
            cur.next();
            Ok(Polynomial::constant(q))
        }
        Some(Tok::Ident(name)) => {
            let (line, col) = cur.here();
            cur.next();
            match resolve(&name) {
                Some(Symbol::Var(v)) => Ok(Polynomial::var(v)),
                Some(Symbol::Const(q)) => Ok(Polynomial::constant(q)),
                None => Err(ParseError::new(line, col, format!("unknown variable `{name}`"))),
            }
        }
        Some(Tok::LParen) => {
            cur.next();
            let inner = parse_expr(cur, resolve)?;
            cur.expect(&Tok::RParen)?;
            Ok(inner)
        }
        _ => Err(cur.unexpected("a number, identifier or `(`")),
    }
}

/// Value of a polynomial without variables.
pub fn constant_value(p: &Polynomial) -> Option<Rational> {
    match p.num_terms() {
        0 => Some(Rational::zero()),
        1 => {
            let (m, c) = p.terms().next().expect("one term");
            m.is_one().then(|| c.clone())
        }
        _ => None,
    }
}

/// Parses a constant expression (identifiers must resolve to constants).
pub fn parse_constant(cur: &mut Cursor, resolve: &dyn Fn(&str) -> Option<Rational>) -> Result<Rational, ParseError> {
    let (line, col) = cur.here();
    let p = parse_expr(cur, &|name| resolve(name).map(Symbol::Const))?;
    constant_value(&p).ok_or_else(|| ParseError::new(line, col, "expected a constant"))
}
