//! Pair lists for queries and constraints: `a, b; c, d` inline, or one pair
//! per line in a file (`;` also separates pairs within a line).

use super::lexer::{content_lines, tokenize_line, Cursor, ParseError, Tok};
use crate::poly::{Universe, Var};
use crate::relation::Relation;

fn resolve(cur: &mut Cursor, universe: &Universe) -> Result<Var, ParseError> {
    let (name, line, col) = cur.ident()?;
    universe
        .get(&name)
        .ok_or_else(|| ParseError::new(line, col, format!("unknown variable `{name}`")))
}

fn parse_line(cur: &mut Cursor, universe: &Universe, out: &mut Relation<Var>) -> Result<(), ParseError> {
    while !cur.at_end() {
        let a = resolve(cur, universe)?;
        cur.expect(&Tok::Comma)?;
        let b = resolve(cur, universe)?;
        out.insert(a, b);
        if !cur.eat(&Tok::Semi) {
            cur.finish()?;
        }
    }
    Ok(())
}

/// Parses a multi-line pair file.
pub fn parse_pairs(text: &str, universe: &Universe) -> Result<Relation<Var>, ParseError> {
    let mut out = Relation::new();
    for (no, l) in content_lines(text) {
        let mut cur = Cursor::new(tokenize_line(l, no)?, no, l.chars().count());
        parse_line(&mut cur, universe, &mut out)?;
    }
    Ok(out)
}

/// Parses a comma-separated variable list.
pub fn parse_var_list(text: &str, universe: &Universe) -> Result<Vec<Var>, ParseError> {
    let mut cur = Cursor::new(tokenize_line(text, 1)?, 1, text.chars().count());
    let mut out = Vec::new();
    while !cur.at_end() {
        out.push(resolve(&mut cur, universe)?);
        if !cur.eat(&Tok::Comma) {
            cur.finish()?;
        }
    }
    Ok(out)
}

/// `vars × vars` minus the identity.
pub fn product_minus_identity(vars: &[Var]) -> Relation<Var> {
    let mut out = Relation::new();
    for &a in vars {
        for &b in vars {
            if a != b {
                out.insert(a, b);
            }
        }
    }
    out
}
