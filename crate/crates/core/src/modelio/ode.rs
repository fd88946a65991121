//! `.ode` files:
//!
//! ```text
//! # optional; fixes variable order
//! vars: x, y
//! const beta = 1/2
//! d(x) = -beta*x*y
//! d(y) = beta*x*y - y
//! ```

use std::collections::HashMap;

use super::expr::{parse_constant, parse_expr, Symbol};
use super::lexer::{content_lines, tokenize_line, Cursor, ParseError, Tok};
use crate::poly::{PolyVectorField, Polynomial, Universe};
use crate::Rational;

enum Line {
    Vars(Vec<(String, usize, usize)>),
    Const(String, usize, usize, Cursor),
    Equation(String, usize, usize, Cursor),
}

fn classify(line_no: usize, text: &str) -> Result<Line, ParseError> {
    let toks = tokenize_line(text, line_no)?;
    let mut cur = Cursor::new(toks, line_no, text.chars().count());
    match (cur.peek().cloned(), cur.peek_at(1).cloned()) {
        (Some(Tok::Ident(kw)), Some(Tok::Colon)) if kw == "vars" => {
            cur.next();
            cur.next();
            let mut names = vec![cur.ident()?];
            while cur.eat(&Tok::Comma) {
                names.push(cur.ident()?);
            }
            cur.finish()?;
            Ok(Line::Vars(names))
        }
        (Some(Tok::Ident(kw)), Some(Tok::Ident(_))) if kw == "const" => {
            cur.next();
            let (name, l, c) = cur.ident()?;
            cur.expect(&Tok::Eq)?;
            Ok(Line::Const(name, l, c, cur))
        }
        (Some(Tok::Ident(d)), Some(Tok::LParen)) if d == "d" => {
            cur.next();
            cur.next();
            let (name, l, c) = cur.ident()?;
            cur.expect(&Tok::RParen)?;
            cur.expect(&Tok::Eq)?;
            Ok(Line::Equation(name, l, c, cur))
        }
        _ => Err(cur.error("expected `vars:`, `const NAME = ...` or `d(NAME) = ...`")),
    }
}

pub fn parse_ode(text: &str) -> Result<PolyVectorField, ParseError> {
    let mut lines = Vec::new();
    for (no, l) in content_lines(text) {
        lines.push(classify(no, l)?);
    }

    let mut universe = Universe::new();
    let mut declared_at: Option<(usize, usize)> = None;
    let mut seen_equation = false;
    for line in &lines {
        match line {
            Line::Vars(names) => {
                let (l, c) = (names[0].1, names[0].2);
                if declared_at.is_some() {
                    return Err(ParseError::new(l, c, "`vars:` given twice"));
                }
                if seen_equation {
                    return Err(ParseError::new(l, c, "`vars:` must precede the equations"));
                }
                declared_at = Some((l, c));
                for (name, l, c) in names {
                    universe
                        .add(name.clone())
                        .map_err(|e| ParseError::new(*l, *c, e.to_string()))?;
                }
            }
            Line::Equation(..) => seen_equation = true,
            Line::Const(..) => {}
        }
    }
    if declared_at.is_none() {
        for line in &lines {
            if let Line::Equation(name, l, c, _) = line {
                if universe.get(name).is_some() {
                    return Err(ParseError::new(*l, *c, format!("duplicate equation for `{name}`")));
                }
                universe
                    .add(name.clone())
                    .map_err(|e| ParseError::new(*l, *c, e.to_string()))?;
            }
        }
    }

    let mut consts: HashMap<String, Rational> = HashMap::new();
    let mut rhs: Vec<Option<Polynomial>> = vec![None; universe.len()];
    for line in lines {
        match line {
            Line::Vars(_) => {}
            Line::Const(name, l, c, mut cur) => {
                if universe.get(&name).is_some() || consts.contains_key(&name) {
                    return Err(ParseError::new(l, c, format!("`{name}` is already defined")));
                }
                let value = parse_constant(&mut cur, &|n| consts.get(n).cloned())?;
                cur.finish()?;
                consts.insert(name, value);
            }
            Line::Equation(name, l, c, mut cur) => {
                let x = universe
                    .get(&name)
                    .ok_or_else(|| ParseError::new(l, c, format!("unknown variable `{name}`")))?;
                if rhs[x.index()].is_some() {
                    return Err(ParseError::new(l, c, format!("duplicate equation for `{name}`")));
                }
                let p = parse_expr(&mut cur, &|n| {
                    universe
                        .get(n)
                        .map(Symbol::Var)
                        .or_else(|| consts.get(n).cloned().map(Symbol::Const))
                })?;
                cur.finish()?;
                rhs[x.index()] = Some(p);
            }
        }
    }

    let mut out = Vec::with_capacity(rhs.len());
    for (x, p) in universe.vars().zip(rhs) {
        match p {
            Some(p) => out.push(p),
            None => {
                let (l, c) = declared_at.unwrap_or((1, 1));
                return Err(ParseError::new(
                    l,
                    c,
                    format!("no equation for declared variable `{}`", universe.name(x)),
                ));
            }
        }
    }
    Ok(PolyVectorField::new(universe, out).expect("parser only builds in-universe polynomials"))
}

/// Canonical `.ode` text; parsing it back yields the same field.
pub fn write_ode(f: &PolyVectorField) -> String {
    f.to_string()
}
