//! `.crn` files:
//!
//! ```text
//! species: A, B, C      # optional; fixes variable order
//! const k = 2
//! A + B -> C @ k
//! 2 A <-> B @ 1, 1/2    # forward and reverse rates
//! C -> 0 @ 1            # `0` (or nothing) is the empty multiset
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_traits::{One, Zero};

use super::expr::parse_constant;
use super::lexer::{content_lines, small_natural, tokenize_line, Cursor, ParseError, Tok};
use crate::poly::{Monomial, PolyVectorField, Polynomial, Universe, Var};
use crate::Rational;

/// Multiset of species.
pub type Complex = BTreeMap<Var, u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reaction {
    pub reactants: Complex,
    pub products: Complex,
    pub rate: Rational,
    /// 1-based index of the source line among reaction lines.
    pub origin: usize,
    /// Whether this is the right-to-left half of a `<->` line.
    pub reverse: bool,
}

impl Reaction {
    /// The mass-action monomial `Π s^ρ(s)`.
    pub fn monomial(&self) -> Monomial {
        Monomial::from_powers(self.reactants.iter().map(|(&s, &k)| (s, k)))
    }

    /// Net stoichiometric change of `s`.
    pub fn net(&self, s: Var) -> i64 {
        i64::from(self.products.get(&s).copied().unwrap_or(0)) - i64::from(self.reactants.get(&s).copied().unwrap_or(0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crn {
    pub universe: Universe,
    pub reactions: Vec<Reaction>,
}

impl Crn {
    pub fn new(universe: Universe) -> Self {
        Crn {
            universe,
            reactions: Vec::new(),
        }
    }

    /// Mass-action translation: each reaction `(ρ → π, k)` adds
    /// `(π(s) − ρ(s))·k·Π s^ρ(s)` to every `f_s`.
    pub fn to_field(&self) -> PolyVectorField {
        let mut rhs = vec![Polynomial::zero(); self.universe.len()];
        for r in &self.reactions {
            let m = r.monomial();
            let species: std::collections::BTreeSet<Var> =
                r.reactants.keys().chain(r.products.keys()).copied().collect();
            for s in species {
                let net = r.net(s);
                if net != 0 {
                    let c = &r.rate * Rational::from_integer(net.into());
                    rhs[s.index()] = rhs[s.index()].add(&Polynomial::monomial(m.clone(), c));
                }
            }
        }
        PolyVectorField::new(self.universe.clone(), rhs).expect("reactions only use declared species")
    }
}

fn parse_complex(cur: &mut Cursor, universe: &mut Universe, fixed: bool) -> Result<Complex, ParseError> {
    let mut out = Complex::new();
    match cur.peek() {
        Some(Tok::Arrow) | Some(Tok::BiArrow) | Some(Tok::At) => return Ok(out),
        Some(Tok::Num(q)) if q.is_zero() => {
            cur.next();
            return Ok(out);
        }
        _ => {}
    }
    loop {
        let mut count = 1;
        if let Some(Tok::Num(q)) = cur.peek().cloned() {
            let (line, col) = cur.here();
            count = small_natural(&q)
                .filter(|k| *k > 0)
                .ok_or_else(|| ParseError::new(line, col, "stoichiometry must be a positive integer"))?;
            cur.next();
            cur.eat(&Tok::Star);
        }
        let (name, line, col) = cur.ident()?;
        let s = match universe.get(&name) {
            Some(s) => s,
            None if fixed => return Err(ParseError::new(line, col, format!("unknown species `{name}`"))),
            None => universe.add(name).map_err(|e| ParseError::new(line, col, e.to_string()))?,
        };
        *out.entry(s).or_insert(0) += count;
        if !cur.eat(&Tok::Plus) {
            return Ok(out);
        }
    }
}

fn parse_rate(cur: &mut Cursor, consts: &HashMap<String, Rational>) -> Result<Rational, ParseError> {
    let (line, col) = cur.here();
    let k = parse_constant(cur, &|n| consts.get(n).cloned())?;
    if k <= Rational::zero() {
        return Err(ParseError::new(line, col, format!("rate must be positive, got {k}")));
    }
    Ok(k)
}

pub fn parse_crn(text: &str) -> Result<Crn, ParseError> {
    let mut universe = Universe::new();
    let mut fixed = false;
    let mut consts: HashMap<String, Rational> = HashMap::new();
    let mut reactions = Vec::new();
    let mut origin = 0;
    for (no, l) in content_lines(text) {
        let toks = tokenize_line(l, no)?;
        let mut cur = Cursor::new(toks, no, l.chars().count());
        match (cur.peek().cloned(), cur.peek_at(1).cloned()) {
            (Some(Tok::Ident(kw)), Some(Tok::Colon)) if kw == "species" => {
                let (line, col) = cur.here();
                if fixed || origin > 0 {
                    return Err(ParseError::new(line, col, "`species:` must come first and only once"));
                }
                cur.next();
                cur.next();
                loop {
                    let (name, line, col) = cur.ident()?;
                    universe.add(name).map_err(|e| ParseError::new(line, col, e.to_string()))?;
                    if !cur.eat(&Tok::Comma) {
                        break;
                    }
                }
                cur.finish()?;
                fixed = true;
            }
            (Some(Tok::Ident(kw)), Some(Tok::Ident(_))) if kw == "const" => {
                cur.next();
                let (name, line, col) = cur.ident()?;
                if consts.contains_key(&name) {
                    return Err(ParseError::new(line, col, format!("`{name}` is already defined")));
                }
                cur.expect(&Tok::Eq)?;
                let value = parse_constant(&mut cur, &|n| consts.get(n).cloned())?;
                cur.finish()?;
                consts.insert(name, value);
            }
            _ => {
                origin += 1;
                let reactants = parse_complex(&mut cur, &mut universe, fixed)?;
                let reversible = match cur.peek() {
                    Some(Tok::Arrow) => false,
                    Some(Tok::BiArrow) => true,
                    _ => return Err(cur.unexpected("`->` or `<->`")),
                };
                cur.next();
                let products = parse_complex(&mut cur, &mut universe, fixed)?;
                cur.expect(&Tok::At)?;
                let forward = parse_rate(&mut cur, &consts)?;
                let backward = if reversible {
                    cur.expect(&Tok::Comma)?;
                    Some(parse_rate(&mut cur, &consts)?)
                } else {
                    None
                };
                cur.finish()?;
                if let Some(k) = backward {
                    reactions.push(Reaction {
                        reactants: reactants.clone(),
                        products: products.clone(),
                        rate: forward,
                        origin,
                        reverse: false,
                    });
                    reactions.push(Reaction {
                        reactants: products,
                        products: reactants,
                        rate: k,
                        origin,
                        reverse: true,
                    });
                } else {
                    reactions.push(Reaction {
                        reactants,
                        products,
                        rate: forward,
                        origin,
                        reverse: false,
                    });
                }
            }
        }
    }
    Ok(Crn { universe, reactions })
}

fn write_complex(out: &mut String, c: &Complex, u: &Universe) {
    if c.is_empty() {
        out.push('0');
        return;
    }
    for (i, (&s, &k)) in c.iter().enumerate() {
        if i > 0 {
            out.push_str(" + ");
        }
        if k != 1 {
            let _ = write!(out, "{k} ");
        }
        out.push_str(u.name(s));
    }
}

/// Canonical `.crn` text. A forward reaction immediately followed by its
/// reverse half is written as one `<->` line.
pub fn write_crn(crn: &Crn) -> String {
    let u = &crn.universe;
    let mut out = String::new();
    if !u.is_empty() {
        let _ = writeln!(out, "species: {}", u.names().join(", "));
    }
    let mut i = 0;
    while i < crn.reactions.len() {
        let r = &crn.reactions[i];
        let pair = crn.reactions.get(i + 1).filter(|b| {
            b.reverse && !r.reverse && b.origin == r.origin && b.reactants == r.products && b.products == r.reactants
        });
        write_complex(&mut out, &r.reactants, u);
        out.push_str(if pair.is_some() { " <-> " } else { " -> " });
        write_complex(&mut out, &r.products, u);
        let _ = write!(out, " @ {}", r.rate);
        if let Some(b) = pair {
            let _ = write!(out, ", {}", b.rate);
            i += 1;
        }
        out.push('\n');
        i += 1;
    }
    out
}

/// Replaces every rate `k` by `1` and adds a fresh parameter species to both
/// sides; its concentration plays the role of `k`. Forward halves and
/// irreversible reactions of line `i` use `k{i}`, reverse halves `kr{i}`.
pub fn extend_params(crn: &Crn) -> Crn {
    let mut universe = crn.universe.clone();
    let mut reactions = Vec::with_capacity(crn.reactions.len());
    for r in &crn.reactions {
        let base = if r.reverse {
            format!("kr{}", r.origin)
        } else {
            format!("k{}", r.origin)
        };
        let p = universe.fresh(&base);
        let mut reactants = r.reactants.clone();
        let mut products = r.products.clone();
        *reactants.entry(p).or_insert(0) += 1;
        *products.entry(p).or_insert(0) += 1;
        reactions.push(Reaction {
            reactants,
            products,
            rate: Rational::one(),
            origin: r.origin,
            reverse: r.reverse,
        });
    }
    Crn { universe, reactions }
}
