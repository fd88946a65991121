//! `.ctmc` files:
//!
//! ```text
//! states: a, b        # optional; fixes variable order
//! a -> b @ 1
//! b -> a @ 1/2
//! init: a             # optional
//! ```

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_traits::Zero;

use super::crn::Crn;
use super::expr::parse_constant;
use super::lexer::{content_lines, tokenize_line, Cursor, ParseError, Tok};
use super::ModelError;
use crate::poly::{PolyVectorField, Polynomial, Universe, Var};
use crate::Rational;

/// Environment variable overriding [`DEFAULT_STATE_CAP`].
pub const STATE_CAP_ENV: &str = "DIFFBISIM_STATE_CAP";
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// State cap from the environment, or the default.
pub fn default_state_cap() -> usize {
    std::env::var(STATE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_STATE_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub source: usize,
    pub target: usize,
    pub rate: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtmcModel {
    pub states: Vec<String>,
    pub transitions: Vec<Transition>,
    pub initial: Option<usize>,
}

impl CtmcModel {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Forward equations: `f_s = Σ_{s′→s} rate·s′ − (Σ_{s→s″} rate)·s`.
    pub fn to_field(&self) -> PolyVectorField {
        let universe = Universe::from_names(self.states.iter().cloned()).expect("state names are unique");
        let mut rhs = vec![Polynomial::zero(); self.states.len()];
        for t in &self.transitions {
            let src = Polynomial::var(Var::new(t.source)).scale(&t.rate);
            rhs[t.target] = rhs[t.target].add(&src);
            rhs[t.source] = rhs[t.source].sub(&src);
        }
        PolyVectorField::new(universe, rhs).expect("transitions stay within the state space")
    }
}

pub fn parse_ctmc(text: &str) -> Result<CtmcModel, ParseError> {
    let mut states: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut fixed = false;
    let mut initial = None;
    let mut transitions = Vec::new();
    let mut intern = |name: String, line: usize, col: usize, fixed: bool, states: &mut Vec<String>| {
        if let Some(&i) = index.get(&name) {
            return Ok(i);
        }
        if fixed {
            return Err(ParseError::new(line, col, format!("unknown state `{name}`")));
        }
        index.insert(name.clone(), states.len());
        states.push(name);
        Ok(states.len() - 1)
    };
    for (no, l) in content_lines(text) {
        let toks = tokenize_line(l, no)?;
        let mut cur = Cursor::new(toks, no, l.chars().count());
        match (cur.peek().cloned(), cur.peek_at(1).cloned()) {
            (Some(Tok::Ident(kw)), Some(Tok::Colon)) if kw == "states" => {
                let (line, col) = cur.here();
                if fixed || !states.is_empty() {
                    return Err(ParseError::new(line, col, "`states:` must come first and only once"));
                }
                cur.next();
                cur.next();
                loop {
                    let (name, line, col) = cur.ident()?;
                    if states.contains(&name) {
                        return Err(ParseError::new(line, col, format!("duplicate state `{name}`")));
                    }
                    intern(name, line, col, false, &mut states)?;
                    if !cur.eat(&Tok::Comma) {
                        break;
                    }
                }
                cur.finish()?;
                fixed = true;
            }
            (Some(Tok::Ident(kw)), Some(Tok::Colon)) if kw == "init" => {
                let (line, col) = cur.here();
                if initial.is_some() {
                    return Err(ParseError::new(line, col, "`init:` given twice"));
                }
                cur.next();
                cur.next();
                let (name, line, col) = cur.ident()?;
                cur.finish()?;
                initial = Some(intern(name, line, col, fixed, &mut states)?);
            }
            _ => {
                let (a, la, ca) = cur.ident()?;
                cur.expect(&Tok::Arrow)?;
                let (b, lb, cb) = cur.ident()?;
                cur.expect(&Tok::At)?;
                let (line, col) = cur.here();
                let rate = parse_constant(&mut cur, &|_| None)?;
                cur.finish()?;
                if rate <= Rational::zero() {
                    return Err(ParseError::new(line, col, format!("rate must be positive, got {rate}")));
                }
                if a == b {
                    return Err(ParseError::new(la, ca, format!("self-loop on `{a}`")));
                }
                let source = intern(a, la, ca, fixed, &mut states)?;
                let target = intern(b, lb, cb, fixed, &mut states)?;
                transitions.push(Transition { source, target, rate });
            }
        }
    }
    Ok(CtmcModel {
        states,
        transitions,
        initial,
    })
}

pub fn write_ctmc(m: &CtmcModel) -> String {
    let mut out = String::new();
    if !m.states.is_empty() {
        let _ = writeln!(out, "states: {}", m.states.join(", "));
    }
    for t in &m.transitions {
        let _ = writeln!(out, "{} -> {} @ {}", m.states[t.source], m.states[t.target], t.rate);
    }
    if let Some(i) = m.initial {
        let _ = writeln!(out, "init: {}", m.states[i]);
    }
    out
}

fn falling_factorial(n: u64, k: u32) -> u64 {
    (0..u64::from(k)).map(|i| n.saturating_sub(i)).product()
}

fn state_name(crn: &Crn, pop: &[u64]) -> String {
    let parts: Vec<String> = pop
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(s, n)| format!("{}_{n}", crn.universe.name(Var::new(s))))
        .collect();
    if parts.is_empty() {
        "empty".to_string()
    } else {
        parts.join("__")
    }
}

/// Population-semantics CTMC reachable from `initial` (one count per
/// species). A reaction `(ρ → π, k)` fires from `n` with rate
/// `k·Π_s n_s^{(ρ(s))}` (falling factorials); parallel transitions merge and
/// self-loops are dropped. States are named `s_n__t_m` after their nonzero
/// counts; `initial_name` renames the initial state.
pub fn crn_to_ctmc(
    crn: &Crn,
    initial: &[u64],
    initial_name: Option<&str>,
    state_cap: usize,
) -> Result<CtmcModel, ModelError> {
    assert_eq!(initial.len(), crn.universe.len(), "one initial count per species");
    let deltas: Vec<Vec<(usize, i64)>> = crn
        .reactions
        .iter()
        .map(|r| {
            crn.universe
                .vars()
                .filter_map(|s| {
                    let d = r.net(s);
                    (d != 0).then_some((s.index(), d))
                })
                .collect()
        })
        .collect();
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut pops: Vec<Vec<u64>> = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(initial.to_vec(), 0);
    pops.push(initial.to_vec());
    queue.push_back(0usize);
    let mut transitions = Vec::new();
    while let Some(i) = queue.pop_front() {
        let pop = pops[i].clone();
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut order: Vec<usize> = Vec::new();
        for (r, delta) in crn.reactions.iter().zip(&deltas) {
            let propensity: u64 = r
                .reactants
                .iter()
                .map(|(s, &k)| falling_factorial(pop[s.index()], k))
                .product();
            if propensity == 0 || delta.is_empty() {
                continue;
            }
            let mut next = pop.clone();
            for &(s, d) in delta {
                next[s] = (next[s] as i64 + d) as u64;
            }
            let j = match seen.get(&next) {
                Some(&j) => j,
                None => {
                    if pops.len() >= state_cap {
                        return Err(ModelError::StateCap(state_cap));
                    }
                    let j = pops.len();
                    seen.insert(next.clone(), j);
                    pops.push(next);
                    queue.push_back(j);
                    j
                }
            };
            let rate = &r.rate * Rational::from_integer(propensity.into());
            match out.get_mut(&j) {
                Some(acc) => *acc += rate,
                None => {
                    order.push(j);
                    out.insert(j, rate);
                }
            }
        }
        for j in order {
            let rate = out.remove(&j).expect("recorded target");
            transitions.push(Transition {
                source: i,
                target: j,
                rate,
            });
        }
    }
    let mut states: Vec<String> = pops.iter().map(|p| state_name(crn, p)).collect();
    if let Some(name) = initial_name {
        states[0] = name.to_string();
    }
    let mut unique = std::collections::HashSet::new();
    for s in &states {
        if !unique.insert(s) {
            return Err(ModelError::Invalid(format!("state name `{s}` is not unique")));
        }
    }
    Ok(CtmcModel {
        states,
        transitions,
        initial: Some(0),
    })
}

/// Disjoint union of two chains, prefixing state names.
pub fn union_ctmcs(a: &CtmcModel, b: &CtmcModel, prefixes: (&str, &str)) -> Result<CtmcModel, ModelError> {
    let mut states: Vec<String> = a.states.iter().map(|s| format!("{}{s}", prefixes.0)).collect();
    states.extend(b.states.iter().map(|s| format!("{}{s}", prefixes.1)));
    let mut unique = std::collections::HashSet::new();
    for s in &states {
        if !unique.insert(s) {
            return Err(ModelError::Invalid(format!(
                "state `{s}` occurs in both models; pass distinct prefixes"
            )));
        }
    }
    let shift = a.states.len();
    let mut transitions = a.transitions.clone();
    transitions.extend(b.transitions.iter().map(|t| Transition {
        source: t.source + shift,
        target: t.target + shift,
        rate: t.rate.clone(),
    }));
    Ok(CtmcModel {
        states,
        transitions,
        initial: a.initial.or(b.initial.map(|i| i + shift)),
    })
}

/// Parses `x0=2, x2=1` into one count per species (absent species are 0).
pub fn parse_population(text: &str, crn: &Crn) -> Result<Vec<u64>, ParseError> {
    let toks = tokenize_line(text, 1)?;
    let mut cur = Cursor::new(toks, 1, text.chars().count());
    let mut pop = vec![0u64; crn.universe.len()];
    while !cur.at_end() {
        let (name, line, col) = cur.ident()?;
        let s = crn
            .universe
            .get(&name)
            .ok_or_else(|| ParseError::new(line, col, format!("unknown species `{name}`")))?;
        cur.expect(&Tok::Eq)?;
        let (line, col) = cur.here();
        let n = match cur.next().map(|t| t.tok) {
            Some(Tok::Num(q)) if q.is_integer() && q >= Rational::zero() => q.to_integer().try_into().ok(),
            _ => None,
        }
        .ok_or_else(|| ParseError::new(line, col, "population must be a natural number"))?;
        pop[s.index()] = n;
        if !cur.eat(&Tok::Comma) {
            cur.finish()?;
        }
    }
    Ok(pop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelio::crn::parse_crn;

    #[test]
    fn two_state_chain() {
        let m = parse_ctmc("a -> b @ 1\n").unwrap();
        assert_eq!(m.to_field().to_string(), "vars: a, b\nd(a) = -a\nd(b) = a\n");
    }

    #[test]
    fn roundtrip() {
        let text = "states: a, b, c\na -> b @ 1/2\nb -> c @ 3\ninit: b\n";
        let m = parse_ctmc(text).unwrap();
        assert_eq!(write_ctmc(&m), text);
    }

    #[test]
    fn rejects_self_loops_and_bad_rates() {
        assert!(parse_ctmc("a -> a @ 1\n").unwrap_err().message.contains("self-loop"));
        assert!(parse_ctmc("a -> b @ -1\n").unwrap_err().message.contains("positive"));
        assert!(parse_ctmc("states: a\na -> b @ 1\n").unwrap_err().message.contains("unknown state"));
    }

    #[test]
    fn no_reactions_single_state() {
        let crn = parse_crn("species: X\n").unwrap();
        let m = crn_to_ctmc(&crn, &[3], None, 10).unwrap();
        assert_eq!((m.num_states(), m.num_transitions()), (1, 0));
        assert_eq!(m.states, ["X_3"]);
    }

    #[test]
    fn falling_factorial_propensities() {
        let crn = parse_crn("2 A -> B @ 1\n").unwrap();
        let m = crn_to_ctmc(&crn, &[3, 0], Some("start"), 10).unwrap();
        assert_eq!(m.states, ["start", "A_1__B_1"]);
        assert_eq!(m.transitions[0].rate, Rational::from_integer(6.into()));
    }

    #[test]
    fn state_cap_is_reported() {
        let crn = parse_crn("0 -> A @ 1\n").unwrap();
        match crn_to_ctmc(&crn, &[0], None, 5) {
            Err(ModelError::StateCap(5)) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn population_syntax() {
        let crn = parse_crn("A + B -> C @ 1\n").unwrap();
        assert_eq!(parse_population("A=2, C=1", &crn).unwrap(), [2, 0, 1]);
        assert!(parse_population("D=1", &crn).is_err());
        assert!(parse_population("A=1/2", &crn).is_err());
    }
}
