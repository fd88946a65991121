use std::cmp::Ordering;
use std::fmt;

use super::{Universe, Var};

/// A power product of variables. Stored as `(var, exponent)` pairs sorted by
/// variable with strictly positive exponents; the empty product is `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    powers: Vec<(Var, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { powers: Vec::new() }
    }

    pub fn var(var: Var) -> Self {
        Monomial {
            powers: vec![(var, 1)],
        }
    }

    pub fn power(var: Var, exponent: u32) -> Self {
        if exponent == 0 {
            return Self::one();
        }
        Monomial {
            powers: vec![(var, exponent)],
        }
    }

    /// Builds a monomial from arbitrary `(var, exponent)` pairs, merging
    /// repeated variables and dropping zero exponents.
    pub fn from_powers<I: IntoIterator<Item = (Var, u32)>>(powers: I) -> Self {
        let mut powers: Vec<(Var, u32)> = powers.into_iter().filter(|(_, e)| *e > 0).collect();
        powers.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(Var, u32)> = Vec::with_capacity(powers.len());
        for (v, e) in powers {
            match merged.last_mut() {
                Some((last, acc)) if *last == v => *acc += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial { powers: merged }
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty()
    }

    /// Exponent of `var`, zero when absent.
    pub fn exponent(&self, var: Var) -> u32 {
        match self.powers.binary_search_by_key(&var, |(v, _)| *v) {
            Ok(i) => self.powers[i].1,
            Err(_) => 0,
        }
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().map(|(_, e)| e).sum()
    }

    pub fn powers(&self) -> &[(Var, u32)] {
        &self.powers
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.powers.iter().map(|(v, _)| *v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.powers.len() + other.powers.len());
        let (mut i, mut j) = (0, 0);
        while i < self.powers.len() && j < other.powers.len() {
            let (a, ea) = self.powers[i];
            let (b, eb) = other.powers[j];
            match a.cmp(&b) {
                Ordering::Less => {
                    out.push((a, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.powers[i..]);
        out.extend_from_slice(&other.powers[j..]);
        Monomial { powers: out }
    }

    /// Removes one power of `var`; `None` when `var` does not occur.
    pub fn reduce(&self, var: Var) -> Option<Monomial> {
        let i = self.powers.binary_search_by_key(&var, |(v, _)| *v).ok()?;
        let mut powers = self.powers.clone();
        if powers[i].1 == 1 {
            powers.remove(i);
        } else {
            powers[i].1 -= 1;
        }
        Some(Monomial { powers })
    }

    /// Renames every variable through `map`, merging collisions.
    pub fn rename(&self, map: impl Fn(Var) -> Var) -> Monomial {
        Monomial::from_powers(self.powers.iter().map(|&(v, e)| (map(v), e)))
    }

    pub fn display<'a>(&'a self, universe: &'a Universe) -> MonomialDisplay<'a> {
        MonomialDisplay {
            monomial: self,
            universe,
        }
    }
}

/// Graded lexicographic order: total degree first, then the exponent vector
/// read in variable-index order, where a larger exponent on an earlier
/// variable makes the monomial larger.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let by_degree = self.degree().cmp(&other.degree());
        if by_degree != Ordering::Equal {
            return by_degree;
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.powers.get(i), other.powers.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(a, ea)), Some(&(b, eb))) => {
                    if a < b {
                        return Ordering::Greater;
                    }
                    if a > b {
                        return Ordering::Less;
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct MonomialDisplay<'a> {
    monomial: &'a Monomial,
    universe: &'a Universe,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomial.is_one() {
            return f.write_str("1");
        }
        for (k, &(v, e)) in self.monomial.powers.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            f.write_str(self.universe.name(v))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}
