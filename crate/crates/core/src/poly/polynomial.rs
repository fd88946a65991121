use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{LinComb, Monomial, PolyError, Rational, Universe, Valuation, Var};

/// A polynomial in canonical form: a linear combination of distinct monomials
/// with nonzero coefficients. Structural equality is polynomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: LinComb<Monomial>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial {
            terms: LinComb::term(Monomial::one(), c),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        Polynomial {
            terms: LinComb::term(m, c),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        Polynomial {
            terms: LinComb::from_terms(terms),
        }
    }

    pub fn from_lincomb(terms: LinComb<Monomial>) -> Self {
        Polynomial { terms }
    }

    pub fn as_lincomb(&self) -> &LinComb<Monomial> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `m`, i.e. `p(m)`.
    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.coeff(m)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.atoms()
    }

    pub fn degree(&self) -> u32 {
        self.terms.atoms().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.atoms().flat_map(|m| m.vars()).collect()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        Polynomial {
            terms: self.terms.add(&other.terms),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        Polynomial {
            terms: self.terms.sub(&other.terms),
        }
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        Polynomial {
            terms: self.terms.scale(c),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = LinComb::zero();
        for (m, a) in self.terms.iter() {
            for (n, b) in other.terms.iter() {
                out.add_term(m.mul(n), a * b);
            }
        }
        Polynomial { terms: out }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn evaluate(&self, v: &Valuation) -> Result<Rational, PolyError> {
        let mut total = Rational::zero();
        for (m, c) in self.terms.iter() {
            let mut term = c.clone();
            for &(x, e) in m.powers() {
                let val = v.get(x).ok_or_else(|| PolyError::MissingValue(x.to_string()))?;
                term *= num_traits::pow(val.clone(), e as usize);
            }
            total += term;
        }
        Ok(total)
    }

    /// Simultaneous substitution; variables without an image are kept.
    pub fn substitute(&self, sigma: &HashMap<Var, Polynomial>) -> Polynomial {
        self.substitute_with(|x| sigma.get(&x).cloned())
    }

    pub fn substitute_with(&self, sigma: impl Fn(Var) -> Option<Polynomial>) -> Polynomial {
        let mut powers: HashMap<(Var, u32), Polynomial> = HashMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in self.terms.iter() {
            let mut term = Polynomial::constant(c.clone());
            for &(x, e) in m.powers() {
                let p = powers
                    .entry((x, e))
                    .or_insert_with(|| sigma(x).unwrap_or_else(|| Polynomial::var(x)).pow(e));
                term = term.mul(p);
            }
            out = out.add(&term);
        }
        out
    }

    /// Renames variables monomial-wise. Cheaper than [`Self::substitute`] when
    /// every image is a single variable.
    pub fn rename(&self, map: impl Fn(Var) -> Var) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.rename(&map), c.clone())))
    }

    pub fn partial_derivative(&self, x: Var) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(x);
            let reduced = m.reduce(x)?;
            Some((reduced, c * Rational::from_integer(e.into())))
        }))
    }

    pub fn display<'a>(&'a self, universe: &'a Universe) -> PolynomialDisplay<'a> {
        PolynomialDisplay {
            poly: self,
            universe,
        }
    }
}

/// Canonical text rendering: terms in descending graded-lex order, e.g.
/// `-4*A00*B + 3*A01 + 3*A10`.
pub struct PolynomialDisplay<'a> {
    poly: &'a Polynomial,
    universe: &'a Universe,
}

impl fmt::Display for PolynomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.poly.terms().rev().enumerate() {
            let abs = c.abs();
            match (k, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", m.display(self.universe))?;
            } else {
                write!(f, "{abs}*{}", m.display(self.universe))?;
            }
        }
        Ok(())
    }
}
