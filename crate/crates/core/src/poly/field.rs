use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use super::{Monomial, PolyError, Polynomial, Rational, Universe, Var};

/// A polynomial vector field `f`: one right-hand side per universe variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    universe: Universe,
    rhs: Vec<Polynomial>,
}

impl PolyVectorField {
    pub fn new(universe: Universe, rhs: Vec<Polynomial>) -> Result<Self, PolyError> {
        if rhs.len() != universe.len() {
            return Err(PolyError::ArityMismatch {
                expected: universe.len(),
                got: rhs.len(),
            });
        }
        for (x, p) in universe.vars().zip(&rhs) {
            if p.vars().iter().any(|v| !universe.contains(*v)) {
                return Err(PolyError::ForeignVariable(universe.name(x).to_string()));
            }
        }
        Ok(PolyVectorField { universe, rhs })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn vars(&self) -> impl DoubleEndedIterator<Item = Var> + ExactSizeIterator + '_ {
        self.universe.vars()
    }

    /// `f_x`.
    pub fn rhs(&self, x: Var) -> &Polynomial {
        &self.rhs[x.index()]
    }

    pub fn rhs_all(&self) -> &[Polynomial] {
        &self.rhs
    }

    pub fn name(&self, x: Var) -> &str {
        self.universe.name(x)
    }

    pub fn var(&self, name: &str) -> Result<Var, PolyError> {
        self.universe.lookup(name)
    }

    /// The set `M_f` of monomials occurring in some right-hand side.
    pub fn monomials(&self) -> BTreeSet<Monomial> {
        self.rhs.iter().flat_map(|p| p.monomials().cloned()).collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.rhs.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    /// Whether every right-hand side has degree at most one.
    pub fn is_linear(&self) -> bool {
        self.max_degree() <= 1
    }

    pub fn evaluate(&self, v: &Valuation) -> Result<Vec<Rational>, PolyError> {
        self.rhs.iter().map(|p| p.evaluate(v)).collect()
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars: {}", self.universe.names().join(", "))?;
        for (x, p) in self.universe.vars().zip(&self.rhs) {
            writeln!(f, "d({}) = {}", self.universe.name(x), p.display(&self.universe))?;
        }
        Ok(())
    }
}

/// A rational point `v ∈ ℚ^X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation {
    values: Vec<Rational>,
}

impl Valuation {
    pub fn new(values: Vec<Rational>) -> Self {
        Valuation { values }
    }

    pub fn constant(universe: &Universe, c: Rational) -> Self {
        Valuation {
            values: vec![c; universe.len()],
        }
    }

    pub fn get(&self, x: Var) -> Option<&Rational> {
        self.values.get(x.index())
    }

    pub fn set(&mut self, x: Var, value: Rational) {
        if x.index() >= self.values.len() {
            self.values.resize(x.index() + 1, Rational::zero());
        }
        self.values[x.index()] = value;
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}
