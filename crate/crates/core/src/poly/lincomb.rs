use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::Rational;

/// A finite linear combination `Σ c_a · a` over an atom alphabet `A` with
/// nonzero rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinComb<A: Ord> {
    coeffs: BTreeMap<A, Rational>,
}

impl<A: Ord> Default for LinComb<A> {
    fn default() -> Self {
        LinComb {
            coeffs: BTreeMap::new(),
        }
    }
}

impl<A: Ord + Clone> LinComb<A> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(atom: A, coeff: Rational) -> Self {
        let mut out = Self::zero();
        out.add_term(atom, coeff);
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (A, Rational)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (a, c) in terms {
            out.add_term(a, c);
        }
        out
    }

    /// Adds `coeff · atom`, removing the entry if it cancels.
    pub fn add_term(&mut self, atom: A, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.coeffs.entry(atom) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, atom: &A) -> Rational {
        self.coeffs.get(atom).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&A, &Rational)> + ExactSizeIterator {
        self.coeffs.iter()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &A> {
        self.coeffs.keys()
    }

    pub fn sum_coeffs(&self) -> Rational {
        self.coeffs.values().fold(Rational::zero(), |acc, c| acc + c)
    }

    /// Splits `g` into `(g⁺, g⁻)` with `g = g⁺ − g⁻`, both having strictly
    /// positive coefficients and disjoint supports.
    pub fn pos_neg(&self) -> (LinComb<A>, LinComb<A>) {
        let mut pos = BTreeMap::new();
        let mut neg = BTreeMap::new();
        for (a, c) in &self.coeffs {
            if c.is_positive() {
                pos.insert(a.clone(), c.clone());
            } else {
                neg.insert(a.clone(), -c.clone());
            }
        }
        (LinComb { coeffs: pos }, LinComb { coeffs: neg })
    }

    pub fn add(&self, other: &LinComb<A>) -> LinComb<A> {
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LinComb<A>) -> LinComb<A> {
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_term(a.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> LinComb<A> {
        if factor.is_zero() {
            return Self::zero();
        }
        LinComb {
            coeffs: self
                .coeffs
                .iter()
                .map(|(a, c)| (a.clone(), c * factor))
                .collect(),
        }
    }

    pub fn into_map(self) -> BTreeMap<A, Rational> {
        self.coeffs
    }

    pub fn as_map(&self) -> &BTreeMap<A, Rational> {
        &self.coeffs
    }
}

impl<A: Ord + Clone> FromIterator<(A, Rational)> for LinComb<A> {
    fn from_iter<I: IntoIterator<Item = (A, Rational)>>(iter: I) -> Self {
        Self::from_terms(iter)
    }
}
