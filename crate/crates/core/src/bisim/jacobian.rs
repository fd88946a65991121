use std::collections::BTreeMap;

use num_traits::Zero;

use crate::poly::{LinComb, Monomial, PolyError, PolyVectorField, Polynomial, Var};
use crate::Rational;

/// Sparse constant matrix indexed by `(row, column)` variables.
pub type SparseMatrix = BTreeMap<(Var, Var), Rational>;

/// `∂f = Σ_k m_k · J_k` with pairwise distinct monomials `m_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobianDecomposition {
    terms: BTreeMap<Monomial, SparseMatrix>,
}

/// Builds the decomposition term by term: each monomial `m` of `f_{x_i}`
/// containing `x_j` contributes `m(x_j)·α` to entry `(x_i, x_j)` of `J_n`,
/// where `n` is `m` with one power of `x_j` removed.
pub fn jacobian_decompose(f: &PolyVectorField) -> JacobianDecomposition {
    let mut terms: BTreeMap<Monomial, SparseMatrix> = BTreeMap::new();
    for xi in f.vars() {
        for (m, alpha) in f.rhs(xi).terms() {
            for &(xj, e) in m.powers() {
                let n = m.reduce(xj).expect("x_j occurs in m");
                let entry = terms
                    .entry(n)
                    .or_default()
                    .entry((xi, xj))
                    .or_insert_with(Rational::zero);
                *entry += alpha * Rational::from_integer(e.into());
            }
        }
    }
    for matrix in terms.values_mut() {
        matrix.retain(|_, v| !v.is_zero());
    }
    terms.retain(|_, m| !m.is_empty());
    JacobianDecomposition { terms }
}

impl JacobianDecomposition {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &SparseMatrix)> {
        self.terms.iter()
    }

    pub fn matrix(&self, m: &Monomial) -> Option<&SparseMatrix> {
        self.terms.get(m)
    }

    pub fn nonzeros(&self) -> usize {
        self.terms.values().map(BTreeMap::len).sum()
    }

    /// `Σ_k m_k · J_k[x_i][x_j]`.
    pub fn entry(&self, xi: Var, xj: Var) -> Polynomial {
        Polynomial::from_terms(
            self.terms
                .iter()
                .filter_map(|(m, j)| j.get(&(xi, xj)).map(|c| (m.clone(), c.clone()))),
        )
    }

    /// For each term, the rows of `J_kᵀ` as linear combinations:
    /// `(J_kᵀ)_x = Σ_i J_k[x_i][x] · x_i`.
    pub fn transposed_rows(&self, dim: usize) -> Vec<Vec<LinComb<Var>>> {
        self.terms
            .values()
            .map(|j| {
                let mut rows = vec![LinComb::zero(); dim];
                for ((xi, x), c) in j {
                    rows[x.index()].add_term(*xi, c.clone());
                }
                rows
            })
            .collect()
    }

    /// The linear vector fields `v ↦ J_kᵀ v` over the universe of `f`.
    pub fn transposed_fields(&self, f: &PolyVectorField) -> Result<Vec<PolyVectorField>, PolyError> {
        self.transposed_rows(f.dim())
            .into_iter()
            .map(|rows| {
                let rhs = rows
                    .into_iter()
                    .map(|row| Polynomial::from_terms(row.iter().map(|(v, c)| (Monomial::var(*v), c.clone()))))
                    .collect();
                PolyVectorField::new(f.universe().clone(), rhs)
            })
            .collect()
    }
}
