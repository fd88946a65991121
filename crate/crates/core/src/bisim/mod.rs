//! Local BDB/FDB computation, global fixpoint oracles, definition-level
//! checks and quotients.

mod bdb;
mod check;
mod fdb;
mod gfp;
mod jacobian;
mod quotient;

use std::time::Duration;

pub use bdb::{find_bdb, find_bdb_with, BdbOptions};
pub use check::{check_bde, check_fde, check_fde_by_definition, check_fde_by_transposes, is_bdb_up_to, is_fdb_up_to};
pub use fdb::{find_fdb, find_fdb_with, FdbOptions};
pub use gfp::{bde_partition, gfp_bdb, gfp_fdb};
pub use jacobian::{jacobian_decompose, JacobianDecomposition, SparseMatrix};
pub use quotient::{bde_quotient, fde_quotient, fde_quotient_weighted, Weights};

use crate::poly::{Monomial, PolyVectorField, Var};
use crate::relation::{Relation, UpToRejection};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    /// Coupling searches solved as transportation problems.
    pub transport_problems: u64,
    /// Executions of the outer while-loop body.
    pub iterations: u64,
    pub wall_time: Duration,
}

/// Final state of a local run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimResult {
    pub related: Relation<Var>,
    pub refuted: Relation<Var>,
    pub monomial_related: Relation<Monomial>,
    pub monomial_refuted: Relation<Monomial>,
    pub stats: RunStats,
}

impl BisimResult {
    /// Answer for a query pair: related iff it survived in `related`.
    pub fn answer(&self, x: Var, y: Var) -> bool {
        self.related.contains(&x, &y)
    }
}

/// State visible to observers at the end of each while-iteration.
pub struct IterationState<'a> {
    pub iteration: u64,
    pub related: &'a Relation<Var>,
    pub refuted: &'a Relation<Var>,
    pub monomial_related: &'a Relation<Monomial>,
    pub monomial_refuted: &'a Relation<Monomial>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BisimError {
    #[error(transparent)]
    Rejected(#[from] UpToRejection),
    #[error("relation mentions variable {0} outside the universe")]
    ForeignVariable(Var),
    #[error("relation is not an equivalence")]
    NotEquivalence,
    #[error("not a BDE: ({0}, {1}) violates the backward condition")]
    NotBde(String, String),
    #[error("not an FDE: block of {0} violates the forward condition")]
    NotFde(String),
}

pub(crate) fn check_vars(f: &PolyVectorField, relations: &[&Relation<Var>]) -> Result<(), BisimError> {
    let n = f.dim();
    for r in relations {
        for &(a, b) in r.iter() {
            for v in [a, b] {
                if v.index() >= n {
                    return Err(BisimError::ForeignVariable(v));
                }
            }
        }
    }
    Ok(())
}
