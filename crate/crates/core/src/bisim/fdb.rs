use std::time::Instant;

use rayon::prelude::*;

use super::{check_vars, jacobian_decompose, BisimError, BisimResult, IterationState, RunStats};
use crate::coupling::find_linear_coupling_by;
use crate::poly::{LinComb, PolyVectorField, Var};
use crate::relation::{ClosureView, Relation, UpTo};
use crate::transport::ArcClass;

type Witness = Option<Vec<(Var, Var)>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FdbOptions {
    pub up_to: UpTo,
    pub parallel: bool,
}

impl Default for FdbOptions {
    fn default() -> Self {
        FdbOptions {
            up_to: UpTo::Identity,
            parallel: false,
        }
    }
}

/// Computes an FDB (up to `up_to`) around `query`: a relation that is a BDB
/// of every transposed Jacobian term `J_kᵀ`.
pub fn find_fdb(f: &PolyVectorField, query: &Relation<Var>, up_to: UpTo) -> Result<BisimResult, BisimError> {
    find_fdb_with(f, query, FdbOptions { up_to, parallel: false }, &mut |_| {})
}

pub fn find_fdb_with(
    f: &PolyVectorField,
    query: &Relation<Var>,
    opts: FdbOptions,
    observer: &mut dyn FnMut(&IterationState<'_>),
) -> Result<BisimResult, BisimError> {
    check_vars(f, &[query])?;
    let start = Instant::now();
    let rows = jacobian_decompose(f).transposed_rows(f.dim());
    let mut r = query.clone();
    let mut r_hat = Relation::new();
    let empty_q = Relation::new();
    let mut tp = 0;
    let mut iterations = 0;
    let mut changed = !r.is_empty();
    while changed {
        iterations += 1;
        changed = false;
        let snapshot: Vec<(Var, Var)> = r.iter().copied().collect();
        if opts.parallel {
            let view = ClosureView::new(opts.up_to, r.clone(), f.dim());
            let results: Vec<(Witness, u64)> = snapshot
                .par_iter()
                .map(|&pair| {
                    let mut count = 0;
                    (check_pair(&rows, pair, &view, &r_hat, &mut count), count)
                })
                .collect();
            for (pair, (outcome, count)) in snapshot.into_iter().zip(results) {
                tp += count;
                changed |= apply(&mut r, &mut r_hat, pair, outcome);
            }
        } else {
            let mut view = ClosureView::new(opts.up_to, r.clone(), f.dim());
            for pair in snapshot {
                let outcome = check_pair(&rows, pair, &view, &r_hat, &mut tp);
                if apply(&mut r, &mut r_hat, pair, outcome) {
                    changed = true;
                    view = ClosureView::new(opts.up_to, r.clone(), f.dim());
                }
            }
        }
        observer(&IterationState {
            iteration: iterations,
            related: &r,
            refuted: &r_hat,
            monomial_related: &empty_q,
            monomial_refuted: &empty_q,
        });
    }
    debug_assert!(super::is_fdb_up_to(f, &r, opts.up_to));
    Ok(BisimResult {
        related: r,
        refuted: r_hat,
        monomial_related: Relation::new(),
        monomial_refuted: Relation::new(),
        stats: RunStats {
            transport_problems: tp,
            iterations,
            wall_time: start.elapsed(),
        },
    })
}

fn apply(r: &mut Relation<Var>, r_hat: &mut Relation<Var>, (x, y): (Var, Var), outcome: Option<Vec<(Var, Var)>>) -> bool {
    match outcome {
        Some(pairs) => {
            let mut grew = false;
            for (a, b) in pairs {
                grew |= r.insert(a, b);
            }
            grew
        }
        None => {
            r.remove(&x, &y);
            r_hat.insert(x, y);
            true
        }
    }
}

/// Couplings for `((J_kᵀ)_x, (J_kᵀ)_y)` for every `k`, avoiding `R̂`. Returns
/// the union of supports outside `g(R)`, or `None` if some term has none.
fn check_pair(
    rows: &[Vec<LinComb<Var>>],
    (x, y): (Var, Var),
    view: &ClosureView,
    r_hat: &Relation<Var>,
    tp: &mut u64,
) -> Option<Vec<(Var, Var)>> {
    let mut additions = Vec::new();
    for term in rows {
        let (g, h) = (&term[x.index()], &term[y.index()]);
        if g.is_zero() && h.is_zero() {
            continue;
        }
        *tp += 1;
        if g.sum_coeffs() != h.sum_coeffs() {
            return None;
        }
        let omega = find_linear_coupling_by(g, h, |&a, &b| {
            if r_hat.contains(&a, &b) {
                ArcClass::Forbidden
            } else if view.contains(a, b) {
                ArcClass::Cost(0)
            } else if a == b {
                ArcClass::Cost(1)
            } else {
                ArcClass::Cost(2)
            }
        })?;
        additions.extend(omega.support().filter(|&&(a, b)| !view.contains(a, b)).copied());
    }
    additions.sort();
    additions.dedup();
    Some(additions)
}
