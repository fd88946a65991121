use crate::coupling::{in_linear_lifting, in_poly_lifting};
use crate::poly::{PolyVectorField, Var};
use crate::relation::{Partition, Relation};

use super::jacobian_decompose;

/// Greatest C-constrained BDB by Kleene iteration of `B_C` from `(X×X) \ C`.
pub fn gfp_bdb(f: &PolyVectorField, constraints: &Relation<Var>) -> Relation<Var> {
    let mut current = Relation::full(f.universe()).difference(constraints);
    loop {
        // current is already disjoint from C, so B_C(current) restricted to
        // current is a plain lifting check.
        let next: Relation<Var> = current
            .iter()
            .filter(|(x, y)| in_poly_lifting(f.rhs(*x), f.rhs(*y), |a, b| current.contains(&a, &b)))
            .copied()
            .collect();
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Greatest FDB: Kleene iteration of `∩_k B^{J_kᵀ}` from `X×X`.
pub fn gfp_fdb(f: &PolyVectorField) -> Relation<Var> {
    let rows = jacobian_decompose(f).transposed_rows(f.dim());
    let mut current = Relation::full(f.universe());
    loop {
        let next: Relation<Var> = current
            .iter()
            .filter(|(x, y)| {
                rows.iter().all(|term| {
                    in_linear_lifting(&term[x.index()], &term[y.index()], |a, b| current.contains(a, b))
                })
            })
            .copied()
            .collect();
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Blocks of the largest BDE.
pub fn bde_partition(f: &PolyVectorField) -> Partition {
    Partition::from_relation(f.universe(), &gfp_bdb(f, &Relation::new()))
}
