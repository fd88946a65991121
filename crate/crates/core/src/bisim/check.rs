use super::{jacobian_decompose, BisimError};
use crate::coupling::{in_linear_lifting, in_poly_lifting};
use crate::poly::{PolyVectorField, Polynomial, Universe, Var};
use crate::relation::{ClosureView, Partition, Relation, UpTo};

fn partition_of(f: &PolyVectorField, r: &Relation<Var>) -> Result<Partition, BisimError> {
    super::check_vars(f, &[r])?;
    if !r.is_equivalence(f.universe()) {
        return Err(BisimError::NotEquivalence);
    }
    Ok(Partition::from_relation(f.universe(), r))
}

/// First pair of a block whose right-hand sides differ after replacing every
/// variable by its block representative.
pub(crate) fn bde_violation(f: &PolyVectorField, p: &Partition) -> Option<(Var, Var)> {
    let collapsed: Vec<Polynomial> = f
        .rhs_all()
        .iter()
        .map(|rhs| rhs.rename(|z| p.representative(z)))
        .collect();
    for block in p.blocks() {
        let rep = block[0];
        for &y in &block[1..] {
            if collapsed[rep.index()] != collapsed[y.index()] {
                return Some((rep, y));
            }
        }
    }
    None
}

/// Whether the equivalence `r` is a BDE of `f`.
pub fn check_bde(f: &PolyVectorField, r: &Relation<Var>) -> Result<bool, BisimError> {
    let p = partition_of(f, r)?;
    Ok(bde_violation(f, &p).is_none())
}

/// FDE check straight from the definition: for related `x, y` and a fresh
/// `λ`, substituting `x ↦ λ(x+y)`, `y ↦ (1−λ)(x+y)` leaves every block sum
/// unchanged.
pub fn check_fde_by_definition(f: &PolyVectorField, r: &Relation<Var>) -> Result<bool, BisimError> {
    let p = partition_of(f, r)?;
    Ok(fde_violation(f, &p).is_none())
}

pub(crate) fn fde_violation(f: &PolyVectorField, p: &Partition) -> Option<Var> {
    let mut universe: Universe = f.universe().clone();
    let lambda = Polynomial::var(universe.fresh("lambda"));
    let sums: Vec<Polynomial> = p
        .blocks()
        .iter()
        .map(|b| b.iter().fold(Polynomial::zero(), |acc, z| acc.add(f.rhs(*z))))
        .collect();
    for block in p.blocks() {
        for (i, &x) in block.iter().enumerate() {
            for &y in &block[i + 1..] {
                let total = Polynomial::var(x).add(&Polynomial::var(y));
                let to_x = lambda.mul(&total);
                let to_y = Polynomial::one().sub(&lambda).mul(&total);
                for sum in &sums {
                    let moved = sum.substitute_with(|z| {
                        if z == x {
                            Some(to_x.clone())
                        } else if z == y {
                            Some(to_y.clone())
                        } else {
                            None
                        }
                    });
                    if &moved != sum {
                        return Some(x);
                    }
                }
            }
        }
    }
    None
}

/// FDE check through the transposed Jacobian terms: `r` is an FDE of `f`
/// iff it is a BDE of every linear field `J_kᵀ`.
pub fn check_fde_by_transposes(f: &PolyVectorField, r: &Relation<Var>) -> Result<bool, BisimError> {
    let p = partition_of(f, r)?;
    let fields = jacobian_decompose(f)
        .transposed_fields(f)
        .expect("transposed terms live on the same universe");
    Ok(fields.iter().all(|j| bde_violation(j, &p).is_none()))
}

/// Whether the equivalence `r` is an FDE of `f`. Both the definition-level
/// and the transposed-Jacobian checks run; debug builds assert they agree.
pub fn check_fde(f: &PolyVectorField, r: &Relation<Var>) -> Result<bool, BisimError> {
    let by_transposes = check_fde_by_transposes(f, r)?;
    debug_assert_eq!(by_transposes, check_fde_by_definition(f, r)?);
    Ok(by_transposes)
}

/// `R ⊆ B_C(g(R))`: every pair avoids `C` and its right-hand sides are in
/// the polynomial lifting of `g(R) \ C`.
pub fn is_bdb_up_to(f: &PolyVectorField, r: &Relation<Var>, constraints: &Relation<Var>, up_to: UpTo) -> bool {
    let view = ClosureView::new(up_to, r.clone(), f.dim());
    let allowed = |a: Var, b: Var| view.contains(a, b) && !constraints.contains(&a, &b);
    r.iter()
        .all(|&(x, y)| !constraints.contains(&x, &y) && in_poly_lifting(f.rhs(x), f.rhs(y), allowed))
}

/// `R ⊆ F(g(R))`.
pub fn is_fdb_up_to(f: &PolyVectorField, r: &Relation<Var>, up_to: UpTo) -> bool {
    let view = ClosureView::new(up_to, r.clone(), f.dim());
    let rows = jacobian_decompose(f).transposed_rows(f.dim());
    r.iter().all(|&(x, y)| {
        rows.iter()
            .all(|term| in_linear_lifting(&term[x.index()], &term[y.index()], |a, b| view.contains(*a, *b)))
    })
}
