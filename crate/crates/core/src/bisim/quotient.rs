use super::check::{bde_violation, fde_violation};
use super::BisimError;
use crate::poly::{PolyVectorField, Polynomial, Universe, Var};
use crate::relation::{Partition, Relation};
use crate::Rational;

/// How a variable is expressed through its block variable in the forward
/// quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weights {
    /// `z ↦ H_[z] / |[z]|`.
    Uniform,
    /// `z ↦ H_[z]` for the block representative and `0` otherwise.
    Representative,
}

fn block_universe(p: &Partition) -> Universe {
    Universe::from_names((1..=p.len()).map(|k| format!("H{k}"))).expect("block names are distinct")
}

/// Quotient by `e(r)` with one variable per block; the right-hand side of a
/// block is that of its representative after collapsing every variable onto
/// its block.
pub fn bde_quotient(f: &PolyVectorField, r: &Relation<Var>) -> Result<PolyVectorField, BisimError> {
    super::check_vars(f, &[r])?;
    let p = Partition::from_relation(f.universe(), r);
    if let Some((x, y)) = bde_violation(f, &p) {
        return Err(BisimError::NotBde(f.name(x).to_string(), f.name(y).to_string()));
    }
    let rhs = p
        .blocks()
        .iter()
        .map(|b| f.rhs(b[0]).rename(|z| Var::new(p.block_of(z))))
        .collect();
    Ok(PolyVectorField::new(block_universe(&p), rhs).expect("block variables cover the rhs"))
}

/// Quotient by `e(r)` for the block sums. Computed with uniform weights and
/// cross-checked against representative weights.
pub fn fde_quotient(f: &PolyVectorField, r: &Relation<Var>) -> Result<PolyVectorField, BisimError> {
    super::check_vars(f, &[r])?;
    let p = Partition::from_relation(f.universe(), r);
    if let Some(x) = fde_violation(f, &p) {
        return Err(BisimError::NotFde(f.name(x).to_string()));
    }
    let uniform = fde_quotient_weighted(f, &p, Weights::Uniform);
    let representative = fde_quotient_weighted(f, &p, Weights::Representative);
    if uniform != representative {
        return Err(BisimError::NotFde(f.name(p.blocks()[0][0]).to_string()));
    }
    Ok(uniform)
}

/// Block sums of `f` with each variable replaced according to `weights`.
/// Does not check that the partition is an FDE.
pub fn fde_quotient_weighted(f: &PolyVectorField, p: &Partition, weights: Weights) -> PolyVectorField {
    let images: Vec<Polynomial> = f
        .vars()
        .map(|z| {
            let k = p.block_of(z);
            let h = Polynomial::var(Var::new(k));
            match weights {
                Weights::Uniform => {
                    let size = p.blocks()[k].len() as i64;
                    h.scale(&Rational::new(1.into(), size.into()))
                }
                Weights::Representative if p.representative(z) == z => h,
                Weights::Representative => Polynomial::zero(),
            }
        })
        .collect();
    let rhs = p
        .blocks()
        .iter()
        .map(|b| {
            b.iter()
                .fold(Polynomial::zero(), |acc, z| acc.add(f.rhs(*z)))
                .substitute_with(|z| Some(images[z.index()].clone()))
        })
        .collect();
    PolyVectorField::new(block_universe(p), rhs).expect("block variables cover the rhs")
}
