//! Linear and monomial couplings and the liftings `M[R]`, `L[R]`, `P[R]`.

use std::collections::BTreeSet;
use std::fmt::Debug;

use num_traits::Zero;

use crate::poly::{LinComb, Monomial, Polynomial, Var};
use crate::transport::{solve_classified, ArcClass, Solution, TransportInstance, TransportPlan};
use crate::Rational;

/// Atom alphabets that can be coupled. `affinity` ranks unpreferred arcs:
/// lower values are tried first when several couplings exist.
pub trait Atom: Ord + Clone + Debug {
    fn affinity(&self, other: &Self) -> u32;
}

impl Atom for Var {
    fn affinity(&self, other: &Self) -> u32 {
        u32::from(self != other)
    }
}

impl Atom for Monomial {
    /// Number of factors of the larger monomial not shared with the other.
    fn affinity(&self, other: &Self) -> u32 {
        let shared: u32 = self
            .powers()
            .iter()
            .map(|&(v, k)| k.min(other.exponent(v)))
            .sum();
        self.degree().max(other.degree()) - shared
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coupling<A: Ord, S> {
    pub left: S,
    pub right: S,
    pub plan: TransportPlan<A>,
}

pub type LinearCoupling<A> = Coupling<A, LinComb<A>>;
pub type MonomialCoupling = Coupling<Var, Monomial>;

impl<A: Ord + Clone, S> Coupling<A, S> {
    pub fn support(&self) -> impl Iterator<Item = &(A, A)> {
        self.plan.support()
    }
}

/// Rows `g⁺ + h⁻`, columns `h⁺ + g⁻`.
pub fn linear_instance<A: Ord + Clone>(g: &LinComb<A>, h: &LinComb<A>) -> TransportInstance<A> {
    let (gp, gm) = g.pos_neg();
    let (hp, hm) = h.pos_neg();
    TransportInstance::new(gp.add(&hm).into_map(), hp.add(&gm).into_map())
}

/// Rows `m(x)`, columns `n(y)`.
pub fn monomial_instance(m: &Monomial, n: &Monomial) -> TransportInstance<Var> {
    let side = |mono: &Monomial| {
        mono.powers()
            .iter()
            .map(|&(v, e)| (v, Rational::from_integer(e.into())))
            .collect()
    };
    TransportInstance::new(side(m), side(n))
}

/// Searches a linear coupling for `(g, h)` whose support avoids the arcs
/// classified as forbidden, minimizing the classified cost.
pub fn find_linear_coupling_by<A: Ord + Clone>(
    g: &LinComb<A>,
    h: &LinComb<A>,
    classify: impl Fn(&A, &A) -> ArcClass,
) -> Option<LinearCoupling<A>> {
    let inst = linear_instance(g, h);
    match solve_classified(&inst, classify).expect("coupling marginals are nonnegative") {
        Solution::Plan(plan) => Some(Coupling {
            left: g.clone(),
            right: h.clone(),
            plan,
        }),
        Solution::NoAvoidingPlan | Solution::Infeasible => None,
    }
}

pub fn find_monomial_coupling_by(
    m: &Monomial,
    n: &Monomial,
    classify: impl Fn(&Var, &Var) -> ArcClass,
) -> Option<MonomialCoupling> {
    if m.degree() != n.degree() {
        return None;
    }
    let inst = monomial_instance(m, n);
    match solve_classified(&inst, classify).expect("exponents are nonnegative") {
        Solution::Plan(plan) => Some(Coupling {
            left: m.clone(),
            right: n.clone(),
            plan,
        }),
        Solution::NoAvoidingPlan | Solution::Infeasible => None,
    }
}

fn classify_sets<'a, A: Atom>(
    forbidden: &'a BTreeSet<(A, A)>,
    preferred: &'a BTreeSet<(A, A)>,
) -> impl Fn(&A, &A) -> ArcClass + 'a {
    move |a, b| {
        let key = (a.clone(), b.clone());
        if forbidden.contains(&key) {
            ArcClass::Forbidden
        } else if preferred.contains(&key) {
            ArcClass::Cost(0)
        } else {
            ArcClass::Cost(1 + a.affinity(b))
        }
    }
}

/// Linear coupling for `(g, h)` avoiding `forbidden`, putting as much mass
/// as possible on `preferred`.
pub fn find_linear_coupling<A: Atom>(
    g: &LinComb<A>,
    h: &LinComb<A>,
    forbidden: &BTreeSet<(A, A)>,
    preferred: &BTreeSet<(A, A)>,
) -> Option<LinearCoupling<A>> {
    find_linear_coupling_by(g, h, classify_sets(forbidden, preferred))
}

pub fn find_monomial_coupling(
    m: &Monomial,
    n: &Monomial,
    forbidden: &BTreeSet<(Var, Var)>,
    preferred: &BTreeSet<(Var, Var)>,
) -> Option<MonomialCoupling> {
    find_monomial_coupling_by(m, n, classify_sets(forbidden, preferred))
}

/// Whether the monomial lifting of `allowed` relates `m` and `n`.
pub fn in_monomial_lifting(m: &Monomial, n: &Monomial, allowed: impl Fn(Var, Var) -> bool) -> bool {
    monomial_lifting_witness(m, n, allowed).is_some()
}

/// The support of a monomial coupling for `(m, n)` inside `allowed`, if
/// there is one.
pub fn monomial_lifting_witness(
    m: &Monomial,
    n: &Monomial,
    allowed: impl Fn(Var, Var) -> bool,
) -> Option<Vec<(Var, Var)>> {
    if m.degree() != n.degree() {
        return None;
    }
    match (m.powers(), n.powers()) {
        ([], []) => Some(Vec::new()),
        ([(x, _)], [(y, _)]) => allowed(*x, *y).then(|| vec![(*x, *y)]),
        _ if m.degree() <= SMALL_DEGREE => {
            let left: Vec<Var> = expand(m);
            let right: Vec<Var> = expand(n);
            let mut used = vec![false; right.len()];
            let mut pairs = Vec::with_capacity(left.len());
            if !perfect_matching(&left, &right, &mut used, &allowed, &mut pairs) {
                return None;
            }
            pairs.sort();
            pairs.dedup();
            Some(pairs)
        }
        _ => find_monomial_coupling_by(m, n, |x, y| {
            if allowed(*x, *y) {
                ArcClass::Cost(0)
            } else {
                ArcClass::Forbidden
            }
        })
        .map(|rho| rho.support().copied().collect()),
    }
}

/// Up to this degree, monomial lifting membership is decided by searching
/// for a perfect matching between the factor multisets; integrality of
/// transportation polytopes makes this exact.
const SMALL_DEGREE: u32 = 4;

fn expand(m: &Monomial) -> Vec<Var> {
    m.powers()
        .iter()
        .flat_map(|&(v, k)| std::iter::repeat_n(v, k as usize))
        .collect()
}

fn perfect_matching(
    left: &[Var],
    right: &[Var],
    used: &mut [bool],
    allowed: &impl Fn(Var, Var) -> bool,
    pairs: &mut Vec<(Var, Var)>,
) -> bool {
    let Some((&x, rest)) = left.split_first() else {
        return true;
    };
    for j in 0..right.len() {
        if used[j] || (j > 0 && right[j] == right[j - 1] && !used[j - 1]) || !allowed(x, right[j]) {
            continue;
        }
        used[j] = true;
        pairs.push((x, right[j]));
        if perfect_matching(rest, right, used, allowed, pairs) {
            return true;
        }
        pairs.pop();
        used[j] = false;
    }
    false
}

/// Whether `L[allowed]` relates `g` and `h`, where `allowed` decides atom
/// pairs.
pub fn in_linear_lifting<A: Ord + Clone>(g: &LinComb<A>, h: &LinComb<A>, allowed: impl Fn(&A, &A) -> bool) -> bool {
    if g.sum_coeffs() != h.sum_coeffs() {
        return false;
    }
    if g.is_zero() && h.is_zero() {
        return true;
    }
    find_linear_coupling_by(g, h, |a, b| {
        if allowed(a, b) {
            ArcClass::Cost(0)
        } else {
            ArcClass::Forbidden
        }
    })
    .is_some()
}

/// Whether `(p, q) ∈ P[allowed] = L[M[allowed]]`.
pub fn in_poly_lifting(p: &Polynomial, q: &Polynomial, allowed: impl Fn(Var, Var) -> bool) -> bool {
    in_linear_lifting(p.as_lincomb(), q.as_lincomb(), |m, n| in_monomial_lifting(m, n, &allowed))
}

/// Checks the marginal conditions of a linear coupling exactly.
pub fn is_linear_coupling<A: Ord + Clone>(g: &LinComb<A>, h: &LinComb<A>, plan: &TransportPlan<A>) -> bool {
    let inst = linear_instance(g, h);
    plan.flow.values().all(|q| q > &Rational::zero())
        && plan.row_sums() == inst.supplies
        && plan.col_sums() == inst.demands
}

pub fn is_monomial_coupling(m: &Monomial, n: &Monomial, plan: &TransportPlan<Var>) -> bool {
    let inst = monomial_instance(m, n);
    plan.flow.values().all(|q| q > &Rational::zero())
        && plan.row_sums() == inst.supplies
        && plan.col_sums() == inst.demands
}
