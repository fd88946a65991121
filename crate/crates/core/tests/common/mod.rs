//! Random instance generators and independent oracles shared by the
//! property suite and the acceptance runner.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use diffbisim::bisim::{
    check_bde, check_fde, check_fde_by_definition, check_fde_by_transposes, find_bdb, find_bdb_with, find_fdb,
    gfp_bdb, jacobian_decompose, BdbOptions,
};
use diffbisim::coupling::in_poly_lifting;
use diffbisim::poly::{Monomial, PolyVectorField, Polynomial, Universe, Var};
use diffbisim::relation::{Relation, UpTo};
use diffbisim::transport::{solve_min_cost, Solution, TransportInstance};
use diffbisim::Rational;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_d1ff;
pub const CASES: usize = 1000;

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    let k = rng.gen_range(1..=bound);
    q(if rng.gen_bool(0.5) { k } else { -k })
}

pub fn universe(n: usize) -> Universe {
    Universe::from_names((0..n).map(|i| format!("x{i}"))).expect("distinct names")
}

pub fn random_monomial(rng: &mut ChaCha8Rng, vars: &[Var], max_degree: u32) -> Monomial {
    let degree = rng.gen_range(0..=max_degree);
    let mut powers: BTreeMap<Var, u32> = BTreeMap::new();
    for _ in 0..degree {
        *powers.entry(*vars.choose(rng).expect("nonempty")).or_insert(0) += 1;
    }
    Monomial::from_powers(powers)
}

pub fn random_polynomial(rng: &mut ChaCha8Rng, vars: &[Var], terms: usize, max_degree: u32) -> Polynomial {
    Polynomial::from_terms((0..terms).map(|_| (random_monomial(rng, vars, max_degree), nonzero(rng, 3))))
}

/// Random involution on `0..n`.
fn random_involution(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut sigma: Vec<usize> = (0..n).collect();
    for pair in order.chunks(2) {
        if pair.len() == 2 && rng.gen_bool(0.7) {
            sigma[pair[0]] = pair[1];
            sigma[pair[1]] = pair[0];
        }
    }
    sigma
}

/// Random field over at most `max_vars` variables with right-hand sides
/// drawn from a pool of at most `max_monomials` monomials of degree at most
/// `max_degree`. Most fields are made equivariant under a random involution
/// so that nontrivial equivalences exist.
pub fn random_field(rng: &mut ChaCha8Rng, max_vars: usize, max_monomials: usize, max_degree: u32) -> PolyVectorField {
    let n = rng.gen_range(2..=max_vars);
    let u = universe(n);
    let vars: Vec<Var> = u.vars().collect();
    let pool_size = rng.gen_range(1..=max_monomials);
    let pool: Vec<Monomial> = (0..pool_size).map(|_| random_monomial(rng, &vars, max_degree)).collect();
    let base: Vec<Polynomial> = (0..n)
        .map(|_| {
            let k = rng.gen_range(0..=3);
            Polynomial::from_terms((0..k).map(|_| (pool.choose(rng).expect("nonempty").clone(), nonzero(rng, 3))))
        })
        .collect();
    let rhs = if rng.gen_bool(0.75) {
        let sigma = random_involution(rng, n);
        (0..n)
            .map(|i| base[i].add(&base[sigma[i]].rename(|v| Var::new(sigma[v.index()]))))
            .collect()
    } else {
        base
    };
    PolyVectorField::new(u, rhs).expect("variables in range")
}

pub fn random_relation(rng: &mut ChaCha8Rng, vars: &[Var], density: f64) -> Relation<Var> {
    let mut r = Relation::new();
    for &a in vars {
        for &b in vars {
            if rng.gen_bool(density) {
                r.insert(a, b);
            }
        }
    }
    r
}

/// Random equivalence given by a block index per variable.
pub fn random_blocks(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let k = rng.gen_range(1..=n);
    (0..n).map(|_| rng.gen_range(0..k)).collect()
}

pub fn equivalence_of_blocks(blocks: &[usize]) -> Relation<Var> {
    let mut r = Relation::new();
    for (i, bi) in blocks.iter().enumerate() {
        for (j, bj) in blocks.iter().enumerate() {
            if bi == bj {
                r.insert(Var::new(i), Var::new(j));
            }
        }
    }
    r
}

/// Replaces every variable by the least member of its block.
pub fn substitute_representatives(p: &Polynomial, blocks: &[usize]) -> Polynomial {
    let rep = |v: Var| {
        let b = blocks[v.index()];
        Var::new(blocks.iter().position(|&c| c == b).expect("own block"))
    };
    p.rename(rep)
}

/// A polynomial that agrees with `p` after substituting representatives:
/// every term is split in two and each factor is moved to a random member
/// of its block.
pub fn block_variant(rng: &mut ChaCha8Rng, p: &Polynomial, blocks: &[usize]) -> Polynomial {
    let mut out = Polynomial::zero();
    for (m, c) in p.terms() {
        let part = Rational::new(rng.gen_range(0..=4).into(), 4.into()) * c;
        for coeff in [part.clone(), c - &part] {
            let powers = m.powers().iter().flat_map(|&(v, e)| std::iter::repeat_n(v, e as usize)).map(|v| {
                let members: Vec<usize> = (0..blocks.len()).filter(|&j| blocks[j] == blocks[v.index()]).collect();
                (Var::new(*members.choose(rng).expect("own block")), 1)
            });
            out = out.add(&Polynomial::monomial(Monomial::from_powers(powers), coeff));
        }
    }
    out
}

/// Techniques that are sound for `constraints`.
pub fn sound_techniques(constraints: &Relation<Var>) -> Vec<UpTo> {
    UpTo::ALL.into_iter().filter(|g| g.validate(constraints).is_ok()).collect()
}

/// Outcome of a property run: the first failing case, if any.
pub struct Verdict {
    pub cases: usize,
    pub failures: usize,
    pub first: Option<String>,
}

impl Verdict {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    pub fn summary(&self) -> String {
        match &self.first {
            None => format!("{} cases, 0 failures", self.cases),
            Some(first) => format!("{} cases, {} failures; first: {first}", self.cases, self.failures),
        }
    }
}

/// Runs `check` on `CASES` cases drawn from `stream`; `check` returns an
/// error message on failure.
pub fn run_cases(stream: u64, mut check: impl FnMut(&mut ChaCha8Rng) -> Result<(), String>) -> Verdict {
    let mut r = rng(stream);
    let mut failures = 0;
    let mut first = None;
    for case in 0..CASES {
        if let Err(msg) = check(&mut r) {
            failures += 1;
            first.get_or_insert_with(|| format!("seed {SEED:#x} stream {stream} case {case}: {msg}"));
        }
    }
    Verdict {
        cases: CASES,
        failures,
        first,
    }
}

/// Property a: coupling-based lifting of an equivalence agrees with the
/// representative substitution.
pub fn prop_coupling_vs_substitution(r: &mut ChaCha8Rng) -> Result<(), String> {
    let n = r.gen_range(1..=5);
    let u = universe(n);
    let vars: Vec<Var> = u.vars().collect();
    let blocks = random_blocks(r, n);
    let eq = equivalence_of_blocks(&blocks);
    let terms = r.gen_range(0..=4);
    let p = random_polynomial(r, &vars, terms, 3);
    let qp = if r.gen_bool(0.5) {
        block_variant(r, &p, &blocks)
    } else {
        let terms = r.gen_range(0..=4);
        random_polynomial(r, &vars, terms, 3)
    };
    let by_coupling = in_poly_lifting(&p, &qp, |a, b| eq.contains(&a, &b));
    let by_substitution = substitute_representatives(&p, &blocks) == substitute_representatives(&qp, &blocks);
    if by_coupling != by_substitution {
        return Err(format!(
            "p = {}, q = {}, blocks {blocks:?}: coupling {by_coupling}, substitution {by_substitution}",
            p.display(&u),
            qp.display(&u)
        ));
    }
    Ok(())
}

/// Property b: local query answers equal membership in the global fixpoint.
pub fn prop_local_vs_gfp(r: &mut ChaCha8Rng) -> Result<(), String> {
    let f = random_field(r, 5, 8, 3);
    let vars: Vec<Var> = f.vars().collect();
    let query = random_relation(r, &vars, 0.2);
    let constraints = if r.gen_bool(0.5) {
        Relation::new()
    } else {
        let c = random_relation(r, &vars, 0.1);
        if r.gen_bool(0.5) {
            c.symmetric_closure().difference(&Relation::identity(f.universe()))
        } else {
            c
        }
    };
    let techniques = sound_techniques(&constraints);
    let up_to = *techniques.choose(r).expect("identity is always sound");
    let gfp = gfp_bdb(&f, &constraints);
    let res = find_bdb(&f, &query, &constraints, up_to).map_err(|e| e.to_string())?;
    for &(x, y) in query.iter() {
        if res.answer(x, y) != gfp.contains(&x, &y) {
            return Err(format!(
                "{f}query ({x}, {y}) up-to {up_to}, constraints {}: local {}, gfp {}",
                constraints.display(f.universe()),
                res.answer(x, y),
                gfp.contains(&x, &y)
            ));
        }
    }
    Ok(())
}

/// Property c: equivalence closures of computed bisimulations are
/// differential equivalences.
pub fn prop_closures_are_equivalences(r: &mut ChaCha8Rng) -> Result<(), String> {
    let f = random_field(r, 5, 8, 3);
    let vars: Vec<Var> = f.vars().collect();
    let query = random_relation(r, &vars, 0.2);
    let up_to = *UpTo::ALL.choose(r).expect("nonempty");
    let b = find_bdb(&f, &query, &Relation::new(), up_to).map_err(|e| e.to_string())?;
    let eb = b.related.equivalence_closure(&vars);
    if !check_bde(&f, &eb).map_err(|e| e.to_string())? {
        return Err(format!("{f}e(BDB) up-to {up_to} is not a BDE: {}", b.related.display(f.universe())));
    }
    let fw = find_fdb(&f, &query, up_to).map_err(|e| e.to_string())?;
    let ef = fw.related.equivalence_closure(&vars);
    if !check_fde(&f, &ef).map_err(|e| e.to_string())? {
        return Err(format!("{f}e(FDB) up-to {up_to} is not an FDE: {}", fw.related.display(f.universe())));
    }
    Ok(())
}

/// Property d: the two FDE checks agree.
pub fn prop_fde_paths_agree(r: &mut ChaCha8Rng) -> Result<(), String> {
    let f = random_field(r, 5, 8, 3);
    let vars: Vec<Var> = f.vars().collect();
    let eq = if r.gen_bool(0.5) {
        let query = random_relation(r, &vars, 0.3);
        find_fdb(&f, &query, UpTo::Identity)
            .map_err(|e| e.to_string())?
            .related
            .equivalence_closure(&vars)
    } else {
        equivalence_of_blocks(&random_blocks(r, vars.len()))
    };
    let a = check_fde_by_definition(&f, &eq).map_err(|e| e.to_string())?;
    let b = check_fde_by_transposes(&f, &eq).map_err(|e| e.to_string())?;
    if a != b {
        return Err(format!("{f}relation {}: definition {a}, transposes {b}", eq.display(f.universe())));
    }
    Ok(())
}

/// Property e: all techniques give the same answers, and closures never
/// need more pairs than the base algorithm. With `full_chain` the
/// transitive closure must also stay below the base algorithm.
pub fn prop_up_to_dominance(r: &mut ChaCha8Rng, full_chain: bool) -> Result<(), String> {
    let f = random_field(r, 5, 8, 3);
    let vars: Vec<Var> = f.vars().collect();
    let query = random_relation(r, &vars, 0.2);
    let mut sizes = HashMap::new();
    let mut answers: Option<(UpTo, Vec<bool>)> = None;
    for up_to in UpTo::ALL {
        let res = find_bdb(&f, &query, &Relation::new(), up_to).map_err(|e| e.to_string())?;
        let ans: Vec<bool> = query.iter().map(|&(x, y)| res.answer(x, y)).collect();
        match &answers {
            Some((g, first)) if *first != ans => {
                return Err(format!("{f}answers differ between {g} and {up_to}"));
            }
            Some(_) => {}
            None => answers = Some((up_to, ans)),
        }
        sizes.insert(up_to, res.related.len());
    }
    let (id, t, e) = (sizes[&UpTo::Identity], sizes[&UpTo::Transitive], sizes[&UpTo::Equivalence]);
    if e > t || e > id || (full_chain && t > id) {
        return Err(format!("{f}query {}: |R| identity {id}, transitive {t}, equiv {e}", query.display(f.universe())));
    }
    Ok(())
}

/// Observer invariants: refuted sets grow, related and refuted stay disjoint.
pub fn prop_observer_invariants(r: &mut ChaCha8Rng) -> Result<(), String> {
    let f = random_field(r, 5, 8, 3);
    let vars: Vec<Var> = f.vars().collect();
    let query = random_relation(r, &vars, 0.3);
    let up_to = *UpTo::ALL.choose(r).expect("nonempty");
    let opts = BdbOptions {
        up_to,
        parallel: r.gen_bool(0.3),
    };
    let mut last_r_hat = Relation::new();
    let mut last_q_hat = Relation::new();
    let mut violation = None;
    find_bdb_with(&f, &query, &Relation::new(), opts, &mut |s| {
        let ok = s.related.is_disjoint(s.refuted)
            && s.monomial_related.is_disjoint(s.monomial_refuted)
            && last_r_hat.is_subset(s.refuted)
            && last_q_hat.is_subset(s.monomial_refuted);
        if !ok && violation.is_none() {
            violation = Some(s.iteration);
        }
        last_r_hat = s.refuted.clone();
        last_q_hat = s.monomial_refuted.clone();
    })
    .map_err(|e| e.to_string())?;
    match violation {
        Some(i) => Err(format!("{f}up-to {up_to}: invariant broken at iteration {i}")),
        None => Ok(()),
    }
}

/// Jacobian decomposition reproduces the Jacobian; at most `|X|·|M_f|`
/// terms and at most one nonzero per (term of `f_x`, factor) pair.
pub fn prop_jacobian(r: &mut ChaCha8Rng) -> Result<(), String> {
    let f = random_field(r, 5, 8, 3);
    let d = jacobian_decompose(&f);
    let terms = f.dim() * f.monomials().len();
    let entries: usize = f.rhs_all().iter().flat_map(|p| p.monomials()).map(|m| m.vars().count()).sum();
    if d.len() > terms || d.nonzeros() > entries {
        return Err(format!(
            "{f}κ = {} (bound {terms}), nnz = {} (bound {entries})",
            d.len(),
            d.nonzeros()
        ));
    }
    for xi in f.vars() {
        for xj in f.vars() {
            if d.entry(xi, xj) != f.rhs(xi).partial_derivative(xj) {
                return Err(format!("{f}entry ({xi}, {xj}) differs from the derivative"));
            }
        }
    }
    Ok(())
}

/// Brute-force optimum of a small balanced transportation problem: the best
/// basic feasible solution over all spanning forests of the bipartite graph.
pub fn brute_force_optimum(
    supplies: &[Rational],
    demands: &[Rational],
    cost: &dyn Fn(usize, usize) -> Rational,
) -> Option<Rational> {
    let (n, m) = (supplies.len(), demands.len());
    let total_s: Rational = supplies.iter().cloned().sum();
    let total_d: Rational = demands.iter().cloned().sum();
    if total_s != total_d {
        return None;
    }
    let arcs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let size = n + m - 1;
    let mut best: Option<Rational> = None;
    let mut chosen = Vec::with_capacity(size);
    forests(&arcs, 0, size, &mut chosen, &mut |basis: &[(usize, usize)]| {
        if let Some(flow) = solve_tree(basis, supplies, demands) {
            let value: Rational = basis.iter().zip(&flow).map(|(&(i, j), x)| cost(i, j) * x).sum();
            if best.as_ref().is_none_or(|b| value < *b) {
                best = Some(value);
            }
        }
    });
    best
}

type BasisVisitor<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

fn forests(
    arcs: &[(usize, usize)],
    from: usize,
    size: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut BasisVisitor,
) {
    if chosen.len() == size {
        visit(chosen);
        return;
    }
    for k in from..arcs.len() {
        if arcs.len() - k < size - chosen.len() {
            break;
        }
        chosen.push(arcs[k]);
        forests(arcs, k + 1, size, chosen, visit);
        chosen.pop();
    }
}

/// Flow on a spanning tree by peeling leaves; `None` if the arc set is not
/// a tree or some flow is negative.
fn solve_tree(basis: &[(usize, usize)], supplies: &[Rational], demands: &[Rational]) -> Option<Vec<Rational>> {
    let n = supplies.len();
    let mut rest: Vec<Rational> = supplies.iter().chain(demands).cloned().collect();
    let mut flow = vec![Rational::zero(); basis.len()];
    let mut open: Vec<bool> = vec![true; basis.len()];
    let ends = |k: usize| (basis[k].0, n + basis[k].1);
    for _ in 0..basis.len() {
        let mut degree = vec![0usize; rest.len()];
        for k in (0..basis.len()).filter(|&k| open[k]) {
            let (a, b) = ends(k);
            degree[a] += 1;
            degree[b] += 1;
        }
        let k = (0..basis.len()).find(|&k| open[k] && {
            let (a, b) = ends(k);
            degree[a] == 1 || degree[b] == 1
        })?;
        let (a, b) = ends(k);
        let leaf = if degree[a] == 1 { a } else { b };
        let other = if leaf == a { b } else { a };
        let x = rest[leaf].clone();
        if x.is_negative() {
            return None;
        }
        flow[k] = x.clone();
        rest[leaf] = Rational::zero();
        rest[other] -= x;
        open[k] = false;
    }
    rest.iter().all(Zero::is_zero).then_some(flow)
}

/// Transport solver optimum equals the brute-force optimum.
pub fn prop_transport_optimum(r: &mut ChaCha8Rng) -> Result<(), String> {
    let n = r.gen_range(1..=4);
    let m = r.gen_range(1..=4);
    let mut supplies: Vec<Rational> = (0..n).map(|_| Rational::new(r.gen_range(1..=6).into(), r.gen_range(1..=3).into())).collect();
    let demands: Vec<Rational> = (0..m).map(|_| Rational::new(r.gen_range(1..=6).into(), r.gen_range(1..=3).into())).collect();
    let mut demands = demands;
    if r.gen_bool(0.9) {
        let gap: Rational = demands.iter().cloned().sum::<Rational>() - supplies.iter().cloned().sum::<Rational>();
        if gap.is_negative() {
            demands.push(-gap);
        } else {
            supplies.push(gap);
        }
    }
    check_instance(r, supplies, demands)
}

fn check_instance(r: &mut ChaCha8Rng, supplies: Vec<Rational>, demands: Vec<Rational>) -> Result<(), String> {
    let (n, m) = (supplies.len(), demands.len());
    let costs: Vec<Rational> = (0..n * m).map(|_| q(r.gen_range(0..=4))).collect();
    let cost = |i: usize, j: usize| costs[i * m + j].clone();
    let expected = brute_force_optimum(&supplies, &demands, &cost);
    let inst = TransportInstance::new(
        (0..n).zip(supplies.iter().cloned()).collect(),
        (0..m).zip(demands.iter().cloned()).collect(),
    )
    .with_costs((0..n).flat_map(|i| (0..m).map(move |j| ((i, j), cost(i, j)))).collect());
    let got = solve_min_cost(&inst).map_err(|e| e.to_string())?;
    match (got, expected) {
        (Solution::Plan(plan), Some(best)) => {
            if plan.objective != best {
                return Err(format!("objective {} != brute force {best}", plan.objective));
            }
            if plan.row_sums() != inst.supplies.clone().into_iter().filter(|(_, v)| !v.is_zero()).collect()
                || plan.col_sums() != inst.demands.clone().into_iter().filter(|(_, v)| !v.is_zero()).collect()
            {
                return Err("marginals violated".to_string());
            }
            Ok(())
        }
        (Solution::Infeasible, None) => Ok(()),
        (other, expected) => Err(format!("solver {other:?}, brute force {expected:?}")),
    }
}
