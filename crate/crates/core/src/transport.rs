//! Exact balanced transportation problems.
//!
//! Instances are scaled to integers and solved by successive shortest
//! augmenting paths. Amounts stay in `i128` while a conservative bound allows
//! it and switch to `BigInt` otherwise.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("negative supply or demand")]
    NegativeMarginal,
    #[error("negative arc cost")]
    NegativeCost,
}

/// Supplies, demands and arc costs; absent costs are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportInstance<A: Ord> {
    pub supplies: BTreeMap<A, Rational>,
    pub demands: BTreeMap<A, Rational>,
    pub costs: BTreeMap<(A, A), Rational>,
}

impl<A: Ord + Clone> Default for TransportInstance<A> {
    fn default() -> Self {
        TransportInstance {
            supplies: BTreeMap::new(),
            demands: BTreeMap::new(),
            costs: BTreeMap::new(),
        }
    }
}

impl<A: Ord + Clone> TransportInstance<A> {
    pub fn new(supplies: BTreeMap<A, Rational>, demands: BTreeMap<A, Rational>) -> Self {
        TransportInstance {
            supplies,
            demands,
            costs: BTreeMap::new(),
        }
    }

    pub fn with_costs(mut self, costs: BTreeMap<(A, A), Rational>) -> Self {
        self.costs = costs;
        self
    }

    pub fn total_supply(&self) -> Rational {
        self.supplies.values().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn total_demand(&self) -> Rational {
        self.demands.values().fold(Rational::zero(), |a, b| a + b)
    }

    fn check(&self) -> Result<(), TransportError> {
        if self
            .supplies
            .values()
            .chain(self.demands.values())
            .any(Signed::is_negative)
        {
            return Err(TransportError::NegativeMarginal);
        }
        if self.costs.values().any(Signed::is_negative) {
            return Err(TransportError::NegativeCost);
        }
        Ok(())
    }
}

/// A feasible flow. Only strictly positive entries are stored, so the key set
/// is the support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportPlan<A: Ord> {
    pub flow: BTreeMap<(A, A), Rational>,
    pub objective: Rational,
}

impl<A: Ord + Clone> TransportPlan<A> {
    pub fn support(&self) -> impl Iterator<Item = &(A, A)> {
        self.flow.keys()
    }

    pub fn get(&self, a: &A, b: &A) -> Rational {
        self.flow
            .get(&(a.clone(), b.clone()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn row_sums(&self) -> BTreeMap<A, Rational> {
        let mut out: BTreeMap<A, Rational> = BTreeMap::new();
        for ((a, _), q) in &self.flow {
            *out.entry(a.clone()).or_insert_with(Rational::zero) += q;
        }
        out
    }

    pub fn col_sums(&self) -> BTreeMap<A, Rational> {
        let mut out: BTreeMap<A, Rational> = BTreeMap::new();
        for ((_, b), q) in &self.flow {
            *out.entry(b.clone()).or_insert_with(Rational::zero) += q;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution<A: Ord> {
    Plan(TransportPlan<A>),
    /// Every plan puts mass on a forbidden arc.
    NoAvoidingPlan,
    /// Total supply differs from total demand.
    Infeasible,
}

impl<A: Ord> Solution<A> {
    pub fn plan(self) -> Option<TransportPlan<A>> {
        match self {
            Solution::Plan(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_plan(&self) -> bool {
        matches!(self, Solution::Plan(_))
    }
}

/// How an arc may be used by [`solve_classified`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ArcClass {
    Forbidden,
    /// Allowed at the given integral cost per unit of mass.
    Cost(u32),
}

/// Minimum-cost plan over the complete bipartite graph.
pub fn solve_min_cost<A: Ord + Clone>(inst: &TransportInstance<A>) -> Result<Solution<A>, TransportError> {
    inst.check()?;
    let (rows, cols) = nonzero_keys(inst);
    let Some(scaled) = Scaled::new(inst, &rows, &cols) else {
        return Ok(Solution::Infeasible);
    };
    let cost_scale = inst
        .costs
        .values()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut arcs = Vec::with_capacity(rows.len() * cols.len());
    for (i, a) in rows.iter().enumerate() {
        for (j, b) in cols.iter().enumerate() {
            let c = match inst.costs.get(&(a.clone(), b.clone())) {
                Some(c) => (c * Rational::from_integer(cost_scale.clone())).to_integer(),
                None => BigInt::zero(),
            };
            arcs.push((i, j, c));
        }
    }
    let mut plan = run(&scaled, &rows, &cols, arcs).expect("complete bipartite instance routes all mass");
    plan.objective /= Rational::from_integer(cost_scale);
    Ok(Solution::Plan(plan))
}

/// Plan avoiding forbidden arcs that minimizes the total class cost, or
/// [`Solution::NoAvoidingPlan`] when every plan uses a forbidden arc. The
/// reported objective is the class cost of the returned plan.
pub fn solve_classified<A: Ord + Clone>(
    inst: &TransportInstance<A>,
    classify: impl Fn(&A, &A) -> ArcClass,
) -> Result<Solution<A>, TransportError> {
    inst.check()?;
    let (rows, cols) = nonzero_keys(inst);
    let Some(scaled) = Scaled::new(inst, &rows, &cols) else {
        return Ok(Solution::Infeasible);
    };
    let mut arcs = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for (j, b) in cols.iter().enumerate() {
            if let ArcClass::Cost(c) = classify(a, b) {
                arcs.push((i, j, BigInt::from(c)));
            }
        }
    }
    match run(&scaled, &rows, &cols, arcs) {
        Some(plan) => Ok(Solution::Plan(plan)),
        None => Ok(Solution::NoAvoidingPlan),
    }
}

/// Plan avoiding `forbidden` that puts as little mass as possible outside
/// `preferred`.
pub fn solve_preferred<A: Ord + Clone>(
    inst: &TransportInstance<A>,
    forbidden: &BTreeSet<(A, A)>,
    preferred: &BTreeSet<(A, A)>,
) -> Result<Solution<A>, TransportError> {
    solve_classified(inst, |a, b| {
        let key = (a.clone(), b.clone());
        if forbidden.contains(&key) {
            ArcClass::Forbidden
        } else if preferred.contains(&key) {
            ArcClass::Cost(0)
        } else {
            ArcClass::Cost(1)
        }
    })
}

fn nonzero_keys<A: Ord + Clone>(inst: &TransportInstance<A>) -> (Vec<A>, Vec<A>) {
    let rows = inst
        .supplies
        .iter()
        .filter(|(_, q)| !q.is_zero())
        .map(|(a, _)| a.clone())
        .collect();
    let cols = inst
        .demands
        .iter()
        .filter(|(_, q)| !q.is_zero())
        .map(|(a, _)| a.clone())
        .collect();
    (rows, cols)
}

/// Marginals of the nonzero rows and columns scaled to integers.
struct Scaled {
    scale: BigInt,
    supply: Vec<BigInt>,
    demand: Vec<BigInt>,
}

impl Scaled {
    /// `None` when total supply and total demand differ.
    fn new<A: Ord>(inst: &TransportInstance<A>, rows: &[A], cols: &[A]) -> Option<Scaled> {
        let marginals = || rows.iter().map(|a| &inst.supplies[a]).chain(cols.iter().map(|b| &inst.demands[b]));
        let scale = marginals().fold(BigInt::one(), |acc, q| if q.is_integer() { acc } else { acc.lcm(q.denom()) });
        let to_int = |q: &Rational| {
            if scale.is_one() {
                q.numer().clone()
            } else {
                q.numer() * (&scale / q.denom())
            }
        };
        let supply: Vec<BigInt> = rows.iter().map(|a| to_int(&inst.supplies[a])).collect();
        let demand: Vec<BigInt> = cols.iter().map(|b| to_int(&inst.demands[b])).collect();
        (supply.iter().sum::<BigInt>() == demand.iter().sum::<BigInt>()).then_some(Scaled { scale, supply, demand })
    }

    fn unscale(&self, v: BigInt) -> Rational {
        if self.scale.is_one() {
            Rational::from_integer(v)
        } else {
            Rational::new(v, self.scale.clone())
        }
    }
}

/// Dispatches on the integer width; the objective is the arc cost of the
/// plan. `None` when the arcs cannot route all the mass.
fn run<A: Ord + Clone>(
    scaled: &Scaled,
    rows: &[A],
    cols: &[A],
    arcs: Vec<(usize, usize, BigInt)>,
) -> Option<TransportPlan<A>> {
    let total: BigInt = scaled.supply.iter().sum();
    let max_cost = arcs.iter().map(|a| a.2.clone()).max().unwrap_or_default();
    let nodes = BigInt::from(rows.len() + cols.len() + 1);
    // Distances are bounded by nodes * max_cost and flows by total.
    let bound: BigInt = (&total + 1) * (&max_cost + 1) * nodes;
    let flows: Vec<BigInt> = if bound.bits() < 120 {
        let small = |v: &BigInt| v.to_i128().expect("bounded");
        let arcs: Vec<(usize, usize, i128)> = arcs.iter().map(|(i, j, c)| (*i, *j, small(c))).collect();
        let s: Vec<i128> = scaled.supply.iter().map(small).collect();
        let d: Vec<i128> = scaled.demand.iter().map(small).collect();
        ssp(&s, &d, &arcs)?.into_iter().map(BigInt::from).collect()
    } else {
        ssp(&scaled.supply, &scaled.demand, &arcs)?
    };

    let mut flow = BTreeMap::new();
    let mut objective = BigInt::zero();
    for ((i, j, c), f) in arcs.iter().zip(flows) {
        if !f.is_zero() {
            objective += c * &f;
            flow.insert((rows[*i].clone(), cols[*j].clone()), scaled.unscale(f));
        }
    }
    Some(TransportPlan {
        flow,
        objective: scaled.unscale(objective),
    })
}

trait Amount:
    Clone
    + Ord
    + Debug
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + SubAssign
    + for<'a> Add<&'a Self, Output = Self>
{
}

impl Amount for i128 {}
impl Amount for BigInt {}

/// Primal-dual successive shortest paths on the bipartite residual graph:
/// shortest distances from the open sources, then a maximum flow over the
/// arcs tight for those distances. Returns the flow per arc, or `None` if
/// the maximum flow is below the total supply.
fn ssp<T: Amount>(supply: &[T], demand: &[T], arcs: &[(usize, usize, T)]) -> Option<Vec<T>> {
    let n = supply.len();
    let m = demand.len();
    let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut in_arcs: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (k, &(i, j, _)) in arcs.iter().enumerate() {
        out_arcs[i].push(k);
        in_arcs[j].push(k);
    }
    let mut net = Residual {
        n,
        arcs,
        out_arcs,
        in_arcs,
        rem_s: supply.to_vec(),
        rem_d: demand.to_vec(),
        flow: vec![T::zero(); arcs.len()],
        dist: vec![None; n + m],
        level: vec![usize::MAX; n + m],
        next: vec![0; n + m],
        sink_level: 0,
    };
    loop {
        if net.rem_s.iter().all(Zero::is_zero) {
            return Some(net.flow);
        }
        net.shortest_distances();
        let open = |j: usize| !net.rem_d[j].is_zero();
        let target = (0..m).filter(|&j| open(j)).filter_map(|j| net.dist[n + j].clone()).min()?;
        while net.levels(&target) {
            for i in 0..n {
                if !net.rem_s[i].is_zero() {
                    let limit = net.rem_s[i].clone();
                    let pushed = net.push(i, limit, &target);
                    net.rem_s[i] -= pushed;
                }
            }
        }
    }
}

/// Node ids: sources `0..n`, sinks `n..n+m`.
struct Residual<'a, T> {
    n: usize,
    arcs: &'a [(usize, usize, T)],
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
    rem_s: Vec<T>,
    rem_d: Vec<T>,
    flow: Vec<T>,
    dist: Vec<Option<T>>,
    level: Vec<usize>,
    next: Vec<usize>,
    sink_level: usize,
}

impl<T: Amount> Residual<'_, T> {
    /// Residual neighbours of `u` with the arc cost towards them.
    fn step(&self, u: usize, idx: usize) -> Option<(usize, usize, T)> {
        if u < self.n {
            let &k = self.out_arcs[u].get(idx)?;
            Some((k, self.n + self.arcs[k].1, self.arcs[k].2.clone()))
        } else {
            let &k = self.in_arcs[u - self.n].get(idx)?;
            Some((k, self.arcs[k].0, -self.arcs[k].2.clone()))
        }
    }

    fn open_arc(&self, u: usize, k: usize) -> bool {
        u < self.n || !self.flow[k].is_zero()
    }

    /// Bellman-Ford queue from every source with remaining supply.
    fn shortest_distances(&mut self) {
        let total = self.dist.len();
        self.dist.iter_mut().for_each(|d| *d = None);
        let mut queued = vec![false; total];
        let mut queue = VecDeque::new();
        for (i, rem) in self.rem_s.iter().enumerate().take(self.n) {
            if !rem.is_zero() {
                self.dist[i] = Some(T::zero());
                queue.push_back(i);
                queued[i] = true;
            }
        }
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            let du = self.dist[u].clone().expect("queued nodes are reached");
            let mut idx = 0;
            while let Some((k, v, c)) = self.step(u, idx) {
                idx += 1;
                if !self.open_arc(u, k) {
                    continue;
                }
                let cand = du.clone() + &c;
                if self.dist[v].as_ref().is_none_or(|dv| cand < *dv) {
                    self.dist[v] = Some(cand);
                    if !queued[v] {
                        queued[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
    }

    fn tight(&self, u: usize, v: usize, c: &T) -> bool {
        match (&self.dist[u], &self.dist[v]) {
            (Some(du), Some(dv)) => du.clone() + c == *dv,
            _ => false,
        }
    }

    fn terminal(&self, u: usize, target: &T) -> bool {
        u >= self.n && !self.rem_d[u - self.n].is_zero() && self.dist[u].as_ref() == Some(target)
    }

    /// Breadth-first levels over open tight arcs; whether a terminal sink is
    /// reachable.
    fn levels(&mut self, target: &T) -> bool {
        self.level.iter_mut().for_each(|l| *l = usize::MAX);
        self.next.iter_mut().for_each(|x| *x = 0);
        let mut queue = VecDeque::new();
        for (i, rem) in self.rem_s.iter().enumerate().take(self.n) {
            if !rem.is_zero() {
                self.level[i] = 0;
                queue.push_back(i);
            }
        }
        let mut found = None;
        while let Some(u) = queue.pop_front() {
            if found.is_some_and(|l| self.level[u] >= l) {
                break;
            }
            if self.terminal(u, target) {
                found = Some(self.level[u]);
                continue;
            }
            let mut idx = 0;
            while let Some((k, v, c)) = self.step(u, idx) {
                idx += 1;
                if self.level[v] == usize::MAX && self.open_arc(u, k) && self.tight(u, v, &c) {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        match found {
            Some(l) => {
                self.sink_level = l;
                true
            }
            None => false,
        }
    }

    /// Pushes at most `limit` from `u` along the level graph.
    fn push(&mut self, u: usize, limit: T, target: &T) -> T {
        let mut pushed = T::zero();
        if self.terminal(u, target) && self.level[u] == self.sink_level {
            let j = u - self.n;
            let take = if self.rem_d[j] < limit { self.rem_d[j].clone() } else { limit.clone() };
            self.rem_d[j] -= take.clone();
            return take;
        }
        if self.level[u] >= self.sink_level {
            return pushed;
        }
        while let Some((k, v, c)) = self.step(u, self.next[u]) {
            if self.level[v] == self.level[u] + 1 && self.open_arc(u, k) && self.tight(u, v, &c) {
                let mut room = limit.clone() - pushed.clone();
                if u >= self.n && self.flow[k] < room {
                    room = self.flow[k].clone();
                }
                let got = self.push(v, room, target);
                if u < self.n {
                    self.flow[k] += got.clone();
                } else {
                    self.flow[k] -= got.clone();
                }
                pushed += got;
                if pushed == limit {
                    return pushed;
                }
            }
            self.next[u] += 1;
        }
        pushed
    }
}
