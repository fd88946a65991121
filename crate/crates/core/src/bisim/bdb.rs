use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;

use super::{check_vars, BisimError, BisimResult, IterationState, RunStats};
use crate::coupling::{find_linear_coupling_by, find_monomial_coupling_by, linear_instance, monomial_lifting_witness, Atom};
use crate::poly::{LinComb, Monomial, PolyVectorField, Var};
use crate::relation::{ClosureView, Relation, UpTo};
use crate::Rational;
use crate::transport::ArcClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BdbOptions {
    pub up_to: UpTo,
    /// Check the pairs of one sweep concurrently against the state at the
    /// start of the sweep; results are merged in sweep order.
    pub parallel: bool,
}

impl Default for BdbOptions {
    fn default() -> Self {
        BdbOptions {
            up_to: UpTo::Identity,
            parallel: false,
        }
    }
}

/// Computes a constraint-avoiding BDB (up to `up_to`) around `query`.
pub fn find_bdb(
    f: &PolyVectorField,
    query: &Relation<Var>,
    constraints: &Relation<Var>,
    up_to: UpTo,
) -> Result<BisimResult, BisimError> {
    let opts = BdbOptions { up_to, parallel: false };
    find_bdb_with(f, query, constraints, opts, &mut |_| {})
}

pub fn find_bdb_with(
    f: &PolyVectorField,
    query: &Relation<Var>,
    constraints: &Relation<Var>,
    opts: BdbOptions,
    observer: &mut dyn FnMut(&IterationState<'_>),
) -> Result<BisimResult, BisimError> {
    check_vars(f, &[query, constraints])?;
    opts.up_to.validate(constraints)?;
    let start = Instant::now();
    let table = Table::new(f);
    let mut run = Run {
        f,
        table: &table,
        c: constraints,
        up_to: opts.up_to,
        r: query.difference(constraints),
        r_hat: constraints.clone(),
        q: Relation::new(),
        q_hat: Relation::new(),
        view: None,
        memo: Memo::default(),
        tp: 0,
    };
    let mut iterations = 0;
    let mut changed = !(run.r.is_empty() && run.r_hat.is_empty());
    while changed {
        iterations += 1;
        changed = false;
        if opts.parallel {
            changed |= run.sweep_r_parallel();
            changed |= run.sweep_q_parallel();
        } else {
            changed |= run.sweep_r();
            changed |= run.sweep_q();
        }
        observer(&IterationState {
            iteration: iterations,
            related: &run.r,
            refuted: &run.r_hat,
            monomial_related: &table.resolve(&run.q),
            monomial_refuted: &table.resolve(&run.q_hat),
        });
    }
    debug_assert!(super::is_bdb_up_to(f, &run.r, constraints, opts.up_to));
    Ok(BisimResult {
        monomial_related: table.resolve(&run.q),
        monomial_refuted: table.resolve(&run.q_hat),
        related: run.r,
        refuted: run.r_hat,
        stats: RunStats {
            transport_problems: run.tp,
            iterations,
            wall_time: start.elapsed(),
        },
    })
}

/// Index of a monomial of the field.
type Mono = u32;
type MonoPair = (Mono, Mono);

/// The monomials of the field, numbered in ascending order, and the
/// right-hand sides over those numbers.
struct Table {
    monos: Vec<Monomial>,
    rhs: Vec<LinComb<Mono>>,
    sums: Vec<Rational>,
}

impl Table {
    fn new(f: &PolyVectorField) -> Table {
        let monos: Vec<Monomial> = f.monomials().into_iter().collect();
        let index: HashMap<&Monomial, Mono> = monos.iter().zip(0..).collect();
        let rhs = f
            .rhs_all()
            .iter()
            .map(|p| p.as_lincomb().iter().map(|(m, c)| (index[m], c.clone())).collect())
            .collect::<Vec<LinComb<Mono>>>();
        let sums = rhs.iter().map(LinComb::sum_coeffs).collect();
        Table { monos, rhs, sums }
    }

    fn get(&self, m: Mono) -> &Monomial {
        &self.monos[m as usize]
    }

    fn resolve(&self, q: &Relation<Mono>) -> Relation<Monomial> {
        q.iter().map(|&(m, n)| (self.get(m).clone(), self.get(n).clone())).collect()
    }
}

/// Variables `a` and `b` such that `(a, b)` may have entered or left `g(R)`.
type Rect = (Vec<Var>, Vec<Var>);

/// Pairs of `g(R)` that a change of `(x, y)` in `r` can affect; `r` must
/// contain `(x, y)`.
fn affected(up_to: UpTo, r: &Relation<Var>, x: Var, y: Var) -> Vec<Rect> {
    let reach = |from: Var, forward: bool, undirected: bool| {
        let mut seen = vec![from];
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            for &(a, b) in r.iter() {
                let next = match (a == u, b == u) {
                    (true, _) if forward || undirected => b,
                    (_, true) if !forward || undirected => a,
                    _ => continue,
                };
                if !seen.contains(&next) {
                    seen.push(next);
                    stack.push(next);
                }
            }
        }
        seen
    };
    match up_to {
        UpTo::Transitive => vec![(reach(x, false, false), reach(y, true, false))],
        UpTo::Equivalence => {
            let class = reach(x, true, true);
            vec![(class.clone(), class)]
        }
        _ => vec![(vec![x], vec![y]), (vec![y], vec![x])],
    }
}

/// Cached answers to `(m, n) ∈ M[g(R) \ C]`, invalidated lazily. Positive
/// answers keep the support of a witnessing coupling.
#[derive(Default)]
struct Memo {
    known: HashMap<MonoPair, Option<Vec<(Var, Var)>>>,
    /// Negative answers by the factor pairs they mention.
    by_factors: HashMap<(Var, Var), Vec<MonoPair>>,
    /// Positive answers by the pairs of their witness.
    by_witness: HashMap<(Var, Var), Vec<MonoPair>>,
    grown: Vec<Rect>,
    shrunk: Vec<Rect>,
}

impl Memo {
    fn get(&self, key: &MonoPair) -> Option<bool> {
        self.known.get(key).map(Option::is_some)
    }

    fn insert(&mut self, table: &Table, key: MonoPair, answer: Option<Vec<(Var, Var)>>) {
        match &answer {
            Some(witness) => {
                for &pair in witness {
                    self.by_witness.entry(pair).or_default().push(key);
                }
            }
            None => {
                for a in table.get(key.0).vars() {
                    for b in table.get(key.1).vars() {
                        self.by_factors.entry((a, b)).or_default().push(key);
                    }
                }
            }
        }
        self.known.insert(key, answer);
    }

    /// Drops answers that pending changes of R may have flipped. The lifting
    /// is monotone, so growth only affects negative answers and shrinking
    /// only positive ones whose witness lost a pair.
    fn settle(&mut self, trusted: impl Fn(Var, Var) -> bool) {
        for rect in std::mem::take(&mut self.grown) {
            let live = |k: &MonoPair| matches!(self.known.get(k), Some(None));
            for key in candidates(&mut self.by_factors, &rect, live) {
                if matches!(self.known.get(&key), Some(None)) {
                    self.known.remove(&key);
                }
            }
        }
        for rect in std::mem::take(&mut self.shrunk) {
            let live = |k: &MonoPair| matches!(self.known.get(k), Some(Some(_)));
            for key in candidates(&mut self.by_witness, &rect, live) {
                if let Some(Some(witness)) = self.known.get(&key) {
                    if !witness.iter().all(|&(a, b)| trusted(a, b)) {
                        self.known.remove(&key);
                    }
                }
            }
        }
    }
}

/// Live indexed keys under some pair of `rect`; visited lists drop stale
/// keys.
fn candidates(
    index: &mut HashMap<(Var, Var), Vec<MonoPair>>,
    (left, right): &Rect,
    live: impl Fn(&MonoPair) -> bool,
) -> Vec<MonoPair> {
    let mut out = Vec::new();
    let mut visit = |keys: &mut Vec<MonoPair>| {
        keys.sort_unstable();
        keys.dedup();
        keys.retain(&live);
        out.extend(keys.iter().copied());
    };
    if left.len() * right.len() <= index.len() {
        for &a in left {
            for &b in right {
                if let Some(keys) = index.get_mut(&(a, b)) {
                    visit(keys);
                }
            }
        }
    } else {
        for ((a, b), keys) in index.iter_mut() {
            if left.contains(a) && right.contains(b) {
                visit(keys);
            }
        }
    }
    out
}

struct Run<'a> {
    f: &'a PolyVectorField,
    table: &'a Table,
    c: &'a Relation<Var>,
    up_to: UpTo,
    r: Relation<Var>,
    r_hat: Relation<Var>,
    q: Relation<Mono>,
    q_hat: Relation<Mono>,
    view: Option<ClosureView>,
    memo: Memo,
    tp: u64,
}

enum Outcome<P> {
    Coupled(Vec<P>),
    Refuted,
}

/// Read-only view of the algorithm state used by single pair checks.
struct Ctx<'b> {
    table: &'b Table,
    c: &'b Relation<Var>,
    up_to: UpTo,
    r: &'b Relation<Var>,
    view: Option<&'b ClosureView>,
    r_hat: &'b Relation<Var>,
    q: &'b Relation<Mono>,
    q_hat: &'b Relation<Mono>,
}

impl Run<'_> {
    fn parts(&mut self) -> (Ctx<'_>, &mut Memo, &mut u64) {
        if !self.up_to.is_local() && self.view.is_none() {
            self.view = Some(ClosureView::new(self.up_to, self.r.clone(), self.f.dim()));
        }
        let ctx = Ctx {
            table: self.table,
            c: self.c,
            up_to: self.up_to,
            r: &self.r,
            view: self.view.as_ref(),
            r_hat: &self.r_hat,
            q: &self.q,
            q_hat: &self.q_hat,
        };
        self.memo.settle(|a, b| ctx.trusted(a, b));
        (ctx, &mut self.memo, &mut self.tp)
    }

    fn move_to_refuted(&mut self, x: Var, y: Var) {
        self.memo.shrunk.extend(affected(self.up_to, &self.r, x, y));
        self.r.remove(&x, &y);
        self.r_hat.insert(x, y);
        self.view = None;
    }

    fn add_related(&mut self, pairs: Vec<(Var, Var)>) -> bool {
        let mut grew = false;
        for (a, b) in pairs {
            if self.r.insert(a, b) {
                grew = true;
                self.memo.grown.extend(affected(self.up_to, &self.r, a, b));
            }
        }
        if grew {
            self.view = None;
        }
        grew
    }

    fn apply_r(&mut self, (x, y): (Var, Var), outcome: Outcome<MonoPair>) -> bool {
        match outcome {
            Outcome::Coupled(pairs) => {
                let mut changed = false;
                for (m, n) in pairs {
                    changed |= self.q.insert(m, n);
                }
                changed
            }
            Outcome::Refuted => {
                self.move_to_refuted(x, y);
                true
            }
        }
    }

    fn apply_q(&mut self, (m, n): MonoPair, outcome: Outcome<(Var, Var)>) -> bool {
        match outcome {
            Outcome::Coupled(pairs) => self.add_related(pairs),
            Outcome::Refuted => {
                self.q.remove(&m, &n);
                self.q_hat.insert(m, n);
                true
            }
        }
    }

    fn sweep_r(&mut self) -> bool {
        let snapshot: Vec<(Var, Var)> = self.r.iter().copied().collect();
        let mut changed = false;
        for pair in snapshot {
            let outcome = {
                let (ctx, memo, tp) = self.parts();
                ctx.check_r(pair, memo, tp)
            };
            changed |= self.apply_r(pair, outcome);
        }
        changed
    }

    fn sweep_q(&mut self) -> bool {
        let snapshot: Vec<MonoPair> = self.q.iter().copied().collect();
        let mut changed = false;
        for pair in snapshot {
            let outcome = {
                let (ctx, _, tp) = self.parts();
                ctx.check_q(pair, tp)
            };
            changed |= self.apply_q(pair, outcome);
        }
        changed
    }

    fn sweep_r_parallel(&mut self) -> bool {
        let snapshot: Vec<(Var, Var)> = self.r.iter().copied().collect();
        let results: Vec<(Outcome<MonoPair>, u64)> = {
            let (ctx, memo, _) = self.parts();
            let shared: &Memo = memo;
            snapshot
                .par_iter()
                .map(|&pair| {
                    let mut local = Memo::default();
                    let mut tp = 0;
                    let outcome = ctx.check_r_with(pair, &mut |m, n, tp: &mut u64| {
                        if let Some(known) = shared.get(&(m, n)) {
                            return known;
                        }
                        ctx.in_m_cached(m, n, &mut local, tp)
                    }, &mut tp);
                    (outcome, tp)
                })
                .collect()
        };
        let mut changed = false;
        for (pair, (outcome, tp)) in snapshot.into_iter().zip(results) {
            self.tp += tp;
            changed |= self.apply_r(pair, outcome);
        }
        changed
    }

    fn sweep_q_parallel(&mut self) -> bool {
        let snapshot: Vec<MonoPair> = self.q.iter().copied().collect();
        let results: Vec<(Outcome<(Var, Var)>, u64)> = {
            let (ctx, _, _) = self.parts();
            snapshot
                .par_iter()
                .map(|pair| {
                    let mut tp = 0;
                    (ctx.check_q(*pair, &mut tp), tp)
                })
                .collect()
        };
        let mut changed = false;
        for (pair, (outcome, tp)) in snapshot.into_iter().zip(results) {
            self.tp += tp;
            changed |= self.apply_q(pair, outcome);
        }
        changed
    }
}

impl Ctx<'_> {
    /// `(a, b) ∈ g(R)`.
    fn in_g(&self, a: Var, b: Var) -> bool {
        match self.view {
            Some(view) => view.contains(a, b),
            None => self.up_to.local_contains(self.r, a, b),
        }
    }

    /// `(a, b) ∈ g(R) \ C`.
    fn trusted(&self, a: Var, b: Var) -> bool {
        self.in_g(a, b) && !self.c.contains(&a, &b)
    }

    fn in_m_cached(&self, m: Mono, n: Mono, memo: &mut Memo, tp: &mut u64) -> bool {
        let key = (m, n);
        if let Some(known) = memo.get(&key) {
            return known;
        }
        let (mm, nn) = (self.table.get(m), self.table.get(n));
        if mm.degree() >= 2 {
            *tp += 1;
        }
        let answer = monomial_lifting_witness(mm, nn, |a, b| self.trusted(a, b));
        let found = answer.is_some();
        memo.insert(self.table, key, answer);
        found
    }

    fn check_r(&self, pair: (Var, Var), memo: &mut Memo, tp: &mut u64) -> Outcome<MonoPair> {
        self.check_r_with(pair, &mut |m, n, tp| self.in_m_cached(m, n, memo, tp), tp)
    }

    /// Linear coupling for `(f_x, f_y)` avoiding `Q̂`. Arcs already in `Q`
    /// or in `M[g(R) \ C]` are free; the returned pairs are the part of the
    /// support that must be added to `Q`.
    fn check_r_with(
        &self,
        (x, y): (Var, Var),
        in_m: &mut dyn FnMut(Mono, Mono, &mut u64) -> bool,
        tp: &mut u64,
    ) -> Outcome<MonoPair> {
        let g = &self.table.rhs[x.index()];
        let h = &self.table.rhs[y.index()];
        *tp += 1;
        if self.table.sums[x.index()] != self.table.sums[y.index()] {
            return Outcome::Refuted;
        }
        let inst = linear_instance(g, h);
        let rows: Vec<Mono> = inst.supplies.keys().copied().collect();
        let cols: Vec<Mono> = inst.demands.keys().copied().collect();
        // (class, already trusted) per arc, row-major.
        let mut classes = Vec::with_capacity(rows.len() * cols.len());
        for &m in &rows {
            let mm = self.table.get(m);
            for &n in &cols {
                let nn = self.table.get(n);
                let class = if mm.degree() != nn.degree() || self.q_hat.contains(&m, &n) {
                    (ArcClass::Forbidden, false)
                } else if self.q.contains(&m, &n) {
                    (ArcClass::Cost(0), true)
                } else if in_m(m, n, tp) {
                    (ArcClass::Cost(0), self.up_to != UpTo::Identity)
                } else {
                    (ArcClass::Cost(1 + mm.affinity(nn)), false)
                };
                classes.push(class);
            }
        }
        let at = |m: &Mono, n: &Mono| {
            let i = rows.binary_search(m).expect("row atom");
            let j = cols.binary_search(n).expect("column atom");
            classes[i * cols.len() + j]
        };
        match find_linear_coupling_by(g, h, |m, n| at(m, n).0) {
            None => Outcome::Refuted,
            Some(omega) => Outcome::Coupled(omega.support().filter(|(m, n)| !at(m, n).1).copied().collect()),
        }
    }

    /// Monomial coupling for `(m, n)` avoiding `R̂`, preferring pairs of
    /// `g(R) \ C`, then identity pairs. Returns the pairs to add to `R`.
    fn check_q(&self, (m, n): MonoPair, tp: &mut u64) -> Outcome<(Var, Var)> {
        *tp += 1;
        let rho = find_monomial_coupling_by(self.table.get(m), self.table.get(n), |&a, &b| {
            if self.r_hat.contains(&a, &b) {
                ArcClass::Forbidden
            } else if self.trusted(a, b) {
                ArcClass::Cost(0)
            } else {
                ArcClass::Cost(1 + a.affinity(&b))
            }
        });
        match rho {
            None => Outcome::Refuted,
            Some(rho) => Outcome::Coupled(
                rho.support()
                    .filter(|&&(a, b)| !self.in_g(a, b))
                    .copied()
                    .collect(),
            ),
        }
    }
}
