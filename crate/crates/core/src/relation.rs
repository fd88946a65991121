//! Binary relations, closures, partitions and up-to techniques.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use crate::poly::{Universe, Var};

/// A finite set of ordered pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation<A: Ord = Var> {
    pairs: BTreeSet<(A, A)>,
}

impl<A: Ord> Default for Relation<A> {
    fn default() -> Self {
        Relation {
            pairs: BTreeSet::new(),
        }
    }
}

impl<A: Ord + Clone> Relation<A> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: A, b: A) -> bool {
        self.pairs.insert((a, b))
    }

    pub fn remove(&mut self, a: &A, b: &A) -> bool {
        self.pairs.remove(&(a.clone(), b.clone()))
    }

    pub fn contains(&self, a: &A, b: &A) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn contains_pair(&self, pair: &(A, A)) -> bool {
        self.pairs.contains(pair)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &(A, A)> + ExactSizeIterator {
        self.pairs.iter()
    }

    pub fn pairs(&self) -> &BTreeSet<(A, A)> {
        &self.pairs
    }

    pub fn union(&self, other: &Relation<A>) -> Relation<A> {
        self.pairs.union(&other.pairs).cloned().collect()
    }

    pub fn difference(&self, other: &Relation<A>) -> Relation<A> {
        self.pairs.difference(&other.pairs).cloned().collect()
    }

    pub fn intersection(&self, other: &Relation<A>) -> Relation<A> {
        self.pairs.intersection(&other.pairs).cloned().collect()
    }

    pub fn is_subset(&self, other: &Relation<A>) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn is_disjoint(&self, other: &Relation<A>) -> bool {
        self.pairs.is_disjoint(&other.pairs)
    }

    pub fn inverse(&self) -> Relation<A> {
        self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs.iter().all(|(a, b)| self.contains(b, a))
    }

    pub fn meets_identity(&self) -> bool {
        self.pairs.iter().any(|(a, b)| a == b)
    }

    /// `s(R)`.
    pub fn symmetric_closure(&self) -> Relation<A> {
        self.union(&self.inverse())
    }

    /// `r(R)` over the given carrier.
    pub fn reflexive_closure<'a>(&self, carrier: impl IntoIterator<Item = &'a A>) -> Relation<A>
    where
        A: 'a,
    {
        let mut out = self.clone();
        for a in carrier {
            out.insert(a.clone(), a.clone());
        }
        out
    }

    /// `t(R)`: pairs joined by a nonempty path.
    pub fn transitive_closure(&self) -> Relation<A> {
        let succ = self.successors();
        let mut out = Relation::new();
        for start in succ.keys() {
            let mut seen: BTreeSet<&A> = BTreeSet::new();
            let mut stack: Vec<&A> = succ[start].clone();
            while let Some(a) = stack.pop() {
                if seen.insert(a) {
                    if let Some(next) = succ.get(a) {
                        stack.extend(next.iter());
                    }
                }
            }
            for a in seen {
                out.insert((*start).clone(), a.clone());
            }
        }
        out
    }

    /// `e(R) = t(s(r(R)))` over the given carrier.
    pub fn equivalence_closure<'a>(&self, carrier: impl IntoIterator<Item = &'a A>) -> Relation<A>
    where
        A: 'a,
    {
        self.reflexive_closure(carrier).symmetric_closure().transitive_closure()
    }

    pub fn is_reflexive_on<'a>(&self, carrier: impl IntoIterator<Item = &'a A>) -> bool
    where
        A: 'a,
    {
        carrier.into_iter().all(|a| self.contains(a, a))
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive_closure() == *self
    }

    fn successors(&self) -> BTreeMap<&A, Vec<&A>> {
        let mut succ: BTreeMap<&A, Vec<&A>> = BTreeMap::new();
        for (a, b) in &self.pairs {
            succ.entry(a).or_default().push(b);
        }
        succ
    }
}

impl<A: Ord> FromIterator<(A, A)> for Relation<A> {
    fn from_iter<I: IntoIterator<Item = (A, A)>>(iter: I) -> Self {
        Relation {
            pairs: iter.into_iter().collect(),
        }
    }
}

impl<A: Ord> Extend<(A, A)> for Relation<A> {
    fn extend<I: IntoIterator<Item = (A, A)>>(&mut self, iter: I) {
        self.pairs.extend(iter)
    }
}

impl<A: Ord> IntoIterator for Relation<A> {
    type Item = (A, A);
    type IntoIter = std::collections::btree_set::IntoIter<(A, A)>;
    fn into_iter(self) -> Self::IntoIter {
        self.pairs.into_iter()
    }
}

impl<'a, A: Ord> IntoIterator for &'a Relation<A> {
    type Item = &'a (A, A);
    type IntoIter = std::collections::btree_set::Iter<'a, (A, A)>;
    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

impl Relation<Var> {
    pub fn identity(universe: &Universe) -> Relation<Var> {
        universe.vars().map(|x| (x, x)).collect()
    }

    pub fn full(universe: &Universe) -> Relation<Var> {
        universe
            .vars()
            .flat_map(|x| universe.vars().map(move |y| (x, y)))
            .collect()
    }

    /// Cartesian product of `vars` with itself.
    pub fn product(vars: &[Var]) -> Relation<Var> {
        vars.iter().flat_map(|&x| vars.iter().map(move |&y| (x, y))).collect()
    }

    pub fn closure(&self, kind: Closure, universe: &Universe) -> Relation<Var> {
        let carrier: Vec<Var> = universe.vars().collect();
        match kind {
            Closure::Reflexive => self.reflexive_closure(&carrier),
            Closure::Symmetric => self.symmetric_closure(),
            Closure::Transitive => self.transitive_closure(),
            Closure::Equivalence => self.equivalence_closure(&carrier),
        }
    }

    pub fn is_equivalence(&self, universe: &Universe) -> bool {
        let carrier: Vec<Var> = universe.vars().collect();
        self.is_reflexive_on(&carrier) && self.is_symmetric() && self.is_transitive()
    }

    pub fn display<'a>(&'a self, universe: &'a Universe) -> RelationDisplay<'a> {
        RelationDisplay {
            relation: self,
            universe,
        }
    }
}

pub struct RelationDisplay<'a> {
    relation: &'a Relation<Var>,
    universe: &'a Universe,
}

impl fmt::Display for RelationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (a, b)) in self.relation.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {})", self.universe.name(*a), self.universe.name(*b))?;
        }
        f.write_str("}")
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Closure {
    Reflexive,
    Symmetric,
    Transitive,
    Equivalence,
}

/// Disjoint blocks covering a universe; each block is sorted and blocks are
/// ordered by their least element, which is the block representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<Var>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Blocks of `e(R)`.
    pub fn from_relation(universe: &Universe, relation: &Relation<Var>) -> Partition {
        let mut uf = UnionFind::new(universe.len());
        for (a, b) in relation {
            uf.union(a.index(), b.index());
        }
        let mut by_root: BTreeMap<usize, Vec<Var>> = BTreeMap::new();
        for x in universe.vars() {
            by_root.entry(uf.find(x.index())).or_default().push(x);
        }
        let mut blocks: Vec<Vec<Var>> = by_root.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        Self::from_sorted_blocks(universe.len(), blocks)
    }

    pub fn discrete(universe: &Universe) -> Partition {
        Self::from_sorted_blocks(universe.len(), universe.vars().map(|x| vec![x]).collect())
    }

    fn from_sorted_blocks(n: usize, blocks: Vec<Vec<Var>>) -> Partition {
        let mut block_of = vec![0; n];
        for (k, block) in blocks.iter().enumerate() {
            for x in block {
                block_of[x.index()] = k;
            }
        }
        Partition { blocks, block_of }
    }

    pub fn blocks(&self) -> &[Vec<Var>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, x: Var) -> usize {
        self.block_of[x.index()]
    }

    pub fn representative(&self, x: Var) -> Var {
        self.blocks[self.block_of(x)][0]
    }

    pub fn same_block(&self, x: Var, y: Var) -> bool {
        self.block_of(x) == self.block_of(y)
    }

    /// The equivalence relation whose classes are the blocks.
    pub fn to_relation(&self) -> Relation<Var> {
        self.blocks
            .iter()
            .flat_map(|b| b.iter().flat_map(move |&x| b.iter().map(move |&y| (x, y))))
            .collect()
    }

    pub fn display<'a>(&'a self, universe: &'a Universe) -> PartitionDisplay<'a> {
        PartitionDisplay {
            partition: self,
            universe,
        }
    }
}

pub struct PartitionDisplay<'a> {
    partition: &'a Partition,
    universe: &'a Universe,
}

impl fmt::Display for PartitionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, block) in self.partition.blocks.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            let names: Vec<&str> = block.iter().map(|x| self.universe.name(*x)).collect();
            write!(f, "{{{}}}", names.join(", "))?;
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root so roots are deterministic.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// The closure `g` applied inside the local algorithms.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UpTo {
    Identity,
    Reflexive,
    Symmetric,
    ReflexiveSymmetric,
    Transitive,
    Equivalence,
}

impl UpTo {
    pub const ALL: [UpTo; 6] = [
        UpTo::Identity,
        UpTo::Reflexive,
        UpTo::Symmetric,
        UpTo::ReflexiveSymmetric,
        UpTo::Transitive,
        UpTo::Equivalence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UpTo::Identity => "identity",
            UpTo::Reflexive => "reflexive",
            UpTo::Symmetric => "symmetric",
            UpTo::ReflexiveSymmetric => "refl-sym",
            UpTo::Transitive => "transitive",
            UpTo::Equivalence => "equiv",
        }
    }

    /// Checks that `self` is a sound technique for the operator constrained
    /// by `constraints`.
    pub fn validate(self, constraints: &Relation<Var>) -> Result<(), UpToRejection> {
        if constraints.is_empty() {
            return Ok(());
        }
        match self {
            UpTo::Identity => Ok(()),
            UpTo::Reflexive if constraints.meets_identity() => Err(UpToRejection::ConstraintsMeetIdentity(self)),
            UpTo::Reflexive => Ok(()),
            UpTo::Symmetric if !constraints.is_symmetric() => Err(UpToRejection::ConstraintsNotSymmetric(self)),
            UpTo::Symmetric => Ok(()),
            UpTo::ReflexiveSymmetric => {
                if !constraints.is_symmetric() {
                    Err(UpToRejection::ConstraintsNotSymmetric(self))
                } else if constraints.meets_identity() {
                    Err(UpToRejection::ConstraintsMeetIdentity(self))
                } else {
                    Ok(())
                }
            }
            UpTo::Transitive | UpTo::Equivalence => Err(UpToRejection::ConstraintsNotEmpty(self)),
        }
    }

    /// Whether membership in `g(R)` only depends on `(x, y)` and `(y, x)`.
    pub fn is_local(self) -> bool {
        !matches!(self, UpTo::Transitive | UpTo::Equivalence)
    }

    /// `(x, y) ∈ g(R)` for local techniques.
    pub fn local_contains(self, r: &Relation<Var>, x: Var, y: Var) -> bool {
        match self {
            UpTo::Identity => r.contains(&x, &y),
            UpTo::Reflexive => x == y || r.contains(&x, &y),
            UpTo::Symmetric => r.contains(&x, &y) || r.contains(&y, &x),
            UpTo::ReflexiveSymmetric => x == y || r.contains(&x, &y) || r.contains(&y, &x),
            UpTo::Transitive | UpTo::Equivalence => panic!("{} is not local", self.name()),
        }
    }

    /// `g(R)` materialized over `universe`.
    pub fn apply(self, relation: &Relation<Var>, universe: &Universe) -> Relation<Var> {
        match self {
            UpTo::Identity => relation.clone(),
            UpTo::Reflexive => relation.closure(Closure::Reflexive, universe),
            UpTo::Symmetric => relation.closure(Closure::Symmetric, universe),
            UpTo::ReflexiveSymmetric => relation
                .closure(Closure::Symmetric, universe)
                .closure(Closure::Reflexive, universe),
            UpTo::Transitive => relation.closure(Closure::Transitive, universe),
            UpTo::Equivalence => relation.closure(Closure::Equivalence, universe),
        }
    }
}

impl fmt::Display for UpTo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UpTo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" | "id" | "none" => Ok(UpTo::Identity),
            "reflexive" | "r" => Ok(UpTo::Reflexive),
            "symmetric" | "s" => Ok(UpTo::Symmetric),
            "refl-sym" | "reflexive-symmetric" | "rs" => Ok(UpTo::ReflexiveSymmetric),
            "transitive" | "t" => Ok(UpTo::Transitive),
            "equiv" | "equivalence" | "e" => Ok(UpTo::Equivalence),
            other => Err(format!(
                "unknown up-to technique `{other}` (expected identity, reflexive, symmetric, refl-sym, transitive or equiv)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum UpToRejection {
    #[error("up-to {0} is unsound here: constraints must not contain identity pairs")]
    ConstraintsMeetIdentity(UpTo),
    #[error("up-to {0} is unsound here: constraints must be symmetric")]
    ConstraintsNotSymmetric(UpTo),
    #[error("up-to {0} is unsound with nonempty constraints")]
    ConstraintsNotEmpty(UpTo),
}

/// Membership oracle for `g(R)` that avoids materializing transitive and
/// equivalence closures.
pub struct ClosureView {
    kind: UpTo,
    relation: Relation<Var>,
    components: Option<Vec<usize>>,
    successors: Option<HashMap<Var, Vec<Var>>>,
    reach: Mutex<HashMap<Var, BTreeSet<Var>>>,
}

impl ClosureView {
    pub fn new(kind: UpTo, relation: Relation<Var>, universe_len: usize) -> Self {
        let mut view = ClosureView {
            kind,
            relation,
            components: None,
            successors: None,
            reach: Mutex::new(HashMap::new()),
        };
        match kind {
            UpTo::Equivalence => {
                let mut uf = UnionFind::new(universe_len);
                for (a, b) in &view.relation {
                    uf.union(a.index(), b.index());
                }
                view.components = Some((0..universe_len).map(|i| uf.find(i)).collect());
            }
            UpTo::Transitive => {
                let mut succ: HashMap<Var, Vec<Var>> = HashMap::new();
                for &(a, b) in &view.relation {
                    succ.entry(a).or_default().push(b);
                }
                view.successors = Some(succ);
            }
            _ => {}
        }
        view
    }

    pub fn kind(&self) -> UpTo {
        self.kind
    }

    pub fn relation(&self) -> &Relation<Var> {
        &self.relation
    }

    pub fn contains(&self, x: Var, y: Var) -> bool {
        let r = &self.relation;
        match self.kind {
            UpTo::Identity | UpTo::Reflexive | UpTo::Symmetric | UpTo::ReflexiveSymmetric => {
                self.kind.local_contains(r, x, y)
            }
            UpTo::Equivalence => {
                let c = self.components.as_ref().expect("built for equivalence");
                x == y || c[x.index()] == c[y.index()]
            }
            UpTo::Transitive => {
                if r.contains(&x, &y) {
                    return true;
                }
                let succ = self.successors.as_ref().expect("built for transitive");
                let mut reach = self.reach.lock().expect("reachability cache");
                let set = reach.entry(x).or_insert_with(|| {
                    let mut seen = BTreeSet::new();
                    let mut stack: Vec<Var> = succ.get(&x).cloned().unwrap_or_default();
                    while let Some(a) = stack.pop() {
                        if seen.insert(a) {
                            if let Some(next) = succ.get(&a) {
                                stack.extend(next.iter().copied());
                            }
                        }
                    }
                    seen
                });
                set.contains(&y)
            }
        }
    }
}
