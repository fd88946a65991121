//! Multisite phosphorylation benchmark family.
//!
//! A substrate with `n` sites, each unphosphorylated (`u`), bound to the
//! kinase while unphosphorylated (`k`), phosphorylated (`p`) or bound to the
//! phosphatase while phosphorylated (`f`). Species `A<sites>` plus kinase `K`
//! and phosphatase `F`; `4^n + 2` species and `6·n·4^(n-1)` reactions.

use super::crn::{Complex, Crn, Reaction};
use crate::poly::{Universe, Var};
use crate::relation::Relation;
use crate::Rational;

const SITES: [char; 4] = ['u', 'k', 'p', 'f'];

fn configs(n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|prefix| SITES.iter().map(move |c| format!("{prefix}{c}")))
            .collect();
    }
    out
}

fn complex(items: &[Var]) -> Complex {
    let mut c = Complex::new();
    for &v in items {
        *c.entry(v).or_insert(0) += 1;
    }
    c
}

/// The model with `n ≥ 1` sites.
pub fn multisite(n: usize) -> Crn {
    assert!(n >= 1, "at least one site");
    let names: Vec<String> = configs(n).into_iter().map(|c| format!("A{c}")).collect();
    let mut universe = Universe::from_names(names.iter().cloned()).expect("distinct configurations");
    let kinase = universe.add("K").expect("fresh");
    let phosphatase = universe.add("F").expect("fresh");
    let species = |name: &str| universe.get(name).expect("configuration exists");
    let mut reactions = Vec::new();
    let rate = |k: i64| Rational::from_integer(k.into());
    let mut origin = 0;
    for name in &names {
        let sites: Vec<char> = name[1..].chars().collect();
        for (i, &s) in sites.iter().enumerate() {
            let with = |c: char| {
                let mut t = sites.clone();
                t[i] = c;
                species(&format!("A{}", t.iter().collect::<String>()))
            };
            let me = species(name);
            let steps: Vec<(Vec<Var>, Vec<Var>, i64)> = match s {
                'u' => vec![(vec![me, kinase], vec![with('k')], 1)],
                'k' => vec![
                    (vec![me], vec![with('u'), kinase], 2),
                    (vec![me], vec![with('p'), kinase], 3),
                ],
                'p' => vec![(vec![me, phosphatase], vec![with('f')], 4)],
                'f' => vec![
                    (vec![me], vec![with('p'), phosphatase], 5),
                    (vec![me], vec![with('u'), phosphatase], 6),
                ],
                _ => unreachable!("site alphabet"),
            };
            for (lhs, rhs, k) in steps {
                origin += 1;
                reactions.push(Reaction {
                    reactants: complex(&lhs),
                    products: complex(&rhs),
                    rate: rate(k),
                    origin,
                    reverse: false,
                });
            }
        }
    }
    Crn { universe, reactions }
}

/// Product of the `n` species with one kinase-bound site and all other
/// sites unphosphorylated (`n²` pairs).
pub fn multisite_query(crn: &Crn, n: usize) -> Relation<Var> {
    let vars: Vec<Var> = (0..n)
        .map(|i| {
            let sites: String = (0..n).map(|j| if i == j { 'k' } else { 'u' }).collect();
            crn.universe.get(&format!("A{sites}")).expect("configuration exists")
        })
        .collect();
    Relation::product(&vars)
}
