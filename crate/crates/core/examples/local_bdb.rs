//! Answer a query with a local backward bisimulation under each technique.

use diffbisim::bisim::{check_bde, find_bdb};
use diffbisim::modelio::{fixtures, parse_crn, parse_pairs};
use diffbisim::relation::{Relation, UpTo};

fn main() {
    let f = parse_crn(fixtures::BINDING_CRN).unwrap().to_field();
    let query = parse_pairs("A01, A10", f.universe()).unwrap();
    let vars: Vec<_> = f.vars().collect();
    for t in UpTo::ALL {
        let r = find_bdb(&f, &query, &Relation::new(), t).unwrap();
        let e = r.related.equivalence_closure(&vars);
        println!(
            "{:<11} related {:<40} transport problems {:>3}, iterations {}, closure is a BDE: {}",
            t.name(),
            r.related.display(f.universe()).to_string(),
            r.stats.transport_problems,
            r.stats.iterations,
            check_bde(&f, &e).unwrap()
        );
    }
    let (a, b) = (f.var("A00").unwrap(), f.var("A11").unwrap());
    let r = find_bdb(&f, &[(a, b)].into_iter().collect(), &Relation::new(), UpTo::Identity).unwrap();
    println!("A00 ~ A11: {}, refuted {}", r.answer(a, b), r.refuted.display(f.universe()));
}
