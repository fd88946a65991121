//! Treat rate constants as species and find which ones are interchangeable.

use diffbisim::bisim::find_bdb;
use diffbisim::modelio::{extend_params, fixtures, parse_crn, parse_pairs, write_crn};
use diffbisim::relation::{Relation, UpTo};

fn main() {
    let extended = extend_params(&parse_crn(fixtures::BINDING_CRN).unwrap());
    print!("{}", write_crn(&extended));
    let f = extended.to_field();
    let query = parse_pairs("A01, A10", f.universe()).unwrap();
    let r = find_bdb(&f, &query, &Relation::new(), UpTo::Identity).unwrap();
    let params: Vec<String> = r
        .related
        .iter()
        .filter(|(a, b)| a < b && f.name(*a).starts_with('k'))
        .map(|(a, b)| format!("{} ~ {}", f.name(*a), f.name(*b)))
        .collect();
    println!("interchangeable parameters: {}", params.join(", "));
    println!("{} transport problems", r.stats.transport_problems);
}
