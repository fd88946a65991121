//! Split the Jacobian into constant matrices, one per monomial term.

use diffbisim::bisim::jacobian_decompose;
use diffbisim::modelio::{fixtures, parse_crn};

fn main() {
    let f = parse_crn(fixtures::BINDING_CRN).unwrap().to_field();
    let u = f.universe();
    let d = jacobian_decompose(&f);
    println!("{} terms, {} nonzero entries", d.len(), d.nonzeros());
    for (m, j) in d.terms() {
        println!("J_{}:", m.display(u));
        for ((row, col), c) in j {
            println!("  [{}, {}] = {c}", u.name(*row), u.name(*col));
        }
    }
    let x = f.var("A01").unwrap();
    let b = f.var("B").unwrap();
    println!("dJ[A01, B] = {}", d.entry(x, b).display(u));
}
