//! Constraint pairs exclude relations and rule out unsound techniques.

use diffbisim::bisim::{find_bdb, gfp_bdb};
use diffbisim::modelio::{fixtures, parse_ode, parse_pairs};
use diffbisim::relation::UpTo;

fn main() {
    let f = parse_ode(fixtures::CHAINS_ODE).unwrap();
    let c = parse_pairs("x, x''", f.universe()).unwrap();
    let query = parse_pairs("z, z''; z, z'", f.universe()).unwrap();
    for t in UpTo::ALL {
        match find_bdb(&f, &query, &c, t) {
            Ok(r) => println!("{:<11} related {}", t.name(), r.related.display(f.universe())),
            Err(e) => println!("{:<11} rejected: {e}", t.name()),
        }
    }
    println!("largest: {}", gfp_bdb(&f, &c).display(f.universe()));
}
