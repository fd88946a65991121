//! Relations, their closures and the up-to techniques they induce.

use diffbisim::modelio::parse_pairs;
use diffbisim::poly::Universe;
use diffbisim::relation::{Partition, UpTo};

fn main() {
    let u = Universe::from_names(["a", "b", "c", "d", "e"]).unwrap();
    let r = parse_pairs("a, b; b, c; d, e", &u).unwrap();
    println!("R           = {}", r.display(&u));
    for t in UpTo::ALL {
        println!("{:<11} = {}", t.name(), t.apply(&r, &u).display(&u));
    }
    let p = Partition::from_relation(&u, &r);
    println!("partition   = {}", p.display(&u));
    let constraints = parse_pairs("a, e", &u).unwrap();
    for t in UpTo::ALL {
        let verdict = match t.validate(&constraints) {
            Ok(()) => "sound".to_string(),
            Err(e) => e.to_string(),
        };
        println!("{} with constraints: {verdict}", t.name());
    }
}
