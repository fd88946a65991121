//! Largest bisimulations and the reduced models they induce.

use diffbisim::bisim::{bde_partition, bde_quotient, check_bde, check_fde, fde_quotient, gfp_fdb};
use diffbisim::modelio::{fixtures, parse_crn, write_ode};
use diffbisim::relation::Partition;

fn main() {
    let f = parse_crn(fixtures::BINDING_CRN).unwrap().to_field();
    let bde = bde_partition(&f);
    println!("largest BDE: {}", bde.display(f.universe()));
    let r = bde.to_relation();
    println!("BDE check: {}", check_bde(&f, &r).unwrap());
    print!("{}", write_ode(&bde_quotient(&f, &r).unwrap()));

    let fde = Partition::from_relation(f.universe(), &gfp_fdb(&f));
    println!("largest FDE: {}", fde.display(f.universe()));
    let r = fde.to_relation();
    println!("FDE check: {}", check_fde(&f, &r).unwrap());
    print!("{}", write_ode(&fde_quotient(&f, &r).unwrap()));
}
