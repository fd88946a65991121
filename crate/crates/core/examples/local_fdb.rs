//! Forward bisimulation of a star of SIR patches, watched iteration by iteration.

use diffbisim::bisim::{check_fde, find_fdb_with, FdbOptions};
use diffbisim::modelio::{fixtures, parse_ode, parse_var_list};
use diffbisim::relation::{Relation, UpTo};

fn main() {
    let f = parse_ode(fixtures::SIR_STAR_ODE).unwrap();
    let leaves = parse_var_list("S1, S3", f.universe()).unwrap();
    let query = Relation::product(&leaves);
    let opts = FdbOptions { up_to: UpTo::Identity, ..FdbOptions::default() };
    let r = find_fdb_with(&f, &query, opts, &mut |s| {
        println!("iteration {}: {} related, {} refuted", s.iteration, s.related.len(), s.refuted.len());
    })
    .unwrap();
    println!("{} pairs: {}", r.related.len(), r.related.display(f.universe()));
    let vars: Vec<_> = f.vars().collect();
    println!("closure is an FDE: {}", check_fde(&f, &r.related.equivalence_closure(&vars)).unwrap());
}
