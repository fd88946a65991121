//! Transport problems per technique on the multisite phosphorylation family.

use std::time::Instant;

use diffbisim::bisim::find_bdb;
use diffbisim::modelio::{multisite, multisite_query};
use diffbisim::relation::{Relation, UpTo};

fn main() {
    let max: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    println!("{:>2} {:>6} {:<11} {:>9} {:>6} {:>10}", "n", "|X|", "technique", "problems", "|R|", "time");
    for n in 1..=max {
        let crn = multisite(n);
        let f = crn.to_field();
        let query = multisite_query(&crn, n);
        for up_to in UpTo::ALL {
            let start = Instant::now();
            let r = find_bdb(&f, &query, &Relation::new(), up_to).unwrap();
            println!(
                "{n:>2} {:>6} {:<11} {:>9} {:>6} {:>10.2?}",
                f.dim(),
                up_to.name(),
                r.stats.transport_problems,
                r.related.len(),
                start.elapsed()
            );
        }
    }
}
