//! Tell two switches apart through the CTMCs of their reaction networks.

use diffbisim::bisim::find_bdb;
use diffbisim::modelio::{crn_to_ctmc, fixtures, parse_crn, parse_population, union_ctmcs};
use diffbisim::relation::{Relation, UpTo};

fn main() {
    let am = parse_crn(fixtures::AM_CRN).unwrap();
    let mi = parse_crn(fixtures::MI_CRN).unwrap();
    for (high, low) in [(2, 1), (4, 2), (6, 3)] {
        let pa = parse_population(&format!("x0 = {high}, x2 = {low}"), &am).unwrap();
        let pm = parse_population(&format!("y0 = {high}, z2 = {high}, y2 = {low}, z0 = {low}"), &mi).unwrap();
        let ca = crn_to_ctmc(&am, &pa, Some("initAM"), 1_000_000).unwrap();
        let cm = crn_to_ctmc(&mi, &pm, Some("initMI"), 1_000_000).unwrap();
        let u = union_ctmcs(&cm, &ca, ("", "")).unwrap();
        let f = u.to_field();
        let query: Relation = [(f.var("initMI").unwrap(), f.var("initAM").unwrap())].into_iter().collect();
        let r = find_bdb(&f, &query, &Relation::new(), UpTo::Identity).unwrap();
        println!(
            "({high},{low}): {} states, {} transitions, related {}, {} transport problems",
            u.num_states(),
            u.num_transitions(),
            !r.related.is_empty(),
            r.stats.transport_problems
        );
    }
}
