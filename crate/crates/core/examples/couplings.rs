//! Linear and monomial couplings, and the polynomial lifting of a relation.

use std::collections::BTreeSet;

use diffbisim::coupling::{find_linear_coupling, find_monomial_coupling, in_poly_lifting};
use diffbisim::modelio::parse_ode;
use diffbisim::poly::{LinComb, Monomial, Universe};
use diffbisim::Rational;

fn main() {
    let u = Universe::from_names(["x", "y", "z", "w"]).unwrap();
    let v = |n: &str| u.get(n).unwrap();
    let q = |n: i64| Rational::from_integer(n.into());

    let g = LinComb::from_terms([(v("x"), q(2)), (v("y"), q(3)), (v("z"), q(-1))]);
    let h = LinComb::from_terms([(v("x"), q(2)), (v("y"), q(3)), (v("w"), q(-1))]);
    let preferred: BTreeSet<_> = [(v("x"), v("x")), (v("y"), v("y")), (v("w"), v("z"))].into();
    let c = find_linear_coupling(&g, &h, &BTreeSet::new(), &preferred).expect("balanced");
    println!("linear coupling:");
    for (a, b) in c.support() {
        println!("  {} -> {}: {}", u.name(*a), u.name(*b), c.plan.get(a, b));
    }

    let m = Monomial::from_powers([(v("x"), 2), (v("y"), 1)]);
    let n = Monomial::from_powers([(v("x"), 1), (v("z"), 2)]);
    let forbidden: BTreeSet<_> = [(v("y"), v("x"))].into();
    match find_monomial_coupling(&m, &n, &forbidden, &BTreeSet::new()) {
        Some(c) => {
            let arcs: Vec<String> = c.support().map(|(a, b)| format!("{}->{}", u.name(*a), u.name(*b))).collect();
            println!("monomial coupling: {}", arcs.join(" "));
        }
        None => println!("no monomial coupling avoids y->x"),
    }

    let f = parse_ode("vars: a, b, c\nd(a) = 2*a*b + c\nd(b) = 2*a*c + b\nd(c) = 0").unwrap();
    let (a, b, c) = (f.var("a").unwrap(), f.var("b").unwrap(), f.var("c").unwrap());
    let swap = |x, y| x == y || (x, y) == (b, c) || (x, y) == (c, b);
    println!("f_a related to f_b under b~c: {}", in_poly_lifting(f.rhs(a), f.rhs(b), swap));
}
