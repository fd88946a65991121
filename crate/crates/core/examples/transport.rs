//! Solve an exact minimum-cost transportation problem.

use std::collections::BTreeMap;

use diffbisim::transport::{solve_min_cost, Solution, TransportInstance};
use diffbisim::Rational;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn main() {
    let supplies = BTreeMap::from([("mill", r(5, 2)), ("quarry", r(3, 2))]);
    let demands = BTreeMap::from([("north", r(1, 1)), ("south", r(2, 1)), ("east", r(1, 1))]);
    let costs = BTreeMap::from([
        (("mill", "north"), r(4, 1)),
        (("mill", "south"), r(1, 1)),
        (("mill", "east"), r(3, 1)),
        (("quarry", "north"), r(1, 1)),
        (("quarry", "south"), r(5, 1)),
        (("quarry", "east"), r(2, 1)),
    ]);
    let inst = TransportInstance::new(supplies, demands).with_costs(costs.clone());
    match solve_min_cost(&inst).expect("well-formed instance") {
        Solution::Plan(plan) => {
            let mut total = Rational::from_integer(0.into());
            for (a, b) in plan.support() {
                let mass = plan.get(a, b);
                println!("{a} -> {b}: {mass}");
                total += &mass * &costs[&(*a, *b)];
            }
            println!("total cost {total}");
        }
        other => println!("no plan: {other:?}"),
    }
}
