//! Parse a polynomial ODE system, inspect it and differentiate it.

use diffbisim::modelio::{parse_ode, write_ode};
use diffbisim::poly::Valuation;
use diffbisim::Rational;

fn main() {
    let f = parse_ode(
        "vars: x, y, z
         d(x) = -2*x*y + 3/2*z
         d(y) = -2*x*y + 3/2*z
         d(z) = 2*x*y - 3/2*z",
    )
    .expect("valid model");
    print!("{}", write_ode(&f));
    println!("degree {}, linear {}", f.max_degree(), f.is_linear());
    println!("{} distinct monomials", f.monomials().len());

    let x = f.var("x").unwrap();
    let y = f.var("y").unwrap();
    let dxdy = f.rhs(x).partial_derivative(y);
    println!("d f_x / d y = {}", dxdy.display(f.universe()));

    let at = Valuation::constant(f.universe(), Rational::from_integer(2.into()));
    let values: Vec<String> = f.evaluate(&at).unwrap().iter().map(|v| v.to_string()).collect();
    println!("f(2, 2, 2) = ({})", values.join(", "));
}
