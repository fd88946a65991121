//! Backward and forward differential bisimulations of polynomial ODE systems,
//! computed locally from a query via exact transportation problems.

pub mod bisim;
pub mod cli;
pub mod coupling;
pub mod modelio;
pub mod poly;
pub mod relation;
pub mod transport;

pub type Rational = num_rational::BigRational;
