//! The coefficient field: exact multivariate rational functions over the
//! rationals extended by named transcendental parameters.

pub mod gcd;
pub mod poly;
pub mod ratfun;
pub mod registry;

pub use gcd::{content_wrt_vars, poly_gcd, poly_gcd_many};
pub use poly::{Monomial, Polynomial};
pub use ratfun::RationalFunction;
pub use registry::{assert_same_registry, Block, Registry, VariableRegistry, VarKind};
