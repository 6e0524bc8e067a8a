//! Exact symbolic engine for bispectral Darboux transformations of quantum
//! integrable systems.
//!
//! The crate builds dressing operators from factorization identities in the
//! generator algebra, transforms quantum Hamiltonian systems, and certifies
//! intertwining, integrability and bispectral duality by exact
//! rational-function arithmetic. No floating point is used anywhere.

pub mod error;
pub mod field;
pub mod limits;
pub mod ore;
pub mod qhs;
pub mod session;
pub mod wavefunction;
pub mod words;

pub use error::{Error, Result};
pub use field::{Block, Monomial, Polynomial, RationalFunction, Registry, VariableRegistry};
pub use ore::{DiffOperator, OpOrder};
pub use wavefunction::{KernelBasis, WaveFunction};
pub use words::{GenPoly, GeneratorTable, Side, Word, WordPoly};
