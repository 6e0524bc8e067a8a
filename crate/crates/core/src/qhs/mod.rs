//! Quantum Hamiltonian systems, localization, dressing construction and the
//! Darboux-transform machinery with its certificate suite.

pub mod dressing;
pub mod pair;
pub mod system;
pub mod transform;

pub use dressing::{build_dressing, DressingData};
pub use pair::{ad_vanishing_order, AdVanishing, BispectralPair};
pub use system::{weyl_system, QuantumSystem, SpectralGenerator};
pub use transform::{
    darboux_transform, deduce_transformed, dual_darboux_transform, iterate, repair,
    verify_intertwining, Certificate, CertificateSet, Deduced, IterationStep, TransformResult,
};
