//! Bispectrally dual pairs of quantum Hamiltonian systems.
//!
//! The generator correspondence table is assembled from the two systems: a
//! primal generator pairs its operator image with multiplication by its
//! spectral polynomial on the dual side, and vice versa. Acceptance of the
//! table is the wavefunction consistency check: both realizations of every
//! generator must act identically on the shared eigenfunction.

use crate::error::{Error, Result};
use crate::field::registry::Block;
use crate::field::RationalFunction;
use crate::ore::{DiffOperator, OpOrder};
use crate::qhs::system::QuantumSystem;
use crate::wavefunction::{apply_operator, WaveFunction};
use crate::words::{GenEntry, GeneratorTable};

#[derive(Debug, Clone)]
pub struct BispectralPair {
    pub primal: QuantumSystem,
    pub dual: QuantumSystem,
    pub table: GeneratorTable,
    pub wavefunction: WaveFunction,
}

impl BispectralPair {
    /// Build the correspondence table from the two systems and validate it
    /// against the shared wavefunction.
    pub fn assemble(
        primal: QuantumSystem,
        dual: QuantumSystem,
        wavefunction: WaveFunction,
    ) -> Result<Self> {
        if primal.block() != Block::X || dual.block() != Block::Z {
            return Err(Error::validation(
                "a bispectral pair needs an x-block primal and a z-block dual system",
            ));
        }
        crate::field::assert_same_registry(primal.registry(), dual.registry());
        let mut entries = Vec::new();
        for g in primal.generators() {
            entries.push(GenEntry {
                name: g.name.clone(),
                x_realization: g.image.clone(),
                dual_name: format!("{}'", g.name),
                z_realization: DiffOperator::from_coeff(
                    RationalFunction::from_poly(g.spectral_poly.clone()),
                    Block::Z,
                ),
            });
        }
        for g in dual.generators() {
            entries.push(GenEntry {
                name: g.name.clone(),
                x_realization: DiffOperator::from_coeff(
                    RationalFunction::from_poly(g.spectral_poly.clone()),
                    Block::X,
                ),
                dual_name: format!("{}'", g.name),
                z_realization: g.image.clone(),
            });
        }
        let table = GeneratorTable::new(entries)?;
        let pair = BispectralPair {
            primal,
            dual,
            table,
            wavefunction,
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Wavefunction consistency: for every table entry, the x-side and z-side
    /// realizations agree on ψ.
    pub fn validate(&self) -> Result<()> {
        for e in self.table.entries() {
            let lhs = apply_operator(&e.x_realization, &self.wavefunction);
            let rhs = apply_operator(&e.z_realization, &self.wavefunction);
            if lhs != rhs {
                return Err(Error::validation(format!(
                    "generator `{}` fails the wavefunction consistency check: \
                     x-side gives {}, z-side gives {}",
                    e.name, lhs, rhs
                )));
            }
        }
        Ok(())
    }

    pub fn registry(&self) -> &crate::field::Registry {
        self.primal.registry()
    }
}

/// Outcome of the ad-power vanishing probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdVanishing {
    /// Smallest n with ad_{L}^{n+1}(g) = 0.
    Vanishes(u32),
    /// No vanishing within the iteration budget: evidence against
    /// bispectrality. Carries the order of the last computed ad-power.
    NonTerminating { max_iter: u32, last_order: OpOrder },
}

impl std::fmt::Display for AdVanishing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AdVanishing::Vanishes(n) => write!(f, "vanishes at n = {}", n),
            AdVanishing::NonTerminating {
                max_iter,
                last_order,
            } => write!(
                f,
                "no vanishing within {} iterations (last ad-power has order {})",
                max_iter, last_order
            ),
        }
    }
}

/// Probe the bispectral vanishing of iterated commutators: the smallest n
/// with ad_{lf}^{n+1}(g) = 0, or a non-termination report.
pub fn ad_vanishing_order(lf: &DiffOperator, g: &DiffOperator, max_iter: u32) -> AdVanishing {
    debug_assert!(g.order() <= OpOrder::Order(0), "g must have order 0");
    let mut current = g.clone();
    for n in 0..=max_iter {
        let next = lf.commutator(&current);
        if next.is_zero() {
            return AdVanishing::Vanishes(n);
        }
        current = next;
    }
    AdVanishing::NonTerminating {
        max_iter,
        last_order: current.order(),
    }
}
