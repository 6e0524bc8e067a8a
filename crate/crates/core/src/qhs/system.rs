//! Quantum Hamiltonian systems: an embedding of a spectral coordinate ring
//! into differential operators, carried as a finite generator list.
//!
//! Spectral polynomials live in the opposite block's variables (the natural
//! covering coordinates); images act on the system's own block. Localizers
//! record which denominators the operator coefficients may acquire.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::gcd::{content_wrt_vars, poly_gcd};
use crate::field::registry::Block;
use crate::field::{Polynomial, Registry};
use crate::ore::DiffOperator;
use crate::words::GenPoly;

#[derive(Debug, Clone)]
pub struct SpectralGenerator {
    pub name: String,
    /// Polynomial in the opposite block's variables (parameters allowed).
    pub spectral_poly: Polynomial,
    /// Differential operator on the system's block.
    pub image: DiffOperator,
}

#[derive(Debug, Clone)]
pub struct QuantumSystem {
    registry: Registry,
    block: Block,
    generators: Vec<SpectralGenerator>,
    localizers: Vec<Polynomial>,
}

impl QuantumSystem {
    /// Build and validate: distinct names, matching blocks, commuting images
    /// and confined denominators.
    pub fn new(
        registry: Registry,
        block: Block,
        generators: Vec<SpectralGenerator>,
        localizers: Vec<Polynomial>,
    ) -> Result<Self> {
        let sys = Self::new_unchecked(registry, block, generators, localizers)?;
        if let Some((i, j, defect)) = sys.check_commutativity() {
            return Err(Error::validation(format!(
                "generator images `{}` and `{}` do not commute; defect: {}",
                sys.generators[i].name, sys.generators[j].name, defect
            )));
        }
        sys.check_denominators().map_err(Error::Validation)?;
        Ok(sys)
    }

    /// Structural checks only; commutativity and denominators are left to the
    /// certificate machinery.
    pub fn new_unchecked(
        registry: Registry,
        block: Block,
        generators: Vec<SpectralGenerator>,
        localizers: Vec<Polynomial>,
    ) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for g in &generators {
            if !seen.insert(g.name.clone()) {
                return Err(Error::DuplicateName {
                    name: g.name.clone(),
                });
            }
            if g.image.block() != block {
                return Err(Error::validation(format!(
                    "generator `{}`: image acts on the wrong block",
                    g.name
                )));
            }
            let opposite = block.opposite();
            let ok = g.spectral_poly.support_vars().into_iter().all(|v| {
                registry.is_param(v)
                    || registry.block_position(v).map(|(b, _)| b) == Some(opposite)
            });
            if !ok {
                return Err(Error::validation(format!(
                    "generator `{}`: spectral polynomial must use only {}-block variables",
                    g.name,
                    opposite
                )));
            }
        }
        for l in &localizers {
            if l.is_zero() {
                return Err(Error::validation("localizer polynomial is zero"));
            }
        }
        Ok(QuantumSystem {
            registry,
            block,
            generators,
            localizers: localizers.into_iter().filter(|l| !l.is_constant()).collect(),
        })
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn block(&self) -> Block {
        self.block
    }

    pub fn generators(&self) -> &[SpectralGenerator] {
        &self.generators
    }

    pub fn localizers(&self) -> &[Polynomial] {
        &self.localizers
    }

    pub fn generator(&self, name: &str) -> Option<&SpectralGenerator> {
        self.generators.iter().find(|g| g.name == name)
    }

    /// Adjoin 1/g: same generators, `g` appended to the localizers.
    pub fn localize(&self, g: &Polynomial) -> Result<QuantumSystem> {
        if g.is_zero() {
            return Err(Error::validation("cannot localize by zero"));
        }
        let mut out = self.clone();
        if !g.is_constant() {
            let (_, prim) = g.primitive_int();
            out.localizers.push(prim);
        }
        Ok(out)
    }

    /// Image of an element of the spectral coordinate ring given as a
    /// polynomial in the named generators.
    pub fn image_of(&self, f: &GenPoly) -> Result<DiffOperator> {
        f.validate_scalar_coefficients()?;
        f.eval_operators(self.block, &|name| {
            self.generator(name).map(|g| g.image.clone())
        })
    }

    /// Spectral polynomial (in the opposite block's coordinates) of an
    /// element given as a polynomial in the named generators.
    pub fn spectral_poly_of(&self, f: &GenPoly) -> Result<Polynomial> {
        f.validate_scalar_coefficients()?;
        f.eval_polynomials(&|name| self.generator(name).map(|g| g.spectral_poly.clone()))
    }

    /// First non-commuting pair of generator images, with the defect, or
    /// `None` when all pairs commute exactly.
    pub fn check_commutativity(&self) -> Option<(usize, usize, DiffOperator)> {
        for i in 0..self.generators.len() {
            for j in (i + 1)..self.generators.len() {
                let c = self.generators[i]
                    .image
                    .commutator(&self.generators[j].image);
                if !c.is_zero() {
                    return Some((i, j, c));
                }
            }
        }
        None
    }

    /// Every coefficient denominator must divide a product of powers of the
    /// localizers, up to parameter-only factors (units of the field).
    pub fn check_denominators(&self) -> std::result::Result<(), String> {
        for g in &self.generators {
            for (_, c) in g.image.terms() {
                let den = c.den();
                if den.is_constant() {
                    continue;
                }
                if !self.denominator_confined(den) {
                    return Err(format!(
                        "generator `{}`: denominator `{}` is not confined to the localizers",
                        g.name, den
                    ));
                }
            }
        }
        Ok(())
    }

    fn denominator_confined(&self, den: &Polynomial) -> bool {
        // Strip parameter-only content first.
        let non_params: Vec<usize> = (0..self.registry.n_vars())
            .filter(|&v| !self.registry.is_param(v))
            .collect();
        let content = content_wrt_vars(den, &non_params);
        let mut d = if content.is_constant() {
            den.clone()
        } else {
            den.exact_div(&content).expect("content divides")
        };
        loop {
            if d.is_constant() {
                return true;
            }
            let mut progress = false;
            for l in &self.localizers {
                loop {
                    let g = poly_gcd(&d, l);
                    if g.is_constant() {
                        break;
                    }
                    d = d.exact_div(&g).expect("gcd divides");
                    progress = true;
                    if d.is_constant() {
                        return true;
                    }
                }
            }
            if !progress {
                return false;
            }
        }
    }

    /// Generic rank of the Jacobian of the spectral polynomials with respect
    /// to the opposite block's coordinates, sampled at random integer points
    /// in [2, 97] with three attempts (maximum rank taken).
    pub fn spectral_dimension<R: Rng>(&self, rng: &mut R) -> usize {
        let coords = self.registry.block_vars(self.block.opposite());
        let jacobian: Vec<Vec<Polynomial>> = self
            .generators
            .iter()
            .map(|g| coords.iter().map(|&v| g.spectral_poly.derive(v)).collect())
            .collect();
        let mut best = 0usize;
        for _ in 0..3 {
            let mut point = BTreeMap::new();
            for v in 0..self.registry.n_vars() {
                point.insert(
                    v,
                    BigRational::from_integer(BigInt::from(rng.random_range(2..=97))),
                );
            }
            let mut matrix = Vec::new();
            let mut ok = true;
            for row in &jacobian {
                let mut r = Vec::new();
                for p in row {
                    match p.eval(&point) {
                        Ok(v) => r.push(v),
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    break;
                }
                matrix.push(r);
            }
            if ok {
                best = best.max(rational_rank(matrix));
            }
        }
        best
    }

    /// CIQS flag: spectral dimension equals the dimension of the base.
    pub fn is_completely_integrable<R: Rng>(&self, rng: &mut R) -> bool {
        self.spectral_dimension(rng) == self.registry.block_size(self.block)
    }
}

/// Rank of a rational matrix by exact Gaussian elimination.
pub fn rational_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let Some(pivot) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pivot);
        let inv = m[row][col].recip();
        for c in col..cols {
            let v = &m[row][c] * &inv;
            m[row][c] = v;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let v = &m[r][c] - &factor * &m[row][c];
                    m[r][c] = v;
                }
            }
        }
        row += 1;
        rank += 1;
    }
    rank
}

/// The n-variable Weyl system S_W^n on the given block: generator images are
/// the partials, spectral polynomials the opposite coordinates.
pub fn weyl_system(registry: &Registry, block: Block, name_prefix: &str) -> Result<QuantumSystem> {
    let n = registry.block_size(block);
    assert_eq!(
        n,
        registry.block_size(block.opposite()),
        "Weyl system needs equally long blocks"
    );
    let mut gens = Vec::new();
    for i in 0..n {
        let spectral = Polynomial::var(registry, registry.block_var(block.opposite(), i));
        gens.push(SpectralGenerator {
            name: format!("{}{}", name_prefix, i + 1),
            spectral_poly: spectral,
            image: DiffOperator::partial(registry, block, i),
        });
    }
    QuantumSystem::new(registry.clone(), block, gens, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::registry::VariableRegistry;
    use crate::field::RationalFunction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reg3() -> Registry {
        VariableRegistry::new(&["x1", "x2", "x3"], &["z1", "z2", "z3"], &[]).unwrap()
    }

    #[test]
    fn weyl_commutes_and_has_full_dimension() {
        let reg = reg3();
        let s = weyl_system(&reg, Block::X, "e").unwrap();
        assert!(s.check_commutativity().is_none());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(s.spectral_dimension(&mut rng), 3);
        assert!(s.is_completely_integrable(&mut rng));
    }

    #[test]
    fn power_sum_jacobian_has_full_rank() {
        // {h1, h2, h3} power sums in 3 variables: rank 3.
        let reg = reg3();
        let mut gens = Vec::new();
        for k in 1..=3u32 {
            let mut p = Polynomial::zero(&reg);
            for i in 0..3 {
                p = p.add(&Polynomial::var(&reg, reg.block_var(Block::Z, i)).pow(k));
            }
            gens.push(SpectralGenerator {
                name: format!("h{}", k),
                spectral_poly: p,
                image: DiffOperator::partial(&reg, Block::X, (k - 1) as usize),
            });
        }
        let s = QuantumSystem::new_unchecked(reg.clone(), Block::X, gens, Vec::new()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(s.spectral_dimension(&mut rng), 3);
    }

    #[test]
    fn singular_spectral_ring_drops_dimension() {
        // {f^3, f^3 z1, f^3 z2} with f = z1^2 + z2 has rank 2.
        let reg = VariableRegistry::new(&["x1", "x2"], &["z1", "z2"], &[]).unwrap();
        let z1 = Polynomial::var(&reg, 2);
        let z2 = Polynomial::var(&reg, 3);
        let f = z1.pow(2).add(&z2);
        let polys = [f.pow(3), f.pow(3).mul(&z1), f.pow(3).mul(&z2)];
        let gens = polys
            .into_iter()
            .enumerate()
            .map(|(i, p)| SpectralGenerator {
                name: format!("a{}", i),
                spectral_poly: p,
                image: DiffOperator::identity(&reg, Block::X),
            })
            .collect();
        let s = QuantumSystem::new_unchecked(reg.clone(), Block::X, gens, Vec::new()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(s.spectral_dimension(&mut rng), 2);
    }

    #[test]
    fn noncommuting_images_are_caught() {
        let reg = VariableRegistry::new(&["x1"], &["z1"], &[]).unwrap();
        let gens = vec![
            SpectralGenerator {
                name: "a".into(),
                spectral_poly: Polynomial::var(&reg, 1),
                image: DiffOperator::partial(&reg, Block::X, 0),
            },
            SpectralGenerator {
                name: "b".into(),
                spectral_poly: Polynomial::var(&reg, 1).pow(2),
                image: DiffOperator::from_coeff(RationalFunction::var(&reg, 0), Block::X),
            },
        ];
        let s = QuantumSystem::new_unchecked(reg.clone(), Block::X, gens.clone(), Vec::new()).unwrap();
        let (i, j, _) = s.check_commutativity().unwrap();
        assert_eq!((i, j), (0, 1));
        assert!(QuantumSystem::new(reg, Block::X, gens, Vec::new()).is_err());
    }

    #[test]
    fn localize_and_denominator_confinement() {
        let reg = VariableRegistry::new(&["x1", "x2"], &["z1", "z2"], &[]).unwrap();
        let x1 = Polynomial::var(&reg, 0);
        let x2 = Polynomial::var(&reg, 1);
        let p = x1.sub(&x2);
        let s = weyl_system(&reg, Block::X, "e").unwrap();
        // localize(s, 1) is unchanged
        assert_eq!(s.localize(&Polynomial::one(&reg)).unwrap().localizers().len(), 0);
        let sp = s.localize(&p).unwrap();
        assert_eq!(sp.localizers().len(), 1);

        // An image with denominator (x1-x2)^2 passes; x1 does not.
        let inv2 = RationalFunction::new(Polynomial::one(&reg), p.pow(2)).unwrap();
        let gens = vec![SpectralGenerator {
            name: "a".into(),
            spectral_poly: Polynomial::var(&reg, 2),
            image: DiffOperator::from_coeff(inv2, Block::X),
        }];
        let ok = QuantumSystem::new_unchecked(reg.clone(), Block::X, gens, vec![p.clone()]).unwrap();
        assert!(ok.check_denominators().is_ok());

        let bad_gens = vec![SpectralGenerator {
            name: "a".into(),
            spectral_poly: Polynomial::var(&reg, 2),
            image: DiffOperator::from_coeff(
                RationalFunction::new(Polynomial::one(&reg), x1.clone()).unwrap(),
                Block::X,
            ),
        }];
        let bad = QuantumSystem::new_unchecked(reg, Block::X, bad_gens, vec![p]).unwrap();
        assert!(bad.check_denominators().is_err());
    }

    #[test]
    fn iterated_localization_is_equivalent_to_product() {
        let reg = VariableRegistry::new(&["x1", "x2"], &["z1", "z2"], &[]).unwrap();
        let f = Polynomial::var(&reg, 0);
        let g = Polynomial::var(&reg, 1);
        let s = weyl_system(&reg, Block::X, "e").unwrap();
        let a = s.localize(&g).unwrap().localize(&f).unwrap();
        let b = s.localize(&f.mul(&g)).unwrap();
        // Equivalent: both confine exactly the denominators x1^i x2^j.
        let den = RationalFunction::new(Polynomial::one(&reg), f.mul(&g.pow(2))).unwrap();
        let gens = vec![SpectralGenerator {
            name: "a".into(),
            spectral_poly: Polynomial::var(&reg, 2),
            image: DiffOperator::from_coeff(den, Block::X),
        }];
        for sys in [&a, &b] {
            let t = QuantumSystem::new_unchecked(
                reg.clone(),
                Block::X,
                gens.clone(),
                sys.localizers().to_vec(),
            )
            .unwrap();
            assert!(t.check_denominators().is_ok());
        }
    }
}
