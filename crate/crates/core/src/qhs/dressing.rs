//! The factorization machinery: dressing operators K, R, Q from the binomial
//! ad-expansions, each verified against its defining identity.
//!
//! The two composite elements L_f and π'(g) form a two-letter alphabet with
//! its own correspondence table, so the anti-isomorphism applies to the
//! dressing words verbatim: b(L_f) = π(f) and b(π'(g)) = L'_g.

use num::One;

use crate::error::{Error, Result};
use crate::field::registry::Block;
use crate::field::{Polynomial, RationalFunction};
use crate::ore::{binomial, DiffOperator, OpOrder};
use crate::qhs::pair::{ad_vanishing_order, AdVanishing, BispectralPair};
use crate::wavefunction::check_eigen;
use crate::words::{ad_word, GenEntry, GeneratorTable, GenPoly, Side, WordPoly};

/// Letter names of the dressing alphabet.
pub const LETTER_LF: &str = "Lf";
pub const LETTER_G: &str = "g";
pub const LETTER_F_DUAL: &str = "f'";
pub const LETTER_LG_DUAL: &str = "Lg'";

/// Everything the transform needs about one choice of (f, g).
#[derive(Debug, Clone)]
pub struct DressingData {
    pub f: GenPoly,
    pub g: GenPoly,
    /// ord L_f.
    pub m: u32,
    /// ord L'_g.
    pub n: u32,
    /// Exact vanishing order of ad_{L_f} on g (≤ n).
    pub ad_order: u32,
    pub lf: DiffOperator,
    pub lg_dual: DiffOperator,
    /// π'(g) as a polynomial in x-variables.
    pub g_poly: Polynomial,
    /// π(f) as a polynomial in z-variables.
    pub f_poly: Polynomial,
    /// Two-letter alphabet realizing {L_f, g} and their duals.
    pub alphabet: GeneratorTable,
    pub k_word: WordPoly,
    pub r_word: WordPoly,
    pub q_word: WordPoly,
    pub k: DiffOperator,
    pub r: DiffOperator,
    pub q: DiffOperator,
    /// b(K), evaluated on the z side.
    pub bk: DiffOperator,
}

/// Build K, R, Q for the choice (f, g) over a validated pair, verifying the
/// defining identities g^{m+1}∘L_f = K∘g, L_f∘g^{m+1} = g∘R and
/// L_f^{n+1}∘g = Q∘L_f before returning.
pub fn build_dressing(pair: &BispectralPair, f: &GenPoly, g: &GenPoly) -> Result<DressingData> {
    let reg = pair.registry().clone();
    f.validate_scalar_coefficients()?;
    g.validate_scalar_coefficients()?;

    let lf = pair.primal.image_of(f)?;
    let m = match lf.order() {
        OpOrder::Order(m) if m >= 1 => m,
        _ => {
            return Err(Error::validation(
                "L_f must have positive order (constant f is a degenerate dressing input)",
            ))
        }
    };
    let g_poly = pair.dual.spectral_poly_of(g)?;
    if g_poly.is_zero() {
        return Err(Error::validation("g must be nonzero"));
    }
    let lg_dual = pair.dual.image_of(g)?;
    let n = match lg_dual.order() {
        OpOrder::Order(n) => n,
        OpOrder::MinusInfinity => {
            return Err(Error::validation("the dual realization of g is zero"));
        }
    };
    let f_poly = pair.primal.spectral_poly_of(f)?;

    let g_mult = RationalFunction::from_poly(g_poly.clone());
    let f_mult = RationalFunction::from_poly(f_poly.clone());
    let g_op = DiffOperator::from_coeff(g_mult.clone(), Block::X);

    // The alphabet realizes the two composite letters on both sides; validate
    // each against the shared wavefunction before using it.
    let alphabet = GeneratorTable::new(vec![
        GenEntry {
            name: LETTER_LF.to_string(),
            x_realization: lf.clone(),
            dual_name: LETTER_F_DUAL.to_string(),
            z_realization: DiffOperator::from_coeff(f_mult.clone(), Block::Z),
        },
        GenEntry {
            name: LETTER_G.to_string(),
            x_realization: g_op.clone(),
            dual_name: LETTER_LG_DUAL.to_string(),
            z_realization: lg_dual.clone(),
        },
    ])?;
    if !check_eigen(&lf, &pair.wavefunction, &f_mult)? {
        return Err(Error::validation(format!(
            "L_f does not have eigenvalue π(f) = {} on the pair's wavefunction",
            f_mult
        )));
    }
    if !check_eigen(&lg_dual, &pair.wavefunction, &g_mult)? {
        return Err(Error::validation(format!(
            "L'_g does not have eigenvalue π'(g) = {} on the pair's wavefunction",
            g_mult
        )));
    }

    // Bispectral vanishing certificate: ad_{L_f}^{n+1}(g) = 0 with
    // n = ord L'_g, cross-checked against the probe.
    let probe = ad_vanishing_order(&lf, &g_op, n + 1);
    let ad_order = match probe {
        AdVanishing::Vanishes(k) if k <= n => k,
        AdVanishing::Vanishes(k) => {
            return Err(Error::OrderMismatch {
                dual_order: n.to_string(),
                ad_order: k,
            })
        }
        AdVanishing::NonTerminating { last_order, .. } => {
            return Err(Error::AdPowersDiverge {
                max_iter: n + 1,
                last_order: last_order.to_string(),
            })
        }
    };

    // K = Σ_{j=0}^{m} C(m+1, j) · ad_g^j(L_f) ∘ g^{m−j}
    let mut k_word = WordPoly::zero();
    for j in 0..=m {
        let term = ad_word(LETTER_G, LETTER_LF, j)
            .mul(&WordPoly::letter(LETTER_G).pow(m - j))
            .scale(&binomial(m + 1, j));
        k_word = k_word.add(&term);
    }
    let k = alphabet.word_eval(&k_word, Side::X)?;
    let lhs = g_op.op_pow(m + 1).op_mul(&lf);
    let rhs = k.op_mul(&g_op);
    if lhs != rhs {
        return Err(Error::IdentityFailure {
            identity: "g^(m+1)∘L_f = K∘g".to_string(),
            defect: lhs.sub(&rhs).to_string(),
        });
    }

    // R = Σ_{j=0}^{m} C(m+1, j) · (−1)^j · g^{m−j} ∘ ad_g^j(L_f)
    let mut r_word = WordPoly::zero();
    for j in 0..=m {
        let sign = if j % 2 == 0 {
            num::BigRational::one()
        } else {
            -num::BigRational::one()
        };
        let term = WordPoly::letter(LETTER_G)
            .pow(m - j)
            .mul(&ad_word(LETTER_G, LETTER_LF, j))
            .scale(&(binomial(m + 1, j) * sign));
        r_word = r_word.add(&term);
    }
    let r = alphabet.word_eval(&r_word, Side::X)?;
    let lhs = lf.op_mul(&g_op.op_pow(m + 1));
    let rhs = g_op.op_mul(&r);
    if lhs != rhs {
        return Err(Error::IdentityFailure {
            identity: "L_f∘g^(m+1) = g∘R".to_string(),
            defect: lhs.sub(&rhs).to_string(),
        });
    }

    // Q = Σ_{j=0}^{n} C(n+1, j) · ad_{L_f}^j(g) ∘ L_f^{n−j}
    let mut q_word = WordPoly::zero();
    for j in 0..=n {
        let term = ad_word(LETTER_LF, LETTER_G, j)
            .mul(&WordPoly::letter(LETTER_LF).pow(n - j))
            .scale(&binomial(n + 1, j));
        q_word = q_word.add(&term);
    }
    let q = alphabet.word_eval(&q_word, Side::X)?;
    let lhs = lf.op_pow(n + 1).op_mul(&g_op);
    let rhs = q.op_mul(&lf);
    if lhs != rhs {
        return Err(Error::IdentityFailure {
            identity: "L_f^(n+1)∘g = Q∘L_f".to_string(),
            defect: lhs.sub(&rhs).to_string(),
        });
    }

    let bk = alphabet.word_eval(&alphabet.anti_map(&k_word)?, Side::Z)?;

    let _ = reg;
    Ok(DressingData {
        f: f.clone(),
        g: g.clone(),
        m,
        n,
        ad_order,
        lf,
        lg_dual,
        g_poly,
        f_poly,
        alphabet,
        k_word,
        r_word,
        q_word,
        k,
        r,
        q,
        bk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::registry::{Registry, VariableRegistry};
    use crate::qhs::system::{weyl_system, QuantumSystem, SpectralGenerator};
    use crate::wavefunction::exponential_kernel;
    use crate::wavefunction::WaveFunction;

    fn weyl1_pair() -> (Registry, BispectralPair) {
        let reg = VariableRegistry::new(&["x"], &["z"], &[]).unwrap();
        let primal = weyl_system(&reg, Block::X, "e").unwrap();
        let dual = QuantumSystem::new(
            reg.clone(),
            Block::Z,
            vec![SpectralGenerator {
                name: "m1".into(),
                spectral_poly: Polynomial::var(&reg, 0),
                image: DiffOperator::partial(&reg, Block::Z, 0),
            }],
            Vec::new(),
        )
        .unwrap();
        let kernel = exponential_kernel(&reg).unwrap();
        let pair =
            BispectralPair::assemble(primal, dual, WaveFunction::seed(&kernel)).unwrap();
        (reg, pair)
    }

    #[test]
    fn weyl1_dressing_golden_values() {
        let (reg, pair) = weyl1_pair();
        let f = GenPoly::generator(&reg, "e1");
        let g = GenPoly::generator(&reg, "m1");
        let d = build_dressing(&pair, &f, &g).unwrap();
        assert_eq!((d.m, d.n), (1, 1));

        let dop = DiffOperator::partial(&reg, Block::X, 0);
        let x = DiffOperator::from_coeff(RationalFunction::var(&reg, 0), Block::X);
        let one = DiffOperator::identity(&reg, Block::X);
        // K = x∂ − 1
        assert_eq!(d.k, x.op_mul(&dop).sub(&one));
        // R = x∂ + 2 (fixed point of the defining identity L_f∘g² = g∘R)
        assert_eq!(
            d.r,
            x.op_mul(&dop).add(&one.scale_rat(&num::BigRational::from_integer(2.into())))
        );
        // Q = x∂ + 2
        assert_eq!(d.q, d.r);
        // b(K) mirrors K on the z side
        let dz = DiffOperator::partial(&reg, Block::Z, 0);
        let z = DiffOperator::from_coeff(RationalFunction::var(&reg, 1), Block::Z);
        let onez = DiffOperator::identity(&reg, Block::Z);
        assert_eq!(d.bk, z.op_mul(&dz).sub(&onez));
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let (reg, pair) = weyl1_pair();
        let g = GenPoly::generator(&reg, "m1");
        // constant f: L_f has order 0
        let f_const = GenPoly::scalar(RationalFunction::from_int(&reg, 5));
        assert!(build_dressing(&pair, &f_const, &g).is_err());
        // zero g
        let f = GenPoly::generator(&reg, "e1");
        let g_zero = GenPoly::zero(&reg);
        assert!(build_dressing(&pair, &f, &g_zero).is_err());
    }

    #[test]
    fn unit_g_gives_r_equal_lf() {
        let (reg, pair) = weyl1_pair();
        let f = GenPoly::generator(&reg, "e1");
        let g_one = GenPoly::one(&reg);
        let d = build_dressing(&pair, &f, &g_one).unwrap();
        assert_eq!(d.r, d.lf);
    }

    #[test]
    fn commuting_case_q() {
        // S_W², f = x1, g = x2: Q = x2·∂1 with n = 1.
        let reg = VariableRegistry::new(&["x1", "x2"], &["z1", "z2"], &[]).unwrap();
        let primal = weyl_system(&reg, Block::X, "e").unwrap();
        let mut gens = Vec::new();
        for i in 0..2 {
            gens.push(SpectralGenerator {
                name: format!("m{}", i + 1),
                spectral_poly: Polynomial::var(&reg, i),
                image: DiffOperator::partial(&reg, Block::Z, i),
            });
        }
        let dual = QuantumSystem::new(reg.clone(), Block::Z, gens, Vec::new()).unwrap();
        let kernel = exponential_kernel(&reg).unwrap();
        let pair = BispectralPair::assemble(primal, dual, WaveFunction::seed(&kernel)).unwrap();
        let f = GenPoly::generator(&reg, "e1");
        let g = GenPoly::generator(&reg, "m2");
        let d = build_dressing(&pair, &f, &g).unwrap();
        assert_eq!(d.n, 1);
        assert_eq!(d.ad_order, 0);
        let expect = DiffOperator::partial(&reg, Block::X, 0)
            .scale(&RationalFunction::var(&reg, 1));
        assert_eq!(d.q, expect);
    }
}
