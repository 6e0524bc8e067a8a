//! Symbolic eigenfunction calculus over finite derivative-closed kernel
//! bases.
//!
//! A kernel basis is a set of formal function symbols together with rewrite
//! rules giving every partial derivative as a rational-function-linear
//! combination of symbols (exponential and Airy-type kernels are the built-in
//! instances). Wavefunctions are coefficient vectors over such a basis; no
//! analytic evaluation exists or is needed.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::registry::Block;
use crate::field::{RationalFunction, Registry};
use crate::ore::DiffOperator;
use crate::words::{GeneratorTable, Side, WordPoly};

/// Coefficient vector over kernel symbols, keyed by symbol index.
pub type LinComb = BTreeMap<usize, RationalFunction>;

fn lincomb_add(a: &mut LinComb, sym: usize, c: RationalFunction) {
    if c.is_zero() {
        return;
    }
    match a.entry(sym) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get().add(&c);
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

/// A derivative-closed set of formal function symbols.
#[derive(Debug)]
pub struct KernelBasis {
    registry: Registry,
    name: String,
    symbols: Vec<String>,
    /// (global variable index, symbol index) → derivative as a linear
    /// combination of symbols.
    rules: BTreeMap<(usize, usize), LinComb>,
    symmetric: bool,
}

pub type Kernel = Arc<KernelBasis>;

impl KernelBasis {
    /// Validate and build a kernel basis. `rules` maps (variable name, symbol
    /// name) to the rewrite of that partial derivative. Rules must be total
    /// over both blocks, closed over the declared symbols, and have
    /// commuting mixed partials.
    pub fn define(
        registry: &Registry,
        name: impl Into<String>,
        symbols: Vec<String>,
        rules: BTreeMap<(String, String), Vec<(RationalFunction, String)>>,
        symmetric: bool,
    ) -> Result<Kernel> {
        let name = name.into();
        let mut sym_index = BTreeMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if sym_index.insert(s.clone(), i).is_some() {
                return Err(Error::DuplicateName { name: s.clone() });
            }
        }
        let mut compiled: BTreeMap<(usize, usize), LinComb> = BTreeMap::new();
        for ((var_name, sym_name), combo) in &rules {
            let var = registry
                .index_of(var_name)
                .ok_or_else(|| Error::UnknownVariable {
                    name: var_name.clone(),
                })?;
            if registry.is_param(var) {
                return Err(Error::ParameterDerivative {
                    name: var_name.clone(),
                });
            }
            let sym = *sym_index
                .get(sym_name)
                .ok_or_else(|| Error::KernelNotClosed {
                    symbol: sym_name.clone(),
                    var: var_name.clone(),
                    unknown: sym_name.clone(),
                })?;
            let mut lin = LinComb::new();
            for (c, target) in combo {
                let t = *sym_index
                    .get(target)
                    .ok_or_else(|| Error::KernelNotClosed {
                        symbol: sym_name.clone(),
                        var: var_name.clone(),
                        unknown: target.clone(),
                    })?;
                lincomb_add(&mut lin, t, c.clone());
            }
            compiled.insert((var, sym), lin);
        }
        // Totality: every block variable needs a rule for every symbol.
        let mut block_vars = registry.block_vars(Block::X);
        block_vars.extend(registry.block_vars(Block::Z));
        for &v in &block_vars {
            for s in 0..symbols.len() {
                if !compiled.contains_key(&(v, s)) {
                    return Err(Error::validation(format!(
                        "kernel `{}`: missing derivative rule for symbol `{}` by `{}`",
                        name,
                        symbols[s],
                        registry.name(v)
                    )));
                }
            }
        }
        let basis = KernelBasis {
            registry: registry.clone(),
            name,
            symbols,
            rules: compiled,
            symmetric,
        };
        basis.check_mixed_partials(&block_vars)?;
        Ok(Arc::new(basis))
    }

    fn check_mixed_partials(&self, vars: &[usize]) -> Result<()> {
        for s in 0..self.symbols.len() {
            let mut seed = LinComb::new();
            seed.insert(s, RationalFunction::one(&self.registry));
            for (i, &u) in vars.iter().enumerate() {
                for &v in &vars[i + 1..] {
                    let uv = self.derive_lincomb(&self.derive_lincomb(&seed, u), v);
                    let vu = self.derive_lincomb(&self.derive_lincomb(&seed, v), u);
                    if uv != vu {
                        return Err(Error::MixedPartialMismatch {
                            symbol: self.symbols[s].clone(),
                            u: self.registry.name(u).to_string(),
                            v: self.registry.name(v).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Derivative of a coefficient vector by one variable: Leibniz on the
    /// coefficients plus the symbol rewrite rules.
    pub fn derive_lincomb(&self, coeffs: &LinComb, var: usize) -> LinComb {
        let mut out = LinComb::new();
        for (&sym, c) in coeffs {
            lincomb_add(&mut out, sym, c.derive_unchecked(var));
            let rule = self
                .rules
                .get(&(var, sym))
                .expect("kernel rules are total over block variables");
            for (&target, k) in rule {
                lincomb_add(&mut out, target, c.mul(k));
            }
        }
        out
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }
}

/// Symbolic wavefunction: a coefficient vector over a kernel basis.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    basis: Kernel,
    coeffs: LinComb,
}

impl WaveFunction {
    /// The seed wavefunction: coefficient 1 on the first basis symbol.
    pub fn seed(basis: &Kernel) -> Self {
        let mut coeffs = LinComb::new();
        coeffs.insert(0, RationalFunction::one(basis.registry()));
        WaveFunction {
            basis: basis.clone(),
            coeffs,
        }
    }

    pub fn from_coeffs(basis: &Kernel, coeffs: LinComb) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        WaveFunction {
            basis: basis.clone(),
            coeffs,
        }
    }

    pub fn basis(&self) -> &Kernel {
        &self.basis
    }

    pub fn coeffs(&self) -> &LinComb {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &WaveFunction) -> WaveFunction {
        assert!(
            Arc::ptr_eq(&self.basis, &other.basis),
            "wavefunctions over different kernel bases"
        );
        let mut coeffs = self.coeffs.clone();
        for (&s, c) in &other.coeffs {
            lincomb_add(&mut coeffs, s, c.clone());
        }
        WaveFunction {
            basis: self.basis.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &WaveFunction) -> WaveFunction {
        let mut coeffs = self.coeffs.clone();
        for (&s, c) in &other.coeffs {
            lincomb_add(&mut coeffs, s, c.neg());
        }
        WaveFunction {
            basis: self.basis.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, c: &RationalFunction) -> WaveFunction {
        if c.is_zero() {
            return WaveFunction {
                basis: self.basis.clone(),
                coeffs: LinComb::new(),
            };
        }
        WaveFunction {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|(&s, k)| (s, k.mul(c))).collect(),
        }
    }

    /// Swap x↔z in every coefficient. Requires the basis symmetry flag.
    pub fn exchange_xz(&self) -> Result<WaveFunction> {
        if !self.basis.is_symmetric() {
            return Err(Error::KernelNotSymmetric);
        }
        let reg = self.basis.registry();
        if reg.x_count() != reg.z_count() {
            return Err(Error::validation(
                "x↔z exchange requires equally long variable blocks",
            ));
        }
        let mut map = BTreeMap::new();
        for i in 0..reg.x_count() {
            let x = reg.block_var(Block::X, i);
            let z = reg.block_var(Block::Z, i);
            map.insert(x, z);
            map.insert(z, x);
        }
        Ok(WaveFunction {
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(&s, c)| (s, c.rename_vars(&map)))
                .collect(),
        })
    }
}

impl PartialEq for WaveFunction {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) && self.coeffs == other.coeffs
    }
}

impl Eq for WaveFunction {}

impl fmt::Display for WaveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&s, c)| {
                let sym = &self.basis.symbols()[s];
                if c.is_one() {
                    sym.clone()
                } else {
                    format!("({})*{}", c, sym)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Exact image of a wavefunction under a differential operator.
pub fn apply_operator(op: &DiffOperator, psi: &WaveFunction) -> WaveFunction {
    let basis = psi.basis();
    let reg = basis.registry();
    let mut total = LinComb::new();
    for (alpha, c) in op.terms() {
        let mut v = psi.coeffs().clone();
        for (pos, &e) in alpha.exponents().iter().enumerate() {
            let var = reg.block_var(op.block(), pos);
            for _ in 0..e {
                v = basis.derive_lincomb(&v, var);
            }
        }
        for (sym, k) in v {
            lincomb_add(&mut total, sym, c.mul(&k));
        }
    }
    WaveFunction::from_coeffs(basis, total)
}

/// True iff `op ψ = eigenvalue ψ` exactly. The eigenvalue must depend only on
/// the opposite block's variables (parameters allowed).
pub fn check_eigen(op: &DiffOperator, psi: &WaveFunction, eigenvalue: &RationalFunction) -> Result<bool> {
    let reg = psi.basis().registry();
    let opposite = op.block().opposite();
    let ok = eigenvalue.depends_only_on(|v| {
        reg.is_param(v) || reg.block_position(v).map(|(b, _)| b) == Some(opposite)
    });
    if !ok {
        return Err(Error::validation(format!(
            "eigenvalue `{}` involves variables of the operator's own block",
            eigenvalue
        )));
    }
    Ok(apply_operator(op, psi) == psi.scale(eigenvalue))
}

/// The wavefunction form of the anti-isomorphism identity: evaluating a word
/// on the x side and its anti-image on the z side agree on ψ.
pub fn check_duality(w: &WordPoly, table: &GeneratorTable, psi: &WaveFunction) -> Result<bool> {
    let x_op = table.word_eval(w, Side::X)?;
    let z_op = table.word_eval(&table.anti_map(w)?, Side::Z)?;
    Ok(apply_operator(&x_op, psi) == apply_operator(&z_op, psi))
}

// ---------------------------------------------------------------------------
// Built-in kernels
// ---------------------------------------------------------------------------

/// The exponential kernel e^(x,z): one symbol `E` with ∂_{x_i}E = z_i E and
/// ∂_{z_i}E = x_i E. Symmetric under x↔z.
pub fn exponential_kernel(registry: &Registry) -> Result<Kernel> {
    assert_eq!(
        registry.x_count(),
        registry.z_count(),
        "exponential kernel needs equally long blocks"
    );
    let mut rules = BTreeMap::new();
    for i in 0..registry.x_count() {
        let x = registry.block_var(Block::X, i);
        let z = registry.block_var(Block::Z, i);
        rules.insert(
            (registry.name(x).to_string(), "E".to_string()),
            vec![(RationalFunction::var(registry, z), "E".to_string())],
        );
        rules.insert(
            (registry.name(z).to_string(), "E".to_string()),
            vec![(RationalFunction::var(registry, x), "E".to_string())],
        );
    }
    KernelBasis::define(registry, "exp", vec!["E".to_string()], rules, true)
}

/// The Airy-product kernel e^{x1 z1} Ai(x2+z2) for a 2+2 registry: symbols
/// `A` and `A1` (the Ai′ companion) with Ai″(w) = w·Ai(w) encoded in the
/// rewrite rules. Symmetric under x↔z.
pub fn airy_product_kernel(registry: &Registry) -> Result<Kernel> {
    assert!(
        registry.x_count() == 2 && registry.z_count() == 2,
        "airy product kernel is defined for two variables per block"
    );
    let x1 = RationalFunction::var(registry, registry.block_var(Block::X, 0));
    let x2 = RationalFunction::var(registry, registry.block_var(Block::X, 1));
    let z1 = RationalFunction::var(registry, registry.block_var(Block::Z, 0));
    let z2 = RationalFunction::var(registry, registry.block_var(Block::Z, 1));
    let w = x2.add(&z2);
    let one = RationalFunction::one(registry);

    let n = |i: usize| registry.name(i).to_string();
    let xs = [registry.block_var(Block::X, 0), registry.block_var(Block::X, 1)];
    let zs = [registry.block_var(Block::Z, 0), registry.block_var(Block::Z, 1)];

    let mut rules = BTreeMap::new();
    for sym in ["A", "A1"] {
        rules.insert((n(xs[0]), sym.to_string()), vec![(z1.clone(), sym.to_string())]);
        rules.insert((n(zs[0]), sym.to_string()), vec![(x1.clone(), sym.to_string())]);
    }
    for var in [xs[1], zs[1]] {
        rules.insert((n(var), "A".to_string()), vec![(one.clone(), "A1".to_string())]);
        rules.insert((n(var), "A1".to_string()), vec![(w.clone(), "A".to_string())]);
    }
    KernelBasis::define(
        registry,
        "airy",
        vec!["A".to_string(), "A1".to_string()],
        rules,
        true,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::registry::VariableRegistry;
    use crate::words::GenEntry;

    fn reg22() -> Registry {
        VariableRegistry::new(&["x1", "x2"], &["z1", "z2"], &["s"]).unwrap()
    }

    #[test]
    fn exponential_kernel_is_valid() {
        let reg = reg22();
        let k = exponential_kernel(&reg).unwrap();
        assert_eq!(k.symbols(), &["E".to_string()]);
        assert!(k.is_symmetric());
    }

    #[test]
    fn unclosed_rules_are_rejected() {
        let reg = reg22();
        let mut rules = BTreeMap::new();
        for v in ["x1", "x2", "z1", "z2"] {
            rules.insert(
                (v.to_string(), "E".to_string()),
                vec![(RationalFunction::one(&reg), "F".to_string())],
            );
        }
        let err = KernelBasis::define(&reg, "bad", vec!["E".to_string()], rules, false);
        assert!(matches!(err, Err(Error::KernelNotClosed { .. })));
    }

    #[test]
    fn airy_eigen_relation() {
        let reg = reg22();
        let k = airy_product_kernel(&reg).unwrap();
        let psi = WaveFunction::seed(&k);
        // ∂_{x1} ψ = z1 ψ
        let d1 = DiffOperator::partial(&reg, Block::X, 0);
        let z1 = RationalFunction::var(&reg, 2);
        assert!(check_eigen(&d1, &psi, &z1).unwrap());
        // (∂_{x2}² − x2) ψ = z2 ψ
        let d2 = DiffOperator::partial(&reg, Block::X, 1);
        let x2 = RationalFunction::var(&reg, 1);
        let z2 = RationalFunction::var(&reg, 3);
        let op = d2.op_mul(&d2).sub(&DiffOperator::from_coeff(x2, Block::X));
        assert!(check_eigen(&op, &psi, &z2).unwrap());
        // wrong eigenvalue
        assert!(!check_eigen(&d1, &psi, &z2).unwrap());
        // eigenvalue in the wrong block errors
        let x1 = RationalFunction::var(&reg, 0);
        assert!(check_eigen(&d1, &psi, &x1).is_err());
    }

    #[test]
    fn operator_action_is_linear_and_compositional() {
        let reg = reg22();
        let k = exponential_kernel(&reg).unwrap();
        let psi = WaveFunction::seed(&k);
        let d1 = DiffOperator::partial(&reg, Block::X, 0);
        let x1 = DiffOperator::from_coeff(RationalFunction::var(&reg, 0), Block::X);
        let a = d1.op_mul(&x1);
        let b = x1.op_mul(&d1);
        // additivity
        let lhs = apply_operator(&a.add(&b), &psi);
        let rhs = apply_operator(&a, &psi).add(&apply_operator(&b, &psi));
        assert_eq!(lhs, rhs);
        // composition ties the operator product to the module action
        let lhs = apply_operator(&a.op_mul(&b), &psi);
        let rhs = apply_operator(&a, &apply_operator(&b, &psi));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn weyl_duality_on_words() {
        let reg = reg22();
        let k = exponential_kernel(&reg).unwrap();
        let psi = WaveFunction::seed(&k);
        let mut entries = Vec::new();
        for i in 0..2 {
            entries.push(GenEntry {
                name: format!("l{}", i + 1),
                x_realization: DiffOperator::partial(&reg, Block::X, i),
                dual_name: format!("l{}'", i + 1),
                z_realization: DiffOperator::from_coeff(
                    RationalFunction::var(&reg, reg.block_var(Block::Z, i)),
                    Block::Z,
                ),
            });
            entries.push(GenEntry {
                name: format!("m{}", i + 1),
                x_realization: DiffOperator::from_coeff(
                    RationalFunction::var(&reg, reg.block_var(Block::X, i)),
                    Block::X,
                ),
                dual_name: format!("m{}'", i + 1),
                z_realization: DiffOperator::partial(&reg, Block::Z, i),
            });
        }
        let table = GeneratorTable::new(entries).unwrap();
        // w = ∂1 ∘ x1: both sides give (1 + x1 z1)ψ
        let w = WordPoly::letter("l1").mul(&WordPoly::letter("m1"));
        assert!(check_duality(&w, &table, &psi).unwrap());
        // negative control: corrupt the table so b(x1) is ∂_{z2}
        let mut bad_entries = table.entries().to_vec();
        bad_entries[1].z_realization = DiffOperator::partial(&reg, Block::Z, 1);
        let bad = GeneratorTable::new(bad_entries).unwrap();
        assert!(!check_duality(&WordPoly::letter("m1"), &bad, &psi).unwrap());
    }

    #[test]
    fn exchange_involution() {
        let reg = reg22();
        let k = exponential_kernel(&reg).unwrap();
        let psi = WaveFunction::seed(&k);
        // (x1 z2) E exchanges to (z1 x2) E
        let x1 = RationalFunction::var(&reg, 0);
        let z2 = RationalFunction::var(&reg, 3);
        let f = psi.scale(&x1.mul(&z2));
        let g = f.exchange_xz().unwrap();
        let z1 = RationalFunction::var(&reg, 2);
        let x2 = RationalFunction::var(&reg, 1);
        assert_eq!(g, psi.scale(&z1.mul(&x2)));
        assert_eq!(g.exchange_xz().unwrap(), f);
    }
}
