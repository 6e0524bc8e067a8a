//! The generator algebra B: formal noncommutative words in named generators
//! with two realizations, and the anti-isomorphism `b` acting by word
//! reversal plus generator swap.
//!
//! Word polynomials are representatives of elements of B; equality of
//! B-elements is decided through evaluation, never through word identity.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::field::registry::Block;
use crate::field::{Polynomial, RationalFunction, Registry};
use crate::ore::DiffOperator;

/// Which realization of a word to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    Z,
}

impl Side {
    pub fn block(self) -> Block {
        match self {
            Side::X => Block::X,
            Side::Z => Block::Z,
        }
    }
}

/// A finite sequence of generator names; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<String>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(name: impl Into<String>) -> Self {
        Word(vec![name.into()])
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().cloned().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", self.0.join("*"))
        }
    }
}

/// Rational-linear combination of words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WordPoly {
    terms: BTreeMap<Word, BigRational>,
}

impl WordPoly {
    pub fn zero() -> Self {
        WordPoly::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::empty())
    }

    pub fn from_word(w: Word) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, BigRational::one());
        WordPoly { terms }
    }

    pub fn letter(name: impl Into<String>) -> Self {
        Self::from_word(Word::letter(name))
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Word::empty(), c);
        }
        WordPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(terms: &mut BTreeMap<Word, BigRational>, w: Word, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &WordPoly) -> WordPoly {
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            Self::insert(&mut terms, w.clone(), c.clone());
        }
        WordPoly { terms }
    }

    pub fn sub(&self, other: &WordPoly) -> WordPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WordPoly {
        WordPoly {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> WordPoly {
        if c.is_zero() {
            return WordPoly::zero();
        }
        WordPoly {
            terms: self
                .terms
                .iter()
                .map(|(w, k)| (w.clone(), k * c))
                .collect(),
        }
    }

    /// Noncommutative product: concatenation, extended bilinearly.
    pub fn mul(&self, other: &WordPoly) -> WordPoly {
        let mut terms = BTreeMap::new();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                Self::insert(&mut terms, wa.concat(wb), ca * cb);
            }
        }
        WordPoly { terms }
    }

    pub fn pow(&self, e: u32) -> WordPoly {
        let mut out = WordPoly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }
}

impl fmt::Display for WordPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            let neg = c < &BigRational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            let body = if w.is_empty() {
                format!("{}", abs)
            } else if abs.is_one() {
                format!("{}", w)
            } else {
                format!("{}*{}", abs, w)
            };
            if first {
                write!(f, "{}{}", if neg { "-" } else { "" }, body)?;
                first = false;
            } else {
                write!(f, " {} {}", if neg { "-" } else { "+" }, body)?;
            }
        }
        Ok(())
    }
}

/// One generator: its name and x-realization, and the name and z-realization
/// of its image under the anti-isomorphism.
#[derive(Debug, Clone)]
pub struct GenEntry {
    pub name: String,
    pub x_realization: DiffOperator,
    pub dual_name: String,
    pub z_realization: DiffOperator,
}

/// Ordered correspondence table between the two realizations of B.
#[derive(Debug, Clone)]
pub struct GeneratorTable {
    entries: Vec<GenEntry>,
    by_name: BTreeMap<String, usize>,
    by_dual: BTreeMap<String, usize>,
}

impl GeneratorTable {
    pub fn new(entries: Vec<GenEntry>) -> Result<Self> {
        let mut by_name = BTreeMap::new();
        let mut by_dual = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            if e.x_realization.block() != Block::X {
                return Err(Error::validation(format!(
                    "generator `{}`: x-realization must act on the x-block",
                    e.name
                )));
            }
            if e.z_realization.block() != Block::Z {
                return Err(Error::validation(format!(
                    "generator `{}`: z-realization must act on the z-block",
                    e.name
                )));
            }
            if by_name.insert(e.name.clone(), i).is_some() {
                return Err(Error::DuplicateName {
                    name: e.name.clone(),
                });
            }
            if by_dual.insert(e.dual_name.clone(), i).is_some() {
                return Err(Error::DuplicateName {
                    name: e.dual_name.clone(),
                });
            }
        }
        // Names and dual names must not collide with each other either.
        for e in &entries {
            if by_name.contains_key(&e.dual_name) {
                return Err(Error::DuplicateName {
                    name: e.dual_name.clone(),
                });
            }
        }
        Ok(GeneratorTable {
            entries,
            by_name,
            by_dual,
        })
    }

    pub fn entries(&self) -> &[GenEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry_by_name(&self, name: &str) -> Option<&GenEntry> {
        self.by_name.get(name).map(|&i| &self.entries[i])
    }

    pub fn entry_by_dual(&self, name: &str) -> Option<&GenEntry> {
        self.by_dual.get(name).map(|&i| &self.entries[i])
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn registry(&self) -> Option<&Registry> {
        self.entries.first().map(|e| e.x_realization.registry())
    }

    /// Evaluate a word polynomial on one side: the product of realizations,
    /// left to right. On the x side letters are generator names; on the z
    /// side letters are dual names.
    pub fn word_eval(&self, w: &WordPoly, side: Side) -> Result<DiffOperator> {
        let reg = self
            .registry()
            .ok_or_else(|| Error::validation("cannot evaluate over an empty generator table"))?;
        let block = side.block();
        let mut total = DiffOperator::zero(reg, block);
        for (word, c) in w.terms() {
            let mut prod = DiffOperator::identity(reg, block);
            for letter in &word.0 {
                let op = match side {
                    Side::X => {
                        &self
                            .entry_by_name(letter)
                            .ok_or_else(|| Error::UnknownGenerator {
                                name: letter.clone(),
                            })?
                            .x_realization
                    }
                    Side::Z => {
                        &self
                            .entry_by_dual(letter)
                            .ok_or_else(|| Error::UnknownGenerator {
                                name: letter.clone(),
                            })?
                            .z_realization
                    }
                };
                prod = prod.op_mul(op);
            }
            total = total.add(&prod.scale_rat(c));
        }
        Ok(total)
    }

    /// The anti-isomorphism on representatives: reverse each word and swap
    /// every letter with its partner (primal name ↔ dual name).
    pub fn anti_map(&self, w: &WordPoly) -> Result<WordPoly> {
        let mut out = WordPoly::zero();
        for (word, c) in w.terms() {
            let mut letters = Vec::with_capacity(word.len());
            for letter in word.0.iter().rev() {
                let swapped = if let Some(e) = self.entry_by_name(letter) {
                    e.dual_name.clone()
                } else if let Some(e) = self.entry_by_dual(letter) {
                    e.name.clone()
                } else {
                    return Err(Error::UnknownGenerator {
                        name: letter.clone(),
                    });
                };
                letters.push(swapped);
            }
            out = out.add(&WordPoly::from_word(Word(letters)).scale(c));
        }
        Ok(out)
    }

    /// True iff the two representatives define the same element of B,
    /// decided through the x-side realization.
    pub fn word_equal_in_b(&self, w1: &WordPoly, w2: &WordPoly) -> Result<bool> {
        Ok(self.word_eval(w1, Side::X)? == self.word_eval(w2, Side::X)?)
    }

    /// Two-column rendering of the correspondence.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{} -> {}    [{} | {}]\n",
                e.name, e.dual_name, e.x_realization, e.z_realization
            ));
        }
        out
    }
}

/// Formal expansion of ad_g^j(f) as a signed sum of words in the two letters.
pub fn ad_word(g_name: &str, f_name: &str, j: u32) -> WordPoly {
    let g = WordPoly::letter(g_name);
    let mut out = WordPoly::letter(f_name);
    for _ in 0..j {
        out = g.mul(&out).sub(&out.mul(&g));
    }
    out
}

// ---------------------------------------------------------------------------
// Commutative polynomials in generator names
// ---------------------------------------------------------------------------

/// A commutative monomial in generator names.
pub type GenMonomial = BTreeMap<String, u16>;

/// Element of a coordinate ring O(Λ) presented as a polynomial in the named
/// spectral generators. Coefficients are scalars of the ground field: exact
/// rationals possibly involving the registered parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenPoly {
    registry: Registry,
    terms: BTreeMap<GenMonomial, RationalFunction>,
}

impl GenPoly {
    pub fn zero(registry: &Registry) -> Self {
        GenPoly {
            registry: registry.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(registry: &Registry) -> Self {
        Self::scalar(RationalFunction::one(registry))
    }

    pub fn scalar(c: RationalFunction) -> Self {
        let registry = c.registry().clone();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(GenMonomial::new(), c);
        }
        GenPoly { registry, terms }
    }

    pub fn generator(registry: &Registry, name: impl Into<String>) -> Self {
        let mut m = GenMonomial::new();
        m.insert(name.into(), 1);
        let mut terms = BTreeMap::new();
        terms.insert(m, RationalFunction::one(registry));
        GenPoly {
            registry: registry.clone(),
            terms,
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GenMonomial, &RationalFunction)> {
        self.terms.iter()
    }

    /// Names of the generators that actually occur.
    pub fn generator_names(&self) -> Vec<String> {
        let mut names = std::collections::BTreeSet::new();
        for m in self.terms.keys() {
            for (name, &e) in m {
                if e > 0 {
                    names.insert(name.clone());
                }
            }
        }
        names.into_iter().collect()
    }

    /// Every coefficient must be a scalar of the field: parameters only.
    pub fn validate_scalar_coefficients(&self) -> Result<()> {
        for c in self.terms.values() {
            if !c.depends_only_on(|v| self.registry.is_param(v)) {
                return Err(Error::validation(format!(
                    "coefficient `{}` of a generator polynomial involves non-parameter variables",
                    c
                )));
            }
        }
        Ok(())
    }

    fn insert(terms: &mut BTreeMap<GenMonomial, RationalFunction>, m: GenMonomial, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        match terms.entry(m) {
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

    pub fn add(&self, other: &GenPoly) -> GenPoly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert(&mut terms, m.clone(), c.clone());
        }
        GenPoly {
            registry: self.registry.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &GenPoly) -> GenPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GenPoly {
        GenPoly {
            registry: self.registry.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &GenPoly) -> GenPoly {
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                for (name, &e) in mb {
                    *m.entry(name.clone()).or_insert(0) += e;
                }
                m.retain(|_, &mut e| e > 0);
                Self::insert(&mut terms, m, ca.mul(cb));
            }
        }
        GenPoly {
            registry: self.registry.clone(),
            terms,
        }
    }

    pub fn pow(&self, e: u32) -> GenPoly {
        let mut out = GenPoly::one(&self.registry);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Substitute a differential operator for each generator name. The images
    /// of distinct generators are required to commute by the quantum-system
    /// invariants, so the ascending evaluation order is sound.
    pub fn eval_operators(
        &self,
        block: Block,
        lookup: &dyn Fn(&str) -> Option<DiffOperator>,
    ) -> Result<DiffOperator> {
        let mut total = DiffOperator::zero(&self.registry, block);
        for (m, c) in &self.terms {
            let mut prod = DiffOperator::from_coeff(c.clone(), block);
            for (name, &e) in m {
                let op = lookup(name).ok_or_else(|| Error::UnknownGenerator {
                    name: name.clone(),
                })?;
                for _ in 0..e {
                    prod = prod.op_mul(&op);
                }
            }
            total = total.add(&prod);
        }
        Ok(total)
    }

    /// Substitute a polynomial for each generator name.
    pub fn eval_polynomials(
        &self,
        lookup: &dyn Fn(&str) -> Option<Polynomial>,
    ) -> Result<Polynomial> {
        let mut total = Polynomial::zero(&self.registry);
        for (m, c) in &self.terms {
            if !c.is_polynomial() {
                return Err(Error::validation(format!(
                    "generator polynomial coefficient `{}` is not polynomial",
                    c
                )));
            }
            let mut prod = c.num().clone();
            for (name, &e) in m {
                let p = lookup(name).ok_or_else(|| Error::UnknownGenerator {
                    name: name.clone(),
                })?;
                prod = prod.mul(&p.pow(e as u32));
            }
            total = total.add(&prod);
        }
        Ok(total)
    }

    /// Commutative-to-word expansion: each monomial becomes the word with its
    /// letters sorted ascending by table index. Requires plain rational
    /// coefficients.
    pub fn to_word_poly(&self, table: &GeneratorTable) -> Result<WordPoly> {
        let mut out = WordPoly::zero();
        for (m, c) in &self.terms {
            let rat = c.as_constant().ok_or_else(|| {
                Error::validation(format!(
                    "coefficient `{}` is not a plain rational; cannot expand to words",
                    c
                ))
            })?;
            let mut letters: Vec<(usize, String, u16)> = Vec::new();
            for (name, &e) in m {
                let idx = table
                    .index_of(name)
                    .ok_or_else(|| Error::UnknownGenerator { name: name.clone() })?;
                letters.push((idx, name.clone(), e));
            }
            letters.sort();
            let mut word = Vec::new();
            for (_, name, e) in letters {
                for _ in 0..e {
                    word.push(name.clone());
                }
            }
            out = out.add(&WordPoly::from_word(Word(word)).scale(&rat));
        }
        Ok(out)
    }
}

impl fmt::Display for GenPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mono = m
                .iter()
                .map(|(name, &e)| {
                    if e == 1 {
                        name.clone()
                    } else {
                        format!("{}^{}", name, e)
                    }
                })
                .collect::<Vec<_>>()
                .join("*");
            if mono.is_empty() {
                parts.push(format!("{}", c));
            } else if c.is_one() {
                parts.push(mono);
            } else if c.is_constant() || (c.is_polynomial() && c.num().n_terms() == 1) {
                parts.push(format!("{}*{}", c, mono));
            } else {
                parts.push(format!("({})*{}", c, mono));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::registry::VariableRegistry;

    /// The one-variable Weyl self-dual table: ∂ ↔ z and x ↔ ∂_z.
    fn weyl1() -> (Registry, GeneratorTable) {
        let reg = VariableRegistry::new(&["x"], &["z"], &[]).unwrap();
        let table = GeneratorTable::new(vec![
            GenEntry {
                name: "l".into(),
                x_realization: DiffOperator::partial(&reg, Block::X, 0),
                dual_name: "l'".into(),
                z_realization: DiffOperator::from_coeff(
                    RationalFunction::var(&reg, 1),
                    Block::Z,
                ),
            },
            GenEntry {
                name: "m".into(),
                x_realization: DiffOperator::from_coeff(
                    RationalFunction::var(&reg, 0),
                    Block::X,
                ),
                dual_name: "m'".into(),
                z_realization: DiffOperator::partial(&reg, Block::Z, 0),
            },
        ])
        .unwrap();
        (reg, table)
    }

    #[test]
    fn word_eval_weyl_relation() {
        let (reg, table) = weyl1();
        // word [l, m] on the x side: ∂∘x = x∂ + 1
        let w = WordPoly::letter("l").mul(&WordPoly::letter("m"));
        let op = table.word_eval(&w, Side::X).unwrap();
        let expect = DiffOperator::partial(&reg, Block::X, 0)
            .scale(&RationalFunction::var(&reg, 0))
            .add(&DiffOperator::identity(&reg, Block::X));
        assert_eq!(op, expect);
        // empty word is the identity
        assert_eq!(
            table.word_eval(&WordPoly::one(), Side::X).unwrap(),
            DiffOperator::identity(&reg, Block::X)
        );
        // unknown generator errors
        assert!(table.word_eval(&WordPoly::letter("q"), Side::X).is_err());
    }

    #[test]
    fn anti_map_reverses_and_swaps() {
        let (_, table) = weyl1();
        let w = WordPoly::letter("l").mul(&WordPoly::letter("m"));
        let b = table.anti_map(&w).unwrap();
        let expect = WordPoly::letter("m'").mul(&WordPoly::letter("l'"));
        assert_eq!(b, expect);
        // involution
        assert_eq!(table.anti_map(&b).unwrap(), w);
    }

    #[test]
    fn anti_map_is_anti_multiplicative_and_linear() {
        let (_, table) = weyl1();
        let u = WordPoly::letter("l")
            .mul(&WordPoly::letter("m"))
            .add(&WordPoly::constant(BigRational::new(3.into(), 2.into())));
        let v = WordPoly::letter("m").mul(&WordPoly::letter("m"));
        let lhs = table.anti_map(&u.mul(&v)).unwrap();
        let rhs = table
            .anti_map(&v)
            .unwrap()
            .mul(&table.anti_map(&u).unwrap());
        assert_eq!(lhs, rhs);
        let lhs = table.anti_map(&u.add(&v)).unwrap();
        let rhs = table.anti_map(&u).unwrap().add(&table.anti_map(&v).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn equality_in_b() {
        let (_, table) = weyl1();
        // ∂x = x∂ + 1
        let lm = WordPoly::letter("l").mul(&WordPoly::letter("m"));
        let ml1 = WordPoly::letter("m")
            .mul(&WordPoly::letter("l"))
            .add(&WordPoly::one());
        assert!(table.word_equal_in_b(&lm, &ml1).unwrap());
        assert!(table.word_equal_in_b(&lm, &lm).unwrap());
        assert!(!table
            .word_equal_in_b(&WordPoly::letter("l"), &WordPoly::letter("m"))
            .unwrap());
    }

    #[test]
    fn ad_word_expansions() {
        let w = ad_word("g", "f", 1);
        let expect = WordPoly::letter("g")
            .mul(&WordPoly::letter("f"))
            .sub(&WordPoly::letter("f").mul(&WordPoly::letter("g")));
        assert_eq!(w, expect);
        assert_eq!(ad_word("g", "f", 0), WordPoly::letter("f"));
        // The 2^j signed terms collect into j+1 words g^i*f*g^(j-i) with
        // alternating binomial coefficients.
        let w3 = ad_word("g", "f", 3);
        assert_eq!(w3.n_terms(), 4);
        let gfgg = Word(vec!["g".into(), "f".into(), "g".into(), "g".into()]);
        let coeff = w3
            .terms()
            .find(|(w, _)| **w == gfgg)
            .map(|(_, c)| c.clone())
            .unwrap();
        assert_eq!(coeff, BigRational::from_integer(3.into()));
    }

    #[test]
    fn gen_poly_eval_matches_word_route() {
        let (reg, table) = weyl1();
        // f = l^2 + 3*m
        let f = GenPoly::generator(&reg, "l").pow(2).add(
            &GenPoly::generator(&reg, "m")
                .mul(&GenPoly::scalar(RationalFunction::from_int(&reg, 3))),
        );
        let direct = f
            .eval_operators(Block::X, &|name| {
                table.entry_by_name(name).map(|e| e.x_realization.clone())
            })
            .unwrap();
        let via_words = table
            .word_eval(&f.to_word_poly(&table).unwrap(), Side::X)
            .unwrap();
        assert_eq!(direct, via_words);
    }
}
