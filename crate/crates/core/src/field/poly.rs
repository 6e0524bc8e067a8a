//! Exact multivariate polynomials over the rationals.
//!
//! Terms are stored in a `BTreeMap` keyed by exponent vectors under
//! graded-lexicographic order, so the last entry is the leading term.
//! Invariant: no stored zero coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::registry::{assert_same_registry, Registry};
use crate::field::RationalFunction;

/// Exponent vector: one non-negative entry per registered variable/parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u16; 8]>);

impl Monomial {
    pub fn unit(n_vars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, n_vars))
    }

    pub fn var(n_vars: usize, idx: usize) -> Self {
        let mut m = Self::unit(n_vars);
        m.0[idx] = 1;
        m
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exponent(&self, idx: usize) -> u16 {
        self.0[idx]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(&a, &b)| a.checked_add(b).expect("exponent overflow"))
                .collect(),
        )
    }

    /// Componentwise quotient, `None` when `other` does not divide `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (&a, &b) in self.0.iter().zip(other.0.iter()) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn with_exponent(&self, idx: usize, e: u16) -> Monomial {
        let mut m = self.clone();
        m.0[idx] = e;
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Lexicographic tie-break: the earlier variable with the larger
        // exponent wins.
        for (&a, &b) in self.0.iter().zip(other.0.iter()) {
            match a.cmp(&b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
pub struct Polynomial {
    registry: Registry,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    // ---- Constructors ----

    pub fn zero(registry: &Registry) -> Self {
        Polynomial {
            registry: registry.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(registry: &Registry) -> Self {
        Self::constant(registry, BigRational::one())
    }

    pub fn constant(registry: &Registry, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(registry.n_vars()), c);
        }
        Polynomial {
            registry: registry.clone(),
            terms,
        }
    }

    pub fn from_int(registry: &Registry, n: i64) -> Self {
        Self::constant(registry, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(registry: &Registry, idx: usize) -> Self {
        assert!(idx < registry.n_vars(), "variable index out of range");
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(registry.n_vars(), idx), BigRational::one());
        Polynomial {
            registry: registry.clone(),
            terms,
        }
    }

    pub fn monomial(registry: &Registry, m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial {
            registry: registry.clone(),
            terms,
        }
    }

    // ---- Queries ----

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_unit())
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map_or(false, |c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_unit() {
                return Some(c.clone());
            }
        }
        None
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    /// Leading term under graded-lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Indices of variables that actually occur.
    pub fn support_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    out.insert(i);
                }
            }
        }
        out
    }

    pub fn deg_in(&self, var: usize) -> u16 {
        self.terms
            .keys()
            .map(|m| m.exponent(var))
            .max()
            .unwrap_or(0)
    }

    // ---- Arithmetic ----

    fn insert_term(terms: &mut BTreeMap<Monomial, BigRational>, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match terms.entry(m) {
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

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_same_registry(&self.registry, &other.registry);
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert_term(&mut terms, m.clone(), c.clone());
        }
        Polynomial {
            registry: self.registry.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        assert_same_registry(&self.registry, &other.registry);
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert_term(&mut terms, m.clone(), -c.clone());
        }
        Polynomial {
            registry: self.registry.clone(),
            terms,
        }
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            registry: self.registry.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_same_registry(&self.registry, &other.registry);
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                Self::insert_term(&mut terms, ma.mul(mb), ca * cb);
            }
        }
        Polynomial {
            registry: self.registry.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.registry);
        }
        Polynomial {
            registry: self.registry.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.registry);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact partial derivative by any registered variable (parameters are
    /// allowed here; the rational-function layer enforces the parameter ban).
    pub fn derive(&self, var: usize) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let dm = m.with_exponent(var, e - 1);
            Self::insert_term(
                &mut terms,
                dm,
                c * BigRational::from_integer(BigInt::from(e)),
            );
        }
        Polynomial {
            registry: self.registry.clone(),
            terms,
        }
    }

    // ---- Substitution / evaluation ----

    /// Substitute rational functions for variables. Unassigned variables stay
    /// themselves.
    pub fn substitute(&self, assignment: &BTreeMap<usize, RationalFunction>) -> Result<RationalFunction> {
        let reg = &self.registry;
        let mut result = RationalFunction::zero(reg);
        // Cache powers per assigned variable.
        let mut powers: BTreeMap<usize, Vec<RationalFunction>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut residual = Monomial::unit(reg.n_vars());
            let mut factor = RationalFunction::constant(reg, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if let Some(value) = assignment.get(&i) {
                    let cache = powers.entry(i).or_insert_with(|| vec![RationalFunction::one(reg)]);
                    while cache.len() <= e as usize {
                        let next = cache.last().unwrap().mul(value);
                        cache.push(next);
                    }
                    factor = factor.mul(&cache[e as usize]);
                } else {
                    residual = residual.with_exponent(i, e);
                }
            }
            if !residual.is_unit() {
                let residual_poly =
                    Polynomial::monomial(reg, residual, BigRational::one());
                factor = factor.mul(&RationalFunction::from_poly(residual_poly));
            }
            result = result.add(&factor);
        }
        Ok(result)
    }

    /// Full evaluation at a rational point. Every variable occurring in the
    /// polynomial must be assigned.
    pub fn eval(&self, point: &BTreeMap<usize, BigRational>) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = point.get(&i).ok_or_else(|| Error::UnknownVariable {
                    name: self.registry.name(i).to_string(),
                })?;
                let mut p = BigRational::one();
                for _ in 0..e {
                    p *= v;
                }
                term *= p;
            }
            total += term;
        }
        Ok(total)
    }

    /// Rename variables: each occurrence of variable `i` becomes `map[i]`
    /// (identity where missing). Used for the x↔z exchange.
    pub fn rename_vars(&self, map: &BTreeMap<usize, usize>) -> Polynomial {
        let n = self.registry.n_vars();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut exps = vec![0u16; n];
            for (i, &e) in m.exponents().iter().enumerate() {
                let j = map.get(&i).copied().unwrap_or(i);
                exps[j] = exps[j].checked_add(e).expect("exponent overflow");
            }
            Self::insert_term(&mut terms, Monomial::from_exponents(&exps), c.clone());
        }
        Polynomial {
            registry: self.registry.clone(),
            terms,
        }
    }

    // ---- Normalization helpers ----

    /// Rational content: `c` such that `self = c * primitive` where the
    /// primitive part has coprime integer coefficients and positive leading
    /// coefficient. Zero polynomial has content zero.
    pub fn rational_content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num::Integer::gcd(&num_gcd, &c.numer().abs());
            den_lcm = num::Integer::lcm(&den_lcm, c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self.leading().unwrap().1.is_negative() {
            content = -content;
        }
        content
    }

    /// `(content, primitive_part)`; the primitive part has coprime integer
    /// coefficients and positive leading coefficient.
    pub fn primitive_int(&self) -> (BigRational, Polynomial) {
        if self.is_zero() {
            return (BigRational::zero(), self.clone());
        }
        let content = self.rational_content();
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    /// Exact multivariate division: `Some(q)` iff `self = q * d`.
    pub fn exact_div(&self, d: &Polynomial) -> Option<Polynomial> {
        assert_same_registry(&self.registry, &d.registry);
        assert!(!d.is_zero(), "exact_div by zero polynomial");
        let mut rem = self.clone();
        let mut quo = BTreeMap::new();
        let (dm, dc) = {
            let (m, c) = d.leading().unwrap();
            (m.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            // rem -= (qc * qm) * d
            for (m, c) in &d.terms {
                Self::insert_term(&mut rem.terms, qm.mul(m), -(&qc * c));
            }
            Self::insert_term(&mut quo, qm, qc);
        }
        Some(Polynomial {
            registry: self.registry.clone(),
            terms: quo,
        })
    }

    // ---- Univariate views (for GCD) ----

    /// Coefficients of `self` seen as a univariate polynomial in `var`, keyed
    /// by the `var`-exponent. The coefficient polynomials do not involve `var`.
    pub fn univariate_in(&self, var: usize) -> BTreeMap<u16, Polynomial> {
        let mut out: BTreeMap<u16, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            let rest = m.with_exponent(var, 0);
            let entry = out
                .entry(e)
                .or_insert_with(|| Polynomial::zero(&self.registry));
            Self::insert_term(&mut entry.terms, rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    pub fn from_univariate(registry: &Registry, var: usize, coeffs: &BTreeMap<u16, Polynomial>) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (&e, p) in coeffs {
            for (m, c) in &p.terms {
                let mm = m.with_exponent(var, m.exponent(var) + e);
                Self::insert_term(&mut terms, mm, c.clone());
            }
        }
        Polynomial {
            registry: registry.clone(),
            terms,
        }
    }

    /// Group terms by their exponents on the given variables: the keys are
    /// restricted exponent vectors, the values collect the rest.
    pub fn group_by_vars(&self, vars: &[usize]) -> BTreeMap<Vec<u16>, Polynomial> {
        let mut groups: BTreeMap<Vec<u16>, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u16> = vars.iter().map(|&v| m.exponent(v)).collect();
            let mut rest = m.clone();
            for &v in vars {
                rest = rest.with_exponent(v, 0);
            }
            let entry = groups
                .entry(key)
                .or_insert_with(|| Polynomial::zero(&self.registry));
            Self::insert_term(&mut entry.terms, rest, c.clone());
        }
        groups.retain(|_, p| !p.is_zero());
        groups
    }

    /// Leading coefficient in `var` (a polynomial in the other variables).
    pub fn leading_coeff_in(&self, var: usize) -> Polynomial {
        let d = self.deg_in(var);
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.exponent(var) == d {
                Self::insert_term(&mut terms, m.with_exponent(var, 0), c.clone());
            }
        }
        Polynomial {
            registry: self.registry.clone(),
            terms,
        }
    }

    /// Multiply by `var^e`.
    pub fn shift_var(&self, var: usize, e: u16) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.with_exponent(var, m.exponent(var) + e), c.clone());
        }
        Polynomial {
            registry: self.registry.clone(),
            terms,
        }
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.registry == other.registry && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

// ---- Printing ----

pub(crate) fn format_rational(c: &BigRational) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        // No `/` in the expression grammar; a denominator prints as `^-1`.
        format!("{}*{}^-1", c.numer(), c.denom())
    }
}

pub(crate) fn format_monomial(registry: &Registry, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if e == 1 {
            parts.push(registry.name(i).to_string());
        } else {
            parts.push(format!("{}^{}", registry.name(i), e));
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Leading term first: iterate descending.
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            let coeff_str = format_rational(&abs);
            let mono_str = format_monomial(&self.registry, m);
            let body = if mono_str.is_empty() {
                coeff_str
            } else if abs.is_one() {
                mono_str
            } else {
                format!("{}*{}", coeff_str, mono_str)
            };
            if first {
                if neg {
                    write!(f, "-{}", body)?;
                } else {
                    write!(f, "{}", body)?;
                }
                first = false;
            } else if neg {
                write!(f, " - {}", body)?;
            } else {
                write!(f, " + {}", body)?;
            }
        }
        Ok(())
    }
}
