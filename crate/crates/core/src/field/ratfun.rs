//! Exact rational functions: quotients of multivariate polynomials in
//! canonical form.
//!
//! Canonical form: numerator and denominator coprime, denominator with
//! coprime integer coefficients and positive leading coefficient. Two values
//! are equal iff their canonical fields are identical, so `PartialEq` is
//! structural.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::field::gcd::poly_gcd;
use crate::field::poly::Polynomial;
use crate::field::registry::{assert_same_registry, Registry, VarKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    // ---- Constructors ----

    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: Polynomial, den: Polynomial) -> Self {
        assert_same_registry(num.registry(), den.registry());
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RationalFunction {
                den: Polynomial::one(num.registry()),
                num,
            };
        }
        let (mut num, mut den) = (num, den);
        if !den.is_one() {
            let g = poly_gcd(&num, &den);
            if !g.is_one() {
                num = num.exact_div(&g).expect("gcd divides numerator");
                den = den.exact_div(&g).expect("gcd divides denominator");
            }
        }
        let (c, den_prim) = den.primitive_int();
        let num = num.scale(&c.recip());
        RationalFunction { num, den: den_prim }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction {
            den: Polynomial::one(p.registry()),
            num: p,
        }
    }

    pub fn zero(registry: &Registry) -> Self {
        Self::from_poly(Polynomial::zero(registry))
    }

    pub fn one(registry: &Registry) -> Self {
        Self::from_poly(Polynomial::one(registry))
    }

    pub fn constant(registry: &Registry, c: BigRational) -> Self {
        Self::from_poly(Polynomial::constant(registry, c))
    }

    pub fn from_int(registry: &Registry, n: i64) -> Self {
        Self::from_poly(Polynomial::from_int(registry, n))
    }

    pub fn var(registry: &Registry, idx: usize) -> Self {
        Self::from_poly(Polynomial::var(registry, idx))
    }

    // ---- Queries ----

    pub fn registry(&self) -> &Registry {
        self.num.registry()
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if !self.den.is_constant() {
            return None;
        }
        let d = self.den.as_constant()?;
        let n = self.num.as_constant()?;
        Some(n / d)
    }

    pub fn support_vars(&self) -> std::collections::BTreeSet<usize> {
        let mut s = self.num.support_vars();
        s.extend(self.den.support_vars());
        s
    }

    /// True when every occurring variable satisfies the predicate.
    pub fn depends_only_on(&self, mut pred: impl FnMut(usize) -> bool) -> bool {
        self.support_vars().into_iter().all(|v| pred(v))
    }

    // ---- Field arithmetic ----

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        assert_same_registry(self.registry(), other.registry());
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // Reduce through the denominator gcd to keep intermediates small.
        let g = poly_gcd(&self.den, &other.den);
        let (da, db) = if g.is_one() {
            (self.den.clone(), other.den.clone())
        } else {
            (
                self.den.exact_div(&g).unwrap(),
                other.den.exact_div(&g).unwrap(),
            )
        };
        let num = self.num.mul(&db).add(&other.num.mul(&da));
        let den = self.den.mul(&db);
        Self::canonical(num, den)
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        assert_same_registry(self.registry(), other.registry());
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.registry());
        }
        // Cross-reduce before multiplying.
        let g1 = poly_gcd(&self.num, &other.den);
        let g2 = poly_gcd(&other.num, &self.den);
        let n1 = if g1.is_one() { self.num.clone() } else { self.num.exact_div(&g1).unwrap() };
        let d2 = if g1.is_one() { other.den.clone() } else { other.den.exact_div(&g1).unwrap() };
        let n2 = if g2.is_one() { other.num.clone() } else { other.num.exact_div(&g2).unwrap() };
        let d1 = if g2.is_one() { self.den.clone() } else { self.den.exact_div(&g2).unwrap() };
        Self::canonical(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn div(&self, other: &RationalFunction) -> Result<RationalFunction> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn inv(&self) -> Result<RationalFunction> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: &BigRational) -> RationalFunction {
        if c.is_zero() {
            return Self::zero(self.registry());
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: i64) -> Result<RationalFunction> {
        if e < 0 {
            return Ok(Self::canonical(
                self.den.pow((-e) as u32),
                {
                    if self.is_zero() {
                        return Err(Error::DivisionByZero);
                    }
                    self.num.pow((-e) as u32)
                },
            ));
        }
        Ok(Self::canonical(self.num.pow(e as u32), self.den.pow(e as u32)))
    }

    // ---- Calculus ----

    /// Exact partial derivative; differentiating by a parameter is an error.
    pub fn derive(&self, var: usize) -> Result<RationalFunction> {
        let reg = self.registry();
        if let VarKind::Param(_) = reg.kind(var) {
            return Err(Error::ParameterDerivative {
                name: reg.name(var).to_string(),
            });
        }
        Ok(self.derive_unchecked(var))
    }

    /// Quotient rule without the parameter guard (internal Leibniz steps only
    /// ever touch block variables).
    pub(crate) fn derive_unchecked(&self, var: usize) -> RationalFunction {
        let dn = self.num.derive(var);
        if self.den.is_one() {
            return Self::from_poly(dn);
        }
        let dd = self.den.derive(var);
        if dd.is_zero() {
            return Self::canonical(dn, self.den.clone());
        }
        // f' = (n'·(d/e) − n·(d'/e)) / (d·(d/e)) with e = gcd(d, d'); this
        // keeps the final reduction near-trivial for repeated-factor
        // denominators.
        let e = poly_gcd(&self.den, &dd);
        if e.is_constant() {
            let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
            let den = self.den.mul(&self.den);
            return Self::canonical(num, den);
        }
        let d_red = self.den.exact_div(&e).expect("gcd divides");
        let dd_red = dd.exact_div(&e).expect("gcd divides");
        let num = dn.mul(&d_red).sub(&self.num.mul(&dd_red));
        let den = self.den.mul(&d_red);
        Self::canonical(num, den)
    }

    // ---- Substitution ----

    /// Substitute rational functions (or points) for variables; errors when a
    /// denominator vanishes under the assignment.
    pub fn substitute(&self, assignment: &BTreeMap<usize, RationalFunction>) -> Result<RationalFunction> {
        let num = self.num.substitute(assignment)?;
        let den = self.den.substitute(assignment)?;
        if den.is_zero() {
            return Err(Error::DenominatorVanishes {
                denominator: self.den.to_string(),
            });
        }
        num.div(&den)
    }

    /// Rename variables (used for the x↔z exchange); must be a bijection on
    /// the occurring variables.
    pub fn rename_vars(&self, map: &BTreeMap<usize, usize>) -> RationalFunction {
        Self::canonical(self.num.rename_vars(map), self.den.rename_vars(map))
    }

    /// Evaluate at a full rational point.
    pub fn eval(&self, point: &BTreeMap<usize, BigRational>) -> Result<BigRational> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(Error::DenominatorVanishes {
                denominator: self.den.to_string(),
            });
        }
        Ok(self.num.eval(point)? / d)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        // The expression grammar has no `/`: denominators print as `^-1`.
        let den_str = if self.den.n_terms() == 1 && self.den.leading().unwrap().1.is_one() {
            let m = format!("{}", self.den);
            if m.contains('*') || m.contains('^') {
                format!("({})", m)
            } else {
                m
            }
        } else {
            format!("({})", self.den)
        };
        if self.num.is_one() {
            return write!(f, "{}^-1", den_str);
        }
        if self.num.n_terms() == 1 {
            let c = self.num.leading().unwrap().1;
            if c.is_one() || (-c).is_one() {
                return write!(f, "{}*{}^-1", self.num, den_str);
            }
        }
        write!(f, "({})*{}^-1", self.num, den_str)
    }
}
