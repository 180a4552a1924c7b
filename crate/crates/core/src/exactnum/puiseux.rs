//! Sparse Puiseux series in a local coordinate zeta with exponents in
//! (1/L)Z and cyclotomic coefficients.
//!
//! A stored exponent `n` means zeta^(n/L). Truncation is explicit: with
//! `trunc = Some(t)` every coefficient of exponent >= t is unknown, while
//! `trunc = None` marks an exact finite sum.

use std::collections::BTreeMap;

use num_integer::Integer;

use super::cyclo::CycloNumber;
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxSeries {
    denom: u32,
    field: u32,
    terms: BTreeMap<i64, CycloNumber>,
    trunc: Option<i64>,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl PuiseuxSeries {
    /// The series `O(zeta^(trunc/L))`, or exact zero when `trunc` is None.
    pub fn zero(denom: u32, field: u32, trunc: Option<i64>) -> Self {
        PuiseuxSeries { denom, field, terms: BTreeMap::new(), trunc }
    }

    pub fn monomial(denom: u32, exp: i64, coeff: CycloNumber) -> Self {
        let field = coeff.order();
        let mut s = Self::zero(denom, field, None);
        s.add_term(exp, coeff);
        s
    }

    pub fn from_terms<I>(denom: u32, field: u32, terms: I, trunc: Option<i64>) -> Self
    where
        I: IntoIterator<Item = (i64, CycloNumber)>,
    {
        let mut s = Self::zero(denom, field, trunc);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    pub fn field(&self) -> u32 {
        self.field
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &CycloNumber)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the exact zero series.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Adds `coeff * zeta^(exp/L)`; terms at or beyond the truncation are dropped.
    pub fn add_term(&mut self, exp: i64, coeff: CycloNumber) {
        if coeff.is_zero() || self.trunc.is_some_and(|t| exp >= t) {
            return;
        }
        let coeff = if coeff.order() == self.field { coeff } else { coeff.lift(self.field) };
        match self.terms.get_mut(&exp) {
            Some(c) => {
                let sum = &*c + &coeff;
                if sum.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *c = sum;
                }
            }
            None => {
                self.terms.insert(exp, coeff);
            }
        }
    }

    /// The coefficient of zeta^(exp/L), or TruncationUnderflow if unknown.
    pub fn coefficient(&self, exp: i64) -> Result<CycloNumber> {
        if let Some(t) = self.trunc {
            if exp >= t {
                return Err(Error::TruncationUnderflow { exponent: exp, trunc: t });
            }
        }
        Ok(self.terms.get(&exp).cloned().unwrap_or_else(|| CycloNumber::zero(self.field)))
    }

    /// Lowers the truncation to `t` (no-op if already lower).
    pub fn truncate(&mut self, t: i64) {
        if self.trunc.is_some_and(|cur| cur <= t) {
            return;
        }
        self.trunc = Some(t);
        let _ = self.terms.split_off(&t);
    }

    pub fn truncated(mut self, t: Option<i64>) -> Self {
        if let Some(t) = t {
            self.truncate(t);
        }
        self
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.denom, other.denom, "exponent denominators must agree");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let trunc = min_opt(self.trunc, other.trunc);
        let mut out = self.clone();
        out.field = self.field.lcm(&other.field);
        if out.field != self.field {
            out.terms = out.terms.into_iter().map(|(e, c)| (e, c.lift(out.field))).collect();
        }
        out.trunc = None;
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out.truncated(trunc)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CycloNumber) -> Self {
        if c.is_zero() {
            return Self::zero(self.denom, self.field, None);
        }
        let field = self.field.lcm(&c.order());
        let mut out = Self::zero(self.denom, field, self.trunc);
        for (e, x) in &self.terms {
            out.add_term(*e, x * c);
        }
        out
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        self.scale(&CycloNumber::from_rational(self.field, q.clone()))
    }

    /// Multiplies by zeta^(shift/L).
    pub fn shift(&self, shift: i64) -> Self {
        PuiseuxSeries {
            denom: self.denom,
            field: self.field,
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
            trunc: self.trunc.map(|t| t + shift),
        }
    }

    /// Re-expresses exponents over a multiple of the current denominator.
    pub fn rescale(&self, denom: u32) -> Self {
        assert!(denom % self.denom == 0, "rescale target must be a multiple");
        let f = (denom / self.denom) as i64;
        PuiseuxSeries {
            denom,
            field: self.field,
            terms: self.terms.iter().map(|(e, c)| (e * f, c.clone())).collect(),
            trunc: self.trunc.map(|t| t * f),
        }
    }

    /// Truncation of a product per the rule
    /// min(A.trunc + B.minExp, B.trunc + A.minExp).
    fn product_trunc(&self, other: &Self) -> Result<Option<i64>> {
        let a = match (self.trunc, other.min_exp()) {
            (None, _) => None,
            (Some(t), Some(m)) => Some(t + m),
            (Some(_), None) if other.trunc.is_none() => None,
            (Some(_), None) => return Err(Error::EmptySeriesTruncation),
        };
        let b = match (other.trunc, self.min_exp()) {
            (None, _) => None,
            (Some(t), Some(m)) => Some(t + m),
            (Some(_), None) if self.trunc.is_none() => None,
            (Some(_), None) => return Err(Error::EmptySeriesTruncation),
        };
        Ok(min_opt(a, b))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_capped(other, None)
    }

    /// Product with the result truncation additionally capped at `cap`, so
    /// that unneeded high-order terms are never formed.
    pub fn mul_capped(&self, other: &Self, cap: Option<i64>) -> Result<Self> {
        self.check_compatible(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zero(self.denom, self.field.lcm(&other.field), None));
        }
        let trunc = min_opt(self.product_trunc(other)?, cap);
        let field = self.field.lcm(&other.field);
        let mut acc: BTreeMap<i64, CycloNumber> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if trunc.is_some_and(|t| e >= t) {
                    break;
                }
                let p = ca * cb;
                match acc.get_mut(&e) {
                    Some(x) => *x = &*x + &p,
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        let mut out = Self::zero(self.denom, field, trunc);
        for (e, c) in acc {
            out.add_term(e, c);
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32, cap: Option<i64>) -> Result<Self> {
        let mut acc = Self::monomial(self.denom, 0, CycloNumber::one(self.field));
        for _ in 0..e {
            acc = acc.mul_capped(self, cap)?;
        }
        Ok(acc)
    }

    /// Inverse known below `target` (or below the precision the input
    /// supports, whichever is smaller).
    pub fn inv(&self, target: i64) -> Result<Self> {
        let v = self.min_exp().ok_or(Error::NonInvertible)?;
        let lead = self.terms[&v].inv()?;
        let field = self.field;
        let trunc = match self.trunc {
            Some(t) => target.min(t - 2 * v),
            None => target,
        };
        if self.terms.len() == 1 && self.trunc.is_none() {
            return Ok(Self::monomial(self.denom, -v, lead));
        }
        // self = a0 zeta^v (1 + u) with u supported on a lattice of step g.
        let step = self
            .terms
            .keys()
            .filter(|&&e| e != v)
            .fold(0i64, |g, &e| g.gcd(&(e - v)))
            .max(1);
        let u: Vec<(i64, CycloNumber)> = self
            .terms
            .iter()
            .filter(|(&e, _)| e != v)
            .map(|(&e, c)| ((e - v) / step, c * &lead))
            .collect();
        let mut c: Vec<CycloNumber> = vec![CycloNumber::one(field)];
        let mut m = 1i64;
        while -v + m * step < trunc {
            let mut s = CycloNumber::zero(field);
            for (j, uj) in &u {
                if *j > m {
                    break;
                }
                let prev = &c[(m - j) as usize];
                if !prev.is_zero() {
                    s = &s + &(uj * prev);
                }
            }
            c.push(-&s);
            m += 1;
        }
        let mut out = Self::zero(self.denom, field, Some(trunc));
        for (i, ci) in c.into_iter().enumerate() {
            out.add_term(-v + i as i64 * step, &ci * &lead);
        }
        Ok(out)
    }

    /// Coefficient of zeta^(-1), i.e. stored exponent -L.
    pub fn residue(&self) -> Result<CycloNumber> {
        self.coefficient(-(self.denom as i64))
    }

    /// Applies zeta_field -> zeta_field^c to every coefficient.
    pub fn galois(&self, c: i64) -> Self {
        let mut out = self.clone();
        for x in out.terms.values_mut() {
            *x = x.galois(c);
        }
        out
    }
}

pub fn puiseux_mul(a: &PuiseuxSeries, b: &PuiseuxSeries) -> Result<PuiseuxSeries> {
    a.mul(b)
}

pub fn puiseux_inv(a: &PuiseuxSeries, target: i64) -> Result<PuiseuxSeries> {
    a.inv(target)
}

pub fn residue(a: &PuiseuxSeries) -> Result<CycloNumber> {
    a.residue()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;

    fn q(n: i64) -> CycloNumber {
        CycloNumber::from_rational(1, int(n))
    }

    fn series(terms: &[(i64, i64)], trunc: Option<i64>) -> PuiseuxSeries {
        PuiseuxSeries::from_terms(1, 1, terms.iter().map(|&(e, c)| (e, q(c))), trunc)
    }

    #[test]
    fn product_examples() {
        let a = series(&[(-1, 1), (1, 1)], None);
        let b = series(&[(1, 1)], None);
        assert_eq!(a.mul(&b).unwrap(), series(&[(0, 1), (2, 1)], None));

        let a = series(&[(0, 1), (1, -1)], None);
        let b = series(&[(0, 1), (1, 1), (2, 1)], Some(3));
        let p = a.mul(&b).unwrap();
        assert_eq!(p, series(&[(0, 1)], Some(3)));
    }

    #[test]
    fn empty_truncated_product_is_an_error() {
        let a = series(&[], Some(2));
        assert_eq!(a.mul(&a), Err(Error::EmptySeriesTruncation));
        let z = series(&[], None);
        assert!(a.mul(&z).unwrap().is_exact_zero());
        let b = series(&[(1, 1)], None);
        assert_eq!(a.mul(&b).unwrap().trunc(), Some(3));
    }

    #[test]
    fn inverse_examples() {
        let a = series(&[(2, 1)], None);
        assert_eq!(a.inv(10).unwrap(), series(&[(-2, 1)], None));

        let a = series(&[(1, 1), (2, -1)], None);
        let i = a.inv(3).unwrap();
        assert_eq!(i, series(&[(-1, 1), (0, 1), (1, 1), (2, 1)], Some(3)));

        assert_eq!(series(&[], Some(5)).inv(3), Err(Error::NonInvertible));
        assert_eq!(series(&[], None).inv(3), Err(Error::NonInvertible));
    }

    #[test]
    fn residue_examples() {
        assert_eq!(series(&[(-1, 1), (1, 3)], None).residue().unwrap(), q(1));
        assert_eq!(series(&[(-2, 1)], None).residue().unwrap(), q(0));
        let s = PuiseuxSeries::from_terms(3, 1, [(-7, q(1))], Some(-6));
        assert!(matches!(s.residue(), Err(Error::TruncationUnderflow { .. })));
    }

    #[test]
    fn fractional_exponents() {
        // (zeta^(1/2) + zeta) * zeta^(-1/2) = 1 + zeta^(1/2)
        let a = PuiseuxSeries::from_terms(2, 1, [(1, q(1)), (2, q(1))], None);
        let b = PuiseuxSeries::monomial(2, -1, q(1));
        let p = a.mul(&b).unwrap();
        assert_eq!(p, PuiseuxSeries::from_terms(2, 1, [(0, q(1)), (1, q(1))], None));
        let inv = a.inv(6).unwrap();
        let check = a.mul(&inv).unwrap();
        assert_eq!(check.coefficient(0).unwrap(), q(1));
        for e in 1..check.trunc().unwrap() {
            assert!(check.coefficient(e).unwrap().is_zero());
        }
    }
}
