//! Elements of the cyclotomic field Q(zeta_L) in the power basis modulo the
//! L-th cyclotomic polynomial.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

fn phi_cache() -> &'static RwLock<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Integer coefficients of Phi_L, lowest degree first (monic).
pub fn cyclotomic_polynomial(l: u32) -> Arc<Vec<i64>> {
    assert!(l >= 1, "cyclotomic order must be positive");
    if let Some(p) = phi_cache().read().unwrap().get(&l) {
        return p.clone();
    }
    // x^L - 1 divided by Phi_d for every proper divisor d.
    let mut num = vec![0i64; l as usize + 1];
    num[0] = -1;
    num[l as usize] = 1;
    for d in 1..l {
        if l % d == 0 {
            let div = cyclotomic_polynomial(d);
            num = exact_div(&num, &div);
        }
    }
    let p = Arc::new(num);
    phi_cache().write().unwrap().insert(l, p.clone());
    p
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut q = vec![0i64; qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn];
        q[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

pub fn euler_phi(l: u32) -> usize {
    cyclotomic_polynomial(l).len() - 1
}

/// An element of Q(zeta_L). Coefficients are reduced (length below phi(L))
/// and trailing zeros are trimmed, so zero is the empty vector.
#[derive(Clone)]
pub struct CycloNumber {
    order: u32,
    coeffs: Vec<Rational>,
}

impl CycloNumber {
    pub fn zero(order: u32) -> Self {
        assert!(order >= 1);
        CycloNumber { order, coeffs: Vec::new() }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(order, Rational::one())
    }

    pub fn from_rational(order: u32, q: Rational) -> Self {
        let mut c = CycloNumber { order, coeffs: vec![q] };
        c.trim();
        c
    }

    /// zeta_L^a for any integer a.
    pub fn root(order: u32, a: i64) -> Self {
        let e = a.rem_euclid(order as i64) as usize;
        let mut poly = vec![Rational::zero(); e + 1];
        poly[e] = Rational::one();
        Self::from_poly(order, poly)
    }

    /// Reduces an arbitrary polynomial in zeta_L.
    pub fn from_poly(order: u32, mut poly: Vec<Rational>) -> Self {
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        if poly.len() > deg {
            for i in (deg..poly.len()).rev() {
                if poly[i].is_zero() {
                    continue;
                }
                let c = std::mem::take(&mut poly[i]);
                for (j, &pj) in phi.iter().enumerate().take(deg) {
                    if pj != 0 {
                        poly[i - deg + j] -= &c * Rational::from_integer(pj.into());
                    }
                }
            }
            poly.truncate(deg);
        }
        let mut c = CycloNumber { order, coeffs: poly };
        c.trim();
        c
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Re-expresses the element in Q(zeta_M) for a multiple M of the order.
    pub fn lift(&self, m: u32) -> Self {
        assert!(m % self.order == 0, "lift target must be a multiple of the order");
        if m == self.order {
            return self.clone();
        }
        let step = (m / self.order) as usize;
        let mut poly = vec![Rational::zero(); step * self.coeffs.len().max(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        Self::from_poly(m, poly)
    }

    /// Applies the automorphism zeta_L -> zeta_L^c.
    pub fn galois(&self, c: i64) -> Self {
        let l = self.order as i64;
        assert!(c.gcd(&l) == 1, "Galois exponent must be coprime to the order");
        let mut poly = vec![Rational::zero(); self.order as usize];
        for (i, x) in self.coeffs.iter().enumerate() {
            let e = (i as i64 * c).rem_euclid(l) as usize;
            poly[e] += x;
        }
        Self::from_poly(self.order, poly)
    }

    /// Returns the rational value, or NotRational if a non-constant basis
    /// coefficient survives.
    pub fn as_rational(&self) -> Result<Rational> {
        match self.coeffs.len() {
            0 => Ok(Rational::zero()),
            1 => Ok(self.coeffs[0].clone()),
            _ => Err(Error::NotRational(self.to_string())),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(self.order);
        }
        CycloNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let m = a.order.lcm(&b.order);
        (a.lift(m), b.lift(m))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NonInvertible);
        }
        if self.is_rational() {
            return Ok(Self::from_rational(self.order, self.coeffs[0].recip()));
        }
        // Solve (self * x) = 1 with the multiplication matrix.
        let n = euler_phi(self.order);
        let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(n);
        for j in 0..n {
            let prod = self * &Self::root(self.order, j as i64);
            let mut col = prod.coeffs;
            col.resize(n, Rational::zero());
            cols.push(col);
        }
        // Augmented row-major matrix.
        let mut m: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rational> = (0..n).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 { Rational::one() } else { Rational::zero() });
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !m[r][col].is_zero())
                .ok_or(Error::NonInvertible)?;
            m.swap(col, piv);
            let p = m[col][col].recip();
            for x in m[col].iter_mut() {
                *x *= &p;
            }
            for r in 0..n {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for k in col..=n {
                        let v = &m[col][k] * &f;
                        m[r][k] -= v;
                    }
                }
            }
        }
        Ok(Self::from_poly(self.order, m.into_iter().map(|row| row[n].clone()).collect()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloNumber {}

impl Add for &CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        if self.order != rhs.order {
            let (a, b) = CycloNumber::common(self, rhs);
            return &a + &b;
        }
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let x = match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            coeffs.push(x);
        }
        let mut c = CycloNumber { order: self.order, coeffs };
        c.trim();
        c
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        self + &(-rhs)
    }
}

impl Mul for &CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        if self.order != rhs.order {
            let (a, b) = CycloNumber::common(self, rhs);
            return &a * &b;
        }
        if self.is_zero() || rhs.is_zero() {
            return CycloNumber::zero(self.order);
        }
        if self.is_rational() {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.is_rational() {
            return self.scale(&rhs.coeffs[0]);
        }
        let mut poly = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    poly[i + j] += a * b;
                }
            }
        }
        CycloNumber::from_poly(self.order, poly)
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                _ => format!("{}*z{}^{}", format_rational(c), self.order, i),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo[{}]({})", self.order, self)
    }
}

/// Canonical constructor for zeta_L^a.
pub fn cyclo_root(l: u32, a: i64) -> CycloNumber {
    CycloNumber::root(l, a)
}

pub fn cyclo_as_rational(x: &CycloNumber) -> Result<Rational> {
    x.as_rational()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(15), 8);
    }

    #[test]
    fn roots() {
        assert_eq!(cyclo_root(1, 5), CycloNumber::one(1));
        assert_eq!(cyclo_root(2, 1).as_rational().unwrap(), int(-1));
        assert_eq!(cyclo_root(4, 2).as_rational().unwrap(), int(-1));
        assert_eq!(cyclo_root(7, 0), CycloNumber::one(7));
        assert_eq!(cyclo_root(6, -1), cyclo_root(6, 5));
    }

    #[test]
    fn rationality_gate() {
        let s = &cyclo_root(3, 1) + &cyclo_root(3, 2);
        assert_eq!(cyclo_as_rational(&s).unwrap(), int(-1));
        assert!(matches!(cyclo_as_rational(&cyclo_root(5, 1)), Err(Error::NotRational(_))));
        let x = CycloNumber::from_rational(3, int(1));
        assert_eq!(cyclo_as_rational(&x).unwrap(), int(1));
    }

    #[test]
    fn power_sums_vanish() {
        for l in 2..=12u32 {
            let mut acc = CycloNumber::zero(l);
            for a in 0..l as i64 {
                acc = &acc + &cyclo_root(l, a);
            }
            assert_eq!(acc.as_rational().unwrap(), int(0), "L = {l}");
        }
    }

    #[test]
    fn lifting_and_mixed_orders() {
        let a = cyclo_root(3, 1);
        assert_eq!(a.lift(12), cyclo_root(12, 4));
        let b = &cyclo_root(4, 1) * &cyclo_root(3, 1);
        assert_eq!(b, cyclo_root(12, 7));
        assert_eq!(cyclo_root(6, 2), cyclo_root(3, 1));
    }

    #[test]
    fn inverse() {
        for l in [3u32, 5, 8, 12, 15] {
            let x = &(&cyclo_root(l, 1) + &CycloNumber::from_rational(l, rat(3, 2)))
                * &cyclo_root(l, 2);
            let y = x.inv().unwrap();
            assert_eq!(&x * &y, CycloNumber::one(l));
        }
        assert_eq!(CycloNumber::zero(5).inv(), Err(Error::NonInvertible));
    }

    #[test]
    fn galois_conjugation() {
        let x = cyclo_root(5, 1);
        assert_eq!(x.galois(2), cyclo_root(5, 2));
        let s = &cyclo_root(7, 1) + &cyclo_root(7, 6);
        let t = &cyclo_root(7, 3) + &cyclo_root(7, 4);
        assert_eq!(s.galois(3), t);
    }
}
