//! Laplace-side data of a curve and descendant intersection numbers.
//!
//! The Laplace maps act on bases only, k zeta^(k-1) d zeta -> k!^(r) u^(k/r)
//! and k!^(r) zeta^(-k-1) d zeta -> eps^(k/r), so both directions reduce to
//! dividing or multiplying coefficients by r-fold factorials. For the curve
//! x = zeta^r, y = -zeta/r with the standard polarization the correlator
//! coefficients are Witten r-spin descendants times these factorials.

mod dvv;

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::curve::{Leg, SpectralCurveLocal};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, int, Rational};
use crate::recursion::CorrelatorStore;

pub use dvv::dvv_oracle;

/// m!^(r): 1 on [1 - r, 0] and m (m - r)!^(r) above.
pub fn rfact(m: i64, r: u32) -> Result<Rational> {
    let r = r as i64;
    if r < 1 || m < 1 - r {
        return Err(Error::OutOfDomain(format!("{m}!^({r}) needs m >= 1 - r")));
    }
    let mut acc = int(1);
    let mut k = m;
    while k > 0 {
        acc *= int(k);
        k -= r;
    }
    Ok(acc)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaplaceData {
    /// T_{mu,k}, nonzero entries only.
    pub t: BTreeMap<Leg, Rational>,
    /// B_{(mu,k),(nu,l)}, nonzero entries only, under both orderings.
    pub b: BTreeMap<(Leg, Leg), Rational>,
}

impl LaplaceData {
    pub fn is_trivial(&self) -> bool {
        self.t.is_empty() && self.b.is_empty()
    }
}

/// T = sum_mu e_{mu,s_mu} u^(s/r) + L+(omega_{0,1}) and B = L+ (x) L+ of the
/// non-standard part of omega_{0,2}.
pub fn laplace_series(curve: &SpectralCurveLocal) -> LaplaceData {
    let mut t: BTreeMap<Leg, Rational> = BTreeMap::new();
    for c in curve.components() {
        if let Some(s) = c.s() {
            *t.entry((c.id, s)).or_insert_with(Rational::zero) += int(1);
        }
        for (&k, v) in &c.f01 {
            let f = rfact(k as i64 - c.r as i64, c.r).expect("k >= 1");
            *t.entry((c.id, k)).or_insert_with(Rational::zero) += f * v;
        }
    }
    t.retain(|_, v| !v.is_zero());
    let r_of = |id: u32| curve.component(id).map_or(1, |c| c.r);
    let b = curve
        .f02
        .iter()
        .map(|(&(a, bb), v)| {
            let fa = rfact(a.1 as i64 - r_of(a.0) as i64, r_of(a.0)).expect("k >= 1");
            let fb = rfact(bb.1 as i64 - r_of(bb.0) as i64, r_of(bb.0)).expect("k >= 1");
            ((a, bb), fa * fb * v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect();
    LaplaceData { t, b }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionEntry {
    pub g: u32,
    pub n: u32,
    pub d: Vec<u32>,
    /// a_i in [1, r]; a_i = r entries are kept so their vanishing can be checked.
    pub a: Vec<u32>,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
}

fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(v))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IntersectionTable {
    pub r: u32,
    pub entries: Vec<IntersectionEntry>,
}

impl IntersectionTable {
    pub fn get(&self, g: u32, d: &[u32], a: &[u32]) -> Option<&Rational> {
        self.entries.iter().find(|e| e.g == g && e.d == d && e.a == a).map(|e| &e.value)
    }

    /// The codimension D = ((r - 2)(g - 1) - n + sum k) / r, if integral.
    pub fn degree(&self, e: &IntersectionEntry) -> Option<i64> {
        let r = self.r as i64;
        let sum_k: i64 = e.d.iter().zip(&e.a).map(|(&d, &a)| d as i64 * r + a as i64).sum();
        let num = (r - 2) * (e.g as i64 - 1) - e.n as i64 + sum_k;
        (num % r == 0).then_some(num / r)
    }

    /// Nonzero entries whose class degree differs from 3g - 3 + n.
    pub fn dimension_violations(&self) -> Vec<&IntersectionEntry> {
        self.entries
            .iter()
            .filter(|e| !e.value.is_zero())
            .filter(|e| self.degree(e) != Some(3 * e.g as i64 - 3 + e.n as i64))
            .collect()
    }

    /// Nonzero entries with some a_i = r.
    pub fn divisible_violations(&self) -> Vec<&IntersectionEntry> {
        self.entries.iter().filter(|e| !e.value.is_zero() && e.a.contains(&self.r)).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["g", "n", "d", "a", "value"]).map_err(io)?;
        let vec = |v: &[u32]| format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        for e in &self.entries {
            w.write_record([e.g.to_string(), e.n.to_string(), vec(&e.d), vec(&e.a), format_rational(&e.value)])
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Splits k = d r + a with a in [1, r].
fn split(k: u32, r: u32) -> (u32, u32) {
    let d = (k - 1) / r;
    (d, k - d * r)
}

/// `<prod tau_{d_i}(a_i)>_g = F_{g,n}[d_i r + a_i] / prod (d_i r + a_i)!^(r)`
/// for the r-spin curve (r, r+1, 1/r), standard polarization, no crosscap.
/// Every index multiset is taken up to the largest stored index.
pub fn extract_descendants(curve: &SpectralCurveLocal, store: &CorrelatorStore) -> Result<IntersectionTable> {
    let comps: Vec<_> = curve.components().collect();
    let [c] = comps.as_slice() else {
        return Err(Error::WrongCurveShape("extraction needs a single component".into()));
    };
    let r = c.r;
    if c.s() != Some(r + 1) || !c.is_monomial() || c.t() != Some(Rational::new(1.into(), r.into())) {
        return Err(Error::WrongCurveShape(format!("extraction needs (r, r+1, 1/r), got r = {r}, s = {:?}", c.s())));
    }
    if !curve.has_standard_polarization() {
        return Err(Error::WrongCurveShape("extraction needs the standard polarization".into()));
    }
    if curve.crosscap && !(c.q.is_zero() && c.f_half1.is_empty()) {
        return Err(Error::WrongCurveShape("extraction needs a vanishing crosscap".into()));
    }
    debug_assert!(laplace_series(curve).is_trivial());
    let kmax = store.max_index(c.id);
    let mut entries = Vec::new();
    for (&(g2, n), _) in store.levels() {
        if g2 % 2 == 1 {
            continue;
        }
        let mut ks = vec![1u32; n as usize];
        loop {
            let legs: Vec<Leg> = ks.iter().map(|&k| (c.id, k)).collect();
            let f = store.get(g2, n, &legs);
            let denom: Rational = ks.iter().map(|&k| rfact(k as i64, r).unwrap()).product();
            let (d, a): (Vec<u32>, Vec<u32>) = ks.iter().map(|&k| split(k, r)).unzip();
            entries.push(IntersectionEntry { g: g2 / 2, n, d, a, value: f / denom });
            // Next non-decreasing tuple.
            let mut p = ks.len();
            while p > 0 && ks[p - 1] == kmax {
                p -= 1;
            }
            if p == 0 {
                break;
            }
            ks[p - 1] += 1;
            let v = ks[p - 1];
            for x in &mut ks[p..] {
                *x = v;
            }
        }
    }
    Ok(IntersectionTable { r, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::recursion::{run, EngineOptions};

    #[test]
    fn rfact_values() {
        assert_eq!(rfact(3, 2).unwrap(), int(3));
        assert_eq!(rfact(7, 3).unwrap(), int(28));
        assert_eq!(rfact(0, 5).unwrap(), int(1));
        assert_eq!(rfact(-4, 5).unwrap(), int(1));
        assert!(matches!(rfact(-5, 5), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn laplace_of_monomials() {
        let c = SpectralCurveLocal::monomial(2, 3, rat(1, 2)).unwrap();
        assert!(laplace_series(&c).is_trivial());
        let t = rat(1, 5);
        let c = SpectralCurveLocal::monomial(2, 3, t.clone()).unwrap();
        assert_eq!(laplace_series(&c).t[&(1, 3)], int(1) - int(2) * t);
        let bp = c.branch_points.clone();
        let beta = rat(3, 7);
        let c = SpectralCurveLocal::new(bp, &[((1, 1), (1, 1), beta.clone())], false).unwrap();
        assert_eq!(laplace_series(&c).b[&((1, 1), (1, 1))], beta);
    }

    #[test]
    fn r2_matches_dvv() {
        let curve = SpectralCurveLocal::monomial(2, 3, rat(1, 2)).unwrap();
        let store = run(&curve, 4, &EngineOptions::default()).unwrap().store;
        let table = extract_descendants(&curve, &store).unwrap();
        assert_eq!(table.get(0, &[0, 0, 0], &[1, 1, 1]), Some(&int(1)));
        assert_eq!(table.get(1, &[1], &[1]), Some(&rat(1, 24)));
        let mut compared = 0;
        for e in &table.entries {
            if e.a.iter().all(|&a| a == 1) && 3 * e.g as i64 - 3 + e.n as i64 == e.d.iter().sum::<u32>() as i64 {
                assert_eq!(e.value, dvv_oracle(e.g, &e.d).unwrap(), "{e:?}");
                compared += 1;
            }
        }
        assert!(compared > 10);
        assert!(table.dimension_violations().is_empty());
        assert!(table.divisible_violations().is_empty());
    }

    #[test]
    fn r3_three_point() {
        let curve = SpectralCurveLocal::monomial(3, 4, rat(1, 3)).unwrap();
        let store = run(&curve, 2, &EngineOptions::default()).unwrap().store;
        let table = extract_descendants(&curve, &store).unwrap();
        for a1 in 1..=2u32 {
            for a2 in a1..=2 {
                for a3 in a2..=2 {
                    let want = if a1 + a2 + a3 == 4 { int(1) } else { int(0) };
                    assert_eq!(table.get(0, &[0, 0, 0], &[a1, a2, a3]), Some(&want));
                }
            }
        }
        assert!(table.dimension_violations().is_empty());
        assert!(table.divisible_violations().is_empty());
        assert!(table.to_csv().unwrap().starts_with("g,n,d,a,value\n"));
    }

    #[test]
    fn wrong_shape() {
        let curve = SpectralCurveLocal::monomial(2, 3, rat(1, 3)).unwrap();
        let store = CorrelatorStore::new();
        assert!(matches!(extract_descendants(&curve, &store), Err(Error::WrongCurveShape(_))));
    }
}
