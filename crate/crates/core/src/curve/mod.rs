//! Local spectral-curve descriptors.
//!
//! A branch point is a disjoint union of components; on component `mu` the
//! local coordinate `zeta` satisfies `x = zeta^r_mu` and
//! `omega_{0,1} = sum_k F01[mu; -k] zeta^(k-1) d zeta`. Components carry
//! globally unique ids, which are the `component` half of every correlator
//! leg.

mod classify;
mod index;
mod json;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

pub use classify::{classify, AdmissibilityReport, BranchReport, ComponentType, Condition, Verdict};
pub use index::{mode_floor, partition_profile, vanishing_orders, VanishingOrder};
pub use json::{load_curve, load_curve_file, to_json};

use crate::error::{Error, Result};
use crate::exactnum::Rational;

/// A correlator leg: (component id, positive mode index k).
pub type Leg = (u32, u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub id: u32,
    pub r: u32,
    /// k -> F01[mu; -k], nonzero entries only.
    pub f01: BTreeMap<u32, Rational>,
    pub q: Rational,
    /// k -> F_{1/2,1}[mu; -k], nonzero entries only.
    pub f_half1: BTreeMap<u32, Rational>,
}

impl Component {
    pub fn new(id: u32, r: u32, f01: &[(u32, Rational)]) -> Self {
        Component {
            id,
            r,
            f01: f01.iter().filter(|(_, v)| !v.is_zero()).cloned().collect(),
            q: Rational::zero(),
            f_half1: BTreeMap::new(),
        }
    }

    pub fn with_q(mut self, q: Rational) -> Self {
        self.q = q;
        self
    }

    /// Smallest k with F01[k] nonzero; None stands for s = infinity.
    pub fn s(&self) -> Option<u32> {
        self.f01.keys().next().copied()
    }

    /// t = -F01[s] / r, defined when s is finite.
    pub fn t(&self) -> Option<Rational> {
        let s = self.s()?;
        Some(-&self.f01[&s] / Rational::from_integer(self.r.into()))
    }

    /// True when y is exactly the monomial -t zeta^(s-r).
    pub fn is_monomial(&self) -> bool {
        self.f01.len() <= 1
    }
}

/// Compares r/s ratios (with r/infinity = 0); Greater means a larger ratio.
pub fn ratio_cmp(a: &Component, b: &Component) -> Ordering {
    match (a.s(), b.s()) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(sa), Some(sb)) => (a.r as u64 * sb as u64).cmp(&(b.r as u64 * sa as u64)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchPoint {
    pub id: u32,
    /// Components in the order of weakly decreasing r/s.
    pub components: Vec<Component>,
}

impl BranchPoint {
    /// Sorts components by decreasing r/s, keeping the given order on ties.
    pub fn new(id: u32, mut components: Vec<Component>) -> Self {
        components.sort_by(|a, b| ratio_cmp(b, a));
        BranchPoint { id, components }
    }

    pub fn r_total(&self) -> u32 {
        self.components.iter().map(|c| c.r).sum()
    }

    /// lcm of the ramification orders, the common exponent denominator.
    pub fn lcm(&self) -> u32 {
        use num_integer::Integer;
        self.components.iter().fold(1u32, |acc, c| acc.lcm(&c.r))
    }

    pub fn position(&self, id: u32) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralCurveLocal {
    pub branch_points: Vec<BranchPoint>,
    /// Symmetric polarization, stored under both orderings of the key.
    pub f02: BTreeMap<(Leg, Leg), Rational>,
    pub crosscap: bool,
}

impl SpectralCurveLocal {
    /// Builds and validates a curve. `f02` entries may be given in either
    /// order; repeated keys must agree.
    pub fn new(
        branch_points: Vec<BranchPoint>,
        f02: &[(Leg, Leg, Rational)],
        crosscap: bool,
    ) -> Result<Self> {
        let mut map: BTreeMap<(Leg, Leg), Rational> = BTreeMap::new();
        for (a, b, v) in f02 {
            for key in [(*a, *b), (*b, *a)] {
                match map.get(&key) {
                    Some(old) if old != v => {
                        return Err(Error::Validation(format!(
                            "asymmetric polarization at {:?}/{:?}",
                            a, b
                        )))
                    }
                    _ => {
                        if !v.is_zero() {
                            map.insert(key, v.clone());
                        }
                    }
                }
            }
        }
        let curve = SpectralCurveLocal { branch_points, f02: map, crosscap };
        curve.validate()?;
        Ok(curve)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for bp in &self.branch_points {
            if bp.components.is_empty() {
                return Err(Error::Validation(format!("branch point {} has no components", bp.id)));
            }
            let mut qsum = Rational::zero();
            for c in &bp.components {
                if !seen.insert(c.id) {
                    return Err(Error::Validation(format!("duplicate component id {}", c.id)));
                }
                if c.r == 0 {
                    return Err(Error::Validation(format!("component {} has r = 0", c.id)));
                }
                if c.f01.contains_key(&0) || c.f_half1.contains_key(&0) {
                    return Err(Error::Validation(format!("component {} uses index 0", c.id)));
                }
                if !self.crosscap && (!c.q.is_zero() || !c.f_half1.is_empty()) {
                    return Err(Error::Validation(format!(
                        "component {} has crosscap data but the crosscap is disabled",
                        c.id
                    )));
                }
                qsum += &c.q;
            }
            if !qsum.is_zero() {
                return Err(Error::Validation(format!(
                    "crosscap charges at branch point {} sum to {}",
                    bp.id, qsum
                )));
            }
            if let [c] = bp.components.as_slice() {
                if c.r >= 2 && c.s() == Some(c.r) {
                    return Err(Error::Validation(format!(
                        "component {} carries the constant y(alpha); subtract it first",
                        c.id
                    )));
                }
            }
        }
        for ((a, b), _) in &self.f02 {
            for leg in [a, b] {
                if leg.1 == 0 || !seen.contains(&leg.0) {
                    return Err(Error::Validation(format!("bad polarization leg {:?}", leg)));
                }
            }
        }
        Ok(())
    }

    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.branch_points.iter().flat_map(|bp| bp.components.iter())
    }

    pub fn component(&self, id: u32) -> Option<&Component> {
        self.components().find(|c| c.id == id)
    }

    /// Index of the branch point carrying component `id`.
    pub fn branch_of(&self, id: u32) -> Option<usize> {
        self.branch_points.iter().position(|bp| bp.position(id).is_some())
    }

    pub fn f02_value(&self, a: Leg, b: Leg) -> Rational {
        self.f02.get(&(a, b)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Polarization partners of a leg: all (b, value) with F02[a, b] nonzero.
    pub fn f02_row(&self, a: Leg) -> impl Iterator<Item = (Leg, &Rational)> {
        self.f02
            .range((a, (0, 0))..=(a, (u32::MAX, u32::MAX)))
            .map(|((_, b), v)| (*b, v))
    }

    pub fn has_standard_polarization(&self) -> bool {
        self.f02.is_empty()
    }

    pub fn has_crosscap_tail(&self) -> bool {
        self.components().any(|c| !c.f_half1.is_empty())
    }

    pub fn max_abs_q(&self) -> Rational {
        self.components().map(|c| c.q.abs()).fold(Rational::zero(), |a, b| if b > a { b } else { a })
    }

    /// The single-branch-point, single-component monomial curve
    /// y = -t zeta^(s-r).
    pub fn monomial(r: u32, s: u32, t: Rational) -> Result<Self> {
        let f01 = vec![(s, -t * Rational::from_integer(r.into()))];
        let bp = BranchPoint::new(0, vec![Component::new(1, r, &f01)]);
        SpectralCurveLocal::new(vec![bp], &[], false)
    }

    /// Same curve with the components of every branch point re-sorted from
    /// the given user permutation (used by order-independence checks).
    pub fn with_component_order(&self, order: &[u32]) -> Result<Self> {
        let bps = self
            .branch_points
            .iter()
            .map(|bp| {
                let mut comps = bp.components.clone();
                comps.sort_by_key(|c| order.iter().position(|&o| o == c.id).unwrap_or(usize::MAX));
                BranchPoint::new(bp.id, comps)
            })
            .collect();
        let f02: Vec<(Leg, Leg, Rational)> =
            self.f02.iter().map(|((a, b), v)| (*a, *b, v.clone())).collect();
        SpectralCurveLocal::new(bps, &f02, self.crosscap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn derived_s_and_t() {
        let c = Component::new(1, 2, &[(3, int(-1))]);
        assert_eq!(c.s(), Some(3));
        assert_eq!(c.t(), Some(rat(1, 2)));
        let e = Component::new(2, 1, &[]);
        assert_eq!(e.s(), None);
        assert_eq!(e.t(), None);
    }

    #[test]
    fn ordering_by_ratio() {
        let bp = BranchPoint::new(
            0,
            vec![
                Component::new(1, 1, &[]),
                Component::new(2, 4, &[(3, int(1))]),
                Component::new(3, 7, &[(3, int(1))]),
            ],
        );
        let ids: Vec<u32> = bp.components.iter().map(|c| c.id).collect();
        assert_eq!(ids, vec![3, 2, 1]);
        assert_eq!(bp.r_total(), 12);
        assert_eq!(bp.lcm(), 28);
    }

    #[test]
    fn validation_errors() {
        let bp = BranchPoint::new(
            0,
            vec![Component::new(1, 2, &[(3, int(-1))]).with_q(int(1))],
        );
        assert!(matches!(
            SpectralCurveLocal::new(vec![bp.clone()], &[], true),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            SpectralCurveLocal::new(vec![bp], &[], false),
            Err(Error::Validation(_))
        ));
        let bp = BranchPoint::new(0, vec![Component::new(1, 2, &[(3, int(-1))])]);
        let bad = [((1, 1), (1, 2), int(1)), ((1, 2), (1, 1), int(2))];
        assert!(matches!(
            SpectralCurveLocal::new(vec![bp.clone()], &bad, false),
            Err(Error::Validation(_))
        ));
        let ok = [((1, 1), (1, 2), int(1))];
        let c = SpectralCurveLocal::new(vec![bp], &ok, false).unwrap();
        assert_eq!(c.f02_value((1, 2), (1, 1)), int(1));
        assert_eq!(c.f02_row((1, 2)).count(), 1);
        let constant = BranchPoint::new(0, vec![Component::new(1, 2, &[(2, int(5)), (3, int(-1))])]);
        assert!(SpectralCurveLocal::new(vec![constant], &[], false).is_err());
    }
}
