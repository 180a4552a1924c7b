//! Closed forms for the lowest correlators in the symmetric case:
//! `F_{0,3}`, `F_{1/2,2}` and `F_{1,1}` from the data (r, s, t, Q) alone.
//!
//! These are evaluated independently of the recursion and used to cross-check
//! it. They apply to monomial `omega_{0,1}` with the standard polarization
//! and no crosscap tail; a branch point that fails the symmetry predictor is
//! rejected with `NotSymmetricCase`.

mod predict;

use std::cmp::Ordering;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::curve::{ratio_cmp, BranchPoint, Component, Leg, SpectralCurveLocal};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, int, Rational};
use crate::recursion::CorrelatorStore;

pub use predict::{predict_symmetry, ItemVerdict, SymmetryPrediction};
use predict::{class, floor_ratio, tpow};

/// r' with r = r' s + 1, or r = r' s + s - 1 when `minus` is set.
fn rprime(r: u32, s: u32, minus: bool) -> i64 {
    if minus {
        (r as i64 + 1) / s as i64 - 1
    } else {
        (r as i64 - 1) / s as i64
    }
}

/// The constant c in `F_{0,3}[k1,k2,k3] = c k1 k2 k3 / (t r)`:
/// -r' for r = r' s + 1 and r' + 1 for r = r' s + s - 1. For s <= 2 both
/// readings can apply; `F_{0,3}` vanishes there and -r' is returned.
pub fn c_coefficient(r: u32, s: u32) -> Result<Rational> {
    if s == 0 || r == 0 {
        return Err(Error::OutOfDomain(format!("c needs r, s > 0, got ({r}, {s})")));
    }
    if s <= 2 || r % s == 1 {
        if s <= 2 && r % s != 1 % s {
            return Err(Error::NotSymmetricCase(format!("r = {r} is not 1 mod {s}")));
        }
        return Ok(int(-rprime(r, s, false)));
    }
    if r % s == s - 1 {
        return Ok(int(rprime(r, s, true) + 1));
    }
    Err(Error::NotSymmetricCase(format!("r = {r} is not +-1 mod {s}")))
}

/// The unique l in [0, r) with r | s l + k.
pub fn ell(r: u32, s: u32, k: u32) -> Option<u32> {
    (0..r).find(|&l| (s as u64 * l as u64 + k as u64) % r as u64 == 0)
}

/// sum_{m=1}^{r-1} m (r - m) (r - 1 - 2 l(m)).
pub fn funny_sum(r: u32, s: u32) -> Option<i64> {
    (1..r)
        .map(|m| {
            let l = ell(r, s, m)? as i64;
            let (r, m) = (r as i64, m as i64);
            Some(m * (r - m) * (r - 1 - 2 * l))
        })
        .sum()
}

fn require_shape(curve: &SpectralCurveLocal) -> Result<()> {
    if !curve.components().all(|c| c.is_monomial()) {
        return Err(Error::NotApplicable("closed forms need monomial omega_{0,1}".into()));
    }
    if !curve.has_standard_polarization() {
        return Err(Error::NotApplicable("closed forms need the standard polarization".into()));
    }
    if curve.has_crosscap_tail() {
        return Err(Error::NotApplicable("closed forms need a crosscap without tail".into()));
    }
    Ok(())
}

fn require_symmetric(curve: &SpectralCurveLocal, alpha: usize) -> Result<()> {
    let pred = &predict_symmetry(curve)[alpha];
    if pred.all_pass {
        return Ok(());
    }
    let failed: Vec<u8> = pred.items.iter().filter(|i| !i.pass).map(|i| i.item).collect();
    Err(Error::NotSymmetricCase(format!("branch point {} fails items {failed:?}", pred.branch_point)))
}

fn k(l: &Leg) -> Rational {
    int(l.1 as i64)
}

fn f03(bp: &BranchPoint, legs: &[Leg]) -> Result<Rational> {
    let id = legs[0].0;
    if legs.iter().any(|l| l.0 != id) {
        return Ok(Rational::zero());
    }
    let c = &bp.components[bp.position(id).unwrap()];
    let (Some(s), Some(t)) = (c.s(), c.t()) else { return Ok(Rational::zero()) };
    if legs.iter().map(|l| l.1).sum::<u32>() != s || s <= 2 {
        return Ok(Rational::zero());
    }
    let cc = c_coefficient(c.r, s)?;
    Ok(cc * k(&legs[0]) * k(&legs[1]) * k(&legs[2]) / (t * int(c.r as i64)))
}

fn t_of(c: &Component) -> Rational {
    c.t().expect("finite s")
}

fn same_floor(a: &Component, b: &Component) -> bool {
    floor_ratio(a) == floor_ratio(b)
}

/// Diagonal `F_{1/2,2}[(mu,k1),(mu,k2)]` for a finite-s component.
fn f_half2_diag(bp: &BranchPoint, mu: &Component, k1: u32, k2: u32) -> Rational {
    let s = mu.s().unwrap();
    let (r, t) = (mu.r, t_of(mu));
    let rr = int(r as i64);
    let weight = int(k1 as i64 * k2 as i64);
    let others = || bp.components.iter().filter(move |nu| nu.id != mu.id);
    let mut v = Rational::zero();
    let low = k1 + k2 == 2;
    if s <= 2 || r % s == 1 {
        let rp = rprime(r, s, false);
        if k1 + k2 == s {
            v -= &mu.q * int(rp) / (&t * &rr);
        }
        if low && s == 2 {
            for nu in others().filter(|nu| ratio_cmp(mu, nu) == Ordering::Equal) {
                let tn = t_of(nu);
                v -= t.pow(r as i32 - 1) / (t.pow(r as i32) - tn.pow(r as i32)) * &nu.q;
            }
            // No symmetry condition removes the lower-ratio charges when s = 2.
            for nu in others().filter(|nu| ratio_cmp(mu, nu) == Ordering::Greater) {
                v -= &nu.q / &t;
            }
        }
        if low && s > 2 {
            for nu in others().filter(|nu| nu.s() == Some(1) && nu.r == r / s) {
                let e = (nu.r * (s - 2)) as i32;
                v -= &nu.q / &t * (t_of(nu) / &t).pow(e);
            }
            for nu in others().filter(|nu| nu.s() == Some(2) && ratio_cmp(mu, nu) == Ordering::Less && same_floor(mu, nu)) {
                v += &nu.q / &t * (&t / t_of(nu)).pow(nu.r as i32);
            }
        }
    } else {
        // r = -1 mod s with s > 2.
        let rp = rprime(r, s, true);
        if k1 + k2 == s {
            v += &mu.q * int(rp + 1) / (&t * &rr);
        }
        if low {
            for nu in others().filter(|nu| nu.s() == Some(1) && nu.r == r.div_ceil(s)) {
                let e = (nu.r * (s - 2)) as i32;
                v += &nu.q / &t * (&t / t_of(nu)).pow(e);
            }
            for nu in others().filter(|nu| nu.s() == Some(2) && ratio_cmp(mu, nu) == Ordering::Greater && same_floor(mu, nu)) {
                v -= &nu.q / &t * (t_of(nu) / &t).pow(nu.r as i32);
            }
        }
    }
    weight * v
}

/// Off-diagonal `F_{1/2,2}[(a,1),(b,1)]` for a != b on one branch point.
fn f_half2_off(a: &Component, b: &Component) -> Rational {
    // (r, r+1) paired with (1, infinity).
    for (mu, minus) in [(a, b), (b, a)] {
        if minus.s().is_none() {
            return match mu.s() {
                Some(s) if s == mu.r + 1 => -&mu.q / t_of(mu),
                _ => Rational::zero(),
            };
        }
    }
    let (sa, sb) = (a.s().unwrap(), b.s().unwrap());
    if sa == 2 && sb == 2 && a.r == b.r {
        let r = a.r as i32;
        let rp = rprime(a.r, 2, false) as i32;
        let (ta, tb) = (t_of(a), t_of(b));
        return -&a.q * ta.pow(rp) * tb.pow(rp) / (ta.pow(r) - tb.pow(r));
    }
    for (mu, nu) in [(a, b), (b, a)] {
        let (smu, snu) = (mu.s().unwrap(), nu.s().unwrap());
        if smu > 1
            && snu > 1
            && class(mu).minus
            && class(nu).plus
            && same_floor(mu, nu)
            && ratio_cmp(mu, nu) == Ordering::Greater
        {
            let rp = rprime(mu.r, smu, true) as i32;
            let tm = t_of(mu);
            return -&mu.q / &tm * (t_of(nu) / &tm).pow(rp);
        }
    }
    Rational::zero()
}

fn f_half2(bp: &BranchPoint, a: Leg, b: Leg) -> Rational {
    let ca = &bp.components[bp.position(a.0).unwrap()];
    let cb = &bp.components[bp.position(b.0).unwrap()];
    if a.0 == b.0 {
        if ca.s().is_none() {
            if (a.1, b.1) != (1, 1) {
                return Rational::zero();
            }
            return bp
                .components
                .iter()
                .filter(|nu| nu.r == 1 && nu.s() == Some(2))
                .map(|nu| &nu.q / t_of(nu))
                .sum();
        }
        return f_half2_diag(bp, ca, a.1, b.1);
    }
    if (a.1, b.1) != (1, 1) {
        return Rational::zero();
    }
    f_half2_off(ca, cb)
}

fn f11(bp: &BranchPoint, leg: Leg) -> Result<Rational> {
    let mu = &bp.components[bp.position(leg.0).unwrap()];
    let Some(s) = mu.s() else {
        // On the s = infinity component the residue vanishes once every
        // other component is ramified; an unramified partner is not covered.
        if bp.components.iter().any(|nu| nu.r == 1 && nu.s().is_some()) {
            return Err(Error::NotApplicable("F_{1,1} on the s = infinity component next to an r = 1 component".into()));
        }
        return Ok(Rational::zero());
    };
    let (r, t) = (mu.r, t_of(mu));
    let kk = leg.1 as i64;
    let rr = int(r as i64);
    let mut v = Rational::zero();
    if kk == s as i64 {
        let sum = funny_sum(r, s).ok_or_else(|| Error::NotSymmetricCase(format!("({r}, {s}) not coprime")))?;
        v -= int(sum) / (int(4) * &rr * &rr * &t);
    }
    if mu.q.is_zero() {
        return Ok(v);
    }
    let mut b = Rational::zero();
    if kk == s as i64 {
        b -= &mu.q * int(r as i64 - 1) / (int(2) * &rr * &t);
    }
    for nu in bp.components.iter().filter(|nu| nu.id != mu.id) {
        match ratio_cmp(nu, mu) {
            Ordering::Equal => {
                if kk == s as i64 {
                    let tn = t_of(nu);
                    b -= t.pow(r as i32 - 1) / (t.pow(r as i32) - tn.pow(r as i32)) * &nu.q;
                }
            }
            Ordering::Less => {
                let tn = nu.t();
                let rn = nu.r as i64;
                match nu.s() {
                    None => {
                        if kk == s as i64 {
                            b -= &nu.q / &t;
                        }
                    }
                    Some(sn) => {
                        let delta = sn as i64 * r as i64 - s as i64 * rn;
                        let rem = s as i64 - kk;
                        if rem >= 0 && rem % delta == 0 {
                            let l = rem / delta;
                            b -= tpow(tn.as_ref(), rn * l).unwrap() / t.pow((rn * l + 1) as i32) * &nu.q;
                        }
                    }
                }
            }
            Ordering::Greater => {
                let tn = t_of(nu);
                let rn = nu.r as i64;
                let delta = s as i64 * rn - nu.s().unwrap() as i64 * r as i64;
                let rem = s as i64 - kk;
                if rem > 0 && rem % delta == 0 {
                    let l = rem / delta;
                    b += t.pow((rn * l - 1) as i32) / tn.pow((rn * l) as i32) * &nu.q;
                }
            }
        }
    }
    Ok(v + &mu.q * b)
}

/// The closed-form value of `F_{g,n}[legs]` for (2g, n) in
/// {(0, 3), (1, 2), (2, 1)}.
pub fn closed_value(curve: &SpectralCurveLocal, g2: u32, n: u32, legs: &[Leg]) -> Result<Rational> {
    if !matches!((g2, n), (0, 3) | (1, 2) | (2, 1)) {
        return Err(Error::NotApplicable(format!("no closed form at (2g, n) = ({g2}, {n})")));
    }
    if legs.len() != n as usize {
        return Err(Error::Validation(format!("expected {n} legs, got {}", legs.len())));
    }
    require_shape(curve)?;
    let mut alphas = Vec::new();
    for l in legs {
        let a = curve
            .branch_of(l.0)
            .ok_or_else(|| Error::Validation(format!("unknown component {}", l.0)))?;
        if l.1 == 0 {
            return Err(Error::Validation("mode index must be positive".into()));
        }
        alphas.push(a);
    }
    if alphas.iter().any(|&a| a != alphas[0]) {
        return Ok(Rational::zero());
    }
    if g2 == 1 && !curve.crosscap {
        return Ok(Rational::zero());
    }
    require_symmetric(curve, alphas[0])?;
    let bp = &curve.branch_points[alphas[0]];
    match g2 {
        0 => f03(bp, legs),
        1 => Ok(f_half2(bp, legs[0], legs[1])),
        _ => f11(bp, legs[0]),
    }
}

/// (r^2 - 1) / (24 r t), the Q-independent part of `F_{1,1}[s]`.
pub fn f11_pure(r: u32, t: &Rational) -> Rational {
    let r = int(r as i64);
    (&r * &r - Rational::one()) / (int(24) * r * t)
}

/// Entries compared by [`check_closed_forms`] that disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormMismatch {
    pub g2: u32,
    pub legs: Vec<Leg>,
    pub engine: String,
    pub closed: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormReport {
    pub checked: usize,
    /// Entries with no closed form (`NotApplicable`).
    pub skipped: usize,
    pub mismatches: Vec<ClosedFormMismatch>,
    pub pass: bool,
}

fn leg_multisets(legs: &[Leg], n: usize) -> Vec<Vec<Leg>> {
    fn rec(legs: &[Leg], start: usize, n: usize, cur: &mut Vec<Leg>, out: &mut Vec<Vec<Leg>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..legs.len() {
            cur.push(legs[i]);
            rec(legs, i, n - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(legs, 0, n, &mut Vec::new(), &mut out);
    out
}

/// Compares every stored (0,3), (1/2,2) and (1,1) entry, plus one index of
/// margin per component, against the closed forms.
pub fn check_closed_forms(curve: &SpectralCurveLocal, store: &CorrelatorStore) -> Result<ClosedFormReport> {
    let legs: Vec<Leg> =
        curve.components().flat_map(|c| (1..=store.max_index(c.id) + 1).map(move |k| (c.id, k))).collect();
    let mut report = ClosedFormReport { checked: 0, skipped: 0, mismatches: Vec::new(), pass: true };
    for (g2, n) in [(0u32, 3u32), (1, 2), (2, 1)] {
        if g2 == 1 && !curve.crosscap {
            continue;
        }
        for l in leg_multisets(&legs, n as usize) {
            let closed = match closed_value(curve, g2, n, &l) {
                Ok(v) => v,
                Err(Error::NotApplicable(_)) => {
                    report.skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            report.checked += 1;
            let engine = store.get(g2, n, &l);
            if engine != closed {
                report.pass = false;
                report.mismatches.push(ClosedFormMismatch {
                    g2,
                    legs: l,
                    engine: format_rational(&engine),
                    closed: format_rational(&closed),
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::recursion::{run, EngineOptions};

    fn opts(force: bool) -> EngineOptions {
        EngineOptions { force, ..EngineOptions::default() }
    }

    fn compare(curve: &SpectralCurveLocal, force: bool) -> usize {
        let store = run(curve, 1, &opts(force)).unwrap().store;
        let report = check_closed_forms(curve, &store).unwrap();
        assert!(report.pass, "{:?}", report.mismatches);
        report.checked
    }

    fn bp(comps: Vec<Component>) -> SpectralCurveLocal {
        SpectralCurveLocal::new(vec![BranchPoint::new(0, comps)], &[], true).unwrap()
    }

    fn comp(id: u32, r: u32, s: u32, t: Rational, q: Rational) -> Component {
        Component::new(id, r, &[(s, -t * int(r as i64))]).with_q(q)
    }

    #[test]
    fn c_values() {
        assert_eq!(c_coefficient(4, 3).unwrap(), int(-1));
        assert_eq!(c_coefficient(5, 3).unwrap(), int(2));
        assert_eq!(c_coefficient(2, 3).unwrap(), int(1));
        assert!(matches!(c_coefficient(7, 5), Err(Error::NotSymmetricCase(_))));
    }

    #[test]
    fn c_matches_ell_and_ell_formula() {
        for s in 3..8u32 {
            for r in 1..30u32 {
                if num_integer::gcd(r, s) != 1 || !(r % s == 1 || r % s == s - 1) {
                    continue;
                }
                let c = c_coefficient(r, s).unwrap();
                for k2 in 1..s {
                    for k3 in 1..s - k2 {
                        let l = |k| ell(r, s, k).unwrap() as i64;
                        let k1 = (s - k2 - k3) as i64;
                        assert_eq!(&c * int(k1), int(l(k2) + l(k3) - r as i64 + 1), "r={r} s={s}");
                    }
                }
                for kk in 1..3 * r {
                    let l = ell(r, s, kk).unwrap() as i64;
                    let (k, ri) = (kk as i64, r as i64);
                    let alt = if r % s == 1 {
                        let rp = rprime(r, s, false);
                        k * rp - (k * rp).div_euclid(ri) * ri
                    } else {
                        let rp1 = rprime(r, s, true) + 1;
                        -k * rp1 + (k * rp1 + ri - 1).div_euclid(ri) * ri
                    };
                    assert_eq!(l, alt, "r={r} s={s} k={kk}");
                }
            }
        }
    }

    #[test]
    fn funny_sum_identity() {
        for r in 2..=8u32 {
            for s in 1..=2 * r + 2 {
                if num_integer::gcd(r, s) != 1 || !(s <= 2 || r % s == 1 || r % s == s - 1) {
                    continue;
                }
                let r6 = r as i64;
                assert_eq!(funny_sum(r, s).unwrap() * 6, -r6 * (r6 * r6 - 1), "r={r} s={s}");
            }
        }
    }

    #[test]
    fn airy_and_single_components() {
        let airy = SpectralCurveLocal::monomial(2, 3, rat(1, 2)).unwrap();
        assert_eq!(closed_value(&airy, 0, 3, &[(1, 1), (1, 1), (1, 1)]).unwrap(), int(1));
        assert_eq!(closed_value(&airy, 2, 1, &[(1, 3)]).unwrap(), rat(1, 8));
        let c53 = SpectralCurveLocal::monomial(5, 3, rat(3, 7)).unwrap();
        assert_eq!(closed_value(&c53, 0, 3, &[(1, 1), (1, 1), (1, 1)]).unwrap(), int(2) / (int(5) * rat(3, 7)));
        for r in 2..=5u32 {
            let t = rat(2, 3);
            let c = SpectralCurveLocal::monomial(r, r + 1, t.clone()).unwrap();
            assert_eq!(closed_value(&c, 2, 1, &[(1, r + 1)]).unwrap(), f11_pure(r, &t));
        }
        for (r, s, t) in [(2, 3, rat(1, 2)), (3, 4, rat(1, 3)), (4, 3, int(1)), (5, 3, int(1)), (3, 2, rat(2, 5))] {
            let c = SpectralCurveLocal::monomial(r, s, t).unwrap();
            assert!(compare(&c, false) > 0);
        }
    }

    #[test]
    fn exceptional_against_engine() {
        for r in 2..=3u32 {
            let q = int(3);
            let t = rat(1, 2);
            let c1 = comp(1, r, r + 1, t.clone(), q.clone());
            let c2 = Component::new(2, 1, &[]).with_q(-q.clone());
            let curve = bp(vec![c1, c2]);
            assert_eq!(closed_value(&curve, 1, 2, &[(1, 1), (2, 1)]).unwrap(), -&q / &t);
            assert!(compare(&curve, false) > 0);
        }
    }

    #[test]
    fn predictor_rejects() {
        let c = SpectralCurveLocal::monomial(7, 5, int(1)).unwrap();
        assert!(!predict_symmetry(&c)[0].items[0].pass);
        assert!(matches!(closed_value(&c, 0, 3, &[(1, 1), (1, 1), (1, 3)]), Err(Error::NotSymmetricCase(_))));
        let pair = bp(vec![comp(1, 7, 3, int(1), int(1)), comp(2, 4, 3, int(2), int(-1))]);
        assert!(!predict_symmetry(&pair)[0].items[2].pass);
    }

    #[test]
    fn multi_component_against_engine() {
        let curves = [
            bp(vec![comp(1, 5, 3, int(1), int(1)), comp(2, 4, 3, int(2), int(-1))]),
            bp(vec![comp(1, 3, 2, int(1), int(1)), comp(2, 3, 2, int(2), int(-1))]),
            bp(vec![comp(1, 3, 2, int(1), int(1)), comp(2, 1, 1, int(2), int(-1))]),
            bp(vec![comp(1, 4, 3, rat(2, 3), int(1)), comp(2, 3, 2, int(3), int(-1))]),
            bp(vec![comp(1, 4, 5, rat(1, 3), int(2)), Component::new(2, 1, &[]).with_q(int(-2))]),
            bp(vec![comp(1, 1, 2, int(1), int(1)), Component::new(2, 1, &[]).with_q(int(-1))]),
        ];
        for curve in &curves {
            assert!(crate::curve::classify(curve).admissible());
            assert!(predict_symmetry(curve)[0].all_pass);
            assert!(compare(curve, false) > 0);
        }
    }

    #[test]
    fn predictor_failure_shows_up_as_asymmetry() {
        let curves = [
            bp(vec![comp(1, 5, 3, rat(1, 2), int(1)), comp(2, 2, 1, int(3), int(-1))]),
            bp(vec![comp(1, 4, 5, rat(1, 3), int(1)), comp(2, 3, 4, int(2), int(-1))]),
        ];
        for curve in &curves {
            assert!(!predict_symmetry(curve)[0].all_pass);
            assert!(!run(curve, 1, &opts(true)).unwrap().asymmetries.is_empty());
        }
    }

    #[test]
    fn two_component_forced_q_zero() {
        let curve = bp(vec![comp(1, 7, 3, int(1), int(0)), comp(2, 4, 3, int(2), int(0))]);
        assert!(predict_symmetry(&curve)[0].all_pass);
        assert!(compare(&curve, true) > 0);
    }
}
