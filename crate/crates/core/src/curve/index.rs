//! Combinatorial index data attached to a branch point: the floors
//! d_alpha(i), the partition lambda and the vanishing orders v_mu of Y.

use std::cmp::min;

use num_integer::Integer;

use super::classify::{classify, Verdict};
use super::{BranchPoint, SpectralCurveLocal};
use crate::error::{Error, Result};

/// d_alpha(i) for i in [1, r_alpha]: write i = r_[lambda) + i' with
/// i' in [1, r_lambda]; then d = -floor(s_lambda (i'-1) / r_lambda) - s_[lambda) + [i' = 1].
pub fn mode_floor(bp: &BranchPoint, i: u32) -> Result<i64> {
    assert!(i >= 1 && i <= bp.r_total(), "i out of range");
    let mut before_r = 0u32;
    let mut before_s = 0i64;
    for c in &bp.components {
        if i <= before_r + c.r {
            let ip = (i - before_r) as i64;
            let head = match c.s() {
                Some(s) => Integer::div_floor(&(s as i64 * (ip - 1)), &(c.r as i64)),
                None if ip == 1 => 0,
                None => return Err(Error::InfiniteShift(c.id)),
            };
            return Ok(-head - before_s + (ip == 1) as i64);
        }
        before_r += c.r;
        before_s += c.s().ok_or(Error::InfiniteShift(c.id))? as i64;
    }
    unreachable!("i bounded by r_alpha")
}

/// The descending partition lambda of r_alpha, checked against the row
/// function lambda(i) = 1 - d(i) + [i = 1].
pub fn partition_profile(bp: &BranchPoint) -> Result<Vec<u32>> {
    let curve = SpectralCurveLocal {
        branch_points: vec![bp.clone()],
        f02: Default::default(),
        crosscap: false,
    };
    let report = classify(&curve);
    if report.branches[0].verdict == Verdict::NonAdmissible {
        return Err(Error::NotAdmissible(format!("branch point {}", bp.id)));
    }
    let comps = &bp.components;
    let mut parts: Vec<u32> = Vec::new();
    if let [c] = comps.as_slice() {
        let (r, s) = (c.r, c.s().expect("finite s"));
        if s == 1 {
            parts.push(r);
        } else if s == r + 1 {
            parts.extend(std::iter::repeat_n(1, r as usize));
        } else {
            let (rp, rpp) = (r / s, r % s);
            parts.extend(std::iter::repeat_n(rp + 1, rpp as usize));
            parts.extend(std::iter::repeat_n(rp, (s - rpp) as usize));
        }
    } else {
        let first = &comps[0];
        let s1 = first.s().expect("finite s");
        parts.extend(std::iter::repeat_n(first.r / s1 + 1, s1 as usize));
        for c in &comps[1..comps.len() - 1] {
            parts.push(c.r);
        }
        let last = comps.last().unwrap();
        if last.r != 1 {
            let sd = last.s().expect("finite s");
            parts.extend(std::iter::repeat_n(last.r / sd, sd as usize));
        }
    }
    parts.retain(|&p| p > 0);
    parts.sort_unstable_by(|a, b| b.cmp(a));
    // Cross-check against the floors.
    let mut cumulative = 0u32;
    let mut row = 0i64;
    let mut rows = Vec::new();
    for &p in &parts {
        row += 1;
        for _ in 0..p {
            rows.push(row);
        }
        cumulative += p;
    }
    if cumulative != bp.r_total() {
        return Err(Error::NotAdmissible(format!("partition of branch point {} has wrong size", bp.id)));
    }
    for (idx, &row) in rows.iter().enumerate() {
        let i = idx as u32 + 1;
        if row != 1 - mode_floor(bp, i)? + (i == 1) as i64 {
            return Err(Error::NotAdmissible(format!(
                "partition of branch point {} disagrees with the floor at i = {i}",
                bp.id
            )));
        }
    }
    Ok(parts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingOrder {
    pub component: u32,
    pub order: i64,
    pub leading_nonzero: bool,
}

/// v_mu = (r_mu - 1)(s_mu - r_mu) + sum_{nu != mu} (min(r_mu s_nu, r_nu s_mu) - r_mu r_nu),
/// with the first term read as 0 for the r = 1, s = infinity component.
pub fn vanishing_orders(bp: &BranchPoint) -> Result<Vec<VanishingOrder>> {
    let comps = &bp.components;
    let infinite: Vec<_> = comps.iter().filter(|c| c.s().is_none()).collect();
    if infinite.len() > 1 {
        return Err(Error::IdenticallyZero(infinite[0].id));
    }
    if let Some(c) = infinite.iter().find(|c| c.r > 1) {
        return Err(Error::IdenticallyZero(c.id));
    }
    let mut out = Vec::new();
    for mu in comps {
        let (rm, sm) = (mu.r as i64, mu.s().map(|s| s as i64));
        let mut v = match sm {
            Some(s) => (rm - 1) * (s - rm),
            None => 0,
        };
        let mut nonzero = match sm {
            Some(s) => rm.gcd(&s) == 1,
            None => true,
        };
        for nu in comps {
            if nu.id == mu.id {
                continue;
            }
            let rn = nu.r as i64;
            let m = match (sm, nu.s().map(|s| s as i64)) {
                (Some(a), Some(b)) => min(rm * b, rn * a),
                (Some(a), None) => rn * a,
                (None, Some(b)) => rm * b,
                (None, None) => unreachable!(),
            };
            v += m - rm * rn;
            if let (Some(a), Some(b), Some(tm), Some(tn)) = (sm, nu.s(), mu.t(), nu.t()) {
                if rm * b as i64 == rn * a {
                    use crate::exactnum::rational::pow;
                    if pow(&tm, nu.r) == pow(&tn, nu.r) {
                        nonzero = false;
                    }
                }
            }
        }
        out.push(VanishingOrder { component: mu.id, order: v, leading_nonzero: nonzero });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Component;
    use crate::exactnum::int;

    fn bp(types: &[(u32, Option<u32>)]) -> BranchPoint {
        let comps = types
            .iter()
            .enumerate()
            .map(|(i, &(r, s))| match s {
                Some(s) => Component::new(i as u32 + 1, r, &[(s, int(-(i as i64) - 1))]),
                None => Component::new(i as u32 + 1, r, &[]),
            })
            .collect();
        BranchPoint::new(0, comps)
    }

    #[test]
    fn floors() {
        let airy = bp(&[(2, Some(3))]);
        assert_eq!(mode_floor(&airy, 1).unwrap(), 1);
        assert_eq!(mode_floor(&airy, 2).unwrap(), -1);
        let exc = bp(&[(2, Some(3)), (1, None)]);
        assert_eq!(mode_floor(&exc, 3).unwrap(), -2);
        let r31 = bp(&[(3, Some(1))]);
        let v: Vec<i64> = (1..=3).map(|i| mode_floor(&r31, i).unwrap()).collect();
        assert_eq!(v, vec![1, 0, 0]);
        let bad = bp(&[(2, None), (1, Some(1))]);
        assert!(matches!(mode_floor(&bad, 3), Err(Error::InfiniteShift(1))));
    }

    #[test]
    fn partitions() {
        assert_eq!(partition_profile(&bp(&[(2, Some(3)), (1, None)])).unwrap(), vec![1, 1, 1]);
        assert_eq!(partition_profile(&bp(&[(4, Some(1))])).unwrap(), vec![4]);
        assert_eq!(partition_profile(&bp(&[(5, Some(3))])).unwrap(), vec![2, 2, 1]);
        assert_eq!(partition_profile(&bp(&[(4, Some(3))])).unwrap(), vec![2, 1, 1]);
        assert_eq!(partition_profile(&bp(&[(3, Some(4))])).unwrap(), vec![1, 1, 1]);
        assert_eq!(partition_profile(&bp(&[(5, Some(3)), (4, Some(3))])).unwrap(), vec![2, 2, 2, 1, 1, 1]);
        assert_eq!(
            partition_profile(&bp(&[(3, Some(2)), (1, Some(1)), (1, Some(2))])).unwrap(),
            vec![2, 2, 1]
        );
        assert!(partition_profile(&bp(&[(7, Some(5))])).is_err());
    }

    #[test]
    fn vanishing() {
        let v = vanishing_orders(&bp(&[(2, Some(3))])).unwrap();
        assert_eq!(v[0].order, 1);
        let v = vanishing_orders(&bp(&[(4, Some(3))])).unwrap();
        assert_eq!(v[0].order, -3);
        let v = vanishing_orders(&bp(&[(2, Some(3)), (1, None)])).unwrap();
        assert_eq!((v[0].order, v[1].order), (2, 1));
        assert!(v.iter().all(|x| x.leading_nonzero));
        assert!(matches!(vanishing_orders(&bp(&[(1, None), (1, None)])), Err(Error::IdenticallyZero(_))));
        let v = vanishing_orders(&bp(&[(6, Some(4))])).unwrap();
        assert!(!v[0].leading_nonzero);
    }

    /// The min-form of v_mu agrees with (s - r)(r_alpha - 1) - Delta_mu.
    #[test]
    fn delta_form_agrees() {
        for types in [
            vec![(5, Some(3)), (4, Some(3))],
            vec![(3, Some(2)), (1, Some(1)), (1, Some(2))],
            vec![(7, Some(3)), (4, Some(3))],
            vec![(2, Some(3))],
            vec![(5, Some(2)), (2, Some(1)), (1, Some(1)), (3, Some(2))],
        ] {
            let b = bp(&types);
            let ra = b.r_total() as i64;
            let v = vanishing_orders(&b).unwrap();
            let (mut rs, mut ss) = (0i64, 0i64);
            for (c, vo) in b.components.iter().zip(&v) {
                rs += c.r as i64;
                ss += c.s().unwrap() as i64;
                let (r, s) = (c.r as i64, c.s().unwrap() as i64);
                let delta = rs * s - ss * r;
                assert_eq!(vo.order, (s - r) * (ra - 1) - delta);
            }
        }
    }
}
