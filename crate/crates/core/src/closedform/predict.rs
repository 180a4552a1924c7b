//! Necessary conditions for symmetric low correlators, evaluated literally
//! on each branch point. The (1, infinity) component counts as
//! `r = 1 mod s` with floor 0 and s > 2.

use std::cmp::Ordering;

use num_traits::Zero;
use serde::Serialize;

use crate::curve::{ratio_cmp, BranchPoint, Component, SpectralCurveLocal};
use crate::exactnum::Rational;

/// Residue class of r modulo s: +1, -1, both (s <= 2) or neither.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Class {
    pub plus: bool,
    pub minus: bool,
}

pub(crate) fn class(c: &Component) -> Class {
    match c.s() {
        None => Class { plus: true, minus: false },
        Some(s) => {
            let m = c.r % s;
            Class { plus: m == 1 % s, minus: m == (s - 1) % s }
        }
    }
}

/// floor(r / s), zero for s = infinity.
pub(crate) fn floor_ratio(c: &Component) -> u32 {
    c.s().map_or(0, |s| c.r / s)
}

/// ceil(r / s), zero for s = infinity.
pub(crate) fn ceil_ratio(c: &Component) -> u32 {
    c.s().map_or(0, |s| c.r.div_ceil(s))
}

/// s > 2, with s = infinity included.
pub(crate) fn s_above(c: &Component, bound: u32) -> bool {
    c.s().is_none_or(|s| s > bound)
}

/// t^e with the convention that t^0 = 1 even when t is undefined.
pub(crate) fn tpow(t: Option<&Rational>, e: i64) -> Option<Rational> {
    if e == 0 {
        return Some(Rational::from_integer(1.into()));
    }
    let t = t?;
    if t.is_zero() {
        return (e > 0).then(Rational::zero);
    }
    Some(t.pow(e as i32))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ItemVerdict {
    /// 1..=5 for the symmetry items, 6 for the three-equal-ratio obstruction.
    pub item: u8,
    pub pass: bool,
    pub offending: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryPrediction {
    pub branch_point: u32,
    pub items: Vec<ItemVerdict>,
    pub all_pass: bool,
}

fn verdict(item: u8, offending: Vec<(u32, u32)>) -> ItemVerdict {
    ItemVerdict { item, pass: offending.is_empty(), offending }
}

fn predict_bp(bp: &BranchPoint) -> SymmetryPrediction {
    let comps = &bp.components;
    let pairs = || {
        comps
            .iter()
            .enumerate()
            .flat_map(move |(i, a)| comps.iter().skip(i + 1).map(move |b| (a, b)))
    };
    let mut items = Vec::new();

    // (1) r = +-1 mod s.
    let off: Vec<_> = comps
        .iter()
        .filter(|c| {
            let k = class(c);
            !(k.plus || k.minus)
        })
        .map(|c| (c.id, c.id))
        .collect();
    items.push(verdict(1, off));

    // (2) two components with s > 2 in the same class need distinct floors.
    let off: Vec<_> = pairs()
        .filter(|(a, b)| {
            let (ka, kb) = (class(a), class(b));
            s_above(a, 2)
                && s_above(b, 2)
                && ((ka.plus && kb.plus) || (ka.minus && kb.minus))
                && floor_ratio(a) == floor_ratio(b)
        })
        .map(|(a, b)| (a.id, b.id))
        .collect();
    items.push(verdict(2, off));

    // (3) and (4): Q sums below mu and the s = 1 neighbours.
    let mut off3 = Vec::new();
    let mut off4 = Vec::new();
    for mu in comps.iter().filter(|c| c.s().is_some_and(|s| s > 2)) {
        let s = mu.s().unwrap() as i64;
        let k = class(mu);
        let below: Rational = comps
            .iter()
            .filter(|nu| nu.id != mu.id && ratio_cmp(mu, nu) == Ordering::Greater)
            .map(|nu| nu.q.clone())
            .sum();
        let tm = mu.t();
        let neighbour_sums = |target: u32, up: bool| -> bool {
            (1..=s - 3).all(|l| {
                let total: Rational = comps
                    .iter()
                    .filter(|nu| nu.id != mu.id && nu.s() == Some(1) && nu.r == target)
                    .map(|nu| {
                        let e = nu.r as i64 * l;
                        let ratio = if up {
                            tpow(nu.t().as_ref(), e).unwrap() / tpow(tm.as_ref(), e).unwrap()
                        } else {
                            tpow(tm.as_ref(), e).unwrap() / tpow(nu.t().as_ref(), e).unwrap()
                        };
                        &nu.q * ratio
                    })
                    .sum();
                total.is_zero()
            })
        };
        if k.plus && !(below.is_zero() && neighbour_sums(floor_ratio(mu), true)) {
            off3.push((mu.id, mu.id));
        }
        if k.minus && !((&mu.q + &below).is_zero() && neighbour_sums(ceil_ratio(mu), false)) {
            off4.push((mu.id, mu.id));
        }
    }
    items.push(verdict(3, off3));
    items.push(verdict(4, off4));

    // (5) a -1 class and a +1 class component with equal floors and s > 1
    // carry opposite charges.
    let mut off5 = Vec::new();
    for a in comps {
        for b in comps {
            if a.id == b.id || !s_above(a, 1) || !s_above(b, 1) {
                continue;
            }
            if class(a).minus && class(b).plus && floor_ratio(a) == floor_ratio(b) && a.q != -b.q.clone() {
                let key = (a.id.min(b.id), a.id.max(b.id));
                if !off5.contains(&key) {
                    off5.push(key);
                }
            }
        }
    }
    items.push(verdict(5, off5));

    // Three components of equal ratio with s >= 2 spoil omega_{0,4}.
    let mut off6 = Vec::new();
    for (i, a) in comps.iter().enumerate() {
        let same: Vec<_> = comps[i..]
            .iter()
            .filter(|b| ratio_cmp(a, b) == Ordering::Equal && b.s().is_some_and(|s| s >= 2))
            .collect();
        if same.len() >= 3 && a.s().is_some_and(|s| s >= 2) && !off6.iter().any(|&(x, _)| x == a.id) {
            off6.push((same[0].id, same[1].id));
        }
    }
    items.push(verdict(6, off6));

    let all_pass = items.iter().all(|i| i.pass);
    SymmetryPrediction { branch_point: bp.id, items, all_pass }
}

/// One prediction per branch point.
pub fn predict_symmetry(curve: &SpectralCurveLocal) -> Vec<SymmetryPrediction> {
    curve.branch_points.iter().map(predict_bp).collect()
}
