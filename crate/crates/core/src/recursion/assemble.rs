//! Sums of products of correlators over set partitions of fiber points.
//!
//! `w(points, spectators, budget)` is the coefficient of
//! `prod_j d xi_{S_j}(w_j)` in the sum over set partitions of the chosen
//! fiber points into blocks, over distributions of the spectators into the
//! blocks and over block genera with `sum (g2_L - 2) = budget`, of the
//! product of `omega_{g_L, |L| + |N_L|}`. In primed mode blocks equal to
//! `omega_{0,1}` are excluded. Results are exact series of `d zeta^m` in
//! the home coordinate.

use std::collections::HashMap;

use num_bigint::BigInt;

use super::store::CorrelatorStore;
use crate::curve::{Leg, SpectralCurveLocal};
use crate::error::{Error, Result};
use crate::exactnum::{CycloNumber, PuiseuxSeries, Rational};
use crate::forms::{
    omega02_pair, omega02_spectator_coefficient, unstable_expansion, xi_expansion, zero, Frame, Unstable,
};

pub struct Assembler<'a> {
    curve: &'a SpectralCurveLocal,
    store: &'a CorrelatorStore,
    frame: &'a Frame,
    primed: bool,
    memo: HashMap<(u64, Vec<Leg>, i64), PuiseuxSeries>,
    blocks: HashMap<(u64, Vec<Leg>, u32), PuiseuxSeries>,
    xi: HashMap<(usize, Leg), PuiseuxSeries>,
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Sub-multisets of a sorted multiset, with the number of labelled subsets
/// realising each one.
fn sub_multisets(sp: &[Leg]) -> Vec<(Vec<Leg>, Vec<Leg>, u64)> {
    let mut groups: Vec<(Leg, u32)> = Vec::new();
    for &leg in sp {
        match groups.last_mut() {
            Some((l, c)) if *l == leg => *c += 1,
            _ => groups.push((leg, 1)),
        }
    }
    let mut out = vec![(Vec::new(), Vec::new(), 1u64)];
    for &(leg, c) in &groups {
        let mut next = Vec::with_capacity(out.len() * (c as usize + 1));
        for (taken, left, mult) in &out {
            for j in 0..=c {
                let mut t = taken.clone();
                let mut l = left.clone();
                t.extend(std::iter::repeat_n(leg, j as usize));
                l.extend(std::iter::repeat_n(leg, (c - j) as usize));
                next.push((t, l, mult * binomial(c, j)));
            }
        }
        out = next;
    }
    out
}

/// `a - b` for sorted multisets, None unless `b` is contained in `a`.
fn multiset_minus(a: &[Leg], b: &[Leg]) -> Option<Vec<Leg>> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for &x in a {
        if j < b.len() && b[j] == x {
            j += 1;
        } else {
            if j < b.len() && b[j] < x {
                return None;
            }
            out.push(x);
        }
    }
    (j == b.len()).then_some(out)
}

fn next_permutation(v: &mut [Leg]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl<'a> Assembler<'a> {
    pub fn new(curve: &'a SpectralCurveLocal, store: &'a CorrelatorStore, frame: &'a Frame, primed: bool) -> Self {
        Assembler {
            curve,
            store,
            frame,
            primed,
            memo: HashMap::new(),
            blocks: HashMap::new(),
            xi: HashMap::new(),
        }
    }

    fn one(&self) -> PuiseuxSeries {
        PuiseuxSeries::monomial(self.frame.l, 0, CycloNumber::one(self.frame.l))
    }

    /// d xi_leg pulled back to fiber point p.
    fn xi_at(&mut self, p: usize, leg: Leg) -> PuiseuxSeries {
        if let Some(s) = self.xi.get(&(p, leg)) {
            return s.clone();
        }
        let local = xi_expansion(self.curve, leg, self.frame.component_of(p));
        let s = self.frame.pull_form(p, &local);
        self.xi.insert((p, leg), s.clone());
        s
    }

    /// The partition sum; `sp` must be sorted.
    pub fn w(&mut self, pts: u64, sp: &[Leg], budget: i64) -> Result<PuiseuxSeries> {
        if pts == 0 {
            return Ok(if sp.is_empty() && budget == 0 { self.one() } else { zero(self.frame) });
        }
        let np = pts.count_ones() as i64;
        // Every block has g2 >= 0; primed blocks also have Euler characteristic >= 0.
        if budget < -2 * np || (self.primed && budget + np + (sp.len() as i64) < 0) {
            return Ok(zero(self.frame));
        }
        let key = (pts, sp.to_vec(), budget);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let a = pts.trailing_zeros();
        let rest = pts & !(1u64 << a);
        let splits = sub_multisets(sp);
        let mut acc = zero(self.frame);
        let mut sub = rest;
        loop {
            let bmask = sub | 1u64 << a;
            let rem = rest & !sub;
            let nrest = rem.count_ones() as i64;
            for (taken, left, mult) in &splits {
                if rem == 0 && !left.is_empty() {
                    continue;
                }
                // The tail needs sum (g2 - 2) >= -2 nrest, and in primed mode
                // also Euler characteristic >= 0; this keeps every block
                // below the level being computed.
                let room = if self.primed { (2 * nrest).min(nrest + left.len() as i64) } else { 2 * nrest };
                let hi = budget + 2 + room;
                let lo = if rem == 0 { hi } else { 0 };
                for g2b in lo.max(0)..=hi {
                    let block = self.block(bmask, taken, g2b as u32)?;
                    if block.is_exact_zero() {
                        continue;
                    }
                    let tail = self.w(rem, left, budget - (g2b - 2))?;
                    if tail.is_exact_zero() {
                        continue;
                    }
                    let mut term = block.mul(&tail)?;
                    if *mult != 1 {
                        term = term.scale_rational(&Rational::from_integer(BigInt::from(*mult)));
                    }
                    acc = acc.add(&term);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        self.memo.insert(key, acc.clone());
        Ok(acc)
    }

    /// omega_{g2/2, |B| + |N|} with the spectator legs N extracted.
    fn block(&mut self, bmask: u64, sp: &[Leg], g2: u32) -> Result<PuiseuxSeries> {
        if g2 % 2 == 1 && !self.curve.crosscap {
            return Ok(zero(self.frame));
        }
        let key = (bmask, sp.to_vec(), g2);
        if let Some(v) = self.blocks.get(&key) {
            return Ok(v.clone());
        }
        let pts: Vec<usize> = bits(bmask).collect();
        let (nb, ns) = (pts.len(), sp.len());
        let chi = g2 as i64 - 2 + (nb + ns) as i64;
        let value = match (g2, nb, ns) {
            (0, 1, 0) => {
                if self.primed {
                    zero(self.frame)
                } else {
                    let mu = self.frame.component_of(pts[0]);
                    self.frame
                        .pull_form(pts[0], &unstable_expansion(self.curve, Unstable::Omega01, mu))
                }
            }
            (0, 2, 0) => omega02_pair(self.curve, self.frame, pts[0], pts[1])?,
            (0, 1, 1) => omega02_spectator_coefficient(self.frame, pts[0], sp[0]),
            (1, 1, 0) => {
                let mu = self.frame.component_of(pts[0]);
                self.frame
                    .pull_form(pts[0], &unstable_expansion(self.curve, Unstable::OmegaHalf1, mu))
            }
            _ if chi > 0 => self.stable_block(&pts, sp, g2)?,
            _ => zero(self.frame),
        };
        self.blocks.insert(key, value.clone());
        Ok(value)
    }

    fn stable_block(&mut self, pts: &[usize], sp: &[Leg], g2: u32) -> Result<PuiseuxSeries> {
        let n = (pts.len() + sp.len()) as u32;
        let store = self.store;
        let level = store.level(g2, n).ok_or(Error::MissingLevel { g2, n })?;
        let mut acc = zero(self.frame);
        for (legs, value) in level {
            let Some(mut rem) = multiset_minus(legs, sp) else { continue };
            loop {
                let mut prod = self.one();
                for (&p, &leg) in pts.iter().zip(&rem) {
                    let x = self.xi_at(p, leg);
                    if x.is_exact_zero() {
                        prod = zero(self.frame);
                        break;
                    }
                    prod = prod.mul(&x)?;
                }
                if !prod.is_exact_zero() {
                    acc = acc.add(&prod.scale_rational(value));
                }
                if !next_permutation(&mut rem) {
                    break;
                }
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_helpers() {
        let sp = vec![(1, 1), (1, 1), (1, 2)];
        let subs = sub_multisets(&sp);
        assert_eq!(subs.len(), 6);
        let total: u64 = subs.iter().map(|s| s.2).sum();
        assert_eq!(total, 8);
        assert_eq!(multiset_minus(&sp, &[(1, 1)]), Some(vec![(1, 1), (1, 2)]));
        assert_eq!(multiset_minus(&sp, &[(1, 3)]), None);
        assert_eq!(multiset_minus(&sp, &[(1, 0)]), None);
        let mut v = vec![(1, 1), (1, 1), (1, 2)];
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 3);
    }
}
