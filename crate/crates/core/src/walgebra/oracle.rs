//! Normal-form recursion for the single-cycle W(gl_r) Airy structure.
//!
//! After the dilaton shift `J_{-s} -> J_{-s} - r t` the mode
//! `r^(i-1) H_{i,k}` is brought to the form
//! `c (J_Pi - sum_{l,j} hbar^j / l! sum_q C^(j)[Pi | q] :J_q1 .. J_ql:)`
//! with `Pi = r k + s (i - 1)`; dividing out `c` (which is 1 at `t = 1/r`)
//! gives the normal form. The partition function coefficients then follow
//! from the standard sum over set partitions of the `q` slots.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::psi::psi;
use crate::error::{Error, Result};
use crate::exactnum::rational::pow;
use crate::exactnum::Rational;
use crate::recursion::{CorrelatorStore, Level};

/// Leg component used for every oracle entry.
pub const ORACLE_COMPONENT: u32 = 1;

fn factorial(n: u32) -> Rational {
    Rational::from_integer((1..=n).map(BigInt::from).product())
}

fn binom(n: u32, k: u32) -> Rational {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Row function of the descending partition attached to (r, s).
fn lambda_rows(r: u32, s: u32) -> Vec<u32> {
    let parts: Vec<u32> = if s == 1 {
        vec![r]
    } else if s == r + 1 {
        vec![1; r as usize]
    } else {
        let (rp, rpp) = (r / s, r % s);
        let mut v = vec![rp + 1; rpp as usize];
        v.extend(std::iter::repeat_n(rp, (s - rpp) as usize));
        v
    };
    let mut rows = Vec::new();
    for (idx, &p) in parts.iter().filter(|&&p| p > 0).enumerate() {
        rows.extend(std::iter::repeat_n(idx as u32 + 1, p as usize));
    }
    rows
}

/// The coefficients C^(j)[p1 | q] of a single-cycle normal form.
pub struct ModeCoefficientTable {
    pub r: u32,
    pub s: u32,
    pub t: Rational,
    rows: Vec<u32>,
    cache: HashMap<(u32, u32, Vec<i64>), Rational>,
    lead: HashMap<u32, Rational>,
}

impl ModeCoefficientTable {
    pub fn new(r: u32, s: u32, t: Rational) -> Result<Self> {
        let ok_residue = r % s == 1 % s || (r + 1) % s == 0;
        if r < 1 || s < 1 || s > r + 1 || r.gcd(&s) != 1 || !ok_residue || t.is_zero() {
            return Err(Error::NotNormalForm(format!("(r,s)=({r},{s}), t={t}")));
        }
        Ok(ModeCoefficientTable { r, s, t, rows: lambda_rows(r, s), cache: HashMap::new(), lead: HashMap::new() })
    }

    /// The mode (i, k) with Pi(i, k) = p1.
    pub fn mode_of(&self, p1: u32) -> Result<(u32, i64)> {
        let (r, s) = (self.r as i64, self.s as i64);
        for i in 1..=self.r {
            let rest = p1 as i64 - s * (i as i64 - 1);
            if rest.rem_euclid(r) == 0 {
                let k = rest.div_euclid(r);
                let kmin = 1 - self.rows[i as usize - 1] as i64 + (i == 1) as i64;
                if k < kmin {
                    return Err(Error::NotNormalForm(format!("index {p1} is not a mode")));
                }
                return Ok((i, k));
            }
        }
        Err(Error::NotNormalForm(format!("index {p1} is not a mode")))
    }

    /// Coefficient of hbar^j :J_q: in the shifted W_{i,k}, before normalisation.
    fn raw(&self, i: u32, k: i64, j: u32, q: &[i64]) -> Rational {
        let l = q.len() as u32;
        if 2 * j + l > i {
            return Rational::zero();
        }
        let lp = i - 2 * j - l;
        let (r, s) = (self.r as i64, self.s as i64);
        if q.iter().sum::<i64>() - s * lp as i64 != r * k {
            return Rational::zero();
        }
        let mut args = q.to_vec();
        args.extend(std::iter::repeat_n(-s, lp as usize));
        let rt = Rational::from_integer(BigInt::from(self.r)) * &self.t;
        let pref = factorial(i)
            / (pow(&Rational::from_integer(2.into()), j) * factorial(j) * factorial(i - 2 * j))
            * binom(i - 2 * j, l)
            * pow(&-rt, lp)
            / Rational::from_integer(BigInt::from(self.r));
        pref * psi(self.r, j, &args)
    }

    fn leading(&mut self, p1: u32) -> Result<Rational> {
        if let Some(c) = self.lead.get(&p1) {
            return Ok(c.clone());
        }
        let (i, k) = self.mode_of(p1)?;
        let c = self.raw(i, k, 0, &[p1 as i64]);
        if c.is_zero() {
            return Err(Error::NotNormalForm(format!("mode {p1} has no linear term")));
        }
        self.lead.insert(p1, c.clone());
        Ok(c)
    }

    /// C^(j)[p1 | q] (symmetric in q).
    pub fn coefficient(&mut self, p1: u32, j: u32, q: &[i64]) -> Result<Rational> {
        let mut key_q = q.to_vec();
        key_q.sort_unstable();
        let key = (p1, j, key_q);
        if let Some(c) = self.cache.get(&key) {
            return Ok(c.clone());
        }
        let (i, k) = self.mode_of(p1)?;
        let lead = self.leading(p1)?;
        let c = -factorial(q.len() as u32) * self.raw(i, k, j, q) / lead;
        self.cache.insert(key, c.clone());
        Ok(c)
    }
}

/// Set partitions of [0, n) as block lists.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            rec(i + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        rec(i + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

fn distinct_permutations(mut v: Vec<u32>) -> Vec<Vec<u32>> {
    v.sort_unstable();
    let mut out = vec![v.clone()];
    loop {
        let n = v.len();
        if n < 2 {
            return out;
        }
        let mut i = n - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        let mut j = n - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        out.push(v.clone());
    }
}

/// Ordered positive fillings `q_rho` of a stable block together with the value of F.
fn block_fillings(store: &CorrelatorStore, h: u32, nq: usize, spect: &[u32]) -> Vec<(Vec<u32>, Rational)> {
    let n = (nq + spect.len()) as u32;
    let Some(level) = store.level(2 * h, n) else { return Vec::new() };
    let mut sp: Vec<u32> = spect.to_vec();
    sp.sort_unstable();
    let mut out = Vec::new();
    for (legs, v) in level {
        let mut idx: Vec<u32> = legs.iter().map(|l| l.1).collect();
        let mut ok = true;
        for p in &sp {
            match idx.iter().position(|x| x == p) {
                Some(pos) => {
                    idx.remove(pos);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            for perm in distinct_permutations(idx) {
                out.push((perm, v.clone()));
            }
        }
    }
    out
}

/// Sorted n-tuples of positive integers with sum at most `bound`.
fn tuples(n: usize, bound: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, min: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        let mut x = min;
        while x * n as u32 <= left {
            cur.push(x);
            rec(n - 1, x, left - x, cur, out);
            cur.pop();
            x += 1;
        }
    }
    let mut out = Vec::new();
    rec(n, 1, bound, &mut Vec::new(), &mut out);
    out
}

/// F_{g,n}[p1, rest] from the normal-form recursion.
fn oracle_value(table: &mut ModeCoefficientTable, store: &CorrelatorStore, g: u32, p1: u32, rest: &[u32]) -> Result<Rational> {
    let r = table.r;
    let s = table.s as i64;
    let mut total = Rational::zero();
    for j in 0..=r / 2 {
        for l in 0..=(r - 2 * j) {
            if l + 2 * j < 2 {
                continue;
            }
            let qsum = p1 as i64 + s * (1 - 2 * j as i64 - l as i64);
            let fl = factorial(l);
            for rho in set_partitions(l as usize) {
                let nb = rho.len();
                if nb == 0 && !rest.is_empty() {
                    continue;
                }
                // Genus budget: l + j + sum (h - 1) = g.
                let hsum = g as i64 - l as i64 - j as i64 + nb as i64;
                if hsum < 0 {
                    continue;
                }
                // Distribute the labelled rest legs over the blocks.
                let mut assign = vec![0usize; rest.len()];
                loop {
                    let mut members: Vec<Vec<u32>> = vec![Vec::new(); nb];
                    for (m, &b) in assign.iter().enumerate() {
                        members[b].push(rest[m]);
                    }
                    total += distribute_genus(table, store, p1, j, l, qsum, &rho, &members, hsum as u32)? / &fl;
                    // Next assignment.
                    let mut pos = 0;
                    while pos < assign.len() {
                        assign[pos] += 1;
                        if assign[pos] < nb {
                            break;
                        }
                        assign[pos] = 0;
                        pos += 1;
                    }
                    if pos == assign.len() {
                        break;
                    }
                }
            }
        }
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn distribute_genus(
    table: &mut ModeCoefficientTable,
    store: &CorrelatorStore,
    p1: u32,
    j: u32,
    l: u32,
    qsum: i64,
    rho: &[Vec<usize>],
    members: &[Vec<u32>],
    hsum: u32,
) -> Result<Rational> {
    if rho.is_empty() {
        // l = 0: the empty product, only allowed with no further legs.
        if !members.is_empty() || hsum != 0 || qsum != 0 {
            return Ok(Rational::zero());
        }
        return table.coefficient(p1, j, &[]);
    }
    let nb = rho.len();
    let mut total = Rational::zero();
    let mut hs = vec![0u32; nb];
    loop {
        if hs.iter().sum::<u32>() == hsum {
            // Per-block options: ordered q values and factor.
            let mut options: Vec<Vec<(Vec<i64>, Rational)>> = Vec::with_capacity(nb);
            let mut empty = false;
            for b in 0..nb {
                let (nq, sp, h) = (rho[b].len(), &members[b], hs[b]);
                let opts: Vec<(Vec<i64>, Rational)> = if h == 0 && nq == 1 && sp.len() == 1 {
                    vec![(vec![-(sp[0] as i64)], Rational::from_integer(sp[0].into()))]
                } else if h == 0 && ((nq == 1 && sp.is_empty()) || (nq == 2 && sp.is_empty())) {
                    Vec::new()
                } else if 2 * h as i64 - 2 + (nq + sp.len()) as i64 <= 0 {
                    Vec::new()
                } else {
                    block_fillings(store, h, nq, sp)
                        .into_iter()
                        .map(|(q, v)| (q.into_iter().map(|x| x as i64).collect(), v))
                        .collect()
                };
                if opts.is_empty() {
                    empty = true;
                    break;
                }
                options.push(opts);
            }
            if !empty {
                let mut choice = vec![0usize; nb];
                loop {
                    let mut q = vec![0i64; l as usize];
                    let mut factor = Rational::one();
                    for b in 0..nb {
                        let (vals, f) = &options[b][choice[b]];
                        for (slot, &v) in rho[b].iter().zip(vals) {
                            q[*slot] = v;
                        }
                        factor *= f;
                    }
                    if q.iter().sum::<i64>() == qsum {
                        let c = table.coefficient(p1, j, &q)?;
                        if !c.is_zero() {
                            total += c * factor;
                        }
                    }
                    let mut pos = 0;
                    while pos < nb {
                        choice[pos] += 1;
                        if choice[pos] < options[pos].len() {
                            break;
                        }
                        choice[pos] = 0;
                        pos += 1;
                    }
                    if pos == nb {
                        break;
                    }
                }
            }
        }
        let mut pos = 0;
        while pos < nb {
            hs[pos] += 1;
            if hs[pos] <= hsum {
                break;
            }
            hs[pos] = 0;
            pos += 1;
        }
        if pos == nb {
            break;
        }
    }
    Ok(total)
}

/// All F_{g,n} with 0 < 2g - 2 + n <= chi_max, stored under component 1.
/// Every tuple with index sum up to `s (chi_max + 1)` is evaluated, so that
/// homogeneity is an output property rather than an input assumption.
pub fn airy_oracle_d1(r: u32, s: u32, t: Rational, chi_max: u32) -> Result<CorrelatorStore> {
    let mut table = ModeCoefficientTable::new(r, s, t)?;
    let bound = s * (chi_max + 1);
    let mut store = CorrelatorStore::new();
    for chi in 1..=chi_max {
        for g2 in 0..=chi + 1 {
            let n = chi + 2 - g2;
            if g2 % 2 == 1 {
                store.insert_level(g2, n, Level::new());
                continue;
            }
            let g = g2 / 2;
            let mut level = Level::new();
            for p in tuples(n as usize, bound) {
                let v = oracle_value(&mut table, &store, g, p[0], &p[1..])?;
                if !v.is_zero() {
                    level.insert(p.iter().map(|&k| (ORACLE_COMPONENT, k)).collect(), v);
                }
            }
            store.insert_level(g2, n, level);
        }
    }
    Ok(store)
}
