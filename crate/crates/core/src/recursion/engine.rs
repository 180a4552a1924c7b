//! The residue recursion, level by level in increasing Euler characteristic.
//!
//! For a home component `mu` the coefficients of `omega_{g,n+1}` with first
//! leg on `mu` are read off from
//! `F[(mu,k0); S] = -[zeta^(-1-k0)] sum_Z K_Z(zeta) W'_{g,|Z|+1,n}(Z + {zeta}; S)`,
//! where `Z` runs over non-empty subsets of the fiber other than the home
//! point and `K_Z = 1 / (prod_{p in Z} (y(p) - y(zeta)) (dx)^|Z|)`.
//!
//! Everything is exact; only the inverse kernel is a truncated series, and
//! its precision is chosen from a priori valuation bounds so that every
//! coefficient at or below `zeta^(-2)` is determined.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;

use super::assemble::Assembler;
use super::store::{canonical, CorrelatorStore, Level};
use crate::curve::{classify, Leg, SpectralCurveLocal};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, PuiseuxSeries, Rational};
use crate::forms::{zero, Frame};

#[derive(Clone, Debug)]
pub struct EngineOptions {
    /// Root-of-unity convention c: theta_nu = zeta_L^(c L / r_nu). Must be a unit mod L.
    pub galois: i64,
    /// Rayon worker count; 0 picks the default.
    pub workers: usize,
    /// Run on non-admissible curves and quarantine asymmetric output.
    pub force: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { galois: 1, workers: 0, force: false }
    }
}

/// A full leg multiset whose values depend on which leg was distinguished.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymmetryRecord {
    pub g2: u32,
    pub n: u32,
    pub legs: Vec<Leg>,
    pub values: Vec<(Leg, Rational)>,
}

impl AsymmetryRecord {
    fn to_error(&self) -> Error {
        Error::Asymmetric {
            g2: self.g2,
            n: self.n,
            legs: self.legs.clone(),
            values: self.values.iter().map(|(l, v)| format!("{l:?}: {}", format_rational(v))).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub store: CorrelatorStore,
    pub asymmetries: Vec<AsymmetryRecord>,
    /// True when asymmetric levels were stored anyway (forced runs only).
    pub quarantined: bool,
}

/// K_Z for the fiber points `z` (frame indices, home excluded), known below `target`.
pub fn kernel_factor(curve: &SpectralCurveLocal, frame: &Frame, z: &[usize], target: i64) -> Result<PuiseuxSeries> {
    let y0 = frame.y_at(curve, 0);
    let dx = frame.dx();
    let mut prod = PuiseuxSeries::monomial(frame.l, 0, crate::exactnum::CycloNumber::one(frame.l));
    for &p in z {
        let diff = frame.y_at(curve, p).sub(&y0);
        if diff.is_exact_zero() {
            return Err(Error::IdenticallyZero(frame.home));
        }
        prod = prod.mul(&diff)?.mul(&dx)?;
    }
    prod.inv(target)
}

/// Per-home data for one level.
struct HomeLevel {
    frame: Frame,
    kernels: Vec<(u64, PuiseuxSeries)>,
    /// Lower bound on any exponent of the integrand.
    vmin: i64,
}

fn target(l: u32) -> i64 {
    -2 * l as i64 + 1
}

fn max_index_map(curve: &SpectralCurveLocal, store: &CorrelatorStore) -> BTreeMap<u32, i64> {
    curve.components().map(|c| (c.id, store.max_index(c.id) as i64)).collect()
}

fn home_level(
    curve: &SpectralCurveLocal,
    kmax: &BTreeMap<u32, i64>,
    home: u32,
    galois: i64,
    max_z: usize,
    margin: i64,
) -> Result<HomeLevel> {
    let frame = Frame::new(curve, home, galois);
    let l = frame.l as i64;
    let beta = |p: usize| -l - kmax[&frame.component_of(p)] * frame.points[p].exp;
    let nf = frame.len();
    let mut kernels = Vec::new();
    let mut vmin = i64::MAX;
    for mask in 1u64..(1u64 << (nf - 1)) {
        let size = mask.count_ones() as usize;
        if size > max_z {
            continue;
        }
        let z: Vec<usize> = (0..nf - 1).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        let bound: i64 = beta(0) + z.iter().map(|&p| beta(p)).sum::<i64>();
        let k = kernel_factor(curve, &frame, &z, target(frame.l) - bound + margin)?;
        // A kernel starting above the truncation order never reaches a residue.
        let Some(lead) = k.min_exp() else { continue };
        vmin = vmin.min(lead + bound);
        kernels.push((mask << 1 | 1, k));
    }
    Ok(HomeLevel { frame, kernels, vmin })
}

/// All multisets of `n` candidate legs with total cost within `slack`.
fn spectator_sets(cands: &[(Leg, i64)], n: usize, slack: i64) -> Vec<Vec<Leg>> {
    fn rec(cands: &[(Leg, i64)], start: usize, n: usize, slack: i64, cur: &mut Vec<Leg>, out: &mut Vec<Vec<Leg>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..cands.len() {
            let (leg, cost) = cands[i];
            if cost > slack {
                continue;
            }
            cur.push(leg);
            rec(cands, i, n - 1, slack - cost, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(cands, 0, n, slack, &mut Vec::new(), &mut out);
    out
}

/// Values F[(home, k0); sp] for all k0, from one residue computation.
fn solve_task(
    curve: &SpectralCurveLocal,
    store: &CorrelatorStore,
    hl: &HomeLevel,
    g2: u32,
    sp: &[Leg],
) -> Result<Vec<(u32, Rational)>> {
    let frame = &hl.frame;
    let l = frame.l as i64;
    let t = target(frame.l);
    let mut asm = Assembler::new(curve, store, frame, true);
    let mut integrand = zero(frame);
    for (mask, k) in &hl.kernels {
        let m = mask.count_ones() as i64;
        let w = asm.w(*mask, sp, g2 as i64 - 2 * m)?;
        if w.is_exact_zero() {
            continue;
        }
        integrand = integrand.add(&k.mul_capped(&w, Some(t))?);
    }
    if let Some(tr) = integrand.trunc() {
        if tr < t {
            return Err(Error::TruncationUnderflow { exponent: t - 1, trunc: tr });
        }
    }
    let mut out = Vec::new();
    for (&e, c) in integrand.terms() {
        if e >= t {
            break;
        }
        if e % l != 0 {
            return Err(Error::NonSingleValued(e));
        }
        let k0 = -e / l - 1;
        debug_assert!(k0 >= 1);
        let v = -c.as_rational()?;
        if !v.is_zero() {
            out.push((k0 as u32, v));
        }
    }
    Ok(out)
}

/// Output of one recursion step.
#[derive(Clone, Debug)]
pub struct StepOutput {
    pub level: Level,
    pub asymmetries: Vec<AsymmetryRecord>,
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
        .install(f)
}

/// Computes level (g2, n) from the levels of smaller Euler characteristic.
pub fn tr_step(curve: &SpectralCurveLocal, store: &CorrelatorStore, g2: u32, n: u32, opts: &EngineOptions) -> Result<StepOutput> {
    assert!(n >= 1 && g2 as i64 - 2 + n as i64 > 0, "only stable levels are computed");
    if g2 % 2 == 1 && !curve.crosscap {
        return Ok(StepOutput { level: Level::new(), asymmetries: Vec::new() });
    }
    let mut margin = 0i64;
    loop {
        match step_with_margin(curve, store, g2, n, opts, margin) {
            Err(Error::TruncationUnderflow { .. }) if margin < 1 << 12 => {
                margin = if margin == 0 { 4 } else { 2 * margin };
            }
            other => return other,
        }
    }
}

fn step_with_margin(
    curve: &SpectralCurveLocal,
    store: &CorrelatorStore,
    g2: u32,
    n: u32,
    opts: &EngineOptions,
    margin: i64,
) -> Result<StepOutput> {
    let spect = (n - 1) as usize;
    let max_z = (g2 as usize + spect).saturating_sub(1);
    let kmax = max_index_map(curve, store);
    let homes: Vec<u32> = curve.components().map(|c| c.id).collect();
    let mut levels = BTreeMap::new();
    for &h in &homes {
        let bp = &curve.branch_points[curve.branch_of(h).unwrap()];
        if bp.r_total() < 2 || max_z == 0 {
            continue;
        }
        let margin = margin * bp.lcm() as i64;
        levels.insert(h, home_level(curve, &kmax, h, opts.galois, max_z, margin)?);
    }
    // Largest output index per home.
    let kout: BTreeMap<u32, i64> = homes
        .iter()
        .map(|h| {
            let v = levels.get(h).map_or(0, |hl| {
                let l = hl.frame.l as i64;
                if hl.vmin > -2 * l {
                    0
                } else {
                    (-l - hl.vmin).div_euclid(l)
                }
            });
            (*h, v)
        })
        .collect();
    let support: BTreeSet<Leg> = store.support();
    let mut tasks: Vec<(u32, Vec<Leg>)> = Vec::new();
    for (&h, hl) in &levels {
        let l = hl.frame.l as i64;
        let slack = (-2 * l).saturating_sub(hl.vmin);
        if slack < 0 {
            continue;
        }
        let bp = curve.branch_of(h).unwrap();
        let mut cands = Vec::new();
        for c in curve.components() {
            for k in 1..=kout[&c.id] {
                let leg = (c.id, k as u32);
                let cost = if support.contains(&leg) {
                    0
                } else if curve.branch_of(c.id) == Some(bp) {
                    (k + kmax[&c.id]) * (l * hl.frame.r_home as i64 / c.r as i64)
                } else {
                    continue;
                };
                cands.push((leg, cost));
            }
        }
        for sp in spectator_sets(&cands, spect, slack) {
            tasks.push((h, sp));
        }
    }
    let results: Vec<Result<Vec<(u32, Rational)>>> = with_pool(opts.workers, || {
        tasks
            .par_iter()
            .map(|(h, sp)| solve_task(curve, store, &levels[h], g2, sp))
            .collect()
    });
    let mut by_legs: BTreeMap<Vec<Leg>, BTreeMap<Leg, Rational>> = BTreeMap::new();
    for ((h, sp), res) in tasks.iter().zip(results) {
        for (k0, v) in res? {
            let mut full = sp.clone();
            full.push((*h, k0));
            by_legs.entry(canonical(&full)).or_default().insert((*h, k0), v);
        }
    }
    let mut level = Level::new();
    let mut asymmetries = Vec::new();
    for (legs, vals) in by_legs {
        let distinct: BTreeSet<Leg> = legs.iter().copied().collect();
        let values: Vec<(Leg, Rational)> = distinct
            .iter()
            .map(|leg| (*leg, vals.get(leg).cloned().unwrap_or_else(Rational::zero)))
            .collect();
        let first = values[0].1.clone();
        if values.iter().any(|(_, v)| *v != first) {
            let rec = AsymmetryRecord { g2, n, legs: legs.clone(), values };
            if !opts.force {
                return Err(rec.to_error());
            }
            asymmetries.push(rec);
        }
        if !first.is_zero() {
            level.insert(legs, first);
        }
    }
    Ok(StepOutput { level, asymmetries })
}

/// All levels with 0 < 2g - 2 + n <= chi_max.
pub fn run(curve: &SpectralCurveLocal, chi_max: u32, opts: &EngineOptions) -> Result<RunResult> {
    let report = classify(curve);
    if !report.admissible() && !opts.force {
        return Err(Error::NotAdmissible(report.to_string()));
    }
    let mut store = CorrelatorStore::new();
    let mut asymmetries = Vec::new();
    for chi in 1..=chi_max {
        for g2 in 0..=chi + 1 {
            let n = chi + 2 - g2;
            let out = tr_step(curve, &store, g2, n, opts)?;
            asymmetries.extend(out.asymmetries);
            store.insert_level(g2, n, out.level);
        }
    }
    let quarantined = !asymmetries.is_empty();
    Ok(RunResult { store, asymmetries, quarantined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{BranchPoint, Component};
    use crate::exactnum::{int, rat};

    #[test]
    fn airy_first_levels() {
        let c = SpectralCurveLocal::monomial(2, 3, rat(1, 2)).unwrap();
        let res = run(&c, 1, &EngineOptions::default()).unwrap();
        assert_eq!(res.store.get(0, 3, &[(1, 1), (1, 1), (1, 1)]), int(1));
        assert_eq!(res.store.get(2, 1, &[(1, 3)]), rat(1, 8));
        assert_eq!(res.store.level(0, 3).unwrap().len(), 1);
        assert_eq!(res.store.level(2, 1).unwrap().len(), 1);
    }

    #[test]
    fn airy_second_level_matches_witten_kontsevich() {
        // F[2d+1, ...] = <tau_d ...> prod (2d+1)!!.
        let c = SpectralCurveLocal::monomial(2, 3, rat(1, 2)).unwrap();
        let res = run(&c, 2, &EngineOptions::default()).unwrap();
        assert_eq!(res.store.get(0, 4, &[(1, 1), (1, 1), (1, 1), (1, 3)]), int(3));
        assert_eq!(res.store.get(2, 2, &[(1, 1), (1, 5)]), rat(5, 8));
        assert_eq!(res.store.get(2, 2, &[(1, 3), (1, 3)]), rat(3, 8));
    }

    #[test]
    fn exceptional_cross_term() {
        let q = rat(1, 1);
        let bp = BranchPoint::new(
            0,
            vec![Component::new(1, 2, &[(3, int(-1))]).with_q(q.clone()), Component::new(2, 1, &[]).with_q(-q)],
        );
        let c = SpectralCurveLocal::new(vec![bp], &[], true).unwrap();
        let res = run(&c, 1, &EngineOptions::default()).unwrap();
        assert_eq!(res.store.get(1, 2, &[(1, 1), (2, 1)]), int(-2));
    }
}
