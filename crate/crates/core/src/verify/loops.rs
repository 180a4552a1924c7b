//! Pole-order checks on the fiber-symmetrized correlator sums.
//!
//! `E^(i)(z0; S) = sum_{Z subset fiber(z0), |Z| = i} W_{g,i,n}(Z; S)`, built
//! from the unprimed partition sum, must satisfy
//! `E^(i) = O(zeta0^(-r_mu (d(i) - 1 - [i = 1])) (d zeta0 / zeta0)^i)`, and
//! `sum_i E^(i) (-omega_{0,1})^(r_alpha - i)` must vanish to order
//! `-1 + v_mu + (r_mu - 1)(r_alpha - 1)`.

use serde::Serialize;

use crate::curve::{mode_floor, vanishing_orders, BranchPoint, Leg, SpectralCurveLocal};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, PuiseuxSeries, Rational};
use crate::forms::{unstable_expansion, zero, Frame, Unstable};
use crate::recursion::{Assembler, CorrelatorStore};

/// Observed leading exponent (in zeta, None for zero) against the bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentBound {
    pub component: u32,
    pub observed: Option<String>,
    pub bound: i64,
    pub single_valued: bool,
    /// The observed exponent equals the bound.
    pub tight: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopEquationReport {
    pub branch_point: u32,
    /// None for the master combination.
    pub i: Option<u32>,
    pub g2: u32,
    pub n: u32,
    pub spectators: Vec<Leg>,
    pub components: Vec<ComponentBound>,
    pub pass: bool,
}

fn bp_of<'a>(curve: &'a SpectralCurveLocal, alpha: usize) -> Result<&'a BranchPoint> {
    curve
        .branch_points
        .get(alpha)
        .ok_or_else(|| Error::Validation(format!("no branch point at position {alpha}")))
}

/// E^(1..=r_alpha) for home component `mu`, as coefficient series of d zeta^i.
pub fn fiber_sums(
    curve: &SpectralCurveLocal,
    store: &CorrelatorStore,
    mu: u32,
    g2: u32,
    spectators: &[Leg],
    galois: i64,
) -> Result<Vec<PuiseuxSeries>> {
    let frame = Frame::new(curve, mu, galois);
    let mut sp = spectators.to_vec();
    sp.sort_unstable();
    let mut asm = Assembler::new(curve, store, &frame, false);
    sums_with(&mut asm, &frame, g2, &sp)
}

/// E^(1..=r_alpha) from an assembler that may be reused across spectator
/// sets; `sp` must be sorted.
fn sums_with(asm: &mut Assembler<'_>, frame: &Frame, g2: u32, sp: &[Leg]) -> Result<Vec<PuiseuxSeries>> {
    let nf = frame.len();
    let mut out = vec![zero(frame); nf];
    for mask in 1u64..(1u64 << nf) {
        let i = mask.count_ones() as usize;
        let w = asm.w(mask, sp, g2 as i64 - 2 * i as i64)?;
        out[i - 1] = out[i - 1].add(&w);
    }
    Ok(out)
}

/// sum_i E^(i) (-omega_{0,1})^(r_alpha - i).
fn master_total(sums: &[PuiseuxSeries], minus_y: &PuiseuxSeries, frame: &Frame) -> Result<PuiseuxSeries> {
    let ra = sums.len() as u32;
    let mut total = zero(frame);
    for i in 1..=ra {
        total = total.add(&sums[i as usize - 1].mul(&minus_y.pow(ra - i, None)?)?);
    }
    Ok(total)
}

fn observe(component: u32, series: &PuiseuxSeries, l: u32, bound: i64) -> ComponentBound {
    let single_valued = series.terms().all(|(e, _)| e % l as i64 == 0);
    let min = series.min_exp();
    ComponentBound {
        component,
        observed: min.map(|e| format_rational(&Rational::new(e.into(), l.into()))),
        bound,
        single_valued,
        tight: min == Some(bound * l as i64),
        pass: single_valued && min.is_none_or(|e| e >= bound * l as i64),
    }
}

/// The bound -r_mu (d(i) - 1 - [i = 1]) - i on the d zeta^i coefficient.
pub fn abstract_bound(bp: &BranchPoint, mu: u32, i: u32) -> Result<i64> {
    let r = bp.components[bp.position(mu).expect("component on branch point")].r as i64;
    Ok(-r * (mode_floor(bp, i)? - 1 - (i == 1) as i64) - i as i64)
}

/// -1 + v_mu + (r_mu - 1)(r_alpha - 1).
pub fn master_bound(bp: &BranchPoint, mu: u32) -> Result<i64> {
    let v = vanishing_orders(bp)?;
    let vo = v.iter().find(|x| x.component == mu).expect("component on branch point").order;
    let r = bp.components[bp.position(mu).unwrap()].r as i64;
    Ok(-1 + vo + (r - 1) * (bp.r_total() as i64 - 1))
}

/// p_mu(i): the gap between the abstract bound propagated through
/// omega_{0,1}^(r_alpha - i) and the master bound. None when s_mu is
/// infinite and i < r_alpha (the term is absent).
pub fn loop_gap(bp: &BranchPoint, mu: u32, i: u32) -> Result<Option<i64>> {
    let c = &bp.components[bp.position(mu).expect("component on branch point")];
    let ra = bp.r_total();
    let extra = match c.s() {
        Some(s) => (s as i64 - 1) * (ra - i) as i64,
        None if i == ra => 0,
        None => return Ok(None),
    };
    Ok(Some(abstract_bound(bp, mu, i)? + extra - master_bound(bp, mu)?))
}

pub fn check_abstract_loop(
    curve: &SpectralCurveLocal,
    store: &CorrelatorStore,
    alpha: usize,
    i: u32,
    g2: u32,
    n: u32,
    spectators: &[Leg],
    galois: i64,
) -> Result<LoopEquationReport> {
    let bp = bp_of(curve, alpha)?;
    assert!(i >= 1 && i <= bp.r_total(), "i out of range");
    assert_eq!(spectators.len(), n as usize);
    let mut components = Vec::new();
    for c in &bp.components {
        let sums = fiber_sums(curve, store, c.id, g2, spectators, galois)?;
        let bound = abstract_bound(bp, c.id, i)?;
        components.push(observe(c.id, &sums[i as usize - 1], bp.lcm(), bound));
    }
    let pass = components.iter().all(|c| c.pass);
    Ok(LoopEquationReport { branch_point: bp.id, i: Some(i), g2, n, spectators: spectators.to_vec(), components, pass })
}

pub fn check_master_loop(
    curve: &SpectralCurveLocal,
    store: &CorrelatorStore,
    alpha: usize,
    g2: u32,
    n: u32,
    spectators: &[Leg],
    galois: i64,
) -> Result<LoopEquationReport> {
    let bp = bp_of(curve, alpha)?;
    assert_eq!(spectators.len(), n as usize);
    let mut components = Vec::new();
    for c in &bp.components {
        let frame = Frame::new(curve, c.id, galois);
        let sums = fiber_sums(curve, store, c.id, g2, spectators, galois)?;
        let minus_y = frame.pull_form(0, &unstable_expansion(curve, Unstable::Omega01, c.id)).neg();
        let total = master_total(&sums, &minus_y, &frame)?;
        let bound = master_bound(bp, c.id)?;
        components.push(observe(c.id, &total, bp.lcm(), bound));
    }
    let pass = components.iter().all(|c| c.pass);
    Ok(LoopEquationReport { branch_point: bp.id, i: None, g2, n, spectators: spectators.to_vec(), components, pass })
}

/// Spectator multisets used by the loop suite: legs up to the largest stored
/// index plus `margin` on every component.
pub fn loop_spectator_sets(curve: &SpectralCurveLocal, store: &CorrelatorStore, n: usize, margin: u32) -> Vec<Vec<Leg>> {
    let legs: Vec<Leg> = curve
        .components()
        .flat_map(|c| (1..=store.max_index(c.id) + margin).map(move |k| (c.id, k)))
        .collect();
    let mut out = Vec::new();
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
    rec(&legs, 0, n, &mut Vec::new(), &mut out);
    out
}

/// Every abstract and master check with 0 < 2g - 2 + (n + 1) <= chi_max.
/// Reports come grouped by spectator set and branch point, abstract
/// checks in order of i followed by the master check.
pub fn loop_suite(curve: &SpectralCurveLocal, store: &CorrelatorStore, chi_max: u32, galois: i64) -> Result<Vec<LoopEquationReport>> {
    // One frame and one assembler per home component, shared by every
    // spectator set so that block expansions are computed once.
    let frames: Vec<Vec<(u32, Frame)>> = curve
        .branch_points
        .iter()
        .map(|bp| bp.components.iter().map(|c| (c.id, Frame::new(curve, c.id, galois))).collect())
        .collect();
    let mut ctx: Vec<Vec<(u32, &Frame, Assembler<'_>, PuiseuxSeries)>> = frames
        .iter()
        .map(|fs| {
            fs.iter()
                .map(|(id, frame)| {
                    let minus_y = frame.pull_form(0, &unstable_expansion(curve, Unstable::Omega01, *id)).neg();
                    (*id, frame, Assembler::new(curve, store, frame, false), minus_y)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for chi in 1..=chi_max {
        for g2 in 0..=chi + 1 {
            let n = chi + 1 - g2;
            if g2 % 2 == 1 && !curve.crosscap {
                continue;
            }
            for sp in loop_spectator_sets(curve, store, n as usize, 2) {
                for (alpha, comps) in ctx.iter_mut().enumerate() {
                    let bp = &curve.branch_points[alpha];
                    let ra = bp.r_total();
                    let mut abstract_rows: Vec<Vec<ComponentBound>> = vec![Vec::new(); ra as usize];
                    let mut master_row = Vec::new();
                    for (id, frame, asm, minus_y) in comps.iter_mut() {
                        let sums = sums_with(asm, frame, g2, &sp)?;
                        for i in 1..=ra {
                            let bound = abstract_bound(bp, *id, i)?;
                            abstract_rows[i as usize - 1].push(observe(*id, &sums[i as usize - 1], bp.lcm(), bound));
                        }
                        let total = master_total(&sums, minus_y, frame)?;
                        master_row.push(observe(*id, &total, bp.lcm(), master_bound(bp, *id)?));
                    }
                    let rows = abstract_rows.into_iter().enumerate().map(|(k, c)| (Some(k as u32 + 1), c));
                    for (i, components) in rows.chain(std::iter::once((None, master_row))) {
                        let pass = components.iter().all(|c| c.pass);
                        out.push(LoopEquationReport { branch_point: bp.id, i, g2, n, spectators: sp.clone(), components, pass });
                    }
                }
            }
        }
    }
    Ok(out)
}
