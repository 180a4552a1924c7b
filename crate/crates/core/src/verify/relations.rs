//! Dilaton, string and homogeneity identities on a computed store.
//!
//! All three need monomial `omega_{0,1}` on every component, the standard
//! polarization and no crosscap tail. They are applied one branch point at
//! a time with every leg at that branch point.

use num_traits::Zero;
use serde::Serialize;

use crate::curve::{BranchPoint, Leg, SpectralCurveLocal};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, int, Rational};
use crate::recursion::CorrelatorStore;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationFailure {
    pub g2: u32,
    pub n: u32,
    pub legs: Vec<Leg>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub relation: String,
    pub checked: usize,
    pub failures: Vec<RelationFailure>,
    pub pass: bool,
}

impl RelationReport {
    fn new(relation: &str) -> Self {
        RelationReport { relation: relation.into(), checked: 0, failures: Vec::new(), pass: true }
    }

    fn record(&mut self, g2: u32, n: u32, legs: &[Leg], lhs: Rational, rhs: Rational) {
        self.checked += 1;
        if lhs != rhs {
            self.pass = false;
            self.failures.push(RelationFailure {
                g2,
                n,
                legs: legs.to_vec(),
                lhs: format_rational(&lhs),
                rhs: format_rational(&rhs),
            });
        }
    }
}

fn require_shape(curve: &SpectralCurveLocal, what: &str) -> Result<()> {
    if !curve.components().all(|c| c.is_monomial()) {
        return Err(Error::ShapeMismatch(format!("{what} needs monomial omega_{{0,1}}")));
    }
    if !curve.has_standard_polarization() {
        return Err(Error::ShapeMismatch(format!("{what} needs the standard polarization")));
    }
    if curve.has_crosscap_tail() {
        return Err(Error::ShapeMismatch(format!("{what} needs a crosscap without tail")));
    }
    Ok(())
}

/// F_{g,n}[legs] including the unstable (0,2) and (1/2,1) levels.
fn value(curve: &SpectralCurveLocal, store: &CorrelatorStore, g2: u32, legs: &[Leg]) -> Rational {
    match (g2, legs) {
        (0, [a, b]) => curve.f02_value(*a, *b),
        (1, [a]) => curve
            .component(a.0)
            .and_then(|c| c.f_half1.get(&a.1).cloned())
            .unwrap_or_else(Rational::zero),
        (0, [] | [_]) | (2, []) => Rational::zero(),
        _ => store.get(g2, legs.len() as u32, legs),
    }
}

fn multisets(legs: &[Leg], n: usize) -> Vec<Vec<Leg>> {
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

fn legs_at(bp: &BranchPoint, store: &CorrelatorStore, extra: u32, only: Option<u32>) -> Vec<Leg> {
    bp.components
        .iter()
        .filter(|c| only.is_none_or(|id| id == c.id))
        .flat_map(|c| (1..=store.max_index(c.id) + extra).map(move |k| (c.id, k)))
        .collect()
}

/// Levels (g2, n) whose n+1 extension is stored.
fn lower_levels(store: &CorrelatorStore) -> Vec<(u32, u32)> {
    store.levels().map(|(&(g2, n1), _)| (g2, n1 - 1)).collect()
}

/// sum_mu t_mu F_{g,n+1}[(mu, s_mu), p] = sum_m p_m / r_m F_{g,n}[p]
/// + [g = 1, n = 0] sum_mu ((r_mu^2 - 1)/(24 r_mu) + Q_mu^2/(2 r_mu)).
pub fn check_dilaton(curve: &SpectralCurveLocal, store: &CorrelatorStore) -> Result<RelationReport> {
    require_shape(curve, "dilaton")?;
    let mut report = RelationReport::new("dilaton");
    for bp in &curve.branch_points {
        let legs = legs_at(bp, store, 1, None);
        let r_of = |id: u32| int(curve.component(id).unwrap().r as i64);
        let constant: Rational = bp
            .components
            .iter()
            .map(|c| {
                let r = int(c.r as i64);
                (&r * &r - int(1)) / (int(24) * &r) + &c.q * &c.q / (int(2) * &r)
            })
            .sum();
        for (g2, n) in lower_levels(store) {
            for p in multisets(&legs, n as usize) {
                let mut lhs = Rational::zero();
                for c in &bp.components {
                    let (Some(s), Some(t)) = (c.s(), c.t()) else { continue };
                    let mut full = p.clone();
                    full.push((c.id, s));
                    lhs += t * store.get(g2, n + 1, &full);
                }
                let weight: Rational = p.iter().map(|&(c, k)| int(k as i64) / r_of(c)).sum();
                let mut rhs = weight * value(curve, store, g2, &p);
                if g2 == 2 && n == 0 {
                    rhs += &constant;
                }
                report.record(g2, n + 1, &p, lhs, rhs);
            }
        }
    }
    Ok(report)
}

/// The component carrying the string insertion at a branch point: a single
/// (r, r+1) component, or (r, r+1) paired with (1, infinity).
fn string_component(bp: &BranchPoint) -> Option<u32> {
    match bp.components.as_slice() {
        [c] if c.s() == Some(c.r + 1) => Some(c.id),
        [c, e] if c.s() == Some(c.r + 1) && e.r == 1 && e.s().is_none() => Some(c.id),
        _ => None,
    }
}

/// r t F_{g,1+n}[1, p] = sum_m p_m F_{g,n}[.., p_m - r, ..]
/// + [g = 0, n = 2][p_1 + p_2 = r] p_1 p_2 + [g = 1/2, n = 1][p_1 = r] p_1 Q,
/// with entries at a non-positive index read as zero. The factors p_1 p_2
/// and p_1 on the source terms are those of the dxi_k normalization used by
/// the store.
pub fn check_string(curve: &SpectralCurveLocal, store: &CorrelatorStore) -> Result<RelationReport> {
    require_shape(curve, "string")?;
    let mut report = RelationReport::new("string");
    let mut any = false;
    for bp in &curve.branch_points {
        let Some(id) = string_component(bp) else { continue };
        any = true;
        let c = curve.component(id).unwrap();
        let r = c.r;
        let rt = int(r as i64) * c.t().unwrap();
        let legs = legs_at(bp, store, r, Some(id));
        for (g2, n) in lower_levels(store) {
            for p in multisets(&legs, n as usize) {
                let mut full = p.clone();
                full.push((id, 1));
                let lhs = &rt * store.get(g2, n + 1, &full);
                let mut rhs = Rational::zero();
                for m in 0..p.len() {
                    if p[m].1 > r {
                        let mut shifted = p.clone();
                        shifted[m].1 -= r;
                        rhs += int(p[m].1 as i64) * value(curve, store, g2, &shifted);
                    }
                }
                if g2 == 0 && n == 2 && p[0].1 + p[1].1 == r {
                    rhs += int(p[0].1 as i64 * p[1].1 as i64);
                }
                if g2 == 1 && n == 1 && p[0].1 == r {
                    rhs += int(r as i64) * &c.q;
                }
                report.record(g2, n + 1, &full, lhs, rhs);
            }
        }
    }
    if !any {
        return Err(Error::ShapeMismatch("no branch point of string type".into()));
    }
    Ok(report)
}

/// Nonzero entries with every leg on an (r, s) component of a one-component
/// branch point, or on the finite component of an exceptional one, satisfy
/// sum k = s (2g - 2 + n).
pub fn check_homogeneity(curve: &SpectralCurveLocal, store: &CorrelatorStore) -> Result<RelationReport> {
    require_shape(curve, "homogeneity")?;
    let mut report = RelationReport::new("homogeneity");
    let mut graded: Vec<(u32, u32)> = Vec::new();
    for bp in &curve.branch_points {
        match bp.components.as_slice() {
            [c] => graded.push((c.id, c.s().unwrap_or(0))),
            [c, e] if e.r == 1 && e.s().is_none() && c.s().is_some_and(|s| s == c.r + 1) => {
                graded.push((c.id, c.s().unwrap()))
            }
            _ => {}
        }
    }
    if graded.is_empty() {
        return Err(Error::ShapeMismatch("no graded branch point".into()));
    }
    for (&(g2, n), level) in store.levels() {
        for (legs, v) in level {
            let Some(&(_, s)) = graded.iter().find(|(id, _)| legs.iter().all(|l| l.0 == *id)) else {
                continue;
            };
            let total: i64 = legs.iter().map(|l| l.1 as i64).sum();
            let expected = s as i64 * (g2 as i64 - 2 + n as i64);
            // Record the degree as the compared quantity; a mismatch fails.
            let lhs = if v.is_zero() { int(expected) } else { int(total) };
            report.record(g2, n, legs, lhs, int(expected));
        }
    }
    Ok(report)
}
