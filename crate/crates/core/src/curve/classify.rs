//! Admissibility classification of branch points.

use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use super::{ratio_cmp, BranchPoint, Component, SpectralCurveLocal};
use crate::exactnum::{format_rational, rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Regular,
    Irregular,
    Exceptional,
    NonAdmissible,
}

/// A violated admissibility condition. Component ids are carried along.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// Two components with y identically zero.
    TwoInfiniteOrders(u32, u32),
    /// y identically zero on a ramified component.
    InfiniteOrderRamified(u32),
    /// Equal r/s and t_mu^(r_nu) = t_nu^(r_nu): leading term of Y cancels.
    EqualRatioCollision(u32, u32),
    /// gcd(r, s) > 1: leading term of Y cancels.
    NotCoprime(u32),
    /// r > 1 but y has no pole (s >= r).
    MissingPole(u32),
    /// Equal (r, s) with t_mu^r = t_nu^r.
    EqualTypeSameT(u32, u32),
    /// Single component with r != +-1 mod s.
    ResidueClass(u32),
    /// No extremal pair mu+ (r = -1 mod s), mu- (r = 1 mod s) framing the
    /// other components.
    NoExtremalPair,
    /// No component with r = -1 mod s besides the exceptional one.
    NoPlusComponent,
    /// A component other than mu+ violates s = 1 and r+/s+ >= r.
    MiddleComponent(u32),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::TwoInfiniteOrders(a, b) => {
                write!(f, "components {a} and {b} both have y = 0 (kernel denominator vanishes)")
            }
            Condition::InfiniteOrderRamified(a) => {
                write!(f, "component {a} has y = 0 and r > 1 (kernel denominator vanishes)")
            }
            Condition::EqualRatioCollision(a, b) => {
                write!(f, "components {a}, {b} have equal r/s and colliding t powers")
            }
            Condition::NotCoprime(a) => write!(f, "component {a} has gcd(r, s) > 1"),
            Condition::MissingPole(a) => write!(f, "component {a} has r > 1 but s >= r"),
            Condition::EqualTypeSameT(a, b) => {
                write!(f, "components {a}, {b} have equal (r, s) and equal t^r")
            }
            Condition::ResidueClass(a) => write!(f, "component {a} has r != +-1 mod s"),
            Condition::NoExtremalPair => write!(f, "no (mu+, mu-) pair frames the other components"),
            Condition::NoPlusComponent => write!(f, "no component with r = -1 mod s"),
            Condition::MiddleComponent(a) => {
                write!(f, "component {a} must have s = 1 and r <= r+/s+")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentType {
    pub id: u32,
    pub r: u32,
    pub s: Option<u32>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub t: Option<Rational>,
    pub gcd: Option<u32>,
}

fn ser_opt_rational<S: serde::Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(q) => s.serialize_some(&format_rational(q)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchReport {
    pub branch_point: u32,
    pub verdict: Verdict,
    pub failed: Vec<Condition>,
    pub components: Vec<ComponentType>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub branches: Vec<BranchReport>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.branches.iter().all(|b| b.verdict != Verdict::NonAdmissible)
    }
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.branches {
            let types: Vec<String> = b
                .components
                .iter()
                .map(|c| {
                    let s = c.s.map_or("inf".to_string(), |s| s.to_string());
                    match &c.t {
                        Some(t) => format!("({},{},{})", c.r, s, format_rational(t)),
                        None => format!("({},{})", c.r, s),
                    }
                })
                .collect();
            let label = if types.len() == 1 { "(r,s,t)=" } else { "types " };
            writeln!(f, "{:?}; {}{}", b.verdict, label, types.join(","))?;
            for c in &b.failed {
                writeln!(f, "  failed: {c}")?;
            }
        }
        Ok(())
    }
}

fn is_minus_one_mod(r: u32, s: u32) -> bool {
    (r + 1) % s == 0
}

fn is_plus_one_mod(r: u32, s: u32) -> bool {
    s == 1 || r % s == 1
}

fn t_pow(c: &Component, e: u32) -> Option<Rational> {
    c.t().map(|t| rational::pow(&t, e))
}

/// Conditions under which the leading coefficient of Y vanishes, or Y
/// vanishes identically.
fn vanishing_pathologies(bp: &BranchPoint) -> Vec<Condition> {
    let mut out = Vec::new();
    let comps = &bp.components;
    let infinite: Vec<&Component> = comps.iter().filter(|c| c.s().is_none()).collect();
    for (i, a) in infinite.iter().enumerate() {
        for b in infinite.iter().skip(i + 1) {
            out.push(Condition::TwoInfiniteOrders(a.id, b.id));
        }
    }
    for c in &infinite {
        if c.r > 1 {
            out.push(Condition::InfiniteOrderRamified(c.id));
        }
    }
    for (i, a) in comps.iter().enumerate() {
        for b in comps.iter().skip(i + 1) {
            if a.s().is_none() || b.s().is_none() || ratio_cmp(a, b).is_ne() {
                continue;
            }
            if t_pow(a, b.r) == t_pow(b, b.r) || t_pow(b, a.r) == t_pow(a, a.r) {
                out.push(Condition::EqualRatioCollision(a.id, b.id));
            }
        }
    }
    for c in comps {
        if let Some(s) = c.s() {
            if c.r.gcd(&s) > 1 {
                out.push(Condition::NotCoprime(c.id));
            }
        }
    }
    out
}

fn equal_type_checks(comps: &[&Component], out: &mut Vec<Condition>) {
    for (i, a) in comps.iter().enumerate() {
        for b in comps.iter().skip(i + 1) {
            if a.r == b.r && a.s() == b.s() && a.s().is_some() && t_pow(a, a.r) == t_pow(b, b.r) {
                out.push(Condition::EqualTypeSameT(a.id, b.id));
            }
        }
    }
}

fn ratio_ge_int(c: &Component, r: u32) -> bool {
    let s = c.s().expect("finite s");
    c.r >= r * s
}

fn int_ge_ratio(r: u32, c: &Component) -> bool {
    match c.s() {
        Some(s) => r * s >= c.r,
        None => true,
    }
}

fn irregular_failures(bp: &BranchPoint) -> Vec<Condition> {
    let mut out = Vec::new();
    let comps: Vec<&Component> = bp.components.iter().collect();
    for c in &comps {
        if c.r > 1 && c.s().is_some_and(|s| s >= c.r) {
            out.push(Condition::MissingPole(c.id));
        }
    }
    equal_type_checks(&comps, &mut out);
    if let [c] = comps.as_slice() {
        let s = c.s().expect("finite s");
        if !(is_plus_one_mod(c.r, s) || is_minus_one_mod(c.r, s)) {
            out.push(Condition::ResidueClass(c.id));
        }
        return out;
    }
    let framed = comps.iter().enumerate().any(|(ip, p)| {
        comps.iter().enumerate().any(|(im, m)| {
            if ip == im {
                return false;
            }
            let (sp, sm) = (p.s().unwrap(), m.s().unwrap());
            is_minus_one_mod(p.r, sp)
                && is_plus_one_mod(m.r, sm)
                && ratio_cmp(p, m).is_ge()
                && comps.iter().enumerate().all(|(i, c)| {
                    i == ip
                        || i == im
                        || (c.s() == Some(1) && ratio_ge_int(p, c.r) && int_ge_ratio(c.r, m))
                })
        })
    });
    if !framed {
        out.push(Condition::NoExtremalPair);
    }
    out
}

fn exceptional_failures(bp: &BranchPoint) -> Vec<Condition> {
    let mut out = Vec::new();
    let others: Vec<&Component> = bp.components.iter().filter(|c| c.s().is_some()).collect();
    equal_type_checks(&others, &mut out);
    let candidates: Vec<&&Component> =
        others.iter().filter(|c| is_minus_one_mod(c.r, c.s().unwrap())).collect();
    if candidates.is_empty() {
        out.push(Condition::NoPlusComponent);
        return out;
    }
    let mut best: Option<Vec<Condition>> = None;
    for p in candidates {
        let bad: Vec<Condition> = others
            .iter()
            .filter(|c| c.id != p.id && !(c.s() == Some(1) && ratio_ge_int(p, c.r)))
            .map(|c| Condition::MiddleComponent(c.id))
            .collect();
        if best.as_ref().is_none_or(|b| bad.len() < b.len()) {
            best = Some(bad);
        }
    }
    out.extend(best.unwrap_or_default());
    out
}

fn classify_branch(bp: &BranchPoint) -> BranchReport {
    let mut failed = vanishing_pathologies(bp);
    let has_infinite = bp.components.iter().any(|c| c.s().is_none());
    let class = if has_infinite {
        if failed.is_empty() {
            failed.extend(exceptional_failures(bp));
        }
        Verdict::Exceptional
    } else if bp.components.len() == 1 && bp.components[0].s() == Some(bp.components[0].r + 1) {
        Verdict::Regular
    } else {
        failed.extend(irregular_failures(bp));
        Verdict::Irregular
    };
    let mut dedup = Vec::new();
    for c in failed {
        if !dedup.contains(&c) {
            dedup.push(c);
        }
    }
    BranchReport {
        branch_point: bp.id,
        verdict: if dedup.is_empty() { class } else { Verdict::NonAdmissible },
        failed: dedup,
        components: bp
            .components
            .iter()
            .map(|c| ComponentType {
                id: c.id,
                r: c.r,
                s: c.s(),
                t: c.t(),
                gcd: c.s().map(|s| c.r.gcd(&s)),
            })
            .collect(),
    }
}

pub fn classify(curve: &SpectralCurveLocal) -> AdmissibilityReport {
    AdmissibilityReport { branches: curve.branch_points.iter().map(classify_branch).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{BranchPoint, Component, SpectralCurveLocal};
    use crate::exactnum::int;

    fn single(r: u32, s: u32) -> SpectralCurveLocal {
        SpectralCurveLocal::monomial(r, s, int(1)).unwrap()
    }

    fn multi(types: &[(u32, Option<u32>, i64)]) -> SpectralCurveLocal {
        let comps = types
            .iter()
            .enumerate()
            .map(|(i, &(r, s, f))| match s {
                Some(s) => Component::new(i as u32 + 1, r, &[(s, int(f))]),
                None => Component::new(i as u32 + 1, r, &[]),
            })
            .collect();
        SpectralCurveLocal::new(vec![BranchPoint::new(0, comps)], &[], false).unwrap()
    }

    fn verdict(c: &SpectralCurveLocal) -> Verdict {
        classify(c).branches[0].verdict
    }

    #[test]
    fn single_component_verdicts() {
        assert_eq!(verdict(&single(2, 3)), Verdict::Regular);
        assert_eq!(verdict(&single(3, 4)), Verdict::Regular);
        assert_eq!(verdict(&single(4, 3)), Verdict::Irregular);
        assert_eq!(verdict(&single(5, 3)), Verdict::Irregular);
        assert_eq!(verdict(&single(3, 1)), Verdict::Irregular);
        // 8 = 3*3 - 1 is in an allowed residue class.
        assert_eq!(verdict(&single(8, 3)), Verdict::Irregular);
        let bad = classify(&single(7, 5));
        assert_eq!(bad.branches[0].verdict, Verdict::NonAdmissible);
        assert_eq!(bad.branches[0].failed, vec![Condition::ResidueClass(1)]);
        assert_eq!(verdict(&single(4, 2)), Verdict::NonAdmissible);
        assert_eq!(verdict(&single(3, 5)), Verdict::NonAdmissible);
    }

    #[test]
    fn exceptional_curve() {
        assert_eq!(verdict(&multi(&[(2, Some(3), -1), (1, None, 0)])), Verdict::Exceptional);
        let rep = classify(&multi(&[(2, Some(3), -1), (1, None, 0), (1, None, 0)]));
        assert!(rep.branches[0].failed.contains(&Condition::TwoInfiniteOrders(2, 3)));
        let rep = classify(&multi(&[(2, Some(3), -1), (2, None, 0)]));
        assert!(rep.branches[0].failed.contains(&Condition::InfiniteOrderRamified(2)));
    }

    #[test]
    fn multi_component_irregular() {
        assert_eq!(verdict(&multi(&[(5, Some(3), 1), (4, Some(3), 1)])), Verdict::Irregular);
        assert_eq!(verdict(&multi(&[(3, Some(2), 1), (1, Some(1), 1), (1, Some(2), 1)])), Verdict::Irregular);
        // Both components are 1 mod 3: no mu+.
        let rep = classify(&multi(&[(7, Some(3), 1), (4, Some(3), 1)]));
        assert_eq!(rep.branches[0].failed, vec![Condition::NoExtremalPair]);
        // Equal types with equal t^r collide.
        let rep = classify(&multi(&[(2, Some(1), 1), (2, Some(1), -1)]));
        assert_eq!(rep.branches[0].verdict, Verdict::NonAdmissible);
    }

    #[test]
    fn order_independence() {
        let c = multi(&[(3, Some(2), 1), (1, Some(1), 1), (1, Some(2), 1)]);
        for perm in [[1, 2, 3], [3, 2, 1], [2, 3, 1], [2, 1, 3]] {
            let d = c.with_component_order(&perm).unwrap();
            assert_eq!(classify(&c), classify(&d));
        }
    }
}
