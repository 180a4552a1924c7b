//! Local expansions of the recursion ingredients.
//!
//! Local one-forms on a component `nu` are written in its own coordinate
//! `zeta_nu` (exponent denominator 1). A [`Frame`] fixes a home component
//! `mu` and expresses forms living at each fiber point
//! `zeta_nu = theta_nu^b zeta^(r_mu / r_nu)` as coefficient series of
//! `d zeta` in the home coordinate, Jacobian included.

use num_bigint::BigInt;
use num_traits::One;

use crate::curve::{Leg, SpectralCurveLocal};
use crate::error::{Error, Result};
use crate::exactnum::{CycloNumber, PuiseuxSeries, Rational};

/// A point of the fiber over `x = zeta^r_home`: component `target`, root
/// index `root`, and exponent `exp / denom = r_home / r_target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiberPointSpec {
    pub home: u32,
    pub target: u32,
    pub root: u32,
    pub exp: i64,
    pub denom: u32,
}

/// Local fiber geometry seen from one home component.
#[derive(Clone, Debug)]
pub struct Frame {
    /// Exponent denominator and cyclotomic order: lcm of r at the branch point.
    pub l: u32,
    /// Primitive-root convention: theta_nu = zeta_L^(galois L / r_nu).
    pub galois: i64,
    pub home: u32,
    pub r_home: u32,
    pub r_alpha: u32,
    /// Index 0 is the home point itself.
    pub points: Vec<FiberPointSpec>,
    r_target: Vec<u32>,
}

fn local(terms: impl IntoIterator<Item = (i64, Rational)>) -> PuiseuxSeries {
    PuiseuxSeries::from_terms(
        1,
        1,
        terms.into_iter().map(|(e, c)| (e, CycloNumber::from_rational(1, c))),
        None,
    )
}

fn ratio(a: u32, b: u32) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// The r_alpha - 1 points of the fiber other than the home point.
pub fn fiber(curve: &SpectralCurveLocal, home: u32) -> Vec<FiberPointSpec> {
    Frame::new(curve, home, 1).points[1..].to_vec()
}

impl Frame {
    pub fn new(curve: &SpectralCurveLocal, home: u32, galois: i64) -> Frame {
        let bp = &curve.branch_points[curve.branch_of(home).expect("home component exists")];
        let l = bp.lcm();
        let r_home = curve.component(home).unwrap().r;
        let mut points = vec![FiberPointSpec { home, target: home, root: 0, exp: l as i64, denom: l }];
        let mut r_target = vec![r_home];
        for c in &bp.components {
            for b in 0..c.r {
                if c.id == home && b == 0 {
                    continue;
                }
                points.push(FiberPointSpec {
                    home,
                    target: c.id,
                    root: b,
                    exp: (l as i64 * r_home as i64) / c.r as i64,
                    denom: l,
                });
                r_target.push(c.r);
            }
        }
        Frame { l, galois, home, r_home, r_alpha: bp.r_total(), points, r_target }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// theta_nu^(b n) at point p.
    pub fn theta_pow(&self, p: usize, n: i64) -> CycloNumber {
        let pt = &self.points[p];
        let step = (self.l / self.r_target[p]) as i64;
        CycloNumber::root(self.l, self.galois * step * pt.root as i64 * n)
    }

    /// Pulls a local one-form sum_n c_n zeta_nu^n d zeta_nu back to point p.
    pub fn pull_form(&self, p: usize, form: &PuiseuxSeries) -> PuiseuxSeries {
        assert_eq!(form.denom(), 1);
        let pt = &self.points[p];
        let jac = ratio(self.r_home, self.r_target[p]);
        let mut out = PuiseuxSeries::zero(self.l, self.l, None);
        for (&n, c) in form.terms() {
            let coeff = &self.theta_pow(p, n + 1).scale(&(c.as_rational().unwrap() * &jac));
            out.add_term(pt.exp * (n + 1) - self.l as i64, coeff.clone());
        }
        out
    }

    /// Pulls a local function sum_n c_n zeta_nu^n back to point p.
    pub fn pull_function(&self, p: usize, f: &PuiseuxSeries) -> PuiseuxSeries {
        let pt = &self.points[p];
        let mut out = PuiseuxSeries::zero(self.l, self.l, None);
        for (&n, c) in f.terms() {
            out.add_term(pt.exp * n, self.theta_pow(p, n).scale(&c.as_rational().unwrap()));
        }
        out
    }

    /// y at point p as a function of the home coordinate.
    pub fn y_at(&self, curve: &SpectralCurveLocal, p: usize) -> PuiseuxSeries {
        let c = curve.component(self.points[p].target).unwrap();
        let r = Rational::from_integer(c.r.into());
        let y = local(c.f01.iter().map(|(&k, v)| (k as i64 - c.r as i64, v / &r)));
        self.pull_function(p, &y)
    }

    /// dx = r_home zeta^(r_home - 1) in the home coordinate.
    pub fn dx(&self) -> PuiseuxSeries {
        PuiseuxSeries::monomial(
            self.l,
            self.l as i64 * (self.r_home as i64 - 1),
            CycloNumber::from_rational(self.l, Rational::from_integer(self.r_home.into())),
        )
    }

    pub fn component_of(&self, p: usize) -> u32 {
        self.points[p].target
    }
}

/// Loc_nu(d xi^mu_{-k}) = [mu = nu] zeta^(-k-1) + sum_l F02[(mu,k),(nu,l)]/k zeta^(l-1).
pub fn xi_expansion(curve: &SpectralCurveLocal, source: Leg, at: u32) -> PuiseuxSeries {
    let (mu, k) = source;
    assert!(k > 0);
    let kq = Rational::from_integer(k.into());
    let mut terms = Vec::new();
    if mu == at {
        terms.push((-(k as i64) - 1, Rational::one()));
    }
    for ((nu, l), v) in curve.f02_row(source) {
        if nu == at {
            terms.push((l as i64 - 1, v / &kq));
        }
    }
    local(terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unstable {
    Omega01,
    OmegaHalf1,
}

/// omega_{0,1} or omega_{1/2,1} at component mu, as coefficient of d zeta_mu.
pub fn unstable_expansion(curve: &SpectralCurveLocal, which: Unstable, mu: u32) -> PuiseuxSeries {
    let c = curve.component(mu).expect("component exists");
    match which {
        Unstable::Omega01 => local(c.f01.iter().map(|(&k, v)| (k as i64 - 1, v.clone()))),
        Unstable::OmegaHalf1 => {
            if !curve.crosscap {
                return local([]);
            }
            let mut terms = vec![(-1, c.q.clone())];
            terms.extend(c.f_half1.iter().map(|(&k, v)| (k as i64 - 1, v.clone())));
            local(terms)
        }
    }
}

/// theta^a / (1 - theta^a)^2 = sum_{m<r} m(r - m)/(2r) theta^(a m) for a
/// primitive r-th root of unity theta and a not divisible by r.
pub fn double_pole_identity(r: u32, theta: &CycloNumber, a: i64) -> CycloNumber {
    let mut acc = CycloNumber::zero(theta.order());
    let base = theta.pow(a.rem_euclid(r as i64) as u32);
    let mut pw = CycloNumber::one(theta.order());
    for m in 0..r {
        let w = Rational::new(BigInt::from(m * (r - m)), BigInt::from(2 * r));
        acc = &acc + &pw.scale(&w);
        pw = &pw * &base;
    }
    acc
}

/// omega_{0,2}(z_a, z_b) as a coefficient series of d zeta^2 in the home
/// coordinate (exact).
pub fn omega02_pair(curve: &SpectralCurveLocal, frame: &Frame, a: usize, b: usize) -> Result<PuiseuxSeries> {
    if a == b {
        return Err(Error::CoincidentPoints);
    }
    let (pa, pb) = (&frame.points[a], &frame.points[b]);
    let l = frame.l;
    let mut out = PuiseuxSeries::zero(l, l, None);
    if pa.target == pb.target {
        let r = frame.r_target[a];
        let theta = CycloNumber::root(l, frame.galois * (l / r) as i64);
        let d = pb.root as i64 - pa.root as i64;
        let e = ratio(frame.r_home, r);
        let c = double_pole_identity(r, &theta, d).scale(&(&e * &e));
        out.add_term(-2 * l as i64, c);
    }
    for (((_, k), (nu, l2)), v) in polarization_on(curve, pa.target) {
        if *nu != pb.target {
            continue;
        }
        let fa = frame.pull_form(a, &local([(*k as i64 - 1, Rational::one())]));
        let fb = frame.pull_form(b, &local([(*l2 as i64 - 1, v.clone())]));
        out = out.add(&fa.mul(&fb)?);
    }
    Ok(out)
}

/// F02 entries whose first leg lies on component `c`.
fn polarization_on(curve: &SpectralCurveLocal, c: u32) -> impl Iterator<Item = (&(Leg, Leg), &Rational)> {
    curve.f02.range(((c, 0), (0, 0))..=((c, u32::MAX), (u32::MAX, u32::MAX)))
}

/// Coefficient of d xi^nu_{-k}(w) in omega_{0,2}(z_p, w): [nu = comp(p)] k zeta_p^(k-1) d zeta_p.
pub fn omega02_spectator_coefficient(frame: &Frame, p: usize, spectator: Leg) -> PuiseuxSeries {
    let (nu, k) = spectator;
    if frame.points[p].target != nu {
        return PuiseuxSeries::zero(frame.l, frame.l, None);
    }
    frame.pull_form(p, &local([(k as i64 - 1, Rational::from_integer(k.into()))]))
}

/// Exact zero in the frame's field.
pub fn zero(frame: &Frame) -> PuiseuxSeries {
    PuiseuxSeries::zero(frame.l, frame.l, None)
}
