//! Psi coefficients of the twisted W(gl_r) modes.
//!
//! `Psi^(j)_r(a_{2j+1}, .., a_i)` is `1/i!` times a sum over injective
//! tuples `m` in `[0, r)^i` of `prod_{l<=j} theta^(m_{2l-1}+m_{2l}) /
//! (theta^m_{2l} - theta^m_{2l-1})^2 * prod_l theta^(-m_l a_l)`, with
//! `theta = exp(2 pi i / r)`. It only depends on the arguments modulo r
//! and is symmetric in them.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::exactnum::{CycloNumber, Rational};

type Key = (u32, u32, Vec<u32>);

fn cache() -> &'static RwLock<HashMap<Key, Rational>> {
    static CACHE: OnceLock<RwLock<HashMap<Key, Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// Direct evaluation of the root-of-unity sum.
pub fn psi_direct(r: u32, j: u32, a: &[i64]) -> Rational {
    assert!(r >= 1);
    let i = 2 * j as usize + a.len();
    if i > r as usize {
        return Rational::zero();
    }
    let mut key_args: Vec<u32> = a.iter().map(|x| x.rem_euclid(r as i64) as u32).collect();
    key_args.sort_unstable();
    let key = (r, j, key_args);
    if let Some(v) = cache().read().unwrap().get(&key) {
        return v.clone();
    }
    let theta = |e: i64| CycloNumber::root(r, e);
    // Pair factors theta^(m+m') / (theta^m' - theta^m)^2.
    let mut pair = vec![vec![CycloNumber::zero(r); r as usize]; r as usize];
    if j > 0 {
        for m1 in 0..r as i64 {
            for m2 in 0..r as i64 {
                if m1 != m2 {
                    let d = &theta(m2) - &theta(m1);
                    let inv = (&d * &d).inv().expect("distinct roots");
                    pair[m1 as usize][m2 as usize] = &theta(m1 + m2) * &inv;
                }
            }
        }
    }
    let mut acc = CycloNumber::zero(r);
    let mut used = vec![false; r as usize];
    let mut m = Vec::with_capacity(i);
    fn rec(
        r: u32,
        j: usize,
        a: &[i64],
        i: usize,
        pair: &[Vec<CycloNumber>],
        used: &mut [bool],
        m: &mut Vec<usize>,
        acc: &mut CycloNumber,
    ) {
        if m.len() == i {
            let mut term = CycloNumber::one(r);
            for l in 0..j {
                term = &term * &pair[m[2 * l]][m[2 * l + 1]];
            }
            let e: i64 = a.iter().zip(&m[2 * j..]).map(|(&al, &ml)| -(ml as i64) * al).sum();
            term = &term * &CycloNumber::root(r, e);
            *acc = &*acc + &term;
            return;
        }
        for x in 0..r as usize {
            if !used[x] {
                used[x] = true;
                m.push(x);
                rec(r, j, a, i, pair, used, m, acc);
                m.pop();
                used[x] = false;
            }
        }
    }
    rec(r, j as usize, a, i, &pair, &mut used, &mut m, &mut acc);
    let v = acc
        .as_rational()
        .expect("Psi coefficients are rational")
        / Rational::from_integer(factorial(i as u32));
    cache().write().unwrap().insert(key, v.clone());
    v
}

/// Closed forms for the low cases, None elsewhere.
pub fn psi_closed(r: u32, j: u32, a: &[i64]) -> Option<Rational> {
    let ri = r as i64;
    let div = |x: i64| (x.rem_euclid(ri) == 0) as i64;
    match (j, a) {
        (0, [q]) => Some(Rational::from_integer((ri * div(*q)).into())),
        (0, [q1, q2]) if r >= 2 => Some(Rational::new(
            (ri * ri * div(*q1) * div(*q2) - ri * div(q1 + q2)).into(),
            2.into(),
        )),
        (1, []) if r >= 2 => Some(Rational::new((-ri * (ri * ri - 1)).into(), 24.into())),
        _ => None,
    }
}

/// Psi^(j)_r(a): closed form where one is known, direct sum otherwise.
pub fn psi(r: u32, j: u32, a: &[i64]) -> Rational {
    psi_closed(r, j, a).unwrap_or_else(|| psi_direct(r, j, a))
}
