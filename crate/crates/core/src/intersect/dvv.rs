//! psi-class intersection numbers on the moduli space of stable curves by
//! the string equation and the DVV form of the Virasoro constraints.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactnum::{int, rat, Rational};

/// (2m - 1)!!, with (-1)!! = 1.
fn odd_double_factorial(m: i64) -> Rational {
    let mut acc = int(1);
    let mut k = 2 * m - 1;
    while k > 1 {
        acc *= int(k);
        k -= 2;
    }
    acc
}

struct Dvv {
    memo: HashMap<(u32, Vec<u32>), Rational>,
}

impl Dvv {
    fn get(&mut self, g: u32, d: &[u32]) -> Rational {
        let n = d.len() as i64;
        let total: i64 = d.iter().map(|&x| x as i64).sum();
        if 2 * g as i64 - 2 + n <= 0 || 3 * g as i64 - 3 + n != total {
            return Rational::zero();
        }
        let mut key = d.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        if let Some(v) = self.memo.get(&(g, key.clone())) {
            return v.clone();
        }
        let v = self.compute(g, &key);
        self.memo.insert((g, key), v.clone());
        v
    }

    /// `key` is sorted decreasingly; the largest insertion is removed.
    fn compute(&mut self, g: u32, key: &[u32]) -> Rational {
        match (g, key) {
            (0, [0, 0, 0]) => return int(1),
            (1, [1]) => return rat(1, 24),
            _ => {}
        }
        let rest = &key[1..];
        // k + 1 = key[0]; k = -1 is the string equation.
        let k = key[0] as i64 - 1;
        let mut acc = Rational::zero();
        for j in 0..rest.len() {
            if k == -1 && rest[j] == 0 {
                continue;
            }
            let mut next = rest.to_vec();
            next[j] = (rest[j] as i64 + k) as u32;
            let dj = rest[j] as i64;
            let coef = odd_double_factorial(k + dj + 1) / odd_double_factorial(dj);
            acc += coef * self.get(g, &next);
        }
        if k >= 1 {
            let half = rat(1, 2);
            for a in 0..k {
                let b = k - 1 - a;
                let w = odd_double_factorial(a + 1) * odd_double_factorial(b + 1);
                if g >= 1 {
                    let mut next = rest.to_vec();
                    next.push(a as u32);
                    next.push(b as u32);
                    acc += &half * &w * self.get(g - 1, &next);
                }
                let m = rest.len();
                for mask in 0u64..(1u64 << m) {
                    let (left, right): (Vec<u32>, Vec<u32>) = {
                        let mut l = vec![a as u32];
                        let mut r = vec![b as u32];
                        for (i, &x) in rest.iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                l.push(x);
                            } else {
                                r.push(x);
                            }
                        }
                        (l, r)
                    };
                    for g1 in 0..=g {
                        let x = self.get(g1, &left);
                        if x.is_zero() {
                            continue;
                        }
                        acc += &half * &w * x * self.get(g - g1, &right);
                    }
                }
            }
        }
        acc / odd_double_factorial(k + 2)
    }
}

/// `<tau_{d_1} ... tau_{d_n}>_g`. Errors unless 3g - 3 + n = sum d.
pub fn dvv_oracle(g: u32, d: &[u32]) -> Result<Rational> {
    let n = d.len() as i64;
    let total: i64 = d.iter().map(|&x| x as i64).sum();
    if 3 * g as i64 - 3 + n != total {
        return Err(Error::DimensionMismatch(format!("3g - 3 + n = {} but sum d = {total}", 3 * g as i64 - 3 + n)));
    }
    if 2 * g as i64 - 2 + n <= 0 {
        return Err(Error::DimensionMismatch("unstable (g, n)".into()));
    }
    Ok(Dvv { memo: HashMap::new() }.get(g, d))
}
