//! First hit of an integer rotation in a window.
//!
//! `first_in_window` finds the least `n ≥ start` with `lo ≤ (step·n + offset) mod m ≤ hi`
//! in `O(log m)` Euclid-like steps. The inhomogeneous construction uses it on a dyadic
//! approximation of `nα − γ` to enumerate candidates in increasing order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

/// Least `x ≥ 0` with `l ≤ (a·x mod m) ≤ r`, for `0 ≤ l ≤ r < m`.
fn least_multiple_in_range(a: &BigInt, m: &BigInt, l: &BigInt, r: &BigInt) -> Option<BigInt> {
    // Unrolled recursion: a·x − m·y ∈ [l, r] reduces to (m·y mod a) ∈ [−r mod a, −l mod a].
    let mut frames: Vec<(BigInt, BigInt, BigInt)> = Vec::new();
    let (mut a, mut m, mut l, mut r) = (a.mod_floor(m), m.clone(), l.clone(), r.clone());
    let mut x = loop {
        if l.is_zero() {
            break BigInt::zero();
        }
        if a.is_zero() {
            return None;
        }
        let k = ceil_div(&l, &a);
        if &a * &k <= r {
            break k;
        }
        let next_a = m.mod_floor(&a);
        let next_l = (-&r).mod_floor(&a);
        let next_r = (-&l).mod_floor(&a);
        frames.push((a.clone(), m.clone(), l.clone()));
        m = a;
        a = next_a;
        l = next_l;
        r = next_r;
    };
    // unwind: x_outer = ceil((m·y + l)/a) with y the inner solution
    while let Some((a, m, l)) = frames.pop() {
        x = ceil_div(&(&m * &x + &l), &a);
    }
    Some(x)
}

/// Least `n ≥ start` with `lo ≤ (step·n + offset) mod modulus ≤ hi`, where
/// `0 ≤ lo ≤ hi < modulus`. `None` when no such `n` exists.
pub fn first_in_window(step: &BigInt, offset: &BigInt, modulus: &BigInt, lo: &BigInt, hi: &BigInt, start: &BigInt) -> Option<BigInt> {
    assert!(modulus > &BigInt::zero() && &BigInt::zero() <= lo && lo <= hi && hi < modulus, "bad window");
    if hi - lo >= modulus - BigInt::one() {
        return Some(start.clone());
    }
    let c = (step * start + offset).mod_floor(modulus);
    let l = (lo - &c).mod_floor(modulus);
    let h = (hi - &c).mod_floor(modulus);
    let k = if l <= h {
        least_multiple_in_range(step, modulus, &l, &h)?
    } else {
        // the window wraps and contains residue 0, i.e. k = 0
        BigInt::zero()
    };
    Some(start + k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(step: i64, offset: i64, m: i64, lo: i64, hi: i64, start: i64) -> Option<i64> {
        (start..start + 4 * m).find(|n| {
            let v = (step * n + offset).rem_euclid(m);
            lo <= v && v <= hi
        })
    }

    #[test]
    fn small_cases() {
        let b = |x: i64| BigInt::from(x);
        // 7n mod 10 ∈ [3, 3] → n = 9
        assert_eq!(first_in_window(&b(7), &b(0), &b(10), &b(3), &b(3), &b(0)), Some(b(9)));
        // no solution: 4n mod 10 is even
        assert_eq!(first_in_window(&b(4), &b(0), &b(10), &b(3), &b(3), &b(0)), None);
        assert_eq!(first_in_window(&b(4), &b(1), &b(10), &b(3), &b(3), &b(5)), Some(b(8)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn agrees_with_brute_force(m in 1i64..400, step in 0i64..800, offset in -500i64..500, a in 0i64..400, w in 0i64..50, start in 0i64..300) {
            let lo = a % m;
            let hi = (lo + w).min(m - 1);
            let want = brute(step, offset, m, lo, hi, start);
            let got = first_in_window(&step.into(), &offset.into(), &m.into(), &lo.into(), &hi.into(), &start.into());
            prop_assert_eq!(got, want.map(BigInt::from));
        }
    }
}
