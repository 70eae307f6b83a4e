//! Exact values of the degree recursions behind the embedding guarantees.
//!
//! `d(1,0) = 1`, `d(k,0) = d(k-1, 2·C(k-1,2))`, `d(k,m+1) = 7·d(k,m)^2`;
//! the loop variant `d*` starts from `d*(1,0) = 1`, `d*(k,0) = d(k)` and obeys
//! the same step. `f(k) = d*(12k^2) + 2k`. These are upper-bound
//! certificates, not tight values.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::Error;

/// Largest bit length evaluated exactly.
pub const BOUND_BIT_CAP: u64 = 1 << 22;

fn pairs(k: usize) -> usize {
    k * k.saturating_sub(1)
}

/// `m` squaring steps of `x -> 7x^2` from `x`.
fn iterate(mut x: BigUint, m: usize) -> Result<BigUint, Error> {
    for _ in 0..m {
        let bits = 2 * x.bits() + 3;
        if bits > BOUND_BIT_CAP {
            return Err(Error::BoundTooLarge { bits });
        }
        x = &x * &x * 7u32;
    }
    Ok(x)
}

fn check(k: usize, m: usize) -> Result<(), Error> {
    if k == 0 || m > pairs(k) {
        return Err(Error::Precondition(format!(
            "need k >= 1 and m <= 2·C(k,2) (k = {k}, m = {m})"
        )));
    }
    Ok(())
}

/// `d(k, m)`.
pub fn bound_d(k: usize, m: usize) -> Result<BigUint, Error> {
    check(k, m)?;
    let mut x = BigUint::one();
    for j in 2..=k {
        x = iterate(x, pairs(j - 1))?;
    }
    iterate(x, m)
}

/// `d*(k, m)`; `d*(k) = d*(k, 2·C(k,2))`.
pub fn bound_dstar(k: usize, m: usize) -> Result<BigUint, Error> {
    check(k, m)?;
    let start = if k == 1 {
        BigUint::one()
    } else {
        bound_d(k, pairs(k))?
    };
    iterate(start, m)
}

/// `f(k) = d*(12k^2) + 2k`.
pub fn bound_f(k: usize) -> Result<BigUint, Error> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let r = 12 * k * k;
    Ok(bound_dstar(r, pairs(r))? + BigUint::from(2 * k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        assert_eq!(bound_d(1, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(bound_d(2, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(bound_d(2, 1).unwrap(), BigUint::from(7u32));
        assert_eq!(bound_d(2, 2).unwrap(), BigUint::from(343u32));
        assert_eq!(bound_d(3, 0).unwrap(), BigUint::from(343u32));
        assert_eq!(bound_dstar(1, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(bound_dstar(2, 0).unwrap(), BigUint::from(343u32));
    }

    #[test]
    fn step_is_exact() {
        for k in 2..=3 {
            for m in 0..pairs(k) {
                let a = bound_d(k, m).unwrap();
                assert_eq!(bound_d(k, m + 1).unwrap(), &a * &a * 7u32);
            }
        }
    }

    #[test]
    fn huge_values_refused() {
        assert!(matches!(bound_f(1), Err(Error::BoundTooLarge { .. })));
        assert!(bound_d(0, 0).is_err());
        assert!(bound_d(2, 3).is_err());
    }
}
