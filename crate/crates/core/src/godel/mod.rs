//! Cantor pairing and the Gödel codecs for value terms, formulas, process
//! terms (both dialects) and whole programs.

mod codec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub use codec::{
    decode_formula, decode_program, decode_term, decode_vterm, encode_formula, encode_program,
    encode_term, encode_vterm, subst_code, val_code, val_formula_code, val_term_code, Val,
    ValKind,
};
pub(crate) use codec::{decode_def_entry, encode_def_entry};

/// A Gödel index.
pub type Code = BigUint;

/// Largest definition count, arity or argument count a decoder will materialize.
pub const MAX_DECODED_LEN: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("index component {0} does not fit in 64 bits")]
    IndexOverflow(BigUint),
    #[error("decoded length {0} exceeds the supported maximum")]
    TooLarge(BigUint),
    #[error("{0} cannot be encoded in the {1} dialect")]
    DialectMismatch(&'static str, crate::syntax::Dialect),
    #[error("runtime wrapper terms have no Gödel index")]
    NotEncodable,
    #[error("evaluation failed: {0}")]
    Eval(#[from] crate::presburger::EvalError),
}

/// Cantor pairing `π(x, y) = (x+y)(x+y+1)/2 + y`.
pub fn pair2(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    let t = (&s * (&s + 1u32)) >> 1u32;
    t + y
}

/// Inverse of [`pair2`].
pub fn unpair2(z: &BigUint) -> (BigUint, BigUint) {
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) >> 1u32;
    let t = (&w * (&w + 1u32)) >> 1u32;
    let y = z - t;
    let x = w - &y;
    (x, y)
}

/// k-ary pairing: `⟨⟩ = 0`, `⟨a⟩ = a`, `⟨a, rest…⟩ = π(a, ⟨rest…⟩)`.
pub fn pair(xs: &[BigUint]) -> Code {
    let Some((last, init)) = xs.split_last() else {
        return BigUint::zero();
    };
    init.iter().rev().fold(last.clone(), |acc, x| pair2(x, &acc))
}

/// The unique `xs` with `|xs| = k` and `pair(xs) = z`.
pub fn unpair(z: &Code, k: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(k);
    let mut rest = z.clone();
    for i in 0..k {
        if i + 1 == k {
            out.push(rest);
            break;
        }
        if rest.is_zero() {
            out.resize(k, BigUint::zero());
            break;
        }
        let (x, y) = unpair2(&rest);
        out.push(x);
        rest = y;
    }
    out
}

/// Length-prefixed code of a finite sequence: `0` for the empty sequence,
/// otherwise `1 + π(n−1, ⟨xs⟩)`. A bijection between finite sequences and N.
pub fn seq_code(xs: &[BigUint]) -> Code {
    if xs.is_empty() {
        return BigUint::zero();
    }
    pair2(&BigUint::from(xs.len() as u64 - 1), &pair(xs)) + 1u32
}

/// Inverse of [`seq_code`].
pub fn seq_decode(z: &Code) -> Result<Vec<BigUint>, CodecError> {
    if z.is_zero() {
        return Ok(Vec::new());
    }
    let (n, rest) = unpair2(&(z - 1u32));
    Ok(unpair(&rest, to_len(&(n + 1u32))?))
}

/// Convenience pairing of machine integers.
pub fn pair_u64(xs: &[u64]) -> Code {
    let xs: Vec<BigUint> = xs.iter().map(|&x| BigUint::from(x)).collect();
    pair(&xs)
}

/// `(0, 0)` for `z = 0`, otherwise the unique `(r, d)` with `1 ≤ r ≤ m` and `z = m·d + r`.
pub fn tag_split(z: &Code, m: u32) -> (u32, Code) {
    if z.is_zero() {
        return (0, BigUint::zero());
    }
    let (d, r) = (z - 1u32).div_rem(&BigUint::from(m));
    let r = r.to_u32().expect("remainder below modulus") + 1;
    (r, d)
}

/// `m·d + r`, the inverse of [`tag_split`] for `r ≥ 1`.
pub fn tag_join(r: u32, d: &Code, m: u32) -> Code {
    d * m + r
}

pub(crate) fn to_index(z: &BigUint) -> Result<u64, CodecError> {
    z.to_u64().ok_or_else(|| CodecError::IndexOverflow(z.clone()))
}

pub(crate) fn to_len(z: &BigUint) -> Result<usize, CodecError> {
    match z.to_u64() {
        Some(n) if n <= MAX_DECODED_LEN => Ok(n as usize),
        _ => Err(CodecError::TooLarge(z.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    // Independent oracle: walk the Cantor diagonals.
    fn diagonal_table(n: usize) -> Vec<(u64, u64)> {
        let mut out = Vec::with_capacity(n);
        let mut s = 0u64;
        while out.len() < n {
            for y in 0..=s {
                out.push((s - y, y));
                if out.len() == n {
                    break;
                }
            }
            s += 1;
        }
        out
    }

    #[test]
    fn pairing_matches_diagonal_enumeration() {
        for (z, (x, y)) in diagonal_table(10_000).into_iter().enumerate() {
            assert_eq!(pair2(&big(x), &big(y)), big(z as u64));
            assert_eq!(unpair2(&big(z as u64)), (big(x), big(y)));
        }
    }

    #[test]
    fn pairing_normalizations() {
        assert_eq!(pair(&[]), big(0));
        assert_eq!(pair(&[big(5)]), big(5));
        assert_eq!(pair(&[big(0), big(0)]), big(0));
        assert_eq!(pair(&[big(0), big(0), big(0), big(0)]), big(0));
        assert_eq!(pair(&[big(1), big(0)]), big(1));
        assert_eq!(unpair(&big(0), 2), vec![big(0), big(0)]);
        assert_eq!(unpair(&big(1), 2), vec![big(1), big(0)]);
        assert_eq!(unpair(&big(42), 1), vec![big(42)]);
        assert!(unpair(&big(42), 0).is_empty());
    }

    #[test]
    fn k_ary_round_trip() {
        for z in 0..2000u64 {
            for k in 1..5 {
                assert_eq!(pair(&unpair(&big(z), k)), big(z));
            }
        }
        let xs = vec![big(3), big(1), big(4), big(1), big(5)];
        assert_eq!(unpair(&pair(&xs), 5), xs);
    }

    #[test]
    fn tag_split_examples() {
        assert_eq!(tag_split(&big(0), 7), (0, big(0)));
        assert_eq!(tag_split(&big(8), 7), (1, big(1)));
        assert_eq!(tag_split(&big(7), 7), (7, big(0)));
        for z in 1..500u64 {
            for m in [6, 7] {
                let (r, d) = tag_split(&big(z), m);
                assert!((1..=m).contains(&r));
                assert_eq!(tag_join(r, &d, m), big(z));
            }
        }
    }

    #[test]
    fn large_pairs_round_trip() {
        let x: BigUint = "123456789012345678901234567890".parse().unwrap();
        let y: BigUint = "98765432109876543210".parse().unwrap();
        assert_eq!(unpair2(&pair2(&x, &y)), (x, y));
    }
}
