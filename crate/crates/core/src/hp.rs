//! Thin helpers over `astro_float` for the few places that need more than
//! double precision: Euler's constant, phases `τ log p` at huge τ, and the
//! lattice entries of the τ-search.

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::{BigInt, Sign as BigSign};

pub const RM: RoundingMode = RoundingMode::ToEven;

pub fn consts() -> Consts {
    Consts::new().expect("astro-float constant cache")
}

fn raw(x: &BigFloat) -> Option<(&[Word], Sign, i64)> {
    let (m, _n, s, e, _) = x.as_raw_parts()?;
    Some((m, s, e as i64))
}

/// Nearest double (truncating below 128 significant bits first).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let Some((m, s, e)) = raw(x) else {
        return f64::NAN;
    };
    let len = m.len();
    let hi = m[len - 1] as u128;
    let lo = if len >= 2 { m[len - 2] as u128 } else { 0 };
    let top = (hi << 64) | lo;
    // value = 0.M * 2^e with M read as a 128-bit fraction
    let mag = top as f64 * 2f64.powi(-128) * pow2(e);
    if s == Sign::Neg {
        -mag
    } else {
        mag
    }
}

fn pow2(e: i64) -> f64 {
    if e > 1000 {
        f64::INFINITY
    } else if e < -1000 {
        2f64.powi(-1000) * 2f64.powi((e + 1000) as i32)
    } else {
        2f64.powi(e as i32)
    }
}

/// `⌊x⌋` as an integer.
pub fn floor_bigint(x: &BigFloat) -> BigInt {
    if x.is_zero() {
        return BigInt::from(0);
    }
    let (m, s, e) = raw(x).expect("finite big float");
    let mut bytes = Vec::with_capacity(m.len() * 8);
    for w in m {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    let mut n = BigInt::from_bytes_le(
        if s == Sign::Neg { BigSign::Minus } else { BigSign::Plus },
        &bytes,
    );
    let shift = e - 64 * m.len() as i64;
    if shift >= 0 {
        n <<= shift as usize;
    } else {
        // arithmetic shift rounds toward −∞, which is floor
        n >>= (-shift) as usize;
    }
    n
}

/// Nearest integer, ties up.
pub fn round_bigint(x: &BigFloat, p: usize) -> BigInt {
    let half = BigFloat::from_f64(0.5, 64);
    floor_bigint(&x.add(&half, p, RM))
}

pub fn from_bigint(n: &BigInt, p: usize) -> BigFloat {
    let (sign, bytes) = n.to_bytes_le();
    if sign == BigSign::NoSign {
        return BigFloat::from_u64(0, p);
    }
    let mut words: Vec<Word> = bytes
        .chunks(8)
        .map(|c| {
            let mut b = [0u8; 8];
            b[..c.len()].copy_from_slice(c);
            u64::from_le_bytes(b)
        })
        .collect();
    if words.is_empty() {
        words.push(0);
    }
    let e = 64 * words.len() as i64;
    let s = if sign == BigSign::Minus { Sign::Neg } else { Sign::Pos };
    let mut out = BigFloat::from_words(&words, s, e as astro_float::Exponent);
    let _ = out.set_precision(p.max(64 * words.len()), RM);
    out
}

/// Fractional part in `[0, 1)`.
pub fn frac01(x: &BigFloat, p: usize) -> BigFloat {
    let f = floor_bigint(x);
    x.sub(&from_bigint(&f, p), p, RM)
}

pub fn from_f64(v: f64, p: usize) -> BigFloat {
    BigFloat::from_f64(v, p)
}

/// Decimal rendering with all digits of the working precision.
pub fn to_decimal(x: &BigFloat, cc: &mut Consts) -> String {
    x.format(astro_float::Radix::Dec, RM, cc)
        .unwrap_or_else(|_| "NaN".to_string())
}

pub fn parse_decimal(s: &str, p: usize, cc: &mut Consts) -> Option<BigFloat> {
    let v = BigFloat::parse(s.trim(), astro_float::Radix::Dec, p, RM, cc);
    if v.is_nan() || v.is_inf() {
        None
    } else {
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrips() {
        for v in [5.0, 0.75, -3.0e20, 1.0 / 3.0, -2.5] {
            assert_eq!(to_f64(&BigFloat::from_f64(v, 128)), v);
        }
        assert_eq!(floor_bigint(&BigFloat::from_f64(-2.5, 128)), BigInt::from(-3));
        assert_eq!(floor_bigint(&BigFloat::from_f64(7.99, 128)), BigInt::from(7));
        let big: BigInt = "123456789012345678901234567890123".parse().unwrap();
        let b = from_bigint(&big, 256);
        assert_eq!(floor_bigint(&b), big);
        assert_eq!(floor_bigint(&from_bigint(&-big.clone(), 256)), -big);
    }

    #[test]
    fn frac_and_decimal() {
        let mut cc = consts();
        let x = BigFloat::from_f64(-1.25, 128);
        assert_eq!(to_f64(&frac01(&x, 128)), 0.75);
        let pi = cc.pi(256, RM);
        let s = to_decimal(&pi, &mut cc);
        let back = parse_decimal(&s, 256, &mut cc).unwrap();
        assert!(to_f64(&back.sub(&pi, 256, RM)).abs() < 1e-70);
    }
}
