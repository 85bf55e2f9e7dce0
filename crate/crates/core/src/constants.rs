//! Euler's constant C₀, computed two independent ways in extended precision.

use crate::hp::{self, RM};
use crate::numeric::bernoulli_exact;
use astro_float::BigFloat;
use std::sync::OnceLock;

/// Working precision (bits) for the cached value.
pub const C0_BITS: usize = 320;

/// `H_N − ln N − 1/(2N) + Σ_{k≤K} B_{2k}/(2k N^{2k})` with N = 100, K = 30.
pub fn euler_gamma_em(bits: usize) -> BigFloat {
    let p = bits + 64;
    let mut cc = hp::consts();
    let n: u64 = 100;
    let kmax = 30usize;
    let mut h = BigFloat::from_u64(0, p);
    for j in 1..=n {
        let inv = BigFloat::from_u64(1, p).div(&BigFloat::from_u64(j, p), p, RM);
        h = h.add(&inv, p, RM);
    }
    let nf = BigFloat::from_u64(n, p);
    let ln_n = nf.ln(p, RM, &mut cc);
    let mut g = h.sub(&ln_n, p, RM);
    g = g.sub(
        &BigFloat::from_u64(1, p).div(&BigFloat::from_u64(2 * n, p), p, RM),
        p,
        RM,
    );
    let b = bernoulli_exact(2 * kmax + 1);
    let n2 = nf.mul(&nf, p, RM);
    let mut npow = n2.clone();
    for k in 1..=kmax {
        let r = &b[2 * k];
        let num = hp::from_bigint(r.numer(), p);
        let den = hp::from_bigint(r.denom(), p).mul(&BigFloat::from_u64(2 * k as u64, p), p, RM);
        let term = num.div(&den, p, RM).div(&npow, p, RM);
        g = g.add(&term, p, RM);
        npow = npow.mul(&n2, p, RM);
    }
    g
}

/// Brent–McMillan: γ = U/V with `U = Σ A_k`, `V = Σ B_k`, n = 30.
pub fn euler_gamma_bm(bits: usize) -> BigFloat {
    let p = bits + 64;
    let mut cc = hp::consts();
    let n: u64 = 30;
    let n2 = BigFloat::from_u64(n * n, p);
    let mut a = BigFloat::from_u64(n, p).ln(p, RM, &mut cc).neg();
    let mut b = BigFloat::from_u64(1, p);
    let mut u = a.clone();
    let mut v = b.clone();
    for k in 1..=(6 * n) {
        let kf = BigFloat::from_u64(k, p);
        let k2 = BigFloat::from_u64(k * k, p);
        b = b.mul(&n2, p, RM).div(&k2, p, RM);
        a = a.mul(&n2, p, RM).div(&kf, p, RM).add(&b, p, RM).div(&kf, p, RM);
        u = u.add(&a, p, RM);
        v = v.add(&b, p, RM);
    }
    u.div(&v, p, RM)
}

/// `|γ_EM − γ_BM|` as a double.
pub fn euler_gamma_agreement(bits: usize) -> f64 {
    let d = euler_gamma_em(bits).sub(&euler_gamma_bm(bits), bits + 64, RM);
    hp::to_f64(&d).abs()
}

/// C₀ in double precision, from the Euler–Maclaurin route.
pub fn euler_gamma() -> f64 {
    static C0: OnceLock<f64> = OnceLock::new();
    *C0.get_or_init(|| hp::to_f64(&euler_gamma_em(C0_BITS)))
}

/// `log(π²/6)`.
pub fn log_zeta2() -> f64 {
    (std::f64::consts::PI * std::f64::consts::PI / 6.0).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_agree() {
        assert!(euler_gamma_agreement(C0_BITS) < 1e-40);
    }

    #[test]
    fn leading_digits() {
        let mut cc = hp::consts();
        let s = hp::to_decimal(&euler_gamma_bm(200), &mut cc);
        assert!(s.contains("772156649015328606065120900824"), "{s}");
        assert!((euler_gamma() - 0.5772156649015329).abs() < 1e-16);
    }
}
