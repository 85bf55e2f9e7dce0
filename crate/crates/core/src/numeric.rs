//! Small numeric kit shared by the evaluators: compensated summation,
//! Bernoulli coefficients, second-order jets in `s`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

/// Neumaier-compensated accumulator over reals.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::new();
        for x in iter {
            k.add(x);
        }
        k
    }
}

/// Componentwise compensated accumulator over complex numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl std::iter::FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut k = ComplexSum::new();
        for z in iter {
            k.add(z);
        }
        k
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().collect::<KahanSum>().value()
}

pub fn complex_sum<I: IntoIterator<Item = Complex64>>(it: I) -> Complex64 {
    it.into_iter().collect::<ComplexSum>().value()
}

const BERNOULLI_TABLE_LEN: usize = 80;

/// Exact Bernoulli numbers B_0..B_{n-1} (B_1 = -1/2 convention unused here).
pub fn bernoulli_exact(n: usize) -> Vec<BigRational> {
    // Akiyama–Tanigawa gives B_1 = +1/2; only even indices are consumed.
    let mut a: Vec<BigRational> = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    for m in 0..n {
        a.push(BigRational::new(BigInt::one(), BigInt::from(m as u64 + 1)));
        for j in (1..=m).rev() {
            let diff = &a[j - 1] - &a[j];
            a[j - 1] = diff * BigRational::from_integer(BigInt::from(j as u64));
        }
        out.push(a[0].clone());
    }
    out
}

/// `B_{2j} / (2j)!` for j = 1..; index 0 holds j = 1. Initialized once.
pub fn bernoulli_over_factorial() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let b = bernoulli_exact(2 * BERNOULLI_TABLE_LEN + 1);
        let mut fact = BigInt::one();
        let mut out = Vec::with_capacity(BERNOULLI_TABLE_LEN);
        for k in 1..=(2 * BERNOULLI_TABLE_LEN) {
            fact *= BigInt::from(k as u64);
            if k % 2 == 0 {
                let r = &b[k] / BigRational::from_integer(fact.clone());
                out.push(ratio_to_f64(&r));
            }
        }
        out
    })
}

pub fn max_bernoulli_terms() -> usize {
    BERNOULLI_TABLE_LEN
}

/// Converts a rational to the nearest-ish double even when num/den overflow f64.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let n = r.numer();
    let d = r.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    // Scale both to ~60 significant bits before dividing.
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let nn = (n >> shift_n as usize).to_f64().unwrap_or(0.0);
    let dd = (d >> shift_d as usize).to_f64().unwrap_or(1.0);
    nn / dd * 2f64.powi((shift_n - shift_d) as i32)
}

/// Value and first two derivatives in `s` of an analytic quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        v: Complex64::new(0.0, 0.0),
        d1: Complex64::new(0.0, 0.0),
        d2: Complex64::new(0.0, 0.0),
    };

    pub fn new(v: Complex64, d1: Complex64, d2: Complex64) -> Self {
        Self { v, d1, d2 }
    }

    pub fn constant(v: Complex64) -> Self {
        Self::new(v, Complex64::zero(), Complex64::zero())
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self::new(self.v * c, self.d1 * c, self.d2 * c)
    }

    pub fn add(self, o: Jet) -> Self {
        Self::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }

    pub fn mul(self, o: Jet) -> Self {
        Self::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }

    /// `u^{-s}` as a jet in `s` at fixed `ln u`.
    pub fn inv_pow(s: Complex64, ln_u: f64) -> Self {
        let v = (-s * ln_u).exp();
        Self::new(v, -v * ln_u, v * ln_u * ln_u)
    }
}

/// Compensated accumulator for jets.
#[derive(Clone, Copy, Debug, Default)]
pub struct JetSum {
    v: ComplexSum,
    d1: ComplexSum,
    d2: ComplexSum,
}

impl JetSum {
    #[inline]
    pub fn add(&mut self, j: Jet) {
        self.v.add(j.v);
        self.d1.add(j.d1);
        self.d2.add(j.d2);
    }

    pub fn value(&self) -> Jet {
        Jet::new(self.v.value(), self.d1.value(), self.d2.value())
    }
}

/// `(e^z - 1)/z`, accurate near zero.
pub fn expm1_over(z: Complex64) -> Complex64 {
    if z.norm() < 0.25 {
        let mut term = Complex64::one();
        let mut acc = Complex64::one();
        for k in 2..30 {
            term = term * z / k as f64;
            acc += term;
            if term.norm() < 1e-18 * acc.norm() {
                break;
            }
        }
        acc
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Log of a complex number continued from `prev` so that consecutive values
/// differ in imaginary part by less than π.
pub fn unwrap_near(z_log_principal: Complex64, prev_im: f64) -> Complex64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let k = ((prev_im - z_log_principal.im) / two_pi).round();
    Complex64::new(z_log_principal.re, z_log_principal.im + k * two_pi)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Distinct prime factors with multiplicity, by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(q: u64) -> u64 {
    factorize(q)
        .iter()
        .fold(q, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn prime_divisors(q: u64) -> Vec<u64> {
    factorize(q).into_iter().map(|(p, _)| p).collect()
}

/// `n = p^k` with p prime → Some((p, k)).
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let f = factorize(n);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

/// `log log x`, defined for x > 1.
pub fn loglog(x: f64) -> f64 {
    x.ln().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_small_values() {
        let b = bernoulli_exact(13);
        let as_f = |k: usize| ratio_to_f64(&b[k]);
        assert_eq!(as_f(0), 1.0);
        assert!((as_f(2) - 1.0 / 6.0).abs() < 1e-16);
        assert!((as_f(4) + 1.0 / 30.0).abs() < 1e-16);
        assert!((as_f(12) + 691.0 / 2730.0).abs() < 1e-15);
        assert_eq!(as_f(3), 0.0);
    }

    #[test]
    fn bernoulli_ratio_matches_zeta_formula() {
        // B_{2j}/(2j)! = (-1)^{j+1} 2 ζ(2j) / (2π)^{2j}
        let t = bernoulli_over_factorial();
        let two_pi = 2.0 * std::f64::consts::PI;
        for j in 3..12usize {
            let zeta: f64 = (1..2000u32).map(|n| (n as f64).powi(-(2 * j as i32))).sum();
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let want = sign * 2.0 * zeta / two_pi.powi(2 * j as i32);
            assert!(((t[j - 1] - want) / want).abs() < 1e-14, "j={j}");
        }
    }

    #[test]
    fn kahan_beats_naive() {
        let xs: Vec<f64> = std::iter::once(1e16)
            .chain(std::iter::repeat(1.0).take(1000))
            .chain(std::iter::once(-1e16))
            .collect();
        assert_eq!(kahan_sum(xs.iter().copied()), 1000.0);
    }

    #[test]
    fn expm1_over_small_and_large() {
        let z = Complex64::new(1e-9, 2e-9);
        assert!((expm1_over(z) - (Complex64::one() + z / 2.0)).norm() < 1e-17);
        let w = Complex64::new(1.0, 1.0);
        assert!((expm1_over(w) - (w.exp() - 1.0) / w).norm() < 1e-15);
    }

    #[test]
    fn factor_helpers() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(euler_phi(100), 40);
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(12), None);
    }
}
