//! Prime tables and the finite prime / prime-power sums used everywhere else.

use crate::characters::DirichletCharacter;
use crate::numeric::{ComplexSum, KahanSum};
use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

pub const MAX_SIEVE_LIMIT: u64 = 1_000_000_000;
const CACHE_MAGIC: &[u8; 8] = b"LCPRIMES";
const CACHE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PrimeError {
    #[error("sieve limit {0} outside [2, 1e9]")]
    RangeGuard(u64),
    #[error("sum range {0} exceeds the prime table limit {1}")]
    BeyondTable(u64, u64),
    #[error("coefficient at p = {p} has modulus {modulus} > 1")]
    CoefficientTooLarge { p: u64, modulus: f64 },
    #[error("tail sums require Re s > 1, got {0}")]
    SigmaNotAboveOne(f64),
    #[error("cache file: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sorted primes up to `limit` with cached logarithms.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    logs: Vec<f64>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self, PrimeError> {
        if !(2..=MAX_SIEVE_LIMIT).contains(&limit) {
            return Err(PrimeError::RangeGuard(limit));
        }
        let primes = segmented_sieve(limit);
        Ok(Self::from_primes(limit, primes))
    }

    fn from_primes(limit: u64, primes: Vec<u64>) -> Self {
        let logs = primes.iter().map(|&p| (p as f64).ln()).collect();
        PrimeTable { limit, primes, logs }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Number of primes `<= x`.
    pub fn count_upto(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    pub fn primes_upto(&self, x: u64) -> &[u64] {
        &self.primes[..self.count_upto(x)]
    }

    pub fn check(&self, x: u64) -> Result<(), PrimeError> {
        if x > self.limit {
            Err(PrimeError::BeyondTable(x, self.limit))
        } else {
            Ok(())
        }
    }

    /// Writes the table as: magic, version (u32 LE), limit, count, primes (u64 LE).
    pub fn save(&self, path: &Path) -> Result<(), PrimeError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(CACHE_MAGIC)?;
        f.write_all(&CACHE_VERSION.to_le_bytes())?;
        f.write_all(&self.limit.to_le_bytes())?;
        f.write_all(&(self.primes.len() as u64).to_le_bytes())?;
        for p in &self.primes {
            f.write_all(&p.to_le_bytes())?;
        }
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, PrimeError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() < 28 || &bytes[..8] != CACHE_MAGIC {
            return Err(PrimeError::Cache("bad magic".into()));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != CACHE_VERSION {
            return Err(PrimeError::Cache(format!("unsupported version {version}")));
        }
        let limit = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
        let count = u64::from_le_bytes(bytes[20..28].try_into().unwrap()) as usize;
        if bytes.len() != 28 + 8 * count {
            return Err(PrimeError::Cache("truncated prime list".into()));
        }
        let primes: Vec<u64> = bytes[28..]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if primes.windows(2).any(|w| w[0] >= w[1]) || primes.last().is_some_and(|&p| p > limit) {
            return Err(PrimeError::Cache("prime list not sorted within limit".into()));
        }
        Ok(Self::from_primes(limit, primes))
    }

    /// Loads the cache at `path` when it covers `limit`, otherwise sieves and rewrites it.
    pub fn cached(limit: u64, path: &Path) -> Result<Self, PrimeError> {
        if let Ok(t) = Self::load(path) {
            if t.limit >= limit {
                let n = t.count_upto(limit);
                let primes = t.primes[..n].to_vec();
                return Ok(Self::from_primes(limit, primes));
            }
        }
        let t = Self::new(limit)?;
        t.save(path)?;
        Ok(t)
    }
}

fn simple_sieve(n: usize) -> Vec<u64> {
    let mut is = vec![true; n + 1];
    is[0] = false;
    if n >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| is[k]).map(|k| k as u64).collect()
}

fn segmented_sieve(limit: u64) -> Vec<u64> {
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root as usize);
    if limit <= root {
        return base.into_iter().filter(|&p| p <= limit).collect();
    }
    let mut out: Vec<u64> = base.iter().copied().filter(|&p| p <= root).collect();
    const SEG: u64 = 1 << 18;
    let mut lo = root + 1;
    let mut mark = vec![true; SEG as usize];
    while lo <= limit {
        let hi = (lo + SEG - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        mark[..len].iter_mut().for_each(|m| *m = true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut start = lo.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut j = start;
            while j <= hi {
                mark[(j - lo) as usize] = false;
                j += p;
            }
        }
        out.extend((0..len).filter(|&i| mark[i]).map(|i| lo + i as u64));
        lo = hi + 1;
    }
    out
}

/// Which arithmetic weight multiplies `a(n) n^{-s}` at n = p^k.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    /// Λ(n)
    Lambda,
    /// Λ(n)/log n = 1/k
    LambdaOverLog,
    /// Λ(n)·log n, the derivative companion of `Lambda` up to sign.
    LambdaLog,
}

/// Σ_{lo < p^k <= hi} c(p^k) a(p)^k p^{-ks} for a completely multiplicative `a`.
pub fn prime_power_sum<F>(
    tbl: &PrimeTable,
    lo: u64,
    hi: u64,
    s: Complex64,
    coef: Coefficient,
    a: F,
) -> Result<Complex64, PrimeError>
where
    F: Fn(u64) -> Complex64,
{
    tbl.check(hi)?;
    let mut acc = ComplexSum::new();
    let n = tbl.count_upto(hi);
    for i in 0..n {
        let p = tbl.primes[i];
        let lp = tbl.logs[i];
        let ap = a(p);
        if ap.re == 0.0 && ap.im == 0.0 {
            continue;
        }
        let z = ap * (-s * lp).exp();
        let mut zk = z;
        let mut pk = p as u128;
        let mut k = 1u32;
        while pk <= hi as u128 {
            if pk > lo as u128 {
                let c = match coef {
                    Coefficient::Lambda => lp,
                    Coefficient::LambdaOverLog => 1.0 / k as f64,
                    Coefficient::LambdaLog => lp * lp * k as f64,
                };
                acc.add(zk * c);
            }
            pk *= p as u128;
            zk *= z;
            k += 1;
        }
    }
    Ok(acc.value())
}

/// Σ_{lo < p <= hi} a(p) p^{-s} over primes only.
pub fn prime_sum<F>(tbl: &PrimeTable, lo: u64, hi: u64, s: Complex64, a: F) -> Result<Complex64, PrimeError>
where
    F: Fn(u64) -> Complex64,
{
    tbl.check(hi)?;
    let start = tbl.count_upto(lo);
    let end = tbl.count_upto(hi);
    let mut acc = ComplexSum::new();
    for i in start..end {
        let p = tbl.primes[i];
        acc.add(a(p) * (-s * tbl.logs[i]).exp());
    }
    Ok(acc.value())
}

/// ψ(hi) − ψ(lo).
pub fn psi_range(tbl: &PrimeTable, lo: u64, hi: u64) -> Result<f64, PrimeError> {
    Ok(prime_power_sum(tbl, lo, hi, Complex64::new(0.0, 0.0), Coefficient::Lambda, |_| {
        Complex64::new(1.0, 0.0)
    })?
    .re)
}

/// Σ_{p<=x} log p / p.
pub fn mertens_log_over_p(tbl: &PrimeTable, x: u64) -> Result<f64, PrimeError> {
    tbl.check(x)?;
    let n = tbl.count_upto(x);
    Ok((0..n).map(|i| tbl.logs[i] / tbl.primes[i] as f64).collect::<KahanSum>().value())
}

/// Σ_{p<=x} log² p / p.
pub fn mertens_log2_over_p(tbl: &PrimeTable, x: u64) -> Result<f64, PrimeError> {
    tbl.check(x)?;
    let n = tbl.count_upto(x);
    Ok((0..n)
        .map(|i| tbl.logs[i] * tbl.logs[i] / tbl.primes[i] as f64)
        .collect::<KahanSum>()
        .value())
}

/// Σ_{y1 < p^k <= y2} Λ(p^k) / p^{ka} with prime powers enumerated exactly.
pub fn prime_power_tail(tbl: &PrimeTable, y1: u64, y2: u64, a: f64) -> Result<f64, PrimeError> {
    Ok(prime_power_sum(tbl, y1, y2, Complex64::new(a, 0.0), Coefficient::Lambda, |_| {
        Complex64::new(1.0, 0.0)
    })?
    .re)
}

fn check_coefficients<F>(tbl: &PrimeTable, x: u64, a: &F) -> Result<(), PrimeError>
where
    F: Fn(u64) -> Complex64,
{
    for &p in tbl.primes_upto(x) {
        let m = a(p).norm();
        if m > 1.0 + 1e-12 {
            return Err(PrimeError::CoefficientTooLarge { p, modulus: m });
        }
    }
    Ok(())
}

/// Both sides of the log-Euler-product identity and their difference.
#[derive(Clone, Copy, Debug)]
pub struct IdentityDefect {
    pub lambda_side: Complex64,
    pub prime_side: Complex64,
    pub defect: f64,
}

/// Σ_{1<n<=x} a(n)Λ(n)/(n^s log n) against Σ_{p<=x} log(1 − a(p)p^{-s})^{-1}.
pub fn log_euler_identity<F>(tbl: &PrimeTable, s: Complex64, x: u64, a: F) -> Result<IdentityDefect, PrimeError>
where
    F: Fn(u64) -> Complex64,
{
    check_coefficients(tbl, x, &a)?;
    let lambda_side = prime_power_sum(tbl, 1, x, s, Coefficient::LambdaOverLog, &a)?;
    let n = tbl.count_upto(x);
    let mut acc = ComplexSum::new();
    for i in 0..n {
        let w = a(tbl.primes[i]) * (-s * tbl.logs[i]).exp();
        acc.add(-(Complex64::new(1.0, 0.0) - w).ln());
    }
    let prime_side = acc.value();
    Ok(IdentityDefect {
        lambda_side,
        prime_side,
        defect: (lambda_side - prime_side).norm(),
    })
}

/// Σ_{n<=x} a(n)Λ(n)/n^s against Σ_{p<=x} a(p) log p/(p^s − a(p)).
pub fn linear_euler_identity<F>(tbl: &PrimeTable, s: Complex64, x: u64, a: F) -> Result<IdentityDefect, PrimeError>
where
    F: Fn(u64) -> Complex64,
{
    check_coefficients(tbl, x, &a)?;
    let lambda_side = prime_power_sum(tbl, 1, x, s, Coefficient::Lambda, &a)?;
    Ok(IdentityDefect {
        lambda_side,
        prime_side: prime_linear_form(tbl, s, x, &a)?,
        defect: 0.0,
    }
    .finish())
}

impl IdentityDefect {
    fn finish(mut self) -> Self {
        self.defect = (self.lambda_side - self.prime_side).norm();
        self
    }
}

/// Σ_{p<=x} a(p) log p/(p^s − a(p)).
pub fn prime_linear_form<F>(tbl: &PrimeTable, s: Complex64, x: u64, a: F) -> Result<Complex64, PrimeError>
where
    F: Fn(u64) -> Complex64,
{
    tbl.check(x)?;
    let n = tbl.count_upto(x);
    let mut acc = ComplexSum::new();
    for i in 0..n {
        let ap = a(tbl.primes[i]);
        let ps = (s * tbl.logs[i]).exp();
        acc.add(ap * tbl.logs[i] / (ps - ap));
    }
    Ok(acc.value())
}

/// Σ_{p<=x} log p/(ā(p) p^s − 1), valid for |a(p)| = 1.
pub fn unimodular_prime_form<F>(tbl: &PrimeTable, s: Complex64, x: u64, a: F) -> Result<Complex64, PrimeError>
where
    F: Fn(u64) -> Complex64,
{
    tbl.check(x)?;
    let n = tbl.count_upto(x);
    let mut acc = ComplexSum::new();
    for i in 0..n {
        let ap = a(tbl.primes[i]);
        let ps = (s * tbl.logs[i]).exp();
        acc.add(tbl.logs[i] / (ap.conj() * ps - 1.0));
    }
    Ok(acc.value())
}

/// Linear Perron-type weight: 1 up to x, log(xy/u)/log y on (x, xy], 0 beyond.
#[derive(Clone, Copy, Debug)]
pub struct PerronWeight {
    pub x: f64,
    pub y: f64,
}

impl PerronWeight {
    pub fn new(x: f64) -> Self {
        PerronWeight { x, y: 2.0 }
    }

    pub fn weight(&self, u: f64) -> f64 {
        if u <= self.x {
            1.0
        } else if u <= self.x * self.y {
            (self.x * self.y / u).ln() / self.y.ln()
        } else {
            0.0
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PerronComparison {
    pub weighted: Complex64,
    pub unweighted: Complex64,
    pub defect: f64,
    /// defect / (x^{-σ} Σ_{x<n<=xy} Λ(n)); at most 1 by the triangle inequality.
    pub normalized: f64,
}

/// Σ_{n<=xy} w(n) a(n)Λ(n)/n^s compared with the sharp cut at x.
pub fn perron_weighted_sum<F>(
    tbl: &PrimeTable,
    s: Complex64,
    a: F,
    pw: PerronWeight,
) -> Result<PerronComparison, PrimeError>
where
    F: Fn(u64) -> Complex64,
{
    let x = pw.x.floor() as u64;
    let top = (pw.x * pw.y).floor() as u64;
    tbl.check(top)?;
    let unweighted = prime_power_sum(tbl, 1, x, s, Coefficient::Lambda, &a)?;
    let mut acc = ComplexSum::new();
    for i in 0..tbl.count_upto(top) {
        let p = tbl.primes[i];
        let lp = tbl.logs[i];
        let z = a(p) * (-s * lp).exp();
        let mut zk = z;
        let mut pk = p as u128;
        while pk <= top as u128 {
            if pk > x as u128 {
                acc.add(zk * lp * pw.weight(pk as f64));
            }
            pk *= p as u128;
            zk *= z;
        }
    }
    let extra = acc.value();
    let scale = pw.x.powf(-s.re) * psi_range(tbl, x, top)?;
    Ok(PerronComparison {
        weighted: unweighted + extra,
        unweighted,
        defect: extra.norm(),
        normalized: extra.norm() / scale,
    })
}

/// A truncated tail sum and a rigorous bound on what was dropped beyond the cutoff.
#[derive(Clone, Copy, Debug)]
pub struct TailEstimate {
    pub value: Complex64,
    pub bound: f64,
}

/// Σ_{n > c} n^{-σ} <= c^{1-σ}/(σ-1).
fn integer_tail(c: f64, sigma: f64) -> f64 {
    c.powf(1.0 - sigma) / (sigma - 1.0)
}

/// Σ_{n > c} log n · n^{-σ} <= c^{1-σ}(log c/(σ-1) + 1/(σ-1)²), c > e^{1/σ}.
fn integer_log_tail(c: f64, sigma: f64) -> f64 {
    let d = sigma - 1.0;
    c.powf(-d) * (c.ln() / d + 1.0 / (d * d))
}

fn require_sigma(s: Complex64) -> Result<(), PrimeError> {
    if s.re > 1.0 {
        Ok(())
    } else {
        Err(PrimeError::SigmaNotAboveOne(s.re))
    }
}

/// T_x(s) = Σ_{p > x} χ(p) p^{-s}, summed to `cutoff`.
pub fn tail_t(
    tbl: &PrimeTable,
    s: Complex64,
    x: u64,
    chr: &DirichletCharacter,
    cutoff: u64,
) -> Result<TailEstimate, PrimeError> {
    require_sigma(s)?;
    Ok(TailEstimate {
        value: prime_sum(tbl, x, cutoff, s, |p| chr.eval(p))?,
        bound: integer_tail(cutoff as f64, s.re),
    })
}

/// Q_x(s) = Σ_{p > x} p^{-s}.
pub fn tail_q(tbl: &PrimeTable, s: Complex64, x: u64, cutoff: u64) -> Result<TailEstimate, PrimeError> {
    require_sigma(s)?;
    Ok(TailEstimate {
        value: prime_sum(tbl, x, cutoff, s, |_| Complex64::new(1.0, 0.0))?,
        bound: integer_tail(cutoff as f64, s.re),
    })
}

/// Q'_x(s) = −Σ_{p > x} log p · p^{-s}.
pub fn tail_q_prime(tbl: &PrimeTable, s: Complex64, x: u64, cutoff: u64) -> Result<TailEstimate, PrimeError> {
    require_sigma(s)?;
    tbl.check(cutoff)?;
    let mut acc = ComplexSum::new();
    for i in tbl.count_upto(x)..tbl.count_upto(cutoff) {
        acc.add(-(-s * tbl.logs[i]).exp() * tbl.logs[i]);
    }
    Ok(TailEstimate {
        value: acc.value(),
        bound: integer_log_tail(cutoff as f64, s.re),
    })
}

/// Twisted variants: the same tails at s + iτ, with p^{-iτ} supplied by `phase`.
pub fn tail_t_twisted<F>(
    tbl: &PrimeTable,
    s: Complex64,
    x: u64,
    chr: &DirichletCharacter,
    cutoff: u64,
    phase: F,
) -> Result<TailEstimate, PrimeError>
where
    F: Fn(u64) -> Complex64,
{
    require_sigma(s)?;
    Ok(TailEstimate {
        value: prime_sum(tbl, x, cutoff, s, |p| chr.eval(p) * phase(p))?,
        bound: integer_tail(cutoff as f64, s.re),
    })
}

pub fn tail_q_prime_twisted<F>(
    tbl: &PrimeTable,
    s: Complex64,
    x: u64,
    cutoff: u64,
    phase: F,
) -> Result<TailEstimate, PrimeError>
where
    F: Fn(u64) -> Complex64,
{
    require_sigma(s)?;
    tbl.check(cutoff)?;
    let mut acc = ComplexSum::new();
    for i in tbl.count_upto(x)..tbl.count_upto(cutoff) {
        acc.add(-(-s * tbl.logs[i]).exp() * tbl.logs[i] * phase(tbl.primes[i]));
    }
    Ok(TailEstimate {
        value: acc.value(),
        bound: integer_log_tail(cutoff as f64, s.re),
    })
}

/// Absolutely convergent Σ_{n>=1} Λ(n) a(n) n^{-s} for σ > 1, truncated at `cutoff`
/// with the dropped part bounded by Σ_{n>cutoff} log n · n^{-σ}.
pub fn lambda_series_abs<F>(
    tbl: &PrimeTable,
    s: Complex64,
    cutoff: u64,
    a: F,
) -> Result<TailEstimate, PrimeError>
where
    F: Fn(u64) -> Complex64,
{
    require_sigma(s)?;
    Ok(TailEstimate {
        value: prime_power_sum(tbl, 0, cutoff, s, Coefficient::Lambda, a)?,
        bound: integer_log_tail(cutoff as f64, s.re),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_primes(n: u64) -> Vec<u64> {
        (2..=n).filter(|&k| (2..).take_while(|d| d * d <= k).all(|d| k % d != 0)).collect()
    }

    #[test]
    fn guard_rejects_out_of_range() {
        assert!(matches!(PrimeTable::new(1), Err(PrimeError::RangeGuard(1))));
        assert!(PrimeTable::new(MAX_SIEVE_LIMIT + 1).is_err());
        assert_eq!(PrimeTable::new(2).unwrap().primes(), &[2]);
    }

    #[test]
    fn sieve_matches_trial_division() {
        for n in [2u64, 3, 10, 97, 1000, 70_001] {
            assert_eq!(PrimeTable::new(n).unwrap().primes(), &trial_division_primes(n)[..]);
        }
    }

    #[test]
    fn prime_counts() {
        let t = PrimeTable::new(1_000_000).unwrap();
        assert_eq!(t.count_upto(1_000_000), 78_498);
        assert_eq!(t.count_upto(100), 25);
    }

    #[test]
    fn cache_roundtrip_and_rejection() {
        let dir = std::env::temp_dir().join(format!("lcrit-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("p.bin");
        let t = PrimeTable::new(10_000).unwrap();
        t.save(&path).unwrap();
        let u = PrimeTable::load(&path).unwrap();
        assert_eq!(t.primes(), u.primes());
        let small = PrimeTable::cached(5_000, &path).unwrap();
        assert_eq!(small.len(), 669);
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[8] = 9;
        std::fs::write(&path, &bytes).unwrap();
        assert!(PrimeTable::load(&path).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn mertens_residual_stabilizes() {
        let t = PrimeTable::new(1_000_000).unwrap();
        let r5 = mertens_log_over_p(&t, 100_000).unwrap() - 1e5f64.ln();
        let r6 = mertens_log_over_p(&t, 1_000_000).unwrap() - 1e6f64.ln();
        assert!((r5 - r6).abs() < 0.01);
        assert!((r6 + 1.3325822757).abs() < 0.01);
    }

    #[test]
    fn tail_two_vs_direct_primes() {
        let t = PrimeTable::new(1_000_000).unwrap();
        let est = tail_q(&t, Complex64::new(2.0, 0.0), 1000, 1_000_000).unwrap();
        let direct: f64 = trial_division_primes(1_000_000)
            .iter()
            .filter(|&&p| p > 1000)
            .map(|&p| 1.0 / (p as f64 * p as f64))
            .sum();
        assert!((est.value.re - direct).abs() < 1e-8);
        assert!(est.bound < 1e-5);
    }

    #[test]
    fn coefficient_modulus_is_checked() {
        let t = PrimeTable::new(100).unwrap();
        let r = log_euler_identity(&t, Complex64::new(1.0, 0.0), 100, |_| Complex64::new(1.5, 0.0));
        assert!(matches!(r, Err(PrimeError::CoefficientTooLarge { p: 2, .. })));
    }

    #[test]
    fn perron_weight_shape() {
        let w = PerronWeight::new(100.0);
        assert_eq!(w.weight(50.0), 1.0);
        assert!((w.weight(141.42135623730951) - 0.5).abs() < 1e-12);
        assert_eq!(w.weight(201.0), 0.0);
    }
}
