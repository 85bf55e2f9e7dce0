//! Explicit shifts τ with ‖τ log p/2π − U_p‖ small for every prime p <= x.
//!
//! Writing τ = 2π(K + U₂)/log 2 settles the prime 2 exactly; the remaining
//! primes give an inhomogeneous simultaneous approximation problem in the
//! integer K, solved by LLL reduction of an integer lattice and Babai
//! rounding with a greedy polish. τ can be astronomically large, so it is
//! carried as a big float and phases p^{−iτ} are reduced mod 2π in extended
//! precision.

use crate::auxseries::WeightScheme;
use crate::characters::Angle;
use crate::hp::{self, RM};
use crate::primesums::PrimeTable;
use astro_float::BigFloat;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum DiophantineError {
    #[error("no target primes")]
    NoTargets,
    #[error("tolerance {0} outside (0, 1/2)")]
    Tolerance(f64),
    #[error("target list lengths differ")]
    Shape,
    #[error("empty or invalid interval [{0}, {1}]")]
    Interval(f64, f64),
    #[error("sweep strategy handles at most {max} primes, got {got}")]
    SweepTooLarge { max: usize, got: usize },
    #[error("cannot parse tau: {0}")]
    Parse(String),
}

// ---------------------------------------------------------------------------
// Targets

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AngleTargets {
    pub primes: Vec<u64>,
    /// U_p as exact turns in [0, 1).
    pub targets: Vec<Angle>,
    pub tolerance: f64,
}

impl AngleTargets {
    pub fn new(primes: Vec<u64>, targets: Vec<Angle>, tolerance: f64) -> Result<Self, DiophantineError> {
        if primes.is_empty() {
            return Err(DiophantineError::NoTargets);
        }
        if primes.len() != targets.len() {
            return Err(DiophantineError::Shape);
        }
        if !(tolerance > 0.0 && tolerance < 0.5) {
            return Err(DiophantineError::Tolerance(tolerance));
        }
        Ok(Self {
            primes,
            targets,
            tolerance,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Result<Self, DiophantineError> {
        if !(tol > 0.0 && tol < 0.5) {
            return Err(DiophantineError::Tolerance(tol));
        }
        self.tolerance = tol;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// The unit complex number a target asks p^{−iτ} to equal: e^{−2πiU_p}.
    pub fn weight(&self, i: usize) -> Complex64 {
        self.targets[i].neg().to_complex()
    }
}

/// U_p = −arg(w(p))/2π mod 1 for every prime p <= x, tolerance 1/log²x.
pub fn targets_from_scheme(scheme: &WeightScheme, tbl: &PrimeTable) -> AngleTargets {
    let x = scheme.params.x_int();
    let primes: Vec<u64> = tbl.primes_upto(x).to_vec();
    let targets = primes
        .iter()
        .map(|&p| scheme.angle(p).expect("prime within x").neg())
        .collect();
    let l = scheme.params.log_x();
    AngleTargets {
        primes,
        targets,
        tolerance: (1.0 / (l * l)).min(0.49),
    }
}

// ---------------------------------------------------------------------------
// τ in extended precision

/// A real shift τ with enough bits to reduce τ log p mod 2π exactly in double.
#[derive(Clone, Debug)]
pub struct Tau {
    value: BigFloat,
    bits: usize,
}

fn tau_bits_for(v: &BigFloat) -> usize {
    let e = v.exponent().unwrap_or(0).max(0) as usize;
    (e + 160).max(192)
}

impl Tau {
    pub fn from_f64(t: f64) -> Self {
        let bits = 192usize.max(t.abs().log2().max(0.0) as usize + 160);
        Self {
            value: BigFloat::from_f64(t, bits),
            bits,
        }
    }

    pub fn from_big(value: BigFloat) -> Self {
        let bits = tau_bits_for(&value);
        let mut v = value;
        let _ = v.set_precision(bits, RM);
        Self { value: v, bits }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn as_big(&self) -> &BigFloat {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        hp::to_f64(&self.value)
    }

    /// log₁₀ τ (for reporting and the truncation height of proxies).
    pub fn log10(&self) -> f64 {
        let f = self.to_f64();
        if f.is_finite() {
            f.abs().log10()
        } else {
            f64::INFINITY
        }
    }

    /// frac(τ log p / 2π) in [0, 1).
    pub fn phase_turns(&self, p: u64) -> f64 {
        let mut cc = hp::consts();
        self.phase_turns_with(p, &mut cc)
    }

    fn phase_turns_with(&self, p: u64, cc: &mut astro_float::Consts) -> f64 {
        let b = self.bits + 64;
        let lp = BigFloat::from_u64(p, b).ln(b, RM, cc);
        let two_pi = cc.pi(b, RM).mul(&BigFloat::from_u64(2, b), b, RM);
        let t = self.value.mul(&lp, b, RM).div(&two_pi, b, RM);
        hp::to_f64(&hp::frac01(&t, b))
    }

    /// p^{−iτ}.
    pub fn p_minus_i_tau(&self, p: u64) -> Complex64 {
        Angle_from_turns(self.phase_turns(p))
    }
}

#[allow(non_snake_case)]
fn Angle_from_turns(turns: f64) -> Complex64 {
    let (s, c) = (2.0 * std::f64::consts::PI * turns).sin_cos();
    Complex64::new(c, -s)
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut cc = hp::consts();
        write!(f, "{}", hp::to_decimal(&self.value, &mut cc))
    }
}

impl FromStr for Tau {
    type Err = DiophantineError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // Digits carried fix the precision: ~3.33 bits per digit, plus slack.
        let digits = s.chars().filter(|c| c.is_ascii_digit()).count();
        let bits = (digits as f64 * 3.33) as usize + 64;
        let mut cc = hp::consts();
        let v = hp::parse_decimal(s, bits.max(192), &mut cc).ok_or_else(|| DiophantineError::Parse(s.to_string()))?;
        Ok(Tau::from_big(v))
    }
}

impl Serialize for Tau {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Tau {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Precomputed p^{−iτ} for all primes up to a limit.
#[derive(Clone, Debug)]
pub struct PhaseTable {
    primes: Vec<u64>,
    phases: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(tau: &Tau, tbl: &PrimeTable, limit: u64) -> Self {
        let primes = tbl.primes_upto(limit).to_vec();
        let mut cc = hp::consts();
        let phases = primes
            .iter()
            .map(|&p| Angle_from_turns(tau.phase_turns_with(p, &mut cc)))
            .collect();
        Self { primes, phases }
    }

    /// Double-precision phases, adequate while |τ| log p stays well below 2^40.
    pub fn from_f64(tau: f64, tbl: &PrimeTable, limit: u64) -> Self {
        let primes = tbl.primes_upto(limit).to_vec();
        let phases = tbl.logs()[..primes.len()]
            .iter()
            .map(|&lp| Complex64::from_polar(1.0, -tau * lp))
            .collect();
        Self { primes, phases }
    }

    pub fn limit(&self) -> u64 {
        self.primes.last().copied().unwrap_or(0)
    }

    /// p^{−iτ}; primes beyond the table yield NaN so misuse is visible.
    pub fn get(&self, p: u64) -> Complex64 {
        match self.primes.binary_search(&p) {
            Ok(i) => self.phases[i],
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    }
}

// ---------------------------------------------------------------------------
// Defects

/// ‖frac − U‖ for one prime.
fn circular_distance(turns: f64, target: f64) -> f64 {
    let d = (turns - target).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Per-prime distances ‖τ log p/2π − U_p‖.
pub fn defects(tau: &Tau, targets: &AngleTargets) -> Vec<f64> {
    let mut cc = hp::consts();
    targets
        .primes
        .iter()
        .zip(&targets.targets)
        .map(|(&p, u)| circular_distance(tau.phase_turns_with(p, &mut cc), u.as_turns()))
        .collect()
}

/// max_p ‖τ log p/2π − U_p‖.
pub fn kronecker_defect(tau: &Tau, targets: &AngleTargets) -> f64 {
    defects(tau, targets).into_iter().fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Certificates

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    Auto,
    Lattice,
    Sweep,
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "lattice" => Ok(Self::Lattice),
            "sweep" => Ok(Self::Sweep),
            _ => Err(format!("unknown strategy {s:?}")),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchOptions {
    pub strategy: Strategy,
    pub seed: u64,
    /// Largest search half-width, in bits of K.
    pub max_height_bits: u32,
    /// Height increment between lattice attempts.
    pub height_step_bits: u32,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::Auto,
            seed: 0,
            max_height_bits: 480,
            height_step_bits: 8,
        }
    }
}

pub const SWEEP_MAX_PRIMES: usize = 8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TauCertificate {
    pub tau: Tau,
    #[serde(rename = "T_min")]
    pub t_min: f64,
    #[serde(rename = "T_max", with = "unbounded")]
    pub t_max: f64,
    pub tolerance: f64,
    pub primes: Vec<u64>,
    pub defects: Vec<f64>,
    pub max_defect: f64,
    pub weight_defects: Vec<f64>,
    pub seed: u64,
    pub success: bool,
    pub strategy: Strategy,
    /// log₁₀ τ, for quick reading.
    pub log10_tau: f64,
    /// Expected number of admissible K in the searched window was below 1.
    pub resolution_flag: bool,
}

impl TauCertificate {
    fn build(
        tau: Tau,
        targets: &AngleTargets,
        interval: (f64, f64),
        opts: &SearchOptions,
        strategy: Strategy,
        resolution_flag: bool,
    ) -> Self {
        // Canonicalize through the decimal form so a reader recomputes the
        // same values from the serialized τ.
        let tau: Tau = tau.to_string().parse().expect("round trip of own output");
        let d = defects(&tau, targets);
        let max_defect = d.iter().copied().fold(0.0, f64::max);
        let mut cc = hp::consts();
        let weight_defects = targets
            .primes
            .iter()
            .enumerate()
            .map(|(i, &p)| (Angle_from_turns(tau.phase_turns_with(p, &mut cc)) - targets.weight(i)).norm())
            .collect();
        Self {
            log10_tau: tau.log10(),
            tau,
            t_min: interval.0,
            t_max: interval.1,
            tolerance: targets.tolerance,
            primes: targets.primes.clone(),
            defects: d,
            max_defect,
            weight_defects,
            seed: opts.seed,
            success: max_defect <= targets.tolerance,
            strategy,
            resolution_flag,
        }
    }

    /// Recomputes every defect from (τ, targets) and compares exactly.
    pub fn revalidate(&self, targets: &AngleTargets) -> bool {
        let tau: Tau = match self.tau.to_string().parse() {
            Ok(t) => t,
            Err(_) => return false,
        };
        let d = defects(&tau, targets);
        d == self.defects && d.iter().copied().fold(0.0, f64::max) == self.max_defect
    }
}

/// Infinite interval ends travel as the string "inf".
mod unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad interval end {t:?}"))),
        }
    }
}

/// Finds τ in [t_min, t_max] meeting every target within tolerance, or the
/// best candidate found with `success = false`.
pub fn find_tau(
    targets: &AngleTargets,
    t_min: f64,
    t_max: f64,
    opts: &SearchOptions,
) -> Result<TauCertificate, DiophantineError> {
    if targets.is_empty() {
        return Err(DiophantineError::NoTargets);
    }
    if !(t_min >= 0.0) || !(t_max > t_min) {
        return Err(DiophantineError::Interval(t_min, t_max));
    }
    let strategy = match opts.strategy {
        Strategy::Auto => {
            let need = required_height_bits(targets);
            if targets.len() <= SWEEP_MAX_PRIMES && need <= 34.0 {
                Strategy::Sweep
            } else {
                Strategy::Lattice
            }
        }
        s => s,
    };
    match strategy {
        Strategy::Sweep => sweep_search(targets, t_min, t_max, opts),
        _ => lattice_search(targets, t_min, t_max, opts),
    }
}

/// log₂ of the K-window half-width at which one admissible K is expected.
fn required_height_bits(targets: &AngleTargets) -> f64 {
    let d = targets.len().saturating_sub(1) as f64;
    d * (1.0 / (2.0 * targets.tolerance)).log2() - 1.0
}

/// U₂ and τ ↔ K conversion: τ = 2π(K + U_first)/log p_first.
struct Frame {
    p0: u64,
    u0: f64,
    bits: usize,
    /// log p_j / log p0 for the remaining primes, big floats.
    betas: Vec<BigFloat>,
    /// log p_j / log p0 − floor, as doubles (sweep only)
    betas_f: Vec<f64>,
    /// U_j − U0 β_j.
    offsets: Vec<BigFloat>,
}

impl Frame {
    fn new(targets: &AngleTargets, bits: usize) -> Self {
        let mut cc = hp::consts();
        let p0 = targets.primes[0];
        let u0 = targets.targets[0].as_turns();
        let l0 = BigFloat::from_u64(p0, bits).ln(bits, RM, &mut cc);
        let u0b = angle_big(targets.targets[0], bits);
        let mut betas = Vec::new();
        let mut betas_f = Vec::new();
        let mut offsets = Vec::new();
        for (i, &p) in targets.primes.iter().enumerate().skip(1) {
            let b = BigFloat::from_u64(p, bits).ln(bits, RM, &mut cc).div(&l0, bits, RM);
            betas_f.push(hp::to_f64(&hp::frac01(&b, bits)));
            let off = angle_big(targets.targets[i], bits).sub(&u0b.mul(&b, bits, RM), bits, RM);
            offsets.push(off);
            betas.push(b);
        }
        Self {
            p0,
            u0,
            bits,
            betas,
            betas_f,
            offsets,
        }
    }

    fn k_of_tau(&self, tau: f64) -> f64 {
        tau * (self.p0 as f64).ln() / (2.0 * std::f64::consts::PI) - self.u0
    }

    fn tau_of_k(&self, k: &BigInt, targets: &AngleTargets) -> Tau {
        let b = self.bits;
        let mut cc = hp::consts();
        let kf = hp::from_bigint(k, b).add(&angle_big(targets.targets[0], b), b, RM);
        let two_pi = cc.pi(b, RM).mul(&BigFloat::from_u64(2, b), b, RM);
        let l0 = BigFloat::from_u64(self.p0, b).ln(b, RM, &mut cc);
        Tau::from_big(kf.mul(&two_pi, b, RM).div(&l0, b, RM))
    }
}

fn angle_big(a: Angle, bits: usize) -> BigFloat {
    BigFloat::from_u64(a.num, bits).div(&BigFloat::from_u64(a.den, bits), bits, RM)
}

fn big_from_f64_floor(v: f64) -> BigInt {
    hp::floor_bigint(&BigFloat::from_f64(v, 64))
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

// --- sweep --------------------------------------------------------------

fn sweep_search(
    targets: &AngleTargets,
    t_min: f64,
    t_max: f64,
    opts: &SearchOptions,
) -> Result<TauCertificate, DiophantineError> {
    if targets.len() > SWEEP_MAX_PRIMES {
        return Err(DiophantineError::SweepTooLarge {
            max: SWEEP_MAX_PRIMES,
            got: targets.len(),
        });
    }
    let frame = Frame::new(targets, 192);
    let tol = targets.tolerance;
    let k_lo = frame.k_of_tau(t_min).ceil();
    let budget = 2f64.powi(40);
    let k_hi = frame.k_of_tau(t_max).floor().min(k_lo + budget);
    let flag = (k_hi - k_lo + 1.0) * (2.0 * tol).powi(targets.len() as i32 - 1) < 1.0;
    let offs: Vec<f64> = frame.offsets.iter().map(|o| hp::to_f64(&hp::frac01(o, 192))).collect();
    // Defect of prime j at integer K, in double precision.
    let defect = |j: usize, k: f64| circular_distance(k * frame.betas_f[j], offs[j]);
    let all_ok = |k: f64| (0..offs.len()).all(|j| defect(j, k) <= tol * 0.999);
    let score = |k: f64| (0..offs.len()).map(|j| defect(j, k)).fold(0.0, f64::max);

    let mut best = (f64::INFINITY, k_lo);
    if offs.is_empty() {
        best = (0.0, k_lo);
    } else {
        // Walk the hits of the first remaining prime using the three-gap
        // structure of the rotation by β₁ on the window [U − tol, U + tol).
        let alpha = frame.betas_f[0];
        let w = 2.0 * tol;
        let c = offs[0] - tol;
        let y = |k: f64| (k * alpha - c).rem_euclid(1.0);
        let small = |g: u64| {
            let f = (g as f64 * alpha).rem_euclid(1.0);
            f
        };
        let mut a = 1u64;
        while small(a) >= w {
            a += 1;
        }
        let mut b = 1u64;
        while small(b) <= 1.0 - w {
            b += 1;
        }
        let (fa, fb) = (small(a), 1.0 - small(b));
        let mut k = k_lo;
        while k <= k_hi && y(k) >= w {
            k += 1.0;
        }
        while k <= k_hi {
            let sc = score(k);
            if sc < best.0 {
                best = (sc, k);
            }
            if all_ok(k) {
                break;
            }
            let yk = y(k);
            let next = if yk + fa < w {
                k + a as f64
            } else if yk - fb >= 0.0 {
                k + b as f64
            } else {
                k + (a + b) as f64
            };
            k = next;
            if y(k) >= w {
                // Rounding drifted off the hit set: rescan linearly.
                while k <= k_hi && y(k) >= w {
                    k += 1.0;
                }
            }
        }
    }
    let kb = big_from_f64_floor(best.1);
    let tau = frame.tau_of_k(&kb, targets);
    Ok(TauCertificate::build(tau, targets, (t_min, t_max), opts, Strategy::Sweep, flag))
}

// --- lattice ------------------------------------------------------------

fn lattice_search(
    targets: &AngleTargets,
    t_min: f64,
    t_max: f64,
    opts: &SearchOptions,
) -> Result<TauCertificate, DiophantineError> {
    let tol = targets.tolerance;
    let d = targets.len() - 1;
    let need = required_height_bits(targets).max(4.0);
    let frame0 = Frame::new(targets, 128);
    let k_min_f = frame0.k_of_tau(t_min).ceil();
    let k_max_f = frame0.k_of_tau(t_max).floor();
    if !(k_max_f >= k_min_f) {
        return Err(DiophantineError::Interval(t_min, t_max));
    }
    let span_bits = if k_max_f.is_finite() {
        ((k_max_f - k_min_f) / 2.0).max(1.0).log2()
    } else {
        f64::INFINITY
    };
    let k_min = big_from_f64_floor(k_min_f);

    if d == 0 {
        let tau = frame0.tau_of_k(&k_min, targets);
        return Ok(TauCertificate::build(tau, targets, (t_min, t_max), opts, Strategy::Lattice, false));
    }

    let max_bits = (opts.max_height_bits as f64).min(span_bits);
    let resolution_flag = max_bits < need;
    let mut h_bits = need.min(max_bits).ceil() as u32;
    let mut best: Option<TauCertificate> = None;
    loop {
        let cert = lattice_attempt(targets, &k_min, h_bits, tol, d, (t_min, t_max), opts, resolution_flag);
        let done = cert.success;
        if best.as_ref().map_or(true, |b| cert.max_defect < b.max_defect) {
            best = Some(cert);
        }
        if done {
            break;
        }
        let next = h_bits + opts.height_step_bits.max(1);
        if next as f64 > max_bits {
            break;
        }
        h_bits = next;
    }
    Ok(best.expect("at least one attempt"))
}

#[allow(clippy::too_many_arguments)]
fn lattice_attempt(
    targets: &AngleTargets,
    k_min: &BigInt,
    h_bits: u32,
    tol: f64,
    d: usize,
    interval: (f64, f64),
    opts: &SearchOptions,
    resolution_flag: bool,
) -> TauCertificate {
    // R = 2^P, P large enough that rounding Rβ costs < 2^-24 tol over |k| <= H.
    let p_bits = h_bits as usize + 48 + (1.0 / tol).log2().ceil() as usize;
    let bits = p_bits + h_bits as usize + 96;
    let frame = Frame::new(targets, bits);
    let h = BigInt::one() << h_bits as usize;
    let k0 = k_min + &h;
    let r = BigInt::one() << p_bits;
    let rf = BigFloat::from_u64(1, bits).mul(&hp::from_bigint(&r, bits), bits, RM);
    // W = R tol / H
    let w = {
        let v = (&r >> h_bits as usize).to_f64().unwrap_or(1.0) * tol;
        let wb = BigFloat::from_f64(v, 64);
        let w = hp::floor_bigint(&wb);
        if w.is_zero() {
            BigInt::one()
        } else {
            w
        }
    };
    let n = d + 1;
    // Rows: b_0 = (Rβ_1..Rβ_d, W), b_j = R e_j.
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    let mut row0: Vec<BigInt> = frame
        .betas
        .iter()
        .map(|b| hp::round_bigint(&b.mul(&rf, bits, RM), bits))
        .collect();
    row0.push(w.clone());
    basis.push(row0);
    for j in 0..d {
        let mut row = vec![BigInt::zero(); n];
        row[j] = r.clone();
        basis.push(row);
    }
    // Target: R·frac(U_j − U0β_j − K0β_j), last coordinate 0.
    let k0f = hp::from_bigint(&k0, bits);
    let mut target: Vec<BigInt> = (0..d)
        .map(|j| {
            let v = frame.offsets[j].sub(&k0f.mul(&frame.betas[j], bits, RM), bits, RM);
            hp::round_bigint(&hp::frac01(&v, bits).mul(&rf, bits, RM), bits)
        })
        .collect();
    target.push(BigInt::zero());

    let scale = p_bits as i32;
    lll_reduce(&mut basis, 0.99, scale);
    let v = babai(&basis, &target, scale);
    let mut residual: Vec<BigInt> = target.iter().zip(&v).map(|(t, x)| t - x).collect();
    polish(&basis, &mut residual, scale);
    // Lattice vector = target − residual; its last coordinate is k·W.
    let last = &target[d] - &residual[d];
    let k_off = &last / &w;
    let k = &k0 + k_off;
    let tau = frame.tau_of_k(&k, targets);
    TauCertificate::build(tau, targets, interval, opts, Strategy::Lattice, resolution_flag)
}

fn scaled(v: &[BigInt], scale: i32) -> Vec<f64> {
    let f = 2f64.powi(-scale);
    v.iter().map(|x| big_to_f64(x) * f).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn exact_dot(a: &[BigInt], b: &[BigInt], scale: i32) -> f64 {
    let s: BigInt = a.iter().zip(b).map(|(x, y)| x * y).sum();
    big_to_f64(&s) * 2f64.powi(-scale) * 2f64.powi(-scale)
}

/// Schnorr–Euchner LLL: exact integer basis, double-precision Gram–Schmidt.
fn lll_reduce(b: &mut [Vec<BigInt>], delta: f64, scale: i32) {
    let n = b.len();
    let mut bf: Vec<Vec<f64>> = b.iter().map(|r| scaled(r, scale)).collect();
    let mut mu = vec![vec![0.0f64; n]; n];
    let mut rr = vec![vec![0.0f64; n]; n];
    let mut k = 1usize;
    rr[0][0] = dot(&bf[0], &bf[0]);
    let max_iter = 200_000 * n;
    let mut iter = 0;
    while k < n && iter < max_iter {
        iter += 1;
        // size reduction of b_k, repeated while large coefficients appear
        loop {
            let nk = dot(&bf[k], &bf[k]).sqrt();
            for j in 0..k {
                let mut s = dot(&bf[k], &bf[j]);
                let nj = dot(&bf[j], &bf[j]).sqrt();
                if s.abs() < 1e-7 * nk * nj {
                    s = exact_dot(&b[k], &b[j], scale);
                }
                rr[k][j] = s - (0..j).map(|i| mu[j][i] * rr[k][i]).sum::<f64>();
                mu[k][j] = rr[k][j] / rr[j][j];
            }
            let big = (0..k).any(|j| mu[k][j].abs() > 0.51);
            if !big {
                break;
            }
            for j in (0..k).rev() {
                let c = mu[k][j].round();
                if c != 0.0 {
                    let cb = BigInt::from_f64_round(c);
                    let bj = b[j].clone();
                    for (x, y) in b[k].iter_mut().zip(&bj) {
                        *x -= &cb * y;
                    }
                    for i in 0..j {
                        mu[k][i] -= c * mu[j][i];
                    }
                    mu[k][j] -= c;
                }
            }
            bf[k] = scaled(&b[k], scale);
        }
        let sk = dot(&bf[k], &bf[k]) - (0..k).map(|j| mu[k][j] * rr[k][j]).sum::<f64>();
        rr[k][k] = sk;
        if delta * rr[k - 1][k - 1] > sk + mu[k][k - 1] * mu[k][k - 1] * rr[k - 1][k - 1] {
            b.swap(k, k - 1);
            bf.swap(k, k - 1);
            if k > 1 {
                k -= 1;
            } else {
                rr[0][0] = dot(&bf[0], &bf[0]);
            }
        } else {
            k += 1;
        }
    }
    if iter >= max_iter {
        log::warn!("LLL stopped after {iter} iterations");
    }
}

trait FromF64Round {
    fn from_f64_round(v: f64) -> Self;
}

impl FromF64Round for BigInt {
    fn from_f64_round(v: f64) -> Self {
        hp::floor_bigint(&BigFloat::from_f64(v.round(), 64))
    }
}

/// Gram–Schmidt vectors of the reduced basis in double precision.
fn gso(b: &[Vec<BigInt>], scale: i32) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(b.len());
    for row in b {
        let mut v = scaled(row, scale);
        for s in &out {
            let c = dot(&v, s) / dot(s, s);
            for (x, y) in v.iter_mut().zip(s) {
                *x -= c * y;
            }
        }
        out.push(v);
    }
    out
}

/// Babai nearest plane; returns the lattice vector.
fn babai(b: &[Vec<BigInt>], target: &[BigInt], scale: i32) -> Vec<BigInt> {
    let g = gso(b, scale);
    let mut t = target.to_vec();
    for i in (0..b.len()).rev() {
        let tf = scaled(&t, scale);
        let c = (dot(&tf, &g[i]) / dot(&g[i], &g[i])).round();
        if c != 0.0 {
            let cb = BigInt::from_f64_round(c);
            for (x, y) in t.iter_mut().zip(&b[i]) {
                *x -= &cb * y;
            }
        }
    }
    target.iter().zip(&t).map(|(a, r)| a - r).collect()
}

fn inf_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}

/// Greedily adds ±(basis vector) while the sup norm of the residual drops.
fn polish(b: &[Vec<BigInt>], residual: &mut [BigInt], _scale: i32) {
    let mut cur = inf_norm(residual);
    for _round in 0..200 {
        let mut improved = false;
        for row in b {
            for sign in [1i32, -1] {
                let cand: Vec<BigInt> = residual
                    .iter()
                    .zip(row)
                    .map(|(r, x)| if sign > 0 { r - x } else { r + x })
                    .collect();
                let nn = inf_norm(&cand);
                if nn < cur {
                    residual.clone_from_slice(&cand);
                    cur = nn;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_defect(tau: f64, p: u64, u: f64) -> f64 {
        let t = tau * (p as f64).ln() / (2.0 * std::f64::consts::PI);
        circular_distance(t.rem_euclid(1.0), u)
    }

    #[test]
    fn tau_roundtrip_and_phase() {
        let t: Tau = "123456789012345678901234567890.125".parse().unwrap();
        let again: Tau = t.to_string().parse().unwrap();
        assert_eq!(t.to_string(), again.to_string());
        let small = Tau::from_f64(1000.5);
        for p in [2u64, 3, 97] {
            let want = (1000.5 * (p as f64).ln() / (2.0 * std::f64::consts::PI)).rem_euclid(1.0);
            assert!((small.phase_turns(p) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn single_prime_rotation() {
        let tg = AngleTargets::new(vec![2], vec![Angle::zero()], 0.01).unwrap();
        let c = find_tau(&tg, 100.0, 200.0, &SearchOptions::default()).unwrap();
        assert!(c.success);
        let k = c.tau.to_f64() * 2f64.ln() / (2.0 * std::f64::consts::PI);
        assert!((k - k.round()).abs() < 1e-9);
        assert!(c.tau.to_f64() >= 100.0 && c.tau.to_f64() <= 200.0);
    }

    #[test]
    fn zero_targets_admit_zero() {
        let primes = vec![2u64, 3, 5, 7];
        let tg = AngleTargets::new(primes, vec![Angle::zero(); 4], 0.4).unwrap();
        let c = find_tau(&tg, 0.0, 100.0, &SearchOptions::default()).unwrap();
        assert!(c.success);
        assert_eq!(c.tau.to_f64(), 0.0);
        assert_eq!(c.max_defect, 0.0);
    }

    #[test]
    fn sweep_few_primes() {
        let primes = vec![2u64, 3, 5, 7, 11];
        let t = vec![Angle::new(1, 4), Angle::new(1, 2), Angle::new(3, 4), Angle::zero(), Angle::new(1, 3)];
        let tg = AngleTargets::new(primes.clone(), t.clone(), 0.05).unwrap();
        let o = SearchOptions {
            strategy: Strategy::Sweep,
            ..Default::default()
        };
        let c = find_tau(&tg, 0.0, 1e12, &o).unwrap();
        assert!(c.success, "{}", c.max_defect);
        for (i, &p) in primes.iter().enumerate() {
            let b = brute_defect(c.tau.to_f64(), p, t[i].as_turns());
            assert!((b - c.defects[i]).abs() < 1e-5);
        }
        assert!(c.revalidate(&tg));
    }

    #[test]
    fn lattice_25_primes_random_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let primes: Vec<u64> = PrimeTable::new(97).unwrap().primes().to_vec();
        assert_eq!(primes.len(), 25);
        let t: Vec<Angle> = primes.iter().map(|_| Angle::new(rng.gen_range(0..1000), 1000)).collect();
        let tg = AngleTargets::new(primes, t, 0.02).unwrap();
        let c = find_tau(&tg, 0.0, f64::INFINITY, &SearchOptions::default()).unwrap();
        assert!(c.success, "max defect {}", c.max_defect);
        assert!(c.revalidate(&tg));
        for (wd, d) in c.weight_defects.iter().zip(&c.defects) {
            assert!(*wd <= 2.0 * (std::f64::consts::PI * d).sin() + 1e-12);
        }
    }

    #[test]
    fn defect_range_and_monotone() {
        let tau = Tau::from_f64(12345.678);
        let primes = vec![2u64, 3, 5];
        let tg = AngleTargets::new(primes.clone(), vec![Angle::new(1, 3); 3], 0.1).unwrap();
        let d = kronecker_defect(&tau, &tg);
        assert!((0.0..=0.5).contains(&d));
        let tg2 = AngleTargets::new(vec![2, 3, 5, 7], vec![Angle::new(1, 3); 4], 0.1).unwrap();
        assert!(kronecker_defect(&tau, &tg2) >= d);
    }
}
