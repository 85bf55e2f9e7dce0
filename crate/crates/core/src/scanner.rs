//! Theorem constants, pointwise inequality checks, the two toy pipelines
//! (large and small |L| at a constructed shift τ) and sampled scans.

use crate::auxseries::{
    aux_series, circle_constant, m_at_one_identity, ramified_m_identity, rouche_circles, s1_constant,
    s2_constant, AuxError, SchemeKind, SchemeParams, Theorem, WeightScheme,
};
use crate::characters::{primitive_characters, ramified_product, unit_density, CharError, DirichletCharacter};
use crate::config::Config;
use crate::constants::{euler_gamma, euler_gamma_agreement, log_zeta2, C0_BITS};
use crate::diophantine::{find_tau, targets_from_scheme, DiophantineError, PhaseTable, SearchOptions, TauCertificate};
use crate::lfengine::{dirichlet_l, log_l_truncated, log_l_truncated_twisted, EvalConfig, LfError};
use crate::numeric::{loglog, prime_divisors, KahanSum};
use crate::primesums::{prime_power_sum, Coefficient, PrimeError, PrimeTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

#[derive(Debug, thiserror::Error)]
pub enum ScanError {
    #[error("modulus {0} below 3")]
    Modulus(u64),
    #[error("domain: {0}")]
    Domain(String),
    #[error("tau search did not meet the tolerance (max defect {0})")]
    Certificate(f64),
    #[error(transparent)]
    Lf(#[from] LfError),
    #[error(transparent)]
    Primes(#[from] PrimeError),
    #[error(transparent)]
    Aux(#[from] AuxError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Tau(#[from] DiophantineError),
}

// ---------------------------------------------------------------------------
// Constants

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeBounds {
    pub q: u64,
    pub thm1: f64,
    pub thm2: f64,
    pub thm3: f64,
    pub thm4: f64,
    pub euler_constant: f64,
    /// |C₀(Euler–Maclaurin) − C₀(Brent–McMillan)|.
    pub c0_agreement: f64,
}

pub fn theorem_bounds(q: u64) -> Result<ExtremeBounds, ScanError> {
    if q < 3 {
        return Err(ScanError::Modulus(q));
    }
    let c0 = euler_gamma();
    let thm2 = c0.exp() * unit_density(q);
    let thm3 = PI * PI * (-c0).exp() / 12.0 * ramified_product(q);
    Ok(ExtremeBounds {
        q,
        thm1: 2.0 * thm2,
        thm2,
        thm3,
        thm4: 2.0 * thm3,
        euler_constant: c0,
        c0_agreement: c0_agreement(),
    })
}

fn c0_agreement() -> f64 {
    static A: std::sync::OnceLock<f64> = std::sync::OnceLock::new();
    *A.get_or_init(|| euler_gamma_agreement(C0_BITS))
}

// ---------------------------------------------------------------------------
// Pointwise inequalities

/// Truncation length log²T used by both inequality checks.
pub fn truncation_length(t_height: f64) -> u64 {
    let l = t_height.ln();
    (l * l).floor() as u64
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct InequalityReport {
    pub s: Complex64,
    pub t_height: f64,
    pub x: u64,
    pub lhs: f64,
    pub rhs: f64,
    /// Extreme value of the LHS over all unimodular twists.
    pub extreme: f64,
    pub allowance: f64,
    pub slack: f64,
    pub violation: bool,
}

/// log log x + C₀ − log(q/φ(q)).
pub fn thm1_rhs(q: u64, x: u64) -> f64 {
    loglog(x as f64) + euler_gamma() + unit_density(q).ln()
}

/// Σ_{n<=x, (n,q)=1} Λ(n)/(n log n), the largest possible LHS at σ = 1.
pub fn thm1_triangle(q: u64, x: u64, tbl: &PrimeTable) -> Result<f64, ScanError> {
    let one = Complex64::new(1.0, 0.0);
    let v = prime_power_sum(tbl, 1, x, one, Coefficient::LambdaOverLog, |p| {
        if q % p == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            one
        }
    })?;
    Ok(v.re)
}

/// LHS = Re Σ_{n<=log²T} χ(n)Λ(n)/(n^s log n) against thm1_rhs; violation when
/// the slack falls below −k/log log T.
pub fn check_thm1_inequality(
    s: Complex64,
    chr: &DirichletCharacter,
    t_height: f64,
    k: f64,
    tbl: &PrimeTable,
) -> Result<InequalityReport, ScanError> {
    domain(s, t_height)?;
    let q = chr.modulus();
    let tr = log_l_truncated(tbl, s, chr, t_height)?;
    let x = tr.cutoff;
    let rhs = thm1_rhs(q, x);
    let allowance = k / loglog(t_height);
    let slack = rhs - tr.value.re + allowance;
    Ok(InequalityReport {
        s,
        t_height,
        x,
        lhs: tr.value.re,
        rhs,
        extreme: thm1_triangle(q, x, tbl)?,
        allowance,
        slack,
        violation: slack < 0.0,
    })
}

/// −log log x − C₀ + log(π²/6) + Σ_{p|q} log((p+1)/p).
pub fn thm3_rhs(q: u64, x: u64) -> f64 {
    -loglog(x as f64) - euler_gamma() + log_zeta2() + ramified_product(q).ln()
}

/// Σ_{p<=x, p∤q} Σ_{p^k<=x} (−1)^k/(k p^k), the smallest possible LHS at σ = 1.
pub fn thm3_extreme(q: u64, x: u64, tbl: &PrimeTable) -> Result<f64, ScanError> {
    let one = Complex64::new(1.0, 0.0);
    let v = prime_power_sum(tbl, 1, x, one, Coefficient::LambdaOverLog, |p| {
        if q % p == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            -one
        }
    })?;
    Ok(v.re)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubIdentity {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub envelope: f64,
    pub holds: bool,
}

impl SubIdentity {
    fn new(name: &str, lhs: f64, rhs: f64, envelope: f64) -> Self {
        let residual = (lhs - rhs).abs();
        Self {
            name: name.into(),
            lhs,
            rhs,
            residual,
            envelope,
            holds: residual <= envelope,
        }
    }
}

/// The three prime-product pieces behind the Thm-3 lower bound, by direct summation.
pub fn thm3_sub_identities(x: u64, tbl: &PrimeTable) -> Result<Vec<SubIdentity>, ScanError> {
    tbl.check(x)?;
    let ps = tbl.primes_upto(x);
    let sum = |f: &dyn Fn(f64) -> f64| ps.iter().map(|&p| f(p as f64)).collect::<KahanSum>().value();
    let plus = -sum(&|p| (1.0 / p).ln_1p());
    let minus = sum(&|p| (-1.0 / p).ln_1p());
    let sq = -sum(&|p| (-1.0 / (p * p)).ln_1p());
    let xf = x as f64;
    Ok(vec![
        // −log(1+1/p) = log(1−1/p) − log(1−1/p²)
        SubIdentity::new("split", plus, minus + sq, 1e-12 * (1.0 + plus.abs())),
        SubIdentity::new("zeta2", sq, log_zeta2(), 10.0 / xf),
        SubIdentity::new("mertens", minus, -loglog(xf) - euler_gamma(), 1.0 / xf.ln()),
    ])
}

/// LHS = Re Σ_{n<=x} χ(n)Λ(n)/(n^s log n) against thm3_rhs; violation when
/// the slack falls below −k/log x.
pub fn check_thm3_inequality(
    s: Complex64,
    chr: &DirichletCharacter,
    x: u64,
    k: f64,
    tbl: &PrimeTable,
) -> Result<InequalityReport, ScanError> {
    if !(s.re >= 1.0) || x < 3 {
        return Err(ScanError::Domain(format!("need Re s >= 1 and x >= 3, got s = {s}, x = {x}")));
    }
    let q = chr.modulus();
    let lhs = prime_power_sum(tbl, 1, x, s, Coefficient::LambdaOverLog, |p| chr.eval(p))?.re;
    let rhs = thm3_rhs(q, x);
    let allowance = k / (x as f64).ln();
    let slack = lhs - rhs + allowance;
    Ok(InequalityReport {
        s,
        t_height: s.im.abs(),
        x,
        lhs,
        rhs,
        extreme: thm3_extreme(q, x, tbl)?,
        allowance,
        slack,
        violation: slack < 0.0,
    })
}

/// Re log(1 − z p^{−s})^{−1} and the lower bound −log(1 + p^{−σ}) for |z| = 1.
pub fn euler_factor_bound(p: u64, z: Complex64, s: Complex64) -> (f64, f64) {
    let w = z * (-s * (p as f64).ln()).exp();
    let v = -(Complex64::new(1.0, 0.0) - w).ln();
    (v.re, -(w.norm()).ln_1p())
}

fn domain(s: Complex64, t_height: f64) -> Result<(), ScanError> {
    if !(s.re >= 1.0) || !(t_height >= 4.0) {
        return Err(ScanError::Domain(format!("need Re s >= 1 and T >= 4, got s = {s}, T = {t_height}")));
    }
    let t = s.im.abs();
    if t < t_height || t > 2.0 * t_height {
        return Err(ScanError::Domain(format!("|Im s| = {t} outside [T, 2T] for T = {t_height}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSpec {
    pub moduli: Vec<u64>,
    pub points: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub sigma: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            moduli: vec![3, 4, 5, 7, 8, 11],
            points: 1000,
            t_min: 1e3,
            t_max: 1e6,
            sigma: 1.0,
        }
    }
}

pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![t_min];
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterSweep {
    pub q: u64,
    pub chi_label: u64,
    /// Allowance constants, fitted on the two smallest heights then frozen.
    pub k_thm1: f64,
    pub k_thm3: f64,
    pub checks: usize,
    pub violations_thm1: usize,
    pub violations_thm3: usize,
    pub min_slack_thm1: f64,
    pub min_slack_thm3: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub characters: Vec<CharacterSweep>,
    pub total_checks: usize,
    pub total_violations: usize,
    /// Every sub-identity of the Thm-3 chain held at each distinct truncation length.
    pub sub_identities_hold: bool,
    pub config: Config,
}

/// K from the unconditional extreme at the two smallest heights.
fn fit_allowances(q: u64, grid: &[f64], tbl: &PrimeTable) -> Result<(f64, f64), ScanError> {
    let mut k1 = 0.0f64;
    let mut k3 = 0.0f64;
    for &t in grid.iter().take(2) {
        let x = truncation_length(t);
        k1 = k1.max((thm1_triangle(q, x, tbl)? - thm1_rhs(q, x)) * loglog(t));
        k3 = k3.max((thm3_rhs(q, x) - thm3_extreme(q, x, tbl)?) * (x as f64).ln());
    }
    Ok((k1.max(0.0), k3.max(0.0)))
}

pub fn inequality_sweep(spec: &SweepSpec, tbl: &PrimeTable, config: &Config) -> Result<SweepReport, ScanError> {
    let grid = log_grid(spec.t_min, spec.t_max, spec.points);
    let mut out = Vec::new();
    let mut xs: Vec<u64> = grid.iter().map(|&t| truncation_length(t)).collect();
    xs.dedup();
    let mut subs_ok = true;
    for &x in &xs {
        subs_ok &= thm3_sub_identities(x, tbl)?.iter().all(|s| s.holds);
    }
    for &q in &spec.moduli {
        let (k1, k3) = fit_allowances(q, &grid, tbl)?;
        for chr in primitive_characters(q)? {
            let mut cs = CharacterSweep {
                q,
                chi_label: chr.label(),
                k_thm1: k1,
                k_thm3: k3,
                checks: 0,
                violations_thm1: 0,
                violations_thm3: 0,
                min_slack_thm1: f64::INFINITY,
                min_slack_thm3: f64::INFINITY,
            };
            for &t in &grid {
                let s = Complex64::new(spec.sigma, t);
                let r1 = check_thm1_inequality(s, &chr, t, k1, tbl)?;
                let r3 = check_thm3_inequality(s, &chr, r1.x, k3, tbl)?;
                cs.checks += 1;
                cs.violations_thm1 += r1.violation as usize;
                cs.violations_thm3 += r3.violation as usize;
                cs.min_slack_thm1 = cs.min_slack_thm1.min(r1.slack);
                cs.min_slack_thm3 = cs.min_slack_thm3.min(r3.slack);
            }
            out.push(cs);
        }
    }
    let total_checks = out.iter().map(|c| c.checks).sum();
    let total_violations = out.iter().map(|c| c.violations_thm1 + c.violations_thm3).sum();
    Ok(SweepReport {
        spec: spec.clone(),
        characters: out,
        total_checks,
        total_violations,
        sub_identities_hold: subs_ok,
        config: config.clone(),
    })
}

// ---------------------------------------------------------------------------
// Toy pipelines

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainOptions {
    pub tolerance: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub search: SearchOptions,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            tolerance: 0.02,
            t_min: 0.0,
            t_max: f64::INFINITY,
            search: SearchOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferPoint {
    pub s: Complex64,
    /// Σ_{n<=x} χ(n)Λ(n) n^{−iτ}/(n^s log n).
    pub twisted_sum: Complex64,
    /// M_x(s) minus the ramified constant.
    pub model: Complex64,
    pub defect: f64,
    pub defect_times_log_x: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainReport {
    pub theorem: Theorem,
    pub q: u64,
    pub chi_label: u64,
    pub x: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub m: f64,
    pub s_const: Complex64,
    pub circle_center: Complex64,
    pub certificate: TauCertificate,
    pub transfer: Vec<TransferPoint>,
    pub ramified_identity_defect: f64,
    pub m_at_one_defect: f64,
    /// Terms kept in the truncated proxy for log L at height τ (log² τ).
    pub proxy_cutoff: u64,
    /// |L(1 + iτ, χ)| by the truncated proxy.
    pub abs_l: f64,
    /// |L(c + iτ, χ)| at the circle centre c.
    pub abs_l_center: f64,
    /// Thm 2: ε e^{C₀} (φ/q) log x.  Thm 4: (π²e^{−C₀}/6)∏(p+1)/p /(ε log x).
    pub target: f64,
    /// |L| / target.
    pub ratio: f64,
    /// Thm 2 passes when |L| >= 0.5 target, Thm 4 when |L| <= 2 target.
    pub acceptance_factor: f64,
    pub passes: bool,
    pub config: Config,
}

/// Twisted sum vs M_x(s) − (ramified constant) for the log scheme at s.
pub fn transfer_point<F: Fn(u64) -> Complex64>(
    scheme: &WeightScheme,
    s: Complex64,
    tbl: &PrimeTable,
    phase: F,
) -> Result<TransferPoint, ScanError> {
    let chr = scheme.params.chr();
    let x = scheme.params.x_int();
    let twisted = prime_power_sum(tbl, 1, x, s, Coefficient::LambdaOverLog, |p| chr.eval(p) * phase(p))?;
    let ram = ramified_m_identity(scheme, s, tbl)?.prime_side;
    let model = aux_series(scheme, s, tbl)? - ram;
    let defect = (twisted - model).norm();
    Ok(TransferPoint {
        s,
        twisted_sum: twisted,
        model,
        defect,
        defect_times_log_x: defect * scheme.params.log_x(),
    })
}

/// Runs the Thm-2 (large |L|) or Thm-4 (small |L|) mechanism at toy scale.
pub fn check_chain(
    theorem: Theorem,
    chr: &DirichletCharacter,
    x: f64,
    delta: f64,
    tbl: &PrimeTable,
    config: &Config,
    opts: &ChainOptions,
) -> Result<ChainReport, ScanError> {
    let cfg = config.eval();
    let params = SchemeParams::derived(x, delta, chr.clone(), theorem, &cfg)?;
    let rouche = WeightScheme::new(theorem.rouche_kind(), params.clone());
    let logs = WeightScheme::new(theorem.log_kind(), params.clone());
    let targets = targets_from_scheme(&rouche, tbl).with_tolerance(opts.tolerance)?;
    let search = SearchOptions {
        seed: config.seed,
        max_height_bits: config.tau_max_height_bits,
        ..opts.search.clone()
    };
    let cert = find_tau(&targets, opts.t_min, opts.t_max, &search)?;
    if !cert.success {
        return Err(ScanError::Certificate(cert.max_defect));
    }
    let height = cert.tau.to_f64();
    let cutoff = truncation_length(height.max(4.0));
    let phases = PhaseTable::new(&cert.tau, tbl, cutoff.max(params.x_int()));
    let s1 = s1_constant(chr, &cfg)?.value;
    let s2 = s2_constant(chr, &cfg)?.value;
    let circles = rouche_circles(circle_constant(theorem, config.circle_source(), s1, s2), &params);
    let one = Complex64::new(1.0, 0.0);
    let mut transfer = Vec::new();
    for s in [one, circles.center] {
        transfer.push(transfer_point(&logs, s, tbl, |p| phases.get(p))?);
    }
    let ramified = ramified_m_identity(&logs, one, tbl)?.defect;
    let m1 = m_at_one_identity(&logs, tbl)?.defect;
    let proxy = |s: Complex64| -> Result<f64, ScanError> {
        let t = log_l_truncated_twisted(tbl, s, chr, height.max(4.0), |p| phases.get(p), height)?;
        Ok(t.value.re.exp())
    };
    let abs_l = proxy(one)?;
    let abs_l_center = proxy(circles.center)?;
    let q = chr.modulus();
    let b = theorem_bounds(q)?;
    let (eps, lx) = (params.epsilon(), params.log_x());
    let (target, factor) = match theorem {
        Theorem::Thm2 => (eps * b.thm2 * lx, 0.5),
        Theorem::Thm4 => (b.thm4 / (eps * lx), 2.0),
    };
    let passes = match theorem {
        Theorem::Thm2 => abs_l >= factor * target,
        Theorem::Thm4 => abs_l <= factor * target,
    };
    Ok(ChainReport {
        theorem,
        q,
        chi_label: chr.label(),
        x,
        delta,
        epsilon: eps,
        m: params.m(),
        s_const: params.s_const(),
        circle_center: circles.center,
        certificate: cert,
        transfer,
        ramified_identity_defect: ramified,
        m_at_one_defect: m1,
        proxy_cutoff: cutoff,
        abs_l,
        abs_l_center,
        target,
        ratio: abs_l / target,
        acceptance_factor: factor,
        passes,
        config: config.clone(),
    })
}

pub fn check_thm2_chain(
    chr: &DirichletCharacter,
    x: f64,
    delta: f64,
    tbl: &PrimeTable,
    config: &Config,
    opts: &ChainOptions,
) -> Result<ChainReport, ScanError> {
    check_chain(Theorem::Thm2, chr, x, delta, tbl, config, opts)
}

pub fn check_thm4_chain(
    chr: &DirichletCharacter,
    x: f64,
    delta: f64,
    tbl: &PrimeTable,
    config: &Config,
    opts: &ChainOptions,
) -> Result<ChainReport, ScanError> {
    check_chain(Theorem::Thm4, chr, x, delta, tbl, config, opts)
}

/// Scheme kinds whose weights serve as τ targets for each theorem.
pub fn target_kind(theorem: Theorem) -> SchemeKind {
    theorem.rouche_kind()
}

// ---------------------------------------------------------------------------
// Scans

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSource {
    CriticalPoint,
    SigmaGrid,
    TauConstruction,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScanRecord {
    pub point: Complex64,
    pub abs_l: f64,
    pub norm_large: f64,
    pub norm_small: f64,
    pub char_label: (u64, u64),
    pub source: PointSource,
}

impl ScanRecord {
    pub fn from_value(point: Complex64, abs_l: f64, chr: &DirichletCharacter, source: PointSource) -> Option<Self> {
        let t = point.im.abs();
        if !(t > std::f64::consts::E) || !(abs_l >= 0.0) {
            return None;
        }
        let ll = loglog(t);
        Some(Self {
            point,
            abs_l,
            norm_large: abs_l / ll,
            norm_small: abs_l * ll,
            char_label: (chr.modulus(), chr.label()),
            source,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanReport {
    pub records: Vec<ScanRecord>,
    pub running_max_norm_large: Vec<f64>,
    pub running_min_norm_small: Vec<f64>,
    pub bounds: ExtremeBounds,
    /// max norm_large / thm1.
    pub approach_large: f64,
    /// thm3 / min norm_small.
    pub approach_small: f64,
    pub above_thm1: usize,
    pub below_thm3: usize,
    pub errors: Vec<(usize, String)>,
    pub note: String,
    pub config: Config,
}

pub const SAMPLING_NOTE: &str = "points are σ-grid samples, shifted constructions or desk-scale critical points \
with β′ < 1; no genuine critical point with β′ >= 1 is claimed";

/// |L(s, χ)| and the normalized statistics at every point, with running extremes.
pub fn scan(points: &[(Complex64, PointSource)], chr: &DirichletCharacter, config: &Config) -> Result<ScanReport, ScanError> {
    let cfg = config.eval();
    let bounds = theorem_bounds(chr.modulus())?;
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (i, &(s, src)) in points.iter().enumerate() {
        match eval_abs_l(s, chr, &cfg) {
            Ok(a) => match ScanRecord::from_value(s, a, chr, src) {
                Some(r) => records.push(r),
                None => errors.push((i, format!("t = {} not above e", s.im))),
            },
            Err(e) => errors.push((i, e.to_string())),
        }
    }
    Ok(summarize(records, errors, bounds, config))
}

fn eval_abs_l(s: Complex64, chr: &DirichletCharacter, cfg: &EvalConfig) -> Result<f64, ScanError> {
    Ok(dirichlet_l(s, chr, cfg)?.value.norm())
}

pub fn summarize(records: Vec<ScanRecord>, errors: Vec<(usize, String)>, bounds: ExtremeBounds, config: &Config) -> ScanReport {
    let mut rmax = Vec::with_capacity(records.len());
    let mut rmin = Vec::with_capacity(records.len());
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for r in &records {
        hi = hi.max(r.norm_large);
        lo = lo.min(r.norm_small);
        rmax.push(hi);
        rmin.push(lo);
    }
    ScanReport {
        above_thm1: records.iter().filter(|r| r.norm_large > bounds.thm1).count(),
        below_thm3: records.iter().filter(|r| r.norm_small < bounds.thm3).count(),
        approach_large: hi / bounds.thm1,
        approach_small: bounds.thm3 / lo,
        running_max_norm_large: rmax,
        running_min_norm_small: rmin,
        records,
        bounds,
        errors,
        note: SAMPLING_NOTE.into(),
        config: config.clone(),
    }
}

/// σ = const grid points with log-spaced heights.
pub fn sigma_grid(sigma: f64, t_min: f64, t_max: f64, n: usize) -> Vec<(Complex64, PointSource)> {
    log_grid(t_min, t_max, n)
        .into_iter()
        .map(|t| (Complex64::new(sigma, t), PointSource::SigmaGrid))
        .collect()
}

/// Plot-ready CSV: t, abs_l, norm_large, norm_small and the bound columns.
pub fn write_scan_csv<W: Write>(report: &ScanReport, mut w: W) -> std::io::Result<()> {
    writeln!(w, "sigma,t,abs_l,norm_large,norm_small,thm1,thm2,thm3,thm4,source")?;
    let b = &report.bounds;
    for r in &report.records {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.point.re,
            r.point.im,
            r.abs_l,
            r.norm_large,
            r.norm_small,
            b.thm1,
            b.thm2,
            b.thm3,
            b.thm4,
            serde_json::to_value(r.source).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
        )?;
    }
    Ok(())
}

/// Prime divisors of q (re-exported for reports).
pub fn ramified_primes(q: u64) -> Vec<u64> {
    prime_divisors(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_identities() {
        for q in 3..=100 {
            let b = theorem_bounds(q).unwrap();
            assert_eq!(b.thm1, 2.0 * b.thm2);
            assert_eq!(b.thm4, 2.0 * b.thm3);
        }
        let b4 = theorem_bounds(4).unwrap();
        assert!((b4.thm1 - 1.781_072_417_990_197_9).abs() < 1e-12);
        let b6 = theorem_bounds(6).unwrap();
        assert!((b6.thm3 - PI * PI * (-euler_gamma()).exp() / 12.0 * 2.0).abs() < 1e-14);
        assert!(theorem_bounds(2).is_err());
    }

    #[test]
    fn single_record_normalization() {
        let chr = crate::characters::character(5, 1).unwrap();
        let e = std::f64::consts::E;
        let r = ScanRecord::from_value(Complex64::new(1.0, e.exp()), 1.0, &chr, PointSource::SigmaGrid).unwrap();
        assert!((r.norm_large - 1.0).abs() < 1e-15 && (r.norm_small - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sub_identities_at_million() {
        let tbl = PrimeTable::new(1_000_000).unwrap();
        for s in thm3_sub_identities(1_000_000, &tbl).unwrap() {
            assert!(s.holds, "{s:?}");
        }
    }
}
