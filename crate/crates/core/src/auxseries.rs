//! Weighted auxiliary Dirichlet polynomials near s = 1.
//!
//! Four piecewise completely multiplicative prime weights (`B`, `C`, `B′`,
//! `C′`) turn the finite sums V_x, W_x, Z_x and M_x into functions with an
//! explicit linear model around s = 1. This module evaluates the sums, the
//! constants S₁ and S₂ that enter the models, the model roots and the two
//! circles used for the Rouché comparison.

use crate::characters::{Angle, DirichletCharacter};
use crate::constants::{euler_gamma, log_zeta2};
use crate::lfengine::{l_log_derivative, neg_zeta_log_derivative, ComplexEval, EvalConfig, LfError};
use crate::numeric::{prime_divisors, ComplexSum};
use crate::primesums::{prime_power_sum, Coefficient, IdentityDefect, PrimeError, PrimeTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default δ; ε = 2δ − 1 = 1/2.
pub const DEFAULT_DELTA: f64 = 0.75;
/// Boundary samples for circle minima and margins.
pub const BOUNDARY_SAMPLES: usize = 256;

#[derive(Debug, thiserror::Error)]
pub enum AuxError {
    #[error("invalid scheme parameters: {0}")]
    Params(String),
    #[error("|s - 1| = {dist} exceeds the linearization radius {bound}")]
    Hypothesis { dist: f64, bound: f64 },
    #[error("Newton iteration did not converge after {0} steps")]
    Newton(usize),
    #[error(transparent)]
    Lf(#[from] LfError),
    #[error(transparent)]
    Primes(#[from] PrimeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    B,
    C,
    Bprime,
    Cprime,
}

impl SchemeKind {
    /// B and B′ carry Λ(n); C and C′ carry Λ(n)/log n.
    pub fn coefficient(self) -> Coefficient {
        match self {
            SchemeKind::B | SchemeKind::Bprime => Coefficient::Lambda,
            SchemeKind::C | SchemeKind::Cprime => Coefficient::LambdaOverLog,
        }
    }

    pub fn theorem(self) -> Theorem {
        match self {
            SchemeKind::B | SchemeKind::C => Theorem::Thm2,
            SchemeKind::Bprime | SchemeKind::Cprime => Theorem::Thm4,
        }
    }
}

/// Which of the two constructions a constant or scheme belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    /// Large values: S₁, schemes B and C.
    Thm2,
    /// Small values: S₂, schemes B′ and C′.
    Thm4,
}

impl Theorem {
    pub fn rouche_kind(self) -> SchemeKind {
        match self {
            Theorem::Thm2 => SchemeKind::B,
            Theorem::Thm4 => SchemeKind::Bprime,
        }
    }

    pub fn log_kind(self) -> SchemeKind {
        match self {
            Theorem::Thm2 => SchemeKind::C,
            Theorem::Thm4 => SchemeKind::Cprime,
        }
    }
}

/// Prime ranges of a scheme. Intervals are left-open, right-closed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Segment {
    /// p | q
    Ramified,
    /// p <= x^ε, p ∤ q
    Low,
    /// x^ε < p <= m x^ε
    Second,
    /// m x^ε < p <= x^δ
    Third,
    /// x^δ < p <= x
    Top,
}

pub const SEGMENTS: [Segment; 5] = [
    Segment::Ramified,
    Segment::Low,
    Segment::Second,
    Segment::Third,
    Segment::Top,
];

/// `⌊v⌋`, treating values within a relative 1e-9 of an integer as that integer
/// so that e.g. (10⁴)^{1/2} lands on 100 regardless of rounding in `powf`.
fn integer_floor(v: f64) -> u64 {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * v.abs().max(1.0) {
        r as u64
    } else {
        v.floor() as u64
    }
}

/// `2δ² − 1 − ε²` for ε = 2δ − 1; algebraically −2(δ − 1)².
pub fn scheme_coefficient(delta: f64) -> f64 {
    let eps = 2.0 * delta - 1.0;
    2.0 * delta * delta - 1.0 - eps * eps
}

#[derive(Clone, Debug)]
pub struct SchemeParams {
    x: f64,
    delta: f64,
    m: f64,
    chr: DirichletCharacter,
    /// The constant (S₁ or S₂) that the linear model is built around.
    s_const: Complex64,
    cuts: [u64; 4],
}

impl SchemeParams {
    pub fn new(x: f64, delta: f64, m: f64, chr: DirichletCharacter, s_const: Complex64) -> Result<Self, AuxError> {
        if !(delta > 0.5 && delta < 1.0) {
            return Err(AuxError::Params(format!("delta = {delta} outside (1/2, 1)")));
        }
        if !chr.is_primitive() || chr.is_principal() {
            return Err(AuxError::Params(format!(
                "character mod {} label {} is not primitive",
                chr.modulus(),
                chr.label()
            )));
        }
        if !(m > 1.0) {
            return Err(AuxError::Params(format!("m = {m} must exceed 1")));
        }
        let eps = 2.0 * delta - 1.0;
        let q = chr.modulus() as f64;
        if !(x.powf(eps) > q) {
            return Err(AuxError::Params(format!("x^eps = {} does not exceed q = {q}", x.powf(eps))));
        }
        if !(x.ln() > 2.0 * m.ln() / (1.0 - eps)) {
            return Err(AuxError::Params(format!(
                "log x = {} not above 2 log m/(1 - eps) = {}",
                x.ln(),
                2.0 * m.ln() / (1.0 - eps)
            )));
        }
        let xe = x.powf(eps);
        let cuts = [
            integer_floor(xe),
            integer_floor(m * xe),
            integer_floor(x.powf(delta)),
            integer_floor(x),
        ];
        Ok(Self {
            x,
            delta,
            m,
            chr,
            s_const,
            cuts,
        })
    }

    /// Parameters with S and m derived from the character (analytic route for S).
    pub fn derived(
        x: f64,
        delta: f64,
        chr: DirichletCharacter,
        theorem: Theorem,
        cfg: &EvalConfig,
    ) -> Result<Self, AuxError> {
        let s = match theorem {
            Theorem::Thm2 => s1_constant(&chr, cfg)?.value,
            Theorem::Thm4 => s2_constant(&chr, cfg)?.value,
        };
        Self::new(x, delta, choose_m(s, theorem), chr, s)
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn epsilon(&self) -> f64 {
        2.0 * self.delta - 1.0
    }
    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn chr(&self) -> &DirichletCharacter {
        &self.chr
    }
    pub fn s_const(&self) -> Complex64 {
        self.s_const
    }
    pub fn log_x(&self) -> f64 {
        self.x.ln()
    }
    pub fn coefficient(&self) -> f64 {
        scheme_coefficient(self.delta)
    }
    /// Integer cutoffs ⌊x^ε⌋, ⌊m x^ε⌋, ⌊x^δ⌋, ⌊x⌋.
    pub fn cuts(&self) -> [u64; 4] {
        self.cuts
    }
    pub fn x_int(&self) -> u64 {
        self.cuts[3]
    }

    pub fn segment(&self, p: u64) -> Option<Segment> {
        let [c1, c2, c3, c4] = self.cuts;
        if p > c4 {
            None
        } else if self.chr.modulus() % p == 0 {
            Some(Segment::Ramified)
        } else if p <= c1 {
            Some(Segment::Low)
        } else if p <= c2 {
            Some(Segment::Second)
        } else if p <= c3 {
            Some(Segment::Third)
        } else {
            Some(Segment::Top)
        }
    }
}

/// m from `4 log m = ±Re S + 4|S| + 1` (+ for the large-value side).
pub fn choose_m(s: Complex64, theorem: Theorem) -> f64 {
    let sign = match theorem {
        Theorem::Thm2 => 1.0,
        Theorem::Thm4 => -1.0,
    };
    ((sign * s.re + 4.0 * s.norm() + 1.0) / 4.0).exp()
}

#[derive(Clone, Debug)]
pub struct WeightScheme {
    pub kind: SchemeKind,
    pub params: SchemeParams,
    /// Test hook: every prime gets weight 1.
    pub forced_unit: bool,
}

const HALF: Angle = Angle { num: 1, den: 2 };

impl WeightScheme {
    pub fn new(kind: SchemeKind, params: SchemeParams) -> Self {
        Self {
            kind,
            params,
            forced_unit: false,
        }
    }

    /// Exact angle (turns) of the weight at prime p; `None` beyond x.
    pub fn angle(&self, p: u64) -> Option<Angle> {
        let seg = self.params.segment(p)?;
        if self.forced_unit {
            return Some(Angle::zero());
        }
        let chi = || self.params.chr.angle(p).expect("unit residue");
        use SchemeKind::*;
        use Segment::*;
        Some(match (self.kind, seg) {
            (B, Ramified) | (C, Ramified) => Angle::zero(),
            (Bprime, Ramified) | (Cprime, Ramified) => HALF,
            (B, Low) => chi().neg(),
            (Bprime, Low) => chi().neg().add(HALF),
            (C, Low) => Angle::zero(),
            (Cprime, Low) => HALF,
            (B, Second) | (B, Top) | (Bprime, Third) => HALF,
            (B, Third) | (Bprime, Second) | (Bprime, Top) => Angle::zero(),
            (C, Second) | (C, Top) | (Cprime, Third) => chi().add(HALF),
            (C, Third) | (Cprime, Second) | (Cprime, Top) => chi(),
        })
    }

    pub fn value(&self, p: u64) -> Complex64 {
        self.angle(p)
            .map(Angle::to_complex)
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn export(&self, circles: Option<&RoucheCircles>) -> SchemeExport {
        let p = &self.params;
        SchemeExport {
            kind: self.kind,
            q: p.chr.modulus(),
            chi_label: p.chr.label(),
            x: p.x,
            delta: p.delta,
            m: p.m,
            s_re: p.s_const.re,
            s_im: p.s_const.im,
            c1: circles.map(|c| c.c1),
            c2: circles.map(|c| c.c2),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SchemeExport {
    pub kind: SchemeKind,
    pub q: u64,
    pub chi_label: u64,
    pub x: f64,
    pub delta: f64,
    pub m: f64,
    #[serde(rename = "S_re")]
    pub s_re: f64,
    #[serde(rename = "S_im")]
    pub s_im: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
}

// ---------------------------------------------------------------------------
// S₁ and S₂

/// A constant computed by an analytic route and by a smoothed Dirichlet series.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DualValue {
    pub analytic: ComplexEval,
    pub series: Complex64,
    /// Change in the series value when the smoothing scale is halved.
    pub series_error: f64,
    pub agreement: f64,
}

/// Default truncation point for the series route.
pub const SERIES_CUTOFF: u64 = 10_000_000;

fn ramified_sum<F: Fn(f64) -> f64>(q: u64, f: F) -> f64 {
    prime_divisors(q).into_iter().map(|p| f(p as f64)).sum()
}

/// S₁ = −L′/L(1, χ̄) + Σ_{p|q} log p/(p − 1).
pub fn s1_constant(chr: &DirichletCharacter, cfg: &EvalConfig) -> Result<ComplexEval, AuxError> {
    let cb = chr.conj();
    let one = Complex64::new(1.0, 0.0);
    let ld = l_log_derivative(one, &cb, cfg)?;
    let ram = ramified_sum(chr.modulus(), |p| p.ln() / (p - 1.0));
    Ok(ComplexEval::new(-ld.value + ram, ld.error_radius))
}

/// S₂ = L′/L(1, χ̄) + 2Σ_p χ̄(p)² log p/(p² − χ̄(p)²) − Σ_{p|q} log p/(p + 1).
///
/// The prime sum is −L′/L(2, χ̄²); when χ̄² is principal it is rewritten
/// through ζ′/ζ(2) and the ramified Euler factors.
pub fn s2_constant(chr: &DirichletCharacter, cfg: &EvalConfig) -> Result<ComplexEval, AuxError> {
    let cb = chr.conj();
    let q = chr.modulus();
    let one = Complex64::new(1.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let ld1 = l_log_derivative(one, &cb, cfg)?;
    let sq = cb.pow(2);
    let (ld2, e2) = if sq.is_principal() {
        let z = neg_zeta_log_derivative(two, cfg)?;
        let ram = ramified_sum(q, |p| p.ln() / (p * p - 1.0));
        (-z.value + ram, z.error_radius)
    } else {
        let l = l_log_derivative(two, &sq, cfg)?;
        (l.value, l.error_radius)
    };
    let ram = ramified_sum(q, |p| p.ln() / (p + 1.0));
    Ok(ComplexEval::new(
        ld1.value - 2.0 * ld2 - ram,
        ld1.error_radius + 2.0 * e2,
    ))
}

/// k(u) = e^{−r}(1 + r + r²/2 + r³/6), r = √u. Its Mellin transform is
/// Γ(2w + 4)/(6w), whose only pole near w = 0 has residue 1.
fn smoothing_kernel(u: f64) -> f64 {
    let r = u.sqrt();
    (-r).exp() * (1.0 + r * (1.0 + r * (0.5 + r / 6.0)))
}

/// Σ Λ(n) ψ(n)/n · k(n/X) over n <= cutoff, ψ = `chr`.
fn smoothed_lambda_sum(tbl: &PrimeTable, chr: &DirichletCharacter, scale: f64, cutoff: u64) -> Complex64 {
    let mut acc = ComplexSum::new();
    let n = tbl.count_upto(cutoff);
    for i in 0..n {
        let p = tbl.primes()[i];
        let a = chr.eval(p);
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        let lp = tbl.logs()[i];
        let pf = p as f64;
        let mut pk = p as u128;
        let mut ak = a;
        let mut inv = 1.0 / pf;
        while pk <= cutoff as u128 {
            acc.add(ak * (lp * inv * smoothing_kernel(pk as f64 / scale)));
            pk *= p as u128;
            ak *= a;
            inv /= pf;
        }
    }
    acc.value()
}

/// Smoothed approximation of −L′/L(1, ψ) for primitive-or-not non-principal ψ.
/// For even ψ the trivial zero at s = 0 contributes 1/(6X), which is removed.
fn neg_log_derivative_at_one_series(tbl: &PrimeTable, chr: &DirichletCharacter, cutoff: u64) -> (Complex64, f64) {
    let eval = |scale: f64| {
        let mut v = smoothed_lambda_sum(tbl, chr, scale, cutoff);
        if chr.parity().sign() > 0 {
            v -= 1.0 / (6.0 * scale);
        }
        v
    };
    let x = cutoff as f64 / 2500.0;
    let v = eval(x);
    let v_half = eval(x / 2.0);
    (v, (v - v_half).norm())
}

/// Σ_{p^k <= cutoff, p | q} log p / p^k, the ramified part of the defining series of S₁.
fn ramified_series(tbl: &PrimeTable, q: u64, cutoff: u64) -> f64 {
    let mut acc = 0.0;
    for p in prime_divisors(q) {
        let lp = tbl.logs()[tbl.count_upto(p) - 1];
        let mut pk = p as u128;
        while pk <= cutoff as u128 {
            acc += lp / pk as f64;
            pk *= p as u128;
        }
    }
    acc
}

fn series_table_check(tbl: &PrimeTable, cutoff: u64) -> Result<(), AuxError> {
    if tbl.limit() < cutoff {
        return Err(PrimeError::BeyondTable(cutoff, tbl.limit()).into());
    }
    Ok(())
}

/// S₁ by both routes: the analytic value and Σ Λ(n)χ̄(n)/n + Σ_{(q,n)>1} Λ(n)/n.
pub fn s1_dual(
    chr: &DirichletCharacter,
    cfg: &EvalConfig,
    tbl: &PrimeTable,
    cutoff: u64,
) -> Result<DualValue, AuxError> {
    series_table_check(tbl, cutoff)?;
    let analytic = s1_constant(chr, cfg)?;
    let (main, err) = neg_log_derivative_at_one_series(tbl, &chr.conj(), cutoff);
    let series = main + ramified_series(tbl, chr.modulus(), cutoff);
    Ok(DualValue {
        analytic,
        series,
        series_error: err,
        agreement: (series - analytic.value).norm(),
    })
}

/// S₂ by both routes: the analytic value and Σ Λ(n)a(n)/n − Σ_{p|q} log p/(p+1)
/// with a(p) = −χ̄(p). The odd-k part of the series is −Σ Λχ̄/n (smoothed), the
/// even-k part is summed in closed form per prime.
pub fn s2_dual(
    chr: &DirichletCharacter,
    cfg: &EvalConfig,
    tbl: &PrimeTable,
    cutoff: u64,
) -> Result<DualValue, AuxError> {
    series_table_check(tbl, cutoff)?;
    let analytic = s2_constant(chr, cfg)?;
    let cb = chr.conj();
    let (main, err) = neg_log_derivative_at_one_series(tbl, &cb, cutoff);
    let mut even = ComplexSum::new();
    for (i, &p) in tbl.primes_upto(cutoff).iter().enumerate() {
        let a2 = cb.eval(p).powi(2);
        if a2.re == 0.0 && a2.im == 0.0 {
            continue;
        }
        let pf = p as f64;
        even.add(a2 * tbl.logs()[i] / (pf * pf - a2));
    }
    let ram = ramified_sum(chr.modulus(), |p| p.ln() / (p + 1.0));
    let series = -main + 2.0 * even.value() - ram;
    // Dropped even-k tail: 2Σ_{p > cutoff} log p/p² < 2/cutoff.
    let tail = 2.0 / cutoff as f64;
    Ok(DualValue {
        analytic,
        series,
        series_error: err + tail,
        agreement: (series - analytic.value).norm(),
    })
}

// ---------------------------------------------------------------------------
// The sums

/// V_x(s) = Σ_{n<=x} Λ(n) n^{−s}.
pub fn v_series(s: Complex64, x: f64, tbl: &PrimeTable) -> Result<Complex64, AuxError> {
    if x < 2.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(prime_power_sum(tbl, 0, integer_floor(x), s, Coefficient::Lambda, |_| {
        Complex64::new(1.0, 0.0)
    })?)
}

/// V_x(s + iτ) with p^{−iτ} from `phase`.
pub fn v_series_twisted<F: Fn(u64) -> Complex64>(
    s: Complex64,
    x: f64,
    tbl: &PrimeTable,
    phase: F,
) -> Result<Complex64, AuxError> {
    if x < 2.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(prime_power_sum(tbl, 0, integer_floor(x), s, Coefficient::Lambda, phase)?)
}

/// Σ_{lo < n <= hi} coef(n) w(n) n^{−s} for the scheme's weight w.
fn scheme_range_sum(
    scheme: &WeightScheme,
    s: Complex64,
    lo: u64,
    hi: u64,
    coef: Coefficient,
    tbl: &PrimeTable,
) -> Result<Complex64, AuxError> {
    Ok(prime_power_sum(tbl, lo, hi, s, coef, |p| scheme.value(p))?)
}

/// W_x, Z_x (schemes B, B′: coefficient Λ(n)) or M_x (C, C′: Λ(n)/log n).
pub fn aux_series(scheme: &WeightScheme, s: Complex64, tbl: &PrimeTable) -> Result<Complex64, AuxError> {
    let lo = match scheme.kind.coefficient() {
        Coefficient::LambdaOverLog => 1,
        _ => 0,
    };
    scheme_range_sum(scheme, s, lo, scheme.params.x_int(), scheme.kind.coefficient(), tbl)
}

/// Term-wise s-derivative of [`aux_series`].
pub fn aux_series_derivative(scheme: &WeightScheme, s: Complex64, tbl: &PrimeTable) -> Result<Complex64, AuxError> {
    let coef = match scheme.kind.coefficient() {
        Coefficient::Lambda => Coefficient::LambdaLog,
        _ => Coefficient::Lambda,
    };
    Ok(-scheme_range_sum(scheme, s, 0, scheme.params.x_int(), coef, tbl)?)
}

/// The same sum split at the n-cutoffs x^ε, m x^ε, x^δ (four parts T₁..T₄).
pub fn aux_series_parts(scheme: &WeightScheme, s: Complex64, tbl: &PrimeTable) -> Result<[Complex64; 4], AuxError> {
    let [c1, c2, c3, c4] = scheme.params.cuts();
    let coef = scheme.kind.coefficient();
    let lo = if coef == Coefficient::LambdaOverLog { 1 } else { 0 };
    Ok([
        scheme_range_sum(scheme, s, lo, c1, coef, tbl)?,
        scheme_range_sum(scheme, s, c1, c2, coef, tbl)?,
        scheme_range_sum(scheme, s, c2, c3, coef, tbl)?,
        scheme_range_sum(scheme, s, c3, c4, coef, tbl)?,
    ])
}

/// Restriction of [`aux_series`] to primes in one segment (prime powers included).
pub fn aux_series_segment(
    scheme: &WeightScheme,
    s: Complex64,
    seg: Segment,
    tbl: &PrimeTable,
) -> Result<Complex64, AuxError> {
    let coef = scheme.kind.coefficient();
    let lo = if coef == Coefficient::LambdaOverLog { 1 } else { 0 };
    Ok(prime_power_sum(tbl, lo, scheme.params.x_int(), s, coef, |p| {
        if scheme.params.segment(p) == Some(seg) {
            scheme.value(p)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?)
}

/// W_x vs 2V_{x^δ} − V_x − V_{mx^ε} + S − log m (B), or
/// Z_x vs −2V_{x^δ} + V_x + V_{mx^ε} + S + log m (B′).
pub fn v_identity(scheme: &WeightScheme, s: Complex64, tbl: &PrimeTable) -> Result<IdentityDefect, AuxError> {
    let p = &scheme.params;
    let [_, c2, c3, c4] = p.cuts();
    let v = |c: u64| v_series(s, c as f64, tbl);
    let comb = 2.0 * v(c3)? - v(c4)? - v(c2)?;
    let rhs = match scheme.kind {
        SchemeKind::B => comb + p.s_const - p.m.ln(),
        SchemeKind::Bprime => -comb + p.s_const + p.m.ln(),
        _ => return Err(AuxError::Params("V-identity needs scheme B or B'".into())),
    };
    let lhs = aux_series(scheme, s, tbl)?;
    Ok(IdentityDefect {
        lambda_side: lhs,
        prime_side: rhs,
        defect: (lhs - rhs).norm(),
    })
}

// ---------------------------------------------------------------------------
// Linear model, roots, circles

/// Radius of the disc around 1 on which the linear model is asserted.
pub fn hypothesis_radius(params: &SchemeParams) -> f64 {
    let l = params.log_x();
    (6.0 * params.s_const.norm() + 2.0) / (params.coefficient().abs() * l * l)
}

fn linear_form_unchecked(scheme: &WeightScheme, s: Complex64) -> Result<Complex64, AuxError> {
    let p = &scheme.params;
    let l2 = p.log_x().powi(2);
    let k = p.coefficient() * l2 / 2.0;
    match scheme.kind {
        SchemeKind::B => Ok((1.0 - s) * k + p.s_const - 2.0 * p.m.ln()),
        SchemeKind::Bprime => Ok((s - 1.0) * k + p.s_const + 2.0 * p.m.ln()),
        _ => Err(AuxError::Params("linear form needs scheme B or B'".into())),
    }
}

/// `((1−s)/2)·κ log²x + S − 2 log m` (B) or `((s−1)/2)·κ log²x + S + 2 log m` (B′),
/// κ = 2δ² − 1 − ε². Rejects s outside the hypothesis disc.
pub fn wx_linear_form(scheme: &WeightScheme, s: Complex64) -> Result<Complex64, AuxError> {
    let bound = hypothesis_radius(&scheme.params);
    let dist = (s - 1.0).norm();
    if dist > bound * (1.0 + 1e-12) {
        return Err(AuxError::Hypothesis { dist, bound });
    }
    linear_form_unchecked(scheme, s)
}

/// Root of the linear model.
pub fn closed_form_root(scheme: &WeightScheme) -> Result<Complex64, AuxError> {
    let p = &scheme.params;
    let l2 = p.log_x().powi(2);
    let k = p.coefficient();
    match scheme.kind {
        SchemeKind::B => Ok(1.0 + 2.0 * (p.s_const - 2.0 * p.m.ln()) / (k * l2)),
        SchemeKind::Bprime => Ok(1.0 + 2.0 * (p.s_const + 2.0 * p.m.ln()) / (-k * l2)),
        _ => Err(AuxError::Params("closed-form root needs scheme B or B'".into())),
    }
}

pub const NEWTON_MAX_STEPS: usize = 50;

/// Newton on the finite sum, started at the closed-form root.
pub fn newton_root(scheme: &WeightScheme, tbl: &PrimeTable) -> Result<Complex64, AuxError> {
    let mut z = closed_form_root(scheme)?;
    let tol = 1e-3 / scheme.params.log_x().powi(3);
    for _ in 0..NEWTON_MAX_STEPS {
        let f = aux_series(scheme, z, tbl)?;
        let d = aux_series_derivative(scheme, z, tbl)?;
        let step = f / d;
        z -= step;
        if step.norm() < tol {
            return Ok(z);
        }
    }
    Err(AuxError::Newton(NEWTON_MAX_STEPS))
}

/// Which constant fixes the circles of the small-value construction.
///
/// With m chosen from S₂, only circles built from conj(S₂) put the model root
/// at distance exactly |S₂| from the center; the literal variants are kept
/// for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircleSource {
    S2Mirrored,
    S2Literal,
    S1Literal,
}

impl std::str::FromStr for CircleSource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "s2" | "s2-mirrored" => Ok(Self::S2Mirrored),
            "s2-literal" => Ok(Self::S2Literal),
            "s1" | "s1-literal" => Ok(Self::S1Literal),
            _ => Err(format!("unknown circle source {s:?}")),
        }
    }
}

/// The constant to pass to [`rouche_circles`] for a given construction.
pub fn circle_constant(theorem: Theorem, source: CircleSource, s1: Complex64, s2: Complex64) -> Complex64 {
    match (theorem, source) {
        (Theorem::Thm2, _) => s1,
        (Theorem::Thm4, CircleSource::S2Mirrored) => s2.conj(),
        (Theorem::Thm4, CircleSource::S2Literal) => s2,
        (Theorem::Thm4, CircleSource::S1Literal) => s1,
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct RoucheCircles {
    pub c1: f64,
    pub c2: f64,
    pub center: Complex64,
    pub outer_radius: f64,
    pub inner_radius: f64,
}

impl RoucheCircles {
    fn point(&self, r: f64, k: usize, n: usize) -> Complex64 {
        let phi = 2.0 * PI * k as f64 / n as f64;
        self.center + Complex64::from_polar(r, phi)
    }

    /// n equispaced points of the inner circle 𝒞₁.
    pub fn inner_boundary(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|k| self.point(self.inner_radius, k, n)).collect()
    }

    /// n equispaced points of the outer circle 𝒞₀.
    pub fn outer_boundary(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|k| self.point(self.outer_radius, k, n)).collect()
    }

    pub fn contains_inner(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.inner_radius
    }
}

/// c₁ + i c₂ = (4|S| + 1)/|κ| − i Im S/|κ|; center 1 + (c₁ + i c₂)/log²x,
/// radii c₁/(2 log²x) and c₁/(4 log²x).
pub fn rouche_circles(s: Complex64, params: &SchemeParams) -> RoucheCircles {
    let k = params.coefficient().abs();
    let l2 = params.log_x().powi(2);
    let c1 = (4.0 * s.norm() + 1.0) / k;
    let c2 = -s.im / k;
    RoucheCircles {
        c1,
        c2,
        center: Complex64::new(1.0 + c1 / l2, c2 / l2),
        outer_radius: c1 / (2.0 * l2),
        inner_radius: c1 / (4.0 * l2),
    }
}

/// Geometry of the model on 𝒞₁.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CircleGeometry {
    pub root: Complex64,
    pub root_distance: f64,
    pub inner_radius: f64,
    /// Sampled min of |linear model| on 𝒞₁.
    pub boundary_min: f64,
}

pub fn circle_geometry(scheme: &WeightScheme, circles: &RoucheCircles, samples: usize) -> Result<CircleGeometry, AuxError> {
    let root = closed_form_root(scheme)?;
    let mut min = f64::INFINITY;
    for z in circles.inner_boundary(samples) {
        min = min.min(wx_linear_form(scheme, z)?.norm());
    }
    Ok(CircleGeometry {
        root,
        root_distance: (root - circles.center).norm(),
        inner_radius: circles.inner_radius,
        boundary_min: min,
    })
}

/// max over 𝒞₁ samples of |aux_series − linear model|.
pub fn linearization_residual(
    scheme: &WeightScheme,
    circles: &RoucheCircles,
    tbl: &PrimeTable,
    samples: usize,
) -> Result<f64, AuxError> {
    let mut max: f64 = 0.0;
    for z in circles.inner_boundary(samples) {
        let d = aux_series(scheme, z, tbl)? - wx_linear_form(scheme, z)?;
        max = max.max(d.norm());
    }
    Ok(max)
}

/// What the auxiliary sum is compared against on the shifted circle.
pub enum Perturbation<'a> {
    /// The sum against itself: margin = min |aux|.
    SelfTest,
    /// −ζ′/ζ(s + iτ) from the Euler–Maclaurin evaluator (moderate τ).
    Direct { tau: f64, cfg: &'a EvalConfig },
    /// −ζ′/ζ(s + iτ) = Σ_{n<=cutoff} Λ(n) n^{−s} p^{−ikτ} + tail, with p^{−iτ}
    /// from `phase`; the dropped tail is bounded by Σ_{n>cutoff} log n · n^{−σ}.
    Series {
        phase: &'a dyn Fn(u64) -> Complex64,
        cutoff: u64,
    },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RoucheMargin {
    pub min_aux: f64,
    pub max_perturbation: f64,
    pub margin: f64,
}

/// `min_{𝒞₁}|aux| − max_{𝒞₁}|F(s + iτ) − aux(s)|` over the boundary samples.
pub fn rouche_margin(
    scheme: &WeightScheme,
    circles: &RoucheCircles,
    tbl: &PrimeTable,
    pert: &Perturbation<'_>,
    samples: usize,
) -> Result<RoucheMargin, AuxError> {
    let mut min_aux = f64::INFINITY;
    let mut max_pert: f64 = 0.0;
    for z in circles.inner_boundary(samples) {
        let w = aux_series(scheme, z, tbl)?;
        min_aux = min_aux.min(w.norm());
        let diff = match pert {
            Perturbation::SelfTest => 0.0,
            Perturbation::Direct { tau, cfg } => {
                let f = neg_zeta_log_derivative(z + Complex64::new(0.0, *tau), cfg)?;
                (f.value - w).norm() + f.error_radius
            }
            Perturbation::Series { phase, cutoff } => {
                let f = prime_power_sum(tbl, 0, *cutoff, z, Coefficient::Lambda, |p| phase(p))?;
                let c = *cutoff as f64;
                let d = z.re - 1.0;
                let tail = c.powf(-d) * (c.ln() / d + 1.0 / (d * d));
                (f - w).norm() + tail
            }
        };
        max_pert = max_pert.max(diff);
    }
    Ok(RoucheMargin {
        min_aux,
        max_perturbation: max_pert,
        margin: min_aux - max_pert,
    })
}

// ---------------------------------------------------------------------------
// M-series identities

/// Part of M_x over n with (q, n) > 1 against −Σ_{p|q} log(1 ∓ 1/p).
pub fn ramified_m_identity(scheme: &WeightScheme, s: Complex64, tbl: &PrimeTable) -> Result<IdentityDefect, AuxError> {
    let q = scheme.params.chr.modulus();
    let lhs = prime_power_sum(tbl, 1, scheme.params.x_int(), s, Coefficient::LambdaOverLog, |p| {
        if q % p == 0 {
            scheme.value(p)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?;
    let rhs = match scheme.kind {
        SchemeKind::C => -ramified_sum(q, |p| (1.0 - 1.0 / p).ln()),
        SchemeKind::Cprime => -ramified_sum(q, |p| (1.0 + 1.0 / p).ln()),
        _ => return Err(AuxError::Params("M identities need scheme C or C'".into())),
    };
    let rhs = Complex64::new(rhs, 0.0);
    Ok(IdentityDefect {
        lambda_side: lhs,
        prime_side: rhs,
        defect: (lhs - rhs).norm(),
    })
}

/// M_x(1) against log log x + log ε + C₀ (C) or −log log x^ε − C₀ + log(π²/6) (C′).
pub fn m_at_one_identity(scheme: &WeightScheme, tbl: &PrimeTable) -> Result<IdentityDefect, AuxError> {
    let p = &scheme.params;
    let lhs = aux_series(scheme, Complex64::new(1.0, 0.0), tbl)?;
    let ll = p.log_x().ln();
    let rhs = match scheme.kind {
        SchemeKind::C => ll + p.epsilon().ln() + euler_gamma(),
        SchemeKind::Cprime => -(p.epsilon() * p.log_x()).ln() - euler_gamma() + log_zeta2(),
        _ => return Err(AuxError::Params("M identities need scheme C or C'".into())),
    };
    let rhs = Complex64::new(rhs, 0.0);
    Ok(IdentityDefect {
        lambda_side: lhs,
        prime_side: rhs,
        defect: (lhs - rhs).norm(),
    })
}

/// Mean-value comparison on 𝒞₁: max |M_x(s) − M_x(1)| against
/// max |M′_x| · max |s − 1| over the closed disc's boundary samples.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeanValueCheck {
    pub max_deviation: f64,
    pub max_derivative: f64,
    pub max_radius: f64,
    pub holds: bool,
}

pub fn m_mean_value_check(
    scheme: &WeightScheme,
    circles: &RoucheCircles,
    tbl: &PrimeTable,
    samples: usize,
) -> Result<MeanValueCheck, AuxError> {
    let one = Complex64::new(1.0, 0.0);
    let m1 = aux_series(scheme, one, tbl)?;
    // The derivative is bounded on the segment [1, s] by its max over the
    // region; sample both the circle and the segment from 1 to the center.
    let mut max_dev: f64 = 0.0;
    let mut max_der: f64 = 0.0;
    let mut max_r: f64 = 0.0;
    for z in circles.inner_boundary(samples) {
        max_dev = max_dev.max((aux_series(scheme, z, tbl)? - m1).norm());
        max_r = max_r.max((z - one).norm());
        for j in 0..=8 {
            let w = one + (z - one) * (j as f64 / 8.0);
            max_der = max_der.max(aux_series_derivative(scheme, w, tbl)?.norm());
        }
    }
    Ok(MeanValueCheck {
        max_deviation: max_dev,
        max_derivative: max_der,
        max_radius: max_r,
        holds: max_dev <= max_der * max_r * (1.0 + 1e-9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::character;

    fn params(x: f64) -> SchemeParams {
        let chr = character(5, 1).unwrap();
        SchemeParams::derived(x, DEFAULT_DELTA, chr, Theorem::Thm2, &EvalConfig::default()).unwrap()
    }

    #[test]
    fn coefficient_identity() {
        for d in [0.55, 0.75, 0.9] {
            assert!((scheme_coefficient(d) + 2.0 * (d - 1.0f64).powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn choose_m_examples() {
        let z = Complex64::new(0.0, 0.0);
        assert!((choose_m(z, Theorem::Thm2) - 0.25f64.exp()).abs() < 1e-15);
        assert!((choose_m(Complex64::new(1.0, 0.0), Theorem::Thm2) - 1.5f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn parameter_guards() {
        let chr = character(5, 1).unwrap();
        let s = Complex64::new(0.2, 0.0);
        assert!(SchemeParams::new(200.0, 0.4, 2.0, chr.clone(), s).is_err());
        assert!(SchemeParams::new(20.0, 0.75, 2.0, chr.clone(), s).is_err());
        assert!(SchemeParams::new(200.0, 0.75, 0.5, chr.clone(), s).is_err());
        assert!(SchemeParams::new(200.0, 0.75, 2.0, character(5, 0).unwrap(), s).is_err());
        assert!(SchemeParams::new(200.0, 0.75, 2.0, chr, s).is_ok());
    }

    #[test]
    fn integer_cutoffs_exact() {
        let p = params(1e4);
        assert_eq!(p.cuts()[0], 100);
        assert_eq!(p.cuts()[2], 1000);
        assert_eq!(p.cuts()[3], 10000);
    }

    #[test]
    fn weights_unimodular_and_targets() {
        let tbl = PrimeTable::new(1000).unwrap();
        let p = params(1000.0);
        for kind in [SchemeKind::B, SchemeKind::C, SchemeKind::Bprime, SchemeKind::Cprime] {
            let w = WeightScheme::new(kind, p.clone());
            for &pr in tbl.primes() {
                assert!((w.value(pr).norm() - 1.0).abs() < 1e-15);
            }
            assert_eq!(w.value(1009), Complex64::new(0.0, 0.0));
        }
        let b = WeightScheme::new(SchemeKind::B, p);
        assert_eq!(b.value(5), Complex64::new(1.0, 0.0));
        assert_eq!(b.value(2), p_conj(2));
    }

    fn p_conj(n: u64) -> Complex64 {
        character(5, 1).unwrap().eval(n).conj()
    }

    #[test]
    fn forced_unit_reduces_to_v() {
        let tbl = PrimeTable::new(2000).unwrap();
        let mut w = WeightScheme::new(SchemeKind::B, params(2000.0));
        w.forced_unit = true;
        let s = Complex64::new(1.2, 3.0);
        let a = aux_series(&w, s, &tbl).unwrap();
        let v = v_series(s, 2000.0, &tbl).unwrap();
        assert!((a - v).norm() < 1e-12);
    }

    #[test]
    fn parts_add_up() {
        let tbl = PrimeTable::new(5000).unwrap();
        let s = Complex64::new(1.05, 0.3);
        for kind in [SchemeKind::B, SchemeKind::C, SchemeKind::Bprime, SchemeKind::Cprime] {
            let w = WeightScheme::new(kind, params(5000.0));
            let full = aux_series(&w, s, &tbl).unwrap();
            let parts: Complex64 = aux_series_parts(&w, s, &tbl).unwrap().iter().sum();
            let segs: Complex64 = SEGMENTS.iter().map(|&g| aux_series_segment(&w, s, g, &tbl).unwrap()).sum();
            assert!((full - parts).norm() < 1e-12);
            assert!((full - segs).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let tbl = PrimeTable::new(3000).unwrap();
        let s = Complex64::new(1.1, 0.5);
        let h = 1e-5;
        for kind in [SchemeKind::B, SchemeKind::C] {
            let w = WeightScheme::new(kind, params(3000.0));
            let fd = (aux_series(&w, s + h, &tbl).unwrap() - aux_series(&w, s - h, &tbl).unwrap()) / (2.0 * h);
            let d = aux_series_derivative(&w, s, &tbl).unwrap();
            assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0));
        }
    }

    #[test]
    fn root_right_of_one_and_inside() {
        let p = params(1e5);
        let w = WeightScheme::new(SchemeKind::B, p.clone());
        let root = closed_form_root(&w).unwrap();
        assert!(root.re > 1.0);
        let c = rouche_circles(p.s_const(), &p);
        let g = circle_geometry(&w, &c, BOUNDARY_SAMPLES).unwrap();
        assert!(g.root_distance < g.inner_radius);
        // Exact model: distance |S|/(|κ| log²x), boundary min 1/8.
        let want = p.s_const().norm() / (p.coefficient().abs() * p.log_x().powi(2));
        assert!((g.root_distance - want).abs() < 1e-12);
        assert!((g.boundary_min - 0.125).abs() < 1e-3);
    }

    #[test]
    fn hypothesis_region_enforced() {
        let w = WeightScheme::new(SchemeKind::B, params(1e4));
        assert!(wx_linear_form(&w, Complex64::new(1.0, 0.0)).is_ok());
        assert!(matches!(
            wx_linear_form(&w, Complex64::new(1.5, 0.0)),
            Err(AuxError::Hypothesis { .. })
        ));
        let v = wx_linear_form(&w, Complex64::new(1.0, 0.0)).unwrap();
        let p = &w.params;
        assert!((v - (p.s_const() - 2.0 * p.m().ln())).norm() < 1e-15);
    }

    #[test]
    fn self_test_margin_is_min_modulus() {
        let tbl = PrimeTable::new(10_000).unwrap();
        let p = params(1e4);
        let w = WeightScheme::new(SchemeKind::B, p.clone());
        let c = rouche_circles(p.s_const(), &p);
        let m = rouche_margin(&w, &c, &tbl, &Perturbation::SelfTest, 64).unwrap();
        assert_eq!(m.max_perturbation, 0.0);
        assert!(m.margin > 0.0);
        assert_eq!(m.margin, m.min_aux);
    }

    #[test]
    fn export_fields() {
        let p = params(1e4);
        let w = WeightScheme::new(SchemeKind::B, p.clone());
        let c = rouche_circles(p.s_const(), &p);
        let j = serde_json::to_value(w.export(Some(&c))).unwrap();
        for k in ["kind", "q", "chi_label", "x", "delta", "m", "S_re", "S_im", "c1", "c2"] {
            assert!(j.get(k).is_some(), "{k}");
        }
    }
}
