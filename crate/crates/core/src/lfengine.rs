//! Evaluation of ζ(s), its first two derivatives, L(s, χ) and log L(s, χ).
//!
//! Hurwitz zeta values come from Euler–Maclaurin summation on the regularized
//! function ζ(s, a) − 1/(s − 1), carried as a jet so ζ', ζ'' cost one extra
//! multiply per term. For non-principal χ,
//!
//! ```text
//! L(s, χ) = q^{-s} Σ_{a=1}^{q} χ(a) ζ(s, a/q)
//! ```
//!
//! and the pole terms cancel by orthogonality, which keeps s = 1 well posed.
//! Arithmetic is f64 with compensated summation; the reported error radius is
//! the first omitted Bernoulli term plus a rounding allowance.

use crate::characters::DirichletCharacter;
use crate::numeric::{bernoulli_over_factorial, max_bernoulli_terms, unwrap_near, Jet, JetSum};
use crate::primesums::{prime_power_sum, Coefficient, PrimeError, PrimeTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// log ζ(σ) < π for σ >= this, so the principal logarithm of L(s, χ)
/// already equals the Euler-product branch there.
pub const PRINCIPAL_BRANCH_SIGMA: f64 = 1.1;

#[derive(Debug, Error)]
pub enum LfError {
    #[error("s = 1 is a pole of ζ")]
    Pole,
    #[error("L(s, χ) evaluation requires a non-principal character")]
    PrincipalCharacter,
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
    #[error("branch tracking failed near σ = {sigma}: |L| = {modulus:e}")]
    BranchTracking { sigma: f64, modulus: f64 },
    #[error("height T = {0} below 4 leaves no terms in the truncated sum")]
    HeightTooSmall(f64),
    #[error(transparent)]
    Primes(#[from] PrimeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    /// Working precision of the float evaluators. Only 53 is realised by the
    /// Euler–Maclaurin path; larger values feed the big-float phase code.
    pub precision_bits: u32,
    /// Minimum number of head terms N per Hurwitz shift.
    pub euler_maclaurin_cutoff: u64,
    /// Number of Bernoulli correction terms M.
    pub bernoulli_terms: usize,
    /// Real part at which log L is anchored before continuation.
    pub branch_anchor_sigma: f64,
    /// Finest horizontal step tolerated while unwrapping log L.
    pub branch_resolution: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            precision_bits: 53,
            euler_maclaurin_cutoff: 10,
            bernoulli_terms: 24,
            branch_anchor_sigma: 6.0,
            branch_resolution: 1e-2,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), LfError> {
        if self.precision_bits < 53 {
            return Err(LfError::InvalidConfig(format!(
                "precision_bits {} < 53",
                self.precision_bits
            )));
        }
        if self.euler_maclaurin_cutoff < 10 {
            return Err(LfError::InvalidConfig("euler_maclaurin_cutoff must be >= 10".into()));
        }
        if self.bernoulli_terms < 2 || self.bernoulli_terms + 1 >= max_bernoulli_terms() {
            return Err(LfError::InvalidConfig(format!(
                "bernoulli_terms must lie in [2, {}]",
                max_bernoulli_terms() - 2
            )));
        }
        if !(self.branch_anchor_sigma >= 3.0) {
            return Err(LfError::InvalidConfig("branch_anchor_sigma must be >= 3".into()));
        }
        if !(self.branch_resolution > 0.0 && self.branch_resolution <= 0.1) {
            return Err(LfError::InvalidConfig("branch_resolution must lie in (0, 0.1]".into()));
        }
        Ok(())
    }

    /// Same config with twice the head length and more Bernoulli terms, used
    /// for a-posteriori re-evaluation.
    pub fn refined(&self) -> Self {
        EvalConfig {
            euler_maclaurin_cutoff: self.euler_maclaurin_cutoff * 2,
            bernoulli_terms: (self.bernoulli_terms + 8).min(max_bernoulli_terms() - 2),
            ..*self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexEval {
    pub value: Complex64,
    pub error_radius: f64,
    pub precision_bits: u32,
}

impl ComplexEval {
    pub fn new(value: Complex64, error_radius: f64) -> Self {
        ComplexEval {
            value,
            error_radius,
            precision_bits: 53,
        }
    }
}

/// A jet with an error radius per component.
#[derive(Clone, Copy, Debug)]
pub struct JetEval {
    pub jet: Jet,
    pub error: [f64; 3],
}

impl JetEval {
    fn component(&self, k: usize) -> ComplexEval {
        let v = match k {
            0 => self.jet.v,
            1 => self.jet.d1,
            _ => self.jet.d2,
        };
        ComplexEval::new(v, self.error[k])
    }
}

fn effective_cutoff(s: Complex64, cfg: &EvalConfig) -> u64 {
    let m = cfg.bernoulli_terms as f64;
    let need = ((s.norm() + 2.0 * m + 2.0) / PI).ceil() as u64;
    need.max(cfg.euler_maclaurin_cutoff)
}

/// Jet of ((N+a)^{1-s} − 1)/(s − 1) in s, with L = ln(N + a).
fn integral_jet(s: Complex64, ln_u: f64) -> Jet {
    let z = (Complex64::new(1.0, 0.0) - s) * ln_u;
    let (g, g1, g2) = if z.norm() < 1.0 {
        let mut g = Complex64::new(0.0, 0.0);
        let mut g1 = Complex64::new(0.0, 0.0);
        let mut g2 = Complex64::new(0.0, 0.0);
        // g(z) = Σ z^k/(k+1)!
        let mut zk = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 0..40usize {
            fact *= (k + 1) as f64;
            g += zk / fact;
            if k + 1 < 40 {
                g1 += zk * ((k + 1) as f64) / (fact * (k + 2) as f64);
                g2 += zk * ((k + 1) as f64 * (k + 2) as f64) / (fact * (k + 2) as f64 * (k + 3) as f64);
            }
            zk *= z;
        }
        (g, g1, g2)
    } else {
        let ez = z.exp();
        let g = (ez - 1.0) / z;
        let g1 = (ez * (z - 1.0) + 1.0) / (z * z);
        let g2 = (ez * (z * z - 2.0 * z + 2.0) - 2.0) / (z * z * z);
        (g, g1, g2)
    };
    // f = −L g(z), z' = −L
    Jet::new(-ln_u * g, ln_u * ln_u * g1, -ln_u * ln_u * ln_u * g2)
}

/// Endpoint corrections for ζ_reg(s, a): integral + boundary + Bernoulli terms,
/// at u = N + a. Returns the jet and the size of the first omitted term.
fn em_tail(s: Complex64, u: f64, m: usize) -> (Jet, [f64; 3]) {
    let ln_u = u.ln();
    let c = bernoulli_over_factorial();
    let upow = Jet::inv_pow(s, ln_u);
    let mut acc = integral_jet(s, ln_u).add(upow.scale(Complex64::new(0.5, 0.0)));
    // P_1 = s, then P_{j+1} = P_j (s + 2j − 1)(s + 2j)
    let mut poly = Jet::new(s, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let mut uscale = 1.0 / u;
    let mut last = Jet::ZERO;
    for j in 1..=m + 1 {
        let term = poly.mul(upow).scale(Complex64::new(c[j - 1] * uscale, 0.0));
        if j <= m {
            acc = acc.add(term);
        } else {
            last = term;
        }
        let f1 = Jet::new(s + (2 * j - 1) as f64, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let f2 = Jet::new(s + (2 * j) as f64, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        poly = poly.mul(f1).mul(f2);
        uscale /= u * u;
    }
    let sig = s.re + 2.0 * m as f64 + 1.0;
    let factor = if sig > 0.0 {
        (s + (2 * m + 1) as f64).norm() / sig
    } else {
        10.0
    };
    let err = [
        last.v.norm() * factor,
        last.d1.norm() * factor,
        last.d2.norm() * factor,
    ];
    (acc, err)
}

/// Σ_{m=1}^{upto} w(m) m^{-s} as a jet, plus Σ |w(m)| m^{-σ} for the rounding allowance.
fn head_jet<W: Fn(u64) -> Complex64>(s: Complex64, upto: u64, order: usize, w: W) -> (Jet, f64) {
    let mut acc = JetSum::default();
    let mut abs = 0.0f64;
    for n in 1..=upto {
        let c = w(n);
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let ln = (n as f64).ln();
        let v = (-s * ln).exp() * c;
        abs += v.norm();
        match order {
            0 => acc.add(Jet::constant(v)),
            1 => acc.add(Jet::new(v, -v * ln, Complex64::new(0.0, 0.0))),
            _ => acc.add(Jet::new(v, -v * ln, v * ln * ln)),
        }
    }
    (acc.value(), abs)
}

fn rounding_allowance(s: Complex64, abs_sum: f64, ln_top: f64) -> [f64; 3] {
    let base = f64::EPSILON * abs_sum * (s.norm() * ln_top + 8.0);
    [base, base * ln_top, base * ln_top * ln_top]
}

/// ζ(s) with ζ'(s), ζ''(s).
pub fn zeta_jet(s: Complex64, cfg: &EvalConfig) -> Result<JetEval, LfError> {
    cfg.validate()?;
    if s == Complex64::new(1.0, 0.0) {
        return Err(LfError::Pole);
    }
    let n = effective_cutoff(s, cfg);
    // ζ_reg(s, 1): head over (n + 1)^{-s}, n < N, is Σ_{m=1}^{N} m^{-s}.
    let (head, abs) = head_jet(s, n, 2, |_| Complex64::new(1.0, 0.0));
    let (tail, terr) = em_tail(s, (n + 1) as f64, cfg.bernoulli_terms);
    let w = 1.0 / (s - 1.0);
    let pole = Jet::new(w, -w * w, 2.0 * w * w * w);
    let jet = head.add(tail).add(pole);
    let r = rounding_allowance(s, abs + tail.v.norm(), ((n + 1) as f64).ln());
    Ok(JetEval {
        jet,
        error: [terr[0] + r[0], terr[1] + r[1], terr[2] + r[2]],
    })
}

pub fn zeta(s: Complex64, cfg: &EvalConfig) -> Result<ComplexEval, LfError> {
    Ok(zeta_jet(s, cfg)?.component(0))
}

pub fn zeta_prime(s: Complex64, cfg: &EvalConfig) -> Result<ComplexEval, LfError> {
    Ok(zeta_jet(s, cfg)?.component(1))
}

pub fn zeta_second(s: Complex64, cfg: &EvalConfig) -> Result<ComplexEval, LfError> {
    Ok(zeta_jet(s, cfg)?.component(2))
}

/// −ζ'/ζ(s).
pub fn neg_zeta_log_derivative(s: Complex64, cfg: &EvalConfig) -> Result<ComplexEval, LfError> {
    let j = zeta_jet(s, cfg)?;
    let v = -j.jet.d1 / j.jet.v;
    let err = (j.error[1] + v.norm() * j.error[0]) / (j.jet.v.norm() - j.error[0]).max(1e-300);
    Ok(ComplexEval::new(v, err))
}

/// L(s, χ), L'(s, χ), L''(s, χ) for non-principal χ. `order` limits how many
/// derivatives are accumulated in the head sum (0, 1 or 2).
pub fn dirichlet_l_jet(
    s: Complex64,
    chr: &DirichletCharacter,
    cfg: &EvalConfig,
    order: usize,
) -> Result<JetEval, LfError> {
    cfg.validate()?;
    if chr.is_principal() {
        return Err(LfError::PrincipalCharacter);
    }
    let q = chr.modulus();
    let n = effective_cutoff(s, cfg);
    let (head, abs) = head_jet(s, q * n, order, |m| chr.eval(m));
    let mut tails = JetSum::default();
    let mut terr = [0.0f64; 3];
    for a in 1..q {
        let c = chr.eval(a);
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let (t, e) = em_tail(s, n as f64 + a as f64 / q as f64, cfg.bernoulli_terms);
        tails.add(t.scale(c));
        for k in 0..3 {
            terr[k] += e[k];
        }
    }
    let qs = Jet::inv_pow(s, (q as f64).ln());
    let tail = qs.mul(tails.value());
    let jet = head.add(tail);
    let qabs = (-(q as f64).ln() * s.re).exp();
    let ln_top = ((q * n + q) as f64).ln();
    let r = rounding_allowance(s, abs + tail.v.norm(), ln_top);
    let lq = (q as f64).ln();
    let error = [
        qabs * terr[0] + r[0],
        qabs * (terr[1] + lq * terr[0]) + r[1],
        qabs * (terr[2] + 2.0 * lq * terr[1] + lq * lq * terr[0]) + r[2],
    ];
    Ok(JetEval { jet, error })
}

pub fn dirichlet_l(s: Complex64, chr: &DirichletCharacter, cfg: &EvalConfig) -> Result<ComplexEval, LfError> {
    Ok(dirichlet_l_jet(s, chr, cfg, 0)?.component(0))
}

/// L'(s, χ)/L(s, χ).
pub fn l_log_derivative(s: Complex64, chr: &DirichletCharacter, cfg: &EvalConfig) -> Result<ComplexEval, LfError> {
    let j = dirichlet_l_jet(s, chr, cfg, 1)?;
    let v = j.jet.d1 / j.jet.v;
    let err = (j.error[1] + v.norm() * j.error[0]) / (j.jet.v.norm() - j.error[0]).max(1e-300);
    Ok(ComplexEval::new(v, err))
}

/// log L(s, χ) on the branch continuous from the Euler product at large σ.
///
/// The principal logarithm is exact for σ >= [`PRINCIPAL_BRANCH_SIGMA`]; below
/// that the argument is unwrapped along a horizontal path with adaptive steps,
/// each step moving the argument by less than π/4.
pub fn log_l(s: Complex64, chr: &DirichletCharacter, cfg: &EvalConfig) -> Result<ComplexEval, LfError> {
    let start = PRINCIPAL_BRANCH_SIGMA.min(cfg.branch_anchor_sigma);
    let at = |sigma: f64| dirichlet_l(Complex64::new(sigma, s.im), chr, cfg);
    if s.re >= start {
        let l = dirichlet_l(s, chr, cfg)?;
        return Ok(ComplexEval::new(l.value.ln(), l.error_radius / l.value.norm()));
    }
    let first = at(start)?;
    let mut cur = first.value.ln();
    let mut sigma = start;
    let mut err = first.error_radius / first.value.norm();
    let mut h = 5.0 * cfg.branch_resolution;
    let floor = cfg.branch_resolution * 1e-3;
    while sigma > s.re {
        let next = (sigma - h).max(s.re);
        let l = at(next)?;
        if l.value.norm() <= 4.0 * l.error_radius {
            return Err(LfError::BranchTracking {
                sigma: next,
                modulus: l.value.norm(),
            });
        }
        let cand = unwrap_near(l.value.ln(), cur.im);
        if (cand.im - cur.im).abs() >= PI / 4.0 {
            h *= 0.5;
            if h < floor {
                return Err(LfError::BranchTracking {
                    sigma: next,
                    modulus: l.value.norm(),
                });
            }
            continue;
        }
        cur = cand;
        sigma = next;
        err = err.max(l.error_radius / l.value.norm());
        h = (h * 1.5).min(5.0 * cfg.branch_resolution);
    }
    Ok(ComplexEval::new(cur, err))
}

/// The same as [`log_l`] but walking on a fixed grid of `step`, used to check
/// that the adaptive walk never skips a branch.
pub fn log_l_fixed_grid(
    s: Complex64,
    chr: &DirichletCharacter,
    cfg: &EvalConfig,
    step: f64,
) -> Result<Complex64, LfError> {
    let start = PRINCIPAL_BRANCH_SIGMA.min(cfg.branch_anchor_sigma);
    let mut cur = dirichlet_l(Complex64::new(start.max(s.re), s.im), chr, cfg)?.value.ln();
    let mut sigma = start;
    while sigma > s.re {
        sigma = (sigma - step).max(s.re);
        let l = dirichlet_l(Complex64::new(sigma, s.im), chr, cfg)?;
        cur = unwrap_near(l.value.ln(), cur.im);
    }
    Ok(cur)
}

/// Truncated series for log L at height T: terms run over 1 < n <= log² T.
#[derive(Clone, Copy, Debug)]
pub struct TruncatedLog {
    pub value: Complex64,
    pub cutoff: u64,
    /// Whether |Im s| is inside the natural window [T, 2T].
    pub in_window: bool,
}

fn truncation_point(t_height: f64) -> Result<u64, LfError> {
    if !(t_height >= 4.0) {
        return Err(LfError::HeightTooSmall(t_height));
    }
    let l = t_height.ln();
    Ok((l * l).floor() as u64)
}

/// Σ_{1<n<=log²T} χ(n)Λ(n)/(n^s log n).
pub fn log_l_truncated(
    tbl: &PrimeTable,
    s: Complex64,
    chr: &DirichletCharacter,
    t_height: f64,
) -> Result<TruncatedLog, LfError> {
    log_l_truncated_twisted(tbl, s, chr, t_height, |_| Complex64::new(1.0, 0.0), s.im.abs())
}

/// [`log_l_truncated`] at s + iτ, with p^{-iτ} supplied by `phase` and |Im| = `height`.
pub fn log_l_truncated_twisted<F: Fn(u64) -> Complex64>(
    tbl: &PrimeTable,
    s: Complex64,
    chr: &DirichletCharacter,
    t_height: f64,
    phase: F,
    height: f64,
) -> Result<TruncatedLog, LfError> {
    let x = truncation_point(t_height)?;
    let in_window = height >= t_height && height <= 2.0 * t_height;
    if !in_window {
        log::warn!("height {height} outside [T, 2T] for T = {t_height}");
    }
    let value = prime_power_sum(tbl, 1, x, s, Coefficient::LambdaOverLog, |p| chr.eval(p) * phase(p))?;
    Ok(TruncatedLog {
        value,
        cutoff: x,
        in_window,
    })
}

/// Σ_{n<=log²T} χ(n)Λ(n)/n^s, the truncated series for −L'/L.
pub fn neg_log_derivative_truncated(
    tbl: &PrimeTable,
    s: Complex64,
    chr: &DirichletCharacter,
    t_height: f64,
) -> Result<Complex64, LfError> {
    let x = truncation_point(t_height)?;
    Ok(prime_power_sum(tbl, 1, x, s, Coefficient::Lambda, |p| chr.eval(p))?)
}

/// |truncated − log L| at s, the defect of the truncated representation.
pub fn log_l_truncated_defect(
    tbl: &PrimeTable,
    s: Complex64,
    chr: &DirichletCharacter,
    t_height: f64,
    cfg: &EvalConfig,
) -> Result<f64, LfError> {
    let tr = log_l_truncated(tbl, s, chr, t_height)?;
    let exact = log_l(s, chr, cfg)?;
    Ok((tr.value - exact.value).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::primitive_characters;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_two_and_four() {
        let cfg = EvalConfig::default();
        let z2 = zeta(c(2.0, 0.0), &cfg).unwrap();
        assert!((z2.value.re - PI * PI / 6.0).abs() < 1e-14);
        assert!(z2.value.im.abs() < 1e-15);
        let z4 = zeta(c(4.0, 0.0), &cfg).unwrap();
        assert!((z4.value.re - PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn zeta_values_off_axis() {
        let cfg = EvalConfig::default();
        // ζ(1/2) and ζ(0) = −1/2, ζ(−1) = −1/12
        let h = zeta(c(0.5, 0.0), &cfg).unwrap();
        assert!((h.value.re + 1.4603545088095868).abs() < 1e-13);
        assert!((zeta(c(0.0, 0.0), &cfg).unwrap().value.re + 0.5).abs() < 1e-14);
        assert!((zeta(c(-1.0, 0.0), &cfg).unwrap().value.re + 1.0 / 12.0).abs() < 1e-12);
        // First nontrivial zero.
        let z = zeta(c(0.5, 14.134725141734693), &cfg).unwrap();
        assert!(z.value.norm() < 1e-12);
    }

    #[test]
    fn zeta_prime_at_zero_and_two() {
        let cfg = EvalConfig::default();
        // ζ'(0) = −log(2π)/2
        let d0 = zeta_prime(c(0.0, 0.0), &cfg).unwrap();
        assert!((d0.value.re + (2.0 * PI).ln() / 2.0).abs() < 1e-13);
        let d2 = zeta_prime(c(2.0, 0.0), &cfg).unwrap();
        assert!((d2.value.re + 0.9375482543158437).abs() < 1e-13);
    }

    #[test]
    fn derivative_jets_match_finite_differences() {
        let cfg = EvalConfig::default();
        let s = c(0.7, 23.0);
        let h = 1e-4;
        let f = |z: Complex64| zeta_jet(z, &cfg).unwrap().jet;
        let j = f(s);
        let fd1 = (f(s + h).v - f(s - h).v) / (2.0 * h);
        let fd2 = (f(s + h).d1 - f(s - h).d1) / (2.0 * h);
        assert!((fd1 - j.d1).norm() < 1e-7 * j.d1.norm().max(1.0));
        assert!((fd2 - j.d2).norm() < 1e-7 * j.d2.norm().max(1.0));
    }

    #[test]
    fn near_pole_is_regular() {
        let cfg = EvalConfig::default();
        let eps = 2f64.powi(-24);
        let z = zeta(c(1.0 + eps, 0.0), &cfg).unwrap();
        // ζ(1+ε) = 1/ε + γ + O(ε)
        assert!((z.value.re - 1.0 / eps - 0.5772156649015329).abs() < 1e-6);
        assert!(matches!(zeta(c(1.0, 0.0), &cfg), Err(LfError::Pole)));
    }

    #[test]
    fn quadratic_mod_four_at_one() {
        // L(1, χ_{-4}) = π/4
        let cfg = EvalConfig::default();
        let chi = &primitive_characters(4).unwrap()[0];
        let l = dirichlet_l(c(1.0, 0.0), chi, &cfg).unwrap();
        assert!((l.value.re - PI / 4.0).abs() < 1e-14);
        assert!(l.error_radius < 1e-12);
    }

    #[test]
    fn principal_rejected() {
        let cfg = EvalConfig::default();
        let chars = crate::characters::characters(5).unwrap();
        assert!(matches!(
            dirichlet_l(c(2.0, 0.0), &chars[0], &cfg),
            Err(LfError::PrincipalCharacter)
        ));
    }

    #[test]
    fn config_invariants() {
        let bad = EvalConfig {
            euler_maclaurin_cutoff: 9,
            ..EvalConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = EvalConfig {
            branch_anchor_sigma: 2.0,
            ..EvalConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = EvalConfig {
            bernoulli_terms: 1,
            ..EvalConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn branch_walk_agrees_with_fixed_grid() {
        let cfg = EvalConfig::default();
        let chi = &primitive_characters(5).unwrap()[1];
        for t in [3.0, 17.5, 140.0, 2000.0] {
            let s = c(0.6, t);
            let a = log_l(s, chi, &cfg).unwrap().value;
            let b = log_l_fixed_grid(s, chi, &cfg, cfg.branch_resolution).unwrap();
            assert!((a - b).norm() < 1e-9, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn truncation_guard() {
        let tbl = PrimeTable::new(1000).unwrap();
        let chi = &primitive_characters(5).unwrap()[1];
        assert!(matches!(
            log_l_truncated(&tbl, c(1.0, 3.0), chi, 3.9),
            Err(LfError::HeightTooSmall(_))
        ));
        let r = log_l_truncated(&tbl, c(1.0, 100.0), chi, 100.0).unwrap();
        assert_eq!(r.cutoff, 21);
        assert!(r.in_window);
    }
}
