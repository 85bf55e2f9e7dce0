//! The ten end-to-end acceptance checks, shared by the integration test and
//! the `verify` subcommand.

use crate::auxseries::{
    aux_series, circle_constant, circle_geometry, closed_form_root, linearization_residual, newton_root,
    rouche_circles, s1_constant, s2_constant, v_series_twisted, SchemeParams, Theorem, WeightScheme,
    BOUNDARY_SAMPLES,
};
use crate::characters::{character, primitive_characters, DirichletCharacter};
use crate::config::Config;
use crate::critzeros::{count_zeros, find_critical_points, SearchRect};
use crate::diophantine::{find_tau, targets_from_scheme, PhaseTable, SearchOptions};
use crate::lfengine::{dirichlet_l, log_l_truncated_defect, zeta, EvalConfig};
use crate::primesums::{log_euler_identity, PrimeTable};
use crate::scanner::{check_thm2_chain, check_thm4_chain, inequality_sweep, theorem_bounds, ChainOptions, SweepSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

/// Acceptance character: the first primitive character mod 5.
pub const ACCEPT_Q: u64 = 5;
pub const ACCEPT_LABEL: u64 = 1;
pub const SIEVE: u64 = 10_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {} ({:.1}s / {:.0}s): {}",
            self.index,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.budget_seconds,
            self.detail
        )
    }
}

pub struct Context {
    pub tbl: PrimeTable,
    pub config: Config,
}

impl Context {
    pub fn new(config: Config) -> Self {
        let tbl = PrimeTable::new(SIEVE.max(config.sieve_limit)).expect("sieve");
        Self { tbl, config }
    }

    fn cfg(&self) -> EvalConfig {
        self.config.eval()
    }

    fn chr(&self) -> DirichletCharacter {
        character(ACCEPT_Q, ACCEPT_LABEL).expect("q = 5 character")
    }
}

type Outcome = Result<(bool, String), String>;

fn run(index: usize, name: &'static str, budget: f64, f: impl FnOnce() -> Outcome) -> CriterionResult {
    let t0 = Instant::now();
    let out = f();
    let seconds = t0.elapsed().as_secs_f64();
    let (ok, detail) = match out {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = seconds <= budget;
    CriterionResult {
        index,
        name,
        passed: ok && in_time,
        detail: if in_time { detail } else { format!("{detail}; over time budget") },
        seconds,
        budget_seconds: budget,
    }
}

fn band(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(",")
}

pub fn criterion_1(_ctx: &Context) -> CriterionResult {
    run(1, "constant reproduction", 1.0, || {
        let mut ok = true;
        let mut agree = 0.0;
        for q in 3..=100 {
            let b = theorem_bounds(q).map_err(|e| e.to_string())?;
            ok &= b.thm1 == 2.0 * b.thm2 && b.thm4 == 2.0 * b.thm3;
            agree = b.c0_agreement;
        }
        ok &= agree <= 1e-20;
        Ok((ok, format!("doubling identities exact for q in [3,100]; |C0 routes| = {agree:.1e}")))
    })
}

/// Σ_{n<=N} χ(n) n^{−s} with the tail bound N^{1−σ}/(σ−1).
fn direct_series(pows: &[Complex64], table: &[Complex64], q: usize, sigma: f64) -> (Complex64, f64) {
    let mut acc = crate::numeric::ComplexSum::new();
    for (i, p) in pows.iter().enumerate() {
        let c = table[(i + 1) % q];
        if c.re != 0.0 || c.im != 0.0 {
            acc.add(c * p);
        }
    }
    let n = pows.len() as f64;
    (acc.value(), n.powf(1.0 - sigma) / (sigma - 1.0) + 1e-15 * n.sqrt())
}

pub fn criterion_2(ctx: &Context) -> CriterionResult {
    run(2, "evaluator oracle suite", 120.0, || {
        let cfg = ctx.cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed ^ 0x5eed);
        let chars: Vec<DirichletCharacter> = (3..=20)
            .flat_map(|q| primitive_characters(q).unwrap_or_default())
            .collect();
        let tables: Vec<Vec<Complex64>> = chars
            .iter()
            .map(|c| (0..c.modulus()).map(|n| c.eval(n)).collect())
            .collect();
        let n_terms = 1_000_000usize;
        let logs: Vec<f64> = (1..=n_terms).map(|n| (n as f64).ln()).collect();
        let mut worst: f64 = 0.0;
        let mut fails = 0usize;
        for _ in 0..100 {
            let s = Complex64::new(rng.gen_range(2.5..4.0), rng.gen_range(-50.0..50.0));
            let pows: Vec<Complex64> = logs.iter().map(|&l| (-s * l).exp()).collect();
            for (c, t) in chars.iter().zip(&tables) {
                let ev = dirichlet_l(s, c, &cfg).map_err(|e| e.to_string())?;
                let (o, tail) = direct_series(&pows, t, c.modulus() as usize, s.re);
                let d = (ev.value - o).norm();
                let r = ev.error_radius + tail;
                worst = worst.max(d / r);
                fails += (d > r) as usize;
            }
        }
        let z2 = zeta(Complex64::new(2.0, 0.0), &cfg).map_err(|e| e.to_string())?.value;
        let zd = (z2 - std::f64::consts::PI.powi(2) / 6.0).norm();
        Ok((
            fails == 0 && zd <= 1e-12,
            format!(
                "{} characters x 100 points, {fails} outside radius (max |diff|/radius {worst:.2}); |zeta(2) - pi^2/6| = {zd:.1e}",
                chars.len()
            ),
        ))
    })
}

pub fn criterion_3(ctx: &Context) -> CriterionResult {
    run(3, "Euler-product identity decay", 120.0, || {
        let chr = ctx.chr();
        let xs = [10_000u64, 100_000, 1_000_000];
        let mut detail = Vec::new();
        let mut ok = true;
        for (name, s, unit) in [
            ("a=1,s=1", Complex64::new(1.0, 0.0), true),
            ("a=chi,s=1+i", Complex64::new(1.0, 1.0), false),
        ] {
            let mut v = Vec::new();
            for &x in &xs {
                let d = if unit {
                    log_euler_identity(&ctx.tbl, s, x, |_| Complex64::new(1.0, 0.0))
                } else {
                    log_euler_identity(&ctx.tbl, s, x, |p| chr.eval(p))
                }
                .map_err(|e| e.to_string())?;
                let xf = x as f64;
                v.push(d.defect * xf.sqrt() * xf.ln());
            }
            let b = band(&v);
            ok &= b <= 3.0;
            detail.push(format!("{name}: defect*sqrt(x)log(x) = [{}] band {b:.2}", fmt_list(&v)));
        }
        Ok((ok, detail.join("; ")))
    })
}

pub fn criterion_4(ctx: &Context) -> CriterionResult {
    run(4, "truncated log L decay", 300.0, || {
        let chr = ctx.chr();
        let cfg = ctx.cfg();
        let heights = [1e3, 1e4, 1e5, 1e6];
        let n = 16;
        let mut rms = Vec::new();
        let mut scaled = Vec::new();
        for &tt in &heights {
            let mut sq = 0.0;
            let mut mx: f64 = 0.0;
            for k in 0..n {
                let t = tt * (1.0 + k as f64 / n as f64);
                let d = log_l_truncated_defect(&ctx.tbl, Complex64::new(1.0, t), &chr, tt, &cfg)
                    .map_err(|e| e.to_string())?;
                sq += d * d;
                mx = mx.max(d);
            }
            rms.push((sq / n as f64).sqrt());
            scaled.push(mx * tt.ln().ln());
        }
        // Envelope constant fitted on the two lowest heights, then frozen.
        let k_fit = scaled[0].max(scaled[1]);
        let decreasing = rms.windows(2).all(|w| w[1] < w[0]);
        let below = scaled.iter().all(|&v| v <= 5.0);
        Ok((
            decreasing && below && k_fit <= 5.0,
            format!(
                "rms per decade [{}] decreasing={decreasing}; max*loglogT [{}] (fitted K {k_fit:.3}, limit 5)",
                rms.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(","),
                fmt_list(&scaled)
            ),
        ))
    })
}

const ROOT_GRID: [f64; 4] = [1e4, 1e5, 1e6, 1e7];

fn scheme_and_circles(ctx: &Context, th: Theorem, x: f64) -> Result<(WeightScheme, crate::auxseries::RoucheCircles), String> {
    let cfg = ctx.cfg();
    let chr = ctx.chr();
    let p = SchemeParams::derived(x, ctx.config.delta, chr.clone(), th, &cfg).map_err(|e| e.to_string())?;
    let s1 = s1_constant(&chr, &cfg).map_err(|e| e.to_string())?.value;
    let s2 = s2_constant(&chr, &cfg).map_err(|e| e.to_string())?.value;
    let circles = rouche_circles(circle_constant(th, ctx.config.circle_source(), s1, s2), &p);
    Ok((WeightScheme::new(th.rouche_kind(), p), circles))
}

pub fn criterion_5(ctx: &Context) -> CriterionResult {
    run(5, "linearization and root tracking", 300.0, || {
        let mut ok = true;
        let mut detail = Vec::new();
        for th in [Theorem::Thm2, Theorem::Thm4] {
            let mut res = Vec::new();
            let mut dist = Vec::new();
            let mut re_ok = true;
            for &x in &ROOT_GRID {
                let (w, c) = scheme_and_circles(ctx, th, x)?;
                let l = w.params.log_x();
                res.push(linearization_residual(&w, &c, &ctx.tbl, BOUNDARY_SAMPLES).map_err(|e| e.to_string())? * l);
                let cf = closed_form_root(&w).map_err(|e| e.to_string())?;
                let nr = newton_root(&w, &ctx.tbl).map_err(|e| e.to_string())?;
                dist.push((nr - cf).norm() * l.powi(3));
                re_ok &= nr.re > 1.0 && cf.re > 1.0;
            }
            let (b1, b2) = (band(&res), band(&dist));
            ok &= b1 <= 2.0 && b2 <= 2.0 && re_ok;
            detail.push(format!(
                "{th:?}: residual*L [{}] band {b1:.2}; |newton-closed|*L^3 [{}] band {b2:.2}; Re root > 1: {re_ok}",
                fmt_list(&res),
                fmt_list(&dist)
            ));
        }
        Ok((ok, detail.join("; ")))
    })
}

pub fn criterion_6(ctx: &Context) -> CriterionResult {
    run(6, "Rouche geometry", 60.0, || {
        let mut ok = true;
        let mut worst_ratio: f64 = 0.0;
        let mut worst_min = f64::INFINITY;
        for th in [Theorem::Thm2, Theorem::Thm4] {
            for &x in &ROOT_GRID {
                let (w, c) = scheme_and_circles(ctx, th, x)?;
                let g = circle_geometry(&w, &c, BOUNDARY_SAMPLES).map_err(|e| e.to_string())?;
                ok &= g.root_distance < g.inner_radius && g.boundary_min >= 0.1;
                worst_ratio = worst_ratio.max(g.root_distance / g.inner_radius);
                worst_min = worst_min.min(g.boundary_min);
            }
        }
        Ok((
            ok,
            format!("max root distance / inner radius {worst_ratio:.3}; min |linear model| on C1 {worst_min:.4}"),
        ))
    })
}

pub fn criterion_7(ctx: &Context) -> CriterionResult {
    run(7, "tau construction", 600.0, || {
        let chr = ctx.chr();
        let cfg = ctx.cfg();
        let x = 200.0;
        let p = SchemeParams::derived(x, ctx.config.delta, chr.clone(), Theorem::Thm2, &cfg).map_err(|e| e.to_string())?;
        let w = WeightScheme::new(Theorem::Thm2.rouche_kind(), p.clone());
        let tg = targets_from_scheme(&w, &ctx.tbl).with_tolerance(0.02).map_err(|e| e.to_string())?;
        let opts = SearchOptions {
            seed: ctx.config.seed,
            max_height_bits: ctx.config.tau_max_height_bits,
            ..Default::default()
        };
        let cert = find_tau(&tg, 0.0, f64::INFINITY, &opts).map_err(|e| e.to_string())?;
        let reval = cert.revalidate(&tg);
        let ph = PhaseTable::new(&cert.tau, &ctx.tbl, p.x_int());
        let s1 = s1_constant(&chr, &cfg).map_err(|e| e.to_string())?.value;
        let s2 = s2_constant(&chr, &cfg).map_err(|e| e.to_string())?.value;
        let c = rouche_circles(circle_constant(Theorem::Thm2, ctx.config.circle_source(), s1, s2), &p);
        let mut dev: f64 = 0.0;
        for s in c.inner_boundary(BOUNDARY_SAMPLES) {
            let v = v_series_twisted(s, x, &ctx.tbl, |q| ph.get(q)).map_err(|e| e.to_string())?;
            let a = aux_series(&w, s, &ctx.tbl).map_err(|e| e.to_string())?;
            dev = dev.max((v - a).norm());
        }
        Ok((
            cert.success && cert.max_defect <= 0.02 && reval && dev <= 0.5,
            format!(
                "{} primes, max defect {:.4}, log10 tau {:.2}, revalidated {reval}; max |V(s+i tau) - W(s)| on C1 = {dev:.4}",
                tg.len(),
                cert.max_defect,
                cert.log10_tau
            ),
        ))
    })
}

pub fn criterion_8(ctx: &Context) -> CriterionResult {
    run(8, "toy pipelines for large and small |L|", 900.0, || {
        let chr = ctx.chr();
        let opts = ChainOptions::default();
        let a = check_thm2_chain(&chr, 200.0, ctx.config.delta, &ctx.tbl, &ctx.config, &opts).map_err(|e| e.to_string())?;
        let b = check_thm4_chain(&chr, 200.0, ctx.config.delta, &ctx.tbl, &ctx.config, &opts).map_err(|e| e.to_string())?;
        let dual = a.abs_l / b.abs_l;
        Ok((
            a.passes && b.passes && dual >= 4.0,
            format!(
                "large: |L| = {:.4} vs floor {:.4}; small: |L| = {:.4} vs ceiling {:.4}; ratio {dual:.2} (need >= 4)",
                a.abs_l,
                a.acceptance_factor * a.target,
                b.abs_l,
                b.acceptance_factor * b.target
            ),
        ))
    })
}

pub fn criterion_9(ctx: &Context) -> CriterionResult {
    run(9, "inequality sweeps", 600.0, || {
        let r = inequality_sweep(&SweepSpec::default(), &ctx.tbl, &ctx.config).map_err(|e| e.to_string())?;
        Ok((
            r.total_violations == 0 && r.sub_identities_hold,
            format!(
                "{} characters, {} checks, {} violations; sub-identities hold: {}",
                r.characters.len(),
                r.total_checks,
                r.total_violations,
                r.sub_identities_hold
            ),
        ))
    })
}

pub fn criterion_10(ctx: &Context) -> CriterionResult {
    run(10, "zeta' zero finder", 300.0, || {
        let cfg = ctx.cfg();
        let rect = SearchRect::new(0.0, 3.0, 0.0, 60.0, 0.1).map_err(|e| e.to_string())?;
        let c1 = count_zeros(&rect, &cfg).map_err(|e| e.to_string())?;
        let c2 = count_zeros(&rect.with_resolution(0.05), &cfg).map_err(|e| e.to_string())?;
        let pts = find_critical_points(&rect.with_resolution(0.05), &cfg).map_err(|e| e.to_string())?;
        let good = pts.points.iter().all(|p| p.residual <= 1e-8 && p.beta_prime > 0.5);
        let lo = count_zeros(&SearchRect::new(0.0, 3.0, 0.0, 30.0, 0.05).unwrap(), &cfg).map_err(|e| e.to_string())?;
        let hi = count_zeros(&SearchRect::new(0.0, 3.0, 30.0, 60.0, 0.05).unwrap(), &cfg).map_err(|e| e.to_string())?;
        let max_res = pts.points.iter().map(|p| p.residual).fold(0.0, f64::max);
        Ok((
            c1 == c2 && good && !pts.incomplete && pts.points.len() as i64 == c2 && lo + hi == c2,
            format!(
                "count {c1} (res 0.1) / {c2} (res 0.05); {} refined, max residual {max_res:.1e}, all beta' > 1/2: {good}; split {lo} + {hi}",
                pts.points.len()
            ),
        ))
    })
}

pub fn run_all(ctx: &Context) -> Vec<CriterionResult> {
    vec![
        criterion_1(ctx),
        criterion_2(ctx),
        criterion_3(ctx),
        criterion_4(ctx),
        criterion_5(ctx),
        criterion_6(ctx),
        criterion_7(ctx),
        criterion_8(ctx),
        criterion_9(ctx),
        criterion_10(ctx),
    ]
}
