//! Zeros of ζ′ in rectangles: winding counts along the boundary, recursive
//! isolation, Newton refinement with ζ″.

use crate::lfengine::{zeta_jet, EvalConfig, LfError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Disk around s = 1 kept away from every contour.
pub const POLE_EXCLUSION: f64 = 1e-3;
pub const RESIDUAL_BOUND: f64 = 1e-8;
const PERTURB_TRIES: usize = 3;
const NEWTON_STEPS: usize = 60;
/// |ζ′| below this on a contour sample counts as a zero on the boundary.
const BOUNDARY_MARGIN: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum ZeroError {
    #[error("invalid rectangle: {0}")]
    Rect(String),
    #[error("zero of zeta' suspected on the boundary after {0} perturbations")]
    BoundaryZero(usize),
    #[error("winding sum {0} not close to an integer")]
    NonInteger(f64),
    #[error(transparent)]
    Lf(#[from] LfError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRect {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub grid_resolution: f64,
}

impl SearchRect {
    pub fn new(sigma_min: f64, sigma_max: f64, t_min: f64, t_max: f64, grid_resolution: f64) -> Result<Self, ZeroError> {
        let r = Self {
            sigma_min,
            sigma_max,
            t_min,
            t_max,
            grid_resolution,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), ZeroError> {
        let ok = self.sigma_min < self.sigma_max
            && self.t_min < self.t_max
            && self.grid_resolution > 0.0
            && [self.sigma_min, self.sigma_max, self.t_min, self.t_max]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(ZeroError::Rect(format!("{self:?}")))
        }
    }

    pub fn with_resolution(self, r: f64) -> Self {
        Self {
            grid_resolution: r,
            ..self
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            t_min: -self.t_max,
            t_max: -self.t_min,
            ..*self
        }
    }

    pub fn expanded(&self, d: f64) -> Self {
        Self {
            sigma_min: self.sigma_min - d,
            sigma_max: self.sigma_max + d,
            t_min: self.t_min - d,
            t_max: self.t_max + d,
            ..*self
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.sigma_min && z.re <= self.sigma_max && z.im >= self.t_min && z.im <= self.t_max
    }

    fn strictly_contains(&self, z: Complex64, pad: f64) -> bool {
        z.re > self.sigma_min + pad && z.re < self.sigma_max - pad && z.im > self.t_min + pad && z.im < self.t_max - pad
    }

    fn boundary_distance(&self, z: Complex64) -> f64 {
        let dx = if z.re < self.sigma_min {
            self.sigma_min - z.re
        } else if z.re > self.sigma_max {
            z.re - self.sigma_max
        } else {
            0.0
        };
        let dy = if z.im < self.t_min {
            self.t_min - z.im
        } else if z.im > self.t_max {
            z.im - self.t_max
        } else {
            0.0
        };
        if dx > 0.0 || dy > 0.0 {
            return dx.hypot(dy);
        }
        (z.re - self.sigma_min)
            .min(self.sigma_max - z.re)
            .min(z.im - self.t_min)
            .min(self.t_max - z.im)
    }

    fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.sigma_min + self.sigma_max),
            0.5 * (self.t_min + self.t_max),
        )
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.sigma_min, self.t_min),
            Complex64::new(self.sigma_max, self.t_min),
            Complex64::new(self.sigma_max, self.t_max),
            Complex64::new(self.sigma_min, self.t_max),
        ]
    }

    /// Splits at fraction `f` across the longer side.
    fn split(&self, f: f64) -> (Self, Self) {
        if self.sigma_max - self.sigma_min >= self.t_max - self.t_min {
            let m = self.sigma_min + f * (self.sigma_max - self.sigma_min);
            (Self { sigma_max: m, ..*self }, Self { sigma_min: m, ..*self })
        } else {
            let m = self.t_min + f * (self.t_max - self.t_min);
            (Self { t_max: m, ..*self }, Self { t_min: m, ..*self })
        }
    }

    fn diameter(&self) -> f64 {
        (self.sigma_max - self.sigma_min).hypot(self.t_max - self.t_min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub beta_prime: f64,
    pub gamma_prime: f64,
    pub residual: f64,
    pub isolating_box: SearchRect,
}

impl CriticalPoint {
    pub fn point(&self) -> Complex64 {
        Complex64::new(self.beta_prime, self.gamma_prime)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalPoints {
    pub points: Vec<CriticalPoint>,
    pub count: i64,
    /// The rectangle actually counted (after any boundary perturbation).
    pub rect: SearchRect,
    /// Fewer refined points than the winding count.
    pub incomplete: bool,
}

fn zeta_d1(s: Complex64, cfg: &EvalConfig) -> Result<Complex64, ZeroError> {
    Ok(zeta_jet(s, cfg)?.jet.d1)
}

/// Total change of arg ζ′ from a to b, with steps shrunk until each phase
/// increment is below π/2.
fn track_segment(a: Complex64, b: Complex64, res: f64, cfg: &EvalConfig) -> Result<Option<f64>, ZeroError> {
    let len = (b - a).norm();
    let h_max = res.min(len).max(len * 1e-6);
    let h_min = res * 1e-7;
    let dir = (b - a) / len;
    let mut pos = 0.0;
    let mut fz = zeta_d1(a, cfg)?;
    if fz.norm() < BOUNDARY_MARGIN {
        return Ok(None);
    }
    let mut total = 0.0;
    let mut h = h_max;
    while pos < len {
        let step = h.min(len - pos);
        let z1 = if pos + step >= len { b } else { a + dir * (pos + step) };
        let f1 = zeta_d1(z1, cfg)?;
        if f1.norm() < BOUNDARY_MARGIN {
            return Ok(None);
        }
        let d = (f1 / fz).arg();
        if d.abs() >= PI / 2.0 {
            h = step / 2.0;
            if h < h_min {
                return Ok(None);
            }
            continue;
        }
        total += d;
        pos += step;
        fz = f1;
        h = (step * 1.5).min(h_max);
    }
    Ok(Some(total))
}

fn winding_of_polygon(pts: &[Complex64], res: f64, cfg: &EvalConfig) -> Result<Option<f64>, ZeroError> {
    let mut total = 0.0;
    for i in 0..pts.len() {
        match track_segment(pts[i], pts[(i + 1) % pts.len()], res, cfg)? {
            Some(d) => total += d,
            None => return Ok(None),
        }
    }
    Ok(Some(total / (2.0 * PI)))
}

fn round_winding(w: f64) -> Result<i64, ZeroError> {
    let r = w.round();
    if (w - r).abs() > 0.1 {
        return Err(ZeroError::NonInteger(w));
    }
    Ok(r as i64)
}

/// Winding number of ζ′ around the small circle about the pole (expected −2).
pub fn pole_winding(cfg: &EvalConfig) -> Result<i64, ZeroError> {
    let n = 64;
    let pts: Vec<Complex64> = (0..n)
        .map(|k| 1.0 + Complex64::from_polar(POLE_EXCLUSION, 2.0 * PI * k as f64 / n as f64))
        .collect();
    let w = winding_of_polygon(&pts, POLE_EXCLUSION, cfg)?.ok_or(ZeroError::BoundaryZero(0))?;
    round_winding(w)
}

/// Zeros of ζ′ inside exactly this rectangle, or None if the boundary comes
/// too close to a zero or to the pole.
fn count_exact(rect: &SearchRect, cfg: &EvalConfig) -> Result<Option<i64>, ZeroError> {
    let one = Complex64::new(1.0, 0.0);
    let pd = rect.boundary_distance(one);
    let pole_inside = rect.strictly_contains(one, 0.0);
    if pd <= POLE_EXCLUSION {
        return Ok(None);
    }
    let w = match winding_of_polygon(&rect.corners(), rect.grid_resolution, cfg)? {
        Some(w) => w,
        None => return Ok(None),
    };
    let mut n = round_winding(w)?;
    if pole_inside {
        // Remove the excluded disk: the rectangle minus the disk winds Z times.
        n -= pole_winding(cfg)?;
    }
    Ok(Some(n))
}

/// Counts zeros of ζ′ in `rect`, perturbing a bad boundary outward by
/// resolution/10 up to three times. Returns the count and the rectangle used.
pub fn count_zeros_in(rect: &SearchRect, cfg: &EvalConfig) -> Result<(i64, SearchRect), ZeroError> {
    rect.validate()?;
    for k in 0..=PERTURB_TRIES {
        let r = rect.expanded(k as f64 * rect.grid_resolution / 10.0);
        if let Some(n) = count_exact(&r, cfg)? {
            return Ok((n, r));
        }
    }
    Err(ZeroError::BoundaryZero(PERTURB_TRIES))
}

pub fn count_zeros(rect: &SearchRect, cfg: &EvalConfig) -> Result<i64, ZeroError> {
    Ok(count_zeros_in(rect, cfg)?.0)
}

/// Newton iteration z ← z − ζ′/ζ″.
pub fn newton_refine(z0: Complex64, cfg: &EvalConfig) -> Result<Option<Complex64>, ZeroError> {
    let mut z = z0;
    for _ in 0..NEWTON_STEPS {
        let j = zeta_jet(z, cfg)?.jet;
        if j.d2.norm() == 0.0 {
            return Ok(None);
        }
        let dz = j.d1 / j.d2;
        let dz = if dz.norm() > 1.0 { dz / dz.norm() } else { dz };
        z -= dz;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Ok(None);
        }
        if dz.norm() < 1e-14 * (1.0 + z.norm()) {
            return Ok(Some(z));
        }
    }
    // Accept a stalled iterate if its residual is already tiny.
    let r = zeta_d1(z, cfg)?.norm();
    Ok(if r <= RESIDUAL_BOUND * 1e-2 { Some(z) } else { None })
}

/// |ζ′(z)| at the refined configuration.
pub fn certified_residual(z: Complex64, cfg: &EvalConfig) -> Result<f64, ZeroError> {
    Ok(zeta_d1(z, &cfg.refined())?.norm())
}

fn isolate(
    rect: SearchRect,
    count: i64,
    cfg: &EvalConfig,
    depth: usize,
    out: &mut Vec<CriticalPoint>,
    incomplete: &mut bool,
) -> Result<(), ZeroError> {
    if count <= 0 {
        if count < 0 {
            *incomplete = true;
        }
        return Ok(());
    }
    if count == 1 {
        if let Some(z) = newton_refine(rect.center(), cfg)? {
            if rect.contains(z) {
                let residual = certified_residual(z, cfg)?;
                if residual <= RESIDUAL_BOUND {
                    out.push(CriticalPoint {
                        beta_prime: z.re,
                        gamma_prime: z.im,
                        residual,
                        isolating_box: rect,
                    });
                    return Ok(());
                }
            }
        }
    }
    if depth == 0 || rect.diameter() < rect.grid_resolution * 1e-4 {
        *incomplete = true;
        return Ok(());
    }
    // Subdivide; move the cut if it passes through a zero or the pole.
    for f in [0.5, 0.45, 0.55, 0.4, 0.6, 0.37, 0.63] {
        let (a, b) = rect.split(f);
        let (Some(ca), Some(cb)) = (count_exact(&a, cfg)?, count_exact(&b, cfg)?) else {
            continue;
        };
        if ca + cb != count {
            continue;
        }
        isolate(a, ca, cfg, depth - 1, out, incomplete)?;
        isolate(b, cb, cfg, depth - 1, out, incomplete)?;
        return Ok(());
    }
    *incomplete = true;
    Ok(())
}

/// All zeros of ζ′ in `rect`, each isolated by a box of winding number one.
pub fn find_critical_points(rect: &SearchRect, cfg: &EvalConfig) -> Result<CriticalPoints, ZeroError> {
    let (count, used) = count_zeros_in(rect, cfg)?;
    let mut pts = Vec::new();
    let mut incomplete = false;
    isolate(used, count, cfg, 40, &mut pts, &mut incomplete)?;
    let pts = dedup(pts, 10.0 * rect.grid_resolution);
    if pts.len() as i64 != count {
        incomplete = true;
        log::warn!("found {} critical points, winding count {}", pts.len(), count);
    }
    Ok(CriticalPoints {
        points: pts,
        count,
        rect: used,
        incomplete,
    })
}

fn dedup(mut pts: Vec<CriticalPoint>, radius: f64) -> Vec<CriticalPoint> {
    pts.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let mut kept: Vec<CriticalPoint> = Vec::new();
    for p in pts {
        if kept.iter().all(|k| (k.point() - p.point()).norm() > radius) {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| {
        a.gamma_prime
            .total_cmp(&b.gamma_prime)
            .then(a.beta_prime.total_cmp(&b.beta_prime))
    });
    kept
}

/// CSV with 17 significant digits.
pub fn write_csv<W: Write>(pts: &[CriticalPoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "beta_prime,gamma_prime,residual,sigma_min,sigma_max,t_min,t_max")?;
    for p in pts {
        let b = &p.isolating_box;
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.beta_prime, p.gamma_prime, p.residual, b.sigma_min, b.sigma_max, b.t_min, b.t_max
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pole_winds_minus_two() {
        assert_eq!(pole_winding(&EvalConfig::default()).unwrap(), -2);
    }

    #[test]
    fn first_critical_point() {
        let cfg = EvalConfig::default();
        let r = SearchRect::new(2.0, 3.0, 22.0, 24.5, 0.05).unwrap();
        let cp = find_critical_points(&r, &cfg).unwrap();
        assert_eq!(cp.count, 1);
        let z = cp.points[0].point();
        // ρ′₁ ≈ 2.4631618 + 23.2983204i
        assert!((z - Complex64::new(2.463_161_8, 23.298_320_4)).norm() < 1e-6, "{z}");
    }

    #[test]
    fn right_half_zero_free() {
        let cfg = EvalConfig::default();
        let r = SearchRect::new(1.5, 3.0, 0.0, 10.0, 0.05).unwrap();
        assert_eq!(count_zeros(&r, &cfg).unwrap(), 0);
    }

    #[test]
    fn csv_digits() {
        let p = CriticalPoint {
            beta_prime: 1.0 / 3.0,
            gamma_prime: 2.0,
            residual: 0.0,
            isolating_box: SearchRect::new(0.0, 1.0, 0.0, 1.0, 0.1).unwrap(),
        };
        let mut buf = Vec::new();
        write_csv(&[p], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("3.3333333333333331e-1"));
    }
}
