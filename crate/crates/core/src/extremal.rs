//! The near-extremal family `f(x) = (sin(2πx)/x)^m`, `m = ⌊b/4π⌋`, paired with
//! a 1-periodic set of density `γ` sitting on the zeros of `f`.
//!
//! Everything is computed with the normalised profile
//! `h(x) = sin(2πx)/(2πx)`, so `f = (2π)^m h^m` and ratios never overflow.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::bandlimited::Exponent;
use crate::bounds::{theorem1_bound, BoundConstants, PowerBound};
use crate::error::{Error, Result};
use crate::quadrature::{grid_sup, integrate};
use crate::sets::{two_sliver_set, IntervalSet};
use crate::stats::{fit_line, LineFit};

/// Relative target for the truncated tail `∫_{|x|>X} |f|^p`.
pub const TAIL_TARGET: f64 = 1e-10;
const MIN_HALF_WIDTH: f64 = 4.0;
/// Largest truncation half-width, in periods.
pub const MAX_HALF_WIDTH: f64 = 4096.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalInstance {
    pub b: f64,
    pub m: u32,
    pub gamma: f64,
    /// `⋃_k [k + 1/2 - γ/2, k + 1/2 + γ/2]`.
    pub set: IntervalSet,
}

/// Builds the instance for bandwidth `b >= 4π` and density `γ ∈ (0, 1]`.
pub fn extremal_pair(b: f64, gamma: f64) -> Result<ExtremalInstance> {
    if !(b.is_finite() && b >= 4.0 * PI * (1.0 - 1e-12)) {
        return Err(Error::BandTooSmall(b));
    }
    let m = (b / (4.0 * PI) + 1e-9).floor() as u32;
    let set = two_sliver_set(gamma)?.translate(-0.5)?;
    Ok(ExtremalInstance { b, m, gamma, set })
}

/// `sin(2πx)/(2πx)`, with a series near the removable singularity.
fn profile(x: f64) -> f64 {
    let u = 2.0 * PI * x;
    if x.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 + u2 * u2 / 120.0
    } else {
        u.sin() / u
    }
}

impl ExtremalInstance {
    /// `f(x)`; `f(0) = (2π)^m`.
    pub fn eval(&self, x: f64) -> f64 {
        (2.0 * PI * profile(x)).powi(self.m as i32)
    }

    fn normalized(&self, x: f64) -> f64 {
        profile(x).abs().powi(self.m as i32)
    }

    /// Bound on `∫_{|x|>X} |f/(2π)^m|^p`: `2 X^{1-mp} / ((mp - 1)(2π)^{mp})`.
    fn tail_bound(&self, half_width: f64, p: f64) -> f64 {
        let mp = self.m as f64 * p;
        2.0 * half_width.powf(1.0 - mp) / ((mp - 1.0) * (2.0 * PI).powf(mp))
    }

    fn panel_width(&self) -> f64 {
        1.0 / (8.0 * self.m as f64)
    }

    /// `(∫_{E∩[-X,X]} |h|^{mp}, ∫_{[-X,X]} |h|^{mp})`, summed period by period.
    fn integrals(&self, half_width: usize, p: f64) -> (f64, f64) {
        let width = self.panel_width();
        let g = |x: f64| self.normalized(x).powf(p);
        let (lo_e, hi_e) = (0.5 - 0.5 * self.gamma, 0.5 + 0.5 * self.gamma);
        let mut on_set = 0.0;
        let mut total = 0.0;
        // |f| is even and E is symmetric, so integrate over [0, X] and double
        for k in 0..half_width {
            let k = k as f64;
            total += integrate(k, k + 1.0, width, g);
            on_set += integrate(k + lo_e, k + hi_e.min(1.0), width, g);
            if self.gamma > 0.0 && lo_e < 0.0 {
                on_set += integrate(k + 1.0 + lo_e, k + 1.0, width, g);
            }
        }
        (2.0 * on_set, 2.0 * total)
    }

    /// Smallest whole half-width `X >= 4` with tail bound `<= TAIL_TARGET * mass`,
    /// capped at [`MAX_HALF_WIDTH`].
    fn truncation_for(&self, mass: f64, p: f64) -> f64 {
        let mp = self.m as f64 * p;
        // 2 X^{1-mp} / ((mp-1)(2π)^{mp}) = target
        let ln_target = (TAIL_TARGET * mass).ln() + (mp - 1.0).ln() + mp * (2.0 * PI).ln() - 2f64.ln();
        let mut x = (ln_target / (1.0 - mp)).exp().ceil().clamp(MIN_HALF_WIDTH, MAX_HALF_WIDTH);
        while x < MAX_HALF_WIDTH && self.tail_bound(x, p) > TAIL_TARGET * mass {
            x += 1.0;
        }
        x
    }

    /// Half-width `X` with `∫_{|x|>X}|f|^p <= 1e-10 ∫|f|^p` by the closed-form
    /// tail bound.
    pub fn required_truncation(&self, p: Exponent) -> Result<f64> {
        let Exponent::Finite(pv) = p else {
            return Ok(MIN_HALF_WIDTH);
        };
        if self.m as f64 * pv <= 1.0 {
            return Err(Error::NonIntegrable(self.m as f64 * pv));
        }
        let (_, core) = self.integrals(1, pv);
        Ok(self.truncation_for(core, pv))
    }
}

/// `‖f‖_{L^p(E∩[-X,X])} / ‖f‖_{L^p([-X,X])}`.
///
/// `truncation = None` picks `X` from the tail bound, then widens it once so
/// the tail is also negligible against the mass on `E` (up to
/// [`MAX_HALF_WIDTH`] periods).
pub fn extremal_ratio(inst: &ExtremalInstance, p: Exponent, truncation: Option<f64>) -> Result<f64> {
    let pv = match p {
        Exponent::Infinity => return Ok(sup_ratio(inst)),
        Exponent::Finite(pv) => pv,
    };
    if inst.m as f64 * pv <= 1.0 {
        return Err(Error::NonIntegrable(inst.m as f64 * pv));
    }
    let half = match truncation {
        Some(x) if x > 0.0 => x.ceil(),
        Some(x) => return Err(Error::InvalidArgument(format!("truncation {x} must be positive"))),
        None => inst.required_truncation(p)?,
    };
    let (mut on_set, mut total) = inst.integrals(half as usize, pv);
    if truncation.is_none() {
        let wider = inst.truncation_for(on_set, pv);
        if wider > half {
            (on_set, total) = inst.integrals(wider as usize, pv);
        }
    }
    Ok((on_set / total).powf(1.0 / pv).min(1.0))
}

fn sup_ratio(inst: &ExtremalInstance) -> f64 {
    let pieces = inst.set.restrict(0.0, 1.0);
    let (_, on_set) = grid_sup(&pieces, inst.panel_width(), |x| inst.normalized(x));
    on_set.min(1.0)
}

/// Relative spectral energy of `f` outside `[-b/2, b/2]`, from an FFT of
/// `2^log2_samples` samples on `[-X, X]`.
pub fn spectral_leakage(inst: &ExtremalInstance, half_width: f64, log2_samples: u32) -> f64 {
    let n = 1usize << log2_samples;
    let dx = 2.0 * half_width / n as f64;
    let mut buf: Vec<Complex64> =
        (0..n).map(|j| Complex64::new(inst.normalized_signed(-half_width + j as f64 * dx), 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let cutoff = inst.b / 2.0;
    let bin = 2.0 * PI / (n as f64 * dx);
    let (mut inside, mut outside) = (0.0, 0.0);
    for (k, z) in buf.iter().enumerate() {
        let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        let nu = (signed * bin).abs();
        if nu <= cutoff + bin {
            inside += z.norm_sqr();
        } else {
            outside += z.norm_sqr();
        }
    }
    outside / (inside + outside)
}

impl ExtremalInstance {
    fn normalized_signed(&self, x: f64) -> f64 {
        profile(x).powi(self.m as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalRow {
    pub b: f64,
    pub gamma: f64,
    pub m: u32,
    pub ratio: f64,
    pub theorem_bound: PowerBound,
}

impl ExtremalRow {
    /// `log10(ratio / theorem bound)`; nonnegative when the bound holds.
    pub fn log10_margin(&self) -> f64 {
        self.ratio.log10() - self.theorem_bound.log10()
    }

    /// Exponent `b/(4π) - 1` of the example's upper estimate.
    pub fn example_exponent(&self) -> f64 {
        self.b / (4.0 * PI) - 1.0
    }

    /// Largest `c` with `ratio <= (γ/c)^{b/4π - 1}`.
    pub fn max_constant(&self) -> f64 {
        let e = self.example_exponent();
        if e <= 0.0 {
            return f64::INFINITY;
        }
        self.gamma * (-self.ratio.ln() / e).exp()
    }
}

pub fn extremal_row(b: f64, gamma: f64, p: Exponent, k: &BoundConstants) -> Result<ExtremalRow> {
    let inst = extremal_pair(b, gamma)?;
    let ratio = extremal_ratio(&inst, p, None)?;
    let theorem_bound = theorem1_bound(gamma, b, p, k)?;
    Ok(ExtremalRow { b, gamma, m: inst.m, ratio, theorem_bound })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    /// Slope of `log ratio` against `log γ`, per `b`, sorted by `b`.
    pub per_b: Vec<(f64, LineFit)>,
    /// Fit of those slopes against `b`.
    pub trend: LineFit,
}

/// Regresses `log ratio` on `log γ` for each `b`, then the slopes on `b`.
/// Needs at least three `b` values with three `γ` values each.
pub fn exponent_fit(rows: &[ExtremalRow]) -> Result<ExponentFit> {
    let mut bs: Vec<f64> = rows.iter().map(|r| r.b).collect();
    bs.sort_by(f64::total_cmp);
    bs.dedup();
    if bs.len() < 3 {
        return Err(Error::InsufficientData(format!("{} distinct b values, need 3", bs.len())));
    }
    let mut per_b = Vec::with_capacity(bs.len());
    for &b in &bs {
        let cell: Vec<&ExtremalRow> = rows.iter().filter(|r| r.b == b).collect();
        let mut gammas: Vec<f64> = cell.iter().map(|r| r.gamma).collect();
        gammas.sort_by(f64::total_cmp);
        gammas.dedup();
        if gammas.len() < 3 {
            return Err(Error::InsufficientData(format!("b = {b}: {} gamma values, need 3", gammas.len())));
        }
        let xs: Vec<f64> = cell.iter().map(|r| r.gamma.ln()).collect();
        let ys: Vec<f64> = cell.iter().map(|r| r.ratio.ln()).collect();
        per_b.push((b, fit_line(&xs, &ys)?));
    }
    let xs: Vec<f64> = per_b.iter().map(|(b, _)| *b).collect();
    let ys: Vec<f64> = per_b.iter().map(|(_, f)| f.slope).collect();
    let trend = fit_line(&xs, &ys)?;
    Ok(ExponentFit { per_b, trend })
}

/// Per-`b` constant for the upper estimate: the smallest `max_constant`
/// over the `γ` values at that `b`.
pub fn fitted_constant(rows: &[ExtremalRow], b: f64) -> Option<f64> {
    rows.iter().filter(|r| r.b == b).map(ExtremalRow::max_constant).min_by(f64::total_cmp)
}
