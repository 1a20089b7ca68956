//! Closed-form lower and upper bounds for band-limited functions on thick sets.
//!
//! Every bound has the shape `base^exponent` with a tiny base and an exponent
//! that can reach the millions, so the value routinely underflows `f64`. Each
//! evaluator therefore returns a [`PowerBound`] carrying both factors; compare
//! through [`PowerBound::ln`] when the value itself is `0.0`.

use serde::{Deserialize, Serialize};

use crate::bandlimited::Exponent;
use crate::error::{Error, Result};

/// The constants `C` of the various inequalities.
///
/// Only the first-theorem constants are pinned by explicit values (`300`,
/// `33`, `100`); the rest default to `300`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundConstants {
    /// Base constant of the one-band bound for finite `p`.
    pub c_t1: f64,
    /// Base constant of the one-band bound for `p = ∞`.
    pub c_t1_inf: f64,
    /// Slope in front of `ab` in the one-band exponent.
    pub k_t1: f64,
    /// Constant of the `n`-band bounds.
    pub c_t2: f64,
    /// Constant of the local estimates (analytic-function lemma, exponential
    /// sums, Nazarov).
    pub c_aux: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self { c_t1: 300.0, c_t1_inf: 100.0, k_t1: 33.0, c_t2: 300.0, c_aux: 300.0 }
    }
}

impl BoundConstants {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("c_t1", self.c_t1),
            ("c_t1_inf", self.c_t1_inf),
            ("k_t1", self.k_t1),
            ("c_t2", self.c_t2),
            ("c_aux", self.c_aux),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 1.0) {
                return Err(Error::InvalidConstants(format!("{name} = {value} must exceed 1")));
            }
        }
        Ok(())
    }
}

/// `base^exponent`, kept factored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBound {
    pub base: f64,
    pub exponent: f64,
}

impl PowerBound {
    pub fn new(base: f64, exponent: f64) -> Self {
        Self { base, exponent }
    }

    pub fn value(&self) -> f64 {
        if self.exponent == 0.0 {
            1.0
        } else {
            self.base.powf(self.exponent)
        }
    }

    /// Natural logarithm of the value.
    pub fn ln(&self) -> f64 {
        if self.exponent == 0.0 {
            0.0
        } else {
            self.exponent * self.base.ln()
        }
    }

    pub fn log10(&self) -> f64 {
        self.ln() / std::f64::consts::LN_10
    }

    /// `measured >= bound`, decided in log space so that underflowed bounds
    /// still compare correctly.
    pub fn is_below(&self, measured: f64) -> bool {
        measured > 0.0 && measured.ln() >= self.ln() - 1e-12 * self.ln().abs().max(1.0)
    }

    /// `measured <= bound`, decided in log space.
    pub fn is_above(&self, measured: f64) -> bool {
        measured <= 0.0 || measured.ln() <= self.ln() + 1e-12 * self.ln().abs().max(1.0)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidGamma(gamma))
    }
}

fn check_nonnegative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {value} must be finite and nonnegative")))
    }
}

/// One band: `(γ/300)^{33ab + 2/p}` for finite `p`, `(γ/100)^{33ab + 1}` for
/// `p = ∞` (constants from `k`).
pub fn theorem1_bound(gamma: f64, ab: f64, p: Exponent, k: &BoundConstants) -> Result<PowerBound> {
    check_gamma(gamma)?;
    check_nonnegative("ab", ab)?;
    Ok(match p {
        Exponent::Finite(p) => PowerBound::new(gamma / k.c_t1, k.k_t1 * ab + 2.0 / p),
        Exponent::Infinity => PowerBound::new(gamma / k.c_t1_inf, k.k_t1 * ab + 1.0),
    })
}

/// The `n`-band exponent `ab (C/γ)^n + n - (p-1)/p`.
fn theorem2_exponent(gamma: f64, n: u32, ab: f64, p: Exponent, c: f64) -> f64 {
    ab * (c / gamma).powi(n as i32) + n as f64 - p.conjugate_fraction()
}

fn check_bands(n: u32) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidArgument("the number of bands n must be at least 1".into()))
    }
}

/// `n` bands in arbitrary position: `(C/γ)^{-ab (C/γ)^n - n + (p-1)/p}`.
pub fn theorem2_bound(
    gamma: f64,
    n: u32,
    ab: f64,
    p: Exponent,
    k: &BoundConstants,
) -> Result<PowerBound> {
    check_gamma(gamma)?;
    check_bands(n)?;
    check_nonnegative("ab", ab)?;
    Ok(PowerBound::new(k.c_t2 / gamma, -theorem2_exponent(gamma, n, ab, p, k.c_t2)))
}

/// `n` well-separated bands: `(γ/C)^{ab (C/γ)^n + n - (p-1)/p}`. The same
/// number as [`theorem2_bound`], written with the reciprocal base.
pub fn theorem2prime_bound(
    gamma: f64,
    n: u32,
    ab: f64,
    p: Exponent,
    k: &BoundConstants,
) -> Result<PowerBound> {
    check_gamma(gamma)?;
    check_bands(n)?;
    check_nonnegative("ab", ab)?;
    Ok(PowerBound::new(gamma / k.c_t2, theorem2_exponent(gamma, n, ab, p, k.c_t2)))
}

/// The two easy regimes of the one-band bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Remark1Bounds {
    /// `γ^{1/p} / 2`, valid when `ab <= 1`.
    pub small_ab: Option<f64>,
    /// `(1/2)^{1/p}`, valid for finite `p` when `1 - γ <= 1/(2 + p ab)`.
    pub near_full: Option<f64>,
}

pub fn remark1_bounds(gamma: f64, ab: f64, p: Exponent) -> Result<Remark1Bounds> {
    check_gamma(gamma)?;
    check_nonnegative("ab", ab)?;
    let small_ab = (ab <= 1.0).then(|| gamma.powf(p.recip()) / 2.0);
    let near_full = match p {
        Exponent::Finite(pv) if 1.0 - gamma <= 1.0 / (2.0 + pv * ab) => Some(0.5f64.powf(1.0 / pv)),
        _ => None,
    };
    Ok(Remark1Bounds { small_ab, near_full })
}

fn check_measure(meas_e: f64, len_i: f64) -> Result<()> {
    if !(meas_e > 0.0) {
        return Err(Error::EmptySet);
    }
    if !(meas_e <= len_i * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "|E| = {meas_e} exceeds the interval length {len_i}"
        )));
    }
    Ok(())
}

/// Local estimate for analytic functions on a unit interval with growth
/// `M >= 1`: `(C/|E|)^{ln M/ln 2}` (sup form, `p = None`) or
/// `(C/|E|)^{ln M/ln 2 + 1/p}` (`L^p` form).
pub fn lemma1_corollary_bound(
    meas_e: f64,
    growth: f64,
    p: Option<Exponent>,
    k: &BoundConstants,
) -> Result<PowerBound> {
    check_measure(meas_e, 1.0)?;
    if !(growth >= 1.0) {
        return Err(Error::InvalidM(growth));
    }
    let extra = p.map_or(0.0, Exponent::recip);
    Ok(PowerBound::new(k.c_aux / meas_e, growth.ln() / std::f64::consts::LN_2 + extra))
}

/// Exponential sums with polynomial coefficients:
/// `(C|I|/|E|)^{nm - (p-1)/p}`.
pub fn lemma3_bound(
    len_i: f64,
    meas_e: f64,
    n: u32,
    m: u32,
    p: Exponent,
    k: &BoundConstants,
) -> Result<PowerBound> {
    check_measure(meas_e, len_i)?;
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("n and m must be at least 1".into()));
    }
    let exponent = (n * m) as f64 - p.conjugate_fraction();
    Ok(PowerBound::new(k.c_aux * len_i / meas_e, exponent))
}

/// Nazarov's `(C|I|/|E|)^{n-1}` for `n`-term exponential sums and the Remez
/// constant `(4|I|/|E|)^n` for degree-`n` polynomials.
pub fn nazarov_remez_bounds(
    len_i: f64,
    meas_e: f64,
    n: u32,
    k: &BoundConstants,
) -> Result<(PowerBound, PowerBound)> {
    check_measure(meas_e, len_i)?;
    let ratio = len_i / meas_e;
    Ok((
        PowerBound::new(k.c_aux * ratio, n as f64 - 1.0),
        PowerBound::new(4.0 * ratio, n as f64),
    ))
}

/// Dimension and the products `a_k b_k` of a box-shaped band and thickness
/// window in `d` dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiDimParams {
    pub ab_products: Vec<f64>,
}

impl MultiDimParams {
    pub fn new(ab_products: Vec<f64>) -> Result<Self> {
        if ab_products.is_empty() {
            return Err(Error::InvalidArgument("dimension d must be at least 1".into()));
        }
        for &ab in &ab_products {
            check_nonnegative("a_k b_k", ab)?;
        }
        Ok(Self { ab_products })
    }

    pub fn dimension(&self) -> usize {
        self.ab_products.len()
    }

    pub fn total(&self) -> f64 {
        self.ab_products.iter().sum()
    }
}

/// `d`-dimensional bounds: with `n = None`, `(γ/C^d)^{C(d + Σ a_k b_k)}`
/// (constant `c_t1`); with `n = Some(n)` bands,
/// `(C^d/γ)^{-(C^d/γ)^n Σ a_k b_k - n + (p-1)/p}` (constant `c_t2`).
pub fn multidim_bound(
    gamma: f64,
    params: &MultiDimParams,
    p: Exponent,
    n: Option<u32>,
    k: &BoundConstants,
) -> Result<PowerBound> {
    check_gamma(gamma)?;
    let d = params.dimension() as i32;
    let sum = params.total();
    Ok(match n {
        None => {
            let c = k.c_t1;
            PowerBound::new(gamma / c.powi(d), c * (d as f64 + sum))
        }
        Some(n) => {
            check_bands(n)?;
            let base = k.c_t2.powi(d) / gamma;
            let exponent = base.powi(n as i32) * sum + n as f64 - p.conjugate_fraction();
            PowerBound::new(base, -exponent)
        }
    })
}
