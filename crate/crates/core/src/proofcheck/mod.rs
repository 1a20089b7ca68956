//! Executable versions of the constructive steps behind the one-band and
//! `n`-band lower bounds, checked on concrete trigonometric polynomials.
//!
//! The one-band argument splits the line into unit intervals and calls an
//! interval *bad* when some derivative carries too much local mass:
//!
//! ```text
//! ∫_I |f^(α)|^p >= A^{αp} (C b)^{αp} ∫_I |f|^p   for some α >= 1.
//! ```
//!
//! Summing Bernstein's inequality over α shows the bad intervals carry at most
//! `1/(A^p - 1)` of `∫|f|^p`, so with `A = 3` the good intervals carry at least
//! half. On a good interval `f` has controlled growth, which feeds a local
//! estimate of `∫_{E∩I}|f|^p` against `∫_I|f|^p`.

mod expsum;
mod taylor;

pub use expsum::{
    chebyshev_instance, exp_sum_verifier, minimal_constant, random_exp_sum, ExpSum, ExpSumCheck,
    CONSTANT_GRID,
};
pub use taylor::{demodulate, taylor_split, TaylorSplit};

use num_complex::Complex64;
use serde::Serialize;

use crate::bandlimited::{BandSpec, Exponent, TrigPoly, DEFAULT_RESOLUTION};
use crate::bounds::{BoundConstants, PowerBound};
use crate::error::{Error, Result};
use crate::quadrature::{composite_nodes, grid_sup};
use crate::sets::IntervalSet;

/// Target for the truncated tail `Σ_{α > α_max} A^{-αp}`.
pub const TAIL_TARGET: f64 = 1e-6;

/// Parameters of the good/bad interval classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifierParams {
    /// Threshold `A` for bad intervals.
    pub a_threshold: f64,
    /// Pointwise threshold `B` of the growth claim on good intervals.
    pub b_pointwise: f64,
    /// Bernstein constant: `‖f^{(α)}‖_p <= (C b)^α ‖f‖_p` with `C = 1/2`.
    pub c_bern: f64,
    /// Highest derivative order inspected.
    pub alpha_max: u32,
    pub p: f64,
}

impl ClassifierParams {
    /// Defaults `A = B = 3`, `C = 1/2`, and the smallest `α_max` whose
    /// truncated tail is below [`TAIL_TARGET`].
    pub fn new(p: Exponent) -> Result<Self> {
        let Exponent::Finite(p) = p else {
            return Err(Error::InvalidExponent(f64::INFINITY));
        };
        let a_threshold = 3.0;
        Ok(Self {
            a_threshold,
            b_pointwise: 3.0,
            c_bern: 0.5,
            alpha_max: default_alpha_max(p, a_threshold),
            p,
        })
    }

    /// `Σ_{α > α_max} A^{-αp}`, the mass bound lost by truncation.
    pub fn tail(&self) -> f64 {
        let q = self.a_threshold.powf(-self.p);
        q.powi(self.alpha_max as i32 + 1) / (1.0 - q)
    }

    /// `1/(A^p - 1)`, the bound on the bad-interval mass fraction.
    pub fn bad_fraction_bound(&self) -> f64 {
        1.0 / (self.a_threshold.powf(self.p) - 1.0)
    }
}

/// `ceil(ln(1/ε) / (p ln A))` with `ε = TAIL_TARGET`.
pub fn default_alpha_max(p: f64, a_threshold: f64) -> u32 {
    ((1.0 / TAIL_TARGET).ln() / (p * a_threshold.ln())).ceil().max(1.0) as u32
}

/// Unit intervals covering `[0, period)`; the last one is shorter when the
/// period is not an integer.
pub fn unit_partition(period: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut lo = 0.0;
    while lo < period - 1e-12 {
        let hi = (lo + 1.0).min(period);
        out.push((lo, hi));
        lo += 1.0;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalLabel {
    pub lo: f64,
    pub hi: f64,
    pub bad: bool,
    /// Smallest derivative order that made the interval bad.
    pub alpha: Option<u32>,
    /// `∫_I |f|^p`.
    pub mass: f64,
}

/// Labels each interval of `partition` good or bad.
///
/// Derivative integrals are computed on the rescaled derivatives
/// `f^{(α)} / (A C b)^α`, so the test reads `∫_I |·|^p >= ∫_I |f|^p`.
pub fn classify_intervals(
    f: &TrigPoly,
    b: f64,
    partition: &[(f64, f64)],
    params: &ClassifierParams,
) -> Result<Vec<IntervalLabel>> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::InvalidBand(format!("bandwidth {b} must be positive")));
    }
    let scale = params.a_threshold * params.c_bern * b;
    let factors: Vec<Complex64> = f.frequencies().map(|nu| Complex64::new(0.0, nu / scale)).collect();
    let width = f.panel_width(DEFAULT_RESOLUTION);
    let orders = params.alpha_max as usize + 1;
    let mut values = Vec::with_capacity(factors.len());
    let mut integrals = vec![0.0; orders];
    let mut labels = Vec::with_capacity(partition.len());
    for &(lo, hi) in partition {
        integrals.iter_mut().for_each(|v| *v = 0.0);
        for (x, w) in composite_nodes(lo, hi, width) {
            f.term_values(x, &mut values);
            for (alpha, slot) in integrals.iter_mut().enumerate() {
                let sum: Complex64 = values.iter().sum();
                *slot += w * sum.norm().powf(params.p);
                if alpha + 1 < orders {
                    values.iter_mut().zip(&factors).for_each(|(v, s)| *v *= s);
                }
            }
        }
        let mass = integrals[0];
        let alpha = (1..orders).find(|&a| integrals[a] >= mass).map(|a| a as u32);
        labels.push(IntervalLabel { lo, hi, bad: alpha.is_some(), alpha, mass });
    }
    Ok(labels)
}

/// Split of `∫|f|^p` between good and bad intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodMass {
    pub total: f64,
    pub good_fraction: f64,
    pub bad_fraction: f64,
}

impl GoodMass {
    /// Good intervals carry at least half the mass, up to `tau`.
    pub fn holds(&self, tau: f64) -> bool {
        self.good_fraction >= 0.5 - tau
    }
}

/// Mass fractions from a labelling produced by [`classify_intervals`] (the
/// labels carry each interval's `∫_I |f|^p`).
pub fn good_mass_check(labels: &[IntervalLabel]) -> Result<GoodMass> {
    let total: f64 = labels.iter().map(|l| l.mass).sum();
    if !(total > 0.0) {
        return Err(Error::ZeroFunction);
    }
    let good: f64 = labels.iter().filter(|l| !l.bad).map(|l| l.mass).sum();
    Ok(GoodMass { total, good_fraction: good / total, bad_fraction: 1.0 - good / total })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalEstimate {
    /// `∫_{E∩I} |f|^p` (or `sup_{E∩I} |f|` for `p = ∞`).
    pub lhs: f64,
    /// `∫_I |f|^p` (or `sup_I |f|`).
    pub local: f64,
    /// `|E ∩ I| / |I|`.
    pub gamma: f64,
    /// `(γ/C)^{Cbp + 2}` (`(γ/C)^{Cb + 1}` for `p = ∞`).
    pub factor: PowerBound,
    pub holds: bool,
}

impl LocalEstimate {
    /// `ln(factor · local)`.
    pub fn ln_rhs(&self) -> f64 {
        self.factor.ln() + self.local.ln()
    }
}

/// Checks `∫_{E∩I}|f|^p >= (γ/C)^{Cbp+2} ∫_I|f|^p` on one interval, with the
/// constant `C = k.c_t1` in both places.
pub fn local_estimate_check(
    f: &TrigPoly,
    set: &IntervalSet,
    interval: (f64, f64),
    b: f64,
    p: Exponent,
    k: &BoundConstants,
) -> Result<LocalEstimate> {
    let (lo, hi) = interval;
    let pieces = set.restrict(lo, hi);
    let meas: f64 = pieces.iter().map(|&(a, b)| b - a).sum();
    if !(meas > 0.0) {
        return Err(Error::EmptySet);
    }
    let gamma = (meas / (hi - lo)).min(1.0);
    let c = k.c_t1;
    let (lhs, local, exponent) = match p {
        Exponent::Finite(pv) => (
            f.power_integral(&pieces, pv, DEFAULT_RESOLUTION),
            f.power_integral(&[interval], pv, DEFAULT_RESOLUTION),
            c * b * pv + 2.0,
        ),
        Exponent::Infinity => (
            f.norm_on(&pieces, p, DEFAULT_RESOLUTION)?,
            f.norm_on(&[interval], p, DEFAULT_RESOLUTION)?,
            c * b + 1.0,
        ),
    };
    let factor = PowerBound { base: gamma / c, exponent };
    let holds = lhs > 0.0 && lhs.ln() >= factor.ln() + local.ln();
    Ok(LocalEstimate { lhs, local, gamma, factor, holds })
}

/// `max_{|y - center(I)| <= R} |f(y)| / ‖f‖_{L^p(I)}`.
pub fn growth_envelope(f: &TrigPoly, interval: (f64, f64), radius: f64, p: Exponent) -> Result<f64> {
    let local = f.norm_on(&[interval], p, DEFAULT_RESOLUTION)?;
    if !(local > 0.0) {
        return Err(Error::ZeroFunction);
    }
    let center = 0.5 * (interval.0 + interval.1);
    let window = [(center - radius, center + radius)];
    let (_, peak) = grid_sup(&window, f.panel_width(DEFAULT_RESOLUTION), |x| f.eval(x).norm());
    Ok(peak / local)
}

/// `2^{1/p} exp(C_env b (R + 1/2))`.
pub fn growth_bound(b: f64, radius: f64, p: Exponent, c_env: f64) -> f64 {
    2f64.powf(p.recip()) * (c_env * b * (radius + 0.5)).exp()
}

/// Band components `f_k` of `f` and their norms relative to `‖f‖_p`.
#[derive(Debug, Clone, Serialize)]
pub struct BandComponents {
    pub norms: Vec<f64>,
    pub total: f64,
    pub max_ratio: f64,
}

/// Restriction of `f` to the frequencies of one band.
pub fn band_component(f: &TrigPoly, spec: &BandSpec, band: usize) -> TrigPoly {
    f.filter(|nu| spec.band_of(nu) == Some(band))
}

pub fn band_component_norms(f: &TrigPoly, spec: &BandSpec, p: Exponent) -> Result<BandComponents> {
    if let Some((i, j)) = spec.first_overlap() {
        return Err(Error::BandOverlap(i, j));
    }
    if !f.in_band(spec) {
        return Err(Error::InvalidArgument("spectrum is not inside the bands".into()));
    }
    let torus = f.torus();
    let total = f.norm_on(&torus, p, DEFAULT_RESOLUTION)?;
    if !(total > 0.0) {
        return Err(Error::ZeroFunction);
    }
    let norms = (0..spec.count())
        .map(|k| band_component(f, spec, k).norm_on(&torus, p, DEFAULT_RESOLUTION))
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = norms.iter().fold(0.0f64, |acc, &n| acc.max(n / total));
    Ok(BandComponents { norms, total, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandlimited::{frequency, random_bandlimited};
    use crate::sets::two_sliver_set;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const P1: Exponent = Exponent::Finite(1.0);
    const P2: Exponent = Exponent::Finite(2.0);

    #[test]
    fn params_defaults() {
        let p1 = ClassifierParams::new(P1).unwrap();
        assert_eq!(p1.alpha_max, 13);
        assert!(p1.tail() <= TAIL_TARGET);
        assert_relative_eq!(p1.bad_fraction_bound(), 0.5);
        let p2 = ClassifierParams::new(P2).unwrap();
        assert_eq!(p2.alpha_max, 7);
        assert!(p2.tail() <= TAIL_TARGET);
        assert_relative_eq!(p2.bad_fraction_bound(), 0.125);
        assert!(ClassifierParams::new(Exponent::Infinity).is_err());
    }

    #[test]
    fn partition_covers_period() {
        assert_eq!(unit_partition(3.0), vec![(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]);
        let odd = unit_partition(2.5);
        assert_eq!(odd.len(), 3);
        assert_eq!(odd[2], (2.0, 2.5));
    }

    #[test]
    fn constants_and_pure_exponentials_are_good() {
        let b = 4.0 * PI;
        let params = ClassifierParams::new(P2).unwrap();
        let constant = TrigPoly::constant(6.0, Complex64::new(0.3, -2.0)).unwrap();
        let labels = classify_intervals(&constant, b, &unit_partition(6.0), &params).unwrap();
        assert!(labels.iter().all(|l| !l.bad));
        assert_relative_eq!(good_mass_check(&labels).unwrap().good_fraction, 1.0);

        // |ν| = b/2 exactly
        let top = TrigPoly::new(6.0, vec![(6, Complex64::new(1.0, 0.0))]).unwrap();
        assert_relative_eq!(frequency(6, 6.0), b / 2.0, max_relative = 1e-15);
        for p in [P1, P2] {
            let params = ClassifierParams::new(p).unwrap();
            let labels = classify_intervals(&top, b, &unit_partition(6.0), &params).unwrap();
            assert!(labels.iter().all(|l| !l.bad));
        }
        assert!(matches!(
            classify_intervals(&top, 0.0, &unit_partition(6.0), &params),
            Err(Error::InvalidBand(_))
        ));
    }

    /// Independent check of the bad test on one interval, one derivative at a
    /// time with the public norm routine.
    #[test]
    fn labels_agree_with_direct_derivative_integrals() {
        let b = 16.0 * PI;
        let spec = BandSpec::centered(b).unwrap();
        let f = random_bandlimited(&spec, 8.0, None, 11).unwrap();
        for p in [P1, P2] {
            let params = ClassifierParams::new(p).unwrap();
            let labels = classify_intervals(&f, b, &unit_partition(8.0), &params).unwrap();
            for label in &labels {
                let iv = [(label.lo, label.hi)];
                let base = f.power_integral(&iv, params.p, DEFAULT_RESOLUTION);
                assert_relative_eq!(label.mass, base, max_relative = 1e-12);
                let direct = (1..=params.alpha_max).find(|&alpha| {
                    let d = f.derivative(alpha).power_integral(&iv, params.p, DEFAULT_RESOLUTION);
                    let threshold = (params.a_threshold * params.c_bern * b).powf(alpha as f64 * params.p);
                    d >= threshold * base
                });
                assert_eq!(direct, label.alpha);
            }
            let mass = good_mass_check(&labels).unwrap();
            assert!(mass.bad_fraction <= params.bad_fraction_bound() + params.tail() + 1e-9);
        }
    }

    #[test]
    fn local_estimate_examples() {
        let k = BoundConstants::default();
        let b = 4.0 * PI;
        let spec = BandSpec::centered(b).unwrap();
        let f = random_bandlimited(&spec, 4.0, None, 5).unwrap();
        let full = IntervalSet::full(1.0).unwrap();
        let est = local_estimate_check(&f, &full, (1.0, 2.0), b, P2, &k).unwrap();
        assert_relative_eq!(est.lhs, est.local, max_relative = 1e-12);
        assert!(est.holds);

        let constant = TrigPoly::constant(4.0, Complex64::new(2.0, 0.0)).unwrap();
        let e = two_sliver_set(0.3).unwrap();
        let est = local_estimate_check(&constant, &e, (0.0, 1.0), b, P1, &k).unwrap();
        assert_relative_eq!(est.lhs / est.local, 0.3, max_relative = 1e-12);
        assert_relative_eq!(est.gamma, 0.3, max_relative = 1e-12);
        assert!(est.holds);

        let gap = IntervalSet::periodic(&[(0.5, 0.6)], 1.0).unwrap();
        assert!(matches!(
            local_estimate_check(&constant, &gap, (0.0, 0.4), b, P1, &k),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn growth_examples() {
        let b = 4.0 * PI;
        let constant = TrigPoly::constant(10.0, Complex64::new(0.0, 3.0)).unwrap();
        let ratio = growth_envelope(&constant, (2.0, 3.0), 4.5, P2).unwrap();
        assert_relative_eq!(ratio, 3.0 / 3.0, max_relative = 1e-9);
        let top = TrigPoly::new(10.0, vec![(20, Complex64::new(1.0, 0.0))]).unwrap();
        for p in [P1, P2, Exponent::Infinity] {
            let ratio = growth_envelope(&top, (2.0, 3.0), 4.5, p).unwrap();
            assert_relative_eq!(ratio, 1.0, max_relative = 1e-9);
            assert!(ratio <= growth_bound(b, 4.5, p, 1.0));
        }
    }

    #[test]
    fn band_components_examples() {
        let spec = BandSpec::centered(4.0 * PI).unwrap();
        let f = random_bandlimited(&spec, 5.0, None, 2).unwrap();
        let one = band_component_norms(&f, &spec, P1).unwrap();
        assert_relative_eq!(one.max_ratio, 1.0, max_relative = 1e-12);

        let split = BandSpec::new(vec![-6.0 * PI, 0.0, 6.0 * PI], 2.0 * PI).unwrap();
        for seed in 0..5 {
            let f = random_bandlimited(&split, 5.0, None, seed).unwrap();
            let r = band_component_norms(&f, &split, P2).unwrap();
            assert!(r.max_ratio <= 1.0 + 1e-10);
        }
        let overlapping = BandSpec::new(vec![0.0, 1.0], 2.0).unwrap();
        let g = TrigPoly::constant(5.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(band_component_norms(&g, &overlapping, P2), Err(Error::BandOverlap(0, 1))));
    }
}
